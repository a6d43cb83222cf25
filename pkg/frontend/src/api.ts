import type {
  BrowseAction,
  ConfirmChoice,
  DeliveryChannel,
  QueryMode,
  Receipt,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<never> {
  let message = `${response.status}`;
  try {
    const body = (await response.json()) as { error?: string };
    if (body.error) message = body.error;
  } catch {
    /* non-JSON error body; keep the status text */
  }
  throw new ApiError(response.status, message);
}

/** Thin client over the documented session endpoints; every mutation is a
 * POST and every response is the server's session view. */
export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, init);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? "{}" : JSON.stringify(body),
    });
  }

  createSession(): Promise<SessionView> {
    return this.post("/sessions");
  }

  getView(sessionId: string): Promise<SessionView> {
    return this.request(`/sessions/${sessionId}`);
  }

  login(sessionId: string, pin: string): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/login`, { pin });
  }

  query(
    sessionId: string,
    utterance: string,
    options: {
      mode?: QueryMode;
      n_recognizers?: number;
      accuracy?: number;
      seed?: number;
    } = {},
  ): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/query`, { utterance, ...options });
  }

  confirm(
    sessionId: string,
    position: number,
    choice: ConfirmChoice,
    alternative?: number,
  ): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/confirm`, {
      position,
      choice,
      alternative: alternative ?? null,
    });
  }

  browse(sessionId: string, action: BrowseAction): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/browse`, { action });
  }

  feedback(sessionId: string): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/feedback`);
  }

  approveSuggestion(
    sessionId: string,
    original: string,
    candidate: string,
  ): Promise<SessionView> {
    return this.post(`/sessions/${sessionId}/feedback`, {
      approve: { original, candidate },
    });
  }

  delivery(
    sessionId: string,
    docIds: string[],
    channel: DeliveryChannel,
    format = "ascii",
  ): Promise<{ receipt: Receipt }> {
    return this.post(`/sessions/${sessionId}/delivery`, {
      doc_ids: docIds,
      channel,
      format,
    });
  }
}
