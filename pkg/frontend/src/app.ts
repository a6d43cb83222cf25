import { ApiClient, ApiError } from "./api.js";
import { renderApp } from "./render.js";
import type { BrowseAction, ConfirmChoice, SessionView } from "./types.js";

/** The only client-side state: the session id, the last server view, and
 * whether a request is in flight.  Reloading re-fetches the same view. */
interface AppState {
  sessionId: string | null;
  view: SessionView | null;
  busy: boolean;
  error: string | null;
}

const api = new ApiClient("");
const state: AppState = { sessionId: null, view: null, busy: false, error: null };

function root(): HTMLElement {
  const el = document.getElementById("app");
  if (!el) throw new Error("missing #app container");
  return el;
}

function draw(): void {
  if (!state.view) return;
  root().innerHTML = renderApp(state.view, state.error);
  root().querySelectorAll("button").forEach((b) => {
    if (state.busy) b.setAttribute("disabled", "disabled");
  });
}

function maybeSpeak(previous: SessionView | null): void {
  const speak = (document.getElementById("speak") as HTMLInputElement | null)?.checked;
  if (!speak || !state.view?.summary) return;
  if (previous?.summary?.text === state.view.summary.text && previous.emissions === state.view.emissions) return;
  const synthesis = (window as { speechSynthesis?: SpeechSynthesis }).speechSynthesis;
  if (!synthesis) return;
  synthesis.cancel();
  synthesis.speak(new SpeechSynthesisUtterance(state.view.summary.text));
}

/** One request at a time; a failed call keeps the current view and shows
 * the server's message inline. */
async function perform(call: () => Promise<SessionView>): Promise<void> {
  if (state.busy) return;
  state.busy = true;
  draw();
  const previous = state.view;
  try {
    state.view = await call();
    state.error = null;
    state.busy = false;
    draw();
    maybeSpeak(previous);
  } catch (err) {
    state.busy = false;
    state.error = err instanceof ApiError ? err.message : String(err);
    draw();
  }
}

function inputValue(id: string): string {
  return (document.getElementById(id) as HTMLInputElement | null)?.value ?? "";
}

function handleKeypad(target: HTMLElement): void {
  const key = target.dataset.key;
  if (key === undefined) return;
  const pin = document.getElementById("pin") as HTMLInputElement | null;
  if (!pin) return;
  pin.value = key === "clear" ? "" : pin.value + key;
}

async function handleAction(target: HTMLElement): Promise<void> {
  const sessionId = state.sessionId;
  if (!sessionId) return;
  switch (target.dataset.action) {
    case "login":
      await perform(() => api.login(sessionId, inputValue("pin")));
      break;
    case "submit-query": {
      const mode = inputValue("mode") as "typed" | "spoken-simulated";
      const seedText = inputValue("seed");
      await perform(() =>
        api.query(sessionId, inputValue("utterance"), {
          mode,
          accuracy: mode === "typed" ? undefined : Number(inputValue("accuracy")),
          n_recognizers: mode === "typed" ? undefined : Number(inputValue("recognizers")),
          seed: seedText ? Number(seedText) : undefined,
        }),
      );
      break;
    }
    case "confirm": {
      const position = Number(target.dataset.position);
      const choice = target.dataset.choice as ConfirmChoice;
      const alternative =
        target.dataset.alternative === undefined ? undefined : Number(target.dataset.alternative);
      await perform(() => api.confirm(sessionId, position, choice, alternative));
      break;
    }
    case "browse":
      await perform(() => api.browse(sessionId, target.dataset.browse as BrowseAction));
      break;
    case "feedback":
      await perform(() => api.feedback(sessionId));
      break;
    case "approve-suggestion":
      await perform(() =>
        api.approveSuggestion(
          sessionId,
          target.dataset.original ?? "",
          target.dataset.candidate ?? "",
        ),
      );
      break;
    case "dismiss-suggestion":
      target.closest("li")?.remove();
      break;
    case "deliver": {
      const channel = inputValue("channel") as "email" | "voice" | "fax" | "postal";
      const format = inputValue("format");
      if (!state.view) break;
      const docIds = state.view.retrieved_set;
      state.busy = true;
      draw();
      try {
        const { receipt } = await api.delivery(sessionId, docIds, channel, format);
        state.error = null;
        state.busy = false;
        state.view = await api.getView(sessionId);
        draw();
        toast(`Delivered ${receipt.byte_count} bytes via ${receipt.channel} (${receipt.receipt_id})`);
      } catch (err) {
        state.busy = false;
        state.error = err instanceof ApiError ? err.message : String(err);
        draw();
      }
      break;
    }
  }
}

function toast(message: string): void {
  const el = document.createElement("div");
  el.className = "toast";
  el.textContent = message;
  document.body.appendChild(el);
  setTimeout(() => el.remove(), 4000);
}

export async function start(): Promise<void> {
  const stored = sessionStorage.getItem("session_id");
  try {
    state.view = stored ? await api.getView(stored) : await api.createSession();
  } catch {
    state.view = await api.createSession();
  }
  state.sessionId = state.view.session_id;
  sessionStorage.setItem("session_id", state.sessionId);
  draw();

  root().addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.key !== undefined) {
      handleKeypad(target);
      return;
    }
    if (target.dataset.action) void handleAction(target);
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void start();
}
