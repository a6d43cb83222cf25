/** Mirrors of the service's JSON session view. No client-side retrieval
 * logic lives here: the UI renders exactly what the server returns. */

export interface TranscriptWord {
  position: number;
  surface: string;
  confidence: number;
  dropped: boolean;
  material: boolean;
}

export interface PendingConfirmation {
  position: number;
  surface: string;
  confidence: number;
  alternatives: string[];
}

export interface QueryTermView {
  term: string;
  surface: string;
  weight: number;
  confidence: number;
}

export interface QueryView {
  origin: string;
  terms: QueryTermView[];
}

export interface RankedEntry {
  doc_id: string;
  score: number;
  title: string;
}

export interface RankedView {
  entries: RankedEntry[];
  threshold: number;
  surely_relevant: number;
}

export interface SummaryView {
  doc_id: string;
  title: string;
  text: string;
}

export interface SuggestionView {
  original: string;
  candidate: string;
  similarity: number;
  support: number;
}

export type SessionState =
  | "awaiting_login"
  | "awaiting_query"
  | "confirming_words"
  | "browsing"
  | "closed";

export interface SessionView {
  session_id: string;
  state: SessionState;
  user_id: string | null;
  transcript: TranscriptWord[];
  pending: PendingConfirmation[];
  query: QueryView | null;
  ranked: RankedView | null;
  cursor: number;
  presentation: string[];
  retrieved_set: string[];
  summary: SummaryView | null;
  suggestions: SuggestionView[];
  confirm_threshold: number;
  seed: number | null;
  emissions: number;
}

export interface Receipt {
  receipt_id: string;
  channel: string;
  target: string | null;
  byte_count: number;
  timestamp: number;
  status: string;
  error: string | null;
}

export type QueryMode = "typed" | "spoken-simulated";
export type BrowseAction = "next" | "repeat" | "mark_relevant" | "stop";
export type ConfirmChoice = "keep" | "re-utter" | "drop" | "alternative";
export type DeliveryChannel = "voice" | "email" | "fax" | "postal";
