import type { SessionView, SuggestionView, TranscriptWord } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function confidenceClass(word: TranscriptWord, threshold: number): string {
  if (word.dropped) return "word dropped";
  if (word.confidence < threshold) return "word low-confidence";
  return "word";
}

/** Transcript with per-word confidence tinting; words under the server's
 * confirmation threshold are visually flagged. */
export function renderTranscript(view: SessionView): string {
  if (view.transcript.length === 0) return "";
  const words = view.transcript
    .map(
      (w) =>
        `<span class="${confidenceClass(w, view.confirm_threshold)}" ` +
        `title="confidence ${w.confidence.toFixed(2)}">` +
        `${escapeHtml(w.surface)}<sub>${w.confidence.toFixed(2)}</sub></span>`,
    )
    .join(" ");
  return `<div class="transcript" data-testid="transcript">${words}</div>`;
}

function renderLogin(): string {
  const keys = [1, 2, 3, 4, 5, 6, 7, 8, 9, 0]
    .map((d) => `<button type="button" class="key" data-key="${d}">${d}</button>`)
    .join("");
  return `
    <section class="screen login" data-screen="login">
      <h2>Sign in</h2>
      <p>Key in your identification number.</p>
      <input id="pin" type="password" inputmode="numeric" autocomplete="off" placeholder="PIN" />
      <div class="keypad">${keys}
        <button type="button" class="key" data-key="clear">C</button>
        <button type="button" data-action="login">Enter</button>
      </div>
    </section>`;
}

function renderQueryForm(view: SessionView): string {
  return `
    <section class="screen query" data-screen="query">
      <h2>New query</h2>
      <input id="utterance" type="text" placeholder="Say something to search for" />
      <label>Mode
        <select id="mode">
          <option value="spoken-simulated">spoken (simulated)</option>
          <option value="typed">typed</option>
        </select>
      </label>
      <label>Recognition accuracy
        <input id="accuracy" type="range" min="0" max="1" step="0.05" value="0.8" />
      </label>
      <label>Recognizers
        <select id="recognizers"><option>1</option><option>2</option><option selected>3</option></select>
      </label>
      <label>Seed <input id="seed" type="number" placeholder="random" /></label>
      <button type="button" data-action="submit-query">Search</button>
      ${view.retrieved_set.length ? feedbackButton() : ""}
    </section>`;
}

function feedbackButton(): string {
  return `<button type="button" data-action="feedback">Refine from marked documents</button>`;
}

function renderConfirmations(view: SessionView): string {
  const cards = view.pending
    .map((p) => {
      const alternatives = p.alternatives
        .map(
          (alt, i) =>
            `<button type="button" data-action="confirm" data-position="${p.position}" ` +
            `data-choice="alternative" data-alternative="${i}">${escapeHtml(alt)}</button>`,
        )
        .join(" ");
      return `
        <div class="confirmation" data-position="${p.position}">
          <p>Did you say <strong>${escapeHtml(p.surface)}</strong>
             (confidence ${p.confidence.toFixed(2)})?</p>
          <button type="button" data-action="confirm" data-position="${p.position}" data-choice="keep">Keep</button>
          <button type="button" data-action="confirm" data-position="${p.position}" data-choice="re-utter">Say again</button>
          <button type="button" data-action="confirm" data-position="${p.position}" data-choice="drop">Drop</button>
          ${alternatives}
        </div>`;
    })
    .join("");
  return `
    <section class="screen confirm" data-screen="confirm">
      <h2>Please confirm</h2>
      ${renderTranscript(view)}
      ${cards}
    </section>`;
}

export function renderSuggestions(suggestions: SuggestionView[]): string {
  if (suggestions.length === 0) return "";
  const rows = suggestions
    .map(
      (s) =>
        `<li>Did you mean <strong>${escapeHtml(s.candidate)}</strong> instead of ` +
        `<em>${escapeHtml(s.original)}</em>? ` +
        `<button type="button" data-action="approve-suggestion" ` +
        `data-original="${escapeHtml(s.original)}" data-candidate="${escapeHtml(s.candidate)}">Yes</button> ` +
        `<button type="button" data-action="dismiss-suggestion">No</button></li>`,
    )
    .join("");
  return `<ul class="suggestions" data-testid="suggestions">${rows}</ul>`;
}

function renderBrowsing(view: SessionView): string {
  const banner = view.ranked
    ? `<p class="banner" data-testid="surely-relevant">` +
      `${view.ranked.surely_relevant} documents look surely relevant ` +
      `(of ${view.ranked.entries.length} found).</p>`
    : "";
  const summary = view.summary
    ? `<article class="summary" data-doc="${escapeHtml(view.summary.doc_id)}">
         <h3>${escapeHtml(view.summary.title)} <small>${escapeHtml(view.summary.doc_id)}</small></h3>
         <p>${escapeHtml(view.summary.text)}</p>
       </article>`
    : `<p class="hint">Press Next to hear the first summary.</p>`;
  return `
    <section class="screen browsing" data-screen="browsing">
      ${banner}
      ${renderTranscript(view)}
      ${summary}
      <div class="controls">
        <button type="button" data-action="browse" data-browse="next">Next</button>
        <button type="button" data-action="browse" data-browse="repeat">Repeat</button>
        <button type="button" data-action="browse" data-browse="mark_relevant">Mark relevant</button>
        <button type="button" data-action="browse" data-browse="stop">Stop</button>
        ${view.retrieved_set.length ? feedbackButton() : ""}
      </div>
      <label class="speech-toggle">
        <input type="checkbox" id="speak" /> read summaries aloud
      </label>
      ${renderSuggestions(view.suggestions)}
      ${renderRetrieved(view)}
      ${view.retrieved_set.length ? renderDelivery(view) : ""}
    </section>`;
}

export function renderRetrieved(view: SessionView): string {
  if (view.retrieved_set.length === 0) return "";
  const items = view.retrieved_set
    .map((docId) => `<li data-testid="retrieved-doc">${escapeHtml(docId)}</li>`)
    .join("");
  return `<div class="retrieved" data-testid="retrieved-set">
      <h3>Marked relevant</h3><ul>${items}</ul></div>`;
}

function renderDelivery(view: SessionView): string {
  return `
    <div class="delivery">
      <h3>Deliver marked documents</h3>
      <label>Channel
        <select id="channel">
          <option>email</option><option>voice</option><option>fax</option><option>postal</option>
        </select>
      </label>
      <label>Format
        <select id="format">
          <option>ascii</option><option>pdf</option><option>postscript</option><option>rdf</option>
        </select>
      </label>
      <button type="button" data-action="deliver">Send</button>
    </div>`;
}

function renderClosed(): string {
  return `<section class="screen closed" data-screen="closed">
      <h2>Session closed</h2><p>Reload the page to start again.</p></section>`;
}

/** Render the whole app for the current server view.  Pure: same view,
 * same markup. */
export function renderApp(view: SessionView, error: string | null = null): string {
  let screen: string;
  switch (view.state) {
    case "awaiting_login":
      screen = renderLogin();
      break;
    case "awaiting_query":
      screen = renderQueryForm(view);
      break;
    case "confirming_words":
      screen = renderConfirmations(view);
      break;
    case "browsing":
      screen = renderBrowsing(view);
      break;
    default:
      screen = renderClosed();
  }
  const banner = error
    ? `<div class="error" role="alert" data-testid="error">${escapeHtml(error)}</div>`
    : "";
  const who = view.user_id ? ` · signed in as ${escapeHtml(view.user_id)}` : "";
  return `
    <header><h1>Telephone archive search</h1><span class="state">${view.state}${who}</span></header>
    ${banner}
    <main>${screen}</main>`;
}
