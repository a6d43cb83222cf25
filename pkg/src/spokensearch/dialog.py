"""The turn-taking dialog loop.

A session walks a small state machine: log in by PIN, submit a typed or
simulated-spoken query, confirm uncertainly recognized words, browse
query-biased summaries marking relevant documents, then feed the marks
back to refine the query and surface likely misrecognitions.  Every
operation is appended to an event log; replaying the log on a fresh
session reproduces the final state exactly.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, replace
from enum import Enum

from .corpus import Document, InvertedIndex
from .delivery import ProfileStore, UserProfile, render
from .phonetics import similarity
from .ranking import (
    SPOKEN_SIMULATED,
    TYPED,
    MisrecognitionSuggestion,
    QueryTerm,
    RankedList,
    RankingParams,
    WeightedQuery,
    detect_misrecognitions,
    rank,
    relevance_feedback,
)
from .recognizer import ErrorModel, derive_seed, transcribe_query
from .summarizer import SummaryWeights, summarize
from .text import DEFAULT_STOPLIST, normalize_term, tokenize


class DialogState(str, Enum):
    AWAITING_LOGIN = "awaiting_login"
    AWAITING_QUERY = "awaiting_query"
    CONFIRMING_WORDS = "confirming_words"
    BROWSING = "browsing"
    CLOSED = "closed"


class IllegalTransition(Exception):
    """The action is not accepted in the session's current state."""


class PreconditionError(Exception):
    """The action is accepted in this state but its precondition failed."""


ACTIONS = (
    "login",
    "submit_query",
    "confirm_word",
    "browse",
    "feedback_requery",
    "apply_suggestion",
    "read_out",
    "close",
)

# Which states accept which actions, and every state the action may land
# in on success.  Failed preconditions leave the state untouched.
TRANSITION_TABLE: dict[tuple[DialogState, str], frozenset[DialogState]] = {
    (DialogState.AWAITING_LOGIN, "login"): frozenset(
        {DialogState.AWAITING_LOGIN, DialogState.AWAITING_QUERY, DialogState.CLOSED}
    ),
    (DialogState.AWAITING_QUERY, "submit_query"): frozenset(
        {DialogState.AWAITING_QUERY, DialogState.CONFIRMING_WORDS, DialogState.BROWSING}
    ),
    (DialogState.AWAITING_QUERY, "feedback_requery"): frozenset({DialogState.BROWSING}),
    (DialogState.AWAITING_QUERY, "read_out"): frozenset({DialogState.AWAITING_QUERY}),
    (DialogState.AWAITING_QUERY, "close"): frozenset({DialogState.CLOSED}),
    (DialogState.CONFIRMING_WORDS, "confirm_word"): frozenset(
        {DialogState.CONFIRMING_WORDS, DialogState.BROWSING, DialogState.AWAITING_QUERY}
    ),
    (DialogState.CONFIRMING_WORDS, "close"): frozenset({DialogState.CLOSED}),
    (DialogState.BROWSING, "submit_query"): frozenset(
        {DialogState.BROWSING, DialogState.CONFIRMING_WORDS}
    ),
    (DialogState.BROWSING, "browse"): frozenset(
        {DialogState.BROWSING, DialogState.AWAITING_QUERY}
    ),
    (DialogState.BROWSING, "feedback_requery"): frozenset({DialogState.BROWSING}),
    (DialogState.BROWSING, "apply_suggestion"): frozenset({DialogState.BROWSING}),
    (DialogState.BROWSING, "read_out"): frozenset({DialogState.BROWSING}),
    (DialogState.BROWSING, "close"): frozenset({DialogState.CLOSED}),
}

BROWSE_ACTIONS = ("next", "repeat", "mark_relevant", "stop")
CONFIRM_CHOICES = ("keep", "re-utter", "drop", "alternative")


@dataclass(frozen=True)
class SessionSettings:
    ranking: RankingParams = RankingParams()
    summary: SummaryWeights = SummaryWeights()
    error_model: ErrorModel = ErrorModel()
    confirm_threshold: float = 0.5
    n_recognizers: int = 1
    max_login_attempts: int = 3
    n_alternatives: int = 3
    stoplist: frozenset[str] = DEFAULT_STOPLIST


@dataclass
class DraftWord:
    """One transcript word on its way to becoming a query term."""

    position: int
    surface: str
    confidence: float
    term: str  # empty when the word is stoplisted or punctuation-only
    source_index: int | None = None
    dropped: bool = False

    @property
    def material(self) -> bool:
        return bool(self.term) and not self.dropped


@dataclass(frozen=True)
class WordConfirmation:
    position: int
    surface: str
    confidence: float
    alternatives: tuple[str, ...]


@dataclass(frozen=True)
class Event:
    seq: int
    timestamp: float
    action: str
    payload: dict
    state_before: DialogState
    state_after: DialogState
    ok: bool
    note: str | None = None

    def digest(self) -> str:
        body = json.dumps(
            {"action": self.action, "payload": self.payload, "ok": self.ok, "note": self.note},
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(body.encode("utf-8")).hexdigest()


def _canonical(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


class Session:
    """One user's dialog over a shared immutable index.

    Instances are single-writer: callers must serialize operations on one
    session (the HTTP service holds a per-session lock); distinct sessions
    can run concurrently against the same index.
    """

    def __init__(
        self,
        docs: list[Document] | dict[str, Document],
        index: InvertedIndex,
        profiles: ProfileStore,
        settings: SessionSettings | None = None,
    ) -> None:
        self.docs: dict[str, Document] = (
            docs if isinstance(docs, dict) else {d.doc_id: d for d in docs}
        )
        self.index = index
        self.profiles = profiles
        self.settings = settings or SessionSettings()

        self.state = DialogState.AWAITING_LOGIN
        self.user_id: str | None = None
        self.profile: UserProfile | None = None
        self.login_attempts = 0

        self.query: WeightedQuery | None = None
        self.ranked: RankedList | None = None
        self.presentation: list[str] = []
        self.cursor = -1
        self.retrieved_set: list[str] = []
        self.last_summary: tuple[str, str] | None = None
        self.suggestions: list[MisrecognitionSuggestion] = []
        self.emissions: list[str] = []

        self.draft: list[DraftWord] = []
        self.pending: dict[int, WordConfirmation] = {}
        self.true_words: list[str] = []
        self.base_seed: int | None = None
        self.events: list[Event] = []

        self._mode = TYPED
        self._model: ErrorModel | None = None
        self._n_recognizers = self.settings.n_recognizers
        self._reutter_count = 0
        self._seq = 0
        self._vocab_sorted: tuple[str, ...] | None = None

    # ── bookkeeping ────────────────────────────────────────────────

    def _guard(self, action: str) -> DialogState:
        if (self.state, action) not in TRANSITION_TABLE:
            raise IllegalTransition(f"action {action!r} is not accepted in state {self.state.value!r}")
        return self.state

    def _log(
        self,
        action: str,
        payload: dict,
        state_before: DialogState,
        ok: bool = True,
        note: str | None = None,
    ) -> None:
        self._seq += 1
        self.events.append(
            Event(
                seq=self._seq,
                timestamp=time.time(),
                action=action,
                payload=payload,
                state_before=state_before,
                state_after=self.state,
                ok=ok,
                note=note,
            )
        )

    def _fail(self, action, payload, before, note, exc_type):
        self._log(action, payload, before, ok=False, note=note)
        raise exc_type(note)

    def _threshold(self) -> float:
        if self.profile is not None and self.profile.preferred_threshold is not None:
            return self.profile.preferred_threshold
        return self.settings.ranking.default_threshold

    def _resolved_model(self, accuracy: float | None = None) -> ErrorModel:
        model = self.settings.error_model
        if accuracy is not None:
            model = replace(model, accuracy=accuracy)
        if not model.vocabulary:
            model = replace(model, vocabulary=self.index.vocabulary)
        return model

    def _alternatives(self, surface: str) -> tuple[str, ...]:
        if self._vocab_sorted is None:
            self._vocab_sorted = tuple(sorted(self.index.vocabulary))
        own = normalize_term(surface)
        scored = sorted(
            ((-similarity(surface, term), term) for term in self._vocab_sorted if term != own),
        )
        return tuple(term for _, term in scored[: self.settings.n_alternatives])

    # ── operations ─────────────────────────────────────────────────

    def login(self, pin: str) -> DialogState:
        """Authenticate by PIN; three mismatches close the session."""
        before = self._guard("login")
        if not pin.isdigit():
            self._log(
                "login",
                {"user_id": None, "ok": False, "reason": "format"},
                before,
                ok=False,
                note="pin must be digits only",
            )
            return self.state
        matched = self.profiles.authenticate(pin)
        if matched is None:
            self._apply_login_outcome(False, None)
            self._log(
                "login",
                {"user_id": None, "ok": False, "reason": "mismatch"},
                before,
                ok=False,
                note="pin not recognized",
            )
        else:
            self._apply_login_outcome(True, matched.user_id)
            self._log("login", {"user_id": matched.user_id, "ok": True}, before)
        return self.state

    def _apply_login_outcome(self, ok: bool, user_id: str | None) -> None:
        if ok:
            self.user_id = user_id
            self.profile = self.profiles.get(user_id)
            self.state = DialogState.AWAITING_QUERY
        else:
            self.login_attempts += 1
            if self.login_attempts >= self.settings.max_login_attempts:
                self.state = DialogState.CLOSED

    def submit_query(
        self,
        utterance: str,
        mode: str = TYPED,
        n_recognizers: int | None = None,
        seed: int | None = None,
        accuracy: float | None = None,
    ) -> DialogState:
        """Capture a query; spoken mode may detour through confirmations."""
        before = self._guard("submit_query")
        payload = {
            "utterance": utterance,
            "mode": mode,
            "n_recognizers": n_recognizers,
            "seed": seed,
            "accuracy": accuracy,
        }
        if mode not in (TYPED, SPOKEN_SIMULATED):
            self._fail("submit_query", payload, before, f"unknown query mode {mode!r}", ValueError)

        if mode == TYPED:
            tokens = tokenize(utterance, self.settings.stoplist)
            draft = [
                DraftWord(position=i, surface=t.surface, confidence=1.0, term=t.term)
                for i, t in enumerate(tokens)
            ]
            true_words = [t.term for t in tokens]
            model = None
            n_used = self._n_recognizers
        else:
            if seed is None:
                self._fail("submit_query", payload, before, "spoken query needs a seed", PreconditionError)
            true_words = [t.term for t in tokenize(utterance, stoplist=None)]
            if not true_words:
                self._log("submit_query", payload, before, ok=False, note="empty utterance")
                return self.state
            model = self._resolved_model(accuracy)
            n_used = n_recognizers or self.settings.n_recognizers
            merged, _ = transcribe_query(utterance, n_used, model, seed)
            draft = []
            for pos, word in enumerate(merged.words):
                term = normalize_term(word.surface)
                if term in self.settings.stoplist:
                    term = ""
                draft.append(
                    DraftWord(
                        position=pos,
                        surface=word.surface,
                        confidence=word.confidence,
                        term=term,
                        source_index=word.source_index,
                    )
                )

        if not any(d.material for d in draft):
            self._log("submit_query", payload, before, ok=False, note="empty utterance")
            return self.state

        self._mode = mode
        self.base_seed = seed if mode == SPOKEN_SIMULATED else None
        self._model = model
        self._n_recognizers = n_used
        self.true_words = true_words
        self.draft = draft
        self.pending = {}
        self.suggestions = []
        material = [d for d in self.draft if d.material]

        uncertain = [
            d for d in material if d.confidence < self.settings.confirm_threshold
        ]
        if uncertain:
            self.pending = {
                d.position: WordConfirmation(
                    position=d.position,
                    surface=d.surface,
                    confidence=d.confidence,
                    alternatives=self._alternatives(d.surface),
                )
                for d in uncertain
            }
            self.state = DialogState.CONFIRMING_WORDS
            self._log("submit_query", payload, before, note=f"{len(uncertain)} words need confirmation")
            return self.state

        self._materialize_and_rank()
        self._log("submit_query", payload, before)
        return self.state

    def _materialize_and_rank(self) -> None:
        terms = [
            QueryTerm(term=d.term, surface=d.surface, weight=1.0, confidence=d.confidence)
            for d in self.draft
            if d.material
        ]
        if not terms:
            self.query = None
            self.ranked = None
            self.presentation = []
            self.cursor = -1
            self.last_summary = None
            self.state = DialogState.AWAITING_QUERY
            return
        self.query = WeightedQuery(terms=tuple(terms), origin=self._mode)
        self.ranked = rank(self.query, self.index, self.settings.ranking, self._threshold())
        self.presentation = self.ranked.doc_ids()
        self.cursor = -1
        self.last_summary = None
        self.state = DialogState.BROWSING

    def confirm_word(self, position: int, choice: str, alternative: int | None = None) -> DialogState:
        """Resolve one uncertain word: keep, re-utter, drop, or pick an alternative."""
        before = self._guard("confirm_word")
        payload = {"position": position, "choice": choice, "alternative": alternative}
        if position not in self.pending:
            self._fail("confirm_word", payload, before, f"position {position} is not pending", PreconditionError)
        if choice not in CONFIRM_CHOICES:
            self._fail("confirm_word", payload, before, f"unknown choice {choice!r}", ValueError)

        entry = self.draft[position]
        still_pending = False
        if choice == "keep":
            entry.confidence = 1.0
        elif choice == "drop":
            entry.dropped = True
        elif choice == "alternative":
            options = self.pending[position].alternatives
            if alternative is None or not 0 <= alternative < len(options):
                self._fail(
                    "confirm_word", payload, before,
                    f"alternative index {alternative} out of range", PreconditionError,
                )
            entry.surface = options[alternative]
            entry.term = options[alternative]
            entry.confidence = 1.0
        else:  # re-utter
            if entry.source_index is None:
                entry.dropped = True  # inserted junk: nothing was actually uttered
            else:
                assert self.base_seed is not None and self._model is not None
                self._reutter_count += 1
                sub_seed = derive_seed(self.base_seed, "reutter", self._reutter_count)
                merged, _ = transcribe_query(
                    self.true_words[entry.source_index], self._n_recognizers, self._model, sub_seed
                )
                if merged.words:
                    word = merged.words[0]
                    entry.surface = word.surface
                    entry.confidence = word.confidence
                    term = normalize_term(word.surface)
                    entry.term = "" if term in self.settings.stoplist else term
                    still_pending = entry.material and entry.confidence < self.settings.confirm_threshold
                else:
                    entry.dropped = True

        if still_pending:
            self.pending[position] = WordConfirmation(
                position=position,
                surface=entry.surface,
                confidence=entry.confidence,
                alternatives=self._alternatives(entry.surface),
            )
        else:
            del self.pending[position]

        if not self.pending:
            self._materialize_and_rank()
            note = None if self.state is DialogState.BROWSING else "query became empty"
            self._log("confirm_word", payload, before, ok=self.state is DialogState.BROWSING, note=note)
        else:
            self._log("confirm_word", payload, before)
        return self.state

    def browse(self, action: str) -> tuple[DialogState, str | None]:
        """Walk the ranked list emitting summaries; returns (state, text or None)."""
        before = self._guard("browse")
        payload = {"action": action}
        if action not in BROWSE_ACTIONS:
            self._fail("browse", payload, before, f"unknown browse action {action!r}", ValueError)

        if action == "stop":
            self._log("browse", payload, before)
            return self.state, None

        if action == "repeat":
            if self.last_summary is None:
                self._log("browse", payload, before, ok=False, note="nothing to repeat")
                return self.state, None
            text = self.last_summary[1]
            self.emissions.append(text)
            self._log("browse", payload, before)
            return self.state, text

        if action == "mark_relevant":
            if self.cursor < 0 or self.cursor >= len(self.presentation):
                self._fail("browse", payload, before, "no current document to mark", PreconditionError)
            doc_id = self.presentation[self.cursor]
            if doc_id not in self.retrieved_set:
                self.retrieved_set.append(doc_id)

        nxt = self.cursor + 1
        if nxt >= len(self.presentation):
            self.state = DialogState.AWAITING_QUERY
            self._log("browse", payload, before, note="list exhausted")
            return self.state, None
        self.cursor = nxt
        doc = self.docs[self.presentation[self.cursor]]
        summary = summarize(doc, self.query, self.settings.summary, self.settings.stoplist)
        self.last_summary = (doc.doc_id, summary.text)
        self.emissions.append(summary.text)
        self._log("browse", payload, before)
        return self.state, summary.text

    def feedback_requery(self) -> tuple[DialogState, list[MisrecognitionSuggestion]]:
        """Refine the query from the marked documents and re-rank.

        Marked documents are kept out of the new presentation order, and
        query words they never contain come back as misrecognition
        suggestions.
        """
        before = self._guard("feedback_requery")
        payload: dict = {}
        if not self.retrieved_set:
            self._fail("feedback_requery", payload, before, "retrieved set is empty", PreconditionError)
        if self.query is None:
            self._fail("feedback_requery", payload, before, "no active query to refine", PreconditionError)
        self.query = relevance_feedback(
            self.query, list(self.retrieved_set), self.index, self.settings.ranking
        )
        self.suggestions = detect_misrecognitions(
            self.query, list(self.retrieved_set), self.index, self.settings.ranking.sim_threshold
        )
        self._rerank_excluding_marked()
        self._log("feedback_requery", payload, before, note=f"{len(self.suggestions)} suggestions")
        return self.state, list(self.suggestions)

    def _rerank_excluding_marked(self) -> None:
        assert self.query is not None
        self.ranked = rank(self.query, self.index, self.settings.ranking, self._threshold())
        marked = set(self.retrieved_set)
        self.presentation = [d for d in self.ranked.doc_ids() if d not in marked]
        self.cursor = -1
        self.last_summary = None
        self.state = DialogState.BROWSING

    def apply_suggestion(self, original: str, candidate: str) -> DialogState:
        """Accept a misrecognition suggestion: swap the word in at full confidence."""
        before = self._guard("apply_suggestion")
        payload = {"original": original, "candidate": candidate}
        match = next(
            (s for s in self.suggestions if s.original.term == original and s.candidate == candidate),
            None,
        )
        if match is None:
            self._fail(
                "apply_suggestion", payload, before,
                f"no suggestion {original!r} -> {candidate!r}", PreconditionError,
            )
        assert self.query is not None
        new_terms = tuple(
            replace(qt, term=candidate, surface=candidate, confidence=1.0)
            if qt.term == original
            else qt
            for qt in self.query.terms
        )
        self.query = WeightedQuery(terms=new_terms, origin=self.query.origin)
        self.suggestions = [s for s in self.suggestions if s.original.term != original]
        self._rerank_excluding_marked()
        self._log("apply_suggestion", payload, before)
        return self.state

    def read_out(self, doc_ids: list[str]) -> DialogState:
        """Voice delivery: emit each document's full text to the session stream."""
        before = self._guard("read_out")
        payload = {"doc_ids": list(doc_ids)}
        for doc_id in doc_ids:
            if doc_id not in self.docs:
                self._fail("read_out", payload, before, f"unknown document {doc_id!r}", PreconditionError)
        for doc_id in doc_ids:
            self.emissions.append(render(self.docs[doc_id], "ascii").decode("utf-8"))
        self._log("read_out", payload, before)
        return self.state

    def close(self) -> DialogState:
        before = self._guard("close")
        self.state = DialogState.CLOSED
        self._log("close", {}, before)
        return self.state

    # ── views, log export, replay ──────────────────────────────────

    def transcript_view(self) -> list[dict]:
        return [
            {
                "position": d.position,
                "surface": d.surface,
                "confidence": d.confidence,
                "dropped": d.dropped,
                "material": d.material,
            }
            for d in self.draft
        ]

    def state_digest(self) -> str:
        """Hash of everything that defines the dialog state (not the log)."""
        view = {
            "state": self.state.value,
            "user_id": self.user_id,
            "login_attempts": self.login_attempts,
            "mode": self._mode,
            "base_seed": self.base_seed,
            "reutters": self._reutter_count,
            "query": None
            if self.query is None
            else {
                "origin": self.query.origin,
                "terms": [[t.term, t.surface, t.weight, t.confidence] for t in self.query.terms],
            },
            "ranked": None if self.ranked is None else [[d, s] for d, s in self.ranked.entries],
            "threshold": None if self.ranked is None else self.ranked.threshold,
            "presentation": self.presentation,
            "cursor": self.cursor,
            "retrieved_set": self.retrieved_set,
            "draft": [
                [d.position, d.surface, d.confidence, d.term, d.source_index, d.dropped]
                for d in self.draft
            ],
            "pending": sorted(self.pending),
            "suggestions": [
                [s.original.term, s.candidate, s.similarity, s.support] for s in self.suggestions
            ],
            "last_summary": self.last_summary,
            "emissions": self.emissions,
        }
        return hashlib.sha256(_canonical(view).encode("utf-8")).hexdigest()

    def export_event_log(self) -> str:
        """Line-delimited audit form: timestamp, state, action, payload digest."""
        lines = []
        for ev in self.events:
            lines.append(f"{ev.timestamp:.6f}\t{ev.state_after.value}\t{ev.action}\t{ev.digest()}")
        return "\n".join(lines)

    def apply_event(self, event: Event) -> None:
        """Re-apply one logged action.  Deterministic failures are swallowed."""
        try:
            if event.action == "login":
                before = self._guard("login")
                p = event.payload
                if p.get("reason") == "format":
                    self._log("login", dict(p), before, ok=False, note="pin must be digits only")
                    return
                self._apply_login_outcome(p["ok"], p.get("user_id"))
                self._log(
                    "login", dict(p), before, ok=p["ok"],
                    note=None if p["ok"] else "pin not recognized",
                )
            elif event.action == "submit_query":
                p = event.payload
                self.submit_query(
                    p["utterance"], p["mode"], p["n_recognizers"], p["seed"], p.get("accuracy")
                )
            elif event.action == "confirm_word":
                p = event.payload
                self.confirm_word(p["position"], p["choice"], p["alternative"])
            elif event.action == "browse":
                self.browse(event.payload["action"])
            elif event.action == "feedback_requery":
                self.feedback_requery()
            elif event.action == "apply_suggestion":
                p = event.payload
                self.apply_suggestion(p["original"], p["candidate"])
            elif event.action == "read_out":
                self.read_out(event.payload["doc_ids"])
            elif event.action == "close":
                self.close()
            else:
                raise ValueError(f"unknown logged action {event.action!r}")
        except (IllegalTransition, PreconditionError, ValueError):
            pass

    @classmethod
    def replay(
        cls,
        events: list[Event],
        docs: list[Document] | dict[str, Document],
        index: InvertedIndex,
        profiles: ProfileStore,
        settings: SessionSettings | None = None,
    ) -> "Session":
        session = cls(docs, index, profiles, settings)
        for event in events:
            session.apply_event(event)
        return session
