"""Document collections: parsing, tokenization glue, and the inverted index.

Two input formats are supported: an SGML-style archive file where articles
sit between <DOC>...</DOC> tags, and a directory of plain-text files (one
document per file, filename is the id, first line is the title).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .text import DEFAULT_STOPLIST, Token, split_sentences, tokenize

TREC_SGML = "trec-sgml-like"
PLAIN_DIR = "plain-dir"
FORMATS = (TREC_SGML, PLAIN_DIR)


class ParseError(ValueError):
    """Malformed corpus input; the message names the byte offset."""


class DuplicateDocumentError(ValueError):
    """Two documents share the same id; the message names the id."""


@dataclass(frozen=True)
class Document:
    """One retrievable article.

    ``length_terms`` counts every body token (stop words included); the
    stoplist only governs which terms reach the index vocabulary.
    """

    doc_id: str
    title: str
    sentences: tuple[str, ...]
    length_terms: int

    @classmethod
    def make(cls, doc_id: str, title: str, sentences: list[str] | tuple[str, ...]) -> "Document":
        sentences = tuple(sentences)
        length = sum(len(tokenize(s, stoplist=None)) for s in sentences)
        return cls(doc_id=doc_id, title=title, sentences=sentences, length_terms=length)

    def body_tokens(self, stoplist: frozenset[str] | None = None) -> list[Token]:
        tokens: list[Token] = []
        for sentence in self.sentences:
            tokens.extend(tokenize(sentence, stoplist=stoplist))
        return tokens


@dataclass(frozen=True)
class InvertedIndex:
    """Immutable postings plus the collection statistics ranking needs.

    Safe to share between any number of readers; never mutate after
    construction.
    """

    postings: dict[str, tuple[tuple[str, int], ...]]
    doc_count: int
    doc_lengths: dict[str, int]
    avg_doc_length: float
    _tf: dict[str, dict[str, int]] = field(repr=False, default_factory=dict)

    @property
    def vocabulary(self) -> frozenset[str]:
        return frozenset(self.postings)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))

    def tf(self, term: str, doc_id: str) -> int:
        return self._tf.get(term, {}).get(doc_id, 0)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.doc_lengths


def build_index(docs: list[Document], stoplist: frozenset[str] = DEFAULT_STOPLIST) -> InvertedIndex:
    """Build the immutable index over ``docs``.

    Document ids must be unique.  An empty list yields a valid degenerate
    index with zero documents.
    """
    doc_lengths: dict[str, int] = {}
    tf_maps: dict[str, dict[str, int]] = {}
    for doc in docs:
        if doc.doc_id in doc_lengths:
            raise DuplicateDocumentError(f"duplicate document id {doc.doc_id!r}")
        doc_lengths[doc.doc_id] = doc.length_terms
        for token in doc.body_tokens(stoplist=stoplist):
            per_doc = tf_maps.setdefault(token.term, {})
            per_doc[doc.doc_id] = per_doc.get(doc.doc_id, 0) + 1
    postings = {
        term: tuple(sorted(per_doc.items()))
        for term, per_doc in tf_maps.items()
    }
    n = len(doc_lengths)
    avg = sum(doc_lengths.values()) / n if n else 0.0
    return InvertedIndex(
        postings=postings,
        doc_count=n,
        doc_lengths=doc_lengths,
        avg_doc_length=avg,
        _tf=tf_maps,
    )


_DOC_OPEN = re.compile(rb"<DOC>", re.IGNORECASE)
_DOC_CLOSE = re.compile(rb"</DOC>", re.IGNORECASE)
_DOCNO = re.compile(rb"<DOCNO>(.*?)</DOCNO>", re.IGNORECASE | re.DOTALL)
_TITLE = re.compile(rb"<(HL|HEADLINE)>(.*?)</\1>", re.IGNORECASE | re.DOTALL)
_TEXT = re.compile(rb"<TEXT>(.*?)</TEXT>", re.IGNORECASE | re.DOTALL)


def _decode(raw: bytes, offset: int) -> str:
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"undecodable text at byte offset {offset + exc.start}") from exc


def parse_corpus(raw: bytes, fmt: str = TREC_SGML) -> list[Document]:
    """Parse an SGML-style archive byte stream into Documents.

    The plain-dir format lives in a directory tree rather than one byte
    stream; use :func:`load_corpus` for it.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")
    if fmt == PLAIN_DIR:
        raise ValueError("plain-dir corpora are directories; use load_corpus(path, 'plain-dir')")

    docs: list[Document] = []
    seen: set[str] = set()
    pos = 0
    while True:
        opened = _DOC_OPEN.search(raw, pos)
        if opened is None:
            break
        closed = _DOC_CLOSE.search(raw, opened.end())
        if closed is None:
            raise ParseError(f"unterminated <DOC> at byte offset {opened.start()}")
        body = raw[opened.end() : closed.start()]
        docno = _DOCNO.search(body)
        if docno is None:
            raise ParseError(f"missing <DOCNO> in document at byte offset {opened.start()}")
        doc_id = _decode(docno.group(1), opened.end() + docno.start(1)).strip()
        if not doc_id:
            raise ParseError(f"empty <DOCNO> at byte offset {opened.end() + docno.start(1)}")
        if doc_id in seen:
            raise DuplicateDocumentError(f"duplicate document id {doc_id!r}")
        seen.add(doc_id)
        title_match = _TITLE.search(body)
        title = ""
        if title_match is not None:
            title = " ".join(_decode(title_match.group(2), 0).split())
        text_parts = [
            _decode(m.group(1), opened.end() + m.start(1)) for m in _TEXT.finditer(body)
        ]
        sentences = split_sentences(" ".join(part.strip() for part in text_parts))
        docs.append(Document.make(doc_id, title, sentences))
        pos = closed.end()
    return docs


def _parse_plain_file(doc_id: str, content: str) -> Document:
    lines = content.splitlines()
    title = lines[0].strip() if lines else ""
    body = "\n".join(lines[1:])
    return Document.make(doc_id, title, split_sentences(body))


ARCHIVE_VERSION = 1


def save_archive(path: str | Path, docs: list[Document], stoplist: frozenset[str] = DEFAULT_STOPLIST) -> None:
    """Persist a parsed collection; the index is rebuilt exactly on load."""
    payload = {
        "version": ARCHIVE_VERSION,
        "stoplist": sorted(stoplist),
        "documents": [
            {"doc_id": d.doc_id, "title": d.title, "sentences": list(d.sentences)}
            for d in docs
        ],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), "utf-8")


def load_archive(path: str | Path) -> tuple[list[Document], InvertedIndex]:
    """Load a saved collection and rebuild its index deterministically."""
    try:
        payload = json.loads(Path(path).read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"corrupt index archive {path}: {exc}") from exc
    if payload.get("version") != ARCHIVE_VERSION:
        raise ParseError(f"unsupported archive version in {path}")
    stoplist = frozenset(payload["stoplist"])
    docs = [
        Document.make(d["doc_id"], d["title"], d["sentences"])
        for d in payload["documents"]
    ]
    return docs, build_index(docs, stoplist)


def load_corpus(path: str | Path, fmt: str = TREC_SGML) -> list[Document]:
    """Load a corpus from disk in either supported format.

    For ``plain-dir``, files are read in sorted filename order so the
    resulting document order is deterministic.
    """
    path = Path(path)
    if fmt == TREC_SGML:
        return parse_corpus(path.read_bytes(), fmt)
    if fmt == PLAIN_DIR:
        if not path.is_dir():
            raise ParseError(f"plain-dir corpus {path} is not a directory")
        docs: list[Document] = []
        seen: set[str] = set()
        for file in sorted(p for p in path.iterdir() if p.is_file()):
            doc_id = file.name
            if doc_id in seen:
                raise DuplicateDocumentError(f"duplicate document id {doc_id!r}")
            seen.add(doc_id)
            docs.append(_parse_plain_file(doc_id, file.read_text("utf-8")))
        return docs
    raise ValueError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")
