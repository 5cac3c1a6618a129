"""Corpus ingestion, text normalization, tokenization, and dataset statistics.

One tokenizer is shared by indexing, span mining, corruption, and the
present/absent test so that every component agrees on token boundaries.
"""

from __future__ import annotations

import json
import logging
import re
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass

from .errors import CorpusFormatError, DataError, DuplicateIdError

logger = logging.getLogger(__name__)

SEP_TOKEN = "<sep>"
DIGIT_TOKEN = "<digit>"
DEFAULT_MAX_TOKENS = 512

# Logical field -> JSONL key. Values are remappable via CLI flags.
DEFAULT_SCHEMA = {
    "id": "id",
    "title": "title",
    "body": "abstract",
    "keyphrases": "keywords",
}


@dataclass(frozen=True)
class Document:
    """One corpus record. ``keyphrases`` is None for unlabeled records."""

    id: str
    title: str
    body: str
    keyphrases: tuple[str, ...] | None = None


@dataclass(frozen=True)
class TokenizedDoc:
    """A document rendered as the token sequence the whole pipeline consumes.

    ``tokens`` is title tokens, then one SEP_TOKEN, then body tokens,
    possibly truncated. ``title_len`` counts the tokens of the title prefix
    (the separator is not part of it).
    """

    doc_id: str
    tokens: tuple[str, ...]
    title_len: int


@dataclass(frozen=True)
class CorpusStats:
    num_docs: int
    avg_kp_per_doc: float
    avg_kp_len: float
    pct_absent_kp: float
    avg_doc_len: float


_DIGIT_RUN = re.compile(r"[0-9]+")

# Order matters: the sentinels must win over the punctuation branch, and a
# word may keep internal hyphens only when both sides are word characters.
_TOKEN = re.compile(r"<digit>|<sep>|\w+(?:-\w+)*|[^\w\s]")


def normalize(text: str) -> str:
    """Lowercase and collapse every maximal ASCII digit run to ``<digit>``."""
    return _DIGIT_RUN.sub(DIGIT_TOKEN, text.lower())


def tokenize(text: str) -> list[str]:
    """Split normalized text into tokens.

    Rule table: ``<digit>`` and ``<sep>`` are atomic; maximal word runs
    keep intra-word hyphens ("self-stabilizing"); every other
    non-whitespace character becomes its own token ("end.start" ->
    ["end", ".", "start"]).
    """
    return _TOKEN.findall(text)


def model_input(doc: Document, max_tokens: int | None = DEFAULT_MAX_TOKENS) -> TokenizedDoc:
    """Build the token sequence ``title ++ [<sep>] ++ body``, truncated.

    ``max_tokens=None`` disables truncation (used by evaluation, which
    tests presence against the full text).
    """
    if max_tokens is not None and max_tokens < 1:
        raise ValueError(f"max_tokens must be >= 1, got {max_tokens}")
    title_tokens = tokenize(normalize(doc.title))
    body_tokens = tokenize(normalize(doc.body))
    tokens = [*title_tokens, SEP_TOKEN, *body_tokens]
    if max_tokens is not None:
        tokens = tokens[:max_tokens]
    title_len = min(len(title_tokens), len(tokens))
    return TokenizedDoc(doc_id=doc.id, tokens=tuple(tokens), title_len=title_len)


def _parse_keyphrases(raw) -> tuple[str, ...] | None:
    if raw is None:
        return None
    if isinstance(raw, str):
        parts = raw.split(";")
    elif isinstance(raw, list):
        parts = [str(p) for p in raw]
    else:
        raise CorpusFormatError(f"keyphrase field must be a list or string, got {type(raw).__name__}")
    return tuple(p.strip() for p in parts if p.strip())


def load_corpus(
    path,
    schema: Mapping[str, str] | None = None,
    on_issue: Callable[[int, str], None] | None = None,
) -> Iterator[Document]:
    """Stream Documents from a JSONL file.

    Malformed JSON and duplicate ids raise; records missing mapped fields
    are reported through ``on_issue`` (default: a logged warning) and
    skipped rather than silently dropped.
    """
    schema = dict(DEFAULT_SCHEMA, **(schema or {}))
    report = on_issue or (lambda n, msg: logger.warning("%s: line %d: %s", path, n, msg))
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"malformed JSON ({exc.msg})", line_no) from exc
            if not isinstance(record, dict):
                raise CorpusFormatError("line is not a JSON object", line_no)
            doc_id = record.get(schema["id"])
            if not doc_id or not isinstance(doc_id, str):
                report(line_no, f"missing or empty {schema['id']!r} field; record skipped")
                continue
            if doc_id in seen:
                raise DuplicateIdError(f"duplicate document id {doc_id!r} (line {line_no})")
            seen.add(doc_id)
            missing = [name for name in ("title", "body") if schema[name] not in record]
            if missing:
                report(line_no, f"id {doc_id!r}: missing field(s) {', '.join(schema[m] for m in missing)}")
            title = str(record.get(schema["title"], "") or "")
            body = str(record.get(schema["body"], "") or "")
            if not title and not body:
                report(line_no, f"id {doc_id!r}: both title and body empty; record skipped")
                continue
            yield Document(
                id=doc_id,
                title=title,
                body=body,
                keyphrases=_parse_keyphrases(record.get(schema["keyphrases"])),
            )


def write_corpus(docs: Iterable[Document], path, schema: Mapping[str, str] | None = None) -> int:
    """Serialize Documents back to JSONL; inverse of load_corpus."""
    schema = dict(DEFAULT_SCHEMA, **(schema or {}))
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            record = {
                schema["id"]: doc.id,
                schema["title"]: doc.title,
                schema["body"]: doc.body,
            }
            if doc.keyphrases is not None:
                record[schema["keyphrases"]] = list(doc.keyphrases)
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            n += 1
    return n


def dataset_stats(corpus: Iterable[Document]) -> CorpusStats:
    """Per-corpus label statistics: #KP, |KP|, %AKP, and document length.

    Requires every document to carry keyphrases; absence is decided by the
    same stemmed-containment test the evaluator uses.
    """
    from .evaluation import keyphrase_set, split_present_absent

    num_docs = 0
    total_kp = 0
    total_kp_tokens = 0
    total_absent = 0
    total_doc_tokens = 0
    for doc in corpus:
        if not doc.keyphrases:
            raise DataError(f"document {doc.id!r} has no keyphrases; stats need a labeled corpus")
        num_docs += 1
        tokenized = model_input(doc, max_tokens=None)
        total_doc_tokens += len(tokenized.tokens)
        gold = keyphrase_set(doc.keyphrases)
        total_kp += len(gold.phrases)
        total_kp_tokens += sum(len(p) for p in gold.phrases)
        _, absent = split_present_absent(gold, tokenized)
        total_absent += len(absent.phrases)
    if num_docs == 0:
        raise DataError("corpus contains no labeled documents")
    return CorpusStats(
        num_docs=num_docs,
        avg_kp_per_doc=total_kp / num_docs,
        avg_kp_len=total_kp_tokens / total_kp if total_kp else 0.0,
        pct_absent_kp=100.0 * total_absent / total_kp if total_kp else 0.0,
        avg_doc_len=total_doc_tokens / num_docs,
    )
