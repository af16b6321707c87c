from __future__ import annotations

import json
import logging
import re
import unicodedata
from datetime import datetime, timedelta, timezone
from typing import Iterable, List, NamedTuple, Optional, Tuple

from dateutil.parser import isoparse

from pyvalence.errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_LENGTH = timedelta(days=7)

ENTITY_PREFIXES = ('@', '#')

RE_URL = re.compile(r'https?://\S*')

REQUIRED_FIELDS = ('id', 'created_at', 'text')


def lowercase(text: str) -> str:
    '''Case folding shared by the tokenizer and the lexicon loader. Diacritics are kept, composed to NFC.'''
    return unicodedata.normalize('NFC', text.lower())


def _is_punctuation(char: str) -> bool:
    return unicodedata.category(char)[0] in 'PS'


def _strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punctuation(token[start]):
        start += 1
    while end > start and _is_punctuation(token[end - 1]):
        end -= 1

    return token[start:end]


def tokenize(text: str) -> List[str]:
    tokens = []
    for raw in RE_URL.sub(' ', lowercase(text)).split():
        if raw[0] in ENTITY_PREFIXES:
            body = _strip_punctuation(raw[1:])
            token = raw[0] + body if body else ''
        else:
            token = _strip_punctuation(raw)

        if token:
            tokens.append(token)

    return tokens


def parse_timestamp(value: str) -> datetime:
    '''Parses an ISO-8601 instant into an aware UTC datetime truncated to seconds.'''
    try:
        timestamp = isoparse(value)
    except (ValueError, OverflowError) as e:
        raise ValueError(f'invalid ISO-8601 timestamp {value!r}') from e

    if timestamp.tzinfo is None:
        raise ValueError(f'timestamp {value!r} has no UTC offset')

    return timestamp.astimezone(timezone.utc).replace(microsecond=0)


def truncate_to_midnight(timestamp: datetime) -> datetime:
    return timestamp.replace(hour=0, minute=0, second=0, microsecond=0)


class Document(NamedTuple):
    id: str
    timestamp: datetime
    tokens: Tuple[str, ...]


class TimeWindow(NamedTuple):
    start: datetime
    end: datetime
    documents: Tuple[Document, ...]


class DocumentSet:
    __slots__ = ('documents', 'source_path')

    def __init__(self, documents: Iterable[Document], source_path: str = ''):
        documents = sorted(documents, key=lambda document: document.timestamp)

        seen = set()
        for document in documents:
            if document.id in seen:
                raise ValidationError(f'Duplicate document id {document.id!r}')
            seen.add(document.id)

        self.documents = tuple(documents)
        self.source_path = source_path

    def __repr__(self):
        return f'DocumentSet(source_path={self.source_path!r}, documents={len(self.documents)})'

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def sentences(self) -> List[Tuple[str, ...]]:
        return [document.tokens for document in self.documents]

    def token_count(self) -> int:
        return sum(len(document.tokens) for document in self.documents)

    def span(self) -> Optional[Tuple[datetime, datetime]]:
        if not self.documents:
            return None
        return self.documents[0].timestamp, self.documents[-1].timestamp


def ingest_jsonl(path) -> DocumentSet:
    documents = []

    with open(path, encoding='utf-8') as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue

            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f'invalid JSON ({e.msg})', path=path, lineno=lineno) from e

            if not isinstance(record, dict):
                raise ParseError('expected a JSON object', path=path, lineno=lineno)

            for field in REQUIRED_FIELDS:
                if not isinstance(record.get(field), str):
                    raise ParseError(f'missing or non-string field {field!r}', path=path, lineno=lineno)

            try:
                timestamp = parse_timestamp(record['created_at'])
            except ValueError as e:
                raise ParseError(str(e), path=path, lineno=lineno) from e

            documents.append(Document(id=record['id'], timestamp=timestamp, tokens=tuple(tokenize(record['text']))))

    logger.info('Read %i documents from %s', len(documents), path)

    return DocumentSet(documents, source_path=str(path))


def default_origin(document_set: DocumentSet) -> datetime:
    span = document_set.span()
    if span is None:
        raise ValidationError('Cannot derive a window origin from an empty corpus')

    return truncate_to_midnight(span[0])


def window_split(
    document_set: DocumentSet, window_length: timedelta = DEFAULT_WINDOW_LENGTH, origin: datetime = None
) -> List[TimeWindow]:
    if window_length <= timedelta(0):
        raise ValidationError(f'window_length must be positive, got {window_length}')

    if not document_set.documents:
        return []

    if origin is None:
        origin = default_origin(document_set)

    buckets = {}
    for document in document_set.documents:
        if document.timestamp < origin:
            raise ValidationError(f'Document {document.id!r} at {document.timestamp} precedes origin {origin}')
        buckets.setdefault((document.timestamp - origin) // window_length, []).append(document)

    return [
        TimeWindow(
            start=origin + k * window_length,
            end=origin + (k + 1) * window_length,
            documents=tuple(buckets.get(k, ())),
        )
        for k in range(max(buckets) + 1)
    ]


def summarize(document_set: DocumentSet) -> dict:
    span = document_set.span()
    distinct = {token for document in document_set.documents for token in document.tokens}

    return {
        'source_path': document_set.source_path,
        'documents': len(document_set),
        'tokens': document_set.token_count(),
        'distinct_tokens': len(distinct),
        'first': span[0].isoformat() if span else None,
        'last': span[1].isoformat() if span else None,
    }
