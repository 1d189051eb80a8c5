"""Parsing, cleansing and normalization of heterogeneous sources into one corpus.

Pipeline: parse_source -> cleanse -> normalize. All three are pure functions;
corpus assembly (write_corpus) is the single-writer step.
"""

import csv
import io
import json
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .errors import (
    DuplicateArtifactId,
    EmptyPayload,
    MissingIdentity,
    ParseError,
    UnsupportedFormat,
)

KINDS = ("code_snippet", "qa_thread", "tutorial", "api_doc", "library", "post")

# accepted aliases for the three supported source formats
_FORMAT_ALIASES = {
    "jsonl": "jsonl",
    "json-lines": "jsonl",
    "csv": "csv",
    "xml": "xml",
    "xml-lite": "xml",
}

# default per-source field map: first present alias wins
_ID_FIELDS = ("source_id", "id", "guid")
_TITLE_FIELDS = ("title", "name", "subject")
_BODY_FIELDS = ("body", "text", "content", "description")
_URL_FIELDS = ("url", "link")
_DATE_FIELDS = ("created_at", "date", "timestamp", "published")
_TAG_FIELDS = ("tags", "keywords")
_KIND_FIELDS = ("kind", "type")


@dataclass(frozen=True)
class FieldMap:
    """Per-source mapping from raw field names onto Artifact fields."""

    id: tuple[str, ...] = _ID_FIELDS
    title: tuple[str, ...] = _TITLE_FIELDS
    body: tuple[str, ...] = _BODY_FIELDS
    url: tuple[str, ...] = _URL_FIELDS
    created_at: tuple[str, ...] = _DATE_FIELDS
    tags: tuple[str, ...] = _TAG_FIELDS
    kind: tuple[str, ...] = _KIND_FIELDS


DEFAULT_FIELD_MAP = FieldMap()


@dataclass(frozen=True)
class SourceRecord:
    """One logical record as parsed from a source payload."""

    source_id: str
    format: str
    fields: dict[str, str]
    origin: str


@dataclass(frozen=True)
class Artifact:
    """One canonical corpus item."""

    id: str
    kind: str
    title: str
    body: str
    url: str | None
    source: str
    created_at: datetime
    tags: frozenset[str] = frozenset()
    concepts: frozenset[str] = frozenset()

    def to_dict(self) -> dict:
        doc = {
            "id": self.id,
            "kind": self.kind,
            "title": self.title,
            "body": self.body,
            "url": self.url,
            "source": self.source,
            "created_at": format_timestamp(self.created_at),
            "tags": sorted(self.tags),
        }
        if self.concepts:
            doc["concepts"] = sorted(self.concepts)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Artifact":
        return cls(
            id=doc["id"],
            kind=doc.get("kind", "post"),
            title=doc.get("title", ""),
            body=doc.get("body", ""),
            url=doc.get("url"),
            source=doc.get("source", ""),
            created_at=parse_timestamp(doc["created_at"]),
            tags=frozenset(doc.get("tags", ())),
            concepts=frozenset(doc.get("concepts", ())),
        )


@dataclass
class ParseResult:
    """Parsed records plus the count of unparseable ones that were skipped."""

    records: list[SourceRecord] = field(default_factory=list)
    skipped: int = 0


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _to_text(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (list, tuple)):
        return ",".join(_to_text(v) for v in value)
    return str(value)


def _first_field(fields: dict[str, str], names: Iterable[str]) -> str:
    for name in names:
        if name in fields and fields[name]:
            return fields[name]
    return ""


def _has_content(fields: dict[str, str], field_map: FieldMap) -> bool:
    return any(name in fields for name in field_map.title) or any(
        name in fields for name in field_map.body
    )


def parse_source(
    format: str,
    payload: bytes,
    origin: str = "",
    field_map: FieldMap = DEFAULT_FIELD_MAP,
) -> ParseResult:
    """Parse a raw payload into source records.

    Unparseable records are skipped and counted; they never abort the batch.
    Records that carry neither a title-like nor a body-like field are counted
    as unparseable too, since nothing downstream could use them.
    """
    fmt = _FORMAT_ALIASES.get(format)
    if fmt is None:
        raise UnsupportedFormat(f"unsupported source format: {format!r}")
    if len(payload) == 0:
        raise EmptyPayload("payload is empty")
    try:
        text = payload.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"payload is not valid UTF-8: {exc}") from exc

    if fmt == "jsonl":
        return _parse_jsonl(text, origin, field_map)
    if fmt == "csv":
        return _parse_csv(text, origin, field_map)
    return _parse_xml(text, origin, field_map)


def _make_record(raw: dict, fmt: str, origin: str, field_map: FieldMap) -> SourceRecord:
    fields = {str(k): _to_text(v) for k, v in raw.items()}
    source_id = _first_field(fields, field_map.id).strip()
    return SourceRecord(source_id=source_id, format=fmt, fields=fields, origin=origin)


def _parse_jsonl(text: str, origin: str, field_map: FieldMap) -> ParseResult:
    result = ParseResult()
    for line in text.splitlines():
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError:
            result.skipped += 1
            continue
        if not isinstance(raw, dict) or not _has_content(raw, field_map):
            result.skipped += 1
            continue
        result.records.append(_make_record(raw, "jsonl", origin, field_map))
    return result


def _parse_csv(text: str, origin: str, field_map: FieldMap) -> ParseResult:
    result = ParseResult()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return result
    header = [h.strip() for h in header]
    for row in reader:
        if not any(cell.strip() for cell in row):
            continue
        raw = dict(zip(header, row))
        if not _has_content(raw, field_map):
            result.skipped += 1
            continue
        result.records.append(_make_record(raw, "csv", origin, field_map))
    return result


def _parse_xml(text: str, origin: str, field_map: FieldMap) -> ParseResult:
    """xml-lite: a root element whose children are records with flat fields."""
    result = ParseResult()
    try:
        root = ET.fromstring(text)
    except ET.ParseError:
        # the whole payload is one unparseable unit; do not abort
        result.skipped += 1
        return result
    for element in root:
        raw: dict[str, str] = dict(element.attrib)
        for child in element:
            raw[child.tag] = (child.text or "").strip()
        if not _has_content(raw, field_map):
            result.skipped += 1
            continue
        result.records.append(_make_record(raw, "xml", origin, field_map))
    return result


def _clean_text(value: str) -> str:
    """Trim and strip control characters (keeps newlines and tabs)."""
    kept = "".join(
        ch for ch in value if ch in "\n\t" or unicodedata.category(ch) != "Cc"
    )
    return kept.strip()


def _content_key(record: SourceRecord, field_map: FieldMap) -> str:
    title = _first_field(record.fields, field_map.title)
    body = _first_field(record.fields, field_map.body)
    return " ".join((title + " " + body).split())


def _created_sort_key(record: SourceRecord, position: int, field_map: FieldMap):
    raw = _first_field(record.fields, field_map.created_at)
    if raw:
        try:
            return (parse_timestamp(raw), position)
        except ValueError:
            pass
    return (datetime.max.replace(tzinfo=timezone.utc), position)


def cleanse(
    records: list[SourceRecord], field_map: FieldMap = DEFAULT_FIELD_MAP
) -> list[SourceRecord]:
    """Scrub field values, drop empty records and collapse duplicates.

    Duplicates are records sharing (origin, source_id) or sharing identical
    title+body after whitespace normalization; the earliest by created_at
    survives (input order breaks ties). Idempotent by construction.
    """
    scrubbed: list[SourceRecord] = []
    for record in records:
        fields = {k: _clean_text(v) for k, v in record.fields.items()}
        candidate = replace(record, source_id=record.source_id.strip(), fields=fields)
        if not _content_key(candidate, field_map):
            continue
        scrubbed.append(candidate)

    survivors: list[SourceRecord | None] = []
    positions: list[int] = []
    slot_by_key: dict[tuple, int] = {}
    for position, record in enumerate(scrubbed):
        keys: list[tuple] = [("txt", _content_key(record, field_map))]
        if record.source_id:
            keys.append(("id", record.origin, record.source_id))
        slot = next((slot_by_key[k] for k in keys if k in slot_by_key), None)
        if slot is None:
            slot = len(survivors)
            survivors.append(record)
            positions.append(position)
        else:
            held = survivors[slot]
            assert held is not None
            if _created_sort_key(record, position, field_map) < _created_sort_key(
                held, positions[slot], field_map
            ):
                survivors[slot] = record
                positions[slot] = position
        for k in keys:
            slot_by_key.setdefault(k, slot)
    return [r for r in survivors if r is not None]


def normalize(
    record: SourceRecord,
    kind_hint: str | None = None,
    *,
    field_map: FieldMap = DEFAULT_FIELD_MAP,
    now: datetime | None = None,
) -> Artifact:
    """Map a cleansed source record onto the canonical Artifact shape.

    Missing created_at defaults to the ingestion time; future-dated values
    are clamped to it. Missing kind falls back to kind_hint, then "post".
    """
    now = now or utcnow()
    source_id = record.source_id or _first_field(record.fields, field_map.id).strip()
    if not source_id:
        raise MissingIdentity(
            f"no source_id derivable for a record from origin {record.origin!r}"
        )

    raw_date = _first_field(record.fields, field_map.created_at)
    created_at = now
    if raw_date:
        try:
            created_at = min(parse_timestamp(raw_date), now)
        except ValueError:
            created_at = now

    kind = _first_field(record.fields, field_map.kind).strip().lower()
    if kind not in KINDS:
        kind = kind_hint if kind_hint in KINDS else "post"

    raw_tags = _first_field(record.fields, field_map.tags)
    tags = frozenset(
        t.strip() for t in raw_tags.replace("|", ",").replace(";", ",").split(",") if t.strip()
    )

    return Artifact(
        id=f"{record.origin}:{source_id}",
        kind=kind,
        title=_first_field(record.fields, field_map.title),
        body=_first_field(record.fields, field_map.body),
        url=_first_field(record.fields, field_map.url) or None,
        source=record.origin,
        created_at=created_at,
        tags=tags,
    )


def write_corpus(artifacts: Iterable[Artifact], path: str | Path) -> int:
    """Write artifacts as JSON-lines; returns the number written."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for artifact in artifacts:
            handle.write(json.dumps(artifact.to_dict(), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_corpus(path: str | Path) -> list[Artifact]:
    """Read a JSON-lines corpus; an id collision is a build error."""
    artifacts: list[Artifact] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                artifact = Artifact.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ParseError(f"{path}:{lineno}: bad corpus line: {exc}") from exc
            if artifact.id in seen:
                raise DuplicateArtifactId(
                    f"{path}:{lineno}: duplicate artifact id {artifact.id!r}"
                )
            seen.add(artifact.id)
            artifacts.append(artifact)
    return artifacts
