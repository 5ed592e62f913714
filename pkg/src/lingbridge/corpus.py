"""Loading, validation and serialization of all external data.

Concept corpora and document collections are line-delimited JSON records;
dictionaries, label descriptions and title links are tab-separated; typology
tables are CSV with a header row. Everything is UTF-8. Loaded structures are
immutable in spirit: nothing in this package mutates them after construction,
so they are safe to share across threads.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def lang_code(code: str) -> str:
    """Normalize a language code: strip and lowercase, reject empty/whitespace."""
    norm = code.strip().lower()
    if not norm or any(ch.isspace() for ch in norm):
        raise ValidationError(f"invalid language code: {code!r}")
    return norm


def tokenize(text: str) -> list[str]:
    """Split text into lowercased word tokens.

    Tokens are maximal runs of Unicode letters and digits; whitespace and
    punctuation (including underscore) are boundaries. Empty tokens never
    occur. Total and deterministic; idempotent on its own joined output.
    Scripts without whitespace word boundaries are out of scope.
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class ConceptDoc:
    """One concept article: the unit of the ESA semantic space."""

    concept_id: int
    title: str
    lang: str
    text: str


@dataclass(frozen=True)
class Document:
    """A document to classify, with an optional gold label for evaluation."""

    doc_id: str
    lang: str
    text: str
    gold_label: int | None = None


@dataclass(frozen=True)
class LabelDescription:
    """An English category: numeric id, short name, and a text description."""

    label_id: int
    name: str
    description: str


@dataclass
class BilingualDictionary:
    """Word-level translation table for one language pair.

    ``entries`` maps a lowercase source word to its target words in priority
    order (explicit rank column first, then file order). Multiword expressions
    on either side are unsupported and skipped at load time.
    """

    src: str
    tgt: str
    entries: dict[str, list[str]]
    n_skipped_multiword: int = 0

    @property
    def n_expressions(self) -> int:
        return len(self.entries)


@dataclass
class TitleLinkTable:
    """Interlanguage title pairs; one-to-one on each side after dedup."""

    lang_a: str
    lang_b: str
    links: list[tuple[str, str]]
    n_duplicates_dropped: int = 0


@dataclass
class TypologyTable:
    """Categorical per-language features plus the four designated key features.

    ``rows[lang]`` holds one value slot per feature id, ``None`` where the
    source data has a missing value. The key features (genus/family/macro
    area/country style) get a heavier weight in the handcrafted language
    similarity; they must be members of ``feature_ids``.
    """

    feature_ids: list[str]
    rows: dict[str, list[str | None]]
    key_features: tuple[str, str, str, str]

    def __post_init__(self) -> None:
        if len(self.key_features) != 4 or len(set(self.key_features)) != 4:
            raise ValidationError("exactly four distinct key features are required")
        known = set(self.feature_ids)
        for name in self.key_features:
            if name not in known:
                raise ValidationError(f"unknown key feature: {name!r}")
        n = len(self.feature_ids)
        for lang, values in self.rows.items():
            if len(values) != n:
                raise ValidationError(
                    f"typology row for {lang!r} has {len(values)} values, expected {n}"
                )

    @property
    def n_features(self) -> int:
        return len(self.feature_ids)

    def languages(self) -> list[str]:
        return list(self.rows)

    def values(self, lang: str) -> list[str | None]:
        try:
            return self.rows[lang]
        except KeyError:
            raise ValidationError(f"unknown language: {lang!r}") from None


def _iter_records(path: str | Path):
    """Yield (line_number, parsed JSON object) for every non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: malformed record: {exc}") from None
            if not isinstance(record, dict):
                raise ParseError(f"{path}:{lineno}: record is not an object")
            yield lineno, record


def _require_str(record: dict, key: str, path, lineno: int, allow_empty: bool = False) -> str:
    value = record.get(key)
    if not isinstance(value, str) or (not allow_empty and not value):
        raise ParseError(f"{path}:{lineno}: missing or invalid {key!r} field")
    return value


def _optional_int(record: dict, key: str, path, lineno: int) -> int | None:
    value = record.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"{path}:{lineno}: field {key!r} must be an integer")
    return value


def load_concept_corpus(path: str | Path, lang: str) -> list[ConceptDoc]:
    """Load one language's concept corpus from line-delimited JSON records.

    Each record needs ``title`` and ``text``; ``id`` is optional and defaults
    to the record's 0-based position in the file. Duplicate ids or titles are
    validation errors.
    """
    lang = lang_code(lang)
    docs: list[ConceptDoc] = []
    seen_ids: set[int] = set()
    seen_titles: set[str] = set()
    position = 0
    for lineno, record in _iter_records(path):
        title = _require_str(record, "title", path, lineno)
        text = _require_str(record, "text", path, lineno, allow_empty=True)
        concept_id = _optional_int(record, "id", path, lineno)
        if concept_id is None:
            concept_id = position
        if concept_id in seen_ids:
            raise ValidationError(f"{path}: duplicate concept id {concept_id}")
        if title in seen_titles:
            raise ValidationError(f"{path}: duplicate concept title {title!r}")
        seen_ids.add(concept_id)
        seen_titles.add(title)
        docs.append(ConceptDoc(concept_id=concept_id, title=title, lang=lang, text=text))
        position += 1
    return docs


def save_concept_corpus(docs: list[ConceptDoc], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(
                {"id": doc.concept_id, "title": doc.title, "text": doc.text},
                ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def load_documents(path: str | Path, lang: str) -> list[Document]:
    """Load documents: like a concept corpus but keyed by string id, plus an
    optional integer ``label`` carrying the gold category."""
    lang = lang_code(lang)
    docs: list[Document] = []
    seen: set[str] = set()
    position = 0
    for lineno, record in _iter_records(path):
        raw_id = record.get("id")
        if raw_id is None:
            doc_id = str(position)
        elif isinstance(raw_id, bool):
            raise ParseError(f"{path}:{lineno}: field 'id' must be a string or integer")
        elif isinstance(raw_id, (str, int)):
            doc_id = str(raw_id)
            if not doc_id:
                raise ParseError(f"{path}:{lineno}: empty document id")
        else:
            raise ParseError(f"{path}:{lineno}: field 'id' must be a string or integer")
        text = _require_str(record, "text", path, lineno, allow_empty=True)
        label = _optional_int(record, "label", path, lineno)
        if doc_id in seen:
            raise ValidationError(f"{path}: duplicate document id {doc_id!r}")
        seen.add(doc_id)
        docs.append(Document(doc_id=doc_id, lang=lang, text=text, gold_label=label))
        position += 1
    return docs


def save_documents(docs: list[Document], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            record: dict = {"id": doc.doc_id, "text": doc.text}
            if doc.gold_label is not None:
                record["label"] = doc.gold_label
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def load_labels(path: str | Path) -> list[LabelDescription]:
    """Load label descriptions from ``label_id<TAB>name<TAB>description`` rows."""
    labels: list[LabelDescription] = []
    seen: set[int] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t", 2)
            if len(parts) < 3:
                raise ParseError(f"{path}:{lineno}: expected 3 tab-separated columns")
            try:
                label_id = int(parts[0])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: label id must be an integer") from None
            name, description = parts[1], parts[2]
            if not description.strip():
                raise ValidationError(f"{path}:{lineno}: empty description for label {label_id}")
            if label_id in seen:
                raise ValidationError(f"{path}: duplicate label id {label_id}")
            seen.add(label_id)
            labels.append(LabelDescription(label_id=label_id, name=name, description=description))
    return labels


def load_dictionary(path: str | Path, src: str, tgt: str) -> BilingualDictionary:
    """Load a bilingual dictionary from ``src_word<TAB>tgt_word[<TAB>rank]`` rows.

    Rows sharing a source word are merged into one entry list ordered by rank
    (lower rank first) and then file order; repeated identical translations
    are kept once. Rows where either side is a multiword expression are
    skipped and counted, since translation is strictly word-by-word.
    """
    src = lang_code(src)
    tgt = lang_code(tgt)
    by_src: dict[str, list[tuple[tuple[float, int], str]]] = {}
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise ParseError(f"{path}:{lineno}: expected at least 2 tab-separated columns")
            src_word = cols[0].strip().lower()
            tgt_word = cols[1].strip().lower()
            if not src_word or not tgt_word:
                raise ParseError(f"{path}:{lineno}: empty word")
            if any(ch.isspace() for ch in src_word) or any(ch.isspace() for ch in tgt_word):
                skipped += 1
                continue
            rank = float("inf")
            if len(cols) >= 3 and cols[2].strip():
                try:
                    rank = float(int(cols[2]))
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: rank must be an integer") from None
            by_src.setdefault(src_word, []).append(((rank, lineno), tgt_word))
    if skipped:
        logger.warning("%s: skipped %d multiword dictionary rows", path, skipped)
    entries: dict[str, list[str]] = {}
    for word, rows in by_src.items():
        rows.sort(key=lambda item: item[0])
        ordered: list[str] = []
        for _, translation in rows:
            if translation not in ordered:
                ordered.append(translation)
        entries[word] = ordered
    return BilingualDictionary(src=src, tgt=tgt, entries=entries, n_skipped_multiword=skipped)


def save_dictionary(dictionary: BilingualDictionary, path: str | Path) -> None:
    """Write dictionary entries in priority order (file order encodes priority)."""
    with open(path, "w", encoding="utf-8") as fh:
        for word, translations in dictionary.entries.items():
            for translation in translations:
                fh.write(f"{word}\t{translation}\n")


def load_title_links(path: str | Path, lang_a: str, lang_b: str) -> TitleLinkTable:
    """Load interlanguage title links from ``title_a<TAB>title_b`` rows.

    A title may appear at most once per side; later duplicates are dropped
    (the pairing must be one-to-one) and counted.
    """
    lang_a = lang_code(lang_a)
    lang_b = lang_code(lang_b)
    links: list[tuple[str, str]] = []
    seen_a: set[str] = set()
    seen_b: set[str] = set()
    dropped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise ParseError(f"{path}:{lineno}: expected 2 tab-separated columns")
            title_a, title_b = cols[0].strip(), cols[1].strip()
            if not title_a or not title_b:
                raise ParseError(f"{path}:{lineno}: empty title")
            if title_a in seen_a or title_b in seen_b:
                dropped += 1
                continue
            seen_a.add(title_a)
            seen_b.add(title_b)
            links.append((title_a, title_b))
    if dropped:
        logger.warning("%s: dropped %d duplicate title links (keeping first)", path, dropped)
    return TitleLinkTable(lang_a=lang_a, lang_b=lang_b, links=links,
                          n_duplicates_dropped=dropped)


def save_title_links(table: TitleLinkTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for title_a, title_b in table.links:
            fh.write(f"{title_a}\t{title_b}\n")


def load_typology(
    path: str | Path,
    key_features: tuple[str, str, str, str],
    exclude_features: tuple[str, ...] = ("latitude", "longitude"),
) -> TypologyTable:
    """Load a typology CSV (``lang,feat1,feat2,...``; empty cell = missing).

    Columns named in ``exclude_features`` are dropped before the table is
    built, so geographic coordinates never act as agreement features.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty typology file") from None
        raw_features = [cell.strip() for cell in header[1:]]
        excluded = set(exclude_features)
        keep = [i for i, name in enumerate(raw_features) if name not in excluded]
        feature_ids = [raw_features[i] for i in keep]
        if len(set(feature_ids)) != len(feature_ids):
            raise ParseError(f"{path}: duplicate feature names in header")
        rows: dict[str, list[str | None]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(cell.strip() for cell in row):
                continue
            if len(row) != len(raw_features) + 1:
                raise ParseError(
                    f"{path}:{lineno}: expected {len(raw_features) + 1} columns, got {len(row)}"
                )
            lang = lang_code(row[0])
            if lang in rows:
                raise ValidationError(f"{path}:{lineno}: duplicate language row {lang!r}")
            values = [row[1 + i].strip() or None for i in keep]
            rows[lang] = values
    return TypologyTable(feature_ids=feature_ids, rows=rows,
                         key_features=tuple(key_features))
