"""Word-by-word document translation through a bilingual dictionary.

Each source token is looked up independently (frequency preserved, no fuzzy
matching); tokens without an entry are dropped and counted, which yields the
per-document and aggregate coverage numbers used to judge dictionary quality.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .corpus import BilingualDictionary, Document, tokenize
from .errors import ValidationError

EXPANSION_MODES = ("first", "all")


@dataclass
class BridgedDocument:
    """A document re-expressed in the bridge language's vocabulary."""

    original: Document
    bridge_lang: str
    tokens: list[str]
    covered: int
    total: int


@dataclass
class CoverageReport:
    """How much of a document collection a dictionary can translate."""

    src: str
    tgt: str
    pct_words_covered: float
    n_expressions: int
    per_doc: list[tuple[str, int, int]]


def translate_document(doc: Document, dictionary: BilingualDictionary,
                       expansion: str = "first") -> BridgedDocument:
    """Translate a document token by token.

    ``expansion="first"`` emits each token's top-priority translation;
    ``"all"`` emits every listed translation once, in priority order.
    Out-of-vocabulary tokens are dropped and show up as total - covered.
    """
    if expansion not in EXPANSION_MODES:
        raise ValidationError(f"expansion must be one of {EXPANSION_MODES}, got {expansion!r}")
    if dictionary.src != doc.lang:
        raise ValidationError(
            f"dictionary source {dictionary.src!r} does not match document "
            f"language {doc.lang!r}")
    tokens = tokenize(doc.text)
    out: list[str] = []
    covered = 0
    entries = dictionary.entries
    for token in tokens:
        translations = entries.get(token)
        if translations is None:
            continue
        covered += 1
        if expansion == "first":
            out.append(translations[0])
        else:
            out.extend(translations)
    return BridgedDocument(original=doc, bridge_lang=dictionary.tgt,
                           tokens=out, covered=covered, total=len(tokens))


def coverage_report(docs: list[Document], dictionary: BilingualDictionary) -> CoverageReport:
    """Aggregate translation coverage over a document collection."""
    if not docs:
        raise ValidationError("coverage report requires at least one document")
    per_doc: list[tuple[str, int, int]] = []
    sum_covered = 0
    sum_total = 0
    for doc in docs:
        bridged = translate_document(doc, dictionary)
        per_doc.append((doc.doc_id, bridged.covered, bridged.total))
        sum_covered += bridged.covered
        sum_total += bridged.total
    pct = sum_covered / sum_total if sum_total > 0 else 0.0
    return CoverageReport(src=dictionary.src, tgt=dictionary.tgt,
                          pct_words_covered=pct,
                          n_expressions=dictionary.n_expressions,
                          per_doc=per_doc)


def write_coverage_report(report: CoverageReport, path: str | Path) -> None:
    """Write per-document rows ``doc_id,covered,total`` plus a summary line
    ``summary,<pct_words_covered>,<n_expressions>``."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc_id, covered, total in report.per_doc:
            fh.write(f"{doc_id},{covered},{total}\n")
        fh.write(f"summary,{report.pct_words_covered!r},{report.n_expressions}\n")
