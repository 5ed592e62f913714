"""Monolingual explicit-semantic-analysis index and sparse concept vectors.

A concept corpus becomes an inverted index term -> [(concept, tf*idf)]; any
text then embeds as the sum of its tokens' posting lists. Weights use raw
term frequency times ln(N/df) with no length normalization (cosine scoring
makes global scale immaterial), and terms occurring in every concept are
elided (idf = 0). Raw term counts are kept alongside the weighted postings
so that restricted views can recompute statistics exactly.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import ConceptDoc, tokenize
from .errors import ParseError, ValidationError

INDEX_FORMAT = "esa-index"
INDEX_VERSION = 1


@dataclass
class ConceptVector:
    """Sparse non-negative vector over a concept space of fixed dimension."""

    dimension: int
    entries: dict[int, float] = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.entries

    def norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.entries.values()))

    def scaled(self, factor: float) -> "ConceptVector":
        if factor <= 0:
            raise ValidationError("scale factor must be positive")
        return ConceptVector(self.dimension,
                             {cid: w * factor for cid, w in self.entries.items()})


@dataclass
class EsaIndex:
    """Inverted index over one language's concept corpus.

    ``postings`` holds tf*idf-weighted lists sorted by concept position, only
    for terms with positive idf; ``doc_freq`` records the document frequency
    of every term seen in the corpus; ``term_counts`` keeps the raw
    term-frequency postings the weights were derived from. Concept positions
    run 0..n_concepts-1 in corpus order; ``titles`` and ``concept_ids`` map a
    position back to the source concept.
    """

    lang: str
    titles: list[str]
    concept_ids: list[int]
    term_counts: dict[str, list[tuple[int, int]]]
    doc_freq: dict[str, int] = field(default_factory=dict)
    postings: dict[str, list[tuple[int, float]]] = field(default_factory=dict)
    prune_top_k: int | None = None
    _title_pos: dict[str, int] = field(default_factory=dict, repr=False)

    @property
    def n_concepts(self) -> int:
        return len(self.titles)

    def position_of(self, title: str) -> int | None:
        if not self._title_pos and self.titles:
            self._title_pos = {t: i for i, t in enumerate(self.titles)}
        return self._title_pos.get(title)


def _assemble(lang: str, titles: list[str], concept_ids: list[int],
              term_counts: dict[str, list[tuple[int, int]]],
              prune_top_k: int | None) -> EsaIndex:
    """Derive doc_freq and weighted postings from raw counts."""
    n = len(titles)
    doc_freq: dict[str, int] = {}
    postings: dict[str, list[tuple[int, float]]] = {}
    for term, counts in term_counts.items():
        df = len(counts)
        doc_freq[term] = df
        if df == n:
            continue  # idf = ln(1) = 0, weight elided
        idf = math.log(n / df)
        weighted = [(pos, tf * idf) for pos, tf in counts]
        if prune_top_k is not None and len(weighted) > prune_top_k:
            weighted.sort(key=lambda pw: (-pw[1], pw[0]))
            weighted = sorted(weighted[:prune_top_k])
        postings[term] = weighted
    return EsaIndex(lang=lang, titles=titles, concept_ids=concept_ids,
                    term_counts=term_counts, doc_freq=doc_freq,
                    postings=postings, prune_top_k=prune_top_k)


def build_index(corpus: list[ConceptDoc], prune_top_k: int | None = None) -> EsaIndex:
    """Build the inverted index for one language's concept corpus.

    With ``prune_top_k`` set, each term's posting list is truncated to its k
    highest-weight concepts (ties broken toward the lower concept position).
    Construction is single-threaded and deterministic.
    """
    if not corpus:
        raise ValidationError("cannot build an index from an empty corpus")
    langs = {doc.lang for doc in corpus}
    if len(langs) != 1:
        raise ValidationError(f"corpus mixes languages: {sorted(langs)}")
    if prune_top_k is not None and prune_top_k < 1:
        raise ValidationError("prune_top_k must be >= 1")
    titles = [doc.title for doc in corpus]
    if len(set(titles)) != len(titles):
        raise ValidationError("corpus contains duplicate titles")
    concept_ids = [doc.concept_id for doc in corpus]
    term_counts: dict[str, list[tuple[int, int]]] = {}
    for pos, doc in enumerate(corpus):
        for term, tf in Counter(tokenize(doc.text)).items():
            term_counts.setdefault(term, []).append((pos, tf))
    return _assemble(corpus[0].lang, titles, concept_ids, term_counts, prune_top_k)


def embed_text(index: EsaIndex, tokens: list[str]) -> ConceptVector:
    """Sum the posting lists of the given tokens into one concept vector.

    Out-of-vocabulary tokens contribute nothing; repeated tokens contribute
    repeatedly, so the embedding is additive over token multisets.
    """
    acc: dict[int, float] = {}
    postings = index.postings
    for token in tokens:
        for pos, weight in postings.get(token, ()):
            acc[pos] = acc.get(pos, 0.0) + weight
    return ConceptVector(dimension=index.n_concepts, entries=acc)


def cosine(u: ConceptVector, v: ConceptVector) -> float:
    """Cosine similarity of two vectors in the same space; 0 if either is zero."""
    if u.dimension != v.dimension:
        raise ValidationError(
            f"dimension mismatch: {u.dimension} vs {v.dimension}")
    if not u.entries or not v.entries:
        return 0.0
    small, large = (u.entries, v.entries) if len(u.entries) <= len(v.entries) \
        else (v.entries, u.entries)
    # fsum makes the dot product independent of accumulation order, so
    # cosine(u, v) == cosine(v, u) holds exactly
    dot = math.fsum(w * large[cid] for cid, w in small.items() if cid in large)
    if dot == 0.0:
        return 0.0
    value = dot / (u.norm() * v.norm())
    return min(1.0, max(0.0, value))


def _index_payload(index: EsaIndex) -> dict:
    return {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "lang": index.lang,
        "prune_top_k": index.prune_top_k,
        "titles": index.titles,
        "concept_ids": index.concept_ids,
        "term_counts": {term: [[pos, tf] for pos, tf in counts]
                        for term, counts in index.term_counts.items()},
    }


def _index_from_payload(payload: dict, source: str) -> EsaIndex:
    if not isinstance(payload, dict) or payload.get("format") != INDEX_FORMAT:
        raise ParseError(f"{source}: not an {INDEX_FORMAT} file")
    if payload.get("version") != INDEX_VERSION:
        raise ParseError(f"{source}: unsupported {INDEX_FORMAT} version "
                         f"{payload.get('version')!r}")
    try:
        term_counts = {term: [(int(pos), int(tf)) for pos, tf in counts]
                       for term, counts in payload["term_counts"].items()}
        return _assemble(payload["lang"], list(payload["titles"]),
                         [int(c) for c in payload["concept_ids"]],
                         term_counts, payload["prune_top_k"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{source}: corrupt index payload: {exc}") from None


def save_index(index: EsaIndex, path: str | Path) -> None:
    """Serialize an index; weighted postings are recomputed on load, so the
    file stores only raw counts. Byte-stable for a given index."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_index_payload(index), fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def load_index(path: str | Path) -> EsaIndex:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: malformed JSON: {exc}") from None
    return _index_from_payload(payload, str(path))
