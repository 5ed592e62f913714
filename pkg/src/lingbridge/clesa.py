"""Cross-lingual concept space over title-linked concept pairs.

The shared space is the intersection of two languages' concept corpora under
an interlanguage title-link table. Both sides are re-indexed over the shared
concepts only, with document frequencies recomputed on the intersection (the
reduced space sharpens term statistics rather than inheriting full-corpus
ones). Text from either side then embeds into one comparable coordinate
system.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import TitleLinkTable
from .errors import ParseError, ValidationError
from .esa import (
    ConceptVector,
    EsaIndex,
    _assemble,
    _index_from_payload,
    _index_payload,
    embed_text,
)

SPACE_FORMAT = "clesa-space"
SPACE_VERSION = 1


@dataclass
class ClesaSpace:
    """Aligned concept-pair space between two languages.

    ``pairs[i]`` gives the original concept positions on each side for shared
    coordinate i; ``index_a``/``index_b`` are full indexes rebuilt over the
    shared concepts, so their coordinates 0..n_shared-1 line up exactly.
    """

    lang_a: str
    lang_b: str
    pairs: list[tuple[int, int]]
    index_a: EsaIndex
    index_b: EsaIndex
    dropped_links: int = 0

    @property
    def n_shared(self) -> int:
        return len(self.pairs)


def _restrict(index: EsaIndex, positions: list[int]) -> EsaIndex:
    """Re-index over the given concept positions (new coords = list order)."""
    remap = {pos: coord for coord, pos in enumerate(positions)}
    titles = [index.titles[pos] for pos in positions]
    concept_ids = [index.concept_ids[pos] for pos in positions]
    term_counts: dict[str, list[tuple[int, int]]] = {}
    for term, counts in index.term_counts.items():
        kept = sorted((remap[pos], tf) for pos, tf in counts if pos in remap)
        if kept:
            term_counts[term] = kept
    return _assemble(index.lang, titles, concept_ids, term_counts, index.prune_top_k)


def build_clesa(index_a: EsaIndex, index_b: EsaIndex, links: TitleLinkTable) -> ClesaSpace:
    """Intersect two indexes under a title-link table.

    Link rows whose titles are missing from either corpus are dropped (and
    counted); surviving rows define shared coordinates in link-file order.
    Raises if no pair survives.
    """
    if links.lang_a != index_a.lang or links.lang_b != index_b.lang:
        raise ValidationError(
            f"link table is {links.lang_a}-{links.lang_b}, "
            f"indexes are {index_a.lang}-{index_b.lang}")
    pairs: list[tuple[int, int]] = []
    dropped = 0
    for title_a, title_b in links.links:
        pos_a = index_a.position_of(title_a)
        pos_b = index_b.position_of(title_b)
        if pos_a is None or pos_b is None:
            dropped += 1
            continue
        pairs.append((pos_a, pos_b))
    if not pairs:
        raise ValidationError("empty shared space: no link row matched both corpora")
    restricted_a = _restrict(index_a, [pa for pa, _ in pairs])
    restricted_b = _restrict(index_b, [pb for _, pb in pairs])
    return ClesaSpace(lang_a=index_a.lang, lang_b=index_b.lang, pairs=pairs,
                      index_a=restricted_a, index_b=restricted_b,
                      dropped_links=dropped)


def embed_shared(space: ClesaSpace, tokens: list[str], side: str) -> ConceptVector:
    """Embed tokens from one side into shared coordinates.

    ``side`` is ``"a"`` or ``"b"``. Vectors from opposite sides are directly
    comparable via cosine because coordinate i means the same concept pair on
    both.
    """
    if side == "a":
        return embed_text(space.index_a, tokens)
    if side == "b":
        return embed_text(space.index_b, tokens)
    raise ValidationError(f"side must be 'a' or 'b', got {side!r}")


def save_clesa(space: ClesaSpace, path: str | Path) -> None:
    payload = {
        "format": SPACE_FORMAT,
        "version": SPACE_VERSION,
        "lang_a": space.lang_a,
        "lang_b": space.lang_b,
        "pairs": [[pa, pb] for pa, pb in space.pairs],
        "dropped_links": space.dropped_links,
        "index_a": _index_payload(space.index_a),
        "index_b": _index_payload(space.index_b),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def load_clesa(path: str | Path) -> ClesaSpace:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: malformed JSON: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format") != SPACE_FORMAT:
        raise ParseError(f"{path}: not a {SPACE_FORMAT} file")
    if payload.get("version") != SPACE_VERSION:
        raise ParseError(f"{path}: unsupported {SPACE_FORMAT} version "
                         f"{payload.get('version')!r}")
    try:
        return ClesaSpace(
            lang_a=payload["lang_a"],
            lang_b=payload["lang_b"],
            pairs=[(int(a), int(b)) for a, b in payload["pairs"]],
            index_a=_index_from_payload(payload["index_a"], str(path)),
            index_b=_index_from_payload(payload["index_b"], str(path)),
            dropped_links=int(payload["dropped_links"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: corrupt space payload: {exc}") from None
