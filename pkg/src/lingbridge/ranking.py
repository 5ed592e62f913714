"""Ranking candidate bridge languages for a low-resource source language.

Five methods are provided: a handcrafted typological similarity (four key
features weighted 50, all others weighted 1), raw concept-corpus size, raw
interlanguage link counts, a harmonic combination of rank weights, and a
learned pairwise ranker. The ranker minimizes

    0.5 * ||w||^2 + C * sum_p max(0, 1 - w . d_p)

over oriented feature-agreement differences d_p = x(src, better) -
x(src, worse), solved by deterministic cyclic coordinate descent on the
dual (exact per-coordinate updates, monotone dual). The returned weights
are the best-primal-objective iterate, so the recorded objective history
is non-increasing by construction.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .corpus import TypologyTable
from .errors import ParseError, ValidationError

DEFAULT_C_GRID = (1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4)
DEFAULT_KEY_FEATURE_WEIGHT = 50.0
RANKING_METHODS = ("linguistic", "wiki_size", "lang_links", "harmonic", "ranksvm")
MODEL_FORMAT = "ranksvm-model"
MODEL_VERSION = 1

# (swl code, candidate code -> measured bridged accuracy)
AccuracyRow = tuple[str, dict[str, float]]


@dataclass
class PairFeatureVector:
    """Binary agreement vector between two languages over all features."""

    src: str
    tgt: str
    x: np.ndarray


@dataclass
class BridgeScore:
    src: str
    tgt: str
    method: str
    value: float


@dataclass
class RankWeight:
    """Rank converted to a weight in (0, 1]: (n - rank + 1) / n."""

    rank: int
    n: int

    @property
    def value(self) -> float:
        return (self.n - self.rank + 1) / self.n


@dataclass
class RankSvmModel:
    w: np.ndarray
    C: float
    feature_ids: list[str]
    objective_history: list[float] = field(default_factory=list)


@dataclass
class BridgeChoice:
    swl: str
    fold: int
    bridge: str
    accuracy: float
    best_accuracy: float


@dataclass
class CrossValReport:
    folds: int
    c_grid: list[float]
    chosen_c: list[float]
    choices: list[BridgeChoice]
    models: list[RankSvmModel]
    mean_accuracy: float
    std_accuracy: float


def hinge_loss(t: float) -> float:
    """max(0, 1 - t)."""
    return max(0.0, 1.0 - t)


def linguistic_similarity(table: TypologyTable, l1: str, l2: str,
                          key_weight: float = DEFAULT_KEY_FEATURE_WEIGHT) -> float:
    """Handcrafted similarity: key features count ``key_weight`` each, every
    other feature counts 1; a feature agrees only when both values are
    present and equal."""
    v1 = table.values(l1)
    v2 = table.values(l2)
    keys = set(table.key_features)
    score = 0.0
    for i, feature in enumerate(table.feature_ids):
        if v1[i] is not None and v1[i] == v2[i]:
            score += key_weight if feature in keys else 1.0
    return score


def wiki_size_score(space_stats: dict[str, float], lang: str) -> float:
    """Concept-corpus size of a candidate (bigger = better bridge)."""
    try:
        return float(space_stats[lang])
    except KeyError:
        raise ValidationError(f"no concept count recorded for {lang!r}") from None


def lang_links_score(links_stats: dict[tuple[str, str], float],
                     l1: str, l2: str) -> float:
    """Interlanguage link count for an ordered language pair."""
    try:
        return float(links_stats[(l1, l2)])
    except KeyError:
        raise ValidationError(f"no link count recorded for {(l1, l2)!r}") from None


def to_rank_weights(scores: list[tuple[str, float]]) -> dict[str, RankWeight]:
    """Convert scores to rank weights (n - rank + 1) / n.

    Candidates are ranked descending by score; equal scores share the lower
    (better) rank. Rank 1 of any n maps to 1.0, last place to 1/n.
    """
    if not scores:
        raise ValidationError("cannot rank an empty candidate list")
    codes = [code for code, _ in scores]
    if len(set(codes)) != len(codes):
        raise ValidationError("duplicate candidates in score list")
    n = len(scores)
    ordered = sorted(scores, key=lambda cs: (-cs[1], cs[0]))
    weights: dict[str, RankWeight] = {}
    rank = 1
    for position, (code, score) in enumerate(ordered, start=1):
        if position > 1 and score != ordered[position - 2][1]:
            rank = position
        weights[code] = RankWeight(rank=rank, n=n)
    return weights


def harmonic_combine(wl: float, ww: float) -> float:
    """Harmonic mean of two rank weights; defined as 0 when either is 0."""
    if wl < 0 or ww < 0:
        raise ValidationError("rank weights cannot be negative")
    if wl == 0.0 or ww == 0.0:
        return 0.0
    return 2.0 * wl * ww / (wl + ww)


def pair_features(table: TypologyTable, src: str, tgt: str) -> PairFeatureVector:
    """Agreement indicators over all features, key features included as
    ordinary coordinates (their 50-weighting belongs to the handcrafted
    similarity only)."""
    v1 = table.values(src)
    v2 = table.values(tgt)
    x = np.zeros(table.n_features, dtype=np.float64)
    for i in range(table.n_features):
        if v1[i] is not None and v1[i] == v2[i]:
            x[i] = 1.0
    return PairFeatureVector(src=src, tgt=tgt, x=x)


def oriented_pair_diffs(training: list[AccuracyRow], table: TypologyTable,
                        feature_cache: dict[tuple[str, str], np.ndarray] | None = None,
                        ) -> np.ndarray:
    """Build the matrix of oriented feature differences for ranking training.

    For every source language, every unordered candidate pair with distinct
    accuracies yields one row x(src, better) - x(src, worse); equal-accuracy
    pairs are skipped. Candidate pairs are enumerated in sorted code order,
    so the row order is deterministic.
    """
    if feature_cache is None:
        feature_cache = {}

    def features(src: str, tgt: str) -> np.ndarray:
        key = (src, tgt)
        vec = feature_cache.get(key)
        if vec is None:
            vec = pair_features(table, src, tgt).x
            feature_cache[key] = vec
        return vec

    rows: list[np.ndarray] = []
    for swl, accs in training:
        candidates = sorted(accs)
        for i, lj in enumerate(candidates):
            for lk in candidates[i + 1:]:
                if accs[lj] > accs[lk]:
                    rows.append(features(swl, lj) - features(swl, lk))
                elif accs[lk] > accs[lj]:
                    rows.append(features(swl, lk) - features(swl, lj))
    if not rows:
        return np.zeros((0, table.n_features), dtype=np.float64)
    return np.ascontiguousarray(np.stack(rows))


def ranksvm_objective(w: np.ndarray, diffs: np.ndarray, C: float) -> float:
    """Regularized hinge objective over oriented difference rows."""
    margins = diffs @ w
    hinges = np.maximum(0.0, 1.0 - margins)
    return 0.5 * float(w @ w) + C * float(hinges.sum())


@njit(cache=True)
def _dual_cd(D, C, max_epochs, tol, min_epochs):  # pragma: no cover - jitted
    P, F = D.shape
    q = np.empty(P)
    for p in range(P):
        s = 0.0
        for f in range(F):
            s += D[p, f] * D[p, f]
        q[p] = s
    alpha = np.zeros(P)
    w = np.zeros(F)
    best_obj = C * P  # objective at w = 0: every hinge is 1
    best_w = w.copy()
    history = np.empty(max_epochs + 1)
    history[0] = best_obj
    n_hist = 1
    for epoch in range(max_epochs):
        for p in range(P):
            if q[p] == 0.0:
                alpha[p] = C  # identical feature vectors: constant-loss pair
                continue
            m = 0.0
            for f in range(F):
                m += w[f] * D[p, f]
            a_new = alpha[p] + (1.0 - m) / q[p]
            if a_new < 0.0:
                a_new = 0.0
            elif a_new > C:
                a_new = C
            delta = a_new - alpha[p]
            if delta != 0.0:
                alpha[p] = a_new
                for f in range(F):
                    w[f] += delta * D[p, f]
        obj = 0.0
        for f in range(F):
            obj += w[f] * w[f]
        obj *= 0.5
        for p in range(P):
            m = 0.0
            for f in range(F):
                m += w[f] * D[p, f]
            h = 1.0 - m
            if h > 0.0:
                obj += C * h
        improved = obj < best_obj
        rel = 0.0
        if improved:
            denom = best_obj if best_obj > 1e-300 else 1e-300
            rel = (best_obj - obj) / denom
            best_obj = obj
            best_w = w.copy()
            history[n_hist] = obj
            n_hist += 1
        if epoch + 1 >= min_epochs and (not improved or rel < tol):
            break
    return best_w, history[:n_hist]


def train_ranksvm(training: list[AccuracyRow], table: TypologyTable, C: float,
                  max_epochs: int = 10000, tol: float = 1e-6) -> RankSvmModel:
    """Fit the pairwise ranking weights for the given penalty C.

    Deterministic: the pair order, the coordinate-descent schedule, and the
    stopping rule (relative decrease of the best objective below ``tol``, or
    the epoch cap) involve no randomness.
    """
    if C <= 0:
        raise ValidationError("C must be positive")
    diffs = oriented_pair_diffs(training, table)
    if diffs.shape[0] == 0:
        raise ValidationError("no usable training pairs (need distinct accuracies)")
    w, history = _dual_cd(diffs, float(C), int(max_epochs), float(tol), 3)
    return RankSvmModel(w=w, C=float(C), feature_ids=list(table.feature_ids),
                        objective_history=[float(v) for v in history])


def ranksvm_score(model: RankSvmModel, table: TypologyTable,
                  src: str, tgt: str) -> float:
    """w . x(src, tgt); higher means a better bridge for src."""
    if list(table.feature_ids) != list(model.feature_ids):
        raise ValidationError("model features do not match the typology table")
    return float(model.w @ pair_features(table, src, tgt).x)


def _pairwise_accuracy(diffs: np.ndarray, w: np.ndarray) -> float:
    if diffs.shape[0] == 0:
        return 0.0
    return float(np.mean((diffs @ w) > 0.0))


def cross_validate(training: list[AccuracyRow], table: TypologyTable,
                   folds: int = 5, c_grid: tuple[float, ...] = DEFAULT_C_GRID,
                   max_epochs: int = 10000, tol: float = 1e-6) -> CrossValReport:
    """K-fold evaluation of the learned ranker with a grid search over C.

    Source languages are sorted by code and dealt round-robin into folds.
    Within each fold's training pairs, every fifth pair is held out to pick C
    by pairwise ordering accuracy (ties toward the smaller C); the fold model
    is then refit on all its pairs and ranks the held-out languages'
    candidates. The report carries each language's top-1 bridge with its
    measured accuracy, plus the per-fold models.
    """
    if folds < 2:
        raise ValidationError("folds must be >= 2")
    if len(training) < folds:
        raise ValidationError(f"need at least {folds} source languages, got {len(training)}")
    if not c_grid or any(c <= 0 for c in c_grid):
        raise ValidationError("C grid must be non-empty and positive")
    rows = sorted(training, key=lambda row: row[0])
    codes = [row[0] for row in rows]
    if len(set(codes)) != len(codes):
        raise ValidationError("duplicate source language in training data")
    grid = sorted(c_grid)
    cache: dict[tuple[str, str], np.ndarray] = {}
    chosen_c: list[float] = []
    models: list[RankSvmModel] = []
    choices: list[BridgeChoice] = []
    for fold in range(folds):
        fold_train = [rows[i] for i in range(len(rows)) if i % folds != fold]
        held_out = [rows[i] for i in range(len(rows)) if i % folds == fold]
        diffs = oriented_pair_diffs(fold_train, table, cache)
        if diffs.shape[0] == 0:
            raise ValidationError("no usable training pairs in a fold")
        val_mask = np.arange(diffs.shape[0]) % 5 == 4
        inner_train = diffs[~val_mask]
        inner_val = diffs[val_mask]
        best_c = grid[0]
        best_acc = -1.0
        for c in grid:
            w, _ = _dual_cd(inner_train, float(c), int(max_epochs), float(tol), 3)
            acc = _pairwise_accuracy(inner_val, w)
            if acc > best_acc:
                best_acc = acc
                best_c = c
        w, history = _dual_cd(diffs, float(best_c), int(max_epochs), float(tol), 3)
        model = RankSvmModel(w=w, C=float(best_c),
                             feature_ids=list(table.feature_ids),
                             objective_history=[float(v) for v in history])
        chosen_c.append(float(best_c))
        models.append(model)
        for swl, accs in held_out:
            candidates = sorted(accs)
            scored = [(ranksvm_score(model, table, swl, cand), cand)
                      for cand in candidates]
            top = min(scored, key=lambda sc: (-sc[0], sc[1]))[1]
            choices.append(BridgeChoice(swl=swl, fold=fold, bridge=top,
                                        accuracy=accs[top],
                                        best_accuracy=max(accs.values())))
    choices.sort(key=lambda choice: choice.swl)
    accuracies = np.array([choice.accuracy for choice in choices])
    return CrossValReport(folds=folds, c_grid=[float(c) for c in grid],
                          chosen_c=chosen_c, choices=choices, models=models,
                          mean_accuracy=float(accuracies.mean()),
                          std_accuracy=float(accuracies.std()))


def modal_c(report: CrossValReport) -> float:
    """Most frequently selected C across folds, ties toward the smaller value."""
    counts = Counter(report.chosen_c)
    return min(counts, key=lambda c: (-counts[c], c))


def rank_bridges(method: str, src: str, candidates: list[str], *,
                 table: TypologyTable | None = None,
                 wiki_sizes: dict[str, float] | None = None,
                 link_counts: dict[tuple[str, str], float] | None = None,
                 model: RankSvmModel | None = None,
                 key_weight: float = DEFAULT_KEY_FEATURE_WEIGHT) -> list[BridgeScore]:
    """Score and sort candidate bridges for one source language.

    Returns scores in descending order (candidate code breaks ties). Each
    method needs its own inputs: typology for linguistic/harmonic/ranksvm,
    concept counts for wiki_size/harmonic, link counts for lang_links, a
    trained model for ranksvm.
    """
    if method not in RANKING_METHODS:
        raise ValidationError(f"unknown ranking method {method!r}")
    if not candidates:
        raise ValidationError("no candidates to rank")
    if len(set(candidates)) != len(candidates):
        raise ValidationError("duplicate candidates")

    def need(value, what: str):
        if value is None:
            raise ValidationError(f"method {method!r} requires {what}")
        return value

    if method == "linguistic":
        t = need(table, "a typology table")
        values = {c: linguistic_similarity(t, src, c, key_weight) for c in candidates}
    elif method == "wiki_size":
        sizes = need(wiki_sizes, "per-language concept counts")
        values = {c: wiki_size_score(sizes, c) for c in candidates}
    elif method == "lang_links":
        links = need(link_counts, "per-pair link counts")
        values = {c: lang_links_score(links, src, c) for c in candidates}
    elif method == "harmonic":
        t = need(table, "a typology table")
        sizes = need(wiki_sizes, "per-language concept counts")
        wl = to_rank_weights([(c, linguistic_similarity(t, src, c, key_weight))
                              for c in candidates])
        ww = to_rank_weights([(c, wiki_size_score(sizes, c)) for c in candidates])
        values = {c: harmonic_combine(wl[c].value, ww[c].value) for c in candidates}
    else:  # ranksvm
        t = need(table, "a typology table")
        m = need(model, "a trained model")
        values = {c: ranksvm_score(m, t, src, c) for c in candidates}
    ordered = sorted(candidates, key=lambda c: (-values[c], c))
    return [BridgeScore(src=src, tgt=c, method=method, value=values[c])
            for c in ordered]


def top_weights(model: RankSvmModel, k: int = 5) -> list[tuple[str, float]]:
    """The k features with the largest absolute learned weights."""
    order = sorted(range(len(model.feature_ids)),
                   key=lambda i: (-abs(float(model.w[i])), model.feature_ids[i]))
    return [(model.feature_ids[i], float(model.w[i])) for i in order[:k]]


def load_accuracy_matrix(path: str | Path) -> list[AccuracyRow]:
    """Read ``swl,lwl,accuracy`` rows, grouped by source language in
    first-seen order."""
    grouped: dict[str, dict[str, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cols = line.split(",")
            if len(cols) != 3:
                raise ParseError(f"{path}:{lineno}: expected swl,lwl,accuracy")
            swl, lwl = cols[0].strip(), cols[1].strip()
            try:
                acc = float(cols[2])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: accuracy must be a number") from None
            row = grouped.setdefault(swl, {})
            if lwl in row:
                raise ValidationError(f"{path}:{lineno}: duplicate pair {swl},{lwl}")
            row[lwl] = acc
    return [(swl, accs) for swl, accs in grouped.items()]


def load_wiki_sizes(path: str | Path) -> dict[str, float]:
    """Read ``lang,count`` rows."""
    sizes: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cols = line.split(",")
            if len(cols) != 2:
                raise ParseError(f"{path}:{lineno}: expected lang,count")
            lang = cols[0].strip()
            if lang in sizes:
                raise ValidationError(f"{path}:{lineno}: duplicate language {lang!r}")
            try:
                sizes[lang] = float(cols[1])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: count must be a number") from None
    return sizes


def load_link_counts(path: str | Path) -> dict[tuple[str, str], float]:
    """Read ``lang_a,lang_b,count`` rows."""
    counts: dict[tuple[str, str], float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cols = line.split(",")
            if len(cols) != 3:
                raise ParseError(f"{path}:{lineno}: expected lang_a,lang_b,count")
            key = (cols[0].strip(), cols[1].strip())
            if key in counts:
                raise ValidationError(f"{path}:{lineno}: duplicate pair {key!r}")
            try:
                counts[key] = float(cols[2])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: count must be a number") from None
    return counts


def write_ranking(scores: list[BridgeScore], path: str | Path) -> None:
    """Write ``swl,rank,lwl,score`` rows; equal scores share the better rank."""
    with open(path, "w", encoding="utf-8") as fh:
        rank = 1
        for position, score in enumerate(scores, start=1):
            if position > 1 and score.value != scores[position - 2].value:
                rank = position
            fh.write(f"{score.src},{rank},{score.tgt},{score.value!r}\n")


def save_model(model: RankSvmModel, path: str | Path) -> None:
    """Versioned flat file: header, C, feature count, then one
    ``feature<TAB>weight`` line per coordinate."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{MODEL_FORMAT} {MODEL_VERSION}\n")
        fh.write(f"C {model.C!r}\n")
        fh.write(f"F {len(model.feature_ids)}\n")
        for name, weight in zip(model.feature_ids, model.w):
            fh.write(f"{name}\t{float(weight)!r}\n")


def load_model(path: str | Path) -> RankSvmModel:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != f"{MODEL_FORMAT} {MODEL_VERSION}":
        raise ParseError(f"{path}: not a {MODEL_FORMAT} v{MODEL_VERSION} file")
    try:
        c_value = float(lines[1].split(" ", 1)[1])
        n_features = int(lines[2].split(" ", 1)[1])
        names: list[str] = []
        weights: list[float] = []
        for line in lines[3:3 + n_features]:
            name, weight = line.split("\t")
            names.append(name)
            weights.append(float(weight))
        if len(names) != n_features:
            raise ValueError("truncated weight section")
    except (IndexError, ValueError) as exc:
        raise ParseError(f"{path}: corrupt model file: {exc}") from None
    return RankSvmModel(w=np.array(weights, dtype=np.float64), C=c_value,
                        feature_ids=names)
