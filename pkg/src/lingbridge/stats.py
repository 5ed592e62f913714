"""Evaluation metrics and significance tests.

Accuracy and cluster purity for classification quality, a seeded tf-idf
K-means baseline, Pearson correlation, paired (or pooled unpaired) t-tests,
and a test for comparing two dependent correlations that share one variable.
p-values come from an in-package regularized incomplete beta (Lentz
continued fraction), good to well below 1e-10, so nothing here depends on a
stats library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .classifier import Prediction
from .corpus import Document, tokenize
from .errors import ValidationError


@dataclass
class MetricResult:
    """A named metric value with its sample count and optional extras
    (``p_value``, ``statistic``, ``dof``)."""

    name: str
    value: float
    n: int
    extra: dict[str, float] | None = None

    @property
    def p_value(self) -> float | None:
        return None if self.extra is None else self.extra.get("p_value")


@dataclass
class ClusterAssignment:
    """doc_id -> cluster id, with cluster ids in [0, k)."""

    assignment: dict[str, int]
    k: int

    def __post_init__(self) -> None:
        for doc_id, cluster in self.assignment.items():
            if not 0 <= cluster < self.k:
                raise ValidationError(
                    f"cluster id {cluster} for {doc_id!r} outside [0, {self.k})")


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return h


def _betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _t_sf_two_sided(t: float, dof: float) -> float:
    """P(|T_dof| >= |t|) via the incomplete beta identity."""
    if math.isinf(t):
        return 0.0
    return _betainc_reg(dof / 2.0, 0.5, dof / (dof + t * t))


def accuracy(preds: list[Prediction], gold: Mapping[str, int]) -> MetricResult:
    """Fraction of predictions matching the gold labels exactly."""
    if not preds:
        raise ValidationError("no predictions to evaluate")
    correct = 0
    for pred in preds:
        if pred.doc_id not in gold:
            raise ValidationError(f"no gold label for document {pred.doc_id!r}")
        if pred.label_id == gold[pred.doc_id]:
            correct += 1
    return MetricResult(name="accuracy", value=correct / len(preds), n=len(preds))


def purity(clusters: ClusterAssignment, gold: Mapping[str, int]) -> MetricResult:
    """Average accuracy when each cluster is credited with its majority gold
    label: (1/N) * sum over clusters of the largest label overlap."""
    if not clusters.assignment:
        raise ValidationError("empty clustering")
    if set(clusters.assignment) != set(gold):
        raise ValidationError("clustering and gold labels cover different documents")
    overlap: dict[int, dict[int, int]] = {}
    for doc_id, cluster in clusters.assignment.items():
        counts = overlap.setdefault(cluster, {})
        label = gold[doc_id]
        counts[label] = counts.get(label, 0) + 1
    total = sum(max(counts.values()) for counts in overlap.values())
    n = len(clusters.assignment)
    return MetricResult(name="purity", value=total / n, n=n)


def _tfidf_matrix(docs: list[Document]) -> np.ndarray:
    """Row-normalized tf-idf vectors; idf computed over exactly these docs."""
    vocab: dict[str, int] = {}
    doc_tokens = []
    for doc in docs:
        tokens = tokenize(doc.text)
        doc_tokens.append(tokens)
        for token in tokens:
            vocab.setdefault(token, len(vocab))
    n = len(docs)
    matrix = np.zeros((n, len(vocab)), dtype=np.float64)
    df = np.zeros(len(vocab), dtype=np.int64)
    for row, tokens in enumerate(doc_tokens):
        for token in set(tokens):
            df[vocab[token]] += 1
        for token in tokens:
            matrix[row, vocab[token]] += 1.0
    with np.errstate(divide="ignore"):
        idf = np.where(df > 0, np.log(n / np.maximum(df, 1)), 0.0)
    matrix *= idf  # df == n gives idf 0, matching the index convention
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return matrix / norms


def _lloyd(matrix: np.ndarray, k: int, rng: np.random.Generator,
           max_iter: int = 100) -> tuple[np.ndarray, list[float]]:
    """Spherical K-means: cosine distance over unit rows, centroids are
    normalized member means. Returns (labels, per-iteration objective)."""
    n = matrix.shape[0]
    centroids = matrix[rng.choice(n, size=k, replace=False)].copy()
    labels = np.full(n, -1, dtype=np.int64)
    objective: list[float] = []
    for _ in range(max_iter):
        sims = matrix @ centroids.T
        new_labels = np.argmax(sims, axis=1)
        objective.append(float(n - sims[np.arange(n), new_labels].sum()))
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for cluster in range(k):
            members = matrix[labels == cluster]
            if len(members) == 0:
                continue  # keep the previous centroid
            mean = members.mean(axis=0)
            norm = np.linalg.norm(mean)
            if norm > 0.0:
                centroids[cluster] = mean / norm
    return labels, objective


def kmeans_tfidf(docs: list[Document], k: int, trials: int = 10,
                 seed: int = 13) -> list[tuple[ClusterAssignment, float]]:
    """Seeded K-means baseline over the documents' own tf-idf features.

    Each trial initializes centroids from k distinct random documents and
    runs Lloyd iterations (at most 100, or until assignments stabilize); the
    returned purity uses the documents' gold labels. Trials are independent
    and individually seeded, so any trial subset is reproducible.
    """
    if not docs:
        raise ValidationError("no documents to cluster")
    if not 1 <= k <= len(docs):
        raise ValidationError(f"k must be in [1, {len(docs)}], got {k}")
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    gold: dict[str, int] = {}
    for doc in docs:
        if doc.gold_label is None:
            raise ValidationError(f"document {doc.doc_id!r} has no gold label")
        gold[doc.doc_id] = doc.gold_label
    matrix = _tfidf_matrix(docs)
    results: list[tuple[ClusterAssignment, float]] = []
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        labels, _ = _lloyd(matrix, k, rng)
        assignment = ClusterAssignment(
            assignment={doc.doc_id: int(labels[i]) for i, doc in enumerate(docs)},
            k=k)
        results.append((assignment, purity(assignment, gold).value))
    return results


def _as_floats(values: Sequence[float], name: str, min_len: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or len(arr) < min_len:
        raise ValidationError(f"{name} must be a 1-D sequence of length >= {min_len}")
    return arr


def pearson(x: Sequence[float], y: Sequence[float]) -> MetricResult:
    """Product-moment correlation with a two-sided p-value (t, n-2 dof)."""
    xa = _as_floats(x, "x", 3)
    ya = _as_floats(y, "y", 3)
    if len(xa) != len(ya):
        raise ValidationError("x and y must have equal length")
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise ValidationError("correlation is undefined for constant input")
    n = len(xa)
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    num = float(xc @ yc)
    sx2 = float(xc @ xc)
    sy2 = float(yc @ yc)
    if num == 0.0:
        r = 0.0
    else:
        # sqrt of the squared ratio keeps r == +/-1 exact for y = a*x + b
        r = math.copysign(math.sqrt((num * num) / (sx2 * sy2)), num)
        r = max(-1.0, min(1.0, r))
    dof = n - 2
    if 1.0 - r * r <= 0.0:
        p = 0.0
        t = math.inf if r > 0 else -math.inf
    else:
        t = r * math.sqrt(dof / (1.0 - r * r))
        p = _t_sf_two_sided(t, dof)
    return MetricResult(name="pearson", value=r, n=n,
                        extra={"p_value": p, "statistic": t, "dof": float(dof)})


def paired_ttest(a: Sequence[float], b: Sequence[float],
                 paired: bool = True) -> MetricResult:
    """Two-sided t-test between two result series.

    Paired (the default) tests the mean of the differences; ``paired=False``
    runs the classic pooled-variance two-sample test instead.
    """
    aa = _as_floats(a, "a", 2)
    ba = _as_floats(b, "b", 2)
    if paired:
        if len(aa) != len(ba):
            raise ValidationError("paired test requires equal-length series")
        diff = aa - ba
        sd = float(diff.std(ddof=1))
        if sd == 0.0:
            raise ValidationError("zero-variance differences: t is undefined")
        n = len(diff)
        t = float(diff.mean()) / (sd / math.sqrt(n))
        dof = n - 1
    else:
        n1, n2 = len(aa), len(ba)
        if n1 + n2 < 3:
            raise ValidationError("too few observations for a two-sample test")
        v1 = float(aa.var(ddof=1)) if n1 > 1 else 0.0
        v2 = float(ba.var(ddof=1)) if n2 > 1 else 0.0
        dof = n1 + n2 - 2
        pooled = ((n1 - 1) * v1 + (n2 - 1) * v2) / dof
        if pooled == 0.0:
            raise ValidationError("zero pooled variance: t is undefined")
        t = (float(aa.mean()) - float(ba.mean())) / math.sqrt(pooled * (1 / n1 + 1 / n2))
        n = n1 + n2
    p = _t_sf_two_sided(t, dof)
    name = "paired_ttest" if paired else "ttest"
    return MetricResult(name=name, value=t, n=n,
                        extra={"p_value": p, "statistic": t, "dof": float(dof)})


def dependent_corr_test(r12: float, r13: float, r23: float, n: int) -> MetricResult:
    """Compare two correlations that share variable 1 (r12 vs r13, given r23).

    Uses the Steiger-style statistic with n-3 degrees of freedom:

        t = (r12 - r13) * sqrt((n-1) * (1+r23) /
            (2*((n-1)/(n-3))*det + rbar^2 * (1-r23)^3)),

    where det is the determinant of the 3x3 correlation matrix and
    rbar = (r12 + r13) / 2. Two-sided p-value.
    """
    if n < 4:
        raise ValidationError("need n >= 4 observations")
    for name, r in (("r12", r12), ("r13", r13), ("r23", r23)):
        if not -1.0 <= r <= 1.0:
            raise ValidationError(f"{name} = {r} is outside [-1, 1]")
    if abs(r12) == 1.0 or abs(r13) == 1.0:
        raise ValidationError("degenerate correlation of magnitude 1")
    det = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 + 2.0 * r12 * r13 * r23
    rbar = (r12 + r13) / 2.0
    cube = (1.0 - r23) ** 3
    denom = 2.0 * ((n - 1) / (n - 3)) * det + rbar * rbar * cube
    if denom <= 0.0:
        raise ValidationError("degenerate correlation structure")
    t = (r12 - r13) * math.sqrt((n - 1) * (1.0 + r23) / denom)
    dof = n - 3
    p = _t_sf_two_sided(t, dof)
    return MetricResult(name="dependent_corr", value=t, n=n,
                        extra={"p_value": p, "statistic": t, "dof": float(dof)})


def write_metric(result: MetricResult, path: str | Path) -> None:
    """Write one ``metric,value,n,p_value`` row (empty p_value if absent)."""
    p = result.p_value
    p_text = "" if p is None else repr(p)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("metric,value,n,p_value\n")
        fh.write(f"{result.name},{result.value!r},{result.n},{p_text}\n")
