"""Dataless classification: nearest label in a shared concept space.

Labels are embedded from their English name and/or description, documents
from their (possibly dictionary-bridged) tokens; each document takes the
argmax-cosine label, ties broken toward the lowest label id. No training
documents are involved anywhere.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .bridge import translate_document
from .clesa import ClesaSpace, embed_shared
from .corpus import BilingualDictionary, Document, LabelDescription, tokenize
from .errors import ParseError, ValidationError
from .esa import ConceptVector, EsaIndex, cosine, embed_text

LABEL_MODES = ("name_description", "description")


@dataclass
class Prediction:
    """Predicted label for one document plus the full per-label score list."""

    doc_id: str
    label_id: int
    scores: list[tuple[int, float]]


def _label_texts(labels: list[LabelDescription], label_mode: str) -> list[tuple[int, str]]:
    if label_mode not in LABEL_MODES:
        raise ValidationError(f"label_mode must be one of {LABEL_MODES}, got {label_mode!r}")
    if not labels:
        raise ValidationError("at least one label is required")
    ids = [label.label_id for label in labels]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate label ids")
    ordered = sorted(labels, key=lambda lb: lb.label_id)
    if label_mode == "description":
        return [(lb.label_id, lb.description) for lb in ordered]
    return [(lb.label_id, f"{lb.name} {lb.description}") for lb in ordered]


def _predict(doc: Document, doc_vec: ConceptVector,
             label_vecs: list[tuple[int, ConceptVector]]) -> Prediction:
    scores = [(label_id, cosine(doc_vec, vec)) for label_id, vec in label_vecs]
    best_id, best_score = scores[0]
    for label_id, score in scores[1:]:
        if score > best_score:
            best_id, best_score = label_id, score
    return Prediction(doc_id=doc.doc_id, label_id=best_id, scores=scores)


def _map_docs(fn: Callable[[Document], Prediction], docs: list[Document],
              threads: int) -> list[Prediction]:
    # Output order always equals input order, whatever the thread count.
    if threads <= 1 or len(docs) < 2:
        return [fn(doc) for doc in docs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, docs))


def classify_monolingual(docs: list[Document], labels: list[LabelDescription],
                         index: EsaIndex, label_mode: str = "name_description",
                         threads: int = 1) -> list[Prediction]:
    """Classify documents written in the index language itself."""
    label_vecs = [(label_id, embed_text(index, tokenize(text)))
                  for label_id, text in _label_texts(labels, label_mode)]
    for doc in docs:
        if doc.lang != index.lang:
            raise ValidationError(
                f"document {doc.doc_id!r} is {doc.lang!r}, index is {index.lang!r}")

    def predict(doc: Document) -> Prediction:
        return _predict(doc, embed_text(index, tokenize(doc.text)), label_vecs)

    return _map_docs(predict, docs, threads)


def classify_clesa(docs: list[Document], labels: list[LabelDescription],
                   space: ClesaSpace, label_mode: str = "name_description",
                   threads: int = 1) -> list[Prediction]:
    """Classify side-a documents against side-b (English) labels in the
    shared concept-pair space."""
    label_vecs = [(label_id, embed_shared(space, tokenize(text), "b"))
                  for label_id, text in _label_texts(labels, label_mode)]
    for doc in docs:
        if doc.lang != space.lang_a:
            raise ValidationError(
                f"document {doc.doc_id!r} is {doc.lang!r}, space side a is "
                f"{space.lang_a!r}")

    def predict(doc: Document) -> Prediction:
        return _predict(doc, embed_shared(space, tokenize(doc.text), "a"), label_vecs)

    return _map_docs(predict, docs, threads)


def classify_bridged(docs: list[Document], dictionary: BilingualDictionary,
                     labels: list[LabelDescription], space: ClesaSpace,
                     expansion: str = "first", label_mode: str = "name_description",
                     threads: int = 1) -> list[Prediction]:
    """Translate documents word-by-word into the bridge language, then
    classify them through the bridge-English shared space."""
    if dictionary.tgt != space.lang_a:
        raise ValidationError(
            f"dictionary target {dictionary.tgt!r} does not match space side a "
            f"{space.lang_a!r}")
    label_vecs = [(label_id, embed_shared(space, tokenize(text), "b"))
                  for label_id, text in _label_texts(labels, label_mode)]

    def predict(doc: Document) -> Prediction:
        bridged = translate_document(doc, dictionary, expansion)
        return _predict(doc, embed_shared(space, bridged.tokens, "a"), label_vecs)

    return _map_docs(predict, docs, threads)


def majority_vote(prediction_sets: list[list[Prediction]]) -> list[Prediction]:
    """Combine per-bridge predictions by voting.

    Every set must cover exactly the same documents. Each document gets the
    modal label (ties toward the lowest label id); output scores are vote
    fractions over the label universe of the input score lists. Voter order
    does not matter.
    """
    if not prediction_sets:
        raise ValidationError("at least one prediction set is required")
    base = prediction_sets[0]
    base_ids = [pred.doc_id for pred in base]
    base_set = set(base_ids)
    if len(base_set) != len(base_ids):
        raise ValidationError("duplicate doc ids in prediction set")
    by_doc: list[dict[str, Prediction]] = []
    for preds in prediction_sets:
        mapping = {pred.doc_id: pred for pred in preds}
        if set(mapping) != base_set or len(preds) != len(base):
            raise ValidationError("prediction sets cover different documents")
        by_doc.append(mapping)
    universe = sorted({label_id
                       for preds in prediction_sets
                       for pred in preds
                       for label_id, _ in pred.scores} |
                      {pred.label_id for preds in prediction_sets for pred in preds})
    n_voters = len(prediction_sets)
    voted: list[Prediction] = []
    for doc_id in base_ids:
        counts: dict[int, int] = {}
        for mapping in by_doc:
            label = mapping[doc_id].label_id
            counts[label] = counts.get(label, 0) + 1
        best_id = min(counts, key=lambda label: (-counts[label], label))
        scores = [(label, counts.get(label, 0) / n_voters) for label in universe]
        voted.append(Prediction(doc_id=doc_id, label_id=best_id, scores=scores))
    return voted


def write_predictions(preds: list[Prediction], path: str | Path) -> None:
    """Write ``doc_id,predicted_label,score_<id>...`` rows with a header."""
    if not preds:
        raise ValidationError("no predictions to write")
    label_ids = [label_id for label_id, _ in preds[0].scores]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id", "predicted_label"] +
                        [f"score_{label_id}" for label_id in label_ids])
        for pred in preds:
            if [label_id for label_id, _ in pred.scores] != label_ids:
                raise ValidationError(
                    f"prediction {pred.doc_id!r} has a different label set")
            writer.writerow([pred.doc_id, pred.label_id] +
                            [repr(score) for _, score in pred.scores])


def load_predictions(path: str | Path) -> list[Prediction]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty prediction file") from None
        if header[:2] != ["doc_id", "predicted_label"]:
            raise ParseError(f"{path}: unexpected prediction header")
        try:
            label_ids = [int(name.removeprefix("score_")) for name in header[2:]]
        except ValueError:
            raise ParseError(f"{path}: malformed score columns") from None
        preds: list[Prediction] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 + len(label_ids):
                raise ParseError(f"{path}:{lineno}: wrong column count")
            try:
                label = int(row[1])
                scores = [(label_ids[i], float(row[2 + i]))
                          for i in range(len(label_ids))]
            except ValueError:
                raise ParseError(f"{path}:{lineno}: malformed prediction row") from None
            preds.append(Prediction(doc_id=row[0], label_id=label, scores=scores))
    return preds
