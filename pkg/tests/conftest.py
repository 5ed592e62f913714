"""Shared fixture builders for the test suite.

The trilingual fixture plants a fully separable three-topic world: an
English concept corpus, a bridge-language twin linked title-by-title, and
source-language documents reachable only through a word dictionary. Helper
functions (not pytest fixtures) so tests can vary parameters and seeds.
"""

from __future__ import annotations

import numpy as np
from hypothesis import settings

from lingbridge.corpus import (
    BilingualDictionary,
    ConceptDoc,
    Document,
    LabelDescription,
    TitleLinkTable,
    tokenize,
)
from lingbridge.clesa import build_clesa
from lingbridge.esa import EsaIndex, build_index

settings.register_profile("det", derandomize=True, max_examples=60)
settings.load_profile("det")

LABEL_VOCAB = {
    0: ["star", "planet", "orbit", "galaxy", "comet", "nebula"],
    1: ["enzyme", "cell", "protein", "neuron", "membrane", "genome"],
    2: ["sonata", "violin", "melody", "chord", "rhythm", "opera"],
}


def swl_word(word: str) -> str:
    return word + "s"


def lwl_word(word: str) -> str:
    return word + "l"


def make_labels() -> list[LabelDescription]:
    return [LabelDescription(label, f"topic{label}", " ".join(vocab))
            for label, vocab in LABEL_VOCAB.items()]


def make_en_corpus() -> list[ConceptDoc]:
    """Twelve English concepts, four per topic, rotating vocab subsets."""
    concepts = []
    cid = 0
    for vocab in LABEL_VOCAB.values():
        for j in range(4):
            words = [vocab[(j + t) % len(vocab)] for t in range(4)]
            concepts.append(ConceptDoc(cid, f"c{cid:02d}_en", "en", " ".join(words)))
            cid += 1
    return concepts


def make_trilingual_fixture(n_docs: int = 90, tokens_per_doc: int = 8,
                            doc_seed: int = 2024):
    """Returns (docs, labels, space, dictionary, gold).

    Documents are in language "sw", the dictionary maps them into "lw", and
    the CLESA space aligns "lw" with "en" one concept at a time. Every token
    of every document belongs to its gold topic's vocabulary, so a perfect
    dictionary classifies at accuracy 1.0.
    """
    rng = np.random.default_rng(doc_seed)
    en_concepts = make_en_corpus()
    lwl_concepts = []
    links = []
    for concept in en_concepts:
        lwl_title = concept.title.replace("_en", "_lw")
        lwl_text = " ".join(lwl_word(w) for w in concept.text.split())
        lwl_concepts.append(ConceptDoc(concept.concept_id, lwl_title, "lw", lwl_text))
        links.append((lwl_title, concept.title))
    space = build_clesa(build_index(lwl_concepts), build_index(en_concepts),
                        TitleLinkTable("lw", "en", links))
    docs = []
    for i in range(n_docs):
        label = i % 3
        vocab = LABEL_VOCAB[label]
        words = [swl_word(vocab[rng.integers(len(vocab))])
                 for _ in range(tokens_per_doc)]
        docs.append(Document(f"d{i:03d}", "sw", " ".join(words), gold_label=label))
    entries = {swl_word(w): [lwl_word(w)]
               for vocab in LABEL_VOCAB.values() for w in vocab}
    dictionary = BilingualDictionary("sw", "lw", entries)
    gold = {doc.doc_id: doc.gold_label for doc in docs}
    return docs, make_labels(), space, dictionary, gold


def corrupt_dictionary(dictionary: BilingualDictionary, fraction: float,
                       seed: int) -> BilingualDictionary:
    """Redirect a seeded, nested prefix of entries to wrong-topic words.

    For a fixed seed the corrupted key sets are nested across fractions and
    each key's wrong target is drawn once, so higher corruption is a strict
    superset of lower corruption.
    """
    rng = np.random.default_rng([seed, 99])
    keys = sorted(dictionary.entries)
    order = list(rng.permutation(len(keys)))
    label_of = {swl_word(w): label
                for label, vocab in LABEL_VOCAB.items() for w in vocab}
    wrong_target = {}
    for key in keys:
        label = label_of[key]
        other = [lwl_word(w) for l2, vocab in LABEL_VOCAB.items()
                 if l2 != label for w in vocab]
        wrong_target[key] = other[rng.integers(len(other))]
    n_corrupt = int(round(fraction * len(keys)))
    corrupted = {keys[i] for i in order[:n_corrupt]}
    entries = {key: ([wrong_target[key]] if key in corrupted else list(values))
               for key, values in dictionary.entries.items()}
    return BilingualDictionary(dictionary.src, dictionary.tgt, entries)


def make_monolingual_fixture(n_docs: int = 30, tokens_per_doc: int = 6,
                             doc_seed: int = 7, with_oov: bool = False):
    """English-only variant: (docs, labels, index, gold)."""
    rng = np.random.default_rng(doc_seed)
    index = build_index(make_en_corpus())
    docs = []
    for i in range(n_docs):
        label = i % 3
        vocab = LABEL_VOCAB[label]
        words = [vocab[rng.integers(len(vocab))] for _ in range(tokens_per_doc)]
        if with_oov and i % 4 == 0:
            words.append(f"zz{i}")
        docs.append(Document(f"m{i:03d}", "en", " ".join(words), gold_label=label))
    gold = {doc.doc_id: doc.gold_label for doc in docs}
    return docs, make_labels(), index, gold


def identity_setup(docs: list[Document], index: EsaIndex):
    """Identity links (corpus order) and an identity dictionary covering
    every token of every document: the setup under which bridged, aligned,
    and monolingual classification must coincide exactly."""
    links = TitleLinkTable(index.lang, index.lang,
                           [(t, t) for t in index.titles])
    space = build_clesa(index, index, links)
    vocab = sorted({token for doc in docs for token in tokenize(doc.text)})
    dictionary = BilingualDictionary(index.lang, index.lang,
                                     {token: [token] for token in vocab})
    return space, dictionary


def write_cli_workspace(root) -> dict:
    """Materialize every input file the CLI subcommands consume."""
    import json

    paths = {}

    def write(name, text):
        path = root / name
        path.write_text(text, encoding="utf-8")
        paths[name] = path
        return path

    en_corpus = make_en_corpus()
    write("en_corpus.jsonl", "\n".join(
        json.dumps({"id": c.concept_id, "title": c.title, "text": c.text})
        for c in en_corpus) + "\n")
    lw_lines = []
    link_lines = []
    for concept in en_corpus:
        lw_title = concept.title.replace("_en", "_lw")
        lw_text = " ".join(lwl_word(w) for w in concept.text.split())
        lw_lines.append(json.dumps(
            {"id": concept.concept_id, "title": lw_title, "text": lw_text}))
        link_lines.append(f"{lw_title}\t{concept.title}")
    write("lw_corpus.jsonl", "\n".join(lw_lines) + "\n")
    write("links.tsv", "\n".join(link_lines) + "\n")
    write("labels.tsv", "\n".join(
        f"{lb.label_id}\t{lb.name}\t{lb.description}" for lb in make_labels()) + "\n")

    rng = np.random.default_rng(505)
    sw_docs = []
    en_docs = []
    for i in range(18):
        label = i % 3
        vocab = LABEL_VOCAB[label]
        words = [vocab[rng.integers(len(vocab))] for _ in range(6)]
        en_docs.append(json.dumps({"id": f"e{i}", "text": " ".join(words),
                                   "label": label}))
        sw_docs.append(json.dumps({"id": f"s{i}",
                                   "text": " ".join(swl_word(w) for w in words),
                                   "label": label}))
    write("docs_en.jsonl", "\n".join(en_docs) + "\n")
    write("docs_sw.jsonl", "\n".join(sw_docs) + "\n")
    write("dict_sw_lw.tsv", "\n".join(
        f"{swl_word(w)}\t{lwl_word(w)}"
        for vocab in LABEL_VOCAB.values() for w in vocab) + "\n")

    # typology + accuracy matrix for the ranking commands
    features = ["genus", "family", "macro_area", "country_code"] + \
        [f"f{i}" for i in range(8)]
    pools = [3, 3, 4, 5] + [3] * 8
    langs = [f"l{i:02d}" for i in range(8)]
    rows = {lang: [f"v{rng.integers(pools[i])}" for i in range(len(features))]
            for lang in langs}
    write("typology.csv", "lang," + ",".join(features) + "\n" + "\n".join(
        lang + "," + ",".join(rows[lang]) for lang in langs) + "\n")
    w_star = rng.normal(size=len(features))
    acc_lines = []
    for src in langs:
        for tgt in langs:
            if tgt == src:
                continue
            x = np.array([1.0 if rows[src][i] == rows[tgt][i] else 0.0
                          for i in range(len(features))])
            acc = 1.0 / (1.0 + np.exp(-float(w_star @ x)))
            acc_lines.append(f"{src},{tgt},{acc:.6f}")
    write("accuracy.csv", "\n".join(acc_lines) + "\n")
    write("wiki_sizes.csv", "\n".join(
        f"{lang},{(i + 1) * 937}" for i, lang in enumerate(langs)) + "\n")
    write("link_counts.csv", "\n".join(
        f"{a},{b},{(i + 2) * 311}"
        for i, (a, b) in enumerate((a, b) for a in langs for b in langs if a != b)) + "\n")
    return paths
