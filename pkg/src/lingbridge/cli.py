"""Command-line surface for batch experiments.

One process per invocation, plain files in and out, reproducible byte for
byte: identical inputs and flags give identical outputs at any --threads
value. Exit codes: 0 success, 2 usage, 3 parse error, 4 validation error,
5 runtime failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bridge, classifier, clesa, corpus, esa, ranking, stats
from .errors import ParseError, ValidationError

DEFAULT_SEED = 13
DEFAULT_KEY_FEATURES = ("genus", "family", "macro_area", "country_code")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_VALIDATION = 4
EXIT_RUNTIME = 5


@dataclass
class RunConfig:
    """Validated invocation: subcommand, resolved paths, and flags."""

    subcommand: str
    inputs: dict[str, Path]
    outputs: dict[str, Path]
    seed: int = DEFAULT_SEED
    threads: int = 1
    flags: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.threads < 1:
            raise ValidationError("--threads must be >= 1")
        for name, path in self.inputs.items():
            if not path.is_file():
                raise ValidationError(f"--{name.replace('_', '-')}: no such file: {path}")


def _config(args: argparse.Namespace) -> RunConfig:
    inputs: dict[str, Path] = {}
    for name in args._input_paths:
        value = getattr(args, name)
        if value is None:
            continue
        if isinstance(value, list):
            for i, item in enumerate(value):
                inputs[f"{name}[{i}]"] = Path(item)
        else:
            inputs[name] = Path(value)
    outputs = {name: Path(getattr(args, name)) for name in args._output_paths}
    cfg = RunConfig(subcommand=args.subcommand, inputs=inputs, outputs=outputs,
                    seed=args.seed, threads=args.threads,
                    flags={k: v for k, v in vars(args).items()
                           if not k.startswith("_") and k not in
                           ("subcommand", "func", "seed", "threads")})
    cfg.validate()
    return cfg


def _parse_c_grid(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise ValidationError(f"--c-grid: not a comma-separated number list: {text!r}") from None
    if not values:
        raise ValidationError("--c-grid: empty grid")
    return values


def _parse_key_features(text: str) -> tuple[str, str, str, str]:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    if len(names) != 4:
        raise ValidationError("--key-features: exactly four comma-separated names required")
    return names  # type: ignore[return-value]


def cmd_build_index(args: argparse.Namespace) -> int:
    _config(args)
    docs = corpus.load_concept_corpus(args.corpus, args.lang)
    index = esa.build_index(docs, prune_top_k=args.prune_top_k)
    esa.save_index(index, args.out)
    return EXIT_OK


def cmd_build_clesa(args: argparse.Namespace) -> int:
    _config(args)
    index_a = esa.load_index(args.index_a)
    index_b = esa.load_index(args.index_b)
    links = corpus.load_title_links(args.links, index_a.lang, index_b.lang)
    space = clesa.build_clesa(index_a, index_b, links)
    clesa.save_clesa(space, args.out)
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    _config(args)
    if (args.index is None) == (args.space is None):
        raise ValidationError("exactly one of --index or --space is required")
    docs = corpus.load_documents(args.docs, args.lang)
    labels = corpus.load_labels(args.labels)
    if args.index is not None:
        index = esa.load_index(args.index)
        if args.dict is not None:
            # word-translate into the index language, then classify there
            dictionary = corpus.load_dictionary(args.dict, args.lang, index.lang)
            docs = [corpus.Document(doc_id=d.doc_id, lang=index.lang,
                                    text=" ".join(bridge.translate_document(
                                        d, dictionary, args.expansion).tokens),
                                    gold_label=d.gold_label)
                    for d in docs]
        preds = classifier.classify_monolingual(
            docs, labels, index, label_mode=args.label_mode, threads=args.threads)
    else:
        space = clesa.load_clesa(args.space)
        if args.dict is not None:
            dictionary = corpus.load_dictionary(args.dict, args.lang, space.lang_a)
            preds = classifier.classify_bridged(
                docs, dictionary, labels, space, expansion=args.expansion,
                label_mode=args.label_mode, threads=args.threads)
        else:
            preds = classifier.classify_clesa(
                docs, labels, space, label_mode=args.label_mode, threads=args.threads)
    classifier.write_predictions(preds, args.out)
    return EXIT_OK


def cmd_rank_bridges(args: argparse.Namespace) -> int:
    _config(args)
    table = None
    sizes = None
    links = None
    model = None
    if args.typology is not None:
        table = corpus.load_typology(args.typology, _parse_key_features(args.key_features))
    if args.wiki_sizes is not None:
        sizes = ranking.load_wiki_sizes(args.wiki_sizes)
    if args.link_counts is not None:
        links = ranking.load_link_counts(args.link_counts)
    if args.model is not None:
        model = ranking.load_model(args.model)
    if args.candidates:
        candidates = [c.strip() for c in args.candidates.split(",") if c.strip()]
    elif args.method in ("linguistic", "harmonic", "ranksvm") and table is not None:
        candidates = sorted(c for c in table.languages() if c != args.src)
    elif args.method == "wiki_size" and sizes is not None:
        candidates = sorted(c for c in sizes if c != args.src)
    elif args.method == "lang_links" and links is not None:
        candidates = sorted({b for (a, b) in links if a == args.src})
    else:
        raise ValidationError("cannot derive candidates; pass --candidates")
    scores = ranking.rank_bridges(
        args.method, args.src, candidates, table=table, wiki_sizes=sizes,
        link_counts=links, model=model, key_weight=args.key_weight)
    ranking.write_ranking(scores, args.out)
    return EXIT_OK


def cmd_train_ranker(args: argparse.Namespace) -> int:
    _config(args)
    matrix = ranking.load_accuracy_matrix(args.accuracy)
    table = corpus.load_typology(args.typology, _parse_key_features(args.key_features))
    grid = _parse_c_grid(args.c_grid)
    report = ranking.cross_validate(matrix, table, folds=args.folds, c_grid=grid)
    final_c = ranking.modal_c(report)
    model = ranking.train_ranksvm(matrix, table, final_c)
    ranking.save_model(model, args.out_model)
    with open(args.out_report, "w", encoding="utf-8") as fh:
        fh.write("c_grid," + ",".join(repr(c) for c in report.c_grid) + "\n")
        fh.write(f"folds,{report.folds}\n")
        fh.write("chosen_c," + ",".join(repr(c) for c in report.chosen_c) + "\n")
        fh.write(f"final_c,{final_c!r}\n")
        fh.write("swl,fold,bridge,accuracy,best_accuracy\n")
        for choice in report.choices:
            fh.write(f"{choice.swl},{choice.fold},{choice.bridge},"
                     f"{choice.accuracy!r},{choice.best_accuracy!r}\n")
        fh.write(f"mean_accuracy,{report.mean_accuracy!r}\n")
        fh.write(f"std_accuracy,{report.std_accuracy!r}\n")
        tops = ";".join(f"{name}:{weight!r}"
                        for name, weight in ranking.top_weights(model))
        fh.write(f"top_weights,{tops}\n")
    return EXIT_OK


def cmd_vote(args: argparse.Namespace) -> int:
    _config(args)
    prediction_sets = [classifier.load_predictions(path) for path in args.predictions]
    voted = classifier.majority_vote(prediction_sets)
    classifier.write_predictions(voted, args.out)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    _config(args)
    preds = classifier.load_predictions(args.pred)
    docs = corpus.load_documents(args.gold, args.lang)
    gold: dict[str, int] = {}
    for doc in docs:
        if doc.gold_label is None:
            raise ValidationError(f"gold document {doc.doc_id!r} has no label")
        gold[doc.doc_id] = doc.gold_label
    if args.metric == "accuracy":
        result = stats.accuracy(preds, gold)
    else:  # purity: read predicted labels as cluster ids
        labels = {pred.doc_id: pred.label_id for pred in preds}
        if any(label < 0 for label in labels.values()):
            raise ValidationError("negative predicted labels cannot form clusters")
        k = max(labels.values()) + 1
        result = stats.purity(stats.ClusterAssignment(assignment=labels, k=k), gold)
    stats.write_metric(result, args.out)
    print(f"{result.name},{result.value!r},{result.n}")
    return EXIT_OK


def cmd_dict_coverage(args: argparse.Namespace) -> int:
    _config(args)
    docs = corpus.load_documents(args.docs, args.lang)
    dictionary = corpus.load_dictionary(args.dict, args.lang, args.dict_tgt)
    report = bridge.coverage_report(docs, dictionary)
    bridge.write_coverage_report(report, args.out)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="seed for any randomized component (default %(default)s)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads; results are identical at any value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lingbridge",
        description="Dataless cross-lingual document classification and "
                    "bridge-language ranking.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("build-index", help="build and serialize a concept index")
    p.add_argument("--corpus", required=True, help="concept corpus (JSON lines)")
    p.add_argument("--lang", required=True, help="corpus language code")
    p.add_argument("--prune-top-k", type=int, default=None,
                   help="keep only the k strongest concepts per term")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_build_index, _input_paths=["corpus"], _output_paths=["out"])

    p = sub.add_parser("build-clesa", help="intersect two indexes under title links")
    p.add_argument("--index-a", required=True, dest="index_a")
    p.add_argument("--index-b", required=True, dest="index_b")
    p.add_argument("--links", required=True, help="title_a<TAB>title_b rows")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_build_clesa,
                   _input_paths=["index_a", "index_b", "links"], _output_paths=["out"])

    p = sub.add_parser("classify", help="dataless classification of a document file")
    p.add_argument("--docs", required=True, help="documents (JSON lines)")
    p.add_argument("--lang", required=True, help="document language code")
    p.add_argument("--labels", required=True, help="label descriptions (TSV)")
    p.add_argument("--index", default=None, help="monolingual index file")
    p.add_argument("--space", default=None, help="cross-lingual space file")
    p.add_argument("--dict", default=None,
                   help="bridge dictionary from the document language")
    p.add_argument("--expansion", choices=bridge.EXPANSION_MODES, default="first")
    p.add_argument("--label-mode", choices=classifier.LABEL_MODES,
                   default="name_description", dest="label_mode")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_classify,
                   _input_paths=["docs", "labels", "index", "space", "dict"],
                   _output_paths=["out"])

    p = sub.add_parser("rank-bridges", help="rank candidate bridge languages")
    p.add_argument("--method", required=True, choices=ranking.RANKING_METHODS)
    p.add_argument("--src", required=True, help="source (low-resource) language")
    p.add_argument("--candidates", default=None,
                   help="comma-separated candidate codes (default: derive from inputs)")
    p.add_argument("--typology", default=None, help="typology CSV")
    p.add_argument("--key-features", default=",".join(DEFAULT_KEY_FEATURES),
                   dest="key_features",
                   help="the four key feature names (default %(default)s)")
    p.add_argument("--key-weight", type=float, default=ranking.DEFAULT_KEY_FEATURE_WEIGHT,
                   dest="key_weight")
    p.add_argument("--wiki-sizes", default=None, dest="wiki_sizes",
                   help="lang,count rows")
    p.add_argument("--link-counts", default=None, dest="link_counts",
                   help="lang_a,lang_b,count rows")
    p.add_argument("--model", default=None, help="trained ranker model file")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_rank_bridges,
                   _input_paths=["typology", "wiki_sizes", "link_counts", "model"],
                   _output_paths=["out"])

    p = sub.add_parser("train-ranker", help="cross-validate and train the ranker")
    p.add_argument("--accuracy", required=True, help="swl,lwl,accuracy rows")
    p.add_argument("--typology", required=True, help="typology CSV")
    p.add_argument("--key-features", default=",".join(DEFAULT_KEY_FEATURES),
                   dest="key_features")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--c-grid", default="0.01,0.1,1,10,100,1000,10000",
                   dest="c_grid", help="penalty grid (default %(default)s)")
    p.add_argument("--out-model", required=True, dest="out_model")
    p.add_argument("--out-report", required=True, dest="out_report")
    _add_common(p)
    p.set_defaults(func=cmd_train_ranker,
                   _input_paths=["accuracy", "typology"],
                   _output_paths=["out_model", "out_report"])

    p = sub.add_parser("vote", help="majority-vote several prediction files")
    p.add_argument("predictions", nargs="+", help="prediction CSV files")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_vote, _input_paths=["predictions"], _output_paths=["out"])

    p = sub.add_parser("evaluate", help="score predictions against gold labels")
    p.add_argument("--pred", required=True, help="prediction CSV")
    p.add_argument("--gold", required=True, help="documents with labels (JSON lines)")
    p.add_argument("--lang", default="und", help="gold document language code")
    p.add_argument("--metric", choices=("accuracy", "purity"), default="accuracy")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_evaluate, _input_paths=["pred", "gold"], _output_paths=["out"])

    p = sub.add_parser("dict-coverage", help="dictionary coverage over documents")
    p.add_argument("--docs", required=True, help="documents (JSON lines)")
    p.add_argument("--lang", required=True, help="document language code")
    p.add_argument("--dict", required=True, help="bilingual dictionary (TSV)")
    p.add_argument("--dict-tgt", default="und", dest="dict_tgt",
                   help="target language label for the report")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_dict_coverage, _input_paths=["docs", "dict"],
                   _output_paths=["out"])

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage errors and --help
        code = exc.code
        return int(code) if code is not None else EXIT_OK
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"error: runtime: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
