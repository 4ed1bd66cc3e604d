"""Command-line interface: one binary, one subcommand per workflow step.

Every run is a pure function of its input files, flags, and --seed; nothing
is cached between invocations.  An optional --config JSON file supplies
defaults which explicit flags override.  Exit codes: 0 success, 1 usage
error, 2 data error (unreadable/malformed inputs), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import (Corpus, ENTITY_NAMES, corpus_from_sequences, corpus_stats, load_corpus,
                     repair_bio, save_corpus, serialize_conll, split_holdout, split_kfold,
                     validate_bio)
from .crf import CrfTagger, TrainConfig, train_crf
from .evaluation import (REPORT_FORMAT_VERSION, cohen_kappa, cross_validate, cv_report_records,
                         cv_report_table, kappa_report_records, kappa_report_table, paired_ttest,
                         span_metrics, tag_metrics, tag_report_records, tag_report_table,
                         to_ndjson, ttest_records, ttest_table)
from .model_io import load_model, save_model
from .preprocess import text_to_corpus
from .svm import train_svm
from .validation import DataError, NumericalError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors by default; this tool reserves 2 for
    data errors, so usage failures exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


_CONFIG_KEYS = {"model", "train", "test", "split", "k", "seed", "l1", "l2", "max_iter",
                "c", "window", "constrain_bio", "format", "include_o", "span",
                "tolerance", "memory"}

_DEFAULTS = {"split": 0.8, "k": 10, "seed": 42, "l1": 0.1, "l2": 0.1,
             "c": 1.0, "window": 2, "format": "table", "constrain_bio": False,
             "include_o": False, "span": False}


def _load_config(path: str) -> dict:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot read config {path}: {e}") from e
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as e:
        raise DataError(f"config {path}: invalid JSON: {e}") from e
    if not isinstance(obj, dict):
        raise DataError(f"config {path}: expected a JSON object")
    unknown = sorted(set(obj) - _CONFIG_KEYS)
    if unknown:
        raise DataError(f"config {path}: unknown keys: {', '.join(unknown)}")
    return obj


def _opt(args, name: str, required: bool = False):
    """Flag value, falling back to the config file, then built-in defaults."""
    value = getattr(args, name, None)
    if value is None:
        value = args._config.get(name)
    if value is None:
        value = _DEFAULTS.get(name)
    if value is None and required:
        raise UsageError(f"--{name.replace('_', '-')} is required for this command")
    return value


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text if text.endswith("\n") or not text else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") or not text else text + "\n",
                              encoding="utf-8", newline="\n")


def _run_record(command: str, **fields) -> dict:
    return {"record": "run", "format": "sorani-ner-report",
            "version": REPORT_FORMAT_VERSION, "command": command, **fields}


def cmd_preprocess(args) -> int:
    raw = Path(args.input).read_text(encoding="utf-8")
    corpus = text_to_corpus(raw)
    _emit(serialize_conll(corpus), args.output)
    return 0


def cmd_stats(args) -> int:
    corpus = load_corpus(args.input)
    dist = corpus_stats(corpus)
    if _opt(args, "format") == "structured":
        records = [_run_record("stats")]
        for code, count in dist.entity_counts.items():
            records.append({"record": "entity", "label": ENTITY_NAMES[code],
                            "count": count, "percent": dist.percentage(code)})
        records.append({"record": "entity", "label": "OUTSIDE",
                        "count": dist.outside, "percent": dist.percentage("O")})
        records.append({"record": "total", "tokens": dist.total, "sentences": len(corpus)})
        _emit(to_ndjson(records), None)
        return 0
    lines = [f"{'entity':<15} {'tokens':>9} {'percent':>8}"]
    for code, count in dist.entity_counts.items():
        lines.append(f"{ENTITY_NAMES[code]:<15} {count:>9,} {dist.percentage(code):>8.2f}")
    lines.append(f"{'OUTSIDE':<15} {dist.outside:>9,} {dist.percentage('O'):>8.2f}")
    lines.append(f"{'total':<15} {dist.total:>9,} {100.0 if dist.total else 0.0:>8.2f}")
    lines.append(f"{'sentences':<15} {len(corpus):>9,}")
    print("\n".join(lines))
    return 0


def cmd_validate(args) -> int:
    corpus = load_corpus(args.input)
    violations = validate_bio(corpus)
    if args.repair:
        save_corpus(repair_bio(corpus), args.repair)
        print(f"repaired {len(violations)} violation(s) -> {args.repair}")
        return 0
    for v in violations:
        print(v.description)
    print(f"{len(violations)} violation(s) in {len(corpus)} sentence(s)")
    return 2 if violations else 0


def cmd_split(args) -> int:
    corpus = load_corpus(args.input)
    seed = int(_opt(args, "seed"))
    if args.k is not None and args.split is not None:
        raise UsageError("--split and --k are mutually exclusive")
    if args.k is not None:
        if args.out_dir is None:
            raise UsageError("--out-dir is required with --k")
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, (train, test) in enumerate(split_kfold(corpus, int(args.k), seed), start=1):
            save_corpus(train, out / f"fold_{i:02d}.train.conll")
            save_corpus(test, out / f"fold_{i:02d}.test.conll")
        print(f"wrote {args.k} folds to {out}")
        return 0
    fraction = float(_opt(args, "split"))
    train_path = _opt(args, "train", required=True)
    test_path = _opt(args, "test", required=True)
    train, test = split_holdout(corpus, fraction, seed)
    save_corpus(train, train_path)
    save_corpus(test, test_path)
    print(f"train: {len(train)} sentences -> {train_path}")
    print(f"test: {len(test)} sentences -> {test_path}")
    return 0


def _fit_model(kind: str, corpus: Corpus, args):
    window = int(_opt(args, "window"))
    if kind == "crf":
        config = TrainConfig(l1=float(_opt(args, "l1")), l2=float(_opt(args, "l2")),
                             max_iterations=int(_opt(args, "max_iter") or 200),
                             tolerance=float(_opt(args, "tolerance") or 1e-5),
                             memory=int(_opt(args, "memory") or 10))
        return train_crf(corpus, config, window=window)
    if kind == "svm":
        return train_svm(corpus, C=float(_opt(args, "c")),
                         tolerance=float(_opt(args, "tolerance") or 1e-4),
                         max_epochs=int(_opt(args, "max_iter") or 1000),
                         window=window)
    raise UsageError(f"unknown model type {kind!r} (expected crf or svm)")


def cmd_train(args) -> int:
    kind = _opt(args, "model", required=True)
    train_path = _opt(args, "train", required=True)
    corpus = load_corpus(train_path)
    model = _fit_model(kind, corpus, args)
    save_model(model, args.output)
    extra = ""
    if isinstance(model, CrfTagger):
        extra = (f", {model.n_iter_} iteration(s), "
                 f"{'converged' if model.converged_ else 'iteration cap reached'}")
    print(f"trained {kind} on {len(corpus)} sentence(s), "
          f"{corpus.n_tokens} token(s){extra} -> {args.output}")
    return 0


def _load_and_configure(args):
    path = _opt(args, "model", required=True)
    model = load_model(path)
    constrain = bool(_opt(args, "constrain_bio"))
    # For the CRF this masks illegal transitions at decode time; for the
    # per-token SVM the equivalent switch is post-hoc repair.
    if isinstance(model, CrfTagger):
        model.constrain_bio = constrain
    else:
        model.repair_bio = constrain
    return model


def cmd_predict(args) -> int:
    model = _load_and_configure(args)
    test_path = _opt(args, "test", required=True)
    test = load_corpus(test_path)
    tags = model.predict(test)
    _emit(serialize_conll(corpus_from_sequences(test.surfaces(), tags)), args.output)
    return 0


def cmd_evaluate(args) -> int:
    model = _load_and_configure(args)
    test_path = _opt(args, "test", required=True)
    test = load_corpus(test_path)
    predictions = model.predict(test)
    if bool(_opt(args, "span")):
        report = span_metrics(test, predictions)
    else:
        report = tag_metrics(test, predictions, include_o=bool(_opt(args, "include_o")))
    if _opt(args, "format") == "structured":
        _emit(to_ndjson([_run_record("evaluate", span=report.granularity == "span",
                                     include_o=report.include_o)]
                        + tag_report_records(report)), None)
    else:
        print(tag_report_table(report))
    return 0


def cmd_crossval(args) -> int:
    kind = _opt(args, "model", required=True)
    if kind not in ("crf", "svm", "both"):
        raise UsageError(f"unknown model type {kind!r} (expected crf, svm, or both)")
    corpus = load_corpus(_opt(args, "train", required=True))
    k = int(_opt(args, "k"))
    seed = int(_opt(args, "seed"))
    include_o = bool(_opt(args, "include_o"))
    constrain = bool(_opt(args, "constrain_bio"))
    structured = _opt(args, "format") == "structured"

    def run(one_kind: str):
        def trainer(train: Corpus, test: Corpus) -> list[list[str]]:
            model = _fit_model(one_kind, train, args)
            if isinstance(model, CrfTagger):
                model.constrain_bio = constrain
            else:
                model.repair_bio = constrain
            return model.predict(test)
        return cross_validate(corpus, trainer, k, seed, include_o=include_o)

    kinds = ["crf", "svm"] if kind == "both" else [kind]
    reports = {one: run(one) for one in kinds}
    records = [_run_record("crossval", model=kind, k=k, seed=seed)]
    tables = []
    for one in kinds:
        records.extend(cv_report_records(reports[one]))
        tables.append(f"[{one}]\n{cv_report_table(reports[one])}")
    if kind == "both":
        result = paired_ttest([r.micro.f1 for r in reports["crf"].folds],
                              [r.micro.f1 for r in reports["svm"].folds])
        records.extend(ttest_records(result))
        tables.append(f"paired t-test (crf vs svm fold F1): {ttest_table(result)}")
    if structured:
        _emit(to_ndjson(records), None)
    else:
        print("\n\n".join(tables))
    return 0


def cmd_iaa(args) -> int:
    corpus_a = load_corpus(args.file_a)
    corpus_b = load_corpus(args.file_b)
    tags_a = [t for sent in corpus_a.tag_sequences() for t in sent]
    tags_b = [t for sent in corpus_b.tag_sequences() for t in sent]
    report = cohen_kappa(tags_a, tags_b)
    if _opt(args, "format") == "structured":
        _emit(to_ndjson([_run_record("iaa")] + kappa_report_records(report)), None)
    else:
        print(kappa_report_table(report))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="sorani-ner",
                     description="NER dataset tooling and CRF/SVM taggers for Kurdish Sorani.",
                     epilog="exit codes: 0 success, 1 usage error, 2 data error, "
                            "3 numerical failure")
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="JSON object of flag defaults; explicit flags override it")
    common.add_argument("--format", choices=("table", "structured"),
                        help="report style: human-readable table or versioned NDJSON "
                             "(default table)")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("preprocess", parents=[common],
                       help="clean raw text into an all-O CoNLL skeleton")
    p.add_argument("input", help="raw UTF-8 text file")
    p.add_argument("output", nargs="?", help="output CoNLL path (default stdout)")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("stats", parents=[common],
                       help="entity distribution of a CoNLL file")
    p.add_argument("input", help="CoNLL file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", parents=[common],
                       help="check IOB2 consistency (exit 2 when violations exist)")
    p.add_argument("input", help="CoNLL file")
    p.add_argument("--repair", metavar="OUT",
                   help="write a repaired copy instead of failing")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("split", parents=[common],
                       help="seeded holdout or k-fold split")
    p.add_argument("input", help="CoNLL file")
    p.add_argument("--split", type=float, help="train fraction for holdout (default 0.8)")
    p.add_argument("--k", type=int, help="fold count for k-fold mode")
    p.add_argument("--seed", type=int, help="shuffle seed (default 42)")
    p.add_argument("--train", metavar="OUT", help="holdout: train output path")
    p.add_argument("--test", metavar="OUT", help="holdout: test output path")
    p.add_argument("--out-dir", help="k-fold: directory for fold files")
    p.set_defaults(func=cmd_split)

    hyper = _Parser(add_help=False)
    hyper.add_argument("--l1", type=float, help="CRF L1 coefficient (default 0.1)")
    hyper.add_argument("--l2", type=float, help="CRF L2 coefficient (default 0.1)")
    hyper.add_argument("--max-iter", type=int, dest="max_iter",
                       help="CRF iteration cap / SVM epoch cap (defaults 200 / 1000)")
    hyper.add_argument("--c", type=float, help="SVM regularization strength (default 1.0)")
    hyper.add_argument("--window", type=int, help="feature context window (default 2)")
    hyper.add_argument("--tolerance", type=float,
                       help="convergence tolerance (defaults 1e-5 CRF, 1e-4 SVM)")
    hyper.add_argument("--memory", type=int, help="quasi-Newton history size (default 10)")

    p = sub.add_parser("train", parents=[common, hyper], help="train a tagger")
    p.add_argument("--model", choices=("crf", "svm"), help="model type")
    p.add_argument("--train", metavar="FILE", help="training CoNLL file")
    p.add_argument("output", help="model file to write")
    p.set_defaults(func=cmd_train)

    decode = _Parser(add_help=False)
    decode.add_argument("--constrain-bio", dest="constrain_bio",
                        action=argparse.BooleanOptionalAction,
                        help="CRF: mask illegal transitions; SVM: repair output "
                             "(default off)")

    p = sub.add_parser("predict", parents=[common, decode],
                       help="tag a CoNLL file with a trained model")
    p.add_argument("--model", metavar="FILE", help="model file from train")
    p.add_argument("--test", metavar="FILE", help="CoNLL file to tag (tags ignored)")
    p.add_argument("output", nargs="?", help="output CoNLL path (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common, decode],
                       help="score a model against gold tags")
    p.add_argument("--model", metavar="FILE", help="model file from train")
    p.add_argument("--test", metavar="FILE", help="gold CoNLL file")
    p.add_argument("--include-o", dest="include_o", action=argparse.BooleanOptionalAction,
                   help="include the O tag in aggregates (default off)")
    p.add_argument("--span", action=argparse.BooleanOptionalAction,
                   help="exact-match entity spans instead of token tags")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("crossval", parents=[common, hyper, decode],
                       help="k-fold cross-validation (model type crf, svm, or both)")
    p.add_argument("--model", help="crf, svm, or both (both adds a paired t-test)")
    p.add_argument("--train", metavar="FILE", help="CoNLL corpus to fold")
    p.add_argument("--k", type=int, help="fold count (default 10)")
    p.add_argument("--seed", type=int, help="shuffle seed (default 42)")
    p.add_argument("--include-o", dest="include_o", action=argparse.BooleanOptionalAction,
                   help="include the O tag in aggregates (default off)")
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("iaa", parents=[common],
                       help="Cohen's kappa between two annotations of the same tokens")
    p.add_argument("file_a", help="first annotator's CoNLL file")
    p.add_argument("file_b", help="second annotator's CoNLL file")
    p.set_defaults(func=cmd_iaa)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "func", None) is None:
        parser.error("a subcommand is required")
    try:
        args._config = _load_config(args.config) if args.config else {}
        return args.func(args)
    except DataError as e:
        print(f"sorani-ner: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"sorani-ner: error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"sorani-ner: numerical failure: {e}", file=sys.stderr)
        return 3
    except UsageError as e:
        print(f"sorani-ner: error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"sorani-ner: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
