"""Tagging metrics, cross-validation statistics, paired t-tests, Cohen's kappa.

Token-level per-tag precision/recall/F1 is the primary report; span-level
exact-match metrics (per entity type) are available as a separately labeled
mode.  Aggregates exclude the O tag unless include_o is set, since O
dominates token counts.  The micro aggregate pools TP/FP/FN over the included
tags; the macro aggregate averages per-tag scores unweighted.

The paired t-test converts t to a two-sided p-value through a local
implementation of the regularized incomplete beta function (continued
fraction, modified Lentz evaluation), so no statistics package or table is
needed at runtime.
"""

from __future__ import annotations

import json
import math
import statistics
from collections import Counter
from dataclasses import dataclass
from collections.abc import Callable, Sequence

from .corpus import Corpus, DEFAULT_SCHEME, TagScheme, split_kfold
from .validation import DataError, NumericalError

REPORT_FORMAT_VERSION = 1

TagSequences = list[list[str]]
Trainer = Callable[[Corpus, Corpus], TagSequences]


def f1(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if not (0.0 <= precision <= 1.0 and 0.0 <= recall <= 1.0):
        raise ValueError("precision and recall must lie in [0, 1]")
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class TagMetrics:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "TagMetrics":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        return cls(tp, fp, fn, precision, recall, f1(precision, recall))


@dataclass(frozen=True)
class MacroMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class TagReport:
    """Per-key metrics plus micro/macro aggregates.

    Keys are BIO tags in granularity "token", entity types in "span".
    """

    per_tag: dict[str, TagMetrics]
    micro: TagMetrics
    macro: MacroMetrics
    granularity: str
    include_o: bool


@dataclass(frozen=True)
class CvReport:
    folds: tuple[TagReport, ...]
    mean_precision: float
    mean_recall: float
    mean_f1: float
    std_precision: float
    std_recall: float
    std_f1: float
    best_fold: int


@dataclass(frozen=True)
class KappaReport:
    observed_agreement: float
    expected_agreement: float
    kappa: float


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: int


def _as_tag_sequences(source: Corpus | Sequence[Sequence[str]]) -> TagSequences:
    if isinstance(source, Corpus):
        return source.tag_sequences()
    return [list(s) for s in source]


def _aggregate(counts: dict[str, list[int]], keys: list[str]) -> tuple[dict[str, TagMetrics], TagMetrics, MacroMetrics]:
    per_tag = {key: TagMetrics.from_counts(*counts.get(key, [0, 0, 0])) for key in keys}
    pooled = [sum(counts.get(k, [0, 0, 0])[i] for k in keys) for i in range(3)]
    micro = TagMetrics.from_counts(*pooled)
    macro = MacroMetrics(
        statistics.fmean(m.precision for m in per_tag.values()) if per_tag else 0.0,
        statistics.fmean(m.recall for m in per_tag.values()) if per_tag else 0.0,
        statistics.fmean(m.f1 for m in per_tag.values()) if per_tag else 0.0,
    )
    return per_tag, micro, macro


def tag_metrics(gold: Corpus | Sequence[Sequence[str]], pred: Sequence[Sequence[str]],
                *, include_o: bool = False, scheme: TagScheme = DEFAULT_SCHEME) -> TagReport:
    """Token-level counting: a position scores TP for its gold tag when the
    prediction matches, otherwise FP for the predicted tag and FN for the gold.
    """
    gold_tags = _as_tag_sequences(gold)
    if len(gold_tags) != len(pred):
        raise DataError(f"gold has {len(gold_tags)} sentences, predictions {len(pred)}")
    counts: dict[str, list[int]] = {}
    for n, (g_sent, p_sent) in enumerate(zip(gold_tags, pred)):
        if len(g_sent) != len(p_sent):
            raise DataError(f"sentence {n + 1}: gold has {len(g_sent)} tokens, "
                            f"prediction has {len(p_sent)}")
        for g, p in zip(g_sent, p_sent):
            if g not in scheme or p not in scheme:
                raise DataError(f"sentence {n + 1}: tag outside the scheme: "
                                f"{(g if g not in scheme else p)!r}")
            if g == p:
                counts.setdefault(g, [0, 0, 0])[0] += 1
            else:
                counts.setdefault(p, [0, 0, 0])[1] += 1
                counts.setdefault(g, [0, 0, 0])[2] += 1
    keys = [t for t in scheme.label_strings if include_o or t != "O"]
    per_tag, micro, macro = _aggregate(counts, keys)
    return TagReport(per_tag, micro, macro, "token", include_o)


def extract_spans(tags: Sequence[str]) -> set[tuple[int, int, str]]:
    """(start, end-exclusive, entity) triples; a stray I-X opens a new span."""
    spans = set()
    start = None
    entity = None
    for i, tag in enumerate(tags):
        kind, _, ent = tag.partition("-")
        if kind in ("B", "I") and ent:
            if start is not None and (kind == "B" or ent != entity):
                spans.add((start, i, entity))
                start = None
            if start is None:
                start, entity = i, ent
        else:
            if start is not None:
                spans.add((start, i, entity))
                start = None
    if start is not None:
        spans.add((start, len(tags), entity))
    return spans


def span_metrics(gold: Corpus | Sequence[Sequence[str]], pred: Sequence[Sequence[str]],
                 *, scheme: TagScheme = DEFAULT_SCHEME) -> TagReport:
    """Exact-match entity spans, keyed by entity type.  include_o is moot here."""
    gold_tags = _as_tag_sequences(gold)
    if len(gold_tags) != len(pred):
        raise DataError(f"gold has {len(gold_tags)} sentences, predictions {len(pred)}")
    counts: dict[str, list[int]] = {}
    for n, (g_sent, p_sent) in enumerate(zip(gold_tags, pred)):
        if len(g_sent) != len(p_sent):
            raise DataError(f"sentence {n + 1}: gold has {len(g_sent)} tokens, "
                            f"prediction has {len(p_sent)}")
        g_spans = extract_spans(g_sent)
        p_spans = extract_spans(p_sent)
        for span in g_spans & p_spans:
            counts.setdefault(span[2], [0, 0, 0])[0] += 1
        for span in p_spans - g_spans:
            counts.setdefault(span[2], [0, 0, 0])[1] += 1
        for span in g_spans - p_spans:
            counts.setdefault(span[2], [0, 0, 0])[2] += 1
    per_tag, micro, macro = _aggregate(counts, list(scheme.entity_types))
    return TagReport(per_tag, micro, macro, "span", False)


def cross_validate(corpus: Corpus, trainer: Trainer, k: int, seed: int,
                   *, include_o: bool = False,
                   scheme: TagScheme = DEFAULT_SCHEME) -> CvReport:
    """k-fold evaluation: trainer(train, test) returns test predictions.

    Fold reports keep the fold order of split_kfold; the aggregate rows carry
    the mean and sample (n-1) standard deviation of the micro scores, and
    best_fold is the 1-based index of the highest micro F1 (first on ties).
    """
    reports = []
    for i, (train, test) in enumerate(split_kfold(corpus, k, seed)):
        try:
            predictions = trainer(train, test)
        except NumericalError as e:
            raise NumericalError(f"fold {i + 1}: {e}") from e
        except DataError as e:
            raise DataError(f"fold {i + 1}: {e}") from e
        except Exception as e:
            raise RuntimeError(f"fold {i + 1}: {e}") from e
        reports.append(tag_metrics(test, predictions, include_o=include_o, scheme=scheme))

    def spread(values: list[float]) -> tuple[float, float]:
        return statistics.fmean(values), (statistics.stdev(values) if len(values) > 1 else 0.0)

    precisions = [r.micro.precision for r in reports]
    recalls = [r.micro.recall for r in reports]
    f1s = [r.micro.f1 for r in reports]
    mean_p, std_p = spread(precisions)
    mean_r, std_r = spread(recalls)
    mean_f, std_f = spread(f1s)
    best = max(range(len(f1s)), key=lambda i: (f1s[i], -i)) + 1
    return CvReport(tuple(reports), mean_p, mean_r, mean_f, std_p, std_r, std_f, best)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta, modified Lentz evaluation."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 301):
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
        if abs(delta - 1.0) < 1e-14:
            return h
    raise NumericalError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), accurate to about 1e-10 over the t-test parameter range."""
    if not (a > 0 and b > 0):
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                     + a * math.log(x) + b * math.log1p(-x))
    # The continued fraction converges fast only on one side of the mean;
    # use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the other.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def paired_ttest(scores_a: Sequence[float], scores_b: Sequence[float]) -> TTestResult:
    """Two-sided paired t-test on per-fold score differences.

    All-zero differences give (t=0, p=1); zero variance with nonzero mean
    saturates to (t=+/-inf, p=0).
    """
    if len(scores_a) != len(scores_b):
        raise ValueError(f"score lists differ in length: {len(scores_a)} vs {len(scores_b)}")
    n = len(scores_a)
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    diffs = [x - y for x, y in zip(scores_a, scores_b)]
    df = n - 1
    if all(d == 0.0 for d in diffs):
        return TTestResult(0.0, 1.0, df)
    mean = statistics.fmean(diffs)
    sd = statistics.stdev(diffs)
    if sd == 0.0:
        return TTestResult(math.copysign(math.inf, mean), 0.0, df)
    t = mean / (sd / math.sqrt(n))
    p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
    return TTestResult(t, min(max(p, 0.0), 1.0), df)


def cohen_kappa(ann_a: Sequence[str], ann_b: Sequence[str]) -> KappaReport:
    """Chance-corrected agreement between two annotations of the same tokens."""
    if len(ann_a) != len(ann_b):
        raise DataError(f"annotations differ in length: {len(ann_a)} vs {len(ann_b)}")
    if not ann_a:
        raise DataError("annotations are empty")
    a = [str(t) for t in ann_a]
    b = [str(t) for t in ann_b]
    n = len(a)
    margin_a = Counter(a)
    margin_b = Counter(b)
    expected = sum(margin_a[label] * margin_b.get(label, 0) for label in margin_a) / (n * n)
    if a == b:
        return KappaReport(1.0, expected, 1.0)
    observed = sum(x == y for x, y in zip(a, b)) / n
    return KappaReport(observed, expected, (observed - expected) / (1.0 - expected))


# --- report rendering ---------------------------------------------------

def _meta(kind: str, **extra) -> dict:
    return {"record": "meta", "format": "sorani-ner-report",
            "version": REPORT_FORMAT_VERSION, "kind": kind, **extra}


def tag_report_records(report: TagReport) -> list[dict]:
    records = [_meta("tag-report", granularity=report.granularity,
                     include_o=report.include_o)]
    for tag, m in report.per_tag.items():
        records.append({"record": "tag", "tag": tag, "tp": m.tp, "fp": m.fp, "fn": m.fn,
                        "precision": m.precision, "recall": m.recall, "f1": m.f1})
    m = report.micro
    records.append({"record": "micro", "tp": m.tp, "fp": m.fp, "fn": m.fn,
                    "precision": m.precision, "recall": m.recall, "f1": m.f1})
    records.append({"record": "macro", "precision": report.macro.precision,
                    "recall": report.macro.recall, "f1": report.macro.f1})
    return records


def cv_report_records(report: CvReport) -> list[dict]:
    records = [_meta("crossval", k=len(report.folds))]
    for i, fold in enumerate(report.folds):
        records.append({"record": "fold", "fold": i + 1,
                        "precision": fold.micro.precision,
                        "recall": fold.micro.recall, "f1": fold.micro.f1})
    records.append({"record": "aggregate",
                    "mean_precision": report.mean_precision, "std_precision": report.std_precision,
                    "mean_recall": report.mean_recall, "std_recall": report.std_recall,
                    "mean_f1": report.mean_f1, "std_f1": report.std_f1,
                    "best_fold": report.best_fold})
    return records


def kappa_report_records(report: KappaReport) -> list[dict]:
    return [_meta("agreement"),
            {"record": "kappa", "observed": report.observed_agreement,
             "expected": report.expected_agreement, "kappa": report.kappa}]


def ttest_records(result: TTestResult) -> list[dict]:
    return [_meta("ttest"), {"record": "ttest", "t": result.t, "p": result.p, "df": result.df}]


def to_ndjson(records: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def _metric_row(name: str, m: TagMetrics) -> str:
    return f"{name:<12} {m.tp:>6} {m.fp:>6} {m.fn:>6} {m.precision:10.4f} {m.recall:10.4f} {m.f1:10.4f}"


def tag_report_table(report: TagReport) -> str:
    lines = [f"{'tag' if report.granularity == 'token' else 'entity':<12} "
             f"{'tp':>6} {'fp':>6} {'fn':>6} {'precision':>10} {'recall':>10} {'f1':>10}"]
    for tag, m in report.per_tag.items():
        lines.append(_metric_row(tag, m))
    lines.append(_metric_row("micro", report.micro))
    lines.append(f"{'macro':<12} {'-':>6} {'-':>6} {'-':>6} {report.macro.precision:10.4f} "
                 f"{report.macro.recall:10.4f} {report.macro.f1:10.4f}")
    return "\n".join(lines)


def cv_report_table(report: CvReport) -> str:
    lines = [f"{'fold':<6} {'precision':>10} {'recall':>10} {'f1':>10}"]
    for i, fold in enumerate(report.folds):
        m = fold.micro
        lines.append(f"{i + 1:<6} {m.precision:10.4f} {m.recall:10.4f} {m.f1:10.4f}")
    lines.append(f"mean   {report.mean_precision:10.4f} {report.mean_recall:10.4f} "
                 f"{report.mean_f1:10.4f}")
    lines.append(f"std    {report.std_precision:10.4f} {report.std_recall:10.4f} "
                 f"{report.std_f1:10.4f}")
    lines.append(f"best fold: {report.best_fold}")
    return "\n".join(lines)


def kappa_report_table(report: KappaReport) -> str:
    return "\n".join([
        f"observed agreement: {report.observed_agreement:.4f}",
        f"expected agreement: {report.expected_agreement:.4f}",
        f"kappa: {report.kappa:.4f}",
    ])


def ttest_table(result: TTestResult) -> str:
    return f"t = {result.t:.4f}, df = {result.df}, p = {result.p:.6g}"
