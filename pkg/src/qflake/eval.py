"""Metrics, threshold tuning, stratified cross-validation, and grid search.

The flaky class is the positive class throughout. Metrics whose
denominator is zero are defined as 0 and flagged rather than propagating
NaN into result tables. Fold aggregates report the mean and population
standard deviation (divide by n_folds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .classifiers import get_profile, predict_labels, train_model
from .corpus import Corpus, stratified_folds
from .errors import (
    ConfigError,
    EmptyGridError,
    EmptyInputError,
    EmptyMatrixError,
    LengthMismatchError,
)
from .linalg import pca_ceiling, pca_fit, pca_transform
from .resample import smote_resample
from .seeding import STREAM_TUNE_SPLIT, derive_seed, rng_for
from .text import fit_vocabulary, get_tokenizer_profile, tokenize, transform

METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "mcc")

THRESHOLD_GRID_LO = 0.1
THRESHOLD_GRID_HI = 0.9
TUNE_FRACTION = 0.2


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true).astype(np.int8)
    y_pred = np.asarray(y_pred).astype(np.int8)
    if y_true.shape != y_pred.shape:
        raise LengthMismatchError(
            f"y_true has {y_true.shape} entries, y_pred has {y_pred.shape}"
        )
    tp = int(((y_true == 1) & (y_pred == 1)).sum())
    fp = int(((y_true == 0) & (y_pred == 1)).sum())
    fn = int(((y_true == 1) & (y_pred == 0)).sum())
    tn = int(((y_true == 0) & (y_pred == 0)).sum())
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    mcc: float
    flags: frozenset[str] = frozenset()

    def values(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def compute_metrics(cm: ConfusionMatrix) -> MetricReport:
    """Five metrics from a confusion matrix, with zero denominators
    yielding 0 and a flag naming the metric.
    """
    total = cm.total
    if total == 0:
        raise EmptyMatrixError("confusion matrix counts sum to zero")
    flags = set()
    accuracy = (cm.tp + cm.tn) / total

    if cm.tp + cm.fp == 0:
        precision = 0.0
        flags.add("precision")
    else:
        precision = cm.tp / (cm.tp + cm.fp)

    if cm.tp + cm.fn == 0:
        recall = 0.0
        flags.add("recall")
    else:
        recall = cm.tp / (cm.tp + cm.fn)

    if precision + recall == 0:
        f1 = 0.0
        flags.add("f1")
    else:
        f1 = 2.0 * precision * recall / (precision + recall)

    denom = (cm.tp + cm.fp) * (cm.tp + cm.fn) * (cm.tn + cm.fp) * (cm.tn + cm.fn)
    if denom == 0:
        mcc = 0.0
        flags.add("mcc")
    else:
        mcc = (cm.tp * cm.tn - cm.fp * cm.fn) / math.sqrt(denom)

    return MetricReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        mcc=mcc,
        flags=frozenset(flags),
    )


@dataclass(frozen=True)
class ThresholdCurve:
    grid: tuple[tuple[float, float], ...]  # (threshold, f1), thresholds increasing
    best_threshold: float

    def f1_at(self, threshold: float) -> float:
        for t, f1 in self.grid:
            if abs(t - threshold) < 1e-9:
                return f1
        raise KeyError(f"threshold {threshold} not on the grid")

    @property
    def best_f1(self) -> float:
        return self.f1_at(self.best_threshold)


def tune_threshold(scores, y_true, grid_step: float = 0.1) -> ThresholdCurve:
    """Sweep thresholds over [0.1, 0.9]; best = max F1, ties to the lowest
    threshold. 0.5 is always a grid member at the default step.
    """
    scores = np.asarray(scores, dtype=np.float64)
    y_true = np.asarray(y_true).astype(np.int8)
    if scores.size == 0:
        raise EmptyInputError("no scores to tune on")
    if scores.shape != y_true.shape:
        raise LengthMismatchError("scores and y_true differ in length")
    span = THRESHOLD_GRID_HI - THRESHOLD_GRID_LO
    steps = span / grid_step
    if abs(steps - round(steps)) > 1e-9:
        raise ConfigError(f"grid_step {grid_step} does not divide the span {span}")
    n_points = int(round(steps)) + 1
    grid = []
    best_t = None
    best_f1 = -1.0
    for i in range(n_points):
        t = round(THRESHOLD_GRID_LO + i * grid_step, 10)
        report = compute_metrics(confusion(y_true, predict_labels(scores, t)))
        grid.append((t, report.f1))
        if report.f1 > best_f1:
            best_f1 = report.f1
            best_t = t
    return ThresholdCurve(grid=tuple(grid), best_threshold=best_t)


@dataclass(frozen=True)
class ThresholdPolicy:
    """Either a fixed cutoff or a tuned sweep over the 0.1-0.9 grid."""

    mode: str  # "fixed" | "tuned"
    value: float = 0.5
    grid_step: float = 0.1

    def __post_init__(self):
        if self.mode not in ("fixed", "tuned"):
            raise ConfigError(f"threshold mode must be fixed or tuned, got {self.mode!r}")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything one cross-validated pipeline run needs.

    ``fit_vocab_on_all`` switches vocabulary fitting from the training
    folds (leak-free default) to the whole dataset; ``tune_on_eval_fold``
    switches threshold tuning from an inner training split to the
    evaluation fold. Both replicate the reference protocol when enabled.
    """

    family: str
    hyperparameters: dict = field(hash=False)
    pca_components: int | None = None
    smote: bool = False
    smote_k: int = 5
    threshold: ThresholdPolicy = ThresholdPolicy(mode="fixed")
    tokenizer: str = "default"
    fit_vocab_on_all: bool = False
    tune_on_eval_fold: bool = False
    profile_name: str | None = None

    @classmethod
    def from_profile(
        cls,
        family: str,
        profile: str,
        smote: bool = False,
        threshold: ThresholdPolicy | None = None,
        **kwargs,
    ) -> "PipelineConfig":
        builtin = get_profile(family, profile)
        return cls(
            family=family,
            hyperparameters=builtin.hyperparameters,
            pca_components=builtin.pca_components,
            smote=smote,
            threshold=threshold or ThresholdPolicy(mode="fixed"),
            profile_name=builtin.name,
            **kwargs,
        )


@dataclass(frozen=True)
class FoldResult:
    fold: int
    report: MetricReport
    cm: ConfusionMatrix
    threshold: float
    threshold_curve: ThresholdCurve | None
    n_train: int
    n_eval: int
    vocab_size: int
    pca_requested: int | None
    pca_effective: int | None
    smote_synthetic: int


@dataclass(frozen=True)
class AggregateReport:
    mean: dict[str, float]
    std: dict[str, float]
    flags: frozenset[str] = frozenset()


def aggregate_reports(reports) -> AggregateReport:
    """Per-metric mean and population std (divide by the fold count)."""
    reports = list(reports)
    mean = {}
    std = {}
    flags = set()
    for name in METRIC_NAMES:
        vals = np.array([getattr(r, name) for r in reports], dtype=np.float64)
        mean[name] = float(vals.mean())
        std[name] = float(vals.std())
    for r in reports:
        flags |= r.flags
    return AggregateReport(mean=mean, std=std, flags=frozenset(flags))


@dataclass(frozen=True)
class CrossValResult:
    config: PipelineConfig
    n_folds: int
    seed: int
    folds: tuple[FoldResult, ...]
    aggregate: AggregateReport


def _tuning_subset_positions(y_train: np.ndarray, seed: int, fold: int) -> np.ndarray:
    """Seeded stratified ~20% of the training-fold rows, by position."""
    picked = []
    for class_idx, label in enumerate((1, 0)):
        positions = np.flatnonzero(y_train == label)
        take = max(1, int(round(TUNE_FRACTION * len(positions))))
        rng = rng_for(derive_seed(seed, "tune", fold), STREAM_TUNE_SPLIT, class_idx)
        order = rng.permutation(len(positions))
        picked.extend(positions[order[:take]])
    return np.sort(np.array(picked, dtype=np.int64))


def _select_threshold(
    config: PipelineConfig,
    model,
    X_train_counts,
    y_train,
    pca_model,
    eval_scores,
    y_eval,
    seed: int,
    fold: int,
):
    """Returns (threshold, curve or None) per the config's policy."""
    policy = config.threshold
    if policy.mode == "fixed":
        return policy.value, None
    if config.tune_on_eval_fold:
        curve = tune_threshold(eval_scores, y_eval, policy.grid_step)
        return curve.best_threshold, curve
    positions = _tuning_subset_positions(y_train, seed, fold)
    X_tune = X_train_counts[positions]
    if pca_model is not None:
        X_tune = pca_transform(pca_model, X_tune)
    curve = tune_threshold(model.score(X_tune), y_train[positions], policy.grid_step)
    return curve.best_threshold, curve


def cross_validate(
    corpus: Corpus, config: PipelineConfig, n_folds: int = 5, seed: int = 0
) -> CrossValResult:
    """Stratified k-fold evaluation of one pipeline configuration.

    Per fold: fit vocabulary (training folds only, unless configured
    otherwise), vectorize, SMOTE the training rows when enabled, then fit
    PCA on the (possibly resampled) training rows when enabled - SMOTE
    always runs before PCA - train the model, score the held-out fold,
    resolve the decision threshold, and compute metrics.
    """
    folds = stratified_folds(corpus, n_folds, seed)
    tok_profile = get_tokenizer_profile(config.tokenizer)
    docs = {e.id: tokenize(e.text, tok_profile) for e in corpus}
    labels = {e.id: 1 if e.label.value == "flaky" else 0 for e in corpus}
    all_ids = corpus.ids()

    fold_results = []
    for f in range(n_folds):
        train_ids = [i for i in all_ids if folds.assignment[i] != f]
        eval_ids = [i for i in all_ids if folds.assignment[i] == f]
        vocab_ids = all_ids if config.fit_vocab_on_all else train_ids
        vocab = fit_vocabulary([docs[i] for i in vocab_ids])
        X_train = transform(
            [docs[i] for i in train_ids], vocab, row_ids=train_ids
        ).counts.astype(np.float64)
        X_eval = transform(
            [docs[i] for i in eval_ids], vocab, row_ids=eval_ids
        ).counts.astype(np.float64)
        y_train = np.array([labels[i] for i in train_ids], dtype=np.int8)
        y_eval = np.array([labels[i] for i in eval_ids], dtype=np.int8)

        smote_synthetic = 0
        if config.smote:
            resampled = smote_resample(
                X_train, y_train, config.smote_k, seed=derive_seed(seed, "smote", f)
            )
            X_fit, y_fit = resampled.X, resampled.y
            smote_synthetic = resampled.n_synthetic
        else:
            X_fit, y_fit = X_train, y_train

        pca_model = None
        pca_effective = None
        X_fit_model = X_fit
        X_eval_model = X_eval
        if config.pca_components is not None:
            ceiling = pca_ceiling(X_fit.shape[0], X_fit.shape[1])
            pca_effective = min(config.pca_components, ceiling)
            pca_model = pca_fit(X_fit, pca_effective)
            X_fit_model = pca_transform(pca_model, X_fit)
            X_eval_model = pca_transform(pca_model, X_eval)

        model = train_model(
            config.family,
            X_fit_model,
            y_fit,
            config.hyperparameters,
            seed=derive_seed(seed, "model", f),
        )
        eval_scores = model.score(X_eval_model)
        threshold, curve = _select_threshold(
            config, model, X_train, y_train, pca_model, eval_scores, y_eval, seed, f
        )
        cm = confusion(y_eval, predict_labels(eval_scores, threshold))
        fold_results.append(
            FoldResult(
                fold=f,
                report=compute_metrics(cm),
                cm=cm,
                threshold=threshold,
                threshold_curve=curve,
                n_train=len(train_ids),
                n_eval=len(eval_ids),
                vocab_size=len(vocab),
                pca_requested=config.pca_components,
                pca_effective=pca_effective,
                smote_synthetic=smote_synthetic,
            )
        )
    return CrossValResult(
        config=config,
        n_folds=n_folds,
        seed=seed,
        folds=tuple(fold_results),
        aggregate=aggregate_reports([fr.report for fr in fold_results]),
    )


@dataclass(frozen=True)
class GridSearchResult:
    best_params: dict = field(hash=False)
    best_mean_f1: float
    results: tuple[tuple[dict, float], ...] = field(hash=False)
    per_fold_choices: tuple[dict, ...] | None = None  # nested mode only


def _config_for_point(base: PipelineConfig, point: dict) -> PipelineConfig:
    """A grid point may carry 'pca_components' alongside model hyperparameters."""
    point = dict(point)
    pca = point.pop("pca_components", base.pca_components)
    return replace(base, hyperparameters=point, pca_components=pca)


def grid_search(
    corpus: Corpus,
    family: str,
    param_grid,
    n_folds: int = 5,
    seed: int = 0,
    base_config: PipelineConfig | None = None,
) -> GridSearchResult:
    """Flat grid search: every point is scored by cross-validated mean F1
    on the same folds; ties go to the first point in declared order.
    """
    grid = [dict(p) for p in param_grid]
    if not grid:
        raise EmptyGridError("parameter grid is empty")
    base = base_config or PipelineConfig(family=family, hyperparameters={})
    results = []
    best_idx = 0
    best_f1 = -1.0
    for idx, point in enumerate(grid):
        config = _config_for_point(base, point)
        outcome = cross_validate(corpus, config, n_folds=n_folds, seed=seed)
        mean_f1 = outcome.aggregate.mean["f1"]
        results.append((point, mean_f1))
        if mean_f1 > best_f1:
            best_f1 = mean_f1
            best_idx = idx
    return GridSearchResult(
        best_params=grid[best_idx],
        best_mean_f1=best_f1,
        results=tuple(results),
    )


def nested_grid_search(
    corpus: Corpus,
    family: str,
    param_grid,
    n_folds: int = 5,
    inner_folds: int = 3,
    seed: int = 0,
    base_config: PipelineConfig | None = None,
) -> tuple[AggregateReport, GridSearchResult]:
    """Nested CV: per outer fold, pick the grid point by inner-CV F1 on the
    training portion, evaluate it on the outer fold, and aggregate. Gives
    an honest estimate for tuned pipelines at extra cost.
    """
    grid = [dict(p) for p in param_grid]
    if not grid:
        raise EmptyGridError("parameter grid is empty")
    base = base_config or PipelineConfig(family=family, hyperparameters={})
    folds = stratified_folds(corpus, n_folds, seed)
    all_ids = corpus.ids()
    outer_reports = []
    choices = []
    for f in range(n_folds):
        train_ids = [i for i in all_ids if folds.assignment[i] != f]
        inner_corpus = corpus.subset(train_ids)
        inner = grid_search(
            inner_corpus,
            family,
            grid,
            n_folds=inner_folds,
            seed=derive_seed(seed, "nested", f),
            base_config=base,
        )
        choices.append(inner.best_params)
        config = _config_for_point(base, inner.best_params)
        # evaluate the chosen point on this outer fold only
        outcome = cross_validate(corpus, config, n_folds=n_folds, seed=seed)
        outer_reports.append(outcome.folds[f].report)
    aggregate = aggregate_reports(outer_reports)
    flat = grid_search(corpus, family, grid, n_folds=n_folds, seed=seed, base_config=base)
    return aggregate, GridSearchResult(
        best_params=flat.best_params,
        best_mean_f1=flat.best_mean_f1,
        results=flat.results,
        per_fold_choices=tuple(choices),
    )
