"""Single-file model bundles: tokenizer profile, vocabulary, optional PCA,
trained model, decision threshold, and training metadata.

Bundles are canonical JSON (sorted keys, two-space indent, shortest
round-trip float decimals), so save -> load -> save is byte-stable and a
retrain with the same seed reproduces the file exactly. Creation time is
only recorded when SOURCE_DATE_EPOCH is set; a wall clock would break
byte-identical reruns.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classifiers import model_from_dict, model_to_dict, train_model
from .corpus import Corpus
from .errors import ConfigError
from .eval import PipelineConfig, _tuning_subset_positions, tune_threshold
from .linalg import PcaModel, pca_ceiling, pca_fit, pca_transform
from .resample import smote_resample
from .seeding import derive_seed
from .text import (
    Vocabulary,
    fit_vocabulary,
    get_tokenizer_profile,
    tokenize,
    transform,
)

FORMAT_VERSION = 1


@dataclass
class ModelBundle:
    tokenizer: str
    vocabulary: Vocabulary
    pca: PcaModel | None
    model: object
    threshold: float
    metadata: dict
    format_version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        pca = None
        if self.pca is not None:
            pca = {
                "mean": [float(v) for v in self.pca.mean],
                "components": [[float(v) for v in row] for row in self.pca.components],
                "explained_variance": [float(v) for v in self.pca.explained_variance],
            }
        return {
            "format_version": self.format_version,
            "tokenizer": self.tokenizer,
            "vocabulary": list(self.vocabulary.ordered_tokens),
            "pca": pca,
            "model": model_to_dict(self.model),
            "threshold": float(self.threshold),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelBundle":
        version = d.get("format_version")
        if version != FORMAT_VERSION:
            raise ConfigError(
                f"unsupported bundle format_version {version!r}; expected {FORMAT_VERSION}"
            )
        pca = None
        if d.get("pca") is not None:
            p = d["pca"]
            pca = PcaModel(
                mean=np.array(p["mean"], dtype=np.float64),
                components=np.array(p["components"], dtype=np.float64),
                explained_variance=np.array(p["explained_variance"], dtype=np.float64),
            )
        return cls(
            tokenizer=d["tokenizer"],
            vocabulary=Vocabulary(ordered_tokens=tuple(d["vocabulary"])),
            pca=pca,
            model=model_from_dict(d["model"]),
            threshold=float(d["threshold"]),
            metadata=dict(d["metadata"]),
            format_version=version,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ModelBundle":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    # ------------------------------------------------------------- scoring

    def score_texts(self, texts) -> np.ndarray:
        profile = get_tokenizer_profile(self.tokenizer)
        docs = [tokenize(t, profile) for t in texts]
        X = transform(docs, self.vocabulary).counts.astype(np.float64)
        if self.pca is not None:
            X = pca_transform(self.pca, X)
        return self.model.score(X)

    def predict_texts(self, texts):
        scores = self.score_texts(texts)
        labels = ["flaky" if s >= self.threshold else "nonflaky" for s in scores]
        return scores, labels


def _creation_stamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    return int(epoch) if epoch is not None else None


def train_bundle(corpus: Corpus, config: PipelineConfig, seed: int = 0) -> ModelBundle:
    """Train on the full corpus (no held-out fold) and package the result.

    Threshold tuning, when requested, scores a seeded stratified 20%
    subset of the corpus; the model itself always trains on every row.
    """
    profile = get_tokenizer_profile(config.tokenizer)
    docs = [tokenize(e.text, profile) for e in corpus]
    y = corpus.labels()
    vocab = fit_vocabulary(docs)
    X_counts = transform(docs, vocab, row_ids=corpus.ids()).counts.astype(np.float64)

    if config.smote:
        resampled = smote_resample(
            X_counts, y, config.smote_k, seed=derive_seed(seed, "smote", "full")
        )
        X_fit, y_fit = resampled.X, resampled.y
        smote_synthetic = resampled.n_synthetic
    else:
        X_fit, y_fit = X_counts, y
        smote_synthetic = 0

    pca_model = None
    pca_effective = None
    X_fit_model = X_fit
    if config.pca_components is not None:
        pca_effective = min(
            config.pca_components, pca_ceiling(X_fit.shape[0], X_fit.shape[1])
        )
        pca_model = pca_fit(X_fit, pca_effective)
        X_fit_model = pca_transform(pca_model, X_fit)

    model = train_model(
        config.family,
        X_fit_model,
        y_fit,
        config.hyperparameters,
        seed=derive_seed(seed, "model", "full"),
    )

    threshold = config.threshold.value
    curve_grid = None
    if config.threshold.mode == "tuned":
        positions = _tuning_subset_positions(y, seed, "full")
        X_tune = X_counts[positions]
        if pca_model is not None:
            X_tune = pca_transform(pca_model, X_tune)
        curve = tune_threshold(
            model.score(X_tune), y[positions], config.threshold.grid_step
        )
        threshold = curve.best_threshold
        curve_grid = [[t, f1] for t, f1 in curve.grid]

    metadata = {
        "family": config.family,
        "profile": config.profile_name,
        "hyperparameters": dict(config.hyperparameters),
        "seed": seed,
        "corpus_hash": corpus.content_hash(),
        "class_counts": {k.value: v for k, v in corpus.class_counts.items()},
        "smote": config.smote,
        "smote_synthetic": smote_synthetic,
        "pca_requested": config.pca_components,
        "pca_effective": pca_effective,
        "threshold_mode": config.threshold.mode,
        "threshold_curve": curve_grid,
        "created_at": _creation_stamp(),
    }
    return ModelBundle(
        tokenizer=config.tokenizer,
        vocabulary=vocab,
        pca=pca_model,
        model=model,
        threshold=threshold,
        metadata=metadata,
    )
