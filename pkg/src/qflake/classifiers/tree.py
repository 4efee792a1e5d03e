"""Decision trees: impurity measures, greedy growth, and prediction.

Split candidates are midpoints between consecutive distinct sorted values
of each feature; the winning split maximizes impurity decrease with ties
broken by (lower feature index, lower threshold). The split search is
vectorized across features: one stable argsort per node, prefix label
counts, and an impurity evaluation over every boundary at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptySetError, SpecInvalidError
from .base import check_scoring_input, check_training_data, validate_params

_GAIN_EPS = 1e-12

CRITERIA = ("entropy", "gini")


def impurity(labels, criterion: str) -> float:
    """Entropy (bits) or Gini impurity of a label multiset."""
    if criterion not in CRITERIA:
        raise SpecInvalidError(f"criterion must be one of {CRITERIA}, got {criterion!r}")
    labels = np.asarray(list(labels))
    if labels.size == 0:
        raise EmptySetError("impurity of an empty multiset is undefined")
    _, counts = np.unique(labels, return_counts=True)
    p = counts / counts.sum()
    if criterion == "entropy":
        return float(-(p * np.log2(p)).sum())
    return float(1.0 - (p**2).sum())


@dataclass
class TreeNode:
    """Internal node (feature/threshold/left/right) or leaf.

    Classification leaves carry ``distribution`` (nonflaky, flaky)
    fractions; regression leaves used by boosting carry ``value``.
    Rows with feature <= threshold go left.
    """

    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    distribution: tuple[float, float] | None = None
    value: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            if self.distribution is not None:
                return {"dist": [float(self.distribution[0]), float(self.distribution[1])]}
            return {"value": float(self.value)}
        return {
            "feature": int(self.feature),
            "threshold": float(self.threshold),
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeNode":
        if "feature" in d:
            return cls(
                feature=int(d["feature"]),
                threshold=float(d["threshold"]),
                left=cls.from_dict(d["left"]),
                right=cls.from_dict(d["right"]),
            )
        if "dist" in d:
            return cls(distribution=(float(d["dist"][0]), float(d["dist"][1])))
        return cls(value=float(d["value"]))


def tree_depth(node: TreeNode) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def _fill_predictions(node: TreeNode, X, idx, out, leaf_value):
    if node.is_leaf:
        out[idx] = leaf_value(node)
        return
    go_left = X[idx, node.feature] <= node.threshold
    _fill_predictions(node.left, X, idx[go_left], out, leaf_value)
    _fill_predictions(node.right, X, idx[~go_left], out, leaf_value)


def tree_predict_proba(node: TreeNode, X) -> np.ndarray:
    """Per-row flaky-class probability from leaf distributions."""
    out = np.empty(X.shape[0], dtype=np.float64)
    _fill_predictions(node, X, np.arange(X.shape[0]), out, lambda n: n.distribution[1])
    return out


def tree_predict_value(node: TreeNode, X) -> np.ndarray:
    """Per-row regression output from leaf values (boosting trees)."""
    out = np.empty(X.shape[0], dtype=np.float64)
    _fill_predictions(node, X, np.arange(X.shape[0]), out, lambda n: n.value)
    return out


def _impurity_from_fraction(p, criterion: str):
    # p: array of flaky fractions; 0*log2(0) treated as 0
    p = np.asarray(p, dtype=np.float64)
    q = 1.0 - p
    if criterion == "entropy":
        out = np.zeros_like(p)
        for frac in (p, q):
            nz = frac > 0
            out[nz] -= frac[nz] * np.log2(frac[nz])
        return out
    return 1.0 - p**2 - q**2


def best_class_split(X, y, idx, feature_ids, criterion, min_samples_leaf):
    """Best (feature, threshold) by impurity decrease over rows ``idx`` of
    the given columns, or None when no admissible split improves on the
    parent. Gathers only the needed (row, column) block, which matters
    when forests sample a thin column subset per split.
    """
    n = len(idx)
    if n < 2:
        return None
    Xf = X[np.ix_(idx, feature_ids)]
    yn = y[idx]
    order = np.argsort(Xf, axis=0, kind="stable")
    sv = np.take_along_axis(Xf, order, axis=0)
    sy = yn[order].astype(np.float64)

    pos_prefix = np.cumsum(sy, axis=0)
    left_n = np.arange(1, n, dtype=np.float64)[:, None]
    right_n = n - left_n
    left_pos = pos_prefix[:-1]
    total_pos = float(yn.sum())
    right_pos = total_pos - left_pos

    parent = float(_impurity_from_fraction(np.array([total_pos / n]), criterion)[0])
    child = (
        left_n * _impurity_from_fraction(left_pos / left_n, criterion)
        + right_n * _impurity_from_fraction(right_pos / right_n, criterion)
    ) / n
    gain = parent - child

    valid = (
        (sv[1:] > sv[:-1])
        & (left_n >= min_samples_leaf)
        & (right_n >= min_samples_leaf)
    )
    gain = np.where(valid, gain, -np.inf)
    best = gain.max()
    if not np.isfinite(best) or best <= _GAIN_EPS:
        return None
    # first max over gain.T scans feature-major: lowest feature wins, then
    # lowest boundary, i.e. lowest threshold
    j, b = np.unravel_index(np.argmax(gain.T), (gain.shape[1], gain.shape[0]))
    threshold = 0.5 * (sv[b, j] + sv[b + 1, j])
    return int(feature_ids[j]), float(threshold)


def grow_class_tree(
    X,
    y,
    criterion="entropy",
    max_depth=None,
    min_samples_leaf=1,
    min_samples_split=2,
    max_features=None,
    rng=None,
) -> TreeNode:
    """Greedy recursive partitioning over (X, y) with 0/1 labels.

    ``max_features`` with a Generator samples that many candidate columns
    per split (random-forest mode); otherwise all columns are considered.
    """
    n_total, d = X.shape
    depth_cap = math.inf if max_depth is None else max_depth

    def make_leaf(yn):
        pos = float(yn.sum())
        n = len(yn)
        return TreeNode(distribution=((n - pos) / n, pos / n))

    def build(idx, depth):
        yn = y[idx]
        if (
            depth >= depth_cap
            or len(idx) < min_samples_split
            or (yn == yn[0]).all()
        ):
            return make_leaf(yn)
        if max_features is not None and max_features < d:
            feats = np.sort(rng.choice(d, size=max_features, replace=False))
        else:
            feats = np.arange(d)
        found = best_class_split(X, y, idx, feats, criterion, min_samples_leaf)
        if found is None:
            return make_leaf(yn)
        feature, threshold = found
        mask = X[idx, feature] <= threshold
        node = TreeNode(feature=feature, threshold=threshold)
        node.left = build(idx[mask], depth + 1)
        node.right = build(idx[~mask], depth + 1)
        return node

    return build(np.arange(n_total), 0)


_DT_PARAMS = {
    "criterion": ("entropy", lambda v: v in CRITERIA),
    "max_depth": (None, lambda v: v is None or (isinstance(v, int) and v >= 0)),
    "min_samples_leaf": (1, lambda v: isinstance(v, int) and v >= 1),
    "min_samples_split": (2, lambda v: isinstance(v, int) and v >= 2),
}


@dataclass
class DecisionTreeModel:
    family = "dt"
    root: TreeNode
    n_features: int
    params: dict
    seed: int | None = None
    flags: tuple[str, ...] = ()

    def score(self, X) -> np.ndarray:
        X = check_scoring_input(X, self.n_features)
        return tree_predict_proba(self.root, X)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "root": self.root.to_dict(),
            "n_features": int(self.n_features),
            "params": dict(self.params),
            "seed": self.seed,
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTreeModel":
        return cls(
            root=TreeNode.from_dict(d["root"]),
            n_features=int(d["n_features"]),
            params=dict(d["params"]),
            seed=d.get("seed"),
            flags=tuple(d.get("flags", ())),
        )


def train_decision_tree(X, y, params=None, seed=0) -> DecisionTreeModel:
    X, y = check_training_data(X, y)
    resolved = validate_params("dt", params or {}, _DT_PARAMS)
    root = grow_class_tree(
        X,
        y,
        criterion=resolved["criterion"],
        max_depth=resolved["max_depth"],
        min_samples_leaf=resolved["min_samples_leaf"],
        min_samples_split=resolved["min_samples_split"],
    )
    return DecisionTreeModel(
        root=root, n_features=X.shape[1], params=resolved, seed=seed
    )
