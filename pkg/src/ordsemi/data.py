"""Dataset ingestion, class merging, standardization, and split management.

Input format: comma-separated values, features in all but the last column,
an integer label >= 1 in the last column, optional single header line.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import OrdinalDataset


@dataclass(frozen=True)
class RawTable:
    """Rows as loaded: features plus raw integer labels (any values >= 1)."""

    features: np.ndarray  # (n, d)
    labels: np.ndarray  # (n,)

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        y = np.asarray(self.labels, dtype=int)
        if x.ndim != 2 or x.shape[0] < 1:
            raise ValueError("table must have at least one row")
        if y.shape != (x.shape[0],):
            raise ValueError("one label per row required")
        if y.min() < 1:
            raise ValueError("raw labels must be >= 1")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SplitSpec:
    """How to carve a table into labeled / unlabeled / test parts."""

    n_labeled: int = 30
    n_classes: int = 3
    unlabeled_fraction: float = 0.5
    seed: int = 0
    standardize: bool = True

    def __post_init__(self):
        if self.n_classes < 2:
            raise ValueError("n_classes must be >= 2")
        if self.n_labeled < self.n_classes:
            raise ValueError("n_labeled must be >= n_classes")
        if not 0.0 < self.unlabeled_fraction < 1.0:
            raise ValueError("unlabeled_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class TrainTestSplit:
    train: OrdinalDataset
    test_x: np.ndarray
    test_y: np.ndarray


def load_csv(path: str | Path, has_header: bool = False) -> RawTable:
    """Load a CSV of features plus a trailing integer label column."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such data file: {path}")
    rows: list[list[float]] = []
    labels: list[int] = []
    width = None
    with path.open() as handle:
        for lineno, line in enumerate(handle, start=1):
            if has_header and lineno == 1:
                continue
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: need at least two columns")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise ValueError(
                    f"{path}:{lineno}: row has {len(parts)} columns, expected {width}"
                )
            try:
                rows.append([float(v) for v in parts[:-1]])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad feature value ({exc})") from None
            try:
                labels.append(int(parts[-1]))
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: last column {parts[-1]!r} is not an integer label"
                ) from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return RawTable(np.asarray(rows), np.asarray(labels))


def merge_classes(table: RawTable, n_target: int) -> RawTable:
    """Relabel into 1..n_target by merging adjacent raw labels.

    Distinct raw labels are sorted and grouped into contiguous bins whose
    total counts are as balanced as possible (minimum sum of squared
    deviations from n/n_target; ties resolve toward earlier boundaries).
    Order is preserved: a smaller raw label never maps above a larger one.
    """
    distinct, counts = np.unique(table.labels, return_counts=True)
    m = distinct.size
    if m < n_target:
        raise ValueError(f"only {m} distinct labels; cannot form {n_target} classes")
    target = table.n_rows / n_target

    # dp[g][j]: best cost splitting the first j distinct labels into g bins
    inf = np.inf
    dp = np.full((n_target + 1, m + 1), inf)
    back = np.zeros((n_target + 1, m + 1), dtype=int)
    dp[0][0] = 0.0
    prefix = np.concatenate([[0], np.cumsum(counts)])
    for g in range(1, n_target + 1):
        for j in range(g, m - (n_target - g) + 1):
            for i in range(g - 1, j):
                cost = dp[g - 1][i] + (prefix[j] - prefix[i] - target) ** 2
                if cost < dp[g][j]:
                    dp[g][j] = cost
                    back[g][j] = i
    bounds = [m]
    for g in range(n_target, 0, -1):
        bounds.append(back[g][bounds[-1]])
    bounds.reverse()  # 0 = b_0 < b_1 < ... < b_{n_target} = m

    bin_of = np.empty(m, dtype=int)
    for b in range(n_target):
        bin_of[bounds[b] : bounds[b + 1]] = b + 1
    lookup = dict(zip(distinct.tolist(), bin_of.tolist()))
    merged = np.array([lookup[v] for v in table.labels])
    return RawTable(table.features, merged)


def make_splits(table: RawTable, spec: SplitSpec) -> TrainTestSplit:
    """Seeded labeled / unlabeled / test partition with optional standardization.

    The labeled subset is reshuffled up to 10 times until it covers every
    class, then accepted with a warning if it still does not.  Feature
    scaling statistics come from the labeled and unlabeled inputs only --
    test labels and test-exclusive rows never influence them beyond the
    unlabeled pool's own membership.
    """
    n = table.n_rows
    if n < spec.n_labeled + 2:
        raise ValueError(f"{n} rows cannot supply {spec.n_labeled} labeled plus a remainder")
    if table.labels.max() > spec.n_classes:
        raise ValueError(
            f"labels exceed {spec.n_classes}; run merge_classes first"
        )
    rng = np.random.default_rng(spec.seed)
    perm = rng.permutation(n)
    for attempt in range(10):
        labeled_idx = perm[: spec.n_labeled]
        present = np.unique(table.labels[labeled_idx])
        if present.size == spec.n_classes:
            break
        perm = rng.permutation(n)
    else:
        warnings.warn(
            "labeled subset is missing a class after 10 reshuffles; accepting it",
            stacklevel=2,
        )
        labeled_idx = perm[: spec.n_labeled]

    rest = perm[spec.n_labeled :]
    n_unlabeled = int(spec.unlabeled_fraction * rest.size)
    unlabeled_idx = rest[:n_unlabeled]
    test_idx = rest[n_unlabeled:]

    labeled_x = table.features[labeled_idx]
    unlabeled_x = table.features[unlabeled_idx]
    test_x = table.features[test_idx]
    if spec.standardize:
        pool = np.vstack([labeled_x, unlabeled_x])
        mean = pool.mean(axis=0)
        std = pool.std(axis=0)
        std[std == 0.0] = 1.0
        labeled_x = (labeled_x - mean) / std
        unlabeled_x = (unlabeled_x - mean) / std
        test_x = (test_x - mean) / std

    train = OrdinalDataset(
        labeled_x, table.labels[labeled_idx], unlabeled_x, spec.n_classes
    )
    return TrainTestSplit(train, test_x, table.labels[test_idx])


def synthetic_ordinal_table(
    n_rows: int,
    n_features: int,
    n_classes: int,
    label_noise: float = 0.0,
    seed: int = 0,
) -> RawTable:
    """Ordinal data from a latent linear score: useful for experiments.

    Gaussian inputs are scored by a random unit direction plus Gaussian
    noise; labels come from equal-frequency cuts of the scores.  With
    ``label_noise`` > 0 that fraction of labels is resampled uniformly.
    """
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n_rows, n_features))
    direction = rng.normal(size=n_features)
    direction /= np.linalg.norm(direction)
    scores = x @ direction + 0.3 * rng.normal(size=n_rows)
    cuts = np.quantile(scores, np.arange(1, n_classes) / n_classes)
    labels = 1 + np.sum(scores[:, None] > cuts[None, :], axis=1)
    if label_noise > 0.0:
        flip = rng.random(n_rows) < label_noise
        labels[flip] = rng.integers(1, n_classes + 1, size=int(flip.sum()))
    return RawTable(x, labels)
