"""Empirical risk estimators over labeled and unlabeled data.

Three estimators of the task surrogate risk:

* supervised      -- plain mean over labeled pairs.
* labeled-unlabeled (LU) -- for a removed class k, the labeled mean over the
  other classes, plus the unlabeled mean of the class-k surrogate, minus a
  labeled bias-cancellation term.  Unbiased for the same risk but fed by
  unlabeled data.
* combined (SEMI) -- convex mixture gamma * LU + (1 - gamma) * supervised;
  unbiased at every gamma.

The LU bracket (unlabeled term minus bias correction) estimates a
non-negative population quantity, so an optional non-negativity correction
clamps it at zero.  Gradients follow the sign-flip rule when the clamp is
active: the step descends on the negated bracket instead of a zero gradient,
so the estimator can recover instead of stalling.

Also here: class-prior estimation, removed-class selection strategies, the
log-barrier penalty that keeps thresholds ordered, and the bootstrap
variance-ratio experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import OrdinalDataset, OrdinalModel
from .losses import TaskSurrogate, surrogate_values, surrogate_values_grads
from .models import ScoreModel, with_weights

STRATEGIES = ("smallest", "bound")


@dataclass(frozen=True)
class RiskSpec:
    """Everything that parameterizes the combined risk estimator."""

    surrogate: TaskSurrogate
    removed_class: int
    priors: np.ndarray
    gamma: float = 0.8
    mu: float = 10.0
    non_negative: bool = True

    def __post_init__(self):
        pri = np.asarray(self.priors, dtype=float)
        if pri.ndim != 1 or pri.size < 2:
            raise ValueError("priors must be a 1-D vector with one entry per class")
        if np.any(pri < 0) or abs(pri.sum() - 1.0) > 1e-12:
            raise ValueError("priors must be non-negative and sum to 1")
        if not 1 <= self.removed_class <= pri.size:
            raise ValueError(f"removed_class {self.removed_class} out of 1..{pri.size}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.mu < 0:
            raise ValueError("mu must be >= 0")
        object.__setattr__(self, "priors", pri)

    @property
    def n_classes(self) -> int:
        return self.priors.size


@dataclass(frozen=True)
class RiskBreakdown:
    """The estimator's pieces alongside the combined total.

    ``labeled_main`` and ``bias_correction`` are the two labeled sums of the
    LU estimator, ``unlabeled`` its unlabeled term, ``supervised`` the plain
    labeled mean.  When gamma = 0 the LU pieces are not computed and report
    0.0.
    """

    labeled_main: float
    unlabeled: float
    bias_correction: float
    supervised: float
    total: float


def estimate_priors(dataset: OrdinalDataset) -> np.ndarray:
    """Class priors as labeled class frequencies n_y / n_labeled."""
    counts = dataset.class_counts()
    return counts / counts.sum()


def select_removed_class(counts: np.ndarray, strategy: str) -> int:
    """Pick the class whose labeled term the LU estimator replaces.

    ``smallest`` removes the class with the fewest labeled points (its
    labeled average is the noisiest); ``bound`` removes the most populous
    class, which minimizes the estimation-error bound; ``fixed:<k>`` forces
    class k.  Ties break toward the smallest class index.
    """
    counts = np.asarray(counts, dtype=int)
    n_classes = counts.size
    if strategy == "smallest":
        return int(np.argmin(counts)) + 1
    if strategy == "bound":
        return int(np.argmax(counts)) + 1
    if strategy.startswith("fixed:"):
        k = int(strategy.split(":", 1)[1])
        if not 1 <= k <= n_classes:
            raise ValueError(f"fixed class {k} out of 1..{n_classes}")
        return k
    raise ValueError(f"unknown strategy {strategy!r}")


def threshold_penalty(thresholds: np.ndarray, mu: float) -> float:
    """Log-barrier penalty encouraging strictly increasing thresholds.

    mu * max(0, sum of -log(gap)) over consecutive threshold gaps; the max
    clamps the whole sum, not individual gaps.  A non-positive gap returns
    +inf to signal an infeasible ordering.  With fewer than two thresholds
    the sum is empty and the penalty is 0.
    """
    thresholds = np.asarray(thresholds, dtype=float)
    if thresholds.size < 2:
        return 0.0
    gaps = np.diff(thresholds)
    if np.any(gaps <= 0.0):
        return math.inf
    return mu * max(0.0, float(-np.log(gaps).sum()))


def threshold_penalty_grad(thresholds: np.ndarray, mu: float) -> np.ndarray:
    """Gradient of :func:`threshold_penalty`; raises on infeasible ordering."""
    thresholds = np.asarray(thresholds, dtype=float)
    grad = np.zeros_like(thresholds)
    if thresholds.size < 2 or mu == 0.0:
        return grad
    gaps = np.diff(thresholds)
    if np.any(gaps <= 0.0):
        raise ValueError("thresholds are not strictly increasing; penalty is infinite")
    if -np.log(gaps).sum() <= 0.0:
        return grad  # clamped at zero
    inv = mu / gaps
    grad[:-1] += inv
    grad[1:] -= inv
    return grad


class RiskEvaluator:
    """Precomputed feature matrices for repeated risk/gradient evaluation.

    The feature maps depend only on the score model's structure (kind,
    centers, bandwidth), so a trainer can build one evaluator per dataset
    and query it with fresh parameter vectors every step.  With gamma = 0
    the unlabeled features are never computed or read.
    """

    def __init__(self, dataset: OrdinalDataset, spec: RiskSpec, score_model: ScoreModel, need_lu: bool | None = None):
        if dataset.n_classes != spec.n_classes:
            raise ValueError("spec priors length does not match the dataset classes")
        if score_model.input_dim != dataset.n_features:
            raise ValueError("score model input dim does not match the dataset")
        self.spec = spec
        self.n_thresholds = dataset.n_classes - 1
        self.ys = dataset.labeled_y
        self.n_labeled = dataset.n_labeled
        self.phi_labeled = score_model.features(dataset.labeled_x)
        self.need_lu = spec.gamma > 0.0 if need_lu is None else need_lu

        if self.need_lu:
            k = spec.removed_class
            counts = dataset.class_counts()
            missing = [
                y for y in range(1, dataset.n_classes + 1) if y != k and counts[y - 1] == 0
            ]
            if missing:
                raise ValueError(
                    f"classes {missing} have no labeled data but are kept by the "
                    f"LU estimator (removed class is {k})"
                )
            if dataset.n_unlabeled < 1:
                raise ValueError("the LU estimator needs at least one unlabeled point")
            # per-row coefficient pi_y / n_y; zero for rows of the removed class
            coeff = spec.priors[self.ys - 1] / counts[self.ys - 1]
            coeff[self.ys == k] = 0.0
            self.lu_coeff = coeff
            self.phi_unlabeled = score_model.features(dataset.unlabeled_x)
            self.n_unlabeled = dataset.n_unlabeled

    def _margins(self, phi: np.ndarray, weights: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
        return thresholds[None, :] - (phi @ weights)[:, None]

    def breakdown(self, weights: np.ndarray, thresholds: np.ndarray) -> RiskBreakdown:
        """Combined-estimator breakdown at the given parameters."""
        return self._breakdown(weights, thresholds, self.spec.gamma)

    def lu_breakdown(self, weights: np.ndarray, thresholds: np.ndarray) -> RiskBreakdown:
        """Labeled-unlabeled breakdown alone (the gamma = 1 total)."""
        if not self.need_lu:
            raise ValueError("evaluator was built without the labeled-unlabeled terms")
        return self._breakdown(weights, thresholds, 1.0)

    def _breakdown(self, weights, thresholds, gamma: float) -> RiskBreakdown:
        spec = self.spec
        m_lab = self._margins(self.phi_labeled, weights, thresholds)
        vals_y = surrogate_values(spec.surrogate, m_lab, self.ys)
        sv = float(np.mean(vals_y))
        if not self.need_lu:
            return RiskBreakdown(0.0, 0.0, 0.0, sv, sv)
        l1 = float(self.lu_coeff @ vals_y)
        m_unl = self._margins(self.phi_unlabeled, weights, thresholds)
        u = float(np.mean(surrogate_values(spec.surrogate, m_unl, spec.removed_class)))
        l2 = float(self.lu_coeff @ surrogate_values(spec.surrogate, m_lab, spec.removed_class))
        bracket = u - l2
        if spec.non_negative:
            bracket = max(0.0, bracket)
        total = gamma * (l1 + bracket) + (1.0 - gamma) * sv
        return RiskBreakdown(l1, u, l2, sv, total)

    def objective_grad(
        self, weights: np.ndarray, thresholds: np.ndarray
    ) -> tuple[float, np.ndarray, np.ndarray]:
        """Objective (combined risk + order penalty) and its gradients.

        Returns (value, d/dweights, d/dthresholds).  The reported value uses
        the clamped bracket; when the clamp is active the gradient instead
        descends on the negated bracket (sign-flip rule).
        """
        spec = self.spec
        psi = spec.surrogate
        m_lab = self._margins(self.phi_labeled, weights, thresholds)
        vals_y, grads_y = surrogate_values_grads(psi, m_lab, self.ys)
        sv = float(np.mean(vals_y))
        gw_sv, gt_sv = self._param_grads(self.phi_labeled, grads_y, np.full(self.n_labeled, 1.0 / self.n_labeled))

        penalty = threshold_penalty(thresholds, spec.mu)
        if not math.isfinite(penalty):
            raise ValueError("thresholds are not strictly increasing; penalty is infinite")
        gt_pen = threshold_penalty_grad(thresholds, spec.mu)

        if not self.need_lu:
            value = sv + penalty
            return value, gw_sv, gt_sv + gt_pen

        k = spec.removed_class
        l1 = float(self.lu_coeff @ vals_y)
        gw_l1, gt_l1 = self._param_grads(self.phi_labeled, grads_y, self.lu_coeff)

        m_unl = self._margins(self.phi_unlabeled, weights, thresholds)
        vals_u, grads_u = surrogate_values_grads(psi, m_unl, k)
        u = float(np.mean(vals_u))
        gw_u, gt_u = self._param_grads(
            self.phi_unlabeled, grads_u, np.full(self.n_unlabeled, 1.0 / self.n_unlabeled)
        )

        vals_k, grads_k = surrogate_values_grads(psi, m_lab, k)
        l2 = float(self.lu_coeff @ vals_k)
        gw_l2, gt_l2 = self._param_grads(self.phi_labeled, grads_k, self.lu_coeff)

        bracket = u - l2
        gw_br = gw_u - gw_l2
        gt_br = gt_u - gt_l2
        reported = bracket
        if spec.non_negative:
            reported = max(0.0, bracket)
            if bracket < 0.0:
                gw_br = -gw_br
                gt_br = -gt_br

        g = spec.gamma
        value = g * (l1 + reported) + (1.0 - g) * sv + penalty
        grad_w = g * (gw_l1 + gw_br) + (1.0 - g) * gw_sv
        grad_t = g * (gt_l1 + gt_br) + (1.0 - g) * gt_sv + gt_pen
        return value, grad_w, grad_t

    @staticmethod
    def _param_grads(phi: np.ndarray, margin_grads: np.ndarray, coeff: np.ndarray):
        # margins = thresholds - phi @ w, so d/dw picks up -phi and
        # d/dthreshold_j is the j-th margin gradient itself.
        grad_w = -phi.T @ (coeff * margin_grads.sum(axis=1))
        grad_t = margin_grads.T @ coeff
        return grad_w, grad_t


def supervised_risk(
    model: OrdinalModel, labeled_x: np.ndarray, labeled_y: np.ndarray, psi: TaskSurrogate
) -> float:
    """Mean surrogate loss over labeled pairs."""
    labeled_x = np.asarray(labeled_x, dtype=float)
    labeled_y = np.asarray(labeled_y, dtype=int)
    if labeled_x.ndim != 2 or labeled_x.shape[0] == 0:
        raise ValueError("labeled set must be non-empty")
    from .core import margins_matrix

    m = margins_matrix(model, labeled_x)
    return float(np.mean(surrogate_values(psi, m, labeled_y)))


def lu_risk(model: OrdinalModel, dataset: OrdinalDataset, spec: RiskSpec) -> RiskBreakdown:
    """LU estimator at the model's parameters (gamma plays no role here)."""
    ev = RiskEvaluator(dataset, spec, model.score, need_lu=True)
    return ev.lu_breakdown(model.score.weights, model.thresholds)


def semi_risk(model: OrdinalModel, dataset: OrdinalDataset, spec: RiskSpec) -> RiskBreakdown:
    """Combined estimator gamma * LU + (1 - gamma) * supervised."""
    ev = RiskEvaluator(dataset, spec, model.score)
    return ev.breakdown(model.score.weights, model.thresholds)


def risk_grad(
    model: OrdinalModel, dataset: OrdinalDataset, spec: RiskSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of (combined risk + order penalty) over all parameters.

    Returns (d/dweights, d/dthresholds).  See
    :meth:`RiskEvaluator.objective_grad` for the clamp handling.
    """
    ev = RiskEvaluator(dataset, spec, model.score)
    _, grad_w, grad_t = ev.objective_grad(model.score.weights, model.thresholds)
    return grad_w, grad_t


def variance_ratio(
    dataset: OrdinalDataset,
    spec: RiskSpec,
    model: OrdinalModel,
    resamples: int,
    sizes: tuple[int, int],
    seed: int = 0,
) -> float:
    """Var[LU estimator] / Var[supervised estimator] at a fixed model.

    Each resample bootstraps ``sizes`` = (n_labeled, n_unlabeled) points with
    replacement from the dataset's pools and evaluates both estimators on the
    same labeled draw.  Priors are re-estimated per draw, the clamp is off,
    and draws missing a kept class are rejected and redrawn.  A ratio below 1
    means the unlabeled data stabilizes the risk estimate.
    """
    if resamples < 2:
        raise ValueError("need at least two resamples to estimate a variance")
    n_lab, n_unl = sizes
    if n_lab > dataset.n_labeled or n_unl > dataset.n_unlabeled:
        raise ValueError("dataset is smaller than the requested resample sizes")
    rng = np.random.default_rng(seed)
    k = spec.removed_class
    lu_vals = np.empty(resamples)
    sv_vals = np.empty(resamples)
    for r in range(resamples):
        for _ in range(100):
            lab_idx = rng.integers(0, dataset.n_labeled, size=n_lab)
            ys = dataset.labeled_y[lab_idx]
            counts = np.bincount(ys, minlength=dataset.n_classes + 1)[1:]
            kept = np.delete(np.arange(1, dataset.n_classes + 1), k - 1)
            if np.all(counts[kept - 1] > 0):
                break
        else:
            raise ValueError("could not draw a labeled resample covering all kept classes")
        unl_idx = rng.integers(0, dataset.n_unlabeled, size=n_unl)
        sub = OrdinalDataset(
            dataset.labeled_x[lab_idx], ys, dataset.unlabeled_x[unl_idx], dataset.n_classes
        )
        sub_spec = replace(spec, priors=estimate_priors(sub), non_negative=False)
        lu_vals[r] = lu_risk(model, sub, sub_spec).total
        sv_vals[r] = supervised_risk(model, sub.labeled_x, sub.labeled_y, spec.surrogate)
    var_sv = float(np.var(sv_vals, ddof=1))
    if var_sv <= 0.0:
        raise ValueError("supervised risk variance is zero (degenerate resamples)")
    return float(np.var(lu_vals, ddof=1)) / var_sv


def replace_params(model: OrdinalModel, weights: np.ndarray, thresholds: np.ndarray) -> OrdinalModel:
    """Model copy with fresh weights and thresholds."""
    return OrdinalModel(with_weights(model.score, weights), np.asarray(thresholds, dtype=float))
