"""Exact Shapley values for the three outcomes of a Gaussian-feature LPM.

Everything here is closed form. Conditioning on a subset S of features leaves
eta Gaussian with known mean and variance, so each conditional expectation
(the value function v(S)) is a single normal-CDF evaluation:

    log-odds:     v(S) = mean_S
    probability:  v(S) = Phi(mean_S / sqrt(lam + var_S))
    decision:     v(S) = Phi((mean_S - eta_star) / sqrt(var_S)),
                  an inclusive indicator when var_S = 0

``shapley_exact`` enumerates all 2^m subsets with the exact combinatorial
weights; ``shapley_two_feature`` evaluates the literal two-feature formulas
and must agree with the enumeration to 1e-12, which the tests enforce.

Division by a zero sigma only arises for the decision outcome; it resolves to
the inclusive indicator so that value functions, predictions, and the fast
path stay consistent on the boundary itself (the discontinuity set has
measure zero but the tests do step on it).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .model import (
    CapacityError,
    DimensionMismatchError,
    GaussianLPM,
    InvalidModelError,
    OutcomeKind,
    OutcomeSpec,
    _check_sample,
    conditional_eta,
    predict,
)

__all__ = [
    "Explanation",
    "SubsetValue",
    "MAX_EXACT_FEATURES",
    "baseline",
    "eta_baseline_on_probability_scale",
    "shapley_exact",
    "shapley_two_feature",
    "value_function",
]

# 2^m value evaluations; beyond this, exactness is not worth the memory.
MAX_EXACT_FEATURES = 25


@dataclass(frozen=True)
class Explanation:
    """Baseline plus per-feature Shapley values for one sample.

    Satisfies efficiency: baseline + sum(phis) equals the prediction to
    1e-10 (the decision outcome hits its exact 0/1 value).
    """

    outcome: OutcomeSpec
    x: tuple
    baseline: float
    phis: tuple
    prediction: float

    def residual(self) -> float:
        """Efficiency residual baseline + sum(phis) - prediction."""
        return self.baseline + math.fsum(self.phis) - self.prediction

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline,
            "phis": list(self.phis),
            "prediction": self.prediction,
            "outcome": self.outcome.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class SubsetValue:
    """One subset's conditional expectation v(S)."""

    subset: frozenset
    value: float


def _decision_cdf(num, sigma):
    """Phi(num / sigma) with the inclusive-indicator convention at sigma=0."""
    num = np.asarray(num, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim == 0 and num.ndim == 0:
        if sigma == 0.0:
            return 1.0 if num >= 0.0 else 0.0
        return float(ndtr(num / sigma))
    num, sigma = np.broadcast_arrays(num, sigma)
    out = np.where(sigma > 0.0, ndtr(np.divide(num, np.where(sigma > 0.0, sigma, 1.0))), 0.0)
    zero = sigma == 0.0
    if np.any(zero):
        out = np.where(zero, (num >= 0.0).astype(np.float64), out)
    return out


def value_function(model: GaussianLPM, outcome: OutcomeSpec, subset, x) -> float:
    """Conditional expectation of the outcome given the subset's values."""
    law = conditional_eta(model, subset, x)
    if outcome.kind is OutcomeKind.LOG_ODDS:
        return law.mean
    if outcome.kind is OutcomeKind.PROBABILITY:
        return float(ndtr(law.mean / math.sqrt(outcome.lam + law.variance)))
    if law.variance == 0.0:
        return 1.0 if law.mean >= outcome.eta_star else 0.0
    return float(ndtr((law.mean - outcome.eta_star) / math.sqrt(law.variance)))


def all_subset_values(model: GaussianLPM, outcome: OutcomeSpec, x) -> list:
    """v(S) for every subset; diagnostic helper, exponential in m."""
    if model.m > 16:
        raise CapacityError("subset listing supports at most 16 features")
    out = []
    for mask in range(1 << model.m):
        subset = frozenset(i for i in range(model.m) if mask >> i & 1)
        out.append(SubsetValue(subset=subset, value=value_function(model, outcome, subset, x)))
    return out


def _popcounts(m: int) -> np.ndarray:
    pc = np.zeros(1, dtype=np.uint8)
    for _ in range(m):
        pc = np.concatenate([pc, pc + 1])
    return pc


def _mask_values(
    b0: np.ndarray,
    delta: np.ndarray,
    var_terms: np.ndarray,
    kind: OutcomeKind,
    lam: float,
    eta_star: float,
) -> np.ndarray:
    """v(S) for every case (leading axis) and every subset mask.

    delta[i] = beta[i]*(x[i]-mu[i]) is what conditioning on feature i adds to
    the mean; var_terms[i] = (beta[i]*sigma[i])^2 is what it removes from the
    variance. Masks are enumerated in natural order, bit i = feature i.
    """
    n, m = delta.shape
    n_masks = 1 << m
    base_mean = b0 + 0.0
    total_var = var_terms.sum(axis=1)
    values = np.empty((n, n_masks), dtype=np.float64)
    # Keep the (n, chunk) work arrays around 32 MB.
    chunk = max(1, min(n_masks, (1 << 22) // max(n, 1)))
    bits_idx = np.arange(m, dtype=np.uint32)
    for start in range(0, n_masks, chunk):
        masks = np.arange(start, min(start + chunk, n_masks), dtype=np.uint32)
        bits = ((masks[:, None] >> bits_idx) & 1).astype(np.float64)
        mean = base_mean[:, None] + delta @ bits.T
        var = total_var[:, None] - var_terms @ bits.T
        # Conditioning can only shave variance; clip float dust.
        np.clip(var, 0.0, None, out=var)
        if kind is OutcomeKind.LOG_ODDS:
            values[:, start : start + masks.size] = mean
        elif kind is OutcomeKind.PROBABILITY:
            values[:, start : start + masks.size] = ndtr(mean / np.sqrt(lam + var))
        else:
            sd = np.sqrt(var)
            ratio = np.divide(mean - eta_star, sd, out=np.zeros_like(mean), where=sd > 0)
            values[:, start : start + masks.size] = np.where(
                sd > 0, ndtr(ratio), (mean >= eta_star).astype(np.float64)
            )
    return values


def _enumerate_phis(
    b0: np.ndarray,
    delta: np.ndarray,
    var_terms: np.ndarray,
    kind: OutcomeKind,
    lam: float,
    eta_star: float,
):
    """Exact Shapley values for a batch of cases, vectorized over the batch.

    Returns (baseline, phis) with shapes (n,) and (n, m). The full value
    table over all 2^m masks is materialized, then each phi_i is a weighted
    contraction of the table along feature i's bit axis.
    """
    n, m = delta.shape
    # weights[k] = k! (m-k-1)! / m! = 1 / (m * C(m-1, k)), exact integers
    # under the hood; the k = m slot is never consumed (S excludes i).
    weights = np.zeros(m + 1, dtype=np.float64)
    for k in range(m):
        weights[k] = 1.0 / (m * math.comb(m - 1, k))
    w_mask = weights[_popcounts(m)]
    values = _mask_values(b0, delta, var_terms, kind, lam, eta_star)
    cube = values.reshape((n,) + (2,) * m)
    w_cube = w_mask.reshape((2,) * m)
    phis = np.empty((n, m), dtype=np.float64)
    for i in range(m):
        axis = m - i  # bit i of the mask, offset by the batch axis
        v0 = np.take(cube, 0, axis=axis)
        v1 = np.take(cube, 1, axis=axis)
        w0 = np.take(w_cube, 0, axis=axis - 1)
        flat_w = w0.reshape(-1)
        diff = (v1 - v0).reshape(n, -1)
        phis[:, i] = diff @ flat_w
    return values[:, 0], phis


def _model_case_arrays(model: GaussianLPM, x: np.ndarray):
    beta = model.coef_array()
    mu = model.mean_array()
    sd = model.stddev_array()
    b0 = np.array([model.intercept + float(beta @ mu)])
    delta = (beta * (x - mu))[None, :]
    var_terms = ((beta * sd) ** 2)[None, :]
    return b0, delta, var_terms


def shapley_exact(model: GaussianLPM, outcome: OutcomeSpec, x) -> Explanation:
    """Exact Shapley attribution by full subset enumeration.

    phi_i = sum over subsets S not containing i of
            |S|! (m-|S|-1)! / m!  *  (v(S + i) - v(S)),
    with the baseline phi_0 = v(empty set). Capacity is capped at
    MAX_EXACT_FEATURES features; beyond that, use the sampling oracle
    (``lpm_shapley.oracle.mc_shapley``).
    """
    arr = _check_sample(model, x)
    if model.m > MAX_EXACT_FEATURES:
        raise CapacityError(
            f"exact enumeration supports m <= {MAX_EXACT_FEATURES}; "
            f"got m={model.m}. Use the sampling oracle (mc_shapley) instead."
        )
    b0, delta, var_terms = _model_case_arrays(model, arr)
    base, phis = _enumerate_phis(
        b0, delta, var_terms, outcome.kind, outcome.lam, outcome.eta_star
    )
    return Explanation(
        outcome=outcome,
        x=tuple(float(v) for v in arr),
        baseline=float(base[0]),
        phis=tuple(float(p) for p in phis[0]),
        prediction=predict(model, outcome, arr),
    )


def shapley_exact_batch(model: GaussianLPM, outcome: OutcomeSpec, xs) -> np.ndarray:
    """Baseline and Shapley values for many samples of one model.

    Returns an array of shape (n, m + 1): column 0 is the baseline (identical
    across rows), columns 1..m are the per-feature values. Used by studies
    and tests where per-sample Explanation objects would dominate runtime.
    """
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != model.m:
        raise DimensionMismatchError(
            f"samples must have shape (n, {model.m}); got {xs.shape}"
        )
    if model.m > MAX_EXACT_FEATURES:
        raise CapacityError(
            f"exact enumeration supports m <= {MAX_EXACT_FEATURES}; got m={model.m}"
        )
    beta = model.coef_array()
    mu = model.mean_array()
    sd = model.stddev_array()
    n = xs.shape[0]
    b0 = np.full(n, model.intercept + float(beta @ mu))
    delta = beta * (xs - mu)
    var_terms = np.broadcast_to((beta * sd) ** 2, (n, model.m))
    base, phis = _enumerate_phis(
        b0, delta, var_terms, outcome.kind, outcome.lam, outcome.eta_star
    )
    return np.column_stack([base, phis])


def _require_normalized_pair(model: GaussianLPM) -> None:
    if model.m != 2:
        raise DimensionMismatchError("two-feature formulas need exactly 2 features")
    if not model.is_normalized():
        raise InvalidModelError(
            "two-feature formulas expect a normalized model (means 0, "
            "coefficients 1); call normalize(model, x) first"
        )


def two_feature_phis(
    b0: float,
    s1,
    s2,
    x1,
    x2,
    outcome: OutcomeSpec,
):
    """Closed-form (phi0, phi1, phi2) for a normalized two-feature model.

    Array-friendly in x1/x2; this is the hot path under the Monte Carlo
    studies, so it stays free of per-sample Python objects.
    """
    kind = outcome.kind
    if kind is OutcomeKind.LOG_ODDS:
        x1 = np.asarray(x1, dtype=np.float64)
        x2 = np.asarray(x2, dtype=np.float64)
        zero = np.zeros_like(x1 + x2)
        return b0 + zero, x1 + zero, x2 + zero
    if kind is OutcomeKind.PROBABILITY:
        lam = outcome.lam
        d_full = math.sqrt(lam)
        d_given1 = math.sqrt(lam + s2 * s2)
        d_given2 = math.sqrt(lam + s1 * s1)
        d_none = math.sqrt(lam + s1 * s1 + s2 * s2)
        v0 = ndtr(b0 / d_none)
        v1 = ndtr((b0 + np.asarray(x1)) / d_given1)
        v2 = ndtr((b0 + np.asarray(x2)) / d_given2)
        v12 = ndtr((b0 + np.asarray(x1) + np.asarray(x2)) / d_full)
        phi1 = 0.5 * ((v1 - v0) + (v12 - v2))
        phi2 = 0.5 * ((v2 - v0) + (v12 - v1))
        return v0 + np.zeros_like(phi1), phi1, phi2
    eta_star = outcome.eta_star
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    w0 = _decision_cdf(b0 - eta_star, math.sqrt(s1 * s1 + s2 * s2))
    w1 = _decision_cdf(b0 + x1 - eta_star, s2)
    w2 = _decision_cdf(b0 + x2 - eta_star, s1)
    full = (b0 + x1 + x2 >= eta_star).astype(np.float64)
    phi1 = 0.5 * ((w1 - w0) + (full - w2))
    phi2 = 0.5 * ((w2 - w0) + (full - w1))
    return w0 + np.zeros_like(phi1), phi1, phi2


def shapley_two_feature(model: GaussianLPM, outcome: OutcomeSpec, x) -> Explanation:
    """Two-feature Shapley values from the literal closed-form expressions.

    Requires a normalized model; agrees with ``shapley_exact`` to 1e-12 on
    every input because it is the same algebra with the subset sum unrolled.
    """
    _require_normalized_pair(model)
    arr = _check_sample(model, x)
    s1, s2 = model.stddevs
    phi0, phi1, phi2 = two_feature_phis(
        model.intercept, s1, s2, arr[0], arr[1], outcome
    )
    return Explanation(
        outcome=outcome,
        x=(float(arr[0]), float(arr[1])),
        baseline=float(phi0),
        phis=(float(phi1), float(phi2)),
        prediction=predict(model, outcome, arr),
    )


def baseline(model: GaussianLPM, outcome: OutcomeSpec) -> float:
    """Unconditional expected outcome v(empty set), the reference point."""
    x0 = model.mean_array()
    return value_function(model, outcome, frozenset(), x0)


def eta_baseline_on_probability_scale(model: GaussianLPM, outcome: OutcomeSpec) -> float:
    """The log-odds baseline pushed through the link: Phi(phi0_eta / sqrt(lam)).

    This is what the log-odds reference point *implies* on the probability
    scale, used to compare baselines across outcomes.
    """
    beta = model.coef_array()
    mu = model.mean_array()
    phi0_eta = model.intercept + float(beta @ mu)
    return float(ndtr(phi0_eta / math.sqrt(outcome.lam)))
