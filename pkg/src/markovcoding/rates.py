"""Closed-form rate bounds and entropy helpers.

All logarithms are base 2; rates are in bits per channel use. The series bound
is evaluated with a certified truncation: the tail beyond index N is bounded in
closed form and the cutoff is grown until that bound drops below `tail_tol`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_SUM_TOL = 1e-12
_NEG_CLIP = -1e-15


def _check_prob(x: float, name: str, upper: float = 1.0) -> None:
    if not (0.0 <= x <= upper):
        raise ValueError(f"{name} must lie in [0, {upper}], got {x}")


def binary_entropy(p: float) -> float:
    """h(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0."""
    _check_prob(p, "p")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy(v) -> float:
    """Entropy in bits of a probability vector.

    Entries may carry float slack: values in [-1e-15, 0) are clipped to zero,
    and the sum must be 1 within 1e-12.
    """
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise ValueError("probability vector must be one-dimensional")
    if np.any(arr < _NEG_CLIP):
        raise ValueError(f"negative entry in probability vector: min={arr.min()}")
    arr = np.maximum(arr, 0.0)
    total = math.fsum(arr.tolist())
    if abs(total - 1.0) > _SUM_TOL:
        raise ValueError(f"probability vector sums to {total}, not 1")
    pos = arr[arr > 0.0]
    return float(-np.sum(pos * np.log2(pos)))


@dataclass(frozen=True)
class RateBound:
    """An achievable-rate value at a given crossover probability.

    K and M record the truncation parameters when the bound came from the
    numerical optimizer; they stay None for closed-form bounds.
    """

    epsilon: float
    value: float
    K: int | None = None
    M: int | None = None

    def __post_init__(self):
        _check_prob(self.epsilon, "epsilon")
        shannon = 1.0 - binary_entropy(self.epsilon)
        if not (0.0 <= self.value <= shannon + 1e-12):
            raise ValueError(
                f"rate {self.value} violates the one-way capacity bound {shannon}"
            )


def rate_scheme1(eps: float) -> RateBound:
    """Rate of the compress-and-forward scheme: (2/3)(1 - h(eps))."""
    _check_prob(eps, "eps")
    if eps >= 0.5:
        raise ValueError(f"eps must be below 1/2, got {eps}")
    return RateBound(epsilon=eps, value=(2.0 / 3.0) * (1.0 - binary_entropy(eps)))


def rate_scheme2(eps: float, ell_value: float,
                 K: int | None = None, M: int | None = None) -> RateBound:
    """Rate of the noisy-run-and-repair scheme: (1-h)/(1+h+ell)."""
    _check_prob(eps, "eps")
    if eps >= 0.5:
        raise ValueError(f"eps must be below 1/2, got {eps}")
    if ell_value < 0:
        raise ValueError(f"ell_value must be nonnegative, got {ell_value}")
    h = binary_entropy(eps)
    return RateBound(epsilon=eps, value=(1.0 - h) / (1.0 + h + ell_value), K=K, M=M)


# --- geometric-weight series ------------------------------------------------

def _series_tail_bound(p: float, n_terms: int) -> float:
    # tail of sum_{k>N} p^2 (1-p)^(k-1) log2(k+1), using
    # log2(k+1) <= log2(N+2) + (k-N-1)/((N+2) ln 2) for k > N
    q = 1.0 - p
    return p * q**n_terms * math.log2(n_terms + 2) + q ** (n_terms + 1) / (
        (n_terms + 2) * math.log(2.0)
    )


def series_from(p: float, start: int, tail_tol: float) -> float:
    """sum_{k >= start} p^2 (1-p)^(k-1) log2(k+1), truncation error below tail_tol."""
    if tail_tol <= 0:
        raise ValueError(f"tail_tol must be positive, got {tail_tol}")
    _check_prob(p, "p")
    if p == 0.0:
        return 0.0
    n_terms = max(start, 64)
    while _series_tail_bound(p, n_terms) >= tail_tol:
        n_terms *= 2
    q = 1.0 - p
    chunks = []
    chunk = 1 << 20
    for lo in range(start, n_terms + 1, chunk):
        hi = min(lo + chunk - 1, n_terms)
        k = np.arange(lo, hi + 1, dtype=float)
        chunks.append(float(np.sum(p * p * q ** (k - 1.0) * np.log2(k + 1.0))))
    return math.fsum(chunks)


def l_check(p: float, tail_tol: float = 1e-12) -> float:
    """The series upper bound on the asymptotic description length, at error rate p."""
    return series_from(p, 1, tail_tol)


def ell_check(eps: float, tail_tol: float = 1e-12) -> float:
    """Series bound evaluated at the combined error rate p = eps(2 - eps)."""
    _check_prob(eps, "eps")
    return l_check(eps * (2.0 - eps), tail_tol)


def ell_entropy_bound(eps: float) -> float:
    """Entropy bound h(min(eps(2-eps), 1/2)) on the description length."""
    _check_prob(eps, "eps")
    return binary_entropy(min(eps * (2.0 - eps), 0.5))
