"""Worst-case description length over spectra: concave maximization on the simplex.

The objective is sum_k w_k [H(C_k a) + corr_k(a_M)] with w_k = p^2 (1-p)^(k-1),
where C_k is the (k+1) x M column-stochastic truncation matrix and corr_k is the
nonnegative truncation correction -(2 k a_M / M) log2(2 k a_M / ((k+1) M)).
Entropies of all K classes share the suffix sums of (a_j / j) and (a_j), so one
objective or gradient evaluation costs O(M + K) rather than O(K^2 M).

The maximizer is a pairwise conditional-gradient method: the linear oracle over
the simplex picks the largest gradient coordinate, mass moves there from the
worst active coordinate, and the standard duality gap max_i grad_i - grad . a
certifies optimality of the reported value (the bound consumer adds the gap).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .rates import series_from

_LOG2E = float(1.0 / np.log(2.0))
_GRAD_SENTINEL = 1e300


class NonConvergenceError(RuntimeError):
    """Gap still above tol after the iteration budget; carries the best iterate."""

    def __init__(self, message: str, result: "OptimizationResult"):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class CkMatrix:
    """Truncated column-stochastic map from spectra to offset distributions."""

    k: int
    M: int
    rows: np.ndarray


def build_ck(k: int, M: int) -> CkMatrix:
    """Rows i = 1..k hold 1/j for j >= i; row k+1 holds (j-k)/j for j >= k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if M <= k:
        raise ValueError(f"M must be at least k+1, got M={M}, k={k}")
    j = np.arange(1, M + 1, dtype=float)
    rows = np.zeros((k + 1, M), dtype=float)
    for i in range(1, k + 1):
        rows[i - 1, i - 1:] = 1.0 / j[i - 1:]
    rows[k, k - 1:] = (j[k - 1:] - k) / j[k - 1:]
    return CkMatrix(k=k, M=M, rows=rows)


def _check_simplex(a: np.ndarray, M: int) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (M,):
        raise ValueError(f"a must have shape ({M},), got {a.shape}")
    if a.min() < -1e-15:
        raise ValueError(f"negative entry in a: {a.min()}")
    a = np.maximum(a, 0.0)
    if abs(a.sum() - 1.0) > 1e-12:
        raise ValueError(f"a sums to {a.sum()}, not 1")
    return a


def _weights(p: float, K: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(1, K + 1, dtype=float)
    return k, p * p * (1.0 - p) ** (k - 1.0)


def _entropy_terms(a: np.ndarray, K: int, k: np.ndarray):
    jj = np.arange(1, a.size + 1, dtype=float)
    T = np.cumsum((a / jj)[::-1])[::-1]
    U = np.cumsum(a[::-1])[::-1]
    u = np.maximum(U[:K] - k * T[:K], 0.0)
    return jj, T, U, u


def _g(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    m = x > 0
    out[m] = -x[m] * np.log2(x[m])
    return out


def objective(a, p: float, K: int, M: int) -> float:
    """sum_k w_k [H(C_k a) + correction], evaluated through shared suffix sums."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not (1 <= K < M):
        raise ValueError(f"need 1 <= K < M, got K={K}, M={M}")
    a = _check_simplex(a, M)
    k, w = _weights(p, K)
    _, T, _, u = _entropy_terms(a, K, k)
    G = np.cumsum(_g(T[:K]))
    val = float(np.sum(w * (G + _g(u))))
    x = a[-1]
    if x > 0:
        arg = 2.0 * k * x / ((k + 1.0) * M)
        val += float(np.sum(w * (-(2.0 * k * x / M) * np.log2(arg))))
    return val


def objective_gradient(a, p: float, K: int, M: int) -> np.ndarray:
    """Analytic gradient of objective in a; +inf sentinel on a_M at the boundary."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not (1 <= K < M):
        raise ValueError(f"need 1 <= K < M, got K={K}, M={M}")
    a = np.maximum(np.asarray(a, dtype=float), 0.0)
    k, w = _weights(p, K)
    jj, T, _, u = _entropy_terms(a, K, k)
    s = -(np.log2(np.maximum(T, 1e-300)) + _LOG2E)
    P = np.cumsum(s)
    r = -(np.log2(np.maximum(u, 1e-300)) + _LOG2E)
    wP = np.concatenate(([0.0], np.cumsum(w * P[:K])))
    Wt = np.cumsum(w[::-1])[::-1]
    R1 = np.concatenate(([0.0], np.cumsum(w * r)))
    R2 = np.concatenate(([0.0], np.cumsum(w * k * r)))
    jint = np.arange(1, M + 1)
    m = np.minimum(jint - 1, K)
    t1 = wP[m] + np.where(jint <= K, P[jint - 1] * Wt[np.minimum(jint, K) - 1], 0.0)
    t2 = jint * R1[m] - R2[m]
    grad = (t1 + t2) / jj
    x = a[-1]
    if p == 0.0:
        grad[-1] += 0.0
    elif x > 0:
        arg = 2.0 * k * x / ((k + 1.0) * M)
        grad[-1] += float(np.sum(w * (-(2.0 * k / M) * (np.log2(arg) + _LOG2E))))
    else:
        grad[-1] = _GRAD_SENTINEL
    return grad


@dataclass(frozen=True)
class OptimizationResult:
    """Certified (value, argmax, duality gap, iteration count) of one maximization."""

    value: float
    argmax: np.ndarray
    gap: float
    iterations: int


def maximize_s1(p: float, K: int, M: int | None = None, tol: float = 1e-7,
                max_iter: int = 100000, trace_path=None) -> OptimizationResult:
    """Maximize the truncated objective over the simplex, to duality gap <= tol."""
    if M is None:
        M = 4 * K
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not (1 <= K < M):
        raise ValueError(f"need 1 <= K < M, got K={K}, M={M}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    a = np.full(M, 1.0 / M)
    if p == 0.0:
        return OptimizationResult(value=0.0, argmax=a, gap=0.0, iterations=0)
    k, w = _weights(p, K)
    trace: list[tuple[int, float, float]] = []

    def grad_at(v: np.ndarray) -> np.ndarray:
        return objective_gradient(v, p, K, M)

    gap = np.inf
    for it in range(max_iter):
        gr = grad_at(a)
        imax = int(np.argmax(gr))
        gap = float(gr[imax] - gr @ a)
        if trace_path is not None:
            trace.append((it, objective(a, p, K, M), gap))
        if gap <= tol:
            if trace_path is not None:
                _write_trace(trace_path, trace)
            return OptimizationResult(
                value=objective(a, p, K, M), argmax=a, gap=gap, iterations=it
            )
        active = np.where(a > 0, gr, np.inf)
        imin = int(np.argmin(active))
        d = np.zeros(M)
        d[imax] += 1.0
        d[imin] -= 1.0
        budget = float(a[imin])
        hi_grad = grad_at(np.maximum(a + budget * d, 0.0)) @ d
        if hi_grad >= 0:
            gamma = budget
        else:
            lo, hi = 0.0, budget
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                if grad_at(a + mid * d) @ d > 0:
                    lo = mid
                else:
                    hi = mid
            gamma = 0.5 * (lo + hi)
        a = a + gamma * d
        a[imin] = 0.0 if gamma >= budget else max(float(a[imin]), 0.0)
        a = np.maximum(a, 0.0)
        a /= a.sum()
    if trace_path is not None:
        _write_trace(trace_path, trace)
    best = OptimizationResult(
        value=objective(a, p, K, M), argmax=a, gap=gap, iterations=max_iter
    )
    raise NonConvergenceError(
        f"duality gap {gap:.3e} above tol {tol:.3e} after {max_iter} iterations", best
    )


def _write_trace(path, rows: list[tuple[int, float, float]]) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "value", "gap"])
        for it, value, gap in rows:
            writer.writerow([it, repr(value), repr(gap)])


def assemble_L(p: float, K: int, M: int | None = None, tol: float = 1e-7,
               tail_tol: float = 1e-12, trace_path=None,
               max_iter: int = 100000) -> float:
    """Certified upper bound: optimizer value + duality gap + truncated-class tail."""
    result = maximize_s1(p, K, M, tol=tol, max_iter=max_iter, trace_path=trace_path)
    return result.value + result.gap + series_from(p, K + 1, tail_tol)


def ell(eps: float, K: int, M: int | None = None, tol: float = 1e-7,
        max_iter: int = 100000) -> float:
    """assemble_L at the combined error rate p = eps(2 - eps)."""
    if not (0.0 <= eps <= 1.0):
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    return assemble_L(eps * (2.0 - eps), K, M, tol=tol, max_iter=max_iter)
