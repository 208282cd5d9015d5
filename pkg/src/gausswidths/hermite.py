"""Orthonormal probabilists' Hermite polynomials under the Gaussian measure.

The basis ``H_k`` used throughout is normalized so that ``\\int H_j H_k dgamma
= delta_jk`` where ``gamma`` is the standard Gaussian probability measure with
density ``g(x) = (2 pi)^(-d/2) exp(-|x|^2/2)``.  Provides stable plain and
``sqrt(g)``-weighted evaluation, Gauss-Hermite quadrature against ``gamma``,
the coefficient transform, and the L2(gamma) / Sobolev norms of finite series.

All types are immutable and all functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .caps import check_cap
from .indexsets import IndexSet, MultiIndex, rho

# sqrt of the 1-D Gaussian density at 0, (2 pi)^(-1/4)
_SQRT_G1_AT_0 = (2.0 * math.pi) ** -0.25


def gaussian_density(x: Sequence[float] | np.ndarray) -> float:
    """Standard Gaussian density ``(2 pi)^(-d/2) exp(-|x|^2 / 2)`` at ``x``."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    d = arr.shape[-1]
    return float((2.0 * math.pi) ** (-d / 2.0) * np.exp(-0.5 * np.dot(arr, arr)))


def hermite_eval(k: int, x: float | np.ndarray) -> float | np.ndarray:
    """Evaluate the orthonormal Hermite polynomial of degree ``k``.

    Uses the three-term recurrence
    ``sqrt(k+1) H_{k+1}(x) = x H_k(x) - sqrt(k) H_{k-1}(x)`` with
    ``H_0 = 1`` and ``H_1(x) = x``.  Unweighted values overflow for large
    ``k`` and ``|x|``; use :func:`hermite_eval_weighted` on wide ranges.
    """
    if k < 0:
        raise ValueError(f"degree must be nonnegative, got {k}")
    xa = np.asarray(x, dtype=float)
    h_prev = np.ones_like(xa)
    if k == 0:
        return float(h_prev) if xa.ndim == 0 else h_prev
    h_cur = xa.copy()
    for j in range(1, k):
        h_prev, h_cur = h_cur, (xa * h_cur - math.sqrt(j) * h_prev) / math.sqrt(j + 1)
    return float(h_cur) if xa.ndim == 0 else h_cur


# rescaling bounds for the log-magnitude/sign recurrence form
_SCALE_THRESHOLD = 2.0**512
_SCALE_FACTOR = 2.0**-1024
_SCALE_LOG = 1024.0 * math.log(2.0)
# below this |x| the weight exp(-x^2/4) is a normal double and the plain
# weight-folded recurrence is exact; beyond it the start value underflows
_PLAIN_WEIGHT_LIMIT = 52.0


def hermite_eval_weighted(k: int, x: float | np.ndarray) -> float | np.ndarray:
    """Evaluate ``H_k(x) sqrt(g_1(x))`` without overflow or premature underflow.

    For moderate ``|x|`` the weight ``sqrt(g_1(x)) = (2 pi)^(-1/4)
    exp(-x^2/4)`` is folded into the recurrence start, keeping every
    intermediate bounded by 1.  Where the start value would underflow
    (``|x| > 52``) the recurrence runs on the plain polynomial values in
    log-magnitude/sign form, rescaling by powers of two, and the weight is
    applied in log space at the end; safe for ``k`` up to at least 10^4.
    """
    if k < 0:
        raise ValueError(f"degree must be nonnegative, got {k}")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xa)
    small = np.abs(xa) <= _PLAIN_WEIGHT_LIMIT
    if small.any():
        xs = xa[small]
        h_prev = _SQRT_G1_AT_0 * np.exp(-0.25 * xs * xs)
        if k == 0:
            out[small] = h_prev
        else:
            h_cur = xs * h_prev
            for j in range(1, k):
                h_prev, h_cur = (
                    h_cur,
                    (xs * h_cur - math.sqrt(j) * h_prev) / math.sqrt(j + 1),
                )
            out[small] = h_cur
    if (~small).any():
        xl = xa[~small]
        log_scale = -0.25 * xl * xl - 0.25 * math.log(2.0 * math.pi)
        p_prev = np.ones_like(xl)
        if k == 0:
            out[~small] = np.exp(log_scale)
        else:
            p_cur = xl.copy()
            for j in range(1, k):
                p_prev, p_cur = (
                    p_cur,
                    (xl * p_cur - math.sqrt(j) * p_prev) / math.sqrt(j + 1),
                )
                big = np.abs(p_cur) > _SCALE_THRESHOLD
                if big.any():
                    p_cur[big] *= _SCALE_FACTOR
                    p_prev[big] *= _SCALE_FACTOR
                    log_scale[big] += _SCALE_LOG
            out[~small] = p_cur * np.exp(log_scale)
    if np.asarray(x).ndim == 0:
        return float(out[0])
    return out


def hermite_table(k_max: int, x: np.ndarray, weighted: bool = False) -> np.ndarray:
    """Table of ``H_k(x)`` (or weighted values) for all ``k <= k_max``.

    Returns an array of shape ``(k_max + 1, len(x))``; row ``k`` is degree
    ``k`` evaluated at every point.  Weighted tables switch to the
    rescaled log-magnitude form on the columns where ``exp(-x^2/4)``
    would underflow.
    """
    if k_max < 0:
        raise ValueError(f"degree must be nonnegative, got {k_max}")
    xa = np.asarray(x, dtype=float).ravel()
    if weighted and np.abs(xa).max(initial=0.0) > _PLAIN_WEIGHT_LIMIT:
        return _weighted_table_scaled(k_max, xa)
    table = np.empty((k_max + 1, xa.size))
    if weighted:
        table[0] = _SQRT_G1_AT_0 * np.exp(-0.25 * xa * xa)
    else:
        table[0] = 1.0
    if k_max >= 1:
        table[1] = xa * table[0]
    for j in range(1, k_max):
        table[j + 1] = (xa * table[j] - math.sqrt(j) * table[j - 1]) / math.sqrt(j + 1)
    return table


def _weighted_table_scaled(k_max: int, xa: np.ndarray) -> np.ndarray:
    table = np.empty((k_max + 1, xa.size))
    log_scale = -0.25 * xa * xa - 0.25 * math.log(2.0 * math.pi)
    scale = np.exp(log_scale)
    p_prev = np.ones_like(xa)
    table[0] = scale
    if k_max >= 1:
        p_cur = xa.copy()
        table[1] = p_cur * scale
        for j in range(1, k_max):
            p_prev, p_cur = (
                p_cur,
                (xa * p_cur - math.sqrt(j) * p_prev) / math.sqrt(j + 1),
            )
            big = np.abs(p_cur) > _SCALE_THRESHOLD
            if big.any():
                p_cur[big] *= _SCALE_FACTOR
                p_prev[big] *= _SCALE_FACTOR
                log_scale[big] += _SCALE_LOG
                scale = np.exp(log_scale)
            table[j + 1] = p_cur * scale
    return table


def tensor_eval(
    k: Sequence[int], x: Sequence[float] | np.ndarray, weighted: bool = False
) -> float:
    """Evaluate the tensor-product polynomial ``prod_j H_{k_j}(x_j)``.

    With ``weighted=True`` the result carries the factor ``sqrt(g(x))``,
    i.e. each factor is the weighted univariate evaluation.
    """
    k = tuple(int(v) for v in k)
    xa = np.asarray(x, dtype=float).ravel()
    if len(k) != xa.size:
        raise ValueError(f"index length {len(k)} != point length {xa.size}")
    evaluate = hermite_eval_weighted if weighted else hermite_eval
    out = 1.0
    for kj, xj in zip(k, xa):
        out *= evaluate(kj, float(xj))
    return out


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the Gaussian probability measure.

    ``nodes`` are strictly increasing and symmetric about 0; ``weights``
    are positive and sum to 1; polynomials of degree up to ``2m - 1`` are
    integrated exactly against ``dgamma``.
    """

    m: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))


def gauss_hermite_rule(m: int) -> QuadratureRule:
    """Build the ``m``-node Gauss-Hermite rule for ``dgamma``.

    Nodes are the eigenvalues of the symmetric Jacobi matrix of the
    orthonormal recurrence (zero diagonal, off-diagonal ``sqrt(1..m-1)``),
    symmetrized exactly.  Weights use the Christoffel identity
    ``w_i = 1 / sum_{k<m} H_k(x_i)^2`` evaluated in weighted form
    ``h_0(x_i)^2 / sum_k h_k(x_i)^2``, which stays well-scaled at every
    node (eigenvector-based weights lose all accuracy once they underflow
    toward the edge nodes), then renormalized to unit total mass.
    """
    if m < 1:
        raise ValueError(f"node count must be >= 1, got {m}")
    if m == 1:
        return QuadratureRule(1, np.zeros(1), np.ones(1))
    jacobi = np.zeros((m, m))
    off = np.sqrt(np.arange(1, m, dtype=float))
    jacobi[np.arange(m - 1), np.arange(1, m)] = off
    jacobi[np.arange(1, m), np.arange(m - 1)] = off
    nodes = np.linalg.eigvalsh(jacobi)
    # enforce exact +- symmetry of the spectrum
    nodes = 0.5 * (nodes - nodes[::-1])
    if m % 2 == 1:
        nodes[m // 2] = 0.0
    table = hermite_table(m - 1, nodes, weighted=True)
    weights = table[0] ** 2 / np.sum(table**2, axis=0)
    weights = 0.5 * (weights + weights[::-1])
    weights /= weights.sum()
    return QuadratureRule(m, nodes, weights)


@dataclass(frozen=True)
class HermiteSeries:
    """Finite Hermite expansion: dimension plus a coefficient map.

    ``coeffs`` maps multi-indices of length ``d`` to finite real
    coefficients.  The mapping is copied at construction; treat instances
    as immutable.
    """

    d: int
    coeffs: Mapping[MultiIndex, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        clean: dict[MultiIndex, float] = {}
        for k, c in self.coeffs.items():
            key = tuple(int(v) for v in k)
            if len(key) != self.d:
                raise ValueError(f"index {key} has length {len(key)}, expected {self.d}")
            if any(v < 0 for v in key):
                raise ValueError(f"index {key} has negative entries")
            value = float(c)
            if not math.isfinite(value):
                raise ValueError(f"coefficient at {key} is not finite: {value}")
            clean[key] = value
        object.__setattr__(self, "coeffs", clean)

    def support(self) -> IndexSet:
        return IndexSet.from_iterable(self.d, self.coeffs.keys())

    def max_degree(self) -> int:
        """Largest coordinate degree appearing in the support (0 if empty)."""
        return max((max(k) for k in self.coeffs), default=0)

    def __len__(self) -> int:
        return len(self.coeffs)


def series_eval(series: HermiteSeries, points: np.ndarray) -> np.ndarray:
    """Evaluate a finite series at an ``(n, d)`` array of points.

    Intended for moderate degrees; unweighted Hermite values grow fast.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != series.d:
        raise ValueError(f"points have dimension {pts.shape[1]}, series has {series.d}")
    k_max = series.max_degree()
    tables = [hermite_table(k_max, pts[:, j]) for j in range(series.d)]
    out = np.zeros(pts.shape[0])
    for k, c in series.coeffs.items():
        term = np.full(pts.shape[0], c)
        for j, kj in enumerate(k):
            term *= tables[j][kj]
        out += term
    return out


def hermite_transform(
    f: Callable[[np.ndarray], float],
    indices: IndexSet,
    m: int,
    cap: int | None = None,
) -> HermiteSeries:
    """Compute Hermite coefficients ``int f H_k dgamma`` by tensor quadrature.

    Exact (to roundoff) whenever ``f`` is a polynomial of per-coordinate
    degree ``p`` with ``p + max_j k_j <= 2m - 1``; for other integrands the
    caller picks ``m`` large enough to resolve ``f``.

    Parameters
    ----------
    f : callable
        Receives one point as a length-``d`` array, returns a float.
    indices : IndexSet
        Multi-indices whose coefficients are wanted.
    m : int
        Per-axis node count of the tensor Gauss-Hermite rule.
    """
    if len(indices) == 0:
        raise ValueError("index set is empty")
    if m < 1:
        raise ValueError(f"node count must be >= 1, got {m}")
    d = indices.d
    check_cap(m**d, cap, f"hermite_transform tensor grid m={m}, d={d}")
    rule = gauss_hermite_rule(m)
    k_max = max(max(k) for k in indices)
    weighted_rows = hermite_table(k_max, rule.nodes) * rule.weights  # (k_max+1, m)

    grid_values = np.empty((m,) * d)
    point = np.empty(d)
    for idx in np.ndindex(*grid_values.shape):
        for j, i in enumerate(idx):
            point[j] = rule.nodes[i]
        grid_values[idx] = f(point)

    coeff_tensor = grid_values
    for _ in range(d):
        coeff_tensor = np.tensordot(weighted_rows, coeff_tensor, axes=(1, 0))
        coeff_tensor = np.moveaxis(coeff_tensor, 0, -1)
    return HermiteSeries(d, {k: float(coeff_tensor[k]) for k in indices})


def norm_l2_gamma(series: HermiteSeries) -> float:
    """L2(gamma) norm via Parseval: ``sqrt(sum of squared coefficients)``."""
    return math.sqrt(math.fsum(c * c for c in series.coeffs.values()))


def norm_sobolev(series: HermiteSeries, alpha: float) -> float:
    """Sobolev norm ``sqrt(sum rho(k, alpha) |coeff|^2)`` for ``alpha > 0``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return math.sqrt(
        math.fsum(rho(k, alpha) * c * c for k, c in series.coeffs.items())
    )
