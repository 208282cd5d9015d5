"""Lower-bound estimators for approximation in the weighted sup norm.

Weighted polynomials of degree ``m`` concentrate on ``[-sqrt(m), sqrt(m)]``
(the Mhaskar-Rakhmanov-Saff range for the square-root Gaussian weight), and
their L2-over-sup ratio grows at most like ``m^(1/4)``.  The subspace
estimator bounds from below the worst-case ratio of the weighted sup norm
to the Sobolev norm over a hyperbolic-cross polynomial space, via the
smallest singular value of the scaled evaluation matrix on a grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .approx import GridSpec
from .caps import check_cap, resolve_cap
from .hermite import gauss_hermite_rule, hermite_table
from .indexsets import hyperbolic_cross, rho

# hard guard from the evaluation-matrix design: |columns| * |grid points|
_MATRIX_GUARD = 10**8


def mrs_number(m: int) -> float:
    """Mhaskar-Rakhmanov-Saff number for the square-root Gaussian weight: sqrt(m)."""
    if m < 1:
        raise ValueError(f"degree must be >= 1, got {m}")
    return math.sqrt(m)


@dataclass(frozen=True)
class NikolskiiRecord:
    m: int
    trials: int
    seed: int
    max_ratio: float
    mean_ratio: float


@dataclass(frozen=True)
class NikolskiiSweep:
    records: tuple[NikolskiiRecord, ...]
    fitted_exponent: float


def nikolskii_check(
    m: int, trials: int, seed: int = 0, grid_spacing: float = 0.01
) -> NikolskiiRecord:
    """Sample the L2(dx)-over-sup ratio of random weighted polynomials.

    For ``trials`` random degree-``m`` polynomials (standard normal
    coefficients in the orthonormal Hermite basis), computes
    ``||phi sqrt(g)||_L2(R)`` exactly with an ``(m+1)``-node rule (the
    square has degree ``2m``) and the sup norm on a grid over
    ``[-sqrt(2m) - 6, sqrt(2m) + 6]``.  The max ratio grows like
    ``m^(1/4)`` at worst; only the exponent is meaningful, not the
    constant.
    """
    if m < 1:
        raise ValueError(f"degree must be >= 1, got {m}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    coeffs = rng.standard_normal((trials, m + 1))
    l2, sup = weighted_polynomial_norms(coeffs, grid_spacing=grid_spacing)
    ratios = l2 / sup
    return NikolskiiRecord(m, trials, seed, float(np.max(ratios)), float(np.mean(ratios)))


def weighted_polynomial_norms(
    coeffs: np.ndarray, grid_spacing: float = 0.01
) -> tuple[np.ndarray, np.ndarray]:
    """L2(dx) and grid sup norms of ``phi sqrt(g)`` for coefficient rows.

    Row ``t`` of ``coeffs`` holds the orthonormal-basis coefficients of a
    polynomial of degree ``m = coeffs.shape[1] - 1``.  The L2 norm uses the
    ``(m+1)``-node rule with Christoffel weights in fully weighted form,
    ``sum_i (phi sqrt(g1))(x_i)^2 / sum_k h_k(x_i)^2``, keeping every
    factor well-scaled at any degree; the sup is taken over the grid
    ``[-sqrt(2m) - 6, sqrt(2m) + 6]``.
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
    m = coeffs.shape[1] - 1
    rule = gauss_hermite_rule(m + 1)
    node_table = hermite_table(m, rule.nodes, weighted=True)
    node_values = coeffs @ node_table
    l2 = np.sqrt(node_values**2 @ (1.0 / np.sum(node_table**2, axis=0)))

    radius = math.sqrt(2.0 * m) + 6.0
    n = int(math.ceil(radius / grid_spacing))
    grid = grid_spacing * np.arange(-n, n + 1, dtype=float)
    grid_table = hermite_table(m, grid, weighted=True)
    sup = np.max(np.abs(coeffs @ grid_table), axis=1)
    return l2, sup


def nikolskii_sweep(
    degrees: Sequence[int], trials: int, seed: int = 0, grid_spacing: float = 0.01
) -> NikolskiiSweep:
    """Run the ratio check over a degree sweep and fit the growth exponent."""
    records = tuple(
        nikolskii_check(m, trials, seed=seed, grid_spacing=grid_spacing)
        for m in sorted(set(int(m) for m in degrees))
    )
    if len(records) >= 2:
        logs_m = np.log([r.m for r in records])
        logs_ratio = np.log([r.max_ratio for r in records])
        exponent = float(np.polyfit(logs_m, logs_ratio, 1)[0])
    else:
        exponent = math.nan
    return NikolskiiSweep(records, exponent)


@dataclass(frozen=True)
class BernsteinEstimate:
    """Certified lower bound for the subspace sup-over-Sobolev infimum.

    ``estimate = sigma_min(M) / sqrt(grid size)`` where column ``k`` of
    ``M`` holds the weighted basis values scaled by ``rho(k, alpha)^(-1/2)``:
    a true lower bound for the grid-restricted infimum (sup over a grid
    dominates the scaled Euclidean mean), hence for the full infimum too.
    ``witness_upper`` is the grid ratio of the minimizing singular vector,
    an upper bracket for the grid infimum.
    """

    estimate: float
    n: int
    shape: float
    witness_upper: float
    grid_points: int
    seed: int


def _halton_points(count: int, d: int, seed: int) -> np.ndarray:
    """Low-discrepancy points in the unit cube with a seeded random shift."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    if d > len(primes):
        raise ValueError(f"low-discrepancy grid supports d <= {len(primes)}")
    out = np.empty((count, d))
    for j in range(d):
        base = primes[j]
        seq = np.zeros(count)
        denom = 1.0
        idx = np.arange(1, count + 1)
        remaining = idx.astype(np.int64)
        while remaining.max() > 0:
            denom *= base
            remaining, digit = np.divmod(remaining, base)
            seq += digit / denom
        out[:, j] = seq
    shift = np.random.default_rng(seed).random(d)
    return (out + shift) % 1.0


def bernstein_lower_estimate(
    alpha: float,
    xi: int,
    d: int,
    grid_spec: GridSpec | None = None,
    seed: int = 0,
    cap: int | None = None,
) -> BernsteinEstimate:
    """Certified lower bound over the cross subspace, with the decay shape.

    The grid spans ``[-2 sqrt(2^xi) - 4, 2 sqrt(2^xi) + 4]`` per coordinate:
    degrees in the cross reach ``2^xi``, and a weighted polynomial of
    degree ``K`` oscillates out to ``|x| = sqrt(4K + 2)`` under the
    ``exp(-x^2/4)`` weight, so a shorter grid cannot see combinations
    concentrated in the outer band and the certificate collapses.
    Tensorized for ``d <= 2``, low-discrepancy subsampled (seeded) for
    ``d >= 3``.  Also reports the reference decay shape
    ``2^(-alpha xi/2 - d xi/4)``.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    members = hyperbolic_cross(xi, d, cap=cap)
    n = len(members)
    spec = grid_spec or GridSpec(spacing=0.05, margin=4.0)
    k_max = 2**xi
    concentration_radius = 2.0 * math.sqrt(k_max) + spec.margin

    if d <= 2:
        axis = spec.axis_for_radius(concentration_radius)
        if axis.size**d < n:
            raise ValueError(
                f"degenerate grid: {axis.size ** d} points for {n} basis columns"
            )
        _guard_matrix(n * axis.size**d, cap)
        table = hermite_table(k_max, axis, weighted=True)
        if d == 1:
            matrix = table[[k[0] for k in members], :].T
        else:
            cols = np.empty((axis.size * axis.size, n))
            for col, (k1, k2) in enumerate(members):
                cols[:, col] = np.outer(table[k1], table[k2]).ravel()
            matrix = cols
        grid_points = axis.size**d
    else:
        radius = concentration_radius
        grid_points = min(8 * n, max(resolve_cap(cap) // max(n, 1), 2 * n))
        _guard_matrix(n * grid_points, cap)
        points = (2.0 * _halton_points(grid_points, d, seed) - 1.0) * radius
        tables = [hermite_table(k_max, points[:, j], weighted=True) for j in range(d)]
        matrix = np.empty((grid_points, n))
        for col, k in enumerate(members):
            prod = tables[0][k[0]].copy()
            for j in range(1, d):
                prod *= tables[j][k[j]]
            matrix[:, col] = prod
        if grid_points < n:
            raise ValueError(
                f"degenerate grid: {grid_points} points for {n} basis columns"
            )

    scales = np.array([rho(k, alpha) ** -0.5 for k in members])
    matrix = matrix * scales
    _, sing, vt = np.linalg.svd(matrix, full_matrices=False)
    sigma_min = float(sing[-1])
    witness = vt[-1]
    witness_upper = float(np.max(np.abs(matrix @ witness)))
    shape = 2.0 ** (-alpha * xi / 2.0 - d * xi / 4.0)
    return BernsteinEstimate(
        estimate=sigma_min / math.sqrt(grid_points),
        n=n,
        shape=shape,
        witness_upper=witness_upper,
        grid_points=grid_points,
        seed=seed,
    )


def _guard_matrix(cells: int, cap: int | None) -> None:
    if cells > _MATRIX_GUARD:
        raise ValueError(
            f"evaluation matrix would need {cells} cells, guard is {_MATRIX_GUARD}"
        )
    check_cap(cells, cap, "evaluation matrix")
