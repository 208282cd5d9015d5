"""Constructive budget assembly over the integer-lattice cube decomposition.

A rank budget ``n`` is distributed over unit cubes centered at ``k`` in
``Z^d`` as ``n_k = floor(rho n exp(-(delta / 2a) |k|^2))``, restricted to
``|k| < xi_n`` with ``xi_n = sqrt(2 a log(n) / delta)``; the normalizer
``rho = 2^-d (1 - exp(-delta/(2a)))^d`` makes the total never exceed
``n``.  Cube operator norms carry explicit Gaussian weight factors whose
product decays like ``exp(-delta |k|^2)`` once ``delta`` is at most half
the gap ``1/(2q) - 1/(2p)``.  Combining the two gives a numeric envelope
for the global error of the assembled approximation, plus the smooth
partition of unity the decomposition rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .caps import check_cap

SignedIndex = tuple[int, ...]


def sign_plus(v: float) -> int:
    """Sign convention with ``sign(0) = +1``."""
    return 1 if v >= 0 else -1


def choose_delta(p: float, q: float, theta: float, verify_range: int = 50) -> float:
    """Pick the quadratic decay rate for the cube weight product.

    Returns ``delta = (1/(2q) - 1/(2p)) / 2``, half the analytic supremum,
    and verifies on the integer range ``|k| <= verify_range`` that the
    log weight product plus ``delta k^2`` peaks strictly inside the range
    (the weight factors are coordinate-separable, so the 1-D check covers
    every dimension).
    """
    _validate_pq_theta(p, q, theta)
    delta = 0.5 * (1.0 / (2.0 * q) - 1.0 / (2.0 * p))
    ks = np.arange(-verify_range, verify_range + 1, dtype=float)
    signs = np.where(ks >= 0, 1.0, -1.0)
    profile = (
        (ks + theta * signs / 2.0) ** 2 / (2.0 * p)
        - (ks - theta * signs / 2.0) ** 2 / (2.0 * q)
        + delta * ks * ks
    )
    peak = int(np.argmax(profile))
    if peak == 0 or peak == ks.size - 1:
        raise ArithmeticError(
            f"weight-product profile still growing at |k| = {verify_range}"
        )
    return delta


def _validate_pq_theta(p: float, q: float, theta: float) -> None:
    if not (1 <= q < p):
        raise ValueError(f"need 1 <= q < p, got p={p}, q={q}")
    if not theta > 1:
        raise ValueError(f"need theta > 1, got {theta}")


def xi_threshold(n: int, delta: float, a: float) -> float:
    """Lattice truncation radius ``sqrt(2 a log(n) / delta)``."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if delta <= 0 or a <= 0:
        raise ValueError(f"need positive delta and a, got delta={delta}, a={a}")
    return math.sqrt(2.0 * a * math.log(n) / delta)


def budget_normalizer(delta: float, a: float, d: int) -> float:
    """``rho = 2^-d (1 - exp(-delta/(2a)))^d``."""
    return 2.0**-d * (1.0 - math.exp(-delta / (2.0 * a))) ** d


@dataclass(frozen=True)
class BudgetPlan:
    """Allocation ``k -> n_k`` over the lattice ball ``|k| < xi_n``."""

    n: int
    a: float
    delta: float
    d: int
    xi_n: float
    allocations: Mapping[SignedIndex, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.allocations.values())

    def to_json_dict(self) -> dict:
        items = sorted(self.allocations.items())
        return {
            "n": self.n,
            "a": self.a,
            "delta": self.delta,
            "d": self.d,
            "xi_n": self.xi_n,
            "allocations": [{"k": list(k), "n_k": v} for k, v in items],
        }


def _iter_ball(xi_sq: float, d: int) -> Iterator[SignedIndex]:
    """Lattice points with ``|k|^2 < xi_sq``, lexicographic order."""

    def rec(rem: float, depth: int, prefix: SignedIndex) -> Iterator[SignedIndex]:
        if depth == d:
            yield prefix
            return
        bound = int(math.floor(math.sqrt(rem)))
        while bound * bound >= rem:
            bound -= 1
        for k in range(-bound, bound + 1):
            yield from rec(rem - k * k, depth + 1, prefix + (k,))

    if xi_sq > 0:
        yield from rec(xi_sq, 0, ())


def _sum_squares_counts(max_m: int, d: int) -> np.ndarray:
    """``counts[m]`` = number of ``k in Z^d`` with ``|k|^2 = m``."""
    base = np.zeros(max_m + 1, dtype=np.int64)
    base[0] = 1
    j = 1
    while j * j <= max_m:
        base[j * j] = 2
        j += 1
    counts = base
    for _ in range(d - 1):
        counts = np.convolve(counts, base)[: max_m + 1]
    return counts


def _allocation(rho_n: float, rate: float, m: int) -> int:
    value = rho_n * math.exp(-rate * m)
    if not math.isfinite(value):
        raise OverflowError(f"allocation formula overflowed at |k|^2 = {m}")
    return int(math.floor(value))


def build_budget(
    n: int, a: float, delta: float, d: int, cap: int | None = None
) -> BudgetPlan:
    """Materialize the allocation map over ``|k| < xi_n``; total is <= n."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    xi = xi_threshold(n, delta, a)
    check_cap(_strict_below(xi * xi) + 1, cap, "budget radius table")
    count = int(_sum_squares_counts(_strict_below(xi * xi), d).sum())
    check_cap(count * max(d, 1), cap, f"budget ball (xi_n={xi:.2f}, d={d})")
    rho_n = budget_normalizer(delta, a, d) * n
    rate = delta / (2.0 * a)
    allocations = {
        k: _allocation(rho_n, rate, sum(v * v for v in k))
        for k in _iter_ball(xi * xi, d)
    }
    return BudgetPlan(n, a, delta, d, xi, allocations)


def _strict_below(x: float) -> int:
    """Largest integer strictly below ``x`` (at least 0)."""
    m = int(math.floor(x))
    if m >= x:
        m -= 1
    return max(m, 0)


def budget_total(n: int, a: float, delta: float, d: int) -> int:
    """Exact ``sum n_k`` without materializing the plan.

    Allocations depend on ``k`` only through ``|k|^2``, so the sum groups
    by the integer ``m = |k|^2`` with sum-of-squares multiplicities.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    xi = xi_threshold(n, delta, a)
    max_m = _strict_below(xi * xi)
    check_cap(max_m + 1, None, "budget radius table")
    counts = _sum_squares_counts(max_m, d)
    rho_n = budget_normalizer(delta, a, d) * n
    rate = delta / (2.0 * a)
    return int(
        sum(int(counts[m]) * _allocation(rho_n, rate, m) for m in range(max_m + 1))
    )


@dataclass(frozen=True)
class CubeWeights:
    """Operator-norm bounds for the transfer maps of cube ``k``.

    ``a_norm_bound = exp(|k + theta sign(k)/2|^2 / (2p))`` and
    ``b_norm_bound = exp(-|k - theta sign(k)/2|^2 / (2q))`` with
    ``sign(0) = +1``; stored in log form since the first factor overflows
    for large ``|k|``.
    """

    k: SignedIndex
    p: float
    q: float
    theta: float
    log_a_norm_bound: float
    log_b_norm_bound: float

    @property
    def a_norm_bound(self) -> float:
        return math.exp(self.log_a_norm_bound)

    @property
    def b_norm_bound(self) -> float:
        return math.exp(self.log_b_norm_bound)

    @property
    def log_product(self) -> float:
        return self.log_a_norm_bound + self.log_b_norm_bound

    @property
    def product(self) -> float:
        return math.exp(self.log_product)


def cube_weights(k: Sequence[int], p: float, q: float, theta: float) -> CubeWeights:
    """The two exponential norm bounds for cube ``k``."""
    _validate_pq_theta(p, q, theta)
    k = tuple(int(v) for v in k)
    log_a = 0.0
    log_b = 0.0
    for kj in k:
        shift = theta * sign_plus(kj) / 2.0
        log_a += (kj + shift) ** 2 / (2.0 * p)
        log_b -= (kj - shift) ** 2 / (2.0 * q)
    return CubeWeights(k, p, q, theta, log_a, log_b)


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, strictly between inside."""
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        raw = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
        mirrored = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1.0 - u, 1.0)), 0.0)
    return raw / (raw + mirrored)


@dataclass(frozen=True)
class PartitionOfUnity:
    """Smooth tensor partition of unity subordinate to cubes of side theta.

    The univariate bump ``eta`` equals 1 on ``[-1/2, 1/2]``, vanishes
    outside ``(-theta/2, theta/2)``, and transitions smoothly in between,
    so the integer translates of its plateau already cover the line and
    the normalizing denominator ``sum_m eta(t - m)`` stays >= 1.
    ``phi(k, x) = prod_j eta(x_j - k_j) / sum_m eta(x_j - m)``.
    """

    theta: float

    @property
    def transition(self) -> float:
        return (self.theta - 1.0) / 2.0

    def bump(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        w = self.transition
        half = self.theta / 2.0
        return _smooth_step((t + half) / w) * _smooth_step((half - t) / w)

    def bump_sum(self, t: np.ndarray | float) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        reach = int(math.ceil(self.theta / 2.0 + 0.5))
        nearest = np.rint(t)
        total = np.zeros_like(t)
        for offset in range(-reach, reach + 1):
            total += self.bump(t - (nearest + offset))
        return total

    def phi_axis(self, t: np.ndarray | float, k: int = 0) -> np.ndarray:
        return self.bump(np.asarray(t, dtype=float) - k) / self.bump_sum(t)

    def phi(self, k: Sequence[int], x: np.ndarray) -> np.ndarray:
        """Evaluate the cube-``k`` bump at points ``x`` of shape ``(..., d)``."""
        k = tuple(int(v) for v in k)
        pts = np.asarray(x, dtype=float)
        if pts.shape[-1] != len(k):
            raise ValueError(f"points have dimension {pts.shape[-1]}, index {len(k)}")
        out = np.ones(pts.shape[:-1])
        for j, kj in enumerate(k):
            out = out * self.phi_axis(pts[..., j], kj)
        return out

    def sobolev_norm_phi0(
        self, alpha: int, p: float, d: int = 1, step: float = 2e-4
    ) -> float:
        """Mixed Sobolev norm of the center bump, by finite differences.

        Tensor structure reduces the d-variate norm to a power of the 1-D
        quantity ``sum_{i <= alpha} integral |phi^(i)|^p``.  Supports
        ``alpha <= 2``; accuracy is limited by the difference stencil and
        is meant for recording a bounding constant, not tight values.
        """
        if alpha < 0 or alpha > 2:
            raise ValueError(f"finite-difference norm supports alpha <= 2, got {alpha}")
        half = self.theta / 2.0
        t = np.arange(-half - 0.05, half + 0.05 + step, step)
        values = self.phi_axis(t)
        integrals = [float(np.trapezoid(np.abs(values) ** p, dx=step))]
        deriv = values
        for _ in range(alpha):
            deriv = np.gradient(deriv, step)
            integrals.append(float(np.trapezoid(np.abs(deriv) ** p, dx=step)))
        one_dim = math.fsum(integrals)
        return (one_dim**d) ** (1.0 / p)


def build_partition_of_unity(theta: float) -> PartitionOfUnity:
    """Construct the smooth partition of unity for cube side ``theta > 1``."""
    if not theta > 1:
        raise ValueError(f"need theta > 1 so the cubes overlap, got {theta}")
    return PartitionOfUnity(theta)


def default_block_rate(a: float, b: float) -> Callable[[int], float]:
    """Model block decay ``m^-a (1 + log m)^b``, with the 0 budget as 1."""

    def rate(m: int) -> float:
        m = max(int(m), 1)
        return m**-a * (1.0 + math.log(m)) ** b

    return rate


def weight_product_log(k: Sequence[int], p: float, q: float, theta: float) -> float:
    """Log of the cube weight product; separable, so uses ``|k_j|`` directly."""
    half = theta / 2.0
    total = 0.0
    for v in k:
        t = abs(v)
        total += (t + half) ** 2 / (2.0 * p) - (t - half) ** 2 / (2.0 * q)
    return total


def assemble_envelope(
    n: int,
    a: float,
    b: float,
    p: float,
    q: float,
    theta: float,
    d: int,
    block_rate: Callable[[int], float] | None = None,
    cap: int | None = None,
) -> float:
    """Numeric upper-bound envelope assembled from per-cube contributions.

    ``sum_{|k| < xi_n} weight(k) block_rate(n_k)`` plus the weight sum over
    ``|k| >= xi_n``, the latter extended outward until the neglected shells
    are below 1e-12 of the accumulated tail.  With the default block rate
    the envelope tracks ``n^-a (log n)^b`` up to a bounded factor.
    """
    delta = choose_delta(p, q, theta)
    if block_rate is None:
        block_rate = default_block_rate(a, b)
    plan = build_budget(n, a, delta, d, cap=cap)

    ordered = sorted(
        plan.allocations.items(), key=lambda kv: (sum(v * v for v in kv[0]), kv[0])
    )
    main = math.fsum(
        math.exp(weight_product_log(k, p, q, theta)) * block_rate(n_k)
        for k, n_k in ordered
    )

    # tail over |k| >= xi_n, grown shell by shell until relatively negligible
    xi_sq = plan.xi_n * plan.xi_n
    tail = 0.0
    lo_sq = xi_sq
    radius = math.sqrt(xi_sq)
    enumerated = 0
    while True:
        radius += 2.0
        hi_sq = radius * radius
        shell = 0.0
        for k in _iter_ball(hi_sq, d):
            m = sum(v * v for v in k)
            if m >= lo_sq:
                shell += math.exp(weight_product_log(k, p, q, theta))
                enumerated += 1
        check_cap(enumerated * max(d, 1), cap, "envelope tail enumeration")
        tail += shell
        lo_sq = hi_sq
        if tail > 0 and shell <= 1e-13 * tail:
            break
        if shell == 0.0 and tail == 0.0 and radius > plan.xi_n + 20.0:
            break
    return main + tail


def geometric_binomial_sum(x: float, k: int) -> float:
    """Closed form ``sum_j x^j C(j + k, k) = (1 - x)^(-k - 1)`` on 0 < x < 1."""
    if not 0 < x < 1:
        raise ValueError(f"need 0 < x < 1, got {x}")
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    return (1.0 - x) ** (-k - 1)


def geometric_binomial_partial(x: float, k: int, terms: int) -> float:
    """Partial sum of the same series, for convergence checking."""
    if not 0 < x < 1:
        raise ValueError(f"need 0 < x < 1, got {x}")
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    return math.fsum(x**j * math.comb(j + k, k) for j in range(terms))
