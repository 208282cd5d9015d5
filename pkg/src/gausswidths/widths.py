"""Exact width sequences of the Gaussian Sobolev embedding, Hilbert case.

For the embedding of the Hermite-characterized Sobolev space of mixed
smoothness ``alpha`` into L2(gamma), every standard s-number sequence
(approximation, Kolmogorov, Gelfand, Weyl, Bernstein; entropy up to
constants) equals the non-increasing rearrangement of the diagonal values
``(prod (k_j + 1))^(-alpha/2)``.  This module computes that rearrangement
exactly from integer products, the position identity linking it to the
counting function, the asymptotic-constant ratio, and the table of rate
exponents across the covered ``(p, q)`` regimes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .caps import check_cap
from .indexsets import count_c


class RegimeNotCoveredError(ValueError):
    """Raised when no covered regime yields the requested rate exponent."""


@dataclass(frozen=True)
class WidthSequence:
    """Non-increasing width values; ``values[n]`` is the (n+1)-th width."""

    alpha: float
    d: int
    values: np.ndarray


@dataclass(frozen=True)
class RateExponent:
    """Asymptotic rate ``n^(-a) (log n)^b``."""

    a: float
    b: float


@dataclass(frozen=True)
class WidthAtCount:
    """A width value together with the 1-based position where it occurs."""

    value: float
    position: int


@dataclass(frozen=True)
class CoincidenceReport:
    """Record of the Hilbert-case coincidence of s-number scales.

    With Hilbert source and target there is a single width sequence:
    approximation, Kolmogorov, Gelfand, Weyl and Bernstein numbers are all
    equal to it, so every general ordering between them holds with
    equality.  Entropy numbers are not computed; they are sandwiched
    between ``entropy_lower_factor * s_n`` and ``entropy_upper_factor *
    s_n`` by the documented two-sided comparison.
    """

    alpha: float
    d: int
    values: np.ndarray
    coincident_kinds: tuple[str, ...]
    entropy_lower_factor: float
    entropy_upper_factor: float
    orderings_hold: bool


def nth_product(n: int, d: int) -> int:
    """Smallest integer ``t`` whose level set has at least ``n`` members.

    Equivalently the ``n``-th smallest value of ``prod (k_j + 1)`` over all
    multi-indices, counted with multiplicity.
    """
    if n < 1:
        raise ValueError(f"position must be >= 1, got {n}")
    lo, hi = 1, n
    while lo < hi:
        mid = (lo + hi) // 2
        if count_c(mid, d) >= n:
            hi = mid
        else:
            lo = mid + 1
    return lo


def rearranged_products(d: int, n_max: int, cap: int | None = None) -> np.ndarray:
    """First ``n_max`` values of the sorted sequence of index products.

    Enumerates the level set of the smallest adequate threshold and sorts
    the exact int64 products ascending; widths are obtained by powering
    afterwards, so ties are ordered exactly.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    r = nth_product(n_max, d)
    total = count_c(r, d)
    check_cap(total, cap, f"width rearrangement (r={r}, d={d})")

    chunks: list[np.ndarray] = []

    def rec(budget: int, depth: int, prefix_prod: int) -> None:
        if depth == d - 1:
            chunks.append(prefix_prod * np.arange(1, budget + 1, dtype=np.int64))
            return
        for k in range(budget):
            rec(budget // (k + 1), depth + 1, prefix_prod * (k + 1))

    rec(r, 0, 1)
    products = np.sort(np.concatenate(chunks))
    return products[:n_max]


def exact_widths(
    alpha: float, d: int, n_max: int, cap: int | None = None
) -> WidthSequence:
    """First ``n_max`` exact widths, ``(prod (k_j + 1))^(-alpha/2)`` rearranged."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    products = rearranged_products(d, n_max, cap=cap)
    values = products.astype(float) ** (-alpha / 2.0)
    return WidthSequence(alpha, d, values)


def width_at_count(r: int, alpha: float, d: int) -> WidthAtCount:
    """The width ``r^(-alpha/2)`` and its exact position ``count_c(r, d)``.

    Every integer ``r >= 1`` occurs as an index product, so the sorted
    product sequence takes the value ``r`` exactly at position
    ``count_c(r, d)``.
    """
    if r < 1 or r != int(r):
        raise ValueError(f"r must be a positive integer, got {r}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return WidthAtCount(float(r) ** (-alpha / 2.0), count_c(r, d))


def asymptotic_limit(alpha: float, d: int) -> float:
    """Limit of ``s_n / (n^(-alpha/2) (ln n)^(alpha(d-1)/2))``: ``(1/(d-1)!)^(alpha/2)``."""
    return (1.0 / math.factorial(d - 1)) ** (alpha / 2.0)


def asymptotic_ratio(alpha: float, d: int, n: int) -> float:
    """Ratio of the exact ``n``-th width to its asymptotic shape (natural log)."""
    if n < 2:
        raise ValueError(f"ratio requires n >= 2, got {n}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    t = nth_product(n, d)
    return (n / t) ** (alpha / 2.0) / math.log(n) ** (alpha * (d - 1) / 2.0)


_KINDS = ("a", "b", "c", "d", "e", "x")


def _beta_exponent(p: float, q: float, alpha: float) -> float:
    # assumes 1 <= q < p and alpha > 0; boundary alphas are not covered
    if p <= 2:
        return alpha
    if q <= 2:
        threshold = 1.0 / p
        if alpha > threshold:
            return alpha - 1.0 / p + 0.5
        if alpha < threshold:
            return alpha * p / 2.0
        raise RegimeNotCoveredError(
            f"regime not covered: alpha = 1/p = {threshold} is a boundary case"
        )
    threshold = (1.0 / q - 1.0 / p) / (p / 2.0 - 1.0)
    if alpha > threshold:
        return alpha - 1.0 / p + 1.0 / q
    if alpha < threshold:
        return alpha * p / 2.0
    raise RegimeNotCoveredError(
        f"regime not covered: alpha = {threshold} is a boundary case"
    )


def rate_exponent(kind: str, p: float, q: float, alpha: float, d: int) -> RateExponent:
    """Rate exponents ``(a, b)`` with ``s_n ~ n^(-a) (log n)^b``.

    Covered regimes:

    * ``p = q = 2``: every kind in ``a, b, c, d, e, x`` decays like
      ``n^(-alpha/2) (log n)^((d-1) alpha/2)``.
    * ``1 <= q < p < infinity``: kinds ``a, c, d, e`` decay like
      ``n^(-alpha) (log n)^((d-1) alpha)``; kinds ``x, b`` use the exponent
      ``beta`` of the underlying periodic Weyl/Bernstein table, which
      depends on the position of ``p, q`` relative to 2.  For ``q = 1``
      only kinds ``a, d, e, x`` are covered.

    Everything else (``p <= q`` other than ``p = q = 2``, boundary
    ``alpha`` values of the ``beta`` table, nonpositive ``alpha``) raises
    :class:`RegimeNotCoveredError`; there is no extrapolation.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown s-number kind {kind!r}, expected one of {_KINDS}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if alpha <= 0:
        raise RegimeNotCoveredError(f"regime not covered: alpha must be > 0, got {alpha}")
    if p == 2 and q == 2:
        return RateExponent(alpha / 2.0, (d - 1) * alpha / 2.0)
    if not (1 <= q < p < math.inf):
        raise RegimeNotCoveredError(
            f"regime not covered: need 1 <= q < p < inf or p = q = 2, got p={p}, q={q}"
        )
    if q == 1 and kind in ("b", "c"):
        raise RegimeNotCoveredError(
            f"regime not covered: kind {kind!r} is excluded when q = 1"
        )
    if kind in ("a", "c", "d", "e"):
        return RateExponent(alpha, (d - 1) * alpha)
    beta = _beta_exponent(p, q, alpha)
    return RateExponent(beta, (d - 1) * beta)


def linf_exponent_bounds(alpha: float, d: int) -> tuple[RateExponent, RateExponent]:
    """Two-sided rate exponents for approximation in the sqrt(g)-weighted sup norm.

    Returns ``(lower, upper)``: the widths are bounded below by the shape
    ``n^(-alpha/2 - d/4)`` and above by ``n^(-alpha/2 - 1/12 + 1/2)``, each
    with its ``(log n)`` power.  Requires ``alpha > 5/6``; the two
    exponents do not meet and neither side is claimed sharp.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if alpha <= 5.0 / 6.0:
        raise RegimeNotCoveredError(
            f"regime not covered: weighted-sup bounds need alpha > 5/6, got {alpha}"
        )
    lower_a = alpha / 2.0 + d / 4.0
    upper_a = alpha / 2.0 + 1.0 / 12.0 - 0.5
    lower = RateExponent(lower_a, lower_a * (d - 1))
    upper = RateExponent(upper_a, (alpha / 2.0 + 1.0 / 12.0) * (d - 1))
    return lower, upper


def hilbert_coincidence_check(
    alpha: float, d: int, n_max: int, cap: int | None = None
) -> CoincidenceReport:
    """Compute the single Hilbert-case sequence and record the scale orderings.

    The kinds ``a, b, c, d, x`` coincide exactly with the computed
    sequence, so ``b_n <= min(c_n, d_n)`` and every other general ordering
    hold with equality; entropy numbers satisfy
    ``s_n / (2 sqrt 2) <= e_n <= s_n`` and are recorded as a sandwich, not
    computed.
    """
    seq = exact_widths(alpha, d, n_max, cap=cap)
    values = seq.values
    b_n = c_n = d_n = a_n = values  # one sequence for all coincident kinds
    orderings = bool(
        np.all(b_n <= np.minimum(c_n, d_n) + 1e-15) and np.all(b_n <= a_n + 1e-15)
    )
    return CoincidenceReport(
        alpha=alpha,
        d=d,
        values=values,
        coincident_kinds=("a", "b", "c", "d", "x"),
        entropy_lower_factor=1.0 / (2.0 * math.sqrt(2.0)),
        entropy_upper_factor=1.0,
        orderings_hold=orderings,
    )
