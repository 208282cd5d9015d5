"""Multi-index combinatorics for tensor-product Hermite approximation.

A multi-index is a tuple of nonnegative integers ``k = (k_1, ..., k_d)``.
This module provides the product weights ``rho(k, alpha) = prod (k_j+1)^alpha``,
enumeration and counting of the product level set ``{k : prod (k_j+1) <= r}``,
closed-form two-sided bounds for its cardinality, dyadic blocks, and
hyperbolic cross index sets built from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .caps import check_cap

MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class IndexSet:
    """A finite, duplicate-free, lexicographically ordered set of multi-indices.

    Parameters
    ----------
    d : int
        Dimension; every member has length ``d``.
    members : tuple of MultiIndex
        Sorted lexicographically, no duplicates.
    """

    d: int
    members: tuple[MultiIndex, ...]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        for k in self.members:
            if len(k) != self.d:
                raise ValueError(f"member {k} has length {len(k)}, expected {self.d}")
            if any(kj < 0 for kj in k):
                raise ValueError(f"member {k} has negative entries")

    @classmethod
    def from_iterable(cls, d: int, members: Iterable[Sequence[int]]) -> "IndexSet":
        uniq = sorted({tuple(int(v) for v in k) for k in members})
        return cls(d, tuple(uniq))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.members)

    def __contains__(self, k: object) -> bool:
        return tuple(k) in set(self.members) if isinstance(k, (tuple, list)) else False


def rho(k: Sequence[int], alpha: float) -> float:
    """Product weight ``prod_j (k_j + 1)^alpha`` for ``alpha > 0``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    prod = 1
    for kj in k:
        prod *= kj + 1
    return float(prod) ** alpha


def _validate_level_args(r: float, d: int) -> int:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if r < 1:
        raise ValueError(f"level threshold must be >= 1, got {r}")
    return math.floor(r)


def iter_level_set(r: float, d: int) -> Iterator[MultiIndex]:
    """Yield all ``k`` with ``prod (k_j + 1) <= r`` in lexicographic order.

    Streams members without materializing the whole set; ``level_set``
    collects them into an :class:`IndexSet`.
    """
    cap_int = _validate_level_args(r, d)

    def rec(budget: int, depth: int, prefix: tuple[int, ...]) -> Iterator[MultiIndex]:
        if depth == d - 1:
            for k in range(budget):
                yield prefix + (k,)
            return
        for k in range(budget):
            yield from rec(budget // (k + 1), depth + 1, prefix + (k,))

    yield from rec(cap_int, 0, ())


def level_set(r: float, d: int, cap: int | None = None) -> IndexSet:
    """The set ``{k in N_0^d : prod (k_j + 1) <= r}`` as an :class:`IndexSet`."""
    n = count_c(r, d)
    check_cap(n * d, cap, f"level_set(r={r}, d={d})")
    return IndexSet(d, tuple(iter_level_set(r, d)))


_COUNT_MEMO: dict[tuple[int, int], int] = {}


def count_c(r: float, d: int) -> int:
    """Cardinality of the product level set, ``|{k : prod (k_j+1) <= r}|``.

    Computed by the coordinate recursion ``c(r, d) = sum_{k<floor(r)}
    c(r/(k+1), d-1)`` with the summands grouped by equal integer quotient,
    so no set is materialized.  Results are memoized on ``(floor(r), d)``;
    feasible up to ``r = 1e8`` for ``d <= 4``.
    """
    big_r = _validate_level_args(r, d)

    def rec(n: int, dim: int) -> int:
        if dim == 1:
            return n
        key = (n, dim)
        cached = _COUNT_MEMO.get(key)
        if cached is not None:
            return cached
        total = 0
        m = 1
        while m <= n:
            q = n // m
            m_last = n // q
            total += (m_last - m + 1) * rec(q, dim - 1)
            m = m_last + 1
        _COUNT_MEMO[key] = total
        return total

    return rec(big_r, d)


def chernov_dung_bounds(r: float, d: int) -> tuple[float, float]:
    """Closed-form lower and upper bounds for ``count_c(r, d)``.

    Valid for ``r`` above an unquantified threshold; use
    :func:`probe_bound_violations` to locate the empirical onset.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if r <= 1:
        raise ValueError(f"bounds require r > 1, got {r}")
    log_r = math.log(r)
    fact = math.factorial(d - 1)
    lower = r * log_r**d / (fact * (log_r + d))
    shifted = log_r + d * math.log(2)
    upper = r * shifted**d / (fact * (shifted + d - 1))
    return lower, upper


def probe_bound_violations(r_values: Iterable[float], d: int) -> list[int]:
    """Return the integer thresholds where the closed-form bounds fail.

    For each ``r`` checks ``lower < count_c(r, d) < upper``; the returned
    list (sorted, deduplicated ``floor(r)`` values) is empirically the
    small-``r`` region below the bounds' validity threshold.
    """
    bad = set()
    for r in r_values:
        lower, upper = chernov_dung_bounds(r, d)
        c = count_c(r, d)
        if not (lower < c < upper):
            bad.add(math.floor(r))
    return sorted(bad)


def dyadic_block(s: Sequence[int]) -> IndexSet:
    """The box ``prod_j [floor(2^(s_j - 1)), 2^(s_j)]`` for a level vector s."""
    s = tuple(int(v) for v in s)
    if any(v < 0 for v in s):
        raise ValueError(f"level vector must be nonnegative, got {s}")
    d = len(s)
    ranges = [range(2 ** (sj - 1) if sj >= 1 else 0, 2**sj + 1) for sj in s]

    def rec(depth: int, prefix: tuple[int, ...]) -> Iterator[MultiIndex]:
        if depth == d:
            yield prefix
            return
        for k in ranges[depth]:
            yield from rec(depth + 1, prefix + (k,))

    return IndexSet(d, tuple(rec(0, ())))


def cross_level(k: Sequence[int]) -> int:
    """Smallest ``|s|_1`` over level vectors whose dyadic block contains ``k``.

    Per coordinate the minimal admissible level is 0 for ``k_j <= 1`` and
    ``ceil(log2 k_j)`` otherwise; membership in the hyperbolic cross of
    radius ``xi`` is exactly ``cross_level(k) <= xi``.
    """
    total = 0
    for kj in k:
        if kj < 0:
            raise ValueError(f"multi-index entries must be nonnegative, got {k}")
        if kj > 1:
            total += (kj - 1).bit_length()
    return total


def in_cross(k: Sequence[int], xi: int) -> bool:
    return cross_level(k) <= xi


def iter_hyperbolic_cross(xi: int, d: int) -> Iterator[MultiIndex]:
    """Yield the hyperbolic cross of radius ``xi`` in lexicographic order."""
    if xi < 0:
        raise ValueError(f"cross radius must be nonnegative, got {xi}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")

    def rec(budget: int, depth: int, prefix: tuple[int, ...]) -> Iterator[MultiIndex]:
        if depth == d:
            yield prefix
            return
        k = 0
        while True:
            level = 0 if k <= 1 else (k - 1).bit_length()
            if level > budget:
                break
            yield from rec(budget - level, depth + 1, prefix + (k,))
            k += 1

    yield from rec(xi, 0, ())


def hyperbolic_cross(xi: int, d: int, cap: int | None = None) -> IndexSet:
    """Union of all dyadic blocks with level sum at most ``xi``, deduplicated."""
    n = cross_cardinality_value(xi, d)
    check_cap(n * d, cap, f"hyperbolic_cross(xi={xi}, d={d})")
    return IndexSet(d, tuple(iter_hyperbolic_cross(xi, d)))


def cross_cardinality_value(xi: int, d: int) -> int:
    """Cardinality of the hyperbolic cross, without materializing it.

    Counts per-coordinate choices by minimal level: 2 values at level 0,
    ``2^(t-1)`` values at level ``t >= 1``.
    """
    if xi < 0:
        raise ValueError(f"cross radius must be nonnegative, got {xi}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    weights = [2] + [2 ** (t - 1) for t in range(1, xi + 1)]
    # counts[b] = number of tails with level budget exactly <= b
    counts = [1] * (xi + 1)
    for _ in range(d):
        new = [0] * (xi + 1)
        for b in range(xi + 1):
            new[b] = sum(weights[t] * counts[b - t] for t in range(b + 1))
        counts = new
    return counts[xi]


def cross_cardinality_ratio(xi: int, d: int) -> float:
    """``|Q_xi| / (2^xi xi^(d-1))``, the cardinality against its growth shape."""
    if xi < 1:
        raise ValueError(f"ratio requires xi >= 1, got {xi}")
    return cross_cardinality_value(xi, d) / (2.0**xi * float(xi) ** (d - 1))


def max_cross_product(xi: int, d: int) -> int:
    """Largest ``prod (k_j + 1)`` over the cross; bounded by ``2^(xi + d)``."""
    best = 0
    for k in iter_hyperbolic_cross(xi, d):
        prod = 1
        for kj in k:
            prod *= kj + 1
        best = max(best, prod)
    return best
