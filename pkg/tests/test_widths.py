import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from gausswidths.indexsets import count_c
from gausswidths.widths import (
    RegimeNotCoveredError,
    asymptotic_limit,
    asymptotic_ratio,
    exact_widths,
    hilbert_coincidence_check,
    linf_exponent_bounds,
    nth_product,
    rate_exponent,
    rearranged_products,
    width_at_count,
)

DATA = Path(__file__).parent / "data"


def oracle_products(n_max, d):
    """Box-scan oracle with numpy inner loop; independent of the recursion."""
    if d == 1:
        return np.arange(1, n_max + 1, dtype=np.int64)
    chunks = []
    if d == 2:
        for k1 in range(n_max):
            top = n_max // (k1 + 1)
            if top == 0:
                break
            chunks.append((k1 + 1) * np.arange(1, top + 1, dtype=np.int64))
    else:
        for k1 in range(n_max):
            if k1 + 1 > n_max:
                break
            for k2 in range(n_max):
                p2 = (k1 + 1) * (k2 + 1)
                top = n_max // p2
                if top == 0:
                    break
                chunks.append(p2 * np.arange(1, top + 1, dtype=np.int64))
    return np.sort(np.concatenate(chunks))[:n_max]


class TestExactWidths:
    def test_d1_harmonic(self):
        values = exact_widths(2.0, 1, 10).values
        np.testing.assert_allclose(values, 1.0 / np.arange(1, 11), rtol=1e-15)

    def test_d2_example(self):
        values = exact_widths(2.0, 2, 8).values
        np.testing.assert_allclose(
            values, [1, 0.5, 0.5, 1 / 3, 1 / 3, 0.25, 0.25, 0.25], rtol=1e-15
        )

    def test_first_width_is_one(self):
        for alpha, d in [(0.5, 1), (1.0, 2), (3.0, 3)]:
            assert exact_widths(alpha, d, 5).values[0] == 1.0

    def test_non_increasing_positive(self):
        values = exact_widths(1.5, 2, 300).values
        assert (np.diff(values) <= 0).all()
        assert (values > 0).all()

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_matches_box_oracle(self, d):
        n_max = 3000
        oracle = oracle_products(n_max, d)
        mine = rearranged_products(d, n_max)
        assert np.array_equal(oracle, mine)

    def test_scaling_law(self):
        base = exact_widths(1.0, 2, 200).values
        for alpha in (0.5, 2.0, 3.7):
            np.testing.assert_allclose(
                exact_widths(alpha, 2, 200).values, base**alpha, rtol=1e-12
            )

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            exact_widths(0.0, 1, 5)
        with pytest.raises(ValueError):
            exact_widths(1.0, 1, 0)


class TestWidthAtCount:
    def test_r1(self):
        res = width_at_count(1, 2.0, 3)
        assert res.value == 1.0 and res.position == 1

    def test_d2_alpha2_r4(self):
        res = width_at_count(4, 2.0, 2)
        assert res.value == pytest.approx(0.25, rel=1e-15)
        assert res.position == 8

    def test_d2_alpha1_r3(self):
        res = width_at_count(3, 1.0, 2)
        assert res.value == pytest.approx(3.0**-0.5, rel=1e-15)
        assert res.position == 5

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_anchor_identity_exact(self, d):
        # integer-product equality: position count_c(r, d) holds product r
        products = rearranged_products(d, count_c(200, d))
        for r in range(1, 201):
            assert products[count_c(r, d) - 1] == r

    def test_position_consistent_with_sequence(self):
        for alpha in (1.0, 2.0):
            seq = exact_widths(alpha, 2, count_c(30, 2)).values
            for r in (2, 7, 19, 30):
                res = width_at_count(r, alpha, 2)
                assert seq[res.position - 1] == pytest.approx(res.value, rel=1e-15)


class TestAsymptotics:
    def test_d1_identically_one(self):
        for alpha in (0.5, 1.0, 2.0):
            for n in (2, 17, 1000, 10**6):
                assert asymptotic_ratio(alpha, 1, n) == pytest.approx(1.0, rel=1e-15)

    def test_limit_values(self):
        assert asymptotic_limit(2.0, 2) == 1.0
        assert asymptotic_limit(1.0, 3) == pytest.approx(math.sqrt(0.5), rel=1e-15)

    def test_d2_alpha2_approaches_one_from_below(self):
        ratios = [asymptotic_ratio(2.0, 2, n) for n in (10**3, 10**4, 10**5, 10**6)]
        assert all(r < 1 for r in ratios)
        deviations = [abs(r - 1) for r in ratios]
        assert all(a > b for a, b in zip(deviations, deviations[1:]))

    def test_nth_product_matches_sorted_sequence(self):
        products = rearranged_products(2, 500)
        for n in (1, 2, 10, 499, 500):
            assert nth_product(n, 2) == products[n - 1]

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            asymptotic_ratio(1.0, 2, 1)


def load_table():
    with open(DATA / "rate_table.json", encoding="utf-8") as handle:
        return json.load(handle)


class TestRateTable:
    def test_golden_rate_cases(self):
        table = load_table()
        for case in table["rate_cases"]:
            label = f"{case['kind']} p={case['p']} q={case['q']} alpha={case['alpha']} d={case['d']}"
            if "refused" in case:
                with pytest.raises(RegimeNotCoveredError):
                    rate_exponent(case["kind"], case["p"], case["q"], case["alpha"], case["d"])
            else:
                got = rate_exponent(case["kind"], case["p"], case["q"], case["alpha"], case["d"])
                assert got.a == pytest.approx(float(Fraction(case["a"])), abs=1e-12), label
                assert got.b == pytest.approx(float(Fraction(case["b"])), abs=1e-12), label

    def test_golden_linf_cases(self):
        table = load_table()
        for case in table["linf_cases"]:
            if "refused" in case:
                with pytest.raises(RegimeNotCoveredError):
                    linf_exponent_bounds(case["alpha"], case["d"])
            else:
                lower, upper = linf_exponent_bounds(case["alpha"], case["d"])
                assert lower.a == pytest.approx(float(Fraction(case["lower_a"])), abs=1e-12)
                assert lower.b == pytest.approx(float(Fraction(case["lower_b"])), abs=1e-12)
                assert upper.a == pytest.approx(float(Fraction(case["upper_a"])), abs=1e-12)
                assert upper.b == pytest.approx(float(Fraction(case["upper_b"])), abs=1e-12)

    def test_unknown_kind_is_usage_error(self):
        with pytest.raises(ValueError) as err:
            rate_exponent("z", 3, 2, 1, 2)
        assert not isinstance(err.value, RegimeNotCoveredError)

    def test_hilbert_case_covers_all_kinds(self):
        for kind in "abcdex":
            got = rate_exponent(kind, 2, 2, 1.5, 3)
            assert got.a == pytest.approx(0.75)
            assert got.b == pytest.approx(1.5)

    def test_refusal_message_is_stable(self):
        with pytest.raises(RegimeNotCoveredError, match="regime not covered"):
            rate_exponent("a", 2, 3, 1, 2)


class TestCoincidence:
    def test_orderings_hold(self):
        report = hilbert_coincidence_check(2.0, 2, 50)
        assert report.orderings_hold
        assert report.coincident_kinds == ("a", "b", "c", "d", "x")

    def test_d2_alpha2_eighth_value(self):
        report = hilbert_coincidence_check(2.0, 2, 8)
        assert report.values[7] == pytest.approx(0.25, rel=1e-15)

    def test_entropy_sandwich_constant(self):
        report = hilbert_coincidence_check(1.0, 1, 5)
        assert report.entropy_lower_factor == pytest.approx(1 / (2 * math.sqrt(2)), rel=1e-15)
        assert report.entropy_upper_factor == 1.0
