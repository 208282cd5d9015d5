import math
from itertools import product

import numpy as np
import pytest

from gausswidths.assembler import (
    assemble_envelope,
    budget_normalizer,
    budget_total,
    build_budget,
    build_partition_of_unity,
    choose_delta,
    cube_weights,
    default_block_rate,
    geometric_binomial_partial,
    geometric_binomial_sum,
    weight_product_log,
    xi_threshold,
)


class TestChooseDelta:
    def test_p2_q1(self):
        assert choose_delta(2, 1, 1.5) == pytest.approx(1 / 8, rel=1e-15)

    def test_p4_q2(self):
        assert choose_delta(4, 2, 1.5) == pytest.approx(1 / 16, rel=1e-15)

    def test_rejects_equal_exponents(self):
        with pytest.raises(ValueError):
            choose_delta(2, 2, 1.5)

    def test_rejects_theta_one(self):
        with pytest.raises(ValueError):
            choose_delta(2, 1, 1.0)

    def test_profile_peaks_inside_range(self):
        # the verified profile max sits strictly inside |k| <= 50
        delta = choose_delta(3, 1.2, 2.0)
        ks = np.arange(-50, 51, dtype=float)
        signs = np.where(ks >= 0, 1.0, -1.0)
        prof = (
            (ks + 2.0 * signs / 2) ** 2 / 6.0
            - (ks - 2.0 * signs / 2) ** 2 / 2.4
            + delta * ks**2
        )
        assert 0 < np.argmax(prof) < ks.size - 1


class TestXiThreshold:
    def test_collapse(self):
        n = 3
        assert xi_threshold(n, 2.0 * math.log(n), 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_substitution(self):
        # delta = 1/8, a = 1: xi = sqrt(16 log n)
        n = 10**4
        assert xi_threshold(n, 1 / 8, 1.0) == pytest.approx(math.sqrt(16 * math.log(n)), rel=1e-14)

    def test_increasing_in_n(self):
        values = [xi_threshold(n, 0.25, 1.0) for n in (2, 10, 100, 10**5)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            xi_threshold(1, 0.25, 1.0)


class TestBudget:
    def test_tiny_n_all_zero(self):
        plan = build_budget(2, 1.0, 1 / 8, 2)
        assert all(v == 0 for v in plan.allocations.values())
        assert plan.total() == 0

    def test_feasible_d1_example(self):
        plan = build_budget(10**4, 1.0, 1 / 8, 1)
        assert plan.total() <= 10**4

    def test_center_is_max(self):
        plan = build_budget(5000, 1.0, 1 / 8, 2)
        assert plan.allocations[(0, 0)] == max(plan.allocations.values())

    def test_allocations_cover_exactly_the_ball(self):
        plan = build_budget(500, 0.5, 0.25, 2)
        xi_sq = plan.xi_n**2
        box = int(math.ceil(plan.xi_n))
        expected = {
            k
            for k in product(range(-box, box + 1), repeat=2)
            if k[0] ** 2 + k[1] ** 2 < xi_sq
        }
        assert set(plan.allocations) == expected

    def test_formula_values(self):
        n, a, delta, d = 1000, 1.0, 1 / 8, 1
        plan = build_budget(n, a, delta, d)
        rho_n = budget_normalizer(delta, a, d) * n
        for k, nk in plan.allocations.items():
            assert nk == math.floor(rho_n * math.exp(-(delta / (2 * a)) * k[0] ** 2))

    def test_nonincreasing_in_radius(self):
        plan = build_budget(10**5, 1.0, 1 / 16, 1)
        ks = sorted(plan.allocations)
        for k in ks:
            if k[0] >= 0 and (k[0] + 1,) in plan.allocations:
                assert plan.allocations[(k[0] + 1,)] <= plan.allocations[k]

    @pytest.mark.parametrize("n", [10, 1000, 10**5])
    @pytest.mark.parametrize("a", [0.5, 2.0])
    @pytest.mark.parametrize("delta", [1 / 16, 1 / 4])
    @pytest.mark.parametrize("d", [1, 3])
    def test_total_matches_plan_and_is_feasible(self, n, a, delta, d):
        plan = build_budget(n, a, delta, d)
        total = budget_total(n, a, delta, d)
        assert total == plan.total()
        assert total <= n

    def test_json_schema(self):
        plan = build_budget(100, 1.0, 1 / 8, 2)
        payload = plan.to_json_dict()
        assert list(payload) == ["n", "a", "delta", "d", "xi_n", "allocations"]
        assert all(set(item) == {"k", "n_k"} for item in payload["allocations"])

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            build_budget(1, 1.0, 1 / 8, 1)
        with pytest.raises(ValueError):
            build_budget(100, -1.0, 1 / 8, 1)


class TestCubeWeights:
    def test_k0_values(self):
        w = cube_weights((0,), 2, 1, 1.5)
        assert w.a_norm_bound == pytest.approx(math.exp(0.75**2 / 4), rel=1e-14)
        assert w.b_norm_bound == pytest.approx(math.exp(-(0.75**2) / 2), rel=1e-14)

    def test_symmetry(self):
        for k in [(3,), (-3,), (2, -5), (-2, 5)]:
            w_pos = cube_weights(k, 3, 1.5, 1.25)
            w_neg = cube_weights(tuple(-v for v in k), 3, 1.5, 1.25)
            assert w_pos.log_a_norm_bound == pytest.approx(w_neg.log_a_norm_bound, rel=1e-14)
            assert w_pos.log_b_norm_bound == pytest.approx(w_neg.log_b_norm_bound, rel=1e-14)

    def test_sign_zero_is_plus_one(self):
        w = cube_weights((0,), 4, 2, 1.5)
        # with sign(0) = +1 both factors carry the +theta/2 shift
        assert w.log_a_norm_bound == pytest.approx(0.75**2 / 8, rel=1e-14)
        assert w.log_b_norm_bound == pytest.approx(-(0.75**2) / 4, rel=1e-14)

    def test_product_decay_1d(self):
        p, q, theta = 2, 1, 1.5
        delta = choose_delta(p, q, theta)
        base = cube_weights((0,), p, q, theta).log_product
        for k in range(-50, 51):
            w = cube_weights((k,), p, q, theta)
            assert w.log_product <= base - delta * k * k + 6.0

    def test_product_decay_bounded_2d(self):
        p, q, theta = 3, 1.5, 1.25
        delta = choose_delta(p, q, theta)
        margins = []
        for k in product(range(-20, 21), repeat=2):
            w = cube_weights(k, p, q, theta)
            margins.append(w.log_product + delta * (k[0] ** 2 + k[1] ** 2))
        assert max(margins) < 10.0

    def test_matches_weight_product_log(self):
        w = cube_weights((2, -3), 2.5, 1.5, 1.5)
        assert w.log_product == pytest.approx(weight_product_log((2, -3), 2.5, 1.5, 1.5), rel=1e-14)

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            cube_weights((0,), 1, 2, 1.5)


class TestPartitionOfUnity:
    @pytest.mark.parametrize("theta", [1.25, 1.5, 2.0])
    def test_sums_to_one_1d(self, theta):
        pou = build_partition_of_unity(theta)
        x = np.linspace(-5, 5, 4001)
        total = sum(pou.phi_axis(x, k) for k in range(-9, 10))
        np.testing.assert_allclose(total, 1.0, atol=1e-10)

    def test_sums_to_one_2d(self):
        pou = build_partition_of_unity(1.5)
        axis = np.linspace(-5, 5, 101)
        xx, yy = np.meshgrid(axis, axis)
        pts = np.stack([xx, yy], axis=-1)
        total = np.zeros(pts.shape[:-1])
        for k in product(range(-7, 8), repeat=2):
            total += pou.phi(k, pts)
        np.testing.assert_allclose(total, 1.0, atol=1e-10)

    def test_range_and_support(self):
        pou = build_partition_of_unity(1.5)
        x = np.linspace(-6, 6, 4801)
        values = pou.phi_axis(x, 0)
        assert (values >= 0).all() and (values <= 1).all()
        assert (values[np.abs(x) >= 0.75] == 0).all()

    def test_shift_invariance(self):
        pou = build_partition_of_unity(1.25)
        x = np.linspace(-2, 2, 301)
        np.testing.assert_allclose(pou.phi_axis(x, 3), pou.phi_axis(x - 3, 0), atol=1e-15)

    def test_plateau_keeps_denominator_above_one(self):
        for theta in (1.25, 1.5, 2.0):
            pou = build_partition_of_unity(theta)
            x = np.linspace(-3, 3, 2401)
            assert (pou.bump_sum(x) >= 1.0 - 1e-12).all()

    def test_sobolev_norms_against_recorded_constants(self):
        # construction-specific constants for theta = 1.5, frozen with slack
        pou = build_partition_of_unity(1.5)
        recorded = {
            (0, 1): 1.0,
            (0, 2): 0.915,
            (1, 1): 3.01,
            (1, 2): 2.80,
            (2, 1): 41.5,
            (2, 2): 51.7,
        }
        for (alpha, p), bound in recorded.items():
            value = pou.sobolev_norm_phi0(alpha, p)
            assert value <= bound * 1.02
            assert value >= bound * 0.9

    def test_d_power_identity(self):
        # tensor structure: the d-variate norm is the 1-D quantity to the d/p
        pou = build_partition_of_unity(1.5)
        one = pou.sobolev_norm_phi0(1, 2, d=1)
        two = pou.sobolev_norm_phi0(1, 2, d=2)
        assert two == pytest.approx(one**2, rel=1e-10)

    def test_rejects_theta_at_most_one(self):
        with pytest.raises(ValueError):
            build_partition_of_unity(1.0)


class TestEnvelope:
    def test_normalized_band(self):
        normalized = []
        for n in (100, 1000, 10**4, 10**5, 10**6):
            value = assemble_envelope(n, 1.0, 1.0, 2.0, 1.0, 1.5, 1)
            normalized.append(value * n / math.log(n))
        assert max(normalized) / min(normalized) < 10.0

    def test_doubling_never_increases(self):
        previous = None
        for n in (50, 100, 200, 400, 800, 1600):
            value = assemble_envelope(n, 1.0, 1.0, 2.0, 1.0, 1.5, 1)
            if previous is not None:
                assert value <= previous * (1 + 1e-12)
            previous = value

    def test_d2_larger_than_d1(self):
        v1 = assemble_envelope(10**4, 1.0, 1.0, 2.0, 1.0, 1.5, 1)
        v2 = assemble_envelope(10**4, 1.0, 1.0, 2.0, 1.0, 1.5, 2)
        assert v2 > v1

    def test_custom_block_rate(self):
        flat = assemble_envelope(1000, 1.0, 0.0, 2.0, 1.0, 1.5, 1, block_rate=lambda m: 1.0)
        decaying = assemble_envelope(1000, 1.0, 0.0, 2.0, 1.0, 1.5, 1)
        assert decaying < flat

    def test_block_rate_default_shape(self):
        rate = default_block_rate(2.0, 1.0)
        assert rate(1) == 1.0
        assert rate(0) == rate(1)
        assert rate(100) == pytest.approx(100**-2.0 * (1 + math.log(100)), rel=1e-14)

    def test_precondition_propagates(self):
        with pytest.raises(ValueError):
            assemble_envelope(100, 1.0, 1.0, 2.0, 2.0, 1.5, 1)


class TestGeometricBinomialSum:
    def test_plain_geometric(self):
        assert geometric_binomial_sum(0.5, 0) == pytest.approx(2.0, rel=1e-15)

    def test_k1(self):
        assert geometric_binomial_sum(0.5, 1) == pytest.approx(4.0, rel=1e-15)

    def test_partial_sum_converges(self):
        closed = geometric_binomial_sum(0.9, 3)
        assert closed == pytest.approx(10**4, rel=1e-12)
        assert abs(geometric_binomial_partial(0.9, 3, 2000) - closed) < 1e-10

    def test_rejects_bad_x(self):
        for x in (0.0, 1.0, -0.5, 2.0):
            with pytest.raises(ValueError):
                geometric_binomial_sum(x, 1)
