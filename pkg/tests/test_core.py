"""Geometry, scoring, and ranking primitives."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from propagg.core import (
    AntipodalPairError,
    DimensionMismatchError,
    Profile,
    Ranking,
    TieBreak,
    ZeroVectorError,
    angular_distance,
    exp_map,
    log_map,
    make_profile,
    order_to_positions,
    pair_count,
    rank_batch,
    score,
    unit_vector,
)

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def random_unit(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


class TestAngularDistance:
    def test_identical_vectors_zero(self):
        assert angular_distance(E1, E1) == 0.0

    def test_antipodal_pi(self):
        assert angular_distance(E1, -E1) == pytest.approx(np.pi, abs=0)

    def test_orthogonal_half_pi(self):
        assert angular_distance(E1, E2) == pytest.approx(np.pi / 2, abs=1e-15)

    def test_symmetric(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            u, v = random_unit(rng, 4), random_unit(rng, 4)
            assert angular_distance(u, v) == angular_distance(v, u)

    def test_clamps_rounding_drift(self):
        u = unit_vector(np.array([0.123, 0.456, 0.789]))
        assert angular_distance(u, u) == 0.0
        assert angular_distance(u, -u) == pytest.approx(np.pi, abs=0)

    def test_scale_free_in_both_arguments(self):
        assert angular_distance(3.0 * E1, 0.25 * E2) == pytest.approx(np.pi / 2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            angular_distance(E1, np.array([1.0, 0.0, 0.0]))

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVectorError):
            angular_distance(np.zeros(2), E1)

    def test_triangle_inequality_on_random_triples(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            d = int(rng.integers(2, 9))
            u, v, w = (random_unit(rng, d) for _ in range(3))
            assert angular_distance(u, w) <= (
                angular_distance(u, v) + angular_distance(v, w) + 1e-9
            )


class TestScore:
    def test_basis_projection_first(self):
        assert score(np.array([1.0, 0.0]), np.array([3.0, 7.0])) == 3.0

    def test_basis_projection_second(self):
        assert score(np.array([0.0, 1.0]), np.array([3.0, 7.0])) == 7.0

    def test_orthogonal_pair_zero(self):
        theta = np.array([1.0, 1.0]) / np.sqrt(2)
        assert score(theta, np.array([1.0, -1.0])) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            score(E1, np.array([1.0, 2.0, 3.0]))


class TestRankBatch:
    def test_descending_scores(self):
        items = np.array([[2.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
        assert rank_batch(E1, items).order == (0, 1, 2)

    def test_negated_scores_reverse(self):
        items = np.array([[2.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
        assert rank_batch(-E1, items).order == (2, 1, 0)

    def test_tie_broken_by_index(self):
        items = np.array([[1.0, 5.0], [1.0, -5.0]])
        ranking = rank_batch(E1, items)
        assert ranking.order == (0, 1)
        assert ranking.tie_events == 1

    def test_tie_free_batch_records_no_ties(self):
        items = np.array([[2.0, 0.0], [1.0, 0.0]])
        assert rank_batch(E1, items).tie_events == 0

    def test_scale_invariance_in_theta(self):
        rng = np.random.default_rng(2)
        items = rng.standard_normal((6, 3))
        theta = random_unit(rng, 3)
        base = rank_batch(theta, items)
        for c in (1e-6, 0.5, 7.0, 1e6):
            assert rank_batch(c * theta, items).order == base.order

    def test_determinism_bit_identical(self):
        rng = np.random.default_rng(3)
        items = rng.standard_normal((8, 4))
        theta = random_unit(rng, 4)
        a = rank_batch(theta, items)
        b = rank_batch(theta, items)
        assert a == b

    def test_rejects_nonfinite(self):
        items = np.array([[np.nan, 0.0], [1.0, 0.0]])
        with pytest.raises(ValueError):
            rank_batch(E1, items)

    def test_rejects_dim_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            rank_batch(E1, np.zeros((3, 3)))

    def test_positions_inverts_order(self):
        ranking = Ranking(order=(2, 0, 1))
        assert list(ranking.positions()) == [1, 2, 0]

    def test_order_to_positions_roundtrip(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            order = rng.permutation(7)
            pos = order_to_positions(order)
            assert np.array_equal(np.argsort(pos), order)

    @given(st.floats(min_value=1e-3, max_value=1e3))
    @settings(deadline=None)
    def test_positive_scaling_never_changes_order(self, c):
        items = np.array([[0.3, 1.2], [-0.4, 0.9], [1.1, -0.2], [0.0, 0.0]])
        theta = np.array([0.8, -0.6])
        assert rank_batch(c * theta, items).order == rank_batch(theta, items).order


class TestLogMap:
    def test_zero_distance_gives_zero_vector(self):
        assert np.array_equal(log_map(E1, E1), np.zeros(2))

    def test_quarter_circle(self):
        t = log_map(E1, E2)
        assert np.linalg.norm(t) == pytest.approx(np.pi / 2, abs=1e-9)
        assert abs(np.dot(t, E1)) <= 1e-9

    def test_antipodal_rejected(self):
        with pytest.raises(AntipodalPairError):
            log_map(E1, -E1)

    def test_nearly_antipodal_rejected(self):
        target = unit_vector(np.array([-1.0, 1e-12]))
        with pytest.raises(AntipodalPairError):
            log_map(E1, target)

    def test_norm_equals_angular_distance(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            d = int(rng.integers(2, 9))
            u, v = random_unit(rng, d), random_unit(rng, d)
            if angular_distance(u, v) >= np.pi - 1e-6:
                continue
            t = log_map(u, v)
            assert np.linalg.norm(t) == pytest.approx(
                angular_distance(u, v), abs=1e-9
            )
            assert abs(np.dot(t, u)) <= 1e-9


class TestExpMap:
    def test_zero_tangent_returns_base(self):
        assert np.array_equal(exp_map(E1, np.zeros(2)), E1)

    def test_quarter_circle_reaches_e2(self):
        out = exp_map(E1, np.array([0.0, np.pi / 2]))
        assert np.allclose(out, E2, atol=1e-12)

    def test_half_circle_reaches_antipode(self):
        out = exp_map(E1, np.array([0.0, np.pi]))
        assert angular_distance(out, -E1) <= 1e-9

    def test_result_unit_norm(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            d = int(rng.integers(2, 7))
            base = random_unit(rng, d)
            z = rng.standard_normal(d)
            z -= base * np.dot(base, z)
            out = exp_map(base, z)
            assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)

    def test_distance_matches_tangent_norm(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            d = int(rng.integers(2, 7))
            base = random_unit(rng, d)
            z = rng.standard_normal(d)
            z -= base * np.dot(base, z)
            nz = np.linalg.norm(z)
            if nz < 1e-12:
                continue
            step = float(rng.uniform(0, np.pi - 1e-3))
            out = exp_map(base, z * (step / nz))
            assert angular_distance(base, out) == pytest.approx(step, abs=1e-9)

    def test_non_orthogonal_tangent_rejected(self):
        with pytest.raises(ValueError):
            exp_map(E1, np.array([0.5, 0.5]))

    def test_roundtrip_exp_of_log(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            d = int(rng.integers(2, 9))
            u, v = random_unit(rng, d), random_unit(rng, d)
            if angular_distance(u, v) >= np.pi - 1e-6:
                continue
            w = exp_map(u, log_map(u, v))
            # Vector closeness, not angular: arccos cannot resolve angles
            # below ~1.5e-8 between floating-point unit vectors.
            assert np.linalg.norm(w - v) <= 1e-8


class TestProfile:
    def test_valid_profile(self):
        p = Profile(np.stack([E1, E2]), np.array([0.25, 0.75]))
        assert p.n == 2 and p.d == 2

    def test_single_voter_allowed(self):
        p = Profile(E1[None, :], np.array([1.0]))
        assert p.n == 1

    def test_non_unit_rows_rejected(self):
        with pytest.raises(ValueError):
            Profile(np.array([[2.0, 0.0]]), np.array([1.0]))

    def test_nonpositive_weights_rejected(self):
        with pytest.raises(ValueError):
            Profile(np.stack([E1, E2]), np.array([1.0, 0.0]))

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            Profile(np.stack([E1, E2]), np.array([0.6, 0.6]))

    def test_weight_shape_checked(self):
        with pytest.raises(DimensionMismatchError):
            Profile(np.stack([E1, E2]), np.array([1.0]))

    def test_make_profile_normalizes_rows_and_weights(self):
        p = make_profile([[2.0, 0.0], [0.0, 5.0]], [3.0, 1.0])
        assert np.allclose(p.vectors, np.stack([E1, E2]))
        assert np.allclose(p.weights, [0.75, 0.25])

    def test_make_profile_uniform_weights(self):
        p = make_profile([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
        assert np.allclose(p.weights, 1.0 / 3.0)

    def test_make_profile_passthrough_is_bitwise(self):
        rng = np.random.default_rng(9)
        rows = np.stack([random_unit(rng, 3) for _ in range(4)])
        w = np.array([0.1, 0.2, 0.3, 0.4])
        p = make_profile(rows, w)
        assert np.array_equal(p.vectors, rows)
        assert np.array_equal(p.weights, w)

    def test_zero_row_rejected(self):
        with pytest.raises(ZeroVectorError):
            make_profile([[0.0, 0.0], [1.0, 0.0]])


class TestSmallHelpers:
    def test_pair_count_values(self):
        assert pair_count(2) == 1
        assert pair_count(5) == 10
        assert pair_count(10) == 45

    def test_pair_count_single_item(self):
        assert pair_count(1) == 0

    def test_unit_vector_idempotent_bitwise(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            u = unit_vector(rng.standard_normal(5))
            again = unit_vector(u)
            assert np.array_equal(u, again)

    def test_tie_break_enum_is_fixed(self):
        assert list(TieBreak) == [TieBreak.BY_INDEX]
