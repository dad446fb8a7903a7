"""Tests for profile I/O, synthetic profile constructors, preference
fitting, and the heterogeneity tooling."""

from __future__ import annotations

import numpy as np
import pytest

from propagg import (
    ComparisonRecord,
    DegenerateFitError,
    FilterExhaustedError,
    FitDiagnostics,
    NoValidPairError,
    Profile,
    ProfileParseError,
    ZeroVectorError,
    angular_distance,
    antipodal_profile,
    fit_voter_logistic,
    fit_voter_logistic_with_diagnostics,
    heterogeneity_subsample,
    load_profile_csv,
    make_profile,
    pairwise_angle_stats,
    save_profile_csv,
    select_2d_pair,
    two_voter_profile,
)


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


class TestLoadProfileCsv:
    def test_uniform_weights_when_column_missing(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("theta_0,theta_1\n1,0\n0,1\n")
        p = load_profile_csv(f)
        np.testing.assert_array_equal(p.vectors, [[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(p.weights, [0.5, 0.5])

    def test_rows_are_normalized(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("theta_0,theta_1\n2,0\n0,2\n")
        p = load_profile_csv(f)
        np.testing.assert_array_equal(p.vectors, [[1.0, 0.0], [0.0, 1.0]])

    def test_weight_column_renormalized(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("theta_0,theta_1,weight\n1,0,3\n0,1,1\n")
        p = load_profile_csv(f)
        np.testing.assert_array_equal(p.weights, [0.75, 0.25])

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text(
            "# electorate snapshot\n\ntheta_0,theta_1\n# voter one\n1,0\n\n0,1\n"
        )
        p = load_profile_csv(f)
        assert p.n == 2

    def test_save_load_round_trip_is_bitwise(self, tmp_path):
        rng = np.random.default_rng(5)
        vecs = rng.standard_normal((4, 3))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        p = make_profile(vecs, rng.dirichlet(np.ones(4)))
        f = tmp_path / "p.csv"
        save_profile_csv(p, f, comments=["round trip"])
        q = load_profile_csv(f)
        np.testing.assert_array_equal(p.vectors, q.vectors)
        np.testing.assert_array_equal(p.weights, q.weights)

    def test_bad_header_rejected(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("x,y\n1,0\n")
        with pytest.raises(ProfileParseError, match="header"):
            load_profile_csv(f)

    def test_bad_number_reports_line_and_column(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("theta_0,theta_1\n1,0\n0,oops\n")
        with pytest.raises(ProfileParseError, match="line 3.*theta_1"):
            load_profile_csv(f)

    def test_wrong_field_count_reports_line(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("theta_0,theta_1\n1,0,9\n")
        with pytest.raises(ProfileParseError, match="line 2"):
            load_profile_csv(f)

    def test_nonpositive_weight_rejected(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("theta_0,theta_1,weight\n1,0,0\n")
        with pytest.raises(ProfileParseError, match="positive"):
            load_profile_csv(f)

    def test_zero_vector_row_rejected(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("theta_0,theta_1\n0,0\n")
        with pytest.raises(ZeroVectorError, match="line 2"):
            load_profile_csv(f)

    def test_empty_file_rejected(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("")
        with pytest.raises(ProfileParseError):
            load_profile_csv(f)

    def test_header_only_rejected(self, tmp_path):
        f = tmp_path / "p.csv"
        f.write_text("theta_0,theta_1\n")
        with pytest.raises(ProfileParseError, match="no voter rows"):
            load_profile_csv(f)


class TestSyntheticProfiles:
    def test_antipodal_layout(self):
        p = antipodal_profile(0.3)
        np.testing.assert_array_equal(p.vectors, [[-1.0, 0.0], [1.0, 0.0]])
        np.testing.assert_array_equal(p.weights, [0.3, 0.7])

    def test_antipodal_integral_entitlement_weights(self):
        p = antipodal_profile(1.0 / 3.0)
        assert p.weights[0] == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert p.weights[1] == pytest.approx(2.0 / 3.0, rel=1e-15)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.5])
    def test_antipodal_rejects_bad_weight(self, bad):
        with pytest.raises(ValueError):
            antipodal_profile(bad)

    def test_two_voter_ninety_degrees(self):
        p = two_voter_profile(90.0, 0.7)
        np.testing.assert_allclose(p.weights, [0.7, 0.3], rtol=1e-15)
        assert angular_distance(p.vectors[0], p.vectors[1]) == pytest.approx(
            np.pi / 2.0, abs=1e-15
        )

    def test_two_voter_at_180_is_antipodal(self):
        p = two_voter_profile(180.0, 0.4)
        assert angular_distance(p.vectors[0], p.vectors[1]) >= np.pi - 1e-9
        np.testing.assert_array_equal(p.weights, antipodal_profile(0.4).weights)

    def test_two_voter_at_zero_is_identical(self):
        p = two_voter_profile(0.0, 0.6)
        assert angular_distance(p.vectors[0], p.vectors[1]) == 0.0

    @pytest.mark.parametrize("bad_phi", [-1.0, 180.1, 360.0])
    def test_two_voter_rejects_bad_angle(self, bad_phi):
        with pytest.raises(ValueError):
            two_voter_profile(bad_phi, 0.5)

    @pytest.mark.parametrize("bad_alpha", [0.0, 1.0])
    def test_two_voter_rejects_bad_weight(self, bad_alpha):
        with pytest.raises(ValueError):
            two_voter_profile(45.0, bad_alpha)


class TestFitVoterLogistic:
    def test_single_separable_record(self):
        rec = ComparisonRecord(
            "v", np.array([1.0, 0.0, 0.0]), np.array([0.0, 0.0, 0.0]), True
        )
        beta = fit_voter_logistic([rec])
        assert beta[0] > 0.0
        assert abs(np.linalg.norm(beta) - 1.0) <= 1e-12
        np.testing.assert_allclose(beta, [1.0, 0.0, 0.0], atol=1e-12)

    def test_contradictory_mirror_records_degenerate(self):
        rng = np.random.default_rng(7)
        recs = []
        for _ in range(10):
            a, b = rng.standard_normal(3), rng.standard_normal(3)
            recs.append(ComparisonRecord("v", a, b, True))
            recs.append(ComparisonRecord("v", a, b, False))
        with pytest.raises(DegenerateFitError):
            fit_voter_logistic(recs)

    def test_recovers_known_direction(self):
        rng = np.random.default_rng(11)
        beta_true = _unit([2.0, -1.0, 0.5])
        recs = []
        for _ in range(200):
            a, b = rng.standard_normal(3), rng.standard_normal(3)
            p_choose = 1.0 / (1.0 + np.exp(-4.0 * beta_true @ (a - b)))
            recs.append(ComparisonRecord("v", a, b, bool(rng.random() < p_choose)))
        beta = fit_voter_logistic(recs)
        assert np.degrees(angular_distance(beta, beta_true)) < 15.0

    def test_label_flip_negates_direction(self):
        rng = np.random.default_rng(13)
        recs, flipped = [], []
        for _ in range(50):
            a, b = rng.standard_normal(4), rng.standard_normal(4)
            choice = bool(rng.random() < 0.7)
            recs.append(ComparisonRecord("v", a, b, choice))
            flipped.append(ComparisonRecord("v", a, b, not choice))
        beta = fit_voter_logistic(recs)
        beta_flipped = fit_voter_logistic(flipped)
        assert angular_distance(beta_flipped, -beta) < 1e-6

    def test_zero_differences_degenerate(self):
        x = np.array([1.0, 2.0])
        with pytest.raises(DegenerateFitError, match="zero"):
            fit_voter_logistic([ComparisonRecord("v", x, x.copy(), True)])

    def test_no_records_degenerate(self):
        with pytest.raises(DegenerateFitError):
            fit_voter_logistic([])

    def test_regularization_strength_must_be_positive(self):
        rec = ComparisonRecord("v", np.array([1.0, 0.0]), np.zeros(2), True)
        with pytest.raises(ValueError):
            fit_voter_logistic([rec], l2_c=0.0)

    def test_diagnostics(self):
        rng = np.random.default_rng(17)
        recs = [
            ComparisonRecord(
                "v", rng.standard_normal(3), rng.standard_normal(3), bool(rng.random() < 0.5)
            )
            for _ in range(40)
        ]
        vec, diag = fit_voter_logistic_with_diagnostics(recs)
        assert isinstance(diag, FitDiagnostics)
        assert diag.n_records == 40
        assert diag.converged
        assert diag.grad_norm <= 1e-8
        assert diag.standardization == "signed-differences"
        assert abs(np.linalg.norm(vec) - 1.0) <= 1e-12


class TestPairwiseAngleStats:
    def test_identical_pair(self):
        v = _unit([1.0, 2.0])
        p = make_profile(np.array([v, v]), None)
        s = pairwise_angle_stats(p)
        assert (s.mean_deg, s.std_deg, s.max_deg) == (0.0, 0.0, 0.0)

    def test_antipodal_pair(self):
        s = pairwise_angle_stats(antipodal_profile(0.5))
        assert (s.mean_deg, s.max_deg, s.std_deg) == (180.0, 180.0, 0.0)

    def test_three_quarter_turns(self):
        vecs = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
        s = pairwise_angle_stats(make_profile(vecs, None))
        # Pairs are 90, 180, 90 degrees.
        assert s.mean_deg == pytest.approx(120.0, abs=1e-12)
        assert s.max_deg == pytest.approx(180.0, abs=1e-12)
        assert s.min_deg == pytest.approx(90.0, abs=1e-12)
        assert s.std_deg == pytest.approx(np.sqrt(1800.0), abs=1e-9)

    def test_requires_two_voters(self):
        p = make_profile(np.array([[1.0, 0.0]]), None)
        with pytest.raises(ValueError):
            pairwise_angle_stats(p)

    def test_bounds_on_random_profiles(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            vecs = rng.standard_normal((int(rng.integers(2, 7)), 3))
            vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
            s = pairwise_angle_stats(make_profile(vecs, None))
            assert 0.0 <= s.min_deg <= s.mean_deg <= s.max_deg <= 180.0


def _brute_force_pair(profile: Profile) -> tuple[int, int, float]:
    best = None
    best_var = -np.inf
    for j in range(profile.d):
        for k in range(j + 1, profile.d):
            proj = profile.vectors[:, [j, k]]
            norms = np.linalg.norm(proj, axis=1)
            if np.any(norms <= 1e-10):
                continue
            rows = proj / norms[:, None]
            angles = []
            for a in range(profile.n):
                for b in range(a + 1, profile.n):
                    c = float(np.clip(rows[a] @ rows[b], -1.0, 1.0))
                    angles.append(np.degrees(np.arccos(c)))
            var = float(np.var(angles))
            if var > best_var:
                best = (j, k)
                best_var = var
    if best is None:
        raise NoValidPairError("all pairs disqualified")
    return best[0], best[1], best_var


class TestSelect2dPair:
    def test_dim_two_returns_only_pair(self):
        p = two_voter_profile(40.0, 0.5)
        j, k, q = select_2d_pair(p)
        assert (j, k) == (0, 1)
        np.testing.assert_allclose(q.vectors, p.vectors, atol=1e-15)

    def test_matches_brute_force_on_random_profiles(self):
        rng = np.random.default_rng(23)
        for _ in range(15):
            n = int(rng.integers(2, 6))
            d = int(rng.integers(2, 7))
            vecs = rng.standard_normal((n, d))
            vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
            p = make_profile(vecs, None)
            j, k, q = select_2d_pair(p)
            bj, bk, bvar = _brute_force_pair(p)
            assert (j, k) == (bj, bk)
            assert np.allclose(np.linalg.norm(q.vectors, axis=1), 1.0)
            np.testing.assert_array_equal(q.weights, p.weights)

    def test_near_axis_voters_prefer_spread_pair(self):
        # Voters near e1, e2, e3 with a shared faint component so no
        # projection degenerates; result must agree with brute force.
        eps = 0.05
        vecs = np.stack(
            [
                _unit([1.0, eps, eps]),
                _unit([eps, 1.0, eps]),
                _unit([eps, eps, 1.0]),
            ]
        )
        p = make_profile(vecs, None)
        j, k, _ = select_2d_pair(p)
        assert (j, k) == _brute_force_pair(p)[:2]

    def test_identical_voters_tie_break_to_first_pair(self):
        v = _unit([0.6, 0.5, 0.4])
        p = make_profile(np.array([v, v, v]), None)
        j, k, _ = select_2d_pair(p)
        assert (j, k) == (0, 1)

    def test_axis_voters_disqualify_every_pair(self):
        p = make_profile(np.eye(3), None)
        with pytest.raises(NoValidPairError):
            select_2d_pair(p)

    def test_dimension_and_size_guards(self):
        with pytest.raises(ValueError):
            select_2d_pair(make_profile(np.array([[1.0, 0.0]]), None))


class TestHeterogeneitySubsample:
    def _electorate(self) -> Profile:
        angles = np.deg2rad([0.0, 5.0, 10.0, 90.0, 170.0, 175.0])
        vecs = np.column_stack([np.cos(angles), np.sin(angles)])
        return make_profile(vecs, None)

    def test_zero_threshold_accepts_first_draw(self):
        p = self._electorate()
        out = heterogeneity_subsample(p, 3, threshold_deg=0.0, seed=1, max_tries=1)
        assert out.n == 3
        np.testing.assert_array_equal(out.weights, np.full(3, 1.0 / 3.0))

    def test_accepted_subsample_meets_threshold(self):
        p = self._electorate()
        out = heterogeneity_subsample(p, 3, threshold_deg=65.0, seed=2)
        assert pairwise_angle_stats(out).std_deg >= 65.0
        rows = {tuple(v) for v in p.vectors}
        for v in out.vectors:
            assert tuple(v) in rows

    def test_deterministic_given_seed(self):
        p = self._electorate()
        a = heterogeneity_subsample(p, 3, threshold_deg=65.0, seed=3)
        b = heterogeneity_subsample(p, 3, threshold_deg=65.0, seed=3)
        np.testing.assert_array_equal(a.vectors, b.vectors)

    def test_full_size_accepts_when_spread_enough(self):
        vecs = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
        p = make_profile(vecs, np.array([0.2, 0.5, 0.3]))
        out = heterogeneity_subsample(p, 3, threshold_deg=40.0, seed=4)
        np.testing.assert_array_equal(out.vectors, p.vectors)
        np.testing.assert_array_equal(out.weights, np.full(3, 1.0 / 3.0))

    def test_full_size_exhausts_when_spread_too_low(self):
        vecs = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
        p = make_profile(vecs, None)
        with pytest.raises(FilterExhaustedError):
            heterogeneity_subsample(p, 3, threshold_deg=65.0, seed=5)

    def test_single_pair_subsample_always_exhausts(self):
        # Any two-voter subsample has one pairwise angle, so zero spread.
        p = antipodal_profile(0.4)
        with pytest.raises(FilterExhaustedError):
            heterogeneity_subsample(p, 2, threshold_deg=65.0, seed=6)
        rng = np.random.default_rng(7)
        vecs = rng.standard_normal((4, 2))
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
        wide = make_profile(vecs, None)
        with pytest.raises(FilterExhaustedError):
            heterogeneity_subsample(wide, 2, threshold_deg=65.0, seed=8, max_tries=50)

    def test_size_bounds(self):
        p = self._electorate()
        with pytest.raises(ValueError):
            heterogeneity_subsample(p, 1, seed=0)
        with pytest.raises(ValueError):
            heterogeneity_subsample(p, 7, seed=0)
