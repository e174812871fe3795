"""Fixed points, thresholds, boundary classification, period-2 branch."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sirmap import (
    BoundaryTag,
    ModelParams,
    StabilityClass,
    beta0_threshold,
    beta1_formula,
    beta2_threshold,
    classify_boundary,
    disease_free,
    eigen_from_matrix,
    endemic,
    jacobian,
    period2_branch,
    resonance_growth,
    step,
    thresholds,
)

A_K_GRID = [(0.0, 0.3), (0.5, 0.2), (1.0, 0.5), (2.0, 0.7), (5.0, 0.9)]


class TestDiseaseFree:
    def test_location(self):
        p = ModelParams(r=2, beta=3, a=1, K=0.5)
        rep = disease_free(p)
        assert rep.location == (0.5, 0.0)
        assert rep.residual < 1e-15

    def test_exact_eigenvalues(self):
        # mu_1 = 2 - r, mu_2 = 1 - K + beta(r-1)/(r + a(r-1))
        p = ModelParams(r=2, beta=3, a=1, K=0.5)
        rep = disease_free(p)
        mus = sorted([rep.eigen.mu1.real, rep.eigen.mu2.real])
        assert math.isclose(mus[0], 0.0, abs_tol=1e-15)
        assert math.isclose(mus[1], 1.5, abs_tol=1e-14)
        assert rep.stability is StabilityClass.SADDLE

    def test_stable_when_infection_dies(self):
        p = ModelParams(r=2.5, beta=1.1, a=1, K=0.5)
        rep = disease_free(p)
        assert rep.stability is StabilityClass.STABLE_NODE


class TestEndemic:
    def test_golden_location(self):
        p = ModelParams(r=2, beta=3, a=1, K=0.5)
        rep = endemic(p)
        assert math.isclose(rep.location.S, 0.2, abs_tol=1e-15)
        assert math.isclose(rep.location.I, 0.24, abs_tol=1e-15)
        assert rep.stability is StabilityClass.STABLE_FOCUS

    def test_absent_below_onset(self):
        # beta0(2,1,0.5) = 0.5*(2+1)/1 = 1.5
        p = ModelParams(r=2, beta=1.4, a=1, K=0.5)
        assert endemic(p) is None

    def test_needs_growth_above_one(self):
        p = ModelParams(r=0.9, beta=3, a=1, K=0.5)
        with pytest.raises(ValueError, match="r > 1"):
            endemic(p)

    @given(
        r=st.floats(1.2, 4.0),
        a=st.floats(0.0, 3.0),
        K=st.floats(0.1, 0.9),
        excess=st.floats(1.05, 4.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_fixed_point_residual(self, r, a, K, excess):
        beta = excess * beta0_threshold(r, a, K)
        p = ModelParams(r=r, beta=beta, a=a, K=K)
        rep = endemic(p)
        assert rep is not None
        out = step(p, rep.location)
        assert abs(out.S - rep.location.S) < 1e-12
        assert abs(out.I - rep.location.I) < 1e-12

    def test_row_identities(self):
        # at E1 the infection row of the Jacobian is (a21, 1) and a12 = -K
        p = ModelParams(r=3.1, beta=2.4, a=0.7, K=0.43)
        rep = endemic(p)
        J = jacobian(p, rep.location)
        assert math.isclose(J[0, 1], -p.K, abs_tol=1e-12)
        assert math.isclose(J[1, 1], 1.0, abs_tol=1e-12)


class TestThresholds:
    def test_beta0_golden(self):
        assert math.isclose(beta0_threshold(1.25, 1, 0.5), 3.0, abs_tol=1e-12)

    def test_beta1_golden(self):
        assert math.isclose(beta1_formula(3.6, 1, 0.5), 1.3147834135917997, abs_tol=1e-12)

    def test_beta2_golden(self):
        assert math.isclose(beta2_threshold(35 / 16, 1, 0.5), 3.0, abs_tol=1e-12)

    def test_resonance_radii_at_default_params(self):
        th = thresholds(2.0, 1.0, 0.5)
        assert math.isclose(th.r_max, 18.881527307120106, abs_tol=1e-9)
        assert math.isclose(th.r_bar, 9.772001872658766, abs_tol=1e-9)
        assert math.isclose(th.r_tilde, 14.32455532033676, abs_tol=1e-9)

    def test_beta1_only_inside_its_band(self):
        assert thresholds(2.0, 1.0, 0.5).beta1 is None
        assert thresholds(3.6, 1.0, 0.5).beta1 is not None

    @pytest.mark.parametrize("a,K", A_K_GRID)
    def test_junctions(self, a, K):
        # the flip curve meets the transcritical curve at r=3 and the
        # NS curve at r_max
        assert math.isclose(
            beta1_formula(3.0, a, K), beta0_threshold(3.0, a, K), rel_tol=1e-12
        )
        rmax = resonance_growth(4.0, a, K)
        assert math.isclose(
            beta1_formula(rmax, a, K), beta2_threshold(rmax, a, K), rel_tol=1e-9
        )

    @pytest.mark.parametrize("x,sigma_expect", [(4.0, -1.0), (3.0, -0.5), (2.0, 0.0)])
    def test_resonance_growth_defining_property(self, x, sigma_expect):
        # at r = R(x) with beta on the NS curve, the eigenvalue pair has
        # det 1 and real part sigma = 1 - x/2
        r = resonance_growth(x, 1.0, 0.5)
        beta = beta2_threshold(r, 1.0, 0.5)
        rep = endemic(ModelParams(r=r, beta=beta, a=1.0, K=0.5))
        assert math.isclose(rep.eigen.det, 1.0, abs_tol=1e-10)
        assert math.isclose(rep.eigen.sigma, sigma_expect, abs_tol=1e-10)

    @given(r=st.floats(1.1, 15.0), a=st.floats(0.0, 3.0), K=st.floats(0.1, 0.9))
    @settings(max_examples=100, deadline=None)
    def test_det_is_one_on_ns_curve(self, r, a, K):
        rmax = resonance_growth(4.0, a, K)
        if r >= rmax - 1e-6:
            return
        beta = beta2_threshold(r, a, K)
        if beta <= beta0_threshold(r, a, K):
            return
        rep = endemic(ModelParams(r=r, beta=beta, a=a, K=K))
        assert math.isclose(rep.eigen.det, 1.0, abs_tol=1e-9)


class TestEigenFromMatrix:
    def test_complex_pair(self):
        e = eigen_from_matrix(np.array([[0.0, -1.0], [1.0, 0.0]]))
        assert e.omega == 1.0
        assert e.sigma == 0.0
        assert e.theta0 is not None
        assert math.isclose(e.theta0, math.pi / 2)

    def test_real_pair_sorted_by_modulus(self):
        e = eigen_from_matrix(np.array([[3.0, 0.0], [0.0, -0.5]]))
        assert abs(e.mu1) >= abs(e.mu2)
        assert e.theta0 is None


class TestClassifyBoundary:
    def test_E0_fold_at_r_one(self):
        p = ModelParams(r=1.0, beta=0.5, a=1, K=0.5)
        assert classify_boundary(p, "E0") is BoundaryTag.FOLD

    def test_E0_flip_at_r_three(self):
        beta = 0.8 * beta0_threshold(3.0, 1.0, 0.5)
        p = ModelParams(r=3.0, beta=beta, a=1, K=0.5)
        assert classify_boundary(p, "E0") is BoundaryTag.FLIP

    def test_E0_fold_flip_corner(self):
        p = ModelParams(r=3.0, beta=beta0_threshold(3.0, 1.0, 0.5), a=1, K=0.5)
        assert classify_boundary(p, "E0") is BoundaryTag.FOLD_FLIP

    def test_E0_transcritical_exchange_line(self):
        p = ModelParams(r=2.0, beta=beta0_threshold(2.0, 1.0, 0.5), a=1, K=0.5)
        assert classify_boundary(p, "E0") is BoundaryTag.FOLD

    def test_E0_interior_is_unlabeled(self):
        p = ModelParams(r=2.0, beta=1.0, a=1, K=0.5)
        assert classify_boundary(p, "E0") is None

    def test_E1_ns_at_beta2(self):
        p = ModelParams(r=35 / 16, beta=3.0, a=1, K=0.5)
        assert classify_boundary(p, "E1") is BoundaryTag.NEIMARK_SACKER

    def test_E1_flip_at_beta1(self):
        b1 = beta1_formula(3.6, 1.0, 0.5)
        p = ModelParams(r=3.6, beta=b1, a=1, K=0.5)
        assert classify_boundary(p, "E1") is BoundaryTag.FLIP

    def test_E1_strong_resonances(self):
        for x, tag in [
            (4.0, BoundaryTag.RESONANCE_12),
            (3.0, BoundaryTag.RESONANCE_13),
            (2.0, BoundaryTag.RESONANCE_14),
        ]:
            r = resonance_growth(x, 1.0, 0.5)
            p = ModelParams(r=r, beta=beta2_threshold(r, 1.0, 0.5), a=1, K=0.5)
            assert classify_boundary(p, "E1") is tag

    def test_rejects_unknown_point(self):
        p = ModelParams(r=2.0, beta=1.0, a=1, K=0.5)
        with pytest.raises(ValueError):
            classify_boundary(p, "E2")


class TestPeriod2Branch:
    def test_exists_only_past_flip(self):
        with pytest.raises(ValueError):
            period2_branch(ModelParams(r=2.9, beta=1.0, a=1, K=0.5))

    def test_points_swap_under_map(self):
        p = ModelParams(r=3.4, beta=1.0, a=1, K=0.5)
        lo, hi = period2_branch(p)
        assert lo.location.S < hi.location.S
        fwd = step(p, lo.location)
        assert abs(fwd.S - hi.location.S) < 1e-12
        assert fwd.I == 0.0
        assert lo.residual < 1e-12

    def test_branch_locations_closed_form(self):
        r = 3.4
        p = ModelParams(r=r, beta=1.0, a=1, K=0.5)
        lo, hi = period2_branch(p)
        root = math.sqrt((r - 3) * (r + 1))
        assert math.isclose(lo.location.S, (1 + r - root) / (2 * r), abs_tol=1e-14)
        assert math.isclose(hi.location.S, (1 + r + root) / (2 * r), abs_tol=1e-14)

    def test_tangential_multiplier_hits_minus_one_at_second_flip(self):
        r = 1.0 + math.sqrt(6.0)
        p = ModelParams(r=r, beta=1.1, a=1, K=0.5)
        lo, _ = period2_branch(p)
        mus = sorted([lo.eigen.mu1.real, lo.eigen.mu2.real])
        assert math.isclose(mus[0], -1.0, abs_tol=1e-12)
