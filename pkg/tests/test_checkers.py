import numpy as np
import pytest

from banachgeom import checkers as K
from banachgeom.checkers import SliceSpec, WeakOpenSpec
from banachgeom.codes import encode_space
from banachgeom.errors import BanachGeomError, EmptyRegion, EmptySlice, NotPolytopal
from banachgeom.oracles import hull_distance_oracle, rank1_norm_oracle, sample_diameter, slice_region
from banachgeom.spaces import lp_space

from corpus import corpus_spaces, normalized_functional

LINF2 = lp_space(np.inf, 2)
LINF3 = lp_space(np.inf, 3)
L12 = lp_space(1, 2)
L14 = lp_space(1, 4)
L22 = lp_space(2, 2)
L24 = lp_space(2, 4)

GOLDEN = (1 + np.sqrt(5)) / 2


class TestSliceDiameter:
    def test_linf2_free_coordinate(self):
        assert K.slice_diameter(LINF2, [1, 0], 0.5) == pytest.approx(2.0, abs=1e-9)

    def test_l2_chord_formula(self):
        # analytic chord: 2 sqrt(2a - a^2)
        for alpha in (0.25, 0.5, 0.8):
            chord = 2 * np.sqrt(2 * alpha - alpha**2)
            assert K.slice_diameter(L22, [1, 0], alpha) == pytest.approx(chord, abs=1e-3)

    def test_l1_quarter_slice(self):
        assert K.slice_diameter(L12, [1, 0], 0.25) == pytest.approx(0.5, abs=1e-9)

    def test_empty_slice_raises(self):
        with pytest.raises((EmptySlice, BanachGeomError)):
            K.slice_diameter(LINF2, SliceSpec(np.array([0.5, 0.0]), 0.25))

    def test_requires_normalized_functional(self):
        with pytest.raises(BanachGeomError):
            K.slice_diameter(LINF2, [2.0, 0.0], 0.5)

    def test_monotone_in_alpha(self):
        for space in (LINF2, L12, L22):
            f = normalized_functional(space, np.array([1.0, 0.4]))
            diams = [K.slice_diameter(space, f, a) for a in (0.1, 0.3, 0.6, 1.0)]
            assert all(b >= a - 1e-9 for a, b in zip(diams, diams[1:]))

    def test_symmetric_under_negation(self):
        for space in corpus_spaces(3):
            f = normalized_functional(space, space.rows[0])
            assert K.slice_diameter(space, f, 0.4) == pytest.approx(
                K.slice_diameter(space, -f, 0.4), abs=1e-9
            )


class TestWeakOpenDiameter:
    def test_linf3_free_coordinates(self):
        u = WeakOpenSpec(np.zeros(3), [[1, 0, 0]], 0.5)
        assert K.weak_open_diameter(LINF3, u) == pytest.approx(2.0, abs=1e-9)

    def test_l2_cap_is_small(self):
        u = WeakOpenSpec([1, 0], [[1, 0], [0, 1]], 0.1)
        assert K.weak_open_diameter(L22, u) < 0.5

    def test_unreachable_center_raises(self):
        with pytest.raises(EmptyRegion):
            K.weak_open_diameter(L22, WeakOpenSpec([2, 0], [[1, 0], [0, 1]], 0.05))


class TestCCSliceDiameter:
    def test_single_slice_reduces(self):
        assert K.cc_slice_diameter(LINF2, [SliceSpec(np.array([1.0, 0]), 0.5)], [1.0]) == pytest.approx(
            K.slice_diameter(LINF2, [1, 0], 0.5), abs=1e-9
        )

    def test_linf3_two_slices(self):
        slices = [SliceSpec(np.array([1.0, 0, 0]), 0.5), SliceSpec(np.array([0, 1.0, 0]), 0.5)]
        assert K.cc_slice_diameter(LINF3, slices, [0.5, 0.5]) == pytest.approx(2.0, abs=1e-9)

    def test_l2_two_caps(self):
        slices = [SliceSpec(np.array([1.0, 0]), 0.1), SliceSpec(np.array([0, 1.0]), 0.1)]
        got = K.cc_slice_diameter(L22, slices, [0.5, 0.5])
        # frozen from the corner geometry of the two caps
        assert got == pytest.approx(0.61644, abs=0.02)

    def test_weights_validated(self):
        with pytest.raises(BanachGeomError):
            K.cc_slice_diameter(LINF2, [SliceSpec(np.array([1.0, 0]), 0.5)], [0.7])


class TestDaugavetDefect:
    def test_linf2_vertex_route_zero(self):
        assert K.daugavet_defect_rank1(LINF2, [1, 0], [0, 1]) == pytest.approx(0.0, abs=1e-9)
        assert rank1_norm_oracle(LINF2, [1, 0], [0, 1]) == pytest.approx(2.0, abs=1e-12)

    def test_l2_aligned_zero(self):
        assert K.daugavet_defect_rank1(L22, [1, 0], [1, 0]) == pytest.approx(0.0, abs=1e-9)

    def test_l2_golden_ratio(self):
        got = K.daugavet_defect_rank1(L22, [1, 0], [0, 1])
        # independent oracle: largest singular value of [[1,0],[1,1]]
        sv = np.linalg.svd(np.array([[1.0, 0.0], [1.0, 1.0]]), compute_uv=False)[0]
        assert sv == pytest.approx(GOLDEN, abs=1e-12)
        assert got == pytest.approx(2 - GOLDEN, abs=1e-6)

    def test_never_negative(self):
        rng = np.random.default_rng(23)
        for space in corpus_spaces(6):
            f = rng.normal(size=space.dim)
            y = rng.normal(size=space.dim)
            assert K.daugavet_defect_rank1(space, f, y) >= -1e-9

    def test_exact_flag_on_smooth(self):
        with pytest.raises(NotPolytopal):
            K.daugavet_defect_rank1(lp_space(3, 2), [1, 0], [0, 1], exact=True)

    def test_rank1_oracle_identity(self):
        for space in (LINF2, L12, L22, lp_space(3, 3)):
            assert rank1_norm_oracle(space, np.zeros(space.dim), np.ones(space.dim)) == 1.0


class TestHullMembership:
    def test_generator_is_member(self):
        gens = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
        member, dist = K.hull_membership(LINF2, [1, 0], gens, 1e-8)
        assert member and dist <= 1e-8

    def test_average_is_member(self):
        gens = np.array([[1.0, 0.0], [0.0, 1.0]])
        member, dist = K.hull_membership(L12, [0.5, 0.5], gens, 1e-8)
        assert member

    def test_far_midpoints_exclude_corner(self):
        # midpoints of ball pairs at distance > 1.5 all have a small
        # coordinate, so (0.9, 0.9) stays far from their hull
        rep = sample_diameter(LINF2, lambda pts: np.ones(len(pts), bool), 4000)
        pts = _ball_points(LINF2, 600)
        mids = []
        for i in range(len(pts)):
            gaps = np.abs(pts[i + 1 :] - pts[i]).max(axis=1)
            for j in np.nonzero(gaps > 1.5)[0]:
                mids.append(0.5 * (pts[i] + pts[i + 1 + j]))
        mids = np.asarray(mids)
        assert np.abs(mids).min(axis=1).max() < 0.25
        member, dist = K.hull_membership(LINF2, [0.9, 0.9], mids, 1e-8)
        assert not member
        assert dist > 0.2
        # independent recomputation by Frank-Wolfe descent
        assert hull_distance_oracle(LINF2, [0.9, 0.9], mids) == pytest.approx(dist, abs=0.05)

    def test_empty_generators(self):
        member, dist = K.hull_membership(LINF2, [0, 0], np.empty((0, 2)), 1e-8)
        assert not member and np.isinf(dist)


def _ball_points(space, n):
    from banachgeom.kernels import halton
    from banachgeom.spaces import norm_eval_many

    pts = 2 * halton(n, space.dim, skip=5) - 1
    return pts[norm_eval_many(space, pts) <= 1]


class TestLdpCheck:
    def test_linf2_fails_with_corner_witness(self):
        verdict = K.ldp_check(LINF2, 2.0, 0.5)
        assert not verdict.passed
        assert np.abs(verdict.witness["z"]).min() > 0.8

    def test_linf16_passes_by_averaging(self):
        verdict = K.ldp_check(lp_space(np.inf, 16), 2.0, 0.5, hull_tol=0.1)
        assert verdict.passed
        assert verdict.defect <= 0.1

    def test_vacuous_when_eps_covers_delta(self):
        verdict = K.ldp_check(LINF2, 0.3, 0.5)
        assert verdict.passed
        assert verdict.defect == pytest.approx(0.0, abs=1e-9)

    def test_parameter_validation(self):
        with pytest.raises(BanachGeomError):
            K.ldp_check(LINF2, 2.5, 0.5)
        with pytest.raises(BanachGeomError):
            K.ldp_check(LINF2, 2.0, 0.0)

    def test_cross_check_reported(self):
        verdict = K.ldp_check(LINF2, 2.0, 0.5)
        assert "cross_min_slice_diameter" in verdict.witness


class TestDpCheck:
    def test_linf2_fails_at_corner(self):
        verdict = K.dp_check(LINF2, 0.5)
        assert not verdict.passed
        assert np.abs(verdict.witness["x"]).min() > 0.9

    def test_vacuous_threshold(self):
        verdict = K.dp_check(LINF2, 2.0)
        assert verdict.passed

    def test_linf64_passes(self):
        verdict = K.dp_check(lp_space(np.inf, 64), 0.5, budget=24, hull_tol=0.1)
        assert verdict.passed

    def test_cross_check_daugavet_grid(self):
        verdict = K.dp_check(LINF2, 0.5)
        assert verdict.witness["cross_max_rank1_defect"] >= -1e-9


class TestDld2pCheck:
    def test_vacuous(self):
        assert K.dld2p_check(LINF2, 2.0).passed

    def test_linf2_fails(self):
        assert not K.dld2p_check(LINF2, 0.5).passed

    def test_linf32_passes(self):
        verdict = K.dld2p_check(lp_space(np.inf, 32), 0.5, budget=24, hull_tol=0.1)
        assert verdict.passed

    def test_dp_pass_implies_dld2p_pass(self):
        # the hull condition restricted to z = x is the diametral condition
        for space in (lp_space(np.inf, 16), LINF2, L12) + tuple(corpus_spaces(3)):
            dp = K.dp_check(space, 0.5, hull_tol=0.1)
            dld = K.dld2p_check(space, 0.5, hull_tol=0.1)
            if dp.passed:
                assert dld.passed, space.label()


class TestDd2pCheck:
    def test_linf3_antipode(self):
        assert K.dd2p_check(LINF3, 0.5).passed

    def test_l2_cap_fails(self):
        reg = WeakOpenSpec([1.0, 0.0], [[1, 0], [0, 1]], 0.1)
        verdict = K.dd2p_check(L22, 0.5, regions=[reg])
        assert not verdict.passed

    def test_vacuous(self):
        assert K.dd2p_check(LINF3, 2.0).passed


class TestD2pCheck:
    def test_linf3_passes(self):
        assert K.d2p_check(LINF3, 0.5).passed

    def test_l2_cap_region_fails(self):
        reg = WeakOpenSpec([1.0, 0.0], [[1, 0], [0, 1]], 0.1)
        assert not K.d2p_check(L22, 0.5, regions=[reg]).passed


class TestSd2pCheck:
    def test_identity_decomposition(self):
        v = K.sd2p_check(LINF3, [[1, 0, 0]], 0.2)
        assert v.passed
        assert v.witness["strategy"] == ("identity", 1)

    def test_linf3_free_third_coordinate(self):
        v = K.sd2p_check(LINF3, [[1, 0, 0], [0, 1, 0]], 0.2)
        assert v.passed
        assert v.witness["cross_cc_diameter"] == pytest.approx(2.0, abs=1e-9)

    def test_l2_fails_with_cross_check(self):
        v = K.sd2p_check(L22, [[1, 0], [0, 1]], 0.1)
        assert not v.passed
        cc = v.witness["cross_cc_diameter"]
        # shortfall of the convex-combination diameter from 2(1 - eps)
        assert (1 - 0.1) - cc / 2 > 0.3

    def test_inputs_validated(self):
        with pytest.raises(BanachGeomError):
            K.sd2p_check(LINF3, [[2, 0, 0]], 0.2)


class TestOctahedrality:
    def test_loh_l1_disjoint_support(self):
        v = K.loh_check(L12, 0.01, x_grid=np.array([[1.0, 0.0]]))
        assert v.passed and v.defect == 0.0

    def test_oh_l1_4_grid_below_dimension(self):
        eye = np.eye(4)[:3]
        v = K.oh_check(L14, 0.01, subspace_grids=[np.vstack([eye, -eye])])
        assert v.passed and v.defect == 0.0

    def test_oh_l2_4_orthogonal_bound(self):
        eye = np.eye(4)[:3]
        v = K.oh_check(L24, 0.01, subspace_grids=[np.vstack([eye, -eye])])
        assert not v.passed
        assert v.defect == pytest.approx((2 - np.sqrt(2)) / 2, abs=0.01)

    def test_woh_l1_4(self):
        v = K.woh_direct_check(L14, 0.01)
        assert v.passed and v.defect == 0.0

    def test_woh_l2_fails(self):
        assert not K.woh_direct_check(L22, 0.01).passed

    def test_woh_vacuous_eps_one(self):
        assert K.woh_direct_check(L22, 1.0).passed

    def test_implication_chain_on_aligned_grids(self):
        spaces = [L14, L24, lp_space(1, 3), LINF3] + corpus_spaces(6)
        for space in spaces:
            grids = K.aligned_octahedral_grids(space)
            oh = K.oh_check(space, 0.05, subspace_grids=grids["oh_grids"])
            woh = K.woh_direct_check(space, 0.05, x_grid=grids["woh_x"], f_grid=grids["woh_f"])
            loh = K.loh_check(space, 0.05, x_grid=grids["loh_x"])
            if oh.passed:
                assert woh.passed, space.label()
            if woh.passed:
                assert loh.passed, space.label()


class TestSzlenk:
    def test_isolated_corners_drop(self):
        cloud = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], float)
        out = K.szlenk_derivative(cloud, 1.0, L12, k=2, delta=0.1)
        assert len(out) == 0

    def test_dense_boundary_retained(self):
        t = np.arange(0, 4, 0.01)
        cloud = np.array([_square_boundary(x) for x in t])
        out = K.szlenk_derivative(cloud, 0.05, L12, k=2, delta=0.1)
        assert len(out) == len(cloud)

    def test_delta_below_resolution(self):
        t = np.arange(0, 4, 0.01)
        cloud = np.array([_square_boundary(x) for x in t])
        out = K.szlenk_derivative(cloud, 0.05, L12, k=2, delta=0.005)
        assert len(out) == 0

    def test_subset_and_antitone_in_eps(self):
        rng = np.random.default_rng(3)
        cloud = rng.uniform(-1, 1, size=(150, 2))
        keys = {tuple(np.round(p, 9)) for p in cloud}
        small = K.szlenk_derivative(cloud, 0.3, L12, k=1, delta=0.4)
        big = K.szlenk_derivative(cloud, 0.9, L12, k=1, delta=0.4)
        assert {tuple(np.round(p, 9)) for p in small} <= keys
        assert {tuple(np.round(p, 9)) for p in big} <= {tuple(np.round(p, 9)) for p in small}

    def test_woh_szlenk_trend_l1(self):
        fracs = []
        for n in range(2, 17):
            code = encode_space(lp_space(1, n), "basis")
            v = K.woh_szlenk_check(code, level=min(n, 4), budget=256, k=2, delta=0.5)
            fracs.append(v.witness["value"])
        assert all(b >= a - 1e-12 for a, b in zip(fracs, fracs[1:]))
        assert fracs[-1] == 1.0

    def test_woh_szlenk_l2_collapses(self):
        code = encode_space(L24, "basis")
        v = K.woh_szlenk_check(code, level=4, budget=256, k=2, delta=0.1, cloud_kind="sphere")
        assert v.witness["value"] < 0.1
        assert not v.passed

    def test_requires_b_like_code(self):
        from banachgeom.codes import SeminormCode

        with pytest.raises(BanachGeomError):
            K.woh_szlenk_check(SeminormCode(LINF2, "zero"), level=2)


def _square_boundary(t):
    t = t % 4
    if t < 1:
        return [1, -1 + 2 * t]
    if t < 2:
        return [1 - 2 * (t - 1), 1]
    if t < 3:
        return [-1, 1 - 2 * (t - 2)]
    return [-1 + 2 * (t - 3), -1]


class TestWitnessReproducibility:
    def test_hull_witnesses_reproduce_defect(self):
        for space in corpus_spaces(3):
            for verdict in (
                K.ldp_check(space, 2.0, 0.5),
                K.dp_check(space, 0.5),
                K.dld2p_check(space, 0.5),
            ):
                w = verdict.witness
                z = w.get("z") if w.get("z") is not None else w.get("x")
                _, dist = K.hull_membership(space, z, w["generators"], 0.1)
                assert dist == pytest.approx(verdict.defect, abs=1e-7)


class TestOracleAgreement:
    def test_lp_diameters_match_sampling_on_corpus_head(self):
        for space in corpus_spaces(6):
            f, alpha = normalized_functional(space, space.rows[0]), 0.5
            lp_val = K.slice_diameter(space, f, alpha)
            rep = sample_diameter(space, slice_region(space, f, alpha), 20000)
            assert rep.estimate <= lp_val + 1e-9
            assert lp_val - rep.estimate <= 0.05 + rep.half_width
