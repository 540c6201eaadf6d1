from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banachgeom.codes import (
    B_LIKE,
    DEGENERATE,
    P_INF_ONLY,
    QVec,
    SeminormCode,
    basis_qvec,
    classify_code,
    code_distance,
    encode_space,
    enumerate_qvecs,
    enumeration_position,
    kernel_test,
    prefix_dense,
    qvec,
    seminorm_eval,
)
from banachgeom.dual import knocerrado
from banachgeom.errors import BanachGeomError, DimensionMismatch
from banachgeom.spaces import lp_space

LINF2 = lp_space(np.inf, 2)

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def qvecs(max_index=5):
    return st.dictionaries(st.integers(1, max_index), rationals, max_size=4).map(qvec)


class TestQVec:
    def test_zero_is_empty_support(self):
        assert qvec({1: 0, 3: 0}).is_zero
        assert QVec().max_index == 0

    def test_rejects_bad_items(self):
        with pytest.raises(BanachGeomError):
            QVec(((2, Fraction(1)), (1, Fraction(1))))
        with pytest.raises(BanachGeomError):
            QVec(((1, Fraction(0)),))

    def test_dense_round_trip(self):
        v = qvec({1: "1/2", 4: -2})
        assert np.allclose(v.dense(5), [0.5, 0, 0, -2, 0])
        with pytest.raises(DimensionMismatch):
            v.dense(3)

    @given(qvecs(), qvecs())
    @settings(max_examples=60, deadline=None)
    def test_addition_matches_dense(self, a, b):
        w = max(a.max_index, b.max_index, 1)
        assert np.allclose((a + b).dense(w), a.dense(w) + b.dense(w))

    @given(qvecs(), rationals)
    @settings(max_examples=60, deadline=None)
    def test_scaling_matches_dense(self, a, q):
        w = max(a.max_index, 1)
        assert np.allclose(a.scale(q).dense(w), float(q) * a.dense(w))


class TestEnumeration:
    def test_starts_with_zero_then_e1(self):
        qs = enumerate_qvecs(5)
        assert qs[0].is_zero
        assert qs[1] == basis_qvec(1).scale(-1)
        assert qs[2] == basis_qvec(1)

    def test_no_repetitions_and_deterministic(self):
        a = enumerate_qvecs(400)
        assert len(set(a)) == 400
        assert a == enumerate_qvecs(400)

    def test_every_small_vector_appears(self):
        pos = enumeration_position(qvec({1: 1, 2: "-1/2"}))
        assert pos > 0
        assert enumeration_position(basis_qvec(3)) <= 55

    def test_prefix_dense_shape(self):
        M = prefix_dense(50)
        assert M.shape[0] == 50
        assert np.allclose(M[0], 0)


class TestSeminormCode:
    def test_basis_rule_examples(self):
        code = encode_space(LINF2, "basis")
        assert seminorm_eval(code, basis_qvec(1)) == 1.0
        assert seminorm_eval(code, basis_qvec(2)) == 1.0
        assert seminorm_eval(code, QVec()) == 0.0

    def test_l2_direct_evaluation(self):
        code = encode_space(lp_space(2, 2), "basis")
        assert seminorm_eval(code, basis_qvec(1) + basis_qvec(2)) == pytest.approx(np.sqrt(2))

    def test_l1_with_cycled_basis(self):
        code = encode_space(lp_space(1, 3), "basis")
        v = basis_qvec(1).scale(2) - basis_qvec(3)
        assert seminorm_eval(code, v) == pytest.approx(3.0)

    def test_custom_rule_dimension_check(self):
        with pytest.raises(DimensionMismatch):
            SeminormCode(LINF2, "custom", vectors=[[1, 0, 0]])

    def test_ball_grid_rule_stays_in_ball(self):
        code = encode_space(LINF2, "ball-grid")
        from banachgeom.spaces import norm_eval

        for n in range(1, 30):
            assert norm_eval(LINF2, code.vector(n)) <= 1 + 1e-9

    @given(qvecs(4), qvecs(4), rationals)
    @settings(max_examples=40, deadline=None)
    def test_seminorm_axioms(self, a, b, q):
        code = encode_space(lp_space(1, 4), "basis")
        mu_a, mu_b = code.eval_qvec(a), code.eval_qvec(b)
        assert code.eval_qvec(a + b) <= mu_a + mu_b + 1e-9
        assert code.eval_qvec(a.scale(q)) == pytest.approx(abs(float(q)) * mu_a, abs=1e-9)

    def test_basis_rule_matches_lp_norm(self):
        code = encode_space(lp_space(1.5, 3), "basis")
        v = qvec({1: "1/2", 2: -1, 3: "2/3"})
        direct = np.sum(np.abs(v.dense(3)) ** 1.5) ** (1 / 1.5)
        assert seminorm_eval(code, v) == pytest.approx(direct, abs=1e-9)


class TestKernelAndClassification:
    def test_kernel_examples(self):
        mu3, _ = knocerrado(3)
        v = qvec({1: 1, 2: "-1/3"})
        assert mu3.eval_qvec(v) == 0.0
        assert kernel_test(mu3, v, 1e-12)
        code = encode_space(LINF2, "basis")
        assert not kernel_test(code, basis_qvec(1), 1e-12)
        assert kernel_test(code, QVec(), 1e-12)

    def test_kernel_test_requires_positive_tol(self):
        code = encode_space(LINF2, "basis")
        with pytest.raises(BanachGeomError):
            kernel_test(code, QVec(), 0.0)

    def test_classify_examples(self):
        assert classify_code(encode_space(lp_space(2, 4), "basis"), 4) == B_LIKE
        mu_n, _ = knocerrado(5)
        assert classify_code(mu_n, 2) == P_INF_ONLY
        assert classify_code(mu_n, 6) == P_INF_ONLY
        assert classify_code(SeminormCode(LINF2, "zero"), 3) == DEGENERATE

    def test_classify_monotone_in_level(self):
        # B-like at level L implies B-like at every smaller level
        code = encode_space(lp_space(1, 5), "basis")
        levels = [classify_code(code, lv) for lv in range(1, 6)]
        assert all(tag == B_LIKE for tag in levels)
        # cycling beyond the dimension creates kernel vectors
        assert classify_code(code, 6) != B_LIKE


class TestCodeDistance:
    def test_identical_codes(self):
        code = encode_space(LINF2, "basis")
        assert code_distance(code, code, depth=25) == 0.0

    def test_hand_summed_value(self):
        a = encode_space(lp_space(1, 2), "basis")
        b = encode_space(LINF2, "basis")
        qs = enumerate_qvecs(20)
        expected = sum(
            2.0 ** -(i + 1)
            * min(1.0, abs(np.abs(v.dense(2)).sum() - np.abs(v.dense(2)).max()))
            for i, v in enumerate(qs)
            if not v.is_zero
        )
        assert code_distance(a, b, depth=20) == pytest.approx(expected, abs=1e-12)

    def test_pseudometric_on_random_triples(self):
        codes = [
            encode_space(lp_space(1, 2), "basis"),
            encode_space(LINF2, "basis"),
            encode_space(lp_space(2, 2), "basis"),
        ]
        for a in codes:
            for b in codes:
                dab = code_distance(a, b, depth=18)
                assert dab == pytest.approx(code_distance(b, a, depth=18), abs=1e-12)
                for c in codes:
                    assert dab <= code_distance(a, c, depth=18) + code_distance(c, b, depth=18) + 1e-12

    def test_requires_positive_depth(self):
        code = encode_space(LINF2, "basis")
        with pytest.raises(BanachGeomError):
            code_distance(code, code, depth=0)
