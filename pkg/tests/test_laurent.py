import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistloop.laurent import (
    LaurentMatrix,
    LaurentPoly,
    compare_up_to_unit,
    lp_eval,
    normalize_unit,
    poly_det,
)

finite_complex = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
coeff_maps = st.dictionaries(st.integers(-6, 6), finite_complex, max_size=6)
EVAL_POINT = 0.7 + 0.3j


def close(a, b, tol=1e-8):
    return abs(a - b) <= tol * (1.0 + abs(a) + abs(b))


def test_constructors():
    assert LaurentPoly.zero().is_zero
    assert LaurentPoly.one().coeffs == {0: 1.0 + 0j}
    assert LaurentPoly.t_power(-3, 2.0).coeffs == {-3: 2.0 + 0j}
    assert LaurentPoly({2: 0.0, 1: 1.0}).coeffs == {1: 1.0 + 0j}
    p = LaurentPoly({0: 1.0, 3: -2.0})
    assert p.min_exp == 0 and p.max_exp == 3 and p.span == 3
    assert p.support() == [0, 3]
    assert p.coeff(1) == 0


def test_zero_has_no_support():
    with pytest.raises(ValueError):
        LaurentPoly.zero().min_exp


@given(coeff_maps, coeff_maps)
def test_eval_respects_addition(c1, c2):
    p, q = LaurentPoly(c1), LaurentPoly(c2)
    assert close(lp_eval(p + q, EVAL_POINT), lp_eval(p, EVAL_POINT) + lp_eval(q, EVAL_POINT))


@given(coeff_maps, coeff_maps)
@settings(max_examples=60)
def test_eval_respects_multiplication(c1, c2):
    p, q = LaurentPoly(c1), LaurentPoly(c2)
    assert close(lp_eval(p * q, EVAL_POINT), lp_eval(p, EVAL_POINT) * lp_eval(q, EVAL_POINT), 1e-7)


@given(coeff_maps)
def test_add_commutes_and_sub_cancels(c1):
    p = LaurentPoly(c1)
    q = LaurentPoly({1: 2.5, -1: 1j})
    assert p + q == q + p
    assert (p - p).is_zero


@given(coeff_maps, st.integers(-4, 4))
def test_shift_is_monomial_multiplication(c1, k):
    p = LaurentPoly(c1)
    assert p.shifted(k) == p * LaurentPoly.t_power(k)


def test_derivative_at_one():
    p = LaurentPoly({0: 1.0, 1: -5.0, 2: 5.0, 3: -1.0})
    assert p.derivative_at_one() == -5.0 + 10.0 - 3.0
    assert LaurentPoly.t_power(7).derivative_at_one() == 7


def test_scalar_ops_and_eval_errors():
    p = LaurentPoly({1: 2.0})
    assert (p * 2).coeff(1) == 4.0
    assert (p / 2).coeff(1) == 1.0
    assert (2 * p) == (p * 2)
    assert (p + 1).coeff(0) == 1.0
    with pytest.raises(ValueError):
        lp_eval(p, 0.0)


def test_pruned():
    p = LaurentPoly({0: 1.0, 5: 1e-14})
    assert p.pruned(1e-10).coeffs == {0: 1.0 + 0j}
    assert p.pruned(1e-16).coeffs == p.coeffs


@given(coeff_maps)
def test_normalize_unit_canonical(c1):
    p = LaurentPoly(c1)
    if p.is_zero:
        with pytest.raises(ValueError):
            normalize_unit(p)
        return
    q = normalize_unit(p)
    assert q.min_exp == 0
    a0 = q.coeff(0)
    assert a0.real > 0 or (a0.real == 0 and a0.imag > 0)
    # the whole unit orbit normalizes to the same representative
    assert normalize_unit(-q.shifted(3)) == q
    assert normalize_unit(q.shifted(-2)) == q


@given(coeff_maps, st.integers(-3, 3), st.sampled_from([1, -1]))
def test_compare_up_to_unit_recovers_unit(c1, k, sign):
    q = LaurentPoly(c1)
    if q.is_zero:
        return
    p = q.shifted(k) * sign
    align = compare_up_to_unit(p, q)
    assert align is not None
    assert align.shift == k and align.sign == sign
    assert align.relative_deviation == 0.0


def test_compare_rejects():
    p = LaurentPoly({0: 1.0, 3: -1.0})
    q = LaurentPoly({0: 1.0, 2: -1.0})     # different span
    assert compare_up_to_unit(p, q) is None
    r = LaurentPoly({0: 1.0, 3: -1.0 + 0.1j})
    assert compare_up_to_unit(p, r, tol=1e-8) is None
    assert compare_up_to_unit(p, r, tol=0.2) is not None
    with pytest.raises(ValueError):
        compare_up_to_unit(p, LaurentPoly.zero())


def _random_matrix(rng, n=4, emin=-2, emax=2):
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            c = {
                e: complex(rng.standard_normal(), rng.standard_normal())
                for e in rng.integers(emin, emax + 1, size=2)
            }
            row.append(LaurentPoly(c))
        rows.append(row)
    return LaurentMatrix.from_rows(rows)


def test_poly_det_matches_scalar_determinant():
    rng = np.random.default_rng(7)
    for _ in range(6):
        m = _random_matrix(rng)
        det = poly_det(m)
        for t0 in (1.3 - 0.4j, 0.5 + 0.5j, -1.1 + 0.2j):
            direct = np.linalg.det(m.evaluated(t0))
            val = lp_eval(det, t0)
            assert abs(val - direct) <= 1e-9 * max(1.0, abs(direct))


def test_poly_det_triangular():
    one = LaurentPoly.one()
    t = LaurentPoly.t_power(1)
    zero = LaurentPoly.zero()
    m = LaurentMatrix.from_rows(
        [
            [one + t, one, t],
            [zero, 2 * one, one],
            [zero, zero, one - t],
        ]
    )
    expect = (one + t) * (2 * one) * (one - t)
    det = poly_det(m)
    assert det.support() == expect.support()
    assert max(abs(det.coeff(e) - expect.coeff(e)) for e in expect.support()) < 1e-12


def test_poly_det_zero_row_and_radius():
    zero = LaurentPoly.zero()
    one = LaurentPoly.one()
    m = LaurentMatrix.from_rows([[zero, zero], [one, one]])
    assert poly_det(m).is_zero
    rng = np.random.default_rng(11)
    m = _random_matrix(rng, n=3)
    d1 = poly_det(m, radius=1.0)
    d2 = poly_det(m, radius=1.5)
    assert d1.support() == d2.support()
    assert max(abs(d1.coeff(e) - d2.coeff(e)) for e in d1.support()) < 1e-9


def test_laurent_matrix_shape_checks():
    one = LaurentPoly.one()
    with pytest.raises(ValueError):
        LaurentMatrix.from_rows([[one, one]])
    m = LaurentMatrix.from_rows([[LaurentPoly({-1: 1.0, 2: 3.0})]])
    assert m.degree_bounds == ((-1, 2),)
    assert m.evaluated(2.0)[0, 0] == 0.5 + 12.0


def test_poly_hash_and_call():
    p = LaurentPoly({0: 1.0, 1: 1.0})
    q = LaurentPoly({1: 1.0, 0: 1.0})
    assert p == q and hash(p) == hash(q)
    assert p(2.0) == 3.0
