import cmath
import random
from fractions import Fraction

import numpy as np
import pytest
from conftest import rand_fraction, rand_q

from qchaundy import phi, polys
from qchaundy.errors import ParameterInOmegaQ, ZeroParameter
from qchaundy.qcore import binom2, inv, ipow, omega_index, prod, qpoch, qpoch_multi
from qchaundy.transforms import (
    TerminatingSeries,
    from_spec,
    invert_base,
    invert_gasper_rahman,
    q_invert_representation,
    quad_transform_qH,
    reverse_balanced,
    summation_qH,
    summation_qH_closed,
    summation_qH_product_form,
    summation_qH_series,
    transform_lemma13,
)


def admissible(rng, q, n):
    """Nonzero rational outside {q^-k : 0 <= k < n}, the set the inversions exclude."""
    while True:
        a = rand_fraction(rng)
        if omega_index(a, q, n) is None:
            return a


def random_series(rng, n, r, s, p=0, z=None):
    q = rand_q(rng)
    a = tuple(admissible(rng, q, n) for _ in range(r))
    b = tuple(admissible(rng, q, n) for _ in range(s))
    return TerminatingSeries(n, a, b, q, z if z is not None else rand_fraction(rng), p)


def inversion_oracle(ts):
    """Right-hand side of the classical inversion formula, summed term by term."""
    n, q, z, a, b = ts.n, ts.q, ts.z, ts.a, ts.b
    r, s = len(a), len(b)
    pref = qpoch_multi(a, q, n) * inv(qpoch_multi(b, q, n)) * (z / q) ** n * ((-1) ** n * ipow(q, binom2(n))) ** (s - r - 1)
    w = prod(b) * inv(prod(a)) * ipow(q, n + 1) / z
    qn1 = ipow(q, 1 - n)
    total = 0
    for k in range(n + 1):
        num = qpoch(ipow(q, -n), q, k) * qpoch_multi([qn1 / x for x in b], q, k)
        den = qpoch(q, q, k) * qpoch_multi([qn1 / x for x in a], q, k)
        total += num * inv(den) * w**k
    return pref * total


def test_degree_zero_is_the_identity():
    ts = TerminatingSeries(0, (Fraction(2),), (Fraction(3),), Fraction(1, 2), Fraction(5))
    out = invert_gasper_rahman(ts)
    assert out.prefactor == 1 and out.value() == 1 == ts.value()


def test_inversion_small_case_exact():
    q, a, b, z = Fraction(1, 3), Fraction(2, 5), Fraction(7, 2), Fraction(-4, 3)
    ts = TerminatingSeries(3, (a,), (b,), q, z)
    out = invert_gasper_rahman(ts)
    assert out.value() == ts.value() == inversion_oracle(ts)


def test_inversion_random_draws(rng):
    # r and s independent; the formula does not need r = s
    for _ in range(100):
        n = rng.randint(0, 10)
        ts = random_series(rng, n, rng.randint(0, 3), rng.randint(0, 3))
        lhs = ts.value()
        assert invert_gasper_rahman(ts).value() == lhs
        assert inversion_oracle(ts) == lhs


def test_inversion_rejects_excluded_parameters():
    q = Fraction(1, 2)
    with pytest.raises(ParameterInOmegaQ):
        invert_gasper_rahman(TerminatingSeries(3, (Fraction(4),), (Fraction(3),), q, Fraction(1)))
    with pytest.raises(ParameterInOmegaQ):
        invert_gasper_rahman(TerminatingSeries(3, (Fraction(3),), (Fraction(0),), q, Fraction(1)))
    with pytest.raises(ZeroParameter):
        transform_lemma13(TerminatingSeries(3, (Fraction(3),), (Fraction(5),), q, Fraction(0)))


@pytest.mark.parametrize("p", [-1, 0, 1, 2])
def test_shifted_transformation_preserves_value(rng, p):
    for _ in range(100):
        n = rng.randint(0, 8)
        ts = random_series(rng, n, rng.randint(0, 3), rng.randint(0, 3), p)
        out = transform_lemma13(ts)
        assert out.value() == ts.value()
        r, s = len(ts.a), len(ts.b)
        assert (len(out.series.a), len(out.series.b), out.series.p) == (s, r, s - r + p)
        assert out.series.z == prod(ts.b) * inv(prod(ts.a)) * ipow(ts.q, (1 - p) * n + p + 1) / ts.z


def test_shifted_transformation_worked_case():
    q = Fraction(2, 3)
    ts = TerminatingSeries(2, (Fraction(5, 2),), (Fraction(-3), Fraction(7, 4)), q, Fraction(3, 5), 1)
    assert transform_lemma13(ts).value() == ts.value()


def test_shifted_transformation_degree_one_by_hand():
    q, a, b, z = Fraction(3, 7), Fraction(5, 4), Fraction(-2, 9), Fraction(8, 5)
    ts = TerminatingSeries(1, (a,), (b,), q, z)
    out = transform_lemma13(ts)
    # both sides have two terms: 1 + (1-1/q)(1-a) z / ((1-q)(1-b))
    lhs = 1 + (1 - 1 / q) * (1 - a) * z / ((1 - q) * (1 - b))
    w = out.series.z
    rhs = out.prefactor * (1 + (1 - 1 / q) * (1 - 1 / b) * w / ((1 - q) * (1 - 1 / a)))
    assert ts.value() == lhs == rhs


def test_shifted_transformation_round_trip(rng):
    for _ in range(100):
        n = rng.randint(0, 8)
        ts = random_series(rng, n, rng.randint(0, 3), rng.randint(0, 3), rng.choice([-1, 0, 1, 2]))
        once = transform_lemma13(ts)
        twice = transform_lemma13(once.series)
        assert twice.series == ts
        assert once.prefactor * twice.prefactor == 1


def test_corollary_for_equal_lengths(rng):
    for _ in range(100):
        n = rng.randint(0, 8)
        r = rng.randint(0, 3)
        ts = random_series(rng, n, r, r)
        out = reverse_balanced(ts)
        q, z = ts.q, ts.z
        pref = ipow(q, -binom2(n)) * (-1) ** n * qpoch_multi(ts.a, q, n) / qpoch_multi(ts.b, q, n) * (z / q) ** n
        assert out.prefactor == pref
        assert out.series.p == 0
        assert out.value() == ts.value()


def test_balanced_input_gives_argument_q2_over_z(rng):
    done = 0
    while done < 100:
        n = rng.randint(1, 8)
        r = rng.randint(1, 3)
        q = rand_q(rng)
        a = [admissible(rng, q, n) for _ in range(r)]
        b = [admissible(rng, q, n) for _ in range(r - 1)]
        last = ipow(q, 1 - n) * prod(a) / prod(b)
        if omega_index(last, q, n) is not None:
            continue
        z = rand_fraction(rng)
        ts = TerminatingSeries(n, a, b + [last], q, z)
        assert phi.is_balanced(ts.spec)
        out = reverse_balanced(ts)
        assert out.series.z == q * q / z
        done += 1


def test_base_inversion(rng):
    for _ in range(100):
        n = rng.randint(0, 8)
        r = rng.randint(0, 3)
        ts = random_series(rng, n, r, r)
        flipped = invert_base(ts)
        assert flipped.q == 1 / ts.q and flipped.p == 0
        assert flipped.spec.numer[0] == ipow(ts.q, n)
        assert flipped.value() == ts.value()
        # second form of the connecting relation is the reversed series
        assert flipped.value() == reverse_balanced(ts).value()
        assert invert_base(flipped) == ts


def test_base_inversion_worked_case():
    q = Fraction(1, 2)
    ts = TerminatingSeries(2, (Fraction(3), Fraction(-1, 5)), (Fraction(7), Fraction(2, 3)), q, Fraction(5, 3))
    assert invert_base(ts).value() == ts.value()


def test_base_inversion_with_superscript(rng):
    for _ in range(50):
        n = rng.randint(0, 6)
        ts = random_series(rng, n, rng.randint(0, 3), rng.randint(0, 3), rng.choice([-1, 0, 1, 2]))
        flipped = invert_base(ts)
        assert flipped.value() == ts.value()
        assert invert_base(flipped) == ts


def test_base_inversion_rejects_zero():
    with pytest.raises(ZeroParameter):
        invert_base(TerminatingSeries(2, (Fraction(0),), (Fraction(3),), Fraction(1, 2), Fraction(1)))


def test_from_spec_reads_the_degree():
    q = Fraction(1, 3)
    ts = from_spec(phi.qhyp([ipow(q, -4), Fraction(2)], [Fraction(5)], q, Fraction(1, 2)))
    assert ts.n == 4 and ts.a == (Fraction(2),)
    with pytest.raises(ValueError):
        from_spec(phi.qhyp([Fraction(2)], [Fraction(5)], q, Fraction(1, 2)))


def aw_params(rng, q, n):
    while True:
        P = [rand_fraction(rng, den=5) for _ in range(4)]
        if len({abs(x) for x in P}) == 4 and all(omega_index(x * y, q, n) is None and omega_index(inv(x * y), q, n) is None
                                                for i, x in enumerate(P) for y in P[i + 1:]):
            return P


def test_q_inverted_askey_wilson(rng):
    inverted = q_invert_representation(polys.REPS["aw:def1"].build)
    for _ in range(100):
        n = rng.randint(0, 6)
        q = rand_q(rng)
        P = aw_params(rng, q, n)
        z = rand_fraction(rng)
        # f(1/q) computed three ways: the inverted builder, the base-1/q series, and the
        # stated relation q^{-3C(n,2)} (-abcd)^n p_n(x; 1/a, 1/b, 1/c, 1/d | q)
        got = inverted(n, q, z, P).value()
        assert got == polys.build("aw:def1", n, 1 / q, z, P).value()
        assert got == polys.build("aw:inv1", n, q, z, P).value()
        assert inverted(n, q, z, P).series.q == q


def test_q_inverted_degree_zero():
    inverted = q_invert_representation(polys.REPS["aw:def1"].build)
    t = inverted(0, Fraction(1, 3), Fraction(2), [Fraction(2), Fraction(3), Fraction(5), Fraction(7)])
    assert t.prefactor == 1 and t.series.value() == 1


def test_q_inverted_hermite(rng):
    inverted = q_invert_representation(polys.REPS["cqHrep"].build)
    for _ in range(100):
        n = rng.randint(0, 8)
        q, z = rand_q(rng), rand_fraction(rng)
        assert inverted(n, q, z, ()).value() == polys.REPS["cqiH:def1"].value(n, q, z, ())


def quad_points(seed, count=50):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(0, 7))
        q = float(rng.uniform(0.05, 0.8))
        z = complex(cmath.rect(rng.uniform(0.5, 2), rng.uniform(-np.pi, np.pi)))
        yield n, q, z


def test_quadratic_transformation_four_ways():
    for n, q, z in quad_points(11):
        forms = quad_transform_qH(n, q, z)
        for f in forms[1:]:
            assert abs(f - forms[0]) <= 1e-10 * abs(forms[0])


def test_quadratic_transformation_is_hermite():
    # the first form is z^-n H_n(x | q^-2) in base q^2
    for n, q, z in quad_points(12, 20):
        forms = quad_transform_qH(n, q, z)
        h = polys.poly("cqh", n, z, q * q, inverse=True)
        assert abs(forms[0] - h / z**n) <= 1e-10 * abs(forms[0])


def test_quadratic_transformation_degree_zero():
    forms = quad_transform_qH(0, 0.36, 2.0)
    assert forms[0] == forms[2] == forms[3] == 1
    assert forms[1] == pytest.approx(1, rel=1e-12)


def test_quadratic_transformation_worked_case():
    forms = quad_transform_qH(2, 0.36, 2.0)
    assert max(abs(f - forms[0]) for f in forms) <= 1e-12 * abs(forms[0])


@pytest.mark.parametrize("sign", [1, -1])
def test_quadratic_transformation_collapses_to_summation(sign):
    for q in (0.1, 0.36, 0.7):
        for n in range(7):
            forms = quad_transform_qH(n, q, q ** (sign / 2))
            closed = summation_qH_closed(n, q, sign, "second")
            # the fourth form is 0 * inf here: its prefactor holds (1;q)_n and one of its
            # denominators is q^(1-n), so only the first three are compared at this z
            assert all(abs(f - closed) <= 1e-10 * abs(closed) for f in forms[:3])


def test_quadratic_transformation_needs_real_q():
    with pytest.raises(ValueError):
        quad_transform_qH(2, 0.3j, 2.0)
    with pytest.raises(ZeroParameter):
        quad_transform_qH(2, 0.3, 0)


def test_summation_examples():
    q = Fraction(1, 2)
    assert summation_qH(0, q, 1) == 1
    assert summation_qH(1, q, 1) == 3
    assert summation_qH(1, q, -1) == Fraction(3, 2)
    assert phi.value(summation_qH_series(1, q, 1)) == 3


@pytest.mark.parametrize("variant", ["first", "second"])
@pytest.mark.parametrize("sign", [1, -1])
def test_summation_exact(variant, sign):
    rng = random.Random(5)
    for _ in range(20):
        q = Fraction(rng.randint(1, 19), rng.randint(20, 40))
        for n in range(13):
            assert phi.value(summation_qH_series(n, q, sign, variant)) == summation_qH_closed(n, q, sign, variant)


@pytest.mark.parametrize("sign", [1, -1])
def test_summation_product_form(sign):
    for q in (0.2, 0.5, 0.75):
        for n in range(8):
            closed = summation_qH_closed(n, q, sign, "second")
            assert abs(summation_qH_product_form(n, q, sign) - closed) <= 1e-10 * abs(closed)


def test_summation_rejects_bad_sign():
    with pytest.raises(ValueError):
        summation_qH(1, Fraction(1, 2), 0)
