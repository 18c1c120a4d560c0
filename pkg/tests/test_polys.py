import cmath
import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from conftest import rand_fraction

from qchaundy import polys
from qchaundy.errors import QSeriesError, UnsupportedInExactMode, ZeroParameter
from qchaundy.polys import CHAIN, FAMILY_PARAMS, PolySpec, XPoint, eval_poly, poly, reps_for
from qchaundy.transforms import q_invert_representation

PAIRS = [(fam, inverse) for fam in CHAIN for inverse in (False, True)]


def exact_reps(fam, inverse):
    return [r for r in reps_for(fam, inverse) if r.exact_capable]


def float_only_reps(fam, inverse):
    return [r for r in reps_for(fam, inverse) if not r.exact_capable]


def rational_point(rng, fam, inverse, n, positive_q=False, also=()):
    """Rational (q, z, params) at which every exact representation is defined.

    ``also`` lists functions of z giving further points that must be
    admissible too (for instance the reciprocal 1/z).
    """
    while True:
        q = Fraction(rng.randint(1, 8), rng.randint(9, 12))
        if not positive_q and rng.random() < 0.3:
            q = -q
        z = rand_fraction(rng, den=7)
        params = [rand_fraction(rng, den=7) for _ in range(FAMILY_PARAMS[fam])]
        try:
            values = [r.value(n, q, z, params) for r in exact_reps(fam, inverse)]
            for f in also:
                for r in exact_reps(fam, inverse):
                    r.value(n, q, f(z), params)
            if positive_q:
                for r in float_only_reps(fam, inverse):
                    r.value(n, float(q), float(z), [float(p) for p in params])
        except (QSeriesError, ZeroDivisionError):
            continue
        return q, z, params, values


def complex_point(rng, fam):
    q = float(rng.uniform(0.05, 0.8))
    z = cmath.rect(rng.uniform(0.5, 2), rng.uniform(-np.pi, np.pi))
    params = [cmath.rect(rng.uniform(0.1, 0.9), rng.uniform(-np.pi, np.pi)) for _ in range(FAMILY_PARAMS[fam])]
    return q, z, params


def rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a)


def test_degree_zero_is_one():
    for fam, inverse in PAIRS:
        params = [0.3, -0.4, 0.5 + 0.1j, 0.7][: FAMILY_PARAMS[fam]]
        for r in reps_for(fam, inverse):
            assert r.value(0, 0.5, 1.3, params) == pytest.approx(1, rel=1e-14)


def test_hermite_degree_one():
    for z in (Fraction(2), Fraction(-3, 7), Fraction(5, 4)):
        assert poly("cqh", 1, z, Fraction(1, 3)) == z + 1 / z
    assert poly("cqh", 1, 2.0, 0.5) == pytest.approx(2.5, rel=1e-15)


def test_askey_wilson_degree_one_all_reps_exact():
    q, z = Fraction(1, 3), Fraction(5, 2)
    P = [Fraction(2, 7), Fraction(-3, 5), Fraction(4, 9), Fraction(5, 11)]
    vals = {r.id: r.value(1, q, z, P) for r in exact_reps("aw", False)}
    assert len(set(vals.values())) == 1, vals


@pytest.mark.parametrize("fam,inverse", PAIRS)
def test_representations_agree_exactly(fam, inverse):
    rng = random.Random(CHAIN.index(fam) * 2 + inverse)
    for _ in range(50):
        n = rng.randint(0, 8)
        q, z, params, values = rational_point(rng, fam, inverse, n, positive_q=True)
        assert all(v == values[0] for v in values)
        # float-only forms (infinite products, base q^(1/2)) against the exact value
        for r in float_only_reps(fam, inverse):
            got = r.value(n, float(q), float(z), [float(p) for p in params])
            assert rel(got, float(values[0])) <= 1e-12, (r.id, n, q, z, params)


@pytest.mark.parametrize("fam,inverse", PAIRS)
def test_representations_agree_at_complex_points(fam, inverse):
    rng = np.random.default_rng(CHAIN.index(fam) * 2 + inverse)
    for _ in range(50):
        n = int(rng.integers(0, 9))
        q, z, params = complex_point(rng, fam)
        values = {r.id: r.value(n, q, z, params) for r in reps_for(fam, inverse)}
        ref = values[polys.DEFAULT_REP[(fam, inverse)]]
        for rid, v in values.items():
            assert rel(v, ref) <= 1e-12, (rid, n, q, z, params)


@pytest.mark.parametrize("fam,inverse", PAIRS)
def test_z_reciprocal_symmetry(fam, inverse):
    rng = random.Random(7 + CHAIN.index(fam))
    for _ in range(20):
        n = rng.randint(0, 8)
        q, z, params, values = rational_point(rng, fam, inverse, n, also=[lambda w: 1 / w])
        for r, v in zip(exact_reps(fam, inverse), values):
            assert r.value(n, q, 1 / z, params) == v
    frng = np.random.default_rng(3)
    for _ in range(20):
        n = int(frng.integers(0, 9))
        q, z, params = complex_point(frng, fam)
        for r in reps_for(fam, inverse):
            assert rel(r.value(n, q, 1 / z, params), r.value(n, q, z, params)) <= 1e-12


@pytest.mark.parametrize("fam,inverse", [p for p in PAIRS if FAMILY_PARAMS[p[0]] >= 2])
def test_parameter_permutation_symmetry(fam, inverse):
    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(0, 6)
        q, z, params, values = rational_point(rng, fam, inverse, n)
        for perm in itertools.permutations(params):
            try:
                got = [r.value(n, q, z, list(perm)) for r in exact_reps(fam, inverse)]
            except (QSeriesError, ZeroDivisionError):
                continue  # a permuted order can put a parameter into an excluded set
            assert all(g == values[0] for g in got)
    frng = np.random.default_rng(12)
    for _ in range(10):
        n = int(frng.integers(0, 9))
        q, z, params = complex_point(frng, fam)
        base = poly(fam, n, z, q, params, inverse=inverse)
        for perm in itertools.permutations(params):
            assert rel(poly(fam, n, z, q, list(perm), inverse=inverse), base) <= 1e-12


@pytest.mark.parametrize("fam", CHAIN)
def test_q_inverse_is_the_q_inverted_base_rep(fam):
    rng = random.Random(13)
    for base in exact_reps(fam, False):
        inverted = q_invert_representation(base.build)
        for _ in range(10):
            n = rng.randint(0, 6)
            q, z, params, values = rational_point(rng, fam, True, n)
            assert inverted(n, q, z, params).value() == values[0]


@pytest.mark.parametrize("fam,inverse", PAIRS)
def test_polynomial_of_degree_n_in_x(fam, inverse):
    # the (n+1)-st divided difference over n+2 nodes in x vanishes, the n-th does not
    rng = random.Random(17)
    for n in range(7):
        zs = [Fraction(k + 2, 1) for k in range(n + 2)]
        nodes = [lambda w, z=z: z for z in zs]
        q, _, params, _ = rational_point(rng, fam, inverse, n, also=nodes)
        xs = [XPoint(z).x for z in zs]
        ys = [eval_poly(PolySpec(fam, inverse, params), n, z, q) for z in zs]
        table = ys[:]
        for level in range(1, n + 2):
            table = [(table[i + 1] - table[i]) / (xs[i + level] - xs[i]) for i in range(len(table) - 1)]
            if level == n:
                assert table[0] != 0
        assert table == [0]


def test_xpoint():
    p = XPoint(Fraction(3))
    assert p.x == Fraction(5, 3) == XPoint(Fraction(1, 3)).x
    z = XPoint.from_x(0.3 + 0.2j).z
    assert (z + 1 / z) / 2 == pytest.approx(0.3 + 0.2j, rel=1e-14)
    assert XPoint.from_x(1.5).z == pytest.approx(1.5 + 1.25**0.5)
    with pytest.raises(ZeroParameter):
        XPoint(0)


def test_branch_choice_is_immaterial():
    for x in (0.3, 1.7, -0.4 + 0.9j):
        z = XPoint.from_x(x).z
        for fam in CHAIN:
            params = [0.3, -0.5, 0.6j, 0.2][: FAMILY_PARAMS[fam]]
            assert rel(poly(fam, 5, 1 / z, 0.4, params), poly(fam, 5, z, 0.4, params)) <= 1e-12


@pytest.mark.parametrize("inverse", [False, True])
def test_limit_chain(inverse):
    params = [0.3 + 0.1j, -0.45, 0.6j, 0.25]
    for i, parent in enumerate(CHAIN[:-1]):
        child = CHAIN[i + 1]
        for n in range(6):
            gap = polys.limit_chain_check(parent, child, 1e-9, n, 1.3 - 0.4j, 0.45,
                                          params[: FAMILY_PARAMS[child]], inverse=inverse)
            assert gap < 1e-7, (parent, child, n, gap)


def test_limit_chain_by_substitution():
    q, z = Fraction(1, 3), Fraction(5, 2)
    P = [Fraction(2, 7), Fraction(-3, 5), Fraction(4, 9)]
    for n in range(6):
        assert polys.limit_chain_check("aw", "cdqh", 0, n, z, q, P) == 0
        assert polys.limit_chain_check("cbqh", "cqh", 0, n, z, q, []) == 0
    with pytest.raises(ZeroParameter):
        polys.limit_chain_check("aw", "cdqh", 0, 2, z, q, P, rep_from="aw:def2")
    with pytest.raises(ValueError):
        polys.limit_chain_check("aw", "asc", 1e-9, 2, z, q, P[:2])


def test_hermite_connection_examples():
    for direction in ("q_to_inv", "inv_to_q"):
        assert polys.hermite_connect(direction, 0, 1.7, 0.3) == 1
        assert polys.hermite_connect(direction, 1, 1.7, 0.3) == pytest.approx(1.7 + 1 / 1.7, rel=1e-15)
    q, z = 0.3, 1.7
    assert rel(polys.hermite_connect("q_to_inv", 4, z, q), poly("cqh", 4, z, q)) < 1e-12
    assert rel(polys.hermite_connect("inv_to_q", 4, z, q), poly("cqh", 4, z, q, inverse=True)) < 1e-12


def test_hermite_connection_exact():
    rng = random.Random(19)
    for _ in range(20):
        q, z = Fraction(rng.randint(1, 8), 9), rand_fraction(rng)
        for n in range(9):
            assert polys.hermite_connect("q_to_inv", n, z, q) == poly("cqh", n, z, q)
            assert polys.hermite_connect("inv_to_q", n, z, q) == poly("cqh", n, z, q, inverse=True)


def test_new_hermite_representations():
    assert all(v == pytest.approx(1, rel=1e-14) for v in polys.new_hermite_reps(0, 0.5, 2.0).values())
    assert all(v == pytest.approx(2.5, rel=1e-14) for v in polys.new_hermite_reps(1, 0.5, 2.0).values())
    vals = polys.new_hermite_reps(3, 0.4, 1.3)
    assert rel(vals["acqH1"], vals["acqH2"]) < 1e-10
    assert rel(vals["acqH1"], poly("cqh", 3, 1.3, 0.4)) < 1e-10
    assert rel(vals["acqiH1"], vals["acqiH2"]) < 1e-10
    assert rel(vals["acqiH1"], poly("cqh", 3, 1.3, 0.4, inverse=True)) < 1e-10


def test_spec_validation():
    with pytest.raises(ValueError):
        PolySpec("aw", params=(0.1, 0.2))
    with pytest.raises(ValueError):
        PolySpec("asc", params=(0.1, 0.2), rep="aw:def1")
    with pytest.raises(ValueError):
        PolySpec("asc", params=(0.1, 0.2), rep="qiASC:1")
    with pytest.raises(ValueError):
        PolySpec("laguerre")
    with pytest.raises(ZeroParameter):
        PolySpec("asc", params=(0.1, 0))
    assert PolySpec("AlSalamChihara", params=(0.1, 0.2)).rep == polys.DEFAULT_REP[("asc", False)]
    with pytest.raises(ZeroParameter):
        poly("cqh", 2, 0, 0.5)
    with pytest.raises(ValueError):
        poly("cqh", -1, 1.0, 0.5)


def test_float_only_reps_refuse_exact_input():
    with pytest.raises(UnsupportedInExactMode):
        poly("cbqh", 2, Fraction(2), Fraction(1, 3), [Fraction(1, 5)], rep="cbqH:def3b")
    with pytest.raises(UnsupportedInExactMode):
        poly("cqh", 2, Fraction(2), Fraction(1, 3), inverse=True, rep="cqiH:def2")
    with pytest.raises(UnsupportedInExactMode):
        polys.build("acqH1", 2, 0.5, 2.0, ())


def test_guarded_evaluation_matches_exact_value():
    # small parameters make aw:def1 cancel heavily in double precision
    q, z = Fraction(1, 2), Fraction(3, 2)
    P = [Fraction(1, 10), Fraction(1, 9), Fraction(-1, 8), Fraction(1, 7)]
    for n in range(9):
        exact = polys.REPS["aw:def1"].value(n, q, z, P)
        got = polys.REPS["aw:def1"].value(n, float(q), float(z), [float(p) for p in P])
        assert isinstance(got, float)
        assert rel(got, float(exact)) <= 1e-13
