"""Transformations of terminating series and the q-Hermite quadratic identities.

Every transformation returns a :class:`Transformed` pair: a scalar
prefactor and a :class:`TerminatingSeries`, kept separate so that exact
arithmetic and structural assertions on the produced series survive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import mpmath

from . import phi
from .errors import NonFiniteError, ParameterInOmegaQ, ZeroParameter
from .qcore import (
    all_exact,
    binom2,
    from_mp,
    inv,
    ipow,
    is_mp,
    omega_index,
    pm,
    prod,
    qpoch,
    qpoch_multi,
    qpow,
    run_extended,
    to_mp,
    zpm,
)


@dataclass(frozen=True)
class TerminatingSeries:
    """r+1 phi s ^p (q^-n, a_1..a_r; b_1..b_s; q, z) of degree n."""

    n: int
    a: tuple
    b: tuple
    q: object
    z: object
    p: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("degree n must be nonnegative")
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))

    @property
    def spec(self) -> phi.SeriesSpec:
        return phi.SeriesSpec((ipow(self.q, -self.n),) + self.a, self.b, self.q, self.z, self.p)

    def value(self):
        return phi.value(self.spec)

    def with_(self, **changes) -> "TerminatingSeries":
        return replace(self, **changes)


@dataclass(frozen=True)
class Transformed:
    prefactor: object
    series: TerminatingSeries

    def value(self):
        return self.prefactor * self.series.value()


def _cancellation_digits(terms) -> float:
    """Decimal digits lost when summing ``terms``: log10(sum |t| / |sum t|)."""
    scale = sum(abs(t) for t in terms)
    total = abs(sum(terms))
    if scale == 0:
        return 0.0
    if total == 0:
        return math.inf
    return float(mpmath.log10(scale / total)) if is_mp(scale) else math.log10(scale / total)


def _identity(x):
    return x


def guarded_evaluate(make: Callable[[Callable], Transformed]):
    """Value of a prefactor times terminating series, with cancellation and overflow absorbed.

    ``make(conv)`` builds the :class:`Transformed`, passing every input
    scalar through ``conv``.  It is first built and summed as given; if the
    sum loses too many digits to cancellation (more than 3 of a float's 16,
    or more than dps - 20 in mpmath) or overflows, it is rebuilt in mpmath
    with enough extra digits.  Float input gives a float or complex back;
    mpmath input is rounded to the caller's precision.  Exact input is
    summed exactly.
    """
    tr = make(_identity)
    spec = tr.series.spec
    if all_exact(*spec.scalars()):
        return tr.value()
    from_float = not any(is_mp(v) for v in spec.scalars())
    dps = 16 if from_float else mpmath.mp.dps
    margin = 13 if from_float else 20
    try:
        terms = phi.terms(spec, tr.series.n + 1)
        lost = _cancellation_digits(terms)
        value = tr.prefactor * sum(terms)
        finite = mpmath.isfinite(value) and mpmath.isfinite(lost)
    except (NonFiniteError, OverflowError, ZeroDivisionError):
        finite, lost = False, 16.0
    if finite and lost <= dps - margin:
        return value
    if not lost <= math.inf:  # nan from overflowed terms
        lost = 16.0
    while True:
        dps = dps + int(min(lost, 2 * dps)) + 10
        with mpmath.workdps(dps):
            tr = make(to_mp)
            terms = phi.terms(tr.series.spec, tr.series.n + 1)
            lost = _cancellation_digits(terms)
            if lost <= dps - 20:
                value = tr.prefactor * mpmath.fsum(terms)
                break
    return from_mp(value) if from_float else +value


def from_spec(spec: phi.SeriesSpec) -> TerminatingSeries:
    """Read a spec whose first numerator is q^-n as a :class:`TerminatingSeries`."""
    n = phi.terminating_degree(spec.numer[0], spec.q) if spec.numer else None
    if n is None:
        raise ValueError(f"leading numerator of {spec} is not of the form q^-n")
    return TerminatingSeries(n, spec.numer[1:], spec.denom, spec.q, spec.z, spec.m)


def _check_params(ts: TerminatingSeries) -> None:
    for x in ts.a + ts.b:
        if x == 0:
            raise ParameterInOmegaQ("transformation parameters must be nonzero")
        k = omega_index(x, ts.q, ts.n)
        if k is not None:
            raise ParameterInOmegaQ(f"parameter {x!r} lies at q^-{k} with k < n = {ts.n}")


def transform_lemma13(ts: TerminatingSeries) -> Transformed:
    """Reverse the order of summation of a terminating series.

    Maps r+1 phi s ^p with argument z to s+1 phi r ^(s-r+p) with numerators
    q^{1-n}/b, denominators q^{1-n}/a and argument
    (prod b / prod a) q^{(1-p)n+p+1} / z.  Applying it twice gives back the
    original series with prefactor 1.
    """
    _check_params(ts)
    if ts.z == 0:
        raise ZeroParameter("argument z must be nonzero")
    n, q, z, p = ts.n, ts.q, ts.z, ts.p
    r, s = len(ts.a), len(ts.b)
    qn1 = ipow(q, 1 - n)
    sign_q = (-1) ** n * ipow(q, binom2(n))
    pref = (
        qpoch_multi(ts.a, q, n)
        * inv(qpoch_multi(ts.b, q, n))
        * (z * inv(q)) ** n
        * ipow(sign_q, s - r + p - 1)
    )
    new_z = prod(ts.b) * inv(prod(ts.a)) * ipow(q, (1 - p) * n + p + 1) * inv(z)
    series = TerminatingSeries(
        n,
        tuple(qn1 * inv(b) for b in ts.b),
        tuple(qn1 * inv(a) for a in ts.a),
        q,
        new_z,
        s - r + p,
    )
    return Transformed(pref, series)


def invert_gasper_rahman(ts: TerminatingSeries) -> Transformed:
    """Classical inversion of a terminating r+1 phi s (superscript 0)."""
    if ts.p != 0:
        raise ValueError("the classical inversion applies to series with superscript 0")
    return transform_lemma13(ts)


def reverse_balanced(ts: TerminatingSeries) -> Transformed:
    """Inversion of a terminating r+1 phi r; alias that documents the r = s case."""
    if len(ts.a) != len(ts.b) or ts.p != 0:
        raise ValueError("expected an r+1 phi r series with superscript 0")
    return transform_lemma13(ts)


def is_balanced(ts: TerminatingSeries) -> bool:
    return phi.is_balanced(ts.spec)


def invert_base(ts: TerminatingSeries) -> TerminatingSeries:
    """Rewrite the series in base 1/q with reciprocal parameters.

    The numerators become q^n, 1/a, the denominators 1/b, the argument is
    multiplied by prod a / (prod b q^{n+1}) and the superscript becomes
    r - s - p.  The map is an involution.
    """
    for x in ts.a + ts.b + (ts.q,):
        if x == 0:
            raise ZeroParameter("base inversion needs nonzero parameters")
    n, q = ts.n, ts.q
    r, s = len(ts.a), len(ts.b)
    new_z = ts.z * prod(ts.a) * inv(prod(ts.b) * ipow(q, n + 1))
    return TerminatingSeries(
        n,
        tuple(inv(a) for a in ts.a),
        tuple(inv(b) for b in ts.b),
        inv(q),
        new_z,
        r - s - ts.p,
    )


#: builder(n, q, z, params) -> Transformed, the shape of every polynomial representation
RepBuilder = Callable[..., Transformed]


def q_invert_representation(builder: RepBuilder) -> RepBuilder:
    """Turn a base-q representation into one for the same object at base 1/q.

    The returned builder evaluates the original builder at 1/q and rewrites
    the resulting base-1/q series as a base-q series with reciprocal
    parameters, so that its value is f(q^{-1}).
    """

    def inverted(n, q, z, params):
        t = builder(n, inv(q), z, params)
        return Transformed(t.prefactor, invert_base(t.series))

    inverted.__name__ = f"q_inverted_{getattr(builder, '__name__', 'rep')}"
    return inverted


# -- quadratic transformation for q-Hermite ---------------------------------

def _require_real_q(q):
    if isinstance(q, complex) or not (0 < float(q) < 1):
        raise ValueError("fractional powers of q need real q in (0, 1)")


def quad_transform_qH(n: int, q, z) -> list:
    """The four equal forms of z^-n H_n(x | q^-2), q real in (0, 1).

    Returned in the order: the 1phi0^1 series in base q^2, the infinite
    product times 0phi1, the 3phi1 form and the 2phi2^-1 form.  Float input
    is evaluated in mpmath with enough digits to absorb the cancellation
    and rounded back to double precision.
    """
    _require_real_q(q)
    if z == 0:
        raise ZeroParameter("z must be nonzero")
    if all_exact(q, z):
        q = float(q)
    lq = max(-math.log10(float(q)), 0.1)
    lz = abs(math.log10(abs(complex(z))))
    digits = 20 + (n * n / 2 + 2 * n + 2) * lq + 2 * n * lz
    return run_extended(_quad_forms, digits, n, q, z)


def _quad_forms(n, q, z):
    q2 = q * q
    h = qpow(q, 0.5)
    hz = [h * w for w in zpm(z)]
    f1 = phi.phi([ipow(q2, -n)], [], q2, q2 / z**2, m=1)
    f2 = qpoch_multi(pm(q / z), q, None) * phi.phi([], [q2 / z**2], q2, ipow(q2, 1 - n) / z**2)
    f3 = qpow(q, -(n**2) / 2) / z**n * qpoch(-q, q, n) * phi.phi([ipow(q, -n)] + hz, [-q], q, -ipow(q, n))
    f4 = (
        qpow(q, -(n**2) / 2)
        / (-z) ** n
        * qpoch_multi(hz, q, n)
        * phi.phi(pm(ipow(q, -n)), [ipow(q, -n) * w for w in hz], q, q, m=-1)
    )
    return [f1, f2, f3, f4]


def summation_qH_closed(n: int, q, sign: int, variant: str = "first"):
    """Closed forms of the two q-Hermite summation formulas.

    ``first``:  q^{-n(1+sign)/2} (-q;q)_n
    ``second``: q^{-(n^2 + sign n)/2} (-q;q)_n
    """
    _check_sign(sign)
    if variant == "first":
        e = -n * (1 + sign) // 2
    elif variant == "second":
        e = -(n * n + sign * n) // 2
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return ipow(q, e) * qpoch(-q, q, n)


def summation_qH_series(n: int, q, sign: int, variant: str = "first") -> phi.SeriesSpec:
    """The terminating series side of :func:`summation_qH_closed` (exact for rational q)."""
    _check_sign(sign)
    q2 = q * q
    if variant == "first":
        return phi.qhyp([ipow(q2, -n)], [], q2, ipow(q, 2 * n - sign), m=-1)
    if variant == "second":
        return phi.qhyp([ipow(q2, -n)], [], q2, ipow(q, 2 - sign), m=1)
    raise ValueError(f"unknown variant {variant!r}")


def summation_qH_product_form(n: int, q, sign: int):
    """Infinite product times 0phi1 form of the second summation (float, q in (0,1))."""
    _check_sign(sign)
    _require_real_q(q)
    q = float(q)
    w = q ** (1 - sign / 2)
    return qpoch_multi(pm(w), q, None) * phi.phi([], [q ** (2 - sign)], q * q, q ** (-2 * n + 2 - sign))


def summation_qH(n: int, q, sign: int, variant: str = "first"):
    """Closed form value, after asserting it matches the direct series sum."""
    closed = summation_qH_closed(n, q, sign, variant)
    direct = phi.value(summation_qH_series(n, q, sign, variant))
    if all_exact(q):
        ok = closed == direct
    else:
        ok = abs(closed - direct) <= 1e-10 * abs(closed)
    if not ok:
        raise AssertionError(f"summation mismatch: closed {closed!r} vs series {direct!r}")
    return closed


def _check_sign(sign: int) -> None:
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")


__all__ = [
    "TerminatingSeries",
    "Transformed",
    "guarded_evaluate",
    "from_spec",
    "transform_lemma13",
    "invert_gasper_rahman",
    "reverse_balanced",
    "is_balanced",
    "invert_base",
    "q_invert_representation",
    "quad_transform_qH",
    "summation_qH",
    "summation_qH_closed",
    "summation_qH_series",
    "summation_qH_product_form",
]
