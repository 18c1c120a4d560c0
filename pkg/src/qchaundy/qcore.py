"""q-shifted factorials and the scalar contract used by the rest of the package.

Scalars are plain Python numbers.  Three families are understood:

* exact: ``int`` and ``fractions.Fraction``.  Only field operations and
  integer powers are ever applied, so terminating objects are computed
  without rounding.
* float: ``float`` and ``complex`` (IEEE double precision).
* mp: ``mpmath.mpf`` / ``mpmath.mpc``.  Same semantics as float but with
  the working precision and unbounded exponent range of ``mpmath.mp``.

Any operation that needs a limit (infinite products, non-integer powers)
refuses exact input with :class:`UnsupportedInExactMode`.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from numbers import Number
from typing import Iterable, Sequence

import mpmath

from .errors import (
    NonFiniteError,
    Nonconvergence,
    OmegaQProximity,
    UnsupportedInExactMode,
    ZeroParameter,
)

_MP_TYPES = (mpmath.mpf, mpmath.mpc)
INF = math.inf

#: relative radius of the numerical guard around the excluded set {q^-k}
OMEGA_DELTA = 1e-8


def binom2(n: int) -> int:
    """Return C(n, 2) = n(n-1)/2 for any integer n."""
    return n * (n - 1) // 2


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, float)


def all_exact(*xs) -> bool:
    return all(is_exact(x) for x in xs)


def is_mp(x) -> bool:
    return isinstance(x, _MP_TYPES)


def unit_roundoff(*xs) -> float:
    """Unit roundoff of the float-like arithmetic that ``xs`` will be computed in."""
    if any(is_mp(x) for x in xs):
        return float(mpmath.mp.eps)
    return 2.0**-53


def is_finite(x) -> bool:
    if is_exact(x):
        return True
    if is_mp(x):
        return bool(mpmath.isfinite(x))
    return cmath.isfinite(complex(x))


def check_finite(x, what: str = "value"):
    """Return ``x`` unchanged or raise :class:`NonFiniteError`."""
    if not is_finite(x):
        raise NonFiniteError(f"non-finite {what}: {x!r}")
    return x


def require_inexact(*xs, what: str = "operation") -> None:
    if all_exact(*xs):
        raise UnsupportedInExactMode(f"{what} needs a float or mpmath scalar, got exact input")


def qpow(q, e):
    """Principal-branch power ``q**e``.

    Integer exponents keep exact input exact; other exponents force the
    float (or mp) arithmetic.
    """
    if isinstance(e, Fraction) and e.denominator == 1:
        e = e.numerator
    if isinstance(e, int):
        if e < 0 and q == 0:
            raise ZeroParameter("0 raised to a negative power")
        return q**e
    if is_exact(q):
        q = float(q)
    if is_mp(q):
        return q ** mpmath.mpmathify(e)
    if isinstance(e, Fraction):
        e = float(e)
    if isinstance(q, float) and q < 0:
        q = complex(q)
    return q**e


def ipow(x, k: int):
    """x**k for an integer k of either sign, exact for exact x."""
    if k < 0:
        return inv(x) ** (-k)
    return x**k


def pm(a) -> list:
    """The set +-a as the ordered list [a, -a]."""
    return [a, -a]


def zpm(z) -> list:
    """The set z^{+-} as the ordered list [z, 1/z]."""
    if z == 0:
        raise ZeroParameter("z^{+-} undefined at z = 0")
    return [z, inv(z)]


def inv(x):
    """Reciprocal that keeps integers exact."""
    return Fraction(1) / x if isinstance(x, int) else 1 / x


def qpoch(a, q, n: int):
    """Finite q-shifted factorial (a;q)_n = prod_{j<n} (1 - a q^j)."""
    if n < 0:
        raise ValueError("qpoch needs n >= 0; use qpoch_general for other exponents")
    result = 1
    aq = a
    for _ in range(n):
        result = result * (1 - aq)
        aq = aq * q
    return result


def _min_factors(q, tol) -> int:
    aq = abs(complex(q))
    if aq == 0:
        return 1
    return max(1, math.ceil(math.log(tol) / math.log(aq)))


def qpoch_inf(a, q, tol: float | None = None, max_factors: int = 10**7):
    """Infinite q-shifted factorial (a;q)_inf for |q| < 1.

    The product stops once the current factor differs from 1 by less than
    ``tol`` (default: a tenth of the unit roundoff) and at least
    ceil(log tol / log|q|) factors have been consumed.
    """
    require_inexact(a, q, what="(a;q)_inf")
    if not abs(q) < 1:
        raise ValueError(f"(a;q)_inf requires |q| < 1, got |q| = {abs(q)}")
    if tol is None:
        tol = unit_roundoff(a, q) / 10
    kmin = _min_factors(q, tol)
    result = 1
    aq = a
    k = 0
    while True:
        result = result * (1 - aq)
        k += 1
        if result == 0:
            return result
        if k >= kmin and abs(aq) < tol:
            break
        if k >= max_factors:
            raise Nonconvergence(f"(a;q)_inf did not settle within {max_factors} factors")
        aq = aq * q
    return check_finite(result, "(a;q)_inf")


def omega_index(x, q, n: int | None = None, delta: float | None = None):
    """Return k if ``x`` equals (or is within the guard of) q^{-k}, 0 <= k < n.

    ``n=None`` scans the whole set Omega_q.  Returns ``None`` when ``x`` is
    clear of the set.  Exact input is compared exactly.
    """
    exact = all_exact(x, q)
    if not exact and delta is None:
        delta = OMEGA_DELTA
    aq = abs(q)
    if aq == 1:
        limit = n if n is not None else 0
    else:
        limit = n
    ax = abs(x)
    qk = 1  # q^{-k}
    qinv = inv(q)
    k = 0
    while (limit is None or k < limit) and k < 100_000:
        if exact:
            if x == qk:
                return k
        elif abs(x - qk) < delta * max(1.0, float(ax)):
            return k
        mag = abs(qk)
        if aq < 1 and mag > 2 * ax + 2:
            break
        if aq > 1 and mag < ax / 2 - 1e-300:
            break
        qk = qk * qinv
        k += 1
    return None


def qpoch_general(a, b, q):
    """(a;q)_b = (a;q)_inf / (a q^b;q)_inf for an arbitrary exponent b."""
    require_inexact(a, b, q, what="(a;q)_b")
    aqb = a * qpow(q, b)
    k = omega_index(aqb, q)
    if k is not None:
        raise OmegaQProximity(f"a*q^b = {aqb!r} lies at q^-{k}")
    return check_finite(qpoch_inf(a, q) / qpoch_inf(aqb, q), "(a;q)_b")


def qpoch_multi(args: Iterable, q, n=INF):
    """Product (a_1,...,a_k;q)_n over a parameter list.

    ``n`` may be a nonnegative integer, ``math.inf``/``None`` for the
    infinite product, or any other scalar for the general exponent.
    """
    result = 1
    for a in args:
        result = result * _qpoch_any(a, q, n)
    return result


def _qpoch_any(a, q, n):
    if n is None or n == INF:
        return qpoch_inf(a, q)
    if isinstance(n, Fraction) and n.denominator == 1:
        n = n.numerator
    if isinstance(n, int) and n >= 0:
        return qpoch(a, q, n)
    return qpoch_general(a, n, q)


def prod(values: Sequence | Iterable):
    result = 1
    for v in values:
        result = result * v
    return result


def to_mp(x):
    if is_exact(x):
        return mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x)
    return mpmath.mpmathify(x)


def from_mp(x):
    """Round an mpmath value (or a list of them) back to Python floats or complexes."""
    if isinstance(x, (list, tuple)):
        return type(x)(from_mp(v) for v in x)
    if isinstance(x, mpmath.mpc):
        return complex(x) if x.imag != 0 else float(x.real)
    return float(x)


def run_extended(func, digits: int, *args):
    """Call ``func`` on float arguments in mpmath at ``digits`` decimal digits.

    Arguments that are already mpmath values are passed through at the
    caller's precision.  Lists and tuples are converted element-wise.
    """
    if any(is_mp(a) or (isinstance(a, (list, tuple)) and any(is_mp(v) for v in a)) for a in args):
        return func(*args)

    def conv(a):
        if isinstance(a, (list, tuple)):
            return type(a)(to_mp(v) for v in a)
        if isinstance(a, int) and not isinstance(a, bool):
            return a
        return to_mp(a)

    with mpmath.workdps(max(int(digits), 20)):
        return from_mp(func(*(conv(a) for a in args)))


def as_scalar(text: str) -> Number:
    """Parse a user-supplied scalar: ``1/2`` -> Fraction, ``0.5`` -> float, ``1+2j`` -> complex."""
    text = text.strip()
    try:
        return Fraction(text) if "." not in text and "e" not in text.lower() else float(text)
    except ValueError:
        return complex(text.replace(" ", ""))
