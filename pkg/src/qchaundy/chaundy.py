"""Products of two basic hypergeometric series as sums over terminating series.

The product

    r+1 phi u ^p (a; b; q, X) * s+1 phi v ^l (c; d; q, Y)

is re-summed along the anti-diagonals n + k = const of the double series.
Each anti-diagonal is a terminating series of degree n, which gives two
expansions, one for each order of the factors:

``qCh1``: outer term (a;q)_n X^n / (q, b;q)_n ((-1)^n q^C(n,2))^(u-r+p) times
  phi^(u-r+p+l)(q^-n, c, q^(1-n)/b; d, q^(1-n)/a; q,
  q^(1+p(1-n)) prod(b) Y / (prod(a) X))

``qCh2``: the same with the two factors (and X, Y) interchanged.

Because the re-summation only re-brackets the double sum, truncating an
expansion after N outer terms gives exactly the triangle n + k <= N of
the double series (see :func:`brute_product`).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import phi
from .errors import DivergentFactor, Nonconvergence, ZeroParameter
from .qcore import binom2, inv, ipow, prod, qpoch, qpoch_multi, unit_roundoff
from .transforms import TerminatingSeries, Transformed, guarded_evaluate, transform_lemma13

VARIANTS = ("qCh1", "qCh2")


@dataclass(frozen=True)
class ChaundyInput:
    """Two series sharing the base q: left = (a; b; p; X), right = (c; d; l; Y)."""

    a: tuple
    b: tuple
    p: int
    c: tuple
    d: tuple
    ell: int
    X: object
    Y: object
    q: object

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for x in self.a + self.b + self.c + self.d:
            if x == 0:
                raise ZeroParameter("product parameters must be nonzero; use the superscript for zeros")
        if self.left_exponent < 0 or self.right_exponent < 0:
            raise DivergentFactor(
                f"factor exponents {self.left_exponent}, {self.right_exponent} must be nonnegative"
            )

    @classmethod
    def from_specs(cls, left: phi.SeriesSpec, right: phi.SeriesSpec) -> "ChaundyInput":
        if left.q != right.q:
            raise ValueError("both factors must share the base q")
        return cls(left.numer, left.denom, left.m, right.numer, right.denom, right.m, left.z, right.z, left.q)

    @property
    def left(self) -> phi.SeriesSpec:
        return phi.SeriesSpec(self.a, self.b, self.q, self.X, self.p)

    @property
    def right(self) -> phi.SeriesSpec:
        return phi.SeriesSpec(self.c, self.d, self.q, self.Y, self.ell)

    @property
    def left_exponent(self) -> int:
        """u - r + p, the power of (-1)^n q^C(n,2) in the left factor."""
        return len(self.b) - len(self.a) + 1 + self.p

    @property
    def right_exponent(self) -> int:
        return len(self.d) - len(self.c) + 1 + self.ell

    def swapped(self) -> "ChaundyInput":
        return ChaundyInput(self.c, self.d, self.ell, self.a, self.b, self.p, self.Y, self.X, self.q)


@dataclass(frozen=True)
class ChaundyExpansion:
    source: ChaundyInput
    variant: str

    @property
    def _oriented(self) -> ChaundyInput:
        return self.source if self.variant == "qCh1" else self.source.swapped()

    def outer(self, n: int):
        """Coefficient of the n-th terminating series."""
        s = self._oriented
        q = s.q
        e = s.left_exponent
        sign = (-1) ** (n * e) * ipow(q, binom2(n) * e)
        return qpoch_multi(s.a, q, n) * inv(qpoch(q, q, n) * qpoch_multi(s.b, q, n)) * s.X**n * sign

    def inner(self, n: int) -> TerminatingSeries:
        """The n-th terminating series (degree n, leading numerator q^-n)."""
        s = self._oriented
        q = s.q
        if s.X == 0:
            raise ZeroParameter("the inner argument divides by X; use partial_sum for X = 0")
        qn = ipow(q, 1 - n)
        arg = ipow(q, 1 + s.p * (1 - n)) * prod(s.b) * s.Y * inv(prod(s.a) * s.X)
        return TerminatingSeries(
            n,
            s.c + tuple(qn * inv(b) for b in s.b),
            s.d + tuple(qn * inv(a) for a in s.a),
            q,
            arg,
            s.left_exponent + s.ell,
        )

    def term(self, n: int):
        s = self._oriented
        if s.X == 0:
            # Only the k = n corner of each anti-diagonal survives: the other factor's n-th term.
            return phi.term(s.right, n)
        # the inner series alone can overflow a float for large n (its parameters grow
        # like q^(1-n)) while the outer coefficient underflows; the guard handles both
        return guarded_evaluate(lambda conv: self._converted(conv)._piece(n))

    def _piece(self, n: int) -> Transformed:
        return Transformed(self.outer(n), self.inner(n))

    def _converted(self, conv) -> "ChaundyExpansion":
        s = self.source
        src = ChaundyInput(
            tuple(conv(x) for x in s.a), tuple(conv(x) for x in s.b), s.p,
            tuple(conv(x) for x in s.c), tuple(conv(x) for x in s.d), s.ell,
            conv(s.X), conv(s.Y), conv(s.q),
        )
        return ChaundyExpansion(src, self.variant)

    def partial_sum(self, N: int):
        total = 0
        for n in range(N + 1):
            total = total + self.term(n)
        return total

    def value(self, rel_tol: float | None = None, max_terms: int = 2000, consecutive_small: int = 5):
        """Sum outer terms until ``consecutive_small`` successive terms are below rel_tol."""
        if rel_tol is None:
            rel_tol = 10 * unit_roundoff(self.source.X, self.source.Y, self.source.q)
        total = 0
        small = 0
        for n in range(max_terms):
            t = self.term(n)
            total = total + t
            small = small + 1 if abs(t) <= rel_tol * abs(total) else 0
            if small >= consecutive_small:
                return total
        raise Nonconvergence(f"expansion did not settle within {max_terms} outer terms")


def expand(source: ChaundyInput, variant: str = "qCh1") -> ChaundyExpansion:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    return ChaundyExpansion(source, variant)


def brute_product(source: ChaundyInput, N: int):
    """Sum of left_n * right_k over the triangle n + k <= N."""
    left = phi.terms(source.left, N + 1)
    right = phi.terms(source.right, N + 1)
    total = 0
    for n in range(N + 1):
        diag = 0
        for k in range(n + 1):
            diag = diag + left[n - k] * right[k]
        total = total + diag
    return total


def product_value(source: ChaundyInput):
    """The product of the two factors, each summed independently."""
    return phi.value(source.left) * phi.value(source.right)


def verify_symmetry(source: ChaundyInput, N: int):
    """Relative gap between the two expansions truncated on the same triangle."""
    one = expand(source, "qCh1").partial_sum(N)
    two = expand(source, "qCh2").partial_sum(N)
    if one == two:
        return 0
    return abs(one - two) / max(abs(one), abs(two))


def inner_series_are_reversals(source: ChaundyInput, n: int) -> bool:
    """True when reversing the n-th qCh1 series yields the n-th qCh2 series.

    Parameters are compared as multisets; arguments are compared exactly
    for exact input and to 1e-12 otherwise.
    """
    one = expand(source, "qCh1").inner(n)
    two = expand(source, "qCh2").inner(n)
    rev = transform_lemma13(one).series
    return (
        rev.n == two.n
        and rev.p == two.p
        and _same_multiset(rev.a, two.a)
        and _same_multiset(rev.b, two.b)
        and _close(rev.z, two.z)
    )


def _close(x, y) -> bool:
    if x == y:
        return True
    return abs(x - y) <= 1e-12 * max(abs(x), abs(y))


def _same_multiset(xs: Sequence, ys: Sequence) -> bool:
    if len(xs) != len(ys):
        return False
    pool = list(ys)
    for x in xs:
        for i, y in enumerate(pool):
            if _close(x, y):
                del pool[i]
                break
        else:
            return False
    return True
