"""Basic hypergeometric series with van de Bult--Rains zero bookkeeping.

A :class:`SeriesSpec` describes

    r+1 phi s ^m (a_1..a_{r+1}; b_1..b_s; q, z)

where ``m < 0`` stands for |m| extra zero numerator parameters and
``m > 0`` for m extra zero denominator parameters.  Zero parameters
contribute a factor 1 to every Pochhammer product, so the only effect of
``m`` is on the power of (-1)^k q^{C(k,2)} carried by the k-th term.  That
power is ``s - r + m`` and it also decides convergence: positive means
entire in z, zero means |z| < 1, negative means divergent unless the
series terminates.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Sequence

from .errors import (
    DenominatorHitsOmegaQ,
    DivergentSeries,
    Nonconvergence,
    UnitDiskViolation,
    UnsupportedInExactMode,
)
import math

import mpmath

from .qcore import all_exact, binom2, check_finite, from_mp, inv, ipow, is_mp, prod, qpoch, to_mp, unit_roundoff

#: relative tolerance for recognising a float numerator as q^{-n}
TERMINATING_RTOL = 1e-10
_MAX_DEGREE_SCAN = 100_000


@dataclass(frozen=True)
class SeriesSpec:
    numer: tuple
    denom: tuple
    q: object
    z: object
    m: int = 0

    def __post_init__(self):
        object.__setattr__(self, "numer", tuple(self.numer))
        object.__setattr__(self, "denom", tuple(self.denom))

    @property
    def r(self) -> int:
        """The r of r+1 phi s: one less than the number of numerator parameters."""
        return len(self.numer) - 1

    @property
    def s(self) -> int:
        return len(self.denom)

    @property
    def r_eff(self) -> int:
        return len(self.numer) + max(0, -self.m) - 1

    @property
    def s_eff(self) -> int:
        return len(self.denom) + max(0, self.m)

    @property
    def exponent(self) -> int:
        """Power of (-1)^k q^{C(k,2)} in the k-th term, equal to s - r + m."""
        return self.s - self.r + self.m

    def expanded(self) -> "SeriesSpec":
        """Same series with the zero parameters written out and m = 0."""
        p = abs(self.m)
        if self.m < 0:
            return SeriesSpec(self.numer + (0,) * p, self.denom, self.q, self.z, 0)
        return SeriesSpec(self.numer, self.denom + (0,) * p, self.q, self.z, 0)

    def with_(self, **changes) -> "SeriesSpec":
        return replace(self, **changes)

    def scalars(self) -> tuple:
        return self.numer + self.denom + (self.q, self.z)

    def __str__(self) -> str:
        sup = f"^{self.m}" if self.m else ""
        return (
            f"{len(self.numer)}phi{len(self.denom)}{sup}"
            f"({list(self.numer)}; {list(self.denom)}; q={self.q}, z={self.z})"
        )


def qhyp(numer: Sequence, denom: Sequence, q, z, m: int = 0) -> SeriesSpec:
    """Shorthand constructor for :class:`SeriesSpec`."""
    return SeriesSpec(tuple(numer), tuple(denom), q, z, m)


@dataclass(frozen=True)
class ConvergenceClass:
    tag: str  # "Entire" | "UnitDisk" | "DivergentUnlessTerminating" | "Terminating"
    n: int | None = None

    @property
    def terminating(self) -> bool:
        return self.tag == "Terminating"


@dataclass(frozen=True)
class TruncationPolicy:
    rel_tol: float = 1e-14
    max_terms: int = 200_000
    consecutive_small: int = 5

    def __post_init__(self):
        if self.max_terms > 10**6 or self.max_terms < 1:
            raise ValueError("max_terms must lie in [1, 10^6]")
        if self.consecutive_small < 1:
            raise ValueError("consecutive_small must be positive")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


DEFAULT_POLICY = TruncationPolicy()


def default_policy(*values) -> TruncationPolicy:
    """Default policy, tightened to the working precision for mpmath input."""
    if any(is_mp(v) for v in values):
        return TruncationPolicy(rel_tol=10 * unit_roundoff(*values))
    return DEFAULT_POLICY


@dataclass
class Diagnostics:
    terms_used: int
    last_term: float
    terminating: bool
    slow_convergence: bool = False
    notes: list = field(default_factory=list)


def terminating_degree(x, q) -> int | None:
    """Smallest n with x == q^{-n} (exactly, or to ``TERMINATING_RTOL`` in floats)."""
    exact = all_exact(x, q)
    if x == 0 or q == 0:
        return None
    aq = abs(q)
    if aq == 1:
        return 0 if x == 1 else None
    ax = abs(x)
    qinv = inv(q)
    target = 1
    for n in range(_MAX_DEGREE_SCAN):
        if exact:
            if x == target:
                return n
        elif abs(x - target) <= TERMINATING_RTOL * abs(target):
            return n
        mag = abs(target)
        if aq < 1 and mag > 2 * ax + 1:
            return None
        if aq > 1 and mag < ax / 2:
            return None
        target = target * qinv
    return None


def classify(spec: SeriesSpec) -> ConvergenceClass:
    degrees = [d for d in (terminating_degree(a, spec.q) for a in spec.numer) if d is not None]
    if degrees:
        return ConvergenceClass("Terminating", min(degrees))
    e = spec.exponent
    if e > 0:
        return ConvergenceClass("Entire")
    if e == 0:
        return ConvergenceClass("UnitDisk")
    return ConvergenceClass("DivergentUnlessTerminating")


def term(spec: SeriesSpec, k: int):
    """The k-th summand, computed directly from the defining formula."""
    q = spec.q
    num = prod(qpoch(a, q, k) for a in spec.numer)
    den = qpoch(q, q, k) * prod(qpoch(b, q, k) for b in spec.denom)
    if den == 0:
        raise DenominatorHitsOmegaQ(f"denominator of term {k} vanishes in {spec}")
    e = spec.exponent
    power = binom2(k) * e
    sign = -1 if (k * e) % 2 else 1
    qfac = ipow(q, power)
    return num * inv(den) * sign * qfac * spec.z**k


def iter_terms(spec: SeriesSpec) -> Iterator:
    """Yield successive summands using the term ratio (unbounded generator)."""
    q, z, e = spec.q, spec.z, spec.exponent
    numer = [a for a in spec.numer if a != 0]
    denom = [b for b in spec.denom if b != 0]
    eps = unit_roundoff(*spec.scalars())
    exact = all_exact(*spec.scalars())
    t = 1
    qk = 1  # q^k
    k = 0
    while True:
        yield t
        num = 1
        for a in numer:
            num = num * (1 - a * qk)
        den = 1 - qk * q
        for b in denom:
            f = 1 - b * qk
            if f == 0 or (not exact and abs(f) <= 4 * eps):
                raise DenominatorHitsOmegaQ(
                    f"denominator parameter {b!r} hits q^-{k} in {spec}"
                )
            den = den * f
        if den == 0:
            raise DenominatorHitsOmegaQ(f"(q;q)_{k + 1} vanishes for q = {q!r}")
        ratio = num / den * z
        if e > 0:
            ratio = ratio * (-qk) ** e
        elif e < 0:
            ratio = ratio / (-qk) ** (-e)
        t = t * ratio
        qk = qk * q
        k += 1


def terms(spec: SeriesSpec, count: int) -> list:
    out = []
    for t in iter_terms(spec):
        if len(out) == count:
            break
        out.append(t)
    return out


def evaluate(spec: SeriesSpec, policy: TruncationPolicy | None = None):
    """Sum the series; returns ``(value, Diagnostics)``."""
    cls = classify(spec)
    if cls.terminating:
        total = 0
        n = cls.n
        last = 1
        for k, t in enumerate(iter_terms(spec)):
            total = total + t
            last = t
            if k == n:
                break
        check_finite(total, f"sum of {spec}")
        return total, Diagnostics(n + 1, abs(last), True)

    if all_exact(*spec.scalars()):
        raise UnsupportedInExactMode(f"nonterminating series needs float input: {spec}")
    if cls.tag == "DivergentUnlessTerminating":
        raise DivergentSeries(f"s - r + m = {spec.exponent} < 0 and no q^-n numerator: {spec}")
    diag = Diagnostics(0, 0.0, False)
    if cls.tag == "UnitDisk":
        az = abs(spec.z)
        if az >= 1:
            raise UnitDiskViolation(f"|z| = {float(az)} >= 1 for {spec}")
        if az > 0.9:
            diag.slow_convergence = True
            diag.notes.append("SlowConvergence")

    policy = policy or default_policy(*spec.scalars())
    total = 0
    magnitude = 0.0
    small = 0
    for k, t in enumerate(iter_terms(spec)):
        total = total + t
        magnitude += abs(t)
        if abs(t) <= policy.rel_tol * abs(total):
            small += 1
            if small >= policy.consecutive_small:
                diag.terms_used = k + 1
                diag.last_term = abs(t)
                check_finite(total, f"sum of {spec}")
                return _resum_if_cancelled(spec, policy, total, magnitude, diag)
        else:
            small = 0
        if k + 1 >= policy.max_terms:
            raise Nonconvergence(f"no convergence within {policy.max_terms} terms: {spec}")


CANCELLATION_LIMIT = 1e3


def _resum_if_cancelled(spec: SeriesSpec, policy: TruncationPolicy, total, magnitude, diag):
    """Redo a float sum in mpmath when the terms cancel by more than three digits.

    Each float term carries a rounding error of order eps times its size, so
    the sum loses log10(sum |t| / |sum t|) digits.  Summing again with that
    many extra digits restores full float accuracy.
    """
    if any(is_mp(v) for v in spec.scalars()) or total == 0 or magnitude <= CANCELLATION_LIMIT * abs(total):
        return total, diag
    lost = int(math.log10(magnitude / abs(total))) + 1
    with mpmath.workdps(16 + lost + 10):
        mp_spec = SeriesSpec([to_mp(a) for a in spec.numer], [to_mp(b) for b in spec.denom],
                             to_mp(spec.q), to_mp(spec.z), spec.m)
        value, _ = evaluate(mp_spec, TruncationPolicy(max_terms=policy.max_terms, rel_tol=policy.rel_tol,
                                                      consecutive_small=policy.consecutive_small))
        value = from_mp(value)
    diag.notes.append(f"ResummedExtended({lost} digits)")
    return value, diag


def phi(numer: Sequence, denom: Sequence, q, z, m: int = 0, policy: TruncationPolicy | None = None):
    """Value of r+1 phi s ^m (numer; denom; q, z)."""
    return evaluate(qhyp(numer, denom, q, z, m), policy)[0]


def value(spec: SeriesSpec, policy: TruncationPolicy | None = None):
    return evaluate(spec, policy)[0]


# -- limit transitions -------------------------------------------------------

def limit_confluence(spec: SeriesSpec, which: str, lam) -> SeriesSpec:
    """Deform ``spec`` by ``lam`` so that it tends to :func:`confluent_limit` as lam -> inf.

    ``which`` selects the transition: ``numer_scale`` scales the last
    numerator and divides z, ``denom_scale`` scales the last denominator and
    multiplies z, ``ratio_scale`` scales both and keeps z.
    """
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    numer, denom = list(spec.numer), list(spec.denom)
    if which == "numer_scale":
        numer[-1] = lam * numer[-1]
        return spec.with_(numer=tuple(numer), z=spec.z / lam)
    if which == "denom_scale":
        denom[-1] = lam * denom[-1]
        return spec.with_(denom=tuple(denom), z=spec.z * lam)
    if which == "ratio_scale":
        numer[-1] = lam * numer[-1]
        denom[-1] = lam * denom[-1]
        return spec.with_(numer=tuple(numer), denom=tuple(denom))
    raise ValueError(f"unknown limit transition {which!r}")


def confluent_limit(spec: SeriesSpec, which: str) -> SeriesSpec:
    """The lam -> inf limit of :func:`limit_confluence` as a series with one parameter fewer."""
    if which == "numer_scale":
        return spec.with_(numer=spec.numer[:-1], z=spec.numer[-1] * spec.z)
    if which == "denom_scale":
        return spec.with_(denom=spec.denom[:-1], z=spec.z / spec.denom[-1])
    if which == "ratio_scale":
        return spec.with_(
            numer=spec.numer[:-1], denom=spec.denom[:-1], z=spec.numer[-1] / spec.denom[-1] * spec.z
        )
    raise ValueError(f"unknown limit transition {which!r}")


# -- structural predicates ---------------------------------------------------

def _close(x, y) -> bool:
    if all_exact(x, y):
        return x == y
    return abs(x - y) <= 1e-12 * max(abs(x), abs(y), 1e-300)


def is_balanced(spec: SeriesSpec, ell: int = 1) -> bool:
    """q^ell a_1...a_r == b_1...b_s over the written-out parameter lists."""
    full = spec.expanded()
    return _close(spec.q**ell * prod(full.numer), prod(full.denom))


def is_well_poised(spec: SeriesSpec) -> bool:
    a, b = spec.expanded().numer, spec.expanded().denom
    if len(a) != len(b) + 1 or not a:
        return False
    target = spec.q * a[0]
    return all(_close(b[i] * a[i + 1], target) for i in range(len(b)))


def is_very_well_poised(spec: SeriesSpec) -> bool:
    if not is_well_poised(spec) or len(spec.numer) < 3:
        return False
    from .qcore import qpow

    root = spec.q * qpow(spec.numer[0], 0.5)
    pair = sorted([spec.numer[1], spec.numer[2]], key=lambda v: (complex(v).real, complex(v).imag))
    want = sorted([root, -root], key=lambda v: (complex(v).real, complex(v).imag))
    return all(_close(x, y) for x, y in zip(pair, want))
