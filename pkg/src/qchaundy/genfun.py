"""Registry of generating functions and the randomized verification harness.

Each identity reads

    sum_n t^n h_n p_n(x)  ==  right-hand side

where p_n is one of the polynomial families of :mod:`qchaundy.polys`.
The right-hand side is either a :class:`ClosedForm` (infinite products
times nonterminating series) or a :class:`DiagonalForm` (a sum over n of
a coefficient times a terminating series, as produced by the product
expansions of :mod:`qchaundy.chaundy`).

Metadata (anchors, parameter names, sampling domains, specializations)
lives in ``data/identities.json``; the formulas live here, keyed by the
identity id.  Verification runs in mpmath at ``WORK_DPS`` digits so that
large q-power weights and cancellation inside the polynomials do not
limit the attainable tolerance.
"""
from __future__ import annotations

import fnmatch
import json
import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from importlib import resources
from types import SimpleNamespace
from typing import Callable

import mpmath
import numpy as np

from . import phi, polys
from .chaundy import ChaundyInput, expand
from .errors import DomainError, QSeriesError
from .qcore import binom2, ipow, qpoch, qpoch_multi, qpow, to_mp

WORK_DPS = 40
LHS_MAX_TERMS = 400
RHS_MAX_TERMS = 400
CONSECUTIVE_SMALL = 5
LIMIT_EPS = 1e-8
LIMIT_TOL = 1e-6
SCHEMA_VERSION = 1


# -- right-hand side building blocks -----------------------------------------

@dataclass
class ClosedForm:
    """scale * (num;base)_inf / (den;base)_inf * product of series values."""

    base: object
    num: list
    den: list
    series: list = field(default_factory=list)
    scale: object = 1

    def value(self):
        v = self.scale * qpoch_multi(self.num, self.base, None) / qpoch_multi(self.den, self.base, None)
        for s in self.series:
            v = v * phi.value(s)
        return v

    def mutated(self) -> "ClosedForm":
        """Copy with one factor removed: first numerator product, else first
        denominator product, else the first numerator of the first series."""
        if self.num:
            return ClosedForm(self.base, self.num[1:], self.den, self.series, self.scale)
        if self.den:
            return ClosedForm(self.base, self.num, self.den[1:], self.series, self.scale)
        s0 = self.series[0]
        return ClosedForm(self.base, [], [], [s0.with_(numer=s0.numer[1:])] + self.series[1:], self.scale)


@dataclass
class Outer:
    """(num;base)_n / (den;base)_n * mono, the coefficient of one terminating series."""

    base: object
    num: list
    den: list
    mono: object

    def value(self, n: int, mutate: bool = False):
        num, den = self.num, self.den
        if mutate:
            num, den = (num[1:], den) if num else (num, den[1:])
        return qpoch_multi(num, self.base, n) / qpoch_multi(den, self.base, n) * self.mono


@dataclass
class DiagonalForm:
    """sum_n outer(n) * inner(n) with inner(n) a terminating series."""

    outer: Callable[[int], Outer]
    inner: Callable[[int], phi.SeriesSpec]
    mutate: bool = False

    def term(self, n: int):
        return self.outer(n).value(n, self.mutate) * phi.value(self.inner(n))

    def value(self, rel_tol: float):
        total = 0
        small = 0
        for n in range(RHS_MAX_TERMS):
            t = self.term(n)
            total = total + t
            small = small + 1 if abs(t) <= rel_tol * abs(total) else 0
            if small >= CONSECUTIVE_SMALL:
                return total, n + 1
        raise QSeriesError(f"diagonal expansion did not settle in {RHS_MAX_TERMS} terms")

    def mutated(self) -> "DiagonalForm":
        return DiagonalForm(self.outer, self.inner, True)


def _S(numer, denom, q, z, m=0):
    return phi.SeriesSpec(tuple(numer), tuple(denom), q, z, m)


def _P(args, base, n):
    return qpoch_multi(args, base, n)


def _half(c):
    """Base q^(1/2) and q^(1/4) for the identities written in base q^(1/2)."""
    return qpow(c.q, 0.5), qpow(c.q, 0.25)


# -- coefficients h_n of the left-hand sides ---------------------------------

def _coef(key: str, c, n: int):
    q, C = c.q, binom2(n)
    qn = qpoch(q, q, n)
    if key == "AWgf":
        return 1 / _P([q, c.a * c.b, c.c * c.d], q, n)
    if key == "sub1":
        return 1 / _P([q, c.a * c.b], q, n)
    if key == "cdqHgf":
        return ipow(q, C) / _P([q, c.a * c.b, c.a * c.c], q, n)
    if key == "ATAT":
        return 1 / _P([q, c.t * c.a * c.b * c.c], q, n)
    if key == "cdqinHgf-1":
        return ipow(q, 2 * C) / _P([q, 1 / (c.a * c.b), 1 / (c.a * c.c)], q, n)
    if key == "cfqiT2":
        return ipow(q, 2 * C) / _P([q, 1 / (c.a * c.b)], q, n)
    if key == "G_gamma":
        return qpoch(c.g, q, n) * ipow(q, 2 * C) / _P([q, 1 / (c.a * c.b), 1 / (c.a * c.c)], q, n)
    if key == "gf33x":
        return ipow(q, 2 * C) / _P([1 / (c.a * c.b), 1 / (c.a * c.c)], q, n)
    if key == "ASCgf1":
        return 1 / qn
    if key == "ASCgf2":
        return 1 / _P([q, c.a * c.b], q, n)
    if key == "ASCgf3":
        return ipow(q, C) / _P([q, c.a * c.b], q, n)
    if key == "L_gamma":
        return qpoch(c.g, q, n) / _P([q, c.a * c.b], q, n)
    if key == "cdqinHgf-2":
        return ipow(q, 2 * C) / _P([q, 1 / (c.a * c.b)], q, n)
    if key == "qiASCgf-prod":
        return ipow(q, C) / qn
    if key == "qiASCgf-ta":
        return ipow(q, C) / _P([q, 1 / (c.a * c.b)], q, n)
    if key == "H_gamma":
        return qpoch(c.g, q, n) * ipow(q, C) / _P([q, 1 / (c.a * c.b)], q, n)
    if key in ("cbqHgf1", "cqHgf"):
        return 1 / qn
    if key in ("cbqHgf3", "cbqinHegf-2", "J", "prodgfcqiH"):
        return ipow(q, C) / qn
    if key in ("M_gamma", "K"):
        return qpoch(c.g, q, n) / qn
    if key in ("O", "N"):
        return qpow(q, n * n / 4) / qn
    raise KeyError(key)


# -- right-hand sides --------------------------------------------------------

def _rhs(key: str, c):
    q, z, t = c.q, c.z, c.t
    zi = 1 / z
    if key == "AWgf":
        a, b, cc, d = c.a, c.b, c.c, c.d
        return ClosedForm(q, [], [], [
            _S([a * z, b * z], [a * b], q, t * zi),
            _S([cc * zi, d * zi], [cc * d], q, t * z),
        ])
    if key == "sub1":
        return ClosedForm(q, [c.c * t], [t * z], [_S([c.a * z, c.b * z], [c.a * c.b], q, t * zi)])
    if key == "cdqHgf":
        a = c.a
        return ClosedForm(q, [-t / a], [], [_S([a * z, a * zi], [a * c.b, a * c.c], q, -t / a, -1)])
    if key == "ATAT":
        a, b, cc = c.a, c.b, c.c
        return ClosedForm(q, [t * a, t * b, t * cc], [t * a * b * cc, t * z, t * zi])
    if key == "ATAT-exp1":
        a, b, cc = c.a, c.b, c.c
        return DiagonalForm(
            lambda n: Outer(q, [a * cc, b * cc], [q, a * b * cc * t], (t / cc) ** n),
            lambda n: _S(
                [q ** -n, z * cc, z / cc, q ** (1 - n) / (a * b * cc * t)],
                [t * z, q ** (1 - n) / (a * cc), q ** (1 - n) / (b * cc)],
                q, q * t / z,
            ),
        )
    if key == "ATAT-exp2":
        a, b, cc = c.a, c.b, c.c
        return DiagonalForm(
            lambda n: Outer(q, [z * cc, z / cc], [q, t * z], (t / z) ** n),
            lambda n: _S(
                [q ** -n, a * cc, b * cc, q ** (1 - n) / (t * z)],
                [a * b * cc * t, q ** (1 - n) / (z * cc), q ** (1 - n) * cc / z],
                q, q * t / cc,
            ),
        )
    if key == "cdqinHgf-1":
        a, b, cc = c.a, c.b, c.c
        return ClosedForm(q, [], [a * b * cc * t], [_S([z / a, zi / a], [1 / (a * b), 1 / (a * cc)], q, a * t)])
    if key == "cfqiT2:1":
        a, b, cc = c.a, c.b, c.c
        return ClosedForm(q, [b * t], [a * b * cc * t], [_S([z / a, zi / a], [1 / (a * b), b * t], q, a * t)])
    if key == "cfqiT2:2":
        a, b, cc = c.a, c.b, c.c
        return ClosedForm(q, [t * a * b / z], [a * b * cc * t], [_S([z / a, z / b], [1 / (a * b)], q, t * a * b / z)])
    if key in ("G_gamma", "gf33x"):
        a, b, cc = c.a, c.b, c.c
        g = c.g if key == "G_gamma" else q
        s = g * a * b * cc * t
        return ClosedForm(q, [s], [a * b * cc * t], [_S([g, z / a, zi / a], [1 / (a * b), 1 / (a * cc), s], q, a * t)])
    if key == "G-exp1":
        a, b, cc, g = c.a, c.b, c.c, c.g
        return DiagonalForm(
            lambda n: Outer(q, [g], [q], (a * b * cc * t) ** n),
            lambda n: _S(
                [q ** -n, g, z / a, zi / a],
                [1 / (a * b), 1 / (a * cc), g * a * b * cc * t, q ** (1 - n) / g],
                q, q / (g * b * cc),
            ),
        )
    if key == "G-exp2":
        a, b, cc, g = c.a, c.b, c.c, c.g
        return DiagonalForm(
            lambda n: Outer(
                q, [g, z / a, zi / a], [q, 1 / (a * b), 1 / (a * cc), g * a * b * cc * t],
                (-a * t) ** n * ipow(q, binom2(n)),
            ),
            lambda n: _S(
                [q ** -n, g, q ** (1 - n) * a * b, q ** (1 - n) * a * cc, q ** (1 - n) / (g * a * b * cc * t)],
                [q ** (1 - n) / g, q ** (1 - n) * a * z, q ** (1 - n) * a * zi],
                q, q * a * b * cc * t, 1,
            ),
        )
    if key == "ASCgf1":
        return ClosedForm(q, [c.a * t, c.b * t], [t * z, t * zi])
    if key == "ASCgf2":
        return ClosedForm(q, [], [t * z], [_S([c.a * z, c.b * z], [c.a * c.b], q, t * zi)])
    if key == "ASCgf3":
        a = c.a
        return ClosedForm(q, [-t / a], [], [_S([a * z, a * zi], [a * c.b], q, -t / a)])
    if key == "L_gamma":
        a, b, g = c.a, c.b, c.g
        return ClosedForm(q, [g * t * z], [t * z], [_S([g, a * z, b * z], [a * b, g * t * z], q, t * zi)])
    if key == "L-exp1":
        a, b, g = c.a, c.b, c.g
        return DiagonalForm(
            lambda n: Outer(q, [g], [q], (t * z) ** n),
            lambda n: _S([q ** -n, g, a * z, b * z], [a * b, g * t * z, q ** (1 - n) / g], q, q / (g * z * z)),
        )
    if key == "L-exp2":
        a, b, g = c.a, c.b, c.g
        return DiagonalForm(
            lambda n: Outer(q, [g, a * z, b * z], [q, a * b, g * t * z], (t * zi) ** n),
            lambda n: _S(
                [q ** -n, g, q ** (1 - n) / (a * b), q ** (1 - n) / (g * t * z)],
                [q ** (1 - n) / g, q ** (1 - n) / (a * z), q ** (1 - n) / (b * z)],
                q, q * t * z,
            ),
        )
    if key == "cdqinHgf-2":
        a, b = c.a, c.b
        return ClosedForm(q, [t * a * b / z], [], [_S([z / a, z / b], [1 / (a * b)], q, t * a * b / z)])
    if key == "qiASCgf-prod":
        return ClosedForm(q, [-t * z, -t * zi], [-t * c.a, -t * c.b])
    if key == "qiASCgf-ta":
        a, b = c.a, c.b
        return ClosedForm(q, [], [-b * t], [_S([z / a, zi / a], [1 / (a * b)], q, -t * a)])
    if key == "H_gamma":
        a, b, g = c.a, c.b, c.g
        return ClosedForm(q, [-g * b * t], [-b * t], [_S([g, z / a, zi / a], [1 / (a * b), -g * b * t], q, -a * t)])
    if key == "H-exp1":
        a, b, g = c.a, c.b, c.g
        return DiagonalForm(
            lambda n: Outer(q, [g], [q], (-b * t) ** n),
            lambda n: _S(
                [q ** -n, g, z / a, zi / a], [1 / (a * b), -g * b * t, q ** (1 - n) / g], q, q * a / (g * b)
            ),
        )
    if key == "H-exp2":
        a, b, g = c.a, c.b, c.g
        return DiagonalForm(
            lambda n: Outer(q, [g, z / a, zi / a], [q, 1 / (a * b), -g * b * t], (-a * t) ** n),
            lambda n: _S(
                [q ** -n, g, q ** (1 - n) * a * b, -(q ** (1 - n)) / (g * b * t)],
                [q ** (1 - n) / g, q ** (1 - n) * a * z, q ** (1 - n) * a * zi],
                q, -q * b * t,
            ),
        )
    if key == "cbqHgf1":
        return ClosedForm(q, [c.a * t], [t * z, t * zi])
    if key == "cbqHgf3":
        a = c.a
        return ClosedForm(q, [-t / a], [], [_S([a * z, a * zi], [], q, -t / a, 1)])
    if key == "M_gamma":
        a, g = c.a, c.g
        return ClosedForm(q, [g * t * z], [t * z], [_S([g, a * z], [g * t * z], q, t * zi)])
    if key == "M-exp1":
        a, g = c.a, c.g
        return DiagonalForm(
            lambda n: Outer(q, [g], [q], (t * z) ** n),
            lambda n: _S([q ** -n, g, a * z], [g * t * z, q ** (1 - n) / g], q, q / (g * z * z)),
        )
    if key == "M-exp2":
        a, g = c.a, c.g
        return DiagonalForm(
            lambda n: Outer(q, [g, a * z], [q, g * t * z], (t * zi) ** n),
            lambda n: _S(
                [q ** -n, g, q ** (1 - n) / (g * t * z)],
                [q ** (1 - n) / g, q ** (1 - n) / (a * z)],
                q, q * t * z * z / a,
            ),
        )
    if key == "cbqinHegf-2":
        return ClosedForm(q, [-t * z, -t * zi], [-t * c.a])
    if key == "cqHgf":
        return ClosedForm(q, [], [t * z, t * zi])
    if key == "J":
        return ClosedForm(q, [-t * z], [], [_S([], [-t * z], q, -t * zi, -1)])
    if key == "J-exp1":
        return DiagonalForm(
            lambda n: Outer(q, [], [q], ipow(q, binom2(n)) * (t * z) ** n),
            lambda n: _S([q ** -n], [-t * z], q, q / (z * z)),
        )
    if key == "J-exp2":
        return DiagonalForm(
            lambda n: Outer(q, [], [q, -t * z], ipow(q, binom2(n)) * (t * zi) ** n),
            lambda n: _S([q ** -n, -(q ** (1 - n)) / (t * z)], [], q, -(q**n) * t * z**3, 1),
        )
    if key == "K":
        g = c.g
        return ClosedForm(q, [g * t * z], [t * z], [_S([g], [g * t * z], q, t * zi, -1)])
    if key == "K-exp1":
        g = c.g
        return DiagonalForm(
            lambda n: Outer(q, [g], [q], (t * z) ** n),
            lambda n: _S([q ** -n, g], [g * t * z, q ** (1 - n) / g], q, q / (g * z * z), -1),
        )
    if key == "K-exp2":
        g = c.g
        return DiagonalForm(
            lambda n: Outer(q, [g], [q, g * t * z], (t * zi) ** n),
            lambda n: _S([q ** -n, g, q ** (1 - n) / (g * t * z)], [q ** (1 - n) / g], q, q**n * t * z**3),
        )
    if key == "K-exp2-as-printed":
        g = c.g
        return DiagonalForm(
            lambda n: Outer(q, [g], [q, g * t * z], (t * zi) ** n),
            lambda n: _S([q ** -n, g, -(q ** (1 - n)) / (g * t * z)], [q ** (1 - n) / g], q, q**n * t * z**3),
        )
    if key in ("O", "N"):
        h, f = _half(c)
        s = _S([f * z, f * zi], [-h], h, -t)
        if key == "O":
            return ClosedForm(h, [-t], [], [s])
        return ClosedForm(h, [], [t], [s])
    if key in ("O-exp1", "N-exp1"):
        h, f = _half(c)
        if key == "O-exp1":
            return DiagonalForm(
                lambda n: Outer(h, [], [h], ipow(h, binom2(n)) * t**n),
                lambda n: _S([h ** -n, f * z, f * zi], [-h], h, h, 1),
            )
        return DiagonalForm(
            lambda n: Outer(h, [], [h], t**n),
            lambda n: _S([h ** -n, f * z, f * zi], [-h], h, -(h**n)),
        )
    if key in ("O-exp2", "N-exp2"):
        h, f = _half(c)
        m = 0 if key == "O-exp2" else -1
        arg = -h if key == "O-exp2" else h
        return DiagonalForm(
            lambda n: Outer(h, [f * z, f * zi], [h, -h], (-t) ** n),
            lambda n: _S([h ** -n, -(h ** -n)], [h ** (1 - n) / (f * z), h ** (1 - n) * z / f], h, arg, m),
        )
    if key == "prodgfcqiH":
        return ClosedForm(q, [-t * z, -t * zi], [])
    raise KeyError(key)


def _chaundy_source(key: str, c) -> ChaundyInput:
    """The product whose two re-summations give the expansions of ``key``."""
    q, z, t = c.q, c.z, c.t
    zi = 1 / z
    if key == "ATAT":
        a, b, cc = c.a, c.b, c.c
        return ChaundyInput([a * cc, b * cc], [a * b * cc * t], 0, [z * cc, z / cc], [t * z], 0, t / cc, t / z, q)
    if key == "G_gamma":
        a, b, cc, g = c.a, c.b, c.c, c.g
        return ChaundyInput(
            [g], [], 0, [g, z / a, zi / a], [1 / (a * b), 1 / (a * cc), g * a * b * cc * t], 0, a * b * cc * t, a * t, q
        )
    if key == "L_gamma":
        a, b, g = c.a, c.b, c.g
        return ChaundyInput([g], [], 0, [g, a * z, b * z], [a * b, g * t * z], 0, t * z, t * zi, q)
    if key == "H_gamma":
        a, b, g = c.a, c.b, c.g
        return ChaundyInput([g], [], 0, [g, z / a, zi / a], [1 / (a * b), -g * b * t], 0, -b * t, -a * t, q)
    if key == "M_gamma":
        return ChaundyInput([c.g], [], 0, [c.g, c.a * z], [c.g * t * z], 0, t * z, t * zi, q)
    if key == "J":
        return ChaundyInput([], [], 0, [], [-t * z], -1, -t * z, -t * zi, q)
    if key == "K":
        return ChaundyInput([c.g], [], 0, [c.g], [c.g * t * z], -1, t * z, t * zi, q)
    if key in ("O", "N"):
        h, f = _half(c)
        p, X = (0, -t) if key == "O" else (-1, t)
        return ChaundyInput([], [], p, [f * z, f * zi], [-h], 0, X, -t, h)
    raise KeyError(key)


# -- registry ----------------------------------------------------------------

@dataclass(frozen=True)
class Identity:
    id: str
    anchor: str
    family: str
    inverse: bool
    params: tuple
    rep: str | None
    coef: str
    rhs: str
    domain: tuple
    real_q: bool = False
    tol_class: str = "standard"
    expansion_of: str | None = None
    variant: str | None = None
    aliases: tuple = ()
    note: str = ""

    @property
    def poly_params(self) -> tuple:
        return tuple(p for p in self.params if p != "g")

    @property
    def default_tol(self) -> float:
        return 1e-9 if self.tol_class == "fractional" else 1e-10


@dataclass(frozen=True)
class Specialization:
    parent: str
    child: str
    param: str
    value: str  # "eps" for a limit, else an expression key from _SPECIAL_VALUES

    @property
    def is_limit(self) -> bool:
        return self.value == "eps"

    @property
    def label(self) -> str:
        arrow = f"{self.param}->0" if self.is_limit else f"{self.param}={self.value}"
        return f"{self.parent} [{arrow}] {self.child}"


_SPECIAL_VALUES = {
    "q": lambda c: c.q,
    "1/(a*c)": lambda c: 1 / (c.a * c.c),
    "1/(a*b)": lambda c: 1 / (c.a * c.b),
    "a*b": lambda c: c.a * c.b,
}


def _catalog() -> dict:
    text = resources.files("qchaundy").joinpath("data/identities.json").read_text()
    return json.loads(text)


def load_registry() -> tuple[dict, list]:
    data = _catalog()
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ValueError("unsupported identity catalog schema version")
    reg = {}
    for rec in data["identities"]:
        ident = Identity(
            id=rec["id"],
            anchor=rec["anchor"],
            family=rec["family"],
            inverse=rec["inverse"],
            params=tuple(rec["params"]),
            rep=rec.get("rep"),
            coef=rec["coef"],
            rhs=rec["rhs"],
            domain=tuple(tuple(sorted(d.items())) for d in rec["domain"]),
            real_q=rec.get("real_q", False),
            tol_class=rec.get("tol_class", "standard"),
            expansion_of=rec.get("expansion_of"),
            variant=rec.get("variant"),
            aliases=tuple(rec.get("aliases", ())),
            note=rec.get("note", ""),
        )
        reg[ident.id] = ident
    specs = [Specialization(**s) for s in data["specializations"]]
    return reg, specs


REGISTRY, SPECIALIZATIONS = load_registry()
_ALIASES = {al: i.id for i in REGISTRY.values() for al in i.aliases}


def get(identity_id: str) -> Identity:
    key = _ALIASES.get(identity_id, identity_id)
    if key not in REGISTRY:
        raise KeyError(f"unknown identity {identity_id!r}")
    return REGISTRY[key]


def select(pattern: str | None) -> list[Identity]:
    """Identities whose id or alias matches the glob ``pattern``, in registry order."""
    if not pattern:
        return list(REGISTRY.values())
    out = []
    for ident in REGISTRY.values():
        names = (ident.id,) + ident.aliases
        if any(fnmatch.fnmatchcase(nm, pattern) for nm in names):
            out.append(ident)
    return out


# -- evaluation --------------------------------------------------------------

def make_point(q, z, t, **params) -> SimpleNamespace:
    return SimpleNamespace(q=q, z=z, t=t, **params)


def _poly_args(ident: Identity, c) -> tuple:
    return tuple(getattr(c, p) for p in ident.poly_params)


def poly_value(ident: Identity, c, n: int):
    """p_n at the point ``c`` through the identity's representation.

    Terminating representations absorb their own cancellation (see
    :func:`transforms.guarded_evaluate`), so the value is good to the working
    precision of ``c``.
    """
    return polys.eval_poly(polys.PolySpec(ident.family, ident.inverse, _poly_args(ident, c), ident.rep), n, c.z, c.q)


def lhs_term(ident: Identity, c, n: int):
    return c.t**n * _coef(ident.coef, c, n) * poly_value(ident, c, n)


def lhs_partial(ident: Identity, c, N: int):
    """sum_{n=0}^{N} t^n h_n p_n(x)."""
    check_domain(ident, c)
    return sum((lhs_term(ident, c, n) for n in range(N + 1)), 0)


def lhs_adaptive(ident: Identity, c, tol: float, max_degree: int = LHS_MAX_TERMS):
    """Partial sums until CONSECUTIVE_SMALL successive terms are below 1e-3 tol |sum|."""
    total = 0
    small = 0
    for n in range(max_degree + 1):
        term = lhs_term(ident, c, n)
        total = total + term
        small = small + 1 if abs(term) <= 1e-3 * tol * abs(total) else 0
        if small >= CONSECUTIVE_SMALL:
            return total, n
    raise QSeriesError(f"{ident.id}: left-hand side did not settle by degree {max_degree}")


def rhs_form(ident: Identity, c, mutate: bool = False):
    form = _rhs(ident.rhs, c)
    return form.mutated() if mutate else form


def rhs_eval(ident: Identity, c, tol: float = 1e-10, mutate: bool = False):
    check_domain(ident, c)
    form = rhs_form(ident, c, mutate)
    if isinstance(form, DiagonalForm):
        return form.value(1e-3 * tol)[0]
    return form.value()


def expansion_via_chaundy(ident: Identity, c, N: int):
    """Partial sum of the expansion computed by the generic product engine."""
    if ident.expansion_of is None:
        raise ValueError(f"{ident.id} is not a product expansion")
    parent = get(ident.expansion_of)
    return expand(_chaundy_source(parent.rhs, c), ident.variant).partial_sum(N)


def expansion_partial(ident: Identity, c, N: int):
    form = rhs_form(ident, c)
    return sum((form.term(n) for n in range(N + 1)), 0)


# -- domains and sampling ----------------------------------------------------

def domain_bound(ident: Identity, c) -> float:
    """Largest |t| allowed by the monomial constraints |t * prod p^k| < 1."""
    bound = math.inf
    for mono in ident.domain:
        other = 1.0
        for name, power in mono:
            if name == "t":
                continue
            other *= float(abs(getattr(c, name))) ** power
        bound = min(bound, 1 / other)
    return bound


def check_domain(ident: Identity, c) -> None:
    if abs(c.t) >= domain_bound(ident, c):
        raise DomainError(f"{ident.id}: |t| = {float(abs(c.t)):.3g} outside the convergence domain")
    if ident.real_q and (abs(complex(c.q).imag) > 0 or not 0 < float(mpmath.re(c.q)) < 1):
        raise DomainError(f"{ident.id}: needs real q in (0, 1)")


def rng_for(identity_id: str, seed: int) -> np.random.Generator:
    """PCG64 stream keyed by (seed, crc32(identity id)), stable across platforms."""
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(identity_id.encode())]))


def _polar(rng, lo, hi):
    r = rng.uniform(lo, hi)
    phase = rng.uniform(-math.pi, math.pi)
    return complex(r * math.cos(phase), r * math.sin(phase))


def sample_point(ident: Identity, rng: np.random.Generator, complex_q: bool = False) -> SimpleNamespace:
    """Random point: q real in (0.05, 0.8), parameters of modulus (0.1, 0.9) with random
    phase, z of modulus (0.7, 1.4) with random phase, |t| in (0.05, 0.6) of its bound."""
    if complex_q and not ident.real_q:
        q = _polar(rng, 0.05, 0.8)
    else:
        q = rng.uniform(0.05, 0.8)
    params = {p: _polar(rng, 0.1, 0.9) for p in ident.params}
    zr = math.exp(rng.uniform(-0.35, 0.35))
    zph = rng.uniform(-math.pi, math.pi)
    z = complex(zr * math.cos(zph), zr * math.sin(zph))
    c = make_point(q, z, 0.0, **params)
    u = rng.uniform(0.05, 0.6)
    tph = rng.uniform(-math.pi, math.pi)
    bound = min(domain_bound(ident, c), 1.0)
    c.t = complex(bound * u * math.cos(tph), bound * u * math.sin(tph))
    return c


def to_mp_point(c) -> SimpleNamespace:
    return SimpleNamespace(**{k: to_mp(v) for k, v in vars(c).items()})


def describe_point(c) -> dict:
    out = {}
    for k, v in vars(c).items():
        v = complex(v)
        out[k] = repr(v.real) if v.imag == 0 else f"{v.real!r}{v.imag:+}j"
    return out


# -- verification ------------------------------------------------------------

@dataclass
class VerificationReport:
    id: str
    trials: int
    max_rel_err: float
    mean_rel_err: float
    lhs_degree_used: int
    failures: list
    tol: float
    seed: int
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_record(self, timing: bool = False) -> dict:
        rec = asdict(self)
        if not timing:
            rec.pop("wall_time")
        rec["schema_version"] = SCHEMA_VERSION
        rec["passed"] = self.passed
        return rec


def _rel(x, y) -> float:
    d = abs(x - y)
    s = abs(y)
    return float(d / s) if s != 0 else float(d)


def _trial(ident: Identity, c, tol: float, mutate: bool, max_degree: int):
    with mpmath.workdps(WORK_DPS):
        m = to_mp_point(c)
        check_domain(ident, m)
        lhs, N = lhs_adaptive(ident, m, tol, max_degree)
        rhs = rhs_eval(ident, m, tol, mutate)
        return _rel(lhs, rhs), N


def verify(identity, trials: int = 50, tol: float | None = None, seed: int = 0,
           mutate: bool = False, complex_q: bool = False,
           max_degree: int = LHS_MAX_TERMS) -> VerificationReport:
    """Compare both sides at ``trials`` random points of the identity's domain.

    ``mutate`` drops one factor from the right-hand side (a harness
    self-check that must produce failures); ``max_degree`` caps the
    adaptive left-hand side truncation.
    """
    ident = get(identity) if isinstance(identity, str) else identity
    tol = ident.default_tol if tol is None else tol
    rng = rng_for(ident.id, seed)
    start = time.perf_counter()
    errs, failures, degree = [], [], 0
    for _ in range(trials):
        c = sample_point(ident, rng, complex_q)
        try:
            err, N = _trial(ident, c, tol, mutate, max_degree)
        except (QSeriesError, ArithmeticError, ValueError) as exc:
            failures.append({"point": describe_point(c), "error": f"{type(exc).__name__}: {exc}"})
            continue
        errs.append(err)
        degree = max(degree, N)
        if not err <= tol:
            failures.append({"point": describe_point(c), "error": f"relative error {err:.3e}"})
    return VerificationReport(
        id=ident.id,
        trials=trials,
        max_rel_err=max(errs) if errs else math.inf,
        mean_rel_err=float(np.mean(errs)) if errs else math.inf,
        lhs_degree_used=degree,
        failures=failures,
        tol=tol,
        seed=seed,
        wall_time=time.perf_counter() - start,
    )


def specialization_check(spec: Specialization, trials: int = 10, seed: int = 0,
                         tol: float | None = None) -> VerificationReport:
    """Compare the parent identity at the specialised parameter with the child.

    Both the left-hand sides and the right-hand sides are compared; limits
    use the parameter value LIMIT_EPS and tolerance LIMIT_TOL.
    """
    parent, child = get(spec.parent), get(spec.child)
    tol = (LIMIT_TOL if spec.is_limit else 1e-10) if tol is None else tol
    rng = rng_for(spec.label, seed)
    errs, failures, degree = [], [], 0
    start = time.perf_counter()
    for _ in range(trials):
        c = sample_point(child, rng)
        # the parent may carry a stricter domain than the child
        c.t = c.t * min(1.0, 0.6 * domain_bound(parent, _with_special(c, spec)) / abs(c.t))
        try:
            with mpmath.workdps(WORK_DPS):
                m = to_mp_point(c)
                pm_ = _with_special(m, spec)
                lc, nc = lhs_adaptive(child, m, 1e-12)
                lp, npar = lhs_adaptive(parent, pm_, 1e-12)
                rc = rhs_eval(child, m, 1e-12)
                rp = rhs_eval(parent, pm_, 1e-12)
                err = max(_rel(lp, lc), _rel(rp, rc))
        except (QSeriesError, ArithmeticError, ValueError) as exc:
            failures.append({"point": describe_point(c), "error": f"{type(exc).__name__}: {exc}"})
            continue
        errs.append(err)
        degree = max(degree, nc, npar)
        if not err <= tol:
            failures.append({"point": describe_point(c), "error": f"relative gap {err:.3e}"})
    return VerificationReport(
        id=spec.label,
        trials=trials,
        max_rel_err=max(errs) if errs else math.inf,
        mean_rel_err=float(np.mean(errs)) if errs else math.inf,
        lhs_degree_used=degree,
        failures=failures,
        tol=tol,
        seed=seed,
        wall_time=time.perf_counter() - start,
    )


def _with_special(c, spec: Specialization):
    d = dict(vars(c))
    if spec.is_limit:
        d[spec.param] = LIMIT_EPS if not isinstance(c.q, (mpmath.mpf, mpmath.mpc)) else mpmath.mpf(LIMIT_EPS)
    else:
        d[spec.param] = _SPECIAL_VALUES[spec.value](c)
    return SimpleNamespace(**d)


def taylor_coefficients(ident: Identity, c, count: int, radius: float = 0.5, points: int = 32) -> list:
    """First ``count`` Taylor coefficients in t of the right-hand side.

    Computed as a discrete Cauchy integral over |t| = radius in mpmath;
    the aliasing error is of the size of the coefficient of t^(n+points).
    """
    with mpmath.workdps(WORK_DPS):
        m = to_mp_point(c)
        vals = []
        for j in range(points):
            w = mpmath.expjpi(mpmath.mpf(2 * j) / points)
            m.t = radius * w
            vals.append(rhs_eval(ident, m, 1e-30))
        coeffs = []
        for n in range(count):
            s = mpmath.fsum(v * mpmath.expjpi(-mpmath.mpf(2 * j * n) / points) for j, v in enumerate(vals))
            coeffs.append(s / points / mpmath.mpf(radius) ** n)
        return coeffs
