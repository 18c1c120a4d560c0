import random
from fractions import Fraction

import pytest

from qchaundy.qcore import omega_index

_ACCEPTANCE = pytest.StashKey[list]()


def rand_fraction(rng: random.Random, lo: int = -9, hi: int = 9, den: int = 9, nonzero: bool = True) -> Fraction:
    while True:
        f = Fraction(rng.randint(lo, hi), rng.randint(1, den))
        if f != 0 or not nonzero:
            return f


def rand_q(rng: random.Random) -> Fraction:
    """Rational base with 0 < |q| < 1, q != 0."""
    while True:
        q = Fraction(rng.randint(-8, 8), rng.randint(2, 9))
        if q != 0 and abs(q) < 1:
            return q


def rand_param(rng: random.Random, q, n: int) -> Fraction:
    """Nonzero rational clear of q^-k for k < n (so it is safe as a denominator)."""
    while True:
        a = rand_fraction(rng)
        if omega_index(a, q, n) is None:
            return a


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def record_acceptance(request):
    """Record (criterion, passed, detail) for the terminal summary."""
    store = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(criterion: str, passed: bool, detail: str = ""):
        store.append((criterion, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config.stash.get(_ACCEPTANCE, [])
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(rows, key=lambda r: int(r[0].split(".")[0])):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}  {detail}")
