"""Exception hierarchy shared by every module of the package."""


class QSeriesError(Exception):
    """Base class for all errors raised by qchaundy."""


class UnsupportedInExactMode(QSeriesError):
    """An operation needs a limit or an infinite product but received exact input."""


class NonFiniteError(QSeriesError, ArithmeticError):
    """A floating-point evaluation produced NaN or infinity."""


class OmegaQProximity(QSeriesError):
    """A value lies in (or numerically too close to) the excluded set {q^-k}."""


class DenominatorHitsOmegaQ(OmegaQProximity):
    """A denominator Pochhammer symbol of a series vanishes."""


class ParameterInOmegaQ(OmegaQProximity):
    """A transformation parameter lies in the excluded set Omega_q^n or is zero."""


class ZeroParameter(QSeriesError, ZeroDivisionError):
    """A parameter that has to be inverted is zero."""


class DivergentSeries(QSeriesError):
    """The series is nonterminating and has no region of convergence."""


class UnitDiskViolation(DivergentSeries):
    """A series that converges only for |z| < 1 was given |z| >= 1."""


class Nonconvergence(QSeriesError):
    """The term budget was exhausted before the truncation criterion was met."""


class DivergentFactor(DivergentSeries):
    """One factor of a Chaundy product is a divergent series."""


class DomainError(QSeriesError, ValueError):
    """A sampled or supplied point violates an identity's domain predicate."""
