"""Basic hypergeometric series, the symmetric q-Askey families and product expansions.

Modules
-------
qcore       q-Pochhammer symbols and scalar helpers (exact, float and mpmath)
phi         the r phi s ^m series: evaluation, convergence classes, limits
transforms  reversal and base inversion of terminating series
polys       polynomial families and their representations
chaundy     products of two series as sums of terminating series
genfun      generating-function registry and randomized verification
cli         command line front end
"""
from .phi import SeriesSpec, qhyp
from .polys import PolySpec, poly
from .qcore import qpoch, qpoch_inf, qpoch_multi

__all__ = ["SeriesSpec", "qhyp", "PolySpec", "poly", "qpoch", "qpoch_inf", "qpoch_multi"]
__version__ = "0.1.0"
