"""Exact rational checks of terminating-series transformations and representations.

A terminating series is rewritten by the inversion formula, by the
one-parameter family of transformations and by base inversion q -> 1/q;
all values agree as Fractions.  Then every representation of an
Askey-Wilson polynomial is evaluated at one rational point.
"""
from fractions import Fraction

from qchaundy import polys
from qchaundy.transforms import TerminatingSeries, invert_base, invert_gasper_rahman, transform_lemma13

q = Fraction(1, 3)
ts = TerminatingSeries(4, (Fraction(2, 5), Fraction(-7, 2)), (Fraction(5, 4),), q, Fraction(3, 7))
print("series value           ", ts.value())
print("inversion formula      ", invert_gasper_rahman(ts).value())
for p in (-1, 0, 1, 2):
    shifted = TerminatingSeries(ts.n, ts.a, ts.b, q, ts.z, p)
    print(f"transformation, p = {p:2d} ", transform_lemma13(shifted).value() == shifted.value())
print("base inversion         ", invert_base(ts).value())

n, z = 3, Fraction(5, 2)
params = [Fraction(2, 7), Fraction(-3, 5), Fraction(4, 9), Fraction(5, 11)]
print(f"\nAskey-Wilson p_{n} at z = {z}, q = {q}:")
for rep in polys.reps_for("aw"):
    print(f"  {rep.id:8s} {rep.value(n, q, z, params)}")
