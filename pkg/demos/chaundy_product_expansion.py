"""Expanding a product of two basic hypergeometric series.

The product 2phi1(a; b; q, X) * 1phi0(c; -; q, Y) is re-summed along
anti-diagonals, giving a single series whose n-th term is an explicit
coefficient times a terminating series.  The two bracketings (qCh1, qCh2)
give different terms with the same partial sums in exact arithmetic.
"""
from fractions import Fraction

from qchaundy.chaundy import ChaundyInput, brute_product, expand, product_value, verify_symmetry

src = ChaundyInput((0.3, -0.5), (0.6,), 0, (0.4 + 0.2j,), (), 0, 0.45, -0.3j, 0.6)
want = product_value(src)
print(f"product of the two series: {want:.15g}")
for N in (5, 10, 20, 40):
    one = expand(src, "qCh1").partial_sum(N)
    two = expand(src, "qCh2").partial_sum(N)
    print(f"N = {N:2d}  qCh1 err {abs(one - want) / abs(want):.2e}  qCh2 err {abs(two - want) / abs(want):.2e}")
print(f"qCh1 versus qCh2 at N = 150: {verify_symmetry(src, 150):.2e}")

exact = ChaundyInput((Fraction(1, 2), Fraction(2, 3)), (Fraction(3, 5),), 0, (Fraction(-1, 4),), (), 0,
                     Fraction(1, 3), Fraction(2, 7), Fraction(1, 3))
N = 12
print("exact triangle truncation matches the brute double sum:",
      expand(exact, "qCh1").partial_sum(N) == expand(exact, "qCh2").partial_sum(N) == brute_product(exact, N))
