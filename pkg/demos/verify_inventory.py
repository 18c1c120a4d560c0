"""Verify every registered generating function at random points and print a table.

Equivalent to ``qchaundy verify --trials 10``; kept short so it runs in
well under a minute.
"""
from qchaundy import genfun

total_fail = 0
for ident in genfun.select(None):
    r = genfun.verify(ident, trials=10, seed=0)
    total_fail += not r.passed
    print(f"{'PASS' if r.passed else 'FAIL'}  {r.id:14s} anchor={ident.anchor or '-':12s} "
          f"max_rel_err={r.max_rel_err:.1e} degree={r.lhs_degree_used}")
print(f"{len(genfun.REGISTRY) - total_fail}/{len(genfun.REGISTRY)} identities passed")
