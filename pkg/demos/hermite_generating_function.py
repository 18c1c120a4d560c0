"""Both sides of the continuous q-Hermite generating function.

sum_n H_n(x|q) t^n / (q;q)_n equals 1 / (t z, t/z; q)_inf with x = (z + 1/z)/2.
The script prints the partial sums of the left side next to the product
and the relative error as the degree grows.
"""
import mpmath

from qchaundy import genfun

q, z, t = 0.5, 1.3 + 0.4j, 0.35
ident = genfun.get("cqHgf")

with mpmath.workdps(genfun.WORK_DPS):
    c = genfun.to_mp_point(genfun.make_point(q=q, z=z, t=t))
    rhs = genfun.rhs_eval(ident, c)
    print(f"product side: {mpmath.nstr(rhs, 20)}")
    for N in (0, 2, 5, 10, 20, 40):
        lhs = genfun.lhs_partial(ident, c, N)
        err = abs(lhs - rhs) / abs(rhs)
        print(f"N = {N:3d}  partial sum {mpmath.nstr(lhs, 20):>45}  rel err {float(err):.2e}")

report = genfun.verify(ident, trials=20, seed=1)
print(f"random verification: {report.trials} trials, max rel err {report.max_rel_err:.2e}, passed={report.passed}")
