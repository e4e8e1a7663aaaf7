"""Truncated F in two moments, compared with its closed form.

When only t_1 and t_2 are switched on, F resums to

    -3/4 t0^2 + 1/2 t0^2 log(t0 / (1 - 4|t2|^2))
      + t0 (|t1|^2 + t1^2 tbar2 + tbar1^2 t2) / (1 - 4|t2|^2)

so the truncated series can be checked term by term and numerically.
"""

import cmath
import math

from todamap.series import MomentVector, build_f
from todamap.verification import check_quartic

K = 8
f = build_f(2, K)
print(f"build_f(2, {K}) has {len(f.terms)} nonzero terms beyond the head:")
for mono, c in sorted(f.terms.items(), key=lambda kv: kv[0].sort_key()):
    print(f"  {str(c):>6} * {mono}")

rep = check_quartic(K, f)
print(f"\nexact comparison with the expanded closed form: {rep}")

t0, t1, t2 = 0.4, 0.05 + 0.03j, 0.04 + 0.01j
x = 4 * abs(t2) ** 2
closed = (
    -0.75 * t0**2
    + 0.5 * t0**2 * math.log(t0 / (1 - x))
    + t0 * (abs(t1) ** 2 + (t1**2 * t2.conjugate()).real * 2) / (1 - x)
)
for k in (4, 6, 8, 10):
    approx = build_f(2, k).series().evaluate(MomentVector(t0, (t1, t2)))
    print(f"  K={k}: series {approx.real:+.15f}  closed {closed:+.15f}  diff {abs(approx - closed):.2e}")

print("\nrotating the moments t_k -> t_k exp(-i k a) leaves F unchanged:")
p = MomentVector(t0, (t1, t2))
print(f"  {f.series().evaluate(p):.15f}")
print(f"  {f.series().evaluate(p.rotated(1.234)):.15f}")
print(f"  arg check: {cmath.phase(p.rotated(1.234).get(2) / t2):+.4f} = -2.468 mod 2pi")
