"""A walk through the exact coefficient machinery.

Starts from the counting function P, builds up the grouped sums T1 and the
recursive T2, then assembles N^2 for a handful of signatures and shows the
pattern that appears when the antiholomorphic side is a single repeated t_1.
"""

import math

from todamap.coefficients import MomentSignature, n2, p_count, s_weight, signatures, t1, t2

print("P counts bounded compositions: tuples 1 <= i_r < s_r summing to i")
for i, s in [(2, (2, 2)), (3, (2, 3)), (4, (3, 3, 2))]:
    print(f"  P({i}; {s}) = {p_count(i, s)}")

print("\nT1 groups consecutive blocks; it is symmetric when i + j = sum(s)")
print(f"  T1(2,3; (2,3)) = {t1(2, 3, (2, 3))},  T1(3,2; (2,3)) = {t1(3, 2, (2, 3))}")

print("\nT2 peels off the last index recursively")
print(f"  T2(1,1,1; s=(3,), l=(2,)) = {t2((1, 1, 1), (3,), (2,))}")
print(f"  T2(1,2,1; s=(2,2), l=(1,2)) = {t2((1, 2, 1), (2, 2), (1, 2))}")

print("\nS distributes the antiholomorphic indices over the blocks")
print(f"  S(1,1,1; s=(2,1), l=(1,1)) = {s_weight((1, 1, 1), (2, 1), (1, 1))}  (= 3!/(2*1))")

print("\nWith a single repeated t_1 on one side, only t_i survives, with (i-1)!:")
for i in range(1, 6):
    row = []
    for hol in [(i,), (1,) * i]:
        sig = MomentSignature.from_lists(hol, (1,) * i, i)
        row.append(f"{sig} -> {n2(sig)}")
    print("  " + "   ".join(row), f"  [(i-1)! = {math.factorial(i - 1)}]")

print("\nEvery coefficient up to weight 4:")
for sig in signatures(4):
    v = n2(sig)
    if v:
        print(f"  {str(sig):<22} {v}")
