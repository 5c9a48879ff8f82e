"""
Green-function weight on Z^3
============================

The weight built from the Green function decays like (d-2)^2 / (4 |x|^2).
Compute G by the Fourier integral and watch w |x|^2 approach 1/4.
"""

from graphhardy.green import green_asymptotic_check, green_fourier_lattice

# G(0) with the random-walk normalisation is Watson's constant 1.5163860591...
print("G_rw(0) =", 6 * green_fourier_lattice(3, (0, 0, 0)))

print(f"\n{'k':>4} {'w(k e1) k^2':>14} {'(w k^2 - 1/4) k':>18}")
for row in green_asymptotic_check(3, (1, 0, 0), (5, 10, 20, 30)):
    print(f"{row.k:>4} {row.weight_times_norm2:>14.9f} {(row.weight_times_norm2 - 0.25) * row.k:>18.9f}")

# off the axis the limit is the same
for direction in [(1, 1, 0), (1, 1, 1)]:
    rows = green_asymptotic_check(3, direction, (10, 20))
    print(direction, [round(r.weight_times_norm2, 6) for r in rows])
