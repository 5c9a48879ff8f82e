"""
An optimal Hardy weight on the half-line
========================================

Build the weight from the two supersolutions u(n) = n and v = 1 on
{1, 2, ...} with a Dirichlet condition at 0, and compare it with the
closed form and with the classical 1/(4 n^2).
"""

import numpy as np

from graphhardy.families import halfline_dirichlet
from graphhardy.hardy import construct_weight, halfline_supersolutions, halfline_weight
from graphhardy.schrodinger import SchrodingerOperator

H = SchrodingerOperator(halfline_dirichlet())
W = construct_weight(H, *halfline_supersolutions())

# w(1) = 2 - sqrt(2); the edge formula is exact wherever both functions are harmonic
print(f"{'n':>8} {'w(n)':>22} {'closed form':>22} {'4 n^2 w(n)':>12}")
for n in (1, 2, 3, 10, 100, 10 ** 4, 10 ** 6):
    print(f"{n:>8} {W(n):>22.17g} {halfline_weight(n):>22.17g} {4 * n * n * W(n):>12.9f}")

# the improvement over the classical weight is about 5/(64 n^4)
n = np.array([10, 100, 1000])
gap = halfline_weight(n) - 1 / (4.0 * n ** 2)
print("\n64 n^4 (w - 1/(4n^2)):", 64 * n ** 4 * gap)

# sqrt(n) is a ground state of h - w: H psi = w psi off the boundary
psi = W.ground_state()
res = max(abs(H(psi, k) - W(k) * psi(k)) / psi(k) for k in range(1, 2000))
print("max relative |(H - w) psi| on 1..1999:", res)
