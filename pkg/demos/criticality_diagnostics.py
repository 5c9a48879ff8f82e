"""
Numerical diagnostics for optimality
====================================

Criticality, null-criticality and optimality near infinity are
statements about infinite graphs, so a computer can only show trends on
finite exhaustions.  This script prints those trends for the half-line
weight and for rescaled controls.
"""

import math

from graphhardy.criticality import (CAVEAT, OptimalityConfig, RegionFamily, energy_decay_certificate,
                                    null_criticality_divergence, optimality_report, rayleigh_sweep,
                                    scaled)
from graphhardy.families import halfline_dirichlet
from graphhardy.hardy import construct_weight, halfline_supersolutions
from graphhardy.schrodinger import SchrodingerOperator

H = SchrodingerOperator(halfline_dirichlet())
W = construct_weight(H, *halfline_supersolutions())
psi = W.ground_state()
u0 = lambda n: float(n)  # noqa: E731

# lambda*(B_N) = inf over functions on the ball of h(f)/sum w f^2; >= 1 and drifting down
balls = RegionFamily("balls", (100, 1000, 10000))
for c in (0.5, 1.0, 2.0):
    rep = rayleigh_sweep(H, scaled(W, c), balls)
    print(f"{c} w: lambda* = {[round(x, 5) for x in rep.lambda_star]} -> {rep.classification}")

# energies of psi * e_n, with e_n a logarithmic cutoff in u0 = n
cert = energy_decay_certificate(H, W, u0, psi, (4, 16, 256))
print("\n(h - w)(psi e_n):", [round(e, 6) for e in cert.energies],
      "C ~", round(cert.fit_constant, 4))

# sum psi^2 w over balls grows like (1/4) log N
tab = null_criticality_divergence(H, psi, W, (10 ** 3, 10 ** 4, 10 ** 5))
print("sum psi^2 w:", [round(s, 5) for s in tab.partial_sums], "->", tab.verdict,
      "slope", round(tab.log_fit.params[0], 4), "vs", 0.25)

# annuli: the doubled weight violates the inequality far out, witnessing optimality near infinity
ann = rayleigh_sweep(H, scaled(W, 2.0), RegionFamily("annuli", (100, 1000, 10000), inner=10))
print("\n2w on annuli:", [round(x, 4) for x in ann.lambda_star])

cfg = OptimalityConfig(u0=u0, psi=psi, n_list=(4, 16, 64), divergence_radii=(100, 1000, 10000),
                       annulus_radii=(100, 1000, 10000), near_infinity_scale=2.0)
print("\nverdict:", optimality_report(H, W, cfg).verdict)
print(CAVEAT)
