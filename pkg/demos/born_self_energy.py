"""Finite self-energy of a point charge in Born-Infeld electrostatics.

In Maxwell's theory the field energy of a point charge diverges.  With a
maximal field strength ``b`` it becomes ``(1/6) B(1/4, 1/4) sqrt(b e^3)``,
and choosing ``b`` so that this equals ``m c^2`` fixes Born's value of the
field strength.  The script also shows the grid quadrature converging to the
closed form.
"""
import numpy as np

from pointdefects.born_infeld import (BETA_QUARTER, FIELD_ENERGY_COEFF, BoxGrid, b_born,
                                      bi_conserved_integrals, born_potential,
                                      point_charge_sampler)

print(f"B(1/4, 1/4)             = {BETA_QUARTER:.12f}")
print(f"energy coefficient      = {FIELD_ENERGY_COEFF:.12f}")

bb = b_born(1.0, 1.0, 1.0)
print(f"b_Born (m = c = e = 1)  = {bb:.8f}")
print(f"field energy at b_Born  = {bi_conserved_integrals(b=bb, e=1.0).energy:.10f} m c^2")
print(f"potential at the charge = {born_potential(0.0, 1.0, bb):.8f} (finite)")

print("\ngrid quadrature with singularity subtraction, b = 1:")
exact = bi_conserved_integrals(b=1.0, e=1.0).energy
for n in (32, 64, 96):
    grid = BoxGrid(-8.0, 8.0, n)
    num = bi_conserved_integrals(point_charge_sampler(), b=1.0, grid=grid,
                                 exclude=[((0, 0, 0), 1.0)]).energy
    print(f"  n = {n:3d}: {num:.6f}   relative error {abs(num / exact - 1):.1e}")

r = np.array([0.1, 1.0, 10.0])
print("\npotential of the charge -e at r =", r)
print("  Born   ", np.round(born_potential(r, 1.0, 1.0), 5))
print("  Coulomb", np.round(-1 / r, 5))
