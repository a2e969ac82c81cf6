"""Hydrogen levels with a Born-Infeld nucleus.

A finite field strength caps the nuclear potential at the origin, so the
ground state is less bound.  The shift shrinks monotonically as ``b`` grows
and the Coulomb spectrum returns in the limit.
"""
import numpy as np

from pointdefects.quantum import hydrogen_spectrum, hydrogen_sweep

ref = hydrogen_spectrum(np.inf)
print("Coulomb reference (Hartree):")
for lv in ref.levels:
    print(f"  n={lv['n']} l={lv['l']}: {lv['energy']:+.8f}  (exact {-0.5 / lv['n'] ** 2:+.8f})")

bs, E1, mono = hydrogen_sweep([0.01, 0.1, 1.0, 10.0, 100.0, 1e3])
print("\nground state against b:")
for b, E in zip(bs, E1):
    print(f"  b = {b:8.2f}: E1 = {E:+.8f}, shift {E - ref.energy(1):+.3e}")
print(f"strictly monotone in b: {mono}")
