"""Coulomb's law from the Born-Infeld stress tensor.

Two charges are placed in a box, the nonlinear electrostatic problem is
solved by minimizing the field energy, and the force on one charge is the
stress-tensor flux through the bisecting plane.  Far apart compared with
``sqrt(e / b)`` the force approaches ``e^2 / d^2``.  This small sweep runs in
under a minute; the scenario ``scenarios/coulomb_asymptotics.json`` does the
full one.
"""
from pointdefects.electrostatics import coulomb_asymptotics_check

res = coulomb_asymptotics_check([10.0, 14.0])
for row in res["rows"]:
    print(f"d = {row['d']:5.1f}: force {row['magnitude']:.6e}, Coulomb {row['coulomb']:.6e}, "
          f"ratio {row['ratio']:.5f}")
print(f"log-log slope {res['slope']:.4f}")
