"""Equivariance of de Broglie-Bohm trajectories for a Klein-Gordon packet.

Positions sampled from the initial charge density and transported by the
guiding velocity stay distributed according to the evolved density; in one
dimension they also keep their order.
"""
import numpy as np

from pointdefects.quantum import (Grid1D, StaticPotentials, VelocityHistory, bohm_trajectory,
                                  bohm_velocity_kg, equivariance_chi2, evolve_kg, kg_density,
                                  kg_packet, sample_density)

grid = Grid1D(-20.0, 40.0, 256)
free = StaticPotentials()
hist = evolve_kg(*kg_packet(grid, -5.0, 0.8, 2.0), grid, free, 0.02, 8.0, store_every=5)
print(f"charge drift per unit time: {hist.meta['charge_drift_per_time']:.1e}")

zero = np.zeros(grid.n)
vs = np.array([bohm_velocity_kg(p, d, grid, free, floor=1e-10, strict=False)
               for p, d in zip(hist.psi, hist.dpsi)])
Q0 = sample_density(grid, np.clip(kg_density(hist.psi[0], hist.dpsi[0], zero), 0, None),
                    2000, seed=1)
tr = bohm_trajectory(VelocityHistory(grid, hist.times, vs), Q0, 0.05, 8.0)
QT = tr.Q[-1, :, 0]
order = np.argsort(Q0)
print(f"ensemble mean moved from {Q0.mean():+.3f} to {QT.mean():+.3f}")
print(f"order preserved: {bool(np.all(np.diff(QT[order]) > 0))}")
for label, k in (("evolved density", -1), ("initial density", 0)):
    chi2, dof, p = equivariance_chi2(grid, kg_density(hist.psi[k], hist.dpsi[k], zero), QT)
    print(f"chi2 against {label}: {chi2:8.1f} on {dof} dof, p = {p:.3g}")
