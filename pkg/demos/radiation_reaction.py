"""Runaway solutions and their cure.

The Abraham-Lorentz-Dirac equation admits self-accelerating solutions: a
charge at rest with a tiny initial acceleration speeds up as exp(t / tau).
The Landau-Lifshitz reduction of order removes them; in a magnetic field it
yields clean synchrotron damping instead.
"""
import numpy as np

from pointdefects.classical import ExternalField, integrate_ald, integrate_ll, integrate_lorentz
from pointdefects.core import ParticleState

tau = 2.0 / 3.0
rest = ParticleState(0.0, np.zeros(3), np.zeros(3))
ald = integrate_ald(rest, [1e-6, 0, 0], ExternalField(), 0.005, 20.0)
print(f"ALD with a0 = 1e-6: status {ald.meta['status']!r} after t = {ald.t[-1]:.2f}")
g = np.sqrt(1 + np.sum(ald.P**2, axis=1))
early = ald.t < 3 * tau
rate = np.polyfit(ald.t[early], np.log(np.linalg.norm(ald.A[early], axis=1)), 1)[0]
print(f"  early growth rate {rate:.4f} (1/tau = {1 / tau:.4f})")
print(f"  Lorentz factor reached {g[-1]:.3e} with no force applied")

B0 = 0.1
field = ExternalField.uniform(B0=(0, 0, B0))
s0 = ParticleState.from_velocity(0.0, np.zeros(3), [0.3, 0, 0], 1.0, 1.0)
ll = integrate_ll(s0, field, 0.05, 200.0)
lor = integrate_lorentz(s0, field, 0.05, 200.0)
kin = lambda tr: np.sqrt(1 + np.sum(tr.P**2, axis=1)) - 1
print(f"\nuniform B = {B0}: kinetic energy after t = 200")
print(f"  Lorentz only:      {kin(lor)[-1]:.6f} (conserved)")
print(f"  Landau-Lifshitz:   {kin(ll)[-1]:.6f} (radiated away)")
