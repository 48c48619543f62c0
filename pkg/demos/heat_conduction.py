"""Pure conduction: a cosine temperature mode in a gas held at rest.

The mode decays exponentially with rate kappa pi^2 / (rho0 Cv L^2); the
example fits the rate from the simulated amplitudes at several resolutions.
"""

import numpy as np

from thermovar.harness.checks import DEFAULT_EOS, mode_amplitude, run_tube

KAPPA = 0.01
expected = KAPPA * np.pi ** 2 / (DEFAULT_EOS.rho0 * DEFAULT_EOS.Cv)
phen = dict(mu=0.0, zeta=0.0, kappa_th=KAPPA)
print(f"expected decay rate {expected:.6f}")
for nx in (32, 64, 128, 256):
    model, traj, _ = run_tube(nx, "spatial", t_end=2.0, phen=phen, initial="thermal", pin_velocity=True, cfl=0.9)
    t = np.array([s.t for s in traj])
    amp = np.array([mode_amplitude(model.grid, s.T) for s in traj])
    rate = -np.polyfit(t, np.log(amp), 1)[0]
    print(f"nx={nx:4d}  fitted rate {rate:.6f}  relative error {abs(rate - expected) / expected:.2e}")
