"""Fixed-step classical Runge-Kutta integration."""

import numpy as np


def rk4_step(f, t, y, dt):
    """Advance ``y' = f(t, y)`` by one classical RK4 step.

    ``y`` may be any numpy array; ``f`` must return an array of the same shape.
    """
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_integrate(f, t0, y0, dt, steps):
    """Return times and states of ``steps`` RK4 steps (``steps + 1`` rows)."""
    y = np.array(y0, dtype=float)
    ts = [t0]
    ys = [y.copy()]
    t = t0
    for n in range(steps):
        y = rk4_step(f, t, y, dt)
        t = t0 + (n + 1) * dt
        ts.append(t)
        ys.append(y.copy())
    return np.array(ts), np.array(ys)
