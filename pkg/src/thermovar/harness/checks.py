"""
Named quantitative checks, grouped into suites for ``thermovar check``.

Every check returns a list of :class:`Verdict` objects that carry the
measured value and the exact tolerance. Orders of convergence are fitted by
least squares on ``log(error)`` against ``log(h)``.
"""

import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import constraints as C
from .. import discrete as D
from .. import nsf_material as M
from .. import nsf_spatial as S
from ..discrete_models import make_adiabatic_piston, make_piston, make_two_cells
from ..eos import GasEos, free_energy_drho
from ..profiles import density_shape, isentropic_pulse, thermal_mode
from ..stencils import Grid
from .compare import relative_difference
from .report import at_least, at_most

N_STATES = 100
DEFAULT_EOS = GasEos(Cv=2.5, Cp=3.5, rho0=1.0, T0=1.0)
VISCOUS = dict(mu=0.01, zeta=0.005, kappa_th=0.01)


def fitted_order(hs, errors):
    """Slope of log(error) against log(h)."""
    hs, errors = np.log(np.asarray(hs, float)), np.log(np.asarray(errors, float))
    return float(np.polyfit(hs, errors, 1)[0])


def _rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _central(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def random_gas_states(seed, n=N_STATES):
    """Random equations of state and states ``(eos, rho, T)``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        Cv = rng.uniform(0.5, 5.0)
        eos = GasEos(Cv=Cv, Cp=Cv * rng.uniform(1.05, 1.7), rho0=rng.uniform(0.5, 2.0),
                     T0=rng.uniform(0.5, 2.0), s0=rng.uniform(-1.0, 1.0))
        out.append((eos, eos.rho0 * rng.uniform(0.3, 3.0), eos.T0 * rng.uniform(0.3, 3.0)))
    return out


# equation of state ----------------------------------------------------------

def eos_duality(seed=0):
    """Legendre duality, dual pressure identity and analytic partials on random states."""
    start = time.perf_counter()
    legendre, dual_p, roundtrip, first, iso = [], [], [], [], []
    for eos, rho, T in random_gas_states(seed):
        s = eos.entropy_from_T(rho, T)
        eps = eos.internal_energy(rho, s)
        legendre.append(_rel(eos.free_energy(rho, T), eps - T * s))
        dual_p.append(_rel(eos.pressure_from_s(rho, s), eos.pressure(rho, T)))
        roundtrip.append(_rel(eos.temperature_from_s(rho, s), T))
        hT, hr, hs = 1e-5 * T, 1e-5 * rho, 1e-5 * max(abs(s), rho)
        first += [
            _rel(_central(lambda x: eos.entropy_from_T(rho, x), T, hT), eos.entropy_dT(rho, T)),
            _rel(_central(lambda x: eos.entropy_from_T(x, T), rho, hr), eos.entropy_drho(rho, T)),
            _rel(_central(lambda x: eos.pressure(rho, x), T, hT), eos.pressure_dT(rho, T)),
            _rel(-_central(lambda x: eos.free_energy(rho, x), T, hT), s),
            _rel(_central(lambda x: eos.free_energy(x, T), rho, hr), free_energy_drho(eos, rho, T)),
            _rel(_central(lambda x: eos.internal_energy(rho, x), s, hs), T),
            _rel(_central(lambda x: eos.internal_energy_T(rho, x), T, hT), rho * eos.Cv),
        ]
        # along the isentrope through (rho, T): s / rho fixed
        eta = s / rho
        co = eos.coefficients(rho, T)
        cs2 = _central(lambda x: eos.pressure_from_s(x, eta * x), rho, 1e-4 * rho)
        dT = _central(lambda x: eos.temperature_from_s(x, eta * x), rho, 1e-4 * rho)
        iso += [_rel(cs2, co.cs2), _rel(dT / cs2, co.gamma_ad)]
    elapsed = time.perf_counter() - start
    return [
        at_most("legendre_identity", max(legendre), 1e-10, "psi = eps - T s"),
        at_most("dual_pressure_identity", max(dual_p), 1e-10, "p(rho, s) = p(rho, T)"),
        at_most("temperature_entropy_roundtrip", max(roundtrip), 1e-10),
        at_most("first_partials_vs_fd", max(first), 1e-8),
        at_most("isentrope_coefficients_vs_fd", max(iso), 1e-6, "cs2 and adiabatic gradient"),
        at_most("eos_suite_runtime_s", elapsed, 1.0),
    ]


def coefficient_identity(seed=0):
    """rho^2 cs^2 Cv Gamma_ad = p for the perfect gas."""
    worst = 0.0
    for eos, rho, T in random_gas_states(seed + 1):
        co = eos.coefficients(rho, T)
        lhs = rho ** 2 * co.cs2 * co.cv_coeff * co.gamma_ad
        worst = max(worst, _rel(lhs, eos.pressure(rho, T)))
    return [at_most("coefficient_identity", worst, 1e-12, "rho^2 cs^2 Cv Gamma_ad = p")]


# discrete systems -----------------------------------------------------------

def two_cell_relaxation(seed=0):
    """T_B - T_A against 10 exp(-2 kappa t / C) with RK4, dt = 1e-3."""
    start = time.perf_counter()
    model, state = make_two_cells(heat_capacity=1.0, kappa=0.5, T_a=300.0, T_b=310.0)
    traj = D.simulate(model, state, 1e-3, 2000)
    out = []
    for t in (0.5, 1.0, 2.0):
        T = D.current_temperatures(model, traj[int(round(t / 1e-3))])
        exact = 10.0 * np.exp(-2 * 0.5 * t / 1.0)
        out.append(at_most(f"two_cell_gap_t{t:g}", abs(T[1] - T[0] - exact) / exact, 1e-6))
    out.append(at_most("two_cell_runtime_s", time.perf_counter() - start, 1.0))
    return out


def discrete_models():
    """The three built-in isolated discrete scenarios with default parameters."""
    return {
        "piston": make_piston(DEFAULT_EOS),
        "two_cells": make_two_cells(),
        "adiabatic_piston": make_adiabatic_piston(DEFAULT_EOS),
    }


def discrete_trajectories(dt=1e-3, t_end=2.0, form=D.FREE_ENERGY):
    steps = int(round(t_end / dt))
    out = {}
    for name, (model, state) in discrete_models().items():
        out[name] = (model, D.simulate(model, state, dt, steps, form=form))
    return out


def discrete_time_order(dts=(0.1, 0.05, 0.025), t_end=2.0):
    """Order of RK4 on the mechanical-thermal ODE: error against the dt/2 solution."""
    model, state = make_piston(DEFAULT_EOS)
    finals = {}
    for dt in list(dts) + [dts[-1] / 2]:
        traj = D.simulate(model, state, dt, int(round(t_end / dt)))
        st = traj[-1]
        finals[dt] = np.concatenate([st.q, st.v, D.current_temperatures(model, st)])
    errs = [np.max(np.abs(finals[dt] - finals[dt / 2])) for dt in dts]
    return fitted_order(dts, errs), errs


# continuum systems ----------------------------------------------------------

def tube(nx, solver="spatial", eos=DEFAULT_EOS, amplitude=0.01, profile="cosine", phen=VISCOUS,
         initial="pulse", pin_velocity=False):
    """Model and initial state of the gas tube on [0, 1]."""
    grid = Grid.uniform(nx, 1.0)
    make = isentropic_pulse if initial == "pulse" else thermal_mode
    rho, T = make(grid, eos, amplitude, profile)
    if initial == "density":
        rho = eos.rho0 * (1.0 + amplitude * density_shape(grid.nodes, grid.length, profile))
        T = np.full(grid.n_nodes, eos.T0)
    if solver == "material":
        model = M.MaterialModel(grid, rho, eos, mu=phen["mu"], zeta=phen["zeta"], kappa_th=phen["kappa_th"],
                                pin_velocity=pin_velocity)
        return model, M.initial_state(model, Ttemp=T)
    model = S.SpatialModel(grid, eos, S.Phenomenology(**phen), pin_velocity=pin_velocity)
    return model, S.initial_state(model, rho=rho, T=T)


def _steps_for(t_end, dt):
    steps = int(np.ceil(t_end / dt - 1e-9))
    return steps, t_end / steps


def run_tube(nx, solver="spatial", t_end=0.05, dt=None, form=S.TEMPERATURE, cfl=0.25, **kw):
    model, state = tube(nx, solver, **kw)
    bound = (M if solver == "material" else S).max_stable_dt(model, state, cfl)
    steps, dt = _steps_for(t_end, bound if dt is None else dt)
    if solver == "material":
        traj = M.simulate(model, state, dt, steps, cfl=cfl)
    else:
        traj = S.simulate(model, state, dt, steps, form=form, cfl=cfl)
    return model, traj, dt


def _fields(solver, st):
    if solver == "material":
        return np.concatenate([st.phi, st.V, st.Ttemp])
    return np.concatenate([st.v, st.rho, st.T])


def _restrict(solver, st, stride):
    if solver == "material":
        parts = (st.phi, st.V, st.Ttemp)
    else:
        parts = (st.v, st.rho, st.T)
    return np.concatenate([p[::stride] for p in parts])


def space_order(solver="spatial", nxs=(32, 64, 128), t_end=0.05):
    """Self-convergence order: coarse solution against the next finer one on shared nodes."""
    model, state = tube(2 * nxs[-1], solver)
    dt = (M if solver == "material" else S).max_stable_dt(model, state)  # finest grid bound
    finals = {}
    for nx in list(nxs) + [2 * nxs[-1]]:
        _, traj, _ = run_tube(nx, solver, t_end=t_end, dt=dt)
        finals[nx] = traj[-1]
    errs = [np.max(np.abs(_fields(solver, finals[nx]) - _restrict(solver, finals[2 * nx], 2))) for nx in nxs]
    return fitted_order([1.0 / n for n in nxs], errs), errs


def continuum_time_order(solver="material", nx=32, dts=(0.016, 0.008, 0.004), t_end=0.096):
    """RK4 order at fixed grid; a 10% pulse keeps the errors above round-off."""
    finals = {}
    for dt in list(dts) + [dts[-1] / 2]:
        _, traj, _ = run_tube(nx, solver, t_end=t_end, dt=dt, cfl=1.0, amplitude=0.1)
        finals[dt] = _fields(solver, traj[-1])
    errs = [np.max(np.abs(finals[dt] - finals[dt / 2])) for dt in dts]
    return fitted_order(dts, errs), errs


def _drift(values):
    values = np.asarray(values, float)
    return float(np.max(np.abs(values - values[0])) / abs(values[0]))


def first_law(seed=0):
    start = time.perf_counter()
    out = []
    for name, (model, traj) in discrete_trajectories().items():
        out.append(at_most(f"energy_drift_{name}", D.energy_drift(model, traj), 1e-8))
    for solver, mod in (("material", M), ("spatial", S)):
        model, traj, _ = run_tube(128, solver, t_end=0.1)
        out.append(at_most(f"energy_drift_{solver}_nx128", _drift([mod.total_energy(model, s) for s in traj]), 1e-6))
    for solver in ("material", "spatial"):
        order, errs = space_order(solver)
        out.append(at_least(f"space_order_{solver}", order, 1.8, f"errors {', '.join(f'{e:.2e}' for e in errs)}"))
    order, errs = discrete_time_order()
    out.append(at_least("time_order_discrete", order, 3.5, f"errors {', '.join(f'{e:.2e}' for e in errs)}"))
    order, errs = continuum_time_order()
    out.append(at_least("time_order_material", order, 3.5, f"errors {', '.join(f'{e:.2e}' for e in errs)}"))
    out.append(at_most("first_law_runtime_s", time.perf_counter() - start, 60.0))
    return out


def _monotone(values):
    values = np.asarray(values, float)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(values))))
    return float(np.min(np.diff(values))), -tol


def second_law(seed=0):
    out = []
    for name, (model, traj) in discrete_trajectories().items():
        d = D.diagnostics(model, traj)
        worst, tol = _monotone(d["S_tot"])
        out.append(at_least(f"entropy_nondecreasing_{name}", worst, tol))
        out.append(at_least(f"production_min_{name}", float(np.min(d["production_min"])), -1e-12,
                            "friction and per-pair exchange terms"))
        out.append(at_least(f"sigma_dot_sum_{name}", float(np.min(d["sigma_dot_sum"])), -1e-12))
    model, traj, _ = run_tube(128, "material", t_end=0.1)
    worst, tol = _monotone([M.total_entropy(model, s) for s in traj])
    out.append(at_least("entropy_nondecreasing_material", worst, tol))
    out.append(at_least("sigma_dot_min_material", min(M.diagnostics(model, s)["sigma_dot_min"] for s in traj), -1e-12))
    for form in (S.TEMPERATURE, S.ENTROPY):
        model, traj, _ = run_tube(128, "spatial", t_end=0.1, form=form)
        worst, tol = _monotone([S.total_entropy(model, s) for s in traj])
        out.append(at_least(f"entropy_nondecreasing_spatial_{form}", worst, tol))
        prod = min(float(np.min(S.entropy_production(model, s))) for s in traj)
        out.append(at_least(f"sigma_dot_min_spatial_{form}", prod, -1e-12))
    return out


# constraints ----------------------------------------------------------------

def thermodynamic_type(seed=0):
    worst = {}
    for name, (model, traj) in discrete_trajectories(dt=1e-2).items():
        worst[name] = max(C.thermodynamic_type_check(model, s).max_abs for s in traj[::10])
        ent = D.to_entropy_form(model, traj[-1])
        worst[name] = max(worst[name], C.thermodynamic_type_check(model, ent).max_abs)
    for solver in ("material", "spatial"):
        model, traj, _ = run_tube(64, solver, t_end=0.05)
        worst[solver] = max(C.thermodynamic_type_check(model, s).max_abs for s in traj)
    return [at_most(f"thermodynamic_type_{k}", v, 1e-13) for k, v in worst.items()]


def constraint_vector_space(seed=0):
    """Random members of C_V stay members under addition and scaling."""
    rng = np.random.default_rng(seed)
    cases = [(m, s) for m, s in discrete_models().values()]
    for solver in ("material", "spatial"):
        model, traj, _ = run_tube(32, solver, t_end=0.01)
        cases.append((model, traj[-1]))
    worst = 0.0
    for model, state in cases:
        members = []
        for _ in range(2):
            if isinstance(model, D.DiscreteModel):
                dq, dG = rng.normal(size=model.n), rng.normal(size=model.N)
            else:
                n = model.grid.n_nodes
                dq, dG = rng.normal(size=n), rng.normal(size=n)
                dq[0] = dq[-1] = 0.0
            dS = C.solve_variation_sigma(model, state, dq, dG)
            members.append(C.VariationTriple(dq, dG, dS))
            worst = max(worst, C.variational_residual(model, state, members[-1]).max_abs)
        combo = members[0].scaled(rng.normal()) + members[1].scaled(rng.normal())
        worst = max(worst, C.variational_residual(model, state, combo).max_abs)
    return [at_most("variational_set_is_linear", worst, 1e-12)]


def _material_fd_rates(traj, k, dt):
    a, b = traj[k - 1], traj[k + 1]

    def d(name):
        return (getattr(b, name) - getattr(a, name)) / (2 * dt)

    return M.MaterialRates(dphi=d("phi"), dV=d("V"), dTtemp=d("Ttemp"), dGamma=d("Gamma"), dSigma=d("Sigma"))


def phenomenological_refinement(nxs=(16, 32, 64), t_end=0.02):
    """Constraint residual of the trajectory with rates from central differences in time."""
    errs = []
    for nx in nxs:
        model, traj, dt = run_tube(nx, "material", t_end=t_end, dt=0.1 / nx / 2.0)
        k = len(traj) // 2
        errs.append(C.phenomenological_residual(model, traj[k], _material_fd_rates(traj, k, dt)).max_abs)
    return fitted_order([1.0 / n for n in nxs], errs), errs


def constraint_refinement(seed=0):
    order, errs = phenomenological_refinement()
    return [at_least("phenomenological_residual_order", order, 1.5, f"errors {', '.join(f'{e:.2e}' for e in errs)}")]


# continuum equivalences -----------------------------------------------------

def formulation_equivalence(seed=0, nx=128, t_end=0.05):
    model, ta, dt = run_tube(nx, "spatial", t_end=t_end, form=S.TEMPERATURE)
    _, tb, _ = run_tube(nx, "spatial", t_end=t_end, dt=dt, form=S.ENTROPY)
    worst = max(max(relative_difference(a.v, b.v), relative_difference(a.rho, b.rho), relative_difference(a.T, b.T))
                for a, b in zip(ta, tb))
    return [at_most("temperature_vs_entropy_form", worst, 1e-6, f"nx={nx}, t_end={t_end}")]


def representation_gap(nx, t_end=0.05):
    mmodel, ms = tube(nx, "material")
    smodel, ss = tube(nx, "spatial")
    dt = min(M.max_stable_dt(mmodel, ms), S.max_stable_dt(smodel, ss))
    steps, dt = _steps_for(t_end, dt)
    mt = M.simulate(mmodel, ms, dt, steps)
    st = S.simulate(smodel, ss, dt, steps)
    worst = 0.0
    for m, s in zip(mt, st):
        mapped = S.material_to_spatial(mmodel, m, smodel.grid)
        worst = max(worst, relative_difference(mapped.v, s.v), relative_difference(mapped.rho, s.rho),
                    relative_difference(mapped.T, s.T))
    return worst


def representation_equivalence(seed=0, nxs=(32, 64, 128)):
    gaps = [representation_gap(nx) for nx in nxs]
    return [
        at_most("material_vs_spatial_nx128", gaps[-1], 5e-4),
        at_least("material_vs_spatial_order", fitted_order([1.0 / n for n in nxs], gaps), 1.5,
                 f"gaps {', '.join(f'{g:.2e}' for g in gaps)}"),
    ]


def specific_entropy_rate(model, state):
    """max |D_t eta| with eta = s / rho, from the temperature-form rates."""
    h = model.grid.h
    r = S.rhs_temperature_form(model, state)
    eos = model.eos
    rho, T = state.rho, state.T
    s = np.asarray(eos.entropy_from_T(rho, T))
    ds = np.asarray(eos.entropy_dT(rho, T)) * r.dtheta + np.asarray(eos.entropy_drho(rho, T)) * r.drho
    eta = s / rho
    deta = (ds - eta * r.drho) / rho
    return float(np.max(np.abs(deta + state.v * S.first_derivative(eta, h))))


REVERSIBLE = dict(mu=0.0, zeta=0.0, kappa_th=0.0)


def reversible_limit(seed=0, nxs=(32, 64, 128), t_end=0.05):
    """Without dissipation the specific entropy is carried along particle paths."""
    spatial, material = [], []
    for nx in nxs:
        model, traj, _ = run_tube(nx, "spatial", t_end=t_end, phen=REVERSIBLE, initial="density")
        spatial.append(max(specific_entropy_rate(model, s) for s in traj))
        model, traj, _ = run_tube(nx, "material", t_end=t_end, phen=REVERSIBLE, initial="density")
        eta = [M.entropy_field(model, s) / model.rho_ref for s in traj]
        material.append(max(float(np.max(np.abs(e - eta[0]))) for e in eta))
        sig = max(float(np.max(np.abs(s.Sigma))) for s in traj)
    hs = [1.0 / n for n in nxs]
    return [
        at_least("spatial_Dt_eta_order", fitted_order(hs, spatial), 1.8,
                 f"max |D_t eta| {', '.join(f'{e:.2e}' for e in spatial)}"),
        at_most("material_eta_drift", max(material), 1e-10, "material specific entropy change"),
        at_most("reversible_sigma", sig, 1e-14, "accumulated entropy production"),
    ]


def mode_amplitude(grid, T):
    """Projection of T onto cos(pi x / L) with trapezoid weights."""
    f = np.cos(np.pi * grid.nodes / grid.length)
    w = grid.weights
    return float(w @ ((T - w @ T / grid.length) * f) / (w @ (f * f)))


def conduction_decay(seed=0, nx=256, kappa=0.01, t_end=2.0):
    """Fourier-mode decay rate against kappa pi^2 / (rho0 Cv L^2)."""
    out = []
    expected = kappa * np.pi ** 2 / (DEFAULT_EOS.rho0 * DEFAULT_EOS.Cv * 1.0 ** 2)
    phen = dict(mu=0.0, zeta=0.0, kappa_th=kappa)
    for solver in ("spatial", "material"):
        model, traj, _ = run_tube(nx, solver, t_end=t_end, phen=phen, initial="thermal", pin_velocity=True,
                                  cfl=0.9)
        T = [s.T if solver == "spatial" else s.Ttemp for s in traj]
        t = np.array([s.t for s in traj])
        amp = np.array([mode_amplitude(model.grid, x) for x in T])
        rate = -np.polyfit(t, np.log(amp), 1)[0]
        out.append(at_most(f"conduction_rate_{solver}", abs(rate - expected) / expected, 0.02,
                           f"rate {rate:.6g} vs {expected:.6g}"))
    return out


# suites ---------------------------------------------------------------------

SUITES = {
    "eos": (eos_duality, coefficient_identity),
    "discrete": (two_cell_relaxation,),
    "constraints": (thermodynamic_type, constraint_vector_space, constraint_refinement),
    "material": (),
    "spatial": (formulation_equivalence, conduction_decay),
    "cross": (representation_equivalence, reversible_limit),
    "laws": (first_law, second_law),
}
TIMED = (eos_duality, two_cell_relaxation)
SUITE_NAMES = ("eos", "discrete", "constraints", "material", "spatial", "cross", "all")


def _material_suite(seed=0):
    model, traj, _ = run_tube(128, "material", t_end=0.1)
    out = [at_most("energy_drift_material_nx128", _drift([M.total_energy(model, s) for s in traj]), 1e-6)]
    out.append(at_most("pressure_identity", M.pressure_identity_residual(model, traj[-1]), 1e-6))
    worst, tol = _monotone([M.total_entropy(model, s) for s in traj])
    out.append(at_least("entropy_nondecreasing_material", worst, tol))
    order, errs = space_order("material")
    out.append(at_least("space_order_material", order, 1.8, f"errors {', '.join(f'{e:.2e}' for e in errs)}"))
    return out


def _discrete_suite_extra(seed=0):
    out = []
    for name, (model, traj) in discrete_trajectories().items():
        out.append(at_most(f"energy_drift_{name}", D.energy_drift(model, traj), 1e-8))
    order, errs = discrete_time_order()
    out.append(at_least("time_order_discrete", order, 3.5, f"errors {', '.join(f'{e:.2e}' for e in errs)}"))
    return out


def _spatial_suite_extra(seed=0):
    model, traj, _ = run_tube(128, "spatial", t_end=0.1)
    out = [at_most("energy_drift_spatial_nx128", _drift([S.total_energy(model, s) for s in traj]), 1e-6)]
    out.append(at_most("heat_equation_rewrite", max(S.heat_equation_rewrite_residual(model, s) for s in traj), 1e-12))
    order, errs = space_order("spatial")
    out.append(at_least("space_order_spatial", order, 1.8, f"errors {', '.join(f'{e:.2e}' for e in errs)}"))
    return out


SUITES["material"] = (_material_suite,)
SUITES["discrete"] = (two_cell_relaxation, _discrete_suite_extra)
SUITES["spatial"] = (formulation_equivalence, conduction_decay, _spatial_suite_extra)


def suite_checks(name):
    if name == "all":
        return tuple(c for key in ("eos", "discrete", "constraints", "spatial", "cross", "laws") for c in SUITES[key])
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; valid: {', '.join(SUITE_NAMES)}")
    return SUITES[name]


def run_suite(name, seed=0, jobs=1):
    """Run every check of a suite; checks are independent and may run in parallel."""
    checks = suite_checks(name)
    if jobs <= 1:
        results = [c(seed=seed) for c in checks]
    else:
        # wall-clock budgets are measured without competing threads
        timed = {c: c(seed=seed) for c in checks if c in TIMED}
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rest = dict(zip([c for c in checks if c not in TIMED],
                            pool.map(lambda c: c(seed=seed), [c for c in checks if c not in TIMED])))
        results = [timed[c] if c in timed else rest[c] for c in checks]
    return [v for r in results for v in r]
