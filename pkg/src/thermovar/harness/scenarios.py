"""
Scenario presets: build a model from a :class:`RunConfig`, run it, write the
CSV outputs and return a :class:`RunReport` with invariant verdicts.
"""

import math
from pathlib import Path

import numpy as np

from .. import constraints as C
from .. import discrete as D
from .. import nsf_material as M
from .. import nsf_spatial as S
from ..discrete_models import make_adiabatic_piston, make_piston, make_two_cells
from ..eos import GasEos
from ..errors import ConfigError
from ..profiles import density_shape, isentropic_pulse
from ..stencils import Grid
from .compare import relative_difference
from .config import SCENARIOS, dump_config
from .output import snapshot_name, write_csv, write_json
from .report import RunReport, at_least, at_most

ENERGY_TOL_DISCRETE = 1e-8
ENERGY_TOL_CONTINUUM = 1e-6
SIGMA_DOT_TOL = 1e-12
TYPE_TOL = 1e-13
CROSS_TOL = 5e-4
STATE_COLUMNS = ("t", "q", "v", "T", "S", "Gamma", "Sigma")


def make_eos(cfg):
    return GasEos(cfg["eos.Cv"], cfg["eos.Cp"], cfg["eos.rho0"], cfg["eos.T0"], cfg["eos.s0"])


def _supply_amplitude(cfg):
    return 0.0 if cfg["supply.profile"] == "none" else cfg["supply.amplitude"]


def _steps(t_end, dt):
    steps = max(1, int(math.ceil(t_end / dt - 1e-9)))
    return steps, t_end / steps


def build_discrete(cfg):
    """Model and initial state of a discrete scenario."""
    eos = make_eos(cfg)
    amp = _supply_amplitude(cfg)
    scen = cfg.scenario
    if scen == "piston":
        return make_piston(eos, piston_mass=cfg["discrete.mass"], area=cfg["discrete.area"],
                           spring=cfg["discrete.spring"], position=cfg["discrete.position"],
                           velocity=cfg["initial.velocity"], friction=cfg["phenomenology.friction"],
                           heat_supply=amp)
    if scen == "two_cells":
        return make_two_cells(heat_capacity=cfg["discrete.heat_capacity"], kappa=cfg["phenomenology.kappa"],
                              T_a=cfg["discrete.T_a"], T_b=cfg["discrete.T_b"], heat_supply=(amp, amp))
    if scen == "adiabatic_piston":
        return make_adiabatic_piston(eos, length=cfg["discrete.length"], area=cfg["discrete.area"],
                                     wall_mass=cfg["discrete.mass"], position=cfg["discrete.position"],
                                     velocity=cfg["initial.velocity"], friction=cfg["phenomenology.friction"],
                                     kappa=cfg["phenomenology.kappa"], pressure_ratio=cfg["discrete.pressure_ratio"],
                                     heat_supply=(amp, amp))
    raise ConfigError(f"{scen!r} is not a discrete scenario", key="scenario")


def _continuum_supply(cfg):
    amp = _supply_amplitude(cfg)
    if amp == 0.0:
        return None
    length = cfg["numerics.length"]
    if cfg["supply.profile"] == "uniform":
        return lambda t, x: np.full(np.shape(x), amp)
    return lambda t, x: amp * density_shape(np.asarray(x), length, "cosine")


def build_material(cfg):
    eos = make_eos(cfg)
    grid = Grid.uniform(cfg["numerics.nx"], cfg["numerics.length"])
    rho, T = isentropic_pulse(grid, eos, cfg["initial.amplitude"], cfg["initial.profile"])
    model = M.MaterialModel(grid, rho, eos, mu=cfg["phenomenology.mu"], zeta=cfg["phenomenology.zeta"],
                            kappa_th=cfg["phenomenology.kappa"], R_supply=_continuum_supply(cfg))
    return model, M.initial_state(model, Ttemp=T)


def build_spatial(cfg):
    eos = make_eos(cfg)
    grid = Grid.uniform(cfg["numerics.nx"], cfg["numerics.length"])
    rho, T = isentropic_pulse(grid, eos, cfg["initial.amplitude"], cfg["initial.profile"])
    phen = S.Phenomenology(mu=cfg["phenomenology.mu"], zeta=cfg["phenomenology.zeta"],
                           kappa_th=cfg["phenomenology.kappa"], r_supply=_continuum_supply(cfg))
    model = S.SpatialModel(grid, eos, phen)
    return model, S.initial_state(model, rho=rho, T=T)


def _entropy_step_tol(S_values):
    return 1e-12 * max(1.0, float(np.max(np.abs(S_values))))


def _monotone_verdict(name, values):
    values = np.asarray(values)
    worst = float(np.min(np.diff(values))) if values.size > 1 else 0.0
    return at_least(name, worst, -_entropy_step_tol(values), "min step-to-step change")


def _drift(values):
    values = np.asarray(values)
    return float(np.max(np.abs(values - values[0])) / abs(values[0]))


# discrete -------------------------------------------------------------------

def run_discrete(cfg, out):
    model, state0 = build_discrete(cfg)
    steps, dt = _steps(cfg["numerics.t_end"], cfg["numerics.dt"])
    traj = D.simulate(model, state0, dt, steps, form=cfg["numerics.form"])
    d = D.diagnostics(model, traj)
    isolated = model.is_isolated(0.0) and model.external_force is None
    ck, cv, ttc = [], [], []
    cols = {"t": d["t"]}
    for i in range(model.n):
        cols[f"q{i}"] = [st.q[i] for st in traj]
        cols[f"v{i}"] = [st.v[i] for st in traj]
    Ts = np.array([D.current_temperatures(model, st) for st in traj])
    Ss = np.array([D.current_entropies(model, st) for st in traj])
    for st in traj:
        r = D.rhs(model, st)
        ck.append(C.phenomenological_residual(model, st, r).max_abs)
        cv.append(C.variational_residual(model, st, C.rate_variation(model, st, r)).max_abs)
        if isolated:
            ttc.append(C.thermodynamic_type_check(model, st).max_abs)
    for A in range(model.N):
        cols[f"T{A}"] = Ts[:, A]
        cols[f"S{A}"] = Ss[:, A]
        cols[f"Gamma{A}"] = [st.Gamma[A] for st in traj]
        cols[f"Sigma{A}"] = [st.Sigma[A] for st in traj]
    for key in ("E", "S_tot", "P_fr", "power_in", "balance_residual", "sigma_dot_min", "production_min"):
        cols[key] = d[key]
    cols["cv_residual_max"] = cv
    cols["ck_residual_max"] = ck
    files = [write_csv(out / "diagnostics.csv", cols),
             write_csv(out / "trajectory.csv", {k: v for k, v in cols.items() if k.rstrip("0123456789") in STATE_COLUMNS})]

    verdicts = [
        at_most("constraint_residual_max", max(ck), 1e-12),
        at_most("energy_balance_residual_max", float(np.max(d["balance_residual"])), 1e-6,
                "finite-differenced dE/dt minus input power"),
    ]
    if isolated:
        verdicts += [
            at_most("energy_drift", _drift(d["E"]), ENERGY_TOL_DISCRETE),
            _monotone_verdict("entropy_nondecreasing", d["S_tot"]),
            at_least("production_min", float(np.min(d["production_min"])), -SIGMA_DOT_TOL),
            at_least("sigma_dot_sum_min", float(np.min(d["sigma_dot_sum"])), -SIGMA_DOT_TOL),
            at_most("thermodynamic_type_identity", max(ttc), TYPE_TOL),
        ]
    orders = {}
    if cfg.scenario == "two_cells":
        verdicts += _two_cell_verdicts(cfg, d["t"], Ts)
    summary = {"dt": dt, "steps": steps, "E_final": float(d["E"][-1]), "S_tot_final": float(d["S_tot"][-1]),
               "isolated": isolated}
    return verdicts, summary, orders, files, cols


def _two_cell_verdicts(cfg, t, Ts):
    C_heat, kappa = cfg["discrete.heat_capacity"], cfg["phenomenology.kappa"]
    gap = Ts[:, 1] - Ts[:, 0]
    gap0 = cfg["discrete.T_b"] - cfg["discrete.T_a"]
    rate_exact = 2 * kappa / C_heat
    out = []
    if gap0 != 0 and kappa > 0 and _supply_amplitude(cfg) == 0:
        slope = np.polyfit(t, np.log(np.abs(gap)), 1)[0]
        out.append(at_most("relaxation_rate_error", abs(-slope - rate_exact), 1e-4,
                           f"fitted {-slope:.10g} vs 2 kappa/C = {rate_exact:.10g}"))
        closed = gap0 * np.exp(-rate_exact * t)
        out.append(at_most("relaxation_closed_form_rel_error", float(np.max(np.abs(gap - closed) / np.abs(closed))), 1e-6))
    return out


# continuum ------------------------------------------------------------------

def _snapshot_due(k, every, steps):
    return every > 0 and (k % every == 0 or k == steps)


def _material_fields(model, st):
    n = model.grid.n_nodes
    return {"t": np.full(n, st.t), "X": model.grid.nodes, "phi": st.phi, "V": st.V, "Ttemp": st.Ttemp,
            "Gamma": st.Gamma, "Sigma": st.Sigma}


def _spatial_fields(model, st):
    n = model.grid.n_nodes
    return {"t": np.full(n, st.t), "x": model.grid.nodes, "v": st.v, "rho": st.rho, "T": st.T,
            "gamma": st.gamma, "sigma": st.sigma}


def _continuum_dt(cfg, bound):
    dt = cfg.get("numerics.dt")
    return bound if dt is None else dt


def run_material(cfg, out, dt=None):
    model, state = build_material(cfg)
    dt = _continuum_dt(cfg, M.max_stable_dt(model, state, cfg["numerics.cfl"])) if dt is None else dt
    steps, dt = _steps(cfg["numerics.t_end"], dt)
    every = cfg["numerics.snapshot_every"]
    pid = M.pressure_identity_residual(model, state)
    isolated = model.is_isolated(0.0)
    rows = {k: [] for k in ("t", "mass", "energy", "entropy", "sigma_dot_min", "cv_residual_max",
                            "ck_residual_max", "heat_input")}
    traj = M.simulate(model, state, dt, steps, scenario=cfg.scenario, cfl=cfg["numerics.cfl"])
    ttc, files, heat_acc = [], [], 0.0
    heat = [M.heat_input_rate(model, st) for st in traj]
    for k, state in enumerate(traj):
        if k > 0:
            heat_acc += 0.5 * dt * (heat[k - 1] + heat[k])
        diag = M.diagnostics(model, state)
        r = M.rhs(model, state)
        for key in ("mass", "energy", "entropy", "sigma_dot_min", "ck_residual_max"):
            rows[key].append(diag[key])
        rows["t"].append(state.t)
        rows["cv_residual_max"].append(C.variational_residual(model, state, C.rate_variation(model, state, r)).max_abs)
        rows["heat_input"].append(heat_acc)
        if isolated:
            ttc.append(C.thermodynamic_type_check(model, state).max_abs)
        if _snapshot_due(k, every, steps):
            files.append(write_csv(out / snapshot_name(k), _material_fields(model, state)))
    files.insert(0, write_csv(out / "diagnostics.csv", rows))
    files.append(write_csv(out / "final.csv", _material_fields(model, state)))
    energy = np.array(rows["energy"])
    verdicts = [
        at_most("mass_drift", _drift(rows["mass"]), 1e-14),
        at_most("pressure_identity", pid, 1e-6),
        at_most("constraint_residual_max", max(rows["ck_residual_max"]), 1e-12),
    ]
    if isolated:
        verdicts += [
            at_most("energy_drift", _drift(energy), ENERGY_TOL_CONTINUUM),
            _monotone_verdict("entropy_nondecreasing", rows["entropy"]),
            at_least("sigma_dot_min", min(rows["sigma_dot_min"]), -SIGMA_DOT_TOL),
            at_most("thermodynamic_type_identity", max(ttc), TYPE_TOL),
        ]
    else:
        balance = np.abs(energy - energy[0] - np.array(rows["heat_input"]))
        verdicts.append(at_most("energy_balance_rel", float(np.max(balance) / abs(energy[0])), 1e-6,
                                "E(t) - E(0) - integrated heat input"))
    summary = {"dt": dt, "steps": steps, "energy_final": float(energy[-1]), "entropy_final": rows["entropy"][-1],
               "isolated": isolated}
    return verdicts, summary, {}, files, rows, (model, traj)


def run_spatial(cfg, out, dt=None):
    model, state = build_spatial(cfg)
    form = cfg["numerics.form"]
    dt = _continuum_dt(cfg, S.max_stable_dt(model, state, cfg["numerics.cfl"])) if dt is None else dt
    steps, dt = _steps(cfg["numerics.t_end"], dt)
    every = cfg["numerics.snapshot_every"]
    isolated = model.is_isolated(0.0)
    rows = {k: [] for k in ("t", "mass", "energy", "entropy", "prod_min", "cv_residual_max", "ck_residual_max")}
    traj = S.simulate(model, state, dt, steps, form=form, scenario=cfg.scenario, cfl=cfg["numerics.cfl"])
    ttc, rewrite, files = [], [], []
    for k, state in enumerate(traj):
        diag = S.diagnostics(model, state)
        rows["t"].append(state.t)
        for key in ("mass", "energy", "entropy", "prod_min", "cv_residual_max", "ck_residual_max"):
            rows[key].append(diag[key])
        rewrite.append(S.heat_equation_rewrite_residual(model, state))
        if isolated:
            ttc.append(C.thermodynamic_type_check(model, state).max_abs)
        if _snapshot_due(k, every, steps):
            files.append(write_csv(out / snapshot_name(k), _spatial_fields(model, state)))
    files.insert(0, write_csv(out / "diagnostics.csv", rows))
    files.append(write_csv(out / "final.csv", _spatial_fields(model, state)))
    verdicts = [
        at_most("mass_drift", _drift(rows["mass"]), 1e-10),
        at_most("heat_equation_rewrite", max(rewrite), 1e-12),
        at_most("constraint_residual_max", max(rows["ck_residual_max"]), 1e-12),
        at_least("prod_min", min(rows["prod_min"]), -SIGMA_DOT_TOL),
    ]
    if isolated:
        verdicts += [
            at_most("energy_drift", _drift(rows["energy"]), ENERGY_TOL_CONTINUUM),
            _monotone_verdict("entropy_nondecreasing", rows["entropy"]),
            at_most("thermodynamic_type_identity", max(ttc), TYPE_TOL),
        ]
    else:
        heat = [float(model.grid.weights @ (st.rho * model.supply(st.t))) for st in traj]
        acc = np.concatenate([[0.0], np.cumsum(0.5 * dt * (np.array(heat[1:]) + np.array(heat[:-1])))])
        energy = np.array(rows["energy"])
        balance = np.abs(energy - energy[0] - acc)
        verdicts.append(at_most("energy_balance_rel", float(np.max(balance) / abs(energy[0])), 1e-6,
                                "E(t) - E(0) - integrated heat input"))
    summary = {"dt": dt, "steps": steps, "form": form, "energy_final": rows["energy"][-1],
               "entropy_final": rows["entropy"][-1], "isolated": isolated}
    return verdicts, summary, {}, files, rows, (model, traj)


def run_cross(cfg, out):
    mmodel, ms = build_material(cfg)
    smodel, ss = build_spatial(cfg)
    cfl = cfg["numerics.cfl"]
    dt = _continuum_dt(cfg, min(M.max_stable_dt(mmodel, ms, cfl), S.max_stable_dt(smodel, ss, cfl)))
    mv, msum, _, mfiles, _, (mmodel, mtraj) = run_material(cfg, out / "material", dt=dt)
    sv, ssum, _, sfiles, _, (smodel, straj) = run_spatial(cfg, out / "spatial", dt=dt)
    rows = {"t": [], "v_rel": [], "rho_rel": [], "T_rel": [], "max_rel": []}
    for m, s in zip(mtraj, straj):
        mapped = S.material_to_spatial(mmodel, m, smodel.grid)
        dv = relative_difference(mapped.v, s.v)
        drho = relative_difference(mapped.rho, s.rho)
        dT = relative_difference(mapped.T, s.T)
        rows["t"].append(s.t)
        rows["v_rel"].append(dv)
        rows["rho_rel"].append(drho)
        rows["T_rel"].append(dT)
        rows["max_rel"].append(max(dv, drho, dT))
    files = [write_csv(out / "cross.csv", rows)] + mfiles + sfiles
    verdicts = [at_most("cross_representation_max_rel", max(rows["max_rel"]), CROSS_TOL)]
    verdicts += [type(v)(f"material.{v.name}", v.measured, v.tolerance, v.relation, v.detail) for v in mv]
    verdicts += [type(v)(f"spatial.{v.name}", v.measured, v.tolerance, v.relation, v.detail) for v in sv]
    summary = {"dt": msum["dt"], "steps": msum["steps"], "max_rel_final": rows["max_rel"][-1],
               "material": msum, "spatial": ssum}
    return verdicts, summary, {}, files, rows


def run_scenario(cfg, out=None):
    """Run the configured scenario, write its outputs and return a :class:`RunReport`."""
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {cfg.scenario!r}; valid identifiers: {', '.join(SCENARIOS)}",
                          key="scenario")
    out = Path(cfg["output"] if out is None else out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.is_discrete:
        verdicts, summary, orders, files, series = run_discrete(cfg, out)
    elif cfg.scenario == "gas_tube_material":
        verdicts, summary, orders, files, series, _ = run_material(cfg, out)
    elif cfg.scenario == "gas_tube_spatial":
        verdicts, summary, orders, files, series, _ = run_spatial(cfg, out)
    else:
        verdicts, summary, orders, files, series = run_cross(cfg, out)
    (out / "config.resolved").write_text(dump_config(cfg))
    report = RunReport(
        scenario=cfg.scenario,
        config=dict(cfg.values),
        verdicts=verdicts,
        series={k: np.asarray(v) for k, v in series.items()},
        summary=summary,
        orders=orders,
        files=[str(Path(f).relative_to(out)) for f in files],
    )
    write_json(out / "report.json", report.as_dict())
    return report
