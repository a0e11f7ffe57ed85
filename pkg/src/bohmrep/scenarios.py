"""End-to-end scenarios: each returns named checks, a numeric summary and tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import algebra as alg
from . import gauge
from .config import ScenarioConfig
from .currents import (
    beable_force_mismatch,
    continuity_residual,
    cubic_current_report,
    current_p,
    current_x,
    energy_from_phase,
    phase_equation_residual,
    phase_time_derivative,
    quantum_potential,
)
from .grids import (
    Grid1D,
    WaveField,
    local_beable,
    polar_decompose,
    polar_series,
    to_conjugate,
    uncertainty,
)
from .propagator import (
    PotentialSpec,
    airy_components,
    airy_identity_residual,
    airy_scale,
    airy_stationary,
    analytic_gaussian,
    coherent_state,
    expectation_energy,
    gaussian_quantum_potential,
    gaussian_velocity,
    gaussian_width,
    harmonic_ground,
    interior_bounds,
    l2_distance,
    sample_indices,
    second_derivative_residual,
    split_step_evolve,
)
from .trajectories import (
    VelocityField,
    equivariance_error,
    integrate,
    quantile_seeds,
    sample_along,
    velocity_field,
)


@dataclass
class Check:
    value: float
    tolerance: float
    relation: str = "<="

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.relation == "<=":
            return self.value <= self.tolerance
        return self.value >= self.tolerance

    def as_dict(self) -> dict:
        return {"value": self.value, "tolerance": self.tolerance, "relation": self.relation, "passed": self.passed}


@dataclass
class ScenarioResult:
    checks: dict[str, Check] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    tables: dict[str, tuple[list[str], np.ndarray]] = field(default_factory=dict)

    def le(self, name: str, value, tol: float) -> None:
        self.checks[name] = Check(float(value), tol, "<=")

    def ge(self, name: str, value, tol: float) -> None:
        self.checks[name] = Check(float(value), tol, ">=")

    def flag(self, name: str, ok: bool) -> None:
        self.checks[name] = Check(1.0 if ok else 0.0, 1.0, ">=")

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, c in self.checks.items() if not c.passed]


def _nanmax_abs(a) -> float:
    a = np.abs(np.asarray(a, dtype=float))
    return float(np.nanmax(a)) if np.isfinite(a).any() else float("nan")


def _weighted_rms(values, density, grid: Grid1D) -> float:
    """``sqrt(int P f^2 / int P)``; samples where ``f`` is NaN carry no weight."""
    values = np.asarray(values, dtype=float)
    w = np.where(np.isfinite(values), density, 0.0)
    return float(np.sqrt(grid.integrate(w * np.nan_to_num(values) ** 2) / grid.integrate(w)))


def _bulk_max(values, psi, level: float = 1e-2) -> float:
    """Pointwise max of ``|f|`` where ``|psi| >= level * max |psi|``."""
    R = np.abs(psi)
    return _nanmax_abs(np.asarray(values)[R >= level * R.max()])


def _trajectory_table(bundle, limit: int = 16) -> tuple[list[str], np.ndarray]:
    pick = np.unique(np.linspace(0, bundle.seeds.size - 1, min(limit, bundle.seeds.size)).round().astype(int))
    header = ["time [T]"] + [f"q_{i} [L]" for i in pick]
    return header, np.column_stack([bundle.times, bundle.paths[pick].T])


def _field_table(grid: Grid1D, columns: dict[str, np.ndarray]) -> tuple[list[str], np.ndarray]:
    header = [f"{'x' if grid.kind == 'position' else 'p'} [{'L' if grid.kind == 'position' else '1/L'}]"]
    header += list(columns)
    return header, np.column_stack([grid.points] + [np.asarray(v, dtype=float) for v in columns.values()])


# -- free Gaussian ------------------------------------------------------------


def run_free_gaussian(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    m, dx = cfg.physics["m"], cfg.physics["delta_x"]
    grid = Grid1D.centered(cfg.grid["n_points"], cfg.grid["extent"])
    dt, T = cfg.time["dt"], cfg.time["t_final"]
    pot = PotentialSpec.free(m)
    evo = split_step_evolve(analytic_gaussian("position", dx, m, 0.0, grid), pot, dt, int(round(T / dt)))
    field_x = evo.field
    idx = sample_indices(len(field_x), 5)
    ts = field_x.times[idx]
    ref = analytic_gaussian("position", dx, m, ts, grid)
    res.le("evolution_vs_analytic_l2", max(l2_distance(field_x[i], ref[k], grid) for k, i in enumerate(idx)), 1e-6)
    res.le("norm_drift", evo.max_norm_drift, 1e-9)
    res.summary["sample_times"] = ts.tolist()
    res.summary["warnings"] = evo.warnings

    if cfg.wants_position:
        errs, errs_evolved = [], []
        for k, i in enumerate(idx):
            closed = gaussian_quantum_potential(grid.points, dx, m, ts[k])
            for target, src in ((errs, ref[k]), (errs_evolved, field_x[i])):
                Q = quantum_potential(polar_decompose(src, grid), pot)
                ok = ~Q.mask
                target.append(np.linalg.norm((Q.values - closed)[ok]) / np.linalg.norm(closed[ok]))
        res.le("qx_relative_l2", max(errs), 1e-6)
        res.summary["qx_relative_l2_evolved"] = max(errs_evolved)

        cur = current_x(field_x, m)
        jerr = max(
            _nanmax_abs(cur.j[i] - np.abs(ref[k]) ** 2 * gaussian_velocity(grid.points, dx, m, ts[k]))
            for k, i in enumerate(idx)
        )
        res.le("jx_closed_form", jerr, 1e-10)
        res.le("continuity_residual_x", np.max(continuity_residual(field_x.density(), cur)), 1e-5)
        pol = polar_series(field_x)
        res.le("phase_residual_x", np.max(phase_equation_residual(pol, pot)), 1e-5)

        vf = velocity_field(cur, field_x.density())
        span = cfg.seeds["span"]
        seeds = np.linspace(-span, span, 12)
        bundle = integrate(vf, seeds, 2 * dt)
        closed = seeds[:, None] * np.sqrt(gaussian_width(dx, m, bundle.times) / dx**2)
        res.le("trajectory_vs_closed_form", _nanmax_abs(bundle.paths - closed), 1e-5)
        spread = np.diff(np.abs(bundle.paths), axis=1)
        res.le("trajectory_fan_out_violation", max(0.0, -float(np.nanmin(spread))), 0.0)
        res.flag("trajectories_ordered", bundle.ordered())
        res.tables["trajectories_x"] = _trajectory_table(bundle)

        qseeds = quantile_seeds(field_x.density()[0], grid, cfg.seeds["count"])
        ens = integrate(vf, qseeds, 2 * dt)
        res.le("equivariance_rms", equivariance_error(ens.paths[:, -1], field_x.density()[-1], grid), 0.02)
        res.flag("ensemble_ordered", ens.ordered())
        res.summary["terminated_seeds"] = int(ens.terminated.sum())
        Qf = quantum_potential(polar_decompose(field_x[-1], grid), pot)
        res.tables["fields_x_final"] = _field_table(
            grid, {"density [1/L]": field_x.density()[-1], "j_x [1/T]": cur.j[-1], "Q_x [E]": Qf.values}
        )

    if cfg.wants_momentum:
        phi = to_conjugate(field_x)
        pgrid = phi.grid
        jp = current_p(phi, pot)
        res.le("jp_max", np.max(np.abs(jp.j)), 1e-12)
        qp = max(_nanmax_abs(quantum_potential(polar_decompose(phi[i], pgrid), pot).values) for i in idx)
        res.le("qp_max", qp, 1e-10)
        res.le("phase_residual_p", np.max(phase_equation_residual(polar_series(phi), pot)), 1e-5)
        xr = local_beable(phi.amplitudes, pgrid)
        expected = pgrid.points[None, :] * phi.times[:, None] / m
        dens = phi.density()
        res.le("xr_linear_in_p_weighted", max(_weighted_rms((xr - expected)[k], dens[k], pgrid) for k in range(len(phi))), 1e-8)
        res.le("xr_linear_in_p", _nanmax_abs(xr - expected), 1e-6)
        vfp = velocity_field(jp, phi.density())
        pseeds = quantile_seeds(phi.density()[0], pgrid, 32)
        pb = integrate(vfp, pseeds, 2 * dt)
        res.le("p_trajectories_constant", _nanmax_abs(pb.paths - pseeds[:, None]), 1e-12)
        xr_path = sample_along(xr, vfp, pb)
        res.le("p_shadow_straight_lines", _nanmax_abs(xr_path - pseeds[:, None] * pb.times[None, :] / m), 1e-6)
    return res


# -- harmonic -------------------------------------------------------------------


def _stationary_series(m, K, grid, times) -> WaveField:
    return WaveField(grid, times, np.array([harmonic_ground(m, K, grid, t).psi for t in times]))


def run_harmonic(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    P = cfg.physics
    m, K = P["m"], P["K"]
    omega = math.sqrt(K / m)
    pot = PotentialSpec.harmonic(K, m)
    grid = Grid1D.centered(cfg.grid["n_points"], cfg.grid["extent"])
    pgrid = grid.conjugate()
    dt, T = cfg.time["dt"], cfg.time["t_final"]
    E0 = 0.5 * omega
    res.summary["omega"] = omega

    times_a = np.linspace(0.0, 1.0, 5)
    series = {}
    if cfg.wants_position:
        series["x"] = _stationary_series(m, K, grid, times_a)
    if cfg.wants_momentum:
        series["p"] = _stationary_series(m, K, pgrid, times_a)
        res.le("ground_p_matches_transform", np.max(np.abs(to_conjugate(_stationary_series(m, K, grid, times_a)).amplitudes - series["p"].amplitudes)), 1e-8)
    ground0 = harmonic_ground(m, K, grid)
    evo = split_step_evolve(ground0, pot, dt, int(round(1.0 / dt)), save_every=max(1, int(round(0.25 / dt))))
    evolved = {"x": evo.field, "p": to_conjugate(evo.field)}
    energies = {}
    for rep, fld in series.items():
        pol = polar_series(fld)
        E = energy_from_phase(pol)
        energies[f"{rep}_analytic"] = E.mean
        res.le(f"energy_{rep}_analytic", abs(E.mean - E0), 1e-6)
        res.le(f"energy_{rep}_uniformity", E.std / E0, 1e-6)
        res.le(f"phase_residual_ground_{rep}", np.max(phase_equation_residual(pol, pot)), 1e-6)
        E2 = energy_from_phase(polar_series(evolved[rep]), stationarity_tol=1e-5)
        energies[f"{rep}_evolved"] = E2.mean
        res.le(f"energy_{rep}_evolved", abs(E2.mean - E0), 1e-4)
    res.summary["energies"] = energies
    res.le("expectation_energy", abs(expectation_energy(ground0.psi, grid, pot) - E0), 1e-6)
    sx, sp = uncertainty(ground0.psi, grid)
    res.le("uncertainty_product", abs(sx * sp - 0.5), 1e-8)
    if cfg.wants_position:
        pr0 = local_beable(ground0.psi, grid)
        res.le("ground_state_p_r_zero_weighted", _weighted_rms(pr0, np.abs(ground0.psi) ** 2, grid), 1e-10)
        res.summary["ground_state_p_r_bulk_max"] = _bulk_max(pr0, ground0.psi)

    n = int(round(T / dt))
    coh = split_step_evolve(coherent_state(m, K, P["x0"], P["p0"], grid), pot, dt, n)
    res.le("norm_drift", coh.max_norm_drift, 1e-9)
    idx = sample_indices(len(coh.field), 5)
    sub = WaveField(grid, coh.field.times[idx], coh.field.amplitudes[idx])
    if cfg.wants_position:
        jo = current_x(sub, m)
        jc = current_x(sub, m, method="polar")
        res.le("jx_closed_vs_operator", _nanmax_abs(jc.j - jo.j), 1e-8)
    phi = to_conjugate(coh.field)
    if cfg.wants_momentum:
        phis = to_conjugate(sub)
        po = current_p(phis, pot)
        pc = current_p(phis, pot, method="closed")
        res.le("jp_closed_vs_operator", _nanmax_abs(pc.j - po.j), 1e-8)
        jp = current_p(phi, pot)
        res.le("continuity_residual_p", np.max(continuity_residual(phi.density(), jp)), 1e-4)
        vfp = velocity_field(jp, phi.density())
        xr = local_beable(phi.amplitudes, pgrid)
        pb = integrate(vfp, quantile_seeds(phi.density()[0], pgrid, 200), 2 * dt, beable=xr)
        # fourth-order difference of the integrated paths, independent of the field sampling
        h = pb.times[1] - pb.times[0]
        path = pb.paths
        dpdt = (-path[:, 4:] + 8 * path[:, 3:-1] - 8 * path[:, 1:-3] + path[:, :-4]) / (12 * h)
        res.le("dpdt_vs_force_at_beable", _nanmax_abs(dpdt - pot.force(pb.beable_paths[:, 2:-2])), 1e-6)
        res.le("beable_force_mismatch_field", max(beable_force_mismatch(phi[i], pot, pgrid) for i in idx), 1e-6)
        res.flag("p_trajectories_ordered", pb.ordered())
        res.tables["trajectories_p"] = _trajectory_table(pb)

    if cfg.wants_position:
        sigma = P["squeeze"] / math.sqrt(2.0 * m * omega)
        x = grid.points
        psq = (2 * np.pi * sigma**2) ** -0.25 * np.exp(-((x - P["x0"]) ** 2) / (4 * sigma**2))
        sq = split_step_evolve(WaveField(grid, [0.0], psq), pot, dt, n)
        cur = current_x(sq.field, m)
        vf = velocity_field(cur, sq.field.density())
        ens = integrate(vf, quantile_seeds(sq.field.density()[0], grid, cfg.seeds["count"]), 2 * dt)
        res.le("equivariance_rms", equivariance_error(ens.paths[:, -1], sq.field.density()[-1], grid), 0.02)
        res.flag("trajectories_ordered", ens.ordered())
        res.summary["terminated_seeds"] = int(ens.terminated.sum())
        res.tables["trajectories_x"] = _trajectory_table(ens)
        # the squeezed packet breathes at 2w, so second-order time differencing dominates
        res.le("continuity_residual_x", np.max(continuity_residual(sq.field.density(), cur)), 1e-3)

    if cfg.representation == "both":
        _classical_limit(res, cfg, m, K, grid, pot)
    return res


def _classical_limit(res: ScenarioResult, cfg, m, K, grid, pot) -> None:
    """Large-action coherent packet: small quantum potential, coinciding shadow phase spaces."""
    omega = math.sqrt(K / m)
    xc = cfg.physics["classical_x0"]
    sigma = 1.0 / math.sqrt(2.0 * m * omega)
    psi0 = coherent_state(m, K, xc, 0.0, grid)
    x = grid.points
    Q = quantum_potential(polar_decompose(psi0.psi, grid), pot).values
    win = np.abs(x - xc) <= sigma
    ratio = np.ptp(Q[win]) / np.ptp(pot(x[win]))
    res.le("classical_limit_q_over_v", ratio, 0.01)

    dt = cfg.time["dt"]
    T = 2.0 * math.pi / omega
    evo = split_step_evolve(psi0, pot, dt, int(round(T / dt)), save_every=2)
    fx = evo.field
    fp = to_conjugate(fx)
    vx = velocity_field(current_x(fx, m), fx.density())
    vp = velocity_field(current_p(fp, pot), fp.density())
    pr = local_beable(fx.amplitudes, grid)
    xr = local_beable(fp.amplitudes, fp.grid)
    bx = integrate(vx, quantile_seeds(fx.density()[0], grid, 64), 2 * dt * 2, beable=pr)
    bp = integrate(vp, quantile_seeds(fp.density()[0], fp.grid, 64), 2 * dt * 2, beable=xr)
    s = math.sqrt(m * omega)
    cx = np.nanmean(bx.paths, axis=0) * s, np.nanmean(bx.beable_paths, axis=0) / s
    cp = np.nanmean(bp.beable_paths, axis=0) * s, np.nanmean(bp.paths, axis=0) / s
    dist = np.hypot(cx[0] - cp[0], cx[1] - cp[1])
    radius = np.sqrt(np.mean(cx[0] ** 2 + cx[1] ** 2))
    res.le("shadow_phase_space_rms", float(np.sqrt(np.mean(dist**2)) / radius), 0.02)
    res.tables["shadow_phase_space"] = (
        ["time [T]", "x_from_x [L]", "p_r_from_x [1/L]", "x_r_from_p [L]", "p_from_p [1/L]"],
        np.column_stack([bx.times, cx[0] / s, cx[1] * s, cp[0] / s, cp[1] * s]),
    )


# -- linear ---------------------------------------------------------------------


def run_linear(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    P, G = cfg.physics, cfg.grid
    m, a = P["m"], P["a"]
    pot = PotentialSpec.linear(a, m)
    dt, T = cfg.time["dt"], cfg.time["t_final"]
    grid = Grid1D.centered(G["n_points"], G["extent"])
    psi0 = analytic_gaussian("position", P["delta_x"], m, 0.0, grid).psi * np.exp(1j * P["p0"] * grid.points)
    evo = split_step_evolve(WaveField(grid, [0.0], psi0), pot, dt, int(round(T / dt)))
    res.le("norm_drift", evo.max_norm_drift, 1e-9)
    E = [expectation_energy(evo.field[i], grid, pot) for i in (0, len(evo.field) - 1)]
    res.le("energy_drift_relative", abs(E[1] - E[0]) / max(abs(E[0]), 1e-300), 1e-6)
    res.summary["warnings"] = evo.warnings

    if cfg.wants_momentum:
        phi = to_conjugate(evo.field)
        pgrid = phi.grid
        jp = current_p(phi, pot)
        res.le("jp_vs_minus_aP", np.max(np.abs(jp.j + a * phi.density())), 1e-10)
        vfp = velocity_field(jp, phi.density())
        res.le("velocity_minus_a", _nanmax_abs(vfp.v + a), 1e-12)
        seeds = quantile_seeds(phi.density()[0], pgrid, cfg.seeds["count"])
        pb = integrate(vfp, seeds, dt)
        res.le("p_trajectory_vs_p0_minus_at", _nanmax_abs(pb.paths - (seeds[:, None] - a * pb.times[None, :])), 1e-12)
        res.le("p_trajectories_terminated", int(pb.terminated.sum()), 0)
        # both residuals are limited by second-order time differencing at dt
        res.le("phase_residual_p", np.max(phase_equation_residual(polar_series(phi), pot)), 1e-4)
        res.le("continuity_residual_p", np.max(continuity_residual(phi.density(), jp)), 1e-3)
        res.le("beable_force_mismatch", max(beable_force_mismatch(phi[i], pot, pgrid) for i in sample_indices(len(phi), 5)), 1e-6)
        res.tables["trajectories_p"] = _trajectory_table(pb)

    if cfg.wants_position:
        ag = Grid1D.spanning(G["airy_n_points"], G["airy_start"], G["airy_stop"])
        airy = airy_stationary(a, m, ag, taper=G["airy_taper"])
        x = ag.points
        lo, hi = interior_bounds(ag, G["airy_taper"])
        region = (x >= lo) & (x <= hi)
        res.le("airy_jx_max", np.max(np.abs(current_x(airy.psi, m, ag).j)), 1e-10)
        Q = quantum_potential(polar_decompose(airy.psi, ag), pot)
        ok = region & ~Q.mask
        res.le("airy_q_vs_minus_ax_linf_rel", np.max(np.abs(Q.values + a * x)[ok]) / np.max(np.abs(a * x[ok])), 1e-4)
        res.le("airy_ode_residual", second_derivative_residual(airy.psi, ag, airy_scale(a, m), region), 1e-6)
        res.le("airy_identity_relative", airy_identity_residual(a, m, x[region]), 1e-8)

        comps = airy_components(a, m, x[region])
        currents = {}
        for name in ("incident", "reflected"):
            j = np.imag(np.conj(comps[name]) * comps[name + "_prime"]) / m
            currents[name] = j
            res.ge(f"{name}_current_magnitude", np.min(np.abs(j)), 1e-6)
            res.le(f"{name}_current_variation", np.ptp(j) / np.mean(np.abs(j)), 1e-8)
        res.le("incident_plus_reflected_current", np.max(np.abs(currents["incident"] + currents["reflected"])) / np.mean(np.abs(currents["incident"])), 1e-8)
        res.summary["component_currents"] = {k: float(np.mean(v)) for k, v in currents.items()}
        # component trajectories, starting well inside the oscillatory region
        trajs = {}
        for name, j in currents.items():
            v = np.full(ag.n_points, np.nan)
            v[region] = j / np.abs(comps[name]) ** 2
            vf = VelocityField.constant_in_time(ag, np.nan_to_num(v), 0.0, 2.0, mask=~region)
            b = integrate(vf, np.linspace(lo + 2.0, -4.0, 8), 0.01)
            trajs[name] = b
        res.flag("incident_moves_toward_wall", bool(np.all(np.diff(trajs["incident"].paths, axis=1)[np.isfinite(np.diff(trajs["incident"].paths, axis=1))] > 0)))
        res.flag("reflected_moves_away", bool(np.all(np.diff(trajs["reflected"].paths, axis=1)[np.isfinite(np.diff(trajs["reflected"].paths, axis=1))] < 0)))
        res.tables["airy_fields"] = _field_table(
            ag,
            {
                "psi [1/sqrt(L)]": airy.psi.real,
                "Q_x [E]": Q.values,
                "minus_a_x [E]": -a * x,
            },
        )
    return res


# -- cubic ---------------------------------------------------------------------


def run_cubic(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    P = cfg.physics
    m, A = P["m"], P["A"]
    pot = PotentialSpec.cubic(A, m)
    grid = Grid1D.centered(cfg.grid["n_points"], cfg.grid["extent"])
    dt, T = cfg.time["dt"], cfg.time["t_final"]
    res.summary["dt_times_max_v"] = float(dt * np.max(np.abs(pot(grid.points))))
    evo = split_step_evolve(analytic_gaussian("position", P["delta_x"], m, 0.0, grid), pot, dt, int(round(T / dt)))
    res.summary["warnings"] = evo.warnings
    res.flag("no_boundary_contamination", not evo.warnings)
    res.le("norm_drift", evo.max_norm_drift, 1e-9)
    fx = evo.field
    if cfg.wants_position:
        res.le("phase_residual_x", np.max(phase_equation_residual(polar_series(fx), pot)), 1e-4)
        res.le("continuity_residual_x", np.max(continuity_residual(fx.density(), current_x(fx, m))), 1e-5)
    if cfg.wants_momentum:
        fp = to_conjugate(fx)
        res.le("phase_residual_p", np.max(phase_equation_residual(polar_series(fp), pot)), 1e-3)
        jp = current_p(fp, pot)
        res.le("continuity_residual_p", np.max(continuity_residual(fp.density(), jp)), 1e-4)
        idx = sample_indices(len(fp), 5)
        closed = current_p(WaveField(fp.grid, fp.times[idx], fp.amplitudes[idx]), pot, method="closed")
        res.le("jp_polar_vs_operator", _nanmax_abs(np.where(closed.mask, 0.0, closed.j - jp.j[idx])), 1e-8)
        res.summary["printed_jp_comparison"] = cubic_current_report(fp[-1], A, fp.grid)
    return res


# -- gauge -----------------------------------------------------------------------


def run_gauge_ab_scalar(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    P = cfg.physics
    V0, t0, t1 = P["V0"], P["t0"], P["t1"]
    phase = gauge.ab_scalar_phase(V0, t0, t1)
    res.le("scalar_phase_constant", abs(phase - V0 * (t1 - t0)), 1e-10)
    res.le("scalar_phase_quadrature", abs(gauge.ab_scalar_phase(lambda t: V0, t0, t1) - V0 * (t1 - t0)), 1e-10)
    res.le("scalar_phase_sine", abs(gauge.ab_scalar_phase(np.sin, 0.0, math.pi) - 2.0), 1e-10)
    Vt = lambda t: V0 * (1.0 + 0.5 * math.sin(3.0 * t))
    whole = gauge.ab_scalar_phase(Vt, t0, t1)
    parts = gauge.ab_scalar_phase(Vt, t0, P["split"]) + gauge.ab_scalar_phase(Vt, P["split"], t1)
    res.le("scalar_phase_additivity", abs(whole - parts), 1e-12)
    res.summary["scalar_phase"] = phase
    res.summary["scalar_phase_wrapped"] = list(gauge.wrap_phase(phase))

    m, K = P["m"], P["K"]
    grid = Grid1D.centered(cfg.grid["n_points"], cfg.grid["extent"])
    dt, T = cfg.time["dt"], cfg.time["t_final"]
    pot = PotentialSpec.harmonic(K, m)
    psi0 = coherent_state(m, K, P["x0"], 0.0, grid)
    n = int(round(T / dt))
    plain = split_step_evolve(psi0, pot, dt, n).field
    shifted = split_step_evolve(psi0, pot.shifted(V0), dt, n).field
    res.le("gauge_density", np.max(np.abs(plain.density() - shifted.density())), 1e-10)
    j0, j1 = current_x(plain, m), current_x(shifted, m)
    res.le("gauge_current", np.max(np.abs(j0.j - j1.j)), 1e-10)
    idx = sample_indices(len(plain), 5)
    qdiff, qbulk = 0.0, 0.0
    for i in idx:
        q0 = quantum_potential(polar_decompose(plain[i], grid), pot)
        q1 = quantum_potential(polar_decompose(shifted[i], grid), pot.shifted(V0))
        d = np.where(q0.mask | q1.mask, 0.0, q0.values - q1.values)
        qdiff = max(qdiff, _weighted_rms(d, plain.density()[i], grid))
        qbulk = max(qbulk, _bulk_max(d, plain[i]))
    res.le("gauge_quantum_potential_weighted", qdiff, 1e-10)
    res.summary["gauge_quantum_potential_bulk_max"] = qbulk
    seeds = quantile_seeds(plain.density()[0], grid, cfg.seeds["count"])
    b0 = integrate(velocity_field(j0, plain.density()), seeds, 2 * dt)
    b1 = integrate(velocity_field(j1, shifted.density()), seeds, 2 * dt)
    res.le("gauge_trajectories", _nanmax_abs(b0.paths - b1.paths), 1e-10)
    s0 = phase_time_derivative(plain.amplitudes, plain.times)
    s1 = phase_time_derivative(shifted.amplitudes, shifted.times)
    shift = s1 - s0 + V0
    inner = plain.amplitudes[1:-1]
    res.le("gauge_dSdt_shift_weighted",
           max(_weighted_rms(shift[k], np.abs(inner[k]) ** 2, grid) for k in range(len(inner))), 1e-10)
    res.summary["gauge_dSdt_shift_bulk_max"] = max(_bulk_max(shift[k], inner[k]) for k in range(len(inner)))
    return res


def run_gauge_ab_vector(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    P = cfg.physics
    flux, e, r0, R, n = P["flux"], P["charge"], P["core_radius"], P["radius"], P["samples"]
    A_ideal = gauge.flux_line(flux)
    loops = {
        "circle": gauge.PathSpec.circle(R, n),
        "ellipse": gauge.PathSpec.ellipse(2.0 * R, 0.6 * R, n + 1, center=(0.2 * R, -0.1 * R)),
        "square": gauge.PathSpec.polygon([[-R, -R], [1.5 * R, -R], [1.5 * R, R], [-R, R]]),
    }
    values = {}
    for name, loop in loops.items():
        values[name] = gauge.ab_vector_phase(A_ideal, e, loop)
        res.le(f"ab_loop_{name}", abs(values[name] - e * flux), 1e-8)
    res.le("ab_loop_shape_independence", max(values.values()) - min(values.values()), 1e-8)
    rev = gauge.ab_vector_phase(A_ideal, e, gauge.PathSpec.circle(R, n, reverse=True))
    res.le("ab_reverse_negates", abs(rev + values["circle"]), 1e-12)
    outside = gauge.PathSpec.circle(0.5 * R, n, center=(3.0 * R, 0.0))
    res.le("ab_loop_not_enclosing", abs(gauge.ab_vector_phase(A_ideal, e, outside)), 1e-8)
    line = gauge.PathSpec.segment([0.0, 0.0, 0.0], [2.0, 0.0, 0.0])
    res.le("ab_constant_segment", abs(gauge.ab_vector_phase(gauge.uniform_field([1.5, 0, 0]), e, line) - e * 3.0), 1e-12)
    A_core = gauge.flux_line(flux, core_radius=r0)
    loop_val = gauge.ab_vector_phase(A_core, e, gauge.PathSpec.circle(R, n))
    stokes = e * gauge.stokes_flux(A_core, R, split=r0)
    res.le("ab_vs_stokes_oracle", abs(loop_val - stokes), 1e-8)
    res.summary["phases"] = values
    res.summary["stokes_oracle"] = stokes
    res.summary["wrapped"] = list(gauge.wrap_phase(values["circle"]))
    return res


def run_gauge_ac(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    P = cfg.physics
    lam, mu, r0, R, n = P["line_density"], np.array(P["mu"]), P["core_radius"], P["radius"], P["samples"]
    E = gauge.line_charge(lam, core_radius=r0)
    loop = gauge.PathSpec.circle(R, n)
    phase = gauge.ac_phase(E, mu, loop)
    stokes = gauge.stokes_flux(lambda r: np.cross(E(r), mu), R, split=r0)
    res.le("ac_vs_stokes_oracle", abs(phase - stokes), 1e-8)
    res.le("ac_vs_closed_form", abs(phase + lam * mu[2]), 1e-8)
    ellipse = gauge.PathSpec.ellipse(2.0 * R, 0.7 * R, n + 1, center=(0.1, 0.2))
    res.le("ac_shape_independence", abs(gauge.ac_phase(gauge.line_charge(lam), mu, ellipse) - phase), 1e-8)
    Eu = gauge.uniform_field([1.0, 0.0, 0.0])
    res.le("ac_mu_parallel_E", abs(gauge.ac_phase(Eu, [0.7, 0.0, 0.0], loop)), 1e-15)
    res.le("ac_zero_field", abs(gauge.ac_phase(gauge.uniform_field([0.0, 0.0, 0.0]), mu, loop)), 1e-15)
    res.summary["ac_phase"] = phase
    res.summary["stokes_oracle"] = stokes
    res.summary["wrapped"] = list(gauge.wrap_phase(phase))
    return res


def run_gauge_berry(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    P = cfg.physics
    theta, n = P["theta"], P["samples"]
    loop = gauge.ParameterLoop.latitude(theta, n)
    expected = gauge.solid_angle_berry(theta)
    bp = gauge.berry_phase(gauge.spin_half_state, loop)
    res.le("berry_vs_closed_form", gauge.circular_distance(bp.principal, expected), 1e-6)
    res.le("berry_total_smooth_gauge", abs(bp.total - expected), 1e-6)
    rng = np.random.default_rng(P["rng_seed"])
    states = [gauge.spin_half_state(b) * np.exp(1j * rng.uniform(0, 2 * np.pi)) for b in loop.samples[:-1]]
    bg = gauge.berry_phase(None, loop, states=states)
    res.le("berry_gauge_invariance", gauge.circular_distance(bg.principal, bp.principal), 1e-12)
    be = gauge.berry_phase(gauge.spin_half_ground, loop)
    res.le("berry_eigensolver_gauge", gauge.circular_distance(be.principal, bp.principal), 1e-12)
    br = gauge.berry_phase(gauge.spin_half_state, loop.reversed())
    res.le("berry_reverse_negates", gauge.circular_distance(br.principal, -bp.principal), 1e-12)
    const = gauge.berry_phase(lambda b: np.array([1.0, 0.0]), loop)
    res.le("berry_constant_state", abs(const.principal), 1e-15)
    dense = gauge.berry_phase(gauge.spin_half_state, gauge.ParameterLoop.latitude(P["dense_theta"], P["dense_samples"]))
    res.le("berry_dense_oracle", abs(dense.total - gauge.solid_angle_berry(P["dense_theta"])), 1e-6)
    res.summary["berry"] = {"principal": bp.principal, "total": bp.total, "winding": bp.winding, "expected": expected}
    return res


# -- algebra -------------------------------------------------------------------------


def run_algebra_checks(cfg: ScenarioConfig) -> ScenarioResult:
    res = ScenarioResult()
    P = cfg.physics
    dim, mass, omega, K = P["dim"], P["mass"], P["omega"], P["K"]
    basis = alg.LadderBasis(dim, mass, omega)
    X, Pm = basis.X, basis.P
    c = alg.commutator(X, Pm)
    res.le("ccr_interior", np.linalg.norm(alg.interior(c - 1j * basis.identity, 1)), 1e-10)
    rng = np.random.default_rng(P["rng_seed"])
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    rho = alg.density_from_state(v)
    jx, jp = alg.operator_derivatives(rho, alg.PolynomialHamiltonian.free(mass), basis)
    res.le("free_current_form", np.max(np.abs(jx - (rho.matrix @ Pm + Pm @ rho.matrix) / (2 * mass))) + np.max(np.abs(jp)), 1e-12)
    jx, jp = alg.operator_derivatives(rho, alg.PolynomialHamiltonian.linear(P["a"]), basis)
    res.le("linear_current_form", np.max(np.abs(jp + P["a"] * rho.matrix)) + np.max(np.abs(jx)), 1e-12)
    hh = alg.PolynomialHamiltonian.harmonic(mass, K)
    jx, jp = alg.operator_derivatives(rho, hh, basis)
    res.le("harmonic_current_form", np.max(np.abs(jp + 0.5 * K * (X @ rho.matrix + rho.matrix @ X))), 1e-12)

    H = hh.matrix(basis)
    w, vecs = np.linalg.eigh(H)
    worst = max(
        np.max(np.abs(alg.anticommutator(H, alg.density_from_state(vecs[:, i]).matrix) - 2 * w[i] * alg.density_from_state(vecs[:, i]).matrix))
        for i in range(dim)
    )
    res.le("eigenprojector_anticommutator", worst, 1e-10)
    res.le("liouville_trace", abs(np.trace(alg.liouville_rhs(H, rho))), 1e-12)
    h = P["step"]
    psi = v / np.linalg.norm(v)

    def rho_at(t):
        w = alg.propagator_matrix(H, t) @ psi
        return np.outer(w, np.conj(w))

    # fourth-order central difference of rho(t)
    fd = (-rho_at(2 * h) + 8 * rho_at(h) - 8 * rho_at(-h) + rho_at(-2 * h)) / (12 * h)
    rhs = alg.liouville_rhs(H, rho)
    res.le("liouville_vs_finite_difference", np.max(np.abs(fd - rhs)) / max(1.0, np.max(np.abs(rhs))), 1e-6)
    t = 0.37
    rho_t = alg.density_from_state(alg.propagator_matrix(H, t) @ psi).matrix
    res.le("heisenberg_schrodinger", abs(np.trace(X @ rho_t) - np.trace(alg.heisenberg_evolve(X, H, t) @ rho.matrix)), 1e-8)

    ref = alg.LadderBasis(P["reference_dim"], mass, omega)
    residuals = {}
    for label, ham, alpha, t0 in (
        ("free", alg.PolynomialHamiltonian.free(mass), P["alpha_free"], P["t_free"]),
        ("harmonic", hh, P["alpha_harmonic"], P["t_harmonic"]),
    ):
        psi0 = ref.coherent_state(alpha)
        times = [t0 - h, t0, t0 + h]
        seq = []
        for d in (dim // 2, dim, 2 * dim):
            b = alg.LadderBasis(d, mass, omega)
            seq.append(alg.operator_liouville_residual(alg.evolve_density_series(psi0, ham, b, times), times, ham, b))
        residuals[label] = seq
        res.le(f"operator_residual_{label}_dim{dim}", seq[1], 1e-4)
        res.flag(f"operator_residual_{label}_decreasing", seq[0] > seq[1] > seq[2])
    zero = alg.PolynomialHamiltonian([(0.0, 0, 2)])
    times = [0.0, h, 2 * h]
    res.le("operator_residual_zero_hamiltonian",
           alg.operator_liouville_residual(alg.evolve_density_series(basis.coherent_state(1.0), zero, basis, times), times, zero, basis), 0.0)
    res.summary["operator_residuals"] = {k: {str(d): r for d, r in zip((dim // 2, dim, 2 * dim), v)} for k, v in residuals.items()}
    return res


RUNNERS = {
    "free_gaussian": run_free_gaussian,
    "harmonic": run_harmonic,
    "linear": run_linear,
    "cubic": run_cubic,
    "gauge_ab_scalar": run_gauge_ab_scalar,
    "gauge_ab_vector": run_gauge_ab_vector,
    "gauge_ac": run_gauge_ac,
    "gauge_berry": run_gauge_berry,
    "algebra_checks": run_algebra_checks,
}


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    return RUNNERS[cfg.scenario](cfg)
