"""Experiment drivers behind the CLI subcommands; each returns a CsvTable."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from ..basis1d import Basis1D, assemble_mass_1d, assemble_stiffness_1d, build_basis
from ..integrator import SolverState, SplitStepper, params_from_rho, run
from ..problems import (
    ErrorReport,
    discrete_l2_norm,
    error_norms,
    manufactured_case,
    project_initial,
    semidiscrete_solution,
)
from ..spectral import Scheme, log_grid, scan_stability
from ..tensor_ops import KroneckerMass, KroneckerStiffness
from .table import CsvTable, orders

# full-scale time-study meshes; tables run on smaller meshes say so
FULL_SCALE_TIME_MESH = {("C0", 2): 100, ("C1", 2): 100, ("C2", 3): 64}


@dataclass
class Discretization:
    bases: list[Basis1D]
    M: KroneckerMass
    K: KroneckerStiffness

    @property
    def dof(self) -> int:
        return int(np.prod(self.M.shape))


def discretize(dim: int, p: int, continuity: str, n: int) -> Discretization:
    bases = [build_basis(p, n, continuity)] * dim
    Mf = tuple(assemble_mass_1d(b) for b in bases)
    Kf = tuple(assemble_stiffness_1d(b) for b in bases)
    return Discretization(bases, KroneckerMass(Mf), KroneckerStiffness(Mf, Kf))


def elements_for_dofs(p: int, continuity: str, m: int) -> int:
    """Element count whose interior DOF per direction is closest to m."""
    if str(continuity).lower() == "c0":
        return max(2, round((m + 1) / p))
    return max(2, m - p + 2)


def _variants(variant: str) -> list[str]:
    return ["split", "standard"] if variant == "both" else [variant]


def _rhos(value) -> list[float]:
    return [float(r) for r in (value if isinstance(value, (list, tuple)) else [value])]


def simulate(disc: Discretization, tau: float, T: float, rho_inf: float, variant: str, callback=None,
             projection: str = "l2"):
    case = manufactured_case(len(disc.bases))
    U0, V0 = project_initial(case, disc.bases, M=disc.M, method=projection)
    params = params_from_rho(rho_inf, variant)
    state = run(disc.M, disc.K, U0, V0, params, tau, T, callback=callback)
    return case, (U0, V0), state


def final_errors(disc: Discretization, case, state: SolverState, tau: float) -> tuple[ErrorReport, ErrorReport]:
    eu = error_norms(state.U, case, disc.bases, state.t, "u", tau=tau)
    ev = error_norms(state.V, case, disc.bases, state.t, "v", tau=tau)
    return eu, ev


def cmd_convergence_space(cfg) -> CsvTable:
    table = CsvTable(["variant", "rho_inf", "n", "h", "dof", "l2_u", "h1_u", "l2_v", "h1_v",
                      "order_l2_u", "order_h1_u", "order_l2_v", "order_h1_v"])
    ns = sorted(int(n) for n in (cfg.n_elements if isinstance(cfg.n_elements, list) else [cfg.n_elements]))
    for variant in _variants(cfg.variant):
        for rho in _rhos(cfg.rho_inf):
            rows = []
            for n in ns:
                disc = discretize(cfg.dim, cfg.p, cfg.continuity, n)
                case, _, state = simulate(disc, cfg.tau, cfg.T, rho, variant, projection=cfg.initial_projection)
                eu, ev = final_errors(disc, case, state, cfg.tau)
                rows.append((n, eu.h, disc.dof, eu.l2_error, eu.h1_semi_error, ev.l2_error, ev.h1_semi_error))
            ratios = [rows[k + 1][0] / rows[k][0] for k in range(len(rows) - 1)]
            cols = {name: orders([r[i] for r in rows], ratios) for name, i in
                    [("order_l2_u", 3), ("order_h1_u", 4), ("order_l2_v", 5), ("order_h1_v", 6)]}
            for k, r in enumerate(rows):
                table.add(variant=variant, rho_inf=rho, n=r[0], h=r[1], dof=r[2], l2_u=r[3], h1_u=r[4],
                          l2_v=r[5], h1_v=r[6], **{name: col[k] for name, col in cols.items()})
    return table


def cmd_convergence_time(cfg) -> CsvTable:
    """Errors against the exact solution, plus (optionally) against the
    semi-discrete solution on the same mesh, which removes the spatial floor."""
    table = CsvTable(["variant", "rho_inf", "tau", "l2_u", "l2_v", "order", "order_v",
                      "l2_u_time", "l2_v_time", "order_time", "order_v_time", "note"])
    taus = sorted((float(t) for t in (cfg.tau if isinstance(cfg.tau, list) else [cfg.tau])), reverse=True)
    n = int(cfg.n_elements)
    disc = discretize(cfg.dim, cfg.p, cfg.continuity, n)
    full_n = FULL_SCALE_TIME_MESH.get((str(cfg.continuity).upper(), cfg.p))
    note = f"desk-scale mesh n={n} (full-scale n={full_n})" if full_n and n < full_n else None
    reference = None
    for variant in _variants(cfg.variant):
        for rho in _rhos(cfg.rho_inf):
            rows = []
            for tau in taus:
                case, (U0, V0), state = simulate(disc, tau, cfg.T, rho, variant, projection=cfg.initial_projection)
                eu, ev = final_errors(disc, case, state, tau)
                tu = tv = None
                if cfg.reference:
                    if reference is None:
                        reference = semidiscrete_solution(disc.M.factors, disc.K.stiffness_factors, U0, V0, cfg.T)
                    tu = discrete_l2_norm(disc.M, state.U - reference[0])
                    tv = discrete_l2_norm(disc.M, state.V - reference[1])
                rows.append((tau, eu.l2_error, ev.l2_error, tu, tv))
            ratios = [rows[k][0] / rows[k + 1][0] for k in range(len(rows) - 1)]
            o = orders([r[1] for r in rows], ratios)
            ov = orders([r[2] for r in rows], ratios)
            ot = orders([r[3] for r in rows], ratios) if cfg.reference else [None] * len(rows)
            otv = orders([r[4] for r in rows], ratios) if cfg.reference else [None] * len(rows)
            for k, r in enumerate(rows):
                table.add(variant=variant, rho_inf=rho, tau=r[0], l2_u=r[1], l2_v=r[2], order=o[k],
                          order_v=ov[k], l2_u_time=r[3], l2_v_time=r[4], order_time=ot[k],
                          order_v_time=otv[k], note=note if k == 0 else None)
    return table


def _params_for(scheme: Scheme, rho: float):
    return params_from_rho(rho, "split" if scheme is Scheme.SPLIT else "standard")


def cmd_stability_scan(cfg) -> CsvTable:
    table = CsvTable(["scheme", "rho_inf", "sigma_x", "sigma_y", "spectral_radius", "kind"])
    grid = log_grid(cfg.sigma_min, cfg.sigma_max, int(cfg.n_sigma))
    for name in cfg.schemes:
        scheme = Scheme.parse(name)
        for rho in _rhos(cfg.rho_inf):
            res = scan_stability(scheme, _params_for(scheme, rho), grid, cfg.form)
            if cfg.emit_grid:
                for sx, sy, r in zip(res.sigma_x, res.sigma_y, res.radii):
                    table.add(scheme=scheme.value, rho_inf=rho, sigma_x=sx, sigma_y=sy, spectral_radius=r, kind="grid")
            inf_y = math.inf if scheme is not Scheme.STANDARD else 0.0
            table.add(scheme=scheme.value, rho_inf=rho, sigma_x=0.0, sigma_y=0.0,
                      spectral_radius=res.radius_zero, kind="limit_zero")
            table.add(scheme=scheme.value, rho_inf=rho, sigma_x=math.inf, sigma_y=inf_y,
                      spectral_radius=res.radius_inf, kind="limit_inf")
            table.add(scheme=scheme.value, rho_inf=rho, sigma_x=res.argmax[0], sigma_y=res.argmax[1],
                      spectral_radius=res.max_radius, kind="max")
    return table


def time_split_steps(disc: Discretization, rho_inf: float, tau: float, steps: int, repeats: int) -> float:
    """Median seconds per split step; assembly and factorization are untimed."""
    params = params_from_rho(rho_inf, "split")
    stepper = SplitStepper(params, disc.M, tau, K_factors=disc.K.stiffness_factors)
    rng = np.random.default_rng(0)
    state = SolverState(*(rng.standard_normal(disc.M.shape) for _ in range(3)), 0.0, tau)
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(steps):
            state = stepper.step(state)
        samples.append((time.perf_counter() - t0) / steps)
    return float(np.median(samples))


def cmd_cost_bench(cfg) -> CsvTable:
    table = CsvTable(["kind", "dim", "p", "continuity", "dof", "seconds_per_step", "slope", "note"])
    dofs, secs = [], []
    for m in cfg.dofs_per_direction:
        n = elements_for_dofs(cfg.p, cfg.continuity, int(m))
        disc = discretize(cfg.dim, cfg.p, cfg.continuity, n)
        s = time_split_steps(disc, cfg.rho_inf, cfg.tau, int(cfg.steps), int(cfg.repeats))
        dofs.append(disc.dof)
        secs.append(s)
        table.add(kind="point", dim=cfg.dim, p=cfg.p, continuity=cfg.continuity, dof=disc.dof, seconds_per_step=s)
    slope = float(np.polyfit(np.log(dofs), np.log(secs), 1)[0])
    table.add(kind="slope", dim=cfg.dim, p=cfg.p, continuity=cfg.continuity, slope=slope,
              note=f"wall clock, median of {cfg.repeats} x {cfg.steps} steps, assembly excluded")
    return table


def cmd_solve(cfg) -> CsvTable:
    table = CsvTable(["step", "t", "l2_u", "h1_u", "l2_v", "h1_v"])
    rho = _rhos(cfg.rho_inf)[0]
    variant = "split" if cfg.variant == "both" else cfg.variant
    disc = discretize(cfg.dim, cfg.p, cfg.continuity, int(cfg.n_elements))
    case = manufactured_case(cfg.dim)
    every = int(cfg.sample_every)
    last = {}

    def record(k, state):
        last["k"] = k
        if k % every == 0:
            eu, ev = final_errors(disc, case, state, cfg.tau)
            table.add(step=k, t=state.t, l2_u=eu.l2_error, h1_u=eu.h1_semi_error,
                      l2_v=ev.l2_error, h1_v=ev.h1_semi_error)

    _, _, state = simulate(disc, cfg.tau, cfg.T, rho, variant, callback=record,
                           projection=cfg.initial_projection)
    # the final row always uses the exact final time, as the convergence tables do
    eu, ev = final_errors(disc, case, state, cfg.tau)
    row = dict(step=last["k"], t=state.t, l2_u=eu.l2_error, h1_u=eu.h1_semi_error,
               l2_v=ev.l2_error, h1_v=ev.h1_semi_error)
    if table.rows and table.rows[-1][0] == last["k"]:
        table.rows.pop()
    table.add(**row)
    if cfg.snapshot_path:
        write_snapshot(cfg.snapshot_path, cfg.dim, cfg.p, cfg.continuity, state.U, state.t)
    return table


def write_snapshot(path, dim: int, p: int, continuity: str, U, t: float) -> None:
    U = np.asarray(U, dtype=float)
    header = " ".join([str(dim), str(p), str(continuity)] + [str(m) for m in U.shape] + [format(t, ".17g")])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        fh.writelines(format(v, ".17g") + "\n" for v in U.ravel())


def read_snapshot(path):
    """Return (dim, p, continuity, U, t) from a snapshot file."""
    with open(path, encoding="utf-8") as fh:
        head = fh.readline().split()
        values = np.array([float(line) for line in fh if line.strip()])
    dim, p, continuity = int(head[0]), int(head[1]), head[2]
    shape = tuple(int(m) for m in head[3:3 + dim])
    t = float(head[3 + dim])
    return dim, p, continuity, values.reshape(shape), t


def snapshot_errors(path) -> tuple[ErrorReport, Discretization]:
    dim, p, continuity, U, t = read_snapshot(path)
    m = U.shape[0]
    n = (m + 1) // p if continuity.lower() == "c0" else m - p + 2
    disc = discretize(dim, p, continuity, n)
    return error_norms(U, manufactured_case(dim), disc.bases, t, "u"), disc
