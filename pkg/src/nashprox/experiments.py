"""Experiment harness: synthetic game generators, rate fitting, replicated
runs with envelope checks, and deterministic CSV/JSON outputs."""

from __future__ import annotations

import csv
import math
import os
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .best_response import (PbrConfig, contraction_certificate, pbr_complexity,
                            resolved_schedule, run_pbr)
from .distributed import (DistConfig, dist_complexity, dist_envelope_params,
                          dist_rate_constants, run_dist_pgr)
from .errors import ConfigError
from .games import (AggregativeGame, Game, QuadraticGame,
                    monotonicity_constants, solve_ne_oracle)
from .graphs import CommGraph, mixing_params
from .noise import GaussianNoise, ZeroNoise, substream
from .pgr import (PgrConfig, complexity_K, complexity_M, envelope_params,
                  rate_constants, run_pgr)
from .profiles import StrategyProfile
from .prox import prox_profile
from .serialize import as_builtin, build_game, build_graph, validate_config
from .trace import RunTrace

TRACE_COLUMNS = {
    "pgr": ["k", "N_k", "cum_samples", "cum_prox", "sq_error",
            "replication_id"],
    "dist-pgr": ["k", "N_k", "tau_k", "cum_samples", "cum_prox", "cum_comm",
                 "consensus_error", "sq_error", "replication_id"],
    "pbr": ["k", "batch_N_k", "cum_samples", "inner_solves", "error_norm",
            "replication_id"],
}


def generate_quadratic_game(n_players: int, dim: int, coupling_strength: float,
                            seed: int = 0, nu: float = 0.0,
                            regularizers=None,
                            h: np.ndarray | None = None,
                            c: np.ndarray | None = None) -> QuadraticGame:
    """Random strongly monotone block-quadratic game.

    Own blocks are I + 0.5 A'A/dim (eigenvalues in [1, about 3]); coupling
    blocks have spectral norm at most coupling_strength / (N - 1), so the
    monotonicity modulus stays at least 1 - coupling_strength. Passing h
    (and optionally c) bypasses the random construction and just validates.
    """
    if n_players < 1 or dim < 1:
        raise ValueError("n_players and dim must be >= 1")
    if not (0.0 <= coupling_strength < 1.0):
        raise ValueError(
            f"coupling_strength must lie in [0, 1), got {coupling_strength}")
    dims = (dim,) * n_players
    n = n_players * dim
    rng = substream(seed, 7001)
    if h is None:
        h = np.zeros((n, n))
        for i in range(n_players):
            a = rng.standard_normal((dim, dim))
            block = np.eye(dim) + 0.5 * (a.T @ a) / dim
            h[i * dim:(i + 1) * dim, i * dim:(i + 1) * dim] = block
        if n_players > 1:
            cap = coupling_strength / (n_players - 1)
            for i in range(n_players):
                for j in range(n_players):
                    if i != j:
                        b = rng.standard_normal((dim, dim))
                        norm = np.linalg.norm(b, 2)
                        if norm > 0:
                            b = b * (cap / norm)
                        h[i * dim:(i + 1) * dim, j * dim:(j + 1) * dim] = b
    else:
        h = np.asarray(h, dtype=float)
    if c is None:
        c = rng.standard_normal(n)
    noise = GaussianNoise(nu=nu, seed=seed) if nu > 0.0 else ZeroNoise(seed=seed)
    return QuadraticGame(dims=dims, h=h, c=np.asarray(c, dtype=float),
                         regularizers=tuple(regularizers) if regularizers else (),
                         noise=noise)


def generate_cournot_game(n_players: int, seed: int = 0, a=None, b=None,
                          d: float = 2.0, c_price: float = 1.0,
                          lo=0.0, hi=1.0, nu=0.0) -> AggregativeGame:
    """Cournot game with given or randomly drawn cost parameters.

    a (quadratic cost) defaults to U[1, 2] draws, b (linear cost) to
    U[0, 0.2]; lo, hi, nu broadcast over players.
    """
    if n_players < 1:
        raise ValueError("n_players must be >= 1")
    rng = substream(seed, 7002)
    a = np.broadcast_to(np.asarray(
        rng.uniform(1.0, 2.0, n_players) if a is None else a,
        dtype=float), (n_players,))
    b = np.broadcast_to(np.asarray(
        rng.uniform(0.0, 0.2, n_players) if b is None else b,
        dtype=float), (n_players,))
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (n_players,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (n_players,))
    nu = np.broadcast_to(np.asarray(nu, dtype=float), (n_players,))
    noises = tuple(GaussianNoise(nu=float(v), seed=seed) if v > 0.0
                   else ZeroNoise(seed=seed) for v in nu)
    return AggregativeGame(a=tuple(float(v) for v in a),
                           b=tuple(float(v) for v in b), d=float(d),
                           c_price=float(c_price), lo=tuple(float(v) for v in lo),
                           hi=tuple(float(v) for v in hi), noises=noises)


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def fit_linear_rate(errors, window: tuple[int, int] | None = None,
                    skip: int = 5) -> FitResult:
    """Least-squares fit of ln(errors[k]) against k.

    window = (lo, hi) selects indices lo..hi inclusive; the default starts
    at `skip` (transients excluded) and ends at the last index. Nonpositive
    or non-finite entries are dropped with a warning; fewer than 3 usable
    points is an error. The slope estimates the empirical log-rate.
    """
    err = np.asarray(errors, dtype=float)
    if window is None:
        window = (skip, err.size - 1)
    lo, hi = int(window[0]), int(window[1])
    if not (0 <= lo <= hi < err.size):
        raise ValueError(
            f"window {window} out of range for {err.size} error entries")
    ks = np.arange(lo, hi + 1)
    vals = err[lo:hi + 1]
    keep = np.isfinite(vals) & (vals > 0.0)
    if not np.all(keep):
        warnings.warn(
            f"dropped {int((~keep).sum())} nonpositive or non-finite error "
            f"entries from the rate fit")
    ks, vals = ks[keep], vals[keep]
    if ks.size < 3:
        raise ValueError(
            f"rate fit needs at least 3 usable points, got {ks.size}")
    logs = np.log(vals)
    slope, intercept = np.polyfit(ks, logs, 1)
    pred = slope * ks + intercept
    ss_res = float(np.sum((logs - pred) ** 2))
    ss_tot = float(np.sum((logs - logs.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(slope=float(slope), intercept=float(intercept),
                     r_squared=r_squared, n_points=int(ks.size))


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated experiment description ready to run."""

    scheme: str
    solver: dict
    game: dict | None = None
    graph: dict | None = None
    seed: int = 0
    replications: int = 1
    x0: tuple[float, ...] | None = None
    fit: dict | None = None

    @classmethod
    def from_config(cls, doc: dict, scheme: str | None = None) -> ExperimentSpec:
        doc = validate_config(doc, scheme)
        scheme = scheme or doc["scheme"]
        return cls(scheme=scheme, solver=dict(doc["solver"]),
                   game=doc.get("game"), graph=doc.get("graph"),
                   seed=int(doc.get("seed", 0)),
                   replications=int(doc.get("replications", 1)),
                   x0=tuple(doc["x0"]) if "x0" in doc else None,
                   fit=doc.get("fit"))


@dataclass
class RunReport:
    """Summary of an experiment; as_dict() is JSON-ready and deterministic."""

    scheme: str
    seed: int
    replications: int
    solver: dict
    game_constants: dict | None
    theory: dict
    counters: dict | None
    iterations: int | None
    mean_final_error: float | None
    fit: dict | None
    equilibrium: list | None
    graph: dict | None

    def as_dict(self) -> dict:
        out = {"scheme": self.scheme, "seed": self.seed,
               "replications": self.replications, "solver": self.solver,
               "theory": self.theory}
        if self.game_constants is not None:
            out["game_constants"] = self.game_constants
        if self.counters is not None:
            out["counters"] = self.counters
        if self.iterations is not None:
            out["iterations"] = self.iterations
        if self.mean_final_error is not None:
            out["mean_final_error"] = self.mean_final_error
        if self.fit is not None:
            out["fit"] = self.fit
        if self.equilibrium is not None:
            out["equilibrium"] = self.equilibrium
        if self.graph is not None:
            out["graph"] = self.graph
        return as_builtin(out)


def _default_x0(game: Game) -> StrategyProfile:
    if isinstance(game, AggregativeGame):
        return StrategyProfile(tuple(
            np.array([(l + h) / 2.0]) for l, h in zip(game.lo, game.hi)))
    zeros = StrategyProfile.zeros(game.dims)
    return prox_profile(game.regularizers, zeros, 1.0)


def _mean_errors(traces: list[RunTrace]) -> np.ndarray:
    return np.mean(np.stack([t.errors for t in traces]), axis=0)


def _envelope_check(mean_errors: np.ndarray, constant: float,
                    rate: float) -> dict:
    ks = np.arange(mean_errors.size)
    envelope = constant * rate ** ks
    with np.errstate(invalid="ignore", divide="ignore"):
        ratios = mean_errors / envelope
    max_ratio = float(np.nanmax(ratios))
    return {"constant": constant, "rate": rate,
            "log_rate": math.log(rate), "ok": bool(max_ratio <= 1.0 + 1e-9),
            "max_ratio": max_ratio}


def _fit_dict(mean_errors: np.ndarray, fit_doc: dict | None,
              max_k: int) -> dict:
    skip = 5
    window = None
    if fit_doc:
        skip = int(fit_doc.get("skip", 5))
        if "window" in fit_doc:
            window = tuple(fit_doc["window"])
    if window is None:
        window = (min(skip, max(0, max_k - 3)), max_k)
    fit = fit_linear_rate(mean_errors, window=window)
    return {"slope": fit.slope, "intercept": fit.intercept,
            "r_squared": fit.r_squared, "n_points": fit.n_points,
            "window": list(window)}


def _constants_dict(game: Game) -> dict:
    consts = monotonicity_constants(game)
    return {"eta": consts.eta, "lip": consts.lip, "kappa": consts.kappa,
            "nu": consts.nu, "nu_i": list(consts.nu_i),
            "m_compact": consts.m_compact}


def run_experiment(spec: ExperimentSpec, out_dir: str | None = None) -> RunReport:
    """Run the replicated experiment an ExperimentSpec describes.

    When out_dir is given, writes trace.csv (one row per executed iteration
    per replication) and report.json there; both byte-stable for a fixed
    spec on one platform.
    """
    if spec.scheme == "pgr":
        report, traces = _run_pgr_experiment(spec)
    elif spec.scheme == "dist-pgr":
        report, traces = _run_dist_experiment(spec)
    elif spec.scheme == "pbr":
        report, traces = _run_pbr_experiment(spec)
    elif spec.scheme == "bounds":
        report, traces = _run_bounds(spec), []
    else:
        raise ConfigError(f"unknown scheme '{spec.scheme}'")
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        if traces:
            write_trace_csv(os.path.join(out_dir, "trace.csv"), spec.scheme,
                            traces)
        write_report_json(os.path.join(out_dir, "report.json"), report)
    return report


def _spec_x0(spec: ExperimentSpec, game: Game) -> StrategyProfile:
    if spec.x0 is None:
        return _default_x0(game)
    return StrategyProfile.from_vector(np.asarray(spec.x0, dtype=float),
                                       game.dims)


def _run_pgr_experiment(spec: ExperimentSpec):
    game = build_game(spec.game, spec.seed)
    consts = monotonicity_constants(game)
    x_star = solve_ne_oracle(game)
    x0 = _spec_x0(spec, game)
    solver = dict(spec.solver)
    config = PgrConfig(alpha=solver["alpha"], rho=solver["rho"],
                       max_iter=solver["max_iter"], seed=spec.seed,
                       target_eps=solver.get("target_eps"))
    traces = [run_pgr(game, config, x0, x_star, replication=r)
              for r in range(spec.replications)]
    mean_errors = _mean_errors(traces)
    c_start = x0.distance(x_star) ** 2
    rc = rate_constants(consts.eta, consts.lip, config.alpha, config.rho,
                        consts.nu, c_start)
    constant, rate = envelope_params(rc, config.rho)
    theory = {"q": rc.q, "c_start": c_start, "c_rho_q": rc.c_rho_q,
              "d_tilde": rc.d_tilde, "rho_tilde": rc.rho_tilde,
              "envelope": _envelope_check(mean_errors, constant, rate)}
    if config.target_eps is not None:
        theory["k_eps"] = complexity_K(rc, config.rho, config.target_eps)
        theory["m_eps"] = complexity_M(rc, config.rho, config.target_eps)
    k_iter = traces[0].iterations
    report = RunReport(
        scheme="pgr", seed=spec.seed, replications=spec.replications,
        solver=solver, game_constants=_constants_dict(game), theory=theory,
        counters=traces[0].counter.as_dict(), iterations=k_iter,
        mean_final_error=float(mean_errors[-1]),
        fit=_fit_dict(mean_errors, spec.fit, k_iter),
        equilibrium=list(x_star.vector), graph=None)
    return report, traces


def _run_dist_experiment(spec: ExperimentSpec):
    game = build_game(spec.game, spec.seed)
    if not isinstance(game, AggregativeGame):
        raise ConfigError("the distributed scheme needs an aggregative game")
    graph = build_graph(spec.graph)
    x_star = solve_ne_oracle(game)
    x0 = _spec_x0(spec, game)
    solver = dict(spec.solver)
    config = DistConfig(alpha=solver["alpha"], max_iter=solver["max_iter"],
                        beta=solver.get("beta"), seed=spec.seed,
                        replications=spec.replications)
    traces = [run_dist_pgr(game, graph, config, x_star, replication=r, x0=x0)
              for r in range(spec.replications)]
    mean_errors = _mean_errors(traces)
    mp = mixing_params(graph)
    beta = config.beta if config.beta is not None else mp.beta
    rc = dist_rate_constants(game, graph, config.alpha, beta=beta,
                             theta=mp.theta)
    c_start = x0.distance(x_star) ** 2
    constant, rate = dist_envelope_params(rc, c_start)
    cerr = np.max(np.stack([t.consensus_errors for t in traces]), axis=0)
    taus = np.asarray(traces[0].taus)
    cerr_bound = rc.m_compact * mp.theta * beta ** taus
    consensus_ok = bool(np.all(cerr <= cerr_bound + 1e-12))
    theory = {"varrho": rc.varrho, "c1": rc.c1, "c2": rc.c2, "c3": rc.c3,
              "m_compact": rc.m_compact, "beta": beta, "theta": mp.theta,
              "c_start": c_start,
              "envelope": _envelope_check(mean_errors, constant, rate),
              "consensus_bound_ok": consensus_ok,
              "max_consensus_error": float(np.max(cerr))}
    if solver.get("target_eps") is not None:
        comp = dist_complexity(rc, beta, solver["target_eps"], c_start)
        theory["k_eps"] = comp.k_eps
        theory["comm_eps"] = comp.comm_rounds
        theory["m_eps"] = comp.samples
    k_iter = traces[0].iterations
    report = RunReport(
        scheme="dist-pgr", seed=spec.seed, replications=spec.replications,
        solver=solver, game_constants=_constants_dict(game), theory=theory,
        counters=traces[0].counter.as_dict(), iterations=k_iter,
        mean_final_error=float(mean_errors[-1]),
        fit=_fit_dict(mean_errors, spec.fit, k_iter),
        equilibrium=list(x_star.vector),
        graph={"nodes": graph.n_nodes, "edges": len(graph.edges),
               "beta": mp.beta, "theta": mp.theta})
    return report, traces


def _run_pbr_experiment(spec: ExperimentSpec):
    game = build_game(spec.game, spec.seed)
    if not isinstance(game, QuadraticGame):
        raise ConfigError("the best-response scheme needs a quadratic game")
    x_star = solve_ne_oracle(game)
    x0 = _spec_x0(spec, game)
    solver = dict(spec.solver)
    config = PbrConfig(mu=solver["mu"], eta_br=solver["eta_br"],
                       max_iter=solver["max_iter"], seed=spec.seed,
                       m_max=solver.get("m_max"), c_r=solver.get("c_r"),
                       eta_tilde=solver.get("eta_tilde"),
                       inner_tol=solver.get("inner_tol", 1e-12),
                       allow_uncontractive=solver.get("allow_uncontractive",
                                                      False))
    traces = [run_pbr(game, config, x0, x_star, replication=r)
              for r in range(spec.replications)]
    mean_errors = _mean_errors(traces)
    cert = contraction_certificate(game, config.mu)
    schedule = resolved_schedule(game, config)
    resolved = replace(config, m_max=schedule.m_max, c_r=schedule.c_r)
    c = max(cert.a, config.eta_br)
    eta_tilde = config.eta_tilde if config.eta_tilde is not None \
        else (1.0 + c) / 2.0
    d = 1.0 / (math.e * math.log(eta_tilde / c))
    c_start = max(
        float(np.linalg.norm(x0.blocks[i] - x_star.blocks[i]))
        for i in range(game.n_players))
    constant = math.sqrt(game.n_players) * (c_start + d)
    theory = {"a": cert.a, "c_r": schedule.c_r,
              "m_max": schedule.m_max, "eta_tilde": eta_tilde, "d": d,
              "c_start": c_start,
              "envelope": _envelope_check(mean_errors, constant, eta_tilde)}
    if solver.get("target_eps") is not None:
        comp = pbr_complexity(resolved, cert.a, solver["target_eps"],
                              game.n_players, c_start)
        theory["k_eps"] = comp.k_eps
        theory["m_eps"] = comp.samples
        theory["m_eps_order"] = comp.order_value
    k_iter = traces[0].iterations
    report = RunReport(
        scheme="pbr", seed=spec.seed, replications=spec.replications,
        solver=solver, game_constants=_constants_dict(game), theory=theory,
        counters=traces[0].counter.as_dict(), iterations=k_iter,
        mean_final_error=float(mean_errors[-1]),
        fit=_fit_dict(mean_errors, spec.fit, k_iter),
        equilibrium=list(x_star.vector), graph=None)
    return report, traces


def _run_bounds(spec: ExperimentSpec) -> RunReport:
    s = dict(spec.solver)
    rc = rate_constants(s["eta"], s["lip"], s["alpha"], s["rho"], s["nu"],
                        s["c_start"], rho_tilde=s.get("rho_tilde"))
    constant, rate = envelope_params(rc, s["rho"])
    theory = {"q": rc.q, "c_rho_q": rc.c_rho_q, "d_tilde": rc.d_tilde,
              "rho_tilde": rc.rho_tilde, "envelope_constant": constant,
              "envelope_rate": rate,
              "k_eps": complexity_K(rc, s["rho"], s["eps"]),
              "m_eps": complexity_M(rc, s["rho"], s["eps"])}
    return RunReport(scheme="bounds", seed=spec.seed,
                     replications=spec.replications, solver=s, theory=theory,
                     game_constants=None, counters=None, iterations=None,
                     mean_final_error=None, fit=None, equilibrium=None,
                     graph=None)


def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def trace_rows(scheme: str, traces: list[RunTrace]):
    """Rows of the trace table: one per executed iteration per replication."""
    for rep, tr in enumerate(traces):
        for k in range(tr.iterations):
            if scheme == "pgr":
                yield (k, tr.batches[k], tr.cum_samples[k], tr.cum_prox[k],
                       tr.errors[k], rep)
            elif scheme == "dist-pgr":
                yield (k, tr.batches[k], tr.taus[k], tr.cum_samples[k],
                       tr.cum_prox[k], tr.cum_comm[k],
                       tr.consensus_errors[k], tr.errors[k], rep)
            elif scheme == "pbr":
                yield (k, tr.batches[k], tr.cum_samples[k], tr.cum_inner[k],
                       tr.errors[k], rep)
            else:
                raise ValueError(f"no trace format for scheme '{scheme}'")


def write_trace_csv(path: str, scheme: str, traces: list[RunTrace]) -> None:
    """Write the per-iteration trace table (error columns record the state
    entering each iteration)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS[scheme])
        for row in trace_rows(scheme, traces):
            writer.writerow([_format_cell(v) for v in row])


def write_report_json(path: str, report: RunReport) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
