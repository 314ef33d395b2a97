"""Proximal gradient-response with geometrically growing batches.

The scheme iterates

    x_{k+1} = prox_{alpha r}(x_k - alpha (G(x_k) + w_k)),

where w_k is the averaged oracle error over N_k = ceil(rho^{-(k+1)}) samples.
With alpha < 2 eta / lip^2 the exact map contracts in mean square at factor
q = 1 - 2 alpha eta + alpha^2 lip^2, and the growing batches turn that into
a linear rate max(rho, q) for the mean squared distance to the equilibrium.
The companion calculators give the matching rate constants, iteration bound
K(eps), and oracle-sample bound M(eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import Divergence, InvalidStep
from .games import AggregativeGame, Game, QuadraticGame, monotonicity_constants
from .noise import with_seed
from .profiles import StrategyProfile
from .prox import prox_profile
from .sampling import GeometricBatch, SampleCounter, sample_batch_gradient, schedule_size
from .trace import RunTrace

# Relative width of the band around rho == q (or beta == varrho^2) inside
# which the two decay rates are treated as matched.
BRANCH_TOL = 1e-12


@dataclass(frozen=True)
class PgrConfig:
    """Run parameters for the growing-batch gradient-response solver.

    target_eps, when set, stops the run at the theoretical iteration bound
    ceil(K(target_eps)) if that comes before max_iter (requires a reference
    equilibrium so the initial error is known).
    """

    alpha: float
    rho: float
    max_iter: int
    seed: int = 0
    target_eps: float | None = None

    def __post_init__(self):
        if not (self.alpha > 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha}")
        if not (0.0 < self.rho < 1.0):
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.target_eps is not None and not self.target_eps > 0.0:
            raise ValueError(f"target_eps must be > 0, got {self.target_eps}")


@dataclass(frozen=True)
class RateConstants:
    """Constants of the mean-square linear rate envelope.

    Off the knife edge rho == q the envelope is c_rho_q * max(rho, q)^k and
    d_tilde/rho_tilde are None; on it the envelope is d_tilde * rho_tilde^k
    for a chosen rho_tilde in (rho, 1) and c_rho_q is None. c_start is the
    initial squared distance bound used in both.
    """

    q: float
    c_start: float
    c_rho_q: float | None
    d_tilde: float | None
    rho_tilde: float | None


def contraction_factor_q(eta: float, lip: float, alpha: float) -> float:
    """Mean-square contraction factor q = 1 - 2 alpha eta + alpha^2 lip^2.

    Raises InvalidStep when q >= 1, i.e. alpha outside (0, 2 eta / lip^2).
    """
    if not (eta > 0.0 and lip >= eta):
        raise ValueError(f"need 0 < eta <= lip, got eta={eta}, lip={lip}")
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise InvalidStep(f"alpha must be finite and > 0, got {alpha}")
    q = 1.0 - 2.0 * alpha * eta + alpha ** 2 * lip ** 2
    if q >= 1.0:
        raise InvalidStep(
            f"alpha={alpha} gives contraction factor q={q} >= 1; "
            f"need alpha in (0, {2.0 * eta / lip ** 2})")
    return q


def rate_constants(eta: float, lip: float, alpha: float, rho: float, nu: float,
                   c_start: float, rho_tilde: float | None = None) -> RateConstants:
    """Envelope constants for the mean squared error of the growing-batch run.

    c_start bounds E||x_0 - x*||^2. Off the knife edge the geometric series
    of noise terms sums to c_rho_q = c_start + alpha^2 nu^2 / (1 - min(rho/q,
    q/rho)); on it (|rho - q| <= 1e-12) the envelope needs a strictly larger
    rate rho_tilde (default midway to 1) and constant d_tilde = c_start +
    alpha^2 nu^2 / (e ln(rho_tilde / rho)).
    """
    if not (0.0 < rho < 1.0):
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    if c_start < 0.0 or nu < 0.0:
        raise ValueError("c_start and nu must be >= 0")
    q = contraction_factor_q(eta, lip, alpha)
    if abs(rho - q) <= BRANCH_TOL:
        if rho_tilde is None:
            rho_tilde = (1.0 + rho) / 2.0
        if not (rho < rho_tilde < 1.0):
            raise ValueError(
                f"rho_tilde must lie in ({rho}, 1), got {rho_tilde}")
        d_tilde = c_start + alpha ** 2 * nu ** 2 / (math.e * math.log(rho_tilde / rho))
        return RateConstants(q=q, c_start=c_start, c_rho_q=None,
                             d_tilde=d_tilde, rho_tilde=rho_tilde)
    gap = 1.0 - min(rho / q, q / rho)
    c_rho_q = c_start + alpha ** 2 * nu ** 2 / gap
    return RateConstants(q=q, c_start=c_start, c_rho_q=c_rho_q,
                         d_tilde=None, rho_tilde=None)


def envelope_params(rc: RateConstants, rho: float) -> tuple[float, float]:
    """(constant, rate) of the envelope constant * rate^k encoded by rc."""
    if rc.d_tilde is not None:
        return rc.d_tilde, rc.rho_tilde
    return rc.c_rho_q, max(rho, rc.q)


def complexity_K(rc: RateConstants, rho: float, eps: float) -> float:
    """Iterations needed for the envelope to reach eps (clamped at 0).

    Uses the envelope rate: q when rho < q, rho when q < rho, rho_tilde on
    the knife edge.
    """
    if not eps > 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    constant, rate = envelope_params(rc, rho)
    return max(0.0, math.log(constant / eps) / math.log(1.0 / rate))


def complexity_M(rc: RateConstants, rho: float, eps: float) -> float:
    """Oracle samples consumed up to K(eps) under N_k = ceil(rho^{-(k+1)}).

    The geometric sum is bounded by (1/(rho ln(1/rho))) * rho^{-K} plus the
    ceiling corrections, one per iteration, giving the additive K term. The
    exponent of (constant/eps) reflects which rate drives K: ln(1/rho)/ln(1/q)
    when rho < q, 1 when q < rho, ln(1/rho)/ln(1/rho_tilde) on the knife edge.
    """
    k_eps = complexity_K(rc, rho, eps)
    lead = 1.0 / (rho * math.log(1.0 / rho))
    constant, rate = envelope_params(rc, rho)
    exponent = math.log(1.0 / rho) / math.log(1.0 / rate)
    return lead * (constant / eps) ** exponent + k_eps


def recommended_parameters(eta: float, lip: float) -> tuple[float, float]:
    """Step and batch ratio (alpha, rho) = (eta/lip^2, 1 - 1/(2 kappa^2)).

    This choice makes q = 1 - 1/kappa^2 < rho, so the batch growth is the
    binding rate and the bounds scale as K = O(kappa^2 ln(1/eps)) iterations
    and M = O(kappa^2 / eps) samples.
    """
    if not (eta > 0.0 and lip >= eta):
        raise ValueError(f"need 0 < eta <= lip, got eta={eta}, lip={lip}")
    kappa = lip / eta
    return eta / lip ** 2, 1.0 - 1.0 / (2.0 * kappa ** 2)


def _reseeded(game: Game, seed: int) -> Game:
    """Copy of the game whose noise streams are keyed by the run seed."""
    if isinstance(game, QuadraticGame):
        return replace(game, noise=with_seed(game.noise, seed))
    return replace(game, noises=tuple(with_seed(nm, seed) for nm in game.noises))


def run_pgr(game: Game, config: PgrConfig, x0: StrategyProfile,
            x_star: StrategyProfile | None = None,
            replication: int = 0) -> RunTrace:
    """One growing-batch gradient-response run.

    Oracle draws at iteration k of replication r come from the stream
    (config.seed, r, k), so replications and reruns are reproducible. When
    x_star is given, errors[k] records ||x_k - x*||^2 for k = 0..K; when
    config.target_eps is also set, the run stops at ceil(K(target_eps)) if
    that bound is smaller than max_iter.
    """
    consts = monotonicity_constants(game)
    contraction_factor_q(consts.eta, consts.lip, config.alpha)
    if x0.dims != tuple(game.dims):
        raise ValueError(f"x0 dims {x0.dims} do not match game dims {tuple(game.dims)}")
    sampled_game = _reseeded(game, config.seed)
    schedule = GeometricBatch(config.rho)
    n_iter = config.max_iter
    if config.target_eps is not None:
        if x_star is None:
            raise ValueError("target_eps requires a reference equilibrium x_star")
        c_start = x0.distance(x_star) ** 2
        rc = rate_constants(consts.eta, consts.lip, config.alpha, config.rho,
                            consts.nu, c_start)
        n_iter = min(n_iter, max(1, math.ceil(
            complexity_K(rc, config.rho, config.target_eps))))

    counter = SampleCounter()
    errors = np.full(n_iter + 1, np.nan)
    batches: list[int] = []
    cum_samples: list[int] = []
    cum_prox: list[int] = []
    x = x0
    if x_star is not None:
        errors[0] = x.distance(x_star) ** 2
    for k in range(n_iter):
        n_k = schedule_size(schedule, k)
        g = sample_batch_gradient(sampled_game, x, n_k, (replication, k), counter)
        step = x.vector - config.alpha * g
        if not np.all(np.isfinite(step)):
            raise Divergence(f"iterate became non-finite at iteration {k}",
                             iteration=k)
        x = prox_profile(game.regularizers,
                         StrategyProfile.from_vector(step, game.dims),
                         config.alpha, counter)
        batches.append(n_k)
        cum_samples.append(counter.total_samples)
        cum_prox.append(counter.prox_evals)
        if x_star is not None:
            errors[k + 1] = x.distance(x_star) ** 2
    return RunTrace(errors=errors, error_metric="squared_distance",
                    batches=batches, cum_samples=cum_samples,
                    cum_prox=cum_prox, final=x, counter=counter)
