"""Proximal best-response with growing sample batches.

Each iteration every player solves a sampled, proximally anchored best
response

    x_{i,k+1} = argmin_{x_i}  fhat_i(x_i, y_{-i,k}) + r_i(x_i)
                              + mu/2 ||x_i - y_{i,k}||^2,

where fhat_i replaces the smooth cost by a sample average over N_k draws,
and then y_{k+1} = x_{k+1}. The exact anchored map is a componentwise
contraction when the sensitivity matrix Gamma (built from the own-block
curvature and cross-block coupling norms) has spectral norm a < 1, and the
subproblem's argmin perturbs by at most c_r times the gradient observation
error, so batches N_k = ceil(max_i M_i^2 c_r^2 / eta_br^{2k}) keep the
sampling error on the geometric decay eta_br.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InnerSolveFailure
from .games import QuadraticGame, monotonicity_constants
from .noise import NoiseModel, with_seed
from .profiles import StrategyProfile
from .prox import prox_apply
from .sampling import BestResponseBatch, SampleCounter, schedule_size
from .trace import RunTrace


@dataclass(frozen=True, eq=False)
class ContractionCertificate:
    """Componentwise sensitivity bound of the anchored best-response map.

    gamma[i][i] = mu / (mu + zeta_min[i]) and gamma[i][j] =
    zeta_max[i][j] / (mu + zeta_min[i]) bound how far player i's anchored
    best response moves per unit change of the anchor and of rival j. The
    map is a contraction in the componentwise sense when a = ||gamma||_2
    is below one; a >= 1 is reported, not raised.
    """

    mu: float
    gamma: np.ndarray
    a: float
    zeta_min: tuple[float, ...]
    zeta_max: np.ndarray


def contraction_certificate(game: QuadraticGame, mu: float) -> ContractionCertificate:
    """Sensitivity matrix and its spectral norm for a quadratic game.

    zeta_min[i] is the smallest eigenvalue of the own block Q_ii and
    zeta_max[i][j] the spectral norm of the coupling block Q_ij. Requires
    mu > 0 and mu + zeta_min[i] > 0 so every subproblem is strongly convex.
    """
    if not (mu > 0.0 and math.isfinite(mu)):
        raise ValueError(f"mu must be finite and > 0, got {mu}")
    n = game.n_players
    zeta_min = []
    for i in range(n):
        zeta_min.append(float(np.linalg.eigvalsh(game.block(i, i))[0]))
        if mu + zeta_min[i] <= 0.0:
            raise ValueError(
                f"subproblem of player {i} is not strongly convex: "
                f"mu + zeta_min = {mu + zeta_min[i]}")
    zeta_max = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                zeta_max[i, j] = float(np.linalg.norm(game.block(i, j), 2))
    gamma = np.zeros((n, n))
    for i in range(n):
        gamma[i, i] = mu / (mu + zeta_min[i])
        for j in range(n):
            if i != j:
                gamma[i, j] = zeta_max[i, j] / (mu + zeta_min[i])
    a = float(np.linalg.norm(gamma, 2))
    return ContractionCertificate(mu=mu, gamma=gamma, a=a,
                                  zeta_min=tuple(zeta_min), zeta_max=zeta_max)


def br_noise_gain(mu: float, lip: float) -> float:
    """Gain c_r from gradient observation error to best-response error.

    c_r = (mu / (mu^2 + lip^2)) / (1 - lip / sqrt(mu^2 + lip^2)), with lip
    the largest own-block gradient Lipschitz constant max_i ||Q_ii||_2.
    """
    if not (mu > 0.0 and lip >= 0.0):
        raise ValueError(f"need mu > 0 and lip >= 0, got mu={mu}, lip={lip}")
    denom = 1.0 - lip / math.sqrt(mu ** 2 + lip ** 2)
    return (mu / (mu ** 2 + lip ** 2)) / denom


def _solve_anchored(game: QuadraticGame, i: int, linear: np.ndarray,
                    anchor: np.ndarray, mu: float, tol: float,
                    max_inner: int) -> tuple[np.ndarray, int]:
    """Minimize 0.5 z'Q_ii z + linear'z + mu/2 ||z - anchor||^2 + r_i(z).

    Deterministic proximal gradient with the optimal constant step for the
    strongly convex smooth part; returns (argmin, iterations used).
    """
    qii = game.block(i, i)
    eigs = np.linalg.eigvalsh(qii)
    lam_min = mu + float(eigs[0])
    lam_max = mu + float(eigs[-1])
    step = 2.0 / (lam_min + lam_max)
    reg = game.regularizers[i]
    z = anchor.copy()
    for it in range(max_inner):
        grad = qii @ z + linear + mu * (z - anchor)
        z_next = prox_apply(reg, z - step * grad, step)
        disp = float(np.linalg.norm(z_next - z))
        z = z_next
        if disp <= tol:
            return z, it + 1
    raise InnerSolveFailure(
        f"anchored best response of player {i} did not reach displacement "
        f"{tol} in {max_inner} iterations", residual=disp)


def _coupling_linear(game: QuadraticGame, i: int, y: StrategyProfile) -> np.ndarray:
    sl = game.block_slice(i)
    lin = game.c[sl].copy()
    for j in range(game.n_players):
        if j != i:
            lin += game.block(i, j) @ y.blocks[j]
    return lin


def proximal_best_response(game: QuadraticGame, i: int, y: StrategyProfile,
                           mu: float, tol: float = 1e-12,
                           max_inner: int = 100_000) -> np.ndarray:
    """Exact anchored best response of player i at profile y."""
    if not (mu > 0.0 and math.isfinite(mu)):
        raise ValueError(f"mu must be finite and > 0, got {mu}")
    lin = _coupling_linear(game, i, y)
    z, _ = _solve_anchored(game, i, lin, y.blocks[i], mu, tol, max_inner)
    return z


def saa_best_response(game: QuadraticGame, i: int, y: StrategyProfile,
                      batch: int, mu: float, path: tuple[int, ...],
                      inner_tol: float = 1e-12, max_inner: int = 100_000,
                      counter: SampleCounter | None = None,
                      noise: NoiseModel | None = None) -> np.ndarray:
    """Sampled anchored best response: the smooth gradient carries an
    averaged observation error over `batch` draws from player i's noise
    stream at `path`.

    Counts `batch` samples and one inner solve.
    """
    if batch < 1:
        raise ValueError(f"batch size must be >= 1, got {batch}")
    if noise is None:
        noise = game.player_noise(i)
    w = noise.averaged(game.dims[i], batch, path)
    lin = _coupling_linear(game, i, y) + w
    z, _ = _solve_anchored(game, i, lin, y.blocks[i], mu, inner_tol, max_inner)
    if counter is not None:
        counter.total_samples += int(batch)
        counter.inner_solves += 1
    return z


@dataclass(frozen=True)
class PbrConfig:
    """Run parameters for the growing-batch proximal best-response solver.

    m_max (default: the largest per-player noise level) and c_r (default:
    br_noise_gain at the game's own-block curvature) size the batch
    schedule; eta_br is its decay target. eta_tilde, used by the complexity
    bound, defaults to (1 + max(a, eta_br)) / 2. allow_uncontractive turns
    the a >= 1 rejection into a warning.
    """

    mu: float
    eta_br: float
    max_iter: int
    seed: int = 0
    m_max: float | None = None
    c_r: float | None = None
    eta_tilde: float | None = None
    inner_tol: float = 1e-12
    allow_uncontractive: bool = False

    def __post_init__(self):
        if not (self.mu > 0.0 and math.isfinite(self.mu)):
            raise ValueError(f"mu must be finite and > 0, got {self.mu}")
        if not (0.0 < self.eta_br < 1.0):
            raise ValueError(f"eta_br must lie in (0, 1), got {self.eta_br}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.m_max is not None and self.m_max < 0.0:
            raise ValueError(f"m_max must be >= 0, got {self.m_max}")
        if self.c_r is not None and not self.c_r > 0.0:
            raise ValueError(f"c_r must be > 0, got {self.c_r}")
        if self.eta_tilde is not None and not (0.0 < self.eta_tilde < 1.0):
            raise ValueError(
                f"eta_tilde must lie in (0, 1), got {self.eta_tilde}")
        if not self.inner_tol > 0.0:
            raise ValueError(f"inner_tol must be > 0, got {self.inner_tol}")


class PbrComplexity(NamedTuple):
    k_eps: int
    samples: int
    order_value: float


def _own_block_lip(game: QuadraticGame) -> float:
    return max(float(np.linalg.norm(game.block(i, i), 2))
               for i in range(game.n_players))


def resolved_schedule(game: QuadraticGame, config: PbrConfig) -> BestResponseBatch:
    """Batch schedule with config defaults filled in from the game."""
    consts = monotonicity_constants(game)
    m_max = config.m_max if config.m_max is not None else max(consts.nu_i)
    c_r = config.c_r if config.c_r is not None else \
        br_noise_gain(config.mu, _own_block_lip(game))
    return BestResponseBatch(m_max=m_max, c_r=c_r, eta_br=config.eta_br)


def run_pbr(game: QuadraticGame, config: PbrConfig, x0: StrategyProfile,
            x_star: StrategyProfile | None = None,
            replication: int = 0) -> RunTrace:
    """One growing-batch proximal best-response run.

    All players respond to the same profile y_k and the update is
    y_{k+1} = x_{k+1}. Player i's draws at iteration k come from the stream
    (config.seed, replication, k, i). errors[k] records the plain distance
    ||y_k - x*|| (not squared). Raises ValueError when the contraction
    certificate has a >= 1, unless allow_uncontractive is set, which only
    warns.
    """
    cert = contraction_certificate(game, config.mu)
    if cert.a >= 1.0:
        msg = (f"best-response map is not certified contractive: "
               f"a = {cert.a:.6f} >= 1")
        if config.allow_uncontractive:
            warnings.warn(msg)
        else:
            raise ValueError(msg + " (set allow_uncontractive to proceed)")
    if x0.dims != tuple(game.dims):
        raise ValueError(f"x0 dims {x0.dims} do not match game dims {tuple(game.dims)}")
    schedule = resolved_schedule(game, config)
    noises = [with_seed(game.player_noise(i), config.seed)
              for i in range(game.n_players)]
    counter = SampleCounter()
    errors = np.full(config.max_iter + 1, np.nan)
    y = x0
    if x_star is not None:
        errors[0] = y.distance(x_star)
    batches: list[int] = []
    cum_samples: list[int] = []
    cum_prox: list[int] = []
    cum_inner: list[int] = []
    for k in range(config.max_iter):
        n_k = schedule_size(schedule, k)
        blocks = tuple(
            saa_best_response(game, i, y, n_k, config.mu,
                              (replication, k, i), inner_tol=config.inner_tol,
                              counter=counter, noise=noises[i])
            for i in range(game.n_players))
        y = StrategyProfile(blocks)
        batches.append(n_k)
        cum_samples.append(counter.total_samples)
        cum_prox.append(counter.prox_evals)
        cum_inner.append(counter.inner_solves)
        if x_star is not None:
            errors[k + 1] = y.distance(x_star)
    return RunTrace(errors=errors, error_metric="distance", batches=batches,
                    cum_samples=cum_samples, cum_prox=cum_prox, final=y,
                    counter=counter, cum_inner=cum_inner)


def pbr_complexity(config: PbrConfig, a: float, eps: float, n_players: int,
                   c_start: float) -> PbrComplexity:
    """Iteration and sample counts for the best-response envelope.

    With c = max(a, eta_br) and eta_tilde in (c, 1), the expected distance
    obeys E||y_k - x*|| <= sqrt(N) (c_start + d) eta_tilde^k with
    d = 1 / (e ln(eta_tilde / c)) and c_start a per-player initial distance
    bound. k_eps is the smallest integer k with envelope <= eps; samples is
    the exact schedule sum N * sum_{k < k_eps} N_k; order_value evaluates
    the asymptotic form (sqrt(N)(c_start + d)/eps)^{2 ln(1/eta_br) /
    ln(1/eta_tilde)} that the exact sum tracks up to constants.
    """
    if not eps > 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if n_players < 1:
        raise ValueError(f"n_players must be >= 1, got {n_players}")
    if c_start < 0.0 or a < 0.0:
        raise ValueError("a and c_start must be >= 0")
    c = max(a, config.eta_br)
    eta_tilde = config.eta_tilde if config.eta_tilde is not None \
        else (1.0 + c) / 2.0
    if not (c < eta_tilde < 1.0):
        raise ValueError(
            f"eta_tilde must lie in (max(a, eta_br), 1) = ({c}, 1), "
            f"got {eta_tilde}")
    d = 1.0 / (math.e * math.log(eta_tilde / c))
    envelope0 = math.sqrt(n_players) * (c_start + d)
    k_eps = max(0, math.ceil(math.log(envelope0 / eps) /
                             math.log(1.0 / eta_tilde)))
    m_max = config.m_max
    c_r = config.c_r
    if m_max is None or c_r is None:
        raise ValueError(
            "pbr_complexity needs m_max and c_r resolved in the config "
            "(see resolved_schedule)")
    schedule = BestResponseBatch(m_max=m_max, c_r=c_r, eta_br=config.eta_br)
    samples = n_players * sum(schedule_size(schedule, k) for k in range(k_eps))
    order_value = (envelope0 / eps) ** (2.0 * math.log(1.0 / config.eta_br) /
                                        math.log(1.0 / eta_tilde))
    return PbrComplexity(k_eps=int(k_eps), samples=int(samples),
                         order_value=float(order_value))
