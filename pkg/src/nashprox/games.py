"""Game models with exact gradient maps and a deterministic equilibrium oracle.

Two families are provided. Block-quadratic games couple players through a
full block matrix H, so the joint gradient map is affine, G(x) = H x + c,
and monotonicity constants are eigenvalue computations. Scalar aggregative
games (Cournot competition with linear inverse demand) couple players only
through the sum of strategies; each player's gradient depends on its own
strategy and that aggregate, which is what a distributed solver estimates
by consensus.

A Nash equilibrium of either game with regularizers r_i is a fixed point of
x = prox_{alpha r}(x - alpha G(x)) for every alpha > 0, which is how the
oracle solver and the residual are defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidStep, NonConvergence, NotStronglyMonotone
from .noise import NoiseModel, ZeroNoise, scaled_noise
from .profiles import StrategyProfile
from .prox import BoxIndicator, Regularizer, Zero, prox_apply


@dataclass(frozen=True)
class GameConstants:
    """Monotonicity and oracle constants of a game's gradient map.

    eta is the strong monotonicity modulus, lip the Lipschitz constant,
    kappa = lip/eta. nu is the total noise level of the joint gradient
    oracle; nu_i its per-player split. m_compact is sum_i max_{x in R_i}
    ||x_i|| when every strategy set is a (compact) box, else None.
    """

    eta: float
    lip: float
    kappa: float
    nu: float
    nu_i: tuple[float, ...] | None = None
    m_compact: float | None = None


@dataclass(frozen=True, eq=False)
class QuadraticGame:
    """Block-quadratic game.

    Player i minimizes 0.5 x_i' Q_ii x_i + x_i' (sum_{j != i} Q_ij x_j)
    + c_i' x_i + r_i(x_i), so the joint gradient map is G(x) = H x + c with
    H the full block matrix (Q_ij) and c the stacked linear terms. Diagonal
    blocks must be symmetric; the symmetric part of H must be positive
    definite (strong monotonicity), which is checked at construction.
    """

    dims: tuple[int, ...]
    h: np.ndarray
    c: np.ndarray
    regularizers: tuple[Regularizer, ...] = ()
    noise: NoiseModel = ZeroNoise()

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"player dimensions must be positive, got {dims}")
        n = sum(dims)
        h = np.asarray(self.h, dtype=float)
        c = np.asarray(self.c, dtype=float)
        if h.shape != (n, n):
            raise ValueError(f"coupling matrix must be {(n, n)}, got {h.shape}")
        if c.shape != (n,):
            raise ValueError(f"linear term must have shape {(n,)}, got {c.shape}")
        regs = tuple(self.regularizers) if self.regularizers else tuple(
            Zero() for _ in dims)
        if len(regs) != len(dims):
            raise ValueError(f"{len(regs)} regularizers for {len(dims)} players")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "regularizers", regs)
        offsets = np.cumsum((0,) + dims)
        object.__setattr__(self, "_offsets", offsets)
        for i in range(len(dims)):
            qii = self.block(i, i)
            if not np.allclose(qii, qii.T, atol=1e-9):
                raise ValueError(f"diagonal block {i} must be symmetric")
        sym_min = float(np.linalg.eigvalsh((h + h.T) / 2.0)[0])
        if sym_min <= 0.0:
            raise NotStronglyMonotone(
                f"symmetric part of the coupling matrix has minimum eigenvalue "
                f"{sym_min:.3e}; the gradient map is not strongly monotone")

    @property
    def n_players(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return int(self._offsets[-1])

    def block_slice(self, i: int) -> slice:
        return slice(int(self._offsets[i]), int(self._offsets[i + 1]))

    def block(self, i: int, j: int) -> np.ndarray:
        return self.h[self.block_slice(i), self.block_slice(j)]

    def player_noise(self, i: int) -> NoiseModel:
        """Noise model of player i's gradient block.

        Components of the joint error are iid, so block i carries the share
        nu_i = nu * sqrt(n_i / n) of the total second moment.
        """
        return scaled_noise(self.noise, math.sqrt(self.dims[i] / self.dim))


@dataclass(frozen=True, eq=False)
class AggregativeGame:
    """Scalar Cournot game with linear inverse demand p(y) = d - c_price * y.

    Player i chooses production x_i in [lo_i, hi_i] to minimize
    0.5 a_i x_i^2 + b_i x_i - x_i p(y) with y = sum_j x_j, so the own
    gradient (through its full dependence on x_i) is
    a_i x_i + b_i - d + c_price * y + c_price * x_i.
    Strategy sets are compact boxes by construction. The gradient map's
    Jacobian diag(a_i + c_price) + c_price * ones must be positive definite.
    """

    a: tuple[float, ...]
    b: tuple[float, ...]
    d: float
    c_price: float
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    noises: tuple[NoiseModel, ...] = ()

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        b = tuple(float(v) for v in self.b)
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        n = len(a)
        if n < 1:
            raise ValueError("need at least one player")
        if not (len(b) == len(lo) == len(hi) == n):
            raise ValueError("a, b, lo, hi must all have one entry per player")
        if not all(map(math.isfinite, a + b + lo + hi)) or not math.isfinite(self.d) \
                or not math.isfinite(self.c_price):
            raise ValueError("game parameters must be finite")
        if self.c_price < 0.0:
            raise ValueError(f"price slope must be >= 0, got {self.c_price}")
        if any(l > h for l, h in zip(lo, hi)):
            raise ValueError("strategy boxes require lo <= hi")
        noises = tuple(self.noises) if self.noises else tuple(
            ZeroNoise() for _ in range(n))
        if len(noises) != n:
            raise ValueError(f"{len(noises)} noise models for {n} players")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "c_price", float(self.c_price))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "noises", noises)
        eig_min = float(np.linalg.eigvalsh(self.jacobian())[0])
        if eig_min <= 0.0:
            raise NotStronglyMonotone(
                f"aggregative gradient map has minimum Jacobian eigenvalue "
                f"{eig_min:.3e}; not strongly monotone")

    @property
    def n_players(self) -> int:
        return len(self.a)

    @property
    def dims(self) -> tuple[int, ...]:
        return (1,) * self.n_players

    @property
    def dim(self) -> int:
        return self.n_players

    @property
    def regularizers(self) -> tuple[Regularizer, ...]:
        return tuple(BoxIndicator(np.array([l]), np.array([h]))
                     for l, h in zip(self.lo, self.hi))

    @property
    def aggregate_lipschitz(self) -> tuple[float, ...]:
        """Per-player Lipschitz constants of the gradient in the aggregate."""
        return (self.c_price,) * self.n_players

    def jacobian(self) -> np.ndarray:
        n = self.n_players
        return np.diag(np.asarray(self.a) + self.c_price) + \
            self.c_price * np.ones((n, n))

    def aggregate(self, x: StrategyProfile) -> float:
        return float(np.sum(x.vector))

    def player_gradient(self, i: int, x_i, y) -> np.ndarray:
        """Own gradient of player i at strategy x_i and aggregate estimate y."""
        x_i = np.atleast_1d(np.asarray(x_i, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return self.a[i] * x_i + self.b[i] - self.d + \
            self.c_price * y + self.c_price * x_i

    def player_cost(self, i: int, x_i: float, y: float) -> float:
        return 0.5 * self.a[i] * x_i ** 2 + self.b[i] * x_i + \
            x_i * (self.c_price * y - self.d)


Game = QuadraticGame | AggregativeGame


def gradient_map(game: Game, x: StrategyProfile) -> np.ndarray:
    """Exact joint gradient G(x) stacked over players."""
    if x.dims != tuple(game.dims):
        raise ValueError(f"profile dims {x.dims} do not match game dims {tuple(game.dims)}")
    if isinstance(game, QuadraticGame):
        return game.h @ x.vector + game.c
    y = game.aggregate(x)
    return np.concatenate([
        game.player_gradient(i, x.blocks[i], y) for i in range(game.n_players)])


def monotonicity_constants(game: Game) -> GameConstants:
    """Strong monotonicity modulus, Lipschitz constant, and oracle constants.

    Raises NotStronglyMonotone if the modulus is not positive (unreachable
    for validated instances, kept for raw use).
    """
    if isinstance(game, QuadraticGame):
        sym = (game.h + game.h.T) / 2.0
        eta = float(np.linalg.eigvalsh(sym)[0])
        lip = float(np.linalg.norm(game.h, 2))
        nu = game.noise.nu
        n = game.dim
        nu_i = tuple(nu * math.sqrt(d / n) for d in game.dims)
        m_compact = None
        if all(isinstance(r, BoxIndicator) for r in game.regularizers):
            m_compact = float(sum(r.corner_norm() for r in game.regularizers))
    else:
        jac = game.jacobian()
        eta = float(np.linalg.eigvalsh(jac)[0])
        lip = float(np.linalg.norm(jac, 2))
        nu_i = tuple(nm.nu for nm in game.noises)
        nu = math.sqrt(sum(v ** 2 for v in nu_i))
        m_compact = float(sum(max(abs(l), abs(h))
                              for l, h in zip(game.lo, game.hi)))
    if eta <= 0.0:
        raise NotStronglyMonotone(
            f"strong monotonicity modulus {eta:.3e} is not positive")
    return GameConstants(eta=eta, lip=lip, kappa=lip / eta, nu=nu,
                         nu_i=nu_i, m_compact=m_compact)


def ne_residual(game: Game, x: StrategyProfile, alpha: float) -> float:
    """Fixed-point residual ||x - prox_{alpha r}(x - alpha G(x))||.

    Zero at exactly the Nash equilibria, for any alpha > 0.
    """
    if not (alpha > 0.0 and np.isfinite(alpha)):
        raise ValueError(f"alpha must be finite and > 0, got {alpha}")
    vec = x.vector - alpha * gradient_map(game, x)
    prox_vec = _prox_vector(game, vec, alpha)
    return float(np.linalg.norm(x.vector - prox_vec))


def _prox_vector(game: Game, vec: np.ndarray, alpha: float) -> np.ndarray:
    pieces = []
    offset = 0
    for reg, d in zip(game.regularizers, game.dims):
        pieces.append(prox_apply(reg, vec[offset:offset + d], alpha))
        offset += d
    return np.concatenate(pieces)


def solve_ne_oracle(game: Game, tol: float = 1e-12, alpha: float | None = None,
                    max_iter: int = 200_000) -> StrategyProfile:
    """Deterministic prox-gradient solve of the equilibrium fixed point.

    Iterates x <- prox_{alpha r}(x - alpha G(x)) with the exact gradient
    until the displacement (equal to the fixed-point residual at the current
    iterate) drops to tol. With alpha < 2 eta / lip^2 the iteration is a
    contraction, so this terminates for any validated game; the default step
    alpha = eta / lip^2 is always admissible.
    """
    consts = monotonicity_constants(game)
    if alpha is None:
        alpha = consts.eta / consts.lip ** 2
    if not (0.0 < alpha < 2.0 * consts.eta / consts.lip ** 2):
        raise InvalidStep(
            f"oracle step {alpha} outside (0, 2 eta/L^2) = "
            f"(0, {2.0 * consts.eta / consts.lip ** 2})")
    x = _prox_vector(game, np.zeros(game.dim), alpha)
    profile = StrategyProfile.from_vector(x, game.dims)
    for _ in range(max_iter):
        step = x - alpha * gradient_map(game, profile)
        x_next = _prox_vector(game, step, alpha)
        disp = float(np.linalg.norm(x_next - x))
        x = x_next
        profile = StrategyProfile.from_vector(x, game.dims)
        if disp <= tol:
            return profile
    raise NonConvergence(
        f"equilibrium solve did not reach displacement {tol} in {max_iter} "
        f"iterations", residual=disp, iterations=max_iter)
