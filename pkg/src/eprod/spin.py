"""Thermal spin models: two-site Ising pair, mean-field factorization, spin density matrices.

Spin-1/2 throughout the Ising part, basis ``(up, down)`` = eigenvectors of
``S^z`` with eigenvalues ``(+1/2, -1/2)``.  Dimensionless parameters are the
coupling ``g = beta J S^2`` and field ``b = beta B >= 0``.  All Boltzmann
weights are handled as logarithms so the closed forms survive ``|g|, b`` in
the hundreds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dnorm import SolverConfig
from .measure import entanglement_production, to_base
from .tensor import MultipartiteOperator, ValidationError, kron

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class IsingParams:
    g: float
    b: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.g) and math.isfinite(self.b)):
            raise ValidationError("Ising parameters must be finite")
        if self.b < 0:
            raise ValidationError("field b must be >= 0")


def _logcosh(x: float) -> float:
    x = abs(x)
    return x + math.log1p(math.exp(-2 * x)) - LOG2


def _logaddexp(*xs: float) -> float:
    m = max(xs)
    if m == -math.inf:
        return m
    return m + math.log(sum(math.exp(x - m) for x in xs))


def _pair_log_weights(prm: IsingParams) -> np.ndarray:
    # states up-up, up-down, down-up, down-down
    g, b = prm.g, prm.b
    return np.array([g + b, -g, -g, g - b])


def log_partition(prm: IsingParams) -> float:
    """``log Z`` with ``Z = 2 (e^g cosh b + e^-g)``."""
    return LOG2 + _logaddexp(prm.g + _logcosh(prm.b), -prm.g)


def ising_two_spin_density(prm: IsingParams) -> MultipartiteOperator:
    """Diagonal 4x4 thermal state ``exp{4g S1z S2z + b (S1z + S2z)} / Z``."""
    lw = _pair_log_weights(prm)
    return MultipartiteOperator((2, 2), np.diag(np.exp(lw - log_partition(prm))))


def ising_reduced(prm: IsingParams) -> MultipartiteOperator:
    g, b = prm.g, prm.b
    lz = log_partition(prm)
    up = math.exp(_logaddexp(g + b, -g) - lz)
    down = math.exp(_logaddexp(-g, g - b) - lz)
    return MultipartiteOperator((2,), np.diag([up, down]))


def ising_epsilon_nat(g: float, b: float) -> float:
    x = b + 2 * g
    lcosh = _logaddexp(0.0, 2 * g + _logcosh(b))
    return LOG2 + lcosh + max(0.0, x) - 2 * _logaddexp(0.0, x)


def ising_epsilon(prm: IsingParams, base="natural") -> float:
    """Closed-form measure of the thermal pair:

    ``log[2 (1 + e^{2g} cosh b) sup{1, e^{b+2g}} / (1 + e^{b+2g})^2]``.
    """
    return to_base(ising_epsilon_nat(prm.g, prm.b), base)


def ising_magnetization(prm: IsingParams) -> float:
    """``e^{2g} sinh b / [2 (1 + e^{2g} cosh b)]``."""
    g, b = prm.g, prm.b
    if b == 0:
        return 0.0
    log_sinh = b + math.log1p(-math.exp(-2 * b)) - LOG2
    log_den = LOG2 + _logaddexp(0.0, 2 * g + _logcosh(b))
    return math.exp(2 * g + log_sinh - log_den)


def ising_pipeline_epsilon(prm: IsingParams, cfg: SolverConfig | None = None, base="natural"):
    """Same quantity through the generic norm/product-operator route."""
    return entanglement_production(ising_two_spin_density(prm), cfg, base)


@dataclass(frozen=True)
class LimitRow:
    key: str
    quantity: str
    ray: str
    estimate: float
    expected: float
    settled: bool

    @property
    def error(self) -> float:
        return abs(self.estimate - self.expected)

    def passed(self, tol: float = 1e-6) -> bool:
        return self.error <= tol and self.settled


def _ray(fn, path, magnitude: float, steps: int = 10):
    ts = [magnitude * k / steps for k in range(1, steps + 1)]
    vals = [fn(*path(t)) for t in ts]
    return vals[-1], abs(vals[-1] - vals[-2]) < 1e-9


def ising_limit_table(magnitude: float = 300.0) -> list[LimitRow]:
    """Evaluate the measure and magnetization along rays towards each limit.

    Diverging parameters grow linearly in the ray parameter ``t`` up to
    ``magnitude``; vanishing ones shrink as ``exp(-t/10)``.  A limit counts
    as settled when the last two ray points differ by less than 1e-9.
    """
    eps = ising_epsilon_nat

    def mag(g, b):
        return ising_magnetization(IsingParams(g, b))

    def small(t):
        return math.exp(-t / 10)

    rows = []

    def add(key, quantity, ray, fn, path, expected):
        est, settled = _ray(fn, path, magnitude)
        rows.append(LimitRow(key, quantity, ray, est, expected, settled))

    for g in (-2.0, -0.5, 0.5, 1.0, 3.0):
        add("eq77", "epsilon", f"g={g}, b->0", eps, lambda t, g=g: (g, small(t)), abs(g) - _logcosh(g))
    add("eq78", "epsilon", "b->0, g->+inf", eps, lambda t: (t, small(t)), LOG2)
    add("eq78", "epsilon", "b->0, g->-inf", eps, lambda t: (-t, small(t)), LOG2)
    add("eq79", "epsilon", "b->0 first, then g->0", eps, lambda t: (small(t), small(2 * t)), 0.0)
    add("eq79", "epsilon", "g->0 first, then b->0", eps, lambda t: (small(2 * t), small(t)), 0.0)
    add("eq79", "magnetization", "g,b->0", mag, lambda t: (small(t), small(t)), 0.0)
    for g in (-1.0, 0.0, 1.0):
        add("eq80", "epsilon", f"g={g}, b->inf", eps, lambda t, g=g: (g, t), 0.0)
        add("eq80", "magnetization", f"g={g}, b->inf", mag, lambda t, g=g: (g, t), 0.5)
    # T -> 0 at fixed J, B: (g, b) = t (gamma, 1), so b + 2g = t (1 + 2 gamma)
    for gamma, label, e_lim, m_lim in (
        (-1.0, "b+2g->-inf", LOG2, 0.0),
        (-0.5, "b+2g=0", math.log(0.75), 1 / 6),
        (-0.25, "b+2g->+inf", 0.0, 0.5),
        (0.5, "b+2g->+inf", 0.0, 0.5),
    ):
        path = lambda t, gamma=gamma: (gamma * t, t)  # noqa: E731
        add("eq81", "epsilon", f"{label} (g={gamma}t, b=t)", eps, path, e_lim)
        add("eq82", "magnetization", f"{label} (g={gamma}t, b=t)", mag, path, m_lim)
    return rows


@dataclass(frozen=True)
class MeanFieldResult:
    factors: tuple[MultipartiteOperator, ...]
    M: float
    iterations: int

    def assemble(self) -> MultipartiteOperator:
        return kron(self.factors)


class ConvergenceError(RuntimeError):
    pass


def meanfield_magnetization(J0: float, B: float, beta: float, damping: float = 0.5,
                            tol: float = 1e-12, max_iter: int = 10_000) -> tuple[float, int]:
    """Damped fixed point of ``m = tanh(beta (J0 m + B) / 2) / 2`` from ``m = 1/2``."""
    m = 0.5
    for it in range(1, max_iter + 1):
        new = (1 - damping) * m + damping * 0.5 * math.tanh(0.5 * beta * (J0 * m + B))
        if abs(new - m) < tol:
            return new, it
        m = new
    raise ConvergenceError(f"mean-field iteration did not converge in {max_iter} steps (beta*J0={beta * J0})")


def meanfield_factorized(N: int, J0: float, B: float, beta: float, **kw) -> MeanFieldResult:
    """Per-site thermal operators of the long-range mean-field Ising model."""
    if N < 1:
        raise ValidationError("N must be >= 1")
    if not beta > 0:
        raise ValidationError("beta must be positive")
    m, it = meanfield_magnetization(J0, B, beta, **kw)
    h = beta * (J0 * m + B)
    up = 0.5 * (1 + math.tanh(h / 2))
    site = MultipartiteOperator((2,), np.diag([up, 1 - up]))
    return MeanFieldResult((site,) * N, m, it)


@dataclass(frozen=True)
class SpinCorrelations:
    """Equal-time spin correlations on N sites.

    ``corr[i, j] = <S_j^z S_i^z>``; ``full``, when given, has shape
    ``(N, N, 3, 3)`` with ``full[i, j, a, b] = <S_j^b S_i^a>``.
    """

    N: int
    corr: np.ndarray
    mag: np.ndarray | None = None
    S: float = 0.5
    full: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def uniform(cls, N: int, M: float, S: float = 0.5) -> "SpinCorrelations":
        corr = np.full((N, N), M * M)
        np.fill_diagonal(corr, S * S)
        return cls(N, corr, np.full(N, M), S)


def spin_R1(sc: SpinCorrelations, tol: float = 1e-10) -> MultipartiteOperator:
    """First-order z-component spin density matrix over the site index."""
    corr = np.asarray(sc.corr, dtype=complex)
    if corr.shape != (sc.N, sc.N):
        raise ValidationError(f"corr must be {sc.N}x{sc.N}")
    if np.max(np.abs(corr - corr.conj().T)) > tol:
        raise ValidationError("spin correlation matrix is not symmetric")
    if sc.full is not None:
        full = np.asarray(sc.full)
        tr = float(np.real(sum(full[i, i, a, a] for i in range(sc.N) for a in range(3))))
        want = sc.N * sc.S * (sc.S + 1)
        if abs(tr - want) > 1e-8 * max(1.0, want):
            raise ValidationError(f"Tr R1 = {tr}, expected N S (S+1) = {want}")
    return MultipartiteOperator((sc.N,), corr)


def plane_wave_expectations(corr: np.ndarray) -> np.ndarray:
    """``<k|R1|k>`` for the plane waves ``exp(i k a) / sqrt(N)`` on a ring."""
    corr = np.asarray(corr, dtype=complex)
    N = corr.shape[0]
    a = np.arange(N)
    k = 2 * np.pi * np.arange(N) / N
    waves = np.exp(1j * np.outer(a, k)) / math.sqrt(N)
    return np.real(np.einsum("ik,ij,jk->k", waves.conj(), corr, waves))
