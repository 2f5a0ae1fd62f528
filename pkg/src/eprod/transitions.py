"""Regime formulas tying entanglement production to phase transitions.

Each regime supplies norm scalings for the reduced density matrices; the
measure then follows from :func:`eprod.measure.measure_from_norms` (particle
density matrices, trace ``N!/(N-p)!``) or from the plain norm ratio (spin
density matrices, whose product operator is ``R_1^{(x) p}``).  The
functions return the leading-order value; ``finite_n=True`` returns the
value at the given ``N`` including the correction terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure import log_hf_ratio, measure_from_norms, order_index_from, to_base
from .tensor import ValidationError

REGIMES = ("above_Tc", "below_Tc")


@dataclass(frozen=True)
class RegimeInput:
    p: int
    N: int
    regime: str
    S: float = 0.5
    M: float = 0.0
    c_p: float = 1.0
    c_1: float = 1.0

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValidationError(f"regime must be one of {REGIMES}")
        if not 1 <= self.p <= self.N:
            raise ValidationError(f"need 1 <= p <= N, got p={self.p}, N={self.N}")
        if not 0 <= self.M <= self.S:
            raise ValidationError("magnetization must lie in [0, S]")
        if self.c_p <= 0 or self.c_1 <= 0:
            raise ValidationError("c_p and c_1 must be positive")


def _log_falling(N: int, p: int) -> float:
    """log N!/(N-p)!"""
    return p * math.log(N) - log_hf_ratio(N, p)


def bec_norms(r: RegimeInput) -> tuple[float, float]:
    """(||rho_p||_D, ||rho_1||) for Bose condensation."""
    if r.regime == "above_Tc":
        # norms factorize: ||rho_p|| = ||rho_1||^p
        return r.c_1**r.p, r.c_1
    return math.exp(_log_falling(r.N, r.p)), float(r.N)


def bec_epsilon(r: RegimeInput, base="natural", finite_n: bool = False) -> float:
    """Above Tc: ``log[(N-p)! N^p / N!]``; below Tc: 0."""
    norm_p, norm_1 = bec_norms(r)
    return measure_from_norms(norm_p, norm_1, r.N, r.p, base)


def sc_norms(r: RegimeInput) -> tuple[float, float]:
    """(||rho_p||_D, ||rho_1||) for the superconducting transition."""
    if r.regime == "above_Tc":
        return r.c_1**r.p, r.c_1
    k = (r.p - 1) / 2 if r.p % 2 else r.p / 2
    return r.c_p * r.N**k, r.c_1


def sc_epsilon(r: RegimeInput, base="natural", finite_n: bool = False) -> float:
    """Above Tc: ``p(p-1)/(2N)``; below Tc: ``(p-1)/2 log N`` (p odd), ``p/2 log N`` (p even).

    Below Tc the leading term requires ``N >> p`` (guarded as ``N >= 10 p``).
    """
    if r.regime == "below_Tc" and r.N < 10 * r.p:
        raise ValidationError("the superconducting scaling needs N >= 10 p")
    if finite_n:
        norm_p, norm_1 = sc_norms(r)
        return measure_from_norms(norm_p, norm_1, r.N, r.p, base)
    if r.regime == "above_Tc":
        return to_base(r.p * (r.p - 1) / (2 * r.N), base)
    k = (r.p - 1) / 2 if r.p % 2 else r.p / 2
    return to_base(k * math.log(r.N), base)


def magnetic_norms(r: RegimeInput) -> tuple[float, float]:
    """(||R_p||_D, ||R_1||) for the ferromagnetic transition (mean field, large N)."""
    S, M, N, p = r.S, r.M, r.N, r.p
    norm_1 = S * S + N * M * M
    if r.regime == "above_Tc":
        return double_factorial(p) * S ** (2 * p), norm_1
    return float(N) ** p * M ** (2 * p), norm_1


def magnetic_epsilon(r: RegimeInput, base="natural", finite_n: bool = False) -> float:
    """Above Tc: ``log (2p-1)!!``; below Tc: 0 to leading order in N.

    The finite-N value below Tc is ``p log[N M^2 / (S^2 + N M^2)]``.
    """
    if r.regime == "above_Tc":
        if r.M != 0:
            raise ValidationError("above Tc the magnetization vanishes")
        return to_base(math.log(double_factorial_oracle(r.p)), base)
    if r.M <= 0:
        raise ValidationError("below Tc needs a nonzero magnetization")
    if not finite_n:
        return 0.0
    norm_p, norm_1 = magnetic_norms(r)
    return to_base(math.log(norm_p) - r.p * math.log(norm_1), base)


def double_factorial(p: int) -> int:
    """``(2p-1)!! = (2p)! / (2^p p!)`` as an exact integer."""
    if p < 0:
        raise ValueError("p must be >= 0")
    return math.factorial(2 * p) // (2**p * math.factorial(p))


def _pairings(items: tuple[int, ...]):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for k in range(len(rest)):
        for tail in _pairings(rest[:k] + rest[k + 1 :]):
            yield ((first, rest[k]),) + tail


def pairing_count(p: int, limit: int = 7) -> int:
    """Number of perfect pairings of 2p labelled items, by enumeration (p <= limit)."""
    if p > limit:
        raise ValueError(f"enumeration limited to p <= {limit}")
    return sum(1 for _ in _pairings(tuple(range(2 * p))))


def gaussian_moment(k: int) -> float:
    """``E[X^k]`` for standard normal X, by Gauss-Hermite quadrature (exact for polynomials)."""
    x, w = np.polynomial.hermite_e.hermegauss(k // 2 + 2)
    return float(np.sum(w * x**k) / math.sqrt(2 * math.pi))


def double_factorial_oracle(p: int) -> int:
    """``(2p-1)!!`` cross-checked against pairing enumeration (p <= 7) or Gaussian moments (p <= 15)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    value = double_factorial(p)
    if p <= 7:
        check = pairing_count(p)
        if check != value:
            raise ArithmeticError(f"pairing count {check} != (2p-1)!! = {value}")
    elif p <= 15:
        moment = gaussian_moment(2 * p)
        if abs(moment - value) > 1e-9 * value:
            raise ArithmeticError(f"Gaussian moment {moment} != (2p-1)!! = {value}")
    return value


ORDER_TAGS = ("total", "even", "none")


def classify_order(norm_scaling, total_min: float = 0.9, even_tol: float = 0.05) -> str:
    """Classify long-range order from ``(p, norm, trace)`` triples.

    ``omega(p) = log norm / log trace``.  Total order when every omega is at
    least ``total_min``; even order when every even-p omega is within
    ``even_tol`` of 1/2 and every odd-p omega lies more than ``even_tol``
    below the smallest even-p omega; otherwise none.
    """
    data = sorted((int(p), float(n), float(t)) for p, n, t in norm_scaling)
    ps = {p for p, _, _ in data}
    if not {1, 2} <= ps:
        raise ValidationError("classify_order needs at least p = 1 and p = 2")
    omega = {p: order_index_from(n, t) for p, n, t in data}
    if min(omega.values()) >= total_min:
        return "total"
    even = [w for p, w in omega.items() if p % 2 == 0]
    odd = [w for p, w in omega.items() if p % 2 == 1]
    if all(abs(w - 0.5) <= even_tol for w in even) and all(w < min(even) - even_tol for w in odd):
        return "even"
    return "none"


def synthetic_scaling(kind: str, N: int, ps=(1, 2, 3, 4), constants=None) -> list[tuple[int, float, float]]:
    """(p, norm, trace) triples following one of the order scaling laws.

    ``trace = N!/(N-p)!``; norms: total ~ trace, even ~ sqrt(trace / N) for
    odd p and sqrt(trace) for even p, none ~ constant.
    """
    out = []
    for p in ps:
        c = 1.0 if constants is None else constants[p]
        log_tr = _log_falling(N, p)
        if kind == "total":
            log_n = log_tr
        elif kind == "even":
            log_n = 0.5 * (log_tr - math.log(N)) if p % 2 else 0.5 * log_tr
        elif kind == "none":
            log_n = 0.0
        else:
            raise ValueError(kind)
        out.append((p, c * math.exp(log_n), math.exp(log_tr)))
    return out


def regime_table(N: int, ps=(1, 2, 3, 4), S: float = 0.5, M: float = 0.5, base="natural") -> list[dict]:
    """Rows ``transition, regime, p, N, epsilon, omega`` for all three transitions."""
    rows = []
    for p in ps:
        for regime in REGIMES:
            r = RegimeInput(p, N, regime)
            norm_p, _ = bec_norms(r)
            rows.append(dict(transition="bec", regime=regime, p=p, N=N,
                             epsilon=bec_epsilon(r, base), omega=_omega(norm_p, _log_falling(N, p))))
            norm_p, _ = sc_norms(r)
            eps = sc_epsilon(r, base) if (regime == "above_Tc" or N >= 10 * p) else float("nan")
            rows.append(dict(transition="superconducting", regime=regime, p=p, N=N,
                             epsilon=eps, omega=_omega(norm_p, _log_falling(N, p))))
            rm = RegimeInput(p, N, regime, S=S, M=0.0 if regime == "above_Tc" else M)
            norm_p, _ = magnetic_norms(rm)
            log_tr = p * math.log(N * S * S)  # z-component: Tr R_p ~ (N S^2)^p
            rows.append(dict(transition="magnetic", regime=regime, p=p, N=N,
                             epsilon=magnetic_epsilon(rm, base), omega=_omega(norm_p, log_tr)))
    return rows


def _omega(norm: float, log_trace: float) -> float:
    if norm <= 0 or log_trace == 0:
        return float("nan")
    return math.log(norm) / log_trace
