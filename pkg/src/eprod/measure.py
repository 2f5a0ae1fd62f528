"""Entanglement-production measure and the checks that go with it.

``epsilon(A) = log(||A||_D / ||A_prod||_D)`` where ``||.||_D`` is the
product-state norm from :mod:`eprod.dnorm` and ``A_prod`` the product
operator from :mod:`eprod.factorize`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from .dnorm import NormCertificate, SolverConfig, dnorm
from .factorize import product_operator, product_operator_dnorm
from .tensor import (
    MultipartiteOperator,
    ValidationError,
    apply_local_unitaries,
    as_operator,
    kron,
    random_hermitian,
    random_unitary,
    spectral_norm,
)

LN2 = math.log(2.0)
BASES = {"natural": 1.0, "e": 1.0, "two": LN2, "2": LN2}


def base_tag(base) -> str:
    key = str(base).lower()
    if key not in BASES:
        raise ValueError(f"unknown logarithm base {base!r}; use 'natural' or 'two'")
    return "two" if BASES[key] == LN2 else "natural"


def to_base(value_nat: float, base) -> float:
    """Convert a natural-log quantity to the requested base."""
    return value_nat / BASES[str(base).lower()] if base_tag(base) == "two" else value_nat


@dataclass(frozen=True)
class MeasureResult:
    epsilon: float
    norm_A: float
    norm_prod: float
    base: str = "natural"
    certificate: NormCertificate | None = field(default=None, repr=False)
    converged: bool = True

    def in_base(self, base) -> "MeasureResult":
        nat = self.epsilon * (LN2 if self.base == "two" else 1.0)
        return replace(self, epsilon=to_base(nat, base), base=base_tag(base))


def entanglement_production(A, cfg: SolverConfig | None = None, base="natural") -> MeasureResult:
    A = as_operator(A)
    P = product_operator(A)
    cert = dnorm(A, cfg)
    norm_prod = product_operator_dnorm(P)
    if cert.value <= 0 or norm_prod <= 0:
        raise ValidationError("vanishing product-state norm; the measure is undefined")
    eps = math.log(cert.value) - math.log(norm_prod)
    return MeasureResult(to_base(eps, base), cert.value, norm_prod, base_tag(base), cert, cert.converged)


def measure_from_norms(norm_p: float, norm_1: float, N: int, p: int, base="natural") -> float:
    """Closed form for reduced density matrices with Tr rho_p = N!/(N-p)!.

    ``log[(N-p)! N^p ||rho_p|| / (N! ||rho_1||^p)]``, factorials in log space.
    """
    if not 1 <= p <= N:
        raise ValidationError(f"need 1 <= p <= N, got p={p}, N={N}")
    if norm_p <= 0 or norm_1 <= 0:
        raise ValidationError("norms must be positive")
    val = log_hf_ratio(N, p) + math.log(norm_p) - p * math.log(norm_1)
    return to_base(val, base)


def log_hf_ratio(N: int, p: int) -> float:
    """``log[(N-p)! N^p / N!]``, accurate for large N.

    Differences of ``lgamma`` lose about 1e-10 absolute at N ~ 10^6; for
    moderate p the sum ``-sum_k log1p(-k/N)`` keeps full relative precision.
    """
    if p <= 4096:
        return -math.fsum(math.log1p(-k / N) for k in range(1, p))
    return math.lgamma(N - p + 1) + p * math.log(N) - math.lgamma(N + 1)


@dataclass(frozen=True)
class OrderIndexResult:
    omega: float
    norm_used: str
    trace_abs: float
    norm: float = float("nan")


def order_index_from(norm: float, trace_abs: float) -> float:
    if trace_abs <= 0:
        raise ValidationError("order index undefined: |Tr A| = 0")
    if abs(math.log(trace_abs)) < 1e-12:
        raise ValidationError("order index undefined: |Tr A| = 1 makes log|Tr A| vanish")
    if norm <= 0:
        raise ValidationError("order index undefined for a zero norm")
    return math.log(norm) / math.log(trace_abs)


def order_index(A, norm_used: str = "dnorm", cfg: SolverConfig | None = None) -> OrderIndexResult:
    """``omega(A) = log||A|| / log|Tr A|``."""
    A = as_operator(A)
    if norm_used == "dnorm":
        norm = dnorm(A, cfg).value
    elif norm_used == "spectral":
        norm = spectral_norm(A)
    else:
        raise ValueError("norm_used must be 'dnorm' or 'spectral'")
    tr = abs(A.trace())
    return OrderIndexResult(order_index_from(norm, tr), norm_used, tr, norm)


@dataclass
class PropertyCheck:
    name: str
    passed: bool
    value: float
    detail: str = ""


@dataclass
class PropertyReport:
    epsilon: float
    checks: dict[str, PropertyCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def lines(self) -> list[str]:
        return [
            f"{c.name:<16} {'PASS' if c.passed else 'FAIL'}  {c.value:.3e}  {c.detail}"
            for c in self.checks.values()
        ]


def property_suite(
    A,
    cfg: SolverConfig | None = None,
    *,
    n_unitaries: int = 20,
    deltas: Sequence[float] = (1e-2, 1e-3, 1e-4),
    tol: float = 1e-8,
    zero_tol: float = 1e-9,
    seed: int = 0,
) -> PropertyReport:
    """Check the measure's defining properties on one operator.

    * nonentangling: the measure of the product operator vanishes;
    * additive: ``eps(A (x) A) = 2 eps(A)`` (only when ``total_dim**2 <= 4096``);
    * local unitary invariance over ``n_unitaries`` Haar-random tuples;
    * continuity: ``|eps(A + delta B) - eps(A)|`` shrinks with delta for a
      random Hermitian ``B`` of unit spectral norm;
    * semipositivity is recorded, never failed.
    """
    cfg = cfg or SolverConfig()
    A = as_operator(A)
    rng = np.random.default_rng(seed)
    base = entanglement_production(A, cfg)
    eps = base.epsilon
    checks: dict[str, PropertyCheck] = {}

    prod = product_operator(A).assemble()
    e0 = entanglement_production(prod, cfg).epsilon
    checks["nonentangling"] = PropertyCheck("nonentangling", abs(e0) <= zero_tol, abs(e0))

    if A.total_dim**2 <= 4096:
        e2 = entanglement_production(kron([A, A]), cfg).epsilon
        d = abs(e2 - 2 * eps)
        checks["additive"] = PropertyCheck("additive", d <= tol, d)

    worst = 0.0
    for _ in range(n_unitaries):
        U = [random_unitary(d, rng) for d in A.dims]
        worst = max(worst, abs(entanglement_production(apply_local_unitaries(A, U), cfg).epsilon - eps))
    checks["local_unitary"] = PropertyCheck("local_unitary", worst <= tol, worst, f"{n_unitaries} tuples")

    B = random_hermitian(A.dims, rng)
    B = B.scaled(1.0 / spectral_norm(B))
    # perturbed operators are generic (indefinite, nearly flat maxima); the
    # shrinkage test needs far less than full solver accuracy
    light = replace(cfg, restarts=min(cfg.restarts, 8), tol=max(cfg.tol, 1e-11), max_sweeps=min(cfg.max_sweeps, 200))
    diffs = []
    for delta in deltas:
        Ad = A + B.scaled(delta)
        diffs.append(abs(entanglement_production(Ad, light).epsilon - eps))
    shrinking = diffs[-1] <= 0.5 * diffs[0] + 1e-8 and diffs[-1] <= 1e-2
    checks["continuity"] = PropertyCheck(
        "continuity", shrinking, diffs[-1], " ".join(f"{d:.1e}:{x:.2e}" for d, x in zip(deltas, diffs))
    )

    checks["semipositive"] = PropertyCheck("semipositive", True, eps, "recorded only" + ("" if eps >= -tol else " (negative)"))
    return PropertyReport(eps, checks)


@dataclass(frozen=True)
class SequencePoint:
    size: int
    result: MeasureResult | None
    error: str | None = None
    diff: float | None = None

    @property
    def epsilon(self) -> float:
        return self.result.epsilon if self.result is not None else float("nan")

    @property
    def per_size(self) -> float:
        return self.epsilon / self.size


def epsilon_sequence(
    generator: Callable[[int], MultipartiteOperator],
    sizes: Iterable[int],
    cfg: SolverConfig | None = None,
    base="natural",
) -> list[SequencePoint]:
    """Evaluate the measure along a size-indexed family.

    Errors at one size are recorded and the sequence continues; ``diff`` is
    the first difference with the previous successful size.
    """
    out: list[SequencePoint] = []
    prev = None
    for n in sizes:
        try:
            res = entanglement_production(generator(n), cfg, base)
        except (ValueError, MemoryError) as exc:
            out.append(SequencePoint(n, None, f"{type(exc).__name__}: {exc}"))
            continue
        diff = None if prev is None else res.epsilon - prev
        prev = res.epsilon
        out.append(SequencePoint(n, res, None, diff))
    return out
