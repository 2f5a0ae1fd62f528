"""Nonentangling counterpart of an operator.

For ``A`` on ``H_1 (x) ... (x) H_p`` the product operator is

    A_prod = Tr(A) / prod_i Tr(A_i) * (A_1 (x) ... (x) A_p)

with ``A_i`` the partial trace of ``A`` onto partite ``i``.  The per-factor
normalization constants are irrelevant once the global ratio is applied, so
every ``A_i`` is the bare partial trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .tensor import MultipartiteOperator, ValidationError, as_operator, kron, partial_trace, spectral_norm


class NormalizationError(ValueError):
    """Trace normalization Tr(A_prod) = Tr(A) cannot be satisfied (zero trace)."""


@dataclass(frozen=True)
class ProductOperator:
    factors: tuple[MultipartiteOperator, ...]
    scale: complex
    source_trace: complex

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.dims[0] for f in self.factors)

    def assemble(self) -> MultipartiteOperator:
        """Dense (or Gram, when the scale allows it) matrix of the product operator."""
        return kron(self.factors).scaled(self.scale)

    def trace(self) -> complex:
        return self.scale * math.prod(f.trace() for f in self.factors)


def reduce_single(A, i: int) -> MultipartiteOperator:
    """Partial trace of ``A`` onto partite ``i`` (0-based)."""
    A = as_operator(A)
    if not 0 <= i < A.p:
        raise ValidationError(f"partite index {i} out of range for p={A.p}")
    return partial_trace(A, [i])


def product_operator(A, trace_tol: float = 1e-14) -> ProductOperator:
    A = as_operator(A)
    tr = A.trace()
    scale_ref = max(1.0, float(np.max(np.abs(A.diagonal()))))
    if abs(tr) <= trace_tol * scale_ref:
        raise NormalizationError("Tr(A) = 0: the trace normalization of the product operator is unsatisfiable")
    factors = tuple(reduce_single(A, i) for i in range(A.p))
    traces = [f.trace() for f in factors]
    for i, t in enumerate(traces):
        if abs(t) <= trace_tol * scale_ref:
            raise NormalizationError(f"reduced operator {i} has zero trace; normalization is unsatisfiable")
    scale = tr / math.prod(traces)
    return ProductOperator(factors, complex(scale), complex(tr))


def product_operator_dnorm(P: ProductOperator) -> float:
    """Product-state norm of a product operator, factor by factor.

    ``sup |prod_i (phi_i, A_i phi'_i)|`` splits into independent suprema,
    each of which is a spectral norm.
    """
    return abs(P.scale) * math.prod(spectral_norm(f) for f in P.factors)
