"""Entanglement production of operators on multipartite tensor-product spaces."""

from .dnorm import NormCertificate, SolverConfig, dnorm, dnorm_bruteforce, max_product_overlap, schmidt_max
from .factorize import NormalizationError, ProductOperator, product_operator, product_operator_dnorm
from .measure import (
    MeasureResult,
    entanglement_production,
    epsilon_sequence,
    measure_from_norms,
    order_index,
    property_suite,
)
from .states import FamilySpec, expected_epsilon, make_density, make_ket
from .tensor import Ket, MultipartiteOperator, ProductKet, SpaceShape, kron, partial_trace

__all__ = [
    "FamilySpec",
    "Ket",
    "MeasureResult",
    "MultipartiteOperator",
    "NormCertificate",
    "NormalizationError",
    "ProductKet",
    "ProductOperator",
    "SolverConfig",
    "SpaceShape",
    "dnorm",
    "dnorm_bruteforce",
    "entanglement_production",
    "epsilon_sequence",
    "expected_epsilon",
    "kron",
    "make_density",
    "make_ket",
    "max_product_overlap",
    "measure_from_norms",
    "order_index",
    "partial_trace",
    "product_operator",
    "product_operator_dnorm",
    "property_suite",
    "schmidt_max",
]
