"""State families with known entanglement-production values.

Basis labels ``|1>, |2>, ...`` map to indices ``0, 1, ...``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .measure import to_base
from .tensor import Ket, MultipartiteOperator

FAMILIES = (
    "epr",
    "bell",
    "ghz",
    "multicat",
    "multimode",
    "hartree_fock",
    "hf_reduced",
    "mixed_multimode",
    "separable_example",
)
PURE_FAMILIES = ("epr", "bell", "ghz", "multicat", "multimode", "hartree_fock")
HF_MAX_N = 8
NORM_TOL = 1e-10


class FamilyError(ValueError):
    pass


def _canonical(name: str) -> str:
    name = name.lower().replace("-", "_")
    aliases = {"hf": "hartree_fock", "separable": "separable_example", "mc": "multicat", "mm": "multimode"}
    return aliases.get(name, name)


@dataclass(frozen=True)
class FamilySpec:
    """Family tag, partite count ``N`` and family parameters.

    Recognized params: ``sign`` (+1/-1) for epr/bell/ghz; ``c1``, ``c2`` for
    multicat; ``coeffs`` for multimode; ``statistics`` ('fermi' or 'bose')
    for the Hartree-Fock families; ``p`` for hf_reduced and mixed_multimode;
    ``weights`` and ``unit_trace`` for mixed_multimode.
    """

    family: str
    N: int = 2
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        fam = _canonical(self.family)
        if fam not in FAMILIES:
            raise FamilyError(f"unknown family {self.family!r}")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", dict(self.params))
        N = int(self.N)
        object.__setattr__(self, "N", N)
        if fam in ("epr", "bell", "separable_example") and N != 2:
            raise FamilyError(f"{fam} is bipartite, got N={N}")
        if N < 1:
            raise FamilyError("N must be positive")
        if fam in ("hartree_fock", "hf_reduced") and N > HF_MAX_N:
            raise FamilyError(f"Hartree-Fock states are limited to N <= {HF_MAX_N}")
        if fam == "multicat":
            c1, c2 = self.multicat_coeffs()
            if abs(abs(c1) ** 2 + abs(c2) ** 2 - 1) > NORM_TOL:
                raise FamilyError("multicat coefficients must satisfy |c1|^2 + |c2|^2 = 1")
        if fam == "multimode":
            c = self.coeffs()
            if abs(np.sum(np.abs(c) ** 2) - 1) > NORM_TOL:
                raise FamilyError("multimode coefficients must satisfy sum |c_n|^2 = 1")
        if fam == "hf_reduced":
            p = self.p
            if not 1 <= p <= N - 1:
                raise FamilyError(f"hf_reduced needs 1 <= p <= N-1, got p={p}, N={N}")
        if fam == "mixed_multimode":
            w = self.weights()
            if np.any(w < -NORM_TOL) or np.any(w > 1 + NORM_TOL) or abs(w.sum() - 1) > 1e-8:
                raise FamilyError("populations must lie in [0, 1] and sum to 1")
            if not 1 <= self.p <= N:
                raise FamilyError(f"mixed_multimode needs 1 <= p <= N, got p={self.p}, N={N}")
        if fam in ("hartree_fock", "hf_reduced") and self.statistics not in ("bose", "fermi"):
            raise FamilyError("statistics must be 'bose' or 'fermi'")

    @property
    def sign(self) -> int:
        s = self.params.get("sign", 1)
        if s in ("+", "plus"):
            return 1
        if s in ("-", "minus"):
            return -1
        s = int(s)
        if s not in (1, -1):
            raise FamilyError("sign must be +1 or -1")
        return s

    @property
    def p(self) -> int:
        return int(self.params.get("p", self.N))

    @property
    def statistics(self) -> str:
        return str(self.params.get("statistics", "fermi")).lower()

    def multicat_coeffs(self) -> tuple[complex, complex]:
        c1 = complex(self.params.get("c1", 1 / math.sqrt(2)))
        if "c2" in self.params:
            c2 = complex(self.params["c2"])
        else:
            c2 = complex(math.sqrt(max(0.0, 1 - abs(c1) ** 2)))
        return c1, c2

    def coeffs(self) -> np.ndarray:
        return np.asarray(self.params["coeffs"], dtype=complex)

    def weights(self) -> np.ndarray:
        return np.asarray(self.params["weights"], dtype=float)


def _aligned_ket(N: int, coeffs) -> Ket:
    """sum_n c_n |n n ... n> on N partites of dimension len(coeffs)."""
    m = len(coeffs)
    amp = np.zeros(m**N, dtype=complex)
    step = sum(m**k for k in range(N))
    for n, c in enumerate(coeffs):
        amp[n * step] = c
    return Ket((m,) * N, amp)


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _symmetrized(modes, d: int, statistics: str) -> np.ndarray:
    """Normalized (anti)symmetrization of distinct modes over len(modes) partites of dimension d."""
    k = len(modes)
    v = np.zeros(d**k, dtype=complex)
    amp = 1 / math.sqrt(math.factorial(k))
    for perm in itertools.permutations(range(k)):
        idx = np.ravel_multi_index([modes[i] for i in perm], (d,) * k)
        s = _perm_sign(perm) if statistics == "fermi" else 1
        v[idx] = s * amp
    return v


def hartree_fock_ket(N: int, statistics: str = "fermi") -> Ket:
    if N > HF_MAX_N:
        raise FamilyError(f"Hartree-Fock states are limited to N <= {HF_MAX_N}")
    return Ket((N,) * N, _symmetrized(list(range(N)), N, statistics))


def make_ket(spec: FamilySpec) -> Ket:
    fam = spec.family
    r2 = 1 / math.sqrt(2)
    if fam == "epr":
        amp = np.array([0, r2, spec.sign * r2, 0], dtype=complex)
        return Ket((2, 2), amp)
    if fam == "bell":
        return _aligned_ket(2, [r2, spec.sign * r2])
    if fam == "ghz":
        return _aligned_ket(spec.N, [r2, spec.sign * r2])
    if fam == "multicat":
        return _aligned_ket(spec.N, list(spec.multicat_coeffs()))
    if fam == "multimode":
        return _aligned_ket(spec.N, list(spec.coeffs()))
    if fam == "hartree_fock":
        return hartree_fock_ket(spec.N, spec.statistics)
    raise FamilyError(f"{fam} is not a pure-state family")


def hf_reduced(N: int, p: int, statistics: str = "fermi") -> MultipartiteOperator:
    """Reduced operator of the Hartree-Fock projector on the first ``p`` partites.

    Tracing ``N - p`` partites out of the N-mode (anti)symmetrized state
    leaves an equal mixture of the p-particle (anti)symmetrized states over
    all p-subsets of modes, weight ``1 / C(N, p)`` each; this is built
    directly in Gram form instead of through the ``N**N`` ket.
    """
    if N > HF_MAX_N:
        raise FamilyError(f"Hartree-Fock states are limited to N <= {HF_MAX_N}")
    if not 1 <= p <= N - 1:
        raise FamilyError(f"hf_reduced needs 1 <= p <= N-1, got p={p}, N={N}")
    subsets = list(itertools.combinations(range(N), p))
    w = 1 / math.sqrt(len(subsets))
    cols = [w * _symmetrized(list(T), N, statistics) for T in subsets]
    V = np.stack(cols, axis=1)
    op = MultipartiteOperator.from_gram((N,) * p, V)
    if V.shape[1] >= V.shape[0]:
        return MultipartiteOperator((N,) * p, op.entries)
    return op


def mixed_multimode(N: int, p: int, weights, unit_trace: bool = False) -> MultipartiteOperator:
    """``N!/(N-p)! * sum_n w_n |n...n><n...n|`` on p partites of dimension m."""
    w = np.asarray(weights, dtype=float)
    m = w.size
    scale = 1.0 if unit_trace else math.exp(math.lgamma(N + 1) - math.lgamma(N - p + 1))
    diag = np.zeros(m**p)
    step = sum(m**k for k in range(p))
    for n in range(m):
        diag[n * step] = scale * w[n]
    return MultipartiteOperator((m,) * p, np.diag(diag))


def separable_example() -> MultipartiteOperator:
    return MultipartiteOperator((2, 2), np.diag([0.5, 0, 0, 0.5]))


def make_density(spec: FamilySpec) -> MultipartiteOperator:
    fam = spec.family
    if fam in PURE_FAMILIES:
        return MultipartiteOperator.projector(make_ket(spec))
    if fam == "hf_reduced":
        return hf_reduced(spec.N, spec.p, spec.statistics)
    if fam == "mixed_multimode":
        return mixed_multimode(spec.N, spec.p, spec.weights(), bool(spec.params.get("unit_trace", False)))
    if fam == "separable_example":
        return separable_example()
    raise FamilyError(f"no density for {fam}")


def expected_epsilon(spec: FamilySpec, base="natural") -> float:
    """Closed-form value of the measure for a family, natural log unless ``base='two'``."""
    fam = spec.family
    N = spec.N
    if fam in ("epr", "bell", "separable_example"):
        val = math.log(2)
    elif fam == "ghz":
        val = (N - 1) * math.log(2)
    elif fam == "multicat":
        c1, c2 = spec.multicat_coeffs()
        val = (1 - N) * math.log(max(abs(c1) ** 2, abs(c2) ** 2))
    elif fam == "multimode":
        val = (1 - N) * math.log(float(np.max(np.abs(spec.coeffs()) ** 2)))
    elif fam == "hartree_fock":
        val = N * math.log(N) - math.lgamma(N + 1)
    elif fam == "hf_reduced":
        p = spec.p
        val = math.lgamma(N - p + 1) + p * math.log(N) - math.lgamma(N + 1)
    elif fam == "mixed_multimode":
        val = (1 - spec.p) * math.log(float(np.max(spec.weights())))
    else:
        raise FamilyError(f"no closed form for {fam}")
    return to_base(val + 0.0, base)


def library() -> list[tuple[str, FamilySpec]]:
    """Catalogue of family instances used for property sweeps (total_dim <= 256)."""
    return [
        ("epr+", FamilySpec("epr", 2, {"sign": 1})),
        ("epr-", FamilySpec("epr", 2, {"sign": -1})),
        ("bell+", FamilySpec("bell", 2, {"sign": 1})),
        ("bell-", FamilySpec("bell", 2, {"sign": -1})),
        ("ghz3", FamilySpec("ghz", 3)),
        ("ghz5", FamilySpec("ghz", 5)),
        ("multicat3", FamilySpec("multicat", 3, {"c1": 0.6, "c2": 0.8j})),
        ("multimode3x3", FamilySpec("multimode", 3, {"coeffs": [0.6, 0.48, 0.64j]})),
        ("hf3_fermi", FamilySpec("hartree_fock", 3, {"statistics": "fermi"})),
        ("hf3_bose", FamilySpec("hartree_fock", 3, {"statistics": "bose"})),
        ("hf4_p2", FamilySpec("hf_reduced", 4, {"p": 2})),
        ("hf4_p3", FamilySpec("hf_reduced", 4, {"p": 3})),
        ("mixed_mm", FamilySpec("mixed_multimode", 4, {"p": 3, "weights": [0.5, 0.3, 0.2]})),
        ("separable", FamilySpec("separable_example", 2)),
    ]
