"""Norm of an operator restricted to product states.

``dnorm(A)`` is the supremum of ``|(f, A f')|`` over unit product kets
``f = phi_1 (x) ... (x) phi_p`` and ``f'``.  Finding it is a best rank-one
approximation problem for the order-2p tensor of ``A``, which is NP-hard in
general, so the solver is a multi-start alternating maximization: every
per-factor subproblem has a closed-form maximizer.

Three regimes are dispatched on the operator's structural flags:

* diagonal: the supremum is ``max_n |A_nn|`` and is attained on a basis
  product pair (Cauchy-Schwarz on the diagonal form), solved exactly;
* semipositive: ``f = f'`` loses nothing, and ``A = V V^dagger`` turns each
  factor update into a top eigenvector of a ``d_i x d_i`` matrix;
* anything else: independent left and right factors, each update being a
  normalized contraction (higher-order power iteration).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tensor import (
    Ket,
    MultipartiteOperator,
    ProductKet,
    ShapeError,
    ValidationError,
    _kron_vectors,
    as_operator,
)


@dataclass(frozen=True)
class SolverConfig:
    restarts: int = 32
    max_sweeps: int = 500
    tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


METHODS = ("alternating", "diagonal_exact", "schmidt_exact", "symmetric_alternating")


@dataclass(frozen=True)
class NormCertificate:
    value: float
    left: ProductKet
    right: ProductKet
    sweeps_used: int = 0
    restarts_used: int = 0
    converged: bool = True
    method: str = "alternating"
    history: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


def _contract_except(t: np.ndarray, factors, i: int) -> np.ndarray:
    """Contract axis j of ``t`` with conj(factors[j]) for every j != i.

    ``t`` has one axis per factor followed by any number of trailing axes;
    the result keeps axis i in front of the trailing axes.
    """
    for j in range(len(factors) - 1, -1, -1):
        if j == i:
            continue
        t = np.tensordot(t, factors[j].conj(), axes=([j], [0]))
    return t


def _random_factors(dims, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    for d in dims:
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        out.append(z / np.linalg.norm(z))
    return out


def _top_eigvec(m: np.ndarray) -> tuple[float, np.ndarray]:
    w, u = np.linalg.eigh(0.5 * (m + m.conj().T))
    return float(w[-1]), u[:, -1]


def _symmetric_sweeps(v: np.ndarray, factors: list[np.ndarray], cfg: SolverConfig):
    """Maximize ``||V^dagger f||^2`` over product ``f``; ``v`` has shape dims + (r,)."""
    p = len(factors)
    rank_one = v.shape[-1] == 1
    value = -np.inf
    history = []
    for sweep in range(1, cfg.max_sweeps + 1):
        for i in range(p):
            c = _contract_except(v, factors, i)
            if rank_one:
                u = c[:, 0]
                n = np.linalg.norm(u)
                lam = float(n * n)
                if n > 0:
                    factors[i] = u / n
            else:
                lam, vec = _top_eigvec(c @ c.conj().T)
                if lam > 0:
                    factors[i] = vec
        history.append(lam)
        if abs(lam - value) < cfg.tol:
            return lam, factors, sweep, True, history
        value = lam
    return value, factors, cfg.max_sweeps, False, history


def _bilinear_sweeps(A: MultipartiteOperator, left, right, cfg: SolverConfig):
    dims = A.dims
    p = len(dims)
    value = -np.inf
    history = []
    for sweep in range(1, cfg.max_sweeps + 1):
        w = A.apply(_kron_vectors(right)).reshape(dims)
        for i in range(p):
            u = _contract_except(w, left, i)
            n = np.linalg.norm(u)
            if n > 0:
                left[i] = u / n
        z = A.apply_adjoint(_kron_vectors(left)).reshape(dims)
        for i in range(p):
            u = _contract_except(z, right, i)
            n = np.linalg.norm(u)
            if n > 0:
                right[i] = u / n
        lam = float(n)
        history.append(lam)
        if abs(lam - value) < cfg.tol:
            return lam, left, right, sweep, True, history
        value = lam
    return value, left, right, cfg.max_sweeps, False, history


def _dominant_factors_gram(v: np.ndarray) -> list[np.ndarray]:
    """Top eigenvector of each single-partite reduction of ``V V^dagger``."""
    p = v.ndim - 1
    out = []
    for i in range(p):
        c = np.moveaxis(v, i, 0).reshape(v.shape[i], -1)
        if c.shape[1] > c.shape[0]:
            out.append(_top_eigvec(c @ c.conj().T)[1])
        else:
            u, _, _ = np.linalg.svd(c, full_matrices=False)
            out.append(u[:, 0])
    return out


def _best(candidates):
    # candidates: (value, restart_index, payload); ties keep the lowest index
    best = None
    for cand in candidates:
        if best is None or cand[0] > best[0]:
            best = cand
    return best


def _symmetric_solve(v: np.ndarray, dims, cfg: SolverConfig):
    rng = np.random.default_rng(cfg.seed)
    starts = [_dominant_factors_gram(v)]
    starts += [_random_factors(dims, rng) for _ in range(cfg.restarts)]
    results = []
    any_conv = False
    total_sweeps = 0
    for k, f0 in enumerate(starts):
        lam, fs, sweeps, conv, hist = _symmetric_sweeps(v, [f.copy() for f in f0], cfg)
        any_conv |= conv
        total_sweeps += sweeps
        results.append((lam, k, (fs, sweeps, conv, hist)))
    lam, _, (fs, sweeps, conv, hist) = _best(results)
    return lam, fs, sweeps, len(starts), any_conv, tuple(hist)


def schmidt_max(psi: Ket) -> float:
    """Largest Schmidt coefficient of a bipartite ket."""
    if psi.shape.p != 2:
        raise ValidationError(f"schmidt_max needs a bipartite ket, got p={psi.shape.p}")
    return float(np.linalg.svd(psi.tensor(), compute_uv=False)[0])


def _schmidt_certificate(psi: Ket) -> NormCertificate:
    u, s, vh = np.linalg.svd(psi.tensor())
    f = ProductKet((u[:, 0], vh[0]))
    return NormCertificate(float(s[0]), f, f, 0, 1, True, "schmidt_exact")


def max_product_overlap(psi: Ket, cfg: SolverConfig | None = None, exact: bool = True) -> NormCertificate:
    """Largest ``|(f, psi)|`` over unit product kets ``f``.

    Bipartite kets are solved exactly through the singular value
    decomposition of the amplitude matrix unless ``exact=False``.  For ``p >= 3`` each update
    contracts ``psi`` against the conjugates of the other factors and
    normalizes, which is the exact maximizer for that factor.
    """
    cfg = cfg or SolverConfig()
    n = psi.norm()
    if n == 0:
        raise ValidationError("max_product_overlap of the zero ket")
    if psi.shape.p == 1:
        f = ProductKet((psi.amp / n,))
        return NormCertificate(n, f, f, 0, 1, True, "schmidt_exact")
    if psi.shape.p == 2 and exact:
        return _schmidt_certificate(psi)
    v = psi.amp.reshape(psi.dims + (1,))
    lam, fs, sweeps, restarts, conv, hist = _symmetric_solve(v, psi.dims, cfg)
    f = ProductKet(tuple(fs))
    return NormCertificate(
        math.sqrt(max(lam, 0.0)), f, f, sweeps, restarts, conv, "symmetric_alternating",
        tuple(math.sqrt(max(h, 0.0)) for h in hist),
    )


def _basis_product(dims, flat_index: int) -> ProductKet:
    idx = np.unravel_index(flat_index, dims)
    fs = []
    for d, k in zip(dims, idx):
        e = np.zeros(d, dtype=complex)
        e[k] = 1.0
        fs.append(e)
    return ProductKet(tuple(fs))


def _dominant_factors_dense(A: MultipartiteOperator):
    a = A.entries
    u, _, vh = np.linalg.svd(a)
    lv = u[:, 0].reshape(A.dims + (1,))
    rv = vh[0].conj().reshape(A.dims + (1,))
    return _dominant_factors_gram(lv), _dominant_factors_gram(rv)


def _bilinear_solve(A: MultipartiteOperator, cfg: SolverConfig):
    rng = np.random.default_rng(cfg.seed)
    starts = []
    if A.total_dim <= 2048:
        starts.append(_dominant_factors_dense(A))
    for _ in range(cfg.restarts):
        f = _random_factors(A.dims, rng)
        starts.append(([x.copy() for x in f], [x.copy() for x in f]))
    results = []
    any_conv = False
    for k, (l0, r0) in enumerate(starts):
        lam, l, r, sweeps, conv, hist = _bilinear_sweeps(A, list(l0), list(r0), cfg)
        any_conv |= conv
        results.append((lam, k, (l, r, sweeps, hist)))
    lam, _, (l, r, sweeps, hist) = _best(results)
    return lam, l, r, sweeps, len(starts), any_conv, tuple(hist)


def dnorm(A, cfg: SolverConfig | None = None) -> NormCertificate:
    """Supremum of ``|(f, A f')|`` over unit product kets.

    Returns a certificate carrying the maximizing pair; the value is exact
    for diagonal operators and bipartite pure states, otherwise a certified
    stationary lower bound (best of all restarts).
    """
    cfg = cfg or SolverConfig()
    A = as_operator(A)
    if A.p == 1:
        # single partite: ordinary spectral norm, attained by the top singular pair
        if A.is_gram:
            u, s, _ = np.linalg.svd(A.gram, full_matrices=False)
            f = ProductKet((u[:, 0],))
            return NormCertificate(float(s[0] ** 2), f, f, 0, 1, True, "schmidt_exact")
        u, s, vh = np.linalg.svd(A.entries)
        return NormCertificate(
            float(s[0]), ProductKet((u[:, 0],)), ProductKet((vh[0].conj(),)), 0, 1, True, "schmidt_exact"
        )
    if A.is_diagonal:
        d = np.abs(A.diagonal())
        k = int(np.argmax(d))
        f = _basis_product(A.dims, k)
        return NormCertificate(float(d[k]), f, f, 0, 1, True, "diagonal_exact")
    if A.semipositive:
        G = A.to_gram()
        if G.rank_bound == 1:
            c = max_product_overlap(G.ket, cfg)
            return NormCertificate(
                c.value**2, c.left, c.right, c.sweeps_used, c.restarts_used, c.converged, c.method,
                tuple(h * h for h in c.history),
            )
        v = G.gram.reshape(A.dims + (G.rank_bound,))
        lam, fs, sweeps, restarts, conv, hist = _symmetric_solve(v, A.dims, cfg)
        f = ProductKet(tuple(fs))
        return NormCertificate(lam, f, f, sweeps, restarts, conv, "symmetric_alternating", hist)
    lam, l, r, sweeps, restarts, conv, hist = _bilinear_solve(A, cfg)
    return NormCertificate(
        lam, ProductKet(tuple(l)), ProductKet(tuple(r)), sweeps, restarts, conv, "alternating", hist
    )


def certificate_value(A, cert: NormCertificate) -> float:
    """Re-evaluate ``|(left, A right)|`` from a certificate."""
    return abs(as_operator(A).matrix_element(cert.left, cert.right))


def dnorm_bruteforce(A, samples: int = 10_000, seed: int = 0) -> float:
    """Randomized lower bound: random product pairs plus every basis pair.

    The basis pairs contribute ``max |A_mn|`` since ``(e_m, A e_n) = A_mn``.
    """
    A = as_operator(A)
    if A.total_dim > 64:
        raise ShapeError(f"dnorm_bruteforce is limited to total_dim <= 64, got {A.total_dim}")
    a = A.entries
    best = float(np.max(np.abs(a)))
    rng = np.random.default_rng(seed)
    batch = 2048
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        lv = np.ones((n, 1), dtype=complex)
        rv = np.ones((n, 1), dtype=complex)
        for d in A.dims:
            for vec in ("l", "r"):
                z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
                z /= np.linalg.norm(z, axis=1, keepdims=True)
                if vec == "l":
                    lv = (lv[:, :, None] * z[:, None, :]).reshape(n, -1)
                else:
                    rv = (rv[:, :, None] * z[:, None, :]).reshape(n, -1)
        vals = np.abs(np.einsum("ki,ij,kj->k", lv.conj(), a, rv))
        best = max(best, float(vals.max()))
        done += n
    return best
