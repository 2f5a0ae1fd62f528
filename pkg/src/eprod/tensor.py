"""Multipartite Hilbert-space bookkeeping.

Everything is laid out row-major over the multi-index ``(n_1, ..., n_p)``,
so a ket on ``dims = (d_1, ..., d_p)`` reshapes to ``amp.reshape(dims)`` and
an operator to ``entries.reshape(dims + dims)`` (row indices first).

Partite indices are 0-based.

Operators are stored either densely or in Gram form ``A = V V^dagger`` with
``V`` of shape ``(total_dim, r)``.  The Gram form keeps pure-state projectors
and low-rank reduced density operators cheap; ``entries`` materializes the
dense matrix on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10

# dense materialization of Gram operators above this size is refused
MAX_DENSE_DIM = 8192


class ShapeError(ValueError):
    """Raised when dimensions of kets, operators or factors disagree."""


class ValidationError(ValueError):
    """Raised when an input violates a numerical precondition."""


@dataclass(frozen=True)
class SpaceShape:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ShapeError("a space needs at least one partite")
        if any(d < 1 for d in dims):
            raise ShapeError(f"dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def p(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def sub(self, keep: Iterable[int]) -> "SpaceShape":
        return SpaceShape(tuple(self.dims[i] for i in keep))

    def __add__(self, other: "SpaceShape") -> "SpaceShape":
        return SpaceShape(self.dims + other.dims)


def as_shape(dims) -> SpaceShape:
    if isinstance(dims, SpaceShape):
        return dims
    if isinstance(dims, (int, np.integer)):
        return SpaceShape((int(dims),))
    return SpaceShape(tuple(dims))


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Ket:
    shape: SpaceShape
    amp: np.ndarray

    def __post_init__(self):
        shape = as_shape(self.shape)
        amp = _frozen(np.asarray(self.amp).reshape(-1))
        if amp.size != shape.total_dim:
            raise ShapeError(
                f"ket has {amp.size} amplitudes, shape {shape.dims} needs {shape.total_dim}"
            )
        if not np.all(np.isfinite(amp)):
            raise ValidationError("ket amplitudes must be finite")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "amp", amp)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.dims

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def normalized(self) -> "Ket":
        n = self.norm()
        if n == 0:
            raise ValidationError("cannot normalize the zero ket")
        return Ket(self.shape, self.amp / n)

    def tensor(self) -> np.ndarray:
        return self.amp.reshape(self.dims)


@dataclass(frozen=True)
class ProductKet:
    factors: tuple[np.ndarray, ...]

    def __post_init__(self):
        factors = tuple(_frozen(np.asarray(f).reshape(-1)) for f in self.factors)
        if not factors:
            raise ShapeError("a product ket needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @property
    def shape(self) -> SpaceShape:
        return SpaceShape(tuple(f.size for f in self.factors))

    def norm(self) -> float:
        return math.prod(float(np.linalg.norm(f)) for f in self.factors)

    def normalized(self) -> "ProductKet":
        return ProductKet(tuple(f / np.linalg.norm(f) for f in self.factors))


def _kron_vectors(vectors: Sequence[np.ndarray]) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.multiply.outer(out, v).reshape(-1)
    return out


def expand_product(f: ProductKet, shape: SpaceShape | None = None) -> Ket:
    """Expand a product ket into the full amplitude vector."""
    if shape is not None:
        shape = as_shape(shape)
        if shape.dims != f.shape.dims:
            raise ShapeError(f"factor lengths {f.shape.dims} do not match {shape.dims}")
    return Ket(f.shape, _kron_vectors(f.factors))


def overlap(x: Ket, y: Ket) -> complex:
    """Scalar product, conjugate-linear in ``x``."""
    if x.dims != y.dims:
        raise ShapeError(f"overlap of kets on {x.dims} and {y.dims}")
    return complex(np.vdot(x.amp, y.amp))


def product_overlap(f: ProductKet, g: ProductKet) -> complex:
    if f.shape.dims != g.shape.dims:
        raise ShapeError("product kets live on different spaces")
    return complex(math.prod(np.vdot(a, b) for a, b in zip(f.factors, g.factors)))


@dataclass(frozen=True)
class Flags:
    hermitian: bool
    semipositive: bool
    diagonal: bool
    tol: float


class MultipartiteOperator:
    """Operator on ``H_1 (x) ... (x) H_p``, dense or Gram-factored.

    Construct with ``MultipartiteOperator(dims, entries)`` for a dense matrix,
    ``MultipartiteOperator.from_gram(dims, V)`` for ``V V^dagger`` or
    ``MultipartiteOperator.projector(ket)`` for ``|psi><psi|``.
    Instances are treated as immutable.
    """

    def __init__(self, dims, entries=None, *, gram=None, tol: float = DEFAULT_TOL):
        self.shape = as_shape(dims)
        self.tol = float(tol)
        D = self.shape.total_dim
        if (entries is None) == (gram is None):
            raise ValueError("give exactly one of entries or gram")
        self._entries = None
        self._gram = None
        if entries is not None:
            a = np.asarray(entries, dtype=complex)
            if a.size != D * D:
                raise ShapeError(f"operator has {a.size} entries, shape {self.shape.dims} needs {D * D}")
            a = a.reshape(D, D)
            if not np.all(np.isfinite(a)):
                raise ValidationError("operator entries must be finite")
            self._entries = _frozen(a)
        else:
            v = np.asarray(gram, dtype=complex)
            if v.ndim == 1:
                v = v[:, None]
            v = v.reshape(D, -1)
            if not np.all(np.isfinite(v)):
                raise ValidationError("Gram factor must be finite")
            self._gram = _frozen(v)

    @classmethod
    def from_gram(cls, dims, gram, tol: float = DEFAULT_TOL) -> "MultipartiteOperator":
        return cls(dims, gram=gram, tol=tol)

    @classmethod
    def projector(cls, psi: Ket, tol: float = DEFAULT_TOL) -> "MultipartiteOperator":
        return cls(psi.shape, gram=psi.amp[:, None], tol=tol)

    @classmethod
    def identity(cls, dims) -> "MultipartiteOperator":
        shape = as_shape(dims)
        return cls(shape, np.eye(shape.total_dim))

    @property
    def dims(self) -> tuple[int, ...]:
        return self.shape.dims

    @property
    def p(self) -> int:
        return self.shape.p

    @property
    def total_dim(self) -> int:
        return self.shape.total_dim

    @property
    def is_gram(self) -> bool:
        return self._gram is not None

    @property
    def gram(self) -> np.ndarray | None:
        return self._gram

    @property
    def rank_bound(self) -> int:
        return self._gram.shape[1] if self._gram is not None else self.total_dim

    @cached_property
    def entries(self) -> np.ndarray:
        if self._entries is not None:
            return self._entries
        if self.total_dim > MAX_DENSE_DIM:
            raise MemoryError(f"refusing to materialize a {self.total_dim}-dimensional dense operator")
        return _frozen(self._gram @ self._gram.conj().T)

    @cached_property
    def ket(self) -> Ket | None:
        """The state ``psi`` when this is a rank-one projector ``|psi><psi|``."""
        if self._gram is not None and self._gram.shape[1] == 1:
            return Ket(self.shape, self._gram[:, 0])
        return None

    def tensor(self) -> np.ndarray:
        return self.entries.reshape(self.dims + self.dims)

    def trace(self) -> complex:
        if self._gram is not None:
            return complex(np.vdot(self._gram, self._gram))
        return complex(np.trace(self._entries))

    def diagonal(self) -> np.ndarray:
        if self._gram is not None:
            return np.sum(np.abs(self._gram) ** 2, axis=1).astype(complex)
        return np.diagonal(self._entries).copy()

    @cached_property
    def flags(self) -> Flags:
        tol = self.tol
        if self._gram is not None:
            v = self._gram
            diag = np.sum(np.abs(v) ** 2, axis=1)
            small = v.conj().T @ v
            # ||V V^+||_F^2 = ||V^+ V||_F^2; off-diagonal mass is what remains after the diagonal
            off = max(float(np.sum(np.abs(small) ** 2) - np.sum(diag**2)), 0.0)
            return Flags(True, True, math.sqrt(off) <= tol, tol)
        a = self._entries
        hermitian = bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)
        off = a - np.diag(np.diagonal(a))
        diagonal = bool(np.max(np.abs(off), initial=0.0) <= tol)
        semipositive = False
        if hermitian:
            if diagonal:
                semipositive = bool(np.min(np.diagonal(a).real) >= -tol)
            else:
                semipositive = bool(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0] >= -tol)
        return Flags(hermitian, semipositive, diagonal, tol)

    @property
    def hermitian(self) -> bool:
        return self.flags.hermitian

    @property
    def semipositive(self) -> bool:
        return self.flags.semipositive

    @property
    def is_diagonal(self) -> bool:
        return self.flags.diagonal

    def to_gram(self, rtol: float = 1e-13) -> "MultipartiteOperator":
        """Gram-factored copy of a semipositive operator (drops negligible eigenvalues)."""
        if self._gram is not None:
            return self
        if not self.semipositive:
            raise ValidationError("only semipositive operators admit a Gram factorization")
        a = self._entries
        w, u = np.linalg.eigh(0.5 * (a + a.conj().T))
        cut = rtol * max(abs(w[-1]), 1e-300)
        keep = w > cut
        if not np.any(keep):
            keep[-1] = True
        v = u[:, keep] * np.sqrt(np.clip(w[keep], 0.0, None))
        return MultipartiteOperator(self.shape, gram=v[:, ::-1], tol=self.tol)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        if self._gram is not None:
            return self._gram @ (self._gram.conj().T @ vec)
        return self._entries @ vec

    def apply_adjoint(self, vec: np.ndarray) -> np.ndarray:
        if self._gram is not None:
            return self.apply(vec)
        return self._entries.conj().T @ vec

    def matrix_element(self, left: ProductKet, right: ProductKet) -> complex:
        """``(left, A right)`` for product kets."""
        lv = _kron_vectors(left.factors)
        rv = _kron_vectors(right.factors)
        return complex(np.vdot(lv, self.apply(rv)))

    def __add__(self, other: "MultipartiteOperator") -> "MultipartiteOperator":
        if self.dims != other.dims:
            raise ShapeError("operators on different spaces")
        return MultipartiteOperator(self.shape, self.entries + other.entries, tol=self.tol)

    def scaled(self, c: complex) -> "MultipartiteOperator":
        if self._gram is not None and np.isreal(c) and np.real(c) >= 0:
            return MultipartiteOperator(self.shape, gram=self._gram * math.sqrt(float(np.real(c))), tol=self.tol)
        return MultipartiteOperator(self.shape, self.entries * c, tol=self.tol)

    def __repr__(self):
        kind = f"gram r={self._gram.shape[1]}" if self._gram is not None else "dense"
        return f"MultipartiteOperator(dims={self.dims}, {kind})"


def as_operator(a, dims=None) -> MultipartiteOperator:
    if isinstance(a, MultipartiteOperator):
        return a
    a = np.asarray(a, dtype=complex)
    if dims is None:
        dims = (a.shape[0],)
    return MultipartiteOperator(dims, a)


def kron(ops: Sequence[MultipartiteOperator]) -> MultipartiteOperator:
    """Tensor product of operators; the shape concatenates the factor shapes."""
    ops = [as_operator(o) for o in ops]
    if not ops:
        raise ValueError("kron needs at least one operator")
    dims = tuple(d for o in ops for d in o.dims)
    if all(o.is_gram for o in ops):
        v = ops[0].gram
        for o in ops[1:]:
            v = np.kron(v, o.gram)
        return MultipartiteOperator(dims, gram=v)
    m = ops[0].entries
    for o in ops[1:]:
        m = np.kron(m, o.entries)
    return MultipartiteOperator(dims, m)


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _check_keep(keep, p: int) -> list[int]:
    keep = sorted(set(int(i) for i in keep))
    if not keep:
        raise ValidationError("partial trace needs a nonempty set of kept partites")
    if keep[0] < 0 or keep[-1] >= p:
        raise ValidationError(f"kept partites {keep} out of range for p={p}")
    return keep


def partial_trace(A: MultipartiteOperator, keep: Iterable[int]) -> MultipartiteOperator:
    """Trace out every partite not in ``keep`` (0-based, order of ``keep`` is ignored)."""
    keep = _check_keep(keep, A.p)
    dims = A.dims
    traced = [i for i in range(A.p) if i not in keep]
    sub = A.shape.sub(keep)
    if not traced:
        return A
    if A.is_gram:
        r = A.gram.shape[1]
        v = A.gram.reshape(dims + (r,))
        v = np.moveaxis(v, keep, range(len(keep))).reshape(sub.total_dim, -1)
        if v.shape[1] < sub.total_dim:
            return MultipartiteOperator(sub, gram=v, tol=A.tol)
        return MultipartiteOperator(sub, v @ v.conj().T, tol=A.tol)
    p = A.p
    rows = list(_LETTERS[:p])
    cols = list(_LETTERS[p : 2 * p])
    for i in traced:
        cols[i] = rows[i]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    t = np.einsum("".join(rows) + "".join(cols) + "->" + out, A.tensor())
    return MultipartiteOperator(sub, t.reshape(sub.total_dim, sub.total_dim), tol=A.tol)


def reduced_ket_density(psi: Ket, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of ``|psi><psi|`` on ``keep`` as a plain array."""
    return partial_trace(MultipartiteOperator.projector(psi), keep).entries


def spectral_norm(A) -> float:
    """Largest singular value."""
    A = as_operator(A)
    if A.is_gram:
        s = np.linalg.svd(A.gram, compute_uv=False)
        return float(s[0] ** 2)
    a = A.entries
    if A.is_diagonal:
        return float(np.max(np.abs(np.diagonal(a))))
    if A.hermitian:
        w = np.linalg.eigvalsh(0.5 * (a + a.conj().T))
        return float(max(abs(w[0]), abs(w[-1])))
    return float(np.linalg.norm(a, 2))


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _apply_per_axis(t: np.ndarray, mats: Sequence[np.ndarray], offset: int) -> np.ndarray:
    # t[..., n_i, ...] -> sum_n mats[i][m, n] t[..., n, ...] on axis offset + i
    for i, m in enumerate(mats):
        ax = offset + i
        t = np.moveaxis(np.tensordot(m, t, axes=([1], [ax])), 0, ax)
    return t


def apply_local_unitaries(
    A: MultipartiteOperator, U: Sequence[np.ndarray], tol: float = 1e-10
) -> MultipartiteOperator:
    """Return ``(U_1 (x) ... (x) U_p)^dagger A (U_1 (x) ... (x) U_p)``."""
    U = [np.asarray(u, dtype=complex) for u in U]
    if len(U) != A.p:
        raise ShapeError(f"need {A.p} local unitaries, got {len(U)}")
    for i, u in enumerate(U):
        if u.shape != (A.dims[i], A.dims[i]):
            raise ShapeError(f"unitary {i} has shape {u.shape}, partite dimension is {A.dims[i]}")
        if not is_unitary(u, tol):
            raise ValidationError(f"local operator {i} is not unitary within {tol}")
    udag = [u.conj().T for u in U]
    if A.is_gram:
        r = A.gram.shape[1]
        v = _apply_per_axis(A.gram.reshape(A.dims + (r,)), udag, 0)
        return MultipartiteOperator(A.shape, gram=v.reshape(A.total_dim, r), tol=A.tol)
    t = _apply_per_axis(A.tensor(), udag, 0)
    t = _apply_per_axis(t, [u.T for u in U], A.p)
    return MultipartiteOperator(A.shape, t.reshape(A.total_dim, A.total_dim), tol=A.tol)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def random_ket(dims, rng: np.random.Generator) -> Ket:
    shape = as_shape(dims)
    z = rng.standard_normal(shape.total_dim) + 1j * rng.standard_normal(shape.total_dim)
    return Ket(shape, z / np.linalg.norm(z))


def random_product_ket(dims, rng: np.random.Generator) -> ProductKet:
    fs = []
    for d in as_shape(dims).dims:
        z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        fs.append(z / np.linalg.norm(z))
    return ProductKet(tuple(fs))


def random_hermitian(dims, rng: np.random.Generator) -> MultipartiteOperator:
    shape = as_shape(dims)
    D = shape.total_dim
    z = rng.standard_normal((D, D)) + 1j * rng.standard_normal((D, D))
    return MultipartiteOperator(shape, 0.5 * (z + z.conj().T))
