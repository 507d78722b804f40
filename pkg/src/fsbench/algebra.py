"""Finite groups and finite-dimensional C*-algebras.

A finite group is stored as its multiplication table over element indices
``0..n-1``. A finite-dimensional C*-algebra is a direct sum of full matrix
blocks ``M_{n_1} + ... + M_{n_m}``; an element is a tuple of per-block complex
matrices.

Most of the package works with *coordinate vectors* of algebra elements: the
concatenation of the row-major flattened blocks, i.e. coordinates in the basis
of matrix units ``e^b_{ij}``. Linear maps of the algebra are then plain
``dim x dim`` complex matrices acting on these vectors.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (NoIdentity, NoInverse, NotAPermutationRow, NotAssociative,
                     ShapeMismatch)


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair; ``bound(scale)`` is the admissible error."""

    atol: float = 1e-9
    rtol: float = 1e-9

    def __post_init__(self):
        if not (np.isfinite(self.atol) and np.isfinite(self.rtol)):
            raise ValueError("tolerances must be finite")
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be nonnegative")

    def bound(self, scale: float = 0.0) -> float:
        return self.atol + self.rtol * scale


ScalarTolerance = Tolerance
DEFAULT_TOL = Tolerance()


# -----------------------------------------------------------------------------
# groups
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: np.ndarray
    identity: int
    inverse: np.ndarray
    labels: tuple = ()

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(range(self.order))

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return int(self.inverse[g])

    def label(self, g: int) -> str:
        return str(self.labels[g]) if self.labels else str(g)

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def validate_group(table, labels: Sequence = ()) -> FiniteGroup:
    """Validate a multiplication table and return the group.

    Checks run in the order: identity, inverses, Latin-square rows/columns,
    associativity; the first failure is raised with its location.
    """
    t = np.asarray(table)
    if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
        raise ShapeMismatch(f"group table must be a nonempty square array, got shape {t.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        if not np.all(np.equal(np.mod(t, 1), 0)):
            raise ShapeMismatch("group table entries must be integers")
        t = t.astype(int)
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise ShapeMismatch("group table entries out of range")
    t = t.astype(np.int64)
    idx = np.arange(n)

    identity = None
    for e in range(n):
        if np.array_equal(t[e], idx) and np.array_equal(t[:, e], idx):
            identity = e
            break
    if identity is None:
        raise NoIdentity("no two-sided identity element")

    inverse = np.empty(n, dtype=np.int64)
    for g in range(n):
        cands = [h for h in range(n) if t[g, h] == identity and t[h, g] == identity]
        if not cands:
            raise NoInverse(g)
        inverse[g] = cands[0]

    for g in range(n):
        if len(set(t[g].tolist())) != n:
            raise NotAPermutationRow(g, "row")
        if len(set(t[:, g].tolist())) != n:
            raise NotAPermutationRow(g, "column")

    # (gh)k == g(hk) for all triples, vectorized over k
    for g in range(n):
        for h in range(n):
            left = t[t[g, h]]
            right = t[g, t[h]]
            bad = np.nonzero(left != right)[0]
            if bad.size:
                raise NotAssociative(g, h, int(bad[0]))

    t.setflags(write=False)
    inverse.setflags(write=False)
    return FiniteGroup(t, identity, inverse, tuple(labels))


def cyclic_group(n: int) -> FiniteGroup:
    idx = np.arange(n)
    return validate_group((idx[:, None] + idx[None, :]) % n, labels=[f"{k}" for k in range(n)])


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """Elements are indexed ``a * |G2| + b`` for ``(a, b)``."""
    n1, n2 = g1.order, g2.order
    table = np.empty((n1 * n2, n1 * n2), dtype=np.int64)
    for a, b, c, d in itertools.product(range(n1), range(n2), range(n1), range(n2)):
        table[a * n2 + b, c * n2 + d] = g1.table[a, c] * n2 + g2.table[b, d]
    labels = [f"({g1.label(a)},{g2.label(b)})" for a in range(n1) for b in range(n2)]
    return validate_group(table, labels)


def klein_group() -> FiniteGroup:
    """Z2 x Z2 with element (a, b) at index 2a + b."""
    return direct_product(cyclic_group(2), cyclic_group(2))


def symmetric_group(n: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[k]] for k in range(n))] for q in perms] for p in perms]
    return validate_group(table, ["".join(map(str, p)) for p in perms])


def group_homomorphism_residual(src: FiniteGroup, dst: FiniteGroup, phi: Sequence[int]):
    """Return the first pair ``(g, h)`` where ``phi`` is not multiplicative, or None."""
    phi = np.asarray(phi)
    for g in range(src.order):
        for h in range(src.order):
            if phi[src.table[g, h]] != dst.table[phi[g], phi[h]]:
                return (g, h)
    return None


# -----------------------------------------------------------------------------
# algebras
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class CStarAlgebra:
    """Direct sum of full matrix algebras ``M_{n_1} + ... + M_{n_m}``."""

    block_dims: tuple

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n <= 0 for n in dims):
            raise ShapeMismatch("block dimensions must be a nonempty list of positive integers")
        object.__setattr__(self, "block_dims", dims)

    def __repr__(self):
        return "CStarAlgebra(" + " + ".join(f"M{n}" for n in self.block_dims) + ")"

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)

    @cached_property
    def dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    @property
    def total_dim(self) -> int:
        return self.dim

    @cached_property
    def offsets(self) -> tuple:
        out, acc = [], 0
        for n in self.block_dims:
            out.append(acc)
            acc += n * n
        return tuple(out)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.block_dims)

    @cached_property
    def labels(self) -> tuple:
        """``(block, i, j)`` for each basis coordinate."""
        return tuple((b, i, j) for b, n in enumerate(self.block_dims)
                     for i in range(n) for j in range(n))

    def label(self, k: int) -> str:
        b, i, j = self.labels[k]
        return f"e{i + 1}{j + 1}" if self.n_blocks == 1 else f"e[{b}]{i + 1}{j + 1}"

    # -- coordinate helpers ---------------------------------------------------

    def block_slice(self, b: int) -> slice:
        n = self.block_dims[b]
        return slice(self.offsets[b], self.offsets[b] + n * n)

    def split(self, vec) -> list:
        vec = np.asarray(vec)
        return [vec[self.block_slice(b)].reshape(n, n) for b, n in enumerate(self.block_dims)]

    def join(self, blocks) -> np.ndarray:
        return np.concatenate([np.asarray(m, dtype=complex).reshape(-1) for m in blocks])

    @cached_property
    def unit_vec(self) -> np.ndarray:
        v = self.join([np.eye(n) for n in self.block_dims])
        v.setflags(write=False)
        return v

    @cached_property
    def trace_weights(self) -> np.ndarray:
        """Coordinates of the faithful trace ``a -> sum_b tr(a_b)``."""
        w = np.array([1.0 if i == j else 0.0 for (_, i, j) in self.labels])
        w.setflags(write=False)
        return w

    @cached_property
    def adjoint_index(self) -> np.ndarray:
        """``vec(a*)[k] = conj(vec(a)[adjoint_index[k]])``."""
        pos = {lab: k for k, lab in enumerate(self.labels)}
        idx = np.array([pos[(b, j, i)] for (b, i, j) in self.labels], dtype=np.int64)
        idx.setflags(write=False)
        return idx

    def adjoint_vec(self, v) -> np.ndarray:
        return np.conj(np.asarray(v)[..., self.adjoint_index])

    def mul_vec(self, a, b) -> np.ndarray:
        return self.join([x @ y for x, y in zip(self.split(a), self.split(b))])

    def lmul(self, b) -> np.ndarray:
        """Matrix of ``a -> b a`` on coordinate vectors."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for k, blk in enumerate(self.split(b)):
            s = self.block_slice(k)
            out[s, s] = np.kron(blk, np.eye(self.block_dims[k]))
        return out

    def rmul(self, b) -> np.ndarray:
        """Matrix of ``a -> a b`` on coordinate vectors."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for k, blk in enumerate(self.split(b)):
            s = self.block_slice(k)
            out[s, s] = np.kron(np.eye(self.block_dims[k]), blk.T)
        return out

    def norm_vec(self, v) -> float:
        return max(np.linalg.norm(m, 2) for m in self.split(v))

    def center_distance(self, v) -> float:
        """Distance of ``v`` from the center (0 for block scalars)."""
        res = 0.0
        for m in self.split(v):
            n = m.shape[0]
            res = max(res, np.linalg.norm(m - np.trace(m) / n * np.eye(n), 2))
        return res

    # -- elements -------------------------------------------------------------

    def element(self, blocks) -> "AlgElement":
        blocks = tuple(np.array(m, dtype=complex) for m in blocks)
        if len(blocks) != self.n_blocks:
            raise ShapeMismatch(f"expected {self.n_blocks} blocks, got {len(blocks)}")
        for b, (m, n) in enumerate(zip(blocks, self.block_dims)):
            if m.shape != (n, n):
                raise ShapeMismatch(f"block {b} has shape {m.shape}, expected {(n, n)}")
            m.setflags(write=False)
        return AlgElement(self, blocks)

    def from_vec(self, v) -> "AlgElement":
        v = np.asarray(v, dtype=complex)
        if v.shape != (self.dim,):
            raise ShapeMismatch(f"coordinate vector has shape {v.shape}, expected {(self.dim,)}")
        return self.element(self.split(v))

    def unit(self) -> "AlgElement":
        return self.from_vec(self.unit_vec)

    def zero(self) -> "AlgElement":
        return self.from_vec(np.zeros(self.dim))

    def scalar(self, lam: complex) -> "AlgElement":
        return self.from_vec(lam * self.unit_vec)

    def basis(self) -> list:
        return [self.from_vec(np.eye(self.dim)[k]) for k in range(self.dim)]

    def matrix_unit(self, block: int, i: int, j: int) -> "AlgElement":
        k = self.labels.index((block, i, j))
        return self.from_vec(np.eye(self.dim)[k])


@dataclass(frozen=True, eq=False)
class AlgElement:
    """An element of a :class:`CStarAlgebra`: one complex matrix per block."""

    algebra: CStarAlgebra
    blocks: tuple

    @cached_property
    def vec(self) -> np.ndarray:
        v = self.algebra.join(self.blocks)
        v.setflags(write=False)
        return v

    def _check(self, other: "AlgElement"):
        if not isinstance(other, AlgElement) or other.algebra != self.algebra:
            raise ShapeMismatch("elements belong to different algebras")

    def __add__(self, other):
        self._check(other)
        return self.algebra.element([x + y for x, y in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check(other)
        return self.algebra.element([x - y for x, y in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return self.algebra.element([-x for x in self.blocks])

    def __mul__(self, lam):
        if isinstance(lam, AlgElement):
            return self @ lam
        return self.algebra.element([lam * x for x in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return self.algebra.element([x @ y for x, y in zip(self.blocks, other.blocks)])

    @property
    def H(self) -> "AlgElement":
        return self.algebra.element([x.conj().T for x in self.blocks])

    def adjoint(self) -> "AlgElement":
        return self.H

    def norm(self) -> float:
        return operator_norm(self)

    def allclose(self, other: "AlgElement", atol: float = 1e-9) -> bool:
        self._check(other)
        return (self - other).norm() <= atol

    def __repr__(self):
        return f"AlgElement({self.algebra!r}, {[m.tolist() for m in self.blocks]})"


def element_arith(a: AlgElement, b: AlgElement | None = None, kind: str = "mul",
                  lam: complex = 1.0) -> AlgElement:
    """Blockwise arithmetic: ``kind`` in {add, mul, adjoint, scale}."""
    if kind == "add":
        return a + b
    if kind == "mul":
        return a @ b
    if kind == "adjoint":
        return a.H
    if kind == "scale":
        return lam * a
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def operator_norm(a: AlgElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(float(np.linalg.norm(m, 2)) for m in a.blocks)


def unitarity_residual(a: AlgElement) -> float:
    res = 0.0
    for m in a.blocks:
        eye = np.eye(m.shape[0])
        res = max(res, np.linalg.norm(m.conj().T @ m - eye, 2), np.linalg.norm(m @ m.conj().T - eye, 2))
    return float(res)


@dataclass(frozen=True)
class PositivityVerdict:
    """``kind`` is one of ``positive``, ``notSelfAdjoint``, ``negativeEigenvalue``."""

    kind: str
    block: int | None = None
    value: float | None = None

    def __bool__(self):
        return self.kind == "positive"


def positivity_test(a: AlgElement, tol: Tolerance = DEFAULT_TOL) -> PositivityVerdict:
    scale = operator_norm(a)
    bound = tol.bound(scale)
    skew = max(float(np.linalg.norm(m - m.conj().T, 2)) for m in a.blocks)
    if skew > bound:
        return PositivityVerdict("notSelfAdjoint", value=skew)
    for b, m in enumerate(a.blocks):
        lam = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if lam < -bound:
            return PositivityVerdict("negativeEigenvalue", block=b, value=lam)
    return PositivityVerdict("positive")


def center_basis(alg: CStarAlgebra) -> list:
    """Block identities ``0 + ... + I_{n_b} + ... + 0``; they span the center."""
    out = []
    for b in range(alg.n_blocks):
        out.append(alg.element([np.eye(n) if c == b else np.zeros((n, n))
                                for c, n in enumerate(alg.block_dims)]))
    return out


def hermitian_min_eig(m: np.ndarray) -> tuple[float, float]:
    """Return ``(lambda_min of the Hermitian part, norm of the skew part)``."""
    herm = (m + m.conj().T) / 2
    skew = float(np.linalg.norm(m - herm, 2)) if m.size else 0.0
    lam = float(np.linalg.eigvalsh(herm)[0]) if m.size else 0.0
    return lam, skew
