"""Hilbert modules on finite-dimensional carriers and equivariant representations.

A module is stored by its structure tensors on a carrier ``C^N``, indexed by
coordinates of the acting algebras (matrix-unit bases):

* ``left_action[k]``  -- operator of ``e_k`` acting on the left, ``a.x = sum_k a_k L_k x``
* ``right_action[k]`` -- operator of ``e_k`` acting on the right, ``x.b = sum_k b_k R_k x``
* ``right_inner[k]``  -- ``<x, y>_B`` has coordinates ``x^H G_k y`` (linear in y)
* ``left_inner[k]``   -- ``A<x, y>`` has coordinates ``y^H GL_k x`` (linear in x), optional

A right Hilbert A-module carrying a representation rho is the special case
``left algebra = right algebra = A`` with ``left_action = rho``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np

from .algebra import DEFAULT_TOL, CStarAlgebra, Tolerance, hermitian_min_eig
from .errors import (AxiomFails, MiddleMismatch, NotARepresentation, ShapeMismatch,
                     SystemMismatch)
from .system import TwistedSystem, UnitaryMap, perturb_unitary

RANK_CUTOFF = 1e-10


def _freeze(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def structure_constants(alg: CStarAlgebra) -> np.ndarray:
    """``C[i, j, :]`` = coordinates of ``e_i e_j``."""
    eye = np.eye(alg.dim)
    c = np.array([alg.lmul(eye[i]) for i in range(alg.dim)]).transpose(0, 2, 1)
    c.setflags(write=False)
    return c


def contract(coeffs, tensor) -> np.ndarray:
    """``sum_k coeffs[k] tensor[k]``."""
    return np.tensordot(np.asarray(coeffs), tensor, axes=(0, 0))


@dataclass(frozen=True, eq=False)
class HilbertBimodule:
    left_algebra: CStarAlgebra
    right_algebra: CStarAlgebra
    left_action: np.ndarray
    right_action: np.ndarray
    right_inner: np.ndarray
    left_inner: np.ndarray | None = None

    def __post_init__(self):
        for name in ("left_action", "right_action", "right_inner"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        if self.left_inner is not None:
            object.__setattr__(self, "left_inner", _freeze(self.left_inner))
        n = self.right_action.shape[-1]
        expect = {"left_action": (self.left_algebra.dim, n, n),
                  "right_action": (self.right_algebra.dim, n, n),
                  "right_inner": (self.right_algebra.dim, n, n)}
        if self.left_inner is not None:
            expect["left_inner"] = (self.left_algebra.dim, n, n)
        for name, shape in expect.items():
            if getattr(self, name).shape != shape:
                raise ShapeMismatch(f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def dim(self) -> int:
        return self.right_action.shape[-1]

    def left_op(self, a) -> np.ndarray:
        return contract(a, self.left_action)

    def right_op(self, b) -> np.ndarray:
        return contract(b, self.right_action)

    def act_left(self, a, x) -> np.ndarray:
        return self.left_op(a) @ x

    def act_right(self, x, b) -> np.ndarray:
        return self.right_op(b) @ x

    def inner(self, x, y) -> np.ndarray:
        """Coordinates of ``<x, y>`` in the right algebra."""
        return np.einsum("i,kij,j->k", np.conj(x), self.right_inner, y)

    def linner(self, x, y) -> np.ndarray:
        """Coordinates of the left inner product ``A<x, y>``."""
        if self.left_inner is None:
            raise ShapeMismatch("module has no left inner product")
        return np.einsum("i,kij,j->k", np.conj(y), self.left_inner, x)

    def norm(self, x) -> float:
        """``||<x, x>||^(1/2)``."""
        return float(np.sqrt(self.right_algebra.norm_vec(self.inner(x, x))))

    @cached_property
    def trace_gram(self) -> np.ndarray:
        """Scalar form ``Trace(<x, y>)`` as a Hermitian matrix."""
        m = contract(self.right_algebra.trace_weights, self.right_inner)
        return (m + m.conj().T) / 2

    def ad(self, s) -> np.ndarray:
        """``x -> (s.x).s*`` for ``s`` in the (common) algebra."""
        return self.left_op(s) @ self.right_op(self.right_algebra.adjoint_vec(s))


def block_gram(inner: np.ndarray, alg: CStarAlgebra) -> list:
    """The Gram matrix ``[<e_i, e_j>]`` in ``M_N(A)`` split into one scalar matrix per block."""
    n = inner.shape[-1]
    out = []
    for b, nb in enumerate(alg.block_dims):
        blk = inner[alg.block_slice(b)].reshape(nb, nb, n, n)  # [r, s, i, j]
        out.append(blk.transpose(2, 0, 3, 1).reshape(n * nb, n * nb))
    return out


def gram_min_eig(inner: np.ndarray, alg: CStarAlgebra) -> float:
    return min(hermitian_min_eig(m)[0] for m in block_gram(inner, alg))


def module_axiom_failure(mod: HilbertBimodule, tol: Tolerance = DEFAULT_TOL):
    """First failed structural axiom as ``(name, residual)``, or None.

    Covers unital (anti-)multiplicativity of both actions, commuting actions,
    A-linearity and hermiticity of the inner products, adjointability,
    positivity of the Gram matrices in ``M_N(A)`` and nondegeneracy.
    """
    la, ra = mod.left_algebra, mod.right_algebra
    L, R, G = mod.left_action, mod.right_action, mod.right_inner
    n = mod.dim
    eye = np.eye(n)
    scale = max(1.0, float(np.max(np.abs(G))) if G.size else 1.0,
                float(np.max(np.abs(L))) if L.size else 1.0)
    bound = tol.bound(scale)

    def worst(x):
        return float(np.max(np.abs(x))) if np.size(x) else 0.0

    checks = []
    checks.append(("left-unital", lambda: worst(mod.left_op(la.unit_vec) - eye)))
    checks.append(("right-unital", lambda: worst(mod.right_op(ra.unit_vec) - eye)))
    cl, cr = structure_constants(la), structure_constants(ra)
    checks.append(("left-multiplicative", lambda: worst(
        np.einsum("ijk,kab->ijab", cl, L) - np.einsum("iab,jbc->ijac", L, L))))
    checks.append(("right-multiplicative", lambda: worst(
        np.einsum("ijk,kab->ijab", cr, R) - np.einsum("jab,ibc->ijac", R, R))))
    checks.append(("actions-commute", lambda: worst(
        np.einsum("iab,jbc->ijac", L, R) - np.einsum("jab,ibc->ijac", R, L))))
    # <x, y.b> = <x, y> b
    checks.append(("right-inner-linear", lambda: worst(
        np.einsum("kab,jbc->jkac", G, R)
        - np.einsum("jkl,lac->jkac", np.array([ra.rmul(np.eye(ra.dim)[j]) for j in range(ra.dim)]), G))))
    checks.append(("right-inner-hermitian", lambda: worst(
        G - np.conj(G[ra.adjoint_index]).transpose(0, 2, 1))))
    # <a.x, y> = <x, a*.y>
    la_adj = L[la.adjoint_index]  # e_j* is again a matrix unit
    checks.append(("left-adjointable", lambda: worst(
        np.einsum("jba,kbc->jkac", np.conj(L), G) - np.einsum("kab,jbc->jkac", G, la_adj))))
    if mod.left_inner is not None:
        GL = mod.left_inner
        # A<a.x, y> = a A<x, y>
        checks.append(("left-inner-linear", lambda: worst(
            np.einsum("kab,jbc->jkac", GL, L)
            - np.einsum("jkl,lac->jkac", np.array([la.lmul(np.eye(la.dim)[j]) for j in range(la.dim)]), GL))))
        checks.append(("left-inner-hermitian", lambda: worst(
            GL - np.conj(GL[la.adjoint_index]).transpose(0, 2, 1))))
        rb_adj = np.conj(R[ra.adjoint_index])
        # A<x.b, y> = A<x, y.b*>
        checks.append(("right-adjointable", lambda: worst(
            np.einsum("kab,jbc->jkac", GL, R) - np.einsum("jba,kbc->jkac", rb_adj, GL))))
    for name, fn in checks:
        r = fn()
        if r > bound:
            return name, r
    lam = gram_min_eig(G, ra)
    if lam < -bound:
        return "right-inner-positive", -lam
    if mod.left_inner is not None:
        lam = gram_min_eig(mod.left_inner.transpose(0, 2, 1), la)
        if lam < -bound:
            return "left-inner-positive", -lam
    if n:
        w = np.linalg.eigvalsh(mod.trace_gram)
        if w[0] <= RANK_CUTOFF * max(w[-1], 1.0):
            return "nondegenerate", float(w[0])
    return None


# -----------------------------------------------------------------------------
# internal tensor products
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuotientWitness:
    """Records the passage from the algebraic tensor carrier to its quotient.

    ``basis_map`` (rank x N1*N2) sends the class of an algebraic tensor to
    quotient coordinates; its kernel is the null space of the semi-inner product.
    """

    gram_rank: int
    dropped_dim: int
    basis_map: np.ndarray

    def embed(self, x, y) -> np.ndarray:
        """Quotient coordinates of the simple tensor ``x (.) y``."""
        return self.basis_map @ np.kron(x, y)

    def operator(self, t) -> np.ndarray:
        """Compress an operator that preserves the null space."""
        return self.basis_map @ t @ self.basis_map.conj().T


def _quotient_basis(trace_gram: np.ndarray):
    m = (trace_gram + trace_gram.conj().T) / 2
    w, u = np.linalg.eigh(m)
    top = max(float(w[-1]), 0.0) if w.size else 0.0
    keep = w > RANK_CUTOFF * top
    u_plus = u[:, keep]
    # deterministic sign/phase: make the largest-modulus entry of each column real positive
    for c in range(u_plus.shape[1]):
        col = u_plus[:, c]
        k = int(np.argmax(np.abs(col)))
        u_plus[:, c] = col * (abs(col[k]) / col[k])
    return u_plus


def tensor_bimodules(x: HilbertBimodule, y: HilbertBimodule) -> tuple[HilbertBimodule, QuotientWitness]:
    """Internal tensor product ``X (x)_B Y`` of an A-B and a B-C bimodule."""
    if x.right_algebra != y.left_algebra:
        raise MiddleMismatch(f"{x.right_algebra!r} vs {y.left_algebra!r}")
    nx, ny = x.dim, y.dim
    # <x1 (x) x2, y1 (x) y2> = <x2, <x1, y1>.y2>
    gy = np.einsum("mab,lbc->lmac", y.right_inner, y.left_action)
    right_inner = np.einsum("lij,lmab->miajb", x.right_inner, gy).reshape(
        y.right_algebra.dim, nx * ny, nx * ny)
    left_inner = None
    if x.left_inner is not None and y.left_inner is not None:
        # A<x1 (x) x2, y1 (x) y2> = A<x1 . B<x2, y2>, y1>
        gx = np.einsum("kab,lbc->klac", x.left_inner, x.right_action)
        left_inner = np.einsum("klij,lab->kiajb", gx, y.left_inner).reshape(
            x.left_algebra.dim, nx * ny, nx * ny)
    left = np.array([np.kron(op, np.eye(ny)) for op in x.left_action]).reshape(-1, nx * ny, nx * ny)
    right = np.array([np.kron(np.eye(nx), op) for op in y.right_action]).reshape(-1, nx * ny, nx * ny)

    trace_gram = contract(y.right_algebra.trace_weights, right_inner)
    u_plus = _quotient_basis(trace_gram)
    p = u_plus.conj().T
    witness = QuotientWitness(u_plus.shape[1], nx * ny - u_plus.shape[1], _freeze(p))

    def compress(t):
        return np.einsum("ra,kab,bs->krs", p, t, u_plus)

    mod = HilbertBimodule(
        x.left_algebra, y.right_algebra,
        compress(left).reshape(x.left_algebra.dim, witness.gram_rank, witness.gram_rank),
        compress(right).reshape(y.right_algebra.dim, witness.gram_rank, witness.gram_rank),
        compress(right_inner),
        None if left_inner is None else compress(left_inner))
    return mod, witness


def bimodule_from_functions(left_alg: CStarAlgebra, right_alg: CStarAlgebra, dim: int,
                            left_act: Callable, right_act: Callable, right_inner: Callable,
                            left_inner: Callable | None = None) -> HilbertBimodule:
    """Build structure tensors by evaluating callables on bases.

    ``left_act(a, x)``/``right_act(x, b)`` take algebra elements and carrier
    vectors; the inner products take two carrier vectors and return algebra
    elements (or coordinate vectors).
    """
    eye = np.eye(dim)
    la_basis, ra_basis = left_alg.basis(), right_alg.basis()

    def coords(v, alg):
        return v.vec if hasattr(v, "vec") else np.asarray(v, dtype=complex).reshape(alg.dim)

    L = np.array([[left_act(a, eye[j]) for j in range(dim)] for a in la_basis]).transpose(0, 2, 1)
    R = np.array([[right_act(eye[j], b) for j in range(dim)] for b in ra_basis]).transpose(0, 2, 1)
    G = np.array([[coords(right_inner(eye[i], eye[j]), right_alg) for j in range(dim)]
                  for i in range(dim)]).transpose(2, 0, 1)
    GL = None
    if left_inner is not None:
        # y^H GL_k x = A<x, y>_k  so  GL_k[j, i] = A<e_i, e_j>_k
        GL = np.array([[coords(left_inner(eye[i], eye[j]), left_alg) for i in range(dim)]
                       for j in range(dim)]).transpose(2, 0, 1)
    return HilbertBimodule(left_alg, right_alg, L.reshape(left_alg.dim, dim, dim),
                           R.reshape(right_alg.dim, dim, dim), G.reshape(right_alg.dim, dim, dim),
                           None if GL is None else GL.reshape(left_alg.dim, dim, dim))


def algebra_bimodule(alg: CStarAlgebra) -> HilbertBimodule:
    """``A`` over itself with ``<a, b> = a*b`` and ``A<a, b> = ab*``."""
    eye = np.eye(alg.dim)
    L = np.array([alg.lmul(eye[k]) for k in range(alg.dim)])
    R = np.array([alg.rmul(eye[k]) for k in range(alg.dim)])
    prods = structure_constants(alg)  # [i, j, k]
    adj = alg.adjoint_index
    # <e_i, e_j>_k = (e_i* e_j)_k, and e_i* = e_adj(i) for matrix units
    G = prods[adj].transpose(2, 0, 1)
    # A<e_i, e_j>_k = (e_i e_j*)_k stored at GL_k[j, i]
    GL = prods[:, adj].transpose(2, 1, 0)
    return HilbertBimodule(alg, alg, L, R, G, GL)


# -----------------------------------------------------------------------------
# equivariant representations
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EquivariantRep:
    """``(rho, v)`` on the module; ``rho`` is the module's left action."""

    system: TwistedSystem
    module: HilbertBimodule
    v: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "v", _freeze(self.v))
        n, N = self.system.order, self.module.dim
        if self.v.shape != (n, N, N):
            raise ShapeMismatch(f"v has shape {self.v.shape}, expected {(n, N, N)}")
        if self.module.left_algebra != self.system.algebra or self.module.right_algebra != self.system.algebra:
            raise SystemMismatch("module algebras differ from the system's algebra")

    @property
    def dim(self) -> int:
        return self.module.dim

    def rho(self, a) -> np.ndarray:
        return self.module.left_op(a.vec if hasattr(a, "vec") else a)

    def ad(self, s) -> np.ndarray:
        """``ad_rho(s) x = (rho(s) x).s*``."""
        return self.module.ad(s.vec if hasattr(s, "vec") else s)


def _worst(x) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def validate_equivariant(system: TwistedSystem, rep: EquivariantRep,
                         tol: Tolerance = DEFAULT_TOL, seed: int = 0) -> EquivariantRep:
    """Check the module structure and the equivariance axioms exhaustively on bases.

    Axioms are tested in the order (i), (iii), (iv), (ii): the first three
    are linear in ``v(g)`` and localize a defect to one group element.
    """
    if rep.system.algebra != system.algebra or rep.system.group != system.group:
        raise SystemMismatch("representation is over a different system")
    mod = rep.module
    alg, grp = system.algebra, system.group
    fail = module_axiom_failure(mod, tol)
    if fail is not None:
        raise AxiomFails(f"module:{fail[0]}", witness=fail[1])
    L, R, G = mod.left_action, mod.right_action, mod.right_inner
    amat = system.alpha_mats
    scale = max(1.0, _worst(G), _worst(rep.v) ** 2)
    bound = tol.bound(scale)
    eye = np.eye(mod.dim)

    for g in grp:
        v = rep.v[g]
        cond = np.linalg.cond(v) if mod.dim else 1.0
        if not np.isfinite(cond) or cond > 1e12:
            raise AxiomFails("invertible", g, witness=float(cond))
        # (i) rho(alpha_g(e_k)) v = v rho(e_k)
        r = _worst(np.einsum("lk,lab,bc->kac", amat[g], L, v) - np.einsum("ab,kbc->kac", v, L))
        if r > bound:
            raise AxiomFails("i", g, witness=r)
        # (iii) <v x, v y> = alpha_g(<x, y>)
        r = _worst(np.einsum("ba,kbc,cd->kad", v.conj(), G, v) - np.einsum("kl,lab->kab", amat[g], G))
        if r > bound:
            raise AxiomFails("iii", g, witness=r)
        # (iv) v (x.e_k) = (v x).alpha_g(e_k)
        r = _worst(np.einsum("ab,kbc->kac", v, R) - np.einsum("lk,lab,bc->kac", amat[g], R, v))
        if r > bound:
            raise AxiomFails("iv", g, witness=r)
    for g in grp:
        for h in grp:
            s = system.sigma_vecs[g, h]
            r = _worst(rep.v[g] @ rep.v[h] - mod.ad(s) @ rep.v[grp.mul(g, h)])
            if r > bound:
                raise AxiomFails("ii", g, h, witness=r)

    # isometry of each v(g) on a basis and on seeded random vectors
    rng = np.random.default_rng(seed)
    probes = list(eye) + [rng.normal(size=mod.dim) + 1j * rng.normal(size=mod.dim) for _ in range(5)]
    for g in grp:
        for x in probes:
            y = rep.v[g] @ x
            r = abs(mod.norm(y) ** 2 - mod.norm(x) ** 2)
            if r > tol.bound(max(1.0, mod.norm(x) ** 2)):
                raise AxiomFails("isometric", g, witness=r)
    return rep


def trivial_rep(system: TwistedSystem) -> EquivariantRep:
    """``A`` over itself with ``rho`` = left multiplication and ``v = alpha``."""
    return EquivariantRep(system, algebra_bimodule(system.algebra), np.array(system.alpha_mats), "trivial")


def regular_rep(system: TwistedSystem) -> EquivariantRep:
    """``A^G`` (index ``h * dim A + k``) with ``(v(g) xi)(h) = alpha_g(xi(g^-1 h))``."""
    alg, grp = system.algebra, system.group
    n, d = grp.order, alg.dim
    base = algebra_bimodule(alg)
    eye_g = np.eye(n)
    L = np.array([np.kron(eye_g, op) for op in base.left_action])
    R = np.array([np.kron(eye_g, op) for op in base.right_action])
    G = np.array([np.kron(eye_g, op) for op in base.right_inner])
    v = np.zeros((n, n * d, n * d), dtype=complex)
    for g in grp:
        gi = grp.inv(g)
        for h in grp:
            src = grp.mul(gi, h)
            v[g, h * d:(h + 1) * d, src * d:(src + 1) * d] = system.alpha_mats[g]
    return EquivariantRep(system, HilbertBimodule(alg, alg, L, R, G), v, "regular")


def regular_basis_vector(system: TwistedSystem, g: int, a=None) -> np.ndarray:
    """The element of ``A^G`` supported at ``g`` with value ``a`` (default ``1_A``)."""
    d = system.algebra.dim
    x = np.zeros(system.order * d, dtype=complex)
    x[g * d:(g + 1) * d] = system.algebra.unit_vec if a is None else (a.vec if hasattr(a, "vec") else a)
    return x


def check_group_rep(w, group, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    if w.ndim != 3 or w.shape[0] != group.order or w.shape[1] != w.shape[2]:
        raise ShapeMismatch("group representation must have shape (|G|, d, d)")
    d = w.shape[1]
    for g in group:
        r = _worst(w[g].conj().T @ w[g] - np.eye(d))
        if r > tol.bound(1.0):
            raise NotARepresentation(g, g, r)
    for g in group:
        for h in group:
            r = _worst(w[g] @ w[h] - w[group.mul(g, h)])
            if r > tol.bound(1.0):
                raise NotARepresentation(g, h, r)
    return w


def amplify_rep(rep: EquivariantRep, w, tol: Tolerance = DEFAULT_TOL) -> EquivariantRep:
    """``(rho (x) 1, v (x) w)`` on ``X (x) C^d``."""
    w = check_group_rep(w, rep.system.group, tol)
    d = w.shape[1]
    mod = rep.module
    eye = np.eye(d)
    new = HilbertBimodule(mod.left_algebra, mod.right_algebra,
                          np.array([np.kron(op, eye) for op in mod.left_action]),
                          np.array([np.kron(op, eye) for op in mod.right_action]),
                          np.array([np.kron(op, eye) for op in mod.right_inner]))
    v = np.array([np.kron(rep.v[g], w[g]) for g in rep.system.group])
    return EquivariantRep(rep.system, new, v, f"{rep.label}*amp{d}")


def direct_sum_reps(rep1: EquivariantRep, rep2: EquivariantRep) -> EquivariantRep:
    if rep1.system is not rep2.system and (rep1.system.algebra != rep2.system.algebra
                                           or rep1.system.group != rep2.system.group):
        raise SystemMismatch("direct sum of representations over different systems")

    def dsum(a, b):
        out = np.zeros((a.shape[0], a.shape[1] + b.shape[1], a.shape[2] + b.shape[2]), dtype=complex)
        out[:, :a.shape[1], :a.shape[2]] = a
        out[:, a.shape[1]:, a.shape[2]:] = b
        return out

    m1, m2 = rep1.module, rep2.module
    mod = HilbertBimodule(m1.left_algebra, m1.right_algebra,
                          dsum(m1.left_action, m2.left_action), dsum(m1.right_action, m2.right_action),
                          dsum(m1.right_inner, m2.right_inner))
    return EquivariantRep(rep1.system, mod, dsum(rep1.v, rep2.v), f"{rep1.label}+{rep2.label}")


def internal_tensor_reps(system: TwistedSystem, rep1: EquivariantRep,
                         rep2: EquivariantRep) -> tuple[EquivariantRep, QuotientWitness]:
    """``(rho1 (x) 1, v1 (x) v2)`` on the quotient of ``X1 (x) X2`` by the null space."""
    for rep in (rep1, rep2):
        if rep.system.algebra != system.algebra or rep.system.group != system.group:
            raise SystemMismatch("representations must be over the same system")
    mod, wit = tensor_bimodules(rep1.module, rep2.module)
    v = np.array([wit.operator(np.kron(rep1.v[g], rep2.v[g])) for g in system.group])
    return EquivariantRep(system, mod, v, f"({rep1.label}(x){rep2.label})"), wit


def perturbed_rep(system: TwistedSystem, w, rep: EquivariantRep,
                  tol: Tolerance = DEFAULT_TOL) -> EquivariantRep:
    """``(rho, g -> ad_rho(w(g)) v(g))``, an equivariant representation of ``Sigma^w``."""
    w = w if isinstance(w, UnitaryMap) else UnitaryMap(tuple(w))
    target = perturb_unitary(system, w, tol)
    v = np.array([rep.ad(w[g]) @ rep.v[g] for g in system.group])
    return EquivariantRep(target, rep.module, v, f"{rep.label}^w")
