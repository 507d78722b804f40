"""Twisted systems (A, G, alpha, sigma), their axioms, perturbations and transports.

Automorphisms (and, more generally, *-isomorphisms between block algebras) are
kept in the normal form ``a -> u . perm(a) . u*`` where ``perm`` moves blocks
onto blocks of equal size and ``u`` is a unitary of the target algebra. Every
*-isomorphism of finite-dimensional C*-algebras has this form.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import (DEFAULT_TOL, AlgElement, CStarAlgebra, FiniteGroup, Tolerance,
                      group_homomorphism_residual, unitarity_residual)
from .errors import (AutomorphismTwistMismatch, CocycleIdentityFails, NotCentral,
                     NotConjugate, NotIsomorphism, NotNormalized, NotUnitary,
                     NotUnitaryCocycle, NotUnitModulus, ShapeMismatch)


@dataclass(frozen=True, eq=False)
class Isomorphism:
    """*-isomorphism ``source -> target``, ``a -> u . perm(a) . u*``.

    ``perm[b]`` is the target block receiving source block ``b``.
    """

    source: CStarAlgebra
    target: CStarAlgebra
    perm: tuple
    unitary: AlgElement

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        object.__setattr__(self, "perm", perm)
        if len(perm) != self.source.n_blocks or sorted(perm) != list(range(self.target.n_blocks)):
            raise NotIsomorphism(f"block map {perm} is not a bijection of blocks")
        for b, p in enumerate(perm):
            if self.source.block_dims[b] != self.target.block_dims[p]:
                raise NotIsomorphism(f"block {b} (size {self.source.block_dims[b]}) mapped to "
                                     f"block {p} (size {self.target.block_dims[p]})")
        if self.unitary.algebra != self.target:
            raise ShapeMismatch("implementing unitary must live in the target algebra")

    @classmethod
    def identity(cls, alg: CStarAlgebra) -> "Isomorphism":
        return cls(alg, alg, tuple(range(alg.n_blocks)), alg.unit())

    @classmethod
    def inner(cls, alg: CStarAlgebra, u: AlgElement) -> "Isomorphism":
        """``Ad(u)``."""
        return cls(alg, alg, tuple(range(alg.n_blocks)), u)

    @classmethod
    def block_permutation(cls, source: CStarAlgebra, perm, target: CStarAlgebra | None = None):
        target = source if target is None else target
        return cls(source, target, tuple(perm), target.unit())

    def permute(self, a: AlgElement) -> AlgElement:
        blocks = [None] * self.target.n_blocks
        for b, p in enumerate(self.perm):
            blocks[p] = a.blocks[b]
        return self.target.element(blocks)

    def __call__(self, a: AlgElement) -> AlgElement:
        if a.algebra != self.source:
            raise ShapeMismatch("argument is not in the source algebra")
        u = self.unitary
        return u @ self.permute(a) @ u.H

    @cached_property
    def matrix(self) -> np.ndarray:
        """Matrix on coordinate vectors (target dim x source dim)."""
        src, tgt = self.source, self.target
        perm_mat = np.zeros((tgt.dim, src.dim))
        for b, p in enumerate(self.perm):
            n = src.block_dims[b]
            perm_mat[tgt.block_slice(p), src.block_slice(b)] = np.eye(n * n)
        u = self.unitary.vec
        m = tgt.lmul(u) @ tgt.rmul(tgt.adjoint_vec(u)) @ perm_mat
        m.setflags(write=False)
        return m

    def apply_vec(self, v) -> np.ndarray:
        return self.matrix @ v

    def compose(self, other: "Isomorphism") -> "Isomorphism":
        """``self o other`` (apply ``other`` first)."""
        if other.target != self.source:
            raise ShapeMismatch("cannot compose: algebras do not match")
        perm = tuple(self.perm[other.perm[b]] for b in range(other.source.n_blocks))
        return Isomorphism(other.source, self.target, perm, self.unitary @ self.permute(other.unitary))

    def inverse(self) -> "Isomorphism":
        inv = [0] * len(self.perm)
        for b, p in enumerate(self.perm):
            inv[p] = b
        back = Isomorphism.block_permutation(self.target, inv, self.source)
        return Isomorphism(self.target, self.source, tuple(inv), back.permute(self.unitary.H))

    def distance(self, other: "Isomorphism") -> float:
        """Operator-norm-free comparison of the induced linear maps."""
        return float(np.max(np.abs(self.matrix - other.matrix))) if self.matrix.size else 0.0

    def __repr__(self):
        return f"Isomorphism({self.source!r} -> {self.target!r}, perm={self.perm})"


Automorphism = Isomorphism


@dataclass(frozen=True, eq=False)
class TwistedSystem:
    """``(A, G, alpha, sigma)``; construct freely, certify with :func:`validate_system`."""

    algebra: CStarAlgebra
    group: FiniteGroup
    alpha: tuple
    sigma: tuple

    def __post_init__(self):
        n = self.group.order
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "sigma", tuple(tuple(row) for row in self.sigma))
        if len(self.alpha) != n:
            raise ShapeMismatch(f"alpha has {len(self.alpha)} entries for a group of order {n}")
        for g, a in enumerate(self.alpha):
            if a.source != self.algebra or a.target != self.algebra:
                raise ShapeMismatch(f"alpha_{g} is not an automorphism of {self.algebra!r}")
        if len(self.sigma) != n or any(len(row) != n for row in self.sigma):
            raise ShapeMismatch(f"sigma must be a {n}x{n} table")
        for row in self.sigma:
            for s in row:
                if not isinstance(s, AlgElement) or s.algebra != self.algebra:
                    raise ShapeMismatch("sigma entries must be elements of the algebra")

    @property
    def order(self) -> int:
        return self.group.order

    @cached_property
    def alpha_mats(self) -> np.ndarray:
        m = np.array([a.matrix for a in self.alpha])
        m.setflags(write=False)
        return m

    @cached_property
    def alpha_inv_mats(self) -> np.ndarray:
        m = np.array([a.inverse().matrix for a in self.alpha])
        m.setflags(write=False)
        return m

    @cached_property
    def sigma_vecs(self) -> np.ndarray:
        v = np.array([[s.vec for s in row] for row in self.sigma])
        v.setflags(write=False)
        return v

    def __repr__(self):
        return f"TwistedSystem({self.algebra!r}, |G|={self.group.order})"


def untwisted(alg: CStarAlgebra, group: FiniteGroup, alpha: Sequence[Isomorphism] | None = None):
    """System with trivial cocycle; ``alpha`` defaults to the trivial action."""
    if alpha is None:
        alpha = [Isomorphism.identity(alg)] * group.order
    one = alg.unit()
    return TwistedSystem(alg, group, alpha, [[one] * group.order for _ in range(group.order)])


def _check_normalized_map(alg, group, w, tol):
    e = group.identity
    res = float(np.linalg.norm(w[e].vec - alg.unit_vec))
    if res > tol.bound(1.0):
        raise NotNormalized(e, res)
    for g, x in enumerate(w):
        r = unitarity_residual(x)
        if r > tol.bound(1.0):
            raise NotUnitary(f"w({g})", r)


def validate_system(candidate: TwistedSystem, tol: Tolerance = DEFAULT_TOL) -> TwistedSystem:
    """Check unitarity, normalization, ``alpha_g alpha_h = Ad(sigma(g,h)) alpha_gh`` and
    the cocycle identity, exhaustively over all pairs and triples."""
    sysm = candidate
    alg, grp = sysm.algebra, sysm.group
    n, e = grp.order, grp.identity
    bound = tol.bound(1.0)
    sig = sysm.sigma_vecs
    amat = sysm.alpha_mats

    for g in range(n):
        for h in range(n):
            r = unitarity_residual(sysm.sigma[g][h])
            if r > bound:
                raise NotUnitaryCocycle(g, h, r)
    one = alg.unit_vec
    for g in range(n):
        r = max(np.linalg.norm(sig[g, e] - one), np.linalg.norm(sig[e, g] - one))
        if r > bound:
            raise NotNormalized(g, float(r))

    for g in range(n):
        for h in range(n):
            s = sig[g, h]
            lhs = amat[g] @ amat[h]
            rhs = alg.lmul(s) @ alg.rmul(alg.adjoint_vec(s)) @ amat[grp.table[g, h]]
            r = float(np.max(np.abs(lhs - rhs)))
            if r > bound:
                raise AutomorphismTwistMismatch(g, h, r)

    for g in range(n):
        for h in range(n):
            gh = grp.table[g, h]
            for k in range(n):
                lhs = alg.mul_vec(sig[g, h], sig[gh, k])
                rhs = alg.mul_vec(amat[g] @ sig[h, k], sig[g, grp.table[h, k]])
                r = alg.norm_vec(lhs - rhs)
                if r > bound:
                    raise CocycleIdentityFails(g, h, k, r)
    return sysm


def system_distance(s1: TwistedSystem, s2: TwistedSystem) -> float:
    """Largest entrywise difference of the alpha matrices and sigma tables."""
    if s1.algebra != s2.algebra or s1.group != s2.group:
        return float("inf")
    return float(max(np.max(np.abs(s1.alpha_mats - s2.alpha_mats)),
                     np.max(np.abs(s1.sigma_vecs - s2.sigma_vecs))))


# -----------------------------------------------------------------------------
# unitary maps and cocycles
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UnitaryMap:
    """Normalized map ``w: G -> U(A)``."""

    values: tuple

    def __getitem__(self, g):
        return self.values[g]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def adjoint(self) -> "UnitaryMap":
        return UnitaryMap(tuple(x.H for x in self.values))

    def compose(self, other: "UnitaryMap") -> "UnitaryMap":
        """Pointwise product ``g -> self(g) other(g)``."""
        return UnitaryMap(tuple(x @ y for x, y in zip(self.values, other.values)))


def unitary_map(system: TwistedSystem, values, tol: Tolerance = DEFAULT_TOL) -> UnitaryMap:
    values = tuple(values)
    if len(values) != system.order:
        raise ShapeMismatch("unitary map needs one value per group element")
    _check_normalized_map(system.algebra, system.group, values, tol)
    return UnitaryMap(values)


def perturb_unitary(system: TwistedSystem, w, tol: Tolerance = DEFAULT_TOL) -> TwistedSystem:
    """``Sigma^w``: ``alpha^w_g = Ad(w(g)) alpha_g`` and
    ``sigma^w(g,h) = w(g) alpha_g(w(h)) sigma(g,h) w(gh)*``."""
    w = w if isinstance(w, UnitaryMap) else UnitaryMap(tuple(w))
    alg, grp = system.algebra, system.group
    _check_normalized_map(alg, grp, w.values, tol)
    n = grp.order
    alpha = [Isomorphism.inner(alg, w[g]).compose(system.alpha[g]) for g in range(n)]
    sigma = [[w[g] @ system.alpha[g](w[h]) @ system.sigma[g][h] @ w[grp.mul(g, h)].H
              for h in range(n)] for g in range(n)]
    return validate_system(TwistedSystem(alg, grp, alpha, sigma), tol)


@dataclass(frozen=True, eq=False)
class ScalarCocycle:
    """Normalized ``T``-valued 2-cocycle on a group (trivial action)."""

    group: FiniteGroup
    omega: np.ndarray

    def __call__(self, g, h) -> complex:
        return complex(self.omega[g, h])

    def as_central(self, alg: CStarAlgebra) -> "CentralCocycle":
        n = self.group.order
        return CentralCocycle(tuple(tuple(alg.scalar(self.omega[g, h]) for h in range(n))
                                    for g in range(n)))


@dataclass(frozen=True, eq=False)
class CentralCocycle:
    """Table ``eta(g, h)`` of central unitaries."""

    values: tuple

    def __getitem__(self, gh):
        g, h = gh
        return self.values[g][h]


def validate_scalar_cocycle(group: FiniteGroup, omega, tol: Tolerance = DEFAULT_TOL) -> ScalarCocycle:
    om = np.asarray(omega, dtype=complex)
    n, e = group.order, group.identity
    if om.shape != (n, n):
        raise ShapeMismatch(f"omega must be {n}x{n}")
    bound = tol.bound(1.0)
    for g in range(n):
        for h in range(n):
            if abs(abs(om[g, h]) - 1) > bound:
                raise NotUnitModulus(g, h, om[g, h])
    for g in range(n):
        r = max(abs(om[g, e] - 1), abs(om[e, g] - 1))
        if r > bound:
            raise NotNormalized(g, float(r))
    t = group.table
    for g in range(n):
        for h in range(n):
            for k in range(n):
                r = abs(om[g, h] * om[t[g, h], k] - om[h, k] * om[g, t[h, k]])
                if r > bound:
                    raise CocycleIdentityFails(g, h, k, float(r))
    om = om.copy()
    om.setflags(write=False)
    return ScalarCocycle(group, om)


def validate_central_cocycle(system: TwistedSystem, eta, tol: Tolerance = DEFAULT_TOL) -> CentralCocycle:
    """Check that ``eta`` is a normalized central unitary 2-cocycle for alpha on Z(A)."""
    if isinstance(eta, ScalarCocycle):
        eta = eta.as_central(system.algebra)
    if not isinstance(eta, CentralCocycle):
        eta = CentralCocycle(tuple(tuple(row) for row in eta))
    alg, grp = system.algebra, system.group
    n, e = grp.order, grp.identity
    if len(eta.values) != n or any(len(r) != n for r in eta.values):
        raise ShapeMismatch(f"eta must be a {n}x{n} table")
    bound = tol.bound(1.0)
    for g in range(n):
        for h in range(n):
            x = eta[g, h]
            if x.algebra != alg:
                raise ShapeMismatch("eta entries must lie in the system's algebra")
            r = alg.center_distance(x.vec)
            if r > bound:
                raise NotCentral(g, h, r)
            r = unitarity_residual(x)
            if r > bound:
                raise NotUnitaryCocycle(g, h, r)
    one = alg.unit_vec
    for g in range(n):
        r = max(np.linalg.norm(eta[g, e].vec - one), np.linalg.norm(eta[e, g].vec - one))
        if r > bound:
            raise NotNormalized(g, float(r))
    t = grp.table
    for g in range(n):
        for h in range(n):
            for k in range(n):
                lhs = eta[g, h] @ eta[t[g, h], k]
                rhs = system.alpha[g](eta[h, k]) @ eta[g, t[h, k]]
                r = (lhs - rhs).norm()
                if r > bound:
                    raise CocycleIdentityFails(g, h, k, r)
    return eta


def perturb_central(system: TwistedSystem, eta, tol: Tolerance = DEFAULT_TOL) -> TwistedSystem:
    """``Sigma(eta) = (A, G, alpha, sigma . eta)`` for a central 2-cocycle eta."""
    eta = validate_central_cocycle(system, eta, tol)
    n = system.order
    sigma = [[system.sigma[g][h] @ eta[g, h] for h in range(n)] for g in range(n)]
    return validate_system(TwistedSystem(system.algebra, system.group, system.alpha, sigma), tol)


def coboundary(system: TwistedSystem, u, tol: Tolerance = DEFAULT_TOL) -> list:
    """``du(g, h) = u(g) alpha_g(u(h)) u(gh)*`` as an ``n x n`` table of elements."""
    u = u if isinstance(u, UnitaryMap) else UnitaryMap(tuple(u))
    _check_normalized_map(system.algebra, system.group, u.values, tol)
    grp = system.group
    n = grp.order
    return [[u[g] @ system.alpha[g](u[h]) @ u[grp.mul(g, h)].H for h in range(n)]
            for g in range(n)]


def is_one_cocycle(system: TwistedSystem, u, tol: Tolerance = DEFAULT_TOL) -> bool:
    """``u(gh) = u(g) alpha_g(u(h))`` for all g, h."""
    grp = system.group
    return all((u[grp.mul(g, h)] - u[g] @ system.alpha[g](u[h])).norm() <= tol.bound(1.0)
               for g in grp for h in grp)


# -----------------------------------------------------------------------------
# group conjugacy
# -----------------------------------------------------------------------------

def _check_group_iso(src: FiniteGroup, dst: FiniteGroup, phi_g) -> np.ndarray:
    phi_g = np.asarray(phi_g, dtype=np.int64)
    if phi_g.shape != (src.order,) or src.order != dst.order:
        raise NotIsomorphism("group map has the wrong size")
    if sorted(phi_g.tolist()) != list(range(dst.order)):
        raise NotIsomorphism("group map is not a bijection")
    bad = group_homomorphism_residual(src, dst, phi_g)
    if bad is not None:
        raise NotIsomorphism(f"group map is not multiplicative at {bad}")
    return phi_g


def group_transport(system: TwistedSystem, phi: Isomorphism, phi_g,
                    target_group: FiniteGroup | None = None,
                    tol: Tolerance = DEFAULT_TOL) -> TwistedSystem:
    """Transport ``Sigma`` along ``phi: A -> B`` and ``phi_g: G -> H``:
    ``beta_{phi_g(g)} = phi alpha_g phi^-1``, ``theta(phi_g g, phi_g h) = phi(sigma(g, h))``."""
    target_group = system.group if target_group is None else target_group
    if phi.source != system.algebra:
        raise NotIsomorphism("phi is not defined on the system's algebra")
    phi_g = _check_group_iso(system.group, target_group, phi_g)
    n = system.order
    phi_inv = phi.inverse()
    beta = [None] * n
    theta = [[None] * n for _ in range(n)]
    for g in range(n):
        beta[phi_g[g]] = phi.compose(system.alpha[g]).compose(phi_inv)
        for h in range(n):
            theta[phi_g[g]][phi_g[h]] = phi(system.sigma[g][h])
    return validate_system(TwistedSystem(phi.target, target_group, beta, theta), tol)


def certify_group_conjugacy(sigma_sys: TwistedSystem, theta_sys: TwistedSystem,
                            phi: Isomorphism, phi_g, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Verify (i) ``beta_{phi_g(g)} = phi alpha_g phi^-1`` and
    (ii) ``theta(phi_g g, phi_g h) = phi(sigma(g, h))``; return ``phi_g`` as an array."""
    if phi.source != sigma_sys.algebra or phi.target != theta_sys.algebra:
        raise NotIsomorphism("phi does not map between the systems' algebras")
    phi_g = _check_group_iso(sigma_sys.group, theta_sys.group, phi_g)
    bound = tol.bound(1.0)
    pm, pinv = phi.matrix, phi.inverse().matrix
    for g in sigma_sys.group:
        r = float(np.max(np.abs(theta_sys.alpha_mats[phi_g[g]] - pm @ sigma_sys.alpha_mats[g] @ pinv)))
        if r > bound:
            raise NotConjugate("i", g, r)
    for g in sigma_sys.group:
        for h in sigma_sys.group:
            r = theta_sys.algebra.norm_vec(theta_sys.sigma_vecs[phi_g[g], phi_g[h]]
                                           - pm @ sigma_sys.sigma_vecs[g, h])
            if r > bound:
                raise NotConjugate("ii", g, r, h)
    return phi_g
