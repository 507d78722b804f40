"""Imprimitivity bimodules, compatible actions and the transfer of coefficient maps.

Bimodules reuse :class:`~fsbench.modules.HilbertBimodule` with both inner
products present. The conjugate bimodule lives on the same carrier with
conjugated coordinates: the vector ``z~`` has coordinates ``conj(z)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import DEFAULT_TOL, CStarAlgebra, Tolerance, cyclic_group
from .errors import (BulletFails, CompatibilityFails, FrameSolveFailed, InnerNotPositive,
                     MiddleMismatch, ModuleAxiomFails, NormMismatch, NotCommutative,
                     NotFullLeft, NotFullRight, PhiInconsistent, ReconstructionResidual,
                     ShapeMismatch, SystemMismatch)
from .fourier import CoeffMap, coefficient_map, identity_map, same_system
from .modules import (EquivariantRep, HilbertBimodule, QuotientWitness, algebra_bimodule,
                      bimodule_from_functions, gram_min_eig, module_axiom_failure,
                      tensor_bimodules)
from .system import (Isomorphism, TwistedSystem, certify_group_conjugacy, group_transport, untwisted,
                     validate_system)
from .transport import TransportReport

ImprimitivityBimodule = HilbertBimodule


def _worst(x) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def _scale(*arrays) -> float:
    return max([1.0] + [_worst(a) for a in arrays])


# -----------------------------------------------------------------------------
# bimodules
# -----------------------------------------------------------------------------

def validate_bimodule(z: HilbertBimodule, tol: Tolerance = DEFAULT_TOL, seed: int = 0,
                      n_random: int = 20) -> HilbertBimodule:
    """Positivity, fullness on both sides, compatibility of the inner products on
    basis triples, norm coincidence, then the remaining module axioms."""
    if z.left_inner is None:
        raise ShapeMismatch("an imprimitivity bimodule needs a left inner product")
    la, ra = z.left_algebra, z.right_algebra
    G, GL, L, R = z.right_inner, z.left_inner, z.left_action, z.right_action
    n = z.dim
    bound = tol.bound(_scale(G, GL))

    lam = gram_min_eig(G, ra)
    if lam < -bound:
        raise InnerNotPositive("right", lam)
    lam = gram_min_eig(GL.transpose(0, 2, 1), la)
    if lam < -bound:
        raise InnerNotPositive("left", lam)

    cutoff = 1e-10 * _scale(G, GL)
    rank = int(np.linalg.matrix_rank(GL.reshape(la.dim, n * n), tol=cutoff)) if n else 0
    if rank < la.dim:
        raise NotFullLeft(rank, la.dim)
    rank = int(np.linalg.matrix_rank(G.reshape(ra.dim, n * n), tol=cutoff)) if n else 0
    if rank < ra.dim:
        raise NotFullRight(rank, ra.dim)

    # A<e_i, e_j>.e_k  vs  e_i.<e_j, e_k>_B
    lhs = np.einsum("lji,lak->ijka", GL, L)
    rhs = np.einsum("mjk,mai->ijka", G, R)
    diff = np.abs(lhs - rhs)
    if diff.size and diff.max() > bound:
        i, j, k, _ = np.unravel_index(int(np.argmax(diff)), diff.shape)
        raise CompatibilityFails(int(i), int(j), int(k), float(diff.max()))

    rng = np.random.default_rng(seed)
    probes = [(f"e{i}", v) for i, v in enumerate(np.eye(n))]
    probes += [(f"random{r}", rng.normal(size=n) + 1j * rng.normal(size=n)) for r in range(n_random)]
    for name, x in probes:
        left = la.norm_vec(z.linner(x, x))
        right = ra.norm_vec(z.inner(x, x))
        if abs(left - right) > tol.bound(max(left, right, 1.0)):
            raise NormMismatch(name, abs(left - right))

    fail = module_axiom_failure(z, tol)
    if fail is not None:
        raise ModuleAxiomFails(*fail)
    return z


@dataclass(frozen=True, eq=False)
class CompatibleAction:
    """``delta(g)`` on an A-B bimodule, compatible with Sigma on A and Theta on B."""

    left_system: TwistedSystem
    right_system: TwistedSystem
    bimodule: HilbertBimodule
    delta: np.ndarray

    def __post_init__(self):
        d = np.array(self.delta, dtype=complex)
        d.setflags(write=False)
        object.__setattr__(self, "delta", d)
        if self.left_system.group != self.right_system.group:
            raise SystemMismatch("both systems must be over the same group")
        if (self.bimodule.left_algebra != self.left_system.algebra
                or self.bimodule.right_algebra != self.right_system.algebra):
            raise SystemMismatch("bimodule algebras do not match the systems")
        N = self.bimodule.dim
        if d.shape != (self.left_system.order, N, N):
            raise ShapeMismatch(f"delta has shape {d.shape}, expected {(self.left_system.order, N, N)}")

    @property
    def group(self):
        return self.left_system.group


def bullet_residuals(action: CompatibleAction) -> dict:
    """Largest residual of each compatibility condition over the group (and pairs)."""
    sig, th, z = action.left_system, action.right_system, action.bimodule
    L, R, G, GL = z.left_action, z.right_action, z.right_inner, z.left_inner
    out = {"1": 0.0, "2": 0.0, "3": 0.0, "4": 0.0, "left": 0.0}
    where = {}

    def note(key, val, g, h=None):
        if val > out[key]:
            out[key] = val
            where[key] = (g, h)

    for g in action.group:
        d = action.delta[g]
        note("1", _worst(np.einsum("ab,kbc->kac", d, L) - np.einsum("lk,lab,bc->kac", sig.alpha_mats[g], L, d)), g)
        note("2", _worst(np.einsum("ab,kbc->kac", d, R) - np.einsum("lk,lab,bc->kac", th.alpha_mats[g], R, d)), g)
        note("4", _worst(np.einsum("ba,kbc,cd->kad", d.conj(), G, d) - np.einsum("kl,lab->kab", th.alpha_mats[g], G)), g)
        if GL is not None:
            note("left", _worst(np.einsum("ba,kbc,cd->kad", d.conj(), GL, d)
                                - np.einsum("kl,lab->kab", sig.alpha_mats[g], GL)), g)
    grp = action.group
    for g in grp:
        for h in grp:
            lhs = action.delta[g] @ action.delta[h]
            rhs = (z.left_op(sig.sigma_vecs[g, h]) @ z.right_op(th.algebra.adjoint_vec(th.sigma_vecs[g, h]))
                   @ action.delta[grp.mul(g, h)])
            note("3", _worst(lhs - rhs), g, h)
    return {"residuals": out, "where": where}


def left_bullet_residual(action: CompatibleAction) -> float:
    """``max_g |A<delta z, delta w> - alpha_g(A<z, w>)|`` on basis vectors."""
    return bullet_residuals(action)["residuals"]["left"]


def validate_compatible_action(sigma_sys: TwistedSystem, theta_sys: TwistedSystem,
                               z: HilbertBimodule, delta, tol: Tolerance = DEFAULT_TOL,
                               include_left: bool = True) -> CompatibleAction:
    action = CompatibleAction(sigma_sys, theta_sys, z, delta)
    for g in action.group:
        cond = np.linalg.cond(action.delta[g]) if z.dim else 1.0
        if not np.isfinite(cond) or cond > 1e12:
            raise BulletFails("invertible", g, witness=float(cond))
    info = bullet_residuals(action)
    bound = tol.bound(_scale(z.right_inner, z.left_inner, action.delta) ** 2)
    names = ["1", "2", "4", "3"] + (["left"] if include_left and z.left_inner is not None else [])
    for key in names:
        r = info["residuals"][key]
        if r > bound:
            g, h = info["where"][key]
            raise BulletFails(key, g, h, r)
    return action


def identity_action(system: TwistedSystem) -> CompatibleAction:
    """``alpha`` acting on A as an A-A bimodule."""
    return CompatibleAction(system, system, algebra_bimodule(system.algebra), np.array(system.alpha_mats))


def conjugate_bimodule(z: HilbertBimodule, action: CompatibleAction | None = None):
    """The B-A bimodule ``Z~`` on the same carrier (coordinates of ``z~`` are ``conj(z)``)."""
    la, ra = z.left_algebra, z.right_algebra
    zt = HilbertBimodule(
        ra, la,
        np.conj(z.right_action[ra.adjoint_index]),
        np.conj(z.left_action[la.adjoint_index]),
        z.left_inner.transpose(0, 2, 1),
        z.right_inner.transpose(0, 2, 1))
    if action is None:
        return zt, None
    return zt, CompatibleAction(action.right_system, action.left_system, zt, np.conj(action.delta))


def conjugate_action(action: CompatibleAction) -> CompatibleAction:
    return conjugate_bimodule(action.bimodule, action)[1]


def tensor_actions(act1: CompatibleAction, act2: CompatibleAction) -> tuple[CompatibleAction, QuotientWitness]:
    """``(delta (x) eta)(g)`` on the quotient of ``Z (x)_B W``."""
    if act1.bimodule.right_algebra != act2.bimodule.left_algebra or not same_system(
            act1.right_system, act2.left_system):
        raise MiddleMismatch("middle systems of the two actions differ")
    mod, wit = tensor_bimodules(act1.bimodule, act2.bimodule)
    delta = np.array([wit.operator(np.kron(act1.delta[g], act2.delta[g])) for g in act1.group])
    return CompatibleAction(act1.left_system, act2.right_system, mod, delta), wit


# -----------------------------------------------------------------------------
# induced representations
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InducedRep:
    """``Y = (Z~ (x)_A X) (x)_A Z`` with ``w = (delta~ (x) v) (x) delta``."""

    rep: EquivariantRep
    inner: QuotientWitness
    outer: QuotientWitness

    def vector(self, z, x, zp) -> np.ndarray:
        """Quotient coordinates of ``(z~ (x) x) (x) z'`` for ``z, z'`` in Z."""
        return self.outer.embed(self.inner.embed(np.conj(z), x), zp)


def rep_as_action(rep: EquivariantRep) -> CompatibleAction:
    return CompatibleAction(rep.system, rep.system, rep.module, rep.v)


def induced_rep(action: CompatibleAction, rep: EquivariantRep) -> InducedRep:
    if not same_system(rep.system, action.left_system):
        raise SystemMismatch("representation is not over the left system of the action")
    tilde = conjugate_action(action)
    mid, w1 = tensor_actions(tilde, rep_as_action(rep))
    full, w2 = tensor_actions(mid, action)
    out = EquivariantRep(action.right_system, full.bimodule, full.delta, f"ind({rep.label})")
    return InducedRep(out, w1, w2)


@dataclass(frozen=True, eq=False)
class RoundTrip:
    """``Z (x)_B (Y (x)_B Z~)`` as a representation of Sigma, with the embedding of X."""

    rep: EquivariantRep
    embedding: np.ndarray  # carrier of the round trip x dim X


def round_trip(action: CompatibleAction, rep: EquivariantRep, left_frame: "Frame") -> RoundTrip:
    """Induce to Theta and back; ``x -> sum_ij z_i (x) ((z~_i' (x) x) (x) z_j) (x) z~_j'``."""
    ind = induced_rep(action, rep)
    tilde = conjugate_action(action)
    y_act = CompatibleAction(ind.rep.system, ind.rep.system, ind.rep.module, ind.rep.v)
    right, w3 = tensor_actions(y_act, tilde)
    back, w4 = tensor_actions(action, right)
    cols = []
    for x in np.eye(rep.dim):
        acc = 0
        for zi, zpi in left_frame.pairs:
            for zj, zpj in left_frame.pairs:
                acc = acc + w4.embed(zi, w3.embed(ind.vector(zpi, x, zj), np.conj(zpj)))
        cols.append(acc)
    emb = np.array(cols).T if cols else np.zeros((back.bimodule.dim, 0))
    out = EquivariantRep(rep.system, back.bimodule, back.delta, f"roundtrip({rep.label})")
    return RoundTrip(out, emb)


# -----------------------------------------------------------------------------
# coefficient maps S and frames
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SCoefficient:
    """``S(g, a) = <z, a.(delta(g) zeta)>_B`` as per-g matrices (dim B x dim A)."""

    maps: np.ndarray
    bound: float


def s_coefficient(action: CompatibleAction, z, zeta) -> SCoefficient:
    mod = action.bimodule
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    if z.shape != (mod.dim,) or zeta.shape != (mod.dim,):
        raise ShapeMismatch(f"vectors must have length {mod.dim}")
    dz = np.einsum("gij,j->gi", action.delta, zeta)
    maps = np.einsum("i,mij,kjl,gl->gmk", np.conj(z), mod.right_inner, mod.left_action, dz)
    return SCoefficient(maps, mod.norm(z) * mod.norm(zeta))


def s_tilde(action: CompatibleAction, z, zeta, tilde: CompatibleAction | None = None) -> SCoefficient:
    """``S_{delta~, z~, zeta~}`` (B -> A) from vectors of Z."""
    tilde = conjugate_action(action) if tilde is None else tilde
    return s_coefficient(tilde, np.conj(z), np.conj(zeta))


@dataclass(frozen=True, eq=False)
class Frame:
    """Pairs ``(z_i, z_i')`` with ``sum_i <z_i, z_i'>_B = 1_B`` (or the left analogue)."""

    pairs: tuple
    K: float
    residual: float
    side: str = "right"


def _solve_frame(mod: HilbertBimodule, vectors, tensor, alg: CStarAlgebra, left: bool,
                 tol: float, prune: float) -> Frame:
    n = mod.dim
    vecs = np.eye(n) if vectors is None else np.array([np.asarray(v, dtype=complex) for v in vectors])
    m = len(vecs)
    if left:
        # sum_i A<z_i, z_i'>_k = sum_i z_i'^H GL_k z_i, solved for conj(z_i')
        coef = np.einsum("kab,ib->kia", tensor, vecs)
    else:
        coef = np.einsum("ia,kab->kib", np.conj(vecs), tensor)
    system = coef.reshape(alg.dim, m * n)
    sol, *_ = np.linalg.lstsq(system, alg.unit_vec, rcond=None)
    residual = float(np.linalg.norm(system @ sol - alg.unit_vec))
    if residual > tol:
        raise FrameSolveFailed(residual)
    sol = sol.reshape(m, n)
    if left:
        sol = np.conj(sol)
    pairs = []
    total = 0.0
    for zi, zp in zip(vecs, sol):
        nz = _module_norm(mod, zp, left)
        if nz < prune:
            continue
        pairs.append((zi.astype(complex), zp))
        total += _module_norm(mod, zi, left) * nz
    return Frame(tuple(pairs), float(total ** 2), residual, "left" if left else "right")


def _module_norm(mod: HilbertBimodule, x, left: bool) -> float:
    if left:
        return float(np.sqrt(mod.left_algebra.norm_vec(mod.linner(x, x))))
    return mod.norm(x)


def partition_of_unity(z: HilbertBimodule, vectors: Sequence | None = None, tol: float = 1e-9,
                       prune: float = 1e-12) -> Frame:
    """Minimum-norm least-squares solution of ``sum_i <z_i, z_i'>_B = 1_B``.

    ``vectors`` defaults to the carrier basis; ``K = (sum ||z_i|| ||z_i'||)^2``.
    """
    return _solve_frame(z, vectors, z.right_inner, z.right_algebra, False, tol, prune)


def left_partition_of_unity(z: HilbertBimodule, vectors: Sequence | None = None, tol: float = 1e-9,
                            prune: float = 1e-12) -> Frame:
    """Pairs with ``sum_i A<z_i, z_i'> = 1_A``."""
    return _solve_frame(z, vectors, z.left_inner, z.left_algebra, True, tol, prune)


# -----------------------------------------------------------------------------
# transfer
# -----------------------------------------------------------------------------

def _single(action, tilde, t_maps, z, zp, zeta, zetap) -> np.ndarray:
    s_out = s_coefficient(action, zp, zetap).maps
    s_in = s_coefficient(tilde, np.conj(z), np.conj(zeta)).maps
    return s_out @ t_maps @ s_in


def transfer(action: CompatibleAction, frame: Frame | None, t: CoeffMap, mode: str = "full",
             single: tuple | None = None) -> CoeffMap:
    """``F_{z, z', zeta, zeta'}(T) = S_{delta, z', zeta'} . T . S_{delta~, z~, zeta~}`` over Theta.

    ``mode="single"`` takes ``single=(z, z', zeta, zeta')``; ``mode="full"``
    sums ``F_{z_i, z_i', z_j, z_j'}`` over all pairs of the frame.
    """
    if not same_system(t.system, action.left_system):
        raise SystemMismatch("coefficient map is not over the left system")
    tilde = conjugate_action(action)
    if mode == "single":
        if single is None or len(single) != 4:
            raise ShapeMismatch("single mode needs (z, z', zeta, zeta')")
        maps = _single(action, tilde, t.maps, *single)
    elif mode == "full":
        if frame is None:
            raise ShapeMismatch("full mode needs a frame")
        d = action.right_system.algebra.dim
        maps = np.zeros((action.group.order, d, d), dtype=complex)
        for zi, zpi in frame.pairs:
            for zj, zpj in frame.pairs:
                maps = maps + _single(action, tilde, t.maps, zi, zpi, zj, zpj)
    else:
        raise ShapeMismatch(f"unknown transfer mode {mode!r}")
    return CoeffMap(action.right_system, maps)


@dataclass(frozen=True, eq=False)
class Reconstruction:
    family: dict  # (i, j, k, l) -> CoeffMap over Sigma
    residual: float


def span_reconstruct(action: CompatibleAction, frame: Frame, t: CoeffMap, tol: float = 1e-8) -> Reconstruction:
    """Split ``T'`` over Theta into ``T'_ijkl = S_{delta~, z~_i, z~_j} T' S_{delta, z_k', z_l'}``
    over Sigma and check that ``sum F_{z_k, z_i', z_l, z_j'}(T'_ijkl) = T'``."""
    if not same_system(t.system, action.right_system):
        raise SystemMismatch("coefficient map is not over the right system")
    tilde = conjugate_action(action)
    pairs = frame.pairs
    n = len(pairs)
    family = {}
    total = np.zeros_like(t.maps)
    for i in range(n):
        for j in range(n):
            left = s_coefficient(tilde, np.conj(pairs[i][0]), np.conj(pairs[j][0])).maps
            for k in range(n):
                for l in range(n):
                    right = s_coefficient(action, pairs[k][1], pairs[l][1]).maps
                    piece = CoeffMap(action.left_system, left @ t.maps @ right)
                    family[(i, j, k, l)] = piece
                    total = total + _single(action, tilde, piece.maps, pairs[k][0], pairs[i][1],
                                            pairs[l][0], pairs[j][1])
    residual = float(np.max(np.abs(total - t.maps))) if total.size else 0.0
    if residual > tol:
        raise ReconstructionResidual(residual)
    return Reconstruction(family, residual)


# -----------------------------------------------------------------------------
# equivariant isomorphisms
# -----------------------------------------------------------------------------

def equivariant_iso_residual(act1: CompatibleAction, act2: CompatibleAction, u: np.ndarray,
                             seed: int = 0, probes: int = 4) -> float:
    """How far ``u`` is from an isomorphism of the two actions.

    Compares both actions, both inner products, the group actions and the
    S-coefficients at random vectors ``(p, q)`` and ``(u p, u q)``.
    """
    m1, m2 = act1.bimodule, act2.bimodule
    if u.shape != (m2.dim, m1.dim):
        return float("inf")
    res = [_worst(np.einsum("ab,kbc->kac", u, m1.left_action) - np.einsum("kab,bc->kac", m2.left_action, u)),
           _worst(np.einsum("ab,kbc->kac", u, m1.right_action) - np.einsum("kab,bc->kac", m2.right_action, u)),
           _worst(np.einsum("ba,kbc,cd->kad", u.conj(), m2.right_inner, u) - m1.right_inner),
           _worst(np.array([u @ act1.delta[g] - act2.delta[g] @ u for g in act1.group]))]
    if m1.left_inner is not None and m2.left_inner is not None:
        res.append(_worst(np.einsum("ba,kbc,cd->kad", u.conj(), m2.left_inner, u) - m1.left_inner))
    if m1.dim:
        sv = np.linalg.svd(u, compute_uv=False)
        res.append(0.0 if m1.dim == m2.dim and sv[-1] > 1e-8 else float("inf"))
    rng = np.random.default_rng(seed)
    for _ in range(probes):
        p = rng.normal(size=m1.dim) + 1j * rng.normal(size=m1.dim)
        q = rng.normal(size=m1.dim) + 1j * rng.normal(size=m1.dim)
        res.append(_worst(s_coefficient(act1, p, q).maps - s_coefficient(act2, u @ p, u @ q).maps))
    return max(res)


def _on_quotient(u_alg: np.ndarray, wit: QuotientWitness) -> np.ndarray:
    return u_alg @ wit.basis_map.conj().T


def iso_to_left_algebra(action: CompatibleAction) -> tuple[float, dict]:
    """``delta (x)_B delta~ ~ alpha`` via ``z (x) w~ -> A<z, w>``."""
    prod, wit = tensor_actions(action, conjugate_action(action))
    gl = action.bimodule.left_inner  # A<e_i, e_j>_k = GL_k[j, i]
    u_alg = gl.transpose(0, 2, 1).reshape(gl.shape[0], -1)
    u = _on_quotient(u_alg, wit)
    target = identity_action(action.left_system)
    return equivariant_iso_residual(prod, target, u), {"quotient_dim": wit.gram_rank,
                                                        "algebra_dim": action.left_system.algebra.dim}


def iso_to_right_algebra(action: CompatibleAction) -> tuple[float, dict]:
    """``delta~ (x)_A delta ~ beta`` via ``z~ (x) w -> <z, w>_B``."""
    prod, wit = tensor_actions(conjugate_action(action), action)
    g = action.bimodule.right_inner
    u_alg = g.reshape(g.shape[0], -1)
    u = _on_quotient(u_alg, wit)
    target = identity_action(action.right_system)
    return equivariant_iso_residual(prod, target, u), {"quotient_dim": wit.gram_rank,
                                                        "algebra_dim": action.right_system.algebra.dim}


def iso_unit_law(action: CompatibleAction) -> tuple[float, dict]:
    """``delta (x)_B beta ~ delta`` via ``z (x) b -> z.b``."""
    prod, wit = tensor_actions(action, identity_action(action.right_system))
    r = action.bimodule.right_action  # (dim B, N, N)
    u_alg = r.transpose(1, 2, 0).reshape(action.bimodule.dim, -1)  # column (i, k) = R_k e_i
    u = _on_quotient(u_alg, wit)
    return equivariant_iso_residual(prod, action, u), {"quotient_dim": wit.gram_rank,
                                                        "carrier_dim": action.bimodule.dim}


# -----------------------------------------------------------------------------
# commutative case
# -----------------------------------------------------------------------------

def commutative_conjugacy(action: CompatibleAction, tol: float = 1e-10) -> tuple[Isomorphism, TransportReport]:
    """Solve ``phi(A<z, z'>) = <z', z>_B`` for commutative A and B and verify phi."""
    z = action.bimodule
    la, ra = z.left_algebra, z.right_algebra
    if not (la.is_commutative and ra.is_commutative):
        raise NotCommutative("both algebras must be commutative")
    n = z.dim
    eye = np.eye(n)
    vl = np.array([[z.linner(eye[i], eye[j]) for j in range(n)] for i in range(n)]).reshape(n * n, la.dim).T
    vr = np.array([[z.inner(eye[j], eye[i]) for j in range(n)] for i in range(n)]).reshape(n * n, ra.dim).T
    phi = vr @ np.linalg.pinv(vl)
    report = TransportReport("commutative", {"dim_A": la.dim, "dim_B": ra.dim})
    r = _worst(phi @ vl - vr)
    if r > tol * _scale(vr):
        raise PhiInconsistent(r)
    report.checks_passed.append(("phi-solve", r))

    # *-isomorphism of C^m: unital, multiplicative, involutive, bijective
    mult = max(_worst(phi @ (eye_a * eye_b) - (phi @ eye_a) * (phi @ eye_b))
               for eye_a in np.eye(la.dim) for eye_b in np.eye(la.dim))
    checks = {"unital": _worst(phi @ la.unit_vec - ra.unit_vec),
              "multiplicative": mult,
              "involutive": _worst(np.conj(phi) - phi),
              "bijective": 0.0 if la.dim == ra.dim and np.linalg.matrix_rank(phi) == la.dim else np.inf}
    checks["intertwining"] = max(_worst(phi @ action.left_system.alpha_mats[g]
                                        - action.right_system.alpha_mats[g] @ phi) for g in action.group)
    # a.z = z.phi(a) for basis a
    checks["module"] = max(_worst(z.left_action[k] - z.right_op(phi[:, k])) for k in range(la.dim))
    for name, val in checks.items():
        if val > tol:
            report.failures.append((name, val))
        else:
            report.checks_passed.append((name, val))
    if report.failures:
        name, val = report.failures[0]
        raise PhiInconsistent(val)
    perm = [int(np.argmax(np.abs(phi[:, b]))) for b in range(la.dim)]
    iso = Isomorphism.block_permutation(la, perm, ra)
    # transported cocycle system; equals Theta exactly when the twists match
    transported = group_transport(action.left_system, iso, list(action.group))
    twist_gap = float(np.max(np.abs(transported.sigma_vecs - action.right_system.sigma_vecs)))
    report.inputs["transported_twist_gap"] = twist_gap
    if twist_gap <= tol:
        certify_group_conjugacy(action.left_system, action.right_system, iso, list(action.group))
        report.checks_passed.append(("group-conjugacy", twist_gap))
    return iso, report


# -----------------------------------------------------------------------------
# worked examples
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MoritaData:
    action: CompatibleAction
    frame: Frame

    @property
    def sigma(self) -> TwistedSystem:
        return self.action.left_system

    @property
    def theta(self) -> TwistedSystem:
        return self.action.right_system

    @property
    def bimodule(self) -> HilbertBimodule:
        return self.action.bimodule


def row_bimodule(m: int = 2) -> HilbertBimodule:
    """``C^{1 x m}`` as a C-M_m bimodule with ``A<z, z'> = z z'^*`` and ``<z, z'>_B = z^* z'``."""
    a, b = CStarAlgebra((1,)), CStarAlgebra((m,))
    return bimodule_from_functions(
        a, b, m,
        left_act=lambda el, x: el.blocks[0][0, 0] * x,
        right_act=lambda x, el: x @ el.blocks[0],
        right_inner=lambda x, y: b.element([np.outer(np.conj(x), y)]),
        left_inner=lambda x, y: a.element([[[x @ np.conj(y)]]]))


def mor_pair(group=None, delta_sign: int = 1) -> MoritaData:
    """``(C, G, triv, 1)`` and ``(M_2, G, triv, 1)`` linked by the row bimodule, delta = +-id."""
    group = cyclic_group(2) if group is None else group
    z = row_bimodule(2)
    sigma = untwisted(z.left_algebra, group)
    theta = untwisted(z.right_algebra, group)
    delta = np.array([np.eye(2) if g == group.identity else delta_sign * np.eye(2) for g in group])
    action = validate_compatible_action(sigma, theta, validate_bimodule(z), delta)
    return MoritaData(action, partition_of_unity(z))


def identity_equivalence(system: TwistedSystem) -> MoritaData:
    """A as an A-A bimodule with ``delta = alpha``; frame ``(1_A, 1_A)``."""
    action = identity_action(system)
    frame = partition_of_unity(action.bimodule, [system.algebra.unit_vec])
    return MoritaData(action, frame)


def amplified_pair(system: TwistedSystem, m: int) -> MoritaData:
    """Sigma and ``(M_m(A), id (x) alpha, 1 (x) sigma)`` linked by rows ``A^{1 x m}``."""
    A = system.algebra
    B = CStarAlgebra(tuple(m * n for n in A.block_dims))
    shapes = [(n, m * n) for n in A.block_dims]
    sizes = [r * c for r, c in shapes]
    offs = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    dim = int(offs[-1])

    def split(x):
        return [np.asarray(x[offs[b]:offs[b + 1]]).reshape(shapes[b]) for b in range(A.n_blocks)]

    def join(blocks):
        return np.concatenate([np.asarray(blk, dtype=complex).reshape(-1) for blk in blocks])

    def amp(u):
        return B.element([np.kron(np.eye(m), blk) for blk in u.blocks])

    z = bimodule_from_functions(
        A, B, dim,
        left_act=lambda a, x: join([ab @ xb for ab, xb in zip(a.blocks, split(x))]),
        right_act=lambda x, b: join([xb @ bb for xb, bb in zip(split(x), b.blocks)]),
        right_inner=lambda x, y: B.element([xb.conj().T @ yb for xb, yb in zip(split(x), split(y))]),
        left_inner=lambda x, y: A.element([xb @ yb.conj().T for xb, yb in zip(split(x), split(y))]))

    beta = [Isomorphism(B, B, al.perm, amp(al.unitary)) for al in system.alpha]
    theta_tab = [[amp(s) for s in row] for row in system.sigma]
    theta = validate_system(TwistedSystem(B, system.group, beta, theta_tab))

    def delta_g(g, x):
        al = system.alpha[g]
        blocks = [None] * A.n_blocks
        for b, xb in enumerate(split(x)):
            p = al.perm[b]
            u = al.unitary.blocks[p]
            blocks[p] = u @ xb @ np.kron(np.eye(m), u).conj().T
        return join(blocks)

    eye = np.eye(dim)
    delta = np.array([np.array([delta_g(g, eye[j]) for j in range(dim)]).T for g in system.group])
    action = validate_compatible_action(system, theta, validate_bimodule(z), delta)
    return MoritaData(action, partition_of_unity(z))


def swap_pair() -> MoritaData:
    """``C^2`` over ``C^2`` with the right action through the coordinate swap; both
    systems carry the swap action of Z2, and delta(s) swaps coordinates."""
    A = CStarAlgebra((1, 1))
    sw = [1, 0]
    z = bimodule_from_functions(
        A, A, 2,
        left_act=lambda a, x: a.vec * x,
        right_act=lambda x, b: b.vec[sw] * x,
        right_inner=lambda x, y: (np.conj(x) * y)[sw],
        left_inner=lambda x, y: x * np.conj(y))
    grp = cyclic_group(2)
    swap = Isomorphism.block_permutation(A, sw)
    alpha = [Isomorphism.identity(A), swap]
    sigma = validate_system(untwisted(A, grp, alpha))
    theta = validate_system(untwisted(A, grp, alpha))
    delta = np.array([np.eye(2), np.eye(2)[sw]])
    action = validate_compatible_action(sigma, theta, validate_bimodule(z), delta)
    return MoritaData(action, partition_of_unity(z))


def coordinate_pair() -> MoritaData:
    """``C^2`` over itself coordinatewise with trivial actions and delta = id."""
    A = CStarAlgebra((1, 1))
    z = bimodule_from_functions(
        A, A, 2,
        left_act=lambda a, x: a.vec * x,
        right_act=lambda x, b: b.vec * x,
        right_inner=lambda x, y: np.conj(x) * y,
        left_inner=lambda x, y: x * np.conj(y))
    grp = cyclic_group(2)
    sigma = untwisted(A, grp)
    action = validate_compatible_action(sigma, sigma, validate_bimodule(z), np.array([np.eye(2)] * 2))
    return MoritaData(action, partition_of_unity(z))


def transferred_coefficient_check(data: MoritaData, rep: EquivariantRep, x, xp, z, zp, zeta, zetap,
                                  induced: InducedRep | None = None) -> float:
    """Gap between single-mode transfer of ``T_{rho, v, x, x'}`` and the induced coefficient."""
    t = coefficient_map(rep, x, xp)
    ft = transfer(data.action, None, t, "single", (z, zp, zeta, zetap))
    ind = induced_rep(data.action, rep) if induced is None else induced
    direct = coefficient_map(ind.rep, ind.vector(z, x, zp), ind.vector(zeta, xp, zetap))
    return float(np.max(np.abs(ft.maps - direct.maps)))


def identity_transfer_residual(data: MoritaData) -> float:
    """``|sum_ij F_{z_i, z_i', z_j, z_j'}(I_Sigma) - I_Theta|``."""
    out = transfer(data.action, data.frame, identity_map(data.sigma), "full")
    return out.distance(identity_map(data.theta))
