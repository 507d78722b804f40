"""Coefficient maps ``G x A -> A`` (the algebra L(Sigma)), positive definiteness and norms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import AlgElement, CStarAlgebra, hermitian_min_eig
from .errors import InputError, PDDisagreement, ShapeMismatch, SystemMismatch
from .modules import EquivariantRep, trivial_rep
from .system import TwistedSystem


@dataclass(frozen=True, eq=False)
class Provenance:
    """``T = T_{rho, v, x, y}``; ``bound`` is the decomposition bound ``||x|| ||y||``."""

    rep: EquivariantRep
    x: np.ndarray
    y: np.ndarray
    bound: float


@dataclass(frozen=True, eq=False)
class CoeffMap:
    """One linear map ``T_g: A -> A`` per group element, stored as ``maps[g]`` (dim x dim)."""

    system: TwistedSystem
    maps: np.ndarray
    provenance: Provenance | None = None

    def __post_init__(self):
        m = np.array(self.maps, dtype=complex)
        d, n = self.system.algebra.dim, self.system.order
        if m.shape != (n, d, d):
            raise ShapeMismatch(f"coefficient map has shape {m.shape}, expected {(n, d, d)}")
        m.setflags(write=False)
        object.__setattr__(self, "maps", m)

    @property
    def algebra(self) -> CStarAlgebra:
        return self.system.algebra

    def __call__(self, g: int, a: AlgElement) -> AlgElement:
        return self.algebra.from_vec(self.maps[g] @ a.vec)

    def support(self) -> list:
        return [g for g in self.system.group if np.any(self.maps[g] != 0)]

    def _same(self, other: "CoeffMap"):
        if not isinstance(other, CoeffMap) or not same_system(self.system, other.system):
            raise SystemMismatch("coefficient maps live over different systems")

    def __add__(self, other):
        self._same(other)
        return CoeffMap(self.system, self.maps + other.maps)

    def __sub__(self, other):
        self._same(other)
        return CoeffMap(self.system, self.maps - other.maps)

    def __mul__(self, lam):
        return CoeffMap(self.system, lam * self.maps)

    __rmul__ = __mul__

    def __neg__(self):
        return CoeffMap(self.system, -self.maps)

    def compose(self, other: "CoeffMap") -> "CoeffMap":
        """``(T . T')(g, a) = T(g, T'(g, a))``."""
        self._same(other)
        return CoeffMap(self.system, self.maps @ other.maps)

    def distance(self, other: "CoeffMap") -> float:
        """Largest entrywise difference of the per-g matrices."""
        self._same(other)
        return float(np.max(np.abs(self.maps - other.maps))) if self.maps.size else 0.0


def same_system(s1: TwistedSystem, s2: TwistedSystem, atol: float = 1e-12) -> bool:
    if s1 is s2:
        return True
    if s1.algebra != s2.algebra or s1.group != s2.group:
        return False
    return (np.allclose(s1.alpha_mats, s2.alpha_mats, atol=atol, rtol=0)
            and np.allclose(s1.sigma_vecs, s2.sigma_vecs, atol=atol, rtol=0))


def coefficient_map(rep: EquivariantRep, x, y) -> CoeffMap:
    """``T(g, a) = <x, rho(a) v(g) y>``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != (rep.dim,) or y.shape != (rep.dim,):
        raise ShapeMismatch(f"vectors must have length {rep.dim}")
    mod = rep.module
    vy = np.einsum("gij,j->gi", rep.v, y)
    maps = np.einsum("i,lij,kjm,gm->glk", np.conj(x), mod.right_inner, mod.left_action, vy)
    bound = mod.norm(x) * mod.norm(y)
    return CoeffMap(rep.system, maps, Provenance(rep, x, y, bound))


def coeff_from_function(system: TwistedSystem, fn: Callable[[int, AlgElement], AlgElement]) -> CoeffMap:
    basis = system.algebra.basis()
    maps = [np.array([fn(g, e).vec for e in basis]).T for g in system.group]
    return CoeffMap(system, maps)


def identity_map(system: TwistedSystem) -> CoeffMap:
    """``I_Sigma(g, a) = a``."""
    d = system.algebra.dim
    return CoeffMap(system, np.broadcast_to(np.eye(d), (system.order, d, d)))


def zero_map(system: TwistedSystem) -> CoeffMap:
    d = system.algebra.dim
    return CoeffMap(system, np.zeros((system.order, d, d)))


def lsigma_arith(t: CoeffMap, t2: CoeffMap | None = None, kind: str = "compose",
                 lam: complex = 1.0) -> CoeffMap:
    """``kind`` in {add, scale, compose, identity}."""
    if kind == "add":
        return t + t2
    if kind == "scale":
        return lam * t
    if kind == "compose":
        return t.compose(t2)
    if kind == "identity":
        return identity_map(t.system)
    raise ValueError(f"unknown operation {kind!r}")


def embed_group_function(system: TwistedSystem, f: Sequence[complex]) -> CoeffMap:
    """``T^f(g, a) = f(g) a``."""
    f = np.asarray(f, dtype=complex)
    if f.shape != (system.order,):
        raise ShapeMismatch("group function needs one value per group element")
    d = system.algebra.dim
    return CoeffMap(system, f[:, None, None] * np.eye(d)[None])


def embed_algebra_element(system: TwistedSystem, b: AlgElement) -> CoeffMap:
    """``T^b(g, a) = b a``, recorded as the coefficient of ``(b*, 1_A)`` in the trivial representation."""
    if b.algebra != system.algebra:
        raise ShapeMismatch("element is not in the system's algebra")
    t = coefficient_map(trivial_rep(system), b.H.vec, system.algebra.unit_vec)
    # numerically identical to lmul(b) for every g; store the exact form
    exact = np.broadcast_to(system.algebra.lmul(b.vec), t.maps.shape)
    return CoeffMap(system, exact, t.provenance)


# -----------------------------------------------------------------------------
# positive definiteness
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class PDVerdict:
    verdict: str  # "positiveDefinite" | "notPD"
    min_eigenvalue: float
    certificate: tuple | None = None
    method: str = "choi"
    reason: str = ""
    block: tuple | None = None

    @property
    def positive(self) -> bool:
        return self.verdict == "positiveDefinite"

    def __bool__(self):
        return self.positive


def schur_family(system: TwistedSystem, t: CoeffMap) -> np.ndarray:
    """``Phi[g, h]`` = matrix of ``a -> alpha_g(T_{g^-1 h}(alpha_g^-1(a s*))) s`` with ``s = sigma(g, g^-1 h)``."""
    alg, grp = system.algebra, system.group
    n, d = grp.order, alg.dim
    phi = np.empty((n, n, d, d), dtype=complex)
    for g in grp:
        gi = grp.inv(g)
        for h in grp:
            k = grp.mul(gi, h)
            s = system.sigma_vecs[g, k]
            phi[g, h] = (alg.rmul(s) @ system.alpha_mats[g] @ t.maps[k]
                         @ system.alpha_inv_mats[g] @ alg.rmul(alg.adjoint_vec(s)))
    return phi


def choi_blocks(system: TwistedSystem, t: CoeffMap) -> dict:
    """Compressed Choi matrices of the Schur-type map, keyed by (input block, output block).

    Entry ``[(g, p, r), (h, q, s)]`` is ``Phi_{g,h}(e^beta_{pq})`` at position ``(r, s)`` of block gamma.
    """
    alg = system.algebra
    n = system.order
    phi = schur_family(system, t)
    out = {}
    for beta, nb in enumerate(alg.block_dims):
        src = phi[:, :, :, alg.block_slice(beta)].reshape(n, n, alg.dim, nb, nb)
        for gamma, nc in enumerate(alg.block_dims):
            blk = src[:, :, alg.block_slice(gamma)].reshape(n, n, nc, nc, nb, nb)  # g h r s p q
            c = blk.transpose(0, 4, 2, 1, 5, 3).reshape(n * nb * nc, n * nb * nc)
            out[(beta, gamma)] = c
    return out


def pd_matrix(system: TwistedSystem, t: CoeffMap, gs: Sequence[int], as_: Sequence[AlgElement]) -> list:
    """The matrix ``[alpha_gi(T_{gi^-1 gj}(alpha_gi^-1(ai* aj s*))) s]`` over A, ``s = sigma(gi, gi^-1 gj)``.

    Evaluated directly with element arithmetic and the automorphism objects,
    independently of :func:`choi_blocks`.
    """
    grp = system.group
    rows = []
    for gi, ai in zip(gs, as_):
        inv = system.alpha[gi].inverse()
        row = []
        for gj, aj in zip(gs, as_):
            k = grp.mul(grp.inv(gi), gj)
            s = system.sigma[gi][k]
            row.append(system.alpha[gi](t(k, inv(ai.H @ aj @ s.H))) @ s)
        rows.append(row)
    return rows


def matrix_over_algebra_min_eig(rows: list, alg: CStarAlgebra) -> tuple[float, float, float]:
    """``(lambda_min of Hermitian part, skew norm, norm)`` of an element of ``M_n(A)``, minimized over blocks."""
    n = len(rows)
    lam, skew, scale = np.inf, 0.0, 0.0
    for b, nb in enumerate(alg.block_dims):
        m = np.zeros((n * nb, n * nb), dtype=complex)
        for i in range(n):
            for j in range(n):
                m[i * nb:(i + 1) * nb, j * nb:(j + 1) * nb] = rows[i][j].blocks[b]
        lb, sb = hermitian_min_eig(m)
        lam, skew = min(lam, lb), max(skew, sb)
        scale = max(scale, float(np.linalg.norm(m, 2)) if m.size else 0.0)
    return float(lam), float(skew), float(scale)


def _canonical_certificate(system: TwistedSystem, beta: int) -> tuple:
    alg = system.algebra
    return tuple((g, alg.matrix_unit(beta, 0, p)) for g in system.group
                 for p in range(alg.block_dims[beta]))


def pd_check(system: TwistedSystem, t: CoeffMap, tol: float = 1e-8) -> PDVerdict:
    """Decide positive definiteness via complete positivity of the Schur-type map.

    A failing Choi block (beta, gamma) is turned into the explicit tuple
    ``(g, e^beta_{0p})`` over all g and p; its matrix over A has exactly the
    Choi block as its gamma-component, so the certificate is re-evaluated with
    :func:`pd_matrix` and any disagreement raises :class:`PDDisagreement`.
    """
    if not same_system(system, t.system):
        raise SystemMismatch("coefficient map is over a different system")
    blocks = choi_blocks(system, t)
    scale = max((float(np.linalg.norm(c, 2)) for c in blocks.values() if c.size), default=0.0)
    bound = tol * scale
    worst_key, worst_lam, worst_skew = None, np.inf, 0.0
    for key, c in blocks.items():
        lam, skew = hermitian_min_eig(c)
        if skew > bound:
            lam_eff = min(lam, -skew)
        else:
            lam_eff = lam
        if lam_eff < worst_lam:
            worst_key, worst_lam, worst_skew = key, lam_eff, skew
    if worst_key is None or worst_lam >= -bound:
        return PDVerdict("positiveDefinite", float(worst_lam if worst_key else 0.0), method="choi")
    reason = "notSelfAdjoint" if worst_skew > bound else "negativeEigenvalue"
    cert = _canonical_certificate(system, worst_key[0])
    rows = pd_matrix(system, t, [g for g, _ in cert], [a for _, a in cert])
    lam, skew, _ = matrix_over_algebra_min_eig(rows, system.algebra)
    direct = min(lam, -skew) if skew > bound else lam
    if direct >= -bound:
        raise PDDisagreement(f"Choi block {worst_key} has eigenvalue {worst_lam:.3e} but the "
                             f"certificate matrix has min eigenvalue {direct:.3e}")
    return PDVerdict("notPD", float(worst_lam), cert, "choi", reason, worst_key)


def random_element(alg: CStarAlgebra, rng: np.random.Generator) -> AlgElement:
    return alg.element([rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for n in alg.block_dims])


def pd_check_sampled(system: TwistedSystem, t: CoeffMap, samples: int = 200, seed: int = 0,
                     tol: float = 1e-8) -> PDVerdict:
    """Instantiate the matrix condition on random tuples ``(g_i, a_i)``.

    The first trial enumerates every group element once; later trials mix
    enumerations with random repeated elements.
    """
    if samples < 1:
        raise InputError("samples must be at least 1")
    if not same_system(system, t.system):
        raise SystemMismatch("coefficient map is over a different system")
    rng = np.random.default_rng(seed)
    grp, alg = system.group, system.algebra
    worst = np.inf
    for trial in range(samples):
        if trial == 0:
            gs = list(grp)
            as_ = [alg.unit() for _ in gs]
        else:
            extra = int(rng.integers(0, grp.order + 1))
            gs = (list(grp) if trial % 2 else []) + [int(g) for g in rng.integers(0, grp.order, size=extra + 1)]
            as_ = [random_element(alg, rng) for _ in gs]
        rows = pd_matrix(system, t, gs, as_)
        lam, skew, scale = matrix_over_algebra_min_eig(rows, alg)
        bound = tol * max(scale, 1e-300)
        if skew > bound:
            return PDVerdict("notPD", min(lam, -skew), tuple(zip(gs, as_)), "sampled", "notSelfAdjoint")
        if lam < -bound:
            return PDVerdict("notPD", lam, tuple(zip(gs, as_)), "sampled", "negativeEigenvalue")
        worst = min(worst, lam)
    return PDVerdict("positiveDefinite", float(worst), method="sampled")


def confirm_certificate(system: TwistedSystem, t: CoeffMap, verdict: PDVerdict) -> float:
    """Re-evaluate a notPD certificate directly; returns its minimum eigenvalue."""
    if verdict.certificate is None:
        raise InputError("verdict carries no certificate")
    rows = pd_matrix(system, t, [g for g, _ in verdict.certificate], [a for _, a in verdict.certificate])
    lam, skew, _ = matrix_over_algebra_min_eig(rows, system.algebra)
    return min(lam, -skew) if verdict.reason == "notSelfAdjoint" else lam


# -----------------------------------------------------------------------------
# norms
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class SupNorm:
    lower: float
    upper: float
    exact: float | None = None


def _polar(alg: CStarAlgebra, f_vec) -> np.ndarray:
    blocks = []
    for m in alg.split(f_vec):
        u, _, vh = np.linalg.svd(m)
        blocks.append(u @ vh)
    return alg.join(blocks)


def _output_norm_and_functional(alg: CStarAlgebra, tg: np.ndarray, a: np.ndarray):
    y = tg @ a
    best, func = -1.0, None
    for b, m in enumerate(alg.split(y)):
        u, s, vh = np.linalg.svd(m)
        if s[0] > best:
            # functional c_k = u^H (T_g e_k)_b v for the top singular pair
            cols = tg[alg.block_slice(b)].reshape(m.shape[0], m.shape[1], alg.dim)
            func = np.einsum("i,ijk,j->k", u[:, 0].conj(), cols, vh[0].conj())
            best = float(s[0])
    return best, func


def _max_over_unit_ball(alg: CStarAlgebra, tg: np.ndarray, starts, iters: int = 60) -> float:
    best = 0.0
    for a in starts:
        val = 0.0
        for _ in range(iters):
            new, func = _output_norm_and_functional(alg, tg, a)
            if new <= val + 1e-13:
                val = max(val, new)
                break
            val = new
            a = _polar(alg, np.conj(func))
        best = max(best, val)
    return best


def sup_norm(t: CoeffMap, tol: float = 1e-8, seed: int = 0, restarts: int = 4) -> SupNorm:
    """``sup_g ||T_g||`` for the C*-norm on A.

    Exact for positive-definite T (``||T_e(1_A)||``). Otherwise a lower bound
    from alternating maximization over unitaries and an upper bound from the
    coordinate singular values (or the decomposition bound, when known).
    """
    system, alg = t.system, t.algebra
    if not np.any(t.maps):
        return SupNorm(0.0, 0.0, 0.0)
    if pd_check(system, t, tol).positive:
        e = system.group.identity
        val = alg.norm_vec(t.maps[e] @ alg.unit_vec)
        return SupNorm(float(val), float(val), float(val))
    rng = np.random.default_rng(seed)
    starts = [alg.unit_vec]
    for _ in range(restarts):
        starts.append(_polar(alg, random_element(alg, rng).vec))
    lower = max(_max_over_unit_ball(alg, t.maps[g], starts) for g in system.group)
    upper = max(np.sqrt(alg.dim) * float(np.linalg.norm(t.maps[g], 2)) for g in system.group)
    if t.provenance is not None:
        upper = min(upper, t.provenance.bound)
    return SupNorm(float(min(lower, upper)), float(upper), None)


def exact_pd_norm(t: CoeffMap) -> float:
    """``||T_e(1_A)||``; equals the sup-norm when T is positive definite."""
    alg = t.algebra
    return alg.norm_vec(t.maps[t.system.group.identity] @ alg.unit_vec)
