"""Seeded random instances: systems, unitary maps, representations and mutations.

Size caps are configuration, not mathematics: ``MAX_ORDER`` bounds |G| and
``MAX_DIM`` bounds dim A for generated systems.
"""
from __future__ import annotations

import numpy as np

from .algebra import (CStarAlgebra, FiniteGroup, cyclic_group, klein_group, symmetric_group)
from .modules import (EquivariantRep, amplify_rep, direct_sum_reps, internal_tensor_reps,
                      regular_rep, trivial_rep)
from .system import (Isomorphism, TwistedSystem, UnitaryMap, perturb_unitary, untwisted,
                     validate_system)

MAX_ORDER = 6
MAX_DIM = 5

BLOCK_SHAPES = [(1,), (2,), (1, 1), (1, 1, 1), (2, 1), (1, 1, 1, 1), (1, 2), (1, 1, 1, 1, 1)]


def group_zoo() -> list:
    return [cyclic_group(n) for n in range(2, MAX_ORDER + 1)] + [klein_group(), symmetric_group(3)]


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed via QR with the phase correction."""
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_algebra_unitary(alg: CStarAlgebra, rng: np.random.Generator):
    return alg.element([random_unitary(n, rng) for n in alg.block_dims])


def z2_characters(group: FiniteGroup) -> list:
    """All nontrivial homomorphisms ``G -> Z2`` (brute force over subsets)."""
    n = group.order
    out = []
    for mask in range(1, 2 ** n):
        chi = [(mask >> g) & 1 for g in range(n)]
        if chi[group.identity]:
            continue
        if all(chi[group.mul(g, h)] == (chi[g] ^ chi[h]) for g in group for h in group):
            out.append(chi)
    return out


def _swap_action(alg: CStarAlgebra, group: FiniteGroup, rng: np.random.Generator):
    """Swap two equal blocks along a Z2 character, if both exist."""
    dims = alg.block_dims
    pairs = [(a, b) for a in range(len(dims)) for b in range(a + 1, len(dims)) if dims[a] == dims[b]]
    chars = z2_characters(group)
    if not pairs or not chars:
        return None
    a, b = pairs[int(rng.integers(len(pairs)))]
    chi = chars[int(rng.integers(len(chars)))]
    perm = list(range(len(dims)))
    perm[a], perm[b] = b, a
    ident = Isomorphism.identity(alg)
    swap = Isomorphism.block_permutation(alg, perm)
    return [swap if chi[g] else ident for g in group]


def _scalar_cocycle_table(group: FiniteGroup, rng: np.random.Generator) -> np.ndarray:
    """A coboundary ``l(g) l(h) / l(gh)`` or, on the Klein group, ``(-1)^(bc)``."""
    n = group.order
    if group == klein_group() and rng.random() < 0.5:
        return np.array([[(-1.0) ** ((g % 2) * (h // 2)) for h in range(n)] for g in range(n)], dtype=complex)
    lam = np.exp(2j * np.pi * rng.random(n))
    lam[group.identity] = 1.0
    return np.array([[lam[g] * lam[h] / lam[group.mul(g, h)] for h in range(n)] for g in range(n)])


def random_system(rng: np.random.Generator, min_order: int = 2, perturb: bool = True) -> TwistedSystem:
    groups = [g for g in group_zoo() if g.order >= min_order]
    group = groups[int(rng.integers(len(groups)))]
    shapes = [s for s in BLOCK_SHAPES if sum(n * n for n in s) <= MAX_DIM]
    alg = CStarAlgebra(shapes[int(rng.integers(len(shapes)))])
    alpha = _swap_action(alg, group, rng) if rng.random() < 0.5 else None
    base = untwisted(alg, group, alpha)
    omega = _scalar_cocycle_table(group, rng)
    n = group.order
    sigma = [[alg.scalar(omega[g, h]) for h in range(n)] for g in range(n)]
    sysm = validate_system(TwistedSystem(alg, group, base.alpha, sigma))
    if perturb:
        sysm = perturb_unitary(sysm, random_unitary_map(sysm, rng))
    return sysm


def random_unitary_map(system: TwistedSystem, rng: np.random.Generator, central: bool = False) -> UnitaryMap:
    alg = system.algebra
    vals = []
    for g in system.group:
        if g == system.group.identity:
            vals.append(alg.unit())
        elif central:
            vals.append(alg.element([np.exp(2j * np.pi * rng.random()) * np.eye(n) for n in alg.block_dims]))
        else:
            vals.append(random_algebra_unitary(alg, rng))
    return UnitaryMap(tuple(vals))


def permutation_rep(group: FiniteGroup) -> np.ndarray:
    """Left regular representation of G on ``C^|G|``."""
    n = group.order
    w = np.zeros((n, n, n))
    for g in group:
        for h in group:
            w[g, group.mul(g, h), h] = 1.0
    return w


def random_rep(system: TwistedSystem, rng: np.random.Generator, max_dim: int = 40) -> EquivariantRep:
    """One of: trivial, regular, amplified trivial, direct sum, internal tensor."""
    kinds = ["trivial", "regular", "amplified", "sum", "tensor"]
    kind = kinds[int(rng.integers(len(kinds)))]
    triv = trivial_rep(system)
    if kind == "trivial":
        return triv
    reg = regular_rep(system)
    if kind == "regular":
        return reg
    if kind == "amplified":
        return amplify_rep(triv, permutation_rep(system.group))
    if kind == "sum":
        out = direct_sum_reps(triv, reg)
        return out if out.dim <= max_dim else reg
    return internal_tensor_reps(system, triv, reg)[0]


def random_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.normal(size=n) + 1j * rng.normal(size=n)


def random_coeff_maps(system: TwistedSystem, rng: np.random.Generator) -> np.ndarray:
    d = system.algebra.dim
    return rng.normal(size=(system.order, d, d)) + 1j * rng.normal(size=(system.order, d, d))


def mutate_system(system: TwistedSystem, rng: np.random.Generator) -> tuple[TwistedSystem, str]:
    """Change a single entry: negate one ``sigma(g, h)`` or replace one ``alpha_g`` by
    ``Ad(u) alpha_g`` with a non-central unitary u (when A has a block of size > 1)."""
    alg, grp = system.algebra, system.group
    n = grp.order
    can_alpha = max(alg.block_dims) > 1
    if can_alpha and rng.random() < 0.5:
        g = int(rng.integers(n))
        while True:
            u = random_algebra_unitary(alg, rng)
            if alg.center_distance(u.vec) > 0.1:
                break
        alpha = list(system.alpha)
        alpha[g] = Isomorphism.inner(alg, u).compose(alpha[g])
        return TwistedSystem(alg, grp, alpha, system.sigma), f"alpha[{g}]"
    g, h = int(rng.integers(n)), int(rng.integers(n))
    sigma = [list(row) for row in system.sigma]
    sigma[g][h] = -sigma[g][h]
    return TwistedSystem(alg, grp, system.alpha, sigma), f"sigma[{g}][{h}]"
