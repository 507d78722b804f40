"""Transport of coefficient maps along exterior equivalence and group conjugacy,
and recovery of the central cocycle relating two conjugate systems."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import DEFAULT_TOL, Tolerance
from .errors import IntertwinerFails, OmegaNotCentral, SystemMismatch
from .fourier import CoeffMap, Provenance, same_system
from .modules import perturbed_rep
from .system import (CentralCocycle, Isomorphism, ScalarCocycle, TwistedSystem, UnitaryMap,
                     certify_group_conjugacy, perturb_central, perturb_unitary,
                     validate_central_cocycle)


@dataclass
class TransportReport:
    kind: str  # "pi" | "psi" | "omegaReconstruction"
    inputs: dict = field(default_factory=dict)
    checks_passed: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _as_map(w) -> UnitaryMap:
    return w if isinstance(w, UnitaryMap) else UnitaryMap(tuple(w))


def pi_transport(system: TwistedSystem, w, t: CoeffMap, target: TwistedSystem | None = None,
                 tol: Tolerance = DEFAULT_TOL) -> CoeffMap:
    """``Pi(T)(g, a) = T(g, a w(g)) w(g)*``, a coefficient map over ``Sigma^w``.

    Coefficients of a representation are carried to the same vectors in the
    perturbed representation.
    """
    if not same_system(system, t.system):
        raise SystemMismatch("coefficient map is not over the given system")
    w = _as_map(w)
    target = perturb_unitary(system, w, tol) if target is None else target
    alg = system.algebra
    maps = np.array([alg.rmul(alg.adjoint_vec(w[g].vec)) @ t.maps[g] @ alg.rmul(w[g].vec)
                     for g in system.group])
    prov = None
    if t.provenance is not None:
        p = t.provenance
        prov = Provenance(perturbed_rep(system, w, p.rep, tol), p.x, p.y, p.bound)
    return CoeffMap(target, maps, prov)


def check_pi_homomorphism(system: TwistedSystem, w, pairs, tol: float = 1e-10) -> TransportReport:
    """``Pi(T T') = Pi(T) Pi(T')`` and additivity on the supplied pairs."""
    w = _as_map(w)
    target = perturb_unitary(system, w)
    report = TransportReport("pi", {"pairs": len(pairs)})
    for i, (t1, t2) in enumerate(pairs):
        p1, p2 = pi_transport(system, w, t1, target), pi_transport(system, w, t2, target)
        r = pi_transport(system, w, t1.compose(t2), target).distance(p1.compose(p2))
        r = max(r, pi_transport(system, w, t1 + t2, target).distance(p1 + p2))
        if r > tol:
            report.failures.append((f"pair {i}", r))
        else:
            report.checks_passed.append(f"pair {i}")
    return report


def psi_transport(sigma_sys: TwistedSystem, theta_sys: TwistedSystem, phi: Isomorphism, phi_g,
                  s: CoeffMap, tol: Tolerance = DEFAULT_TOL) -> CoeffMap:
    """``Psi(S)(g, a) = phi^-1(S(phi_g(g), phi(a)))``, a coefficient map over Sigma."""
    phi_g = certify_group_conjugacy(sigma_sys, theta_sys, phi, phi_g, tol)
    if not same_system(theta_sys, s.system):
        raise SystemMismatch("coefficient map is not over the target system")
    pm, pinv = phi.matrix, phi.inverse().matrix
    maps = np.array([pinv @ s.maps[phi_g[g]] @ pm for g in sigma_sys.group])
    return CoeffMap(sigma_sys, maps)


def reconstruct_weak_cocycle(sigma_sys: TwistedSystem, theta_sys: TwistedSystem, phi: Isomorphism,
                             phi_g, w, tol: Tolerance = DEFAULT_TOL):
    """Recover ``omega(g, h) = u(g, h) sigma^w(g, h)*`` with ``u(g, h) = phi^-1(theta(phi_g g, phi_g h))``.

    Requires ``phi^-1 beta_{phi_g(g)} phi = Ad(w(g)) alpha_g``. omega must be
    central and a 2-cocycle; it is returned as a :class:`ScalarCocycle` when
    the center is trivial and as a :class:`CentralCocycle` otherwise, after
    certifying that Theta is group conjugate to ``Sigma^w(omega)``.
    """
    w = _as_map(w)
    alg, grp = sigma_sys.algebra, sigma_sys.group
    report = TransportReport("omegaReconstruction", {"order": grp.order, "blocks": alg.block_dims})
    phi_g = np.asarray(phi_g, dtype=np.int64)
    bound = tol.bound(1.0)
    phi_inv = phi.inverse()
    for g in grp:
        lhs = phi_inv.compose(theta_sys.alpha[phi_g[g]]).compose(phi)
        rhs = Isomorphism.inner(alg, w[g]).compose(sigma_sys.alpha[g])
        r = lhs.distance(rhs)
        if r > bound:
            raise IntertwinerFails(g, r)
    report.checks_passed.append("intertwiner")

    sw = perturb_unitary(sigma_sys, w, tol)
    n = grp.order
    omega = [[phi_inv(theta_sys.sigma[phi_g[g]][phi_g[h]]) @ sw.sigma[g][h].H for h in range(n)]
             for g in range(n)]
    for g in range(n):
        for h in range(n):
            r = alg.center_distance(omega[g][h].vec)
            if r > bound:
                raise OmegaNotCentral(g, h, r)
    report.checks_passed.append("omega-central")
    eta = validate_central_cocycle(sw, CentralCocycle(tuple(tuple(r) for r in omega)), tol)
    report.checks_passed.append("omega-cocycle")

    certify_group_conjugacy(perturb_central(sw, eta, tol), theta_sys, phi, phi_g, tol)
    report.checks_passed.append("conjugacy")
    if alg.n_blocks == 1:
        scalars = np.array([[np.trace(omega[g][h].blocks[0]) / alg.block_dims[0] for h in range(n)]
                            for g in range(n)])
        scalars.setflags(write=False)
        report.checks_passed.append("scalar-downgrade")
        return ScalarCocycle(grp, scalars), report
    return eta, report
