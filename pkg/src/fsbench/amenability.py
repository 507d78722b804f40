"""Amenability witnesses, Exel coefficient maps and their Morita transfer.

At this scale every system is amenable: the constant function
``xi(h) = |G|^(-1/2) 1_A`` already gives ``T^xi = I_Sigma``. What is checked
here is the witness machinery itself and its transfer along a Morita
equivalence, with nets read as finite ordered lists whose final member must
be within epsilon of the identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgElement
from .errors import NotPD, ResidualTooLarge, ShapeMismatch
from .fourier import CoeffMap, Provenance, exact_pd_norm, pd_check
from .modules import regular_rep
from .morita import MoritaData, transfer
from .system import TwistedSystem


@dataclass(frozen=True, eq=False)
class ExelFunction:
    """``xi: G -> A``; support is automatically finite."""

    system: TwistedSystem
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        if len(vals) != self.system.order:
            raise ShapeMismatch("Exel function needs one value per group element")
        for v in vals:
            if not isinstance(v, AlgElement) or v.algebra != self.system.algebra:
                raise ShapeMismatch("Exel function values must lie in the system's algebra")
        object.__setattr__(self, "values", vals)

    def __getitem__(self, g):
        return self.values[g]

    @property
    def vector(self) -> np.ndarray:
        """As a vector of the regular representation's carrier ``A^G``."""
        return np.concatenate([v.vec for v in self.values])

    def support(self) -> list:
        return [g for g, v in enumerate(self.values) if np.any(v.vec != 0)]


def constant_exel_function(system: TwistedSystem) -> ExelFunction:
    alg = system.algebra
    c = 1.0 / np.sqrt(system.order)
    return ExelFunction(system, tuple(alg.scalar(c) for _ in system.group))


def exel_coefficient(system: TwistedSystem, xi: ExelFunction) -> CoeffMap:
    """``T^xi(g, a) = sum_h xi(h)* a alpha_g(xi(g^-1 h))``.

    This is the coefficient of the regular representation at ``(xi, xi)``,
    which is recorded as provenance.
    """
    alg, grp = system.algebra, system.group
    d = alg.dim
    maps = np.zeros((grp.order, d, d), dtype=complex)
    for g in grp:
        gi = grp.inv(g)
        for h in grp:
            left = xi[h].H.vec
            right = system.alpha_mats[g] @ xi[grp.mul(gi, h)].vec
            maps[g] += alg.lmul(left) @ alg.rmul(right)
    reg = regular_rep(system)
    vec = xi.vector
    bound = reg.module.norm(vec) ** 2
    return CoeffMap(system, maps, Provenance(reg, vec, vec, bound))


def exel_condition_a(xi: ExelFunction) -> float:
    """``||sum_g xi(g)* xi(g)||``."""
    alg = xi.system.algebra
    total = alg.zero()
    for v in xi.values:
        total = total + v.H @ v
    return total.norm()


def exel_central_residual(xi: ExelFunction, g: int) -> float:
    """``||sum_h xi(h)* alpha_g(xi(g^-1 h)) - 1_A||``, the simplified residual for central xi."""
    system = xi.system
    grp, alg = system.group, system.algebra
    total = alg.zero()
    for h in grp:
        total = total + xi[h].H @ system.alpha[g](xi[grp.mul(grp.inv(g), h)])
    return (total - alg.unit()).norm()


@dataclass(frozen=True, eq=False)
class AmenabilityWitness:
    system: TwistedSystem
    net: tuple

    def __post_init__(self):
        object.__setattr__(self, "net", tuple(self.net))


@dataclass
class WitnessReport:
    bound: float = 0.0
    residuals: dict = field(default_factory=dict)  # (g, basis label) -> residual of the final member
    max_residual: float = 0.0
    failures: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def raise_first(self):
        if self.failures:
            raise self.failures[0]


def validate_witness(system: TwistedSystem, witness: AmenabilityWitness, epsilon: float,
                     tol: float = 1e-8) -> WitnessReport:
    """PD of every member, uniform bound from exact PD norms, final-member residuals."""
    if not witness.net:
        raise ShapeMismatch("witness net is empty")
    report = WitnessReport()
    alg = system.algebra
    for i, t in enumerate(witness.net):
        verdict = pd_check(system, t, tol)
        report.verdicts.append(verdict)
        if not verdict.positive:
            report.failures.append(NotPD(i, verdict.min_eigenvalue))
        else:
            report.bound = max(report.bound, exact_pd_norm(t))
    last = witness.net[-1]
    eye = np.eye(alg.dim)
    for g in system.group:
        for k in range(alg.dim):
            r = alg.norm_vec(last.maps[g] @ eye[k] - eye[k])
            report.residuals[(g, alg.label(k))] = r
            report.max_residual = max(report.max_residual, r)
            if r > epsilon:
                report.failures.append(ResidualTooLarge(g, alg.label(k), r))
    return report


@dataclass
class TransferReport:
    witness_report: WitnessReport
    K: float
    bound_in: float
    bound_out: float
    epsilon_out: float
    support_ok: bool
    failures: list = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.bound_out / self.bound_in if self.bound_in > 0 else 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and self.witness_report.ok


def transferred_epsilon(data: MoritaData, epsilon: float) -> float:
    """``K dim(A) epsilon``: ``|(T - I)_g(a)| <= dim(A) epsilon |a|`` when every basis
    residual is at most epsilon, and each frame term contributes ``|z_i||z_i'||z_j||z_j'|``."""
    return data.frame.K * data.sigma.algebra.dim * epsilon + 1e-9


def transfer_witness(data: MoritaData, witness: AmenabilityWitness, epsilon: float,
                     tol: float = 1e-8) -> tuple[AmenabilityWitness, TransferReport]:
    """Push every member through the full frame transfer and re-validate over Theta."""
    inbound = validate_witness(data.sigma, witness, epsilon, tol)
    inbound.raise_first()
    net = []
    support_ok = True
    for t in witness.net:
        ft = transfer(data.action, data.frame, t, "full")
        if not set(ft.support()) <= set(t.support()):
            support_ok = False
        net.append(ft)
    out = AmenabilityWitness(data.theta, net)
    eps_out = transferred_epsilon(data, inbound.max_residual)
    report = validate_witness(data.theta, out, max(eps_out, 1e-9), tol)
    tr = TransferReport(report, data.frame.K, inbound.bound, report.bound, eps_out, support_ok)
    if not support_ok:
        tr.failures.append("support grew under transfer")
    if report.bound > data.frame.K * inbound.bound * (1 + 1e-9) + 1e-12:
        tr.failures.append(f"bound {report.bound:.6g} exceeds K * {inbound.bound:.6g}")
    return out, tr
