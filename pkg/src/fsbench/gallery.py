"""Worked examples, each emitted as a self-contained bundle."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .algebra import CStarAlgebra, cyclic_group, klein_group
from .amenability import AmenabilityWitness, constant_exel_function, exel_coefficient
from .bundle import (Bundle, CoeffEntry, ExelEntry, MoritaEntry, RepEntry, WitnessEntry,
                     write_bundle)
from .errors import UnknownGalleryName
from .fourier import embed_group_function, identity_map
from .modules import regular_rep, trivial_rep
from .morita import mor_pair
from .system import (Isomorphism, TwistedSystem, UnitaryMap, perturb_unitary, untwisted,
                     validate_system)


def sys_triv() -> TwistedSystem:
    return untwisted(CStarAlgebra((1,)), cyclic_group(2))


def sys_tw() -> TwistedSystem:
    """``(C, Z2 x Z2, triv, omega)`` with ``omega((a,b),(c,d)) = (-1)^(bc)``."""
    alg, grp = CStarAlgebra((1,)), klein_group()
    n = grp.order
    sigma = [[alg.scalar((-1.0) ** ((g % 2) * (h // 2))) for h in range(n)] for g in range(n)]
    return validate_system(TwistedSystem(alg, grp, untwisted(alg, grp).alpha, sigma))


def sys_m2() -> TwistedSystem:
    """``(M_2, Z2, Ad(diag(1,-1)), 1)``."""
    alg, grp = CStarAlgebra((2,)), cyclic_group(2)
    u = alg.element([np.diag([1.0, -1.0])])
    alpha = [Isomorphism.identity(alg), Isomorphism.inner(alg, u)]
    return validate_system(untwisted(alg, grp, alpha))


def _with_standard_entries(b: Bundle, name: str, system: TwistedSystem) -> None:
    b.systems[name] = system
    b.reps[f"{name}-trivial"] = RepEntry(name, "trivial", trivial_rep(system))
    b.reps[f"{name}-regular"] = RepEntry(name, "regular", regular_rep(system))
    b.coeffs[f"{name}-identity"] = CoeffEntry(name, identity_map(system))


def build(name: str) -> Bundle:
    b = Bundle()
    if name == "sys-triv":
        s = sys_triv()
        _with_standard_entries(b, name, s)
        b.coeffs["sys-triv-sign"] = CoeffEntry(name, embed_group_function(s, [1.0, -1.0]))
    elif name == "sys-tw":
        _with_standard_entries(b, name, sys_tw())
    elif name == "sys-m2":
        s = sys_m2()
        _with_standard_entries(b, name, s)
        w = UnitaryMap((s.algebra.unit(), s.algebra.element([np.diag([1.0, -1.0])])))
        sw = perturb_unitary(s, w)
        b.systems["sys-m2-perturbed"] = sw
        b.reps["sys-m2-perturbed-trivial"] = RepEntry("sys-m2-perturbed", "trivial", trivial_rep(sw))
    elif name == "mor-pair":
        data = mor_pair()
        b.systems["sigma"] = data.sigma
        b.systems["theta"] = data.theta
        b.coeffs["sigma-identity"] = CoeffEntry("sigma", identity_map(data.sigma))
        b.coeffs["theta-identity"] = CoeffEntry("theta", identity_map(data.theta))
        b.morita["mor-pair"] = MoritaEntry("sigma", "theta", data.action, data.frame, True)
    elif name == "exel-const":
        s = sys_triv()
        b.systems["sys-triv"] = s
        xi = constant_exel_function(s)
        b.exel["const"] = ExelEntry("sys-triv", xi)
        b.witnesses["const"] = WitnessEntry("sys-triv", ["const"],
                                            AmenabilityWitness(s, [exel_coefficient(s, xi)]), 1e-9)
    else:
        raise UnknownGalleryName(name)
    return b


GALLERY_NAMES = ("sys-triv", "sys-tw", "sys-m2", "mor-pair", "exel-const")


def gallery(name: str, out_dir) -> Path:
    b = build(name)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.json"
    write_bundle(b, path)
    return path
