"""JSON bundles: a single document with named systems, representations, coefficient
maps, Morita data, Exel functions and amenability witnesses.

Complex scalars are ``[re, im]`` pairs, matrices are row-major nested lists,
algebra elements are lists of per-block matrices and per-g tables are indexed
by group element. Parsing is structural only (shapes and name resolution);
the ``validate`` command performs the mathematical checks.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import AlgElement, CStarAlgebra, validate_group
from .amenability import AmenabilityWitness, ExelFunction, exel_coefficient
from .errors import (InputError, NotIsomorphism, ParseError, ShapeError, ShapeMismatch,
                     SystemMismatch, UnresolvedReference)
from .fourier import CoeffMap
from .modules import EquivariantRep, HilbertBimodule, regular_rep, trivial_rep
from .morita import CompatibleAction, Frame, partition_of_unity
from .system import Isomorphism, TwistedSystem

SECTIONS = ("systems", "reps", "coeffs", "morita", "exel", "witnesses")


# -----------------------------------------------------------------------------
# encoding helpers
# -----------------------------------------------------------------------------

def encode_complex_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    # adding 0.0 turns -0.0 into 0.0 so emitted text is canonical
    return (np.stack([a.real, a.imag], axis=-1) + 0.0).tolist()


def decode_complex_array(obj, path: str, ndim: int | None = None) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ShapeError(path, "ragged or non-numeric array") from exc
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ShapeError(path, "complex entries must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if ndim is not None and out.ndim != ndim:
        raise ShapeError(path, f"expected a {ndim}-dimensional complex array, got {out.ndim}")
    return out


def encode_element(a: AlgElement) -> list:
    return [encode_complex_array(m) for m in a.blocks]


def decode_element(obj, alg: CStarAlgebra, path: str) -> AlgElement:
    if not isinstance(obj, list) or len(obj) != alg.n_blocks:
        raise ShapeError(path, f"expected {alg.n_blocks} blocks")
    blocks = []
    for b, (m, n) in enumerate(zip(obj, alg.block_dims)):
        mat = decode_complex_array(m, f"{path}[{b}]", 2)
        if mat.shape != (n, n):
            raise ShapeError(f"{path}[{b}]", f"block has shape {mat.shape}, expected {(n, n)}")
        blocks.append(mat)
    return alg.element(blocks)


def _need(obj: dict, key: str, path: str):
    if not isinstance(obj, dict) or key not in obj:
        raise ShapeError(path, f"missing field {key!r}")
    return obj[key]


def _table(obj, n: int, path: str) -> list:
    if not isinstance(obj, list) or len(obj) != n:
        raise ShapeError(path, f"expected {n} entries, got {len(obj) if isinstance(obj, list) else 'non-list'}")
    return obj


# -----------------------------------------------------------------------------
# bundle
# -----------------------------------------------------------------------------

@dataclass
class RepEntry:
    system: str
    kind: str
    rep: EquivariantRep


@dataclass
class CoeffEntry:
    system: str
    coeff: CoeffMap


@dataclass
class MoritaEntry:
    sigma: str
    theta: str
    action: CompatibleAction
    frame: Frame | None
    frame_given: bool

    def data(self):
        from .morita import MoritaData
        frame = self.frame if self.frame is not None else partition_of_unity(self.action.bimodule)
        return MoritaData(self.action, frame)


@dataclass
class ExelEntry:
    system: str
    xi: ExelFunction


@dataclass
class WitnessEntry:
    system: str
    members: list  # names, each resolved in coeffs or exel
    witness: AmenabilityWitness
    epsilon: float


@dataclass
class Bundle:
    systems: dict = field(default_factory=dict)
    reps: dict = field(default_factory=dict)
    coeffs: dict = field(default_factory=dict)
    morita: dict = field(default_factory=dict)
    exel: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)


def _decode_system(name: str, obj: dict) -> TwistedSystem:
    path = f"systems.{name}"
    dims = _need(obj, "algebra", path)
    try:
        alg = CStarAlgebra(tuple(dims))
    except (ShapeMismatch, TypeError, ValueError) as exc:
        raise ShapeError(f"{path}.algebra", str(exc)) from exc
    table = _need(obj, "group", path)
    try:
        group = validate_group(table, obj.get("labels", ()))
    except ShapeMismatch as exc:
        raise ShapeError(f"{path}.group", str(exc)) from exc
    n = group.order
    alpha = []
    for g, entry in enumerate(_table(_need(obj, "alpha", path), n, f"{path}.alpha")):
        p = f"{path}.alpha[{g}]"
        perm = _need(entry, "perm", p)
        unitary = decode_element(_need(entry, "unitary", p), alg, f"{p}.unitary")
        try:
            alpha.append(Isomorphism(alg, alg, tuple(perm), unitary))
        except NotIsomorphism as exc:
            raise ShapeError(f"{p}.perm", str(exc)) from exc
    sigma = []
    for g, row in enumerate(_table(_need(obj, "sigma", path), n, f"{path}.sigma")):
        row = _table(row, n, f"{path}.sigma[{g}]")
        sigma.append([decode_element(x, alg, f"{path}.sigma[{g}][{h}]") for h, x in enumerate(row)])
    return TwistedSystem(alg, group, alpha, sigma)


def encode_system(s: TwistedSystem) -> dict:
    out = {"algebra": list(s.algebra.block_dims), "group": s.group.table.tolist()}
    if s.group.labels:
        out["labels"] = list(s.group.labels)
    out["alpha"] = [{"perm": list(a.perm), "unitary": encode_element(a.unitary)} for a in s.alpha]
    out["sigma"] = [[encode_element(x) for x in row] for row in s.sigma]
    return out


def _decode_tensor(obj, shape, path) -> np.ndarray:
    arr = decode_complex_array(obj, path, len(shape))
    if arr.shape != tuple(shape):
        raise ShapeError(path, f"shape {arr.shape}, expected {tuple(shape)}")
    return arr


def _decode_bimodule(obj, left: CStarAlgebra, right: CStarAlgebra, path: str, need_left_inner: bool):
    n = _need(obj, "dim", path)
    if not isinstance(n, int) or n < 0:
        raise ShapeError(f"{path}.dim", "carrier dimension must be a nonnegative integer")
    L = _decode_tensor(_need(obj, "left_action", path), (left.dim, n, n), f"{path}.left_action")
    R = _decode_tensor(_need(obj, "right_action", path), (right.dim, n, n), f"{path}.right_action")
    G = _decode_tensor(_need(obj, "right_inner", path), (right.dim, n, n), f"{path}.right_inner")
    GL = None
    if need_left_inner or "left_inner" in obj:
        GL = _decode_tensor(_need(obj, "left_inner", path), (left.dim, n, n), f"{path}.left_inner")
    return HilbertBimodule(left, right, L, R, G, GL)


def encode_bimodule(m: HilbertBimodule) -> dict:
    out = {"dim": m.dim, "left_action": encode_complex_array(m.left_action),
           "right_action": encode_complex_array(m.right_action),
           "right_inner": encode_complex_array(m.right_inner)}
    if m.left_inner is not None:
        out["left_inner"] = encode_complex_array(m.left_inner)
    return out


def _resolve(section: dict, name, kind: str):
    if not isinstance(name, str) or name not in section:
        raise UnresolvedReference(f"{kind}:{name}")
    return section[name]


def decode_bundle(doc: dict) -> Bundle:
    if not isinstance(doc, dict):
        raise ShapeError("$", "bundle must be a JSON object")
    unknown = sorted(set(doc) - set(SECTIONS))
    if unknown:
        raise ShapeError("$", f"unknown sections {unknown}")
    b = Bundle()
    for name, obj in sorted(doc.get("systems", {}).items()):
        b.systems[name] = _decode_system(name, obj)

    for name, obj in sorted(doc.get("reps", {}).items()):
        path = f"reps.{name}"
        sname = _need(obj, "system", path)
        sysm = _resolve(b.systems, sname, "system")
        kind = obj.get("kind", "explicit")
        if kind == "trivial":
            rep = trivial_rep(sysm)
        elif kind == "regular":
            rep = regular_rep(sysm)
        elif kind == "explicit":
            mod = _decode_bimodule(_need(obj, "module", path), sysm.algebra, sysm.algebra, f"{path}.module", False)
            v = _decode_tensor(_need(obj, "v", path), (sysm.order, mod.dim, mod.dim), f"{path}.v")
            rep = EquivariantRep(sysm, mod, v, name)
        else:
            raise ShapeError(f"{path}.kind", f"unknown representation kind {kind!r}")
        b.reps[name] = RepEntry(sname, kind, rep)

    for name, obj in sorted(doc.get("coeffs", {}).items()):
        path = f"coeffs.{name}"
        sname = _need(obj, "system", path)
        sysm = _resolve(b.systems, sname, "system")
        d = sysm.algebra.dim
        maps = _decode_tensor(_need(obj, "maps", path), (sysm.order, d, d), f"{path}.maps")
        b.coeffs[name] = CoeffEntry(sname, CoeffMap(sysm, maps))

    for name, obj in sorted(doc.get("morita", {}).items()):
        path = f"morita.{name}"
        s1 = _resolve(b.systems, _need(obj, "sigma", path), "system")
        s2 = _resolve(b.systems, _need(obj, "theta", path), "system")
        mod = _decode_bimodule(_need(obj, "bimodule", path), s1.algebra, s2.algebra, f"{path}.bimodule", True)
        delta = _decode_tensor(_need(obj, "delta", path), (s1.order, mod.dim, mod.dim), f"{path}.delta")
        try:
            action = CompatibleAction(s1, s2, mod, delta)
        except SystemMismatch as exc:
            raise ShapeError(path, str(exc)) from exc
        frame = None
        if "frame" in obj:
            pairs = []
            for i, pair in enumerate(_table(obj["frame"], len(obj["frame"]), f"{path}.frame")):
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ShapeError(f"{path}.frame[{i}]", "frame entries are [z, z'] pairs")
                zs = [decode_complex_array(v, f"{path}.frame[{i}][{k}]", 1) for k, v in enumerate(pair)]
                for k, v in enumerate(zs):
                    if v.shape != (mod.dim,):
                        raise ShapeError(f"{path}.frame[{i}][{k}]", f"vector length {v.shape[0]}, expected {mod.dim}")
                pairs.append(tuple(zs))
            frame = make_frame(mod, pairs)
        b.morita[name] = MoritaEntry(obj["sigma"], obj["theta"], action, frame, frame is not None)

    for name, obj in sorted(doc.get("exel", {}).items()):
        path = f"exel.{name}"
        sname = _need(obj, "system", path)
        sysm = _resolve(b.systems, sname, "system")
        xs = _table(_need(obj, "xi", path), sysm.order, f"{path}.xi")
        vals = [decode_element(x, sysm.algebra, f"{path}.xi[{g}]") for g, x in enumerate(xs)]
        b.exel[name] = ExelEntry(sname, ExelFunction(sysm, vals))

    for name, obj in sorted(doc.get("witnesses", {}).items()):
        path = f"witnesses.{name}"
        sname = _need(obj, "system", path)
        sysm = _resolve(b.systems, sname, "system")
        members = _need(obj, "net", path)
        if not isinstance(members, list) or not members:
            raise ShapeError(f"{path}.net", "net must be a nonempty list of names")
        net = []
        for m in members:
            if isinstance(m, str) and m in b.coeffs:
                entry = b.coeffs[m]
                if entry.system != sname:
                    raise ShapeError(f"{path}.net", f"member {m!r} is over system {entry.system!r}")
                net.append(entry.coeff)
            elif isinstance(m, str) and m in b.exel:
                net.append(exel_coefficient(sysm, b.exel[m].xi))
            else:
                raise UnresolvedReference(f"coeff:{m}")
        eps = obj.get("epsilon", 1e-9)
        if not isinstance(eps, (int, float)) or eps < 0:
            raise ShapeError(f"{path}.epsilon", "epsilon must be a nonnegative number")
        b.witnesses[name] = WitnessEntry(sname, list(members), AmenabilityWitness(sysm, net), float(eps))
    return b


def make_frame(mod: HilbertBimodule, pairs) -> Frame:
    alg = mod.right_algebra
    total = sum((mod.inner(z, zp) for z, zp in pairs), np.zeros(alg.dim, dtype=complex))
    k = sum(mod.norm(z) * mod.norm(zp) for z, zp in pairs) ** 2
    return Frame(tuple(pairs), float(k), float(np.linalg.norm(total - alg.unit_vec)))


def encode_bundle(b: Bundle) -> dict:
    doc = {}
    if b.systems:
        doc["systems"] = {n: encode_system(s) for n, s in sorted(b.systems.items())}
    if b.reps:
        reps = {}
        for n, e in sorted(b.reps.items()):
            if e.kind in ("trivial", "regular"):
                reps[n] = {"system": e.system, "kind": e.kind}
            else:
                reps[n] = {"system": e.system, "kind": "explicit",
                           "module": encode_bimodule(e.rep.module), "v": encode_complex_array(e.rep.v)}
        doc["reps"] = reps
    if b.coeffs:
        doc["coeffs"] = {n: {"system": e.system, "maps": encode_complex_array(e.coeff.maps)}
                         for n, e in sorted(b.coeffs.items())}
    if b.morita:
        mor = {}
        for n, e in sorted(b.morita.items()):
            obj = {"sigma": e.sigma, "theta": e.theta, "bimodule": encode_bimodule(e.action.bimodule),
                   "delta": encode_complex_array(e.action.delta)}
            if e.frame is not None and e.frame_given:
                obj["frame"] = [[encode_complex_array(z), encode_complex_array(zp)] for z, zp in e.frame.pairs]
            mor[n] = obj
        doc["morita"] = mor
    if b.exel:
        doc["exel"] = {n: {"system": e.system, "xi": [encode_element(x) for x in e.xi.values]}
                       for n, e in sorted(b.exel.items())}
    if b.witnesses:
        doc["witnesses"] = {n: {"system": e.system, "net": list(e.members), "epsilon": e.epsilon}
                            for n, e in sorted(b.witnesses.items())}
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def load_documents(paths) -> dict:
    """Read and merge JSON documents; a name may repeat only with identical content."""
    merged: dict = {}
    for path in paths:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, exc.msg) from exc
        if not isinstance(doc, dict):
            raise ShapeError(str(path), "bundle must be a JSON object")
        for section, entries in doc.items():
            if section not in SECTIONS:
                raise ShapeError(f"{path}:$", f"unknown section {section!r}")
            if not isinstance(entries, dict):
                raise ShapeError(f"{path}:{section}", "section must map names to objects")
            target = merged.setdefault(section, {})
            for name, obj in entries.items():
                if name in target and target[name] != obj:
                    raise ShapeError(f"{section}.{name}", "defined differently in two files")
                target[name] = obj
    return merged


def parse_bundle(*paths) -> Bundle:
    return decode_bundle(load_documents(paths))


def write_bundle(b: Bundle, path) -> None:
    Path(path).write_text(dumps(encode_bundle(b)))
