"""Command line: ``fsbench <command> FILES... [flags]``.

Exit codes are 0 when every check passes, 1 when a mathematical check fails
(the report names the witness) and 2 for input or usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bundle as bio
from .algebra import AlgElement, Tolerance
from .amenability import transfer_witness, validate_witness
from .errors import CheckFailed, InputError, ShapeMismatch, UnresolvedReference
from .fourier import pd_check, pd_check_sampled, sup_norm
from .gallery import GALLERY_NAMES, gallery
from .modules import validate_equivariant
from .morita import (partition_of_unity, span_reconstruct, transfer, validate_bimodule,
                     validate_compatible_action)
from .system import validate_system


def fmt(x: float) -> str:
    return f"{x:.6e}"


def fmt_element(a: AlgElement) -> str:
    vec = a.vec
    parts = [f"{a.algebra.label(k)}:{fmt_complex(v)}" for k, v in enumerate(vec) if abs(v) > 0]
    return "{" + ", ".join(parts) + "}" if parts else "0"


def fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


class Report:
    def __init__(self, command: str):
        self.command = command
        self.lines: list[str] = []
        self.results: list[dict] = []
        self.failed = False

    def add(self, kind: str, name: str, ok: bool, detail: str = "", **data):
        status = "ok" if ok else "FAIL"
        self.lines.append(f"{kind} {name}: {status}" + (f" {detail}" if detail else ""))
        self.results.append({"kind": kind, "name": name, "ok": ok, "detail": detail, **data})
        self.failed |= not ok

    def fail_with(self, kind: str, name: str, exc: CheckFailed):
        self.add(kind, name, False, f"{type(exc).__name__}: {exc}")

    def emit(self, out) -> int:
        for line in self.lines:
            print(line)
        code = 1 if self.failed else 0
        print(f"{self.command}: {'FAIL' if self.failed else 'ok'}")
        if out:
            Path(out).write_text(json.dumps({"command": self.command, "exit": code,
                                             "results": self.results}, indent=1, sort_keys=True) + "\n")
        return code


def _pick(section: dict, name, kind: str) -> list:
    if name is None:
        return sorted(section)
    if name not in section:
        raise UnresolvedReference(f"{kind}:{name}")
    return [name]


def _one(section: dict, name, kind: str) -> str:
    names = _pick(section, name, kind)
    if len(names) != 1:
        raise InputError(f"{len(names)} {kind} entries present; choose one with --{kind}")
    return names[0]


# -----------------------------------------------------------------------------
# commands
# -----------------------------------------------------------------------------

def cmd_validate(args, b: bio.Bundle) -> Report:
    rep = Report("validate")
    tol = Tolerance(args.tol, args.tol)
    for name in sorted(b.systems):
        try:
            validate_system(b.systems[name], tol)
            rep.add("system", name, True)
        except CheckFailed as exc:
            rep.fail_with("system", name, exc)
    for name in sorted(b.reps):
        e = b.reps[name]
        try:
            validate_equivariant(e.rep.system, e.rep, tol, args.seed)
            rep.add("rep", name, True, f"dim={e.rep.dim}")
        except CheckFailed as exc:
            rep.fail_with("rep", name, exc)
    for name in sorted(b.morita):
        e = b.morita[name]
        act = e.action
        try:
            validate_bimodule(act.bimodule, tol, args.seed)
            validate_compatible_action(act.left_system, act.right_system, act.bimodule, act.delta, tol)
            frame = e.frame if e.frame is not None else partition_of_unity(act.bimodule)
            if frame.residual > 1e-9:
                rep.add("morita", name, False, f"frame residual {fmt(frame.residual)}")
            else:
                rep.add("morita", name, True, f"frame={len(frame.pairs)} K={fmt(frame.K)} "
                        f"residual={fmt(frame.residual)}", K=frame.K, frame_residual=frame.residual)
        except CheckFailed as exc:
            rep.fail_with("morita", name, exc)
    for name in sorted(b.witnesses):
        e = b.witnesses[name]
        wr = validate_witness(e.witness.system, e.witness, e.epsilon, args.tol)
        detail = f"bound={fmt(wr.bound)} residual={fmt(wr.max_residual)}"
        if wr.failures:
            detail += f" {type(wr.failures[0]).__name__}: {wr.failures[0]}"
        rep.add("witness", name, wr.ok, detail, bound=wr.bound, residual=wr.max_residual)
    return rep


def _pd_detail(system, v) -> str:
    if v.positive:
        return f"positiveDefinite min_eig={fmt(v.min_eigenvalue)}"
    cert = "; ".join(f"({system.group.label(g)}, {fmt_element(a)})" for g, a in v.certificate)
    return f"notPD min_eig={fmt(v.min_eigenvalue)} reason={v.reason} certificate=[{cert}]"


def cmd_pd_check(args, b: bio.Bundle) -> Report:
    rep = Report("pd-check")
    for name in _pick(b.coeffs, args.coeff, "coeff"):
        t = b.coeffs[name].coeff
        if args.method == "choi":
            v = pd_check(t.system, t, args.tol)
        else:
            v = pd_check_sampled(t.system, t, args.samples, args.seed, args.tol)
        rep.add("coeff", name, v.positive, _pd_detail(t.system, v), verdict=v.verdict,
                min_eigenvalue=v.min_eigenvalue, method=v.method)
    return rep


def cmd_sup_norm(args, b: bio.Bundle) -> Report:
    rep = Report("sup-norm")
    for name in _pick(b.coeffs, args.coeff, "coeff"):
        s = sup_norm(b.coeffs[name].coeff, args.tol, args.seed)
        exact = "none" if s.exact is None else fmt(s.exact)
        rep.add("coeff", name, True, f"lower={fmt(s.lower)} upper={fmt(s.upper)} exact={exact}",
                lower=s.lower, upper=s.upper, exact=s.exact)
    return rep


def _frame_vectors(args, frame):
    i, j = args.pair_index
    if not (0 <= i < len(frame.pairs) and 0 <= j < len(frame.pairs)):
        raise InputError(f"frame has {len(frame.pairs)} pairs; indices {i}, {j} out of range")
    (z, zp), (zeta, zetap) = frame.pairs[i], frame.pairs[j]
    return z, zp, zeta, zetap


def cmd_transfer(args, b: bio.Bundle) -> Report:
    rep = Report("transfer")
    pname = _one(b.morita, args.morita, "morita")
    entry = b.morita[pname]
    data = entry.data()
    out = bio.Bundle()
    out.systems[entry.theta] = data.theta
    for name in _pick(b.coeffs, args.coeff, "coeff"):
        ce = b.coeffs[name]
        if ce.system != entry.sigma:
            continue
        if args.mode == "single":
            ft = transfer(data.action, None, ce.coeff, "single", _frame_vectors(args, data.frame))
        else:
            ft = transfer(data.action, data.frame, ce.coeff, "full")
        tname = f"{name}-transferred"
        out.coeffs[tname] = bio.CoeffEntry(entry.theta, ft)
        gap = float(np.max(np.abs(ft.maps - np.eye(data.theta.algebra.dim))))
        rep.add("coeff", name, True, f"-> {tname} support={ft.support()} identity_gap={fmt(gap)}",
                identity_gap=gap)
        for g in data.theta.group:
            rep.lines.append(f"  {tname}[{data.theta.group.label(g)}] = "
                             + np.array2string(ft.maps[g], precision=6, suppress_small=True,
                                               max_line_width=10**6).replace("\n", ""))
    if not out.coeffs:
        raise InputError(f"no coefficient map over {entry.sigma!r} to transfer")
    if args.output:
        bio.write_bundle(out, args.output)
        args.output = None
    return rep


def cmd_reconstruct(args, b: bio.Bundle) -> Report:
    rep = Report("reconstruct")
    pname = _one(b.morita, args.morita, "morita")
    entry = b.morita[pname]
    data = entry.data()
    names = [n for n in _pick(b.coeffs, args.coeff, "coeff") if b.coeffs[n].system == entry.theta]
    if not names:
        raise InputError(f"no coefficient map over {entry.theta!r} to reconstruct")
    for name in names:
        try:
            r = span_reconstruct(data.action, data.frame, b.coeffs[name].coeff, args.tol)
            rep.add("coeff", name, True, f"pieces={len(r.family)} residual={fmt(r.residual)}",
                    residual=r.residual)
        except CheckFailed as exc:
            rep.fail_with("coeff", name, exc)
    return rep


def cmd_witness(args, b: bio.Bundle) -> Report:
    rep = Report("witness")
    for name in _pick(b.witnesses, args.witness, "witness"):
        e = b.witnesses[name]
        wr = validate_witness(e.witness.system, e.witness, e.epsilon, args.tol)
        detail = f"bound={fmt(wr.bound)} residual={fmt(wr.max_residual)}"
        if wr.failures:
            detail += f" {type(wr.failures[0]).__name__}: {wr.failures[0]}"
        rep.add("witness", name, wr.ok, detail)
        if not wr.ok or args.morita is None:
            continue
        m = b.morita.get(args.morita)
        if m is None:
            raise UnresolvedReference(f"morita:{args.morita}")
        if m.sigma != e.system:
            raise InputError(f"witness {name!r} is over {e.system!r}, not {m.sigma!r}")
        _, tr = transfer_witness(m.data(), e.witness, e.epsilon, args.tol)
        detail = (f"K={fmt(tr.K)} bound_in={fmt(tr.bound_in)} bound_out={fmt(tr.bound_out)} "
                  f"ratio={fmt(tr.ratio)} epsilon_out={fmt(tr.epsilon_out)} "
                  f"residual={fmt(tr.witness_report.max_residual)}")
        fails = tr.failures + tr.witness_report.failures
        if fails:
            detail += f" {fails[0]}"
        rep.add("transferred", f"{name}->{m.theta}", tr.ok, detail, K=tr.K, ratio=tr.ratio)
    return rep


# -----------------------------------------------------------------------------
# entry point
# -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("files", nargs="+", type=Path, help="bundle files, merged by name")
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-o", "--output", type=Path, help="machine-readable result file")

    p = argparse.ArgumentParser(prog="fsbench", description="Finite twisted-system verification workbench.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="validate every object in the bundles")

    pd = sub.add_parser("pd-check", parents=[common], help="decide positive definiteness")
    pd.add_argument("--coeff")
    pd.add_argument("--method", choices=("choi", "sample"), default="choi")
    pd.add_argument("--samples", type=int, default=200)

    sn = sub.add_parser("sup-norm", parents=[common], help="bracket sup_g ||T_g||")
    sn.add_argument("--coeff")

    tr = sub.add_parser("transfer", parents=[common], help="transfer coefficient maps across a Morita pair")
    tr.add_argument("--morita")
    tr.add_argument("--coeff")
    tr.add_argument("--mode", choices=("single", "full"), default="full")
    tr.add_argument("--pair-index", type=int, nargs=2, default=(0, 0), metavar=("I", "J"),
                    help="frame pairs (z, z') and (zeta, zeta') used in single mode")

    rc = sub.add_parser("reconstruct", parents=[common], help="rebuild maps over Theta from transferred pieces")
    rc.add_argument("--morita")
    rc.add_argument("--coeff")

    wt = sub.add_parser("witness", parents=[common], help="validate and optionally transfer witnesses")
    wt.add_argument("--witness")
    wt.add_argument("--morita", help="also transfer across this Morita pair")

    gl = sub.add_parser("gallery", help="write a worked-example bundle")
    gl.add_argument("name", help=", ".join(GALLERY_NAMES))
    gl.add_argument("out_dir", nargs="?", default=".", type=Path)
    return p


COMMANDS = {"validate": cmd_validate, "pd-check": cmd_pd_check, "sup-norm": cmd_sup_norm,
            "transfer": cmd_transfer, "reconstruct": cmd_reconstruct, "witness": cmd_witness}


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if args.command == "gallery":
            path = gallery(args.name, args.out_dir)
            print(f"gallery {args.name}: wrote {path}")
            return 0
        if getattr(args, "samples", 1) < 1:
            raise InputError("--samples must be at least 1")
        if not args.tol > 0:
            raise InputError("--tol must be positive")
        b = bio.parse_bundle(*args.files)
        report = COMMANDS[args.command](args, b)
        return report.emit(args.output)
    except (InputError, ShapeMismatch) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except CheckFailed as exc:
        print(f"FAIL {type(exc).__name__}: {exc}")
        return 1


def main(argv=None) -> int:
    sys.exit(run_command(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
