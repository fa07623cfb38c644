"""Command line entry point: ``osva {validate,solve,verify,axioms,geometry}``.

Every command writes a report bundle (text or JSON) to ``--output``, or to
``$OSVA_REPORT_DIR/<command>.<ext>`` when that variable is set, or to stdout.
Exit codes: 0 all checks passed, 1 some check failed, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .report import CheckReport, Witness

REPORT_DIR_ENV = "OSVA_REPORT_DIR"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: dict = field(default_factory=dict)
    cutoff: int = 8
    tolerance: float = 1e-4
    seed: int = 0
    output: str | None = None
    format: str = "structured"
    timings: bool = False

    def __post_init__(self):
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.cutoff < 2:
            raise UsageError("cutoff must be at least 2")
        if self.format not in ("text", "structured"):
            raise UsageError("format must be 'text' or 'structured'")

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": dict(sorted(self.inputs.items())),
            "cutoff": self.cutoff,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "format": self.format,
        }


@dataclass
class ReportBundle:
    version: str
    config: dict
    reports: list = field(default_factory=list)
    times: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_json(self) -> dict:
        out = {
            "tool_version": self.version,
            "config": self.config,
            "overall_pass": self.passed,
            "reports": [r.to_json() for r in self.reports],
        }
        if self.times:
            out["wall_time_s"] = self.times
        if self.extra:
            out.update(self.extra)
        return out

    @classmethod
    def from_json(cls, obj) -> "ReportBundle":
        reps = []
        for r in obj.get("reports", []):
            rep = CheckReport(
                r["name"],
                residual=_float(r["residual"]),
                tolerance=_float(r["tolerance"]),
                witnesses=[Witness(w["input"], w["expected"], w["got"]) for w in r.get("witnesses", [])],
                details=r.get("details", {}),
                passed=r["passed"],
            )
            reps.append(rep)
        extra = {k: v for k, v in obj.items()
                 if k not in ("tool_version", "config", "overall_pass", "reports", "wall_time_s")}
        return cls(obj["tool_version"], obj["config"], reps, obj.get("wall_time_s", {}), extra)


def _float(x):
    return float(x) if isinstance(x, str) else x


def render(bundle: ReportBundle, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(bundle.to_json(), indent=2, sort_keys=True) + "\n"
    lines = [f"osva {bundle.version} {bundle.config.get('command', '')}"]
    for r in bundle.reports:
        line = str(r)
        if r.name in bundle.times:
            line += f" ({bundle.times[r.name]:.3f}s)"
        lines.append(line)
        for w in r.witnesses[:3]:
            lines.append(f"    witness {w.input}: expected {w.expected}, got {w.got}")
    lines.append(f"overall: {'PASS' if bundle.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def emit_report(bundle: ReportBundle, fmt: str = "structured", path=None) -> str:
    """Serialize deterministically; write to ``path`` if given and return the text."""
    text = render(bundle, fmt)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_report(text: str) -> ReportBundle:
    return ReportBundle.from_json(json.loads(text))


# ---------------------------------------------------------------------------
# inputs


def _fusion_data(args):
    from .fusion import ising_builtin, load_fusion_data

    if args.builtin:
        if args.builtin != "ising":
            raise UsageError(f"unknown builtin dataset {args.builtin!r}")
        return ising_builtin()
    if args.data:
        return load_fusion_data(Path(args.data).read_text(encoding="utf-8"))
    raise UsageError("give --builtin ising or --data FILE")


def _assoc_from(name: str):
    """``m2`` / ``scalars`` or a JSON table file.

    File format: ``{"labels": [...], "structure_constants": c[i][j][k]}``
    with rational entries as ints or "p/q" strings.
    """
    from .modes import make_assoc_algebra_instance, matrix_algebra_table

    if name == "m2":
        table, labels = matrix_algebra_table(2)
        return make_assoc_algebra_instance(table, 4, labels)
    if name == "scalars":
        return make_assoc_algebra_instance([[[1]]], 1, ["1"])
    doc = json.loads(Path(name).read_text(encoding="utf-8"))
    consts = [[[Fraction(c) for c in row] for row in plane] for plane in doc["structure_constants"]]
    labels = doc.get("labels")
    return make_assoc_algebra_instance(consts, len(consts), labels)


def _instance(name: str, cutoff: int):
    from .modes import make_heisenberg_instance, make_tensor_instance

    if name == "heisenberg":
        return make_heisenberg_instance(cutoff)
    kind, _, rest = name.partition(":")
    if kind == "assoc" and rest:
        return _assoc_from(rest)
    if kind == "tensor" and rest:
        return make_tensor_instance(_assoc_from(rest), make_heisenberg_instance(cutoff))
    raise UsageError(f"unknown instance {name!r}; use heisenberg, assoc:<table> or tensor:<table>")


def random_vector(inst, rng: random.Random, max_weight=2, terms=2) -> dict:
    """Seeded vector on low-weight basis elements with coefficients in {-2, ..., 2}."""
    low = [b for b in inst.space.basis if inst.space.wt(b) <= max_weight]
    out = {}
    for _ in range(terms):
        b = low[rng.randrange(len(low))]
        c = rng.randint(-2, 2)
        out[b] = out.get(b, 0) + Fraction(c)
    out = {k: c for k, c in out.items() if c != 0}
    return out or {low[0]: Fraction(1)}


# ---------------------------------------------------------------------------
# commands


def _timed(bundle, cfg, name_fn):
    t = time.perf_counter()
    rep = name_fn()
    if cfg.timings:
        bundle.times[rep.name] = round(time.perf_counter() - t, 6)
    bundle.reports.append(rep)
    return rep


def cmd_validate(args, cfg, bundle):
    from .fusion import validate_fusing, validate_ring
    from .solver import diagonal_double_check

    data = _fusion_data(args)
    _timed(bundle, cfg, lambda: validate_ring(data.ring))
    _timed(bundle, cfg, lambda: validate_fusing(data))
    _timed(bundle, cfg, lambda: diagonal_double_check(data))


def _parse_dims(text, data):
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --dims {text!r}") from None
    if len(parts) != data.ring.rank:
        raise UsageError(f"--dims needs {data.ring.rank} entries")
    return tuple(parts)


def cmd_solve(args, cfg, bundle):
    from .solver import algebra_to_json, solve_small, verify_algebra

    data = _fusion_data(args)
    dims = _parse_dims(args.dims, data)
    try:
        res = solve_small(data, dims, seed=cfg.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    summary = CheckReport("solve", details={
        "dims": list(dims), "solutions": len(res), "partial": res.partial, "nodes": res.nodes,
        "uncertified_roots": len(res.uncertified_roots),
    })
    if res.partial:
        summary.fail("search", "complete", "partial (budget or unliftable roots)")
    bundle.reports.append(summary)
    for k, alg in enumerate(res):
        rep = verify_algebra(data, alg)
        rep.name = f"verify solution {k}"
        bundle.reports.append(rep)
    sols = {"solutions": [algebra_to_json(data, a) for a in res]}
    bundle.extra["solutions"] = sols["solutions"]
    if args.solutions:
        Path(args.solutions).write_text(json.dumps(sols, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_verify(args, cfg, bundle):
    from .solver import algebra_from_json, verify_algebra

    data = _fusion_data(args)
    doc = json.loads(Path(args.solutions).read_text(encoding="utf-8"))
    sols = doc["solutions"] if isinstance(doc, dict) else doc
    for k, obj in enumerate(sols):
        rep = verify_algebra(data, algebra_from_json(data, obj))
        rep.name = f"verify solution {k}"
        bundle.reports.append(rep)


def cmd_axioms(args, cfg, bundle):
    from .modes import (
        c0_membership,
        check_associativity,
        check_creation,
        check_D_derivative,
        check_d_conjugation,
        check_identity,
        check_virasoro,
        check_weight_property,
    )

    inst = _instance(args.instance, cfg.cutoff)
    rng = random.Random(cfg.seed)
    r1, r2 = args.radii
    samples = [
        tuple(random_vector(inst, rng) for _ in range(4)) + (r1, r2) for _ in range(args.samples)
    ]
    _timed(bundle, cfg, lambda: check_identity(inst))
    _timed(bundle, cfg, lambda: check_creation(inst))
    _timed(bundle, cfg, lambda: check_d_conjugation(inst, 2))
    _timed(bundle, cfg, lambda: check_D_derivative(inst))
    _timed(bundle, cfg, lambda: check_weight_property(inst, 0, 0))
    if inst.has_conformal:
        _timed(bundle, cfg, lambda: check_virasoro(inst, (-3, 3)))
    _timed(bundle, cfg, lambda: c0_membership(inst, inst.vacuum))
    _timed(bundle, cfg, lambda: check_associativity(inst, samples, cfg.tolerance))


def cmd_geometry(args, cfg, bundle):
    from . import geom
    from .modes import pair, vertex_eval
    from .modes.core import vdiff_norm

    inst = _instance(args.instance, cfg.cutoff)
    rng = random.Random(cfg.seed)
    checks = [args.check] if args.check else ["vacuum", "conformal", "sewing", "pr-consistency"]
    for check in checks:
        if check == "vacuum":
            def run():
                rep = CheckReport("geometry: vacuum")
                got = geom.extract_vacuum(inst)
                if got != inst.vacuum:
                    rep.fail("Phi0(0)", inst.vacuum, got)
                return rep
        elif check == "conformal":
            def run():
                rep = CheckReport("geometry: conformal", tolerance=cfg.tolerance)
                if not inst.has_conformal:
                    rep.fail("conformal element", "present", "missing")
                    return rep
                got = geom.extract_conformal(inst, args.eps)
                rep.residual = vdiff_norm(got, inst.conformal)
                rep.passed = rep.residual <= cfg.tolerance
                rep.details = {"eps": args.eps}
                return rep
        elif check == "sewing":
            def run():
                P = lambda r: geom.standard_element("P", r=r)  # noqa: E731
                u, v, w, d = (random_vector(inst, rng) for _ in range(4))
                cases = [
                    (P(1.0), 2, P(0.6), [u, v, w]),
                    (P(1.0), 2, geom.standard_element("scale", a=2), [u, v]),
                    (P(1.0), 1, geom.standard_element("identity"), [u, v]),
                ]
                rep = CheckReport("geometry: sewing", tolerance=cfg.tolerance)
                res = []
                for Q1, i, Q2, vecs in cases:
                    sub = geom.check_sewing_axiom(inst, Q1, i, Q2, vecs, d, cfg.tolerance)
                    res.append(sub.residual)
                    rep.witnesses.extend(sub.witnesses)
                rep.residual = max(res)
                rep.passed = rep.residual <= cfg.tolerance
                rep.details = {"case_residuals": res}
                return rep
        elif check == "pr-consistency":
            def run():
                rep = CheckReport("geometry: P(r) consistency")
                for r in (0.5, 1.0, 1.7):
                    u, v, d = (random_vector(inst, rng) for _ in range(3))
                    a = geom.phi_eval(inst, geom.standard_element("P", r=r), [u, v], d)
                    b = pair(d, vertex_eval(inst, u, r, v))
                    if a != b:
                        rep.fail(f"P({r})", b, a, abs(a - b) or 1.0)
                return rep
        else:
            raise UsageError(f"unknown geometry check {check!r}")
        _timed(bundle, cfg, run)


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "axioms": cmd_axioms,
    "geometry": cmd_geometry,
}


def _radii(text):
    try:
        r1, r2 = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("radii must be 'r1,r2'") from None
    if not (r1 > r2 > r1 - r2 > 0):
        raise argparse.ArgumentTypeError("radii must satisfy r1 > r2 > r1-r2 > 0")
    return r1, r2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="osva", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"osva {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", help="report path ('-' for stdout)")
    common.add_argument("--format", choices=["text", "structured"], default="structured")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-4)
    common.add_argument("--cutoff", type=int, default=8)
    common.add_argument("--timings", action="store_true", help="record wall time per check (not byte-stable)")
    sub = p.add_subparsers(dest="command", required=True)

    def data_args(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--builtin", choices=["ising"])
        g.add_argument("--data", help="fusion-data JSON file")

    sp = sub.add_parser("validate", parents=[common], help="check a fusion ring and fusing matrices")
    data_args(sp)
    sp = sub.add_parser("solve", parents=[common], help="solve for algebra objects")
    data_args(sp)
    sp.add_argument("--dims", required=True, help="multiplicity per sector, e.g. 1,1,0")
    sp.add_argument("--solutions", help="also write the solutions array to this file")
    sp = sub.add_parser("verify", parents=[common], help="verify stored solutions exactly")
    data_args(sp)
    sp.add_argument("--solutions", required=True)
    sp = sub.add_parser("axioms", parents=[common], help="run the axiom suite on an instance")
    sp.add_argument("--instance", default="heisenberg")
    sp.add_argument("--samples", type=int, default=4)
    sp.add_argument("--radii", type=_radii, default=(1.0, 0.6))
    sp = sub.add_parser("geometry", parents=[common], help="geometric checks")
    sp.add_argument("--instance", default="heisenberg")
    sp.add_argument("--check", choices=["vacuum", "conformal", "sewing", "pr-consistency"])
    sp.add_argument("--eps", type=float, default=1e-4)
    return p


def _default_output(command, fmt):
    d = os.environ.get(REPORT_DIR_ENV)
    if not d:
        return None
    return str(Path(d) / f"{command}.{'json' if fmt == 'structured' else 'txt'}")


def run(config: RunConfig, args) -> tuple[ReportBundle, int]:
    bundle = ReportBundle(__version__, config.to_json())
    COMMANDS[config.command](args, config, bundle)
    return bundle, 0 if bundle.passed else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    inputs = {k: v for k, v in vars(args).items()
              if k in ("builtin", "data", "dims", "solutions", "instance", "samples", "check", "eps")
              and v is not None}
    if "radii" in vars(args):
        inputs["radii"] = list(args.radii)
    try:
        cfg = RunConfig(args.command, inputs, args.cutoff, args.tol, args.seed,
                        args.output or _default_output(args.command, args.format), args.format, args.timings)
        bundle, code = run(cfg, args)
    except UsageError as exc:
        print(f"osva: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"osva: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    try:
        emit_report(bundle, cfg.format, cfg.output)
    except OSError as exc:
        print(f"osva: error: cannot write report: {exc}", file=sys.stderr)
        return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
