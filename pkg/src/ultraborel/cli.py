"""Command-line front end.

Exit codes: 0 holds (or success), 1 fails, 2 usage or input error, 3 undetermined.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .reports import ConditionReport, Verdict

EXIT = {Verdict.HOLDS: 0, Verdict.FAILS: 1, Verdict.UNDETERMINED: 3}
EXIT_USAGE = 2


@dataclass
class RunManifest:
    command_line: list
    parameters: dict
    horizons: dict = field(default_factory=dict)
    grid_sizes: dict = field(default_factory=dict)
    tool_version: str = __version__
    wall_clock: str = ""

    def to_dict(self) -> dict:
        return {"command_line": self.command_line, "parameters": self.parameters, "horizons": self.horizons,
                "grid_sizes": self.grid_sizes, "tool_version": self.tool_version, "wall_clock": self.wall_clock}


def _wall_clock() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp so reruns are byte-identical
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch is not None else time.time()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(t))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Verdict):
        return obj.value
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(payload) -> str:
    return json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"


class Context:
    """Collects the manifest and writes outputs for one invocation."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        params = {k: v for k, v in vars(args).items() if k != "func"}
        self.manifest = RunManifest(["ultraborel", *argv], params, wall_clock=_wall_clock())

    def emit(self, payload: dict, text: str | None = None):
        payload = dict(payload)
        payload["manifest"] = self.manifest.to_dict()
        out = dumps(payload)
        if self.args.out and not getattr(self.args, "_csv", False):
            Path(self.args.out).write_text(out)
        elif self.args.json or text is None:
            sys.stdout.write(out)
        else:
            print(text)

    def emit_csv(self, header, rows, sidecar: dict):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
        sidecar = dict(sidecar)
        sidecar["manifest"] = self.manifest.to_dict()
        if self.args.out:
            path = Path(self.args.out)
            path.write_text(buf.getvalue())
            path.with_suffix(".json").write_text(dumps(sidecar))
        else:
            sys.stdout.write(buf.getvalue())
            if self.args.json:
                sys.stderr.write(dumps(sidecar))


def _r(a) -> float:
    return 1.0 if a.r is None else float(a.r)


def _int_r(a) -> int:
    r = _r(a)
    if r != int(r) or r < 1:
        raise ValueError("--r must be a positive integer here")
    return int(r)


def _seq(spec: str):
    from .weights import make_sequence
    return make_sequence(spec)


# ---------------------------------------------------------------- commands

def cmd_analyze(ctx: Context) -> int:
    from .conditions import check_beta1, check_gamma_r, lower_order, nq_sum
    from .weights import check_dc, check_mg, is_log_convex

    a = ctx.args
    M = _seq(a.spec)
    H = a.horizon
    ctx.manifest.horizons["M"] = H
    bundle = {"sequence": M.label, "lc": is_log_convex(M, H).to_dict(), "mg": check_mg(M, H).to_dict(),
              "dc": check_dc(M, H).to_dict()}
    bundle["nq"] = {str(r): nq_sum(M, r, H).to_report(f"nq_{r}").to_dict() for r in (1, 2, 3)}
    try:
        lo = lower_order(M, max(H, 100))
        bundle["lower_order"] = {"omega": lo.omega, "lambda": lo.lam, "infinite": lo.infinite,
                                 "envelope_limit": lo.envelope_limit}
    except ValueError as e:
        bundle["lower_order"] = {"error": str(e)}
    bundle["beta1"] = check_beta1(M, horizon=H).to_dict()
    bundle["gamma"] = {str(r): check_gamma_r(M, M, r, H).to_dict() for r in (1, 2, 3)}
    lines = [f"{M.label} (horizon {H})"]
    for k in ("lc", "mg", "dc", "beta1"):
        lines.append(f"  {k:6s} {bundle[k]['verdict']}")
    for r in (1, 2, 3):
        lines.append(f"  nq_{r}   {bundle['nq'][str(r)]['verdict']}")
        lines.append(f"  gamma_{r} {bundle['gamma'][str(r)]['verdict']}")
    lo = bundle["lower_order"]
    if "error" in lo:
        lines.append(f"  omega  n/a ({lo['error']})")
    else:
        lines.append(f"  omega  {'inf' if lo['infinite'] else lo['envelope_limit'] or lo['omega']}")
    ctx.emit(bundle, "\n".join(lines))
    return 0


def _run_check(name: str, a) -> ConditionReport:
    from .assoc import check_integral_condition
    from .conditions import check_beta1, check_gamma_r, check_SV_r, is_quasianalytic, nq_sum
    from .weights import check_dc, check_mg, is_log_convex

    M = _seq(a.M)
    N = _seq(a.N) if a.N else M
    r, H = _r(a), a.horizon
    if name == "lc":
        return is_log_convex(M, H)
    if name == "mg":
        return check_mg(M, H)
    if name == "dc":
        return check_dc(M, H)
    if name == "nq":
        return nq_sum(M, r, H).to_report("nq")
    if name == "beta1":
        return check_beta1(M, horizon=H)
    if name == "gamma_r":
        return check_gamma_r(M, N, r, H)
    if name == "sv_r":
        return check_SV_r(M, N, r, a.s_max, H)
    if name == "integral":
        return check_integral_condition(M, N, r).report
    if name == "quasianalytic":
        if int(r) != r:
            raise ValueError("quasianalytic needs an integer --r")
        return is_quasianalytic(M, int(r), H)
    raise ValueError(f"unknown condition {name}")


def cmd_check(ctx: Context) -> int:
    a = ctx.args
    ctx.manifest.horizons["M"] = a.horizon
    rep = _run_check(a.condition, a)
    d = rep.to_dict()
    d["diagnostics"] = rep.diagnostics
    ctx.emit({"report": d}, f"{a.condition}: {rep.verdict.value} (sup {d['sup_value']}, "
                            f"witness p = {rep.witness_p}, horizon {rep.horizon})")
    return EXIT[rep.verdict]


def cmd_interpolate(ctx: Context) -> int:
    from .ramify import interpolate

    a = ctx.args
    r = _int_r(a)
    P = interpolate(_seq(a.spec), r)
    n = P.available(a.n)
    v = P.log_values(n)
    ctx.args._csv = True
    ctx.emit_csv(["p", "logM"], ((p, float(v[p])) for p in range(n + 1)),
                 {"sequence": P.label, "n": n})
    return 0


def cmd_assoc(ctx: Context) -> int:
    from .assoc import integral_identity_check, omega, sigma

    a = ctx.args
    M = _seq(a.spec)
    rows = []
    for t in np.geomspace(a.t_min, a.t_max, a.points):
        ev = omega(M, float(t))
        _, _, err = integral_identity_check(M, float(t))
        rows.append((float(t), ev.omega, sigma(M, float(t)), err))
    ctx.args._csv = True
    ctx.emit_csv(["t", "omega", "sigma", "integral_check_err"], rows, {"sequence": M.label})
    return 0


def _grid_m(a) -> int:
    g = int(a.grid)
    m = g.bit_length() - 1
    if g < 2 or (1 << m) != g:
        raise ValueError("--grid must be a power of two")
    return m


def _function_csv(ctx, f, sidecar):
    x = f.grid.x
    s = f.samples
    keep = np.abs(x) <= f.grid.L
    ctx.args._csv = True
    ctx.emit_csv(["x", "re_f", "im_f"], zip(x[keep].tolist(), s.real[keep].tolist(), s.imag[keep].tolist()),
                 sidecar)


def cmd_bump(ctx: Context) -> int:
    from .ramify import interpolate
    from .synth import build_bump

    a = ctx.args
    M = _seq(a.spec)
    r = _int_r(a)
    if r > 1:
        M = interpolate(M, r)
    m = _grid_m(a)
    ctx.manifest.grid_sizes["bump"] = 1 << m
    b = build_bump(M, K=a.K, grid_m=m, orders=a.orders)
    side = {"sequence": M.label, "K": a.K, "grid": 1 << m, "L": b.f.grid.L, "phi0": b.value_at_zero,
            "min": b.min_value, "max": b.max_value, "support_radius": b.support_radius,
            "support_from_mass": b.support_from_mass, "mass_u": b.mass_u, "bound_ledger": b.ledger}
    _function_csv(ctx, b.f, side)
    return 0


def cmd_extend(ctx: Context) -> int:
    from .jets import JetSpec
    from .synth import ExtensionOperator

    a = ctx.args
    jet = JetSpec.load(a.jet)
    M = _seq(a.M)
    N = _seq(a.N) if a.N else M
    r = jet.r if a.r is None else _int_r(a)
    m = _grid_m(a)
    ctx.manifest.grid_sizes["extend"] = 1 << m
    ctx.manifest.horizons["assumptions"] = a.horizon
    if jet.r != r:
        jet = JetSpec(jet.coeffs, r, jet.flavor, jet.envelope)
    op = ExtensionOperator(M, N, r, a.c, m, order=max(jet.order, 0), horizon=a.horizon, s_max=a.s_max)
    res = op.apply(jet)
    _function_csv(ctx, res.f, res.sidecar())
    return 0


def cmd_jets(ctx: Context) -> int:
    from .jets import JetSpec, classify

    a = ctx.args
    jet = JetSpec.load(a.jet)
    M = _seq(a.M)
    hs = [float(h) for h in a.h_grid.split(",")]
    c = classify(jet, M, hs, a.horizon)
    ctx.emit({"kind": c.kind, "h_star": c.h_star, "seminorms": c.seminorms},
             f"{c.kind}" + (f" (h* = {c.h_star:g})" if c.h_star is not None else ""))
    return 0


def cmd_accept(ctx: Context) -> int:
    from .acceptance import run_acceptance

    a = ctx.args
    echo = None if a.json else print
    results = run_acceptance(quick=a.quick, echo=echo)
    ok = all(r.passed for r in results)
    payload = {"quick": a.quick, "passed": ok, "criteria": [r.to_dict() for r in results]}
    if a.json or a.out:
        ctx.emit(payload, None)
    if echo is not None:
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if ok else 1


# ---------------------------------------------------------------- parser

CONDITIONS = ("lc", "mg", "dc", "nq", "beta1", "gamma_r", "sv_r", "integral", "quasianalytic")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--horizon", type=int, default=10_000, help="number of sequence terms examined")
    common.add_argument("--json", action="store_true", help="emit JSON (with manifest) on stdout")
    common.add_argument("--out", help="write the output to this path (CSV commands add a .json sidecar)")
    common.add_argument("--grid", type=int, default=1 << 18, help="grid points for synthesis, a power of two")
    common.add_argument("--r", type=float, default=None, help="ramification parameter (default 1)")
    common.add_argument("--s-max", type=int, default=32, help="cap for the s search in sv_r")
    common.add_argument("--quick", action="store_true", help="reduced acceptance subset")

    p = argparse.ArgumentParser(prog="ultraborel", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", parents=[common], help="run the standard condition bundle on a sequence")
    s.add_argument("spec")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("check", parents=[common], help="decide one condition")
    s.add_argument("condition", choices=CONDITIONS)
    s.add_argument("--M", required=True, help="sequence spec")
    s.add_argument("--N", help="second sequence spec (defaults to M)")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("interpolate", parents=[common], help="CSV p,logM of the r-interpolating sequence")
    s.add_argument("spec")
    s.add_argument("--n", type=int, default=100, help="last index written")
    s.set_defaults(func=cmd_interpolate)

    s = sub.add_parser("assoc", parents=[common], help="CSV t,omega,sigma,integral_check_err")
    s.add_argument("spec")
    s.add_argument("--t-min", type=float, default=1.5)
    s.add_argument("--t-max", type=float, default=1e3)
    s.add_argument("--points", type=int, default=20)
    s.set_defaults(func=cmd_assoc)

    s = sub.add_parser("bump", parents=[common], help="CSV x,re_f,im_f of a box bump plus JSON sidecar")
    s.add_argument("spec")
    s.add_argument("--K", type=int, default=50, help="number of box factors")
    s.add_argument("--orders", type=int, default=8, help="highest derivative order in the ledger")
    s.set_defaults(func=cmd_bump)

    s = sub.add_parser("extend", parents=[common], help="CSV of the extension of a jet plus JSON sidecar")
    s.add_argument("--jet", required=True, help="jet JSON file")
    s.add_argument("--M", required=True)
    s.add_argument("--N")
    s.add_argument("--c", type=int, default=1)
    s.set_defaults(func=cmd_extend)

    s = sub.add_parser("jets", parents=[common], help="jet utilities")
    jsub = s.add_subparsers(dest="jets_command", required=True)
    j = jsub.add_parser("classify", parents=[common], help="Roumieu/Beurling classification of a jet")
    j.add_argument("--jet", required=True)
    j.add_argument("--M", required=True)
    j.add_argument("--h-grid", default="1,2,4")
    j.set_defaults(func=cmd_jets)

    s = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    s.set_defaults(func=cmd_accept)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    ctx = Context(args, argv)
    try:
        return args.func(ctx)
    except (ValueError, IndexError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as e:
        # synthesis refused (e.g. SV_r fails): a negative answer, not a usage error
        print(f"error: {e}", file=sys.stderr)
        return EXIT[Verdict.FAILS]


if __name__ == "__main__":
    sys.exit(main())
