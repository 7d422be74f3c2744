"""Spatiotemporal robustness envelopes for STL specifications.

Exit codes: 0 = satisfied / checks passed, 2 = specification violated,
1 = any error (including a failed oracle check).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

from . import casestudy, oracle
from .envelope import Envelope, format_value, read_csv_unchecked, write_csv
from .errors import BudgetExceeded, StrobustError
from .formula import pretty_print
from .formula_monitor import binding_table, explain_result, run_monitor
from .parser import parse_spec
from .predicate_monitor import MonitorConfig
from .signal import Padding, load_csv

log = logging.getLogger("strobust")

EXIT_OK, EXIT_ERROR, EXIT_VIOLATED = 0, 1, 2


def _env_json(env: Envelope):
    return [v if v != math.inf else "inf" for v in env.dx]


def _write_json(path, doc):
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _load(args):
    sig = load_csv(args.signal).with_padding(Padding(args.padding))
    try:
        text = Path(args.spec).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read spec file {args.spec}: {exc.strerror}") from exc
    root = parse_spec(text, sig.n, source=str(args.spec))
    t = sig.t_lo if args.t is None else args.t
    return sig, root, t


def _config(args, **over):
    kw = dict(dt_max=args.dtmax, norm=args.norm, naive=args.naive, jobs=args.jobs)
    kw.update(over)
    return MonitorConfig(**kw)


def _report(args, root, res, named, elapsed):
    doc = {
        "spec_hash": hashlib.sha256(pretty_print(root).encode()).hexdigest(),
        "t": res.t,
        "dt_max": args.dtmax,
        "effective_dt_max": res.dt_max,
        "norm": args.norm,
        "padding": args.padding,
        "root_envelope": _env_json(res.envelope),
        "subformulas": {name: {"t": at, "envelope": _env_json(env)}
                        for name, (at, env) in named.items() if name != "root"},
        "violated": res.envelope.violated,
        "notices": res.notices,
    }
    if args.timing:
        doc["timing_ms"] = {**res.timing_ms, "total": round(elapsed * 1e3, 3)}
    return doc


def _run(args):
    sig, root, t = _load(args)
    start = time.perf_counter()
    res = run_monitor(root, sig, t, _config(args))
    named = explain_result(res, root)
    elapsed = time.perf_counter() - start
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(res.envelope, out / "envelope.csv")
    _write_json(out / "report.json", _report(args, root, res, named, elapsed))
    return root, res, named, out


def cmd_monitor(args) -> int:
    _, res, _, out = _run(args)
    log.info("wrote %s", out / "envelope.csv")
    print(f"envelope: {len(res.envelope)} levels"
          + (" (violated)" if res.envelope.violated else f", dx(0) = {format_value(res.envelope[0])}"))
    return EXIT_VIOLATED if res.envelope.violated else EXIT_OK


def cmd_explain(args) -> int:
    _, res, named, out = _run(args)
    envs = {}
    for name, (_, env) in named.items():
        if name != "root":
            write_csv(env, out / f"{name}.csv")
            envs[name] = env
    lines = ["dt,binding,dx,status"]
    for dt, name, dx, status in binding_table(envs, res.envelope, res.dt_max):
        lines.append(f"{dt},{name},{'' if dx is None else format_value(dx)},{status}")
    (out / "binding.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for line in lines[1:]:
        log.debug(line)
    print(f"subformulas: {', '.join(envs) or '(none)'}; binding table in {out / 'binding.csv'}")
    return EXIT_VIOLATED if res.envelope.violated else EXIT_OK


def cmd_generate(args) -> int:
    case = casestudy.CASES[args.case]()
    casestudy.write_case(case, args.out)
    print(f"wrote {args.case} case to {args.out}")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    verdict = {"passed": False, "checks": {}}
    try:
        sig, root, t = _load(args)
        oracle.check_budget(sig, args.dtmax, args.step, args.cap)
        if args.envelope:
            dx = read_csv_unchecked(args.envelope)
            source = str(args.envelope)
        else:
            res = run_monitor(root, sig, t, _config(args))
            if res.dt_max < args.dtmax:
                raise StrobustError("; ".join(res.notices))
            dx = list(res.envelope.dx)
            source = "monitor"
        points = oracle.brute_force_str(root, sig, t, args.dtmax, args.step, args.cap, args.norm)
        bad = oracle.dominance_failures(dx, points, args.step, args.cap)
        qual = oracle.qualitative(root, sig, t)
        verdict["envelope_source"] = source
        verdict["oracle_points"] = [[p.dx, p.dt] for p in points]
        verdict["checks"]["dominance"] = {
            "passed": not bad,
            "first_violation": None if not bad else {
                "monitor": [bad[0][0].dx if bad[0][0].dx != math.inf else "inf", bad[0][0].dt],
                "snapped": [bad[0][1].dx, bad[0][1].dt]},
        }
        verdict["checks"]["soundness"] = {
            "passed": (len(dx) > 0) == qual, "qualitative": qual, "nonempty": len(dx) > 0}
        verdict["passed"] = all(c["passed"] for c in verdict["checks"].values())
    except BudgetExceeded as exc:
        verdict["budget"] = {"error": str(exc), "max_dim": oracle.MAX_DIM,
                             "max_len": oracle.MAX_LEN, "max_dt": oracle.MAX_DT,
                             "min_step": oracle.MIN_STEP}
        _write_json(out / "verdict.json", verdict)
        raise
    _write_json(out / "verdict.json", verdict)
    if not verdict["passed"]:
        fv = verdict["checks"]["dominance"]["first_violation"]
        if fv:
            print(f"dominance check failed at (dx, dt) = ({fv['monitor'][0]}, {fv['monitor'][1]})",
                  file=sys.stderr)
        if not verdict["checks"]["soundness"]["passed"]:
            print("soundness check failed: envelope emptiness disagrees with the Boolean verdict",
                  file=sys.stderr)
        return EXIT_ERROR
    print("oracle checks passed")
    return EXIT_OK


def _common(p, dtmax_default=50, norm_default="l2", padding_default="strict"):
    p.add_argument("--signal", required=True, help="signal CSV (t,x1,...,xn)")
    p.add_argument("--spec", required=True, help="spec file")
    p.add_argument("--t", type=int, default=None, help="evaluation time (default: first sample)")
    p.add_argument("--dtmax", type=int, default=dtmax_default, help="largest temporal level")
    p.add_argument("--norm", choices=["l2", "linf"], default=norm_default)
    p.add_argument("--padding", choices=["strict", "clamp"], default=padding_default)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.add_argument("--naive", action="store_true", help="use the reference inner loops")


def build_parser():
    ap = argparse.ArgumentParser(prog="strobust", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monitor", help="compute the robustness envelope")
    _common(p)
    p.add_argument("--timing", action="store_true", help="record timings in report.json")
    p.set_defaults(func=cmd_monitor)

    p = sub.add_parser("explain", help="envelopes of named subformulas and the binding one")
    _common(p)
    p.add_argument("--timing", action="store_true", help="record timings in report.json")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("generate", help="write a synthetic case study")
    p.add_argument("case", choices=sorted(casestudy.CASES))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("oracle-check", help="check the monitor against brute force")
    _common(p, dtmax_default=2, norm_default="linf")
    p.add_argument("--step", type=float, default=0.25, help="grid step for dx")
    p.add_argument("--cap", type=float, default=4.0, help="largest dx on the grid")
    p.add_argument("--envelope", default=None, help="verify this envelope CSV instead")
    p.set_defaults(func=cmd_oracle_check)
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("STR_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StrobustError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
