"""Command-line front end.

Subcommands: resonances, verify, delta, geodesics, periodfn, zeta-eval.
Every run writes its delimited output (CSV or JSON) next to a manifest
JSON recording the schema version, all cutoffs and the seed, and by
default renders a matplotlib figure alongside.  Identical invocations
with the same seed produce byte-identical CSV/JSON.  The environment
variable RESONANCE_LAB_THREADS caps internal parallelism.

Exit codes: 0 success, 1 configuration error, 2 flagged results.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def thread_count() -> int:
    env = os.environ.get("RESONANCE_LAB_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _manifest(args, command, outputs, extra=None):
    man = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "lam": args.lam,
        "seed": args.seed,
        "threads": thread_count(),
        # names relative to the run directory keep manifests byte-stable
        "outputs": [Path(o).name for o in outputs],
    }
    for key in ("degree", "max_n", "max_exp", "k_max", "grid", "samples"):
        if hasattr(args, key.replace("-", "_")):
            man[key] = getattr(args, key.replace("-", "_"))
    if extra:
        man.update(extra)
    return man


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _common(p):
    p.add_argument("--lambda", dest="lam", type=float, required=True,
                   help="group parameter, must be > 2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--unsafe", action="store_true",
                   help="lift the Re s guard rails")


def _parse_range(text):
    lo, hi = text.split(":")
    return float(lo), float(hi)


def build_parser():
    ap = argparse.ArgumentParser(prog="resonance-lab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resonances", help="determinant zeros in a rectangle")
    _common(p)
    p.add_argument("--re", type=_parse_range, required=True, metavar="LO:HI")
    p.add_argument("--im", type=_parse_range, required=True, metavar="LO:HI")
    p.add_argument("--degree", type=int, default=32, help="matrix truncation N")
    p.add_argument("--grid", default="40x12")

    p = sub.add_parser("verify", help="run invariant suites")
    _common(p)
    p.add_argument("--suite", default="all",
                   choices=["operators", "cocycles", "flow", "green", "all"])

    p = sub.add_parser("delta", help="leading resonance, two pipelines")
    _common(p)
    p.add_argument("--degree", type=int, default=32)
    p.add_argument("--cutoff", type=int, default=400,
                   help="direct branch cutoff of the pressure oracle")

    p = sub.add_parser("geodesics", help="export the length spectrum")
    _common(p)
    p.add_argument("--max-n", dest="max_n", type=int, default=4)
    p.add_argument("--max-exp", dest="max_exp", type=int, default=5)

    p = sub.add_parser("periodfn", help="reconstruct the period function at delta")
    _common(p)
    p.add_argument("--degree", type=int, default=32)
    p.add_argument("--samples", type=int, default=41)

    p = sub.add_parser("zeta-eval", help="determinant vs Euler product at s")
    _common(p)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--degree", type=int, default=32)
    p.add_argument("--max-n", dest="max_n", type=int, default=6)
    p.add_argument("--max-exp", dest="max_exp", type=int, default=30)
    p.add_argument("--k-max", dest="k_max", type=int, default=40)
    return ap


def _validate(args) -> str | None:
    if not args.lam > 2.0:
        return f"--lambda must be > 2 (infinite covolume), got {args.lam}"
    s = getattr(args, "s", None)
    if s is not None and not args.unsafe and not (0.2 <= s <= 3.0):
        return f"--s outside the guarded strip [0.2, 3]; pass --unsafe to force"
    re = getattr(args, "re", None)
    if re is not None and not args.unsafe:
        if re[0] < 0.2 or re[1] > 3.0:
            return "--re outside the guarded strip [0.2, 3]; pass --unsafe to force"
    return None


def cmd_resonances(args) -> int:
    from . import plots
    from .zeta import export_resonances, find_resonances

    nre, nim = (int(v) for v in args.grid.split("x"))
    search = find_resonances(
        args.lam, args.re, args.im, grid=(nre, nim), N=args.degree,
        workers=thread_count(),
    )
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / "resonances.csv"
    export_resonances(search, csv_path)
    outputs = [str(csv_path)]
    if not args.no_plot:
        png = args.out / "resonances.png"
        plots.plot_resonances(search, args.re, args.im, png)
        outputs.append(str(png))
    man = _manifest(args, "resonances", outputs, {
        "re": list(args.re), "im": list(args.im),
        "stability_bump": 8,
        "flagged": [list(map(str, f)) for f in search.flagged],
        "n_resonances": len(search.resonances),
    })
    _write_json(args.out / "resonances_manifest.json", man)
    for r in search.resonances:
        print(f"zero s = {r.s.real:.10f} {r.s.imag:+.2e}i  parity={r.parity} "
              f"gap={r.stability_gap:.1e}")
    if search.flagged:
        print(f"flagged: {search.flagged}", file=sys.stderr)
        return 2
    return 0


def cmd_verify(args) -> int:
    from .verify import SUITES, run_suites

    names = list(SUITES) if args.suite == "all" else [args.suite]
    report = run_suites(names, args.lam, seed=args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"verify_{args.suite}.json"
    _write_json(path, report)
    for name, suite in report["suites"].items():
        for c in suite["checks"]:
            status = "PASS" if c["pass"] else "FAIL"
            print(f"[{name}] {c['name']:34s} {c['residual']:.3e} "
                  f"{c['direction']} {c['threshold']:.1e}  {status}")
    print("overall:", "PASS" if report["pass"] else "FAIL")
    return 0 if report["pass"] else 2


def cmd_delta(args) -> int:
    from . import plots
    from .flow import pressure_delta
    from .zeta import delta_bisection

    d_mat = delta_bisection(args.lam, N=args.degree)
    d_pre = pressure_delta(args.lam, k_cutoff=args.cutoff)
    gap = abs(d_mat - d_pre)
    args.out.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "lam": args.lam,
        "delta_matrix": d_mat,
        "delta_pressure": d_pre,
        "gap": gap,
        "degree": args.degree,
        "cutoff": args.cutoff,
    }
    path = args.out / "delta.json"
    _write_json(path, payload)
    outputs = [str(path)]
    if not args.no_plot:
        png = args.out / "delta.png"
        plots.plot_delta(args.lam, args.degree, d_mat, png)
        outputs.append(str(png))
    _write_json(args.out / "delta_manifest.json",
                _manifest(args, "delta", outputs, {"cutoff": args.cutoff}))
    print(f"delta_matrix   = {d_mat:.12f}")
    print(f"delta_pressure = {d_pre:.12f}")
    print(f"gap            = {gap:.3e}")
    return 0


def cmd_geodesics(args) -> int:
    from . import plots
    from .moebius import enumerate_classes, export_length_spectrum

    classes = enumerate_classes(args.lam, args.max_n, args.max_exp)
    args.out.mkdir(parents=True, exist_ok=True)
    csv_path = args.out / "geodesics.csv"
    export_length_spectrum(classes, csv_path)
    outputs = [str(csv_path)]
    if not args.no_plot:
        png = args.out / "geodesics.png"
        plots.plot_length_spectrum(classes, png)
        outputs.append(str(png))
    _write_json(args.out / "geodesics_manifest.json",
                _manifest(args, "geodesics", outputs,
                          {"n_classes": len(classes)}))
    print(f"{len(classes)} classes; shortest length "
          f"{classes[0].length:.7f} ({classes[0].exponents})")
    return 0


def cmd_periodfn(args) -> int:
    from . import plots
    from .periods import classify_period, perron_eigenvector, reconstruct_period
    from .zeta import delta_bisection

    d = delta_bisection(args.lam, N=args.degree)
    h = perron_eigenvector(d, args.lam, args.degree)
    pf = reconstruct_period(d, args.lam, h, probes=20)
    kind, parity = classify_period(pf)
    args.out.mkdir(parents=True, exist_ok=True)
    xs1 = np.linspace(-0.9, 3.0, args.samples)
    xs2 = -xs1
    v1 = np.array([pf.f1(float(x)) for x in xs1])
    v2 = np.array([pf.f2(float(x)) for x in xs2])
    csv_path = args.out / "periodfn.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "re_f1", "im_f1", "x2", "re_f2", "im_f2"])
        for a, b, c, d2 in zip(xs1, v1, xs2, v2):
            w.writerow([f"{a:.12e}", f"{b.real:.12e}", f"{b.imag:.12e}",
                        f"{c:.12e}", f"{d2.real:.12e}", f"{d2.imag:.12e}"])
    outputs = [str(csv_path)]
    if not args.no_plot:
        png = args.out / "periodfn.png"
        plots.plot_period_function(xs1, v1, xs2, v2, png)
        outputs.append(str(png))
    _write_json(args.out / "periodfn_manifest.json", _manifest(
        args, "periodfn", outputs, {
            "delta": d,
            "classification": kind,
            "parity": parity,
            "slow_residual": pf.slow_residual,
            "fast_residual": pf.fast_residual,
            "cuspidal_value": [pf.cuspidal_value.real, pf.cuspidal_value.imag],
        }))
    print(f"delta = {d:.10f}; classification: {kind} / {parity}; "
          f"slow residual {pf.slow_residual:.2e}")
    return 0


def cmd_zeta_eval(args) -> int:
    from . import plots
    from .zeta import euler_product, fredholm_det

    det = fredholm_det(args.s, args.lam, args.degree)
    det_hi = fredholm_det(args.s, args.lam, args.degree + 8)
    eu = euler_product(args.s, args.lam, args.max_n, args.max_exp, args.k_max)
    gap = abs(det - eu.value)
    args.out.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "lam": args.lam,
        "s": args.s,
        "det": [det.real, det.imag],
        "det_stability_gap": abs(det - det_hi),
        "euler": [eu.value.real, eu.value.imag],
        "gap": gap,
        "euler_tail_bound": eu.tail_bound,
        "classes_used": eu.classes_used,
    }
    path = args.out / "zeta_eval.json"
    _write_json(path, payload)
    outputs = [str(path)]
    if not args.no_plot:
        png = args.out / "zeta_eval.png"
        plots.plot_det_profile(args.lam, args.degree, png)
        outputs.append(str(png))
    _write_json(args.out / "zeta_eval_manifest.json",
                _manifest(args, "zeta-eval", outputs, {"s": args.s}))
    print(f"det   = {det:.12f}")
    print(f"euler = {eu.value:.12f}")
    print(f"gap   = {gap:.3e}")
    return 0


COMMANDS = {
    "resonances": cmd_resonances,
    "verify": cmd_verify,
    "delta": cmd_delta,
    "geodesics": cmd_geodesics,
    "periodfn": cmd_periodfn,
    "zeta-eval": cmd_zeta_eval,
}


def _join_range_flags(argv):
    """Glue `--re LO:HI` into `--re=LO:HI` so negative bounds parse."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--re", "--im") and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = _join_range_flags(sys.argv[1:] if argv is None else list(argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    problem = _validate(args)
    if problem is not None:
        print(f"error: {problem}", file=sys.stderr)
        return 1
    np.random.seed(args.seed)  # legacy global state, kept pinned for determinism
    try:
        return COMMANDS[args.command](args)
    except Exception as exc:  # config/runtime failures surface as exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
