"""``dctx`` command line: validation suites, time sweeps and (t_l, t_r) CHSH scans.

All output is CSV on stdout (or ``--out``); diagnostics go to stderr.
Exit codes: 0 success, 1 failed check, 2 usage error.
"""
import argparse
import io
import os
import sys

import numpy as np

from dctx import evolution as ev
from dctx.errors import DctxError
from dctx.inequalities import (
    CriterionResult,
    chsh_renormalized,
    dynamical_chsh,
    mermin3_decay,
    mp_decay_generic,
    mp_optimal_signs,
    optimal_cycle_signs,
)
from dctx.linalg import is_projector
from dctx.observables import STRANGENESS, bloch_projector, magic_square
from dctx.optimizer import OptimizerConfig, chsh_optimal_settings, kcbs_sweep_points
from dctx.scenarios import STATE_VECTORS, kaon_scenario

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SWEEP_DEFAULTS = {
    "criterion": "kcbs",
    "state": "psi-minus",
    "t_max": 5.0,
    "steps": 200,
    "optimize": "per-time",
    "signs": "optimal",
    "mode": "complex",
    "restarts": 8,
    "seed": None,
    "out": None,
}
SCAN_DEFAULTS = {
    "state": "psi-minus",
    "projector": None,
    "t_max": 5.0,
    "grid": 50,
    "signs": "1,-1,1,-1",
    "form": "product",
    "out": None,
}


class UsageError(Exception):
    pass


def fmt(x):
    return f"{x:.12g}"


def read_config(path, allowed):
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in allowed:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def resolve(args, defaults):
    """Defaults < config file < explicit flags, with types taken from the defaults."""
    cfg = read_config(args.config, defaults) if args.config else {}
    merged = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        value = flag if flag is not None else cfg.get(key, default)
        if isinstance(default, float) and value is not None:
            value = float(value)
        elif isinstance(default, int) and not isinstance(default, bool) and value is not None:
            value = int(value)
        merged[key] = value
    return merged


def resolve_seed(value):
    if value is not None:
        return int(value)
    env = os.environ.get("DCTX_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"DCTX_SEED must be an integer, got {env!r}") from None
    return 0


def time_grid(t_max, steps):
    if t_max < 0:
        raise UsageError("--t-max must be nonnegative")
    if steps < 2:
        raise UsageError("--steps must be >= 2")
    return np.linspace(0.0, t_max, steps)


def write_csv(header, rows, out):
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    text = buf.getvalue()
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _row(t, res, *extra):
    return [fmt(t), fmt(res.surviving_weight), fmt(res.value), fmt(res.classical_bound),
            "true" if res.violated else "false", *extra]


# ---------------------------------------------------------------------------
# sweep


def sweep_rows(opts):
    """Rows (and header) for ``dctx sweep``; split out so tests can call it directly."""
    crit, label = opts["criterion"], opts["state"]
    if label not in STATE_VECTORS:
        raise UsageError(f"unknown state {label!r}")
    if (crit == "mermin3") != (label == "ghz"):
        raise UsageError("mermin3 needs --state ghz, and ghz is only valid with mermin3")
    if opts["signs"] not in ("optimal", "naive"):
        raise UsageError("--signs must be optimal or naive")
    if opts["optimize"] not in ("per-time", "fixed"):
        raise UsageError("--optimize must be per-time or fixed")
    if opts["mode"] not in ("complex", "real"):
        raise UsageError("--mode must be complex or real")
    grid = time_grid(opts["t_max"], opts["steps"])
    sc = kaon_scenario(label)
    p, rho0 = sc.params, sc.initial_state
    header = ["t", "surviving_weight", "value", "classical_bound", "violated"]
    rows = []

    if crit == "kcbs":
        cfg = OptimizerConfig(restarts=opts["restarts"], seed=resolve_seed(opts["seed"]), mode=opts["mode"])
        points = kcbs_sweep_points(rho0, p, grid, cfg, opts["signs"], opts["optimize"])
        header += ["value_naive", "optimizer_mode"]
        rows = [_row(pt.time, pt.result, fmt(pt.naive.value), opts["mode"]) for pt in points]
    elif crit == "mp":
        signs, _ = mp_optimal_signs()
        square = magic_square()
        for t in grid:
            rows.append(_row(t, mp_decay_generic(square, signs, ev.evolve_joint(rho0, p, t))))
    elif crit == "mermin3":
        for t in grid:
            rows.append(_row(t, mermin3_decay(ev.evolve_sectors(rho0, p, (t, t, t)))))
    elif crit == "chsh":
        fixed = None
        for t in grid:
            js = ev.evolve_joint(rho0, p, t)
            if opts["optimize"] == "fixed" and fixed is not None:
                settings = fixed
            else:
                w = js.surviving_weight
                settings, _ = chsh_optimal_settings(js.rho_s / w if w > 0 else rho0)
                fixed = settings
            rows.append(_row(t, chsh_renormalized(settings, js)))
    else:
        raise UsageError(f"unknown criterion {crit!r}")
    return header, rows


# ---------------------------------------------------------------------------
# scan-chsh


def parse_projector(spec):
    spec = spec.strip()
    if spec == "strangeness":
        return STRANGENESS
    try:
        theta, phi = (float(s) for s in spec.split(","))
    except ValueError:
        raise UsageError(f"projector spec must be 'theta,phi' or 'strangeness', got {spec!r}") from None
    p = bloch_projector(theta, phi)
    if not is_projector(p):
        raise UsageError(f"projector spec {spec!r} does not define a projector")
    return p


def parse_signs(text, n):
    try:
        signs = [int(s) for s in text.split(",")]
    except ValueError:
        raise UsageError(f"signs must be comma separated +-1, got {text!r}") from None
    if len(signs) != n or any(s not in (1, -1) for s in signs):
        raise UsageError(f"expected {n} signs in {{1, -1}}, got {text!r}")
    return signs


def scan_rows(opts):
    label = opts["state"]
    if label not in STATE_VECTORS or label == "ghz":
        raise UsageError(f"scan-chsh needs a two-particle state, got {label!r}")
    specs = opts["projector"] or ["strangeness"]
    if isinstance(specs, str):
        specs = [s for s in specs.split(";") if s.strip()]
    projs = [parse_projector(s) for s in specs]
    if len(projs) == 1:
        projs = projs * 4
    if len(projs) != 4:
        raise UsageError("give one projector (used for all four settings) or four")
    if opts["form"] not in ("product", "joint"):
        raise UsageError("--form must be product or joint")
    signs = parse_signs(opts["signs"], 4)
    if opts["grid"] < 2:
        raise UsageError("--grid must be >= 2")
    if opts["t_max"] < 0:
        raise UsageError("--t-max must be nonnegative")
    times = [0.0] if opts["t_max"] == 0 else np.linspace(0.0, opts["t_max"], opts["grid"])
    sc = kaon_scenario(label)
    rows, best = [], None
    for t_l in times:
        for t_r in times:
            res = dynamical_chsh(*projs, signs, sc.params, t_l, t_r, sc.initial_state, form=opts["form"])
            rows.append([fmt(t_l), fmt(t_r), fmt(res.value), "true" if res.violated else "false"])
            if best is None or abs(res.value) > abs(best[0]):
                best = (res.value, t_l, t_r)
    return ["t_l", "t_r", "value", "violated"], rows, best


# ---------------------------------------------------------------------------
# validate


def _check(name, residual, limit, lines):
    ok = bool(residual < limit)
    lines.append(f"{'PASS' if ok else 'FAIL'} {name} {residual:.3e}")
    return ok


def validate_suite(suite):
    """Run one named invariant suite; returns ``(all_passed, lines)``."""
    from dctx import suites

    runners = {
        "kraus": suites.kraus,
        "lindblad": suites.lindblad,
        "signs": suites.signs,
        "square": suites.square,
    }
    names = list(runners) if suite == "all" else [suite]
    if any(n not in runners for n in names):
        raise UsageError(f"unknown suite {suite!r}")
    lines, ok = [], True
    for n in names:
        for name, residual, limit in runners[n]():
            if limit is None:
                lines.append(f"INFO {name} {residual:.3e}")
            else:
                ok &= _check(name, residual, limit, lines)
    return ok, lines


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="dctx", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="run invariant suites")
    p_val.add_argument("--suite", default="all", choices=["kraus", "lindblad", "signs", "square", "all"])

    p_sw = sub.add_parser("sweep", help="criterion value along a time grid")
    p_sw.add_argument("--config")
    p_sw.add_argument("--criterion", choices=["kcbs", "mp", "mermin3", "chsh"])
    p_sw.add_argument("--state")
    p_sw.add_argument("--t-max", type=float)
    p_sw.add_argument("--steps", type=int)
    p_sw.add_argument("--optimize", choices=["per-time", "fixed"])
    p_sw.add_argument("--signs", choices=["optimal", "naive"])
    p_sw.add_argument("--mode", choices=["complex", "real"])
    p_sw.add_argument("--restarts", type=int)
    p_sw.add_argument("--seed", type=int)
    p_sw.add_argument("--out")

    p_sc = sub.add_parser("scan-chsh", help="dressed CHSH over (t_l, t_r)")
    p_sc.add_argument("--config")
    p_sc.add_argument("--state")
    p_sc.add_argument("--projector", action="append",
                      help="'theta,phi' or 'strangeness'; once for all settings or four times")
    p_sc.add_argument("--t-max", type=float)
    p_sc.add_argument("--grid", type=int)
    p_sc.add_argument("--signs", help="decayed-outcome signs for a,a',b,b' (default 1,-1,1,-1)")
    p_sc.add_argument("--form", choices=["product", "joint"])
    p_sc.add_argument("--out")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "validate":
            ok, lines = validate_suite(args.suite)
            print("\n".join(lines))
            return EXIT_OK if ok else EXIT_FAIL
        if args.command == "sweep":
            opts = resolve(args, SWEEP_DEFAULTS)
            header, rows = sweep_rows(opts)
            write_csv(header, rows, opts["out"])
            return EXIT_OK
        if args.command == "scan-chsh":
            opts = resolve(args, SCAN_DEFAULTS)
            header, rows, best = scan_rows(opts)
            write_csv(header, rows, opts["out"])
            print(f"max |value| = {fmt(abs(best[0]))} (value {fmt(best[0])}) at t_l={fmt(best[1])}, t_r={fmt(best[2])}",
                  file=sys.stderr)
            return EXIT_OK
    except (UsageError, DctxError, OSError) as exc:
        print(f"dctx: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
