"""Command-line interface: ``monometric <command> [options]``.

Exit codes: 0 success, 1 acceptance failure or contradiction, 2 usage
error, 3 numerical rejection.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, replace

import numpy as np

from . import __version__
from . import acceptance
from . import channels as ch
from .closed_forms import HyperbolicParams, family_membership, ft_cosh_product
from .kernels import FAMILIES, derived_eval, evaluate, kernel_from_json, kernel_to_dict, make_kernel
from .linalg_core import NumericalRejection, rng_for
from .posdef import INCONCLUSIVE, NPD, PD, TestConfig, cp_test, critical_search, membership, order_test

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SCAN_HEADER = ["family", "parameter", "value", "verdict", "margin", "predicted", "agreement"]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers

def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _kernel(text: str | None, flag: str = "--kernel"):
    if not text:
        raise UsageError(f"{flag} is required")
    try:
        return kernel_from_json(text)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad {flag}: {exc}") from exc


def _config(args) -> TestConfig:
    fields = {}
    if args.config:
        try:
            with open(args.config) as fh:
                fields = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read --config: {exc}") from exc
    try:
        cfg = TestConfig.from_dict(fields)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad --config: {exc}") from exc
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.tolerance is not None:
        if not args.tolerance > 0:
            raise UsageError("--tolerance must be positive")
        cfg = replace(cfg, tolerance=args.tolerance)
    return cfg


def _floats(text: str, flag: str) -> list[float]:
    """Parse 'a,b,c' or 'start:stop:step' (inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(v) for v in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError("need start <= stop and step > 0")
            n = int(round((stop - start) / step)) + 1
            return [round(start + i * step, 12) for i in range(n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad {flag} {text!r}: {exc}") from exc


def _tri(verdict: str):
    return True if verdict == PD else (False if verdict == NPD else None)


def _agreement(predicted, observed) -> str:
    if predicted is None:
        return "none"
    if observed is None:
        return "inconclusive-consistent"
    return "match" if predicted == observed else "contradiction"


def _family_kernel(family: str, param: str | None, fixed: dict):
    if family not in FAMILIES or family in ("mixture", "dual", "custom"):
        raise UsageError(f"unknown or non-parametric family {family!r}")
    names = [p[0] for p in FAMILIES[family]]
    if param is None:
        free = [n for n in names if n not in fixed]
        if len(free) != 1:
            raise UsageError(f"--param is required for {family} (parameters {names})")
        param = free[0]
    if param not in names:
        raise UsageError(f"{family} has no parameter {param!r}; parameters are {names}")

    def build(v: float):
        try:
            return make_kernel(family, dict(fixed, **{param: v}))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    return param, build


def _fixed(text: str | None) -> dict:
    if not text:
        return {}
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad --fixed: {exc}") from exc
    if not isinstance(d, dict):
        raise UsageError("--fixed must be a JSON object")
    return d


# ---------------------------------------------------------------------------
# commands

def cmd_families(args) -> int:
    out = {name: [{"name": n, "min": lo, "max": hi} for n, lo, hi in spec] for name, spec in FAMILIES.items()}
    _emit(_json({"schema_version": SCHEMA_VERSION, "families": out}), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    k = _kernel(args.kernel)
    xs = _floats(args.x, "--x")
    try:
        arr = np.array(xs)
        vals = evaluate(k, arr) if args.which == "k" else derived_eval(k, args.which, arr)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = [[repr(x), repr(float(v))] for x, v in zip(xs, np.atleast_1d(vals))]
    _emit(_csv(["x", args.which], rows), args.out)
    return EXIT_OK


def cmd_cp_test(args) -> int:
    cfg = _config(args)
    k = _kernel(args.kernel)
    v = cp_test(k, cfg)
    pred = family_membership(k)["in_K_plus"]
    report = {"schema_version": SCHEMA_VERSION, "kernel": kernel_to_dict(k), **v.to_dict(),
              "predicted_in_K_plus": pred, "agreement": _agreement(pred, _tri(v.verdict))}
    _emit(_json(report), args.out)
    return EXIT_FAIL if report["agreement"] == "contradiction" else EXIT_OK


def cmd_order_test(args) -> int:
    cfg = _config(args)
    k1 = _kernel(args.kernel)
    k2 = _kernel(args.kernel2, "--kernel2")
    v = order_test(k1, k2, cfg)
    report = {"schema_version": SCHEMA_VERSION, "kernel": kernel_to_dict(k1), "kernel2": kernel_to_dict(k2),
              **v.to_dict()}
    _emit(_json(report), args.out)
    return EXIT_OK


def cmd_membership(args) -> int:
    cfg = _config(args)
    k = _kernel(args.kernel)
    res = membership(k, cfg)
    pred = family_membership(k)
    agree = {
        "in_K_plus": _agreement(pred["in_K_plus"], res.in_K_plus),
        "in_K_minus": _agreement(pred["in_K_minus"], res.in_K_minus),
    }
    report = {"schema_version": SCHEMA_VERSION, "kernel": kernel_to_dict(k), **res.to_dict(),
              "predicted": pred, "agreement": agree}
    _emit(_json(report), args.out)
    return EXIT_FAIL if "contradiction" in agree.values() else EXIT_OK


def cmd_scan(args) -> int:
    cfg = _config(args)
    param, build = _family_kernel(args.family, args.param, _fixed(args.fixed))
    values = _floats(args.grid, "--grid")
    against = _kernel(args.against, "--against") if args.test == "order-vs" else None
    rows = []
    contradiction = False
    for v in values:
        k = build(v)
        if args.test == "cp":
            verdict = cp_test(k, cfg)
            pred = family_membership(k)["in_K_plus"]
            label, margin, observed = verdict.verdict, verdict.margin, _tri(verdict.verdict)
        elif args.test == "membership":
            res = membership(k, cfg)
            p = family_membership(k)
            pred = _membership_label(p["in_K_plus"], p["in_K_minus"])
            label, margin = res.label, min(res.plus.margin, res.minus.margin)
            observed = res.label if res.label != "inconclusive" else None
        else:
            verdict = order_test(k, against, cfg)
            pred = None
            label, margin, observed = verdict.verdict, verdict.margin, _tri(verdict.verdict)
        agree = _agreement(pred, observed)
        contradiction |= agree == "contradiction"
        rows.append([args.family, param, repr(v), label, repr(float(margin)),
                     "" if pred is None else str(pred), agree])
    _emit(_csv(SCAN_HEADER, rows), args.out)
    return EXIT_FAIL if contradiction else EXIT_OK


def _membership_label(plus, minus):
    if plus is True and minus is True:
        return "both"
    if plus is True and minus is False:
        return "in_K_plus"
    if minus is True and plus is False:
        return "in_K_minus"
    if plus is False and minus is False:
        return "neither"
    return None


def cmd_critical(args) -> int:
    cfg = _config(args)
    param, build = _family_kernel(args.family, args.param, _fixed(args.fixed))
    lo, hi = _floats(args.range, "--range")[:2] if args.range else (0.0, 1.0)
    try:
        res = critical_search(build, (lo, hi), cfg, width=args.width, override_monotonicity=args.override_monotonicity)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = {"schema_version": SCHEMA_VERSION, "family": args.family, "parameter": param,
              "fixed": _fixed(args.fixed), **res.to_dict()}
    _emit(_json(report), args.out)
    return EXIT_OK if res.converged else EXIT_FAIL


def cmd_ft_verify(args) -> int:
    try:
        p = HyperbolicParams(args.alpha, args.beta)
        if not p.beta > 1.0:
            raise ValueError("--beta must exceed 1")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    grid = _floats(args.grid, "--grid")
    f = lambda t: 1.0 / ((np.cosh(0.5 * t) + p.alpha) * (np.cosh(t) + p.beta))
    rows = []
    worst = 0.0
    for s in grid:
        closed = float(ft_cosh_product(p, s))
        quad_val = acceptance._quad_ft(f, s)
        worst = max(worst, abs(closed - quad_val))
        rows.append([repr(s), repr(closed), repr(quad_val), repr(abs(closed - quad_val))])
    _emit(_csv(["s", "closed_form", "quadrature", "abs_error"], rows), args.out)
    return EXIT_OK if worst <= args.tolerance_ft else EXIT_FAIL


def cmd_channel_bench(args) -> int:
    cfg = _config(args)
    k = _kernel(args.kernel) if args.kernel else make_kernel("heinz", alpha=0.5)
    if not (1 <= args.d <= 6) or not (1 <= args.env <= args.d**2):
        raise UsageError("need 1 <= d <= 6 and 1 <= env <= d^2")
    phi = ch.random_channel(args.d, args.env, cfg.seed)
    est = ch.eta_estimates(k, phi, args.samples, cfg.seed, args.starts)
    rng = rng_for("channel_bench", args.d, cfg.seed)
    audits = []
    for _ in range(args.audits):
        g = rng.standard_normal((args.d, args.d)) + 1j * rng.standard_normal((args.d, args.d))
        rho = g @ g.conj().T + 1e-2 * np.eye(args.d)
        rho /= np.trace(rho).real
        x = rng.standard_normal((args.d, args.d)) + 1j * rng.standard_normal((args.d, args.d))
        x = 0.5 * (x + x.conj().T)
        x -= np.trace(x).real / args.d * np.eye(args.d)
        audits.append(ch.contraction_audit(k, phi, rho, x))
    report = {
        "schema_version": SCHEMA_VERSION,
        "kernel": kernel_to_dict(k),
        "d": args.d,
        "env": args.env,
        "seed": cfg.seed,
        "eta": est,
        "audits": len(audits),
        "audit_violations": sum(not a["ok"] for a in audits),
        "kraus": json.loads(phi.to_json()),
    }
    _emit(_json(report), args.out)
    return EXIT_FAIL if report["audit_violations"] else EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    try:
        results = acceptance.run_suite(args.suite, cfg, args.inject_fault,
                                       progress=lambda r: print(r.line(), file=sys.stderr, flush=True))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    failed = [r for r in results if not r.passed]
    report = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "suite": args.suite,
        "config": asdict(cfg),
        "injected_fault": args.inject_fault,
        "passed": not failed,
        "failed_criteria": [f"{r.number}: {r.name}" for r in failed],
        "criteria": [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results],
    }
    _emit(_json(report), args.out)
    for r in failed:
        extra = r.detail.get("failed_invariants")
        suffix = f" (invariants: {', '.join(extra)})" if extra else ""
        print(f"FAILED criterion {r.number}: {r.name}{suffix}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--config", default=None, help="JSON file of TestConfig overrides")
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--kernel", default=None, help='JSON, e.g. \'{"family":"wyd","params":{"p":0.5}}\'')

    p = _Parser(prog="monometric", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("families", parents=[common], help="list kernel families").set_defaults(fn=cmd_families)

    s = sub.add_parser("eval", parents=[common], help="evaluate a kernel")
    s.add_argument("--x", required=True, help="points: 'a,b,c' or 'start:stop:step'")
    s.add_argument("--which", default="k", choices=["k", "f", "g", "weighted"])
    s.set_defaults(fn=cmd_eval)

    sub.add_parser("cp-test", parents=[common], help="K+ test of one kernel").set_defaults(fn=cmd_cp_test)

    s = sub.add_parser("order-test", parents=[common], help="test kernel <= kernel2")
    s.add_argument("--kernel2", required=True)
    s.set_defaults(fn=cmd_order_test)

    sub.add_parser("membership", parents=[common], help="K+/K- classification").set_defaults(fn=cmd_membership)

    s = sub.add_parser("scan", parents=[common], help="sweep one family parameter (CSV)")
    s.add_argument("--family", required=True)
    s.add_argument("--param", default=None)
    s.add_argument("--fixed", default=None, help="JSON object of the other parameters")
    s.add_argument("--grid", required=True)
    s.add_argument("--test", default="cp", choices=["cp", "order-vs", "membership"])
    s.add_argument("--against", default=None, help="reference kernel for --test order-vs")
    s.set_defaults(fn=cmd_scan)

    s = sub.add_parser("critical", parents=[common], help="bisect for the K+ switch point")
    s.add_argument("--family", required=True)
    s.add_argument("--param", default=None)
    s.add_argument("--fixed", default=None)
    s.add_argument("--range", default=None, help="'lo,hi'")
    s.add_argument("--width", type=float, default=1e-3)
    s.add_argument("--override-monotonicity", action="store_true")
    s.set_defaults(fn=cmd_critical)

    s = sub.add_parser("ft-verify", parents=[common], help="closed-form transform vs quadrature (CSV)")
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--beta", type=float, default=2.0)
    s.add_argument("--grid", default="-8:8:0.25")
    s.add_argument("--tolerance-ft", type=float, default=1e-7)
    s.set_defaults(fn=cmd_ft_verify)

    s = sub.add_parser("channel-bench", parents=[common], help="contraction estimates on a random channel")
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--env", type=int, default=2)
    s.add_argument("--samples", type=int, default=10)
    s.add_argument("--starts", type=int, default=50)
    s.add_argument("--audits", type=int, default=100)
    s.set_defaults(fn=cmd_channel_bench)

    s = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    s.add_argument("--suite", default="all", choices=list(acceptance.SUITES))
    s.add_argument("--inject-fault", default=None, choices=list(acceptance.FAULTS),
                   help="test mode: corrupt a kernel to check the suite catches it")
    s.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalRejection as exc:
        print(f"numerical rejection: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
