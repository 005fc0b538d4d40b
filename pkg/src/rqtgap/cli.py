"""Command-line front door.

Subcommands: gap (the scaling table), verify (exactness batteries),
noise-curve (closed-form noisy bounds), seesaw (numerical real optimum).
Machine output is deterministic for fixed flags and seed; CSV floats are
printed with 17 significant digits, JSON uses Python's round-trip float
repr, human tables use 6 digits.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import ValidationError
from .functionals import classical_bound_I, eval_I, eval_I_from_correlators, ideal_I_value
from .linalg import Z
from .network import StarNetwork, ideal_network, load_strategy
from .robustness import (
    beta_rqt_upper,
    epsilon_threshold,
    verify_sos_identity_A,
    verify_sos_identity_B,
)
from .rqt import max_j_over_t, seesaw_real, threads_cap
from .selftest import verify_selftest_noiseless

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_to_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    for row in rows:
        w.writerow(["%.17g" % v if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _rows_to_human(header: list[str], rows: list[list]) -> str:
    fmt_rows = [
        ["%.6g" % v if isinstance(v, float) else str(v) for v in row] for row in rows
    ]
    widths = [max(len(h), *(len(r[i]) for r in fmt_rows)) if fmt_rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for r in fmt_rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


def cmd_gap(args) -> int:
    if args.n_min < 2 or args.n_min > args.n_max:
        print("error: need 2 <= n-min <= n-max", file=sys.stderr)
        return EXIT_USAGE
    header = [
        "n", "beta_Q", "beta_C_enumerated", "beta_CQT",
        "beta_RQT_exact", "beta_RQT_cert_bound", "gap_ratio",
    ]
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        rows.append(
            [
                n,
                2.0 * (n - 1),
                classical_bound_I(n)["enumerated"],
                1.0,
                float(max_j_over_t(n).max_value),
                1.0 / (n - 1),
                float(n - 1),
            ]
        )
    if args.format == "json":
        payload = [dict(zip(header, row)) for row in rows]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "csv":
        _emit(_rows_to_csv(header, rows), args.out)
    else:
        _emit(_rows_to_human(header, rows), args.out)
    return EXIT_OK


def _verify_batteries(n: int, seed: int, net: StarNetwork) -> dict:
    report: dict = {"n": n, "seed": seed, "rng": linalg.RNG_NAME, "checks": []}

    battery = verify_selftest_noiseless(n, net)
    report["checks"].append(
        {"name": "selftest_noiseless", "passed": battery["passed"], "detail": battery}
    )

    pairs = [(t[0], t[1]) for t in net.observables]
    res_a = max(verify_sos_identity_A(n, l, pairs) for l in (0, (1 << n) - 1))
    res_b = max(verify_sos_identity_B(n, l, pairs) for l in (0, (1 << n) - 1))
    rng = np.random.default_rng(seed)
    for _ in range(5):
        rnd = [
            [
                linalg.random_pm1_observable(2, int(rng.integers(0, 2**63))).mat
                for _ in range(2)
            ]
            for _ in range(n)
        ]
        res_a = max(res_a, verify_sos_identity_A(n, 0, rnd))
        res_b = max(res_b, verify_sos_identity_B(n, 0, rnd))
    report["checks"].append(
        {"name": "sos_identity_A", "measured": res_a, "bound": 1e-9, "passed": res_a <= 1e-9}
    )
    report["checks"].append(
        {"name": "sos_identity_B_residual", "measured": res_b, "bound": 1e-9, "passed": res_b <= 1e-9}
    )

    # Backend agreement: dense trace, correlator assembly and the
    # closed-form kernel must tell the same story on the ideal strategy.
    back = 0.0
    ideal = ideal_network(n)
    for l in range(1 << n):
        ref = ideal_I_value(n, l)
        back = max(back, abs(eval_I(ideal, l) - ref))
        back = max(back, abs(eval_I_from_correlators(ideal, l) - ref))
    report["checks"].append(
        {"name": "backend_equivalence", "measured": back, "bound": 1e-9, "passed": back <= 1e-9}
    )

    report["passed"] = all(c["passed"] for c in report["checks"])
    return report


def cmd_verify(args) -> int:
    if args.n < 2 or args.n > args.dense_cap:
        print(f"error: need 2 <= n <= dense cap ({args.dense_cap})", file=sys.stderr)
        return EXIT_USAGE
    if args.strategy:
        net = load_strategy(args.strategy)
        if net.n != args.n:
            print("error: strategy file is for a different n", file=sys.stderr)
            return EXIT_USAGE
    else:
        net = ideal_network(args.n)
    if args.inject_broken:
        obs = list(net.observables)
        obs[1] = (obs[1][0], Z.astype(complex), obs[1][2])
        net = StarNetwork(net.n, net.sources, tuple(obs), net.eve_povm)
    try:
        report = _verify_batteries(args.n, args.seed, net)
    except ValidationError as exc:
        report = {"n": args.n, "seed": args.seed, "passed": False, "error": str(exc)}
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    if not report["passed"]:
        failing = [c["name"] for c in report.get("checks", []) if not c["passed"]]
        print("FAIL: " + (", ".join(failing) or report.get("error", "?")), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_noise_curve(args) -> int:
    if args.n < 2:
        print("error: need n >= 2", file=sys.stderr)
        return EXIT_USAGE
    eps_grid = args.eps if args.eps else [0.0, 1e-6, 1e-4, 1e-2]
    if any(e < 0 for e in eps_grid):
        print("error: eps values must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    try:
        eps_star: Optional[float] = epsilon_threshold(args.n, 1.0)
    except ValueError:
        eps_star = None  # n = 2: the noiseless bound already sits at 1
    header = ["n", "eps", "beta_rqt_upper", "beta_cqt", "gap_nontrivial", "eps_star"]
    rows = []
    for eps in sorted(eps_grid):
        bound = beta_rqt_upper(args.n, eps)
        rows.append(
            [
                args.n,
                float(eps),
                bound,
                1.0,
                bound < 1.0,
                "" if eps_star is None else eps_star,
            ]
        )
    if args.format == "json":
        payload = [dict(zip(header, row)) for row in rows]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "csv":
        _emit(_rows_to_csv(header, rows), args.out)
    else:
        _emit(_rows_to_human(header, rows), args.out)
    return EXIT_OK


def cmd_seesaw(args) -> int:
    if args.n < 2 or args.n > args.dense_cap:
        print(f"error: need 2 <= n <= dense cap ({args.dense_cap})", file=sys.stderr)
        return EXIT_USAGE
    result = seesaw_real(
        ideal_network(args.n), restarts=args.restarts, seed=args.seed,
        trace_path=args.trace,
    )
    exact = max_j_over_t(args.n)
    report = {
        "n": args.n,
        "seed": args.seed,
        "rng": result.rng,
        "restarts": args.restarts,
        "threads_cap": threads_cap(),
        "best_J": result.best_J,
        "per_restart": list(result.per_restart),
        "exact_maximum": float(exact.max_value),
        "exact_argmax": list(exact.argmax),
        "matches_enumeration": abs(result.best_J - float(exact.max_value)) <= 1e-6,
        "sound": result.best_J <= float(exact.max_value) + 1e-7,
    }
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK if report["sound"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rqtgap")
    p.add_argument("--format", choices=["json", "csv", "human"], default="human")
    p.add_argument("--out", default=None, help="write output to a file")
    p.add_argument("--dense-cap", type=int, default=8,
                   help="largest n accepted by dense commands")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gap", help="gap table over a range of n")
    g.add_argument("--n-min", type=int, required=True)
    g.add_argument("--n-max", type=int, required=True)
    g.set_defaults(func=cmd_gap)

    v = sub.add_parser("verify", help="run the exactness batteries")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--strategy", default=None, help="JSON strategy file to verify")
    v.add_argument("--inject-broken", action="store_true",
                   help="debug: corrupt one observable to exercise the failure path")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("noise-curve", help="closed-form noisy bounds over an eps grid")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--eps", type=float, action="append", default=None)
    c.set_defaults(func=cmd_noise_curve)

    s = sub.add_parser("seesaw", help="numerical real optimum of J_N")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--restarts", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trace", default=None, help="JSON-lines iteration trace file")
    s.set_defaults(func=cmd_seesaw)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
