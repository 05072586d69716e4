"""``ralloc`` command line: gen, solve, bench and export-ilp."""
from __future__ import annotations

import argparse
import json
import sys

from .core import AssumptionViolation, instance_to_dict, load_instance
from .harness import METHODS, load_config, run_suite, solve, write_csv
from .instance_gen import FAMILIES, GenSpec, SpecInvalid, generate
from .subsolver import PointMenu, export_ilp, full_menu


def _budgets(text: str):
    parts = [int(p) for p in text.split(",")]
    return parts[0] if len(parts) == 1 else tuple(parts)


def _points(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        i, k = item.split(":")
        out.append((int(i), int(k)))
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ralloc", description="Resource allocation with expensive cost evaluations."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a random instance")
    gen.add_argument("--family", choices=FAMILIES, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--b", type=_budgets, required=True, help="scalar or comma-separated vector")
    gen.add_argument("--B", type=int, required=True)
    gen.add_argument("--M", type=float, default=100.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--perturbation", type=float, default=0.0)
    gen.add_argument("--out", help="output path (default: stdout)")

    sol = sub.add_parser("solve", help="run one method on an instance file")
    sol.add_argument("--method", choices=sorted(METHODS), required=True)
    sol.add_argument("--instance", required=True)
    sol.add_argument("--epsilon", type=float, default=0.0)
    sol.add_argument("--seed", type=int, default=0)
    sol.add_argument("--convex-bounds", action="store_true", default=None)
    sol.add_argument("--max-iters", type=int)
    sol.add_argument("--report", help="write the report here instead of stdout")

    bench = sub.add_parser("bench", help="run a suite described by a JSON config")
    bench.add_argument("--config", required=True)
    bench.add_argument("--out", required=True, help="results CSV path")

    ilp = sub.add_parser("export-ilp", help="write the selection ILP in CPLEX LP format")
    ilp.add_argument("--instance", required=True)
    ilp.add_argument("--points", type=_points, help="restrict to i:k,i:k,... (default: all points)")
    ilp.add_argument("--out", help="output path (default: stdout)")
    return parser


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dispatch(args) -> int:
    if args.command == "gen":
        spec = GenSpec(args.family, args.n, args.b, args.B, args.M, args.seed, args.perturbation)
        _emit(json.dumps(instance_to_dict(generate(spec)), indent=2) + "\n", args.out)
    elif args.command == "solve":
        instance = load_instance(args.instance)
        report = solve(
            instance,
            args.method,
            epsilon=args.epsilon,
            seed=args.seed,
            convex_bounds=args.convex_bounds,
            max_iters=args.max_iters,
        )
        _emit(report.to_json() + "\n", args.report)
    elif args.command == "bench":
        rows = run_suite(load_config(args.config))
        write_csv(rows, args.out)
        for row in rows:
            if "error" in row:
                print(f"{row['instance_id']} {row['method']}: {row['error']}", file=sys.stderr)
    elif args.command == "export-ilp":
        instance = load_instance(args.instance)
        table = [[instance._lookup(i, k) for k in range(bi + 1)] for i, bi in enumerate(instance.b)]
        if args.points:
            rows = [dict() for _ in range(instance.n)]
            for i, k in args.points:
                rows[i][k] = table[i][k]
            menu = PointMenu(rows)
        else:
            menu = full_menu(table)
        _emit(export_ilp(menu, instance.B, name=instance.name or "allocation"), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except (AssumptionViolation, SpecInvalid, ValueError, KeyError, IndexError, OSError) as exc:
        print(f"ralloc: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - reported, not raised
        print(f"ralloc: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
