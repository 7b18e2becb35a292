"""Command-line front end: ``python -m orientlab {run,verify,bench,gadget,sim}``.

Exit codes: 0 pass, 2 usage, 3 algorithm abort, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import InvariantError, SequenceError, UpdateSequence, apply_raw, OrientedGraph
from .generators import GadgetSpec
from .orient import CASCADE_ORDERS, OrientConfig, make_runner

EXIT_OK, EXIT_USAGE, EXIT_ABORT, EXIT_VERIFY = 0, 2, 3, 4

RUN_ALGOS = ["bf", "bf-largest", "antireset", "flipgame", "flipgame-threshold", "matching-local"]
CHECKS = ["arboricity", "minmaxoutdeg", "matching", "forests", "representation"]
GADGETS = ["blowup", "farflip", "gi", "gi-alpha", "random", "saturated"]


class UsageError(Exception):
    pass


def parse_params(text: str | None) -> dict:
    """``k=v,k=v`` with integer or float values."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"bad parameter {item!r}; expected key=value")
        try:
            out[key.strip().replace("-", "_")] = int(val)
        except ValueError:
            try:
                out[key.strip().replace("-", "_")] = float(val)
            except ValueError:
                raise UsageError(f"parameter {key!r} must be numeric, got {val!r}") from None
    return out


def load_sequence(args) -> UpdateSequence:
    """From ``--seq FILE`` or ``--gen KIND[:k=v,...]`` (which needs ``--seed``)."""
    if bool(args.seq) == bool(args.gen):
        raise UsageError("give exactly one of --seq or --gen")
    if args.seq:
        return UpdateSequence.load(args.seq)
    if args.seed is None:
        raise UsageError("--seed is mandatory for generator-backed runs")
    kind, _, params = args.gen.partition(":")
    if kind not in GADGETS:
        raise UsageError(f"unknown generator {kind!r}; choose from {', '.join(GADGETS)}")
    p = parse_params(params)
    if kind in ("random", "saturated"):
        p["seed"] = args.seed
    try:
        return GadgetSpec(kind, p).compile().sequence()
    except KeyError as exc:
        raise UsageError(f"generator {kind!r} needs parameter {exc.args[0]!r}") from None


def _add_source(p) -> None:
    p.add_argument("--seq", help="sequence file")
    p.add_argument("--gen", help="generator spec, e.g. random:alpha=2,n=1000,t=10000")
    p.add_argument("--seed", type=int, help="generator seed (mandatory with --gen)")


def _add_config(p) -> None:
    p.add_argument("--delta", type=int)
    p.add_argument("--alpha", type=int, default=1)
    p.add_argument("--order", choices=CASCADE_ORDERS, help="BF cascade order")
    p.add_argument("--rule", default="fixed", help="orientation rule for inserted edges")


def build_runner(args):
    algo = args.algo
    dp = getattr(args, "delta_prime", None)
    if dp is not None and algo != "flipgame-threshold":
        raise UsageError("--delta-prime only applies to --algo flipgame-threshold")
    if args.order and algo != "bf":
        raise UsageError("--order only applies to --algo bf")
    engine = getattr(args, "engine", None)
    if engine and algo != "matching-local":
        raise UsageError("--engine only applies to --algo matching-local")
    needs_delta = algo in ("bf", "bf-largest", "antireset") or engine in ("bf", "antireset")
    if needs_delta and args.delta is None:
        raise UsageError(f"--delta is required for {algo}")
    try:
        if algo == "flipgame-threshold":
            if dp is None:
                raise UsageError("--delta-prime is required for flipgame-threshold")
            return make_runner(algo, None, delta_prime=dp, insert_rule=args.rule)
        if algo == "flipgame":
            return make_runner(algo, None, insert_rule=args.rule)
        config = None
        if args.delta is not None:
            config = OrientConfig(args.delta, args.alpha, args.order or "fifo", args.rule)
        if algo == "matching-local":
            return make_runner(algo, config, engine=engine or "flipgame")
        return make_runner(algo, config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def replay(runner, seq, stream=None):
    for i, op in enumerate(seq):
        try:
            runner.apply(op, i)
        except (InvariantError, SequenceError) as exc:
            msg = str(exc)
            raise InvariantError(msg if msg.startswith("op #") else f"op #{i}: {msg}") from None
        if stream is not None:
            stream.write(json.dumps({"op": i, **runner.metrics.to_dict()}) + "\n")
    return runner.metrics


def cmd_run(args) -> int:
    runner = build_runner(args)
    seq = load_sequence(args)
    if args.stream_metrics:
        with open(args.stream_metrics, "w", encoding="utf-8") as fh:
            m = replay(runner, seq, fh)
    else:
        m = replay(runner, seq)
    print(m.to_json())
    return EXIT_OK


def _steady_graph(args, seq):
    if args.algo:
        runner = build_runner(args)
        replay(runner, seq)
        return runner.graph
    g = OrientedGraph()
    for i, op in enumerate(seq):
        try:
            apply_raw(g, op, args.rule, i)
        except SequenceError as exc:
            raise InvariantError(str(exc)) from None
    return g


def cmd_verify(args) -> int:
    from . import oracles
    from .apps import MatchingRunner, forest_decompose

    checks = args.checks.split(",")
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise UsageError(f"unknown checks {bad}; choose from {', '.join(CHECKS)}")
    seq = load_sequence(args)
    g = _steady_graph(args, seq)
    failed = False

    def report(check, ok, detail):
        nonlocal failed
        status = "pass" if ok is True else ("skip" if ok is None else "FAIL")
        failed |= ok is False
        print(f"{check}: {status} {detail}".rstrip())

    for check in checks:
        if check == "arboricity":
            if g.n > args.brute_limit:
                report(check, None, f"(n={g.n} exceeds the brute-force limit {args.brute_limit})")
                continue
            a, cert = oracles.arboricity_bruteforce(g)
            ok = args.expect_alpha is None or a <= args.expect_alpha
            witness = "" if cert is None else f" witness={sorted(cert.subset)}"
            report(check, ok, f"alpha={a}{witness}")
        elif check == "minmaxoutdeg":
            dstar, _ = oracles.min_max_outdegree(g)
            steady = g.max_outdegree()
            ok = steady >= dstar and (args.delta is None or steady <= args.delta)
            report(check, ok, f"delta_star={dstar} steady_max_outdeg={steady}")
        elif check == "matching":
            engine = "bf" if args.delta else "flipgame"
            config = OrientConfig(args.delta, args.alpha) if args.delta else None
            mr = MatchingRunner(config, engine=engine)
            bad_at = None
            for i, op in enumerate(seq):
                mr.apply(op, i)
                v = oracles.check_maximal_matching(mr.graph, mr.state.matching) if args.every else None
                if v is not None:
                    bad_at = (i, v)
                    break
            if bad_at is None:
                v = oracles.check_maximal_matching(mr.graph, mr.state.matching)
                bad_at = None if v is None else (len(seq) - 1, v)
            report(check, bad_at is None,
                   f"size={len(mr.state.matching)}" if bad_at is None
                   else f"after op #{bad_at[0]}: {bad_at[1]}")
        elif check == "forests":
            if args.forests == "single":
                assignment = {e: 0 for e in g.edges()}
            else:
                assignment = forest_decompose(g)
            v = oracles.check_forest_decomposition(g, assignment)
            classes = len(set(assignment.values()))
            report(check, v is None, f"classes={classes}" if v is None else str(v))
        elif check == "representation":
            from .distsim import DistSystem
            alpha = max(args.alpha, 1)
            sim = DistSystem(args.delta, alpha, matching=True)
            try:
                sim.run(seq)
                sim.check_representation()
                ok, detail = True, f"nodes={len(sim.nodes)}"
            except InvariantError as exc:
                ok, detail = False, str(exc)
            report(check, ok, detail)
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_bench(args) -> int:
    from . import bench

    rows = bench.run_suite(args.suite, args.seed, args.scale)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            bench.write_csv(rows, fh)
    else:
        bench.write_csv(rows, sys.stdout)
    plot = args.plot_data or (args.out + ".plot.tsv" if args.out else None)
    if plot:
        with open(plot, "w", encoding="utf-8") as fh:
            bench.write_plot_data(rows, fh)
    return EXIT_OK


def cmd_gadget(args) -> int:
    if args.seed is None:
        raise UsageError("--seed is mandatory for generator-backed runs")
    p = parse_params(args.params)
    if args.kind in ("random", "saturated"):
        p["seed"] = args.seed
    try:
        gadget = GadgetSpec(args.kind, p).compile()
    except KeyError as exc:
        raise UsageError(f"gadget {args.kind!r} needs parameter {exc.args[0]!r}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    seq = gadget.sequence()
    text = f"# gadget {args.kind} {args.params or ''} seed={args.seed}\n" + seq.dumps()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        summary = {k: v for k, v in gadget.roles.items() if isinstance(v, (int, str))}
        print(json.dumps({"ops": len(seq), "trigger": gadget.trigger.to_line()
                          if gadget.trigger else None, **summary}))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_sim(args) -> int:
    from .distsim import DistSystem, SimulationError

    seq = load_sequence(args)
    try:
        sim = DistSystem(args.delta, args.alpha, matching=args.engine == "matching-dist",
                         round_limit=args.round_limit, trace=bool(args.trace))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        sim.run(seq, check_every=args.check_every)
        sim.check_representation()
    except (SimulationError, InvariantError, SequenceError) as exc:
        print(f"abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    finally:
        if args.trace:
            sim.engine.dump_trace(args.trace)
    m = sim.metrics
    m.extra["mem_violations"] = len(sim.mem_violations)
    m.extra["wake_violations"] = len(sim.wake_violations)
    print(m.to_json())
    if sim.mem_violations or sim.wake_violations:
        print(f"audit failures: mem={sim.mem_violations[:3]} wake={sim.wake_violations[:3]}",
              file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orientlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("run", help="replay a sequence through one algorithm; print Metrics JSON")
    p.add_argument("--algo", required=True, choices=RUN_ALGOS)
    p.add_argument("--delta-prime", type=int)
    p.add_argument("--engine", choices=["flipgame", "bf", "antireset"],
                   help="orientation engine under matching-local")
    p.add_argument("--stream-metrics", help="write one Metrics JSON line per op")
    _add_config(p)
    _add_source(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run oracle checks on a sequence's final graph")
    p.add_argument("--checks", required=True, help=",".join(CHECKS))
    p.add_argument("--algo", choices=RUN_ALGOS, help="orient with this algorithm first")
    p.add_argument("--delta-prime", type=int)
    p.add_argument("--expect-alpha", type=int, help="fail if the arboricity exceeds this")
    p.add_argument("--forests", choices=["decompose", "single"], default="decompose",
                   help="single puts every edge in one class")
    p.add_argument("--every", action="store_true", help="check the matching after every op")
    p.add_argument("--brute-limit", type=int, default=20)
    _add_config(p)
    _add_source(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run a benchmark suite; CSV plus plot data")
    from .bench import SUITES
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="shrink or grow the suite's t")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--plot-data", help="series/x/y TSV path (default <out>.plot.tsv)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gadget", help="emit a gadget or generator sequence")
    p.add_argument("kind", choices=GADGETS)
    p.add_argument("--params", help="k=v,... e.g. delta=3,h=7")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("sim", help="run the synchronous distributed simulator")
    p.add_argument("--engine", required=True, choices=["antireset-dist", "matching-dist"])
    p.add_argument("--delta", type=int)
    p.add_argument("--alpha", type=int, default=2)
    p.add_argument("--round-limit", type=int, default=100_000)
    p.add_argument("--trace", help="JSONL message trace path")
    p.add_argument("--check-every", type=int, default=0,
                   help="check the sibling representation every k ops")
    _add_source(p)
    p.set_defaults(func=cmd_sim)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        # ValueError here comes from configuration checks (thresholds, rules)
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantError, SequenceError) as exc:
        print(f"abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
