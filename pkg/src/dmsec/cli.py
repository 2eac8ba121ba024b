"""Command-line front end.

Exit codes: 0 pass, 1 violation found, 2 usage or input error,
3 resource limit reached.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from . import io
from .casestudies import (INVARIANT_EXCESS_SENT, INVARIANT_PRICE_SENT, SMG,
                          SmartGridParams, StateLimitExceeded, build_smartgrid,
                          build_starlight, build_starlight_mutant)
from .core import ModelError, format_trace
from .expr import ExprError
from .policy import implicit_policy
from .replay import InvalidCounterexample, recheck
from .report import limit_report, to_json, to_text, verdict_report
from .semantics import bfs_executions
from .verifier import (Limits, ResourceLimitExceeded, check_compliance,
                       check_invariant, check_local_filter_respect,
                       check_unwinding, filtered_suite, implicit_suite)

__all__ = ["main", "main_exit", "build_parser"]

EXIT_PASS, EXIT_VIOLATION, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _edge(text: str) -> tuple[str, str]:
    src, sep, dst = text.partition(":")
    if not sep or not src or not dst:
        raise argparse.ArgumentTypeError(f"expected SRC:DST, got {text!r}")
    return src, dst


def _define(text: str) -> tuple[str, int]:
    name, sep, value = text.partition("=")
    try:
        if not sep or not name:
            raise ValueError
        return name, int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NAME=INT, got {text!r}") from None


def _prices(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}") from None


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--max-states", type=int, default=10_000_000, metavar="N",
                        help="exploration budget (default 10^7)")
    common.add_argument("--max-seconds", type=float, default=600.0, metavar="S",
                        help="wall-clock budget (default 600)")

    p = argparse.ArgumentParser(prog="dmsec", description="Security checks for distributed machines.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compose", parents=[common], help="parse and compose a machine file")
    c.add_argument("machine")

    c = sub.add_parser("explore", parents=[common], help="enumerate executions")
    c.add_argument("machine")
    c.add_argument("--depth", type=_nonneg, required=True)
    c.add_argument("--count-only", action="store_true")

    c = sub.add_parser("implicit-policy", parents=[common], help="write the implicit policy of a machine")
    c.add_argument("machine")
    c.add_argument("-o", "--output")

    c = sub.add_parser("check-compliance", parents=[common], help="bounded policy compliance")
    c.add_argument("machine")
    c.add_argument("policy")
    c.add_argument("--depth", type=_nonneg, default=8)

    c = sub.add_parser("check-filter", parents=[common], help="Local Filter Respect of filtered edges")
    c.add_argument("machine")
    c.add_argument("policy")
    which = c.add_mutually_exclusive_group(required=True)
    which.add_argument("--edge", type=_edge, metavar="SRC:DST")
    which.add_argument("--all", action="store_true", help="every filtered edge")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--fixpoint", action="store_true", help="explore to closure (default)")
    mode.add_argument("--depth", type=_nonneg)

    c = sub.add_parser("check-unwinding", parents=[common], help="unwinding conditions, canonical relation")
    c.add_argument("machine")
    c.add_argument("policy")
    c.add_argument("--depth", type=_nonneg, default=7)
    c.add_argument("--strict-step", action="store_true")

    c = sub.add_parser("check-invariant", parents=[common], help="AG predicate over one process")
    c.add_argument("machine")
    c.add_argument("--process", required=True)
    c.add_argument("--predicate", required=True)
    c.add_argument("--define", type=_define, action="append", default=[], metavar="NAME=INT")

    c = sub.add_parser("casestudy", parents=[common], help="write a case study's machine and policy")
    c.add_argument("name", choices=["starlight", "starlight-mutant", "smartgrid"])
    c.add_argument("-o", "--output", required=True, metavar="DIR")
    c.add_argument("--prosumers", type=int, default=3)
    c.add_argument("--plan-min", type=int, default=-2)
    c.add_argument("--plan-max", type=int, default=2)
    c.add_argument("--lb", type=int, default=-3)
    c.add_argument("--ub", type=int, default=3)
    c.add_argument("--prices", type=_prices, default=(1, 2))

    c = sub.add_parser("selfcheck", parents=[common], help="random cross-validation")
    c.add_argument("--seeds", type=_nonneg, default=200)
    c.add_argument("--depth", type=_nonneg, default=6)
    c.add_argument("--suite", choices=["implicit", "filtered", "both"], default="both")

    c = sub.add_parser("replay", parents=[common], help="re-verify a counterexample")
    c.add_argument("machine")
    c.add_argument("policy", nargs="?")
    c.add_argument("--counterexample", required=True, metavar="FILE",
                   help="a JSON report or bare counterexample")
    c.add_argument("--predicate")
    c.add_argument("--define", type=_define, action="append", default=[], metavar="NAME=INT")
    return p


def _emit(args, report: dict[str, Any], t0: float, lines: list[str] | None = None) -> None:
    if args.json:
        sys.stdout.write(to_json(report))
    else:
        sys.stdout.write(to_text(report, time.monotonic() - t0, lines))


def _verdict(args, verdict, t0, **params) -> int:
    cex = verdict.counterexample
    _emit(args, verdict_report(verdict, **params), t0, cex.render() if cex is not None else None)
    return EXIT_PASS if verdict.passed else EXIT_VIOLATION


def _limits(args) -> Limits:
    return Limits(args.max_states, args.max_seconds)


def _cmd_compose(args, t0) -> int:
    m = io.load_machine(args.machine)
    report = {
        "processes": [{"name": p.id, "states": len(p.states), "transitions": len(p.step)} for p in m.processes],
        "messages": [{"name": msg, "sender": m.sender_of[msg], "receivers": sorted(m.receivers_of[msg])}
                     for msg in sorted(m.messages)],
    }
    if args.json:
        sys.stdout.write(to_json(report))
    else:
        for p in report["processes"]:
            print(f"process {p['name']}: {p['states']} states, {p['transitions']} transitions")
        for msg in report["messages"]:
            print(f"message {msg['name']}: {msg['sender']} -> {', '.join(msg['receivers'])}")
    return EXIT_PASS


def _cmd_explore(args, t0) -> int:
    m = io.load_machine(args.machine)
    limits = _limits(args)
    count = 0
    states = set()
    traces = []
    for alpha, q, _ in bfs_executions(m, args.depth, None, lambda c, q, a, q2: None):
        limits.tick()
        count += 1
        states.add(q)
        if not args.count_only:
            traces.append(format_trace(alpha))
    if args.json:
        report = {"depth": args.depth, "executions": count, "distinct_states": len(states)}
        if not args.count_only:
            report["traces"] = traces
        sys.stdout.write(to_json(report))
    elif args.count_only:
        print(count)
    else:
        for t in traces:
            print(t)
        print(f"{count} executions, {len(states)} distinct states")
    return EXIT_PASS


def _cmd_implicit(args, t0) -> int:
    m = io.load_machine(args.machine)
    data = io.policy_to_dict(implicit_policy(m))
    if args.output:
        io.write_json(args.output, data)
    else:
        sys.stdout.write(io.dumps(data))
    return EXIT_PASS


def _load_pair(args):
    m = io.load_machine(args.machine)
    return m, io.load_policy(args.policy, m)


def _cmd_compliance(args, t0) -> int:
    m, pol = _load_pair(args)
    try:
        v = check_compliance(m, pol, args.depth, _limits(args))
    except ResourceLimitExceeded as e:
        _emit(args, limit_report("compliance", e, depth=args.depth), t0)
        return EXIT_LIMIT
    return _verdict(args, v, t0, depth=args.depth)


def _cmd_filter(args, t0) -> int:
    m, pol = _load_pair(args)
    if args.all:
        edges = [(s, d) for s, d, _ in pol.filtered_edges()]
    else:
        edges = [args.edge]
    mode = "fixpoint" if args.depth is None else "depth"
    limits = _limits(args)
    reports, texts, worst = [], [], EXIT_PASS
    for edge in edges:
        params = {"edge": f"{edge[0]}:{edge[1]}", "mode": mode, "depth": args.depth}
        try:
            v = check_local_filter_respect(m, pol, edge, mode, args.depth, limits)
        except ResourceLimitExceeded as e:
            rep = limit_report("filter", e, **params)
            reports.append(rep)
            texts.append(to_text(rep))
            worst = EXIT_LIMIT
            break
        rep = verdict_report(v, **params)
        reports.append(rep)
        texts.append(to_text(rep, None, v.counterexample.render() if v.counterexample else None))
        if not v.passed and worst == EXIT_PASS:
            worst = EXIT_VIOLATION
    if args.json:
        sys.stdout.write(to_json(reports[0] if args.edge else {"check": "filter", "edges": reports}))
    else:
        sys.stdout.write("".join(texts))
        print(f"wall time {time.monotonic() - t0:.3f} s")
    return worst


def _cmd_unwinding(args, t0) -> int:
    m, pol = _load_pair(args)
    params = {"depth": args.depth, "relation": "canonical", "strict_step": args.strict_step}
    try:
        v = check_unwinding(m, pol, depth=args.depth, strict_step=args.strict_step, limits=_limits(args))
    except ResourceLimitExceeded as e:
        _emit(args, limit_report("unwinding", e, **params), t0)
        return EXIT_LIMIT
    return _verdict(args, v, t0, **params)


def _cmd_invariant(args, t0) -> int:
    m = io.load_machine(args.machine)
    proc = m.process(args.process)
    consts = dict(args.define)
    params = {"process": args.process, "predicate": args.predicate, "constants": consts or None}
    try:
        v = check_invariant(proc, args.predicate, consts, _limits(args))
    except ResourceLimitExceeded as e:
        _emit(args, limit_report("invariant", e, **params), t0)
        return EXIT_LIMIT
    return _verdict(args, v, t0, **params)


def _cmd_casestudy(args, t0) -> int:
    out = Path(args.output)
    extra = None
    if args.name == "smartgrid":
        try:
            params = SmartGridParams(args.prosumers, args.plan_min, args.plan_max, args.lb, args.ub, args.prices)
        except ValueError as e:
            raise UsageError(str(e)) from None
        machine, policy = build_smartgrid(params)
        c = f"--define LB={params.lb} --define UB={params.ub}"
        extra = (f"# check with: check-invariant machine.json --process {SMG} --predicate '<line>' {c}\n"
                 f"{INVARIANT_PRICE_SENT}\n{INVARIANT_EXCESS_SENT}\n")
    elif args.name == "starlight":
        machine, policy = build_starlight()
    else:
        machine, policy = build_starlight_mutant()
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(out / "machine.json", io.machine_to_dict(machine))
    io.write_json(out / "policy.json", io.policy_to_dict(policy))
    written = ["machine.json", "policy.json"]
    if extra is not None:
        (out / "invariants.txt").write_text(extra, encoding="utf-8")
        written.append("invariants.txt")
    if args.json:
        sys.stdout.write(to_json({"casestudy": args.name, "directory": str(out), "files": written}))
    else:
        for f in written:
            print(out / f)
    return EXIT_PASS


def _cmd_selfcheck(args, t0) -> int:
    limits = _limits(args)
    suites = []
    try:
        if args.suite in ("implicit", "both"):
            suites.append(implicit_suite(args.seeds, args.depth, limits=limits))
        if args.suite in ("filtered", "both"):
            suites.append(filtered_suite(args.seeds, args.depth, limits=limits))
    except ResourceLimitExceeded as e:
        _emit(args, limit_report("selfcheck", e, seeds=args.seeds, depth=args.depth), t0)
        return EXIT_LIMIT
    ok = all(s.passed for s in suites)
    if args.json:
        sys.stdout.write(to_json({"check": "selfcheck", "verdict": "pass" if ok else "fail",
                                  "suites": [s.to_dict() for s in suites]}))
    else:
        for s in suites:
            d = s.to_dict()
            print(f"{s.name}: {d['verdict'].upper()} ({d['checked']} checked, {d['skipped']} skipped, "
                  f"{d['executions']} executions, depth {s.depth})")
            for f in s.failures:
                print(f"  failure: {json.dumps(f)}")
        print(f"wall time {time.monotonic() - t0:.3f} s")
    return EXIT_PASS if ok else EXIT_VIOLATION


def _cmd_replay(args, t0) -> int:
    m = io.load_machine(args.machine)
    pol = io.load_policy(args.policy, m) if args.policy else None
    try:
        data = json.loads(Path(args.counterexample).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise io.SyntaxError_(f"{args.counterexample}: line {e.lineno}: {e.msg}") from None
    cex = data.get("counterexample", data) if isinstance(data, dict) else None
    if not isinstance(cex, dict):
        raise InvalidCounterexample("no counterexample in the file")
    if cex.get("kind") != "invariant" and pol is None:
        raise UsageError("this counterexample needs a policy file")
    confirmed, why = recheck(m, pol, cex, args.predicate, dict(args.define))
    if args.json:
        sys.stdout.write(to_json({"check": "replay", "kind": cex.get("kind"), "confirmed": confirmed,
                                  "reason": why}))
    else:
        print(f"{'CONFIRMED' if confirmed else 'NOT CONFIRMED'}: {why}")
    return EXIT_VIOLATION if confirmed else EXIT_PASS


COMMANDS = {
    "compose": _cmd_compose, "explore": _cmd_explore, "implicit-policy": _cmd_implicit,
    "check-compliance": _cmd_compliance, "check-filter": _cmd_filter,
    "check-unwinding": _cmd_unwinding, "check-invariant": _cmd_invariant,
    "casestudy": _cmd_casestudy, "selfcheck": _cmd_selfcheck, "replay": _cmd_replay,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    if not logging.getLogger().handlers:
        logging.basicConfig(level=logging.WARNING, format="%(message)s", stream=sys.stderr)
    t0 = time.monotonic()
    try:
        return COMMANDS[args.command](args, t0)
    except (ResourceLimitExceeded, StateLimitExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except (io.FormatError, ModelError, ExprError, UsageError, OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


def main_exit() -> None:
    sys.exit(main())
