"""Command-line harness: ``gen``, ``run`` and ``sketch`` subcommands."""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import random
import sys
import time
from pathlib import Path
from typing import IO

from .engine import EngineConfig, ErEngine
from .errors import Disconnected, DynresError, ParseError
from .graph import DynamicMultigraph, read_graph, write_graph
from .numerics import WeightedGraphView, assemble, pinv_dense, resistance_from_pinv
from .schur import TerminalSet, default_rho, default_step_cap, sample_schur_sketch
from .workload import (
    KINDS,
    EdgeResolver,
    Event,
    generate_graph,
    generate_stream,
    read_stream,
    validate_stream,
    write_stream,
)


def read_terminals(path: str | Path) -> list[int]:
    out = []
    for i, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            out.append(int(body))
        except ValueError:
            raise ParseError(f"terminal line must hold one vertex id, got {body!r}", i) from None
    return out


def digest(records: list[dict]) -> str:
    """Hash of the report with every ``*_ns`` timing field removed."""
    h = hashlib.sha256()
    for rec in records:
        clean = {k: v for k, v in rec.items() if not k.endswith("_ns")}
        h.update(json.dumps(clean, sort_keys=True).encode())
        h.update(b"\n")
    return h.hexdigest()


class _Oracle:
    """Exact resistances on the evolving graph, recomputed lazily after updates."""

    def __init__(self, g: DynamicMultigraph):
        self.g = g
        self._P = None
        self._labels = None

    def invalidate(self) -> None:
        self._P = None

    def __call__(self, s: int, t: int) -> float:
        if self._P is None:
            sys_ = assemble(WeightedGraphView.from_graph(self.g))
            self._P = pinv_dense(sys_)
            self._labels = sys_.labels
        if self._labels[s] != self._labels[t]:
            return math.inf
        return float(resistance_from_pinv(self._P, s, t))


def execute(
    g: DynamicMultigraph, events: list[Event], config: EngineConfig, oracle: bool
) -> list[dict]:
    """Run a validated stream against a fresh engine; returns the report records."""
    validate_stream(events, g.n, ((u, v) for _, u, v in g.edges()))
    resolver = EdgeResolver(g)
    engine = ErEngine(g, config)
    if config.mode == "vertex":
        for ev in events:
            if ev.op == "Q" and ev.a != ev.b:
                engine.register_pair(ev.a, ev.b)
    exact = _Oracle(g) if oracle else None
    records: list[dict] = [
        {
            "type": "params",
            "n": g.n,
            "m": g.m,
            "eps": config.eps,
            "mode": config.mode,
            "beta": engine.beta,
            "rho": engine.rho,
            "step_cap": engine.step_cap,
            "c_rho": config.c_rho,
            "c_len": config.c_len,
            "seed": config.seed,
            "oracle": "exact" if oracle else "none",
            "resparsify": config.resparsify,
            "terminals": len(engine.terminals),
        }
    ]
    for ev in events:
        rec: dict = {"type": {"I": "insert", "D": "delete", "Q": "query"}[ev.op], "line": ev.line}
        t0 = time.perf_counter_ns()
        if ev.op == "I":
            eid = engine.insert(ev.a, ev.b)
            resolver.push(ev.a, ev.b, eid)
            rec.update(u=ev.a, v=ev.b, edge=eid, churn=engine.last_churn)
        elif ev.op == "D":
            eid = resolver.pop(ev.a, ev.b)
            engine.delete(eid)
            rec.update(u=ev.a, v=ev.b, edge=eid, churn=engine.last_churn)
        else:
            rec.update(s=ev.a, t=ev.b)
            try:
                rec["estimate"] = engine.effective_resistance(ev.a, ev.b)
            except Disconnected as exc:
                rec["error"] = f"Disconnected: {exc}"
            rec["churn"] = engine.last_churn
        rec["time_ns"] = time.perf_counter_ns() - t0
        if ev.op != "Q" and exact is not None:
            exact.invalidate()
        if ev.op == "Q" and exact is not None:
            t1 = time.perf_counter_ns()
            value = exact(ev.a, ev.b)
            rec["oracle_time_ns"] = time.perf_counter_ns() - t1
            rec["exact"] = value if math.isfinite(value) else None
            if "estimate" in rec and math.isfinite(value) and value > 0:
                rec["rel_error"] = rec["estimate"] / value - 1.0
        rec["terminals"] = len(engine.terminals)
        records.append(rec)
    records.append(summarize(records, config.eps, engine.rebuilds))
    return records


def summarize(records: list[dict], eps: float, rebuilds: int) -> dict:
    body = [r for r in records if r["type"] in ("insert", "delete", "query")]
    out: dict = {"type": "summary", "ops": len(body), "rebuilds": rebuilds}
    for kind, plural in (("insert", "inserts"), ("delete", "deletes"), ("query", "queries")):
        rs = [r for r in body if r["type"] == kind]
        out[plural] = len(rs)
        out[f"{kind}_time_ns"] = sum(r["time_ns"] for r in rs)
        if kind != "query":
            out[f"mean_{kind}_churn"] = sum(r["churn"] for r in rs) / len(rs) if rs else 0.0
    errs = [abs(r["rel_error"]) for r in body if "rel_error" in r]
    out["compared"] = len(errs)
    out["within_eps"] = sum(e <= eps for e in errs)
    out["max_rel_error"] = max(errs) if errs else None
    out["query_errors"] = sum("error" in r for r in body)
    out["digest"] = digest(records)
    return out


def _emit(records: list[dict], fh: IO[str]) -> None:
    for rec in records:
        fh.write(json.dumps(rec, sort_keys=True) + "\n")


# -- subcommands ----------------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    g = generate_graph(args.kind, args.n, args.m, parallel=args.parallel, seed=args.seed)
    events = generate_stream(
        g, args.ops, seed=args.seed + 1, ratios=(args.insert, args.delete, args.query)
    )
    write_graph(g, args.graph_out)
    write_stream(events, args.stream_out)
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    g = read_graph(args.graph)
    events = read_stream(args.stream)
    terminals = tuple(read_terminals(args.terminals)) if args.terminals else ()
    config = EngineConfig(
        eps=args.eps,
        mode=args.mode,
        beta=args.beta,
        terminals=terminals,
        c_rho=args.rho_factor,
        c_len=args.cap_factor,
        seed=args.seed,
        resparsify=args.resparsify == "on",
    )
    records = execute(g, events, config, oracle=args.oracle == "exact")
    if args.report:
        with open(args.report, "w") as fh:
            _emit(records, fh)
    else:
        _emit(records, sys.stdout)
    return 0


def cmd_sketch(args: argparse.Namespace) -> int:
    g = read_graph(args.graph)
    T = TerminalSet(g.n, read_terminals(args.terminals))
    beta = args.beta if args.beta is not None else max(g.m, 1) ** (-1 / 5)
    rho = args.rho if args.rho is not None else default_rho(g.n, args.eps, args.rho_factor)
    cap = args.cap if args.cap is not None else default_step_cap(g.n, beta, args.cap_factor)
    sk = sample_schur_sketch(g, T, rho, cap, random.Random(args.seed))
    lines = [f"# rho={rho} cap={cap} seed={args.seed}"]
    lines += [f"{a} {b} {w!r}" for (a, b), w in sk.pair_weights().items()]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynres", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph file and an update stream")
    gen.add_argument("kind", choices=KINDS)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, default=None, help="edge count (erdos-renyi only)")
    gen.add_argument("--ops", type=int, default=0)
    gen.add_argument("--parallel", type=int, default=2)
    gen.add_argument("--insert", type=float, default=0.4, help="insert ratio")
    gen.add_argument("--delete", type=float, default=0.4, help="delete ratio")
    gen.add_argument("--query", type=float, default=0.2, help="query ratio")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--graph-out", required=True)
    gen.add_argument("--stream-out", required=True)
    gen.set_defaults(func=cmd_gen)

    run = sub.add_parser("run", help="replay a stream against the engine")
    run.add_argument("graph")
    run.add_argument("stream")
    run.add_argument("--eps", type=float, default=0.25)
    run.add_argument("--beta", type=float, default=None)
    run.add_argument("--mode", choices=("edge", "vertex", "explicit"), default="edge")
    run.add_argument("--terminals", default=None)
    run.add_argument("--rho-factor", type=float, default=1.0)
    run.add_argument("--cap-factor", type=float, default=1.0)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--oracle", choices=("exact", "none"), default="none")
    run.add_argument("--resparsify", choices=("on", "off"), default="off")
    run.add_argument("--report", default=None)
    run.set_defaults(func=cmd_run)

    sk = sub.add_parser("sketch", help="sample a static Schur complement sketch")
    sk.add_argument("graph")
    sk.add_argument("terminals")
    sk.add_argument("--eps", type=float, default=0.25)
    sk.add_argument("--beta", type=float, default=None)
    sk.add_argument("--rho", type=int, default=None)
    sk.add_argument("--cap", type=int, default=None)
    sk.add_argument("--rho-factor", type=float, default=1.0)
    sk.add_argument("--cap-factor", type=float, default=1.0)
    sk.add_argument("--seed", type=int, default=0)
    sk.add_argument("--out", default=None)
    sk.set_defaults(func=cmd_sketch)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DynresError as exc:
        print(f"dynres: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
