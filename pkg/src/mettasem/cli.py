"""``mettasem`` command line for running, exploring and compiling states."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import bisim, machine, resources
from .rho import check_correctness, compile_meaning, pretty
from .states import RState
from .syntax import ParseError, parse_state, print_state, print_term
from .terms import Term, msort

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_FUEL = 2
EXIT_STARVED = 3
EXIT_DISTINGUISHED = 4
EXIT_INCONCLUSIVE = 5
EXIT_DISAGREE = 6

_VERDICT_EXIT = {
    machine.QUIESCENT: EXIT_OK,
    machine.FUEL_EXHAUSTED: EXIT_FUEL,
    machine.STARVED: EXIT_STARVED,
}
_BISIM_EXIT = {bisim.BISIMILAR: EXIT_OK, bisim.DISTINGUISHED: EXIT_DISTINGUISHED, bisim.INCONCLUSIVE: EXIT_INCONCLUSIVE}


class Config:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.mode = getattr(args, "mode", None)
        self.signer = resources.NULL_SIGNER
        keys = getattr(args, "key", None) or []
        if keys:
            self.signer = resources.HmacSigner(Path(k).read_bytes() for k in keys)

    def policy(self):
        a = self.args
        if a.policy == "rand":
            return machine.Random(a.seed)
        return machine.DETERMINISTIC

    def load(self, path: str):
        mode = {"plain": "plain", "rb": "rb"}.get(self.mode)
        return parse_state(Path(path).read_bytes(), mode)


def _write(path: Optional[str], text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _enabled(s, cfg: Config) -> list:
    if isinstance(s, RState):
        return resources.enabled_rb(s, cfg.signer)
    return machine.enabled(s)


def _is_starved(s, cfg: Config) -> bool:
    return isinstance(s, RState) and not resources.enabled_rb(s, cfg.signer) and bool(machine.enabled(s.project()))


def cmd_run(args, out) -> int:
    cfg = Config(args)
    s = cfg.load(args.file)
    if args.policy == "exh":
        return _run_exhaustive(s, cfg, out)
    if isinstance(s, RState):
        result = resources.run_rb(s, cfg.policy(), args.fuel, cfg.signer)
    else:
        result = machine.run(s, cfg.policy(), args.fuel)
    if args.trace:
        _write(args.trace, "".join(line + "\n" for line in machine.trace_lines(result.trace)), out)
    _write(args.out, print_state(result.final), out)
    print(f"; {result.verdict} after {len(result.trace)} steps", file=sys.stderr)
    return _VERDICT_EXIT[result.verdict]


def _run_exhaustive(s, cfg: Config, out) -> int:
    # every run at once: fuel bounds the run length, and a run that would go on longer counts as exhausted
    lts = _explore(s, cfg, min(cfg.args.fuel, cfg.args.max_depth))
    succ = lts.successors()
    finals = [lts.nodes[n] for n in range(len(lts.nodes)) if not succ[n]]
    text = "\n".join(print_state(f) for f in finals)
    _write(cfg.args.out, text, out)
    if lts.truncated:
        return EXIT_FUEL
    if finals and all(_is_starved(f, cfg) for f in finals):
        return EXIT_STARVED
    return EXIT_OK


def cmd_step(args, out) -> int:
    cfg = Config(args)
    s = cfg.load(args.file)
    options = _enabled(s, cfg)
    if not options:
        out.write(print_state(s))
        return EXIT_STARVED if _is_starved(s, cfg) else EXIT_OK
    chosen = options if args.policy == "exh" else [cfg.policy().choose(options)]
    for n, tr in enumerate(chosen):
        out.write(json.dumps(tr.record(n), ensure_ascii=False) + "\n")
    if args.policy != "exh" and args.out:
        _write(args.out, print_state(chosen[0].next), out)
    return EXIT_OK


def _explore(s, cfg: Config, depth: Optional[int] = None) -> bisim.LTS:
    a = cfg.args
    depth = a.max_depth if depth is None else depth
    if isinstance(s, RState):
        barb = bisim.ledger_barbs if getattr(a, "with_ledger", False) else bisim.state_barbs
        return bisim.explore(s, _successors_rb(cfg), barb, a.max_nodes, depth, a.jobs)
    return bisim.explore_state(s, a.max_nodes, depth, False, a.jobs)


def _successors_rb(cfg: Config):
    signer = cfg.signer
    if signer is resources.NULL_SIGNER:
        return bisim.rstate_successors
    return _SignedSuccessors(signer)


class _SignedSuccessors:
    """Picklable successor function bound to a signer, for parallel exploration."""

    def __init__(self, signer):
        self.signer = signer

    def __call__(self, s):
        return [(ct.label.value, ct.next) for ct in resources.enabled_rb(s, self.signer)]


def cmd_explore(args, out) -> int:
    cfg = Config(args)
    s = cfg.load(args.file)
    lts = _explore(s, cfg)
    header = {"nodes": len(lts.nodes), "edges": len(lts.edges), "truncated": lts.truncated, "complete": lts.complete}
    out.write(json.dumps(header) + "\n")
    for n, node in enumerate(lts.nodes):
        rec = {"node": n, "barbs": [print_term(t) for t in bisim.barbs(node)], "state": print_state(node)}
        out.write(json.dumps(rec, ensure_ascii=False) + "\n")
    for a, label, b in lts.edges:
        out.write(json.dumps({"edge": [a, b], "rule": label}) + "\n")
    return EXIT_OK if lts.complete else EXIT_INCONCLUSIVE


def _path_records(u: bisim.LTS, path: tuple, cfg: Config) -> list:
    """Trace records for consecutive nodes of ``path`` in the union LTS."""
    recs = []
    for n, (x, y) in enumerate(zip(path, path[1:])):
        src, dst = u.nodes[x][1], u.nodes[y][1]
        tr = next(t for t in _enabled(src, cfg) if t.next == dst)
        recs.append(tr.record(n))
    return recs


def cmd_bisim(args, out) -> int:
    cfg = Config(args)
    s1 = cfg.load(args.file_a)
    s2 = cfg.load(args.file_b)
    a = _explore(s1, cfg)
    b = _explore(s2, cfg)
    res = bisim.weak_bisim_lts(a, b)
    out.write(res.verdict + "\n")
    if res.verdict == bisim.DISTINGUISHED:
        u = res.union
        for rnd, step in enumerate(res.witness):
            out.write(json.dumps({"round": rnd, "side": step.side}) + "\n")
            for rec in _path_records(u, step.path, cfg):
                out.write(json.dumps(rec, ensure_ascii=False) + "\n")
            out.write(json.dumps({"reply": 2 if step.side == 1 else 1}) + "\n")
            for rec in _path_records(u, step.reply, cfg):
                out.write(json.dumps(rec, ensure_ascii=False) + "\n")
        x, y = res.final_pair
        wb = bisim.weak_barbs(u, bisim.closure(u))
        final = {"left": _barb_texts(wb[x]), "right": _barb_texts(wb[y])}
        out.write(json.dumps({"distinguishing_barbs": final}, ensure_ascii=False) + "\n")
    return _BISIM_EXIT[res.verdict]


def _barb_texts(preds: frozenset) -> list:
    """Weak barbs as printed terms, each repeated up to its highest multiplicity."""
    most: dict = {}
    for t, n in preds:
        if not isinstance(t, Term):
            continue
        most[t] = max(most.get(t, 0), n)
    return [print_term(t) for t in msort(most) for _ in range(most[t])]


def cmd_compile_rho(args, out) -> int:
    cfg = Config(args)
    s = cfg.load(args.file)
    out.write(pretty(compile_meaning(s, signer=cfg.signer)) + "\n")
    if args.check:
        report = check_correctness(s, fuel=args.max_depth, max_nodes=args.max_nodes, signer=cfg.signer, jobs=args.jobs)
        verdict = "agree" if report.agree else ("disagree" if report.complete else "incomplete")
        out.write(f"; check: {verdict} ({report.metta_nodes} machine states, {report.rho_nodes} rho processes)\n")
        if not report.agree:
            return EXIT_DISAGREE
    return EXIT_OK


def cmd_fmt(args, out) -> int:
    cfg = Config(args)
    _write(args.out, print_state(cfg.load(args.file)), out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mettasem", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, run_flags=False, bounds=False):
        sp.add_argument("--mode", choices=("plain", "rb"), default=None,
                        help="force the state kind; by default it follows the file")
        sp.add_argument("--key", action="append", metavar="FILE", help="raw private key bytes (repeatable)")
        if run_flags:
            sp.add_argument("--fuel", type=int, default=1000)
            sp.add_argument("--policy", choices=("det", "rand", "exh"), default="det")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--trace", metavar="FILE")
            sp.add_argument("--out", metavar="FILE", help="where to write the resulting state (default stdout)")
        if bounds or run_flags:
            sp.add_argument("--max-nodes", type=int, default=10_000)
            sp.add_argument("--max-depth", type=int, default=1_000)
            sp.add_argument("--jobs", type=int, default=1)

    sp = sub.add_parser("run", help="run to quiescence or until fuel runs out")
    sp.add_argument("file")
    common(sp, run_flags=True)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("step", help="show one step (or every enabled step with --policy exh)")
    sp.add_argument("file")
    common(sp, run_flags=True)
    sp.set_defaults(func=cmd_step)

    sp = sub.add_parser("explore", help="print the bounded transition system")
    sp.add_argument("file")
    sp.add_argument("--with-ledger", action="store_true", help="count the ledger as a barb")
    common(sp, bounds=True)
    sp.set_defaults(func=cmd_explore)

    sp = sub.add_parser("bisim", help="compare two states up to weak barbed bisimilarity")
    sp.add_argument("file_a")
    sp.add_argument("file_b")
    sp.add_argument("--with-ledger", action="store_true", help="count the ledger as a barb")
    common(sp, bounds=True)
    sp.set_defaults(func=cmd_bisim)

    sp = sub.add_parser("compile-rho", help="print the rho translation of a state")
    sp.add_argument("file")
    sp.add_argument("--check", action="store_true", help="also compare stopped barbs with the machine")
    common(sp, bounds=True)
    sp.set_defaults(func=cmd_compile_rho)

    sp = sub.add_parser("fmt", help="reprint a state canonically")
    sp.add_argument("file")
    sp.add_argument("--out", metavar="FILE")
    common(sp)
    sp.set_defaults(func=cmd_fmt)
    return p


def main(argv: Optional[list] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(exc.render(), file=sys.stderr)
        return EXIT_PARSE
    except (OSError, UnicodeDecodeError) as exc:
        print(f"mettasem: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
