"""Command-line interface.

Exit codes: 0 positive verdict/success, 1 negative verdict, 2 usage or
parse error, 3 indeterminate (not found within caps).  ``--machine``
switches to one ``key<TAB>value`` line per result.  Diagnostics go to the
error stream; ``HOCA_LOG`` in {off, info, debug} controls verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import re
import sys

from .automaton import format_automaton, parse_automaton
from .errors import HocaError, InvalidEncodingError, ParseError
from .hoca2 import (
    format_l2_config,
    hocs2_from_automaton,
    normalize,
    parse_l2_config,
)
from .oracle import Caps, alt_reach_oracle, reach_oracle, val_check
from .pds import parse_pds  # noqa: F401  (re-exported for harnesses)
from .regnotions import parse_two_store, two_store_membership
from .regreach import bounded_post_star, bounded_pre_star
from .storage import parse_op, parse_storage
from .summaries import INF, build_summary_dfa, compute_return_table, reach_hoca
from .trees import decode, encode, format_tree, parse_tree, parse_tree_automaton

log = logging.getLogger("hoca")

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3


class _Out:
    def __init__(self, machine: bool):
        self.machine = machine

    def emit(self, key: str, value, human: str | None = None) -> None:
        if self.machine:
            print(f"{key}\t{value}")
        else:
            print(human if human is not None else f"{key}: {value}")


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}")


def _caps(args) -> Caps:
    return Caps(
        max_pd_height=(args.max_height,),
        max_counter=args.max_counter,
        max_steps=args.max_steps,
    )


def _parse_state_config(text: str):
    m = re.fullmatch(r"\(\s*([A-Za-z0-9_']+)\s*,\s*(.*)\)", text.strip())
    if not m:
        raise ParseError(f"expected a configuration literal (state,(sym,n)...): {text!r}")
    return m.group(1), parse_l2_config(m.group(2))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_reach(args) -> int:
    aut = parse_automaton(_read(args.file))
    target = args.target or aut.final
    if target is None:
        raise ParseError("no --target given and no final state in the file")
    normalized, drain = normalize(aut, target)
    verdict = reach_hoca(normalized, drain)
    out = _Out(args.machine)
    out.emit("verdict", "REACHABLE" if verdict else "UNREACHABLE",
             "REACHABLE" if verdict else "UNREACHABLE")
    return EXIT_POSITIVE if verdict else EXIT_NEGATIVE


def _cmd_oracle(args) -> int:
    aut = parse_automaton(_read(args.file))
    target = args.target or aut.final
    if target is None:
        raise ParseError("no --target given and no final state in the file")
    caps = _caps(args)
    res = (alt_reach_oracle if aut.universal else reach_oracle)(aut, target, caps)
    out = _Out(args.machine)
    out.emit("verdict", "REACHABLE" if res.found else "NOT-FOUND-WITHIN-CAPS",
             "REACHABLE" if res.found else "NOT-FOUND-WITHIN-CAPS")
    if res.found and res.trace is not None and not args.machine:
        for st, cfg in zip(res.trace.states, res.trace.configs):
            from .storage import format_config

            print(f"  {st} | {format_config(aut.storage, cfg)}")
    return EXIT_POSITIVE if res.found else EXIT_INDETERMINATE


def _cmd_table(args) -> int:
    aut = hocs2_from_automaton(parse_automaton(_read(args.file)))
    table = compute_return_table(aut)
    for sym in aut.alphabet:
        for p in aut.states:
            for q in aut.states:
                v = table.get(sym, p, q)
                text = "inf" if v == INF else str(int(v))
                print(f"{sym}\t{p}\t{q}\t{text}")
    return EXIT_POSITIVE


def _cmd_summary_dfa(args) -> int:
    aut = hocs2_from_automaton(parse_automaton(_read(args.file)))
    dfa = build_summary_dfa(aut)
    out = _Out(args.machine)
    out.emit("states", dfa.num_states, f"distinct summary states: {dfa.num_states}")
    for i, vi in enumerate(dfa.chain):
        out.emit(f"M{i}", f"s{vi}", f"M_{i} -> s{vi}")
    for i, value in enumerate(dfa.values):
        parts = []
        for sym, rets, loops in value:
            r = ",".join(sorted(f"{p}>{q}" for p, q in rets)) or "-"
            l = ",".join(sorted(f"{p}>{q}" for p, q in loops)) or "-"
            parts.append(f"{sym}:ret={r}:loops={l}")
        out.emit(f"s{i}", ";".join(parts), f"s{i} = {';'.join(parts)}  -> s{dfa.succ[i]}")
    return EXIT_POSITIVE


def _cmd_encode(args) -> int:
    state, config = _parse_state_config(args.config)
    print(format_tree(encode((state, config))))
    return EXIT_POSITIVE


def _cmd_decode(args) -> int:
    tree = parse_tree(args.tree)
    try:
        state, config = decode(tree)
    except InvalidEncodingError as exc:
        print(f"INVALID: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    print(f"({state},{format_l2_config(config)})")
    return EXIT_POSITIVE


def _cmd_prestar(args) -> int:
    return _regreach(args, bounded_pre_star)


def _cmd_poststar(args) -> int:
    return _regreach(args, bounded_post_star)


def _regreach(args, op) -> int:
    aut = hocs2_from_automaton(parse_automaton(_read(args.file)))
    ta = parse_tree_automaton(_read(args.set))
    caps = _caps(args)
    queries = None
    if args.query:
        queries = [_parse_state_config(q) for q in args.query]
    result = op(aut, ta, caps, queries)
    out = _Out(args.machine)
    all_in = True
    for (state, config), verdict in result.verdicts.items():
        text = "IN" if verdict else "NOT-WITHIN-CAPS"
        out.emit(f"({state},{format_l2_config(config)})", text)
        all_in = all_in and verdict
    return EXIT_POSITIVE if all_in else EXIT_INDETERMINATE


_PASSES = {
    "elim-symbols": "eliminate_level2_symbols",
    "pop-to-invpush": "pop_to_invpush",
    "invpush-to-pop": "invpush_to_pop",
}


def _cmd_transform(args) -> int:
    from . import transforms

    aut = parse_automaton(_read(args.file))
    fn = getattr(transforms, _PASSES[getattr(args, "pass")])
    print(format_automaton(fn(aut)), end="")
    return EXIT_POSITIVE


def _cmd_val(args) -> int:
    storage = parse_storage(args.storage)
    seq = []
    for token in args.seq.split():
        m = re.fullmatch(r"\[([^\]]*)\]", token)
        if m:
            from .automaton import parse_test_constraints

            constraints = parse_test_constraints(m.group(1))
            if len(constraints) != 1:
                raise ParseError(f"one test per letter: {token!r}")
            ((test, value),) = constraints.items()
            seq.append((test, value))
        else:
            seq.append(parse_op(token))
    ok = val_check(storage, seq)
    out = _Out(args.machine)
    out.emit("verdict", "VALID" if ok else "INVALID", "VALID" if ok else "INVALID")
    return EXIT_POSITIVE if ok else EXIT_NEGATIVE


def _cmd_two_store(args) -> int:
    tsa = parse_two_store(_read(args.file))
    state, config = _parse_state_config(args.config)
    ok = two_store_membership(tsa, state, config)
    out = _Out(args.machine)
    out.emit("verdict", "ACCEPT" if ok else "REJECT", "ACCEPT" if ok else "REJECT")
    return EXIT_POSITIVE if ok else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# Wiring
# ---------------------------------------------------------------------------

def _add_caps(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-height", type=int, default=8)
    p.add_argument("--max-counter", type=int, default=16)
    p.add_argument("--max-steps", type=int, default=100_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hoca", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--machine", action="store_true", help="machine-readable output")
        p.set_defaults(fn=fn)
        return p

    p = add("reach", _cmd_reach, help="exact control-state reachability")
    p.add_argument("file")
    p.add_argument("--target")

    p = add("oracle", _cmd_oracle, help="bounded explicit-state search")
    p.add_argument("file")
    p.add_argument("--target")
    _add_caps(p)

    p = add("table", _cmd_table, help="print the returns table")
    p.add_argument("file")

    p = add("summary-dfa", _cmd_summary_dfa, help="print the summary word automaton")
    p.add_argument("file")

    p = add("encode", _cmd_encode, help="encode a configuration as a tree term")
    p.add_argument("config")

    p = add("decode", _cmd_decode, help="decode a tree term")
    p.add_argument("tree")

    for name, fn in (("prestar", _cmd_prestar), ("poststar", _cmd_poststar)):
        p = add(name, fn, help=f"bounded {name} against a tree-automaton set")
        p.add_argument("file")
        p.add_argument("--set", required=True)
        p.add_argument("--query", action="append")
        _add_caps(p)

    p = add("transform", _cmd_transform, help="run a storage-simulation pass")
    p.add_argument("file")
    p.add_argument("--pass", choices=sorted(_PASSES), required=True)

    p = add("val", _cmd_val, help="check a storage operation/test sequence")
    p.add_argument("storage")
    p.add_argument("seq")

    p = add("two-store", _cmd_two_store, help="2-store automaton membership")
    p.add_argument("file")
    p.add_argument("--config", required=True)

    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("HOCA_LOG", "off").lower()
    if level != "off":
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.DEBUG if level == "debug" else logging.INFO,
        )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except HocaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
