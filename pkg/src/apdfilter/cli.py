"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 domain or filter construction
error (parse failures, invariant violations, failed resynchronization).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .ca import (
    SpaceTimeDiagram,
    evolve,
    filter_diagram,
    random_row,
    rule_from_number,
)
from .domspec import ParsedDomain, format_domain_spec, parse_domain_spec, spec_digest
from .optimizer import DEFAULT_MAX_PASSES, optimize
from .render import RenderPalette, emit_pgm, symbol_code
from .stackfilter import filter_global, filter_local
from .tdx import load_transducer, save_transducer
from .transducer import bidirectional, break_table, build_filter, transduce

PASS_CAP_VAR = "APDFILTER_MAX_OPTIMIZE_PASSES"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_text(path: str) -> str:
    return Path(path).read_text()


def _read_input(value: str) -> str:
    if value.startswith("@"):
        return _read_text(value[1:]).strip()
    return value


def _load_domains(path: str) -> tuple[str, list[ParsedDomain]]:
    text = _read_text(path)
    _alphabet, parsed = parse_domain_spec(text)
    return text, parsed


def _write(path: str | None, data: str | bytes):
    if isinstance(data, str):
        data = data.encode()
    if path is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(path).write_bytes(data)


def _max_passes() -> int:
    raw = os.environ.get(PASS_CAP_VAR)
    return int(raw) if raw else DEFAULT_MAX_PASSES


def _split_to_parsed(split_domains, originals) -> list[ParsedDomain]:
    out = []
    for sd, pd in zip(split_domains, originals):
        names = tuple(
            f"{pd.state_names[s]}.{j}" for (s, j) in sd.members
        )
        out.append(ParsedDomain(name=pd.name, domain=sd.domain, state_names=names))
    return out


def _cmd_build(args) -> int:
    text, parsed = _load_domains(args.domains)
    domains = [pd.domain for pd in parsed]
    if args.optimize:
        domains = [sd.domain for sd in optimize(domains, _max_passes())]
    t = build_filter(domains)
    _write(args.output, save_transducer(t, domains_digest=spec_digest(text)))
    return 0


def _cmd_optimize(args) -> int:
    _text, parsed = _load_domains(args.domains)
    split = optimize([pd.domain for pd in parsed], _max_passes())
    before = sum(pd.domain.fa.state_count for pd in parsed)
    after = sum(sd.domain.fa.state_count for sd in split)
    out = format_domain_spec(
        parsed[0].domain.alphabet, _split_to_parsed(split, parsed), nonrecurrent=True
    )
    _write(args.output, out)
    print(f"states_before={before}, states_after={after}", file=sys.stderr)
    return 0


def _cmd_stack(args) -> int:
    _text, parsed = _load_domains(args.domains)
    domains = [pd.domain for pd in parsed]
    sigma = _read_input(args.input)
    lines = []
    if args.periodic:
        cover = filter_global(domains, sigma)
        lines.append(f"whole_string={'true' if cover.whole_string else 'false'}")
    else:
        cover = filter_local(domains, sigma)
    lines.extend(f"{a},{b}" for (a, b) in cover.intervals)
    _write(args.output, "\n".join(lines) + "\n")
    return 0


def _cmd_run(args) -> int:
    t, digest = load_transducer(_read_text(args.filter))
    sigma = _read_input(args.input)
    mode = "circular" if args.circular else "linear"
    if args.bidi:
        if not args.domains:
            raise UsageError("--bidi needs --domains (the reverse filter is built from them)")
        text, parsed = _load_domains(args.domains)
        if digest is not None and spec_digest(text) != digest:
            print(
                "warning: filter was built from a different domain file",
                file=sys.stderr,
            )
        out = bidirectional([pd.domain for pd in parsed], sigma, mode)
        table = None
    else:
        out = transduce(t, sigma, mode)
        table = break_table(t)
    if args.format == "pgm":
        from .ca import LabeledDiagram

        _write(args.output, emit_pgm(LabeledDiagram((tuple(out),)), RenderPalette(t.domain_count)))
    else:
        _write(args.output, ",".join(str(symbol_code(s, table)) for s in out) + "\n")
    return 0


def _parse_init(init: str, k: int, width: int | None) -> tuple[int, ...]:
    if init.startswith("random:"):
        if width is None:
            raise UsageError("random initial conditions need --width")
        return random_row(k, width, int(init.split(":", 1)[1]))
    if init.startswith("word:"):
        body = init.split(":", 1)[1]
        word, _, reps = body.partition("^")
        row = tuple(int(c) for c in word) * (int(reps) if reps else 1)
    elif init.startswith("@"):
        row = tuple(int(c) for c in _read_text(init[1:]).strip())
    else:
        raise UsageError(f"bad --init {init!r}; use random:SEED, word:W[^N], or @FILE")
    if width is not None and width != len(row):
        raise UsageError(f"--width {width} does not match initial row length {len(row)}")
    return row


def _cmd_ca(args) -> int:
    rule = rule_from_number(args.k, args.r, args.rule)
    if args.k > 10:
        raise UsageError("text output supports k up to 10")
    row = _parse_init(args.init, args.k, args.width)
    diagram = evolve(rule, row, args.steps)
    text = "\n".join("".join(str(v) for v in r) for r in diagram.rows) + "\n"
    _write(args.output, text)
    return 0


def _read_diagram(path: str) -> SpaceTimeDiagram:
    rows = []
    for line in _read_text(path).splitlines():
        line = line.strip()
        if line:
            rows.append(tuple(int(c) for c in line))
    if not rows:
        raise UsageError(f"{path}: empty diagram")
    k = max(max(row) for row in rows) + 1
    return SpaceTimeDiagram(k=max(k, 2), rows=tuple(rows))


def _cmd_ca_filter(args) -> int:
    diagram = _read_diagram(args.input)
    table = None
    if args.method == "transducer":
        if not args.filter:
            raise UsageError("--method transducer needs --filter")
        t, _digest = load_transducer(_read_text(args.filter))
        labeled = filter_diagram("transducer", t, diagram)
        domain_count = t.domain_count
        table = break_table(t)
    else:
        if not args.domains:
            raise UsageError(f"--method {args.method} needs --domains")
        _text, parsed = _load_domains(args.domains)
        domains = [pd.domain for pd in parsed]
        labeled = filter_diagram(args.method, domains, diagram)
        domain_count = len(domains)
    if args.format == "csv":
        text = "\n".join(
            ",".join(str(symbol_code(s, table)) for s in row) for row in labeled.rows
        )
        _write(args.output, text + "\n")
    else:
        _write(args.output, emit_pgm(labeled, RenderPalette(domain_count)))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="apdfilter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a filter transducer from domains")
    p.add_argument("--domains", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--optimize", action="store_true", help="split domain states first")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("optimize", help="split domain states for unambiguous resync")
    p.add_argument("--domains", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("stack", help="exact maximal-substring cover")
    p.add_argument("--domains", required=True)
    p.add_argument("--input", required=True, help="string or @file")
    p.add_argument("--periodic", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_stack)

    p = sub.add_parser("run", help="run a filter over a string")
    p.add_argument("--filter", required=True)
    p.add_argument("--input", required=True, help="string or @file")
    p.add_argument("--circular", action="store_true")
    p.add_argument("--bidi", action="store_true")
    p.add_argument("--domains", help="domain file (required for --bidi)")
    p.add_argument("--format", choices=("csv", "pgm"), default="csv")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("ca", help="evolve a cellular automaton")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--rule", type=int, required=True)
    p.add_argument("--width", type=int)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--init", required=True, help="random:SEED, word:W[^N], or @FILE")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_ca)

    p = sub.add_parser("ca-filter", help="filter a space-time diagram")
    p.add_argument("--method", choices=("stack", "transducer", "bidi"), required=True)
    p.add_argument("--filter", help=".tdx filter (transducer method)")
    p.add_argument("--domains", help="domain file (stack and bidi methods)")
    p.add_argument("--input", required=True, help="diagram file, one row per line")
    p.add_argument("--format", choices=("csv", "pgm"), default="pgm")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_ca_filter)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
