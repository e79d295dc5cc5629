"""Text serialization of filter transducers (``.tdx``).

Header lines give the alphabet, state count, start state, and domain
count; each transition line is ``trans s a OUT s'`` with OUT one of
``d<i>`` (domain label), ``brk<j>`` (break code), or ``lam`` (ambiguity).
A trailing table maps each ``brk<j>`` back to its state pair.  An optional
``hash`` line carries the digest of the domain file the filter was built
from, so later runs can flag a mismatched domain set.
"""

from __future__ import annotations

from .automata import Alphabet
from .transducer import (
    AMBIGUOUS,
    DomainBreak,
    DomainLabel,
    Transducer,
    break_table,
)


class TdxError(ValueError):
    pass


def save_transducer(t: Transducer, domains_digest: str | None = None) -> str:
    table = break_table(t)
    lines = [
        "alphabet " + " ".join(t.alphabet.symbols),
        f"states {t.state_count}",
        f"start {t.start}",
        f"domains {t.domain_count}",
    ]
    if domains_digest:
        lines.append(f"hash {domains_digest}")
    for (s, sym, out, d) in sorted(t.transitions, key=lambda tr: (tr[0], tr[1])):
        if isinstance(out, DomainLabel):
            code = f"d{out.index}"
        elif isinstance(out, DomainBreak):
            code = f"brk{-table[(out.source, out.target)]}"
        else:
            code = "lam"
        lines.append(f"trans {s} {t.alphabet.symbols[sym]} {code} {d}")
    for (source, target), number in sorted(table.items(), key=lambda kv: -kv[1]):
        lines.append(f"brk{-number} {source} {target}")
    return "\n".join(lines) + "\n"


def load_transducer(text: str) -> tuple[Transducer, str | None]:
    alphabet: Alphabet | None = None
    state_count = start = domains = None
    digest = None
    raw_transitions: list[tuple[int, str, str, int]] = []
    pairs: dict[int, tuple[int, int]] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        word = fields[0]
        try:
            if word == "alphabet":
                alphabet = Alphabet(tuple(fields[1:]))
            elif word == "states":
                state_count = int(fields[1])
            elif word == "start":
                start = int(fields[1])
            elif word == "domains":
                domains = int(fields[1])
            elif word == "hash":
                digest = fields[1]
            elif word == "trans":
                s, tok, code, d = fields[1], fields[2], fields[3], fields[4]
                raw_transitions.append((int(s), tok, code, int(d)))
            elif word.startswith("brk"):
                pairs[int(word[3:])] = (int(fields[1]), int(fields[2]))
            else:
                raise TdxError(f"line {line_no}: unknown directive {word!r}")
        except (IndexError, ValueError) as e:
            if isinstance(e, TdxError):
                raise
            raise TdxError(f"line {line_no}: malformed {word!r} line") from None
    if alphabet is None or state_count is None or start is None:
        raise TdxError("missing header line")
    transitions = set()
    for (s, tok, code, d) in raw_transitions:
        if code == "lam":
            out = AMBIGUOUS
        elif code.startswith("brk"):
            number = int(code[3:])
            if number not in pairs:
                raise TdxError(f"undeclared break code brk{number}")
            out = DomainBreak(*pairs[number])
        elif code.startswith("d"):
            out = DomainLabel(int(code[1:]))
        else:
            raise TdxError(f"bad output code {code!r}")
        transitions.add((s, alphabet.index(tok), out, d))
    if domains is None:
        domains = max(
            (out.index for (_s, _a, out, _d) in transitions if isinstance(out, DomainLabel)),
            default=1,
        )
    t = Transducer(
        alphabet=alphabet,
        state_count=state_count,
        start=start,
        finals=frozenset(range(state_count)),
        transitions=frozenset(transitions),
        domain_count=domains,
    )
    return t, digest
