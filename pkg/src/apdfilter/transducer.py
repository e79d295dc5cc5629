"""Synchronizing filter transducers.

The filter is the deterministic tracker of all domains at once, with every
forbidden (state, letter) pair filled in by a resynchronization transition.
The resynchronization target is found by intersecting the automaton of
"imagined pasts plus the forbidden letter" with the tracker and scanning
candidate sets ordered first by how specific a state is (subset-tag size)
and then by how much imagined past supports it (path length), taking the
first singleton.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

from .automata import (
    Alphabet,
    Domain,
    FiniteAutomaton,
    determinize,
    disjoint_union,
    forbidden_extension,
    forbidden_pairs,
    intersect,
    reverse_domain,
    zero_relabel,
)


@dataclass(frozen=True)
class DomainLabel:
    """Position lies inside domain ``index`` (1-based)."""

    index: int


@dataclass(frozen=True)
class DomainBreak:
    """Domain-to-domain jump between the named filter states.

    Stack- and gap-derived breaks carry no state pair; the endpoints are
    then ``None``.
    """

    source: int | None = None
    target: int | None = None


@dataclass(frozen=True)
class Ambiguous:
    """Classification is ambiguous or undetermined (serialized ``lam``)."""


AMBIGUOUS = Ambiguous()

OutputSymbol = Union[DomainLabel, DomainBreak, Ambiguous]


@dataclass(frozen=True)
class ResyncReport:
    """Where one forbidden transition was redirected and why.

    ``candidates`` is the nonempty part of the examined table, ordered:
    for each (specificity, past length) in scan order, the candidate
    tracker states found there.
    """

    state: int
    symbol: str
    target: int
    specificity: int
    past_length: int
    candidates: tuple[tuple[tuple[int, int], frozenset[int]], ...]


class ResyncError(RuntimeError):
    """No singleton candidate set inside the bounded scan."""

    def __init__(self, state, symbol, candidates):
        self.state = state
        self.symbol = symbol
        self.candidates = candidates
        table = ", ".join(f"({i},{l})={sorted(ss)}" for (i, l), ss in candidates)
        super().__init__(
            f"no unambiguous resynchronization state for ({state}, {symbol!r}); "
            f"candidate sets: {table or 'none'}"
        )


@dataclass(frozen=True)
class Transducer:
    """Finite-state filter over ``(input letter, output symbol)`` pairs.

    The input projection is deterministic by construction; a fully built
    filter is also input-complete, so it transduces any string.  State tags
    are the subset tags of the underlying tracker when known.
    """

    alphabet: Alphabet
    state_count: int
    start: int
    finals: frozenset[int]
    transitions: frozenset[tuple[int, int, OutputSymbol, int]]
    domain_count: int
    state_tags: tuple[frozenset[int], ...] | None = None
    resync_reports: tuple[ResyncReport, ...] = ()

    def __post_init__(self):
        seen = set()
        for (s, sym, _out, _d) in self.transitions:
            if (s, sym) in seen:
                raise ValueError(f"input not deterministic at ({s}, {sym})")
            seen.add((s, sym))

    @cached_property
    def arcs(self) -> dict[tuple[int, int], tuple[OutputSymbol, int]]:
        return {(s, sym): (out, d) for (s, sym, out, d) in self.transitions}

    def input_automaton(self) -> FiniteAutomaton:
        return FiniteAutomaton(
            alphabet=self.alphabet,
            state_count=self.state_count,
            starts=frozenset([self.start]),
            finals=self.finals,
            transitions=frozenset((s, sym, d) for (s, sym, _out, d) in self.transitions),
            state_tags=self.state_tags,
        )

    def input_complete(self) -> bool:
        arcs = self.arcs
        return all(
            (s, sym) in arcs for s in range(self.state_count) for sym in range(len(self.alphabet))
        )


@dataclass
class TransduceStats:
    lookups: int = 0


def _assemble_tracker(domains: Sequence[Domain]) -> FiniteAutomaton:
    if not domains:
        raise ValueError("need at least one domain")
    return determinize(disjoint_union([d.fa for d in domains]))


def _domain_of_tag(tag: frozenset[int], union_tags) -> int | None:
    """1-based domain index when every tagged state comes from one domain."""
    origins = {union_tags[member][0] for member in tag}
    if len(origins) == 1:
        return next(iter(origins)) + 1
    return None


def base_transducer(domains: Sequence[Domain]) -> Transducer:
    """Tracker transitions labeled with their domain, or the ambiguity mark
    when the target state straddles domains."""
    union = disjoint_union([d.fa for d in domains])
    tracker = determinize(union)
    transitions = set()
    for (s, sym, d) in tracker.transitions:
        idx = _domain_of_tag(tracker.state_tags[d], union.state_tags)
        out: OutputSymbol = DomainLabel(idx) if idx is not None else AMBIGUOUS
        transitions.add((s, sym, out, d))
    return Transducer(
        alphabet=tracker.alphabet,
        state_count=tracker.state_count,
        start=0,
        finals=tracker.finals,
        transitions=frozenset(transitions),
        domain_count=len(domains),
        state_tags=tracker.state_tags,
    )


def _linear_chain(single_symbol_dfa: FiniteAutomaton) -> list[int]:
    """States of a deterministic one-letter automaton in walk order.

    Such an automaton is a chain that either dead-ends or closes into a
    loop; the walk from the start visits every state once.
    """
    state = next(iter(single_symbol_dfa.starts))
    chain = []
    seen = set()
    while state is not None and state not in seen:
        chain.append(state)
        seen.add(state)
        state = single_symbol_dfa.step_det(state, 0)
    return chain


def resync(tracker: FiniteAutomaton, state: int, symbol: str) -> ResyncReport:
    """Choose the state to jump to for a forbidden (state, letter) pair.

    Builds the resynchronization automaton (determinized pasts-plus-letter
    intersected with the tracker), reads off candidate target states per
    imagined-past length from the one-letter squashed chain, and returns
    the first singleton in the (specificity, past length) dictionary order.
    """
    sym = tracker.alphabet.index(symbol)
    if sym in tracker.transition_table[state]:
        raise ValueError(f"({state}, {symbol!r}) is not forbidden")
    extension = forbidden_extension(tracker, state, sym)
    resync_fa = intersect(determinize(extension), tracker)
    squashed = determinize(zero_relabel(resync_fa))
    chain = _linear_chain(squashed)
    # candidate tracker states per past length: project the final
    # resynchronization states found at each chain position
    per_length: list[frozenset[int]] = []
    for chain_state in chain:
        members = squashed.state_tags[chain_state]
        per_length.append(
            frozenset(
                resync_fa.state_tags[r][1] for r in members if r in resync_fa.finals
            )
        )
    # candidate tracker states per specificity: subset-tag size
    by_size: dict[int, set[int]] = {}
    for s, tag in enumerate(tracker.state_tags):
        by_size.setdefault(len(tag), set()).add(s)
    max_specificity = len(tracker.state_tags[next(iter(tracker.starts))])
    examined = []
    winner = None
    for i in range(1, max_specificity + 1):
        sized = by_size.get(i, set())
        if not sized:
            continue
        for l, candidates in enumerate(per_length):
            hit = frozenset(sized & candidates)
            if hit:
                examined.append(((i, l), hit))
            if len(hit) == 1 and winner is None:
                winner = (next(iter(hit)), i, l)
        if winner is not None:
            break
    if winner is None:
        raise ResyncError(state, symbol, tuple(examined))
    target, specificity, past_length = winner
    return ResyncReport(
        state=state,
        symbol=symbol,
        target=target,
        specificity=specificity,
        past_length=past_length,
        candidates=tuple(examined),
    )


def build_filter(domains: Sequence[Domain]) -> Transducer:
    """Complete filter: the base transducer plus a break transition for
    every forbidden (state, letter) pair of the tracker."""
    base = base_transducer(domains)
    tracker = base.input_automaton()
    transitions = set(base.transitions)
    reports = []
    for (s, sym) in sorted(forbidden_pairs(tracker)):
        report = resync(tracker, s, tracker.alphabet.symbols[sym])
        reports.append(report)
        transitions.add((s, sym, DomainBreak(s, report.target), report.target))
    return Transducer(
        alphabet=base.alphabet,
        state_count=base.state_count,
        start=base.start,
        finals=base.finals,
        transitions=frozenset(transitions),
        domain_count=base.domain_count,
        state_tags=base.state_tags,
        resync_reports=tuple(reports),
    )


def break_table(t: Transducer) -> dict[tuple[int, int], int]:
    """Stable negative codes for break outputs, assigned in first-use order
    over transitions sorted by (state, symbol)."""
    table: dict[tuple[int, int], int] = {}
    for (s, sym, out, d) in sorted(
        t.transitions, key=lambda tr: (tr[0], tr[1])
    ):
        if isinstance(out, DomainBreak):
            key = (out.source, out.target)
            if key not in table:
                table[key] = -(len(table) + 1)
    return table


def transduce(
    t: Transducer,
    sigma: str | Sequence[str],
    mode: str = "linear",
    stats: TransduceStats | None = None,
) -> list[OutputSymbol]:
    """Run the filter over a string, one output symbol per input letter.

    Circular mode reads the string twice from the start state and keeps
    only the second pass, so the state has synchronized to the periodic
    content before any output is recorded.
    """
    if mode not in ("linear", "circular"):
        raise ValueError(f"bad mode {mode!r}")
    symbols = [t.alphabet.index(tok) for tok in sigma]
    if mode == "circular" and not symbols:
        raise ValueError("circular mode needs a non-empty string")
    arcs = t.arcs
    state = t.start
    passes = 2 if mode == "circular" else 1
    outputs: list[OutputSymbol] = []
    for p in range(passes):
        record = p == passes - 1
        if record:
            outputs = []
        for sym in symbols:
            arc = arcs.get((state, sym))
            if arc is None:
                raise ValueError(
                    f"transducer has no transition from state {state} on "
                    f"{t.alphabet.symbols[sym]!r}"
                )
            if stats is not None and record:
                stats.lookups += 1
            out, state = arc
            if record:
                outputs.append(out)
    return outputs


def _fill_gaps(
    combined: list[OutputSymbol],
    forward_breaks: list[int],
    backward_breaks: list[int],
    circular: bool,
) -> None:
    """Mark everything between a right-to-left break and the next
    left-to-right break; those cells sit inside an undetected defect."""
    n = len(combined)
    fwd = sorted(forward_breaks)
    for b in backward_breaks:
        nxt = next((f for f in fwd if f >= b), None)
        if nxt is None and circular and fwd:
            nxt = fwd[0] + n  # wrap around
        if nxt is None:
            continue
        for p in range(b, nxt + 1):
            pos = p % n if circular else p
            if pos >= n:
                break
            if not isinstance(combined[pos], DomainBreak):
                combined[pos] = DomainBreak()


def bidirectional(
    domains: Sequence[Domain],
    sigma: str | Sequence[str],
    mode: str = "linear",
    filters: tuple[Transducer, Transducer] | None = None,
) -> list[OutputSymbol]:
    """Combine a left-to-right and a right-to-left pass.

    Per position: the shared domain label when both passes agree, a break
    when either pass breaks there or the position lies in a filled gap,
    and the ambiguity mark otherwise.  ``filters`` lets callers reuse
    prebuilt (forward, backward) filters across many strings.
    """
    if filters is None:
        filters = bidirectional_filters(domains)
    forward_t, backward_t = filters
    tokens = list(sigma)
    forward = transduce(forward_t, tokens, mode)
    backward = transduce(backward_t, tokens[::-1], mode)[::-1]
    combined: list[OutputSymbol] = []
    for fwd, bwd in zip(forward, backward):
        if isinstance(fwd, DomainBreak):
            combined.append(fwd)
        elif isinstance(bwd, DomainBreak):
            combined.append(bwd)
        elif isinstance(fwd, DomainLabel) and fwd == bwd:
            combined.append(fwd)
        else:
            combined.append(AMBIGUOUS)
    _fill_gaps(
        combined,
        [i for i, o in enumerate(forward) if isinstance(o, DomainBreak)],
        [i for i, o in enumerate(backward) if isinstance(o, DomainBreak)],
        circular=mode == "circular",
    )
    return combined


def bidirectional_filters(domains: Sequence[Domain]) -> tuple[Transducer, Transducer]:
    reversed_domains = [reverse_domain(d) for d in domains]
    return build_filter(domains), build_filter(reversed_domains)
