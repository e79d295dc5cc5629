"""Finite automata and the constructions the filtering algorithms build on.

States are dense integers ``0..state_count-1``.  Construction provenance is
kept in ``state_tags`` so downstream algorithms can consult it instead of
re-deriving it: determinization tags each state with its source subset,
intersection with the contributing pair, disjoint union with
``(input index, original state)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

Transition = tuple[int, int, int]  # (source, symbol index, target)

# provenance tag kinds
SubsetTag = frozenset[int]  # determinize: source states of the subset
ProductTag = tuple[int, int]  # intersect: (left state, right state)
OriginTag = tuple[int, int]  # disjoint_union: (input index, original state)


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of symbol tokens with dense indices."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("alphabet is empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet has duplicate symbols")
        for tok in self.symbols:
            if not tok or not tok.isprintable() or any(c.isspace() for c in tok):
                raise ValueError(f"bad alphabet token {tok!r}")

    def __len__(self):
        return len(self.symbols)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {tok: i for i, tok in enumerate(self.symbols)}

    def index(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise ValueError(f"unknown symbol {token!r}") from None

    def __contains__(self, token: str) -> bool:
        return token in self._index


@dataclass(frozen=True)
class FiniteAutomaton:
    """Nondeterministic finite automaton over an :class:`Alphabet`.

    ``transitions`` is a set of ``(source, symbol index, target)`` triples.
    ``state_tags``, when present, gives one provenance annotation per state.
    Instances are immutable; every operation below is a pure function.
    """

    alphabet: Alphabet
    state_count: int
    starts: frozenset[int]
    finals: frozenset[int]
    transitions: frozenset[Transition]
    state_tags: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "starts", frozenset(self.starts))
        object.__setattr__(self, "finals", frozenset(self.finals))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        if self.state_tags is not None:
            object.__setattr__(self, "state_tags", tuple(self.state_tags))
            if len(self.state_tags) != self.state_count:
                raise ValueError("state_tags length != state_count")
        n, k = self.state_count, len(self.alphabet)
        if n < 0:
            raise ValueError("negative state count")
        for s in self.starts | self.finals:
            if not 0 <= s < n:
                raise ValueError(f"state {s} out of range")
        for (src, sym, dst) in self.transitions:
            if not (0 <= src < n and 0 <= dst < n):
                raise ValueError(f"transition {(src, sym, dst)} references bad state")
            if not 0 <= sym < k:
                raise ValueError(f"transition {(src, sym, dst)} references bad symbol")

    @cached_property
    def transition_table(self) -> dict[int, dict[int, tuple[int, ...]]]:
        """Per-state map symbol index -> sorted target states."""
        raw: dict[int, dict[int, set[int]]] = {s: {} for s in range(self.state_count)}
        for (src, sym, dst) in self.transitions:
            raw[src].setdefault(sym, set()).add(dst)
        return {
            s: {sym: tuple(sorted(dsts)) for sym, dsts in row.items()}
            for s, row in raw.items()
        }

    @property
    def semi_deterministic(self) -> bool:
        """No two transitions share (source, symbol)."""
        return all(
            len(dsts) == 1 for row in self.transition_table.values() for dsts in row.values()
        )

    @property
    def deterministic(self) -> bool:
        return len(self.starts) == 1 and self.semi_deterministic

    def step(self, states: Iterable[int], sym: int) -> frozenset[int]:
        table = self.transition_table
        out: set[int] = set()
        for s in states:
            out.update(table[s].get(sym, ()))
        return frozenset(out)

    def step_det(self, state: int, sym: int) -> int | None:
        """Unique successor in a semi-deterministic automaton, or None."""
        dsts = self.transition_table[state].get(sym)
        if dsts is None:
            return None
        if len(dsts) != 1:
            raise ValueError(f"state {state} is not semi-deterministic on symbol {sym}")
        return dsts[0]

    def symbols_of(self, word: str | Sequence[str]) -> list[int]:
        return [self.alphabet.index(tok) for tok in word]


@dataclass(frozen=True)
class Domain:
    """Semi-deterministic automaton with every state both start and final.

    Such automata recognize factor-closed languages: any substring of an
    accepted string is accepted.  Strong connectivity is required of
    user-supplied domains (the domain-file parser enforces it) but not here,
    because split domains produced by the optimizer legitimately carry
    non-recurrent states.
    """

    fa: FiniteAutomaton

    def __post_init__(self):
        fa = self.fa
        all_states = frozenset(range(fa.state_count))
        if fa.state_count == 0:
            raise ValueError("domain has no states")
        if fa.starts != all_states or fa.finals != all_states:
            raise ValueError("domain states must all be start and final")
        if not fa.semi_deterministic:
            raise ValueError("domain is not semi-deterministic")

    @property
    def alphabet(self) -> Alphabet:
        return self.fa.alphabet


def determinize(fa: FiniteAutomaton) -> FiniteAutomaton:
    """Subset construction.  Result states are tagged with their source sets.

    Only subsets reachable from the start subset are materialized; a subset
    state is final iff it meets ``fa.finals``.  Numbering is breadth-first
    with symbols taken in alphabet order, so the result is canonical for a
    given input.
    """
    if not fa.starts:
        raise ValueError("no start states")
    k = len(fa.alphabet)
    start = frozenset(fa.starts)
    ids: dict[frozenset[int], int] = {start: 0}
    order: list[frozenset[int]] = [start]
    queue = deque([start])
    transitions: set[Transition] = set()
    while queue:
        cur = queue.popleft()
        cid = ids[cur]
        for sym in range(k):
            nxt = fa.step(cur, sym)
            if not nxt:
                continue
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            transitions.add((cid, sym, ids[nxt]))
    finals = frozenset(i for i, tag in enumerate(order) if tag & fa.finals)
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=len(order),
        starts=frozenset([0]),
        finals=finals,
        transitions=frozenset(transitions),
        state_tags=tuple(order),
    )


def intersect(a: FiniteAutomaton, b: FiniteAutomaton) -> FiniteAutomaton:
    """Product construction over reachable state pairs, tagged ``(left, right)``."""
    if a.alphabet != b.alphabet:
        raise ValueError("alphabet mismatch")
    k = len(a.alphabet)
    ta, tb = a.transition_table, b.transition_table
    start_pairs = sorted((p, q) for p in a.starts for q in b.starts)
    ids: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []
    queue: deque[tuple[int, int]] = deque()
    for pair in start_pairs:
        ids[pair] = len(order)
        order.append(pair)
        queue.append(pair)
    transitions: set[Transition] = set()
    while queue:
        (p, q) = queue.popleft()
        cid = ids[(p, q)]
        for sym in range(k):
            for pp in ta[p].get(sym, ()):
                for qq in tb[q].get(sym, ()):
                    pair = (pp, qq)
                    if pair not in ids:
                        ids[pair] = len(order)
                        order.append(pair)
                        queue.append(pair)
                    transitions.add((cid, sym, ids[pair]))
    finals = frozenset(
        i for i, (p, q) in enumerate(order) if p in a.finals and q in b.finals
    )
    return FiniteAutomaton(
        alphabet=a.alphabet,
        state_count=len(order),
        starts=frozenset(range(len(start_pairs))),
        finals=finals,
        transitions=frozenset(transitions),
        state_tags=tuple(order),
    )


def disjoint_union(fas: Sequence[FiniteAutomaton]) -> FiniteAutomaton:
    """Side-by-side union; states tagged ``(input index, original state)``."""
    if not fas:
        raise ValueError("empty disjoint union")
    alphabet = fas[0].alphabet
    for fa in fas[1:]:
        if fa.alphabet != alphabet:
            raise ValueError("alphabet mismatch")
    starts: set[int] = set()
    finals: set[int] = set()
    transitions: set[Transition] = set()
    tags: list[OriginTag] = []
    offset = 0
    for i, fa in enumerate(fas):
        starts.update(offset + s for s in fa.starts)
        finals.update(offset + s for s in fa.finals)
        transitions.update((offset + s, sym, offset + d) for (s, sym, d) in fa.transitions)
        tags.extend((i, s) for s in range(fa.state_count))
        offset += fa.state_count
    return FiniteAutomaton(
        alphabet=alphabet,
        state_count=offset,
        starts=frozenset(starts),
        finals=frozenset(finals),
        transitions=frozenset(transitions),
        state_tags=tuple(tags),
    )


def zero_relabel(fa: FiniteAutomaton) -> FiniteAutomaton:
    """Relabel every transition with the single symbol ``0``.

    Parallel edges collapse (transitions form a set); only reachability
    layers survive, which is all the linear-chain construction needs.
    """
    return FiniteAutomaton(
        alphabet=Alphabet(("0",)),
        state_count=fa.state_count,
        starts=fa.starts,
        finals=fa.finals,
        transitions=frozenset((s, 0, d) for (s, _sym, d) in fa.transitions),
        state_tags=fa.state_tags,
    )


def universal(alphabet: Alphabet) -> FiniteAutomaton:
    """One-state automaton accepting every string over ``alphabet``."""
    return FiniteAutomaton(
        alphabet=alphabet,
        state_count=1,
        starts=frozenset([0]),
        finals=frozenset([0]),
        transitions=frozenset((0, sym, 0) for sym in range(len(alphabet))),
    )


def empty_language(alphabet: Alphabet) -> FiniteAutomaton:
    """One-state automaton accepting nothing (complete sink)."""
    return FiniteAutomaton(
        alphabet=alphabet,
        state_count=1,
        starts=frozenset([0]),
        finals=frozenset(),
        transitions=frozenset((0, sym, 0) for sym in range(len(alphabet))),
    )


def complete(fa: FiniteAutomaton) -> FiniteAutomaton:
    """Add a sink state so every (state, symbol) has a transition."""
    k = len(fa.alphabet)
    missing = [
        (s, sym)
        for s in range(fa.state_count)
        for sym in range(k)
        if sym not in fa.transition_table[s]
    ]
    if not missing:
        return fa
    sink = fa.state_count
    transitions = set(fa.transitions)
    transitions.update((s, sym, sink) for (s, sym) in missing)
    transitions.update((sink, sym, sink) for sym in range(k))
    tags = None
    if fa.state_tags is not None:
        # the dead subset is the natural tag for the sink
        tags = fa.state_tags + (frozenset(),)
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=sink + 1,
        starts=fa.starts,
        finals=fa.finals,
        transitions=frozenset(transitions),
        state_tags=tags,
    )


def complement(fa: FiniteAutomaton) -> FiniteAutomaton:
    """Accept exactly the strings over ``fa.alphabet`` that ``fa`` rejects."""
    if not fa.starts:
        return universal(fa.alphabet)
    d = complete(determinize(fa))
    return FiniteAutomaton(
        alphabet=d.alphabet,
        state_count=d.state_count,
        starts=d.starts,
        finals=frozenset(range(d.state_count)) - d.finals,
        transitions=d.transitions,
        state_tags=d.state_tags,
    )


def difference(a: FiniteAutomaton, b: FiniteAutomaton) -> FiniteAutomaton:
    if a.alphabet != b.alphabet:
        raise ValueError("alphabet mismatch")
    return intersect(a, complement(b))


def concat_letter(fa: FiniteAutomaton, token: str) -> FiniteAutomaton:
    """Language of ``fa`` with ``token`` appended to every word."""
    sym = fa.alphabet.index(token)
    z = fa.state_count
    transitions = set(fa.transitions)
    transitions.update((s, sym, z) for s in fa.finals)
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=z + 1,
        starts=fa.starts,
        finals=frozenset([z]),
        transitions=frozenset(transitions),
    )


def unconcat_last(fa: FiniteAutomaton, token: str) -> FiniteAutomaton:
    """Strip a trailing ``token``: accept w iff ``fa`` accepts w + token.

    Same states and transitions; the new finals are the states with a
    ``token`` transition into an old final state.
    """
    sym = fa.alphabet.index(token)
    finals = frozenset(s for (s, y, d) in fa.transitions if y == sym and d in fa.finals)
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=fa.state_count,
        starts=fa.starts,
        finals=finals,
        transitions=fa.transitions,
        state_tags=fa.state_tags,
    )


def sigma_star_prefix(fa: FiniteAutomaton) -> FiniteAutomaton:
    """Allow an arbitrary prefix: accept u + w for any u whenever fa accepts w.

    A fresh hub state self-loops on every symbol and copies the transitions
    leaving ``fa``'s start states.  Making every state a start instead would
    accept arbitrary-prefixed *paths*, which is a different language.
    """
    k = len(fa.alphabet)
    hub = fa.state_count
    transitions = set(fa.transitions)
    transitions.update((hub, sym, hub) for sym in range(k))
    table = fa.transition_table
    for s in fa.starts:
        for sym, dsts in table[s].items():
            transitions.update((hub, sym, d) for d in dsts)
    finals = set(fa.finals)
    if fa.starts & fa.finals:
        finals.add(hub)  # empty-suffix case: every u must be accepted
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=hub + 1,
        starts=fa.starts | {hub},
        finals=frozenset(finals),
        transitions=frozenset(transitions),
    )


def reverse(fa: FiniteAutomaton) -> FiniteAutomaton:
    """Mirror-image automaton: accepts exactly the reversed language."""
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=fa.state_count,
        starts=fa.finals,
        finals=fa.starts,
        transitions=frozenset((d, sym, s) for (s, sym, d) in fa.transitions),
    )


def minimize(fa: FiniteAutomaton) -> FiniteAutomaton:
    """Canonical minimal complete DFA.

    States are renumbered breadth-first from the start with symbols in
    alphabet order, so two automata are language-equal iff their minimized
    forms compare equal.
    """
    if not fa.starts:
        return empty_language(fa.alphabet)
    d = complete(determinize(fa))
    k = len(d.alphabet)
    succ = [[d.transition_table[s][sym][0] for sym in range(k)] for s in range(d.state_count)]
    # Moore refinement from the final/non-final split
    block = [1 if s in d.finals else 0 for s in range(d.state_count)]
    while True:
        signature = {
            s: (block[s], tuple(block[t] for t in succ[s])) for s in range(d.state_count)
        }
        renum: dict[tuple, int] = {}
        new_block = []
        for s in range(d.state_count):
            sig = signature[s]
            if sig not in renum:
                renum[sig] = len(renum)
            new_block.append(renum[sig])
        if len(renum) == len(set(block)):
            break
        block = new_block
    # breadth-first renumbering of the quotient
    start_block = block[next(iter(d.starts))]
    number: dict[int, int] = {start_block: 0}
    order = [start_block]
    queue = deque([start_block])
    rep: dict[int, int] = {}
    for s in range(d.state_count):
        rep.setdefault(block[s], s)
    transitions: set[Transition] = set()
    while queue:
        b = queue.popleft()
        for sym in range(k):
            tb = block[succ[rep[b]][sym]]
            if tb not in number:
                number[tb] = len(order)
                order.append(tb)
                queue.append(tb)
            transitions.add((number[b], sym, number[tb]))
    finals = frozenset(
        number[block[s]] for s in d.finals if block[s] in number
    )
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=len(order),
        starts=frozenset([0]),
        finals=finals,
        transitions=frozenset(transitions),
    )


def accepts(fa: FiniteAutomaton, word: str | Sequence[str]) -> bool:
    """NFA membership by set simulation.  The empty string is accepted iff
    some start state is final."""
    cur = frozenset(fa.starts)
    for tok in word:
        sym = fa.alphabet.index(tok)
        cur = fa.step(cur, sym)
        if not cur:
            return False
    return bool(cur & fa.finals)


def is_empty(fa: FiniteAutomaton) -> bool:
    """True iff no final state is reachable from a start state."""
    seen = set(fa.starts)
    queue = deque(seen)
    table = fa.transition_table
    while queue:
        s = queue.popleft()
        if s in fa.finals:
            return False
        for dsts in table[s].values():
            for d in dsts:
                if d not in seen:
                    seen.add(d)
                    queue.append(d)
    return True


def equivalent(a: FiniteAutomaton, b: FiniteAutomaton) -> bool:
    """Language equality via canonical minimized forms."""
    return minimize(a) == minimize(b)


def canonical_key(fa: FiniteAutomaton):
    """Deterministic sort key for minimized automata."""
    return (fa.state_count, sorted(fa.finals), sorted(fa.transitions))


def is_strongly_connected(fa: FiniteAutomaton) -> bool:
    if fa.state_count <= 1:
        return True

    def reach(table):
        seen = {0}
        queue = deque([0])
        while queue:
            s = queue.popleft()
            for dsts in table[s].values():
                for d in dsts:
                    if d not in seen:
                        seen.add(d)
                        queue.append(d)
        return seen

    if len(reach(fa.transition_table)) != fa.state_count:
        return False
    return len(reach(reverse(fa).transition_table)) == fa.state_count


def cyclic_domain(word: str | Sequence[str], alphabet: Alphabet | None = None) -> Domain:
    """Domain of all factors of the two-way infinite repetition of ``word``.

    One state per letter position, wired in a cycle; every state is start
    and final.
    """
    tokens = list(word)
    if not tokens:
        raise ValueError("empty cycle word")
    if alphabet is None:
        alphabet = Alphabet(tuple(sorted(set(tokens))))
    n = len(tokens)
    transitions = frozenset(
        (i, alphabet.index(tok), (i + 1) % n) for i, tok in enumerate(tokens)
    )
    fa = FiniteAutomaton(
        alphabet=alphabet,
        state_count=n,
        starts=frozenset(range(n)),
        finals=frozenset(range(n)),
        transitions=transitions,
    )
    return Domain(fa)


def reverse_domain(d: Domain) -> Domain:
    """Domain reading right-to-left.  Fails if the reversal loses
    semi-determinism; such domains need the stack filter instead."""
    rev = reverse(d.fa)
    if not rev.semi_deterministic:
        raise ValueError("domain not reversible; use stack filter")
    return Domain(rev)


def replace_finals(fa: FiniteAutomaton, finals: Iterable[int]) -> FiniteAutomaton:
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=fa.state_count,
        starts=fa.starts,
        finals=frozenset(finals),
        transitions=fa.transitions,
        state_tags=fa.state_tags,
    )


def forbidden_extension(fa: FiniteAutomaton, state: int, sym: int) -> FiniteAutomaton:
    """Automaton of "imagined pasts plus the forbidden letter".

    Adds a fresh state f and the transition state --sym--> f, makes every
    state a start and f the only final.  It accepts w + a exactly when some
    path labeled w ends in ``state``.
    """
    if not 0 <= state < fa.state_count:
        raise ValueError(f"state {state} out of range")
    f = fa.state_count
    return FiniteAutomaton(
        alphabet=fa.alphabet,
        state_count=f + 1,
        starts=frozenset(range(f + 1)),
        finals=frozenset([f]),
        transitions=frozenset(fa.transitions) | {(state, sym, f)},
    )


def forbidden_pairs(fa: FiniteAutomaton) -> list[tuple[int, int]]:
    """All (state, symbol index) pairs with no outgoing transition."""
    k = len(fa.alphabet)
    return [
        (s, sym)
        for s in range(fa.state_count)
        for sym in range(k)
        if sym not in fa.transition_table[s]
    ]
