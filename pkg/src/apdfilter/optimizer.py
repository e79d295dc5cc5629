"""Domain state splitting for unambiguous resynchronization.

Each domain state is split by a finite partition of its possible pasts:
two past strings land in different classes when, extended by a forbidden
letter, they would resynchronize to different tracker states.  The
partitions are refined until they are compatible with the domain's own
transitions, then the domain is rebuilt over (state, class) pairs.  The
rebuilt domains recognize the same languages but let the filter pick a
unique resynchronization state where the originals could not.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .automata import (
    Domain,
    FiniteAutomaton,
    canonical_key,
    complement,
    concat_letter,
    determinize,
    difference,
    disjoint_union,
    forbidden_extension,
    intersect,
    is_empty,
    minimize,
    replace_finals,
    sigma_star_prefix,
    unconcat_last,
    universal,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_PASSES = 64

# class map: for each state of the domain union, an ordered tuple of
# canonical automata whose languages partition all strings
ClassMap = dict[int, tuple[FiniteAutomaton, ...]]


class OptimizeError(RuntimeError):
    pass


@dataclass(frozen=True)
class SplitDomain:
    """A domain rebuilt over (original state, past class) pairs.

    ``members`` names each split state; ``classes`` maps each original
    local state to its ordered class automata.  Split domains keep their
    non-recurrent states, so they need not be strongly connected.
    """

    domain: Domain
    original: Domain
    members: tuple[tuple[int, int], ...]
    classes: dict[int, tuple[FiniteAutomaton, ...]]


def resync_pasts(
    union: FiniteAutomaton,
    tracker: FiniteAutomaton,
    state: int,
    symbol: str,
    target: int,
) -> FiniteAutomaton:
    """Pasts of a domain-union state that a forbidden letter sends to one
    tracker state.

    The returned automaton accepts w exactly when some path labeled w ends
    in ``state`` and reading w plus the forbidden letter from scratch lands
    the tracker in ``target``.  Most such languages are empty.
    """
    sym = union.alphabet.index(symbol)
    if sym in union.transition_table[state]:
        raise ValueError(f"({state}, {symbol!r}) is not forbidden in the union")
    if not 0 <= target < tracker.state_count:
        raise ValueError(f"bad tracker state {target}")
    extension = forbidden_extension(union, state, sym)
    pinned = replace_finals(tracker, [target])
    return unconcat_last(intersect(determinize(extension), pinned), symbol)


def disjoin(machines: Sequence[FiniteAutomaton]) -> list[FiniteAutomaton]:
    """Coarsest partition of the union of the given languages that is
    compatible with every input (each input is a union of output classes).

    Computed inductively: split the head against the partition of the tail
    into head-only, head-and-class, and class-only parts.  Empty classes
    are pruned and duplicates merged; outputs are canonical minimal DFAs in
    a deterministic order.
    """
    cleaned: list[FiniteAutomaton] = []
    seen = set()
    for fa in machines:
        m = minimize(fa)
        if is_empty(m) or m in seen:
            continue
        seen.add(m)
        cleaned.append(m)

    def go(items: list[FiniteAutomaton]) -> list[FiniteAutomaton]:
        if not items:
            return []
        if len(items) == 1:
            return [items[0]]
        head, rest = items[0], items[1:]
        tail = go(rest)
        parts = [difference(head, disjoint_union(rest))]
        for cls in tail:
            parts.append(intersect(head, cls))
            parts.append(difference(cls, head))
        out = []
        emitted = set()
        for part in parts:
            m = minimize(part)
            if is_empty(m) or m in emitted:
                continue
            emitted.add(m)
            out.append(m)
        return out

    return sorted(go(cleaned), key=canonical_key)


def initial_classes(domains: Sequence[Domain]) -> ClassMap:
    """Starting partition per union state.

    States with no forbidden letter keep the single all-strings class.
    Otherwise the pasts are split by which tracker state each forbidden
    continuation resynchronizes to, prefixed by arbitrary strings.  The
    union of the classes is checked to cover everything; a complement
    class is appended (with a warning) if it does not.
    """
    union = disjoint_union([d.fa for d in domains])
    tracker = determinize(union)
    alphabet = union.alphabet
    everything = minimize(universal(alphabet))
    out: ClassMap = {}
    for s in range(union.state_count):
        forbidden = [
            sym for sym in range(len(alphabet)) if sym not in union.transition_table[s]
        ]
        if not forbidden:
            out[s] = (everything,)
            continue
        pieces = []
        for sym in forbidden:
            token = alphabet.symbols[sym]
            for target in range(tracker.state_count):
                pasts = resync_pasts(union, tracker, s, token, target)
                if not is_empty(pasts):
                    pieces.append(sigma_star_prefix(pasts))
        classes = disjoin(pieces)
        covered = disjoint_union(classes) if classes else None
        leftovers = complement(covered) if covered is not None else universal(alphabet)
        if not is_empty(leftovers):
            log.warning(
                "state %d: past classes do not cover all strings; adding complement",
                s,
            )
            classes = sorted(classes + [minimize(leftovers)], key=canonical_key)
        out[s] = tuple(classes)
    return out


def _same_partition(a: Sequence[FiniteAutomaton], b: Sequence[FiniteAutomaton]) -> bool:
    return set(a) == set(b)  # classes are canonical forms


def refine_classes(
    fa: FiniteAutomaton, classes: ClassMap
) -> tuple[ClassMap, dict[int, bool]]:
    """One refinement pass over every state of ``fa``.

    For each transition s --a--> s' and each class pair (E at s, E' at s'),
    the part of E whose a-extension lands in E' becomes a piece; the new
    partition at s is the coarsest common refinement of all pieces.
    States without outgoing transitions are unconstrained and keep their
    partition.
    """
    alphabet = fa.alphabet
    new: ClassMap = {}
    changed: dict[int, bool] = {}
    for s in range(fa.state_count):
        pieces: list[FiniteAutomaton] = []
        for (src, sym, dst) in sorted(fa.transitions):
            if src != s:
                continue
            token = alphabet.symbols[sym]
            for cls in classes[s]:
                extended = concat_letter(cls, token)
                for nxt in classes[dst]:
                    pieces.append(unconcat_last(intersect(extended, nxt), token))
        if not pieces:
            new[s] = classes[s]
            changed[s] = False
            continue
        refined = tuple(disjoin(pieces))
        new[s] = refined
        changed[s] = not _same_partition(refined, classes[s])
    return new, changed


def class_fixpoint(
    fa: FiniteAutomaton, classes: ClassMap, max_passes: int = DEFAULT_MAX_PASSES
) -> tuple[ClassMap, int]:
    """Iterate refinement until nothing changes.  Exceeding the pass cap is
    an error rather than a silent truncation."""
    for passes in range(1, max_passes + 1):
        classes, changed = refine_classes(fa, classes)
        if not any(changed.values()):
            return classes, passes
    raise OptimizeError(f"class refinement did not stabilize within {max_passes} passes")


def optimize(
    domains: Sequence[Domain], max_passes: int = DEFAULT_MAX_PASSES
) -> list[SplitDomain]:
    """Split every domain by its refined past classes.

    Each split state is an (original state, class) pair; transitions
    follow the original transition while the class coordinate moves to the
    unique class containing the extended language.  All split states are
    start and final, so the language is unchanged.
    """
    union = disjoint_union([d.fa for d in domains])
    classes, _passes = class_fixpoint(union, initial_classes(domains), max_passes)
    offsets = []
    total = 0
    for d in domains:
        offsets.append(total)
        total += d.fa.state_count
    out = []
    for i, d in enumerate(domains):
        off = offsets[i]
        members: list[tuple[int, int]] = [
            (s, j)
            for s in range(d.fa.state_count)
            for j in range(len(classes[off + s]))
        ]
        ids = {pair: n for n, pair in enumerate(members)}
        transitions = set()
        for (s, sym, s2) in sorted(d.fa.transitions):
            token = d.alphabet.symbols[sym]
            for j, cls in enumerate(classes[off + s]):
                extended = concat_letter(cls, token)
                targets = [
                    j2
                    for j2, nxt in enumerate(classes[off + s2])
                    if is_empty(difference(extended, nxt))
                ]
                if len(targets) != 1:
                    raise OptimizeError(
                        f"refinement incomplete at state {s} class {j} on {token!r}"
                    )
                transitions.add((ids[(s, j)], sym, ids[(s2, targets[0])]))
        fa = FiniteAutomaton(
            alphabet=d.alphabet,
            state_count=len(members),
            starts=frozenset(range(len(members))),
            finals=frozenset(range(len(members))),
            transitions=frozenset(transitions),
            state_tags=tuple(members),
        )
        out.append(
            SplitDomain(
                domain=Domain(fa),
                original=d,
                members=tuple(members),
                classes={
                    s: classes[off + s] for s in range(d.fa.state_count)
                },
            )
        )
    return out


def check_partition(
    classes: Sequence[FiniteAutomaton], alphabet=None
) -> bool:
    """True iff the class languages are pairwise disjoint and exhaustive."""
    if not classes:
        return False
    alphabet = alphabet or classes[0].alphabet
    for i, a in enumerate(classes):
        for b in classes[i + 1 :]:
            if not is_empty(intersect(a, b)):
                return False
    return is_empty(complement(disjoint_union(list(classes))))
