"""Brute-force oracles shared by the test modules.

Everything here works by direct enumeration or simulation so it stays
independent of the constructions under test.
"""

from __future__ import annotations

import itertools
from random import Random

from apdfilter.automata import Alphabet, Domain, FiniteAutomaton, accepts

ALPHA01 = Alphabet(("0", "1"))


def all_words(alphabet: Alphabet, max_len: int, min_len: int = 0):
    """Every word over the alphabet with min_len <= length <= max_len."""
    for n in range(min_len, max_len + 1):
        for combo in itertools.product(alphabet.symbols, repeat=n):
            yield "".join(combo)


def language(fa: FiniteAutomaton, max_len: int) -> frozenset[str]:
    return frozenset(w for w in all_words(fa.alphabet, max_len) if accepts(fa, w))


def layer_sets(fa: FiniteAutomaton, depth: int) -> list[frozenset[int]]:
    """States reachable by paths of exactly 0, 1, ..., depth steps (any symbol)."""
    layers = [frozenset(fa.starts)]
    table = fa.transition_table
    for _ in range(depth):
        nxt: set[int] = set()
        for s in layers[-1]:
            for dsts in table[s].values():
                nxt.update(dsts)
        layers.append(frozenset(nxt))
    return layers


def accepted_by_any(domains, word) -> bool:
    return any(accepts(d.fa, word) for d in domains)


def brute_maximal_cover(domains, sigma: str) -> list[tuple[int, int]]:
    """Maximal accepted substrings by direct enumeration.

    Domains are factor-closed, so an interval is maximal iff neither
    one-letter extension is accepted.
    """
    n = len(sigma)
    out = []
    for a in range(1, n + 1):
        for b in range(a, n + 1):
            if not accepted_by_any(domains, sigma[a - 1 : b]):
                continue
            if a > 1 and accepted_by_any(domains, sigma[a - 2 : b]):
                continue
            if b < n and accepted_by_any(domains, sigma[a - 1 : b + 1]):
                continue
            out.append((a, b))
    return out


def random_nfa(rng: Random, alphabet: Alphabet = ALPHA01, max_states: int = 5) -> FiniteAutomaton:
    n = rng.randint(1, max_states)
    k = len(alphabet)
    transitions = set()
    for s in range(n):
        for sym in range(k):
            for d in range(n):
                if rng.random() < 0.35:
                    transitions.add((s, sym, d))
    starts = frozenset(s for s in range(n) if rng.random() < 0.5) or frozenset([rng.randrange(n)])
    finals = frozenset(s for s in range(n) if rng.random() < 0.5)
    return FiniteAutomaton(
        alphabet=alphabet,
        state_count=n,
        starts=starts,
        finals=finals,
        transitions=frozenset(transitions),
    )


def d18_domain() -> Domain:
    """Two-state domain of the rule-18 pattern: pairs of 0-then-anything."""
    fa = FiniteAutomaton(
        alphabet=ALPHA01,
        state_count=2,
        starts=frozenset([0, 1]),
        finals=frozenset([0, 1]),
        # state 0 = pair boundary (must read 0), state 1 = mid pair
        transitions=frozenset([(0, 0, 1), (1, 0, 0), (1, 1, 0)]),
    )
    return Domain(fa)
