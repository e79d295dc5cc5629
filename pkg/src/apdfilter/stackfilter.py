"""Exact maximal-substring covering with a pair stack.

A string is scanned once while a stack of (tracker state, start index)
pairs follows every suffix still consistent with some domain.  When the
oldest pair dies its interval is emitted; younger pairs dying at the same
step are contained in it and emit nothing.  The global variant handles
periodic two-way infinite strings through a pumping-bound window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .automata import Domain, accepts, determinize, disjoint_union


@dataclass(frozen=True)
class MaximalCover:
    """Antichain of maximal accepted substrings as 1-based inclusive intervals.

    ``domain_sets`` is an extension beyond the interval list: for each
    interval, the set of 1-based indices of the domains accepting it.
    For covers of periodic strings ``period`` is set and the intervals are
    representatives; the full cover is every shift by a multiple of the
    period.  ``whole_string`` flags the degenerate periodic case where the
    entire infinite string is the single maximal substring.
    """

    intervals: tuple[tuple[int, int], ...]
    whole_string: bool = False
    domain_sets: tuple[frozenset[int], ...] = ()
    period: int | None = None
    whole_domains: frozenset[int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))
        object.__setattr__(self, "domain_sets", tuple(self.domain_sets))
        last = (0, 0)
        for (a, b) in self.intervals:
            if not 1 <= a <= b:
                raise ValueError(f"bad interval ({a}, {b})")
            # sorted by start with strictly increasing ends = antichain
            if a <= last[0] or b <= last[1]:
                raise ValueError("intervals are not an antichain in order")
            last = (a, b)
        if self.domain_sets and len(self.domain_sets) != len(self.intervals):
            raise ValueError("domain_sets length mismatch")


@dataclass(frozen=True)
class PeriodicString:
    """One period of a two-way infinite periodic string."""

    period_word: str

    def __post_init__(self):
        if not self.period_word:
            raise ValueError("empty period word")

    @property
    def period(self) -> int:
        return len(self.period_word)

    def window(self, length: int) -> str:
        reps = -(-length // self.period)
        return (self.period_word * reps)[:length]


@dataclass
class FilterStats:
    """Work counters for the scan; advancing one pair is the unit of work."""

    pair_advances: int = 0
    evictions: int = 0


def _accepting_domains(domains: Sequence[Domain], word: str) -> frozenset[int]:
    return frozenset(i + 1 for i, d in enumerate(domains) if accepts(d.fa, word))


def filter_local(
    domains: Sequence[Domain], sigma: str, stats: FilterStats | None = None
) -> MaximalCover:
    """Maximal substrings of a finite string, boundary effects ignored.

    Implements the single left-to-right scan: at step j a fresh pair
    (start state, j) is pushed, every live pair is advanced by the input
    letter or evicted, and an eviction of the bottom pair emits its
    interval.  The surviving bottom pair is flushed at the end.
    """
    if not domains:
        raise ValueError("need at least one domain")
    if not sigma:
        return MaximalCover(())
    tracker = determinize(disjoint_union([d.fa for d in domains]))
    table = tracker.transition_table
    start_state = next(iter(tracker.starts))
    stack: list[tuple[int, int]] = []  # (state, start index), oldest first
    emitted: list[tuple[int, int]] = []
    for j, token in enumerate(sigma, start=1):
        sym = tracker.alphabet.index(token)
        stack.append((start_state, j))
        survivors: list[tuple[int, int]] = []
        for idx, (state, begin) in enumerate(stack):
            dsts = table[state].get(sym)
            if dsts is None:
                if stats is not None:
                    stats.evictions += 1
                if idx == 0 and begin <= j - 1:
                    emitted.append((begin, j - 1))
                # non-bottom pairs die silently: their intervals are
                # contained in the bottom pair's
                continue
            survivors.append((dsts[0], begin))
            if stats is not None:
                stats.pair_advances += 1
        stack = survivors
    if stack:
        emitted.append((stack[0][1], len(sigma)))
    emitted.sort()
    return MaximalCover(
        intervals=tuple(emitted),
        domain_sets=tuple(_accepting_domains(domains, sigma[a - 1 : b]) for (a, b) in emitted),
    )


def _canonical_representatives(
    intervals: Sequence[tuple[int, int]], period: int
) -> list[tuple[int, int]]:
    """Shift each interval so its start lies in 1..period, deduplicate the
    orbits, and drop any representative whose orbit is contained in another."""
    shifted = set()
    for (a, b) in intervals:
        q = (a - 1) // period
        shifted.add((a - q * period, b - q * period))
    reduced = []
    for (a, b) in sorted(shifted):
        contained = False
        for (c, d) in shifted:
            if (c, d) == (a, b):
                continue
            # compare against every shift of (c, d) that could contain
            # (a, b): both starts lie in 1..period, so the shift is at
            # most one period up and (length // period) + 1 periods down
            for q in range(-((d - c + 1) // period) - 2, 2):
                if c + q * period <= a and b <= d + q * period:
                    if (c + q * period, d + q * period) != (a, b):
                        contained = True
                        break
            if contained:
                break
        if not contained:
            reduced.append((a, b))
    return reduced


def filter_global(
    domains: Sequence[Domain],
    periodic: PeriodicString | str,
    stats: FilterStats | None = None,
) -> MaximalCover:
    """Maximal substrings of a periodic two-way infinite string.

    Maximal substrings longer than m*N (m the largest domain state count)
    pump to the whole string, so a window of (m+1)*N letters contains a
    full shift of every finite maximal substring; window-edge fragments of
    longer neighbors are dropped by the orbit reduction.  A window of
    m*N+1 letters would detect the whole-string case but can clip every
    shift of a near-extremal substring, so the longer window is used.
    """
    if isinstance(periodic, str):
        periodic = PeriodicString(periodic)
    if not domains:
        raise ValueError("need at least one domain")
    n = periodic.period
    m = max(d.fa.state_count for d in domains)
    window_len = (m + 1) * n
    window = periodic.window(window_len)
    local = filter_local(domains, window, stats=stats)
    if local.intervals == ((1, window_len),):
        return MaximalCover(
            (),
            whole_string=True,
            period=n,
            whole_domains=_accepting_domains(domains, window),
        )
    reps = _canonical_representatives(local.intervals, n)

    def content(a: int, b: int) -> str:
        return periodic.window(b)[a - 1 : b]

    return MaximalCover(
        intervals=tuple(reps),
        domain_sets=tuple(_accepting_domains(domains, content(a, b)) for (a, b) in reps),
        period=n,
    )


def orbit_multiplicity(cover: MaximalCover, position: int) -> tuple[int, list[int]]:
    """How many shifted cover intervals contain a 1-based position of the
    period, and which representatives (by index) they come from."""
    if cover.period is None:
        raise ValueError("cover has no period")
    n = cover.period
    count = 0
    owners = []
    for idx, (a, b) in enumerate(cover.intervals):
        lo = -(-(position - b) // n)  # ceil((position-b)/n)
        hi = (position - a) // n
        if hi >= lo:
            count += hi - lo + 1
            owners.append(idx)
    return count, owners
