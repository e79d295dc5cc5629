from random import Random

import pytest
from helpers import ALPHA01

from apdfilter.automata import FiniteAutomaton, cyclic_domain, determinize
from apdfilter.stackfilter import filter_local
from apdfilter.transducer import (
    AMBIGUOUS,
    DomainBreak,
    DomainLabel,
    TransduceStats,
    Transducer,
    base_transducer,
    bidirectional,
    break_table,
    build_filter,
    resync,
    transduce,
)


def tag_state(t, tag):
    return t.state_tags.index(frozenset(tag))


class TestBaseTransducer:
    def test_single_domain_all_labeled(self, d18):
        base = base_transducer([d18])
        assert all(out == DomainLabel(1) for (_s, _a, out, _d) in base.transitions)
        assert not base.input_complete()

    def test_two_runs_label_by_domain(self, runs01):
        base = base_transducer(runs01)
        arcs = base.arcs
        assert arcs[(base.start, 0)][0] == DomainLabel(1)
        assert arcs[(base.start, 1)][0] == DomainLabel(2)

    def test_overlapping_domains_emit_ambiguity(self):
        doms = [cyclic_domain("01", ALPHA01), cyclic_domain("0011", ALPHA01)]
        base = base_transducer(doms)
        out, target = base.arcs[(base.start, 0)]
        assert out == AMBIGUOUS
        # after one 0 both domains are still live
        assert len(base.state_tags[target]) > 1

    def test_input_determinism_enforced(self):
        with pytest.raises(ValueError, match="deterministic"):
            Transducer(
                alphabet=ALPHA01,
                state_count=1,
                start=0,
                finals=frozenset([0]),
                transitions=frozenset(
                    [(0, 0, DomainLabel(1), 0), (0, 0, AMBIGUOUS, 0)]
                ),
                domain_count=1,
            )


class TestResync:
    def test_d18_resyncs_to_boundary(self, d18):
        tracker = determinize(d18.fa)
        boundary = tag_state(tracker, {0})
        report = resync(tracker, boundary, "1")
        assert report.target == boundary
        assert (report.specificity, report.past_length) == (1, 1)
        # every candidate ever examined projects onto the boundary state
        for (_il, states) in report.candidates:
            assert states <= {boundary, 0}

    def test_two_runs_cross_domain(self, runs01):
        tracker = determinize(disjoint([d.fa for d in runs01]))
        zero_state = tag_state(tracker, {0})
        one_state = tag_state(tracker, {1})
        report = resync(tracker, zero_state, "1")
        assert report.target == one_state
        assert report.specificity == 1

    def test_repeated_symbol_resync(self):
        tracker = determinize(cyclic_domain("01", ALPHA01).fa)
        after_zero = tracker.step_det(0, 0)
        report = resync(tracker, after_zero, "0")
        assert report.target == after_zero
        assert report.specificity == 1

    def test_not_forbidden_rejected(self, d18):
        tracker = determinize(d18.fa)
        with pytest.raises(ValueError, match="not forbidden"):
            resync(tracker, 0, "0")

    def test_deterministic_reports(self, d18):
        tracker = determinize(d18.fa)
        boundary = tag_state(tracker, {0})
        assert resync(tracker, boundary, "1") == resync(tracker, boundary, "1")


def disjoint(fas):
    from apdfilter.automata import disjoint_union

    return disjoint_union(fas)


class TestBuildFilter:
    def test_d18_filter_shape(self, d18):
        t = build_filter([d18])
        assert t.state_count == 3
        tracker = determinize(d18.fa)
        boundary = tag_state(tracker, {0})
        breaks = [
            (s, a, out, d)
            for (s, a, out, d) in t.transitions
            if isinstance(out, DomainBreak)
        ]
        assert breaks == [(boundary, 1, DomainBreak(boundary, boundary), boundary)]
        assert t.input_complete()
        assert t.input_automaton().deterministic
        assert len(t.resync_reports) == 1

    def test_principal_110_domain_filter_complete(self):
        t = build_filter([cyclic_domain("00010011011111", ALPHA01)])
        assert t.input_complete()
        assert t.input_automaton().deterministic
        singleton_states = sum(1 for tag in t.state_tags if len(tag) == 1)
        assert singleton_states >= 14  # the recurrent cycle survives determinization

    def test_two_runs_segmenter(self, runs01):
        t = build_filter(runs01)
        assert t.input_complete()
        out = transduce(t, "01")
        assert out[0] == DomainLabel(1)
        assert isinstance(out[1], DomainBreak)

    def test_break_table_stable(self, runs01):
        t = build_filter(runs01)
        table = break_table(t)
        assert sorted(table.values()) == list(range(-len(table), 0))
        assert break_table(t) == table


class TestTransduce:
    def test_pure_domain_string(self, d18):
        t = build_filter([d18])
        assert transduce(t, "0101010") == [DomainLabel(1)] * 7

    def test_break_at_gap_right_edges(self, d18):
        # "10011" leaves the domain at position 4 (right 1 of the 00 gap)
        # and again at position 5 ("11" is itself a zero-width gap)
        t = build_filter([d18])
        out = transduce(t, "10011")
        assert [isinstance(o, DomainBreak) for o in out] == [
            False,
            False,
            False,
            True,
            True,
        ]
        assert out[:3] == [DomainLabel(1)] * 3

    def test_gap_embedding_breaks_only_terminal_one(self, d18):
        t = build_filter([d18])
        for n in range(1, 6):
            sigma = "01" + "0" * (2 * n) + "1" + "00"
            out = transduce(t, sigma)
            expected_break = len("01" + "0" * (2 * n))  # 0-based position of right 1
            for pos, sym in enumerate(out):
                assert isinstance(sym, DomainBreak) == (pos == expected_break)

    def test_circular_warm_up(self, cyc001):
        t = build_filter([cyc001])
        assert transduce(t, "001001", "circular") == [DomainLabel(1)] * 6
        # a rotation of the period synchronizes the same way
        assert transduce(t, "010010", "circular") == [DomainLabel(1)] * 6

    def test_circular_rejects_empty(self, d18):
        t = build_filter([d18])
        with pytest.raises(ValueError, match="non-empty"):
            transduce(t, "", "circular")

    def test_emits_one_symbol_per_letter(self, d18):
        t = build_filter([d18])
        rng = Random(31)
        for _ in range(50):
            sigma = "".join(rng.choice("01") for _ in range(rng.randint(0, 20)))
            stats = TransduceStats()
            out = transduce(t, sigma, stats=stats)
            assert len(out) == len(sigma)
            assert stats.lookups == len(sigma)

    def test_lipschitz_prefix_property(self, d18, cyc001):
        t = build_filter([d18, cyc001])
        rng = Random(37)
        for _ in range(40):
            k = rng.randint(0, 10)
            shared = "".join(rng.choice("01") for _ in range(k))
            a = shared + "".join(rng.choice("01") for _ in range(rng.randint(0, 8)))
            b = shared + "".join(rng.choice("01") for _ in range(rng.randint(0, 8)))
            assert transduce(t, a)[:k] == transduce(t, b)[:k]

    def test_consistency_with_stack_cover(self, d18):
        # inside each maximal interval, once synchronized the transducer
        # labels with that interval's domain
        t = build_filter([d18])
        sigma = "0100100"
        cover = filter_local([d18], sigma)
        out = transduce(t, sigma)
        for (a, b), doms in zip(cover.intervals, cover.domain_sets):
            if len(doms) != 1:
                continue
            label = DomainLabel(next(iter(doms)))
            interior = out[a:b]  # skip the first cell of the interval
            assert all(
                sym == label for sym in interior if not isinstance(sym, DomainBreak)
            )


class TestBidirectional:
    def test_gap_filled_both_edges(self, d18):
        for n in range(1, 4):
            sigma = "01" + "0" * (2 * n) + "1" + "00"
            out = bidirectional([d18], sigma)
            left_one = 1
            right_one = len("01" + "0" * (2 * n))
            for pos, sym in enumerate(out):
                inside_gap = left_one <= pos <= right_one
                assert isinstance(sym, DomainBreak) == inside_gap, (n, pos)
                if not inside_gap:
                    assert sym == DomainLabel(1)

    def test_pure_domain_matches_single_pass(self, d18):
        t = build_filter([d18])
        sigma = "00100010"
        assert bidirectional([d18], sigma) == transduce(t, sigma)

    def test_double_one_both_positions_break(self, d18):
        out = bidirectional([d18], "11")
        assert all(isinstance(sym, DomainBreak) for sym in out)

    def test_non_reversible_domain_rejected(self):
        fa = FiniteAutomaton(
            ALPHA01,
            3,
            frozenset([0, 1, 2]),
            frozenset([0, 1, 2]),
            # two different states reach 0 on "0": reversal is not
            # semi-deterministic
            frozenset([(0, 0, 1), (1, 0, 0), (2, 0, 0), (1, 1, 2), (0, 1, 2), (2, 1, 1)]),
        )
        from apdfilter.automata import Domain

        with pytest.raises(ValueError, match="not reversible"):
            bidirectional([Domain(fa)], "00")
