import itertools

import pytest
from hypothesis import given, settings, strategies as st

from dyncx.dnf import DnfInstance, clause, eval_bruteforce
from dyncx.equiv import (
    AllWhiteCounters,
    AllWhiteInstance,
    HypergraphInstance,
    SparseOvInstance,
    aw_bruteforce,
    aw_to_indep,
    aw_to_ov,
    dnf_to_aw,
    format_aw,
    format_hypergraph,
    format_ov,
    graph_set_independent,
    hypergraph_lift,
    indep_bruteforce,
    indep_to_dnf,
    lift_query_set,
    ov_bruteforce,
    ov_to_aw,
    parse_aw,
    parse_hypergraph,
    parse_ov,
    transpose,
)
from dyncx.framework import BudgetExceeded, ParseError

from conftest import rand_aw, rand_color_stream, rand_dnf, rand_flip_stream


# ---------------------------------------------------------------------------
# baseline semantics
# ---------------------------------------------------------------------------


def test_aw_empty_neighborhood_counts_as_all_white():
    inst = AllWhiteInstance(1, 2, [(0, 0)], [False])
    # r=1 has no neighbors at all: vacuously all-white
    assert aw_bruteforce(inst) == 1


def test_aw_no_scanned_nodes_is_no():
    assert aw_bruteforce(AllWhiteInstance(2, 0, [], [True, False])) == 0


def test_transpose_moves_colors_to_l_side():
    # catalog orientation: scanned side first, colored side second
    inst = transpose(2, 3, [(0, 0), (1, 2)], [True, False, True])
    assert (inst.num_l, inst.num_r) == (3, 2)
    assert inst.edges == [(0, 0), (2, 1)]
    assert inst.colors == [True, False, True]
    assert aw_bruteforce(inst) == 1  # scanned node 1's neighborhood = {2}, white


def test_aw_counters_track_bruteforce(rng):
    for _ in range(60):
        inst = rand_aw(rng)
        c = AllWhiteCounters(inst)
        for tok in rand_color_stream(rng, inst.num_l, 40):
            got = c.apply(tok)
            inst.apply(tok)
            assert got == aw_bruteforce(inst)


def test_aw_validate_rejects_bad_edges():
    with pytest.raises(ParseError):
        AllWhiteInstance(1, 1, [(1, 0)], [True]).validate()
    with pytest.raises(ParseError):
        AllWhiteInstance(1, 1, [(0, 0), (0, 0)], [True]).validate()
    with pytest.raises(ParseError):
        AllWhiteInstance(1, 1, [(0, 0)], [True], width=0).validate()


# ---------------------------------------------------------------------------
# converters
# ---------------------------------------------------------------------------


def test_dnf_to_aw_worked_example():
    inst = DnfInstance(2, [clause(1, -2)], [1, 0], 2)
    aw, tr = dnf_to_aw(inst)
    assert (aw.num_l, aw.num_r) == (4, 1)
    # l1 white, l2 black, l3 black, l4 white (1-based); r1 sees l1 and l4
    assert aw.colors == [True, False, False, True]
    assert sorted(aw.edges) == [(0, 0), (3, 0)]
    assert aw_bruteforce(aw) == 1
    out = tr(("f", 0, 0))
    assert out == [("c", 0, "B"), ("c", 1, "W")]


def test_dnf_to_aw_empty_formula_always_no(rng):
    inst = DnfInstance(3, [], [1, 0, 1], 2)
    aw, _ = dnf_to_aw(inst)
    assert aw.num_r == 0 and aw_bruteforce(aw) == 0


def test_dnf_to_aw_flip_translates_to_exactly_two_updates(rng):
    inst = rand_dnf(rng, m_lo=1)
    _, tr = dnf_to_aw(inst)
    for tok in rand_flip_stream(rng, inst.num_vars, 30):
        assert len(tr(tok)) == 2


def test_dnf_to_aw_prune_drops_unused_literal_nodes():
    inst = DnfInstance(3, [clause(1)], [1, 1, 1], 1)
    aw, tr = dnf_to_aw(inst, prune=True)
    assert aw.num_l == 1
    assert tr(("f", 2, 0)) == []  # variable 3 has no literal nodes left
    assert aw_bruteforce(aw) == eval_bruteforce(inst)


def test_aw_to_indep_examples():
    star = AllWhiteInstance(3, 1, [(0, 0), (1, 0), (2, 0)], [True, True, True])
    hg, _ = aw_to_indep(star)
    assert hg.s == {0, 1, 2}
    assert indep_bruteforce(hg) == 0
    dark = AllWhiteInstance(2, 1, [(0, 0)], [False, False])
    hg, _ = aw_to_indep(dark)
    assert hg.s == set() and indep_bruteforce(hg) == 1


def test_indep_to_dnf_examples():
    hg = HypergraphInstance(2, [(0, 1)], {0, 1})
    inst, _ = indep_to_dnf(hg)
    assert eval_bruteforce(inst) == 1
    hg = HypergraphInstance(2, [(0, 1)], set())
    inst, _ = indep_to_dnf(hg)
    assert eval_bruteforce(inst) == 0


def test_ov_examples():
    ov = SparseOvInstance(2, 2, [[0], [1]], [0, 0])
    assert ov_bruteforce(ov) == 1
    ov = SparseOvInstance(2, 2, [[0], [1]], [1, 1])
    assert ov_bruteforce(ov) == 0


def test_ov_round_trip_is_identity(rng):
    for _ in range(40):
        aw = rand_aw(rng)
        ov, _ = aw_to_ov(aw)
        back, _ = ov_to_aw(ov)
        assert (back.num_l, back.num_r) == (aw.num_l, aw.num_r)
        assert sorted(back.edges) == sorted(aw.edges)
        assert back.colors == aw.colors


def test_four_way_per_step_equivalence(rng):
    for _ in range(150):
        source = rand_dnf(rng, n_hi=5, m_hi=4)
        aw, t_aw = dnf_to_aw(source)
        hg, t_hg = aw_to_indep(aw)
        back, t_back = indep_to_dnf(hg)
        ov, t_ov = aw_to_ov(aw)
        for tok in rand_flip_stream(rng, source.num_vars, 30):
            source.apply(tok)
            for o1 in t_aw(tok):
                aw.apply(o1)
                for o2 in t_hg(o1):
                    hg.apply(o2)
                    for o3 in t_back(o2):
                        back.apply(o3)
                for o4 in t_ov(o1):
                    ov.apply(o4)
            bit = eval_bruteforce(source)
            assert aw_bruteforce(aw) == bit
            assert indep_bruteforce(hg) == 1 - bit
            assert eval_bruteforce(back) == bit
            assert ov_bruteforce(ov) == bit


def test_translation_arity_is_one_outside_dnf(rng):
    aw = rand_aw(rng, l_lo=1, r_lo=1)
    _, t_hg = aw_to_indep(aw)
    _, t_ov = aw_to_ov(aw)
    ov, _ = aw_to_ov(aw)
    _, t_back = ov_to_aw(ov)
    for tok in rand_color_stream(rng, aw.num_l, 40, query_rate=0.0):
        assert len(t_hg(tok)) == 1
        assert len(t_ov(tok)) == 1
    assert len(t_back(("u", 0, 1))) == 1


def test_width_bounds_preserved(rng):
    for _ in range(30):
        source = rand_dnf(rng, m_lo=1)
        aw, _ = dnf_to_aw(source)
        assert aw.width == source.width
        assert max(len(n) for n in aw.r_neighbors()) <= source.width
        hg, _ = aw_to_indep(aw)
        back, _ = indep_to_dnf(hg)
        assert back.width <= source.width


# ---------------------------------------------------------------------------
# hypergraph lift
# ---------------------------------------------------------------------------


def test_lift_worked_example():
    hg = HypergraphInstance(4, [(0, 1)], {0, 1})
    num_nodes, edges, subset_index = hypergraph_lift(hg, 1)
    assert num_nodes == 4 and len(edges) == 1
    qs = lift_query_set(subset_index, hg.s, 1)
    assert not graph_set_independent(edges, qs)


def test_lift_empty_query_set_is_independent():
    hg = HypergraphInstance(4, [(0, 1)], set())
    _, edges, subset_index = hypergraph_lift(hg, 1)
    assert graph_set_independent(edges, lift_query_set(subset_index, set(), 1))


def test_lift_iff_exhaustive_small():
    for n, k in [(4, 1), (5, 2), (6, 2)]:
        nodes = list(range(n))
        hyperedges = [tuple(range(2 * k)), tuple(nodes[-2 * k:])]
        hg = HypergraphInstance(n, hyperedges, set())
        _, edges, subset_index = hypergraph_lift(hg, k)
        for size in range(n + 1):
            for s in itertools.combinations(nodes, size):
                hg.s = set(s)
                want = indep_bruteforce(hg)
                got = graph_set_independent(edges, lift_query_set(subset_index, hg.s, k))
                assert int(got) == want, (n, k, s)


def test_lift_budget_enforced():
    hg = HypergraphInstance(40, [], set())
    with pytest.raises(BudgetExceeded):
        hypergraph_lift(hg, 10, budget=1000)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def test_aw_parse_format_round_trip(rng):
    for _ in range(15):
        inst = rand_aw(rng)
        again = parse_aw(format_aw(inst))
        assert (again.num_l, again.num_r) == (inst.num_l, inst.num_r)
        assert sorted(again.edges) == sorted(inst.edges)
        assert again.colors == inst.colors


def test_ov_and_hypergraph_round_trips(rng):
    ov = SparseOvInstance(3, 2, [[0, 2], []], [1, 0, 1])
    assert parse_ov(format_ov(ov)) == ov
    hg = HypergraphInstance(4, [(0, 2), (1, 2, 3)], {1, 3})
    again = parse_hypergraph(format_hypergraph(hg))
    assert (again.num_nodes, again.hyperedges, again.s) == (4, hg.hyperedges, hg.s)


def test_empty_hyperedge_rejected_in_files_but_meaningful_in_memory():
    with pytest.raises(ParseError):
        parse_hypergraph("p hg 2 1\n\ns 1\n")
    # in memory it must stay legal: an isolated scanned node is vacuously
    # all-white, and its image under aw_to_indep is an empty hyperedge
    aw = AllWhiteInstance(1, 1, [], [True])
    hg, _ = aw_to_indep(aw)
    assert hg.hyperedges == [()]
    assert indep_bruteforce(hg) == 0
    assert aw_bruteforce(aw) == 1
