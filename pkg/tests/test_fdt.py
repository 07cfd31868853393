import itertools
import random

import pytest

from dyncx.dnf import DnfInstance, clause, eval_bruteforce, first_satisfied_bruteforce, parse_dnf
from dyncx.fdt import (
    DecisionTree,
    EmptyCollection,
    End,
    FdtInstance,
    FdtOracle,
    IndexOutOfRange,
    NotNormalized,
    OracleDesync,
    Read,
    Write,
    compile_dnf_verifier_to_trees,
    completeness_harness,
    execute_tree,
    execution_leaf,
    fdt_answer,
    fdt_to_fdnf,
    fdt_update,
    format_trees,
    parse_trees,
)
from dyncx.framework import BudgetExceeded, ParseError, ProbeMeter, UpdateStream


def single_read(index=0):
    return DecisionTree([Read(index, 1, 2), End(0, 0, 0), End(1, 1, 1)])


# ---------------------------------------------------------------------------
# structure checks
# ---------------------------------------------------------------------------


def test_validate_accepts_single_leaf():
    DecisionTree([End(1, 2, 3)]).validate(4)


def test_validate_rejects_shared_child():
    # node 2 referenced twice: a DAG, not a tree
    t = DecisionTree([Read(0, 1, 1), End(0, 0, 0)])
    with pytest.raises(ParseError):
        t.validate(4)


def test_validate_rejects_double_read_on_a_path():
    t = DecisionTree([Read(0, 1, 2), End(0, 0, 0), Read(0, 3, 4), End(0, 0, 0), End(1, 1, 1)])
    with pytest.raises(NotNormalized):
        t.validate(4)


def test_validate_rejects_read_after_write():
    t = DecisionTree([Write(0, 1, 1), Read(0, 2, 3), End(0, 0, 0), End(1, 1, 1)])
    with pytest.raises(NotNormalized):
        t.validate(4)


def test_reads_on_disjoint_branches_are_fine():
    t = DecisionTree(
        [Read(0, 1, 2), Read(1, 3, 4), Read(1, 5, 6),
         End(0, 0, 0), End(1, 1, 1), End(0, 0, 2), End(1, 1, 3)]
    )
    t.validate(4)
    assert t.depth() == 2


def test_write_then_read_other_cell_is_normal():
    t = DecisionTree([Write(0, 1, 1), Read(1, 2, 3), End(0, 0, 0), End(1, 1, 1)])
    t.validate(4)


def test_validate_rejects_out_of_range_memory_index():
    with pytest.raises(IndexOutOfRange):
        single_read(index=5).validate(4)
    with pytest.raises(IndexOutOfRange):
        DecisionTree([Write(7, 0, 1), End(0, 0, 0)]).validate(4)


def test_validate_rejects_bad_bits_and_dangling_children():
    with pytest.raises(ParseError):
        DecisionTree([End(2, 0, 0)]).validate(1)
    with pytest.raises(ParseError):
        DecisionTree([Read(0, 1, 5), End(0, 0, 0)]).validate(1)
    with pytest.raises(ParseError):
        DecisionTree([]).validate(1)


def test_instance_validate_covers_every_tree():
    inst = FdtInstance([0, 1], [single_read(0), single_read(4)])
    with pytest.raises(IndexOutOfRange):
        inst.validate()


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------


def test_execute_tree_follows_bits():
    t = single_read()
    leaf, writes = execute_tree(t, [0])
    assert t.nodes[leaf] == End(0, 0, 0) and writes == []
    leaf, _ = execute_tree(t, [1])
    assert t.nodes[leaf] == End(1, 1, 1)


def test_execute_tree_applies_writes_in_path_order():
    t = DecisionTree([Write(0, 1, 1), Write(0, 0, 2), End(1, 0, 0)])
    t.validate(1)
    mem = [1]
    _, writes = execute_tree(t, mem)
    assert writes == [(0, 1), (0, 0)]
    assert mem == [0]  # later write lands last


def test_answer_runs_on_scratch_copies():
    t = DecisionTree([Write(1, 1, 1), Read(0, 2, 3), End(0, 0, 0), End(1, 1, 1)])
    inst = FdtInstance([0, 0], [t]).validate()
    fdt_answer(inst)
    assert inst.memory == [0, 0]


def test_execute_tree_charges_one_probe_per_node_on_path():
    t = DecisionTree(
        [Read(0, 1, 2), Read(1, 3, 4), End(1, 1, 1),
         End(0, 0, 0), End(0, 0, 0)]
    )
    meter = ProbeMeter(budget=2)
    meter.start_op()
    execute_tree(t, [0, 1], meter)
    assert meter.end_op() == 2


def test_answer_picks_max_rank_and_first_on_ties():
    def leaf_tree(rank):
        return DecisionTree([End(0, 0, rank)])

    inst = FdtInstance([], [leaf_tree(3), leaf_tree(5), leaf_tree(3)])
    assert fdt_answer(inst) == 1
    inst = FdtInstance([], [leaf_tree(3), leaf_tree(0), leaf_tree(3)])
    assert fdt_answer(inst) == 0


def test_fdt_update_bounds():
    inst = FdtInstance([0, 0], [single_read()])
    fdt_update(inst, 1, 1)
    assert inst.memory == [0, 1]
    with pytest.raises(IndexOutOfRange):
        fdt_update(inst, 2, 1)


def test_empty_forest_rejected():
    with pytest.raises(EmptyCollection):
        fdt_answer(FdtInstance([0], []))


# ---------------------------------------------------------------------------
# clause extraction
# ---------------------------------------------------------------------------


def ordered_clauses(image):
    return [image.fdnf.base.clauses[j] for j in image.fdnf.order]


def test_single_read_extracts_two_clauses():
    inst = FdtInstance([0], [single_read()])
    image = fdt_to_fdnf(inst)
    # bit-1 path has rank 1, so it leads the order; bit-0 path follows
    assert [c.literals for c in ordered_clauses(image)] == [((0, True),), ((0, False),)]


def test_depth_two_complete_tree_extracts_four_width_two_clauses():
    t = DecisionTree(
        [Read(0, 1, 2), Read(1, 3, 4), Read(1, 5, 6),
         End(0, 0, 0), End(1, 1, 1), End(1, 1, 2), End(1, 1, 3)]
    )
    inst = FdtInstance([0, 0], [t])
    image = fdt_to_fdnf(inst)
    assert len(image.fdnf.base.clauses) == 4
    assert all(c.width == 2 for c in image.fdnf.base.clauses)
    ranks = [image.clause_rank[j] for j in image.fdnf.order]
    assert ranks == sorted(ranks, reverse=True)
    # highest rank is the right-right path
    assert ordered_clauses(image)[0].literals == ((0, True), (1, True))


def test_writes_contribute_no_literals():
    t = DecisionTree([Write(1, 1, 1), Read(0, 2, 3), End(0, 0, 0), End(1, 1, 1)])
    inst = FdtInstance([0, 0], [t])
    image = fdt_to_fdnf(inst)
    assert sorted(c.literals for c in image.fdnf.base.clauses) == [
        ((0, False),), ((0, True),)
    ]


def test_extraction_matches_execution_exhaustively(rng):
    # the first satisfied clause under the extracted order names exactly the
    # tree/leaf the answer procedure lands on
    for trial in range(60):
        inst = random_instance(rng)
        image = fdt_to_fdnf(inst)
        for bits in itertools.product((0, 1), repeat=len(inst.memory)):
            inst.memory[:] = bits
            image.fdnf.base.assignment[:] = bits
            pi = fdt_answer(inst)
            leaf, _ = execute_tree(inst.trees[pi], list(inst.memory))
            j = first_satisfied_bruteforce(image.fdnf)
            assert j is not None
            assert (image.clause_tree[j], image.clause_leaf[j]) == (pi, leaf)


def random_instance(rng, width=3, max_trees=3):
    trees = [random_tree(rng, width) for _ in range(rng.randrange(1, max_trees + 1))]
    return FdtInstance([rng.randrange(2) for _ in range(width)], trees).validate()


def random_tree(rng, width, p_stop=0.4):
    nodes = []

    def grow(read_seen, written, depth):
        at = len(nodes)
        roll = rng.random()
        fresh = [i for i in range(width) if i not in read_seen and i not in written]
        if depth > 3 or roll < p_stop or not fresh:
            nodes.append(End(rng.randrange(2), rng.randrange(-2, 3), rng.randrange(6)))
            return at
        if roll < p_stop + 0.2:
            cell = rng.randrange(width)
            nodes.append(None)
            child = grow(read_seen, written | {cell}, depth + 1)
            nodes[at] = Write(cell, rng.randrange(2), child)
            return at
        cell = rng.choice(fresh)
        nodes.append(None)
        left = grow(read_seen | {cell}, written, depth + 1)
        right = grow(read_seen | {cell}, written, depth + 1)
        nodes[at] = Read(cell, left, right)
        return at

    grow(set(), set(), 0)
    return DecisionTree(nodes)


# ---------------------------------------------------------------------------
# compiling clause checkers
# ---------------------------------------------------------------------------


def forest_answer(inst: FdtInstance) -> int:
    pi = fdt_answer(inst)
    return execution_leaf(inst.trees[pi], inst.memory).x


def test_compile_one_clause_two_literals():
    inst = parse_dnf("p dnf 2 1 2\n1 -2 0\na 1 0\n")
    trees = compile_dnf_verifier_to_trees(inst)
    assert len(trees) == 2
    assert trees[0].depth() == 2 and trees[1].depth() == 0
    forest = FdtInstance(list(inst.assignment), trees)
    pi = fdt_answer(forest)
    assert pi == 0
    assert execution_leaf(trees[0], forest.memory) == End(1, 1, 1)


def test_compile_rewards_concession_over_lying():
    inst = parse_dnf("p dnf 1 1 1\n1 0\na 0\n")
    trees = compile_dnf_verifier_to_trees(inst)
    forest = FdtInstance([0], trees)
    pi = fdt_answer(forest)
    # clause unsatisfied: the trailing concession tree (y=0) beats the
    # clause tree's fail leaf (y=-1)
    assert pi == len(trees) - 1
    leaf = execution_leaf(trees[pi], forest.memory)
    assert (leaf.x, leaf.y) == (0, 0)


def test_compiled_forest_tracks_formula(rng):
    for _ in range(40):
        inst = rand_compilable(rng)
        trees = compile_dnf_verifier_to_trees(inst)
        forest = FdtInstance(list(inst.assignment), trees)
        for bits in itertools.product((0, 1), repeat=inst.num_vars):
            forest.memory[:] = bits
            inst.assignment[:] = bits
            assert forest_answer(forest) == eval_bruteforce(inst)


def test_success_leaves_pay_and_fail_leaves_charge(rng):
    for _ in range(30):
        inst = rand_compilable(rng)
        trees = compile_dnf_verifier_to_trees(inst)
        for bits in itertools.product((0, 1), repeat=inst.num_vars):
            for t in trees[:-1]:
                node = execution_leaf(t, list(bits))
                assert (node.x, node.y) in ((1, 1), (0, -1))


def rand_compilable(rng):
    n = rng.randrange(1, 5)
    m = rng.randrange(1, 5)
    cl = []
    for _ in range(m):
        w = rng.randrange(1, min(3, n) + 1)
        vs = rng.sample(range(1, n + 1), w)
        cl.append(clause(*[v if rng.random() < 0.5 else -v for v in vs]))
    assignment = [rng.randrange(2) for _ in range(n)]
    return DnfInstance(n, cl, assignment, max(c.width for c in cl)).validate()


def test_compile_budget():
    inst = parse_dnf("p dnf 2 2 1\n1 0\n2 0\na 0 0\n")
    with pytest.raises(BudgetExceeded):
        compile_dnf_verifier_to_trees(inst, budget=1)


# ---------------------------------------------------------------------------
# completeness harness
# ---------------------------------------------------------------------------


def test_harness_on_flip_stream():
    text = "p dnf 4 3 2\n1 -2 0\n3 0\n-1 4 0\na 0 1 0 0\n"
    inst = parse_dnf(text)
    trees = compile_dnf_verifier_to_trees(inst)
    r = random.Random(7)
    stream = [("f", r.randrange(4), r.randrange(2)) for _ in range(50)]
    answers = completeness_harness(trees, list(inst.assignment), stream)
    probe = parse_dnf(text)
    want = [eval_bruteforce(probe)]
    for tok in stream:
        probe.apply(tok)
        want.append(eval_bruteforce(probe))
    assert answers == want


def test_harness_empty_stream(rng):
    inst = rand_compilable(rng)
    trees = compile_dnf_verifier_to_trees(inst)
    answers = completeness_harness(trees, list(inst.assignment), [])
    assert answers == [eval_bruteforce(inst)]


def test_harness_mirrors_at_most_update_plus_depth_bits(rng):
    inst = rand_compilable(rng)
    trees = compile_dnf_verifier_to_trees(inst)
    depth = max(t.depth() for t in trees)
    stream = [("f", i % inst.num_vars, (i // 2) % 2) for i in range(20)] + [("q",)]
    trace = []
    completeness_harness(trees, list(inst.assignment), stream, trace=trace)
    assert all(rec["mirrored_bits"] <= 1 + depth for rec in trace)
    # queries write nothing at all
    assert trace[-1]["mirrored_bits"] <= depth


def test_harness_audit_catches_desync(rng):
    class Skewed(FdtOracle):
        def update(self, position, value):
            pass  # drops every write

    inst = rand_compilable(rng)
    trees = compile_dnf_verifier_to_trees(inst)
    oracle = Skewed(FdtInstance(list(inst.assignment), list(trees)))
    stream = [("f", 0, 1 - inst.assignment[0])]
    with pytest.raises(OracleDesync):
        completeness_harness(trees, list(inst.assignment), stream, oracle=oracle)


def test_harness_trace_records_choice(rng):
    inst = rand_compilable(rng)
    trees = compile_dnf_verifier_to_trees(inst)
    trace = []
    completeness_harness(trees, list(inst.assignment), [("q",)], trace=trace)
    assert len(trace) == 2
    for rec in trace:
        assert set(rec) >= {"update", "proof_tree", "leaf", "mirrored_bits", "y"}
    assert trace[0]["update"] is None


def test_harness_rejects_foreign_tokens(rng):
    inst = rand_compilable(rng)
    trees = compile_dnf_verifier_to_trees(inst)
    with pytest.raises(ParseError):
        completeness_harness(trees, list(inst.assignment), [("e", "+", 0, 1)])


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------


def test_tree_file_round_trip(rng):
    for _ in range(20):
        inst = random_instance(rng)
        again = parse_trees(format_trees(inst))
        assert again.memory == inst.memory
        assert again.trees == inst.trees


def test_tree_file_worked_example():
    text = "T\nR 1 2 3\nE 0 0 0\nE 1 1 1\nm 0 1\n"
    inst = parse_trees(text)
    assert inst.memory == [0, 1]
    assert len(inst.trees) == 1
    assert inst.trees[0].nodes == single_read().nodes


def test_tree_file_rejects_garbage():
    with pytest.raises(ParseError):
        parse_trees("R 1 2 3\nm 0\n")  # node line before any T
    with pytest.raises(ParseError):
        parse_trees("T\nE 0 0 1\n")  # missing memory line
    with pytest.raises(ParseError):
        parse_trees("T\nX 1\nm 0\n")
    with pytest.raises(IndexOutOfRange):
        parse_trees("T\nR 3 2 3\nE 0 0 0\nE 1 1 1\nm 0\n")


def test_stream_tokens_reused_from_shared_parser():
    # harness consumes the same token shapes the other dynamic problems use
    stream = UpdateStream.parse("f 1 0\nq\n")
    assert stream.items == [("f", 0, 0), ("q",)]
