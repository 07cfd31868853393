"""Shallow decision trees over a shared bit memory.

An instance is a memory array plus a collection of trees whose leaves carry
(x, y, rank) labels; the instance's answer is the tree whose execution leaf
has the highest rank. Trees are in normal form: along any root-to-leaf path
no variable is read twice and no read follows a write of the same bit, so
the conjunction of a path's read outcomes characterizes the path on the
ORIGINAL memory and each tree satisfies exactly one such clause.

That observation is the bridge to first-DNF (`fdt_to_fdnf`), and the other
direction of the machinery compiles a clause-checking verifier into trees
(`compile_dnf_verifier_to_trees`) so a reward-maximizing proof can be read
off an fdt oracle (`completeness_harness`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .framework import (
    BudgetExceeded,
    DyncxError,
    OracleDesync,
    ParseError,
    ProbeMeter,
    env_budget,
)
from .dnf import Clause, DnfInstance, FirstDnfInstance


class IndexOutOfRange(DyncxError):
    pass


class NotNormalized(DyncxError):
    pass


class EmptyCollection(DyncxError):
    pass


@dataclass(frozen=True)
class Read:
    index: int
    left: int
    right: int


@dataclass(frozen=True)
class Write:
    index: int
    bit: int
    child: int


@dataclass(frozen=True)
class End:
    x: int
    y: int
    rank: int


@dataclass
class DecisionTree:
    """Node 0 is the root; children are node-list positions."""

    nodes: list

    def validate(self, memory_len: int | None = None) -> "DecisionTree":
        if not self.nodes:
            raise ParseError("tree has no nodes")
        referenced: dict[int, int] = {}
        for k, node in enumerate(self.nodes):
            children = ()
            if isinstance(node, Read):
                children = (node.left, node.right)
            elif isinstance(node, Write):
                if node.bit not in (0, 1):
                    raise ParseError(f"node {k}: write bit must be 0/1")
                children = (node.child,)
            elif isinstance(node, End):
                if node.x not in (0, 1):
                    raise ParseError(f"node {k}: x label must be a bit")
            else:
                raise ParseError(f"node {k}: unknown node kind {node!r}")
            if isinstance(node, (Read, Write)):
                if memory_len is not None and not 0 <= node.index < memory_len:
                    raise IndexOutOfRange(f"node {k}: index {node.index}")
            for c in children:
                if not 0 <= c < len(self.nodes):
                    raise ParseError(f"node {k}: child {c} out of range")
                if c in referenced or c == 0:
                    raise ParseError(f"node {c} referenced twice or is the root")
                referenced[c] = k
        if len(referenced) != len(self.nodes) - 1:
            raise ParseError("unreachable nodes present")
        self._check_normal_form()
        return self

    def _check_normal_form(self):
        # DFS carrying the sets of already-read and already-written indices
        stack = [(0, frozenset(), frozenset())]
        while stack:
            at, read_seen, written = stack.pop()
            node = self.nodes[at]
            if isinstance(node, Read):
                if node.index in read_seen:
                    raise NotNormalized(f"variable {node.index} read twice on a path")
                if node.index in written:
                    raise NotNormalized(
                        f"variable {node.index} read after a write on a path"
                    )
                nxt = read_seen | {node.index}
                stack.append((node.left, nxt, written))
                stack.append((node.right, nxt, written))
            elif isinstance(node, Write):
                stack.append((node.child, read_seen, written | {node.index}))

    def depth(self) -> int:
        best = 0
        stack = [(0, 0)]
        while stack:
            at, d = stack.pop()
            node = self.nodes[at]
            if isinstance(node, End):
                best = max(best, d)
            elif isinstance(node, Read):
                stack.append((node.left, d + 1))
                stack.append((node.right, d + 1))
            else:
                stack.append((node.child, d + 1))
        return best


@dataclass
class FdtInstance:
    memory: list[int]
    trees: list[DecisionTree]

    def validate(self) -> "FdtInstance":
        for t in self.trees:
            t.validate(len(self.memory))
        return self


def execute_tree(tree: DecisionTree, memory: list[int], meter: ProbeMeter | None = None):
    """Run one tree against (and mutating) the given memory.

    Returns (leaf node id, list of (position, bit) writes in order). Probe
    count equals the path length, never more than the tree depth.
    """
    at = 0
    writes: list[tuple[int, int]] = []
    while True:
        node = tree.nodes[at]
        if isinstance(node, End):
            return at, writes
        if meter is not None:
            meter.charge()
        if not 0 <= node.index < len(memory):
            raise IndexOutOfRange(f"index {node.index} vs memory of {len(memory)}")
        if isinstance(node, Read):
            at = node.right if memory[node.index] else node.left
        else:
            memory[node.index] = node.bit
            writes.append((node.index, node.bit))
            at = node.child


def execution_leaf(tree: DecisionTree, memory: list[int]) -> End:
    leaf, _ = execute_tree(tree, list(memory))
    return tree.nodes[leaf]


def fdt_answer(inst: FdtInstance) -> int:
    """Index of the tree whose execution leaf has maximal rank.

    Each tree runs on a scratch copy, so answering never moves the memory.
    Ties break toward the smallest tree index.
    """
    if not inst.trees:
        raise EmptyCollection("no trees to choose from")
    best_idx, best_rank = None, None
    for idx, tree in enumerate(inst.trees):
        leaf, _ = execute_tree(tree, list(inst.memory))
        rank = tree.nodes[leaf].rank
        if best_rank is None or rank > best_rank:
            best_idx, best_rank = idx, rank
    return best_idx


def fdt_update(inst: FdtInstance, position: int, value: int) -> FdtInstance:
    if not 0 <= position < len(inst.memory):
        raise IndexOutOfRange(f"position {position}")
    inst.memory[position] = value
    return inst


# ---------------------------------------------------------------------------
# fDT -> first-DNF
# ---------------------------------------------------------------------------


@dataclass
class FdnfImage:
    """first-DNF picture of a tree collection plus provenance per clause."""

    fdnf: FirstDnfInstance
    clause_tree: list[int]
    clause_leaf: list[int]
    clause_rank: list[int]

    def tree_of_clause(self, j: int) -> int:
        return self.clause_tree[j]


def fdt_to_fdnf(inst: FdtInstance) -> FdnfImage:
    """One clause per root-to-leaf path; left branches contribute negated
    literals, right branches positive ones; write nodes contribute nothing
    (normal form guarantees later reads never see them). Clause order is
    descending leaf rank, ties by (tree index, path discovery order)."""
    inst.validate()
    clauses: list[Clause] = []
    provenance: list[tuple[int, int, int]] = []  # (tree, leaf, rank)
    for t_idx, tree in enumerate(inst.trees):
        # iterative DFS, left before right, = path discovery order
        stack = [(0, ())]
        discovered = []
        while stack:
            at, lits = stack.pop()
            node = tree.nodes[at]
            if isinstance(node, End):
                discovered.append((lits, at, node.rank))
            elif isinstance(node, Read):
                stack.append((node.right, lits + ((node.index, True),)))
                stack.append((node.left, lits + ((node.index, False),)))
            else:
                stack.append((node.child, lits))
        for lits, leaf, rank in discovered:
            clauses.append(Clause(lits))
            provenance.append((t_idx, leaf, rank))
    base = DnfInstance(
        num_vars=len(inst.memory),
        clauses=clauses,
        assignment=list(inst.memory),
        width=max((c.width for c in clauses), default=0),
    )
    order = sorted(
        range(len(clauses)),
        key=lambda j: (-provenance[j][2], provenance[j][0], j),
    )
    fdnf = FirstDnfInstance(base, order).validate()
    return FdnfImage(
        fdnf,
        [p[0] for p in provenance],
        [p[1] for p in provenance],
        [p[2] for p in provenance],
    )


# ---------------------------------------------------------------------------
# Clause-verifier compiler and the completeness harness
# ---------------------------------------------------------------------------


def compile_dnf_verifier_to_trees(inst: DnfInstance, budget: int | None = None):
    """One tree per clause index plus a trailing null-proof tree.

    Tree j walks clause j's literals in order; reaching the end means the
    clause is satisfied (leaf x=1, y=1, rank 1), any mismatch bails out
    (x=0, y=-1, rank -1). The final tree is a lone end node (x=0, y=0,
    rank 0): conceding earns more than lying."""
    inst.validate()
    budget = env_budget() if budget is None else budget
    if len(inst.clauses) > budget:
        raise BudgetExceeded(f"{len(inst.clauses)} clauses exceeds budget {budget}")
    trees = []
    for c in inst.clauses:
        if not c.literals:
            trees.append(DecisionTree([End(1, 1, 1)]).validate())
            continue
        nodes: list = [None] * len(c.literals)
        success = len(nodes)
        nodes.append(End(1, 1, 1))
        # one shared fail leaf per mismatch keeps this a tree, not a DAG,
        # so each literal gets its own copy
        for depth, (var, positive) in enumerate(c.literals):
            follow = depth + 1 if depth + 1 < len(c.literals) else success
            fail = len(nodes)
            nodes.append(End(0, -1, -1))
            nodes[depth] = Read(var, fail, follow) if positive else Read(var, follow, fail)
        trees.append(DecisionTree(nodes).validate())
    trees.append(DecisionTree([End(0, 0, 0)]).validate())
    return trees


class FdtOracle:
    """Materialized mirror of the verifier memory plus the tree collection."""

    def __init__(self, inst: FdtInstance):
        self.inst = inst.validate()
        self.updates = 0

    def update(self, position: int, value: int):
        self.updates += 1
        fdt_update(self.inst, position, value)

    def answer(self) -> int:
        return fdt_answer(self.inst)

    def memory_view(self) -> list[int]:
        return list(self.inst.memory)


def completeness_harness(
    trees,
    memory,
    stream,
    oracle: FdtOracle | None = None,
    audit: bool = True,
    trace: list | None = None,
):
    """Run a tree-compiled verifier, outsourcing proof choice to an oracle.

    Per step: apply the update to the verifier memory, mirror the changed
    bits into the oracle, take the oracle's argmax tree as the proof,
    execute that tree on the verifier memory, mirror its writes back, and
    emit the leaf's x label. The step-0 entry is the preprocessing answer.
    """
    memory = list(memory)
    if oracle is None:
        oracle = FdtOracle(FdtInstance(list(memory), list(trees)))

    answers = []

    def consult(update_writes: list[tuple[int, int]], update_tok):
        mirrored = 0
        for pos, bit in update_writes:
            oracle.update(pos, bit)
            mirrored += 1
        pi = oracle.answer()
        leaf, writes = execute_tree(trees[pi], memory)
        for pos, bit in writes:
            oracle.update(pos, bit)
            mirrored += 1
        if audit and oracle.memory_view() != memory:
            raise OracleDesync("oracle memory diverged from verifier memory")
        if trace is not None:
            trace.append(
                {
                    "update": update_tok,
                    "proof_tree": pi,
                    "leaf": leaf,
                    "mirrored_bits": mirrored,
                    "y": trees[pi].nodes[leaf].y,
                }
            )
        answers.append(trees[pi].nodes[leaf].x)

    consult([], None)
    for tok in stream:
        if tok[0] == "f":
            _, pos, bit = tok
            if not 0 <= pos < len(memory):
                raise IndexOutOfRange(f"update position {pos}")
            changed = memory[pos] != bit
            memory[pos] = bit
            consult([(pos, bit)] if changed else [], tok)
        elif tok[0] == "q":
            consult([], tok)
        else:
            raise ParseError(f"harness cannot decode update {tok!r}")
    return answers


# ---------------------------------------------------------------------------
# Tree file format
# ---------------------------------------------------------------------------
#
# One `T` line opens a tree block; the following lines are its nodes in
# order (node ids are 1-based positions within the block):
#   R <idx> <left-id> <right-id>
#   W <idx> <bit> <child-id>
#   E <x> <y> <rank>
# A final `m <bit> ... <bit>` line gives the memory. Memory indices in
# R/W lines are 1-based.


def parse_trees(text: str) -> FdtInstance:
    memory = None
    trees: list[DecisionTree] = []
    block: list | None = None

    def close():
        nonlocal block
        if block is not None:
            trees.append(DecisionTree(block))
            block = None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "T":
            close()
            block = []
        elif parts[0] == "m":
            close()
            memory = [int(b) for b in parts[1:]]
            if any(b not in (0, 1) for b in memory):
                raise ParseError(f"line {lineno}: memory bits must be 0/1")
        elif parts[0] in ("R", "W", "E"):
            if block is None:
                raise ParseError(f"line {lineno}: node line outside a T block")
            try:
                if parts[0] == "R":
                    block.append(
                        Read(int(parts[1]) - 1, int(parts[2]) - 1, int(parts[3]) - 1)
                    )
                elif parts[0] == "W":
                    block.append(
                        Write(int(parts[1]) - 1, int(parts[2]), int(parts[3]) - 1)
                    )
                else:
                    block.append(End(int(parts[1]), int(parts[2]), int(parts[3])))
            except (ValueError, IndexError) as exc:
                raise ParseError(f"line {lineno}: bad node line {raw!r}") from exc
        else:
            raise ParseError(f"line {lineno}: unknown line {raw!r}")
    close()
    if memory is None:
        raise ParseError("missing memory line")
    return FdtInstance(memory, trees).validate()


def format_trees(inst: FdtInstance) -> str:
    out = []
    for tree in inst.trees:
        out.append("T")
        for node in tree.nodes:
            if isinstance(node, Read):
                out.append(f"R {node.index + 1} {node.left + 1} {node.right + 1}")
            elif isinstance(node, Write):
                out.append(f"W {node.index + 1} {node.bit} {node.child + 1}")
            else:
                out.append(f"E {node.x} {node.y} {node.rank}")
    out.append("m " + " ".join(str(b) for b in inst.memory))
    return "\n".join(out) + "\n"
