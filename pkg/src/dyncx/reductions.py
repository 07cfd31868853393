"""Reductions from the all-white problem to dynamic graph problems.

Each builder consumes an `AllWhiteInstance` (colors on the L side, scan
over R) and returns a triple (target, translator, decoder):

  * target      mutable target-problem instance with an `apply(token)`
  * translator  maps one source color token to at most one target token
  * decoder     recomputes the source answer bit from the target alone

The constructions place the colored nodes where the targets can toggle a
single edge or node per recoloring, so one color flip is one target
update throughout. Decoders lean on the brute-force solvers in
`oracles`; the targets exist to validate answer correspondence, not to
be fast.

The module also carries the satisfiability driver: split the variables
in half, scan all assignments of one half against clause nodes colored
by the other half, and sweep the second half in Gray-code order so each
phase recolors only the clauses whose status changed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .framework import BudgetExceeded, ParseError, UndecodableUpdate, env_budget
from .equiv import AllWhiteCounters, AllWhiteInstance, aw_bruteforce
from . import oracles


# ---------------------------------------------------------------------------
# Target instance types
# ---------------------------------------------------------------------------


@dataclass
class CapacitatedDigraph:
    num_nodes: int
    capacities: dict[tuple[int, int], int]
    s: int
    t: int

    def validate(self) -> "CapacitatedDigraph":
        if self.s == self.t:
            raise ParseError("source and sink coincide")
        for (u, v), cap in self.capacities.items():
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise ParseError(f"arc ({u},{v}) out of range")
            if cap < 1:
                raise ParseError(f"arc ({u},{v}) capacity {cap} below 1")
        return self

    def apply(self, token):
        if token[0] == "e" and token[1] == "+":
            _, _, u, v, cap = token
            self.capacities[(u, v)] = cap
        elif token[0] == "e" and token[1] == "-":
            _, _, u, v = token
            del self.capacities[(u, v)]
        else:
            raise UndecodableUpdate(f"capacitated digraph cannot apply {token!r}")

    def flow_value(self) -> int:
        value, _ = oracles.max_flow(self.num_nodes, self.capacities, self.s, self.t)
        return value


@dataclass
class NodeSubgraphInstance:
    """Fixed undirected graph with an on/off bit per node."""

    num_nodes: int
    edges: list[tuple[int, int]]
    on: list[bool]

    def validate(self) -> "NodeSubgraphInstance":
        for u, v in self.edges:
            if not (0 <= u < self.num_nodes and 0 <= v < self.num_nodes):
                raise ParseError(f"edge ({u},{v}) out of range")
        if len(self.on) != self.num_nodes:
            raise ParseError("on/off vector length mismatch")
        return self

    def apply(self, token):
        if token[0] in ("on", "off"):
            self.on[token[1]] = token[0] == "on"
        else:
            raise UndecodableUpdate(f"node subgraph cannot apply {token!r}")

    def induced_connected(self) -> bool:
        live = [v for v in range(self.num_nodes) if self.on[v]]
        if len(live) <= 1:
            return True
        index = {v: i for i, v in enumerate(live)}
        uf = oracles.UnionFind(len(live))
        for u, v in self.edges:
            if self.on[u] and self.on[v]:
                uf.union(index[u], index[v])
        root = uf.find(0)
        return all(uf.find(i) == root for i in range(1, len(live)))


@dataclass
class UndirectedGraphInstance:
    num_nodes: int
    edges: set[tuple[int, int]]

    def apply(self, token):
        if token[0] == "e" and token[1] == "+":
            self.edges.add((min(token[2], token[3]), max(token[2], token[3])))
        elif token[0] == "e" and token[1] == "-":
            self.edges.discard((min(token[2], token[3]), max(token[2], token[3])))
        else:
            raise UndecodableUpdate(f"undirected graph cannot apply {token!r}")

    def diameter(self) -> float:
        return oracles.diameter(self.num_nodes, self.edges)


@dataclass
class DigraphInstance:
    num_nodes: int
    arcs: set[tuple[int, int]]

    def apply(self, token):
        if token[0] == "e" and token[1] == "+":
            self.arcs.add((token[2], token[3]))
        elif token[0] == "e" and token[1] == "-":
            self.arcs.discard((token[2], token[3]))
        elif token[0] == "bi" and token[1] == "+":
            # one update toggling an arc pair keeps flip arity at one
            self.arcs.add((token[2], token[3]))
            self.arcs.add((token[3], token[2]))
        elif token[0] == "bi" and token[1] == "-":
            self.arcs.discard((token[2], token[3]))
            self.arcs.discard((token[3], token[2]))
        else:
            raise UndecodableUpdate(f"digraph cannot apply {token!r}")

    def out_degree(self, v: int) -> int:
        return sum(1 for a, _ in self.arcs if a == v)


# ---------------------------------------------------------------------------
# Shared translator plumbing
# ---------------------------------------------------------------------------


class _ColorTranslator:
    """Tracks source colors; emits one target token per actual flip."""

    def __init__(self, colors, on_flip):
        self.colors = list(colors)
        self.on_flip = on_flip

    def __call__(self, token):
        if token[0] == "q":
            return []
        if token[0] != "c":
            raise UndecodableUpdate(f"translator cannot map {token!r}")
        node, white = token[1], token[2] == "W"
        if self.colors[node] == white:
            return []
        self.colors[node] = white
        return [self.on_flip(node, white)]


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------
#
# The colored nodes sit on the updatable side of every construction; the
# scanned nodes are the ones probed for an all-white neighborhood.


def build_maxflow(aw: AllWhiteInstance):
    """Unit-capacity network: s -> scanned -> colored, black colored -> t.

    Flow saturates all |scanned| source arcs exactly when every scanned
    node can push its unit through some black neighbor, so value equals
    |scanned| iff the source answer is NO.
    """
    aw.validate()
    s, t = 0, 1
    scan0, col0 = 2, 2 + aw.num_r
    big = max(aw.num_r, 1)
    caps: dict[tuple[int, int], int] = {}
    for r in range(aw.num_r):
        caps[(s, scan0 + r)] = 1
    for l, r in aw.edges:
        caps[(scan0 + r, col0 + l)] = 1
    for l, white in enumerate(aw.colors):
        if not white:
            caps[(col0 + l, t)] = big
    target = CapacitatedDigraph(col0 + aw.num_l, caps, s, t).validate()

    def on_flip(node, white):
        if white:
            return ("e", "-", col0 + node, t)
        return ("e", "+", col0 + node, t, big)

    want = aw.num_r

    def decoder(tgt: CapacitatedDigraph) -> int:
        return 0 if tgt.flow_value() == want else 1

    return target, _ColorTranslator(aw.colors, on_flip), decoder


def build_subgraph_connectivity(aw: AllWhiteInstance):
    """Hub s wired to every colored node; on-set = scanned + s + blacks.

    A scanned node with only white (off) neighbors is isolated in the
    induced subgraph; otherwise everything hangs off s through a black.
    """
    aw.validate()
    scan0 = aw.num_l
    s = aw.num_l + aw.num_r
    edges = [(l, scan0 + r) for l, r in aw.edges]
    edges += [(l, s) for l in range(aw.num_l)]
    on = [not white for white in aw.colors] + [True] * (aw.num_r + 1)
    target = NodeSubgraphInstance(s + 1, edges, on).validate()

    def on_flip(node, white):
        return ("off", node) if white else ("on", node)

    def decoder(tgt: NodeSubgraphInstance) -> int:
        return 0 if tgt.induced_connected() else 1

    return target, _ColorTranslator(aw.colors, on_flip), decoder


def build_diameter(aw: AllWhiteInstance):
    """3-versus-4 diameter gap: s over the scanned side, t over blacks.

    A hub node w adjacent to s and every colored node pins all the
    uninteresting distances at 3 or less, leaving dist(scanned, t) as
    the only pair that can stretch to 4; it does exactly when some
    scanned node sees no black. Disconnection (no blacks at all) reads
    as the >=4 branch.
    """
    aw.validate()
    s, t, w = 0, 1, 2
    scan0, col0 = 3, 3 + aw.num_r
    edges: set[tuple[int, int]] = {(s, w)}
    for r in range(aw.num_r):
        edges.add((s, scan0 + r))
    for l, r in aw.edges:
        edges.add((min(scan0 + r, col0 + l), max(scan0 + r, col0 + l)))
    for l in range(aw.num_l):
        edges.add((w, col0 + l))
    for l, white in enumerate(aw.colors):
        if not white:
            edges.add((t, col0 + l))
    target = UndirectedGraphInstance(col0 + aw.num_l, edges)

    def on_flip(node, white):
        return ("e", "-" if white else "+", t, col0 + node)

    def decoder(tgt: UndirectedGraphInstance) -> int:
        return 0 if tgt.diameter() == 3 else 1

    return target, _ColorTranslator(aw.colors, on_flip), decoder


def _reach_digraph(aw: AllWhiteInstance):
    s = 0
    col0, scan0 = 1, 1 + aw.num_l
    arcs = {(col0 + l, scan0 + r) for l, r in aw.edges}
    for l, white in enumerate(aw.colors):
        if not white:
            arcs.add((s, col0 + l))
    return s, col0, scan0, arcs


def build_st_reach(aw: AllWhiteInstance):
    """Arcs colored->scanned plus s->black; T = scanned nodes.

    Every scanned node is reachable from s iff each has a black
    neighbor to hop through.
    """
    aw.validate()
    s, col0, scan0, arcs = _reach_digraph(aw)
    target = DigraphInstance(scan0 + aw.num_r, arcs)
    terminals = [scan0 + r for r in range(aw.num_r)]

    def on_flip(node, white):
        return ("e", "-" if white else "+", s, col0 + node)

    def decoder(tgt: DigraphInstance) -> int:
        seen = oracles.reachable_from(tgt.num_nodes, tgt.arcs, s)
        return 0 if all(v in seen for v in terminals) else 1

    return target, _ColorTranslator(aw.colors, on_flip), decoder


def build_count_reach(aw: AllWhiteInstance):
    """Same digraph as s-t reach; count nodes reachable from s.

    Excluding s itself, the reach is the blacks plus every scanned node
    with a black neighbor, so the count tops out at |scanned| + #black
    exactly on NO instances. The decoder reads #black back off s's
    out-degree, keeping it a function of the target alone.
    """
    aw.validate()
    s, _, _, arcs = _reach_digraph(aw)
    target = DigraphInstance(1 + aw.num_l + aw.num_r, arcs)
    num_scanned = aw.num_r

    def on_flip(node, white):
        return ("e", "-" if white else "+", s, 1 + node)

    def decoder(tgt: DigraphInstance) -> int:
        seen = oracles.reachable_from(tgt.num_nodes, tgt.arcs, s) - {s}
        return 0 if len(seen) == num_scanned + tgt.out_degree(s) else 1

    return target, _ColorTranslator(aw.colors, on_flip), decoder


def build_count_scc(aw: AllWhiteInstance):
    """Count strongly connected components of the reach digraph closed
    into cycles: scanned->s arcs plus bidirectional s<->black pairs.

    s, the blacks, and every scanned node with a black neighbor collapse
    into one component; whites are sinksless singletons; a scanned node
    with no black neighbor is a singleton too. Hence #SCC = 1 + #white
    iff the source answer is NO. One flip toggles one s<->node pair via
    a single paired-arc update.
    """
    aw.validate()
    s = 0
    col0, scan0 = 1, 1 + aw.num_l
    arcs = {(col0 + l, scan0 + r) for l, r in aw.edges}
    for r in range(aw.num_r):
        arcs.add((scan0 + r, s))
    for l, white in enumerate(aw.colors):
        if not white:
            arcs.add((s, col0 + l))
            arcs.add((col0 + l, s))
    target = DigraphInstance(scan0 + aw.num_r, arcs)
    num_colored = aw.num_l

    def on_flip(node, white):
        return ("bi", "-" if white else "+", s, col0 + node)

    def decoder(tgt: DigraphInstance) -> int:
        num_black = sum(1 for a, b in tgt.arcs if a == s and b < scan0)
        num_white = num_colored - num_black
        return 0 if oracles.scc_count(tgt.num_nodes, tgt.arcs) == 1 + num_white else 1

    return target, _ColorTranslator(aw.colors, on_flip), decoder


REDUCTIONS = {
    "maxflow": build_maxflow,
    "subconn": build_subgraph_connectivity,
    "diameter": build_diameter,
    "streach": build_st_reach,
    "countreach": build_count_reach,
    "countscc": build_count_scc,
}


# ---------------------------------------------------------------------------
# Per-step agreement harness
# ---------------------------------------------------------------------------


@dataclass
class ReductionStep:
    step: int
    update: tuple | None
    source_answer: int
    target_answer: int

    @property
    def agree(self) -> bool:
        return self.source_answer == self.target_answer


def check_reduction(build, aw: AllWhiteInstance, stream):
    """Drive source and target in lockstep; record both answers per step.

    Step 0 is the initial state. The source answer comes from the
    all-white brute force, the target answer from the decoder; agreement
    everywhere is the whole point of the catalog.
    """
    aw = AllWhiteInstance(aw.num_l, aw.num_r, list(aw.edges), list(aw.colors), aw.width)
    target, translate, decode = build(aw)
    records = [ReductionStep(0, None, aw_bruteforce(aw), decode(target))]
    for i, token in enumerate(stream, 1):
        for out in translate(token):
            target.apply(out)
        aw.apply(token)
        records.append(ReductionStep(i, token, aw_bruteforce(aw), decode(target)))
    return records


# ---------------------------------------------------------------------------
# CNF instances and the satisfiability driver
# ---------------------------------------------------------------------------


@dataclass
class CnfInstance:
    """Clauses are tuples of nonzero 1-based signed literals."""

    num_vars: int
    clauses: list[tuple[int, ...]]

    def validate(self) -> "CnfInstance":
        for i, clause in enumerate(self.clauses):
            if not clause:
                raise ParseError(f"clause {i + 1} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ParseError(f"clause {i + 1}: literal {lit} out of range")
        return self


def parse_dimacs(text: str) -> CnfInstance:
    num_vars = None
    expected = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"bad header {raw!r}")
            num_vars, expected = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise ParseError("clause line before header")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(lit)
    if num_vars is None:
        raise ParseError("missing p cnf header")
    if pending:
        raise ParseError("unterminated clause")
    if expected is not None and len(clauses) != expected:
        raise ParseError(f"header promised {expected} clauses, found {len(clauses)}")
    return CnfInstance(num_vars, clauses).validate()


def format_dimacs(inst: CnfInstance) -> str:
    lines = [f"p cnf {inst.num_vars} {len(inst.clauses)}"]
    for clause in inst.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0")
    return "\n".join(lines) + "\n"


def _half_satisfies(clause, lo: int, hi: int, bits: int) -> bool:
    # variables lo..hi-1 (0-based), assignment given by the bit pattern
    for lit in clause:
        v = abs(lit) - 1
        if lo <= v < hi and bool((bits >> (v - lo)) & 1) == (lit > 0):
            return True
    return False


def sat_via_allwhite(cnf: CnfInstance, aw_solver=None, budget: int | None = None,
                     stats: dict | None = None) -> int:
    """Decide satisfiability through a dynamic all-white solver.

    Scanned side: all assignments of the first half of the variables,
    one node each, with an edge to every clause that assignment fails to
    satisfy. Colored side: the clauses. A phase fixes an assignment of
    the second half, colors each clause white iff that half already
    satisfies it, and queries; a YES phase exhibits a first-half node
    none of whose still-unsatisfied (black) clauses it misses, i.e. a
    satisfying full assignment. Phases walk the second half in Gray-code
    order so only status-changing clauses get recolored; total solver
    operations stay within 2^(n/2) * (#clauses + 1).
    """
    cnf.validate()
    budget = env_budget() if budget is None else budget
    n = cnf.num_vars + (cnf.num_vars % 2)
    half = n // 2
    if 2 ** half > budget:
        raise BudgetExceeded(f"2^{half} scanned nodes exceeds budget {budget}")
    m = len(cnf.clauses)

    num_r = 2 ** half
    edges = []
    for u1 in range(num_r):
        for c, clause in enumerate(cnf.clauses):
            if not _half_satisfies(clause, 0, half, u1):
                edges.append((c, u1))

    # phase 0: second half all zeros
    sat2 = [0] * m  # count of satisfied second-half literals per clause
    occ2: list[list[tuple[int, bool]]] = [[] for _ in range(n - half)]
    for c, clause in enumerate(cnf.clauses):
        for lit in clause:
            v = abs(lit) - 1
            if v >= half:
                occ2[v - half].append((c, lit > 0))
                if lit < 0:
                    sat2[c] += 1
    colors = [count > 0 for count in sat2]  # white = satisfied by the half
    aw = AllWhiteInstance(m, num_r, edges, colors).validate()
    solver = (aw_solver or AllWhiteCounters)(aw)

    phases = 1
    found = solver.answer() == 1
    u2 = 0
    for i in range(1, 2 ** (n - half)):
        if found:
            break
        flip = (i & -i).bit_length() - 1
        u2 ^= 1 << flip
        bit_on = bool((u2 >> flip) & 1)
        for c, positive in occ2[flip]:
            before = sat2[c]
            sat2[c] += 1 if positive == bit_on else -1
            if (before > 0) != (sat2[c] > 0):
                solver.set_color(c, sat2[c] > 0)
        phases += 1
        found = solver.answer() == 1

    if stats is not None:
        stats.update(
            ops=getattr(solver, "ops", None),
            phases=phases,
            num_scanned=num_r,
            num_clauses=m,
            op_bound=num_r * (m + 1),
        )
    return 1 if found else 0
