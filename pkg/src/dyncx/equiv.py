"""Equivalences between dynamic DNF, all-white, independent-set, and
sparse orthogonal vectors.

Canonical all-white orientation: colors live on the L side, the question
scans R ("is there an r whose neighbors are all white?"). Data authored in
the opposite orientation (colors on the scanned side's counterpart) can be
flipped into canonical form with `transpose`.

Answer correspondences:
  dnf F(phi)=1            <-> all-white YES          (same bit)
  all-white YES           <-> S independent: NO      (negation)
  S independent: NO       <-> dnf F(phi)=1           (negation again)
  all-white YES           <-> exists j: u.v_j = 0    (same bit)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from .framework import BudgetExceeded, ParseError, UndecodableUpdate, env_budget
from .dnf import Clause, DnfInstance

WHITE = True
BLACK = False


@dataclass
class AllWhiteInstance:
    num_l: int
    num_r: int
    edges: list[tuple[int, int]]  # (l, r) pairs
    colors: list[bool]  # per L node; True = white
    width: int | None = None  # advisory bound on R-side degree

    def validate(self):
        if len(self.colors) != self.num_l:
            raise ParseError("colors length != |L|")
        seen = set()
        for l, r in self.edges:
            if not (0 <= l < self.num_l and 0 <= r < self.num_r):
                raise ParseError(f"edge ({l},{r}) out of range")
            if (l, r) in seen:
                raise ParseError(f"duplicate edge ({l},{r})")
            seen.add((l, r))
        if self.width is not None:
            deg = [0] * self.num_r
            for _, r in self.edges:
                deg[r] += 1
                if deg[r] > self.width:
                    raise ParseError(f"R node {r} exceeds declared width")
        return self

    def r_neighbors(self) -> list[list[int]]:
        nbrs = [[] for _ in range(self.num_r)]
        for l, r in self.edges:
            nbrs[r].append(l)
        return nbrs

    def apply(self, token):
        if token[0] == "c":
            _, node, color = token
            if not 0 <= node < self.num_l:
                raise ParseError(f"L node {node} out of range")
            self.colors[node] = color == "W"
        elif token[0] == "q":
            pass
        else:
            raise UndecodableUpdate(f"all-white instance cannot apply {token!r}")


def aw_bruteforce(inst: AllWhiteInstance) -> int:
    """Scan every R node; a node with no neighbors counts as all-white."""
    nbrs = inst.r_neighbors()
    for r in range(inst.num_r):
        if all(inst.colors[l] for l in nbrs[r]):
            return 1
    return 0


def transpose(num_scanned: int, num_colored: int, edges, colors) -> AllWhiteInstance:
    """Canonicalize data given in the scan-first orientation.

    Input edges are (scanned, colored) pairs and colors belong to the colored
    side; output is the same object with colors on L and the scan on R.
    """
    return AllWhiteInstance(
        num_l=num_colored,
        num_r=num_scanned,
        edges=[(c, s) for s, c in edges],
        colors=list(colors),
    ).validate()


class AllWhiteCounters:
    """Per-R-node count of black neighbors; answer = some count is zero."""

    def __init__(self, inst: AllWhiteInstance):
        inst.validate()
        self.colors = list(inst.colors)
        self.l_neighbors: list[list[int]] = [[] for _ in range(inst.num_l)]
        self.black_count = [0] * inst.num_r
        for l, r in inst.edges:
            self.l_neighbors[l].append(r)
            if not self.colors[l]:
                self.black_count[r] += 1
        self.zero_nodes = sum(1 for c in self.black_count if c == 0)
        self.ops = 0

    def answer(self) -> int:
        self.ops += 1
        return 1 if self.zero_nodes > 0 else 0

    def set_color(self, node: int, white: bool):
        self.ops += 1
        if self.colors[node] == white:
            return
        self.colors[node] = white
        delta = -1 if white else 1
        for r in self.l_neighbors[node]:
            was = self.black_count[r]
            self.black_count[r] = was + delta
            if was == 0:
                self.zero_nodes -= 1
            elif was + delta == 0:
                self.zero_nodes += 1

    def apply(self, token) -> int:
        if token[0] == "c":
            self.set_color(token[1], token[2] == "W")
            return 1 if self.zero_nodes > 0 else 0
        if token[0] == "q":
            return 1 if self.zero_nodes > 0 else 0
        raise UndecodableUpdate(f"all-white counters cannot apply {token!r}")


# ---------------------------------------------------------------------------
# Sparse orthogonal vectors
# ---------------------------------------------------------------------------


@dataclass
class SparseOvInstance:
    """u in {0,1}^n against columns v_1..v_m stored as sorted index lists.

    Question: is there a j with u . v_j = 0?
    """

    n: int
    m: int
    columns: list[list[int]]
    u: list[int]

    def validate(self):
        if len(self.u) != self.n or len(self.columns) != self.m:
            raise ParseError("dimension mismatch")
        for j, col in enumerate(self.columns):
            if col != sorted(set(col)):
                raise ParseError(f"column {j} must be sorted and duplicate-free")
            if col and not (0 <= col[0] and col[-1] < self.n):
                raise ParseError(f"column {j} index out of range")
        return self

    def apply(self, token):
        if token[0] == "u":
            _, i, bit = token
            if not 0 <= i < self.n:
                raise ParseError(f"u index {i} out of range")
            self.u[i] = bit
        elif token[0] == "q":
            pass
        else:
            raise UndecodableUpdate(f"ov instance cannot apply {token!r}")


def ov_bruteforce(inst: SparseOvInstance) -> int:
    for col in inst.columns:
        if all(inst.u[i] == 0 for i in col):
            return 1
    return 0


# ---------------------------------------------------------------------------
# Independent set under membership toggles
# ---------------------------------------------------------------------------


@dataclass
class HypergraphInstance:
    """Hypergraph plus a node subset S; question: is S independent?

    S is independent when no hyperedge is fully inside S. An empty hyperedge
    is vacuously inside every S; parse_hypergraph rejects those.
    """

    num_nodes: int
    hyperedges: list[tuple[int, ...]]
    s: set[int] = field(default_factory=set)

    def validate(self):
        for k, e in enumerate(self.hyperedges):
            if any(not 0 <= v < self.num_nodes for v in e):
                raise ParseError(f"hyperedge {k} node out of range")
            if len(set(e)) != len(e):
                raise ParseError(f"hyperedge {k} repeats a node")
        if any(not 0 <= v < self.num_nodes for v in self.s):
            raise ParseError("S contains an out-of-range node")
        return self

    def apply(self, token):
        if token[0] == "s":
            _, sign, v = token
            if not 0 <= v < self.num_nodes:
                raise ParseError(f"node {v} out of range")
            if sign == "+":
                self.s.add(v)
            elif sign == "-":
                self.s.discard(v)
            else:
                raise UndecodableUpdate(f"bad membership sign {sign!r}")
        elif token[0] == "q":
            pass
        else:
            raise UndecodableUpdate(f"hypergraph instance cannot apply {token!r}")


def indep_bruteforce(inst: HypergraphInstance) -> int:
    """1 when S is independent (no hyperedge fully white-side, so to speak)."""
    for e in inst.hyperedges:
        if all(v in inst.s for v in e):
            return 0
    return 1


# ---------------------------------------------------------------------------
# Converters. Each returns (target instance, translator); a translator maps
# one source token to the list of target tokens (at most 2 for dnf->aw,
# exactly 1 elsewhere; repeated no-op updates translate to []).
# ---------------------------------------------------------------------------


class _Translator:
    def __init__(self, fn):
        self._fn = fn

    def __call__(self, token) -> list[tuple]:
        return self._fn(token)


def dnf_to_aw(inst: DnfInstance, prune: bool = False):
    """Variables split into positive/negative literal nodes (2i, 2i+1);
    clause j becomes R node j adjacent to the literal nodes it contains.
    phi(x_i)=1 colors node 2i white and 2i+1 black; F(phi)=1 iff some R node
    is all-white. With prune=True, literal nodes used by no clause are
    dropped (an index map is kept on the translator)."""
    inst.validate()
    edges = []
    for j, c in enumerate(inst.clauses):
        for var, positive in c.literals:
            node = 2 * var if positive else 2 * var + 1
            edges.append((node, j))
    colors = []
    for var in range(inst.num_vars):
        white = bool(inst.assignment[var])
        colors.extend([white, not white])
    keep = list(range(2 * inst.num_vars))
    if prune:
        used = {l for l, _ in edges}
        keep = sorted(used)
    remap = {old: new for new, old in enumerate(keep)}
    aw = AllWhiteInstance(
        num_l=len(keep),
        num_r=len(inst.clauses),
        edges=[(remap[l], r) for l, r in edges],
        colors=[colors[old] for old in keep],
        width=inst.width,
    ).validate()

    def translate(token):
        if token[0] == "q":
            return [("q",)]
        if token[0] != "f":
            raise UndecodableUpdate(f"dnf->aw cannot translate {token!r}")
        _, var, bit = token
        out = []
        pos, neg = 2 * var, 2 * var + 1
        if pos in remap:
            out.append(("c", remap[pos], "W" if bit else "B"))
        if neg in remap:
            out.append(("c", remap[neg], "B" if bit else "W"))
        return out

    tr = _Translator(translate)
    tr.node_of_literal = remap
    return aw, tr


def aw_to_indep(inst: AllWhiteInstance):
    """V = L, one hyperedge per R node's neighborhood, S = white nodes.
    S is independent exactly when no R node is all-white (negation)."""
    inst.validate()
    hg = HypergraphInstance(
        num_nodes=inst.num_l,
        hyperedges=[tuple(sorted(n)) for n in inst.r_neighbors()],
        s={l for l in range(inst.num_l) if inst.colors[l]},
    ).validate()

    def translate(token):
        if token[0] == "q":
            return [("q",)]
        if token[0] != "c":
            raise UndecodableUpdate(f"aw->indep cannot translate {token!r}")
        _, node, color = token
        return [("s", "+" if color == "W" else "-", node)]

    return hg, _Translator(translate)


def indep_to_dnf(inst: HypergraphInstance):
    """Positive clauses: C_j holds x_i iff node i is in hyperedge j;
    phi(x_i)=1 iff i in S. F(phi)=1 exactly when S is NOT independent."""
    inst.validate()
    dnf = DnfInstance(
        num_vars=inst.num_nodes,
        clauses=[Clause(tuple((v, True) for v in e)) for e in inst.hyperedges],
        assignment=[1 if v in inst.s else 0 for v in range(inst.num_nodes)],
        width=max((len(e) for e in inst.hyperedges), default=0),
    ).validate()

    def translate(token):
        if token[0] == "q":
            return [("q",)]
        if token[0] != "s":
            raise UndecodableUpdate(f"indep->dnf cannot translate {token!r}")
        _, sign, v = token
        return [("f", v, 1 if sign == "+" else 0)]

    return dnf, _Translator(translate)


def aw_to_ov(inst: AllWhiteInstance):
    """Columns are the R-side neighborhoods; u_i = 1 iff L node i is black.
    Some u.v_j = 0 exactly when some R node is all-white (same bit)."""
    inst.validate()
    ov = SparseOvInstance(
        n=inst.num_l,
        m=inst.num_r,
        columns=[sorted(n) for n in inst.r_neighbors()],
        u=[0 if inst.colors[l] else 1 for l in range(inst.num_l)],
    ).validate()

    def translate(token):
        if token[0] == "q":
            return [("q",)]
        if token[0] != "c":
            raise UndecodableUpdate(f"aw->ov cannot translate {token!r}")
        _, node, color = token
        return [("u", node, 0 if color == "W" else 1)]

    return ov, _Translator(translate)


def ov_to_aw(inst: SparseOvInstance):
    inst.validate()
    aw = AllWhiteInstance(
        num_l=inst.n,
        num_r=inst.m,
        edges=sorted((i, j) for j, col in enumerate(inst.columns) for i in col),
        colors=[inst.u[i] == 0 for i in range(inst.n)],
    ).validate()

    def translate(token):
        if token[0] == "q":
            return [("q",)]
        if token[0] != "u":
            raise UndecodableUpdate(f"ov->aw cannot translate {token!r}")
        _, i, bit = token
        return [("c", i, "B" if bit else "W")]

    return aw, _Translator(translate)


# ---------------------------------------------------------------------------
# Hypergraph-to-graph lift
# ---------------------------------------------------------------------------


def hypergraph_lift(inst: HypergraphInstance, k: int, budget: int | None = None):
    """Lift a 2k-uniform hypergraph H to a graph G on the k-subsets of V(H).

    Every hyperedge e contributes one G edge per split of e into two
    k-subsets. The query set for S_H is {v_T : T subset of S_H, |T|=k};
    that set is independent in G iff S_H is independent in H.

    Returns (num_nodes, edges, subset_index) where subset_index maps a
    sorted k-tuple of H nodes to its G node id.
    """
    inst.validate()
    if k < 1:
        raise ParseError("k must be >= 1")
    for e in inst.hyperedges:
        if len(e) != 2 * k:
            raise ParseError(f"hyperedge {e} is not 2k-uniform for k={k}")
    budget = env_budget() if budget is None else budget
    total = math.comb(inst.num_nodes, k) if k <= inst.num_nodes else 0
    if total > budget:
        raise BudgetExceeded(f"C({inst.num_nodes},{k}) = {total} exceeds {budget}")
    subset_index = {
        sub: idx for idx, sub in enumerate(combinations(range(inst.num_nodes), k))
    }
    edges = set()
    for e in inst.hyperedges:
        nodes = tuple(sorted(e))
        for half in combinations(nodes, k):
            # fix the smallest node into one side to take each split once
            if nodes[0] not in half:
                continue
            other = tuple(v for v in nodes if v not in half)
            a, b = subset_index[half], subset_index[other]
            edges.add((min(a, b), max(a, b)))
    return total, sorted(edges), subset_index


def lift_query_set(subset_index, s_h, k: int) -> set[int]:
    return {subset_index[sub] for sub in combinations(tuple(sorted(s_h)), k)}


def graph_set_independent(edges, node_set) -> bool:
    return not any(a in node_set and b in node_set for a, b in edges)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------
#
#   p aw <|L|> <|R|>         then `e <l> <r>` and `c <l> <W|B>` lines
#   p ov <n> <m>             then one line of indices per column, `u <bits>`
#   p hg <n> <m>             then one node-list line per hyperedge, `s <ids>`
# All ids 1-based.


def parse_aw(text: str) -> AllWhiteInstance:
    header = None
    edges = []
    color_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "aw":
                raise ParseError(f"line {lineno}: want 'p aw <|L|> <|R|>'")
            header = (int(parts[2]), int(parts[3]))
        elif parts[0] == "e":
            edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
        elif parts[0] == "c":
            if parts[2] not in ("W", "B"):
                raise ParseError(f"line {lineno}: color must be W or B")
            color_lines.append((int(parts[1]) - 1, parts[2] == "W"))
        else:
            raise ParseError(f"line {lineno}: unknown line {raw!r}")
    if header is None:
        raise ParseError("missing 'p aw' header")
    num_l, num_r = header
    colors = [WHITE] * num_l
    for node, white in color_lines:
        if not 0 <= node < num_l:
            raise ParseError(f"color line for out-of-range node {node + 1}")
        colors[node] = white
    return AllWhiteInstance(num_l, num_r, edges, colors).validate()


def format_aw(inst: AllWhiteInstance) -> str:
    out = [f"p aw {inst.num_l} {inst.num_r}"]
    out += [f"e {l + 1} {r + 1}" for l, r in inst.edges]
    out += [
        f"c {l + 1} {'W' if white else 'B'}" for l, white in enumerate(inst.colors)
    ]
    return "\n".join(out) + "\n"


def parse_ov(text: str) -> SparseOvInstance:
    header = None
    columns = []
    u = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line and (header is None or u is not None):
            continue
        parts = line.split()
        if parts and parts[0] == "p":
            if len(parts) != 4 or parts[1] != "ov":
                raise ParseError(f"line {lineno}: want 'p ov <n> <m>'")
            header = (int(parts[2]), int(parts[3]))
        elif parts and parts[0] == "u":
            u = [int(b) for b in parts[1:]]
        else:
            # a blank line between header and u is an empty column; v_j with
            # no support is orthogonal to everything
            columns.append(sorted(int(tok) - 1 for tok in parts))
    if header is None:
        raise ParseError("missing 'p ov' header")
    n, m = header
    if len(columns) != m:
        raise ParseError(f"header says {m} columns, file has {len(columns)}")
    if u is None:
        u = [0] * n
    return SparseOvInstance(n, m, columns, u).validate()


def format_ov(inst: SparseOvInstance) -> str:
    out = [f"p ov {inst.n} {inst.m}"]
    out += [" ".join(str(i + 1) for i in col) for col in inst.columns]
    out.append("u " + " ".join(str(b) for b in inst.u))
    return "\n".join(out) + "\n"


def parse_hypergraph(text: str) -> HypergraphInstance:
    header = None
    hyperedges = []
    s: set[int] = set()
    seen_s = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line and (header is None or seen_s):
            continue
        parts = line.split()
        if parts and parts[0] == "p":
            if len(parts) != 4 or parts[1] != "hg":
                raise ParseError(f"line {lineno}: want 'p hg <n> <m>'")
            header = (int(parts[2]), int(parts[3]))
        elif parts and parts[0] == "s":
            s = {int(tok) - 1 for tok in parts[1:]}
            seen_s = True
        else:
            nodes = tuple(sorted(int(tok) - 1 for tok in parts))
            if not nodes:
                # files must not carry them: such an edge is inside every S,
                # so the instance answers "dependent" no matter what
                raise ParseError(f"line {lineno}: empty hyperedge")
            hyperedges.append(nodes)
    if header is None:
        raise ParseError("missing 'p hg' header")
    n, m = header
    if len(hyperedges) != m:
        raise ParseError(f"header says {m} hyperedges, file has {len(hyperedges)}")
    return HypergraphInstance(n, hyperedges, s).validate()


def format_hypergraph(inst: HypergraphInstance) -> str:
    out = [f"p hg {inst.num_nodes} {len(inst.hyperedges)}"]
    out += [" ".join(str(v + 1) for v in e) for e in inst.hyperedges]
    out.append("s " + " ".join(str(v + 1) for v in sorted(inst.s)))
    return "\n".join(out) + "\n"
