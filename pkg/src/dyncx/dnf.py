"""Dynamic DNF evaluation.

An instance is a DNF formula F over n boolean variables together with a
current assignment. Updates set one variable; the query is F's value. Two
routes are implemented: a full scan (`eval_bruteforce`) and per-clause
unsatisfied-literal counters (`ClauseCounters`) whose flip cost is the
variable's occurrence-list length.

The "first satisfied clause" variant keeps a total order on clauses and asks
for the first satisfied one. It reduces to plain dynamic DNF by adding
pairs of search variables and binary-searching on the clause index; one
query costs at most 5*ceil(log2 m) variable flips and leaves the search
variables all-ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .framework import (
    BOTTOM,
    ParseError,
    ProbeMeter,
    UndecodableUpdate,
    VerifierOutput,
    decode_index,
    encode_index,
)


class MalformedClause(ParseError):
    pass


class VarOutOfRange(ParseError):
    pass


@dataclass(frozen=True)
class Clause:
    """Conjunction of literals; (var, True) is positive, (var, False) negated.

    A clause with zero literals evaluates to true.
    """

    literals: tuple[tuple[int, bool], ...]

    @property
    def width(self) -> int:
        return len(self.literals)

    def variables(self) -> list[int]:
        return [v for v, _ in self.literals]

    def satisfied_by(self, assignment, meter: ProbeMeter | None = None) -> bool:
        for var, positive in self.literals:
            if meter is not None:
                meter.charge()
            if bool(assignment[var]) != positive:
                return False
        return True


def clause(*lits: int) -> Clause:
    """Build a clause from nonzero 1-based signed literals (DIMACS style)."""
    return Clause(tuple((abs(l) - 1, l > 0) for l in lits))


@dataclass
class DnfInstance:
    num_vars: int
    clauses: list[Clause]
    assignment: list[int]
    width: int | None = None  # advisory bound, not enforced by the ops

    def validate(self):
        if len(self.assignment) != self.num_vars:
            raise ParseError("assignment length != num_vars")
        for j, c in enumerate(self.clauses):
            seen = set()
            for var, _ in c.literals:
                if not 0 <= var < self.num_vars:
                    raise VarOutOfRange(f"clause {j}: variable {var} out of range")
                if var in seen:
                    raise MalformedClause(f"clause {j}: duplicate variable {var}")
                seen.add(var)
        if self.width is not None:
            for j, c in enumerate(self.clauses):
                if c.width > self.width:
                    raise MalformedClause(f"clause {j} wider than declared bound")
        return self

    def apply(self, token):
        if token[0] == "f":
            _, var, bit = token
            if not 0 <= var < self.num_vars:
                raise VarOutOfRange(f"variable {var} out of range")
            self.assignment[var] = bit
        elif token[0] == "q":
            pass
        else:
            raise UndecodableUpdate(f"dnf instance cannot apply {token!r}")


def eval_bruteforce(inst: DnfInstance) -> int:
    """Full scan; the oracle route. Empty formula (m=0) evaluates to 0."""
    for c in inst.clauses:
        if c.satisfied_by(inst.assignment):
            return 1
    return 0


def prune_unused(inst: DnfInstance) -> tuple[DnfInstance, list[int]]:
    """Drop variables absent from every clause; returns (instance, old ids)."""
    used = sorted({v for c in inst.clauses for v in c.variables()})
    remap = {old: new for new, old in enumerate(used)}
    clauses = [
        Clause(tuple((remap[v], pos) for v, pos in c.literals)) for c in inst.clauses
    ]
    assignment = [inst.assignment[v] for v in used]
    return DnfInstance(len(used), clauses, assignment, inst.width), used


# ---------------------------------------------------------------------------
# Counter-based dynamic algorithm
# ---------------------------------------------------------------------------


class ClauseCounters:
    """Per-clause count of unsatisfied literals plus a satisfied-clause tally.

    flip() touches exactly the clauses in the variable's occurrence list; a
    flip to the current value is a no-op. `meter` counts those touches.
    """

    def __init__(self, inst: DnfInstance):
        inst.validate()
        self.num_vars = inst.num_vars
        self.clauses = inst.clauses
        self.assignment = list(inst.assignment)
        self.occ: list[list[tuple[int, bool]]] = [[] for _ in range(inst.num_vars)]
        self.unsat = []
        self.satisfied = 0
        self.meter = ProbeMeter()
        for j, c in enumerate(inst.clauses):
            bad = 0
            for var, positive in c.literals:
                self.occ[var].append((j, positive))
                if bool(self.assignment[var]) != positive:
                    bad += 1
            self.unsat.append(bad)
            if bad == 0:
                self.satisfied += 1

    def answer(self) -> int:
        return 1 if self.satisfied > 0 else 0

    def flip(self, var: int, bit: int) -> int:
        if not 0 <= var < self.num_vars:
            raise VarOutOfRange(f"variable {var} out of range")
        if self.assignment[var] == bit:
            return self.answer()
        self.assignment[var] = bit
        truthy = bool(bit)
        for j, positive in self.occ[var]:
            self.meter.charge()
            if truthy == positive:  # literal just became true
                self.unsat[j] -= 1
                if self.unsat[j] == 0:
                    self.satisfied += 1
            else:
                if self.unsat[j] == 0:
                    self.satisfied -= 1
                self.unsat[j] += 1
        return self.answer()

    def toggle(self, var: int) -> int:
        return self.flip(var, 1 - self.assignment[var])

    def apply(self, token) -> int:
        if token[0] == "f":
            return self.flip(token[1], token[2])
        if token[0] == "q":
            return self.answer()
        raise UndecodableUpdate(f"dnf counters cannot apply {token!r}")


def build_counters(inst: DnfInstance) -> ClauseCounters:
    return ClauseCounters(inst)


def counters_algorithm(inst: DnfInstance) -> ClauseCounters:
    """Factory alias with the run_deterministic algorithm shape."""
    return ClauseCounters(inst)


class NaiveAlgorithm:
    """Rescan-everything baseline; exists for benchmarks and cross-checks."""

    def __init__(self, inst: DnfInstance):
        inst.validate()
        self.inst = DnfInstance(
            inst.num_vars, inst.clauses, list(inst.assignment), inst.width
        )
        self.meter = ProbeMeter()

    def answer(self) -> int:
        for c in self.inst.clauses:
            if c.satisfied_by(self.inst.assignment, self.meter):
                return 1
        return 0

    def apply(self, token) -> int:
        self.inst.apply(token)
        return self.answer()


# ---------------------------------------------------------------------------
# Verifier
# ---------------------------------------------------------------------------


class DnfVerifier:
    """Proof = a clause index claimed satisfied, or the null proof.

    The step reads only the named clause's literals (at most w probes);
    x=1 exactly when the offered clause checks out.
    """

    max_proof_len = 4

    def __init__(self, inst: DnfInstance):
        inst.validate()
        self.clauses = inst.clauses
        self.num_vars = inst.num_vars
        self.assignment = list(inst.assignment)
        self.meter = ProbeMeter()
        self._x0 = eval_bruteforce(
            DnfInstance(inst.num_vars, inst.clauses, self.assignment)
        )

    def initial_output(self) -> VerifierOutput:
        return VerifierOutput(self._x0, 0)

    def copy(self) -> "DnfVerifier":
        dup = object.__new__(DnfVerifier)
        dup.clauses = self.clauses
        dup.num_vars = self.num_vars
        dup.assignment = list(self.assignment)
        dup.meter = ProbeMeter()
        dup._x0 = self._x0
        return dup

    def proof_space(self, token) -> list[bytes]:
        return [BOTTOM] + [encode_index(j) for j in range(len(self.clauses))]

    def step(self, token, proof: bytes) -> VerifierOutput:
        if token[0] == "f":
            _, var, bit = token
            if not 0 <= var < self.num_vars:
                raise VarOutOfRange(f"variable {var} out of range")
            self.assignment[var] = bit
        elif token[0] != "q":
            raise UndecodableUpdate(f"dnf verifier cannot apply {token!r}")
        if proof == BOTTOM:
            return VerifierOutput(0, 0)
        try:
            j = decode_index(proof)
        except ParseError:
            return VerifierOutput(0, -1)
        if not 0 <= j < len(self.clauses):
            return VerifierOutput(0, -1)
        if self.clauses[j].satisfied_by(self.assignment, self.meter):
            return VerifierOutput(1, 1)
        return VerifierOutput(0, -1)


# ---------------------------------------------------------------------------
# First-satisfied-clause variant
# ---------------------------------------------------------------------------


@dataclass
class FirstDnfInstance:
    """A DNF instance plus a total clause order.

    `order` lists clause ids from first to last; order[0] is the most
    preferred clause.
    """

    base: DnfInstance
    order: list[int]

    def validate(self):
        self.base.validate()
        if sorted(self.order) != list(range(len(self.base.clauses))):
            raise ParseError("order must be a permutation of clause ids")
        return self


def first_satisfied_bruteforce(finst: FirstDnfInstance) -> int | None:
    """Oracle: first clause id under the order that is currently satisfied."""
    for j in finst.order:
        if finst.base.clauses[j].satisfied_by(finst.base.assignment):
            return j
    return None


@dataclass
class AugmentedFirstDnf:
    """Output of augment_with_search_vars.

    Clauses are relabeled so position == rank under the order; clause at
    rank r carries, for every round i, the positive literal of the search
    variable matching bit i of r (most significant bit first). All search
    variables start at 1, so the augmented formula agrees with the base one
    until a query perturbs them.
    """

    instance: DnfInstance
    base_num_vars: int
    rounds: int
    rank_to_original: list[int]

    def search_var(self, round_i: int, bit: int) -> int:
        # rounds are 1-based like the construction; bit is the expected value
        return self.base_num_vars + 2 * (round_i - 1) + bit


def augment_with_search_vars(finst: FirstDnfInstance) -> AugmentedFirstDnf:
    finst.validate()
    base = finst.base
    m = len(base.clauses)
    rounds = max(0, math.ceil(math.log2(m))) if m > 1 else 0
    n = base.num_vars
    rank_to_original = list(finst.order)
    new_clauses = []
    for rank, j in enumerate(rank_to_original):
        extra = []
        for i in range(1, rounds + 1):
            bit = (rank >> (rounds - i)) & 1
            extra.append((n + 2 * (i - 1) + bit, True))
        new_clauses.append(Clause(base.clauses[j].literals + tuple(extra)))
    width = None if base.width is None else base.width + rounds
    inst = DnfInstance(
        n + 2 * rounds,
        new_clauses,
        list(base.assignment) + [1] * (2 * rounds),
        width,
    )
    return AugmentedFirstDnf(inst.validate(), n, rounds, rank_to_original)


def first_dnf_query(aug: AugmentedFirstDnf, counters: ClauseCounters) -> int | None:
    """Binary-search the first satisfied clause using only variable flips.

    Returns the ORIGINAL clause id (pre-relabeling), or None if nothing is
    satisfied. Requires every search variable to currently be 1; restores
    that state before returning. Flip cost <= 5 * rounds.
    """
    n, rounds = aug.base_num_vars, aug.rounds
    for i in range(1, rounds + 1):
        for b in (0, 1):
            if counters.assignment[aug.search_var(i, b)] != 1:
                raise ParseError("search variables must be all-ones before a query")
    if counters.answer() == 0:
        return None
    rank = 0
    touched: list[int] = []
    for i in range(1, rounds + 1):
        hi = aug.search_var(i, 1)
        lo = aug.search_var(i, 0)
        counters.flip(hi, 0)  # keep only clauses with bit i == 0
        if counters.answer() == 0:
            counters.flip(lo, 0)  # none there; commit to bit 1
            counters.flip(hi, 1)
            touched.append(lo)
            rank = (rank << 1) | 1
        else:
            touched.append(hi)
            rank = rank << 1
    for var in touched:
        counters.flip(var, 1)
    return aug.rank_to_original[rank]


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------
#
# DIMACS-flavored:
#   p dnf <n> <m> <w>
#   one line per clause: signed 1-based literals terminated by 0
#   a <bit> ... <bit>        current assignment (n bits)
#   o <id> ... <id>          optional clause order, 1-based, first = preferred


def parse_dnf(text: str):
    """Returns DnfInstance, or FirstDnfInstance when an order line is present."""
    header = None
    clauses: list[Clause] = []
    assignment = None
    order = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("c "):
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise ParseError(f"line {lineno}: duplicate header")
            if len(parts) != 5 or parts[1] != "dnf":
                raise ParseError(f"line {lineno}: want 'p dnf <n> <m> <w>'")
            header = (int(parts[2]), int(parts[3]), int(parts[4]))
        elif parts[0] == "a":
            bits = [int(tok) for tok in parts[1:]]
            if any(b not in (0, 1) for b in bits):
                raise ParseError(f"line {lineno}: assignment bits must be 0/1")
            assignment = bits
        elif parts[0] == "o":
            order = [int(tok) - 1 for tok in parts[1:]]
        else:
            try:
                lits = [int(tok) for tok in parts]
            except ValueError as exc:
                raise ParseError(f"line {lineno}: bad clause line") from exc
            if not lits or lits[-1] != 0:
                raise ParseError(f"line {lineno}: clause must end with 0")
            if any(l == 0 for l in lits[:-1]):
                raise ParseError(f"line {lineno}: stray 0 inside clause")
            clauses.append(clause(*lits[:-1]))
    if header is None:
        raise ParseError("missing 'p dnf' header")
    n, m, w = header
    if len(clauses) != m:
        raise ParseError(f"header says {m} clauses, file has {len(clauses)}")
    if assignment is None:
        assignment = [0] * n
    inst = DnfInstance(n, clauses, assignment, w).validate()
    if order is not None:
        return FirstDnfInstance(inst, order).validate()
    return inst


def format_dnf(inst) -> str:
    finst = None
    if isinstance(inst, FirstDnfInstance):
        finst, inst = inst, inst.base
    w = inst.width if inst.width is not None else max(
        (c.width for c in inst.clauses), default=0
    )
    out = [f"p dnf {inst.num_vars} {len(inst.clauses)} {w}"]
    for c in inst.clauses:
        lits = [(v + 1) if pos else -(v + 1) for v, pos in c.literals]
        out.append(" ".join(str(l) for l in lits + [0]))
    out.append("a " + " ".join(str(b) for b in inst.assignment))
    if finst is not None:
        out.append("o " + " ".join(str(j + 1) for j in finst.order))
    return "\n".join(out) + "\n"
