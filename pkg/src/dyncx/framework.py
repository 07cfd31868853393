"""Core machinery for dynamic problems.

A dynamic problem is driven by a stream of small updates. Two execution
modes live here:

* plain deterministic algorithms (`run_deterministic`): the algorithm sees
  each update and must answer on its own;
* verifier/prover protocols (`run_protocol`): after each update the prover
  hands the verifier a short proof, the verifier replies with an answer bit
  x and a signed integer reward y. Soundness must hold against every proof
  sequence; completeness only against a reward-maximizing prover.

Proof payloads are plain byte strings. The empty payload is the null proof
(written BOTTOM below). On the wire, payloads travel length-prefixed.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field


class DyncxError(Exception):
    """Base class for package errors."""


class ParseError(DyncxError):
    pass


class UndecodableUpdate(DyncxError):
    """An update token the consumer does not understand."""


class ProofOutOfSpace(DyncxError):
    """The prover emitted something that is not an encodable proof."""


class EmptyProofSpace(DyncxError):
    pass


class BudgetExceeded(DyncxError):
    pass


class OracleDesync(DyncxError):
    """Mirror audit found verifier memory and oracle memory disagreeing."""


BOTTOM = b""

# Proofs longer than this cannot be length-prefixed with 2 bytes; verifiers
# may declare a smaller max_proof_len.
MAX_PROOF_LEN = 0xFFFF


def encode_index(j: int) -> bytes:
    """Fixed-width index encoding; lexicographic order == numeric order."""
    return j.to_bytes(4, "big")


def decode_index(payload: bytes) -> int:
    if len(payload) != 4:
        raise ParseError(f"index payload must be 4 bytes, got {len(payload)}")
    return int.from_bytes(payload, "big")


def encode_edge(u: int, v: int) -> bytes:
    a, b = (u, v) if u <= v else (v, u)
    return a.to_bytes(4, "big") + b.to_bytes(4, "big")


def decode_edge(payload: bytes) -> tuple[int, int]:
    if len(payload) != 8:
        raise ParseError(f"edge payload must be 8 bytes, got {len(payload)}")
    return int.from_bytes(payload[:4], "big"), int.from_bytes(payload[4:], "big")


def encode_edge_set(edges) -> bytes:
    return b"".join(encode_edge(u, v) for u, v in edges)


def decode_edge_set(payload: bytes) -> list[tuple[int, int]]:
    if len(payload) % 8:
        raise ParseError("edge-set payload length must be a multiple of 8")
    return [decode_edge(payload[k : k + 8]) for k in range(0, len(payload), 8)]


def length_prefixed(payload: bytes) -> bytes:
    if len(payload) > MAX_PROOF_LEN:
        raise ProofOutOfSpace(f"proof of {len(payload)} bytes exceeds wire limit")
    return len(payload).to_bytes(2, "big") + payload


def strip_length_prefix(buf: bytes) -> tuple[bytes, bytes]:
    """Return (payload, rest-of-buffer)."""
    if len(buf) < 2:
        raise ParseError("truncated length prefix")
    n = int.from_bytes(buf[:2], "big")
    if len(buf) < 2 + n:
        raise ParseError("truncated proof payload")
    return buf[2 : 2 + n], buf[2 + n :]


# ---------------------------------------------------------------------------
# Update streams
# ---------------------------------------------------------------------------
#
# Tokens are plain tuples; node and variable ids are 0-based in memory and
# 1-based in the text format:
#   ("f", var, bit)      set a formula variable
#   ("e", "+"|"-", u, v) insert/delete an undirected edge
#   ("c", node, "W"|"B") recolor a node
#   ("q",)               bare query marker (no mutation)


@dataclass
class UpdateStream:
    items: list[tuple] = field(default_factory=list)

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, k):
        return self.items[k]

    @classmethod
    def parse(cls, text: str) -> "UpdateStream":
        items = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                items.append(_parse_token(parts))
            except (ValueError, IndexError) as exc:
                raise ParseError(f"line {lineno}: bad update {raw!r}") from exc
        return cls(items)

    def format(self) -> str:
        return "".join(format_token(tok) + "\n" for tok in self.items)


def _parse_token(parts: list[str]) -> tuple:
    kind = parts[0]
    if kind == "f":
        var, bit = int(parts[1]), int(parts[2])
        if var < 1 or bit not in (0, 1):
            raise ValueError("f token wants 1-based var and bit in {0,1}")
        return ("f", var - 1, bit)
    if kind == "e":
        sign = parts[1]
        if sign not in ("+", "-"):
            raise ValueError("edge sign must be + or -")
        u, v = int(parts[2]), int(parts[3])
        if u < 1 or v < 1:
            raise ValueError("edge endpoints are 1-based")
        return ("e", sign, u - 1, v - 1)
    if kind == "c":
        node, color = int(parts[1]), parts[2]
        if node < 1 or color not in ("W", "B"):
            raise ValueError("c token wants 1-based node and color W|B")
        return ("c", node - 1, color)
    if kind == "q":
        return ("q",)
    raise ValueError(f"unknown token kind {kind!r}")


def format_token(tok: tuple) -> str:
    kind = tok[0]
    if kind == "f":
        return f"f {tok[1] + 1} {tok[2]}"
    if kind == "e":
        return f"e {tok[1]} {tok[2] + 1} {tok[3] + 1}"
    if kind == "c":
        return f"c {tok[1] + 1} {tok[2]}"
    if kind == "q":
        return "q"
    raise UndecodableUpdate(f"cannot format token {tok!r}")


# ---------------------------------------------------------------------------
# Verifier outputs and transcripts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifierOutput:
    x: int
    y: int

    def __post_init__(self):
        if self.x not in (0, 1):
            raise ValueError(f"x must be a bit, got {self.x!r}")
        if not isinstance(self.y, int) or isinstance(self.y, bool):
            raise ValueError(f"y must be a signed integer, got {self.y!r}")


@dataclass(frozen=True)
class TranscriptRecord:
    step: int
    update: tuple | None
    proof: bytes | None
    output: VerifierOutput


@dataclass
class ProofTranscript:
    records: list[TranscriptRecord] = field(default_factory=list)

    def append(self, rec: TranscriptRecord):
        self.records.append(rec)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, k):
        return self.records[k]

    def answers(self) -> list[int]:
        return [r.output.x for r in self.records]

    def rewards(self) -> list[int]:
        return [r.output.y for r in self.records]

    def to_json(self) -> str:
        steps = []
        for r in self.records:
            steps.append(
                {
                    "step": r.step,
                    "update": None if r.update is None else format_token(r.update),
                    "proof_hex": None if r.proof is None else r.proof.hex(),
                    "x": r.output.x,
                    "y": r.output.y,
                }
            )
        return json.dumps({"schema": 1, "steps": steps}, sort_keys=True)


# ---------------------------------------------------------------------------
# Probe accounting
# ---------------------------------------------------------------------------


class ProbeMeter:
    """Counts unit memory probes; optionally enforces a per-burst budget."""

    __slots__ = ("count", "budget", "_mark")

    def __init__(self, budget: int | None = None):
        self.count = 0
        self.budget = budget
        self._mark = 0

    def charge(self, k: int = 1):
        self.count += k

    def start_op(self):
        self._mark = self.count

    def end_op(self, what: str = "op"):
        used = self.count - self._mark
        if self.budget is not None and used > self.budget:
            raise BudgetExceeded(f"{what} used {used} probes, budget {self.budget}")
        return used


def polylog_budget(n: int, factor: int = 96, power: int = 1) -> int:
    """Operation budget of shape factor * (log2 n + 1)^power."""
    bits = max(1, math.ceil(math.log2(max(2, n))))
    return factor * (bits + 1) ** power


def env_budget(default: int = 200_000) -> int:
    import os

    raw = os.environ.get("DYNCX_BUDGET")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ParseError(f"DYNCX_BUDGET must be an integer, got {raw!r}") from exc


# ---------------------------------------------------------------------------
# Runners
# ---------------------------------------------------------------------------


def run_deterministic(algorithm_factory, initial_instance, stream) -> list[int]:
    """Run a proof-free dynamic algorithm; one answer per step, step 0 first.

    The algorithm object must expose answer() and apply(token) -> answer.
    """
    algo = algorithm_factory(initial_instance)
    answers = [algo.answer()]
    for tok in stream:
        answers.append(algo.apply(tok))
    return answers


def run_protocol(verifier_factory, prover, initial_instance, stream) -> ProofTranscript:
    """Drive a verifier/prover pair over a stream; deterministic throughout.

    The prover is asked for a proof *after* seeing the pending update but
    before the verifier consumes it, matching the proof-after-update timing.
    """
    verifier = verifier_factory(initial_instance)
    transcript = ProofTranscript()
    transcript.append(TranscriptRecord(0, None, None, verifier.initial_output()))
    limit = getattr(verifier, "max_proof_len", MAX_PROOF_LEN)
    for t, tok in enumerate(stream, 1):
        proof = prover(verifier, tok)
        if not isinstance(proof, (bytes, bytearray)) or len(proof) > limit:
            raise ProofOutOfSpace(f"step {t}: unencodable proof {proof!r}")
        out = verifier.step(tok, bytes(proof))
        transcript.append(TranscriptRecord(t, tok, bytes(proof), out))
    return transcript


# ---------------------------------------------------------------------------
# Provers
# ---------------------------------------------------------------------------


def reward_maximizing_prover(proof_space=None):
    """Exhaustive one-step-lookahead prover.

    Snapshots the verifier, simulates the pending step once per candidate
    proof, and returns the proof with the largest reward. Ties go to the
    earliest candidate in the space's enumeration order; spaces enumerate in
    ascending payload order, so ties break toward the smallest encoding.
    """

    def prover(verifier, token) -> bytes:
        space = list(
            proof_space(verifier, token) if proof_space else verifier.proof_space(token)
        )
        if not space:
            raise EmptyProofSpace("verifier published no candidate proofs")
        best_proof, best_y = None, None
        for candidate in space:
            sim = verifier.copy()
            out = sim.step(token, candidate)
            if best_y is None or out.y > best_y:
                best_proof, best_y = candidate, out.y
        return best_proof

    return prover


def constant_prover(payload: bytes = BOTTOM):
    def prover(verifier, token) -> bytes:
        return payload

    return prover


def random_prover(seed: int = 0, junk_len: int = 8, junk_rate: float = 0.25):
    """Draws a random member of the published space, or random junk bytes.

    Junk stays within the verifier's declared proof length; anything longer
    is outside the proof alphabet and the protocol would refuse to send it.
    """
    rng = random.Random(seed)

    def prover(verifier, token) -> bytes:
        space = list(verifier.proof_space(token))
        if not space or rng.random() < junk_rate:
            cap = min(junk_len, getattr(verifier, "max_proof_len", MAX_PROOF_LEN))
            return rng.randbytes(rng.randrange(cap + 1))
        return rng.choice(space)

    return prover


# ---------------------------------------------------------------------------
# Soundness fuzzing
# ---------------------------------------------------------------------------


@dataclass
class Episode:
    """One fuzz unit: an initial instance, a stream, and ground truth.

    truths[t] is the ground-truth bit after the first t updates, so
    truths[0] labels the initial instance and len(truths) == len(stream)+1.
    """

    instance: object
    stream: UpdateStream
    truths: list[int]


@dataclass(frozen=True)
class SoundnessViolation:
    trial: int
    step: int
    update: tuple | None
    proof: bytes | None


def fuzz_soundness(
    verifier_factory, episode_generator, prover_strategies, trials: int, seed: int = 0
) -> list[SoundnessViolation]:
    """Hunt for steps where ground truth says NO but the verifier said x=1.

    Soundness must hold for EVERY proof sequence, so any strategy mix is a
    legitimate attack. Returns all violations found (empty list = clean run).
    """
    rng = random.Random(seed)
    violations = []
    for trial in range(trials):
        episode = episode_generator(rng)
        prover = prover_strategies[trial % len(prover_strategies)]
        transcript = run_protocol(
            verifier_factory, prover, episode.instance, episode.stream
        )
        if len(episode.truths) != len(transcript):
            raise ValueError("episode truths must cover step 0 and every update")
        for rec, truth in zip(transcript.records, episode.truths):
            if truth == 0 and rec.output.x == 1:
                violations.append(
                    SoundnessViolation(trial, rec.step, rec.update, rec.proof)
                )
    return violations
