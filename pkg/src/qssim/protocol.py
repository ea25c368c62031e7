"""Honest secret-sharing state machine over singlet pairs.

One round: Bob prepares the singlet (h, t) and keeps h; photon t transits
the agent chain (each agent applies a random op, H half the time) and ends
at Alice.  Alice then either runs a control round (agents publish their
operations, Bob mirrors the published word onto h, both ends measure a
shared random basis and expect anticorrelation) or a message round (Alice
encodes two bits as a Pauli on the traveling photon and returns it to Bob,
who mirrors the published word onto h and reads the Pauli back with a Bell
measurement).

Adversaries plug into four fixed points of the round: the attacked chain
slot, the chain-to-Alice link, announcement time, and the Alice-to-Bob
return link.  The honest path never touches adversary code.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

from .quantum import (
    BellKind,
    LocalOp,
    MeasBasis,
    PureState,
    apply,
    apply_word,
    measure,
    prepare_bell,
)

ALICE = "alice"
BOB = "bob"


def agent_name(k: int) -> str:
    return f"agent{k}"


SYMBOLS = ("00", "01", "10", "11")
SYMBOL_TO_PAULI = {"00": LocalOp.I, "01": LocalOp.X, "10": LocalOp.Y, "11": LocalOp.Z}
PAULI_TO_SYMBOL = {op: s for s, op in SYMBOL_TO_PAULI.items()}

# Bell outcome of (h, returned) -> Pauli Alice applied, for a singlet pair.
BELL_TO_PAULI = {
    BellKind.PsiMinus: LocalOp.I,
    BellKind.PhiMinus: LocalOp.X,
    BellKind.PhiPlus: LocalOp.Y,
    BellKind.PsiPlus: LocalOp.Z,
}


class RoundMode(Enum):
    Message = "message"
    Control = "control"


@dataclass(frozen=True)
class ProtocolConfig:
    """Session parameters; probabilities are agreed by all participants."""

    n_agents: int
    rounds: int
    seed: int
    p_control: float = 0.5
    p_hadamard: float = 0.5
    pauli_weights: tuple[float, float, float, float] = (0.125, 0.125, 0.125, 0.125)

    def validate(self) -> None:
        if self.n_agents < 1:
            raise ValueError(f"n_agents must be >= 1, got {self.n_agents}")
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")
        for name in ("p_control", "p_hadamard"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        if len(self.pauli_weights) != 4 or any(w < 0 for w in self.pauli_weights):
            raise ValueError(f"pauli_weights must be four non-negatives, got {self.pauli_weights}")
        total = self.p_hadamard + sum(self.pauli_weights)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(
                f"p_hadamard + sum(pauli_weights) must equal 1, got {total}"
            )


@dataclass
class Announcement:
    party: str
    op: LocalOp
    mode: RoundMode


@dataclass
class CheckResult:
    basis: str  # "Z" or "X"
    alice_bit: int
    bob_bit: int
    passed: bool


@dataclass
class RoundRecord:
    """Full public-plus-referee transcript of one round."""

    mode: RoundMode
    agent_ops: dict[str, Optional[LocalOp]]  # op actually applied; None if slot hijacked
    announcements: list[Announcement] = field(default_factory=list)
    alice_symbol: Optional[str] = None
    check: Optional[CheckResult] = None
    decoded: Optional[str] = None
    adversary_claim: Optional[str] = None  # None = no certain claim this round
    covert_messages: int = 0


@dataclass
class RoundCtx:
    """Where the photons are right now, from the simulator's viewpoint.

    ``alice_photon`` is whatever Alice ends up holding (t honestly, a fake
    or ancilla photon under attack); ``bob_anchor`` is the qubit Bob uses
    for the check / reconstruction (h honestly).
    """

    state: PureState
    alice_photon: str = "t"
    bob_anchor: str = "h"


def sample_agent_op(cfg: ProtocolConfig, rng: random.Random) -> LocalOp:
    """One draw from the agreed op distribution: H, then I, X, Y, Z."""
    u = rng.random()
    acc = cfg.p_hadamard
    if u < acc:
        return LocalOp.H
    for op, w in zip((LocalOp.I, LocalOp.X, LocalOp.Y, LocalOp.Z), cfg.pauli_weights):
        acc += w
        if u < acc:
            return op
    return LocalOp.Z


def run_chain(state: PureState, ops: Sequence[LocalOp], photon: str = "t") -> PureState:
    """Apply the agents' ops to the traveling photon in chain order."""
    for op in ops:
        state = apply(state, op, photon)
    return state


def encode(state: PureState, symbol: str, photon: str) -> PureState:
    """Alice writes a two-bit symbol as a Pauli on the photon she holds."""
    return apply(state, SYMBOL_TO_PAULI[symbol], photon)


def control_check(
    state: PureState,
    announced: Sequence[LocalOp],
    rng: random.Random,
    h: str = "h",
    t: str = "t",
) -> CheckResult:
    """Run the eavesdropping check on (Bob's qubit h, Alice's photon t).

    Bob applies the announced word to h, Alice publishes a uniformly chosen
    basis, both measure it; a pass is anticorrelated bits.  Alice draws and
    measures first.
    """
    state = apply_word(state, announced, h)
    basis = MeasBasis.Z if rng.random() < 0.5 else MeasBasis.X
    alice_bit, state = measure(state, basis, (t,), rng.random())
    bob_bit, state = measure(state, basis, (h,), rng.random())
    return CheckResult(basis.value, alice_bit, bob_bit, alice_bit != bob_bit)


def reconstruct(
    state: PureState,
    announced: Sequence[LocalOp],
    rng: random.Random,
    h: str = "h",
    returned: str = "t",
) -> str:
    """Bob's decode: mirror the announced word onto h, Bell-measure, map."""
    state = apply_word(state, announced, h)
    outcome, _ = measure(state, MeasBasis.Bell, (h, returned), rng.random())
    return PAULI_TO_SYMBOL[BELL_TO_PAULI[outcome]]


def uniform_symbol(rng: random.Random) -> str:
    return SYMBOLS[int(rng.random() * 4) & 3]


class Adversary:
    """No-op hooks; attack classes override the stages they corrupt.

    ``position`` is the chain slot the attacker occupies (1-based), or None
    for a pure wiretap.  Hooks receive the live RoundCtx and may rewrite
    the register and relabel who holds what.
    """

    position: Optional[int] = None

    def begin_round(self, rng: random.Random) -> None:
        pass

    def chain_op(self, ctx: RoundCtx, rng: random.Random) -> Optional[LocalOp]:
        """Act at the attacked slot; return the op actually applied to t, if any."""
        return None

    def after_chain(self, ctx: RoundCtx, rng: random.Random) -> None:
        """Touch the chain-to-Alice link (wiretap attacks)."""

    def control_announcement(
        self, ctx: RoundCtx, upstream: list[LocalOp], rng: random.Random
    ) -> Optional[LocalOp]:
        """Announced op for the attacked slot in a control round (None = truthful)."""
        return None

    def message_announcement(self, rng: random.Random) -> Optional[LocalOp]:
        """Announced op for the attacked slot in a message round (None = truthful)."""
        return None

    def on_message_transit(self, ctx: RoundCtx, rng: random.Random) -> Optional[str]:
        """Act on the Alice-to-Bob return link; return a certain symbol claim or None."""
        return None

    def bob_is_colluder(self) -> bool:
        """If true, Bob's decode this round is the colluders' claim."""
        return False

    def covert_messages(self) -> int:
        """Covert classical messages the colluders exchanged this round."""
        return 0


def run_round(
    cfg: ProtocolConfig,
    rng: random.Random,
    adversary: Optional[Adversary] = None,
    secret_source: Callable[[random.Random], str] = uniform_symbol,
) -> RoundRecord:
    """Execute one full round and return its transcript."""
    mode = RoundMode.Control if rng.random() < cfg.p_control else RoundMode.Message
    ctx = RoundCtx(state=prepare_bell(BellKind.PsiMinus, "h", "t"))
    if adversary is not None:
        adversary.begin_round(rng)

    agent_ops: dict[str, Optional[LocalOp]] = {}
    for k in range(1, cfg.n_agents + 1):
        name = agent_name(k)
        if adversary is not None and adversary.position == k:
            agent_ops[name] = adversary.chain_op(ctx, rng)
        else:
            op = sample_agent_op(cfg, rng)
            ctx.state = apply(ctx.state, op, "t")
            agent_ops[name] = op
    if adversary is not None:
        adversary.after_chain(ctx, rng)

    record = RoundRecord(mode=mode, agent_ops=agent_ops)

    if mode is RoundMode.Control:
        upstream: list[LocalOp] = []
        for k in range(1, cfg.n_agents + 1):
            name = agent_name(k)
            op = None
            if adversary is not None and adversary.position == k:
                op = adversary.control_announcement(ctx, upstream, rng)
            if op is None:
                op = agent_ops[name]
            record.announcements.append(Announcement(name, op, mode))
            upstream.append(op)
        record.check = control_check(
            ctx.state, upstream, rng, h=ctx.bob_anchor, t=ctx.alice_photon
        )
    else:
        record.alice_symbol = secret_source(rng)
        ctx.state = encode(ctx.state, record.alice_symbol, ctx.alice_photon)
        if adversary is not None:
            record.adversary_claim = adversary.on_message_transit(ctx, rng)
        word: list[LocalOp] = []
        for k in range(1, cfg.n_agents + 1):
            name = agent_name(k)
            op = None
            if adversary is not None and adversary.position == k:
                op = adversary.message_announcement(rng)
            if op is None:
                op = agent_ops[name]
            record.announcements.append(Announcement(name, op, mode))
            word.append(op)
        if adversary is not None and adversary.bob_is_colluder():
            record.decoded = record.adversary_claim
        else:
            record.decoded = reconstruct(
                ctx.state, word, rng, h=ctx.bob_anchor, returned=ctx.alice_photon
            )

    if adversary is not None:
        record.covert_messages = adversary.covert_messages()
    return record
