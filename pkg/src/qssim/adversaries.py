"""Attack implementations: last-agent swap, first+last teleportation collusion.

Both published attacks stay invisible to the run-time check by construction:
after the attacker's Bell (or four-qubit) measurement, some Pauli announced
in place of the honestly-expected op makes the check anticorrelation exact.
The announcement itself is what the detector module feeds on, since a fake
drawn from {I, X, Y, Z} can never be H.

Fake ops are found by exhaustive search against the exact outcome
distribution rather than a closed-form rule; the search raising
NoPassingFakeOp would falsify the algebra the attacks rely on, so tests
assert it never fires.
"""

from __future__ import annotations

import random
from enum import Enum
from typing import Optional

from .quantum import (
    BellKind,
    LocalOp,
    MeasBasis,
    PAULIS,
    apply,
    apply_word,
    distribution,
    measure,
    measure_remove,
    prepare_bell,
    tensor,
)
from .protocol import (
    Adversary,
    BELL_TO_PAULI,
    PAULI_TO_SYMBOL,
    ProtocolConfig,
    RoundCtx,
    sample_agent_op,
)

# Bell outcome on (2,4) -> Pauli Alice applied to 4, for a Phi+ pair.
PHIPLUS_BELL_TO_PAULI = {
    BellKind.PhiPlus: LocalOp.I,
    BellKind.PsiPlus: LocalOp.X,
    BellKind.PsiMinus: LocalOp.Y,
    BellKind.PhiMinus: LocalOp.Z,
}


class AttackKind(Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept_resend"
    LIN = "lin"
    WANG = "wang"
    WANG_LEGAL = "wang_legal"


class NoPassingFakeOp(Exception):
    """Raised when no announced/compensation Pauli passes the check surely."""


class AdversaryMode(Enum):
    Legal = "legal"
    Attack = "attack"


def choose_mode(p_legal: float, rng: random.Random) -> AdversaryMode:
    """Per-round coin: play the round honestly (with H) or attack it."""
    if not 0.0 <= p_legal <= 1.0:
        raise ValueError(f"p_legal must be in [0, 1], got {p_legal}")
    return AdversaryMode.Legal if rng.random() < p_legal else AdversaryMode.Attack


def deterministic_pass(state, word, h: str, t: str) -> bool:
    """True iff the check would pass surely for both published bases.

    With Bob's candidate word applied to h, anticorrelation is certain in Z
    iff the (h, t) pair has all its weight on {Psi+, Psi-}, and in X iff on
    {Phi-, Psi-}; both at once pin the pair to the singlet.
    """
    trial = apply_word(state, word, h)
    d = distribution(trial, MeasBasis.Bell, (h, t))
    p_z = d[BellKind.PsiPlus] + d[BellKind.PsiMinus]
    p_x = d[BellKind.PhiMinus] + d[BellKind.PsiMinus]
    return p_z > 1.0 - 1e-9 and p_x > 1.0 - 1e-9


class LinAttack(Adversary):
    """Last agent alone: swap in a fresh singlet half the time.

    Attack-mode rounds replace photon t with t' from a private singlet
    (h', t').  A control round is survived by an entanglement swap on
    (h', t) plus a searched fake Pauli announcement; a message round leaks
    Alice's Pauli through a Bell measurement on (h', t') after which the
    retained t is doctored so Bob's reconstruction still comes out right.
    """

    def __init__(self, cfg: ProtocolConfig, p_legal: float = 0.5):
        self.cfg = cfg
        self.position = cfg.n_agents
        self.p_legal = p_legal
        self.mode = AdversaryMode.Attack
        self._message_fake: Optional[LocalOp] = None

    def begin_round(self, rng: random.Random) -> None:
        self.mode = choose_mode(self.p_legal, rng)
        self._message_fake = None

    def chain_op(self, ctx: RoundCtx, rng: random.Random) -> Optional[LocalOp]:
        if self.mode is AdversaryMode.Legal:
            ctx.state = apply(ctx.state, LocalOp.H, "t")
            return LocalOp.H
        ctx.state = tensor(ctx.state, prepare_bell(BellKind.PsiMinus, "h'", "t'"))
        ctx.alice_photon = "t'"
        return None

    def control_announcement(
        self, ctx: RoundCtx, upstream: list[LocalOp], rng: random.Random
    ) -> Optional[LocalOp]:
        if self.mode is AdversaryMode.Legal:
            return None
        # swap the entanglement onto (h, t'), then pick the Pauli whose
        # announcement makes Bob's mirrored word pass the check surely
        _, ctx.state = measure_remove(
            ctx.state, MeasBasis.Bell, ("h'", "t"), rng.random()
        )
        for fake in PAULIS:
            if deterministic_pass(ctx.state, list(upstream) + [fake], "h", "t'"):
                return fake
        raise NoPassingFakeOp("no Pauli announcement passes the check surely")

    def on_message_transit(self, ctx: RoundCtx, rng: random.Random) -> Optional[str]:
        if self.mode is AdversaryMode.Legal:
            return None
        outcome, ctx.state = measure_remove(
            ctx.state, MeasBasis.Bell, ("h'", "t'"), rng.random()
        )
        alice_pauli = BELL_TO_PAULI[outcome]  # dense-coding readout of the fake singlet
        # announce something honest-looking to Bob, and doctor the retained
        # t so his reconstruction still decodes Alice's symbol
        self._message_fake = sample_agent_op(self.cfg, rng)
        ctx.state = apply(ctx.state, self._message_fake, "t")
        ctx.state = apply(ctx.state, alice_pauli, "t")
        ctx.alice_photon = "t"
        return PAULI_TO_SYMBOL[alice_pauli]

    def message_announcement(self, rng: random.Random) -> Optional[LocalOp]:
        return self._message_fake


class WangAttack(Adversary):
    """First agent (Bob) and last agent colluding via two-qubit teleportation.

    The last agent swaps photon t for half of a four-photon resource
    (two Phi+ pairs) and routes everything else to Bob.  Control rounds:
    Bob teleports the (h, t) pair onto photons (3, 4) with a four-qubit
    measurement, applies a compensation Pauli on 3, and covertly dictates
    the fake announcement.  Message rounds: the pair (2, 4) reads Alice's
    Pauli off deterministically.  With p_legal = 0 every round is attacked
    (the published attack); p_legal = 0.5 adds the stealth mode.
    """

    def __init__(self, cfg: ProtocolConfig, p_legal: float = 0.0):
        self.cfg = cfg
        self.position = cfg.n_agents
        self.p_legal = p_legal
        self.mode = AdversaryMode.Attack
        self._covert = 0

    def begin_round(self, rng: random.Random) -> None:
        self.mode = choose_mode(self.p_legal, rng)
        self._covert = 0

    def chain_op(self, ctx: RoundCtx, rng: random.Random) -> Optional[LocalOp]:
        if self.mode is AdversaryMode.Legal:
            ctx.state = apply(ctx.state, LocalOp.H, "t")
            return LocalOp.H
        resource = tensor(
            prepare_bell(BellKind.PhiPlus, "1", "3"),
            prepare_bell(BellKind.PhiPlus, "2", "4"),
        )
        ctx.state = tensor(ctx.state, resource)
        ctx.alice_photon = "4"  # t, 1, 2, 3 all sit with Bob now
        return None

    def control_announcement(
        self, ctx: RoundCtx, upstream: list[LocalOp], rng: random.Random
    ) -> Optional[LocalOp]:
        if self.mode is AdversaryMode.Legal:
            return None
        # four-qubit measurement on (h, t, 1, 2): Bell on (h,1), Bell on (t,2);
        # afterwards (3, 4) carry the teleported pair up to byproduct Paulis
        _, ctx.state = measure_remove(ctx.state, MeasBasis.Bell, ("h", "1"), rng.random())
        _, ctx.state = measure_remove(ctx.state, MeasBasis.Bell, ("t", "2"), rng.random())
        for comp in PAULIS:
            for fake in PAULIS:
                trial = apply(ctx.state, comp, "3")
                if deterministic_pass(trial, list(upstream) + [fake], "3", "4"):
                    ctx.state = apply(ctx.state, comp, "3")
                    ctx.bob_anchor = "3"
                    self._covert = 1  # Bob tells the last agent which Pauli to announce
                    return fake
        raise NoPassingFakeOp("no (compensation, announcement) pair passes surely")

    def on_message_transit(self, ctx: RoundCtx, rng: random.Random) -> Optional[str]:
        if self.mode is AdversaryMode.Legal:
            return None
        _, ctx.state = measure_remove(ctx.state, MeasBasis.Bell, ("1", "3"), rng.random())
        outcome, ctx.state = measure_remove(
            ctx.state, MeasBasis.Bell, ("2", "4"), rng.random()
        )
        return PAULI_TO_SYMBOL[PHIPLUS_BELL_TO_PAULI[outcome]]

    def message_announcement(self, rng: random.Random) -> Optional[LocalOp]:
        if self.mode is AdversaryMode.Legal:
            return None
        # ignored by the colluding reconstructor; keep the transcript plausible
        return sample_agent_op(self.cfg, rng)

    def bob_is_colluder(self) -> bool:
        return self.mode is AdversaryMode.Attack

    def covert_messages(self) -> int:
        return self._covert


class InterceptResendAttack(Adversary):
    """Wiretap baseline: Z-measure the traveling photon and forward it."""

    position = None

    def after_chain(self, ctx: RoundCtx, rng: random.Random) -> None:
        _, ctx.state = measure(
            ctx.state, MeasBasis.Z, (ctx.alice_photon,), rng.random()
        )


def make_adversary(
    kind: AttackKind, cfg: ProtocolConfig, p_legal: float = 0.5
) -> Optional[Adversary]:
    if kind is AttackKind.NONE:
        return None
    if kind is AttackKind.INTERCEPT_RESEND:
        return InterceptResendAttack()
    if kind is AttackKind.LIN:
        return LinAttack(cfg, p_legal=p_legal)
    if kind is AttackKind.WANG:
        return WangAttack(cfg, p_legal=0.0)
    if kind is AttackKind.WANG_LEGAL:
        return WangAttack(cfg, p_legal=p_legal)
    raise ValueError(f"unknown attack kind {kind!r}")
