"""Announcement statistics: the quantitative side of catching the collusion.

The published collusion attack can never announce H in a control round, so
the H share of each agent's published operations is the tell.  Per agent we
run an exact two-sided binomial test of the H count against the agreed 50%
rate, plus a five-category Pearson goodness-of-fit test as a broader
consistency check.  Only control-round announcements are examined; those
are the ones the dealer actually sees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from scipy import stats

from .protocol import Announcement, LocalOp, ProtocolConfig, RoundMode, RoundRecord

OP_ORDER = (LocalOp.I, LocalOp.X, LocalOp.Y, LocalOp.Z, LocalOp.H)

CHISQUARE_MIN_ROUNDS = 50  # rule-of-thumb validity floor for the Pearson test


@dataclass
class AnnouncementLedger:
    """Per-agent counts of announced ops, restricted to control rounds."""

    counts: dict[str, dict[LocalOp, int]]

    @classmethod
    def for_agents(cls, agents) -> "AnnouncementLedger":
        return cls({a: {op: 0 for op in OP_ORDER} for a in agents})

    def record(self, announcement: Announcement) -> None:
        if announcement.mode is not RoundMode.Control:
            raise ValueError("only control-round announcements are recorded")
        self.counts[announcement.party][announcement.op] += 1

    def m(self, agent: str) -> int:
        return sum(self.counts[agent].values())

    def h_count(self, agent: str) -> int:
        return self.counts[agent][LocalOp.H]


@dataclass
class FrequencyTestResult:
    agent: str
    h_count: int
    m: int
    p_value: Optional[float]  # None when m = 0 (inconclusive)
    flagged: bool


@dataclass
class ChiSquareResult:
    agent: str
    statistic: Optional[float]
    p_value: Optional[float]
    valid: bool  # False below the validity floor; then both fields are None


def h_binomial_test(
    h_count: int, m: int, alpha: float = 0.01, agent: str = ""
) -> FrequencyTestResult:
    """Exact two-sided test of H ~ Binomial(m, 1/2).

    p = 2 * min(P[K <= h], P[K >= h]), capped at 1.  With m = 0 the result
    is inconclusive and never flagged.
    """
    if m < 0 or not 0 <= h_count <= max(m, 0):
        raise ValueError(f"invalid counts h={h_count}, m={m}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if m == 0:
        return FrequencyTestResult(agent, h_count, m, None, False)
    lower = float(stats.binom.cdf(h_count, m, 0.5))
    upper = float(stats.binom.sf(h_count - 1, m, 0.5))
    p = min(1.0, 2.0 * min(lower, upper))
    return FrequencyTestResult(agent, h_count, m, p, p < alpha)


def category_chisquare(
    counts: dict[LocalOp, int],
    expected_freqs: tuple[float, ...] = (0.125, 0.125, 0.125, 0.125, 0.5),
    agent: str = "",
) -> ChiSquareResult:
    """Pearson statistic of announced-op counts against the agreed rates.

    Categories follow OP_ORDER (I, X, Y, Z, H); 4 degrees of freedom.
    Below the validity floor the result is marked inconclusive.
    """
    m = sum(counts.values())
    if m < CHISQUARE_MIN_ROUNDS:
        return ChiSquareResult(agent, None, None, False)
    stat = 0.0
    for op, f in zip(OP_ORDER, expected_freqs):
        exp = m * f
        if exp == 0.0:
            if counts[op]:
                return ChiSquareResult(agent, float("inf"), 0.0, True)
            continue
        stat += (counts[op] - exp) ** 2 / exp
    p = float(stats.chi2.sf(stat, df=4))
    return ChiSquareResult(agent, stat, p, True)


@dataclass
class SessionReport:
    """Aggregated metrics of one protocol session."""

    attack: str
    rounds: int
    seed: int
    n_agents: int
    alpha: float
    control_rounds: int
    message_rounds: int
    check_pass_rate: Optional[float]
    leakage: Optional[float]
    decode_accuracy: Optional[float]
    covert_messages: int
    announcement_counts: dict[str, dict[str, int]]
    agent_h_freq: dict[str, Optional[float]]
    frequency_tests: dict[str, FrequencyTestResult]
    chisquare_tests: dict[str, ChiSquareResult]
    flagged_agents: list[str]
    flagged: bool
    records: Optional[list[RoundRecord]] = field(default=None, repr=False)


def summarize(
    records: list[RoundRecord],
    ledger: AnnouncementLedger,
    alpha: float,
    cfg: ProtocolConfig,
    attack: str,
    keep_records: bool = False,
) -> SessionReport:
    """Fold a finished session into metrics, tests and detection flags.

    Leakage counts message rounds whose secret the adversary claimed with
    certainty and correctly; the detection flag is the union of per-agent
    binomial flags (the chi-square results are attached but advisory).
    """
    control = [r for r in records if r.mode is RoundMode.Control]
    message = [r for r in records if r.mode is RoundMode.Message]

    check_pass_rate = None
    if control:
        check_pass_rate = sum(1 for r in control if r.check.passed) / len(control)
    leakage = None
    decode_accuracy = None
    if message:
        leakage = sum(
            1 for r in message if r.adversary_claim is not None
            and r.adversary_claim == r.alice_symbol
        ) / len(message)
        decode_accuracy = sum(
            1 for r in message if r.decoded == r.alice_symbol
        ) / len(message)

    expected = (*cfg.pauli_weights, cfg.p_hadamard)
    freq_tests = {}
    chisq_tests = {}
    h_freqs: dict[str, Optional[float]] = {}
    for agent in ledger.counts:
        m = ledger.m(agent)
        h = ledger.h_count(agent)
        freq_tests[agent] = h_binomial_test(h, m, alpha, agent=agent)
        chisq_tests[agent] = category_chisquare(
            ledger.counts[agent], expected, agent=agent
        )
        h_freqs[agent] = (h / m) if m else None
    flagged_agents = [a for a, t in freq_tests.items() if t.flagged]

    return SessionReport(
        attack=attack,
        rounds=len(records),
        seed=cfg.seed,
        n_agents=cfg.n_agents,
        alpha=alpha,
        control_rounds=len(control),
        message_rounds=len(message),
        check_pass_rate=check_pass_rate,
        leakage=leakage,
        decode_accuracy=decode_accuracy,
        covert_messages=sum(r.covert_messages for r in records),
        announcement_counts={
            a: {op.value: c for op, c in ops.items()} for a, ops in ledger.counts.items()
        },
        agent_h_freq=h_freqs,
        frequency_tests=freq_tests,
        chisquare_tests=chisq_tests,
        flagged_agents=flagged_agents,
        flagged=bool(flagged_agents),
        records=list(records) if keep_records else None,
    )
