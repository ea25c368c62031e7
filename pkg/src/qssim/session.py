"""Session driver: rounds in, SessionReport out, deterministic per seed."""

from __future__ import annotations

import random

from .adversaries import AttackKind, make_adversary
from .detector import AnnouncementLedger, SessionReport, summarize
from .protocol import ProtocolConfig, RoundMode, agent_name, run_round


def run_session(
    cfg: ProtocolConfig,
    attack: AttackKind = AttackKind.NONE,
    p_legal: float = 0.5,
    alpha: float = 0.01,
    keep_records: bool = False,
) -> SessionReport:
    """Run cfg.rounds rounds under one attack and aggregate the report.

    All randomness flows from a single stream seeded with cfg.seed, so the
    same inputs reproduce the same report bit for bit.
    """
    cfg.validate()
    rng = random.Random(cfg.seed)
    adversary = make_adversary(attack, cfg, p_legal)
    agents = [agent_name(k) for k in range(1, cfg.n_agents + 1)]
    ledger = AnnouncementLedger.for_agents(agents)
    records = []
    for _ in range(cfg.rounds):
        rec = run_round(cfg, rng, adversary)
        records.append(rec)
        if rec.mode is RoundMode.Control:
            for ann in rec.announcements:
                ledger.record(ann)
    return summarize(
        records, ledger, alpha, cfg, attack.value, keep_records=keep_records
    )
