"""Built-in invariant battery behind `qssim selftest`.

Quick self-contained checks of the physics engine and the headline attack
metrics; the full evidence lives in the pytest suite.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from .adversaries import AttackKind, NoPassingFakeOp
from .detector import h_binomial_test
from .protocol import ProtocolConfig, run_round
from .quantum import (
    BELL_ORDER,
    BellKind,
    GOutcome,
    LocalOp,
    MeasBasis,
    PureState,
    apply,
    apply_word,
    distribution,
    fidelity_up_to_phase,
    prepare_bell,
    project,
    tensor,
)
from .session import run_session

_TELEPORT_FIX = {
    BellKind.PhiPlus: LocalOp.I,
    BellKind.PhiMinus: LocalOp.Z,
    BellKind.PsiPlus: LocalOp.X,
    BellKind.PsiMinus: LocalOp.Y,
}


def _check_singlet_covariance() -> bool:
    rng = random.Random(1)
    ops = tuple(LocalOp)
    singlet = prepare_bell(BellKind.PsiMinus, "h", "t")
    for _ in range(200):
        word = [ops[rng.randrange(5)] for _ in range(rng.randrange(0, 6))]
        s = apply_word(apply_word(singlet, word, "t"), word, "h")
        if abs(fidelity_up_to_phase(s, singlet) - 1.0) > 1e-9:
            return False
    return True


def _check_dense_coding() -> bool:
    table = {
        LocalOp.I: BellKind.PsiMinus,
        LocalOp.X: BellKind.PhiMinus,
        LocalOp.Y: BellKind.PhiPlus,
        LocalOp.Z: BellKind.PsiPlus,
    }
    for pauli, kind in table.items():
        s = apply(prepare_bell(BellKind.PsiMinus, "h", "t"), pauli, "t")
        if abs(distribution(s, MeasBasis.Bell, ("h", "t"))[kind] - 1.0) > 1e-10:
            return False
    return True


def _check_teleportation() -> bool:
    rng = np.random.default_rng(2)
    for _ in range(2):
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        amps /= np.linalg.norm(amps)
        inp = PureState(("h", "t"), amps)
        full = tensor(
            inp,
            tensor(
                prepare_bell(BellKind.PhiPlus, "1", "3"),
                prepare_bell(BellKind.PhiPlus, "2", "4"),
            ),
        )
        for first in BELL_ORDER:
            for second in BELL_ORDER:
                _, post = project(full, MeasBasis.G, ("h", "t", "1", "2"), GOutcome(first, second))
                post = apply(post, _TELEPORT_FIX[first], "3")
                post = apply(post, _TELEPORT_FIX[second], "4")
                d = distribution(post, MeasBasis.Bell, ("3", "4"))
                want = distribution(inp, MeasBasis.Bell, ("h", "t"))
                if any(abs(d[k] - want[k]) > 1e-9 for k in d):
                    return False
    return True


def _check_norm_drift() -> bool:
    rng = random.Random(3)
    ops = tuple(LocalOp)
    s = tensor(
        prepare_bell(BellKind.PsiMinus, "h", "t"),
        prepare_bell(BellKind.PhiPlus, "a", "b"),
    )
    labels = ("h", "t", "a", "b")
    for _ in range(2000):
        s = apply(s, ops[rng.randrange(5)], labels[rng.randrange(4)])
    return abs(s.norm() - 1.0) <= 1e-10


def _check_honest_session() -> bool:
    rep = run_session(ProtocolConfig(n_agents=3, rounds=400, seed=11))
    return rep.check_pass_rate == 1.0 and rep.decode_accuracy == 1.0 and rep.leakage == 0.0


def _check_lin_session() -> bool:
    rep = run_session(ProtocolConfig(n_agents=2, rounds=400, seed=13), AttackKind.LIN)
    return (
        rep.check_pass_rate == 1.0
        and rep.decode_accuracy == 1.0
        and 0.3 <= rep.leakage <= 0.7
    )


def _check_wang_session() -> bool:
    rep = run_session(ProtocolConfig(n_agents=2, rounds=300, seed=17), AttackKind.WANG)
    return (
        rep.leakage == 1.0
        and rep.check_pass_rate == 1.0
        and rep.announcement_counts["agent2"]["H"] == 0
        and rep.flagged
    )


def _check_search_success() -> bool:
    try:
        cfg = ProtocolConfig(n_agents=2, rounds=1, seed=19, p_control=1.0)
        rng = random.Random(cfg.seed)
        from .adversaries import LinAttack, WangAttack

        lin = LinAttack(cfg, p_legal=0.0)
        for _ in range(400):
            if not run_round(cfg, rng, lin).check.passed:
                return False
        wang = WangAttack(cfg, p_legal=0.0)
        for _ in range(250):
            if not run_round(cfg, rng, wang).check.passed:
                return False
    except NoPassingFakeOp:
        return False
    return True


def _check_binomial_exactness() -> bool:
    for m in (1, 5, 20, 101, 200):
        c, acc, cum = 1, 0, []
        for k in range(m + 1):
            acc += c
            cum.append(acc)
            c = c * (m - k) // (k + 1)
        denom = Fraction(1, 2) ** m
        for h in {0, 1, m // 2, m - 1, m}:
            lower = cum[h] * denom
            upper = (cum[m] - (cum[h - 1] if h else 0)) * denom
            want = float(min(Fraction(1), 2 * min(lower, upper)))
            got = h_binomial_test(h, m).p_value
            if abs(got - want) > 1e-12:
                return False
    return True


CHECKS = [
    ("singlet covariance (200 random words)", _check_singlet_covariance),
    ("dense-coding table", _check_dense_coding),
    ("two-qubit teleportation, all 16 outcomes", _check_teleportation),
    ("norm drift over 2000 ops", _check_norm_drift),
    ("honest session: perfect checks and decode", _check_honest_session),
    ("lin attack: stealth, repair, half leakage", _check_lin_session),
    ("wang attack: full leakage, H starved, flagged", _check_wang_session),
    ("fake-op search always succeeds", _check_search_success),
    ("binomial test matches exact summation", _check_binomial_exactness),
]


def run_selftest(out=print) -> bool:
    ok = True
    for name, fn in CHECKS:
        passed = fn()
        ok &= passed
        out(f"[{'PASS' if passed else 'FAIL'}] {name}")
    return ok
