"""Statistics layer: ledger bookkeeping, exact binomial test, chi-square."""

import random

import numpy as np
import pytest
from scipy import stats

from qssim.adversaries import AttackKind
from qssim.detector import (
    AnnouncementLedger,
    CHISQUARE_MIN_ROUNDS,
    OP_ORDER,
    category_chisquare,
    h_binomial_test,
)
from qssim.protocol import Announcement, LocalOp, ProtocolConfig, RoundMode
from qssim.session import run_session

from oracles import binomial_two_sided_oracle


def control_ann(agent, op):
    return Announcement(agent, op, RoundMode.Control)


class TestLedger:
    def test_record_increments(self):
        led = AnnouncementLedger.for_agents(["agent1"])
        led.record(control_ann("agent1", LocalOp.H))
        led.record(control_ann("agent1", LocalOp.H))
        assert led.h_count("agent1") == 2
        assert led.m("agent1") == 2

    def test_counts_sum_to_rounds(self):
        led = AnnouncementLedger.for_agents(["agent1", "agent2"])
        rng = random.Random(83)
        ops = list(OP_ORDER)
        for _ in range(500):
            for agent in ("agent1", "agent2"):
                led.record(control_ann(agent, rng.choice(ops)))
        assert led.m("agent1") == led.m("agent2") == 500

    def test_message_announcements_rejected(self):
        led = AnnouncementLedger.for_agents(["agent1"])
        with pytest.raises(ValueError, match="control"):
            led.record(Announcement("agent1", LocalOp.H, RoundMode.Message))

    def test_honest_session_frequencies(self):
        """Counts track the agreed rates (1/8 per Pauli, 1/2 for H) within 3 sigma."""
        cfg = ProtocolConfig(n_agents=2, rounds=20_000, seed=89, p_control=1.0)
        rep = run_session(cfg, AttackKind.NONE)
        m = rep.control_rounds
        for agent in ("agent1", "agent2"):
            counts = rep.announcement_counts[agent]
            for op, f in zip(OP_ORDER, (0.125, 0.125, 0.125, 0.125, 0.5)):
                sigma = (f * (1 - f) / m) ** 0.5
                assert abs(counts[op.value] / m - f) <= 3 * sigma


class TestHBinomialTest:
    def test_zero_h_in_twenty(self):
        res = h_binomial_test(0, 20, alpha=0.01)
        assert res.p_value == pytest.approx(2 * 0.5**20, rel=1e-12)
        assert res.p_value == pytest.approx(1.9073486328125e-06, rel=1e-12)
        assert res.flagged

    def test_central_value_not_flagged(self):
        res = h_binomial_test(10, 20, alpha=0.01)
        assert res.p_value == 1.0
        assert not res.flagged

    def test_zero_h_in_five_too_small_to_flag(self):
        res = h_binomial_test(0, 5, alpha=0.01)
        assert res.p_value == pytest.approx(0.0625, abs=1e-12)
        assert not res.flagged

    def test_no_data_is_inconclusive(self):
        res = h_binomial_test(0, 0)
        assert res.p_value is None
        assert not res.flagged

    @pytest.mark.parametrize("m", [1, 2, 3, 7, 20, 33, 100, 999, 4096, 10_000])
    def test_matches_direct_summation_oracle(self, m):
        """Exact to 1e-12 against integer-arithmetic tail sums."""
        hs = sorted({0, 1, m // 4, m // 2 - 1, m // 2, m // 2 + 1, (3 * m) // 4, m - 1, m})
        for h in hs:
            if 0 <= h <= m:
                got = h_binomial_test(h, m).p_value
                assert got == pytest.approx(binomial_two_sided_oracle(h, m), abs=1e-12)

    def test_monotone_away_from_center(self):
        m = 64
        ps = [h_binomial_test(h, m).p_value for h in range(m // 2, m + 1)]
        for a, b in zip(ps, ps[1:]):
            assert b <= a + 1e-15

    def test_flagging_monotone_in_alpha(self):
        # p(13, 40) falls between the two thresholds
        p = h_binomial_test(13, 40).p_value
        assert 0.001 < p < 0.05
        assert not h_binomial_test(13, 40, alpha=0.001).flagged
        assert h_binomial_test(13, 40, alpha=0.05).flagged

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            h_binomial_test(5, 3)
        with pytest.raises(ValueError):
            h_binomial_test(1, 10, alpha=0.0)


class TestCategoryChiSquare:
    def test_exact_expectation_gives_zero(self):
        counts = {LocalOp.I: 25, LocalOp.X: 25, LocalOp.Y: 25, LocalOp.Z: 25, LocalOp.H: 100}
        res = category_chisquare(counts)
        assert res.statistic == pytest.approx(0.0, abs=1e-12)
        assert res.p_value == pytest.approx(1.0, abs=1e-12)

    def test_wang_profile_is_glaring(self):
        """H starved at m=200: the H cell alone contributes 100 to the statistic."""
        counts = {LocalOp.I: 50, LocalOp.X: 50, LocalOp.Y: 50, LocalOp.Z: 50, LocalOp.H: 0}
        res = category_chisquare(counts)
        assert res.statistic >= 50.0
        assert res.p_value < 1e-9

    def test_wang_session_statistic(self):
        cfg = ProtocolConfig(n_agents=1, rounds=400, seed=97, p_control=0.5)
        rep = run_session(cfg, AttackKind.WANG)
        res = rep.chisquare_tests["agent1"]
        assert res.valid
        assert res.statistic >= 50.0
        assert res.p_value < 1e-9

    def test_small_samples_inconclusive(self):
        counts = {op: 5 for op in OP_ORDER}
        res = category_chisquare(counts)
        assert not res.valid
        assert res.statistic is None and res.p_value is None
        assert sum(counts.values()) < CHISQUARE_MIN_ROUNDS

    def test_null_calibration_pvalues_uniform(self):
        """1000 multinomial null replicates: p-value ECDF close to uniform.

        Honest control-round announcements are iid draws from the agreed
        distribution, so multinomial sampling reproduces the ledger of an
        honest session exactly.
        """
        rng = np.random.default_rng(101)
        freqs = (0.125, 0.125, 0.125, 0.125, 0.5)
        pvals = []
        for _ in range(1000):
            draw = rng.multinomial(500, freqs)
            counts = dict(zip(OP_ORDER, (int(c) for c in draw)))
            pvals.append(category_chisquare(counts).p_value)
        ks = stats.kstest(pvals, "uniform").statistic
        assert ks <= 0.05


class TestSummarize:
    def test_wang_session_report(self):
        cfg = ProtocolConfig(n_agents=2, rounds=600, seed=103)
        rep = run_session(cfg, AttackKind.WANG, alpha=0.01)
        assert rep.leakage == 1.0
        assert rep.check_pass_rate == 1.0
        assert rep.announcement_counts["agent2"]["H"] == 0
        assert rep.flagged and rep.flagged_agents == ["agent2"]

    def test_wang_legal_session_not_flagged(self):
        cfg = ProtocolConfig(n_agents=2, rounds=2000, seed=107)
        rep = run_session(cfg, AttackKind.WANG_LEGAL, alpha=0.01)
        assert rep.leakage == pytest.approx(0.5, abs=0.05)
        assert not rep.flagged

    def test_honest_flag_rate_small(self):
        flags = 0
        for i in range(60):
            cfg = ProtocolConfig(n_agents=2, rounds=40, seed=2000 + i)
            flags += run_session(cfg, AttackKind.NONE, alpha=0.01).flagged
        assert flags / 60 <= 0.02

    def test_all_control_rounds_lack_leakage_metric(self):
        cfg = ProtocolConfig(n_agents=1, rounds=50, seed=109, p_control=1.0)
        rep = run_session(cfg, AttackKind.NONE)
        assert rep.leakage is None and rep.decode_accuracy is None
        assert rep.check_pass_rate == 1.0

    def test_all_message_rounds_lack_check_metric(self):
        cfg = ProtocolConfig(n_agents=1, rounds=50, seed=113, p_control=0.0)
        rep = run_session(cfg, AttackKind.NONE)
        assert rep.check_pass_rate is None
        assert rep.decode_accuracy == 1.0
        # no control announcements recorded: tests inconclusive, never flagged
        assert rep.frequency_tests["agent1"].p_value is None
        assert not rep.flagged
