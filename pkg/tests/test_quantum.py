"""Engine tests against explicit-matrix oracles."""

import math
import random

import numpy as np
import pytest

from qssim.quantum import (
    BELL_ORDER,
    BellKind,
    GOutcome,
    LocalOp,
    MeasBasis,
    PAULIS,
    PureState,
    apply,
    apply_word,
    discard,
    distribution,
    fidelity_up_to_phase,
    measure,
    measure_remove,
    prepare_bell,
    project,
    tensor,
    word_matrix,
)

from oracles import BELL_VECS, OP_MATS, SINGLET, apply_oracle, bell_probs, word_mat

ALL_OPS = tuple(LocalOp)


def random_state(labels, rng):
    n = len(labels)
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    amps /= np.linalg.norm(amps)
    return PureState(tuple(labels), amps)


def random_word(rng, max_len=6):
    return tuple(rng.choice(ALL_OPS) for _ in range(rng.randrange(0, max_len + 1)))


class TestPrepareBell:
    def test_singlet_amplitudes(self):
        """The fake-photon singlet: (|01> - |10>)/sqrt(2)."""
        s = prepare_bell(BellKind.PsiMinus, "h", "t")
        np.testing.assert_allclose(s.amps, [0, 0.7071067811865476, -0.7071067811865476, 0], atol=1e-12)

    def test_phi_plus_amplitudes(self):
        s = prepare_bell(BellKind.PhiPlus, "1", "3")
        np.testing.assert_allclose(s.amps, [0.7071067811865476, 0, 0, 0.7071067811865476], atol=1e-12)

    def test_bell_states_orthonormal(self):
        for a in BELL_ORDER:
            for b in BELL_ORDER:
                f = fidelity_up_to_phase(
                    prepare_bell(a, "a", "b"), prepare_bell(b, "a", "b")
                )
                assert f == pytest.approx(1.0 if a is b else 0.0, abs=1e-12)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            prepare_bell(BellKind.PhiPlus, "q", "q")


class TestTensor:
    def test_norm_preserved(self):
        s = tensor(
            prepare_bell(BellKind.PsiMinus, "h", "t"),
            prepare_bell(BellKind.PsiMinus, "h'", "t'"),
        )
        assert s.norm() == pytest.approx(1.0, abs=1e-12)
        assert s.labels == ("h", "t", "h'", "t'")

    def test_teleport_resource_amplitudes(self):
        """Two Phi+ pairs (1,3), (2,4) against a hand-built amplitude oracle."""
        got = tensor(
            prepare_bell(BellKind.PhiPlus, "1", "3"),
            prepare_bell(BellKind.PhiPlus, "2", "4"),
        )
        phi = BELL_VECS["PhiPlus"].reshape(2, 2)
        amps = np.zeros((2, 2, 2, 2), dtype=complex)  # axes (1, 2, 3, 4)
        for i1 in range(2):
            for i2 in range(2):
                for i3 in range(2):
                    for i4 in range(2):
                        amps[i1, i2, i3, i4] = phi[i1, i3] * phi[i2, i4]
        oracle = PureState(("1", "2", "3", "4"), amps.ravel())
        assert fidelity_up_to_phase(got, oracle) == pytest.approx(1.0, abs=1e-12)

    def test_matches_kron(self):
        rng = np.random.default_rng(3)
        s1 = random_state(["a", "b"], rng)
        s2 = random_state(["c"], rng)
        np.testing.assert_allclose(tensor(s1, s2).amps, np.kron(s1.amps, s2.amps), atol=1e-12)

    def test_label_collision_rejected(self):
        s = prepare_bell(BellKind.PhiPlus, "a", "b")
        with pytest.raises(ValueError, match="collision"):
            tensor(s, prepare_bell(BellKind.PhiPlus, "b", "c"))


class TestApply:
    @pytest.mark.parametrize("op", ALL_OPS, ids=[o.value for o in ALL_OPS])
    def test_matches_matrix_oracle(self, op):
        """Each op on each axis of a random 3-qubit state, vs explicit kron."""
        rng = np.random.default_rng(11)
        for axis, label in enumerate(("a", "b", "c")):
            s = random_state(["a", "b", "c"], rng)
            got = apply(s, op, label)
            want = apply_oracle(s.amps, OP_MATS[op.value], axis)
            np.testing.assert_allclose(got.amps, want, atol=1e-12)

    def test_x_on_t_gives_phi_minus(self):
        s = apply(prepare_bell(BellKind.PsiMinus, "h", "t"), LocalOp.X, "t")
        d = distribution(s, MeasBasis.Bell, ("h", "t"))
        assert d[BellKind.PhiMinus] == pytest.approx(1.0, abs=1e-12)

    def test_h_on_t_splits_evenly(self):
        s = apply(prepare_bell(BellKind.PsiMinus, "h", "t"), LocalOp.H, "t")
        d = distribution(s, MeasBasis.Bell, ("h", "t"))
        assert d[BellKind.PsiPlus] == pytest.approx(0.5, abs=1e-12)
        assert d[BellKind.PhiMinus] == pytest.approx(0.5, abs=1e-12)

    def test_identity_is_noop(self):
        rng = np.random.default_rng(5)
        s = random_state(["a", "b"], rng)
        np.testing.assert_allclose(apply(s, LocalOp.I, "b").amps, s.amps, atol=1e-12)

    def test_unknown_label_rejected(self):
        s = prepare_bell(BellKind.PhiPlus, "a", "b")
        with pytest.raises(ValueError, match="not in register"):
            apply(s, LocalOp.X, "zz")


class TestApplyWord:
    def test_double_h_is_identity_up_to_phase(self):
        rng = np.random.default_rng(7)
        s = random_state(["a", "b"], rng)
        got = apply_word(s, (LocalOp.H, LocalOp.H), "a")
        assert fidelity_up_to_phase(got, s) == pytest.approx(1.0, abs=1e-12)

    def test_word_equals_sequential_applies(self):
        s = prepare_bell(BellKind.PsiMinus, "h", "t")
        via_word = apply_word(s, (LocalOp.X, LocalOp.Z), "t")
        via_seq = apply(apply(s, LocalOp.X, "t"), LocalOp.Z, "t")
        np.testing.assert_allclose(via_word.amps, via_seq.amps, atol=1e-12)

    def test_empty_word_is_identity(self):
        s = prepare_bell(BellKind.PhiMinus, "a", "b")
        np.testing.assert_allclose(apply_word(s, (), "a").amps, s.amps, atol=1e-12)

    def test_word_matrix_matches_oracle(self):
        rng = random.Random(13)
        for _ in range(50):
            w = random_word(rng)
            np.testing.assert_allclose(word_matrix(w), word_mat([o.value for o in w]), atol=1e-12)

    def test_singlet_covariance_oracle(self):
        """(U x U) on the singlet is the singlet up to phase, for random words."""
        rng = random.Random(17)
        for _ in range(200):
            w = [o.value for o in random_word(rng)]
            u = word_mat(w)
            v = np.kron(u, u) @ SINGLET
            assert abs(np.vdot(SINGLET, v)) == pytest.approx(1.0, abs=1e-9)

    def test_singlet_covariance_package_path(self):
        rng = random.Random(19)
        singlet = prepare_bell(BellKind.PsiMinus, "h", "t")
        for _ in range(100):
            w = random_word(rng)
            s = apply_word(apply_word(singlet, w, "t"), w, "h")
            assert fidelity_up_to_phase(s, singlet) == pytest.approx(1.0, abs=1e-9)


class TestDistribution:
    def test_singlet_is_bell_eigenstate(self):
        d = distribution(prepare_bell(BellKind.PsiMinus, "h", "t"), MeasBasis.Bell, ("h", "t"))
        assert d[BellKind.PsiMinus] == pytest.approx(1.0, abs=1e-12)

    def test_y_on_t_gives_phi_plus(self):
        s = apply(prepare_bell(BellKind.PsiMinus, "h", "t"), LocalOp.Y, "t")
        d = distribution(s, MeasBasis.Bell, ("h", "t"))
        assert d[BellKind.PhiPlus] == pytest.approx(1.0, abs=1e-12)

    def test_singlet_z_marginal_uniform(self):
        d = distribution(prepare_bell(BellKind.PsiMinus, "h", "t"), MeasBasis.Z, ("t",))
        assert d[0] == pytest.approx(0.5, abs=1e-12)
        assert d[1] == pytest.approx(0.5, abs=1e-12)

    def test_dense_coding_table(self):
        """Pauli on t shifts the singlet to a distinct Bell state."""
        want = {
            LocalOp.I: BellKind.PsiMinus,
            LocalOp.X: BellKind.PhiMinus,
            LocalOp.Y: BellKind.PhiPlus,
            LocalOp.Z: BellKind.PsiPlus,
        }
        for pauli, kind in want.items():
            s = apply(prepare_bell(BellKind.PsiMinus, "h", "t"), pauli, "t")
            d = distribution(s, MeasBasis.Bell, ("h", "t"))
            assert d[kind] == pytest.approx(1.0, abs=1e-12)
            # cross-check against the kron oracle
            v = np.kron(OP_MATS["I"], OP_MATS[pauli.value]) @ SINGLET
            assert bell_probs(v)[kind.value] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("basis,qs", [
        (MeasBasis.Z, ("a",)),
        (MeasBasis.X, ("b",)),
        (MeasBasis.Bell, ("a", "c")),
        (MeasBasis.G, ("a", "b", "c", "d")),
    ])
    def test_probabilities_sum_to_one(self, basis, qs):
        rng = np.random.default_rng(23)
        for _ in range(20):
            s = random_state(["a", "b", "c", "d"], rng)
            d = distribution(s, basis, qs)
            assert sum(d.values()) == pytest.approx(1.0, abs=1e-10)

    def test_arity_mismatch_rejected(self):
        s = prepare_bell(BellKind.PhiPlus, "a", "b")
        with pytest.raises(ValueError, match="takes"):
            distribution(s, MeasBasis.Bell, ("a",))
        with pytest.raises(ValueError, match="takes"):
            distribution(s, MeasBasis.Z, ("a", "b"))


# outcome -> correction making photon C reproduce the input, for a Phi+ resource
TELEPORT_CORRECTION = {
    BellKind.PhiPlus: LocalOp.I,
    BellKind.PhiMinus: LocalOp.Z,
    BellKind.PsiPlus: LocalOp.X,
    BellKind.PsiMinus: LocalOp.Y,
}


class TestMeasure:
    def test_bell_eigenstate_outcome_and_state(self):
        s = prepare_bell(BellKind.PsiMinus, "h", "t")
        for u in (0.0, 0.3, 0.9999):
            outcome, post = measure(s, MeasBasis.Bell, ("h", "t"), u)
            assert outcome is BellKind.PsiMinus
            assert fidelity_up_to_phase(post, s) == pytest.approx(1.0, abs=1e-12)

    def test_singlet_z_bits_always_unequal(self):
        rng = random.Random(29)
        for _ in range(100):
            s = prepare_bell(BellKind.PsiMinus, "h", "t")
            b1, s = measure(s, MeasBasis.Z, ("h",), rng.random())
            b2, s = measure(s, MeasBasis.Z, ("t",), rng.random())
            assert b1 != b2

    def test_collapse_leaves_outcome_eigenstate(self):
        rng = np.random.default_rng(31)
        s = random_state(["a", "b", "c"], rng)
        outcome, post = measure(s, MeasBasis.Bell, ("a", "c"), 0.42)
        d = distribution(post, MeasBasis.Bell, ("a", "c"))
        assert d[outcome] == pytest.approx(1.0, abs=1e-10)

    def test_two_qubit_teleportation_all_16_outcomes(self):
        """G measurement on (h,t,1,2) moves any (h,t) state onto (3,4)."""
        rng = np.random.default_rng(37)
        for _ in range(5):
            inp = random_state(["h", "t"], rng)
            full = tensor(
                inp,
                tensor(
                    prepare_bell(BellKind.PhiPlus, "1", "3"),
                    prepare_bell(BellKind.PhiPlus, "2", "4"),
                ),
            )
            for first in BELL_ORDER:
                for second in BELL_ORDER:
                    p, post = project(
                        full, MeasBasis.G, ("h", "t", "1", "2"), GOutcome(first, second)
                    )
                    assert p == pytest.approx(1 / 16, abs=1e-10)
                    post = apply(post, TELEPORT_CORRECTION[first], "3")
                    post = apply(post, TELEPORT_CORRECTION[second], "4")
                    out = discard(
                        post,
                        ("h", "t", "1", "2"),
                        _eigenstate_hT12(first, second),
                    )
                    want = PureState(("3", "4"), inp.amps.copy())
                    assert fidelity_up_to_phase(out, want) == pytest.approx(1.0, abs=1e-9)

    def test_teleportation_sampled_100_random_states(self):
        rng = np.random.default_rng(41)
        draws = random.Random(43)
        for _ in range(100):
            inp = random_state(["h", "t"], rng)
            full = tensor(
                inp,
                tensor(
                    prepare_bell(BellKind.PhiPlus, "1", "3"),
                    prepare_bell(BellKind.PhiPlus, "2", "4"),
                ),
            )
            outcome, post = measure_remove(
                full, MeasBasis.G, ("h", "t", "1", "2"), draws.random()
            )
            post = apply(post, TELEPORT_CORRECTION[outcome.first], "3")
            post = apply(post, TELEPORT_CORRECTION[outcome.second], "4")
            want = PureState(("3", "4"), inp.amps.copy())
            assert fidelity_up_to_phase(post, want) == pytest.approx(1.0, abs=1e-9)

    def test_deterministic_under_same_draws(self):
        rng = np.random.default_rng(47)
        s = random_state(["a", "b", "c"], rng)
        us = [0.13, 0.77, 0.52]
        runs = []
        for _ in range(2):
            st = s
            seq = []
            o, st = measure(st, MeasBasis.Bell, ("a", "b"), us[0])
            seq.append(o)
            o, st = measure(st, MeasBasis.X, ("c",), us[1])
            seq.append(o)
            runs.append((seq, st.amps.copy()))
        assert runs[0][0] == runs[1][0]
        np.testing.assert_array_equal(runs[0][1], runs[1][1])

    def test_measure_remove_consistent_with_measure(self):
        rng = np.random.default_rng(53)
        s = random_state(["a", "b", "c", "d"], rng)
        o1, kept = measure(s, MeasBasis.Bell, ("b", "d"), 0.61)
        o2, removed = measure_remove(s, MeasBasis.Bell, ("b", "d"), 0.61)
        assert o1 == o2
        via_discard = discard(kept, ("b", "d"), prepare_bell(o1, "b", "d"))
        assert fidelity_up_to_phase(via_discard, removed) == pytest.approx(1.0, abs=1e-10)

    def test_norm_preserved_under_random_ops_and_measurements(self):
        rng = random.Random(59)
        s = tensor(
            prepare_bell(BellKind.PsiMinus, "h", "t"),
            prepare_bell(BellKind.PhiPlus, "a", "b"),
        )
        labels = ("h", "t", "a", "b")
        for i in range(2000):
            s = apply(s, ALL_OPS[rng.randrange(5)], labels[rng.randrange(4)])
            if i % 97 == 0:
                _, s = measure(s, MeasBasis.Z, (labels[rng.randrange(4)],), rng.random())
        assert abs(s.norm() - 1.0) < 1e-10


def _eigenstate_hT12(first: BellKind, second: BellKind) -> PureState:
    """Post-measurement product state of (h,t,1,2): Bell(h,1) x Bell(t,2)."""
    paired = tensor(prepare_bell(first, "h", "1"), prepare_bell(second, "t", "2"))
    t = paired.tensor_view().transpose(0, 2, 1, 3)  # reorder to (h, t, 1, 2)
    return PureState(("h", "t", "1", "2"), t.ravel())


class TestProjectAndDiscard:
    def test_unreachable_outcome_has_zero_probability(self):
        s = prepare_bell(BellKind.PsiMinus, "h", "t")
        p, post = project(s, MeasBasis.Bell, ("h", "t"), BellKind.PhiPlus)
        assert p == 0.0
        assert post is s

    def test_discard_requires_product_state(self):
        s = tensor(
            prepare_bell(BellKind.PsiMinus, "h", "t"),
            prepare_bell(BellKind.PhiPlus, "a", "b"),
        )
        with pytest.raises(ValueError, match="product"):
            discard(s, ("t", "a"), prepare_bell(BellKind.PhiPlus, "t", "a"))

    def test_discard_removes_known_pair(self):
        s = tensor(
            prepare_bell(BellKind.PsiMinus, "h", "t"),
            prepare_bell(BellKind.PhiPlus, "a", "b"),
        )
        out = discard(s, ("a", "b"), prepare_bell(BellKind.PhiPlus, "a", "b"))
        assert out.labels == ("h", "t")
        assert fidelity_up_to_phase(out, prepare_bell(BellKind.PsiMinus, "h", "t")) == pytest.approx(1.0, abs=1e-12)


class TestFidelity:
    def test_self_fidelity(self):
        rng = np.random.default_rng(61)
        s = random_state(["a", "b"], rng)
        assert fidelity_up_to_phase(s, s) == pytest.approx(1.0, abs=1e-12)

    def test_global_phase_invisible(self):
        s = prepare_bell(BellKind.PsiMinus, "h", "t")
        flipped = PureState(s.labels, -s.amps)
        assert fidelity_up_to_phase(s, flipped) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_states(self):
        a = prepare_bell(BellKind.PhiPlus, "h", "t")
        b = prepare_bell(BellKind.PsiPlus, "h", "t")
        assert fidelity_up_to_phase(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_label_order_alignment(self):
        """The singlet is antisymmetric, so swapping labels only flips phase."""
        a = prepare_bell(BellKind.PsiMinus, "h", "t")
        b = prepare_bell(BellKind.PsiMinus, "t", "h")
        assert fidelity_up_to_phase(a, b) == pytest.approx(1.0, abs=1e-12)

    def test_label_mismatch_rejected(self):
        a = prepare_bell(BellKind.PhiPlus, "a", "b")
        b = prepare_bell(BellKind.PhiPlus, "a", "c")
        with pytest.raises(ValueError, match="mismatch"):
            fidelity_up_to_phase(a, b)


class TestPureStateValidation:
    def test_register_size_limits(self):
        with pytest.raises(ValueError, match="register size"):
            PureState(tuple("abcdefghijk"), np.zeros(2**11, dtype=complex))

    def test_norm_enforced(self):
        with pytest.raises(ValueError, match="norm"):
            PureState(("a",), np.array([1.0, 1.0], dtype=complex))

    def test_amp_count_must_match(self):
        with pytest.raises(ValueError, match="amplitude count"):
            PureState(("a", "b"), np.array([1.0, 0.0], dtype=complex))
