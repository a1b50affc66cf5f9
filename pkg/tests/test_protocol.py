"""Verifier logic: challenges, basis policies, audits, temporal/stateless rounds."""

import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forkaudit.errors import MalformedEvidenceError, ProtocolError
from forkaudit.game import GameConfig
from forkaudit.protocol import (
    BasisPolicy,
    Evidence,
    VerifierState,
    audit,
    choose_basis,
    issue_challenge,
    run_stateless_round,
    run_temporal_round,
)
from forkaudit.rng import make_rng
from forkaudit.witness import init_witness, parity


def verifier(expected_phase=0, tau_x=0.85, tau_z=0.85, policy=None, k=8):
    return VerifierState(
        expected_phase=expected_phase,
        tau_x=tau_x,
        tau_z=tau_z,
        basis_policy=policy or BasisPolicy.bernoulli(0.5),
        k_challenge_bits=k,
    )


class TestIssueChallenge:
    def test_width_and_phase_tracking(self):
        v = verifier(expected_phase=0, k=8)
        ch = issue_challenge(v, 1, make_rng(1))
        assert len(ch.bits) == 8 and ch.round == 1
        assert v.expected_phase == parity(ch.bits)

    def test_single_bit_flip_rate(self):
        v = verifier(k=1)
        rng = make_rng(2)
        flips = 0
        for r in range(1, 10_001):
            before = v.expected_phase
            issue_challenge(v, r, rng)
            flips += v.expected_phase != before
        assert abs(flips / 10_000 - 0.5) < 5 * 0.005

    def test_reproducible(self):
        a = [issue_challenge(verifier(), r, make_rng(5, r)).bits for r in range(1, 20)]
        b = [issue_challenge(verifier(), r, make_rng(5, r)).bits for r in range(1, 20)]
        assert a == b

    def test_round_guard(self):
        with pytest.raises(ProtocolError, match="1-indexed"):
            issue_challenge(verifier(), 0, make_rng(0))


class TestChooseBasis:
    def test_fixed_policies(self):
        rng = make_rng(0)
        vx = verifier(policy=BasisPolicy.fixed_x())
        vz = verifier(policy=BasisPolicy.fixed_z())
        assert all(choose_basis(vx, rng) == "X" for _ in range(50))
        assert all(choose_basis(vz, rng) == "Z" for _ in range(50))

    def test_bernoulli_boundary(self):
        v = verifier(policy=BasisPolicy.bernoulli(1.0))
        rng = make_rng(1)
        assert all(choose_basis(v, rng) == "X" for _ in range(50))

    def test_bernoulli_half_rate(self):
        v = verifier(policy=BasisPolicy.bernoulli(0.5))
        rng = make_rng(9)
        xs = sum(choose_basis(v, rng) == "X" for _ in range(10_000))
        assert abs(xs / 10_000 - 0.5) < 3 * 0.005

    def test_parse_tokens(self):
        assert BasisPolicy.parse("fixed-x").kind == "fixed-x"
        assert BasisPolicy.parse("bernoulli:0.25").p_x == 0.25
        assert BasisPolicy.parse("bernoulli").p_x == 0.5


def x_evidence(shot_parities, n=4, round=1):
    shots = tuple(("0" * (n - 1) + "1") if p else "0" * n for p in shot_parities)
    return Evidence(basis="X", shots=shots, round=round)


class TestAudit:
    def test_x_all_consistent(self):
        out = audit(verifier(0, tau_x=0.85), x_evidence([0] * 20))
        assert out.pass_fraction == 1.0 and out.accepted

    def test_x_threshold_rejects(self):
        out = audit(verifier(0, tau_x=0.90), x_evidence([0] * 17 + [1] * 3))
        assert out.pass_fraction == pytest.approx(0.85)
        assert not out.accepted

    def test_z_all_equal_passes(self):
        ev = Evidence("Z", ("0000", "1111", "1111", "0000"), 1)
        out = audit(verifier(0, tau_z=0.9), ev)
        assert out.pass_fraction == 1.0 and out.accepted

    def test_z_ignores_expected_phase(self):
        ev = Evidence("Z", ("0000", "1111", "0110"), 1)
        a = audit(verifier(0), ev)
        b = audit(verifier(1), ev)
        assert a == b

    def test_empty_evidence(self):
        with pytest.raises(MalformedEvidenceError, match="shots"):
            audit(verifier(), Evidence("X", (), 1))

    def test_basis_mismatch(self):
        v = verifier(policy=BasisPolicy.fixed_x())
        choose_basis(v, make_rng(0))
        with pytest.raises(ProtocolError, match="basis"):
            audit(v, Evidence("Z", ("0000",), 1))

    @given(
        st.lists(st.integers(0, 1), min_size=1, max_size=40),
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=60)
    def test_threshold_monotonicity(self, parities, tau_lo, tau_hi):
        tau_lo, tau_hi = sorted((tau_lo, tau_hi))
        ev = x_evidence(parities)
        hi = audit(verifier(0, tau_x=tau_hi), ev)
        lo = audit(verifier(0, tau_x=tau_lo), ev)
        assert hi.accepted <= lo.accepted
        assert hi.pass_fraction == lo.pass_fraction

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=30))
    @settings(max_examples=40)
    def test_accepted_iff_fraction_clears_threshold(self, parities):
        out = audit(verifier(0, tau_x=0.6), x_evidence(parities))
        assert out.accepted == (out.pass_fraction >= 0.6)


class TestTemporalRound:
    @pytest.mark.parametrize(
        "policy", [BasisPolicy.fixed_x(), BasisPolicy.fixed_z(), BasisPolicy.bernoulli(0.5)]
    )
    def test_honest_noiseless_accepts(self, policy):
        config = GameConfig(basis_policy=policy, shots=16)
        rng = make_rng(11)
        wit = init_witness(config.n, 1)
        v = verifier(expected_phase=1, policy=policy)
        for _ in range(12):
            transcript, wit, v = run_temporal_round(v, wit, config, rng)
            assert transcript.outcome.accepted
            assert v.expected_phase == wit.phase

    def test_corrupted_witness_fixed_x_rejected(self):
        # one unrecorded phase flip: every shot parity is wrong
        config = GameConfig(basis_policy=BasisPolicy.fixed_x())
        rng = make_rng(5)
        wit = init_witness(config.n, 0)
        corrupted = dataclasses.replace(wit, phase=wit.phase ^ 1)
        v = verifier(expected_phase=0, policy=BasisPolicy.fixed_x())
        transcript, _, _ = run_temporal_round(v, corrupted, config, rng)
        assert transcript.outcome.pass_fraction == 0.0
        assert not transcript.outcome.accepted

    def test_corrupted_witness_fixed_z_accepted(self):
        # Z audits are phase-blind
        config = GameConfig(basis_policy=BasisPolicy.fixed_z())
        rng = make_rng(5)
        wit = init_witness(config.n, 0)
        corrupted = dataclasses.replace(wit, phase=wit.phase ^ 1)
        v = verifier(expected_phase=0, policy=BasisPolicy.fixed_z())
        transcript, _, _ = run_temporal_round(v, corrupted, config, rng)
        assert transcript.outcome.accepted

    def test_replaying_stored_transcript_reproduces_outcome(self):
        config = GameConfig()
        rng = make_rng(21)
        secret = 1
        wit = init_witness(config.n, secret)
        v = verifier(expected_phase=secret)
        transcripts = []
        for _ in range(6):
            transcript, wit, v = run_temporal_round(v, wit, config, rng)
            transcripts.append(transcript)
        # replay: rebuild the expected phase per round from the challenge parities
        phase = secret
        for transcript in transcripts:
            phase ^= parity(transcript.challenge.bits)
            replay_verifier = verifier(expected_phase=phase)
            assert audit(replay_verifier, transcript.evidence) == transcript.outcome


class TestStatelessRound:
    def test_honest_always_accepts_noiseless(self):
        config = GameConfig()
        assert all(
            run_stateless_round(config, make_rng(17, i))[1] for i in range(200)
        )

    def test_fork_fixed_x_half_rate(self):
        config = GameConfig(basis_policy=BasisPolicy.fixed_x())
        passes = sum(
            run_stateless_round(config, make_rng(23, i), forked=True)[1]
            for i in range(4000)
        )
        assert abs(passes / 4000 - 0.5) < 4 * 0.0079

    def test_fork_fixed_z_always_passes(self):
        config = GameConfig(basis_policy=BasisPolicy.fixed_z())
        assert all(
            run_stateless_round(config, make_rng(29, i), forked=True)[1]
            for i in range(300)
        )
