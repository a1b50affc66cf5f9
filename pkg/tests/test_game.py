"""Security game: win conditions, estimators, confidence intervals, determinism."""

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forkaudit.adversary import AttackerModel
from forkaudit.errors import ConfigurationError
from forkaudit.game import (
    GameConfig,
    estimate_fsr,
    estimate_stateless,
    run_honest_execution,
    run_security_game,
    wilson_interval,
)
from forkaudit.protocol import BasisPolicy

FIXED_X = BasisPolicy.fixed_x()


def config(**kw):
    base = dict(trials=400, master_seed=1234, apr_trials=50)
    base.update(kw)
    return GameConfig(**base)


class TestWilsonInterval:
    @given(st.integers(min_value=0, max_value=500), st.integers(min_value=1, max_value=500))
    @settings(max_examples=80)
    def test_brackets_the_point_estimate(self, wins, trials):
        wins = min(wins, trials)
        low, high = wilson_interval(wins, trials)
        assert 0.0 <= low <= wins / trials <= high <= 1.0

    def test_matches_scipy(self):
        scipy_stats = pytest.importorskip("scipy.stats")
        for wins, trials in [(0, 10), (3, 17), (250, 500), (499, 500)]:
            ref = scipy_stats.binomtest(wins, trials).proportion_ci(
                confidence_level=0.95, method="wilson"
            )
            low, high = wilson_interval(wins, trials)
            assert low == pytest.approx(ref.low, abs=1e-12)
            assert high == pytest.approx(ref.high, abs=1e-12)

    def test_degenerate_single_trial(self):
        low, high = wilson_interval(1, 1)
        assert low < 1.0 <= high
        low, high = wilson_interval(0, 1)
        assert low == 0.0 < high


class TestRunSecurityGame:
    def test_window_zero_is_vacuous_win(self):
        assert run_security_game(config(window=0), 0) is True

    def test_ideal_coherent_always_wins(self):
        cfg = config(attacker=AttackerModel.parse("ideal-coherent"), window=6)
        assert all(run_security_game(cfg, t) for t in range(50))

    def test_memoryless_single_round_half(self):
        cfg = config(basis_policy=FIXED_X, window=1, trials=4000)
        wins = sum(run_security_game(cfg, t) for t in range(4000))
        assert abs(wins / 4000 - 0.5) < 4 * math.sqrt(0.25 / 4000)

    def test_validates_before_running(self):
        with pytest.raises(ConfigurationError, match="shots"):
            run_security_game(config(shots=0), 0)

    def test_independent_challenge_mode_runs(self):
        cfg = config(independent_challenges=True, window=3)
        assert isinstance(run_security_game(cfg, 0), bool)


class TestRunHonestExecution:
    def test_noiseless_apr_is_exactly_one(self):
        assert run_honest_execution(config(apr_trials=200)) == 1.0

    def test_full_noise_strict_x_audit_fails(self):
        # n=1 under p=1: the X-parity is a fair coin per shot; with tau_x
        # near 1 the audit almost never clears
        cfg = config(
            n=1, noise_p=1.0, tau_x=0.99, basis_policy=FIXED_X, shots=32,
            apr_trials=300,
        )
        assert run_honest_execution(cfg) < 0.05

    def test_zero_rounds_vacuous(self):
        assert run_honest_execution(config(window=0, t_fork=0)) == 1.0

    def test_apr_step_like_in_tau_at_large_shots(self):
        # law of large numbers: at shots=1024 and small noise, the X-audit
        # pass rate concentrates, so APR steps from ~1 to ~0 across tau_x.
        # per-shot correct-parity prob at n=4, p=0.05 is ~0.8794.
        base = dict(
            n=4, noise_p=0.05, shots=1024, basis_policy=FIXED_X,
            apr_trials=60, window=2, t_fork=1,
        )
        below = run_honest_execution(config(tau_x=0.85, **base))
        above = run_honest_execution(config(tau_x=0.91, **base))
        assert below > 0.9
        assert above < 0.1


class TestEstimateFsr:
    def test_reproducible_and_scheduling_invariant(self):
        cfg = config(trials=300)
        serial = estimate_fsr(cfg, jobs=None)
        again = estimate_fsr(cfg, jobs=None)
        parallel = estimate_fsr(cfg, jobs=2)
        assert serial == again == parallel

    def test_seed_changes_estimate_stream(self):
        a = estimate_fsr(config(trials=500, master_seed=1))
        b = estimate_fsr(config(trials=500, master_seed=2))
        assert a.wins != b.wins  # different streams (equal wins would be a fluke)

    def test_ci_brackets_fsr(self):
        res = estimate_fsr(config(trials=500))
        assert res.fsr_ci_low <= res.fsr <= res.fsr_ci_high

    def test_monotone_in_window(self):
        fsrs = [
            estimate_fsr(config(basis_policy=FIXED_X, window=w, trials=2500)).fsr
            for w in (1, 3, 5)
        ]
        assert fsrs[0] > fsrs[1] > fsrs[2]

    def test_noise_does_not_help_the_attacker(self):
        # one-sided: FSR under noise stays below the noiseless value plus CI
        clean = estimate_fsr(config(basis_policy=FIXED_X, window=3, trials=2500))
        noisy = estimate_fsr(
            config(basis_policy=FIXED_X, window=3, trials=2500, noise_p=0.1)
        )
        assert noisy.fsr <= clean.fsr_ci_high

    def test_trials_one_degenerate(self):
        res = estimate_fsr(config(trials=1, apr_trials=1))
        assert res.fsr in (0.0, 1.0)
        assert res.fsr_ci_low <= res.fsr <= res.fsr_ci_high


class TestEstimateStateless:
    def test_fixed_x_fork_rate_half_and_honest_high(self):
        cfg = config(basis_policy=FIXED_X, trials=3000, apr_trials=300)
        res = estimate_stateless(cfg)
        assert abs(res.fsr - 0.5) < 4 * math.sqrt(0.25 / 3000)
        assert res.apr == 1.0

    def test_fixed_z_fork_rate_one(self):
        cfg = config(basis_policy=BasisPolicy.fixed_z(), trials=500)
        assert estimate_stateless(cfg).fsr == 1.0

    def test_reproducible(self):
        cfg = config(trials=400)
        assert estimate_stateless(cfg) == estimate_stateless(cfg, jobs=2)

    def test_every_non_ideal_attacker_is_suppressed_below_stateless(self):
        # the central separation: windowed temporal FSR sits strictly under
        # the stateless per-round fork pass rate once the window exceeds the
        # attacker's coherence horizon (at k >= W a limited-memory attacker
        # devolves to a single guess and only ties the 1/2 stateless rate)
        stateless = estimate_stateless(
            config(basis_policy=FIXED_X, trials=2000, window=3)
        )
        cases = [
            ("memoryless", {}, 3),
            ("memoryless-fixed", {"fixed_phase": 1}, 3),
            ("product-state", {}, 3),
            ("limited-memory", {"k": 2}, 3),
            ("limited-memory", {"k": 4}, 6),
        ]
        for token, kw, window in cases:
            cfg = config(
                basis_policy=FIXED_X,
                trials=2000,
                window=window,
                attacker=AttackerModel.parse(token, **kw),
            )
            res = estimate_fsr(cfg)
            assert res.fsr_ci_high < stateless.fsr_ci_low, token


class TestGameConfigValidation:
    @pytest.mark.parametrize(
        "field,value,fragment",
        [
            ("n", 0, "n must"),
            ("n", 25, "1..24"),
            ("window", -1, "window"),
            ("t_fork", -2, "t_fork"),
            ("shots", 0, "shots"),
            ("k_challenge_bits", 0, "k_challenge_bits"),
            ("tau_x", 1.5, "tau_x"),
            ("tau_z", -0.1, "tau_z"),
            ("noise_p", 2.0, "noise_p"),
            ("trials", 0, "trials"),
            ("apr_trials", 0, "apr_trials"),
        ],
    )
    def test_rejects_bad_fields_by_name(self, field, value, fragment):
        with pytest.raises(ConfigurationError, match=fragment):
            replace(GameConfig(), **{field: value}).validate()

    def test_digest_tracks_config(self):
        a, b = GameConfig(), GameConfig(window=9)
        assert a.digest() == GameConfig().digest()
        assert a.digest() != b.digest()
