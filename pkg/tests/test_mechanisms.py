import math

import numpy as np
import pytest
from scipy import stats

from jrr.errors import InfeasibleCorrelationError, ParameterError, SamplerInfeasibleError
from jrr.grouping import perturb_paired_values
from jrr.mechanisms import (
    PerturbParams,
    correlated_truth_table,
    joint_table,
    jrr_perturb_pair,
    kary_joint_entries,
    kjrr_perturb_pair,
    oue_bit_table,
    oue_jrr_perturb_pair,
    rr_perturb,
    sampler_config,
    sampler_decide,
)

TABLE1 = PerturbParams(p=0.8, rho=-0.1875)


class TestPerturbParams:
    def test_q_is_derived(self):
        assert PerturbParams(p=0.8, rho=0.0).q == pytest.approx(0.2, abs=1e-15)
        assert PerturbParams(p=0.6, rho=0.0, k=3).q == pytest.approx(0.2, abs=1e-15)

    def test_inconsistent_q_rejected(self):
        with pytest.raises(ParameterError):
            PerturbParams(p=0.8, rho=0.0, q=0.3)

    @pytest.mark.parametrize("p", [0.5, 0.3, 1.1, -0.1])
    def test_binary_p_domain(self, p):
        with pytest.raises(ParameterError):
            PerturbParams(p=p, rho=0.0)

    def test_rho_floor(self):
        # 1 - 1/p = -0.25 at p = 0.8
        PerturbParams(p=0.8, rho=-0.25)
        with pytest.raises(InfeasibleCorrelationError):
            PerturbParams(p=0.8, rho=-0.2501)
        with pytest.raises(InfeasibleCorrelationError):
            PerturbParams(p=0.8, rho=1.0001)

    def test_k_must_be_at_least_two(self):
        with pytest.raises(ParameterError):
            PerturbParams(p=0.9, rho=0.0, k=1)

    def test_kary_entry_feasibility(self):
        PerturbParams(p=0.6, rho=-0.3, k=3)
        # q^2 + rho*p*q/(k-1)^2 < 0 for strongly negative rho
        with pytest.raises(InfeasibleCorrelationError):
            PerturbParams(p=0.6, rho=-1.5, k=3)


class TestJointTable:
    def test_worked_example_table(self):
        t = joint_table(TABLE1)
        assert t.p11 == pytest.approx(0.61, abs=1e-12)
        assert t.p10 == pytest.approx(0.19, abs=1e-12)
        assert t.p01 == pytest.approx(0.19, abs=1e-12)
        assert t.p00 == pytest.approx(0.01, abs=1e-12)

    def test_independence_at_rho_zero(self):
        t = joint_table(PerturbParams(p=0.8, rho=0.0))
        assert t.p11 == pytest.approx(0.64, abs=1e-12)
        assert t.p10 == pytest.approx(0.16, abs=1e-12)
        assert t.p00 == pytest.approx(0.04, abs=1e-12)

    def test_perfect_correlation(self):
        t = joint_table(PerturbParams(p=0.6, rho=1.0))
        assert t.p11 == pytest.approx(0.6, abs=1e-12)
        assert t.p10 == pytest.approx(0.0, abs=1e-12)
        assert t.p00 == pytest.approx(0.4, abs=1e-12)

    @pytest.mark.parametrize("p", [0.55, 0.7, 0.8, 0.95])
    @pytest.mark.parametrize("rho_frac", [0.0, 0.25, 0.6, 1.0])
    def test_marginals_and_correlation_identity(self, p, rho_frac):
        # sweep rho from its floor to 1
        floor = 1 - 1 / p
        rho = floor + rho_frac * (1 - floor)
        t = joint_table(PerturbParams(p=p, rho=rho))
        assert t.p11 + t.p10 == pytest.approx(p, abs=1e-12)
        assert t.p11 + t.p01 == pytest.approx(p, abs=1e-12)
        # correlation of the two indicators recovers rho
        corr = (t.p11 - p * p) / (p * (1 - p))
        assert corr == pytest.approx(rho, abs=1e-12)

    def test_kary_domain_rejected(self):
        with pytest.raises(ParameterError):
            joint_table(PerturbParams(p=0.6, rho=0.0, k=3))


class TestRrPerturb:
    def test_truthful_at_p_one(self):
        rng = np.random.default_rng(0)
        assert all(rr_perturb(1, 1.0, rng) == 1 for _ in range(32))

    def test_invalid_p(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ParameterError):
            rr_perturb(0, 0.5, rng)

    def test_flip_rate(self):
        rng = np.random.default_rng(1)
        draws = 10**6
        kept = sum(rr_perturb(0, 0.8, rng) == 0 for _ in range(draws))
        assert kept / draws == pytest.approx(0.8, abs=0.005)

    def test_near_uniform_at_half(self):
        rng = np.random.default_rng(2)
        draws = 10**6
        ones = sum(rr_perturb(1, 0.5 + 1e-9, rng) for _ in range(draws))
        assert ones / draws == pytest.approx(0.5, abs=0.005)


class TestJrrPerturbPair:
    def test_deterministic_at_p_one(self):
        rng = np.random.default_rng(0)
        t = joint_table(PerturbParams(p=1.0, rho=0.0))
        assert jrr_perturb_pair(1, 1, t, rng) == (1, 1)

    def test_pair_frequencies_match_table(self):
        rng = np.random.default_rng(3)
        t = joint_table(TABLE1)
        draws = 10**6
        hits_11 = 0   # x = (1,1): output (1,1) <=> both truthful
        for _ in range(draws):
            if jrr_perturb_pair(1, 1, t, rng) == (1, 1):
                hits_11 += 1
        assert hits_11 / draws == pytest.approx(0.61, abs=0.005)

    def test_truth_table_output_mapping(self):
        # x = (1, 0): output (1, 0) happens exactly when both report truthfully
        rng = np.random.default_rng(4)
        t = joint_table(TABLE1)
        draws = 10**6
        hits = sum(jrr_perturb_pair(1, 0, t, rng) == (1, 0) for _ in range(draws))
        assert hits / draws == pytest.approx(0.61, abs=0.005)


class TestSampler:
    def test_worked_example_config(self):
        cfg = sampler_config(TABLE1)
        s = math.sqrt(0.1875 * 0.8 * TABLE1.q)
        assert cfg.s == pytest.approx(0.17320508075688773, abs=1e-15)
        assert cfg.c_probs[0] == pytest.approx(0.8 - s, abs=1e-15)
        assert cfg.c_probs[1] == cfg.c_probs[2] == cfg.s
        assert cfg.c_probs[3] == pytest.approx(0.026794919243112247, abs=1e-12)

    def test_rho_zero_degenerates_to_rr(self):
        cfg = sampler_config(PerturbParams(p=0.8, rho=0.0))
        assert cfg.c_probs[0] == pytest.approx(0.8, abs=1e-15)
        assert cfg.c_probs[1] == 0.0 and cfg.c_probs[2] == 0.0

    def test_boundary_rho(self):
        # rho = -q/p makes Pr[C=-1.5] exactly zero
        p = 0.8
        params = PerturbParams(p=p, rho=-(1 - p) / p)
        cfg = sampler_config(params)
        assert cfg.c_probs[3] == 0.0

    def test_positive_rho_rejected(self):
        with pytest.raises(SamplerInfeasibleError):
            sampler_config(PerturbParams(p=0.8, rho=0.1))

    @pytest.mark.parametrize(
        "c,r,expected",
        [(-0.5, 1, 1), (0.5, -1, 0), (1.5, -1, 1), (1.5, 1, 1), (-1.5, 1, 0), (-1.5, -1, 0)],
    )
    def test_decide(self, c, r, expected):
        assert sampler_decide(c, r) == expected

    def test_decide_rejects_bad_inputs(self):
        with pytest.raises(ParameterError):
            sampler_decide(0.5, 0)
        with pytest.raises(ParameterError):
            sampler_decide(0.4, 1)


class TestMarginalConsistency:
    @pytest.mark.parametrize(
        "p,rho", [(0.8, -0.1875), (0.6, -0.5), (0.75, 0.3), (0.9, -0.1), (0.52, -0.9)]
    )
    def test_chi_square_marginal(self, p, rho):
        # every output coordinate reports truthfully with probability p
        params = PerturbParams(p=p, rho=rho)
        rng = np.random.default_rng(11)
        pairs = 500_000
        values = np.zeros(2 * pairs, dtype=np.int64)
        first = np.arange(0, 2 * pairs, 2)
        second = np.arange(1, 2 * pairs, 2)
        reports = perturb_paired_values(values, first, second, None, params, "direct-joint", rng)
        truthful = int(np.sum(reports == 0))
        n = 2 * pairs
        chi2 = stats.chisquare([truthful, n - truthful], [n * p, n * (1 - p)])
        assert chi2.pvalue > 0.001


class TestKjrr:
    def test_case_probabilities(self):
        both, one, neither = kary_joint_entries(0.6, 0.2, -0.3, 3)
        assert both == pytest.approx(0.324, abs=1e-12)
        assert one == pytest.approx(0.12 + 0.018, abs=1e-12)
        assert 0.324 + 2 * 2 * one + 4 * neither == pytest.approx(1.0, abs=1e-12)

    def test_binary_specialization_matches_joint_table(self):
        params = PerturbParams(p=0.8, rho=-0.1875)
        t = joint_table(params)
        both, one, neither = kary_joint_entries(params.p, params.q, params.rho, 2)
        assert both == pytest.approx(t.p11, abs=1e-15)
        assert one == pytest.approx(t.p10, abs=1e-15)
        assert neither == pytest.approx(t.p00, abs=1e-15)

    def test_marginal_is_p(self):
        # marginal Pr[report own value] = both + (k-1)*one = p
        p, rho, k = 0.6, -0.3, 3
        both, one, _ = kary_joint_entries(p, 0.2, rho, k)
        assert both + (k - 1) * one == pytest.approx(p, abs=1e-12)

    def test_perturb_pair_domain_check(self):
        rng = np.random.default_rng(0)
        params = PerturbParams(p=0.6, rho=-0.3, k=3)
        with pytest.raises(ParameterError):
            kjrr_perturb_pair(3, 0, params, rng)

    def test_empirical_case_frequency(self):
        rng = np.random.default_rng(5)
        params = PerturbParams(p=0.6, rho=-0.3, k=3)
        draws = 200_000
        both = sum(kjrr_perturb_pair(0, 1, params, rng) == (0, 1) for _ in range(draws))
        assert both / draws == pytest.approx(0.324, abs=0.005)


class TestOueIntegration:
    def test_degenerate_domain_rejected(self):
        with pytest.raises(ParameterError):
            PerturbParams(p=0.9, rho=0.0, k=1)

    def test_bit_marginals(self):
        # Pr[B'[j] = 1 | B[j] = 1] = p per position
        rng = np.random.default_rng(6)
        params = PerturbParams(p=0.6, rho=-0.2, k=3)
        draws = 300_000
        kept = 0
        for _ in range(draws):
            y1, _ = oue_jrr_perturb_pair(2, 2, params, rng)
            kept += int(y1[2] == 1)
        assert kept / draws == pytest.approx(0.6, abs=0.005)

    def test_rho_zero_reduces_to_independent_bits(self):
        params = PerturbParams(p=0.6, rho=0.0, k=3)
        for bits in ((1, 1), (1, 0), (0, 0)):
            t = oue_bit_table(*bits, params)
            keep = {1: params.p, 0: 1 - params.q}
            assert t.p11 == pytest.approx(keep[bits[0]] * keep[bits[1]], abs=1e-12)

    def test_mixed_bit_class_feasibility_error_names_class(self):
        params = PerturbParams(p=0.6, rho=-0.9, k=3)
        with pytest.raises(InfeasibleCorrelationError, match=r"bit class \(1,0\)"):
            oue_bit_table(1, 0, params)

    def test_asymmetric_table_marginals(self):
        t = correlated_truth_table(0.6, 0.8, -0.3)
        assert t.p11 + t.p10 == pytest.approx(0.6, abs=1e-12)
        assert t.p11 + t.p01 == pytest.approx(0.8, abs=1e-12)

    def test_output_shapes(self):
        rng = np.random.default_rng(7)
        params = PerturbParams(p=0.6, rho=-0.1, k=4)
        y1, y2 = oue_jrr_perturb_pair(1, 3, params, rng)
        assert y1.shape == (4,) and y2.shape == (4,)
        assert set(np.unique(np.concatenate([y1, y2]))) <= {0, 1}
