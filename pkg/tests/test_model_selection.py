import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rnbayes.distributions import GIGParams
from rnbayes.errors import ImproperPriorError, InvalidInputError, NumericError, UnsupportedModelError
from rnbayes.likelihoods import GbmParams, log_likelihood_gbm
from rnbayes.model_selection import (
    GbmModel,
    JumpDiffusionModel,
    ModelSpec,
    compare_models,
    marginal_likelihood,
    model_posterior,
)
from rnbayes.paths import JumpDist, ReturnStat
from rnbayes.priors import FlatPrior, GIGPrior, MixturePrior, NormalPrior, PointMass, PriorSpec
from rnbayes.rng import make_stream

STAT = ReturnStat(0.18, 2.0)
R = 0.03


def log_analytic_normal_evidence(stat, m, v, s2, r):
    """log E over mu ~ N(m, v) of dP/dQ with sigma2 known, in closed form."""
    t = stat.horizon
    d = stat.ln_ratio / t + s2 / 2
    tau = s2 / t
    return t * (r - d) ** 2 / (2 * s2) + 0.5 * math.log(tau / (tau + v)) - (m - d) ** 2 / (2 * (tau + v))


def analytic_normal_evidence(stat, m, v, s2, r):
    return math.exp(log_analytic_normal_evidence(stat, m, v, s2, r))


class TestSpecs:
    def test_model_spec_validation(self):
        with pytest.raises(InvalidInputError):
            ModelSpec(GbmModel(PriorSpec(), 0.0), prior_prob=0.0)
        with pytest.raises(UnsupportedModelError):
            ModelSpec("gbm")


class TestMarginalLikelihood:
    def test_point_masses_give_the_likelihood(self):
        spec = ModelSpec(GbmModel(PriorSpec(PointMass(0.1), PointMass(0.04)), R))
        ml = marginal_likelihood(spec, STAT, 100, make_stream(1))
        ref = log_likelihood_gbm(STAT, GbmParams(0.1, 0.04, R))
        assert ml.log_estimate == pytest.approx(ref, rel=1e-14)
        assert ml.std_error == 0.0

    @pytest.mark.parametrize("m, v", [(0.05, 0.01), (0.3, 0.1), (-0.2, 0.5)])
    def test_normal_prior_against_closed_form(self, m, v):
        spec = ModelSpec(GbmModel(PriorSpec(NormalPrior(m, v), PointMass(0.04)), R))
        ml = marginal_likelihood(spec, STAT, 50_000, make_stream(2))
        ref = analytic_normal_evidence(STAT, m, v, 0.04, R)
        assert abs(ml.estimate - ref) < 4 * ml.std_error
        assert ml.estimate == pytest.approx(math.exp(ml.log_estimate), rel=1e-12)

    def test_linear_in_mixture_prior(self):
        a, b = NormalPrior(0.0, 0.02), NormalPrior(0.4, 0.05)
        mix = MixturePrior((a, b), (0.25, 0.75))
        spec = ModelSpec(GbmModel(PriorSpec(mix, PointMass(0.04)), R))
        ml = marginal_likelihood(spec, STAT, 50_000, make_stream(3))
        ref = 0.25 * analytic_normal_evidence(STAT, 0.0, 0.02, 0.04, R) + 0.75 * analytic_normal_evidence(STAT, 0.4, 0.05, 0.04, R)
        assert abs(ml.estimate - ref) < 4 * ml.std_error

    def test_no_overflow_on_long_horizons(self):
        stat = ReturnStat(40.0, 400.0)
        spec = ModelSpec(GbmModel(PriorSpec(NormalPrior(0.1, 1e-6), PointMass(4e-4)), 0.0), 0.5)
        ml = marginal_likelihood(spec, stat, 500, make_stream(4))
        assert math.isfinite(ml.log_estimate) and ml.log_estimate > 700
        assert ml.estimate == math.inf
        ref = log_analytic_normal_evidence(stat, 0.1, 1e-6, 4e-4, 0.0)
        assert ml.log_estimate == pytest.approx(ref, abs=0.05)
        other = ModelSpec(GbmModel(PriorSpec(NormalPrior(0.09, 1e-6), PointMass(4e-4)), 0.0), 0.5)
        post = compare_models([spec, other], stat, 500, [make_stream(4), make_stream(5)])
        assert math.isfinite(post.posteriors[0]) and sum(post.posteriors) == pytest.approx(1.0)

    def test_jump_model_without_jumps_matches_gbm(self):
        pri = PriorSpec(NormalPrior(0.05, 0.02), GIGPrior(GIGParams(3, 0.4, 10)))
        g = marginal_likelihood(ModelSpec(GbmModel(pri, R)), STAT, 300, make_stream(5))
        j = marginal_likelihood(
            ModelSpec(JumpDiffusionModel(pri, R, 0.0, JumpDist([0.1], [1.0]))), STAT, 300, make_stream(5)
        )
        assert j.log_estimate == pytest.approx(g.log_estimate, rel=1e-9)

    def test_requires_proper_priors_and_enough_draws(self):
        with pytest.raises(ImproperPriorError):
            marginal_likelihood(ModelSpec(GbmModel(PriorSpec(FlatPrior(), PointMass(0.04)), R)), STAT, 100, 1)
        with pytest.raises(InvalidInputError):
            marginal_likelihood(ModelSpec(GbmModel(PriorSpec(PointMass(0.1), PointMass(0.04)), R)), STAT, 99, 1)

    def test_seeded(self):
        spec = ModelSpec(GbmModel(PriorSpec(NormalPrior(0.05, 0.02), GIGPrior(GIGParams(3, 0.4, 10))), R))
        assert marginal_likelihood(spec, STAT, 200, 7) == marginal_likelihood(spec, STAT, 200, 7)


class TestModelPosterior:
    @given(st.lists(st.floats(-500, 500), min_size=1, max_size=8), st.data())
    def test_sums_to_one_and_shift_invariant(self, logs, data):
        w = np.array(data.draw(st.lists(st.floats(0.01, 1.0), min_size=len(logs), max_size=len(logs))))
        w = w / w.sum()
        p = model_posterior(logs, w, log=True)
        assert abs(p.sum() - 1.0) <= 1e-12 and np.all(p >= 0)
        np.testing.assert_allclose(model_posterior(np.array(logs) + 123.4, w, log=True), p, atol=1e-12)

    def test_linear_and_log_inputs_agree(self):
        m = [2e-3, 5e-4, 1.5e-3]
        pp = [0.2, 0.5, 0.3]
        np.testing.assert_allclose(model_posterior(m, pp), model_posterior(np.log(m), pp, log=True), rtol=1e-14)
        ref = np.array(m) * pp / np.dot(m, pp)
        np.testing.assert_allclose(model_posterior(m, pp), ref, rtol=1e-14)

    def test_zero_evidence_model_gets_zero(self):
        np.testing.assert_array_equal(model_posterior([0.0, 1.0], [0.5, 0.5]), [0.0, 1.0])

    def test_all_zero_is_numeric_error(self):
        with pytest.raises(NumericError):
            model_posterior([0.0, 0.0], [0.5, 0.5])

    @pytest.mark.parametrize("m, pp", [([1.0], [0.5]), ([1.0, 1.0], [0.5]), ([-1.0, 1.0], [0.5, 0.5]), ([], [])])
    def test_validation(self, m, pp):
        with pytest.raises(InvalidInputError):
            model_posterior(m, pp)


class TestCompare:
    models = [
        ModelSpec(GbmModel(PriorSpec(NormalPrior(0.05, 0.01), GIGPrior(GIGParams(3, 0.4, 10))), R), 0.5, "near"),
        ModelSpec(GbmModel(PriorSpec(NormalPrior(-1.0, 0.01), GIGPrior(GIGParams(3, 0.4, 10))), R), 0.5, "far"),
    ]

    def test_favours_prior_near_the_data(self):
        out = compare_models(self.models, STAT, 2000, [make_stream(1, i) for i in range(2)])
        assert out.posteriors[0] > 0.99
        assert sum(out.posteriors) == pytest.approx(1.0, abs=1e-12)
        assert len(out.mc_std_errors) == 2

    def test_needs_one_stream_per_model(self):
        with pytest.raises(InvalidInputError):
            compare_models(self.models, STAT, 200, [make_stream(1)])
