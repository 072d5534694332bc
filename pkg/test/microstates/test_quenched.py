import numpy as np
import pytest

from soficlab.core.microstates import (
    ExplicitSampler,
    IidSampler,
    Microstate,
    dq_test,
    sampler_from_spec,
)
from soficlab.core.models import cyclic_model
from test.data.instances import AB, XY, constant_a, fair_coin


class TestSamplers:
    def test_iid_defaults_to_uniform(self):
        sampler = sampler_from_spec({"kind": "iid"}, AB)
        assert isinstance(sampler, IidSampler)
        assert sampler.base.tolist() == [0.5, 0.5]

    def test_iid_base(self):
        sampler = sampler_from_spec({"kind": "iid", "base": {"b": 1.0}}, AB)
        labels = sampler.sample(10, np.random.default_rng(0))
        assert labels.tolist() == [1] * 10
        assert sampler.spec() == {"kind": "iid", "base": {"a": 0.0, "b": 1.0}}

    def test_explicit(self):
        sampler = sampler_from_spec({"kind": "explicit", "labelings": ["ab", "bb"], "weights": [0.0, 1.0]}, AB)
        assert isinstance(sampler, ExplicitSampler)
        assert sampler.sample(2, np.random.default_rng(1)).tolist() == [1, 1]
        with pytest.raises(ValueError):
            sampler.sample(3, np.random.default_rng(1))

    @pytest.mark.parametrize(
        "spec",
        [
            {"kind": "gibbs"},
            {"kind": "explicit"},
            {"kind": "explicit", "labelings": ["ab", "abb"]},
            {"kind": "explicit", "labelings": ["ab"], "weights": [0.5]},
            {"kind": "iid", "base": {"a": 0.7, "b": 0.7}},
        ],
    )
    def test_bad_spec_raises(self, spec):
        with pytest.raises(ValueError):
            sampler_from_spec(spec, AB)


class TestDoublyQuenched:
    def test_fair_coin_concentrates(self):
        report = dq_test(cyclic_model(2048), IidSampler(AB), fair_coin, 3, 0.1, 200, seed=7)
        assert report.mass >= 0.95
        assert report.pooled_close
        assert report.pooled_upper == pytest.approx(report.pooled_lower + 0.25)

    def test_dirac_everything(self):
        model = cyclic_model(10)
        sampler = ExplicitSampler.dirac(Microstate.constant(model, AB, "a"))
        report = dq_test(model, sampler, constant_a, 2, 0.05, 5, seed=0)
        assert report.mass == 1.0
        assert report.pooled_lower == 0.0

    def test_vacuous_threshold(self):
        report = dq_test(cyclic_model(16), IidSampler(AB), fair_coin, 2, 1.5, 20, seed=2)
        assert report.mass == 1.0

    @pytest.mark.parametrize(("epsilon", "mass"), [(0.6, 1.0), (0.4, 0.0)])
    def test_dirac_sampler_is_one_fit(self, epsilon: float, mass: float):
        model = cyclic_model(4)
        sampler = ExplicitSampler.dirac(Microstate.from_symbols(model, AB, "abab"))
        # the paired labels are aa or bb, half a unit of mass away from uniform on four symbols
        report = dq_test(model, sampler, fair_coin, 1, epsilon, 3, seed=1)
        assert report.mean_fit == pytest.approx(0.5)
        assert report.mass == mass

    def test_jobs_do_not_change_the_report(self):
        model = cyclic_model(128)
        one = dq_test(model, IidSampler(AB), fair_coin, 2, 0.1, 12, seed=4)
        many = dq_test(model, IidSampler(AB), fair_coin, 2, 0.1, 12, seed=4, jobs=4)
        assert one == many

    def test_to_dict(self):
        out = dq_test(cyclic_model(8), IidSampler(AB), fair_coin, 1, 0.3, 4, seed=3).to_dict()
        assert set(out) == {
            "m",
            "epsilon",
            "criterion",
            "pairs",
            "seed",
            "good",
            "mass",
            "mean_fit",
            "pooled_lower",
            "pooled_upper",
            "pooled_close",
        }
        assert out["criterion"] == "window"

    def test_pairs_must_be_positive(self):
        with pytest.raises(ValueError):
            dq_test(cyclic_model(4), IidSampler(AB), fair_coin, 1, 0.1, 0, seed=0)

    def test_alphabet_mismatch_raises(self):
        with pytest.raises(ValueError):
            dq_test(cyclic_model(4), IidSampler(XY), fair_coin, 1, 0.1, 1, seed=0)
