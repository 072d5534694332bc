import pytest

from soficlab.core.groups import FreeGroup, IntegerGroup
from soficlab.core.microstates import (
    Microstate,
    approximability_trace,
    diagonal_construction,
    diagonal_sequence,
    power_trace,
    sofic_witness,
    weak_containment_witness,
)
from soficlab.core.models import SoficApproximationSeq, cyclic_model, table_model
from soficlab.core.oracles import (
    Alphabet,
    ObservableTower,
    SymbolMap,
    bernoulli_oracle,
)
from test.data.instances import AB, XY, Z, constant_a, fair_coin, sticky_chain

ABCD = Alphabet.of("abcd")
PQ = Alphabet.of("pq")


class TestTrace:
    def test_dirac_target_passes_everywhere(self):
        trace = approximability_trace([cyclic_model(n) for n in (4, 8, 16)], constant_a, 2, 0.01)
        assert [row.fit_lower for row in trace.rows] == [0.0, 0.0, 0.0]
        assert trace.eventually_from == 0
        assert trace.subsequence == [0, 1, 2]

    def test_fair_coin_on_growing_cycles(self):
        seq = SoficApproximationSeq.of(cyclic_model(n) for n in (64, 256, 1024, 4096))
        trace = approximability_trace(seq, fair_coin, 2, 0.1, seed=1)
        assert all(row.passed for row in trace.rows)
        assert trace.to_dict()["all_eventually"] is True

    def test_identity_models_only_pass_on_a_subsequence(self):
        group = IntegerGroup()
        seq = [cyclic_model(256), table_model(group, 256), cyclic_model(512), table_model(group, 512)]
        trace = approximability_trace(seq, fair_coin, 2, 0.1, budget=2000, seed=5)
        # every window of an identity model is aa or bb, a quarter unit from uniform
        assert [row.passed for row in trace.rows] == [True, False, True, False]
        assert trace.eventually_from is None
        out = trace.to_dict()
        assert out["subsequence"] == [0, 2]
        assert out["pass_on_subsequence"] is True
        assert out["all_eventually"] is False

    def test_jobs_do_not_change_the_trace(self):
        seq = [cyclic_model(n) for n in (32, 64, 128)]
        one = approximability_trace(seq, sticky_chain, 2, 0.02, budget=300, seed=4)
        many = approximability_trace(seq, sticky_chain, 2, 0.02, budget=300, seed=4, jobs=3)
        assert one.to_dict() == many.to_dict()

    def test_power_trace(self):
        traces = power_trace([cyclic_model(64), cyclic_model(128)], fair_coin, 2, 1, 0.2, seed=2)
        assert sorted(traces) == [1, 2]
        assert all(len(trace.rows) == 2 for trace in traces.values())
        with pytest.raises(ValueError):
            power_trace([cyclic_model(4)], fair_coin, 0, 1, 0.2)


def _tower() -> ObservableTower:
    down = SymbolMap.from_dict(ABCD, XY, {"a": "x", "b": "x", "c": "y", "d": "y"})
    relabel = SymbolMap.from_dict(XY, PQ, {"x": "p", "y": "q"})
    return ObservableTower.from_steps([PQ, XY, ABCD], [relabel, down])


def _tower_oracles():
    return [
        bernoulli_oracle(Z, {"p": 0.5, "q": 0.5}),
        bernoulli_oracle(Z, {"x": 0.5, "y": 0.5}),
        bernoulli_oracle(Z, {s: 0.25 for s in "abcd"}),
    ]


class TestDiagonal:
    def test_three_levels_pass(self):
        report = diagonal_construction(
            _tower(), _tower_oracles(), [cyclic_model(512)] * 3, 2, seed=3
        )
        assert report.passed
        assert len(report.cells) == 3
        assert [cell.bound for cell in report.cells][:1] == pytest.approx(
            [0.5 + report.fits[1].value]
        )

    def test_single_level_passes_trivially(self):
        tower = ObservableTower.from_steps([AB], [])
        tau = Microstate.from_symbols(cyclic_model(4), AB, "abab")
        report = diagonal_sequence(tower, [tau], [fair_coin], [0.5], 2)
        assert report.cells == []
        assert report.passed

    def test_identity_projection_transfers_the_fit(self):
        tower = ObservableTower.from_steps([AB, AB], [SymbolMap.identity(AB)])
        model = cyclic_model(6)
        tau1 = Microstate.from_symbols(model, AB, "aaaaaa")
        tau2 = Microstate.from_symbols(model, AB, "aabbab")
        report = diagonal_sequence(tower, [tau1, tau2], [fair_coin, fair_coin], [1.0, 0.5], 2)
        (cell,) = report.cells
        assert cell.value == pytest.approx(report.fits[1].value)
        assert cell.passed

    def test_length_mismatch_raises(self):
        tau = Microstate.from_symbols(cyclic_model(4), AB, "abab")
        with pytest.raises(ValueError):
            diagonal_sequence(_tower(), [tau], [fair_coin], [0.5], 2)

    def test_alphabet_mismatch_raises(self):
        tower = ObservableTower.from_steps([XY, AB], [SymbolMap.from_dict(AB, XY, {"a": "x", "b": "y"})])
        tau = Microstate.from_symbols(cyclic_model(2), AB, "ab")
        with pytest.raises(ValueError):
            diagonal_sequence(tower, [tau, tau], [fair_coin, fair_coin], [1.0, 0.5], 1)

    def test_to_dict(self):
        out = diagonal_construction(
            _tower(), _tower_oracles(), [cyclic_model(64)] * 3, 1, seed=0
        ).to_dict()
        assert [level["level"] for level in out["levels"]] == [1, 2, 3]
        assert [(c["i"], c["j"]) for c in out["cells"]] == [(2, 1), (3, 1), (3, 2)]


class TestWeakContainment:
    def test_identity_code(self):
        witness = weak_containment_witness(fair_coin, fair_coin, 2, 0.01)
        assert witness is not None
        assert witness.exhaustive
        assert witness.code.to_dict()["code"] == {"a": "a", "b": "b"}
        assert witness.certificate.value == pytest.approx(0.0)

    def test_constant_code_for_a_dirac(self):
        witness = weak_containment_witness(constant_a, sticky_chain, 3, 0.01)
        assert witness is not None
        assert witness.evaluations == 1
        assert witness.certificate.value == 0.0

    def test_relabeling(self):
        target = bernoulli_oracle(Z, {"x": 0.5, "y": 0.5})
        witness = weak_containment_witness(target, fair_coin, 2, 0.01)
        assert witness is not None
        assert witness.code.to_dict()["code"] == {"a": "x", "b": "y"}

    def test_no_window_one_code_makes_a_chain_from_a_coin(self):
        assert weak_containment_witness(sticky_chain, fair_coin, 2, 0.01) is None

    def test_greedy_when_the_budget_is_small(self):
        witness = weak_containment_witness(fair_coin, fair_coin, 1, 1.0, window=2, budget=10)
        assert witness is not None
        assert not witness.exhaustive

    def test_bad_inputs_raise(self):
        with pytest.raises(ValueError):
            weak_containment_witness(fair_coin, fair_coin, 1, 0.1, window=0)
        with pytest.raises(ValueError):
            weak_containment_witness(fair_coin, bernoulli_oracle(FreeGroup(2), {"a": 1.0}), 1, 0.1)


class TestSoficWitness:
    def test_first_good_model_with_a_close_microstate(self):
        seq = [cyclic_model(n) for n in (2, 4, 64, 128)]
        witness = sofic_witness(seq, fair_coin, 4, 2, seed=6)
        assert witness is not None
        # -1 and 1 coincide mod 2, so the first model is never 4-good
        assert witness.index in (1, 2)
        assert witness.report.passed
        assert witness.search.certificate.value <= 0.25 + 1e-9
        assert set(witness.to_dict()) == {"index", "goodness", "search"}

    def test_none_without_good_models(self):
        assert sofic_witness([cyclic_model(1)] * 3, fair_coin, 2, 1) is None
