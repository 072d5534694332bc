import json

import pytest

from soficlab.cli.config import SEED_ENV, ConfigError, ExperimentConfig, load_config
from soficlab.core.groups import FreeGroup, IntegerGroup
from soficlab.core.transport import Criterion

FAIR = {"kind": "bernoulli", "base": {"a": 0.5, "b": 0.5}}
CYCLE = {"kind": "cyclic", "n": 8}


def _search(**overrides) -> dict:
    data = {"op": "search", "model": CYCLE, "oracle": FAIR, "m": 2, "epsilon": 0.1, "seed": 1}
    data.update(overrides)
    return {k: v for k, v in data.items() if v is not None}


def _field_of(data: dict, env: dict | None = None) -> str:
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_dict(data, env or {}).build()
    return e.value.field


class TestParse:
    def test_defaults(self):
        config = ExperimentConfig.from_dict(_search(), {})
        assert config.criterion is Criterion.WINDOW
        assert config.mode == "exact"
        assert config.window == 1
        assert config.budget_or_default == 100_000

    def test_witness_budget_default(self):
        data = {"op": "witness", "oracle": FAIR, "source": FAIR, "m": 1, "epsilon": 0.1}
        assert ExperimentConfig.from_dict(data, {}).budget_or_default == 10_000

    @pytest.mark.parametrize(
        ("data", "field"),
        [
            (_search(colour="red"), "colour"),
            (_search(op="walk"), "op"),
            (_search(m=None), "m"),
            (_search(oracle=None), "oracle"),
            (_search(m=0), "m"),
            (_search(m=True), "m"),
            (_search(epsilon=0), "epsilon"),
            (_search(epsilon="0.1"), "epsilon"),
            (_search(seed=-3), "seed"),
            (_search(criterion="lower"), "criterion"),
            (_search(mode="guess"), "mode"),
            (_search(model=[CYCLE]), "model"),
            ({"op": "trace", "sequence": [], "oracle": FAIR, "m": 1, "epsilon": 0.1, "seed": 0}, "sequence"),
            ({"op": "diagonal", "tower": {}, "oracles": [FAIR], "sequence": [CYCLE], "m": 1,
              "epsilons": [0.1, -1], "seed": 0}, "epsilons"),
        ],
    )
    def test_bad_fields(self, data, field):
        assert _field_of(data) == field

    def test_root_must_be_an_object(self):
        with pytest.raises(ConfigError) as e:
            ExperimentConfig.from_dict([1, 2], {})
        assert e.value.field == "<root>"

    def test_goodness_needs_exactly_one_target(self):
        assert _field_of({"op": "goodness", "k": 3}) == "model"
        both = {"op": "goodness", "model": CYCLE, "sequence": [CYCLE], "k": 3}
        assert _field_of(both) == "model"
        assert _field_of({"op": "goodness", "model": CYCLE}) == "k"
        assert _field_of({"op": "goodness", "sequence": [CYCLE], "k": 3}) == "k_max"

    def test_message_names_the_field(self):
        with pytest.raises(ConfigError, match="^colour: unknown field$"):
            ExperimentConfig.from_dict(_search(colour="red"), {})


class TestSeed:
    def test_config_seed_wins(self):
        config = ExperimentConfig.from_dict(_search(seed=4), {SEED_ENV: "9"})
        assert config.seed == 4

    def test_environment_fallback(self):
        config = ExperimentConfig.from_dict(_search(seed=None), {SEED_ENV: "9"})
        assert config.seed == 9
        assert config.to_dict()["seed"] == 9

    def test_randomized_op_without_a_seed(self):
        assert _field_of(_search(seed=None)) == "seed"

    @pytest.mark.parametrize("value", ["nine", "-1"])
    def test_bad_environment_seed(self, value):
        assert _field_of(_search(seed=None), {SEED_ENV: value}) == "seed"

    def test_blank_environment_seed_is_unset(self):
        assert _field_of(_search(seed=None), {SEED_ENV: "  "}) == "seed"

    def test_exact_entropy_needs_no_seed(self):
        data = {"op": "entropy", "model": CYCLE, "oracle": FAIR, "m": 1, "epsilon": 0.1}
        assert ExperimentConfig.from_dict(data, {}).seed is None
        assert _field_of(dict(data, mode="montecarlo")) == "seed"

    def test_echo_is_the_input(self):
        data = _search()
        assert ExperimentConfig.from_dict(data, {}).to_dict() == data


class TestWarnings:
    def test_unattainable_upper_threshold(self):
        (warning,) = ExperimentConfig.from_dict(_search(m=3), {}).warnings()
        assert warning.startswith("epsilon=0.1 <= 1/(m+1)=0.25")
        assert warning.endswith("raise m to at least 10")

    def test_no_warning_above_the_floor(self):
        assert ExperimentConfig.from_dict(_search(m=3, epsilon=0.3), {}).warnings() == []

    def test_per_level_epsilons(self):
        data = {
            "op": "diagonal",
            "tower": {"alphabets": ["ab"]},
            "oracles": [FAIR],
            "sequence": [CYCLE],
            "m": 1,
            "epsilons": [0.6, 0.5],
            "seed": 0,
        }
        (warning,) = ExperimentConfig.from_dict(data, {}).warnings()
        assert warning.startswith("epsilons[1]=0.5")


class TestBuild:
    def test_search(self):
        exp = ExperimentConfig.from_dict(_search(), {}).build()
        assert exp.group == IntegerGroup()
        assert exp.model is not None and exp.model.size == 8
        assert exp.oracle is not None and exp.oracle.alphabet.symbols == ("a", "b")

    def test_explicit_group_builds_oracles_over_it(self):
        data = _search(group={"family": "free", "rank": 2}, model={"kind": "free_random", "rank": 2, "n": 20, "seed": 0})
        exp = ExperimentConfig.from_dict(data, {}).build()
        assert exp.group == FreeGroup(2)
        assert exp.oracle is not None and exp.oracle.group == FreeGroup(2)

    def test_group_mismatch(self):
        data = _search(
            group={"family": "integers"}, model={"kind": "free_random", "rank": 2, "n": 20, "seed": 0}
        )
        assert _field_of(data) == "model"

    @pytest.mark.parametrize(
        ("data", "field"),
        [
            (_search(model={"kind": "sphere"}), "model"),
            (_search(oracle={"kind": "bernoulli", "base": {"a": 0.9, "b": 0.9}}), "oracle"),
            ({"op": "trace", "sequence": [{"kind": "cyclic", "n": 8}, {"kind": "cyclic"}],
              "oracle": FAIR, "m": 1, "epsilon": 0.1, "seed": 0}, "sequence[1]"),
            ({"op": "trace", "sequence": [{"kind": "cyclic", "n": 8}, {"kind": "cyclic", "n": 4}],
              "oracle": FAIR, "m": 1, "epsilon": 0.1, "seed": 0}, "sequence"),
            ({"op": "fit", "model": CYCLE, "oracle": FAIR, "microstate": "abcabcab", "m": 1}, "microstate"),
            ({"op": "fit", "model": CYCLE, "oracle": FAIR, "microstate": "abab", "m": 1}, "microstate"),
            ({"op": "distance", "distributions": [{"m": 1, "alphabet": "ab", "mass": {"a": 1.0}}]},
             "distributions"),
            ({"op": "product_check", "microstates": [{"model": CYCLE, "alphabet": "ab"}], "m": 1},
             "microstates[0]"),
            (_search(op="dq", pairs=3, sampler={"kind": "gibbs"}), "sampler"),
        ],
    )
    def test_bad_specs(self, data, field):
        assert _field_of(data) == field

    def test_diagonal_lengths_must_match(self):
        data = {
            "op": "diagonal",
            "tower": {"alphabets": ["ab", "abcd"], "steps": [{"a": "a", "b": "a", "c": "b", "d": "b"}]},
            "oracles": [FAIR],
            "sequence": [CYCLE, CYCLE],
            "m": 1,
            "seed": 0,
        }
        assert _field_of(data) == "oracles"

    def test_tower_steps_must_match_the_levels(self):
        data = {
            "op": "diagonal",
            "tower": {"alphabets": ["ab", "abcd"], "steps": []},
            "oracles": [FAIR, FAIR],
            "sequence": [CYCLE, CYCLE],
            "m": 1,
            "seed": 0,
        }
        assert _field_of(data) == "tower"

    def test_exact_entropy_too_large(self):
        data = {"op": "entropy", "model": {"kind": "cyclic", "n": 25}, "oracle": FAIR, "m": 1, "epsilon": 0.1}
        assert _field_of(data) == "mode"
        exp = ExperimentConfig.from_dict(dict(data, mode="montecarlo", seed=0), {}).build()
        assert exp.model is not None

    def test_distributions_share_an_inferred_alphabet(self):
        data = {
            "op": "distance",
            "distributions": [{"m": 1, "mass": {"a": 1.0}}, {"m": 1, "mass": {"c": 1.0}}],
        }
        d1, d2 = ExperimentConfig.from_dict(data, {}).build().distributions
        assert d1.alphabet.symbols == ("a", "c")
        assert d2.alphabet == d1.alphabet

    def test_comma_patterns_need_an_alphabet(self):
        data = {
            "op": "distance",
            "distributions": [{"m": 2, "mass": {"x,y": 1.0}}, {"m": 2, "mass": {"y,x": 1.0}}],
        }
        assert _field_of(data) == "distributions"

    def test_product_check(self):
        data = {
            "op": "product_check",
            "microstates": [
                {"model": {"kind": "cyclic", "n": 3}, "alphabet": "ab", "labels": "aab"},
                {"model": {"kind": "cyclic", "n": 2}, "alphabet": ["x", "y"], "labels": ["y", "x"]},
            ],
            "m": 1,
        }
        tau1, tau2 = ExperimentConfig.from_dict(data, {}).build().microstates
        assert tau1.format() == "aab"
        assert tau2.symbols() == ["y", "x"]


class TestLoadConfig:
    def test_reads_json(self, tmp_path):
        path = tmp_path / "search.json"
        path.write_text(json.dumps(_search()), encoding="utf-8")
        assert load_config(path, {}).op == "search"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError) as e:
            load_config(tmp_path / "missing.json", {})
        assert e.value.field == "<file>"

    def test_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"op": "search",\n  "m": }', encoding="utf-8")
        with pytest.raises(ConfigError, match="line 2") as e:
            load_config(path, {})
        assert e.value.field == "<json>"
