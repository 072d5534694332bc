from fractions import Fraction

import numpy as np
import pytest

from soficlab.core.groups import FreeGroup, LatticeGroup
from soficlab.core.oracles import (
    BernoulliOracle,
    BlockCode,
    BlockCodeOracle,
    CylinderOracle,
    MarkovOracle,
    bernoulli_oracle,
    consistency_gap,
    oracle_from_spec,
    power_oracle,
    product_oracle,
    stationary_distribution,
)
from test.data.instances import AB, Z, biased_coin, exact_coin, fair_coin, sticky_chain

XOR = {"aa": "x", "ab": "y", "ba": "y", "bb": "x"}

skewed_chain = MarkovOracle(Z, AB, [[0.5, 0.5], [1.0, 0.0]])


def _all_kinds() -> list[CylinderOracle]:
    return [
        fair_coin,
        biased_coin,
        sticky_chain,
        skewed_chain,
        BlockCodeOracle(sticky_chain, BlockCode.from_dict(AB, 2, XOR)),
        product_oracle(fair_coin, sticky_chain),
        power_oracle(biased_coin, 2),
        bernoulli_oracle(FreeGroup(2), {"a": 0.3, "b": 0.7}),
    ]


class TestBernoulli:
    def test_exact_marginal(self):
        d = exact_coin.marginal(3)
        assert d.exact
        assert len(d) == 8
        assert all(p == Fraction(1, 8) for p in d.mass.values())

    def test_degenerate_base(self):
        d = biased_coin.marginal(2)
        assert d.get((1, 1)) == pytest.approx(0.5625)
        constant = bernoulli_oracle(Z, {"a": 1.0, "b": 0.0})
        assert constant.marginal(4).support() == [(0, 0, 0, 0)]

    @pytest.mark.parametrize("base", [[0.5], [0.7, 0.7], [1.5, -0.5]])
    def test_bad_base_raises(self, base):
        with pytest.raises(ValueError):
            BernoulliOracle(Z, AB, base)

    def test_marginal_is_cached(self):
        oracle = bernoulli_oracle(Z, {"a": 0.5, "b": 0.5})
        assert oracle.marginal(3) is oracle.marginal(3)

    @pytest.mark.parametrize("elements", [[], [0, 0], ["a"]])
    def test_bad_elements_raise(self, elements):
        with pytest.raises(ValueError):
            fair_coin.marginal_at(elements)


class TestMarkov:
    def test_two_window_of_sticky_chain(self):
        mass = sticky_chain.marginal(2).mass
        assert set(mass) == {(0, 0), (0, 1), (1, 0), (1, 1)}
        assert mass[(0, 0)] == pytest.approx(0.45)
        assert mass[(0, 1)] == pytest.approx(0.05)
        assert mass[(1, 0)] == pytest.approx(0.05)
        assert mass[(1, 1)] == pytest.approx(0.45)

    def test_stationary_distribution(self):
        assert stationary_distribution(np.array([[0.5, 0.5], [1.0, 0.0]])) == pytest.approx(
            [2 / 3, 1 / 3]
        )

    def test_gaps_use_matrix_powers(self):
        # P^2 of the skewed chain has P^2(b, b) = 0.5
        d = skewed_chain.marginal_at([0, 2])
        assert d.get((1, 1)) == pytest.approx(1 / 3 * 0.5)

    def test_marginal_follows_requested_order(self):
        forward = skewed_chain.marginal_at([0, 1])
        backward = skewed_chain.marginal_at([1, 0])
        for (s, t), p in forward.mass.items():
            assert backward.get((t, s)) == pytest.approx(p)
        # b is never followed by b
        assert backward.get((1, 1)) == 0

    def test_window_three_reads_zero_one_minus_one(self):
        d = skewed_chain.marginal(3)
        # pattern (x0, x1, x-1) = (a, b, b) needs x-1 = b then x0 = a, then x1 = b
        assert d.get((0, 1, 1)) == pytest.approx(1 / 3 * 1.0 * 0.5)

    def test_only_on_the_integers(self):
        with pytest.raises(ValueError):
            MarkovOracle(FreeGroup(1), AB, [[0.5, 0.5], [0.5, 0.5]])

    @pytest.mark.parametrize(
        ("transition", "stationary"),
        [
            ([[0.9, 0.2], [0.1, 0.9]], None),
            ([[0.9, 0.1]], None),
            ([[0.9, 0.1], [0.1, 0.9]], [1.0, 0.0]),
        ],
    )
    def test_bad_chain_raises(self, transition, stationary):
        with pytest.raises(ValueError):
            MarkovOracle(Z, AB, transition, stationary)


class TestOracleLaws:
    @pytest.mark.parametrize("oracle", _all_kinds(), ids=lambda o: o.kind)
    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_consistency(self, oracle: CylinderOracle, m: int):
        assert consistency_gap(oracle, m) <= 1e-9

    @pytest.mark.parametrize("oracle", _all_kinds()[:7], ids=lambda o: o.kind)
    @pytest.mark.parametrize("shift", [1, -3, 5])
    def test_shift_invariance(self, oracle: CylinderOracle, shift: int):
        window = Z.enumerate(3)
        moved = oracle.marginal_at([g + shift for g in window])
        assert moved.total_variation(oracle.marginal(3)) <= 1e-12

    def test_shift_invariance_on_the_lattice(self):
        oracle = bernoulli_oracle(LatticeGroup(2), {"a": 0.2, "b": 0.8})
        code = BlockCode.from_dict(AB, 2, XOR)
        factor = BlockCodeOracle(oracle, code)
        window = LatticeGroup(2).enumerate(3)
        moved = factor.marginal_at([(x + 2, y - 1) for x, y in window])
        assert moved.total_variation(factor.marginal(3)) <= 1e-12

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_tensor_law(self, m: int):
        joint = product_oracle(biased_coin, sticky_chain).marginal(m)
        assert joint.isclose(biased_coin.marginal(m).tensor(sticky_chain.marginal(m)))
        left, right = joint.unpair()
        assert left.isclose(biased_coin.marginal(m))
        assert right.isclose(sticky_chain.marginal(m))

    def test_product_group_mismatch_raises(self):
        with pytest.raises(ValueError):
            product_oracle(fair_coin, bernoulli_oracle(FreeGroup(2), {"a": 1.0}))

    def test_power(self):
        squared = power_oracle(exact_coin, 2)
        assert squared.alphabet.size == 4
        assert squared.marginal(1).get((3,)) == Fraction(1, 4)
        assert power_oracle(fair_coin, 1) is fair_coin
        with pytest.raises(ValueError):
            power_oracle(fair_coin, 0)


class TestOracleSpec:
    @pytest.mark.parametrize("oracle", _all_kinds()[:7], ids=lambda o: o.kind)
    def test_spec_round_trip(self, oracle: CylinderOracle):
        rebuilt = oracle_from_spec(oracle.spec(), Z)
        assert rebuilt.alphabet == oracle.alphabet
        assert rebuilt.marginal(3).total_variation(oracle.marginal(3)) <= 1e-9

    def test_markov_alphabet_defaults_to_letters(self):
        oracle = oracle_from_spec({"kind": "markov", "transition": [[0.9, 0.1], [0.1, 0.9]]}, Z)
        assert oracle.alphabet == AB

    def test_power_spec(self):
        spec = {"kind": "power", "n": 3, "oracle": {"kind": "bernoulli", "base": {"a": 1.0}}}
        assert oracle_from_spec(spec, Z).alphabet.size == 1

    @pytest.mark.parametrize(
        "spec",
        [
            {"kind": "gibbs"},
            {"kind": "bernoulli"},
            {"kind": "markov"},
            {"kind": "block_code", "window": 1, "code": {"a": "x"}},
            {"kind": "power", "oracle": {"kind": "bernoulli", "base": {"a": 1.0}}},
        ],
    )
    def test_bad_spec_raises(self, spec):
        with pytest.raises(ValueError):
            oracle_from_spec(spec, Z)
