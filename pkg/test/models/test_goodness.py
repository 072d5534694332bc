import itertools
from fractions import Fraction

import numpy as np
import polars as pl
import pytest
from polars import testing as pl_testing

from soficlab.core.groups import IntegerGroup
from soficlab.core.models import (
    FiniteModel,
    GoodnessReport,
    Permutation,
    SoficApproximationSeq,
    cyclic_model,
    free_random_model,
    goodness,
    product_model,
    sequence_goodness,
    table_model,
)


class TestGoodness:
    def test_cyclic_sixteen_is_five_good(self):
        report = goodness(cyclic_model(16), 5)
        assert report.passed
        assert report.separation_min == 1
        assert report.defect_max == 0

    def test_collision_fails(self):
        # 2 and -1 coincide mod 3
        report = goodness(cyclic_model(3), 4)
        assert not report.passed
        assert report.separation_min == 0

    def test_all_identity_table_fails(self):
        report = goodness(table_model(IntegerGroup(), 5), 2)
        assert not report.passed
        assert report.separation_min == 0

    def test_involution_table_has_no_defect(self):
        swap = Permutation([1, 0, 2, 3])
        model = table_model(IntegerGroup(), 4, {1: swap, -1: swap})
        # unlisted 2 and -2 act as the identity, which is swap o swap
        report = goodness(model, 3)
        assert report.defect_max == 0
        assert report.separation_min == Fraction(0)

    def test_defect_is_exact(self):
        rotate = Permutation([1, 2, 3, 0])
        model = table_model(IntegerGroup(), 4, {1: rotate, -1: rotate})
        report = goodness(model, 3)
        # sigma^1 o sigma^-1 moves every point, sigma^0 is the identity
        assert report.defect_max == 1
        assert not report.passed

    def test_single_element_window(self):
        report = goodness(cyclic_model(1), 1)
        assert report.separation_min == 1
        assert report.passed

    def test_to_dict(self):
        assert GoodnessReport(3, Fraction(1), Fraction(0)).to_dict() == {
            "k": 3,
            "pass": True,
            "separation_min": 1.0,
            "defect_max": 0.0,
        }

    @pytest.mark.parametrize("k", range(1, 11))
    def test_cyclic_sixty_four(self, k: int):
        report = goodness(cyclic_model(64), k)
        assert report.passed
        assert report.separation_min == 1
        assert report.defect_max == 0

    def test_free_random_is_four_good_for_most_seeds(self):
        passed = [goodness(free_random_model(2, 500, seed), 4).passed for seed in range(1, 21)]
        assert sum(passed) >= 18

    def test_product_with_one_point_model(self):
        base = cyclic_model(9)
        prod = product_model(base, cyclic_model(1))
        for k in range(1, 6):
            assert goodness(prod, k) == goodness(base, k)

    def test_product_separation_dominates_factors(self):
        rng = np.random.default_rng(11)
        group = IntegerGroup()
        elements = group.enumerate(4)

        def random_table(n: int) -> FiniteModel:
            return table_model(
                group, n, {g: Permutation(rng.permutation(n)) for g in elements[1:]}
            )

        for _ in range(20):
            m1 = random_table(int(rng.integers(1, 5)))
            m2 = random_table(int(rng.integers(1, 5)))
            prod = product_model(m1, m2)
            for g, h in itertools.combinations(elements, 2):
                coincide_prod = np.count_nonzero(prod.evaluate(g).image == prod.evaluate(h).image)
                for factor in (m1, m2):
                    share = np.count_nonzero(factor.evaluate(g).image == factor.evaluate(h).image)
                    # the coincidence set of the product is the product of the factor sets
                    assert coincide_prod * factor.size <= share * prod.size


class TestSequence:
    def test_dyadic_cyclic_sequence(self):
        seq = SoficApproximationSeq.of(cyclic_model(2**i) for i in range(1, 11))
        result = sequence_goodness(seq, 8)
        for k in range(1, 9):
            assert result.attained[k] is not None
        # 0, 1, -1, 2, -2, 3, -3, 4 are distinct mod 8 but not mod 4
        assert result.attained[8] == 2

    def test_trivial_sequence_never_attains_two(self):
        seq = [cyclic_model(1)] * 4
        result = sequence_goodness(seq, 2)
        assert result.attained[1] == 0
        assert result.attained[2] is None

    def test_to_frame(self):
        result = sequence_goodness([cyclic_model(2), cyclic_model(4)], 2)
        expected = pl.DataFrame(
            {
                "index": [0, 0, 1, 1],
                "n": [2, 2, 4, 4],
                "k": [1, 2, 1, 2],
                "pass": [True, True, True, True],
                "separation_min": [1.0, 1.0, 1.0, 1.0],
                "defect_max": [0.0, 0.0, 0.0, 0.0],
            },
            schema={
                "index": pl.Int64,
                "n": pl.Int64,
                "k": pl.Int64,
                "pass": pl.Boolean,
                "separation_min": pl.Float64,
                "defect_max": pl.Float64,
            },
        )
        pl_testing.assert_frame_equal(result.to_frame(), expected)

    def test_sizes_must_not_decrease(self):
        with pytest.raises(ValueError, match="nondecreasing"):
            SoficApproximationSeq([cyclic_model(4), cyclic_model(2)])

    def test_groups_must_agree(self):
        with pytest.raises(ValueError):
            SoficApproximationSeq([cyclic_model(4), free_random_model(2, 4, seed=0)])

    def test_free_random_sequence(self):
        seq = [free_random_model(2, 100 * 2**i, seed=i) for i in range(4)]
        result = sequence_goodness(seq, 4)
        assert result.attained[4] is not None
        assert result.to_dict()["sizes"] == [100, 200, 400, 800]
