import pytest

from mimo3d import flops as fl
from mimo3d.flops import CostConfig


def table_ii_config():
    return CostConfig(nt=128, v_a=16, v_e=8, m=8, s=2, n_rb=1, n_sc=12, n_pol=2)


class TestPrimitives:
    def test_gram_spot_values(self):
        assert fl.flops_gram(1, 1) == 1
        assert fl.flops_gram(2, 4) == 21

    def test_matmul_spot_value(self):
        assert fl.flops_matmul(2, 2, 2) == 12

    def test_scale_and_sum(self):
        assert fl.flops_scale(3, 5) == 15
        assert fl.flops_sum(3, 5) == 15

    def test_svd_spot_values(self):
        assert fl.flops_svd_sv(128, 128) == 31_457_280
        assert fl.flops_svd_sv(8, 8) == 7_680
        assert fl.flops_svd_su(2, 3) == 4 * 4 * 3 + 13 * 27

    def test_qr_integral_cases(self):
        # exact whenever n is a multiple of 3
        assert fl.flops_qr(4, 3) == 4 * (16 * 3 - 4 * 9 + 9)

    def test_non_negative_integers_on_grid(self):
        dims = [1, 2, 3, 5, 8, 13, 64, 127, 512]
        for m in dims:
            for n in dims:
                for fn in (fl.flops_gram, fl.flops_scale, fl.flops_sum,
                           fl.flops_svd_su, fl.flops_svd_sv):
                    v = fn(m, n)
                    assert isinstance(v, int) and v >= 0, (fn.__name__, m, n)
                assert fl.flops_matmul(m, n, 7) >= 0

    def test_rejects_nonpositive_dims(self):
        for fn in (fl.flops_gram, fl.flops_scale, fl.flops_sum,
                   fl.flops_qr, fl.flops_svd_su, fl.flops_svd_sv):
            with pytest.raises(ValueError):
                fn(0, 3)
        with pytest.raises(ValueError):
            fl.flops_matmul(2, -1, 2)


class TestCostConfig:
    def test_requires_consistent_shape(self):
        with pytest.raises(ValueError, match="v_a"):
            CostConfig(nt=10, v_a=3, v_e=3, m=2, s=1)

    def test_rejects_bad_pol_count(self):
        with pytest.raises(ValueError, match="n_pol"):
            CostConfig(nt=4, v_a=2, v_e=2, m=2, s=1, n_pol=3)


class TestCompositions:
    def test_direct_svd_term(self):
        b = fl.cost_direct(table_ii_config())
        assert b.counts["svd_sv"] == 31_457_280
        assert b.svd_calls == 1

    def test_direct_single_subcarrier_has_no_sums(self):
        cfg = CostConfig(nt=8, v_a=4, v_e=2, m=2, s=1, n_rb=1, n_sc=1)
        assert fl.cost_direct(cfg).counts["sum"] == 0

    def test_total_equals_sum_of_parts(self):
        for fn in (fl.cost_direct, fl.cost_method1, fl.cost_method2, fl.cost_method3):
            b = fn(table_ii_config())
            assert b.total == sum(b.counts.values())
            assert all(v >= 0 for v in b.counts.values())

    def test_direct_monotone_in_antennas(self):
        totals = [
            fl.cost_direct(CostConfig(nt=2 * n * n, v_a=2 * n, v_e=n, m=8, s=2)).total
            for n in (2, 4, 8, 16)
        ]
        assert all(b > a for a, b in zip(totals, totals[1:]))

    def test_svd_call_counts(self):
        cfg = table_ii_config()
        assert fl.cost_method1(cfg).svd_calls == 2
        assert fl.cost_method2(cfg).svd_calls == cfg.v_a + 1
        assert fl.cost_method3(cfg).svd_calls == cfg.n_pol + 1

    def test_headline_ratio_below_ten_percent(self):
        cfg = table_ii_config()
        direct = fl.cost_direct(cfg).total
        for fn in (fl.cost_method1, fl.cost_method2, fl.cost_method3):
            assert fn(cfg).total / direct < 0.10

    def test_method2_at_least_method1(self):
        for n in (2, 3, 4, 8, 16):
            cfg = CostConfig(nt=2 * n * n, v_a=2 * n, v_e=n, m=8, s=2)
            assert fl.cost_method2(cfg).total >= fl.cost_method1(cfg).total

    def test_method3_close_to_method1(self):
        cfg = table_ii_config()
        m1 = fl.cost_method1(cfg).total
        m2 = fl.cost_method2(cfg).total
        m3 = fl.cost_method3(cfg).total
        assert abs(m3 - m1) < m2 - m1

    def test_direct_asymptote_is_15_nt_cubed(self):
        errs = []
        for n in (16, 64, 256):
            cfg = CostConfig(nt=2 * n * n, v_a=2 * n, v_e=n, m=8, s=2)
            errs.append(abs(fl.cost_direct(cfg).total / cfg.nt**3 - 15.0))
        assert errs == sorted(errs, reverse=True)
        assert errs[-1] < 1e-3

    def test_ratio_non_increasing_along_square_sweep(self):
        ratios = []
        for n in range(2, 17):
            cfg = CostConfig(nt=2 * n * n, v_a=2 * n, v_e=n, m=8, s=2)
            ratios.append(fl.cost_method1(cfg).total / fl.cost_direct(cfg).total)
        assert all(b <= a for a, b in zip(ratios, ratios[1:]))

    def test_two_stage_total_small_in_block_dims(self):
        # everything except the s * nt recomposition term is polynomial in
        # the stage sizes, not in their product
        for n in (4, 8, 16, 32):
            cfg = CostConfig(nt=2 * n * n, v_a=2 * n, v_e=n, m=8, s=2)
            residual = fl.cost_method1(cfg).total - cfg.s * cfg.nt
            bound = 100 * cfg.n_sub * max(cfg.v_a, cfg.v_e, cfg.m) ** 3
            assert residual <= bound

    def test_breakdown_text_format(self):
        text = fl.cost_direct(table_ii_config()).to_text()
        lines = dict(line.split("=") for line in text.splitlines())
        assert set(lines) == set(fl.PRIMITIVES) | {"svd_calls", "total"}
        assert int(lines["total"]) == fl.cost_direct(table_ii_config()).total

    def test_dispatcher(self):
        cfg = table_ii_config()
        assert fl.cost_of("method2", cfg).total == fl.cost_method2(cfg).total
        with pytest.raises(ValueError, match="unknown"):
            fl.cost_of("method9", cfg)
