import numpy as np
import pytest

from spde_parareal.experiments import (
    CostModel,
    ErrorRow,
    ErrorTable,
    ExperimentConfig,
    cost_parareal,
    cost_ref,
    efficiency,
    fit_order,
    monte_carlo_errors,
    predicted_order,
)
from spde_parareal.integrators import CoarseKind
from spde_parareal.spectral import Nonlinearity

EXPO = CoarseKind.EXPONENTIAL_EULER
IMP = CoarseKind.LINEAR_IMPLICIT_EULER
ZERO = Nonlinearity.zero()


def power_law_table(dTs, order, scale=1.0, jitter=None):
    rows = []
    for j, dT in enumerate(dTs):
        e = scale * dT**order
        if jitter is not None:
            e *= jitter[j]
        rows.append(ErrorRow(0, j + 1, dT, e, e, 0.0))
    return ErrorTable(rows, 1, 1.0)


class TestFitOrder:
    def test_exact_power_law(self):
        dTs = [2.0**-j for j in range(4, 10)]
        table = power_law_table(dTs, 0.25, scale=3.7)
        assert fit_order(table, 0) == pytest.approx(0.25, abs=1e-12)

    def test_jittered_quadratic(self):
        rng = np.random.default_rng(0)
        dTs = [2.0**-j for j in range(3, 11)]
        jitter = 1.0 + 0.01 * rng.standard_normal(len(dTs))
        table = power_law_table(dTs, 2.0, jitter=jitter)
        assert fit_order(table, 0) == pytest.approx(2.0, abs=0.05)

    def test_zero_column_rejected(self):
        dTs = [0.5, 0.25, 0.125]
        table = ErrorTable([ErrorRow(0, j + 1, dT, 0.0, 0.0, 0.0)
                            for j, dT in enumerate(dTs)], 1, 1.0)
        with pytest.raises(ValueError):
            fit_order(table, 0)

    def test_too_few_points_rejected(self):
        table = power_law_table([0.5, 0.25], 1.0)
        with pytest.raises(ValueError):
            fit_order(table, 0)


class TestPredictedOrder:
    def test_implicit_saturates_at_alpha(self):
        assert predicted_order(IMP, 0.25, 3) == 0.25

    def test_implicit_staircase(self):
        assert predicted_order(IMP, 4.0, 2) == 3.0

    def test_exponential_base(self):
        assert predicted_order(EXPO, 0.25, 1) == 0.5

    def test_exponential_improved(self):
        # (k-1) min(2 abar, 1/2) + 2 min(abar, 1/2) at abar = 0.25, k = 2
        assert predicted_order(EXPO, 0.25, 2, regime="improved") == 1.0

    def test_improved_needs_k_at_least_two(self):
        with pytest.raises(ValueError):
            predicted_order(EXPO, 0.25, 1, regime="improved")

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            predicted_order(IMP, 0.25, -1)
        with pytest.raises(ValueError):
            predicted_order(IMP, 0.0, 1)
        with pytest.raises(ValueError):
            predicted_order(EXPO, 0.25, 2, regime="best")

    def test_implicit_monotone_capped(self):
        for abar in [0.25, 0.5, 2.5, 4.0]:
            vals = [predicted_order(IMP, abar, k) for k in range(6)]
            assert all(b >= a for a, b in zip(vals, vals[1:]))
            assert max(vals) <= abar

    def test_exponential_strictly_increasing(self):
        for abar in [0.25, 0.5, 1.0]:
            vals = [predicted_order(EXPO, abar, k) for k in range(6)]
            assert all(b > a for a, b in zip(vals, vals[1:]))


class TestCostModel:
    def test_initialization_only(self):
        m = CostModel(2.0, 1.0, 8, 0, 1.0, 0.125, 0.0625)
        assert cost_parareal(m) == pytest.approx((1.0 / 0.125) * 2.0, rel=1e-14)

    def test_sixteen_processor_arithmetic(self):
        m = CostModel(1.0, 1.0, 16, 1, 1.0, 2.0**-4, 2.0**-13)
        assert cost_parareal(m) == pytest.approx(544.0, rel=1e-14)
        assert cost_ref(m) == pytest.approx(8192.0, rel=1e-14)

    def test_doubling_nproc_halves_fine_term(self):
        m1 = CostModel(1.0, 1.0, 4, 2, 1.0, 0.25, 0.03125)
        m2 = CostModel(1.0, 1.0, 8, 2, 1.0, 0.25, 0.03125)
        coarse = (m1.K + 1) * (m1.T / m1.dT) * m1.tau_coarse
        assert (cost_parareal(m1) - coarse) == pytest.approx(
            2.0 * (cost_parareal(m2) - coarse), rel=1e-14)

    def test_efficiency_identity_random_models(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            m = CostModel(float(rng.uniform(0.1, 10)), float(rng.uniform(0.1, 10)),
                          int(rng.integers(1, 64)), int(rng.integers(1, 8)),
                          1.0, float(rng.uniform(0.01, 0.5)),
                          float(rng.uniform(1e-5, 1e-3)))
            assert efficiency(m) * cost_parareal(m) == pytest.approx(
                cost_ref(m), rel=1e-12)

    def test_limit_is_nproc_over_k(self):
        # as dt/dT -> 0 the coarse term vanishes and E -> N_proc/K
        for n_proc, K in [(16, 1), (16, 2), (7, 7)]:
            m = CostModel(1.0, 1.0, n_proc, K, 1.0, 0.1, 0.1 * 1e-9)
            assert efficiency(m) == pytest.approx(n_proc / K, rel=1e-6)

    def test_invalid_model(self):
        with pytest.raises(ValueError):
            CostModel(0.0, 1.0, 4, 1, 1.0, 0.1, 0.01)
        with pytest.raises(ValueError):
            CostModel(1.0, 1.0, 0, 1, 1.0, 0.1, 0.01)
        with pytest.raises(ValueError):
            CostModel(1.0, 1.0, 4, -1, 1.0, 0.1, 0.01)


def small_cfg(kind=EXPO, nonlin=ZERO, alpha_bar=0.25, n_modes=6, dt_exponent=7):
    return ExperimentConfig(alpha_bar, n_modes, 1.0, dt_exponent, kind, nonlin)


class TestMonteCarloErrors:
    def test_collapse_single_sample(self):
        table = monte_carlo_errors(small_cfg(), [8, 16, 32], 2, 1, base_seed=11)
        scale = table.reference_scale
        for J in [8, 16, 32]:
            for k in [1, 2]:
                assert table.row(k, J).rms_sup_error <= 1e-10 * scale

    def test_exact_zero_rows_past_n(self):
        cfg = small_cfg(kind=IMP, nonlin=Nonlinearity.scaled_cos(1.0))
        table = monte_carlo_errors(cfg, [32, 64], 5, 7, base_seed=2)
        # J = 32 -> N = 4; J = 64 -> N = 2
        for J, N in [(32, 4), (64, 2)]:
            for k in range(N, 6):
                row = table.row(k, J)
                assert row.rms_sup_error == 0.0
                assert row.rms_final_error == 0.0

    def test_errors_non_increasing_in_k(self):
        cfg = small_cfg(kind=IMP, n_modes=16, dt_exponent=9)
        table = monte_carlo_errors(cfg, [16, 32, 64], 3, 40, base_seed=3)
        for J in [16, 32, 64]:
            vals = [table.row(k, J).rms_sup_error for k in range(4)]
            for a, b in zip(vals, vals[1:]):
                assert b <= 1.1 * a

    def test_thread_count_does_not_change_table(self):
        cfg = small_cfg(kind=IMP, nonlin=Nonlinearity.scaled_cos(2.0))
        tables = [monte_carlo_errors(cfg, [16, 32], 2, 23, base_seed=9,
                                     threads=t) for t in (1, 3)]
        assert tables[0].rows == tables[1].rows
        assert tables[0].reference_scale == tables[1].reference_scale

    def test_sampling_error_shrinks_with_m(self):
        cfg = small_cfg(kind=IMP)
        small = monte_carlo_errors(cfg, [16, 32, 64], 0, 10, base_seed=5)
        large = monte_carlo_errors(cfg, [16, 32, 64], 0, 80, base_seed=5)
        assert large.row(0, 32).stderr_sup < small.row(0, 32).stderr_sup
        # both estimate the same quantity
        assert large.row(0, 32).rms_sup_error == pytest.approx(
            small.row(0, 32).rms_sup_error, rel=0.5)

    def test_implicit_saturation_slope(self):
        # linear equation, white noise: order stays near alpha_bar for all k
        cfg = ExperimentConfig(0.25, 32, 1.0, 10, IMP, ZERO)
        table = monte_carlo_errors(cfg, [8, 16, 32, 64, 128], 2, 20, base_seed=17)
        for k in range(3):
            assert 0.05 <= fit_order(table, k) <= 0.45

    def test_non_divisible_j_rejected(self):
        with pytest.raises(ValueError):
            monte_carlo_errors(small_cfg(), [3], 1, 1, base_seed=0)

    def test_bad_sample_count_rejected(self):
        with pytest.raises(ValueError):
            monte_carlo_errors(small_cfg(), [8], 1, 0, base_seed=0)

    def test_row_and_column_lookup(self):
        table = monte_carlo_errors(small_cfg(), [8, 16], 1, 2, base_seed=4)
        col = table.column(0)
        assert [r.J for r in col] == [8, 16]  # sorted by dT, dT = J dt
        with pytest.raises(KeyError):
            table.row(0, 128)
