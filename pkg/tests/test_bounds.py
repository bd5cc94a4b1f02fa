import itertools

import numpy as np
import pytest

from fermicool.bounds import (
    BoundInputs,
    d_c_window,
    t_spec_bound,
    t_sub_bound,
    t_sweep_bound,
)


def inputs(**kwargs):
    base = dict(k_const=1.0, alpha=0.01, gap=0.5, gap_c=1.0, d_c=2, avg_step=0.05)
    base.update(kwargs)
    return BoundInputs(**base)


class TestSweepBound:
    def test_reference_value(self):
        assert t_sweep_bound(inputs()) == pytest.approx(400.0)

    def test_halving_gap_quadruples(self):
        assert t_sweep_bound(inputs(gap=0.25)) == pytest.approx(4 * t_sweep_bound(inputs()))


class TestSubspaceBound:
    def test_single_level_is_pure_sweep(self):
        v = inputs(d_c=1)
        assert t_sub_bound(v) == pytest.approx(v.k_const * v.gap / (v.alpha * v.gap_c**3))

    def test_symmetric_case_reduces_algebraically(self):
        v = inputs(gap=0.8, gap_c=0.8, d_c=1)
        assert t_sub_bound(v) == pytest.approx(t_sweep_bound(v))

    def test_cooling_term(self):
        v = inputs(d_c=5)
        pure = t_sub_bound(inputs(d_c=1))
        assert t_sub_bound(v) == pytest.approx(pure + 5 * 4 / v.alpha)


class TestSpectroscopyBound:
    def test_single_level(self):
        v = inputs(d_c=1)
        assert t_spec_bound(v) == pytest.approx(v.k_const * v.gap / (v.alpha * v.gap_c**3))

    def test_linear_in_inverse_step(self):
        a = t_spec_bound(inputs(avg_step=0.05)) - t_spec_bound(inputs(d_c=1))
        b = t_spec_bound(inputs(avg_step=0.025)) - t_spec_bound(inputs(d_c=1))
        assert b == pytest.approx(2 * a)

    def test_positive_inputs_validated(self):
        with pytest.raises(ValueError):
            inputs(alpha=0.0)


class TestWindow:
    def test_equal_gaps_close_the_window(self):
        window = d_c_window(1.0, 0.7, 0.7)
        assert window.budget == pytest.approx(0.0)
        assert not window.admits(2)

    def test_small_gap_limit(self):
        window = d_c_window(4.0, 0.01, 100.0)
        assert window.quadratic == pytest.approx(window.small_gap_limit, rel=1e-4)
        assert window.small_gap_limit == pytest.approx(np.sqrt(4.0) / 0.01)

    def test_inverted_gaps_rejected(self):
        with pytest.raises(ValueError):
            d_c_window(1.0, 2.0, 1.0)

    def test_crossover_consistency_grid(self):
        """t_sub <= t_sweep exactly when the window admits d_c, over a
        thousand-point parameter grid."""
        checked = 0
        for k, gap, ratio, d_c in itertools.product(
            (0.5, 1.0, 4.0, 16.0, 64.0),
            (0.05, 0.1, 0.3, 0.7, 1.5),
            (1.0, 1.5, 2.5, 6.0),
            (1, 2, 3, 5, 9, 17, 33, 65, 129, 257),
        ):
            gap_c = gap * ratio
            v = BoundInputs(k_const=k, alpha=0.01, gap=gap, gap_c=gap_c, d_c=d_c, avg_step=0.05)
            window = d_c_window(k, gap, gap_c)
            assert (t_sub_bound(v) <= t_sweep_bound(v)) == window.admits(d_c)
            assert (d_c <= window.exact) == window.admits(d_c)
            checked += 1
        assert checked == 1000
