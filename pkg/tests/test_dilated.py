"""Dilated correlation stage tests with a quadruple-loop oracle."""

import numpy as np
import pytest

from trendvar import autodiff as ad
from trendvar.dilated import (
    BranchParams,
    combined_width,
    conv_branch,
    correlation_forward,
    stack_pair,
)
from trendvar.errors import ConfigError, ShapeMismatchError
from trendvar.wavelets import TrendVariationPair


def oracle_conv(stacked, kernel_top, kernel_bottom, bias, dilation):
    """Definitionally faithful re-implementation: four explicit loops."""
    _, m = stacked.shape
    width = kernel_top.shape[1]
    out_len = m - dilation * (width - 1)
    out = np.zeros((2, out_len))
    for row, kernel in enumerate((kernel_top, kernel_bottom)):
        for j in range(out_len):
            acc = bias[row]
            for k in range(2):
                for tap in range(width):
                    acc += stacked[k, j + dilation * tap] * kernel[k, tap]
            out[row, j] = acc
    return out


def _branch(kt, kb, bias, dilation):
    return BranchParams(ad.Tensor(kt), ad.Tensor(kb), ad.Tensor(bias),
                        dilation)


def test_worked_example_dilation_one():
    stacked = ad.Tensor([[1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]])
    branch = _branch([[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]],
                     [0.0, 0.0], 1)
    with ad.Tape():
        out = conv_branch(stacked, branch, activate=False)
    assert out.data[0] == pytest.approx([7.0, 9.0, 11.0])


def test_worked_example_dilation_zero_keeps_width():
    stacked = ad.Tensor([[1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]])
    branch = _branch([[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]],
                     [0.0, 0.0], 0)
    with ad.Tape():
        out = conv_branch(stacked, branch, activate=False)
    assert out.data.shape == (2, 4)
    assert out.data[0] == pytest.approx([6.0, 8.0, 10.0, 12.0])


def test_zero_kernels_zero_bias_give_zeros_after_tanh():
    stacked = ad.Tensor(np.random.default_rng(0).normal(size=(2, 9)))
    branch = _branch(np.zeros((2, 2)), np.zeros((2, 2)), np.zeros(2), 1)
    with ad.Tape():
        out = conv_branch(stacked, branch, activate=True)
    assert np.abs(out.data).max() == 0.0


def test_matches_oracle_on_random_instances():
    rng = np.random.default_rng(7)
    for _ in range(50):
        width = int(rng.integers(1, 5))
        dilation = int(rng.integers(0, 5))
        m = dilation * (width - 1) + int(rng.integers(1, 8))
        stacked = rng.normal(size=(2, m))
        kt = rng.normal(size=(2, width))
        kb = rng.normal(size=(2, width))
        bias = rng.normal(size=2)
        with ad.Tape():
            out = ad.dilated_conv(ad.Tensor(stacked), ad.Tensor(kt),
                                  ad.Tensor(kb), ad.Tensor(bias), dilation)
        np.testing.assert_allclose(
            out.data, oracle_conv(stacked, kt, kb, bias, dilation),
            atol=1e-12)


def test_preactivation_linearity_in_input():
    rng = np.random.default_rng(9)
    d1 = rng.normal(size=(2, 8))
    d2 = rng.normal(size=(2, 8))
    branch = _branch(rng.normal(size=(2, 2)), rng.normal(size=(2, 2)),
                     np.zeros(2), 2)

    def run(data):
        with ad.Tape():
            return conv_branch(ad.Tensor(data), branch, activate=False).data

    np.testing.assert_allclose(
        run(2.0 * d1 + d2), 2.0 * run(d1) + run(d2), atol=1e-12)


def test_cross_row_kernels_see_both_lines():
    # Zero the top input row: outputs must still move with the bottom row.
    rng = np.random.default_rng(3)
    bottom_only = np.vstack([np.zeros(6), rng.normal(size=6)])
    branch = _branch(rng.normal(size=(2, 2)), rng.normal(size=(2, 2)),
                     np.zeros(2), 1)
    with ad.Tape():
        out = conv_branch(ad.Tensor(bottom_only), branch, activate=False)
    assert np.abs(out.data).max() > 0.1


def test_stack_pair_shapes_and_errors():
    pair = TrendVariationPair(np.array([1.0, 2.0]), np.array([3.0, 4.0]))
    stacked = stack_pair(pair)
    assert stacked.shape == (2, 2)
    np.testing.assert_array_equal(stacked[0], [1.0, 2.0])

    single = stack_pair(TrendVariationPair(np.array([5.0]), np.array([6.0])))
    assert single.shape == (2, 1)

    with pytest.raises(ConfigError, match="equal-length"):
        stack_pair(TrendVariationPair(np.array([1.0]), np.array([1.0, 2.0])))


def test_correlation_forward_concatenates_branch_maps():
    # m=22 with width 2 and rates (0,1,3): 22 + 21 + 19 = 62 columns.
    rng = np.random.default_rng(1)
    stacked = ad.Tensor(rng.normal(size=(2, 22)))
    branches = [
        _branch(rng.normal(size=(2, 2)), rng.normal(size=(2, 2)),
                rng.normal(size=2), rate)
        for rate in (0, 1, 3)
    ]
    with ad.Tape():
        outs = correlation_forward(stacked, branches)
    assert outs.adjacent.data.shape == (2, 22)
    assert outs.short_range.data.shape == (2, 21)
    assert outs.long_range.data.shape == (2, 19)
    assert outs.combined.data.shape == (2, 62)
    np.testing.assert_array_equal(outs.combined.data[:, :22],
                                  outs.adjacent.data)
    np.testing.assert_array_equal(outs.combined.data[:, 43:],
                                  outs.long_range.data)


def test_correlation_forward_is_deterministic():
    rng = np.random.default_rng(2)
    stacked = rng.normal(size=(2, 10))
    branches = [
        _branch(rng.normal(size=(2, 2)), rng.normal(size=(2, 2)),
                rng.normal(size=2), rate)
        for rate in (0, 1, 3)
    ]
    with ad.Tape():
        first = correlation_forward(ad.Tensor(stacked), branches).combined.data
    with ad.Tape():
        second = correlation_forward(ad.Tensor(stacked), branches).combined.data
    np.testing.assert_array_equal(first, second)


def test_requires_exactly_three_branches():
    branch = _branch(np.ones((2, 2)), np.ones((2, 2)), np.zeros(2), 0)
    with ad.Tape():
        with pytest.raises(ConfigError, match="3 branches"):
            correlation_forward(ad.Tensor(np.ones((2, 5))), [branch, branch])


def test_single_output_column_boundary():
    # m exactly equals the receptive field: one output column survives.
    stacked = ad.Tensor(np.arange(8.0).reshape(1, -1).repeat(2, axis=0))
    branch = _branch(np.ones((2, 2)), np.ones((2, 2)), np.zeros(2), 7)
    with ad.Tape():
        out = conv_branch(stacked, branch, activate=False)
    assert out.data.shape == (2, 1)


def test_too_short_input_reports_required_minimum():
    branch = _branch(np.ones((2, 3)), np.ones((2, 3)), np.zeros(2), 4)
    with ad.Tape():
        with pytest.raises(ShapeMismatchError, match="at least 9"):
            conv_branch(ad.Tensor(np.ones((2, 8))), branch)


def test_combined_width_formula_and_error():
    assert combined_width(22, (0, 1, 3), 2) == 62
    assert combined_width(5, (0, 0, 0), 1) == 15
    with pytest.raises(ConfigError, match="cannot support"):
        combined_width(3, (0, 1, 3), 2)


def test_output_columns_shrink_with_dilation():
    rng = np.random.default_rng(11)
    stacked = ad.Tensor(rng.normal(size=(2, 12)))
    widths = []
    for rate in (0, 1, 2, 3, 5):
        branch = _branch(rng.normal(size=(2, 2)), rng.normal(size=(2, 2)),
                         np.zeros(2), rate)
        with ad.Tape():
            widths.append(conv_branch(stacked, branch).data.shape[1])
    assert widths == [12, 11, 10, 9, 7]
