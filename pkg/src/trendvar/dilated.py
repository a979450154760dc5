"""Correlation extraction over stacked trend/variation lines.

The two coefficient lines of one feature are stacked into a (2, m) grid and
scanned by three dilated convolution branches (adjacent, short-range and
long-range, dilation rates 0/1/3 by default).  Every output row mixes taps
from BOTH input rows, so each branch sees trend and variation jointly rather
than as separate channels.  Branch outputs are concatenated column-wise into
one (2, Q) map per feature.
"""

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .errors import ConfigError

DEFAULT_DILATIONS = (0, 1, 3)
DEFAULT_KERNEL_WIDTH = 2


def stack_pair(pair):
    """Stack a trend/variation pair into a (2, m) array, trend on top."""
    trend = np.asarray(pair.trend, dtype=np.float64)
    variation = np.asarray(pair.variation, dtype=np.float64)
    if trend.ndim != 1 or trend.shape != variation.shape:
        raise ConfigError(
            f"stack_pair: components must be equal-length vectors, got "
            f"{trend.shape} and {variation.shape}"
        )
    if trend.size == 0:
        raise ConfigError("stack_pair: empty coefficient lines")
    return np.stack([trend, variation])


@dataclass
class BranchParams:
    """Trainable state of one dilation branch.

    ``kernel_top`` fills output row 0 and ``kernel_bottom`` row 1; each is
    (2, width) so both output rows draw on both input rows.
    """

    kernel_top: ad.Tensor
    kernel_bottom: ad.Tensor
    bias: ad.Tensor
    dilation: int

    def output_length(self, m):
        width = self.kernel_top.data.shape[1]
        return m - self.dilation * (width - 1)


@dataclass
class BranchOutputs:
    """Per-branch maps plus their column-wise concatenation."""

    adjacent: ad.Tensor
    short_range: ad.Tensor
    long_range: ad.Tensor
    combined: ad.Tensor


def conv_branch(stacked, params, activate=True):
    """Run one dilated branch over a (2, m) tensor.

    ``activate=False`` skips the tanh, exposing the affine map itself (used
    by linearity checks and worked-value tests).
    """
    out = ad.dilated_conv(
        stacked, params.kernel_top, params.kernel_bottom, params.bias,
        params.dilation,
    )
    if activate:
        out = ad.tanh(out)
    return out


def correlation_forward(stacked, branches, activate=True):
    """Run all three branches on one feature's stack and concatenate.

    ``branches`` must hold exactly three ``BranchParams`` (adjacent, short,
    long).  Output width is the sum of the per-branch widths.
    """
    if len(branches) != 3:
        raise ConfigError(
            f"correlation_forward: expected 3 branches, got {len(branches)}"
        )
    adjacent = conv_branch(stacked, branches[0], activate)
    short_range = conv_branch(stacked, branches[1], activate)
    long_range = conv_branch(stacked, branches[2], activate)
    combined = ad.concat((adjacent, short_range, long_range), axis=1)
    return BranchOutputs(adjacent, short_range, long_range, combined)


def combined_width(m, dilations, width):
    """Total column count after concatenating all branch outputs."""
    total = 0
    for d in dilations:
        out_len = m - d * (width - 1)
        if out_len < 1:
            raise ConfigError(
                f"combined_width: {m} coefficient columns cannot support "
                f"width {width} at dilation {d}; need at least "
                f"{d * (width - 1) + 1}"
            )
        total += out_len
    return total
