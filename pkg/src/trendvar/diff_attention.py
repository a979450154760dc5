"""Attention over first-order differences of the variation line.

The variation coefficients R* of one feature are differenced once, and the
squared differences (scaled by 1/sqrt(m), m the length of R* itself) are
softmax-normalised into attention weights.  The weighted differences
highlight where a patient's short-term variation jumps.  There is nothing
trainable here: gradients flow through to R* but no parameters live in this
stage.
"""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import autodiff as ad
from .errors import ConfigError, NumericError


@dataclass
class AttentionOutputs:
    weights: ad.Tensor
    weighted_diff: ad.Tensor


def first_order_diff(values):
    """Adjacent differences of a 1-D tensor: out[i] = x[i+1] - x[i]."""
    m = values.data.shape[0] if values.data.ndim == 1 else 0
    if values.data.ndim != 1 or m < 2:
        raise ConfigError(
            f"first_order_diff: need a 1-D tensor of length >= 2, got shape "
            f"{values.data.shape}"
        )
    head = ad.slice1d(values, 1, m)
    tail = ad.slice1d(values, 0, m - 1)
    return ad.sub(head, tail)


def attention_weights(diff, dim):
    """Softmax over squared differences scaled by 1/sqrt(dim).

    ``dim`` is the length of the ORIGINAL coefficient line, one more than the
    difference vector; the scaling tracks the line the differences came from.
    """
    if dim < 2:
        raise ConfigError(f"attention_weights: dim must be >= 2, got {dim}")
    if not np.all(np.isfinite(diff.data)):
        raise NumericError(
            "attention_weights: non-finite difference values"
        )
    squared = ad.mul(diff, diff)
    scaled = ad.scale(squared, 1.0 / sqrt(dim))
    return ad.softmax(scaled)


def diff_attention(values):
    """Full stage for one feature: difference, attend, reweight."""
    m = values.data.shape[0]
    diff = first_order_diff(values)
    weights = attention_weights(diff, m)
    weighted = ad.mul(weights, diff)
    return AttentionOutputs(weights, weighted)


def pool_features(weighted_diffs):
    """Elementwise mean of the per-feature weighted-difference vectors."""
    weighted_diffs = list(weighted_diffs)
    if not weighted_diffs:
        raise ConfigError("pool_features: no feature vectors given")
    first_shape = weighted_diffs[0].data.shape
    for v in weighted_diffs[1:]:
        if v.data.shape != first_shape:
            raise ConfigError(
                f"pool_features: length mismatch, {first_shape} vs "
                f"{v.data.shape}"
            )
    total = weighted_diffs[0]
    for v in weighted_diffs[1:]:
        total = ad.add(total, v)
    return ad.scale(total, 1.0 / len(weighted_diffs))
