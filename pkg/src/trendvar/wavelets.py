"""Single-level symlet decomposition of visit series.

Each dynamic feature's series is split once into a trend line (lowpass) and
a variation line (highpass) with an orthonormal least-asymmetric filter pair.
Boundaries use half-sample symmetric extension, so a length-t series yields
floor((t + F - 1) / 2) coefficients per line, F = 2K being the filter length.
The split is exactly invertible: ``reconstruct`` returns the original samples
to floating-point roundoff.
"""

from dataclasses import dataclass

import numpy as np

from ._symlet_coeffs import SYMLET_LOWPASS
from .errors import ConfigError, NumericError

MIN_ORDER = 2
MAX_ORDER = 20


@dataclass(frozen=True)
class FilterPair:
    """Orthonormal analysis filter pair for one symlet order."""

    order: int
    lowpass: np.ndarray
    highpass: np.ndarray

    @property
    def length(self):
        return 2 * self.order


@dataclass(frozen=True)
class TrendVariationPair:
    """One feature's decomposition: trend (lowpass) and variation (highpass)
    coefficient lines of equal length."""

    trend: np.ndarray
    variation: np.ndarray


def _quadrature_mirror(lowpass):
    # g[n] = (-1)^n h[F-1-n]: exact by construction, no rounding involved.
    flipped = lowpass[::-1].copy()
    flipped[1::2] *= -1.0
    return flipped


def _check_pair(order, lowpass, highpass):
    total = lowpass.sum()
    if abs(total - np.sqrt(2.0)) > 1e-12:
        raise AssertionError(
            f"order {order}: lowpass sum {total!r} is not sqrt(2)"
        )
    energy = np.dot(lowpass, lowpass)
    if abs(energy - 1.0) > 1e-12:
        raise AssertionError(
            f"order {order}: lowpass energy {energy!r} is not 1"
        )
    expected = _quadrature_mirror(lowpass)
    if not np.array_equal(highpass, expected):
        raise AssertionError(
            f"order {order}: highpass is not the quadrature mirror"
        )
    length = lowpass.size
    n = np.arange(length, dtype=np.float64)
    for p in range(order):
        moment = abs(np.dot(n ** p, highpass))
        if moment > 1e-7 * length ** p:
            raise AssertionError(
                f"order {order}: highpass moment p={p} is {moment!r}"
            )


def _build_table():
    table = {}
    for order, coeffs in SYMLET_LOWPASS.items():
        lowpass = np.array(coeffs, dtype=np.float64)
        highpass = _quadrature_mirror(lowpass)
        _check_pair(order, lowpass, highpass)
        lowpass.flags.writeable = False
        highpass.flags.writeable = False
        table[order] = FilterPair(order, lowpass, highpass)
    return table


# Gate-checked once at import; a corrupted table refuses to load at all.
_FILTERS = _build_table()


def symlet_filters(order):
    """Return the frozen ``FilterPair`` for ``order`` in 2..20."""
    if order not in _FILTERS:
        raise ConfigError(
            f"unsupported symlet order {order}: supported range is "
            f"{MIN_ORDER}..{MAX_ORDER}"
        )
    return _FILTERS[order]


def coefficient_count(length, order):
    """Number of trend (and variation) coefficients for a length-t series."""
    if length < 1:
        raise ConfigError(f"series length must be positive, got {length}")
    return (length + 2 * order - 1) // 2


def symmetric_extend(x, pad):
    """Half-sample symmetric extension by ``pad`` samples on each side."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ConfigError(
            f"symmetric_extend: expected a non-empty 1-D array, got shape {x.shape}"
        )
    if pad < 0:
        raise ConfigError(f"symmetric_extend: negative pad {pad}")
    if pad == 0:
        return x.copy()
    return np.pad(x, pad, mode="symmetric")


def decompose(x, order):
    """Split one series into its trend and variation coefficient lines."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ConfigError(
            f"decompose: expected a non-empty 1-D series, got shape {x.shape}"
        )
    filters = symlet_filters(order)
    ext = symmetric_extend(x, filters.length - 1)
    # Correlate-then-decimate; keeping odd output indices pairs exactly with
    # the upsampling grid used by reconstruct.
    trend = np.convolve(ext, filters.lowpass, mode="valid")[1::2]
    variation = np.convolve(ext, filters.highpass, mode="valid")[1::2]
    return TrendVariationPair(trend, variation)


def reconstruct(pair, order, length):
    """Invert ``decompose``: rebuild the original length-t series."""
    filters = symlet_filters(order)
    expected = coefficient_count(length, order)
    if pair.trend.shape != (expected,) or pair.variation.shape != (expected,):
        raise ConfigError(
            f"reconstruct: coefficient length mismatch, expected {expected} "
            f"for length {length} at order {order}, got trend "
            f"{pair.trend.shape} and variation {pair.variation.shape}"
        )
    f = filters.length
    # The odd positions of a length t+F-1 buffer hold exactly m slots.
    up_len = length + f - 1
    up_trend = np.zeros(up_len)
    up_trend[1::2] = pair.trend
    up_var = np.zeros(up_len)
    up_var[1::2] = pair.variation
    rec = np.convolve(up_trend, filters.lowpass[::-1]) + np.convolve(
        up_var, filters.highpass[::-1]
    )
    return rec[f - 1: f - 1 + length]


def decompose_matrix(visits, order):
    """Decompose every column of a (t, c) visit matrix.

    Returns one ``TrendVariationPair`` per feature column.  Non-finite cells
    are rejected up front with their coordinates, because a single NaN would
    silently smear across 2K coefficients.
    """
    visits = np.asarray(visits, dtype=np.float64)
    if visits.ndim != 2 or visits.shape[0] < 1 or visits.shape[1] < 1:
        raise ConfigError(
            f"decompose_matrix: expected a (t, c) matrix with t, c >= 1, "
            f"got shape {visits.shape}"
        )
    bad = np.argwhere(~np.isfinite(visits))
    if bad.size:
        row, col = bad[0]
        raise NumericError(
            f"decompose_matrix: non-finite value at visit {row}, feature "
            f"column {col}"
        )
    return [decompose(visits[:, j], order) for j in range(visits.shape[1])]
