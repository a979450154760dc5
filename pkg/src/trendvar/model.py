"""Model assembly: static embedding, dynamic fusion and the prediction head.

One patient flows through as:

  visits (t_max, c) --decompose--> c trend/variation pairs
    -> per-feature correlation maps (or raw stacks when that stage is off)
    -> column-wise concatenation and a learned row mix -> h_dy
  statics (s,) -> affine + tanh -> h_st
  variation lines -> difference attention -> pooled h_var   (optional)
  logits = W1 h_st + W2 h_dy [+ W3 h_var] + b -> softmax

Every stage can be switched off by ablation flags except the head itself;
disabled stages contribute nothing (their weights do not even exist).
"""

import struct
from dataclasses import dataclass, field, replace

import numpy as np

from . import autodiff as ad
from .diff_attention import diff_attention, pool_features
from .dilated import (
    BranchParams,
    DEFAULT_DILATIONS,
    DEFAULT_KERNEL_WIDTH,
    combined_width,
    correlation_forward,
    stack_pair,
)
from .errors import ConfigError, NumericError
from .wavelets import MAX_ORDER, MIN_ORDER, coefficient_count, decompose_matrix


@dataclass(frozen=True)
class AblationFlags:
    """Which stages participate in the forward pass."""

    use_trend: bool = True
    use_variation: bool = True
    use_correlation: bool = True
    use_diff_attention: bool = True

    def __post_init__(self):
        if not (self.use_trend or self.use_variation):
            raise ConfigError(
                "ablation flags: at least one of trend/variation must be on"
            )
        if self.use_correlation and not (self.use_trend and self.use_variation):
            raise ConfigError(
                "ablation flags: the correlation stage needs both the trend "
                "and the variation lines"
            )


ABLATION_PRESETS = {
    "A1": AblationFlags(True, False, False, False),
    "A2": AblationFlags(False, True, False, False),
    "A3": AblationFlags(False, True, False, True),
    "A4": AblationFlags(True, True, False, False),
    "A5": AblationFlags(True, True, False, True),
    "A6": AblationFlags(True, True, True, False),
    "A7": AblationFlags(True, True, True, True),
}


def ablation_from_name(name):
    try:
        return ABLATION_PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown ablation config {name!r}: choose one of "
            f"{', '.join(sorted(ABLATION_PRESETS))}"
        ) from None


@dataclass(frozen=True)
class ModelConfig:
    t_max: int
    n_dynamic: int
    n_static: int
    n_classes: int
    order: int = 14
    kernel_width: int = DEFAULT_KERNEL_WIDTH
    dilations: tuple = DEFAULT_DILATIONS
    flags: AblationFlags = field(default_factory=AblationFlags)
    shared_branches: bool = False

    def __post_init__(self):
        for label, value in (("t_max", self.t_max),
                             ("n_dynamic", self.n_dynamic),
                             ("n_static", self.n_static),
                             ("n_classes", self.n_classes)):
            if value < 1:
                raise ConfigError(f"model config: {label} must be >= 1, got {value}")
        if self.n_classes < 2:
            raise ConfigError(
                f"model config: need at least 2 classes, got {self.n_classes}"
            )
        if not (MIN_ORDER <= self.order <= MAX_ORDER):
            raise ConfigError(
                f"model config: symlet order {self.order} outside "
                f"{MIN_ORDER}..{MAX_ORDER}"
            )
        if self.kernel_width < 1:
            raise ConfigError(
                f"model config: kernel width must be >= 1, got {self.kernel_width}"
            )
        object.__setattr__(self, "dilations", tuple(int(d) for d in self.dilations))
        if len(self.dilations) != 3 or any(d < 0 for d in self.dilations):
            raise ConfigError(
                f"model config: dilations must be three non-negative rates, "
                f"got {self.dilations}"
            )
        if self.flags.use_correlation:
            # Raises if any branch would produce an empty map.
            combined_width(self.coeff_len, self.dilations, self.kernel_width)
        if self.flags.use_diff_attention and self.coeff_len < 2:
            raise ConfigError(
                f"model config: difference attention needs at least 2 "
                f"coefficients, got {self.coeff_len}"
            )

    @property
    def coeff_len(self):
        return coefficient_count(self.t_max, self.order)

    @property
    def map_rows(self):
        if self.flags.use_correlation:
            return 2
        if self.flags.use_trend and self.flags.use_variation:
            return 2
        return 1

    @property
    def map_cols(self):
        if self.flags.use_correlation:
            return combined_width(self.coeff_len, self.dilations,
                                  self.kernel_width)
        return self.coeff_len

    @property
    def fused_len(self):
        return self.map_cols * self.n_dynamic


class ModelParams:
    """All trainable tensors of one model, in a fixed declaration order.

    The order is the serialization contract for checkpoints and the draw
    order for initialization, so it must never depend on anything but the
    config.
    """

    def __init__(self, config):
        self.config = config
        d = config.n_classes
        ordered = []

        def weight(name, shape, fan_in):
            t = ad.Tensor(np.zeros(shape), name=name)
            ordered.append((name, t, fan_in))
            return t

        def bias(name, shape):
            t = ad.Tensor(np.zeros(shape), name=name)
            ordered.append((name, t, None))
            return t

        self.static_weight = weight(
            "static_weight", (d, config.n_static), config.n_static)
        self.static_bias = bias("static_bias", (d,))
        self.branch_sets = []
        if config.flags.use_correlation:
            n_sets = 1 if config.shared_branches else config.n_dynamic
            w = config.kernel_width
            for si in range(n_sets):
                branches = []
                for bi, rate in enumerate(config.dilations):
                    prefix = f"branch[{si}][{bi}]"
                    branches.append(BranchParams(
                        kernel_top=weight(prefix + ".kernel_top", (2, w), 2 * w),
                        kernel_bottom=weight(
                            prefix + ".kernel_bottom", (2, w), 2 * w),
                        bias=bias(prefix + ".bias", (2,)),
                        dilation=rate,
                    ))
                self.branch_sets.append(branches)
        rows = config.map_rows
        self.mix_weight = weight("mix_weight", (rows,), rows)
        self.mix_bias = bias("mix_bias", ())
        self.out_static = weight("out_static", (d, d), d)
        self.out_dynamic = weight(
            "out_dynamic", (d, config.fused_len), config.fused_len)
        if config.flags.use_diff_attention:
            diff_len = config.coeff_len - 1
            self.out_diff = weight("out_diff", (d, diff_len), diff_len)
        else:
            self.out_diff = None
        self.out_bias = bias("out_bias", (d,))
        self._ordered = ordered

    @classmethod
    def initialized(cls, config, rng):
        """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases."""
        params = cls(config)
        for _, tensor, fan_in in params._ordered:
            if fan_in is None:
                continue
            bound = 1.0 / np.sqrt(fan_in)
            tensor.data = rng.uniform(-bound, bound, size=tensor.data.shape)
        return params

    def named_tensors(self):
        return [(name, tensor) for name, tensor, _ in self._ordered]

    def tensors(self):
        return [tensor for _, tensor, _ in self._ordered]

    def zero_grads(self):
        for _, tensor, _ in self._ordered:
            tensor.grad = None

    def branches_for(self, feature):
        if self.config.shared_branches:
            return self.branch_sets[0]
        return self.branch_sets[feature]

    def copy(self):
        clone = ModelParams(self.config)
        for (_, src, _), (_, dst, _) in zip(self._ordered, clone._ordered):
            dst.data = src.data.copy()
        return clone


@dataclass
class PreparedSample:
    """One patient after decomposition, ready for repeated forward passes.

    Decomposition has no trainable inputs, so caching it per patient saves
    recomputing the filter bank on every epoch.
    """

    pairs: list
    static: np.ndarray
    label: int


def prepare_sample(visits, static, label, config):
    visits = np.asarray(visits, dtype=np.float64)
    static = np.asarray(static, dtype=np.float64)
    if visits.shape != (config.t_max, config.n_dynamic):
        raise ConfigError(
            f"prepare_sample: visits shape {visits.shape} does not match "
            f"model ({config.t_max}, {config.n_dynamic})"
        )
    if static.shape != (config.n_static,):
        raise ConfigError(
            f"prepare_sample: static shape {static.shape} does not match "
            f"model ({config.n_static},)"
        )
    if not np.all(np.isfinite(static)):
        raise NumericError("prepare_sample: non-finite static feature")
    pairs = decompose_matrix(visits, config.order)
    return PreparedSample(pairs, static, label)


def embed_static(static_tensor, params):
    """Affine map of the static vector followed by tanh."""
    pre = ad.add(ad.matvec(params.static_weight, static_tensor),
                 params.static_bias)
    return ad.tanh(pre)


def fuse_dynamic(feature_maps, params):
    """Concatenate per-feature maps column-wise and mix rows into a vector."""
    feature_maps = list(feature_maps)
    if not feature_maps:
        raise ConfigError("fuse_dynamic: no feature maps")
    shape = feature_maps[0].data.shape
    for fm in feature_maps[1:]:
        if fm.data.shape != shape:
            raise ConfigError(
                f"fuse_dynamic: ragged feature maps, {shape} vs {fm.data.shape}"
            )
    fused = ad.concat(feature_maps, axis=1) if len(feature_maps) > 1 \
        else feature_maps[0]
    mixed = ad.vecmat(params.mix_weight, fused)
    return ad.tanh(ad.add_scalar(mixed, params.mix_bias))


def predict(h_static, h_dynamic, h_variation, params):
    """Combine embeddings into class probabilities.

    ``h_variation`` is None when difference attention is off; the term is
    simply absent rather than zeroed.
    """
    logits = ad.add(ad.matvec(params.out_static, h_static),
                    ad.matvec(params.out_dynamic, h_dynamic))
    if h_variation is not None:
        if params.out_diff is None:
            raise ConfigError(
                "predict: attention embedding given but this model was built "
                "without the attention head"
            )
        logits = ad.add(logits, ad.matvec(params.out_diff, h_variation))
    logits = ad.add(logits, params.out_bias)
    return ad.softmax(logits)


def forward(sample, params, config):
    """Class probabilities for one prepared patient. Must run under a Tape."""
    flags = config.flags
    feature_maps = []
    for j, pair in enumerate(sample.pairs):
        if flags.use_correlation:
            stacked = ad.Tensor(stack_pair(pair), const=True)
            maps = correlation_forward(stacked, params.branches_for(j))
            feature_maps.append(maps.combined)
        elif flags.use_trend and flags.use_variation:
            feature_maps.append(ad.Tensor(stack_pair(pair), const=True))
        elif flags.use_trend:
            feature_maps.append(ad.Tensor(pair.trend[None, :], const=True))
        else:
            feature_maps.append(ad.Tensor(pair.variation[None, :], const=True))
    h_dynamic = fuse_dynamic(feature_maps, params)
    h_static = embed_static(ad.Tensor(sample.static, const=True), params)
    h_variation = None
    if flags.use_diff_attention:
        weighted = [
            diff_attention(ad.Tensor(pair.variation, const=True)).weighted_diff
            for pair in sample.pairs
        ]
        h_variation = pool_features(weighted)
    return predict(h_static, h_dynamic, h_variation, params)


def one_hot(label, n_classes):
    if not 0 <= label < n_classes:
        raise ConfigError(
            f"one_hot: label {label} outside 0..{n_classes - 1}"
        )
    row = np.zeros(n_classes)
    row[label] = 1.0
    return row


def cross_entropy(prob_tensors, onehot_rows):
    """Mean negative log-likelihood over a batch of probability vectors.

    Probabilities are clamped at 1e-12 before the log, so a confidently
    wrong prediction yields a large finite loss instead of an infinity.
    """
    prob_tensors = list(prob_tensors)
    onehot_rows = np.asarray(onehot_rows, dtype=np.float64)
    if onehot_rows.ndim != 2 or len(prob_tensors) != onehot_rows.shape[0]:
        raise ConfigError(
            f"cross_entropy: {len(prob_tensors)} predictions vs label block "
            f"of shape {onehot_rows.shape}"
        )
    picked = []
    for i, (probs, row) in enumerate(zip(prob_tensors, onehot_rows)):
        if not (((row == 0.0) | (row == 1.0)).all() and row.sum() == 1.0):
            raise ConfigError(
                f"cross_entropy: row {i} is not one-hot: {row.tolist()}"
            )
        if probs.data.shape != row.shape:
            raise ConfigError(
                f"cross_entropy: row {i} has {row.shape[0]} classes but the "
                f"prediction has shape {probs.data.shape}"
            )
        k = int(np.argmax(row))
        picked.append(ad.slice1d(probs, k, k + 1))
    stacked = ad.concat(picked, axis=0) if len(picked) > 1 else picked[0]
    logs = ad.log_clamped(stacked)
    return ad.scale(ad.tsum(logs), -1.0 / len(picked))


# ---------------------------------------------------------------------------
# Checkpoint serialization (version 1, little-endian).
#
# magic | u32 version | config block | u8 has_stats [stats arrays]
#   | u32 tensor count | tensors in declaration order
#
# The config block is: u32 x 9 (t_max, n_dynamic, n_static, n_classes,
# order, kernel_width, three dilation rates) then u8 flag bits
# (1 trend, 2 variation, 4 correlation, 8 attention, 16 shared branches).
# Stats and tensors are stored as u32 ndim, u32 dims, float64 values.

CHECKPOINT_MAGIC = b"TVARCKPT"
CHECKPOINT_VERSION = 1


def _pack_array(out, arr):
    # np.ascontiguousarray would promote 0-d to 1-d; tobytes() copies to C
    # order on its own, so plain asarray preserves scalar shapes.
    arr = np.asarray(arr, dtype=np.float64)
    out.append(struct.pack("<I", arr.ndim))
    for dim in arr.shape:
        out.append(struct.pack("<I", dim))
    out.append(arr.tobytes())


class _Reader:
    def __init__(self, blob, path):
        self.blob = blob
        self.path = path
        self.offset = 0

    def take(self, count):
        if self.offset + count > len(self.blob):
            raise ConfigError(f"corrupt checkpoint {self.path}: truncated")
        piece = self.blob[self.offset:self.offset + count]
        self.offset += count
        return piece

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]

    def u8(self):
        return struct.unpack("<B", self.take(1))[0]

    def array(self):
        ndim = self.u32()
        if ndim > 4:
            raise ConfigError(
                f"corrupt checkpoint {self.path}: implausible rank {ndim}"
            )
        shape = tuple(self.u32() for _ in range(ndim))
        count = int(np.prod(shape)) if shape else 1
        if count > 50_000_000:
            raise ConfigError(
                f"corrupt checkpoint {self.path}: implausible tensor size"
            )
        data = np.frombuffer(self.take(count * 8), dtype="<f8").reshape(shape)
        return data.astype(np.float64)

    def done(self):
        if self.offset != len(self.blob):
            raise ConfigError(
                f"corrupt checkpoint {self.path}: "
                f"{len(self.blob) - self.offset} trailing bytes"
            )


def _flag_byte(config):
    bits = 0
    if config.flags.use_trend:
        bits |= 1
    if config.flags.use_variation:
        bits |= 2
    if config.flags.use_correlation:
        bits |= 4
    if config.flags.use_diff_attention:
        bits |= 8
    if config.shared_branches:
        bits |= 16
    return bits


def save_checkpoint(path, params, config, stats=None):
    """Serialize params + config (+ optional normalization stats) to disk.

    Storing the training-time normalization stats lets a later scoring run
    reproduce the exact preprocessing the weights were fitted under.
    """
    out = [CHECKPOINT_MAGIC, struct.pack("<I", CHECKPOINT_VERSION)]
    out.append(struct.pack(
        "<9I", config.t_max, config.n_dynamic, config.n_static,
        config.n_classes, config.order, config.kernel_width,
        *config.dilations,
    ))
    out.append(struct.pack("<B", _flag_byte(config)))
    if stats is None:
        out.append(struct.pack("<B", 0))
    else:
        out.append(struct.pack("<B", 1))
        for arr in (stats.dynamic_mean, stats.dynamic_std,
                    stats.static_mean, stats.static_std):
            _pack_array(out, arr)
    tensors = params.named_tensors()
    out.append(struct.pack("<I", len(tensors)))
    for _, tensor in tensors:
        _pack_array(out, tensor.data)
    with open(path, "wb") as fh:
        fh.write(b"".join(out))


@dataclass
class CheckpointBundle:
    params: ModelParams
    config: ModelConfig
    stats: "object | None"


def load_checkpoint(path):
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(blob) < len(CHECKPOINT_MAGIC) or \
            blob[:len(CHECKPOINT_MAGIC)] != CHECKPOINT_MAGIC:
        raise ConfigError(f"unrecognized checkpoint file: {path}")
    reader = _Reader(blob, path)
    reader.take(len(CHECKPOINT_MAGIC))
    version = reader.u32()
    if version != CHECKPOINT_VERSION:
        raise ConfigError(
            f"unsupported checkpoint version {version} in {path}"
        )
    t_max, n_dynamic, n_static, n_classes, order, kernel_width, d0, d1, d2 = \
        struct.unpack("<9I", reader.take(36))
    bits = reader.u8()
    flags = AblationFlags(
        use_trend=bool(bits & 1),
        use_variation=bool(bits & 2),
        use_correlation=bool(bits & 4),
        use_diff_attention=bool(bits & 8),
    )
    config = ModelConfig(
        t_max=t_max, n_dynamic=n_dynamic, n_static=n_static,
        n_classes=n_classes, order=order, kernel_width=kernel_width,
        dilations=(d0, d1, d2), flags=flags,
        shared_branches=bool(bits & 16),
    )
    stats = None
    if reader.u8():
        from .data import FeatureStats
        stats = FeatureStats(
            dynamic_mean=reader.array(), dynamic_std=reader.array(),
            static_mean=reader.array(), static_std=reader.array(),
        )
    count = reader.u32()
    params = ModelParams(config)
    expected = params.named_tensors()
    if count != len(expected):
        raise ConfigError(
            f"corrupt checkpoint {path}: holds {count} tensors, model "
            f"declares {len(expected)}"
        )
    for name, tensor in expected:
        data = reader.array()
        if data.shape != tensor.data.shape:
            raise ConfigError(
                f"corrupt checkpoint {path}: tensor {name} has shape "
                f"{data.shape}, expected {tensor.data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise NumericError(
                f"corrupt checkpoint {path}: non-finite values in {name}"
            )
        tensor.data = data
    reader.done()
    return CheckpointBundle(params, config, stats)


def config_with(config, **changes):
    """Frozen-dataclass update helper used by sweeps."""
    return replace(config, **changes)
