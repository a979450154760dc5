"""Model assembly tests.

The full forward pass is checked against a plain-numpy re-computation that
shares no code with the autodiff path, plus hand-worked head values.
"""

import math

import numpy as np
import pytest

from trendvar import autodiff as ad
from trendvar.data import FeatureStats
from trendvar.errors import ConfigError, NumericError
from trendvar.model import (
    ABLATION_PRESETS,
    AblationFlags,
    ModelConfig,
    ModelParams,
    ablation_from_name,
    config_with,
    cross_entropy,
    embed_static,
    forward,
    fuse_dynamic,
    load_checkpoint,
    one_hot,
    predict,
    prepare_sample,
    save_checkpoint,
)
from trendvar.wavelets import decompose


def small_config(**over):
    base = dict(t_max=8, n_dynamic=2, n_static=3, n_classes=2, order=2)
    base.update(over)
    return ModelConfig(**base)


def make_sample(config, rng):
    visits = rng.normal(size=(config.t_max, config.n_dynamic))
    static = rng.normal(size=config.n_static)
    return prepare_sample(visits, static, 0, config), visits, static


# -- head pieces ------------------------------------------------------------

def test_embed_static_matches_numpy():
    config = small_config()
    rng = np.random.default_rng(0)
    params = ModelParams.initialized(config, rng)
    static = rng.normal(size=3)
    with ad.Tape():
        h = embed_static(ad.Tensor(static, const=True), params)
    expected = np.tanh(params.static_weight.data @ static
                       + params.static_bias.data)
    np.testing.assert_allclose(h.data, expected, atol=1e-15)


def test_fuse_dynamic_row_selection():
    # mix weight [1, 0] picks the top row of the concatenated map exactly
    config = small_config()
    params = ModelParams(config)
    params.mix_weight.data = np.array([1.0, 0.0])
    top = np.arange(6.0)
    bottom = np.full(6, 100.0)
    with ad.Tape():
        fm = ad.Tensor(np.vstack([top, bottom]), const=True)
        h = fuse_dynamic([fm], params)
    np.testing.assert_allclose(h.data, np.tanh(top), atol=1e-15)


def test_fuse_dynamic_concatenates_in_feature_order():
    config = small_config()
    params = ModelParams(config)
    params.mix_weight.data = np.array([1.0, 0.0])
    a = np.vstack([np.array([1.0, 2.0]), np.zeros(2)])
    b = np.vstack([np.array([3.0, 4.0]), np.zeros(2)])
    with ad.Tape():
        h = fuse_dynamic([ad.Tensor(a, const=True),
                          ad.Tensor(b, const=True)], params)
    np.testing.assert_allclose(h.data, np.tanh([1.0, 2.0, 3.0, 4.0]),
                               atol=1e-15)


def test_fuse_dynamic_rejects_ragged_and_empty():
    config = small_config()
    params = ModelParams(config)
    with ad.Tape():
        with pytest.raises(ConfigError, match="ragged"):
            fuse_dynamic([ad.Tensor(np.zeros((2, 3)), const=True),
                          ad.Tensor(np.zeros((2, 4)), const=True)], params)
        with pytest.raises(ConfigError, match="no feature maps"):
            fuse_dynamic([], params)


def test_predict_zero_weights_yield_uniform():
    config = small_config(n_classes=4)
    params = ModelParams(config)  # all zeros
    with ad.Tape():
        probs = predict(ad.Tensor(np.ones(4), const=True),
                        ad.Tensor(np.ones(config.fused_len), const=True),
                        None, params)
    np.testing.assert_allclose(probs.data, np.full(4, 0.25), atol=1e-15)


def test_predict_bias_only_logits():
    # logits [ln 2, 0, 0] -> probabilities [1/2, 1/4, 1/4]
    config = small_config(n_classes=3)
    params = ModelParams(config)
    params.out_bias.data = np.array([math.log(2.0), 0.0, 0.0])
    with ad.Tape():
        probs = predict(ad.Tensor(np.zeros(3), const=True),
                        ad.Tensor(np.zeros(config.fused_len), const=True),
                        None, params)
    np.testing.assert_allclose(probs.data, [0.5, 0.25, 0.25], atol=1e-12)


def test_predict_rejects_attention_term_without_head():
    config = small_config(
        flags=AblationFlags(True, True, True, False))
    params = ModelParams(config)
    assert params.out_diff is None
    with ad.Tape():
        with pytest.raises(ConfigError, match="without the attention head"):
            predict(ad.Tensor(np.zeros(2), const=True),
                    ad.Tensor(np.zeros(config.fused_len), const=True),
                    ad.Tensor(np.zeros(config.coeff_len - 1), const=True),
                    params)


# -- loss -------------------------------------------------------------------

def probs_tensor(values):
    return ad.Tensor(np.asarray(values, dtype=float), const=True)


def test_cross_entropy_worked_values():
    with ad.Tape():
        certain = cross_entropy([probs_tensor([0.0, 1.0])],
                                [[0.0, 1.0]])
        assert certain.data == pytest.approx(0.0, abs=1e-12)

        half = cross_entropy([probs_tensor([0.5, 0.5])], [[1.0, 0.0]])
        assert half.data == pytest.approx(math.log(2.0), abs=1e-12)

        pair = cross_entropy(
            [probs_tensor([0.5, 0.5]), probs_tensor([0.25, 0.75])],
            [[1.0, 0.0], [1.0, 0.0]])
        expected = (math.log(2.0) + math.log(4.0)) / 2.0
        assert pair.data == pytest.approx(expected, abs=1e-12)


def test_cross_entropy_clamps_zero_probability():
    with ad.Tape():
        loss = cross_entropy([probs_tensor([1.0, 0.0])], [[0.0, 1.0]])
    assert loss.data == pytest.approx(-math.log(1e-12), rel=1e-9)
    assert np.isfinite(loss.data)


def test_cross_entropy_validates_rows():
    with ad.Tape():
        with pytest.raises(ConfigError, match="not one-hot"):
            cross_entropy([probs_tensor([0.5, 0.5])], [[0.5, 0.5]])
        with pytest.raises(ConfigError, match="not one-hot"):
            cross_entropy([probs_tensor([0.5, 0.5])], [[1.0, 1.0]])
        with pytest.raises(ConfigError, match="label block"):
            cross_entropy([probs_tensor([0.5, 0.5])],
                          [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ConfigError, match="classes"):
            cross_entropy([probs_tensor([0.5, 0.5])], [[1.0, 0.0, 0.0]])


def test_one_hot():
    np.testing.assert_array_equal(one_hot(2, 4), [0.0, 0.0, 1.0, 0.0])
    with pytest.raises(ConfigError, match="outside"):
        one_hot(4, 4)
    with pytest.raises(ConfigError, match="outside"):
        one_hot(-1, 4)


# -- configuration ----------------------------------------------------------

def test_ablation_flag_constraints():
    with pytest.raises(ConfigError, match="at least one"):
        AblationFlags(False, False, False, False)
    with pytest.raises(ConfigError, match="correlation stage needs both"):
        AblationFlags(True, False, True, False)
    with pytest.raises(ConfigError, match="correlation stage needs both"):
        AblationFlags(False, True, True, True)


def test_ablation_presets_cover_expected_grid():
    assert set(ABLATION_PRESETS) == {f"A{i}" for i in range(1, 8)}
    assert ABLATION_PRESETS["A1"] == AblationFlags(True, False, False, False)
    assert ABLATION_PRESETS["A7"] == AblationFlags(True, True, True, True)
    assert ablation_from_name("A3") is ABLATION_PRESETS["A3"]
    with pytest.raises(ConfigError, match="unknown ablation"):
        ablation_from_name("A8")


def test_model_config_validation():
    with pytest.raises(ConfigError, match="symlet order"):
        small_config(order=1)
    with pytest.raises(ConfigError, match="symlet order"):
        small_config(order=21)
    with pytest.raises(ConfigError, match="at least 2 classes"):
        small_config(n_classes=1)
    with pytest.raises(ConfigError, match="kernel width"):
        small_config(kernel_width=0)
    with pytest.raises(ConfigError, match="three non-negative"):
        small_config(dilations=(0, 1))
    with pytest.raises(ConfigError, match="three non-negative"):
        small_config(dilations=(0, 1, -2))
    with pytest.raises(ConfigError, match="t_max"):
        small_config(t_max=0)
    # a history too short for the widest dilated branch
    with pytest.raises(ConfigError):
        small_config(t_max=2)


def test_model_config_derived_sizes():
    config = small_config(t_max=10, order=2)
    assert config.coeff_len == (10 + 2 * 2 - 1) // 2  # 6
    assert config.map_rows == 2
    # dilations (0,1,3), width 2: 5 + 5 + 3 columns
    assert config.map_cols == (6 - 0) + (6 - 1) + (6 - 3)
    assert config.fused_len == config.map_cols * 2

    lone = small_config(flags=AblationFlags(True, False, False, False))
    assert lone.map_rows == 1
    assert lone.map_cols == lone.coeff_len

    plain = small_config(flags=AblationFlags(True, True, False, False))
    assert plain.map_rows == 2
    assert plain.map_cols == plain.coeff_len


# -- parameters -------------------------------------------------------------

def test_initialization_is_seeded_and_bounded():
    config = small_config()
    a = ModelParams.initialized(config, np.random.default_rng(3))
    b = ModelParams.initialized(config, np.random.default_rng(3))
    for (name_a, ta), (_, tb) in zip(a.named_tensors(), b.named_tensors()):
        np.testing.assert_array_equal(ta.data, tb.data)
        if name_a.endswith("bias"):
            assert np.abs(ta.data).max() == 0.0
    c = ModelParams.initialized(config, np.random.default_rng(4))
    assert any(not np.array_equal(ta.data, tc.data)
               for (_, ta), (_, tc) in zip(a.named_tensors(),
                                           c.named_tensors()))
    bound = 1.0 / math.sqrt(config.n_static)
    assert np.abs(a.static_weight.data).max() <= bound


def test_attention_head_is_structurally_absent_when_disabled():
    on = ModelParams(small_config())
    off = ModelParams(small_config(
        flags=AblationFlags(True, True, True, False)))
    assert on.out_diff is not None
    assert off.out_diff is None
    names_off = [n for n, _ in off.named_tensors()]
    assert "out_diff" not in names_off


def test_branch_sets_follow_sharing_flag():
    per_feature = ModelParams(small_config())
    assert len(per_feature.branch_sets) == 2
    assert per_feature.branches_for(0) is not per_feature.branches_for(1)
    shared = ModelParams(small_config(shared_branches=True))
    assert len(shared.branch_sets) == 1
    assert shared.branches_for(0) is shared.branches_for(1)
    no_corr = ModelParams(small_config(
        flags=AblationFlags(True, True, False, False)))
    assert no_corr.branch_sets == []


def test_params_copy_is_deep():
    config = small_config()
    params = ModelParams.initialized(config, np.random.default_rng(1))
    clone = params.copy()
    clone.static_weight.data[0, 0] += 10.0
    assert params.static_weight.data[0, 0] != clone.static_weight.data[0, 0]


def test_prepare_sample_shape_checks():
    config = small_config()
    rng = np.random.default_rng(0)
    with pytest.raises(ConfigError, match="visits shape"):
        prepare_sample(rng.normal(size=(7, 2)), np.zeros(3), 0, config)
    with pytest.raises(ConfigError, match="static shape"):
        prepare_sample(rng.normal(size=(8, 2)), np.zeros(4), 0, config)
    with pytest.raises(NumericError, match="non-finite static"):
        prepare_sample(rng.normal(size=(8, 2)),
                       np.array([0.0, np.nan, 1.0]), 0, config)


# -- full forward pass ------------------------------------------------------

def numpy_forward_plain(visits, static, params, config):
    """Independent recomputation for configs without the correlation stage."""
    flags = config.flags
    maps = []
    for j in range(config.n_dynamic):
        pair = decompose(visits[:, j], config.order)
        if flags.use_trend and flags.use_variation:
            maps.append(np.vstack([pair.trend, pair.variation]))
        elif flags.use_trend:
            maps.append(pair.trend[None, :])
        else:
            maps.append(pair.variation[None, :])
    fused = np.hstack(maps)
    h_dy = np.tanh(params.mix_weight.data @ fused + params.mix_bias.data)
    h_st = np.tanh(params.static_weight.data @ static
                   + params.static_bias.data)
    logits = (params.out_static.data @ h_st
              + params.out_dynamic.data @ h_dy + params.out_bias.data)
    if flags.use_diff_attention:
        pooled = np.zeros(config.coeff_len - 1)
        for j in range(config.n_dynamic):
            line = decompose(visits[:, j], config.order).variation
            delta = np.diff(line)
            scores = delta * delta / math.sqrt(line.shape[0])
            e = np.exp(scores - scores.max())
            pooled += (e / e.sum()) * delta
        pooled /= config.n_dynamic
        logits = logits + params.out_diff.data @ pooled
    e = np.exp(logits - logits.max())
    return e / e.sum()


@pytest.mark.parametrize("preset", ["A1", "A2", "A3", "A4", "A5"])
def test_forward_matches_numpy_oracle(preset):
    config = small_config(flags=ABLATION_PRESETS[preset])
    rng = np.random.default_rng(11)
    params = ModelParams.initialized(config, rng)
    sample, visits, static = make_sample(config, rng)
    with ad.Tape():
        probs = forward(sample, params, config)
    expected = numpy_forward_plain(visits, static, params, config)
    np.testing.assert_allclose(probs.data, expected, atol=1e-12)


@pytest.mark.parametrize("preset", sorted(ABLATION_PRESETS))
def test_forward_is_a_probability_simplex(preset):
    config = small_config(flags=ABLATION_PRESETS[preset], n_classes=3)
    rng = np.random.default_rng(21)
    params = ModelParams.initialized(config, rng)
    for _ in range(5):
        sample, _, _ = make_sample(config, rng)
        with ad.Tape():
            probs = forward(sample, params, config)
        assert probs.data.shape == (3,)
        assert np.all(np.isfinite(probs.data))
        assert probs.data.min() >= 0.0
        assert abs(probs.data.sum() - 1.0) <= 1e-12


def test_trend_only_sees_level_but_variation_only_does_not():
    """Patients whose histories are flat lines at different levels.

    The variation line of a flat series is zero (up to filter roundoff), so
    a variation-only model collapses them to one prediction; the trend line
    keeps the level, so a trend-only model separates them.
    """
    rng = np.random.default_rng(2)
    static = np.zeros(3)

    def probs_for(config, level):
        params = ModelParams.initialized(config, np.random.default_rng(9))
        visits = np.full((config.t_max, config.n_dynamic), level)
        sample = prepare_sample(visits, static, 0, config)
        with ad.Tape():
            return forward(sample, params, config).data

    trend_cfg = small_config(flags=ABLATION_PRESETS["A1"])
    var_cfg = small_config(flags=ABLATION_PRESETS["A2"])

    p_var_a = probs_for(var_cfg, 0.4)
    p_var_b = probs_for(var_cfg, -0.8)
    np.testing.assert_allclose(p_var_a, p_var_b, atol=1e-9)

    p_tr_a = probs_for(trend_cfg, 0.4)
    p_tr_b = probs_for(trend_cfg, -0.8)
    assert np.abs(p_tr_a - p_tr_b).max() > 1e-3


def test_forward_gradient_reaches_every_parameter():
    config = small_config()
    rng = np.random.default_rng(33)
    params = ModelParams.initialized(config, rng)
    sample, _, _ = make_sample(config, rng)
    with ad.Tape() as tape:
        probs = forward(sample, params, config)
        loss = cross_entropy([probs], [one_hot(sample.label,
                                               config.n_classes)])
        grads = tape.backward(loss, leaves=params.tensors())
    for name, tensor in params.named_tensors():
        g = grads[tensor]
        assert g.shape == tensor.data.shape
        assert np.all(np.isfinite(g)), name


# -- checkpoints ------------------------------------------------------------

def roundtrip(tmp_path, config, stats=None):
    params = ModelParams.initialized(config, np.random.default_rng(5))
    path = tmp_path / "model.ckpt"
    save_checkpoint(path, params, config, stats=stats)
    return params, load_checkpoint(path), path


def test_checkpoint_roundtrip_bitwise(tmp_path):
    config = small_config()
    params, bundle, _ = roundtrip(tmp_path, config)
    assert bundle.config == config
    assert bundle.stats is None
    for (name, src), (_, dst) in zip(params.named_tensors(),
                                     bundle.params.named_tensors()):
        np.testing.assert_array_equal(src.data, dst.data,
                                      err_msg=name)


def test_checkpoint_preserves_flags_and_stats(tmp_path):
    config = small_config(flags=ABLATION_PRESETS["A3"], order=6,
                          dilations=(0, 2, 3))
    stats = FeatureStats(
        dynamic_mean=np.array([0.5, -1.0]),
        dynamic_std=np.array([1.5, 2.0]),
        static_mean=np.array([0.0, 1.0, 2.0]),
        static_std=np.array([1.0, 1.0, 3.0]),
    )
    _, bundle, _ = roundtrip(tmp_path, config, stats=stats)
    assert bundle.config.flags == ABLATION_PRESETS["A3"]
    assert bundle.config.order == 6
    assert bundle.config.dilations == (0, 2, 3)
    np.testing.assert_array_equal(bundle.stats.dynamic_mean,
                                  stats.dynamic_mean)
    np.testing.assert_array_equal(bundle.stats.static_std, stats.static_std)


def test_checkpoint_rejects_foreign_and_damaged_files(tmp_path):
    config = small_config()
    _, _, path = roundtrip(tmp_path, config)

    alien = tmp_path / "alien.bin"
    alien.write_bytes(b"PNGXXXXX" + b"\x00" * 64)
    with pytest.raises(ConfigError, match="unrecognized checkpoint"):
        load_checkpoint(alien)

    blob = path.read_bytes()
    clipped = tmp_path / "clipped.ckpt"
    clipped.write_bytes(blob[:len(blob) // 2])
    with pytest.raises(ConfigError, match="truncated"):
        load_checkpoint(clipped)

    padded = tmp_path / "padded.ckpt"
    padded.write_bytes(blob + b"\x00" * 8)
    with pytest.raises(ConfigError, match="trailing"):
        load_checkpoint(padded)

    missing = tmp_path / "nope.ckpt"
    with pytest.raises(ConfigError, match="cannot read"):
        load_checkpoint(missing)


def test_config_with_returns_updated_copy():
    config = small_config(order=4)
    bumped = config_with(config, order=9)
    assert bumped.order == 9
    assert config.order == 4
    assert bumped.t_max == config.t_max
