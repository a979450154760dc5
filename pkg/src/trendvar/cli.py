"""Command line interface.

Subcommands: synth, train, eval, decompose, correlate, inspect-attention,
sweep-symlets.  Every run resolves its effective configuration from
defaults, an optional ``--settings`` file (``key = value`` lines) and
explicit flags, in that precedence order, then echoes the result as a
manifest and writes it to ``<out>/manifest.txt`` before producing anything
else.  All floats are written with repr(), so repeated runs with the same
inputs produce byte-identical files.

Exit codes: 0 success, 1 configuration problem, 2 data problem,
3 numerical failure.
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import autodiff as ad
from .data import (
    SynthSpec,
    compute_stats,
    load_cohort,
    load_visit_table,
    normalize,
    pad_to_length,
    synth_generate,
    write_cohort,
)
from .diff_attention import diff_attention
from .errors import ConfigError, DataError, NumericError, TrendvarError
from .metrics import macro_one_vs_rest, trend_variation_report
from .model import (
    ModelConfig,
    ablation_from_name,
    load_checkpoint,
    save_checkpoint,
)
from .training import (
    TrainConfig,
    cross_validate,
    predict_probs,
    prepare_cohort,
)
from .wavelets import MAX_ORDER, MIN_ORDER, decompose


def _fmt(value):
    return repr(float(value))


def _parse_int(text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _parse_float(text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None


def _parse_bool(text):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_dilations(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ConfigError(
            f"expected three comma-separated dilation rates, got {text!r}"
        )
    return tuple(_parse_int(p) for p in parts)


def _parse_float_tuple(text):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}")
    return tuple(_parse_float(p) for p in parts)


class _Option:
    def __init__(self, flag, convert, default, help_text, is_switch=False):
        self.flag = flag
        self.dest = flag.lstrip("-").replace("-", "_")
        self.convert = convert
        self.default = default
        self.help = help_text
        self.is_switch = is_switch


def _opt(flag, convert, default, help_text):
    return _Option(flag, convert, default, help_text)


def _switch(flag, help_text):
    return _Option(flag, _parse_bool, False, help_text, is_switch=True)


_DATA_OPTS = [
    _opt("--visits", str, None, "visits.csv path"),
    _opt("--static", str, None, "static.csv path"),
    _opt("--labels", str, None, "labels.csv path"),
    _opt("--synth", str, None, "synthetic preset name instead of data paths"),
]

_MODEL_OPTS = [
    _opt("--symlet", _parse_int, 14, "symlet order K (2..20)"),
    _opt("--kernel-width", _parse_int, 2, "convolution kernel width"),
    _opt("--dilations", _parse_dilations, (0, 1, 3),
         "three branch dilation rates, e.g. 0,1,3"),
    _opt("--tmax", _parse_int, 0,
         "visits per patient after padding (0 = longest history)"),
    _opt("--config", str, "A7", "ablation config A1..A7"),
    _switch("--shared-branches", "share convolution kernels across features"),
]

_TRAIN_OPTS = [
    _opt("--lr", _parse_float, 1e-4, "Adam learning rate"),
    _opt("--batch", _parse_int, 64, "batch size"),
    _opt("--epochs", _parse_int, 50, "training epochs"),
    _opt("--folds", _parse_int, 10, "cross-validation folds"),
    _switch("--parallel-folds", "run folds in a thread pool"),
]

_SEED_OPT = _opt("--seed", _parse_int, 0, "master random seed")
_OUT_OPT = _opt("--out", str, None, "output directory (required)")
_SETTINGS_OPT = _opt("--settings", str, None,
                     "settings file with key = value lines")
_FEATURE_OPT = _opt("--feature", str, None,
                    "restrict to one dynamic feature by name")
_CHECKPOINT_OPT = _opt("--checkpoint", str, None, "model checkpoint path")

_SYNTH_OPTS = [
    _opt("--patients", _parse_int, 120, "number of patients"),
    _opt("--classes", _parse_int, 3, "number of classes"),
    _opt("--slopes", _parse_float_tuple, (-1.2, 0.0, 1.2),
         "per-class trend slopes"),
    _opt("--amplitudes", _parse_float_tuple, (0.4, 1.0, 0.7),
         "per-class oscillation amplitudes"),
    _opt("--corr-signs", _parse_float_tuple, (1.0, -1.0, 1.0),
         "per-class trend/variation coupling signs"),
    _opt("--features", _parse_int, 5, "dynamic features"),
    _opt("--static-features", _parse_int, 4, "static features"),
    _opt("--mean-visits", _parse_float, 12.0, "mean visits per patient"),
    _opt("--noise", _parse_float, 0.15, "observation noise std"),
    _opt("--noise-features", _parse_int, 0, "trailing pure-noise features"),
    _switch("--randomize-trend", "flip trend direction per feature at random"),
    _opt("--static-weight", _parse_float, 0.2,
         "class leaning of the binary statics"),
]

_COMMANDS = {
    "synth": _SYNTH_OPTS + [_SEED_OPT, _OUT_OPT, _SETTINGS_OPT],
    "train": _DATA_OPTS + _MODEL_OPTS + _TRAIN_OPTS
        + [_SEED_OPT, _OUT_OPT, _SETTINGS_OPT],
    "eval": _DATA_OPTS + [_CHECKPOINT_OPT, _SEED_OPT, _OUT_OPT,
                          _SETTINGS_OPT],
    "decompose": [_DATA_OPTS[0], _DATA_OPTS[3], _MODEL_OPTS[0], _FEATURE_OPT,
                  _SEED_OPT, _OUT_OPT, _SETTINGS_OPT],
    "correlate": [_DATA_OPTS[0], _DATA_OPTS[3], _MODEL_OPTS[0], _SEED_OPT,
                  _OUT_OPT, _SETTINGS_OPT],
    "inspect-attention": [_DATA_OPTS[0], _DATA_OPTS[3], _CHECKPOINT_OPT,
                          _FEATURE_OPT, _SEED_OPT, _OUT_OPT, _SETTINGS_OPT],
    "sweep-symlets": _DATA_OPTS + _MODEL_OPTS + _TRAIN_OPTS
        + [_SEED_OPT, _OUT_OPT, _SETTINGS_OPT],
}

SYNTH_PRESETS = {
    # Mixed slopes, amplitudes and coupling signs: every stage has signal.
    "default": SynthSpec(
        n_patients=120, n_classes=3, slopes=(-1.2, 0.0, 1.2),
        amplitudes=(0.4, 1.0, 0.7), corr_signs=(1.0, -1.0, 1.0),
        n_dynamic=5, n_static=4, mean_visits=12.0, noise_scale=0.15,
    ),
    # Larger three-class cohort for learning checks.
    "threeclass": SynthSpec(
        n_patients=1000, n_classes=3, slopes=(-1.0, 0.0, 1.0),
        amplitudes=(0.3, 0.9, 0.6), corr_signs=(1.0, -1.0, 1.0),
        n_dynamic=3, n_static=3, mean_visits=12.0, noise_scale=0.2,
    ),
    # Class signal lives ONLY in the trend/variation coupling sign: trend
    # direction is a per-feature coin flip and statics carry nothing.
    "coupled": SynthSpec(
        n_patients=400, n_classes=2, slopes=(1.0, 1.0),
        amplitudes=(0.8, 0.8), corr_signs=(1.0, -1.0),
        n_dynamic=3, n_static=2, mean_visits=12.0, noise_scale=0.1,
        randomize_trend_direction=True, static_class_weight=0.0,
    ),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser():
    parser = _Parser(prog="trendvar", description=__doc__)
    sub = parser.add_subparsers(dest="command")
    for command, options in _COMMANDS.items():
        cmd_parser = sub.add_parser(command, add_help=True)
        for option in options:
            if option.is_switch:
                cmd_parser.add_argument(
                    option.flag, dest=option.dest, action="store_const",
                    const="true", default=None, help=option.help)
            else:
                cmd_parser.add_argument(
                    option.flag, dest=option.dest, type=str, default=None,
                    help=option.help)
    return parser


def _read_settings(path):
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read settings file {path}: {exc}") from exc
    values = {}
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(
                f"{path}:{line_no}: expected 'key = value', got {stripped!r}"
            )
        key, _, value = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if not key:
            raise ConfigError(f"{path}:{line_no}: empty key")
        if key in values:
            raise ConfigError(f"{path}:{line_no}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def _resolve(args, options):
    """Merge defaults, settings file and explicit flags into one dict."""
    settings = {}
    if getattr(args, "settings", None):
        settings = _read_settings(args.settings)
    settings.pop("settings", None)
    effective = {}
    for option in options:
        if option.dest == "settings":
            effective[option.dest] = getattr(args, "settings", None)
            continue
        raw_cli = getattr(args, option.dest, None)
        raw_file = settings.pop(option.dest, None)
        if raw_cli is not None:
            effective[option.dest] = option.convert(raw_cli)
        elif raw_file is not None:
            effective[option.dest] = option.convert(raw_file)
        else:
            effective[option.dest] = option.default
    if settings:
        unknown = ", ".join(sorted(settings))
        raise ConfigError(f"unknown settings keys: {unknown}")
    return effective


def _manifest_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(_manifest_value(v) for v in value)
    return str(value)


def _write_manifest(out_dir, command, effective):
    lines = [f"command = {command}"]
    for key in sorted(effective):
        if key == "settings":
            continue
        lines.append(f"{key} = {_manifest_value(effective[key])}")
    text = "\n".join(lines) + "\n"
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "manifest.txt"), "w") as fh:
        fh.write(text)
    sys.stdout.write(text)


def _require_out(opts):
    if not opts.get("out"):
        raise ConfigError("--out is required")
    return opts["out"]


def _preset_spec(name, seed):
    if name not in SYNTH_PRESETS:
        raise ConfigError(
            f"unknown synthetic preset {name!r}: choose from "
            f"{', '.join(sorted(SYNTH_PRESETS))}"
        )
    return replace(SYNTH_PRESETS[name], seed=seed)


def _load_full_cohort(opts):
    if opts.get("synth"):
        if opts.get("visits") or opts.get("static") or opts.get("labels"):
            raise ConfigError(
                "provide either --synth or the three data paths, not both"
            )
        return synth_generate(_preset_spec(opts["synth"], opts["seed"]))
    missing = [flag for flag, key in
               (("--visits", "visits"), ("--static", "static"),
                ("--labels", "labels")) if not opts.get(key)]
    if missing:
        raise ConfigError(
            f"missing {', '.join(missing)} (or use --synth <preset>)"
        )
    return load_cohort(opts["visits"], opts["static"], opts["labels"])


def _load_visit_tables(opts):
    if opts.get("synth"):
        if opts.get("visits"):
            raise ConfigError("provide either --synth or --visits, not both")
        cohort = synth_generate(_preset_spec(opts["synth"], opts["seed"]))
        tables = {p.patient_id: p.visits for p in cohort.patients}
        return tables, cohort.dynamic_names
    if not opts.get("visits"):
        raise ConfigError("missing --visits (or use --synth <preset>)")
    return load_visit_table(opts["visits"])


def _resolve_tmax(opts, cohort):
    tmax = opts["tmax"]
    if tmax == 0:
        tmax = max(p.visits.shape[0] for p in cohort.patients)
    if tmax < 1:
        raise ConfigError(f"--tmax must be >= 1, got {tmax}")
    return tmax


def _model_config(opts, cohort, tmax):
    if cohort.n_classes < 2:
        raise DataError("cohort holds a single class; nothing to discriminate")
    return ModelConfig(
        t_max=tmax,
        n_dynamic=cohort.n_dynamic,
        n_static=cohort.n_static,
        n_classes=cohort.n_classes,
        order=opts["symlet"],
        kernel_width=opts["kernel_width"],
        dilations=opts["dilations"],
        flags=ablation_from_name(opts["config"]),
        shared_branches=opts["shared_branches"],
    )


def _train_config(opts):
    return TrainConfig(
        learning_rate=opts["lr"],
        batch_size=opts["batch"],
        epochs=opts["epochs"],
        seed=opts["seed"],
    )


def _write_metric_rows(path, rows):
    with open(path, "w") as fh:
        fh.write("fold,class,auroc,auprc\n")
        for fold, cls, auroc, auprc in rows:
            a = _fmt(auroc) if auroc is not None else ""
            p = _fmt(auprc) if auprc is not None else ""
            fh.write(f"{fold},{cls},{a},{p}\n")


def _metric_rows_for(fold_label, auroc, auprc):
    rows = []
    classes = sorted(set(auroc.per_class) | set(auprc.per_class)
                     | set(auroc.skipped) | set(auprc.skipped))
    for cls in classes:
        rows.append((
            fold_label, cls,
            auroc.per_class.get(cls), auprc.per_class.get(cls),
        ))
    rows.append((fold_label, "macro", auroc.value, auprc.value))
    return rows


def cmd_synth(opts):
    out = _require_out(opts)
    _write_manifest(out, "synth", opts)
    spec = SynthSpec(
        n_patients=opts["patients"],
        n_classes=opts["classes"],
        slopes=opts["slopes"],
        amplitudes=opts["amplitudes"],
        corr_signs=opts["corr_signs"],
        n_dynamic=opts["features"],
        n_static=opts["static_features"],
        mean_visits=opts["mean_visits"],
        noise_scale=opts["noise"],
        n_noise_features=opts["noise_features"],
        randomize_trend_direction=opts["randomize_trend"],
        static_class_weight=opts["static_weight"],
        seed=opts["seed"],
    )
    cohort = synth_generate(spec)
    write_cohort(cohort, out)
    sys.stdout.write(
        f"wrote {len(cohort.patients)} patients, "
        f"{cohort.n_dynamic} dynamic / {cohort.n_static} static features\n"
    )


def _run_cv(opts, cohort, config, out, write_checkpoints=True):
    cv = cross_validate(cohort, opts["folds"], config, _train_config(opts),
                        parallel=opts["parallel_folds"])
    rows = []
    for fold in cv.folds:
        rows.extend(_metric_rows_for(fold.fold, fold.auroc, fold.auprc))
        with open(os.path.join(out, f"epochs_fold{fold.fold}.csv"), "w") as fh:
            fh.write("epoch,mean_loss\n")
            for record in fold.epoch_log:
                fh.write(f"{record.epoch},{_fmt(record.mean_loss)}\n")
        if write_checkpoints:
            save_checkpoint(os.path.join(out, f"fold{fold.fold}.ckpt"),
                            fold.params, config, fold.stats)
    rows.append(("mean", "macro", cv.mean_auroc, cv.mean_auprc))
    _write_metric_rows(os.path.join(out, "metrics.csv"), rows)
    summary = [
        f"folds = {opts['folds']}",
        f"mean_macro_auroc = {_fmt(cv.mean_auroc)}",
        f"mean_macro_auprc = {_fmt(cv.mean_auprc)}",
    ]
    for fold in cv.folds:
        skipped = ",".join(str(c) for c in sorted(
            set(fold.auroc.skipped) | set(fold.auprc.skipped))) or "none"
        summary.append(
            f"fold {fold.fold}: auroc = {_fmt(fold.auroc.value)} "
            f"auprc = {_fmt(fold.auprc.value)} skipped = {skipped}"
        )
    with open(os.path.join(out, "summary.txt"), "w") as fh:
        fh.write("\n".join(summary) + "\n")
    sys.stdout.write(
        f"mean macro auroc = {_fmt(cv.mean_auroc)}\n"
        f"mean macro auprc = {_fmt(cv.mean_auprc)}\n"
    )
    return cv


def cmd_train(opts):
    out = _require_out(opts)
    cohort = _load_full_cohort(opts)
    tmax = _resolve_tmax(opts, cohort)
    config = _model_config(opts, cohort, tmax)
    effective = dict(opts)
    effective["tmax"] = tmax
    _write_manifest(out, "train", effective)
    _run_cv(opts, cohort, config, out)


def cmd_sweep(opts):
    out = _require_out(opts)
    cohort = _load_full_cohort(opts)
    tmax = _resolve_tmax(opts, cohort)
    effective = dict(opts)
    effective["tmax"] = tmax
    effective["symlet"] = "2..20"
    _write_manifest(out, "sweep-symlets", effective)
    results = []
    for order in range(MIN_ORDER, MAX_ORDER + 1):
        inner = dict(opts)
        inner["symlet"] = order
        config = _model_config(inner, cohort, tmax)
        cv = cross_validate(cohort, opts["folds"], config,
                            _train_config(opts),
                            parallel=opts["parallel_folds"])
        results.append((order, cv.mean_auroc, cv.mean_auprc))
    with open(os.path.join(out, "sweep.csv"), "w") as fh:
        fh.write("order,mean_macro_auroc,mean_macro_auprc\n")
        for order, auroc, auprc in results:
            fh.write(f"{order},{_fmt(auroc)},{_fmt(auprc)}\n")
    best = max(results, key=lambda r: (r[1], -r[0]))
    with open(os.path.join(out, "summary.txt"), "w") as fh:
        fh.write(f"best_order = {best[0]}\n")
        fh.write(f"best_mean_macro_auroc = {_fmt(best[1])}\n")
    sys.stdout.write(
        f"best order = {best[0]} (auroc {_fmt(best[1])})\n"
    )


def cmd_eval(opts):
    out = _require_out(opts)
    if not opts.get("checkpoint"):
        raise ConfigError("--checkpoint is required")
    bundle = load_checkpoint(opts["checkpoint"])
    cohort = _load_full_cohort(opts)
    config = bundle.config
    if cohort.n_dynamic != config.n_dynamic \
            or cohort.n_static != config.n_static:
        raise ConfigError(
            f"checkpoint/data dimension mismatch: model expects "
            f"{config.n_dynamic} dynamic and {config.n_static} static "
            f"features, data has {cohort.n_dynamic} and {cohort.n_static}"
        )
    if cohort.n_classes > config.n_classes:
        raise ConfigError(
            f"checkpoint/data dimension mismatch: model predicts "
            f"{config.n_classes} classes, data labels reach "
            f"{cohort.n_classes - 1}"
        )
    _write_manifest(out, "eval", opts)
    # Prefer the stats the weights were trained under; fall back to the
    # evaluation cohort's own stats for checkpoints that lack them.
    stats = bundle.stats if bundle.stats is not None \
        else compute_stats(cohort.patients)
    prepared_cohort = pad_to_length(normalize(cohort, stats), config.t_max)
    samples = prepare_cohort(prepared_cohort, config)
    probs = predict_probs(samples, bundle.params)
    labels = cohort.labels()
    with open(os.path.join(out, "scored.csv"), "w") as fh:
        header = ",".join(f"prob_{k}" for k in range(config.n_classes))
        fh.write(f"patient_id,label,{header}\n")
        for patient, row in zip(cohort.patients, probs):
            cells = ",".join(_fmt(v) for v in row)
            fh.write(f"{patient.patient_id},{patient.label},{cells}\n")
    auroc = macro_one_vs_rest(probs, labels, "auroc")
    auprc = macro_one_vs_rest(probs, labels, "auprc")
    _write_metric_rows(os.path.join(out, "metrics.csv"),
                       _metric_rows_for(0, auroc, auprc))
    with open(os.path.join(out, "summary.txt"), "w") as fh:
        fh.write(f"macro_auroc = {_fmt(auroc.value)}\n")
        fh.write(f"macro_auprc = {_fmt(auprc.value)}\n")
    sys.stdout.write(
        f"macro auroc = {_fmt(auroc.value)}\n"
        f"macro auprc = {_fmt(auprc.value)}\n"
    )


def _select_features(names, wanted):
    if wanted is None:
        return list(names)
    if wanted not in names:
        raise ConfigError(
            f"unknown feature {wanted!r}: available: {', '.join(names)}"
        )
    return [wanted]


def cmd_decompose(opts):
    out = _require_out(opts)
    tables, names = _load_visit_tables(opts)
    chosen = _select_features(names, opts.get("feature"))
    _write_manifest(out, "decompose", opts)
    order = opts["symlet"]
    path = os.path.join(out, "decomposition.csv")
    count = 0
    with open(path, "w") as fh:
        fh.write("patient_id,feature,kind,index,value\n")
        for pid, matrix in tables.items():
            for name in chosen:
                column = matrix[:, names.index(name)]
                pair = decompose(column, order)
                for kind, line in (("trend", pair.trend),
                                   ("variation", pair.variation)):
                    for i, value in enumerate(line):
                        fh.write(f"{pid},{name},{kind},{i},{_fmt(value)}\n")
                        count += 1
    sys.stdout.write(f"wrote {count} coefficient rows\n")


def cmd_correlate(opts):
    out = _require_out(opts)
    tables, names = _load_visit_tables(opts)
    _write_manifest(out, "correlate", opts)
    rows = trend_variation_report(tables, names, opts["symlet"])
    path = os.path.join(out, "correlation.csv")
    with open(path, "w") as fh:
        fh.write("rank,feature,mean_abs_correlation,mean_correlation,"
                 "n_defined,n_undefined,top5\n")
        for rank, row in enumerate(rows, start=1):
            flag = "true" if rank <= 5 else "false"
            fh.write(
                f"{rank},{row.feature},{_fmt(row.mean_abs_correlation)},"
                f"{_fmt(row.mean_correlation)},{row.n_defined},"
                f"{row.n_undefined},{flag}\n"
            )
    for rank, row in enumerate(rows[:5], start=1):
        sys.stdout.write(
            f"{rank}. {row.feature}: mean |r| = "
            f"{_fmt(row.mean_abs_correlation)}\n"
        )


def cmd_inspect_attention(opts):
    out = _require_out(opts)
    if not opts.get("checkpoint"):
        raise ConfigError("--checkpoint is required")
    bundle = load_checkpoint(opts["checkpoint"])
    config = bundle.config
    if not config.flags.use_diff_attention:
        raise ConfigError(
            "difference attention is disabled in this checkpoint; nothing "
            "to inspect"
        )
    tables, names = _load_visit_tables(opts)
    if len(names) != config.n_dynamic:
        raise ConfigError(
            f"checkpoint/data dimension mismatch: model expects "
            f"{config.n_dynamic} dynamic features, data has {len(names)}"
        )
    chosen = _select_features(names, opts.get("feature"))
    _write_manifest(out, "inspect-attention", opts)
    path = os.path.join(out, "attention.csv")
    with open(path, "w") as fh:
        fh.write("patient_id,feature,position,delta,weight,weighted\n")
        for pid, matrix in tables.items():
            for name in chosen:
                j = names.index(name)
                column = matrix[:, j].copy()
                if bundle.stats is not None:
                    std = bundle.stats.dynamic_std[j]
                    column -= bundle.stats.dynamic_mean[j]
                    column = column / std if std > 0 else column * 0.0
                t = column.shape[0]
                if t >= config.t_max:
                    column = column[t - config.t_max:]
                else:
                    column = np.concatenate(
                        [column, np.full(config.t_max - t, column[-1])])
                pair = decompose(column, config.order)
                with ad.Tape():
                    result = diff_attention(ad.Tensor(pair.variation,
                                                      const=True))
                deltas = np.diff(pair.variation)
                for i in range(result.weights.data.shape[0]):
                    fh.write(
                        f"{pid},{name},{i},{_fmt(deltas[i])},"
                        f"{_fmt(result.weights.data[i])},"
                        f"{_fmt(result.weighted_diff.data[i])}\n"
                    )
    sys.stdout.write(f"wrote attention weights for {len(tables)} patients\n")


_HANDLERS = {
    "synth": cmd_synth,
    "train": cmd_train,
    "eval": cmd_eval,
    "decompose": cmd_decompose,
    "correlate": cmd_correlate,
    "inspect-attention": cmd_inspect_attention,
    "sweep-symlets": cmd_sweep,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise ConfigError(
                f"missing command: choose from {', '.join(sorted(_HANDLERS))}"
            )
        opts = _resolve(args, _COMMANDS[args.command])
        _HANDLERS[args.command](opts)
        return 0
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return 1
    except DataError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return 2
    except NumericError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return 3
    except TrendvarError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
