"""Command-line entry point: train, eval, forecast, detect-periods, gradcheck.

Every run directory contains exactly one ``manifest.json`` capturing the
effective configuration, seed, dataset fingerprint, and timings; a manifest
alone suffices to reproduce the run (``train --from-manifest``). Exit codes:
0 success, 1 failed check (gradcheck), 2 usage/config error, 3 numeric
failure, 4 artifact corruption.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .autodiff import Tensor, load_checkpoint, save_checkpoint
from .data import SplitSpec, TimeSeries, chrono_split, load_csv, split_at_indices, synth_multiperiodic
from .errors import (
    CheckpointError,
    ContractError,
    DataError,
    EmptyDatasetError,
    NanLossError,
    NumericError,
    UndefinedMetricError,
)
from .metrics import MetricReport, mae, mase, mse, owa, per_horizon_mse, smape
from .model import ModelConfig, count_parameters, forward, init_model_params
from .spectral import AmplitudeSpectrum, detect_salient_periods, sliding_amplitudes
from .training import (
    TrainConfig,
    gradient_check,
    make_windows,
    mse_loss,
    predict_windows,
    train,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_CORRUPT = 4

_MODEL_KEYS = (
    "lookback",
    "horizon",
    "width",
    "num_blocks",
    "num_resolutions",
    "heads",
    "ffn_width",
    "dropout",
    "revin_eps",
    "use_res_emb",
    "share_re_globally",
    "learned_pos_emb",
    "block_residual",
)
_TRAIN_KEYS = (
    "learning_rate",
    "betas",
    "adam_eps",
    "epochs",
    "batch_size",
    "patience",
    "seed",
    "clip_norm",
    "cosine_decay",
)
_DATA_DEFAULTS = {
    "source": None,
    "has_header": True,
    "timestamp_col": "auto",
    "stride": 1,
    "split_fracs": [0.7, 0.1, 0.2],
    "split_at": None,
    "synth_length": 2000,
    "synth_periods": [24.0, 56.0],
    "synth_amps": [2.0, 1.0],
    "synth_phases": None,
    "synth_trend": 0.0,
    "synth_noise": 0.1,
    "synth_variates": 1,
    "synth_seed": 0,
}


@dataclass
class RunManifest:
    """Reproducibility record for one run directory."""

    artifact_version: str
    seed: int
    dataset: dict
    model_config: dict
    train_config: dict
    standardization: dict
    best_val_mse: float
    best_epoch: int
    epochs_run: int
    timings: dict

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, payload: dict) -> "RunManifest":
        return cls(**payload)


def write_manifest(path: str, manifest: RunManifest) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest.to_dict(), fh, indent=2)


def read_manifest(path: str) -> RunManifest:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return RunManifest.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise CheckpointError(f"cannot read manifest {path}: {exc}") from exc


def artifact_version(model_cfg: dict, train_cfg: dict) -> str:
    blob = json.dumps({"model": model_cfg, "train": train_cfg}, sort_keys=True).encode()
    return f"multiresformer-{__version__}+cfg.{hashlib.sha256(blob).hexdigest()[:8]}"


def dataset_fingerprint(series: TimeSeries) -> str:
    return hashlib.sha256(np.ascontiguousarray(series.values).tobytes()).hexdigest()


# -- configuration plumbing ------------------------------------------------------------


def _parse_floats(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ContractError(f"--config {path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ContractError(f"--config {path}: expected a JSON object")
    return payload


def _resolve_configs(args: argparse.Namespace) -> tuple[dict, dict, dict]:
    """Merge defaults <- config file <- explicitly set CLI flags."""
    model = {key: getattr(ModelConfig, key) for key in _MODEL_KEYS if key not in ("lookback", "horizon")}
    model.update({"lookback": None, "horizon": None})
    train_defaults = TrainConfig()
    train_cfg = {key: getattr(train_defaults, key) for key in _TRAIN_KEYS}
    data = dict(_DATA_DEFAULTS)

    if getattr(args, "config", None):
        payload = _load_config_file(args.config)
        model.update({k: v for k, v in payload.get("model", {}).items() if k in _MODEL_KEYS})
        train_cfg.update({k: v for k, v in payload.get("train", {}).items() if k in _TRAIN_KEYS})
        data.update({k: v for k, v in payload.get("data", {}).items() if k in _DATA_DEFAULTS})

    overrides = {
        "lookback": args.lookback,
        "horizon": args.horizon,
        "width": args.width,
        "num_blocks": args.blocks,
        "num_resolutions": args.resolutions,
        "heads": args.heads,
        "ffn_width": args.ffn_width,
        "dropout": args.dropout,
    }
    model.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "no_res_emb", False):
        model["use_res_emb"] = False
    if getattr(args, "block_residual", False):
        model["block_residual"] = True
    if getattr(args, "learned_pos_emb", False):
        model["learned_pos_emb"] = True
    if getattr(args, "per_block_re", False):
        model["share_re_globally"] = False

    train_overrides = {
        "learning_rate": args.lr,
        "epochs": args.epochs,
        "batch_size": args.batch,
        "patience": args.patience,
        "seed": args.seed,
        "clip_norm": args.clip_norm,
    }
    train_cfg.update({k: v for k, v in train_overrides.items() if v is not None})
    if getattr(args, "cosine_decay", False):
        train_cfg["cosine_decay"] = True

    if args.data is not None:
        data["source"] = args.data
    if getattr(args, "no_header", False):
        data["has_header"] = False
    if getattr(args, "timestamp_col", None) is not None:
        data["timestamp_col"] = args.timestamp_col
    if getattr(args, "stride", None) is not None:
        data["stride"] = args.stride
    if getattr(args, "split", None) is not None:
        data["split_fracs"] = _parse_floats(args.split)
        data["split_at"] = None
    if getattr(args, "split_at", None) is not None:
        data["split_at"] = [int(v) for v in args.split_at.split(",")]
    for flag, key in (
        ("synth_length", "synth_length"),
        ("synth_noise", "synth_noise"),
        ("synth_trend", "synth_trend"),
        ("synth_variates", "synth_variates"),
        ("synth_seed", "synth_seed"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            data[key] = value
    if getattr(args, "synth_periods", None) is not None:
        data["synth_periods"] = _parse_floats(args.synth_periods)
    if getattr(args, "synth_amps", None) is not None:
        data["synth_amps"] = _parse_floats(args.synth_amps)
    if getattr(args, "synth_phases", None) is not None:
        data["synth_phases"] = _parse_floats(args.synth_phases)

    if data["source"] is None:
        raise ContractError("--data is required (a CSV path or 'synth')")
    if model["lookback"] is None or model["horizon"] is None:
        raise ContractError("--lookback and --horizon are required")
    train_cfg["betas"] = tuple(train_cfg["betas"])
    return model, train_cfg, data


def _load_series(data: dict) -> TimeSeries:
    if data["source"] == "synth":
        periods = data["synth_periods"]
        amps = data["synth_amps"]
        phases = data["synth_phases"]
        if phases is None:
            phases = [0.3 + 0.8 * i for i in range(len(periods))]
        if not (len(periods) == len(amps) == len(phases)):
            raise ContractError(
                "--synth-periods, --synth-amps and --synth-phases must have equal lengths"
            )
        return synth_multiperiodic(
            length=int(data["synth_length"]),
            specs=list(zip(periods, amps, phases)),
            trend_slope=float(data["synth_trend"]),
            noise_std=float(data["synth_noise"]),
            seed=int(data["synth_seed"]),
            num_variates=int(data["synth_variates"]),
        )
    path = data["source"]
    if not os.path.exists(path):
        raise DataError(f"--data: no such file {path!r}")
    timestamp_col = data["timestamp_col"]
    if timestamp_col == "none":
        timestamp_col = None
    elif timestamp_col == "auto":
        timestamp_col = _detect_timestamp_col(path, data["has_header"])
    elif isinstance(timestamp_col, str) and timestamp_col.isdigit():
        timestamp_col = int(timestamp_col)
    return load_csv(path, has_header=data["has_header"], timestamp_col=timestamp_col)


def _detect_timestamp_col(path: str, has_header: bool) -> str | None:
    if not has_header:
        return None
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
    names = [cell.strip().lower() for cell in first.split(",")]
    for candidate in ("date", "timestamp", "time"):
        if candidate in names:
            return first.split(",")[names.index(candidate)].strip()
    return None


def _split_series(series: TimeSeries, data: dict):
    if data.get("split_at"):
        train_end, val_end = data["split_at"]
        return split_at_indices(series, int(train_end), int(val_end))
    fracs = data["split_fracs"]
    return chrono_split(series, SplitSpec(*[float(f) for f in fracs]))


def _write_history_csv(path: str, history) -> None:
    # wall-clock seconds live in the manifest so this file is rerun-identical
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,train_mse,val_mse\n")
        for row in history:
            fh.write(f"{row.epoch},{row.train_mse!r},{row.val_mse!r}\n")


# -- subcommands -------------------------------------------------------------------------


def cmd_train(args: argparse.Namespace) -> int:
    if args.from_manifest:
        manifest = read_manifest(args.from_manifest)
        model_dict = dict(manifest.model_config)
        train_dict = dict(manifest.train_config)
        train_dict["betas"] = tuple(train_dict["betas"])
        data_dict = dict(manifest.dataset["spec"])
        expected_fingerprint = manifest.dataset["fingerprint"]
    else:
        model_dict, train_dict, data_dict = _resolve_configs(args)
        expected_fingerprint = None

    series = _load_series(data_dict)
    fingerprint = dataset_fingerprint(series)
    if expected_fingerprint is not None and fingerprint != expected_fingerprint:
        print(
            f"error: dataset fingerprint {fingerprint[:12]}... does not match manifest "
            f"{expected_fingerprint[:12]}...",
            file=sys.stderr,
        )
        return EXIT_CORRUPT

    model_cfg = ModelConfig.from_dict(model_dict)
    train_cfg = TrainConfig(**train_dict)
    split = _split_series(series, data_dict)
    stride = int(data_dict["stride"])
    train_windows = make_windows(split.train, model_cfg.lookback, model_cfg.horizon, stride)
    val_windows = make_windows(split.val, model_cfg.lookback, model_cfg.horizon, 1)

    params = init_model_params(model_cfg, seed=train_cfg.seed)
    started = time.perf_counter()
    result = train(params, model_cfg, train_windows, val_windows, train_cfg)
    total_seconds = time.perf_counter() - started

    out_dir = args.out or os.path.join(
        os.environ.get("MRF_OUT_DIR", "runs"), f"run-{train_cfg.seed}-{int(time.time())}"
    )
    os.makedirs(out_dir, exist_ok=True)
    save_checkpoint(params.state_dict(), os.path.join(out_dir, "checkpoint.json"))
    _write_history_csv(os.path.join(out_dir, "history.csv"), result.history)
    manifest = RunManifest(
        artifact_version=artifact_version(model_cfg.to_dict(), {**train_dict, "betas": list(train_cfg.betas)}),
        seed=train_cfg.seed,
        dataset={"spec": data_dict, "fingerprint": fingerprint},
        model_config=model_cfg.to_dict(),
        train_config={**train_dict, "betas": list(train_cfg.betas)},
        standardization={"mean": split.mean.tolist(), "std": split.std.tolist()},
        best_val_mse=result.best_val_mse,
        best_epoch=result.best_epoch,
        epochs_run=result.epochs_run,
        timings={
            "total_seconds": total_seconds,
            "epoch_seconds": [row.seconds for row in result.history],
        },
    )
    write_manifest(os.path.join(out_dir, "manifest.json"), manifest)
    print(
        json.dumps(
            {
                "out_dir": out_dir,
                "best_val_mse": result.best_val_mse,
                "best_epoch": result.best_epoch,
                "epochs_run": result.epochs_run,
                "parameters": count_parameters(params),
            },
            indent=2,
        )
    )
    return EXIT_OK


def _load_run(run_dir: str):
    manifest = read_manifest(os.path.join(run_dir, "manifest.json"))
    model_cfg = ModelConfig.from_dict(manifest.model_config)
    params = init_model_params(model_cfg, seed=manifest.seed)
    params.load_state(load_checkpoint(os.path.join(run_dir, "checkpoint.json")))
    return manifest, model_cfg, params


def cmd_eval(args: argparse.Namespace) -> int:
    manifest, model_cfg, params = _load_run(args.run)
    series = _load_series(manifest.dataset["spec"])
    if dataset_fingerprint(series) != manifest.dataset["fingerprint"]:
        print("error: dataset fingerprint does not match the manifest", file=sys.stderr)
        return EXIT_CORRUPT
    split = _split_series(series, manifest.dataset["spec"])
    segment = {"train": split.train, "val": split.val, "test": split.test}[args.split]
    windows = make_windows(segment, model_cfg.lookback, model_cfg.horizon, 1)
    preds, targets = predict_windows(params, model_cfg, windows)

    smape_value = smape(preds, targets)
    mase_value = None
    owa_value = None
    if args.season is not None:
        insample = segment.values[:, 0]
        mase_value = mase(preds, targets, insample, args.season)
        if args.naive2_smape is not None and args.naive2_mase is not None:
            owa_value = owa(smape_value, mase_value, args.naive2_smape, args.naive2_mase)
    report = MetricReport(
        mse=mse(preds, targets),
        mae=mae(preds, targets),
        smape=smape_value,
        mase=mase_value,
        owa=owa_value,
        per_horizon=per_horizon_mse(preds, targets).tolist() if args.per_horizon else None,
    )
    print(report.to_json())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "metrics.json"), "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
        if args.per_horizon:
            with open(os.path.join(args.out, "per_horizon.csv"), "w", encoding="utf-8") as fh:
                fh.write("step,mse\n")
                for step, value in enumerate(report.per_horizon):
                    fh.write(f"{step},{value!r}\n")
    return EXIT_OK


def cmd_forecast(args: argparse.Namespace) -> int:
    manifest, model_cfg, params = _load_run(args.run)
    timestamp_col = args.timestamp_col
    if timestamp_col == "none":
        timestamp_col = None
    elif timestamp_col == "auto":
        timestamp_col = _detect_timestamp_col(args.input, not args.no_header)
    series = load_csv(args.input, has_header=not args.no_header, timestamp_col=timestamp_col)
    mean = np.asarray(manifest.standardization["mean"])
    std = np.asarray(manifest.standardization["std"])
    if series.num_variates != mean.shape[0]:
        print(
            f"error: --input has {series.num_variates} variates, run was trained on {mean.shape[0]}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    if series.length < model_cfg.lookback:
        print(
            f"error: --input has {series.length} rows, need at least lookback={model_cfg.lookback}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    window = (series.values[-model_cfg.lookback :] - mean) / std
    prediction = forward(Tensor(window[None, :, :]), params, model_cfg, training=False).data[0]
    prediction = prediction * std + mean
    out_path = args.out or "forecast.csv"
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(series.variate_names) + "\n")
        for row in prediction:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    print(json.dumps({"out": out_path, "horizon": model_cfg.horizon, "variates": series.num_variates}))
    return EXIT_OK


def cmd_detect_periods(args: argparse.Namespace) -> int:
    if args.lookback is None:
        raise ContractError("--lookback is required")
    if args.horizon is None:
        args.horizon = 1  # unused by detection; satisfies the shared config resolver
    _, _, data_dict = _resolve_configs(args)
    series = _load_series(data_dict)
    lookback = args.lookback
    k = args.resolutions if args.resolutions is not None else 3
    origins, amps = sliding_amplitudes(series.values, lookback, stride=int(data_dict["stride"]))
    counts: dict[int, int] = {}
    for row in amps:
        detected = detect_salient_periods(AmplitudeSpectrum(row, lookback), k)
        for period in detected.periods:
            counts[period] = counts.get(period, 0) + 1
    num_windows = len(origins)
    payload = {
        "lookback": lookback,
        "k": k,
        "stride": int(data_dict["stride"]),
        "num_windows": num_windows,
        "counts": {str(p): counts[p] for p in sorted(counts)},
        "normalized_counts": {str(p): counts[p] / num_windows for p in sorted(counts)},
    }
    text = json.dumps(payload, indent=2)
    print(text)
    if args.out:
        os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    cfg = ModelConfig(
        lookback=16,
        horizon=4,
        width=8,
        num_blocks=1,
        num_resolutions=2,
        heads=2,
        ffn_width=16,
        dropout=0.0,
    )
    rng = np.random.default_rng(args.seed)
    params = init_model_params(cfg, seed=args.seed)
    x = Tensor(rng.normal(size=(2, cfg.lookback, 2)))
    y = rng.normal(size=(2, cfg.horizon, 2))

    def loss_fn():
        return mse_loss(forward(x, params, cfg, training=False), y)

    report = gradient_check(
        loss_fn,
        params.named_parameters(),
        h=args.step_size,
        tolerance=args.tolerance,
        seed=args.seed,
        _corrupt=args.corrupt,
    )
    worst = report.worst
    print(
        json.dumps(
            {
                "checked": report.checked,
                "max_rel_error": report.max_rel_error,
                "mean_rel_error": report.mean_rel_error,
                "worst_param": worst.param if worst else None,
                "worst_index": worst.index if worst else None,
                "tolerance": report.tolerance,
                "passed": report.passed,
                "failures": [
                    {"param": f.param, "index": f.index, "rel_error": f.rel_error}
                    for f in report.failures[:10]
                ],
            },
            indent=2,
        )
    )
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


# -- parser ------------------------------------------------------------------------------


def _add_data_flags(parser: argparse.ArgumentParser, require_data: bool) -> None:
    parser.add_argument("--data", required=require_data, help="CSV path or 'synth'")
    parser.add_argument("--config", help="JSON config file (flags override it)")
    parser.add_argument("--no-header", action="store_true", help="CSV has no header row")
    parser.add_argument("--timestamp-col", help="column name/index, 'auto', or 'none'")
    parser.add_argument("--stride", type=int, help="window stride (default 1)")
    parser.add_argument("--split", help="train,val,test fractions, e.g. 0.7,0.1,0.2")
    parser.add_argument("--split-at", help="explicit boundary indices, e.g. 1400,1600")
    parser.add_argument("--synth-length", type=int, help="synthetic series length")
    parser.add_argument("--synth-periods", help="comma list of periods (default 24,56)")
    parser.add_argument("--synth-amps", help="comma list of amplitudes (default 2,1)")
    parser.add_argument("--synth-phases", help="comma list of phases")
    parser.add_argument("--synth-trend", type=float, help="linear trend slope")
    parser.add_argument("--synth-noise", type=float, help="Gaussian noise std (default 0.1)")
    parser.add_argument("--synth-variates", type=int, help="number of synthetic variates")
    parser.add_argument("--synth-seed", type=int, help="generator seed (default 0)")


def _add_model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lookback", type=int, help="look-back window length I")
    parser.add_argument("--horizon", type=int, help="forecast horizon O")
    parser.add_argument("--width", type=int, help="model width d")
    parser.add_argument("--blocks", type=int, help="number of encoder blocks N")
    parser.add_argument("--resolutions", type=int, help="resolution branches per block k")
    parser.add_argument("--heads", type=int, help="attention heads")
    parser.add_argument("--ffn-width", type=int, help="feed-forward hidden width")
    parser.add_argument("--dropout", type=float, help="dropout rate")
    parser.add_argument("--no-res-emb", action="store_true", help="disable the resolution embedding")
    parser.add_argument("--block-residual", action="store_true", help="add a residual around each block")
    parser.add_argument("--learned-pos-emb", action="store_true", help="enable learned positional embeddings")
    parser.add_argument("--per-block-re", action="store_true", help="per-block resolution embeddings")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mrf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model and write a run directory")
    _add_data_flags(p_train, require_data=False)
    _add_model_flags(p_train)
    p_train.add_argument("--epochs", type=int)
    p_train.add_argument("--batch", type=int)
    p_train.add_argument("--lr", type=float)
    p_train.add_argument("--patience", type=int)
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--clip-norm", type=float)
    p_train.add_argument("--cosine-decay", action="store_true")
    p_train.add_argument("--out", help="run directory (default under $MRF_OUT_DIR)")
    p_train.add_argument("--from-manifest", help="reproduce a run from its manifest.json")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a trained run on a split")
    p_eval.add_argument("--run", required=True, help="run directory with manifest + checkpoint")
    p_eval.add_argument("--split", choices=("train", "val", "test"), default="test")
    p_eval.add_argument("--per-horizon", action="store_true", help="emit per-step MSE")
    p_eval.add_argument("--season", type=int, help="season for MASE")
    p_eval.add_argument("--naive2-smape", type=float, help="Naive2 SMAPE reference for OWA")
    p_eval.add_argument("--naive2-mase", type=float, help="Naive2 MASE reference for OWA")
    p_eval.add_argument("--out", help="directory for metrics.json / per_horizon.csv")
    p_eval.set_defaults(func=cmd_eval)

    p_forecast = sub.add_parser("forecast", help="forecast from the last look-back window of a CSV")
    p_forecast.add_argument("--run", required=True)
    p_forecast.add_argument("--input", required=True, help="input CSV")
    p_forecast.add_argument("--no-header", action="store_true")
    p_forecast.add_argument("--timestamp-col", default="auto")
    p_forecast.add_argument("--out", help="output CSV path (default forecast.csv)")
    p_forecast.set_defaults(func=cmd_forecast)

    p_detect = sub.add_parser("detect-periods", help="histogram of detected periods over sliding windows")
    _add_data_flags(p_detect, require_data=True)
    _add_model_flags(p_detect)
    p_detect.add_argument("--seed", type=int)
    p_detect.add_argument("--out", help="output JSON path")
    p_detect.set_defaults(func=cmd_detect_periods)

    p_grad = sub.add_parser("gradcheck", help="finite-difference gradient check on a tiny model")
    p_grad.add_argument("--seed", type=int, default=0)
    p_grad.add_argument("--tolerance", type=float, default=1e-4)
    p_grad.add_argument("--step-size", type=float, default=1e-5)
    p_grad.add_argument("--corrupt", help="test hook: corrupt this parameter's analytic gradient")
    p_grad.set_defaults(func=cmd_gradcheck)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ContractError, DataError, EmptyDatasetError, UndefinedMetricError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NanLossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CheckpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CORRUPT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
