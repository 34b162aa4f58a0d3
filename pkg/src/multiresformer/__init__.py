"""Adaptive multi-resolution transformer forecasting engine.

The public surface re-exports the pieces most callers need: the autodiff
tensor core, periodicity detection, the model assembly, the training loop,
and the evaluation metrics. See the CLI (``mrf --help``) for the end-to-end
workflow.
"""

__version__ = "0.1.0"

from .autodiff import Parameter, Tensor, load_checkpoint, save_checkpoint
from .data import SplitSpec, TimeSeries, chrono_split, load_csv, save_csv, synth_multiperiodic
from .metrics import MetricReport, linear_cka, mae, mase, mse, owa, smape
from .model import (
    ModelConfig,
    ModelParams,
    count_parameters,
    forward,
    init_model_params,
    multires_block,
    revin_denormalize,
    revin_normalize,
)
from .spectral import (
    AmplitudeSpectrum,
    PeriodicitySet,
    amplitude_spectrum,
    detect_salient_periods,
)
from .training import (
    TrainConfig,
    WindowSample,
    adam_step,
    gradient_check,
    make_windows,
    mse_loss,
    train,
)

__all__ = [
    "__version__",
    "Parameter",
    "Tensor",
    "load_checkpoint",
    "save_checkpoint",
    "SplitSpec",
    "TimeSeries",
    "chrono_split",
    "load_csv",
    "save_csv",
    "synth_multiperiodic",
    "MetricReport",
    "linear_cka",
    "mae",
    "mase",
    "mse",
    "owa",
    "smape",
    "ModelConfig",
    "ModelParams",
    "count_parameters",
    "forward",
    "init_model_params",
    "multires_block",
    "revin_denormalize",
    "revin_normalize",
    "AmplitudeSpectrum",
    "PeriodicitySet",
    "amplitude_spectrum",
    "detect_salient_periods",
    "TrainConfig",
    "WindowSample",
    "adam_step",
    "gradient_check",
    "make_windows",
    "mse_loss",
    "train",
]
