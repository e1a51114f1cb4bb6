"""Boolean coordinate-descent training for reservoir readouts."""

from boolcd._core import (  # noqa: F401
    ReservoirConfig,
    drive_reservoir,
    fit_exponential,
    fit_power_law,
    kappa,
    lambda_max,
    mackey_glass,
    mse,
    predicted_epochs,
    random_state_matrix,
    readout,
    run_descent,
    synthetic_target,
)

__all__ = [
    "ReservoirConfig",
    "drive_reservoir",
    "fit_exponential",
    "fit_power_law",
    "kappa",
    "lambda_max",
    "mackey_glass",
    "mse",
    "predicted_epochs",
    "random_state_matrix",
    "readout",
    "run_descent",
    "synthetic_target",
]
