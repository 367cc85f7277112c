"""Device-level simulator of a differential-pair softmax circuit."""

from ._core import (
    Config,
    ConfigError,
    ConvergenceError,
    DomainError,
    branch_noise_budget,
    preset_names,
    preset_text,
    run,
    softmax,
    softmax_gradient,
    square_law_activation,
    thermal_voltage,
)

__all__ = [
    "Config",
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "branch_noise_budget",
    "preset_names",
    "preset_text",
    "run",
    "softmax",
    "softmax_gradient",
    "square_law_activation",
    "thermal_voltage",
]
