"""Python bindings for the latetail library."""

from ._latetail import (
    DomainError,
    Error,
    RadialProfile,
    inverse_tortoise,
    local_power_index,
    model_bracket,
    model_solution,
    predicted_constant,
    profile_integral,
    tail_fit,
    tortoise,
    u_plus,
)

__all__ = [
    "DomainError",
    "Error",
    "RadialProfile",
    "inverse_tortoise",
    "local_power_index",
    "model_bracket",
    "model_solution",
    "predicted_constant",
    "profile_integral",
    "tail_fit",
    "tortoise",
    "u_plus",
]
