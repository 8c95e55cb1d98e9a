"""Interference, coverage and throughput of slotted and non-slotted spatial Aloha."""

from .errors import AlohaError, DomainError, InvalidParameterError, NumericFailure, UsageError
from .model import (
    Deterministic,
    LogNormal,
    Nakagami,
    PathLoss,
    Rain,
    Rayleigh,
    Renewal,
    Scenario,
    Slotted,
)
from .numerics import InversionSpec, QuadSpec
from .sim import Estimate, SimConfig

__all__ = [
    "AlohaError",
    "Deterministic",
    "DomainError",
    "Estimate",
    "InvalidParameterError",
    "InversionSpec",
    "LogNormal",
    "Nakagami",
    "NumericFailure",
    "PathLoss",
    "QuadSpec",
    "Rain",
    "Rayleigh",
    "Renewal",
    "Scenario",
    "SimConfig",
    "Slotted",
    "UsageError",
]
