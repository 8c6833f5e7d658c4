"""Secrecy metrics for uplink satellite links under stochastic eavesdropper constellations."""

from satsec.channel import FadingParams, SystemParams, LinkBudget
from satsec.geometry import EavesdropperLayer, ServingGeometry
from satsec.snrdist import Scenario, make_scenario

__all__ = [
    "FadingParams",
    "SystemParams",
    "LinkBudget",
    "EavesdropperLayer",
    "ServingGeometry",
    "Scenario",
    "make_scenario",
]

__version__ = "0.1.0"
