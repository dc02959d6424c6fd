"""3-D statistical spatial channel model for 28/73 GHz outdoor links.

Generates omnidirectional channel impulse responses built from time clusters
and spatial lobes, weights them with directive antenna patterns, and computes
the delay and angular statistics used to check the model against measurement.
"""

from sscm.params import (
    Environment,
    FrequencyScenario,
    PathLossParams,
    ScenarioKey,
    ScenarioParams,
    lookup_pathloss,
    lookup_scenario,
)
from sscm.pathloss import free_space_ref_pl, path_loss, received_power
from sscm.chan_gen import ChannelConfig, OmniChannel, generate_channel
from sscm.antenna import AntennaPattern, Pointing, directional_cir, best_pointing
from sscm.stats import rms_delay_spread, global_angular_spread

__version__ = "0.1.0"

__all__ = [
    "AntennaPattern",
    "ChannelConfig",
    "Environment",
    "FrequencyScenario",
    "OmniChannel",
    "PathLossParams",
    "Pointing",
    "ScenarioKey",
    "ScenarioParams",
    "best_pointing",
    "directional_cir",
    "free_space_ref_pl",
    "generate_channel",
    "global_angular_spread",
    "lookup_pathloss",
    "lookup_scenario",
    "path_loss",
    "received_power",
    "rms_delay_spread",
]
