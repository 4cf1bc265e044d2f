"""Outage-constrained beamforming for dual-function radar-communication transmitters."""

from .array_model import AngularRegion, UlaConfig, bartlett_power, lobe_matrix, steering_vector
from .chance_constraint import BernsteinData, build_bernstein, build_wbar, monte_carlo_outage
from .channel_model import ChannelSet, UserSpec, achievable_rate, make_rng, realized_sinr, sample_nominal_channels
from .closed_form import SuSolution, su_solve, su_solve_eps_zero
from .metrics import MetricReport, RadarSettings, detection_probability, ismr
from .sdp import SdpSolution, SolverSettings, Status, assemble_p7, feasibility_probe, solve_p7

__version__ = "0.1.0"

__all__ = [
    "AngularRegion", "BernsteinData", "ChannelSet", "MetricReport", "RadarSettings",
    "SdpSolution", "SolverSettings", "Status", "SuSolution", "UlaConfig", "UserSpec",
    "achievable_rate", "assemble_p7", "bartlett_power", "build_bernstein", "build_wbar",
    "detection_probability", "feasibility_probe", "ismr", "lobe_matrix", "make_rng",
    "monte_carlo_outage", "realized_sinr", "sample_nominal_channels", "solve_p7", "steering_vector", "su_solve",
    "su_solve_eps_zero",
]
