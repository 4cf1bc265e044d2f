from .embedding import complex_from_embed, real_embed
from .ipm import IpmResult, interior_point
from .p7 import P7Layout, assemble_p7
from .problem import ProblemBuilder, PsdBlock, SdpProblem, SolverSettings, Status
from .rank_one import Beamformer, extract_beamformer
from .solution import PROBE_TOL, SdpSolution, check_beamformers, feasibility_probe, solve, solve_p7

__all__ = [
    "Beamformer", "IpmResult", "P7Layout", "ProblemBuilder", "PsdBlock", "SdpProblem",
    "PROBE_TOL", "SdpSolution", "SolverSettings", "Status", "assemble_p7", "check_beamformers",
    "complex_from_embed", "extract_beamformer", "feasibility_probe", "interior_point",
    "real_embed", "solve", "solve_p7",
]
