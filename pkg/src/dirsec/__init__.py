"""Secrecy-rate optimization for cooperative double-IRS MIMO-OFDM.

Layers, innermost first: ``manifold`` (product-manifold geometry),
``secrecy`` (objective and Wirtinger gradients), ``channel``
(Monte-Carlo generation), ``prgd`` (the Riemannian descent core),
``baselines`` (comparison schemes), ``harness`` (seeded sweeps + CSV),
``cli`` (console entry point).
"""

from . import baselines, channel, cli, harness, manifold, prgd, secrecy
from .baselines import SCHEME_KINDS, SchemeSpec, restricted_problem, solve_scheme
from .channel import CeeConfig, SceneGeometry, generate, inject_cee, keyed_rng
from .harness import ExperimentSpec, ResultRow, preset, run, summarize
from .manifold import IteratePoint, TangentVector
from .prgd import LineSearchError, OptimizerConfig, Problem, RunResult, solve
from .secrecy import ChannelSet, SystemConfig, secrecy_rates

__all__ = [
    "SCHEME_KINDS", "SchemeSpec", "restricted_problem", "solve_scheme",
    "CeeConfig", "SceneGeometry", "generate", "inject_cee", "keyed_rng",
    "ExperimentSpec", "ResultRow", "preset", "run", "summarize",
    "IteratePoint", "TangentVector",
    "LineSearchError", "OptimizerConfig", "Problem", "RunResult", "solve",
    "ChannelSet", "SystemConfig", "secrecy_rates",
    "baselines", "channel", "cli", "harness", "manifold", "prgd", "secrecy",
]

__version__ = "0.1.0"
