"""Model-free mechanics with an invertible-network manifold embedding.

Core pipeline: synthesize a material database (``phasespace``), learn the
embedding (``invertible`` + ``training``), project locally (``projection``),
and drive the alternating solver (``ddsolver``) over a discretized domain
(``fem``). ``experiments`` reproduces the benchmark problems end to end.
"""

from .ddsolver import (DDResult, NotConvergedError, PathResult, SolverConfig,
                       dd_solve, dd_solve_path, functional_value)
from .invertible import (AutoencoderPair, CouplingLayer, InvertibleNet,
                         build_autoencoder, build_invertible, load_embedding,
                         save_embedding)
from .phasespace import (MaterialDatabase, NormalizationTransform, PhasePoint,
                         VoigtConvention, gen_bar_incomplete, gen_bar_tanh,
                         gen_heat_tanh, gen_planestrain, gen_sqrt_toy, normalize)
from .projection import (EnergyMetric, ManifoldProjector, NnIndex,
                         convex_interpolate, energy_distance2,
                         hyperplane_residual, manifold_project, nn_project)
from .training import (TrainConfig, TrainResult, repeated_roundtrip_drift,
                       train_autoencoder, train_invertible)

__version__ = "0.1.0"

__all__ = [
    "DDResult", "NotConvergedError", "PathResult", "SolverConfig", "dd_solve",
    "dd_solve_path", "functional_value",
    "AutoencoderPair", "CouplingLayer", "InvertibleNet", "build_autoencoder",
    "build_invertible", "load_embedding", "save_embedding",
    "MaterialDatabase", "NormalizationTransform", "PhasePoint",
    "VoigtConvention", "gen_bar_incomplete", "gen_bar_tanh", "gen_heat_tanh",
    "gen_planestrain", "gen_sqrt_toy", "normalize",
    "EnergyMetric", "ManifoldProjector", "NnIndex", "convex_interpolate",
    "energy_distance2", "hyperplane_residual", "manifold_project", "nn_project",
    "TrainConfig", "TrainResult", "repeated_roundtrip_drift",
    "train_autoencoder", "train_invertible",
    "__version__",
]
