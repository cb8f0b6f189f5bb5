"""Invasion percolation on regular trees: samplers, encodings, scaling limits.

The package is organized by pipeline stage:

trees
    plane trees, lazy backbone (sin-) trees, truncation, grafting, file IO.
codec
    Lukaciewicz / height / contour encodings, decoding, gluing, the
    stopped-path metric, diffusive rescaling.
samplers
    Galton-Watson, backbone and incipient-cluster samplers, invasion
    percolation, weight profiles, replica ensembles.
continuum
    Poisson lower-envelope process, the driven SDE and its functionals,
    marginal and occupation ensembles.
stats
    level counts, occupation estimator, excursion rates, the limiting
    level-count sampler, KS comparisons and registered experiments.
seeding
    the single documented seed-splitting convention.

Hot loops run in a compiled extension when it is built, with a bit-identical
pure-Python fallback (see percolimit._kernels.BACKEND).
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .codec import (LatticePath, concat_paths, contour_fn, decode_lukaciewicz,
                    glue_backbone_path, height_fn, height_from_lukaciewicz,
                    lukaciewicz, read_path_csv, rescale, stopped_path_distance,
                    trim_final_step, write_path_csv)
from .continuum import (EnvelopeProcess, LimitPath, continuum_metric,
                        envelope_value, extend_envelope, first_hitting,
                        limit_functional, read_envelope_csv,
                        read_limit_path_csv, sample_envelope,
                        sde_marginal_ensemble, sde_occupation_ensemble,
                        solve_sde, write_envelope_csv, write_limit_path_csv)
from .errors import (DecodeError, GWOverflowError, InvalidInputError,
                     MaterializationError, PercolimitError, TreeFileError)
from .samplers import (GWOverflow, InvasionRun, ModelParams, WPath,
                       WeightedEdgeFrontier, ensemble_manifest, sample_gw,
                       sample_iic, sample_ipc_direct, sample_ipc_structural,
                       sample_w_asymptotic, sample_ztheta, zeta)
from .seeding import (generators_for, master_sequence, replica_generator,
                      replica_sequences, subordinate_seed)
from .stats import (EXPERIMENTS, ExperimentSpec, LevelLimitDraw, SampleSet,
                    convergence_experiment, excursion_inf_rate,
                    excursion_sup_rate, ks_two_sample, level_count,
                    level_limit_mean, occupation_local_time, read_sample_csv,
                    sample_level_limit, volume, write_sample_csv)
from .trees import (PlaneTree, SinLevel, SinTree, ZLawSpec, load_tree,
                    reflect, right_graft, save_tree, split_sides, truncate)

__all__ = [
    "__version__", "BACKEND",
    # trees
    "PlaneTree", "SinLevel", "SinTree", "ZLawSpec", "load_tree", "reflect",
    "right_graft", "save_tree", "split_sides", "truncate",
    # codec
    "LatticePath", "concat_paths", "contour_fn", "decode_lukaciewicz",
    "glue_backbone_path", "height_fn", "height_from_lukaciewicz",
    "lukaciewicz", "read_path_csv", "rescale", "stopped_path_distance",
    "trim_final_step", "write_path_csv",
    # samplers
    "GWOverflow", "InvasionRun", "ModelParams", "WPath",
    "WeightedEdgeFrontier", "ensemble_manifest", "sample_gw", "sample_iic",
    "sample_ipc_direct", "sample_ipc_structural", "sample_w_asymptotic",
    "sample_ztheta", "zeta",
    # continuum
    "EnvelopeProcess", "LimitPath", "continuum_metric", "envelope_value",
    "extend_envelope", "first_hitting", "limit_functional",
    "read_envelope_csv", "read_limit_path_csv", "sample_envelope",
    "sde_marginal_ensemble", "sde_occupation_ensemble", "solve_sde",
    "write_envelope_csv", "write_limit_path_csv",
    # stats
    "EXPERIMENTS", "ExperimentSpec", "LevelLimitDraw", "SampleSet",
    "convergence_experiment", "excursion_inf_rate", "excursion_sup_rate",
    "ks_two_sample", "level_count", "level_limit_mean",
    "occupation_local_time", "read_sample_csv", "sample_level_limit",
    "volume", "write_sample_csv",
    # seeding
    "generators_for", "master_sequence", "replica_generator",
    "replica_sequences", "subordinate_seed",
    # errors
    "DecodeError", "GWOverflowError", "InvalidInputError",
    "MaterializationError", "PercolimitError", "TreeFileError",
]
