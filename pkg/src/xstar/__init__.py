"""Minimizers of drift-shifted convex integral functionals on planar grids."""
from .bsc import AffineFunction, BSCCertificate, CertificationFailure, certify_affine, construct_supports, \
    envelopes, lipschitz_bound, verify_bsc
from .convex import (AnisotropicNorm, ConvexIntegrand, Custom, EuclideanNorm, MinimalSurface, MoreauSmoothed,
                     Quadratic, RadialOfNorm, check_condition_A, check_condition_B, growth_constants,
                     minimal_subgradient, moreau_envelope, prox, recession, yosida)
from .errors import AlignmentError, ConfigError, ConvergenceError, DomainError, UnsupportedOperation, XStarError
from .expr import Expression
from .functional import Pinned, Relaxed, discrete_lipschitz, functional_value, lattice_max, lattice_min
from .grid import GridDomain, GridFunction, read_csv, write_csv, write_pgm
from .heis import PlanePoint, TiltTransform, apply_tilt, dot_star, star, xstar
from .solver import SolveConfig, SolveReport, smoothed_path_solve, solve, solve_relaxed
from .verify import CheckReport, run_checks

__version__ = "0.1.0"
