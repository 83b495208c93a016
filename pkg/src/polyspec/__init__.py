"""Exact Fourier transforms of polytopes, the face-imbalance test for spectrality,
and a numerical certificate pipeline with empirical cross-checks."""

from .certificate import (
    CertificateReport,
    CriterionInapplicable,
    TubeRegion,
    density_contradiction,
    derive_constants,
    separation_check,
    synthetic_pair,
    tube_capacity,
)
from .corpus import corpus_list, corpus_verify, load_entry
from .facewave import FaceWave, TranslationCertificate, face_wave, find_translation_numbers
from .fourier import (
    estimate_grad_constant,
    estimate_slice_constant,
    evaluate,
    ft_boundary,
    ft_exact,
    ft_gradient,
    slice_profile,
)
from .geometry import (
    DirectionReport,
    Polytope,
    build_polytope,
    direction_report,
    imbalance_criterion,
    load_polytope,
    load_polytope_file,
    normalize_volume,
)
from .orthopack import (
    PointSet,
    ZeroSetProbe,
    estimate_density,
    greedy_orthogonal_pack,
    lattice_points,
    orthogonality_test,
    probe_zeros,
    spectral_pair_probe,
)
from .tiling import TilingCheck, remark1_check, tiling_check
from .tolerances import DEFAULT, Tolerances

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
