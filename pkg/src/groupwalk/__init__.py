"""groupwalk: exact mixing analysis for random walks on finite groups."""

__version__ = "0.1.0"

from .errors import (
    CapacityExceededError,
    GroupWalkError,
    InvalidParameterError,
    NotGeneratingError,
    ScanCapExceededError,
    UnsupportedWalkError,
)
from .groups import (
    GeneratorSet,
    GroupTable,
    canonical_generators,
    generator_set,
    make_cyclic,
    make_heisenberg,
    make_product,
    parse_group,
)
from .growth import GrowthProfile, ModerateGrowthCert, check_moderate_growth, growth_profile, minimal_A
from .walks import (
    DistanceCurve,
    WalkSpec,
    convolve,
    distance,
    distance_curve,
    heat_distribution,
    hellinger_distance,
    lazy_law,
    mixing_time,
    spectral_gap,
    tv_distance,
    uniform_law,
    walk_distribution,
)
from .products import (
    ProductWalkSpec,
    build_flat,
    product_hellinger_bounds,
    product_hellinger_ct,
    product_tv_bracket,
)
from .cutoff import (
    ExponentialSum,
    FamilySpec,
    TrendConfig,
    build_family,
    cutoff_criterion_scan,
    exp_sum_eval,
    exp_sum_mixing,
    experiment_heisenberg,
    experiment_randomized,
    lambda_tau,
    boundedness_probe,
    row_cutoff_time,
    monotone_cutoff_time,
    trend_verdict,
)

__all__ = [name for name in dir() if not name.startswith("_")]
