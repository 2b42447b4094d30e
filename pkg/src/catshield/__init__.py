"""Cat states through lossy thermal channels and the squeezing that protects them."""

__version__ = "0.1.0"

from .channel import (
    CompositeSpec,
    LossyStage,
    classicality_check,
    composite_channel,
    concatenate,
    effective_single,
    lossy_channel,
    squeezer,
)
from .core import (
    IDENTITY,
    CatState,
    ChannelParams,
    Parity,
    PhasePoint,
    db_to_nats,
    nats_to_db,
    wigner_ideal,
    wigner_transformed,
)
from .distance import DistanceBreakdown, hs_distance, hs_factors, overlap, purity
from .negativity import FeasibleRegion, central_negativity, feasible_region, feasible_v, negativity_possible
from .optimize import (
    OptimizationResult,
    optimize_composite,
    optimize_presqueeze_cn,
    optimize_presqueeze_hs,
    scalar_maximize,
)
