"""Two-ray ground-reflection links with two parallel carriers.

Worst-case receive power over an uncertain distance, the carrier spacing
that maximizes it, the resulting rates, and Monte-Carlo outage estimates.
"""

from .envelope import (
    envelope_simplified,
    exact_peak_spacing,
    landmarks,
    null_spacing,
    peak_spacing,
    sum_power,
    sum_power_lower_bound,
)
from .errors import (
    DomainError,
    NoIntersectionError,
    ResolutionError,
    SearchError,
    SingularityError,
    TraceFileError,
)
from .geometry import (
    SPEED_OF_LIGHT,
    LinkGeometry,
    PathLengths,
    distance_for_path_difference,
    max_phase_shift,
    path_difference,
    path_lengths,
    phase_shift,
)
from .metrics import (
    NoiseModel,
    RateResult,
    alpha_offset,
    rate_single,
    rate_two,
    rate_two_lower_bound,
    zero_outage_capacity,
)
from .optimizer import (
    Branch,
    SpacingSolution,
    find_intersection,
    g,
    optimal_spacing,
    power_at_first_null,
    worst_case_power_two,
)
from .outage import (
    MobilityParams,
    MobilitySampler,
    OutageEstimate,
    TraceSampler,
    UniformSampler,
    eps_outage_capacity,
    export_trajectory,
    outage_curve,
    outage_probability,
    read_trace,
    sample_distances,
)
from .single_freq import (
    DistanceInterval,
    RadioConfig,
    WorstCase,
    WorstCaseKind,
    local_minimum_count,
    null_distance,
    receive_power_single,
    received_power,
    worst_case_power_single,
)

__version__ = "0.1.0"
