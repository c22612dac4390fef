"""Schedule-sequence toolkit for asynchronous multi-channel broadcast.

Construct deterministic transmit/receive schedules that guarantee
all-to-all broadcast over slotted collision channels regardless of node
time offsets, verify the guarantee, evaluate period lower bounds, and
compare against optimized random schemes analytically and by
simulation.
"""

from .constructor import (
    ConstructionParams,
    CrtUiParams,
    ScheduleSequenceSet,
    auto_correlation_predict,
    build_array,
    build_crt_ui,
    build_schedule_set,
    choose_W,
    crt_ui_set,
    length_upper_bound,
    m_prime,
    select_params,
)
from .random_schemes import (
    AssignTRandomParams,
    CouponModel,
    GeneralRandomParams,
    coupon_cdf,
    frame_length,
    group_cdf,
    optimal_single_channel,
    optimize_random,
    p_success_assignT,
    p_success_general,
)
from .seqcore import (
    BinarySequence,
    GroupDivision,
    OffsetVector,
    ScheduleSequence,
    Symbol,
    SymbolKind,
    correlation_profile,
    crt_inverse,
    crt_map,
    cyclic_shift,
    hamming_cross_correlation,
)
from .simulator import (
    AssignTRandomScheme,
    GeneralRandomScheme,
    SequenceScheme,
    SimConfig,
    SimResult,
    completion_histogram,
    simulate,
)
from .verifier import (
    BlockingTrace,
    BoundReport,
    Method,
    VerificationReport,
    Verdict,
    Witness,
    appendix_F,
    b_sequence,
    blocking_run,
    check_pair_conservative,
    check_pair_exhaustive,
    lower_bound,
    ratio_table,
    success_slots,
    verify_set,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
