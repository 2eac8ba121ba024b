from .history import SuffixTooLong, occurrences, suffix
from .smartgrid import (INVARIANT_EXCESS_SENT, INVARIANT_PRICE_SENT, SMG,
                        SmartGridParams, StateLimitExceeded, build_smartgrid,
                        compute_excess, f_excess_monitor, smg_process)
from .starlight import build_starlight, build_starlight_mutant, starlight_filter

__all__ = [
    "suffix", "occurrences", "SuffixTooLong", "SmartGridParams", "compute_excess",
    "build_smartgrid", "smg_process", "f_excess_monitor", "StateLimitExceeded",
    "INVARIANT_PRICE_SENT", "INVARIANT_EXCESS_SENT", "SMG", "build_starlight",
    "build_starlight_mutant", "starlight_filter",
]
