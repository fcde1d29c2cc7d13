"""Primes in exponentially growing integer linear recurrence sequences:
exact period-ordered density constants, prime censuses, covering-system
verification, division-sequence statistics, and the associated numeric
constants."""

from .arith import (
    DEFAULT_POLICY,
    FactorizationResult,
    PrpPolicy,
    Verdict,
    factorize,
    is_probable_prime,
)
from .bigseq import (
    LinearRecurrence,
    combine,
    fibonacci,
    lucas_number,
    make_custom,
    make_fibonacci_shift,
    make_geometric_shift,
    make_lucas,
    make_repunit_ratio,
    make_two_term,
    parse_seq_spec,
    phi_decomposition,
)
from .census import CensusReport, census, division_seq_census, simultaneous_census
from .covering import CoveringSystem, verify_covers, verify_sequence_covering
from .density import DensityReport, delta, delta_mod, predict_count
from .moddyn import PeriodTable, forbidden_classes, multiplicative_order, period_mod, period_support

__version__ = "0.1.0"
