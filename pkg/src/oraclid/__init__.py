"""Simulator and algorithm library for the quantum oracle identification problem."""

from .algorithms import (
    AdversaryResponder,
    Constants,
    Transcript,
    adversary_rounds,
    classical_identify_hybrid,
    identify_av,
    identify_balanced,
    identify_general,
    identify_hybrid,
    identify_square,
)
from .bounds import (
    AdversaryRelation,
    BoundReport,
    ambainis_bound,
    simple_adversary_bound,
    threshold_instance_bound,
)
from .kernels import BACKEND
from .oracle_set import (
    EmptyCandidatesError,
    FlipMask,
    OracleMatrix,
    OracleSetError,
    column_flip,
    eliminate_by_value,
    eliminate_heavy_rows,
    half_weight_threshold,
    load,
    make_bv,
    make_grover,
    make_hybrid,
    reduce_columns,
    sample_av,
    sample_balanced,
    sample_distinct,
    save,
    sensitivity,
)
from .quantum_sim import HiddenOracle, StateVector
from .search import SearchOutcome, bbht_search, bernstein_vazirani, grover_fixed

__version__ = "0.1.0"
