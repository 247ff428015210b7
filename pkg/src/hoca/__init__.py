"""Reachability analysis for level-2 higher-order counter automata.

The package provides the storage-type algebra (counters, zero-test
counters, pushdowns of storages, inverse-push variants), generic automata
over them with bounded explicit-state oracles, the returns/loops summary
pipeline reducing level-2 control-state reachability to pushdown-system
saturation, a binary-tree encoding of configurations with tree-automaton
machinery for regular sets, storage-simulation passes, and a CLI.
"""

from ._kernels import COMPILED as KERNELS_COMPILED
from .automaton import StorageAutomaton, Transition, parse_automaton, successors
from .errors import (
    HocaError,
    IllFormedTableError,
    IllTypedError,
    InvalidEncodingError,
    InvalidTraceError,
    ParseError,
    UnknownStateError,
    UnknownSymbolError,
    UnsupportedOpError,
)
from .hoca2 import (
    Hocs2,
    L2Run,
    L2Transition,
    classify_run,
    height,
    hocs2_from_automaton,
    normalize,
    parse_hocs2,
)
from .oracle import (
    Caps,
    OracleResult,
    Trace,
    alt_reach_oracle,
    decide_reachability,
    reach_oracle,
    val_check,
)
from .pds import PAutomaton, Pds, PdsRule, post_star, pre_star, reach_pda, reach_pda_config
from .regnotions import TwoStoreAutomaton, UnaryAfa, afa_unary_membership, two_store_membership
from .regreach import bounded_post_star, bounded_pre_star, summary_interface
from .storage import (
    BOTTOM,
    StorageConfig,
    StorageExpr,
    apply_op,
    build_storage,
    eval_test,
    parse_storage,
)
from .summaries import (
    Bounds,
    ReturnTable,
    SummaryDfa,
    bounds,
    build_summary_dfa,
    compute_return_table,
    generate_pda,
    loops_query,
    reach_hoca,
    ret_query,
)
from .trees import (
    BinTree,
    TreeAutomaton,
    decode,
    encode,
    ta_emptiness,
    ta_intersect,
    ta_membership,
    ta_union,
    validity_ta,
)
from .transforms import eliminate_level2_symbols, invpush_to_pop, pop_to_invpush

__version__ = "0.1.0"
