"""Workbench for opacity of finite-automata discrete-event systems.

Six notions (current-state, initial-state, initial-and-final-state,
language-based, K-step, infinite-step), decision procedures for each,
polynomial transformations among all of them with provenance, a
definitional brute-force oracle, a seeded instance generator, and a CLI.
"""

from .errors import (
    AlphabetMismatch,
    BudgetExceeded,
    EmptyInitial,
    InstanceSemanticError,
    InstanceSyntaxError,
    InvalidInstance,
    InvalidParams,
    MalformedWitness,
    NameClash,
    NotDeterministic,
    NotUnary,
    OpacityError,
    TooFewEvents,
    UnaryObstruction,
    UnknownEvent,
)
from .fa import (
    Alphabet,
    Nfa,
    complete_and_complement,
    estimate,
    estimate_from,
    is_deterministic,
    observable_depths,
    observer,
    observer_subsets,
    product,
    project,
    step,
    trim,
    unobservable_closure,
    validate,
)
from .generate import GenParams, SplitMix64, random_instance, random_nfa
from .model import (
    CsoInstance,
    FIXTURE_NAMES,
    IfoInstance,
    InsoInstance,
    IsoInstance,
    KsoInstance,
    LboInstance,
    Metrics,
    OpacityInstance,
    TransformOutput,
    Verdict,
    VerificationCertificate,
    Witness,
    fixture,
    notion_of,
    validate_instance,
)
from .oracle import BoundedVerdict, complete_bound, oracle_verify, witness_check
from .transforms import (
    EncodingPlan,
    binary_encode,
    cso_to_ifo,
    cso_to_inso,
    cso_to_kso,
    cso_to_lbo,
    ifo_to_lbo,
    inso_to_cso,
    inso_to_cso_unary,
    iso_to_ifo,
    iso_to_lbo,
    kso_to_cso,
    kso_to_cso_unary,
    lbo_to_cso,
    lbo_to_iso,
    make_encoding_plan,
    single_initial,
    unary_depths,
)
from .verify import (
    verify_cso,
    verify_ifo,
    verify_inso,
    verify_iso,
    verify_iso_unary,
    verify_kso,
    verify_lbo,
)
from .verify import verify as verify_instance
from .fileformat import parse_instance, serialize_instance

__all__ = [name for name in dir() if not name.startswith("_")]
