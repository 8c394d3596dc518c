from .complete import SearchConfig, complete_verify, input_influence
from .external import (
    ExternalAdapterConfig,
    ExternalProcessError,
    ExternalProtocolError,
    ExternalVerifierError,
    external_verify,
    serve_query_file,
)
from .falsify import falsify_sample
from .ibp import LayerBounds, ibp_bounds, output_bounds
from .query import (
    STRICT_EPS,
    WITNESS_SLACK,
    Backend,
    LinearInequality,
    OutputCondition,
    Relation,
    Status,
    VerificationQuery,
    Verdict,
    check_witness,
    output_maximal,
    output_minimal,
    output_not_maximal,
    output_not_minimal,
)

__all__ = [
    "Backend",
    "ExternalAdapterConfig",
    "ExternalProcessError",
    "ExternalProtocolError",
    "ExternalVerifierError",
    "LayerBounds",
    "LinearInequality",
    "OutputCondition",
    "Relation",
    "STRICT_EPS",
    "SearchConfig",
    "Status",
    "VerificationQuery",
    "Verdict",
    "WITNESS_SLACK",
    "check_witness",
    "complete_verify",
    "external_verify",
    "falsify_sample",
    "ibp_bounds",
    "input_influence",
    "output_bounds",
    "output_maximal",
    "output_minimal",
    "output_not_maximal",
    "output_not_minimal",
    "serve_query_file",
]
