"""Dempster-Shafer belief functions and focal-element approximations."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .approx import (
    D1,
    KLX,
    Bayesian,
    Summarize,
    approx_bayesian,
    approx_d1,
    approx_klx,
    approx_summarize,
    default_method_suite,
    method_from_name,
)
from .core import (
    Bpa,
    EmptyFocalSet,
    EvidentialError,
    FocalSet,
    Frame,
    FrameMismatch,
    InvalidMass,
    MassNotNormalized,
    OutOfFrame,
    PignisticDist,
    TotalConflict,
    UnknownElement,
    belief,
    combine,
    combine_with_conflict,
    make_bpa,
    pignistic,
    plausibility,
    vacuous,
)
from .metrics import DecisionReport, ErrorTriple, decide, error1, error23, error_triple
