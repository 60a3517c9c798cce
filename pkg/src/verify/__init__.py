from . import suites_method, suites_operators, suites_reiteration, suites_structures  # noqa: F401  (registration)
from .registry import Check, SuiteContext, available, get_suite, run_suite
from .report import CaseRecord, VerificationReport

__all__ = ["Check", "SuiteContext", "available", "get_suite", "run_suite", "CaseRecord", "VerificationReport"]
