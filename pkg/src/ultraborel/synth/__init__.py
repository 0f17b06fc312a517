"""Constructive side: box bumps, the extension operator and derivative oracles."""
from .bump import (MAX_ORDER, BumpPlan, BumpReport, DerivativeValue, FunctionRep, Grid, GridError,
                   SupDerivative, Term, UnreliableDerivative, box_derivative, build_bump,
                   bump_plan_from, derivative_at_zero, profile_u, sup_derivative)
from .extension import (ChiResult, ExtensionError, ExtensionOperator, ExtensionResult, Parameters,
                        build_chi, choose_parameters, extend, standing_assumptions, tau_widths)
from .vanishing import PreconditionError, SampledFunction, VanishingLedger, chi_difference, index_set, vanishing_bound_check

__all__ = [
    "MAX_ORDER", "BumpPlan", "BumpReport", "DerivativeValue", "FunctionRep", "Grid", "GridError",
    "SupDerivative", "Term", "UnreliableDerivative", "box_derivative", "build_bump", "bump_plan_from",
    "derivative_at_zero", "profile_u", "sup_derivative", "ChiResult", "ExtensionError",
    "ExtensionOperator", "ExtensionResult", "Parameters", "build_chi", "choose_parameters", "extend",
    "standing_assumptions", "tau_widths", "PreconditionError", "SampledFunction", "VanishingLedger", "chi_difference",
    "index_set", "vanishing_bound_check",
]
