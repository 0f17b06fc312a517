"""Weight-sequence conditions and constructive Borel extensions for r-ramified classes."""
from .reports import ConditionReport, Verdict
from .weights import (ComparisonResult, Envelope, SequenceRangeError, SpecParseError,
                      WeightSequence, check_dc, check_mg, compare, gevrey, is_log_convex,
                      lc_minorant, make_sequence, power, qgevrey, quotient, shift)
from .ramify import interpolate, nq_partial_sum_identity, transfer_check
from .conditions import (PartialSumReport, check_beta1, check_gamma_r, check_SV_r,
                         is_quasianalytic, lambda_ps, lower_order, nq_sum)
from .assoc import (check_integral_condition, integral_identity_check, omega, power_law_check,
                    sigma)
from .jets import JetEnvelope, JetSpec, classify, convolve, ring_inequality, seminorm
from . import catalog, synth

__version__ = "0.1.0"
