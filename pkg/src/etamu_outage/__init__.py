"""Outage probability of MRC receivers with eta-mu co-channel interference.

Closed-form outage approximations (an Appell-F2 form and a beta-prime form)
for maximum-ratio combining when both the desired signal and unequal-power
interferers undergo eta-mu fading, validated against an exact Monte-Carlo
SIR simulator.
"""

from .fading import ComplexSample, EtaMuParams, make_params, power_moment, \
    sample_complex, sum_power_pdf
from .moments import GammaFit, Scenario, aggregate_fit, approx2_user_fit, \
    build_gamma_fit, cross_moment_1, cross_moment_2, per_interferer_fit, \
    user_norm_moments
from .montecarlo import SirSamples, empirical_outage, kl_divergence, \
    sample_approx_law, simulate_exact_sir
from .outage import OutagePoint, outage_approx1, outage_approx2, \
    sir_pdf_approx1, sir_pdf_approx2
from .specfun import EvalResult, appell_f2, hyp0f1, hyp1f1, hyp2f1, ln_gamma, \
    pochhammer

__all__ = [
    "ComplexSample", "EtaMuParams", "EvalResult", "GammaFit", "OutagePoint",
    "Scenario", "SirSamples",
    "aggregate_fit", "appell_f2", "approx2_user_fit", "build_gamma_fit",
    "cross_moment_1", "cross_moment_2", "empirical_outage", "hyp0f1",
    "hyp1f1", "hyp2f1", "kl_divergence", "ln_gamma", "make_params",
    "outage_approx1", "outage_approx2", "per_interferer_fit", "pochhammer",
    "power_moment", "sample_approx_law", "sample_complex",
    "simulate_exact_sir", "sir_pdf_approx1", "sir_pdf_approx2",
    "sum_power_pdf", "user_norm_moments",
]

__version__ = "0.1.0"
