"""Fourier analysis on Chebli-Trimeche hypergroups of the half-line.

Characters, Plancherel densities, forward and inverse transforms, Fourier and
spectral multipliers, the heat semigroup, grid evaluations of Paley,
Hausdorff-Young(-Paley) and Hormander-type inequalities, and Picard solvers
for two nonlinear Cauchy problems.
"""
from .eigenfn import EigenfunctionEvaluator, hankel_oracle
from .errors import CalibrationError, ConfigError, HypothesisError, NumericalError
from .inequalities import (InequalityReport, WeightFunctionPsi, empirical_opnorm,
                           hormander_bound, hy_report, hyp_report, m_psi, paley_report)
from .model import (Family, HypergroupModel, g_function, make_bessel_kingman, make_custom,
                    make_jacobi, validate_axioms)
from .multipliers import (SpectralFunction, Symbol, apply_multiplier, heat_apply,
                          heat_decay_bound, heat_opnorm_curve, sobolev_check,
                          spectral_bound, spectral_symbol)
from .pde import (PicardRun, heat_t_star, solve_heat, solve_wave, wave_global_check,
                  wave_t_star)
from .plancherel import (SpectralDensity, calibrate, density_bessel_kingman, density_jacobi,
                         fit_density_exponents)
from .transform import (SpatialGrid, SpectralGrid, Spectrum, Transformer, WeightedSignal,
                        forward, inverse, lp_norm, spectral_lp_norm)

__version__ = "0.1.0"
