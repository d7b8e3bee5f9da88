"""Zeno and anti-Zeno control of spontaneous decay in structured reservoirs."""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DomainError, StepTooCoarseError, ValidityError,
                     ValidityWarning, ZenoError)
from .reservoirs import (CompositeResponse, HydrogenicResponse, LorentzianMode, MemoryKernel,
                         TabulatedResponse, correlation_function, eval_response, load_tabulated)
from .filters import (LorentzianFilter, SincSquaredFilter, eval_filter, width_from_cw,
                      width_from_noise)
from .decay import (RateResult, hydrogenic_lorentzian_rate, impulsive_rate_time_domain,
                    lorentzian_short_time_amplitude, sinc_vs_kernel_crosscheck, universal_rate)
from .evolution import (EvolutionTrace, MeasurementSchedule, detuned_enhancement,
                        interrupted_evolution, lorentzian_exact_amplitude, volterra_solve)
from .scenarios import (CavityGeometry, PulseSchedule, cavity_params, preset,
                        validate_schedule)
