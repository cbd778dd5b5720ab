"""Quantization of random homogeneous self-similar measures."""
from .core import (Ifs, RifsSpec, Similarity, check_suosc_intervals, check_uessc, compose,
                   lemma_constants, load_spec, save_spec, spec_from_dict)
from .errors import (BudgetExceeded, DegenerateInput, InternalInvariant, InvalidSymbol,
                     NotAnFma, RifsError, SeparationRequired, SpecError, Unsupported)
from .examples import example_spec
from .measure import (DiscreteMeasure, approximant, approximant_on_antichain, cauchy_bound,
                      refine_consistency, w1_distance_1d)
from .pressure import (ergodic_average, solve_kappa, solve_level_pressure, solve_tnr,
                       window_products)
from .quantization import (coefficient_series, estimate_dimension, unr, vnr_exact_1d,
                           vnr_exact_1d_series, vnr_lloyd, vnr_subdivision_upper)
from .symbolic import (Word, build_gamma, enumerate_level, explicit_word, gamma_counts,
                       sample_word, shift, validate_fma)

__version__ = "0.1.0"
