"""Desk-scale computations in Banach space geometry.

Finite-truncation norm oracles (lp, c0, Tsirelson T and T*), equivalent
renormings, basis-constant profiles, asymptotically monotone subsequence
selection, and symmetric-separation certificates with Kottman
lower-bound search.
"""

from .errors import (BanachlabError, BudgetError, ExactPathError,
                     InvalidSpaceError, LpInfeasibleError, LpUnboundedError,
                     NumericError, ParameterError, PreconditionError,
                     PremiseError, RankError, ResourceError, ScanExhaustedError,
                     SchemaError, SupportCapError, BlockOrderingError)
from .vectors import Functional, Scalar, SparseVec, lincomb, pair
from .tsirelson import tsirelson_norm, tsirelson_witness, generators
from .vecspace import (C0, Lp, Renormed, SpaceSpec, TsirelsonT, TsirelsonTStar,
                       conjugate_exponent, dual_norm, is_certified_path,
                       is_unconditional, norm, supports_exact)
from .optkit import (OptBudget, OptResult, infimal_convolution, lp_exact,
                     minimize_1d_convex, sphere_optimize)
from .renorm import (DiagonalScale, ICExtension, JamesIC, MaxBiortho,
                     RenormSpec, StrictConvex, equivalence_constants,
                     ic_extension_norm, james_block_search, james_ic_norm,
                     max_biortho_norm, premise_check, strict_convex_family,
                     strictly_convex_norm)
from .basis import (BasisProfile, FiniteBasicSequence, block_basis,
                    is_seminormalized, profile, projection_norm,
                    tail_projection_norm)
from .select import (DeltaSchedule, SelectionTrace, SequenceSource,
                     asymptotic_monotone_select, delta_schedule, mazur_step,
                     pelczynski_select, weak_null_witness, builtin_source)
from .separation import (SeparationCertificate, kottman_lower_bound,
                         kottman_dim_sweep, symmetric_separation,
                         verify_separated)

__version__ = "0.1.0"
