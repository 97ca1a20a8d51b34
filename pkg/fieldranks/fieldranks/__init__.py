from .analytic import (ARExact, GREstimate, StabilityResult, analytic_rank_char, analytic_rank_zero_count,
                       geometric_rank_estimate, matmul_pair_count, stability_check)
from .certificates import DecompCert, DecompTerm, Factor, RestrictionCert
from .constructions import (InterpDecomp, MonotonicityReport, interp_decomp, poly_monotonicity_check,
                            pushforward_to_extension, subrank_cert_interpolation, tw_tensor)
from .errors import (FieldRanksError, GuardExceeded, InconclusiveEstimate, InequalityViolation, TensorFormatError,
                     VerificationFailed)
from .gf import (FieldElem, FieldSpec, arith, embed, enumerate_elements, field_make, field_of_order,
                 trace_and_character)
from .reports import Report
from .search import (SandwichResult, cp_rank, extension_pr_sandwich, partition_rank, slice_rank, sr_k_subspace,
                     sr_subspace, subrank_at_least)
from .settings import DEFAULT_SETTINGS, Settings, load_settings
from .subspace import (Subspace, TensorSubspace, annihilator, enumerate_subspaces, member_of_slice_sum,
                       read_basis, rref, subspace_direct_sum)
from .tensor import (MatrixTuple, Tensor, apply_matrices, base_change, contract, direct_sum, flatten,
                     identity_tensor, kronecker, matmul_tensor, mult_tensor, poly_mult_tensor, random_tensor,
                     read_tensor, write_tensor)

__version__ = "0.1.0"
