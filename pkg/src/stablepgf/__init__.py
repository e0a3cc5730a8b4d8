"""Real stable probability generating functions: construction, certification,
Gaussian approximation diagnostics and stable division."""

__version__ = "0.1.0"

from .errors import (ConclusionFailure, DegenerateLawError, HypothesisError, InvalidPGFError,
                     RootFindingError, StablePGFError, StructuralError)
from .poly import (NRCertificate, NRRefutation, Polynomial, RootSet, certify_nr,
                   check_interlacing, is_real_rooted, min_distance_to_one, multiply, roots)
from .pgf import (JointPGF, MomentSummary, aggregate, block_grouping, make_pgf, marginal,
                  mean_cov, polarize, project, smear, univariate)
from .stability import (BernoulliDecomposition, StabilityVerdict, sector_bound, test_stability,
                        univariate_stable, verify_witness, zero_free_disk_check)
from .clt import (CLTReport, LatticeLaw, cramer_wold_battery, gaussian_cdf, kolmogorov_distance,
                  normalized_cdf, rate_study, report)
from .structure import (CovariancePartition, check_hypotheses, partition, singular_clt_probe,
                        singular_directions)
from .stablearith import (Decomposition, decompose, floor_divide, floor_scale_probe,
                          half_divide, verify_interlace)
from .corpus import DPPKernel, affine_product, dpp_pgf, power_family, random_nr_law
