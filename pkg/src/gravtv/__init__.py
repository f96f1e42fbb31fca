"""3-D gravity inversion with total-variation regularization.

The solver combines an iteratively reweighted least-squares treatment of
the TV stabilizer, a randomized generalized SVD for the inner
general-form Tikhonov problems, predictive-risk selection of the
regularization parameter, and an alternating-direction weighting scheme.
"""

from .errors import GravTvError, IllPosedPairError, ResourceLimitError
from .forward import (SensitivityMatrix, assemble_sensitivity, predict,
                      prism_gz)
from .gsvd import GsvdFactors, filtered_solution, gsvd_pair
from .inversion import (InversionConfig, InversionResult, IterationRecord,
                        ad_operator_for, chi_squared, chi_squared_target,
                        invert, project_bounds, relative_error)
from .mesh import (Mesh3D, ModelVector, SurveyGrid, build_survey_grid,
                   cell_coords, cell_index)
from .operators import (DataWeighting, DepthWeighting, DerivativeOps,
                        TvWeights, build_data_weighting,
                        build_depth_weighting, build_derivatives, tv_weights,
                        weighted_derivative)
from .regparam import UpreCurve, select_alpha, upre_value
from .rgsvd import SketchBasis, rgsvd, sketch_basis
from .synthetic import (NoiseModel, add_noise, build_dikes_model,
                        build_multibody_model, dikes_mesh, multibody_mesh,
                        noisy_prior_model)

__version__ = "0.1.0"
