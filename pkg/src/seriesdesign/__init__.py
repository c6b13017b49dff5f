"""Optimal sampling designs and shrinkage series estimators for regression with Markovian errors."""
from .basis import (FunctionModel, OrthonormalBasis, constant, fourier_coefficients, gram_check,
                    model_from_name, phi, reconstruct, span_model)
from .design import (DesignGrid, build_betas_B, build_C, build_M, criterion, expected_l2_distance,
                     named_design, optimal_weights, optimize_design)
from .errors import (ContractViolation, DegenerateKernelError, DomainError, NotPSDError, OracleError,
                     QuadratureError, SeriesDesignError, UnderdeterminedDesignError)
from .estimator import (EstimateResult, Sample, SeriesEstimator, blue_estimate, estimate_functions,
                        riemann_estimate, shrink_estimate)
from .kernel import TriangularKernel, brownian, case_tag, covariance, exponential, q_funcs, validate
from .numerics import PsoConfig, QuadratureRule, integrate, pso_minimize, psd_solve_or_ginverse
from .oracle import OracleMeasure, oracle_measure, oracle_mise, tsybakov_comparison, verify_optimality
from .simulator import SimulationConfig, SimulationReport, integrated_squared_error, run_mise, sample_gp

__version__ = "0.1.0"
