# Copyright 2023 c0fec0de
#
# This file is part of fracspde.
#
# fracspde is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# fracspde is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License along
# with fracspde. If not, see <https://www.gnu.org/licenses/>.

"""
Fractional Stochastic Heat Equation - Numerical Experiments.

``fracspde`` evaluates the building blocks of the time-fractional stochastic heat equation
``∂_t^β u = -ν(-Δ)^{α/2} u + I_t^{1-β}[σ(u) Ẇ]`` and checks its moment and front statements numerically:

* :any:`mittag_leffler` with certified relative error and the sandwich :any:`ml_bounds`.
* the one-sided stable and the inverse stable subordinator densities (:any:`stable_density`,
  :any:`inverse_subordinator_density`).
* the Green kernel by subordination (:any:`green_kernel`), its L² constant :any:`c_star` and
  lattice tables (:any:`build_kernel_table`).
* the renewal equation ``f = a + b ∫ f(s)(t-s)^{-θ} ds`` (:any:`solve_renewal`).
* a Monte Carlo simulator of the mild solution (:any:`simulate`) with moment, Lyapunov exponent and
  front estimators.

The command line interface ``fracspde`` runs the experiments and verification suites via :any:`run`.

Getting Started
---------------

>>> import math
>>> import numpy as np
>>> import fracspde

Mittag-Leffler function:

>>> round(fracspde.mittag_leffler(fracspde.MLParams(beta=0.5), -1.0), 7)
0.4275836

The L² constant reduces to ``(8πν)^{-1/2}`` for the heat kernel:

>>> math.isclose(fracspde.c_star(fracspde.ModelParams()), (8 * math.pi) ** -0.5)
True
>>> round(fracspde.lower_bound_rate(fracspde.ModelParams(), 1.0), 12)
0.125

Simulate 8 replicas of the parabolic Anderson model on a coarse grid:

>>> grid = fracspde.SpaceTimeGrid(nx=64, nt=16)
>>> sigma = fracspde.NonlinearitySpec(lam=1.0)
>>> ensemble = fracspde.simulate(fracspde.ModelParams(), grid, np.ones(64), sigma, seed=1, replicas=8)
>>> ensemble.fields.shape
(8, 17, 64)

Overview
--------

* :py:class:`fracspde.ModelParams`: equation parameters ``β, α, ν, d``.
* :py:class:`fracspde.SpaceTimeGrid`: simulation lattice.
* :py:class:`fracspde.NonlinearitySpec`: noise coefficient ``σ``.
* :py:class:`fracspde.ExperimentConfig`: one experiment, as read from JSON.
* :py:class:`fracspde.AppConfig`: layered application configuration.
"""

from .appconfig import AppConfig, AppConfigLocation
from .artifacts import CheckResult
from .datamodel import (
    AppConfigData,
    BoundaryPolicy,
    Command,
    ExperimentConfig,
    FrontSettings,
    InitialCondition,
    InitialKind,
    MLParams,
    MLSettings,
    ModelParams,
    NonlinearityKind,
    NonlinearitySpec,
    RenewalSettings,
    SpaceTimeGrid,
    SubordinatorParams,
    Suite,
    Tolerances,
)
from .exceptions import (
    AccuracyError,
    DivergenceError,
    DomainError,
    EstimationError,
    InvalidConfigurationFileError,
    InvalidConfigurationLocationError,
    InvalidExperimentConfigError,
    TruncationError,
    UnsupportedConfigurationError,
)
from .experiments import RunResult, apply_overrides, load_experiment_config, run
from .kernel import (
    KernelTable,
    build_kernel_table,
    c_star,
    green_kernel,
    green_kernel_spectral,
    green_l2_norm,
    kernel_tail_mass,
)
from .renewal import Forcing, RenewalProblem, RenewalSolution, Scheme, solve_renewal
from .spde_sim import (
    FieldEnsemble,
    estimate_front,
    estimate_lyapunov,
    estimate_moment,
    front_bounds,
    lower_bound_rate,
    moment_curve,
    second_moment_renewal,
    simulate,
)
from .special_fn import ml_bounds, mittag_leffler
from .subordinator import inverse_subordinator_density, stable_density
