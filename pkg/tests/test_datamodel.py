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

"""Data Model Testing."""

import numpy as np
from pydantic import ValidationError
from pytest import approx, raises

from fracspde.datamodel import (
    BoundaryPolicy,
    ExperimentConfig,
    InitialCondition,
    InitialKind,
    MLParams,
    ModelParams,
    NonlinearityKind,
    NonlinearitySpec,
    SpaceTimeGrid,
    SubordinatorParams,
    Tolerances,
)


def test_params_domain():
    """Parameters are validated."""
    with raises(ValidationError):
        MLParams(beta=0.0)
    with raises(ValidationError):
        MLParams(beta=1.5)
    with raises(ValidationError):
        SubordinatorParams(beta=1.0)
    with raises(ValidationError):
        ModelParams(alpha=2.5)
    with raises(ValidationError):
        ModelParams(nu=0.0)
    with raises(ValidationError):
        ModelParams(d=0)


def test_model_params():
    """Derived properties."""
    params = ModelParams(beta=0.5, alpha=1.5, d=1)
    assert params.theta == approx(1 / 3)
    assert params.l2_admissible
    assert params.simulation_admissible
    assert not ModelParams(alpha=0.5, d=1).l2_admissible
    assert not ModelParams(beta=1.0, alpha=1.0, d=2).simulation_admissible


def test_frozen():
    """Models are immutable."""
    params = ModelParams()
    with raises(ValidationError):
        params.beta = 0.5


def test_repr():
    """Defaults are skipped."""
    assert repr(ModelParams(beta=0.5)) == "ModelParams(beta=0.5)"
    assert repr(SpaceTimeGrid(nx=64)) == "SpaceTimeGrid(nx=64)"


def test_model_copy():
    """Updates are validated."""
    params = ModelParams()
    assert params.model_copy(update={"beta": 0.25}).beta == 0.25
    with raises(ValidationError):
        params.model_copy(update={"beta": 2.0})


def test_grid():
    """Grid geometry."""
    grid = SpaceTimeGrid(x_min=-8, x_max=8, nx=32, t_max=2, nt=16)
    assert grid.length == 16
    assert grid.dx == 0.5
    assert grid.dt == 0.125
    assert grid.centers()[0] == -7.75
    assert grid.centers()[-1] == 7.75
    assert grid.times()[-1] == 2.0
    assert grid.times().size == 17
    assert grid.cell(0.0) == 16
    assert grid.cell(-100.0) == 0
    assert grid.cell(100.0) == 31
    assert grid.boundary_policy == BoundaryPolicy.ZERO_PADDED
    with raises(ValidationError):
        SpaceTimeGrid(x_min=1, x_max=1)
    with raises(ValidationError):
        SpaceTimeGrid(nx=8)


def test_linear_nonlinearity():
    """σ(u) = λu."""
    sigma = NonlinearitySpec(lam=2.0)
    assert sigma.kind == NonlinearityKind.LINEAR
    assert sigma.lipschitz == 2.0
    assert sigma.cone == 2.0
    assert not sigma.is_zero
    assert sigma.vanishes_at_zero
    assert sigma.sigma(np.array([1.0, -0.5])).tolist() == [2.0, -1.0]
    assert NonlinearitySpec().is_zero
    assert NonlinearitySpec.model_validate({"lambda": 0.5}).lam == 0.5


def test_custom_nonlinearity():
    """Piecewise linear σ from samples."""
    sigma = NonlinearitySpec(kind="custom", samples=((-1.0, -2.0), (0.0, 0.0), (1.0, 1.0), (2.0, 3.0)))
    assert sigma.lipschitz == 2.0
    assert sigma.cone == 1.0
    assert sigma.vanishes_at_zero
    assert sigma.sigma(np.array([0.5, 1.5])).tolist() == [0.5, 2.0]
    with raises(ValidationError):
        NonlinearitySpec(kind="custom", samples=((0.0, 0.0),))
    with raises(ValidationError):
        NonlinearitySpec(kind="custom", samples=((1.0, 0.0), (0.0, 0.0)))
    with raises(ValidationError):
        NonlinearitySpec(lam=1.0, l_sigma=2.0)


def test_initial_condition():
    """Initial data on the grid."""
    grid = SpaceTimeGrid(x_min=-4, x_max=4, nx=16, nt=8)
    assert InitialCondition().sample(grid).tolist() == [1.0] * 16
    indicator = InitialCondition(kind=InitialKind.INDICATOR, half_width=1.0, value=2.0)
    values = indicator.sample(grid)
    assert not indicator.is_constant
    assert values.sum() == 8.0
    assert values[0] == values[-1] == 0.0


def test_experiment_config():
    """Unknown keys are rejected at every level."""
    config = ExperimentConfig.model_validate({"seed": 3, "params": {"beta": 0.75}, "tolerances": {"mass_abs": 1e-3}})
    assert config.seed == 3
    assert config.params.beta == 0.75
    assert config.tolerances.mass_abs == 1e-3
    with raises(ValidationError):
        ExperimentConfig.model_validate({"sede": 3})
    with raises(ValidationError):
        ExperimentConfig.model_validate({"grid": {"nx": 64, "ny": 3}})
    with raises(ValidationError):
        ExperimentConfig.model_validate({"seed": 2**64})


def test_tolerances_fromstr():
    """Tolerances parse from strings."""
    tolerances = Tolerances().model_copy_fromstr({"se_bands": "4", "picard_iterations": "80"})
    assert tolerances.se_bands == 4.0
    assert tolerances.picard_iterations == 80
    with raises(ValueError):
        Tolerances().model_copy_fromstr({"unknown": "1"})
