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
Central :any:`fracspde` Datamodel.

* :any:`MLParams`: Mittag-Leffler order and accuracy goal.
* :any:`SubordinatorParams`: Order of the stable subordinator.
* :any:`ModelParams`: The equation parameters (β, α, ν, d).
* :any:`SpaceTimeGrid`: Uniform space-time lattice with boundary policy.
* :any:`NonlinearitySpec`: The noise coefficient σ.
* :any:`InitialCondition`: Deterministic initial data.
* :any:`Tolerances`: Named check tolerances, overridable via ``--tol NAME=VALUE``.
* :any:`ExperimentConfig`: Fully resolved experiment description.
* :any:`AppConfigData`: :any:`fracspde` Configuration.
"""

import math
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import ConfigDict, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ._basemodel import BaseModel
from .const import OUTPUT_DIR_DEFAULT, TARGET_REL_ERR_DEFAULT


class MLParams(BaseModel):
    """
    Mittag-Leffler Parameters.

    Args:
        beta: Order in (0, 1]. ``beta=1`` is the exponential.

    Keyword Args:
        target_rel_err: Relative accuracy goal.

    >>> MLParams(beta=0.5)
    MLParams(beta=0.5)
    """

    beta: float = Field(gt=0, le=1)
    target_rel_err: float = Field(default=TARGET_REL_ERR_DEFAULT, gt=0, le=1e-3)


class SubordinatorParams(BaseModel):
    """
    Stable Subordinator Parameters.

    Args:
        beta: Stability index, strictly inside (0, 1).

    Keyword Args:
        target_rel_err: Relative accuracy goal of the Mittag-Leffler delegation.
    """

    beta: float = Field(gt=0, lt=1)
    target_rel_err: float = Field(default=TARGET_REL_ERR_DEFAULT, gt=0, le=1e-3)


class ModelParams(BaseModel):
    """
    Parameters of the time-fractional heat equation.

    Keyword Args:
        beta: Time-fractional order in (0, 1]. ``beta=1`` is the classical heat equation.
        alpha: Stability index of the spatial operator in (0, 2].
        nu: Diffusivity.
        d: Spatial dimension.

    >>> ModelParams()
    ModelParams()
    >>> ModelParams(beta=0.5).theta
    0.25
    """

    beta: float = Field(default=1.0, gt=0, le=1)
    alpha: float = Field(default=2.0, gt=0, le=2)
    nu: float = Field(default=1.0, gt=0)
    d: int = Field(default=1, ge=1)

    @property
    def theta(self) -> float:
        """Kernel exponent βd/α of the second-moment renewal equation."""
        return self.beta * self.d / self.alpha

    @property
    def l2_admissible(self) -> bool:
        """``True`` if ``d < 2α``, which makes G square-integrable."""
        return self.d < 2 * self.alpha

    @property
    def simulation_admissible(self) -> bool:
        """``True`` if ``d < min(2, 1/β)α``."""
        return self.d < min(2.0, 1.0 / self.beta) * self.alpha


class BoundaryPolicy(str, Enum):
    """Spatial Truncation Of The Simulation Domain."""

    ZERO_PADDED = "zero-padded"
    """Field vanishes outside the domain. Convolutions are linear."""

    PERIODIC = "periodic"
    """Domain is a torus. Convolutions are circular."""


class SpaceTimeGrid(BaseModel):
    """
    Uniform Space-Time Lattice.

    Cells are ``[x_min + j*dx, x_min + (j+1)*dx)`` with centers ``x_min + (j+1/2)*dx``.
    Time levels are ``m*dt`` for ``m = 0..nt``.

    >>> grid = SpaceTimeGrid(x_min=-4, x_max=4, nx=16, t_max=1, nt=8)
    >>> grid.dx, grid.dt
    (0.5, 0.125)
    >>> grid.centers()[:2]
    array([-3.75, -3.25])
    """

    x_min: float = -16.0
    x_max: float = 16.0
    nx: int = Field(default=256, ge=16)
    t_max: float = Field(default=1.0, gt=0)
    nt: int = Field(default=64, ge=8)
    boundary_policy: BoundaryPolicy = BoundaryPolicy.ZERO_PADDED

    @model_validator(mode="after")
    def _check_domain(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        return self

    @property
    def length(self) -> float:
        """Domain length."""
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        """Cell width."""
        return self.length / self.nx

    @property
    def dt(self) -> float:
        """Time step."""
        return self.t_max / self.nt

    def centers(self) -> np.ndarray:
        """Cell centers."""
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    def times(self) -> np.ndarray:
        """Time levels including ``t=0``."""
        return np.arange(self.nt + 1) * self.dt

    def cell(self, x: float) -> int:
        """Index of the cell containing ``x``."""
        index = int(math.floor((x - self.x_min) / self.dx))
        return min(max(index, 0), self.nx - 1)


class NonlinearityKind(str, Enum):
    """Kind Of Noise Coefficient."""

    LINEAR = "linear"
    """σ(u) = λu."""

    CUSTOM = "custom"
    """Lipschitz map given by samples ``(u, σ(u))``, linearly interpolated."""


class NonlinearitySpec(BaseModel):
    """
    Noise Coefficient σ.

    ``lip_sigma`` and ``l_sigma`` default to the values implied by ``lam`` or by the samples.

    >>> spec = NonlinearitySpec(lam=0.5)
    >>> spec.lipschitz, spec.cone
    (0.5, 0.5)
    >>> spec.sigma(np.array([2.0]))
    array([1.])
    >>> NonlinearitySpec.model_validate({"lambda": 2.0}).lam
    2.0
    """

    model_config = ConfigDict(populate_by_name=True)

    kind: NonlinearityKind = NonlinearityKind.LINEAR
    lam: float = Field(default=0.0, ge=0, alias="lambda")
    lip_sigma: Optional[float] = Field(default=None, ge=0)
    l_sigma: Optional[float] = Field(default=None, ge=0)
    samples: Optional[Tuple[Tuple[float, float], ...]] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind == NonlinearityKind.CUSTOM:
            if not self.samples or len(self.samples) < 2:
                raise ValueError("custom nonlinearity requires at least two samples")
            us = [u for u, _ in self.samples]
            if any(b <= a for a, b in zip(us, us[1:])):
                raise ValueError("custom nonlinearity samples must be strictly increasing in u")
        if self.cone > self.lipschitz * (1 + 1e-12):
            raise ValueError(f"L_sigma ({self.cone}) exceeds Lip_sigma ({self.lipschitz})")
        return self

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant Lip_σ."""
        if self.lip_sigma is not None:
            return self.lip_sigma
        if self.kind == NonlinearityKind.LINEAR:
            return self.lam
        us, values = self._samples()
        return float(np.max(np.abs(np.diff(values) / np.diff(us))))

    @property
    def cone(self) -> float:
        """Cone constant L_σ = inf |σ(z)/z|."""
        if self.l_sigma is not None:
            return self.l_sigma
        if self.kind == NonlinearityKind.LINEAR:
            return self.lam
        us, values = self._samples()
        nonzero = us != 0
        if not np.any(nonzero):
            return 0.0
        return float(np.min(np.abs(values[nonzero] / us[nonzero])))

    @property
    def is_zero(self) -> bool:
        """``True`` if σ vanishes identically."""
        if self.kind == NonlinearityKind.LINEAR:
            return self.lam == 0
        return all(value == 0 for _, value in self.samples or ())

    @property
    def vanishes_at_zero(self) -> bool:
        """``True`` if σ(0) = 0."""
        return float(self.sigma(np.zeros(1))[0]) == 0

    def sigma(self, u: np.ndarray) -> np.ndarray:
        """Evaluate σ elementwise."""
        if self.kind == NonlinearityKind.LINEAR:
            return self.lam * u
        us, values = self._samples()
        return np.interp(u, us, values)

    def _samples(self) -> Tuple[np.ndarray, np.ndarray]:
        samples = np.asarray(self.samples, dtype=float)
        return samples[:, 0], samples[:, 1]


class InitialKind(str, Enum):
    """Kind Of Initial Data."""

    CONSTANT = "constant"
    """u0 ≡ value."""

    INDICATOR = "indicator"
    """u0 = value on [-half_width, half_width], zero elsewhere."""


class InitialCondition(BaseModel):
    """
    Deterministic Initial Data.

    >>> grid = SpaceTimeGrid(x_min=-4, x_max=4, nx=16, t_max=1, nt=8)
    >>> InitialCondition(kind="indicator", half_width=1.0).sample(grid)[6:10]
    array([1., 1., 1., 1.])
    """

    kind: InitialKind = InitialKind.CONSTANT
    value: float = 1.0
    half_width: float = Field(default=1.0, gt=0)

    @property
    def is_constant(self) -> bool:
        """``True`` for constant initial data."""
        return self.kind == InitialKind.CONSTANT

    def sample(self, grid: SpaceTimeGrid) -> np.ndarray:
        """Cell values on ``grid``."""
        if self.kind == InitialKind.CONSTANT:
            return np.full(grid.nx, float(self.value))
        return np.where(np.abs(grid.centers()) <= self.half_width, float(self.value), 0.0)


class Tolerances(BaseModel):
    """
    Named Check Tolerances.

    Every field can be overridden on the command line via ``--tol NAME=VALUE``.
    """

    gaussian_abs: float = Field(default=1e-8, gt=0, description="Gaussian reduction, absolute")
    l2_rel: float = Field(default=1e-6, gt=0, description="L2 identity for beta=1, relative")
    l2_row_rel: float = Field(default=1e-3, gt=0, description="Kernel table L2 rows versus C*, relative")
    slope_abs: float = Field(default=1e-3, gt=0, description="L2 scaling exponent, absolute")
    spectral_rel: float = Field(default=1e-5, gt=0, description="Subordination versus spectral kernel, relative")
    spectral_samples: int = Field(default=100, ge=1, description="Random (t, x) samples per parameter set")
    mass_abs: float = Field(default=1e-4, gt=0, description="Kernel and density mass, absolute")
    exp_moment_rel: float = Field(default=1e-4, gt=0, description="Exponential moment lemma, relative")
    laplace_rel: float = Field(default=1e-4, gt=0, description="Subordinator Laplace/moment identities, relative")
    renewal_rel: float = Field(default=1e-2, gt=0, description="Renewal asymptote, relative")
    tilted_rel: float = Field(default=1e-2, gt=0, description="Tilted equation versus exponential scheme, relative")
    picard_sup: float = Field(default=1e-4, gt=0, description="Picard convergence, sup norm")
    picard_iterations: int = Field(default=60, ge=1, description="Picard iteration cap")
    se_bands: float = Field(default=3.0, gt=0, description="Monte Carlo agreement in jackknife standard errors")
    lower_bound_frac: float = Field(default=0.25, ge=0, description="Allowed shortfall of the fitted growth rate")
    ci_widths: float = Field(default=5.0, ge=0, description="Front proxy separation in CI widths")
    envelope_factor: float = Field(default=1.1, gt=1, description="Envelope rate over the smallest admissible c")
    epsilon: float = Field(default=0.5, gt=0, lt=1, description="L2 energy bound parameter")


class Command(str, Enum):
    """Experiment Command."""

    ML = "ml"
    KERNEL = "kernel"
    RENEWAL = "renewal"
    SIMULATE = "simulate"
    FRONTS = "fronts"
    VERIFY = "verify"


class Suite(str, Enum):
    """Verification Suite."""

    SPECIAL_FN = "special_fn"
    SUBORDINATOR = "subordinator"
    KERNEL = "kernel"
    RENEWAL = "renewal"
    SPDE_SIM = "spde_sim"
    ALL = "all"


class MLSettings(BaseModel):
    """Mittag-Leffler Table Layout."""

    betas: Tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    x_min: float = Field(default=1e-3, gt=0)
    x_max: float = Field(default=1e3, gt=0)
    points: int = Field(default=40, ge=2)


class RenewalSettings(BaseModel):
    """Renewal Experiment With Constant Forcing."""

    a: float = Field(default=1.0, ge=0)
    b: float = Field(default=1.0, gt=0)
    theta: float = Field(default=0.5, gt=0, lt=1)
    horizon: float = Field(default=8.0, gt=0, description="Final time in units of 1/c")
    points: int = Field(default=201, ge=2)


class FrontSettings(BaseModel):
    """Front Experiment Layout."""

    thetas: Tuple[float, ...] = ()
    window: float = Field(default=0.5, gt=0, le=1, description="Fraction of the final times averaged")


class ExperimentConfig(BaseModel):
    """
    Fully Resolved Experiment Description.

    Loaded from JSON, overridden by command line flags and echoed into ``manifest.json``.

    >>> ExperimentConfig().command
    <Command.VERIFY: 'verify'>
    """

    command: Command = Command.VERIFY
    suite: Suite = Suite.ALL
    params: ModelParams = ModelParams(beta=0.5)
    grid: SpaceTimeGrid = SpaceTimeGrid()
    nonlinearity: NonlinearitySpec = NonlinearitySpec(lam=1.0)
    initial: InitialCondition = InitialCondition()
    seed: int = Field(default=0, ge=0, lt=2**64)
    replicas: int = Field(default=1000, ge=1)
    output_dir: Path = OUTPUT_DIR_DEFAULT
    tolerances: Tolerances = Tolerances()
    ml: MLSettings = MLSettings()
    renewal: RenewalSettings = RenewalSettings()
    fronts: FrontSettings = FrontSettings()


class AppConfigData(BaseSettings):
    """
    Configuration data of the application.

    This class holds the concrete configuration values of the application.
    The following values are defined:
    """

    model_config = SettingsConfigDict(extra="allow")

    color_ui: Optional[bool] = Field(
        default=None, description="If set to true, the output the tool generates will be colored."
    )
    """
    Defines if outputs by the tool shall be colored.

    This option can be overridden by specifying the ``FRACSPDE_COLOR_UI`` environment variable.
    """

    threads: Optional[int] = Field(default=None, description="Maximum number of worker threads.")
    """
    Worker cap for kernel tables and replica batches.

    This option can be overridden by specifying the ``FRACSPDE_THREADS`` environment variable.
    """

    output_dir: Optional[str] = Field(default=None, description="Default artifact directory.")
    """
    Directory for artifacts, if the experiment does not name one.

    This option can be overridden by specifying the ``FRACSPDE_OUTPUT_DIR`` environment variable.
    """

    target_rel_err: Optional[float] = Field(default=None, description="Mittag-Leffler accuracy goal.")
    """
    Relative accuracy goal of the Mittag-Leffler evaluation.

    This option can be overridden by specifying the ``FRACSPDE_TARGET_REL_ERR`` environment variable.
    """

    @staticmethod
    def defaults() -> Dict[str, Any]:
        """
        As all configuration options must be optional, this option provides the default values.

        >>> sorted(AppConfigData.defaults())
        ['color_ui', 'output_dir', 'target_rel_err', 'threads']
        """
        return {
            "color_ui": True,
            "threads": os.cpu_count() or 1,
            "output_dir": str(OUTPUT_DIR_DEFAULT),
            "target_rel_err": TARGET_REL_ERR_DEFAULT,
        }
