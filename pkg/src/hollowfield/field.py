"""Reference sound fields and their evaluation on Cartesian grids.

Three field families are provided:

* point-source superpositions -- the reference fields for every study,
  p(r) = A * sum_i exp(-j(k|r - r0_i| + theta_i)) / |r - r0_i|;
* truncated circular-harmonic fields, p(r, phi) = sum_n a_n H_n^(2)(kr) e^{j n phi};
* (plane waves live in :mod:`hollowfield.projection` as a basis).

The e^{-jkd} propagation sign pairs with the second-kind Hankel basis:
both describe waves travelling outward under the e^{+j omega t} time
convention, so the harmonic expansion can actually represent the
reference fields.  Amplitudes carry Pa*m, so a single source produces
|p| = A / distance.

Scalar evaluators raise on singular points; the vectorised evaluators
returned by :func:`point_source_evaluator` / :func:`che_evaluator` mark
such points NaN instead, and :func:`synthesize_grid` absorbs NaNs into a
validity mask.
"""

from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import DomainError, ShapeMismatchError, SingularPointError
from .geometry import polar_of_many

__all__ = [
    "SOUND_SPEED",
    "PointSource",
    "ReferenceFieldSpec",
    "CheCoefficients",
    "FieldGrid",
    "reference_source_cluster",
    "eval_point_source_field",
    "point_source_evaluator",
    "eval_che_field",
    "che_evaluator",
    "che_basis_matrix",
    "synthesize_grid",
]

SOUND_SPEED = 343.0  # m/s, dry air at 20 C; overridable everywhere

SOURCE_EXCLUSION_RADIUS = 1e-9  # m

# Offsets (m) and phases (rad) of the five-source reference cluster used
# by the built-in presets.
CLUSTER_OFFSETS = ((0.0, 0.0), (-0.05, 0.0), (0.0, -0.05), (0.05, 0.0), (0.0, 0.05))
CLUSTER_PHASES = tuple(i * np.pi / 6.0 for i in range(1, 6))


@dataclass
class PointSource:
    """A monopole at ``position`` (m) with emission phase ``phase`` (rad)."""

    position: tuple
    phase: float

    def __post_init__(self):
        x, y = self.position
        self.position = (float(x), float(y))
        self.phase = float(self.phase) % (2.0 * np.pi)


@dataclass
class ReferenceFieldSpec:
    """Point-source superposition at a single frequency.

    ``amplitude`` is in Pa*m; ``wavenumber`` is derived as 2*pi*f/c.
    """

    amplitude: float
    sources: list
    frequency: float
    sound_speed: float = SOUND_SPEED

    def __post_init__(self):
        if not (self.amplitude > 0.0):
            raise DomainError("amplitude must be positive")
        if not (self.frequency > 0.0):
            raise DomainError("frequency must be positive")
        if not (self.sound_speed > 0.0):
            raise DomainError("sound_speed must be positive")
        if not self.sources:
            raise DomainError("sources list must be nonempty")

    @property
    def wavenumber(self):
        return 2.0 * np.pi * self.frequency / self.sound_speed


def reference_source_cluster(offset=(0.0, 0.0)):
    """The standard five-source cluster, shifted rigidly by ``offset`` (m)."""
    ox, oy = float(offset[0]), float(offset[1])
    return [
        PointSource((ox + dx, oy + dy), phase)
        for (dx, dy), phase in zip(CLUSTER_OFFSETS, CLUSTER_PHASES)
    ]


@dataclass
class CheCoefficients:
    """Truncated circular-harmonic coefficients a_{-N..N} at wavenumber k."""

    order: int
    values: np.ndarray
    wavenumber: float

    def __post_init__(self):
        self.order = int(self.order)
        if self.order < 0:
            raise DomainError("order must be >= 0")
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (2 * self.order + 1,):
            raise ShapeMismatchError(
                f"coefficient vector must have length {2 * self.order + 1}, "
                f"got shape {self.values.shape}"
            )
        if not (self.wavenumber > 0.0):
            raise DomainError("wavenumber must be positive")

    @property
    def harmonic_indices(self):
        return np.arange(-self.order, self.order + 1)


@dataclass
class FieldGrid:
    """Complex pressure sampled at pixel centers of a regular grid.

    ``values`` has shape (ny, nx) with x varying fastest in memory;
    pixel (i, j) is centered at (xmin + (i+1/2)dx, ymin + (j+1/2)dy).
    ``valid`` flags pixels whose evaluation succeeded.
    """

    nx: int
    ny: int
    extent: tuple  # (xmin, xmax, ymin, ymax)
    values: np.ndarray
    frequency: float
    valid: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.nx, self.ny = int(self.nx), int(self.ny)
        if self.nx < 2 or self.ny < 2:
            raise DomainError("grid must be at least 2x2")
        xmin, xmax, ymin, ymax = (float(v) for v in self.extent)
        if not (xmin < xmax and ymin < ymax):
            raise DomainError(f"invalid extent {self.extent}")
        self.extent = (xmin, xmax, ymin, ymax)
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.ny, self.nx):
            raise ShapeMismatchError(
                f"values must have shape (ny, nx) = {(self.ny, self.nx)}, "
                f"got {self.values.shape}"
            )
        if self.valid is None:
            self.valid = np.ones((self.ny, self.nx), dtype=bool)
        else:
            self.valid = np.asarray(self.valid, dtype=bool)
            if self.valid.shape != (self.ny, self.nx):
                raise ShapeMismatchError("valid mask shape must match values")

    @property
    def pixel_size(self):
        xmin, xmax, ymin, ymax = self.extent
        return (xmax - xmin) / self.nx, (ymax - ymin) / self.ny

    def x_centers(self):
        xmin, xmax, _, _ = self.extent
        dx = (xmax - xmin) / self.nx
        return xmin + (np.arange(self.nx) + 0.5) * dx

    def y_centers(self):
        _, _, ymin, ymax = self.extent
        dy = (ymax - ymin) / self.ny
        return ymin + (np.arange(self.ny) + 0.5) * dy

    def pixel_centers(self):
        """All pixel centers as an (ny*nx, 2) array, x fastest."""
        X, Y = np.meshgrid(self.x_centers(), self.y_centers())
        return np.column_stack([X.ravel(), Y.ravel()])

    def radius_map(self):
        X, Y = np.meshgrid(self.x_centers(), self.y_centers())
        return np.hypot(X, Y)

    def same_geometry(self, other):
        return (
            self.nx == other.nx
            and self.ny == other.ny
            and np.allclose(self.extent, other.extent, rtol=0.0, atol=1e-12)
        )


def _source_arrays(spec):
    pos = np.array([s.position for s in spec.sources], dtype=float)
    phases = np.array([s.phase for s in spec.sources], dtype=float)
    return pos, phases


def point_source_evaluator(spec):
    """Vectorised evaluator for a point-source superposition.

    The returned callable maps an (n, 2) array of points to an (n,)
    complex array; points within ``SOURCE_EXCLUSION_RADIUS`` of a source
    evaluate to NaN.
    """
    pos, phases = _source_arrays(spec)
    k = spec.wavenumber
    amp = spec.amplitude

    def evaluate(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = np.hypot(
            pts[:, None, 0] - pos[None, :, 0], pts[:, None, 1] - pos[None, :, 1]
        )
        singular = np.any(d < SOURCE_EXCLUSION_RADIUS, axis=1)
        d[singular] = 1.0  # placeholder, overwritten below
        values = amp * np.sum(np.exp(-1j * (k * d + phases[None, :])) / d, axis=1)
        values[singular] = np.nan
        return values

    return evaluate


def eval_point_source_field(spec, point):
    """Field of a point-source superposition at one Cartesian point (m)."""
    value = point_source_evaluator(spec)(np.asarray(point, dtype=float).reshape(1, 2))[0]
    if not np.isfinite(value):
        raise SingularPointError(f"point {tuple(point)} coincides with a source")
    return complex(value)


def che_basis_matrix(points, wavenumber, order):
    """Circular-harmonic synthesis matrix at arbitrary points.

    Entry (l, n) is H_n^(2)(k r_l) e^{j n phi_l} with columns ordered by
    n = -order..order.  All points must satisfy k*r >= the cylinder
    function argument floor.
    """
    r, phi = polar_of_many(np.atleast_2d(np.asarray(points, dtype=float)))
    stack = specfun.hankel2_orders(order, wavenumber * r)  # (2N+1, L)
    n_idx = np.arange(-order, order + 1)
    return (stack * np.exp(1j * n_idx[:, None] * phi[None, :])).T


def che_evaluator(coeffs):
    """Vectorised evaluator for a circular-harmonic field.

    Points with polar radius below the Hankel argument floor evaluate to
    NaN.
    """
    k = coeffs.wavenumber
    r_floor = specfun.MIN_ARGUMENT / k

    def evaluate(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r, _ = polar_of_many(pts)
        ok = r >= r_floor
        values = np.full(pts.shape[0], np.nan, dtype=complex)
        if np.any(ok):
            basis = che_basis_matrix(pts[ok], k, coeffs.order)
            values[ok] = basis @ coeffs.values
        return values

    return evaluate


def eval_che_field(coeffs, point):
    """Circular-harmonic field value at one Cartesian point (m)."""
    value = che_evaluator(coeffs)(np.asarray(point, dtype=float).reshape(1, 2))[0]
    if not np.isfinite(value):
        raise SingularPointError(
            f"point {tuple(point)} is inside the Hankel evaluation floor"
        )
    return complex(value)


def synthesize_grid(evaluator, nx, ny, extent, frequency):
    """Evaluate a field on a regular grid, absorbing singularities.

    ``evaluator`` maps (n, 2) points to (n,) complex values, marking
    failures as NaN; such pixels become 0 with ``valid=False``.
    """
    grid = FieldGrid(nx, ny, extent, np.zeros((int(ny), int(nx)), dtype=complex), frequency)
    values = np.asarray(evaluator(grid.pixel_centers()), dtype=complex).reshape(grid.ny, grid.nx)
    valid = np.isfinite(values)
    grid.values = np.where(valid, values, 0.0 + 0.0j)
    grid.valid = valid
    return grid
