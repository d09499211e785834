"""Concentric-circle tangent-chord sampling geometry.

A measurement path is a straight chord tangent to a circle of radius R
about the origin.  The tangency point sits at polar angle theta on the
circle; the chord runs perpendicular to that radius, parameterised by the
signed arc length l in [-half_length, +half_length]:

    p(l) = R*(cos t, sin t) + l*(-sin t, cos t)

so every point of the chord has polar radius sqrt(R^2 + l^2) >= R.
A full scheme stacks several circles, each sampled at a fixed angular
step, ordered circle-major with ascending tangent angle.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidSchemeError

__all__ = [
    "TangentChord",
    "SamplingScheme",
    "ChordQuadrature",
    "build_scheme",
    "chord_point",
    "quadrature_nodes",
    "polar_of",
    "polar_of_many",
]


@dataclass(frozen=True)
class TangentChord:
    """One laser path tangent to a circle of ``circle_radius`` meters.

    ``tangent_angle`` is the polar angle (radians, from +x, CCW) of the
    tangency point; the chord extends ``half_length`` meters either way.
    """

    circle_radius: float
    tangent_angle: float
    half_length: float

    def __post_init__(self):
        if not (self.circle_radius > 0.0):
            raise DomainError(f"circle_radius must be positive, got {self.circle_radius!r}")
        if not (self.half_length > 0.0):
            raise DomainError(f"half_length must be positive, got {self.half_length!r}")


@dataclass(frozen=True)
class SamplingScheme:
    """Full concentric-circle measurement layout.

    ``chords`` is derived, ordered circle-major (radii ascending) and
    angle-ascending within each circle; chord (i, j) has tangent angle
    j * angular_step.
    """

    radii: tuple
    angular_step: float  # degrees
    chord_half_length: float
    chords: tuple = field(repr=False)

    @property
    def n_circles(self):
        return len(self.radii)

    @property
    def angles_per_circle(self):
        return int(round(360.0 / self.angular_step))

    @property
    def chord_count(self):
        return len(self.chords)

    def chord_index(self, circle, angle_index):
        return circle * self.angles_per_circle + angle_index


@dataclass(frozen=True)
class ChordQuadrature:
    """Quadrature nodes along one chord.

    ``points`` is (n, 2) Cartesian meters, ``arc_parameters`` the signed
    arc lengths l, ``weights`` the integration weights (meters); weights
    sum to the chord length.
    """

    points: np.ndarray
    arc_parameters: np.ndarray
    weights: np.ndarray
    total_weight: float


def build_scheme(radii, angular_step, chord_half_length):
    """Build a SamplingScheme from circle radii and an angular step.

    Parameters
    ----------
    radii : sequence of float
        Circle radii in meters, strictly positive and strictly ascending.
    angular_step : float
        Step between tangency points in degrees; must divide 360 exactly.
    chord_half_length : float
        Half the chord extent in meters, shared by every chord.
    """
    radii = tuple(float(r) for r in radii)
    if not radii:
        raise InvalidSchemeError("radii list is empty")
    if any(r <= 0.0 for r in radii):
        raise InvalidSchemeError(f"radii must be strictly positive, got {radii}")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InvalidSchemeError(f"radii must be strictly ascending, got {radii}")
    angular_step = float(angular_step)
    if not (0.0 < angular_step <= 360.0):
        raise InvalidSchemeError(f"angular_step must lie in (0, 360], got {angular_step}")
    n_angles = 360.0 / angular_step
    if abs(n_angles - round(n_angles)) > 1e-9:
        raise InvalidSchemeError(f"angular_step {angular_step} does not divide 360 exactly")
    n_angles = int(round(n_angles))
    chord_half_length = float(chord_half_length)
    if not (chord_half_length > 0.0):
        raise InvalidSchemeError("chord_half_length must be positive")

    step_rad = np.deg2rad(angular_step)
    chords = tuple(
        TangentChord(r, j * step_rad, chord_half_length)
        for r in radii
        for j in range(n_angles)
    )
    return SamplingScheme(radii, angular_step, chord_half_length, chords)


def chord_point(chord, l):
    """Cartesian point(s) at signed arc length ``l`` along a chord.

    Accepts a scalar or an array of arc parameters; returns shape (2,) or
    (n, 2) accordingly.  ``|l|`` may not exceed the chord half length.
    """
    l_arr = np.asarray(l, dtype=float)
    if np.any(np.abs(l_arr) > chord.half_length * (1.0 + 1e-12)):
        raise DomainError(
            f"arc parameter out of range: |l| must be <= {chord.half_length}, got {l!r}"
        )
    ct, st = np.cos(chord.tangent_angle), np.sin(chord.tangent_angle)
    x = chord.circle_radius * ct - l_arr * st
    y = chord.circle_radius * st + l_arr * ct
    return np.stack([x, y], axis=-1)


# 5-point Gauss-Legendre rule on [-1, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(5)


def panel_rule(half_length, wavelength, nodes_per_wavelength):
    """Composite Gauss-Legendre rule over [-half_length, half_length].

    Equal panels of width <= wavelength / nodes_per_wavelength, 5 Gauss
    points per panel.  Returns (arc_parameters, weights), both 1-D.
    """
    if not (wavelength > 0.0):
        raise DomainError(f"wavelength must be positive, got {wavelength!r}")
    if nodes_per_wavelength < 2:
        raise DomainError("nodes_per_wavelength must be >= 2")
    length = 2.0 * half_length
    n_panels = int(np.ceil(length / (wavelength / nodes_per_wavelength)))
    edges = np.linspace(-half_length, half_length, n_panels + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    half_widths = 0.5 * np.diff(edges)
    params = (centers[:, None] + half_widths[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half_widths[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return params, weights


def quadrature_nodes(chord, wavelength, nodes_per_wavelength):
    """Quadrature nodes for line integrals along one chord.

    Panel width adapts to the acoustic wavelength so oscillatory kernels
    are resolved; node positions come from :func:`chord_point`.
    """
    params, weights = panel_rule(chord.half_length, wavelength, nodes_per_wavelength)
    points = chord_point(chord, params)
    return ChordQuadrature(points, params, weights, float(np.sum(weights)))


def polar_of(point):
    """Polar coordinates (r, phi) of a Cartesian point, phi in (-pi, pi]."""
    x, y = float(point[0]), float(point[1])
    r = float(np.hypot(x, y))
    if r == 0.0:
        raise DomainError("polar coordinates are undefined at the origin")
    phi = float(np.arctan2(y, x))
    if phi <= -np.pi:
        phi = np.pi
    return r, phi


def polar_of_many(points):
    """Vectorised :func:`polar_of` for an (n, 2) array; origin rows get r=0."""
    pts = np.asarray(points, dtype=float)
    r = np.hypot(pts[..., 0], pts[..., 1])
    phi = np.arctan2(pts[..., 1], pts[..., 0])
    phi = np.where(phi <= -np.pi, np.pi, phi)
    return r, phi
