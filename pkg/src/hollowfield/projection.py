"""Forward models: line-integral projections and system matrices.

A measurement is the complex line integral of the pressure field along
one tangent chord (Pa*m).  :func:`project_field` integrates an arbitrary
field numerically and acts as the measurement oracle; the matrix
assemblers integrate the circular-harmonic and plane-wave basis kernels
with the same composite Gauss-Legendre rule, so matrix-times-coefficients
agrees with projecting the synthesised field to quadrature accuracy.

Both assemblers factor out per-chord phase identities instead of looping
over every chord's nodes:

* rotating a chord by theta multiplies the order-n harmonic entry by
  e^{j n theta}, so only one reference chord per radius is integrated;
* along a chord, a plane wave's phase splits into a tangency-point part
  and a pure in-chord oscillation depending only on (alpha - theta).

Both identities are exact; the quadrature nodes and weights are shared
with :func:`project_field`.
"""

from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError, ShapeMismatchError, SingularPointError
from .field import SOUND_SPEED
from .geometry import chord_point, panel_rule

__all__ = [
    "NODES_PER_WAVELENGTH",
    "ProjectionSet",
    "ForwardMatrix",
    "project_field",
    "assemble_che_matrix",
    "assemble_pwe_matrix",
    "add_noise",
]

NODES_PER_WAVELENGTH = 8


@dataclass
class ProjectionSet:
    """Complex projections s_m (Pa*m) in scheme chord order."""

    scheme: object
    frequency: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.scheme.chord_count,):
            raise ShapeMismatchError(
                f"expected {self.scheme.chord_count} projection values, "
                f"got shape {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise DomainError("projection values must be finite")


@dataclass
class ForwardMatrix:
    """Dense system matrix mapping basis coefficients to projections."""

    entries: np.ndarray
    basis_kind: str  # "che" or "pwe"
    wavenumber: float
    scheme: object = None
    order: int = None
    num_waves: int = None

    @property
    def shape(self):
        return self.entries.shape


def project_field(evaluator, scheme, frequency, sound_speed=SOUND_SPEED,
                  nodes_per_wavelength=NODES_PER_WAVELENGTH):
    """Line integrals of an arbitrary field over every chord of a scheme.

    Parameters
    ----------
    evaluator : callable
        Maps an (n, 2) point array to (n,) complex values; NaN marks a
        singular point, which aborts that chord's integral.
    scheme : SamplingScheme
    frequency, sound_speed : float
        Set the acoustic wavelength that controls quadrature density.
    """
    if not (frequency > 0.0 and sound_speed > 0.0):
        raise DomainError("frequency and sound_speed must be positive")
    wavelength = sound_speed / frequency
    params, weights = panel_rule(scheme.chord_half_length, wavelength, nodes_per_wavelength)
    values = np.empty(scheme.chord_count, dtype=complex)
    for m, chord in enumerate(scheme.chords):
        samples = evaluator(chord_point(chord, params))
        if not np.all(np.isfinite(samples)):
            raise SingularPointError(f"a quadrature node of chord {m} hit a singular point")
        values[m] = weights @ samples
    return ProjectionSet(scheme, frequency, values)


def assemble_che_matrix(scheme, wavenumber, order, nodes_per_wavelength=NODES_PER_WAVELENGTH):
    """System matrix of the circular-harmonic basis over a scheme.

    Entry (m, n) integrates H_n^(2)(kr) e^{j n phi} along chord m; columns
    are ordered n = -order..order.
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    if not (wavenumber > 0.0):
        raise DomainError("wavenumber must be positive")
    wavelength = 2.0 * np.pi / wavenumber
    params, weights = panel_rule(scheme.chord_half_length, wavelength, nodes_per_wavelength)
    n_idx = np.arange(-order, order + 1)
    n_angles = scheme.angles_per_circle
    angles = np.arange(n_angles) * np.deg2rad(scheme.angular_step)
    rotations = np.exp(1j * np.outer(angles, n_idx))  # (A, 2N+1)

    entries = np.empty((scheme.chord_count, 2 * order + 1), dtype=complex)
    for i, radius in enumerate(scheme.radii):
        # reference chord at tangent angle 0
        r = np.hypot(radius, params)
        phi0 = np.arctan2(params, radius)
        kernel = specfun.hankel2_orders(order, wavenumber * r)  # (2N+1, L)
        kernel = kernel * np.exp(1j * n_idx[:, None] * phi0[None, :])
        base = kernel @ weights  # (2N+1,)
        entries[i * n_angles:(i + 1) * n_angles, :] = rotations * base[None, :]
    return ForwardMatrix(entries, "che", wavenumber, scheme=scheme, order=int(order))


def pwe_directions(num_waves):
    """Propagation angles alpha_w = 2*pi*w/W of the plane-wave basis."""
    if num_waves < 1:
        raise DomainError("num_waves must be >= 1")
    return 2.0 * np.pi * np.arange(num_waves) / num_waves


def plane_wave_basis_matrix(points, wavenumber, num_waves):
    """Plane-wave synthesis matrix e^{-j k (x cos a + y sin a)} at points."""
    alphas = pwe_directions(num_waves)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    phase = pts[:, 0:1] * np.cos(alphas)[None, :] + pts[:, 1:2] * np.sin(alphas)[None, :]
    return np.exp(-1j * wavenumber * phase)


def assemble_pwe_matrix(scheme, wavenumber, num_waves, nodes_per_wavelength=NODES_PER_WAVELENGTH):
    """System matrix of the plane-wave basis over a scheme.

    Basis wave w propagates along alpha_w = 2*pi*w/W with kernel
    e^{-j k r . d_w}; the chord integral factors into the tangency-point
    phase times the in-chord oscillation integral, which depends only on
    k*sin(alpha_w - theta).
    """
    if not (wavenumber > 0.0):
        raise DomainError("wavenumber must be positive")
    alphas = pwe_directions(num_waves)
    wavelength = 2.0 * np.pi / wavenumber
    params, weights = panel_rule(scheme.chord_half_length, wavelength, nodes_per_wavelength)

    n_angles = scheme.angles_per_circle
    thetas = np.arange(n_angles) * np.deg2rad(scheme.angular_step)
    # p(l) . d_w = R cos(alpha - theta) + l sin(alpha - theta)
    psi = alphas[None, :] - thetas[:, None]  # (A, W)
    # in-chord integral, shared by all radii: (A, W), computed in blocks
    # to bound the (rows x nodes) intermediate
    sin_psi = np.sin(psi).ravel()
    chord_factor = np.empty(sin_psi.size, dtype=complex)
    block = max(1, int(2e6) // max(1, params.size))
    for start in range(0, sin_psi.size, block):
        sl = slice(start, start + block)
        chord_factor[sl] = np.exp(-1j * wavenumber * np.outer(sin_psi[sl], params)) @ weights
    chord_factor = chord_factor.reshape(psi.shape)

    entries = np.empty((scheme.chord_count, num_waves), dtype=complex)
    for i, radius in enumerate(scheme.radii):
        tangency_phase = np.exp(-1j * wavenumber * radius * np.cos(psi))
        entries[i * n_angles:(i + 1) * n_angles, :] = tangency_phase * chord_factor
    return ForwardMatrix(entries, "pwe", wavenumber, scheme=scheme, num_waves=int(num_waves))


def add_noise(projections, snr_db, seed):
    """Add circularly-symmetric complex Gaussian noise at a target SNR.

    Per-sample noise variance is mean(|s|^2) / 10^(snr_db/10), split
    equally between real and imaginary parts; deterministic per seed.
    """
    snr_db = float(snr_db)
    if not np.isfinite(snr_db):
        raise DomainError("snr_db must be finite")
    s = projections.values
    sigma2 = float(np.mean(np.abs(s) ** 2)) / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(s.size) + 1j * rng.standard_normal(s.size)
    noise *= np.sqrt(sigma2 / 2.0)
    return ProjectionSet(projections.scheme, projections.frequency, s + noise)


def noise_sigma(projections, snr_db):
    """Per-sample noise std dev that :func:`add_noise` would use."""
    return float(
        np.sqrt(np.mean(np.abs(projections.values) ** 2) / 10.0 ** (float(snr_db) / 10.0))
    )
