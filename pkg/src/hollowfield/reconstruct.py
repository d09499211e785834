"""End-to-end reconstruction pipelines: projections in, field grid out.

Four methods share one result type:

* ``che`` -- assemble the circular-harmonic system matrix, solve the
  min-norm regularised least-squares problem, synthesise the field from
  the recovered coefficients at every pixel outside the Hankel radius
  floor (the expansion diverges at the origin, and only the annulus is
  ever evaluated);
* ``pwe`` -- same flow with the plane-wave basis, the interior-problem
  baseline;
* ``art`` -- Kaczmarz iteration on exact chord-pixel intersection
  lengths;
* ``fbp`` -- sinogram regrouping plus filtered back-projection.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import projection, solvers, specfun
from .errors import DomainError
from .field import (
    SOUND_SPEED,
    CheCoefficients,
    FieldGrid,
    che_evaluator,
    synthesize_grid,
)
from .geometry import chord_point
from .projection import NODES_PER_WAVELENGTH

__all__ = [
    "ReconstructionResult",
    "che_reconstruct",
    "pwe_reconstruct",
    "art_reconstruct",
    "fbp_pipeline",
    "chord_pixel_rows",
    "order_for_frequency",
    "default_epsilon",
    "ORDER_TABLES",
]

DEFAULT_GRID = dict(nx=141, ny=141, extent=(-0.7, 0.7, -0.7, 0.7))

DEFAULT_NUM_WAVES = 200
DEFAULT_RELAXATION = 0.25
DEFAULT_SWEEPS = 50

# Expansion order vs frequency.  "default" fully represents the
# coefficient spectra; "lean" is the smallest sufficient set.
ORDER_TABLES = {
    "default": ((1000.0, 10), (2000.0, 15), (4000.0, 20), (8000.0, 30), (16000.0, 40)),
    "lean": ((1000.0, 5), (2000.0, 10), (4000.0, 15), (8000.0, 20), (16000.0, 30)),
}


def order_for_frequency(frequency, table="default"):
    """Expansion order for a frequency: table nodes, linear in f between
    them (rounded up), constant outside."""
    if not (frequency > 0.0):
        raise DomainError("frequency must be positive")
    nodes = ORDER_TABLES[table] if isinstance(table, str) else tuple(table)
    freqs = np.array([f for f, _ in nodes])
    orders = np.array([n for _, n in nodes], dtype=float)
    if frequency <= freqs[0]:
        return int(orders[0])
    if frequency >= freqs[-1]:
        return int(orders[-1])
    return int(np.ceil(np.interp(frequency, freqs, orders)))


def default_epsilon(values, snr_db=None, floor_rel=solvers.DEFAULT_EPSILON_FLOOR):
    """Discrepancy target for a measurement vector.

    Noise-free data gets the relative floor; with a known SNR the target
    is the expected noise norm ||s|| / sqrt(1 + 10^(SNR/10)), never below
    the floor (which guards against fitting quadrature error).
    """
    norm = float(np.linalg.norm(values))
    eps = floor_rel * norm
    if snr_db is not None:
        eps = max(eps, norm / np.sqrt(1.0 + 10.0 ** (float(snr_db) / 10.0)))
    return eps


@dataclass
class ReconstructionResult:
    """A reconstructed grid plus the method, coefficients and diagnostics."""

    grid: FieldGrid
    method: str
    coefficients: np.ndarray = None
    diagnostics: dict = None


def _basis_grid(coeff_vector, basis_kind, wavenumber, nx, ny, extent, frequency, order=None,
                num_waves=None):
    """Synthesise a basis-expansion field on a grid, masking the Hankel floor."""
    if basis_kind == "che":
        coeffs = CheCoefficients(order, coeff_vector, wavenumber)
        return synthesize_grid(che_evaluator(coeffs), nx, ny, extent, frequency)
    grid = FieldGrid(nx, ny, extent, np.zeros((int(ny), int(nx)), dtype=complex), frequency)
    pts = grid.pixel_centers()
    r = np.hypot(pts[:, 0], pts[:, 1])
    ok = r >= specfun.MIN_ARGUMENT / wavenumber
    values = np.zeros(pts.shape[0], dtype=complex)
    values[ok] = projection.plane_wave_basis_matrix(pts[ok], wavenumber, num_waves) @ coeff_vector
    grid.values = values.reshape(grid.ny, grid.nx)
    grid.valid = ok.reshape(grid.ny, grid.nx)
    return grid


def che_reconstruct(projections, order, reg, nx=DEFAULT_GRID["nx"], ny=DEFAULT_GRID["ny"],
                    extent=DEFAULT_GRID["extent"], sound_speed=SOUND_SPEED,
                    nodes_per_wavelength=NODES_PER_WAVELENGTH):
    """Circular-harmonic reconstruction of one projection set."""
    t0 = time.perf_counter()
    k = 2.0 * np.pi * projections.frequency / sound_speed
    H = projection.assemble_che_matrix(projections.scheme, k, order, nodes_per_wavelength)
    a, diag = solvers.solve_min_norm(H, projections, reg)
    grid = _basis_grid(a, "che", k, nx, ny, extent, projections.frequency, order=order)
    diagnostics = diag.as_dict()
    diagnostics.update(method="che", order=int(order), runtime_s=time.perf_counter() - t0)
    return ReconstructionResult(grid, "che", coefficients=a, diagnostics=diagnostics)


def pwe_reconstruct(projections, num_waves=DEFAULT_NUM_WAVES, reg=None,
                    nx=DEFAULT_GRID["nx"], ny=DEFAULT_GRID["ny"],
                    extent=DEFAULT_GRID["extent"], sound_speed=SOUND_SPEED,
                    nodes_per_wavelength=NODES_PER_WAVELENGTH):
    """Plane-wave-expansion reconstruction (interior-model baseline)."""
    t0 = time.perf_counter()
    if reg is None:
        reg = solvers.RegularizationSpec.discrepancy(default_epsilon(projections.values))
    k = 2.0 * np.pi * projections.frequency / sound_speed
    H = projection.assemble_pwe_matrix(projections.scheme, k, num_waves, nodes_per_wavelength)
    b, diag = solvers.solve_min_norm(H, projections, reg)
    grid = _basis_grid(b, "pwe", k, nx, ny, extent, projections.frequency,
                       num_waves=num_waves)
    diagnostics = diag.as_dict()
    diagnostics.update(method="pwe", num_waves=int(num_waves),
                       runtime_s=time.perf_counter() - t0)
    return ReconstructionResult(grid, "pwe", coefficients=b, diagnostics=diagnostics)


def chord_pixel_rows(scheme, nx, ny, extent):
    """Exact chord-pixel intersection lengths for every chord of a scheme.

    Traces each chord through the pixel lattice (crossings with the x and
    y grid lines split the chord into per-pixel segments).  Returns a list
    of (flat_pixel_indices, segment_lengths) in scheme chord order; chords
    missing the grid produce empty rows.
    """
    xmin, xmax, ymin, ymax = (float(v) for v in extent)
    dx = (xmax - xmin) / nx
    dy = (ymax - ymin) / ny
    rows = []
    for chord in scheme.chords:
        p0 = chord_point(chord, -chord.half_length)
        p1 = chord_point(chord, chord.half_length)
        direction = p1 - p0
        length = 2.0 * chord.half_length

        # entry/exit parameters of the grid box
        t_lo, t_hi = 0.0, 1.0
        for axis, (lo, hi) in enumerate(((xmin, xmax), (ymin, ymax))):
            d = direction[axis]
            if abs(d) < 1e-300:
                if not (lo <= p0[axis] <= hi):
                    t_lo, t_hi = 1.0, 0.0
                    break
            else:
                ta, tb = (lo - p0[axis]) / d, (hi - p0[axis]) / d
                t_lo = max(t_lo, min(ta, tb))
                t_hi = min(t_hi, max(ta, tb))
        if t_hi <= t_lo:
            rows.append((np.empty(0, dtype=np.intp), np.empty(0)))
            continue

        crossings = [np.array([t_lo, t_hi])]
        for axis, (lo, n, d_ax) in enumerate(((xmin, nx, dx), (ymin, ny, dy))):
            d = direction[axis]
            if abs(d) >= 1e-300:
                lines = lo + np.arange(n + 1) * d_ax
                t = (lines - p0[axis]) / d
                crossings.append(t[(t > t_lo) & (t < t_hi)])
        t_all = np.unique(np.concatenate(crossings))
        mids = 0.5 * (t_all[:-1] + t_all[1:])
        seg_len = np.diff(t_all) * length
        px = p0[None, :] + mids[:, None] * direction[None, :]
        ix = np.clip(((px[:, 0] - xmin) / dx).astype(np.intp), 0, nx - 1)
        iy = np.clip(((px[:, 1] - ymin) / dy).astype(np.intp), 0, ny - 1)
        keep = seg_len > 1e-15
        rows.append(((iy[keep] * nx + ix[keep]), seg_len[keep]))
    return rows


def art_reconstruct(projections, nx=DEFAULT_GRID["nx"], ny=DEFAULT_GRID["ny"],
                    extent=DEFAULT_GRID["extent"], relaxation=DEFAULT_RELAXATION,
                    sweeps=DEFAULT_SWEEPS):
    """Algebraic (Kaczmarz) reconstruction on the pixel basis."""
    t0 = time.perf_counter()
    rows = chord_pixel_rows(projections.scheme, nx, ny, extent)
    x, info = solvers.kaczmarz_art(rows, projections.values, nx * ny, relaxation, sweeps)
    grid = FieldGrid(nx, ny, extent, x.reshape(ny, nx), projections.frequency)
    diagnostics = dict(method="art", relaxation=relaxation, sweeps=sweeps,
                       skipped_rows=info["skipped_rows"],
                       runtime_s=time.perf_counter() - t0)
    return ReconstructionResult(grid, "art", diagnostics=diagnostics)


def fbp_pipeline(projections, nx=DEFAULT_GRID["nx"], ny=DEFAULT_GRID["ny"],
                 extent=DEFAULT_GRID["extent"]):
    """Filtered back-projection on the regrouped (hollow) sinogram."""
    t0 = time.perf_counter()
    sinogram = solvers.chords_to_sinogram(projections)
    grid = solvers.fbp_reconstruct(sinogram, nx, ny, extent, projections.frequency)
    unfilled = int(np.count_nonzero(~sinogram.fill_mask))
    diagnostics = dict(method="fbp", n_angles=int(sinogram.angles_deg.size),
                       n_offsets=int(sinogram.offsets.size), unfilled_cells=unfilled,
                       runtime_s=time.perf_counter() - t0)
    return ReconstructionResult(grid, "fbp", diagnostics=diagnostics)
