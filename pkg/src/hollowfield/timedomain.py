"""Time-domain reconstruction: burst synthesis and per-bin inversion.

The pipeline is spectral end to end.  Synthesis builds each chord's time
series bin by bin -- source emission spectrum times the monopole
propagation kernel at that bin's wavenumber, projected along the chord --
and inverse-transforms, so the data are exactly consistent with the
per-bin reconstruction model.  Reconstruction runs the four steps:

1. DFT each chord's time series (length T, no extra padding);
2. reconstruct the field independently for every bin inside the requested
   band whose energy clears the gate (default -60 dB below the peak bin);
3. stack the per-bin grids into a Hermitian-symmetric spectrum;
4. inverse-DFT per pixel, assert the imaginary residue is negligible and
   return real frames.
"""

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import reconstruct as reconstruct_mod
from . import solvers
from .errors import DomainError, ShapeMismatchError
from .field import SOUND_SPEED, FieldGrid, ReferenceFieldSpec, point_source_evaluator
from .projection import NODES_PER_WAVELENGTH, project_field
from .reconstruct import DEFAULT_GRID, default_epsilon, order_for_frequency

__all__ = [
    "BurstFieldSpec",
    "TimeSeriesProjectionSet",
    "FieldMovie",
    "synthesize_burst_projections",
    "reconstruct_time_domain",
    "probe_series",
]

DEFAULT_SAMPLE_RATE = 48000.0
DEFAULT_RECORD_SAMPLES = 2048  # 32 ms of signal plus padding to a power of two
ENERGY_GATE_DB = -60.0


@dataclass
class BurstFieldSpec:
    """A sinusoidal burst emitted by a cluster of point sources.

    Every source radiates sin(2*pi*carrier*t) gated to [0, burst_duration),
    shifted by its own phase, with monopole propagation at each frequency
    bin.  ``band_hz`` optionally restricts synthesis to a frequency band
    (a rectangular burst has slowly decaying spectral skirts, so full-band
    synthesis is expensive and adds nothing within the reconstruction
    band).
    """

    sources: list
    amplitude: float = 1.0
    sound_speed: float = SOUND_SPEED
    carrier_hz: float = 2000.0
    burst_duration_s: float = 0.010
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE
    total_duration_s: float = DEFAULT_RECORD_SAMPLES / DEFAULT_SAMPLE_RATE
    band_hz: tuple = None


@dataclass
class TimeSeriesProjectionSet:
    """Real projection time series, shape (T, M) in scheme chord order."""

    sample_rate: float
    frames: np.ndarray
    scheme: object
    sound_speed: float = SOUND_SPEED

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=float)
        if self.frames.ndim != 2 or self.frames.shape[0] < 2:
            raise ShapeMismatchError("frames must be a (T>=2, M) array")
        if self.frames.shape[1] != self.scheme.chord_count:
            raise ShapeMismatchError(
                f"frames have {self.frames.shape[1]} chords, scheme has "
                f"{self.scheme.chord_count}"
            )

    @property
    def n_samples(self):
        return self.frames.shape[0]

    def times(self):
        return np.arange(self.n_samples) / self.sample_rate


@dataclass
class FieldMovie:
    """Time-indexed real pressure frames sharing one grid geometry.

    Frames are stored compactly as a (T, ny, nx) real array;
    :meth:`frame` wraps one instant as a :class:`FieldGrid`.
    """

    values: np.ndarray
    extent: tuple
    sample_rate: float
    valid: np.ndarray = dataclass_field(default=None, repr=False)
    active_bins: list = dataclass_field(default_factory=list)
    skipped_bins: list = dataclass_field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 3 or self.values.shape[0] < 1:
            raise ShapeMismatchError("movie values must be a (T, ny, nx) array")
        if self.valid is None:
            self.valid = np.ones(self.values.shape[1:], dtype=bool)

    @property
    def n_frames(self):
        return self.values.shape[0]

    @property
    def grid_shape(self):
        return self.values.shape[1], self.values.shape[2]

    def frame(self, index):
        ny, nx = self.grid_shape
        return FieldGrid(nx, ny, self.extent, self.values[index].astype(complex), 0.0,
                         valid=self.valid.copy())

    def times(self):
        return np.arange(self.n_frames) / self.sample_rate


def _burst_emission(spec):
    n = int(round(spec.total_duration_s * spec.sample_rate_hz))
    if n < 2:
        raise DomainError("total_duration_s is too short for the sample rate")
    t = np.arange(n) / spec.sample_rate_hz
    return np.sin(2.0 * np.pi * spec.carrier_hz * t) * (t < spec.burst_duration_s)


def synthesize_burst_projections(spec, scheme, nodes_per_wavelength=NODES_PER_WAVELENGTH):
    """Chord projection time series of a burst field, built spectrally.

    Requires at least 4 samples per carrier period and a record long
    enough to hold the burst plus the longest propagation delay to any
    chord node.
    """
    if spec.sample_rate_hz < 4.0 * spec.carrier_hz:
        raise DomainError(
            f"sample rate {spec.sample_rate_hz} Hz undersamples the "
            f"{spec.carrier_hz} Hz carrier (need >= 4x)"
        )
    pos = np.array([s.position for s in spec.sources], dtype=float)
    max_source_r = float(np.max(np.hypot(pos[:, 0], pos[:, 1]))) if pos.size else 0.0
    max_node_r = math.hypot(scheme.radii[-1], scheme.chord_half_length)
    max_delay = (max_node_r + max_source_r) / spec.sound_speed
    if spec.total_duration_s < spec.burst_duration_s + max_delay:
        raise DomainError(
            f"record of {spec.total_duration_s * 1e3:.1f} ms cannot hold the "
            f"{spec.burst_duration_s * 1e3:.1f} ms burst plus {max_delay * 1e3:.1f} ms "
            "of propagation"
        )

    emission = _burst_emission(spec)
    n = emission.size
    spectrum = np.fft.rfft(emission)
    freqs = np.fft.rfftfreq(n, d=1.0 / spec.sample_rate_hz)

    active = spectrum != 0.0
    if spec.band_hz is not None:
        f_lo, f_hi = spec.band_hz
        active &= (freqs >= f_lo) & (freqs <= f_hi)
    active[0] = False  # no DC sound
    if n % 2 == 0:
        active[-1] = False

    proj_spectra = np.zeros((freqs.size, scheme.chord_count), dtype=complex)
    for b in np.nonzero(active)[0]:
        field_spec = ReferenceFieldSpec(
            spec.amplitude, spec.sources, freqs[b], spec.sound_speed
        )
        unit = project_field(
            point_source_evaluator(field_spec), scheme, freqs[b], spec.sound_speed,
            nodes_per_wavelength,
        )
        proj_spectra[b] = spectrum[b] * unit.values

    frames = np.fft.irfft(proj_spectra, n=n, axis=0)
    return TimeSeriesProjectionSet(spec.sample_rate_hz, frames, scheme, spec.sound_speed)


def reconstruct_time_domain(data, band, nx=DEFAULT_GRID["nx"], ny=DEFAULT_GRID["ny"],
                            extent=DEFAULT_GRID["extent"], order_rule=None,
                            energy_gate_db=ENERGY_GATE_DB,
                            nodes_per_wavelength=NODES_PER_WAVELENGTH,
                            epsilon_rel=solvers.DEFAULT_EPSILON_FLOOR):
    """Per-bin harmonic reconstruction of projection time series.

    ``band`` is (f_lo, f_hi) within (0, sample_rate/2); ``order_rule``
    maps a bin frequency to an expansion order (defaults to the standard
    order table).  Bins whose projection energy falls below
    ``energy_gate_db`` of the peak bin contribute exactly zero.  Returns
    a movie of T real frames.
    """
    f_lo, f_hi = float(band[0]), float(band[1])
    nyquist = data.sample_rate / 2.0
    if not (0.0 < f_lo < f_hi < nyquist):
        raise DomainError(f"band must lie inside (0, {nyquist}), got {band}")
    if order_rule is None:
        order_rule = order_for_frequency

    n = data.n_samples
    spectra = np.fft.rfft(data.frames, axis=0)  # (bins, M)
    freqs = np.fft.rfftfreq(n, d=1.0 / data.sample_rate)
    in_band = (freqs >= f_lo) & (freqs <= f_hi)
    energy = np.sum(np.abs(spectra) ** 2, axis=1)
    peak = np.max(energy[in_band]) if np.any(in_band) else 0.0
    gate = peak * 10.0 ** (energy_gate_db / 10.0)
    active = in_band & (energy > gate) & (energy > 0.0)
    if n % 2 == 0:
        active[-1] = False
    active[0] = False

    npix = int(nx) * int(ny)
    bin_grids = {}
    skipped = []
    valid_mask = None
    from .projection import ProjectionSet  # local import to avoid cycle at module load

    for b in np.nonzero(active)[0]:
        try:
            projections = ProjectionSet(data.scheme, freqs[b], spectra[b])
            reg = solvers.RegularizationSpec.discrepancy(
                default_epsilon(spectra[b], floor_rel=epsilon_rel)
            )
            result = reconstruct_mod.che_reconstruct(
                projections, order_rule(freqs[b]), reg, nx=nx, ny=ny, extent=extent,
                sound_speed=data.sound_speed, nodes_per_wavelength=nodes_per_wavelength,
            )
        except Exception as exc:  # solver trouble skips the bin, never fatal
            skipped.append((int(b), repr(exc)))
            continue
        bin_grids[int(b)] = result.grid.values.ravel()
        valid_mask = result.grid.valid if valid_mask is None else valid_mask

    # Hermitian spectrum assembly and per-pixel inverse transform, chunked
    # over pixels to bound memory.
    frames = np.empty((n, npix), dtype=float)
    chunk = max(1, int(4e6) // n)
    bins = sorted(bin_grids)
    for start in range(0, npix, chunk):
        sl = slice(start, min(start + chunk, npix))
        spec_chunk = np.zeros((n, sl.stop - sl.start), dtype=complex)
        for b in bins:
            spec_chunk[b] = bin_grids[b][sl]
            spec_chunk[n - b] = np.conj(bin_grids[b][sl])
        time_chunk = np.fft.ifft(spec_chunk, axis=0)
        frames[:, sl] = time_chunk.real
        max_imag = float(np.max(np.abs(time_chunk.imag))) if time_chunk.size else 0.0
        max_real = float(np.max(np.abs(time_chunk.real))) if time_chunk.size else 0.0
        if max_real > 0.0 and max_imag > 1e-9 * max_real:
            raise DomainError(
                f"inverse transform left an imaginary residue of {max_imag:.3e} "
                f"(limit 1e-9 of frame max {max_real:.3e})"
            )

    if valid_mask is None:
        valid_mask = np.ones((int(ny), int(nx)), dtype=bool)
    return FieldMovie(frames.reshape(n, int(ny), int(nx)), tuple(float(v) for v in extent),
                      data.sample_rate, valid=valid_mask, active_bins=bins,
                      skipped_bins=skipped)


def probe_series(movie, point):
    """Time series at the pixel whose center is nearest ``point`` (m).

    Returns (times, values, (ix, iy)).
    """
    grid = movie.frame(0)
    ix = int(np.argmin(np.abs(grid.x_centers() - point[0])))
    iy = int(np.argmin(np.abs(grid.y_centers() - point[1])))
    return movie.times(), movie.values[:, iy, ix].copy(), (ix, iy)
