"""Serialization of grids, projections, schemes, movies and images.

All text formats print floats with 17 significant digits so values
round-trip bit-exactly and reruns diff clean.

FieldGrid text format::

    # nx <int>
    # ny <int>
    # extent <xmin> <xmax> <ymin> <ymax>
    # frequency_hz <float>
    # mask <0|1>
    re,im[,valid]          (nx*ny lines, row-major, x fastest)

ProjectionSet CSV: header ``circle_radius_m,angle_deg,re,im`` plus one
row per measurement in scheme order, with a JSON sidecar carrying the
frequency, sound speed, scheme definition and optional noise metadata.

Rendered images are binary 16-bit big-endian PGM (P5) with the channel
and value range recorded in a header comment.
"""

import csv
import json

import numpy as np

from .errors import DomainError, ShapeMismatchError
from .field import SOUND_SPEED, FieldGrid
from .geometry import build_scheme
from .projection import ProjectionSet

__all__ = [
    "write_field_grid",
    "read_field_grid",
    "scheme_to_dict",
    "scheme_from_dict",
    "write_projections",
    "read_projections",
    "write_movie",
    "append_nmse_row",
    "write_pgm",
]

NMSE_CSV_HEADER = "method,frequency_hz,snr_db,n_circles,order,nmse_db"


def _fmt(value):
    return format(float(value), ".17g")


def write_field_grid(path, grid):
    """Write a FieldGrid in the bit-exact text format."""
    include_mask = not np.all(grid.valid)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"# nx {grid.nx}\n")
        fh.write(f"# ny {grid.ny}\n")
        fh.write("# extent " + " ".join(_fmt(v) for v in grid.extent) + "\n")
        fh.write(f"# frequency_hz {_fmt(grid.frequency)}\n")
        fh.write(f"# mask {int(include_mask)}\n")
        flat = grid.values.ravel()
        if include_mask:
            valid = grid.valid.ravel()
            for v, ok in zip(flat, valid):
                fh.write(f"{_fmt(v.real)},{_fmt(v.imag)},{int(ok)}\n")
        else:
            for v in flat:
                fh.write(f"{_fmt(v.real)},{_fmt(v.imag)}\n")


def read_field_grid(path):
    """Read a FieldGrid written by :func:`write_field_grid`."""
    header = {}
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, *vals = line[1:].split()
                header[key] = vals
            else:
                rows.append(line.split(","))
    try:
        nx = int(header["nx"][0])
        ny = int(header["ny"][0])
        extent = tuple(float(v) for v in header["extent"])
        frequency = float(header["frequency_hz"][0])
        has_mask = bool(int(header["mask"][0]))
    except (KeyError, IndexError, ValueError) as exc:
        raise DomainError(f"malformed grid header in {path}: {exc}") from exc
    if len(rows) != nx * ny:
        raise ShapeMismatchError(f"{path}: expected {nx * ny} data lines, found {len(rows)}")
    values = np.array([complex(float(r[0]), float(r[1])) for r in rows]).reshape(ny, nx)
    valid = None
    if has_mask:
        valid = np.array([bool(int(r[2])) for r in rows]).reshape(ny, nx)
    return FieldGrid(nx, ny, extent, values, frequency, valid=valid)


def scheme_to_dict(scheme):
    return {
        "radii_m": list(scheme.radii),
        "angular_step_deg": scheme.angular_step,
        "chord_half_length_m": scheme.chord_half_length,
    }


def scheme_from_dict(data):
    return build_scheme(
        data["radii_m"], data["angular_step_deg"], data["chord_half_length_m"]
    )


def write_projections(path, projections, sound_speed=SOUND_SPEED, snr_db=None, seed=None,
                      sidecar_path=None):
    """Write projections as CSV plus a JSON metadata sidecar."""
    scheme = projections.scheme
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("circle_radius_m,angle_deg,re,im\n")
        for chord, value in zip(scheme.chords, projections.values):
            angle_deg = np.rad2deg(chord.tangent_angle)
            fh.write(
                f"{_fmt(chord.circle_radius)},{_fmt(angle_deg)},"
                f"{_fmt(value.real)},{_fmt(value.imag)}\n"
            )
    sidecar = {
        "frequency_hz": projections.frequency,
        "sound_speed_mps": sound_speed,
        "scheme": scheme_to_dict(scheme),
    }
    if snr_db is not None:
        sidecar["snr_db"] = snr_db
    if seed is not None:
        sidecar["seed"] = seed
    sidecar_path = sidecar_path or str(path) + ".json"
    with open(sidecar_path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return sidecar_path


def read_projections(path, sidecar_path=None):
    """Read a projection CSV and its sidecar; returns (ProjectionSet, sidecar)."""
    sidecar_path = sidecar_path or str(path) + ".json"
    with open(sidecar_path, "r", encoding="ascii") as fh:
        sidecar = json.load(fh)
    scheme = scheme_from_dict(sidecar["scheme"])
    values = []
    with open(path, "r", encoding="ascii") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["circle_radius_m", "angle_deg", "re", "im"]:
            raise DomainError(f"unexpected projection CSV header {header}")
        for row in reader:
            values.append(complex(float(row[2]), float(row[3])))
    projections = ProjectionSet(scheme, float(sidecar["frequency_hz"]), np.array(values))
    return projections, sidecar


def write_movie(directory, movie, frame_indices=None):
    """Write selected movie frames plus a manifest into a directory.

    ``frame_indices`` defaults to every frame.  Returns the manifest path.
    """
    import os

    os.makedirs(directory, exist_ok=True)
    if frame_indices is None:
        frame_indices = range(movie.n_frames)
    written = []
    for index in frame_indices:
        name = f"frame_{int(index):05d}.grid"
        write_field_grid(os.path.join(directory, name), movie.frame(int(index)))
        written.append({"index": int(index), "file": name,
                        "time_s": int(index) / movie.sample_rate})
    manifest = {
        "sample_rate_hz": movie.sample_rate,
        "frames": written,
        "n_frames_total": movie.n_frames,
    }
    manifest_path = os.path.join(directory, "manifest.json")
    with open(manifest_path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def append_nmse_row(path, method, frequency_hz, nmse_db, snr_db=None, n_circles=None,
                    order=None):
    """Append one row to an NMSE table, creating it with a header."""
    import os

    def cell(v):
        return "" if v is None else (_fmt(v) if isinstance(v, float) else str(v))

    new = not os.path.exists(path)
    with open(path, "a", encoding="ascii", newline="\n") as fh:
        if new:
            fh.write(NMSE_CSV_HEADER + "\n")
        fh.write(
            f"{method},{_fmt(frequency_hz)},{cell(snr_db)},{cell(n_circles)},"
            f"{cell(order)},{_fmt(nmse_db)}\n"
        )


def write_pgm(path, grid, channel, value_range=None):
    """Render one channel of a grid as a 16-bit big-endian binary PGM.

    ``channel`` is ``magnitude``, ``phase`` or ``error_db`` (real part);
    values are mapped linearly from ``value_range`` (default: data min/max)
    onto 0..65535, and the range is recorded in a header comment.
    """
    if channel == "magnitude":
        data = np.abs(grid.values)
    elif channel == "phase":
        data = np.angle(grid.values)
    elif channel == "error_db":
        data = grid.values.real.copy()
    else:
        raise DomainError(f"unknown render channel {channel!r}")
    finite = np.isfinite(data)
    if value_range is None:
        if np.any(finite):
            lo, hi = float(np.min(data[finite])), float(np.max(data[finite]))
        else:
            lo, hi = 0.0, 1.0
        if hi <= lo:
            hi = lo + 1.0
    else:
        lo, hi = float(value_range[0]), float(value_range[1])
        if hi <= lo:
            raise DomainError("value_range must be increasing")
    scaled = np.zeros_like(data)
    scaled[finite] = np.clip((data[finite] - lo) / (hi - lo), 0.0, 1.0)
    pixels = np.flipud(np.round(scaled * 65535.0).astype(">u2"))
    with open(path, "wb") as fh:
        header = (
            f"P5\n# channel={channel} range={_fmt(lo)} {_fmt(hi)}\n"
            f"{grid.nx} {grid.ny}\n65535\n"
        )
        fh.write(header.encode("ascii"))
        fh.write(pixels.tobytes())
    return lo, hi
