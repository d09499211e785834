"""Reconstruction-error metrics with annulus masking.

Quality is only judged between the innermost and outermost sampling
circles, so both metrics take an :class:`AnnulusMask`.  The per-pixel
error map is 10*log10(|p_rec - p_ref|^2 / |p_ref|^2) and the scalar
figure of merit is NMSE = 20*log10(||p_rec - p_ref|| / ||p_ref||), both
clamped to [-300, 300] dB.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeMismatchError

__all__ = ["AnnulusMask", "annulus_mask", "pixel_error_db", "nmse_db"]

DB_CLAMP = 300.0
REFERENCE_ZERO_REL = 1e-12

DEFAULT_R_MIN = 0.3
DEFAULT_R_MAX = 0.6


@dataclass
class AnnulusMask:
    """Pixels whose center radius lies in [r_min, r_max]."""

    r_min: float
    r_max: float
    include: np.ndarray

    @property
    def count(self):
        return int(np.count_nonzero(self.include))


def annulus_mask(grid, r_min=DEFAULT_R_MIN, r_max=DEFAULT_R_MAX):
    """Annulus evaluation mask aligned with ``grid``."""
    r_min, r_max = float(r_min), float(r_max)
    if not (0.0 <= r_min < r_max):
        raise DomainError(f"need 0 <= r_min < r_max, got ({r_min}, {r_max})")
    radius = grid.radius_map()
    return AnnulusMask(r_min, r_max, (radius >= r_min) & (radius <= r_max))


def _check_geometry(reconstructed, reference):
    if not reconstructed.same_geometry(reference):
        raise ShapeMismatchError(
            f"grid geometries differ: {reconstructed.nx}x{reconstructed.ny} "
            f"{reconstructed.extent} vs {reference.nx}x{reference.ny} {reference.extent}"
        )


def pixel_error_db(reconstructed, reference):
    """Per-pixel reconstruction error map in dB.

    Pixels where the reference is (relatively) zero or either grid is
    invalid are NaN; finite values are clamped to +/-300 dB.
    """
    _check_geometry(reconstructed, reference)
    ref = reference.values
    rec = reconstructed.values
    defined = (
        (np.abs(ref) >= REFERENCE_ZERO_REL * np.max(np.abs(ref)))
        & reference.valid
        & reconstructed.valid
    )
    out = np.full(ref.shape, np.nan)
    with np.errstate(divide="ignore"):
        ratio = np.abs(rec[defined] - ref[defined]) ** 2 / np.abs(ref[defined]) ** 2
        out[defined] = np.clip(10.0 * np.log10(ratio), -DB_CLAMP, DB_CLAMP)
    return out


def nmse_db(reconstructed, reference, mask):
    """Normalized mean square error over the masked pixels, in dB."""
    _check_geometry(reconstructed, reference)
    include = mask.include & reconstructed.valid & reference.valid
    if not np.any(include):
        raise DomainError("evaluation mask is empty")
    ref = reference.values[include]
    ref_norm = np.linalg.norm(ref)
    if ref_norm == 0.0:
        raise DomainError("reference field is zero over the mask")
    err_norm = np.linalg.norm(reconstructed.values[include] - ref)
    if err_norm == 0.0:
        return -DB_CLAMP
    return float(max(20.0 * np.log10(err_norm / ref_norm), -DB_CLAMP))
