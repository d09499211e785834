"""Experiment configuration: defaults, named presets and validation.

A configuration is one JSON document.  ``preset`` selects a named study
(the standard centered/off-center cases at 1..16 kHz, the 2 kHz noise
case, the burst study); any field given explicitly overrides the preset,
which in turn overrides the package defaults.
"""

import copy
import json

import numpy as np

from .errors import ConfigError

__all__ = ["PRESETS", "default_config", "resolve_config", "canonical_json", "validate_config"]

# Off-center source-cluster offsets (m) for the standard off-center cases.
OFFCENTER_OFFSETS = {
    1000: (0.0, 0.12),
    2000: (0.2, 0.0),
    4000: (-0.2, 0.0),
    8000: (-0.2, 0.1),
    16000: (0.2, -0.1),
}

_FREQ_TAGS = {1000: "1k", 2000: "2k", 4000: "4k", 8000: "8k", 16000: "16k"}


def default_config():
    """The full default configuration (centered cluster, 2 kHz, CHE)."""
    return {
        "field": {
            "amplitude_pa_m": 1.0,
            "frequency_hz": 2000.0,
            "sound_speed_mps": 343.0,
            "source_offset_m": [0.0, 0.0],
        },
        "scheme": {
            "radii_m": [round(0.3 + 0.01 * i, 10) for i in range(31)],
            "angular_step_deg": 5.0,
            "chord_half_length_m": 1.5,
        },
        "grid": {"nx": 141, "ny": 141, "extent_m": [-0.7, 0.7, -0.7, 0.7]},
        "method": {
            "name": "che",
            "order": None,
            "order_table": "default",
            "num_waves": 200,
            "relaxation": 0.25,
            "sweeps": 50,
            "regularization": {"mode": "discrepancy", "epsilon": None, "epsilon_rel": None},
        },
        "quadrature": {"nodes_per_wavelength": 8},
        "noise": None,
        "evaluation": {"r_min_m": 0.3, "r_max_m": 0.6},
        "sweep": {"kind": "circles", "values": None},
        "timedomain": {
            "carrier_hz": 2000.0,
            "burst_duration_ms": 10.0,
            "sample_rate_hz": 48000.0,
            "record_samples": 2048,
            "band_hz": [500.0, 4000.0],
            "energy_gate_db": -60.0,
            "probe_point_m": [0.45, 0.0],
            "frame_times_ms": [1.1, 1.36, 1.5, 2.28, 2.6],
        },
        "render": {"grid": None, "channel": "magnitude", "range": None, "output": None},
        "inputs": {},
        "output_dir": "hollowfield-out",
    }


def _build_presets():
    presets = {}
    for f, tag in _FREQ_TAGS.items():
        presets[f"paper-centered-{tag}"] = {"field": {"frequency_hz": float(f)}}
        presets[f"paper-offcenter-{tag}"] = {
            "field": {
                "frequency_hz": float(f),
                "source_offset_m": list(OFFCENTER_OFFSETS[f]),
            }
        }
    presets["paper-noise-2k"] = {
        "field": {"frequency_hz": 2000.0},
        "noise": {"snr_db": 20.0, "seed": 1},
        "sweep": {"kind": "snr", "values": [15.0, 20.0, 25.0, 30.0]},
    }
    presets["paper-timedomain"] = {"field": {"frequency_hz": 2000.0}}
    return presets


PRESETS = _build_presets()


def _deep_merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def resolve_config(user_config):
    """Merge defaults <- preset <- user config and validate the result."""
    if not isinstance(user_config, dict):
        raise ConfigError("configuration must be a JSON object")
    config = default_config()
    preset_name = user_config.get("preset")
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(
                f"unknown preset {preset_name!r}; available: {sorted(PRESETS)}"
            )
        config = _deep_merge(config, PRESETS[preset_name])
    config = _deep_merge(config, {k: v for k, v in user_config.items() if k != "preset"})
    if preset_name is not None:
        config["preset"] = preset_name
    validate_config(config)
    return config


def canonical_json(config):
    """Canonical serialization; serialize->parse->serialize is identity."""
    return json.dumps(config, indent=2, sort_keys=True) + "\n"


def _require(condition, message):
    if not condition:
        raise ConfigError(message)


def validate_config(config):
    """Check every cross-module precondition before any work starts."""
    f = config["field"]
    _require(f["amplitude_pa_m"] > 0, "field.amplitude_pa_m must be > 0")
    _require(f["frequency_hz"] > 0, "field.frequency_hz must be > 0")
    _require(f["sound_speed_mps"] > 0, "field.sound_speed_mps must be > 0")
    _require(
        isinstance(f["source_offset_m"], (list, tuple)) and len(f["source_offset_m"]) == 2,
        "field.source_offset_m must be an [x, y] pair",
    )
    if "sources" in f:
        _require(
            isinstance(f["sources"], list) and f["sources"],
            "field.sources must be a nonempty list",
        )
        for s in f["sources"]:
            _require(
                len(s.get("position_m", ())) == 2 and "phase_rad" in s,
                "each source needs position_m [x, y] and phase_rad",
            )

    sch = config["scheme"]
    radii = sch["radii_m"]
    _require(bool(radii), "scheme.radii_m must be nonempty")
    _require(all(r > 0 for r in radii), "scheme.radii_m must be positive")
    _require(
        all(b > a for a, b in zip(radii, radii[1:])), "scheme.radii_m must be ascending"
    )
    step = sch["angular_step_deg"]
    _require(0 < step <= 360, "scheme.angular_step_deg must lie in (0, 360]")
    _require(
        abs(360.0 / step - round(360.0 / step)) < 1e-9,
        "scheme.angular_step_deg must divide 360 exactly",
    )
    _require(sch["chord_half_length_m"] > 0, "scheme.chord_half_length_m must be > 0")

    g = config["grid"]
    _require(g["nx"] >= 2 and g["ny"] >= 2, "grid must be at least 2x2")
    xmin, xmax, ymin, ymax = g["extent_m"]
    _require(xmin < xmax and ymin < ymax, "grid.extent_m must be increasing pairs")

    m = config["method"]
    _require(m["name"] in ("che", "pwe", "art", "fbp"), f"unknown method {m['name']!r}")
    if m["order"] is not None:
        _require(0 <= m["order"] <= 64, "method.order must lie in [0, 64]")
    _require(m["order_table"] in ("default", "lean"), "method.order_table must be default|lean")
    _require(m["num_waves"] >= 1, "method.num_waves must be >= 1")
    _require(0 < m["relaxation"] < 2, "method.relaxation must lie in (0, 2)")
    _require(m["sweeps"] >= 1, "method.sweeps must be >= 1")
    reg = m["regularization"]
    _require(
        reg["mode"] in ("discrepancy", "fixed-lambda", "truncated-svd"),
        "regularization.mode must be discrepancy|fixed-lambda|truncated-svd",
    )
    if reg["mode"] == "fixed-lambda":
        _require(reg.get("lambda", None) is not None and reg["lambda"] >= 0,
                 "fixed-lambda mode needs a nonnegative 'lambda'")
    if reg["mode"] == "truncated-svd":
        _require(0 <= reg.get("svd_cutoff", -1) < 1,
                 "truncated-svd mode needs svd_cutoff in [0, 1)")

    _require(config["quadrature"]["nodes_per_wavelength"] >= 2,
             "quadrature.nodes_per_wavelength must be >= 2")

    noise = config["noise"]
    if noise is not None:
        _require(np.isfinite(noise["snr_db"]), "noise.snr_db must be finite")
        _require(int(noise.get("seed", 0)) >= 0, "noise.seed must be a nonnegative integer")

    ev = config["evaluation"]
    _require(0 <= ev["r_min_m"] < ev["r_max_m"], "evaluation radii must satisfy 0 <= rmin < rmax")

    sw = config["sweep"]
    _require(
        sw["kind"] in ("order", "circles", "snr", "frequency", "single-circle"),
        "sweep.kind must be order|circles|snr|frequency|single-circle",
    )

    td = config["timedomain"]
    _require(td["carrier_hz"] > 0, "timedomain.carrier_hz must be > 0")
    _require(td["burst_duration_ms"] > 0, "timedomain.burst_duration_ms must be > 0")
    _require(td["sample_rate_hz"] >= 4 * td["carrier_hz"],
             "timedomain.sample_rate_hz must be >= 4x carrier")
    _require(td["record_samples"] >= 2, "timedomain.record_samples must be >= 2")
    band = td["band_hz"]
    _require(
        0 < band[0] < band[1] < td["sample_rate_hz"] / 2,
        "timedomain.band_hz must lie inside (0, sample_rate/2)",
    )
    return config
