"""Command-line driver.

Usage::

    hollowfield simulate|reconstruct|evaluate|sweep|timedomain|render
                --config <path> [--out <dir>] [--seed <u64>]

Every command reads one JSON configuration (see :mod:`hollowfield.presets`),
runs deterministically for a fixed (config, seed), and writes its outputs
into the configured directory.  Exit codes: 0 success, 2 configuration
error, 3 numeric failure, 4 I/O error.  ``HOLLOWFIELD_THREADS`` caps the
sweep worker pool.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import fileio, metrics, reconstruct, solvers, timedomain
from .errors import ConfigError, HollowfieldError
from .field import (
    FieldGrid,
    PointSource,
    ReferenceFieldSpec,
    point_source_evaluator,
    reference_source_cluster,
    synthesize_grid,
)
from .geometry import build_scheme
from .presets import canonical_json, resolve_config
from .projection import add_noise, project_field
from .timedomain import BurstFieldSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _worker_count():
    env = os.environ.get("HOLLOWFIELD_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"HOLLOWFIELD_THREADS must be an integer, got {env!r}") from exc
    return min(4, os.cpu_count() or 1)


def _sources_from_config(config):
    fld = config["field"]
    if "sources" in fld:
        return [PointSource(tuple(s["position_m"]), s["phase_rad"]) for s in fld["sources"]]
    return reference_source_cluster(tuple(fld["source_offset_m"]))


def _field_spec(config, frequency=None):
    fld = config["field"]
    return ReferenceFieldSpec(
        fld["amplitude_pa_m"],
        _sources_from_config(config),
        frequency if frequency is not None else fld["frequency_hz"],
        fld["sound_speed_mps"],
    )


def _scheme(config, radii=None):
    sch = config["scheme"]
    return build_scheme(
        radii if radii is not None else sch["radii_m"],
        sch["angular_step_deg"],
        sch["chord_half_length_m"],
    )


def _grid_args(config):
    g = config["grid"]
    return dict(nx=g["nx"], ny=g["ny"], extent=tuple(g["extent_m"]))


def _order(config, frequency):
    m = config["method"]
    if m["order"] is not None:
        return int(m["order"])
    return reconstruct.order_for_frequency(frequency, m["order_table"])


def _regularization(config, values, snr_db):
    reg = config["method"]["regularization"]
    if reg["mode"] == "fixed-lambda":
        return solvers.RegularizationSpec.fixed_lambda(reg["lambda"])
    if reg["mode"] == "truncated-svd":
        return solvers.RegularizationSpec.truncated_svd(reg["svd_cutoff"])
    if reg.get("epsilon") is not None:
        eps = float(reg["epsilon"])
    elif reg.get("epsilon_rel") is not None:
        eps = float(reg["epsilon_rel"]) * float(np.linalg.norm(values))
    else:
        eps = reconstruct.default_epsilon(values, snr_db)
    return solvers.RegularizationSpec.discrepancy(eps)


def _simulate_in_memory(config, frequency=None, radii=None, snr_db=None, seed=None):
    """Reference grid and (optionally noisy) projections for a config."""
    spec = _field_spec(config, frequency)
    scheme = _scheme(config, radii)
    npw = config["quadrature"]["nodes_per_wavelength"]
    evaluator = point_source_evaluator(spec)
    projections = project_field(evaluator, scheme, spec.frequency, spec.sound_speed, npw)
    noise_cfg = config["noise"]
    if snr_db is None and noise_cfg is not None:
        snr_db = noise_cfg["snr_db"]
        seed = noise_cfg["seed"] if seed is None else seed
    if snr_db is not None:
        projections = add_noise(projections, snr_db, 0 if seed is None else seed)
    reference = synthesize_grid(evaluator, frequency=spec.frequency, **_grid_args(config))
    return spec, scheme, projections, reference, snr_db, seed


def _reconstruct_in_memory(config, projections, snr_db=None, method=None):
    method = method or config["method"]["name"]
    m = config["method"]
    npw = config["quadrature"]["nodes_per_wavelength"]
    grid_args = _grid_args(config)
    sound_speed = config["field"]["sound_speed_mps"]
    if method == "che":
        order = _order(config, projections.frequency)
        reg = _regularization(config, projections.values, snr_db)
        return reconstruct.che_reconstruct(
            projections, order, reg, sound_speed=sound_speed,
            nodes_per_wavelength=npw, **grid_args)
    if method == "pwe":
        reg = _regularization(config, projections.values, snr_db)
        return reconstruct.pwe_reconstruct(
            projections, m["num_waves"], reg, sound_speed=sound_speed,
            nodes_per_wavelength=npw, **grid_args)
    if method == "art":
        return reconstruct.art_reconstruct(
            projections, relaxation=m["relaxation"], sweeps=m["sweeps"], **grid_args)
    if method == "fbp":
        return reconstruct.fbp_pipeline(projections, **grid_args)
    raise ConfigError(f"unknown method {method!r}")


def _write_diagnostics(path, diagnostics):
    clean = {}
    for key, value in diagnostics.items():
        if isinstance(value, (np.floating, np.integer)):
            value = value.item()
        if isinstance(value, float) and not np.isfinite(value):
            value = repr(value)
        clean[key] = value
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(clean, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_simulate(config, out_dir, seed=None):
    spec, scheme, projections, reference, snr_db, used_seed = _simulate_in_memory(
        config, seed=seed)
    fileio.write_field_grid(os.path.join(out_dir, "reference.grid"), reference)
    fileio.write_projections(
        os.path.join(out_dir, "projections.csv"), projections,
        sound_speed=spec.sound_speed, snr_db=snr_db, seed=used_seed,
        sidecar_path=os.path.join(out_dir, "meta.json"))
    print(f"wrote reference.grid and projections.csv ({projections.values.size} rows) "
          f"to {out_dir}")
    return EXIT_OK


def cmd_reconstruct(config, out_dir, seed=None):
    proj_path = config["inputs"].get("projections") or os.path.join(out_dir, "projections.csv")
    sidecar_path = config["inputs"].get("sidecar") or os.path.join(out_dir, "meta.json")
    projections, sidecar = fileio.read_projections(proj_path, sidecar_path)
    method = config["method"]["name"]
    result = _reconstruct_in_memory(config, projections, snr_db=sidecar.get("snr_db"),
                                    method=method)
    fileio.write_field_grid(os.path.join(out_dir, f"recon_{method}.grid"), result.grid)
    _write_diagnostics(os.path.join(out_dir, f"diag_{method}.json"), result.diagnostics)
    print(f"wrote recon_{method}.grid and diag_{method}.json to {out_dir}")
    return EXIT_OK


def cmd_evaluate(config, out_dir, seed=None):
    method = config["method"]["name"]
    ref_path = config["inputs"].get("reference") or os.path.join(out_dir, "reference.grid")
    res_path = config["inputs"].get("result") or os.path.join(out_dir, f"recon_{method}.grid")
    reference = fileio.read_field_grid(ref_path)
    result = fileio.read_field_grid(res_path)
    ev = config["evaluation"]
    mask = metrics.annulus_mask(reference, ev["r_min_m"], ev["r_max_m"])
    nmse = metrics.nmse_db(result, reference, mask)
    error_map = metrics.pixel_error_db(result, reference)
    error_grid = FieldGrid(
        reference.nx, reference.ny, reference.extent,
        np.where(np.isfinite(error_map), error_map, 0.0).astype(complex),
        reference.frequency, valid=np.isfinite(error_map))
    fileio.write_field_grid(os.path.join(out_dir, f"error_{method}.grid"), error_grid)
    noise_cfg = config["noise"]
    fileio.append_nmse_row(
        os.path.join(out_dir, "nmse.csv"), method, reference.frequency, nmse,
        snr_db=None if noise_cfg is None else noise_cfg["snr_db"],
        n_circles=len(config["scheme"]["radii_m"]),
        order=_order(config, reference.frequency) if method == "che" else None)
    print(f"{method} NMSE over [{ev['r_min_m']}, {ev['r_max_m']}] m: {nmse:.3f} dB")
    return EXIT_OK


SWEEP_CSV_HEADER = "swept_parameter,swept_value,method,frequency_hz,snr_db,n_circles,order,nmse_db"


def _sweep_points(config):
    kind = config["sweep"]["kind"]
    values = config["sweep"]["values"]
    radii = config["scheme"]["radii_m"]
    if kind == "order":
        return values or [5, 10, 15, 20, 25, 30, 40]
    if kind == "circles":
        return values or list(range(1, len(radii) + 1))
    if kind == "snr":
        return values or [15.0, 20.0, 25.0, 30.0]
    if kind == "frequency":
        return values or [1000.0, 2000.0, 4000.0, 8000.0, 16000.0]
    if kind == "single-circle":
        return values or list(radii)
    raise ConfigError(f"unknown sweep kind {kind!r}")


def _run_sweep_point(config, kind, value, out_dir, seed):
    """One sweep point -> list of result-row dicts (one per method run)."""
    ev = config["evaluation"]
    noise_cfg = config["noise"]
    base_seed = seed if seed is not None else (
        noise_cfg["seed"] if noise_cfg is not None else 0)
    methods = [config["method"]["name"]]
    frequency = None
    radii = None
    snr_db = noise_cfg["snr_db"] if noise_cfg is not None else None
    order_override = None

    if kind == "frequency":
        frequency = float(value)
        methods = ["che", "pwe", "art", "fbp"]
    elif kind == "snr":
        snr_db = float(value)
        methods = ["che", "pwe", "art", "fbp"]
    elif kind == "circles":
        radii = config["scheme"]["radii_m"][: int(value)]
        methods = ["che"]
    elif kind == "single-circle":
        radii = [float(value)]
        methods = ["che"]
    elif kind == "order":
        order_override = int(value)
        methods = ["che"]

    _, scheme, projections, reference, snr_db, _ = _simulate_in_memory(
        config, frequency=frequency, radii=radii, snr_db=snr_db, seed=base_seed)
    mask = metrics.annulus_mask(reference, ev["r_min_m"], ev["r_max_m"])

    rows = []
    for method in methods:
        cfg = config
        if order_override is not None:
            cfg = json.loads(json.dumps(config))
            cfg["method"]["order"] = order_override
        result = _reconstruct_in_memory(cfg, projections, snr_db=snr_db, method=method)
        nmse = metrics.nmse_db(result.grid, reference, mask)
        rows.append({
            "kind": kind, "value": value, "method": method,
            "frequency_hz": projections.frequency, "snr_db": snr_db,
            "n_circles": scheme.n_circles,
            "order": result.diagnostics.get("order"),
            "nmse_db": nmse,
            "coefficients": result.coefficients if method == "che" else None,
        })
    return rows


def cmd_sweep(config, out_dir, seed=None):
    kind = config["sweep"]["kind"]
    points = _sweep_points(config)
    workers = _worker_count()
    results = [None] * len(points)
    fail = [None] * len(points)

    def run(i):
        try:
            results[i] = _run_sweep_point(config, kind, points[i], out_dir, seed)
        except HollowfieldError as exc:
            fail[i] = repr(exc)

    if workers == 1:
        for i in range(len(points)):
            run(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(len(points))))

    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return format(v, ".17g")
        return str(v)

    csv_path = os.path.join(out_dir, f"sweep_{kind}.csv")
    with open(csv_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(SWEEP_CSV_HEADER + "\n")
        for i, point in enumerate(points):
            if fail[i] is not None:
                fh.write(f"{kind},{cell(point)},FAILED,,,,,\n")
                continue
            for row in results[i]:
                fh.write(
                    f"{kind},{cell(point)},{row['method']},{cell(row['frequency_hz'])},"
                    f"{cell(row['snr_db'])},{cell(row['n_circles'])},"
                    f"{cell(row['order'])},{cell(row['nmse_db'])}\n")

    if kind == "order":
        for i, point in enumerate(points):
            if fail[i] is not None:
                continue
            coeffs = results[i][0]["coefficients"]
            n_idx = np.arange(-(len(coeffs) // 2), len(coeffs) // 2 + 1)
            spath = os.path.join(out_dir, f"spectrum_order_{int(point)}.csv")
            with open(spath, "w", encoding="ascii", newline="\n") as fh:
                fh.write("n,abs_a\n")
                for n, a in zip(n_idx, coeffs):
                    fh.write(f"{n},{format(abs(a), '.17g')}\n")

    failures = sum(1 for f in fail if f is not None)
    print(f"sweep '{kind}': {len(points)} points, {failures} failed -> {csv_path}")
    return EXIT_OK


def cmd_timedomain(config, out_dir, seed=None):
    td = config["timedomain"]
    scheme = _scheme(config)
    burst = BurstFieldSpec(
        sources=_sources_from_config(config),
        amplitude=config["field"]["amplitude_pa_m"],
        sound_speed=config["field"]["sound_speed_mps"],
        carrier_hz=td["carrier_hz"],
        burst_duration_s=td["burst_duration_ms"] / 1e3,
        sample_rate_hz=td["sample_rate_hz"],
        total_duration_s=td["record_samples"] / td["sample_rate_hz"],
        band_hz=tuple(td["band_hz"]),
    )
    npw = config["quadrature"]["nodes_per_wavelength"]
    data = timedomain.synthesize_burst_projections(burst, scheme, npw)
    movie = timedomain.reconstruct_time_domain(
        data, tuple(td["band_hz"]), order_rule=None,
        energy_gate_db=td["energy_gate_db"], nodes_per_wavelength=npw,
        **_grid_args(config))

    frame_indices = sorted({
        int(round(t_ms / 1e3 * movie.sample_rate)) for t_ms in td["frame_times_ms"]
    })
    frame_indices = [i for i in frame_indices if 0 <= i < movie.n_frames]
    movie_dir = os.path.join(out_dir, "movie")
    fileio.write_movie(movie_dir, movie, frame_indices)

    times, values, (ix, iy) = timedomain.probe_series(movie, tuple(td["probe_point_m"]))
    probe_path = os.path.join(out_dir, "probe.csv")
    with open(probe_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("time_s,pressure\n")
        for t, v in zip(times, values):
            fh.write(f"{format(t, '.17g')},{format(v, '.17g')}\n")
    print(f"wrote {len(frame_indices)} frames to {movie_dir} and probe pixel "
          f"({ix}, {iy}) series to {probe_path}")
    return EXIT_OK


def cmd_render(config, out_dir, seed=None):
    r = config["render"]
    grid_path = r["grid"] or config["inputs"].get("grid")
    if not grid_path:
        raise ConfigError("render.grid must point at a grid file")
    grid = fileio.read_field_grid(grid_path)
    out_name = r["output"] or (
        os.path.splitext(os.path.basename(grid_path))[0] + f"_{r['channel']}.pgm")
    out_path = os.path.join(out_dir, out_name)
    lo, hi = fileio.write_pgm(out_path, grid, r["channel"], r["range"])
    print(f"rendered {r['channel']} of {grid_path} to {out_path} (range {lo:g}..{hi:g})")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "timedomain": cmd_timedomain,
    "render": cmd_render,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hollowfield",
        description="Exterior sound-field tomography toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON configuration")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="noise seed override")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                user_config = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
        config = resolve_config(user_config)
        out_dir = args.out or config["output_dir"]
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "config.resolved.json"), "w",
                  encoding="ascii", newline="\n") as fh:
            fh.write(canonical_json(config))
        return COMMANDS[args.command](config, out_dir, seed=args.seed)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HollowfieldError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
