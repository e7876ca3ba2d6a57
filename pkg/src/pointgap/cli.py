"""Reproducible experiment runner.

Subcommands:

* ``pointgap run <config.json>`` - execute one experiment, write CSV/JSON
  artifacts plus a content-hashed run manifest into the output directory.
* ``pointgap presets`` - list the bundled per-panel presets
  (``--write DIR`` materializes them as config files).
* ``pointgap check`` - run the invariant/oracle property suite.

Exit codes: 0 success, 2 configuration or validation error, 3 computation
error (a closed gap, an unresolved winding, solver failure); stderr carries
the structured context.  Identical configs reproduce byte-identical data
files: eigenvalues are emitted in sorted order, eigenvector phases are fixed,
and floats are written as shortest round-trip decimals.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import replace
from functools import partial

import numpy as np

from . import __version__
from .models import (
    DotParams,
    build_chain_one_body,
    build_dot_one_body,
    chain_model,
    chain_sector_basis,
    dot_model,
    dot_sector_basis,
    one_body_sz,
)
from .observables import boundary_sensitivity, product_state_profiles
from .presets import PRESETS, HEAVY_DIM, ConfigError, ExperimentConfig, config_from_dict
from .spectral import (
    SpectralError,
    SpectralFlow,
    deformation_params,
    sweep_deformation,
    sweep_theta,
    theta_grid,
)
from .topology import many_body_winding, one_body_winding, spin_winding
from . import checks as checks_mod
from .oracles import (
    chain_first_order_spectrum,
    dot_sector21_eigenvalues,
    dot_sector2m1_eigenvalues,
    eigenvalue_match,
)


def _fmt(x) -> str:
    """Shortest round-trip decimal of a float."""
    return repr(float(x))


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_flow_csv(path, flow):
    rows = []
    for theta, spectrum in zip(flow.grid, flow.spectra):
        for k, e in enumerate(spectrum):
            rows.append((_fmt(theta), str(k), _fmt(e.real), _fmt(e.imag)))
    _write_rows(path, ("theta", "eig_index", "re_e", "im_e"), rows)


def write_deform_csv(path, dflow):
    rows = []
    for s, flow in zip(dflow.path_values, dflow.flows):
        for theta, spectrum in zip(flow.grid, flow.spectra):
            for k, e in enumerate(spectrum):
                rows.append((_fmt(s), _fmt(theta), str(k), _fmt(e.real), _fmt(e.imag)))
    _write_rows(path, ("path_param", "theta", "eig_index", "re_e", "im_e"), rows)


def write_spectrum_csv(path, values):
    rows = [(str(k), _fmt(e.real), _fmt(e.imag)) for k, e in enumerate(values)]
    _write_rows(path, ("eig_index", "re_e", "im_e"), rows)


def write_occupations_csv(path, profiles):
    rows = []
    for prof in profiles:
        for (site, orbital, spin), value in sorted(prof.per_site.items()):
            rows.append((str(prof.eigenstate_index), _fmt(prof.eigenvalue.real),
                         _fmt(prof.eigenvalue.imag), str(site), orbital, spin,
                         _fmt(value)))
    _write_rows(path, ("state_index", "re_e", "im_e", "site", "orbital",
                       "spin", "value"), rows)


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _winding_payload(result, sector, e_ref):
    return {
        "sector": list(sector) if sector is not None else None,
        "e_ref": [e_ref.real, e_ref.imag],
        "winding": result.value,
        "raw_phase_change": result.raw_phase_change,
        "gap_margin": result.gap_margin,
        "grid_size_used": result.grid_size_used,
    }


def _sector_model(cfg: ExperimentConfig):
    if cfg.model == "dot":
        return dot_model(cfg.params, *cfg.sector)
    return chain_model(cfg.params, *cfg.sector)


def _one_body_fn(cfg: ExperimentConfig):
    builder = build_dot_one_body if cfg.model == "dot" else build_chain_one_body
    return partial(builder, cfg.params)


# ---------------------------------------------------------------------------
# task runners: each returns (summary dict, [artifact names])
# ---------------------------------------------------------------------------

def run_flow(cfg, outdir):
    if cfg.sector is None:
        flow = sweep_theta(_one_body_fn(cfg), cfg.n_grid, "one-body flow")
    else:
        flow = sweep_theta(_sector_model(cfg), cfg.n_grid,
                           f"sector {cfg.sector} flow")
    write_flow_csv(os.path.join(outdir, "flow.csv"), flow)
    return {"dim": flow.dim, "n_theta": len(flow.grid)}, ["flow.csv"]


def run_winding(cfg, outdir):
    if cfg.sector is None:
        h = _one_body_fn(cfg)
        w = one_body_winding(h, cfg.e_ref, cfg.n_grid)
        ws = spin_winding(h, one_body_sz(cfg.params), cfg.e_ref, cfg.n_grid)
        payload = _winding_payload(w, None, cfg.e_ref)
        payload["spin_winding"] = [ws.value.numerator, ws.value.denominator]
    else:
        w = many_body_winding(cfg.params, cfg.sector, cfg.e_ref, cfg.n_grid)
        payload = _winding_payload(w, cfg.sector, cfg.e_ref)
    _write_json(os.path.join(outdir, "winding.json"), payload)
    summary = {k: payload[k] for k in ("winding", "gap_margin", "grid_size_used")}
    if "spin_winding" in payload:
        summary["spin_winding"] = payload["spin_winding"]
    return summary, ["winding.json"]


def run_skin(cfg, outdir):
    bs = boundary_sensitivity(cfg.params, cfg.sector, cfg.n_grid)
    flow = SpectralFlow(theta_grid(cfg.n_grid), bs.flow_spectra, "twisted flow")
    write_flow_csv(os.path.join(outdir, "flow.csv"), flow)
    write_spectrum_csv(os.path.join(outdir, "obc_spectrum.csv"), bs.obc_spectrum)

    obc = replace(cfg.params, bc="open")
    write_occupations_csv(os.path.join(outdir, "occupations.csv"), bs.obc_profiles)
    artifacts = ["flow.csv", "obc_spectrum.csv", "occupations.csv",
                 "sensitivity.json", "winding.json"]
    if cfg.params.j == 0.0 and cfg.params.v == 0.0:
        pprofiles = product_state_profiles(obc, cfg.sector)
        write_occupations_csv(os.path.join(outdir, "product_occupations.csv"),
                              pprofiles)
        artifacts.append("product_occupations.csv")

    w = many_body_winding(cfg.params, cfg.sector, cfg.e_ref, cfg.n_grid)
    _write_json(os.path.join(outdir, "winding.json"),
                _winding_payload(w, cfg.sector, cfg.e_ref))
    sens = {
        "hausdorff_obc_pbc": bs.hausdorff_obc_pbc,
        "edge_weight": bs.edge_weight,
        "max_site_occupation": bs.max_site_occupation,
    }
    _write_json(os.path.join(outdir, "sensitivity.json"), sens)
    summary = dict(sens)
    summary["winding"] = w.value
    summary["gap_margin"] = w.gap_margin
    return summary, artifacts


def run_deform(cfg, outdir):
    dflow = sweep_deformation(cfg.params, cfg.path, cfg.sector, cfg.n_path,
                              cfg.n_grid, cfg.e_ref)
    write_deform_csv(os.path.join(outdir, "deform.csv"), dflow)
    points = []
    for s in dflow.path_values:
        p = deformation_params(cfg.params, cfg.path, float(s))
        w = many_body_winding(p, cfg.sector, cfg.e_ref, cfg.n_grid)
        points.append({"s": float(s), "winding": w.value,
                       "gap_margin": w.gap_margin})
    payload = {
        "path": cfg.path,
        "sector": list(cfg.sector),
        "e_ref": [cfg.e_ref.real, cfg.e_ref.imag],
        "gap_margin": dflow.gap_margin,
        "points": points,
    }
    _write_json(os.path.join(outdir, "windings.json"), payload)
    values = {pt["winding"] for pt in points}
    return {"gap_margin": dflow.gap_margin, "windings": sorted(values),
            "winding_constant": len(values) == 1}, ["deform.csv", "windings.json"]


def run_oracle_check(cfg, outdir):
    report = {}
    if cfg.model == "dot":
        rng = np.random.default_rng(2024)
        draws = [cfg.params]
        for _ in range(20):
            lam = rng.uniform(0.5, 2.0)
            eps = rng.uniform(-0.9, 0.9, 4) * lam
            draws.append(DotParams(lam=lam, eps_a_up=eps[0], eps_a_dn=eps[1],
                                   eps_b_up=eps[2], eps_b_dn=eps[3],
                                   j=rng.uniform(-1.5, 1.5),
                                   v=rng.uniform(-1.5, 1.5)))
        worst = 0.0
        for p in draws:
            for theta in np.linspace(0.0, 2.0 * np.pi, 65):
                for sector, formula in (((2, 1), dot_sector21_eigenvalues),
                                        ((2, -1), dot_sector2m1_eigenvalues)):
                    model = dot_model(p, *sector)
                    ed = np.linalg.eigvals(model.matrix(theta).entries)
                    mx, _ = eigenvalue_match(ed, formula(p, theta))
                    worst = max(worst, mx)
        report["dot_max_eigenvalue_distance"] = worst
        report["dot_ok"] = bool(worst < 1e-10)
    else:
        thetas = np.concatenate([[0.0], np.linspace(0.2, 2.6, 13)])
        errs = {}
        for scale in (1.0, 0.5):
            p = replace(cfg.params, j=cfg.params.j * scale, v=cfg.params.v * scale)
            model = chain_model(p, *cfg.sector)
            errs[scale] = max(
                eigenvalue_match(np.linalg.eigvals(model.matrix(th).entries),
                                 chain_first_order_spectrum(p, th))[1]
                for th in thetas)
        ratio = errs[1.0] / errs[0.5] if errs[0.5] > 0 else float("inf")
        report["splitting_error"] = errs[1.0]
        report["splitting_error_halved"] = errs[0.5]
        report["error_ratio_under_halving"] = ratio
        report["second_order_scaling_ok"] = bool(abs(ratio - 4.0) <= 0.5)
    _write_json(os.path.join(outdir, "oracle.json"), report)
    return report, ["oracle.json"]


TASK_RUNNERS = {
    "flow": run_flow,
    "winding": run_winding,
    "skin": run_skin,
    "deform": run_deform,
    "oracle-check": run_oracle_check,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _sector_dim(cfg: ExperimentConfig) -> int:
    if cfg.sector is None:
        return 0
    if cfg.model == "dot":
        return dot_sector_basis(*cfg.sector).dim
    return chain_sector_basis(cfg.params, *cfg.sector).dim


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def execute(cfg: ExperimentConfig, outdir: str, allow_heavy: bool = False) -> dict:
    """Run one validated config; returns the manifest dict."""
    dim = _sector_dim(cfg)
    if dim > HEAVY_DIM and not allow_heavy:
        raise ConfigError(
            f"sector dimension {dim} exceeds {HEAVY_DIM}; rerun with --allow-heavy")
    os.makedirs(outdir, exist_ok=True)
    lock_path = os.path.join(outdir, ".pointgap.lock")
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise ConfigError(
            f"output directory {outdir!r} is locked by another run "
            f"({lock_path} exists)") from None
    os.write(fd, str(os.getpid()).encode())
    os.close(fd)
    try:
        start = time.perf_counter()
        summary, artifacts = TASK_RUNNERS[cfg.task](cfg, outdir)
        wall = time.perf_counter() - start
        manifest = {
            "config": cfg.to_dict(),
            "tool_version": __version__,
            "wall_time_s": wall,
            "summary": summary,
            "outputs": [{"path": name, "sha256": _sha256(os.path.join(outdir, name))}
                        for name in artifacts],
        }
        tmp = os.path.join(outdir, ".run_manifest.tmp")
        with open(tmp, "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, os.path.join(outdir, "run_manifest.json"))
        return manifest
    finally:
        os.unlink(lock_path)


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = config_from_dict(raw)
        outdir = args.output_dir or cfg.output_dir or "."
        manifest = execute(cfg, outdir, allow_heavy=args.allow_heavy)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpectralError as exc:
        context = {"task": raw.get("task"), "sector": raw.get("sector"),
                   "error": type(exc).__name__, "message": str(exc)}
        theta = getattr(exc, "theta", None)
        if theta is not None:
            context["theta"] = theta
        print(f"computation error: {json.dumps(context, sort_keys=True)}",
              file=sys.stderr)
        return 3
    for key, value in sorted(manifest["summary"].items()):
        print(f"{key}: {value}")
    print(f"outputs written to {outdir} "
          f"({', '.join(o['path'] for o in manifest['outputs'])})")
    return 0


def _cmd_presets(args) -> int:
    for name, entry in PRESETS.items():
        cfg = entry["config"]
        sector = cfg.get("sector")
        sector_txt = f"({sector[0]},{sector[1]:+d})" if sector else "one-body"
        print(f"{name:9s} {cfg['model']:5s} {cfg['task']:12s} {sector_txt:9s} "
              f"{entry['description']}")
    if args.write:
        os.makedirs(args.write, exist_ok=True)
        for name, entry in PRESETS.items():
            _write_json(os.path.join(args.write, f"{name}.json"), entry["config"])
        print(f"wrote {len(PRESETS)} preset files to {args.write}")
    return 0


def _cmd_check(args) -> int:
    results = checks_mod.run_all(verbose=True)
    return 0 if all(r.ok for r in results) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pointgap",
        description="winding numbers and skin-effect diagnostics for "
                    "interacting non-Hermitian fermion models")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment config")
    p_run.add_argument("config", help="path to a JSON config file")
    p_run.add_argument("--output-dir", help="override the config's output_dir")
    p_run.add_argument("--allow-heavy", action="store_true",
                       help=f"permit sectors with dimension above {HEAVY_DIM}")
    p_run.set_defaults(fn=_cmd_run)

    p_presets = sub.add_parser("presets", help="list bundled experiment presets")
    p_presets.add_argument("--write", metavar="DIR",
                           help="also write each preset as DIR/<name>.json")
    p_presets.set_defaults(fn=_cmd_presets)

    p_check = sub.add_parser("check", help="run the oracle/invariant suite")
    p_check.set_defaults(fn=_cmd_check)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
