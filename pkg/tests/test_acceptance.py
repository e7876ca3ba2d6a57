"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its measured numbers (run with ``pytest -v -s`` to see
them inline).  Tolerances are pinned here, not configurable.

The one long-running criterion (the 6864-dimensional half-filled chain
sector) is marked ``heavy`` and deselected by default; run it explicitly with
``pytest -m heavy tests/test_acceptance.py``.
"""

import json
import os
import time
from dataclasses import replace
from functools import partial

import numpy as np
import pytest

from pointgap.fock import UP
from pointgap.models import (
    ChainParams,
    DotParams,
    build_chain_one_body,
    build_dot_many_body,
    build_dot_one_body,
    chain_model,
    dot_model,
    dot_sector_basis,
    one_body_sz,
)
from pointgap.observables import boundary_sensitivity, product_state_profiles
from pointgap.oracles import (
    chain_first_order_spectrum,
    diagonal_flow_winding,
    dot_sector21_eigenvalues,
    dot_sector2m1_eigenvalues,
    dot_sector_diagonal_flows,
    eigenvalue_match,
)
from pointgap.spectral import eigendecompose, sweep_deformation, sweep_theta
from pointgap.topology import many_body_winding, one_body_winding, spin_winding
from pointgap import checks as checks_mod

DOT = DotParams(lam=1.0, eps_a_up=0.2, eps_a_dn=-0.1, eps_b_up=0.35,
                eps_b_dn=-0.25)
CHAIN = ChainParams(length=7, t=1.0)
FIXTURE = os.path.join(os.path.dirname(__file__), "fixtures",
                       "skin_thresholds.json")


def _report(criterion, ok, detail, elapsed, budget):
    status = "PASS" if ok and elapsed < budget else "FAIL"
    print(f"[{status}] criterion {criterion}: {detail} "
          f"({elapsed:.2f}s / budget {budget:.0f}s)")
    assert ok, detail
    assert elapsed < budget, f"criterion {criterion} exceeded {budget}s budget"


def test_criterion_1_one_body_invariants():
    t0 = time.perf_counter()
    h_dot = partial(build_dot_one_body, DOT)
    w_dot = one_body_winding(h_dot, 0.0)
    ws_dot = spin_winding(h_dot, one_body_sz(DOT), 0.0)
    t_dot = time.perf_counter() - t0

    t1 = time.perf_counter()
    h_chain = partial(build_chain_one_body, CHAIN)
    w_chain = one_body_winding(h_chain, 0.0)
    ws_chain = spin_winding(h_chain, one_body_sz(CHAIN), 0.0)
    t_chain = time.perf_counter() - t1

    ok = ((w_dot.value, ws_dot.value) == (0, 1)
          and (w_chain.value, ws_chain.value) == (0, 1))
    detail = (f"dot (w, ws) = ({w_dot.value}, {ws_dot.value}), "
              f"chain (w, ws) = ({w_chain.value}, {ws_chain.value})")
    _report(1, ok and max(t_dot, t_chain) < 1.0, detail,
            max(t_dot, t_chain), 1.0)


def test_criterion_2_closed_form_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    thetas = np.linspace(0.0, 2.0 * np.pi, 65)
    draws = [replace(DOT, j=1.0, v=1.0)]
    for _ in range(20):
        lam = rng.uniform(0.5, 2.0)
        eps = rng.uniform(-0.9, 0.9, 4) * lam
        draws.append(DotParams(lam=lam, eps_a_up=eps[0], eps_a_dn=eps[1],
                               eps_b_up=eps[2], eps_b_dn=eps[3],
                               j=rng.uniform(-1.5, 1.5), v=rng.uniform(-1.5, 1.5)))
    b21, b2m1 = dot_sector_basis(2, 1), dot_sector_basis(2, -1)
    worst = 0.0
    for p in draws:
        for theta in thetas:
            ed2 = np.linalg.eigvals(build_dot_many_body(p, theta, b21).entries)
            worst = max(worst, eigenvalue_match(
                ed2, dot_sector21_eigenvalues(p, theta))[0])
            ed4 = np.linalg.eigvals(build_dot_many_body(p, theta, b2m1).entries)
            worst = max(worst, eigenvalue_match(
                ed4, dot_sector2m1_eigenvalues(p, theta))[0])
    elapsed = time.perf_counter() - t0
    _report(2, worst < 1e-10,
            f"max closed-form vs ED distance {worst:.2e} over 21 draws", elapsed, 5.0)


def test_criterion_3_many_body_trivialization():
    t0 = time.perf_counter()
    windings = {}
    for jv in (0.0, 1.0):
        p = replace(DOT, j=jv, v=jv)
        windings[(2, 1, jv)] = many_body_winding(p, (2, 1), 0.0, n_grid=128).value
        windings[(2, -1, jv)] = many_body_winding(p, (2, -1), 0.0, n_grid=128).value
    all_zero = all(v == 0 for v in windings.values())

    p_int = replace(DOT, j=1.0, v=1.0)
    flow = sweep_theta(dot_model(p_int, 2, 1), 256)
    line_gap = float(np.min(flow.spectra.imag.max(axis=1)
                            - flow.spectra.imag.min(axis=1)))
    gap_ok = line_gap >= p_int.v - 1e-10

    contrast_numeric = many_body_winding(DOT, (1, -1), 0.0, n_grid=128).value
    contrast_analytic = diagonal_flow_winding(
        dot_sector_diagonal_flows(DOT, dot_sector_basis(1, -1)), 0.0)
    contrast_ok = contrast_numeric == contrast_analytic == 1

    elapsed = time.perf_counter() - t0
    ok = all_zero and gap_ok and contrast_ok
    _report(3, ok,
            f"W(2,+1) = W(2,-1) = 0 at both couplings: {all_zero}; "
            f"line gap {line_gap:.6f} >= V; W(1,-1) = {contrast_numeric}",
            elapsed, 5.0)


def test_criterion_4_deformation_paths():
    t0 = time.perf_counter()
    results = {}
    for path in ("pair-ramp", "hop-ramp"):
        dflow = sweep_deformation(DOT, path, (2, 1), 32, 64, e_ref=0.0)
        windings = set()
        for s in dflow.path_values:
            from pointgap.spectral import deformation_params

            p = deformation_params(DOT, path, float(s))
            windings.add(many_body_winding(p, (2, 1), 0.0, n_grid=64).value)
        results[path] = (dflow.gap_margin, windings)
    elapsed = time.perf_counter() - t0
    ok = all(margin > 0 and windings == {0}
             for margin, windings in results.values())
    detail = "; ".join(
        f"{path}: min |E| = {margin:.4f}, windings {sorted(w)}"
        for path, (margin, w) in results.items())
    _report(4, ok, detail, elapsed, 30.0)


def test_criterion_5_skin_effect_fragility():
    t0 = time.perf_counter()
    with open(FIXTURE) as fh:
        frozen = json.load(fh)
    n_grid = frozen["n_grid"]

    obc = replace(CHAIN, bc="open")
    sol = eigendecompose(chain_model(obc, 3, -1).matrix(0.0))
    obc_zero = float(np.abs(sol.values).max())

    w = many_body_winding(CHAIN, (3, -1), 0.0, n_grid=n_grid)

    profiles = product_state_profiles(obc, (3, -1))
    fracs = [float((q.spin_weights(7, UP)[-2:] / q.spin_weights(7, UP).sum()).sum())
             for q in profiles if q.spin_weights(7, UP).sum() > 1e-9]

    bs0 = boundary_sensitivity(CHAIN, (3, -1), n_grid=n_grid)
    bs1 = boundary_sensitivity(replace(CHAIN, j=1.0, v=1.0), (3, -1), n_grid=n_grid)

    checks = {
        "obc max |E| < 1e-8": obc_zero < 1e-8,
        "gap margin > 0": w.gap_margin > 0,
        "W(3,-1) = 0": w.value == 0,
        "up weight on rightmost two >= 0.60": min(fracs) >= 0.60,
        "hausdorff drops below 0.2x": (
            bs1.hausdorff_obc_pbc < 0.2 * bs0.hausdorff_obc_pbc),
        "max-site occupation drops": (
            bs1.max_site_occupation < bs0.max_site_occupation),
        "matches frozen fixture": (
            abs(bs1.hausdorff_obc_pbc - frozen["interacting"]["hausdorff"]) < 1e-6
            and abs(bs1.max_site_occupation
                    - frozen["interacting"]["max_site_occupation"]) < 1e-6
            and abs(bs0.hausdorff_obc_pbc
                    - frozen["noninteracting"]["hausdorff"]) < 1e-6),
    }
    elapsed = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    _report(5, not failed,
            f"obc max |E| = {obc_zero:.1e}, margin = {w.gap_margin:.3f}, "
            f"min edge fraction = {min(fracs):.3f}, hausdorff "
            f"{bs0.hausdorff_obc_pbc:.4f} -> {bs1.hausdorff_obc_pbc:.4f}, "
            f"max site {bs0.max_site_occupation:.3f} -> "
            f"{bs1.max_site_occupation:.3f}"
            + (f"; FAILED: {failed}" if failed else ""),
            elapsed, 60.0)


def test_criterion_6_larger_sector_windings():
    t0 = time.perf_counter()
    values = {}
    for jv in (0.0, 1.0):
        p = replace(CHAIN, j=jv, v=jv)
        res = many_body_winding(p, (4, 1), 0.3j, n_grid=64)
        values[jv] = (res.value, res.gap_margin)
    elapsed = time.perf_counter() - t0
    ok = all(v == 0 and margin > 0 for v, margin in values.values())
    detail = ", ".join(f"J=V={jv}: W(4,+1) = {v} (margin {m:.4f})"
                       for jv, (v, m) in values.items())
    _report(6, ok, detail, elapsed, 120.0)


@pytest.mark.heavy
def test_criterion_6_heavy_half_filled_windings():
    """Half-filled chain sector (dim 6864); budget two hours, run explicitly
    with ``pytest -m heavy``."""
    t0 = time.perf_counter()
    values = {}
    for jv in (0.0, 1.0):
        p = replace(CHAIN, j=jv, v=jv)
        res = many_body_winding(p, (9, -1), -0.04, n_grid=64)
        values[jv] = (res.value, res.gap_margin)
    elapsed = time.perf_counter() - t0
    ok = all(v == 0 and margin > 0 for v, margin in values.values())
    detail = ", ".join(f"J=V={jv}: W(9,-1) = {v} (margin {m:.2e})"
                       for jv, (v, m) in values.items())
    _report("6-heavy", ok, detail, elapsed, 7200.0)


def test_criterion_7_perturbation_oracle():
    t0 = time.perf_counter()
    # the splitting formulas diagonalize the first-order block in the
    # exchange-imag bookkeeping, so the comparison runs in that convention;
    # the twist window stays clear of the isolated angles (pi, 2 pi) where
    # hopping modes from different quadruplets cross and the per-quadruplet
    # first-order treatment does not apply
    thetas = np.concatenate([[0.0], np.linspace(0.2, 2.6, 13)])
    errs = {}
    for scale, (j, v) in ((1.0, (0.02, 0.03)), (0.5, (0.01, 0.015))):
        p = ChainParams(length=7, t=1.0, j=j, v=v, gauge="distributed",
                        edge_convention="exchange-imag")
        model = chain_model(p, 3, -1)
        errs[scale] = max(
            eigenvalue_match(np.linalg.eigvals(model.matrix(th).entries),
                             chain_first_order_spectrum(p, th))[1]
            for th in thetas)
    ratio = errs[1.0] / errs[0.5]
    elapsed = time.perf_counter() - t0
    _report(7, 3.5 <= ratio <= 4.5,
            f"assignment distance {errs[1.0]:.3e} -> {errs[0.5]:.3e}, "
            f"halving ratio {ratio:.3f} (want 4 +- 0.5)", elapsed, 30.0)


def test_criterion_8_property_suites():
    t0 = time.perf_counter()
    results = checks_mod.run_all(verbose=False)
    elapsed = time.perf_counter() - t0
    failed = [r.name for r in results if not r.ok]
    for r in results:
        print(f"  [{'PASS' if r.ok else 'FAIL'}] {r.name}: {r.detail}")
    _report(8, not failed,
            f"{len(results)} property suites" + (f"; FAILED: {failed}" if failed else ""),
            elapsed, 60.0)
