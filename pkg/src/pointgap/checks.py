"""Self-contained invariant suite behind ``pointgap check``.

Each check returns (ok, detail) and is registered in CHECKS; the CLI prints
one pass/fail line per entry and the pytest suite asserts them individually.
Everything here is deterministic (fixed seeds, fixed grids).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from . import fock
from .models import (
    ChainParams,
    DotParams,
    build_chain_one_body,
    build_dot_many_body,
    build_dot_one_body,
    chain_model,
    chain_terms,
    dot_model,
    dot_terms,
    full_space_matrix,
)
from .oracles import eigenvalue_match
from .spectral import logdet_phase, periodicity_defect, sweep_theta
from .observables import occupation_profiles
from .topology import many_body_winding, one_body_winding

REFERENCE_DOT = DotParams(lam=1.0, eps_a_up=0.2, eps_a_dn=-0.1,
                          eps_b_up=0.35, eps_b_dn=-0.25)
REFERENCE_DOT_INT = replace(REFERENCE_DOT, j=1.0, v=1.0)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def check_anticommutation(n_modes: int = 8):
    """Exhaustive fermion algebra on all states and mode pairs."""
    for s in range(1 << n_modes):
        for i in range(n_modes):
            # {c_i, c†_i} = 1 on every state: exactly one order survives,
            # round-trips to the state, and carries total sign +1
            created = fock.apply_create(s, i)
            destroyed = fock.apply_annihilate(s, i)
            if (created is None) == (destroyed is None):
                return False, f"c/c† both (un)defined on state {s:#x} mode {i}"
            mid, sign = created if created is not None else destroyed
            inverse = fock.apply_annihilate if created is not None else fock.apply_create
            back, sign2 = inverse(mid, i)
            if back != s or sign * sign2 != 1:
                return False, f"c/c† identity broken on state {s:#x} mode {i}"
            for j in range(i + 1, n_modes):
                for op in (fock.apply_create, fock.apply_annihilate):
                    def compose(first, second):
                        r1 = op(s, first)
                        if r1 is None:
                            return None
                        r2 = op(r1[0], second)
                        if r2 is None:
                            return None
                        return r2[0], r1[1] * r2[1]
                    ij = compose(j, i)   # op_i op_j |s>, rightmost first
                    ji = compose(i, j)
                    if (ij is None) != (ji is None):
                        return False, f"asymmetric annihilation at s={s:#x} ({i},{j})"
                    if ij is not None and (ij[0] != ji[0] or ij[1] != -ji[1]):
                        return False, f"anticommutation broken at s={s:#x} ({i},{j})"
    return True, f"all pairs on {n_modes} modes"


def _block_defect(h: np.ndarray, layout) -> float:
    """Largest matrix element between states of different (N, P)."""
    states = np.arange(h.shape[0])
    n = np.array([int(s).bit_count() for s in states])
    p = np.array([layout.spin_parity(int(s)) for s in states])
    same = (n[:, None] == n[None, :]) & (p[:, None] == p[None, :])
    off = np.abs(h)[~same]
    return float(off.max(initial=0.0))


def check_block_structure():
    """Whole-space Hamiltonians never couple different (N, P) sectors."""
    lay, terms = dot_terms(replace(REFERENCE_DOT, j=0.7, v=0.9))
    defect = _block_defect(full_space_matrix(lay, terms, theta=0.83), lay)
    if defect > 0:
        return False, f"dot couples sectors by {defect:.2e}"
    p = ChainParams(length=3, t=1.0, j=0.8, v=0.6)
    lay, terms = chain_terms(p)
    h = full_space_matrix(lay, terms, theta=1.21, length=3)
    defect = _block_defect(h, lay)
    if defect > 0:
        return False, f"chain couples sectors by {defect:.2e}"
    # localized edge fermion numbers are conserved as well
    states = np.arange(h.shape[0])
    for c in fock.edge_b_constraints(lay, 3):
        occ = np.array([int(np.uint64(s) & np.uint64(c.mask)).bit_count()
                        for s in states])
        bad = np.abs(h)[occ[:, None] != occ[None, :]].max(initial=0.0)
        if bad > 0:
            return False, f"edge b occupation not conserved ({bad:.2e})"
    return True, "dot 16-state and chain L=3 1024-state spaces block-diagonal"


def check_gauge_equivalence(tol: float = 1e-10):
    """Boundary-link and distributed twists share their spectrum."""
    rng = np.random.default_rng(11)
    worst = 0.0
    for theta in rng.uniform(0.0, 2.0 * np.pi, 4):
        pb = ChainParams(length=7, t=1.0, j=0.9, v=0.7, gauge="boundary")
        pd = replace(pb, gauge="distributed")
        e1 = np.linalg.eigvals(build_chain_one_body(pb, theta))
        e2 = np.linalg.eigvals(build_chain_one_body(pd, theta))
        worst = max(worst, eigenvalue_match(e1, e2)[0])
        m1 = chain_model(pb, 3, -1).matrix(theta).entries
        m2 = chain_model(pd, 3, -1).matrix(theta).entries
        worst = max(worst, eigenvalue_match(np.linalg.eigvals(m1),
                                            np.linalg.eigvals(m2))[0])
    return worst < tol, f"max eigenvalue mismatch {worst:.2e} (tol {tol:g})"


def check_theta_periodicity(tol: float = 1e-8):
    """Every flow closes: spectra at theta = 0 and 2 pi agree as multisets."""
    flows = [
        sweep_theta(partial(build_dot_one_body, REFERENCE_DOT), 32, "dot one-body"),
        sweep_theta(dot_model(REFERENCE_DOT_INT, 2, 1), 32, "dot (2,1)"),
        sweep_theta(dot_model(REFERENCE_DOT_INT, 2, -1), 32, "dot (2,-1)"),
        sweep_theta(partial(build_chain_one_body, ChainParams(length=7)), 32,
                    "chain one-body"),
        sweep_theta(chain_model(ChainParams(length=7, j=1.0, v=1.0), 3, -1), 32,
                    "chain (3,-1)"),
        sweep_theta(chain_model(ChainParams(length=5, j=0.4, v=0.3,
                                            gauge="distributed"), 3, -1), 32,
                    "chain (3,-1) distributed"),
    ]
    worst, worst_label = 0.0, ""
    for flow in flows:
        d = periodicity_defect(flow)
        if d > worst:
            worst, worst_label = d, flow.path_label
    return worst < tol, f"max end-to-end defect {worst:.2e} in {worst_label!r}"


def check_winding_grid_stability():
    """Doubling the twist grid never changes a winding value."""
    cases = [
        (REFERENCE_DOT, (2, 1), 0.0),
        (REFERENCE_DOT_INT, (2, 1), 0.0),
        (REFERENCE_DOT, (1, -1), 0.0),
        (ChainParams(length=7, j=1.0, v=1.0), (3, -1), 0.0),
    ]
    for params, sector, ref in cases:
        w1 = many_body_winding(params, sector, ref, n_grid=64)
        w2 = many_body_winding(params, sector, ref, n_grid=128)
        if w1.value != w2.value:
            return False, f"{sector} at ref {ref}: {w1.value} -> {w2.value}"
    w1 = one_body_winding(partial(build_dot_one_body, REFERENCE_DOT), 0.0, n_grid=64)
    w2 = one_body_winding(partial(build_dot_one_body, REFERENCE_DOT), 0.0, n_grid=128)
    if w1.value != w2.value:
        return False, f"one-body: {w1.value} -> {w2.value}"
    return True, "windings stable under grid doubling"


def check_det_consistency(tol: float = 1e-8):
    """exp(logdet) equals the product of (E_n - ref) over the spectrum."""
    rng = np.random.default_rng(23)
    mats = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            for d in (5, 23, 57)]
    mats.append(build_dot_many_body(REFERENCE_DOT_INT, 0.77, (2, -1)).entries)
    mats.append(chain_model(ChainParams(length=7, j=1.0, v=1.0), 3, -1)
                .matrix(1.3).entries)
    worst = 0.0
    for a in mats:
        ref = 0.1 - 0.2j
        log_mag, phase = logdet_phase(a, ref)
        direct = np.prod(np.linalg.eigvals(a) - ref)
        rel = abs(np.exp(log_mag + 1j * phase) - direct) / abs(direct)
        worst = max(worst, rel)
    return worst < tol, f"max relative determinant error {worst:.2e}"


def check_occupation_sum_rules(tol: float = 1e-9):
    """Profiles stay in [0, 1] and a-orbital occupations sum to the conserved
    a-fermion number (an exact integer; N - 2 for every chain sector)."""
    cases = [
        ("dot (2,1)", dot_model(REFERENCE_DOT_INT, 2, 1), None),
        ("dot (2,-1)", dot_model(REFERENCE_DOT_INT, 2, -1), None),
        ("chain (3,-1) twisted", chain_model(
            ChainParams(length=7, j=1.0, v=1.0), 3, -1), 1),
        ("chain (4,1) open", chain_model(
            ChainParams(length=7, j=0.5, v=0.5, bc="open"), 4, 1), 2),
    ]
    for label, model, n_a in cases:
        profiles = occupation_profiles(model.matrix(0.9), model.basis)
        for prof in profiles:
            vals = np.array(list(prof.per_site.values()))
            if vals.min() < -tol or vals.max() > 1.0 + tol:
                return False, f"{label}: value outside [0,1] by {vals.max()-1:.2e}"
            a_total = sum(v for (j, orb, s), v in prof.per_site.items()
                          if orb == fock.ORBITAL_A)
            want = round(a_total) if n_a is None else n_a
            if abs(a_total - want) > tol:
                return False, f"{label}: sum rule off by {abs(a_total-want):.2e}"
    # noninteracting periodic states are site-uniform per spin
    model = chain_model(ChainParams(length=7, bc="periodic"), 3, -1)
    profiles = occupation_profiles(model.matrix(1.0), model.basis)
    worst = 0.0
    for prof in profiles:
        for spin in (fock.UP, fock.DOWN):
            w = prof.spin_weights(7, spin)
            worst = max(worst, float(np.abs(w - w.sum() / 7).max()))
    if worst > tol:
        return False, f"periodic profiles deviate from uniformity by {worst:.2e}"
    return True, "sum rules, bounds and periodic uniformity hold"


CHECKS = [
    ("fermionic anticommutation (8 modes, exhaustive)", check_anticommutation),
    ("sector block structure (dot, chain L=3)", check_block_structure),
    ("twisted-boundary gauge equivalence", check_gauge_equivalence),
    ("theta-periodicity of spectral flows", check_theta_periodicity),
    ("winding grid-doubling stability", check_winding_grid_stability),
    ("determinant / eigenvalue-product consistency", check_det_consistency),
    ("occupation sum rules", check_occupation_sum_rules),
]


def run_all(verbose: bool = True):
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failed check, not a crash of the suite
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, ok, detail))
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return results
