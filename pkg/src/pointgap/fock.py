"""Occupation-number basis with exact fermionic sign bookkeeping.

States are plain integers whose bit ``m`` holds the occupation of
single-particle mode ``m``.  The frozen sign convention counts occupied modes
*strictly below* the acted index, so creating into mode ``m`` on state ``s``
carries ``(-1)**popcount(s & ((1 << m) - 1))``.

Mode layouts
------------
* dot (one site, two orbitals): modes ``(a_up, a_dn, b_up, b_dn) = (0, 1, 2, 3)``.
* chain of ``L`` sites: itinerant a-orbital modes interleaved as
  ``(j, a, up) = 2j`` and ``(j, a, dn) = 2j + 1``; the four localized
  b-orbital modes appended afterwards, ``(0, b, up) = 2L``, ``(0, b, dn) = 2L+1``,
  ``(L-1, b, up) = 2L+2``, ``(L-1, b, dn) = 2L+3``.

Symmetry sectors are labeled by total fermion number ``N`` and spin parity
``P = (-1)**N_up``; enumeration order is ascending bitset value so every
downstream matrix is reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import scan_states

MAX_MODES = 64

UP, DOWN = "up", "dn"
ORBITAL_A, ORBITAL_B = "a", "b"


def sign_below(state: int, mode: int) -> int:
    """(-1)**(number of occupied modes with index < mode)."""
    return -1 if ((state & ((1 << mode) - 1)).bit_count() & 1) else 1


def apply_create(state: int, mode: int):
    """Apply c†_mode; returns (new_state, sign) or None if Pauli-blocked."""
    if (state >> mode) & 1:
        return None
    return state | (1 << mode), sign_below(state, mode)


def apply_annihilate(state: int, mode: int):
    """Apply c_mode; returns (new_state, sign) or None if the mode is empty."""
    if not (state >> mode) & 1:
        return None
    return state & ~(1 << mode), sign_below(state, mode)


@dataclass(frozen=True)
class ModeLayout:
    """Static description of the single-particle modes of a model."""

    n_modes: int
    up_mask: int
    a_mask: int
    labels: tuple  # per-mode (site, orbital, spin)
    index: dict = field(repr=False, hash=False, compare=False, default=None)

    def __post_init__(self):
        if self.n_modes > MAX_MODES:
            raise ValueError(f"layouts above {MAX_MODES} modes are not supported")
        object.__setattr__(
            self, "index", {lbl: m for m, lbl in enumerate(self.labels)}
        )

    def mode(self, site: int, orbital: str, spin: str) -> int:
        return self.index[(site, orbital, spin)]

    def fermion_number(self, state: int) -> int:
        return state.bit_count()

    def spin_parity(self, state: int) -> int:
        return -1 if ((state & self.up_mask).bit_count() & 1) else 1

    def a_modes(self) -> np.ndarray:
        return np.array([m for m in range(self.n_modes) if (self.a_mask >> m) & 1])

    def sz_signs(self, modes=None) -> np.ndarray:
        """Diagonal of s^z restricted to the given modes (+1 up, -1 down)."""
        if modes is None:
            modes = range(self.n_modes)
        return np.array([1 if (self.up_mask >> m) & 1 else -1 for m in modes])


def dot_layout() -> ModeLayout:
    labels = ((0, ORBITAL_A, UP), (0, ORBITAL_A, DOWN),
              (0, ORBITAL_B, UP), (0, ORBITAL_B, DOWN))
    return ModeLayout(n_modes=4, up_mask=0b0101, a_mask=0b0011, labels=labels)


def chain_layout(length: int) -> ModeLayout:
    if length < 2:
        raise ValueError("chain needs at least 2 sites")
    labels = []
    for j in range(length):
        labels.append((j, ORBITAL_A, UP))
        labels.append((j, ORBITAL_A, DOWN))
    labels += [(0, ORBITAL_B, UP), (0, ORBITAL_B, DOWN),
               (length - 1, ORBITAL_B, UP), (length - 1, ORBITAL_B, DOWN)]
    n = 2 * length + 4
    up_mask = sum(1 << m for m, lbl in enumerate(labels) if lbl[2] == UP)
    a_mask = (1 << (2 * length)) - 1
    return ModeLayout(n_modes=n, up_mask=up_mask, a_mask=a_mask, labels=tuple(labels))


@dataclass(frozen=True)
class Constraint:
    """popcount(state & mask) == count, enforced at enumeration time."""

    mask: int
    count: int


def edge_b_constraints(layout: ModeLayout, length: int):
    """One fermion on each edge b site (their occupation is conserved)."""
    b0 = (1 << layout.mode(0, ORBITAL_B, UP)) | (1 << layout.mode(0, ORBITAL_B, DOWN))
    bL = (1 << layout.mode(length - 1, ORBITAL_B, UP)) | (
        1 << layout.mode(length - 1, ORBITAL_B, DOWN))
    return (Constraint(b0, 1), Constraint(bL, 1))


class SectorBasis:
    """Ordered basis of all Fock states with fixed (N, P) quantum numbers."""

    def __init__(self, layout: ModeLayout, n: int, parity: int, states, constraints=()):
        self.layout = layout
        self.n = n
        self.parity = parity
        self.states = np.asarray(states, dtype=np.uint64)
        self.constraints = tuple(constraints)
        self._pos = {int(s): i for i, s in enumerate(self.states)}

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def sector(self):
        return (self.n, self.parity)

    def index_of(self, state: int) -> int:
        return self._pos[int(state)]

    def __contains__(self, state: int) -> bool:
        return int(state) in self._pos

    def __repr__(self):
        return f"SectorBasis(N={self.n}, P={self.parity:+d}, dim={self.dim})"


def enumerate_sector(layout: ModeLayout, n: int, parity: int, constraints=()) -> SectorBasis:
    """All states with the exact (N, P) satisfying the constraints, ascending."""
    if not 0 <= n <= layout.n_modes:
        raise ValueError(f"fermion number {n} outside [0, {layout.n_modes}]")
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    constraints = tuple(constraints)
    cmasks = np.array([c.mask for c in constraints], dtype=np.uint64)
    ccounts = np.array([c.count for c in constraints], dtype=np.int64)
    states = scan_states(layout.n_modes, n, parity, layout.up_mask, cmasks, ccounts)
    return SectorBasis(layout, n, parity, states, constraints)


def full_basis_states(layout: ModeLayout) -> np.ndarray:
    """Every Fock state of the layout (used by whole-space block tests)."""
    return np.arange(1 << layout.n_modes, dtype=np.uint64)


def apply_ops(state: int, ops):
    """Apply a product of elementary operators, rightmost first.

    ``ops`` is a sequence of (mode, is_creation) read left to right in operator
    order, e.g. c†_i c_j is ((i, True), (j, False)).  Returns (state, sign) or
    None when any factor annihilates the amplitude.
    """
    sign = 1
    for mode, create in reversed(ops):
        res = apply_create(state, mode) if create else apply_annihilate(state, mode)
        if res is None:
            return None
        state, s = res
        sign *= s
    return state, sign


def spin_flip_ops(layout: ModeLayout, site: int, orbital: str, raise_spin: bool):
    """Elementary-operator factorization of S^+ (or S^-) at one site/orbital."""
    m_up = layout.mode(site, orbital, UP)
    m_dn = layout.mode(site, orbital, DOWN)
    if raise_spin:  # S+ = c†_up c_dn
        return ((m_up, True), (m_dn, False))
    return ((m_dn, True), (m_up, False))  # S- = c†_dn c_up


def operator_matrix(basis: SectorBasis, ops, states=None) -> np.ndarray:
    """Dense matrix of one operator product on a sector basis.

    When ``states`` is given, build on that explicit state list instead (used
    for full-space symmetry tests); target states outside the list are an
    error there, while for a proper sector they cannot occur for
    symmetry-preserving operators.
    """
    src = basis.states if states is None else np.asarray(states, dtype=np.uint64)
    pos = (
        basis._pos
        if states is None
        else {int(s): i for i, s in enumerate(src)}
    )
    mat = np.zeros((len(src), len(src)), dtype=complex)
    for col, s in enumerate(src):
        res = apply_ops(int(s), ops)
        if res is None:
            continue
        out, sign = res
        row = pos.get(out)
        if row is None:
            raise KeyError(f"operator maps state {s:#x} outside the basis")
        mat[row, col] += sign
    return mat


def spin_flip_matrix(basis: SectorBasis, site: int, orbital: str, raise_spin: bool,
                     target: SectorBasis | None = None) -> np.ndarray:
    """S^+_{site,orbital} (raise_spin) or S^-_{site,orbital} from one sector.

    A single spin flip reverses the spin parity, so rows live in the sector
    (N, -P); that target basis is enumerated implicitly unless passed in.
    """
    ops = spin_flip_ops(basis.layout, site, orbital, raise_spin)
    if target is None:
        target = enumerate_sector(basis.layout, basis.n, -basis.parity,
                                  basis.constraints)
    mat = np.zeros((target.dim, basis.dim), dtype=complex)
    for col, s in enumerate(basis.states):
        res = apply_ops(int(s), ops)
        if res is None:
            continue
        out, sign = res
        mat[target.index_of(out), col] += sign
    return mat
