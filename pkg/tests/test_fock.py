import numpy as np
import pytest

from pointgap.fock import (
    Constraint,
    apply_annihilate,
    apply_create,
    apply_ops,
    chain_layout,
    dot_layout,
    edge_b_constraints,
    enumerate_sector,
    full_basis_states,
    spin_flip_matrix,
    spin_flip_ops,
)


def test_create_on_vacuum():
    assert apply_create(0, 0) == (1, 1)


def test_create_anticommutes():
    a = apply_ops(0, ((0, True), (1, True)))   # c†_0 c†_1 |0>
    b = apply_ops(0, ((1, True), (0, True)))   # c†_1 c†_0 |0>
    assert a[0] == b[0] == 0b11
    assert a[1] == -b[1]


def test_pauli_exclusion():
    assert apply_create(0b1, 0) is None
    assert apply_annihilate(0, 0) is None


def test_annihilate_vacuum_and_sign():
    assert apply_annihilate(0b1, 0) == (0, 1)
    # one occupied mode below index 1 flips the sign
    assert apply_annihilate(0b11, 1) == (0b01, -1)


def test_dot_layout_mode_order():
    lay = dot_layout()
    assert [lay.mode(0, "a", "up"), lay.mode(0, "a", "dn"),
            lay.mode(0, "b", "up"), lay.mode(0, "b", "dn")] == [0, 1, 2, 3]


def test_chain_layout_mode_order():
    lay = chain_layout(7)
    assert lay.n_modes == 18
    assert lay.mode(3, "a", "up") == 6
    assert lay.mode(3, "a", "dn") == 7
    assert lay.mode(0, "b", "up") == 14
    assert lay.mode(0, "b", "dn") == 15
    assert lay.mode(6, "b", "up") == 16
    assert lay.mode(6, "b", "dn") == 17


def test_layout_width_limit():
    with pytest.raises(ValueError):
        chain_layout(31)  # 66 modes


def test_dot_sector_dimensions():
    lay = dot_layout()
    assert enumerate_sector(lay, 2, 1).dim == 2
    assert enumerate_sector(lay, 2, -1).dim == 4
    # the parity +1 two-fermion basis is (a_up b_up, a_dn b_dn)
    assert [int(s) for s in enumerate_sector(lay, 2, 1).states] == [0b0101, 0b1010]


def test_chain_sector_dimension_28():
    lay = chain_layout(7)
    basis = enumerate_sector(lay, 3, -1, edge_b_constraints(lay, 7))
    assert basis.dim == 28
    # brute-force recount over every bitset
    count = 0
    for s in range(1 << lay.n_modes):
        if int(s).bit_count() != 3:
            continue
        if lay.spin_parity(s) != -1:
            continue
        if any(int(np.uint64(s) & np.uint64(c.mask)).bit_count() != c.count
               for c in edge_b_constraints(lay, 7)):
            continue
        count += 1
    assert count == 28


def test_sector_completeness():
    lay = chain_layout(2)  # 8 modes
    total = sum(enumerate_sector(lay, n, p).dim
                for n in range(lay.n_modes + 1) for p in (1, -1))
    assert total == 1 << lay.n_modes


def test_parity_from_quantum_numbers():
    lay = chain_layout(3)
    for s in map(int, full_basis_states(lay)[:256]):
        n_up = int(np.uint64(s) & np.uint64(lay.up_mask)).bit_count()
        assert lay.spin_parity(s) == (-1) ** n_up


def test_ordering_is_ascending():
    lay = chain_layout(4)
    basis = enumerate_sector(lay, 3, -1)
    assert np.all(np.diff(basis.states.astype(np.int64)) > 0)


def test_empty_sector_is_valid():
    lay = dot_layout()
    basis = enumerate_sector(lay, 0, -1)
    assert basis.dim == 0


def test_constraint_filtering():
    lay = dot_layout()
    basis = enumerate_sector(lay, 2, -1, (Constraint(0b1100, 1),))
    # exactly one fermion in the b orbital
    assert all(int(np.uint64(s) & np.uint64(0b1100)).bit_count() == 1
               for s in basis.states)
    assert basis.dim == 2


def test_spin_flip_action():
    lay = dot_layout()
    ops = spin_flip_ops(lay, 0, "a", raise_spin=True)
    # S+ on an a-down fermion raises it
    assert apply_ops(0b10, ops) == (0b01, 1)
    # S+ on an empty a orbital annihilates
    assert apply_ops(0b100, ops) is None
    # (S+)^2 = 0
    out = apply_ops(0b10, ops)
    assert apply_ops(out[0], ops) is None


def test_spin_flip_matrix_maps_between_parity_sectors():
    lay = dot_layout()
    src = enumerate_sector(lay, 2, -1)
    dst = enumerate_sector(lay, 2, 1)
    m = spin_flip_matrix(src, 0, "a", raise_spin=True, target=dst)
    assert m.shape == (dst.dim, src.dim)
    # a_dn b_up --S+_a--> a_up b_up
    col = src.index_of(0b0110)
    row = dst.index_of(0b0101)
    assert m[row, col] == 1
    # applying the same flip twice annihilates every state
    back = spin_flip_matrix(dst, 0, "a", raise_spin=True, target=src)
    assert np.all(back @ m == 0)
