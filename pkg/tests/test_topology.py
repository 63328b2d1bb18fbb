import numpy as np
import pytest

from photonmesh.numeric import hermitian_deviation
from photonmesh.topology import (
    BYPASS,
    Cell,
    FldzhyanBlock,
    MeshTopology,
    MziBlock,
    PhaseStore,
    Window,
    block_matrix,
    build_clements,
    build_fldzhyan,
    build_mesh,
    format_topology,
    validate_topology,
)

BS = np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=np.complex128) / np.sqrt(2.0)


def layout(t):
    return [
        [(c.layer_index, c.block_index) if c.is_active else None for c in w.cells]
        for w in t.windows
    ]


def test_fldzhyan_4x4_window_table():
    t = build_fldzhyan(4, 4)
    assert layout(t) == [
        [(0, 0), (0, 1)],
        [None, (1, 0), None],
        [(2, 0), (2, 1)],
        [None, (3, 0), None],
    ]
    assert t.num_params == 6
    assert validate_topology(t) == []


def test_fldzhyan_minimal():
    t = build_fldzhyan(2, 1)
    assert layout(t) == [[(0, 0)]]
    assert t.num_params == 1


def test_fldzhyan_odd_ports():
    # even layers end with a bypass, odd layers begin with one
    t = build_fldzhyan(5, 2)
    assert layout(t) == [[(0, 0), (0, 1), None], [None, (1, 0), (1, 1)]]
    assert t.num_params == 4


def test_clements_layouts():
    t = build_clements(4, 4)
    assert layout(t) == [
        [(0, 0), (0, 1)],
        [None, (1, 0), None],
        [(2, 0), (2, 1)],
        [None, (3, 0), None],
    ]
    assert t.num_params == 12
    assert build_clements(2, 1).num_params == 2
    t3 = build_clements(3, 2)
    assert layout(t3) == [[(0, 0), None], [None, (1, 0)]]
    assert t3.num_params == 4


def test_builders_reject_tiny_meshes():
    with pytest.raises(ValueError):
        build_fldzhyan(1, 1)
    with pytest.raises(ValueError):
        build_clements(1, 1)
    with pytest.raises(ValueError):
        build_fldzhyan(4, 0)
    with pytest.raises(ValueError):
        build_mesh("reck", 4, 4)


def test_default_layer_count_is_square():
    assert build_fldzhyan(6).nl == 6
    assert build_clements(5).nl == 5


def test_block_matrix_fldzhyan():
    phases = PhaseStore([0.0, np.pi / 2])
    b0 = block_matrix(FldzhyanBlock(0), phases)
    assert np.allclose(b0, BS, atol=1e-15)
    b1 = block_matrix(FldzhyanBlock(1), phases)
    expected = np.array([[1j, 1j], [-1.0, 1.0]], dtype=complex) / np.sqrt(2.0)
    assert np.allclose(b1, expected, atol=1e-15)


def test_block_matrix_mzi_zero_phases():
    m = block_matrix(MziBlock(0, 1), PhaseStore([0.0, 0.0]))
    assert np.allclose(m, np.array([[0.0, 1j], [1j, 0.0]]), atol=1e-15)


def test_block_matrix_index_out_of_range():
    with pytest.raises(IndexError):
        block_matrix(FldzhyanBlock(3), PhaseStore([0.0]))


def test_block_matrices_are_unitary_for_random_phases():
    rng = np.random.default_rng(0)
    phases = PhaseStore(rng.uniform(0, 2 * np.pi, 200))
    for i in range(100):
        assert hermitian_deviation(block_matrix(FldzhyanBlock(i), phases)) <= 1e-15
        assert hermitian_deviation(block_matrix(MziBlock(i, i + 100), phases)) <= 1e-15


def test_parameter_counts_match_placement_formula():
    # blocks per layer: floor(ni/2) on even layers, floor((ni-1)/2) on odd ones
    for ni in range(2, 17):
        for nl in range(1, 17):
            expected = sum((ni - (i % 2)) // 2 for i in range(nl))
            tf = build_fldzhyan(ni, nl)
            tc = build_clements(ni, nl)
            assert tf.num_params == expected
            assert tc.num_params == 2 * expected
            for w in tf.windows + tc.windows:
                assert w.port_count == ni
            assert validate_topology(tf) == []
            assert validate_topology(tc) == []


def test_validate_topology_flags_defects():
    bad_window = MeshTopology(
        kind="fldzhyan",
        ni=4,
        nl=1,
        windows=(Window((Cell(FldzhyanBlock(0), 0, 0), BYPASS)),),  # covers 3 of 4 ports
        num_params=1,
    )
    problems = validate_topology(bad_window)
    assert len(problems) == 1 and "ports" in problems[0]

    dup = MeshTopology(
        kind="fldzhyan",
        ni=4,
        nl=1,
        windows=(Window((Cell(FldzhyanBlock(0), 0, 0), Cell(FldzhyanBlock(0), 0, 1)),),),
        num_params=2,
    )
    problems = validate_topology(dup)
    assert any("used by both" in p for p in problems)
    assert any("never referenced" in p for p in problems)


def test_format_topology():
    assert format_topology(build_fldzhyan(4, 4)) == (
        "mesh fldzhyan ni=4 nl=4\n"
        "B(0,0) B(0,1)\n"
        "- B(1,0) -\n"
        "B(2,0) B(2,1)\n"
        "- B(3,0) -"
    )


def test_phase_store_validation():
    with pytest.raises(ValueError):
        PhaseStore([0.0, np.nan])
    with pytest.raises(ValueError):
        PhaseStore([[0.0, 1.0]])
    s = PhaseStore([0.1, 0.2])
    assert len(s) == 2
    c = s.copy()
    c.values[0] = 9.0
    assert s.values[0] == 0.1
