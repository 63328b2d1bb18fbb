import numpy as np
import pytest

from photonmesh.numeric import (
    cmul,
    dense_apply,
    dense_matmul,
    hermitian_deviation,
    mat2_apply,
    require_finite,
)

BS = np.array([[1.0, 1.0j], [1.0j, 1.0]], dtype=np.complex128) / np.sqrt(2.0)


def matmul_triple_loop(a, b):
    """Independent oracle: textbook triple loop over scalars."""
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.complex128)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0.0 + 0.0j
            for k in range(a.shape[1]):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc
    return out


def apply_scalar_loop(m, x):
    out = np.zeros(m.shape[0], dtype=np.complex128)
    for i in range(m.shape[0]):
        acc = 0.0 + 0.0j
        for j in range(m.shape[1]):
            acc += m[i, j] * x[j]
        out[i] = acc
    return out


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_cmul():
    assert cmul(1j, 1j) == -1 + 0j
    x = 0.3 - 2.5j
    assert cmul(1 + 0j, x) == x
    assert cmul(1 + 1j, 1 - 1j) == 2 + 0j


def test_mat2_apply_identity():
    eye = np.eye(2, dtype=np.complex128)
    assert mat2_apply(eye, 0.3 + 1j, -2j) == (0.3 + 1j, -2j)


def test_mat2_apply_beam_splitter():
    y0, y1 = mat2_apply(BS, 1.0, 0.0)
    s = 1 / np.sqrt(2)
    assert abs(y0 - s) < 1e-15 and abs(y1 - 1j * s) < 1e-15
    # applying the splitter twice swaps the ports up to a factor j
    z0, z1 = mat2_apply(BS, y0, y1)
    assert abs(z0) < 1e-15 and abs(z1 - 1j) < 1e-15


def test_dense_matmul_identity_and_permutations():
    rng = np.random.default_rng(0)
    b = random_complex(rng, (3, 3))
    assert np.array_equal(dense_matmul(np.eye(3, dtype=complex), b), b)
    # composing a cyclic shift with its inverse gives the identity
    p1 = np.eye(3, dtype=complex)[[1, 2, 0]]
    p2 = np.eye(3, dtype=complex)[[2, 0, 1]]
    assert np.array_equal(dense_matmul(p1, p2), np.eye(3, dtype=complex))
    # composing the shift with itself permutes rows twice
    assert np.array_equal(dense_matmul(p1, p1), np.eye(3, dtype=complex)[[2, 0, 1]])


def test_dense_matmul_matches_triple_loop():
    rng = np.random.default_rng(1)
    a = random_complex(rng, (4, 4))
    b = random_complex(rng, (4, 4))
    assert np.max(np.abs(dense_matmul(a, b) - matmul_triple_loop(a, b))) <= 1e-14


def test_dense_matmul_dimension_mismatch():
    with pytest.raises(ValueError):
        dense_matmul(np.zeros((2, 3), dtype=complex), np.zeros((2, 2), dtype=complex))


def test_dense_apply():
    rng = np.random.default_rng(2)
    x = random_complex(rng, 5)
    assert np.array_equal(dense_apply(np.eye(5, dtype=complex), x), x)
    y = dense_apply(BS, np.array([1.0, 0.0], dtype=complex))
    assert np.allclose(y, [1 / np.sqrt(2), 1j / np.sqrt(2)], atol=1e-15)
    m = random_complex(rng, (8, 8))
    v = random_complex(rng, 8)
    assert np.max(np.abs(dense_apply(m, v) - apply_scalar_loop(m, v))) <= 1e-14
    with pytest.raises(ValueError):
        dense_apply(m, random_complex(rng, 7))


def test_hermitian_deviation():
    assert hermitian_deviation(np.eye(4, dtype=complex)) == 0.0
    assert hermitian_deviation(BS) <= 1e-15
    broken = BS.copy()
    broken[0, 0] *= 2.0
    # direct computation of max |B^H B - I| on the 2x2 case
    expected = np.max(np.abs(matmul_triple_loop(broken.conj().T, broken) - np.eye(2)))
    assert expected > 0.1
    assert abs(hermitian_deviation(broken) - expected) <= 1e-15
    with pytest.raises(ValueError):
        hermitian_deviation(np.zeros((2, 3), dtype=complex))


def test_mat2_agrees_with_dense_embedding():
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = random_complex(rng, (2, 2))
        x = random_complex(rng, 2)
        pair = mat2_apply(m, x[0], x[1])
        dense = dense_apply(m, x)
        assert max(abs(pair[0] - dense[0]), abs(pair[1] - dense[1])) <= 1e-15


def test_matmul_associativity():
    rng = np.random.default_rng(4)
    for _ in range(10):
        a, b, c = (random_complex(rng, (8, 8)) for _ in range(3))
        lhs = dense_matmul(dense_matmul(a, b), c)
        rhs = dense_matmul(a, dense_matmul(b, c))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_unitary_product_stays_unitary():
    # products of random unitary factors up to size 64 stay unitary to 1e-12
    rng = np.random.default_rng(5)
    for n in (2, 8, 64):
        u = np.eye(n, dtype=complex)
        for _ in range(6):
            q, _ = np.linalg.qr(random_complex(rng, (n, n)))
            u = dense_matmul(q, u)
        assert hermitian_deviation(u) <= 1e-12


def test_require_finite():
    require_finite(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        require_finite(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        require_finite(np.array([1.0 + 1j * np.inf]), "signal")
