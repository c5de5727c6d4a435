import os
import subprocess
import sys

import numpy as np

from weakkac import kernels


def _random_tensor(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_multiply_matches_numpy_reference():
    rng = np.random.default_rng(11)
    m = _random_tensor(rng, (5, 5, 5))
    x = _random_tensor(rng, (5,))
    y = _random_tensor(rng, (5,))
    got = kernels.multiply(m, x, y)
    want = kernels._multiply_np(m, x, y)
    assert np.abs(got - want).max() < 1e-12
    direct = np.einsum("i,j,ijk->k", x, y, m)
    assert np.abs(got - direct).max() < 1e-12


def test_product_table_matches_numpy_reference():
    rng = np.random.default_rng(12)
    m = _random_tensor(rng, (4, 4, 4))
    rows_b = _random_tensor(rng, (3, 4))
    rows_c = _random_tensor(rng, (2, 4))
    got = kernels.product_table(m, rows_b, rows_c)
    want = kernels._product_table_np(m, rows_b, rows_c)
    assert got.shape == (3, 2, 4)
    assert np.abs(got - want).max() < 1e-12
    direct = np.einsum("pi,qj,ijk->pqk", rows_b, rows_c, m)
    assert np.abs(got - direct).max() < 1e-12


def test_assoc_residual_zero_for_group_table():
    m = np.zeros((2, 2, 2), dtype=complex)
    m[0, 0, 0] = m[0, 1, 1] = m[1, 0, 1] = m[1, 1, 0] = 1.0
    assert kernels.assoc_residual(m) < 1e-14
    assert abs(kernels.assoc_residual(m) - kernels._assoc_residual_np(m)) < 1e-14


def test_assoc_residual_detects_perturbation():
    m = np.zeros((2, 2, 2), dtype=complex)
    m[0, 0, 0] = m[0, 1, 1] = m[1, 0, 1] = m[1, 1, 0] = 1.0
    # perturbing one side of the unit row is not associative:
    # (g e) g stays e while g (e g) picks up the extra term
    m[0, 1, 0] += 0.01
    assert kernels.assoc_residual(m) >= 0.005


def test_noncontiguous_input_accepted():
    rng = np.random.default_rng(13)
    base = _random_tensor(rng, (3, 3, 3))
    view = base.transpose(2, 0, 1)
    x = _random_tensor(rng, (3,))
    got = kernels.multiply(view, x, x)
    want = np.einsum("i,j,ijk->k", x, x, view)
    assert np.abs(got - want).max() < 1e-12
    assert kernels.assoc_residual(view) >= 0.0


def test_env_flag_forces_numpy_backend():
    code = "import weakkac.kernels as k; print(k.HAS_NUMBA)"
    env = dict(os.environ, WKA_NO_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "False"
