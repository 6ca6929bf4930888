import os
import subprocess
import sys

import numpy as np
import pytest

from vtype_sge import _jit
from vtype_sge.dynamics import _integrate_kernel, _rk4, integrate
from vtype_sge.entanglement import block_roots, negativity_batch
from vtype_sge.linalg import _jacobi_kernel
from vtype_sge.model import ReducedState, SystemParams, rhs_pumped_kernel, rhs_pumpless_kernel
from vtype_sge.validation import random_support_state

from conftest import random_hermitian

compiled = pytest.mark.skipif(not _jit.HAS_NUMBA, reason="numba unavailable or disabled")

py = _jit.python_version


@compiled
def test_kernels_are_compiled():
    for f in (rhs_pumped_kernel, rhs_pumpless_kernel, _rk4, _integrate_kernel, _jacobi_kernel,
              block_roots, negativity_batch):
        assert hasattr(f, "py_func")


@compiled
def test_rhs_compiled_matches_python(rng):
    p = SystemParams(1.0, 1.2, 0.9, 2.4, 0.1, 0.2)
    for _ in range(20):
        v = random_support_state(rng).vector
        np.testing.assert_array_equal(rhs_pumped_kernel(v, p.rates()),
                                      py(rhs_pumped_kernel)(v, p.rates()))


@compiled
def test_negativity_batch_compiled_matches_python(rng):
    states = np.array([random_support_state(rng).vector for _ in range(100)])
    np.testing.assert_allclose(negativity_batch(states), py(negativity_batch)(states),
                               atol=1e-15)


@compiled
def test_jacobi_compiled_matches_python(rng):
    m = random_hermitian(rng, 9)
    a1, a2 = m.copy(), m.copy()
    v1, v2 = np.eye(9, dtype=complex), np.eye(9, dtype=complex)
    _jacobi_kernel(a1, v1, True, 1e-12, 100)
    py(_jacobi_kernel)(a2, v2, True, 1e-12, 100)
    np.testing.assert_allclose(np.sort(np.diag(a1).real), np.sort(np.diag(a2).real), atol=1e-13)


def test_python_and_compiled_integration_agree():
    p = SystemParams.from_preset("R0.83")
    a = integrate(rhs_pumpless_kernel, ReducedState.basis("emu"), 1.0, 1e-2, p)
    b = integrate(py(rhs_pumpless_kernel), ReducedState.basis("emu"), 1.0, 1e-2, p)
    np.testing.assert_allclose(a.states, b.states, atol=1e-14)
    np.testing.assert_array_equal(a.times, b.times)


def test_disable_flag_selects_python_kernels():
    env = dict(os.environ, VTYPE_SGE_DISABLE_JIT="1")
    code = ("import vtype_sge._jit as j, vtype_sge.model as m;"
            "assert j.JIT_DISABLED and not j.HAS_NUMBA;"
            "assert not hasattr(m.rhs_pumped_kernel, 'py_func');"
            "from vtype_sge import simulate, SystemParams;"
            "t = simulate(SystemParams.from_preset('R1.18'), t_max=0.5);"
            "print(t.negativities.max())")
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert float(proc.stdout) > 0
