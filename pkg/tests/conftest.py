"""Shared helpers for the test suite."""

import numpy as np
import pytest
from scipy.linalg import expm

from cvqec.compiler import (
    Circuit,
    circuit_action,
    fourier,
    fourier_inv,
    phase_p,
    phase_x,
    qnd_p,
    qnd_x,
    squeeze,
    swap,
)
from cvqec.symplectic import symplectic_form


def random_gates(n, count, rng):
    """A random circuit with bounded parameters; never a no-op squeeze."""
    gates = []
    for _ in range(count):
        kind = int(rng.integers(0, 8))
        m1 = int(rng.integers(1, n + 1))
        m2 = int(rng.integers(1, n + 1))
        while n > 1 and m2 == m1:
            m2 = int(rng.integers(1, n + 1))
        g = float(rng.uniform(-2.0, 2.0))
        a = float(rng.uniform(0.5, 2.0)) * float(rng.choice([-1.0, 1.0]))
        if n == 1 and kind in (3, 4, 7):
            kind = 5
        builders = [
            lambda: squeeze(m1, a),
            lambda: fourier(m1),
            lambda: fourier_inv(m1),
            lambda: qnd_x(m1, m2, g),
            lambda: qnd_p(m1, m2, g),
            lambda: phase_x(m1, g),
            lambda: phase_p(m1, g),
            lambda: swap(m1, m2),
        ]
        gates.append(builders[kind]())
    return Circuit(n=n, gates=tuple(gates))


def random_symplectic_from_gates(n, rng, count=50):
    return circuit_action(random_gates(n, count, rng))


def random_symplectic_from_hamiltonian(n, rng, scale=None):
    """exp(J H) with H symmetric is symplectic; scale keeps norms moderate."""
    h = rng.normal(size=(2 * n, 2 * n))
    h = (h + h.T) / (2.0 if scale is None else scale) / (2 * n)
    return expm(symplectic_form(n) @ h)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
