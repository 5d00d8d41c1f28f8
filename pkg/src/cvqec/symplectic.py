"""Phase-space vectors, the symplectic product, and symplectic matrices.

Two index conventions coexist and are pinned here once and for all:

* **Phase vectors** are momentum-first, ``u = (p_1 .. p_n | x_1 .. x_n)``.
  They label displacements and parity-check rows.
* **Quadrature actions** are position-first ``(x_1 .. x_n, p_1 .. p_n)``
  and describe how a Gaussian unitary rewrites the quadrature operators,
  i.e. the matrix that multiplies mean vectors in the simulator.

Both orderings share the same block form matrix ``J = [[0, I], [-I, 0]]``.
A phase vector, read as a plain coefficient tuple, pairs component-wise
with the quadrature column ``(x_1 .. x_n, p_1 .. p_n)``: the p-components
multiply position operators and the x-components multiply momentum
operators.  `quad_action_to_phase_map` converts a quadrature action into
the matrix by which displacement labels transform under conjugation.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NotSymplecticError

DEFAULT_TOL = 1e-9


def symplectic_form(n: int) -> np.ndarray:
    """Return the 2n x 2n block form matrix ``[[0, I], [-I, 0]]``."""
    if n < 1:
        raise DimensionMismatchError(f"mode count must be >= 1, got {n}")
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def mode_count(v: np.ndarray) -> int:
    """Mode count of a phase vector (or row), validating the 2n layout."""
    v = np.asarray(v)
    if v.ndim != 1 or v.shape[0] % 2 != 0 or v.shape[0] < 2:
        raise DimensionMismatchError(f"expected a vector of even length >= 2, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DimensionMismatchError("phase vector entries must be finite")
    return v.shape[0] // 2


def as_phase_vector(v, n: int | None = None) -> np.ndarray:
    """Coerce to a float phase vector, optionally checking the mode count."""
    u = np.asarray(v, dtype=float)
    m = mode_count(u)
    if n is not None and m != n:
        raise DimensionMismatchError(f"expected {n} modes, got {m}")
    return u


def symplectic_product(u, v) -> float:
    """Antisymmetric product ``p . x' - x . p'`` of two phase vectors."""
    u = as_phase_vector(u)
    v = as_phase_vector(v, mode_count(u))
    n = u.shape[0] // 2
    return float(u[:n] @ v[n:] - u[n:] @ v[:n])


def _check_square_even(m: np.ndarray) -> int:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] % 2 != 0:
        raise DimensionMismatchError(f"matrix dimension must be even, got {m.shape[0]}")
    return m.shape[0] // 2


def is_symplectic(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``M^T J M - J`` has infinity norm at most ``tol``."""
    m = np.asarray(m, dtype=float)
    n = _check_square_even(m)
    j = symplectic_form(n)
    return float(np.max(np.abs(m.T @ j @ m - j))) <= tol


def require_symplectic(m, tol: float = DEFAULT_TOL, what: str = "matrix") -> np.ndarray:
    """Validate symplecticity, returning the matrix as a float array."""
    m = np.asarray(m, dtype=float)
    n = _check_square_even(m)
    j = symplectic_form(n)
    defect = float(np.max(np.abs(m.T @ j @ m - j)))
    if defect > tol:
        raise NotSymplecticError(f"{what} violates the symplectic condition (defect {defect:.3e} > tol {tol:.3e})")
    return m


def apply(m, u) -> np.ndarray:
    """Matrix-vector product of a phase-space map with a phase vector."""
    m = np.asarray(m, dtype=float)
    n = _check_square_even(m)
    return m @ as_phase_vector(u, n)


def swap_halves(v) -> np.ndarray:
    """Exchange the two n-blocks of a vector: (p|x) <-> (x|p).

    Applied to a phase vector this yields the quadrature-ordered mean
    displacement it produces (x-shifts first), and vice versa.
    """
    u = np.asarray(v, dtype=float)
    n = mode_count(u)
    return np.concatenate([u[n:], u[:n]])


def quad_action_to_phase_map(a, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Phase-vector transformation induced by a quadrature action.

    If a Gaussian unitary rewrites the quadrature column as ``R -> A R``,
    conjugating a displacement by that unitary relabels its phase vector
    as ``u -> Y u`` with ``Y = (A^T)^{-1}``.  For symplectic ``A`` this
    equals the similarity ``-J A J``, which is what is returned (no
    matrix inversion needed).  The map is a group homomorphism.

    Raises:
        NotSymplecticError: if ``A`` is not symplectic within ``tol``.
    """
    a = require_symplectic(a, tol, what="quadrature action")
    j = symplectic_form(a.shape[0] // 2)
    return -j @ a @ j


def phase_map_to_quad_action(y, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Inverse of `quad_action_to_phase_map` (the conversion is an involution)."""
    y = require_symplectic(y, tol, what="phase-space map")
    j = symplectic_form(y.shape[0] // 2)
    return -j @ y @ j
