"""Bundled four-mode example code correcting an arbitrary single-mode error.

The code uses two entangled pairs and distinguishes any single-mode
displacement by its syndrome.  Both the raw check rows (integer-valued,
as a user would write them) and the row-reduced symplectic basis they
generate are provided, together with the closed-form syndrome of a
single-mode error on each mode.  These fixtures back the self-test and
the regression suite.
"""

from __future__ import annotations

import numpy as np

from .codes import CodeSpec, build_code


def raw_parity_rows() -> np.ndarray:
    """The four integer check rows defining the example code's rowspace."""
    return np.array(
        [
            [1, 0, 1, 0, 0, 1, 0, 0],
            [1, 1, 0, 1, 0, 0, 0, 0],
            [0, 1, 0, 0, 1, 1, 1, 0],
            [0, 0, 0, 0, 1, 1, 0, 1],
        ],
        dtype=float,
    )


def symplectic_basis_rows() -> np.ndarray:
    """Row-reduced form of `raw_parity_rows`: two hyperbolic pairs (u1, u2, v1, v2)."""
    h = np.sqrt(0.5)
    s2 = np.sqrt(2.0)
    s92 = np.sqrt(4.5)
    return np.array(
        [
            [1, 1, 0, 1, 0, 0, 0, 0],
            [-h, s2, -s2, h, h, -h, h, 0],
            [1, 0, 1, 0, 0, 1, 0, 0],
            [-s2, h, -s92, h, h, -s2, 0, h],
        ],
        dtype=float,
    )


def syndrome_closed_form(mode: int, p: float, x: float) -> np.ndarray:
    """Syndrome of a single-mode error (p, x) on the given mode (1-based)."""
    h = np.sqrt(0.5)
    s2 = np.sqrt(2.0)
    if mode == 1:
        return np.array([x, h * (p - x), x, h * p - s2 * x])
    if mode == 2:
        return np.array([x, s2 * x - h * p, p, h * x - s2 * p])
    if mode == 3:
        return np.array([0.0, -s2 * x + h * p, x, -np.sqrt(4.5) * x])
    if mode == 4:
        return np.array([x, h * x, 0.0, h * (p + x)])
    raise ValueError(f"mode must be 1..4, got {mode}")


def build_example_code() -> CodeSpec:
    """Build the example code from its symplectic basis rows.

    Using the basis rows (rather than the raw rows) pins the normalized
    check matrix to exactly these vectors, so syndromes agree with
    `syndrome_closed_form` digit for digit.
    """
    return build_code(symplectic_basis_rows())
