"""Syndromes of displacement errors and their inversion.

A displacement labelled by the phase vector ``u = (u_p | u_x)`` shifts
the observable of check row ``h = (h_p | h_x)`` by
``s = h_p . u_x + h_x . u_p`` (in normalized units, so tables stay free
of the physical scale factor).  Syndromes are reported row-for-row in
the code's normalized check order: pair u-rows first, then isotropic
rows, then pair v-rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeParameters, CodeSpec
from .errors import (
    AmbiguousSyndromeError,
    DimensionMismatchError,
    UncorrectableSyndromeError,
)
from .symplectic import as_phase_vector

DEFAULT_DECODE_TOL = 1e-6


def syndrome_matrix(code: CodeSpec) -> np.ndarray:
    """Matrix S with syndrome(u) = S @ u, shape (m, 2n)."""
    n = code.n
    return np.hstack([code.h[:, n:], code.h[:, :n]])


def syndrome(code: CodeSpec, u) -> np.ndarray:
    """Syndrome of a displacement on the sender's modes, one value per check row."""
    u = as_phase_vector(u, code.n)
    return syndrome_matrix(code) @ u


@dataclass(frozen=True)
class Correction:
    """A decoded error hypothesis.

    Attributes:
        u_prime: phase vector of the inferred displacement.
        mode_hypothesis: 1-based mode the error was placed on, or None for
            the zero / min-norm corrections.
        residual: norm of the unexplained syndrome component (>= 0).
    """

    u_prime: np.ndarray
    mode_hypothesis: int | None
    residual: float


def single_mode_error(n: int, mode: int, p: float, x: float) -> np.ndarray:
    """Phase vector of a displacement confined to one mode (1-based)."""
    if not 1 <= mode <= n:
        raise DimensionMismatchError(f"mode {mode} out of range 1..{n}")
    u = np.zeros(2 * n)
    u[mode - 1] = p
    u[n + mode - 1] = x
    return u


def decode_single_mode(code: CodeSpec, s, tol: float = DEFAULT_DECODE_TOL) -> Correction:
    """Identify the single-mode displacement explaining a syndrome.

    Every mode hypothesis j yields a two-unknown least-squares system for
    (p, x); the hypothesis with the smallest residual wins.  A syndrome
    whose norm is below ``tol`` decodes to the identity correction.

    Args:
        code: a built code with at least two check rows.
        s: syndrome vector of length m.
        tol: residual scale separating success, ambiguity, and failure.

    Raises:
        AmbiguousSyndromeError: best and second-best residuals differ by
            less than ``tol * (1 + best)``.
        UncorrectableSyndromeError: no hypothesis fits within
            ``tol * (1 + |s|)``.
    """
    s = np.asarray(s, dtype=float)
    m, n = code.m, code.n
    if s.shape != (m,):
        raise DimensionMismatchError(f"syndrome must have length {m}, got shape {s.shape}")
    if m < 2:
        raise DimensionMismatchError("single-mode decoding needs at least two check rows")
    snorm = float(np.linalg.norm(s))
    if snorm <= tol:
        return Correction(u_prime=np.zeros(2 * n), mode_hypothesis=None, residual=snorm)

    smat = syndrome_matrix(code)
    # Columns of the per-mode systems: syndromes of unit-p and unit-x errors.
    a = np.stack([smat[:, :n], smat[:, n:]], axis=2).transpose(1, 0, 2)  # (n, m, 2)
    gram = np.einsum("jmc,jmd->jcd", a, a)
    rhs = np.einsum("jmc,m->jc", a, s)
    det = gram[:, 0, 0] * gram[:, 1, 1] - gram[:, 0, 1] ** 2
    theta = np.zeros((n, 2))
    ok = det > 1e-300
    theta[ok, 0] = (gram[ok, 1, 1] * rhs[ok, 0] - gram[ok, 0, 1] * rhs[ok, 1]) / det[ok]
    theta[ok, 1] = (gram[ok, 0, 0] * rhs[ok, 1] - gram[ok, 0, 1] * rhs[ok, 0]) / det[ok]
    for j in np.nonzero(~ok)[0]:  # rank-deficient hypothesis: fall back to lstsq
        theta[j], *_ = np.linalg.lstsq(a[j], s, rcond=None)
    residuals = np.linalg.norm(np.einsum("jmc,jc->jm", a, theta) - s[None, :], axis=1)

    order = np.argsort(residuals, kind="stable")
    best = int(order[0])
    best_res = float(residuals[best])
    if best_res > tol * (1.0 + snorm):
        raise UncorrectableSyndromeError(
            f"no single-mode hypothesis fits (best residual {best_res:.3e} on mode {best + 1})"
        )
    if n > 1:
        second_res = float(residuals[int(order[1])])
        if second_res - best_res < tol * (1.0 + best_res):
            raise AmbiguousSyndromeError(
                f"modes {best + 1} and {int(order[1]) + 1} explain the syndrome equally well "
                f"(residuals {best_res:.3e}, {second_res:.3e})"
            )
    u_prime = single_mode_error(n, best + 1, float(theta[best, 0]), float(theta[best, 1]))
    return Correction(u_prime=u_prime, mode_hypothesis=best + 1, residual=best_res)


def min_norm_correction(code: CodeSpec, s) -> Correction:
    """Least-norm displacement reproducing the syndrome, via pseudoinverse."""
    s = np.asarray(s, dtype=float)
    if s.shape != (code.m,):
        raise DimensionMismatchError(f"syndrome must have length {code.m}, got shape {s.shape}")
    smat = syndrome_matrix(code)
    u_prime = np.linalg.pinv(smat) @ s
    residual = float(np.linalg.norm(smat @ u_prime - s))
    return Correction(u_prime=u_prime, mode_hypothesis=None, residual=residual)


def canonical_reverse(params, a, a_1, a_2, alpha, beta) -> np.ndarray:
    """Assemble the canonical reversal displacement from a reduced syndrome.

    The canonical layout places entangled modes first, ancillas next, and
    data last, so the result reads ``(a_2, 0, alpha(..) | a_1, a, beta(..))``
    with the unobservable ancilla-momentum block zeroed.

    Args:
        params: (n, k, l, c) of the canonical code.
        a: ancilla position shifts, length l.
        a_1: entangled-pair relative-position shifts, length c.
        a_2: entangled-pair total-momentum shifts, length c.
        alpha, beta: callables (a, a_1, a_2) -> length-k arrays giving the
            data-mode momentum / position components of the correctable set.
    """
    params = CodeParameters(*params)
    n, k, l, c = params
    a = np.asarray(a, dtype=float).reshape(-1)
    a_1 = np.asarray(a_1, dtype=float).reshape(-1)
    a_2 = np.asarray(a_2, dtype=float).reshape(-1)
    if a.shape != (l,) or a_1.shape != (c,) or a_2.shape != (c,):
        raise DimensionMismatchError(f"expected block lengths (l={l}, c={c}, c={c}), got {a.shape}, {a_1.shape}, {a_2.shape}")
    alpha_val = np.asarray(alpha(a, a_1, a_2), dtype=float).reshape(-1)
    beta_val = np.asarray(beta(a, a_1, a_2), dtype=float).reshape(-1)
    if alpha_val.shape != (k,) or beta_val.shape != (k,):
        raise DimensionMismatchError(f"alpha/beta must return length-{k} arrays")
    p_part = np.concatenate([a_2, np.zeros(l), alpha_val])
    x_part = np.concatenate([a_1, a, beta_val])
    return np.concatenate([p_part, x_part])


def is_correctable_pair(code: CodeSpec, u, u2, tol: float = 1e-9) -> bool:
    """Whether two errors are distinguishable or act identically on the codespace.

    True when the syndromes differ (the difference leaves the codespace
    detectably) or when the difference lies in the span of the
    decomposition's isotropic vectors (a degenerate pair: same action on
    every encoded state).
    """
    u = as_phase_vector(u, code.n)
    u2 = as_phase_vector(u2, code.n)
    diff = u - u2
    scale = 1.0 + float(np.linalg.norm(diff))
    if float(np.max(np.abs(syndrome(code, diff)), initial=0.0)) > tol * scale:
        return True
    iso = code.decomposition.isotropic
    if not iso:
        return float(np.linalg.norm(diff)) <= tol * scale
    basis = np.array(iso).T
    coeff, *_ = np.linalg.lstsq(basis, diff, rcond=None)
    return float(np.linalg.norm(basis @ coeff - diff)) <= tol * scale
