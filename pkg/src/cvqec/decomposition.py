"""Decomposition of a rowspace into hyperbolic pairs plus an isotropic basis.

Any subspace of phase space splits into a symplectic part, spanned by
hyperbolic pairs ``(u_i, v_i)`` with ``u_i (.) v_i = 1``, and an isotropic
part on which the symplectic product vanishes identically.  The pair
count ``c`` fixes how many pre-shared entangled modes a code built on the
rowspace needs; the isotropic count ``l`` fixes the ancilla count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DecompositionError
from .symplectic import DEFAULT_TOL, as_phase_vector, symplectic_form, symplectic_product


@dataclass(frozen=True)
class SymplecticDecomposition:
    """Hyperbolic pairs plus an isotropic basis spanning an input rowspace.

    Attributes:
        n: mode count.
        pairs: c tuples (u_i, v_i) with pairwise product 1.
        isotropic: l vectors with vanishing products against everything stored.
        dropped_rows: indices of input rows discarded as linearly dependent.
    """

    n: int
    pairs: tuple[tuple[np.ndarray, np.ndarray], ...]
    isotropic: tuple[np.ndarray, ...]
    dropped_rows: tuple[int, ...] = field(default=())

    @property
    def c(self) -> int:
        return len(self.pairs)

    @property
    def l(self) -> int:
        return len(self.isotropic)

    @property
    def m(self) -> int:
        """Dimension of the decomposed subspace, 2c + l."""
        return 2 * self.c + self.l

    def vectors(self) -> np.ndarray:
        """All stored vectors as rows, ordered (u_1..u_c, isotropic, v_1..v_c)."""
        rows = [u for u, _ in self.pairs] + list(self.isotropic) + [v for _, v in self.pairs]
        return np.array(rows) if rows else np.zeros((0, 2 * self.n))

    def gram(self) -> np.ndarray:
        """Matrix of pairwise symplectic products in `vectors` order."""
        vecs = self.vectors()
        j = symplectic_form(self.n)
        return vecs @ j @ vecs.T

    def canonical_gram(self) -> np.ndarray:
        """The block form `gram` must reproduce: +-1 per pair, zeros elsewhere."""
        c, m = self.c, self.m
        g = np.zeros((m, m))
        for i in range(c):
            g[i, c + self.l + i] = 1.0
            g[c + self.l + i, i] = -1.0
        return g


def _independent_rows(rows: np.ndarray, tol: float) -> tuple[list[int], list[int]]:
    """Greedy rank-revealing pass: indices of kept rows and of dropped rows."""
    kept: list[int] = []
    dropped: list[int] = []
    basis: list[np.ndarray] = []
    for idx, row in enumerate(rows):
        res = row.astype(float).copy()
        for _ in range(2):  # second sweep restores orthogonality lost to rounding
            for q in basis:
                res -= (q @ res) * q
        norm = np.linalg.norm(res)
        if norm > tol * max(1.0, np.linalg.norm(row)):
            basis.append(res / norm)
            kept.append(idx)
        else:
            dropped.append(idx)
    return kept, dropped


def _project_out_pair(r: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Remove the (u, v) plane from r symplectically; assumes u (.) v = 1."""
    return r - symplectic_product(r, v) * u + symplectic_product(r, u) * v


def _pairing_loop(working: list[np.ndarray], tol: float):
    """Split an independent set into hyperbolic pairs and isotropic leftovers.

    Pivot rule: take the first remaining vector w, partner it with the
    remaining z maximizing |w (.) z| (ties resolved to the lowest index).
    A partner below the scale-aware zero threshold sends w to the
    isotropic pile; otherwise z is rescaled so the pair product is one
    and the pair is projected out of every remaining vector.
    """
    pairs: list[tuple[np.ndarray, np.ndarray]] = []
    isotropic: list[np.ndarray] = []
    working = [w.copy() for w in working]
    while working:
        w = working.pop(0)
        if not working:
            isotropic.append(w)
            break
        prods = np.array([symplectic_product(w, z) for z in working])
        scales = np.array([tol * max(1.0, np.linalg.norm(w) * np.linalg.norm(z)) for z in working])
        if np.all(np.abs(prods) <= scales):
            isotropic.append(w)
            continue
        best = int(np.argmax(np.abs(prods)))
        z = working.pop(best) / prods[best]
        working = [_project_out_pair(r, w, z) for r in working]
        pairs.append((w, z))
    return pairs, isotropic


def symplectic_gram_schmidt(rows, tol: float = DEFAULT_TOL) -> SymplecticDecomposition:
    """Decompose the rowspace of `rows` into hyperbolic pairs and an isotropic basis.

    Linearly dependent input rows are dropped (recorded in
    ``dropped_rows``); the remaining independent set is orthogonalized so
    that the Gram matrix of symplectic products takes the canonical block
    form.  The output spans exactly the input rowspace and is
    deterministic for fixed input and tolerance.

    Args:
        rows: sequence of phase vectors sharing one mode count.
        tol: scale-aware zero threshold for products and rank decisions.

    Raises:
        DecompositionError: on an empty input.
        DimensionMismatchError: on inconsistent row dimensions.
    """
    rows = list(rows)
    if not rows:
        raise DecompositionError("need at least one row")
    first = as_phase_vector(rows[0])
    n = first.shape[0] // 2
    mat = np.array([as_phase_vector(r, n) for r in rows], dtype=float)
    kept, dropped = _independent_rows(mat, tol)
    pairs, isotropic = _pairing_loop([mat[i] for i in kept], tol)
    return SymplecticDecomposition(
        n=n,
        pairs=tuple((u.copy(), v.copy()) for u, v in pairs),
        isotropic=tuple(w.copy() for w in isotropic),
        dropped_rows=tuple(dropped),
    )


def check_decomposition(dec: SymplecticDecomposition, tol: float = 1e-8) -> None:
    """Raise unless the stored vectors satisfy the canonical Gram form."""
    if dec.m == 0:
        return
    vecs = dec.vectors()
    scale = max(1.0, float(np.max(np.abs(vecs))) ** 2)
    defect = float(np.max(np.abs(dec.gram() - dec.canonical_gram())))
    if defect > tol * scale:
        raise DecompositionError(f"decomposition invariants violated (Gram defect {defect:.3e})")
    if np.linalg.matrix_rank(vecs, tol=tol * scale) < dec.m:
        raise DecompositionError("decomposition vectors are linearly dependent")


def code_parameters(dec: SymplecticDecomposition) -> tuple[int, int, int, int]:
    """Code parameters (n, k, l, c) implied by a decomposition; k = n - c - l."""
    c, l, n = dec.c, dec.l, dec.n
    if c + l > n:
        raise DecompositionError(f"c + l = {c + l} exceeds the mode count {n}")
    return n, n - c - l, l, c


def complete_symplectic_basis(dec: SymplecticDecomposition, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Extend a decomposition to a full symplectic basis of phase space.

    Returns a (2n, 2n) array whose rows are ordered ``(u_1..u_n,
    v_1..v_n)`` with ``u_i (.) v_j = delta_ij`` and all other products
    zero.  The first c pairs coincide with ``dec.pairs`` and
    ``u_{c+1}..u_{c+l}`` are exactly ``dec.isotropic``; their partners
    are found by a least-norm dual solve, and the remaining pairs by
    running the pairing loop on standard-basis candidates projected
    against everything already fixed.

    Raises:
        DecompositionError: if the input violates its own invariants or
            does not fit inside n modes.
    """
    check_decomposition(dec)
    n, k, l, c = code_parameters(dec)
    j = symplectic_form(n)
    pairs: list[tuple[np.ndarray, np.ndarray]] = [(u.copy(), v.copy()) for u, v in dec.pairs]

    if l:
        # Partners z_i for the isotropic vectors: w_i (.) z_j = delta_ij with
        # zero products against the existing pairs, via a min-norm solve.
        iso = np.array(dec.isotropic)
        constraints = [iso @ j]
        rhs = [np.eye(l)]
        for u, v in pairs:
            constraints.append(np.vstack([u @ j, v @ j]))
            rhs.append(np.zeros((2, l)))
        m = np.vstack(constraints)
        z, *_ = np.linalg.lstsq(m, np.vstack(rhs), rcond=None)
        z = z.T  # rows z_1..z_l
        # Kill the mutual z-products by mixing in isotropic directions:
        # z_i -> z_i - (1/2) sum_j (z_i (.) z_j) w_j leaves all other
        # products untouched and zeroes the antisymmetric defect exactly.
        s = z @ j @ z.T
        z = z - 0.5 * s @ iso
        for i in range(l):
            for jdx in range(l):
                got = symplectic_product(iso[i], z[jdx])
                want = 1.0 if i == jdx else 0.0
                if abs(got - want) > 1e3 * tol * max(1.0, np.linalg.norm(z[jdx])):
                    raise DecompositionError("failed to complete isotropic partners")
        for i in range(l):
            pairs.append((iso[i].copy(), z[i].copy()))

    if k:
        candidates = []
        for e in np.eye(2 * n):
            r = e.copy()
            for u, v in pairs:
                r = _project_out_pair(r, u, v)
            candidates.append(r)
        cand = np.array(candidates)
        kept, _ = _independent_rows(cand, tol)
        new_pairs, leftovers = _pairing_loop([cand[i] for i in kept], tol)
        if leftovers or len(new_pairs) != k:
            raise DecompositionError("completion did not yield a nondegenerate remainder")
        pairs.extend(new_pairs)

    basis = np.array([u for u, _ in pairs] + [v for _, v in pairs])
    gram = basis @ j @ basis.T
    scale = max(1.0, float(np.max(np.abs(basis))) ** 2)
    if float(np.max(np.abs(gram - j))) > 1e3 * tol * scale:
        raise DecompositionError("completed basis fails the canonical Gram form")
    return basis
