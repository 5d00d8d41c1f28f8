"""Gaussian-state simulation of encoding, homodyne readout, and correction.

States live in quadrature ordering (x_1..x_n, p_1..p_n) with hbar = 1
and vacuum variance 1/2 per quadrature.  The covariance matrix is kept
in factored form, cov = S S^T: symplectic evolution multiplies the
factor, and homodyne conditioning is a rank-one projection of it.  The
factorization is what keeps strongly squeezed combinations (variance
e^{-2r} sitting next to e^{+2r} partners) meaningful in double
precision; the dense covariance is always available as a property.

Displacement errors labelled by phase vectors (p | x) shift position
means by the x-components and momentum means by the p-components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import CodeSpec
from .compiler import (
    Circuit,
    circuit_action,
    compile_encoder,
    fourier,
    invert_circuit,
    qnd_p,
    qnd_x,
)
from .decoder import decode_single_mode, syndrome
from .errors import AmbiguousSyndromeError, DecodeError, DimensionMismatchError, InvalidStateError
from .symplectic import swap_halves


@dataclass(frozen=True)
class GaussianState:
    """Immutable Gaussian state: mean vector and factored covariance.

    Attributes:
        n: mode count.
        mean: length-2n quadrature means, (x | p) ordering.
        factor: (2n, K) array with covariance = factor @ factor.T.
    """

    n: int
    mean: np.ndarray
    factor: np.ndarray

    def __post_init__(self):
        if self.mean.shape != (2 * self.n,) or self.factor.shape[0] != 2 * self.n:
            raise DimensionMismatchError(
                f"inconsistent state shapes: mean {self.mean.shape}, factor {self.factor.shape}"
            )

    @property
    def cov(self) -> np.ndarray:
        return self.factor @ self.factor.T

    def variance(self, index: int) -> float:
        """Variance of one quadrature (0-based row index), cancellation-free."""
        row = self.factor[index]
        return float(row @ row)

    def combination_variance(self, coeffs) -> float:
        """Variance of a real linear combination of quadratures."""
        w = np.asarray(coeffs, dtype=float) @ self.factor
        return float(w @ w)


def vacuum(n: int) -> GaussianState:
    """n-mode vacuum: zero means, variance 1/2 per quadrature."""
    return GaussianState(n=n, mean=np.zeros(2 * n), factor=np.eye(2 * n) / math.sqrt(2.0))


def position_squeezed(r: float) -> GaussianState:
    """Single mode with var(x) = e^{-2r}/2 and var(p) = e^{2r}/2."""
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    f = np.diag([math.exp(-r), math.exp(r)]) / math.sqrt(2.0)
    return GaussianState(n=1, mean=np.zeros(2), factor=f)


def epr_pair(r: float) -> GaussianState:
    """Two-mode squeezed vacuum approximating the ideal entangled resource.

    Built as one p-squeezed and one x-squeezed mode on a balanced
    beamsplitter, which gives the standard covariance (x-block
    cosh(2r)/2 with +sinh(2r)/2 off-diagonal, p-block with the opposite
    sign) while keeping var(x_A - x_B) = var(p_A + p_B) = e^{-2r} exact
    in the factor.
    """
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    s = 1.0 / math.sqrt(2.0)
    rot = np.array(
        [
            [s, -s, 0.0, 0.0],
            [s, s, 0.0, 0.0],
            [0.0, 0.0, s, -s],
            [0.0, 0.0, s, s],
        ]
    )
    half = np.diag([math.exp(r), math.exp(-r), math.exp(-r), math.exp(r)]) / math.sqrt(2.0)
    return GaussianState(n=2, mean=np.zeros(4), factor=rot @ half)


def prepare(kind: str, r: float = 0.0) -> GaussianState:
    """Resource-state factory: 'vacuum', 'position-squeezed', or 'epr'."""
    kind = kind.lower().replace("_", "-")
    if kind == "vacuum":
        return vacuum(1)
    if kind in ("position-squeezed", "squeezed"):
        return position_squeezed(r)
    if kind == "epr":
        return epr_pair(r)
    raise ValueError(f"unknown state kind {kind!r}")


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Product state of two registers, second appended after the first."""
    n = a.n + b.n
    mean = np.concatenate([a.mean[: a.n], b.mean[: b.n], a.mean[a.n :], b.mean[b.n :]])
    ka, kb = a.factor.shape[1], b.factor.shape[1]
    factor = np.zeros((2 * n, ka + kb))
    factor[: a.n, :ka] = a.factor[: a.n]
    factor[a.n : n, ka:] = b.factor[: b.n]
    factor[n : n + a.n, :ka] = a.factor[a.n :]
    factor[n + a.n :, ka:] = b.factor[b.n :]
    return GaussianState(n=n, mean=mean, factor=factor)


def apply_symplectic(state: GaussianState, a: np.ndarray) -> GaussianState:
    """Evolve by a quadrature action: mean -> A mean, cov -> A cov A^T."""
    a = np.asarray(a, dtype=float)
    if a.shape != (2 * state.n, 2 * state.n):
        raise DimensionMismatchError(f"action shape {a.shape} does not fit {state.n} modes")
    return GaussianState(n=state.n, mean=a @ state.mean, factor=a @ state.factor)


def apply_circuit(state: GaussianState, circuit: Circuit) -> GaussianState:
    """Apply a gate sequence (first gate first)."""
    if circuit.n != state.n:
        raise DimensionMismatchError(f"circuit is on {circuit.n} modes, state has {state.n}")
    return apply_symplectic(state, circuit_action(circuit))


def displace(state: GaussianState, d) -> GaussianState:
    """Shift the means by d (quadrature ordering); covariance is untouched."""
    d = np.asarray(d, dtype=float)
    if d.shape != (2 * state.n,):
        raise DimensionMismatchError(f"displacement shape {d.shape} does not fit {state.n} modes")
    return GaussianState(n=state.n, mean=state.mean + d, factor=state.factor)


def displace_error(state: GaussianState, u) -> GaussianState:
    """Apply a displacement labelled by a phase vector (p | x)."""
    return displace(state, swap_halves(u))


@dataclass(frozen=True)
class HomodyneRecord:
    """Outcome of measuring one quadrature; the measured mode is removed."""

    mode: int
    quadrature: str
    outcome: float
    posterior: GaussianState


def _drop_mode(mean: np.ndarray, factor: np.ndarray, n: int, mode0: int):
    keep = [i for i in range(2 * n) if i not in (mode0, n + mode0)]
    return mean[keep], factor[keep]


def homodyne(state: GaussianState, mode: int, quadrature: str, rng: np.random.Generator) -> HomodyneRecord:
    """Measure x or p of one mode; condition and trace out that mode.

    The outcome is drawn from the exact marginal; the remaining modes are
    updated by the Gaussian conditioning rule, realized as a rank-one
    projection of the covariance factor, and the measured mode is then
    removed.

    Raises:
        InvalidStateError: if the measured quadrature has no spread
            (degenerate variance), which double precision cannot condition on.
    """
    if not 1 <= mode <= state.n:
        raise DimensionMismatchError(f"mode {mode} out of range 1..{state.n}")
    if quadrature not in ("x", "p"):
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    n = state.n
    q = (mode - 1) if quadrature == "x" else (n + mode - 1)
    v = state.factor[q].copy()
    var = float(v @ v)
    if var <= 0.0:
        raise InvalidStateError(f"quadrature {quadrature}_{mode} has nonpositive variance {var}")
    outcome = float(rng.normal(state.mean[q], math.sqrt(var)))

    gain = state.factor @ v / var  # regression of every quadrature on the measured one
    mean = state.mean + gain * (outcome - state.mean[q])
    vhat = v / math.sqrt(var)
    factor = state.factor - np.outer(state.factor @ vhat, vhat)
    mean, factor = _drop_mode(mean, factor, n, mode - 1)
    posterior = GaussianState(n=n - 1, mean=mean, factor=factor)
    return HomodyneRecord(mode=mode, quadrature=quadrature, outcome=outcome, posterior=posterior)


def uncertainty_defect(state: GaussianState) -> float:
    """Most negative eigenvalue of cov + i J / 2 (0 for physical states)."""
    n = state.n
    j = np.zeros((2 * n, 2 * n))
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    eigs = np.linalg.eigvalsh(state.cov + 0.5j * j)
    return float(min(np.min(eigs), 0.0))


def phase_gate_protocol(
    state: GaussianState,
    mode: int,
    g1: float,
    g2: float,
    r: float,
    rng: np.random.Generator,
) -> GaussianState:
    """Measurement-based position phase gate of strength 2 g1 g2 on one mode.

    An ancilla squeezed in position by r is coupled to the target with a
    position QND gate of strength g1, Fourier-rotated, coupled back with
    a momentum QND gate of strength g2, and read out in position; the
    outcome feeds forward as a momentum displacement of -g1 times the
    result on the target.  In the infinite-squeezing limit the target is
    left with x -> x, p -> p + 2 g1 g2 x; at finite r the momentum picks
    up additive noise of variance g2^2 e^{-2r} / 2 from the leftover
    ancilla quadrature.
    """
    if not 1 <= mode <= state.n:
        raise DimensionMismatchError(f"mode {mode} out of range 1..{state.n}")
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    n = state.n
    st = tensor(state, position_squeezed(r))
    anc = n + 1
    st = apply_circuit(
        st,
        Circuit(n=anc, gates=(qnd_x(mode, anc, g1), fourier(anc), qnd_p(anc, mode, g2))),
    )
    rec = homodyne(st, anc, "x", rng)
    st = rec.posterior
    d = np.zeros(2 * n)
    d[n + mode - 1] = -g1 * rec.outcome
    return displace(st, d)


def balanced_beamsplitter(m1: int, m2: int, n: int) -> Circuit:
    """Exact 50:50 beamsplitter between two modes, built from three QND gates.

    Its action rotates both quadrature planes by 45 degrees:
    x_1 -> (x_1 - x_2)/sqrt(2), x_2 -> (x_1 + x_2)/sqrt(2), same for p.
    Used to turn the relative-position / total-momentum observables of an
    entangled pair into single-mode homodyne targets.
    """
    t = math.tan(math.pi / 8.0)
    s = math.sin(math.pi / 4.0)
    return Circuit(n=n, gates=(qnd_p(m1, m2, t), qnd_x(m1, m2, s), qnd_p(m1, m2, t)))


# ---------------------------------------------------------------------------
# End-to-end error-correction experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentStats:
    """Aggregates over the trials of one error-correction experiment.

    ``excess_variance`` combines the trial-to-trial jitter of the
    corrected data means with the surplus of the output quantum variance
    over the vacuum 1/2, per data quadrature (x block then p block).
    """

    trials: int
    mean_residual: np.ndarray
    residual_variance: np.ndarray
    excess_variance: np.ndarray
    syndrome_noise_variance: np.ndarray
    mode_match_rate: float
    ambiguity_rate: float
    uncorrectable_rate: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean_residual": self.mean_residual.tolist(),
            "residual_variance": self.residual_variance.tolist(),
            "excess_variance": self.excess_variance.tolist(),
            "syndrome_noise_variance": self.syndrome_noise_variance.tolist(),
            "mode_match_rate": self.mode_match_rate,
            "ambiguity_rate": self.ambiguity_rate,
            "uncorrectable_rate": self.uncorrectable_rate,
        }


def _embed_action(a: np.ndarray, n: int, total: int) -> np.ndarray:
    """Embed an n-mode quadrature action into the first n of `total` modes."""
    rows = list(range(n)) + list(range(total, total + n))
    out = np.eye(2 * total)
    out[np.ix_(rows, rows)] = a
    return out


def _prepare_encoded_input(code: CodeSpec, r: float, data_means: np.ndarray) -> GaussianState:
    """Canonical resource states on sender + receiver modes (nothing encoded yet)."""
    n, k, l, c = code.params
    total = n + c
    mean = np.zeros(2 * total)
    factor = np.zeros((2 * total, 2 * total))
    col = 0
    sq = 1.0 / math.sqrt(2.0)
    for j in range(c):  # entangled halves: sender mode j, receiver mode n + j
        block = epr_pair(r).factor
        rows = [j, n + j, total + j, total + n + j]
        factor[np.ix_(rows, range(col, col + 4))] = block
        col += 4
    for i in range(l):  # position-squeezed ancillas
        m = c + i
        factor[m, col] = sq * math.exp(-r)
        factor[total + m, col + 1] = sq * math.exp(r)
        col += 2
    for i in range(k):  # data modes: coherent states
        m = c + l + i
        factor[m, col] = sq
        factor[total + m, col + 1] = sq
        mean[m] = data_means[i]
        mean[total + m] = data_means[k + i]
        col += 2
    return GaussianState(n=total, mean=mean, factor=factor)


def run_ec_experiment(
    code: CodeSpec,
    error,
    r: float,
    trials: int,
    seed: int,
    decode_tol: float = 0.1,
    coherent_scale: float = 1.0,
) -> ExperimentStats:
    """Monte-Carlo error correction of a fixed single-mode displacement.

    Each trial prepares fresh resource states at squeezing r with random
    coherent data, encodes with the compiled circuit, applies the error,
    un-encodes on the receiver side, reads the canonical check values by
    single-mode homodyne (entangled pairs pass through an exact
    beamsplitter first so both commuting pair observables become local),
    decodes, applies the correction displacement, and compares the
    surviving data modes against their inputs.

    Decode failures are counted, never raised; a failed trial applies no
    correction.  Trials draw from independent streams derived from
    (seed, trial index), so results are reproducible bit for bit.

    Args:
        code: a built code.
        error: phase vector supported on at most one mode.
        r: resource squeezing parameter.
        trials: number of Monte-Carlo runs (>= 1).
        seed: master seed (non-negative).
        decode_tol: residual tolerance handed to the decoder; generous by
            default because measured syndromes carry finite-squeezing noise.
        coherent_scale: standard deviation of the random data-mode means.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    n, k, l, c = code.params
    error = np.asarray(error, dtype=float)
    if error.shape != (2 * n,):
        raise DimensionMismatchError(f"error must have length {2 * n}")
    support = {i % n for i in np.nonzero(error)[0]}
    if len(support) > 1:
        raise ValueError("the experiment injects single-mode errors only")
    error_mode = (support.pop() + 1) if support else None

    total = n + c
    encoder = compile_encoder(code)
    enc_full = _embed_action(circuit_action(encoder), n, total)
    dec_full = _embed_action(circuit_action(invert_circuit(encoder)), n, total)
    readout = np.eye(2 * total)
    for j in range(c):
        bs = balanced_beamsplitter(j + 1, n + j + 1, total)
        readout = circuit_action(bs) @ readout
    d_error = np.zeros(2 * total)
    d_error[:n] = error[n:]
    d_error[total : total + n] = error[:n]
    s_ideal = syndrome(code, error)
    sqrt2 = math.sqrt(2.0)
    # Canonical-frame displacement of a phase vector: the inverse encoder
    # action applied to its quadrature shifts.
    to_canonical = code.basis

    residuals = np.zeros((trials, 2 * k))
    cov_excess = np.zeros((trials, 2 * k))
    noise = np.zeros((trials, code.m))
    matches = 0
    ambiguous = 0
    uncorrectable = 0

    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        data_means = rng.normal(0.0, coherent_scale, size=2 * k) if k else np.zeros(0)
        st = _prepare_encoded_input(code, r, data_means)
        st = apply_symplectic(st, enc_full)
        st = displace(st, d_error)
        st = apply_symplectic(st, dec_full)
        st = apply_symplectic(st, readout)

        # Single-mode homodyne of every check mode, highest index first so
        # earlier indices stay valid as measured modes drop out.
        targets = [(n + j, "p") for j in range(c)]
        targets += [(c + i, "x") for i in range(l)]
        targets += [(j, "x") for j in range(c)]
        values = {}
        live = list(range(total))
        for orig, quad in sorted(targets, key=lambda item: -item[0]):
            cur = live.index(orig)
            rec = homodyne(st, cur + 1, quad, rng)
            values[orig] = rec.outcome
            st = rec.posterior
            live.pop(cur)

        s_meas = np.zeros(code.m)
        for j in range(c):
            s_meas[j] = sqrt2 * values[j]
            s_meas[c + l + j] = sqrt2 * values[n + j]
        for i in range(l):
            s_meas[c + i] = values[c + i]
        noise[t] = s_meas - s_ideal

        u_prime = np.zeros(2 * n)
        try:
            corr = decode_single_mode(code, s_meas, tol=decode_tol)
            u_prime = corr.u_prime
            if corr.mode_hypothesis == error_mode:
                matches += 1
        except AmbiguousSyndromeError:
            ambiguous += 1
        except DecodeError:
            uncorrectable += 1

        d_corr = to_canonical @ swap_halves(u_prime)
        fix = np.zeros(2 * k)
        fix[:k] = -d_corr[c + l : n]
        fix[k:] = -d_corr[n + c + l : 2 * n]
        st = displace(st, fix)

        residuals[t] = st.mean - data_means
        cov_excess[t] = np.einsum("ij,ij->i", st.factor, st.factor) - 0.5

    return ExperimentStats(
        trials=trials,
        mean_residual=residuals.mean(axis=0),
        residual_variance=residuals.var(axis=0),
        excess_variance=residuals.var(axis=0) + cov_excess.mean(axis=0),
        syndrome_noise_variance=noise.var(axis=0),
        mode_match_rate=matches / trials,
        ambiguity_rate=ambiguous / trials,
        uncorrectable_rate=uncorrectable / trials,
    )
