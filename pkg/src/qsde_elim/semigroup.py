"""Semigroup propagation and convergence certification.

For a scaled model m with elimination result e, the skew generator at
coupling k pairs the limit coefficients on the dagger side with the
instantiated ones on the right:

    Lk(X) = K† X + X K(k) + sum_i L_i† X L_i(k)

and the limit generator uses the limit coefficients on both sides.  The
semigroups exp(t Lk) encode vacuum matrix elements of products of the two
unitary propagators, so the vacuum strong-convergence distance reduces to a
quadratic form evaluated on propagated ground observables:

    ||(U(k)_t - U_t) v (x) vacuum||^2 = <v, (2 I - T_t(P0) - T_t(P0)†) v>.

Coherent states enter through Weyl displacement: a piecewise-constant drive
gives one displaced generator per segment, composed with the earliest segment
outermost:  T(f)_t = T(a_1)_{t1-t0} o ... o T(a_m)_{t-t_{m-1}}.

The Kurtz corrector makes the generator convergence explicit: for a ground
observable X there are X1, X2 with Lk(X + X1/k + X2/k^2) -> L(X) at rate 1/k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ClampExceeded,
    DimensionMismatch,
    InvalidArgument,
    InvalidGroundVector,
)
from .eliminate import EliminationResult, displace_limit, displace_scaled
from .linalg import Projector, as_operator, assemble_superoperator, dagger, expm, unvec, vec
from .model import CoefficientSet, ScaledModel, instantiate

CLAMP_ABORT = 1e-6
GROUND_VECTOR_TOL = 1e-9
DEFAULT_STEPS = 101


@dataclass
class GeneratorPair:
    """Skew and limit generators as superoperator matrices at one coupling."""

    skew: np.ndarray
    limit: np.ndarray
    k: float

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.skew.shape[0])))


@dataclass
class StepDrive:
    """Piecewise-constant drive: amplitudes[j] on [breakpoints[j], breakpoints[j+1])."""

    breakpoints: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float).ravel()
        if bp.size < 2 or bp[0] != 0.0:
            raise InvalidArgument("breakpoints must start at 0 and contain at least one segment")
        if not np.all(np.diff(bp) > 0):
            raise InvalidArgument("breakpoints must be strictly increasing")
        amps = np.atleast_2d(np.asarray(self.amplitudes, dtype=complex))
        if amps.shape[0] != bp.size - 1:
            raise InvalidArgument(
                f"{amps.shape[0]} amplitude rows for {bp.size - 1} segments"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidArgument("drive amplitudes must be finite")
        self.breakpoints = bp
        self.amplitudes = amps

    @property
    def segments(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def horizon(self) -> float:
        return float(self.breakpoints[-1])


@dataclass
class ConvergenceReport:
    """Distances on a (k, t) grid plus per-k suprema and the worst clamp seen."""

    ks: np.ndarray
    t_grid: np.ndarray
    distances: np.ndarray
    sup_distance: np.ndarray
    max_clamp: float = 0.0


def pair_generator(left: CoefficientSet, right: CoefficientSet) -> np.ndarray:
    """Superoperator matrix of X -> left.K† X + X right.K + sum_i left.L_i† X right.L_i."""
    if left.dim != right.dim or left.channels != right.channels:
        raise DimensionMismatch("coefficient sets must share dimension and channel count")
    d = left.dim
    eye = np.eye(d, dtype=complex)
    gen = assemble_superoperator(dagger(left.K), eye) + assemble_superoperator(eye, right.K)
    for i in range(left.channels):
        gen += assemble_superoperator(dagger(left.L[i]), right.L[i])
    return gen


def build_generators(m: ScaledModel, e: EliminationResult, k: float) -> GeneratorPair:
    """Skew generator at coupling k and the limit generator, as matrices."""
    k = float(k)
    if k < 0:
        raise ValueError(f"coupling must be non-negative, got {k}")
    limit = e.limit
    return GeneratorPair(
        skew=pair_generator(limit, instantiate(m, k)),
        limit=pair_generator(limit, limit),
        k=k,
    )


def evolve(generator: np.ndarray, X0, t: float) -> np.ndarray:
    """Apply exp(t * generator) to the operator X0."""
    generator = as_operator(generator, "generator")
    X0 = as_operator(X0, "X0")
    if X0.shape[0] ** 2 != generator.shape[0]:
        raise DimensionMismatch("generator dimension is not the square of the operator dimension")
    t = float(t)
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    if t == 0:
        return X0.copy()
    return unvec(expm(t * generator) @ vec(X0))


def default_ground_vector(P0: Projector) -> np.ndarray:
    """Deterministic unit vector in the ground space.

    The normalized projection of the all-ones vector, falling back to the
    leading eigenvector of P0 when that projection vanishes.
    """
    w = P0.matrix @ np.ones(P0.dim, dtype=complex)
    if np.linalg.norm(w) < 1e-8:
        evals, evecs = np.linalg.eigh(P0.matrix)
        w = evecs[:, -1]
    return w / np.linalg.norm(w)


def _require_ground_vector(v, P1m: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != P1m.shape[0]:
        raise DimensionMismatch(f"vector length {v.size} does not match dimension {P1m.shape[0]}")
    if abs(np.linalg.norm(v) - 1.0) > GROUND_VECTOR_TOL:
        raise InvalidGroundVector(f"vector norm {np.linalg.norm(v):.12g} is not 1")
    leak = float(np.linalg.norm(P1m @ v))
    if leak > GROUND_VECTOR_TOL:
        raise InvalidGroundVector(f"vector has excited-sector component of norm {leak:.3e}")
    return v


def _distance_from_transported(T: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """Distance and clamp magnitude from T = T_t(P0) and a ground vector v."""
    d = T.shape[0]
    q = 2.0 * np.eye(d, dtype=complex) - T - dagger(T)
    val = float(np.real(np.vdot(v, q @ v)))
    clamp = max(0.0, -val)
    if clamp > CLAMP_ABORT:
        raise ClampExceeded(
            f"squared distance came out {val:.3e}; propagation is numerically unreliable"
        )
    return float(np.sqrt(max(val, 0.0))), clamp


def _validate_t_grid(t_grid) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float).ravel()
    if t_grid.size == 0:
        raise ValueError("t_grid must be non-empty")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be non-negative and non-decreasing")
    return t_grid


def _vacuum_curve(gen: np.ndarray, P0m: np.ndarray, v: np.ndarray, t_grid: np.ndarray):
    """Distances along t_grid by stepwise propagation of vec(T_t(P0))."""
    w = vec(P0m).astype(complex)
    cache: dict[float, np.ndarray] = {}
    out = np.empty(t_grid.size, dtype=float)
    max_clamp = 0.0
    prev = 0.0
    for idx, t in enumerate(t_grid):
        dt = float(t - prev)
        if dt > 0:
            M = cache.get(dt)
            if M is None:
                M = expm(dt * gen)
                cache[dt] = M
            w = M @ w
        dist, clamp = _distance_from_transported(unvec(w), v)
        out[idx] = dist
        max_clamp = max(max_clamp, clamp)
        prev = float(t)
    return out, max_clamp


def vacuum_distance(m: ScaledModel, e: EliminationResult, k: float, v, t_grid) -> np.ndarray:
    """Vacuum-field strong-convergence distance along t_grid.

    Returns sqrt(<v, (2I - T_t(P0) - T_t(P0)†) v>) per grid time, where T is
    the skew semigroup at coupling k; tiny negative values of the quadratic
    form are clamped to zero, and a clamp beyond 1e-6 aborts.
    """
    t_grid = _validate_t_grid(t_grid)
    v = _require_ground_vector(v, e.decomposition.P1.matrix)
    gen = build_generators(m, e, k).skew
    dist, _ = _vacuum_curve(gen, e.decomposition.P0.matrix, v, t_grid)
    return dist


class _DrivenPropagator:
    """Transported ground projector under a piecewise-constant drive.

    One displaced skew generator per segment; the composition applies the
    earliest segment as the outermost map, so for t inside segment j

        vec(T(f)_t(P0)) = M_1(D1) ... M_{j-1}(D_{j-1}) M_j(t - t_{j-1}) vec(P0)

    with M_i(s) = exp(s * gen_i) and D_i the full segment durations.
    """

    def __init__(self, m: ScaledModel, e: EliminationResult, k: float, drive: StepDrive):
        limit = e.limit
        self.gens = []
        for alpha in drive.amplitudes:
            md = displace_scaled(m, alpha)
            cd = displace_limit(limit, alpha)
            self.gens.append(pair_generator(cd, instantiate(md, k)))
        self.bps = drive.breakpoints
        self.w0 = vec(e.decomposition.P0.matrix).astype(complex)
        self._cache: dict[tuple[int, float], np.ndarray] = {}

    def _segment_matrix(self, j: int, duration: float) -> np.ndarray:
        key = (j, float(duration))
        M = self._cache.get(key)
        if M is None:
            M = expm(duration * self.gens[j])
            self._cache[key] = M
        return M

    def transported(self, t: float) -> np.ndarray:
        """vec(T(f)_t(P0)) for 0 <= t <= the last breakpoint."""
        t = float(t)
        if t < 0 or t > self.bps[-1] + 1e-12:
            raise InvalidArgument(
                f"t = {t} outside the drive window [0, {self.bps[-1]}]"
            )
        segs: list[tuple[int, float]] = []
        for j in range(len(self.gens)):
            t0, t1 = self.bps[j], self.bps[j + 1]
            if t <= t0 + 1e-15:
                break
            segs.append((j, float(min(t, t1) - t0)))
        w = self.w0
        for j, dur in reversed(segs):
            w = self._segment_matrix(j, dur) @ w
        return w


def coherent_distance(
    m: ScaledModel, e: EliminationResult, k: float, v, drive: StepDrive, t: float
) -> float:
    """Strong-convergence distance against a coherent (step-driven) field state.

    Composes the per-segment displaced skew semigroups (earliest segment
    outermost) and evaluates the same quadratic form as the vacuum distance.
    Requires t within the drive window.
    """
    v = _require_ground_vector(v, e.decomposition.P1.matrix)
    prop = _DrivenPropagator(m, e, float(k), drive)
    dist, _ = _distance_from_transported(unvec(prop.transported(t)), v)
    return dist


def kurtz_corrector(e: EliminationResult, m: ScaledModel, X) -> tuple[np.ndarray, np.ndarray]:
    """First and second order correctors X1, X2 of a ground observable X.

    With L0(Z) = K† Z + Z B + sum_i L_i† Z G_i and L1(Z) = Z A + sum_i L_i† Z F_i
    (K, L_i the limit coefficients),

        X1 = -L1(X) Y1inv P1,   X2 = -(L0(X) + L1(X1)) Y1inv P1.
    """
    X = as_operator(X, "X")
    if X.shape[0] != m.dim:
        raise DimensionMismatch("X dimension does not match the model")
    P0m = e.decomposition.P0.matrix
    scale = max(1.0, float(np.linalg.norm(X)))
    if np.linalg.norm(X - P0m @ X @ P0m) > 1e-9 * scale:
        raise InvalidArgument("X must be supported on the ground sector (X = P0 X P0)")

    K, L = e.limit.K, e.limit.L
    n = m.channels

    def l0(Z):
        acc = dagger(K) @ Z + Z @ m.B
        for i in range(n):
            acc += dagger(L[i]) @ Z @ m.G[i]
        return acc

    def l1(Z):
        acc = Z @ m.A
        for i in range(n):
            acc += dagger(L[i]) @ Z @ m.F[i]
        return acc

    YP = e.decomposition.Y1inv @ e.decomposition.P1.matrix
    X1 = -l1(X) @ YP
    X2 = -(l0(X) + l1(X1)) @ YP
    return X1, X2


@dataclass
class GeneratorResiduals:
    """Corrected and uncorrected generator residuals over a coupling sweep."""

    ks: np.ndarray
    corrected: np.ndarray
    uncorrected: np.ndarray

    def corrected_slope(self) -> float:
        """Log-log slope of the corrected residuals in k; NaN if any residual
        sits at the numerical floor (nothing left to fit)."""
        if np.any(self.corrected <= 1e-300):
            return float("nan")
        return float(np.polyfit(np.log10(self.ks), np.log10(self.corrected), 1)[0])


def _apply_skew(limit: CoefficientSet, inst: CoefficientSet, Z: np.ndarray) -> np.ndarray:
    acc = dagger(limit.K) @ Z + Z @ inst.K
    for i in range(limit.channels):
        acc += dagger(limit.L[i]) @ Z @ inst.L[i]
    return acc


def generator_convergence_check(
    m: ScaledModel, e: EliminationResult, X, ks
) -> GeneratorResiduals:
    """Residuals ||Lk(X + X1/k + X2/k^2) - L(X)|| and ||Lk(X) - L(X)|| per k.

    The corrected residual decays like 1/k when the structural identities
    hold; couplings must be positive.
    """
    ks = np.asarray(ks, dtype=float).ravel()
    if ks.size == 0 or np.any(ks <= 0):
        raise ValueError("ks must be positive couplings")
    X = as_operator(X, "X")
    X1, X2 = kurtz_corrector(e, m, X)
    limit = e.limit
    LX = _apply_skew(limit, limit, X)
    corrected = np.empty(ks.size)
    uncorrected = np.empty(ks.size)
    for idx, k in enumerate(ks):
        inst = instantiate(m, k)
        corrected[idx] = np.linalg.norm(_apply_skew(limit, inst, X + X1 / k + X2 / (k * k)) - LX)
        uncorrected[idx] = np.linalg.norm(_apply_skew(limit, inst, X) - LX)
    return GeneratorResiduals(ks=ks, corrected=corrected, uncorrected=uncorrected)


def k_sweep(
    m: ScaledModel,
    e: EliminationResult,
    v,
    ks,
    horizon: float = 1.0,
    steps: int = DEFAULT_STEPS,
    drive: StepDrive | None = None,
) -> ConvergenceReport:
    """Convergence distances over couplings ks and a uniform grid on [0, horizon].

    Vacuum distances by default; with a drive, coherent distances (the drive
    window must cover the horizon).  Reports per-k suprema and the largest
    clamp applied anywhere in the sweep.
    """
    ks = np.asarray(ks, dtype=float).ravel()
    if ks.size == 0 or np.any(ks < 0):
        raise ValueError("ks must be non-negative couplings")
    horizon = float(horizon)
    steps = int(steps)
    if horizon <= 0 or steps < 2:
        raise ValueError("need horizon > 0 and at least 2 grid points")
    if drive is not None and drive.horizon < horizon - 1e-12:
        raise InvalidArgument(
            f"drive window ends at {drive.horizon}, before the horizon {horizon}"
        )
    t_grid = np.linspace(0.0, horizon, steps)
    v = _require_ground_vector(v, e.decomposition.P1.matrix)
    P0m = e.decomposition.P0.matrix

    distances = np.empty((ks.size, steps))
    max_clamp = 0.0
    for i, k in enumerate(ks):
        if drive is None:
            gen = build_generators(m, e, k).skew
            row, clamp = _vacuum_curve(gen, P0m, v, t_grid)
            distances[i] = row
            max_clamp = max(max_clamp, clamp)
        else:
            prop = _DrivenPropagator(m, e, k, drive)
            for j, t in enumerate(t_grid):
                dist, clamp = _distance_from_transported(unvec(prop.transported(t)), v)
                distances[i, j] = dist
                max_clamp = max(max_clamp, clamp)
    return ConvergenceReport(
        ks=ks,
        t_grid=t_grid,
        distances=distances,
        sup_distance=distances.max(axis=1),
        max_clamp=max_clamp,
    )
