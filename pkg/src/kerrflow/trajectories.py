"""Monte Carlo wave-function (photon-counting jump) unraveling.

Each realization evolves under the non-Hermitian generator
``H_eff = H - (i kappa/2) b^dag b`` without renormalization until the
squared norm crosses a uniform random threshold (the waiting-time method,
which reproduces exact jump-time statistics independent of step size). At
a jump the state is projected with ``b`` and renormalized, a fresh
threshold is drawn, and the evolution continues. Observables are recorded
on a uniform grid using the normalized state.

Propagation is exact: ``H_eff`` is diagonalized once per parameter set and
states advance in its eigenbasis, so there is no step-size error and jump
times can be located by root finding to relative precision 1e-10.
Trajectory ``r`` of an ensemble uses seed ``base_seed + r``, which makes
every record reproducible independent of scheduling or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq

from .errors import ConvergenceError, InvalidParameterError, TruncationError
from .hilbert import FockSpace, StateVector, hamiltonian, vacuum_state
from .model import ModelParams

__all__ = [
    "EnsembleSpec",
    "TrajectoryRecord",
    "JumpPropagator",
    "evolve_trajectory",
    "run_ensemble",
    "ensemble_expectations",
]

JUMP_TIME_RTOL = 1e-10
TRAJ_TAIL_TOL = 1e-8
TAIL_FRACTION = 0.1


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble layout: counts, time grid, seeding, space, initial state."""

    n_traj: int
    t_burn: float
    t_total: float
    dt_s: float
    base_seed: int
    space: FockSpace
    initial_state: StateVector

    def __post_init__(self):
        if self.n_traj < 1:
            raise InvalidParameterError("n_traj must be >= 1")
        if not (self.t_total > self.t_burn >= 0.0):
            raise InvalidParameterError("need t_total > t_burn >= 0")
        if self.dt_s <= 0:
            raise InvalidParameterError("dt_s must be > 0")
        if self.initial_state.space != self.space:
            raise InvalidParameterError("initial state lives in a different space")


@dataclass
class TrajectoryRecord:
    """Time series of one stochastic realization.

    ``x + i y`` is the conditional amplitude Re/Im <b>; ``n`` and ``b2``
    (<b^dag b> and <b^2>) are carried along because ensemble-equivalence
    checks against the master equation need more than one observable.
    """

    seed: int
    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    n: np.ndarray
    b2: np.ndarray
    jump_times: np.ndarray
    final_norm_check: float


class JumpPropagator:
    """Exact no-jump propagator for a fixed (Hamiltonian, kappa, space).

    ``kappa = 0`` is the unitary limit (no jumps ever occur); the Lindblad
    model itself always has kappa > 0, but the propagator supports the
    closed-system limit for validation.
    """

    def __init__(self, h_matrix: np.ndarray, kappa: float, space: FockSpace):
        if kappa < 0:
            raise InvalidParameterError("kappa must be >= 0")
        n = space.dim
        if h_matrix.shape != (n, n):
            raise InvalidParameterError("Hamiltonian shape does not match space")
        self.space = space
        self.kappa = float(kappa)
        levels = np.arange(n, dtype=float)
        h_eff = h_matrix - 0.5j * kappa * np.diag(levels)
        eigvals, right = sla.eig(h_eff)
        try:
            inverse = sla.inv(right)
        except sla.LinAlgError as exc:
            raise ConvergenceError(f"effective Hamiltonian is numerically defective: {exc}")
        residual = (np.linalg.norm((right * eigvals) @ inverse - h_eff)
                    / max(np.linalg.norm(h_eff), 1e-300))
        if residual > 1e-9:
            raise ConvergenceError(
                "eigenbasis factorization of the effective Hamiltonian is inaccurate",
                details={"relative_residual": float(residual)})
        self.eigvals = eigvals
        self.basis = right
        self.basis_inv = inverse
        self.levels = levels
        self.sqrt_n = np.sqrt(levels[1:])
        self.sqrt_b2 = np.sqrt(levels[2:] * (levels[2:] - 1.0)) if n > 2 else np.zeros(0)
        self.tail_start = n - max(1, int(math.ceil(TAIL_FRACTION * n)))

    @classmethod
    def for_params(cls, p: ModelParams, space: FockSpace) -> "JumpPropagator":
        return cls(hamiltonian(p, space).elements, p.kappa, space)

    def _coeffs(self, psi: np.ndarray) -> np.ndarray:
        return self.basis_inv @ psi

    def _state(self, coeffs: np.ndarray, dt: float) -> np.ndarray:
        return self.basis @ (coeffs * np.exp(-1j * self.eigvals * dt))

    def _observe(self, psi: np.ndarray):
        norm2 = float(np.vdot(psi, psi).real)
        normed = psi / math.sqrt(norm2)
        amp = complex(np.vdot(normed[:-1], self.sqrt_n * normed[1:]))
        occ = float(np.vdot(normed, self.levels * normed).real)
        if len(self.sqrt_b2):
            sq = complex(np.vdot(normed[:-2], self.sqrt_b2 * normed[2:]))
        else:
            sq = 0.0 + 0.0j
        tail = float(np.sum(np.abs(normed[self.tail_start:]) ** 2))
        return normed, amp, occ, sq, tail


def evolve_trajectory(spec: EnsembleSpec, p: ModelParams, seed: int,
                      propagator: JumpPropagator = None,
                      tail_tol: float = TRAJ_TAIL_TOL) -> TrajectoryRecord:
    """One quantum-jump realization recorded on the uniform sample grid."""
    if propagator is None:
        propagator = JumpPropagator.for_params(p, spec.space)
    rng = np.random.default_rng(seed)
    psi0 = spec.initial_state.amplitudes.astype(complex)
    nrm = np.linalg.norm(psi0)
    if abs(nrm - 1.0) > 1e-10:
        raise InvalidParameterError("initial state must be normalized")

    n_samp = int(round(spec.t_total / spec.dt_s)) + 1
    times = np.arange(n_samp) * spec.dt_s
    xs = np.zeros(n_samp)
    ys = np.zeros(n_samp)
    ns = np.zeros(n_samp)
    b2s = np.zeros(n_samp, dtype=complex)
    jump_times = []
    norm_err = 0.0

    def draw_threshold():
        r = rng.random()
        while r == 0.0:
            r = rng.random()
        return r

    coeffs = propagator._coeffs(psi0)
    threshold = draw_threshold()

    def record(i, psi):
        nonlocal norm_err
        normed, amp, occ, sq, tail = propagator._observe(psi)
        if tail > tail_tol:
            raise TruncationError(
                f"trajectory tail population {tail:.3e} exceeded {tail_tol:g} "
                f"at t={times[i]:g}; increase the Fock dimension",
                suggested_dim=2 * propagator.space.dim)
        xs[i] = amp.real
        ys[i] = amp.imag
        ns[i] = occ
        b2s[i] = sq
        norm_err = max(norm_err, abs(float(np.vdot(normed, normed).real) - 1.0))

    record(0, propagator.basis @ coeffs)
    for i in range(1, n_samp):
        remaining = spec.dt_s
        while True:
            psi_end = propagator._state(coeffs, remaining)
            norm2 = float(np.vdot(psi_end, psi_end).real)
            if norm2 > threshold:
                coeffs = coeffs * np.exp(-1j * propagator.eigvals * remaining)
                break
            # a jump occurred inside (0, remaining]: locate the crossing
            def excess(dt):
                state = propagator._state(coeffs, dt)
                return float(np.vdot(state, state).real) - threshold

            t_here = times[i] - remaining
            if excess(0.0) <= 0.0:
                jump_at = 0.0
            else:
                jump_at = brentq(excess, 0.0, remaining,
                                 xtol=JUMP_TIME_RTOL * max(t_here, spec.dt_s),
                                 rtol=8.9e-16)
            psi_jump = propagator._state(coeffs, jump_at)
            lowered = np.empty_like(psi_jump)
            lowered[:-1] = propagator.sqrt_n * psi_jump[1:]
            lowered[-1] = 0.0
            nrm = np.linalg.norm(lowered)
            if nrm == 0.0:
                raise ConvergenceError(
                    "jump projected onto the zero vector (state collapsed to vacuum "
                    "with zero amplitude?)")
            coeffs = propagator._coeffs(lowered / nrm)
            jump_times.append(t_here + jump_at)
            threshold = draw_threshold()
            remaining -= jump_at
            if remaining <= 0.0:
                break
        record(i, propagator.basis @ coeffs)

    return TrajectoryRecord(
        seed=seed,
        times=times,
        x=xs,
        y=ys,
        n=ns,
        b2=b2s,
        jump_times=np.asarray(jump_times),
        final_norm_check=norm_err,
    )


_WORKER_STATE = {}


def _ensemble_worker(args):
    key, spec, params, seed = args
    prop = _WORKER_STATE.get(key)
    if prop is None:
        prop = JumpPropagator.for_params(params, spec.space)
        _WORKER_STATE[key] = prop
    return evolve_trajectory(spec, params, seed, propagator=prop)


def run_ensemble(spec: EnsembleSpec, p: ModelParams, workers: int = 1):
    """All ``spec.n_traj`` realizations, trajectory r seeded base_seed + r.

    Results are bitwise independent of ``workers``; per-trajectory failures
    are re-raised with the trajectory index attached.
    """
    seeds = [spec.base_seed + r for r in range(spec.n_traj)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        key = (id(spec), spec.space.dim)
        jobs = [(key, spec, p, s) for s in seeds]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            try:
                return list(pool.map(_ensemble_worker, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
            except (TruncationError, ConvergenceError):
                raise
    propagator = JumpPropagator.for_params(p, spec.space)
    records = []
    for idx, seed in enumerate(seeds):
        try:
            records.append(evolve_trajectory(spec, p, seed, propagator=propagator))
        except (TruncationError, ConvergenceError) as exc:
            raise type(exc)(f"trajectory {idx} (seed {seed}): {exc}") from exc
    return records


def ensemble_expectations(records):
    """Ensemble mean and standard error of the recorded observables.

    Returns a dict with ``times`` plus (mean, standard-error) pairs for the
    amplitude <b>, occupation <n>, and <b^2>.
    """
    if not records:
        raise InvalidParameterError("no trajectory records given")
    times = records[0].times
    amp = np.array([rec.x + 1j * rec.y for rec in records])
    occ = np.array([rec.n for rec in records])
    bsq = np.array([rec.b2 for rec in records])
    m = len(records)
    out = {"times": times, "n_traj": m}
    for name, data in (("b", amp), ("n", occ), ("b2", bsq)):
        out[name] = data.mean(axis=0)
        if m > 1:
            out[name + "_err"] = data.std(axis=0, ddof=1) / math.sqrt(m)
        else:
            out[name + "_err"] = np.full_like(times, np.nan, dtype=float)
    return out
