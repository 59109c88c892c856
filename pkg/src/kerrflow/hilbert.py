"""Truncated-Fock-space quantum mechanics for the driven Kerr resonator.

Operators, the Hamiltonian, the Lindblad generator as a sparse
superoperator, steady states, spectral decompositions, observables, and
Wigner functions.

Vectorization convention (fixed once; every superoperator in this package
uses it): COLUMN stacking, ``vec(rho) = rho.reshape(-1, order='F')``, for
which ``vec(A @ X @ B) = kron(B.T, A) @ vec(X)``. Matrices are recovered
with ``x.reshape((N, N), order='F')``.

Quadrature operators follow the convention of :mod:`kerrflow.model`:
``X = (b + b^dag)/2`` and ``Y = (b - b^dag)/(2i)``, so ``<X> = Re Tr[rho b]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.linalg as sla
from scipy.sparse.linalg import splu, eigs, ArpackNoConvergence

from .errors import (
    ConvergenceError,
    DegenerateSteadyStateError,
    InvalidParameterError,
    ResourceCapError,
    TruncationError,
)
from .model import ModelParams

__all__ = [
    "FockSpace",
    "OperatorMatrix",
    "StateVector",
    "DensityMatrix",
    "LiouvillianSpectrum",
    "WignerGrid",
    "annihilation",
    "number_op",
    "quadrature_ops",
    "hamiltonian",
    "liouvillian",
    "steady_state",
    "liouvillian_spectrum",
    "rssp",
    "wigner",
    "choose_truncation",
    "vacuum_state",
    "coherent_state",
]

POSITIVITY_TOL = 1e-8     # most negative admissible eigenvalue of a state
TAIL_TOL = 1e-8           # max population in the top 10% of Fock levels
TAIL_FRACTION = 0.1
HARD_DIM_CAP = 640        # auto-doubling never exceeds this dimension
TRUNCATION_COEFFS = (1.5, 6.0, 10.0)


@dataclass(frozen=True)
class FockSpace:
    """A truncated bosonic Hilbert space with levels |0> ... |dim-1>."""

    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidParameterError(f"Fock dimension must be >= 2, got {self.dim}")


@dataclass(frozen=True)
class OperatorMatrix:
    space: FockSpace
    elements: np.ndarray

    def __post_init__(self):
        n = self.space.dim
        if self.elements.shape != (n, n):
            raise InvalidParameterError("operator shape does not match its space")
        if not np.all(np.isfinite(self.elements.view(float))):
            raise InvalidParameterError("operator has non-finite entries")


@dataclass(frozen=True)
class StateVector:
    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (self.space.dim,):
            raise InvalidParameterError("state shape does not match its space")

    def normalized(self) -> "StateVector":
        nrm = np.linalg.norm(self.amplitudes)
        if nrm == 0:
            raise InvalidParameterError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / nrm)


@dataclass(frozen=True)
class DensityMatrix:
    """A trace-one Hermitian positive state on a truncated Fock space."""

    space: FockSpace
    rho: np.ndarray

    def __post_init__(self):
        n = self.space.dim
        if self.rho.shape != (n, n):
            raise InvalidParameterError("density matrix shape does not match its space")

    def validate(self, herm_tol: float = 1e-10, trace_tol: float = 1e-10,
                 positivity_tol: float = POSITIVITY_TOL):
        if np.max(np.abs(self.rho - self.rho.conj().T)) > herm_tol:
            raise InvalidParameterError("density matrix is not Hermitian")
        if abs(np.trace(self.rho).real - 1.0) > trace_tol:
            raise InvalidParameterError("density matrix trace differs from 1")
        evals = np.linalg.eigvalsh(self.rho)
        if evals.min() < -positivity_tol:
            raise InvalidParameterError(
                f"density matrix has eigenvalue {evals.min():.3e} below -{positivity_tol:g}")
        return self

    def tail_population(self, fraction: float = TAIL_FRACTION) -> float:
        """Total population of the highest ``fraction`` of Fock levels."""
        n = self.space.dim
        start = n - max(1, int(math.ceil(fraction * n)))
        return float(np.sum(np.diag(self.rho).real[start:]))

    def check_tail(self, fraction: float = TAIL_FRACTION, tol: float = TAIL_TOL):
        tail = self.tail_population(fraction)
        if tail > tol:
            raise TruncationError(
                f"tail population {tail:.3e} exceeds {tol:g}; increase the Fock dimension",
                suggested_dim=2 * self.space.dim)
        return tail


@dataclass
class LiouvillianSpectrum:
    """Leading Lindblad eigenmodes with biorthonormal left/right operators.

    Eigenvalues are sorted by descending real part, so ``eigenvalues[0]`` is
    the steady-state eigenvalue (numerically zero). Pairs satisfy
    ``Tr[l_j^dag r_k] = delta_jk``.
    """

    space: FockSpace
    eigenvalues: np.ndarray
    right_ops: np.ndarray   # (k, N, N)
    left_ops: np.ndarray    # (k, N, N)
    metadata: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        """|Re lambda_1|: decay rate of the slowest nonzero mode."""
        if len(self.eigenvalues) < 2:
            raise InvalidParameterError("spectrum holds fewer than 2 modes")
        return float(-self.eigenvalues[1].real)


@dataclass
class WignerGrid:
    """Wigner function sampled on a rectangular phase-space grid.

    Axes are in scaled units (amplitude divided by sqrt(aleph)); ``values``
    are the standard quasi-probability normalized to unit integral in
    UNSCALED units, hence the grid integral equals 1/aleph.
    """

    x_axis: np.ndarray
    y_axis: np.ndarray
    values: np.ndarray      # shape (len(y_axis), len(x_axis))
    aleph: float
    boundary_flag: bool = False

    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.x_axis, axis=1), self.y_axis))


def annihilation(space: FockSpace) -> OperatorMatrix:
    """Ladder matrix with <n-1|b|n> = sqrt(n)."""
    n = space.dim
    mat = np.zeros((n, n), dtype=complex)
    mat[np.arange(n - 1), np.arange(1, n)] = np.sqrt(np.arange(1, n))
    return OperatorMatrix(space, mat)


def number_op(space: FockSpace) -> OperatorMatrix:
    return OperatorMatrix(space, np.diag(np.arange(space.dim, dtype=float)).astype(complex))


def quadrature_ops(space: FockSpace):
    """(X, Y) with X = (b + b^dag)/2, Y = (b - b^dag)/(2i)."""
    b = annihilation(space).elements
    bd = b.conj().T
    return OperatorMatrix(space, 0.5 * (b + bd)), OperatorMatrix(space, (b - bd) / 2j)


def vacuum_state(space: FockSpace) -> StateVector:
    amp = np.zeros(space.dim, dtype=complex)
    amp[0] = 1.0
    return StateVector(space, amp)


def coherent_state(space: FockSpace, alpha: complex) -> StateVector:
    """Truncated coherent state, renormalized on the truncated space."""
    amp = np.zeros(space.dim, dtype=complex)
    term = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(space.dim):
        amp[n] = term
        term = term * alpha / math.sqrt(n + 1)
    return StateVector(space, amp).normalized()


def hamiltonian(p: ModelParams, space: FockSpace) -> OperatorMatrix:
    """Rotating-frame Hamiltonian: (-delta+u) n + (u/2) b^dag^2 b^2
    + (g/2)(b^dag^2 + b^2) + f (b^dag e^{-i phi} + b e^{i phi})."""
    b = annihilation(space).elements
    bd = b.conj().T
    nmat = bd @ b
    h = ((-p.delta + p.u) * nmat
         + 0.5 * p.u * (bd @ bd @ b @ b)
         + 0.5 * p.g * (bd @ bd + b @ b)
         + p.f * (bd * np.exp(-1j * p.phi) + b * np.exp(1j * p.phi)))
    return OperatorMatrix(space, h)


def liouvillian(p: ModelParams, space: FockSpace) -> sp.csc_matrix:
    """Sparse matrix of rho -> -i[H, rho] + kappa D[b] rho in the
    column-stacking convention (see module docstring)."""
    n = space.dim
    h = sp.csr_matrix(hamiltonian(p, space).elements)
    b = sp.csr_matrix(annihilation(space).elements)
    num = (b.conj().T @ b).tocsr()
    eye = sp.identity(n, format="csr", dtype=complex)
    lind = (-1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
            + p.kappa * (sp.kron(b.conj(), b)
                         - 0.5 * sp.kron(eye, num)
                         - 0.5 * sp.kron(num.T, eye)))
    return lind.tocsc()


def _trace_functional(n: int) -> np.ndarray:
    vec = np.zeros(n * n, dtype=complex)
    vec[np.arange(n) * (n + 1)] = 1.0
    return vec


def steady_state(lind: sp.spmatrix, space: FockSpace,
                 residual_tol: float = 1e-10,
                 enforce_tail: bool = False) -> DensityMatrix:
    """Solve L rho = 0 with Tr rho = 1 by trace-row replacement + sparse LU.

    The first row of L is replaced by the vectorized trace functional and
    the system solved directly; the result is Hermitized, checked for
    positivity (eigenvalues below -1e-8 are an error, small negatives are
    clipped), renormalized, and its Lindblad residual verified.
    """
    n = space.dim
    a = lind.tolil(copy=True)
    a[0, :] = _trace_functional(n)
    rhs = np.zeros(n * n, dtype=complex)
    rhs[0] = 1.0
    try:
        lu = splu(a.tocsc())
        x = lu.solve(rhs)
    except RuntimeError as exc:
        raise DegenerateSteadyStateError(
            f"steady-state linear system is singular beyond trace replacement: {exc}")
    if not np.all(np.isfinite(x.view(float))):
        raise DegenerateSteadyStateError(
            "steady-state solve produced non-finite entries (degenerate kernel?)")
    rho = x.reshape((n, n), order="F")
    rho = 0.5 * (rho + rho.conj().T)
    evals, evecs = np.linalg.eigh(rho)
    if evals.min() < -POSITIVITY_TOL:
        raise ConvergenceError(
            f"steady state has eigenvalue {evals.min():.3e} below -{POSITIVITY_TOL:g}; "
            "the truncation is inadequate",
            details={"min_eigenvalue": float(evals.min())})
    evals = np.clip(evals, 0.0, None)
    rho = (evecs * evals) @ evecs.conj().T
    rho /= np.trace(rho).real
    residual = np.max(np.abs(lind @ rho.reshape(-1, order="F")))
    if residual > residual_tol:
        raise ConvergenceError(
            f"steady-state residual {residual:.3e} exceeds {residual_tol:g}",
            details={"residual": float(residual)})
    state = DensityMatrix(space, rho)
    if enforce_tail:
        state.check_tail()
    return state


def _biorthonormalize(evals, vl, vr, cluster_tol=1e-9):
    """Scale left vectors so that vl[:,j]^H vr[:,k] = delta_jk, handling
    near-degenerate clusters with a small linear solve."""
    order = np.lexsort((np.abs(evals.imag), evals.imag, -evals.real))
    evals = evals[order]
    vl = vl[:, order]
    vr = vr[:, order]
    k = len(evals)
    i = 0
    while i < k:
        j = i + 1
        while j < k and abs(evals[j] - evals[i]) < cluster_tol * max(1.0, abs(evals[i])):
            j += 1
        block = slice(i, j)
        m = vl[:, block].conj().T @ vr[:, block]
        try:
            correction = np.linalg.inv(m).conj().T
        except np.linalg.LinAlgError:
            raise ConvergenceError(
                "biorthonormalization failed on a degenerate eigenvalue cluster",
                details={"eigenvalues": evals[block].tolist()})
        vl[:, block] = vl[:, block] @ correction
        i = j
    return evals, vl, vr


def liouvillian_spectrum(lind: sp.spmatrix, space: FockSpace, k: int,
                         dense_cutoff: int = 40) -> LiouvillianSpectrum:
    """The k Lindblad eigenvalues with largest real parts, plus
    biorthonormal left/right eigen-operators.

    Dense LAPACK path for dim <= ``dense_cutoff``; shift-invert ARPACK
    (shift slightly inside the positive half-plane, where the generator has
    no spectrum) above. The zero mode is normalized so that the right
    operator has unit trace and the left operator is the identity.
    """
    n = space.dim
    if k < 2:
        raise InvalidParameterError("at least 2 modes are required")
    k = min(k, n * n)
    if n <= dense_cutoff:
        dense = lind.toarray()
        evals, vl, vr = sla.eig(dense, left=True, right=True)
        if k < n * n:
            # keep a few extra modes so degenerate clusters are not split
            keep = np.argsort(-evals.real)[: min(k + 8, n * n)]
            evals, vl, vr = evals[keep], vl[:, keep], vr[:, keep]
        solver = "dense"
    else:
        if k >= n * n - 1:
            raise InvalidParameterError("k too large for the iterative solver")
        # small positive real shift: strictly outside the spectrum (Re <= 0),
        # so the shifted system is nonsingular while targeting slow modes
        diag_scale = np.abs(lind.diagonal().real)
        nz = diag_scale[diag_scale > 0]
        sigma = 1e-3 * float(np.median(nz)) if len(nz) else 1e-6
        try:
            evals, vr = eigs(lind, k=k, sigma=sigma, which="LM")
            evals_l, vl = eigs(lind.conj().T.tocsc(), k=k, sigma=np.conj(sigma), which="LM")
        except ArpackNoConvergence as exc:
            raise ConvergenceError(
                "iterative eigensolver did not converge",
                details={"converged": len(getattr(exc, "eigenvalues", []))})
        # pair left vectors (eigenvalues of L^H are conjugates of L's)
        used = set()
        vl_paired = np.zeros_like(vl)
        for idx, lam in enumerate(evals):
            dists = np.abs(evals_l.conj() - lam)
            for cand in np.argsort(dists):
                if cand not in used:
                    break
            if dists[cand] > 1e-6 * max(1.0, abs(lam)):
                raise ConvergenceError(
                    "could not pair left and right eigenvectors",
                    details={"eigenvalue": complex(lam), "best_match_distance": float(dists[cand])})
            used.add(cand)
            vl_paired[:, idx] = vl[:, cand]
        vl = vl_paired
        solver = "shift-invert"
    evals, vl, vr = _biorthonormalize(evals, vl, vr)
    evals, vl, vr = evals[:k], vl[:, :k], vr[:, :k]
    if abs(evals[0]) > 1e-9:
        raise ConvergenceError(
            f"leading eigenvalue {evals[0]:.3e} is not numerically zero",
            details={"lambda0": complex(evals[0])})
    # canonical zero-mode normalization: Tr r_0 = 1, l_0 = identity
    r0 = vr[:, 0].reshape((n, n), order="F")
    tr0 = np.trace(r0)
    vr[:, 0] /= tr0
    vl[:, 0] *= np.conj(tr0)
    right_ops = np.transpose(vr.reshape((n, n, k), order="F"), (2, 0, 1))
    left_ops = np.transpose(vl.reshape((n, n, k), order="F"), (2, 0, 1))
    return LiouvillianSpectrum(
        space=space,
        eigenvalues=evals,
        right_ops=right_ops,
        left_ops=left_ops,
        metadata={"solver": solver, "k": k},
    )


def rssp(rho0: DensityMatrix, aleph: float) -> float:
    """Steady-state population rescaled by the quantum-fluctuation scale:
    Tr[b^dag b rho] / aleph."""
    if aleph <= 0:
        raise InvalidParameterError("aleph must be > 0")
    pops = np.diag(rho0.rho).real
    return float(np.dot(pops, np.arange(rho0.space.dim)) / aleph)


def _wigner_clenshaw(rho: np.ndarray, a2: np.ndarray) -> np.ndarray:
    """Evaluate (2/pi) e^{-|a2|^2/2} sum_L c_L a2^L / sqrt(L!) with the
    Clenshaw recurrence over the Laguerre series on each diagonal of rho."""
    n = rho.shape[0]
    babs2 = np.abs(a2) ** 2
    w = 2.0 * rho[0, -1] * np.ones_like(a2)
    for ell in range(n - 2, -1, -1):
        diag = np.diag(rho, ell).copy()
        if ell > 0:
            diag *= 2.0
        w = _laguerre_series(ell, babs2, diag) + w * a2 / math.sqrt(ell + 1)
    return (w.real * np.exp(-0.5 * babs2) * (2.0 / math.pi)).astype(float)


def _laguerre_series(ell: int, x: np.ndarray, coeffs: np.ndarray):
    """Clenshaw evaluation of sum_n c_n (-1)^n sqrt(ell!n!/(ell+n)!) L_n^ell(x)."""
    if len(coeffs) == 1:
        y0 = coeffs[0]
        y1 = 0.0
    elif len(coeffs) == 2:
        y0, y1 = coeffs[0], coeffs[1]
    else:
        m = len(coeffs)
        y0, y1 = coeffs[-2], coeffs[-1]
        for i in range(3, len(coeffs) + 1):
            m -= 1
            y0, y1 = (coeffs[-i] - y1 * math.sqrt(((m - 1.0) * (ell + m - 1.0)) / ((ell + m) * m)),
                      y0 - y1 * ((ell + 2.0 * m - 1.0) - x) / math.sqrt((ell + m) * m))
    return y0 - y1 * ((ell + 1.0) - x) / math.sqrt(ell + 1.0)


def wigner(rho0: DensityMatrix, x_axis, y_axis, aleph: float = 1.0,
           boundary_tol: float = 1e-4) -> WignerGrid:
    """Wigner function on a grid given in scaled units (amplitude/sqrt(aleph)).

    Evaluated by the Laguerre-series recurrence (numerically stable Clenshaw
    summation applied to the displaced-parity expansion), pointwise on an
    arbitrary grid. Sets ``boundary_flag`` when the probability mass on the
    grid perimeter exceeds ``boundary_tol`` (grid likely too small).
    """
    if aleph <= 0:
        raise InvalidParameterError("aleph must be > 0")
    x_axis = np.asarray(x_axis, dtype=float)
    y_axis = np.asarray(y_axis, dtype=float)
    xx, yy = np.meshgrid(x_axis, y_axis)
    alpha = math.sqrt(aleph) * (xx + 1j * yy)
    values = _wigner_clenshaw(rho0.rho, 2.0 * alpha)
    # perimeter mass in scaled-grid measure relative to 1/aleph total
    if values.shape[0] > 2 and values.shape[1] > 2:
        dx = x_axis[1] - x_axis[0] if len(x_axis) > 1 else 1.0
        dy = y_axis[1] - y_axis[0] if len(y_axis) > 1 else 1.0
        edge = (np.sum(np.abs(values[0, :])) + np.sum(np.abs(values[-1, :]))
                + np.sum(np.abs(values[1:-1, 0])) + np.sum(np.abs(values[1:-1, -1])))
        boundary_mass = edge * dx * dy * aleph
    else:
        boundary_mass = float("inf")
    return WignerGrid(x_axis=x_axis, y_axis=y_axis, values=values, aleph=aleph,
                      boundary_flag=bool(boundary_mass > boundary_tol))


def choose_truncation(p: ModelParams, aleph: float,
                      coeffs=TRUNCATION_COEFFS, cap: int = HARD_DIM_CAP) -> FockSpace:
    """Pick a Fock dimension from the semiclassical amplitudes:
    N = ceil(c1 * n_max + c2 * sqrt(n_max) + c3) with n_max the largest
    fixed-point occupation (in unscaled units). The tail check after any
    state computation triggers doubling, capped at ``cap``."""
    from .semiclassics import fixed_points  # local import to avoid a cycle
    if aleph <= 0:
        raise InvalidParameterError("aleph must be > 0")
    try:
        n_max = max((fp.n0 for fp in fixed_points(p)), default=0.0)
    except Exception:
        n_max = 0.0
    c1, c2, c3 = coeffs
    dim = int(math.ceil(c1 * n_max + c2 * math.sqrt(max(n_max, 0.0)) + c3))
    dim = max(dim, 2)
    if dim > cap:
        raise ResourceCapError(
            f"required Fock dimension {dim} exceeds the hard cap {cap}")
    return FockSpace(dim)


def steady_state_auto(p: ModelParams, aleph: float,
                      cap: int = HARD_DIM_CAP):
    """Steady state with automatic dimension doubling until the Fock tail
    check passes; returns (DensityMatrix, FockSpace)."""
    space = choose_truncation(p, aleph, cap=cap)
    while True:
        try:
            rho = steady_state(liouvillian(p, space), space)
            rho.check_tail()
            return rho, space
        except (TruncationError, ConvergenceError):
            new_dim = 2 * space.dim
            if new_dim > cap:
                raise ResourceCapError(
                    f"Fock dimension doubling exceeded the hard cap {cap}")
            space = FockSpace(new_dim)
