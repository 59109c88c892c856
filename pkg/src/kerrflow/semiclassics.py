"""Mean-field flow of the driven Kerr resonator: fixed points, stability,
chirality, saddle-to-attractor connectivity, and topology phase diagrams.

The mean-field amplitude beta = <b> obeys

    d beta / dt = -i [ (-delta - i kappa/2 + u |beta|^2) beta
                       + g beta* + f e^{-i phi} ],

a two-dimensional flow in (X, Y) = (Re beta, Im beta). Its divergence is
identically -kappa, so the flow is uniformly contracting: there are no
repellors, and #attractors - #saddles = 1 away from bifurcations.

Fixed points are found by eliminating the phase: with n = |beta|^2 and
A(n) = -delta - i kappa/2 + u n, the stationary condition and its conjugate
form the linear system

    A beta + g beta* = -f e^{-i phi},
    g beta + A* beta* = -f e^{+i phi},

whose solution beta(n) substituted into |beta(n)|^2 = n yields a real
polynomial in n of degree <= 5. All roots come from the companion matrix of
that polynomial, are reconstructed, and are polished by damped Newton in
the full 2D system. The singular case |A|^2 = g^2 (which always occurs for
f = 0) is handled separately.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConvergenceError, EscapeError, InvalidParameterError
from .model import ModelParams

__all__ = [
    "FPClass",
    "Chirality",
    "RegionLabel",
    "FixedPoint",
    "FlowField",
    "FlowGraph",
    "mean_field_rhs",
    "fixed_points",
    "linearize",
    "classify",
    "integrate_flow",
    "flow_graph",
    "phase_diagram",
]

RESIDUAL_TOL = 1e-10          # max |rhs| at a reported fixed point
DEGENERACY_TOL_KAPPA = 1e-8   # stability tolerance, in units of kappa
ESCAPE_RADIUS = 1e3           # |beta| beyond this aborts an integration
MANIFOLD_OFFSET = 1e-4        # unstable-manifold launch offset (times scale)
CAPTURE_FRACTION = 1e-2       # capture radius as fraction of attractor spacing
DWELL_OVER_KAPPA = 10.0       # dwell time inside the capture radius, in 1/kappa


class FPClass(Enum):
    ATTRACTOR = "attractor"
    SADDLE = "saddle"
    MARGINAL = "marginal"


class Chirality(Enum):
    CW = "cw"
    CCW = "ccw"
    NON_SPIRALING = "non_spiraling"
    UNDEFINED = "undefined"


class RegionLabel(Enum):
    """Topology classes of the flow, named by fixed-point count.

    The two five-point classes share the fixed-point multiset (two CW
    attractors, one CCW attractor, two saddles) and differ only in how the
    CCW attractor connects to the saddles: in R5B exactly one saddle sends
    an unstable-manifold branch into it, in R5A both do.
    """

    R1 = "1"
    R3A = "3a"
    R3B = "3b"
    R5A = "5a"
    R5B = "5b"
    BOUNDARY = "boundary"
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class FixedPoint:
    """A stationary point of the mean-field flow with its local data."""

    beta0: complex
    n0: float
    jacobian: np.ndarray
    eigenvalues: tuple
    fp_class: FPClass
    chirality: Chirality

    @property
    def is_attractor(self):
        return self.fp_class is FPClass.ATTRACTOR

    @property
    def is_saddle(self):
        return self.fp_class is FPClass.SADDLE


@dataclass(frozen=True)
class FlowField:
    """The mean-field vector flow for a fixed parameter set."""

    params: ModelParams

    def velocity(self, beta: complex) -> complex:
        return mean_field_rhs(beta, self.params)

    def velocity_xy(self, x: float, y: float):
        v = mean_field_rhs(complex(x, y), self.params)
        return v.real, v.imag


@dataclass
class FlowGraph:
    """Fixed points plus saddle-to-attractor connectivity and the region label.

    ``edges`` holds (saddle_index, attractor_index) pairs, two per saddle
    (one per unstable-manifold branch); indices refer to ``nodes``.
    """

    nodes: list
    edges: list
    region_label: RegionLabel
    diagnostics: dict = field(default_factory=dict)

    @property
    def attractors(self):
        return [fp for fp in self.nodes if fp.is_attractor]

    @property
    def saddles(self):
        return [fp for fp in self.nodes if fp.is_saddle]


def mean_field_rhs(beta: complex, p: ModelParams) -> complex:
    """Right-hand side d beta/dt of the mean-field equation of motion."""
    return -1j * ((-p.delta - 0.5j * p.kappa + p.u * (beta.real * beta.real + beta.imag * beta.imag)) * beta
                  + p.g * beta.conjugate()
                  + p.f * cmath.exp(-1j * p.phi))


def linearize(beta: complex, p: ModelParams) -> np.ndarray:
    """Jacobian of the real flow (dX/dt, dY/dt) at ``beta``.

    Built from the analytic derivatives of the complex velocity v with
    respect to (beta, beta*):  c = dv/dbeta, d = dv/dbeta*.
    """
    n = beta.real * beta.real + beta.imag * beta.imag
    c = -1j * (-p.delta - 0.5j * p.kappa + 2.0 * p.u * n)
    d = -1j * (p.u * beta * beta + p.g)
    return np.array([[c.real + d.real, d.imag - c.imag],
                     [c.imag + d.imag, c.real - d.real]])


def classify(jacobian: np.ndarray, degeneracy_tol: float = 1e-9):
    """Classify a 2x2 Jacobian into (FPClass, Chirality).

    Attractor requires both eigenvalue real parts below ``-degeneracy_tol``;
    saddle requires ``det < -degeneracy_tol**2``. Anything inside the
    tolerance band is MARGINAL (the caller treats the point as sitting on a
    phase boundary). For a complex eigenvalue pair the rotation sense of the
    linear flow is counterclockwise iff J[1,0] - J[0,1] > 0.
    """
    j00, j01 = float(jacobian[0][0]), float(jacobian[0][1])
    j10, j11 = float(jacobian[1][0]), float(jacobian[1][1])
    if not all(math.isfinite(v) for v in (j00, j01, j10, j11)):
        raise InvalidParameterError("non-finite Jacobian")
    tr = j00 + j11
    det = j00 * j11 - j01 * j10
    disc = tr * tr - 4.0 * det
    tol = float(degeneracy_tol)

    if det < -tol * tol:
        return FPClass.SADDLE, Chirality.UNDEFINED

    # max real part of the eigenvalue pair
    if disc < 0.0:
        max_re = 0.5 * tr
    else:
        max_re = 0.5 * (tr + math.sqrt(max(disc, 0.0)))

    if det > tol * tol and max_re < -tol:
        if disc < 0.0:
            chirality = Chirality.CCW if (j10 - j01) > 0.0 else Chirality.CW
        else:
            chirality = Chirality.NON_SPIRALING
        return FPClass.ATTRACTOR, chirality
    return FPClass.MARGINAL, Chirality.UNDEFINED


def _eigenvalues_2x2(jacobian):
    j00, j01 = float(jacobian[0][0]), float(jacobian[0][1])
    j10, j11 = float(jacobian[1][0]), float(jacobian[1][1])
    tr = j00 + j11
    det = j00 * j11 - j01 * j10
    disc = complex(tr * tr - 4.0 * det)
    root = cmath.sqrt(disc)
    mu1 = 0.5 * (tr + root)
    mu2 = 0.5 * (tr - root)
    return tuple(sorted((mu1, mu2), key=lambda m: (-m.real, m.imag)))


def _stationarity_polynomial(p: ModelParams) -> np.ndarray:
    """Coefficients (low to high) of the real polynomial in n = |beta|^2."""
    c2, s2 = math.cos(2.0 * p.phi), math.sin(2.0 * p.phi)
    quarter_k2 = 0.25 * p.kappa * p.kappa
    # Q(n) = (u n - delta)^2 + kappa^2/4
    q = np.array([p.delta * p.delta + quarter_k2, -2.0 * p.u * p.delta, p.u * p.u])
    dd = q.copy()
    dd[0] -= p.g * p.g
    r = q.copy()
    r[0] += p.g * p.g + 2.0 * p.g * p.delta * c2 - p.g * p.kappa * s2
    r[1] += -2.0 * p.g * p.u * c2
    poly = np.polynomial.polynomial.polymul(np.polynomial.polynomial.polymul(dd, dd), [0.0, 1.0])
    poly[:3] -= p.f * p.f * r
    return poly


def _singularity(n: float, p: ModelParams) -> float:
    """|A(n)|^2 - g^2: the determinant of the phase-elimination system."""
    ar = p.u * n - p.delta
    return ar * ar + 0.25 * p.kappa * p.kappa - p.g * p.g


def _beta_from_occupation(n: float, p: ModelParams) -> complex:
    a_conj = complex(p.u * n - p.delta, 0.5 * p.kappa)
    return p.f * (p.g * cmath.exp(1j * p.phi) - a_conj * cmath.exp(-1j * p.phi)) / _singularity(n, p)


def _newton_polish(beta: complex, p: ModelParams, tol: float = 1e-12, max_iter: int = 60):
    """Damped Newton on the 2D real system; returns (beta, residual)."""
    res = abs(mean_field_rhs(beta, p))
    for _ in range(max_iter):
        if res < tol:
            break
        v = mean_field_rhs(beta, p)
        jac = linearize(beta, p)
        det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
        if det == 0.0:
            break
        dx = (-v.real * jac[1, 1] + v.imag * jac[0, 1]) / det
        dy = (-jac[0, 0] * v.imag + jac[1, 0] * v.real) / det
        step = complex(dx, dy)
        lam = 1.0
        improved = False
        for _ in range(12):
            cand = beta + lam * step
            cand_res = abs(mean_field_rhs(cand, p))
            if cand_res < res:
                beta, res = cand, cand_res
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    return beta, res


def _dedupe(betas, tol=1e-6):
    uniq = []
    for b in betas:
        if all(abs(b - u) > tol * max(1.0, abs(u)) for u in uniq):
            uniq.append(b)
    return uniq


def _seed_radius(p: ModelParams) -> float:
    r = 1.0
    if p.u != 0.0:
        r = max(r, math.sqrt(abs(p.delta) / abs(p.u)), (p.f / abs(p.u)) ** (1.0 / 3.0))
    else:
        denom = max(abs(p.delta), p.kappa)
        r = max(r, p.f / denom if denom > 0 else 1.0)
    return 3.0 * r


def _multistart_roots(p: ModelParams, n_grid: int = 25):
    """Damped-Newton search seeded from a grid over a disk; production
    fallback for the phase-elimination singularity."""
    radius = _seed_radius(p)
    xs = np.linspace(-radius, radius, n_grid)
    xx, yy = np.meshgrid(xs, xs)
    seeds = (xx + 1j * yy).ravel()
    seeds = seeds[np.abs(seeds) <= radius]
    found = []
    for s in seeds:
        b, res = _newton_polish(complex(s), p, tol=1e-12, max_iter=40)
        if res < RESIDUAL_TOL:
            found.append(b)
    return _dedupe(found)


def _roots_f_zero(p: ModelParams):
    """Analytic fixed points for f = 0: the origin, plus the symmetric pair
    on the |A(n)| = g circle when the two-photon drive beats the loss."""
    roots = [0.0 + 0.0j]
    if p.u != 0.0 and p.g * p.g > 0.25 * p.kappa * p.kappa:
        s = math.sqrt(p.g * p.g - 0.25 * p.kappa * p.kappa)
        for sign in (+1.0, -1.0):
            n = (p.delta + sign * s) / p.u
            if n <= 0.0:
                continue
            a = complex(p.u * n - p.delta, -0.5 * p.kappa)
            theta = 0.5 * cmath.phase(-p.g / a)
            amp = math.sqrt(n) * cmath.exp(1j * theta)
            roots.extend([amp, -amp])
    return roots


def fixed_points(p: ModelParams, residual_tol: float = RESIDUAL_TOL):
    """All stationary points of the mean-field flow, classified.

    Returns a list of :class:`FixedPoint` sorted by occupation ``n0``.
    Roots come from the degree-<=5 occupation polynomial (companion-matrix
    eigenvalues) and are Newton-polished in the full 2D system to a
    residual below ``residual_tol``.
    """
    if p.kappa <= 0:
        raise InvalidParameterError("kappa must be > 0")

    if p.f == 0.0:
        candidates = _roots_f_zero(p)
    else:
        poly = _stationarity_polynomial(p)
        scale = np.max(np.abs(poly))
        if scale == 0.0:
            raise ConvergenceError("degenerate stationarity polynomial")
        trimmed = np.trim_zeros(np.where(np.abs(poly) > 1e-14 * scale, poly, 0.0), "b")
        if len(trimmed) < 2:
            raise ConvergenceError("stationarity polynomial lost all structure")
        roots_n = np.polynomial.polynomial.polyroots(trimmed)
        candidates = []
        need_fallback = False
        # the singular determinant scale, for deciding when beta(n) is unreliable
        sing_scale = max(1.0, p.delta * p.delta, p.g * p.g, 0.25 * p.kappa * p.kappa)
        for root in roots_n:
            if abs(root.imag) > 1e-6 * max(1.0, abs(root.real)):
                continue
            n = max(float(root.real), 0.0)
            if root.real < -1e-9 * max(1.0, abs(root.real)):
                continue
            if abs(_singularity(n, p)) < 1e-9 * sing_scale:
                need_fallback = True
                continue
            candidates.append(_beta_from_occupation(n, p))
        if need_fallback:
            candidates.extend(_multistart_roots(p))

    polished = []
    failures = []
    for cand in candidates:
        b, res = _newton_polish(cand, p)
        if res < residual_tol:
            polished.append(b)
        elif abs(mean_field_rhs(cand, p)) < 1e-4:
            # genuine candidate that refused to polish: report rather than drop
            failures.append((cand, res))
    if failures and not polished:
        raise ConvergenceError(
            "fixed-point polishing did not converge",
            details={"residuals": [(str(c), r) for c, r in failures]},
        )

    out = []
    for b in _dedupe(polished):
        jac = linearize(b, p)
        fp_class, chirality = classify(jac, DEGENERACY_TOL_KAPPA * p.kappa)
        out.append(FixedPoint(
            beta0=b,
            n0=abs(b) ** 2,
            jacobian=jac,
            eigenvalues=_eigenvalues_2x2(jac),
            fp_class=fp_class,
            chirality=chirality,
        ))
    out.sort(key=lambda fp: (fp.n0, fp.beta0.real, fp.beta0.imag))
    return out


# Dormand-Prince RK45 tableau
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40


def integrate_flow(beta_init: complex, p: ModelParams, t_max: float,
                   attractors=None, r_cap: float = None, dwell: float = None,
                   rtol: float = 1e-9, record_stride: int = 1):
    """Integrate the mean-field flow with an embedded RK45 pair.

    Terminates early once the state has stayed within ``r_cap`` of one
    attractor for at least ``dwell`` (default 10/kappa). Returns
    ``(times, betas, captured_index)`` where ``captured_index`` is the index
    into ``attractors`` or None on timeout. ``attractors`` defaults to the
    attractors of :func:`fixed_points`.

    Raises :class:`EscapeError` if |beta| exceeds the escape radius, which
    flags parameter regimes outside the model's validity.
    """
    if t_max <= 0:
        raise InvalidParameterError("t_max must be > 0")
    if attractors is None:
        attractors = [fp.beta0 for fp in fixed_points(p) if fp.is_attractor]
    else:
        attractors = [complex(a) for a in attractors]
    if r_cap is None:
        if len(attractors) > 1:
            dmin = min(abs(a - b) for i, a in enumerate(attractors) for b in attractors[:i])
            r_cap = CAPTURE_FRACTION * dmin
        elif attractors:
            r_cap = CAPTURE_FRACTION * max(1.0, abs(attractors[0]))
        else:
            r_cap = 0.0
    if dwell is None:
        dwell = DWELL_OVER_KAPPA / p.kappa

    delta, u, g, f, phi, kappa = p.delta, p.u, p.g, p.f, p.phi, p.kappa
    drive = f * cmath.exp(-1j * phi)

    def rhs(b):
        return -1j * ((-delta - 0.5j * kappa + u * (b.real * b.real + b.imag * b.imag)) * b
                      + g * b.conjugate() + drive)

    t = 0.0
    b = complex(beta_init)
    h = min(0.01, t_max)
    k1 = rhs(b)
    times = [0.0]
    betas = [b]
    inside = -1
    t_inside = 0.0
    captured = None
    accepted = 0
    max_steps = 2_000_000
    steps = 0
    while t < t_max:
        steps += 1
        if steps > max_steps:
            break
        if t + h > t_max:
            h = t_max - t
        k2 = rhs(b + h * (_A21 * k1))
        k3 = rhs(b + h * (_A31 * k1 + _A32 * k2))
        k4 = rhs(b + h * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = rhs(b + h * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = rhs(b + h * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        b_new = b + h * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = rhs(b_new)
        err = abs(h * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7))
        tol = rtol * max(abs(b), abs(b_new), 1e-6) + 1e-14
        if err <= tol:
            t += h
            b = b_new
            k1 = k7
            accepted += 1
            if accepted % record_stride == 0:
                times.append(t)
                betas.append(b)
            if abs(b) > ESCAPE_RADIUS:
                raise EscapeError(
                    f"trajectory escaped |beta| > {ESCAPE_RADIUS:g} at t={t:g}")
            if attractors and r_cap > 0.0:
                dists = [abs(b - a) for a in attractors]
                j = dists.index(min(dists))
                if dists[j] < r_cap:
                    if inside == j:
                        if t - t_inside >= dwell:
                            captured = j
                            break
                    else:
                        inside, t_inside = j, t
                else:
                    inside = -1
        ratio = (tol / err) ** 0.2 if err > 0.0 else 5.0
        h *= min(5.0, max(0.2, 0.9 * ratio))
    return np.array(times), np.array(betas), captured


def _unstable_direction(fp: FixedPoint):
    w, vecs = np.linalg.eig(fp.jacobian)
    iu = int(np.argmax(w.real))
    v = vecs[:, iu].real
    nrm = math.hypot(v[0], v[1])
    return complex(v[0] / nrm, v[1] / nrm)


def _label_from_pattern(nodes, edges):
    attractors = [fp for fp in nodes if fp.is_attractor]
    saddles = [fp for fp in nodes if fp.is_saddle]
    n_att, n_sad = len(attractors), len(saddles)
    chi = [fp.chirality for fp in attractors]
    if n_att - n_sad != 1:
        return RegionLabel.UNCLASSIFIED
    if n_att == 1 and n_sad == 0:
        return RegionLabel.R1
    if n_att == 2 and n_sad == 1:
        if all(c is Chirality.CW for c in chi):
            return RegionLabel.R3A
        if sorted(c.value for c in chi) == ["ccw", "cw"]:
            return RegionLabel.R3B
        return RegionLabel.UNCLASSIFIED
    if n_att == 3 and n_sad == 2:
        if sorted(c.value for c in chi) != ["ccw", "cw", "cw"]:
            return RegionLabel.UNCLASSIFIED
        att_idx = [i for i, fp in enumerate(nodes) if fp.is_attractor]
        ccw_idx = next(i for i in att_idx if nodes[i].chirality is Chirality.CCW)
        feeders = {s for (s, a) in edges if a == ccw_idx}
        # Calibrated on the known five-point regions: the variant crossed by
        # the moderate-drive detuning sweeps has exactly one saddle feeding
        # the CCW attractor; the low-drive variant has both.
        if len(feeders) == 1:
            return RegionLabel.R5B
        if len(feeders) == 2:
            return RegionLabel.R5A
        return RegionLabel.UNCLASSIFIED
    return RegionLabel.UNCLASSIFIED


def flow_graph(p: ModelParams, t_max: float = 3000.0) -> FlowGraph:
    """Fixed points, their connectivity, and the region label at ``p``.

    For each saddle, two trajectories are launched a small offset along
    (plus/minus) the unstable eigenvector and integrated until captured by
    an attractor; each capture contributes one (saddle, attractor) edge.
    """
    nodes = fixed_points(p)
    if any(fp.fp_class is FPClass.MARGINAL for fp in nodes):
        return FlowGraph(nodes=nodes, edges=[], region_label=RegionLabel.BOUNDARY,
                         diagnostics={"reason": "marginal fixed point"})
    attractor_pos = [fp.beta0 for fp in nodes if fp.is_attractor]
    att_lookup = [i for i, fp in enumerate(nodes) if fp.is_attractor]
    edges = []
    failures = []
    for i_s, fp in enumerate(nodes):
        if not fp.is_saddle:
            continue
        direction = _unstable_direction(fp)
        eps = MANIFOLD_OFFSET * max(1.0, abs(fp.beta0))
        for sign in (+1.0, -1.0):
            start = fp.beta0 + sign * eps * direction
            try:
                _, _, captured = integrate_flow(
                    start, p, t_max, attractors=attractor_pos, record_stride=10**9)
            except EscapeError as exc:
                failures.append(f"saddle {i_s}: {exc}")
                captured = None
            if captured is None:
                failures.append(f"saddle {i_s}: no capture within t_max={t_max}")
            else:
                edges.append((i_s, att_lookup[captured]))
    if failures:
        return FlowGraph(nodes=nodes, edges=edges,
                         region_label=RegionLabel.UNCLASSIFIED,
                         diagnostics={"capture_failures": failures})
    label = _label_from_pattern(nodes, edges)
    return FlowGraph(nodes=nodes, edges=edges, region_label=label)


def _phase_point(args):
    delta, f, base = args
    p = ModelParams(delta=delta, u=base.u, g=base.g, f=f, phi=base.phi, kappa=base.kappa)
    try:
        graph = flow_graph(p)
        n_att = len(graph.attractors)
        n_sad = len(graph.saddles)
        chis = ",".join(fp.chirality.value for fp in graph.nodes if fp.is_attractor)
        return (graph.region_label.value, n_att, n_sad, chis, graph.diagnostics or None)
    except Exception as exc:  # per-point failures must not abort a sweep
        return (RegionLabel.UNCLASSIFIED.value, -1, -1, "", {"error": str(exc)})


def phase_diagram(delta_range, f_range, base: ModelParams, workers: int = 1):
    """Region labels on a (delta, f) grid.

    ``delta_range`` and ``f_range`` are (min, max, count) triples. Returns a
    dict with the grid axes, a 2D array of label strings (indexed
    [i_delta, i_f]), companion count arrays, and per-point diagnostics for
    any failures. Grid points are independent; ``workers > 1`` evaluates
    them in a process pool with results identical to the serial order.
    """
    d0, d1, nd = delta_range
    f0, f1, nf = f_range
    if nd < 1 or nf < 1:
        raise InvalidParameterError("grid resolutions must be >= 1")
    deltas = np.linspace(d0, d1, int(nd))
    fs = np.linspace(f0, f1, int(nf))
    jobs = [(float(d), float(f), base) for d in deltas for f in fs]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_phase_point, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    else:
        results = [_phase_point(j) for j in jobs]

    labels = np.empty((len(deltas), len(fs)), dtype=object)
    n_att = np.zeros((len(deltas), len(fs)), dtype=int)
    n_sad = np.zeros((len(deltas), len(fs)), dtype=int)
    chis = np.empty((len(deltas), len(fs)), dtype=object)
    diagnostics = {}
    for idx, (lab, na, ns, ch, diag) in enumerate(results):
        i, j = divmod(idx, len(fs))
        labels[i, j] = lab
        n_att[i, j] = na
        n_sad[i, j] = ns
        chis[i, j] = ch
        if diag:
            diagnostics[f"{i},{j}"] = diag
    return {
        "deltas": deltas,
        "fs": fs,
        "labels": labels,
        "n_attractors": n_att,
        "n_saddles": n_sad,
        "chiralities": chis,
        "diagnostics": diagnostics,
    }
