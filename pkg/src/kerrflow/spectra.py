"""Frequency-resolved chirality spectra by two routes.

The object of interest is the stationary antisymmetric quadrature
correlator and its one-sided transform. Two estimators are provided:

* Trajectory route: per realization, the time-delayed correlator
  ``G_r(tau) = < Y_r(t) X_r(t+tau) - X_r(t) Y_r(t+tau) >_t`` is averaged
  along the record, tapered, transformed with the kernel ``e^{-i W tau}``,
  and ``-2 Im`` of the transform is averaged over realizations. The result
  is a real, odd function of W. A clockwise attractor produces a positive
  peak at its fluctuation frequency (counterclockwise: negative), which is
  the sign convention used throughout.

* Lindblad-spectral route: by the regression theorem the correlator is a
  sum over Lindblad eigenmodes, giving the rational function
  ``zeta(W) = sum_k w_k / (i W - lambda_k)`` with
  ``w_k = Tr[Y r_k] Tr[l_k^dag X rho0] - Tr[X r_k] Tr[l_k^dag Y rho0]``.
  ``zeta`` is stored verbatim; the chirality-signed real spectrum that the
  trajectory estimator measures is its odd imaginary projection
  ``Im zeta(W) - Im zeta(-W)``, which this module also evaluates (the
  real part of the rational function is the dispersive quadrature and
  carries no usable peak signs).

The two routes share mode positions, widths, and signs; their amplitudes
agree only up to conditioning effects of the photon-counting unraveling
(see the trajectory module), so quantitative cross-route comparisons must
use matched tapers and carry the trajectory error bands.

Antisymmetry makes the combination immune to slow non-rotating relaxation
(e.g. metastable basin switching): such modes carry zero weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidParameterError, SpectralWeightError
from .hilbert import DensityMatrix, LiouvillianSpectrum, quadrature_ops
from .semiclassics import Chirality, FixedPoint

__all__ = [
    "SpectrumRoute",
    "ChiralitySpectrum",
    "SpectralPeak",
    "lag_correlator",
    "zeta_from_trajectories",
    "zeta_from_liouvillian",
    "bogoliubov_peaks",
    "extract_peaks",
]

DEFAULT_TAPER_FACTOR = 4.0      # taper rate eta = factor / max_lag
PEAK_THRESHOLD = 0.1


class SpectrumRoute(Enum):
    TRAJECTORY = "trajectory"
    LIOUVILLIAN = "liouvillian"


@dataclass
class ChiralitySpectrum:
    """A chirality spectrum on a frequency axis.

    ``zeta`` is the route's native object (real transform average for the
    trajectory route; the verbatim rational mode sum for the Lindblad
    route). ``signed`` is the chirality-signed real spectrum common to both
    routes (positive peaks: clockwise). ``error`` is the jackknife band of
    ``signed`` when the route provides one.
    """

    omega: np.ndarray
    zeta: np.ndarray
    signed: np.ndarray
    route: SpectrumRoute
    error: np.ndarray = None
    metadata: dict = field(default_factory=dict)


@dataclass
class SpectralPeak:
    """A fitted resonance of the signed spectrum (half-width at half max)."""

    omega0: float
    width: float
    sign: Chirality
    weight: float
    merged: bool = False


def lag_correlator(record, t_burn: float, max_lag: float,
                   subtract_mean: bool = True):
    """Time-delayed antisymmetric correlator of one trajectory record.

    Returns ``(taus, g)`` with ``g[j] = < y(t) x(t+j dt) - x(t) y(t+j dt) >_t``
    averaged over all admissible ``t >= t_burn``. Subtracting each record's
    stationary mean leaves the expectation unchanged (the cross terms cancel
    in the antisymmetric combination) and suppresses estimator noise from
    a finite observation window; ``g[0] = 0`` identically either way.
    """
    dt = record.times[1] - record.times[0]
    n_burn = int(round(t_burn / dt))
    n_lag = int(round(max_lag / dt))
    x = record.x[n_burn:]
    y = record.y[n_burn:]
    if n_lag < 1 or len(x) <= n_lag:
        raise InvalidParameterError(
            f"record too short: need at least t_burn + max_lag = "
            f"{t_burn + max_lag:g} of data after burn-in, have {len(x) * dt:g}")
    if subtract_mean:
        x = x - x.mean()
        y = y - y.mean()
    n = len(x)
    nfft = 1
    while nfft < 2 * n:
        nfft *= 2
    fx = np.fft.rfft(x, nfft)
    fy = np.fft.rfft(y, nfft)
    c_yx = np.fft.irfft(np.conj(fy) * fx, nfft)[: n_lag + 1]
    c_xy = np.fft.irfft(np.conj(fx) * fy, nfft)[: n_lag + 1]
    counts = n - np.arange(n_lag + 1)
    g = (c_yx - c_xy) / counts
    g[0] = 0.0
    return np.arange(n_lag + 1) * dt, g


def _one_sided_transform(taus, values, omegas, eta):
    """Trapezoid evaluation of int_0^inf e^{-i W tau} e^{-eta tau} v(tau) dtau."""
    dt = taus[1] - taus[0]
    weights = np.full(len(taus), dt)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    kernel = np.exp(-1j * np.outer(taus, omegas))
    return (values * np.exp(-eta * taus) * weights) @ kernel


def zeta_from_trajectories(records, t_burn: float, max_lag: float,
                           omega_axis=None, taper_rate: float = None,
                           subtract_mean: bool = True) -> ChiralitySpectrum:
    """Trajectory-route chirality spectrum with a jackknife error band.

    Each record contributes ``-2 Im`` of the tapered one-sided transform of
    its lag correlator; the spectrum is the ensemble mean. The default
    taper ``eta = 4/max_lag`` suppresses finite-window ringing.
    """
    if not records:
        raise InvalidParameterError("need at least one trajectory record")
    dt = records[0].times[1] - records[0].times[0]
    if omega_axis is None:
        w_max = 0.9 * math.pi / dt
        omega_axis = np.linspace(-w_max, w_max, 1201)
    omega_axis = np.asarray(omega_axis, dtype=float)
    if taper_rate is None:
        taper_rate = DEFAULT_TAPER_FACTOR / max_lag
    per_traj = []
    for rec in records:
        taus, g = lag_correlator(rec, t_burn, max_lag, subtract_mean=subtract_mean)
        per_traj.append(-2.0 * _one_sided_transform(taus, g, omega_axis, taper_rate).imag)
    per_traj = np.array(per_traj)
    mean = per_traj.mean(axis=0)
    m = len(records)
    if m > 1:
        loo = (per_traj.sum(axis=0)[None, :] - per_traj) / (m - 1)
        err = np.sqrt((m - 1) / m * np.sum((loo - mean) ** 2, axis=0))
    else:
        err = np.full_like(mean, np.nan)
    return ChiralitySpectrum(
        omega=omega_axis,
        zeta=mean.astype(complex),
        signed=mean,
        route=SpectrumRoute.TRAJECTORY,
        error=err,
        metadata={"n_traj": m, "t_burn": t_burn, "max_lag": max_lag,
                  "taper_rate": taper_rate, "subtract_mean": subtract_mean},
    )


def spectral_weights(spectrum: LiouvillianSpectrum, rho0: DensityMatrix):
    """Mode weights of the antisymmetric quadrature correlator.

    Returns (weights, reference_sum): the zero mode carries weight exactly
    zero and is skipped via its index; the total over all modes equals
    ``Tr[(YX - XY) rho0]`` on the truncated space, which serves as the
    completeness reference.
    """
    x_op, y_op = quadrature_ops(spectrum.space)
    x, y = x_op.elements, y_op.elements
    rho = rho0.rho
    weights = np.zeros(len(spectrum.eigenvalues), dtype=complex)
    for k in range(len(spectrum.eigenvalues)):
        r_k = spectrum.right_ops[k]
        l_k = spectrum.left_ops[k]
        ld = l_k.conj().T
        weights[k] = (np.trace(y @ r_k) * np.trace(ld @ x @ rho)
                      - np.trace(x @ r_k) * np.trace(ld @ y @ rho))
    reference = np.trace((y @ x - x @ y) @ rho)
    return weights, complex(reference)


def zeta_from_liouvillian(spectrum: LiouvillianSpectrum, rho0: DensityMatrix,
                          omega_axis, taper_rate: float = 0.0,
                          weight_tol: float = 1e-3) -> ChiralitySpectrum:
    """Lindblad-spectral chirality spectrum.

    ``zeta`` is the verbatim rational mode sum evaluated on ``omega_axis``;
    ``signed`` is its odd imaginary projection (see module docstring). A
    nonzero ``taper_rate`` shifts every pole by ``-taper_rate``, matching a
    trajectory-route taper for like-for-like comparisons.

    Raises :class:`SpectralWeightError` when the supplied modes miss more
    than ``weight_tol`` of the total correlator weight.
    """
    omega_axis = np.asarray(omega_axis, dtype=float)
    weights, reference = spectral_weights(spectrum, rho0)
    lam = spectrum.eigenvalues
    keep = np.abs(lam) > 1e-9
    if keep.all():
        raise InvalidParameterError("spectrum does not contain the zero mode")
    missing = abs(weights[keep].sum() - reference)
    if missing > weight_tol * max(abs(reference), 0.5):
        raise SpectralWeightError(
            f"supplied modes miss {missing:.3e} of the correlator weight "
            f"(reference {abs(reference):.3e}); request more modes")

    def rational(omegas):
        z = np.zeros(len(omegas), dtype=complex)
        for w_k, l_k in zip(weights[keep], lam[keep]):
            z += w_k / (1j * omegas - (l_k - taper_rate))
        return z

    zeta = rational(omega_axis)
    signed = rational(omega_axis).imag - rational(-omega_axis).imag
    return ChiralitySpectrum(
        omega=omega_axis,
        zeta=zeta,
        signed=signed,
        route=SpectrumRoute.LIOUVILLIAN,
        error=None,
        metadata={"k_modes": int(keep.sum()), "taper_rate": taper_rate,
                  "weight_residual": float(missing),
                  "weight_reference": reference},
    )


def bogoliubov_peaks(fixed_pts) -> list:
    """Peak predictions from the linearized flow around each attractor.

    Spiraling attractors contribute a peak at |Im mu| with half-width
    |Re mu| and sign given by their chirality; non-spiraling attractors
    contribute a zero-frequency peak whose width is set by the slowest
    eigenvalue; saddles contribute nothing.
    """
    peaks = []
    for fp in fixed_pts:
        if not isinstance(fp, FixedPoint) or not fp.is_attractor:
            continue
        mu = fp.eigenvalues[0]
        if abs(mu.imag) > 0:
            peaks.append(SpectralPeak(
                omega0=abs(mu.imag),
                width=abs(mu.real),
                sign=fp.chirality,
                weight=0.0,
            ))
        else:
            slowest = max(fp.eigenvalues, key=lambda m: m.real)
            peaks.append(SpectralPeak(
                omega0=0.0,
                width=abs(slowest.real),
                sign=fp.chirality,
                weight=0.0,
            ))
    return peaks


def _fit_lorentzian(omegas, values, i_peak, window: float):
    """Least-squares Lorentzian via the quadratic fit of 1/values."""
    peak_val = values[i_peak]
    mask = (np.abs(omegas - omegas[i_peak]) < window)
    mask &= (np.sign(values) == np.sign(peak_val)) & (np.abs(values) > 0.3 * abs(peak_val))
    w = omegas[mask]
    v = values[mask]
    if len(w) < 5:
        return None
    design = np.vstack([w * w, w, np.ones_like(w)]).T
    coeffs, *_ = np.linalg.lstsq(design, 1.0 / v, rcond=None)
    a, b, c = coeffs
    if a == 0.0:
        return None
    center = -b / (2.0 * a)
    width_sq = c / a - center * center
    if width_sq <= 0.0 or not (w[0] <= center <= w[-1]):
        return None
    width = math.sqrt(width_sq)
    height = 1.0 / (a * width_sq)
    return center, width, height


def extract_peaks(spectrum: ChiralitySpectrum, threshold: float = PEAK_THRESHOLD,
                  omega_min: float = 0.0) -> list:
    """Locate and fit resonances of the signed spectrum on the W >= 0 axis.

    Local extrema above ``threshold`` of the global maximum are fitted with
    a Lorentzian (quadratic fit of the reciprocal); positive extrema are
    clockwise peaks, negative ones counterclockwise. Peaks closer together
    than the sum of their widths carry ``merged=True``.
    """
    omegas = spectrum.omega
    signed = spectrum.signed
    sel = omegas >= omega_min
    w = omegas[sel]
    v = signed[sel]
    if len(w) < 7:
        raise InvalidParameterError("frequency axis too short for peak extraction")
    vmax = np.max(np.abs(v))
    if vmax == 0.0:
        return []
    peaks = []
    order = 3
    for i in range(order, len(w) - order):
        seg = v[i - order: i + order + 1]
        if abs(v[i]) < threshold * vmax:
            continue
        if v[i] > 0 and v[i] >= seg.max() and v[i] > max(seg[0], seg[-1]):
            kind = +1
        elif v[i] < 0 and v[i] <= seg.min() and v[i] < min(seg[0], seg[-1]):
            kind = -1
        else:
            continue
        # local half-width guess from the half-maximum crossing
        half = abs(v[i]) / 2.0
        j = i
        while j + 1 < len(w) and abs(v[j]) > half and np.sign(v[j]) == kind:
            j += 1
        guess = max(w[min(j, len(w) - 1)] - w[i], 2.0 * (w[1] - w[0]))
        fit = _fit_lorentzian(w, v, i, 3.0 * guess)
        if fit is None:
            center, width, height = w[i], guess, v[i]
        else:
            center, width, height = fit
        peaks.append(SpectralPeak(
            omega0=float(center),
            width=float(width),
            sign=Chirality.CW if kind > 0 else Chirality.CCW,
            weight=float(math.pi * height * width),
        ))
    # collapse duplicate detections of one resonance (adjacent bins)
    peaks.sort(key=lambda p: p.omega0)
    dedup = []
    for p in peaks:
        if dedup and abs(p.omega0 - dedup[-1].omega0) < 0.5 * max(p.width, dedup[-1].width) \
                and p.sign is dedup[-1].sign:
            if abs(p.weight) > abs(dedup[-1].weight):
                dedup[-1] = p
            continue
        dedup.append(p)
    for i in range(len(dedup) - 1):
        if dedup[i + 1].omega0 - dedup[i].omega0 < dedup[i].width + dedup[i + 1].width:
            dedup[i].merged = True
            dedup[i + 1].merged = True
    return dedup
