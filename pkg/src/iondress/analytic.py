"""Closed-form and stationary-phase oracles for the channel amplitudes.

Resonant flattop pulses admit exact expressions for both channel amplitudes
once depletion is neglected; these serve as independent references for the
numerical pipeline.  For smooth odd envelopes a stationary-phase analysis of
the oscillatory integrals yields amplitudes of pure sine (ground channel) and
cosine (excited channel) character, which is the mechanism separating the two
channels spectrally.

All expressions below are derived in the same rotating-frame convention and
symmetric time window as the numerical pipeline, so the flattop forms match
:func:`iondress.channel_amplitudes.final_amplitudes` pointwise as complex
numbers (not just in modulus), with depletion disabled and zero detuning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from . import envelope as envmod
from .channel_amplitudes import SimulationParams
from .envelope import EnvelopeSpec
from .errors import CausticError

__all__ = [
    "zero_flattop_amplitudes",
    "even_flattop_amplitudes",
    "StationaryPoints",
    "SpaResult",
    "spa_stationary_points",
    "spa_amplitudes",
]

# width of the series window around the removable singularities (a.u. energy)
SERIES_WINDOW = 1e-6
# stationary points with |envelope slope| below this fraction of the peak
# slope are treated as caustics
CAUSTIC_FRACTION = 1e-3


def _sinc(x):
    """sin(x)/x with the removable singularity at 0."""
    return np.sinc(np.asarray(x, dtype=float) / math.pi)


def zero_flattop_amplitudes(epsilon, tau: float, omega0_rabi: float, omega_ag: float):
    """Exact channel amplitudes for the resonant odd flattop, no depletion.

    With s = Omega0 tau / 4, the two doublet branches centred on +-Omega0/2
    are (delta denotes the distance from the branch centre):

        alpha_plus  = +(i W/2) [cos s - cos(eps tau/2)] / (Omega0/2 - eps)
        alpha_minus = -(i W/2) [cos s - cos(eps tau/2)] / (Omega0/2 + eps)
        beta_plus   = +(W/2) [sin s - sin(eps tau/2)] / (Omega0/2 - eps)
        beta_minus  = -(W/2) [sin s + sin(eps tau/2)] / (Omega0/2 + eps)

    The singularities at eps = +-Omega0/2 are removable; inside a narrow
    window they are evaluated by a series expansion to avoid cancellation.
    Returns (alpha, beta) with the branch sums.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    eps = np.asarray(epsilon, dtype=float)
    scalar = eps.ndim == 0
    eps = np.atleast_1d(eps)
    s = 0.25 * omega0_rabi * tau
    half_rabi = 0.5 * omega0_rabi
    cos_s, sin_s = math.cos(s), math.sin(s)
    w2 = 0.5 * omega_ag

    def branch(sign: float):
        """(alpha, beta) contribution of the branch centred at sign*Omega0/2."""
        delta = eps - sign * half_rabi
        near = np.abs(delta) < SERIES_WINDOW
        far = ~near
        a = np.zeros_like(eps, dtype=complex)
        b = np.zeros_like(eps, dtype=complex)
        e_far = eps[far]
        # direct evaluation away from the pole
        num_a = cos_s - np.cos(0.5 * e_far * tau)
        a[far] = sign * 0.5j * omega_ag * num_a / (half_rabi - sign * e_far)
        num_b = sin_s - sign * np.sin(0.5 * e_far * tau)
        b[far] = sign * w2 * num_b / (half_rabi - sign * e_far)
        # series about the removable singularity, O(x^4) accurate
        if np.any(near):
            x = 0.5 * delta[near] * tau
            quarter = 0.25 * omega_ag * tau
            corr1 = 1.0 - x**2 / 6.0
            corr2 = 0.5 * x * (1.0 - x**2 / 12.0)
            a[near] = -sign * 1j * quarter * (sin_s * corr1 + sign * cos_s * corr2)
            b[near] = sign * quarter * (cos_s * corr1 - sign * sin_s * corr2)
        return a, b

    a_p, b_p = branch(+1.0)
    a_m, b_m = branch(-1.0)
    alpha = a_p + a_m
    beta = b_p + b_m
    if scalar:
        return complex(alpha[0]), complex(beta[0])
    return alpha, beta


def even_flattop_amplitudes(epsilon, tau: float, omega0_rabi: float, omega_ag: float):
    """Exact channel amplitudes for the resonant even flattop, no depletion.

    Both channels are built from the same two sinc-shaped branches

        c_plus  = (W/2) exp(+i s) sinc-term centred at +Omega0/2
        c_minus = (W/2) exp(-i s) sinc-term centred at -Omega0/2

    with alpha = c_plus + c_minus and beta = c_plus - c_minus, so the two
    channel densities share all fringe positions (constant-modulus branch
    ratio) instead of avoiding each other.  Singularities are removable and
    handled by the sinc form itself.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    eps = np.asarray(epsilon, dtype=float)
    scalar = eps.ndim == 0
    eps = np.atleast_1d(eps)
    s = 0.25 * omega0_rabi * tau
    half_rabi = 0.5 * omega0_rabi
    w2 = 0.5 * omega_ag
    c_plus = w2 * np.exp(1j * s) * 0.5 * tau * _sinc(0.5 * (eps - half_rabi) * tau)
    c_minus = w2 * np.exp(-1j * s) * 0.5 * tau * _sinc(0.5 * (eps + half_rabi) * tau)
    alpha = c_plus + c_minus
    beta = c_plus - c_minus
    if scalar:
        return complex(alpha[0]), complex(beta[0])
    return alpha, beta


# ---------------------------------------------------------------------------
# stationary-phase analysis for smooth odd envelopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StationaryPoints:
    """Real stationary times of the two phase branches, with flags."""

    times: tuple[float, ...]
    caustic: tuple[bool, ...]
    jump_blocked: bool = False

    @property
    def any_caustic(self) -> bool:
        return any(self.caustic)


@dataclass(frozen=True)
class SpaResult:
    """Stationary-phase amplitudes at one photoelectron energy.

    alpha and beta are stored in the normal form alpha = -i eta sin(phi),
    beta = -i eta cos(phi); the numerical pipeline's excited-channel amplitude
    carries a constant extra phase i relative to this form, which cancels in
    every density.
    """

    epsilon: float
    stationary_times: tuple[float, ...]
    alpha: complex
    beta: complex
    eta: float
    phi: float


def _require_odd(env: EnvelopeSpec) -> None:
    if not env.is_odd:
        raise ValueError(
            "stationary-phase amplitudes are defined for odd envelopes only"
        )


def _peak_slope(env: EnvelopeSpec) -> float:
    T = envmod.support_half_width(env)
    grid = np.linspace(1e-9, T, 4097)
    return float(np.max(np.abs(envmod.derivative(env, grid))))


def _first_branch_roots(env: EnvelopeSpec, target: float) -> list[float]:
    """Real solutions of envelope(t) = target, by bracketing and bisection."""
    T = envmod.support_half_width(env)
    n_scan = 8192
    roots: list[float] = []
    if env.kind in envmod.JUMP_KINDS:
        tiny = T / n_scan * 1e-6
        panels = [(-T, -tiny), (tiny, T)]
    else:
        panels = [(-T, T)]
    for lo, hi in panels:
        ts = np.linspace(lo, hi, n_scan)
        vals = np.asarray(envmod.evaluate(env, ts)) - target
        sign = np.sign(vals)
        exact = np.flatnonzero(vals == 0.0)
        roots.extend(float(ts[i]) for i in exact)
        crossings = np.flatnonzero(sign[:-1] * sign[1:] < 0.0)
        for i in crossings:
            f = lambda t: float(envmod.evaluate(env, t)) - target
            roots.append(float(bisect(f, ts[i], ts[i + 1], xtol=1e-10)))
    return sorted(roots)


def spa_stationary_points(
    env: EnvelopeSpec, omega0_rabi: float, epsilon: float
) -> StationaryPoints:
    """Stationary times of the channel integrals for an odd envelope.

    The two phase branches are stationary where envelope(t) = -+ 2 eps/Omega0;
    by oddness their solutions come in mirrored pairs, so the returned set is
    symmetric about t = 0.  Energies with |2 eps/Omega0| above the envelope
    peak have no real stationary point (empty set).  For envelopes with a sign
    jump, eps = 0 falls into the jump itself: the set is empty and flagged.
    """
    _require_odd(env)
    if omega0_rabi <= 0.0:
        raise ValueError("omega0_rabi must be positive")
    target = -2.0 * epsilon / omega0_rabi
    if abs(target) > envmod.max_abs(env):
        return StationaryPoints((), ())
    if epsilon == 0.0 and env.kind in envmod.JUMP_KINDS:
        return StationaryPoints((), (), jump_blocked=True)
    first = _first_branch_roots(env, target)
    if not first:
        return StationaryPoints((), ())
    full = sorted(set(first) | {-t for t in first})
    slope_floor = CAUSTIC_FRACTION * _peak_slope(env)
    flags = tuple(abs(float(envmod.derivative(env, t))) < slope_floor for t in full)
    return StationaryPoints(tuple(full), flags)


def spa_amplitudes(
    env: EnvelopeSpec, params: SimulationParams, epsilon: float
) -> SpaResult:
    """Stationary-phase channel amplitudes for a resonant smooth odd pulse.

    Each mirrored pair of stationary points contributes one term

        A = 2 sqrt(pi) * eps * z_ag / (z_ba * sqrt(|Omega0 * slope(t_s)|))
        phi_s = eps t_s + theta(t_s)/2 + kappa pi/4,  kappa = sign(slope)

    summed as A*sin(phi_s) into the ground channel and A*cos(phi_s) into the
    excited channel.  The result is reduced to eta(eps), phi(eps) with
    alpha = -i eta sin(phi) and beta = -i eta cos(phi).  Stationary points at
    an envelope extremum make the weight diverge and are refused.
    """
    _require_odd(env)
    om0 = params.omega0_rabi
    if om0 <= 0.0:
        raise ValueError("omega0_rabi must be positive")
    target = -2.0 * epsilon / om0
    points = spa_stationary_points(env, om0, epsilon)
    if not points.times:
        return SpaResult(epsilon, points.times, 0.0j, 0.0j, 0.0, 0.0)
    first = [t for t in points.times if abs(float(envmod.evaluate(env, t)) - target) < 1e-6]
    if epsilon == 0.0:
        first = [t for t in first if t <= 0.0] or first[:1]
    x_sum = 0.0
    y_sum = 0.0
    slope_floor = CAUSTIC_FRACTION * _peak_slope(env)
    for t_s in first:
        slope = float(envmod.derivative(env, t_s))
        if abs(slope) < slope_floor:
            raise CausticError(
                f"stationary point t = {t_s:.6g} at eps = {epsilon:.6g} sits at an "
                "envelope extremum; the stationary-phase weight diverges"
            )
        kappa = 1.0 if slope > 0.0 else -1.0
        weight = (
            2.0
            * math.sqrt(math.pi)
            * epsilon
            * params.z_ag
            / (params.z_ba * math.sqrt(abs(om0 * slope)))
        )
        phase = (
            epsilon * t_s
            + 0.5 * float(envmod.running_area(env, om0, t_s))
            + kappa * math.pi / 4.0
        )
        x_sum += weight * math.cos(phase)
        y_sum += weight * math.sin(phase)
    eta = math.hypot(x_sum, y_sum)
    phi = math.atan2(y_sum, x_sum)
    return SpaResult(
        epsilon=epsilon,
        stationary_times=points.times,
        alpha=-1j * y_sum,
        beta=-1j * x_sum,
        eta=eta,
        phi=phi,
    )
