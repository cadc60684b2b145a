"""Pulse envelopes, their time symmetry, and pulse-area functionals.

All envelopes are normalized to peak magnitude 1 and parametrized by ``tau``,
the FWHM of the *intensity* profile (so the Gaussian amplitude envelope is
``exp(-2 ln2 t^2 / tau^2)``).  Even envelopes are non-negative; the odd
("zero-area") variants flip sign at t = 0, either abruptly (``zero_gaussian``,
``zero_flattop``), through a smooth arctangent switch (``smooth_zero``) or as
two delayed sub-pulses of opposite sign (``double_gaussian``).

The area functionals defined here drive the two-level dynamics: the running
pulse area theta(t), the absolute area theta_tau used as the sweep axis, and
the envelope-weighted average Rabi frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import erf

__all__ = [
    "EnvelopeKind",
    "EnvelopeSpec",
    "SymmetryClass",
    "GAUSS_AREA_FACTOR",
    "SUPPORT_WIDTHS",
    "evaluate",
    "even_base",
    "squared",
    "derivative",
    "support_half_width",
    "max_abs",
    "symmetry_class",
    "running_area",
    "absolute_area",
    "average_rabi",
    "duration_for_area",
]

# exp(-GAUSS_EXPONENT * t^2 / tau^2) has intensity FWHM tau
GAUSS_EXPONENT = 2.0 * math.log(2.0)
# integral of the Gaussian amplitude envelope in units of tau
GAUSS_AREA_FACTOR = math.sqrt(math.pi / (2.0 * math.log(2.0)))
# integral of the squared Gaussian envelope in units of tau
GAUSS_SQUARED_AREA_FACTOR = math.sqrt(math.pi / (4.0 * math.log(2.0)))
# Gaussian-family quadrature/time-grid cutoff in units of tau; |envelope| < 1e-15 beyond
SUPPORT_WIDTHS = 5.0


class EnvelopeKind(Enum):
    GAUSSIAN = "gaussian"
    FLATTOP = "flattop"
    ZERO_GAUSSIAN = "zero_gaussian"
    ZERO_FLATTOP = "zero_flattop"
    SMOOTH_ZERO = "smooth_zero"
    DOUBLE_GAUSSIAN = "double_gaussian"


EVEN_KINDS = frozenset({EnvelopeKind.GAUSSIAN, EnvelopeKind.FLATTOP})
ODD_KINDS = frozenset(
    {
        EnvelopeKind.ZERO_GAUSSIAN,
        EnvelopeKind.ZERO_FLATTOP,
        EnvelopeKind.SMOOTH_ZERO,
        EnvelopeKind.DOUBLE_GAUSSIAN,
    }
)
# kinds with a sign discontinuity at t = 0
JUMP_KINDS = frozenset({EnvelopeKind.ZERO_GAUSSIAN, EnvelopeKind.ZERO_FLATTOP})
GAUSSIAN_FAMILY = frozenset(
    {
        EnvelopeKind.GAUSSIAN,
        EnvelopeKind.ZERO_GAUSSIAN,
        EnvelopeKind.SMOOTH_ZERO,
        EnvelopeKind.DOUBLE_GAUSSIAN,
    }
)


@dataclass(frozen=True)
class SymmetryClass:
    """Time-symmetry classification of an envelope.

    ``chi`` is the factor entering the excited-channel amplitude: +1 for even
    envelopes, -1 for odd ones.
    """

    parity: str
    chi: int

    def __post_init__(self) -> None:
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if self.chi != (1 if self.parity == "even" else -1):
            raise ValueError("chi must be +1 for even and -1 for odd envelopes")


EVEN = SymmetryClass("even", 1)
ODD = SymmetryClass("odd", -1)


@dataclass(frozen=True)
class EnvelopeSpec:
    """Parametric pulse envelope with a declared time symmetry.

    Parameters
    ----------
    kind : EnvelopeKind
        Envelope family.
    tau : float
        Intensity-profile FWHM in atomic units of time.
    steepness : float, optional
        Sign-switch rate K (1/a.u.) of the smooth odd envelope; required for
        ``smooth_zero`` and rejected otherwise.
    separation : float, optional
        Centre-to-centre delay of the two sub-pulses of ``double_gaussian``;
        defaults to 2*tau so that areas stay proportional to tau.
    """

    kind: EnvelopeKind
    tau: float
    steepness: float | None = None
    separation: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, EnvelopeKind):
            object.__setattr__(self, "kind", EnvelopeKind(self.kind))
        if not self.tau >= 0.0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")
        if self.kind is EnvelopeKind.SMOOTH_ZERO:
            if self.steepness is None or not self.steepness > 0.0:
                raise ValueError("smooth_zero requires steepness K > 0")
        elif self.steepness is not None:
            raise ValueError(f"steepness is only meaningful for smooth_zero, not {self.kind.value}")
        if self.separation is not None:
            if self.kind is not EnvelopeKind.DOUBLE_GAUSSIAN:
                raise ValueError(
                    f"separation is only meaningful for double_gaussian, not {self.kind.value}"
                )
            if not self.separation > 0.0:
                raise ValueError("separation must be positive")

    @property
    def effective_separation(self) -> float:
        """Sub-pulse delay of ``double_gaussian``; 2*tau unless set explicitly."""
        if self.separation is not None:
            return self.separation
        return 2.0 * self.tau

    @property
    def is_odd(self) -> bool:
        return self.kind in ODD_KINDS

    @property
    def is_degenerate(self) -> bool:
        return self.tau == 0.0


def _require_finite_pulse(env: EnvelopeSpec) -> None:
    if env.is_degenerate:
        raise ValueError("degenerate pulse: tau = 0")


def even_base(env: EnvelopeSpec, t):
    """Underlying even profile (Gaussian or box) the envelope is built from."""
    t = np.asarray(t, dtype=float)
    _require_finite_pulse(env)
    if env.kind in (EnvelopeKind.FLATTOP, EnvelopeKind.ZERO_FLATTOP):
        return np.where(np.abs(t) <= 0.5 * env.tau, 1.0, 0.0)
    return np.exp(-GAUSS_EXPONENT * (t / env.tau) ** 2)


def evaluate(env: EnvelopeSpec, t, side: int = 0):
    """Envelope amplitude at time(s) ``t``.

    ``side`` selects the one-sided limit at the t = 0 discontinuity of the
    sign-flip kinds: -1 for the limit from t < 0, +1 from t > 0.  The default
    0 assigns sign(0) = 0, which reproduces the split-panel trapezoid rule at
    the jump (the node value equals the mean of the two one-sided limits).
    """
    t = np.asarray(t, dtype=float)
    base = even_base(env, t)
    kind = env.kind
    if kind in EVEN_KINDS:
        out = base
    elif kind in JUMP_KINDS:
        sgn = np.sign(t)
        if side:
            sgn = np.where(t == 0.0, float(np.sign(side)), sgn)
        out = -sgn * base
    elif kind is EnvelopeKind.SMOOTH_ZERO:
        out = -(2.0 / math.pi) * np.arctan(env.steepness * t) * base
    elif kind is EnvelopeKind.DOUBLE_GAUSSIAN:
        half = 0.5 * env.effective_separation
        out = even_base(env, t + half) - even_base(env, t - half)
    else:  # pragma: no cover - exhaustive over EnvelopeKind
        raise NotImplementedError(kind)
    return out if out.ndim else float(out)


def squared(env: EnvelopeSpec, t):
    """Squared envelope (instantaneous intensity profile).

    Continuous in t for every kind, so the sign-flip kinds use the even base
    directly instead of the sign(0) = 0 node convention.
    """
    t = np.asarray(t, dtype=float)
    if env.kind in JUMP_KINDS or env.kind in EVEN_KINDS:
        out = even_base(env, t) ** 2
    else:
        out = np.asarray(evaluate(env, t), dtype=float) ** 2
    return out if out.ndim else float(out)


def derivative(env: EnvelopeSpec, t):
    """d(envelope)/dt; for flattop kinds this is 0 away from the edges."""
    t = np.asarray(t, dtype=float)
    _require_finite_pulse(env)
    kind = env.kind

    def gauss_prime(x):
        return -2.0 * GAUSS_EXPONENT * x / env.tau**2 * np.exp(
            -GAUSS_EXPONENT * (x / env.tau) ** 2
        )

    if kind is EnvelopeKind.GAUSSIAN:
        out = gauss_prime(t)
    elif kind is EnvelopeKind.ZERO_GAUSSIAN:
        out = -np.sign(t) * gauss_prime(t)
    elif kind is EnvelopeKind.SMOOTH_ZERO:
        k = env.steepness
        base = even_base(env, t)
        out = -(2.0 / math.pi) * (
            k / (1.0 + (k * t) ** 2) * base + np.arctan(k * t) * gauss_prime(t)
        )
    elif kind is EnvelopeKind.DOUBLE_GAUSSIAN:
        half = 0.5 * env.effective_separation
        out = gauss_prime(t + half) - gauss_prime(t - half)
    else:  # flattop kinds: piecewise constant
        out = np.zeros_like(t)
    return out if out.ndim else float(out)


def support_half_width(env: EnvelopeSpec) -> float:
    """Half-width T of the time window [-T, T] carrying the pulse."""
    _require_finite_pulse(env)
    if env.kind in (EnvelopeKind.FLATTOP, EnvelopeKind.ZERO_FLATTOP):
        return 0.5 * env.tau
    if env.kind is EnvelopeKind.DOUBLE_GAUSSIAN:
        return SUPPORT_WIDTHS * env.tau + 0.5 * env.effective_separation
    return SUPPORT_WIDTHS * env.tau


def max_abs(env: EnvelopeSpec) -> float:
    """Peak of |envelope|; below 1 for smooth_zero and double_gaussian."""
    _require_finite_pulse(env)
    if env.kind in (EnvelopeKind.SMOOTH_ZERO, EnvelopeKind.DOUBLE_GAUSSIAN):
        T = support_half_width(env)
        # coarse scan plus golden-section refinement on the positive half axis
        grid = np.linspace(1e-12, T, 4097)
        vals = np.abs(evaluate(env, grid))
        k = int(np.argmax(vals))
        lo = grid[max(k - 1, 0)]
        hi = grid[min(k + 1, grid.size - 1)]
        gr = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c = b - gr * (b - a)
        d = a + gr * (b - a)
        for _ in range(80):
            if abs(evaluate(env, c)) > abs(evaluate(env, d)):
                b = d
            else:
                a = c
            c = b - gr * (b - a)
            d = a + gr * (b - a)
        t_star = 0.5 * (a + b)
        return float(max(vals[k], abs(evaluate(env, t_star))))
    return 1.0


def symmetry_class(env: EnvelopeSpec) -> SymmetryClass:
    """Even/odd classification and the chi factor of the envelope."""
    return EVEN if env.kind in EVEN_KINDS else ODD


def _gauss_cumulative(env: EnvelopeSpec, t):
    """integral of the Gaussian even base from -inf to t."""
    s = math.sqrt(GAUSS_EXPONENT) / env.tau
    return env.tau * GAUSS_AREA_FACTOR * 0.5 * (1.0 + erf(s * np.asarray(t, dtype=float)))


def _box_cumulative(env: EnvelopeSpec, t):
    """integral of the box even base from -inf to t."""
    return np.clip(np.asarray(t, dtype=float) + 0.5 * env.tau, 0.0, env.tau)


def _smooth_zero_half_integral(env: EnvelopeSpec, x: float) -> float:
    """integral of the smooth_zero envelope over [0, x] for x >= 0."""
    k = env.steepness

    def f(u: float) -> float:
        return -(2.0 / math.pi) * math.atan(k * u) * math.exp(
            -GAUSS_EXPONENT * (u / env.tau) ** 2
        )

    val, _ = quad(f, 0.0, x, limit=200)
    return val


def running_area(env: EnvelopeSpec, omega0: float, t):
    """Running pulse area theta(t) = integral of Omega0 * envelope up to t.

    Uses closed erf/box forms where the kind permits; the smooth odd envelope
    falls back to adaptive quadrature arranged so oddness cancels exactly and
    theta(+inf) -> 0 without residual.
    """
    if omega0 < 0.0:
        raise ValueError("omega0 must be non-negative")
    _require_finite_pulse(env)
    t_arr = np.asarray(t, dtype=float)
    kind = env.kind
    if kind is EnvelopeKind.GAUSSIAN:
        theta = omega0 * _gauss_cumulative(env, t_arr)
    elif kind is EnvelopeKind.FLATTOP:
        theta = omega0 * _box_cumulative(env, t_arr)
    elif kind in JUMP_KINDS:
        cum = _gauss_cumulative if kind is EnvelopeKind.ZERO_GAUSSIAN else _box_cumulative
        c0 = cum(env, 0.0)
        neg = cum(env, np.minimum(t_arr, 0.0))
        pos = cum(env, np.maximum(t_arr, 0.0)) - c0
        theta = omega0 * (neg - pos)
    elif kind is EnvelopeKind.DOUBLE_GAUSSIAN:
        half = 0.5 * env.effective_separation
        theta = omega0 * (_gauss_cumulative(env, t_arr + half) - _gauss_cumulative(env, t_arr - half))
    elif kind is EnvelopeKind.SMOOTH_ZERO:
        T = support_half_width(env)
        total_half = _smooth_zero_half_integral(env, T)

        def one(x: float) -> float:
            # integral from -T split at 0; the negative half mirrors the
            # positive half with opposite sign, so theta(T) vanishes exactly
            if x <= 0.0:
                return -(total_half - _smooth_zero_half_integral(env, -x))
            return -total_half + _smooth_zero_half_integral(env, x)

        theta = omega0 * np.vectorize(one, otypes=[float])(np.clip(t_arr, -T, T))
    else:  # pragma: no cover
        raise NotImplementedError(kind)
    theta = np.asarray(theta, dtype=float)
    return theta if theta.ndim else float(theta)


def _abs_shape_area(env: EnvelopeSpec) -> float:
    """integral of |envelope| dt (omega0 factored out)."""
    kind = env.kind
    if kind in (EnvelopeKind.GAUSSIAN, EnvelopeKind.ZERO_GAUSSIAN):
        return env.tau * GAUSS_AREA_FACTOR
    if kind in (EnvelopeKind.FLATTOP, EnvelopeKind.ZERO_FLATTOP):
        return env.tau
    if kind is EnvelopeKind.DOUBLE_GAUSSIAN:
        # |difference of the two lobes| integrates to the even-base integral
        # across [-sep/2, sep/2]
        half = 0.5 * env.effective_separation
        return 2.0 * float(_gauss_cumulative(env, half) - _gauss_cumulative(env, -half))
    if kind is EnvelopeKind.SMOOTH_ZERO:
        T = support_half_width(env)
        val, _ = quad(
            lambda u: abs(evaluate(env, u)), 0.0, T, limit=200
        )
        return 2.0 * val
    raise NotImplementedError(kind)  # pragma: no cover


def absolute_area(env: EnvelopeSpec, omega0: float) -> float:
    """Absolute pulse area theta_tau = integral of |Omega0 * envelope| dt."""
    if omega0 < 0.0:
        raise ValueError("omega0 must be non-negative")
    if env.is_degenerate:
        return 0.0
    return omega0 * _abs_shape_area(env)


def average_rabi(env: EnvelopeSpec, omega0: float) -> float:
    """Envelope-weighted average Rabi frequency.

    Defined as the ratio of the third to the second absolute moment of the
    instantaneous Rabi frequency, integral |Omega|^3 dt / integral |Omega|^2 dt.
    """
    if omega0 < 0.0:
        raise ValueError("omega0 must be non-negative")
    _require_finite_pulse(env)
    kind = env.kind
    if kind in (EnvelopeKind.FLATTOP, EnvelopeKind.ZERO_FLATTOP):
        return omega0
    if kind in (EnvelopeKind.GAUSSIAN, EnvelopeKind.ZERO_GAUSSIAN):
        return omega0 * math.sqrt(2.0 / 3.0)
    T = support_half_width(env)
    m3, _ = quad(lambda u: abs(evaluate(env, u)) ** 3, 0.0, T, limit=200)
    m2, _ = quad(lambda u: evaluate(env, u) ** 2, 0.0, T, limit=200)
    if m2 == 0.0:
        raise ValueError("envelope is identically zero")
    return omega0 * m3 / m2


def duration_for_area(env: EnvelopeSpec, omega0: float, theta_target: float) -> float:
    """Duration tau giving the requested absolute pulse area at fixed omega0.

    For kinds whose area is proportional to tau the inversion is exact; a
    fixed steepness or fixed separation breaks proportionality, in which case
    a bracketing root solve on tau is used.  theta_target = 0 returns the
    degenerate tau = 0.
    """
    if theta_target < 0.0:
        raise ValueError("theta_target must be non-negative")
    if omega0 <= 0.0:
        raise ValueError("omega0 must be positive to invert the pulse area")
    if theta_target == 0.0:
        return 0.0

    from dataclasses import replace

    kind = env.kind
    if kind in (EnvelopeKind.GAUSSIAN, EnvelopeKind.ZERO_GAUSSIAN):
        return theta_target / (omega0 * GAUSS_AREA_FACTOR)
    if kind in (EnvelopeKind.FLATTOP, EnvelopeKind.ZERO_FLATTOP):
        return theta_target / omega0
    if kind is EnvelopeKind.DOUBLE_GAUSSIAN and env.separation is None:
        unit = _abs_shape_area(replace(env, tau=1.0))
        return theta_target / (omega0 * unit)

    # smooth_zero, or double_gaussian with a pinned separation: area is
    # monotone increasing in tau but not proportional to it
    def f(tau: float) -> float:
        return absolute_area(replace(env, tau=tau), omega0) - theta_target

    lo = theta_target / (omega0 * 2.0 * GAUSS_AREA_FACTOR)
    hi = max(2.0 * theta_target / omega0, 4.0 * lo)
    for _ in range(80):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:
        raise ValueError(
            f"area {theta_target} not reachable for {kind.value} with the given parameters"
        )
    while f(lo) > 0.0:
        lo *= 0.5
    return float(brentq(f, lo, hi, xtol=1e-12, rtol=1e-14))
