"""Post-measurement density matrix of the ion and its entanglement entropy.

Conditioning the full electron-ion state on ionization (projecting out the
surviving neutral atom and renormalizing) leaves a pure bipartite state of
the photoelectron energy and the ionic qubit.  Tracing over the energy gives
a 2x2 reduced density matrix whose von Neumann entropy quantifies the
electron-ion entanglement: 0 for a product state, 1 bit when maximally
entangled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel_amplitudes import ChannelAmplitudes, ion_populations

__all__ = [
    "IonDensityMatrix",
    "reduced_ion_density",
    "von_neumann_entropy",
    "DensityMatrixElements",
    "full_density_elements",
]

MIN_ION_POPULATION = 1e-12
_trapz = getattr(np, "trapezoid", None) or np.trapz


@dataclass(frozen=True)
class IonDensityMatrix:
    """2x2 Hermitian reduced density matrix of the ion, trace one."""

    rho_aa: float
    rho_bb: float
    rho_ab: complex

    def __post_init__(self) -> None:
        if abs(self.rho_aa + self.rho_bb - 1.0) > 1e-10:
            raise ValueError("density matrix must have unit trace")
        det = self.rho_aa * self.rho_bb - abs(self.rho_ab) ** 2
        if det < -1e-12:
            raise ValueError(f"density matrix is not positive semidefinite (det {det:.3e})")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.rho_aa, self.rho_ab], [np.conj(self.rho_ab), self.rho_bb]],
            dtype=complex,
        )

    def eigenvalues(self) -> tuple[float, float]:
        """Closed-form eigenvalues, clamped into [0, 1].

        Quadrature noise can push an eigenvalue a few 1e-13 below zero; the
        clamp keeps the entropy finite without masking real violations, which
        the constructor already rejects.
        """
        half_gap = 0.5 * math.hypot(self.rho_aa - self.rho_bb, 2.0 * abs(self.rho_ab))
        lam_hi = min(0.5 + half_gap, 1.0)
        lam_lo = max(0.5 - half_gap, 0.0)
        return lam_hi, lam_lo


def reduced_ion_density(c: ChannelAmplitudes) -> IonDensityMatrix:
    """Reduced ionic density matrix conditioned on ionization.

    rho_jj' = (1 / P_ion) * integral c_j(eps) conj(c_j'(eps)) d eps, the
    energy trace of the projected, renormalized pure state.
    """
    p_a, p_b, p_ion = ion_populations(c)
    if p_ion <= MIN_ION_POPULATION:
        raise ValueError(
            f"ion population {p_ion:.3e} too small: the post-measurement state "
            "is undefined without ionization"
        )
    coherence = complex(_trapz(c.alpha * np.conj(c.beta), c.grid.values)) / p_ion
    return IonDensityMatrix(rho_aa=p_a / p_ion, rho_bb=p_b / p_ion, rho_ab=coherence)


def von_neumann_entropy(rho: IonDensityMatrix, *, nats: bool = False) -> float:
    """Entanglement entropy -Tr(rho log2 rho) in bits (or nats on request)."""
    total = 0.0
    for lam in rho.eigenvalues():
        if lam > 0.0:
            total -= lam * math.log2(lam)
    return total * math.log(2.0) if nats else total


class DensityMatrixElements:
    """Lazily evaluated elements of the full (unconditioned) density matrix.

    The pure final state has a surviving-neutral amplitude (real, the value of
    the depletion at the end of the pulse) and the two energy-resolved channel
    amplitudes; every matrix element is a product of two of these.
    """

    def __init__(self, c: ChannelAmplitudes) -> None:
        self._grid = c.grid.values
        self._survival = c.survival
        self._channels = {"a": c.alpha, "b": c.beta}

    @property
    def rho_gg(self) -> float:
        """Population of the surviving neutral ground state."""
        return self._survival**2

    def _channel_at(self, j: str, eps):
        values = self._channels[j]
        eps = np.asarray(eps, dtype=float)
        out = np.interp(eps, self._grid, values.real) + 1j * np.interp(
            eps, self._grid, values.imag
        )
        return out if out.ndim else complex(out)

    def rho_g(self, j: str, eps):
        """Coherence between the neutral ground state and channel j."""
        return self._survival * np.conj(self._channel_at(j, eps))

    def rho(self, j: str, j_prime: str, eps, eps_prime):
        """Element between |j, eps> and |j', eps'>: conj(c_j(eps)) c_j'(eps')."""
        left = np.conj(self._channel_at(j, eps))
        right = self._channel_at(j_prime, eps_prime)
        left_arr = np.asarray(left)
        right_arr = np.asarray(right)
        if left_arr.ndim and right_arr.ndim:
            return np.multiply.outer(left_arr, right_arr)
        return left * right

    def rho_diagonal(self, j: str, eps):
        """Energy-diagonal element of channel j (its spectral density)."""
        amp = self._channel_at(j, eps)
        return np.abs(amp) ** 2


def full_density_elements(c: ChannelAmplitudes) -> DensityMatrixElements:
    """Accessors for the full density matrix built from one simulation."""
    return DensityMatrixElements(c)
