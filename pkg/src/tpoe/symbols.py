"""Pointwise evaluation of the Fourier symbols of the solver pipeline.

All functions here are pure and accept either scalars or numpy arrays for
the frequency arguments.  The time-periodic multiplier on the dual grid and
its Euclidean counterpart share the same denominator arithmetic, so their
agreement at integer time frequencies is exact, not approximate: on integers
the cut-off bump collapses to the k == 0 indicator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMode
from .spectral import DualIndex, TorusDomain


@dataclass(frozen=True)
class OseenParams:
    """Linearization constants: drift lam (0 selects Stokes), period T,
    and the Lebesgue exponent q used for norm reporting."""

    lam: float
    T: float
    q: float

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise ValueError(f"period T must be positive, got {self.T}")
        if not 1.0 < self.q < np.inf:
            raise ValueError(f"exponent q must lie in (1, inf), got {self.q}")

    @property
    def is_stokes(self) -> bool:
        return self.lam == 0.0


@dataclass(frozen=True)
class CutoffSpec:
    """Shape of the smooth temporal cut-off bump.

    The bump equals 1 on ``|eta| <= inner``, 0 on ``|eta| >= outer`` and
    interpolates smoothly in between.  The default radii (1/2, 1) make the
    bump reduce to the k == 0 indicator on integer frequencies.  Widened
    radii exist only as a test hook for breaking that reduction on purpose.
    """

    inner: float = 0.5
    outer: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.inner < self.outer:
            raise ValueError(
                f"need 0 < inner < outer, got ({self.inner}, {self.outer})"
            )


DEFAULT_CUTOFF = CutoffSpec()


def _bump_seed(t: np.ndarray) -> np.ndarray:
    """exp(-1/t) for t > 0, identically 0 for t <= 0."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0.0, t, 1.0)
    return np.where(t > 0.0, np.exp(-1.0 / safe), 0.0)


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C-infinity monotone ramp: 0 for t <= 0, 1 for t >= 1."""
    g = _bump_seed(t)
    return g / (g + _bump_seed(1.0 - t))


def cutoff_chi(eta, spec: CutoffSpec = DEFAULT_CUTOFF):
    """Smooth even bump in the temporal frequency; values in [0, 1].

    Plateau value 1 inside ``spec.inner``, 0 outside ``spec.outer``, and the
    smoothstep ramp ``s((outer - |eta|)/(outer - inner))`` in between with
    ``s(t) = g(t)/(g(t) + g(1-t))``, ``g(t) = exp(-1/t)``.
    """
    a = np.abs(np.asarray(eta, dtype=float))
    ramp = _smoothstep((spec.outer - a) / (spec.outer - spec.inner))
    out = np.where(a <= spec.inner, 1.0, np.where(a >= spec.outer, 0.0, ramp))
    if out.ndim == 0:
        return float(out)
    return out


def _denominator(xi: np.ndarray, eta, lam: float):
    """|xi|^2 + i*(eta - lam*xi_1); the single shared arithmetic path."""
    xi_sq = np.sum(xi**2, axis=0)
    return xi_sq + 1j * (eta - lam * xi[0])


def phi_embed(
    idx: DualIndex, domain: TorusDomain
) -> tuple[tuple[float, ...], float]:
    """Dual-group embedding of a grid point into Euclidean frequencies.

    The spatial frequency xi = (2*pi/L)*m passes through unchanged; the
    integer time index maps to eta = (2*pi/T)*k exactly.
    """
    return idx.frequencies(domain)


def evaluate_M(idx: DualIndex, params: OseenParams, domain: TorusDomain) -> complex:
    """Solution multiplier on the dual grid.

    Returns 0 on the whole steady stratum k == 0 (exact integer test) and
    ``1 / (|xi|^2 + i*((2*pi/T)*k - lam*xi_1))`` otherwise, with
    ``xi = (2*pi/L)*m``.
    """
    if idx.k == 0:
        return 0.0 + 0.0j
    xi, eta = phi_embed(idx, domain)
    return complex(1.0 / _denominator(np.asarray(xi, dtype=float), eta, params.lam))


def evaluate_m(
    xi, eta, params: OseenParams, cutoff: CutoffSpec = DEFAULT_CUTOFF
):
    """Euclidean counterpart of the solution multiplier.

    ``(1 - chi((T/(2*pi))*eta)) / (|xi|^2 + i*(eta - lam*xi_1))``; the
    numerator vanishes on a neighborhood of the denominator's only zero, so
    the value is finite (and smooth) everywhere.

    ``xi`` has the n components along its first axis; scalar and array
    arguments are both accepted.
    """
    xi = np.asarray(xi, dtype=float)
    eta_arr = np.asarray(eta, dtype=float)
    weight = 1.0 - np.asarray(cutoff_chi(params.T / (2.0 * np.pi) * eta_arr, cutoff))
    denom = _denominator(xi, eta_arr, params.lam)
    safe = np.where(weight == 0.0, 1.0, denom)
    out = np.where(weight == 0.0, 0.0 + 0.0j, weight / safe)
    if out.ndim == 0:
        return complex(out)
    return out


def helmholtz_symbol(xi) -> np.ndarray:
    """Projector matrix I - xi (x) xi / |xi|^2 onto the plane normal to xi.

    Returns the identity at xi = 0: the spatial-constant mode is trivially
    solenoidal.
    """
    xi = np.asarray(xi, dtype=float)
    n = len(xi)
    xi_sq = float(np.dot(xi, xi))
    if xi_sq == 0.0:
        return np.eye(n)
    return np.eye(n) - np.outer(xi, xi) / xi_sq


def steady_symbol(xi, lam: float) -> complex:
    """Mode inverse 1 / (|xi|^2 - i*lam*xi_1) of the steady drift operator.

    Raises
    ------
    SingularMode
        At xi = 0, where the steady operator has no inverse.
    """
    xi = np.asarray(xi, dtype=float)
    xi_sq = float(np.dot(xi, xi))
    if xi_sq == 0.0:
        raise SingularMode("steady operator is not invertible on the zero mode")
    return complex(1.0 / (xi_sq - 1j * lam * xi[0]))


def pressure_symbol(xi) -> np.ndarray:
    """Covector -i*xi/|xi|^2 mapping forcing to the pressure coefficient.

    Returns the zero covector at xi = 0 (mean-free pressure gauge).
    """
    xi = np.asarray(xi, dtype=float)
    xi_sq = float(np.dot(xi, xi))
    if xi_sq == 0.0:
        return np.zeros(len(xi), dtype=complex)
    return -1j * xi / xi_sq


def time_periodic_multiplier_grid(
    domain: TorusDomain, params: OseenParams
) -> np.ndarray:
    """Vectorized solution multiplier over the full dual grid.

    Broadcastable over ``domain.grid_shape``; same formula as
    :func:`evaluate_M` mode by mode.
    """
    xi = domain.xi_grids()
    eta = domain.eta_grid()
    xi_sq = domain.xi_squared_grid()
    k = domain.time_mode_grid()
    denom = xi_sq + 1j * (eta - params.lam * xi[0])
    safe = np.where(k == 0, 1.0, denom)
    return np.where(k == 0, 0.0 + 0.0j, 1.0 / safe)


def steady_symbol_grid(domain: TorusDomain, lam: float) -> np.ndarray:
    """Vectorized steady inverse over the spatial dual grid (zero mode -> 0).

    The caller is responsible for rejecting data with content on the zero
    mode; this grid silently annihilates it.
    """
    xi = domain.xi_grids()
    xi_sq = domain.xi_squared_grid()
    denom = xi_sq - 1j * lam * xi[0]
    safe = np.where(xi_sq == 0.0, 1.0, denom)
    return np.where(xi_sq == 0.0, 0.0 + 0.0j, 1.0 / safe)
