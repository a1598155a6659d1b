"""Space-time torus discretization and the group Fourier transform.

The computational domain is a periodic box of side ``L`` in ``n`` spatial
dimensions crossed with a time circle of period ``T``, sampled on a uniform
``N^n x Nt`` grid.  Dual frequencies are ``xi_j = (2*pi/L)*m_j`` for integer
``m_j in [-N/2, N/2)`` and ``eta = (2*pi/T)*k`` for integer
``k in [-Nt/2, Nt/2)``.

Transform normalization
-----------------------
The forward transform integrates with the Lebesgue measure in space and the
mean (``1/T``-weighted) measure in time::

    F(m, k) = (1/Nt) * sum_t (L/N)^n * sum_x f(x, t) * exp(-i xi.x - i eta t)

so the ``(0, 0)`` coefficient equals the space-time mean of ``f`` times
``L^n``.  The inverse carries the reciprocal weights (``1/L^n`` per spatial
mode, unit weight per time mode).  With this convention Parseval's identity
reads ``||f||_2^2 = (1/L^n) * sum |F|^2`` where the left side is the
``1/T``-time-normalized L2 norm.

Unmatched Nyquist modes (any index component equal to ``-N/2`` or ``-Nt/2``)
are zeroed on the forward transform so that real fields round-trip exactly;
band-limited fields never populate them.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainMismatch, NonHermitian


@dataclass(frozen=True)
class TorusDomain:
    """Uniform discretization of the space-time torus.

    Parameters
    ----------
    n : int
        Spatial dimension, 2 or 3.
    L : float
        Side length of the periodic spatial box (same along every axis).
    N : int
        Grid points per spatial axis; even, at least 4.
    T : float
        Time period.
    Nt : int
        Time grid points; even, at least 4.
    """

    n: int
    L: float
    N: int
    T: float
    Nt: int

    def __post_init__(self) -> None:
        if self.n not in (2, 3):
            raise ValueError(f"spatial dimension must be 2 or 3, got {self.n}")
        if self.N < 4 or self.N % 2 != 0:
            raise ValueError(f"N must be even and >= 4, got {self.N}")
        if self.Nt < 4 or self.Nt % 2 != 0:
            raise ValueError(f"Nt must be even and >= 4, got {self.Nt}")
        if not self.L > 0:
            raise ValueError(f"box side L must be positive, got {self.L}")
        if not self.T > 0:
            raise ValueError(f"period T must be positive, got {self.T}")

    # -- grid geometry -----------------------------------------------------

    @property
    def grid_shape(self) -> tuple[int, ...]:
        """Shape of one scalar component: n spatial axes then time."""
        return (self.N,) * self.n + (self.Nt,)

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def dt(self) -> float:
        return self.T / self.Nt

    @property
    def cell_volume(self) -> float:
        """Space-time quadrature weight (L/N)^n * (1/Nt) of one grid cell."""
        return self.dx**self.n / self.Nt

    def spatial_axis(self) -> np.ndarray:
        """Sample points 0, L/N, ..., L - L/N along one spatial axis."""
        return np.arange(self.N) * self.dx

    def time_axis(self) -> np.ndarray:
        """Sample points 0, T/Nt, ..., T - T/Nt along the time axis."""
        return np.arange(self.Nt) * self.dt

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        """Full coordinate arrays (X1, ..., Xn, Tm), each of ``grid_shape``."""
        axes = [self.spatial_axis()] * self.n + [self.time_axis()]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    # -- dual grid ---------------------------------------------------------

    def spatial_modes(self) -> np.ndarray:
        """Integer spatial frequencies in FFT order: 0..N/2-1, -N/2..-1."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N)

    def time_modes(self) -> np.ndarray:
        """Integer temporal frequencies in FFT order."""
        return np.fft.fftfreq(self.Nt, d=1.0 / self.Nt)

    def _axis_view(self, values: np.ndarray, axis: int) -> np.ndarray:
        """Reshape a 1-d mode array to broadcast along ``axis`` of grid_shape."""
        shape = [1] * (self.n + 1)
        shape[axis] = len(values)
        return values.reshape(shape)

    def xi_grids(self) -> list[np.ndarray]:
        """Broadcastable arrays of xi_j = (2*pi/L)*m_j, one per spatial axis."""
        scale = 2.0 * np.pi / self.L
        return [
            self._axis_view(scale * self.spatial_modes(), j) for j in range(self.n)
        ]

    def eta_grid(self) -> np.ndarray:
        """Broadcastable array of eta = (2*pi/T)*k along the time axis."""
        return self._axis_view(2.0 * np.pi / self.T * self.time_modes(), self.n)

    def time_mode_grid(self) -> np.ndarray:
        """Broadcastable array of the integer time index k."""
        return self._axis_view(self.time_modes(), self.n)

    def xi_squared_grid(self) -> np.ndarray:
        """Broadcastable |xi|^2 over the dual grid."""
        out = np.zeros((1,) * (self.n + 1))
        for xi in self.xi_grids():
            out = out + xi**2
        return out

    def nyquist_mask(self) -> np.ndarray:
        """Boolean grid, True on modes kept by the truncated dual grid."""
        keep = np.ones(self.grid_shape, dtype=bool)
        for j in range(self.n):
            keep &= self._axis_view(np.abs(self.spatial_modes()) != self.N // 2, j)
        keep &= self._axis_view(np.abs(self.time_modes()) != self.Nt // 2, self.n)
        return keep

    def refine(self, N: int, Nt: int) -> "TorusDomain":
        """Same continuum torus resampled at a finer grid."""
        if N < self.N or Nt < self.Nt:
            raise ValueError("refinement must not reduce the grid")
        return dataclasses.replace(self, N=N, Nt=Nt)


class DualIndex(NamedTuple):
    """One point of the dual grid: integer spatial multi-index and time index."""

    m: tuple[int, ...]
    k: int

    def frequencies(self, domain: TorusDomain) -> tuple[tuple[float, ...], float]:
        """Continuous frequencies (xi, eta) of this dual-grid point."""
        xi = tuple(2.0 * np.pi / domain.L * mj for mj in self.m)
        eta = 2.0 * np.pi / domain.T * self.k
        return xi, eta


def _check_samples(domain: TorusDomain, samples: np.ndarray) -> np.ndarray:
    expected = domain.grid_shape
    if samples.ndim != domain.n + 2 or samples.shape[1:] != expected:
        raise DomainMismatch(
            f"samples shape {samples.shape} does not match "
            f"(components, {', '.join(map(str, expected))})"
        )
    if samples.shape[0] not in (1, domain.n):
        raise DomainMismatch(
            f"field must have 1 or {domain.n} components, got {samples.shape[0]}"
        )
    if not np.all(np.isfinite(samples)):
        raise DomainMismatch("samples contain non-finite values")
    return samples


@dataclass(frozen=True)
class SpaceTimeField:
    """Real field sampled on the physical space-time grid.

    ``samples`` has shape ``(components, N, ..., N, Nt)`` with components
    first; scalars carry a single component.
    """

    domain: TorusDomain
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=float)
        _check_samples(self.domain, arr)
        object.__setattr__(self, "samples", arr)

    @classmethod
    def scalar(cls, domain: TorusDomain, values: np.ndarray) -> "SpaceTimeField":
        """Wrap a (N, ..., N, Nt) array as a one-component field."""
        return cls(domain, np.asarray(values, dtype=float)[np.newaxis])

    @classmethod
    def vector(cls, domain: TorusDomain, values: np.ndarray) -> "SpaceTimeField":
        """Wrap a (n, N, ..., N, Nt) array as an n-component field."""
        return cls(domain, values)

    @classmethod
    def zeros(cls, domain: TorusDomain, components: int) -> "SpaceTimeField":
        return cls(domain, np.zeros((components,) + domain.grid_shape))

    @property
    def components(self) -> int:
        return self.samples.shape[0]

    @property
    def is_scalar(self) -> bool:
        return self.components == 1

    @property
    def scalar_samples(self) -> np.ndarray:
        if not self.is_scalar:
            raise DomainMismatch("field is not scalar")
        return self.samples[0]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def _binary(self, other: "SpaceTimeField", op) -> "SpaceTimeField":
        if not isinstance(other, SpaceTimeField):
            return NotImplemented
        if other.domain != self.domain or other.components != self.components:
            raise DomainMismatch("fields live on different domains")
        return SpaceTimeField(self.domain, op(self.samples, other.samples))

    def __add__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return self._binary(other, np.add)

    def __sub__(self, other: "SpaceTimeField") -> "SpaceTimeField":
        return self._binary(other, np.subtract)

    def __mul__(self, scale: float) -> "SpaceTimeField":
        return SpaceTimeField(self.domain, self.samples * float(scale))

    __rmul__ = __mul__

    def __neg__(self) -> "SpaceTimeField":
        return SpaceTimeField(self.domain, -self.samples)


@dataclass(frozen=True)
class SpectralField:
    """Complex coefficients on the truncated dual grid, same layout as samples.

    When the field represents a real ``SpaceTimeField`` the coefficients are
    conjugate-symmetric, ``coeff(-m, -k) == conj(coeff(m, k))``, and the
    Nyquist rows vanish identically.
    """

    domain: TorusDomain
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.coefficients, dtype=complex)
        expected = self.domain.grid_shape
        if arr.ndim != self.domain.n + 2 or arr.shape[1:] != expected:
            raise DomainMismatch(
                f"coefficients shape {arr.shape} does not match "
                f"(components, {', '.join(map(str, expected))})"
            )
        if arr.shape[0] not in (1, self.domain.n):
            raise DomainMismatch(
                f"field must have 1 or {self.domain.n} components, got {arr.shape[0]}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainMismatch("coefficients contain non-finite values")
        object.__setattr__(self, "coefficients", arr)

    @property
    def components(self) -> int:
        return self.coefficients.shape[0]

    @classmethod
    def zeros(cls, domain: TorusDomain, components: int) -> "SpectralField":
        return cls(domain, np.zeros((components,) + domain.grid_shape, dtype=complex))

    def _conjugate_flip(self) -> np.ndarray:
        """conj(coeff(-m, -k)) rearranged onto the (m, k) layout."""
        c = self.coefficients
        for axis in range(1, c.ndim):
            c = np.roll(np.flip(c, axis=axis), 1, axis=axis)
        return np.conj(c)

    def hermitian_defect(self) -> float:
        """Max deviation from conjugate symmetry (absolute)."""
        return float(np.max(np.abs(self.coefficients - self._conjugate_flip())))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    def get(self, index: DualIndex) -> np.ndarray:
        """Coefficient vector at one dual-grid point (length = components)."""
        if len(index.m) != self.domain.n:
            raise DomainMismatch("dual index dimension mismatch")
        pos = tuple(mj % self.domain.N for mj in index.m) + (
            index.k % self.domain.Nt,
        )
        return self.coefficients[(slice(None),) + pos]


def _transform_axes(domain: TorusDomain) -> tuple[int, ...]:
    return tuple(range(1, domain.n + 2))


def forward(field: SpaceTimeField) -> SpectralField:
    """Forward group transform; see module docstring for the normalization.

    Nyquist modes are zeroed so that the result always satisfies the
    truncated-grid invariants.
    """
    domain = field.domain
    coeff = np.fft.fftn(field.samples, axes=_transform_axes(domain))
    coeff *= domain.dx**domain.n / domain.Nt
    coeff *= domain.nyquist_mask()
    return SpectralField(domain, coeff)


def inverse(
    spec: SpectralField, tol: float = 1e-12, check: bool = True
) -> SpaceTimeField:
    """Inverse transform back to real samples.

    ``check=False`` skips the symmetry validation; internal pipeline steps
    use it on spectra that are conjugate-symmetric by construction (forward
    transforms of real fields times conjugate-even multipliers), where a
    relative recheck would misfire on cancellation residue.

    Raises
    ------
    NonHermitian
        If the coefficients violate conjugate symmetry (relative to the
        largest coefficient) or populate Nyquist modes beyond ``tol``.
    """
    domain = spec.domain
    scale = spec.max_abs()
    if check and scale > 0.0:
        if spec.hermitian_defect() > tol * scale:
            raise NonHermitian(
                "coefficients are not conjugate-symmetric; "
                "a real inverse does not exist"
            )
        nyquist = np.max(np.abs(spec.coefficients * ~domain.nyquist_mask()))
        if nyquist > tol * scale:
            raise NonHermitian("Nyquist modes must vanish on the truncated grid")
    out = np.fft.ifftn(spec.coefficients, axes=_transform_axes(domain))
    out *= domain.Nt / domain.dx**domain.n
    return SpaceTimeField(domain, out.real)


def spectral_derivative(
    spec: SpectralField, alpha: Sequence[int], beta: int = 0
) -> SpectralField:
    """Multiply coefficients by (i*xi)^alpha * (i*eta)^beta.

    Orders are limited to those appearing in the anisotropic Sobolev norm:
    ``sum(alpha) <= 2`` and ``beta <= 1``.
    """
    domain = spec.domain
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != domain.n:
        raise DomainMismatch(
            f"alpha must have {domain.n} entries, got {len(alpha)}"
        )
    if any(a < 0 for a in alpha) or sum(alpha) > 2:
        raise ValueError(f"spatial order |alpha| must be in 0..2, got {alpha}")
    if beta not in (0, 1):
        raise ValueError(f"time order beta must be 0 or 1, got {beta}")
    factor = np.ones((1,) * (domain.n + 1), dtype=complex)
    for j, a in enumerate(alpha):
        if a:
            factor = factor * (1j * domain.xi_grids()[j]) ** a
    if beta:
        factor = factor * (1j * domain.eta_grid())
    return SpectralField(domain, spec.coefficients * factor)


def plancherel_norm(spec: SpectralField) -> float:
    """Discrete L2 norm computed from coefficients: sqrt(sum|F|^2 / L^n).

    Equals the 1/T-time-normalized L2 norm of the represented field.
    """
    total = float(np.sum(np.abs(spec.coefficients) ** 2))
    return float(np.sqrt(total / spec.domain.L**spec.domain.n))


def embed_spectrum(spec: SpectralField, fine: TorusDomain) -> SpectralField:
    """Zero-pad coefficients onto a finer dual grid of the same torus.

    Coefficients under this normalization are resolution-independent, so the
    embedding represents the identical band-limited function.
    """
    coarse = spec.domain
    if (
        fine.n != coarse.n
        or fine.L != coarse.L
        or fine.T != coarse.T
        or fine.N < coarse.N
        or fine.Nt < coarse.Nt
    ):
        raise DomainMismatch("target grid must refine the source torus")
    out = np.zeros((spec.components,) + fine.grid_shape, dtype=complex)
    index: list[np.ndarray] = []
    for axis_modes, size in [(coarse.spatial_modes(), fine.N)] * coarse.n + [
        (coarse.time_modes(), fine.Nt)
    ]:
        index.append(np.asarray(axis_modes, dtype=int) % size)
    src = spec.coefficients * coarse.nyquist_mask()
    out[np.ix_(np.arange(spec.components), *index)] = src
    return SpectralField(fine, out)


def refine(field: SpaceTimeField, N: int, Nt: int) -> SpaceTimeField:
    """Band-limited interpolation of a field onto a finer grid."""
    fine = field.domain.refine(N, Nt)
    return inverse(embed_spectrum(forward(field), fine))
