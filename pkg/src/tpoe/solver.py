"""Projections, mode-wise solves, pressure recovery, and the full pipeline.

The linear operator under study is ``A u := du/dt - Lap(u) - lam * d1(u)``
acting on solenoidal fields, together with a pressure gradient.  Everything
is applied mode by mode in spectral space; fields are band-limited, so the
applications are exact up to rounding.

Contract tolerances are relative to max norms and default to 1e-10, two
orders above double-precision accumulation error at the grid sizes this
package targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import norms
from .errors import (
    DomainMismatch,
    IncompatibleMean,
    NonSolenoidal,
    NotPurelyPeriodic,
)
from .spectral import (
    SpaceTimeField,
    SpectralField,
    forward,
    inverse,
)
from .symbols import (
    OseenParams,
    steady_symbol_grid,
    time_periodic_multiplier_grid,
)

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class SolutionBundle:
    """Full solve output: steady part v, oscillating part w, velocity
    u = v + w, pressure p, the relative residual of the momentum equation,
    and the norms applicable to the run parameters."""

    v: SpaceTimeField
    w: SpaceTimeField
    u: SpaceTimeField
    p: SpaceTimeField
    residual_norm: float
    norm_report: dict[str, float] = field(default_factory=dict)


def _require_vector(f: SpaceTimeField) -> None:
    if f.components != f.domain.n:
        raise DomainMismatch(
            f"expected a {f.domain.n}-component vector field, got {f.components}"
        )


def time_average(f: SpaceTimeField) -> SpaceTimeField:
    """Projection onto time-constant fields: the mean over one period."""
    mean = np.mean(f.samples, axis=-1, keepdims=True)
    return SpaceTimeField(f.domain, np.broadcast_to(mean, f.samples.shape).copy())


def fluctuation(f: SpaceTimeField) -> SpaceTimeField:
    """Complementary projection: the part with vanishing time average."""
    return f - time_average(f)


def project_solenoidal(spec: SpectralField) -> SpectralField:
    """Spectral Helmholtz projection: remove xi (xi . c)/|xi|^2 mode-wise.

    The zero spatial mode is left untouched (a constant is solenoidal).
    """
    domain = spec.domain
    if spec.components != domain.n:
        raise DomainMismatch("Helmholtz projection acts on vector fields")
    xi = domain.xi_grids()
    xi_sq = domain.xi_squared_grid()
    dot = np.zeros(spec.coefficients.shape[1:], dtype=complex)
    for j in range(domain.n):
        dot += xi[j] * spec.coefficients[j]
    scale = np.where(xi_sq == 0.0, 0.0, dot / np.where(xi_sq == 0.0, 1.0, xi_sq))
    out = spec.coefficients.copy()
    for j in range(domain.n):
        out[j] -= xi[j] * scale
    return SpectralField(domain, out)


def apply_helmholtz(f: SpaceTimeField) -> SpaceTimeField:
    """Helmholtz projection of a sampled vector field onto solenoidal fields."""
    _require_vector(f)
    return inverse(project_solenoidal(forward(f)), check=False)


def divergence_defect(spec: SpectralField) -> float:
    """max over modes of |xi . c(xi, k)|, the spectral divergence size."""
    domain = spec.domain
    xi = domain.xi_grids()
    dot = np.zeros(spec.coefficients.shape[1:], dtype=complex)
    for j in range(domain.n):
        dot += xi[j] * spec.coefficients[j]
    return float(np.max(np.abs(dot)))


def _check_solenoidal(spec: SpectralField, tol: float) -> None:
    scale = spec.max_abs()
    if scale > 0.0 and divergence_defect(spec) > tol * scale:
        raise NonSolenoidal(
            "input is not divergence-free within tolerance "
            f"(defect {divergence_defect(spec):.3e}, scale {scale:.3e})"
        )


def solve_time_periodic(
    f: SpaceTimeField, params: OseenParams, tol: float = DEFAULT_TOL
) -> SpaceTimeField:
    """Invert A on purely periodic solenoidal data via the solution multiplier.

    Raises
    ------
    NotPurelyPeriodic
        If the time average of ``f`` exceeds ``tol`` relative to ``max|f|``.
    NonSolenoidal
        If the spectral divergence exceeds ``tol`` relative to ``max|f^|``.
    """
    _require_vector(f)
    scale = f.max_abs()
    if scale > 0.0 and time_average(f).max_abs() > tol * scale:
        raise NotPurelyPeriodic(
            "data has nonzero time average; only the oscillating part is invertible"
        )
    spec = forward(f)
    _check_solenoidal(spec, tol)
    spec = project_solenoidal(spec)
    multiplier = time_periodic_multiplier_grid(f.domain, params)
    return inverse(
        SpectralField(f.domain, spec.coefficients * multiplier), check=False
    )


def solve_steady(
    f: SpaceTimeField, lam: float, tol: float = DEFAULT_TOL
) -> SpaceTimeField:
    """Invert the steady drift operator on time-constant solenoidal data.

    Raises
    ------
    IncompatibleMean
        If a component has nonzero spatial mean; the constant mode is not in
        the operator's range on the torus.
    NonSolenoidal
        If the spectral divergence exceeds tolerance.
    """
    _require_vector(f)
    scale = f.max_abs()
    if scale > 0.0:
        if (f - time_average(f)).max_abs() > tol * scale:
            raise ValueError("steady solve requires a time-constant field")
        mean = np.mean(f.samples, axis=tuple(range(1, f.samples.ndim)))
        if np.max(np.abs(mean)) > tol * scale:
            raise IncompatibleMean(
                "steady data has a nonzero spatial mean; no torus inverse exists"
            )
    spec = forward(f)
    _check_solenoidal(spec, tol)
    domain = f.domain
    coeff = spec.coefficients * (domain.time_mode_grid() == 0)
    coeff *= steady_symbol_grid(domain, lam)
    return inverse(SpectralField(domain, coeff), check=False)


def _pressure_coefficients(spec: SpectralField) -> np.ndarray:
    """-i (xi . f^)/|xi|^2 with the zero covector at xi = 0."""
    domain = spec.domain
    xi = domain.xi_grids()
    xi_sq = domain.xi_squared_grid()
    dot = np.zeros(spec.coefficients.shape[1:], dtype=complex)
    for j in range(domain.n):
        dot += xi[j] * spec.coefficients[j]
    safe = np.where(xi_sq == 0.0, 1.0, xi_sq)
    return np.where(xi_sq == 0.0, 0.0 + 0.0j, -1j * dot / safe)[np.newaxis]


def recover_pressure(f: SpaceTimeField) -> SpaceTimeField:
    """Scalar p with grad(p) equal to the gradient part of f.

    The gauge zeroes every spatial-constant mode, so p has zero spatial mean
    on each time slice (in particular zero space-time mean).
    """
    _require_vector(f)
    spec = forward(f)
    return inverse(SpectralField(f.domain, _pressure_coefficients(spec)), check=False)


def apply_operator(
    u: SpaceTimeField, p: SpaceTimeField, params: OseenParams
) -> SpaceTimeField:
    """Forward operator du/dt - Lap(u) - lam*d1(u) + grad(p), spectrally."""
    _require_vector(u)
    if not p.is_scalar:
        raise DomainMismatch("pressure must be scalar")
    if p.domain != u.domain:
        raise DomainMismatch("velocity and pressure domains differ")
    domain = u.domain
    uh = forward(u).coefficients
    ph = forward(p).coefficients[0]
    xi = domain.xi_grids()
    eta = domain.eta_grid()
    symbol = 1j * eta + domain.xi_squared_grid() - 1j * params.lam * xi[0]
    out = np.empty_like(uh)
    for j in range(domain.n):
        out[j] = symbol * uh[j] + 1j * xi[j] * ph
    return inverse(SpectralField(domain, out), check=False)


def apply_operator_fd(
    u: SpaceTimeField, p: SpaceTimeField, params: OseenParams
) -> SpaceTimeField:
    """Order-2 centered-difference version of :func:`apply_operator`.

    Independent of the spectral path; used as a cross-check oracle for
    residuals.  All differences wrap periodically.
    """
    _require_vector(u)
    if not p.is_scalar or p.domain != u.domain:
        raise DomainMismatch("pressure must be a scalar on the same domain")
    domain = u.domain
    s = u.samples
    dx, dt = domain.dx, domain.dt
    t_axis = s.ndim - 1

    def centered(arr: np.ndarray, axis: int, h: float) -> np.ndarray:
        return (np.roll(arr, -1, axis=axis) - np.roll(arr, 1, axis=axis)) / (2.0 * h)

    def second(arr: np.ndarray, axis: int, h: float) -> np.ndarray:
        return (
            np.roll(arr, -1, axis=axis) - 2.0 * arr + np.roll(arr, 1, axis=axis)
        ) / h**2

    out = centered(s, t_axis, dt)
    for j in range(domain.n):
        out = out - second(s, j + 1, dx)
    out = out - params.lam * centered(s, 1, dx)
    grad_p = np.stack(
        [centered(p.samples[0], j, dx) for j in range(domain.n)]
    )
    return SpaceTimeField(domain, out + grad_p)


def solve_full(
    f: SpaceTimeField,
    params: OseenParams,
    tol: float = DEFAULT_TOL,
    norm_kinds: list[norms.NormKind] | None = None,
) -> SolutionBundle:
    """Full solve of the momentum system for arbitrary vector data.

    Pipeline: Helmholtz projection first, then the time-average split; the
    steady stratum is inverted by the steady symbol, the oscillating part by
    the time-periodic multiplier, and the gradient part determines the
    pressure.  The report contains every norm applicable to
    ``(n, lam, q)``; pass ``norm_kinds`` to request specific ones instead
    (invalid requests raise ``InvalidExponent``).

    Raises
    ------
    IncompatibleMean
        If the data's steady solenoidal part has nonzero spatial mean.
    """
    _require_vector(f)
    domain = f.domain
    scale = f.max_abs()
    if scale > 0.0:
        mean = np.mean(f.samples, axis=tuple(range(1, f.samples.ndim)))
        if np.max(np.abs(mean)) > tol * scale:
            raise IncompatibleMean(
                "steady part of the data has a nonzero spatial mean; "
                "no torus solution exists"
            )

    fh = forward(f)
    p_spec = SpectralField(domain, _pressure_coefficients(fh))
    g = project_solenoidal(fh)
    steady_mask = domain.time_mode_grid() == 0
    gs = g.coefficients * steady_mask
    gp = g.coefficients * ~steady_mask

    v = inverse(
        SpectralField(domain, gs * steady_symbol_grid(domain, params.lam)),
        check=False,
    )
    w = inverse(
        SpectralField(domain, gp * time_periodic_multiplier_grid(domain, params)),
        check=False,
    )
    p = inverse(p_spec, check=False)
    u = v + w

    residual = apply_operator(u, p, params) - f
    residual_norm = residual.max_abs() / (scale if scale > 0.0 else 1.0)

    report = _norm_report(f, u, w, v, p, params, norm_kinds)
    return SolutionBundle(
        v=v, w=w, u=u, p=p, residual_norm=residual_norm, norm_report=report
    )


def _norm_report(
    f: SpaceTimeField,
    u: SpaceTimeField,
    w: SpaceTimeField,
    v: SpaceTimeField,
    p: SpaceTimeField,
    params: OseenParams,
    norm_kinds: list[norms.NormKind] | None,
) -> dict[str, float]:
    n = f.domain.n
    q = params.q
    if norm_kinds is not None:
        report: dict[str, float] = {}
        for kind in norm_kinds:
            kind.validate(n, params.lam)
            report[kind.tag.value] = _norm_value(kind, f, u, w, v, p, params)
        return report

    report = {
        "lq_data": norms.lq_norm(f, q),
        "lq_velocity": norms.lq_norm(u, q),
        "sobolev_21q_periodic": norms.sobolev_norm_21q(w, q),
    }
    steady = norms.steady_kind_for(n, params.lam, q)
    if steady is not None:
        report[steady.tag.value] = norms.steady_norm(v, steady, params.lam)
    if q < n:
        report["pressure_xp"] = norms.pressure_norm(p, q)
    return report


def _norm_value(
    kind: norms.NormKind,
    f: SpaceTimeField,
    u: SpaceTimeField,
    w: SpaceTimeField,
    v: SpaceTimeField,
    p: SpaceTimeField,
    params: OseenParams,
) -> float:
    tag = kind.tag
    if tag == norms.NormTag.LQ:
        return norms.lq_norm(u, kind.q)
    if tag == norms.NormTag.SOBOLEV_21Q:
        return norms.sobolev_norm_21q(w, kind.q)
    if tag == norms.NormTag.PRESSURE_XP:
        return norms.pressure_norm(p, kind.q)
    return norms.steady_norm(v, kind, params.lam)
