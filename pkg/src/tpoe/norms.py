"""Quadrature of every norm used by the solve reports.

All integrals are rectangle-rule sums on the periodic grid: exact for
band-limited integrands when the exponent is an even integer, since the
integrand is then itself a trigonometric polynomial.  For any other
exponent ``|f|^q`` is not band-limited; the field is spectrally oversampled
(factor 2 by default) before quadrature, which bounds the aliasing error
but does not remove it.

Spatial Lebesgue norms are taken verbatim over the periodic box.  On the
whole space these exponents encode decay at infinity; a periodic box has no
infinity, so that meaning is not represented here -- only the formulas are.
Time integrals carry the ``1/T`` normalization throughout, which makes the
space-time norm of a time-constant field coincide with its spatial norm.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidExponent
from .spectral import (
    SpaceTimeField,
    SpectralField,
    TorusDomain,
    embed_spectrum,
    forward,
    inverse,
    spectral_derivative,
)

DEFAULT_REFINEMENT = 2


class NormTag(str, Enum):
    LQ = "lq"
    SOBOLEV_21Q = "sobolev_21q"
    STEADY_STOKES = "steady_stokes"
    STEADY_OSEEN = "steady_oseen"
    STEADY_OSEEN_2D = "steady_oseen_2d"
    PRESSURE_XP = "pressure_xp"


STEADY_TAGS = (NormTag.STEADY_STOKES, NormTag.STEADY_OSEEN, NormTag.STEADY_OSEEN_2D)


@dataclass(frozen=True)
class NormKind:
    """A norm family plus its Lebesgue exponent.

    ``validate`` enforces the admissible parameter ranges:

    * steady Stokes: n >= 3, lam == 0, q in (1, n/2)
    * steady Oseen: n >= 3, lam != 0, q in (1, (n+1)/2)
    * steady 2-d Oseen: n == 2, lam != 0, q in (1, 3/2)
    * pressure: q in (1, n)
    * plain Lq and the anisotropic Sobolev norm: q in (1, inf)
    """

    tag: NormTag
    q: float

    def validate(self, n: int, lam: float = 0.0) -> None:
        q = self.q
        if not 1.0 < q < np.inf:
            raise InvalidExponent(f"exponent must lie in (1, inf), got {q}")
        if self.tag == NormTag.STEADY_STOKES:
            if n < 3:
                raise InvalidExponent("steady Stokes norm needs n >= 3")
            if lam != 0.0:
                raise InvalidExponent("steady Stokes norm needs lam == 0")
            if not q < n / 2:
                raise InvalidExponent(
                    f"steady Stokes norm needs q in (1, n/2); got q={q}, n={n}"
                )
        elif self.tag == NormTag.STEADY_OSEEN:
            if n < 3:
                raise InvalidExponent("steady Oseen norm needs n >= 3")
            if lam == 0.0:
                raise InvalidExponent("steady Oseen norm needs lam != 0")
            if not q < (n + 1) / 2:
                raise InvalidExponent(
                    f"steady Oseen norm needs q in (1, (n+1)/2); got q={q}, n={n}"
                )
        elif self.tag == NormTag.STEADY_OSEEN_2D:
            if n != 2:
                raise InvalidExponent("2-d steady Oseen norm needs n == 2")
            if lam == 0.0:
                raise InvalidExponent("2-d steady Oseen norm needs lam != 0")
            if not q < 1.5:
                raise InvalidExponent(
                    f"2-d steady Oseen norm needs q in (1, 3/2); got q={q}"
                )
        elif self.tag == NormTag.PRESSURE_XP:
            if not q < n:
                raise InvalidExponent(
                    f"pressure norm needs q in (1, n); got q={q}, n={n}"
                )


def steady_kind_for(n: int, lam: float, q: float) -> NormKind | None:
    """Steady norm family applicable to (n, lam, q), or None.

    There is no steady space for n == 2 with lam == 0; that combination is
    intentionally absent.
    """
    for tag in STEADY_TAGS:
        kind = NormKind(tag, q)
        try:
            kind.validate(n, lam)
        except InvalidExponent:
            continue
        return kind
    return None


def _is_even_integer(q: float) -> bool:
    return float(q).is_integer() and int(q) % 2 == 0


def _auto_refine(*exponents: float) -> int:
    if all(_is_even_integer(q) for q in exponents):
        return 1
    return DEFAULT_REFINEMENT


def _refined(spec: SpectralField, refinement: int) -> SpectralField:
    if refinement == 1:
        return spec
    d = spec.domain
    return embed_spectrum(spec, d.refine(d.N * refinement, d.Nt * refinement))


def _magnitude(samples: np.ndarray) -> np.ndarray:
    """Pointwise Euclidean magnitude over the leading component axis."""
    if samples.shape[0] == 1:
        return np.abs(samples[0])
    return np.sqrt(np.sum(samples**2, axis=0))


def _spacetime_lq(samples: np.ndarray, domain: TorusDomain, q: float) -> float:
    """((1/T) integral |.|^q dx dt)^(1/q) by the rectangle rule."""
    g = _magnitude(samples)
    return float((np.sum(g**q) * domain.cell_volume) ** (1.0 / q))


def lq_norm(
    f: SpaceTimeField, q: float, refinement: int | None = None
) -> float:
    """Space-time Lebesgue norm with 1/T-normalized time measure.

    ``refinement`` overrides the oversampling factor; by default fields are
    oversampled x2 unless ``q`` is an even integer (where the rectangle rule
    is exact for band-limited fields).
    """
    if not 1.0 < q < np.inf:
        raise InvalidExponent(f"exponent must lie in (1, inf), got {q}")
    r = _auto_refine(q) if refinement is None else refinement
    spec = _refined(forward(f), r)
    return _spacetime_lq(inverse(spec, check=False).samples, spec.domain, q)


def _multi_indices(n: int, max_order: int) -> list[tuple[int, ...]]:
    out = []
    for total in range(max_order + 1):
        for combo in itertools.combinations_with_replacement(range(n), total):
            alpha = [0] * n
            for j in combo:
                alpha[j] += 1
            out.append(tuple(alpha))
    return out


def sobolev_norm_21q(
    u: SpaceTimeField, q: float, refinement: int | None = None
) -> float:
    """Anisotropic norm: q-sum of ||d_x^alpha u||_q over |alpha| <= 2 plus
    ||d_t^beta u||_q over beta <= 1.

    Both sums include the underived term, so ||u||_q^q enters twice; the
    duplication is kept deliberately to match the defining display.
    """
    if not 1.0 < q < np.inf:
        raise InvalidExponent(f"exponent must lie in (1, inf), got {q}")
    r = _auto_refine(q) if refinement is None else refinement
    spec = forward(u)
    zero_alpha = (0,) * u.domain.n
    total = 0.0
    for alpha in _multi_indices(u.domain.n, 2):
        total += _term_lq(spec, alpha, 0, q, r) ** q
    for beta in (0, 1):
        total += _term_lq(spec, zero_alpha, beta, q, r) ** q
    return float(total ** (1.0 / q))


def _term_lq(
    spec: SpectralField, alpha: tuple[int, ...], beta: int, q: float, refinement: int
) -> float:
    ds = _refined(spectral_derivative(spec, alpha, beta), refinement)
    return _spacetime_lq(inverse(ds, check=False).samples, ds.domain, q)


def _stack_derivatives(
    spec: SpectralField, orders: list[tuple[int, ...]], refinement: int
) -> tuple[np.ndarray, TorusDomain]:
    """Concatenate all requested spatial derivatives into one component stack."""
    blocks = []
    dom = None
    for alpha in orders:
        ds = _refined(spectral_derivative(spec, alpha, 0), refinement)
        dom = ds.domain
        blocks.append(inverse(ds, check=False).samples)
    return np.concatenate(blocks, axis=0), dom


def steady_norm(v: SpaceTimeField, kind: NormKind, lam: float) -> float:
    """Weighted steady-state norm of a time-constant solenoidal field.

    The three families share the second-gradient term ``||grad^2 v||_q``
    (Frobenius magnitude over all ordered derivative pairs) and differ in
    their weighted lower-order terms:

    * Stokes: ``||v||_{nq/(n-2q)} + ||grad v||_{nq/(n-q)} + ||grad^2 v||_q``
    * Oseen: ``|lam|^{2/(n+1)} ||v||_{(n+1)q/(n+1-2q)}
      + |lam|^{1/(n+1)} ||grad v||_{(n+1)q/(n+1-q)}
      + |lam| ||d1 v||_q + ||grad^2 v||_q``
    * 2-d Oseen: the n = 2 Oseen terms plus
      ``|lam| ||grad v_2||_q + |lam| ||v_2||_{2q/(2-q)}``

    Because the field is time-constant, the 1/T-normalized space-time
    quadrature equals the spatial norm over the box.
    """
    if kind.tag not in STEADY_TAGS:
        raise ValueError(f"{kind.tag} is not a steady norm family")
    n = v.domain.n
    kind.validate(n, lam)
    if v.components != n:
        raise ValueError(f"steady norms act on {n}-component fields")
    scale = v.max_abs()
    if scale > 0.0:
        drift = np.max(
            np.abs(v.samples - np.mean(v.samples, axis=-1, keepdims=True))
        )
        if drift > 1e-10 * scale:
            raise ValueError("steady norms require a time-constant field")
    q = kind.q
    spec = forward(v)
    first = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    second = [
        tuple((j == a) + (j == b) for j in range(n))
        for a in range(n)
        for b in range(n)
    ]

    def block_norm(orders: list[tuple[int, ...]], exponent: float) -> float:
        r = _auto_refine(exponent)
        samples, dom = _stack_derivatives(spec, orders, r)
        return _spacetime_lq(samples, dom, exponent)

    hess = block_norm(second, q)
    if kind.tag == NormTag.STEADY_STOKES:
        return (
            block_norm([(0,) * n], n * q / (n - 2 * q))
            + block_norm(first, n * q / (n - q))
            + hess
        )
    m = n + 1
    weight_v = abs(lam) ** (2.0 / m)
    weight_grad = abs(lam) ** (1.0 / m)
    value = (
        weight_v * block_norm([(0,) * n], m * q / (m - 2 * q))
        + weight_grad * block_norm(first, m * q / (m - q))
        + abs(lam) * block_norm([first[0]], q)
        + hess
    )
    if kind.tag == NormTag.STEADY_OSEEN_2D:
        value += abs(lam) * _component_gradient_lq(spec, first, q)
        value += abs(lam) * _component_lq(v, 1, 2 * q / (2 - q))
    return float(value)


def _component_gradient_lq(
    spec: SpectralField, first: list[tuple[int, ...]], q: float
) -> float:
    """||grad v_2||_q for the 2-d Oseen family."""
    r = _auto_refine(q)
    blocks = []
    dom = None
    for alpha in first:
        ds = _refined(spectral_derivative(spec, alpha, 0), r)
        dom = ds.domain
        blocks.append(inverse(ds, check=False).samples[1][np.newaxis])
    return _spacetime_lq(np.concatenate(blocks, axis=0), dom, q)


def _component_lq(v: SpaceTimeField, component: int, exponent: float) -> float:
    r = _auto_refine(exponent)
    spec = _refined(forward(v), r)
    samples = inverse(spec, check=False).samples[component][np.newaxis]
    return _spacetime_lq(samples, spec.domain, exponent)


def pressure_norm(p: SpaceTimeField, q: float, refinement: int | None = None) -> float:
    """Mixed-exponent pressure norm.

    ``((1/T) int_0^T ||p(., t)||_{nq/(n-q)}^q + ||grad p(., t)||_q^q dt)^{1/q}``
    with spatial slice norms inside and the q-integral over time outside.
    """
    n = p.domain.n
    NormKind(NormTag.PRESSURE_XP, q).validate(n)
    if not p.is_scalar:
        raise InvalidExponent("pressure norm applies to scalar fields")
    a = n * q / (n - q)
    r = _auto_refine(a, q) if refinement is None else refinement
    spec = _refined(forward(p), r)
    dom = spec.domain
    samples = inverse(spec, check=False).samples[0]
    grads = np.stack(
        [
            inverse(
                spectral_derivative(spec, tuple(int(i == j) for i in range(n)), 0),
                check=False,
            ).samples[0]
            for j in range(n)
        ]
    )
    spatial_axes = tuple(range(n))
    dv = dom.dx**n
    slice_a = (np.sum(np.abs(samples) ** a, axis=spatial_axes) * dv) ** (1.0 / a)
    grad_mag = np.sqrt(np.sum(grads**2, axis=0))
    slice_g = (np.sum(grad_mag**q, axis=spatial_axes) * dv) ** (1.0 / q)
    return float((np.mean(slice_a**q + slice_g**q)) ** (1.0 / q))
