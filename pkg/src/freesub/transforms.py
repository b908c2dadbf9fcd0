"""Analytic transforms of spectral measures.

Line measures get the Cauchy transform G(z) = integral 1/(z - t) dmu(t),
its reciprocal F = 1/G, and the shift h = F - z whose imaginary part is
nonnegative on the upper half plane.  Circle measures get the resolvent
K(g) = integral 1/(zeta - g) dnu(zeta) and the moment series
psi(z) = sum_{k>=1} m_k z^k together with eta = psi/(1 + psi).

All evaluators integrate the stored quadrature data exactly and are
vectorized over the evaluation point.
"""

import numpy as np

from .errors import DomainError, NonPositiveDensity, ZeroTransform
from .measures import CircleMeasure, GridSpec, LineMeasure

_NODE_CLEARANCE = 1e-12


def _as_points(z):
    pts = np.asarray(z, dtype=complex)
    return pts, pts.ndim == 0


def _restore(values, scalar):
    return complex(values[()]) if scalar else values


def cauchy_transform(measure: LineMeasure, z):
    """G(z) = integral 1/(z - t) dmu(t); z off the support, vectorized."""
    if not isinstance(measure, LineMeasure):
        raise TypeError("cauchy_transform expects a LineMeasure")
    pts, scalar = _as_points(z)
    t, w = measure.quadrature()
    diff = pts[..., None] - t
    clearance = _NODE_CLEARANCE * max(1.0, measure.support_radius())
    if np.any(np.abs(diff) < clearance):
        raise DomainError("evaluation point touches a quadrature node of the measure")
    return _restore(np.sum(w / diff, axis=-1), scalar)


def reciprocal_cauchy(measure: LineMeasure, z):
    """F(z) = 1/G(z)."""
    g = np.asarray(cauchy_transform(measure, z))
    if np.any(np.abs(g) < 1e-300):
        raise ZeroTransform("Cauchy transform vanishes at an evaluation point")
    pts, scalar = _as_points(z)
    return _restore(1.0 / g, scalar)


def h_transform(measure: LineMeasure, z):
    """h(z) = F(z) - z; maps the upper half plane into its closure."""
    pts, scalar = _as_points(z)
    f = np.asarray(reciprocal_cauchy(measure, pts))
    return _restore(f - pts, scalar)


def circle_cauchy(measure: CircleMeasure, g):
    """K(g) = integral 1/(zeta - g) dnu(zeta); g off the unit circle."""
    if not isinstance(measure, CircleMeasure):
        raise TypeError("circle_cauchy expects a CircleMeasure")
    pts, scalar = _as_points(g)
    zeta = measure.unit_nodes()
    _, w = measure.quadrature()
    diff = zeta - pts[..., None]
    if np.any(np.abs(diff) < _NODE_CLEARANCE):
        raise DomainError("evaluation point touches a quadrature node of the measure")
    return _restore(np.sum(w / diff, axis=-1), scalar)


def psi_transform(measure: CircleMeasure, z):
    """Moment series psi(z) = sum_{k>=1} m_k z^k inside the unit disk.

    Uses psi(z) = -1 - K(1/z)/z, which continues the series to any z
    with |z| != 1; psi(0) = 0.
    """
    pts, scalar = _as_points(z)
    out = np.zeros(pts.shape, dtype=complex)
    nz = np.abs(pts) > 1e-300
    if np.any(nz):
        zz = pts[nz]
        out[nz] = -1.0 - np.asarray(circle_cauchy(measure, 1.0 / zz)) / zz
    return _restore(out, scalar)


def eta_transform(measure: CircleMeasure, z):
    """eta(z) = psi(z)/(1 + psi(z)), the moment-generating ratio."""
    pts, scalar = _as_points(z)
    psi = np.asarray(psi_transform(measure, pts))
    denom = 1.0 + psi
    if np.any(np.abs(denom) < 1e-14 * (1.0 + np.abs(psi))):
        raise ZeroTransform("1 + psi vanishes at an evaluation point")
    return _restore(psi / denom, scalar)


def _lagrange_at_zero(etas):
    etas = np.asarray(etas, dtype=float)
    coeff = np.empty(etas.size)
    for j in range(etas.size):
        others = np.delete(etas, j)
        coeff[j] = np.prod(others / (others - etas[j]))
    return coeff


def stieltjes_invert(g_eval, grid, eta_sequence=(4e-4, 2e-4, 1e-4),
                     neg_tol=1e-3):
    """Recover a density from a Cauchy-transform evaluator.

    ``g_eval(z)`` must accept a complex vector in the upper half plane.
    The smoothed density -Im G(t + i*eta)/pi is computed for each eta in
    the sequence and extrapolated to eta = 0 with the Lagrange rule.
    Heights down to eta = 1e-4 are supported; the extrapolation order
    covers the rest of the way.

    Returns (measure, renorm) where renorm is the factor that rescaled
    the clipped density to unit mass.  Raises NonPositiveDensity if the
    extrapolated density dips below -neg_tol * max(1, peak): genuine
    negativity at that scale means the evaluator was not a Cauchy
    transform of a positive measure.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 8:
        raise ValueError("grid must be a 1-d array with at least 8 points")
    etas = np.asarray(eta_sequence, dtype=float)
    if etas.size == 0 or np.any(etas <= 0):
        raise ValueError("eta_sequence must be positive")
    coeff = _lagrange_at_zero(etas)
    dens = np.zeros(grid.size)
    for c, eta in zip(coeff, etas):
        g = np.asarray(g_eval(grid + 1j * eta), dtype=complex)
        dens += c * (-np.imag(g) / np.pi)
    floor = -neg_tol * max(1.0, float(dens.max(initial=0.0)))
    if dens.min() < floor:
        raise NonPositiveDensity(
            f"recovered density reaches {dens.min():.3e}, below {floor:.3e}")
    dens = np.clip(dens, 0.0, None)
    step = grid[1] - grid[0]
    mass = float(np.trapezoid(dens, dx=step))
    if mass <= 0:
        raise NonPositiveDensity("recovered density has zero mass")
    renorm = 1.0 / mass
    spec = GridSpec(float(grid[0]), float(grid[-1]), grid.size)
    return LineMeasure(grid=spec, density=dens * renorm), renorm
