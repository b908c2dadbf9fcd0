"""Free multiplicative convolution of unitary elements (the unit disk side).

Two solvers live here.  ``disk_subordination_solve`` inverts the circle
resolvent K_nu on the open disk: given a trace value
target = tau((u - c)^{-1}) it finds g with K_nu(g) = target, the scalar
shadow of the disk subordination of resolvents.  ``free_mult_convolve_unitary``
computes the moments of uv for free unitaries u ~ mu, v ~ nu through the
eta-transform fixed point

    omega1(z) = z * eta_nu(Q(omega1)) / Q(omega1),
    Q(w)      = z * eta_mu(w) / w,

with eta_{mu x nu}(z) = eta_mu(omega1(z)) and omega1*omega2 = z*eta(z).
Since eta maps the disk to itself with eta(0) = 0, Schwarz gives
|omega1| <= |z|, so the iteration is a strict self-map of a compact
subdisk and plain iteration converges geometrically for |z| < 1.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTransform, NoConvergence
from .measures import CircleMeasure, measure_from_circle_moments
from .transforms import circle_cauchy

_MAX_ORDER = 16
_RATIO_FLOOR = 1e-9


@dataclass(frozen=True)
class DiskSubordinationEval:
    """Solved disk subordination value for one trace target."""

    target: complex
    g: complex
    residual: float
    ball_margin: float


def _k_and_derivative(nu, g):
    zeta = nu.unit_nodes()
    _, w = nu.quadrature()
    diff = zeta - np.asarray(g, dtype=complex)[..., None]
    k = np.sum(w / diff, axis=-1)
    kp = np.sum(w / diff**2, axis=-1)
    return k, kp


def _clamp_into_disk(g, step):
    """Scale the Newton step so the iterate stays inside the open disk.

    The solution is guaranteed inside the disk, so a step that would
    exit is shortened along its own direction to land at the radius
    halfway between |g| and the boundary.
    """
    r_target = 0.5 * (1.0 + abs(g))
    # |g + s*step| = r_target: positive root of the quadratic in s
    a = abs(step) ** 2
    b = 2.0 * (g.conjugate() * step).real
    c = abs(g) ** 2 - r_target**2
    disc = b * b - 4.0 * a * c
    s = (-b + math.sqrt(max(disc, 0.0))) / (2.0 * a)
    return g + s * step


def disk_subordination_solve(nu: CircleMeasure, target, tol=1e-12,
                             max_iter=100) -> DiskSubordinationEval:
    """Solve K_nu(g) = target for g in the open unit disk.

    Newton from g = 0 with the exact quadrature derivative
    K'(g) = integral (zeta - g)^{-2} dnu.  A constant K (Haar measure,
    where K vanishes identically on the disk) makes every g a solution;
    that degeneracy is detected up front and surfaced as a typed error.
    """
    if tol < 1e-12:
        raise ValueError("tol below 1e-12 is not resolvable here")
    target = complex(target)
    probes = np.array([0.0, 0.3, -0.3, 0.3j])
    k_probe, _ = _k_and_derivative(nu, probes)
    if np.ptp(k_probe.real) + np.ptp(k_probe.imag) < 1e-12 * (1 + abs(k_probe[0])):
        raise DegenerateTransform(
            "circle resolvent is constant on the disk; g is not identifiable")
    g = 0.0 + 0.0j
    for it in range(1, max_iter + 1):
        k, kp = _k_and_derivative(nu, g)
        k, kp = complex(k), complex(kp)
        resid = abs(k - target)
        if resid <= tol:
            return DiskSubordinationEval(
                target=target, g=g, residual=resid, ball_margin=1.0 - abs(g))
        if abs(kp) < 1e-300:
            raise NoConvergence("flat resolvent derivative", iterations=it,
                                residual=resid, point=g)
        step = -(k - target) / kp
        cand = g + step
        if abs(cand) >= 1.0:
            cand = _clamp_into_disk(g, step)
        g = cand
    raise NoConvergence("disk subordination Newton stalled",
                        iterations=max_iter, residual=abs(k - target), point=g)


def _eta_ratio(measure, q, first_moment):
    """eta(q)/q with its removable singularity at q = 0."""
    q = np.asarray(q, dtype=complex)
    out = np.full(q.shape, first_moment, dtype=complex)
    big = np.abs(q) > _RATIO_FLOOR
    if np.any(big):
        qa = q[big]
        # psi(q) = -1 - K(1/q)/q, eta = psi/(1+psi); |1 - eta| >= 1 - |q| here
        psi = -1.0 - np.asarray(circle_cauchy(measure, 1.0 / qa)) / qa
        eta = psi / (1.0 + psi)
        out[big] = eta / qa
    return out


@dataclass(frozen=True)
class MultConvolution:
    """Moments of mu x nu with per-moment cross-radius certificates."""

    moments: tuple
    certificates: tuple
    fixed_point_residual: float

    def measure(self, n=2048) -> CircleMeasure:
        """Fejer reconstruction of the density from the moments."""
        return measure_from_circle_moments(self.moments, n=n)


def _omega1_on_circle(mu, nu, radius, nodes, tol, max_iter):
    theta = (np.arange(nodes) + 0.5) * (2.0 * math.pi / nodes)
    z = radius * np.exp(1j * theta)
    m1_mu = complex(mu.moment(1))
    m1_nu = complex(nu.moment(1))
    w = np.zeros(nodes, dtype=complex)
    resid = np.inf
    for _ in range(max_iter):
        q = z * _eta_ratio(mu, w, m1_mu)
        t_val = z * _eta_ratio(nu, q, m1_nu)
        resid = float(np.max(np.abs(t_val - w)))
        w = t_val
        if resid <= tol:
            break
    else:
        raise NoConvergence("eta-transform fixed point stalled",
                            iterations=max_iter, residual=resid)
    return z, w, resid


def _moments_from_omega(mu, z, w, radius, order, m1_mu):
    eta = _eta_ratio(mu, w, m1_mu) * w
    psi = eta / (1.0 - eta)
    nodes = z.size
    theta = np.angle(z)
    out = []
    for k in range(1, order + 1):
        coeff = np.sum(psi * np.exp(-1j * k * theta)) / (nodes * radius**k)
        out.append(complex(coeff))
    return out


def free_mult_convolve_unitary(mu: CircleMeasure, nu: CircleMeasure,
                               order=8, tol=1e-13, max_iter=400,
                               radius=0.5, nodes=256) -> MultConvolution:
    """Moments of the distribution of uv for free unitaries u ~ mu, v ~ nu.

    The subordinated eta-transform is sampled on a circle |z| = radius
    inside the disk and the psi power series coefficients are read off
    by the discrete Fourier transform (geometric accuracy, since psi is
    analytic up to |z| = 1).  The same extraction at a second radius
    provides a per-moment consistency certificate.

    Zero-mean factors need no special casing: eta(q)/q extends over its
    removable singularity, and when both means vanish the scheme
    correctly collapses to uniform (all moments zero) -- an alternating
    product of centered free factors has zero trace.
    """
    if not 1 <= order <= _MAX_ORDER:
        raise ValueError(f"order must be in [1, {_MAX_ORDER}]")
    if not 0.1 <= radius <= 0.8:
        raise ValueError("radius must stay well inside the disk")
    m1_mu = complex(mu.moment(1))
    z, w, resid = _omega1_on_circle(mu, nu, radius, nodes, tol, max_iter)
    moments = _moments_from_omega(mu, z, w, radius, order, m1_mu)
    r2 = 0.7 * radius
    z2, w2, resid2 = _omega1_on_circle(mu, nu, r2, nodes, tol, max_iter)
    check = _moments_from_omega(mu, z2, w2, r2, order, m1_mu)
    certs = tuple(abs(a - b) for a, b in zip(moments, check))
    return MultConvolution(moments=tuple(moments), certificates=certs,
                           fixed_point_residual=max(resid, resid2))


def rotate_moments(moments, phi):
    """Moments of the pushforward under multiplication by e^{i*phi}."""
    return tuple(m * np.exp(1j * (k + 1) * phi)
                 for k, m in enumerate(moments))
