"""Finite-dimensional calculus for matrix half-planes and the unit ball.

Works with square complex matrices T viewed as elements of a unital
*-algebra.  The two domains that matter downstream are

* the upper half-plane: Im T = (T - T*)/(2i) >= eps > 0, and
* the ball of radius R: largest singular value of T below R.

Membership is always quantified by a signed margin so callers can apply
boundary bands instead of raw booleans.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadParams, SingularMatrix

#: matrices larger than this are rejected; every identity handled here is
#: dimension-uniform, so small sizes lose no generality
MAX_DIM = 64

#: margins within this band of zero are classified "boundary"
BOUNDARY_BAND = 1e-9

_SINGULAR_RTOL = 1e-13


def _as_square(t, max_dim=None):
    """Coerce to a square complex ndarray and validate it.

    The dimension cap applies only where a caller passes one; margin
    helpers run on random-matrix-sized inputs and stay uncapped.
    """
    m = np.asarray(getattr(t, "entries", t), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise BadParams(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise BadParams("matrix has non-finite entries")
    if max_dim is not None and m.shape[0] > max_dim:
        raise BadParams(f"dimension {m.shape[0]} exceeds cap {max_dim}")
    return m


@dataclass(frozen=True)
class OperatorPoint:
    """A square complex matrix together with its dimension.

    Thin immutable wrapper used where a validated algebra element is
    expected; all functions in this module also accept bare ndarrays.
    """

    entries: np.ndarray

    def __post_init__(self):
        m = _as_square(self.entries, max_dim=MAX_DIM)
        object.__setattr__(self, "entries", m)
        self.entries.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DomainMargin:
    """Signed distances of a matrix to the half-plane and ball domains.

    ``halfplane_margin`` is the smallest eigenvalue of the selfadjoint
    part of T/i; positive iff T lies in the open upper half-plane.
    ``ball_margin`` is ``radius`` minus the largest singular value;
    positive iff T lies in the open ball of that radius.
    """

    halfplane_margin: float
    ball_margin: float
    radius: float = 1.0

    @classmethod
    def of(cls, t, radius=1.0):
        if radius <= 0:
            raise BadParams("radius must be positive")
        m = _as_square(t)
        return cls(
            halfplane_margin=halfplane_margin(m),
            ball_margin=radius - operator_norm(m),
            radius=radius,
        )

    @property
    def in_upper_halfplane(self) -> bool:
        return self.halfplane_margin > 0

    @property
    def in_ball(self) -> bool:
        return self.ball_margin > 0


def classify_margin(margin, band=BOUNDARY_BAND):
    """Map a signed margin to 'inside' / 'boundary' / 'outside'.

    Membership in all domains here is an open condition, so decisions
    within ``band`` of zero are never reported as pass/fail.
    """
    if margin > band:
        return "inside"
    if margin < -band:
        return "outside"
    return "boundary"


def operator_norm(t) -> float:
    """Largest singular value, computed densely."""
    return float(np.linalg.norm(_as_square(t), 2))


def im_part(t) -> np.ndarray:
    """Selfadjoint part of T/i, i.e. (T - T*)/(2i).

    This is the matrix analogue of the imaginary part; it is Hermitian
    up to rounding and is returned exactly Hermitianized.
    """
    m = _as_square(t)
    h = (m - m.conj().T) / 2j
    return (h + h.conj().T) / 2


def re_part(t) -> np.ndarray:
    """Selfadjoint part (T + T*)/2."""
    m = _as_square(t)
    return (m + m.conj().T) / 2


def halfplane_margin(t) -> float:
    """Smallest eigenvalue of im_part(T).

    Positive iff T lies in the open upper half-plane; the margin of the
    lower half-plane is ``halfplane_margin(-T)``.
    """
    return float(np.linalg.eigvalsh(im_part(t))[0])


def invert_checked(t) -> np.ndarray:
    """Inverse of T, guarded by the half-plane/ball membership contract.

    Elements of either open half-plane are invertible and inversion
    swaps the half-planes; this is asserted on the result.  Matrices
    with no half-plane margin are still inverted when their smallest
    singular value is safely positive.

    Raises
    ------
    SingularMatrix
        If the smallest singular value is below tolerance and T has no
        half-plane margin.  Pseudo-inverses are never substituted.
    """
    m = _as_square(t)
    up = halfplane_margin(m)
    down = halfplane_margin(-m)
    if up <= 0 and down <= 0:
        smin = np.linalg.svd(m, compute_uv=False)[-1]
        if smin <= _SINGULAR_RTOL * max(1.0, operator_norm(m)):
            raise SingularMatrix(
                f"smallest singular value {smin:.3e} below tolerance and no "
                "half-plane margin"
            )
    inv = np.linalg.inv(m)
    # inversion maps H+ into H-, and vice versa; a violation here would
    # mean the inverse itself is numerically unreliable
    if up > 0 and halfplane_margin(-inv) <= 0:
        raise SingularMatrix("inverse left the lower half-plane; T is too ill-conditioned")
    if down > 0 and halfplane_margin(inv) <= 0:
        raise SingularMatrix("inverse left the upper half-plane; T is too ill-conditioned")
    return inv


def cayley(t) -> np.ndarray:
    """Cayley map (T - iI)(T + iI)^{-1}.

    Sends the upper half-plane into the open unit ball; i*I goes to 0.
    """
    m = _as_square(t)
    eye = np.eye(m.shape[0])
    smin = np.linalg.svd(m + 1j * eye, compute_uv=False)[-1]
    if smin <= _SINGULAR_RTOL * max(1.0, operator_norm(m) + 1.0):
        raise SingularMatrix("T + iI is singular; Cayley map undefined")
    return (m - 1j * eye) @ np.linalg.inv(m + 1j * eye)


def inverse_cayley(w) -> np.ndarray:
    """Inverse of :func:`cayley`: i(I + W)(I - W)^{-1}."""
    m = _as_square(w)
    eye = np.eye(m.shape[0])
    smin = np.linalg.svd(eye - m, compute_uv=False)[-1]
    if smin <= _SINGULAR_RTOL * max(1.0, operator_norm(m) + 1.0):
        raise SingularMatrix("I - W is singular; inverse Cayley map undefined")
    return 1j * (eye + m) @ np.linalg.inv(eye - m)


def contraction_margins(x):
    """Margins of the two equivalent strict-contraction conditions.

    Returns ``(norm_margin, resolvent_margin)`` where

    * ``norm_margin   = 1 - ||x||``,
    * ``resolvent_margin = lambda_min(2 Re (1-x)^{-1}) - 1``,

    and the contract is that they have the same sign (both conditions
    are open and equivalent).  If ``1 - x`` is singular the resolvent
    margin is reported as ``-inf``.
    """
    m = _as_square(x)
    eye = np.eye(m.shape[0])
    norm_margin = 1.0 - operator_norm(m)
    a = eye - m
    smin = np.linalg.svd(a, compute_uv=False)[-1]
    if smin <= _SINGULAR_RTOL * max(1.0, operator_norm(a)):
        return norm_margin, float("-inf")
    r = np.linalg.inv(a)
    resolvent_margin = float(np.linalg.eigvalsh(r + r.conj().T)[0]) - 1.0
    return norm_margin, resolvent_margin


def resolvent_identity_residual(x) -> float:
    """Residual of (1-x)^{-1} + (1-x*)^{-1} = 1 + (1-x)^{-1}(1-xx*)(1-x*)^{-1}.

    The identity is algebraically exact whenever 1-x is invertible, so
    the residual measures pure floating-point conditioning.
    """
    m = _as_square(x)
    eye = np.eye(m.shape[0])
    a = np.linalg.inv(eye - m)
    b = a.conj().T  # = (1 - x*)^{-1}
    lhs = a + b
    rhs = eye + a @ (eye - m @ m.conj().T) @ b
    return float(np.linalg.norm(lhs - rhs, 2))


def relative_contraction_margin(a, c) -> float:
    """Margin of the condition "a invertible and ||a^{-1} c|| < 1".

    Returns ``1 - ||a^{-1} c||`` when a is invertible, else ``-inf``.
    Positive iff the pair admits the subordinated inverse
    ``(1 - a^{-1}c)^{-1} a^{-1}`` of ``a - c``.
    """
    ma = _as_square(a)
    mc = _as_square(c)
    if ma.shape != mc.shape:
        raise BadParams("a and c must have equal shapes")
    smin = np.linalg.svd(ma, compute_uv=False)[-1]
    if smin <= _SINGULAR_RTOL * max(1.0, operator_norm(ma)):
        return float("-inf")
    return 1.0 - operator_norm(np.linalg.solve(ma, mc))
