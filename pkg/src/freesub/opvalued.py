"""Matrix-valued Cauchy transforms and operator subordination.

B = n x n matrices.  A B-valued semicircular element is determined by a
completely positive covariance map eta(b) = sum_j k_j b k_j*; its matrix
Cauchy transform with the convention

    G(b) := E_B((b - X)^{-1}),  b in the matrix upper half plane,

is the unique solution of g = (b - eta(g))^{-1} with Im g < 0.  Sums of
free semicirculars stay semicircular with added covariances, which makes
G_X, G_Y and G_{X+Y} all independently computable; the subordination map
F with G_{X+Y}(b) = G_X(F(b)) is then extracted by inverting G_X with a
finite-difference Newton method.  That turns the subordination identity
into a two-sided numerical check instead of a definition.
"""

from dataclasses import dataclass, field

import numpy as np

from .domains import halfplane_margin
from .errors import (BadParams, DimensionMismatch, DomainError,
                     JacobianSingular, NoConvergence)

_MAX_N = 8
_DAMPING = 0.5
_NEWTON_HANDOFF = 1e-3


def _as_matrix(b, n=None):
    b = np.asarray(b, dtype=complex)
    if b.ndim == 0:
        b = b.reshape(1, 1)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise DimensionMismatch("expected a square matrix")
    if n is not None and b.shape[0] != n:
        raise DimensionMismatch(f"expected size {n}, got {b.shape[0]}")
    return b


@dataclass(frozen=True)
class CovarianceMap:
    """Completely positive map b -> sum_j k_j b k_j* given by Kraus terms."""

    kraus: tuple

    def __post_init__(self):
        mats = tuple(np.array(k, dtype=complex) for k in self.kraus)
        if not mats:
            raise BadParams("covariance map needs at least one Kraus term")
        n = mats[0].shape[0] if mats[0].ndim == 2 else 1
        if n > _MAX_N:
            raise BadParams(f"dimension cap is {_MAX_N}")
        mats = tuple(_as_matrix(k, n) for k in mats)
        for k in mats:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", mats)

    @property
    def n(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, b):
        b = _as_matrix(b, self.n)
        out = np.zeros_like(b)
        for k in self.kraus:
            out += k @ b @ k.conj().T
        return out

    def plus(self, other: "CovarianceMap") -> "CovarianceMap":
        """Covariance of the sum of free semicirculars: Kraus concatenation."""
        if other.n != self.n:
            raise DimensionMismatch("covariance maps act on different sizes")
        return CovarianceMap(self.kraus + other.kraus)

    def symmetrized(self) -> "CovarianceMap":
        """b -> (eta(b) + eta*(b))/2 where eta* swaps k_j and k_j*.

        This is the covariance realized by Hermitian block models built
        from the same Kraus terms; it equals eta itself when every k_j
        is Hermitian.
        """
        half = tuple(k / np.sqrt(2.0) for k in self.kraus)
        adj = tuple(k.conj().T / np.sqrt(2.0) for k in self.kraus)
        return CovarianceMap(half + adj)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "kraus": [[[[z.real, z.imag] for z in row] for row in k]
                      for k in self.kraus],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CovarianceMap":
        kraus = tuple(
            np.array([[complex(re, im) for re, im in row] for row in k])
            for k in d["kraus"])
        cm = cls(kraus)
        if cm.n != d.get("n", cm.n):
            raise DimensionMismatch("serialized size disagrees with Kraus shape")
        return cm


def zero_covariance(n: int) -> CovarianceMap:
    return CovarianceMap((np.zeros((n, n)),))


@dataclass(frozen=True)
class OpCauchyEval:
    """Converged matrix Cauchy transform value at a half-plane point."""

    b: np.ndarray = field(compare=False)
    g: np.ndarray = field(compare=False)
    residual: float
    iterations: int

    def __post_init__(self):
        for name in ("b", "g"):
            m = np.array(getattr(self, name), dtype=complex)
            m.setflags(write=False)
            object.__setattr__(self, name, m)
        if halfplane_margin(-self.g) <= 0:
            raise AssertionError("Cauchy transform value left the lower half plane")


def _kraus_kron(eta: CovarianceMap):
    n = eta.n
    acc = np.zeros((n * n, n * n), dtype=complex)
    for k in eta.kraus:
        acc += np.kron(k, k.conj())
    return acc


def op_semicircular_cauchy(eta: CovarianceMap, b, tol=1e-12,
                           max_iter=500) -> OpCauchyEval:
    """Solve g = (b - eta(g))^{-1} for the semicircular Cauchy transform.

    Damped Picard iteration from g = b^{-1} globalizes; Newton on the
    multiplied-out residual (b - eta(g))g - I finishes.  The Newton
    Jacobian is exact: with row-major vec, vec(eta(d)g) factors through
    kron(k_j, conj(k_j)), so no differencing is needed.
    """
    b = _as_matrix(b, eta.n)
    if halfplane_margin(b) <= 0:
        raise DomainError("op_semicircular_cauchy needs Im b > 0")
    n = eta.n
    eye = np.eye(n)
    kk = _kraus_kron(eta)
    g = np.linalg.inv(b)
    scale = max(1.0, float(np.linalg.norm(g)))
    for it in range(1, max_iter + 1):
        fixed = np.linalg.inv(b - eta(g))
        resid = float(np.linalg.norm(fixed - g))
        if resid <= tol * scale:
            return OpCauchyEval(b=b, g=g, residual=resid, iterations=it)
        if resid > _NEWTON_HANDOFF * scale:
            g = (1.0 - _DAMPING) * g + _DAMPING * fixed
            continue
        lhs = b - eta(g)
        phi = lhs @ g - eye
        jac = np.kron(lhs, eye) - np.kron(eye, g.T) @ kk
        try:
            delta = np.linalg.solve(jac, -phi.reshape(-1))
        except np.linalg.LinAlgError:
            g = (1.0 - _DAMPING) * g + _DAMPING * fixed
            continue
        g = g + delta.reshape(n, n)
    raise NoConvergence("matrix Cauchy fixed point stalled",
                        iterations=max_iter, residual=resid)


def op_add_cauchy(eta_x: CovarianceMap, eta_y: CovarianceMap, b,
                  tol=1e-12, max_iter=500) -> OpCauchyEval:
    """Cauchy transform of X + Y via covariance additivity (never via F)."""
    return op_semicircular_cauchy(eta_x.plus(eta_y), b, tol=tol,
                                  max_iter=max_iter)


def semicircular_shift_F(eta_y: CovarianceMap, g_xy, b):
    """Closed-form subordination point for the semicircular model.

    When Y is semicircular with covariance eta_Y, F(b) = b - eta_Y(G_{X+Y}(b)).
    Used as an oracle and as a warm start; the general solver below does
    not rely on it.
    """
    return _as_matrix(b, eta_y.n) - eta_y(_as_matrix(g_xy, eta_y.n))


def _stack(m):
    v = m.reshape(-1)
    return np.concatenate([v.real, v.imag])


def solve_subordination_F(g_x_eval, g_target, b_start, tol=1e-10,
                          max_iter=50, fd_step=1e-6):
    """Invert the Cauchy transform of X: find F with G_X(F) = g_target.

    ``g_x_eval(b)`` must return the matrix Cauchy transform of X at b.
    Newton iteration on the 2n^2 real coordinates with a forward
    difference Jacobian (step fd_step * scale); candidate steps are cut
    back until the iterate keeps a positive half-plane margin.  Raises
    JacobianSingular where G_X is locally non-invertible and the
    subordination point cannot be extracted this way.
    """
    g_target = np.asarray(g_target, dtype=complex)
    if halfplane_margin(-g_target) <= 0:
        raise DomainError("target is not the value of a Cauchy transform")
    w = _as_matrix(b_start, g_target.shape[0]).copy()
    n = w.shape[0]
    if halfplane_margin(w) <= 0:
        raise DomainError("b_start must lie in the matrix upper half plane")
    resid_vec = _stack(g_x_eval(w) - g_target)
    for _ in range(max_iter):
        resid = float(np.linalg.norm(resid_vec))
        if resid <= tol:
            result = w
            if halfplane_margin(result) <= 0:
                raise DomainError("recovered subordination point left the half plane")
            return result
        delta = fd_step * max(1.0, float(np.linalg.norm(w)))
        jac = np.empty((2 * n * n, 2 * n * n))
        col = 0
        for unit in (1.0, 1.0j):
            for i in range(n):
                for j in range(n):
                    pert = w.copy()
                    pert[i, j] += unit * delta
                    jac[:, col] = (_stack(g_x_eval(pert) - g_target) - resid_vec) / delta
                    col += 1
        try:
            step_flat = np.linalg.solve(jac, -resid_vec)
        except np.linalg.LinAlgError:
            raise JacobianSingular("Cauchy transform is locally non-invertible") from None
        if not np.all(np.isfinite(step_flat)):
            raise JacobianSingular("Jacobian produced a non-finite step")
        step = (step_flat[: n * n] + 1j * step_flat[n * n:]).reshape(n, n)
        s = 1.0
        for _ in range(30):
            cand = w + s * step
            if halfplane_margin(cand) > 0:
                cand_vec = _stack(g_x_eval(cand) - g_target)
                if np.linalg.norm(cand_vec) < 10.0 * resid:
                    break
            s *= 0.5
        else:
            raise NoConvergence("step search could not stay in the half plane",
                                residual=resid)
        w = cand
        resid_vec = cand_vec
    raise NoConvergence("subordination Newton stalled",
                        iterations=max_iter,
                        residual=float(np.linalg.norm(resid_vec)))
