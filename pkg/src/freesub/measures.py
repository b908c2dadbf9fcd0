"""Compactly supported probability measures on the line and the circle.

A measure is a list of atoms plus an optional absolutely continuous part
given by density samples on a uniform grid.  The continuous part is
*defined* by the trapezoid rule on those samples: every transform,
moment and convolution in this package integrates the stored data
exactly, so results are self-consistent to solver precision rather than
limited by how well the grid approximates a textbook density.

Standard families are constructed so that the trapezoid weights carry
the exact mass of each grid cell (closed-form CDFs where available,
adaptive quadrature otherwise).  Grids of families with square-root or
inverse-square-root edges are inset by half a cell so no sample sits on
a singularity; the mass of the two edge cells is folded into the first
and last samples, which therefore exceed the pointwise density there.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import BadParams, UnknownFamily

#: default number of density samples for gridded families
DEFAULT_GRID_N = 2048

_MASS_TOL = 1e-9
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GridSpec:
    """Uniform sample grid: n points from lo to hi inclusive."""

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if self.n < 8:
            raise BadParams("density grids need at least 8 samples")
        if not (self.hi > self.lo):
            raise BadParams("grid requires hi > lo")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.step)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def _validate_parts(atoms, grid, density):
    atoms = tuple((float(t), float(w)) for t, w in atoms)
    for _, w in atoms:
        if not (0.0 < w <= 1.0):
            raise BadParams(f"atom weight {w} outside (0, 1]")
    if (grid is None) != (density is None):
        raise BadParams("grid and density must be given together")
    if density is not None:
        density = np.asarray(density, dtype=float)
        if density.ndim != 1 or density.size != grid.n:
            raise BadParams("density length must equal grid.n")
        if not np.all(np.isfinite(density)):
            raise BadParams("density has non-finite samples")
        if np.any(density < 0):
            raise BadParams("density samples must be nonnegative")
        density.setflags(write=False)
    return atoms, density


@dataclass(frozen=True)
class LineMeasure:
    """Probability measure on the real line: atoms + gridded density."""

    atoms: tuple = ()
    grid: GridSpec = None
    density: np.ndarray = None
    _nodes: np.ndarray = field(default=None, repr=False, compare=False)
    _weights: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        atoms, density = _validate_parts(self.atoms, self.grid, self.density)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density", density)
        ts = [t for t, _ in atoms]
        ws = [w for _, w in atoms]
        if density is not None:
            ts = np.concatenate([ts, self.grid.points()])
            ws = np.concatenate([ws, self.grid.trapezoid_weights() * density])
        else:
            ts, ws = np.asarray(ts, float), np.asarray(ws, float)
        if ts.size == 0:
            raise BadParams("measure needs atoms or a density")
        mass = float(ws.sum())
        if abs(mass - 1.0) > _MASS_TOL:
            raise BadParams(f"total mass {mass} deviates from 1 by > {_MASS_TOL}")
        ts.setflags(write=False)
        ws.setflags(write=False)
        object.__setattr__(self, "_nodes", ts)
        object.__setattr__(self, "_weights", ws)

    def quadrature(self):
        """Nodes and weights of the measure as a finite positive sum."""
        return self._nodes, self._weights

    def support(self):
        """Smallest interval containing all nodes."""
        return float(self._nodes.min()), float(self._nodes.max())

    def support_radius(self) -> float:
        lo, hi = self.support()
        return max(abs(lo), abs(hi))

    def moment(self, k: int) -> float:
        """k-th raw moment; k is capped at 32 to bound error growth."""
        if not 0 <= k <= 32:
            raise ValueError("moment order must be in [0, 32]")
        t, w = self.quadrature()
        return float(np.sum(w * t**k))

    def to_dict(self) -> dict:
        return {
            "type": "line",
            "atoms": [[t, w] for t, w in self.atoms],
            "grid": None if self.grid is None else
                {"lo": self.grid.lo, "hi": self.grid.hi, "n": self.grid.n},
            "density": [] if self.density is None else self.density.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LineMeasure":
        if d.get("type") != "line":
            raise BadParams(f"expected type 'line', got {d.get('type')!r}")
        grid = d.get("grid")
        g = None if grid is None else GridSpec(grid["lo"], grid["hi"], grid["n"])
        dens = d.get("density") or None
        return cls(atoms=tuple(map(tuple, d.get("atoms", ()))), grid=g, density=dens)


@dataclass(frozen=True)
class CircleMeasure:
    """Probability measure on the unit circle.

    Atoms are (angle, weight) with angles reduced mod 2*pi.  The density
    grid is periodic: n samples at lo + k*(hi-lo)/n for k < n, each with
    quadrature weight (hi-lo)/n (the trapezoid rule on the periodic
    extension, which is spectrally accurate for smooth densities).
    """

    atoms: tuple = ()
    grid: GridSpec = None
    density: np.ndarray = None
    _angles: np.ndarray = field(default=None, repr=False, compare=False)
    _weights: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        atoms = tuple((float(a) % _TWO_PI, float(w)) for a, w in self.atoms)
        atoms, density = _validate_parts(atoms, self.grid, self.density)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density", density)
        th = [a for a, _ in atoms]
        ws = [w for _, w in atoms]
        if density is not None:
            step = (self.grid.hi - self.grid.lo) / self.grid.n
            th = np.concatenate([th, self.grid.lo + step * np.arange(self.grid.n)])
            ws = np.concatenate([ws, np.full(self.grid.n, step) * density])
        else:
            th, ws = np.asarray(th, float), np.asarray(ws, float)
        if th.size == 0:
            raise BadParams("measure needs atoms or a density")
        mass = float(ws.sum())
        if abs(mass - 1.0) > _MASS_TOL:
            raise BadParams(f"total mass {mass} deviates from 1 by > {_MASS_TOL}")
        th.setflags(write=False)
        ws.setflags(write=False)
        object.__setattr__(self, "_angles", th)
        object.__setattr__(self, "_weights", ws)

    def quadrature(self):
        """Angles and weights as a finite positive sum on [0, 2*pi)."""
        return self._angles, self._weights

    def unit_nodes(self) -> np.ndarray:
        return np.exp(1j * self._angles)

    def moment(self, k: int) -> complex:
        """k-th moment of the unit-circle variable; negative k allowed.

        Negative orders use the conjugate symmetry of moments of a real
        measure on the circle.
        """
        if not -32 <= k <= 32:
            raise ValueError("moment order must be in [-32, 32]")
        th, w = self.quadrature()
        m = complex(np.sum(w * np.exp(1j * abs(k) * th)))
        return m.conjugate() if k < 0 else m

    def to_dict(self) -> dict:
        return {
            "type": "circle",
            "atoms": [[a, w] for a, w in self.atoms],
            "grid": None if self.grid is None else
                {"lo": self.grid.lo, "hi": self.grid.hi, "n": self.grid.n},
            "density": [] if self.density is None else self.density.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CircleMeasure":
        if d.get("type") != "circle":
            raise BadParams(f"expected type 'circle', got {d.get('type')!r}")
        grid = d.get("grid")
        g = None if grid is None else GridSpec(grid["lo"], grid["hi"], grid["n"])
        dens = d.get("density") or None
        return cls(atoms=tuple(map(tuple, d.get("atoms", ()))), grid=g, density=dens)


def to_json(measure) -> str:
    """Serialize a measure; floats round-trip bit-exactly through repr."""
    return json.dumps(measure.to_dict())


def from_json(text: str):
    d = json.loads(text)
    kind = d.get("type")
    if kind == "line":
        return LineMeasure.from_dict(d)
    if kind == "circle":
        return CircleMeasure.from_dict(d)
    raise BadParams(f"unknown measure type {kind!r}")


# ---------------------------------------------------------------------------
# standard families
# ---------------------------------------------------------------------------

def _measure_from_cell_masses(a, b, cell_mass):
    """Midpoint grid whose trapezoid rule reproduces the given cell masses.

    The support [a, b] is split into n equal cells; samples sit at cell
    midpoints and equal cell_mass/width, except the first and last which
    are doubled to compensate the half trapezoid weight at the ends.
    """
    cell_mass = np.asarray(cell_mass, float)
    n = cell_mass.size
    width = (b - a) / n
    samples = cell_mass / width
    samples[0] *= 2.0
    samples[-1] *= 2.0
    grid = GridSpec(a + 0.5 * width, b - 0.5 * width, n)
    return grid, samples


def _semicircle_std_cdf(x):
    x = np.clip(x, -2.0, 2.0)
    return 0.5 + (0.5 * x * np.sqrt(4.0 - x * x) + 2.0 * np.arcsin(0.5 * x)) / _TWO_PI


def semicircle(center=0.0, variance=1.0, n=DEFAULT_GRID_N) -> LineMeasure:
    """Semicircle law with the given mean and variance.

    Support is [center - 2*sigma, center + 2*sigma]; the standard case
    has density sqrt(4 - t^2)/(2*pi).
    """
    if variance <= 0:
        raise BadParams("variance must be positive")
    s = math.sqrt(variance)
    a, b = center - 2.0 * s, center + 2.0 * s
    edges = np.linspace(-2.0, 2.0, n + 1)
    cdf = _semicircle_std_cdf(edges)
    mass = np.diff(cdf)
    mass /= mass.sum()
    grid, samples = _measure_from_cell_masses(a, b, mass)
    return LineMeasure(grid=grid, density=samples)


def arcsine(scale=1.0, n=DEFAULT_GRID_N) -> LineMeasure:
    """Arcsine law on [-2*scale, 2*scale], density 1/(pi*sqrt(4s^2 - t^2))."""
    if scale <= 0:
        raise BadParams("scale must be positive")
    a, b = -2.0 * scale, 2.0 * scale
    edges = np.linspace(-1.0, 1.0, n + 1)  # t/(2*scale)
    cdf = 0.5 + np.arcsin(edges) / math.pi
    mass = np.diff(cdf)
    mass /= mass.sum()
    grid, samples = _measure_from_cell_masses(a, b, mass)
    return LineMeasure(grid=grid, density=samples)


def marchenko_pastur(lam=1.0, n=DEFAULT_GRID_N) -> LineMeasure:
    """Free Poisson law of rate lam: all free cumulants equal lam.

    Density sqrt((b-t)(t-a))/(2*pi*t) on [a, b] with a,b = (1 -+ sqrt(lam))^2,
    plus an atom of mass 1-lam at zero when lam < 1.
    """
    if lam <= 0:
        raise BadParams("rate must be positive")
    a = (1.0 - math.sqrt(lam)) ** 2
    b = (1.0 + math.sqrt(lam)) ** 2
    ac_mass = min(1.0, lam)

    def dens(t):
        return math.sqrt(max((b - t) * (t - a), 0.0)) / (_TWO_PI * t)

    edges = np.linspace(a, b, n + 1)
    mass = np.empty(n)
    for k in range(n):
        # QUADPACK handles the integrable edge singularities (1/sqrt(t)
        # at a=0 when lam=1, sqrt vanishing elsewhere)
        mass[k] = integrate.quad(dens, edges[k], edges[k + 1], limit=200)[0]
    mass *= ac_mass / mass.sum()
    grid, samples = _measure_from_cell_masses(a, b, mass)
    atoms = ((0.0, 1.0 - lam),) if lam < 1.0 else ()
    return LineMeasure(atoms=atoms, grid=grid, density=samples)


def bernoulli_pm1() -> LineMeasure:
    """Symmetric two-point law at -1 and +1."""
    return LineMeasure(atoms=((-1.0, 0.5), (1.0, 0.5)))


def atomic(pairs) -> LineMeasure:
    """Purely atomic measure from (position, weight) pairs."""
    return LineMeasure(atoms=tuple(pairs))


def haar_circle(n=DEFAULT_GRID_N) -> CircleMeasure:
    """Uniform distribution on the unit circle."""
    grid = GridSpec(0.0, _TWO_PI, n)
    return CircleMeasure(grid=grid, density=np.full(n, 1.0 / _TWO_PI))


def circle_atoms(pairs) -> CircleMeasure:
    """Atomic measure on the circle from (angle, weight) pairs."""
    return CircleMeasure(atoms=tuple(pairs))


def wrapped_density(evaluator, n=DEFAULT_GRID_N) -> CircleMeasure:
    """Circle measure from a nonnegative density callable on [0, 2*pi).

    Sampled pointwise on the periodic grid and renormalized; intended
    for smooth densities.
    """
    grid = GridSpec(0.0, _TWO_PI, n)
    theta = grid.lo + (_TWO_PI / n) * np.arange(n)
    samples = np.asarray([float(evaluator(t)) for t in theta])
    if np.any(samples < 0) or not np.all(np.isfinite(samples)):
        raise BadParams("density evaluator must be finite and nonnegative")
    total = samples.sum() * (_TWO_PI / n)
    if total <= 0:
        raise BadParams("density evaluator integrates to zero")
    return CircleMeasure(grid=grid, density=samples / total)


_FAMILIES = {
    "semicircle": semicircle,
    "bernoulli_pm1": bernoulli_pm1,
    "arcsine": arcsine,
    "marchenko_pastur": marchenko_pastur,
    "atomic": atomic,
    "haar_circle": haar_circle,
    "circle_atoms": circle_atoms,
    "wrapped_density": wrapped_density,
}


def make_standard(name, *params, **kwargs):
    """Build a standard measure family by name.

    Known names: semicircle(center, variance), bernoulli_pm1,
    arcsine(scale), marchenko_pastur(lam), atomic(pairs), haar_circle,
    circle_atoms(pairs), wrapped_density(evaluator).  Gridded families
    accept an ``n=`` keyword (default 2048).
    """
    try:
        ctor = _FAMILIES[name]
    except KeyError:
        raise UnknownFamily(f"no measure family named {name!r}") from None
    try:
        return ctor(*params, **kwargs)
    except TypeError as exc:
        raise BadParams(f"bad parameters for family {name!r}: {exc}") from None


def rotate(measure: CircleMeasure, phi: float) -> CircleMeasure:
    """Pushforward of an atomic circle measure under multiplication by e^{i*phi}."""
    if measure.density is not None:
        raise BadParams("rotation is implemented for atomic circle measures only")
    return CircleMeasure(atoms=tuple((a + phi, w) for a, w in measure.atoms))


def measure_from_circle_moments(moments, n=DEFAULT_GRID_N) -> CircleMeasure:
    """Circle measure whose density is the Fejer (Cesaro) sum of the moments.

    ``moments[k]`` is the (k+1)-st moment.  The Fejer kernel keeps the
    reconstruction nonnegative for moments of a genuine measure; tiny
    negative rounding is clipped before normalization.
    """
    m = np.asarray(moments, dtype=complex)
    order = m.size
    grid = GridSpec(0.0, _TWO_PI, n)
    theta = grid.lo + (_TWO_PI / n) * np.arange(n)
    dens = np.full(n, 1.0 / _TWO_PI)
    for k in range(1, order + 1):
        taper = 1.0 - k / (order + 1.0)
        dens += (taper / math.pi) * np.real(m[k - 1] * np.exp(-1j * k * theta))
    dens = np.clip(dens, 0.0, None)
    dens /= dens.sum() * (_TWO_PI / n)
    return CircleMeasure(grid=grid, density=dens)
