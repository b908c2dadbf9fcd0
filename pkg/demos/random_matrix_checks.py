"""Monte Carlo verification of the subordination identities.

Every analytic identity in the package has a finite-N shadow: replace
free elements by independently Haar-rotated random matrices, replace
the trace by the normalized matrix trace, and the identity should hold
up to sampling noise that shrinks as N grows.  The experiment drivers
are fully seeded, so each line below reproduces byte for byte.

Sizes here are cut down for a quick run; the acceptance suite runs the
full-size versions (N = 512..600, up to 200 trials).
"""

import math

import numpy as np

from freesub import (CovarianceMap, EnsembleSpec, circle_atoms,
                     experiment_lemma34, experiment_prop32,
                     experiment_prop33, experiment_thm31_block,
                     experiment_thm36, haar_circle, sample)
from freesub.matrixmodels import _haar, _rng


def show(label, rep):
    resid = ", ".join(f"{k} {v:.4g}" for k, v in rep.residuals.items())
    print(f"{label:<22} {rep.verdict:<8} {resid}")


# -- 0. the raw ensembles ----------------------------------------------------

spec = EnsembleSpec(kind="gue", N=256, seed=5)
x = sample(spec, trial=0)
print(f"GUE N=256: hermitian defect {np.linalg.norm(x - x.conj().T):.1e}, "
      f"tr(X^2)/N = {np.trace(x @ x).real / 256:.3f} (expect ~1)")
u = sample(EnsembleSpec(kind="haar_unitary", N=256, seed=5), trial=0)
print(f"Haar N=256: unitarity defect "
      f"{np.linalg.norm(u @ u.conj().T - np.eye(256)):.1e}\n")

# -- 1. averaged resolvent diagonalizes in the eigenbasis of X ---------------

lam = np.where(np.arange(200) % 2 == 0, 1.0, -1.0)
show("resolvent diag", experiment_prop32(lam_diag=lam, a0=np.diag(lam[::-1]),
                                         eps=1.0, trials=100, seed=1))

# -- 2. conditional expectation of a resolvent collapses to a scalar ---------

show("scalar collapse", experiment_prop33(A0=np.diag(lam),
                                          C0=np.diag(np.linspace(0.5, 1.5, 200)),
                                          eps=1.0, trials=60, seed=1))

# -- 3. block subordination for two semicircular families --------------------

eta_x = CovarianceMap(kraus=[np.array([[0.9, 0.3], [0.0, 0.6]])])
eta_y = CovarianceMap(kraus=[np.array([[0.5, -0.2], [0.1, 0.7]])])
show("block subordination", experiment_thm31_block(eta_x, eta_y,
                                                   1j * np.eye(2),
                                                   N=128, trials=40, seed=2))

# -- 4. disk subordination at trace level ------------------------------------
#
# A Haar phase law kills the averaged trace outright; an identifiable
# atomic law instead produces a solvable disk point.

c0 = 0.7 * _haar(_rng(3, 999), 200)
show("disk, haar law", experiment_thm36(theta_law=haar_circle(), c0=c0,
                                        N=200, trials=40, seed=3))
law = circle_atoms([(0.0, 0.5), (math.pi, 0.3), (math.pi / 2, 0.2)])
show("disk, atomic law", experiment_thm36(theta_law=law, c0=c0,
                                          N=200, trials=40, seed=3))

# -- 5. strict contraction margins agree -------------------------------------

show("contraction margins", experiment_lemma34(samples=2000, seed=4))

# -- 6. determinism ----------------------------------------------------------

again = experiment_thm31_block(eta_x, eta_y, 1j * np.eye(2),
                               N=128, trials=40, seed=2)
base = experiment_thm31_block(eta_x, eta_y, 1j * np.eye(2),
                              N=128, trials=40, seed=2)
print(f"\nrerun with the same seed is bit-identical: "
      f"{again.to_json() == base.to_json()}")
