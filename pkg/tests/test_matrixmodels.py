"""Seeded ensembles, conditional-expectation estimators, experiment reports."""

import json

import numpy as np
import pytest

from freesub import (
    CovarianceMap,
    EnsembleSpec,
    circle_atoms,
    experiment_lemma34,
    experiment_prop32,
    experiment_prop33,
    experiment_thm31_block,
    experiment_thm36,
    haar_circle,
    partial_trace,
    sample,
    sample_angles,
)
from freesub.errors import BadParams, DimensionMismatch
from freesub.matrixmodels import _haar, _make_report, _rng


def balanced(N):
    return np.array([1.0 if i % 2 == 0 else -1.0 for i in range(N)])


def test_gue_sample_properties():
    x = sample(EnsembleSpec("gue", 512, seed=1))
    assert np.max(np.abs(x - x.conj().T)) <= 1e-14
    assert abs(np.trace(x @ x).real / 512 - 1.0) <= 0.1


def test_haar_sample_unitary_and_centered():
    u = sample(EnsembleSpec("haar_unitary", 512, seed=2))
    assert np.linalg.norm(u.conj().T @ u - np.eye(512)) <= 1e-12
    assert abs(np.trace(u) / 512) <= 0.15


def test_rotated_deterministic_keeps_spectrum():
    lam = np.linspace(-2, 2, 64)
    x = sample(EnsembleSpec("rotated_deterministic", 64, seed=3, lam=tuple(lam)))
    got = np.sort(np.linalg.eigvalsh(x))
    assert np.max(np.abs(got - lam)) <= 1e-12


def test_phase_unitary_sample():
    law = circle_atoms([(0.0, 0.5), (np.pi, 0.5)])
    u = sample(EnsembleSpec("phase_unitary", 48, seed=4, theta_law=law))
    assert np.linalg.norm(u.conj().T @ u - np.eye(48)) <= 1e-12
    ev = np.linalg.eigvals(u)
    assert np.max(np.minimum(np.abs(ev - 1), np.abs(ev + 1))) <= 1e-10


def test_sample_determinism():
    spec = EnsembleSpec("gue", 32, seed=9)
    assert np.array_equal(sample(spec, trial=5), sample(spec, trial=5))
    assert not np.array_equal(sample(spec, trial=5), sample(spec, trial=6))


def test_ensemble_spec_validation():
    with pytest.raises(BadParams):
        EnsembleSpec("wishart", 8, seed=0)
    with pytest.raises(BadParams):
        EnsembleSpec("gue", 1, seed=0)
    with pytest.raises(BadParams):
        EnsembleSpec("rotated_deterministic", 8, seed=0)
    with pytest.raises(BadParams):
        EnsembleSpec("phase_unitary", 8, seed=0)


def test_sample_angles_atomic_law():
    law = circle_atoms([(0.5, 0.25), (2.0, 0.75)])
    rng = np.random.default_rng(0)
    draws = sample_angles(law, 4000, rng)
    assert set(np.round(draws, 12)) <= {0.5, 2.0}
    frac = np.mean(np.isclose(draws, 2.0))
    assert abs(frac - 0.75) <= 0.03


def test_partial_trace_identities():
    rng = np.random.default_rng(6)
    n, N = 3, 17
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    w = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    assert np.allclose(partial_trace(np.kron(b, np.eye(N)), n, N), b, atol=1e-13)
    assert np.allclose(partial_trace(np.kron(np.eye(n), w), n, N),
                       np.trace(w) / N * np.eye(n), atol=1e-13)
    z = rng.normal(size=(n * N, n * N)) + 1j * rng.normal(size=(n * N, n * N))
    assert abs(np.trace(partial_trace(z, n, N)) / n - np.trace(z) / (n * N)) <= 1e-12
    with pytest.raises(DimensionMismatch):
        partial_trace(z, n + 1, N)


def test_report_verdict_semantics():
    def rep(r):
        return _make_report("prop32", 10, 1, 0, estimates={},
                            residuals={"r": r}, tolerances={"r": 0.05})
    assert rep(0.04).verdict == "pass"
    assert rep(0.052).verdict == "boundary"
    assert rep(0.08).verdict == "fail"
    with pytest.raises(BadParams):
        _make_report("prop99", 10, 1, 0, {}, {}, {})


def test_report_serialization():
    rep = _make_report("thm36", 10, 2, 7, estimates={"g": 0.25 + 0.1j},
                       residuals={"solve": 1e-13}, tolerances={"solve": 0.02})
    d = json.loads(rep.to_json())
    assert d["identity"] == "thm36"
    assert d["estimates"]["g"] == [0.25, 0.1]
    assert d["verdict"] == "pass"
    header, row = rep.csv_header(), rep.csv_row()
    assert header.split(",")[:4] == ["identity", "N", "trials", "seed"]
    assert len(header.split(",")) == len(row.split(","))


def test_prop32_central_shift_is_exact():
    # a0 = s*I commutes with every rotation, so each trial resolvent is
    # exactly diagonal and f = s + i*eps to rounding
    N, s = 16, 0.7
    rep = experiment_prop32(np.linspace(-1, 1, N), s * np.eye(N), trials=4, seed=0)
    assert rep.residuals["off_diag"] <= 1e-12
    assert rep.residuals["fit"] <= 1e-10
    assert abs(rep.estimates["f"] - (s + 1j)) <= 1e-10
    assert rep.verdict == "pass"


def test_prop32_phase_average_leaves_diagonal_alone():
    # conjugating by diagonal phases never touches diagonal entries in
    # exact arithmetic (|e^{i theta}|^2 = 1), so the scalar fit agrees to
    # rounding for any rotation count while the off-diagonal noise drops
    lam = balanced(24)
    a0 = np.diag(balanced(24)[::-1])
    r1 = experiment_prop32(lam, a0, trials=6, seed=3, phase_rotations=1)
    r4 = experiment_prop32(lam, a0, trials=6, seed=3, phase_rotations=4)
    assert abs(r1.estimates["f"] - r4.estimates["f"]) <= 1e-8
    assert abs(r1.residuals["fit"] - r4.residuals["fit"]) <= 1e-12
    assert r4.residuals["off_diag"] < r1.residuals["off_diag"]


def test_prop32_validation():
    with pytest.raises(DimensionMismatch):
        experiment_prop32(np.ones(4), np.eye(5), trials=1)
    with pytest.raises(BadParams):
        experiment_prop32(np.ones(4), np.eye(4), trials=1, phase_rotations=0)


def test_prop33_central_summand_is_exact():
    # C0 = 0 makes c = i*eps*I central: D = i*eps*I with zero deviation
    N = 12
    rep = experiment_prop33(np.diag(np.linspace(-1, 1, N)), np.zeros((N, N)),
                            trials=3, seed=0)
    assert rep.residuals["scalar_dev"] <= 1e-12
    assert rep.residuals["scalar_dev_diag"] <= 1e-12
    assert abs(rep.estimates["scalar"] - 1j) <= 1e-12
    assert rep.verdict == "pass"


def test_prop33_validation():
    with pytest.raises(DimensionMismatch):
        experiment_prop33(np.eye(4), np.eye(5), trials=1)


def test_thm36_scalar_contraction_recovers_g():
    law = circle_atoms([(0.0, 0.5), (np.pi, 0.5)])
    rho = 0.35
    rep = experiment_thm36(law, rho * np.eye(200), N=200, trials=20, seed=1)
    assert abs(rep.estimates["g"] - rho) <= 0.05
    assert rep.residuals["solve"] <= 1e-10
    assert rep.estimates["ball_margin"] > 0
    assert rep.residuals["omega_shortfall"] == 0.0


def test_thm36_haar_branch_reports_mean_only():
    c0 = 0.5 * _haar(_rng(0, 999), 64)
    rep = experiment_thm36(haar_circle(), c0, N=64, trials=10, seed=0)
    assert set(rep.residuals) == {"haar_abs", "omega_shortfall"}
    assert "g" not in rep.estimates


def test_thm36_validation():
    law = circle_atoms([(0.0, 1.0)])
    with pytest.raises(DimensionMismatch):
        experiment_thm36(law, np.zeros((3, 3)), N=4, trials=1)
    with pytest.raises(BadParams):
        experiment_thm36(law, np.eye(4), N=4, trials=1)


def test_thm31_block_trivial_second_summand():
    # eta_Y = 0 forces F(b) = b, so both estimators average the same model
    eta_x = CovarianceMap((np.array([[0.8, 0.2], [0.0, 0.5]]),))
    eta_y = CovarianceMap((np.zeros((2, 2)),))
    rep = experiment_thm31_block(eta_x, eta_y, 1j * np.eye(2), N=48, trials=10,
                                 seed=0)
    assert rep.residuals["subordination"] <= 1e-7
    assert rep.estimates["n"] == 2


def test_thm31_block_validation():
    eta = CovarianceMap((np.eye(2),))
    with pytest.raises(BadParams):
        experiment_thm31_block(eta, eta, 1j * np.eye(2), N=3000, trials=1)
    with pytest.raises(BadParams):
        experiment_thm31_block(eta, eta, 0.1j * np.eye(2), N=32, trials=1)
    with pytest.raises(DimensionMismatch):
        experiment_thm31_block(eta, eta, 1j * np.eye(3), N=32, trials=1)


def test_lemma34_sweep_small():
    rep = experiment_lemma34(dims=(2, 3, 4), samples=1000, seed=0,
                             identity_samples=200)
    assert rep.residuals["violations"] == 0.0
    assert rep.residuals["identity"] <= 1e-11
    assert rep.verdict == "pass"


def test_experiment_determinism():
    lam = balanced(20)
    a0 = np.diag(balanced(20)[::-1])
    r1 = experiment_prop32(lam, a0, trials=5, seed=11)
    r2 = experiment_prop32(lam, a0, trials=5, seed=11)
    assert r1.to_json() == r2.to_json()


def test_convergence_trend_doubling_N():
    # doubling N at fixed trials should shrink each experiment's primary
    # residual for at least 4 of 5 seeds; primaries are the quantities
    # whose noise floor actually scales with N (fit for prop32,
    # scalar_dev_diag for prop33, haar_abs for thm36, subordination for
    # the block model)
    eta_x = CovarianceMap((np.array([[0.9, 0.3], [0.0, 0.6]]),))
    eta_y = CovarianceMap((np.array([[0.5, -0.2], [0.1, 0.7]]),))
    wins = {"prop32": 0, "prop33": 0, "thm36": 0, "thm31_block": 0}
    for seed in range(5):
        def p32(N):
            return experiment_prop32(balanced(N), np.diag(balanced(N)[::-1]),
                                     trials=40, seed=seed).residuals["fit"]
        wins["prop32"] += p32(160) < p32(80)

        def p33(N):
            return experiment_prop33(
                np.diag(balanced(N)), np.diag(np.linspace(0.5, 1.5, N)),
                trials=40, seed=seed).residuals["scalar_dev_diag"]
        wins["prop33"] += p33(160) < p33(80)

        def t36(N):
            c0 = 0.7 * _haar(_rng(seed, 999), N)
            return experiment_thm36(haar_circle(), c0, N=N, trials=30,
                                    seed=seed).residuals["haar_abs"]
        wins["thm36"] += t36(128) < t36(64)

        def t31(N):
            return experiment_thm31_block(eta_x, eta_y, 1j * np.eye(2), N=N,
                                          trials=20, seed=seed
                                          ).residuals["subordination"]
        wins["thm31_block"] += t31(64) < t31(32)
    for name, w in wins.items():
        assert w >= 4, f"{name} improved in only {w}/5 seeds"
