import math
from dataclasses import replace

import numpy as np
import pytest

from ifscavity.errors import ConfigError, DegenerateParameterError, OverdampedError
from ifscavity.evolution import (
    Mode,
    ModelParams,
    amplitudes_general,
    amplitudes_lossy,
    amplitudes_resonant,
    evolve,
    initial_state,
    integrate_ode,
    rabi_beta,
    reversed_couplings,
)
from ifscavity.ifs import CoherentSpec, Family, WeightSequence, initial_amplitudes

FACT = WeightSequence(Family.FACTORIAL)
FACT2 = WeightSequence(Family.FACTORIAL_SQUARED)
QB = WeightSequence(Family.QBRACKET, q=0.5)


def poisson_field(seq=FACT, nbar=0.5, zeta=0.0):
    return initial_amplitudes(CoherentSpec(nbar, zeta), seq)


def params(seq=FACT, nbar=0.5, zeta=0.0, **kw):
    return ModelParams(seq, poisson_field(seq, nbar, zeta), **kw)


def test_rabi_beta_examples():
    p = params(g1=0.7, g2=0.7)
    for n in (1, 4, 9):
        assert rabi_beta(FACT, p, n) == pytest.approx(math.sqrt(2 * n) * 0.7, rel=1e-14)
    assert rabi_beta(QB, params(QB), 2) == pytest.approx(math.sqrt(3), rel=1e-14)
    zero = params(g1=0.0, g2=0.0, detuning=2.0)
    assert rabi_beta(FACT, zero, 3) == pytest.approx(1.0)


def test_general_at_t0():
    p = params(g1=0.4, g2=1.1, detuning=0.3, theta=1.0, phi=0.6)
    a = amplitudes_general(p, 0.0)
    Fn = p.F[1:]
    np.testing.assert_allclose(a.ca, math.cos(0.5) * Fn, atol=1e-15)
    np.testing.assert_allclose(a.cb, math.sin(0.5) * np.exp(-0.6j) * Fn, atol=1e-15)
    np.testing.assert_allclose(a.cc, 0, atol=1e-15)


@pytest.mark.parametrize("seq", [FACT, FACT2, QB])
@pytest.mark.parametrize("t", [0.0, 0.37, 3.0, 24.9])
def test_general_reduces_to_resonant(seq, t):
    p = params(seq, g1=0.8, g2=0.8)
    gen, res = amplitudes_general(p, t), amplitudes_resonant(p, t)
    for x, y in ((gen.ca, res.ca), (gen.cb, res.cb), (gen.cc, res.cc)):
        np.testing.assert_allclose(x, y, rtol=0, atol=1e-12)


def test_general_two_level_subcase():
    g, t = 0.9, 2.3
    p = params(g1=g, g2=0.0, theta=0.0)
    a = amplitudes_general(p, t)
    beta = g * np.sqrt(FACT.ratios[1:41])
    expected = -1j * p.F[1:] * (g * np.sqrt(FACT.ratios[1:41]) / beta) * np.sin(beta * t)
    np.testing.assert_allclose(a.cc, expected, atol=1e-12)


def test_general_degenerate():
    with pytest.raises(DegenerateParameterError):
        amplitudes_general(params(g1=0.0, g2=0.0), 1.0)


def test_resonant_examples():
    p = params()
    Fn = p.F[1:]
    a0 = amplitudes_resonant(p, 0.0)
    np.testing.assert_allclose(a0.ca, Fn / math.sqrt(2), atol=1e-16)
    np.testing.assert_allclose(a0.cc, 0)
    # beta_n t = pi/2 for n = 2 (beta_2 = 2)
    a = amplitudes_resonant(p, math.pi / 4)
    assert abs(a.cc[1]) == pytest.approx(abs(Fn[1]), rel=1e-14)
    assert a.ca[1] == pytest.approx(math.sqrt(2) * Fn[1], rel=1e-14)
    a = amplitudes_resonant(p, math.pi / 2)
    assert a.block_norms()[1] == pytest.approx(9 * abs(Fn[1]) ** 2, rel=1e-14)


@pytest.mark.parametrize("seq", [FACT, FACT2, QB])
def test_resonant_block_norm_identity(seq):
    p = params(seq, zeta=0.3)
    beta = rabi_beta(seq, p, p.n)
    for t in np.linspace(0, 40, 17):
        a = amplitudes_resonant(p, t)
        expected = np.abs(p.F[1:]) ** 2 * (5 - 4 * np.cos(beta * t))
        np.testing.assert_allclose(a.block_norms(), expected, rtol=1e-12, atol=1e-300)


def test_resonant_requires_resonance():
    with pytest.raises(ConfigError):
        amplitudes_resonant(params(g1=1, g2=0.5), 1.0)
    with pytest.raises(ConfigError):
        amplitudes_resonant(params(detuning=0.1), 1.0)


def test_lossy_beta_example():
    p = params(k=0.1)
    bp2 = 2 * 1.0 - 0.1**2 / 16
    assert math.sqrt(bp2) == pytest.approx(1.41399, abs=5e-6)
    from ifscavity.evolution import lossy_beta_sq

    assert lossy_beta_sq(p)[0] == pytest.approx(bp2, rel=1e-15)


def test_lossy_t0_keeps_printed_offset():
    k = 0.1
    p = params(k=k)
    a = amplitudes_lossy(p, 0.0)
    r = FACT.ratios[1:41]
    bp2 = 2 * r - k**2 / 16
    B1 = np.sqrt(r) * p.F[1:] / (math.sqrt(2) * np.sqrt(bp2))
    expected = -np.sqrt(r) * B1 * (-1) / (bp2 + k**2 / 4) + p.F[1:] / math.sqrt(2)
    np.testing.assert_allclose(a.cc, 0, atol=1e-16)
    np.testing.assert_allclose(a.ca, expected, rtol=1e-14)
    assert not np.allclose(a.ca, p.F[1:] / math.sqrt(2))


def test_lossy_small_k_limit_is_continuous():
    # hand reduction of the printed form at k -> 0:
    #   Cc -> -F sin(bt),  Ca -> -F (cos bt - 2) / (4 g sqrt(r)) + F/sqrt(2)
    g, t = 1.0, 3.7
    p = params(k=1e-6)
    a = amplitudes_lossy(p, t)
    r = FACT.ratios[1:41]
    bt = np.sqrt(2 * r) * g * t
    Fn = p.F[1:]
    np.testing.assert_allclose(a.cc, -Fn * np.sin(bt), atol=1e-6)
    np.testing.assert_allclose(a.ca, -Fn * (np.cos(bt) - 2) / (4 * g * np.sqrt(r)) + Fn / math.sqrt(2), atol=1e-6)
    # ... which is not the resonant closed form
    res = amplitudes_resonant(replace(p, k=0.0), t)
    assert np.max(np.abs(a.ca - res.ca)) > 1e-2


def test_lossy_overdamped_rejected():
    with pytest.raises(OverdampedError):
        amplitudes_lossy(params(g1=0.01, g2=0.01, k=1.0), 1.0)
    with pytest.raises(ConfigError):
        amplitudes_lossy(params(k=0.0), 1.0)


@pytest.mark.parametrize("n", [1, 5, 20])
def test_oracle_matches_exact_resonant_solution(n):
    # exact solution of the k = 0 equations: Ca = Cb = F cos(bt)/sqrt(2), Cc = -i F sin(bt)
    p = params(g1=1.0, g2=1.0)
    beta = rabi_beta(FACT, p, n)
    t = 50 / beta
    a = integrate_ode(p, t, steps=10_000)
    F = p.F[n]
    i = n - 1
    assert abs(a.ca[i] - F * math.cos(beta * t) / math.sqrt(2)) < 1e-8
    assert abs(a.cb[i] - F * math.cos(beta * t) / math.sqrt(2)) < 1e-8
    assert abs(a.cc[i] - (-1j) * F * math.sin(beta * t)) < 1e-8


@pytest.mark.parametrize("seq", [FACT, FACT2, QB])
def test_oracle_conserves_norm(seq):
    p = params(seq, shifted_field=False)
    assert abs(integrate_ode(p, 0.0).total_norm() - 1) < 1e-12
    a = integrate_ode(p, 50.0)
    assert abs(a.total_norm() - 1) < 1e-8


def test_oracle_time_reversal():
    p = params(g1=1.0, g2=1.0, zeta=0.0)
    fwd = integrate_ode(p, 12.0)
    back = integrate_ode(reversed_couplings(p), 24.0, initial=fwd)
    ca0, cb0, cc0 = initial_state(p)
    for x, y in ((back.ca, ca0), (back.cb, cb0), (back.cc, cc0)):
        assert np.max(np.abs(x - y)) < 1e-6


def test_oracle_fourth_order_convergence():
    p = params(FACT, g1=1.0, g2=1.0, detuning=0.3, theta=1.2, phi=0.4)
    t = 6.0
    ref = integrate_ode(p, t, steps=1600)

    def err(steps):
        a = integrate_ode(p, t, steps=steps)
        return max(np.max(np.abs(a.ca - ref.ca)), np.max(np.abs(a.cc - ref.cc)))

    ratio = err(200) / err(400)
    assert 12 < ratio < 20


def test_two_level_rabi_boson_limit():
    g = 1.0
    p = params(g1=g, g2=0.0, theta=0.0)
    t = 7.5
    a = integrate_ode(p, t)
    n = p.n
    expected = np.abs(p.F[1:]) ** 2 * np.sin(g * np.sqrt(n) * t) ** 2
    np.testing.assert_allclose(np.abs(a.cc) ** 2, expected, atol=1e-8)


def test_pure_decay():
    k, t = 0.3, 4.0
    p = params(g1=0.0, g2=0.0, k=k, theta=1.0)
    a = integrate_ode(p, t, steps=4000)
    ca0, cb0, _ = initial_state(p)
    lower = FACT.ratios[0:40]
    np.testing.assert_allclose(a.ca, ca0 * np.exp(-k / 2 * lower * t), rtol=1e-8, atol=1e-300)
    np.testing.assert_allclose(a.cb, cb0 * np.exp(-k / 2 * lower * t), rtol=1e-8, atol=1e-300)
    # the c blocks decay at ratio(n); check with a seeded c amplitude
    from ifscavity.evolution import AmplitudeSet

    start = AmplitudeSet(np.zeros(40, complex), np.zeros(40, complex), np.ones(40, complex), 0.0, Mode.ORACLE_ODE)
    out = integrate_ode(p, t, steps=4000, initial=start)
    np.testing.assert_allclose(out.cc, np.exp(-k / 2 * FACT.ratios[1:41] * t), rtol=1e-8)


def test_shifted_and_exact_initial_states():
    p = params()
    ca, cb, cc = initial_state(p)
    np.testing.assert_allclose(ca, p.F[1:] / math.sqrt(2))
    ca, _, _ = initial_state(p, shifted=False)
    np.testing.assert_allclose(ca, p.F[:-1] / math.sqrt(2))


def test_evolve_dispatch():
    p = params()
    a0 = evolve(Mode.PAPER_CLOSED_FORM, p, 0.0)
    ca, cb, cc = initial_state(p)
    np.testing.assert_allclose(a0.ca, ca)
    np.testing.assert_allclose(a0.cc, cc)
    assert a0.mode is Mode.PAPER_CLOSED_FORM
    assert evolve(Mode.ORACLE_ODE, p, 1.0).mode is Mode.ORACLE_ODE
    assert evolve("paper-lossy", replace(p, k=0.1), 1.0).mode is Mode.PAPER_LOSSY
    with pytest.raises(ConfigError):
        evolve(Mode.PAPER_LOSSY, p, 1.0)
    with pytest.raises(ConfigError):
        evolve(Mode.PAPER_CLOSED_FORM, replace(p, k=0.1), 1.0)
    # non-resonant settings go through the general closed form
    gen = evolve(Mode.PAPER_CLOSED_FORM, replace(p, detuning=0.2), 1.0)
    np.testing.assert_allclose(gen.cc, amplitudes_general(replace(p, detuning=0.2), 1.0).cc)


def test_paper_and_oracle_disagree_at_half_period():
    p = params()
    # beta_1 t = pi
    t = math.pi / math.sqrt(2)
    paper, oracle = evolve(Mode.PAPER_CLOSED_FORM, p, t), evolve(Mode.ORACLE_ODE, p, t)
    assert paper.block_norms()[0] == pytest.approx(9 * abs(p.F[1]) ** 2)
    assert oracle.block_norms()[0] == pytest.approx(abs(p.F[1]) ** 2, rel=1e-8)
    rel = np.max(np.abs(paper.block_norms() - oracle.block_norms()) / oracle.block_norms())
    assert rel > 1


@pytest.mark.parametrize("seq", [FACT, FACT2, QB])
def test_lossy_finite_over_figure_range(seq):
    p = params(seq, k=0.1)
    for t in np.linspace(0, 50, 101):
        a = evolve(Mode.PAPER_LOSSY, p, t)
        assert np.all(np.isfinite(a.ca)) and np.all(np.isfinite(a.cc))


def test_params_validation():
    with pytest.raises(ConfigError):
        params(k=-1.0)
    with pytest.raises(ConfigError):
        params(g1=1j)
    with pytest.raises(ConfigError):
        ModelParams(WeightSequence(Family.FACTORIAL, n_max=5), np.ones(10))
