"""Time evolution of the V-type atom coupled to one interacting-Fock-space mode.

Amplitudes are grouped in n-blocks, n = 1..n_max: ``ca[n-1]`` and ``cb[n-1]``
put the atom in |a> or |b> with the field in level n-1, ``cc[n-1]`` puts it in
|c> with the field in level n.  Array index i always stands for block n = i+1.

Two families of evaluators live here:

* the printed closed forms (general detuned, resonant, lossy), reproduced
  term by term including the F_{n-1} ~ F_n substitution;
* ``integrate_ode``, a fixed-step RK4 solve of the amplitude equations of
  motion, used as an independent check on the closed forms.

The resonant closed form does not satisfy the equations of motion (its
atomic amplitudes carry cos(beta t) - 2 where the exact solution has
cos(beta t)), so the two families disagree away from t = 0 by design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import ConfigError, DegenerateParameterError, IntegrationError, OverdampedError
from .ifs import WeightSequence

STEPS_PER_UNIT = 200
# keep |beta h| well inside the RK4 stability region for steep weight families
MAX_PHASE_PER_STEP = 0.5


class Mode(str, Enum):
    PAPER_CLOSED_FORM = "paper-closed-form"
    PAPER_LOSSY = "paper-lossy"
    ORACLE_ODE = "oracle-ode"


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Physical parameters plus the weights and initial field amplitudes F_0..F_{n_max}.

    ``shifted_field`` selects the t = 0 atomic blocks: True uses F_n in block n
    (the substitution behind the closed forms), False uses the exact F_{n-1}.
    Only the ODE oracle honours False.
    """

    seq: WeightSequence
    F: np.ndarray
    g1: float = 1.0
    g2: float = 1.0
    detuning: float = 0.0
    theta: float = math.pi / 2  # atomic superposition angle alpha
    phi: float = 0.0  # atomic superposition phase psi
    k: float = 0.0
    shifted_field: bool = True

    def __post_init__(self):
        F = np.array(self.F, dtype=complex).ravel()
        if len(F) < 2:
            raise ConfigError("need at least F_0, F_1")
        if len(F) - 1 > self.seq.n_max:
            raise ConfigError(f"{len(F) - 1} field levels exceed weight table n_max={self.seq.n_max}")
        F.setflags(write=False)
        object.__setattr__(self, "F", F)
        for name in ("g1", "g2", "detuning", "theta", "phi", "k"):
            value = getattr(self, name)
            if isinstance(value, complex) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite real number, got {value!r}")
        if self.k < 0:
            raise ConfigError(f"decay rate k must be >= 0, got {self.k}")

    @classmethod
    def resonant(cls, seq, F, g=1.0, k=0.0, **kw) -> "ModelParams":
        return cls(seq, F, g1=g, g2=g, k=k, **kw)

    @property
    def n_max(self) -> int:
        return len(self.F) - 1

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.n_max + 1)

    @property
    def is_resonant(self) -> bool:
        return (
            self.detuning == 0.0
            and self.g1 == self.g2
            and math.isclose(self.theta, math.pi / 2, rel_tol=0, abs_tol=1e-15)
            and self.phi == 0.0
        )


@dataclass(frozen=True, eq=False)
class AmplitudeSet:
    ca: np.ndarray
    cb: np.ndarray
    cc: np.ndarray
    t: float
    mode: Mode

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, len(self.cc) + 1)

    def block_norms(self) -> np.ndarray:
        return np.abs(self.ca) ** 2 + np.abs(self.cb) ** 2 + np.abs(self.cc) ** 2

    def total_norm(self) -> float:
        return float(self.block_norms().sum())


def _sqrt_ratio(params: ModelParams) -> np.ndarray:
    return np.sqrt(params.seq.ratios[1 : params.n_max + 1])


def rabi_beta(seq: WeightSequence, params: ModelParams, n):
    """beta_n = sqrt(detuning^2/4 + (g1^2 + g2^2) ratio(n)); accepts scalar or array n."""
    r = seq.ratios[np.asarray(n)]
    beta = np.sqrt(params.detuning**2 / 4 + (params.g1**2 + params.g2**2) * r)
    return float(beta) if np.ndim(beta) == 0 else beta


def initial_state(params: ModelParams, shifted: bool | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if shifted is None:
        shifted = params.shifted_field
    F = params.F
    Fa = F[1:] if shifted else F[:-1]
    ca = math.cos(params.theta / 2) * Fa
    cb = math.sin(params.theta / 2) * np.exp(-1j * params.phi) * Fa
    return ca.astype(complex), cb.astype(complex), np.zeros(params.n_max, dtype=complex)


def _expm1_over(x: np.ndarray, t: float) -> np.ndarray:
    # (exp(i x t) - 1)/x, continuous through x = 0
    out = np.empty(x.shape, dtype=complex)
    small = np.abs(x) < 1e-300
    xs = np.where(small, 1.0, x)
    out[:] = np.expm1(1j * xs * t) / xs
    out[small] = 1j * t
    return out


def amplitudes_general(params: ModelParams, t: float) -> AmplitudeSet:
    """Printed closed forms for arbitrary detuning, couplings and atomic superposition."""
    Fn = params.F[1:]
    sr = _sqrt_ratio(params)
    d2 = params.detuning / 2
    beta = rabi_beta(params.seq, params, params.n)
    if np.any(beta == 0.0):
        raise DegenerateParameterError("beta_n = 0: zero detuning with vanishing couplings")
    c, s = math.cos(params.theta / 2), math.sin(params.theta / 2) * np.exp(-1j * params.phi)
    B1 = (params.g1 * sr * c * Fn + params.g2 * sr * s * Fn) / (2 * beta)
    cc = B1 * (np.exp(-1j * (d2 + beta) * t) - np.exp(-1j * (d2 - beta) * t))
    bracket = _expm1_over(d2 + beta, t) - _expm1_over(d2 - beta, t)
    ca = -params.g1 * sr * B1 * bracket + c * Fn
    cb = -params.g2 * sr * B1 * bracket + s * Fn
    return AmplitudeSet(ca, cb, cc, t, Mode.PAPER_CLOSED_FORM)


def _require_resonant(params: ModelParams, what: str):
    if not params.is_resonant:
        raise ConfigError(f"{what} needs zero detuning, g1 == g2, alpha = 90 deg and psi = 0")


def amplitudes_resonant(params: ModelParams, t: float) -> AmplitudeSet:
    _require_resonant(params, "resonant closed form")
    Fn = params.F[1:]
    bt = math.sqrt(2) * params.g1 * _sqrt_ratio(params) * t
    cc = -1j * Fn * np.sin(bt)
    ca = -(1 / math.sqrt(2)) * Fn * (np.cos(bt) - 2)
    return AmplitudeSet(ca, ca.copy(), cc, t, Mode.PAPER_CLOSED_FORM)


def lossy_beta_sq(params: ModelParams) -> np.ndarray:
    r = params.seq.ratios[1 : params.n_max + 1]
    return 2 * params.g1**2 * r - params.k**2 / 16


def amplitudes_lossy(params: ModelParams, t: float) -> AmplitudeSet:
    """Printed cavity-decay closed form, term for term.

    Known quirks of the printed expression are kept: the bracket mixes
    dimensions, the t = 0 value is not the initial state, and k -> 0 does not
    recover the resonant closed form.
    """
    _require_resonant(params, "lossy closed form")
    k, g = params.k, params.g1
    if k <= 0:
        raise ConfigError("lossy closed form needs k > 0")
    bp2 = lossy_beta_sq(params)
    active = params.seq.ratios[1 : params.n_max + 1] > 0
    if np.any(bp2[active] <= 0):
        n_bad = int(params.n[active][bp2[active] <= 0][0])
        raise OverdampedError(f"beta'^2 <= 0 at n={n_bad} (k={k:g}, g={g:g}): overdamped regime")
    bp = np.sqrt(np.where(active, bp2, 1.0))
    Fn = params.F[1:]
    sr = _sqrt_ratio(params)
    B1 = sr * Fn * g / (math.sqrt(2) * bp)
    den = bp2 + k**2 / 4
    cc = -2 * B1 * math.exp(-k * t / 4) * np.sin(bp * t)
    ca = -g * sr * B1 * ((np.cos(bp * t) - 2) / den + k**2 * np.sin(bp * t) / den) + Fn / math.sqrt(2)
    return AmplitudeSet(ca.astype(complex), ca.astype(complex), cc.astype(complex), t, Mode.PAPER_LOSSY)


def default_steps(params: ModelParams, duration: float, steps_per_unit: int = STEPS_PER_UNIT) -> int:
    """RK4 step count for a span of physical time."""
    g = max(abs(params.g1), abs(params.g2), 1e-300)
    beta_max = float(np.max(rabi_beta(params.seq, params, params.n))) + params.k * float(
        np.max(params.seq.ratios[: params.n_max + 1])
    ) / 2
    by_g = steps_per_unit * g * abs(duration)
    by_stability = beta_max * abs(duration) / MAX_PHASE_PER_STEP
    return max(1, math.ceil(max(by_g, by_stability) - 1e-9))


def _rhs_factory(params: ModelParams):
    sr = _sqrt_ratio(params)
    r = params.seq.ratios
    lower = r[0 : params.n_max]  # ratio(n-1): level of the a/b amplitudes
    upper = r[1 : params.n_max + 1]  # ratio(n): level of the c amplitude
    ga, gb = params.g1 * sr, params.g2 * sr
    half_k = params.k / 2
    det = params.detuning

    def rhs(t, ca, cb, cc):
        ph = np.exp(1j * det * t) if det else 1.0
        dca = -1j * ga * ph * cc
        dcb = -1j * gb * ph * cc
        dcc = -1j * np.conj(ph) * (ga * ca + gb * cb)
        if half_k:
            dca = dca - half_k * lower * ca
            dcb = dcb - half_k * lower * cb
            dcc = dcc - half_k * upper * cc
        return dca, dcb, dcc

    return rhs


def _rk4(rhs, y, t0: float, t1: float, steps: int):
    ca, cb, cc = y
    h = (t1 - t0) / steps
    for i in range(steps):
        t = t0 + i * h
        k1 = rhs(t, ca, cb, cc)
        k2 = rhs(t + h / 2, ca + h / 2 * k1[0], cb + h / 2 * k1[1], cc + h / 2 * k1[2])
        k3 = rhs(t + h / 2, ca + h / 2 * k2[0], cb + h / 2 * k2[1], cc + h / 2 * k2[2])
        k4 = rhs(t + h, ca + h * k3[0], cb + h * k3[1], cc + h * k3[2])
        ca = ca + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        cb = cb + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        cc = cc + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    if not (np.all(np.isfinite(ca)) and np.all(np.isfinite(cb)) and np.all(np.isfinite(cc))):
        raise IntegrationError(f"non-finite amplitudes integrating {t0:g} -> {t1:g}")
    return ca, cb, cc


def integrate_ode(
    params: ModelParams,
    t: float,
    steps: int | None = None,
    initial: AmplitudeSet | None = None,
) -> AmplitudeSet:
    """RK4 solution of the amplitude equations of motion.

    Starts from ``initial`` (at ``initial.t``) when given, otherwise from the
    t = 0 state.  Cavity decay damps each amplitude at rate (k/2) ratio(level).
    """
    if initial is None:
        y, t0 = initial_state(params), 0.0
    else:
        y, t0 = (initial.ca, initial.cb, initial.cc), initial.t
    if steps is None:
        steps = default_steps(params, t - t0)
    if steps < 1:
        raise ConfigError(f"steps must be >= 1, got {steps}")
    if t == t0:
        ca, cb, cc = (np.array(a, dtype=complex) for a in y)
    else:
        ca, cb, cc = _rk4(_rhs_factory(params), y, t0, t, steps)
    return AmplitudeSet(ca, cb, cc, t, Mode.ORACLE_ODE)


def evolve(mode: Mode, params: ModelParams, t: float, **kw) -> AmplitudeSet:
    mode = Mode(mode)
    if mode is Mode.ORACLE_ODE:
        return integrate_ode(params, t, **kw)
    if mode is Mode.PAPER_LOSSY:
        if params.k <= 0:
            raise ConfigError("paper-lossy mode needs k > 0")
        return amplitudes_lossy(params, t)
    if params.k != 0:
        raise ConfigError("paper-closed-form mode has no cavity decay; use paper-lossy for k > 0")
    if params.is_resonant:
        return amplitudes_resonant(params, t)
    return amplitudes_general(params, t)


def reversed_couplings(params: ModelParams) -> ModelParams:
    """Same model with g1, g2 negated; evolving with it undoes a k = 0, zero-detuning run."""
    return replace(params, g1=-params.g1, g2=-params.g2)
