"""One-mode interacting Fock space: weight sequences, truncated vectors, ladder operators.

Vectors are stored in the orthonormal basis e_n = |n>/sqrt(lambda_n), in
which the deformed ladder operators act as

    A^dag e_n = sqrt(lambda_{n+1}/lambda_n) e_{n+1}
    A     e_n = sqrt(lambda_n/lambda_{n-1}) e_{n-1},   A e_0 = 0

so everything reduces to the ratio sequence ratio(n) = lambda_n/lambda_{n-1}
with ratio(0) = 0.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigError, TruncationError

DEFAULT_N_MAX = 40
TAIL_TOLERANCE = 1e-12


class Family(str, Enum):
    FACTORIAL = "factorial"
    FACTORIAL_SQUARED = "factorial2"
    QBRACKET = "qbracket"
    QBRACKET_FACTORIAL = "qbracket-factorial"
    CUSTOM = "custom"


_Q_FAMILIES = (Family.QBRACKET, Family.QBRACKET_FACTORIAL)


def q_bracket(n: int, q: float) -> float:
    """[n] = (1 - q^n)/(1 - q), with [0] := 1."""
    if n == 0:
        return 1.0
    return (1.0 - q**n) / (1.0 - q)


@dataclass(frozen=True)
class WeightSequence:
    """Memoized table lambda_0 .. lambda_{n_max+2}.

    Build formula families with ``WeightSequence(Family.X, n_max, q=...)`` and
    user tables with :meth:`custom` or :meth:`from_file`.
    """

    family: Family
    n_max: int = DEFAULT_N_MAX
    q: float | None = None
    values: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if self.n_max < 0:
            raise ConfigError(f"n_max must be >= 0, got {self.n_max}")
        if fam in _Q_FAMILIES:
            if self.q is None or not 0.0 < self.q < 1.0:
                raise ConfigError(f"{fam.value} weights need q in (0, 1), got {self.q}")
        elif self.q is not None:
            object.__setattr__(self, "q", None)

        size = self.n_max + 3
        if fam is Family.CUSTOM:
            vals = tuple(float(v) for v in self.values)
            if len(vals) < size:
                raise ConfigError(
                    f"custom weight table has {len(vals)} entries; "
                    f"n_max={self.n_max} needs lambda_0..lambda_{self.n_max + 2}"
                )
            vals = vals[:size]
        else:
            try:
                vals = tuple(self._formula(n) for n in range(size))
            except OverflowError:
                raise ConfigError(f"{fam.value} weights overflow double precision; lower n_max") from None
        _validate_table(vals)
        object.__setattr__(self, "values", vals)

    @classmethod
    def custom(cls, values, n_max: int | None = None) -> "WeightSequence":
        values = tuple(float(v) for v in values)
        if n_max is None:
            n_max = len(values) - 3
        return cls(Family.CUSTOM, n_max, values=values)

    @classmethod
    def from_file(cls, path, n_max: int | None = None) -> "WeightSequence":
        return cls.custom(load_weight_table(path), n_max)

    def _formula(self, n: int) -> float:
        fam = self.family
        if fam is Family.FACTORIAL:
            return float(math.factorial(n))
        if fam is Family.FACTORIAL_SQUARED:
            return float(math.factorial(n)) ** 2
        if fam is Family.QBRACKET:
            return q_bracket(n, self.q)
        if fam is Family.QBRACKET_FACTORIAL:
            return math.prod(q_bracket(m, self.q) for m in range(1, n + 1))
        raise AssertionError(fam)

    @property
    def label(self) -> str:
        return self.family.value

    def weight(self, n: int) -> float:
        if not 0 <= n < len(self.values):
            raise IndexError(f"lambda_{n} outside table 0..{len(self.values) - 1}")
        return self.values[n]

    def weight_ratio(self, a: int, b: int) -> float:
        """lambda_a / lambda_b; 0 when either index is negative or lambda_b = 0."""
        if a < 0 or b < 0:
            return 0.0
        den = self.weight(b)
        if den == 0.0:
            return 0.0
        return self.weight(a) / den

    def ratio(self, n: int) -> float:
        if n < 0:
            return 0.0
        if n > self.n_max + 2:
            raise IndexError(f"ratio({n}) outside table range 0..{self.n_max + 2}")
        return float(self.ratios[n])

    @cached_property
    def ratios(self) -> np.ndarray:
        """ratio(n) for n = 0 .. n_max+2 as an array."""
        out = np.zeros(len(self.values))
        for n in range(1, len(self.values)):
            out[n] = self.weight_ratio(n, n - 1)
        out.setflags(write=False)
        return out

    def commutator_diag(self, n: int) -> float:
        """Eigenvalue of [A, A^dag] on e_n."""
        return self.ratio(n + 1) - self.ratio(n)

    def _ratio_beyond(self, n: int) -> float | None:
        # closed-form ratios past the table, used only for series tails
        if n <= self.n_max + 2:
            return self.ratio(n)
        fam = self.family
        if fam is Family.FACTORIAL:
            return float(n)
        if fam is Family.FACTORIAL_SQUARED:
            return float(n) ** 2
        if fam is Family.QBRACKET:
            return q_bracket(n, self.q) / q_bracket(n - 1, self.q)
        if fam is Family.QBRACKET_FACTORIAL:
            return q_bracket(n, self.q)
        return None


def _validate_table(vals):
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError("weight table overflows double precision; lower n_max")
    if vals[0] != 1.0:
        raise ConfigError(f"lambda_0 must be 1, got {vals[0]}")
    seen_zero = False
    for n, v in enumerate(vals):
        if v < 0:
            raise ConfigError(f"lambda_{n} = {v} is negative")
        if v == 0:
            seen_zero = True
        elif seen_zero:
            raise ConfigError(f"lambda_{n} = {v} follows a zero weight; zeros must form a tail")


def load_weight_table(path) -> list[float]:
    """Read one weight per line; blank lines and '#' comments are skipped."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read weight table {path}: {e}") from e
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: not a number: {line!r}") from None
    if not values:
        raise ConfigError(f"{path}: empty weight table")
    return values


@dataclass(frozen=True, eq=False)
class FieldVector:
    """Coefficients c_0..c_{n_max} over the orthonormal basis e_n.

    ``truncation_loss`` accumulates squared magnitude pushed above n_max by
    creation operators.
    """

    coeffs: np.ndarray
    truncation_loss: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def basis(cls, n: int, n_max: int) -> "FieldVector":
        c = np.zeros(n_max + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def inner(self, other: "FieldVector") -> complex:
        """<self|other>, antilinear in self."""
        return complex(np.vdot(self.coeffs, other.coeffs))

    def __add__(self, other):
        return FieldVector(self.coeffs + other.coeffs, self.truncation_loss + other.truncation_loss)

    def __mul__(self, scalar):
        return FieldVector(self.coeffs * scalar, self.truncation_loss * abs(scalar) ** 2)

    __rmul__ = __mul__


def _check_fits(seq: WeightSequence, f: FieldVector):
    if f.n_max > seq.n_max:
        raise ConfigError(f"vector n_max={f.n_max} exceeds weight table n_max={seq.n_max}")


def apply_create(seq: WeightSequence, f: FieldVector) -> FieldVector:
    _check_fits(seq, f)
    c = f.coeffs
    N = f.n_max
    amp = np.sqrt(seq.ratios[1 : N + 2])  # sqrt(ratio(n+1)) for n = 0..N
    out = np.zeros_like(c)
    out[1:] = amp[:-1] * c[:-1]
    spill = float(abs(c[-1]) ** 2 * amp[-1] ** 2)
    return FieldVector(out, f.truncation_loss + spill)


def apply_annihilate(seq: WeightSequence, f: FieldVector) -> FieldVector:
    _check_fits(seq, f)
    c = f.coeffs
    out = np.zeros_like(c)
    out[:-1] = np.sqrt(seq.ratios[1 : f.n_max + 1]) * c[1:]
    return FieldVector(out, f.truncation_loss)


def apply_number(seq: WeightSequence, f: FieldVector) -> FieldVector:
    _check_fits(seq, f)
    return FieldVector(seq.ratios[: f.n_max + 1] * f.coeffs, f.truncation_loss)


def _suggest_n_max(terms, total):
    tail = 0.0
    for n in range(len(terms) - 1, -1, -1):
        if tail + terms[n] >= TAIL_TOLERANCE * total:
            return n
        tail += terms[n]
    return 0


def _series_tail(seq: WeightSequence, x: float, n_max: int, head_last: float, head_total: float):
    """Sum of x^n/lambda_n for n > n_max, plus the terms seen (for n_max suggestions)."""
    terms = []
    last = head_last
    n = n_max
    while True:
        n += 1
        r = seq._ratio_beyond(n)
        if r is None:
            # custom table exhausted: geometric bound from the last known ratio
            rho = x / seq.ratio(n - 1) if seq.ratio(n - 1) > 0 else 0.0
            if rho >= 1.0:
                return math.inf, terms
            return sum(terms) + last * rho / (1.0 - rho), terms
        if r == 0.0:
            return sum(terms), terms
        last = last * x / r
        terms.append(last)
        total = head_total + sum(terms)
        if last <= 1e-18 * total and x / r < 1.0:
            return sum(terms), terms
        if n - n_max > 20000 or not math.isfinite(last):
            return math.inf, terms


def coherent_vector(seq: WeightSequence, alpha: complex, n_max: int | None = None) -> FieldVector:
    """Normalized eigenvector of A with eigenvalue alpha, truncated at n_max."""
    if n_max is None:
        n_max = seq.n_max
    if n_max > seq.n_max:
        raise ConfigError(f"n_max={n_max} exceeds weight table n_max={seq.n_max}")
    x = abs(alpha) ** 2
    u = np.zeros(n_max + 1, dtype=complex)
    u[0] = 1.0
    for n in range(1, n_max + 1):
        r = seq.ratio(n)
        u[n] = u[n - 1] * alpha / math.sqrt(r) if r > 0 else 0.0
    head = np.abs(u) ** 2
    head_total = float(head.sum())
    if x == 0.0:
        return FieldVector(u)
    tail, terms = _series_tail(seq, x, n_max, float(head[-1]), head_total)
    if not tail < TAIL_TOLERANCE * (head_total + tail):
        suggestion = None
        if math.isfinite(tail) and seq.family is not Family.CUSTOM:
            suggestion = _suggest_n_max(list(head) + terms, head_total + tail)
        msg = f"coherent vector with |alpha|^2={x:g} not captured by n_max={n_max}"
        if suggestion is not None:
            msg += f"; try n_max >= {suggestion}"
        elif not math.isfinite(tail):
            msg += "; the normalization series diverges for this weight sequence"
        raise TruncationError(msg, suggestion)
    return FieldVector(u / math.sqrt(head_total))


class CoherentStyle(str, Enum):
    PAPER = "paper"
    IFS = "ifs"


@dataclass(frozen=True)
class CoherentSpec:
    """Initial coherent field.

    ``PAPER`` uses the boson Poisson amplitudes whatever the weights; ``IFS``
    uses the interacting-Fock-space coherent vector with alpha = sqrt(nbar) e^{i zeta}.
    """

    nbar: float
    zeta: float = 0.0
    style: CoherentStyle = CoherentStyle.PAPER

    def __post_init__(self):
        if not self.nbar >= 0:
            raise ConfigError(f"nbar must be >= 0, got {self.nbar}")
        object.__setattr__(self, "style", CoherentStyle(self.style))

    @property
    def alpha(self) -> complex:
        return math.sqrt(self.nbar) * cmath.exp(1j * self.zeta)


def _poisson_tail(nbar: float, n_max: int, p_last: float):
    terms = []
    p = p_last
    n = n_max
    while True:
        n += 1
        p = p * nbar / n
        terms.append(p)
        if n > nbar and p <= 1e-30:
            return sum(terms), terms


def initial_amplitudes(spec: CoherentSpec, seq: WeightSequence, n_max: int | None = None) -> np.ndarray:
    """Field amplitudes F_0 .. F_{n_max} at t = 0."""
    if n_max is None:
        n_max = seq.n_max
    if spec.style is CoherentStyle.IFS:
        return coherent_vector(seq, spec.alpha, n_max).coeffs.copy()

    nbar = spec.nbar
    n = np.arange(n_max + 1)
    if nbar == 0.0:
        mod = (n == 0).astype(float)
    else:
        logp = -nbar + n * math.log(nbar) - np.array([math.lgamma(k + 1) for k in n])
        mod = np.exp(0.5 * logp)
    F = mod * np.exp(1j * spec.zeta * n)
    if nbar > 0.0:
        probs = mod**2
        tail, terms = _poisson_tail(nbar, n_max, float(probs[-1]))
        if tail >= TAIL_TOLERANCE:
            suggestion = _suggest_n_max(list(probs) + terms, 1.0)
            raise TruncationError(
                f"Poisson tail mass {tail:.3g} beyond n_max={n_max} for nbar={nbar:g}; "
                f"try n_max >= {suggestion}",
                suggestion,
            )
    return F
