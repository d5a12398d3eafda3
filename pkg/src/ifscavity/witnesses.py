"""Mandel Q and optimal quadrature squeezing of the cavity field.

Two moment engines:

``moments_paper``
    the diagonal |C|^2-weighted ratio sums used for the published curves;
``moments_exact``
    expectations in the reduced field state obtained by tracing the atom out
    of |psi><psi|, built from ladder-operator applications.

Both agree on <A^dag A> and <A^dag^2 A^2> (diagonal operators).  They differ
on <A^dag> and <A^dag^2>: the paper sums are real and diagonal, the exact
ones are coherence sums.

A ratio lambda_a/lambda_b contributes only when a, b >= 0 and lambda_b > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import TruncationError
from .evolution import AmplitudeSet
from .ifs import TAIL_TOLERANCE, FieldVector, WeightSequence, apply_annihilate, apply_create, apply_number

MIN_MEAN = 1e-14


class MomentSource(str, Enum):
    PAPER = "paper"
    EXACT = "exact"


@dataclass(frozen=True)
class MomentSet:
    m1: float  # <A^dag A>
    m2: float  # <A^dag A^dag A A>
    a1: complex  # <A^dag>
    a2: complex  # <A^dag^2>
    source: MomentSource


@lru_cache(maxsize=64)
def _paper_coefficients(seq: WeightSequence, n_max: int):
    wr = seq.weight_ratio
    n = range(1, n_max + 1)
    arr = lambda f: np.array([f(k) for k in n], dtype=float)  # noqa: E731
    out = {
        # atomic blocks (field level n-1) and the c block (level n)
        "m1_ab": arr(lambda k: wr(k - 1, k - 2)),
        "m1_c": arr(lambda k: wr(k, k - 1)),
        "m2_ab": arr(lambda k: wr(k - 1, k - 3)),
        "m2_c": arr(lambda k: wr(k, k - 2)),
        "a1_ab": np.sqrt(arr(lambda k: wr(k, k - 1))),
        "a1_c": np.sqrt(arr(lambda k: wr(k + 1, k))),
        "a2_ab": np.sqrt(arr(lambda k: wr(k + 1, k - 1))),
        "a2_c": np.sqrt(arr(lambda k: wr(k + 2, k))),
    }
    for v in out.values():
        v.setflags(write=False)
    return out


def moments_paper(amps: AmplitudeSet, seq: WeightSequence) -> MomentSet:
    """Diagonal moment sums as printed; |Ca|^2 + |Cb|^2 stands in for 2|Ca|^2."""
    co = _paper_coefficients(seq, len(amps.cc))
    pab = np.abs(amps.ca) ** 2 + np.abs(amps.cb) ** 2
    pc = np.abs(amps.cc) ** 2
    return MomentSet(
        m1=float(pab @ co["m1_ab"] + pc @ co["m1_c"]),
        m2=float(pab @ co["m2_ab"] + pc @ co["m2_c"]),
        a1=complex(pab @ co["a1_ab"] + pc @ co["a1_c"]),
        a2=complex(pab @ co["a2_ab"] + pc @ co["a2_c"]),
        source=MomentSource.PAPER,
    )


def field_components(amps: AmplitudeSet) -> tuple[FieldVector, FieldVector, FieldVector]:
    """Field vectors conditioned on the atom being in |a>, |b>, |c> (levels 0..n_max)."""
    n_max = len(amps.cc)
    pa = np.zeros(n_max + 1, dtype=complex)
    pb = np.zeros(n_max + 1, dtype=complex)
    pc = np.zeros(n_max + 1, dtype=complex)
    pa[:-1] = amps.ca
    pb[:-1] = amps.cb
    pc[1:] = amps.cc
    return FieldVector(pa), FieldVector(pb), FieldVector(pc)


def field_moments(f: FieldVector, seq: WeightSequence) -> MomentSet:
    """Unnormalized expectations <f|O|f> for a single field vector."""
    af = apply_annihilate(seq, f)
    aaf = apply_annihilate(seq, af)
    cf = apply_create(seq, f)
    ccf = apply_create(seq, cf)
    return MomentSet(
        m1=f.inner(apply_number(seq, f)).real,
        m2=aaf.norm_sq(),
        a1=f.inner(cf),
        a2=f.inner(ccf),
        source=MomentSource.EXACT,
    )


def moments_exact(amps: AmplitudeSet, seq: WeightSequence) -> MomentSet:
    parts = [field_moments(f, seq) for f in field_components(amps)]
    return MomentSet(
        m1=sum(p.m1 for p in parts),
        m2=sum(p.m2 for p in parts),
        a1=sum(p.a1 for p in parts),
        a2=sum(p.a2 for p in parts),
        source=MomentSource.EXACT,
    )


def moments(amps: AmplitudeSet, seq: WeightSequence, source=MomentSource.PAPER) -> MomentSet:
    if MomentSource(source) is MomentSource.EXACT:
        return moments_exact(amps, seq)
    return moments_paper(amps, seq)


def mandel_q(m: MomentSet) -> float | None:
    """Q = <n(2)>/<n> - <n>; None when the mean photon number vanishes."""
    if not m.m1 > MIN_MEAN:
        return None
    return m.m2 / m.m1 - m.m1


def mandel_q_closed(seq: WeightSequence, nbar: float, gt: float, n_max: int | None = None) -> float | None:
    """Mandel Q for the resonant closed form with a Poisson field, summed directly.

    Per-block angle theta_n = sqrt(2 ratio(n)) gt.
    """
    if n_max is None:
        n_max = seq.n_max
    wr = seq.weight_ratio
    # Poisson weights e^{-nbar} nbar^n / n!, by recursion
    p = np.empty(n_max + 1)
    p[0] = math.exp(-nbar)
    for n in range(1, n_max + 1):
        p[n] = p[n - 1] * nbar / n
    tail = 1.0 - math.fsum(p)
    if nbar > 0 and tail >= TAIL_TOLERANCE:
        raise TruncationError(f"Poisson tail {tail:.3g} beyond n_max={n_max} for nbar={nbar:g}")

    A = B = C = D = 0.0
    for n in range(1, n_max + 1):
        theta = math.sqrt(2 * wr(n, n - 1)) * gt
        cos2 = (math.cos(theta) - 2) ** 2
        sin2 = math.sin(theta) ** 2
        A += wr(n - 1, n - 3) * p[n] * cos2
        B += wr(n, n - 2) * p[n] * sin2
        C += wr(n - 1, n - 2) * p[n] * cos2
        D += wr(n, n - 1) * p[n] * sin2
    if C + D < MIN_MEAN:
        return None
    return (A + B) / (C + D) - (C + D)


def squeezing_opt(m: MomentSet) -> float:
    """Normally ordered quadrature variance minimized over the quadrature angle."""
    zeta = m.a2 - m.a1**2
    return -2 * abs(zeta) + 2 * m.m1 - 2 * abs(m.a1) ** 2


def deformed_uncertainty_floor(seq: WeightSequence, n: int) -> float:
    return seq.commutator_diag(n)
