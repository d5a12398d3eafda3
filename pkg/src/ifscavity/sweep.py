"""Time-grid scans of the witnesses, figure presets and paper-vs-oracle reports."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import ConfigError, DomainError
from .evolution import STEPS_PER_UNIT, AmplitudeSet, ModelParams, Mode, default_steps, evolve, integrate_ode
from .ifs import DEFAULT_N_MAX, CoherentSpec, CoherentStyle, Family, WeightSequence, initial_amplitudes
from .witnesses import MomentSource, mandel_q, moments, squeezing_opt

WITNESSES = ("mandel", "squeezing")
MODES = ("paper", "oracle")

# Sum-start convention and grid reading, echoed into every manifest.
INDEX_CONVENTION = "ratio lambda_a/lambda_b contributes iff a >= 0, b >= 0 and lambda_b > 0"
GRID_NOTE = "figure range read as gt in [0, 50], 1001 points"


@dataclass(frozen=True)
class SweepConfig:
    family: Family = Family.FACTORIAL
    q: float | None = None
    lambda_file: str | None = None
    nbar: float = 0.5
    zeta: float = 0.0
    g: float = 1.0
    k: float = 0.0
    gt_min: float = 0.0
    gt_max: float = 50.0
    points: int = 1001
    witnesses: tuple[str, ...] = ("mandel",)
    modes: tuple[str, ...] = ("paper",)
    n_max: int = DEFAULT_N_MAX
    coherent: CoherentStyle = CoherentStyle.PAPER
    moments: MomentSource = MomentSource.PAPER
    independent_oracle: bool = False
    steps_per_unit: int = STEPS_PER_UNIT

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "coherent", CoherentStyle(self.coherent))
        object.__setattr__(self, "moments", MomentSource(self.moments))
        object.__setattr__(self, "witnesses", tuple(self.witnesses))
        object.__setattr__(self, "modes", tuple(self.modes))
        if fam is Family.CUSTOM and not self.lambda_file:
            raise ConfigError("custom weights need lambda_file")
        if fam in (Family.QBRACKET, Family.QBRACKET_FACTORIAL) and self.q is None:
            object.__setattr__(self, "q", 0.5)
        if self.points < 1:
            raise ConfigError(f"points must be >= 1, got {self.points}")
        if self.points == 1:
            if self.gt_max != self.gt_min:
                raise ConfigError("a 1-point sweep needs gt_min == gt_max")
        elif not self.gt_min < self.gt_max:
            raise ConfigError(f"need gt_min < gt_max, got {self.gt_min} >= {self.gt_max}")
        if self.gt_min < 0:
            raise ConfigError("gt_min must be >= 0")
        if not self.g > 0:
            raise ConfigError(f"g must be > 0, got {self.g}")
        if self.k < 0:
            raise ConfigError(f"k must be >= 0, got {self.k}")
        if not self.nbar >= 0:
            raise ConfigError(f"nbar must be >= 0, got {self.nbar}")
        if self.steps_per_unit < 1:
            raise ConfigError("steps_per_unit must be >= 1")
        for w in self.witnesses:
            if w not in WITNESSES:
                raise ConfigError(f"unknown witness {w!r}; choose from {WITNESSES}")
        for m in self.modes:
            if m not in MODES:
                raise ConfigError(f"unknown mode {m!r}; choose from {MODES}")
        if not self.witnesses or not self.modes:
            raise ConfigError("need at least one witness and one mode")

    def weights(self) -> WeightSequence:
        if self.family is Family.CUSTOM:
            return WeightSequence.from_file(self.lambda_file, self.n_max)
        return WeightSequence(self.family, self.n_max, q=self.q)

    def grid(self) -> np.ndarray:
        return np.linspace(self.gt_min, self.gt_max, self.points)

    def params(self, seq: WeightSequence | None = None) -> ModelParams:
        seq = seq or self.weights()
        F = initial_amplitudes(CoherentSpec(self.nbar, self.zeta, self.coherent), seq, self.n_max)
        return ModelParams.resonant(seq, F, g=self.g, k=self.k)

    def paper_mode(self) -> Mode:
        return Mode.PAPER_LOSSY if self.k > 0 else Mode.PAPER_CLOSED_FORM

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("family", "coherent", "moments"):
            d[key] = d[key].value
        d["witnesses"] = list(self.witnesses)
        d["modes"] = list(self.modes)
        return d


@dataclass(frozen=True)
class WitnessSample:
    gt: float
    Q: float | None
    S_opt: float
    n_mean: float
    block_norm: float
    mode: str


@dataclass
class WitnessSeries:
    config: SweepConfig
    witness: str
    mode: str
    rows: list[WitnessSample] = field(default_factory=list)

    @property
    def gt(self) -> np.ndarray:
        return np.array([r.gt for r in self.rows])

    def values(self) -> list[float | None]:
        if self.witness == "mandel":
            return [r.Q for r in self.rows]
        return [r.S_opt for r in self.rows]

    def summary(self) -> dict:
        defined = [(v, r.gt) for v, r in zip(self.values(), self.rows) if v is not None]
        if not defined:
            return {"min": None, "argmin_gt": None, "fraction_below_zero": None}
        vmin, at = min(defined, key=lambda p: p[0])
        below = sum(1 for v, _ in defined if v < 0)
        return {"min": vmin, "argmin_gt": at, "fraction_below_zero": below / len(defined)}


def _annotate(err: DomainError, gt: float) -> DomainError:
    new = type(err)(f"{err} (at gt={gt:g})")
    new.__cause__ = err
    if hasattr(err, "suggested_n_max"):
        new.suggested_n_max = err.suggested_n_max
    return new


def _sample(amps: AmplitudeSet, seq, gt: float, mode: str, source) -> WitnessSample:
    m = moments(amps, seq, source)
    return WitnessSample(
        gt=float(gt),
        Q=mandel_q(m),
        S_opt=squeezing_opt(m),
        n_mean=m.m1,
        block_norm=amps.total_norm(),
        mode=mode,
    )


def _amplitude_path(config: SweepConfig, params: ModelParams, mode: str):
    """Yield (gt, AmplitudeSet) along the grid for one evaluation mode."""
    g = config.g
    grid = config.grid()
    if mode == "paper":
        pm = config.paper_mode()
        for gt in grid:
            try:
                yield gt, evolve(pm, params, gt / g)
            except DomainError as e:
                raise _annotate(e, gt) from e
        return

    state = None
    for gt in grid:
        t = gt / g
        try:
            if config.independent_oracle or state is None:
                steps = default_steps(params, t, config.steps_per_unit)
                state = integrate_ode(params, t, steps=steps)
            else:
                steps = default_steps(params, t - state.t, config.steps_per_unit)
                state = integrate_ode(params, t, steps=steps, initial=state)
        except DomainError as e:
            raise _annotate(e, gt) from e
        yield gt, state


def run_sweep(config: SweepConfig) -> list[WitnessSeries]:
    """One WitnessSeries per (mode, witness), in config order."""
    seq = config.weights()
    params = config.params(seq)
    out = []
    for mode in config.modes:
        samples = [_sample(a, seq, gt, mode, config.moments) for gt, a in _amplitude_path(config, params, mode)]
        for w in config.witnesses:
            out.append(WitnessSeries(config, w, mode, list(samples)))
    return out


@dataclass
class ModeComparison:
    gt: np.ndarray
    dq: list[float | None]
    ds: np.ndarray
    paper_norm_drift: np.ndarray
    oracle_norm_drift: np.ndarray

    def _arg(self, vals):
        pairs = [(v, g) for v, g in zip(vals, self.gt) if v is not None]
        if not pairs:
            return None, None
        v, g = max(pairs, key=lambda p: p[0])
        return float(v), float(g)

    def summary(self) -> dict:
        max_dq, at_q = self._arg(self.dq)
        max_ds, at_s = self._arg(list(self.ds))
        return {
            "max_dq": max_dq,
            "argmax_dq_gt": at_q,
            "max_ds": max_ds,
            "argmax_ds_gt": at_s,
            "max_abs_paper_norm_drift": float(np.max(np.abs(self.paper_norm_drift))),
            "max_abs_oracle_norm_drift": float(np.max(np.abs(self.oracle_norm_drift))),
        }


def compare_modes(config: SweepConfig) -> ModeComparison:
    """Pointwise |paper - oracle| for Q and S_opt, plus relative norm drift of each mode."""
    cfg = replace(config, modes=MODES, witnesses=WITNESSES)
    series = {(s.mode, s.witness): s for s in run_sweep(cfg)}
    paper = series["paper", "mandel"].rows
    oracle = series["oracle", "mandel"].rows
    dq = [None if p.Q is None or o.Q is None else abs(p.Q - o.Q) for p, o in zip(paper, oracle)]
    ds = np.array([abs(p.S_opt - o.S_opt) for p, o in zip(paper, oracle)])

    params = cfg.params()
    norm0 = float(np.sum(np.abs(params.F[1:]) ** 2))  # shared t = 0 block norm
    if norm0 == 0.0:
        raise ConfigError("initial field has no weight in blocks n >= 1")
    pd = np.array([p.block_norm / norm0 - 1 for p in paper])
    od = np.array([o.block_norm / norm0 - 1 for o in oracle])
    return ModeComparison(np.array([p.gt for p in paper]), dq, ds, pd, od)


_PANEL_FAMILY = {"a": Family.FACTORIAL, "b": Family.FACTORIAL_SQUARED, "c": Family.QBRACKET}
_FIGURE_SETTINGS = {
    # figure: (witness, nbar, k)
    "fig2": ("mandel", 0.5, 0.0),
    "fig3": ("mandel", 0.5, 0.1),
    "fig4": ("squeezing", 0.3, 0.0),
    "fig5": ("squeezing", 0.3, 0.5),
}
FIGURES = tuple(f"{fig}{panel}" for fig in _FIGURE_SETTINGS for panel in "abc")


def figure_preset(name: str, **overrides) -> SweepConfig:
    if name not in FIGURES:
        raise ConfigError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}")
    witness, nbar, k = _FIGURE_SETTINGS[name[:4]]
    family = _PANEL_FAMILY[name[4]]
    cfg = SweepConfig(
        family=family,
        q=0.5 if family is Family.QBRACKET else None,
        nbar=nbar,
        k=k,
        witnesses=(witness,),
        modes=("paper",),
    )
    return replace(cfg, **overrides) if overrides else cfg

