"""Domain types for resource-state generator (RSG) architectures.

An RSG architecture pairs a photon source with a generation scheme.  A
scheme is an ordered list of multiplexing stages, each defined by its
success probability, the number of copies of the previous stage's state
consumed per attempt, the auxiliary photons burned on fusion boosting,
and the number of photons detected.  Everything here is declarative;
the arithmetic lives in :mod:`rsgcost.bounds` and the simulators.

All types are immutable and safe to share between workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

__all__ = [
    "ConfigError",
    "SourceSpec",
    "StageSpec",
    "SchemeSpec",
    "LossBudget",
    "RsgTarget",
    "builtin_scheme",
    "builtin_source",
    "calibrate_unit_cost",
    "scheme_to_config",
    "schemes_to_config",
    "parse_config",
    "fusion_success",
    "GHZ4_AVG_COST",
    "HYBRID_TARGET_NAVG",
    "D_SPATIAL",
    "D_SPATIOTEMPORAL",
    "D_GMZI",
    "D_COUPLING",
    "D_FINAL_MUX",
]

# Optical-depth building blocks of the multiplexing networks: a GMZI
# contributes one lossy phase shifter, every chip boundary one coupling,
# a spatial MUX stage is 2 GMZI + 4 couplings, the spatio-temporal stage
# adds one more GMZI + 2 couplings, and the final 1xN selector is depth 3.
D_GMZI = 1
D_COUPLING = 1
D_SPATIAL = 6
D_SPATIOTEMPORAL = 9
D_FINAL_MUX = 3

# Exact stage probabilities of the linear-optical intermediate states.
P_PRIMATE = 20.0 * math.sqrt(2.0) - 28.0
P_GHZ4 = (3.0 + 2.0 * math.sqrt(2.0)) / 64.0

# Average photons consumed to make one 4-GHZ from single photons with
# once-boosted fusions; equals 128*(1+sqrt(2)).  Used as the auxiliary
# price of a GHZ ancilla when fusions are boosted twice.
GHZ4_AVG_COST = (8.0 / P_PRIMATE) / P_GHZ4

# The 4-GHZ-source scheme's photon cost is not derivable from the stage
# table alone; its initial unit cost is calibrated so that the total
# average photon count lands on this value (see calibrate_unit_cost).
HYBRID_TARGET_NAVG = 3100.0

_SOURCE_KINDS = ("heralded", "deterministic-single", "ghz4", "caterpillar", "rus-module")


class ConfigError(ValueError):
    """Raised for malformed scheme config text; carries a line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def fusion_success(boost_level: int, gates: int) -> float:
    """Success probability of a stage applying `gates` boosted fusions."""
    if boost_level not in (1, 2, 3):
        raise ValueError(f"unsupported boost level {boost_level}")
    return (1.0 - 2.0 ** (-boost_level)) ** gates


@dataclass(frozen=True)
class SourceSpec:
    """Photon-source parameters.

    `p_s` is the per-trigger success probability, `beta` the collection
    efficiency into the first waveguide/fiber, and `r0` the internal
    clock rate in Hz.  For heralded pair sources the optional fields
    record the decomposition p_s = eta_h * eta_det * p_pair.
    """

    kind: str
    p_s: float = 1.0
    beta: float = 1.0
    r0: float = 1.0e9
    label: str = ""
    p_pair: float | None = None
    eta_det: float | None = None
    eta_h: float | None = None

    def __post_init__(self):
        if self.kind not in _SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}")
        if not 0.0 < self.p_s <= 1.0:
            raise ValueError(f"p_s must be in (0, 1], got {self.p_s}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if self.r0 <= 0.0:
            raise ValueError("r0 must be positive")
        if self.kind != "heralded" and self.p_s != 1.0:
            raise ValueError(f"{self.kind} sources are deterministic; p_s must be 1")
        if all(v is not None for v in (self.p_pair, self.eta_det, self.eta_h)):
            derived = self.eta_h * self.eta_det * self.p_pair
            if abs(derived - self.p_s) > 1e-12:
                raise ValueError("p_s inconsistent with eta_h * eta_det * p_pair")

    @property
    def deterministic(self) -> bool:
        return self.p_s == 1.0


@dataclass(frozen=True)
class StageSpec:
    """One multiplexing stage of a generation scheme.

    `copies` of the previous stage's state (plus `aux_photons` auxiliary
    photons) are consumed per attempt, which succeeds with probability
    `success_prob`; `detected` photons are measured by the stage and are
    the ones exposed to routing loss.
    """

    index: int
    success_prob: float
    copies: int
    aux_photons: float
    detected: int = 0
    gates: int = 0

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("stage index must be >= 1")
        if not 0.0 < self.success_prob <= 1.0:
            raise ValueError(f"stage {self.index}: success_prob out of (0, 1]")
        if self.copies < 1:
            raise ValueError(f"stage {self.index}: copies must be >= 1")
        if self.aux_photons < 0.0:
            raise ValueError(f"stage {self.index}: aux_photons must be >= 0")
        if self.detected < 0:
            raise ValueError(f"stage {self.index}: detected must be >= 0")
        if self.gates < 0:
            raise ValueError(f"stage {self.index}: gates must be >= 0")


@dataclass(frozen=True)
class SchemeSpec:
    """Ordered multiplexing stages defining how a resource state is built."""

    name: str
    stages: tuple[StageSpec, ...]
    unit_cost: float = 1.0
    output_photons: int = 24
    n_mux: int = 0
    boost_level: int = 2
    calibrated: bool = False

    def __post_init__(self):
        if not self.stages:
            raise ValueError("scheme needs at least one stage")
        object.__setattr__(self, "stages", tuple(self.stages))
        for pos, stage in enumerate(self.stages, start=1):
            if stage.index != pos:
                raise ValueError("stage indices must be consecutive from 1")
        if self.unit_cost <= 0.0:
            raise ValueError("unit_cost must be positive")
        if self.output_photons < 1:
            raise ValueError("output_photons must be >= 1")
        if self.n_mux < 0:
            raise ValueError("n_mux must be >= 0")
        if self.boost_level not in (1, 2, 3):
            raise ValueError(f"unsupported boost level {self.boost_level}")

    @property
    def is_rus(self) -> bool:
        return self.name == "rus"


@dataclass(frozen=True)
class LossBudget:
    """Per-component loss model of the routing network."""

    per_component_loss: float
    depth: int
    threshold: float = 0.925
    beta: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.per_component_loss < 1.0:
            raise ValueError("per-component loss must be in [0, 1)")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must be in (0, 1]")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")

    @property
    def eta_x(self) -> float:
        """Network transmission (1 - x)^D."""
        return (1.0 - self.per_component_loss) ** self.depth

    @property
    def eta_t(self) -> float:
        """Total transmission including source collection."""
        return self.beta * self.eta_x


@dataclass(frozen=True)
class RsgTarget:
    """RSG clocking target: success probability per period and period length."""

    p_rsg_target: float = 0.999
    rsg_rate: float = 1.0e8
    r0: float = 1.0e9

    def __post_init__(self):
        if not 0.0 < self.p_rsg_target < 1.0:
            raise ValueError("p_rsg_target must be in (0, 1)")
        if self.rsg_rate <= 0.0 or self.r0 <= 0.0:
            raise ValueError("rates must be positive")
        if self.rsg_rate > self.r0:
            raise ValueError("rsg_rate cannot exceed the internal clock r0")

    @property
    def tau(self) -> float:
        """Internal clock cycles per RSG period (r0 / r)."""
        return self.r0 / self.rsg_rate


def _boosted_stage(index: int, gates: int, copies: int, base_detected: int,
                   boost_level: int, aux_cost_per_gate: dict[int, float],
                   aux_detected_per_gate: dict[int, int]) -> StageSpec:
    # aux_cost is what the photon-consumption recursion charges (average
    # photons burned to supply the ancillae); aux_detected is how many
    # ancilla photons actually hit a detector and therefore see loss.
    return StageSpec(
        index=index,
        success_prob=fusion_success(boost_level, gates),
        copies=copies,
        aux_photons=aux_cost_per_gate[boost_level] * gates,
        detected=base_detected + aux_detected_per_gate[boost_level] * gates,
        gates=gates,
    )


def _all_photonic_stages(boost_level: int) -> tuple[StageSpec, ...]:
    # Fusion stages use 4 ancilla singles per gate at boost 2 and add a
    # 4-GHZ (priced at its average single-photon cost) at boost 3.
    aux_cost = {1: 0.0, 2: 4.0, 3: 4.0 + GHZ4_AVG_COST}
    aux_det = {1: 0, 2: 4, 3: 8}
    return (
        StageSpec(1, 1.0, 4, 0.0, detected=1),
        StageSpec(2, P_PRIMATE, 2, 0.0, detected=1),
        StageSpec(3, P_GHZ4, 2, 0.0, detected=2),
        _boosted_stage(4, 2, 3, 2, boost_level, aux_cost, aux_det),
        _boosted_stage(5, 2, 2, 4, boost_level, aux_cost, aux_det),
        _boosted_stage(6, 2, 1, 4, boost_level, aux_cost, aux_det),
    )


def _caterpillar_stages(boost_level: int) -> tuple[StageSpec, ...]:
    # Bell-pair boosting at level 2; a source-produced Bell pair plus
    # 4-GHZ (six photons total) per gate at level 3.
    aux_cost = {1: 0.0, 2: 2.0, 3: 6.0}
    aux_det = {1: 0, 2: 2, 3: 6}
    return (
        StageSpec(1, 1.0, 1, 0.0, detected=0),
        _boosted_stage(2, 2, 3, 7, boost_level, aux_cost, aux_det),
        _boosted_stage(3, 3, 1, 6, boost_level, aux_cost, aux_det),
    )


def _hybrid_stages(boost_level: int, unit_cost: float) -> tuple[StageSpec, ...]:
    # Same fusion stages as the single-photon scheme minus the first
    # three stages; a boost-3 GHZ ancilla is priced at the source's own
    # unit cost since the 4-GHZ source can emit it directly.
    aux_cost = {1: 0.0, 2: 4.0, 3: 4.0 + unit_cost}
    aux_det = {1: 0, 2: 4, 3: 8}
    return (
        _boosted_stage(1, 2, 3, 2, boost_level, aux_cost, aux_det),
        _boosted_stage(2, 2, 2, 4, boost_level, aux_cost, aux_det),
        _boosted_stage(3, 2, 1, 4, boost_level, aux_cost, aux_det),
    )


def calibrate_unit_cost(stages: tuple[StageSpec, ...], target_navg: float) -> float:
    """Initial unit cost making the photon-consumption recursion hit a target.

    Runs N_i = c_i (N_{i-1} + a_i) / p_i backwards from the stated total.
    """
    value = float(target_navg)
    for stage in reversed(stages):
        value = value * stage.success_prob / stage.copies - stage.aux_photons
    if value <= 0.0:
        raise ValueError("target total is too small for the stage table")
    return value


def builtin_scheme(name: str, boost_level: int = 2) -> SchemeSpec:
    """Return one of the built-in generation schemes at a given boost level.

    Names: `all-photonic` (six stages from single photons), `hybrid`
    (the last three stages fed by a 4-GHZ source; unit cost calibrated,
    not derived), `caterpillar` (17-photon seed states plus fusions) and
    `rus` (a bookkeeping placeholder; its cost model is time-based).
    """
    if boost_level not in (1, 2, 3):
        raise ValueError(f"unsupported boost level {boost_level}")
    if name == "all-photonic":
        return SchemeSpec(name, _all_photonic_stages(boost_level),
                          unit_cost=1.0, n_mux=6, boost_level=boost_level)
    if name == "hybrid":
        unit = calibrate_unit_cost(_hybrid_stages(2, 1.0), HYBRID_TARGET_NAVG)
        return SchemeSpec(name, _hybrid_stages(boost_level, unit), unit_cost=unit,
                          n_mux=3, boost_level=boost_level, calibrated=True)
    if name == "caterpillar":
        return SchemeSpec(name, _caterpillar_stages(boost_level),
                          unit_cost=17.0, n_mux=2, boost_level=boost_level)
    if name == "rus":
        stage = StageSpec(1, 1.0, 1, 0.0, detected=0)
        return SchemeSpec(name, (stage,), unit_cost=1.0, n_mux=0,
                          boost_level=boost_level)
    raise ValueError(f"unknown scheme {name!r}")


def builtin_source(kind: str, p_s: float = 1.0, beta: float = 1.0,
                   r0: float = 1.0e9, label: str = "") -> SourceSpec:
    """Convenience constructor with a readable default label."""
    if not label:
        label = kind if kind != "heralded" else f"heralded p_s={p_s:g}"
    return SourceSpec(kind=kind, p_s=p_s, beta=beta, r0=r0, label=label)


# --- scheme config format ------------------------------------------------
#
# One section per scheme:
#
#   [caterpillar]
#   unit_cost = 17.0
#   output_photons = 24
#   n_mux = 2
#   boost_level = 2
#   1 1.0 1 0.0 0 0
#   2 0.5625 3 4.0 11 2
#   3 0.421875 1 6.0 12 3
#
# Stage rows carry "i p c a d gates".  Parsing is strict: unknown keys
# and malformed rows are errors.

_SCALAR_KEYS = {
    "unit_cost": float,
    "output_photons": int,
    "n_mux": int,
    "boost_level": int,
    "calibrated": lambda s: s.lower() == "true",
}


def scheme_to_config(scheme: SchemeSpec) -> str:
    """Serialize one scheme to the sectioned plain-text config format."""
    lines = [f"[{scheme.name}]"]
    lines.append(f"unit_cost = {scheme.unit_cost!r}")
    lines.append(f"output_photons = {scheme.output_photons}")
    lines.append(f"n_mux = {scheme.n_mux}")
    lines.append(f"boost_level = {scheme.boost_level}")
    if scheme.calibrated:
        lines.append("calibrated = true")
    for s in scheme.stages:
        lines.append(f"{s.index} {s.success_prob!r} {s.copies} "
                     f"{s.aux_photons!r} {s.detected} {s.gates}")
    return "\n".join(lines) + "\n"


def schemes_to_config(schemes: list[SchemeSpec]) -> str:
    return "\n".join(scheme_to_config(s) for s in schemes)


def parse_config(text: str) -> dict[str, SchemeSpec]:
    """Parse the sectioned config format back into schemes.

    Raises ConfigError (with a line number) on unknown keys, malformed
    stage rows, or sections that fail validation.
    """
    schemes: dict[str, SchemeSpec] = {}
    name: str | None = None
    scalars: dict = {}
    stages: list[StageSpec] = []

    def finish(line_no: int):
        nonlocal name, scalars, stages
        if name is None:
            return
        try:
            schemes[name] = SchemeSpec(name=name, stages=tuple(stages), **scalars)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid scheme [{name}]: {exc}", line_no) from exc
        name, scalars, stages = None, {}, []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            finish(line_no)
            name = line[1:-1].strip()
            if not name:
                raise ConfigError("empty section name", line_no)
            continue
        if name is None:
            raise ConfigError("content before any [scheme] section", line_no)
        if "=" in line:
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in _SCALAR_KEYS:
                raise ConfigError(f"unknown key {key!r}", line_no)
            try:
                scalars[key] = _SCALAR_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {value!r}", line_no) from exc
            continue
        tokens = line.split()
        if len(tokens) != 6:
            raise ConfigError("stage rows need 6 fields: i p c a d gates", line_no)
        try:
            stage = StageSpec(index=int(tokens[0]), success_prob=float(tokens[1]),
                              copies=int(tokens[2]), aux_photons=float(tokens[3]),
                              detected=int(tokens[4]), gates=int(tokens[5]))
        except ValueError as exc:
            raise ConfigError(f"bad stage row: {exc}", line_no) from exc
        stages.append(stage)
    finish(len(text.splitlines()))
    return schemes


def with_n_mux(scheme: SchemeSpec, n_mux: int) -> SchemeSpec:
    """Copy of a scheme with a different multiplexing-stage count."""
    return replace(scheme, n_mux=n_mux)
