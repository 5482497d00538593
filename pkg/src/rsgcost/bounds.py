"""Closed-form resource accounting for RSG architectures.

Photon-consumption recursion, resource-efficiency upper bounds, optical
depth of the multiplexing network, and the per-component loss each
architecture can tolerate while keeping the total transmission above
the fault-tolerance threshold.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .model import (
    D_FINAL_MUX,
    D_SPATIAL,
    D_SPATIOTEMPORAL,
    SchemeSpec,
    SourceSpec,
    builtin_scheme,
    builtin_source,
    with_n_mux,
)

__all__ = [
    "CostBreakdown",
    "TableRow",
    "n_avg",
    "eta_r_max",
    "eta_r_max_rus",
    "optical_depth",
    "max_loss_per_component",
    "n_sources_for_rate",
    "mux_efficiency",
    "table_one",
    "table_rows_to_csv",
    "breakdown_to_json",
]

# Guard against float ceilings landing one above an exact integer ratio.
_CEIL_EPS = 1e-9


@dataclass(frozen=True)
class CostBreakdown:
    """Cumulative photon cost and routing depth of a scheme."""

    cumulative_navg: tuple[float, ...]
    total_navg: float
    eta_r_max: float
    cumulative_depth: tuple[int, ...]

    def __post_init__(self):
        for a, b in zip(self.cumulative_navg, self.cumulative_navg[1:]):
            if b < a - 1e-9:
                raise ValueError("cumulative photon cost must be nondecreasing")
        if self.eta_r_max > 1.0 + 1e-12:
            raise ValueError("eta_r_max cannot exceed 1")


def _stage_depths(scheme: SchemeSpec) -> list[int]:
    """Per-stage routing depth: the first multiplexed stage uses the
    spatio-temporal network, middle ones a spatial network, and the last
    the constant-depth output selector.  Unmultiplexed leading stages
    (deterministic emission) contribute nothing."""
    n_stages = len(scheme.stages)
    if scheme.n_mux == 0:
        return [0] * n_stages
    if scheme.n_mux == 1:
        raise ValueError("a single multiplexing stage has no defined depth split")
    if scheme.n_mux > n_stages:
        raise ValueError("n_mux cannot exceed the stage count")
    depths = [0] * (n_stages - scheme.n_mux)
    depths += [D_SPATIOTEMPORAL]
    depths += [D_SPATIAL] * (scheme.n_mux - 2)
    depths += [D_FINAL_MUX]
    return depths


def n_avg(scheme: SchemeSpec) -> CostBreakdown:
    """Average photons consumed per resource state, stage by stage.

    Applies N_i = c_i (N_{i-1} + a_i) / p_i with N_0 the scheme's unit
    cost, keeping unrounded intermediates throughout.
    """
    cumulative = []
    value = scheme.unit_cost
    for stage in scheme.stages:
        value = stage.copies * (value + stage.aux_photons) / stage.success_prob
        cumulative.append(value)
    eta = min(1.0, scheme.output_photons / value)
    return CostBreakdown(
        cumulative_navg=tuple(cumulative),
        total_navg=value,
        eta_r_max=eta,
        cumulative_depth=tuple(_cumsum(_stage_depths(scheme))),
    )


def _cumsum(values: list[int]) -> list[int]:
    total, out = 0, []
    for v in values:
        total += v
        out.append(total)
    return out


def eta_r_max(scheme: SchemeSpec, source: SourceSpec) -> float:
    """Upper bound on resource efficiency: p_s * N / N_avg.

    Valid for photon-consumption schemes only; the RUS module idles
    between gate rounds, so its bound is time-based (eta_r_max_rus).
    """
    if scheme.is_rus:
        raise ValueError("RUS schemes are time-bounded; use eta_r_max_rus")
    total = n_avg(scheme).total_navg
    return source.p_s * scheme.output_photons / total


def eta_r_max_rus(n_sources: int, tau_avg: float, n_photons: int = 24) -> float:
    """Upper bound for source groups that idle: N / (N_0 * tau_avg)."""
    if n_sources < 1:
        raise ValueError("need at least one source")
    if tau_avg < 1.0:
        raise ValueError("tau_avg is in internal cycles and cannot be < 1")
    return n_photons / (n_sources * tau_avg)


def optical_depth(n_mux: int) -> int:
    """Lower-bound optical depth of a scheme with n_mux multiplexing stages.

    One spatio-temporal stage, spatial stages in the middle, and a
    constant-depth final selector.  n_mux = 0 is the direct-emission
    case (a single routing switch); n_mux = 1 is undefined.
    """
    if n_mux == 0:
        return 1
    if n_mux == 1:
        raise ValueError("depth is undefined for a single multiplexing stage")
    return D_SPATIOTEMPORAL + (n_mux - 2) * D_SPATIAL + D_FINAL_MUX


def max_loss_per_component(depth: int, threshold: float = 0.925) -> float:
    """Largest per-component loss keeping (1-x)^D above the threshold."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    return 1.0 - threshold ** (1.0 / depth)


def n_sources_for_rate(eta_r_max: float, n_photons: int, r: float, r0: float) -> int:
    """Sources needed to emit n_photons per period at rate r: ceil(N r / (eta r0))."""
    if eta_r_max <= 0.0:
        raise ValueError("eta_r_max must be positive")
    if r > r0:
        raise ValueError("RSG rate cannot exceed the internal clock")
    value = n_photons * r / (eta_r_max * r0)
    return math.ceil(value - _CEIL_EPS * max(1.0, abs(value)))


def mux_efficiency(n_avg: float, n_sources: int, tau: float) -> float:
    """Photon-utilization efficiency of a multiplexing network.

    N_avg / (N_0 tau); a value above 1 means the configuration cannot
    supply enough photons and is reported clamped to 1.
    """
    if n_sources * tau <= 0.0:
        raise ValueError("n_sources * tau must be positive")
    return min(1.0, n_avg / (n_sources * tau))


@dataclass(frozen=True)
class TableRow:
    """One architecture row of the performance-bound table."""

    source: str
    scheme: str
    n_mux: int
    depth: int
    eta_r_max: float
    n_sources: int
    max_loss: float
    navg: float
    basis: str = "derived"


def _photonic_row(source: SourceSpec, scheme: SchemeSpec, r: float, r0: float,
                  threshold: float) -> TableRow:
    breakdown = n_avg(scheme)
    eta = source.p_s * scheme.output_photons / breakdown.total_navg
    depth = optical_depth(scheme.n_mux)
    # Source registers are sized against whole photons, so the photon
    # cost is rounded to an integer before deriving the source count.
    eta_rounded = source.p_s * scheme.output_photons / round(breakdown.total_navg)
    n0 = n_sources_for_rate(eta_rounded, scheme.output_photons, r, r0)
    return TableRow(
        source=source.label or source.kind,
        scheme=scheme.name,
        n_mux=scheme.n_mux,
        depth=depth,
        eta_r_max=eta,
        n_sources=n0,
        max_loss=max_loss_per_component(depth, threshold),
        navg=breakdown.total_navg,
        basis="calibrated" if scheme.calibrated else "derived",
    )


def table_one(r: float = 1.0e8, r0: float = 1.0e9, threshold: float = 0.925,
              boost_level: int = 2, rus_tau_avg: float = 10.0,
              rus_sources: int = 12) -> list[TableRow]:
    """Performance bounds for the seven benchmark architectures.

    Heralded sources at three success probabilities and a deterministic
    source feeding the all-photonic scheme, a 4-GHZ source feeding the
    hybrid scheme, a caterpillar source, and the 12-source RUS module.
    """
    rows: list[TableRow] = []
    allphot = builtin_scheme("all-photonic", boost_level)
    for p_s in (0.005, 0.05, 0.25):
        src = builtin_source("heralded", p_s=p_s, r0=r0, label=f"HSPS p_s={p_s:g}")
        rows.append(_photonic_row(src, allphot, r, r0, threshold))
    dsps = builtin_source("deterministic-single", r0=r0, label="DSPS")
    rows.append(_photonic_row(dsps, with_n_mux(allphot, 5), r, r0, threshold))
    ghz = builtin_source("ghz4", r0=r0, label="4-GHZ source")
    rows.append(_photonic_row(ghz, builtin_scheme("hybrid", boost_level), r, r0, threshold))
    cat = builtin_source("caterpillar", r0=r0, label="Caterpillar source")
    rows.append(_photonic_row(cat, builtin_scheme("caterpillar", boost_level), r, r0, threshold))

    eta_rus = eta_r_max_rus(rus_sources, rus_tau_avg, 24)
    rows.append(TableRow(
        source="RUS module", scheme="rus", n_mux=0, depth=1,
        eta_r_max=eta_rus,
        n_sources=n_sources_for_rate(eta_rus, 24, r, r0),
        max_loss=max_loss_per_component(1, threshold),
        navg=float("nan"),
        basis="derived",
    ))
    return rows


def table_rows_to_csv(rows: list[TableRow]) -> str:
    """Full-precision CSV, one row per architecture."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["source", "scheme", "n_mux", "optical_depth", "eta_r_max",
                     "n_sources", "max_loss_per_component", "n_avg", "basis"])
    for row in rows:
        writer.writerow([row.source, row.scheme, row.n_mux, row.depth,
                         repr(row.eta_r_max), row.n_sources, repr(row.max_loss),
                         repr(row.navg), row.basis])
    return buf.getvalue()


def breakdown_to_json(scheme: SchemeSpec) -> str:
    """Nested JSON breakdown with per-stage cumulative values."""
    b = n_avg(scheme)
    payload = {
        "scheme": scheme.name,
        "boost_level": scheme.boost_level,
        "unit_cost": scheme.unit_cost,
        "stages": [
            {
                "index": s.index,
                "success_prob": s.success_prob,
                "copies": s.copies,
                "aux_photons": s.aux_photons,
                "detected": s.detected,
                "gates": s.gates,
                "cumulative_navg": b.cumulative_navg[i],
                "cumulative_depth": b.cumulative_depth[i],
            }
            for i, s in enumerate(scheme.stages)
        ],
        "total_navg": b.total_navg,
        "eta_r_max_unit_ps": b.eta_r_max,
    }
    return json.dumps(payload, indent=2)
