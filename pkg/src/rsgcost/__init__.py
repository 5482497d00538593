"""Hardware-cost modeling for photonic resource-state generators.

Quantifies what it takes to produce a 24-photon Shor-encoded (2,2)
6-ring resource state for fusion-based quantum computation: closed-form
photon-consumption bounds, heralded-source noise trade-offs, exact
resource-sharing success probabilities, Monte Carlo simulation of a
repeat-until-success spin-source module, loss/efficiency trade-off
optimization, and the graph-state combinatorics behind the spin scheme.
"""
from .model import (
    ConfigError,
    LossBudget,
    RsgTarget,
    SchemeSpec,
    SourceSpec,
    StageSpec,
    builtin_scheme,
    builtin_source,
    parse_config,
    scheme_to_config,
    schemes_to_config,
)
from .bounds import (
    CostBreakdown,
    eta_r_max,
    eta_r_max_rus,
    max_loss_per_component,
    mux_efficiency,
    n_avg,
    n_sources_for_rate,
    optical_depth,
    table_one,
)

__version__ = "0.1.0"
