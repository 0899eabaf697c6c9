"""Python interface to the movnet consensus simulator."""

import json as _json

from ._movnet import (
    MovnetError,
    contraction_coefficient,
    cycle_gcd,
    decompose,
    disagreement,
    ergodic_adjacency,
    ergodic_laplacian,
    expected_adjacency,
    fixture_config,
    is_strongly_connected,
    mixing_curve,
    out_degrees,
    run_trial,
    schur_product,
    slem,
    stationary_distribution,
    transition_matrix,
)
from ._movnet import run_campaign as _run_campaign


def run_campaign(config=None, *, fixture=None, trials=None, master_seed=0, jobs=0, drift_t_min=50):
    """Run a seeded Monte Carlo campaign.

    ``config`` may be a dict or JSON text in the CLI configuration format;
    alternatively name a built-in ``fixture`` ("default" or "pair").
    """
    if isinstance(config, dict):
        config = _json.dumps(config)
    return _run_campaign(config, fixture, trials, master_seed, jobs, drift_t_min)


__all__ = [
    "MovnetError",
    "contraction_coefficient",
    "cycle_gcd",
    "decompose",
    "disagreement",
    "ergodic_adjacency",
    "ergodic_laplacian",
    "expected_adjacency",
    "fixture_config",
    "is_strongly_connected",
    "mixing_curve",
    "out_degrees",
    "run_campaign",
    "run_trial",
    "schur_product",
    "slem",
    "stationary_distribution",
    "transition_matrix",
]
