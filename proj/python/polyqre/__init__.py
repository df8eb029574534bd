"""Approximate Nash equilibria of polymatrix games via entropy regularization.

Thin wrapper over the compiled extension; see the README for the C++ API.
"""

from ._core import (
    Game,
    best_response,
    bisect_symmetric_qre,
    box,
    delta_f,
    epsilon_gap,
    grad_residual,
    grid_qre_search,
    lambda2,
    lift,
    load_game,
    project,
    pseudo_gradient,
    random_game,
    reduce_point,
    residual_root,
    resolve_tau,
    run,
    save_game,
    table1,
    tau_params,
    total_residual,
    utility,
    validate,
    zero_game,
)

__all__ = [
    "Game",
    "best_response",
    "bisect_symmetric_qre",
    "box",
    "delta_f",
    "epsilon_gap",
    "grad_residual",
    "grid_qre_search",
    "lambda2",
    "lift",
    "load_game",
    "project",
    "pseudo_gradient",
    "random_game",
    "reduce_point",
    "residual_root",
    "resolve_tau",
    "run",
    "save_game",
    "table1",
    "tau_params",
    "total_residual",
    "utility",
    "validate",
    "zero_game",
]

__version__ = "0.1.0"
