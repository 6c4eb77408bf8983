from ._core import (
    Game,
    exact_gibbs,
    is_nash,
    load_game,
    parse_game,
    player_cost,
    potential,
    run_cli,
    run_dynamics,
    sample_gibbs,
    sample_pne,
    total_variation,
)

__all__ = [
    "Game",
    "exact_gibbs",
    "is_nash",
    "load_game",
    "parse_game",
    "player_cost",
    "potential",
    "run_cli",
    "run_dynamics",
    "sample_gibbs",
    "sample_pne",
    "total_variation",
]
