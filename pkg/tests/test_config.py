"""Config schema: defaults, round trips, and field-path error reporting."""

import json

import pytest

from stripmin.config import (
    RunConfig,
    config_from_dict,
    load_config,
    resolve_schedule,
    template,
    to_file_dict,
)
from stripmin.errors import BadConfig


def test_empty_dict_gives_defaults():
    assert config_from_dict({}) == RunConfig()


def test_round_trip_is_lossless():
    config = config_from_dict({
        "problem": {"N": 3, "p": 2.5, "L": 2.0},
        "grid": {"r_max": 20.0, "h": 0.04, "m": 48, "shoot_h": 0.02},
        "solver": {"tol": 1e-9, "max_iter": 500, "accelerate": False,
                   "rearrange": True},
        "run": {"L_schedule": [0.5, 1.5], "seed": 7, "workers": 3,
                "output_dir": "elsewhere"},
    })
    assert config_from_dict(to_file_dict(config)) == config


def test_template_parses_to_defaults(tmp_path):
    path = tmp_path / "defaults.toml"
    path.write_text(template(), encoding="utf-8")
    assert load_config(path) == RunConfig()


def test_json_config_loads(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"problem": {"N": 2, "p": 2.0, "L": 1.5}}),
                    encoding="utf-8")
    config = load_config(path)
    assert config.problem.p == 2.0
    assert config.grid == RunConfig().grid


def test_unknown_extension_rejected(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("problem: {}\n", encoding="utf-8")
    with pytest.raises(BadConfig):
        load_config(path)


@pytest.mark.parametrize("raw, path_fragment", [
    ({"problems": {}}, "problems"),
    ({"problem": {"NN": 3}}, "problem.NN"),
    ({"problem": {"N": 2.5}}, "problem.N"),
    ({"problem": {"N": 1}}, "problem.N"),
    ({"problem": {"p": 1.0}}, "problem.p"),
    ({"problem": {"L": -1.0}}, "problem.L"),
    ({"grid": {"m": 1}}, "grid.m"),
    ({"grid": {"h": 30.0}}, "grid.h"),
    ({"grid": {"shoot_h": 0.0}}, "grid.shoot_h"),
    ({"solver": {"tol": 0.0}}, "solver.tol"),
    ({"solver": {"tol": "tight"}}, "solver.tol"),
    ({"solver": {"max_iter": 0}}, "solver.max_iter"),
    ({"solver": {"accelerate": "yes"}}, "solver.accelerate"),
    ({"run": {"workers": 0}}, "run.workers"),
    ({"run": {"seed": -1}}, "run.seed"),
    ({"run": {"L_schedule": [1.0, 1.0]}}, "run.L_schedule[1]"),
    ({"run": {"L_schedule": [2.0, 1.0]}}, "run.L_schedule[1]"),
    ({"run": {"L_schedule": [0.0]}}, "run.L_schedule[0]"),
    ({"run": {"L_schedule": {"min": 1.0, "max": 2.0}}}, "run.L_schedule.count"),
    ({"run": {"L_schedule": {"min": 2.0, "max": 1.0, "count": 3}}},
     "run.L_schedule.max"),
    ({"run": {"critical_N": [2]}}, "run.critical_N[0]"),
    ({"run": {"eps_values": [0.01, -0.02]}}, "run.eps_values[1]"),
])
def test_bad_config_reports_field_path(raw, path_fragment):
    with pytest.raises(BadConfig, match=path_fragment.replace("[", r"\[")
                                             .replace("]", r"\]")
                                             .replace(".", r"\.")):
        config_from_dict(raw)


def test_range_schedule_resolves_to_explicit_grid():
    schedule = resolve_schedule({"min": 1.0, "max": 2.0, "count": 5})
    assert schedule == (1.0, 1.25, 1.5, 1.75, 2.0)
    assert resolve_schedule({"min": 3.0, "max": 3.0, "count": 1}) == (3.0,)


def test_empty_list_schedule_loads_but_is_empty():
    # an empty schedule is representable (the sweep subcommand rejects it);
    # other subcommands never read it
    assert config_from_dict({"run": {"L_schedule": []}}).L_schedule == ()
