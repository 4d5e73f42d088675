import os
import yaml

from problems.algebra_problem import AlgebraProblem
from problems.fixture_problem import FixtureProblem
from problems.pde_problem import PDEProblem


def load_problem(path, problem_type=None, spec=None):
    """Read a problem file; the type defaults to the file suffix (pde, alg, fix)."""
    problem_type = problem_type or os.path.splitext(path)[1].lstrip(".")
    if problem_type == "pde":
        problem = PDEProblem(path)
    elif problem_type == "alg":
        problem = AlgebraProblem(path)
    elif problem_type == "fix":
        assert spec is not None, "a fixture is read against a problem"
        problem = FixtureProblem(spec, path)
    else:
        raise NotImplementedError

    return problem


def load_yaml(path):
    with open(path, "r") as stream:
        return yaml.safe_load(stream) or {}


def load_config(path):
    config = load_yaml(path)
    config.setdefault("solver", {})
    config["solver"].setdefault("degree", 3)
    config["solver"].setdefault("probe", True)
    config.setdefault("check", {"samples": 100, "seed": 42})
    config.setdefault("search", {"max_length": 3})
    config.setdefault("paths", {})
    config.setdefault("progress", False)
    return config
