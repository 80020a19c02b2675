"""Built-in problem files.

Each fixture is a plain dict in the JSON problem format read by
:func:`algebroidkit.problem.load_problem`.  Mutations change one ingredient
so that exactly one designated check fails.
"""
from __future__ import annotations

import copy

__all__ = ["FIXTURES", "MUTATIONS", "DESIGNATED", "fixture", "fixture_names"]


def _chart(names, half=1.0):
    return {"coordinates": list(names), "box": [[-half, half] for _ in names]}


def _zeros(*shape):
    if len(shape) == 1:
        return ["0"] * shape[0]
    return [_zeros(*shape[1:]) for _ in range(shape[0])]


def _e1():
    C = _zeros(1, 1, 1)
    return {
        "chart": _chart(["x", "y"]),
        "algebroid": {"rank": 1, "rho": [["-y", "x"]], "C": C},
        "presymplectic": {"omega": [["0", "1"], ["-1", "0"]]},
        "momentum": {"mu": ["(x^2 + y^2)/2"]},
        "dirac": {"kind": "graph-omega"},
        "options": {"points": 64, "tol": 1e-9, "seed": 0},
    }


def _e2():
    return {
        "chart": _chart(["x", "y"]),
        "algebroid": {"rank": 1, "rho": [["y", "-x"]], "C": _zeros(1, 1, 1)},
        "poisson": {"pi": [["0", "1"], ["-1", "0"]]},
        "momentum": {"mu": ["(x^2 + y^2)/2"]},
        "dirac": {"kind": "graph-pi"},
        "options": {"points": 64, "tol": 1e-9, "seed": 0, "pbox": 3.0},
    }


def _e3():
    C = _zeros(2, 2, 2)
    C[0][1][0] = "1"
    C[1][0][0] = "-1"
    return {
        "chart": _chart(["x"]),
        "algebroid": {"rank": 2, "rho": [["1"], ["x"]], "C": C},
        "options": {"points": 64, "tol": 1e-9, "seed": 0},
    }


def _e4():
    # Koszul algebroid of pi^{xy} = x framed by dx, dy
    C = _zeros(2, 2, 2)
    C[0][1][0] = "1"
    C[1][0][0] = "-1"
    return {
        "chart": _chart(["x", "y"]),
        "algebroid": {"rank": 2, "rho": [["0", "x"], ["-x", "0"]], "C": C},
        "poisson": {"pi": [["0", "x"], ["-x", "0"]]},
        "momentum": {"mu": ["-x", "-y"]},
        "options": {"points": 64, "tol": 1e-9, "seed": 0},
    }


def _e5():
    names = ["x1", "y1", "x2", "y2"]
    omega = _zeros(4, 4)
    omega[0][1], omega[1][0] = "1", "-1"
    omega[2][3], omega[3][2] = "1", "-1"
    return {
        "chart": _chart(names),
        "algebroid": {"rank": 2, "rho": [["1", "0", "0", "0"], ["0", "0", "1", "0"]], "C": _zeros(2, 2, 2)},
        "presymplectic": {"omega": omega},
        "momentum": {"mu": ["-y1", "-y2"]},
        "dirac": {"kind": "graph-omega"},
        "options": {"points": 64, "tol": 1e-9, "seed": 0},
    }


def _e6():
    # mu = (y, x y) for pi^{xy} = 1; rho = pi# d mu; {mu_1, mu_2} = -mu_1 so C^1_12 = 1
    C = _zeros(2, 2, 2)
    C[0][1][0] = "1"
    C[1][0][0] = "-1"
    return {
        "chart": _chart(["x", "y"]),
        "algebroid": {"rank": 2, "rho": [["1", "0"], ["x", "-y"]], "C": C},
        "poisson": {"pi": [["0", "1"], ["-1", "0"]]},
        "momentum": {"mu": ["y", "x*y"]},
        "dirac": {"kind": "graph-pi"},
        "options": {"points": 64, "tol": 1e-9, "seed": 0, "pbox": 3.0},
    }


FIXTURES = {"e1": _e1, "e2": _e2, "e3": _e3, "e4": _e4, "e5": _e5, "e6": _e6}


def _mut_e1():
    d = _e1()
    d["momentum"]["mu"] = ["x^2 + y^2"]
    return d


def _mut_e2():
    d = _e2()
    d["momentum"]["mu"] = ["x^2 + y^2"]
    return d


def _mut_e3():
    d = _e3()
    d["algebroid"]["C"][0][1][0] = "2"
    d["algebroid"]["C"][1][0][0] = "-2"
    return d


def _mut_e4():
    d = _e4()
    d["algebroid"]["C"][0][1][0] = "2"
    d["algebroid"]["C"][1][0][0] = "-2"
    return d


def _mut_e5():
    d = _e5()
    d["momentum"]["mu"] = ["-y1", "y2"]
    return d


def _mut_e6():
    d = _e6()
    d["momentum"]["mu"] = ["y + 1", "x*y"]
    return d


MUTATIONS = {
    "e1-broken-mu": _mut_e1,
    "e2-broken-mu": _mut_e2,
    "e3-broken-c": _mut_e3,
    "e4-broken-c": _mut_e4,
    "e5-broken-mu": _mut_e5,
    "e6-broken-mu": _mut_e6,
}

# fixture -> (suite it must pass or fail, the single check expected to fail)
DESIGNATED = {
    "e1": ("hamiltonian-symplectic", None),
    "e2": ("hamiltonian-poisson", None),
    "e3": ("axioms", None),
    "e4": ("axioms", None),
    "e5": ("hamiltonian-symplectic", None),
    "e6": ("hamiltonian-poisson", None),
    "e1-broken-mu": ("hamiltonian-symplectic", "S2"),
    "e2-broken-mu": ("hamiltonian-poisson", "P2"),
    "e3-broken-c": ("axioms", "axioms"),
    "e4-broken-c": ("axioms", "axioms"),
    "e5-broken-mu": ("hamiltonian-symplectic", "S2"),
    "e6-broken-mu": ("hamiltonian-poisson", "P3"),
}


def fixture_names() -> list[str]:
    return list(FIXTURES) + list(MUTATIONS)


def fixture(name: str) -> dict:
    if name in FIXTURES:
        return copy.deepcopy(FIXTURES[name]())
    if name in MUTATIONS:
        return copy.deepcopy(MUTATIONS[name]())
    raise KeyError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")
