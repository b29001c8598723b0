#!/usr/bin/env python3
"""Generate the monopole and punctured-plane problem bundles.

The expressions are assembled programmatically so that the six chart
potentials, twelve gauge functions and all sample points stay consistent.
"""

import json
import math
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures")

R3 = "sqrt(u1^2 + u2^2 + u3^2)"

# Octahedral vertex order: 0:+e1 1:-e1 2:+e2 3:-e2 4:+e3 5:-e3.
AXIS = {0: 0, 1: 0, 2: 1, 3: 1, 4: 2, 5: 2}
SIGN = {i: (1 if i % 2 == 0 else -1) for i in range(6)}
U = ["u1", "u2", "u3"]


def unit(i):
    v = [0, 0, 0]
    v[AXIS[i]] = SIGN[i]
    return v


def cross(a, b):
    return [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]


def simplify_lin(expr_terms):
    """Render sum of +-name terms."""
    out = []
    for coeff, name in expr_terms:
        if coeff == 0:
            continue
        if coeff == 1:
            out.append(("+", name))
        elif coeff == -1:
            out.append(("-", name))
        else:
            raise ValueError(coeff)
    if not out:
        return "0"
    s = ""
    for k, (sign, name) in enumerate(out):
        if k == 0:
            s = name if sign == "+" else f"-{name}"
        else:
            s += f" {sign} {name}"
    return s


def lin(v):
    """Constant +-1 vector dotted with u as a clean expression."""
    return simplify_lin([(c, name) for c, name in zip(v, U)])


def chart_potential(i):
    n = unit(i)
    # n x u componentwise for constant n.
    nxu = [
        simplify_lin([(n[1], U[2]), (-n[2], U[1])]),
        simplify_lin([(n[2], U[0]), (-n[0], U[2])]),
        simplify_lin([(n[0], U[1]), (-n[1], U[0])]),
    ]
    shift = lin(n)
    den = f"({R3}*({R3} + {shift}))" if not shift.startswith("-") else f"({R3}*({R3} - {shift[1:]}))"
    comps = []
    for a in range(3):
        if nxu[a] == "0":
            comps.append("0")
        else:
            comps.append(f"g*({nxu[a]})/{den}")
    return comps


def chart_lagrangian(i):
    comps = chart_potential(i)
    kin = "1/2*(u1_t^2 + u2_t^2 + u3_t^2)"
    terms = [kin]
    for a in range(3):
        if comps[a] != "0":
            terms.append(f"({comps[a]})*{U[a]}_t")
    return " + ".join(terms)


def gauge(i, j):
    """chi_ij with d chi_ij = A_i - A_j on the overlap."""
    ni, nj = unit(i), unit(j)
    num_vec = cross(ni, nj)
    num = lin(num_vec)
    si, sj = lin(ni), lin(nj)
    den_terms = [R3]
    for s in (si, sj):
        den_terms.append(s)
    den = " + ".join(den_terms).replace("+ -", "- ")
    return f"2*g*arctan(({num})/({den}))"


def octant_sample(tri):
    pt = {"u1": 0.0, "u2": 0.0, "u3": 0.0}
    for v in tri:
        pt[U[AXIS[v]]] = float(SIGN[v])
    return pt


def edge_sample(edge):
    pt = {"u1": 0.0, "u2": 0.0, "u3": 0.0}
    for v in edge:
        pt[U[AXIS[v]]] = float(SIGN[v])
    # Keep away from the coordinate planes a little on the free axis.
    free = {0, 1, 2} - {AXIS[v] for v in edge}
    for f in free:
        pt[U[f]] = 0.25
    return pt


def monopole():
    sets = []
    names = ["Upx", "Umx", "Upy", "Umy", "Upz", "Umz"]
    anns = ["u1 > 0", "u1 < 0", "u2 > 0", "u2 < 0", "u3 > 0", "u3 < 0"]
    for nm, an in zip(names, anns):
        sets.append({"name": nm, "star_shaped": False, "annotation": an})

    simplices = [[i] for i in range(6)]
    edges = []
    for a in range(6):
        for b in range(a + 1, 6):
            if AXIS[a] == AXIS[b]:
                continue
            edges.append([a, b])
    simplices += edges
    tris = []
    for a in (0, 1):
        for b in (2, 3):
            for c in (4, 5):
                tris.append(sorted([a, b, c]))
    tris.sort()
    simplices += tris

    samples = {}
    for e in edges:
        samples[",".join(map(str, e))] = edge_sample(e)
    for t in tris:
        samples[",".join(map(str, t))] = octant_sample(t)

    lagrangians = {f"L_{names[i]}": chart_lagrangian(i) for i in range(6)}
    currents = {}
    nu = {}
    for (a, b) in edges:
        nm = f"chi_{a}{b}"
        currents[nm] = [gauge(a, b)]
        nu[f"{a},{b}"] = nm

    bundle = {
        "name": "monopole",
        "description": "Dirac monopole of charge g on R^3 minus the origin: six half-space charts, octahedral nerve, nontrivial obstruction class measured by the total flux.",
        "signature": {"base": ["t"], "fiber": ["u1", "u2", "u3"], "order_cap": 4},
        "constants": [
            {"name": "pi", "value": math.pi},
            {"name": "g", "value": 2.0},
        ],
        "lagrangians": lagrangians,
        "source_forms": {},
        "fields": {
            "rotation": {"xi": ["0"], "fiber": ["-u2", "u1", "0"]},
        },
        "currents": currents,
        "covers": [
            {
                "name": "octahedral",
                "sets": sets,
                "simplices": simplices,
                "samples": samples,
            }
        ],
        "presentations": [
            {
                "name": "wu-yang",
                "cover": "octahedral",
                "lagrangians": [f"L_{names[i]}" for i in range(6)],
                "nu": nu,
            }
        ],
        "cochains": [],
        "fixtures": {
            "period_monomials": ["g*pi"],
            "closed_2form": {
                "0,1": f"g*u3/{R3}^3",
                "0,2": f"-g*u2/{R3}^3",
                "1,2": f"g*u1/{R3}^3",
            },
            "triangulation": {"kind": "octahedron", "subdivisions": 5},
        },
    }
    return bundle


RHO = "sqrt(u1^2 + u2^2)"


def sector_branch(k):
    """Angle branch on the sector centered at 2 pi k / 3, width 4 pi / 3."""
    if k == 0:
        c, s = "1", "0"
        inner = f"u2/({RHO} + u1)"
        offset = None
    elif k == 1:
        # cos = -1/2, sin = sqrt(3)/2
        inner = f"(-1/2*sqrt(3)*u1 - 1/2*u2)/({RHO} - 1/2*u1 + 1/2*sqrt(3)*u2)"
        offset = "2/3*pi"
    else:
        inner = f"(1/2*sqrt(3)*u1 - 1/2*u2)/({RHO} - 1/2*u1 - 1/2*sqrt(3)*u2)"
        offset = "4/3*pi"
    core = f"2*arctan({inner})"
    if offset:
        return f"kappa*({offset} + {core})"
    return f"kappa*{core}"


def punctured_plane():
    rho2 = "(u1^2 + u2^2)"
    w = f"(u1*u2_t - u2*u1_t)/{rho2}"
    lag = f"1/2*(u1_t^2 + u2_t^2)/{rho2} + kappa*log({RHO})*{w}"
    mu = f"kappa*{w}"
    eps = f"(u1*u1_t + u2*u2_t)/{rho2}"

    def pt(angle):
        return {"u1": math.cos(angle), "u2": math.sin(angle)}

    sets = [
        {"name": "S0", "star_shaped": False, "annotation": "sector about angle 0, width 240 degrees"},
        {"name": "S1", "star_shaped": False, "annotation": "sector about angle 2pi/3, width 240 degrees"},
        {"name": "S2", "star_shaped": False, "annotation": "sector about angle 4pi/3, width 240 degrees"},
    ]
    simplices = [[0], [1], [2], [0, 1], [0, 2], [1, 2]]
    samples = {
        "0": pt(0.0),
        "1": pt(2 * math.pi / 3),
        "2": pt(4 * math.pi / 3),
        "0,1": pt(math.pi / 3),
        "0,2": pt(5 * math.pi / 3),
        "1,2": pt(math.pi),
    }

    branches = [sector_branch(k) for k in range(3)]
    bundle = {
        "name": "punctured-plane",
        "description": "Aharonov-Bohm style fixture on R x (R^2 minus the origin): the scaling field is a symmetry of the equations but not of the Lagrangian, and the conserved-current class is the loop period of the angle form.",
        "signature": {"base": ["t"], "fiber": ["u1", "u2"], "order_cap": 4},
        "constants": [
            {"name": "pi", "value": math.pi},
            {"name": "kappa", "value": 1.5},
        ],
        "lagrangians": {
            "ab": lag,
            "mu_angle": mu,
        },
        "source_forms": {},
        "fields": {
            "scaling": {"xi": ["0"], "fiber": ["u1", "u2"]},
            "rotation": {"xi": ["0"], "fiber": ["-u2", "u1"]},
            "translation": {"xi": ["0"], "fiber": ["1", "0"]},
        },
        "currents": {
            "beta0": [branches[0]],
            "beta1": [branches[1]],
            "beta2": [branches[2]],
            "nu_prop2_0": [f"{branches[0]} - {eps}"],
            "nu_prop2_1": [f"{branches[1]} - {eps}"],
            "nu_prop2_2": [f"{branches[2]} - {eps}"],
        },
        "covers": [
            {
                "name": "sectors",
                "sets": sets,
                "simplices": simplices,
                "samples": samples,
            }
        ],
        "presentations": [
            {
                "name": "ab",
                "cover": "sectors",
                "lagrangians": ["ab", "ab", "ab"],
            }
        ],
        "cochains": [
            {
                "name": "beta",
                "cover": "sectors",
                "degree": 0,
                "values": {"0": "beta0", "1": "beta1", "2": "beta2"},
            },
            {
                "name": "nu_prop2",
                "cover": "sectors",
                "degree": 0,
                "values": {"0": "nu_prop2_0", "1": "nu_prop2_1", "2": "nu_prop2_2"},
            },
            {
                "name": "angle_branches",
                "cover": "sectors",
                "degree": 0,
                "values": {"0": "beta0", "1": "beta1", "2": "beta2"},
            }
        ],
        "fixtures": {
            "period_monomials": ["kappa*pi"],
            "closed_1form": [f"-kappa*u2/{rho2}", f"kappa*u1/{rho2}"],
            "loop": {"kind": "circle", "fibers": [0, 1], "radius": 1.0, "samples": 256},
        },
    }
    return bundle


def twochart():
    lag_n = chart_lagrangian(4)
    lag_s = chart_lagrangian(5)
    bundle = {
        "name": "twochart",
        "description": "Two-hemisphere monopole presentation: valid but not global; the two-set nerve carries no degree-two information.",
        "signature": {"base": ["t"], "fiber": ["u1", "u2", "u3"], "order_cap": 4},
        "constants": [
            {"name": "pi", "value": math.pi},
            {"name": "g", "value": 2.0},
        ],
        "lagrangians": {"L_north": lag_n, "L_south": lag_s},
        "source_forms": {},
        "fields": {"rotation": {"xi": ["0"], "fiber": ["-u2", "u1", "0"]}},
        "currents": {},
        "covers": [
            {
                "name": "hemispheres",
                "sets": [
                    {"name": "N", "star_shaped": False, "annotation": "complement of the negative u3 axis"},
                    {"name": "S", "star_shaped": False, "annotation": "complement of the positive u3 axis"}
                ],
                "simplices": [[0], [1], [0, 1]],
                "samples": {"0,1": {"u1": 1.0, "u2": 0.0, "u3": 0.0}}
            }
        ],
        "presentations": [
            {"name": "hemispheres", "cover": "hemispheres", "lagrangians": ["L_north", "L_south"]}
        ],
        "cochains": [],
        "fixtures": {"period_monomials": ["g*pi"]}
    }
    return bundle


def main():
    for bundle in (monopole(), punctured_plane(), twochart()):
        path = os.path.join(OUT, bundle["name"].replace("-", "_") + ".json")
        with open(path, "w") as f:
            json.dump(bundle, f, indent=2)
            f.write("\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
