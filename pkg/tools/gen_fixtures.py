#!/usr/bin/env python3
"""Regenerate the JSON fixtures under fixtures/.

Run from the repository root:  python3 tools/gen_fixtures.py
"""

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), os.pardir, "src"))

from branekit import jsonio
from branekit.bdr import LineClass, assemble
from branekit.family import (
    Chart,
    Nerve,
    from_potential,
    idempotent_frames,
    transition_permutations,
)
from branekit.poly import Polynomial
from branekit.twisted import dual, end, random_twisted_bundle, scalar_line, tensor, trivial_line

OUT = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")

ANTIDIAG = [[0.0, 1.0], [1.0, 0.0]]
OMEGA = np.exp(2j * np.pi / 3)


def write(name, obj):
    path = os.path.join(OUT, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"wrote {path}")


def circle_nerve_json(num_charts=8, samples_per_chart=4):
    charts = []
    for k in range(num_charts):
        samples = []
        for j in range(samples_per_chart + 1):
            frac = (k + j / samples_per_chart) % num_charts
            theta = 2.0 * np.pi * frac / num_charts
            z = np.exp(1j * theta)
            samples.append([[0.0, 0.0], [z.real, z.imag]])
        charts.append({"id": f"c{k}", "samples": samples})
    edges = [[f"c{k}", f"c{(k + 1) % num_charts}"] for k in range(num_charts)]
    return {"charts": charts, "edges": edges}


def family_circle_json():
    loop = [f"c{k}" for k in range(8)] + ["c0"]
    return {
        "n": 2,
        "potential": [
            {"coeff": [0.5, 0.0], "monomial": [2, 1]},
            {"coeff": [1.0 / 24.0, 0.0], "monomial": [0, 4]},
        ],
        "metric": ANTIDIAG,
        "unit_direction": 0,
        "nerve": circle_nerve_json(),
        "loops": [loop, loop + loop[1:]],
    }


def disk_cover():
    t1 = 0.7
    center = (0.0, complex(t1))
    charts = [
        Chart("p0", ((0.0, t1 + 0.3), center)),
        Chart("p1", ((0.0, t1 + 0.3j), center)),
        Chart("p2", ((0.0, t1 - 0.25), center)),
    ]
    nerve = Nerve(charts, [("p0", "p1"), ("p1", "p2"), ("p0", "p2")],
                  triangles=[("p0", "p1", "p2")])
    phi = Polynomial(2, {(2, 1): 0.5, (0, 4): 1.0 / 24.0})
    from branekit.family import PotentialFamily
    fam = PotentialFamily(2, phi, ANTIDIAG, 0)
    family = from_potential(fam, nerve)
    cover = transition_permutations(idempotent_frames(family), nerve)
    return cover, nerve


def bdr_disk_json():
    cover, nerve = disk_cover()
    rng = np.random.default_rng(7)
    pot = {(cid, i): rng.integers(-3, 4, size=2)
           for cid in nerve.chart_order for i in range(cover.n)}
    lines = {}
    for key, u in cover.transitions.items():
        a, b = key
        for i in range(cover.n):
            lines[(key, i)] = LineClass(tuple(int(x) for x in pot[(a, i)] - pot[(b, u[i])]))
    cocycle = assemble(cover, lines, 2)
    return jsonio.bdr_to_json(cocycle, nerve)


def three_chart_nerve():
    pt = ((0.0,),)
    charts = [Chart(c, pt) for c in ("0", "1", "2")]
    return Nerve(charts, [("0", "1"), ("0", "2"), ("1", "2")],
                 triangles=[("0", "1", "2")])


def omega_line(nerve):
    return scalar_line(nerve, {("0", "1"): 1.0, ("1", "2"): 1.0,
                               ("0", "2"): 1.0 / OMEGA})


def main():
    os.makedirs(OUT, exist_ok=True)

    write("algebra_quadratic.json", {
        "dim": 2,
        "c": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
              [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]],
        "unit": [[1, 0], [0, 0]],
        "trace": [[1, 0], [0, 0]],
    })
    write("algebra_nilpotent.json", {
        "dim": 2,
        "c": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]],
              [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]],
        "unit": [[1, 0], [0, 0]],
        "trace": [[0, 0], [1, 0]],
    })
    write("branes_small.json", {
        "sector": {"weights": [[1, 0], [4, 0]], "roots": [[1, 0], [2, 0]]},
        "labels": [{"dims": [2, 1]}, {"dims": [1, 3]}, {"dims": [0, 0]}],
    })
    write("branes_degenerate.json", {
        "sector": {"weights": [[1, 0], [0, 0]]},
        "labels": [{"dims": [1, 1]}],
    })
    write("family_circle.json", family_circle_json())
    write("bdr_disk.json", bdr_disk_json())

    nerve = three_chart_nerve()
    nerve_json = jsonio.nerve_to_json(nerve)

    omega = omega_line(nerve)
    write("twisted_omega.json", {"nerve": nerve_json,
                                 **jsonio.twisted_to_json(omega)})

    scal = {("0", "1"): 1.7, ("1", "2"): 0.4 + 0.1j, ("0", "2"): 2.0}
    e = random_twisted_bundle(nerve, 2, seed=5, scalars=scal)
    f = random_twisted_bundle(nerve, 3, seed=6, scalars=scal)
    write("twisted_pair.json", {
        "nerve": nerve_json,
        "e": jsonio.twisted_to_json(e),
        "f": jsonio.twisted_to_json(f),
    })

    rng = np.random.default_rng(9)
    u = {c: rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
         for c in nerve.chart_order}
    conj = {key: u[key[0]] @ e.g[key] @ np.linalg.inv(u[key[1]]) for key in e.g}
    from branekit.twisted import TwistedBundle
    e_conj = TwistedBundle(nerve, 2, conj)
    write("twisted_iso.json", {
        "nerve": nerve_json,
        "e": jsonio.twisted_to_json(e),
        "f": jsonio.twisted_to_json(e_conj),
    })

    base = random_twisted_bundle(nerve, 2, seed=11)
    write("twisted_azumaya.json", {"nerve": nerve_json,
                                   **jsonio.twisted_to_json(end(base))})

    ordinary = random_twisted_bundle(nerve, 2, seed=12,
                                     scalars={k: 1.0 for k in nerve.edge_set()})
    write("twisted_psi.json", {
        "nerve": nerve_json,
        "e": jsonio.twisted_to_json(tensor(ordinary, omega)),
        "reps": [jsonio.twisted_to_json(trivial_line(nerve)),
                 jsonio.twisted_to_json(omega),
                 jsonio.twisted_to_json(dual(omega))],
    })

    write("pipeline_circle.json", {
        "family": family_circle_json(),
        "label_dim": 2,
        "generators": 1,
    })


if __name__ == "__main__":
    main()
