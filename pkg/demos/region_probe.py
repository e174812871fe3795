"""Exercise the three positivity-region shapes, including one honest
counterexample where the shape conditions hold but orbits still leak.

For each parameter set the script asks for the applicable region,
fires a grid of region-uniform starts through the map, and reports
escapes.  Results go to ./demo_out/region_probe.json.
"""

import json
import pathlib

from sirmap import ModelParams, applicable_region, invariance_probe

OUT = pathlib.Path("demo_out")

SETS = [
    ("triangle", (2.0, 1.5, 1.0, 0.25)),
    ("line-capped", (2.9, 0.8, 0.5, 0.25)),
    ("parabola-capped", (3.98, 2.65, 1.0, 0.50)),
    # shape conditions hold here too, but the image of the upper
    # boundary pokes above the nullcline near S = 0 and orbits escape
    ("parabola-capped, leaky", (3.98, 2.80, 1.0, 0.50)),
]


def main():
    OUT.mkdir(exist_ok=True)
    doc = []
    for label, (r, beta, a, K) in SETS:
        p = ModelParams(r=r, beta=beta, a=a, K=K)
        region = applicable_region(p)
        entry = {"label": label, "params": [r, beta, a, K]}
        if region is None:
            entry["region"] = None
            print(f"{label}: no region applies")
        else:
            rep = invariance_probe(p, samples=2000, steps=500, seed=1)
            entry["region"] = {"case": region.case, "u_star": region.u_star}
            entry["escape_count"] = rep.escape_count
            entry["constraints"] = sorted({e.constraint for e in rep.escapes})
            verdict = "traps orbits" if rep.escape_count == 0 else (
                f"LEAKS: {rep.escape_count}/2000 starts escaped via {entry['constraints']}"
            )
            print(f"{label}: case {region.case}, u* = {region.u_star:.5f}, {verdict}")
        doc.append(entry)

    path = OUT / "region_probe.json"
    path.write_text(json.dumps(doc, indent=2))
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
