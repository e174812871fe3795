"""Tabulate the stability boundaries of both fixed points and the
normal-form coefficients on them.

Produces boundary_atlas.json in ./demo_out/ holding, for a = 1 and
K = 0.5: the three threshold curves sampled over r, the junction values
where pairs of curves meet, and the flip/NS coefficients at a few
representative boundary points.
"""

import json
import math
import pathlib

from sirmap import (
    ModelParams,
    beta2_threshold,
    disease_free,
    flip_coefficient,
    ns_coefficient,
    rho_prime_at_ns,
    thresholds,
)
from sirmap.equilibria import beta1_formula

OUT = pathlib.Path("demo_out")
A, K = 1.0, 0.5


def main():
    OUT.mkdir(exist_ok=True)
    th = thresholds(2.0, A, K)

    doc = {"a": A, "K": K, "curves": [], "junctions": {}, "coefficients": {}}

    rs = [1.05 + 0.05 * k for k in range(1, 60)]
    for r in rs:
        t = thresholds(r, A, K)
        doc["curves"].append({"r": r, "beta0": t.beta0, "beta1": t.beta1, "beta2": t.beta2})

    doc["junctions"] = {
        "flip_meets_fold_at_r3": {
            "beta0": thresholds(3.0, A, K).beta0,
            "beta1_formula": beta1_formula(3.0, A, K),
        },
        "flip_meets_ns_at_r_max": {
            "r_max": th.r_max,
            "beta1_formula": beta1_formula(th.r_max, A, K),
            "beta2": beta2_threshold(th.r_max, A, K),
        },
        "strong_resonances": {"r_bar": th.r_bar, "r_tilde": th.r_tilde, "r_max": th.r_max},
    }

    p_flip = ModelParams(r=3.0, beta=0.5, a=A, K=K)
    nf_flip = flip_coefficient(p_flip, disease_free(p_flip))
    p_ns = ModelParams(r=35.0 / 16.0, beta=3.0, a=A, K=K)
    nf_ns = ns_coefficient(p_ns)
    doc["coefficients"] = {
        "flip_at_disease_free_r3": {
            "c": nf_flip.coefficient,
            "branch_stable": nf_flip.branch_stable,
        },
        "ns_at_endemic_35_16": {
            "d": nf_ns.coefficient,
            "theta0": nf_ns.theta0,
            "modulus_slope": rho_prime_at_ns(p_ns),
            "branch_stable": nf_ns.branch_stable,
        },
    }

    path = OUT / "boundary_atlas.json"
    path.write_text(json.dumps(doc, indent=2))
    print(f"wrote {path}")
    print(f"  fold/flip junction at r=3: beta0 = beta1 = {doc['junctions']['flip_meets_fold_at_r3']['beta0']:.6f}")
    j = doc["junctions"]["flip_meets_ns_at_r_max"]
    print(f"  flip/NS junction at r_max = {j['r_max']:.6f}: beta1 = {j['beta1_formula']:.9f}, beta2 = {j['beta2']:.9f}")
    print(f"  flip coefficient at the r=3 boundary: c = {nf_flip.coefficient:.1f} (stable 2-cycle)")
    print(f"  NS coefficient at r = 35/16: d = {nf_ns.coefficient:.6f} (stable invariant curve), angle {math.degrees(nf_ns.theta0):.2f} deg")


if __name__ == "__main__":
    main()
