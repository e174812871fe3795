"""Command-line front end.

Subcommands: simulate, analyze, scan, cycles, regions, lyapunov.
Tabular results go out as CSV (single header row, floats with 17
significant digits, deterministic bytes for a fixed configuration and
seed); structured reports as JSON.

Option precedence: built-in defaults < --preset < --config file (flat
key=value lines) < explicit flags.

Exit codes: 0 success, 2 configuration error, 3 divergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .core import DivergenceError, ModelParams, iterate
from .dynamics import find_cycle_births, lyapunov, scan
from .equilibria import (
    BoundaryTag,
    classify_boundary,
    disease_free,
    endemic,
    thresholds,
)
from .normal_forms import ResonanceError, flip_coefficient, ns_coefficient, rho_prime_at_ns
from .positivity import applicable_region, invariance_probe

_SQRT2 = math.sqrt(2.0)

PRESETS: dict[str, dict] = {
    # single-orbit parameter sets
    "disease-free-sink": {"r": 1.15, "beta": 3.0, "a": 1.0, "K": 0.5, "s0": 0.6, "i0": 0.2},
    "endemic-focus": {"r": 1.8, "beta": 3.0, "a": 1.0, "K": 0.5, "s0": 0.6, "i0": 0.2},
    "invariant-curve": {"r": 2.2, "beta": 3.0, "a": 1.0, "K": 0.5, "s0": 0.6, "i0": 0.2},
    "invariant-curve-wide": {"r": 2.5, "beta": 3.0, "a": 1.0, "K": 0.5, "s0": 0.6, "i0": 0.2},
    "locked-ten": {"r": 3.3, "beta": 3.0, "a": 1.0, "K": 0.5, "s0": 0.6, "i0": 0.2},
    "ten-on-curve": {"r": 3.6, "beta": 2.85, "a": 1.0, "K": 0.5, "s0": 0.6, "i0": 0.2},
    "endemic-return": {"r": 3.6, "beta": 2.33, "a": 1.0, "K": 0.5, "s0": 0.6, "i0": 0.2},
    "three-cycle": {
        "r": 1.0 + 2.0 * _SQRT2, "beta": 1.1, "a": 1.0, "K": 0.5, "s0": 0.8, "i0": 0.2,
    },
    "axis-chaos": {"r": 4.0, "beta": 0.5, "a": 1.0, "K": 0.5, "s0": 0.3, "i0": 0.0},
    # one-parameter sweeps
    "flip-cascade-scan": {
        "param": "r", "lo": 2.8, "hi": 4.0, "steps": 241,
        "beta": 1.1, "a": 1.0, "K": 0.5, "s0": 0.5, "i0": 0.1,
    },
    "ns-branch-scan": {
        "param": "r", "lo": 1.05, "hi": 4.18, "steps": 314,
        "beta": 3.0, "a": 1.0, "K": 0.5, "s0": 0.6, "i0": 0.2,
    },
    "force-sweep-scan": {
        "param": "beta", "lo": 1.05, "hi": 3.4, "steps": 236,
        "r": 3.6, "a": 1.0, "K": 0.5, "s0": 0.5, "i0": 0.1,
    },
    "inhibition-sweep-scan": {
        "param": "a", "lo": 0.0, "hi": 12.0, "steps": 241,
        "r": 2.7, "beta": 3.0, "K": 0.3, "s0": 0.5, "i0": 0.1,
    },
    # positivity-region parameter sets
    "triangle-region": {"r": 2.0, "beta": 1.5, "a": 1.0, "K": 0.25},
    "capped-region": {"r": 2.9, "beta": 0.8, "a": 0.5, "K": 0.25},
    "curved-region": {"r": 3.98, "beta": 2.8, "a": 1.0, "K": 0.5},
}

_DEFAULTS: dict = {
    "r": 2.0, "beta": 3.0, "a": 1.0, "K": 0.5,
    "s0": 0.5, "i0": 0.1,
    "transient": 10_000, "steps": 1000, "seed": 0,
    "keep": 100, "n": 3, "lo": None, "hi": None, "param": None,
    "samples": 1000,
}

_COMMAND_DEFAULTS: dict[str, dict] = {
    "lyapunov": {"steps": 100_000},
    "cycles": {"lo": 3.0, "hi": 4.0},
}

_FLOAT_KEYS = ("r", "beta", "a", "K", "s0", "i0", "lo", "hi")
_INT_KEYS = ("transient", "steps", "seed", "keep", "n", "samples")


def _parse_config(path: str) -> dict:
    opts: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key in _FLOAT_KEYS:
                opts[key] = float(value)
            elif key in _INT_KEYS:
                opts[key] = int(value)
            elif key in ("param", "out"):
                opts[key] = value
            else:
                raise ValueError(f"{path}:{lineno}: unknown option {key!r}")
    return opts


def _resolve(args: argparse.Namespace) -> dict:
    merged = dict(_DEFAULTS)
    merged.update(_COMMAND_DEFAULTS.get(args.command, {}))
    if args.preset is not None:
        if args.preset not in PRESETS:
            known = ", ".join(sorted(PRESETS))
            raise ValueError(f"unknown preset {args.preset!r}; available: {known}")
        merged.update(PRESETS[args.preset])
    if args.config is not None:
        merged.update(_parse_config(args.config))
    for key in (*_FLOAT_KEYS, *_INT_KEYS, "param"):
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    merged["out"] = args.out
    return merged


def _params(opts: dict) -> ModelParams:
    return ModelParams(r=opts["r"], beta=opts["beta"], a=opts["a"], K=opts["K"])


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _eig_json(mu: complex) -> list[float]:
    return [float(mu.real), float(mu.imag)]


def _report_json(rep) -> dict:
    return {
        "location": [float(rep.location.S), float(rep.location.I)],
        "eigenvalues": [_eig_json(rep.eigen.mu1), _eig_json(rep.eigen.mu2)],
        "stability": rep.stability.value,
        "residual": float(rep.residual),
    }


def cmd_simulate(opts: dict) -> int:
    p = _params(opts)
    orbit = iterate(p, (opts["s0"], opts["i0"]), opts["transient"], opts["steps"])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "S", "I"])
    for k, (S, I) in enumerate(orbit):
        writer.writerow([opts["transient"] + k, _fmt(S), _fmt(I)])
    _emit(buf.getvalue(), opts["out"])
    if orbit.escaped:
        print(f"orbit escaped at step {orbit.escaped_at}", file=sys.stderr)
        return 3
    return 0


def cmd_analyze(opts: dict) -> int:
    p = _params(opts)
    doc: dict = {"params": {"r": p.r, "beta": p.beta, "a": p.a, "K": p.K}}

    df = disease_free(p)
    df_json = _report_json(df)
    tag0 = classify_boundary(p, "E0")
    df_json["boundary"] = tag0.value if tag0 else None
    doc["disease_free"] = df_json

    tag1 = None
    if p.r > 1.0:
        th = thresholds(p.r, p.a, p.K)
        doc["thresholds"] = {
            "beta0": th.beta0,
            "beta1": th.beta1,
            "beta2": th.beta2,
            "r_bar": th.r_bar,
            "r_tilde": th.r_tilde,
            "r_max": th.r_max,
        }
        en = endemic(p)
        if en is not None:
            en_json = _report_json(en)
            tag1 = classify_boundary(p, "E1")
            en_json["boundary"] = tag1.value if tag1 else None
            doc["endemic"] = en_json
        else:
            doc["endemic"] = None
        ra, rb = p.beta / th.beta0 * 1.0, p.beta / ((p.a + 1.0) * p.K)
        doc["reproduction_candidates"] = [ra, rb]
    else:
        doc["thresholds"] = None
        doc["endemic"] = None
        doc["reproduction_candidates"] = None

    doc["normal_form"] = None
    try:
        if tag0 == BoundaryTag.FLIP:
            nf = flip_coefficient(p, df)
            doc["normal_form"] = {
                "at": "disease_free",
                "kind": nf.kind,
                "coefficient": nf.coefficient,
                "branch_stable": nf.branch_stable,
            }
        elif tag1 == BoundaryTag.FLIP:
            nf = flip_coefficient(p, endemic(p))
            doc["normal_form"] = {
                "at": "endemic",
                "kind": nf.kind,
                "coefficient": nf.coefficient,
                "branch_stable": nf.branch_stable,
            }
        elif tag1 == BoundaryTag.NEIMARK_SACKER:
            nf = ns_coefficient(p)
            doc["normal_form"] = {
                "at": "endemic",
                "kind": nf.kind,
                "coefficient": nf.coefficient,
                "branch_stable": nf.branch_stable,
                "theta0": nf.theta0,
                "eigenvalue": _eig_json(nf.eigenvalue),
                "modulus_slope": rho_prime_at_ns(p),
            }
        elif tag1 in (
            BoundaryTag.RESONANCE_12,
            BoundaryTag.RESONANCE_13,
            BoundaryTag.RESONANCE_14,
        ):
            doc["normal_form"] = {
                "at": "endemic",
                "kind": "resonance",
                "tag": tag1.value,
                "note": "normal-form coefficient undefined at a strong resonance",
            }
    except ResonanceError as exc:
        doc["normal_form"] = {"at": "endemic", "kind": "resonance", "note": str(exc)}

    region = applicable_region(p)
    doc["region"] = (
        {
            "case": region.case,
            "u_star": region.u_star,
            "crossings": list(region.crossings),
        }
        if region
        else None
    )

    _emit(json.dumps(doc, indent=2), opts["out"])
    return 0


def cmd_scan(opts: dict) -> int:
    if opts["param"] is None or opts["lo"] is None or opts["hi"] is None:
        raise ValueError("scan needs --param, --lo and --hi (or a preset providing them)")
    p = _params(opts)
    result = scan(
        p,
        opts["param"],
        (opts["lo"], opts["hi"]),
        opts["steps"],
        x0=(opts["s0"], opts["i0"]),
        transient=opts["transient"],
        keep=opts["keep"],
    )
    escaped_at = {row: step for row, step in result.escapes}
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    keep = result.s_samples.shape[1]
    header = [result.parameter, "lyap_max", "escaped_at"]
    header += [f"S_{j + 1}" for j in range(keep)] + [f"I_{j + 1}" for j in range(keep)]
    writer.writerow(header)
    for row, val in enumerate(result.values):
        cells = [_fmt(float(val)), _fmt(float(result.lyap_max[row]))]
        cells.append(str(escaped_at[row]) if row in escaped_at else "")
        cells += [_fmt(float(x)) for x in result.s_samples[row]]
        cells += [_fmt(float(x)) for x in result.i_samples[row]]
        writer.writerow(cells)
    _emit(buf.getvalue(), opts["out"])
    return 0


def cmd_cycles(opts: dict) -> int:
    births = find_cycle_births(opts["n"], (opts["lo"], opts["hi"]))
    doc = {"n": births.n, "r_values": [float(r) for r in births.r_values]}
    _emit(json.dumps(doc, indent=2), opts["out"])
    return 0


def cmd_regions(opts: dict) -> int:
    p = _params(opts)
    region = applicable_region(p)
    if region is None:
        doc = {"region": None, "note": "no invariance region applies at these parameters"}
        _emit(json.dumps(doc, indent=2), opts["out"])
        return 0
    report = invariance_probe(
        p, samples=opts["samples"], steps=opts["steps"], seed=opts["seed"]
    )
    doc = {
        "region": {
            "case": region.case,
            "u_star": region.u_star,
            "v": region.v,
            "crossings": list(region.crossings),
        },
        "samples": report.samples,
        "steps": report.steps,
        "seed": report.seed,
        "escape_count": report.escape_count,
        "escapes": [
            {
                "index": e.index,
                "step": e.step,
                "point": [e.point[0], e.point[1]],
                "constraint": e.constraint,
            }
            for e in report.escapes
        ],
    }
    _emit(json.dumps(doc, indent=2), opts["out"])
    return 0


def cmd_lyapunov(opts: dict) -> int:
    p = _params(opts)
    l1, l2 = lyapunov(p, (opts["s0"], opts["i0"]), n=opts["steps"], transient=opts["transient"])
    doc = {
        "lambda_max": l1,
        "lambda_min": l2,
        "n": opts["steps"],
        "transient": opts["transient"],
    }
    _emit(json.dumps(doc, indent=2), opts["out"])
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "scan": cmd_scan,
    "cycles": cmd_cycles,
    "regions": cmd_regions,
    "lyapunov": cmd_lyapunov,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=float, default=None, help="growth factor")
    common.add_argument("--beta", type=float, default=None, help="transmission strength")
    common.add_argument("--a", type=float, default=None, help="saturation coefficient")
    common.add_argument("--K", type=float, default=None, help="removed fraction per step")
    common.add_argument("--s0", type=float, default=None, help="initial susceptible mass")
    common.add_argument("--i0", type=float, default=None, help="initial infected mass")
    common.add_argument("--transient", type=int, default=None, help="discarded warm-up steps")
    common.add_argument("--steps", type=int, default=None, help="step / row count")
    common.add_argument("--seed", type=int, default=None, help="RNG seed")
    common.add_argument("--out", type=str, default=None, help="output file (default stdout)")
    common.add_argument("--preset", type=str, default=None, help="named parameter bundle")
    common.add_argument("--config", type=str, default=None, help="flat key=value option file")

    parser = argparse.ArgumentParser(
        prog="sirmap",
        description="Numerical laboratory for a planar SIR map with saturated incidence",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="iterate one orbit to CSV")
    sub.add_parser("analyze", parents=[common], help="fixed points, thresholds, normal forms")
    ps = sub.add_parser("scan", parents=[common], help="one-parameter attractor sweep to CSV")
    ps.add_argument("--param", type=str, default=None, choices=["r", "beta", "a", "K"])
    ps.add_argument("--lo", type=float, default=None, help="sweep start")
    ps.add_argument("--hi", type=float, default=None, help="sweep end")
    ps.add_argument("--keep", type=int, default=None, help="attractor samples per row")
    pc = sub.add_parser("cycles", parents=[common], help="axis period-n birth parameters")
    pc.add_argument("--n", type=int, default=None, help="cycle length (3..8)")
    pc.add_argument("--lo", type=float, default=None, help="window start")
    pc.add_argument("--hi", type=float, default=None, help="window end")
    pr = sub.add_parser("regions", parents=[common], help="positivity region + invariance probe")
    pr.add_argument("--samples", type=int, default=None, help="number of probe starts")
    sub.add_parser("lyapunov", parents=[common], help="Lyapunov exponents of one orbit")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _resolve(args)
        return _COMMANDS[args.command](opts)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
