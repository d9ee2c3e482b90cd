"""Command-line front end: ``optslater <command> ...``.

Every command prints one JSON document on stdout. Floats carry 15
significant digits and complex numbers are written as ``[re, im]``.
Errors go to stderr as a single line and the exit status is 1.
"""

import argparse
import hashlib
import json
from pathlib import Path
import sys

import numpy as np

from . import fstio
from .catalog import BUILTINS, builtin_state
from .errors import OptSlaterError
from .optimizer import OptimizerConfig, optimize_slater, optimize_subspace
from .rdm import borland_dennis_check, envelope_rank, natural_orbitals, one_particle_rdm
from .reductions import Leaf, decompose_full, find_certain_orbitals, find_simultaneous_pairs
from .three_in_six import canonicalize36, verify_bd_blocks

SCHEMA_VERSION = 1


def _num(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [_num(x.real), _num(x.imag)]
    return float(f"{float(x):.15g}")


def jsonable(obj):
    """Convert report values to plain JSON types with 15-digit floats."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, complex, np.floating, np.complexfloating)):
        return _num(obj)
    return obj


def _columns(F):
    return [F[:, c] for c in range(F.shape[1])]


def read_state(source, normalize_on_load=False):
    """Load a state from an .fst path, or from ``builtin:NAME`` (e.g. ``builtin:eq36``)."""
    if str(source).startswith("builtin:"):
        state = builtin_state(str(source)[len("builtin:"):])
        text = fstio.dumps(state)
    else:
        text = Path(source).read_text()
        state = fstio.loads(text, normalize_on_load=normalize_on_load)
    digest = {
        "source": str(source),
        "d": state.d,
        "N": state.n,
        "terms": len(state.amplitudes),
        "norm": state.norm(),
        "sha256": hashlib.sha256(text.encode()).hexdigest(),
    }
    return state, digest


def _config(args):
    return OptimizerConfig(restarts=args.restarts, tol=args.tol, seed=args.seed, workers=args.workers)


def _bd(state):
    if (state.n, state.d) != (3, 6):
        return None
    rep = borland_dennis_check(natural_orbitals(one_particle_rdm(state)))
    return {"sums": rep.sums, "inequality_slack": rep.inequality_slack,
            "satisfied": rep.satisfied, "tolerance": rep.tolerance}


def cmd_analyze(args):
    state, digest = read_state(args.path, args.normalize)
    rho = one_particle_rdm(state)
    dec = natural_orbitals(rho)
    return {
        "command": "analyze",
        "input": digest,
        "occupations": dec.occupations,
        "rdm": rho,
        "envelope_rank": envelope_rank(state),
        "borland_dennis": _bd(state),
        "certain_orbitals": find_certain_orbitals(state),
        "simultaneous_pairs": find_simultaneous_pairs(state),
    }


def _reduction_summary(tree, cfg):
    return {"leaves": len(tree.leaves()), "imax": tree.imax(cfg), "tree": tree.describe(cfg)}


def cmd_approximate(args):
    state, digest = read_state(args.path, args.normalize)
    cfg = _config(args)
    M = state.n if args.rank is None else args.rank
    reduction = None
    if M == state.n:
        tree = decompose_full(state)
        if not isinstance(tree.root, Leaf):
            value, frame = tree.solve(cfg)
            reduction = _reduction_summary(tree, cfg)
            result = {"value": value, "iterations": None, "restarts_used": None,
                      "converged": True, "via": "reduction"}
        else:
            res = optimize_slater(state, cfg)
            frame = res.frame
            result = {"value": res.value, "iterations": res.iterations,
                      "restarts_used": res.restarts_used, "converged": res.converged, "via": "sweep"}
    else:
        res = optimize_subspace(state, M, cfg)
        frame = res.frame
        result = {"value": res.value, "iterations": res.iterations,
                  "restarts_used": res.restarts_used, "converged": res.converged, "via": "subspace"}
    result["rank"] = M
    result["frame"] = _columns(frame)
    return {"command": "approximate", "input": digest, "approximation": result, "reduction": reduction}


def cmd_canonical36(args):
    state, digest = read_state(args.path, args.normalize)
    res = optimize_slater(state, _config(args))
    cf = canonicalize36(state, res.frame)
    blocks = verify_bd_blocks(cf)
    labels = ["e1", "e2", "e3", "h1", "h2", "h3"]
    return {
        "command": "canonical36",
        "input": digest,
        "imax": res.value,
        "canonical_form": {
            "basis": {k: cf.basis[:, i] for i, k in enumerate(labels)},
            "coefficients": dict(zip("ABCDE", cf.coeffs)),
            "forbidden_max": cf.forbidden_max,
            "reconstruction_error": (cf.reconstruct() - state).norm(),
        },
        "blocks": {"matrices": blocks.blocks, "traces": blocks.traces,
                   "eigenvalues": blocks.eigenvalues, "unit_trace": blocks.ok},
        "borland_dennis": _bd(state),
    }


def cmd_reduce(args):
    state, digest = read_state(args.path, args.normalize)
    cfg = _config(args)
    tree = decompose_full(state)
    return {"command": "reduce", "input": digest, "reduction": _reduction_summary(tree, cfg)}


def cmd_ensemble(args):
    from .ensemble import run_ensemble

    cfg = _config(args).replace(workers=1)
    rep = run_ensemble(args.N, args.d, args.samples, cfg, workers=args.workers,
                       seed=args.seed, csv_path=args.csv)
    out = {"command": "ensemble", "ensemble": rep.summary()}
    if args.csv:
        out["csv"] = str(args.csv)
    return out


def cmd_examples(args):
    names = [args.name] if args.name else list(BUILTINS)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in names:
        state = builtin_state(name)
        key = name.split("(", 1)[0].strip().lower()
        path = out / f"{key}.fst"
        fstio.dump(state, path, comment=f"builtin {name}")
        written.append({"name": name, "path": str(path), "d": state.d, "N": state.n})
    return {"command": "examples", "written": written}


def build_parser():
    p = argparse.ArgumentParser(prog="optslater", description="Optimal Slater-determinant approximation of fermion states.")
    sub = p.add_subparsers(dest="command", required=True)

    def state_cmd(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("path", help=".fst file, or builtin:NAME")
        sp.add_argument("--normalize", action="store_true", help="normalize the state on load")
        sp.set_defaults(fn=fn)
        return sp

    def opt_flags(sp):
        sp.add_argument("--restarts", type=int, default=32)
        sp.add_argument("--tol", type=float, default=1e-12)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)

    state_cmd("analyze", cmd_analyze, "occupations, density matrix and structure")
    sp = state_cmd("approximate", cmd_approximate, "best determinant or rank-M subspace")
    sp.add_argument("--rank", type=int, default=None, help="subspace dimension M (default N)")
    opt_flags(sp)
    opt_flags(state_cmd("canonical36", cmd_canonical36, "canonical form of a 3-in-6 state"))
    opt_flags(state_cmd("reduce", cmd_reduce, "reduction tree"))

    sp = sub.add_parser("ensemble", help="smallest optimal overlap over random states")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--csv", default=None, help="write sample_index,seed,value rows here")
    opt_flags(sp)
    sp.set_defaults(fn=cmd_ensemble)

    sp = sub.add_parser("examples", help="write builtin states as .fst files")
    sp.add_argument("--name", default=None, help="one builtin (default: all)")
    sp.add_argument("--out", default=".")
    sp.set_defaults(fn=cmd_examples)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        report = args.fn(args)
    except (OptSlaterError, OSError, ValueError, KeyError) as exc:
        msg = str(exc).strip("'\"").splitlines()[0] if str(exc) else type(exc).__name__
        print(f"optslater: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    json.dump(jsonable(report), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
