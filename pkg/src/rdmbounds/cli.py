"""Command-line driver.

Subcommands: exact (ground-state diagonalization), bounds (certified
functional bounds at a 1-RDM), sweep (occupation scan to CSV), check
(membership verdict for a (W, gamma) pair), maxmin (bivariational
demonstration).  Exit codes: 0 success or representable, 1 not
representable, 2 input error, 3 non-convergence or infeasibility.
"""

from __future__ import annotations

import argparse
import ast
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .dualbounds import (
    BoundOptions,
    InadmissibleGammaError,
    lower_bound,
    upper_bound,
)
from .functionals import FunctionalPoint, coleman_check, hf_vee
from .integrals import FcidumpError, OneBodyOperator, builtin_model, read_fcidump
from .manybody import ManyBodyBasis, ground_state, one_rdm
from .nrepcheck import (
    InfeasibleConstraintsError,
    check_pair,
    cutting_plane,
    default_box,
    make_halfspace,
    max_min,
)

EXIT_OK = 0
EXIT_NOT_REPRESENTABLE = 1
EXIT_INPUT = 2
EXIT_NO_CONVERGENCE = 3

_MODEL_PARAMS = ("t", "u", "j11", "j22", "j12", "k12")


class CliInputError(ValueError):
    """Bad command-line input; mapped to exit code 2."""


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _load_system(args):
    if args.fcidump:
        return read_fcidump(args.fcidump)
    params = {
        name: getattr(args, name)
        for name in _MODEL_PARAMS
        if getattr(args, name, None) is not None
    }
    try:
        return builtin_model(args.model, **params)
    except ValueError as exc:
        raise CliInputError(str(exc)) from exc


def _parse_stanzas(text: str, path: str):
    stanzas = []
    current = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if current:
                stanzas.append(current)
                current = {}
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliInputError(f"{path}:{lineno}: expected 'key = value'")
        try:
            current[key.strip()] = ast.literal_eval(value.strip())
        except (ValueError, SyntaxError) as exc:
            raise CliInputError(f"{path}:{lineno}: {exc}") from exc
    if current:
        stanzas.append(current)
    return stanzas


def _gamma_from_fields(fields: dict, m: int, origin: str) -> np.ndarray:
    if "occupations" in fields:
        occ = np.asarray(fields["occupations"], dtype=float)
        if occ.ndim != 1 or len(occ) != m:
            raise CliInputError(f"{origin}: need {m} occupations")
        gamma = np.diag(occ)
    elif "matrix" in fields:
        gamma = np.asarray(fields["matrix"], dtype=float)
        if gamma.shape != (m, m):
            raise CliInputError(f"{origin}: matrix must be {m}x{m}")
    else:
        raise CliInputError(f"{origin}: expected 'occupations = [..]' or 'matrix = [[..]]'")
    if not np.allclose(gamma, gamma.T, atol=1e-10):
        raise CliInputError(f"{origin}: matrix must be symmetric")
    return gamma


def _load_gamma(args, spec) -> np.ndarray:
    m = spec.m_spatial
    if args.occupations is not None:
        try:
            occ = [float(tok) for tok in args.occupations.replace(",", " ").split()]
        except ValueError as exc:
            raise CliInputError(f"bad occupation list: {exc}") from exc
        gamma = _gamma_from_fields({"occupations": occ}, m, "--occupations")
    else:
        try:
            with open(args.gamma) as fh:
                stanzas = _parse_stanzas(fh.read(), args.gamma)
        except OSError as exc:
            raise CliInputError(str(exc)) from exc
        if len(stanzas) != 1:
            raise CliInputError(f"{args.gamma}: expected a single stanza")
        gamma = _gamma_from_fields(stanzas[0], m, args.gamma)
    verdict = coleman_check(gamma, spec.n_electrons)
    if not verdict.ok:
        raise CliInputError(f"1-RDM not admissible: {verdict.message}")
    return gamma


def _bound_options(args) -> BoundOptions:
    opts = BoundOptions()
    if getattr(args, "gap_tol", None) is not None:
        opts.gap_tol = args.gap_tol
    return opts


def cmd_exact(args) -> int:
    spec = _load_system(args)
    gs = ground_state(spec, args.lam)
    occ = np.sort(one_rdm(gs.ensemble(), gs.basis).occupations)[::-1]
    total = gs.energy + spec.core_energy
    if args.json:
        print(
            json.dumps(
                {
                    "e": total,
                    "e_electronic": gs.energy,
                    "core_energy": spec.core_energy,
                    "lambda": args.lam,
                    "degeneracy": gs.degeneracy,
                    "natural_occupations": [float(x) for x in occ],
                }
            )
        )
    else:
        print(f"E = {_fmt(total)}")
        if spec.core_energy:
            print(f"core energy = {_fmt(spec.core_energy)} (included in E)")
        print(f"degeneracy = {gs.degeneracy}")
        print("natural occupations: " + " ".join(_fmt(x) for x in occ))
    return EXIT_OK


def cmd_bounds(args) -> int:
    spec = _load_system(args)
    gamma = _load_gamma(args, spec)
    opts = _bound_options(args)
    basis = ManyBodyBasis.from_spec(spec)
    lb = lower_bound(gamma, spec, opts, basis=basis)
    ub = upper_bound(gamma, spec, opts, basis=basis)
    if args.dump_witness:
        with open(args.dump_witness, "w") as fh:
            fh.write(f"lower_potential = {lb.optimal_potential.matrix.tolist()!r}\n")
            fh.write(f"upper_potential = {ub.optimal_potential.matrix.tolist()!r}\n")
    if args.json:
        print(
            json.dumps(
                {
                    "lb": lb.value,
                    "ub": ub.value,
                    "gap_lb": lb.duality_gap,
                    "gap_ub": ub.duality_gap,
                    "residual_lb": lb.residual,
                    "residual_ub": ub.residual,
                    "converged": lb.converged and ub.converged,
                    "lower_potential": lb.optimal_potential.matrix.tolist(),
                    "upper_potential": ub.optimal_potential.matrix.tolist(),
                }
            )
        )
    else:
        print(f"lb = {_fmt(lb.value)}")
        print(f"ub = {_fmt(ub.value)}")
        print(f"gap_lb = {_fmt(lb.duality_gap)}")
        print(f"gap_ub = {_fmt(ub.duality_gap)}")
        if not (lb.converged and ub.converged):
            print("warning: bound certificates did not converge", file=sys.stderr)
    return EXIT_OK if lb.converged and ub.converged else EXIT_NO_CONVERGENCE


def cmd_sweep(args) -> int:
    spec = _load_system(args)
    if spec.m_spatial != 2:
        raise CliInputError("sweep requires a two-orbital system")
    opts = _bound_options(args)
    basis = ManyBodyBasis.from_spec(spec)
    eps = 1e-8
    grid = np.linspace(eps, 2.0 - eps, args.points)

    def one_row(n: float):
        gamma = np.diag([n, 2.0 - n])
        lb = lower_bound(gamma, spec, opts, basis=basis)
        ub = upper_bound(gamma, spec, opts, basis=basis)
        hf = hf_vee(gamma, spec.v)
        ok = lb.converged and ub.converged
        return (n, lb.value, ub.value, hf, lb.duality_gap, ub.duality_gap), ok

    workers = max(1, min(8, args.points, os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one_row, grid))
    lines = ["n,lb,ub,hf,gap_lb,gap_ub"]
    all_ok = True
    for row, ok in results:
        all_ok = all_ok and ok
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not all_ok:
        print("warning: some rows did not certify", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def cmd_check(args) -> int:
    spec = _load_system(args)
    gamma = _load_gamma(args, spec)
    if args.w is not None:
        w = args.w
    else:
        w = hf_vee(gamma, spec.v)
    verdict = check_pair(
        FunctionalPoint(w=w, gamma=gamma), spec, tol=args.tol,
        options=_bound_options(args),
    )
    payload = {
        "w": w,
        "representable": verdict.representable,
        "conclusive": verdict.conclusive,
        "lb": verdict.lb,
        "ub": verdict.ub,
        "message": verdict.message,
    }
    if verdict.witness is not None:
        hs, margin = verdict.witness
        payload["witness"] = {
            "lambda": hs.lam,
            "rhs": hs.rhs,
            "margin": margin,
            "potential": hs.h_tilde.matrix.tolist(),
        }
    if args.json:
        print(json.dumps(payload))
    else:
        state = "representable" if verdict.representable else "not representable"
        if not verdict.conclusive:
            state += " (inconclusive)"
        print(state)
        print(f"W = {_fmt(w)}")
        print(f"lb = {_fmt(verdict.lb)}")
        print(f"ub = {_fmt(verdict.ub)}")
        if verdict.witness is not None:
            hs, margin = verdict.witness
            print(f"witness: lambda = {_fmt(hs.lam)}, margin = {_fmt(margin)}")
            print(f"witness rhs = {_fmt(hs.rhs)}")
            for row in hs.h_tilde.matrix:
                print("  " + " ".join(_fmt(x) for x in row))
    if not verdict.conclusive:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK if verdict.representable else EXIT_NOT_REPRESENTABLE


def _load_witnesses(path: str, spec, lam: float):
    try:
        with open(path) as fh:
            stanzas = _parse_stanzas(fh.read(), path)
    except OSError as exc:
        raise CliInputError(str(exc)) from exc
    if not stanzas:
        raise CliInputError(f"{path}: no half-space stanzas found")
    out = []
    m = spec.m_spatial
    for idx, fields in enumerate(stanzas, 1):
        if "matrix" not in fields:
            raise CliInputError(f"{path}: stanza {idx} needs 'matrix = [[..]]'")
        mat = np.asarray(fields["matrix"], dtype=float)
        if mat.shape != (m, m):
            raise CliInputError(f"{path}: stanza {idx}: matrix must be {m}x{m}")
        hs_lam = float(fields.get("lambda", lam))
        out.append(make_halfspace(OneBodyOperator(mat), hs_lam, spec))
    return out


def cmd_maxmin(args) -> int:
    spec = _load_system(args)
    if abs(abs(args.lam) - 1.0) > 1e-12:
        raise CliInputError("maxmin requires --lambda +1 or -1")
    box = tuple(args.box) if args.box else default_box(spec)
    target = ground_state(spec, args.lam).energy
    rounds = []
    if args.auto:
        history = cutting_plane(spec, args.lam, rounds=args.auto, box=box)
        rounds = [
            {
                "round": cr.index,
                "constraints": cr.n_constraints,
                "value": cr.value,
                "gap": cr.gap,
            }
            for cr in history
        ]
    elif args.witness_file:
        halfspaces = _load_witnesses(args.witness_file, spec, args.lam)
        for k in range(1, len(halfspaces) + 1):
            value, _ = max_min(spec, args.lam, halfspaces[:k], box)
            rounds.append(
                {
                    "round": k,
                    "constraints": k,
                    "value": value,
                    "gap": target - value,
                }
            )
    else:
        value, _ = max_min(spec, args.lam, [], box)
        rounds.append(
            {"round": 1, "constraints": 0, "value": value, "gap": target - value}
        )
    if args.json:
        print(json.dumps({"target": target, "box": list(box), "rounds": rounds}))
    else:
        print(f"target E = {_fmt(target)}")
        print(f"box = [{_fmt(box[0])}, {_fmt(box[1])}]")
        for r in rounds:
            print(
                f"round {r['round']}: constraints={r['constraints']} "
                f"value={_fmt(r['value'])} gap={_fmt(r['gap'])}"
            )
    return EXIT_OK


def _add_system_flags(p):
    p.add_argument("--model", choices=("hubbard_dimer", "model_a"),
                   default="hubbard_dimer", help="bundled model system")
    p.add_argument("--fcidump", help="read the system from an FCIDUMP file")
    p.add_argument("--t", "--T", dest="t", type=float, default=None,
                   help="hopping (hubbard_dimer)")
    p.add_argument("--u", "--U", dest="u", type=float, default=None,
                   help="on-site repulsion (hubbard_dimer)")
    p.add_argument("--j11", "--J11", dest="j11", type=float, default=None)
    p.add_argument("--j22", "--J22", dest="j22", type=float, default=None)
    p.add_argument("--j12", "--J12", dest="j12", type=float, default=None)
    p.add_argument("--k12", "--K12", dest="k12", type=float, default=None)
    p.add_argument("--seed", type=int, default=0,
                   help="seed for any stochastic component")
    p.add_argument("--json", action="store_true", help="structured-text output")


def _add_gamma_flags(p):
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--gamma", help="1-RDM file: 'occupations = [..]' or "
                     "'matrix = [[..]]'")
    grp.add_argument("--occupations", help="inline occupation list, e.g. '1,1'")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdmbounds",
        description="Certified bounds and representability tests for the "
        "interaction-energy functional of a one-electron reduced density matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="ground-state diagonalization")
    _add_system_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="interaction strength")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("bounds", help="certified bounds at a 1-RDM")
    _add_system_flags(p)
    _add_gamma_flags(p)
    p.add_argument("--gap-tol", type=float, default=None,
                   help="duality-gap tolerance (default 1e-6)")
    p.add_argument("--dump-witness", help="write the optimal potentials here")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="occupation sweep to CSV")
    _add_system_flags(p)
    p.add_argument("--points", type=int, default=41, help="number of grid points")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.add_argument("--gap-tol", type=float, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("check", help="membership test for (W, gamma)")
    _add_system_flags(p)
    _add_gamma_flags(p)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--w", type=float, help="candidate functional value")
    grp.add_argument("--functional", choices=("hf",),
                     help="evaluate a named candidate functional at gamma")
    p.add_argument("--tol", type=float, default=1e-6,
                   help="membership tolerance (>= duality-gap tolerance)")
    p.add_argument("--gap-tol", type=float, default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("maxmin", help="bivariational max-min demonstration")
    _add_system_flags(p)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="interaction sign, +1 or -1")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--witness-file", help="half-space stanzas: 'matrix = [[..]]' "
                     "plus optional 'lambda = ..', blank-line separated")
    grp.add_argument("--auto", type=int, metavar="K",
                     help="run K cutting-plane rounds")
    p.add_argument("--box", type=float, nargs=2, metavar=("LO", "HI"),
                   help="W interval (default derived from the system)")
    p.set_defaults(func=cmd_maxmin)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FcidumpError, InadmissibleGammaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleConstraintsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
