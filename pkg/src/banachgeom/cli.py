"""Batch front end.

Verbs: check, defect-table, borel, knocerrado, asymptotics, crossval.
Reports are TSV with a leading '#' comment block that records every level
parameter; identical invocations produce byte-identical output. Exit codes:
0 pass, 1 a property check failed, 2 usage or spec-file errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import borel, checkers, oracles
from .codes import encode_space
from .dual import verify_k_counterexample
from .errors import BanachGeomError, SpecFileError
from .spaces import (
    builtin_space,
    dual_ball_vertices,
    dual_norm_eval,
    is_polytopal,
    lp_space,
    norm_eval,
)
from .specfile import load_code, load_space

PROPERTIES = ("ld2p", "dp", "dld2p", "d2p", "dd2p", "sd2p", "loh", "oh", "woh", "woh-szlenk")


def _resolve_space(target):
    if ":" in target and not target.endswith((".txt", ".spec")):
        try:
            return builtin_space(target)
        except BanachGeomError:
            pass
    return load_space(target)


def _report(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _head(cmd, **params):
    lines = [f"# banachgeom {cmd}"]
    for k in sorted(params):
        lines.append(f"# {k}\t{params[k]}")
    return lines


def _run_property(space, prop, args):
    eps = args.eps
    budget = args.budget
    if prop == "ld2p":
        return checkers.ldp_check(space, args.delta, eps, budget=budget, hull_tol=args.tol or 0.1)
    if prop == "dp":
        return checkers.dp_check(space, eps, budget=budget, hull_tol=args.tol or 0.1)
    if prop == "dld2p":
        return checkers.dld2p_check(space, eps, budget=budget, hull_tol=args.tol or 0.1)
    if prop == "d2p":
        return checkers.d2p_check(space, eps, budget=budget)
    if prop == "dd2p":
        return checkers.dd2p_check(space, eps, budget=budget)
    if prop == "sd2p":
        k = min(space.dim, 3)
        eye = np.eye(space.dim)[:k]
        vecs = eye / np.array([norm_eval(space, e) for e in eye])[:, None]
        return checkers.sd2p_check(space, vecs, eps, budget=budget)
    if prop == "loh":
        return checkers.loh_check(space, eps, budget=budget)
    if prop == "oh":
        return checkers.oh_check(space, eps, budget=budget)
    if prop == "woh":
        return checkers.woh_direct_check(space, eps, budget=budget)
    if prop == "woh-szlenk":
        code = encode_space(space, "basis")
        return checkers.woh_szlenk_check(code, level=min(space.dim, 4), budget=budget, delta=args.delta)
    raise BanachGeomError(f"unknown property {prop!r}")


def _cmd_check(args):
    space = _resolve_space(args.space)
    verdict = _run_property(space, args.property, args)
    lines = _head("check", space=space.label(), property=args.property, eps=args.eps, budget=args.budget)
    lines += verdict.to_lines(args.property)
    _report(lines, args.out)
    return 0 if verdict.passed else 1


def _cmd_defect_table(args):
    space = _resolve_space(args.space)
    props = args.properties.split(",") if args.properties else ["ld2p", "dp", "dld2p", "sd2p", "loh", "oh", "woh"]
    lines = _head("defect-table", space=space.label(), eps=args.eps)
    lines.append("property\tverdict\tdefect")
    status = 0
    for prop in props:
        verdict = _run_property(space, prop.strip(), args)
        lines.append(f"{prop}\t{'pass' if verdict.passed else 'fail'}\t{verdict.defect:.9g}")
        status |= 0 if verdict.passed else 1
    _report(lines, args.out)
    return status


def _cmd_borel(args):
    if args.code:
        code = load_code(args.code)
    else:
        code = encode_space(_resolve_space(args.space), "basis")
    gs = borel.default_g_tuple(code, level=args.depth, count=args.ng)
    level = borel.LevelSpec(
        m_max=args.mmax, k_max=args.kmax, p_max=args.pmax,
        search_depth=args.depth, g_tuple=gs, delta=args.delta,
    )
    lines = _head(
        "borel", code=code.label(), formula=args.formula,
        m_max=args.mmax, k_max=args.kmax, p_max=args.pmax, depth=args.depth, ng=args.ng,
    )
    if args.profile:
        depths = [int(tok) for tok in args.profile.split(",")]
        schedule = [
            borel.LevelSpec(args.mmax, args.kmax, args.pmax, d,
                            borel.default_g_tuple(code, level=d, count=args.ng), args.delta)
            for d in depths
        ]
        rows, flip = borel.level_profile(code, args.formula, schedule)
        lines.append("depth\tverdict\tdefect")
        for d, v in zip(depths, rows):
            lines.append(f"{d}\t{'pass' if v.passed else 'fail'}\t{v.defect:.9g}")
        lines.append(f"# first_flip\t{flip if flip is not None else 'none'}")
        _report(lines, args.out)
        return 0 if rows[-1].passed else 1
    verdict = borel.formula_eval(code, args.formula, level)
    lines += verdict.to_lines(args.formula)
    _report(lines, args.out)
    return 0 if verdict.passed else 1


def _cmd_knocerrado(args):
    report = verify_k_counterexample(
        levels=args.levels, n_max=args.nmax, tol=args.tol if args.tol is not None else 1e-8,
        depth=args.depth,
    )
    lines = _head("knocerrado", nmax=args.nmax, levels=args.levels)
    lines += report.to_text().splitlines()
    _report(lines, args.out)
    return 0 if report.all_pass else 1


def _cmd_asymptotics(args):
    lo, hi = (int(tok) for tok in args.range.split(":"))
    if hi < lo:
        raise BanachGeomError("empty range")
    family = {"linf": lambda n: lp_space(np.inf, n), "l1": lambda n: lp_space(1, n)}[args.family]
    lines = _head("asymptotics", family=args.family, range=args.range, property=args.property, eps=args.eps)
    lines.append("n\tverdict\tdefect")
    defects = []
    for n in range(lo, hi + 1):
        space = family(n)
        if args.property == "oh":
            k = max(1, n - 1)
            eye = np.eye(n)[:k]
            grids = [np.vstack([eye, -eye])]
            verdict = checkers.oh_check(space, args.eps, subspace_grids=grids, budget=args.budget)
        elif args.property == "woh-szlenk":
            code = encode_space(space, "basis")
            verdict = checkers.woh_szlenk_check(code, level=min(n, 4), budget=args.budget, delta=args.delta)
        else:
            verdict = _run_property(space, args.property, args)
        defects.append(verdict.defect)
        lines.append(f"{n}\t{'pass' if verdict.passed else 'fail'}\t{verdict.defect:.9g}")
    monotone = all(b <= a + 1e-9 for a, b in zip(defects, defects[1:]))
    lines.append(f"# defects_non_increasing\t{monotone}")
    _report(lines, args.out)
    return 0


def _cmd_crossval(args):
    space = _resolve_space(args.space)
    lines = _head("crossval", space=space.label(), samples=args.samples, band=args.band)
    lines.append("check\tlp_value\toracle\thalf_width\tok")
    ok_all = True
    f = dual_ball_vertices(space)[0] if is_polytopal(space) else np.eye(space.dim)[0]
    f = f / dual_norm_eval(space, f)
    rows = [
        ("slice", checkers.slice_diameter(space, f, 0.5), oracles.slice_region(space, f, 0.5)),
        (
            "weak_open",
            checkers.weak_open_diameter(space, checkers.WeakOpenSpec(np.zeros(space.dim), [f], 0.5)),
            oracles.weak_open_region(space, np.zeros(space.dim), [f], 0.5),
        ),
        (
            "cc",
            checkers.cc_slice_diameter(space, [checkers.SliceSpec(f, 0.5), checkers.SliceSpec(-f, 0.5)], [0.5, 0.5]),
            None,
        ),
    ]
    for name, value, region in rows:
        if region is None:
            lines.append(f"{name}\t{value:.9g}\t-\t-\tskipped")
            continue
        rep = oracles.sample_diameter(space, region, args.samples)
        ok = oracles.crossvalidate(value, rep, args.band)
        ok_all &= ok
        lines.append(f"{name}\t{value:.9g}\t{rep.estimate:.9g}\t{rep.half_width:.3g}\t{ok}")
    _report(lines, args.out)
    return 0 if ok_all else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="banachgeom", description=__doc__)
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--eps", type=float, default=0.5)
        p.add_argument("--delta", type=float, default=2.0)
        p.add_argument("--budget", type=int, default=64)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--depth", type=int, default=200)
        p.add_argument("--out", default=None)

    p = sub.add_parser("check", help="run one property checker")
    p.add_argument("--property", required=True, choices=PROPERTIES)
    p.add_argument("--space", required=True, help="builtin (linf:2, l1:3, l2:2, lp:3:4) or spec file")
    common(p)
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("defect-table", help="all properties on one space")
    p.add_argument("--space", required=True)
    p.add_argument("--properties", default=None)
    common(p)
    p.set_defaults(fn=_cmd_defect_table)

    p = sub.add_parser("borel", help="evaluate a transcribed formula")
    p.add_argument("--formula", required=True, choices=borel.FORMULA_IDS)
    p.add_argument("--space", default=None)
    p.add_argument("--code", default=None, help="code spec file")
    p.add_argument("--mmax", type=int, default=4)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--pmax", type=int, default=4)
    p.add_argument("--ng", type=int, default=2)
    p.add_argument("--profile", default=None, help="comma list of depths")
    common(p)
    p.set_defaults(fn=_cmd_borel)

    p = sub.add_parser("knocerrado", help="verify the non-closedness example")
    p.add_argument("--nmax", type=int, default=20)
    p.add_argument("--levels", type=int, default=30)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_knocerrado)

    p = sub.add_parser("asymptotics", help="defect trend over a space family")
    p.add_argument("--family", required=True, choices=("linf", "l1"))
    p.add_argument("--range", required=True, help="lo:hi inclusive")
    p.add_argument("--property", required=True, choices=PROPERTIES)
    common(p)
    p.set_defaults(fn=_cmd_asymptotics)

    p = sub.add_parser("crossval", help="LP checkers vs sampling oracles")
    p.add_argument("--space", required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--band", type=float, default=0.02)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_crossval)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (SpecFileError, FileNotFoundError, BanachGeomError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
