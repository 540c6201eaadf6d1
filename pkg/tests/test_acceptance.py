"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -s` to see the criterion lines.
"""

import time

import numpy as np

from banachgeom import borel, checkers as K, oracles as O
from banachgeom.cli import main as cli_main
from banachgeom.codes import encode_space
from banachgeom.dual import verify_k_counterexample
from banachgeom.spaces import lp_space, norm_eval_many

from corpus import corpus_spaces, normalized_functional

CORPUS = corpus_spaces(50)

_HULL_TOL = 0.1
_hull_cache = {}


def _record(num, ok, detail):
    print(f"\nACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def _hull_verdicts(space):
    key = id(space)
    if key not in _hull_cache:
        _hull_cache[key] = {
            "ld2p": K.ldp_check(space, 2.0, 0.5, hull_tol=_HULL_TOL),
            "dp": K.dp_check(space, 0.5, hull_tol=_HULL_TOL),
            "dld2p": K.dld2p_check(space, 0.5, hull_tol=_HULL_TOL),
        }
    return _hull_cache[key]


def test_criterion_1_knocerrado():
    t0 = time.time()
    report = verify_k_counterexample(levels=30, n_max=20, tol=1e-8, depth=30)
    elapsed = time.time() - t0
    slack = max(row["max_defect"] for row in report.membership_rows)
    totals = [row["total"] for row in report.distance_rows]
    monotone = all(b <= a + 1e-8 for a, b in zip(totals, totals[1:]))
    assign_final = report.distance_rows[-1]["g"]
    limit = report.limit_row
    cli_status = cli_main(["knocerrado", "--nmax", "20", "--levels", "30", "--out", "/dev/null"])
    ok = (
        report.clause_members
        and slack <= 1e-8
        and report.clause_convergence
        and monotone
        and assign_final < 1e-4
        and report.clause_limit_fails
        and limit["mu_e1"] == 0.0
        and limit["g_e1"] == 1.0
        and cli_status == 0
        and elapsed < 10.0
    )
    _record(
        1, ok,
        f"members slack={slack:.2e}, assignment distance at n=20 {assign_final:.2e} "
        f"(seminorm component {report.distance_rows[-1]['mu']:.3f}), limit fails via "
        f"mu(e1)={limit['mu_e1']}, g(e1)={limit['g_e1']}, {elapsed:.1f}s",
    )


def test_criterion_2_exact_slice_geometry():
    t0 = time.time()
    d_linf = K.slice_diameter(lp_space(np.inf, 2), [1, 0], 0.5)
    t1 = time.time()
    d_l2 = K.slice_diameter(lp_space(2, 2), [1, 0], 0.5)
    t2 = time.time()
    d_l1 = K.slice_diameter(lp_space(1, 2), [1, 0], 0.25)
    t3 = time.time()
    ok = (
        d_linf == 2.0
        and abs(d_l2 - np.sqrt(3)) <= 1e-3
        and abs(d_l1 - 0.5) <= 1e-9
        and (t1 - t0) < 1.0 and (t2 - t1) < 1.0 and (t3 - t2) < 1.0
    )
    _record(2, ok, f"linf2={d_linf}, l2={d_l2:.6f} (sqrt3 err {abs(d_l2 - np.sqrt(3)):.1e}), l1={d_l1}")


def test_criterion_3_daugavet_defect():
    t0 = time.time()
    golden = (1 + np.sqrt(5)) / 2
    d_l2 = K.daugavet_defect_rank1(lp_space(2, 2), [1, 0], [0, 1])
    d_linf = K.daugavet_defect_rank1(lp_space(np.inf, 2), [1, 0], [0, 1])
    elapsed = time.time() - t0
    ok = abs(d_l2 - (2 - golden)) <= 1e-6 and abs(d_linf) <= 1e-9 and elapsed < 1.0
    _record(3, ok, f"l2 defect={d_l2:.9f} vs {2 - golden:.9f}, linf defect={d_linf:.2e}, {elapsed:.2f}s")


def test_criterion_4_oracle_equivalence():
    t0 = time.time()
    band = 0.02
    failures = []
    for i, space in enumerate(CORPUS):
        alpha = 0.5 if i % 2 else 0.25
        delta = 0.5 if i % 3 else 0.3
        f1 = normalized_functional(space, space.rows[0])
        f2 = normalized_functional(space, space.rows[1])

        lp_slice = K.slice_diameter(space, f1, alpha)
        rep = O.sample_diameter(space, O.slice_region(space, f1, alpha), 100000)
        if not (rep.estimate <= lp_slice + 1e-9 and O.crossvalidate(lp_slice, rep, band)):
            failures.append((i, "slice", lp_slice, rep.estimate, rep.half_width))

        u = K.WeakOpenSpec(np.zeros(space.dim), [f1, f2], delta)
        lp_weak = K.weak_open_diameter(space, u)
        rep = O.sample_diameter(
            space, O.weak_open_region(space, np.zeros(space.dim), [f1, f2], delta), 100000
        )
        if not (rep.estimate <= lp_weak + 1e-9 and O.crossvalidate(lp_weak, rep, band)):
            failures.append((i, "weak", lp_weak, rep.estimate, rep.half_width))

        slices = [K.SliceSpec(f1, alpha), K.SliceSpec(f2, alpha)]
        lp_cc = K.cc_slice_diameter(space, slices, [0.5, 0.5])
        rep = O.cc_sample_diameter(
            space,
            [O.slice_region(space, f1, alpha), O.slice_region(space, f2, alpha)],
            [0.5, 0.5],
            100000,
        )
        if not (rep.estimate <= lp_cc + 1e-9 and O.crossvalidate(lp_cc, rep, band)):
            failures.append((i, "cc", lp_cc, rep.estimate, rep.half_width))
    elapsed = time.time() - t0
    ok = not failures and elapsed < 300.0
    _record(4, ok, f"{3 * len(CORPUS)} comparisons on 50 spaces, failures={failures[:4]}, {elapsed:.0f}s")


def test_criterion_5_hull_characterisation_fidelity():
    t0 = time.time()
    mismatches = []
    borderline = 0
    for i, space in enumerate(CORPUS):
        for name, verdict in _hull_verdicts(space).items():
            w = verdict.witness
            z = w.get("z") if w.get("z") is not None else w.get("x")
            gens = w.get("generators")
            if gens is None or not len(gens):
                mismatches.append((i, name, "no generators"))
                continue
            fw = O.hull_distance_oracle(space, z, gens)
            lp_side = verdict.defect > _HULL_TOL
            fw_side = fw > _HULL_TOL
            comparable = abs(verdict.defect - _HULL_TOL) > 0.05 and abs(fw - _HULL_TOL) > 0.05
            if not comparable:
                borderline += 1
                continue
            if lp_side != fw_side:
                mismatches.append((i, name, verdict.defect, fw))
    elapsed = time.time() - t0
    ok = not mismatches
    _record(
        5, ok,
        f"{3 * len(CORPUS)} verdicts, mismatches={mismatches[:4]}, borderline skipped={borderline}, {elapsed:.0f}s",
    )


def test_criterion_6_asymptotic_trends():
    t0 = time.time()
    ldp_defects = {}
    for n in (8, 12, 16):
        ldp_defects[n] = K.ldp_check(lp_space(np.inf, n), 2.0, 0.5, hull_tol=0.1).defect
    ldp_ok = all(d <= 0.1 for d in ldp_defects.values())

    oh_ok = True
    for n in range(3, 9):
        eye = np.eye(n)[: n - 1]
        grid = np.vstack([eye, -eye])
        verdict = K.oh_check(lp_space(1, n), 0.01, subspace_grids=[grid])
        oh_ok &= verdict.passed and verdict.defect == 0.0

    fracs = []
    for n in range(2, 17):
        code = encode_space(lp_space(1, n), "basis")
        v = K.woh_szlenk_check(code, level=min(n, 4), budget=256, k=2, delta=0.5)
        fracs.append(v.witness["value"])
    szlenk_ok = all(b >= a - 1e-12 for a, b in zip(fracs, fracs[1:]))

    elapsed = time.time() - t0
    ok = ldp_ok and oh_ok and szlenk_ok
    _record(
        6, ok,
        f"linf ldp defects {ldp_defects}, l1 oh exact zeros={oh_ok}, "
        f"szlenk fractions {fracs[0]:.2f}->{fracs[-1]:.2f} monotone={szlenk_ok}, {elapsed:.0f}s",
    )


# --- criterion 7: formula transcription fidelity -------------------------


def _matched_d2p(ctx, lvl):
    eps, delta = 1.0 / lvl.m_max, 1.0 / lvl.k_max
    if any(not m for m in ctx.members):
        return True
    for ui in ctx.u_universe():
        centers = [(ctx.witness_f[i], float(ctx.f_vals[i][ui])) for i in range(len(ctx.f_vals))]
        u_spec = K.WeakOpenSpec(np.zeros(ctx.base.dim), [c[0] for c in centers], 1.0)
        cons = []
        for f, at_u in centers:
            cons.append((f, delta - 1e-7 + at_u))
            cons.append((-f, delta - 1e-7 - at_u))
        try:
            diam = K.region_diameter(ctx.base, cons, budget=8192)
        except Exception:
            diam = 0.0
        if not diam > 2.0 - eps:
            return False
    return True


def _matched_point_clause(ctx, lvl, need_u_in_slice):
    alphas = borel._alpha_grid(lvl.k_max)
    for gi in range(len(lvl.g_tuple)):
        if not ctx.members[gi]:
            continue
        fv = ctx.f_vals[gi]
        c = ctx.witness_f[gi]
        for ui in ctx.u_universe():
            if need_u_in_slice:
                live = [a for a in alphas if fv[ui] > float(a)]
                if not live:
                    continue
                alpha = max(live)
            else:
                alpha = borel._best_alpha(ctx, fv, alphas)
                if alpha is None:
                    continue
            thr = 2.0 * ctx.mu[ui] - 1.0 / lvl.m_max
            if thr <= 0:
                continue
            cons = [(-c, -(float(alpha) + 1e-7))]
            try:
                sup = K.farthest_in_region(ctx.base, ctx.reps[ui], cons, budget=8192)
            except Exception:
                sup = 0.0
            if not sup > thr:
                return False
    return True


def _matched_dd2p(ctx, lvl):
    if any(not m for m in ctx.members):
        return True
    delta = 1.0 / lvl.k_max
    for ui in ctx.u_universe():
        thr = 2.0 * ctx.mu[ui] - 1.0 / lvl.m_max
        if thr <= 0:
            continue
        cons = []
        for i in range(len(ctx.f_vals)):
            f, at_u = ctx.witness_f[i], float(ctx.f_vals[i][ui])
            cons.append((f, delta - 1e-7 + at_u))
            cons.append((-f, delta - 1e-7 - at_u))
        try:
            sup = K.farthest_in_region(ctx.base, ctx.reps[ui], cons, budget=8192)
        except Exception:
            sup = 0.0
        if not sup > thr:
            return False
    return True


def _matched_ld2p(ctx, lvl):
    alphas = borel._alpha_grid(lvl.k_max)
    thr = 2.0 - 1.0 / lvl.m_max
    for gi in range(len(lvl.g_tuple)):
        if not ctx.members[gi]:
            continue
        alpha = borel._best_alpha(ctx, ctx.f_vals[gi], alphas)
        if alpha is None:
            continue
        c = ctx.witness_f[gi]
        cons = [(-c, -(float(alpha) + 1e-7))]
        try:
            diam = K.region_diameter(ctx.base, cons, budget=8192)
        except Exception:
            diam = 0.0
        if not diam > thr:
            return False
    return True


def _matched_sd2p(ctx, lvl):
    if any(not m for m in ctx.members):
        return True
    alphas = borel._alpha_grid(lvl.k_max)
    specs = []
    for gi in range(len(lvl.g_tuple)):
        alpha = borel._best_alpha(ctx, ctx.f_vals[gi], alphas)
        if alpha is None:
            return True
        c = ctx.witness_f[gi]
        from banachgeom.spaces import dual_norm_eval

        specs.append(K.SliceSpec(c / dual_norm_eval(ctx.base, c), 1.0 - float(alpha)))
    w = np.full(len(specs), 1.0 / len(specs))
    try:
        diam = K.cc_slice_diameter(ctx.base, specs, w)
    except Exception:
        return True
    return diam > 2.0 - 1.0 / lvl.m_max


def _matched_lddp(ctx, lvl):
    reps = ctx.reps[ctx.u_universe()]
    interior = reps[norm_eval_many(ctx.base, reps) < 1.0]
    verdict = K.ldp_check(
        ctx.base, lvl.delta, 1.0 / lvl.m_max,
        hull_tol=1.0 / lvl.p_max, z_grid=interior,
    )
    return verdict.passed


_MATCHED = {
    "d2p_pn": _matched_d2p,
    "ld2p_p": _matched_ld2p,
    "dld2p_p": lambda ctx, lvl: _matched_point_clause(ctx, lvl, True),
    "dp_p": lambda ctx, lvl: _matched_point_clause(ctx, lvl, False),
    "sd2p_pn": _matched_sd2p,
    "dd2p_pn": _matched_dd2p,
    "lddp_form": _matched_lddp,
}


def test_criterion_7_formula_transcription_fidelity():
    t0 = time.time()
    mismatches = []
    for i, space in enumerate(CORPUS):
        code = encode_space(space, "basis")
        gs = borel.default_g_tuple(code, level=500, count=2)
        lvl = borel.LevelSpec(m_max=4, k_max=4, p_max=4, search_depth=500, g_tuple=gs, u_cap=16)
        ctx = borel._Ctx(code, lvl)
        for fid in borel.FORMULA_IDS:
            got = borel.formula_eval(code, fid, lvl).passed
            want = _MATCHED[fid](ctx, lvl)
            if got != want:
                mismatches.append((i, fid, got, want))
    elapsed = time.time() - t0
    ok = not mismatches
    _record(
        7, ok,
        f"{len(CORPUS) * len(borel.FORMULA_IDS)} formula/checker pairs, "
        f"discrepancies={mismatches[:6]}, {elapsed:.0f}s",
    )


def test_criterion_8_implication_chains():
    t0 = time.time()
    violations = []
    for i, space in enumerate(CORPUS):
        grids = K.aligned_octahedral_grids(space)
        oh = K.oh_check(space, 0.05, subspace_grids=grids["oh_grids"])
        woh = K.woh_direct_check(space, 0.05, x_grid=grids["woh_x"], f_grid=grids["woh_f"])
        loh = K.loh_check(space, 0.05, x_grid=grids["loh_x"])
        if oh.passed and not woh.passed:
            violations.append((i, "oh->woh"))
        if woh.passed and not loh.passed:
            violations.append((i, "woh->loh"))
        hv = _hull_verdicts(space)
        if hv["dp"].passed and not hv["dld2p"].passed:
            violations.append((i, "dp->dld2p"))
        f = normalized_functional(space, space.rows[0])
        single = K.cc_slice_diameter(space, [K.SliceSpec(f, 0.4)], [1.0])
        direct = K.slice_diameter(space, f, 0.4)
        if abs(single - direct) > 1e-9:
            violations.append((i, "cc-single", single, direct))
    # octahedral spaces where the chain passes end to end
    for space in (lp_space(1, 4), lp_space(1, 3)):
        grids = K.aligned_octahedral_grids(space)
        assert K.oh_check(space, 0.05, subspace_grids=grids["oh_grids"]).passed
        assert K.woh_direct_check(space, 0.05, x_grid=grids["woh_x"], f_grid=grids["woh_f"]).passed
        assert K.loh_check(space, 0.05, x_grid=grids["loh_x"]).passed
    elapsed = time.time() - t0
    ok = not violations
    _record(8, ok, f"chains on {len(CORPUS)} spaces, violations={violations[:4]}, {elapsed:.0f}s")


def test_criterion_9_szlenk_sanity():
    l12 = lp_space(1, 2)
    corners = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], float)
    empty = K.szlenk_derivative(corners, 1.0, l12, k=2, delta=0.1)

    t = np.arange(0, 4, 0.01)
    boundary = np.array([_square_boundary(x) for x in t])
    full = K.szlenk_derivative(boundary, 0.05, l12, k=2, delta=0.1)
    thin = K.szlenk_derivative(boundary, 0.05, l12, k=2, delta=0.005)

    ok = len(empty) == 0 and len(full) == len(boundary) and len(thin) == 0
    _record(9, ok, f"corners kept={len(empty)}, dense kept={len(full)}/{len(boundary)}, below-resolution kept={len(thin)}")


def _square_boundary(t):
    t = t % 4
    if t < 1:
        return [1, -1 + 2 * t]
    if t < 2:
        return [1 - 2 * (t - 1), 1]
    if t < 3:
        return [-1, 1 - 2 * (t - 2)]
    return [-1 + 2 * (t - 3), -1]
