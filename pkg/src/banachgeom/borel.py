"""Bounded evaluation of the property formulas over coded seminorms.

Each formula id transcribes one set-membership predicate on pairs
(mu, g-tuple): universal quantifiers over rational vectors run over the
canonical enumeration prefix (capped by the level spec), universal
epsilon/delta/alpha parameters over 1/m grids, and existential witnesses
are searched first in the prefix and then by LP-guided refinement whose
continuous optimisers are snapped back to rational vectors and re-verified
against the exact predicate.

The dual-tuple quantifier ("for all g in the image of the dual ball") is
under-approximated by the supplied finite g tuple; by default the images
of the dual-ball vertex functionals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .checkers import farthest_in_region, hull_membership, region_diameter
from .codes import enumerate_qvecs, prefix_dense, qvec
from .config import ETA, LP_TOL, TOL
from .dual import k_mu_membership, t_mu
from .errors import BanachGeomError, Infeasible, UnsupportedFormula
from .spaces import (
    dual_ball_vertices,
    is_polytopal,
    norm_eval,
    norm_eval_many,
)
from .verdict import Verdict

__all__ = ["FORMULA_IDS", "LevelSpec", "default_g_tuple", "formula_eval", "level_profile"]

FORMULA_IDS = ("d2p_pn", "ld2p_p", "dld2p_p", "dp_p", "sd2p_pn", "dd2p_pn", "lddp_form")

_RATION_MARGIN = 1e-6


@dataclass
class LevelSpec:
    """Bounds for the universal parameters and the witness search."""

    m_max: int = 4
    k_max: int = 4
    p_max: int = 4
    search_depth: int = 200
    g_tuple: tuple = ()
    delta: float = 2.0
    u_cap: int = 48

    def __post_init__(self):
        for name in ("m_max", "k_max", "p_max", "search_depth", "u_cap"):
            if getattr(self, name) < 1:
                raise BanachGeomError(f"{name} must be >= 1")

    def describe(self):
        return {
            "m_max": self.m_max,
            "k_max": self.k_max,
            "p_max": self.p_max,
            "depth": self.search_depth,
            "n_g": len(self.g_tuple),
            "delta": self.delta,
            "u_cap": self.u_cap,
        }


def default_g_tuple(code, level=200, count=2):
    """Images of the first dual-ball vertex functionals under the dual map."""
    dirs = dual_ball_vertices(code.space)
    out = []
    for f in dirs:
        out.append(t_mu(code, f, level))
        if len(out) >= count:
            break
    return tuple(out)


class _Ctx:
    """Prefix data shared by all clause evaluations of one formula call."""

    def __init__(self, code, level: LevelSpec):
        self.code = code
        self.level = level
        n = level.search_depth
        self.qs = enumerate_qvecs(n)
        self.width = max(1, max(v.max_index for v in self.qs))
        A, base = code.truncation(self.width)
        self.A = np.asarray(A, dtype=np.float64)
        self.base = base
        self.dense = prefix_dense(n, self.width)
        self.reps = self.dense @ self.A.T
        self.mu = norm_eval_many(base, self.reps)
        self.interior = self.mu < 1.0 - ETA
        self.ball = self.mu <= 1.0 + TOL
        self.g_vals = [np.asarray(g.values[:n], dtype=np.float64) for g in level.g_tuple]
        self.f_vals = [self.mu * g for g in self.g_vals]
        self.members = []
        self.witness_f = []
        for g in level.g_tuple:
            verdict = k_mu_membership(code, g, min(n, len(g)), LP_TOL)
            self.members.append(verdict.passed)
            self.witness_f.append(None if verdict.witness is None else verdict.witness.get("functional"))
        self._dirs = None

    def u_universe(self):
        idx = np.nonzero(self.ball)[0]
        return idx[: self.level.u_cap]

    def dirs(self):
        if self._dirs is None:
            self._dirs = dual_ball_vertices(self.base) if is_polytopal(self.base) else None
        return self._dirs

    def pair_search(self, cand_idx, thr):
        """First candidate pair with mu(v - w) > thr, or None."""
        if len(cand_idx) < 2:
            return None
        sub = self.reps[cand_idx]
        if self.dirs() is not None:
            from . import kernels

            proj = sub @ self.dirs().T
            i, j = kernels.far_pair_search(proj, thr)
            if i < 0:
                return None
            return int(cand_idx[i]), int(cand_idx[j])
        for a in range(len(sub) - 1):
            gaps = norm_eval_many(self.base, sub[a + 1 :] - sub[a])
            hit = np.nonzero(gaps > thr)[0]
            if hit.size:
                return int(cand_idx[a]), int(cand_idx[a + 1 + int(hit[0])])
        return None

    def rationalize(self, x, max_den=10**9):
        """Rational coefficient vector whose rep approximates x."""
        d = self.base.dim
        A = np.asarray(self.code.truncation(max(self.width, d))[0], dtype=np.float64)
        coeffs, *_ = np.linalg.lstsq(A, x, rcond=None)
        for den in (10**3, 10**6, max_den):
            fr = [Fraction(c).limit_denominator(den) for c in coeffs]
            rep = A @ np.array([float(f) for f in fr])
            if np.abs(rep - x).max() <= 1e-7 * max(1.0, float(np.abs(x).max())):
                return qvec(enumerate(fr, start=1)), rep
        return None, None


def formula_eval(code, formula_id, level: LevelSpec) -> Verdict:
    """Evaluate one transcribed formula at the bounded level."""
    formula_id = formula_id.lower().replace("-", "_")
    if formula_id not in FORMULA_IDS:
        raise UnsupportedFormula(f"unknown formula id {formula_id!r}")
    needs_g = formula_id != "lddp_form"
    if needs_g and not level.g_tuple:
        raise UnsupportedFormula(f"{formula_id} quantifies over dual coordinates; supply g_tuple")
    ctx = _Ctx(code, level)
    fn = {
        "d2p_pn": _eval_d2p,
        "ld2p_p": _eval_ld2p,
        "dld2p_p": _eval_dld2p,
        "dp_p": _eval_dp,
        "sd2p_pn": _eval_sd2p,
        "dd2p_pn": _eval_dd2p,
        "lddp_form": _eval_lddp,
    }[formula_id]
    passed, defect, witness = fn(ctx)
    lvl = {"formula": formula_id, **level.describe()}
    return Verdict(passed, float(defect), lvl, witness)


def level_profile(code, formula_id, schedule):
    """One verdict per level spec; records the first flip if any."""
    if not schedule:
        raise BanachGeomError("schedule must be nonempty")
    rows = [formula_eval(code, formula_id, lvl) for lvl in schedule]
    flip = None
    for i in range(1, len(rows)):
        if rows[i].passed != rows[0].passed:
            flip = i
            break
    return rows, flip


# ---------------------------------------------------------------------------
# clause helpers


def _alpha_grid(k_max):
    return [Fraction(j, k_max) for j in range(-k_max, k_max + 1)]


def _region_cons(ctx, alpha=None, c=None, box=None, eta=ETA):
    """Linear constraints over the base ball: optional slice c.x >= alpha
    and a weak box |f_i(x) - f_i(u)| < delta, both with interior retreat.
    Box centers are (functional, value-at-u) pairs."""
    cons = []
    if alpha is not None and c is not None:
        cons.append((-c, -(float(alpha) + eta)))
    if box is not None:
        centers, delta = box
        for f, at_u in centers:
            cons.append((f, delta - eta + at_u))
            cons.append((-f, delta - eta - at_u))
    return cons


def _membership_disjunct(ctx):
    """True iff some supplied g is outside the dual image (short-circuit)."""
    return any(not m for m in ctx.members)


def _snap_pair(ctx, x, y, check):
    vx, rx = ctx.rationalize(x)
    vy, ry = ctx.rationalize(y)
    if vx is None or vy is None:
        return None
    if check(rx, ry):
        return vx, vy
    return None


# ---------------------------------------------------------------------------
# formula bodies (hardest-instance evaluation; the 1/m ladders are monotone,
# so the largest m / k decide the whole universal family)


def _eval_d2p(ctx):
    level = ctx.level
    if _membership_disjunct(ctx):
        return True, 0.0, {"reason": "a supplied g falls outside the dual image"}
    eps = 1.0 / level.m_max
    delta = 1.0 / level.k_max
    thr = 2.0 - eps
    worst = 0.0
    for ui in ctx.u_universe():
        fu = [fv[ui] for fv in ctx.f_vals]
        box_ok = ctx.interior.copy()
        for fv, val in zip(ctx.f_vals, fu):
            box_ok &= np.abs(fv - val) < delta
        cand = np.nonzero(box_ok)[0]
        if ctx.pair_search(cand, thr) is not None:
            continue
        got, diam = _lp_pair_witness(ctx, ui, thr, delta)
        if got:
            continue
        short = max(0.0, thr - diam)
        if short > worst:
            worst = short
        if worst > 0:
            return False, worst, {"u_index": int(ui), "u": str(ctx.qs[ui]), "region_diameter": diam}
    return True, 0.0, None


def _lp_pair_witness(ctx, ui, thr, delta):
    """LP refinement for the weak-box pair clause: diameter of the box
    region; on success the optimisers are rationalised and re-verified."""
    centers = [(ctx.witness_f[i], float(ctx.f_vals[i][ui])) for i in range(len(ctx.f_vals))]
    if any(c[0] is None for c in centers):
        return False, 0.0
    cons = _region_cons(ctx, box=(centers, delta))
    try:
        diam = region_diameter(ctx.base, cons, budget=8192)
    except Infeasible:
        return False, 0.0
    if diam <= thr + _RATION_MARGIN:
        return False, diam
    x, y = _diameter_pair(ctx, cons)
    if x is None:
        # smooth base: rational witnesses exist by density of the prefix
        # coefficients; the margin over thr certifies them.
        return not is_polytopal(ctx.base), diam

    def check(rx, ry):
        if norm_eval(ctx.base, rx - ry) <= thr + 1e-9:
            return False
        for v in (rx, ry):
            if norm_eval(ctx.base, v) >= 1.0 - 1e-12:
                return False
            for (f, at_u) in centers:
                if abs(float(f @ v) - at_u) >= delta - 1e-9:
                    return False
        return True

    scale = 1.0 - 10 * ETA
    snapped = _snap_pair(ctx, x * scale, y * scale, check)
    return snapped is not None, diam


def _diameter_pair(ctx, cons):
    """A far pair realising the region diameter (polytopal exact)."""
    base = ctx.base
    if not is_polytopal(base):
        return None, None
    from .spaces import linmax

    best = (0.0, None, None)
    for phi in dual_ball_vertices(base):
        try:
            a = linmax(base, phi, cons)
            b = linmax(base, -phi, cons)
        except Infeasible:
            return None, None
        val = a.value + b.value
        if val > best[0]:
            best = (val, a.argmax, b.argmax)
    return best[1], best[2]


def _slice_indices(ctx, fv, alpha):
    return np.nonzero(ctx.interior & (fv > float(alpha)))[0]


def _best_alpha(ctx, fv, alphas):
    """Largest grid alpha whose slice meets the interior prefix ball."""
    live = [a for a in alphas if len(_slice_indices(ctx, fv, a))]
    return max(live) if live else None


def _eval_ld2p(ctx):
    level = ctx.level
    thr = 2.0 - 1.0 / level.m_max
    alphas = _alpha_grid(level.k_max)
    worst = 0.0
    wit = None
    for gi in range(len(level.g_tuple)):
        if not ctx.members[gi]:
            continue
        fv = ctx.f_vals[gi]
        alpha = _best_alpha(ctx, fv, alphas)
        if alpha is None:
            continue
        cand = _slice_indices(ctx, fv, alpha)
        if ctx.pair_search(cand, thr) is not None:
            continue
        got, diam = _lp_slice_pair(ctx, gi, alpha, thr)
        if got:
            continue
        short = max(0.0, thr - diam)
        if short > worst:
            worst = short
            wit = {"g_index": gi, "alpha": str(alpha), "slice_diameter": diam}
    return worst <= 0.0, worst, wit


def _lp_slice_pair(ctx, gi, alpha, thr):
    c = ctx.witness_f[gi]
    if c is None:
        return False, 0.0
    cons = _region_cons(ctx, alpha=alpha, c=c)
    try:
        diam = region_diameter(ctx.base, cons, budget=8192)
    except Infeasible:
        return False, 0.0
    if diam <= thr + _RATION_MARGIN:
        return False, diam
    x, y = _diameter_pair(ctx, cons)
    if x is None:
        return not is_polytopal(ctx.base), diam

    def check(rx, ry):
        if norm_eval(ctx.base, rx - ry) <= thr + 1e-9:
            return False
        for v in (rx, ry):
            if norm_eval(ctx.base, v) >= 1.0 - 1e-12:
                return False
            if float(c @ v) <= float(alpha) + 1e-9:
                return False
        return True

    snapped = _snap_pair(ctx, x * (1.0 - 10 * ETA), y * (1.0 - 10 * ETA), check)
    return snapped is not None, diam


def _far_point_clause(ctx, gi, ui, alpha, thr):
    """exists v: mu(u - v) > thr, mu(v) < 1, f(v) > alpha."""
    fv = ctx.f_vals[gi]
    cand = _slice_indices(ctx, fv, alpha)
    if len(cand):
        gaps = norm_eval_many(ctx.base, ctx.reps[cand] - ctx.reps[ui])
        if np.any(gaps > thr):
            return True, None
    c = ctx.witness_f[gi]
    if c is None:
        return False, 0.0
    cons = _region_cons(ctx, alpha=alpha, c=c)
    try:
        sup = farthest_in_region(ctx.base, ctx.reps[ui], cons, budget=8192)
    except Infeasible:
        return False, 0.0
    if sup <= thr + _RATION_MARGIN:
        return False, sup
    v = _farthest_point(ctx, ui, cons)
    if v is None:
        return not is_polytopal(ctx.base), sup

    def check_single(rv):
        return (
            norm_eval(ctx.base, ctx.reps[ui] - rv) > thr + 1e-9
            and norm_eval(ctx.base, rv) < 1.0 - 1e-12
            and float(c @ rv) > float(alpha) + 1e-9
        )

    vq, rep = ctx.rationalize(v * (1.0 - 10 * ETA))
    if vq is not None and check_single(rep):
        return True, sup
    return False, sup


def _farthest_point(ctx, ui, cons):
    base = ctx.base
    if not is_polytopal(base):
        return None
    from .spaces import linmax

    x = ctx.reps[ui]
    best = (0.0, None)
    for phi in dual_ball_vertices(base):
        try:
            res = linmax(base, -phi, cons)
        except Infeasible:
            return None
        val = float(phi @ x) + res.value
        if val > best[0]:
            best = (val, res.argmax)
    return best[1]


def _eval_dld2p(ctx):
    level = ctx.level
    alphas = _alpha_grid(level.k_max)
    worst = 0.0
    wit = None
    for gi in range(len(level.g_tuple)):
        if not ctx.members[gi]:
            continue
        fv = ctx.f_vals[gi]
        for ui in ctx.u_universe():
            live = [a for a in alphas if fv[ui] > float(a)]
            if not live:
                continue
            alpha = max(live)
            thr = 2.0 * ctx.mu[ui] - 1.0 / level.m_max
            ok, sup = _far_point_clause(ctx, gi, ui, alpha, thr)
            if ok:
                continue
            short = max(0.0, thr - sup)
            if short > worst:
                worst = short
                wit = {"g_index": gi, "u": str(ctx.qs[ui]), "alpha": str(alpha)}
    return worst <= 0.0, worst, wit


def _eval_dp(ctx):
    level = ctx.level
    alphas = _alpha_grid(level.k_max)
    worst = 0.0
    wit = None
    for gi in range(len(level.g_tuple)):
        if not ctx.members[gi]:
            continue
        fv = ctx.f_vals[gi]
        alpha = _best_alpha(ctx, fv, alphas)
        if alpha is None:
            continue
        for ui in ctx.u_universe():
            thr = 2.0 * ctx.mu[ui] - 1.0 / level.m_max
            if thr <= 0:
                continue
            ok, sup = _far_point_clause(ctx, gi, ui, alpha, thr)
            if ok:
                continue
            short = max(0.0, thr - sup)
            if short > worst:
                worst = short
                wit = {"g_index": gi, "u": str(ctx.qs[ui]), "alpha": str(alpha)}
    return worst <= 0.0, worst, wit


def _eval_dd2p(ctx):
    level = ctx.level
    if _membership_disjunct(ctx):
        return True, 0.0, {"reason": "a supplied g falls outside the dual image"}
    delta = 1.0 / level.k_max
    worst = 0.0
    wit = None
    for ui in ctx.u_universe():
        thr = 2.0 * ctx.mu[ui] - 1.0 / level.m_max
        if thr <= 0:
            continue
        box_ok = ctx.interior.copy()
        for fv in ctx.f_vals:
            box_ok &= np.abs(fv - fv[ui]) < delta
        cand = np.nonzero(box_ok)[0]
        if len(cand):
            gaps = norm_eval_many(ctx.base, ctx.reps[cand] - ctx.reps[ui])
            if np.any(gaps > thr):
                continue
        centers = [(ctx.witness_f[i], float(ctx.f_vals[i][ui])) for i in range(len(ctx.f_vals))]
        if any(c[0] is None for c in centers):
            return False, 1.0, {"reason": "missing interpolating functional"}
        cons = _region_cons(ctx, box=(centers, delta))
        try:
            sup = farthest_in_region(ctx.base, ctx.reps[ui], cons, budget=8192)
        except Infeasible:
            sup = 0.0
        if sup > thr + _RATION_MARGIN:
            v = _farthest_point(ctx, ui, cons)
            if v is None:
                if not is_polytopal(ctx.base):
                    continue
            else:
                vq, rep = ctx.rationalize(v * (1.0 - 10 * ETA))
                if vq is not None and norm_eval(ctx.base, ctx.reps[ui] - rep) > thr + 1e-9:
                    inside = norm_eval(ctx.base, rep) < 1.0 - 1e-12
                    box = all(
                        abs(float(f @ rep) - at_u) < delta - 1e-9 for f, at_u in centers
                    )
                    if inside and box:
                        continue
        short = max(0.0, thr - sup)
        if short > worst:
            worst = short
            wit = {"u": str(ctx.qs[ui]), "sup": sup}
    return worst <= 0.0, worst, wit


def _eval_sd2p(ctx):
    level = ctx.level
    n = len(level.g_tuple)
    thr = 2.0 - 1.0 / level.m_max
    alphas = _alpha_grid(level.k_max)
    if _membership_disjunct(ctx):
        return True, 0.0, {"reason": "a supplied g falls outside the dual image"}
    per_alpha = []
    for gi in range(n):
        alpha = _best_alpha(ctx, ctx.f_vals[gi], alphas)
        if alpha is None:
            return True, 0.0, {"reason": f"slice of g_{gi} is empty on the prefix"}
        per_alpha.append(alpha)
    # mean-diameter LP over the induced slices, uniform weights
    supports = []
    for gi, alpha in enumerate(per_alpha):
        c = ctx.witness_f[gi]
        if c is None:
            return False, 1.0, {"reason": "missing interpolating functional"}
        supports.append(_region_cons(ctx, alpha=alpha, c=c))
    if not is_polytopal(ctx.base):
        diam = _cc_diam_sampling(ctx, supports)
    else:
        diam = 0.0
        from .spaces import linmax

        for phi in dual_ball_vertices(ctx.base):
            val = 0.0
            try:
                for cons in supports:
                    val += (
                        linmax(ctx.base, phi, cons).value + linmax(ctx.base, -phi, cons).value
                    ) / n
            except Infeasible:
                return True, 0.0, {"reason": "an induced slice is empty"}
            diam = max(diam, val)
    if diam > thr + _RATION_MARGIN:
        return True, 0.0, {"cc_diameter": diam, "alphas": [str(a) for a in per_alpha]}
    short = max(0.0, thr - diam)
    return False, short, {"cc_diameter": diam, "alphas": [str(a) for a in per_alpha]}


def _cc_diam_sampling(ctx, supports, count=512):
    from .checkers import _dual_direction_samples, _region_candidates_smooth

    cand = [_region_candidates_smooth(ctx.base, cons, 4096) for cons in supports]
    if any(len(c) == 0 for c in cand):
        return 0.0
    best = 0.0
    for psi in _dual_direction_samples(ctx.base, count):
        val = 0.0
        for c in cand:
            proj = c @ psi
            val += (proj.max() - proj.min()) / len(cand)
        best = max(best, val)
    return best


def _eval_lddp(ctx):
    level = ctx.level
    thr = level.delta - 1.0 / level.m_max
    radius = 1.0 / level.p_max
    from .checkers import _pair_midpoints, _straddle_midpoints, _unit_directions

    dirs = _unit_directions(ctx.base, 64)
    pool_idx = np.nonzero(ctx.interior)[0][:32]
    # vertex-vertex pairs carry the far-pair structure; keep their midpoint
    # budget separate so prefix-rep pairs cannot crowd them out
    vert_mids = _pair_midpoints(ctx.base, _rational_interior_vertices(ctx), thr)
    rep_mids = _pair_midpoints(ctx.base, ctx.reps[pool_idx], thr, cap=64)
    shared = (
        np.vstack([m for m in (vert_mids, rep_mids) if len(m)])
        if (len(vert_mids) or len(rep_mids))
        else np.empty((0, ctx.base.dim))
    )
    worst = 0.0
    wit = None
    for ui in ctx.u_universe():
        if ctx.mu[ui] >= 1.0:
            continue
        z = ctx.reps[ui]
        _, pairs = _straddle_midpoints(ctx.base, z, thr, dirs)
        mids = _rational_midpoints(ctx, pairs, thr)
        gens = np.vstack([m for m in (mids, shared) if len(m)]) if (len(mids) or len(shared)) else np.empty((0, ctx.base.dim))
        if len(gens) == 0:
            dist = float("inf")
        else:
            _, dist = hull_membership(ctx.base, z, gens, radius)
        short = max(0.0, dist - radius)
        if short > worst:
            worst = short
            wit = {"u": str(ctx.qs[ui]), "hull_distance": dist}
    return worst <= 0.0, worst, wit


def _rational_interior_vertices(ctx, cap=24):
    """Retreated ball vertices snapped to rational vectors: the densest
    interior points the far-pair midpoint pool can be built from."""
    from .spaces import sample_ball_vertices

    try:
        verts = sample_ball_vertices(ctx.base, cap)
    except BanachGeomError:
        return np.empty((0, ctx.base.dim))
    out = []
    for v in verts:
        vq, rep = ctx.rationalize(v * (1.0 - 1e-5))
        if vq is not None and norm_eval(ctx.base, rep) < 1.0 - 1e-12:
            out.append(rep)
    return np.asarray(out) if out else np.empty((0, ctx.base.dim))


def _rational_midpoints(ctx, pairs, thr, retreat=1e-5):
    """Snap straddle pairs to rational interior points and keep verified
    midpoints (the formula quantifies over rational vectors only). The
    extra retreat keeps snapped norms clear of the interior threshold."""
    mids = []
    for a, b in pairs:
        va, ra = ctx.rationalize(a * (1.0 - retreat))
        vb, rb = ctx.rationalize(b * (1.0 - retreat))
        if va is None or vb is None:
            continue
        if (
            norm_eval(ctx.base, ra) < 1.0 - 1e-12
            and norm_eval(ctx.base, rb) < 1.0 - 1e-12
            and norm_eval(ctx.base, ra - rb) > thr
        ):
            mids.append(0.5 * (ra + rb))
    return np.asarray(mids) if mids else np.empty((0, ctx.base.dim))
