"""Finite dual access for seminorm codes.

The normalisation map sends a dual-ball functional f to the coordinate
family g(u) = f(rep(u)) / mu(u) over enumerated rational vectors u; its
image is tested by a finite Hahn-Banach criterion: a prefix of coordinates
belongs to the image iff g kills the zero vector and the kernel, and the
linear system f(rep(u_i)) = mu(u_i) g(u_i) admits a solution of dual norm
at most one. The explicit weighted-l1 sequence of seminorms below shows a
coordinatewise limit of members whose limit is not a member.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .codes import (
    QVec,
    SeminormCode,
    basis_qvec,
    code_distance,
    enumerate_qvecs,
    prefix_dense,
)
from .config import LP_TOL
from .errors import BadIndex, BanachGeomError, NotInDualBall
from .spaces import ball_vertices, dual_norm_eval, is_polytopal, lp_space, norm_eval_many
from .verdict import Verdict

__all__ = [
    "DualAssignment",
    "t_mu",
    "k_mu_membership",
    "knocerrado",
    "LIMIT",
    "KnocerradoCode",
    "KnocerradoAssignment",
    "assignment_distance",
    "pair_distance",
    "verify_k_counterexample",
    "KnocerradoReport",
]

LIMIT = "limit"

_KERNEL_CUT = 1e-14


@dataclass
class DualAssignment:
    """Values of a candidate dual coordinate family on the enumeration prefix."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if np.any(np.abs(vals) > 1.0 + 1e-9):
            raise BanachGeomError("dual assignment values must lie in [-1, 1]")
        self.values = np.clip(vals, -1.0, 1.0)

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_rule(cls, rule, level):
        return cls(np.array([rule(v) for v in enumerate_qvecs(level)], dtype=np.float64))


def t_mu(code: SeminormCode, f, prefix: int, tol=LP_TOL) -> DualAssignment:
    """Coordinates of a dual-ball functional under the normalisation map."""
    if prefix < 1:
        raise BanachGeomError("prefix must be >= 1")
    f = np.asarray(getattr(f, "coords", f), dtype=np.float64)
    if dual_norm_eval(code.space, f) > 1.0 + tol:
        raise NotInDualBall("functional exceeds the dual unit ball")
    reps, mu, _ = _prefix_reps(code, prefix)
    vals = np.zeros(prefix)
    live = mu > _KERNEL_CUT
    vals[live] = (reps[live] @ f) / mu[live]
    return DualAssignment(np.clip(vals, -1.0, 1.0))


def _prefix_reps(code, prefix):
    qs = enumerate_qvecs(prefix)
    width = max(1, max(v.max_index for v in qs))
    A, base = code.truncation(width)
    reps = prefix_dense(prefix, width) @ np.asarray(A, dtype=np.float64).T
    mu = norm_eval_many(base, reps)
    return reps, mu, base


def k_mu_membership(code, g: DualAssignment, level: int, tol=LP_TOL) -> Verdict:
    """Finite-level membership of g in the image of the normalisation map.

    Pass needs (a) g(0_V) = 0, (b) g vanishing on kernel vectors, and
    (c) feasibility of the truncated Hahn-Banach system: some functional of
    dual norm <= 1 + tol matching mu(u_i) g(u_i) on every enumerated rep.
    The feasibility problem is solved by minimising the dual norm subject
    to the interpolation equalities; the witness is the minimiser.
    """
    if len(g) < level:
        raise BanachGeomError("assignment shorter than the requested level")
    vals = np.asarray(g.values[:level], dtype=np.float64)
    reps, mu, base = _prefix_reps(code, level)
    lvl = {"level": level, "tol": tol}

    zero_defect = abs(vals[0])
    kernel = mu <= max(tol, _KERNEL_CUT)
    kernel_defect = float(np.abs(vals[kernel]).max()) if kernel.any() else 0.0

    rhs = mu * vals
    live = ~kernel
    f_witness, norm_excess, feasible = _min_dual_norm_interpolant(base, reps[live], rhs[live], tol)
    if not feasible:
        return Verdict(False, float("inf"), lvl, {"reason": "inconsistent interpolation system"})

    defect = max(zero_defect, kernel_defect, norm_excess)
    witness = {"functional": f_witness}
    if zero_defect > tol:
        witness["reason"] = "g(0_V) != 0"
    elif kernel_defect > tol:
        witness["reason"] = "g does not vanish on the kernel"
        witness["kernel_index"] = int(np.argmax(np.abs(vals) * kernel))
    elif norm_excess > tol:
        witness["reason"] = "no dual-ball functional interpolates"
    return Verdict(defect <= tol, float(defect), lvl, witness)


def _min_dual_norm_interpolant(base, reps, rhs, tol):
    """(f, excess over 1, feasible): minimise the base dual norm of f
    subject to f . reps[i] = rhs[i]."""
    d = base.dim
    if reps.size == 0:
        return np.zeros(d), 0.0, True
    if is_polytopal(base):
        verts = ball_vertices(base)
        nv = len(verts)
        # vars (f, t): minimise t subject to verts @ f <= t, reps @ f = rhs
        c = np.zeros(d + 1)
        c[-1] = 1.0
        A_ub = np.hstack([verts, -np.ones((nv, 1))])
        A_eq = np.hstack([reps, np.zeros((len(reps), 1))])
        res = linprog(
            c,
            A_ub=A_ub,
            b_ub=np.zeros(nv),
            A_eq=A_eq,
            b_eq=rhs,
            bounds=[(None, None)] * (d + 1),
            method="highs",
        )
        if res.status == 2:
            return np.zeros(d), float("inf"), False
        if res.status != 0:
            raise BanachGeomError(f"membership LP failed: {res.message}")
        return res.x[:d], max(0.0, float(res.fun) - 1.0), True
    # Smooth base: least-squares consistency, then the minimum-norm solution.
    f, _, _, _ = np.linalg.lstsq(reps, rhs, rcond=None)
    residual = float(np.abs(reps @ f - rhs).max())
    if residual > max(tol, 1e-9) * max(1.0, float(np.abs(rhs).max())):
        return np.zeros(d), float("inf"), False
    if getattr(base, "p", None) == 2.0:
        return f, max(0.0, float(np.linalg.norm(f)) - 1.0), True
    from scipy.optimize import minimize

    res = minimize(
        lambda c_: dual_norm_eval(base, c_),
        f,
        constraints=[{"type": "eq", "fun": lambda c_: reps @ c_ - rhs}],
        method="SLSQP",
    )
    fbest = res.x if res.success else f
    return fbest, max(0.0, dual_norm_eval(base, fbest) - 1.0), True


# ---------------------------------------------------------------------------
# the explicit non-closedness sequence


class KnocerradoCode:
    """Closed-form seminorm mu_n(sum q_m e_m) = |q_1/n + q_2| + sum_{m>=3} |q_m|,
    or its coordinatewise limit sum_{m>=2} |q_m|."""

    def __init__(self, n=None):
        if n is not None and n < 1:
            raise BadIndex("sequence index must be >= 1")
        self.n = n

    def label(self):
        return "knocerrado:limit" if self.n is None else f"knocerrado:{self.n}"

    def eval_qvec(self, v: QVec) -> float:
        head = Fraction(0)
        tail = Fraction(0)
        for idx, coef in v.items:
            if idx == 1:
                if self.n is not None:
                    head += Fraction(coef, self.n)
            elif idx == 2:
                head += coef
            else:
                tail += abs(coef)
        return float(abs(head) + tail)

    def eval_real(self, coeffs) -> float:
        coeffs = np.asarray(coeffs, dtype=np.float64)
        head = coeffs[0] / self.n if (self.n is not None and len(coeffs) >= 1) else 0.0
        if len(coeffs) >= 2:
            head += coeffs[1]
        return float(abs(head) + np.abs(coeffs[2:]).sum())

    def truncation(self, width):
        rows = max(1, width - 1)
        A = np.zeros((rows, width))
        if self.n is not None:
            A[0, 0] = 1.0 / self.n
        if width >= 2:
            A[0, 1] = 1.0
        for r in range(1, rows):
            A[r, r + 1] = 1.0
        return A, lp_space(1, rows)


class KnocerradoAssignment:
    """The matching dual coordinates: the image of the norm-one functional
    pinned by f(e1-bar) = 1/n, f(e_m-bar) = 1 for m >= 3 (its value on
    e2-bar is forced to 1 since e2-bar = n * e1-bar), or the piecewise
    limit rule."""

    def __init__(self, n=None):
        if n is not None and n < 1:
            raise BadIndex("sequence index must be >= 1")
        self.n = n

    def __call__(self, v: QVec) -> float:
        if self.n is not None:
            num = Fraction(0)
            den = Fraction(0)
            head = Fraction(0)
            for idx, coef in v.items:
                if idx == 1:
                    head += Fraction(coef, self.n)
                elif idx == 2:
                    head += coef
                else:
                    num += coef
                    den += abs(coef)
            num += head
            den += abs(head)
            return float(num / den) if den else 0.0
        if v.is_zero:
            return 0.0
        tail_num = Fraction(0)
        tail_den = Fraction(0)
        for idx, coef in v.items:
            if idx >= 2:
                tail_num += coef
                tail_den += abs(coef)
        if tail_den:
            return float(tail_num / tail_den)
        q1 = v.coeff(1)
        return float(q1 / abs(q1))

    def materialize(self, level) -> DualAssignment:
        return DualAssignment.from_rule(self, level)


def knocerrado(n):
    """The n-th member (or, for LIMIT/None, the coordinatewise limit) of the
    sequence witnessing that membership is not closed under coordinatewise
    convergence."""
    if n in (LIMIT, None):
        return KnocerradoCode(None), KnocerradoAssignment(None)
    n = int(n)
    if n < 1:
        raise BadIndex("sequence index must be >= 1")
    return KnocerradoCode(n), KnocerradoAssignment(n)


# ---------------------------------------------------------------------------
# distances and the counterexample report


def assignment_distance(rule_a, rule_b, depth=20):
    """Same weighted coordinate metric as code_distance, on g-values."""
    total = 0.0
    for i, v in enumerate(enumerate_qvecs(depth), start=1):
        total += 2.0**-i * min(1.0, abs(rule_a(v) - rule_b(v)))
    return total


def pair_distance(code_a, rule_a, code_b, rule_b, depth=20):
    """(mu part, g part, total) of the product-topology distance."""
    mu_d = code_distance(code_a, code_b, depth=depth)
    g_d = assignment_distance(rule_a, rule_b, depth=depth)
    return mu_d, g_d, mu_d + g_d


@dataclass
class KnocerradoReport:
    clause_members: bool
    clause_convergence: bool
    clause_limit_fails: bool
    membership_rows: list
    distance_rows: list
    limit_row: dict
    notes: list

    @property
    def all_pass(self):
        return self.clause_members and self.clause_convergence and self.clause_limit_fails

    def to_text(self):
        out = ["# knocerrado counterexample report"]
        out.append(f"# clause_i_members\t{'pass' if self.clause_members else 'fail'}")
        out.append(f"# clause_ii_convergence\t{'pass' if self.clause_convergence else 'fail'}")
        out.append(f"# clause_iii_limit_fails\t{'pass' if self.clause_limit_fails else 'fail'}")
        for note in self.notes:
            out.append(f"# note\t{note}")
        out.append("n\tmax_membership_defect\tlevels_passed")
        for row in self.membership_rows:
            out.append(f"{row['n']}\t{row['max_defect']:.3g}\t{row['levels_passed']}")
        out.append("n\tmu_distance\tassign_distance\ttotal")
        for row in self.distance_rows:
            out.append(f"{row['n']}\t{row['mu']:.9g}\t{row['g']:.9g}\t{row['total']:.9g}")
        out.append(
            "limit\tmu(e1)={mu_e1:.3g}\tg(e1)={g_e1:.3g}\tmembership={verdict}".format(
                **self.limit_row
            )
        )
        return "\n".join(out)


def verify_k_counterexample(levels=30, n_max=20, tol=LP_TOL, depth=None, assign_tol=1e-4):
    """Run the three clauses of the non-closedness verification.

    (i) every sequence member passes membership at every level up to
    `levels`; (ii) the coordinatewise distance to the limit decreases
    monotonically (within tol), with the assignment component below
    assign_tol at n_max; (iii) the limit pair fails membership through the
    kernel coordinate e1.
    """
    if levels < 1 or n_max < 1:
        raise BanachGeomError("levels and n_max must be >= 1")
    depth = levels if depth is None else depth
    notes = []

    membership_rows = []
    clause_i = True
    if tol <= 0:
        clause_i = False
        notes.append("tolerance violation: membership slack must be positive")
    else:
        for n in range(1, n_max + 1):
            code, rule = knocerrado(n)
            worst = 0.0
            passed = 0
            for level in range(1, levels + 1):
                verdict = k_mu_membership(code, rule.materialize(level), level, tol)
                worst = max(worst, verdict.defect)
                if verdict.passed:
                    passed += 1
                else:
                    clause_i = False
            membership_rows.append({"n": n, "max_defect": worst, "levels_passed": passed})

    lim_code, lim_rule = knocerrado(LIMIT)
    distance_rows = []
    for n in range(1, n_max + 1):
        code, rule = knocerrado(n)
        mu_d, g_d, total = pair_distance(code, rule, lim_code, lim_rule, depth=depth)
        distance_rows.append({"n": n, "mu": mu_d, "g": g_d, "total": total})

    clause_ii = True
    if tol <= 0:
        clause_ii = False
        notes.append("tolerance violation: monotonicity demands a positive tol on floats")
    else:
        for prev, cur in zip(distance_rows, distance_rows[1:]):
            if cur["total"] > prev["total"] + tol:
                clause_ii = False
                notes.append(f"distance increased from n={prev['n']} to n={cur['n']}")
        if n_max >= 2:
            if distance_rows[-1]["total"] >= distance_rows[0]["total"]:
                clause_ii = False
                notes.append("total distance did not decrease overall")
            if distance_rows[-1]["g"] >= assign_tol:
                clause_ii = False
                notes.append(
                    f"assignment distance {distance_rows[-1]['g']:.3g} above floor {assign_tol:g}"
                )

    e1 = basis_qvec(1)
    level_star = max(levels, 3)
    lim_verdict = k_mu_membership(
        lim_code, lim_rule.materialize(level_star), level_star, max(tol, LP_TOL)
    )
    mu_e1 = lim_code.eval_qvec(e1)
    g_e1 = lim_rule(e1)
    clause_iii = (not lim_verdict.passed) and mu_e1 <= max(tol, LP_TOL) and abs(g_e1 - 1.0) <= 1e-12
    limit_row = {"mu_e1": mu_e1, "g_e1": g_e1, "verdict": "fail" if not lim_verdict.passed else "pass"}

    return KnocerradoReport(clause_i, clause_ii, clause_iii, membership_rows, distance_rows, limit_row, notes)
