"""Level-indexed verdict record shared by checkers and the formula harness."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Verdict:
    """Outcome of a level-indexed property check.

    `level` records every parameter the verdict is conditioned on (epsilons,
    grids, budgets, truncations, tolerances); a verdict means nothing
    without it. `defect` is the numeric shortfall from the defining
    inequality, 0 meaning the finite test cannot distinguish the space from
    one with the property.
    """

    passed: bool
    defect: float
    level: dict = field(default_factory=dict)
    witness: dict | None = None

    def to_lines(self, prop=""):
        level = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(self.level.items()))
        lines = [f"{prop}\t{'pass' if self.passed else 'fail'}\t{self.defect:.9g}\t{level}"]
        if self.witness:
            for k, v in self.witness.items():
                lines.append(f"#   witness {k} = {_fmt(v)}")
        return lines


def _fmt(v):
    try:
        import numpy as np

        if isinstance(v, np.ndarray):
            return "[" + ",".join(f"{x:.6g}" for x in np.ravel(v)) + "]"
    except ImportError:
        pass
    if isinstance(v, float):
        return f"{v:.9g}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)
