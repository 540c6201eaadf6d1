import numpy as np
import pytest

from banachgeom.errors import SpecFileError
from banachgeom.specfile import load_code, load_space, parse_code_text, parse_space_text
from banachgeom.spaces import norm_eval

FACET_DOC = """
kind: facet
dim: 2
rows:
  1 0
  0 1
  1 1
"""

SUM_DOC = """
kind: sum_inf
parts:
  - kind: lp
    p: 2
    dim: 2
  - kind: lp
    p: 1
    dim: 3
"""

QUOTIENT_DOC = """
kind: quotient
parent:
  kind: lp
  p: inf
  dim: 3
kernel:
  1 1 1
"""


def test_parse_facet():
    space = parse_space_text(FACET_DOC)
    assert space.kind == "facet"
    assert norm_eval(space, [1, 1]) == 2


def test_parse_rationals():
    space = parse_space_text("kind: facet\ndim: 2\nrows:\n  1/2 0\n  0 2/3\n  1/3 -1/7\n")
    assert space.rows[0][0] == pytest.approx(0.5)
    assert space.rows[2][1] == pytest.approx(-1 / 7)


def test_parse_sum():
    space = parse_space_text(SUM_DOC)
    assert space.kind == "sum_inf"
    assert space.dim == 5
    assert norm_eval(space, [3, 4, 0.1, 0.1, 0.1]) == pytest.approx(5.0)


def test_parse_quotient():
    space = parse_space_text(QUOTIENT_DOC)
    assert space.kind == "quotient"
    assert space.dim == 2


def test_parse_code_with_rule():
    code = parse_code_text(FACET_DOC + "rule: basis\n")
    assert code.rule == "basis"
    code2 = parse_code_text(FACET_DOC + "rule: custom\nvectors:\n  1 0\n  1 1\n")
    assert np.allclose(code2.vector(2), [1, 1])


def test_comments_and_blank_lines_ignored():
    doc = "# a space\nkind: lp  # inline\np: 2\n\ndim: 3\n"
    assert parse_space_text(doc).dim == 3


@pytest.mark.parametrize(
    "doc",
    [
        "",
        "kind: facet\ndim: 2\n",  # missing rows
        "kind: lp\ndim: 2\n",  # missing p
        "kind: mystery\n",
        "kind: facet\ndim: 3\nrows:\n  1 0\n  0 1\n",  # dim mismatch
        "kind: facet\ndim: 2\nrows:\n  1 0\n  0 1 1\n",  # ragged
        "kind: facet\ndim: 2\nrows:\n  1 x\n  0 1\n",  # bad rational
        "kind: sum_inf\n",  # missing parts
        FACET_DOC + "rule: wild\n",
    ],
)
def test_malformed_specs_raise(doc):
    with pytest.raises(SpecFileError):
        if "rule" in doc:
            parse_code_text(doc)
        else:
            parse_space_text(doc)


def test_load_from_file(tmp_path):
    path = tmp_path / "space.spec"
    path.write_text(FACET_DOC, encoding="utf-8")
    assert load_space(path).kind == "facet"
    cpath = tmp_path / "code.spec"
    cpath.write_text(FACET_DOC + "rule: ball-grid\n", encoding="utf-8")
    assert load_code(cpath).rule == "ball-grid"
