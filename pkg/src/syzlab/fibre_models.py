"""Integer cohomology of the singular torus-fibre models.

Each model is a quotient of the cubical 3-torus by collapsing a coordinate
subcomplex, built as a pushout along an explicit cellular map.  The grid
parameter subdivides every circle factor, so each model can be computed in
a coarse and a refined cell structure and the answers compared.

Cell lists at grid 1 (labels are nested circle cells, v = vertex, e = edge):

  T3     v, three e's, three 2-cells, one 3-cell          (1, 3, 3, 1)
  nodal  2-torus with one coordinate circle collapsed     (1, 1, 1)
  onepoint  2-torus with both coordinate circles collapsed (1, 0, 1); sphere
  M22 = nodal x circle
  M12 = T3 with {x1 = 0} 2-torus collapsed to a point
  M21 = T3 with (fig-eight) x circle projected onto the fig-eight
  M11a = onepoint x circle
  M11b = M21 with one loop of the fig-eight collapsed
  M01 = T3 with (fig-eight) x circle collapsed to a point
  M10 = T3 with (fig-eight) x circle projected to the last circle and the
        {x3 = 0} 2-torus collapsed to that circle's base vertex
  M00 = T3 with the whole 2-skeleton collapsed; a 3-sphere pattern
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    CellularMap,
    ChainComplex,
    ComplexError,
    circle_complex,
    point_complex,
    product_complex,
    quotient_complex,
    torus_complex,
)

V0 = ("v", 0)

MODEL_TABLE = {
    "M22": ((2, 2), "nodal-curve model times a circle"),
    "M12": ((1, 2), "circle times 2-torus with a point-times-torus collapse"),
    "M21": ((2, 1), "3-torus pinched along a figure eight"),
    "M11a": ((1, 1), "one-point-curve model times a circle"),
    "M11b": ((1, 1), "figure-eight pinch with one loop contracted"),
    "M01": ((0, 1), "figure-eight times circle collapsed to a point"),
    "M10": ((1, 0), "fibrewise figure-eight collapse over the last circle"),
    "M00": ((0, 0), "2-skeleton collapsed; sphere pattern"),
}

MODEL_NAMES = tuple(MODEL_TABLE)


class ModelError(ValueError):
    pass


def axis_components(label, n):
    """Flatten a nested product-cell label into per-axis circle cells."""
    if n == 1:
        return [label]
    return axis_components(label[0], n - 1) + [label[1]]


def make_label(comps):
    """Rebuild the nested (left-associated) product label."""
    label = comps[0]
    for c in comps[1:]:
        label = (label, c)
    return label


def cells_where(cx: ChainComplex, n, predicate):
    """All cell labels whose per-axis components satisfy the predicate."""
    out = []
    for layer in cx.cells:
        for label in layer:
            if predicate(axis_components(label, n)):
                out.append(label)
    return out


def extract_subcomplex(cx: ChainComplex, labels, name=""):
    keep = set(labels)
    cells = [[l for l in layer if l in keep] for layer in cx.cells]
    while cells and not cells[-1]:
        cells.pop()
    index = [{l: i for i, l in enumerate(layer)} for layer in cells]
    bnds = [[]]
    for k in range(1, len(cells)):
        rows, cols = len(cells[k - 1]), len(cells[k])
        mat = [[0] * cols for _ in range(rows)]
        for j, label in enumerate(cells[k]):
            src = cx.index[k][label]
            for i, face in enumerate(cx.cells[k - 1]):
                c = cx.boundaries[k][i][src]
                if c == 0:
                    continue
                if face not in keep:
                    raise ComplexError(f"{labels} is not a subcomplex: face {face}")
                mat[index[k - 1][face]][j] += c
        bnds.append(mat)
    sub = ChainComplex(cells, bnds, name)
    sub.validate()
    return sub


def _is_vertex(c):
    return c[0] == "v"


def _fig8_predicate(comps):
    return comps[0] == V0 or comps[1] == V0


def nodal_curve_complex(grid=1):
    """2-torus with the {x1 = 0} circle collapsed to a point."""
    t2 = torus_complex(2, grid, "T2")
    sub = cells_where(t2, 2, lambda c: c[0] == V0)
    return quotient_complex(t2, sub, point_complex(),
                            _collapse_to_point(t2, sub), name="nodal")


def one_point_curve_complex(grid=1):
    """2-torus with both coordinate circles collapsed; a 2-sphere."""
    t2 = torus_complex(2, grid, "T2")
    sub = cells_where(t2, 2, _fig8_predicate)
    return quotient_complex(t2, sub, point_complex(),
                            _collapse_to_point(t2, sub), name="onepoint")


def _collapse_to_point(cx: ChainComplex, labels, vertex=("v", 0)):
    vertices = set(cx.cells[0])
    images = {}
    for label in labels:
        images[label] = [(vertex, 1)] if label in vertices else []
    return CellularMap(images)


def build_model(name, grid=1) -> ChainComplex:
    """Build the named quotient model as a validated chain complex."""
    if name == "T3":
        return torus_complex(3, grid, "T3")
    if name not in MODEL_TABLE:
        raise ModelError(f"unknown model {name!r}; choose from {MODEL_NAMES} or T3")
    t3 = torus_complex(3, grid, "T3")

    if name == "M22":
        return product_complex(nodal_curve_complex(grid), circle_complex(grid), "M22")

    if name == "M11a":
        return product_complex(one_point_curve_complex(grid), circle_complex(grid), "M11a")

    if name == "M12":
        sub = cells_where(t3, 3, lambda c: c[0] == V0)
        return quotient_complex(t3, sub, point_complex(),
                                _collapse_to_point(t3, sub), name="M12")

    if name == "M01":
        sub = cells_where(t3, 3, _fig8_predicate)
        return quotient_complex(t3, sub, point_complex(),
                                _collapse_to_point(t3, sub), name="M01")

    if name == "M00":
        sub = cells_where(t3, 3, lambda c: V0 in c)
        return quotient_complex(t3, sub, point_complex(),
                                _collapse_to_point(t3, sub), name="M00")

    if name in ("M21", "M11b"):
        t2 = torus_complex(2, grid, "T2")
        fig8_labels = cells_where(t2, 2, _fig8_predicate)
        fig8 = extract_subcomplex(t2, fig8_labels, "fig8")
        sub = cells_where(t3, 3, _fig8_predicate)
        images = {}
        for label in sub:
            c1, c2, c3 = axis_components(label, 3)
            images[label] = [((c1, c2), 1)] if _is_vertex(c3) else []
        m21 = quotient_complex(t3, sub, fig8, CellularMap(images), name="M21")
        if name == "M21":
            return m21
        # contract the {x2 = 0} loop of the figure eight to the base point
        loop = [("t", l) for l in fig8_labels
                if axis_components(l, 2)[1] == V0]
        return quotient_complex(m21, loop, point_complex(),
                                _collapse_to_point(m21, loop), name="M11b")

    if name == "M10":
        circ = circle_complex(grid)
        sub = cells_where(t3, 3, lambda c: _fig8_predicate(c) or c[2] == V0)
        images = {}
        for label in sub:
            c1, c2, c3 = axis_components(label, 3)
            if _is_vertex(c1) and _is_vertex(c2):
                images[label] = [(c3, 1)]
            else:
                images[label] = []
        return quotient_complex(t3, sub, circ, CellularMap(images), name="M10")

    raise ModelError(f"unhandled model {name!r}")


@dataclass
class CohomologyResult:
    """Integer cohomology: free rank and torsion divisors per degree."""

    ranks: list
    torsion: list

    @property
    def betti(self):
        return tuple(self.ranks)

    def as_dict(self):
        return {
            "ranks": list(self.ranks),
            "torsion": [list(t) for t in self.torsion],
        }


def integral_cohomology(cx: ChainComplex) -> CohomologyResult:
    """Exact cohomology over the integers via Smith normal form.

    Free parts match homology; the degree-k torsion equals the degree-(k-1)
    homology torsion by universal coefficients.
    """
    cx.validate()
    hom = cx.homology()
    ranks = [free for free, _ in hom]
    torsion = [[]]
    for k in range(1, len(hom)):
        torsion.append(list(hom[k - 1][1]))
    # euler characteristic cross-check against the cell counts
    chi_cells = cx.euler_characteristic()
    chi_ranks = sum((-1) ** k * r for k, r in enumerate(ranks))
    if chi_cells != chi_ranks:
        raise ComplexError(
            f"euler characteristic mismatch: cells {chi_cells} vs ranks {chi_ranks}")
    return CohomologyResult(ranks, torsion)


def model_cohomology(name, grid=1) -> CohomologyResult:
    return integral_cohomology(build_model(name, grid))


def fibre_type_report(results=None, grid=1):
    """Table of (b1, b2) per model with the expected values and duality audit.

    results may be a precomputed {name: CohomologyResult}; missing models
    make the pairing audit fail.
    """
    if results is None:
        results = {name: model_cohomology(name, grid) for name in MODEL_NAMES}
    rows = []
    all_match = True
    for name in results:
        if name not in MODEL_TABLE:
            raise ModelError(f"unknown model {name!r} in results")
    for name, (expected, desc) in MODEL_TABLE.items():
        if name not in results:
            continue
        res = results[name]
        ranks = res.ranks + [0] * (4 - len(res.ranks))
        got = (ranks[1], ranks[2])
        match = got == expected
        all_match &= match
        rows.append({
            "model": name,
            "b": tuple(ranks[:4]),
            "type": got,
            "expected": expected,
            "matches": match,
            "torsion": [list(t) for t in res.torsion],
            "description": desc,
        })
    present = {row["type"] for row in rows}
    pairing = {}
    for (m, n) in sorted(present):
        pairing[f"({m},{n})"] = (n, m) in present
    return {
        "rows": rows,
        "expected_match": all_match,
        "pairing_audit": pairing,
        "pairing_ok": all(pairing.values()),
    }
