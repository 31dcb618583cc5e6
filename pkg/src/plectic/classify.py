"""Non-degeneracy, dimension-6 classification of closed 3-forms, and
type-specific flatness obstructions.

The classification runs through the endomorphism field J defined by
``(i_v w) ^ w = i_{J(v)} Vol``; the sign of trace(J^2) separates the three
non-degenerate linear types in dimension six, and flatness is then decided
per type: closedness of the decomposable summands (product type), the
Nijenhuis tensor of the normalized J (complex type), or involutivity of
ker J (tangent type).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import (
    ChartMismatch,
    DegreeError,
    DependentFrame,
    DegenerateForm,
    IrrationalScale,
    NotAlmostComplex,
    NotClosed,
    ShapeError,
    SingularVolume,
    WrongType,
)
from .exterior import (
    Chart,
    DiffForm,
    MultiVec,
    coordinate_vector,
    ext_d,
    full_contract,
    interior,
    merge_sign,
    vf_bracket,
)
from .scalar import RationalExpr, fraction_root

Q = Fraction

PRODUCT = "ProductType"
COMPLEX = "ComplexType"
TANGENT = "TangentType"
DEGENERATE = "Degenerate"
NONCONSTANT = "NonConstant"

FLAT = "Flat"
NONFLAT = "NonFlat"
UNDETERMINED = "Undetermined"

# number of non-degenerate 3-form types in dimension 6 (reference constant)
TYPE_COUNT_DIM6_DEG3 = 3


# ---------------------------------------------------------------------------
# sign determination
# ---------------------------------------------------------------------------

_SAMPLE_POOL_POS = [Q(1, 3), Q(1, 2), Q(1), Q(3, 2), Q(2), Q(3), Q(4)]
_SAMPLE_POOL_ANY = [Q(-3), Q(-2), Q(-1), Q(-1, 2), Q(1, 2), Q(1), Q(2), Q(3)]


@dataclass(frozen=True)
class SignReport:
    sign: str               # '+', '-', '0', 'mixed', '?'
    certified: bool
    witnesses: tuple = ()   # up to two (point, value) pairs


def _monomial_sign(expr: RationalExpr, chart: Chart) -> Optional[str]:
    """Sign when the expression is a monomial positive on the chart's orthant."""
    if expr.is_zero:
        return "0"
    if not (expr.num.is_monomial() and expr.den.is_monomial()):
        return None
    folded = expr.as_scalar()
    ((exps, c),) = folded.terms.items()
    for i, e in enumerate(exps, start=1):
        if e and i not in chart.positive:
            return None
    return "+" if c > 0 else "-"


def sign_on_chart(expr: RationalExpr, chart: Chart, samples: int = 48) -> SignReport:
    """Decide the sign of an expression on the chart.

    Certified for the zero expression, constants, and monomials supported on
    positivity-flagged variables; otherwise sampled on a deterministic
    rational grid (two exact witnesses are returned for sign changes).
    """
    if expr.is_zero:
        return SignReport("0", True)
    if expr.is_constant:
        v = expr.constant_value()
        return SignReport("+" if v > 0 else "-", True)
    mono = _monomial_sign(expr, chart)
    if mono is not None:
        return SignReport(mono, True)
    rng = random.Random(0x5E_ED)
    pos_w = None
    neg_w = None
    seen_nonzero = False
    for _ in range(samples):
        point = [
            rng.choice(_SAMPLE_POOL_POS if i in chart.positive else _SAMPLE_POOL_ANY)
            for i in range(1, chart.dim + 1)
        ]
        try:
            v = expr.eval(point)
        except Exception:
            continue
        if v > 0 and pos_w is None:
            pos_w = (tuple(point), v)
        elif v < 0 and neg_w is None:
            neg_w = (tuple(point), v)
        if v:
            seen_nonzero = True
        if pos_w and neg_w:
            return SignReport("mixed", True, (pos_w, neg_w))
    if pos_w and not neg_w:
        return SignReport("+", False, (pos_w,))
    if neg_w and not pos_w:
        return SignReport("-", False, (neg_w,))
    if not seen_nonzero:
        return SignReport("0", False)
    return SignReport("?", False)


# ---------------------------------------------------------------------------
# non-degeneracy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NondegeneracyReport:
    nondegenerate: bool
    kernel: tuple  # basis of the kernel of v -> i_v w, as MultiVecs

    def __bool__(self):
        return self.nondegenerate


def _contraction_matrix(w: DiffForm):
    """Rows: coefficient tuples of i_{e_v} w; columns: v = 1..dim."""
    chart = w.chart
    cols = []
    tuples = set()
    for v in range(1, chart.dim + 1):
        cv = interior(coordinate_vector(chart, v), w)
        cols.append(cv)
        tuples.update(cv.coeffs)
    rows = sorted(tuples)
    zero = RationalExpr.const(chart.dim, 0)
    matrix = [[cols[v].coeffs.get(t, zero) for v in range(chart.dim)] for t in rows]
    return matrix


def _contraction_matrix_at(w: DiffForm, pt) -> list:
    """Numeric contraction matrix at a point (rows: tuples, cols: basis)."""
    chart = w.chart
    values = [(idx, Q(c.eval(pt))) for idx, c in w.coeffs.items()]
    cols: list = [dict() for _ in range(chart.dim)]
    tuples = set()
    for idx, cv in values:
        for pos, i in enumerate(idx):
            rest = idx[:pos] + idx[pos + 1:]
            col = cols[i - 1]
            col[rest] = col.get(rest, Q(0)) + (-cv if pos % 2 else cv)
            tuples.add(rest)
    rows = sorted(tuples)
    return [[cols[v].get(t, Q(0)) for v in range(chart.dim)] for t in rows]


def nondegenerate(w: DiffForm, point: Optional[Sequence] = None) -> NondegeneracyReport:
    """Is v -> i_v w injective (exactly, at a point or over the fraction field)?"""
    if w.degree < 2:
        raise DegreeError("non-degeneracy test needs a form of degree >= 2")
    chart = w.chart
    if point is not None:
        matrix = _contraction_matrix_at(w, chart.check_point(point))
    else:
        matrix = _contraction_matrix(w)
    if not matrix:
        kernel_vecs = [coordinate_vector(chart, v) for v in range(1, chart.dim + 1)]
        return NondegeneracyReport(False, tuple(kernel_vecs))
    null = linalg.nullspace(matrix)
    if not null:
        return NondegeneracyReport(True, ())
    kernel_vecs = []
    for vec in null:
        coeffs = {(i + 1,): vec[i] for i in range(chart.dim) if vec[i]}
        kernel_vecs.append(MultiVec(chart, 1, coeffs))
    return NondegeneracyReport(False, tuple(kernel_vecs))


# ---------------------------------------------------------------------------
# the endomorphism field J
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EndField:
    """An endomorphism field: a dim x dim matrix of expressions."""

    chart: Chart
    matrix: tuple

    def __post_init__(self):
        d = self.chart.dim
        if len(self.matrix) != d or any(len(r) != d for r in self.matrix):
            raise ShapeError("endomorphism matrix must be square of chart dimension")

    @classmethod
    def from_rows(cls, chart: Chart, rows) -> "EndField":
        d = chart.dim
        conv = tuple(
            tuple(
                v if isinstance(v, RationalExpr) else RationalExpr.const(d, v)
                for v in row
            )
            for row in rows
        )
        return cls(chart, conv)

    @classmethod
    def identity(cls, chart: Chart) -> "EndField":
        d = chart.dim
        return cls.from_rows(
            chart, [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        )

    def entry(self, row: int, col: int) -> RationalExpr:
        return self.matrix[row - 1][col - 1]

    def column_field(self, col: int) -> MultiVec:
        coeffs = {
            (k,): self.matrix[k - 1][col - 1]
            for k in range(1, self.chart.dim + 1)
            if self.matrix[k - 1][col - 1]
        }
        return MultiVec(self.chart, 1, coeffs)

    def apply(self, X: MultiVec) -> MultiVec:
        if X.degree != 1:
            raise DegreeError("EndField acts on vector fields")
        d = self.chart.dim
        out = {}
        for k in range(1, d + 1):
            acc = RationalExpr.const(d, 0)
            for i in range(1, d + 1):
                xi = X.coeffs.get((i,))
                if xi is not None:
                    acc = acc + self.matrix[k - 1][i - 1] * xi
            if acc:
                out[(k,)] = acc
        return MultiVec(self.chart, 1, out)

    def compose(self, other: "EndField") -> "EndField":
        if other.chart != self.chart:
            raise ChartMismatch("composing endomorphisms on different charts")
        d = self.chart.dim
        rows = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = RationalExpr.const(d, 0)
                for k in range(d):
                    acc = acc + self.matrix[i][k] * other.matrix[k][j]
                row.append(acc)
            rows.append(tuple(row))
        return EndField(self.chart, tuple(rows))

    def square(self) -> "EndField":
        return self.compose(self)

    def trace(self) -> RationalExpr:
        d = self.chart.dim
        acc = RationalExpr.const(d, 0)
        for i in range(d):
            acc = acc + self.matrix[i][i]
        return acc

    def scale(self, c) -> "EndField":
        rows = tuple(tuple(v * c for v in row) for row in self.matrix)
        return EndField(self.chart, rows)

    def __add__(self, other: "EndField") -> "EndField":
        rows = tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(self.matrix, other.matrix)
        )
        return EndField(self.chart, rows)

    def __sub__(self, other: "EndField") -> "EndField":
        rows = tuple(
            tuple(a - b for a, b in zip(ra, rb))
            for ra, rb in zip(self.matrix, other.matrix)
        )
        return EndField(self.chart, rows)

    def __neg__(self) -> "EndField":
        return self.scale(RationalExpr.const(self.chart.dim, -1))

    def __eq__(self, other):
        if not isinstance(other, EndField):
            return NotImplemented
        if self.chart != other.chart:
            return False
        return all(
            a == b for ra, rb in zip(self.matrix, other.matrix) for a, b in zip(ra, rb)
        )

    def eval_at(self, point) -> "EndField":
        pt = self.chart.check_point(point)
        return EndField.from_rows(
            self.chart, [[v.eval(pt) for v in row] for row in self.matrix]
        )

    def is_multiple_of_identity(self) -> Optional[RationalExpr]:
        """The scalar s with self = s*I, or None."""
        d = self.chart.dim
        s = self.matrix[0][0]
        for i in range(d):
            for j in range(d):
                if i == j:
                    if not (self.matrix[i][j] == s):
                        return None
                elif self.matrix[i][j]:
                    return None
        return s


def standard_volume(chart: Chart) -> DiffForm:
    return DiffForm(chart, chart.dim, {tuple(range(1, chart.dim + 1)): 1})


def hitchin_endomorphism(w: DiffForm, vol: DiffForm) -> EndField:
    """The unique J with (i_v w) ^ w = i_{J(v)} vol, columnwise."""
    chart = w.chart
    if chart.dim != 6 or w.degree != 3:
        raise ShapeError("endomorphism extraction needs a 3-form in dimension 6")
    if vol.chart != chart:
        raise ChartMismatch("volume form lives on a different chart")
    if vol.degree != 6 or len(vol.coeffs) != 1:
        raise SingularVolume("volume must be a nonzero top-degree form")
    g = vol.coeffs.get(tuple(range(1, 7)))
    if g is None or not g:
        raise SingularVolume("volume coefficient vanishes identically")
    all_idx = tuple(range(1, 7))
    zero = RationalExpr.const(6, 0)
    cols = []
    for i in range(1, 7):
        five = interior(coordinate_vector(chart, i), w).wedge(w)
        col = []
        for j in range(1, 7):
            comp = tuple(k for k in all_idx if k != j)
            b = five.coeffs.get(comp, zero)
            entry = b / g
            if (j - 1) % 2:
                entry = -entry
            col.append(entry)
        cols.append(col)
    rows = tuple(tuple(cols[i][j] for i in range(6)) for j in range(6))
    return EndField(chart, rows)


# ---------------------------------------------------------------------------
# classification and flatness
# ---------------------------------------------------------------------------


@dataclass
class TypeReport:
    linear_type: str
    trace_sign: str
    flat: str = UNDETERMINED
    witness: object = None
    witness_kind: Optional[str] = None
    points: list = field(default_factory=list)
    notes: list = field(default_factory=list)


def _require_closed_3form_dim6(w: DiffForm):
    if w.chart.dim != 6 or w.degree != 3:
        raise ShapeError("classification needs a 3-form on a 6-dimensional chart")
    if ext_d(w):
        raise NotClosed("the form is not closed")


def _pointwise_trace_sq(values: Dict[Tuple[int, int, int], Fraction]) -> Fraction:
    """trace(J(p)^2) for a constant 3-form in dimension 6, raw Fractions.

    Same contraction/wedge conventions as hitchin_endomorphism, specialized
    to numeric coefficients for speed.
    """
    all_idx = (1, 2, 3, 4, 5, 6)
    J = [[Q(0)] * 6 for _ in range(6)]
    for i in range(1, 7):
        two: Dict[Tuple[int, int], Fraction] = {}
        for idx, c in values.items():
            if i not in idx:
                continue
            pos = idx.index(i)
            rest = idx[:pos] + idx[pos + 1:]
            two[rest] = two.get(rest, Q(0)) + (-c if pos % 2 else c)
        five: Dict[Tuple[int, ...], Fraction] = {}
        for (a, b), ca in two.items():
            for idx, cb in values.items():
                if a in idx or b in idx:
                    continue
                merged, sign = merge_sign((a, b), idx)
                five[merged] = five.get(merged, Q(0)) + sign * ca * cb
        for j in range(1, 7):
            comp = tuple(k for k in all_idx if k != j)
            bj = five.get(comp, Q(0))
            J[j - 1][i - 1] = -bj if (j - 1) % 2 else bj
    return sum(J[i][k] * J[k][i] for i in range(6) for k in range(6))


def classify6(w: DiffForm, point: Sequence) -> TypeReport:
    """Linear type of a closed 3-form on a 6-chart at a point."""
    _require_closed_3form_dim6(w)
    pt = w.chart.check_point(point)
    values = {idx: Q(c.eval(pt)) for idx, c in w.coeffs.items()}
    tv = _pointwise_trace_sq(values)
    if tv > 0:
        return TypeReport(PRODUCT, "+", points=[list(point)])
    if tv < 0:
        return TypeReport(COMPLEX, "-", points=[list(point)])
    if nondegenerate(w, point):
        return TypeReport(TANGENT, "0", points=[list(point)])
    return TypeReport(DEGENERATE, "0", points=[list(point)])


def _sqrt_rational_expr(expr: RationalExpr) -> RationalExpr:
    """Exact square root of a monomial quotient, or IrrationalScale."""
    try:
        return RationalExpr(expr.num.monomial_root(2), expr.den.monomial_root(2))
    except Exception as exc:
        raise IrrationalScale(f"no exact square root of {expr}: {exc}") from None


def _split_parts(w: DiffForm, J: EndField, s: RationalExpr) -> Tuple[DiffForm, DiffForm]:
    chart = w.chart
    A = J.scale(RationalExpr.const(6, 1) / s)
    half = RationalExpr.const(6, Q(1, 2))
    ident = EndField.identity(chart)
    parts = []
    for pm in (ident + A, ident - A):
        P = pm.scale(half)
        cols = [P.column_field(i) for i in range(1, 7)]
        coeffs = {}
        for idx in combinations(range(1, 7), 3):
            val = full_contract(w, [cols[idx[0] - 1], cols[idx[1] - 1], cols[idx[2] - 1]])
            if val:
                coeffs[idx] = val
        parts.append(DiffForm(chart, 3, coeffs))
    return parts[0], parts[1]


def _is_decomposable(part: DiffForm) -> bool:
    """Pointwise decomposability: part ^ part = 0 and contraction rank 3."""
    if part.wedge(part):
        return False
    matrix = _contraction_matrix(part)
    if not matrix:
        return False
    return linalg.rank(matrix) == 3


def _tie_break(a: DiffForm, b: DiffForm) -> Tuple[DiffForm, DiffForm]:
    """Deterministic labeling: at the first index tuple (lex order) where the
    parts differ, the part whose difference has positive leading numerator
    coefficient comes first."""
    keys = sorted(set(a.coeffs) | set(b.coeffs))
    zero = RationalExpr.const(a.chart.dim, 0)
    for key in keys:
        ca = a.coeffs.get(key, zero)
        cb = b.coeffs.get(key, zero)
        diff = ca - cb
        if diff:
            lead = diff.num.leading_coeff()
            positive = lead > 0 if not hasattr(lead, "re") else lead.re > 0
            return (a, b) if positive else (b, a)
    return a, b


def split_product(w: DiffForm, point: Optional[Sequence] = None,
                  mode: str = "exact"):
    """Split a product-type form into its two decomposable summands.

    Symbolic when ``point`` is None; otherwise pointwise.  Exact mode raises
    :class:`IrrationalScale` when sqrt(trace(J^2)/6) leaves the ring; float
    mode (pointwise only) returns coefficient dictionaries with a residual
    checked against 1e-9.
    """
    _require_closed_3form_dim6(w)
    J = hitchin_endomorphism(w, standard_volume(w.chart))
    lam = J.square().trace() / RationalExpr.const(6, 6)
    if mode == "float":
        if point is None:
            raise ShapeError("float split is pointwise; supply a point")
        return _split_product_float(w, J, lam, point)
    if point is not None:
        pt = w.chart.check_point(point)
        lam_v = lam.eval(pt)
        if lam_v <= 0:
            raise WrongType(f"trace sign is not positive at {list(point)}")
        root = fraction_root(lam_v, 2)
        if root is None:
            raise IrrationalScale(f"sqrt({lam_v}) is irrational; rerun in float mode")
        w_here = w.eval_at(pt)
        J_here = J.eval_at(pt)
        s = RationalExpr.const(6, root)
        p1, p2 = _split_parts(w_here, J_here, s)
        w_used = w_here
    else:
        sign = sign_on_chart(lam, w.chart)
        if sign.sign != "+":
            raise WrongType(f"trace sign is {sign.sign}, not positive")
        s = _sqrt_rational_expr(lam)
        p1, p2 = _split_parts(w, J, s)
        w_used = w
    if p1 + p2 != w_used:
        raise DegenerateForm("projector split failed to reconstruct the form")
    if not (_is_decomposable(p1) and _is_decomposable(p2)):
        raise WrongType("split parts are not decomposable; form is not product type")
    return _tie_break(p1, p2)


def _split_product_float(w: DiffForm, J: EndField, lam: RationalExpr,
                         point: Sequence):
    import math

    pt = w.chart.check_point(point)
    lam_v = lam.eval(pt, mode="float")
    if lam_v <= 0:
        raise WrongType(f"trace sign is not positive at {list(point)}")
    s = math.sqrt(lam_v)
    d = w.chart.dim
    Jv = [[float(J.matrix[i][j].eval(pt, mode="float")) for j in range(d)]
          for i in range(d)]
    P = [[((1.0 if i == j else 0.0) + Jv[i][j] / s) / 2.0 for j in range(d)]
         for i in range(d)]
    wv = {idx: float(c.eval(pt, mode="float")) for idx, c in w.coeffs.items()}

    def tri(Pm, i, j, k):
        total = 0.0
        for (a, b, c), cv in wv.items():
            acc = 0.0
            for pa, pb, pc in (
                (a, b, c), (b, c, a), (c, a, b),
            ):
                acc += Pm[pa - 1][i] * Pm[pb - 1][j] * Pm[pc - 1][k]
            for pa, pb, pc in (
                (b, a, c), (a, c, b), (c, b, a),
            ):
                acc -= Pm[pa - 1][i] * Pm[pb - 1][j] * Pm[pc - 1][k]
            total += cv * acc
        return total

    Pminus = [[(1.0 if i == j else 0.0) - P[i][j] + (0.0 if i != j else 0.0)
               for j in range(d)] for i in range(d)]
    # P- = I - P
    parts = []
    for Pm in (P, Pminus):
        coeffs = {}
        for idx in combinations(range(1, 7), 3):
            v = tri(Pm, idx[0] - 1, idx[1] - 1, idx[2] - 1)
            if abs(v) > 1e-12:
                coeffs[idx] = v
        parts.append(coeffs)
    residual = 0.0
    for idx in set(wv) | set(parts[0]) | set(parts[1]):
        residual = max(
            residual,
            abs(parts[0].get(idx, 0.0) + parts[1].get(idx, 0.0) - wv.get(idx, 0.0)),
        )
    if residual > 1e-9:
        raise WrongType(f"float split residual {residual} exceeds 1e-9")
    return parts[0], parts[1]


def verify_product_decomposition(w: DiffForm, parts: Sequence[DiffForm]) -> bool:
    """Verify a user-supplied k-part decomposition into decomposable summands.

    The k > 2 search is out of scope; this checks the candidate: the parts
    sum to w, and each is pointwise decomposable of the common rank
    (part ^ part = 0 and contraction rank equal to the degree).
    """
    if not parts:
        return False
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    if total != w:
        return False
    m = w.degree
    for p in parts:
        if p.degree != m or p.is_zero:
            return False
        if p.wedge(p):
            return False
        matrix = _contraction_matrix(p)
        if linalg.rank(matrix) != m:
            return False
    return True


# ---------------------------------------------------------------------------
# almost-complex structures
# ---------------------------------------------------------------------------


def extract_acs(w: DiffForm) -> EndField:
    """Almost-complex structure of a complex-volume-type m-form on a 2m chart.

    Solves the linear system i_{A u} i_v w = i_u i_{A v} w over the fraction
    field; the solution space must be two-dimensional (span of identity and
    J); returns the traceless element scaled to J^2 = -I with the sign fixed
    by the chart's standard orientation.
    """
    chart = w.chart
    d = chart.dim
    if d % 2 or w.degree * 2 != d:
        raise ShapeError("need an m-form on a 2m-dimensional chart")
    m = w.degree
    if m < 2:
        raise ShapeError("need m >= 2")
    zero = RationalExpr.const(d, 0)
    basis = [coordinate_vector(chart, i) for i in range(1, d + 1)]
    contr = [[interior(basis[k], interior(basis[j], w)) for k in range(d)]
             for j in range(d)]  # contr[j][k] = i_{e_{k+1}} i_{e_{j+1}} w
    tuples = sorted({t for row in contr for f in row for t in f.coeffs})
    rows = []
    for i in range(d):
        for j in range(i, d):
            for t in tuples:
                row = [zero] * (d * d)
                for k in range(d):
                    # + A[k][i] * coeff of i_{e_k} i_{e_j} w
                    c1 = contr[j][k].coeffs.get(t)
                    if c1 is not None:
                        row[k * d + i] = row[k * d + i] + c1
                    # - A[k][j] * coeff of i_{e_i} i_{e_k} w
                    c2 = contr[k][i].coeffs.get(t)
                    if c2 is not None:
                        row[k * d + j] = row[k * d + j] - c2
                if any(row):
                    rows.append(row)
    null = linalg.nullspace(rows)
    if len(null) != 2:
        raise WrongType(
            f"compatibility system has solution dimension {len(null)}, expected 2"
        )

    def to_end(vec) -> EndField:
        return EndField(chart, tuple(
            tuple(vec[k * d + j] for j in range(d)) for k in range(d)
        ))

    B1, B2 = (to_end(v) for v in null)
    t1, t2 = B1.trace(), B2.trace()
    T = B1.scale(t2) - B2.scale(t1)
    if all(not v for row in T.matrix for v in row):
        raise WrongType("no traceless solution: form is not of complex-volume type")
    s = T.square().is_multiple_of_identity()
    if s is None:
        raise WrongType("traceless solution does not square to a multiple of I")
    neg_s = -s
    sgn = sign_on_chart(neg_s, chart)
    if sgn.sign != "+":
        raise WrongType("traceless solution squares to +I; not complex-volume type")
    sigma = _sqrt_rational_expr(neg_s)
    J = T.scale(RationalExpr.const(d, 1) / sigma)
    # orientation: the frame (e1, J e1, e2', J e2', ...) must be positive
    frame_cols: List[List[RationalExpr]] = []

    def add_col(vec: MultiVec):
        frame_cols.append([vec.coeffs.get((k,), zero) for k in range(1, d + 1)])

    used = []
    for i in range(1, d + 1):
        cand = [c for c in frame_cols]
        col = [RationalExpr.const(d, 1) if k == i else zero for k in range(1, d + 1)]
        if linalg.rank([[cand[j][k] for j in range(len(cand))] + [col[k]]
                        for k in range(d)]) <= len(cand):
            continue
        e_i = coordinate_vector(chart, i)
        add_col(e_i)
        add_col(J.apply(e_i))
        used.append(i)
        if len(frame_cols) == d:
            break
    det = linalg.det([[frame_cols[j][k] for j in range(d)] for k in range(d)])
    det_sign = sign_on_chart(det, chart)
    if det_sign.sign == "-":
        J = -J
    if not J.square() == EndField.identity(chart).scale(RationalExpr.const(d, -1)):
        raise WrongType("normalized solution does not satisfy J^2 = -I")
    return J


def nijenhuis(J: EndField):
    """Nijenhuis tensor of an almost-complex structure on coordinate pairs."""
    chart = J.chart
    d = chart.dim
    minus_id = EndField.identity(chart).scale(RationalExpr.const(d, -1))
    if not J.square() == minus_id:
        raise NotAlmostComplex("J^2 != -I")
    values: Dict[Tuple[int, int], MultiVec] = {}
    cols = [J.column_field(i) for i in range(1, d + 1)]
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            ei = coordinate_vector(chart, i)
            ej = coordinate_vector(chart, j)
            term = vf_bracket(cols[i - 1], cols[j - 1])
            term = term - J.apply(vf_bracket(cols[i - 1], ej))
            term = term - J.apply(vf_bracket(ei, cols[j - 1]))
            term = term - vf_bracket(ei, ej)
            if term:
                values[(i, j)] = term
    return NijenhuisReport(chart, values)


@dataclass(frozen=True)
class NijenhuisReport:
    chart: Chart
    values: dict

    @property
    def integrable(self) -> bool:
        return not self.values

    def __bool__(self):
        return self.integrable


# ---------------------------------------------------------------------------
# involutivity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvolutivityReport:
    involutive: bool
    witness_pair: Optional[Tuple[int, int]] = None
    witness_bracket: Optional[MultiVec] = None

    def __bool__(self):
        return self.involutive


def involutive(frame: Sequence[MultiVec]) -> InvolutivityReport:
    """Frobenius test: do all pairwise brackets stay in the frame's span?"""
    if not frame:
        raise DependentFrame("empty frame")
    chart = frame[0].chart
    d = chart.dim
    zero = RationalExpr.const(d, 0)
    for X in frame:
        if X.degree != 1 or X.chart != chart:
            raise ShapeError("frame must consist of vector fields on one chart")
    cols = [[X.coeffs.get((k,), zero) for X in frame] for k in range(1, d + 1)]
    if linalg.rank(cols) != len(frame):
        raise DependentFrame("frame is linearly dependent over the fraction field")
    for a in range(len(frame)):
        for b in range(a + 1, len(frame)):
            br = vf_bracket(frame[a], frame[b])
            rhs = [br.coeffs.get((k,), zero) for k in range(1, d + 1)]
            sol, _free = linalg.solve(cols, rhs)
            if sol is None:
                return InvolutivityReport(False, (a + 1, b + 1), br)
    return InvolutivityReport(True)


# ---------------------------------------------------------------------------
# flatness
# ---------------------------------------------------------------------------


def _float_sample_point(w: DiffForm, chart: Chart):
    """A deterministic admissible sample point for float fallbacks."""
    point = [Q(1) if i in chart.positive else Q(1, 2)
             for i in range(1, chart.dim + 1)]
    try:
        w.eval_at(point)
    except Exception:
        return None
    return point


def flatness_report(w: DiffForm) -> TypeReport:
    """Full trichotomy with the per-type flatness obstruction."""
    _require_closed_3form_dim6(w)
    chart = w.chart
    J = hitchin_endomorphism(w, standard_volume(chart))
    t = J.square().trace()
    sig = sign_on_chart(t, chart)
    notes = [] if sig.certified else ["trace sign decided by rational sampling"]

    if sig.sign == "mixed":
        pts = [list(map(str, wpt)) for wpt, _v in sig.witnesses]
        return TypeReport(NONCONSTANT, "mixed", UNDETERMINED,
                          points=pts, notes=notes)
    if sig.sign == "?":
        return TypeReport(NONCONSTANT, "?", UNDETERMINED,
                          notes=notes + ["sign sampling inconclusive"])

    if sig.sign == "+":
        try:
            w1, w2 = split_product(w)
        except IrrationalScale as exc:
            extra = [f"exact split unavailable: {exc}"]
            sample = _float_sample_point(w, chart)
            if sample is not None:
                try:
                    split_product(w, point=sample, mode="float")
                    extra.append(
                        "float split at "
                        f"{[str(v) for v in sample]} decomposes within 1e-9; "
                        "flatness not exactly certifiable"
                    )
                except Exception:
                    pass
            return TypeReport(PRODUCT, "+", UNDETERMINED, notes=notes + extra)
        d1, d2 = ext_d(w1), ext_d(w2)
        if d1.is_zero and d2.is_zero:
            return TypeReport(PRODUCT, "+", FLAT, notes=notes)
        witness = d1 if not d1.is_zero else d2
        return TypeReport(PRODUCT, "+", NONFLAT, witness=witness,
                          witness_kind="exterior-derivative", notes=notes)

    if sig.sign == "-":
        scale = RationalExpr.const(6, -6) / t
        try:
            sigma = _sqrt_rational_expr(scale)
        except IrrationalScale as exc:
            return TypeReport(COMPLEX, "-", UNDETERMINED,
                              notes=notes + [f"exact normalization unavailable: {exc}"])
        Jt = J.scale(sigma)
        rep = nijenhuis(Jt)
        if rep.integrable:
            return TypeReport(COMPLEX, "-", FLAT, notes=notes)
        (pair, val) = sorted(rep.values.items())[0]
        return TypeReport(COMPLEX, "-", NONFLAT, witness=val,
                          witness_kind=f"nijenhuis{pair}", notes=notes)

    # trace sign zero
    nd = nondegenerate(w)
    if not nd:
        return TypeReport(DEGENERATE, "0", UNDETERMINED,
                          notes=notes + ["form is degenerate"])
    null = linalg.nullspace([list(row) for row in J.matrix])
    frame = []
    for vec in null:
        coeffs = {(k + 1,): vec[k] for k in range(chart.dim) if vec[k]}
        frame.append(MultiVec(chart, 1, coeffs))
    if not frame:
        return TypeReport(TANGENT, "0", UNDETERMINED,
                          notes=notes + ["kernel of J is trivial"])
    rep = involutive(frame)
    if rep:
        return TypeReport(TANGENT, "0", FLAT, notes=notes)
    return TypeReport(TANGENT, "0", NONFLAT, witness=rep.witness_bracket,
                      witness_kind=f"bracket{rep.witness_pair}", notes=notes)


# ---------------------------------------------------------------------------
# standard subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardSubspaceReport:
    ok: bool
    pairwise_isotropic: bool
    rank: int
    frame_size: int
    quotient_power_dim: int
    failing_pair: Optional[Tuple[int, int]] = None

    def __bool__(self):
        return self.ok


def verify_standard_subspace(w: DiffForm, frame: Sequence[MultiVec]) -> StandardSubspaceReport:
    """Check that the frame spans a standard subspace for the form.

    Requires i_{u^v} w = 0 for all frame pairs and that w -> w(w_vec, .)
    induces an isomorphism onto Lambda^n of the quotient's dual.
    """
    if not frame:
        raise DependentFrame("empty frame")
    chart = frame[0].chart
    d = chart.dim
    n = w.degree - 1
    zero = RationalExpr.const(d, 0)
    cols = [[X.coeffs.get((k,), zero) for X in frame] for k in range(1, d + 1)]
    if linalg.rank(cols) != len(frame):
        raise DependentFrame("frame is linearly dependent over the fraction field")
    r = len(frame)
    for a in range(r):
        for b in range(a + 1, r):
            if interior(frame[b], interior(frame[a], w)):
                return StandardSubspaceReport(
                    False, False, 0, r, 0, failing_pair=(a + 1, b + 1)
                )
    # complement basis: standard vectors extending the frame to full rank
    complement: List[MultiVec] = []
    one = RationalExpr.const(d, 1)
    current = [list(row) for row in cols]
    rank_now = r
    for i in range(1, d + 1):
        trial = [current[k] + [one if k == i - 1 else zero] for k in range(d)]
        new_rank = linalg.rank(trial)
        if new_rank > rank_now:
            rank_now = new_rank
            current = trial
            complement.append(coordinate_vector(chart, i))
        if rank_now == d:
            break
    quotient_dim = len(complement)
    power = list(combinations(range(quotient_dim), n))
    matrix = []
    for combo in power:
        row = []
        for X in frame:
            val = full_contract(w, [X] + [complement[c] for c in combo])
            row.append(val)
        matrix.append(row)
    rk = linalg.rank(matrix) if matrix else 0
    ok = rk == r and len(power) == r
    return StandardSubspaceReport(ok, True, rk, r, len(power))
