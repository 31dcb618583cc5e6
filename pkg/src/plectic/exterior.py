"""Sparse exterior calculus on a coordinate chart.

Conventions fixed here and relied on everywhere else:

* coefficients are :class:`RationalExpr` over the chart's variables and
  index tuples are strictly increasing (signs normalize at insertion);
* the interior product by a decomposable multivector inverts the order,
  ``i_{u^v} a = i_v (i_u a)``, so ``i_{e_I} = i_{e_im} o ... o i_{e_i1}``
  for an increasing tuple I;
* the Lie derivative along a vector field is the Cartan formula
  ``i_X d + d i_X`` by definition;
* the canonical pairing of a k-form with k vectors is
  ``a(v1,..,vk) = i_{vk} ... i_{v1} a``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import linalg
from .errors import (
    ChartMismatch,
    DegreeError,
    DomainViolation,
    HomotopyPole,
    ShapeError,
    SingularVolume,
)
from .scalar import (
    Fraction,
    RationalExpr,
    ScalarExpr,
    parse_expression,
)

Q = Fraction

IndexTuple = Tuple[int, ...]


@dataclass(frozen=True)
class Chart:
    """A named coordinate system; positivity flags license fractional powers."""

    dim: int
    var_names: Tuple[str, ...]
    positive: frozenset = frozenset()
    star_shaped: bool = True

    def __post_init__(self):
        if self.dim < 1:
            raise ShapeError("chart dimension must be positive")
        if len(self.var_names) != self.dim:
            raise ShapeError("variable name count differs from dimension")
        if len(set(self.var_names)) != self.dim:
            raise ShapeError("variable names must be unique")
        if not set(self.positive) <= set(range(1, self.dim + 1)):
            raise ShapeError("positive_vars outside 1..dim")

    def check_point(self, point: Sequence) -> List[Fraction]:
        if len(point) != self.dim:
            raise ShapeError(f"point length {len(point)} != dim {self.dim}")
        pt = [Fraction(v) for v in point]
        for i in self.positive:
            if pt[i - 1] <= 0:
                raise DomainViolation(
                    f"coordinate {self.var_names[i - 1]} must be positive, got {pt[i - 1]}"
                )
        return pt


def chart(dim: int, positive: Iterable[int] = (), names: Optional[Sequence[str]] = None,
          star_shaped: bool = True) -> Chart:
    if names is None:
        names = tuple(f"x{i}" for i in range(1, dim + 1))
    return Chart(dim, tuple(names), frozenset(positive), star_shaped)


def euclidean(dim: int) -> Chart:
    return chart(dim)


def _coerce_coeff(c, dim: int) -> RationalExpr:
    if isinstance(c, RationalExpr):
        return c
    if isinstance(c, ScalarExpr):
        return RationalExpr(c)
    if isinstance(c, str):
        return parse_expression(c, dim)
    return RationalExpr.const(dim, c)


def sort_index_tuple(idx: Sequence[int]) -> Tuple[Optional[IndexTuple], int]:
    """Sort an index tuple; returns (sorted tuple, parity sign) or (None, 0)."""
    lst = list(idx)
    if len(set(lst)) != len(lst):
        return None, 0
    sign = 1
    for i in range(1, len(lst)):
        j = i
        while j > 0 and lst[j - 1] > lst[j]:
            lst[j - 1], lst[j] = lst[j], lst[j - 1]
            sign = -sign
            j -= 1
    return tuple(lst), sign


def merge_sign(a: IndexTuple, b: IndexTuple) -> Tuple[Optional[IndexTuple], int]:
    """Shuffle sign of concatenating two increasing tuples."""
    if set(a) & set(b):
        return None, 0
    sign = 1
    inversions = 0
    for x in a:
        for y in b:
            if x > y:
                inversions += 1
    if inversions % 2:
        sign = -1
    merged = tuple(sorted(a + b))
    return merged, sign


class _Alternating:
    """Shared implementation of DiffForm and MultiVec."""

    __slots__ = ("chart", "degree", "coeffs")

    def __init__(self, chart: Chart, degree: int,
                 coeffs: Mapping[IndexTuple, object] | None = None):
        if degree < 0:
            raise DegreeError("negative degree")
        if degree > chart.dim:
            # representable only as the zero tensor; cap silently
            coeffs = {}
            degree = chart.dim
        clean: Dict[IndexTuple, RationalExpr] = {}
        if coeffs:
            for idx, c in coeffs.items():
                idx = tuple(int(i) for i in idx)
                if len(idx) != degree:
                    raise DegreeError(
                        f"index tuple {idx} has length {len(idx)}, degree is {degree}"
                    )
                if any(not 1 <= i <= chart.dim for i in idx):
                    raise ShapeError(f"index out of range in {idx}")
                if any(idx[i] >= idx[i + 1] for i in range(len(idx) - 1)):
                    raise ShapeError(f"index tuple {idx} not strictly increasing")
                c = _coerce_coeff(c, chart.dim)
                if c:
                    if idx in clean:
                        s = clean[idx] + c
                        if s:
                            clean[idx] = s
                        else:
                            del clean[idx]
                    else:
                        clean[idx] = c
        for c in clean.values():
            bad = c.fractional_vars() - set(chart.positive)
            if bad:
                raise DomainViolation(
                    f"fractional exponent on variable(s) {sorted(bad)} "
                    "not flagged positive on the chart"
                )
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, *a):
        raise AttributeError(f"{type(self).__name__} is immutable")

    # -- basics ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def _check(self, other):
        if type(other) is not type(self):
            raise ShapeError(f"expected {type(self).__name__}")
        if other.chart != self.chart:
            raise ChartMismatch("operands live on different charts")

    def __add__(self, other):
        self._check(other)
        if self.degree != other.degree:
            if self.is_zero:
                return other
            if other.is_zero:
                return self
            raise DegreeError("adding forms of different degrees")
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            s = out.get(idx)
            s = c if s is None else s + c
            if s:
                out[idx] = s
            elif idx in out:
                del out[idx]
        return type(self)(self.chart, self.degree, out)

    def __neg__(self):
        return type(self)(self.chart, self.degree,
                          {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = _coerce_coeff(c, self.chart.dim)
        if not c:
            return type(self)(self.chart, self.degree, {})
        return type(self)(self.chart, self.degree,
                          {i: v * c for i, v in self.coeffs.items()})

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if self.chart != other.chart:
            return False
        if self.is_zero and other.is_zero:
            return True
        if self.degree != other.degree:
            return False
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(self.coeffs[i] == other.coeffs[i] for i in self.coeffs)

    def __hash__(self):
        return hash((type(self).__name__, self.chart, self.degree,
                     frozenset(self.coeffs)))

    def coeff(self, idx: Sequence[int]) -> RationalExpr:
        key, sign = sort_index_tuple(tuple(idx))
        if key is None:
            return RationalExpr.const(self.chart.dim, 0)
        c = self.coeffs.get(key)
        if c is None:
            return RationalExpr.const(self.chart.dim, 0)
        return c if sign == 1 else -c

    def wedge(self, other):
        self._check(other)
        deg = self.degree + other.degree
        if deg > self.chart.dim:
            return type(self)(self.chart, self.chart.dim, {})
        out: Dict[IndexTuple, RationalExpr] = {}
        for ia, ca in self.coeffs.items():
            for ib, cb in other.coeffs.items():
                merged, sign = merge_sign(ia, ib)
                if merged is None:
                    continue
                term = ca * cb
                if sign < 0:
                    term = -term
                s = out.get(merged)
                s = term if s is None else s + term
                if s:
                    out[merged] = s
                elif merged in out:
                    del out[merged]
        return type(self)(self.chart, deg, out)

    def eval_at(self, point: Sequence):
        """Constant-coefficient tensor of the same kind at a point."""
        pt = self.chart.check_point(point)
        return type(self)(
            self.chart, self.degree,
            {i: RationalExpr.const(self.chart.dim, c.eval(pt))
             for i, c in self.coeffs.items()},
        )

    def map_coeffs(self, fn):
        return type(self)(self.chart, self.degree,
                          {i: fn(c) for i, c in self.coeffs.items()})

    def terms_str(self, basis_symbol: str) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for idx in sorted(self.coeffs):
            c = self.coeffs[idx]
            label = basis_symbol + "".join(f"[{i}]" for i in idx) if idx else "1"
            parts.append(f"({c}) {label}")
        return " + ".join(parts)


class DiffForm(_Alternating):
    """Covariant alternating tensor (degree may be zero)."""

    def __repr__(self):
        return f"DiffForm<{self.degree}>({self.terms_str('dx')})"


class MultiVec(_Alternating):
    """Contravariant alternating tensor of degree >= 1."""

    def __init__(self, chart, degree, coeffs=None):
        if degree < 1:
            raise DegreeError("multivector degree must be >= 1")
        super().__init__(chart, degree, coeffs)

    def __repr__(self):
        return f"MultiVec<{self.degree}>({self.terms_str('e')})"


def form(chart: Chart, degree: int, coeffs=None) -> DiffForm:
    return DiffForm(chart, degree, coeffs or {})


def multivec(chart: Chart, degree: int, coeffs=None) -> MultiVec:
    return MultiVec(chart, degree, coeffs or {})


def zero_form(chart: Chart, degree: int = 0) -> DiffForm:
    return DiffForm(chart, degree, {})


def function_form(chart: Chart, expr) -> DiffForm:
    """Degree-0 form from an expression (string, scalar or rational)."""
    return DiffForm(chart, 0, {(): _coerce_coeff(expr, chart.dim)})


def coordinate_vector(chart: Chart, index: int) -> MultiVec:
    return MultiVec(chart, 1, {(index,): 1})


def basis_one_form(chart: Chart, index: int) -> DiffForm:
    return DiffForm(chart, 1, {(index,): 1})


def wedge(a, b):
    return a.wedge(b)


def wedge_all(factors: Sequence) -> DiffForm:
    it = iter(factors)
    out = next(it)
    for f in it:
        out = out.wedge(f)
    return out


def ext_d(a: DiffForm) -> DiffForm:
    """Exterior derivative."""
    chart_ = a.chart
    deg = a.degree + 1
    if deg > chart_.dim:
        return DiffForm(chart_, chart_.dim, {})
    out: Dict[IndexTuple, RationalExpr] = {}
    for idx, c in a.coeffs.items():
        members = set(idx)
        for i in range(1, chart_.dim + 1):
            if i in members:
                continue
            dc = c.partial(i)
            if not dc:
                continue
            key, sign = sort_index_tuple((i,) + idx)
            term = dc if sign == 1 else -dc
            s = out.get(key)
            s = term if s is None else s + term
            if s:
                out[key] = s
            elif key in out:
                del out[key]
    return DiffForm(chart_, deg, out)


def _contract_one(idx: IndexTuple, i: int) -> Tuple[Optional[IndexTuple], int]:
    """i_{e_i} dx^idx: remove index i with position sign."""
    if i not in idx:
        return None, 0
    pos = idx.index(i)
    return idx[:pos] + idx[pos + 1:], -1 if pos % 2 else 1


def interior(X: MultiVec, a: DiffForm) -> DiffForm:
    """Interior product with the inverted-order convention."""
    if X.chart != a.chart:
        raise ChartMismatch("multivector and form live on different charts")
    if X.degree > a.degree:
        raise DegreeError(
            f"contracting degree-{a.degree} form by degree-{X.degree} multivector"
        )
    out: Dict[IndexTuple, RationalExpr] = {}
    for vidx, vc in X.coeffs.items():
        for fidx, fc in a.coeffs.items():
            cur, sign = fidx, 1
            ok = True
            for i in vidx:  # i_{e_I} = i_{e_{i_m}} o ... o i_{e_{i_1}}
                cur, s = _contract_one(cur, i)
                if cur is None:
                    ok = False
                    break
                sign *= s
            if not ok:
                continue
            term = vc * fc
            if sign < 0:
                term = -term
            s = out.get(cur)
            s = term if s is None else s + term
            if s:
                out[cur] = s
            elif cur in out:
                del out[cur]
    return DiffForm(a.chart, a.degree - X.degree, out)


def lie_derivative(X: MultiVec, a: DiffForm) -> DiffForm:
    """Cartan formula i_X(da) + d(i_X a); X must be a vector field."""
    if X.degree != 1:
        raise DegreeError("Lie derivative along a multivector of degree > 1")
    if a.degree == 0:
        return interior(X, ext_d(a))
    return interior(X, ext_d(a)) + ext_d(interior(X, a))


def full_contract(a: DiffForm, vectors: Sequence[MultiVec]) -> RationalExpr:
    """a(v1,..,vk) as a function, via iterated interior products."""
    res: DiffForm = a
    for v in vectors:
        res = interior(v, res)
    if res.degree != 0:
        raise DegreeError("contraction did not reach degree zero")
    return res.coeffs.get((), RationalExpr.const(a.chart.dim, 0))


def vf_bracket(X: MultiVec, Y: MultiVec) -> MultiVec:
    """Lie bracket of two vector fields."""
    if X.degree != 1 or Y.degree != 1:
        raise DegreeError("bracket needs two vector fields")
    if X.chart != Y.chart:
        raise ChartMismatch("bracket of fields on different charts")
    dim = X.chart.dim
    out = {}
    for k in range(1, dim + 1):
        acc = RationalExpr.const(dim, 0)
        yk = Y.coeffs.get((k,))
        xk = X.coeffs.get((k,))
        for i in range(1, dim + 1):
            xi = X.coeffs.get((i,))
            yi = Y.coeffs.get((i,))
            if xi is not None and yk is not None:
                acc = acc + xi * yk.partial(i)
            if yi is not None and xk is not None:
                acc = acc - yi * xk.partial(i)
        if acc:
            out[(k,)] = acc
    return MultiVec(X.chart, 1, out)


@dataclass(frozen=True)
class SmoothMap:
    """A map between charts given by one component expression per target var."""

    source: Chart
    target: Chart
    components: Tuple[RationalExpr, ...]

    def __post_init__(self):
        if len(self.components) != self.target.dim:
            raise ShapeError("component count differs from target dimension")
        comps = tuple(_coerce_coeff(c, self.source.dim) for c in self.components)
        for c in comps:
            if c.dim != self.source.dim:
                raise ShapeError("component over the wrong source chart")
        object.__setattr__(self, "components", comps)

    @classmethod
    def identity(cls, c: Chart) -> "SmoothMap":
        return cls(c, c, tuple(RationalExpr.variable(c.dim, i)
                               for i in range(1, c.dim + 1)))

    def apply(self, point: Sequence) -> List[Fraction]:
        pt = self.source.check_point(point)
        image = [c.eval(pt) for c in self.components]
        self.target.check_point(image)
        return image

    def jacobian(self) -> List[List[RationalExpr]]:
        return [
            [self.components[t].partial(s) for s in range(1, self.source.dim + 1)]
            for t in range(self.target.dim)
        ]

    def compose(self, inner: "SmoothMap") -> "SmoothMap":
        """self o inner (inner applied first)."""
        if inner.target != self.source:
            raise ChartMismatch("composition charts do not match")
        comps = tuple(c.substitute(list(inner.components)) for c in self.components)
        return SmoothMap(inner.source, self.target, comps)

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.components)


def projection(product: Chart, factor: Chart, offset: int) -> SmoothMap:
    """Projection from a product chart onto a factor starting at offset."""
    comps = tuple(
        RationalExpr.variable(product.dim, offset + i)
        for i in range(1, factor.dim + 1)
    )
    return SmoothMap(product, factor, comps)


def product_chart(a: Chart, b: Chart) -> Chart:
    names = tuple(f"x{i}" for i in range(1, a.dim + b.dim + 1))
    pos = frozenset(a.positive) | frozenset(i + a.dim for i in b.positive)
    return Chart(a.dim + b.dim, names, pos, a.star_shaped and b.star_shaped)


def pullback(f: SmoothMap, a: DiffForm) -> DiffForm:
    """f^* a; commutes with d and wedge by construction."""
    if a.chart != f.target:
        raise ChartMismatch("form does not live on the map's target chart")
    src = f.source
    comps = list(f.components)
    # differentials of the components, as one-forms on the source chart
    dcomp: List[DiffForm] = []
    for c in comps:
        dcomp.append(DiffForm(src, 1, {
            (s,): c.partial(s) for s in range(1, src.dim + 1) if c.partial(s)
        }))
    out = DiffForm(src, a.degree, {})
    for idx, c in a.coeffs.items():
        pulled = c.substitute(comps)
        if not pulled:
            continue
        if not idx:
            out = out + DiffForm(src, 0, {(): pulled})
            continue
        block = dcomp[idx[0] - 1]
        for j in idx[1:]:
            block = block.wedge(dcomp[j - 1])
            if block.is_zero:
                break
        if block.is_zero:
            continue
        out = out + block.scale(pulled)
    return out


def constant_linear_pullback(a: DiffForm, matrix: Sequence[Sequence[Fraction]]) -> DiffForm:
    """Pullback of a constant-coefficient form along x -> M x (fast path)."""
    dim = a.chart.dim
    m = [[Fraction(v) for v in row] for row in matrix]
    deg = a.degree
    vals = [(I, c.constant_value()) for I, c in a.coeffs.items()]
    out: Dict[IndexTuple, Fraction] = {}
    for K in combinations(range(1, dim + 1), deg):
        acc = Fraction(0)
        for I, cv in vals:
            sub = [[m[i - 1][k - 1] for k in K] for i in I]
            acc += cv * linalg.det(sub)
        if acc:
            out[K] = acc
    return DiffForm(a.chart, deg, {k: RationalExpr.const(dim, v) for k, v in out.items()})


def pushforward_at(f: SmoothMap, X: MultiVec, point: Sequence) -> MultiVec:
    """Lambda^m of the Jacobian of f at a point, applied to X(point)."""
    if X.chart != f.source:
        raise ChartMismatch("multivector does not live on the map's source chart")
    pt = f.source.check_point(point)
    image = f.apply(pt)
    jac = [[c.partial(s).eval(pt) for s in range(1, f.source.dim + 1)]
           for c in f.components]
    m = X.degree
    tgt = f.target
    if m > tgt.dim:
        raise DegreeError("pushforward degree exceeds target dimension")
    out: Dict[IndexTuple, Fraction] = {}
    for I, c in X.coeffs.items():
        cv = c.eval(pt)
        if not cv:
            continue
        for K in combinations(range(1, tgt.dim + 1), m):
            minor = linalg.det([[jac[k - 1][i - 1] for i in I] for k in K])
            if minor:
                out[K] = out.get(K, Fraction(0)) + cv * minor
    coeffs = {k: RationalExpr.const(tgt.dim, v) for k, v in out.items() if v}
    return MultiVec(tgt, m, coeffs)


def poincare_homotopy(a: DiffForm) -> DiffForm:
    """Radial homotopy operator h with d h + h d = id in degree >= 1.

    Term-wise: a monomial coefficient of total degree e on a degree-k form
    contributes 1/(k+e) times its radial contraction, exponents shifted.
    Raises :class:`HomotopyPole` when k+e = 0 or a coefficient is not a
    sum of monomials (non-monomial denominator).
    """
    k = a.degree
    if k < 1:
        raise DegreeError("homotopy operator needs degree >= 1")
    chart_ = a.chart
    dim = chart_.dim
    out: Dict[IndexTuple, ScalarExpr] = {}
    for idx, c in a.coeffs.items():
        try:
            scal = c.as_scalar()
        except Exception as exc:
            raise HomotopyPole(
                f"coefficient {c} is not a monomial sum: {exc}"
            ) from None
        for exps, q in scal.terms.items():
            e = sum(exps)
            if k + e == 0:
                raise HomotopyPole(
                    f"term with total degree {e} on a degree-{k} form"
                )
            w = q / (k + e)
            for pos, i in enumerate(idx):
                sign = -1 if pos % 2 else 1
                newexps = list(exps)
                newexps[i - 1] = newexps[i - 1] + 1
                key = idx[:pos] + idx[pos + 1:]
                mono = ScalarExpr.monomial(dim, w if sign > 0 else -w, newexps)
                cur = out.get(key)
                out[key] = mono if cur is None else cur + mono
    coeffs = {key: RationalExpr(s) for key, s in out.items() if not s.is_zero}
    return DiffForm(chart_, k - 1, coeffs)


def contraction_solve(vol: DiffForm, beta: DiffForm, m: int) -> MultiVec:
    """Unique multivector xi of degree m with i_xi vol = beta.

    vol must be a top-degree form with a single nonzero coefficient.
    """
    chart_ = vol.chart
    dim = chart_.dim
    if vol.degree != dim or len(vol.coeffs) != 1:
        raise SingularVolume("volume form must be top-degree with one term")
    if beta.chart != chart_:
        raise ChartMismatch("target form lives on a different chart")
    if beta.degree != dim - m:
        raise DegreeError("target degree inconsistent with multivector degree")
    g = vol.coeffs[tuple(range(1, dim + 1))]
    out = {}
    for I in combinations(range(1, dim + 1), m):
        test = interior(MultiVec(chart_, m, {I: 1}), vol)
        ((comp, coeff),) = test.coeffs.items()
        target = beta.coeffs.get(comp)
        if target is None:
            continue
        out[I] = target / coeff
    xi = MultiVec(chart_, m, out)
    if interior(xi, vol) != beta:
        raise ShapeError("contraction solve failed to verify")  # pragma: no cover
    return xi
