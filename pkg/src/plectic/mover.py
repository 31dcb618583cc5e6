"""Determinant-one polynomial automorphisms of C^n over Gaussian rationals.

Moves any k distinct points to any k distinct targets by the classical
three-step construction: a det-1 linear map separating first coordinates,
an interpolation shear flattening the middle block and staircasing the last
coordinate onto the markers (0,..,0,j), and a final shear clearing the first
coordinate.  Every step has unit Jacobian determinant, so the composition
does too (chain rule), and the realified maps preserve Re(dz^1 ^ .. ^ dz^n)
exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from . import linalg
from .errors import (
    DuplicatePoints,
    NonPolynomial,
    ShapeError,
)
from .exterior import Chart, DiffForm, SmoothMap, chart, pullback
from .scalar import GaussianRational, RationalExpr, ScalarExpr

Q = Fraction
GR = GaussianRational

Point = Tuple[GaussianRational, ...]


def as_point(values: Sequence) -> Point:
    return tuple(GR.ensure(v) for v in values)


# ---------------------------------------------------------------------------
# univariate polynomials over Q(i)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial, ascending coefficients over Q(i)."""

    coeffs: tuple

    def __post_init__(self):
        cs = [GR.ensure(c) for c in self.coeffs]
        while cs and not cs[-1]:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def zero(cls) -> "Poly":
        return cls(())

    @classmethod
    def interpolate(cls, xs: Sequence[GaussianRational],
                    ys: Sequence[GaussianRational]) -> "Poly":
        """Lagrange interpolation through (xs[t], ys[t])."""
        if len(xs) != len(ys):
            raise ShapeError("interpolation needs matching point lists")
        if len(set(xs)) != len(xs):
            raise DuplicatePoints("interpolation nodes must be distinct")
        total = [GR(0)]
        for t, (xt, yt) in enumerate(zip(xs, ys)):
            if not yt:
                continue
            basis = [GR(1)]
            denom = GR(1)
            for s, xs_ in enumerate(xs):
                if s == t:
                    continue
                # multiply basis by (X - xs_)
                new = [GR(0)] * (len(basis) + 1)
                for p, c in enumerate(basis):
                    new[p] = new[p] + c * (-xs_)
                    new[p + 1] = new[p + 1] + c
                basis = new
                denom = denom * (xt - xs_)
            scale = yt / denom
            if len(basis) > len(total):
                total += [GR(0)] * (len(basis) - len(total))
            for p, c in enumerate(basis):
                total[p] = total[p] + c * scale
        return cls(tuple(total))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def __call__(self, x: GaussianRational) -> GaussianRational:
        acc = GR(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __bool__(self):
        return bool(self.coeffs)

    def as_expr(self, dim: int, var: int) -> ScalarExpr:
        terms = {}
        for p, c in enumerate(self.coeffs):
            if c:
                exps = [Q(0)] * dim
                exps[var - 1] = Q(p)
                terms[tuple(exps)] = c
        return ScalarExpr(dim, terms)


# ---------------------------------------------------------------------------
# elementary steps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearStep:
    """x -> M x with det(M) = 1 exactly."""

    matrix: tuple

    def __post_init__(self):
        m = tuple(tuple(GR.ensure(v) for v in row) for row in self.matrix)
        n = len(m)
        if any(len(row) != n for row in m):
            raise ShapeError("linear step matrix must be square")
        if linalg.det([list(r) for r in m]) != GR(1):
            raise ShapeError("linear step must have determinant one")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def apply(self, p: Point) -> Point:
        n = self.dim
        return tuple(
            sum((self.matrix[i][j] * p[j] for j in range(1, n)),
                self.matrix[i][0] * p[0])
            for i in range(n)
        )

    def inverse(self) -> "LinearStep":
        inv = linalg.mat_inverse([list(r) for r in self.matrix])
        return LinearStep(tuple(tuple(row) for row in inv))

    def components(self) -> List[ScalarExpr]:
        n = self.dim
        out = []
        for i in range(n):
            terms = {}
            for j in range(n):
                if self.matrix[i][j]:
                    exps = [Q(0)] * n
                    exps[j] = Q(1)
                    terms[tuple(exps)] = self.matrix[i][j]
            out.append(ScalarExpr(n, terms))
        return out


@dataclass(frozen=True)
class ShearStep:
    """Axis shear with polynomial offsets; unit triangular Jacobian.

    kind 'rest_by_first': (x, y, z) -> (x, y + s P(x), z + s Q(x)) with
    polys = (P_1 .. P_{n-2}, Q); kind 'first_by_last':
    (x, .., z) -> (x + s P(z), .., z) with polys = (P,).  s = -1 for the
    forward construction steps, +1 for their inverses.
    """

    kind: str
    dim: int
    polys: tuple
    sign: int = -1

    def __post_init__(self):
        if self.kind not in ("rest_by_first", "first_by_last"):
            raise ShapeError(f"unknown shear kind {self.kind!r}")
        if self.sign not in (-1, 1):
            raise ShapeError("shear sign must be +1 or -1")
        expected = self.dim - 1 if self.kind == "rest_by_first" else 1
        if len(self.polys) != expected:
            raise ShapeError(
                f"{self.kind} shear in dimension {self.dim} needs "
                f"{expected} polynomials"
            )

    def apply(self, p: Point) -> Point:
        s = GR(self.sign)
        if self.kind == "rest_by_first":
            x = p[0]
            return (p[0],) + tuple(
                p[i + 1] + s * poly(x) for i, poly in enumerate(self.polys)
            )
        z = p[-1]
        return (p[0] + s * self.polys[0](z),) + p[1:]

    def inverse(self) -> "ShearStep":
        return ShearStep(self.kind, self.dim, self.polys, -self.sign)

    def components(self) -> List[ScalarExpr]:
        n = self.dim
        comps = []
        sign = Q(self.sign)
        for i in range(n):
            base = ScalarExpr.variable(n, i + 1)
            if self.kind == "rest_by_first" and i >= 1:
                offs = self.polys[i - 1].as_expr(n, 1).scale(sign)
                base = base + offs
            elif self.kind == "first_by_last" and i == 0:
                offs = self.polys[0].as_expr(n, n).scale(sign)
                base = base + offs
            comps.append(base)
        return comps


Step = object  # LinearStep | ShearStep


@dataclass(frozen=True)
class PolyAuto:
    """Composition of elementary determinant-one steps (first step first)."""

    dim: int
    steps: tuple

    def __post_init__(self):
        for s in self.steps:
            if getattr(s, "dim", None) != self.dim:
                raise ShapeError("step dimension mismatch")

    def apply(self, p: Sequence) -> Point:
        pt = as_point(p)
        if len(pt) != self.dim:
            raise ShapeError("point dimension mismatch")
        for s in self.steps:
            pt = s.apply(pt)
        return pt

    def inverse(self) -> "PolyAuto":
        return PolyAuto(self.dim, tuple(s.inverse() for s in reversed(self.steps)))

    def compose(self, first: "PolyAuto") -> "PolyAuto":
        """self o first (apply ``first``, then self)."""
        if first.dim != self.dim:
            raise ShapeError("composition dimension mismatch")
        return PolyAuto(self.dim, first.steps + self.steps)


# ---------------------------------------------------------------------------
# the constructive moves
# ---------------------------------------------------------------------------


def _spiral_covectors(n: int):
    """Integer covectors ordered by max-norm shells, deterministic."""
    for shell in itertools.count(1):
        for tup in itertools.product(range(-shell, shell + 1), repeat=n):
            if max(abs(t) for t in tup) != shell:
                continue
            yield tup


def separating_linear_map(points: Sequence[Point], n: int) -> LinearStep:
    """Det-1 linear map giving the points pairwise distinct first coordinates."""
    pts = [as_point(p) for p in points]
    if len(set(pts)) != len(pts):
        raise DuplicatePoints("points must be pairwise distinct")
    if n < 2:
        raise ShapeError("need ambient dimension at least 2")
    diffs = []
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            diffs.append(tuple(x - y for x, y in zip(pts[a], pts[b])))
    if not diffs:
        ident = [[GR(1) if i == j else GR(0) for j in range(n)] for i in range(n)]
        return LinearStep(tuple(tuple(r) for r in ident))
    phi = None
    for cand in _spiral_covectors(n):
        vec = [GR(c) for c in cand]
        ok = True
        for dvec in diffs:
            val = GR(0)
            for cv, dv in zip(vec, dvec):
                val = val + cv * dv
            if not val:
                ok = False
                break
        if ok:
            phi = vec
            break
    rows = [phi]
    for i in range(n):
        e = [GR(1) if j == i else GR(0) for j in range(n)]
        trial = rows + [e]
        if linalg.rank([list(r) for r in trial]) == len(trial):
            rows = trial
        if len(rows) == n:
            break
    d = linalg.det([list(r) for r in rows])
    inv = GR(1) / d
    rows[-1] = [v * inv for v in rows[-1]]
    return LinearStep(tuple(tuple(r) for r in rows))


def _normalizing_auto(points: Sequence[Point], n: int) -> PolyAuto:
    """Auto of determinant one sending the points to the markers (0,..,0,j)."""
    pts = [as_point(p) for p in points]
    k = len(pts)
    T = separating_linear_map(pts, n)
    pts = [T.apply(p) for p in pts]
    xs = [p[0] for p in pts]
    markers = [GR(j) for j in range(1, k + 1)]
    polys = []
    for mid in range(1, n - 1):
        polys.append(Poly.interpolate(xs, [p[mid] for p in pts]))
    polys.append(Poly.interpolate(xs, [p[-1] - m for p, m in zip(pts, markers)]))
    shear2 = ShearStep("rest_by_first", n, tuple(polys), -1)
    pts = [shear2.apply(p) for p in pts]
    shear3 = ShearStep("first_by_last", n, (Poly.interpolate(markers, xs),), -1)
    pts = [shear3.apply(p) for p in pts]
    expected = [tuple([GR(0)] * (n - 1) + [m]) for m in markers]
    if pts != expected:
        raise ShapeError("normalization failed to reach the markers")  # pragma: no cover
    return PolyAuto(n, (T, shear2, shear3))


def move_points(src: Sequence[Sequence], dst: Sequence[Sequence],
                n: int) -> PolyAuto:
    """Det-1 polynomial automorphism of C^n mapping src_j to dst_j exactly."""
    if n < 2:
        raise ShapeError("need ambient dimension at least 2")
    src_pts = [as_point(p) for p in src]
    dst_pts = [as_point(p) for p in dst]
    if len(src_pts) != len(dst_pts):
        raise ShapeError("source and target lists differ in length")
    for pts in (src_pts, dst_pts):
        if len(set(pts)) != len(pts):
            raise DuplicatePoints("points must be pairwise distinct")
        for p in pts:
            if len(p) != n:
                raise ShapeError("point dimension mismatch")
    if not src_pts:
        ident = [[GR(1) if i == j else GR(0) for j in range(n)] for i in range(n)]
        return PolyAuto(n, (LinearStep(tuple(tuple(r) for r in ident)),))
    fwd = _normalizing_auto(src_pts, n)
    back = _normalizing_auto(dst_pts, n).inverse()
    result = back.compose(fwd)
    for p, q in zip(src_pts, dst_pts):
        if result.apply(p) != q:
            raise ShapeError("move verification failed")  # pragma: no cover
    return result


# ---------------------------------------------------------------------------
# Jacobians
# ---------------------------------------------------------------------------


def _step_jacobian_det(step) -> ScalarExpr:
    """Symbolic Jacobian determinant of one elementary step."""
    if isinstance(step, LinearStep):
        comps = step.components()
    elif isinstance(step, ShearStep):
        comps = step.components()
    else:
        raise ShapeError(f"unknown step {step!r}")
    n = len(comps)
    jac = [[RationalExpr(comps[i].partial(j + 1)) for j in range(n)]
           for i in range(n)]
    det = linalg.det(jac)
    if not det.den_is_one:
        raise ShapeError("step Jacobian determinant must be polynomial")
    return det.num


def jacobian_determinant(f) -> RationalExpr:
    """Symbolic Jacobian determinant.

    For a PolyAuto this is the product of the per-step symbolic determinants
    (the chain rule makes the composition's determinant the product of the
    steps', each one constant); for a polynomial SmoothMap the determinant of
    its Jacobian matrix.
    """
    if isinstance(f, PolyAuto):
        acc = ScalarExpr.const(f.dim, 1)
        for s in f.steps:
            acc = acc * _step_jacobian_det(s)
        return RationalExpr(acc)
    if isinstance(f, SmoothMap):
        if f.source.dim != f.target.dim:
            raise ShapeError("Jacobian determinant needs a square map")
        if not f.is_polynomial():
            raise NonPolynomial("Jacobian determinant needs polynomial components")
        jac = f.jacobian()
        return linalg.det(jac)
    raise ShapeError(f"unsupported input {type(f).__name__}")


# ---------------------------------------------------------------------------
# realification
# ---------------------------------------------------------------------------


def interleaved_chart(n: int) -> Chart:
    """Chart of R^{2n} with z_j = x_{2j-1} + i x_{2j}."""
    return chart(2 * n)


def real_volume_form(n: int) -> DiffForm:
    """Re(dz^1 ^ ... ^ dz^n) on the interleaved chart."""
    ch = interleaved_chart(n)
    out = DiffForm(ch, n, {})
    # expand the product over choices of dx / i dy per factor
    for picks in itertools.product((0, 1), repeat=n):
        i_power = sum(picks) % 4
        if i_power % 2:
            continue  # imaginary part
        sign = 1 if i_power == 0 else -1
        idx = tuple(2 * j + 1 + picks[j] for j in range(n))
        out = out + DiffForm(ch, n, {idx: sign})
    return out


def realify_scalar(expr: ScalarExpr) -> Tuple[ScalarExpr, ScalarExpr]:
    """Split a Gaussian polynomial in z_1..z_n into Re/Im over R^{2n}."""
    n = expr.dim
    dim2 = 2 * n
    re_terms: dict = {}
    im_terms: dict = {}

    def add(target, key, val):
        cur = target.get(key, Q(0)) + val
        if cur:
            target[key] = cur
        elif key in target:
            del target[key]

    for exps, c in expr.terms.items():
        c = GR.ensure(c)
        # expand prod_j (x_{2j-1} + i x_{2j})^{e_j}
        partial = {tuple([Q(0)] * dim2): c}
        for j, e in enumerate(exps):
            if e.denominator != 1 or e < 0:
                raise NonPolynomial("realification needs polynomial exponents")
            for _ in range(e.numerator):
                nxt: dict = {}
                for key, cv in partial.items():
                    kx = list(key)
                    kx[2 * j] += 1
                    k1 = tuple(kx)
                    prev = nxt.get(k1, GR(0)) + cv
                    if prev:
                        nxt[k1] = prev
                    elif k1 in nxt:
                        del nxt[k1]
                    ky = list(key)
                    ky[2 * j + 1] += 1
                    k2 = tuple(ky)
                    prev = nxt.get(k2, GR(0)) + cv * GR(0, 1)
                    if prev:
                        nxt[k2] = prev
                    elif k2 in nxt:
                        del nxt[k2]
                partial = nxt
        for key, cv in partial.items():
            if cv.re:
                add(re_terms, key, cv.re)
            if cv.im:
                add(im_terms, key, cv.im)
    return ScalarExpr(dim2, re_terms), ScalarExpr(dim2, im_terms)


def realify_step(step, n: int) -> SmoothMap:
    """One elementary step as a real polynomial map on R^{2n}."""
    comps = step.components()
    ch = interleaved_chart(n)
    out: List[RationalExpr] = []
    for comp in comps:
        re, im = realify_scalar(comp)
        out.append(RationalExpr(re))
        out.append(RationalExpr(im))
    return SmoothMap(ch, ch, tuple(out))


@dataclass(frozen=True)
class RealifiedAuto:
    """Realified steps of a PolyAuto, applied first step first."""

    n: int
    steps: tuple  # SmoothMaps on R^{2n}

    @property
    def chart(self) -> Chart:
        return self.steps[0].source

    def apply(self, point: Sequence) -> List[Fraction]:
        pt = list(point)
        for s in self.steps:
            pt = s.apply(pt)
        return pt

    def pullback(self, a: DiffForm) -> DiffForm:
        """Pullback through the composition, telescoped step by step."""
        out = a
        for s in reversed(self.steps):
            out = pullback(s, out)
        return out

    def as_smooth_map(self) -> SmoothMap:
        """Explicit symbolic composition (can be large for deep chains)."""
        out = self.steps[0]
        for s in self.steps[1:]:
            out = s.compose(out)
        return out


def realify_and_check(auto: PolyAuto) -> Tuple[RealifiedAuto, bool]:
    """Realify an automorphism and verify it preserves Re(dz^1 ^ .. ^ dz^n).

    The invariance check pulls the volume form back through the composition
    (step by step, which is the same pullback by functoriality) and compares
    with the original form exactly.
    """
    n = auto.dim
    steps = tuple(realify_step(s, n) for s in auto.steps)
    realified = RealifiedAuto(n, steps)
    vol = real_volume_form(n)
    preserved = realified.pullback(vol) == vol
    return realified, preserved
