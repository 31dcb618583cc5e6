"""Shared generators for the property tests."""
from fractions import Fraction as Q
from itertools import combinations

from plectic import linalg
from plectic.exterior import (
    DiffForm,
    MultiVec,
    coordinate_vector,
    ext_d,
    interior,
    lie_derivative,
    poincare_homotopy,
)
from plectic.scalar import RationalExpr, ScalarExpr


def rand_fraction(rng, lo=-4, hi=4):
    num = rng.randint(lo, hi)
    den = rng.choice([1, 1, 1, 2, 3])
    return Q(num, den)


def rand_poly(rng, dim, max_terms=3, max_deg=2):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = [0] * dim
        for _ in range(rng.randint(0, max_deg)):
            exps[rng.randrange(dim)] += 1
        c = rand_fraction(rng)
        if c:
            terms[tuple(Q(e) for e in exps)] = terms.get(tuple(Q(e) for e in exps), Q(0)) + c
    return RationalExpr(ScalarExpr(dim, {k: v for k, v in terms.items() if v}))


def rand_form(rng, chart, degree, max_terms=3):
    tuples = list(combinations(range(1, chart.dim + 1), degree))
    coeffs = {}
    for _ in range(rng.randint(1, max_terms)):
        coeffs[rng.choice(tuples)] = rand_poly(rng, chart.dim)
    return DiffForm(chart, degree, coeffs)


def rand_vector_field(rng, chart, max_terms=2):
    coeffs = {}
    for _ in range(rng.randint(1, max_terms)):
        coeffs[(rng.randint(1, chart.dim),)] = rand_poly(rng, chart.dim)
    return MultiVec(chart, 1, coeffs)


def linear_symmetry_fields(w):
    """Basis of linear vector fields X = A x with L_X w = 0 (w constant)."""
    chart = w.chart
    d = chart.dim
    elementary = {}
    tuples = set()
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            X = MultiVec(chart, 1, {(i,): RationalExpr.variable(d, j)})
            L = lie_derivative(X, w)
            elementary[(i, j)] = L
            tuples.update(L.coeffs)
    rows = sorted(tuples)
    zero = RationalExpr.const(d, 0)
    matrix = []
    cols = [(i, j) for i in range(1, d + 1) for j in range(1, d + 1)]
    for t in rows:
        matrix.append([elementary[c].coeffs.get(t, zero) for c in cols])
    if not matrix:
        basis = [[Q(1) if k == n else Q(0) for n in range(d * d)]
                 for k in range(d * d)]
    else:
        basis = linalg.nullspace(matrix)
    fields = []
    for vec in basis:
        coeffs = {}
        for idx, (i, j) in enumerate(cols):
            v = vec[idx]
            if isinstance(v, RationalExpr):
                if not v.is_constant:
                    continue
                v = v.constant_value()
            if v:
                cur = coeffs.get((i,), RationalExpr.const(d, 0))
                coeffs[(i,)] = cur + RationalExpr.variable(d, j) * RationalExpr.const(d, v)
        if coeffs:
            fields.append(MultiVec(chart, 1, coeffs))
    return fields


class HamiltonianSampler:
    """Random Hamiltonian (n-1)-forms for a constant-coefficient n+1 form.

    Potentials come from symmetry fields (translations and linear fields
    preserving w) via the radial homotopy, plus arbitrary exact forms.
    """

    def __init__(self, w):
        self.w = w
        self.chart = w.chart
        self.n = w.degree - 1
        self.translations = [coordinate_vector(self.chart, i)
                             for i in range(1, self.chart.dim + 1)]
        self.linear = linear_symmetry_fields(w)

    def sample(self, rng):
        fields = []
        for X in self.translations:
            if rng.random() < 0.5:
                fields.append((X, rand_fraction(rng)))
        if self.linear:
            X = rng.choice(self.linear)
            fields.append((X, rand_fraction(rng)))
        alpha = DiffForm(self.chart, self.n - 1, {})
        for X, c in fields:
            if not c:
                continue
            closed = interior(X, self.w)
            alpha = alpha + poincare_homotopy(closed).scale(-c)
        if self.n - 2 >= 0:
            beta = rand_form(rng, self.chart, self.n - 2) if self.n >= 2 else None
            if beta is not None:
                alpha = alpha + ext_d(beta)
        if alpha.is_zero:
            alpha = poincare_homotopy(interior(self.translations[0], self.w)).scale(-1)
        return alpha
