"""Hamilton-DeDonder-Weyl solving and canonical multiphase structures.

``ham_vector_field`` solves i_X w = -dH for the unique vector field X (the
``fin1thm`` sign option solves i_X w = (-1)^n dH instead, n = deg w - 1).
``multiphase_forms`` builds the canonical theta and omega = -d(theta) on the
coordinates (x^1..x^n, q^1..q^N, p^mu_a, p).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

from . import linalg
from .errors import (
    ChartMismatch,
    DegreeError,
    DegenerateForm,
    NotHamiltonian,
    ShapeError,
)
from .exterior import (
    Chart,
    DiffForm,
    MultiVec,
    SmoothMap,
    chart,
    coordinate_vector,
    ext_d,
    interior,
    pushforward_at,
)
from .scalar import RationalExpr

Q = Fraction

SIGN_HDW = "hdw"
SIGN_FIN1 = "fin1thm"


def _rhs_form(w: DiffForm, H: DiffForm, sign_convention: str) -> DiffForm:
    dH = ext_d(H)
    if sign_convention == SIGN_HDW:
        return -dH
    if sign_convention == SIGN_FIN1:
        n = w.degree - 1
        return dH if n % 2 == 0 else -dH
    raise ShapeError(f"unknown sign convention {sign_convention!r}")


def ham_vector_field(w: DiffForm, H: DiffForm,
                     sign_convention: str = SIGN_HDW) -> MultiVec:
    """Unique vector field X with i_X w = -dH (w non-degenerate)."""
    if H.chart != w.chart:
        raise ChartMismatch("Hamiltonian form lives on a different chart")
    n = w.degree - 1
    if H.degree != n - 1:
        raise DegreeError(
            f"Hamiltonian form must have degree {n - 1}, got {H.degree}"
        )
    chart_ = w.chart
    dim = chart_.dim
    rhs_form = _rhs_form(w, H, sign_convention)
    cols = [interior(coordinate_vector(chart_, v), w) for v in range(1, dim + 1)]
    tuples = set(rhs_form.coeffs)
    for c in cols:
        tuples.update(c.coeffs)
    rows = sorted(tuples)
    zero = RationalExpr.const(dim, 0)
    matrix = [[cols[v].coeffs.get(t, zero) for v in range(dim)] for t in rows]
    rhs = [rhs_form.coeffs.get(t, zero) for t in rows]
    if not rows:
        return MultiVec(chart_, 1, {})
    sol, free = linalg.solve(matrix, rhs)
    if sol is None:
        raise NotHamiltonian(
            "the requested form admits no Hamiltonian vector field: "
            "-dH is outside the image of the contraction map"
        )
    if free:
        raise DegenerateForm(
            "contraction map has a kernel; the form is degenerate"
        )
    coeffs = {(v + 1,): sol[v] for v in range(dim) if sol[v]}
    return MultiVec(chart_, 1, coeffs)


def hdw_residual(w: DiffForm, X: MultiVec, H: DiffForm,
                 sign_convention: str = SIGN_HDW) -> DiffForm:
    """i_X w + dH (zero exactly when the couple solves the equation)."""
    if X.chart != w.chart or H.chart != w.chart:
        raise ChartMismatch("operands live on different charts")
    n = w.degree - 1
    if X.degree + H.degree != n:
        raise DegreeError(
            f"degrees inconsistent: deg X + deg H = {X.degree + H.degree} != {n}"
        )
    contraction = interior(X, w)
    if sign_convention == SIGN_FIN1 and (n % 2 == 0):
        return contraction - ext_d(H)
    return contraction + ext_d(H)


# ---------------------------------------------------------------------------
# multiphase models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiphaseModel:
    """Canonical forms on the chart (x^mu, q^a, p^mu_a, p)."""

    n: int
    fiber: int
    chart: Chart
    restricted_chart: Chart     # without the final p coordinate
    labels: Tuple[str, ...]
    theta: DiffForm
    omega: DiffForm

    def x_index(self, mu: int) -> int:
        return mu

    def q_index(self, a: int) -> int:
        return self.n + a

    def p_index(self, mu: int, a: int) -> int:
        return self.n + self.fiber + (a - 1) * self.n + mu

    @property
    def p_total_index(self) -> int:
        return self.chart.dim


def multiphase_forms(n: int, fiber: int) -> MultiphaseModel:
    """Canonical theta and omega on the multiphase chart for (n, N)."""
    if n < 1 or fiber < 1:
        raise ShapeError("need n >= 1 and N >= 1")
    dim = n + fiber + n * fiber + 1
    labels = (
        [f"x{mu}" for mu in range(1, n + 1)]
        + [f"q{a}" for a in range(1, fiber + 1)]
        + [f"p{mu}_{a}" for a in range(1, fiber + 1) for mu in range(1, n + 1)]
        + ["p"]
    )
    ch = chart(dim)
    pch = chart(dim - 1)
    vol_x = DiffForm(ch, n, {tuple(range(1, n + 1)): 1})
    p_total = RationalExpr.variable(dim, dim)
    theta = vol_x.scale(p_total)
    for a in range(1, fiber + 1):
        q_idx = n + a
        for mu in range(1, n + 1):
            p_idx = n + fiber + (a - 1) * n + mu
            hat = interior(coordinate_vector(ch, mu), vol_x)
            dq = DiffForm(ch, 1, {(q_idx,): 1})
            term = dq.wedge(hat).scale(RationalExpr.variable(dim, p_idx))
            theta = theta + term
    omega = -ext_d(theta)
    return MultiphaseModel(n, fiber, ch, pch, tuple(labels), theta, omega)


def hamilton_volterra_residual(model: MultiphaseModel, hamiltonian: RationalExpr,
                               section: SmoothMap) -> List[RationalExpr]:
    """Residuals of the Hamilton-Volterra equations for a section.

    ``hamiltonian`` lives on the restricted chart (x, q, p^mu_a); the section
    maps the base chart into the restricted chart with identity base
    components.  Output order: one residual per fiber index a
    (dH/dq^a o S - sum_mu d(p^mu_a o S)/dx^mu), then one per (a, mu) pair
    (dH/dp^mu_a o S + d(q^a o S)/dx^mu), a-major.
    """
    n, N = model.n, model.fiber
    pdim = model.restricted_chart.dim
    if hamiltonian.dim != pdim:
        raise ShapeError("Hamiltonian must live on the restricted chart")
    if section.source.dim != n:
        raise ShapeError("section must be defined on the n-dimensional base")
    if section.target.dim != pdim:
        raise ShapeError("section must map into the restricted chart")
    for mu in range(1, n + 1):
        if not (section.components[mu - 1] == RationalExpr.variable(n, mu)):
            raise ShapeError("section base components must be the identity")
    comps = list(section.components)
    residuals: List[RationalExpr] = []
    for a in range(1, N + 1):
        dq = hamiltonian.partial(model.q_index(a)).substitute(comps)
        acc = dq
        for mu in range(1, n + 1):
            p_comp = comps[model.p_index(mu, a) - 1]
            acc = acc - p_comp.partial(mu)
        residuals.append(acc)
    for a in range(1, N + 1):
        q_comp = comps[model.q_index(a) - 1]
        for mu in range(1, n + 1):
            dp = hamiltonian.partial(model.p_index(mu, a)).substitute(comps)
            residuals.append(dp + q_comp.partial(mu))
    return residuals


def free_field_section(model: MultiphaseModel,
                       slopes: Sequence[Sequence]) -> Tuple[RationalExpr, SmoothMap]:
    """Free-field Hamiltonian sum (p^mu_a)^2 / 2 with an exact linear solution.

    slopes[a-1][mu-1] = c gives q^a = sum_mu c x^mu and p^mu_a = -c.
    """
    n, N = model.n, model.fiber
    pdim = model.restricted_chart.dim
    ham = RationalExpr.const(pdim, 0)
    for a in range(1, N + 1):
        for mu in range(1, n + 1):
            p = RationalExpr.variable(pdim, model.p_index(mu, a))
            ham = ham + p * p * RationalExpr.const(pdim, Q(1, 2))
    comps: List[RationalExpr] = [
        RationalExpr.variable(n, mu) for mu in range(1, n + 1)
    ]
    for a in range(1, N + 1):
        acc = RationalExpr.const(n, 0)
        for mu in range(1, n + 1):
            acc = acc + RationalExpr.variable(n, mu) * RationalExpr.const(
                n, slopes[a - 1][mu - 1]
            )
        comps.append(acc)
    for a in range(1, N + 1):
        for mu in range(1, n + 1):
            comps.append(RationalExpr.const(n, -Fraction(slopes[a - 1][mu - 1])))
    section = SmoothMap(chart(n), model.restricted_chart, tuple(comps))
    return ham, section


def ham_curve_check(psi: SmoothMap, gamma: MultiVec, X: MultiVec,
                    points: Sequence[Sequence]) -> List[bool]:
    """Pointwise Hamiltonian-curve test: (psi_*)(gamma) = X o psi at samples."""
    if gamma.chart != psi.source:
        raise ChartMismatch("gamma must live on the map's source chart")
    if X.chart != psi.target:
        raise ChartMismatch("X must live on the map's target chart")
    if gamma.degree != X.degree:
        raise DegreeError("gamma and X must have equal degrees")
    out = []
    for p in points:
        pushed = pushforward_at(psi, gamma, p)
        target = X.eval_at(psi.apply(p))
        out.append(pushed == target)
    return out


def ham_curve_check_symbolic(psi: SmoothMap, gamma: MultiVec,
                             X: MultiVec) -> Optional[bool]:
    """Best-effort symbolic curve check; None when composition leaves the ring."""
    if gamma.degree != X.degree:
        raise DegreeError("gamma and X must have equal degrees")
    m = gamma.degree
    src, tgt = psi.source, psi.target
    try:
        jac = psi.jacobian()
        comps = list(psi.components)
        for K in combinations(range(1, tgt.dim + 1), m):
            acc = RationalExpr.const(src.dim, 0)
            for I, c in gamma.coeffs.items():
                minor = linalg.det([[jac[k - 1][i - 1] for i in I] for k in K])
                acc = acc + c * minor
            target = X.coeffs.get(K, RationalExpr.const(tgt.dim, 0)).substitute(comps)
            if not (acc == target):
                return False
        return True
    except Exception:
        return None
