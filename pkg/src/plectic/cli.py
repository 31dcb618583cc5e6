"""Command-line front-end: one binary, one subcommand per capability.

Input is JSON (file argument or stdin); output is a deterministic JSON
report on stdout.  Exit codes: 0 when the command produced its answer (a
mathematically negative answer such as NotHamiltonian from ``hamvf`` is
still an answer), 2 when a verification-style command found its property
violated (hdw-residual, volterra, curve-check, lie-validate, comoment
verify, verify), and 1 for malformed input or internal faults.

Every payload is parsed and schema-checked before dispatch; violations are
reported with their JSON paths.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Dict, List, Optional, Tuple

from .classify import (
    classify6,
    flatness_report,
    involutive,
    nondegenerate,
    verify_standard_subspace,
)
from .errors import NotHamiltonian, PlecticError, SchemaError
from .exterior import (
    DiffForm,
    MultiVec,
    SmoothMap,
    chart,
    ext_d,
    interior,
    lie_derivative,
)
from .hdw import (
    SIGN_FIN1,
    SIGN_HDW,
    ham_curve_check,
    ham_vector_field,
    hamilton_volterra_residual,
    hdw_residual,
    multiphase_forms,
)
from .jsonio import (
    _expect,
    _get,
    action_from_json,
    algebra_from_json,
    auto_to_json,
    chart_to_json,
    expr_from_json,
    expr_to_str,
    form_from_json,
    form_to_json,
    gaussian_point_from_json,
    gaussian_point_to_json,
    point_from_json,
    type_report_to_json,
)
from .liesym import (
    ComomentData,
    comoment_from_potential,
    comoment_verify,
    conserved_classify,
    killing_form,
    obstruction_cochain,
)
from .linfty import (
    jacobiator_identity_residual,
    l_k,
    linfty_relation_residual,
    make_observable,
)
from .mover import jacobian_determinant, move_points, realify_and_check
from .scalar import RationalExpr, ScalarExpr

Q = Fraction

COMMANDS = (
    "classify", "flat", "hamvf", "hdw-residual", "multiphase", "volterra",
    "curve-check", "bracket", "lie-validate", "comoment", "obstruction",
    "conserved", "move", "verify",
)

VERIFY_CHECKS = (
    "ring-laws", "exterior", "linfty-relation", "jacobiator",
    "involutive", "standard-subspace",
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED_CHECK = 2


@dataclass
class Request:
    command: str
    payload: dict
    options: dict = field(default_factory=dict)
    parsed: Optional[dict] = None

    @property
    def mode(self) -> str:
        return self.options.get("mode", "exact")

    @property
    def sign_convention(self) -> str:
        return self.options.get("sign_convention", SIGN_HDW)

    @property
    def seed(self) -> int:
        return int(self.options.get("seed", 0))


def parse_request(raw: bytes, command: Optional[str] = None,
                  options: Optional[dict] = None) -> Request:
    """Parse and schema-validate a request before dispatch.

    When ``command`` is None the JSON must be an envelope
    {"command": .., "payload": .., "options": {..}}; otherwise the JSON is
    the payload for that command.
    """
    try:
        obj = json.loads(raw.decode("utf-8"))
    except Exception as exc:
        raise SchemaError([f"$: invalid JSON: {exc}"]) from None
    if command is None:
        _expect(isinstance(obj, dict), "$", "request must be an object")
        command = _get(obj, "command", "$")
        payload = obj.get("payload", {})
        opts = obj.get("options", {})
    else:
        payload = obj
        opts = dict(options or {})
    _expect(isinstance(command, str) and command in COMMANDS, "$.command",
            f"must be one of {', '.join(COMMANDS)}")
    _expect(isinstance(payload, dict), "$.payload", "must be an object")
    _expect(isinstance(opts, dict), "$.options", "must be an object")
    mode = opts.get("mode", "exact")
    _expect(mode in ("exact", "float"), "$.options.mode",
            "must be 'exact' or 'float'")
    sign = opts.get("sign_convention", SIGN_HDW)
    _expect(sign in (SIGN_HDW, SIGN_FIN1), "$.options.sign_convention",
            f"must be '{SIGN_HDW}' or '{SIGN_FIN1}'")
    parsed = PARSERS[command](payload)
    return Request(command, payload, opts, parsed)


# ---------------------------------------------------------------------------
# payload parsers (schema validation with JSON paths)
# ---------------------------------------------------------------------------


def _int_field(payload, key, minimum=1):
    v = _get(payload, key, "$")
    _expect(isinstance(v, int) and v >= minimum, f"$.{key}",
            f"must be an integer >= {minimum}")
    return v


def _parse_classify(p):
    w = form_from_json(_get(p, "omega", "$"), "$.omega")
    point = point_from_json(_get(p, "point", "$"), w.chart.dim, "$.point")
    return {"omega": w, "point": point}


def _parse_flat(p):
    return {"omega": form_from_json(_get(p, "omega", "$"), "$.omega")}


def _parse_hamvf(p):
    w = form_from_json(_get(p, "omega", "$"), "$.omega")
    H = form_from_json(_get(p, "hamiltonian", "$"), "$.hamiltonian",
                       chart_hint=w.chart)
    return {"omega": w, "hamiltonian": H}


def _parse_hdw_residual(p):
    w = form_from_json(_get(p, "omega", "$"), "$.omega")
    X = form_from_json(_get(p, "field", "$"), "$.field",
                       expect_kind="multivector", chart_hint=w.chart)
    H = form_from_json(_get(p, "hamiltonian", "$"), "$.hamiltonian",
                       chart_hint=w.chart)
    return {"omega": w, "field": X, "hamiltonian": H}


def _parse_multiphase(p):
    return {"n": _int_field(p, "n"), "N": _int_field(p, "N")}


def _parse_volterra(p):
    n = _int_field(p, "n")
    N = _int_field(p, "N")
    model = multiphase_forms(n, N)
    pdim = model.restricted_chart.dim
    ham = expr_from_json(_get(p, "hamiltonian", "$"), pdim, "$.hamiltonian")
    section = _get(p, "section", "$")
    _expect(isinstance(section, dict), "$.section", "must be an object")
    qs = _get(section, "q", "$.section")
    ps = _get(section, "p", "$.section")
    _expect(isinstance(qs, list) and len(qs) == N, "$.section.q",
            f"must list {N} expressions in x1..x{n}")
    _expect(isinstance(ps, list) and len(ps) == N, "$.section.p",
            f"must list {N} rows of {n} expressions")
    comps: List[RationalExpr] = [RationalExpr.variable(n, mu)
                                 for mu in range(1, n + 1)]
    for a, qj in enumerate(qs):
        comps.append(expr_from_json(qj, n, f"$.section.q[{a}]"))
    for a, row in enumerate(ps):
        _expect(isinstance(row, list) and len(row) == n, f"$.section.p[{a}]",
                f"must list {n} expressions")
        for mu, pj in enumerate(row):
            comps.append(expr_from_json(pj, n, f"$.section.p[{a}][{mu}]"))
    section_map = SmoothMap(chart(n), model.restricted_chart, tuple(comps))
    return {"model": model, "hamiltonian": ham, "section": section_map}


def _parse_curve_check(p):
    from .jsonio import smooth_map_from_json

    psi = smooth_map_from_json(_get(p, "map", "$"), "$.map")
    gamma = form_from_json(_get(p, "gamma", "$"), "$.gamma",
                           expect_kind="multivector", chart_hint=psi.source)
    X = form_from_json(_get(p, "field", "$"), "$.field",
                       expect_kind="multivector", chart_hint=psi.target)
    pts_json = _get(p, "points", "$")
    _expect(isinstance(pts_json, list) and pts_json, "$.points",
            "must be a nonempty list of points")
    points = [point_from_json(pt, psi.source.dim, f"$.points[{i}]")
              for i, pt in enumerate(pts_json)]
    return {"map": psi, "gamma": gamma, "field": X, "points": points}


def _parse_bracket(p):
    w = form_from_json(_get(p, "omega", "$"), "$.omega")
    args_json = _get(p, "args", "$")
    _expect(isinstance(args_json, list) and len(args_json) >= 2, "$.args",
            "must list at least two forms")
    forms = [form_from_json(a, f"$.args[{i}]", chart_hint=w.chart)
             for i, a in enumerate(args_json)]
    return {"omega": w, "args": forms}


def _parse_lie_validate(p):
    raw = _get(p, "algebra", "$")
    try:
        g = algebra_from_json(raw, "$.algebra")
        return {"algebra": g, "violation": None}
    except SchemaError as exc:
        bad = [v for v in exc.violations
               if "Jacobi" in v or "antisymmetric" in v]
        if bad:
            return {"algebra": None, "violation": bad}
        raise


def _parse_comoment(p):
    act = action_from_json(_get(p, "action", "$"), "$.action")
    w = form_from_json(_get(p, "omega", "$"), "$.omega", chart_hint=act.chart)
    mode = _get(p, "mode", "$")
    _expect(mode in ("from-potential", "verify"), "$.mode",
            "must be 'from-potential' or 'verify'")
    out = {"action": act, "omega": w, "mode": mode}
    if mode == "from-potential":
        out["potential"] = form_from_json(_get(p, "potential", "$"),
                                          "$.potential", chart_hint=w.chart)
        sign = p.get("potential_sign", 1)
        _expect(sign in (1, -1), "$.potential_sign", "must be 1 or -1")
        out["potential_sign"] = sign
    else:
        n = w.degree - 1
        out["maps"] = _comoment_from_json(_get(p, "maps", "$"), act.algebra,
                                          n, w.chart)
    return out


def _parse_obstruction(p):
    act = action_from_json(_get(p, "action", "$"), "$.action")
    w = form_from_json(_get(p, "omega", "$"), "$.omega", chart_hint=act.chart)
    i = _get(p, "i", "$")
    _expect(isinstance(i, int) and i >= 1, "$.i", "must be a positive integer")
    return {"action": act, "omega": w, "i": i}


def _parse_conserved(p):
    w = form_from_json(_get(p, "omega", "$"), "$.omega")
    H = form_from_json(_get(p, "hamiltonian", "$"), "$.hamiltonian",
                       chart_hint=w.chart)
    alpha = form_from_json(_get(p, "alpha", "$"), "$.alpha", chart_hint=w.chart)
    return {"omega": w, "hamiltonian": H, "alpha": alpha}


def _parse_move(p):
    n = _int_field(p, "n", minimum=2)
    src_json = _get(p, "src", "$")
    dst_json = _get(p, "dst", "$")
    for key, val in (("src", src_json), ("dst", dst_json)):
        _expect(isinstance(val, list), f"$.{key}", "must be a list of points")
    src = [gaussian_point_from_json(pt, n, f"$.src[{i}]")
           for i, pt in enumerate(src_json)]
    dst = [gaussian_point_from_json(pt, n, f"$.dst[{i}]")
           for i, pt in enumerate(dst_json)]
    _expect(len(src) == len(dst), "$.dst", "must match the source count")
    return {"n": n, "src": src, "dst": dst}


def _parse_verify(p):
    check = _get(p, "check", "$")
    _expect(check in VERIFY_CHECKS, "$.check",
            f"must be one of {', '.join(VERIFY_CHECKS)}")
    out: Dict[str, Any] = {"check": check}
    if check in ("ring-laws", "exterior"):
        dim = p.get("dim", 3 if check == "ring-laws" else 4)
        samples = p.get("samples", 25 if check == "ring-laws" else 10)
        _expect(isinstance(dim, int) and dim >= 1, "$.dim",
                "must be a positive integer")
        _expect(isinstance(samples, int) and samples >= 1, "$.samples",
                "must be a positive integer")
        out.update(dim=dim, samples=samples)
    elif check in ("linfty-relation", "jacobiator"):
        w = form_from_json(_get(p, "omega", "$"), "$.omega")
        args_json = _get(p, "args", "$")
        if check == "linfty-relation":
            k = _get(p, "k", "$")
            _expect(isinstance(k, int) and k >= 2, "$.k", "must be >= 2")
            _expect(isinstance(args_json, list) and len(args_json) == k + 1,
                    "$.args", f"must list {k + 1} forms")
            out["k"] = k
        else:
            _expect(isinstance(args_json, list) and len(args_json) == 3,
                    "$.args", "must list exactly three forms")
        out["omega"] = w
        out["args"] = [form_from_json(a, f"$.args[{i}]", chart_hint=w.chart)
                       for i, a in enumerate(args_json)]
    else:
        frame_json = _get(p, "frame", "$")
        _expect(isinstance(frame_json, list) and frame_json, "$.frame",
                "must be a nonempty list of vector fields")
        hint = None
        if check == "standard-subspace":
            out["omega"] = form_from_json(_get(p, "omega", "$"), "$.omega")
            hint = out["omega"].chart
        out["frame"] = [
            form_from_json(x, f"$.frame[{i}]", expect_kind="multivector",
                           chart_hint=hint)
            for i, x in enumerate(frame_json)
        ]
    return out


def _comoment_from_json(obj, algebra, n, chart_hint, path="$.maps") -> ComomentData:
    _expect(isinstance(obj, list) and len(obj) == n, path,
            f"must list {n} components")
    maps = []
    for i, comp in enumerate(obj, start=1):
        _expect(isinstance(comp, list), f"{path}[{i - 1}]", "must be a list")
        entries = {}
        for t, entry in enumerate(comp):
            ep = f"{path}[{i - 1}][{t}]"
            _expect(isinstance(entry, dict), ep, "must be an object")
            idx = _get(entry, "idx", ep)
            _expect(isinstance(idx, list) and len(idx) == i, f"{ep}.idx",
                    f"must list {i} indices")
            val = form_from_json(_get(entry, "form", ep), f"{ep}.form",
                                 chart_hint=chart_hint)
            entries[tuple(idx)] = val
        maps.append(entries)
    return ComomentData(algebra, n, tuple(maps))


PARSERS: Dict[str, Callable[[dict], dict]] = {
    "classify": _parse_classify,
    "flat": _parse_flat,
    "hamvf": _parse_hamvf,
    "hdw-residual": _parse_hdw_residual,
    "multiphase": _parse_multiphase,
    "volterra": _parse_volterra,
    "curve-check": _parse_curve_check,
    "bracket": _parse_bracket,
    "lie-validate": _parse_lie_validate,
    "comoment": _parse_comoment,
    "obstruction": _parse_obstruction,
    "conserved": _parse_conserved,
    "move": _parse_move,
    "verify": _parse_verify,
}


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------


def _args(req: Request) -> dict:
    if req.parsed is None:
        req.parsed = PARSERS[req.command](req.payload)
    return req.parsed


def _float_str(x) -> str:
    return format(float(x), ".17g")


def _cmd_classify(req: Request):
    a = _args(req)
    rep = classify6(a["omega"], a["point"])
    out = type_report_to_json(rep)
    if req.mode == "float":
        from .classify import hitchin_endomorphism, standard_volume

        J = hitchin_endomorphism(a["omega"], standard_volume(a["omega"].chart))
        tv = J.square().trace().eval(a["point"], mode="float")
        out["mode"] = "float"
        out["trace_of_J_squared"] = _float_str(tv)
    return out, EXIT_OK


def _cmd_flat(req: Request):
    rep = flatness_report(_args(req)["omega"])
    return type_report_to_json(rep), EXIT_OK


def _cmd_hamvf(req: Request):
    a = _args(req)
    try:
        X = ham_vector_field(a["omega"], a["hamiltonian"], req.sign_convention)
    except NotHamiltonian as exc:
        return {"verdict": "NotHamiltonian", "detail": str(exc)}, EXIT_OK
    return {"verdict": "Hamiltonian", "field": form_to_json(X)}, EXIT_OK


def _cmd_hdw_residual(req: Request):
    a = _args(req)
    res = hdw_residual(a["omega"], a["field"], a["hamiltonian"],
                       req.sign_convention)
    ok = res.is_zero
    return ({"residual": form_to_json(res), "zero": ok},
            EXIT_OK if ok else EXIT_FAILED_CHECK)


def _cmd_multiphase(req: Request):
    a = _args(req)
    model = multiphase_forms(a["n"], a["N"])
    nd = nondegenerate(model.omega)
    return {
        "chart": chart_to_json(model.chart),
        "labels": list(model.labels),
        "theta": form_to_json(model.theta),
        "omega": form_to_json(model.omega),
        "closed": ext_d(model.omega).is_zero,
        "nondegenerate": bool(nd),
    }, EXIT_OK


def _cmd_volterra(req: Request):
    a = _args(req)
    residuals = hamilton_volterra_residual(a["model"], a["hamiltonian"],
                                           a["section"])
    ok = all(r.is_zero for r in residuals)
    return ({
        "residuals": [expr_to_str(r) for r in residuals],
        "zero": ok,
    }, EXIT_OK if ok else EXIT_FAILED_CHECK)


def _cmd_curve_check(req: Request):
    a = _args(req)
    results = ham_curve_check(a["map"], a["gamma"], a["field"], a["points"])
    ok = all(results)
    return ({"results": results, "all": ok},
            EXIT_OK if ok else EXIT_FAILED_CHECK)


def _cmd_bracket(req: Request):
    a = _args(req)
    w = a["omega"]
    obs = [make_observable(w, f) for f in a["args"]]
    result = l_k(w, obs)
    return {"k": len(obs), "result": form_to_json(result)}, EXIT_OK


def _cmd_lie_validate(req: Request):
    a = _args(req)
    if a["violation"] is not None:
        return {"valid": False, "detail": a["violation"]}, EXIT_FAILED_CHECK
    K = killing_form(a["algebra"])
    return {
        "valid": True,
        "killing": [[str(v) for v in row] for row in K.matrix],
        "semisimple": K.is_semisimple,
    }, EXIT_OK


def _comoment_to_json(cm: ComomentData) -> dict:
    return {
        "n": cm.n,
        "maps": [
            [{"idx": list(T), "form": form_to_json(val)}
             for T, val in sorted(comp.items())]
            for comp in cm.maps
        ],
    }


def _cmd_comoment(req: Request):
    a = _args(req)
    act, w = a["action"], a["omega"]
    if a["mode"] == "from-potential":
        cm = comoment_from_potential(act, a["potential"], w,
                                     potential_sign=a["potential_sign"])
        rep = comoment_verify(act, w, cm)
        return {
            "comoment": _comoment_to_json(cm),
            "verified": rep.all_zero,
        }, EXIT_OK
    rep = comoment_verify(act, w, a["maps"])
    out = {
        "verified": rep.all_zero,
        "lifting_residuals": {
            str(i): form_to_json(v)
            for i, v in sorted(rep.lifting_residuals.items()) if not v.is_zero
        },
        "relation_residuals": {
            f"{i}:{list(T)}": form_to_json(v)
            for (i, T), v in sorted(rep.relation_residuals.items())
            if not v.is_zero
        },
        "note": rep.kernel_note,
    }
    return out, EXIT_OK if rep.all_zero else EXIT_FAILED_CHECK


def _cmd_obstruction(req: Request):
    a = _args(req)
    rep = obstruction_cochain(a["action"], a["omega"], a["i"])
    out: Dict[str, Any] = {
        "i": rep.index,
        "cochain": [
            {"idx": list(T), "form": form_to_json(v)}
            for T, v in sorted(rep.cochain.items())
        ],
        "vanishes": rep.vanishes,
    }
    if rep.de_rham_exact is not None:
        out["de_rham_exact"] = {
            str(list(T)): v for T, v in sorted(rep.de_rham_exact.items())
        }
    if rep.ce_preimage is not None:
        out["ce_preimage"] = {
            str(list(T)): str(v) for T, v in sorted(rep.ce_preimage.items())
        }
    return out, EXIT_OK


def _cmd_conserved(req: Request):
    a = _args(req)
    obs = make_observable(a["omega"], a["hamiltonian"])
    verdict = conserved_classify(a["omega"], obs, a["alpha"])
    L = lie_derivative(obs.ham_field, a["alpha"])
    return {"class": verdict, "lie_derivative": form_to_json(L)}, EXIT_OK


def _cmd_move(req: Request):
    a = _args(req)
    auto = move_points(a["src"], a["dst"], a["n"])
    table = []
    for s, d in zip(a["src"], a["dst"]):
        out_pt = auto.apply(s)
        table.append({
            "src": gaussian_point_to_json(s),
            "out": gaussian_point_to_json(out_pt),
            "dst": gaussian_point_to_json(d),
            "match": list(out_pt) == list(d),
        })
    jac = jacobian_determinant(auto)
    _realified, preserved = realify_and_check(auto)
    return {
        "auto": auto_to_json(auto),
        "eval": table,
        "jacobian": expr_to_str(jac),
        "realified_preserves_volume": preserved,
    }, EXIT_OK


def _random_scalar(rng: random.Random, dim: int, max_terms: int = 3) -> RationalExpr:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        exps = tuple(Q(rng.randint(0, 2)) for _ in range(dim))
        terms[exps] = Q(rng.randint(-4, 4))
    return RationalExpr(ScalarExpr(dim, terms))


def _verify_ring_laws(a, seed: int):
    rng = random.Random(seed or 1)
    dim, samples = a["dim"], a["samples"]
    for _ in range(samples):
        x = _random_scalar(rng, dim)
        y = _random_scalar(rng, dim)
        z = _random_scalar(rng, dim)
        if not ((x + y) * z == x * z + y * z and x * y == y * x
                and (x + y) + z == x + (y + z)):
            return {"ok": False}
        i = rng.randint(1, dim)
        if not ((x * y).partial(i) == x.partial(i) * y + x * y.partial(i)):
            return {"ok": False}
    return {"ok": True, "samples": samples}


def _verify_exterior(a, seed: int):
    rng = random.Random(seed or 1)
    dim, samples = a["dim"], a["samples"]
    ch = chart(dim)
    for _ in range(samples):
        deg = rng.randint(1, dim - 1)
        tuples = list(combinations(range(1, dim + 1), deg))
        coeffs = {rng.choice(tuples): _random_scalar(rng, dim) for _ in range(2)}
        x = DiffForm(ch, deg, coeffs)
        if not ext_d(ext_d(x)).is_zero:
            return {"ok": False, "law": "dd"}
        X = MultiVec(ch, 1, {(rng.randint(1, dim),): _random_scalar(rng, dim)})
        cartan = interior(X, ext_d(x)) + ext_d(interior(X, x))
        if not (cartan == lie_derivative(X, x)):
            return {"ok": False, "law": "cartan"}
    return {"ok": True, "samples": samples}


def _cmd_verify(req: Request):
    a = _args(req)
    check = a["check"]
    if check == "ring-laws":
        out = _verify_ring_laws(a, req.seed)
    elif check == "exterior":
        out = _verify_exterior(a, req.seed)
    elif check == "linfty-relation":
        w = a["omega"]
        obs = [make_observable(w, f) for f in a["args"]]
        res = linfty_relation_residual(w, a["k"], obs)
        out = {"ok": res.is_zero, "residual": form_to_json(res)}
    elif check == "jacobiator":
        w = a["omega"]
        x, y, z = (make_observable(w, f) for f in a["args"])
        res = jacobiator_identity_residual(w, x, y, z)
        out = {"ok": res.is_zero, "residual": form_to_json(res)}
    elif check == "involutive":
        rep = involutive(a["frame"])
        out = {"ok": rep.involutive}
        if not rep.involutive:
            out["witness_pair"] = list(rep.witness_pair)
            out["witness_bracket"] = form_to_json(rep.witness_bracket)
    else:  # standard-subspace
        rep = verify_standard_subspace(a["omega"], a["frame"])
        out = {
            "ok": rep.ok,
            "pairwise_isotropic": rep.pairwise_isotropic,
            "rank": rep.rank,
            "frame_size": rep.frame_size,
            "quotient_power_dim": rep.quotient_power_dim,
        }
        if rep.failing_pair:
            out["failing_pair"] = list(rep.failing_pair)
    code = EXIT_OK if out.get("ok") else EXIT_FAILED_CHECK
    return out, code


HANDLERS: Dict[str, Callable[[Request], Tuple[dict, int]]] = {
    "classify": _cmd_classify,
    "flat": _cmd_flat,
    "hamvf": _cmd_hamvf,
    "hdw-residual": _cmd_hdw_residual,
    "multiphase": _cmd_multiphase,
    "volterra": _cmd_volterra,
    "curve-check": _cmd_curve_check,
    "bracket": _cmd_bracket,
    "lie-validate": _cmd_lie_validate,
    "comoment": _cmd_comoment,
    "obstruction": _cmd_obstruction,
    "conserved": _cmd_conserved,
    "move": _cmd_move,
    "verify": _cmd_verify,
}


def run(req: Request) -> Tuple[dict, int]:
    """Dispatch a validated request; returns (report, exit code)."""
    try:
        return HANDLERS[req.command](req)
    except SchemaError as exc:
        return ({"error": {"kind": "SchemaError", "detail": exc.violations}},
                EXIT_ERROR)
    except PlecticError as exc:
        return {"error": {"kind": exc.kind, "detail": str(exc)}}, EXIT_ERROR


def _render_text(obj, indent: int = 0) -> List[str]:
    pad = "  " * indent
    lines: List[str] = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plectic",
        description="exact multisymplectic geometry workbench",
    )
    parser.add_argument("--mode", choices=("exact", "float"), default="exact")
    parser.add_argument("--sign", choices=(SIGN_HDW, SIGN_FIN1),
                        default=SIGN_HDW, dest="sign_convention")
    parser.add_argument("--out", choices=("json", "text"), default="json")
    parser.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in COMMANDS:
        sp = sub.add_parser(cmd)
        sp.add_argument("input", nargs="?", default="-",
                        help="payload JSON file, or - for stdin")
    args = parser.parse_args(argv)

    if args.input == "-":
        raw = sys.stdin.buffer.read()
    else:
        try:
            with open(args.input, "rb") as fh:
                raw = fh.read()
        except OSError as exc:
            print(json.dumps({"error": {"kind": "IOError", "detail": str(exc)}}))
            return EXIT_ERROR

    options = {
        "mode": args.mode,
        "sign_convention": args.sign_convention,
        "seed": args.seed,
    }
    try:
        req = parse_request(raw, command=args.command, options=options)
    except SchemaError as exc:
        report = {"error": {"kind": "SchemaError", "detail": exc.violations}}
        print(json.dumps(report, sort_keys=True))
        return EXIT_ERROR
    report, code = run(req)
    if args.out == "json":
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print("\n".join(_render_text(report)))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
