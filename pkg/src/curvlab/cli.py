"""Command-line front end: verify, audit, scan and certify the model family.

Reports are JSON (or a short text rendering).  A run over a single sample
point prints one report object; a grid prints a list of them ordered by
``t``.  The exit code is 0 when every entry passes, 1 on any failure and 2 on
usage or parameter errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .example_family import (
    CASES,
    InvalidParams,
    FamilyParams,
    PowerH,
    SqrtH,
    build_family,
    case_presets,
    default_t_grid,
    oracle_eval,
    rr_witness_index,
)
from .identity_audit import FAIL, PASS, SKIPPED, run_audit
from .jet import JetError
from .kaehler_model import (
    FrameSpecError,
    KaehlerPackage,
    build_package,
    kaehler_certificates,
    scalar_drift,
)
from .pseudosymmetry import (
    build_q,
    build_rh,
    derivation_action,
    solve_structure_function,
)

DEFAULT_TOL = 1e-9
ENV_TOL = "CURVLAB_TOL"


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    m: int
    h_spec: Optional[str]
    case: Optional[str]
    a: float
    t_grid: tuple[float, ...]
    K: int
    tol: float
    fmt: str = "json"
    out: Optional[str] = None


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _kv(body: str) -> dict[str, float]:
    out = {}
    for part in filter(None, body.split(",")):
        if "=" not in part:
            raise UsageError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"{k.strip()}: not a number: {v!r}") from None
    return out


def parse_h(spec: str):
    """``power:p=..[,coef=..]`` or ``sqrt:a=..,b=..,c=..``."""
    kind, _, body = spec.partition(":")
    args = _kv(body)
    if kind == "power":
        if "p" not in args or set(args) - {"p", "coef"}:
            raise UsageError("power needs p=.. and optionally coef=..")
        return PowerH(args["p"], args.get("coef", 1.0))
    if kind == "sqrt":
        if set(args) != {"a", "b", "c"}:
            raise UsageError("sqrt needs exactly a=..,b=..,c=..")
        return SqrtH(args["a"], args["b"], args["c"])
    raise UsageError(f"unknown h kind {kind!r}; use power:... or sqrt:...")


def parse_t(spec: str) -> tuple[float, ...]:
    """A single value or ``lo:hi:n`` with both endpoints included."""
    try:
        parts = spec.split(":")
        if len(parts) == 1:
            return (float(parts[0]),)
        if len(parts) == 3:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
            if n < 1:
                raise UsageError("grid needs n >= 1")
            return tuple(float(x) for x in np.linspace(lo, hi, n))
    except ValueError as exc:
        raise UsageError(f"bad t spec {spec!r}: {exc}") from None
    raise UsageError(f"bad t spec {spec!r}; use a number or lo:hi:n")


def make_params(cfg: RunConfig, t0: float) -> FamilyParams:
    if cfg.case is not None:
        return case_presets(cfg.case, cfg.m, t0=t0, a=cfg.a, K=cfg.K)
    return FamilyParams(m=cfg.m, h=parse_h(cfg.h_spec), t0=t0, K=cfg.K)


def resolve_grid(cfg: RunConfig) -> list[FamilyParams]:
    """Validated parameters per grid point.

    A single requested point must be valid.  In a grid, points outside the
    domain of ``h`` (singular endpoints, non-positive radicand) are dropped.
    """
    if len(cfg.t_grid) == 1:
        return [make_params(cfg, cfg.t_grid[0])]
    out = []
    for t0 in cfg.t_grid:
        try:
            out.append(make_params(cfg, t0))
        except InvalidParams:
            continue
    if not out:
        raise InvalidParams("no valid point in the t grid")
    return out


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _entry(id_: str, residual: Optional[float], scale: Optional[float], tol: float) -> dict:
    ok = residual is not None and residual < tol
    return {"id": id_, "residual": residual, "scale": scale, "verdict": PASS if ok else FAIL}


def _rel(x: float, ref: float) -> tuple[float, float]:
    scale = max(1.0, abs(ref))
    return abs(x - ref) / scale, scale


def _clean(x):
    return None if x is None or not np.isfinite(x) else float(x)


def _report(p: FamilyParams, entries: list[dict], f_hat, r, classification) -> dict:
    entries = sorted(entries, key=lambda e: e["id"])
    for e in entries:
        e["residual"] = _clean(e["residual"])
        e["scale"] = _clean(e["scale"])
    return {
        "params": p.to_dict(),
        "point": p.t0,
        "entries": entries,
        "f_hat": _clean(f_hat),
        "r": _clean(r),
        "classification": classification,
    }


def _package(p: FamilyParams) -> KaehlerPackage:
    return build_package(*build_family(p))


def verify_point(p: FamilyParams, tol: float, pkg: Optional[KaehlerPackage] = None) -> dict:
    """Structure function against the closed form, ``Q . R = 0`` and the witness."""
    pkg = pkg or _package(p)
    R, S = pkg.riemann, pkg.ricci
    cs = pkg.complex_structure
    rr = derivation_action(R, R)
    rh_r = derivation_action(build_rh(cs, pkg.base_point, R.order), R)
    vr = solve_structure_function(rr, rh_r, tol)
    f_ref = oracle_eval(p, "f").value
    entries = []

    res, scale = _rel(vr.f_value, f_ref)
    entries.append(_entry("pseudosym.riemann.f_hat", res, scale, tol))
    entries.append(_entry("pseudosym.riemann.residual", vr.residual_pseudo, vr.scale, tol))

    # on Einstein points R^H . S vanishes and f is not determined by S;
    # then the check is that R . S vanishes too
    rs = derivation_action(R, S)
    rh_s = derivation_action(build_rh(cs, pkg.base_point, S.order), S)
    vs = solve_structure_function(rs, rh_s, tol)
    # every component of R . S sums 2 * dim products of R and S entries
    term_scale = max(1.0, 2 * pkg.dim * R.max_abs() * S.max_abs())
    if rh_s.max_abs() < tol * term_scale:
        entries.append(_entry("pseudosym.ricci.f_hat", rs.max_abs() / term_scale, term_scale, tol))
    else:
        res, scale = _rel(vs.f_value, f_ref)
        entries.append(_entry("pseudosym.ricci.f_hat", max(res, vs.residual_pseudo), scale, tol))

    qr = derivation_action(build_q(pkg, oracle_eval(p, "f")), R)
    scale = max(1.0, rr.max_abs())
    entries.append(_entry("pseudosym.q_dot_r", qr.max_abs() / scale, scale, tol))

    wit = rr.value[rr_witness_index(p.m)]
    res, scale = _rel(wit, oracle_eval(p, "rr_at_index").value)
    entries.append(_entry("pseudosym.rr_witness", res, scale, tol))

    if isinstance(p.h, SqrtH):
        res, scale = _rel(pkg.scalar.value, oracle_eval(p, "sqrt_scalar").value)
        entries.append(_entry("scalar.constant_closed_form", max(res, scalar_drift(pkg)), scale, tol))
        res, scale = _rel(f_ref, oracle_eval(p, "sqrt_f").value)
        entries.append(_entry("scalar.f_closed_form", res, scale, tol))

    return _report(p, entries, vr.f_value, pkg.scalar.value, vr.classification.value)


def audit_point(p: FamilyParams, tol: float) -> dict:
    pkg = _package(p)
    rr = derivation_action(pkg.riemann, pkg.riemann)
    rh_r = derivation_action(build_rh(pkg.complex_structure, pkg.base_point, pkg.riemann.order), pkg.riemann)
    v = solve_structure_function(rr, rh_r, tol)
    report = run_audit(pkg, v.f_hat, p.to_dict(), max(tol, 1e-8))
    entries = [
        {"id": e.id, "residual": e.residual, "scale": e.scale, "verdict": e.verdict}
        for e in report.entries
    ]
    return _report(p, entries, v.f_value, pkg.scalar.value, v.classification.value)


def certify_point(p: FamilyParams, tol: float) -> dict:
    frame, cs = build_family(p)
    pkg = build_package(frame, cs)
    cert = kaehler_certificates(frame, cs, pkg, tol)
    entries = [
        _entry("kaehler.nijenhuis", cert.nijenhuis, 1.0, tol),
        _entry("kaehler.nabla_j", cert.nabla_j, 1.0, tol),
        _entry("kaehler.d_omega", cert.d_omega, 1.0, tol),
    ]
    return _report(p, entries, None, pkg.scalar.value, None)


def scan_point(p: FamilyParams, tol: float) -> dict:
    """Verify record plus the flags used to classify the family members."""
    pkg = _package(p)
    rec = verify_point(p, tol, pkg)
    r = pkg.scalar
    S = pkg.ricci.value
    n = pkg.n
    gap = float(np.max(np.abs(S - r.value / (2 * n) * np.eye(pkg.dim))))
    f = rec["f_hat"] or 0.0
    rec["flags"] = {
        "f_sign": int(np.sign(f)) if abs(f) > tol else 0,
        "r_constant": scalar_drift(pkg) < tol,
        "einstein": gap < tol * max(1.0, float(np.max(np.abs(S)))),
        "einstein_gap": gap,
        "nabla_r_max": pkg.nabla_r.max_abs(),
    }
    return rec


COMMANDS = {
    "verify": verify_point,
    "audit": audit_point,
    "certify": certify_point,
    "scan": scan_point,
}


def run(cfg: RunConfig) -> list[dict]:
    fn = COMMANDS[cfg.command]
    return sorted((fn(p, cfg.tol) for p in resolve_grid(cfg)), key=lambda rec: rec["point"])


def passed(records: list[dict]) -> bool:
    # precondition skips are not failures
    return all(e["verdict"] in (PASS, SKIPPED) for rec in records for e in rec["entries"])


def dumps(records: list[dict]) -> str:
    payload = records[0] if len(records) == 1 else records
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def render_text(records: list[dict]) -> str:
    lines = []
    for rec in records:
        head = f"t={rec['point']:g}  params={rec['params']['h']} m={rec['params']['m']}"
        if rec["f_hat"] is not None:
            head += f"  f_hat={rec['f_hat']:.12g}"
        head += f"  r={rec['r']:.12g}"
        if rec["classification"]:
            head += f"  [{rec['classification']}]"
        lines.append(head)
        for e in rec["entries"]:
            res = "-" if e["residual"] is None else f"{e['residual']:.3e}"
            lines.append(f"  {e['verdict']:<22} {res:>10}  {e['id']}")
        if "flags" in rec:
            lines.append("  flags " + " ".join(f"{k}={v}" for k, v in sorted(rec["flags"].items())))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _default_tol() -> float:
    raw = os.environ.get(ENV_TOL)
    if raw is None:
        return DEFAULT_TOL
    try:
        return float(raw)
    except ValueError:
        raise UsageError(f"{ENV_TOL}={raw!r} is not a number") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="curvlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    specs = {
        "verify": "structure function, Q.R and witness checks",
        "audit": "curvature identity catalog",
        "scan": "per-point flags over a t grid",
        "certify": "Kähler certificates (N_J, nabla J, dOmega)",
    }
    for name, help_ in specs.items():
        aliases = ["certify-kaehler"] if name == "certify" else []
        sp = sub.add_parser(name, help=help_, aliases=aliases)
        sp.set_defaults(command=name)
        sp.add_argument("--m", type=int, required=True, help="complex dimension minus one (m >= 1)")
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--h", dest="h_spec", help="power:p=..[,coef=..] or sqrt:a=..,b=..,c=..")
        src.add_argument("--case", choices=CASES, help="one of the constant scalar curvature presets")
        sp.add_argument("--a", type=float, default=1.0, help="parameter of case iii")
        sp.add_argument("--t", dest="t_spec", default=None, help="t value or lo:hi:n grid")
        sp.add_argument("--K", type=int, default=5, help="jet order of the brackets")
        sp.add_argument("--tol", type=float, default=None, help=f"tolerance (env {ENV_TOL})")
        sp.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    if ns.t_spec is None:
        grid = default_t_grid(ns.case)
    else:
        grid = parse_t(ns.t_spec)
    if ns.h_spec is not None:
        parse_h(ns.h_spec)
    tol = ns.tol if ns.tol is not None else _default_tol()
    if not tol > 0:
        raise UsageError("tolerance must be positive")
    return RunConfig(ns.command, ns.m, ns.h_spec, ns.case, ns.a, grid, ns.K, tol, ns.fmt, ns.out)


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        records = run(cfg)
    except (UsageError, InvalidParams, JetError, FrameSpecError) as exc:
        print(f"curvlab: error: {exc}", file=sys.stderr)
        return 2
    text = dumps(records) if cfg.fmt == "json" else render_text(records)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if passed(records) else 1


if __name__ == "__main__":
    sys.exit(main())
