"""Command line entry point: ``cremona classify | linearize | threshold | verify``.

Exit codes: 0 certified (or threshold computed), 2 inconclusive or out of
scope, 1 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import __version__
from .field import DEFAULT_PRIME, GF, QQ
from .linsys import ConditionError, CurveParam
from .maps import MapError, RationalMap, SamplingError, push_points, sample_surface_points
from .parser import ParseError, format_rational, parse_point, parse_polynomial, parse_rational
from .pipeline import PipelineOptions, run_pipeline
from .poly import divides
from .report import CERTIFIED, CERTIFIED_BY_THRESHOLD, INCONCLUSIVE, OUT_OF_SCOPE, dumps, jsonable
from .surface import (CaseLabel, ConicHint, HintError, SurfaceInput, Unclassified, classify_case,
                      verify_hints)
from .threshold import (ThresholdError, corollary_certificate, effective_threshold, format_threshold,
                        get_model)

log = logging.getLogger("cremona")

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class DescriptorError(ValueError):
    pass


# ---------------------------------------------------------------------------
# descriptors


def _curve(doc, field=QQ) -> CurveParam | ConicHint:
    if not isinstance(doc, dict):
        raise DescriptorError(f"curve hint must be an object, got {doc!r}")
    kind = doc.get("type", "custom")
    if "equations" in doc:
        raise DescriptorError("equation hints need the surface variables; use _curve_with_vars")
    comps = doc.get("parametrization")
    if not isinstance(comps, list) or len(comps) != 4:
        raise DescriptorError("a parametrization lists 4 expressions in s, t")
    polys = tuple(parse_polynomial(c, ["s", "t"], field) for c in comps)
    return CurveParam(polys, kind)


def _curve_with_vars(doc, variables, field=QQ):
    if isinstance(doc, dict) and "equations" in doc:
        eqs = doc["equations"]
        if doc.get("type", "conic") != "conic" or len(eqs) != 2:
            raise DescriptorError("equation hints describe a conic: [plane, quadric]")
        plane, quad = (parse_polynomial(e, variables, field) for e in eqs)
        if plane.degree() != 1 or quad.degree() != 2:
            raise DescriptorError("a conic is given by a plane and a quadric")
        return ConicHint(plane, quad)
    return _curve(doc, field)


def load_descriptor(doc: dict) -> tuple[SurfaceInput, dict]:
    """SurfaceInput and the option overrides of a descriptor document."""
    if not isinstance(doc, dict):
        raise DescriptorError("the descriptor must be a JSON object")
    variables = doc.get("variables", ["x0", "x1", "x2", "x3"])
    if not isinstance(variables, list) or len(variables) != 4:
        raise DescriptorError("variables must list 4 names")
    if "polynomial" not in doc:
        raise DescriptorError("missing 'polynomial'")
    S = parse_polynomial(doc["polynomial"], variables)
    hints = doc.get("hints", {}) or {}
    unknown = set(hints) - {"singular_curves", "singular_points", "secants", "gamma",
                            "general_points", "residual_quadric", "case_override"}
    if unknown:
        raise DescriptorError(f"unknown hints: {', '.join(sorted(unknown))}")
    inp = SurfaceInput(
        S, tuple(variables),
        singular_curves=[_curve_with_vars(c, variables) for c in hints.get("singular_curves", [])],
        singular_points=[parse_point(p, 4) for p in hints.get("singular_points", [])],
        secants=[_curve(c) for c in hints.get("secants", [])],
        gamma=_curve(hints["gamma"]) if hints.get("gamma") else None,
        residual_quadric=(parse_polynomial(hints["residual_quadric"], variables)
                          if hints.get("residual_quadric") else None),
        general_points=[parse_point(p, 4) for p in hints.get("general_points", [])],
        case_override=hints.get("case_override"),
    )
    return inp, dict(doc.get("options", {}) or {})


def build_options(overrides: dict, args) -> PipelineOptions:
    opts = dict(overrides)
    for key in ("prime", "seed", "samples", "mode"):
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    unknown = set(opts) - {"prime", "seed", "samples", "mode", "trials", "search_bound",
                           "recursion_budget"}
    if unknown:
        raise DescriptorError(f"unknown options: {', '.join(sorted(unknown))}")
    return PipelineOptions(**opts)


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> tuple[dict, int]:
    inp, overrides = load_descriptor(_read_json(args.input))
    opts = build_options(overrides, args)
    verify_hints(inp)
    try:
        cls = classify_case(inp, min(opts.search_bound, 2))
    except Unclassified as exc:
        return {"case": None, "status": INCONCLUSIVE, "notes": [str(exc)]}, EXIT_INCONCLUSIVE
    doc = {"case": cls.label.value, "evidence": cls.evidence,
           "point": jsonable(cls.point) if cls.point is not None else None}
    if cls.label == CaseLabel.CONE:
        doc.update(status=OUT_OF_SCOPE, notes=["cones are out of scope"])
        return doc, EXIT_INCONCLUSIVE
    doc["status"] = "classified"
    return doc, EXIT_OK


def cmd_linearize(args) -> tuple[dict, int]:
    inp, overrides = load_descriptor(_read_json(args.input))
    opts = build_options(overrides, args)
    report = run_pipeline(inp, opts)
    return report.to_json(), report.exit_code


def cmd_threshold(args) -> tuple[dict, int]:
    model = get_model(args.model)
    try:
        cls = [parse_rational(c.strip()) for c in args.divisor_class.split(",")]
    except ValueError as exc:
        raise DescriptorError(str(exc)) from exc
    rho = effective_threshold(model, cls)
    cert = corollary_certificate(model, cls, "command line")
    return {"model": model.name, "class": [format_rational(c) for c in cls],
            "rho": format_threshold(rho), "zero_lt_rho_lt_one": cert.certifies_ce_to_plane,
            "basis": model.class_basis_doc}, EXIT_OK


def cmd_verify(args) -> tuple[dict, int]:
    """Re-check a report against its surface: exact pullback or fresh samples."""
    inp, overrides = load_descriptor(_read_json(args.input))
    opts = build_options(overrides, args)
    report = _read_json(args.report)
    S = inp.equation
    prime = report.get("provenance", {}).get("prime", opts.prime)
    final = report.get("final", {})
    out: dict = {"case": report.get("case"), "status": report.get("status")}
    if report.get("status") not in (CERTIFIED, CERTIFIED_BY_THRESHOLD):
        out.update(verified=False, reason="the report does not claim a certificate")
        return out, EXIT_INCONCLUSIVE
    maps = []
    for step in report.get("steps", []):
        if "forms" not in step:
            continue
        fld = QQ if step.get("field_mode") == "exact-Q" else GF(prime)
        names = step["source_variables"]
        forms = tuple(parse_polynomial(f, names, fld) for f in step["forms"])
        maps.append(RationalMap(forms, False, step.get("name", "")))
    out["maps_parsed"] = len(maps)
    if final.get("kind") == "plane":
        exact = all(m.field == QQ for m in maps)
        fld = QQ if exact else GF(prime)
        last = maps[-1].target_dim + 1 if maps else 4
        names = [f"y{i}" for i in range(last)] if maps else list(inp.variables)
        plane = parse_polynomial(final["plane_form"], names, fld)
        if exact:
            g = plane
            for m in reversed(maps):
                g = m.pullback(g)
            out["exact_pullback_divisible"] = divides(S, g)
            ok = out["exact_pullback_divisible"]
        else:
            pts = sample_surface_points(S, prime, 100, opts.seed + 997).points
            for m in maps:
                pts, _ = push_points(m, pts, prime)
            bad = sum(1 for q in pts if plane.evaluate(q) != 0)
            out["fresh_samples"] = len(pts)
            out["fresh_samples_off_plane"] = bad
            ok = bad == 0 and len(pts) > 0
    elif final.get("kind") == "rho_certificate":
        model = get_model(final["model"])
        rho = effective_threshold(model, [parse_rational(c) for c in final["class"]])
        claimed = final.get("certificate", {}).get("rho")
        out["rho_recomputed"] = format_threshold(rho)
        ok = claimed == format_threshold(rho) and not isinstance(rho, str) and 0 < rho < 1
    else:
        out.update(verified=False, reason=f"unknown final kind {final.get('kind')!r}")
        return out, EXIT_INCONCLUSIVE
    out["verified"] = bool(ok)
    return out, EXIT_OK if ok else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------
# argument parsing


def _read_json(path: str | None):
    if path is None:
        raise DescriptorError("an input file is required (-i)")
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _common(p: argparse.ArgumentParser, needs_input=True):
    if needs_input:
        p.add_argument("-i", "--input", required=True, help="surface descriptor (JSON), '-' for stdin")
    p.add_argument("-o", "--output", help="write the JSON document here instead of stdout")
    p.add_argument("--prime", type=int, help=f"prime for sampling and certificates (default {DEFAULT_PRIME})")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--samples", type=int, help="sample count for smoothness checks")
    p.add_argument("--mode", choices=["exact", "certificate"], help="exact-Q or certificate-F_p")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cremona", description="Linearize rational quartic surfaces "
                                 "by explicit Cremona maps and compute effective thresholds.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("classify", help="verify hints and decide the case")
    _common(p)
    p.set_defaults(func=cmd_classify)
    p = sub.add_parser("linearize", help="run the case construction and emit a report")
    _common(p)
    p.set_defaults(func=cmd_linearize)
    p = sub.add_parser("threshold", help="effective threshold of a class on a catalog model")
    _common(p, needs_input=False)
    p.add_argument("--model", required=True, help="p3, blowup-p3-pt, p1xp2, wps1112, quadric-cone-q4")
    p.add_argument("--class", dest="divisor_class", required=True,
                   help="comma separated coordinates, e.g. 3,2 or 1/2,1")
    p.set_defaults(func=cmd_threshold)
    p = sub.add_parser("verify", help="re-check a report against its descriptor")
    _common(p)
    p.add_argument("--report", required=True, help="report JSON produced by linearize")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        doc, code = args.func(args)
    except (ParseError, DescriptorError, HintError, ConditionError, ThresholdError, MapError,
            SamplingError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    text = dumps(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
