"""Command line interface: nnr classify|boundary|shell|resultant|sample|render."""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import twobytwo as tb
from .core import is_normal
from .errors import DimensionMismatch, NNRError, ParseError, ZeroMatrix
from .normal import ArcFragment, FlatSegment, normal_boundary
from .oracle import cloud_csv, directional_extremes, sample_cloud
from .render import render_svg
from .resultant import sylvester_resultant, to_json
from .shell import GaussQ, Spectrum, ellipsoid_coeffs, exact_to_array, normal_shell

EXIT_PARSE, EXIT_ZERO, EXIT_DIM, EXIT_IO = 2, 3, 4, 5
_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


@dataclass
class MatrixSpec:
    matrix: np.ndarray | None = None
    exact: list | None = None
    spectrum: Spectrum | None = None

    @property
    def dense(self) -> np.ndarray:
        return self.matrix if self.matrix is not None else self.spectrum.matrix()


def _scalar(v, where: str):
    """(float value, Fraction or None) for a JSON number or numeric string."""
    if isinstance(v, bool):
        raise ParseError(f"{where}: expected a number")
    if isinstance(v, int):
        return float(v), Fraction(v)
    if isinstance(v, float):
        return v, None
    if isinstance(v, str):
        try:
            if _RATIONAL.match(v):
                q = Fraction(v.replace(" ", ""))
                return float(q), q
            return float(v), None
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: cannot read {v!r}") from exc
    raise ParseError(f"{where}: expected a number or numeric string")


def _complex(pair, where: str):
    if not isinstance(pair, list) or len(pair) != 2:
        raise ParseError(f"{where}: expected [re, im]")
    re_f, re_q = _scalar(pair[0], where)
    im_f, im_q = _scalar(pair[1], where)
    exact = GaussQ(re_q, im_q) if re_q is not None and im_q is not None else None
    return complex(re_f, im_f), exact


def parse_spec(text: str) -> MatrixSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    if "matrix" in doc:
        rows = doc["matrix"]
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise ParseError("matrix must be a nonempty list of rows")
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ParseError("matrix must be square")
        vals, exact = [], []
        for i, r in enumerate(rows):
            vr, er = [], []
            for j, e in enumerate(r):
                z, q = _complex(e, f"entry ({i},{j})")
                vr.append(z)
                er.append(q)
            vals.append(vr)
            exact.append(er)
        all_exact = all(q is not None for r in exact for q in r)
        return MatrixSpec(np.array(vals, dtype=complex), exact if all_exact else None)
    if "normal" in doc:
        nd = doc["normal"]
        if not isinstance(nd, dict) or not isinstance(nd.get("eigenvalues"), list) or not nd["eigenvalues"]:
            raise ParseError("normal form needs a nonempty eigenvalue list")
        ev = [_complex(p, f"eigenvalue {k}")[0] for k, p in enumerate(nd["eigenvalues"])]
        mult = nd.get("multiplicities")
        if mult is not None and (not isinstance(mult, list) or len(mult) != len(ev)
                                 or not all(isinstance(k, int) and k > 0 for k in mult)):
            raise ParseError("multiplicities must be positive integers, one per eigenvalue")
        return MatrixSpec(spectrum=Spectrum.from_values(ev, mult))
    raise ParseError('expected a "matrix" or "normal" key')


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _check_nonzero(spec: MatrixSpec):
    if spec.spectrum is not None:
        if all(z == 0 for z in spec.spectrum.eigenvalues):
            raise ZeroMatrix("zero spectrum")
    elif not np.any(spec.matrix):
        raise ZeroMatrix("zero matrix")


def _normal_spectrum(spec: MatrixSpec) -> Spectrum | None:
    if spec.spectrum is not None:
        return spec.spectrum
    if spec.matrix.shape[0] == 1 or is_normal(spec.matrix, tb.NORMAL_RTOL):
        return Spectrum.from_matrix(spec.matrix)
    return None


def _piece_json(p) -> dict:
    if isinstance(p, tb.ConicPiece):
        hp = p.halfplane
        return {"type": "conic", "kind": p.kind, "attained": p.attained,
                "coefficients": list(p.conic.as_tuple()),
                "halfplane": None if hp is None else {"normal": _pair(hp.normal), "threshold": hp.threshold,
                                                      "sense": ">=" if hp.upper else "<="},
                "start": _pair(p.start()), "end": _pair(p.end())}
    if isinstance(p, ArcFragment):
        return {"type": "hyperbolic-arc", "lambda": _pair(p.arc.lam), "mu": _pair(p.arc.mu),
                "vertex": _pair(p.arc.vertex), "degenerate": p.arc.degenerate,
                "start": _pair(p.points[0]), "end": _pair(p.points[-1])}
    if isinstance(p, FlatSegment):
        return {"type": "flat-segment", "z1": _pair(p.z1), "z2": _pair(p.z2), "alpha": p.alpha,
                "tangent_arcs": [list(t) for t in p.tangent_arcs]}
    z = complex(np.asarray(p).reshape(-1)[0])
    return {"type": "point", "z": _pair(z)}


def boundary_doc(spec: MatrixSpec, cfg) -> dict:
    _check_nonzero(spec)
    spectrum = _normal_spectrum(spec)
    if spectrum is not None:
        nb = normal_boundary(spectrum, cfg.resolution)
        return {"case": "Normal", "closed": nb.closed, "contains_origin": nb.contains_origin,
                "approximate": False, "degenerate": nb.degenerate, "multi_component": nb.multi_component,
                "polyline_closed": not nb.degenerate,
                "pieces": [_piece_json(p) for p in nb.pieces],
                "eigenvalues": [_pair(z) for z in spectrum.eigenvalues],
                "polyline": [_pair(z) for z in nb.polyline]}
    M = spec.matrix
    if M.shape[0] == 2:
        b = tb.boundary_2x2(M, cfg.resolution)
        pieces = [_piece_json(p) for p in b.pieces]
        if b.classification.case == tb.GENERIC:
            pieces = [{"type": "resultant-curve", "degree": sylvester_resultant(ellipsoid_coeffs(M)).degree}]
        return {"case": b.classification.case, "closed": b.closed, "approximate": False,
                "degenerate": b.degenerate, "multi_component": b.multi_component,
                "polyline_closed": True, "pieces": pieces,
                "eigenvalues": [_pair(z) for z in b.classification.eigenvalues],
                "polyline": [_pair(z) for z in b.polyline]}
    cloud = sample_cloud(M, cfg.samples, cfg.seed)
    ext = directional_extremes(cloud, cfg.resolution)
    keep = np.concatenate([[True], np.abs(np.diff(ext)) > 0])
    ev = np.linalg.eigvals(M)
    return {"case": "NonNormal", "closed": None, "approximate": True, "degenerate": False,
            "multi_component": False, "polyline_closed": True, "pieces": [],
            "eigenvalues": [_pair(z) for z in ev], "polyline": [_pair(z) for z in ext[keep]]}


def cmd_classify(spec: MatrixSpec, cfg) -> str:
    _check_nonzero(spec)
    spectrum = _normal_spectrum(spec)
    if spectrum is not None:
        mods = np.abs(np.array(spectrum.eigenvalues))
        unitary_like = bool(np.ptp(mods) <= 1e-10 * mods.max())
        if spectrum.m >= 3:
            shape = "polygon" if unitary_like else "hyperbolic-arcs"
        else:
            shape = "point" if spectrum.m == 1 else "arc"
        nb = normal_boundary(spectrum, 64)
        doc = {"case": "Unitary-like" if unitary_like else "Normal", "boundary": shape,
               "eigenvalues": [_pair(z) for z in spectrum.eigenvalues],
               "multiplicities": list(spectrum.multiplicities),
               "closed": nb.closed, "contains_origin": nb.contains_origin,
               "flat_segments": len(nb.flat_segments),
               "pieces": [_piece_json(p)["type"] for p in nb.pieces]}
        return json.dumps(doc, indent=2)
    M = spec.matrix
    if M.shape[0] != 2:
        ev = np.linalg.eigvals(M)
        doc = {"case": "NonNormal", "boundary": "sampled", "eigenvalues": [_pair(z) for z in ev],
               "singular_values": sorted(np.linalg.svd(M, compute_uv=False).tolist()),
               "closed": bool(abs(np.linalg.det(M)) > 0) or None}
        return json.dumps(doc, indent=2)
    c = tb.classify(M)
    s1, s2 = tb.singular_values_2x2(M)
    ax = tb.symmetry_axis(M)
    if c.case in (tb.TWO_ARCS, tb.RANK_ONE, tb.SAME_MODULUS):
        inv = [p.kind for p in tb.boundary_two_arcs(M)]
    elif c.case == tb.NEGATIVE_RATIO:
        inv = ["full-ellipse"]
    else:
        inv = ["resultant-curve"]
    doc = {"case": c.case, "eigenvalues": [_pair(z) for z in c.eigenvalues],
           "singular_values": [s1, s2],
           "symmetry_axis": "all" if ax.all_axes else _pair(ax.direction),
           "closed": c.closed, "notes": c.notes, "pieces": inv}
    return json.dumps(doc, indent=2)


def cmd_boundary(spec: MatrixSpec, cfg) -> str:
    doc = boundary_doc(spec, cfg)
    if cfg.format == "csv":
        return "re,im\n" + "".join(f"{x:.17g},{y:.17g}\n" for x, y in doc["polyline"])
    return json.dumps(doc, indent=1)


def cmd_shell(spec: MatrixSpec, cfg) -> str:
    _check_nonzero(spec)
    spectrum = _normal_spectrum(spec)
    if spectrum is not None:
        p = normal_shell(spectrum)
        doc = {"type": "polytope", "dim": p.dim, "vertices": p.vertices.tolist(),
               "facets": [{"indices": list(f.indices), "normal": f.normal.tolist(), "offset": f.offset}
                          for f in p.facets],
               "edges": [list(e) for e in p.edges]}
        if p.plane is not None:
            doc["plane"] = {"normal": p.plane[0].tolist(), "offset": p.plane[1]}
        return json.dumps(doc, indent=1)
    if spec.matrix.shape[0] != 2:
        raise DimensionMismatch("the shell of a non-normal matrix is only built for n = 2")
    ell = ellipsoid_coeffs(spec.exact if spec.exact is not None else spec.matrix)
    coeffs = [str(c) if ell.exact else c for c in ell.coeffs]
    return json.dumps({"type": "ellipsoid", "exact": ell.exact, "coefficients": coeffs}, indent=1)


def cmd_resultant(spec: MatrixSpec, cfg) -> str:
    _check_nonzero(spec)
    if spec.matrix is None:
        if spec.spectrum.n != 2:
            raise DimensionMismatch("the resultant is defined for 2x2 matrices")
        A = spec.spectrum.matrix()
    else:
        A = spec.exact if spec.exact is not None else spec.matrix
        if spec.matrix.shape[0] != 2:
            raise DimensionMismatch("the resultant is defined for 2x2 matrices")
    return json.dumps(to_json(sylvester_resultant(ellipsoid_coeffs(A))), indent=1)


def cmd_sample(spec: MatrixSpec, cfg) -> str:
    _check_nonzero(spec)
    return cloud_csv(sample_cloud(spec.dense, cfg.samples, cfg.seed))


def cmd_render(spec, cfg) -> str:
    doc = spec if isinstance(spec, dict) else boundary_doc(spec, cfg)
    cloud = None
    if cfg.cloud and not isinstance(spec, dict):
        cloud = sample_cloud(spec.dense, cfg.samples, cfg.seed).points
    return render_svg(doc, cloud)


COMMANDS = {"classify": cmd_classify, "boundary": cmd_boundary, "shell": cmd_shell,
            "resultant": cmd_resultant, "sample": cmd_sample, "render": cmd_render}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nnr", description="Normalized numerical range tools")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input", help="matrix spec JSON (render also accepts boundary JSON); '-' for stdin")
    ap.add_argument("--resolution", type=int, default=2048)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--format", choices=["svg", "csv", "json"], default=None)
    ap.add_argument("--out", default=None)
    ap.add_argument("--cloud", action="store_true", help="render: overlay a sample cloud")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name in ("resolution", "samples"):
        if getattr(args, name) <= 0:
            print(f"nnr: --{name} must be positive", file=sys.stderr)
            return EXIT_PARSE
    if args.tol <= 0:
        print("nnr: --tol must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        text = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
    except OSError as exc:
        print(f"nnr: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if args.command == "render" and '"polyline"' in text:
            try:
                spec = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        else:
            spec = parse_spec(text)
        out = COMMANDS[args.command](spec, args)
    except ParseError as exc:
        print(f"nnr: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ZeroMatrix as exc:
        print(f"nnr: {exc}", file=sys.stderr)
        return EXIT_ZERO
    except DimensionMismatch as exc:
        print(f"nnr: {exc}", file=sys.stderr)
        return EXIT_DIM
    except NNRError as exc:
        print(f"nnr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(out)
        else:
            sys.stdout.write(out if out.endswith("\n") else out + "\n")
    except OSError as exc:
        print(f"nnr: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
