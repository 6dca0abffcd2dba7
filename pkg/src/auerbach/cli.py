"""Command-line front end: ``auerbach <command> ...``.

Matrices travel as JSON documents ``{"p": "3", "n": 3, "rows": [[...], ...]}``
with optional ``label``, ``residual`` and ``provenance`` fields; a plain
whitespace matrix is accepted on input (``--p`` then supplies the exponent).
A file argument of ``-`` reads stdin. Reports go to stdout, diagnostics to
stderr. Exit codes: 0 success/true, 1 checked-false, 2 usage, parse or
domain error. ``AUERBACH_TOL`` overrides the default residual tolerance.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import sys

import numpy as np

from .canonical import canonical_form
from .classification import (
    classify_l3_basis,
    classify_l3_vector,
    classify_strong_vector,
    is_strong_auerbach,
)
from .constructions import (
    block_basis,
    hadamard2_basis,
    identity_basis,
    jinf_basis,
    jp_basis,
    solve_rp,
    sylvester_double,
)
from .core import DEFAULT_TOL, BasisMatrix, PExponent, ToleranceConfig
from .errors import AuerbachError
from .orthogonality import is_auerbach
from .solver import ISOLATION_TOL, continuation_track, label_classes, run_census

log = logging.getLogger("auerbach")

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2
MAX_ENUMERATE_N = 4
CONSTRUCTIONS = ("identity", "hadamard2", "block", "jp", "jinf", "sylvester")


class UsageError(Exception):
    """Bad command-line input; reported with exit code 2."""


# -- documents ----------------------------------------------------------------


def tolerance_from_env() -> ToleranceConfig:
    text = os.environ.get("AUERBACH_TOL")
    if not text:
        return DEFAULT_TOL
    try:
        return dataclasses.replace(DEFAULT_TOL, residual_tol=float(text))
    except ValueError as exc:
        raise UsageError(f"AUERBACH_TOL: {exc}") from None


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def parse_document(text: str, p_override: str | None = None) -> tuple[BasisMatrix, dict]:
    """Parse a MatrixDocument (JSON) or a whitespace matrix into a basis."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON: {exc}") from None
        missing = [k for k in ("p", "n", "rows") if k not in doc]
        if missing:
            raise UsageError(f"document lacks field(s): {', '.join(missing)}")
    else:
        try:
            rows = [[float(tok) for tok in line.split()] for line in stripped.splitlines()
                    if line.strip() and not line.lstrip().startswith("#")]
        except ValueError as exc:
            raise UsageError(f"invalid matrix text: {exc}") from None
        if p_override is None:
            raise UsageError("text matrices need --p")
        doc = {"p": p_override, "n": len(rows), "rows": rows}
    p = PExponent.of(str(p_override if p_override is not None else doc["p"]))
    n = doc["n"]
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"n must be a positive integer, got {n!r}")
    try:
        rows = np.array(doc["rows"], dtype=float)
    except (TypeError, ValueError):
        raise UsageError("rows must be an n x n array of numbers") from None
    if rows.shape != (n, n):
        raise UsageError(f"rows have shape {rows.shape}, expected ({n}, {n})")
    if not np.all(np.isfinite(rows)):
        raise UsageError("rows contain non-finite entries")
    return BasisMatrix(rows, p), doc


def load_basis(path: str, p_override: str | None = None) -> BasisMatrix:
    return parse_document(_read_text(path), p_override)[0]


def matrix_document(B: BasisMatrix, label: str | None = None, residual: float | None = None,
                    provenance: str | None = None) -> dict:
    doc: dict = {"p": str(B.p), "n": B.n, "rows": [[float(v) for v in row] for row in B.rows]}
    if label is not None:
        doc["label"] = label
    if residual is not None:
        doc["residual"] = float(residual)
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def _finite(x):
    """JSON has no inf/nan: map them to null so output stays strict JSON."""
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


def emit(obj, out=None) -> None:
    out = out or sys.stdout
    out.write(json.dumps(_finite(obj), indent=2, sort_keys=True, allow_nan=False))
    out.write("\n")


def emit_text_matrix(B: BasisMatrix, out=None) -> None:
    out = out or sys.stdout
    out.write(f"# p={B.p} n={B.n}\n")
    for row in B.rows:
        out.write(" ".join(repr(float(v)) for v in row) + "\n")


def _max_residual(report) -> float:
    return max(v for v in report.residuals().values() if v is not None)


# -- commands -----------------------------------------------------------------


def cmd_verify(args, tol: ToleranceConfig) -> int:
    B = load_basis(args.file, args.p)
    report = is_auerbach(B, tol=tol)
    emit({"auerbach": report.auerbach, "p": str(B.p), "n": B.n, "reason": report.reason,
          "residuals": report.residuals(), "tolerance": tol.residual_tol})
    return EXIT_OK if report else EXIT_FALSE


def _construct(args, tol: ToleranceConfig) -> tuple[BasisMatrix, str]:
    kind = args.kind

    def need(name):
        value = getattr(args, name)
        if value is None:
            raise UsageError(f"construct {kind} requires --{name}")
        return value

    if kind == "identity":
        n = need("n")
        if n < 1:
            raise UsageError("--n must be positive")
        return identity_basis(n, need("p")), f"I{n}"
    if kind == "hadamard2":
        return hadamard2_basis(need("p")), "H2"
    if kind == "jp":
        return jp_basis(need("p"), tol), "JP"
    if kind == "jinf":
        t = need("t")
        if not -1.0 <= t <= 1.0:
            raise UsageError("--t must lie in [-1, 1]")
        return jinf_basis(t), "JINF"
    inputs = args.input or []
    parts = [load_basis(path, args.p) for path in inputs]
    if kind == "block":
        if not parts:
            raise UsageError("construct block requires at least one --input")
        return block_basis(parts), "BLOCK"
    if len(parts) != 1:
        raise UsageError("construct sylvester requires exactly one --input")
    return sylvester_double(parts[0], tol), "SYLVESTER"


def cmd_construct(args, tol: ToleranceConfig) -> int:
    B, label = _construct(args, tol)
    report = is_auerbach(B, tol=tol)
    provenance = " ".join(f"--{k}={v}" for k, v in (("n", args.n), ("p", args.p), ("t", args.t))
                          if v is not None)
    if args.input:
        provenance += "".join(f" --input={path}" for path in args.input)
    provenance = f"construct {args.kind} {provenance}".strip()
    if args.format == "text":
        emit_text_matrix(B)
    else:
        emit(matrix_document(B, label, _max_residual(report), provenance))
    if not report:
        log.warning("constructed matrix failed verification: %s", report.reason)
        return EXIT_FALSE
    return EXIT_OK


def _class_entry(cls, hits: int | None = None) -> dict:
    entry = matrix_document(cls.source, cls.label.value if cls.label else None,
                            cls.info.get("residual"), None)
    entry["name"] = cls.name
    if "jacobian_min_sv" in cls.info:
        entry["isolated"] = cls.info["jacobian_min_sv"] > ISOLATION_TOL
    if hits is not None:
        entry["hits"] = hits
    return entry


def cmd_enumerate(args, tol: ToleranceConfig) -> int:
    if not 1 <= args.n <= MAX_ENUMERATE_N:
        raise UsageError(f"--n must lie in [1, {MAX_ENUMERATE_N}]")
    if args.seeds < 1:
        raise UsageError("--seeds must be positive")
    census = run_census(args.n, args.p, args.seeds, args.rng, tol, args.workers)
    emit({
        "n": census.n,
        "p": str(census.p),
        "seeds": census.num_seeds,
        "rng": census.rng_seed,
        "converged": census.converged,
        "solved_at": str(census.solved_at),
        "via_duality": census.via_duality,
        "convention": census.convention,
        "count": len(census.classes),
        "classes": [_class_entry(c, h) for c, h in zip(census.classes, census.hits)],
    })
    return EXIT_OK


def cmd_classify(args, tol: ToleranceConfig) -> int:
    B = load_basis(args.file, args.p)
    report = is_auerbach(B, tol=tol)
    if not report:
        emit({"auerbach": False, "reason": report.reason, "residuals": report.residuals()})
        return EXIT_FALSE
    out: dict = {"auerbach": True, "p": str(B.p), "n": B.n}
    if B.n == 3:
        result = classify_l3_basis(B, tol=tol)
        out.update(label=result.label.value, name=result.name, t=result.t, via_duality=result.via_duality)
        if B.p.is_smooth and B.p.value != 2.0:
            out["rows"] = [classify_l3_vector(row, B.p, tol).value for row in B.rows]
    elif B.n <= 6 and B.p.is_smooth and B.p.value != 2.0:
        cls = label_classes([canonical_form(B, tol)], B.n, B.p, tol)[0]
        out.update(label=cls.label.value, name=cls.name)
    else:
        raise UsageError("classify supports n = 3, or n <= 6 at finite p != 2")
    emit(out)
    return EXIT_OK


def cmd_rp(args, tol: ToleranceConfig) -> int:
    root = solve_rp(args.p)
    if args.format == "text":
        print(repr(root.value))
    else:
        emit({"p": str(root.p), "r": root.value, "residual": root.residual,
              "printed_residual": root.printed_residual})
    return EXIT_OK


def cmd_strong(args, tol: ToleranceConfig) -> int:
    B = load_basis(args.file, args.p)
    report = is_auerbach(B, tol=tol)
    if not report:
        emit({"strong": False, "auerbach": False, "reason": report.reason})
        return EXIT_FALSE
    strong = is_strong_auerbach(B, tol=tol)
    emit({"strong": strong, "auerbach": True, "p": str(B.p), "n": B.n,
          "rows": [classify_strong_vector(row, B.p, tol).value for row in B.rows]})
    return EXIT_OK if strong else EXIT_FALSE


def cmd_continuation(args, tol: ToleranceConfig) -> int:
    if not 1 <= args.n <= MAX_ENUMERATE_N:
        raise UsageError(f"--n must lie in [1, {MAX_ENUMERATE_N}]")
    census = run_census(args.n, args.p0, args.seeds, args.rng, tol, args.workers)
    trace = continuation_track(census.classes, args.p0, args.p1, args.steps, tol)
    paths = []
    for idx, cls in enumerate(census.classes):
        res = [r for r in trace.residuals[idx] if not math.isnan(r)]
        paths.append({"label": cls.label.value if cls.label else None, "name": cls.name,
                      "max_residual": max(res) if res else None,
                      "broken_at": trace.broken.get(idx)})
    counts = trace.class_counts
    emit({"n": args.n, "p_grid": trace.p_grid, "class_counts": counts,
          "constant_count": len(set(counts)) == 1, "all_survive": trace.all_survive, "paths": paths})
    return EXIT_OK if trace.all_survive and len(set(counts)) == 1 else EXIT_FALSE


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auerbach", description="Auerbach bases of l^n_p.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(p):
        p.add_argument("file", help="MatrixDocument JSON or whitespace matrix; '-' for stdin")
        p.add_argument("--p", help="exponent override: 1, inf or a decimal")
        return p

    p = with_file(sub.add_parser("verify", help="check the Auerbach property"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="emit a named construction")
    p.add_argument("kind", choices=CONSTRUCTIONS)
    p.add_argument("--n", type=int)
    p.add_argument("--p")
    p.add_argument("--t", type=float)
    p.add_argument("--input", action="append", help="input document (repeat for block)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_construct)

    def census_opts(p):
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--seeds", type=int, default=1000)
        p.add_argument("--rng", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("enumerate", help="multistart census of bases up to equivalence")
    census_opts(p)
    p.add_argument("--p", required=True)
    p.set_defaults(func=cmd_enumerate)

    p = with_file(sub.add_parser("classify", help="name the class of a basis"))
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("rp", help="the constant r_p")
    p.add_argument("--p", required=True)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_rp)

    p = with_file(sub.add_parser("strong", help="check the strong Auerbach property"))
    p.set_defaults(func=cmd_strong)

    p = sub.add_parser("continuation", help="track census classes from p0 to p1")
    census_opts(p)
    p.add_argument("--p0", required=True)
    p.add_argument("--p1", required=True)
    p.add_argument("--steps", type=int, default=16)
    p.set_defaults(func=cmd_continuation)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args, tolerance_from_env())
    except (UsageError, AuerbachError) as exc:
        print(f"auerbach {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
