"""Command-line interface: ``ashm <group> <command> ...``.

Matrices travel as documents. The plain format is whitespace-separated
integers, one row per line; a hypermatrix is its horizontal planes, bottom
first, separated by blank lines. The JSON format is ``{"order", "rows"}`` for
a matrix and ``{"order", "planes"}`` for a hypermatrix. ``-`` reads stdin.

Exit status: 0 success or verified, 1 validation failure or counterexample,
2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, is_dataclass

import numpy as np

from . import complete, construct, core, latin, matching, search

FORMAT_ENV = "ASHM_FORMAT"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# documents

def _parse_int(tok: str) -> int:
    try:
        return int(tok.replace("−", "-"))
    except ValueError:
        raise UsageError(f"not an integer: {tok!r}") from None


def parse_document(text: str) -> np.ndarray:
    """A 2D array for a matrix document, a 3D array (i, j, k) for a hypermatrix."""
    text = text.strip()
    if not text:
        raise UsageError("empty document")
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"invalid JSON: {exc}") from None
        if "rows" in doc:
            return np.array(doc["rows"], dtype=np.int64).reshape(len(doc["rows"]), -1)
        if "planes" in doc:
            planes = [np.array(p, dtype=np.int64) for p in doc["planes"]]
            return _stack_planes(planes)
        raise UsageError("JSON document needs a 'rows' or 'planes' field")
    blocks = [b for b in text.replace("\r", "").split("\n\n") if b.strip()]
    planes = []
    for block in blocks:
        rows = [[_parse_int(t) for t in line.split()] for line in block.splitlines() if line.strip()]
        if len({len(r) for r in rows}) != 1:
            raise UsageError("rows of a plane have different lengths")
        planes.append(np.array(rows, dtype=np.int64))
    return planes[0] if len(planes) == 1 else _stack_planes(planes)


def _stack_planes(planes: list[np.ndarray]) -> np.ndarray:
    if len({p.shape for p in planes}) != 1:
        raise UsageError("planes have different shapes")
    return np.stack(planes, axis=2)


def as_hyper(arr: np.ndarray) -> np.ndarray:
    return arr[:, :, None] if arr.ndim == 2 else arr


def format_document(arr, fmt: str) -> str:
    arr = core.as_array(arr)
    if fmt == "json":
        if arr.ndim == 2:
            return json.dumps({"order": arr.shape[0], "rows": arr.tolist()})
        planes = [arr[:, :, k].tolist() for k in range(arr.shape[2])]
        return json.dumps({"order": arr.shape[0], "planes": planes})
    if arr.ndim == 2:
        return "\n".join(" ".join(str(int(x)) for x in row) for row in arr)
    return "\n\n".join(format_document(arr[:, :, k], fmt) for k in range(arr.shape[2]))


def _plain(value) -> object:
    if is_dataclass(value):
        value = asdict(value)
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items() if not k.startswith("_")}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.integer, np.bool_)):
        return value.item()
    if hasattr(value, "value") and not isinstance(value, (int, float, str)):
        return value.value
    if hasattr(value, "tolist"):
        return value.tolist()
    return value


def format_report(report: dict, fmt: str) -> str:
    report = _plain(report)
    if fmt == "json":
        return json.dumps(report)
    return "\n".join(f"{k}: {json.dumps(v) if isinstance(v, (list, dict)) else v}"
                     for k, v in report.items())


# ---------------------------------------------------------------------------
# command implementations; each returns (output text, exit status)

def _read(path: str) -> np.ndarray:
    if path == "-":
        return parse_document(sys.stdin.read())
    try:
        with open(path) as fh:
            return parse_document(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _ints(text: str) -> list[int]:
    return [_parse_int(t) for t in text.replace(",", " ").split()]


def cmd_construct(a):
    if a.what == "fnk":
        out = construct.fnk(a.n, a.k)
    elif a.what == "diamond":
        out = construct.diamond(a.n, a.orientation)
    elif a.what == "fkrs":
        out = construct.fkrs(a.n, a.k, a.r, a.s)
    else:
        square = _read(a.file)
        if not construct.is_latin_square(square):
            raise core.AshmError("input is not a Latin square")
        out = construct.latin_to_hypermatrix(square)
    return format_document(out, a.format), 0


def cmd_validate(a):
    arr = _read(a.file)
    check = {"asm": core.validate_asm, "ashm": core.validate_ashm,
             "pashm": core.validate_pashm}.get(a.kind)
    if check is None:
        if not core.is_semi_asm(arr):
            raise core.AshmError("not a semi-ASM")
    else:
        check(arr)
    return format_report({"valid": True, "kind": a.kind}, a.format), 0


def cmd_latin(a):
    if a.what == "of":
        return format_document(latin.latin_of(as_hyper(_read(a.file))), a.format), 0
    if a.what == "decompose":
        return format_document(np.stack(latin.zero_one_decomposition(_read(a.file)), axis=2), a.format), 0
    if a.what == "projections":
        v, h = latin.weighted_projections(_read(a.file))
        return format_report({"v": v, "h": h}, a.format), 0
    if a.what == "constant-lines":
        lines = latin.constant_line_report(_read(a.file))
        return format_report({"constant_lines": [list(x) for x in lines]}, a.format), 0
    rep = latin.majorize(_ints(a.x), _ints(a.y), a.kind)
    return format_report(rep, a.format), 0 if rep.holds else 1


def cmd_complete(a):
    fmt = a.format
    if a.what == "layer":
        arr = _read(a.file)
        n = arr.shape[0]
        if arr.ndim != 3 or arr.shape[2] != n - 1:
            raise UsageError(f"expected {n - 1} planes of order {n}")
        known = [s for s in range(1, n + 1) if s != a.k]
        partial = complete.PartialHypermatrix(n, tuple(zip(known, (arr[:, :, t] for t in range(n - 1)))))
        return format_document(complete.complete_layer(partial, a.k), fmt), 0
    if a.what == "prefix":
        arr = as_hyper(_read(a.file))
        rng = np.random.default_rng(a.seed) if a.seed is not None else None
        return format_document(complete.extend_prefix([arr[:, :, t] for t in range(arr.shape[2])], rng), fmt), 0
    if a.what == "convex":
        witness = _read(a.witness) if a.witness else None
        return format_document(complete.convex_complete(_read(a.file), witness), fmt), 0
    if a.what == "embed-central":
        return format_document(complete.embed_asm_central(_read(a.file)), fmt), 0
    if a.what == "embed-pair":
        return format_document(complete.embed_pair_central(_read(a.file), _read(a.file2)), fmt), 0
    if a.what == "embed-sub":
        emb = complete.embed_subhypermatrix(as_hyper(_read(a.file)))
        if fmt == "json":
            doc = json.loads(format_document(emb.ashm, fmt))
            doc.update(rows=emb.rows, cols=emb.cols, layers=emb.layers, method=emb.method)
            return json.dumps(doc), 0
        return format_document(emb.ashm, fmt), 0
    if a.what == "mate":
        return format_document(complete.asm_mate(_read(a.file)), fmt), 0
    if a.layer is not None:
        return format_document(complete.ashm_negatives_one_layer(a.n, a.layer, a.t), fmt), 0
    return format_document(complete.ashm_with_negatives(a.n, a.t), fmt), 0


def cmd_decompose(a):
    arr = _read(a.file)
    parts = matching.birkhoff_arrays(arr) if a.what == "birkhoff" else matching.subpermutation_arrays(arr)
    if not parts:
        return format_report({"parts": []}, a.format), 0
    return format_document(np.stack(parts, axis=2), a.format), 0


def cmd_search(a):
    fmt = a.format
    if a.what == "enumerate":
        mode = "count" if a.count else "collect"
        cfg = search.EnumerationConfig(a.n, a.kind, mode, a.parallel, a.override,
                                       checkpoint=a.checkpoint)
        run = {"asm": search.enumerate_asms, "ashm": search.enumerate_ashms,
               "pashm": search.enumerate_pashms}[a.kind]
        result = run(cfg)
        if a.count:
            return str(result), 0
        docs = [json.loads(format_document(x, "json")) for x in result]
        if fmt == "json":
            return json.dumps({"count": len(docs), "items": docs}), 0
        return "\n\n\n".join(format_document(x, "plain") for x in result), 0
    if a.what == "term-rank":
        return str(search.term_rank_3d(as_hyper(_read(a.file)), a.budget)), 0
    if a.what == "orthogonal":
        if a.sample:
            rep = search.sample_orthogonal_pair(a.sample, a.trials, a.seed or 0)
            return format_report({"report": rep.summary(), **asdict(rep)}, fmt), 0
        if not a.file or not a.file2:
            raise UsageError("orthogonal needs two hypermatrix documents or --sample N")
        rep = search.orthogonality_report(_read(a.file), _read(a.file2))
        return format_report(rep, fmt), 0 if rep.orthogonal else 1
    if a.what == "conjecture":
        rep = search.verify_projection_conjecture(a.n, a.override)
        return format_report({**asdict(rep), "verified": rep.verified}, fmt), 0 if rep.verified else 1
    if a.what == "injectivity":
        rep = search.ls_map_injectivity(a.n, a.samples, a.seed or 0)
        out = {**asdict(rep), "injective": rep.injective}
        return format_report(out, fmt), 0 if rep.injective else 1
    rep = search.entry_multiplicity_extremes(a.n)
    out = {"n": rep.n, "value": rep.value, "count": rep.count, "method": rep.method,
           "latin": latin.latin_of(rep.ashm).tolist()}
    return format_report(out, fmt), 0


def _element(a) -> core.SymmetryElement:
    perm = _ints(a.perm)
    flips = [bool(x) for x in _ints(a.flips)]
    if len(perm) != 3 or len(flips) != 3:
        raise UsageError("--perm and --flips need three values each")
    return core.SymmetryElement(tuple(perm), tuple(flips))


def cmd_symmetry(a):
    arr = _read(a.file)
    if arr.ndim != 3:
        raise UsageError("symmetry needs a hypermatrix document")
    core.validate_ashm(arr)
    if a.what == "apply":
        return format_document(core.apply_symmetry(arr, _element(a)), a.format), 0
    seen = {}
    for g in core.all_symmetries():
        img = g.act(arr)
        seen.setdefault(img.tobytes(), img)
    if a.format == "json":
        docs = [json.loads(format_document(x, "json")) for x in seen.values()]
        return json.dumps({"size": len(docs), "members": docs}), 0
    return "\n\n\n".join(format_document(x, "plain") for x in seen.values()), 0


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    # options may come before or after the subcommand; only the top level sets defaults
    common = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("plain", "json"),
                        help=f"output format (default from ${FORMAT_ENV}, else plain)")
    common.add_argument("--seed", type=int)

    p = _Parser(prog="ashm", description="Alternating sign matrices and hypermatrices.")
    p.add_argument("--format", choices=("plain", "json"), default=os.environ.get(FORMAT_ENV, "plain"),
                   help=f"output format (default from ${FORMAT_ENV}, else plain)")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized commands")
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(parent, name, **kw):
        return parent.add_parser(name, parents=[common], **kw)

    g = groups.add_parser("construct").add_subparsers(dest="what", required=True, parser_class=_Parser)
    s = sub(g, "fnk"); s.add_argument("n", type=int); s.add_argument("k", type=int)
    s = sub(g, "diamond"); s.add_argument("n", type=int)
    s.add_argument("--orientation", choices=("ascending", "descending"), default="ascending")
    s = sub(g, "fkrs")
    for name in ("n", "k", "r", "s"):
        s.add_argument(name, type=int)
    s = sub(g, "from-latin"); s.add_argument("file")
    groups.choices["construct"].set_defaults(func=cmd_construct)

    g = groups.add_parser("validate").add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind in ("asm", "ashm", "pashm", "semi"):
        sub(g, kind).add_argument("file")
    groups.choices["validate"].set_defaults(func=cmd_validate)

    g = groups.add_parser("latin").add_subparsers(dest="what", required=True, parser_class=_Parser)
    for what in ("of", "decompose", "projections", "constant-lines"):
        sub(g, what).add_argument("file")
    s = sub(g, "majorize", help="is X majorized by Y (comma-separated vectors)")
    s.add_argument("x"); s.add_argument("y")
    s.add_argument("--kind", choices=("standard", "leading"), default="standard")
    groups.choices["latin"].set_defaults(func=cmd_latin)

    g = groups.add_parser("complete").add_subparsers(dest="what", required=True, parser_class=_Parser)
    s = sub(g, "layer", help="n-1 planes in, the full ASHM out")
    s.add_argument("file"); s.add_argument("--k", type=int, required=True, help="missing layer (1-based)")
    sub(g, "prefix").add_argument("file")
    s = sub(g, "convex"); s.add_argument("file"); s.add_argument("--witness")
    sub(g, "embed-central").add_argument("file")
    s = sub(g, "embed-pair"); s.add_argument("file"); s.add_argument("file2")
    sub(g, "embed-sub").add_argument("file")
    sub(g, "mate").add_argument("file")
    s = sub(g, "negatives"); s.add_argument("n", type=int); s.add_argument("t", type=int)
    s.add_argument("--layer", type=int, help="put every -1 in this horizontal plane")
    groups.choices["complete"].set_defaults(func=cmd_complete, layer=None)

    g = groups.add_parser("decompose").add_subparsers(dest="what", required=True, parser_class=_Parser)
    sub(g, "birkhoff").add_argument("file")
    sub(g, "subperm").add_argument("file")
    groups.choices["decompose"].set_defaults(func=cmd_decompose)

    g = groups.add_parser("search").add_subparsers(dest="what", required=True, parser_class=_Parser)
    s = sub(g, "enumerate"); s.add_argument("kind", choices=("asm", "ashm", "pashm"))
    s.add_argument("n", type=int); s.add_argument("--count", action="store_true")
    s.add_argument("--parallel", action="store_true"); s.add_argument("--override", action="store_true")
    s.add_argument("--checkpoint", help="resumable progress file (count mode)")
    s = sub(g, "term-rank"); s.add_argument("file"); s.add_argument("--budget", type=int, default=64)
    s = sub(g, "orthogonal"); s.add_argument("file", nargs="?"); s.add_argument("file2", nargs="?")
    s.add_argument("--sample", type=int, metavar="N", help="heuristic search for an orthogonal pair of order N")
    s.add_argument("--trials", type=int, default=1000)
    s = sub(g, "conjecture"); s.add_argument("n", type=int); s.add_argument("--override", action="store_true")
    s = sub(g, "injectivity"); s.add_argument("n", type=int); s.add_argument("--samples", type=int)
    sub(g, "multiplicity").add_argument("n", type=int)
    groups.choices["search"].set_defaults(func=cmd_search)

    g = groups.add_parser("symmetry").add_subparsers(dest="what", required=True, parser_class=_Parser)
    s = sub(g, "apply"); s.add_argument("file")
    s.add_argument("--perm", default="0,1,2"); s.add_argument("--flips", default="0,0,0")
    sub(g, "orbit").add_argument("file")
    groups.choices["symmetry"].set_defaults(func=cmd_symmetry)
    return p


def _fail(payload: dict, status: int) -> int:
    print(json.dumps(payload), file=sys.stderr)
    return status


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out, status = args.func(args)
    except UsageError as exc:
        return _fail({"error": "UsageError", "message": str(exc)}, 2)
    except core.AshmError as exc:
        return _fail(exc.to_dict(), 1)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if out:
        print(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
