"""Command-line interface: ``uinv <command> ...``.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 verification
failure, 5 empty input, 6 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .cyclotomic import CycInt, SqrtExt, parse_cyc
from .diagram import (
    UNKNOT,
    ClosedDiagram,
    DiagramError,
    PDParseError,
    Piece,
    canonical_code,
    compose_pieces,
    mirror,
    parse_pd,
    parse_piece,
)
from .engine import StateError, TangleMatrix, eval_partial, evaluate_stack
from .slicing import slice_diagram
from .tables import (
    CodecError,
    TableError,
    data_dir,
    decode_word,
    encode_word,
    load_appendix,
    load_knot_csv,
    try_encode,
    verify,
)
from .uinv import (
    U_THEORY,
    check_relations,
    curl_factor,
    eval_u,
    eval_u_normalized,
    facial_inverse_check,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_VERIFY = 4
EXIT_EMPTY = 5
EXIT_IO = 6


class CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# formatting


def format_value(v: CycInt) -> str:
    word = try_encode(v)
    out = str(v)
    if word is not None:
        out += "  " + word
    if v.is_integer():
        out += f"  (= {v.as_integer()})"
    return out


def format_complex(z: complex) -> str:
    re_, im = z.real + 0.0, z.imag + 0.0  # no negative zeros
    re_ = 0.0 if abs(re_) < 5e-13 else re_
    im = 0.0 if abs(im) < 5e-13 else im
    return f"{re_:.12f} {'+' if im >= 0 else '-'} {abs(im):.12f}i"


def format_embeddings(v: CycInt) -> list[str]:
    return [f"k={k}: {format_complex(v.embed(k))}" for k in (1, 2)]


def format_entry(x) -> str:
    if isinstance(x, SqrtExt):
        return str(x.p) if x.is_cyclotomic() else f"{x.p} + {x.q}*s"
    return str(x)


def format_matrix(m: TangleMatrix) -> str:
    names = U_THEORY.symbols

    def label(t):
        return "".join(names[s][0] for s in t) or "()"

    lines = [f"{len(m.rows)}x{len(m.cols)} matrix over Z[u][s], s^2 = u^2+u^3",
             "rows (lower): " + " ".join(label(r) for r in m.rows),
             "cols (upper): " + " ".join(label(c) for c in m.cols)]
    for r, row in zip(m.rows, m.entries):
        lines.append(f"{label(r)}: " + "  ".join(format_entry(x) for x in row))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_IO) from exc


def _knot_records(path: Optional[str]):
    p = Path(path) if path else data_dir() / "knots.csv"
    if not p.is_file():
        raise CliError(f"cannot read {p}", EXIT_IO)
    try:
        return load_knot_csv(p)
    except TableError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc


def load_diagram(pd: Optional[str], knot: Optional[str] = None, knots_csv: Optional[str] = None) -> ClosedDiagram:
    """``--pd`` accepts ``unknot``, a file path, or PD text."""
    if knot is not None:
        for r in _knot_records(knots_csv):
            if r.name == knot:
                return ClosedDiagram(r.pd)
        raise CliError(f"knot {knot!r} not in table", EXIT_VALIDATION)
    if pd is None:
        raise CliError("give --pd or --knot", EXIT_PARSE)
    if pd.strip().lower() == "unknot":
        return UNKNOT
    text = _read(pd) if os.path.exists(pd) else pd
    if not _strip(text):
        raise CliError("empty PD input", EXIT_EMPTY)
    if _strip(text).lower() == "unknot":
        return UNKNOT
    return ClosedDiagram(parse_pd(text))


def _strip(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines()).strip()


def _parse_partial(spec: str) -> list[tuple[int, str]]:
    out = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise CliError(f"bad --partial item {item!r}; use face=white|black", EXIT_PARSE)
        f, s = item.split("=", 1)
        try:
            face = int(f)
        except ValueError:
            raise CliError(f"bad face id {f!r}", EXIT_PARSE) from None
        s = s.strip().lower()
        s = {"w": "white", "b": "black"}.get(s, s)
        if s not in U_THEORY.symbols:
            raise CliError(f"unknown symbol {s!r}", EXIT_PARSE)
        out.append((face, s))
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    d = load_diagram(args.pd, args.knot, args.knots)
    if args.partial:
        v = eval_partial(d, U_THEORY, _parse_partial(args.partial), parallel=args.parallel)
        v = v.to_cyc() if isinstance(v, SqrtExt) else v
    elif args.framed:
        v = eval_u(d, parallel=args.parallel)
    else:
        v = eval_u_normalized(d, parallel=args.parallel)
    print(format_value(v))
    for line in format_embeddings(v):
        print(line)
    return EXIT_OK


def _load_piece(path: str) -> Piece:
    text = _read(path)
    if not _strip(text):
        raise CliError(f"{path}: empty piece", EXIT_EMPTY)
    try:
        return parse_piece(text)
    except PDParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from exc
    except DiagramError as exc:
        raise CliError(f"{path}: {exc}", EXIT_VALIDATION) from exc


def cmd_compose(args) -> int:
    if not args.pieces:
        raise CliError("no pieces given", EXIT_EMPTY)
    pieces = [_load_piece(p) for p in args.pieces]
    for a, b in zip(pieces, pieces[1:]):
        if a.n_lower != b.n_upper:
            raise CliError(
                f"dimension mismatch: a lower hole with {a.n_lower} endpoints "
                f"meets an upper hole with {b.n_upper}", EXIT_VALIDATION)
    m = evaluate_stack(pieces, U_THEORY)
    closed = pieces[0].upper is None and pieces[-1].lower is None
    if not closed:
        print(f"open result: {len(m.rows)}x{len(m.cols)}")
        print(format_matrix(m))
        return EXIT_OK
    value = m.scalar()
    if isinstance(value, SqrtExt):
        if not value.is_cyclotomic():
            print(f"closed value has a nonzero s-part: {format_entry(value)}")
            return EXIT_VERIFY
        value = value.p
    print(format_value(value))
    if args.check:
        acc = pieces[0]
        for p in pieces[1:]:
            acc = compose_pieces(acc, p)
        direct = eval_u(acc)
        if direct == value:
            print("OK: product == direct")
        else:
            print(f"MISMATCH: product {value} != direct {direct}")
            return EXIT_VERIFY
    return EXIT_OK


def cmd_slice(args) -> int:
    d = load_diagram(args.pd, args.knot, args.knots)
    order = [int(t) for t in args.order.split(",")] if args.order else None
    pieces = slice_diagram(d, seed=args.seed, order=order)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        width = len(str(len(pieces)))
        for i, p in enumerate(pieces, start=1):
            path = out / f"piece_{i:0{width}d}.txt"
            path.write_text(p.to_text(), encoding="utf-8")
            print(path)
    else:
        print("\n---\n".join(p.to_text().rstrip("\n") for p in pieces))
    return EXIT_OK


def cmd_verify_table(args) -> int:
    records = _knot_records(args.knots)
    if not records:
        print("0 matched, 0 failed; empty input")
        return EXIT_EMPTY
    try:
        words = load_appendix(args.appendix) if args.appendix else load_appendix()
    except TableError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    for r in records:
        r.expected = words.get(r.name)
    report = verify(records, parallel=args.parallel, moves=args.moves, seed=args.seed)
    if args.json:
        print(report.to_jsonl())
    else:
        for r in report.results:
            if args.verbose or r.classification in ("FAIL", "unknown") or r.moves_ok is False:
                print(r.to_text())
        print(report.summary())
    return EXIT_OK if report.ok else EXIT_VERIFY


def _show(v: CycInt) -> str:
    return str(v.as_integer()) if v.is_integer() else str(v)


def cmd_relations(args) -> int:
    ok = True
    for name, val, good in check_relations():
        print(f"{_show(val)}  {name}")
        ok &= good
    if args.all:
        for i in range(U_THEORY.nsym):
            for j in range(U_THEORY.nsym):
                si, sj = U_THEORY.symbols[i], U_THEORY.symbols[j]
                c, allowed = curl_factor(i, j)
                print(f"curl({si},{sj}) = {str(c) if allowed else 'forbidden'}")
                good = not allowed or c == CycInt.power_of_u(1)
                inv = facial_inverse_check(i, j)
                print(f"inverse({si},{sj}) = {'skipped' if inv is None else ('ok' if inv else 'FAIL')}")
                ok &= good and inv is not False
    return EXIT_OK if ok else EXIT_VERIFY


def plot_points(records, roots: Sequence[int] = (1, 2), parallel: Optional[int] = None):
    """Rows (name, mirror flag, w, k, re, im) for {K}_u * u^w."""
    if parallel and parallel > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            values = list(pool.map(eval_u_normalized, [r.pd for r in records]))
    else:
        values = [eval_u_normalized(r.pd) for r in records]
    rows = []
    for r, v in zip(records, values):
        for is_mirror, val in ((0, v), (1, v.conj())):
            for w in range(5):
                z = CycInt.power_of_u(w) * val
                for k in roots:
                    c = z.embed(k)
                    rows.append((r.name, is_mirror, w, k, c.real, c.imag))
    return rows


def render_svg(rows, size: int = 640) -> str:
    """A static scatter, one panel per root index."""
    roots = sorted({row[3] for row in rows})
    colors = {1: "#1f5fa8", 2: "#b8432f"}
    panels = []
    for idx, k in enumerate(roots):
        pts = [(row[4], row[5]) for row in rows if row[3] == k]
        radius = max((math.hypot(x, y) for x, y in pts), default=1.0) or 1.0
        scale = (size / 2 - 20) / radius
        ox = idx * size + size / 2
        oy = size / 2
        dots = "".join(
            f'<circle cx="{ox + x * scale:.2f}" cy="{oy - y * scale:.2f}" r="1.6"/>' for x, y in pts)
        panels.append(
            f'<g fill="{colors.get(k, "#333")}">'
            f'<line x1="{ox - size / 2 + 10}" y1="{oy}" x2="{ox + size / 2 - 10}" y2="{oy}" stroke="#ccc"/>'
            f'<line x1="{ox}" y1="10" x2="{ox}" y2="{size - 10}" stroke="#ccc"/>'
            f'{dots}<text x="{ox - size / 2 + 14}" y="24" font-family="sans-serif" font-size="14" fill="#000">'
            f'k={k}, max |z| = {radius:.3f}</text></g>')
    width = size * max(1, len(roots))
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{size}" '
            f'viewBox="0 0 {width} {size}"><rect width="100%" height="100%" fill="white"/>'
            + "".join(panels) + "</svg>\n")


def cmd_plot(args) -> int:
    records = _knot_records(args.knots)
    if not records:
        return EXIT_EMPTY
    roots = [args.root] if args.root else [1, 2]
    rows = plot_points(records, roots, parallel=args.parallel)
    out = sys.stdout
    close = False
    if args.out:
        try:
            out = open(args.out, "w", encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc.strerror}", EXIT_IO) from exc
        close = True
    try:
        out.write("name,mirror,w,k,re,im\n")
        for name, m, w, k, x, y in rows:
            out.write(f"{name},{m},{w},{k},{x:.12f},{y:.12f}\n")
    finally:
        if close:
            out.close()
    if args.svg:
        try:
            Path(args.svg).write_text(render_svg(rows), encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {args.svg}: {exc.strerror}", EXIT_IO) from exc
    return EXIT_OK


def cmd_decode(args) -> int:
    if not args.values:
        return EXIT_EMPTY
    for item in args.values:
        try:
            v = parse_cyc(item)
        except ValueError:
            v = None
        if v is not None:
            print(f"{v}  {encode_word(v)}")
        else:
            v = decode_word(item)
            print(f"{item}  {v}")
    return EXIT_OK


def cmd_mirror(args) -> int:
    d = load_diagram(args.pd, args.knot, args.knots)
    if d.is_unknot():
        print("unknot")
    else:
        print(mirror(d.pd))
    return EXIT_OK


def cmd_canonical(args) -> int:
    d = load_diagram(args.pd, args.knot, args.knots)
    print(canonical_code(d))
    return EXIT_OK


# ---------------------------------------------------------------------------


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uinv", description="u-invariant of framed links and tangles")
    sub = p.add_subparsers(dest="command", required=True)

    def diagram_args(sp):
        sp.add_argument("--pd", help="PD code text, a file holding one, or 'unknot'")
        sp.add_argument("--knot", help="name of a bundled table knot, e.g. 8_19")
        sp.add_argument("--knots", help="knot CSV to look names up in (default: bundled)")

    e = sub.add_parser("eval", help="evaluate a closed diagram")
    diagram_args(e)
    e.add_argument("--framed", action="store_true", help="print the framed state sum instead of the normalized value")
    e.add_argument("--partial", help="preassigned faces, e.g. 0=black,3=white")
    e.add_argument("--parallel", type=_positive, default=None, help="worker processes")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("compose", help="multiply the matrices of a stack of pieces, top first")
    c.add_argument("pieces", nargs="*")
    c.add_argument("--check", action="store_true", help="compare with the glued diagram's direct value")
    c.set_defaults(func=cmd_compose)

    s = sub.add_parser("slice", help="cut a diagram into one-crossing pieces")
    diagram_args(s)
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--order", help="comma-separated crossing indices")
    s.add_argument("--out", help="directory for piece files (default: stdout)")
    s.set_defaults(func=cmd_slice)

    v = sub.add_parser("verify-table", help="compare computed values with the bundled table")
    v.add_argument("--knots", help="knot CSV (default: bundled)")
    v.add_argument("--appendix", help="expected-words file (default: bundled)")
    v.add_argument("--json", action="store_true", help="one JSON record per knot")
    v.add_argument("--verbose", "-v", action="store_true", help="print every knot")
    v.add_argument("--parallel", type=_positive, default=None)
    v.add_argument("--moves", type=int, default=0, help="random R2 moves per knot to check invariance")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify_table)

    r = sub.add_parser("relations", help="evaluate the relation polynomials")
    r.add_argument("--all", action="store_true", help="also curl factors and inverse identities")
    r.set_defaults(func=cmd_relations)

    pl = sub.add_parser("plot", help="CSV of table values times u^w in the complex plane")
    pl.add_argument("--knots", help="knot CSV (default: bundled)")
    pl.add_argument("--root", type=int, choices=(1, 2), default=None, help="root index k (default: both)")
    pl.add_argument("--out", help="CSV path (default: stdout)")
    pl.add_argument("--svg", help="also write a scatter plot here")
    pl.add_argument("--parallel", type=_positive, default=None)
    pl.set_defaults(func=cmd_plot)

    d = sub.add_parser("decode", help="decode 4-letter words (or encode ⌊a,b,c,d⌋ values)")
    d.add_argument("values", nargs="*")
    d.set_defaults(func=cmd_decode)

    m = sub.add_parser("mirror", help="print the mirror PD code")
    diagram_args(m)
    m.set_defaults(func=cmd_mirror)

    k = sub.add_parser("canonical", help="print a relabeling-invariant code")
    diagram_args(k)
    k.set_defaults(func=cmd_canonical)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (PDParseError, CodecError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except TableError as exc:
        print(f"table error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (DiagramError, StateError, ArithmeticError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
