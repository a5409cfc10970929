"""Command-line interface.

Datum spec grammar (one spec; blank lines and ``#`` comments are ignored)::

    spec     := LABEL [ISOGENY] [LATTICE]
    LABEL    := [2|3] FAMILY RANK          e.g. A5, 2A5, D4, 3D4, E7
    ISOGENY  := sc | ad | custom           (default sc; custom needs LATTICE)
    LATTICE  := lattice=ROW(;ROW)*         ROW := INT(,INT)*, fundamental-weight coordinates

Points are comma-separated rationals a_1,...,a_l (barycentric coordinates
with a_0 = 1 - sum n_i a_i).  Record output is one JSON object per line with
sorted keys and a ``schema`` field.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .affine import (
    AlcoveError,
    barycentric_points,
    canonical_barycentric,
    hyperspecial_vertices,
    omega_order,
    omega_structure,
)
from .lattice import row_span_basis
from .packet import (
    PacketSetting,
    QmodZ,
    cocycle,
    packet_setting,
    packet_table,
    pairing,
    verify_main_theorem,
)
from .rootdatum import (
    RootDatumError,
    parse_label,
    relative_weyl_check,
    standard_datum,
    weyl_element,
    weyl_group_order,
)

SCHEMA = "lpacket/1"


class SpecError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class DatumSpec:
    type_label: str
    isogeny: str = "sc"
    custom_lattice: tuple[tuple[int, ...], ...] | None = None
    twist: str | None = None

    @property
    def full_label(self) -> str:
        return f"{self.twist or ''}{self.type_label}"

    def render(self) -> str:
        out = f"{self.full_label} {self.isogeny}"
        if self.custom_lattice is not None:
            out += " lattice=" + ";".join(",".join(str(x) for x in row) for row in self.custom_lattice)
        return out

    def datum(self):
        iso = self.custom_lattice if self.isogeny == "custom" else self.isogeny
        return standard_datum(self.full_label, iso)


_TOKEN = re.compile(r"\S+")


def parse_spec(text: str) -> DatumSpec:
    """Parse a datum spec; errors carry the line and column of the offending token."""
    tokens = []
    for ln, line in enumerate(text.splitlines() or [""], start=1):
        body = line.split("#", 1)[0]
        for m in _TOKEN.finditer(body):
            tokens.append((m.group(0), ln, m.start() + 1))
    if not tokens:
        raise SpecError("empty datum spec")
    label, ln, col = tokens[0]
    try:
        twist, fam, n = parse_label(label)
    except RootDatumError as e:
        raise SpecError(str(e), ln, col) from None
    isogeny, lattice = "sc", None
    seen_iso = False
    for tok, ln, col in tokens[1:]:
        if tok in ("sc", "ad", "custom"):
            if seen_iso:
                raise SpecError("isogeny given twice", ln, col)
            isogeny, seen_iso = tok, True
        elif tok.startswith("lattice="):
            if lattice is not None:
                raise SpecError("lattice given twice", ln, col)
            lattice = _parse_rows(tok[len("lattice="):], n, ln, col + len("lattice="))
        else:
            raise SpecError(f"unexpected token {tok!r}", ln, col)
    if lattice is not None:
        if seen_iso and isogeny != "custom":
            raise SpecError("lattice= needs isogeny custom", tokens[0][1], tokens[0][2])
        isogeny = "custom"
    if isogeny == "custom" and lattice is None:
        raise SpecError("custom isogeny needs lattice=...", tokens[0][1], tokens[0][2])
    spec = DatumSpec(f"{fam}{n}", isogeny, lattice, twist)
    try:
        spec.datum()
    except RootDatumError as e:
        raise SpecError(str(e), tokens[0][1], tokens[0][2]) from None
    return spec


def _parse_rows(text: str, n: int, ln: int, col: int) -> tuple[tuple[int, ...], ...]:
    rows = []
    pos = col
    for chunk in text.split(";"):
        try:
            row = tuple(int(x) for x in chunk.split(","))
        except ValueError:
            raise SpecError(f"bad lattice row {chunk!r}", ln, pos) from None
        if len(row) != n:
            raise SpecError(f"lattice row {chunk!r} needs {n} entries", ln, pos)
        rows.append(row)
        pos += len(chunk) + 1
    return row_span_basis(rows, n)


def parse_point(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x.strip()) for x in text.split(",") if x.strip() != "")
    except (ValueError, ZeroDivisionError):
        raise SpecError(f"malformed point {text!r}", 1, 1) from None


def parse_word(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "1", "e", "id"):
        return ()
    try:
        return tuple(int(x) for x in re.split(r"[,\s]+", text) if x)
    except ValueError:
        raise SpecError(f"malformed word {text!r}", 1, 1) from None


# ---------------------------------------------------------------------------
# output


def _jsonable(x):
    if isinstance(x, (Fraction, QmodZ)):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def record(kind: str, **fields) -> str:
    rec = {"schema": SCHEMA, "kind": kind}
    rec.update(fields)
    return json.dumps(_jsonable(rec), sort_keys=True, separators=(",", ":"))


def vec(v: Iterable) -> str:
    return "(" + ", ".join(str(Fraction(x)) for x in v) + ")"


def word_str(w: Sequence[int]) -> str:
    return "1" if not w else " ".join(f"s{i}" for i in w)


@lru_cache(maxsize=None)
def setting_for(spec_text: str) -> PacketSetting:
    spec = parse_spec(spec_text)
    d = spec.datum()
    return packet_setting(d)


# ---------------------------------------------------------------------------
# commands; each returns (lines, exit status)


def cmd_describe(spec: DatumSpec, fmt_: str) -> tuple[list[str], int]:
    s = setting_for(spec.render())
    a = s.characters
    grp = omega_structure(a)
    hyp = [i for i, _ in hyperspecial_vertices(s.building)]
    info = {
        "spec": spec.render(),
        "rank": s.datum.rank,
        "roots": len(s.datum.roots),
        "cartan_type": s.datum.cartan_type(),
        "relative_type": s.rel.type_label,
        "relative_coroot_type": s.rel.coroot_type_label,
        "marks": list(a.marks),
        "coxeter_number": a.coxeter_number,
        "omega_order": len(s.omega),
        "omega_invariants": list(grp.invariant_factors),
        "omega_cyclic": grp.is_cyclic,
        "hyperspecial_vertices": hyp,
        "hyperspecial_classes": [list(c) for c in s.classes],
        "weyl_order": weyl_group_order(s.rel.cartan_type()),
    }
    if fmt_ == "records":
        return [record("describe", **info)], 0
    lines = [
        f"datum            {info['spec']}",
        f"rank             {info['rank']}  ({info['roots']} roots, type {info['cartan_type']})",
        f"relative type    {info['relative_type']}  (coroots {info['relative_coroot_type']})",
        f"marks            {' '.join(map(str, a.marks))}  (h = {a.coxeter_number})",
        f"Omega            order {len(s.omega)}, {grp.describe()}",
        f"hyperspecial     {', '.join('0' if i == 0 else f'w{i}' for i in hyp)}",
        f"classes          {len(s.classes)}: " + " ".join("{" + ",".join(map(str, c)) + "}" for c in s.classes),
    ]
    return lines, 0


def cmd_omega(spec: DatumSpec, fmt_: str) -> tuple[list[str], int]:
    s = setting_for(spec.render())
    a = s.characters
    out = []
    for o in s.omega:
        info = {
            "vertex": o.vertex_image,
            "word": list(o.transform.linear.word),
            "translation": list(o.transform.translation),
            "permutation": list(o.permutation),
            "order": omega_order(a, o),
            "iota": list(o.iota_class),
        }
        if fmt_ == "records":
            out.append(record("omega", spec=spec.render(), **info))
        else:
            out.append(
                f"vertex {o.vertex_image}: order {info['order']}, t = {vec(o.transform.translation)}, "
                f"perm {tuple(o.permutation)}, w = {word_str(o.transform.linear.word)}"
            )
    return out, 0


def cmd_relative(spec: DatumSpec, fmt_: str) -> tuple[list[str], int]:
    s = setting_for(spec.render())
    rel = s.rel
    ok, msg = relative_weyl_check(s.datum) if weyl_group_order(s.datum.cartan_type()) <= 100_000 else (None, "skipped")
    info = {
        "spec": spec.render(),
        "relative_type": rel.type_label,
        "relative_coroot_type": rel.coroot_type_label,
        "reduced": rel.reduced,
        "lattice_rank": rel.rank,
        "roots": len(rel.roots),
        "weyl_check": ok,
        "weyl_message": msg,
        "simple_roots": [list(r) for r in rel.simple_roots],
        "simple_coroots": [list(c) for c in rel.simple_coroots],
    }
    if fmt_ == "records":
        return [record("relative", **info)], 0 if ok in (True, None) else 1
    lines = [
        f"relative roots   {rel.type_label} ({len(rel.roots)} roots, {'reduced' if rel.reduced else 'non-reduced'})",
        f"relative coroots {rel.coroot_type_label}",
        f"Y rank           {rel.rank}",
        "simple roots     " + " ".join(vec(r) for r in rel.simple_roots),
        "simple coroots   " + " ".join(vec(c) for c in rel.simple_coroots),
        f"Weyl check       {msg}",
    ]
    return lines, 0 if ok in (True, None) else 1


def _point(s: PacketSetting, text: str | None):
    if text is None:
        raise SpecError("--point is required", 1, 1)
    coords = parse_point(text)
    try:
        return s.point(coords)
    except AlcoveError as e:
        raise SpecError(str(e), 1, 1) from None


def cmd_rgroup(spec: DatumSpec, point: str | None, fmt_: str) -> tuple[list[str], int]:
    s = setting_for(spec.render())
    x = _point(s, point)
    data = s.rgroup(x)
    elems = [{"vertex": o.vertex_image, "word": list(o.transform.linear.word)} for o in data.omega_x]
    info = {
        "spec": spec.render(),
        "point": list(x.barycentric),
        "walls": list(data.fixed_walls),
        "reflection_type": data.reflection_type or "trivial",
        "r_order": data.r_order,
        "r_elements": elems,
        "semidirect": data.semidirect_check,
    }
    if fmt_ == "records":
        return [record("rgroup", **info)], 0 if data.semidirect_check else 1
    lines = [
        f"point            {vec(x.barycentric)}",
        f"walls through x  {list(data.fixed_walls)}  (reflection part {info['reflection_type']})",
        f"R = Omega_x      order {data.r_order}",
    ]
    for o in data.omega_x:
        lines.append(f"  vertex {o.vertex_image}: {word_str(o.transform.linear.word)}")
    return lines, 0 if data.semidirect_check else 1


def _omega_for_word(s: PacketSetting, word: Sequence[int]):
    w = weyl_element(s.characters.datum, word)
    for o in s.omega:
        if o.transform.linear == w:
            return o
    return None


def cmd_pair(spec: DatumSpec, vertex: int | None, element: str | None, fmt_: str) -> tuple[list[str], int]:
    s = setting_for(spec.render())
    verts = s.hyperspecial if vertex is None else (vertex,)
    if vertex is not None and vertex not in s.hyperspecial:
        raise SpecError(f"vertex {vertex} is not hyperspecial", 1, 1)
    if element is None:
        elems = s.omega
    else:
        o = _omega_for_word(s, parse_word(element))
        if o is None:
            raise SpecError("element is not the linear part of an Omega element", 1, 1)
        elems = (o,)
    out = []
    for v in verts:
        for o in elems:
            val = pairing(s, v, o)
            if fmt_ == "records":
                out.append(record("pair", spec=spec.render(), vertex=v, element=o.vertex_image, value=val))
            else:
                out.append(f"(w{v}, r[{o.vertex_image}]) = {val}" if v else f"(0, r[{o.vertex_image}]) = {val}")
    return out, 0


def cmd_coeff(spec: DatumSpec, point: str | None, vertex: int | None, element: str | None, fmt_: str) -> tuple[list[str], int]:
    s = setting_for(spec.render())
    x = _point(s, point)
    if vertex is None or element is None:
        raise SpecError("--vertex and --element are required", 1, 1)
    if vertex not in s.hyperspecial:
        raise SpecError(f"vertex {vertex} is not hyperspecial", 1, 1)
    word = parse_word(element)
    if any(not 1 <= i <= s.rank for i in word):
        raise SpecError("word letters must be simple labels", 1, 1)
    c = cocycle(s, x, vertex, word)
    o = _omega_for_word(s, word)
    info = {
        "spec": spec.render(),
        "point": list(x.barycentric),
        "vertex": vertex,
        "word": list(word),
        "value": c.value,
        "terms": list(c.terms),
        "omega_element": None if o is None else o.vertex_image,
        "pairing": None if o is None else pairing(s, vertex, o),
    }
    if fmt_ == "records":
        return [record("coeff", **info)], 0
    lines = [f"c(w{vertex}, {word_str(word)}) = {c.value}"]
    if o is not None:
        lines.append(f"pairing with r[{o.vertex_image}] = {info['pairing']}")
    return lines, 0


def _verify_point(args: tuple[str, tuple[Fraction, ...]]) -> list[tuple]:
    spec_text, bary = args
    s = setting_for(spec_text)
    x = s.characters.from_barycentric(bary[1:])
    rep = verify_main_theorem(s, x)
    rows = [(tuple(c.point), c.vertex, c.element, c.word, c.cocycle, c.pairing, c.ok) for c in rep.checks]
    if not rep.semidirect:
        rows.append((tuple(x.barycentric), -1, -1, (), QmodZ(0), QmodZ(0), False))
    return rows


def sweep_points(s: PacketSetting, bound: int) -> list[tuple[Fraction, ...]]:
    a = s.characters
    return sorted({canonical_barycentric(a, p) for p in barycentric_points(a, bound)})


def cmd_verify(spec: DatumSpec, point: str | None, bound: int | None, jobs: int, fmt_: str) -> tuple[list[str], int]:
    s = setting_for(spec.render())
    if point is not None:
        pts = [tuple(s.point(parse_point(point)).barycentric)]
    else:
        if bound is None:
            raise SpecError("give --point or --sweep-denominator", 1, 1)
        if bound < 1:
            raise SpecError("--sweep-denominator must be at least 1", 1, 1)
        pts = sweep_points(s, bound)
    tasks = [(spec.render(), p) for p in pts]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_verify_point, tasks))
    else:
        chunks = [_verify_point(t) for t in tasks]
    rows = sorted((r for ch in chunks for r in ch), key=lambda r: (r[0], r[1], r[2]))
    failures = sum(1 for r in rows if not r[6])
    out = []
    for p, v, e, w, c, pr, ok in rows:
        if fmt_ == "records":
            out.append(record("check", spec=spec.render(), point=list(p), vertex=v, element=e,
                              word=list(w), cocycle=c, pairing=pr, ok=ok))
        else:
            out.append(f"{'PASS' if ok else 'FAIL'}  point {vec(p)}  vertex {v}  r[{e}]  c = {c}  pairing = {pr}")
    summary = {"spec": spec.render(), "points": len(pts), "checks": len(rows), "failures": failures}
    if fmt_ == "records":
        out.append(record("summary", **summary))
    else:
        out.append(f"{len(pts)} points, {len(rows)} checks, {failures} failures")
    return out, 1 if failures else 0


def cmd_table(spec: DatumSpec, point: str | None, fmt_: str) -> tuple[list[str], int]:
    s = setting_for(spec.render())
    x = _point(s, point)
    t = packet_table(s, x)
    if fmt_ == "records":
        out = [
            record("table_row", spec=spec.render(), point=list(x.barycentric), vertex=v, character=list(ch))
            for v, ch in t.rows
        ]
        out.append(record("table_fibers", spec=spec.render(), point=list(x.barycentric),
                          r_elements=list(t.r_elements), fibers=[list(f) for f in t.fibers]))
        return out, 0
    head = "class   " + "  ".join(f"r[{e}]" for e in t.r_elements)
    lines = [f"point {vec(x.barycentric)}, R of order {len(t.r_elements)}", head]
    for v, ch in t.rows:
        lines.append(f"{('w' + str(v)) if v else '0':<7} " + "  ".join(f"{str(c):>4}" for c in ch))
    lines.append("fibers  " + " ".join("{" + ",".join(map(str, f)) + "}" for f in t.fibers))
    return lines, 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lpacket", description="Unramified L-packet combinatorics.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("describe", "omega", "relative", "rgroup", "pair", "coeff", "verify", "table"):
        c = sub.add_parser(name)
        c.add_argument("spec", nargs="?", help='datum spec such as "E6 sc" (or use --type)')
        c.add_argument("--spec-file", help="read the datum spec from a file")
        c.add_argument("--type", dest="type_label")
        c.add_argument("--isogeny", choices=("sc", "ad", "custom"))
        c.add_argument("--lattice", help="rows of X in fundamental-weight coordinates, e.g. '1,0,0;0,2,0'")
        c.add_argument("--point", help="barycentric coordinates a_1,...,a_l")
        c.add_argument("--vertex", type=int)
        c.add_argument("--element", help="word of simple reflection labels, e.g. '1,2,3'")
        c.add_argument("--sweep-denominator", type=int)
        c.add_argument("--format", choices=("text", "records"), default="text")
        c.add_argument("--jobs", type=int, default=1)
    return p


def _spec_from_args(args) -> DatumSpec:
    if args.spec_file:
        with open(args.spec_file, encoding="utf-8") as fh:
            return parse_spec(fh.read())
    if args.spec:
        text = args.spec
    elif args.type_label:
        text = args.type_label
    else:
        raise SpecError("no datum given: pass a spec or --type")
    if args.isogeny:
        text += f" {args.isogeny}"
    if args.lattice:
        text += f" lattice={args.lattice.replace(' ', '')}"
    return parse_spec(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = _spec_from_args(args)
        f = args.format
        if args.command == "describe":
            lines, code = cmd_describe(spec, f)
        elif args.command == "omega":
            lines, code = cmd_omega(spec, f)
        elif args.command == "relative":
            lines, code = cmd_relative(spec, f)
        elif args.command == "rgroup":
            lines, code = cmd_rgroup(spec, args.point, f)
        elif args.command == "pair":
            lines, code = cmd_pair(spec, args.vertex, args.element, f)
        elif args.command == "coeff":
            lines, code = cmd_coeff(spec, args.point, args.vertex, args.element, f)
        elif args.command == "verify":
            lines, code = cmd_verify(spec, args.point, args.sweep_denominator, max(1, args.jobs), f)
        else:
            lines, code = cmd_table(spec, args.point, f)
    except (SpecError, OSError) as e:
        print(f"lpacket: error: {e}", file=sys.stderr)
        return 2
    sys.stdout.write("".join(line + "\n" for line in lines))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
