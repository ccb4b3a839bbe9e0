"""Line-oriented text format for maps, loops and area vectors.

Example::

    format masterfield-map 1
    darts 4
    vertex 0 2 1 3
    side x1 0
    side y1 2
    corner 0
    loop comm 0 2 1 3
    area f0 1

Keywords, one record per line (``#`` starts a comment):

``darts N``
    number of darts, required and first after the format line.
``alpha a_0 ... a_{N-1}``
    the edge pairing; defaults to ``d <-> d xor 1``.
``vertex d ...``
    counter-clockwise rotation at one vertex; together they list every dart once.
``orientation d ...``
    one positive dart per edge; defaults to the smaller dart.
``boundary d``
    the face containing dart ``d`` is a boundary face; may repeat.
``side LABEL d ...`` and ``corner d``
    polygon structure of a closed map: side paths and a dart leaving the corner.
``loop NAME d ...``
    a named loop as a dart sequence.
``area fI VALUE`` or ``area dK VALUE``
    area of face ``I`` or of the face containing dart ``K``; decimals and
    rationals ``p/q`` are accepted and kept exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

from .errors import DanglingId, MasterFieldError, SchemaError, UsageError
from .maps import CombinatorialMap, Path, build_map

if TYPE_CHECKING:
    from .construct import PolygonSides
    from .gallery import Sample

FORMAT_LINE = "format masterfield-map 1"
_TOKEN = re.compile(r"\S+")


@dataclass
class MapDocument:
    n_darts: int
    vertices: tuple[tuple[int, ...], ...]
    alpha: tuple[int, ...] | None = None
    orientation: tuple[int, ...] | None = None
    boundary: tuple[int, ...] = ()
    sides: dict[str, tuple[int, ...]] = field(default_factory=dict)
    corner: int | None = None
    loops: dict[str, tuple[int, ...]] = field(default_factory=dict)
    areas: dict[int, Fraction] = field(default_factory=dict)
    version: int = 1

    # --- derived objects --------------------------------------------------------

    def sigma(self) -> list[int]:
        s = [0] * self.n_darts
        for rot in self.vertices:
            for i, d in enumerate(rot):
                s[d] = rot[(i + 1) % len(rot)]
        return s

    def alpha_table(self) -> list[int]:
        if self.alpha is not None:
            return list(self.alpha)
        return [d ^ 1 for d in range(self.n_darts)]

    def to_map(self) -> CombinatorialMap:
        return build_map(self.alpha_table(), self.sigma(), self.orientation, self.boundary)

    def polygon(self, m: CombinatorialMap | None = None) -> "PolygonSides | None":
        from .construct import PolygonSides

        if not self.sides:
            return None
        m = m or self.to_map()
        corner = m.tail(self.corner) if self.corner is not None else m.tail(
            next(iter(self.sides.values()))[0]
        )
        return PolygonSides(m, dict(self.sides), corner)

    def loop(self, name: str, m: CombinatorialMap | None = None) -> Path:
        if name not in self.loops:
            raise DanglingId(f"no loop named {name!r}; known: {', '.join(self.loops) or 'none'}")
        m = m or self.to_map()
        return m.loop(list(self.loops[name]))

    # --- conversion -------------------------------------------------------------

    @classmethod
    def from_map(
        cls,
        m: CombinatorialMap,
        loops: dict[str, Path] | None = None,
        areas: dict[int, Fraction] | None = None,
        polygon: "PolygonSides | None" = None,
    ) -> "MapDocument":
        n = m.n_darts
        alpha = None if all(m.alpha[d] == d ^ 1 for d in range(n)) else tuple(m.alpha)
        default_pos = tuple(d for d in range(n) if d < m.alpha[d])
        orientation = None if m.positive == default_pos else tuple(m.positive)
        doc = cls(
            n_darts=n,
            vertices=tuple(tuple(c) for c in m.vertices),
            alpha=alpha,
            orientation=orientation,
            boundary=tuple(m.faces[f][0] for f in m.boundary),
            loops={k: tuple(p.darts) for k, p in (loops or {}).items()},
            areas={int(f): Fraction(a) for f, a in (areas or {}).items()},
        )
        if polygon is not None:
            doc.sides = {k: tuple(v) for k, v in polygon.sides.items()}
            doc.corner = m.vertices[polygon.corner][0]
        return doc

    @classmethod
    def from_sample(cls, s: "Sample") -> "MapDocument":
        return cls.from_map(s.map, s.loops, s.areas, s.polygon)


# --- parsing -------------------------------------------------------------------------


def _int(tok: str, line: int, col: int, what: str = "integer") -> int:
    try:
        return int(tok)
    except ValueError:
        raise SchemaError(f"expected {what}, got {tok!r}", line, col) from None


def parse_fraction(tok: str) -> Fraction:
    """Decimal or ``p/q`` rational, kept exact."""
    return Fraction(tok)


def parse_map(text: str) -> MapDocument:
    """Parse and validate a map document.

    Raises :class:`SchemaError` for malformed records and inconsistent
    tables and :class:`DanglingId` for references to missing darts, faces
    or loops; both carry 1-based line and column numbers.
    """
    rows: list[tuple[int, list[tuple[int, str]]]] = []
    for ln, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(body)]
        if toks:
            rows.append((ln, toks))
    if not rows:
        raise SchemaError("empty document", 1, 1)
    ln, toks = rows[0]
    if " ".join(t for _, t in toks) != FORMAT_LINE:
        raise SchemaError(f"first line must be {FORMAT_LINE!r}", ln, toks[0][0])
    if len(rows) < 2 or rows[1][1][0][1] != "darts" or len(rows[1][1]) != 2:
        where = rows[1] if len(rows) > 1 else rows[0]
        raise SchemaError("second record must be 'darts N'", where[0], where[1][0][0])
    ln, toks = rows[1]
    n = _int(toks[1][1], ln, toks[1][0])
    if n <= 0 or n % 2:
        raise SchemaError("number of darts must be positive and even", ln, toks[1][0])

    def dart(tok):
        col, t = tok
        d = _int(t, cur_line, col, "dart id")
        if not 0 <= d < n:
            raise DanglingId(f"dart {d} does not exist (darts are 0..{n - 1})", cur_line, col)
        return d

    vertices: list[tuple[int, ...]] = []
    seen_at: dict[int, tuple[int, int]] = {}
    alpha = orientation = corner = None
    boundary: list[int] = []
    sides: dict[str, tuple[int, ...]] = {}
    loops: dict[str, tuple[int, ...]] = {}
    loop_pos: dict[str, tuple[int, list[int]]] = {}
    raw_areas: list[tuple[int, int, str, str, str]] = []
    for cur_line, toks in rows[2:]:
        key = toks[0][1]
        args = toks[1:]
        if key == "vertex":
            if not args:
                raise SchemaError("vertex needs at least one dart", cur_line, toks[0][0])
            rot = []
            for tok in args:
                d = dart(tok)
                if d in seen_at:
                    pl, pc = seen_at[d]
                    raise SchemaError(
                        f"dart {d} already listed at line {pl}, column {pc}", cur_line, tok[0]
                    )
                seen_at[d] = (cur_line, tok[0])
                rot.append(d)
            vertices.append(tuple(rot))
        elif key == "alpha":
            if alpha is not None:
                raise SchemaError("alpha given twice", cur_line, toks[0][0])
            if len(args) != n:
                raise SchemaError(f"alpha needs {n} entries, got {len(args)}", cur_line, toks[0][0])
            alpha = tuple(dart(t) for t in args)
            for (col, _), d in zip(args, range(n)):
                a = alpha[d]
                if a == d:
                    raise SchemaError(f"alpha has a fixed point at dart {d}", cur_line, col)
                if alpha[a] != d:
                    raise SchemaError(f"alpha is not an involution at dart {d}", cur_line, col)
        elif key == "orientation":
            if orientation is not None:
                raise SchemaError("orientation given twice", cur_line, toks[0][0])
            orientation = tuple(dart(t) for t in args)
        elif key == "boundary":
            if len(args) != 1:
                raise SchemaError("boundary takes one dart", cur_line, toks[0][0])
            boundary.append(dart(args[0]))
        elif key == "corner":
            if len(args) != 1 or corner is not None:
                raise SchemaError("corner takes one dart and appears once", cur_line, toks[0][0])
            corner = dart(args[0])
        elif key in ("side", "loop"):
            if len(args) < 2:
                raise SchemaError(f"{key} needs a name and at least one dart", cur_line, toks[0][0])
            name = args[0][1]
            table = sides if key == "side" else loops
            if name in table:
                raise SchemaError(f"{key} {name!r} defined twice", cur_line, args[0][0])
            table[name] = tuple(dart(t) for t in args[1:])
            loop_pos[f"{key}:{name}"] = (cur_line, [c for c, _ in args[1:]])
        elif key == "area":
            if len(args) != 2:
                raise SchemaError("area takes a face reference and a value", cur_line, toks[0][0])
            (c1, ref), (c2, val) = args
            raw_areas.append((cur_line, c1, ref, c2, val))
        else:
            raise SchemaError(f"unknown keyword {key!r}", cur_line, toks[0][0])

    last = rows[-1][0]
    missing = sorted(set(range(n)) - set(seen_at))
    if missing:
        raise SchemaError(f"darts {missing} are not in any vertex", last, 1)
    alpha_t = list(alpha) if alpha is not None else [d ^ 1 for d in range(n)]
    doc = MapDocument(
        n_darts=n,
        vertices=tuple(vertices),
        alpha=alpha,
        orientation=orientation,
        boundary=tuple(boundary),
        sides=sides,
        corner=corner,
        loops=loops,
    )
    try:
        m = doc.to_map()
    except MasterFieldError as exc:
        raise SchemaError(f"invalid map: {exc}", rows[1][0], 1) from exc

    for tag, (line, cols) in loop_pos.items():
        kind, name = tag.split(":", 1)
        darts = sides[name] if kind == "side" else loops[name]
        for i in range(1, len(darts)):
            if m.tail(darts[i]) != m.tail(alpha_t[darts[i - 1]]):
                raise SchemaError(f"{kind} {name!r} breaks between darts {i - 1} and {i}", line, cols[i])
        if kind == "loop" and m.tail(alpha_t[darts[-1]]) != m.tail(darts[0]):
            raise SchemaError(f"loop {name!r} does not close", line, cols[-1])

    areas: dict[int, Fraction] = {}
    for line, c1, ref, c2, val in raw_areas:
        if len(ref) < 2 or ref[0] not in "fd":
            raise SchemaError(f"face reference must be fI or dK, got {ref!r}", line, c1)
        k = _int(ref[1:], line, c1 + 1, "face or dart id")
        if ref[0] == "f":
            if not 0 <= k < m.n_faces:
                raise DanglingId(f"face {k} does not exist (faces are 0..{m.n_faces - 1})", line, c1)
            f = k
        else:
            if not 0 <= k < n:
                raise DanglingId(f"dart {k} does not exist", line, c1)
            f = m.face_of[k]
        if f in areas:
            raise SchemaError(f"area of face {f} given twice", line, c1)
        try:
            a = parse_fraction(val)
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"bad area value {val!r}", line, c2) from None
        if a < 0:
            raise SchemaError(f"negative area {val}", line, c2)
        areas[f] = a
    doc.areas = areas
    return doc


# --- serialisation -------------------------------------------------------------------


def format_fraction(a: Fraction) -> str:
    """Finite decimals as decimals, other rationals as ``p/q``."""
    a = Fraction(a)
    den = a.denominator
    for p in (2, 5):
        while den % p == 0:
            den //= p
    if den != 1:
        return f"{a.numerator}/{a.denominator}"
    if a.denominator == 1:
        return str(a.numerator)
    digits = 0
    scaled = a
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def serialize(doc: MapDocument) -> str:
    """Text form of a document; :func:`parse_map` inverts it."""
    out = [FORMAT_LINE, f"darts {doc.n_darts}"]
    if doc.alpha is not None:
        out.append("alpha " + " ".join(map(str, doc.alpha)))
    for rot in doc.vertices:
        out.append("vertex " + " ".join(map(str, rot)))
    if doc.orientation is not None:
        out.append("orientation " + " ".join(map(str, doc.orientation)))
    for d in doc.boundary:
        out.append(f"boundary {d}")
    for k, darts in doc.sides.items():
        out.append(f"side {k} " + " ".join(map(str, darts)))
    if doc.corner is not None:
        out.append(f"corner {doc.corner}")
    for k, darts in doc.loops.items():
        out.append(f"loop {k} " + " ".join(map(str, darts)))
    for f in sorted(doc.areas):
        out.append(f"area f{f} {format_fraction(doc.areas[f])}")
    return "\n".join(out) + "\n"


def load_map(path: str) -> MapDocument:
    """Read a document from a file, or ``builtin:NAME`` for a gallery sample."""
    if path.startswith("builtin:"):
        from .gallery import sample

        return MapDocument.from_sample(sample(path.split(":", 1)[1]))
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read map file {path!r}: {exc.strerror}") from None
    return parse_map(text)
