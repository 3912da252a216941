"""Algebra definition files (TOML).

    generators = ["a", "b"]
    coeff = "Qq"                # Q | Qq | Qq_field
    [degrees]                   # optional, default 1
    a = 1
    [relations]                 # "lhs" = "rhs" means lhs - rhs = 0
    "b.a" = "q^-1 * a.b"
    [bracket]                   # optional; omitted pairs are zero
    "a,b" = "a*b"
"""

from __future__ import annotations

import re
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .catalog import CatalogEntry
from .ncpoly import NcPoly, QuadraticAlgebra, parse_ncpoly
from .poisson import PoissonBracket, parse_commpoly
from .scalars import ParseError, ring_by_name


class FormatError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line, self.column = line, column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


def _locate(text: str, key: str, in_key: bool = False) -> tuple:
    """1-based (line, column) of the first character of a key's value, or of
    the key itself with ``in_key``."""
    pat = re.compile(r'^(\s*)("%s"|%s)\s*=\s*' % (re.escape(key), re.escape(key)))
    for n, line in enumerate(text.splitlines(), 1):
        m = pat.match(line)
        if not m:
            continue
        if in_key:
            return n, m.start(2) + 1 + (m.group(2).startswith('"'))
        col = m.end() + 1
        if line[m.end():m.end() + 1] in "\"'":
            col += 1
        return n, col
    return 0, 0


def _section(text: str, name: str) -> tuple:
    for n, line in enumerate(text.splitlines(), 1):
        if line.strip() == f"[{name}]":
            return n, 1
    return 0, 0


def _parse_value(text, key, value, fn, in_key=False):
    if not isinstance(value, str):
        line, col = _locate(text, key)
        raise FormatError(f"value for {key!r} must be a string", line, col)
    try:
        return fn(value)
    except ParseError as e:
        line, col = _locate(text, key, in_key)
        raise FormatError(f"{e.message} in {value!r}", line, col + e.column - 1) from None


def loads(text: str, name: str = "") -> CatalogEntry:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise FormatError(str(e).split(" (at ")[0], getattr(e, "lineno", 0), getattr(e, "colno", 0)) from None
    gens = data.get("generators")
    if not isinstance(gens, list) or not gens or not all(isinstance(g, str) for g in gens):
        raise FormatError("'generators' must be a nonempty list of names", *_locate(text, "generators"))
    if len(set(gens)) != len(gens):
        raise FormatError("duplicate generator name", *_locate(text, "generators"))
    try:
        ring = ring_by_name(data.get("coeff", "Qq"))
    except (KeyError, ValueError):
        raise FormatError(f"unknown coeff {data.get('coeff')!r}", *_locate(text, "coeff")) from None
    degs = data.get("degrees", {})
    unknown = set(degs) - set(gens)
    if unknown:
        raise FormatError(f"degree given for unknown generator {sorted(unknown)[0]!r}",
                          *_locate(text, sorted(unknown)[0]))
    degrees = [int(degs.get(g, 1)) for g in gens]
    rels = []
    for lhs, rhs in data.get("relations", {}).items():
        left = _parse_value(text, lhs, lhs, lambda s: parse_ncpoly(s, gens, ring), in_key=True)
        right = _parse_value(text, lhs, rhs, lambda s: parse_ncpoly(s, gens, ring))
        terms = dict(left.terms)
        for w, c in right.terms.items():
            terms[w] = terms.get(w, ring.zero) - c
        rels.append(NcPoly(terms, ring))
    try:
        # confluence is a check, not a parse error: callers run confluence_check
        alg = QuadraticAlgebra(gens, rels, ring, degrees, label=name, check=False)
    except ValueError as e:
        raise FormatError(str(e), *_section(text, "relations")) from None
    bracket = None
    if "bracket" in data:
        table = {}
        for key, val in data["bracket"].items():
            parts = [p.strip() for p in key.split(",")]
            if len(parts) != 2 or not all(p in gens for p in parts):
                raise FormatError(f"bracket key {key!r} must be 'x,y' with generators x, y", *_locate(text, key))
            i, j = gens.index(parts[0]), gens.index(parts[1])
            table[(i, j)] = _parse_value(text, key, val, lambda s: parse_commpoly(s, gens))
        try:
            bracket = PoissonBracket(gens, table, label=name)
        except ValueError as e:
            raise FormatError(str(e)) from None
    quantum = ring.name != "Q"
    return CatalogEntry(name or "file", alg, bracket, None, f"loaded from {name or 'text'}", quantum=quantum)


def load(path: str) -> CatalogEntry:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return loads(text, name=path.rsplit("/", 1)[-1].rsplit(".", 1)[0])


def dumps(entry: CatalogEntry) -> str:
    """TOML text for an entry (relations written as "lhs" = "0")."""
    from .ncpoly import format_terms

    alg = entry.algebra
    out = ["generators = [" + ", ".join(f'"{g}"' for g in alg.names) + "]", f'coeff = "{alg.ring.name}"']
    if any(d != 1 for d in alg.degrees):
        out.append("[degrees]")
        out += [f"{g} = {d}" for g, d in zip(alg.names, alg.degrees)]
    out.append("[relations]")
    for r in alg.relations:
        out.append(f'"{format_terms(r.terms, alg.names)}" = "0"')
    if entry.bracket is not None:
        B = entry.bracket
        out.append("[bracket]")
        for (i, j), p in sorted(B.table.items()):
            out.append(f'"{B.names[i]},{B.names[j]}" = "{p.format(B.names)}"')
    return "\n".join(out) + "\n"
