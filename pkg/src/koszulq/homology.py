"""Ranks, cohomology dimensions, Smith forms and torsion of Koszul cocomplexes."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import linalg
from .cocomplex import GradedMatrix, KoszulComplex, WeightVector
from .scalars import LAURENT, QQ, QQ_FIELD, LaurentPoly, format_laurent


class NotACocycle(ValueError):
    """class_reduce was given a cochain with nonzero differential."""


# ---------------------------------------------------------------------------
# ranks


def rank(m: GradedMatrix, method: str = "fraction_free") -> int:
    """Exact rank over the fraction field of the entry ring.

    ``fraction_free`` eliminates over Z or Z[q]; ``field`` runs Gaussian
    elimination over Q or Q(q) with a different pivot order (last index
    first).  Both must agree.
    """
    if m.ring is QQ_FIELD or method == "field":
        n = len(m.rows)
        return linalg.field_rank({n - 1 - r: x for r, x in col.items()} for col in m.columns)
    if m.ring is LAURENT:
        return linalg.rank_laurent(m.columns)
    return linalg.rank_rational(m.columns)


def rank_q1(m: GradedMatrix) -> int:
    if m.ring is QQ:
        return rank(m)
    return linalg.rank_at(m.columns, 1)


@dataclass
class SnfResult:
    factors: list  # nonzero invariant factors, canonical associates, chain order
    rank: int

    def nonunit(self) -> list:
        return [f for f in self.factors if f != 1]

    def strings(self) -> list:
        return [format_laurent(f) for f in self.nonunit()]


def smith_normal_form(m: GradedMatrix) -> SnfResult:
    ents = {k: LaurentPoly._coerce(x) for k, x in m.entries().items()}
    f = linalg.smith_factors(len(m.rows), len(m.cols), ents)
    return SnfResult(f, len(f))


# ---------------------------------------------------------------------------


class Cohomology:
    """Cached per-bidegree, per-weight-block ranks of one complex.

    Blocks come from the complex's automatic weight lattice, so a matrix is
    never assembled across weights.
    """

    def __init__(self, K: KoszulComplex, weights: Sequence[WeightVector] | None = None,
                 progress: Callable[[str], None] | None = None):
        self.K = K
        self.weights = K.weights() if weights is None else list(weights)
        self._blocks: dict = {}
        self._rank: dict = {}
        self._rank1: dict = {}
        self._mats: dict = {}
        self._snf: dict = {}
        self.progress = progress

    def blocks(self, i: int, j: int) -> dict:
        key = (i, j)
        got = self._blocks.get(key)
        if got is None:
            got = self.K.blocks(i, j, self.weights) if self.K.valid(i, j) else {}
            self._blocks[key] = got
        return got

    def block_matrices(self, i: int, j: int) -> list:
        """[(weight, GradedMatrix)] for d : C^{i,j} -> C^{i+1,j+2}."""
        key = (i, j)
        got = self._mats.get(key)
        if got is not None:
            return got
        src = self.blocks(i, j)
        tgt = self.blocks(i + 1, j + 2)
        out = []
        for w, keys in src.items():
            out.append((w, self.K.matrix(i, j, keys, tgt.get(w, []))))
        self._mats[key] = out
        if self.progress:
            self.progress(f"assembled d at ({i},{j}): {sum(len(k) for k in src.values())} columns")
        return out

    def dim_chain(self, i: int, j: int) -> int:
        return sum(len(v) for v in self.blocks(i, j).values())

    def rank(self, i: int, j: int, weight=None) -> int:
        if not self.K.valid(i, j):
            return 0
        key = (i, j)
        if key not in self._rank:
            self._rank[key] = {w: rank(m) for w, m in self.block_matrices(i, j)}
        r = self._rank[key]
        return sum(r.values()) if weight is None else r.get(weight, 0)

    def rank_q1(self, i: int, j: int, weight=None) -> int:
        if not self.K.valid(i, j):
            return 0
        key = (i, j)
        if key not in self._rank1:
            self._rank1[key] = {w: rank_q1(m) for w, m in self.block_matrices(i, j)}
        r = self._rank1[key]
        return sum(r.values()) if weight is None else r.get(weight, 0)

    def dim(self, i: int, j: int, weight=None) -> int:
        if not self.K.valid(i, j):
            return 0
        if weight is None:
            c = self.dim_chain(i, j)
        else:
            c = len(self.blocks(i, j).get(weight, []))
        return c - self.rank(i, j, weight) - self.rank(i - 1, j - 2, weight)

    def dim_q1(self, i: int, j: int) -> int:
        if not self.K.valid(i, j):
            return 0
        return self.dim_chain(i, j) - self.rank_q1(i, j) - self.rank_q1(i - 1, j - 2)

    def lifting(self, i: int, j: int) -> bool:
        return self.rank_q1(i, j) == self.rank(i, j)

    def snf(self, i: int, j: int) -> list:
        """Nonzero invariant factors of d^{i,j}, blocks combined into one chain."""
        key = (i, j)
        if key not in self._snf:
            fs = []
            if self.K.valid(i, j):
                for _, m in self.block_matrices(i, j):
                    if not m.is_zero():
                        fs.extend(smith_normal_form(m).factors)
            self._snf[key] = linalg.chain_normalize(fs)
        return self._snf[key]

    def torsion(self, i: int, j: int) -> list:
        """Torsion invariant factors of H^{i,j} of the Q[q, q^-1]-complex.

        ker d^{i,j} is saturated in C^{i,j}, so the torsion of H^{i,j} is the
        torsion of coker d^{i-1,j-2}: its non-unit invariant factors.
        """
        return [f for f in self.snf(i - 1, j - 2) if f != 1]

    def preload(self, i: int, j: int, ranks: dict, ranks_q1: dict | None = None, snf: list | None = None):
        """Install results computed elsewhere (e.g. by a worker process)."""
        self._rank[(i, j)] = dict(ranks)
        if ranks_q1 is not None:
            self._rank1[(i, j)] = dict(ranks_q1)
        if snf is not None:
            self._snf[(i, j)] = list(snf)

    def d_squared_zero(self, i: int, j: int) -> bool:
        for w, keys in self.blocks(i, j).items():
            for key in keys:
                if self.K.apply(self.K.image(key)):
                    return False
        return True


def cohomology_dims(K: KoszulComplex, i: int, j: int) -> int:
    return Cohomology(K).dim(i, j)


def q1_lifting_check(K: KoszulComplex, i: int, j: int) -> bool:
    return Cohomology(K).lifting(i, j)


def torsion_report(K: KoszulComplex, i: int, j: int) -> list:
    return Cohomology(K).torsion(i, j)


def euler_holds_strand(C: Cohomology, w: int, top: int) -> bool:
    """Alternating sums agree along the strand j - 2i = w (d preserves it)."""
    chi_c = chi_h = 0
    for i in range(top + 1):
        j = w + 2 * i
        chi_c += (-1) ** i * C.dim_chain(i, j)
        chi_h += (-1) ** i * C.dim(i, j)
    return chi_c == chi_h


# ---------------------------------------------------------------------------
# cocycles modulo coboundaries


def class_reduce(z: dict, C: Cohomology, i: int, j: int) -> dict:
    """Residue of the cocycle z modulo im d^{i-1,j-2}, reduced against the
    echelonized image basis (basis order of C^{i,j}).  Zero iff z is a coboundary."""
    K = C.K
    if K.apply(z):
        raise NotACocycle(f"d(z) != 0 at ({i},{j})")
    if not z:
        return {}
    out: dict = {}
    parts: dict = {}
    for key, x in z.items():
        parts.setdefault(K.weight_of(key, C.weights), {})[key] = x
    for w, zw in parts.items():
        red = _image_rref(C, i, j, w)
        out.update(linalg.reduce_against(zw, red, key=_order(C, i, j)))
    return dict(sorted(out.items(), key=lambda t: _order(C, i, j)(t[0])))


def _order(C: Cohomology, i: int, j: int):
    cache = getattr(C, "_order_cache", None)
    if cache is None:
        cache = C._order_cache = {}
    got = cache.get((i, j))
    if got is None:
        idx = {k: n for n, k in enumerate(C.K.basis(i, j))}
        got = cache[(i, j)] = idx.__getitem__
    return got


def _image_rref(C: Cohomology, i: int, j: int, w) -> list:
    cache = getattr(C, "_img_cache", None)
    if cache is None:
        cache = C._img_cache = {}
    got = cache.get((i, j, w))
    if got is not None:
        return got
    rows = []
    if C.K.valid(i - 1, j - 2):
        for key in C.blocks(i - 1, j - 2).get(w, []):
            rows.append(C.K.image(key))
    got = linalg.rref(rows, key=_order(C, i, j))
    cache[(i, j, w)] = got
    return got


# ---------------------------------------------------------------------------
# module structure over k[center]


@dataclass
class ModuleRow:
    i: int
    j: int
    dim: int
    candidates: int
    rank: int
    killed: list = field(default_factory=list)


@dataclass
class ModuleReport:
    verdict: str  # FREE | TRIVIAL-SUMMAND | MISMATCH
    rows: list
    trivial: list
    first_failure: tuple | None = None

    def lines(self) -> list:
        out = [f"verdict: {self.verdict}"]
        for r in self.rows:
            flag = "ok" if r.rank == r.candidates == r.dim else "FAIL"
            out.append(f"  ({r.i},{r.j}) dim={r.dim} candidates={r.candidates} rank={r.rank} {flag}")
        if self.trivial:
            out.append("  torsion generators: " + ", ".join(self.trivial))
        return out


def cochain_degree(z: dict) -> tuple:
    """(i, j) of a homogeneous cochain {(lambda, mu): c}."""
    degs = {(len(m), len(l) + len(m)) for l, m in z}
    if len(degs) != 1:
        raise ValueError(f"cochain is not bihomogeneous: {sorted(degs)}")
    return degs.pop()


def module_structure_check(C: Cohomology, center: dict, generators: Sequence, cutoff: int) -> ModuleReport:
    """Test whether named cocycles ``generators`` [(name, cochain)] generate
    H^i freely over k[center] up to internal degree ``cutoff``.

    In each bidegree the candidates are center^m * g.  A generator g with
    center * g a coboundary (while g is not) spans a trivial summand; the
    others must be independent and span H^{i,j}.
    """
    K = C.K
    if not center or K.apply(center):
        raise NotACocycle("center is not a nonzero degree-0 cocycle")
    ci, cj = cochain_degree(center)
    if ci != 0 or cj <= 0:
        raise ValueError("center must have homological degree 0 and positive internal degree")
    gens = []
    for name, z in generators:
        if K.apply(z):
            raise NotACocycle(f"generator {name} is not a cocycle")
        gens.append((name, z) + cochain_degree(z))
    rows, trivial, first = [], [], None
    for i in sorted({g[2] for g in gens}):
        dead: set = set()
        for j in range(i, cutoff + 1):
            if not K.valid(i, j):
                continue
            res, killed = [], []
            for name, z, gi, gj in gens:
                if gi != i or gj > j or (j - gj) % cj:
                    continue
                if name in dead:
                    continue
                w = z
                for _ in range((j - gj) // cj):
                    w = K.product(center, w)
                r = class_reduce(w, C, i, j)
                if not r and gj < j:
                    killed.append(name)
                    dead.add(name)
                else:
                    res.append(r)
            idx = _order(C, i, j)
            rk = linalg.field_rank([{idx(k): x for k, x in r.items()} for r in res])
            dim = C.dim(i, j)
            rows.append(ModuleRow(i, j, dim, len(res), rk, killed))
            trivial.extend(n for n in killed if n not in trivial)
            if not rk == len(res) == dim and first is None:
                first = (i, j)
    verdict = "MISMATCH" if first else ("TRIVIAL-SUMMAND" if trivial else "FREE")
    return ModuleReport(verdict, rows, trivial, first)


# ---------------------------------------------------------------------------
# tables


@dataclass
class CohomologyEntry:
    i: int
    j: int
    dim: int
    dim_q1: int | None = None
    torsion: list | None = None

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "dim": self.dim, "dim_q1": self.dim_q1,
                "torsion": self.torsion}


class CohomologyTable:
    COLUMNS = ("i", "j", "dim", "dim_q1", "torsion")

    def __init__(self, entries: Sequence[CohomologyEntry] = ()):
        self.entries = sorted(entries, key=lambda e: (e.j, e.i))

    def get(self, i: int, j: int) -> CohomologyEntry | None:
        for e in self.entries:
            if e.i == i and e.j == j:
                return e
        return None

    def dims(self) -> dict:
        return {(e.i, e.j): e.dim for e in self.entries}

    def nonzero(self) -> dict:
        return {k: v for k, v in self.dims().items() if v}

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for e in self.entries:
            w.writerow([e.i, e.j, e.dim, "" if e.dim_q1 is None else e.dim_q1,
                        "" if e.torsion is None else ";".join(e.torsion)])
        return buf.getvalue()


def cohomology_table(C: Cohomology, cutoff: int, with_q1: bool = False, with_torsion: bool = False,
                     bidegrees: Sequence | None = None) -> CohomologyTable:
    out = []
    for i, j in bidegrees or C.K.bidegrees(cutoff):
        e = CohomologyEntry(i, j, C.dim(i, j))
        if with_q1:
            e.dim_q1 = C.dim_q1(i, j)
        if with_torsion:
            e.torsion = [format_laurent(f) for f in C.torsion(i, j)]
        out.append(e)
    return CohomologyTable(out)
