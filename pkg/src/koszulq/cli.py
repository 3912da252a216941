"""Command-line front end.

    koszulq check quantum_matrices_2x2
    koszulq cohomology quantum_plane --mode hochschild --torsion
    koszulq compare quantum_matrices_2x2 --max-degree 8 --format text

INPUT is a catalog name or the path of an algebra file (see ``formats``).
Exit codes: 0 success, 1 check failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import catalog, formats
from .catalog import CatalogEntry
from .cocomplex import KoszulComplex, NotHomogeneous, PoissonComplex, cce_oracle
from .homology import Cohomology, CohomologyEntry
from .ncpoly import DualNotPBW, NotSolvable, confluence_check, hilbert_coeffs
from .poisson import NoSemiclassicalLimit, jacobi_check, semiclassical_limit
from .scalars import LAURENT, format_laurent

MODES = ("hochschild", "poisson", "compare")
FORMATS = ("json", "csv", "text")
DEFAULT_CUTOFF = 10


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: str
    mode: str = "hochschild"
    max_degree: int = DEFAULT_CUTOFF
    format: str = "json"
    jobs: int = 1
    torsion: bool = False
    grade_split: bool = False
    oracle_cce: bool = False
    check_only: bool = False


def _progress(msg: str) -> None:
    print(f"koszulq: {msg}", file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# inputs


def _source(text: str) -> tuple:
    if text in catalog.CATALOG:
        return ("catalog", text)
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as f:
            body = f.read()
        return ("text", body, os.path.splitext(os.path.basename(text))[0])
    raise InputError(f"{text!r} is neither a catalog name ({', '.join(catalog.CATALOG)}) nor a file")


def _entry(source: tuple) -> CatalogEntry:
    if source[0] == "catalog":
        return catalog.get(source[1])
    return formats.loads(source[1], name=source[2])


def _limit(entry: CatalogEntry):
    """Semiclassical bracket of a q-algebra, or None if it has none."""
    if entry.algebra.ring is not LAURENT:
        return None
    try:
        return semiclassical_limit(entry.algebra)
    except (NoSemiclassicalLimit, ValueError):
        return None


def _complex(entry: CatalogEntry, kind: str) -> KoszulComplex:
    """kind: "hh" (scaled when the algebra has a semiclassical limit) or "hp"."""
    if kind == "hp":
        B = entry.bracket if entry.bracket is not None else _limit(entry)
        if B is None:
            raise InputError(f"{entry.name} has no Poisson bracket")
        return PoissonComplex(B, check=False)
    return entry.hochschild(scaled=_limit(entry) is not None)


# ---------------------------------------------------------------------------
# checks


def run_checks(entry: CatalogEntry, cutoff: int, full: bool = True) -> list:
    """[(name, passed, witness)].  ``full`` adds the per-bidegree checks."""
    out = []
    alg = entry.algebra
    rep = confluence_check(alg)
    out.append(("confluence", rep.confluent, "; ".join(rep.lines()[:3])))
    dual = None
    if rep.confluent:
        try:
            dual = entry.dual
            out.append(("dual confluence", True, ""))
        except (DualNotPBW, NotSolvable, ValueError) as e:
            out.append(("dual confluence", False, str(e)))
    if dual is not None:
        h, hd = hilbert_coeffs(alg, cutoff), hilbert_coeffs(dual, cutoff)
        bad = next((m for m in range(cutoff + 1)
                    if sum((-1) ** i * hd[i] * h[m - i] for i in range(m + 1)) != (m == 0)), None)
        out.append(("koszul numerical", bad is None, "" if bad is None else f"h(t)h^!(-t) fails in degree {bad}"))
    B = entry.bracket if entry.bracket is not None else _limit(entry)
    if B is not None:
        ok, wit = jacobi_check(B)
        out.append(("jacobi", ok, "" if ok else
                    f"J({', '.join(B.names[t] for t in wit[0])}) = {wit[1].format(B.names)}"))
    if not full or dual is None or not all(ok for _, ok, _ in out):
        return out
    complexes = [("hochschild", _complex(entry, "hh"))]
    if B is not None:
        complexes.append(("poisson", _complex(entry, "hp")))
    for label, K in complexes:
        out.append((f"d^2 = 0 ({label})",) + _d_squared(K, cutoff))
        out.append((f"weight homogeneity ({label})",) + _homogeneous(K, cutoff))
    return out


def _d_squared(K: KoszulComplex, cutoff: int) -> tuple:
    for i, j in K.bidegrees(cutoff):
        for key in K.basis(i, j):
            dd = K.apply(K.image(key))
            if dd:
                k2 = min(dd, key=repr)
                return False, f"d(d({K.label(key)})) has {dd[k2]} on {K.label(k2)}"
    return True, ""


def _homogeneous(K: KoszulComplex, cutoff: int) -> tuple:
    ws = K.weights()
    for i, j in K.bidegrees(cutoff):
        for key in K.basis(i, j):
            w = K.weight_of(key, ws)
            for k2 in K.image(key):
                if K.weight_of(k2, ws) != w:
                    return False, f"d({K.label(key)}) reaches {K.label(k2)} of another weight"
    return True, f"{len(ws)} weight(s)"


def check_report(cfg: RunConfig, entry: CatalogEntry) -> dict:
    rows = run_checks(entry, cfg.max_degree)
    checks = [{"check": n, "status": "PASS" if ok else "FAIL", "witness": w} for n, ok, w in rows]
    return {"input": entry.name, "cutoff": cfg.max_degree, "checks": checks,
            "ok": all(ok for _, ok, _ in rows)}


# ---------------------------------------------------------------------------
# parallel bidegree scheduler

_WORKER: dict = {}


def _worker_init(source: tuple) -> None:
    _WORKER.clear()
    _WORKER["entry"] = _entry(source)


def _cohomology(kind: str) -> Cohomology:
    key = ("C", kind)
    if key not in _WORKER:
        _WORKER[key] = Cohomology(_complex(_WORKER["entry"], kind))
    return _WORKER[key]


def _task(task: tuple) -> tuple:
    kind, i, j, want_q1, want_snf = task
    C = _cohomology(kind)
    C.rank(i, j)
    ranks = C._rank.get((i, j), {})
    ranks_q1 = None
    if want_q1:
        C.rank_q1(i, j)
        ranks_q1 = C._rank1.get((i, j), {})
    snf = C.snf(i, j) if want_snf else None
    C._mats.pop((i, j), None)
    return task, ranks, ranks_q1, snf


def compute(source: tuple, entry: CatalogEntry, kinds: list, cutoff: int, jobs: int,
            want_q1: bool = False, want_snf: bool = False) -> dict:
    """{kind: Cohomology} with every d^{i,j}, j <= cutoff, already ranked."""
    _WORKER.clear()
    _WORKER["entry"] = entry
    out = {kind: _cohomology(kind) for kind in kinds}
    tasks = [(kind, i, j, want_q1 and kind == "hh", want_snf and kind == "hh")
             for kind in kinds for i, j in out[kind].K.bidegrees(cutoff)]
    # large bidegrees first so the pool drains evenly
    tasks.sort(key=lambda t: (-t[2], t[1], t[0]))
    total = len(tasks)

    def install(done, result):
        (kind, i, j, _, _), ranks, ranks_q1, snf = result
        out[kind].preload(i, j, ranks, ranks_q1, snf)
        _progress(f"{kind} d^{{{i},{j}}} done [{done}/{total}]")

    if jobs > 1 and total > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init, initargs=(source,)) as pool:
            for n, result in enumerate(pool.map(_task, tasks), 1):
                install(n, result)
    else:
        for n, t in enumerate(tasks, 1):
            install(n, _task(t))
    return out


# ---------------------------------------------------------------------------
# reports


def _blocks(C: Cohomology, i: int, j: int, label_weights) -> list:
    """Nonzero dims per weight, weights read through ``label_weights``."""
    agg: dict = {}
    for w, keys in C.blocks(i, j).items():
        d = C.dim(i, j, weight=w)
        if d:
            lw = C.K.weight_of(keys[0], label_weights)
            agg[lw] = agg.get(lw, 0) + d
    return [{"weight": list(w), "dim": d} for w, d in sorted(agg.items())]


def cohomology_report(cfg: RunConfig, source: tuple, entry: CatalogEntry) -> dict:
    kind = "hp" if cfg.mode == "poisson" else "hh"
    torsion = cfg.torsion and kind == "hh" and _complex(entry, kind).ring is LAURENT
    C = compute(source, entry, [kind], cfg.max_degree, cfg.jobs, want_snf=torsion)[kind]
    label_weights = entry.weights if entry.weights else C.weights
    rows = []
    for i, j in C.K.bidegrees(cfg.max_degree):
        e = CohomologyEntry(i, j, C.dim(i, j))
        if cfg.torsion:
            e.torsion = [format_laurent(f) for f in C.torsion(i, j)] if torsion else []
        row = {k: v for k, v in e.to_json().items() if v is not None}
        if cfg.grade_split:
            row["blocks"] = _blocks(C, i, j, label_weights)
        rows.append(row)
    rep = {"input": entry.name, "mode": cfg.mode, "cutoff": cfg.max_degree, "table": rows}
    if cfg.oracle_cce:
        rep["oracle_cce"] = _oracle(C.K if kind == "hp" else _complex(entry, "hp"), cfg.max_degree)
    return rep


def _oracle(K: PoissonComplex, cutoff: int) -> dict:
    for i, j in K.bidegrees(cutoff):
        if K.matrix(i, j) != cce_oracle(K.B, i, j):
            return {"status": "FAIL", "bidegree": [i, j]}
    return {"status": "PASS", "bidegree": None}


def compare_report(cfg: RunConfig, source: tuple, entry: CatalogEntry) -> dict:
    if entry.algebra.ring is not LAURENT:
        raise InputError(f"compare needs a q-algebra; {entry.name} has coefficients {entry.algebra.ring.name}")
    semiclassical_limit(entry.algebra)  # NoSemiclassicalLimit propagates
    Cs = compute(source, entry, ["hh", "hp"], cfg.max_degree, cfg.jobs, want_q1=True)
    H, P = Cs["hh"], Cs["hp"]
    rows, offending = [], None
    for i, j in H.K.bidegrees(cfg.max_degree):
        dh, dp = H.dim(i, j), P.dim(i, j)
        drop = not (H.lifting(i, j) and H.lifting(i - 1, j - 2))
        rows.append({"i": i, "j": j, "dim_hh": dh, "dim_hp": dp, "rank_drop": drop})
        if offending is None and (drop or dh != dp):
            offending = [i, j]
    verdict = "q-deformation verified up to cutoff" if offending is None else \
        f"FAILED at bidegree ({offending[0]},{offending[1]})"
    return {"input": entry.name, "mode": "compare", "cutoff": cfg.max_degree, "table": rows,
            "verdict": verdict, "offending": offending}


# ---------------------------------------------------------------------------
# rendering (text and csv are derived from the JSON report)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return ""
    if isinstance(v, list):
        return ";".join(_cell(x) if not isinstance(x, dict) else
                        ",".join(map(str, x["weight"])) + ":" + str(x["dim"]) for x in v)
    return str(v)


def _columns(rows: list) -> list:
    cols: list = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    return cols


def render(rep: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rep, indent=2, sort_keys=False) + "\n"
    if "checks" in rep:
        if fmt == "csv":
            return _csv(rep["checks"])
        lines = [f"{c['status']} {c['check']}" + (f": {c['witness']}" if c["witness"] else "")
                 for c in rep["checks"]]
        return "\n".join(lines + ["ok" if rep["ok"] else "FAILED"]) + "\n"
    if fmt == "csv":
        return _csv(rep["table"])
    cols = _columns(rep["table"])
    cells = [cols] + [[_cell(r.get(c)) for c in cols] for r in rep["table"]]
    width = [max(len(row[k]) for row in cells) for k in range(len(cols))]
    lines = [f"# {rep['input']}  mode={rep['mode']}  cutoff={rep['cutoff']}"]
    lines += ["  ".join(x.rjust(w) for x, w in zip(row, width)).rstrip() for row in cells]
    if "oracle_cce" in rep:
        o = rep["oracle_cce"]
        lines.append(f"cce oracle: {o['status']}" + (f" at {tuple(o['bidegree'])}" if o["bidegree"] else ""))
    if "verdict" in rep:
        lines.append(rep["verdict"])
    return "\n".join(lines) + "\n"


def _csv(rows: list) -> str:
    buf = io.StringIO()
    cols = _columns(rows)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in cols])
    return buf.getvalue()


# ---------------------------------------------------------------------------


def _cutoff_default() -> int:
    raw = os.environ.get("KOSZULQ_MAX_DEGREE")
    if raw is None:
        return DEFAULT_CUTOFF
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"KOSZULQ_MAX_DEGREE={raw!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="koszulq", description="Koszul cocomplexes and bigraded cohomology.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("check", "run consistency checks"),
                       ("cohomology", "bigraded cohomology table"),
                       ("compare", "HH of a q-algebra against HP of its semiclassical limit")):
        s = sub.add_parser(name, help=text)
        s.add_argument("input", help="catalog name or algebra file")
        s.add_argument("--mode", choices=MODES, default="compare" if name == "compare" else "hochschild")
        s.add_argument("--max-degree", type=int, default=None,
                       help=f"internal degree cutoff (default $KOSZULQ_MAX_DEGREE or {DEFAULT_CUTOFF})")
        s.add_argument("--format", choices=FORMATS, default="json")
        s.add_argument("--jobs", type=int, default=None, help="worker processes (default: all cores)")
        s.add_argument("--torsion", action="store_true", help="report SNF torsion factors")
        s.add_argument("--grade-split", action="store_true", help="split dims by weight")
        s.add_argument("--oracle-cce", action="store_true", help="cross-check the Poisson differential")
        s.add_argument("--check-only", action="store_true", help="run the checks and stop")
    return p


def config(argv=None) -> RunConfig:
    a = build_parser().parse_args(argv)
    cutoff = a.max_degree if a.max_degree is not None else _cutoff_default()
    if cutoff < 0:
        raise InputError("--max-degree must be >= 0")
    jobs = a.jobs if a.jobs is not None else (os.cpu_count() or 1)
    if jobs < 1:
        raise InputError("--jobs must be >= 1")
    mode = "compare" if a.command == "compare" else a.mode
    return RunConfig(a.command, a.input, mode, cutoff, a.format, jobs, a.torsion, a.grade_split,
                     a.oracle_cce, a.check_only)


def run(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    source = _source(cfg.input)
    entry = _entry(source)
    if cfg.command == "check" or cfg.check_only:
        rep = check_report(cfg, entry)
        out.write(render(rep, cfg.format))
        return 0 if rep["ok"] else 1
    failed = [(n, w) for n, ok, w in run_checks(entry, cfg.max_degree, full=False) if not ok]
    if failed:
        for n, w in failed:
            _progress(f"FAIL {n}: {w}")
        return 1
    if cfg.mode == "compare":
        rep = compare_report(cfg, source, entry)
        out.write(render(rep, cfg.format))
        return 0 if rep["offending"] is None else 1
    rep = cohomology_report(cfg, source, entry)
    out.write(render(rep, cfg.format))
    return 0 if rep.get("oracle_cce", {}).get("status", "PASS") == "PASS" else 1


def main(argv=None) -> int:
    try:
        cfg = config(argv)
        return run(cfg)
    except SystemExit as e:  # argparse usage errors
        return 2 if e.code else 0
    except (InputError, formats.FormatError, KeyError, OSError) as e:
        print(f"koszulq: error: {e.args[0] if isinstance(e, KeyError) else e}", file=sys.stderr)
        return 2
    except NoSemiclassicalLimit as e:
        print(f"koszulq: no semiclassical limit: {e}", file=sys.stderr)
        return 2
    except NotHomogeneous as e:
        print(f"koszulq: check failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
