"""The eight acceptance criteria.  Each test records one pass/fail line,
printed in the terminal summary (or directly when run as a script)."""

import functools
import random
import sys
from itertools import product
from math import comb

import pytest

from koszulq import catalog
from koszulq.cocomplex import cce_oracle, poisson_cochain, poisson_differential
from koszulq.homology import Cohomology, class_reduce, euler_holds_strand, module_structure_check
from koszulq.linalg import nullspace
from koszulq.ncpoly import (
    confluence_check, hilbert_coeffs, koszul_numerical_check, relation_span_equal, specialize,
)
from koszulq.poisson import jacobi_check, word_to_exponent
from koszulq.scalars import QQ

import test_cocomplex as tc
from m_tables import TABLES, table_image
from oracles import dense, direct_sum_factors, oracle_invariant_factors

RESULTS: dict = {}

QP = catalog.get("quantum_plane")
PP = catalog.get("poisson_plane")
QM = catalog.get("quantum_matrices_2x2")
PM = catalog.get("poisson_matrices")
CUTOFF = 10


def criterion(n, title):
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*a, **kw):
            RESULTS[n] = (False, title)
            fn(*a, **kw)
            RESULTS[n] = (True, title)
        return inner
    return wrap


def nonzero(C, cutoff):
    return {(i, j): C.dim(i, j) for i, j in C.K.bidegrees(cutoff) if C.dim(i, j)}


# ---------------------------------------------------------------------------


@criterion(1, "quantum plane HH table")
def test_plane_hochschild_table():
    C = Cohomology(QP.hochschild())
    assert nonzero(C, CUTOFF) == {(0, 0): 1, (1, 2): 2, (2, 2): 1, (2, 4): 1}
    totals = [sum(C.dim(i, j) for j in range(CUTOFF + 1)) for i in range(3)]
    assert totals == [1, 2, 2]


@criterion(2, "quantum plane HP table equals HH")
def test_plane_poisson_table():
    H, P = Cohomology(QP.hochschild()), Cohomology(PP.poisson())
    assert nonzero(P, CUTOFF) == nonzero(H, CUTOFF) == {(0, 0): 1, (1, 2): 2, (2, 2): 1, (2, 4): 1}


@criterion(3, "quantum plane torsion against a brute-force SNF oracle")
def test_plane_torsion():
    C = Cohomology(QP.hochschild())
    for i, j in C.K.bidegrees(CUTOFF):
        got = [tuple(f.coeffs) for f in C.torsion(i, j)]
        blocks = C.block_matrices(i - 1, j - 2) if C.K.valid(i - 1, j - 2) else []
        expect = direct_sum_factors([oracle_invariant_factors(dense(m)) for _, m in blocks if not m.is_zero()])
        assert got == expect, (i, j)
        assert all(f.eval_q1() != 0 for f in C.torsion(i, j)), (i, j)
    two = (1, 1)  # 1 + q
    assert two in [tuple(int(c) for c in f.coeffs) for f in C.torsion(1, 4)]


@criterion(4, "2x2 quantum matrices: q = 1 lifting and dim HH = dim HP")
def test_matrices_deformation():
    H, P = Cohomology(QM.hochschild()), Cohomology(PM.poisson())
    for i, j in H.K.bidegrees(CUTOFF):
        assert H.lifting(i, j), (i, j)
        assert H.dim(i, j) == P.dim(i, j), (i, j)


HP_DIMS = {
    0: {j: 1 - j % 2 for j in range(0, CUTOFF + 1)},
    1: {j: 3 * (1 - j % 2) for j in range(1, CUTOFF + 1)},
    2: dict(zip(range(2, 13), [1, 2, 6, 4, 8, 6, 10, 8, 12, 10, 14])),
    3: dict(zip(range(3, 13), [2, 4, 6, 9, 10, 13, 14, 17, 18, 21])),
    4: dict(zip(range(4, 13), range(1, 10))),
}


@criterion(5, "HP(M) as a k[Delta]-module")
def test_hpm_structure():
    C = Cohomology(PM.poisson(), catalog.grade_weights())
    for i, row in HP_DIMS.items():
        for j, d in row.items():
            if j <= CUTOFF:
                assert C.dim(i, j) == d, (i, j)
    B = PM.bracket
    center = poisson_cochain(B, [("a*d - b*c", "")])
    gens = catalog.hpm_generators(CUTOFF)
    for i in range(4):
        rep = module_structure_check(C, center, gens[i], CUTOFF)
        assert rep.verdict == "FREE", (i, rep.lines())
    rep = module_structure_check(C, center, gens[4], CUTOFF)
    assert rep.verdict == "TRIVIAL-SUMMAND" and rep.trivial == ["Om_abcd"], rep.lines()
    assert class_reduce(poisson_cochain(B, [("a*d - b*c", "abcd")]), C, 4, 6) == {}
    # degree-4 kernel of d^0: coefficients (-1)^i C(i + j, i) on (ad)^j (bc)^i
    m = dict(C.block_matrices(0, 4))[(0,)]
    rows = [{c: col[r] for c, col in enumerate(m.columns) if r in col} for r in range(len(m.rows))]
    (v,) = nullspace(rows, list(range(len(m.cols))))
    coeff = {word_to_exponent(m.col_keys[c][0], 4)[1]: x for c, x in v.items()}
    lead = coeff[0]
    assert {i: x / lead for i, x in coeff.items()} == {i: (-1) ** i * comb(2, i) for i in range(3)}


SIGNS = {0: 1, 1: -1, 2: 1, 3: -1}


@criterion(6, "differential tables e0-e3 for quantum matrices")
def test_differential_tables():
    K = QM.hochschild()
    A, D = QM.algebra, QM.dual

    def fword(e):
        i, j, k, l = e
        return (3,) * l + (2,) * k + (1,) * j + (0,) * i

    def el(fe, we, c=1):
        dual = tuple(reversed([g for g in range(4) if we[g]]))
        return {(lw, mw): c * x * y for lw, x in A.nf_word(fword(fe)).items() for mw, y in D.nf_word(dual).items()}

    checked = 0
    for w in TABLES:
        s = SIGNS[sum(w)]
        for f in product(range(5), repeat=4):
            if sum(f) > 4:
                continue
            tab: dict = {}
            for (fe, we), c in table_image(f, w).items():
                for k, x in el(fe, we, c).items():
                    tc.add(tab, k, s * x)
            assert K.apply(el(f, w)) == tab, (w, f)
            checked += 1
    assert checked == len(TABLES) * 70
    P = PM.poisson()
    for i, j in K.bidegrees(8):
        assert K.matrix(i, j).at_q1().same_map(P.matrix(i, j)), (i, j)


@criterion(7, "property suite")
def test_property_suite():
    entries = [catalog.get(n) for n in catalog.CATALOG]
    for e in entries:
        assert confluence_check(e.algebra).confluent and confluence_check(e.dual).confluent, e.name
        assert koszul_numerical_check(e.algebra, e.dual, CUTOFF), e.name
        if e.bracket is not None:
            assert jacobi_check(e.bracket)[0], e.name
        for K in [e.hochschild()] + ([e.poisson()] if e.bracket is not None else []):
            C = Cohomology(K)
            for i, j in K.bidegrees(CUTOFF):
                assert C.d_squared_zero(i, j), (e.name, i, j)
            for w in range(-K.top, CUTOFF + 1 - 2 * K.top):
                assert euler_holds_strand(C, w, K.top), (e.name, w)
    assert koszul_numerical_check(PM.enveloping, PM.enveloping_dual, CUTOFF)
    assert koszul_numerical_check(PP.enveloping, PP.enveloping_dual, CUTOFF)
    # he + eh
    for K in (PM.poisson(),):
        for i, j in K.bidegrees(6):
            for key in K.basis(i, j):
                e = word_to_exponent(key[0], 4)
                val = 2 * (e[3] - (3 in key[1]) - e[0] + (0 in key[1]))
                assert tc.he_eh(K, key) == ({key: val} if val else {})
    C = Cohomology(PM.poisson(), catalog.grade_weights())
    for i, j in C.K.bidegrees(CUTOFF):
        for w in C.blocks(i, j):
            if w != (0,):
                assert C.dim(i, j, weight=w) == 0
    for e in (PM, PP):
        for i, j in e.poisson().bidegrees(6):
            assert cce_oracle(e.bracket, i, j) == poisson_differential(e.bracket, i, j)
    rng = random.Random(2024)
    K = QM.hochschild()
    for _ in range(200):
        u, i = tc.random_cochain(K, rng, 5)
        v, _ = tc.random_cochain(K, rng, 5)
        assert tc.derivation_holds(K, u, v, i, "plain")
    assert hilbert_coeffs(QM.algebra, CUTOFF) == [comb(m + 3, 3) for m in range(CUTOFF + 1)]
    assert hilbert_coeffs(PM.enveloping, CUTOFF) == [comb(m + 7, 7) for m in range(CUTOFF + 1)]
    assert hilbert_coeffs(QM.dual, CUTOFF) == [comb(4, m) for m in range(CUTOFF + 1)]
    assert hilbert_coeffs(PM.enveloping_dual, CUTOFF) == [comb(8, m) for m in range(CUTOFF + 1)]


@criterion(8, "P(M) is the q = 1 reduction of the Omega~ table")
def test_q_form_reduction():
    assert relation_span_equal(specialize(catalog.q_enveloping_table(), QQ), PM.enveloping)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider", "-W", "ignore::pytest.PytestAssertRewriteWarning"]))
