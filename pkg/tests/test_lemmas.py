import json
import math
import random
from dataclasses import replace
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from negadep import lemmas
from negadep.errors import BadIndices
from negadep.gfnet import faure_net
from negadep.lemmas import (
    G_eval,
    G_table,
    GridSpec,
    Q_bound,
    Q_value,
    R_value,
    admissible_A,
    admissible_X,
    h_g_eval,
    mtilde_closed,
    ostrowski_sides,
    small_m_bound,
    random_staircase_matrix,
    random_weight_matrix,
    full_J_G_formula,
    weighted_sum,
)

from oracles import Q_direct

QUICK = GridSpec.quick()
SMALL_NETS = [(2, 2, 3), (3, 2, 2), (3, 3, 2)]


def test_g_examples():
    for b in (2, 3, 7):
        for j in range(1, 5):
            for i in range(j):
                assert h_g_eval(j, i, 2 * i, b)[1] == 0
                assert h_g_eval(j, i, 2 * i + 1, b)[1] == F(b, b - 1) ** (j - i - 1)
                assert h_g_eval(j, i, i + j + 3, b)[1] == 1
    # odd l strictly inside the range uses 1 + h
    assert h_g_eval(4, 0, 3, 3)[1] == 1 + F(3, 16)
    assert h_g_eval(4, 0, 2, 3)[1] == 1


def test_g_rejects_bad_indices():
    with pytest.raises(BadIndices):
        h_g_eval(2, 2, 3, 3)
    with pytest.raises(BadIndices):
        h_g_eval(2, 0, 3, 1)
    with pytest.raises(BadIndices):
        G_eval(3, 2, set(), (0, 0), (0, 0), 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.data())
def test_g_loose_bound(b, data):
    # the bound is stated for |J| <= b; b = 2, j = 4, l = 3 already breaks it
    j = data.draw(st.integers(1, b))
    i = data.draw(st.integers(0, j - 1))
    if 2 * i + 1 >= i + j:
        return
    l = data.draw(st.integers(2 * i + 1, i + j - 1))
    assert h_g_eval(j, i, l, b)[1] <= F(b, b - 1) ** (i + j - l)


def test_Q_examples():
    for b in range(2, 9):
        for s in range(2, b + 1):
            assert Q_value(b, 1, s) == Q_direct(b, 1, s) == b - 1
            assert Q_value(b, 0, s) == 0
            for k in range(s):
                assert Q_value(b, k, s) == Q_direct(b, k, s)
                assert Q_value(b, k, s) <= Q_bound(b, k, s)


def test_G_at_full_k_zero():
    for b in (2, 3, 5):
        for j in range(1, min(b, 4) + 1):
            assert G_eval(2 * j - 1, j, range(j), (0,) * j, (0,) * j, b) == 2**j - 1


def test_G_table_matches_direct_sum():
    KJ = np.array([[0, 0], [1, 0], [2, 3]])
    tab = G_table(3, 2, KJ, 9)
    for r, row in enumerate(KJ):
        for mp in range(10):
            assert F(int(tab[r, mp]), 4) == G_eval(mp, 2, {0, 1}, tuple(int(x) for x in row), (0, 0), 3)


def test_R_closed_forms():
    for b in range(2, 20):
        assert R_value(b, 2) == F(1, 4) * F(b, b - 1) ** 2
        assert R_value(b, 3) == F(1, 8) * F(b, b - 1) ** 3
        for s in range(2, b + 1):
            assert R_value(b, s) <= 1


def test_printed_small_m_bound_fails():
    # b = 2, |J| = 2, k = 0, m = 1: only I = {} contributes, with g_{2,0}(1) = b/(b-1) = 2
    G = G_eval(1, 2, {0, 1}, (0, 0), (0, 0), 2)
    assert G == 2
    assert G > F(1, 2)
    assert G <= small_m_bound(2, 2)


def test_full_J_G_formula_and_printed_exponent():
    for b in (3, 5, 7):
        for s in range(3, min(b, 5) + 1):
            for m in range(1, 2 * s - 2, 2):
                assert full_J_G_formula(m, s, b) == G_eval(m, s, range(s), (0,) * s, (0,) * s, b)
    b, s, m = 5, 5, 5
    assert full_J_G_formula(m, s, b, printed_exponent=True) != full_J_G_formula(m, s, b)


def test_mtilde_closed_form_depends_on_x_only():
    for b in (2, 3):
        for kJ in [(0,), (1, 0), (0, 2, 1)]:
            for x in range(1, 6):
                base = mtilde_closed(x, kJ, b)
                assert base <= 1
                # a larger m with the same x only rescales by b^m/(b^m-1)
                m = x + 2
                want = base * F(b**m, b**m - 1) / F(b**x, b**x - 1)
                assert mtilde_closed(x, kJ, b, m=m) == want


def test_weighted_sum_generators():
    bad = [[F(1), F(1), F(1)], [F(2), F(2), F(0)]]
    assert not admissible_X(bad)
    rnd = random.Random(5)
    for _ in range(50):
        w = rnd.randint(2, 5)
        l = rnd.randint(w, 7)
        A, X = random_weight_matrix(w, l, rnd), random_staircase_matrix(w, l, rnd)
        assert admissible_A(A) and admissible_X(X)
        assert weighted_sum(A, X) <= sum(X[0])


def test_identity_examples():
    a, c = 2, 5
    assert sum(math.comb(c, j) * (-1) ** j for j in range(a + 1)) == math.comb(c - 1, a) * (-1) ** a == 6
    lhs, rhs = ostrowski_sides(2, 5, 0.5)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_grid_parse():
    assert GridSpec.parse(None) == GridSpec()
    assert GridSpec.parse("quick") == QUICK
    g = GridSpec.parse("quick,bases=2:3,k_max=2")
    assert g.bases == (2, 3) and g.k_max == 2 and g.J_max == QUICK.J_max
    for text in ("nope=1", "k_max=", "mode=sideways"):
        with pytest.raises(ValueError):
            GridSpec.parse(text)


@pytest.mark.parametrize("name", ["g_bound", "Q", "identities", "weighted_sums", "vol"])
def test_cheap_certificates_pass(name):
    cert = lemmas.run_lemma(name, QUICK)
    assert cert.passed, cert.failures[:3]
    assert cert.checked > 0


def test_g_bound_equality_at_lowest_odd_argument():
    cert = lemmas.check_g_bound(QUICK)
    assert cert.notes["equality_points_at_2i+1"] > 0


def test_mtilde_and_psi_certificates_on_small_nets():
    nets = [faure_net(*n) for n in SMALL_NETS]
    m = lemmas.check_Mtilde(nets, QUICK)
    p = lemmas.check_psi_bound(nets, QUICK)
    assert m.passed, m.failures[:3]
    assert p.passed, p.failures[:3]
    assert p.notes["equality_points"] > 0


def test_G_propositions_quick():
    cert = lemmas.check_G_propositions(replace(QUICK, bases=(2, 3)))
    assert cert.passed, cert.failures[:3]
    printed = cert.notes["small_m_printed_bound"]
    assert printed["violations"] > 0
    assert printed["first"]["b"] == 2


def test_volcondprob_small():
    cert = lemmas.check_volcondprob([faure_net(3, 2, 2)], trials=40, replicates=800, n_points=5000)
    assert cert.passed, cert.failures[:3]


def test_certificate_json_shape():
    cert = lemmas.run_lemma("Q", QUICK)
    data = json.loads(json.dumps(cert.to_json()))
    assert set(data) == {"lemma", "kind", "passed", "grid", "checked", "failure_count", "failures", "tightest", "notes"}
    assert data["passed"] is True
    assert data["grid"]["spec"]["bases"] == list(QUICK.bases)


def test_unknown_lemma():
    with pytest.raises(ValueError):
        lemmas.run_lemma("nonsense", QUICK)

