import csv
import io
import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from negadep import counting
from negadep.counting import (
    C_b,
    count_table,
    counting_report,
    m_b,
    m_b_all_refs,
    m_b_general,
    m_b_general_net,
    m_b_net,
    m_tilde,
    mtilde_lemma_case,
    n_b,
    psi_m,
    reference_invariant,
    report_csv,
    subsets,
)
from negadep.dependence import shift_example_points
from negadep.errors import InsufficientDigits
from negadep.gfnet import faure_net
from negadep.randomize import ScrambleSeed, owen_scramble

from oracles import count_common, count_general, faure_values

NET322 = faure_net(3, 2, 2)
NET332 = faure_net(3, 3, 2)


def test_m_b_examples():
    assert m_b((1, 0), NET322) == 2
    assert m_b((2, 1), NET322) == 0
    assert m_b((0, 0), NET322) == 8


@pytest.mark.parametrize("b,s,m", [(2, 2, 3), (3, 2, 2), (3, 3, 2), (5, 2, 2)])
def test_m_b_matches_pair_oracle_and_closed_form(b, s, m):
    ps = faure_net(b, s, m)
    pts = faure_values(b, s, m)
    for k in itertools.product(range(m + 3), repeat=s):
        expect = max(b ** (m - sum(k)) - 1, 0) if sum(k) <= m else 0
        assert m_b(k, ps) == m_b_net(k, b, m) == expect
        assert m_b_all_refs(k, ps) == [count_common(pts, ref, k, b) for ref in range(ps.n)]
    assert reference_invariant(ps, m + 2)


def test_m_b_general_reduces_to_m_b_without_J():
    for k in itertools.product(range(4), repeat=3):
        assert m_b_general(k, (0, 0, 0), 2, set(), set(), NET332) == m_b(k, NET332)


def test_m_b_general_case_i_and_iv_on_faure_332():
    b, m = 3, 2
    # J = {0}, I = {} : I* = {1,2}; needs m >= |k|_{I*} + |d|_J + 1
    assert m_b_general((0, 0, 0), (0, 0, 0), 2, {0}, set(), NET332) == (b - 1) * b ** (m - 1)
    assert m_b_general((0, 1, 0), (1, 0, 0), 2, {0}, set(), NET332) == 0
    assert m_b_general((0, 0, 0), (0, 0, 0), 2, {0}, {0}, NET332) == 0


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.integers(0, 3), min_size=3, max_size=3),
    st.lists(st.integers(0, 3), min_size=3, max_size=3),
    st.sets(st.integers(0, 2)),
    st.integers(0, 2),
    st.data(),
)
def test_m_b_general_matches_oracle_and_closed_form(k, d, J, c, data):
    I = data.draw(st.sets(st.sampled_from(sorted(J)))) if J else set()
    d = [x if j in J else 0 for j, x in enumerate(d)]
    pts = faure_values(3, 3, 2)
    brute = m_b_general(k, d, c, J, I, NET332)
    assert brute == count_general(pts, 0, k, d, c, J, I, 3)
    assert brute == m_b_general_net(k, d, c, J, I, 3, 2)
    case = mtilde_lemma_case(k, d, c, J, I, 3, 2)
    if case.exact:
        assert brute == case.value
    else:
        assert brute <= case.value
    for ref in range(1, NET332.n):
        assert m_b_general(k, d, c, J, I, NET332, ref) == brute


def test_n_b_examples():
    assert n_b((0, 0), NET322) == 4
    assert n_b((3, 2), NET322) == 0
    total = sum(n_b(i, NET322) for i in itertools.product(range(3), repeat=2))
    assert total == NET322.n - 1


def test_n_b_counts_exact_common_digits():
    pts = faure_values(3, 3, 2)
    tab = count_table(NET332)
    for i in itertools.product(range(3), repeat=3):
        expect = sum(1 for l in range(1, 9) if tuple(tab.gammas[0, l]) == i)
        assert n_b(i, NET332) == expect
    assert len(pts) == 9


def test_C_b_examples():
    ps = shift_example_points()
    assert C_b((1, 0), ps) == F(5, 9)
    assert C_b((0, 0, 0), NET332) == 1
    with pytest.raises(ValueError):
        C_b((0, 0), NET332)
    b, m = 3, 2
    for k in itertools.product(range(3), repeat=3):
        if sum(k) <= m:
            value = C_b(k, NET332)
            assert value == F(b ** sum(k) * (b ** (m - sum(k)) - 1), b**m - 1)
            assert value <= 1


def test_psi_examples():
    # gamma >= 2 in coordinate 1 would need two equal coordinates
    assert psi_m((0, 2, 0), (0, 0, 0), {0}, set(), NET332) == 0
    net = faure_net(3, 2, 4)
    b, m = 3, 4
    for k in itertools.product(range(2), repeat=2):
        J = frozenset({0})
        expo = sum(k) + 2 * len(J)
        value = psi_m(k, (0, 0), J, J, net)
        assert value == F(b**expo * (b ** (m - expo) - 1), b**m - 1)


def test_psi_matches_definition_on_faure_332():
    b, n = 3, 9
    J, I = frozenset({0}), frozenset()
    cnt = count_general(faure_values(3, 3, 2), 0, (0, 0, 0), (0, 0, 0), 2, J, I, 3)
    expect = F(b ** (0 + 0 + 1 + 0) * cnt, n - 1) * F(b - 1) ** -1
    assert psi_m((0, 0, 0), (0, 0, 0), J, I, NET332) == expect


def test_m_tilde_without_J_is_C_b():
    for k in itertools.product(range(4), repeat=3):
        assert m_tilde(k, (0, 0, 0), set(), NET332) == C_b(k, NET332)


def test_m_tilde_faure_322_full_J():
    b, n = 3, 9
    pts = faure_values(3, 2, 2)
    J = frozenset({0, 1})
    total = F(0)
    for I in subsets(J):
        cnt = count_general(pts, 0, (0, 0), (0, 0), 2, J, I, b)
        total += F(b ** (len(J) + len(I)) * cnt, n - 1) * F(b - 1) ** (len(I) - len(J))
    value = m_tilde((0, 0), (0, 0), J, NET322)
    assert value == total / 4 == F(9, 32)
    assert value <= 1


@pytest.mark.parametrize("net", [(3, 2, 2), (3, 3, 2), (2, 2, 3)])
def test_m_tilde_at_most_one_on_nets(net):
    ps = faure_net(*net)
    m = ps.m
    for J in subsets(range(ps.s)):
        best, _ = counting.m_tilde_grid_max(ps, m + 2, m + 2, J)
        assert best <= 1


def test_scrambling_leaves_counts_unchanged():
    sc = owen_scramble(NET332, ScrambleSeed(4))
    for k in itertools.product(range(3), repeat=3):
        assert m_b(k, sc) == m_b(k, NET332)


def test_randomized_set_needs_enough_digits():
    sc = owen_scramble(faure_net(3, 2, 2, E=3), ScrambleSeed(1))
    with pytest.raises(InsufficientDigits):
        m_b((4, 0), sc)


def test_report_rows_and_csv():
    rows = counting_report(faure_net(2, 2, 1), kmax=1, dmax=1)
    assert all(r["bound_ok"] for r in rows)
    text = report_csv(rows)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert list(parsed[0]) == list(counting.CSV_COLUMNS)
    assert len(parsed) == len(rows)
    assert parsed[0]["C_b"] == "1/1 (1)"
