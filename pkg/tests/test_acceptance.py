"""Acceptance criteria 1-9. Each criterion records a PASS/FAIL line, printed in the
terminal summary by conftest.py."""

import contextlib
import itertools
import random
import time
from fractions import Fraction as F

import pytest

from negadep import counting, lemmas
from negadep.boxes import BoxInterval, decompose
from negadep.dependence import (
    H_empirical,
    H_psi,
    H_unanchored,
    random_boxes,
    shift_example,
    shift_example_box,
    shift_example_points,
    variance_compare,
)
from negadep.gfnet import faure_net, verify_tms_net

from oracles import elementary_counts, faure_values, volume_vector_cells

NETS = [(2, 2, 4), (3, 2, 3), (3, 3, 3), (5, 2, 3), (5, 4, 2)]

RESULTS: dict[str, tuple[str, str]] = {}


@contextlib.contextmanager
def criterion(key: str, title: str):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        RESULTS[key] = ("FAIL", f"{title} ({type(exc).__name__}: {str(exc).splitlines()[0][:120] if str(exc) else ''})")
        raise
    RESULTS[key] = ("PASS", f"{title} ({time.perf_counter() - t0:.1f}s)")


def test_criterion_1_net_validity():
    with criterion("1", "Faure nets pass the exhaustive elementary-interval check in < 10 s"):
        t0 = time.perf_counter()
        for net in NETS:
            assert verify_tms_net(faure_net(*net)), net
        assert time.perf_counter() - t0 < 10
        # the verifier itself against an independent count on the smallest nets
        for b, s, m in [(2, 2, 4), (3, 2, 3)]:
            pts = faure_values(b, s, m)
            for k in itertools.product(range(m + 1), repeat=s):
                if sum(k) <= m:
                    counts = elementary_counts(pts, b, k)
                    assert len(counts) == b ** sum(k)
                    assert set(counts.values()) == {b ** (m - sum(k))}


def test_criterion_2_counting_closed_forms():
    with criterion("2", "m_b(k) = max(b^(m-|k|)-1, 0) at every reference point, k <= m+2"):
        for b, s, m in NETS:
            ps = faure_net(b, s, m)
            for k in itertools.product(range(m + 3), repeat=s):
                want = max(b ** (m - sum(k)) - 1, 0)
                assert counting.m_b_all_refs(k, ps) == [want] * ps.n, (b, s, m, k)


@pytest.mark.parametrize("net", NETS)
def test_criterion_3_scrambled_boxes_exact(net):
    title = "H(A) <= Vol(A)^2 exactly on 1000 random unanchored boxes per net, < 5 min each"
    with criterion(f"3 {net}", title):
        ps = faure_net(*net)
        t0 = time.perf_counter()
        family = random_boxes(ps.b, ps.s, ps.m + 2, 1000, seed=sum(net))
        assert sum(any(f.a > 0 for f in box.factors) for box in family) > 900
        worst = max(H_unanchored(box, ps) - box.volume**2 for box in family)
        assert worst <= 0
        assert time.perf_counter() - t0 < 300


def test_criterion_4_mtilde_grid():
    with criterion("4", "m-tilde <= 1 for every J, |k| <= m+2, |d|_J <= m+2"):
        for net in NETS:
            ps = faure_net(*net)
            for J in counting.subsets(range(ps.s)):
                best, where = counting.m_tilde_grid_max(ps, ps.m + 2, ps.m + 2, J)
                assert best <= 1, (net, J, where, best)


def test_criterion_5_decomposition():
    with criterion("5", "decompositions: nonnegative, total Vol(AxA), volume vector matches pair oracle"):
        rnd = random.Random(5)
        for b, pmax in ((2, 6), (3, 4), (5, 3)):
            for _ in range(1000):
                p = rnd.randint(1, pmax)
                lo, hi = sorted(rnd.sample(range(b**p + 1), 2))
                iv = BoxInterval(F(lo, b**p), F(hi, b**p), b)
                dc = decompose(iv)
                assert dc.nonnegative(), iv
                assert dc.total() == (iv.A - iv.a) ** 2, iv
                rec = dc.reconstruct()
                # the oracle is geometric past depth p, so p+3 entries cover prefix and tail
                upto = max(rec.q, p) + 3
                assert rec.entries(upto) == volume_vector_cells(iv.a, iv.A, b, upto, p), iv


def test_criterion_6_shift_example():
    with criterion("6", "shift example: 1/450 > 1/625 exactly, R = 1e6 estimates agree, < 1 min"):
        t0 = time.perf_counter()
        ex = shift_example()
        assert ex.h_shift == F(1, 450)
        assert ex.vol2 == F(1, 625)
        assert ex.h_shift > ex.vol2
        ps, A = shift_example_points(), shift_example_box()
        sh = H_empirical(A, ps, "shift", 1_000_000, 6)
        assert abs(sh.estimate - 1 / 450) <= 3 * sh.se
        sc = H_empirical(A, ps, "scramble", 1_000_000, 6)
        assert sc.estimate <= 1 / 625 + 3 * sc.se
        assert time.perf_counter() - t0 < 60


def test_criterion_7_variance():
    with criterion("7", "Var <= mu(1-mu)/n exactly on 50 boxes; R = 1e4 empirical within 4 SE"):
        ps = faure_net(3, 3, 2)
        for i, box in enumerate(random_boxes(3, 3, 3, 50, seed=7)):
            rep = variance_compare(box, ps, "scramble", 10_000, 100 + i)
            n, mu = ps.n, rep.mu
            assert rep.var_exact == mu * (1 - mu) / n + (rep.H - mu * mu) * (n - 1) / n
            assert rep.var_exact <= mu * (1 - mu) / n
            assert abs(rep.var_emp - float(rep.var_exact)) <= 4 * rep.var_emp_se + 1e-15


def _cert_summary(certs):
    return "; ".join(f"{c.lemma}: {c.failure_count} failures" for c in certs if not c.passed)


@pytest.fixture(scope="module")
def default_certificates():
    t0 = time.perf_counter()
    certs = {c.lemma: c for c in lemmas.run_all(lemmas.GridSpec())}
    return certs, time.perf_counter() - t0


def test_criterion_8_certificates(default_certificates):
    certs, elapsed = default_certificates
    with criterion("8", f"inequality certificates pass on default grids, < 15 min (grid run {elapsed:.0f}s)"):
        assert all(c.passed for c in certs.values()), _cert_summary(certs.values())
        assert all(not c.failures for c in certs.values())
        g = certs["g_bound"]
        assert g.notes["equality_points_at_2i+1"] > 0
        assert g.tightest["margin"] == 0
        assert certs["identities"].notes["worst_relative_error"] <= 1e-10
        assert elapsed < 900


@pytest.mark.xfail(strict=True, reason="the printed (b-1)/b bound for m < |J| is false; see the decisions ledger")
def test_criterion_8_printed_small_m_bound(default_certificates):
    certs, _ = default_certificates
    printed = certs["G_propositions"].notes["small_m_printed_bound"]
    with criterion("8 (printed (b-1)/b bound for m < |J|)", f"G <= (b-1)/b for m < |J|: {printed['violations']} of {printed['checked']} points violate it"):
        assert printed["violations"] == 0


def test_criterion_9_cross_route():
    with criterion("9", "H via m-tilde route equals H via psi route, b <= 3, m <= 3, s <= 3"):
        for b in (2, 3):
            for s in range(1, min(b, 3) + 1):
                for m in range(1, 4):
                    ps = faure_net(b, s, m)
                    for box in random_boxes(b, s, m + 1, 60, seed=b * 100 + s * 10 + m):
                        assert H_unanchored(box, ps) == H_psi(box, ps), (b, s, m, box)
