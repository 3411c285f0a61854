import math
import random
from fractions import Fraction

import pytest

from loft.bundled import bundled_complex
from loft.embed import extend_action
from loft.errors import EdgeEquivalentToUnit, TraceError
from loft.field import field_sqrt2
from loft.floation2 import (
    CLOSED_CANDIDATE,
    HIT_BOUNDARY,
    OPEN,
    ClosedLeafCertificate,
    LiftedBall,
    NoneFound,
    build_ball,
    detect_closed_leaf,
    holonomy_check,
    lazy_ball,
    trace_leaf,
)
from loft.orders import FunctionalChain, ZnOrder, is_archimedean, kernel_generator
from loft.bind import oracle_for_complex
from loft.words import Word, generator

from tests_support import (
    LEX_YX_SPEC,
    OCT8_LEX_SPEC,
    SQRT2_SPEC,
    lex_torus_oracle,
    oct8_surface_oracle,
    sqrt2_torus_oracle,
)


@pytest.fixture(scope="module")
def tor2():
    return bundled_complex("TOR2")


@pytest.fixture(scope="module")
def oct8():
    return bundled_complex("OCT8")


# --------------------------------------------------------------- the ball


def test_functional_ball_corner_values(tor2):
    oracle = sqrt2_torus_oracle(tor2)
    ball = lazy_ball(tor2, oracle, mode="functional")
    lt0 = ball.base_lift(0)  # corners e, a, ab
    vals = [float(v) for v in lt0.values]
    assert vals[0] == 0.0
    assert math.isclose(vals[1], 1.0)
    assert math.isclose(vals[2], 1.0 + math.sqrt(2))
    lt1 = ball.base_lift(1)  # corners e, b, ba
    vals1 = [float(v) for v in lt1.values]
    assert math.isclose(vals1[1], math.sqrt(2))
    assert math.isclose(vals1[2], 1.0 + math.sqrt(2))


def test_base_corner_is_zero(tor2):
    ball = lazy_ball(tor2, sqrt2_torus_oracle(tor2))
    assert ball.base_lift(0).values[0] == 0


def test_ball_monotone_in_radius(tor2):
    oracle = sqrt2_torus_oracle(tor2)
    b1 = build_ball(tor2, oracle, radius=2)
    b2 = build_ball(tor2, oracle, radius=3)
    keys1 = set(b1.triangles)
    keys2 = set(b2.triangles)
    assert keys1 <= keys2
    for k in keys1:
        assert b1.triangles[k].values == b2.triangles[k].values


def test_ball_requires_admissible_edges(tor2):
    F = field_sqrt2()
    partial = ZnOrder(
        FunctionalChain(F, 2, [[1, 0]]),
        gens=tor2.gens,
        projection=tor2.h1.projection,
    )
    with pytest.raises(EdgeEquivalentToUnit):
        lazy_ball(tor2, partial)


def test_neighbor_consistency(tor2):
    ball = lazy_ball(tor2, sqrt2_torus_oracle(tor2))
    lt = ball.base_lift(0)
    for k in range(3):
        nb = ball.neighbor(lt, k)
        e, tail_idx, head_idx = ball.side_tail(lt, k)
        t2, k2 = tor2.other_slot(lt.tri, k)
        e2, tail2, head2 = ball.side_tail(nb, k2)
        assert e2 == e
        assert nb.values[tail2] == lt.values[tail_idx]
        assert nb.values[head2] == lt.values[head_idx]


# ----------------------------------------------------------------- traces


def test_singular_level_rejected(tor2):
    ball = lazy_ball(tor2, sqrt2_torus_oracle(tor2))
    lt = ball.base_lift(0)
    with pytest.raises(TraceError):
        trace_leaf(ball, (0, lt.values[1]), 10)


def test_trace_crossing_count_and_exactness(tor2):
    ball = lazy_ball(tor2, sqrt2_torus_oracle(tor2))
    trace = trace_leaf(ball, (0, Fraction(1, 3)), 40)
    assert len(trace.forward()) == 40
    assert len(trace.backward()) == 40
    for c in trace.crossings:
        assert 0 < c.parameter < 1
        lo, hi = sorted((c.tail_value, c.head_value))
        assert lo < trace.level < hi


def test_trace_hits_eager_boundary(tor2):
    oracle = sqrt2_torus_oracle(tor2)
    ball = build_ball(tor2, oracle, radius=3)
    trace = trace_leaf(ball, (0, Fraction(1, 3)), 500)
    assert trace.status == HIT_BOUNDARY


def test_deck_equivariance(tor2):
    """Translating the start by g left-multiplies labels and transports the
    level by the extended action."""
    oracle = sqrt2_torus_oracle(tor2)
    ball = lazy_ball(tor2, oracle)
    level = Fraction(1, 3)
    base = trace_leaf(ball, (0, level), 12)
    g = generator(0) * generator(1)  # the element ab
    # transport the level exactly: rho(g) on the current table
    ball.table.ensure(g)
    for w, _v in list(ball.table.entries()):
        ball.table.ensure(g * w)
    moved_level = extend_action(ball.table, g)(level)
    lt_g = ball.lift(0, g)
    moved = trace_leaf(ball, (lt_g.key, moved_level), 12)
    for c0, c1 in zip(base.crossings, moved.crossings):
        assert c0.edge == c1.edge
        assert ball.value_of(g * c0.tail_word) == c1.tail_value


def test_sturmian_crossing_sequence_matches_line_field(tor2):
    """Functional mode on the sqrt2 order: the leaf's crossing sequence
    must match a direct walk of the straight line x + sqrt2*y = level
    through the square-with-diagonal grid (exact sqrt2 arithmetic).

    Grid dictionary: horizontal lines are lifts of edge a, vertical lines
    of edge b, the diagonals x - y = k of edge c."""
    oracle = sqrt2_torus_oracle(tor2)
    ball = lazy_ball(tor2, oracle, mode="functional")
    F = ball._field
    r2 = F.root_power(1)
    n = 60
    trace = trace_leaf(ball, (0, Fraction(1, 3)), n)

    def floor_strict(v):
        """Largest integer strictly below v (exact)."""
        f = math.floor(float(v))
        for cand in (f + 1, f, f - 1):
            if F.rational(cand) < v <= F.rational(cand + 1):
                return cand
        raise AssertionError("float floor out of range")

    def walk(x, y, sign, count):
        """Crossings of the line (x + sign*sqrt2*t, y - sign*t), t > 0."""
        out = []
        while len(out) < count:
            if sign > 0:  # x increases, y decreases, d = x - y increases
                tx = ((-floor_strict(-x)) - x) / r2  # next integer above x
                ty = y - F.rational(floor_strict(y))
                d = x - y
                td = ((-floor_strict(-d)) - d) / (r2 + 1)
            else:  # x decreases, y increases, d decreases
                tx = (x - F.rational(floor_strict(x))) / r2
                ty = (-floor_strict(-y)) - y
                d = x - y
                td = (d - F.rational(floor_strict(d))) / (r2 + 1)
            t, label = min((tx, "b"), (ty, "a"), (td, "c"), key=lambda p: p[0])
            x = x + r2 * t * sign
            y = y - t * sign
            out.append(label)
        return out

    third = F.rational(Fraction(1, 3))
    # the forward ray exits through edge a at (1/3, 0), then walks downward
    expected_fwd = ["a"] + walk(third, F.zero, +1, n - 1)
    expected_bwd = walk(third, F.zero, -1, n)
    got_fwd = [tor2.gens.names[c.edge] for c in trace.forward()]
    got_bwd = [tor2.gens.names[c.edge] for c in trace.backward()]
    assert got_fwd == expected_fwd
    assert got_bwd == expected_bwd

    # aperiodicity: no short period survives along the ray
    for p in range(1, 12):
        assert any(
            got_fwd[i] != got_fwd[i + p] for i in range(len(got_fwd) - p)
        ), f"sequence unexpectedly periodic with period {p}"


def test_wall_uniqueness_runs_clean(tor2, oct8):
    """No WallCrossedTwice across many traces on both surfaces."""
    oracle = sqrt2_torus_oracle(tor2)
    ball = lazy_ball(tor2, oracle)
    rng = random.Random(41)
    for _ in range(30):
        num = rng.randrange(1, 100)
        level = Fraction(num, 301)
        lt = ball.base_lift(rng.randrange(2))
        lo, hi = min(lt.values), max(lt.values)
        lvl = lo + (hi - lo) * Fraction(num, 301)
        if lvl in lt.values:
            continue
        trace_leaf(ball, (lt.tri, lvl), 60)
    o2 = oct8_surface_oracle(oct8)
    ball2 = lazy_ball(oct8, o2)
    for t in range(6):
        lt = ball2.base_lift(t)
        lo, hi = min(lt.values), max(lt.values)
        for num in (1, 2):
            lvl = lo + (hi - lo) * Fraction(num, 3)
            if lvl in lt.values:
                continue
            trace_leaf(ball2, (t, lvl), 40)


# --------------------------------------------------------------- holonomy


def test_holonomy_tor2_all_orders(tor2):
    for oracle in (sqrt2_torus_oracle(tor2), lex_torus_oracle(tor2)):
        ball = lazy_ball(tor2, oracle)
        for t in range(tor2.n_triangles):
            assert holonomy_check(tor2, ball, t, samples=25)


def test_holonomy_oct8(oct8):
    ball = lazy_ball(oct8, oct8_surface_oracle(oct8))
    for t in range(oct8.n_triangles):
        assert holonomy_check(oct8, ball, t, samples=10)


def test_holonomy_detects_corruption(tor2):
    oracle = sqrt2_torus_oracle(tor2)
    ball = lazy_ball(tor2, oracle)
    assert holonomy_check(tor2, ball, 0, samples=10)
    # corrupt one embedded value: order-breaking shift
    k = len(ball.table._values) // 2
    ball.table._values[k] += Fraction(10_000)
    word = ball.table._words[k]
    ball.table._by_word[word] = ball.table._values[k]
    assert holonomy_check(tor2, ball, 0, samples=10) is False


# ------------------------------------------------------------ closed leaves


def test_closed_leaf_lex_order(tor2):
    oracle = lex_torus_oracle(tor2)
    cert = detect_closed_leaf(tor2, oracle)
    assert isinstance(cert, ClosedLeafCertificate)
    assert cert.kernel_check
    assert cert.period_class in ((1, 0), (-1, 0))
    assert kernel_generator(oracle.chain) == (1, 0)


def test_closed_leaf_irrational_none(tor2):
    oracle = sqrt2_torus_oracle(tor2)
    res = detect_closed_leaf(tor2, oracle, max_crossings=160)
    assert isinstance(res, NoneFound)
    assert is_archimedean(oracle.chain)


def test_closed_leaf_diagonal_kernel(tor2):
    spec = {
        "backend": "zn",
        "field": "sqrt2",
        "rank": 2,
        "chain": [[1, 1], [1, 0]],
    }
    oracle = oracle_for_complex(spec, tor2)
    cert = detect_closed_leaf(tor2, oracle)
    assert isinstance(cert, ClosedLeafCertificate)
    assert cert.period_class in ((1, -1), (-1, 1))
    assert cert.kernel_check
