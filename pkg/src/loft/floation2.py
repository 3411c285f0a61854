"""Level-set foliations on lifted surface triangulations.

A LiftedBall materializes triangles of the universal cover around the
base vertex.  Cover vertices are identified by their exact embedding
value (the order solves the word problem for us: two labels name the same
cover vertex iff the oracle makes them Equivalent, iff their values
coincide), so lifts are keyed by (base triangle, anchor value).

Leaves are traced combinatorially: inside a lifted triangle the level set
at a nonsingular value is the segment joining the two sides whose corner
values bracket the level.  Wall-crossing uniqueness is enforced exactly:
a leaf meets at most one edge segment of any wall because the level
function is injective on walls, so a repeated (edge class, tail value)
pair along one trace is a hard error."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .embed import EmbeddingTable, PLMap, breadth_first_words, extend_action
from .errors import GuardExceeded, LoftError, OrderError, TraceError, WallCrossedTwice
from .orders import OrderOracle, ZnOrder, check_edges_positive_or_flip
from .words import Word

EAGER_BALL_GUARD = 200_000


@dataclass(frozen=True)
class LiftedTriangle:
    key: tuple  # (base triangle index, anchor value)
    tri: int
    words: tuple  # corner label representatives, anchor first
    values: tuple  # corner values, parallel to words


class LiftedBall:
    """Registry of lifted triangles over a validated Triangulation2.

    mode "embedding": corner values are dyadic minimal-embedding values,
    extended on demand.  mode "functional": corner values are exact field
    values of a single-functional zn order (the projection itself is the
    level function)."""

    def __init__(self, tri, oracle: OrderOracle, mode="embedding", radius=None,
                 table: EmbeddingTable | None = None):
        if tri.dimension != 2:
            raise LoftError("lifted balls are built over surface triangulations")
        self.tri = tri
        self.oracle = oracle
        self.mode = mode
        self.radius = radius
        edge_words = [tri.edge_word(e) for e in range(tri.n_edges)]
        self.flips = check_edges_positive_or_flip(oracle, edge_words, names=tri.gens.names)
        if mode == "embedding":
            self.table = table if table is not None else EmbeddingTable(oracle)
            self.table.ensure(Word())
        elif mode == "functional":
            if not isinstance(oracle, ZnOrder):
                raise OrderError("functional mode needs a zn order oracle")
            if len(oracle.chain.functionals) != 1:
                raise OrderError("functional mode needs a single-functional chain")
            self.table = None
            self._functional = oracle.chain.functionals[0]
            self._field = oracle.chain.field
        else:
            raise LoftError(f"unknown ball mode {mode!r}")
        # prefix words per base triangle: word from corner 0 to corner j
        self._prefixes = []
        for sides in tri.triangles:
            p = [Word()]
            for e, s in sides[:2]:
                p.append(p[-1] * Word(((e, s),)))
            self._prefixes.append(tuple(p))
        self.triangles: dict[tuple, LiftedTriangle] = {}
        self._dist: dict = {}

    # -- values ----------------------------------------------------------

    def value_of(self, w: Word):
        if self.mode == "embedding":
            return self.table.ensure(w)
        vec = self.oracle.lattice_vector(w)
        acc = self._field.zero
        for c, x in zip(self._functional, vec):
            if x:
                acc = acc + c * x
        return acc

    # -- lift materialization ---------------------------------------------

    def lift(self, tri_idx: int, anchor: Word) -> LiftedTriangle:
        """The lift of a base triangle with corner 0 at the given label."""
        pre = self._prefixes[tri_idx]
        words = tuple(anchor * p for p in pre)
        values = tuple(self.value_of(w) for w in words)
        key = (tri_idx, values[0])
        got = self.triangles.get(key)
        if got is not None:
            return got
        if len({values[0], values[1], values[2]}) != 3:
            raise TraceError(
                f"degenerate lift of triangle {tri_idx}: corner values not distinct"
            )
        lt = LiftedTriangle(key=key, tri=tri_idx, words=words, values=values)
        self.triangles[key] = lt
        return lt

    def base_lift(self, tri_idx: int) -> LiftedTriangle:
        return self.lift(tri_idx, Word())

    def get(self, key):
        got = self.triangles.get(key)
        if got is None:
            raise LoftError(f"lifted triangle {key} not materialized")
        return got

    # -- adjacency ---------------------------------------------------------

    def side_tail(self, lt: LiftedTriangle, k: int):
        """Reference-direction tail of the edge lift under side k: corner
        index, word approximation and value."""
        e, s = self.tri.triangles[lt.tri][k]
        tail_idx = k if s == 1 else (k + 1) % 3
        head_idx = (k + 1) % 3 if s == 1 else k
        return e, tail_idx, head_idx

    def neighbor(self, lt: LiftedTriangle, k: int) -> LiftedTriangle | None:
        """Lift glued across side k, or None when an eager radius bound
        cuts it off."""
        e, tail_idx, _ = self.side_tail(lt, k)
        tail_word = lt.words[tail_idx]
        t2, k2 = self.tri.other_slot(lt.tri, k)
        _e2, s2 = self.tri.triangles[t2][k2]
        tail_idx2 = k2 if s2 == 1 else (k2 + 1) % 3
        anchor2 = tail_word * self._prefixes[t2][tail_idx2].inverse()
        if self.radius is not None:
            pre = self._prefixes[t2]
            for p in pre:
                v = self.value_of(anchor2 * p)
                if v not in self._dist:
                    return None
        return self.lift(t2, anchor2)

    # -- eager construction --------------------------------------------------

    def materialize_to_radius(self):
        """Vertex BFS to the radius bound, then all lifted triangles whose
        corners lie within it (word length measured as cover 1-skeleton
        distance from the base vertex)."""
        if self.radius is None:
            raise LoftError("materialize_to_radius needs a finite radius")
        letters = [(g, s) for g in range(self.tri.n_edges) for s in (1, -1)]
        start = Word()
        self._dist = {self.value_of(start): 0}
        frontier = [start]
        reps = {self.value_of(start): start}
        for d in range(1, self.radius + 1):
            nxt = []
            for w in frontier:
                for g, s in letters:
                    w2 = w * Word(((g, s),))
                    v2 = self.value_of(w2)
                    if v2 not in self._dist:
                        self._dist[v2] = d
                        reps[v2] = w2
                        nxt.append(w2)
                        if len(self._dist) > EAGER_BALL_GUARD:
                            raise GuardExceeded(
                                f"eager ball exceeds {EAGER_BALL_GUARD} vertices"
                            )
            frontier = nxt
        queue = [self.base_lift(t) for t in range(self.tri.n_triangles)]
        seen = set(lt.key for lt in queue)
        while queue:
            lt = queue.pop()
            for k in range(3):
                nb = self.neighbor(lt, k)
                if nb is not None and nb.key not in seen:
                    seen.add(nb.key)
                    queue.append(nb)
                    if len(seen) > EAGER_BALL_GUARD:
                        raise GuardExceeded(
                            f"eager ball exceeds {EAGER_BALL_GUARD} triangles"
                        )
        return self


def build_ball(tri, oracle: OrderOracle, radius: int, mode="embedding",
               table=None) -> LiftedBall:
    """Eagerly materialize the ball of lifted triangles whose corner labels
    lie within `radius` of the base vertex."""
    ball = LiftedBall(tri, oracle, mode=mode, radius=radius, table=table)
    return ball.materialize_to_radius()


def lazy_ball(tri, oracle: OrderOracle, mode="embedding", table=None) -> LiftedBall:
    """Unbounded ball extended on demand by traces."""
    return LiftedBall(tri, oracle, mode=mode, radius=None, table=table)


# ------------------------------------------------------------------ traces


@dataclass(frozen=True)
class Crossing:
    edge: int  # edge class index
    tail_word: Word  # lift label: reference-direction tail of the edge lift
    parameter: object  # exact level fraction along the reference direction
    from_key: tuple
    to_key: tuple | None
    exit_side: int  # side index in the from-triangle
    enter_side: int | None  # side index in the to-triangle
    tail_value: object = field(repr=False, default=None)
    head_value: object = field(repr=False, default=None)


OPEN = "Open"
CLOSED_CANDIDATE = "ClosedCandidate"
HIT_BOUNDARY = "HitBallBoundary"


@dataclass
class LeafTrace:
    start_key: tuple
    level: object
    crossings: list  # backward crossings reversed, then forward
    start_index: int  # number of backward crossings
    status_forward: str
    status_backward: str

    @property
    def status(self):
        if CLOSED_CANDIDATE in (self.status_forward, self.status_backward):
            return CLOSED_CANDIDATE
        if HIT_BOUNDARY in (self.status_forward, self.status_backward):
            return HIT_BOUNDARY
        return OPEN

    def forward(self):
        return self.crossings[self.start_index:]

    def backward(self):
        return self.crossings[: self.start_index][::-1]


def _crossed_sides(lt: LiftedTriangle, level):
    out = []
    for k in range(3):
        a = lt.values[k]
        b = lt.values[(k + 1) % 3]
        lo, hi = (a, b) if a < b else (b, a)
        if lo < level < hi:
            out.append(k)
    return out


def _make_crossing(ball: LiftedBall, lt: LiftedTriangle, k: int, level):
    e, tail_idx, head_idx = ball.side_tail(lt, k)
    tv, hv = lt.values[tail_idx], lt.values[head_idx]
    param = (level - tv) / (hv - tv)
    nb = ball.neighbor(lt, k)
    enter = None
    if nb is not None:
        t2, k2 = ball.tri.other_slot(lt.tri, k)
        assert nb.tri == t2
        enter = k2
    return Crossing(
        edge=e,
        tail_word=lt.words[tail_idx],
        parameter=param,
        from_key=lt.key,
        to_key=None if nb is None else nb.key,
        exit_side=k,
        enter_side=enter,
        tail_value=tv,
        head_value=hv,
    ), nb


def _trace_ray(ball: LiftedBall, lt: LiftedTriangle, level, first_side: int,
               max_crossings: int, wall_registry: set, detector=None):
    """Follow one ray of the level set, crossing sides until the cap, the
    ball boundary, or (with a detector) a certified closed leaf."""
    crossings = []
    side = first_side
    status = OPEN
    while len(crossings) < max_crossings:
        crossing, nb = _make_crossing(ball, lt, side, level)
        wall_key = (crossing.edge, crossing.tail_value)
        if wall_key in wall_registry:
            raise WallCrossedTwice(
                f"leaf at level {level} met wall ({ball.tri.gens.names[crossing.edge]}, "
                f"{crossing.tail_value}) twice"
            )
        wall_registry.add(wall_key)
        crossings.append(crossing)
        if nb is None:
            status = HIT_BOUNDARY
            break
        if detector is not None and detector(crossings, lt, nb):
            status = CLOSED_CANDIDATE
            lt = nb
            break
        if any(level == v for v in nb.values):
            raise TraceError(
                "leaf runs into a lifted vertex: the level is singular"
            )
        # continue through the neighbor: exit by the other crossed side
        sides = _crossed_sides(nb, level)
        if crossing.enter_side not in sides:
            raise TraceError("level does not cross the entering side; construction bug")
        nxt = [k for k in sides if k != crossing.enter_side]
        if len(nxt) != 1:
            raise TraceError("level set is not a single segment in a triangle")
        lt, side = nb, nxt[0]
    return crossings, status, lt


def trace_leaf(ball: LiftedBall, start, max_crossings: int,
               bidirectional=True) -> LeafTrace:
    """Trace the leaf through `start` = (lifted triangle key or base
    triangle index, level).

    The level must be strictly between the corner values of the start
    triangle and distinct from all of them (nonsingular leaf).  Crossing
    parameters are exact; wall-crossing uniqueness is asserted across the
    whole trace."""
    spot, level = start
    if isinstance(spot, int):
        lt = ball.base_lift(spot)
    else:
        lt = ball.get(tuple(spot))
    if ball.mode == "embedding":
        level = Fraction(level)
    elif isinstance(level, (int, Fraction)):
        level = ball._field.rational(level)
    if any(level == v for v in lt.values):
        raise TraceError("singular level: equals a corner value")
    if not (min(lt.values) < level < max(lt.values)):
        raise TraceError("level outside the start triangle")
    sides = _crossed_sides(lt, level)
    if len(sides) != 2:
        raise TraceError("nonsingular level must cross exactly two sides")
    registry: set = set()
    fwd, status_f, _ = _trace_ray(ball, lt, level, sides[0], max_crossings, registry)
    if bidirectional:
        bwd, status_b, _ = _trace_ray(ball, lt, level, sides[1], max_crossings, registry)
    else:
        bwd, status_b = [], OPEN
    return LeafTrace(
        start_key=lt.key,
        level=level,
        crossings=bwd[::-1] + fwd,
        start_index=len(bwd),
        status_forward=status_f,
        status_backward=status_b,
    )


# -------------------------------------------------------------- holonomy


def _probe_band(ball: LiftedBall, anchors, lo, hi, want: int, max_len=3,
                budget=6000):
    """Distinct embedded values strictly inside (lo, hi), found by probing
    anchor * z over short words z.  Bounded work: stops once `want` values
    are found or the candidate budget is exhausted."""
    values = []
    seen = set()
    spent = 0
    for length in range(1, max_len + 1):
        for z in breadth_first_words(ball.tri.gens, length):
            for anchor in anchors:
                spent += 1
                v = ball.value_of(anchor * z)
                if lo < v < hi and v not in seen:
                    seen.add(v)
                    values.append(v)
                if len(values) >= want or spent >= budget:
                    return sorted(values)[:want]
    return sorted(values)[:want]


def holonomy_check(tri, ball_or_table, triangle_id: int, samples: int = 100) -> bool:
    """Verify the alternate edge-identification description of the
    foliation on one triangle.

    Orient the lifted triangle by its corner values v_min < v_mid < v_max
    and write alpha (min->mid), beta (mid->max), gamma (min->max) for the
    upward sides, so alpha followed by beta is homotopic to gamma.  In the
    canonical parameterization of each edge (anchored at its top vertex
    by the negated level function), following leaves identifies beta with
    a subinterval of gamma by the identity, and alpha with the remaining
    subinterval via x -> -beta^-1(-x) where beta^-1 acts through the PL
    extension of the embedding.  The check evaluates both descriptions at
    `samples` exact levels per band and compares exactly."""
    if isinstance(ball_or_table, LiftedBall):
        ball = ball_or_table
        if ball.mode != "embedding":
            raise LoftError("holonomy check runs in embedding mode")
    else:
        ball = LiftedBall(tri, ball_or_table.oracle, mode="embedding",
                          table=ball_or_table)
    table = ball.table
    try:
        lt = ball.base_lift(triangle_id)
        order = sorted(range(3), key=lambda j: lt.values[j])
        w_min, w_mid, w_max = (lt.words[j] for j in order)
        v_min, v_mid, v_max = (lt.values[j] for j in order)
        beta = w_mid.inverse() * w_max
        gamma = w_min.inverse() * w_max
        translators = (w_mid.inverse(), w_max.inverse(), beta.inverse())

        i_beta_inv = table.ensure(beta.inverse())
        i_gamma_inv = table.ensure(gamma.inverse())
        ok = i_gamma_inv < i_beta_inv < 0

        # Phase 1: probe the two bands and pre-embed every product the
        # evaluation will need, so the table can then be frozen.
        band_values = []
        for band_lo, band_hi in ((v_min, v_mid), (v_mid, v_max)):
            vals = _probe_band(ball, lt.words, band_lo, band_hi, samples)
            band_values.append(vals)
        needed = set()
        for vals, (band_lo, band_hi) in zip(
            band_values, ((v_min, v_mid), (v_mid, v_max))
        ):
            for v in list(vals) + [band_lo, band_hi]:
                lo_e, hi_e = table.neighbours(v)
                for entry in (lo_e, hi_e):
                    if entry is not None:
                        needed.add(entry[1])
        for h in list(needed):
            for g in translators:
                table.ensure(g * h)

        # Phase 2: frozen evaluation through two independent code paths.
        m_mid = extend_action(table, w_mid.inverse())
        m_max = extend_action(table, w_max.inverse())
        m_binv = extend_action(table, beta.inverse())

        def direct(g: Word, level):
            """Exact value i(g*h) at an embedded level i(h), via lookup."""
            lo_e, _ = table.neighbours(level)
            if lo_e is None or lo_e[0] != level:
                return None
            got = table.lookup(g * lo_e[1])
            if got is None:
                raise LoftError("product missing after saturation")
            return got

        def certified_gap(level):
            """No frozen value inside the level's gap nor inside any of its
            translator image gaps; the affine extensions then compose
            consistently and exactly."""
            lo_e, hi_e = table.neighbours(level)
            if lo_e is None or hi_e is None or lo_e[0] == level:
                return False
            for g in translators:
                y0 = table.lookup(g * lo_e[1])
                y1 = table.lookup(g * hi_e[1])
                if y0 is None or y1 is None:
                    return False
                g_lo, g_hi = table.neighbours((y0 + y1) / 2)
                if g_lo is None or g_hi is None:
                    return False
                if g_lo[0] != y0 or g_hi[0] != y1:
                    return False
            return True

        for band_idx, (band_lo, band_hi) in enumerate(
            ((v_min, v_mid), (v_mid, v_max))
        ):
            levels = list(band_values[band_idx])
            if len(levels) < samples:
                # sparse band: fill with midpoints of certified gaps, where
                # the canonical affine extension is exact
                grid = [band_lo] + levels + [band_hi]
                extra = []
                k = 1
                while len(levels) + len(extra) < samples and k < 64:
                    for a, b in zip(grid, grid[1:]):
                        step = (b - a) / (k + 1)
                        for j in range(k):
                            cand = a + step * (j + 1)
                            if certified_gap(cand):
                                extra.append(cand)
                        if len(levels) + len(extra) >= samples:
                            break
                    k += 1
                levels = sorted(set(levels) | set(extra))[:samples]
            in_beta_band = band_idx == 1
            for level in levels:
                x_gamma = -m_max(level)
                if in_beta_band:
                    # identification of beta into gamma is the identity;
                    # cross-check the PL map against direct products
                    d = direct(w_max.inverse(), level)
                    if d is not None and -d != x_gamma:
                        ok = False
                    if not (0 < x_gamma < -i_beta_inv):
                        ok = False
                else:
                    # alpha into gamma via x -> -beta^-1(-x)
                    x_alpha = -m_mid(level)
                    if x_gamma != -m_binv(-x_alpha):
                        ok = False
                    d = direct(w_mid.inverse(), level)
                    if d is not None and -d != x_alpha:
                        ok = False
                    if not (-i_beta_inv < x_gamma < -i_gamma_inv):
                        ok = False
        return ok
    except LoftError:
        return False


# ---------------------------------------------------------- closed leaves


@dataclass(frozen=True)
class ClosedLeafCertificate:
    period_word: Word
    period_class: tuple  # lattice coordinates of the period
    kernel_check: bool
    crossings_used: int


class NoneFound:
    """No closed leaf detected up to the caps (not a proof by itself; the
    Archimedean test is the exact decision procedure)."""

    def __init__(self, traces: int, max_crossings: int):
        self.traces = traces
        self.max_crossings = max_crossings

    def __repr__(self):
        return f"NoneFound(traces={self.traces}, cap={self.max_crossings})"


def _periodic_suffix(edges, params, min_periods=3):
    """Smallest period p whose class sequence repeats min_periods times at
    the end of `edges` with strictly monotone parameters across periods."""
    n = len(edges)
    for p in range(1, n // min_periods + 1):
        window = edges[n - p:]
        if any(edges[n - (j + 1) * p: n - j * p] != window for j in range(1, min_periods)):
            continue
        mono = True
        for pos in range(p):
            seq = [params[n - (j + 1) * p + pos] for j in range(min_periods)][::-1]
            incr = all(a < b for a, b in zip(seq, seq[1:]))
            decr = all(a > b for a, b in zip(seq, seq[1:]))
            if not (incr or decr):
                mono = False
                break
        if mono:
            return p
    return None


def detect_closed_leaf(tri, oracle: ZnOrder, radius: int = 16,
                       max_crossings: int = 256, min_periods: int = 3):
    """Torus closed-leaf detection with exact certification.

    Traces nonsingular leaves in embedding mode; when the edge-class
    crossing sequence becomes combinatorially periodic with monotone
    contracting parameters, the candidate period translation is verified
    exactly: its abelianization must generate the kernel of the leading
    functional.  A certificate can therefore never be a false positive.
    Returns ClosedLeafCertificate or NoneFound(up to caps)."""
    if not isinstance(oracle, ZnOrder) or oracle.chain.n != 2:
        raise OrderError("closed-leaf detection expects a rank-2 zn order")
    from .orders import kernel_generator

    kgen = kernel_generator(oracle.chain)
    ball = lazy_ball(tri, oracle, mode="embedding")
    traces = 0
    for t in range(tri.n_triangles):
        lt = ball.base_lift(t)
        vs = sorted(lt.values)
        for lo, hi in zip(vs, vs[1:]):
            # denominators divisible by 3 can never collide with the dyadic
            # vertex values, so the level is guaranteed nonsingular
            level = lo + (hi - lo) / 3
            traces += 1
            found = {}

            def detector(crossings, cur, nxt):
                if len(crossings) < 2 * min_periods:
                    return False
                edges = [c.edge for c in crossings]
                params = [c.parameter for c in crossings]
                p = _periodic_suffix(edges, params, min_periods)
                if p is None:
                    return False
                # translate between corresponding lifts one period apart:
                # after crossing k the leaf sits in crossings[k].to_key, so
                # the lift p steps before `nxt` is crossings[-(p+1)].to_key
                if len(crossings) < p + 1:
                    return False
                anchor_now = nxt.words[0]
                prev_key = crossings[-(p + 1)].to_key
                prev = ball.get(prev_key) if prev_key else None
                if prev is None:
                    return False
                period_word = anchor_now * prev.words[0].inverse()
                cls = oracle.lattice_vector(period_word)
                if not any(cls):
                    return False
                if oracle.chain.lex_signs(cls)[0] != 0:
                    return False  # not in the leading kernel: reject candidate
                found["certificate"] = ClosedLeafCertificate(
                    period_word=period_word,
                    period_class=cls,
                    kernel_check=(kgen is not None and (cls == kgen or cls == tuple(-x for x in kgen))),
                    crossings_used=len(crossings),
                )
                return True

            lt_start = ball.get(lt.key)
            sides = _crossed_sides(lt_start, level)
            registry: set = set()
            _crossings, status, _ = _trace_ray(
                ball, lt_start, level, sides[0], max_crossings, registry, detector
            )
            if status == CLOSED_CANDIDATE and "certificate" in found:
                return found["certificate"]
    return NoneFound(traces=traces, max_crossings=max_crossings)
