"""Exact left-order and partial-order oracles on triangulation groups.

Three backends:

* ZnOrder -- a lexicographic chain of linear functionals with algebraic
  coefficients on Z^n, applied to abelianized words (optionally through a
  projection onto homology coordinates).  Total iff the common kernel is
  trivial, Archimedean iff the first functional alone is injective.
* SurfaceLexOrder -- surface-group orders: a functional on H_1 first,
  then (optionally) a functional on the antisymmetrized degree-2 Magnus
  class modulo the surface relator.  Without the second functional this
  is a partial order whose incomparability classes form a subgroup.
* UserTableOrder -- an explicit finite order for exercising the embedding
  machinery independently of any group theory.

Oracles are immutable after construction; compare() is pure (internal
sign caches only memoize)."""

from __future__ import annotations

import enum
import json
from fractions import Fraction

from .errors import EdgeEquivalentToUnit, OrderError, UnknownWord
from .field import FieldElement, NumberField, _as_fraction, field_lambda6, field_sqrt2
from .words import (
    GeneratorSet,
    Word,
    abelianize,
    fold_profiles,
    magnus_profile,
    pair_indices,
    reduce_mod_relation,
)


class Comparison(enum.Enum):
    LESS = -1
    EQUIVALENT = 0
    GREATER = 1

    def reverse(self):
        return Comparison(-self.value)


LESS = Comparison.LESS
EQUIVALENT = Comparison.EQUIVALENT
GREATER = Comparison.GREATER


# ------------------------------------------------------------------ exact
# rational linear algebra (tiny matrices; Fractions throughout)


def rational_rank(rows):
    """Row rank of a matrix of Fractions."""
    m = [list(map(Fraction, r)) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        m[rank] = [x / pv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def rational_nullspace(rows, ncols):
    """Basis of the right nullspace of a Fraction matrix."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots = {}
    rank = 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        m[rank] = [x / pv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        pivots[col] = rank
        rank += 1
    basis = []
    free = [c for c in range(ncols) if c not in pivots]
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for pc, prow in pivots.items():
            vec[pc] = -m[prow][fc]
        basis.append(vec)
    return basis


def primitive_integer_vector(vec):
    """Scale a rational vector to a primitive integer vector with positive
    leading nonzero entry."""
    from math import gcd

    denoms = [f.denominator for f in vec]
    lcm = 1
    for d in denoms:
        lcm = lcm * d // gcd(lcm, d)
    ints = [int(f * lcm) for f in vec]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 0)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)


# ------------------------------------------------------------ functionals


class FunctionalChain:
    """Ordered list of nonzero linear functionals on Z^n with coefficients
    in a common number field, evaluated lexicographically."""

    def __init__(self, field: NumberField, n: int, functionals):
        self.field = field
        self.n = n
        fs = []
        for coeffs in functionals:
            row = tuple(self._coerce(c) for c in coeffs)
            if len(row) != n:
                raise OrderError("functional length does not match lattice rank")
            if all(e.is_zero() for e in row):
                raise OrderError("functional in a chain must be nonzero")
            fs.append(row)
        if not fs:
            raise OrderError("functional chain is empty")
        self.functionals = tuple(fs)
        self._sign_cache: dict[tuple, tuple] = {}

    def _coerce(self, c) -> FieldElement:
        if isinstance(c, FieldElement):
            if c.field is not self.field:
                raise OrderError("functional coefficient from a different field")
            return c
        return self.field.rational(_as_fraction(c))

    def _coeff_matrix(self, functional):
        """Rows = power-basis coordinates; columns = lattice directions."""
        return [
            [functional[j].coords[i] for j in range(self.n)]
            for i in range(self.field.degree)
        ]

    def lex_signs(self, vec) -> tuple:
        """Signs of all functionals at an integer vector, memoized."""
        vec = tuple(vec)
        cached = self._sign_cache.get(vec)
        if cached is not None:
            return cached
        signs = []
        for f in self.functionals:
            acc = self.field.zero
            for c, x in zip(f, vec):
                if x:
                    acc = acc + c * x
            signs.append(acc.sign())
        out = tuple(signs)
        self._sign_cache[vec] = out
        return out

    def compare_vectors(self, u, v) -> Comparison:
        delta = tuple(a - b for a, b in zip(u, v))
        for s in self.lex_signs(delta):
            if s:
                return GREATER if s > 0 else LESS
        return EQUIVALENT

    def is_total(self) -> bool:
        rows = []
        for f in self.functionals:
            rows.extend(self._coeff_matrix(f))
        return rational_rank(rows) == self.n

    def first_functional_kernel(self):
        """Basis of the rational kernel of the leading functional on Q^n."""
        return rational_nullspace(self._coeff_matrix(self.functionals[0]), self.n)


def is_archimedean(chain: FunctionalChain) -> bool:
    """True iff the leading functional alone is injective on Z^n.

    Requires the chain to define a total order; otherwise reports the
    partial-order status by raising OrderError."""
    if not chain.is_total():
        raise OrderError("chain is not total: common kernel is nontrivial (partial order)")
    return not chain.first_functional_kernel()


def kernel_generator(chain: FunctionalChain):
    """Primitive generator of the leading functional's kernel on Z^2, or
    None when the functional is injective."""
    if chain.n != 2:
        raise OrderError("kernel_generator is defined for rank-2 chains")
    basis = chain.first_functional_kernel()
    if not basis:
        return None
    return primitive_integer_vector(basis[0])


# ---------------------------------------------------------------- oracles


class OrderOracle:
    """Common interface: compare(u, v) on Words over `gens`."""

    gens: GeneratorSet

    def compare(self, u: Word, v: Word) -> Comparison:
        raise NotImplementedError

    def sign(self, w: Word) -> Comparison:
        """Position of w relative to the identity."""
        return self.compare(w, Word())

    def is_partial(self) -> bool:
        return False

    def describe(self) -> dict:
        raise NotImplementedError


class ZnOrder(OrderOracle):
    """Functional-chain order on the abelianization of words.

    `projection`, when given, is an integer matrix sending the exponent
    vector over `gens` to lattice coordinates in Z^chain.n (the homology
    projection of a complex).  The order is bi-invariant: it depends only
    on the abelianization difference."""

    def __init__(self, chain: FunctionalChain, gens: GeneratorSet | None = None, projection=None):
        if gens is None:
            gens = GeneratorSet([f"x{i}" for i in range(chain.n)])
        self.chain = chain
        self.gens = gens
        if projection is None:
            if gens.rank != chain.n:
                raise OrderError("rank mismatch between generators and chain")
            projection = tuple(
                tuple(1 if i == j else 0 for j in range(gens.rank)) for i in range(chain.n)
            )
        self.projection = tuple(tuple(int(x) for x in row) for row in projection)
        if len(self.projection) != chain.n or any(len(r) != gens.rank for r in self.projection):
            raise OrderError("projection shape mismatch")
        self._ab_cache: dict[Word, tuple] = {}

    def lattice_vector(self, w: Word) -> tuple:
        got = self._ab_cache.get(w)
        if got is None:
            ab = abelianize(w, self.gens.rank)
            got = tuple(sum(r[j] * ab[j] for j in range(self.gens.rank)) for r in self.projection)
            self._ab_cache[w] = got
        return got

    def compare(self, u: Word, v: Word) -> Comparison:
        return self.chain.compare_vectors(self.lattice_vector(u), self.lattice_vector(v))

    def is_partial(self) -> bool:
        return not self.chain.is_total()

    def describe(self) -> dict:
        d = {
            "backend": "zn",
            "rank": self.chain.n,
            "functionals": len(self.chain.functionals),
            "total": self.chain.is_total(),
        }
        if d["total"]:
            d["archimedean"] = is_archimedean(self.chain)
            if self.chain.n == 2:
                k = kernel_generator(self.chain)
                d["kernel_generator"] = list(k) if k else None
        return d


class SurfaceLexOrder(OrderOracle):
    """Lexicographic order on a surface group: H_1 functional first, then
    a functional on the degree-2 class mod the relator vector.

    Words are over edge generators; `rewrite_profiles` gives each edge
    letter's Magnus profile over the `core_rank` standard generators.
    With no depth-2 functional the oracle is the partial order induced by
    the H_1 functional alone (incomparability = same functional value)."""

    def __init__(
        self,
        gens: GeneratorSet,
        core_rank: int,
        rewrite_profiles,
        h1_functional,
        depth2_functional=None,
        relator_pairs=None,
        field: NumberField | None = None,
    ):
        self.gens = gens
        self.core_rank = core_rank
        if len(rewrite_profiles) != gens.rank:
            raise OrderError("one rewrite profile per edge generator is required")
        self._letter_profiles = []
        for eps, mu in rewrite_profiles:
            eps = tuple(int(x) for x in eps)
            mu = tuple(tuple(int(x) for x in row) for row in mu)
            if len(eps) != core_rank or len(mu) != core_rank:
                raise OrderError("rewrite profile has wrong rank")
            self._letter_profiles.append((eps, mu))
        self.field = field or field_lambda6()
        self.h1 = FunctionalChain(self.field, core_rank, [h1_functional])
        self.pairs = pair_indices(core_rank)
        self.relator_pairs = tuple(int(x) for x in relator_pairs) if relator_pairs is not None else None
        if depth2_functional is not None:
            if not self._h1_injective():
                raise OrderError(
                    "depth-2 refinement requires an injective H1 functional, "
                    "otherwise incomparability is not an equivalence relation"
                )
            self.depth2 = FunctionalChain(self.field, len(self.pairs), [depth2_functional])
        else:
            self.depth2 = None
        self._profile_cache: dict[Word, tuple] = {}

    def _h1_injective(self) -> bool:
        return not self.h1.first_functional_kernel()

    def profile(self, w: Word):
        """Magnus profile of the rewritten word over the core generators."""
        got = self._profile_cache.get(w)
        if got is not None:
            return got
        n = self.core_rank
        eps = [0] * n
        mu = [[0] * n for _ in range(n)]
        for g, s in w.letters:
            if g >= self.gens.rank:
                raise OrderError(f"generator index {g} outside rank {self.gens.rank}")
            le, lm = self._letter_profiles[g]
            if s < 0:
                # profile of the inverse letter
                le, lm = (
                    tuple(-x for x in le),
                    tuple(tuple(-lm[i][j] + le[i] * le[j] for j in range(n)) for i in range(n)),
                )
            for i in range(n):
                e = eps[i]
                if e:
                    row = mu[i]
                    for j in range(n):
                        if le[j]:
                            row[j] += e * le[j]
            for i in range(n):
                if any(lm[i]):
                    row = mu[i]
                    for j in range(n):
                        row[j] += lm[i][j]
            for i in range(n):
                eps[i] += le[i]
        got = (tuple(eps), tuple(tuple(r) for r in mu))
        if len(w) <= 4096:
            self._profile_cache[w] = got
        return got

    def degree2_pairs(self, w: Word):
        """Reduced pair vector of a word with zero core abelianization."""
        eps, mu = self.profile(w)
        if any(eps):
            raise OrderError("degree-2 class requires zero abelianization")
        vec = tuple(mu[i][j] for i, j in self.pairs)
        return reduce_mod_relation(vec, self.relator_pairs)

    def compare(self, u: Word, v: Word) -> Comparison:
        eu, mu_u = self.profile(u)
        ev, mu_v = self.profile(v)
        c = self.h1.compare_vectors(eu, ev)
        if c is not EQUIVALENT:
            return c
        if self.depth2 is None:
            return EQUIVALENT
        # Injective H1 functional: a tie means equal abelianizations, so
        # mu(u v^-1) = mu(u) - mu(v) entrywise.
        assert eu == ev
        diff = tuple(mu_u[i][j] - mu_v[i][j] for i, j in self.pairs)
        reduced = reduce_mod_relation(diff, self.relator_pairs)
        for s in self.depth2.lex_signs(reduced):
            if s:
                return GREATER if s > 0 else LESS
        return EQUIVALENT

    def is_partial(self) -> bool:
        return True  # depth > 2 ties are reported Equivalent

    def describe(self) -> dict:
        return {
            "backend": "surface_lex",
            "edge_generators": self.gens.names,
            "core_rank": self.core_rank,
            "h1_injective": self._h1_injective(),
            "depth2": self.depth2 is not None,
            "relator_pairs": list(self.relator_pairs) if self.relator_pairs else None,
        }


class UserTableOrder(OrderOracle):
    """Explicit order on a finite set of formal words, listed increasing.

    For testing the embedding machinery; there is no group law, so words
    are compared by literal (reduced) identity."""

    def __init__(self, gens: GeneratorSet, words_increasing):
        self.gens = gens
        self._rank_of: dict[Word, int] = {}
        for k, w in enumerate(words_increasing):
            if not isinstance(w, Word):
                raise OrderError("UserTableOrder expects Word values")
            if w in self._rank_of:
                raise OrderError("duplicate word in table order")
            self._rank_of[w] = k
        if not self._rank_of:
            raise OrderError("table order is empty")

    def compare(self, u: Word, v: Word) -> Comparison:
        try:
            ru, rv = self._rank_of[u], self._rank_of[v]
        except KeyError as e:
            raise UnknownWord(f"word not in table order: {e.args[0]!r}") from None
        if ru < rv:
            return LESS
        if ru > rv:
            return GREATER
        return EQUIVALENT

    def describe(self) -> dict:
        return {"backend": "table", "size": len(self._rank_of)}


def check_edges_positive_or_flip(oracle: OrderOracle, edge_words, names=None):
    """Sign of each edge word against the identity: +1 Greater, -1 Less.

    Raises EdgeEquivalentToUnit when an edge is incomparable with the
    unit, the admissibility obstruction for partial orders."""
    signs = []
    for k, w in enumerate(edge_words):
        c = oracle.sign(w)
        if c is EQUIVALENT:
            raise EdgeEquivalentToUnit(names[k] if names else k)
        signs.append(1 if c is GREATER else -1)
    return signs


# ------------------------------------------------------------- JSON specs


_FIELDS = {"sqrt2": field_sqrt2, "lambda6": field_lambda6}


def _field_from_spec(spec) -> NumberField:
    if spec is None:
        return field_lambda6()
    if isinstance(spec, str):
        try:
            return _FIELDS[spec]()
        except KeyError:
            raise OrderError(f"unknown named field {spec!r}") from None
    return NumberField(
        spec.get("name", "custom"), spec["poly"], tuple(spec["root_interval"])
    )


def _coeff(field: NumberField, c):
    """A coefficient is a rational or {"coords": [...]} in the power basis."""
    if isinstance(c, dict):
        return field.element([_as_fraction(x) for x in c["coords"]])
    return field.rational(_as_fraction(c))


def order_from_spec(spec: dict, gens: GeneratorSet | None = None, projection=None,
                    rewrite_profiles=None, core_rank=None, relator_pairs=None):
    """Build an oracle from a JSON-style dict.

    For zn backends, `gens`/`projection` bind the oracle to a complex's
    edge generators; for surface_lex the caller must supply the rewriting
    data derived from the complex (or embed it in the spec)."""
    backend = spec.get("backend")
    field = _field_from_spec(spec.get("field"))
    if backend == "zn":
        n = int(spec["rank"])
        chain = FunctionalChain(
            field, n, [[_coeff(field, c) for c in f] for f in spec["chain"]]
        )
        return ZnOrder(chain, gens=gens, projection=projection)
    if backend == "surface_lex":
        if rewrite_profiles is None or core_rank is None:
            raise OrderError("surface_lex oracle needs rewriting data from a complex")
        h1 = [_coeff(field, c) for c in spec["h1_functional"]]
        d2 = spec.get("depth2_functional")
        if d2 is not None:
            d2 = [_coeff(field, c) for c in d2]
        return SurfaceLexOrder(
            gens=gens,
            core_rank=core_rank,
            rewrite_profiles=rewrite_profiles,
            h1_functional=h1,
            depth2_functional=d2,
            relator_pairs=relator_pairs,
            field=field,
        )
    if backend == "table":
        if gens is None:
            raise OrderError("table oracle needs a generator set")
        from .words import parse_word

        return UserTableOrder(gens, [parse_word(t, gens) for t in spec["words"]])
    raise OrderError(f"unknown order backend {backend!r}")


def load_order_file(path, **kwargs):
    with open(path) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as e:
            from .errors import ParseError

            raise ParseError(f"invalid order JSON: {e}") from None
    return order_from_spec(spec, **kwargs)
