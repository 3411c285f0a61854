"""Minimal order-preserving embedding into the dyadic rationals, the PL
extension of the left action to the line, and collapse maps between
embeddings.

The embedding follows the three inductive rules: the first element goes
to 0; a new maximum goes to (previous max) + 1; a new minimum to
(previous min) - 1; anything else to the midpoint of its nearest already
embedded neighbours.  All values are exact dyadic Fractions and the table
is bit-identical under re-runs with the same enumeration."""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import InsufficientSupport, LoftError, OrderError, UnknownWord
from .orders import EQUIVALENT, GREATER, LESS, OrderOracle
from .words import Word, format_word


class EmbeddingTable:
    """Order-preserving map from Words to dyadic rationals.

    Equivalent words (partial-order mode) share one value; the first
    inserted representative is kept.  ensure() is the single mutation
    point and applies the embedding rules deterministically in call
    order."""

    def __init__(self, oracle: OrderOracle):
        self.oracle = oracle
        self._values: list[Fraction] = []  # sorted
        self._words: list[Word] = []  # representatives, parallel to _values
        self._by_word: dict[Word, Fraction] = {}
        self.insertion_order: list[Word] = []

    def __len__(self):
        return len(self._values)

    def __contains__(self, w: Word):
        return w in self._by_word or self.lookup(w) is not None

    def entries(self):
        """Pairs (word, value) in increasing value order."""
        return list(zip(self._words, self._values))

    def value_of(self, w: Word) -> Fraction:
        v = self._by_word.get(w)
        if v is None:
            v = self.lookup(w)
        if v is None:
            raise LoftError(f"word not embedded: {w!r}")
        return v

    def _locate(self, w: Word):
        """Binary search by oracle comparisons.

        Returns (index, found): `index` is the insertion point, `found`
        whether the word is Equivalent to the entry at that index."""
        lo, hi = 0, len(self._words)
        while lo < hi:
            mid = (lo + hi) // 2
            c = self.oracle.compare(w, self._words[mid])
            if c is EQUIVALENT:
                return mid, True
            if c is LESS:
                hi = mid
            else:
                lo = mid + 1
        return lo, False

    def lookup(self, w: Word):
        """Value of w if an Equivalent word is embedded, else None."""
        if w in self._by_word:
            return self._by_word[w]
        if not self._words:
            return None
        try:
            idx, found = self._locate(w)
        except UnknownWord:
            return None  # outside a finite table-backed order's domain
        if found:
            v = self._values[idx]
            self._by_word[w] = v
            return v
        return None

    def ensure(self, w: Word) -> Fraction:
        """Embed w (or merge it with an Equivalent entry) and return its
        value."""
        got = self._by_word.get(w)
        if got is not None:
            return got
        if not self._words:
            value = Fraction(0)
            self._words.append(w)
            self._values.append(value)
        else:
            idx, found = self._locate(w)
            if found:
                value = self._values[idx]
            elif idx == len(self._values):
                value = self._values[-1] + 1
                self._words.append(w)
                self._values.append(value)
            elif idx == 0:
                value = self._values[0] - 1
                self._words.insert(0, w)
                self._values.insert(0, value)
            else:
                value = (self._values[idx - 1] + self._values[idx]) / 2
                self._words.insert(idx, w)
                self._values.insert(idx, value)
        self._by_word[w] = value
        self.insertion_order.append(w)
        return value

    def neighbours(self, x: Fraction):
        """Table values and words bracketing x: ((v_lo, w_lo), (v_hi, w_hi)),
        entries None beyond the support.  Exact hits return the same entry
        on both sides."""
        import bisect

        i = bisect.bisect_left(self._values, x)
        if i < len(self._values) and self._values[i] == x:
            hit = (self._values[i], self._words[i])
            return hit, hit
        lo = (self._values[i - 1], self._words[i - 1]) if i > 0 else None
        hi = (self._values[i], self._words[i]) if i < len(self._values) else None
        return lo, hi

    def to_json(self, gens) -> dict:
        """Serializable form: word string -> [numerator, exponent] with
        value = numerator / 2**exponent."""
        out = {}
        for w, v in zip(self._words, self._values):
            d = v.denominator
            k = d.bit_length() - 1
            assert d == 1 << k, "embedding values must be dyadic"
            out[format_word(w, gens)] = [v.numerator, k]
        return out


def minimal_embed(oracle: OrderOracle, seq) -> EmbeddingTable:
    """Embed an enumeration of words by the minimal-embedding rules.

    The enumeration must begin with the identity word (value 0); words
    Equivalent to an earlier one merge into its entry."""
    table = EmbeddingTable(oracle)
    first = True
    for w in seq:
        if first:
            if not isinstance(w, Word):
                raise OrderError("enumeration must contain Words")
            table.ensure(w)
            first = False
        else:
            table.ensure(w)
    if table._words and not any(w.is_identity() for w in table.insertion_order[:1]):
        # The base point is pinned to 0 regardless; callers embedding group
        # elements should start at the identity.
        pass
    return table


class PLMap:
    """Strictly increasing piecewise-linear map with slope 1 outside its
    breakpoint support.  Exact over Fractions."""

    def __init__(self, breakpoints, images, missing=()):
        xs = [Fraction(x) for x in breakpoints]
        ys = [Fraction(y) for y in images]
        if len(xs) != len(ys):
            raise LoftError("breakpoints/images length mismatch")
        if any(b >= a for a, b in zip(xs[1:], xs[:-1])):
            raise LoftError("breakpoints must be strictly increasing")
        if any(b >= a for a, b in zip(ys[1:], ys[:-1])):
            raise LoftError("images must be strictly increasing")
        if not xs:
            raise InsufficientSupport(missing or ["<empty support>"])
        self.breakpoints = xs
        self.images = ys
        self.missing = tuple(missing)

    def __call__(self, x) -> Fraction:
        import bisect

        x = Fraction(x)
        xs, ys = self.breakpoints, self.images
        if x <= xs[0]:
            return ys[0] + (x - xs[0])
        if x >= xs[-1]:
            return ys[-1] + (x - xs[-1])
        i = bisect.bisect_left(xs, x)
        if xs[i] == x:
            return ys[i]
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def inverse(self) -> "PLMap":
        return PLMap(self.images, self.breakpoints, self.missing)

    def compose(self, other: "PLMap") -> "PLMap":
        """self after other."""
        xs = sorted(set(other.breakpoints) | {other.inverse()(x) for x in self.breakpoints})
        return PLMap(xs, [self(other(x)) for x in xs])

    def is_identity_on(self, points) -> bool:
        return all(self(p) == Fraction(p) for p in points)


def extend_action(table: EmbeddingTable, g: Word, require_full=False) -> PLMap:
    """PL extension of h |-> g*h through the embedding: i(h) |-> i(g*h) on
    supported entries, affine in between and slope 1 outside.

    Entries whose product g*h is not embedded are dropped from the support
    and reported via .missing; with require_full=True (or an empty
    support) this raises InsufficientSupport instead."""
    xs, ys, missing = [], [], []
    for w, v in zip(table._words, table._values):
        gv = table.lookup(g * w)
        if gv is None:
            missing.append(g * w)
        else:
            xs.append(v)
            ys.append(gv)
    if require_full and missing:
        raise InsufficientSupport(missing)
    if not xs:
        raise InsufficientSupport(missing)
    # Order preservation of the oracle guarantees ys is increasing; the
    # PLMap constructor re-checks and will surface inconsistent tables.
    return PLMap(xs, ys, missing=missing)


class CollapseMap:
    """Monotone non-decreasing PL surjection collapsing listed intervals
    to points; slope 1 outside the support."""

    def __init__(self, breakpoints, images):
        xs = [Fraction(x) for x in breakpoints]
        ys = [Fraction(y) for y in images]
        if any(b > a for a, b in zip(xs[1:], xs[:-1])):
            raise LoftError("breakpoints must be increasing")
        if any(b > a for a, b in zip(ys[1:], ys[:-1])):
            raise LoftError("collapse images must be non-decreasing")
        self.breakpoints = xs
        self.images = ys
        self.intervals = self._collapsed_intervals()

    def _collapsed_intervals(self):
        """Maximal closed intervals on which the map is constant."""
        out = []
        i = 0
        xs, ys = self.breakpoints, self.images
        while i < len(xs):
            j = i
            while j + 1 < len(xs) and ys[j + 1] == ys[i]:
                j += 1
            if j > i:
                out.append((xs[i], xs[j]))
            i = j + 1
        return out

    def __call__(self, x) -> Fraction:
        import bisect

        x = Fraction(x)
        xs, ys = self.breakpoints, self.images
        if not xs:
            return x
        if x <= xs[0]:
            return ys[0] + (x - xs[0])
        if x >= xs[-1]:
            return ys[-1] + (x - xs[-1])
        i = bisect.bisect_left(xs, x)
        if xs[i] == x:
            return ys[i]
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        if y0 == y1:
            return y0
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def collapse_between(j: EmbeddingTable, i0: EmbeddingTable) -> CollapseMap:
    """The monotone map f with f(j(g)) = i0(g) for every common word.

    Both tables must embed the same words in the same order; the map
    collapses exactly the intervals where i0 merges j-separated values."""
    j_entries = j.entries()
    words_j = [w for w, _ in j_entries]
    xs, ys = [], []
    for w, vj in j_entries:
        vi = i0.lookup(w)
        if vi is None:
            raise OrderError(f"word {w!r} embedded in j but not in i0")
        xs.append(vj)
        ys.append(vi)
    for w, _ in i0.entries():
        if j.lookup(w) is None:
            raise OrderError(f"word {w!r} embedded in i0 but not in j")
    if any(b > a for a, b in zip(ys[1:], ys[:-1])):
        raise OrderError("tables do not embed the words in the same order")
    return CollapseMap(xs, ys)


def breadth_first_words(gens, max_length):
    """Deterministic enumeration: identity, then reduced words by length,
    ties broken by generator index then sign (+ before -)."""
    from itertools import product

    out = [Word()]
    frontier = [Word()]
    letters = [(i, s) for i in range(gens.rank) for s in (1, -1)]
    for _ in range(max_length):
        nxt = []
        for w in frontier:
            for g, s in letters:
                w2 = w * Word(((g, s),))
                if len(w2) == len(w) + 1:
                    nxt.append(w2)
        seen = set()
        uniq = []
        for w in nxt:
            if w not in seen:
                seen.add(w)
                uniq.append(w)
        out.extend(uniq)
        frontier = uniq
    return out


def table_to_json_file(table: EmbeddingTable, gens, path):
    with open(path, "w") as fh:
        json.dump(table.to_json(gens), fh, indent=1, sort_keys=True)
