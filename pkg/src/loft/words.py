"""Free-word algebra on triangulation edge generators.

Words are freely reduced sequences of (generator index, sign).  The
toolkit treats them as elements of the fundamental group presented on
edge loops; imposing relations is the job of the order oracles and the
complex module, not of this one.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import OrderError, ParseError


class GeneratorSet:
    """Ordered list of distinct edge-class names."""

    def __init__(self, names):
        names = list(names)
        if not names:
            raise ParseError("generator set is empty")
        if len(set(names)) != len(names):
            raise ParseError("generator names are not distinct")
        self.names = names
        self.rank = len(names)
        self._index = {n: i for i, n in enumerate(names)}

    def index(self, name) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ParseError(f"unknown generator {name!r}") from None

    def __len__(self):
        return self.rank

    def __repr__(self):
        return f"GeneratorSet({self.names!r})"


def reduce_letters(letters):
    """Freely reduce a letter sequence; the group product of words is
    concatenation followed by this."""
    out = []
    for gen, sign in letters:
        if sign not in (1, -1):
            raise ParseError(f"letter sign must be +1 or -1, got {sign!r}")
        if gen < 0:
            raise ParseError(f"negative generator index {gen}")
        if out and out[-1][0] == gen and out[-1][1] == -sign:
            out.pop()
        else:
            out.append((gen, sign))
    return tuple(out)


class Word:
    """A freely reduced word.  Immutable and hashable."""

    __slots__ = ("letters", "_hash")

    def __init__(self, letters=(), _reduced=False):
        reduced = tuple(letters) if _reduced else reduce_letters(letters)
        object.__setattr__(self, "letters", reduced)
        object.__setattr__(self, "_hash", hash(reduced))

    def __setattr__(self, *args):
        raise AttributeError("Word is immutable")

    def __len__(self):
        return len(self.letters)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Word) and self.letters == other.letters

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        left = list(self.letters)
        right = other.letters
        i = 0
        while left and i < len(right) and left[-1][0] == right[i][0] and left[-1][1] == -right[i][1]:
            left.pop()
            i += 1
        return Word(tuple(left) + right[i:], _reduced=True)

    def inverse(self) -> "Word":
        return Word(tuple((g, -s) for g, s in reversed(self.letters)), _reduced=True)

    def is_identity(self) -> bool:
        return not self.letters

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def __repr__(self):
        if not self.letters:
            return "Word(e)"
        bits = "".join(f"g{g}" + ("'" if s < 0 else "") for g, s in self.letters)
        return f"Word({bits})"


IDENTITY = Word()


def word(*letters) -> Word:
    return Word(letters)


def generator(idx, sign=1) -> Word:
    return Word(((idx, sign),))


def commutator(u: Word, v: Word) -> Word:
    return u * v * u.inverse() * v.inverse()


def reduce_word(letters) -> Word:
    """Build a Word from a raw letter sequence."""
    return Word(letters)


def parse_word(text, gens: GeneratorSet) -> Word:
    """Parse whitespace-separated tokens `a`, `a^-1` (also `a^1`, `e`)."""
    letters = []
    for tok in text.split():
        if tok in ("e", "1"):
            continue
        name, _, power = tok.partition("^")
        sign = 1
        if power:
            if power == "-1":
                sign = -1
            elif power != "1":
                raise ParseError(f"unsupported exponent in token {tok!r}")
        letters.append((gens.index(name), sign))
    return Word(letters)


def format_word(w: Word, gens: GeneratorSet) -> str:
    if w.is_identity():
        return "e"
    return " ".join(
        gens.names[g] + ("^-1" if s < 0 else "") for g, s in w.letters
    )


def abelianize(w: Word, rank) -> tuple:
    """Signed exponent sums per generator."""
    coords = [0] * rank
    for g, s in w.letters:
        if g >= rank:
            raise OrderError(f"generator index {g} outside rank {rank}")
        coords[g] += s
    return tuple(coords)


def magnus_profile(w: Word, rank):
    """Abelianization and full degree-2 coefficient matrix of the Magnus
    expansion (generators map to 1 + X, inverses to 1 - X + X^2 - ...).

    Folding one letter x onto a prefix u uses
        eps(ux)  = eps(u) + eps(x)
        mu(ux)   = mu(u) + eps(u) (x) eps(x) + mu(x)
    where mu of a positive letter is 0 and of an inverse letter is E_ii.
    """
    eps = [0] * rank
    mu = [[0] * rank for _ in range(rank)]
    for g, s in w.letters:
        if g >= rank:
            raise OrderError(f"generator index {g} outside rank {rank}")
        for i in range(rank):
            e = eps[i]
            if e:
                mu[i][g] += e * s
        if s < 0:
            mu[g][g] += 1
        eps[g] += s
    return tuple(eps), tuple(tuple(row) for row in mu)


def fold_profiles(p1, p2, rank):
    """Magnus profile of a concatenation from the profiles of the parts."""
    eps1, mu1 = p1
    eps2, mu2 = p2
    eps = tuple(a + b for a, b in zip(eps1, eps2))
    mu = [
        [mu1[i][j] + mu2[i][j] + eps1[i] * eps2[j] for j in range(rank)]
        for i in range(rank)
    ]
    return eps, tuple(tuple(row) for row in mu)


def invert_profile(p, rank):
    eps, mu = p
    inv_eps = tuple(-e for e in eps)
    inv_mu = [
        [-mu[i][j] + eps[i] * eps[j] for j in range(rank)] for i in range(rank)
    ]
    return inv_eps, tuple(tuple(row) for row in inv_mu)


def pair_indices(rank):
    """Ordered pairs (i, j), i < j, in lexicographic order."""
    return [(i, j) for i in range(rank) for j in range(i + 1, rank)]


def reduce_mod_relation(pairs, relation):
    """Canonical representative of a pair vector modulo integer multiples
    of the relation vector, pivoting on its first nonzero coordinate."""
    if relation is None:
        return tuple(pairs)
    relation = tuple(relation)
    if len(relation) != len(pairs):
        raise OrderError("quotient relation has wrong length")
    pivot = next((k for k, c in enumerate(relation) if c != 0), None)
    if pivot is None:
        return tuple(pairs)
    if relation[pivot] < 0:
        relation = tuple(-c for c in relation)
    k = pairs[pivot] // relation[pivot]
    return tuple(p - k * r for p, r in zip(pairs, relation))


@dataclass(frozen=True)
class Degree2Class:
    """Antisymmetrized degree-2 Magnus coefficients of a word with zero
    abelianization, indexed by ordered generator pairs (i < j), optionally
    reduced modulo the degree-2 vector of a surface relator."""

    pairs: tuple
    rank: int
    quotient_relation: tuple | None = None

    def is_zero(self):
        return all(p == 0 for p in self.pairs)


def magnus_degree2(w: Word, rank, quotient_relation=None) -> Degree2Class:
    """Degree-2 class of a word in the kernel of abelianization.

    Raises OrderError if the abelianization is nonzero.  On the kernel the
    degree-2 matrix is antisymmetric and the map is a homomorphism into
    the pair lattice.
    """
    eps, mu = magnus_profile(w, rank)
    if any(eps):
        raise OrderError("magnus_degree2 requires zero abelianization")
    pairs = []
    for i, j in pair_indices(rank):
        assert mu[i][j] == -mu[j][i], "degree-2 matrix not antisymmetric on the kernel"
        pairs.append(mu[i][j])
    reduced = reduce_mod_relation(tuple(pairs), quotient_relation)
    qr = tuple(quotient_relation) if quotient_relation is not None else None
    return Degree2Class(pairs=reduced, rank=rank, quotient_relation=qr)
