"""Exact arithmetic in a real algebraic number field Q(lam).

Elements are rational coordinate vectors in the power basis 1, lam, ...,
lam^(d-1) of Q[x]/(p) for a fixed monic irreducible p with a chosen real
root isolated by a rational interval.  Signs are decided exactly: an
element is zero iff its coordinate vector is zero, and otherwise interval
evaluation over a bisection-refined root enclosure terminates.

All order decisions in the toolkit go through this module; floats appear
only in hyperbolic geometry.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import OrderError, PrecisionExhausted

# Refinement budget: enclosure width 2^-bits before giving up.
DEFAULT_PRECISION_BITS = 512


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    raise OrderError(f"cannot interpret {x!r} as a rational number")


def _poly_eval(coeffs, x: Fraction) -> Fraction:
    """Evaluate sum(coeffs[k] * x^k) by Horner."""
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class NumberField:
    """Q[x]/(poly) with a distinguished real root in an isolating interval.

    poly is given by its full coefficient list (constant term first) and
    must be monic.  Irreducibility is the caller's responsibility; the
    two bundled fields (x^2 - 2 and x^6 - x - 1) are irreducible over Q.
    """

    def __init__(self, name, coeffs, interval):
        coeffs = tuple(_as_fraction(c) for c in coeffs)
        if not coeffs or coeffs[-1] != 1:
            raise OrderError("defining polynomial must be monic")
        self.name = name
        self.coeffs = coeffs
        self.degree = len(coeffs) - 1
        if self.degree < 1:
            raise OrderError("defining polynomial must have degree >= 1")
        lo, hi = (_as_fraction(interval[0]), _as_fraction(interval[1]))
        if not lo < hi:
            raise OrderError("isolating interval is empty")
        if _poly_eval(coeffs, lo) == 0 or _poly_eval(coeffs, hi) == 0:
            raise OrderError("isolating interval endpoints must not be roots")
        if (_poly_eval(coeffs, lo) < 0) == (_poly_eval(coeffs, hi) < 0):
            raise OrderError("isolating interval shows no sign change")
        self._lo = lo
        self._hi = hi
        self._refined_bits = 0
        # x^(d+k) reduced to the power basis, for k = 0 .. d-2.
        self._high_powers = self._reduction_table()
        self._sign_cache: dict[tuple, int] = {}
        self.zero = FieldElement(self, (Fraction(0),) * self.degree)
        one = [Fraction(0)] * self.degree
        one[0] = Fraction(1)
        self.one = FieldElement(self, tuple(one))

    def _reduction_table(self):
        d = self.degree
        # x^d = -(c_0 + c_1 x + ... + c_{d-1} x^{d-1})
        base = [-c for c in self.coeffs[:d]]
        rows = [tuple(base)]
        for _ in range(d - 2):
            prev = rows[-1]
            shifted = [Fraction(0)] + list(prev[: d - 1])
            top = prev[d - 1]
            rows.append(tuple(shifted[i] + top * base[i] for i in range(d)))
        return rows

    # -- root enclosure ------------------------------------------------

    def refine(self, bits):
        """Bisect the root enclosure until its width is below 2^-bits."""
        width = self._hi - self._lo
        target = Fraction(1, 2 ** bits)
        if width <= target:
            return
        sign_lo = 1 if _poly_eval(self.coeffs, self._lo) > 0 else -1
        while self._hi - self._lo > target:
            mid = (self._lo + self._hi) / 2
            v = _poly_eval(self.coeffs, mid)
            if v == 0:
                # Cannot happen for an irreducible polynomial of degree >= 2.
                raise OrderError("rational root encountered; polynomial is reducible")
            if (1 if v > 0 else -1) == sign_lo:
                self._lo = mid
            else:
                self._hi = mid
        self._refined_bits = max(self._refined_bits, bits)

    def enclosure(self):
        return self._lo, self._hi

    def element(self, coords) -> FieldElement:
        coords = tuple(_as_fraction(c) for c in coords)
        if len(coords) > self.degree:
            raise OrderError("coordinate vector longer than field degree")
        coords = coords + (Fraction(0),) * (self.degree - len(coords))
        return FieldElement(self, coords)

    def rational(self, q) -> FieldElement:
        return self.element([q])

    def root_power(self, k) -> FieldElement:
        """lam^k as a field element (k < degree)."""
        coords = [Fraction(0)] * self.degree
        coords[k] = Fraction(1)
        return FieldElement(self, tuple(coords))

    # -- exact sign determination ---------------------------------------

    def sign_of_coords(self, coords, precision_bits=DEFAULT_PRECISION_BITS) -> int:
        if all(c == 0 for c in coords):
            return 0
        key = tuple(coords)
        cached = self._sign_cache.get(key)
        if cached is not None:
            return cached
        bits = max(self._refined_bits, 16)
        while True:
            self.refine(bits)
            lo, hi = self._interval_eval(coords)
            if lo > 0:
                sign = 1
                break
            if hi < 0:
                sign = -1
                break
            if bits >= precision_bits:
                raise PrecisionExhausted(
                    f"sign of nonzero element undecided at {bits} bits"
                )
            bits = min(bits * 2, precision_bits)
        self._sign_cache[key] = sign
        return sign

    def _interval_eval(self, coords):
        """Interval Horner evaluation of the coordinate polynomial at the
        root enclosure.  Valid for enclosures with 0 <= lo or hi <= 0 as
        well as mixed-sign ones."""
        lo = hi = Fraction(0)
        for c in reversed(coords):
            cands_lo = (lo * self._lo, lo * self._hi, hi * self._lo, hi * self._hi)
            lo, hi = min(cands_lo) + c, max(cands_lo) + c
        return lo, hi

    def float_root(self) -> float:
        self.refine(64)
        return float((self._lo + self._hi) / 2)

    def __repr__(self):
        return f"NumberField({self.name}, degree {self.degree})"


class FieldElement:
    """Immutable element of a NumberField, with exact comparisons."""

    __slots__ = ("field", "coords", "_hash")

    def __init__(self, field: NumberField, coords):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", tuple(coords))
        object.__setattr__(self, "_hash", hash((id(field),) + self.coords))

    def __setattr__(self, *args):
        raise AttributeError("FieldElement is immutable")

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                raise OrderError("elements of different fields cannot be mixed")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, tuple(a - b for a, b in zip(self.coords, o.coords)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(o.coords):
                if b == 0:
                    continue
                prod[i + j] += a * b
        out = list(prod[:d])
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c == 0:
                continue
            row = self.field._high_powers[k - d]
            for i in range(d):
                out[i] += c * row[i]
        return FieldElement(self.field, tuple(out))

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        """Multiplicative inverse by the extended Euclidean algorithm on
        the coordinate polynomial and the defining polynomial."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        # Polynomials as coefficient lists, constant first.
        a = list(self.field.coeffs)
        b = list(self.coords)
        while b and b[-1] == 0:
            b.pop()
        # Bezout: s*a + t*b = gcd; track t only.
        t_prev, t_cur = [Fraction(0)], [Fraction(1)]
        r_prev, r_cur = a, b

        def poly_divmod(num, den):
            num = list(num)
            q = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
            while len(num) >= len(den) and any(num):
                while num and num[-1] == 0:
                    num.pop()
                if len(num) < len(den):
                    break
                factor = num[-1] / den[-1]
                shift = len(num) - len(den)
                q[shift] = factor
                for i, dc in enumerate(den):
                    num[shift + i] -= factor * dc
                num.pop()
            return q, num

        def poly_sub_mul(p, q, m):
            # p - q*m
            out = list(p) + [Fraction(0)] * max(0, len(q) + len(m) - 1 - len(p))
            for i, qc in enumerate(q):
                if qc == 0:
                    continue
                for j, mc in enumerate(m):
                    out[i + j] -= qc * mc
            while out and out[-1] == 0:
                out.pop()
            return out

        while r_cur:
            q, r_next = poly_divmod(r_prev, r_cur)
            while r_next and r_next[-1] == 0:
                r_next.pop()
            t_next = poly_sub_mul(t_prev, q, t_cur)
            r_prev, r_cur = r_cur, r_next
            t_prev, t_cur = t_cur, t_next
        # r_prev is the gcd, a nonzero constant for irreducible modulus.
        if len(r_prev) != 1:
            raise OrderError("defining polynomial is not irreducible")
        g = r_prev[0]
        inv = [c / g for c in t_prev]
        return self.field.element(inv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def sign(self) -> int:
        return self.field.sign_of_coords(self.coords)

    def _cmp_sign(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return None
        return (self - o).sign()

    def __eq__(self, other):
        s = self._cmp_sign(other)
        return NotImplemented if s is None else s == 0

    def __lt__(self, other):
        s = self._cmp_sign(other)
        return NotImplemented if s is None else s < 0

    def __le__(self, other):
        s = self._cmp_sign(other)
        return NotImplemented if s is None else s <= 0

    def __gt__(self, other):
        s = self._cmp_sign(other)
        return NotImplemented if s is None else s > 0

    def __ge__(self, other):
        s = self._cmp_sign(other)
        return NotImplemented if s is None else s >= 0

    def __hash__(self):
        return self._hash

    def __float__(self):
        lam = self.field.float_root()
        acc = 0.0
        for c in reversed(self.coords):
            acc = acc * lam + float(c)
        return acc

    def __repr__(self):
        return f"FieldElement({self.coords!r} in {self.field.name})"


def field_sqrt2() -> NumberField:
    """Q(sqrt 2): x^2 - 2 with the root in (1, 2)."""
    return NumberField("sqrt2", [-2, 0, 1], (1, 2))


def field_lambda6() -> NumberField:
    """Degree-six field Q(lam), lam the real root of x^6 - x - 1 in (1, 2).

    The powers 1, lam, ..., lam^5 are Q-independent, enough for injective
    functionals on lattices up to rank 6.
    """
    return NumberField("lambda6", [-1, -1, 0, 0, 0, 0, 1], (1, 2))
