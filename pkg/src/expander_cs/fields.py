"""Exact arithmetic in GF(q) for prime and prime-power q.

Representation
--------------
An element of GF(r^k) is a tuple of k integers in [0, r), the coefficients
of its polynomial-basis representative, lowest degree first. GF(r) elements
are 1-tuples. The extension modulus is a monic irreducible polynomial of
degree k over GF(r), chosen deterministically (smallest in the base-r
counting order of its non-leading coefficients) so that identical field
parameters always produce identical arithmetic. For k = 1 the modulus is
the placeholder ``x``.

Polynomials over GF(q) are tuples of elements, lowest degree first, with no
trailing zero coefficients; the zero polynomial is the empty tuple.

The intended scale is small: field orders are capped (default 512) and
irreducibility is decided by exhaustive trial division, which is plenty at
that size and trivially auditable.
"""

from __future__ import annotations

from .errors import CapacityError

MAX_FIELD_ORDER = 512

Element = tuple[int, ...]
Poly = tuple[Element, ...]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


# ---------------------------------------------------------------------------
# polynomials over the prime subfield GF(r), as int tuples (lowest degree
# first, no trailing zeros); only what the modulus machinery needs
# ---------------------------------------------------------------------------

def _pr_trim(c: list[int]) -> tuple[int, ...]:
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _pr_mul(a: tuple[int, ...], b: tuple[int, ...], r: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % r
    return _pr_trim(out)


def _pr_mod(a: tuple[int, ...], m: tuple[int, ...], r: int) -> tuple[int, ...]:
    """Remainder of a modulo m; m must be monic."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[shift + i] = (a[shift + i] - lead * mi) % r
        a.pop()
    return _pr_trim(a)


def _pr_monic_polys(r: int, degree: int):
    """All monic int-polynomials of the given degree over GF(r), counting order."""
    for code in range(r**degree):
        coeffs = []
        c = code
        for _ in range(degree):
            coeffs.append(c % r)
            c //= r
        yield tuple(coeffs) + (1,)


def _pr_is_irreducible(m: tuple[int, ...], r: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(m)//2."""
    deg = len(m) - 1
    if deg <= 0:
        return False
    for t in range(1, deg // 2 + 1):
        for div in _pr_monic_polys(r, t):
            if not _pr_mod(m, div, r):
                return False
    return True


def _pr_find_irreducible(r: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)  # x, the placeholder modulus of a prime field
    for cand in _pr_monic_polys(r, k):
        if _pr_is_irreducible(cand, r):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {k} over GF({r})")


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class GF:
    """The finite field GF(r^k) in polynomial basis over GF(r).

    Parameters
    ----------
    r : prime characteristic.
    k : extension degree (1 for a prime field).
    modulus : optional monic irreducible int-polynomial of degree k over
        GF(r), lowest degree first including the leading 1. When omitted,
        the deterministic default is used.
    """

    def __init__(self, r: int, k: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(r):
            raise ValueError(f"characteristic {r} is not prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        q = r**k
        if q > MAX_FIELD_ORDER:
            raise CapacityError(f"field order {q} exceeds limit {MAX_FIELD_ORDER}")
        self.r = r
        self.k = k
        self.q = q
        if modulus is None:
            modulus = _pr_find_irreducible(r, k)
        else:
            modulus = _pr_trim([c % r for c in modulus])
            if len(modulus) != k + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree k")
            if k > 1 and not _pr_is_irreducible(modulus, r):
                raise ValueError("modulus is reducible over the prime field")
        self.modulus = modulus
        self.zero: Element = (0,) * k
        self.one: Element = (1,) + (0,) * (k - 1)

    def __repr__(self):
        return f"GF({self.r}^{self.k})" if self.k > 1 else f"GF({self.r})"

    def __eq__(self, other):
        return (isinstance(other, GF)
                and (self.r, self.k, self.modulus) == (other.r, other.k, other.modulus))

    def __hash__(self):
        return hash((self.r, self.k, self.modulus))

    # -- element encoding ---------------------------------------------------

    def element(self, index: int) -> Element:
        """Element with base-r digit expansion ``index`` (c0 least significant)."""
        if not 0 <= index < self.q:
            raise ValueError(f"element index {index} outside [0, {self.q})")
        digits = []
        for _ in range(self.k):
            digits.append(index % self.r)
            index //= self.r
        return tuple(digits)

    def index(self, a: Element) -> int:
        """Inverse of :meth:`element`."""
        out = 0
        for c in reversed(a):
            out = out * self.r + c
        return out

    def elements(self):
        return (self.element(i) for i in range(self.q))

    # -- arithmetic ---------------------------------------------------------

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % self.r for x, y in zip(a, b))

    def sub(self, a: Element, b: Element) -> Element:
        return tuple((x - y) % self.r for x, y in zip(a, b))

    def neg(self, a: Element) -> Element:
        return tuple((-x) % self.r for x in a)

    def mul(self, a: Element, b: Element) -> Element:
        conv = _pr_mul(_pr_trim(list(a)), _pr_trim(list(b)), self.r)
        red = _pr_mod(conv, self.modulus, self.r)
        return tuple(red) + (0,) * (self.k - len(red))

    def pow(self, a: Element, e: int) -> Element:
        if e < 0:
            raise ValueError("exponent must be nonnegative")
        out = self.one
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a: Element) -> Element:
        if a == self.zero:
            raise ValueError("inverse of zero")
        return self.pow(a, self.q - 2)


# ---------------------------------------------------------------------------
# polynomials over GF(q)
# ---------------------------------------------------------------------------

def poly_trim(gf: GF, coeffs) -> Poly:
    c = list(coeffs)
    while c and c[-1] == gf.zero:
        c.pop()
    return tuple(c)


def poly_from_indices(gf: GF, indices) -> Poly:
    return poly_trim(gf, [gf.element(i) for i in indices])


def poly_add(gf: GF, f: Poly, g: Poly) -> Poly:
    n = max(len(f), len(g))
    f = f + (gf.zero,) * (n - len(f))
    g = g + (gf.zero,) * (n - len(g))
    return poly_trim(gf, [gf.add(a, b) for a, b in zip(f, g)])


def poly_mul(gf: GF, f: Poly, g: Poly) -> Poly:
    if not f or not g:
        return ()
    out = [gf.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a != gf.zero:
            for j, b in enumerate(g):
                out[i + j] = gf.add(out[i + j], gf.mul(a, b))
    return poly_trim(gf, out)


def poly_mod(gf: GF, f: Poly, m: Poly) -> Poly:
    """Remainder of f modulo m (any nonzero m; leading coefficient inverted)."""
    if not m:
        raise ValueError("modulus is the zero polynomial")
    lead_inv = gf.inv(m[-1])
    work = list(f)
    dm = len(m) - 1
    while len(work) - 1 >= dm and work:
        lead = work[-1]
        if lead != gf.zero:
            factor = gf.mul(lead, lead_inv)
            shift = len(work) - 1 - dm
            for i, mi in enumerate(m):
                work[shift + i] = gf.sub(work[shift + i], gf.mul(factor, mi))
        work.pop()
    return poly_trim(gf, work)


def poly_eval(gf: GF, f: Poly, y: Element) -> Element:
    """Horner evaluation of f at y."""
    acc = gf.zero
    for c in reversed(f):
        acc = gf.add(gf.mul(acc, y), c)
    return acc


def poly_mod_pow(gf: GF, f: Poly, e: int, modulus: Poly) -> Poly:
    """f**e reduced modulo ``modulus``, square-and-multiply.

    The modulus must be monic of degree >= 1; the exponent may be any
    nonnegative integer (reduction happens at every step, so towers like
    h**i stay cheap).
    """
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    if len(modulus) < 2 or modulus[-1] != gf.one:
        raise ValueError("modulus must be monic of degree >= 1")
    out: Poly = (gf.one,)
    base = poly_mod(gf, f, modulus)
    while e:
        if e & 1:
            out = poly_mod(gf, poly_mul(gf, out, base), modulus)
        base = poly_mod(gf, poly_mul(gf, base, base), modulus)
        e >>= 1
    return out


def _monic_polys(gf: GF, degree: int):
    """Monic degree-``degree`` polynomials over gf, base-q counting order."""
    for code in range(gf.q**degree):
        idxs = []
        c = code
        for _ in range(degree):
            idxs.append(c % gf.q)
            c //= gf.q
        yield tuple(gf.element(i) for i in idxs) + (gf.one,)


def poly_is_irreducible(gf: GF, f: Poly) -> bool:
    deg = len(f) - 1
    if deg <= 0:
        return False
    if deg == 1:
        return True
    for t in range(1, deg // 2 + 1):
        for div in _monic_polys(gf, t):
            if not poly_mod(gf, f, div):
                return False
    return True


def find_irreducible(gf: GF, degree: int, limit: int = 1 << 20) -> Poly:
    """Deterministic monic irreducible polynomial of the given degree.

    Candidates are scanned in base-q counting order of the non-leading
    coefficients, so identical inputs always give the identical modulus.
    Raises CapacityError when the candidate space exceeds ``limit``.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if gf.q**degree > limit:
        raise CapacityError(
            f"irreducible search space {gf.q}**{degree} exceeds limit {limit}")
    for cand in _monic_polys(gf, degree):
        if poly_is_irreducible(gf, cand):
            return cand
    raise AssertionError(f"no irreducible polynomial of degree {degree} over {gf!r}")
