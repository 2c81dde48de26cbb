"""Truncated polynomial algebra in a nilpotent variable.

All arithmetic is modulo x**order, where x stands for the n x n shift
matrix J_n(0).  This is the computational engine behind the parametric
symmetry maps: reciprocals, composition, and shifted compositional
inversion are all exact triangular solves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (NotInvertible, NotReversible, NotToeplitz,
                     OrderMismatch, PatternViolation)
from .exactmat import Matrix, Scalar, ZERO, ONE, _coerce, jordan_block


@dataclass(frozen=True)
class TruncPoly:
    """Coefficients of x**0 .. x**(order-1); x**order == 0."""

    order: int
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(_coerce(c) for c in self.coeffs)
        if len(coeffs) != self.order or self.order < 1:
            raise OrderMismatch(
                f"need {self.order} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @staticmethod
    def constant(c, order: int) -> "TruncPoly":
        return TruncPoly(order, (_coerce(c),) + (ZERO,) * (order - 1))

    @staticmethod
    def variable(order: int) -> "TruncPoly":
        if order < 2:
            return TruncPoly.constant(0, order)
        return TruncPoly(order, (ZERO, ONE) + (ZERO,) * (order - 2))

    def resized(self, order: int) -> "TruncPoly":
        """Truncate or zero-pad to a different order."""
        c = self.coeffs[:order] + (ZERO,) * max(0, order - self.order)
        return TruncPoly(order, c)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other: "TruncPoly") -> "TruncPoly":
        _check(self, other)
        return TruncPoly(self.order, tuple(
            a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "TruncPoly") -> "TruncPoly":
        _check(self, other)
        return TruncPoly(self.order, tuple(
            a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return TruncPoly(self.order, tuple(-c for c in self.coeffs))

    def scale(self, s) -> "TruncPoly":
        s = _coerce(s)
        return TruncPoly(self.order, tuple(s * c for c in self.coeffs))

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                terms.append(f"({c})" + ("" if k == 0 else f"*x^{k}"))
        return " + ".join(terms) if terms else "0"


def _check(f: TruncPoly, g: TruncPoly):
    if f.order != g.order:
        raise OrderMismatch(f"orders differ: {f.order} vs {g.order}")


def mul(f: TruncPoly, g: TruncPoly) -> TruncPoly:
    """Cauchy product truncated at the common order."""
    _check(f, g)
    n = f.order
    out = [ZERO] * n
    for i, a in enumerate(f.coeffs):
        if a.is_zero():
            continue
        for j in range(n - i):
            b = g.coeffs[j]
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b
    return TruncPoly(n, tuple(out))


def reciprocal(f: TruncPoly) -> TruncPoly:
    """g with mul(f, g) == 1; exact triangular back-substitution."""
    if f.coeffs[0].is_zero():
        raise NotInvertible("constant term is zero")
    n = f.order
    inv0 = f.coeffs[0].inv()
    out = [inv0] + [ZERO] * (n - 1)
    for m in range(1, n):
        acc = ZERO
        for k in range(1, m + 1):
            acc = acc + f.coeffs[k] * out[m - k]
        out[m] = -inv0 * acc
    return TruncPoly(n, tuple(out))


def compose(f: TruncPoly, g: TruncPoly) -> TruncPoly:
    """f(g(x)) truncated; g may have a nonzero constant term."""
    _check(f, g)
    acc = TruncPoly.constant(0, f.order)
    for c in reversed(f.coeffs):
        acc = mul(acc, g) + TruncPoly.constant(c, f.order)
    return acc


def shifted_reversion(f: TruncPoly) -> TruncPoly:
    """Compositional inverse of f around its basepoint.

    Returns g (zero constant term) with compose(g, f - f(0)) == x, i.e.
    g inverts the nilpotent part of f.  Undetermined coefficients, solved
    triangularly: b_k is fixed by the x**k coefficient.
    """
    n = f.order
    h = TruncPoly(n, (ZERO,) + f.coeffs[1:])
    if n > 1 and h.coeffs[1].is_zero():
        raise NotReversible("linear coefficient is zero")
    out = [ZERO] * n
    residual = TruncPoly.variable(n)
    hpow = TruncPoly.constant(1, n)
    for k in range(1, n):
        hpow = mul(hpow, h)
        bk = residual.coeffs[k] / hpow.coeffs[k]
        out[k] = bk
        residual = residual - hpow.scale(bk)
    return TruncPoly(n, tuple(out))


def eval_at_jordan(f: TruncPoly, lam) -> Matrix:
    """f evaluated at the Jordan block J_order(lam).

    For lam == 0 this is the upper-triangular Toeplitz matrix whose first
    row is the coefficient vector.
    """
    lam = _coerce(lam)
    j = jordan_block(lam, f.order)
    acc = Matrix.zero(f.order, f.order)
    for c in reversed(f.coeffs):
        acc = acc @ j + Matrix.identity(f.order).scale(c)
    return acc


def toeplitz_to_poly(m: Matrix) -> TruncPoly:
    """Read off f from an upper-triangular Toeplitz matrix."""
    n = m.rows
    if m.cols != n:
        raise NotToeplitz("not square")
    first = m.row(0)
    for i in range(n):
        for j in range(n):
            expect = first[j - i] if j >= i else ZERO
            if m[i, j] != expect:
                raise NotToeplitz(f"entry ({i},{j}) breaks the band pattern")
    return TruncPoly(n, tuple(first))


def poly_to_toeplitz(f: TruncPoly) -> Matrix:
    return eval_at_jordan(f, ZERO)


def grid_support(ni: int, nj: int):
    """Allowed coefficient degrees of the (i, j) commutant grid entry."""
    return range(max(0, nj - ni), nj)


def grid_entry_ok(f: TruncPoly, ni: int, nj: int) -> bool:
    allowed = set(grid_support(ni, nj))
    return all(c.is_zero() for k, c in enumerate(f.coeffs)
               if k not in allowed)


def poly_matrix_to_commutant(entries, sizes) -> Matrix:
    """Assemble the commutant matrix from a grid of polynomials.

    sizes must be non-increasing; every grid entry has order sizes[0].
    Entry (i, j) is realized as f(J_{n1}(0)) keeping the first n_i rows
    and n_j columns, which forces the Toeplitz band pattern and, for
    n_i < n_j, a minimum degree of n_j - n_i.
    """
    sizes = [int(s) for s in sizes]
    if sorted(sizes, reverse=True) != sizes:
        raise PatternViolation("block sizes must be non-increasing")
    n1 = sizes[0]
    l = len(sizes)
    if len(entries) != l or any(len(row) != l for row in entries):
        raise PatternViolation("grid is not square over the blocks")
    dim = sum(sizes)
    offsets = [sum(sizes[:k]) for k in range(l)]
    rows = [[ZERO] * dim for _ in range(dim)]
    for i in range(l):
        for j in range(l):
            f = entries[i][j]
            if f.order != n1:
                raise OrderMismatch("grid entry order must equal max size")
            if not grid_entry_ok(f, sizes[i], sizes[j]):
                raise PatternViolation(
                    f"grid entry ({i},{j}) violates the band support rule")
            for r in range(sizes[i]):
                for c in range(sizes[j]):
                    k = c - r
                    if 0 <= k < n1:
                        rows[offsets[i] + r][offsets[j] + c] = f.coeffs[k]
    return Matrix.from_rows(rows)
