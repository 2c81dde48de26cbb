"""Exact dense linear algebra over Gaussian rationals.

Scalars are complex numbers with Fraction real and imaginary parts, so
every operation here (rank, inverse, characteristic polynomial, Jordan
decomposition, commutant bases) is exact.  Nothing in this module ever
touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .errors import DimensionMismatch, NotInField, SingularMatrix


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scalar:
    """A Gaussian rational re + im*i with exact Fraction components."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re, im=0) -> "Scalar":
        return Scalar(Fraction(re), Fraction(im))

    def __add__(self, other):
        other = _coerce(other)
        return Scalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        return Scalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inv(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero Scalar")
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * _coerce(other).inv()

    def __rtruediv__(self, other):
        return _coerce(other) * self.inv()

    def __pow__(self, k: int) -> "Scalar":
        if k < 0:
            return self.inv() ** (-k)
        out = Scalar(Fraction(1), Fraction(0))
        for _ in range(k):
            out = out * self
        return out

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def sort_key(self):
        """Lexicographic (re, im) total order used for normalization."""
        return (self.re, self.im)

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    __repr__ = __str__


ZERO = Scalar.of(0)
ONE = Scalar.of(1)
IUNIT = Scalar.of(0, 1)


def _coerce(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar(Fraction(x), Fraction(0))
    raise TypeError(f"cannot coerce {x!r} to Scalar")


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

class Matrix:
    """Immutable dense matrix with Scalar entries, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(_coerce(e) for e in entries)
        if len(entries) != rows * cols:
            raise DimensionMismatch(
                f"expected {rows * cols} entries, got {len(entries)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, *a):
        raise AttributeError("Matrix is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_rows(rows) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return Matrix(0, 0, ())
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise DimensionMismatch("ragged rows")
        return Matrix(len(rows), ncols, [e for r in rows for e in r])

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix(n, n, [ONE if i == j else ZERO
                             for i in range(n) for j in range(n)])

    @staticmethod
    def zero(rows: int, cols: int) -> "Matrix":
        return Matrix(rows, cols, [ZERO] * (rows * cols))

    @staticmethod
    def diagonal(diag) -> "Matrix":
        diag = [_coerce(d) for d in diag]
        n = len(diag)
        return Matrix(n, n, [diag[i] if i == j else ZERO
                             for i in range(n) for j in range(n)])

    @staticmethod
    def block_diag(blocks) -> "Matrix":
        blocks = list(blocks)
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = [[ZERO] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b[i, j]
            r0 += b.rows
            c0 += b.cols
        return Matrix.from_rows(out)

    @staticmethod
    def from_columns(cols) -> "Matrix":
        cols = [list(c) for c in cols]
        n = len(cols[0])
        return Matrix.from_rows([[cols[j][i] for j in range(len(cols))]
                                 for i in range(n)])

    # -- access -------------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def column(self, j):
        return [self[i, j] for i in range(self.rows)]

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def submatrix(self, row_idx, col_idx) -> "Matrix":
        row_idx, col_idx = list(row_idx), list(col_idx)
        return Matrix(len(row_idx), len(col_idx),
                      [self[i, j] for i in row_idx for j in col_idx])

    # -- algebra ------------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("add: shape mismatch")
        return Matrix(self.rows, self.cols,
                      [a + b for a, b in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Matrix(self.rows, self.cols, [-e for e in self.entries])

    def scale(self, s) -> "Matrix":
        s = _coerce(s)
        return Matrix(self.rows, self.cols, [s * e for e in self.entries])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatch("matmul: inner dimensions differ")
        a, b = self.to_rows(), other.to_rows()
        out = []
        for i in range(self.rows):
            ai = a[i]
            for j in range(other.cols):
                acc = ZERO
                for k in range(self.cols):
                    aik = ai[k]
                    if not aik.is_zero():
                        acc = acc + aik * b[k][j]
                out.append(acc)
        return Matrix(self.rows, other.cols, out)

    def transpose(self) -> "Matrix":
        return Matrix.from_rows([[self[i, j] for i in range(self.rows)]
                                 for j in range(self.cols)])

    def trace(self) -> Scalar:
        return reduce(lambda s, i: s + self[i, i], range(self.rows), ZERO)

    def power(self, k: int) -> "Matrix":
        out = Matrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def __repr__(self):
        rows = ["[" + ", ".join(str(e) for e in self.row(i)) + "]"
                for i in range(self.rows)]
        return "Matrix[" + "; ".join(rows) + "]"

    # -- elimination-based operations --------------------------------------

    def rref(self):
        """Reduced row echelon form; returns (rows, pivot column list)."""
        m = [r[:] for r in self.to_rows()]
        pivots = []
        r = 0
        for c in range(self.cols):
            if r >= self.rows:
                break
            pr = next((i for i in range(r, self.rows)
                       if not m[i][c].is_zero()), None)
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            inv = m[r][c].inv()
            m[r] = [inv * e for e in m[r]]
            for i in range(self.rows):
                if i != r and not m[i][c].is_zero():
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
        return m, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self):
        """Deterministic basis of the right nullspace (list of columns)."""
        m, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for fc in free:
            v = [ZERO] * self.cols
            v[fc] = ONE
            for r, pc in enumerate(pivots):
                v[pc] = -m[r][fc]
            basis.append(v)
        return basis

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise SingularMatrix("inverse of non-square matrix")
        n = self.rows
        aug = [self.row(i) + Matrix.identity(n).row(i) for i in range(n)]
        m, pivots = Matrix.from_rows(aug).rref()
        if pivots != list(range(n)):
            raise SingularMatrix("matrix is singular")
        return Matrix.from_rows([r[n:] for r in m])

    def det(self) -> Scalar:
        if self.rows != self.cols:
            raise DimensionMismatch("det of non-square matrix")
        m = [r[:] for r in self.to_rows()]
        n = self.rows
        d = ONE
        for c in range(n):
            pr = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
            if pr is None:
                return ZERO
            if pr != c:
                m[c], m[pr] = m[pr], m[c]
                d = -d
            d = d * m[c][c]
            inv = m[c][c].inv()
            for i in range(c + 1, n):
                if not m[i][c].is_zero():
                    f = m[i][c] * inv
                    m[i] = [a - f * b for a, b in zip(m[i], m[c])]
        return d

    def char_poly(self):
        """Monic characteristic polynomial, constant term first.

        Faddeev-LeVerrier: exact over the rationals, no pivoting choices.
        """
        if self.rows != self.cols:
            raise DimensionMismatch("char_poly of non-square matrix")
        n = self.rows
        coeffs = [ZERO] * n + [ONE]
        mk = Matrix.identity(n)
        for k in range(1, n + 1):
            mk = self @ mk
            ck = -mk.trace() / k
            coeffs[n - k] = ck
            mk = mk + Matrix.identity(n).scale(ck)
        return tuple(coeffs)


def poly_eval(coeffs, x: Scalar) -> Scalar:
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_deflate(coeffs, root: Scalar):
    """Divide by (x - root); assumes root is exact. Constant-first coeffs."""
    n = len(coeffs) - 1
    out = [ZERO] * n
    acc = coeffs[n]
    for k in range(n - 1, -1, -1):
        out[k] = acc
        acc = coeffs[k] + acc * root
    if not acc.is_zero():
        raise ValueError("not a root")
    return out


# ---------------------------------------------------------------------------
# Jordan structure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JordanSpec:
    """Ordered Jordan block list [(eigenvalue, size), ...].

    Normalized: eigenvalues ascending in the Scalar total order, blocks
    with equal eigenvalue adjacent with non-increasing sizes.
    """

    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(
            (lam, int(size)) for lam, size in self.blocks))

    @property
    def dim(self) -> int:
        return sum(size for _, size in self.blocks)

    def normalized(self) -> "JordanSpec":
        groups = {}
        order = []
        for lam, size in self.blocks:
            key = lam.sort_key()
            if key not in groups:
                groups[key] = (lam, [])
                order.append(key)
            groups[key][1].append(size)
        out = []
        for key in sorted(groups):
            lam, sizes = groups[key]
            out.extend((lam, s) for s in sorted(sizes, reverse=True))
        return JordanSpec(tuple(out))

    def is_normalized(self) -> bool:
        return self == self.normalized()

    def runs(self):
        """Group adjacent equal-eigenvalue blocks: [(lam, [sizes])]."""
        out = []
        for lam, size in self.blocks:
            if out and out[-1][0] == lam:
                out[-1][1].append(size)
            else:
                out.append((lam, [size]))
        return [(lam, tuple(sizes)) for lam, sizes in out]

    def size_multiset(self):
        return tuple(sorted(size for _, size in self.blocks))


def jordan_block(lam: Scalar, n: int) -> Matrix:
    return Matrix.from_rows(
        [[lam if i == j else (ONE if j == i + 1 else ZERO)
          for j in range(n)] for i in range(n)])


def jordan_matrix(spec: JordanSpec) -> Matrix:
    return Matrix.block_diag([jordan_block(lam, n) for lam, n in spec.blocks])


class _Span:
    """Incremental row space with deterministic lowest-index pivots."""

    def __init__(self):
        self.rows = []   # reduced rows
        self.pivots = []

    def add(self, vec) -> bool:
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if not v[p].is_zero():
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        p = next((i for i, e in enumerate(v) if not e.is_zero()), None)
        if p is None:
            return False
        inv = v[p].inv()
        self.rows.append([inv * e for e in v])
        self.pivots.append(p)
        return True


def eigenvalues_in_field(m: Matrix, hints=None):
    """All eigenvalues of m as Gaussian rationals, with multiplicity.

    Hints are candidate eigenvalues verified by exact substitution and
    deflation.  The residual polynomial is factored exactly over the
    Gaussian rationals; any irreducible factor of degree > 1 aborts with
    NotInField.  Result is sorted ascending in the Scalar total order.
    """
    coeffs = list(m.char_poly())
    roots = []
    for h in dict.fromkeys(hints or []):
        h = _coerce(h)
        while len(coeffs) > 1 and poly_eval(coeffs, h).is_zero():
            coeffs = poly_deflate(coeffs, h)
            roots.append(h)
    if len(coeffs) > 1:
        found, residual = _field_roots(coeffs)
        if residual is not None:
            raise NotInField(
                "characteristic polynomial has an irreducible factor of "
                f"degree {len(residual) - 1} over the Gaussian rationals",
                residual=residual)
        roots.extend(found)
    return sorted(roots, key=Scalar.sort_key)


def _field_roots(coeffs):
    """Roots in Q(i) of an exact polynomial via sympy factorization.

    Returns (roots, residual); residual is None when the polynomial
    splits completely, else the first irreducible non-linear factor.
    """
    import sympy

    x = sympy.Symbol("x")
    expr = sum(
        (sympy.Rational(c.re.numerator, c.re.denominator)
         + sympy.Rational(c.im.numerator, c.im.denominator) * sympy.I)
        * x ** k
        for k, c in enumerate(coeffs))
    poly = sympy.Poly(expr, x, domain="QQ_I")
    roots = []
    residual = None
    for factor, mult in poly.factor_list()[1]:
        if factor.degree() == 1:
            a1, a0 = factor.all_coeffs()
            root = _from_sympy(-sympy.together(a0 / a1))
            roots.extend([root] * mult)
        elif residual is None:
            residual = tuple(_from_sympy(c)
                             for c in reversed(factor.all_coeffs()))
    # exact double check against our own arithmetic
    rem = list(coeffs)
    for r in [] if residual is not None else roots:
        rem = poly_deflate(rem, r)
    return roots, residual


def _from_sympy(expr) -> Scalar:
    import sympy

    re, im = sympy.expand(sympy.sympify(expr)).as_real_imag()
    if not (re.is_Rational and im.is_Rational):
        raise NotInField(f"non-rational sympy value {expr}")
    return Scalar(Fraction(int(re.p), int(re.q)), Fraction(int(im.p), int(im.q)))


def jordan_decompose(m: Matrix, hints=None):
    """Exact Jordan decomposition with similarity witness.

    Returns (s, spec) with s invertible and s^-1 @ m @ s equal to
    jordan_matrix(spec) exactly.  Chain vectors are chosen by lowest-index
    pivots so the output is deterministic; spec comes out normalized.
    """
    if m.rows != m.cols:
        raise DimensionMismatch("jordan_decompose of non-square matrix")
    n = m.rows
    eigs = eigenvalues_in_field(m, hints)
    mults = []
    for lam in eigs:
        if mults and mults[-1][0] == lam:
            mults[-1][1] += 1
        else:
            mults.append([lam, 1])
    columns = []
    blocks = []
    for lam, mult in mults:
        b = m - Matrix.identity(n).scale(lam)
        powers = [Matrix.identity(n)]
        nulls = [[]]
        dims = [0]
        while dims[-1] < mult:
            powers.append(b @ powers[-1])
            basis = powers[-1].nullspace()
            nulls.append(basis)
            dims.append(len(basis))
        top = len(dims) - 1
        chains = []  # (top vector, height), heights non-increasing
        for k in range(top, 0, -1):
            span = _Span()
            for w in nulls[k - 1]:
                span.add(w)
            for v, h in chains:
                span.add(_apply(powers[h - k], v))
            for w in nulls[k]:
                if span.add(w):
                    chains.append((w, k))
        for v, h in chains:
            for j in range(h - 1, -1, -1):
                columns.append(_apply(powers[j], v))
            blocks.append((lam, h))
    spec = JordanSpec(tuple(blocks))
    s = Matrix.from_columns(columns)
    assert spec.is_normalized()
    assert s.inverse() @ m @ s == jordan_matrix(spec)
    return s, spec


def _apply(mat: Matrix, vec):
    return [reduce(lambda acc, j: acc + mat[i, j] * vec[j],
                   range(mat.cols), ZERO) for i in range(mat.rows)]


def commutant_basis(spec: JordanSpec):
    """Explicit basis of {M : [M, J] = 0} for J = jordan_matrix(spec).

    One Toeplitz band family per ordered pair of blocks with equal
    eigenvalue: for an n_i x n_j intertwining block the allowed diagonal
    offsets are max(0, n_j - n_i) .. n_j - 1, giving min(n_i, n_j) basis
    elements; nothing couples distinct eigenvalues.
    """
    sizes = [size for _, size in spec.blocks]
    offsets = [sum(sizes[:k]) for k in range(len(sizes))]
    dim = spec.dim
    basis = []
    for bi, (lam_i, ni) in enumerate(spec.blocks):
        for bj, (lam_j, nj) in enumerate(spec.blocks):
            if lam_i != lam_j:
                continue
            for d in range(max(0, nj - ni), nj):
                rows = [[ZERO] * dim for _ in range(dim)]
                for r in range(ni):
                    c = r + d
                    if c < nj:
                        rows[offsets[bi] + r][offsets[bj] + c] = ONE
                basis.append(Matrix.from_rows(rows))
    return basis
