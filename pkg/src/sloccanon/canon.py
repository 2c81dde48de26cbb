"""Canonicalization of L x N x N tensor states under local operations.

A state is a tuple of L square matrices acted on by an invertible triple
(T, P, Q).  The full-rank pipeline reduces the first slot to the
identity and turns the rest into a simultaneous-similarity problem whose
canonical data is a Jordan spectrum plus commutant polynomial classes.
The non-full-rank pipeline splits the state into a full-rank part and an
indecomposable remainder.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import (DimensionMismatch, NoSplitFound, NotCommuting,
                     NotFullRank, NotInField, PatternViolation)
from .exactmat import (Matrix, Scalar, JordanSpec, ZERO, ONE, _coerce,
                       eigenvalues_in_field, jordan_matrix, jordan_decompose,
                       poly_deflate)
from .nilpoly import TruncPoly, poly_matrix_to_commutant

GRID_VALUES = (0, 1, -1, 2, -2)
RANDOM_TUPLES = 64
RANDOM_BOUND = 10 ** 6


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TensorState:
    """A tuple of L complex N x N matrices."""

    L: int
    N: int
    gammas: tuple

    def __post_init__(self):
        gammas = tuple(self.gammas)
        if len(gammas) != self.L:
            raise DimensionMismatch("wrong number of slots")
        for g in gammas:
            if (g.rows, g.cols) != (self.N, self.N):
                raise DimensionMismatch("slot is not N x N")
        if all(g.is_zero() for g in gammas):
            raise DimensionMismatch("all slots are zero")
        object.__setattr__(self, "gammas", gammas)


@dataclass(frozen=True)
class ILOTriple:
    """Invertible local operators (T on slots, P and Q on the sides)."""

    t: Matrix
    p: Matrix
    q: Matrix

    def __post_init__(self):
        for name, m in (("t", self.t), ("p", self.p), ("q", self.q)):
            if m.rows != m.cols or m.rank() != m.rows:
                raise DimensionMismatch(f"{name} is not invertible")

    @staticmethod
    def identity(L: int, N: int) -> "ILOTriple":
        return ILOTriple(Matrix.identity(L), Matrix.identity(N),
                         Matrix.identity(N))


@dataclass(frozen=True)
class AClassRun:
    """Commutant data for one equal-eigenvalue run of Jordan blocks.

    grid[i][j] is the polynomial class of the (i, j) intertwining block;
    all entries have order sizes[0] and obey the band support rule.
    """

    lam: Scalar
    sizes: tuple
    grid: tuple

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "grid",
                           tuple(tuple(row) for row in self.grid))


@dataclass(frozen=True)
class CanonicalForm:
    """The (E, J, A) canonical triple; E is implicit.

    spec fixes J; runs carry the polynomial classes of A, aligned with
    spec.runs().
    """

    spec: JordanSpec
    runs: tuple

    def __post_init__(self):
        object.__setattr__(self, "runs", tuple(self.runs))
        expected = self.spec.runs()
        got = [(r.lam, r.sizes) for r in self.runs]
        if got != expected:
            raise PatternViolation("runs do not match the Jordan spec")

    @property
    def dim(self) -> int:
        return self.spec.dim

    def is_derogatory(self) -> bool:
        return any(len(r.sizes) > 1 for r in self.runs)

    def assemble(self):
        """Explicit (J, A) matrices."""
        j = jordan_matrix(self.spec)
        a = Matrix.block_diag([
            poly_matrix_to_commutant(r.grid, r.sizes) for r in self.runs])
        return j, a

    def assemble_state(self) -> TensorState:
        j, a = self.assemble()
        return TensorState(3, self.dim, (Matrix.identity(self.dim), j, a))

    def block_data(self):
        """Per-block diagonal data [(lam, size, coeffs)] in spec order."""
        out = []
        for run in self.runs:
            for i, size in enumerate(run.sizes):
                out.append((run.lam, size, run.grid[i][i].coeffs[:size]))
        return out

    @staticmethod
    def from_blocks(blocks) -> "CanonicalForm":
        """Build a nonderogatory-style form from [(lam, size, coeffs)].

        Blocks sharing an eigenvalue are merged into one run with zero
        off-diagonal classes.  Input need not be sorted.
        """
        key = lambda b: (b[0].sort_key(), -b[1])
        blocks = sorted(((_coerce(lam), int(size), tuple(map(_coerce, cs)))
                         for lam, size, cs in blocks), key=key)
        spec = JordanSpec(tuple((lam, size) for lam, size, _ in blocks))
        runs = []
        for lam, sizes in spec.runs():
            n1 = sizes[0]
            coeff_lists = [cs for blam, bsize, cs in blocks
                           if blam == lam]
            grid = []
            for i, ni in enumerate(sizes):
                row = []
                for jdx, nj in enumerate(sizes):
                    if i == jdx:
                        cs = coeff_lists[i]
                        row.append(TruncPoly(
                            n1, tuple(cs) + (ZERO,) * (n1 - len(cs))))
                    else:
                        row.append(TruncPoly.constant(0, n1))
                grid.append(tuple(row))
            runs.append(AClassRun(lam, sizes, tuple(grid)))
        return CanonicalForm(spec, tuple(runs))


@dataclass(frozen=True)
class PartitionedForm:
    """Non-full-rank decomposition into a full-rank part and a remainder.

    gamma_part are the n x n full-rank-side matrices, beta_part the
    m x m remainder, lambda_prime the diag(I_{m-i}, 0_i) projector left
    in the remainder's first slot.
    """

    n: int
    m: int
    i: int
    gamma_part: tuple
    beta_part: tuple
    lambda_prime: Matrix

    def __post_init__(self):
        if self.m <= self.i:
            raise PatternViolation("remainder size must exceed deficiency")
        if all(b.is_zero() for b in self.beta_part):
            raise PatternViolation("remainder slots are all zero")
        object.__setattr__(self, "gamma_part", tuple(self.gamma_part))
        object.__setattr__(self, "beta_part", tuple(self.beta_part))


# ---------------------------------------------------------------------------
# ILO action and rank search
# ---------------------------------------------------------------------------

def apply_ilo(psi: TensorState, ops: ILOTriple) -> TensorState:
    if ops.t.rows != psi.L or ops.p.rows != psi.N or ops.q.rows != psi.N:
        raise DimensionMismatch("operator dimensions do not match the state")
    moved = [ops.p @ g @ ops.q for g in psi.gammas]
    out = []
    for i in range(psi.L):
        acc = Matrix.zero(psi.N, psi.N)
        for j in range(psi.L):
            tij = ops.t[i, j]
            if not tij.is_zero():
                acc = acc + moved[j].scale(tij)
        out.append(acc)
    return TensorState(psi.L, psi.N, tuple(out))


def _combination(psi: TensorState, t):
    acc = Matrix.zero(psi.N, psi.N)
    for coeff, g in zip(t, psi.gammas):
        coeff = _coerce(coeff)
        if not coeff.is_zero():
            acc = acc + g.scale(coeff)
    return acc


def _coefficient_sweep(L: int, seed: int):
    """Deterministic small-integer tuples first, then seeded big ones."""
    first = (1,) + (0,) * (L - 1)
    yield first
    for t in itertools.product(GRID_VALUES, repeat=L):
        if any(t) and t != first:
            yield t
    rng = random.Random(seed)
    for _ in range(RANDOM_TUPLES):
        yield tuple(rng.randint(-RANDOM_BOUND, RANDOM_BOUND)
                    for _ in range(L))


def max_rank_combination(psi: TensorState, seed: int = 0):
    """Coefficients t with rank(sum t_j Gamma_j) maximal.

    The max-rank locus is Zariski-open, so the random phase attains it
    with probability 1; r == N is certified, anything less is best-found.
    """
    best_t, best_r = None, -1
    for t in _coefficient_sweep(psi.L, seed):
        r = _combination(psi, t).rank()
        if r > best_r:
            best_t, best_r = t, r
            if r == psi.N:
                break
    return tuple(_coerce(c) for c in best_t), best_r


def _completion_matrix(t):
    """Invertible matrix with first row t (t nonzero)."""
    L = len(t)
    t = [_coerce(c) for c in t]
    pivot = next(i for i, c in enumerate(t) if not c.is_zero())
    rows = [t]
    for k in range(L):
        if k != pivot:
            rows.append([ONE if j == k else ZERO for j in range(L)])
    return Matrix.from_rows(rows)


def full_rank_reduce(psi: TensorState, seed: int = 0) -> TensorState:
    """Bring the first slot to the exact identity.

    T mixes a maximum-rank combination into slot one, then P is its
    inverse and Q stays the identity; the remaining slots are multiplied
    by that inverse on the left.
    """
    t, r = max_rank_combination(psi, seed)
    if r < psi.N:
        raise NotFullRank(f"maximum attained rank {r} < {psi.N}")
    tmat = _completion_matrix(t)
    mixed = apply_ilo(psi, ILOTriple(tmat, Matrix.identity(psi.N),
                                     Matrix.identity(psi.N)))
    p = mixed.gammas[0].inverse()
    return TensorState(psi.L, psi.N,
                       tuple(p @ g for g in mixed.gammas))


def eigen_shift(psi: TensorState, hints=None) -> TensorState:
    """Subtract the smallest eigenvalue times E from every later slot."""
    if psi.gammas[0] != Matrix.identity(psi.N):
        raise NotFullRank("first slot must be the identity")
    out = [psi.gammas[0]]
    for g in psi.gammas[1:]:
        lam = eigenvalues_in_field(g, hints)[0]
        out.append(g - Matrix.identity(psi.N).scale(lam))
    return TensorState(psi.L, psi.N, tuple(out))


# ---------------------------------------------------------------------------
# Commuting-pair canonical form
# ---------------------------------------------------------------------------

def commuting_pair_canonical(a2: Matrix, a3: Matrix, hints=None):
    """Simultaneous canonical form (J, A) of a commuting pair.

    Returns (cf, witness) with witness^-1 @ a2 @ witness the Jordan
    matrix and witness^-1 @ a3 @ witness the assembled commutant matrix,
    both exact.
    """
    if a2.rows != a2.cols or (a2.rows, a2.cols) != (a3.rows, a3.cols):
        raise DimensionMismatch("pair must be square and equally sized")
    if not (a2 @ a3 - a3 @ a2).is_zero():
        raise NotCommuting("slots two and three do not commute")
    s, spec = jordan_decompose(a2, hints)
    b = s.inverse() @ a3 @ s
    runs = []
    offset = 0
    run_slices = []
    for lam, sizes in spec.runs():
        run_slices.append((lam, sizes, offset))
        offset += sum(sizes)
    for lam, sizes, off in run_slices:
        n1 = sizes[0]
        suboffsets = [off + sum(sizes[:k]) for k in range(len(sizes))]
        grid = []
        for i, ni in enumerate(sizes):
            row = []
            for jdx, nj in enumerate(sizes):
                coeffs = [ZERO] * n1
                for k in range(nj):
                    coeffs[k] = b[suboffsets[i], suboffsets[jdx] + k]
                row.append(TruncPoly(n1, tuple(coeffs)))
            grid.append(tuple(row))
        runs.append(AClassRun(lam, tuple(sizes), tuple(grid)))
    cf = CanonicalForm(spec, tuple(runs))
    _, a_check = cf.assemble()
    if a_check != b:
        raise PatternViolation(
            "conjugated third slot does not match the commutant pattern")
    return cf, s


# ---------------------------------------------------------------------------
# Polynomial helpers for spectral projectors
# ---------------------------------------------------------------------------

def _ptrim(p):
    while len(p) > 1 and p[-1].is_zero():
        p = p[:-1]
    return p


def _pmul(p, q):
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _ptrim(out)


def _pdivmod(p, q):
    p, q = list(p), _ptrim(list(q))
    lead = q[-1].inv()
    quot = [ZERO] * max(1, len(p) - len(q) + 1)
    while len(_ptrim(p)) >= len(q) and not all(c.is_zero() for c in p):
        p = _ptrim(p)
        if len(p) < len(q):
            break
        k = len(p) - len(q)
        f = p[-1] * lead
        quot[k] = quot[k] + f
        for i, c in enumerate(q):
            p[k + i] = p[k + i] - f * c
    return _ptrim(quot), _ptrim(p)


def _pxgcd(p, q):
    """(g, a, b) with a*p + b*q = g, g monic."""
    r0, r1 = _ptrim(list(p)), _ptrim(list(q))
    a0, a1 = [ONE], [ZERO]
    b0, b1 = [ZERO], [ONE]
    while not all(c.is_zero() for c in r1):
        quot, rem = _pdivmod(r0, r1)
        r0, r1 = r1, rem
        a0, a1 = a1, _ptrim([x - y for x, y in
                             zip(a0 + [ZERO] * len(_pmul(quot, a1)),
                                 _pmul(quot, a1) + [ZERO] * len(a0))])
        b0, b1 = b1, _ptrim([x - y for x, y in
                             zip(b0 + [ZERO] * len(_pmul(quot, b1)),
                                 _pmul(quot, b1) + [ZERO] * len(b0))])
    lead = r0[-1].inv()
    return ([lead * c for c in r0], [lead * c for c in a0],
            [lead * c for c in b0])


def _peval_matrix(p, m: Matrix) -> Matrix:
    acc = Matrix.zero(m.rows, m.cols)
    for c in reversed(p):
        acc = acc @ m + Matrix.identity(m.rows).scale(c)
    return acc


# ---------------------------------------------------------------------------
# Non-full-rank splitting
# ---------------------------------------------------------------------------

def rank_normal_form(m: Matrix):
    """(p, q, r) invertible with p @ m @ q == diag(I_r, 0)."""
    n_rows, n_cols = m.rows, m.cols
    aug = Matrix.from_rows([m.row(i) + Matrix.identity(n_rows).row(i)
                            for i in range(n_rows)])
    red, _ = aug.rref()
    x = Matrix.from_rows([r[:n_cols] for r in red])
    p = Matrix.from_rows([r[n_cols:] for r in red])
    _, pivots = x.rref()
    r = len(pivots)
    order = pivots + [c for c in range(n_cols) if c not in pivots]
    perm = Matrix.from_rows([[ONE if order[j] == i else ZERO
                              for j in range(n_cols)]
                             for i in range(n_cols)])
    x2 = x @ perm
    clear = [[-x2[i, j] if (j >= r and i < r) else
              (ONE if i == j else ZERO)
              for j in range(n_cols)] for i in range(n_cols)]
    q = perm @ Matrix.from_rows(clear)
    expected = Matrix.from_rows([[ONE if (i == j and i < r) else ZERO
                                  for j in range(n_cols)]
                                 for i in range(n_rows)])
    assert (p @ m @ q) == expected
    return p, q, r


class _Piece:
    """A summand of the joint decomposition: matrices r_dim x c_dim."""

    def __init__(self, mats):
        self.mats = list(mats)
        self.r_dim = mats[0].rows
        self.c_dim = mats[0].cols


def _endomorphism_basis(mats):
    """Basis of pairs (R, C) with R @ M == M @ C for every M."""
    r_dim, c_dim = mats[0].rows, mats[0].cols
    nr, nc = r_dim * r_dim, c_dim * c_dim
    rows = []
    for m in mats:
        for a in range(r_dim):
            for b in range(c_dim):
                row = [ZERO] * (nr + nc)
                for k in range(r_dim):
                    row[a * r_dim + k] = row[a * r_dim + k] + m[k, b]
                for k in range(c_dim):
                    row[nr + k * c_dim + b] = row[nr + k * c_dim + b] - m[a, k]
                rows.append(row)
    null = Matrix.from_rows(rows).nullspace() if rows else []
    basis = []
    for v in null:
        rmat = Matrix.from_rows([[v[i * r_dim + k] for k in range(r_dim)]
                                 for i in range(r_dim)])
        cmat = Matrix.from_rows([[v[nr + i * c_dim + k] for k in range(c_dim)]
                                 for i in range(c_dim)])
        basis.append((rmat, cmat))
    return basis


def _column_space(m: Matrix):
    """Deterministic basis (list of column vectors) of the column space."""
    _, pivots = m.rref()
    return [m.column(j) for j in pivots]


def _split_piece(piece: _Piece, seed: int):
    """Try to split off a proper joint summand.

    Returns (piece_a, piece_b), None for indecomposable-evidence, or
    raises NoSplitFound when an eigenvalue escapes the field.
    """
    basis = _endomorphism_basis(piece.mats)
    if len(basis) <= 1:
        return None
    rng = random.Random(seed)
    candidates = list(basis)
    for _ in range(8):
        coeffs = [Scalar.of(rng.randint(-9, 9), rng.randint(-9, 9))
                  for _ in basis]
        rmat = Matrix.zero(piece.r_dim, piece.r_dim)
        cmat = Matrix.zero(piece.c_dim, piece.c_dim)
        for c, (rb, cb) in zip(coeffs, basis):
            rmat = rmat + rb.scale(c)
            cmat = cmat + cb.scale(c)
        candidates.append((rmat, cmat))
    unknown = False
    for rmat, cmat in candidates:
        for source in (rmat, cmat):
            if source.rows < 2:
                continue
            try:
                eigs = eigenvalues_in_field(source)
            except NotInField:
                unknown = True
                continue
            if len(set(e.sort_key() for e in eigs)) < 2:
                continue
            proj = _spectral_projector_poly(eigs, eigs[0])
            p_r = _peval_matrix(proj, rmat)
            p_c = _peval_matrix(proj, cmat)
            split = _apply_projector(piece, p_r, p_c)
            if split is not None:
                return split
    if unknown:
        raise NoSplitFound(
            "endomorphism spectrum leaves the Gaussian rationals")
    return None


def _spectral_projector_poly(eigs, lam0):
    """Polynomial h with h == 1 on lam0's generalized eigenspace, 0 off."""
    f1, f2 = [ONE], [ONE]
    for e in eigs:
        factor = [-e, ONE]
        if e == lam0:
            f1 = _pmul(f1, factor)
        else:
            f2 = _pmul(f2, factor)
    _, a, b = _pxgcd(f1, f2)
    return _pmul(b, f2)


def _apply_projector(piece: _Piece, p_r: Matrix, p_c: Matrix):
    """Change basis along an idempotent pair; None if the pair is unusable."""
    if not (p_r @ p_r == p_r and p_c @ p_c == p_c):
        return None
    id_r = Matrix.identity(piece.r_dim)
    id_c = Matrix.identity(piece.c_dim)
    im_r = _column_space(p_r)
    im_c = _column_space(p_c)
    ra, ca = len(im_r), len(im_c)
    if (ra, ca) in ((0, 0), (piece.r_dim, piece.c_dim)):
        return None
    cols_r = im_r + _column_space(id_r - p_r)
    cols_c = im_c + _column_space(id_c - p_c)
    if len(cols_r) != piece.r_dim or len(cols_c) != piece.c_dim:
        return None
    u = Matrix.from_columns(cols_r) if cols_r else Matrix.identity(0)
    v = Matrix.from_columns(cols_c) if cols_c else Matrix.identity(0)
    u_inv = u.inverse()
    mats_a, mats_b = [], []
    for m in piece.mats:
        w = u_inv @ m @ v
        off1 = w.submatrix(range(ra), range(ca, piece.c_dim))
        off2 = w.submatrix(range(ra, piece.r_dim), range(ca))
        if not (off1.is_zero() and off2.is_zero()):
            return None
        mats_a.append(w.submatrix(range(ra), range(ca)))
        mats_b.append(w.submatrix(range(ra, piece.r_dim),
                                  range(ca, piece.c_dim)))
    return _Piece(mats_a), _Piece(mats_b)


def _decompose_fully(mats, seed: int):
    pending = [_Piece(mats)]
    done = []
    step = 0
    while pending:
        piece = pending.pop(0)
        if piece.r_dim == 0 and piece.c_dim == 0:
            continue
        result = _split_piece(piece, seed + step)
        step += 1
        if result is None:
            done.append(piece)
        else:
            pending.extend(result)
    return done


def nonfull_rank_split(psi: TensorState, seed: int = 0) -> PartitionedForm:
    """Split a rank-deficient state per the stabilizer direct-sum form.

    The first slot is reduced to diag(I_{N-i}, 0); joint summands are
    found via idempotents of the endomorphism algebra; summands whose
    first-slot restriction is square and invertible form the full-rank
    part, everything else the remainder.
    """
    t, r = max_rank_combination(psi, seed)
    deficiency = psi.N - r
    if deficiency == 0:
        raise NotFullRank("state has full rank; use the full-rank pipeline")
    tmat = _completion_matrix(t)
    mixed = apply_ilo(psi, ILOTriple(tmat, Matrix.identity(psi.N),
                                     Matrix.identity(psi.N)))
    p, q, _ = rank_normal_form(mixed.gammas[0])
    mats = [p @ g @ q for g in mixed.gammas]
    pieces = _decompose_fully(mats, seed)
    gamma_pieces, beta_pieces = [], []
    for piece in pieces:
        lam_part = piece.mats[0]
        if (piece.r_dim == piece.c_dim and piece.r_dim > 0
                and lam_part.rank() == piece.r_dim):
            gamma_pieces.append(piece)
        else:
            beta_pieces.append(piece)
    n = sum(pc.r_dim for pc in gamma_pieces)
    m = psi.N - n
    if sum(pc.r_dim for pc in beta_pieces) != m or \
            sum(pc.c_dim for pc in beta_pieces) != m:
        raise NoSplitFound("summand shapes do not assemble into square parts")
    gamma_part = []
    for j in range(1, psi.L):
        blocks = [pc.mats[0].inverse() @ pc.mats[j] for pc in gamma_pieces]
        gamma_part.append(Matrix.block_diag(blocks) if blocks
                          else Matrix.identity(0))
    lam_beta = Matrix.block_diag([pc.mats[0] for pc in beta_pieces]) \
        if beta_pieces else Matrix.identity(0)
    pb, qb, rb = rank_normal_form(lam_beta)
    lambda_prime = pb @ lam_beta @ qb
    beta_part = []
    for j in range(1, psi.L):
        bj = Matrix.block_diag([pc.mats[j] for pc in beta_pieces]) \
            if beta_pieces else Matrix.identity(0)
        beta_part.append(pb @ bj @ qb)
    return PartitionedForm(n, m, deficiency, tuple(gamma_part),
                           tuple(beta_part), lambda_prime)


def beta_canonical_check(pf: PartitionedForm, seed: int = 0) -> bool:
    """Rank condition for the remainder's canonical form.

    True iff the maximum rank of lambda_prime + sum alpha_j beta_j over
    the sampled coefficient tuples equals m - i.
    """
    target = pf.m - pf.i
    best = -1
    for alphas in _coefficient_sweep(len(pf.beta_part), seed):
        acc = pf.lambda_prime
        for a, b in zip(alphas, pf.beta_part):
            a = _coerce(a)
            if not a.is_zero():
                acc = acc + b.scale(a)
        best = max(best, acc.rank())
        if best > target:
            return False
    return best == target
