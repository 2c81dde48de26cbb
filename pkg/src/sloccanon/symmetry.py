"""Parametric symmetry maps on canonical forms and orbit decisions.

The residual action of the first-subsystem operator T on a canonical
triple (E, J, A) factors into three elementary superposition maps plus a
diagonal rescale.  On a single Jordan block every map is truncated
polynomial functional calculus; derogatory spectra and eigenvalue
collisions fall back to explicit matrix re-canonicalization, which is
the defining computation anyway.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import sympy

from .errors import (DegenerateParameter, NotInvertible, NotReversible,
                     SingularMatrix, ZeroScale)
from .exactmat import Matrix, Scalar, ZERO, ONE, _coerce
from .canon import CanonicalForm, commuting_pair_canonical
from .nilpoly import TruncPoly, compose, mul, reciprocal, shifted_reversion


@dataclass(frozen=True)
class SymmetryParams:
    """The five-parameter group element: z entries of U, diagonal of D."""

    z1: Scalar
    z2: Scalar
    z3: Scalar
    d2: Scalar
    d3: Scalar

    def __post_init__(self):
        for name in ("z1", "z2", "z3", "d2", "d3"):
            object.__setattr__(self, name, _coerce(getattr(self, name)))
        if self.d2.is_zero() or self.d3.is_zero():
            raise ZeroScale("diagonal scales must be nonzero")

    @staticmethod
    def identity() -> "SymmetryParams":
        return SymmetryParams(ZERO, ZERO, ZERO, ONE, ONE)

    def is_identity(self) -> bool:
        return self == SymmetryParams.identity()


def matrix_of_params(sp: SymmetryParams) -> Matrix:
    """The upper-triangular T realizing (rescale, JA, EA, EJ) in order."""
    return Matrix.from_rows([
        [ONE, sp.z1 * sp.d2, (sp.z2 + sp.z1 * sp.z3) * sp.d3],
        [ZERO, sp.d2, sp.z3 * sp.d3],
        [ZERO, ZERO, sp.d3],
    ])


def _row_of_params(sp: SymmetryParams):
    t = matrix_of_params(sp)
    return ((t[0, 0], t[0, 1], t[0, 2]), (t[1, 1], t[1, 2]), t[2, 2])


# ---------------------------------------------------------------------------
# Single-block functional calculus
# ---------------------------------------------------------------------------

def _block_poly(lam: Scalar, n: int) -> TruncPoly:
    """lam + x at truncation order n."""
    coeffs = [lam] + [ZERO] * (n - 1)
    if n >= 2:
        coeffs[1] = ONE
    return TruncPoly(n, tuple(coeffs))


def _block_transform(lam: Scalar, f: TruncPoly, trow):
    """Map one block (lam, f) under T; returns (lam', f').

    The transformed pair is (g1^-1 * jn, g1^-1 * an); re-Jordanizing the
    first factor is a compositional reversion applied to the second.
    """
    (t11, t12, t13), (t22, t23), t33 = trow
    n = f.order
    p = _block_poly(lam, n)
    g1 = TruncPoly.constant(t11, n) + p.scale(t12) + f.scale(t13)
    try:
        r1 = reciprocal(g1)
    except NotInvertible:
        raise DegenerateParameter(
            f"first slot loses rank on the block at {lam}")
    hj = mul(p.scale(t22) + f.scale(t23), r1)
    ha = mul(f.scale(t33), r1)
    lam2 = hj.coeffs[0]
    try:
        rev = shifted_reversion(hj)
    except NotReversible:
        raise DegenerateParameter(
            f"Jordan structure degenerates on the block at {lam}")
    return lam2, compose(ha, rev)


def _apply_rows(cf: CanonicalForm, trow) -> CanonicalForm:
    blocks = cf.block_data()
    if cf.is_derogatory():
        return _matrix_route(cf, trow)
    new_blocks = []
    for lam, size, coeffs in blocks:
        lam2, f2 = _block_transform(lam, TruncPoly(size, coeffs), trow)
        new_blocks.append((lam2, size, f2.coeffs))
    distinct_in = len(set(b[0].sort_key() for b in blocks))
    distinct_out = len(set(b[0].sort_key() for b in new_blocks))
    if distinct_out < distinct_in:
        # collision of output eigenvalues: gauge fixing needs the
        # deterministic matrix pipeline
        return _matrix_route(cf, trow, hints=[b[0] for b in new_blocks])
    return CanonicalForm.from_blocks(new_blocks)


def _matrix_route(cf: CanonicalForm, trow, hints=None) -> CanonicalForm:
    (t11, t12, t13), (t22, t23), t33 = trow
    n = cf.dim
    e = Matrix.identity(n)
    j, a = cf.assemble()
    g1 = e.scale(t11) + j.scale(t12) + a.scale(t13)
    try:
        p = g1.inverse()
    except SingularMatrix:
        raise DegenerateParameter("first slot loses rank")
    pair_j = p @ (j.scale(t22) + a.scale(t23))
    pair_a = p @ a.scale(t33)
    out, _ = commuting_pair_canonical(pair_j, pair_a, hints=hints)
    if out.spec.size_multiset() != cf.spec.size_multiset():
        raise DegenerateParameter("Jordan block structure changed")
    return out


# ---------------------------------------------------------------------------
# Public maps
# ---------------------------------------------------------------------------

def apply_T_EJ(cf: CanonicalForm, z1) -> CanonicalForm:
    z1 = _coerce(z1)
    return _apply_rows(cf, ((ONE, z1, ZERO), (ONE, ZERO), ONE))


def apply_T_EA(cf: CanonicalForm, z2) -> CanonicalForm:
    z2 = _coerce(z2)
    return _apply_rows(cf, ((ONE, ZERO, z2), (ONE, ZERO), ONE))


def apply_T_JA(cf: CanonicalForm, z3) -> CanonicalForm:
    z3 = _coerce(z3)
    return _apply_rows(cf, ((ONE, ZERO, ZERO), (ONE, z3), ONE))


def apply_rescale(cf: CanonicalForm, d2, d3) -> CanonicalForm:
    d2, d3 = _coerce(d2), _coerce(d3)
    if d2.is_zero() or d3.is_zero():
        raise ZeroScale("rescale factors must be nonzero")
    return _apply_rows(cf, ((ONE, ZERO, ZERO), (d2, ZERO), d3))


def apply_all(cf: CanonicalForm, sp: SymmetryParams,
              order=None) -> CanonicalForm:
    """Composite map; default is the single factored T of the group.

    An explicit order folds the elementary maps one by one instead, e.g.
    ("rescale", "JA", "EA", "EJ").
    """
    if order is None:
        return _apply_rows(cf, _row_of_params(sp))
    steps = {
        "rescale": lambda c: apply_rescale(c, sp.d2, sp.d3),
        "JA": lambda c: apply_T_JA(c, sp.z3),
        "EA": lambda c: apply_T_EA(c, sp.z2),
        "EJ": lambda c: apply_T_EJ(c, sp.z1),
    }
    out = cf
    for tag in order:
        out = steps[tag](out)
    return out


def mobius_2nn(lam, t11, t12, t22) -> Scalar:
    """The 2 x N x N eigenvalue law lam' = t22*lam / (t11 + t12*lam)."""
    lam, t11, t12, t22 = map(_coerce, (lam, t11, t12, t22))
    if (t11 * t22).is_zero():
        raise DegenerateParameter("diagonal of T must be nonzero")
    den = t11 + t12 * lam
    if den.is_zero():
        raise DegenerateParameter("first slot loses rank at this eigenvalue")
    return t22 * lam / den


# ---------------------------------------------------------------------------
# Orbit decision
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitDecision:
    status: str  # "equivalent" | "inequivalent" | "undecided"
    witness: SymmetryParams = None
    permutation: tuple = None

    @property
    def equivalent(self):
        return self.status == "equivalent"


_PIN_VALUES = (Fraction(0), Fraction(1), Fraction(-1), Fraction(2),
               Fraction(1, 2), Fraction(-2))


def _scalar_to_sympy(s: Scalar):
    return sympy.Rational(s.re) + sympy.I * sympy.Rational(s.im)


def _scalar_from_sympy(expr) -> Scalar:
    e = sympy.expand(sympy.cancel(expr))
    re, im = e.as_real_imag()
    if not (re.is_Rational and im.is_Rational):
        raise ValueError(f"not a Gaussian rational: {expr}")
    return Scalar(Fraction(int(re.p), int(re.q)),
                  Fraction(int(im.p), int(im.q)))


def _params_from_entries(entries):
    """(u2, u3, v2, v3, w3) -> SymmetryParams, or None if outside the group."""
    u2, u3, v2, v3, w3 = entries
    if v2.is_zero() or w3.is_zero():
        return None
    z3 = v3 / w3
    z1 = u2 / v2
    z2 = u3 / w3 - z1 * z3
    return SymmetryParams(z1, z2, z3, v2, w3)


def _constant_system(blocks1, blocks2):
    """Linear equations on T entries from the per-block constants."""
    rows, rhs = [], []
    for (lam, _, cs), (lam2, _, cs2) in zip(blocks1, blocks2):
        a0, a02 = cs[0], cs2[0]
        rows.append([lam2 * lam, lam2 * a0, -lam, -a0, ZERO])
        rhs.append(-lam2)
        rows.append([a02 * lam, a02 * a0, ZERO, ZERO, -a0])
        rhs.append(-a02)
    return Matrix.from_rows(rows), rhs


def _solve_affine(a: Matrix, rhs):
    """(particular, nullspace basis) of a x = rhs, or None if infeasible."""
    aug = Matrix.from_rows([a.row(i) + [rhs[i]] for i in range(a.rows)])
    red, pivots = aug.rref()
    if a.cols in pivots:
        return None
    particular = [ZERO] * a.cols
    for r, p in enumerate(pivots):
        particular[p] = red[r][a.cols]
    return particular, a.nullspace()


def _sym_series(coeffs):
    return list(coeffs)


def _sym_mul(f, g):
    n = len(f)
    out = [sympy.Integer(0)] * n
    for i in range(n):
        for j in range(n - i):
            out[i + j] = out[i + j] + f[i] * g[j]
    return out


def _sym_reciprocal(f):
    n = len(f)
    inv0 = 1 / f[0]
    out = [inv0] + [sympy.Integer(0)] * (n - 1)
    for m in range(1, n):
        acc = sympy.Integer(0)
        for k in range(1, m + 1):
            acc = acc + f[k] * out[m - k]
        out[m] = -inv0 * acc
    return out


def _sym_reversion(f):
    """g with g(f - f0) = x, coefficients as rational expressions."""
    n = len(f)
    h = [sympy.Integer(0)] + list(f[1:])
    out = [sympy.Integer(0)] * n
    residual = [sympy.Integer(0)] * n
    if n > 1:
        residual[1] = sympy.Integer(1)
    hpow = [sympy.Integer(1)] + [sympy.Integer(0)] * (n - 1)
    for k in range(1, n):
        hpow = _sym_mul(hpow, h)
        bk = sympy.cancel(residual[k] / hpow[k])
        out[k] = bk
        residual = [r - bk * hp for r, hp in zip(residual, hpow)]
    return out


def _sym_compose(f, g):
    n = len(f)
    acc = [sympy.Integer(0)] * n
    for c in reversed(f):
        acc = _sym_mul(acc, g)
        acc[0] = acc[0] + c
    return acc


def _residual_equations(blocks1, blocks2, entries):
    """Numerators of the higher-coefficient matching conditions."""
    u2, u3, v2, v3, w3 = entries
    eqs = []
    for (lam, n, cs), (lam2, _, cs2) in zip(blocks1, blocks2):
        if n < 2:
            continue
        lam_s = _scalar_to_sympy(lam)
        f = [_scalar_to_sympy(c) for c in cs]
        p = [lam_s] + [sympy.Integer(0)] * (n - 1)
        p[1] = sympy.Integer(1)
        g1 = [sympy.Integer(1) + u2 * p[0] + u3 * f[0]] + \
             [u2 * p[k] + u3 * f[k] for k in range(1, n)]
        r1 = _sym_reciprocal(g1)
        hj = _sym_mul([v2 * p[k] + v3 * f[k] for k in range(n)], r1)
        ha = _sym_mul([w3 * c for c in f], r1)
        out = _sym_compose(ha, _sym_reversion(hj))
        for k in range(1, n):
            diff = sympy.together(out[k] - _scalar_to_sympy(cs2[k]))
            num, _ = sympy.fraction(diff)
            num = sympy.expand(num)
            if num != 0:
                eqs.append(num)
    return eqs


def _witness_candidates(blocks1, blocks2, max_pins=1296):
    """(candidate params list, open_family flag) for one block matching."""
    a, rhs = _constant_system(blocks1, blocks2)
    sol = _solve_affine(a, rhs)
    if sol is None:
        return [], False
    particular, basis = sol
    if not basis:
        sp = _params_from_entries(particular)
        return ([sp] if sp else []), False
    syms = sympy.symbols(f"s0:{len(basis)}")
    entries = []
    for i in range(5):
        e = _scalar_to_sympy(particular[i])
        for s, b in zip(syms, basis):
            e = e + s * _scalar_to_sympy(b[i])
        entries.append(sympy.expand(e))
    eqs = _residual_equations(blocks1, blocks2, entries)
    candidates, open_family = [], False
    if not eqs:
        assignments = [dict(zip(syms, pins)) for pins in
                       itertools.islice(
                           itertools.product(_PIN_VALUES, repeat=len(syms)),
                           max_pins)]
        open_family = True
    else:
        try:
            sols = sympy.solve(eqs, list(syms), dict=True)
        except Exception:
            return [], True
        assignments = []
        for s in sols:
            frees = set()
            for v in s.values():
                frees |= v.free_symbols
            frees |= set(syms) - set(s.keys())
            frees = sorted(frees, key=str)
            if not frees:
                assignments.append(s)
                continue
            open_family = True
            for pins in itertools.islice(
                    itertools.product(_PIN_VALUES, repeat=len(frees)),
                    max_pins):
                pinned = dict(zip(frees, pins))
                full = {k: v.subs(pinned) for k, v in s.items()}
                full.update(pinned)
                assignments.append(full)
    for assign in assignments:
        try:
            vals = [_scalar_from_sympy(e.subs(assign)) for e in entries]
        except ValueError:
            open_family = True
            continue
        sp = _params_from_entries(vals)
        if sp is not None:
            candidates.append(sp)
    return candidates, open_family


def _size_matchings(blocks1, blocks2):
    k = len(blocks1)
    sizes1 = [b[1] for b in blocks1]
    sizes2 = [b[1] for b in blocks2]
    seen = set()
    for perm in itertools.permutations(range(k)):
        if any(sizes1[i] != sizes2[perm[i]] for i in range(k)):
            continue
        key = tuple(blocks2[perm[i]] for i in range(k))
        if key in seen:
            continue
        seen.add(key)
        yield perm


def orbit_equivalent(cf1: CanonicalForm, cf2: CanonicalForm) -> OrbitDecision:
    """Decide whether two canonical forms are parametric-symmetry related.

    Equivalent comes with a verified witness (re-applying it reproduces
    cf2 exactly).  Inequivalent means no witness exists under the
    generated group.  Undecided covers degenerate parameter values,
    derogatory gauge freedom, and unresolved witness families.
    """
    if cf1.spec.size_multiset() != cf2.spec.size_multiset():
        return OrbitDecision("inequivalent")
    if cf1 == cf2:
        return OrbitDecision("equivalent", SymmetryParams.identity(),
                             tuple(range(len(cf1.block_data()))))
    blocks1 = cf1.block_data()
    blocks2 = cf2.block_data()
    derogatory = cf1.is_derogatory() or cf2.is_derogatory()
    degenerate_seen = False
    family_open = False
    for perm in _size_matchings(blocks1, blocks2):
        target = [blocks2[perm[i]] for i in range(len(perm))]
        candidates, open_flag = _witness_candidates(blocks1, target)
        family_open = family_open or open_flag
        for sp in candidates:
            try:
                if apply_all(cf1, sp) == cf2:
                    return OrbitDecision("equivalent", sp, perm)
            except DegenerateParameter:
                degenerate_seen = True
    if derogatory or degenerate_seen or family_open:
        return OrbitDecision("undecided")
    return OrbitDecision("inequivalent")
