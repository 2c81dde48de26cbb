"""Canonicalization pipeline: rank reduction, commuting-pair forms, splits."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sloccanon.canon import (CanonicalForm, ILOTriple, PartitionedForm,
                             TensorState, apply_ilo, beta_canonical_check,
                             commuting_pair_canonical, eigen_shift,
                             full_rank_reduce, max_rank_combination,
                             nonfull_rank_split, rank_normal_form)
from sloccanon.errors import (DimensionMismatch, NotCommuting, NotFullRank,
                              NotInField)
from sloccanon.exactmat import (JordanSpec, Matrix, Scalar, jordan_block,
                                jordan_matrix)


def sc(re, im=0):
    return Scalar(Fraction(re), Fraction(im))


def M(rows):
    return Matrix.from_rows(rows)


def state(*gammas):
    return TensorState(len(gammas), gammas[0].rows, tuple(gammas))


small_ints = st.integers(-3, 3)


# -- apply_ilo --------------------------------------------------------------

def test_apply_ilo_identity():
    psi = state(Matrix.identity(2), jordan_block(sc(0), 2))
    out = apply_ilo(psi, ILOTriple.identity(2, 2))
    assert out.gammas == psi.gammas


def test_apply_ilo_swap_and_shear():
    e, j = Matrix.identity(2), jordan_block(sc(0), 2)
    swap = ILOTriple(M([[0, 1], [1, 0]]), Matrix.identity(2),
                     Matrix.identity(2))
    assert apply_ilo(state(e, j), swap).gammas == (j, e)
    shear = ILOTriple(M([[1, 1], [0, 1]]), Matrix.identity(2),
                      Matrix.identity(2))
    assert apply_ilo(state(e, j), shear).gammas == (e + j, j)


@settings(max_examples=25, deadline=None)
@given(st.lists(small_ints, min_size=8, max_size=8),
       st.lists(small_ints, min_size=12, max_size=12))
def test_apply_ilo_composition(gvals, ovals):
    if all(v == 0 for v in gvals):
        return
    psi = TensorState(2, 2, (Matrix(2, 2, [sc(v) for v in gvals[:4]]),
                             Matrix(2, 2, [sc(v) for v in gvals[4:]])))
    mats = [Matrix(2, 2, [sc(v) for v in ovals[k:k + 4]])
            for k in (0, 4, 8)]
    if any(m.rank() < 2 for m in mats):
        return
    o1 = ILOTriple(mats[0], mats[1], mats[2])
    o2 = ILOTriple(mats[2], mats[0], mats[1])
    combined = ILOTriple(o2.t @ o1.t, o2.p @ o1.p, o1.q @ o2.q)
    assert apply_ilo(apply_ilo(psi, o1), o2).gammas == \
        apply_ilo(psi, combined).gammas


# -- max rank combination ---------------------------------------------------

def test_max_rank_examples():
    t, r = max_rank_combination(state(Matrix.identity(2), Matrix.zero(2, 2)))
    assert (t, r) == ((sc(1), sc(0)), 2)
    t, r = max_rank_combination(state(Matrix.diagonal([1, 0]),
                                      Matrix.diagonal([0, 1])))
    assert (t, r) == ((sc(1), sc(1)), 2)
    j = jordan_block(sc(0), 2)
    t, r = max_rank_combination(state(j, j.transpose()))
    assert (t, r) == ((sc(1), sc(1)), 2)


def test_max_rank_deficient_case():
    psi = state(Matrix.diagonal([1, 0]), Matrix.diagonal([2, 0]))
    _, r = max_rank_combination(psi)
    assert r == 1


# -- full rank reduce and eigen shift ---------------------------------------

def test_full_rank_reduce_examples():
    m = M([[1, 2], [3, 4]])
    out = full_rank_reduce(state(Matrix.diagonal([2, 3]), m))
    assert out.gammas[0] == Matrix.identity(2)
    assert out.gammas[1] == Matrix.diagonal([Fraction(1, 2),
                                             Fraction(1, 3)]) @ m
    out = full_rank_reduce(state(Matrix.identity(2), m))
    assert out.gammas == (Matrix.identity(2), m)
    out = full_rank_reduce(state(Matrix.diagonal([1, 0]),
                                 Matrix.diagonal([0, 1])))
    assert out.gammas[0] == Matrix.identity(2)


def test_full_rank_reduce_rejects_deficient():
    with pytest.raises(NotFullRank):
        full_rank_reduce(state(Matrix.diagonal([1, 0]),
                               Matrix.diagonal([2, 0])))


def test_eigen_shift_examples():
    out = eigen_shift(state(Matrix.identity(2), Matrix.identity(2)))
    assert out.gammas[1] == Matrix.zero(2, 2)
    out = eigen_shift(state(Matrix.identity(2), Matrix.diagonal([2, 3])))
    assert out.gammas[1] == Matrix.diagonal([0, 1])
    out = eigen_shift(state(Matrix.identity(2), jordan_block(sc(5), 2)))
    assert out.gammas[1] == jordan_block(sc(0), 2)


def test_eigen_shift_drops_rank():
    psi = state(Matrix.identity(3), Matrix.diagonal([4, 4, 9]),
                jordan_block(sc(-1), 3))
    out = eigen_shift(psi)
    for g in out.gammas[1:]:
        assert g.rank() < 3


def test_eigen_shift_not_in_field():
    with pytest.raises(NotInField):
        eigen_shift(state(Matrix.identity(2), M([[0, -2], [1, 0]])))


# -- commuting pair canonical form ------------------------------------------

def test_commuting_pair_diagonal():
    cf, s = commuting_pair_canonical(Matrix.diagonal([1, 2]),
                                     Matrix.diagonal([5, 7]))
    assert cf.spec == JordanSpec(((sc(1), 1), (sc(2), 1)))
    assert [b[2] for b in cf.block_data()] == [(sc(5),), (sc(7),)]
    assert s == Matrix.identity(2)


def test_commuting_pair_single_block():
    cf, s = commuting_pair_canonical(M([[1, 1], [0, 1]]),
                                     M([[2, 3], [0, 2]]))
    assert cf.spec == JordanSpec(((sc(1), 2),))
    assert cf.block_data() == [(sc(1), 2, (sc(2), sc(3)))]
    j, a = cf.assemble()
    assert s.inverse() @ M([[2, 3], [0, 2]]) @ s == a


def test_commuting_pair_polynomial_in_block():
    lam, a0, a1, a2 = sc(4), sc(-1), sc(Fraction(2, 3)), sc(5)
    j = jordan_block(lam, 3)
    n = jordan_block(sc(0), 3)
    a = Matrix.identity(3).scale(a0) + n.scale(a1) + (n @ n).scale(a2)
    cf, _ = commuting_pair_canonical(j, a)
    assert cf.spec == JordanSpec(((lam, 3),))
    assert cf.block_data() == [(lam, 3, (a0, a1, a2))]


def test_commuting_pair_rejects_noncommuting():
    with pytest.raises(NotCommuting):
        commuting_pair_canonical(jordan_block(sc(0), 2),
                                 jordan_block(sc(0), 2).transpose())


def test_commuting_pair_rejects_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        commuting_pair_canonical(Matrix.identity(2), Matrix.identity(3))


def test_commuting_pair_idempotent_on_canonical_input():
    cf = CanonicalForm.from_blocks([
        (sc(1), 2, (sc(0), sc(2))),
        (sc(3), 1, (sc(5),)),
    ])
    j, a = cf.assemble()
    out, s = commuting_pair_canonical(j, a)
    assert out == cf
    assert s == Matrix.identity(3)


@settings(max_examples=20, deadline=None)
@given(st.lists(small_ints, min_size=9, max_size=9))
def test_commuting_pair_conjugation_invariance(vals):
    c = Matrix(3, 3, [sc(v) for v in vals])
    if c.rank() < 3:
        return
    cf = CanonicalForm.from_blocks([
        (sc(2), 2, (sc(1), sc(7))),
        (sc(-1), 1, (sc(0),)),
    ])
    j, a = cf.assemble()
    out, s = commuting_pair_canonical(c @ j @ c.inverse(),
                                      c @ a @ c.inverse(),
                                      hints=[sc(2), sc(-1)])
    assert out == cf
    assert s.inverse() @ (c @ j @ c.inverse()) @ s == j


def test_derogatory_assembly_roundtrip():
    # two size-2 blocks at one eigenvalue with an off-diagonal coupling
    j = jordan_matrix(JordanSpec(((sc(0), 2), (sc(0), 2))))
    a = M([[1, 2, 0, 3],
           [0, 1, 0, 0],
           [0, 5, 4, 6],
           [0, 0, 0, 4]])
    assert (j @ a - a @ j).is_zero()
    cf, s = commuting_pair_canonical(j, a)
    assert cf.is_derogatory()
    jj, aa = cf.assemble()
    assert (jj, aa) == (j, a) and s == Matrix.identity(4)


# -- rank normal form -------------------------------------------------------

@settings(max_examples=40)
@given(st.lists(small_ints, min_size=6, max_size=6))
def test_rank_normal_form(vals):
    m = Matrix(2, 3, [sc(v) for v in vals])
    p, q, r = rank_normal_form(m)
    assert r == m.rank()
    out = p @ m @ q
    for i in range(2):
        for j in range(3):
            assert out[i, j] == (sc(1) if i == j and i < r else sc(0))


# -- non-full-rank split ----------------------------------------------------

def test_split_already_partitioned():
    lam = Matrix.diagonal([1, 1, 0])
    g2 = Matrix.block_diag([M([[5]]), M([[0, 1], [0, 0]])])
    pf = nonfull_rank_split(state(lam, g2))
    assert (pf.n, pf.m, pf.i) == (1, 2, 1)
    assert pf.lambda_prime == Matrix.diagonal([1, 0])


def test_split_whole_state_is_remainder():
    pf = nonfull_rank_split(state(Matrix.diagonal([1, 0]),
                                  M([[0, 1], [0, 0]])))
    assert (pf.n, pf.m, pf.i) == (0, 2, 1)
    assert pf.gamma_part[0] == Matrix.identity(0)


def test_split_conjugation_stability():
    lam = Matrix.diagonal([1, 1, 0])
    g2 = Matrix.block_diag([M([[5]]), M([[0, 1], [0, 0]])])
    # a stabilizer of lam: upper block-triangular p, lower block-triangular q
    p = M([[1, 0, 2], [0, 1, -1], [0, 0, 3]])
    q = M([[1, 0, 0], [0, 1, 0], [4, 5, 7]])
    assert p @ lam @ q == lam
    pf = nonfull_rank_split(state(lam, p @ g2 @ q))
    assert (pf.n, pf.m, pf.i) == (1, 2, 1)


def test_split_rejects_full_rank():
    with pytest.raises(NotFullRank):
        nonfull_rank_split(state(Matrix.identity(2), Matrix.zero(2, 2)))


# -- beta rank condition ----------------------------------------------------

def _partitioned(beta):
    return PartitionedForm(0, 2, 1, (Matrix.identity(0),), (beta,),
                           Matrix.diagonal([1, 0]))


def test_beta_check_true_case():
    assert beta_canonical_check(_partitioned(M([[0, 1], [0, 0]]))) is True


def test_beta_check_false_case():
    assert beta_canonical_check(_partitioned(Matrix.diagonal([0, 1]))) \
        is False
