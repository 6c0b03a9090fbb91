import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracle import STRANDS, TORUS, TRIVIAL, gf2_rank_bruteforce, gf2_solve_bruteforce
from twk.errors import DimensionMismatch, ForeignElement
from twk.kernel.algebra import (
    associativity_failures, invert_name_map, strand_algebra_torus, tensor_algebra, torus_algebra,
    torus_iso, trivial_algebra,
)
from twk.kernel.linalg import BitMatrix, nullspace, rank, solve_linear


@pytest.mark.parametrize("alg,oracle", [
    (torus_algebra(), TORUS), (strand_algebra_torus(), STRANDS), (trivial_algebra(), TRIVIAL),
])
def test_basis_and_products_match_path_oracle(alg, oracle):
    assert sorted(alg.basis) == sorted(oracle.paths())
    for a in alg.basis:
        for b in alg.basis:
            got = alg.multiply(alg.element(a), alg.element(b))
            want = oracle.mul(a, b)
            assert got == (frozenset() if want is None else alg.element(want)), (a, b)


def test_torus_dimension_and_relations():
    T = torus_algebra()
    assert T.dim == 8
    assert T.multiply(T.element("g"), T.element("f")) == frozenset()
    assert T.multiply(T.element("h"), T.element("g")) == frozenset()
    assert T.multiply(T.element("f"), T.element("gh")) == T.element("fgh")


def test_torus_iso_is_multiplicative():
    T, A = torus_algebra(), strand_algebra_torus()
    iso = torus_iso()
    assert iso["fgh"] == "rho123" and iso["i0"] == "j0"
    for a in T.basis:
        for b in T.basis:
            prod = T.multiply(T.element(a), T.element(b))
            image = A.multiply(A.element(iso[a]), A.element(iso[b]))
            assert image == frozenset(A.index(iso[T.basis[k]]) for k in prod)
    assert invert_name_map(iso)["rho12"] == "fg"


def test_tensor_products_componentwise():
    A, T = strand_algebra_torus(), torus_algebra()
    AT = tensor_algebra(A, T)
    assert AT.dim == 64
    for (a1, t1) in AT.basis:
        for (a2, t2) in AT.basis:
            got = AT.multiply(AT.element((a1, t1)), AT.element((a2, t2)))
            pa, pt = STRANDS.mul(a1, a2), TORUS.mul(t1, t2)
            want = frozenset() if pa is None or pt is None else AT.element((pa, pt))
            assert got == want


@pytest.mark.parametrize("alg", [torus_algebra(), strand_algebra_torus(), trivial_algebra()])
def test_associative(alg):
    assert associativity_failures(alg) == []


def test_inverse_of_idempotent_part():
    T = torus_algebra()
    assert T.inverse(T.element("i0")) == T.element("i0")
    with pytest.raises(ValueError):
        T.inverse(T.element("f"))


def test_foreign_names_rejected():
    with pytest.raises(ForeignElement):
        torus_algebra().element("rho1")


matrices = st.integers(1, 5).flatmap(lambda r: st.integers(1, 5).flatmap(
    lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=150, deadline=None)
@given(matrices, st.data())
def test_solver_agrees_with_enumeration(rows, data):
    b = data.draw(st.lists(st.integers(0, 1), min_size=len(rows), max_size=len(rows)))
    A = BitMatrix.from_rows(rows)
    sols = gf2_solve_bruteforce(rows, b)
    x = solve_linear(A, b)
    if not sols:
        assert x is None
    else:
        assert tuple(x) in sols
    assert rank(A) == gf2_rank_bruteforce(rows)
    kernel = nullspace(A)
    assert len(kernel) == len(rows[0]) - rank(A)
    zero = [0] * len(rows)
    kernel_all = gf2_solve_bruteforce(rows, zero)
    assert all(tuple(v) in kernel_all for v in kernel)


def test_bitmatrix_bounds():
    with pytest.raises(DimensionMismatch):
        BitMatrix(2, 2, frozenset({(2, 0)}))
    with pytest.raises(DimensionMismatch):
        BitMatrix.from_rows([[1, 0], [1]])
