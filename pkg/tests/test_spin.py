import numpy as np
import pytest
from hypothesis import given, strategies as st

from dicke_blockade.errors import PreconditionError
from dicke_blockade.spin import (
    DensityMatrix, DickeBasis, PureState, dicke_state, expectation, number_operator, op_collective,
    superposition,
)

N_RANGE = st.integers(1, 20)


def test_basis_layout():
    b = DickeBasis(4)
    assert b.j == 2 and b.dim == 5
    assert list(b.m_values) == [-2, -1, 0, 1, 2]
    assert b.index(-2) == 0 and b.index(2) == 4
    b3 = DickeBasis(3)
    assert b3.index(0.5) == 2
    with pytest.raises(PreconditionError):
        b3.index(1)
    with pytest.raises(PreconditionError):
        b.index(3)
    with pytest.raises(PreconditionError):
        DickeBasis(0)


def test_dicke_state_rows():
    s = dicke_state(DickeBasis(2), 1)
    assert s.amplitudes[-1] == 1 and np.sum(np.abs(s.amplitudes)) == 1
    g = dicke_state(DickeBasis(4), -2)
    assert g.amplitudes[0] == 1
    with pytest.raises(PreconditionError):
        dicke_state(DickeBasis(2), 1.5)


def test_ladder_elements_spin_one():
    jp = op_collective(DickeBasis(2), "J_plus")
    assert np.isclose(jp[1, 0], np.sqrt(2)) and np.isclose(jp[2, 1], np.sqrt(2))


def test_expectations():
    b = DickeBasis(2)
    psi = superposition(b, [0, 1])
    assert np.isclose(expectation(number_operator(b), psi), 2.0)
    for m in b.m_values:
        assert np.isclose(expectation(op_collective(b, "J_z"), dicke_state(b, m)), m)
    assert expectation(number_operator(b), dicke_state(b, -1)) == 0
    assert np.isclose(expectation(number_operator(b), psi.density_matrix()), 2.0)
    with pytest.raises(PreconditionError):
        expectation(np.eye(2), psi)


def test_state_validation():
    b = DickeBasis(2)
    with pytest.raises(PreconditionError):
        PureState(b, np.ones(3))
    with pytest.raises(PreconditionError):
        DensityMatrix(b, np.diag([1.5, -0.5, 0]))
    with pytest.raises(PreconditionError):
        DensityMatrix(b, np.eye(3))
    with pytest.raises(PreconditionError):
        op_collective(b, "J_y")


@given(N_RANGE)
def test_operator_identities(n):
    b = DickeBasis(n)
    jp, jm, jz = (op_collective(b, w) for w in ("J_plus", "J_minus", "J_z"))
    assert np.array_equal(jp, jm.conj().T)
    assert np.max(np.abs(jp @ jm - number_operator(b))) < 1e-12
    assert np.max(np.abs(jp @ jm - jm @ jp - 2 * jz)) < 1e-12
    casimir = 0.5 * (jp @ jm + jm @ jp) + jz @ jz
    assert np.max(np.abs(casimir - op_collective(b, "J_squared"))) < 1e-10


@given(N_RANGE, st.integers(1, 4))
def test_normal_order_annihilates_ground(n, k):
    b = DickeBasis(n)
    jp, jm = op_collective(b, "J_plus"), op_collective(b, "J_minus")
    op = np.linalg.matrix_power(jp, k) @ np.linalg.matrix_power(jm, k)
    assert abs(expectation(op, dicke_state(b, -b.j))) == 0
