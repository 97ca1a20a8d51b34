import numpy as np
import pytest

import sys
import pathlib
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))
from fieldranks.certificates import DecompCert, DecompTerm, Factor, RestrictionCert, pure_term
from fieldranks.errors import VerificationFailed
from fieldranks.gf import field_make
from fieldranks.tensor import MatrixTuple, Tensor, identity_tensor

F2 = field_make(2)
F3 = field_make(3)


def diagonal_terms(n=2):
    return tuple(pure_term([np.eye(n, dtype=np.int64)[i]] * 3) for i in range(n))


def test_factor_validation():
    with pytest.raises(ValueError):
        Factor((0, 1), [1, 0])
    factor = Factor((2,), [1, 0])
    assert factor.to_dict() == {"modes": [2], "shape": [2], "entries": [1, 0]}
    with pytest.raises(ValueError):
        factor.entries[0] = 0


def test_term_assembles_in_mode_order():
    term = DecompTerm((Factor((1,), [0, 1]), Factor((0, 2), np.eye(2, dtype=np.int64))))
    T = term.assemble(F2, 3)
    assert T.entries[:, 1, :].tolist() == [[1, 0], [0, 1]]
    assert T.entries[:, 0, :].tolist() == [[0, 0], [0, 0]]
    with pytest.raises(ValueError):
        DecompTerm((Factor((0,), [1, 1]), Factor((0,), [1, 1]))).assemble(F2, 2)


def test_cp_certificate_of_identity():
    cert = DecompCert("cp", F2, (2, 2, 2), diagonal_terms())
    assert cert.rank == 2
    assert cert.verify(identity_tensor(2, 3, F2))
    assert cert.check(identity_tensor(2, 3, F2)) is cert
    assert not cert.verify(identity_tensor(2, 3, F3)), "a certificate only verifies over its own field"


def test_failed_check_raises():
    cert = DecompCert("cp", F2, (2, 2, 2), diagonal_terms()[:1])
    with pytest.raises(VerificationFailed):
        cert.check(identity_tensor(2, 3, F2))


def test_empty_certificate_is_zero():
    cert = DecompCert("slice", F3, (2, 2, 2), ())
    assert cert.rank == 0
    assert cert.verify(Tensor.zeros(F3, (2, 2, 2)))


def test_term_shapes_must_match_the_kind():
    vector = Factor((0,), [1, 1])
    rest = Factor((1, 2), np.eye(2, dtype=np.int64))
    DecompCert("slice", F2, (2, 2, 2), (DecompTerm((vector, rest)),))
    with pytest.raises(ValueError):
        DecompCert("slice", F2, (2, 2, 2), diagonal_terms())
    with pytest.raises(ValueError):
        DecompCert("cp", F2, (2, 2, 2), (DecompTerm((vector, rest)),))
    with pytest.raises(ValueError):
        DecompCert("tucker", F2, (2, 2, 2), ())


def test_certificate_serialization():
    data = DecompCert("cp", F2, (2, 2, 2), diagonal_terms()).to_dict()
    assert data["kind"] == "cp" and data["field"] == {"p": 2, "k": 1}
    assert len(data["terms"]) == 2 and len(data["terms"][0]) == 3


def test_restriction_certificate():
    T = identity_tensor(2, 3, F2)
    project = np.array([[1, 0]], dtype=np.int64)
    cert = RestrictionCert(MatrixTuple(F2, (project,) * 3), T, identity_tensor(1, 3, F2))
    assert cert.check() is cert
    assert cert.to_dict()["mats"] == [[[1, 0]]] * 3

    wrong = RestrictionCert(MatrixTuple(F2, (project,) * 3), T, Tensor.zeros(F2, (1, 1, 1)))
    assert not wrong.verify()
    with pytest.raises(VerificationFailed):
        wrong.check()

    mismatched = RestrictionCert(MatrixTuple(F2, (project,) * 2), T, identity_tensor(1, 2, F2))
    assert not mismatched.verify(), "a tuple of the wrong order does not verify"
