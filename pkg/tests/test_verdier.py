import numpy as np
import pytest

from rhcube.objects import MalformedObjectError
from rhcube.predmod import constant, delta, extension
from rhcube.rh import rh
from rhcube.strata import PolydiskContext, mask_of
from rhcube.verdier import VerdierObject, monodromy_consistency, validate

CTX1 = PolydiskContext(1, 1)


def scalar_pair(lam: complex) -> VerdierObject:
    """Rank-(1,1) object: mono lambda on the shallow node, C = lambda - 1, V = 1."""
    a = mask_of([1])
    return VerdierObject(
        CTX1,
        {0: 1, a: 1},
        {0: {1: [[lam]]}, a: {1: [[lam]]}},
        {(a, 1): [[lam - 1]]},
        {(a, 1): [[1.0]]},
    )


def test_scalar_pair_valid():
    v = scalar_pair(-1.0)
    assert validate(v).ok
    assert monodromy_consistency(v).ok


def test_delta_verdier_valid():
    a = mask_of([1])
    v = VerdierObject(CTX1, {0: 0, a: 1}, {a: {1: [[1.0]]}},
                      {(a, 1): np.zeros((1, 0))}, {(a, 1): np.zeros((0, 1))})
    assert validate(v).ok


def test_perturbed_pairing_detected():
    v = scalar_pair(-1.0)
    bad = v.perturbed("up", (mask_of([1]), 1), 1.0)  # V: 1 -> 2
    report = validate(bad)
    assert not report.ok
    assert any(v_.axiom.startswith("pairing") for v_ in report.violations)


def test_singular_monodromy_detected():
    a = mask_of([1])
    v = VerdierObject(CTX1, {0: 1, a: 1}, {0: {1: [[0.0]]}, a: {1: [[1.0]]}},
                      {(a, 1): [[0.0]]}, {(a, 1): [[0.0]]})
    report = validate(v)
    assert any(v_.axiom == "invertibility" for v_ in report.violations)


def test_monodromy_consistency_flags_mismatch():
    v = scalar_pair(-1.0)
    v.mono[mask_of([1])][1][0, 0] = 1.0  # force deep mono to 1 while CV = -2
    report = monodromy_consistency(v)
    assert not report.ok
    assert report.violations[0].node == (1,)


def test_rh_output_monodromy_consistent():
    for e in (constant(CTX1, 0.25), delta(CTX1), extension(CTX1, 1.0)):
        v = rh(e)
        assert validate(v).ok
        assert monodromy_consistency(v).ok


def test_direct_sum_and_sub_quotient():
    from rhcube.modalg import isomorphic

    v1 = scalar_pair(-1.0)
    v2 = scalar_pair(2.0)
    s = v1.direct_sum(v2)
    assert validate(s).ok
    assert s.dimension_vector() == {(): 2, (1,): 2}
    # recover the lambda = -1 eigen-summand
    spaces = {0: np.array([[1.0], [0.0]]), mask_of([1]): np.array([[1.0], [0.0]])}
    sub, quot = s.sub_quotient(spaces)
    assert validate(sub).ok and validate(quot).ok
    assert isomorphic(sub, v1).status == "yes"
    assert isomorphic(quot, v2).status == "yes"


def test_nonsplit_unipotent_extension_sub_quotient():
    # image of the connection-side extension: unipotent Jordan monodromy
    v = rh(extension(CTX1, 1.0))
    a = mask_of([1])
    assert np.allclose(v.mono[a][1], [[1.0, 2j * np.pi], [0.0, 1.0]], atol=1e-10)
    spaces = {0: np.zeros((1, 0)), a: np.array([[1.0], [0.0]])}
    sub, quot = v.sub_quotient(spaces)
    assert validate(sub).ok and validate(quot).ok
    assert sub.dimension_vector() == {(): 0, (1,): 1}


def test_validate_basis_change_invariant():
    rng = np.random.default_rng(8)
    v = rh(constant(PolydiskContext(2, 2), {1: 0.3, 2: 0.6}))
    basis = {m: np.eye(v.dims[m]) + 0.2 * rng.standard_normal((v.dims[m],) * 2)
             for m in v.node_order}
    assert validate(v.conjugate(basis), 1e-7).ok


def test_functoriality_of_operations_with_direct_sum():
    v1 = scalar_pair(3.0)
    v2 = scalar_pair(0.5 + 0.5j)
    s = v1.direct_sum(v2)
    r1 = validate(v1)
    r2 = validate(v2)
    rs = validate(s)
    assert r1.ok and r2.ok and rs.ok
    assert monodromy_consistency(s).ok


def test_shape_errors_are_malformed():
    with pytest.raises(MalformedObjectError):
        VerdierObject(CTX1, {0: 1, 1: 1}, {0: {1: np.eye(2)}}, {}, {})
