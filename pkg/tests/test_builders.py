import numpy as np
import pytest

from rhcube.builders import BuilderError, gen, parse_component_spec, random_commuting_monodromies
from rhcube.linalg import commute_residual
from rhcube.objects import max_entry_deviation
from rhcube.predmod import good_residual_eigenvalues, validate


def test_gen_delta():
    e = gen("delta", {"r": 1})
    assert validate(e).ok
    assert e.dimension_vector() == {(): 0, (1,): 1}


def test_gen_constant_alpha():
    e = gen("constant", {"r": 1, "alpha": "0.3"})
    assert validate(e).ok
    assert np.allclose(e.theta[0][1], 0.3)


def test_gen_local_system_valid_and_good():
    e = gen("local-system", {"r": 2, "n": 3}, seed=7)
    assert validate(e).ok
    assert good_residual_eigenvalues(e).good


def test_gen_local_system_deterministic():
    a = gen("local-system", {"r": 2, "n": 3}, seed=7)
    b = gen("local-system", {"r": 2, "n": 3}, seed=7)
    assert max_entry_deviation(a, b) == 0.0
    c = gen("local-system", {"r": 2, "n": 3}, seed=8)
    assert max_entry_deviation(a, c) > 1e-6


def test_gen_direct_sum_of_specs():
    e = gen("direct-sum", {"r": 1, "of": ["delta", "constant:alpha=0.3"]})
    assert validate(e).ok
    assert e.dimension_vector() == {(): 1, (1,): 2}


def test_gen_direct_sum_nested_objects():
    e = gen("direct-sum", {"r": 1, "of": [{"builder": "extension", "alpha": 2.0},
                                          "delta"]})
    assert validate(e).ok
    assert e.dimension_vector() == {(): 1, (1,): 3}


def test_gen_extension_and_esnault():
    ext = gen("extension", {"r": 1, "alpha": 1.5})
    assert validate(ext).ok
    es = gen("esnault", {})
    assert validate(es).ok
    assert not good_residual_eigenvalues(es).good
    es_good = gen("esnault", {"good": True})
    assert good_residual_eigenvalues(es_good).good


def test_gen_unknown_builder():
    with pytest.raises(BuilderError):
        gen("mystery", {})


def test_gen_validates_params():
    with pytest.raises(BuilderError):
        gen("direct-sum", {"of": []})
    with pytest.raises(BuilderError):
        gen("constant", {"r": 3, "d": 1})


def test_component_spec_parser():
    name, params = parse_component_spec("constant:alpha=0.3,r=2")
    assert name == "constant"
    assert params == {"alpha": "0.3", "r": "2"}
    assert parse_component_spec("delta") == ("delta", {})
    with pytest.raises(BuilderError):
        parse_component_spec("constant:alpha")


def test_random_commuting_monodromies_commute_exactly():
    rng = np.random.default_rng(5)
    mats = random_commuting_monodromies(3, 4, rng)
    assert len(mats) == 3
    for i in range(3):
        for j in range(i + 1, 3):
            assert commute_residual(mats[i], mats[j]) < 1e-12
        assert np.linalg.svd(mats[i], compute_uv=False)[-1] > 1e-3


def test_gen_metadata_provenance():
    e = gen("local-system", {"r": 1, "n": 2}, seed=42)
    assert e.metadata["name"] == "local-system"
    assert e.metadata["seed"] == 42
