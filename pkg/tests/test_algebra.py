import json

import numpy as np
import pytest

from drspace import algebra as alg_mod
from drspace.algebra import (
    CliffordModuleSpec,
    CliffordValidationError,
    build_algebra,
    bracket_v,
    j_map,
    load_spec,
    octonion_table,
    octonion_triples,
    sample_identity_residuals,
    save_spec,
    standard_instance,
)


# reference quaternion multiplication table: (a, b) -> (sign, index)
# for e_a e_b over the basis (1, i, j, k)
QUAT_REF = {
    (1, 1): (-1, 0), (2, 2): (-1, 0), (3, 3): (-1, 0),
    (1, 2): (1, 3), (2, 1): (-1, 3),
    (2, 3): (1, 1), (3, 2): (-1, 1),
    (3, 1): (1, 2), (1, 3): (-1, 2),
}


def test_heisenberg_generator_is_symplectic():
    spec = standard_instance("heisenberg_q", 1)
    assert spec.m == 2 and spec.k == 1
    J = spec.generators[0]
    np.testing.assert_allclose(J, [[0.0, -1.0], [1.0, 0.0]])
    # spec example: J_{Y_1} (1, 0) = (0, 1)
    alg = build_algebra(spec)
    np.testing.assert_allclose(j_map(alg, [1.0], [1.0, 0.0]), [0.0, 1.0])


def test_quaternionic_generators_match_reference_table():
    spec = standard_instance("quaternionic_q", 1)
    basis = np.eye(4)
    for a in range(1, 4):
        L = spec.generators[a - 1]
        for b in range(4):
            got = L @ basis[b]
            if b == 0:
                expect = basis[a]
            else:
                sign, idx = QUAT_REF[(a, b)]
                expect = sign * basis[idx]
            np.testing.assert_allclose(got, expect, atol=0)


def test_standard_instances_validate(rng):
    for name, q, m, k in [
        ("heisenberg_q", 1, 2, 1),
        ("heisenberg_q", 3, 6, 1),
        ("quaternionic_q", 1, 4, 3),
        ("quaternionic_q", 2, 8, 3),
        ("cayley", 1, 8, 7),
        ("htype_k2", 1, 4, 2),
    ]:
        spec = standard_instance(name, q)
        assert (spec.m, spec.k) == (m, k)
        alg = build_algebra(spec)
        res = sample_identity_residuals(alg, rng, 200)
        assert max(res.values()) < 1e-12


def test_unknown_instance_name():
    with pytest.raises(ValueError, match="unknown instance"):
        standard_instance("nope")


def test_identity_generator_rejected():
    spec = CliffordModuleSpec(m=2, k=1, generators=np.eye(2)[None])
    with pytest.raises(CliffordValidationError) as exc:
        build_algebra(spec)
    assert "residual 2" in str(exc.value)


def test_failed_anticommutator_named():
    gens = np.stack([standard_instance("heisenberg_q", 1).generators[0]] * 2)
    spec = CliffordModuleSpec(m=2, k=2, generators=gens)
    with pytest.raises(CliffordValidationError, match="anticommutator"):
        build_algebra(spec)


def test_octonion_norm_multiplicativity(rng):
    # independent oracle for the Cayley table: |xy| = |x||y|
    table = octonion_table()
    x = rng.standard_normal((100, 8))
    y = rng.standard_normal((100, 8))
    prod = np.einsum("abc,na,nb->nc", table, x, y)
    np.testing.assert_allclose(
        np.linalg.norm(prod, axis=1),
        np.linalg.norm(x, axis=1) * np.linalg.norm(y, axis=1),
        rtol=1e-12,
    )


def test_octonion_triples_form_fano_plane():
    triples = octonion_triples()
    assert len(triples) == 7
    # every pair of distinct imaginary units lies on exactly one line
    seen = set()
    for t in triples:
        for i in range(3):
            pair = frozenset((t[i], t[(i + 1) % 3]))
            assert pair not in seen
            seen.add(pair)
    assert len(seen) == 21


def test_j_map_linearity_and_isometry(rng):
    alg = build_algebra(standard_instance("cayley"))
    Z = rng.standard_normal((50, 7))
    V = rng.standard_normal((50, 8))
    assert np.max(np.abs(j_map(alg, np.zeros(7), V[0]))) == 0.0
    norms = np.linalg.norm(j_map(alg, Z, V), axis=1)
    np.testing.assert_allclose(
        norms, np.linalg.norm(Z, axis=1) * np.linalg.norm(V, axis=1), rtol=1e-12
    )


def test_bracket_j_adjoint_and_identities(rng):
    alg = build_algebra(standard_instance("quaternionic_q", 1))
    V = rng.standard_normal(4)
    V1 = rng.standard_normal(4)
    Z = rng.standard_normal(3)
    # antisymmetry and the defining adjoint relation
    assert np.max(np.abs(bracket_v(alg, V, V))) < 1e-15
    lhs = bracket_v(alg, V, V1) @ Z
    rhs = j_map(alg, Z, V) @ V1
    assert abs(lhs - rhs) < 1e-13
    # [V, J_Z V] = |V|^2 Z
    np.testing.assert_allclose(
        bracket_v(alg, V, j_map(alg, Z, V)), np.dot(V, V) * Z, atol=1e-12
    )


def test_bracket_constants_antisymmetric():
    alg = build_algebra(standard_instance("htype_k2"))
    c = alg.bracket_constants
    assert np.max(np.abs(c + np.transpose(c, (1, 0, 2)))) == 0.0


def test_spec_file_roundtrip(tmp_path):
    spec = standard_instance("htype_k2")
    path = tmp_path / "inst.json"
    save_spec(spec, path)
    loaded = load_spec(path)
    np.testing.assert_array_equal(loaded.generators, spec.generators)
    assert (loaded.m, loaded.k) == (spec.m, spec.k)


def test_malformed_spec_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"m": 2, "k": 1}))
    with pytest.raises(CliffordValidationError, match="malformed"):
        load_spec(path)


def test_parse_preset_tokens():
    spec = alg_mod.parse_preset("heisenberg_q=2")
    assert spec.m == 4
    spec = alg_mod.parse_preset("quaternionic")
    assert (spec.m, spec.k) == (4, 3)
    with pytest.raises(ValueError):
        alg_mod.parse_preset("quaternionic_q=x")
