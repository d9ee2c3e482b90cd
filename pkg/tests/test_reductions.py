import math

import numpy as np
import pytest

from optslater import (
    FermionState,
    NotCertain,
    NotSimultaneous,
    WrongShape,
    basis_state,
    branch,
    builtin_state,
    decompose_full,
    factor_out,
    find_certain_orbitals,
    find_simultaneous_pairs,
    haar_unitary,
    normalize,
    one_particle_rdm,
    optimize_slater,
    overlap,
    random_state,
    rotate_basis,
    slater_form_nplus1,
    wedge,
)
from optslater.reductions import Branch, Factor, Leaf

S23, S13 = math.sqrt(2 / 3), math.sqrt(1 / 3)
A, B, C = 0.8, 0.5, math.sqrt(0.11)


def e(k, d):
    v = np.zeros(d, dtype=complex)
    v[k - 1] = 1
    return v


def parallel(u, v):
    return abs(abs(np.vdot(u, v)) - 1) < 1e-10


def test_certain_orbitals():
    found = find_certain_orbitals(builtin_state("example2"))
    assert len(found) == 1 and parallel(found[0], e(1, 5))
    assert find_certain_orbitals(builtin_state("ghz")) == []
    found = find_certain_orbitals(basis_state(6, 1, 2, 3))
    assert len(found) == 3
    P = sum(np.outer(f, f.conj()) for f in found)
    assert np.allclose(P, np.diag([1, 1, 1, 0, 0, 0]))


def test_factor_out_examples():
    child = factor_out(builtin_state("example2"), e(1, 5))
    assert child.allclose(builtin_state("ghz", S23, S13, 2), atol=1e-12)
    assert factor_out(basis_state(6, 1, 2, 3), e(1, 6)).allclose(basis_state(5, 1, 2), atol=1e-14)
    with pytest.raises(NotCertain):
        factor_out(builtin_state("ghz"), e(1, 6))


def test_factor_out_rotated_orbital():
    rng = np.random.default_rng(5)
    U = haar_unitary(6, rng)
    inner = random_state(2, 5, seed=rng)
    # psi = f ^ inner' with f = U e1, inner' on the complement
    s = rotate_basis(wedge(e(1, 6), FermionState.from_vector(6, 2, _lift(inner))), U)
    f = U[:, 0]
    child = factor_out(s, f)
    assert child.n == 2 and child.d == 5
    assert optimize_slater(child).value == pytest.approx(optimize_slater(s).value, abs=1e-8)


def _lift(state):
    # embed a state on orbitals 1..5 into orbitals 2..6 of d = 6
    from optslater import embed
    return embed(state, np.eye(6)[:, 1:]).vector


def test_factor_preserves_value_on_conditioned_random_states():
    for seed in range(5):
        rng = np.random.default_rng(seed)
        inner = random_state(2, 5, seed=rng)
        s = wedge(e(1, 6), FermionState.from_vector(6, 2, _lift(inner)))
        child = factor_out(s, e(1, 6))
        assert child.allclose(inner, atol=1e-12)
        assert optimize_slater(child).value == pytest.approx(optimize_slater(s).value, abs=1e-8)


def test_simultaneous_pairs():
    pairs = find_simultaneous_pairs(builtin_state("ghz"))
    assert {(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)} == set(pairs)
    pairs = find_simultaneous_pairs(builtin_state("example3"))
    assert (1, 2) in pairs and (6, 7) in pairs and (3, 4) not in pairs
    assert find_simultaneous_pairs(random_state(3, 6, seed=0)) == []


def test_unoccupied_orbitals_do_not_pair():
    assert find_simultaneous_pairs(basis_state(5, 1, 2)) == [(1, 2)]


def test_branch_ghz():
    g = builtin_state("ghz")
    sp = branch(g, 1, 2)
    assert sp.weight_with == pytest.approx(2 / 3) and sp.weight_without == pytest.approx(1 / 3)
    assert sp.with_pair.allclose(basis_state(4, 1), atol=1e-14)
    assert sp.without.allclose(basis_state(4, 2, 3, 4), atol=1e-14)
    assert max(sp.weight_with, sp.weight_without) == pytest.approx(optimize_slater(g).value, abs=1e-8)
    with pytest.raises(NotSimultaneous):
        branch(g, 1, 4)


def test_branch_sign():
    # e1^e2^e3 = e2^e3^e1 and e2^e3^e4: both keep a plus sign
    s = normalize(FermionState(4, 3, {(1, 2, 3): 1, (2, 3, 4): 1}))
    sp = branch(s, 2, 3)
    assert sp.keep == (1, 4) and sp.weight_with == pytest.approx(1)
    assert np.allclose(sp.with_pair.vector, [2 ** -0.5, 2 ** -0.5])
    # e1^e2^e3 = -e1^e3^e2; pulling (1, 3) to the front leaves -e2
    s = FermionState(4, 3, {(1, 2, 3): 1})
    sp = branch(s, 1, 3)
    assert sp.with_pair.amplitude((1,)) == pytest.approx(-1)
    assert sp.without is None and sp.weight_without == 0


def test_branch_reconstruct():
    s = builtin_state("example3")
    tree = decompose_full(s)
    assert isinstance(tree.root, Branch)
    assert tree.reconstruct().allclose(s, atol=1e-12)


def test_example3_tree():
    s = builtin_state("example3")
    tree = decompose_full(s)
    leaves = tree.leaves()
    assert len(leaves) == 3
    for leaf in leaves:
        assert np.count_nonzero(np.abs(leaf.state.vector) > 1e-12) == 1
    assert tree.imax() == pytest.approx(max(A, B, C) ** 2, abs=1e-8)
    assert tree.imax() == pytest.approx(optimize_slater(s).value, abs=1e-8)


def test_example3b_tree():
    s = builtin_state("example3b")
    tree = decompose_full(s)
    assert tree.imax() == pytest.approx(0.64, abs=1e-8)
    assert tree.reconstruct().allclose(s, atol=1e-10)
    value, frame = tree.solve()
    assert abs(overlap(frame, s)) ** 2 == pytest.approx(value, abs=1e-10)


@pytest.mark.parametrize("name", ["ghz", "example2", "example3", "example3b", "example4", "eq36", "cyclic"])
def test_tree_reconstructs_and_matches_optimizer(name):
    s = builtin_state(name)
    tree = decompose_full(s)
    assert tree.reconstruct().allclose(s, atol=1e-10)
    assert tree.imax() == pytest.approx(optimize_slater(s).value, abs=1e-8)


def test_tree_node_shapes():
    def walk(node):
        n = node.reconstruct().n
        if isinstance(node, Factor):
            assert node.child.reconstruct().n == n - 1
            walk(node.child)
        elif isinstance(node, Branch):
            assert node.child_with.reconstruct().n == n - 2
            walk(node.child_with)
            if node.child_without is not None:
                assert node.child_without.reconstruct().n == n
                walk(node.child_without)

    for name in ["example2", "example3", "example3b", "ghz"]:
        walk(decompose_full(builtin_state(name)).root)
    tree = decompose_full(builtin_state("example2"))
    assert isinstance(tree.root, Factor)
    desc = tree.describe()
    assert desc["kind"] == "factor" and desc["orbital"] == 1


def test_generic_state_is_single_leaf():
    tree = decompose_full(random_state(3, 6, seed=1))
    assert isinstance(tree.root, Leaf)
    assert tree.describe()["kind"] == "leaf"


def test_slater_form_nplus1():
    s = builtin_state("example4")
    F = slater_form_nplus1(s)
    assert abs(overlap(F, s)) ** 2 == pytest.approx(1, abs=1e-12)
    F = slater_form_nplus1(basis_state(3, 1, 2))
    assert np.allclose(F @ F.conj().T, np.diag([1, 1, 0]), atol=1e-14)
    assert overlap(F, basis_state(3, 1, 2)) == pytest.approx(1)
    with pytest.raises(WrongShape):
        slater_form_nplus1(random_state(2, 4, seed=0))


def test_slater_form_nplus1_random():
    for n in (1, 2, 3, 4):
        for seed in range(10):
            s = random_state(n, n + 1, seed=seed)
            F = slater_form_nplus1(s)
            ov = overlap(F, s)
            assert abs(ov) ** 2 == pytest.approx(1, abs=1e-10)
            assert abs(ov.imag) < 1e-10 and ov.real > 0
            occ = np.sort(np.linalg.eigvalsh(one_particle_rdm(s)))
            assert np.allclose(occ, [0] + [1] * n, atol=1e-8)
