"""Finite-window Heisenberg checks: invariance, locality, expansions."""
import numpy as np
import pytest

from qcadc import heisenberg as hz


def test_q232_window_shape():
    spec = hz.q232_window()
    assert spec.num_qubits == 9
    assert ("past", 0, 0) in spec and ("now", 0, -2) in spec and ("future", 0, 1) in spec


def test_qtlv_window_shape():
    spec = hz.qtlv_window()
    assert spec.num_qubits == 12
    assert ("now", -1, 2) in spec and ("future", -1, 0) in spec


def test_q232_window_unitary_and_commutation():
    spec = hz.q232_window()
    U = hz.build_window_unitary(spec)
    assert np.abs(U.T @ U - np.eye(512)).max() < 1e-12
    assert hz.locals_pairwise_commute(spec)


def test_window_too_large_rejected():
    fat = hz.WindowSpec("q232", tuple(("now", 0, d) for d in range(13)))
    with pytest.raises(ValueError):
        hz.build_window_unitary(fat)


def test_q232_basis_action_majority():
    # now = 01110 around the center writes majority 1 onto the future center
    spec = hz.q232_window()
    perm = hz.window_permutation(spec)
    index = sum(1 << spec.qubit(("now", 0, d)) for d in (-1, 0, 1))
    image = perm[index]
    assert (image >> spec.qubit(("future", 0, 0))) & 1 == 1
    # all-zero window is fixed
    assert perm[0] == 0


def test_q232_sigma_z_invariant():
    spec = hz.q232_window()
    U = hz.build_window_unitary(spec)
    center = spec.qubit(("now", 0, 0))
    oz = hz.conjugate_pauli(U, center, "Z")
    assert oz.support == (center,)
    signs = 1.0 - 2.0 * ((np.arange(512) >> center) & 1)
    assert np.array_equal(oz.matrix, np.diag(signs))


def test_q232_sigma_x_expansion():
    spec = hz.q232_window()
    U = hz.build_window_unitary(spec)
    ox = hz.conjugate_pauli(U, spec.qubit(("now", 0, 0)), "X")
    assert set(ox.support) <= set(range(9))
    future = {spec.qubit(("future", 0, d)) for d in (-1, 0, 1)}
    assert len(future & set(ox.support)) <= 3
    expansion = hz.projector_expansion(ox, 9)
    assert expansion.term_count == 16
    assert expansion.residual < 1e-10
    # every term flips the center and the past cell
    center = spec.qubit(("now", 0, 0))
    past = spec.qubit(("past", 0, 0))
    for term in expansion.terms:
        assert center in term.flip_pattern and past in term.flip_pattern
    # reconstruction from term matrices
    total = sum(hz.term_matrix(t, 9) for t in expansion.terms)
    assert np.abs(total - ox.matrix).max() < 1e-10


def test_expansion_flags_corrupted_operator():
    spec = hz.q232_window()
    U = hz.build_window_unitary(spec)
    ox = hz.conjugate_pauli(U, spec.qubit(("now", 0, 0)), "X")
    corrupted = ox.matrix.astype(float).copy()
    corrupted[3, 5] += 1e-6
    bad = hz.SupportedOperator(corrupted, ox.support)
    assert hz.projector_expansion(bad, 9).residual > 1e-8


def test_sigma_z_single_term_expansion():
    spec = hz.q232_window()
    U = hz.build_window_unitary(spec)
    oz = hz.conjugate_pauli(U, spec.qubit(("now", 0, 0)), "Z")
    expansion = hz.projector_expansion(oz, 9)
    assert expansion.term_count == 1
    assert expansion.residual == 0.0


def test_homomorphism_spot_check():
    spec = hz.q232_window()
    U = hz.build_window_unitary(spec)
    center = spec.qubit(("now", 0, 0))
    ox = hz.conjugate_pauli(U, center, "X")
    oy = hz.conjugate_pauli(U, center, "Y")
    oz = hz.conjugate_pauli(U, center, "Z")
    product = ox.matrix.astype(complex) @ oy.matrix
    assert np.abs(product - 1j * oz.matrix).max() < 1e-10


def test_qtlv_expansions():
    spec = hz.qtlv_window()
    U_plus = hz.build_window_unitary(spec, strings=(1,))
    center = spec.qubit(("now", 1, 0))
    other = spec.qubit(("now", -1, 0))

    same = hz.projector_expansion(hz.conjugate_pauli(U_plus, center, "X"), 12)
    assert same.term_count == 16 and same.residual < 1e-10

    cross_op = hz.conjugate_pauli(U_plus, other, "X")
    cross = hz.projector_expansion(cross_op, 12)
    assert cross.term_count == 4 and cross.residual < 1e-10
    cells = {spec.cells[q] for q in cross_op.support}
    assert cells == {("now", 1, -2), ("now", 1, -1), ("now", -1, 0), ("future", 1, 0)}


def test_qtlv_total_expansion_composes_to_64():
    spec = hz.qtlv_window()
    U_both = hz.build_window_unitary(spec, strings=(1, -1))
    U_plus = hz.build_window_unitary(spec, strings=(1,))
    U_minus = hz.build_window_unitary(spec, strings=(-1,))
    center = spec.qubit(("now", 1, 0))

    outer = hz.projector_expansion(hz.conjugate_pauli(U_plus, center, "X"), 12)
    inner = hz.projector_expansion(hz.conjugate_pauli(U_minus, center, "X"), 12)
    target = hz.conjugate_pauli(U_both, center, "X")
    composed, residual = hz.compose_expansions(outer, inner, center,
                                               target.matrix.astype(complex))
    assert len(composed) == 64
    assert residual < 1e-10
    # the orthogonal projector decomposition collapses the shared cells
    collapsed = hz.projector_expansion(target, 12)
    assert collapsed.term_count == 16


def test_qtlv_sigma_z_invariance_and_commutation():
    spec = hz.qtlv_window()
    U = hz.build_window_unitary(spec)
    assert hz.locals_pairwise_commute(spec)
    for cell in (("now", 1, 0), ("now", -1, 0)):
        q = spec.qubit(cell)
        oz = hz.conjugate_pauli(U, q, "Z")
        assert oz.support == (q,)


def test_report_all_pass():
    for scheme in ("q232", "qtlv"):
        results = hz.heisenberg_report(scheme)
        assert results and all(r.passed for r in results), [
            (r.name, r.detail) for r in results if not r.passed]
