"""Brute-force Heisenberg-picture checks on finite lattice windows.

For each scheme a window collects every lattice cell (past / now / future
slice, string, site offset) that one step's local unitaries can couple to
the center cell.  The window unitary is the product of all local
Toffoli/CNOT factors supported inside the window; conjugating a single
Pauli through it must stay inside the locality region, leave every
sigma-z untouched, and expand into projector-times-flip terms that sum
back to the conjugated operator.

All operators are dense matrices on the window (512- to 4096-dimensional).
The step gates are basis permutations, so unitaries and conjugations are
assembled with exact index arithmetic before any floating-point check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Cell = tuple[str, int, int]  # (slice, string j, site offset); j = 0 for the single-string scheme

SUPPORT_TOL = 1e-10
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class WindowSpec:
    """An ordered list of lattice cells; list position = window qubit index."""
    scheme: str
    cells: tuple[Cell, ...]

    @property
    def num_qubits(self) -> int:
        return len(self.cells)

    def qubit(self, cell: Cell) -> int:
        return self.cells.index(cell)

    def __contains__(self, cell: Cell) -> bool:
        return cell in self.cells


def q232_window() -> WindowSpec:
    """Past center, five now cells, three future cells (9 qubits)."""
    cells = [("past", 0, 0)]
    cells += [("now", 0, d) for d in (-2, -1, 0, 1, 2)]
    cells += [("future", 0, d) for d in (-1, 0, 1)]
    return WindowSpec("q232", tuple(cells))


def qtlv_window() -> WindowSpec:
    """Closure of both strings' expansions around now(+1, 0) (12 qubits)."""
    cells = [("past", 1, 0)]
    cells += [("now", 1, d) for d in (-2, -1, 0, 1)]
    cells += [("now", -1, d) for d in (0, 1, 2)]
    cells += [("future", 1, d) for d in (0, 1, 2)]
    cells.append(("future", -1, 0))
    return WindowSpec("qtlv", tuple(cells))


def window_for(scheme: str) -> WindowSpec:
    if scheme == "q232":
        return q232_window()
    if scheme == "qtlv":
        return qtlv_window()
    raise ValueError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# Local unitaries restricted to the window
# ---------------------------------------------------------------------------
# A "local" is one cell's update factor: the Toffoli trio writing that
# cell's future value plus (when the past cell is in the window) the
# decoupling CNOT.  Gates with any support cell outside the window are
# dropped; by construction of the windows nothing that could act on the
# center observable is lost.

def _toffoli_controls(scheme: str, j: int, k: int) -> list[Cell]:
    if scheme == "q232":
        return [("now", 0, k - 1), ("now", 0, k), ("now", 0, k + 1)]
    return [("now", j, k - j), ("now", j, k - 2 * j), ("now", -j, k)]


def window_locals(spec: WindowSpec, strings: tuple[int, ...] = (1, -1)) -> list[list[tuple]]:
    """Per-site local gate lists: [("TOFFOLI", c1, c2, t), ("CNOT", c, t)] on window qubits."""
    if spec.scheme == "q232":
        strings = (0,)
    locals_: list[list[tuple]] = []
    for cell in spec.cells:
        slice_, j, k = cell
        if slice_ != "future" or j not in strings:
            continue
        controls = _toffoli_controls(spec.scheme, j, k)
        if any(c not in spec for c in controls):
            continue
        t = spec.qubit(cell)
        a, b, c = (spec.qubit(ctrl) for ctrl in controls)
        gates = [("TOFFOLI", a, c, t), ("TOFFOLI", a, b, t), ("TOFFOLI", b, c, t)]
        past = ("past", j, k)
        if past in spec and ("now", j, k) in spec:
            gates.append(("CNOT", spec.qubit(("now", j, k)), spec.qubit(past)))
        locals_.append(gates)
    return locals_


def _apply_gates_to_indices(indices: np.ndarray, gates: list[tuple]) -> np.ndarray:
    """Image of each basis index under a sequence of Toffoli/CNOT gates."""
    out = indices.copy()
    for gate in gates:
        if gate[0] == "TOFFOLI":
            _, a, b, t = gate
            hit = ((out >> a) & 1) & ((out >> b) & 1)
        else:
            _, c, t = gate
            hit = (out >> c) & 1
        out ^= hit << t
    return out


def window_permutation(spec: WindowSpec, strings: tuple[int, ...] = (1, -1)) -> np.ndarray:
    """perm with U|b> = |perm[b]> for the product of all window locals."""
    indices = np.arange(1 << spec.num_qubits, dtype=np.int64)
    perm = indices
    for gates in window_locals(spec, strings):
        perm = _apply_gates_to_indices(perm, gates)
    return perm


def build_window_unitary(spec: WindowSpec, strings: tuple[int, ...] = (1, -1)) -> np.ndarray:
    """Dense window unitary (a 0/1 permutation matrix)."""
    if spec.num_qubits > 12:
        raise ValueError("dense window algebra is limited to 12 qubits")
    perm = window_permutation(spec, strings)
    dim = perm.size
    U = np.zeros((dim, dim), dtype=np.float64)
    U[perm, np.arange(dim)] = 1.0
    return U


def locals_pairwise_commute(spec: WindowSpec, strings: tuple[int, ...] = (1, -1)) -> bool:
    """Exact commutation of every pair of local unitaries on the window."""
    locs = window_locals(spec, strings)
    indices = np.arange(1 << spec.num_qubits, dtype=np.int64)
    for i in range(len(locs)):
        for j in range(i + 1, len(locs)):
            ab = _apply_gates_to_indices(_apply_gates_to_indices(indices, locs[i]), locs[j])
            ba = _apply_gates_to_indices(_apply_gates_to_indices(indices, locs[j]), locs[i])
            if not np.array_equal(ab, ba):
                return False
    return True


# ---------------------------------------------------------------------------
# Conjugation and support detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportedOperator:
    """A dense window operator together with its detected support."""
    matrix: np.ndarray
    support: tuple[int, ...]


def _pauli_entries(kind: str, qubit: int, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column -> (row, value) of a single-qubit Pauli on basis indices."""
    bit = (indices >> qubit) & 1
    if kind == "X":
        return indices ^ (1 << qubit), np.ones(indices.size)
    if kind == "Y":
        return indices ^ (1 << qubit), 1j * (1.0 - 2.0 * bit)
    if kind == "Z":
        return indices, 1.0 - 2.0 * bit
    raise ValueError(f"unknown Pauli {kind!r}")


def _sparse_perm(O: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """(row_of_col, value_of_col) when O has exactly one nonzero per column."""
    rows, cols = np.nonzero(np.abs(O) > SUPPORT_TOL)
    dim = O.shape[0]
    if rows.size != dim or np.unique(cols).size != dim:
        return None
    row_of = np.empty(dim, dtype=np.int64)
    val_of = np.empty(dim, dtype=O.dtype)
    row_of[cols] = rows
    val_of[cols] = O[rows, cols]
    return row_of, val_of


def _as_permutation(U: np.ndarray) -> np.ndarray | None:
    """The permutation vector of a 0/1 permutation matrix, else None."""
    sp = _sparse_perm(U)
    if sp is None:
        return None
    row_of, val_of = sp
    if not np.allclose(val_of, 1.0, atol=1e-12):
        return None
    return row_of


def conjugate_pauli(U: np.ndarray, qubit: int, kind: str = "X") -> SupportedOperator:
    """U^dagger P U for a single-qubit Pauli P on a window qubit.

    Permutation unitaries (every window unitary here) take an exact index
    path; anything else falls back to dense matrix products.
    """
    dim = U.shape[0]
    num_qubits = int(np.log2(dim))
    perm = _as_permutation(U)
    if perm is not None:
        inv = np.empty_like(perm)
        inv[perm] = np.arange(dim)
        rows_of_perm, values = _pauli_entries(kind, qubit, perm)
        dtype = np.complex128 if kind == "Y" else np.float64
        row_of = inv[rows_of_perm]
        val_of = values.astype(dtype)
        O = np.zeros((dim, dim), dtype=dtype)
        O[row_of, np.arange(dim)] = val_of
        return SupportedOperator(O, operator_support(O, num_qubits, _sparse=(row_of, val_of)))
    rows, values = _pauli_entries(kind, qubit, np.arange(dim))
    P = np.zeros((dim, dim), dtype=np.complex128)
    P[rows, np.arange(dim)] = values
    O = U.conj().T @ P @ U
    return SupportedOperator(O, operator_support(O, num_qubits))


def _support_dense(O: np.ndarray, num_qubits: int, tol: float) -> tuple[int, ...]:
    support = []
    for q in range(num_qubits):
        pre = 1 << (num_qubits - 1 - q)
        post = 1 << q
        blocks = O.reshape(pre, 2, post, pre, 2, post)
        off = max(np.abs(blocks[:, 0, :, :, 1, :]).max(),
                  np.abs(blocks[:, 1, :, :, 0, :]).max())
        diag = np.abs(blocks[:, 0, :, :, 0, :] - blocks[:, 1, :, :, 1, :]).max()
        if off > tol or diag > tol:
            support.append(q)
    return tuple(support)


def operator_support(O: np.ndarray, num_qubits: int, tol: float = SUPPORT_TOL,
                     _sparse: tuple[np.ndarray, np.ndarray] | None = None) -> tuple[int, ...]:
    """Qubits where O fails the partial-trace triviality test.

    Qubit q is trivial iff O = tr_q(O)/2 (x) 1_q, i.e. both off-diagonal
    blocks in q vanish and the two diagonal blocks agree.  Operators with
    one nonzero per column take an equivalent O(dim)-per-qubit index path.
    """
    sp = _sparse if _sparse is not None else _sparse_perm(O)
    if sp is None:
        return _support_dense(O, num_qubits, tol)
    row_of, val_of = sp
    idx = np.arange(row_of.size)
    support = []
    for q in range(num_qubits):
        e = 1 << q
        if np.any(((row_of ^ idx) >> q) & 1):
            support.append(q)  # some entry crosses the q block boundary
            continue
        same_rows = np.array_equal(row_of[idx ^ e], row_of ^ e)
        if not same_rows or np.abs(val_of[idx ^ e] - val_of).max() > tol:
            support.append(q)
    return tuple(support)


# ---------------------------------------------------------------------------
# Projector / flip-pattern expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionTerm:
    """One summand: pi(+/-) pattern on the diagonal cells, X pattern elsewhere."""
    projector_pattern: tuple[tuple[int, str], ...]  # (qubit, '+'/'-')
    flip_pattern: tuple[int, ...]                   # qubits carrying sigma-x
    coefficient: complex


@dataclass(frozen=True)
class Expansion:
    terms: tuple[ExpansionTerm, ...]
    residual: float

    @property
    def term_count(self) -> int:
        return len(self.terms)


def _single_pauli_string(sp: tuple[np.ndarray, np.ndarray] | None,
                         num_qubits: int) -> ExpansionTerm | None:
    """Match against c * (product of sigma-z / sigma-x), e.g. an invariant sigma-z."""
    if sp is None:
        return None
    row_of, val_of = sp
    idx = np.arange(row_of.size)
    masks = row_of ^ idx
    if np.unique(masks).size != 1:
        return None
    mask = int(masks[0])
    flips = tuple(q for q in range(num_qubits) if (mask >> q) & 1)
    base = val_of[0]
    signs = val_of / base
    z_mask = 0
    for q in range(num_qubits):
        if abs(signs[1 << q] + 1.0) < 1e-9:
            z_mask |= 1 << q
    expect = 1.0 - 2.0 * (np.bitwise_count(idx & z_mask) & 1)
    if not np.allclose(signs, expect, atol=1e-9):
        return None
    zs = tuple((q, "z") for q in range(num_qubits) if (z_mask >> q) & 1)
    return ExpansionTerm(zs, flips, complex(base))


def projector_expansion(op: SupportedOperator, num_qubits: int) -> Expansion:
    """Decompose a conjugated Pauli into projector-times-flip terms.

    Diagonal cells are auto-detected as support qubits commuting with
    their sigma-z; the remaining support carries sigma-x / identity
    factors.  The residual is the max-abs difference between the term sum
    and the operator; anything above 1e-10 marks a failed decomposition.
    """
    O = op.matrix
    sp = _sparse_perm(O)
    single = _single_pauli_string(sp, num_qubits)
    if single is not None:
        residual = 0.0
        return Expansion((single,), residual)

    diag_cells = [q for q in op.support if _commutes_with_z(O, q, sp)]
    flip_cells = [q for q in range(num_qubits) if q not in diag_cells]

    # Reorder so diagonal cells are the most significant axes of rows/cols.
    order = diag_cells + flip_cells  # qubit -> axis position (MSB first within groups)
    axes_row = [num_qubits - 1 - q for q in order]
    tensor = O.reshape((2,) * (2 * num_qubits))
    tensor = np.moveaxis(tensor, axes_row, range(num_qubits))
    tensor = np.moveaxis(tensor, [num_qubits + a for a in axes_row],
                         range(num_qubits, 2 * num_qubits))
    d = len(diag_cells)
    f = num_qubits - d
    blocks = tensor.reshape(1 << d, 1 << f, 1 << d, 1 << f)

    terms: list[ExpansionTerm] = []
    residual = 0.0
    flip_idx = np.arange(1 << f)
    for s_row in range(1 << d):
        for s_col in range(1 << d):
            A = blocks[s_row, :, s_col, :]
            if s_row != s_col:
                if A.size:
                    residual = max(residual, float(np.abs(A).max()))
                continue
            recon = np.zeros_like(A)
            for mask in range(1 << f):
                coeff = A[flip_idx ^ mask, flip_idx].sum() / (1 << f)
                if abs(coeff) > SUPPORT_TOL:
                    pattern = tuple(
                        (q, "+" if not (s_row >> (d - 1 - i)) & 1 else "-")
                        for i, q in enumerate(diag_cells))
                    flips = tuple(flip_cells[f - 1 - j] for j in range(f) if (mask >> j) & 1)
                    terms.append(ExpansionTerm(pattern, tuple(sorted(flips)), complex(coeff)))
                    recon[flip_idx ^ mask, flip_idx] += coeff
            residual = max(residual, float(np.abs(A - recon).max()))
    return Expansion(tuple(terms), residual)


def _commutes_with_z(O: np.ndarray, qubit: int,
                     sp: tuple[np.ndarray, np.ndarray] | None) -> bool:
    if sp is not None:
        row_of, _ = sp
        crossing = ((row_of ^ np.arange(row_of.size)) >> qubit) & 1
        return not np.any(crossing)
    signs = 1.0 - 2.0 * ((np.arange(O.shape[0]) >> qubit) & 1)
    commutator = O * signs[None, :] - signs[:, None] * O
    return float(np.abs(commutator).max()) <= SUPPORT_TOL


def term_entries(term: ExpansionTerm, num_qubits: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nonzero entries (rows, cols, values) of one expansion term."""
    dim = 1 << num_qubits
    cols = np.arange(dim)
    keep = np.ones(dim, dtype=bool)
    sign = np.ones(dim)
    for q, label in term.projector_pattern:
        bit = (cols >> q) & 1
        if label == "+":
            keep &= bit == 0
        elif label == "-":
            keep &= bit == 1
        else:  # 'z' from a single-Pauli-string match
            sign = sign * (1.0 - 2.0 * bit)
    mask = 0
    for q in term.flip_pattern:
        mask |= 1 << q
    sel = cols[keep]
    return sel ^ mask, sel, term.coefficient * sign[keep]


def term_matrix(term: ExpansionTerm, num_qubits: int) -> np.ndarray:
    """Dense matrix of one expansion term."""
    dim = 1 << num_qubits
    rows, cols, values = term_entries(term, num_qubits)
    out = np.zeros((dim, dim), dtype=np.complex128)
    out[rows, cols] = values
    return out


def compose_expansions(outer: Expansion, inner: Expansion, at_qubit: int,
                       target: np.ndarray) -> tuple[list[ExpansionTerm], float]:
    """Substitute an inner expansion for the flip factor at one qubit.

    Every outer term must carry a flip on ``at_qubit``; each of the
    ``len(outer) * len(inner)`` formal products replaces that factor by an
    inner term (projector products on shared cells may annihilate, so
    composed terms can be zero as matrices).  Returns the composed terms
    and the max-abs residual against ``target``.
    """
    composed: list[ExpansionTerm] = []
    num_qubits = int(np.log2(target.shape[0]))
    total = np.zeros(target.shape, dtype=np.complex128)
    for t_out in outer.terms:
        if at_qubit not in t_out.flip_pattern:
            raise ValueError("outer terms must all flip the substitution qubit")
        alone = ExpansionTerm(t_out.projector_pattern,
                              tuple(q for q in t_out.flip_pattern if q != at_qubit),
                              t_out.coefficient)
        for t_in in inner.terms:
            merged = ExpansionTerm(
                alone.projector_pattern + t_in.projector_pattern,
                tuple(sorted(set(alone.flip_pattern) ^ set(t_in.flip_pattern))),
                alone.coefficient * t_in.coefficient,
            )
            composed.append(merged)
            rows, cols, values = term_entries(merged, num_qubits)
            total[rows, cols] += values
    residual = float(np.abs(total - target).max())
    return composed, residual


# ---------------------------------------------------------------------------
# Property report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _pauli_matrix(kind: str, qubit: int, num_qubits: int) -> np.ndarray:
    rows, values = _pauli_entries(kind, qubit, np.arange(1 << num_qubits))
    P = np.zeros((1 << num_qubits, 1 << num_qubits), dtype=np.complex128)
    P[rows, np.arange(1 << num_qubits)] = values
    return P


def _pauli_deviation(O: np.ndarray, kind: str, qubit: int) -> float:
    """Max-abs elementwise difference between O and a single-qubit Pauli."""
    dim = O.shape[0]
    cols = np.arange(dim)
    rows, values = _pauli_entries(kind, qubit, cols)
    dev = float(np.abs(O[rows, cols] - values).max())
    saved = O[rows, cols].copy()
    O[rows, cols] = 0.0
    dev = max(dev, float(np.abs(O).max()))
    O[rows, cols] = saved
    return dev


def _q232_checks() -> list[CheckResult]:
    spec = q232_window()
    w = spec.num_qubits
    U = build_window_unitary(spec)
    results = []

    dev = float(np.abs(U.T @ U - np.eye(1 << w)).max())
    results.append(CheckResult("window unitary is unitary", dev < 1e-12, f"max dev {dev:.2e}"))
    results.append(CheckResult("local unitaries pairwise commute",
               locals_pairwise_commute(spec), "exact permutation comparison"))

    center = spec.qubit(("now", 0, 0))
    oz = conjugate_pauli(U, center, "Z")
    z_dev = _pauli_deviation(oz.matrix, "Z", center)
    results.append(CheckResult("conjugated sigma-z equals sigma-z", z_dev == 0.0,
                               f"max dev {z_dev:.2e}"))

    ox = conjugate_pauli(U, center, "X")
    future = {spec.qubit(("future", 0, d)) for d in (-1, 0, 1)}
    fut_support = len(future.intersection(ox.support))
    results.append(CheckResult("sigma-x support inside the 9-cell region",
                               set(ox.support) <= set(range(w)) and fut_support <= 3,
                               f"support {len(ox.support)} cells, {fut_support} future"))
    exp = projector_expansion(ox, w)
    results.append(CheckResult("sigma-x expansion has 16 terms",
                               exp.term_count == 16 and exp.residual < RESIDUAL_TOL,
                               f"{exp.term_count} terms, residual {exp.residual:.2e}"))

    oy = conjugate_pauli(U, center, "Y")
    oxy = 1j * conjugate_pauli(U, center, "Z").matrix  # X Y = i Z
    hom_dev = float(np.abs(ox.matrix.astype(np.complex128) @ oy.matrix - oxy).max())
    results.append(CheckResult("automorphism respects products (u(x)u(y) = u(xy))",
                               hom_dev < 1e-10, f"max dev {hom_dev:.2e}"))
    return results


def _qtlv_checks() -> list[CheckResult]:
    spec = qtlv_window()
    w = spec.num_qubits
    U_both = build_window_unitary(spec, strings=(1, -1))
    U_plus = build_window_unitary(spec, strings=(1,))
    U_minus = build_window_unitary(spec, strings=(-1,))
    results = []

    perm = window_permutation(spec)
    bijective = np.array_equal(np.sort(perm), np.arange(1 << w))
    results.append(CheckResult("window unitary is a basis bijection", bijective, "exact"))
    results.append(CheckResult("local unitaries pairwise commute",
               locals_pairwise_commute(spec), "exact permutation comparison"))

    center = spec.qubit(("now", 1, 0))
    other = spec.qubit(("now", -1, 0))
    z_ok = True
    z_dev = 0.0
    for q in (center, other):
        oz = conjugate_pauli(U_both, q, "Z")
        z_dev = max(z_dev, _pauli_deviation(oz.matrix, "Z", q))
        z_ok = z_ok and z_dev == 0.0
    results.append(CheckResult("conjugated sigma-z equals sigma-z (both strings)",
                               z_ok, f"max dev {z_dev:.2e}"))

    ox_single = conjugate_pauli(U_plus, center, "X")
    e_single = projector_expansion(ox_single, w)
    results.append(CheckResult("same-string sigma-x expansion has 16 terms",
                               e_single.term_count == 16 and e_single.residual < RESIDUAL_TOL,
                               f"{e_single.term_count} terms, residual {e_single.residual:.2e}"))

    ox_cross = conjugate_pauli(U_plus, other, "X")
    e_cross = projector_expansion(ox_cross, w)
    expected_cross = {("now", 1, -2), ("now", 1, -1), ("now", -1, 0), ("future", 1, 0)}
    cross_cells = {spec.cells[q] for q in ox_cross.support}
    results.append(CheckResult("cross-string sigma-x expansion has 4 terms",
                               e_cross.term_count == 4 and cross_cells == expected_cross
                               and e_cross.residual < RESIDUAL_TOL,
                               f"{e_cross.term_count} terms on {sorted(cross_cells)}"))

    ox_full = conjugate_pauli(U_both, center, "X")
    e_inner = projector_expansion(conjugate_pauli(U_minus, center, "X"), w)
    composed, residual = compose_expansions(e_single, e_inner, center,
                                            ox_full.matrix.astype(np.complex128))
    e_full = projector_expansion(ox_full, w)
    results.append(CheckResult("total expansion composes to 64 terms",
                               len(composed) == 64 and residual < RESIDUAL_TOL,
                               f"16 x 4 = {len(composed)} composed terms "
                               f"({e_full.term_count} distinct projector patterns), "
                               f"residual {residual:.2e}"))
    return results


def heisenberg_report(scheme: str) -> list[CheckResult]:
    """Run every locality/invariance check for one scheme."""
    if scheme == "q232":
        return _q232_checks()
    if scheme == "qtlv":
        return _qtlv_checks()
    raise ValueError(f"unknown scheme {scheme!r}")
