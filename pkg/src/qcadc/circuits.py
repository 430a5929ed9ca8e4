"""Quantum-circuit construction for the quantized voting rules and the
noisy trajectory loop.

One update step on n cells uses 2n qubits: the now register holds the
logical state, the future register starts in all-0, three Toffolis per
cell write each cell's majority onto its future cell, and a transversal
CNOT layer (future controls, now targets) decouples the registers.  After
a measurement-based reset of the now register the two register labels
swap; no qubit ever moves.

Toffoli layers are packed so every qubit is touched at most once per
layer: depth 6 for the Toffolis plus 1 for the CNOTs, for any even n.
When n/2-per-string (or n) is not a multiple of 4 the clean alternating
pattern leaves one odd cycle per string, so a fixed pair of
nearest-neighbor-controlled gates is promoted into the last two layers
and the displaced skip-controlled gates drop into the freed slots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qsim import (Gate, NoiseModel, StateVector, apply_depolarizing_after_gate,
                   apply_gate, apply_phenom_coherent, expectation_z_sum,
                   measure_reset)


@dataclass(frozen=True)
class Circuit:
    """Layered gate list; within a layer all gate supports are disjoint."""
    scheme: str
    n_cells: int
    layers: tuple[tuple[Gate, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates() if g.kind == kind)

    def validate_layers(self) -> None:
        for k, layer in enumerate(self.layers):
            used: set[int] = set()
            for gate in layer:
                overlap = used.intersection(gate.qubits)
                if overlap:
                    raise ValueError(f"layer {k} reuses qubit(s) {sorted(overlap)}")
                used.update(gate.qubits)


@dataclass(frozen=True)
class LogicalRegisterMap:
    """Which physical qubits currently hold the now and future registers."""
    now: tuple[int, ...]
    future: tuple[int, ...]

    def swapped(self) -> "LogicalRegisterMap":
        return LogicalRegisterMap(self.future, self.now)

    @classmethod
    def initial(cls, n: int) -> "LogicalRegisterMap":
        return cls(tuple(range(n)), tuple(range(n, 2 * n)))


# ---------------------------------------------------------------------------
# Step-circuit construction
# ---------------------------------------------------------------------------
# Cell-level gate specs are (control_cell, control_cell, target_cell) with
# controls on the now slice and the target on the future slice; canonical
# qubits are now cell c -> qubit c, future cell c -> qubit n + c.

def _q232_toffoli_layers(n: int) -> list[list[tuple[int, int, int]]]:
    def A(k):  # skip-pair controls
        return ((k - 1) % n, (k + 1) % n, k)

    def B(k):
        return ((k - 1) % n, k, k)

    def C(k):
        return (k, (k + 1) % n, k)

    if n % 4 == 0:
        return [
            [B(k) for k in range(0, n, 2)],
            [B(k) for k in range(1, n, 2)],
            [C(k) for k in range(0, n, 2)],
            [C(k) for k in range(1, n, 2)],
            [A(k) for k in range(n) if k % 4 in (0, 1)],
            [A(k) for k in range(n) if k % 4 in (2, 3)],
        ]
    return [
        [B(k) for k in range(4, n, 2)] + [A(0), A(1)],
        [B(k) for k in range(1, n, 2)],
        [C(k) for k in range(0, n, 2)],
        [C(k) for k in range(1, n, 2)],
        [B(0)] + [A(k) for k in range(2, n) if k % 4 in (2, 3)],
        [B(2)] + [A(k) for k in range(4, n) if k % 4 in (0, 1)],
    ]


def _qtlv_toffoli_layers(n: int) -> list[list[tuple[int, int, int]]]:
    m = n // 2

    def p(i):  # upper-string now cell
        return i % m

    def q(i):  # lower-string now cell
        return m + (i % m)

    def Ap(k):
        return (p(k - 2), p(k - 1), k)

    def Bp(k):
        return (p(k - 1), q(k), k)

    def Cp(k):
        return (p(k - 2), q(k), k)

    def Am(k):
        return (q(k + 1), q(k + 2), m + k)

    def Bm(k):
        return (q(k + 1), p(k), m + k)

    def Cm(k):
        return (q(k + 2), p(k), m + k)

    if m % 2 == 0:
        return [
            [Bp(k) for k in range(0, m, 2)] + [Bm(k) for k in range(0, m, 2)],
            [Bp(k) for k in range(1, m, 2)] + [Bm(k) for k in range(1, m, 2)],
            [Cp(k) for k in range(0, m, 2)] + [Cm(k) for k in range(1, m, 2)],
            [Cp(k) for k in range(1, m, 2)] + [Cm(k) for k in range(0, m, 2)],
            [Ap(k) for k in range(0, m, 2)] + [Am(k) for k in range(0, m, 2)],
            [Ap(k) for k in range(1, m, 2)] + [Am(k) for k in range(1, m, 2)],
        ]
    return [
        [Bp(k) for k in range(1, m - 1)] + [Ap(0), Am(m - 2)],
        [Bm(k) for k in range(2, m)] + [Am(0), Ap(2)],
        [Cp(k) for k in range(m)],
        [Cm(k) for k in range(m)],
        [Ap(k) for k in range(1, m, 2)] + [Am(k) for k in range(1, m - 3, 2)]
        + [Bp(m - 1), Am(m - 1)],
        [Ap(k) for k in range(4, m, 2)] + [Am(k) for k in range(2, m - 2, 2)]
        + [Bp(0), Bm(0), Bm(1)],
    ]


def _assemble(scheme: str, n: int, toffoli_layers: list[list[tuple[int, int, int]]]) -> Circuit:
    layers = []
    for spec_layer in toffoli_layers:
        layers.append(tuple(Gate("TOFFOLI", (c1, c2, n + target))
                            for c1, c2, target in spec_layer))
    layers.append(tuple(Gate("CNOT", (n + c, c)) for c in range(n)))
    circuit = Circuit(scheme, n, tuple(layers))
    circuit.validate_layers()
    if circuit.count("TOFFOLI") != 3 * n or circuit.count("CNOT") != n:
        raise AssertionError("gate accounting broke during layer packing")
    return circuit


def build_q232_step(n: int) -> Circuit:
    """One quantized local-majority update: 3n Toffolis in 6 layers + n CNOTs."""
    if n % 2 or n < 4:
        raise ValueError("the quantized majority rule needs an even cell count >= 4")
    return _assemble("q232", n, _q232_toffoli_layers(n))


def build_qtlv_step(n: int) -> Circuit:
    """One quantized two-line-voting update on strings of n/2 cells."""
    if n % 2 or n < 4:
        raise ValueError("quantized two-line voting needs an even cell count >= 4")
    return _assemble("qtlv", n, _qtlv_toffoli_layers(n))


def build_step(scheme: str, n: int) -> Circuit:
    if scheme == "q232":
        return build_q232_step(n)
    if scheme == "qtlv":
        return build_qtlv_step(n)
    raise ValueError(f"unknown scheme {scheme!r}")


# ---------------------------------------------------------------------------
# Toffoli decomposition into single- and two-qubit gates
# ---------------------------------------------------------------------------

def _toffoli_network(c1: int, c2: int, t: int) -> list[list[Gate]]:
    """6 CNOTs, 2 Hadamards and 7 T/T-dagger gates, grouped into 12 slots."""
    return [
        [Gate("H", (t,))],
        [Gate("CNOT", (c2, t))],
        [Gate("TDG", (t,))],
        [Gate("CNOT", (c1, t))],
        [Gate("T", (t,))],
        [Gate("CNOT", (c2, t))],
        [Gate("TDG", (t,))],
        [Gate("CNOT", (c1, t))],
        [Gate("T", (c2,)), Gate("T", (t,))],
        [Gate("CNOT", (c1, c2)), Gate("H", (t,))],
        [Gate("T", (c1,)), Gate("TDG", (c2,))],
        [Gate("CNOT", (c1, c2))],
    ]


def decompose_toffoli(circuit: Circuit) -> Circuit:
    """Replace every Toffoli by its standard two-qubit network.

    Each Toffoli layer expands into 12 slots; Toffolis that were parallel
    stay parallel slot by slot, so layer disjointness is preserved.
    """
    layers: list[tuple[Gate, ...]] = []
    for layer in circuit.layers:
        toffolis = [g for g in layer if g.kind == "TOFFOLI"]
        others = tuple(g for g in layer if g.kind != "TOFFOLI")
        if not toffolis:
            layers.append(layer)
            continue
        networks = [_toffoli_network(*g.qubits) for g in toffolis]
        if others:
            layers.append(others)
        for slot in range(12):
            layers.append(tuple(g for net in networks for g in net[slot]))
    out = Circuit(circuit.scheme, circuit.n_cells, tuple(layers))
    out.validate_layers()
    return out


# ---------------------------------------------------------------------------
# Export and classical basis action
# ---------------------------------------------------------------------------

def circuit_to_text(circuit: Circuit) -> str:
    """One gate per line: ``LAYER k | GATE kind q0 [q1 [q2]] [theta]``."""
    lines = []
    for k, layer in enumerate(circuit.layers):
        for g in layer:
            line = f"LAYER {k} | GATE {g.kind} " + " ".join(str(q) for q in g.qubits)
            if g.theta is not None:
                line += f" {g.theta!r}"
            lines.append(line)
    return "\n".join(lines) + "\n"


def classical_basis_action(circuit: Circuit, now_bits: np.ndarray) -> np.ndarray:
    """Propagate classical basis states through a Toffoli/CNOT circuit.

    ``now_bits`` has shape (batch, n); the future register starts all-0.
    Returns the (batch, 2n) register bits after the full step circuit.
    """
    n = circuit.n_cells
    bits = np.zeros((now_bits.shape[0], 2 * n), dtype=np.uint8)
    bits[:, :n] = now_bits
    for gate in circuit.gates():
        if gate.kind == "TOFFOLI":
            c1, c2, t = gate.qubits
            bits[:, t] ^= bits[:, c1] & bits[:, c2]
        elif gate.kind == "CNOT":
            c, t = gate.qubits
            bits[:, t] ^= bits[:, c]
        else:
            raise ValueError(f"{gate.kind} has no classical basis action")
    return bits


# ---------------------------------------------------------------------------
# Trajectory loop
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QcaRunSpec:
    """One trajectory's worth of configuration.

    The initial state is cos(phi)|0..0> + i sin(phi)|1..1> on the now
    register with |phi| < pi/4, the future register all-0.
    """
    scheme: str
    n: int
    noise: NoiseModel
    phi: float
    seed: int
    trial_index: int = 0
    max_steps: int = 10_000

    def __post_init__(self):
        if not abs(self.phi) < math.pi / 4:
            raise ValueError("the logical angle must satisfy |phi| < pi/4")
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


class QcaStepper:
    """Owns one scheme's step circuit and drives noisy trajectories on it.

    The Toffoli/CNOT block of a step is a fixed basis permutation, so for
    the phenomenological noise models the whole step collapses into one
    scatter over the amplitudes (sampled bit flips fold into the same
    pass).  Per-gate depolarizing noise forces gate-by-gate application.
    """

    def __init__(self, scheme: str, n: int):
        self.scheme = scheme
        self.n = n
        self.circuit = build_step(scheme, n)
        self._perms: dict[bool, np.ndarray] = {}

    def _inverse_permutation(self, regmap: LogicalRegisterMap) -> np.ndarray:
        """inv with circuit|b> = |p(b)>, inv[p(b)] = b, for the current labeling."""
        now_is_upper = regmap.now[0] == self.n
        inv = self._perms.get(now_is_upper)
        if inv is None:
            perm = np.arange(1 << (2 * self.n), dtype=np.int64)
            for gate in self.circuit.gates():
                resolved = self._resolve(gate, regmap)
                if resolved.kind == "TOFFOLI":
                    a, b, t = resolved.qubits
                    hit = ((perm >> a) & 1) & ((perm >> b) & 1)
                else:
                    c, t = resolved.qubits
                    hit = (perm >> c) & 1
                perm = perm ^ (hit << t)
            inv = np.empty_like(perm)
            inv[perm] = np.arange(perm.size, dtype=np.int64)
            self._perms[now_is_upper] = inv
        return inv

    def initial_state(self, phi: float, regmap: LogicalRegisterMap) -> StateVector:
        state = StateVector(2 * self.n, np.zeros(1 << (2 * self.n), dtype=np.complex128))
        ones_index = sum(1 << q for q in regmap.now)
        state.amps[0] = math.cos(phi)
        state.amps[ones_index] = 1j * math.sin(phi)
        return state

    def ideal_fidelity(self, state: StateVector, phi: float,
                       regmap: LogicalRegisterMap) -> float:
        """Overlap with the undisturbed logical state (future register all-0)."""
        a0 = state.amps[0]
        a1 = state.amps[sum(1 << q for q in regmap.now)]
        return abs(math.cos(phi) * a0 - 1j * math.sin(phi) * a1)

    def _resolve(self, gate: Gate, regmap: LogicalRegisterMap) -> Gate:
        n = self.n
        qubits = tuple(regmap.now[q] if q < n else regmap.future[q - n]
                       for q in gate.qubits)
        return Gate(gate.kind, qubits, gate.theta)

    def step(self, state: StateVector, regmap: LogicalRegisterMap,
             noise: NoiseModel, rng: np.random.Generator) -> LogicalRegisterMap:
        """Noise, rule update, decouple, reset, relabel; returns the new map."""
        self.step_with_zsum(state, regmap, noise, rng)
        return regmap.swapped()

    def step_with_zsum(self, state: StateVector, regmap: LogicalRegisterMap,
                       noise: NoiseModel, rng: np.random.Generator) -> float:
        """One full step; returns sum_i <Z_i> over the post-step now register."""
        n = self.n
        if noise.kind == "depolarizing":
            for layer in self.circuit.layers:
                for gate in layer:
                    resolved = self._resolve(gate, regmap)
                    apply_gate(state, resolved)
                    apply_depolarizing_after_gate(state, resolved.qubits, noise.p, rng)
            if abs(state.norm() - 1.0) > 1e-10:
                raise AssertionError("statevector norm drifted past 1e-10")
            measure_reset(state, regmap.now, rng)
            return expectation_z_sum(state, regmap.future)
        flip_mask = 0
        if noise.kind == "incoherent":
            for q in regmap.now:
                if rng.random() < noise.p:
                    flip_mask |= 1 << q
        elif noise.kind == "coherent":
            apply_phenom_coherent(state, regmap.now, noise.theta)
        inv = self._inverse_permutation(regmap)
        if flip_mask:
            amps = state.amps[inv ^ flip_mask]
        else:
            amps = state.amps[inv]
        # Reset the now block and read sum<Z> off the surviving future column.
        now_is_lower = regmap.now[0] == 0
        block = amps.reshape(1 << n, 1 << n)  # rows: upper-half bits, cols: lower-half
        probs = block.real**2 + block.imag**2
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-10:
            raise AssertionError("statevector norm drifted past 1e-10")
        marginal = probs.sum(axis=0) if now_is_lower else probs.sum(axis=1)
        cum = np.cumsum(marginal)
        outcome = int(np.searchsorted(cum, rng.random() * total, side="right"))
        outcome = min(outcome, marginal.size - 1)
        column = (block[:, outcome] if now_is_lower else block[outcome, :]) \
            / math.sqrt(marginal[outcome])
        new_block = np.zeros_like(block)
        if now_is_lower:
            new_block[:, 0] = column
        else:
            new_block[0, :] = column
        state.amps = new_block.reshape(-1)
        weights = self._column_weights()
        return float((column.real**2 + column.imag**2) @ weights)

    def _column_weights(self) -> np.ndarray:
        if not hasattr(self, "_zw"):
            idx = np.arange(1 << self.n, dtype=np.uint64)
            w = np.full(idx.size, float(self.n))
            for q in range(self.n):
                w -= 2.0 * ((idx >> np.uint64(q)) & np.uint64(1)).astype(np.float64)
            self._zw = w
        return self._zw

    def run_trajectory(self, noise: NoiseModel, phi: float, max_steps: int,
                       rng: np.random.Generator) -> int | None:
        """First step t with sum_i <Z_i> < 0 on the post-step now register."""
        regmap = LogicalRegisterMap.initial(self.n)
        state = self.initial_state(phi, regmap)
        for t in range(1, max_steps + 1):
            zsum = self.step_with_zsum(state, regmap, noise, rng)
            regmap = regmap.swapped()
            if zsum < 0.0:
                return t
        return None


def trajectory_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                        spawn_key=(trial_index,)))


def run_qca_trajectory(spec: QcaRunSpec) -> int | None:
    """Run one noisy trajectory to its logical flip (None if censored)."""
    stepper = QcaStepper(spec.scheme, spec.n)
    rng = trajectory_rng(spec.seed, spec.trial_index)
    return stepper.run_trajectory(spec.noise, spec.phi, spec.max_steps, rng)


def noiseless_preservation(scheme: str, n: int, phi: float, steps: int) -> tuple[float, bool]:
    """(final logical fidelity, whether a flip was ever signalled) without noise."""
    stepper = QcaStepper(scheme, n)
    rng = np.random.default_rng(0)  # reset outcomes are deterministic here
    regmap = LogicalRegisterMap.initial(n)
    state = stepper.initial_state(phi, regmap)
    flipped = False
    for _ in range(steps):
        zsum = stepper.step_with_zsum(state, regmap, NoiseModel("none"), rng)
        regmap = regmap.swapped()
        if zsum < 0.0:
            flipped = True
    return stepper.ideal_fidelity(state, phi, regmap), flipped
