"""Mode-1 learning of block local inversions and their two-round assembly."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import jax
import jax.numpy as jnp
import numpy as np
import scipy.optimize

from ..landscape.optimize import OptimizerConfig, optimize
from ..qcore.circuit import Circuit
from ..qcore.gates import Gate
from ..qcore.pauli import heisenberg_window, lightcone_gates
from ..qcore.rng import make_rng
from .ansatz import BLOCK, BlockAnsatz, ansatz_unitary_fn, block_window
from .hamiltonian import HiddenHamiltonian, exact_evolution_circuit

jax.config.update("jax_enable_x64", True)

_PS = ("X", "Y", "Z")


def _pauli_rows(pos: int, w: int):
    """Row permutation and phase with (P_pos M)[i] = phase[i] * M[perm[i]] for P in X, Y, Z."""
    idx = np.arange(2 ** w)
    bit = (idx >> pos) & 1
    flip = idx ^ (1 << pos)
    perms = np.array([flip, flip, idx])
    phases = np.array([np.ones(2 ** w), np.where(bit == 0, -1j, 1j), 1 - 2 * bit], dtype=complex)
    return perms, phases


@lru_cache(maxsize=None)
def _compiled(window: tuple):
    """Jitted (deviations, loss, value_and_grad) for one window shape; A and the Pauli rows are arguments."""
    unitary = ansatz_unitary_fn(window)
    d = 2 ** len(window)
    eye = jnp.eye(3)

    def devs(theta, a, perms, phases):
        u = unitary(theta)
        qu = phases[..., None] * u[perms]  # Q_k U_t
        au = (a.reshape(-1, d) @ u.conj().T).reshape(a.shape)  # A_k,P U_t^dag
        r = jnp.real(jnp.einsum("kpij,kqji->kpq", au, qu)) / d
        return jnp.sum((r - eye) ** 2, axis=(1, 2))

    def loss(*args):
        return jnp.sum(devs(*args))

    return jax.jit(devs), jax.jit(loss), jax.jit(jax.value_and_grad(loss))


class BlockCost:
    """sum_{k in block} ||R_k - I||_F^2 with R_PQ(k) = Tr(U^dag P_k U  U_t^dag Q_k U_t) / 2^w.

    U is the exact evolution truncated to the block window, which contains
    the lightcone of every block qubit.
    """

    def __init__(self, target: Circuit, block: int, size: int = BLOCK):
        n = target.num_qubits
        self.window = block_window(block, n, size)
        self.qubits = tuple(q for q in range(block * size, min(n, (block + 1) * size)))
        w = len(self.window)
        a, perms, phases = [], [], []
        for k in self.qubits:
            _, lc = lightcone_gates(target, [k])
            if not set(lc) <= set(self.window):
                raise ValueError(f"lightcone of qubit {k} leaves the block window")
            a.append([heisenberg_window(target, k, P, self.window)[0] for P in _PS])
            pr, ph = _pauli_rows(self.window.index(k), w)
            perms.append(pr)
            phases.append(ph)
        self._args = (jnp.asarray(np.array(a)), jnp.asarray(np.array(perms)), jnp.asarray(np.array(phases)))
        self.ansatz = BlockAnsatz(self.window)
        self._devs, self._loss, self._vg = _compiled(self.window)

    @property
    def num_params(self) -> int:
        return self.ansatz.num_params

    def deviations(self, theta) -> np.ndarray:
        return np.asarray(self._devs(jnp.asarray(theta, dtype=float), *self._args))

    def __call__(self, theta) -> float:
        return float(self._loss(jnp.asarray(theta, dtype=float), *self._args))

    def value_and_grad(self, theta):
        v, g = self._vg(jnp.asarray(theta, dtype=float), *self._args)
        return float(v), np.asarray(g)


@dataclass
class Mode1Config:
    optimizer: OptimizerConfig = field(default_factory=lambda: OptimizerConfig(kind="BGD", lr=0.3))
    restarts: int = 10
    tol: float = 1e-7  # stop polishing and restarting once the summed block cost is below this
    polish: bool = True  # L-BFGS refinement of the best BGD point
    polish_iterations: int = 400


@dataclass
class BlockResult:
    block: int
    window: tuple
    qubits: tuple
    theta: np.ndarray
    residual: float
    deviations: np.ndarray
    restarts_used: int


def _stop_below(tol):
    def callback(intermediate_result):
        if intermediate_result.fun <= tol:
            raise StopIteration
    return callback


def _polish(cost, theta, val, config):
    out = scipy.optimize.minimize(cost.value_and_grad, theta, jac=True, method="L-BFGS-B",
                                  callback=_stop_below(config.tol),
                                  options={"maxiter": config.polish_iterations, "gtol": 1e-12, "ftol": 1e-16})
    if out.fun < val:
        return out.x, float(out.fun)
    return theta, val


def train_block(target: Circuit, block: int, config: Mode1Config, rng, size: int = BLOCK,
                warm=None) -> BlockResult:
    """Restarted BGD (plus polish) from uniform [0,1) points.

    With ``warm`` the first attempt instead polishes from that parameter
    vector; random restarts follow only if it misses ``config.tol``.
    """
    cost = BlockCost(target, block, size)
    best = None
    used = 0
    if warm is not None:
        th = np.asarray(warm, dtype=float)
        best = _polish(cost, th, cost(th), config)
    for _ in range(config.restarts):
        if best is not None and best[1] <= config.tol:
            break
        used += 1
        theta0 = rng.uniform(0.0, 1.0, cost.num_params)
        res = optimize(cost, theta0, config.optimizer, grad="value_and_grad")
        th, val = res.best_theta, res.best_cost
        if config.polish:
            th, val = _polish(cost, th, val, config)
        if best is None or val < best[1]:
            best = (th, val)
    th, val = best
    return BlockResult(block, cost.window, cost.qubits, th, val, cost.deviations(th), used)


@dataclass
class CompiledCircuit:
    """Sewed 2n-qubit circuit; the learned channel's output sits on the second register.

    The final register swap of the sewing construction is a relabelling and
    is not emitted as gates.
    """

    n: int
    circuit: Circuit
    blocks: list
    t: float

    @property
    def output_qubits(self) -> tuple:
        return tuple(range(self.n, 2 * self.n))

    @property
    def gate_count(self) -> int:
        return self.circuit.gate_count()

    @property
    def residuals(self) -> list:
        return [b.residual for b in self.blocks]


def assembly_rounds(num_blocks: int) -> list[list[int]]:
    """Even blocks first, then odd blocks: windows inside a round are disjoint."""
    return [[b for b in range(num_blocks) if b % 2 == r] for r in (0, 1)]


def assemble(n: int, blocks: list, t: float = 0.0) -> CompiledCircuit:
    """For each block: U_t on the window, swap block qubits into the ancilla register, U_t^dag."""
    gates = []
    by_id = {b.block: b for b in blocks}
    for rnd in assembly_rounds(len(blocks)):
        for bid in rnd:
            b = by_id[bid]
            fwd = BlockAnsatz(b.window).circuit(b.theta, 2 * n)
            gates += list(fwd.gates())
            gates += [Gate("SWAP", (q, n + q)) for q in b.qubits]
            gates += list(fwd.inverse().gates())
    return CompiledCircuit(n, Circuit.from_gates(2 * n, gates), blocks, t)


def mode1_learn(ham: HiddenHamiltonian, t: float, config: Mode1Config | None = None, seed: int = 0,
                size: int = BLOCK, warm: dict | None = None) -> CompiledCircuit:
    """Train every block against the exact evolution at time ``t`` and assemble.

    ``warm`` optionally maps block index to a starting parameter vector.
    """
    if ham.n % size:
        raise ValueError(f"n must be a multiple of the block size {size}")
    config = config or Mode1Config()
    target = exact_evolution_circuit(ham, t)
    warm = warm or {}
    blocks = []
    for b in range(ham.n // size):
        rng = make_rng(seed, "mode1", b, repr(float(t)))
        blocks.append(train_block(target, b, config, rng, size, warm.get(b)))
    return assemble(ham.n, blocks, t)


def mode1_learn_series(ham: HiddenHamiltonian, times, config: Mode1Config | None = None, seed: int = 0,
                       size: int = BLOCK, continuation: bool = True) -> list[CompiledCircuit]:
    """Compile every time in ``times``; with continuation each fit starts from the previous one."""
    out = []
    warm = None
    for t in times:
        comp = mode1_learn(ham, float(t), config, seed, size, warm)
        out.append(comp)
        if continuation:
            warm = {b.block: b.theta for b in comp.blocks}
    return out
