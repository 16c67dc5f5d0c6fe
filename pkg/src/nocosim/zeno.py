"""Register dynamics under frequently repeated noisy actuator operations.

A cycle is one period of the drive: a fixed sequence of noisy operations on
actuator qubits followed by free evolution of the whole system for one
period.  Repeated fast enough, the actuator is pinned to the fixed state of
the per-period operation and the register evolves under an effective
Hamiltonian obtained by averaging the interaction over that state.  At
finite repetition frequency the register picks up a residual error channel,
which is what this module computes exactly (for small systems) by
propagating the full superoperator.

Units: hbar = J = 1 internally.  User-facing frequencies are quoted in
J/h; since h = 2*pi*hbar, a drive at ``freq_over_h`` J/h has period
2*pi / freq_over_h in internal time.  Durations returned in "per (J/h)"
units are internal durations divided by 2*pi.
"""

from dataclasses import dataclass

import numpy as np

from .channels import Channel, kraus_to_superop, twirl
from .qcore import (
    SystemLayout,
    embed_operator,
    matrix_power_int,
    partial_trace,
    unitary_evolution,
    unvec,
    vec,
)

# tolerates float dust in t * f when the product should be an exact integer
_PERIOD_COUNT_NUDGE = 1e-9


def period_count(duration: float, freq_over_h: float) -> int:
    """Number of whole drive periods inside ``duration`` internal time units."""
    if duration < 0 or freq_over_h <= 0:
        raise ValueError("need duration >= 0 and a positive frequency")
    return int(np.floor(duration * freq_over_h / (2.0 * np.pi) + _PERIOD_COUNT_NUDGE))


@dataclass(frozen=True)
class NoisyCycleSpec:
    """One drive period: labeled actuator operations, then free flight.

    ``period_ops`` lists (actuator label, Kraus operators) pairs applied in
    order at the start of each period.  The Hamiltonian acts on the full
    layout and generates the free flight for the rest of the period.
    """

    layout: SystemLayout
    hamiltonian: np.ndarray
    period_ops: tuple

    def __post_init__(self):
        d = self.layout.dim
        h = np.asarray(self.hamiltonian)
        if h.shape != (d, d):
            raise ValueError(f"hamiltonian shape {h.shape} does not match layout dim {d}")
        for label, _ in self.period_ops:
            if label not in self.layout.actuators:
                raise ValueError(f"period op on {label!r}, which is not an actuator")


def _ops_superop(spec: NoisyCycleSpec, positions_of, dim: int) -> np.ndarray:
    """Superoperator of the per-period operations on a space of dimension dim."""
    s = np.eye(dim * dim, dtype=complex)
    nq = int(round(np.log2(dim)))
    for label, kraus in spec.period_ops:
        pos = positions_of(label)
        embedded = [embed_operator(k, (pos,), nq) for k in kraus]
        s = kraus_to_superop(embedded) @ s
    return s


def cycle_superop(spec: NoisyCycleSpec) -> np.ndarray:
    """Per-period actuator operations on the full system (no free flight)."""
    return _ops_superop(spec, spec.layout.position, spec.layout.dim)


def actuator_superop(spec: NoisyCycleSpec) -> np.ndarray:
    """Per-period operations restricted to the actuator factor."""
    acts = spec.layout.actuators
    if not acts:
        raise ValueError("cycle has no actuators")
    dim = 2 ** len(acts)
    return _ops_superop(spec, lambda lbl: acts.index(lbl), dim)


@dataclass
class FixedState:
    """Fixed point of the per-period actuator operation."""

    rho: np.ndarray
    twirl_only: bool
    defect: float


def fixed_state(spec: NoisyCycleSpec) -> FixedState:
    """Actuator state the drive freezes, with its fixed-point defect.

    Computed by applying one period's operations to the maximally mixed
    actuator state; the defect reports how far the result is from being a
    true fixed point.
    """
    s = actuator_superop(spec)
    da = 2 ** len(spec.layout.actuators)
    rho = unvec(s @ vec(np.eye(da, dtype=complex) / da), da)
    defect = float(np.linalg.norm(s @ vec(rho) - vec(rho)))
    tw = twirl().smatrix
    twirl_only = bool(spec.period_ops) and all(
        np.allclose(kraus_to_superop(kraus), tw, atol=1e-12)
        for _, kraus in spec.period_ops
    )
    return FixedState(rho=rho, twirl_only=twirl_only, defect=defect)


def verify_projector(spec: NoisyCycleSpec, atol: float = 1e-10):
    """Check that one period's actuator operation is idempotent.

    Returns (ok, defect) where defect = ||S@S - S||_F on the actuator factor.
    Idempotence is what makes the frozen-actuator picture exact: every
    period re-projects the actuator onto the same state.
    """
    s = actuator_superop(spec)
    defect = float(np.linalg.norm(s @ s - s))
    return defect <= atol, defect


def effective_hamiltonian(spec: NoisyCycleSpec) -> np.ndarray:
    """Register Hamiltonian seen once the actuator is frozen.

    Tr_A[(rho_U (x) id_R) H] with rho_U the fixed state of the cycle.
    """
    rho = fixed_state(spec).rho
    na = len(spec.layout.actuators)
    da = 2 ** na
    dr = spec.layout.dim // da
    h4 = np.asarray(spec.hamiltonian, dtype=complex).reshape(da, dr, da, dr)
    return np.einsum("ac,cras->rs", rho, h4)


def period_superop(spec: NoisyCycleSpec, period: float) -> np.ndarray:
    """Full-system superoperator of one period: ops, then free flight."""
    u = unitary_evolution(spec.hamiltonian, period)
    flight = np.kron(u.conj(), u)
    return flight @ cycle_superop(spec)


def _lift_matrix(da: int, dr: int) -> np.ndarray:
    """vec(rho_R) -> vec(id_A / da (x) rho_R)."""
    d = da * dr
    lift = np.zeros((d * d, dr * dr), dtype=complex)
    eye_a = np.eye(da, dtype=complex) / da
    basis = np.eye(dr * dr, dtype=complex)
    for col in range(dr * dr):
        eij = unvec(basis[:, col], dr)
        lift[:, col] = vec(np.kron(eye_a, eij))
    return lift


def _contract_matrix(da: int, dr: int) -> np.ndarray:
    """vec(rho_full) -> vec(Tr_A rho_full), actuators in the leading factor."""
    d = da * dr
    na = int(round(np.log2(da)))
    nq = int(round(np.log2(d)))
    keep = list(range(na, nq))
    out = np.zeros((dr * dr, d * d), dtype=complex)
    basis = np.eye(d * d, dtype=complex)
    for col in range(d * d):
        eij = unvec(basis[:, col], d)
        out[:, col] = vec(partial_trace(eij, nq, keep))
    return out


@dataclass
class NocoResult:
    """Realized register channel of a frequently driven cycle."""

    channel: Channel
    registers: tuple
    n_periods: int
    period: float
    residual_time: float


def noco_channel(spec: NoisyCycleSpec, duration: float, freq_over_h: float) -> NocoResult:
    """Exact register channel after driving the cycle for ``duration``.

    Composes N = floor(duration * f) whole periods (operations then free
    flight), starting from the maximally mixed actuator state, then traces
    the actuators out.  Time left over after the last whole period is
    discarded and reported as ``residual_time``.
    """
    n = period_count(duration, freq_over_h)
    dt = 2.0 * np.pi / freq_over_h
    na = len(spec.layout.actuators)
    da = 2 ** na
    dr = spec.layout.dim // da
    m = period_superop(spec, dt)
    prop = matrix_power_int(m, n)
    s_reg = _contract_matrix(da, dr) @ prop @ _lift_matrix(da, dr)
    return NocoResult(
        channel=Channel(s_reg, int(round(np.log2(dr)))),
        registers=spec.layout.registers,
        n_periods=n,
        period=dt,
        residual_time=duration - n * dt,
    )


def infidelity_surface(eps_values, freq_values, gate_name: str):
    """Grid of (1 - entanglement fidelity, period count) for a catalog gate.

    Returns (infidelity, n_periods) arrays of shape (len(eps), len(freq)).
    """
    # imported here to keep the module dependency one-way at import time
    from . import gates
    from .channels import entanglement_fidelity

    eps_values = list(eps_values)
    freq_values = list(freq_values)
    infid = np.zeros((len(eps_values), len(freq_values)))
    counts = np.zeros((len(eps_values), len(freq_values)), dtype=int)
    target = gates.recipe(gate_name).target
    for i, eps in enumerate(eps_values):
        for j, f in enumerate(freq_values):
            run = gates.realized_channel(gate_name, eps, f)
            infid[i, j] = 1.0 - entanglement_fidelity(run.channel, target)
            counts[i, j] = run.n_periods
    return infid, counts
