"""
Single-photon packets, multi-channel pure states and density matrices.

Amplitudes are stored measure-weighted (F_i = f(ω_i)·√Δω, see core.freqgrid).
Density matrices may be unnormalized: the algebra works "to within the
normalization constant" and `normalize` divides by the trace only where
states are compared.

All values are immutable after construction; every operation returns a new
value.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from core.errors import EmptyEpr, InvalidParameter, NonPositiveInput
from core.freqgrid import NODE_TOLERANCE, FrequencyGrid, make_grid

log = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10          # relative to the trace
FIDELITY_PSD_TOL = 1e-8
RANK_TOL = 1e-10         # relative to the trace
SUPPORT_CUTOFF = 1e-8
LORENTZIAN_TAIL_TOL = 1e-2


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


# ── Types ─────────────────────────────────────────────────────────────────────

@dataclass(frozen=True, eq=False)
class SinglePhotonAmplitude:
    grid: FrequencyGrid
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.shape != (self.grid.n_points,):
            raise InvalidParameter(f"amplitude shape {amps.shape} does not match grid ({self.grid.n_points},)")
        object.__setattr__(self, "amps", amps)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalized(self) -> "SinglePhotonAmplitude":
        norm_sq = self.norm_sq
        if norm_sq <= 0:
            raise NonPositiveInput("cannot normalize a zero amplitude")
        return SinglePhotonAmplitude(self.grid, self.amps / np.sqrt(norm_sq))

    def support(self, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
        """Indices whose amplitude modulus exceeds `cutoff` × the peak modulus."""
        mod = np.abs(self.amps)
        peak = mod.max() if mod.size else 0.0
        return np.flatnonzero(mod > cutoff * peak) if peak > 0 else np.array([], dtype=int)

    def mean_frequency(self) -> float:
        w = np.abs(self.amps) ** 2
        return float(np.dot(self.grid.nodes, w) / w.sum())

    def to_json(self) -> dict:
        return {
            "type": "SinglePhotonAmplitude",
            "grid": self.grid.describe(),
            "amps": [[float(z.real), float(z.imag)] for z in self.amps],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SinglePhotonAmplitude":
        grid = make_grid(**data["grid"])
        return cls(grid, np.array([complex(re, im) for re, im in data["amps"]]))


@dataclass(frozen=True, eq=False)
class MultiChannelState:
    """Pure state tensor; axis a is indexed by the nodes of channel `channels[a]`."""

    grid: FrequencyGrid
    amps: np.ndarray
    channels: tuple[int, ...] = (1, 2)

    def __post_init__(self):
        amps = _frozen(self.amps)
        if amps.ndim != len(self.channels) or any(d != self.grid.n_points for d in amps.shape):
            raise InvalidParameter(f"tensor shape {amps.shape} does not match channels {self.channels}")
        if len(set(self.channels)) != len(self.channels):
            raise InvalidParameter(f"duplicate channel labels {self.channels}")
        object.__setattr__(self, "amps", amps)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def density(self) -> "MultiChannelDensity":
        return MultiChannelDensity(self.grid, np.multiply.outer(self.amps, self.amps.conj()), self.channels)

    def scaled(self, factor: complex) -> "MultiChannelState":
        return type(self)(self.grid, self.amps * factor, self.channels)


@dataclass(frozen=True, eq=False)
class TwoChannelAmplitude(MultiChannelState):
    """Amplitude over a channel pair, e.g. |ψ_EPR⟩ on channels 1 ⊗ 2."""

    def __post_init__(self):
        super().__post_init__()
        if len(self.channels) != 2:
            raise InvalidParameter("TwoChannelAmplitude needs exactly two channels")


@dataclass(frozen=True, eq=False)
class MultiChannelDensity:
    """Operator tensor: the first k axes are ket indices, the last k bra indices."""

    grid: FrequencyGrid
    mat: np.ndarray
    channels: tuple[int, ...]

    def __post_init__(self):
        mat = _frozen(self.mat)
        if mat.ndim != 2 * len(self.channels):
            raise InvalidParameter(f"operator rank {mat.ndim} does not match channels {self.channels}")
        object.__setattr__(self, "mat", mat)

    @property
    def trace(self) -> float:
        k = len(self.channels)
        dim = self.grid.n_points ** k
        return float(np.trace(self.mat.reshape(dim, dim)).real)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    grid: FrequencyGrid
    mat: np.ndarray

    def __post_init__(self):
        mat = _frozen(self.mat)
        n = self.grid.n_points
        if mat.shape != (n, n):
            raise InvalidParameter(f"density matrix shape {mat.shape} does not match grid ({n}, {n})")
        object.__setattr__(self, "mat", mat)

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues of the Hermitian part."""
        return np.linalg.eigvalsh((self.mat + self.mat.conj().T) / 2)

    def normalized(self) -> "DensityMatrix":
        tr = self.trace
        if tr <= 0:
            raise NonPositiveInput(f"cannot normalize a density matrix with trace {tr}")
        return DensityMatrix(self.grid, self.mat / tr)

    def to_json(self) -> dict:
        return {
            "type": "DensityMatrix",
            "grid": self.grid.describe(),
            "mat": [[[float(z.real), float(z.imag)] for z in row] for row in self.mat],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DensityMatrix":
        grid = make_grid(**data["grid"])
        mat = np.array([[complex(re, im) for re, im in row] for row in data["mat"]])
        return cls(grid, mat)


@dataclass(frozen=True, eq=False)
class EprSpec:
    pump_frequency: float
    envelope: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if self.envelope is not None:
            env = np.asarray(self.envelope, dtype=float)
            if np.any(env < 0) or not np.all(np.isfinite(env)):
                raise InvalidParameter("EPR envelope values must be finite and >= 0", field="envelope")
            env.setflags(write=False)
            object.__setattr__(self, "envelope", env)

    @classmethod
    def gaussian_envelope(cls, grid: FrequencyGrid, pump_frequency: float,
                          center: float, width: float) -> "EprSpec":
        """Finite-bandwidth channel-1 envelope g(ω) = exp(−(ω − center)²/(2·width²))."""
        if width <= 0:
            raise InvalidParameter(f"envelope width must be > 0, got {width}", field="envelope.width")
        return cls(pump_frequency, np.exp(-((grid.nodes - center) ** 2) / (2 * width**2)))

    def weights(self, grid: FrequencyGrid) -> np.ndarray:
        if self.envelope is None:
            return np.ones(grid.n_points)
        if self.envelope.shape != (grid.n_points,):
            raise InvalidParameter(f"envelope has {self.envelope.size} values, grid has {grid.n_points}",
                                   field="envelope")
        return self.envelope


Operator = Union[MultiChannelState, MultiChannelDensity]


# ── Constructors ──────────────────────────────────────────────────────────────

def normalize(state):
    return state.normalized()


def _warn_if_leaking(grid: FrequencyGrid, lo: float, hi: float, what: str):
    if lo < grid.omega_min or hi > grid.omega_max:
        log.warning("%s support [%.6g, %.6g] extends beyond grid [%.6g, %.6g]; truncation error is uncontrolled",
                    what, lo, hi, grid.omega_min, grid.omega_max)


def gaussian_packet(grid: FrequencyGrid, center: float, width: float) -> SinglePhotonAmplitude:
    """Amplitude f(ω) ∝ exp(−(ω − ω₀)²/(4σ²)), so |f|² has standard deviation σ."""
    if width <= 0:
        raise InvalidParameter(f"packet width must be > 0, got {width}", field="packet.width")
    _warn_if_leaking(grid, center - 6 * width, center + 6 * width, "gaussian packet")
    amps = np.exp(-((grid.nodes - center) ** 2) / (4 * width**2)) * np.sqrt(grid.delta_omega)
    return SinglePhotonAmplitude(grid, amps).normalized()


def lorentzian_packet(grid: FrequencyGrid, center: float, width: float) -> SinglePhotonAmplitude:
    """Spontaneous-emission line f(ω) ∝ 1/(ω − ω₀ + iγ/2) with FWHM γ = width."""
    if width <= 0:
        raise InvalidParameter(f"packet width must be > 0, got {width}", field="packet.width")
    inside = (np.arctan(2 * (grid.omega_max - center) / width)
              - np.arctan(2 * (grid.omega_min - center) / width)) / np.pi
    if 1 - inside > LORENTZIAN_TAIL_TOL:
        log.warning("lorentzian packet loses %.3g of its norm outside grid [%.6g, %.6g]",
                    1 - inside, grid.omega_min, grid.omega_max)
    amps = np.sqrt(grid.delta_omega) / (grid.nodes - center + 0.5j * width)
    return SinglePhotonAmplitude(grid, amps).normalized()


def superpose(a: SinglePhotonAmplitude, b: SinglePhotonAmplitude,
              alpha: complex = 1.0, beta: complex = 1.0) -> SinglePhotonAmplitude:
    if a.grid != b.grid:
        raise InvalidParameter("cannot superpose amplitudes on different grids")
    return SinglePhotonAmplitude(a.grid, alpha * a.amps + beta * b.amps).normalized()


def two_peak_packet(grid: FrequencyGrid, center: float, separation: float, width: float) -> SinglePhotonAmplitude:
    return superpose(gaussian_packet(grid, center - separation / 2, width),
                     gaussian_packet(grid, center + separation / 2, width))


def monochromatic_state(grid: FrequencyGrid, omega: float) -> SinglePhotonAmplitude:
    amps = np.zeros(grid.n_points, dtype=complex)
    amps[grid.index_of(omega)] = 1.0
    return SinglePhotonAmplitude(grid, amps)


def epr_state(grid: FrequencyGrid, spec: EprSpec) -> TwoChannelAmplitude:
    """amps[i, j] = g(ω_i)·[ω_i + ω_j = Ω]. Unnormalized, like the improper EPR ket."""
    nodes = grid.nodes
    on_shell = np.abs(nodes[:, None] + nodes[None, :] - spec.pump_frequency) <= NODE_TOLERANCE * grid.delta_omega
    if not on_shell.any():
        raise EmptyEpr(f"no node pair sums to the pump frequency {spec.pump_frequency}", field="pump")
    amps = on_shell * spec.weights(grid)[:, None]
    if not np.any(amps):
        raise EmptyEpr("the envelope vanishes on every node pair compatible with the pump", field="envelope")
    return TwoChannelAmplitude(grid, amps, (1, 2))


def product_state(a: SinglePhotonAmplitude, b: SinglePhotonAmplitude,
                  channels: tuple[int, int] = (1, 2)) -> TwoChannelAmplitude:
    if a.grid != b.grid:
        raise InvalidParameter("cannot form a product of amplitudes on different grids")
    return TwoChannelAmplitude(a.grid, np.outer(a.amps, b.amps), channels)


# ── Evolution / reduction ─────────────────────────────────────────────────────

def time_evolve(psi: SinglePhotonAmplitude, t: float) -> SinglePhotonAmplitude:
    """F_i → e^{−iω_i t} F_i."""
    return SinglePhotonAmplitude(psi.grid, np.exp(-1j * psi.grid.nodes * t) * psi.amps)


def density_from_amplitude(psi: SinglePhotonAmplitude, t: float = 0.0) -> DensityMatrix:
    amps = time_evolve(psi, t).amps if t else psi.amps
    return DensityMatrix(psi.grid, np.outer(amps, amps.conj()))


def partial_trace(state: Operator, keep: int) -> DensityMatrix:
    if keep not in state.channels:
        raise InvalidParameter(f"channel {keep} not in {state.channels}", field="keep")
    axis = state.channels.index(keep)
    k = len(state.channels)

    if isinstance(state, MultiChannelState):
        others = [a for a in range(k) if a != axis]
        mat = np.tensordot(state.amps, state.amps.conj(), axes=(others, others))
        return DensityMatrix(state.grid, mat)

    n = state.grid.n_points
    rest = n ** (k - 1)
    moved = np.moveaxis(state.mat, [axis, k + axis], [0, 1]).reshape(n, n, rest, rest)
    return DensityMatrix(state.grid, np.trace(moved, axis1=2, axis2=3))


# ── Comparison ────────────────────────────────────────────────────────────────

def _checked_spectrum(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    herm = (rho.mat + rho.mat.conj().T) / 2
    vals, vecs = np.linalg.eigh(herm)
    if vals[0] < -FIDELITY_PSD_TOL:
        raise NonPositiveInput(f"density matrix has eigenvalue {vals[0]:.3e} < 0")
    return vals, vecs


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity (Tr √(√ρ σ √ρ))² of the trace-normalized arguments."""
    if rho.grid != sigma.grid:
        raise InvalidParameter("fidelity between states on different grids")
    vals_r, vecs_r = _checked_spectrum(rho.normalized())
    vals_s, vecs_s = _checked_spectrum(sigma.normalized())

    if vals_r[-2] <= RANK_TOL and vals_s[-2] <= RANK_TOL:
        overlap = np.vdot(vecs_r[:, -1], vecs_s[:, -1])
        return float(min(1.0, abs(overlap) ** 2))

    vals_r = np.where(vals_r > RANK_TOL, vals_r, 0.0)
    sqrt_rho = (vecs_r * np.sqrt(vals_r)) @ vecs_r.conj().T
    sigma_n = (vecs_s * vals_s) @ vecs_s.conj().T
    inner = sqrt_rho @ sigma_n @ sqrt_rho
    mu = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    mu = np.where(mu > RANK_TOL * max(mu[-1], RANK_TOL), mu, 0.0)
    return float(np.clip(np.sum(np.sqrt(mu)) ** 2, 0.0, 1.0))


# ── Validation ────────────────────────────────────────────────────────────────

def validate(obj) -> None:
    """Raise if `obj` violates its type invariants."""
    if isinstance(obj, SinglePhotonAmplitude):
        if not np.all(np.isfinite(obj.amps)):
            raise InvalidParameter("amplitude has non-finite entries")
    elif isinstance(obj, MultiChannelState):
        if not np.all(np.isfinite(obj.amps)):
            raise InvalidParameter("state tensor has non-finite entries")
    elif isinstance(obj, DensityMatrix):
        mat = obj.mat
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise NonPositiveInput("density matrix is not Hermitian")
        tr = np.trace(mat)
        if abs(tr.imag) > HERMITIAN_TOL or tr.real <= 0:
            raise NonPositiveInput(f"density matrix trace {tr} is not real and positive")
        if obj.eigenvalues()[0] < -PSD_TOL * tr.real:
            raise NonPositiveInput("density matrix is not positive semidefinite")
    elif isinstance(obj, EprSpec):
        pass  # checked at construction
    else:
        raise TypeError(f"no invariants defined for {type(obj).__name__}")
