"""Numerically exact reduced-system propagation.

The propagation interleaves Trotterized system propagators with the pairwise
influence factors of the discretized influence functional.  The growing path
tensor over the 4-valued Liouville index (pairs of coupling-operator
eigenvalues) is stored as a matrix-product state and compressed by singular
value truncation after every step.

Everything is formulated in the frame where the bath couples through sigma_z:
the system Hamiltonian is

    H0 = (delta/2) cos(phi) sigma_x + ((delta/2) sin(phi) + bias/2) sigma_z

so phi = 0 is the symmetric relaxational model and phi = pi/2 the purely
dephasing one.  Initial states and reported polarizations live in this
transformed basis.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .bath import EtaTable, SpectralDensity, Temperature, eta_coefficients
from .errors import NumericalError, ResourceError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Liouville index i = 2*a + b for rho[a, b]; the coupling operator sigma_z
# contributes eigenvalue s+ on the ket side and s- on the bra side.
_SPLUS = np.array([1.0, 1.0, -1.0, -1.0])
_SMINUS = np.array([1.0, -1.0, 1.0, -1.0])
_DPHI = _SPLUS - _SMINUS

_TRACE_TOL = 1e-6
_BLOCH_TOL = 1e-3


def bloch_state(px, py, pz):
    """Density matrix with polarizations (P_x, P_y, P_z) = (px, py, pz)/... .

    Arguments are the Bloch-vector components (twice the polarizations), so
    ``bloch_state(0, 0, 1)`` is the fully displaced state with P_z = 1/2.
    """
    v = np.array([px, py, pz], dtype=float)
    if np.linalg.norm(v) > 1.0 + 1e-12:
        raise ValueError("Bloch vector must have norm <= 1")
    return 0.5 * (np.eye(2, dtype=complex)
                  + v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z)


@dataclass(frozen=True)
class SystemConfig:
    """Two-state system in the transformed (sigma_z-coupled) frame.

    Parameters
    ----------
    delta : float
        Tunneling amplitude (hbar = 1).
    phi : float
        Coupling mixing angle in [0, pi/2]; u_x = sin(phi), u_z = cos(phi).
    bias : float
        Optional energy asymmetry added as (bias/2) sigma_z.
    rho0 : ndarray
        2x2 initial density matrix in the transformed basis.
    temp : Temperature
    """

    delta: float
    phi: float = 0.0
    bias: float = 0.0
    rho0: np.ndarray = field(default_factory=lambda: bloch_state(0.0, 0.0, 1.0))
    temp: Temperature = field(default_factory=Temperature.zero)

    def __post_init__(self):
        if not 0.0 <= self.phi <= 0.5 * np.pi + 1e-12:
            raise ValueError(f"phi must lie in [0, pi/2], got {self.phi}")
        rho = np.asarray(self.rho0, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError("rho0 must be a 2x2 matrix")
        if np.abs(np.trace(rho) - 1.0) > 1e-10:
            raise ValueError("rho0 must have unit trace")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("rho0 must be Hermitian")
        if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < -1e-10:
            raise ValueError("rho0 must be positive semidefinite")
        object.__setattr__(self, "rho0", rho)

    def hamiltonian(self):
        """System Hamiltonian in the transformed frame."""
        return (0.5 * self.delta * np.cos(self.phi) * SIGMA_X
                + (0.5 * self.delta * np.sin(self.phi) + 0.5 * self.bias) * SIGMA_Z)


@dataclass(frozen=True)
class TempoParams:
    """Discretization and compression controls for one propagation.

    ``memory_length`` caps the influence-functional lag (default: full
    memory).  ``svd_cutoff`` discards singular values below
    cutoff * (largest singular value) at each bond.
    """

    dt: float
    n_steps: int
    svd_cutoff: float = 1e-9
    max_bond: int = None
    memory_length: int = None

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not 0.0 <= self.svd_cutoff < 1.0:
            raise ValueError(f"svd_cutoff must lie in [0, 1), got {self.svd_cutoff}")
        if self.max_bond is not None and self.max_bond < 1:
            raise ValueError(f"max_bond must be >= 1, got {self.max_bond}")
        if self.memory_length is not None:
            if not 1 <= self.memory_length <= self.n_steps:
                raise ValueError("memory_length must lie in 1..n_steps")


@dataclass
class PathState:
    """Matrix-product state over the path's Liouville indices.

    ``tensors[p]`` has legs (west bond, physical, east bond); site 0 holds the
    newest time cell.  ``truncation_error`` accumulates the relative discarded
    weight of every compression sweep and never decreases.
    """

    tensors: list
    truncation_error: float = 0.0

    def __post_init__(self):
        for left, right in zip(self.tensors, self.tensors[1:]):
            if left.shape[2] != right.shape[0]:
                raise ValueError("adjacent tensor bond dimensions must match")
        if self.tensors and (self.tensors[0].shape[0] != 1
                             or self.tensors[-1].shape[2] != 1):
            raise ValueError("boundary bonds must have dimension 1")

    @property
    def bond_dims(self):
        return [t.shape[2] for t in self.tensors[:-1]]

    def to_dense(self):
        """Contract to the full path tensor; exponential in length (tests only)."""
        out = self.tensors[0][0]
        for t in self.tensors[1:]:
            out = np.tensordot(out, t, axes=(-1, 0))
        return out[..., 0]


@dataclass
class Trajectory:
    """Polarization time series with full run metadata.

    ``trunc_err`` is the cumulative compression error estimate at each time;
    ``trace_dev`` and ``max_imag`` are physicality diagnostics (deviation of
    the reduced trace from one, largest imaginary part seen in a
    polarization).
    """

    times: np.ndarray
    px: np.ndarray
    py: np.ndarray
    pz: np.ndarray
    trunc_err: np.ndarray
    system: SystemConfig
    bath: SpectralDensity
    params: TempoParams
    trace_dev: np.ndarray = None
    max_imag: float = 0.0
    max_bond_reached: int = 1


def _superoperator(u):
    # rho row-major vectorized: (U rho U^dag).ravel() == kron(U, U.conj()) @ rho.ravel()
    return np.kron(u, u.conj())


def free_propagator(cfg: SystemConfig, dt):
    """Unitary-conjugation superoperator for one free step of length dt.

    Acts on row-major vectorized density matrices in the sigma_z eigenbasis;
    trace-preserving, and n-fold composition equals the exact rotation for
    n*dt.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    u = scipy.linalg.expm(-1j * cfg.hamiltonian() * dt)
    return _superoperator(u)


def influence_tensor(k, eta: EtaTable):
    """Pairwise influence factor I_k as a 4x4 matrix (newer index first).

    I_k[i, j] = exp[-(s_i+ - s_i-) (eta_k s_j+ - conj(eta_k) s_j-)]

    For k = 0 the two time indices coincide and only the diagonal is
    meaningful; it is built from ``eta_self``.
    """
    e = eta.lag(k)
    return np.exp(-np.outer(_DPHI, 1.0) * (e * _SPLUS - np.conj(e) * _SMINUS))


def _self_factor(eta: EtaTable):
    e = eta.eta_self
    return np.exp(-_DPHI * (e * _SPLUS - np.conj(e) * _SMINUS))


def _svd(mat):
    try:
        return np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge; gesvd is slower but robust
        return scipy.linalg.svd(mat, full_matrices=False, lapack_driver="gesvd")


def _truncation_rank(sigma, svd_cutoff, max_bond):
    if sigma[0] == 0.0:
        return 1, 0.0
    keep = int(np.count_nonzero(sigma >= svd_cutoff * sigma[0]))
    keep = max(keep, 1)
    if max_bond is not None and keep > max_bond:
        raise ResourceError(
            f"bond dimension cap {max_bond} cannot reach svd_cutoff "
            f"{svd_cutoff:g} (needs {keep})")
    total = float(np.sum(sigma ** 2))
    discarded = float(np.sum(sigma[keep:] ** 2))
    return keep, discarded / total


def compress(state: PathState, svd_cutoff, max_bond=None) -> PathState:
    """Sweep SVD truncation along the chain and return the compressed state.

    A left-to-right QR pass orthogonalizes the chain, then a right-to-left
    SVD pass discards relative singular values below ``svd_cutoff``; the
    discarded-weight sum is added to the accumulated truncation error.  Bond
    dimensions never increase.

    Raises
    ------
    ResourceError
        If ``max_bond`` would force discarding weight above ``svd_cutoff``.
    """
    tensors = [t for t in state.tensors]
    n = len(tensors)
    if n <= 1:
        return PathState(tensors=tensors, truncation_error=state.truncation_error)

    for p in range(n - 1):
        w, d, e = tensors[p].shape
        q, r = np.linalg.qr(tensors[p].reshape(w * d, e))
        tensors[p] = q.reshape(w, d, q.shape[1])
        tensors[p + 1] = np.tensordot(r, tensors[p + 1], axes=(1, 0))

    discarded_total = 0.0
    for p in range(n - 1, 0, -1):
        w, d, e = tensors[p].shape
        u, sigma, vh = _svd(tensors[p].reshape(w, d * e))
        keep, discarded = _truncation_rank(sigma, svd_cutoff, max_bond)
        discarded_total += discarded
        tensors[p] = vh[:keep].reshape(keep, d, e)
        us = u[:, :keep] * sigma[:keep]
        tensors[p - 1] = np.tensordot(tensors[p - 1], us, axes=(2, 0))

    return PathState(tensors=tensors,
                     truncation_error=state.truncation_error + discarded_total)


# The lag factors depend on the newest cell's index only through
# s+ - s- in {0, +2, -2}; the two diagonal Liouville states couple
# identically (factor 1), so the bond threading the newest index down the
# chain needs 3 sectors, not 4.  _SECTOR_OF maps Liouville index -> sector;
# sector representatives are the rows [0, 1, 2] of the factor matrices.
_SECTOR_OF = np.array([0, 1, 2, 0])
_N_SECTORS = 3


def _scaled_site(tensor, factor, first, terminal):
    """Scale one site by its lag factor while threading the new cell's index.

    The step operator is diagonal in every existing physical index and in the
    bond that carries the newest cell's index down the chain; at the terminal
    (largest-lag) site that bond ends.  The site adjacent to the new head
    ("first") resolves the full 4-valued index because it also carries the
    free propagator; deeper sites only resolve the 3 coupling sectors.
    """
    w, d, e = tensor.shape
    if first:
        tmp = np.einsum("as,se->ase", factor, tensor[0])
        if terminal:
            return tmp
        out = np.zeros((4, d, _N_SECTORS, e), dtype=tmp.dtype)
        for a in range(4):
            out[a, :, _SECTOR_OF[a], :] = tmp[a]
        return out.reshape(4, d, _N_SECTORS * e)
    tmp = np.einsum("ms,wse->mwse", factor[:_N_SECTORS], tensor)
    if terminal:
        return tmp.reshape(_N_SECTORS * w, d, e)
    out = np.zeros((_N_SECTORS, w, d, _N_SECTORS, e), dtype=tmp.dtype)
    idx = np.arange(_N_SECTORS)
    out[idx, :, :, idx, :] = tmp
    return out.reshape(_N_SECTORS * w, d, _N_SECTORS * e)


def _new_head():
    head = np.zeros((1, 4, 4), dtype=complex)
    head[0, np.arange(4), np.arange(4)] = 1.0
    return head


def _readout(tensors, half_prop):
    """Reduced density vector: contract history indices, finish with a half step."""
    v = np.ones(1, dtype=complex)
    for t in reversed(tensors[1:]):
        v = t.sum(axis=1) @ v
    rho_raw = tensors[0][0] @ v
    return half_prop @ rho_raw


def _contract_tail(tensors):
    v = tensors[-1].sum(axis=1)[:, 0]
    tensors[-2] = np.einsum("wse,e->ws", tensors[-2], v)[:, :, None]
    tensors.pop()


def propagate(cfg: SystemConfig, sd: SpectralDensity, params: TempoParams) -> Trajectory:
    """Propagate the reduced system and return polarizations on the time grid.

    Returns P_x, P_y, P_z at t_j = j*dt for j = 0..n_steps, with per-step
    cumulative truncation-error estimates.  Bit-deterministic for fixed
    inputs and fixed linear-algebra settings.

    Raises
    ------
    ResourceError
        If the bond cap conflicts with ``svd_cutoff``; the partial trajectory
        is attached to the exception.
    NumericalError
        On non-finite tensor values.
    """
    n = params.n_steps
    dt = params.dt
    memory = params.memory_length if params.memory_length is not None else n
    if sd.alpha == 0.0:
        # all influence factors are unity; truncating the memory is exact
        memory = 1
    eta = eta_coefficients(sd, cfg.temp, dt, min(memory + 1, n))

    half = free_propagator(cfg, 0.5 * dt)
    full = half @ half
    b_self = _self_factor(eta)
    # factors[k] scales the site at lag k; factors[1] also carries the free
    # full-step propagator and the new cell's self-interaction.
    n_lags = min(memory, max(n - 1, 1))
    factors = [None] + [influence_tensor(k, eta) for k in range(1, n_lags + 1)]
    factors[1] = b_self[:, None] * full * factors[1]

    times = dt * np.arange(n + 1)
    px = np.empty(n + 1)
    py = np.empty(n + 1)
    pz = np.empty(n + 1)
    trunc = np.zeros(n + 1)
    trace_dev = np.zeros(n + 1)
    max_imag = 0.0
    max_bond_reached = 1

    def record(j, rho_vec, err):
        nonlocal max_imag
        tr = rho_vec[0] + rho_vec[3]
        vals = np.array([rho_vec[1] + rho_vec[2],
                         1j * (rho_vec[1] - rho_vec[2]),
                         rho_vec[0] - rho_vec[3]]) * 0.5
        if not np.all(np.isfinite(vals)):
            raise NumericalError(f"non-finite polarization at step {j}")
        max_imag = max(max_imag, float(np.max(np.abs(vals.imag))))
        px[j], py[j], pz[j] = vals.real
        trunc[j] = err
        trace_dev[j] = abs(tr - 1.0)

    rho0_vec = cfg.rho0.reshape(4)
    record(0, rho0_vec, 0.0)

    state = PathState(tensors=[(b_self * (half @ rho0_vec)).reshape(1, 4, 1)])
    record(1, _readout(state.tensors, half), state.truncation_error)

    def partial_trajectory(j):
        return Trajectory(times=times[:j], px=px[:j], py=py[:j], pz=pz[:j],
                          trunc_err=trunc[:j], system=cfg, bath=sd,
                          params=params, trace_dev=trace_dev[:j],
                          max_imag=max_imag, max_bond_reached=max_bond_reached)

    for j in range(2, n + 1):
        tensors = state.tensors
        length = len(tensors)
        new = [_new_head()]
        for p in range(length):
            new.append(_scaled_site(tensors[p], factors[p + 1], first=(p == 0),
                                    terminal=(p == length - 1)))
        state = PathState(tensors=new, truncation_error=state.truncation_error)
        try:
            state = compress(state, params.svd_cutoff, params.max_bond)
        except ResourceError as exc:
            exc.partial_trajectory = partial_trajectory(j)
            raise
        if len(state.tensors) > memory:
            _contract_tail(state.tensors)
        max_bond_reached = max(max_bond_reached,
                               max(state.bond_dims, default=1))
        record(j, _readout(state.tensors, half), state.truncation_error)

    traj = partial_trajectory(n + 1)
    _validate_trajectory(traj)
    return traj


def _validate_trajectory(traj: Trajectory):
    radius = traj.px ** 2 + traj.py ** 2 + traj.pz ** 2
    if np.any(radius > 0.25 + _BLOCH_TOL):
        raise NumericalError("reduced state left the Bloch ball")
    for comp in (traj.px, traj.py, traj.pz):
        if np.any(np.abs(comp) > 0.5 + _BLOCH_TOL):
            raise NumericalError("polarization out of range")
