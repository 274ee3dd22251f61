"""Scratch validation driver (not part of the package)."""
import time
import numpy as np
from scipy import integrate

from openqdyn import (SpectralDensity, Temperature, SystemConfig, TempoParams,
                      propagate, eta_coefficients, bath_correlation,
                      decay_function_zero_T, ibm_polarization, bloch_state,
                      influence_tensor, free_propagator)
from openqdyn.bath import _kernel_zero_t

T0 = Temperature.zero()

print("=== 1. eta lag-0 and lag-3 vs brute dblquad ===")
sd = SpectralDensity(alpha=0.1, s=2.0, omega_c=10.0)
dt = 0.01
tab = eta_coefficients(sd, T0, dt, 10)

def c_re(t):
    return _kernel_zero_t(t, sd).real
def c_im(t):
    return _kernel_zero_t(t, sd).imag

# lag 0: int_0^dt dt' int_0^t' dt'' C(t'-t'')
re0, _ = integrate.dblquad(lambda tpp, tp: c_re(tp - tpp), 0, dt, 0, lambda tp: tp,
                           epsabs=1e-14, epsrel=1e-12)
im0, _ = integrate.dblquad(lambda tpp, tp: c_im(tp - tpp), 0, dt, 0, lambda tp: tp,
                           epsabs=1e-14, epsrel=1e-12)
print("eta_self:", tab.eta_self, "oracle:", complex(re0, im0),
      "rel err:", abs(tab.eta_self - complex(re0, im0)) / abs(complex(re0, im0)))

k = 3
re3, _ = integrate.dblquad(lambda tpp, tp: c_re(tp - tpp), k*dt, (k+1)*dt, 0, dt,
                           epsabs=1e-14, epsrel=1e-12)
im3, _ = integrate.dblquad(lambda tpp, tp: c_im(tp - tpp), k*dt, (k+1)*dt, 0, dt,
                           epsabs=1e-14, epsrel=1e-12)
print("eta_3:", tab.lag(3), "oracle:", complex(re3, im3),
      "rel err:", abs(tab.lag(3) - complex(re3, im3)) / abs(complex(re3, im3)))

print("=== 2. free evolution alpha=0 ===")
cfg = SystemConfig(delta=1.0)
sd0 = SpectralDensity(alpha=0.0, s=2.0, omega_c=10.0)
traj = propagate(cfg, sd0, TempoParams(dt=0.01, n_steps=1000))
err = np.max(np.abs(traj.pz - 0.5 * np.cos(traj.times)))
print("max |Pz - cos/2| =", err)

print("=== 3. dense path sum vs MPS (n=7) ===")
rng = np.random.default_rng(17)
def dense_oracle(cfg, sd, dt, n):
    tab = eta_coefficients(sd, cfg.temp, dt, n)
    splus = np.array([1., 1., -1., -1.]); sminus = np.array([1., -1., 1., -1.])
    dphi = splus - sminus
    def bmat(k):
        e = tab.lag(k)
        return np.exp(-np.outer(dphi, np.ones(4)) * (e * splus - np.conj(e) * sminus))
    b0 = np.exp(-dphi * (tab.eta_self * splus - np.conj(tab.eta_self) * sminus))
    import scipy.linalg
    uh = scipy.linalg.expm(-1j * cfg.hamiltonian() * dt / 2)
    F = np.kron(uh, uh.conj()); G2 = F @ F
    A = b0 * (F @ cfg.rho0.reshape(4))   # shape (4,)
    out = [cfg.rho0.reshape(4), F @ A]
    for j in range(1, n):
        # A has axes (s_{j-1}, ..., s_0); new axis in front
        shape = A.shape
        newA = np.zeros((4,) + shape, dtype=complex)
        idx_new = np.arange(4)
        # start with b0[s_j] * G2[s_j, s_{j-1}] * A
        newA = (b0[:, None] * G2)[(...,) + (None,) * (len(shape) - 1)] * A[None, ...]
        for lag in range(1, j + 1):
            bk = bmat(lag)   # [s_j, s_{j-lag}]
            shp = [4] + [1] * len(shape)
            shp[lag] = 4
            newA = newA * bk.reshape(shp)
        A = newA
        rho = F @ A.reshape(4, -1).sum(axis=1)
        out.append(rho)
    return out

cfgr = SystemConfig(delta=1.0, phi=0.3, bias=0.2,
                    rho0=bloch_state(0.3, -0.2, 0.8))
sdr = SpectralDensity(alpha=0.4, s=2.0, omega_c=10.0)
n7 = 7
rhos = dense_oracle(cfgr, sdr, 0.05, n7)
trajm = propagate(cfgr, sdr, TempoParams(dt=0.05, n_steps=n7, svd_cutoff=0.0))
pz_or = np.array([ (r[0] - r[3]).real * 0.5 for r in rhos])
px_or = np.array([ (r[1] + r[2]).real * 0.5 for r in rhos])
print("max |Pz_mps - Pz_dense| =", np.max(np.abs(trajm.pz - pz_or)))
print("max |Px_mps - Px_dense| =", np.max(np.abs(trajm.px - px_or)))

print("=== 4. pure dephasing vs IBM exact ===")
sd2 = SpectralDensity(alpha=0.2, s=2.0, omega_c=10.0)
cfg_pd = SystemConfig(delta=0.0, phi=0.0, bias=1.0, rho0=bloch_state(1.0, 0.0, 0.0))
t0 = time.time()
traj_pd = propagate(cfg_pd, sd2, TempoParams(dt=0.01, n_steps=300))
print("runtime:", time.time() - t0)
exact = ibm_polarization(traj_pd.times, 1.0, sd2, T0)
print("max |Px - exact| =", np.max(np.abs(traj_pd.px - exact)))

print("=== 5. weak coupling run (short probe) ===")
sdw = SpectralDensity(alpha=0.1, s=2.0, omega_c=10.0)
cfgw = SystemConfig(delta=1.0)
t0 = time.time()
trajw = propagate(cfgw, sdw, TempoParams(dt=0.01, n_steps=1500, memory_length=200))
print("runtime 1500 steps K=200:", time.time() - t0, "max bond:", trajw.max_bond_reached)
# crude frequency from zero crossings of pz
pz = trajw.pz; t = trajw.times
sign_changes = np.where(np.diff(np.sign(pz)) != 0)[0]
if len(sign_changes) >= 3:
    # period = 2 * spacing between alternate crossings
    tc = t[sign_changes]
    period = 2 * np.mean(np.diff(tc))
    print("estimated Omega =", 2 * np.pi / period, " (expect ~0.4493)")
print("trace dev max:", np.max(trajw.trace_dev), "trunc:", trajw.trunc_err[-1])

print("=== 6. strong coupling minimum s=2 ===")
for alpha in (0.6, 0.7, 0.8, 0.9):
    sds = SpectralDensity(alpha=alpha, s=2.0, omega_c=10.0)
    t0 = time.time()
    trajs = propagate(SystemConfig(delta=1.0), sds, TempoParams(dt=0.005, n_steps=200))
    pz = trajs.pz
    mins = [i for i in range(1, len(pz) - 1) if pz[i] < pz[i-1] and pz[i] < pz[i+1]]
    msg = "no minimum"
    if mins:
        i = mins[0]
        prom = float(np.max(pz[i+1:]) - pz[i])
        msg = f"min at t={trajs.times[i]:.3f} value={pz[i]:.5f} prominence={prom:.2e}"
    print(f"alpha={alpha}: {msg}  [{time.time()-t0:.1f}s, maxbond {trajs.max_bond_reached}]")
