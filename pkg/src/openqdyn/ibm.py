"""Exact pure-dephasing results and weak-coupling predictions.

For a two-state system whose bath couples through the same operator as the
system Hamiltonian, populations of the coupling eigenbasis are conserved and
the coherence decay is exactly solvable.  This module provides that decay
function (closed form at zero temperature, quadrature at finite beta), the
resulting polarization, the weak-coupling frequency renormalization and
one-phonon damping rate, and the overdamping boundary they imply.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_function

from .bath import (OMEGA_MAX_FACTOR, QUAD_EPSABS, QUAD_EPSREL,
                   SpectralDensity, Temperature, spectral_density)
from .errors import NumericalError

# Gamma(s-1) diverges as s -> 1+; quantities built on the effective coupling
# are rejected closer to the edge than this.
S_EDGE = 1.0 + 1e-6

_QUAD_LIMIT = 2000


@dataclass(frozen=True)
class WeakCouplingPrediction:
    """Renormalized frequency and one-phonon rate for a weakly coupled system."""

    alpha_tilde: float
    delta_eff: float
    gamma_eff: float


def _require_super_ohmic(s):
    if s < S_EDGE:
        raise ValueError(
            f"s = {s} is too close to (or below) the Ohmic point: the "
            "effective coupling 8*alpha*Gamma(s-1) diverges as s -> 1+")


def effective_coupling(alpha, s):
    """Effective coupling 8*alpha*Gamma(s-1), finite only for s > 1."""
    _require_super_ohmic(s)
    return 8.0 * alpha * gamma_function(s - 1.0)


def effective_tunneling(alpha, s, delta):
    """Bath-renormalized tunneling frequency delta * exp(-8*alpha*Gamma(s-1)).

    Independent of the cutoff frequency.  Raises for s <= 1 where the
    renormalization diverges.
    """
    return delta * np.exp(-effective_coupling(alpha, s))


def one_phonon_rate(alpha, delta_eff, omega_c):
    """One-phonon damping rate (pi/2) * alpha * delta_eff**2 / omega_c.

    Valid for spectral exponent s = 2 at zero temperature; halves when
    omega_c doubles at fixed alpha.
    """
    return 0.5 * np.pi * alpha * delta_eff ** 2 / omega_c


def weak_coupling_prediction(alpha, s, delta, omega_c) -> WeakCouplingPrediction:
    """Bundle alpha_tilde, delta_eff and gamma_eff for given bath parameters."""
    at = effective_coupling(alpha, s)
    d_eff = delta * np.exp(-at)
    return WeakCouplingPrediction(alpha_tilde=at, delta_eff=d_eff,
                                  gamma_eff=one_phonon_rate(alpha, d_eff, omega_c))


def decay_function_zero_T(t, alpha, s, omega_c, omega_s=None):
    """Zero-temperature dephasing decay function (closed form, s > 1).

    Gamma_0(t) = alpha_tilde * {1 - cos[(s-1) arctan(w_c t)]
                                / [1 + (w_c t)^2]^((s-1)/2)}

    Monotonically approaches alpha_tilde = 8*alpha*Gamma(s-1) at late times,
    after which no further dephasing takes place.  Accepts scalars or arrays.
    """
    _require_super_ohmic(s)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("t must be >= 0")
    if omega_s is None:
        omega_s = omega_c
    at = 8.0 * alpha * gamma_function(s - 1.0) * (omega_s / omega_c) ** (1.0 - s)
    x = omega_c * t
    out = at * (1.0 - np.cos((s - 1.0) * np.arctan(x))
                / (1.0 + x ** 2) ** (0.5 * (s - 1.0)))
    return out if out.ndim else float(out)


def decay_function_quadrature(t, sd: SpectralDensity, temp: Temperature):
    """Decay function by adaptive quadrature of the defining integral.

    Gamma_T(t) = 4 int_0^inf dw G(w)/w^2 [1 - cos(w t)] coth(beta w / 2)

    Works at absolute zero too (coth -> 1), where it serves as the
    independent cross-check of the closed form.
    """
    t = float(t)
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if t == 0.0 or sd.alpha == 0.0:
        return 0.0
    omega_max = OMEGA_MAX_FACTOR * sd.omega_c

    if temp.is_zero and sd.s > 1.0 and sd.omega_c * t > 2.0 * np.pi:
        # Split form: both pieces converge for s > 1, and the oscillatory
        # piece is handled by a dedicated cos-weighted rule.
        def f(w):
            return spectral_density(w, sd) / w ** 2

        flat, err1 = integrate.quad(f, 0.0, omega_max, epsabs=QUAD_EPSABS,
                                    epsrel=QUAD_EPSREL, limit=_QUAD_LIMIT)
        osc, err2 = integrate.quad(f, 0.0, omega_max, weight="cos", wvar=t,
                                   epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                                   limit=_QUAD_LIMIT)
        val = 4.0 * (flat - osc)
        err = 4.0 * (err1 + err2)
    else:
        beta = temp.beta

        def f(w):
            core = spectral_density(w, sd) / w ** 2 * (1.0 - np.cos(w * t))
            if beta is None:
                return core
            return core / np.tanh(0.5 * beta * w)

        val, err = integrate.quad(f, 0.0, omega_max, epsabs=QUAD_EPSABS,
                                  epsrel=QUAD_EPSREL, limit=_QUAD_LIMIT)
        val *= 4.0
        err *= 4.0
    if err > 100.0 * max(QUAD_EPSABS, QUAD_EPSREL * abs(val)):
        raise NumericalError("decay-function quadrature did not converge",
                             achieved_error=err)
    return val


def decay_function(t, sd: SpectralDensity, temp: Temperature):
    """Dephasing decay function Gamma_T(t) >= 0.

    Delegates to the closed form at absolute zero; at finite beta the
    defining integral is evaluated by adaptive quadrature.
    """
    if temp.is_zero:
        return decay_function_zero_T(t, sd.alpha, sd.s, sd.omega_c, sd.omega_s)
    if np.ndim(t):
        return np.array([decay_function_quadrature(ti, sd, temp)
                         for ti in np.asarray(t, dtype=float)])
    return decay_function_quadrature(t, sd, temp)


def ibm_polarization(t, delta, sd: SpectralDensity, temp: Temperature):
    """Exact pure-dephasing polarization (1/2) cos(delta t) exp(-Gamma_T(t)).

    No frequency renormalization occurs in this model; only the amplitude
    decays.  Accepts scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    out = 0.5 * np.cos(delta * t_arr) * np.exp(-np.asarray(decay_function(t_arr, sd, temp)))
    return out if out.ndim else float(out)


def overdamping_boundary(s):
    """Coupling strength 1/(8*Gamma(s-1)) where the effective coupling reaches 1.

    Beyond it the pure-dephasing amplitude suppression exp(-alpha_tilde)
    leaves no sizable oscillation.  Independent of omega_c; s > 1 required.
    """
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < S_EDGE):
        _require_super_ohmic(float(np.min(s_arr)))
    out = 1.0 / (8.0 * gamma_function(s_arr - 1.0))
    return out if out.ndim else float(out)
