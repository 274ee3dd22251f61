"""Bath description: spectral density, correlation kernel, influence coefficients.

The bath enters the reduced dynamics only through the autocorrelation kernel

    C(t) = int_0^inf dw G(w) [coth(beta*w/2) cos(w t) - i sin(w t)]

and through its double time-cell integrals (the eta coefficients of the
discretized influence functional).  Both are computed here.  At zero
temperature the exponentially cut power-law spectral density admits closed
forms for C(t) and for its twice-integrated lineshape, which makes the eta
table exact up to floating-point rounding.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_function

from .errors import NumericalError

# Frequency integrals are cut at OMEGA_MAX_FACTOR * omega_c, where the
# exponential cutoff has suppressed the integrand below ~2e-22.
OMEGA_MAX_FACTOR = 50.0
QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
_QUAD_LIMIT = 500


@dataclass(frozen=True)
class SpectralDensity:
    """Exponentially cut power-law spectral density.

    G(w) = 2 * alpha * omega_s**(1-s) * w**s * exp(-w/omega_c)

    Parameters
    ----------
    alpha : float
        Dimensionless coupling strength, >= 0.
    s : float
        Spectral exponent, > 0 (s > 1 is super-Ohmic).
    omega_c : float
        Cutoff angular frequency, > 0.
    omega_s : float, optional
        Normalization frequency keeping alpha dimensionless.  Defaults to
        omega_c.
    """

    alpha: float
    s: float
    omega_c: float
    omega_s: float = None

    def __post_init__(self):
        if self.omega_s is None:
            object.__setattr__(self, "omega_s", float(self.omega_c))
        if not self.alpha >= 0.0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not self.s > 0.0:
            raise ValueError(f"s must be > 0, got {self.s}")
        if not self.omega_c > 0.0:
            raise ValueError(f"omega_c must be > 0, got {self.omega_c}")
        if not self.omega_s > 0.0:
            raise ValueError(f"omega_s must be > 0, got {self.omega_s}")


@dataclass(frozen=True)
class Temperature:
    """Bath temperature, either exactly zero or a finite inverse temperature.

    Absolute zero is a distinct exact case (closed-form kernel), never a
    large-beta approximation.  ``beta`` is 1/(k_B T) in units where hbar = 1.
    """

    beta: float = None

    def __post_init__(self):
        if self.beta is not None and not self.beta > 0.0:
            raise ValueError(f"beta must be > 0 when finite, got {self.beta}")

    @classmethod
    def zero(cls):
        """Absolute zero."""
        return cls(beta=None)

    @classmethod
    def from_beta(cls, beta):
        return cls(beta=float(beta))

    @property
    def is_zero(self):
        return self.beta is None


@dataclass(frozen=True)
class EtaTable:
    """Discretized influence-functional coefficients on a uniform time grid.

    ``eta_self`` is the self-interaction coefficient of a single time cell
    (lag 0); ``eta[k-1]`` couples cells a lag k apart, k = 1..n_steps.
    Coefficients depend only on the lag (translation invariance in the bulk).
    """

    dt: float
    n_steps: int
    eta_self: complex
    eta: np.ndarray

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if len(self.eta) != self.n_steps:
            raise ValueError("eta array length must equal n_steps")
        if not (np.isfinite(self.eta_self) and np.all(np.isfinite(self.eta))):
            raise NumericalError("non-finite influence coefficients")

    def lag(self, k):
        """Coefficient for time-lag k (0 <= k <= n_steps)."""
        if k < 0 or k > self.n_steps:
            raise ValueError(f"lag {k} outside table range 0..{self.n_steps}")
        if k == 0:
            return self.eta_self
        return complex(self.eta[k - 1])


def spectral_density(omega, sd: SpectralDensity):
    """Spectral weight G(omega); accepts scalars or arrays, omega >= 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0.0):
        raise ValueError("omega must be >= 0")
    out = 2.0 * sd.alpha * sd.omega_s ** (1.0 - sd.s) * w ** sd.s * np.exp(-w / sd.omega_c)
    return out if out.ndim else float(out)


def _kernel_prefactor(sd: SpectralDensity):
    # A in C(t) = A * (1 + i*omega_c*t)**-(s+1) at zero temperature
    return (2.0 * sd.alpha * gamma_function(sd.s + 1.0) * sd.omega_c ** 2
            * (sd.omega_s / sd.omega_c) ** (1.0 - sd.s))


def _kernel_zero_t(t, sd: SpectralDensity):
    t = np.asarray(t, dtype=float)
    return _kernel_prefactor(sd) * (1.0 + 1j * sd.omega_c * t) ** (-(sd.s + 1.0))


def _quad_oscillatory(f, omega_max, weight, wvar):
    """QAWO integral of f(w)*cos/sin(wvar*w) over [0, omega_max] with error check."""
    val, err = integrate.quad(f, 0.0, omega_max, weight=weight, wvar=wvar,
                              epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                              limit=_QUAD_LIMIT)
    tol = max(QUAD_EPSABS, QUAD_EPSREL * abs(val))
    if err > 100.0 * tol:
        raise NumericalError(
            f"oscillatory quadrature failed to converge (estimate {err:.3e})",
            achieved_error=err)
    return val


def bath_correlation(t, sd: SpectralDensity, temp: Temperature):
    """Bath autocorrelation kernel C(t) for t >= 0.

    At absolute zero returns the closed form
    ``2 alpha Gamma(s+1) omega_c^2 (omega_s/omega_c)^(1-s) (1+i omega_c t)^-(s+1)``;
    at finite beta evaluates the defining frequency integral by adaptive
    quadrature.

    Raises
    ------
    NumericalError
        If the quadrature error estimate exceeds the configured tolerance.
    """
    t = float(t)
    if t < 0.0:
        raise ValueError("t must be >= 0")
    if sd.alpha == 0.0:
        return 0.0 + 0.0j
    if temp.is_zero:
        return complex(_kernel_zero_t(t, sd))

    beta = temp.beta
    omega_max = OMEGA_MAX_FACTOR * sd.omega_c

    def g_coth(w):
        return spectral_density(w, sd) / np.tanh(0.5 * beta * w)

    def g_plain(w):
        return spectral_density(w, sd)

    if t == 0.0:
        real, err = integrate.quad(g_coth, 0.0, omega_max,
                                   epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL,
                                   limit=_QUAD_LIMIT)
        if err > 100.0 * max(QUAD_EPSABS, QUAD_EPSREL * abs(real)):
            raise NumericalError("kernel quadrature failed at t=0",
                                 achieved_error=err)
        return complex(real, 0.0)
    real = _quad_oscillatory(g_coth, omega_max, "cos", t)
    imag = -_quad_oscillatory(g_plain, omega_max, "sin", t)
    return complex(real, imag)


def _lineshape_zero_t(t, sd: SpectralDensity):
    """Twice-integrated kernel g(t) at T=0, closed form (g'' = C, g(0)=g'(0)=0)."""
    t = np.asarray(t, dtype=float)
    a = _kernel_prefactor(sd)
    s = sd.s
    wc = sd.omega_c
    z = 1.0 + 1j * wc * t
    if abs(s - 1.0) < 1e-12:
        return a * (-1j * t / wc + np.log(z) / wc ** 2)
    return a * (-1j * t / (s * wc) + (z ** (1.0 - s) - 1.0) / (s * (1.0 - s) * wc ** 2))


def _lineshape_finite_beta(t, sd: SpectralDensity, beta):
    """g(t) by quadrature of (G/w^2)[coth(bw/2)(1-cos wt) + i(sin wt - w t)]."""
    t = float(t)
    if t == 0.0:
        return 0.0 + 0.0j
    omega_max = OMEGA_MAX_FACTOR * sd.omega_c

    def f_re(w):
        return (spectral_density(w, sd) / w ** 2
                * (1.0 - np.cos(w * t)) / np.tanh(0.5 * beta * w))

    def f_im(w):
        return spectral_density(w, sd) / w ** 2 * (np.sin(w * t) - w * t)

    real, err_r = integrate.quad(f_re, 0.0, omega_max, epsabs=QUAD_EPSABS,
                                 epsrel=QUAD_EPSREL, limit=_QUAD_LIMIT)
    imag, err_i = integrate.quad(f_im, 0.0, omega_max, epsabs=QUAD_EPSABS,
                                 epsrel=QUAD_EPSREL, limit=_QUAD_LIMIT)
    for val, err in ((real, err_r), (imag, err_i)):
        if err > 100.0 * max(QUAD_EPSABS, QUAD_EPSREL * abs(val)):
            raise NumericalError("lineshape quadrature failed to converge",
                                 achieved_error=err)
    return complex(real, imag)


def lineshape(t, sd: SpectralDensity, temp: Temperature):
    """Twice-integrated bath kernel g(t) with g'' = C and g(0) = g'(0) = 0.

    The real part is one quarter of the pure-dephasing decay function; the
    second differences of g on a uniform grid are exactly the influence
    coefficients, which is how :func:`eta_coefficients` uses it.
    """
    if sd.alpha == 0.0:
        t_arr = np.asarray(t, dtype=float)
        z = np.zeros_like(t_arr, dtype=complex)
        return z if z.ndim else 0.0 + 0.0j
    if temp.is_zero:
        out = _lineshape_zero_t(t, sd)
        return out if np.ndim(t) else complex(out)
    if np.ndim(t):
        return np.array([_lineshape_finite_beta(ti, sd, temp.beta)
                         for ti in np.asarray(t, dtype=float)])
    return _lineshape_finite_beta(t, sd, temp.beta)


def eta_coefficients(sd: SpectralDensity, temp: Temperature, dt, n_steps) -> EtaTable:
    """Influence coefficients for a uniform grid of ``n_steps`` cells of width ``dt``.

    eta_self = int_0^dt dt' int_0^t' dt'' C(t'-t'')
    eta_k    = int_{k dt}^{(k+1) dt} dt' int_0^dt dt'' C(t'-t''),  k >= 1

    Both are corner second-differences of the twice-integrated kernel g, so
    the cell integrals are evaluated without nested quadrature:
    eta_self = g(dt) and eta_k = g((k+1)dt) - 2 g(k dt) + g((k-1)dt).
    Deterministic for fixed inputs.
    """
    dt = float(dt)
    n_steps = int(n_steps)
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if sd.alpha == 0.0:
        return EtaTable(dt=dt, n_steps=n_steps, eta_self=0.0 + 0.0j,
                        eta=np.zeros(n_steps, dtype=complex))
    grid = dt * np.arange(n_steps + 2)
    g = np.asarray(lineshape(grid, sd, temp), dtype=complex)
    eta = g[2:] - 2.0 * g[1:-1] + g[:-2]
    return EtaTable(dt=dt, n_steps=n_steps, eta_self=complex(g[1]), eta=eta)
