"""Broadening kernels and their resolution planners.

Four kernel families are implemented, all acting on spectra supported in
[-1, 1]:

* Fejer: the squared Dirichlet kernel that arises as the outcome
  distribution of phase estimation on a uniform ancilla register.  It is
  a discrete distribution over the grid ``sigma_q = 2q/N - 1`` and is
  periodic in its argument with period 2.
* Qubitized Fejer: the arccos-folded variant produced when the walk
  operator encodes the spectrum through cos(theta).  Discrete over the
  same grid; frequencies are recovered through ``cos(pi sigma)``.
* Gaussian: the classic broadening profile ``exp(-(sigma-omega)^2 /
  (2 lam^2)) / (sqrt(2 pi) lam)``, reachable from Chebyshev moment data.
* Jackson: a sharp window built by composing an amplifying polynomial
  with a Jackson-damped Chebyshev approximation of a tent function.

Each family has an evaluation routine, a planner that turns an accuracy
target into kernel parameters, and a shared tail-mass measurement
(:func:`sigma_accuracy`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import numpy.polynomial.chebyshev as npcheb
from scipy.special import erf

from .errors import OutOfRegimeError, ResourceLimitError, ValidationError
from .numerics import adaptive_simpson, cheb_series_coeffs, next_pow2

__all__ = [
    "AccuracyTarget",
    "FejerKernel",
    "QubitizedFejerKernel",
    "GaussianKernel",
    "JacksonKernel",
    "JacksonPlan",
    "SigmaAccuracy",
    "kernel_to_json",
    "kernel_from_json",
    "kernel_value",
    "kernel_width",
    "fejer_grid",
    "fejer_eval",
    "fejer_plan",
    "fejer_tail_bound",
    "delta_theta",
    "qubitized_fejer_eval",
    "qubitized_fejer_plan",
    "recovered_frequency",
    "gaussian_eval",
    "gaussian_resolution",
    "gaussian_tail_mass",
    "jackson_tent",
    "jackson_damping",
    "jackson_coeffs",
    "jackson_approx",
    "jackson_tent_error",
    "amplifier_coeffs",
    "amplifier_contract_check",
    "set_amplifier_provider",
    "jackson_normalization",
    "jackson_thresholds",
    "jackson_plan",
    "jackson_eval",
    "sigma_accuracy",
]

GRID_CAP = 2**26


@dataclass(frozen=True)
class AccuracyTarget:
    """Accuracy demanded of an estimated transform.

    Attributes
    ----------
    sigma : float
        Allowed spectral leakage: at most this fraction of each peak's
        mass may land farther than `delta` from the true frequency.
    delta : float
        Frequency resolution (half-width of the window around a peak).
    beta : float
        Pointwise accuracy of the estimated transform values.
    eta : float
        Probability with which the pointwise accuracy may fail.
    """

    sigma: float
    delta: float
    beta: float = 0.1
    eta: float = 0.05

    def __post_init__(self):
        for name in ("sigma", "delta", "beta", "eta"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValidationError(f"{name} must lie in (0, 1), got {v!r}")


def _check_grid_size(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 2 or (n & (n - 1)) != 0:
        raise ValidationError(f"grid size must be a power of two >= 2, got {n!r}")


@dataclass(frozen=True)
class FejerKernel:
    """Fejer kernel on the grid ``sigma_q = 2q/n - 1``, q = 0..n-1."""

    n: int

    def __post_init__(self):
        _check_grid_size(self.n)


@dataclass(frozen=True)
class QubitizedFejerKernel:
    """arccos-folded Fejer kernel; spectra must be shifted into [0, 1]."""

    n: int

    def __post_init__(self):
        _check_grid_size(self.n)


@dataclass(frozen=True)
class GaussianKernel:
    """Gaussian broadening of width `lam`."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise ValidationError(f"lam must be positive, got {self.lam!r}")


@dataclass(frozen=True)
class JacksonKernel:
    """Amplified Jackson window.

    ``K(sigma, omega) = normalization * A_k((4/5) J((sigma - omega)/2))``
    where ``J`` is the Jackson-damped degree-`degree` Chebyshev
    approximation of the tent that peaks at 0 and reaches -1 at
    ``+-delta``, and ``A_k`` is the amplifying polynomial of degree `k`.
    `normalization` makes the profile integrate to one in the variable
    ``u = (sigma - omega)/2``.
    """

    k: int
    degree: int
    delta: float
    normalization: float

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValidationError(f"amplifier degree k must be a positive int, got {self.k!r}")
        if not isinstance(self.degree, (int, np.integer)) or self.degree < 1:
            raise ValidationError(f"window degree must be a positive int, got {self.degree!r}")
        if not (0.0 < self.delta <= 1.0):
            raise ValidationError(f"delta must lie in (0, 1], got {self.delta!r}")
        if not (self.normalization > 0.0):
            raise ValidationError(f"normalization must be positive, got {self.normalization!r}")


KernelSpec = FejerKernel | QubitizedFejerKernel | GaussianKernel | JacksonKernel

_FAMILY_NAMES = {
    FejerKernel: "fejer",
    QubitizedFejerKernel: "qubitized_fejer",
    GaussianKernel: "gaussian",
    JacksonKernel: "jackson",
}


def kernel_to_json(kernel: KernelSpec) -> dict:
    """Serialize a kernel as ``{"family": ..., "params": {...}}``."""
    family = _FAMILY_NAMES.get(type(kernel))
    if family is None:
        raise ValidationError(f"unknown kernel type {type(kernel).__name__}")
    params = {k: (int(v) if isinstance(v, (int, np.integer)) else float(v)) for k, v in vars(kernel).items()}
    return {"family": family, "params": params}


def kernel_from_json(obj: dict) -> KernelSpec:
    """Inverse of :func:`kernel_to_json`."""
    try:
        family = obj["family"]
        params = dict(obj["params"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed kernel description: {obj!r}") from exc
    classes = {name: cls for cls, name in _FAMILY_NAMES.items()}
    if family not in classes:
        raise ValidationError(f"unknown kernel family {family!r}")
    try:
        return classes[family](**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for {family}: {params!r}") from exc


# ---------------------------------------------------------------------------
# Fejer family


def fejer_grid(n: int) -> np.ndarray:
    """Outcome grid sigma_q = 2q/n - 1 for q = 0..n-1."""
    _check_grid_size(n)
    return 2.0 * np.arange(n) / n - 1.0


def fejer_eval(sigma, omega, n: int):
    """Fejer kernel ``(1/n^2) sin^2(n pi d / 2) / sin^2(pi d / 2)``, d = sigma - omega.

    Periodic in ``d`` with period 2, with the removable singularity at
    d = 0 (mod 2) filled in by its limit 1.  Evaluated through the
    numerically stable form ``(sinc(n dt) / sinc(dt))^2`` where ``dt`` is
    ``d/2`` wrapped into [-1/2, 1/2].
    """
    _check_grid_size(n)
    d = (np.asarray(sigma, dtype=float) - np.asarray(omega, dtype=float)) / 2.0
    d = d - np.round(d)
    ratio = np.sinc(n * d) / np.sinc(d)
    return ratio * ratio


def fejer_plan(target: AccuracyTarget, cap: int = GRID_CAP) -> FejerKernel:
    """Smallest power-of-two grid achieving (sigma, delta) spectral accuracy.

    The tail mass of the Fejer kernel beyond a circular distance `delta`
    is below ``1/(n delta - 2)``, so ``n >= (1/delta)(1/sigma + 2)``
    suffices; the returned size rounds that up to a power of two.
    """
    raw = (1.0 / target.delta) * (1.0 / target.sigma + 2.0)
    n = next_pow2(raw)
    if n > cap:
        raise ResourceLimitError(
            f"planned grid size {n} exceeds the cap {cap}; loosen sigma or delta"
        )
    return FejerKernel(n)


def fejer_tail_bound(n: int, delta: float) -> float:
    """Analytic bound on the Fejer mass beyond circular distance `delta`."""
    _check_grid_size(n)
    if n * delta <= 2.0:
        raise ValidationError("tail bound requires n * delta > 2")
    return 1.0 / (n * delta - 2.0)


# ---------------------------------------------------------------------------
# Qubitized Fejer family


def delta_theta(delta: float) -> float:
    """Arc resolution sqrt(1 + delta) - 1 induced by resolution `delta` in cos(theta).

    Computed as ``delta / (sqrt(1 + delta) + 1)`` to avoid cancellation
    for small `delta`.
    """
    if delta <= 0.0:
        raise ValidationError(f"delta must be positive, got {delta!r}")
    return delta / (math.sqrt(1.0 + delta) + 1.0)


def qubitized_fejer_eval(sigma, omega, n: int):
    """Folded kernel ``[K_F(sigma, t) + K_F(sigma, -t)] / 2`` with ``t = arccos(omega)/pi``.

    `omega` must lie in [-1, 1] (a tolerance of 1e-12 is forgiven and
    clipped).  The folding makes the kernel an even function of theta, as
    produced by a walk operator whose two rotation branches are mirror
    images.
    """
    _check_grid_size(n)
    om = np.asarray(omega, dtype=float)
    if np.any(np.abs(om) > 1.0 + 1e-12):
        raise ValidationError("omega must lie in [-1, 1] for the folded kernel")
    t = np.arccos(np.clip(om, -1.0, 1.0)) / np.pi
    return 0.5 * (fejer_eval(sigma, t, n) + fejer_eval(sigma, -t, n))


def qubitized_fejer_plan(target: AccuracyTarget, cap: int = GRID_CAP) -> QubitizedFejerKernel:
    """Grid size for the folded kernel at a (sigma, delta) target.

    Resolving `delta` in the spectrum requires resolving
    ``delta_theta(delta)`` on the arc, and the factor-of-two folding
    doubles the constant: ``n >= (2/delta_theta)(1/sigma + 2)``.
    """
    raw = (2.0 / delta_theta(target.delta)) * (1.0 / target.sigma + 2.0)
    n = next_pow2(raw)
    if n > cap:
        raise ResourceLimitError(
            f"planned grid size {n} exceeds the cap {cap}; loosen sigma or delta"
        )
    return QubitizedFejerKernel(n)


def recovered_frequency(sigma):
    """Map a grid outcome back to a frequency estimate, ``cos(pi sigma)``."""
    return np.cos(np.pi * np.asarray(sigma, dtype=float))


# ---------------------------------------------------------------------------
# Gaussian family


def gaussian_eval(sigma, omega, lam: float):
    """Normalized Gaussian profile of width `lam` centered at `omega`."""
    if not (lam > 0.0):
        raise ValidationError(f"lam must be positive, got {lam!r}")
    d = np.asarray(sigma, dtype=float) - np.asarray(omega, dtype=float)
    return np.exp(-d * d / (2.0 * lam * lam)) / (math.sqrt(2.0 * math.pi) * lam)


def gaussian_resolution(target: AccuracyTarget) -> float:
    """Width ``lam = delta / sqrt(2 ln(1/sigma))`` meeting the leakage target.

    With this width the mass of the Gaussian outside ``+-delta`` equals
    ``erfc(sqrt(ln(1/sigma)))`` which is below `sigma` for every sigma in
    (0, 1); the inequality is asserted as a safety net.
    """
    lam = target.delta / math.sqrt(2.0 * math.log(1.0 / target.sigma))
    inside = math.erf(target.delta / (math.sqrt(2.0) * lam))
    if inside < (1.0 - target.sigma) * (1.0 - 1e-12):
        raise OutOfRegimeError(
            f"gaussian width {lam} fails the leakage condition at sigma={target.sigma}"
        )
    return lam


def gaussian_tail_mass(delta: float, lam: float) -> float:
    """Closed-form Gaussian mass outside ``+-delta``: ``1 - erf(delta / (sqrt(2) lam))``."""
    if delta <= 0.0 or lam <= 0.0:
        raise ValidationError("delta and lam must be positive")
    return 1.0 - math.erf(delta / (math.sqrt(2.0) * lam))


# ---------------------------------------------------------------------------
# Jackson family


def jackson_tent(x, delta: float):
    """Tent target: 1 at x = 0, falling linearly to -1 at |x| = delta, -1 beyond."""
    if not (0.0 < delta <= 1.0):
        raise ValidationError(f"delta must lie in (0, 1], got {delta!r}")
    ax = np.abs(np.asarray(x, dtype=float))
    return np.where(ax <= delta, 1.0 - 2.0 * ax / delta, -1.0)


def jackson_damping(degree: int) -> np.ndarray:
    """Jackson damping factors g_0..g_degree for a degree-`degree` series."""
    if degree < 1:
        raise ValidationError("degree must be >= 1")
    big = degree + 1
    k = np.arange(degree + 1)
    return ((big - k) * np.cos(np.pi * k / big) + np.sin(np.pi * k / big) / np.tan(np.pi / big)) / big


_jackson_cache: dict[tuple[int, float], np.ndarray] = {}


def jackson_coeffs(degree: int, delta: float) -> np.ndarray:
    """Chebyshev coefficients of the Jackson-damped tent approximation."""
    key = (int(degree), float(delta))
    cached = _jackson_cache.get(key)
    if cached is None:
        raw = cheb_series_coeffs(lambda x: jackson_tent(x, delta), degree, nodes=max(4096, 4 * (degree + 1)))
        cached = raw * jackson_damping(degree)
        _jackson_cache[key] = cached
    return cached


def jackson_approx(x, degree: int, delta: float):
    """Evaluate the damped polynomial approximation J_degree of the tent."""
    return npcheb.chebval(np.asarray(x, dtype=float), jackson_coeffs(degree, delta))


def jackson_tent_error(degree: int, delta: float, gridsize: int = 10001) -> float:
    """Max |J_degree - tent| on a uniform grid over [-1, 1].

    With ``degree >= ceil(24 / delta)`` the error stays below 1/4, which
    is what the amplification stage needs.
    """
    x = np.linspace(-1.0, 1.0, gridsize)
    return float(np.max(np.abs(jackson_approx(x, degree, delta) - jackson_tent(x, delta))))


def _normal_cdf(y):
    return 0.5 * (1.0 + erf(np.asarray(y, dtype=float) / math.sqrt(2.0)))


def _default_amplifier(k: int) -> tuple[np.ndarray, float]:
    """Chebyshev-interpolated sigmoid amplifier of degree `k`.

    The target is a normal CDF ramp centered at y0 = -0.2, scaled to run
    from tau/4 up to 1 - tau/4 with tau = exp(-k/6).  The off-center ramp
    keeps the plateau average low enough for the normalization to respect
    its analytic bounds.  The interpolant is checked against the contract
    on a dense grid; if it fails, the ramp width is adjusted and the
    construction retried.
    """
    tau = math.exp(-k / 6.0)
    y0 = -0.2
    w0 = (0.6 - abs(y0)) / math.sqrt(2.0 * math.log(4.0 / tau))
    for factor in (1.0, 0.9, 0.8, 1.1, 0.7, 1.2, 0.6, 1.3):
        w = w0 * factor
        target = lambda y: tau / 4.0 + (1.0 - tau / 2.0) * _normal_cdf((y - y0) / w)
        coeffs = npcheb.chebinterpolate(target, k)
        report = amplifier_contract_check(coeffs, k, tau)
        if report["ok"]:
            return coeffs, tau
    raise ValidationError(f"could not build a contract-satisfying amplifier at degree {k}")


def amplifier_contract_check(coeffs: np.ndarray, k: int, tau: float, gridsize: int = 4001) -> dict:
    """Verify the amplifier contract on a dense grid.

    Contract: polynomial degree <= k, |A| <= 1 on [-1, 1], A >= 1 - tau
    on [3/5, 1], and A <= tau on [-1, -3/5].  Returns the measured
    margins together with an overall boolean.
    """
    if len(coeffs) > k + 1:
        return {"ok": False, "reason": "degree too high"}
    y = np.linspace(-1.0, 1.0, gridsize)
    a = npcheb.chebval(y, coeffs)
    max_abs = float(np.max(np.abs(a)))
    hi = a[y >= 0.6]
    lo = a[y <= -0.6]
    min_hi = float(np.min(hi))
    max_lo = float(np.max(lo))
    ok = max_abs <= 1.0 and min_hi >= 1.0 - tau and max_lo <= tau
    return {"ok": ok, "max_abs": max_abs, "min_high": min_hi, "max_low": max_lo, "tau": tau}


_amplifier_provider: Callable[[int], tuple[np.ndarray, float]] = _default_amplifier
_amplifier_cache: dict[int, tuple[np.ndarray, float]] = {}


def set_amplifier_provider(provider: Callable[[int], tuple[np.ndarray, float]] | None) -> None:
    """Install a custom amplifier construction (None restores the default).

    A provider maps a degree k to ``(chebyshev_coeffs, tau)`` satisfying
    the contract checked by :func:`amplifier_contract_check`.
    """
    global _amplifier_provider
    _amplifier_provider = _default_amplifier if provider is None else provider
    _amplifier_cache.clear()


def amplifier_coeffs(k: int) -> tuple[np.ndarray, float]:
    """Amplifying polynomial of degree `k` from the installed provider."""
    if k < 1:
        raise ValidationError("amplifier degree must be >= 1")
    cached = _amplifier_cache.get(k)
    if cached is None:
        cached = _amplifier_provider(int(k))
        _amplifier_cache[k] = cached
    return cached


def _jackson_profile(u: np.ndarray, k: int, degree: int, delta: float) -> np.ndarray:
    amp, _ = amplifier_coeffs(k)
    return npcheb.chebval(0.8 * jackson_approx(u, degree, delta), amp)


def jackson_normalization(k: int, degree: int, delta: float) -> float:
    """Normalization 1 / integral of ``A_k((4/5) J(u))`` for u in [-1, 1].

    The integral is computed by a composite Simpson rule whose node
    count doubles until two successive values agree to 1e-10 relative.
    """
    m = max(8193, 16 * degree + 1)
    if m % 2 == 0:
        m += 1
    prev = None
    while True:
        u = np.linspace(-1.0, 1.0, m)
        vals = _jackson_profile(u, k, degree, delta)
        h = 2.0 / (m - 1)
        s = vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum() + 2.0 * vals[2:-2:2].sum()
        total = h * s / 3.0
        if prev is not None and abs(total - prev) <= 1e-10 * max(1.0, abs(total)):
            break
        if m > 2**21:
            break
        prev = total
        m = 2 * m - 1
    if not (total > 0.0):
        raise ValidationError("window integral is not positive; amplifier contract violated")
    return 1.0 / total


@dataclass(frozen=True)
class JacksonPlan:
    """Planner output for the amplified Jackson window.

    `delta` is the window half-width in the folded variable
    ``u = (sigma - omega)/2``, `degree` the tent-approximation degree and
    `k` the amplifier degree.  When the target is loose enough that
    ``tau >= 1`` the windowing machinery is unnecessary; the plan then
    carries ``k = 0`` and ``kernel = None``.
    """

    delta: float
    degree: int
    k: int
    tau: float
    d_min: float
    kn_ok: bool
    kernel: JacksonKernel | None
    tau_amplifier: float | None = None
    norm_lower: float | None = None
    norm_upper: float | None = None


def jackson_thresholds(sigma: float, delta: float) -> tuple[float, float]:
    """Amplifier threshold and combined-degree floor for a leakage target.

    ``tau = sigma/(1-sigma) * delta/(2-delta)`` is the largest amplifier
    threshold for which the idealized window leaks at most `sigma`, and
    ``d_min = (288/delta) ln(1/tau)`` is the implied lower bound on the
    product of amplifier and window degrees.  At the degenerate boundary
    ``tau = 1`` the floor is 0: any window satisfies the target.
    """
    if not (0.0 < sigma < 1.0):
        raise ValidationError(f"sigma must lie in (0, 1), got {sigma!r}")
    if not (0.0 < delta < 2.0):
        raise ValidationError(f"delta must lie in (0, 2), got {delta!r}")
    tau = sigma / (1.0 - sigma) * delta / (2.0 - delta)
    d_min = (288.0 / delta) * math.log(1.0 / tau)
    return tau, d_min


def jackson_plan(target: AccuracyTarget) -> JacksonPlan:
    """Plan window and amplifier degrees for a (sigma, delta) target.

    The window half-width is ``delta/2`` in the variable ``u = (sigma -
    omega)/2``; the tent approximation uses ``degree = ceil(24 / (delta/2))``
    and the amplifier threshold and degree floor come from
    :func:`jackson_thresholds`, with ``k = ceil(6 ln(1/tau))``.  `kn_ok`
    records whether ``k * degree`` meets the floor.  Analytic bounds on
    the normalization are included when available (the upper bound needs
    ``tau < 5/8``).  A threshold ``tau >= 1`` is a degenerate target: the
    plan reports it with ``kernel = None`` rather than raising.
    """
    sig, dlt = target.sigma, target.delta
    half = dlt / 2.0
    degree = math.ceil(24.0 / half)
    tau, d_min = jackson_thresholds(sig, dlt)
    if tau >= 1.0:
        return JacksonPlan(
            delta=half,
            degree=degree,
            k=0,
            tau=tau,
            d_min=d_min,
            kn_ok=True,
            kernel=None,
        )
    k = max(1, math.ceil(6.0 * math.log(1.0 / tau)))
    _, tau_amp = amplifier_coeffs(k)
    norm = jackson_normalization(k, degree, half)
    lower = 1.0 / (2.0 * half + tau * (2.0 - 2.0 * half))
    upper = 4.0 / (half * (5.0 - 8.0 * tau)) if tau < 5.0 / 8.0 else None
    kernel = JacksonKernel(k=k, degree=degree, delta=half, normalization=norm)
    return JacksonPlan(
        delta=half,
        degree=degree,
        k=k,
        tau=tau,
        d_min=d_min,
        kn_ok=(k * degree >= d_min),
        kernel=kernel,
        tau_amplifier=tau_amp,
        norm_lower=lower,
        norm_upper=upper,
    )


def jackson_eval(sigma, omega, kernel: JacksonKernel):
    """Evaluate the amplified window at (sigma, omega)."""
    u = (np.asarray(sigma, dtype=float) - np.asarray(omega, dtype=float)) / 2.0
    return kernel.normalization * _jackson_profile(np.asarray(u), kernel.k, kernel.degree, kernel.delta)


# ---------------------------------------------------------------------------
# Shared dispatch and tail-mass measurement


def kernel_value(kernel: KernelSpec, sigma, omega):
    """Evaluate any kernel family at (sigma, omega).

    Discrete families (Fejer, qubitized Fejer) return probability masses
    attached to grid points; continuous families return densities.
    """
    if isinstance(kernel, FejerKernel):
        return fejer_eval(sigma, omega, kernel.n)
    if isinstance(kernel, QubitizedFejerKernel):
        return qubitized_fejer_eval(sigma, omega, kernel.n)
    if isinstance(kernel, GaussianKernel):
        return gaussian_eval(sigma, omega, kernel.lam)
    if isinstance(kernel, JacksonKernel):
        return jackson_eval(sigma, omega, kernel)
    raise ValidationError(f"unknown kernel type {type(kernel).__name__}")


def kernel_width(kernel: KernelSpec) -> float:
    """Characteristic width, used to warn about under-resolved quadrature."""
    if isinstance(kernel, (FejerKernel, QubitizedFejerKernel)):
        return 2.0 / kernel.n
    if isinstance(kernel, GaussianKernel):
        return kernel.lam
    if isinstance(kernel, JacksonKernel):
        return kernel.delta
    raise ValidationError(f"unknown kernel type {type(kernel).__name__}")


@dataclass
class SigmaAccuracy:
    """Measured spectral leakage of a kernel.

    `outside[i]` is the kernel mass farther than `delta` from
    `omega0[i]`, and `value` is the worst case over the scan.
    """

    family: str
    delta: float
    spacing: float
    omega0: np.ndarray
    outside: np.ndarray
    value: float = field(init=False)

    def __post_init__(self):
        self.value = float(np.max(self.outside)) if self.outside.size else math.nan


def _fejer_outside(n: int, delta: float, omega0: np.ndarray) -> np.ndarray:
    grid = fejer_grid(n)
    k = fejer_eval(grid[None, :], omega0[:, None], n)
    d = (grid[None, :] - omega0[:, None]) / 2.0
    d = d - np.round(d)
    outside = np.abs(2.0 * d) > delta
    return np.sum(np.where(outside, k, 0.0), axis=1)


def _qubitized_outside(n: int, delta: float, omega0: np.ndarray) -> np.ndarray:
    grid = fejer_grid(n)
    rec = recovered_frequency(grid)
    k = qubitized_fejer_eval(grid[None, :], omega0[:, None], n)
    outside = np.abs(rec[None, :] - omega0[:, None]) > delta / 2.0
    return np.sum(np.where(outside, k, 0.0), axis=1)


def _gaussian_outside(lam: float, delta: float, omega0: np.ndarray) -> np.ndarray:
    # Translation invariance makes the escaping mass independent of the
    # center, so the two tail integrals over the window +-max(8 lam, delta)
    # are computed once and broadcast.
    w = max(8.0 * lam, delta)
    if w <= delta:
        return np.zeros(omega0.size)
    f = lambda s: float(gaussian_eval(s, 0.0, lam))
    tail = adaptive_simpson(f, delta, w, tol=1e-10) + adaptive_simpson(f, -w, -delta, tol=1e-10)
    return np.full(omega0.size, tail)


def _jackson_outside(kernel: JacksonKernel, delta: float, omega0: np.ndarray) -> np.ndarray:
    # The window is translation covariant in u = (sigma - omega)/2, so the
    # tail fraction is a single number: the profile mass at |u| > delta/2
    # relative to the total over [-1, 1].
    m = max(32 * kernel.degree + 1, 8193)
    u = np.linspace(0.0, 1.0, m)
    vals = kernel.normalization * _jackson_profile(u, kernel.k, kernel.degree, kernel.delta)
    cum = np.concatenate(([0.0], np.cumsum((vals[1:] + vals[:-1]) * 0.5 * (u[1] - u[0]))))
    half_mass = cum[-1]
    at_edge = np.interp(delta / 2.0, u, cum)
    tail_fraction = (half_mass - at_edge) / half_mass
    return np.full(omega0.size, tail_fraction)


def sigma_accuracy(kernel: KernelSpec, delta: float, spacing: float | None = None) -> SigmaAccuracy:
    """Measure the worst-case kernel mass escaping a ``+-delta`` window.

    The scan runs omega0 over [-1, 1] (or [0, 1] for the folded family,
    whose spectra are shifted there) with the given spacing, default
    ``delta / 20``.  Distances are circular for the Fejer family, match
    the frequency-recovery criterion ``|cos(pi sigma) - omega0| <=
    delta/2`` for the folded family, and are plain euclidean for the
    continuous families.
    """
    if delta <= 0.0:
        raise ValidationError("delta must be positive")
    h = delta / 20.0 if spacing is None else float(spacing)
    if h <= 0.0:
        raise ValidationError("spacing must be positive")
    if isinstance(kernel, QubitizedFejerKernel):
        omega0 = np.arange(0.0, 1.0 + h / 2.0, h)
        outside = _qubitized_outside(kernel.n, delta, omega0)
        family = "qubitized_fejer"
    elif isinstance(kernel, FejerKernel):
        omega0 = np.arange(-1.0, 1.0 + h / 2.0, h)
        outside = _fejer_outside(kernel.n, delta, omega0)
        family = "fejer"
    elif isinstance(kernel, GaussianKernel):
        omega0 = np.arange(-1.0, 1.0 + h / 2.0, h)
        outside = _gaussian_outside(kernel.lam, delta, omega0)
        family = "gaussian"
    elif isinstance(kernel, JacksonKernel):
        omega0 = np.arange(-1.0, 1.0 + h / 2.0, h)
        outside = _jackson_outside(kernel, delta, omega0)
        family = "jackson"
    else:
        raise ValidationError(f"unknown kernel type {type(kernel).__name__}")
    return SigmaAccuracy(family=family, delta=delta, spacing=h, omega0=omega0, outside=outside)
