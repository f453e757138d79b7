"""Lineshape fitting (damped Gauss-Newton on log-gain) and log-law power fits."""

from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from .medium import LineComponent, MediumChannel

PARAM_KINDS = ("strength", "hwhm", "center")


@dataclass(frozen=True)
class FitResult:
    params: dict
    residual_rms: float
    iterations: int
    converged: bool
    parameter_sigmas: dict
    channel: MediumChannel | None = None
    flags: tuple[str, ...] = ()
    cost_history: tuple[float, ...] = field(default=(), repr=False)


def param_names(n_lines: int) -> list[str]:
    return [f"{kind}_{j}" for j in range(n_lines) for kind in PARAM_KINDS]


def pack(channel: MediumChannel) -> np.ndarray:
    return np.array(
        [v for ln in channel.lines for v in (ln.strength, ln.hwhm, ln.center_detuning)], dtype=float
    )


def unpack(theta, template: MediumChannel) -> MediumChannel:
    theta = np.asarray(theta, dtype=float).reshape(-1, 3)
    lines = [LineComponent(center_detuning=c, hwhm=g, strength=s) for s, g, c in theta]
    return template.with_lines(lines)


def log_gain_model(theta, detuning, length: float) -> np.ndarray:
    """ln G(D) = sum_j s_j L g_j^2 / ((D - c_j)^2 + g_j^2)."""
    d = np.asarray(detuning, dtype=float)
    out = np.zeros_like(d)
    for s, g, c in np.asarray(theta, dtype=float).reshape(-1, 3):
        out += s * length * g * g / ((d - c) ** 2 + g * g)
    return out


def log_gain_jacobian(theta, detuning, length: float) -> np.ndarray:
    d = np.asarray(detuning, dtype=float)
    theta = np.asarray(theta, dtype=float).reshape(-1, 3)
    jac = np.empty((d.size, theta.size))
    for j, (s, g, c) in enumerate(theta):
        u = d - c
        den = u * u + g * g
        jac[:, 3 * j] = length * g * g / den
        jac[:, 3 * j + 1] = 2 * s * length * g * u * u / den**2
        jac[:, 3 * j + 2] = 2 * s * length * g * g * u / den**2
    return jac


def _bounds_arrays(bounds, n):
    if bounds is None:
        lo = np.full(n, -np.inf)
        hi = np.full(n, np.inf)
        lo[1::3] = 1e-12  # hwhm stays positive
        return lo, hi
    lo, hi = (np.asarray(b, dtype=float) for b in bounds)
    if lo.shape != (n,) or hi.shape != (n,):
        raise ValueError(f"bounds must be two arrays of length {n}")
    return lo, hi


def fit_lineshape(
    samples,
    initial: MediumChannel,
    bounds=None,
    max_iterations: int = 200,
    rtol: float = 1e-10,
    gtol: float = 1e-12,
    degenerate_ratio: float = 1e-3,
) -> FitResult:
    """Fit line strengths, widths and centers to sampled intensity gains.

    Parameters
    ----------
    samples : sequence of (detuning, gain)
        Angular detunings (rad/s) and positive intensity gains.
    initial : MediumChannel
        Starting lines; the channel length is held fixed.
    bounds : (lower, upper), optional
        Arrays over the packed parameters ``(strength, hwhm, center)`` per line.

    Minimizes the squared log-gain residuals with a Levenberg-Marquardt
    iteration. Damping is scaled by ``diag(J^T J)``; the gradient test
    uses parameters scaled by their magnitude so it is unit-free.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ValueError("samples must be (detuning, gain) pairs")
    det, gain = data[:, 0], data[:, 1]
    if np.any(gain <= 0):
        raise ValueError("gains must be positive")
    theta = pack(initial)
    n = theta.size
    if n == 0:
        raise ValueError("initial channel has no lines to fit")
    if det.size < 4 * n:
        raise ValueError(f"need at least {4 * n} samples for {n} parameters, got {det.size}")
    lo, hi = _bounds_arrays(bounds, n)
    if np.any(theta < lo) or np.any(theta > hi):
        raise ValueError("initial parameters outside bounds")

    length = initial.length
    target = np.log(gain)

    def residual(t):
        return log_gain_model(t, det, length) - target

    r = residual(theta)
    cost = float(r @ r)
    history = [cost]
    lam = 1e-3
    streak = 0
    converged = False
    it = 0
    while it < max_iterations:
        it += 1
        jac = log_gain_jacobian(theta, det, length)
        jtj = jac.T @ jac
        grad = jac.T @ r
        scale = np.maximum(np.abs(theta), 1e-300)
        scaled_grad = float(np.linalg.norm(grad * scale))
        diag = np.diag(jtj).copy()
        diag[diag == 0] = 1.0
        while True:
            a = jtj + lam * np.diag(diag)
            try:
                step = -np.linalg.solve(a, grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                trial = np.clip(theta + step, lo, hi)
                r_trial = residual(trial)
                trial_cost = float(r_trial @ r_trial)
                if trial_cost <= cost:
                    break
            lam *= 10.0
            if lam > 1e12:
                raise RuntimeError("damping exceeded 1e12; normal equations are singular")
        rel = abs(cost - trial_cost) / cost if cost > 0 else 0.0
        theta, r, cost = trial, r_trial, trial_cost
        history.append(cost)
        lam = max(lam / 10.0, 1e-15)
        if rel < rtol or scaled_grad < gtol:
            streak += 1
            if streak >= 2:
                converged = True
                break
        else:
            streak = 0

    channel = unpack(theta, initial)
    m = det.size
    jac = log_gain_jacobian(theta, det, length)
    dof = max(m - n, 1)
    try:
        cov = np.linalg.pinv(jac.T @ jac) * (cost / dof)
        sig = np.sqrt(np.clip(np.diag(cov), 0, None))
    except np.linalg.LinAlgError:
        sig = np.full(n, math.nan)
    names = param_names(n // 3)
    strengths = np.abs(theta[0::3])
    flags = ()
    if strengths.size > 1 and strengths.min() < degenerate_ratio * strengths.max():
        flags = ("degenerate component",)
    return FitResult(
        params=dict(zip(names, theta.tolist())),
        residual_rms=math.sqrt(cost / m),
        iterations=it,
        converged=converged,
        parameter_sigmas=dict(zip(names, sig.tolist())),
        channel=channel,
        flags=flags,
        cost_history=tuple(history),
    )


@dataclass(frozen=True)
class LogLawFit:
    """advancement = offset + slope * ln(power / reference_power)."""

    offset: float
    slope: float
    reference_power: float
    residual_rms: float = 0.0

    def __post_init__(self):
        if not self.reference_power > 0:
            raise ValueError("reference_power must be positive")

    def __call__(self, power):
        return self.offset + self.slope * np.log(np.asarray(power, dtype=float) / self.reference_power)

    def at_reference(self, reference_power: float) -> LogLawFit:
        """Same curve expressed against another reference power."""
        shift = self.slope * math.log(reference_power / self.reference_power)
        return LogLawFit(self.offset + shift, self.slope, reference_power, self.residual_rms)


def fit_log_law(points) -> LogLawFit:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (power, advancement) pairs")
    if pts.shape[0] < 3:
        raise ValueError("insufficient data: need at least 3 points")
    power, adv = pts[:, 0], pts[:, 1]
    if np.any(power <= 0):
        raise ValueError("powers must be positive")
    ref = float(power.max())
    x = np.log(power / ref)
    xm, ym = x.mean(), adv.mean()
    sxx = float(np.sum((x - xm) ** 2))
    if sxx == 0:
        raise ValueError("all powers are equal; slope is undefined")
    slope = float(np.sum((x - xm) * (adv - ym)) / sxx)
    offset = float(ym - slope * xm)
    res = adv - (offset + slope * x)
    return LogLawFit(offset, slope, ref, float(np.sqrt(np.mean(res**2))))
