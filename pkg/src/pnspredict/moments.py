"""Vanishing-moment checks and the polynomial reproduction order.

A kernel set reproduces polynomials of degree < kappa exactly when the
generalized moment sums

    sum_i C(j,i) i! sum_{l,n} (x_n + rho l - t)^{j-i} Theta_ni(t - rho l)

equal delta_{j0} for every j < kappa.  The defect of each degree is
measured on a grid spanning one period plus margins (the defect is
rho-periodic in t), and the verdict is cross-checked by applying the
W = 1 sampling operator to monomials.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import ceil, comb, factorial, floor

import numpy as np

from .kernels import reconstruct

__all__ = ["MomentReport", "moment_defect", "reproduction_order"]


@dataclass(frozen=True)
class MomentReport:
    """Reproduction order kappa plus per-degree defects.

    defects[j] is the moment defect of degree j; cross_defects[j] is the
    relative error of the W = 1 operator applied to t^j, probed for j up
    to kappa (inclusive where available).
    """

    kappa: int
    defects: tuple
    cross_defects: tuple
    tol: float

    def __str__(self):
        lines = [f"reproduction order kappa = {self.kappa} (tol {self.tol:g})",
                 "degree  defect        monomial check"]
        for j, d in enumerate(self.defects):
            cross = (f"{self.cross_defects[j]:.3e}"
                     if j < len(self.cross_defects) else "-")
            lines.append(f"{j:6d}  {d:.6e}  {cross}")
        return "\n".join(lines)


def _kernel_extended(ks, n: int, i: int, tau: np.ndarray) -> np.ndarray:
    """Kernel values from the term table, carried in tau's (long) dtype."""
    shifts, coefs = ks.term_table(n, i)
    if len(shifts) == 0:
        return np.zeros_like(tau)
    args = tau[None, :] - np.asarray(shifts, dtype=tau.dtype)[:, None]
    vals = ks.gen.eval(args.ravel()).reshape(len(shifts), -1)
    return np.asarray(coefs, dtype=tau.dtype) @ vals


def moment_defect(ks, j: int, t_grid) -> float:
    """Max over t_grid of |moment sum of degree j minus delta_{j0}|.

    Accumulated in extended precision: modified kernels carry weights in
    the thousands, and the cancellation down to ~1e-9 defects is below
    the float64 noise floor of the naive sum.
    """
    if j < 0:
        raise ValueError("degree must be >= 0")
    ts = np.sort(np.asarray(t_grid, dtype=float).ravel())
    if ts.size == 0:
        raise ValueError("t_grid must be nonempty")
    scheme = ks.scheme
    rho = scheme.rho
    lo, hi = ks.support
    work = np.longdouble
    tsl = ts.astype(work)
    acc = np.zeros(ts.shape, dtype=work)
    for l in range(ceil((ts[0] - hi) / rho), floor((ts[-1] - lo) / rho) + 1):
        a = np.searchsorted(ts, lo + rho * l, side="right")
        b = np.searchsorted(ts, hi + rho * l, side="left")
        if a >= b:
            continue
        tau = tsl[a:b] - work(rho) * l
        for n, x in enumerate(scheme.offsets):
            diff = work(x) - tau
            for i in range(min(j, scheme.r - 1) + 1):
                kern = _kernel_extended(ks, n, i, tau)
                acc[a:b] += (comb(j, i) * factorial(i)) * diff ** (j - i) * kern
    return float(np.abs(acc - (1.0 if j == 0 else 0.0)).max())


def _monomial_cross_check(ks, degree: int) -> float:
    """Relative error of the W = 1 operator applied to t^degree."""
    scheme = ks.scheme
    rho = scheme.rho
    lo, hi = ks.support
    ts = np.linspace(0.0, rho, 65)
    samples = {}
    for l in range(ceil((0.0 - hi) / rho) - 1, floor((rho - lo) / rho) + 2):
        for n, x in enumerate(scheme.offsets):
            point = x + rho * l
            for i in range(scheme.r):
                if i > degree:
                    samples[n, i, l] = 0.0
                else:
                    samples[n, i, l] = (factorial(degree) / factorial(degree - i)
                                        * point ** (degree - i))
    approx = reconstruct(ks, samples, ts)
    exact = ts ** degree
    scale = max(1.0, float(np.abs(exact).max()))
    return float(np.abs(approx - exact).max()) / scale


def reproduction_order(ks, tol: float = 1e-8, probe_max: int = 8) -> MomentReport:
    """Largest kappa with moment defects <= tol for every degree < kappa.

    Probes degrees 0..probe_max; a clean sweep reports kappa = probe_max+1.
    The independent monomial check (reproducing t^j through the sampling
    operator itself) is reported alongside and a disagreement warns.
    """
    if probe_max < 1:
        raise ValueError("probe_max must be >= 1")
    lo, hi = ks.support
    width = hi - lo
    rho = ks.scheme.rho
    grid = np.linspace(-width, rho + width, 257)
    defects = tuple(moment_defect(ks, j, grid) for j in range(probe_max + 1))
    kappa = probe_max + 1
    for j, d in enumerate(defects):
        if d > tol:
            kappa = j
            break
    cross = tuple(_monomial_cross_check(ks, j)
                  for j in range(min(kappa, probe_max) + 1))
    for j in range(kappa):
        if j < len(cross) and cross[j] > max(100.0 * tol, 1e-6):
            warnings.warn(
                f"degree {j}: moment defect {defects[j]:.2e} passes but the "
                f"monomial check gives {cross[j]:.2e}", RuntimeWarning,
                stacklevel=2)
    return MomentReport(kappa=kappa, defects=defects, cross_defects=cross,
                        tol=float(tol))
