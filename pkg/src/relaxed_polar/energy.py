"""Cosserat shear-stretch energy functionals and weight handling.

The weighted energy of a rotation R against a deformation gradient F is

    W(R; F) = mu ||sym(R^T F - 1)||_F^2 + mu_c ||skew(R^T F - 1)||_F^2 ,

with mu > 0 and Cosserat couple modulus mu_c >= 0. The weight pair reduces
to one of two limit cases: mu_c >= mu behaves classically (the polar factor
is the unique minimizer), while mu > mu_c rescales onto the limit case
(1, 0) via the induced scaling parameter mu/(mu - mu_c).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClassicalRegime, NonInvertible, NonPositiveSigma
from .rotcore import as_mat3, det3, quat_to_rotation, require_rotation


class Regime(enum.Enum):
    CLASSICAL = "classical"  # mu_c >= mu
    NON_CLASSICAL_ZERO = "non-classical-zero"  # mu_c = 0
    NON_CLASSICAL = "non-classical"  # 0 < mu_c < mu


@dataclass(frozen=True)
class MaterialParams:
    """Weight pair (mu, mu_c) with derived scaling quantities.

    lambda_scale = mu/(mu - mu_c) and rho = 2 mu/(mu - mu_c) are the induced
    scaling parameter and singular radius; both are math.inf in the classical
    regime mu_c >= mu, where no finite rescaling exists. zeta = rho - 2.
    """

    mu: float
    muc: float
    regime: Regime = field(init=False)
    lambda_scale: float = field(init=False)
    rho: float = field(init=False)
    zeta: float = field(init=False)

    def __post_init__(self):
        if not (self.mu > 0.0):
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.muc < 0.0:
            raise ValueError(f"mu_c must be non-negative, got {self.muc}")
        if self.muc >= self.mu:
            regime = Regime.CLASSICAL
            lam = rho = zeta = math.inf
        else:
            regime = Regime.NON_CLASSICAL_ZERO if self.muc == 0.0 else Regime.NON_CLASSICAL
            lam = self.mu / (self.mu - self.muc)
            rho = 2.0 * lam
            zeta = 2.0 * self.muc / (self.mu - self.muc)
        object.__setattr__(self, "regime", regime)
        object.__setattr__(self, "lambda_scale", lam)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "zeta", zeta)

    @property
    def classical(self) -> bool:
        return self.regime is Regime.CLASSICAL


def _sym_skew_sq(m: np.ndarray) -> tuple[float, float]:
    sym = 0.5 * (m + m.T)
    skew = 0.5 * (m - m.T)
    return float(np.sum(sym * sym)), float(np.sum(skew * skew))


def energy(R, F, p: MaterialParams) -> float:
    """W(R; F) = mu ||sym(R^T F - 1)||^2 + mu_c ||skew(R^T F - 1)||^2."""
    r = require_rotation(R)
    f = as_mat3(F)
    s2, k2 = _sym_skew_sq(r.T @ f - np.eye(3))
    return p.mu * s2 + p.muc * k2


def _check_sigma(sigma) -> np.ndarray:
    s = np.asarray(sigma, dtype=float)
    if s.shape != (3,):
        raise ValueError(f"expected a singular-value triple, got shape {s.shape}")
    if not np.all(s > 0.0):
        raise NonPositiveSigma(f"singular values must be positive, got {tuple(s)}")
    return s


def relative_energy(Rhat, sigma, p: MaterialParams) -> float:
    """Energy of a relative rotation against D = diag(sigma):
    mu ||sym(Rhat D - 1)||^2 + mu_c ||skew(Rhat D - 1)||^2."""
    r = require_rotation(Rhat)
    s = _check_sigma(sigma)
    s2, k2 = _sym_skew_sq(r * s[np.newaxis, :] - np.eye(3))
    return p.mu * s2 + p.muc * k2


def lifted_energy(q, sigma, p: MaterialParams) -> float:
    """Ambient extension of the lifted energy: the covering-map polynomial is
    evaluated at q without normalization, so for |q| = 1 this equals
    relative_energy of the projected rotation while for |q| != 1 it is the
    formal polynomial extension (no energy interpretation)."""
    s = _check_sigma(sigma)
    m = quat_to_rotation(q) * s[np.newaxis, :] - np.eye(3)
    s2, k2 = _sym_skew_sq(m)
    return p.mu * s2 + p.muc * k2


def rescale_F(F, p: MaterialParams) -> np.ndarray:
    """Rescaled deformation gradient F / lambda_scale, reducing non-classical
    weights to the limit case (1, 0). Undefined for mu_c >= mu."""
    if p.classical:
        raise ClassicalRegime("no finite rescaling for mu_c >= mu; use the polar factor")
    return as_mat3(F) / p.lambda_scale


def isochoric_project(F) -> np.ndarray:
    """Projection onto SL(3): F / det(F)^(1/3)."""
    f = as_mat3(F)
    d = det3(f)
    if d <= 0.0:
        raise NonInvertible(f"det(F) = {d} <= 0")
    return f / d ** (1.0 / 3.0)


def el_residual_matrix(R, F, p: MaterialParams) -> float:
    """Stationarity defect ||skew((mu - mu_c) Ubar^2 - 2 mu Ubar)||_F with
    Ubar = R^T F; zero exactly at critical rotations, in particular at the
    polar factor (which symmetrizes Ubar)."""
    r = require_rotation(R)
    f = as_mat3(F)
    ubar = r.T @ f
    m = (p.mu - p.muc) * (ubar @ ubar) - 2.0 * p.mu * ubar
    skew = 0.5 * (m - m.T)
    return float(np.linalg.norm(skew))


def el_residual_quat(q, lam: float, sigma) -> np.ndarray:
    """Left-hand sides of the five Euler-Lagrange polynomials in quaternion
    coordinates for the limit case (1, 0); all five vanish at a critical
    tuple (q, lambda) for the given singular values."""
    w, x, y, z = (float(c) for c in np.asarray(q, dtype=float))
    s1, s2, s3 = (float(c) for c in np.asarray(sigma, dtype=float))
    lam = float(lam)
    s12, s23, s31 = s1 + s2, s2 + s3, s3 + s1
    d12, d23, d31 = s1 - s2, s2 - s3, s3 - s1
    w2, x2, y2, z2 = w * w, x * x, y * y, z * z
    return np.array(
        [
            w * (d23**2 * x2 + d31**2 * y2 + d12**2 * z2 - lam / 2.0),
            x
            * (
                d23**2 * w2
                + 4.0 * (s2 * s2 + s3 * s3) * x2
                + (4.0 * s3 * s3 + s12**2) * y2
                + (4.0 * s2 * s2 + s31**2) * z2
                - (d23**2 + (s23 - 2.0) * s23)
                - lam / 2.0
            ),
            y
            * (
                d31**2 * w2
                + 4.0 * (s3 * s3 + s1 * s1) * y2
                + (4.0 * s1 * s1 + s23**2) * z2
                + (4.0 * s3 * s3 + s12**2) * x2
                - (d31**2 + (s31 - 2.0) * s31)
                - lam / 2.0
            ),
            z
            * (
                d12**2 * w2
                + 4.0 * (s1 * s1 + s2 * s2) * z2
                + (4.0 * s2 * s2 + s31**2) * x2
                + (4.0 * s1 * s1 + s23**2) * y2
                - (d12**2 + (s12 - 2.0) * s12)
                - lam / 2.0
            ),
            w2 + x2 + y2 + z2 - 1.0,
        ]
    )


def lifted_energy_gradient(q, sigma) -> np.ndarray:
    """Gradient of the (1, 0) lifted energy in ambient quaternion coordinates.

    Equals 4x the bracketed Euler-Lagrange polynomials at lambda = 0; exposed
    for the Hessian-based second-order classification.
    """
    res = el_residual_quat(q, 0.0, sigma)
    return 4.0 * res[:4]


def lifted_energy_hessian(q, sigma) -> np.ndarray:
    """Exact 4x4 Hessian of the quartic (1, 0) lifted energy at q.

    Assembled from W = sum_k (sigma_k A_k - 1)^2 + 2 sum_m B_m^2 with the
    quadratics A_k (diagonal terms of pi(q) D) and B_m (off-diagonal terms).
    """
    w, x, y, z = (float(c) for c in np.asarray(q, dtype=float))
    s1, s2, s3 = (float(c) for c in np.asarray(sigma, dtype=float))
    s12, s23, s31 = s1 + s2, s2 + s3, s3 + s1
    d12, d23, d31 = s1 - s2, s2 - s3, s3 - s1

    a_vals = (1.0 - 2.0 * (y * y + z * z), 1.0 - 2.0 * (x * x + z * z), 1.0 - 2.0 * (x * x + y * y))
    a_grads = (
        np.array([0.0, 0.0, -4.0 * y, -4.0 * z]),
        np.array([0.0, -4.0 * x, 0.0, -4.0 * z]),
        np.array([0.0, -4.0 * x, -4.0 * y, 0.0]),
    )
    a_hess = (
        np.diag([0.0, 0.0, -4.0, -4.0]),
        np.diag([0.0, -4.0, 0.0, -4.0]),
        np.diag([0.0, -4.0, -4.0, 0.0]),
    )

    b_vals = (s12 * x * y + d12 * w * z, s31 * x * z + d31 * w * y, s23 * y * z + d23 * w * x)
    b_grads = (
        np.array([d12 * z, s12 * y, s12 * x, d12 * w]),
        np.array([d31 * y, s31 * z, d31 * w, s31 * x]),
        np.array([d23 * x, d23 * w, s23 * z, s23 * y]),
    )
    b_hess = []
    for (i, j), coeff_s, (k, l), coeff_d in (
        ((1, 2), s12, (0, 3), d12),
        ((1, 3), s31, (0, 2), d31),
        ((2, 3), s23, (0, 1), d23),
    ):
        h = np.zeros((4, 4))
        h[i, j] = h[j, i] = coeff_s
        h[k, l] = h[l, k] = coeff_d
        b_hess.append(h)

    hess = np.zeros((4, 4))
    for sk, ak, ga, ha in zip((s1, s2, s3), a_vals, a_grads, a_hess):
        hess += 2.0 * sk * sk * np.outer(ga, ga) + 2.0 * sk * (sk * ak - 1.0) * ha
    for bm, gb, hb in zip(b_vals, b_grads, b_hess):
        hess += 4.0 * np.outer(gb, gb) + 4.0 * bm * hb
    return hess
