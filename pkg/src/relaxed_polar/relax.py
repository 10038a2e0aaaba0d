"""Relaxed polar factors: the energy-minimizing Cosserat rotations.

For weights in the non-classical range mu > mu_c >= 0, the minimizer of the
shear-stretch energy bifurcates: below the singular radius
rho = 2 mu/(mu - mu_c) (i.e. sigma_1 + sigma_2 <= rho) the polar factor
stays optimal, beyond it the two minimizers tilt the polar factor by
+/- arccos(rho / (sigma_1 + sigma_2)) about the eigenvector of the smallest
singular value. For mu_c >= mu the polar factor is always the unique
minimizer (generalized Grioli theorem) and no rescaling exists.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .energy import MaterialParams, el_residual_matrix
from .errors import ClassicalRegime, NotUnimodular
from .rotcore import (
    as_mat3,
    det3,
    require_rotation,
    rotation_from_axis_angle,
    svd_ordered,
)

BOUNDARY_REL_TOL = 1e-12
STATIONARITY_TOL = 1e-10


class DomainTag(enum.Enum):
    CLASSICAL = "classical"
    NON_CLASSICAL = "non-classical"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class RelaxedRotations:
    """Minimizer pair of the shear-stretch energy for one (F, params).

    On the classical domain (and its boundary) both rotations equal the
    polar factor and beta_hat = 0; otherwise r_plus is labeled so that
    Rp^T r_plus rotates by +beta_hat about the axis (the q3 eigenvector).
    degenerate_axis flags sigma_2 ~ sigma_3, where q3 is not unique.
    """

    r_plus: np.ndarray
    r_minus: np.ndarray
    beta_hat: float
    axis: np.ndarray
    domain_tag: DomainTag
    reduced_energy: float
    coincide: bool
    degenerate_axis: bool

    @property
    def rotations(self) -> tuple[np.ndarray, np.ndarray]:
        return self.r_plus, self.r_minus


def mmp_stretch(F) -> float:
    """Maximal mean planar stretch (sigma_1 + sigma_2) / 2."""
    sig = svd_ordered(F).sigma
    return 0.5 * (sig[0] + sig[1])


def mmp_strain(F) -> float:
    """Maximal mean planar strain: mmp_stretch - 1."""
    return mmp_stretch(F) - 1.0


def _classify_s12(s12: float, p: MaterialParams) -> DomainTag:
    if p.classical:
        return DomainTag.CLASSICAL
    rho = p.rho
    if abs(s12 - rho) <= BOUNDARY_REL_TOL * max(s12, rho):
        return DomainTag.BOUNDARY
    return DomainTag.CLASSICAL if s12 < rho else DomainTag.NON_CLASSICAL


def classify_domain_sigma(sigma, p: MaterialParams) -> DomainTag:
    """Domain tag from a singular-value triple (any order)."""
    s = np.sort(np.asarray(sigma, dtype=float))[::-1]
    return _classify_s12(float(s[0] + s[1]), p)


def classify_domain(F, p: MaterialParams) -> DomainTag:
    """Compare sigma_1 + sigma_2 against the singular radius rho; mu_c >= mu
    (rho infinite) is always classical."""
    sig = svd_ordered(F).sigma
    return _classify_s12(sig[0] + sig[1], p)


def optimal_relative_angle(F, p: MaterialParams) -> float:
    """Magnitude of the optimal relative rotation angle: 0 on the classical
    domain, arccos(rho / s12) beyond it; increases monotonically in s12 with
    supremum pi/2 (the separation 2 beta of the minimizer pair tends to pi)."""
    sig = svd_ordered(F).sigma
    return _angle_from_s12(sig[0] + sig[1], p)


def optimal_relative_angle_sigma(sigma, p: MaterialParams) -> float:
    """Same as optimal_relative_angle, from a singular-value triple."""
    s = np.sort(np.asarray(sigma, dtype=float))[::-1]
    return _angle_from_s12(float(s[0] + s[1]), p)


def _angle_from_s12(s12: float, p: MaterialParams) -> float:
    if _classify_s12(s12, p) is not DomainTag.NON_CLASSICAL:
        return 0.0
    return math.acos(min(p.rho / s12, 1.0))


def reduced_energy_sigma(sigma, p: MaterialParams) -> float:
    """Reduced energy as a function of singular values (any order; sorted
    internally, degenerate triples allowed).

    Classical piece: mu sum (sigma_i - 1)^2. Non-classical piece:
    (mu/2) d12^2 + mu (sigma_3 - 1)^2 + (mu_c/2) s12^2 - mu_c rho, the
    direct evaluation of the energy at the optimal rotations; continuous
    across s12 = rho.
    """
    s = np.sort(np.asarray(sigma, dtype=float))[::-1]
    s1, s2, s3 = (float(v) for v in s)
    if _classify_s12(s1 + s2, p) is not DomainTag.NON_CLASSICAL:
        return p.mu * ((s1 - 1.0) ** 2 + (s2 - 1.0) ** 2 + (s3 - 1.0) ** 2)
    s12 = s1 + s2
    return (
        0.5 * p.mu * (s1 - s2) ** 2
        + p.mu * (s3 - 1.0) ** 2
        + 0.5 * p.muc * s12 * s12
        - p.muc * p.rho
    )


def reduced_energy(F, p: MaterialParams) -> float:
    """Minimum of the shear-stretch energy over all rotations."""
    return reduced_energy_sigma(svd_ordered(F).sigma, p)


def relaxed_polar(F, p: MaterialParams) -> RelaxedRotations:
    """Energy-minimizing rotation pair for F under weights p.

    Classical/boundary inputs return the polar factor twice. Non-classical
    inputs return Rp Q Rz(+-beta_hat) Q^T with beta_hat = arccos(rho/s12),
    labeled so r_plus has positive relative angle about q3. Stationarity of
    both rotations is asserted against the matrix Euler-Lagrange residual
    before returning.
    """
    dec = svd_ordered(F)
    sig = dec.sigma
    s12 = sig[0] + sig[1]
    tag = _classify_s12(s12, p)
    beta = _angle_from_s12(s12, p)
    axis = dec.q3

    if tag is DomainTag.NON_CLASSICAL:
        q = dec.Q
        r_plus = dec.Rp @ q @ rotation_from_axis_angle(beta, (0.0, 0.0, 1.0)) @ q.T
        r_minus = dec.Rp @ q @ rotation_from_axis_angle(-beta, (0.0, 0.0, 1.0)) @ q.T
    else:
        r_plus = r_minus = dec.Rp

    for r in (r_plus, r_minus):
        resid = el_residual_matrix(r, dec.F, p)
        if resid >= STATIONARITY_TOL:
            raise RuntimeError(f"stationarity check failed: EL residual {resid}")

    return RelaxedRotations(
        r_plus=r_plus,
        r_minus=r_minus,
        beta_hat=beta,
        axis=axis,
        domain_tag=tag,
        reduced_energy=reduced_energy_sigma(sig, p),
        coincide=tag is not DomainTag.NON_CLASSICAL,
        degenerate_axis=dec.degenerate[1],
    )


def tangent_bundle_distance(F, R) -> tuple[np.ndarray, float]:
    """Exact inner minimization of ||F - R(1 + A)||^2 over skew A.

    Returns (A_star, dist2) with A_star = skew(R^T F) and
    dist2 = ||sym(R^T F - 1)||^2; minimizing dist2 over rotations recovers
    the reduced energy at weights (1, 0).
    """
    r = require_rotation(R)
    f = as_mat3(F)
    ubar = r.T @ f
    a_star = 0.5 * (ubar - ubar.T)
    sym = 0.5 * (ubar + ubar.T) - np.eye(3)
    return a_star, float(np.sum(sym * sym))


def classical_neighborhood_radius(p: MaterialParams) -> float:
    """Radius zeta^2/2 of the euclidean SO(3)-neighborhood contained in the
    classical domain; requires 0 < mu_c < mu."""
    if p.classical:
        raise ClassicalRegime("neighborhood radius needs the non-classical range mu > mu_c")
    if p.muc == 0.0:
        raise ValueError("neighborhood collapses for mu_c = 0; require mu_c > 0")
    return 0.5 * p.zeta * p.zeta


def sl3_nonclassical_check(F) -> bool:
    """True iff the unimodular F is (at least boundary) non-classical at
    weights (mu, 0); holds for all of SL(3), strictly for distinct sigma."""
    f = as_mat3(F)
    d = det3(f)
    if abs(d - 1.0) >= 1e-9:
        raise NotUnimodular(f"det(F) = {d} != 1")
    return classify_domain(f, MaterialParams(1.0, 0.0)) is not DomainTag.CLASSICAL


def d_epsilon_witness(p: MaterialParams, eps: float) -> np.ndarray:
    """Unimodular diagonal witness diag(rho - 1 + eps, 1, 1/(rho - 1 + eps))
    with s12 = rho + eps: strictly non-classical for every eps > 0."""
    if p.classical:
        raise ClassicalRegime("witness construction needs finite rho")
    if not eps > 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    a = p.rho - 1.0 + eps
    return np.diag([a, 1.0, 1.0 / a])
