"""Catalog of critical points of the constrained (1, 0) lifted energy.

Sixteen critical branches modulo the antipodal identification, in three
families distinguished by which quaternion coefficients vanish:

  I   unit coordinate quaternions (always defined),
  II  w paired with one vector coefficient; depends on pairwise sums s_ij,
  III two vector coefficients; depends on pairwise differences d_ij.

Families II and III use the coefficient functions c_A(t) = sqrt(1/2 + 1/t)
and c_B(t) = sqrt(1/2 - 1/t); c_B is real only for t >= 2, which carves out
each branch's domain of definition.

The multipliers and energy levels are pinned by solving the Euler-Lagrange
system at each catalog quaternion; the test suite cross-checks every closed
form against the system and against direct evaluation to machine precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .energy import (
    MaterialParams,
    el_residual_quat,
    lifted_energy,
    lifted_energy_hessian,
)
from .errors import NonDistinctSigma, NonPositiveSigma, UndefinedBranch
from .rotcore import EPS_GAP

_LIMIT_CASE = MaterialParams(1.0, 0.0)
HESSIAN_EIG_TOL = 1e-6


class Classification(enum.Enum):
    LOCAL_MIN = "local-min"
    LOCAL_MAX = "local-max"
    SADDLE = "saddle"
    DEGENERATE = "degenerate"


def _c_a(t: float) -> float:
    return math.sqrt(0.5 + 1.0 / t)


def _c_b(t: float) -> float:
    # t >= 2 required; clamp the 1-ulp negative radicand at t == 2 exactly
    return math.sqrt(max(0.5 - 1.0 / t, 0.0))


def _shorthands(sigma) -> tuple[float, ...]:
    s1, s2, s3 = (float(v) for v in sigma)
    return s1, s2, s3, s1 + s2, s2 + s3, s3 + s1, s1 - s2, s2 - s3, s3 - s1


# One catalog entry per branch id: definedness parameter t (None = global),
# quaternion, multiplier, closed-form energy -- each as a function of sigma.
def _catalog():
    def entry(family, index, sign, condition, t_of, quat_of, lam_of, energy_of):
        return {
            "family": family,
            "index": index,
            "sign": sign,
            "condition": condition,
            "t": t_of,
            "quat": quat_of,
            "lam": lam_of,
            "energy": energy_of,
        }

    cat = {}
    unit = {1: (1, 0, 0, 0), 2: (0, 1, 0, 0), 3: (0, 0, 1, 0), 4: (0, 0, 0, 1)}
    energies_i = {
        1: lambda s1, s2, s3: (s1 - 1) ** 2 + (s2 - 1) ** 2 + (s3 - 1) ** 2,
        2: lambda s1, s2, s3: (s1 - 1) ** 2 + (s2 + 1) ** 2 + (s3 + 1) ** 2,
        3: lambda s1, s2, s3: (s1 + 1) ** 2 + (s2 - 1) ** 2 + (s3 + 1) ** 2,
        4: lambda s1, s2, s3: (s1 + 1) ** 2 + (s2 + 1) ** 2 + (s3 - 1) ** 2,
    }
    # lambda_{I,k} = 4(sigma_i^2 + sigma_j^2 + s_ij) over the axis pair left
    # untouched by the k-th half-turn (I.1 is the identity, multiplier 0)
    lams_i = {
        1: lambda s1, s2, s3: 0.0,
        2: lambda s1, s2, s3: 4.0 * (s2 * s2 + s3 * s3 + s2 + s3),
        3: lambda s1, s2, s3: 4.0 * (s3 * s3 + s1 * s1 + s3 + s1),
        4: lambda s1, s2, s3: 4.0 * (s1 * s1 + s2 * s2 + s1 + s2),
    }
    for k in range(1, 5):
        cat[f"I.{k}"] = entry(
            "I",
            k,
            0,
            "always",
            lambda sigma: None,
            lambda sigma, k=k: np.array(unit[k], dtype=float),
            lambda sigma, k=k: lams_i[k](*(float(v) for v in sigma)),
            lambda sigma, k=k: energies_i[k](*(float(v) for v in sigma)),
        )

    # family II: q = (c_A(s_ij), ..., +/- c_B(s_ij)) with the vector slot per pair
    ii_data = {
        1: ("s12 >= 2", lambda sh: sh[3], 3, lambda sh: 0.5 * sh[6] ** 2 + (sh[2] - 1) ** 2),
        2: ("s23 >= 2", lambda sh: sh[4], 1, lambda sh: 0.5 * sh[7] ** 2 + (sh[0] - 1) ** 2),
        3: ("s31 >= 2", lambda sh: sh[5], 2, lambda sh: 0.5 * sh[8] ** 2 + (sh[1] - 1) ** 2),
    }
    d_for_ii = {1: 6, 2: 7, 3: 8}  # index of the matching d_ij in _shorthands
    for k, (cond, t_of, slot, energy_of) in ii_data.items():

        def quat_of(sigma, sign, t_of=t_of, slot=slot):
            t = t_of(_shorthands(sigma))
            q = np.zeros(4)
            q[0] = _c_a(t)
            q[slot] = sign * _c_b(t)
            return q

        def lam_of(sigma, t_of=t_of, kd=d_for_ii[k]):
            sh = _shorthands(sigma)
            t, d = t_of(sh), sh[kd]
            return d * d * (t - 2.0) / t

        for sign, tag in ((+1, "+"), (-1, "-")):
            cat[f"II.{k}{tag}"] = entry(
                "II",
                k,
                sign,
                cond,
                lambda sigma, t_of=t_of: t_of(_shorthands(sigma)),
                lambda sigma, sign=sign, quat_of=quat_of: quat_of(sigma, sign),
                lam_of,
                lambda sigma, energy_of=energy_of: energy_of(_shorthands(sigma)),
            )

    # family III: w = 0, two vector coefficients; t is a pairwise difference
    iii_data = {
        # (condition, t, (c_A slot, c_B slot), energy, multiplier)
        1: (
            "d12 >= 2",
            lambda sh: sh[6],
            (1, 2),
            lambda sh: 0.5 * sh[3] ** 2 + (sh[2] + 1) ** 2,
            lambda sh: 4.0 * sh[2] * (1.0 + sh[2]) + (sh[3] - 2.0) * sh[3],
        ),
        2: (
            "d23 >= 2",
            lambda sh: sh[7],
            (2, 3),
            lambda sh: 0.5 * sh[4] ** 2 + (sh[0] + 1) ** 2,
            lambda sh: 4.0 * sh[0] * (1.0 + sh[0]) + (sh[4] - 2.0) * sh[4],
        ),
        3: (
            "sigma1 - sigma3 >= 2",
            lambda sh: -sh[8],
            (1, 3),
            lambda sh: 0.5 * sh[5] ** 2 + (sh[1] + 1) ** 2,
            lambda sh: 4.0 * sh[1] * (1.0 + sh[1]) + (sh[5] - 2.0) * sh[5],
        ),
    }
    for k, (cond, t_of, (sa, sb), energy_of, lam_of) in iii_data.items():

        def quat_of(sigma, sign, t_of=t_of, sa=sa, sb=sb):
            t = t_of(_shorthands(sigma))
            q = np.zeros(4)
            q[sa] = _c_a(t)
            q[sb] = sign * _c_b(t)
            return q

        for sign, tag in ((+1, "+"), (-1, "-")):
            cat[f"III.{k}{tag}"] = entry(
                "III",
                k,
                sign,
                cond,
                lambda sigma, t_of=t_of: t_of(_shorthands(sigma)),
                lambda sigma, sign=sign, quat_of=quat_of: quat_of(sigma, sign),
                lambda sigma, lam_of=lam_of: lam_of(_shorthands(sigma)),
                lambda sigma, energy_of=energy_of: energy_of(_shorthands(sigma)),
            )
    return cat


_CATALOG = _catalog()
BRANCH_IDS = tuple(_CATALOG.keys())


@dataclass(frozen=True)
class CriticalBranch:
    """One catalog critical point evaluated at a singular-value triple."""

    branch_id: str
    family: str
    index: int
    sign: int  # +1 / -1, or 0 for family I
    defined: bool
    domain_condition: str
    quaternion: np.ndarray | None
    multiplier: float | None
    closed_form_energy: float | None


def _is_defined(branch_id: str, sigma) -> bool:
    t = _CATALOG[branch_id]["t"](sigma)
    return t is None or t >= 2.0


def _build(branch_id: str, sigma) -> CriticalBranch:
    e = _CATALOG[branch_id]
    defined = _is_defined(branch_id, sigma)
    return CriticalBranch(
        branch_id=branch_id,
        family=e["family"],
        index=e["index"],
        sign=e["sign"],
        defined=defined,
        domain_condition=e["condition"],
        quaternion=e["quat"](sigma) if defined else None,
        multiplier=float(e["lam"](sigma)) if defined else None,
        closed_form_energy=float(e["energy"](sigma)) if defined else None,
    )


def _check_ordering(sigma, allow_degenerate: bool):
    s = np.asarray(sigma, dtype=float)
    if s.shape != (3,):
        raise ValueError(f"expected a singular-value triple, got shape {s.shape}")
    if not np.all(s > 0.0):
        raise NonPositiveSigma(f"singular values must be positive, got {tuple(s)}")
    eps = EPS_GAP * float(s[0])
    if not allow_degenerate and (s[0] - s[1] < eps or s[1] - s[2] < eps):
        raise NonDistinctSigma(
            f"sigma must be strictly descending (relative gap >= {EPS_GAP}), got {tuple(s)}"
        )
    return s


def enumerate_branches(sigma, allow_degenerate: bool = False) -> list[CriticalBranch]:
    """All 16 critical branches at sigma (descending, strictly ordered unless
    allow_degenerate); undefined branches carry defined=False and no values."""
    s = _check_ordering(sigma, allow_degenerate)
    return [_build(bid, s) for bid in BRANCH_IDS]


def branch_energy(b: CriticalBranch, sigma) -> float:
    """Closed-form energy level of branch b at sigma."""
    if not _is_defined(b.branch_id, sigma):
        raise UndefinedBranch(f"{b.branch_id} is not real-valued at {tuple(sigma)}")
    return float(_CATALOG[b.branch_id]["energy"](sigma))


def branch_multiplier(b: CriticalBranch, sigma) -> float:
    """Closed-form Lagrange multiplier of branch b at sigma."""
    if not _is_defined(b.branch_id, sigma):
        raise UndefinedBranch(f"{b.branch_id} is not real-valued at {tuple(sigma)}")
    return float(_CATALOG[b.branch_id]["lam"](sigma))


def branch_quaternion(b: CriticalBranch, sigma) -> np.ndarray:
    """Catalog quaternion of branch b at sigma."""
    if not _is_defined(b.branch_id, sigma):
        raise UndefinedBranch(f"{b.branch_id} is not real-valued at {tuple(sigma)}")
    return _CATALOG[b.branch_id]["quat"](sigma)


def verify_branch(b: CriticalBranch, sigma) -> float:
    """Max-norm of the Euler-Lagrange residual at (quaternion, multiplier);
    below 1e-9 for every defined branch."""
    q = branch_quaternion(b, sigma)
    lam = branch_multiplier(b, sigma)
    return float(np.max(np.abs(el_residual_quat(q, lam, sigma))))


def classify_branch(b: CriticalBranch, sigma, eig_tol: float = HESSIAN_EIG_TOL) -> Classification:
    """Second-order classification via the Hessian of the Lagrangian
    projected onto the tangent space of the unit sphere at q.

    Eigenvalues of T^T (H_q W - 2 lambda I) T over an orthonormal tangent
    basis T: all above eig_tol is a local minimum, all below -eig_tol a local
    maximum, any within the band is degenerate, otherwise a saddle.
    """
    _check_ordering(sigma, allow_degenerate=False)
    q = branch_quaternion(b, sigma)
    lam = branch_multiplier(b, sigma)
    h = lifted_energy_hessian(q, sigma) - 2.0 * lam * np.eye(4)

    cols = [q] + [e for i, e in enumerate(np.eye(4)) if i != int(np.argmax(np.abs(q)))]
    basis, _ = np.linalg.qr(np.column_stack(cols))
    tangent = basis[:, 1:]
    eigs = np.linalg.eigvalsh(tangent.T @ h @ tangent)

    if np.any(np.abs(eigs) <= eig_tol):
        return Classification.DEGENERATE
    if np.all(eigs > eig_tol):
        return Classification.LOCAL_MIN
    if np.all(eigs < -eig_tol):
        return Classification.LOCAL_MAX
    return Classification.SADDLE


def minimal_branch(sigma) -> list[CriticalBranch]:
    """Energy-minimizing branch selection: {I.1} for s12 < 2, {II.1+-} for
    s12 > 2, and all three exactly at s12 = 2 (where they coincide).

    Exhaustively asserts that no other defined branch realizes a strictly
    smaller closed-form energy.
    """
    s = _check_ordering(sigma, allow_degenerate=False)
    s12 = float(s[0] + s[1])
    if s12 < 2.0:
        selected = ["I.1"]
    elif s12 > 2.0:
        selected = ["II.1+", "II.1-"]
    else:
        selected = ["I.1", "II.1+", "II.1-"]
    picked = [_build(bid, s) for bid in selected]
    w_min = picked[0].closed_form_energy

    for bid in BRANCH_IDS:
        if bid in selected or not _is_defined(bid, s):
            continue
        w = float(_CATALOG[bid]["energy"](s))
        if w < w_min - 1e-12 * max(1.0, abs(w_min)):
            raise RuntimeError(
                f"catalog inconsistency: {bid} realizes {w} < {w_min} at {tuple(s)}"
            )
    return picked


def minimal_energy(sigma) -> float:
    """Closed-form minimum of the (1, 0) relative energy over the catalog."""
    return minimal_branch(sigma)[0].closed_form_energy


def direct_energy(b: CriticalBranch, sigma) -> float:
    """Independent route: lifted energy evaluated at the branch quaternion."""
    return lifted_energy(branch_quaternion(b, sigma), sigma, _LIMIT_CASE)
