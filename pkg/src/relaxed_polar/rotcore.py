"""Fixed-size 3x3 linear algebra for rotation optimization.

Everything here operates on plain float64 numpy arrays: matrices are (3, 3)
row-major, quaternions are (4,) arrays in (w, x, y, z) order representing
q = w + ix + jy + kz. All functions are pure; returned arrays are freshly
allocated and never alias their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NegativeDeterminant,
    NonInvertible,
    NotARotation,
    ZeroQuaternion,
)

EPS_DET = 1e-12
EPS_ORTH = 1e-9
EPS_GAP = 1e-8  # relative to sigma_1; below this a singular-value pair counts as degenerate

IDENTITY = np.eye(3)

# The Klein-four symmetry group {1, diag(1,-1,-1), diag(-1,1,-1), diag(-1,-1,1)}:
# sign flips of eigenvector pairs that leave a spectral decomposition valid.
SYMMETRY_GROUP = (
    np.diag([1.0, 1.0, 1.0]),
    np.diag([1.0, -1.0, -1.0]),
    np.diag([-1.0, 1.0, -1.0]),
    np.diag([-1.0, -1.0, 1.0]),
)


def as_mat3(m) -> np.ndarray:
    """Coerce to a (3, 3) float64 array, validating shape and finiteness."""
    a = np.asarray(m, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite coefficients")
    return a


def det3(m: np.ndarray) -> float:
    """Determinant by cofactor expansion (exact operation order, no LU)."""
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def is_invertible(m, eps: float = EPS_DET) -> bool:
    return abs(det3(as_mat3(m))) > eps


def is_proper(m) -> bool:
    return det3(as_mat3(m)) > 0.0


def is_orthogonal(m, eps: float = EPS_ORTH) -> bool:
    a = as_mat3(m)
    return float(np.linalg.norm(a.T @ a - IDENTITY)) < eps


def is_rotation(m, eps: float = EPS_ORTH) -> bool:
    a = as_mat3(m)
    return is_orthogonal(a, eps) and det3(a) > 0.0


def is_symmetric(m, eps: float = 1e-10) -> bool:
    a = as_mat3(m)
    return float(np.linalg.norm(a - a.T)) < eps


def is_skew(m, eps: float = 1e-10) -> bool:
    a = as_mat3(m)
    return float(np.linalg.norm(a + a.T)) < eps


def require_rotation(m, eps: float = EPS_ORTH) -> np.ndarray:
    a = as_mat3(m)
    if not is_rotation(a, eps):
        raise NotARotation("matrix is not proper orthogonal within tolerance")
    return a


# ---------------------------------------------------------------------------
# ordered SVD / polar decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Ordered SVD data of a proper F: F = Rp . Q diag(sigma) Q^T.

    sigma is descending, Q is proper orthogonal (det +1), Rp is the polar
    factor and U = Q diag(sigma) Q^T the right Biot stretch. The third
    column of Q is the eigenvector of the smallest singular value.
    """

    F: np.ndarray
    sigma: tuple[float, float, float]
    Q: np.ndarray
    Rp: np.ndarray
    U: np.ndarray
    gaps: tuple[float, float]
    degenerate: tuple[bool, bool]

    def s(self, i: int, j: int) -> float:
        """Pairwise sum s_ij = sigma_i + sigma_j (1-indexed)."""
        return self.sigma[i - 1] + self.sigma[j - 1]

    def d(self, i: int, j: int) -> float:
        """Pairwise difference d_ij = sigma_i - sigma_j (1-indexed)."""
        return self.sigma[i - 1] - self.sigma[j - 1]

    @property
    def q3(self) -> np.ndarray:
        """Eigenvector of the smallest singular value (rotation axis candidate)."""
        return self.Q[:, 2].copy()


def _jacobi_eigh3(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi iteration for a symmetric 3x3 matrix.

    Returns (eigenvalues, eigenvectors-as-columns), unsorted. Converges to an
    off-diagonal Frobenius norm below 1e-14 * ||A||_F within at most 30 sweeps;
    the operation order is fixed, so results are reproducible bit-for-bit.
    """
    a = A.copy()
    v = np.eye(3)
    norm_a = float(np.linalg.norm(A))
    thresh = 1e-14 * norm_a
    for _ in range(30):
        off = math.sqrt(2.0 * (a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2))
        if off <= thresh:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if apq == 0.0:
                continue
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            a[p, q] = a[q, p] = 0.0
            v = v @ rot
    return np.diag(a).copy(), v


def svd_ordered(F) -> Decomposition:
    """Ordered SVD of F in GL+(3): F = Rp . Q diag(sigma) Q^T, sigma descending.

    Deterministic for a fixed input: eigenpairs of F^T F come from a cyclic
    Jacobi iteration, are sorted by descending singular value, each
    eigenvector's sign is fixed so its largest-magnitude component is
    positive, and det(Q) = +1 is enforced by negating the third column.

    Raises NegativeDeterminant for det(F) < 0 and NonInvertible for
    |det(F)| <= 1e-12.
    """
    f = as_mat3(F)
    d = det3(f)
    if d < 0.0:
        raise NegativeDeterminant(f"det(F) = {d} < 0")
    if d <= EPS_DET:
        raise NonInvertible(f"det(F) = {d} <= {EPS_DET}")

    lam, vec = _jacobi_eigh3(f.T @ f)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    vec = vec[:, order]
    sigma = np.sqrt(np.maximum(lam, 0.0))

    # deterministic signs: largest-|entry| component of each column positive
    for j in range(3):
        k = int(np.argmax(np.abs(vec[:, j])))
        if vec[k, j] < 0.0:
            vec[:, j] = -vec[:, j]
    if det3(vec) < 0.0:
        vec[:, 2] = -vec[:, 2]

    U = vec @ np.diag(sigma) @ vec.T
    U = 0.5 * (U + U.T)
    Rp = f @ (vec @ np.diag(1.0 / sigma) @ vec.T)

    gaps = (float(sigma[0] - sigma[1]), float(sigma[1] - sigma[2]))
    eps = EPS_GAP * float(sigma[0])
    return Decomposition(
        F=f,
        sigma=(float(sigma[0]), float(sigma[1]), float(sigma[2])),
        Q=vec,
        Rp=Rp,
        U=U,
        gaps=gaps,
        degenerate=(gaps[0] < eps, gaps[1] < eps),
    )


def polar_factor(F) -> np.ndarray:
    """Rotation Rp of the right polar decomposition F = Rp U, U SPD."""
    return svd_ordered(F).Rp


# ---------------------------------------------------------------------------
# quaternions and the covering map
# ---------------------------------------------------------------------------


def quat_to_rotation(q) -> np.ndarray:
    """Covering-map polynomial applied to q = (w, x, y, z).

    Evaluates the covering homomorphism exactly as a polynomial, without
    normalizing the input; the result is in SO(3) precisely when |q| = 1,
    and is even in q (antipodal quaternions map to the same matrix).
    """
    w, x, y, z = (float(c) for c in np.asarray(q, dtype=float))
    if w == 0.0 and x == 0.0 and y == 0.0 and z == 0.0:
        raise ZeroQuaternion("covering map undefined at q = 0")
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def canonical_quaternion(q) -> np.ndarray:
    """Representative of {q, -q} with w > 0, or w = 0 and the first nonzero
    vector component positive."""
    a = np.asarray(q, dtype=float).copy()
    if a[0] < 0.0:
        return -a
    if a[0] == 0.0:
        for c in a[1:]:
            if c != 0.0:
                return a if c > 0.0 else -a
    return a


def normalize_quaternion(q) -> np.ndarray:
    a = np.asarray(q, dtype=float)
    n = float(np.linalg.norm(a))
    if n == 0.0:
        raise ZeroQuaternion("cannot normalize the zero quaternion")
    return a / n


def rotation_to_quat(R) -> np.ndarray:
    """Unit quaternion on the canonical sheet with quat_to_rotation(q) = R.

    Uses Shepperd's branch selection (largest of trace/diagonal) for
    stability, then canonicalizes the antipodal ambiguity.
    """
    r = require_rotation(R)
    t = r[0, 0] + r[1, 1] + r[2, 2]
    if t > 0.0:
        s = math.sqrt(t + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
        )
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = math.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        q = np.array(
            [(r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s]
        )
    elif r[1, 1] >= r[2, 2]:
        s = math.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2]) * 2.0
        q = np.array(
            [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s, (r[1, 2] + r[2, 1]) / s]
        )
    else:
        s = math.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1]) * 2.0
        q = np.array(
            [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, 0.25 * s]
        )
    return canonical_quaternion(q / np.linalg.norm(q))


# ---------------------------------------------------------------------------
# axis-angle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AxisAngle:
    """Rotation by `angle` in (-pi, pi] about unit vector `axis`.

    Conventions: the identity reports axis (0, 0, 1); at angle pi the axis
    sign follows the canonical quaternion sheet; otherwise the first nonzero
    axis component is positive and the angle carries the sign.
    """

    angle: float
    axis: np.ndarray


def axis_angle(R) -> AxisAngle:
    """Axis-angle form of a rotation matrix."""
    q = rotation_to_quat(R)
    w, v = q[0], q[1:]
    vn = float(np.linalg.norm(v))
    if vn == 0.0:
        return AxisAngle(0.0, np.array([0.0, 0.0, 1.0]))
    angle = 2.0 * math.atan2(vn, w)
    axis = v / vn
    if w == 0.0:  # angle == pi: sign already fixed by the canonical sheet
        return AxisAngle(math.pi, axis)
    for c in axis:
        if c != 0.0:
            if c < 0.0:
                return AxisAngle(-angle, -axis + 0.0)  # +0.0 clears negative zeros
            break
    return AxisAngle(angle, axis)


def rotation_from_axis_angle(angle: float, axis) -> np.ndarray:
    """Rodrigues formula; `axis` need not be normalized."""
    u = np.asarray(axis, dtype=float)
    n = float(np.linalg.norm(u))
    if n == 0.0:
        raise ValueError("rotation axis must be nonzero")
    u = u / n
    k = np.array([[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]])
    return IDENTITY + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


# ---------------------------------------------------------------------------
# symmetry orbit and recovery of absolute rotations
# ---------------------------------------------------------------------------


def symmetry_orbit(Rhat) -> list[np.ndarray]:
    """Conjugates Qi^T Rhat Qi over the Klein-four group; all four realize
    the same relative energy."""
    r = require_rotation(Rhat)
    return [qi.T @ r @ qi for qi in SYMMETRY_GROUP]


def recover_absolute(Rhat, dec: Decomposition) -> np.ndarray:
    """Absolute rotation Rp . Q Rhat^T Q^T realizing the relative rotation
    Rhat in the eigenframe of the decomposition."""
    r = require_rotation(Rhat)
    return dec.Rp @ dec.Q @ r.T @ dec.Q.T
