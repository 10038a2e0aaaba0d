"""Haar-uniform rotation sampling and Monte Carlo optimality validation.

Randomness comes from a counter-based splitmix64 generator (seed plus word
index -> 64-bit word -> double in [0, 1)), so a stream is a pure function of
its 64-bit seed: identical output across runs, platforms and worker counts.
Validation runs derive one independent sub-stream per case by mixing the
master seed with the case index, which makes reports bit-identical no matter
how cases are scheduled.

Unit quaternions are drawn by rejection: uniform proposals in [-1, 1)^4,
points outside the closed unit ball rejected (acceptance ratio pi^2/32),
survivors normalized onto the sphere. Composing with the covering map gives
Haar-uniform rotations.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .energy import MaterialParams
from .errors import ExhaustedAttempts
from .relax import DomainTag, classify_domain_sigma, relaxed_polar
from .rotcore import EPS_DET, EPS_GAP, det3, svd_ordered

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

ACCEPTANCE_RATIO = math.pi**2 / 32.0  # vol(B^4) / vol([-1,1]^4)
GAP_HARD_TOL = 1e-9
PAPER_SCALE_SAMPLES = 4_629_171
_FROBENIUS_GATE = 4_000_000  # sample count from which the Frobenius-tol test applies

# reserved sub-stream indices (case indices stay below 2^32)
_STREAM_F_CLASSICAL = (1 << 32) + 1
_STREAM_F_NON_CLASSICAL = (1 << 32) + 2
_STREAM_SHARED_SET = (1 << 32) + 3


def mix64(v: int) -> int:
    """splitmix64 finalizer on a 64-bit word."""
    v &= _MASK64
    v = ((v ^ (v >> 30)) * _MIX1) & _MASK64
    v = ((v ^ (v >> 27)) * _MIX2) & _MASK64
    return v ^ (v >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Independent 64-bit sub-seed for a case index (documented mixing:
    mix64(master XOR mix64((index + 1) * golden)))."""
    return mix64((master_seed & _MASK64) ^ mix64(((index + 1) * _GOLDEN) & _MASK64))


@dataclass
class RngState:
    """Counter-based splitmix64 stream: word i is mix64(seed + (i+1)*golden).

    The counter advances with every draw; proposal/acceptance totals for the
    quaternion rejection sampler are tracked on the side.
    """

    seed: int
    counter: int = 0
    n_proposed: int = 0
    n_accepted: int = 0

    def uniform(self, n: int) -> np.ndarray:
        """Next n doubles, uniform in [0, 1)."""
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        v = np.uint64(self.seed & _MASK64) + idx * np.uint64(_GOLDEN)
        v = (v ^ (v >> np.uint64(30))) * np.uint64(_MIX1)
        v = (v ^ (v >> np.uint64(27))) * np.uint64(_MIX2)
        v = v ^ (v >> np.uint64(31))
        return (v >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def symmetric_uniform(self, n: int) -> np.ndarray:
        """Next n doubles, uniform in [-1, 1)."""
        return 2.0 * self.uniform(n) - 1.0


def sample_unit_quaternions(rng: RngState, n: int) -> np.ndarray:
    """n unit quaternions, Haar-uniform on S^3, as an (n, 4) array.

    Rejection sampling on [-1, 1)^4: proposals outside the closed unit ball
    (or exactly zero) are discarded, the rest normalized, in stream order.
    Proposals are drawn in batches but the stream is rewound past the last
    one actually consumed, so the output never depends on batch size.
    """
    out = np.empty((n, 4))
    have = 0
    while have < n:
        need = n - have
        m = max(int(need / ACCEPTANCE_RATIO * 1.1) + 16, 64)
        u = rng.symmetric_uniform(4 * m).reshape(m, 4)
        r2 = np.einsum("ij,ij->i", u, u)
        acc_idx = np.nonzero((r2 > 0.0) & (r2 <= 1.0))[0]
        take = min(len(acc_idx), need)
        if take < len(acc_idx):
            used = int(acc_idx[take - 1]) + 1  # take >= 1 here since need >= 1
            rng.counter -= 4 * (m - used)
            rng.n_proposed += used
        else:
            rng.n_proposed += m
        rng.n_accepted += take
        if take:
            sel = acc_idx[:take]
            out[have : have + take] = u[sel] / np.sqrt(r2[sel])[:, None]
        have += take
    return out


def sample_unit_quaternion(rng: RngState) -> np.ndarray:
    """One Haar-uniform unit quaternion."""
    return sample_unit_quaternions(rng, 1)[0]


def quats_to_rotations(q: np.ndarray) -> np.ndarray:
    """Vectorized covering map: (n, 4) unit quaternions -> (n, 3, 3) rotations."""
    w, x, y, z = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    out = np.empty((len(q), 3, 3))
    out[:, 0, 0] = 1.0 - 2.0 * (y * y + z * z)
    out[:, 0, 1] = 2.0 * (x * y - w * z)
    out[:, 0, 2] = 2.0 * (x * z + w * y)
    out[:, 1, 0] = 2.0 * (x * y + w * z)
    out[:, 1, 1] = 1.0 - 2.0 * (x * x + z * z)
    out[:, 1, 2] = 2.0 * (y * z - w * x)
    out[:, 2, 0] = 2.0 * (x * z - w * y)
    out[:, 2, 1] = 2.0 * (y * z + w * x)
    out[:, 2, 2] = 1.0 - 2.0 * (x * x + y * y)
    return out


def sample_rotations(rng: RngState, n: int) -> np.ndarray:
    """n Haar-uniform rotation matrices, (n, 3, 3)."""
    return quats_to_rotations(sample_unit_quaternions(rng, n))


def sample_rotation(rng: RngState) -> np.ndarray:
    """One Haar-uniform rotation matrix."""
    return sample_rotations(rng, 1)[0]


def rotation_angles(rotations: np.ndarray) -> np.ndarray:
    """Rotation angles in [0, pi] from the trace of each matrix."""
    tr = np.trace(rotations, axis1=-2, axis2=-1)
    return np.arccos(np.clip(0.5 * (tr - 1.0), -1.0, 1.0))


# ---------------------------------------------------------------------------
# deformation-gradient sampling
# ---------------------------------------------------------------------------

CLASSICAL_F_HALF_RANGE = 2.0  # substitute half-range when rho is infinite
MAX_F_ATTEMPTS = 1_000_000
# near-singular draws (sigma_3/sigma_1 below this) are rejected: the polar
# factor's orthogonality error grows like eps * (sigma_1/sigma_3)^2 and would
# blow the 1e-9 rotation tolerance in double precision
MIN_SIGMA_RATIO = 1e-3


def sample_F(rng: RngState, p: MaterialParams, want: DomainTag) -> np.ndarray:
    """One deformation gradient with the requested domain tag.

    Coefficients are uniform in [-rho/2, rho/2) (half-range 2 when rho is
    infinite); proposals with det <= 1e-12, near-multiple singular values,
    condition number above 1/MIN_SIGMA_RATIO, or the wrong domain tag are
    rejected.
    """
    if want not in (DomainTag.CLASSICAL, DomainTag.NON_CLASSICAL):
        raise ValueError(f"want must be Classical or NonClassical, got {want}")
    half = CLASSICAL_F_HALF_RANGE if p.classical else 0.5 * p.rho
    for _ in range(MAX_F_ATTEMPTS):
        f = half * rng.symmetric_uniform(9).reshape(3, 3)
        if det3(f) <= EPS_DET:
            continue
        sig = svd_ordered(f).sigma
        if sig[0] - sig[1] < EPS_GAP * sig[0] or sig[1] - sig[2] < EPS_GAP * sig[0]:
            continue
        if sig[2] < MIN_SIGMA_RATIO * sig[0]:
            continue
        if classify_domain_sigma(sig, p) is want:
            return f
    raise ExhaustedAttempts(f"no {want.value} sample within {MAX_F_ATTEMPTS} attempts")


# ---------------------------------------------------------------------------
# Monte Carlo optimality validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseRecord:
    """Per-F evidence: sampled minimum vs the closed-form candidate."""

    index: int
    F: np.ndarray
    domain_tag: DomainTag
    w_red: float
    min_sampled_energy: float
    energy_gap: float
    nearest_frobenius: float
    nearest_geodesic_angle: float
    passed: bool
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "F": self.F.tolist(),
            "domain": self.domain_tag.value,
            "w_red": self.w_red,
            "min_sampled_energy": self.min_sampled_energy,
            "energy_gap": self.energy_gap,
            "nearest_frobenius": self.nearest_frobenius,
            "nearest_geodesic_angle": self.nearest_geodesic_angle,
            "pass": self.passed,
            "n_samples": self.n_samples,
        }


@dataclass(frozen=True)
class ValidationReport:
    """Aggregate Monte Carlo optimality evidence for one weight pair."""

    mu: float
    muc: float
    seed: int
    tol: float
    n_samples: int
    shared_samples: bool
    records: tuple[CaseRecord, ...]
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def n_cases(self) -> int:
        return len(self.records)

    @property
    def failures(self) -> int:
        return sum(1 for r in self.records if not r.passed)

    @property
    def max_gap(self) -> float:
        return max((r.energy_gap for r in self.records), default=0.0)

    @property
    def min_gap(self) -> float:
        return min((r.energy_gap for r in self.records), default=0.0)

    @property
    def max_nearest_angle(self) -> float:
        return max((r.nearest_geodesic_angle for r in self.records), default=0.0)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "muc": self.muc,
            "seed": self.seed,
            "tol": self.tol,
            "n_samples": self.n_samples,
            "shared_samples": self.shared_samples,
            "n_cases": self.n_cases,
            "failures": self.failures,
            "max_gap": self.max_gap,
            "min_gap": self.min_gap,
            "max_nearest_angle": self.max_nearest_angle,
            "notes": list(self.notes),
            "records": [r.to_dict() for r in self.records],
        }


def _energies_of_rotations(rot: np.ndarray, F: np.ndarray, p: MaterialParams) -> np.ndarray:
    ubar = np.swapaxes(rot, 1, 2) @ F
    d = ubar - np.eye(3)
    dt = np.swapaxes(d, 1, 2)
    sym = 0.5 * (d + dt)
    skew = 0.5 * (d - dt)
    return p.mu * np.einsum("nij,nij->n", sym, sym) + p.muc * np.einsum(
        "nij,nij->n", skew, skew
    )


def _evaluate_case(
    F: np.ndarray,
    p: MaterialParams,
    tol: float,
    index: int,
    n_samples: int,
    rng: RngState | None,
    shared_set: np.ndarray | None,
    chunk: int = 100_000,
) -> CaseRecord:
    rel = relaxed_polar(F, p)
    best_e = math.inf
    best_q = None
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        if shared_set is not None:
            qs = shared_set[done : done + m]
        else:
            qs = sample_unit_quaternions(rng, m)
        energies = _energies_of_rotations(quats_to_rotations(qs), F, p)
        k = int(np.argmin(energies))
        if energies[k] < best_e:
            best_e = float(energies[k])
            best_q = qs[k].copy()
        done += m

    r1 = quats_to_rotations(best_q[None, :])[0]
    frob = min(float(np.linalg.norm(r1 - r)) for r in rel.rotations)
    geo = min(
        float(rotation_angles((r1.T @ r)[None, :, :])[0]) for r in rel.rotations
    )
    gap = best_e - rel.reduced_energy
    passed = gap >= -GAP_HARD_TOL and (n_samples < _FROBENIUS_GATE or frob < tol)
    return CaseRecord(
        index=index,
        F=F,
        domain_tag=rel.domain_tag,
        w_red=rel.reduced_energy,
        min_sampled_energy=best_e,
        energy_gap=gap,
        nearest_frobenius=frob,
        nearest_geodesic_angle=geo,
        passed=passed,
        n_samples=n_samples,
    )


def validate_case(F, p: MaterialParams, n_samples: int, tol: float, rng: RngState) -> CaseRecord:
    """Energy-minimize over n_samples Haar rotations and compare against the
    relaxed polar candidate: records the sampled minimum, the energy gap
    (never meaningfully negative if the candidate is globally optimal) and
    the distance of the sampled arg-min to {r_plus, r_minus}."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    return _evaluate_case(
        np.asarray(F, dtype=float), p, tol, 0, n_samples, rng, shared_set=None
    )


def default_workers() -> int:
    env = os.environ.get("RELAXED_POLAR_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def run_validation(
    p: MaterialParams,
    n_classical: int,
    n_nonclassical: int,
    n_samples: int,
    seed: int,
    tol: float = 1e-4,
    workers: int | None = None,
    shared_samples: bool = False,
) -> ValidationReport:
    """Full validation protocol: sample F sets per domain, minimize over Haar
    rotations per case, aggregate.

    Case i draws from the sub-stream derive_seed(seed, i), so the report is
    identical for any worker count. With shared_samples=True a single
    quaternion set (own sub-stream) is reused across all cases. In the
    classical weight regime the non-classical domain is empty; those cases
    are skipped with a note.
    """
    notes = []
    if p.classical and n_nonclassical > 0:
        notes.append("classical regime: non-classical domain is empty, cases skipped")
        n_nonclassical = 0

    rng_fc = RngState(derive_seed(seed, _STREAM_F_CLASSICAL))
    rng_fn = RngState(derive_seed(seed, _STREAM_F_NON_CLASSICAL))
    cases = [sample_F(rng_fc, p, DomainTag.CLASSICAL) for _ in range(n_classical)]
    cases += [sample_F(rng_fn, p, DomainTag.NON_CLASSICAL) for _ in range(n_nonclassical)]
    # diagnostic: kept/proposed per domain (each proposal consumes 9 words)
    notes.append(
        f"F-sampler yield: classical {n_classical}/{rng_fc.counter // 9}, "
        f"non-classical {n_nonclassical}/{rng_fn.counter // 9}"
    )

    shared_set = None
    if shared_samples:
        shared_set = sample_unit_quaternions(
            RngState(derive_seed(seed, _STREAM_SHARED_SET)), n_samples
        )

    def job(i: int) -> CaseRecord:
        rng = None if shared_samples else RngState(derive_seed(seed, i))
        return _evaluate_case(cases[i], p, tol, i, n_samples, rng, shared_set)

    nw = workers if workers is not None else default_workers()
    if nw > 1:
        with ThreadPoolExecutor(max_workers=nw) as ex:
            records = tuple(ex.map(job, range(len(cases))))
    else:
        records = tuple(job(i) for i in range(len(cases)))

    return ValidationReport(
        mu=p.mu,
        muc=p.muc,
        seed=seed,
        tol=tol,
        n_samples=n_samples,
        shared_samples=shared_samples,
        records=records,
        notes=tuple(notes),
    )
