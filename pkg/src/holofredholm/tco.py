"""Coercivity certificates, discrete norms, and compatibility reports.

The key quantities: the distance of the numerical range from the origin
(a computable coercivity constant), the discrete norm ||T - T_n||_n
measuring how well a level operator tracks a reference operator on the
subspace, and per-level stability norms for the compactly shifted problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .galerkin import GalerkinHierarchy
from .linalg import GramSpace
from .opfun import HolomorphicOpFunction

SINGULAR_CUTOFF = 1e-14
DENSE_ANGLE_DIM = 600


def _herm_parts(C):
    H1 = 0.5 * (C + C.conj().T)
    H2 = 0.5j * (C - C.conj().T)
    return H1, H2


def _smallest_eig(H):
    return float(np.linalg.eigvalsh(H)[0])


def coercivity_lower_bound(space: GramSpace, B, theta=0.0):
    """Certified lower bound for the coercivity constant from one angle.

    Any angle with min-eig(Herm(e^{i theta} B)) > 0 proves inf |<Bu,u>|/||u||^2
    is at least that value; a single angle is cheap on large spaces.
    """
    C = space.to_x(np.asarray(B))
    H1, H2 = _herm_parts(C)
    H = np.cos(theta) * H1 + np.sin(theta) * H2
    return max(0.0, _smallest_eig(H))


def coercivity_constant(space: GramSpace, B, n_theta=None, refine=True):
    """Distance from the origin to the numerical range of B (0 if inside).

    Sweeps support angles: s(theta) = min-eig of the Hermitian part of
    e^{i theta} B in the weighted inner product; by convexity of the range
    the distance is max(0, max_theta s(theta)).  One local refinement pass
    is run around the maximizing angle.  On spaces above
    ``DENSE_ANGLE_DIM`` the sweep is thinned (every grid value is still a
    certified lower bound, so positivity is never claimed falsely).
    """
    B = np.asarray(B)
    if B.shape != (space.dim, space.dim):
        raise UsageError(f"B must be {space.dim}x{space.dim}, got {B.shape}")
    C = space.to_x(B)
    scale = np.linalg.norm(C, ord="fro")
    if scale == 0.0:
        return 0.0
    H1, H2 = _herm_parts(C)
    if np.linalg.norm(H2, ord="fro") <= 1e-13 * scale:
        # Hermitian operator: the range is the real eigenvalue interval
        w = np.linalg.eigvalsh(H1.real if np.isrealobj(C) else H1)
        lo, hi = float(w[0]), float(w[-1])
        if lo > 0.0:
            return lo
        if hi < 0.0:
            return -hi
        return 0.0
    if n_theta is None:
        n_theta = 360 if space.dim <= DENSE_ANGLE_DIM else 24

    def s(theta):
        return _smallest_eig(np.cos(theta) * H1 + np.sin(theta) * H2)

    thetas = 2.0 * np.pi * np.arange(n_theta) / n_theta
    vals = np.array([s(t) for t in thetas])
    k = int(np.argmax(vals))
    best = float(vals[k])
    if refine:
        width = 2.0 * np.pi / n_theta
        fine = thetas[k] + np.linspace(-width, width, 33)
        best = max(best, max(s(t) for t in fine))
    return max(0.0, best)


def default_tn(hier: GalerkinHierarchy, n, T):
    """Canonical level operator: the Galerkin compression of T."""
    return hier.compress_matrix(n, T)


def discrete_norm(hier: GalerkinHierarchy, n, T, T_n):
    """sup over unit coarse u of ||T u - (embedded T_n u)|| in the reference norm."""
    T = np.asarray(T)
    T_n = np.asarray(T_n)
    E = hier.embedding(n)
    if T.shape != (hier.reference.dim, hier.reference.dim):
        raise UsageError(f"T must act on the reference space, got {T.shape}")
    if T_n.shape != (hier.dims[n], hier.dims[n]):
        raise UsageError(
            f"T_n must act on level {n} (dim {hier.dims[n]}), got {T_n.shape}"
        )
    return hier.discrete_norm_of(n, T @ E - E @ T_n)


@dataclass
class TCWitness:
    """Bijection T plus compact shift K certifying weak T-coercivity.

    ``K`` is carried as a declared modeling assumption (compactness is
    meaningless at fixed finite dimension).  ``tn_builder(hier, n, T)``
    produces the level operators; the default is Galerkin compression.
    """

    T: np.ndarray
    K: np.ndarray | None = None
    tn_builder: object = None
    probe_lambdas: tuple = ()
    note: str = ""
    coercivity: float | None = None

    def build_tn(self, hier, n):
        builder = self.tn_builder or default_tn
        return builder(hier, n, self.T)

    def shift_matrix(self, space: GramSpace):
        """T^{-*} K on the reference space (zero matrix when K is None)."""
        if self.K is None:
            return np.zeros((space.dim, space.dim))
        T_star = space.adjoint(self.T)
        return np.linalg.solve(T_star, np.asarray(self.K))

    def validate(self, space: GramSpace, F: HolomorphicOpFunction | None = None):
        mn, mx = space.gsv_extremes(self.T)
        if mn <= 1e-10 * max(mx, 1.0):
            raise UsageError(f"witness T is numerically singular (min gsv {mn:.3e})")
        if F is not None:
            for lam in self.probe_lambdas:
                B = space.adjoint(self.T) @ F(lam)
                if self.K is not None:
                    B = B + self.K
                if coercivity_lower_bound(space, B) <= 0.0 and coercivity_constant(
                    space, B
                ) <= 0.0:
                    raise UsageError(
                        f"witness does not certify coercivity at probe {lam}"
                    )


@dataclass
class LevelRecord:
    n: int
    dim: int
    disc_norm: float
    tn_norm: float
    tn_inv_norm: float
    stability: float


@dataclass
class CompatibilityReport:
    """Per-level discrete norms and stability data with a global verdict.

    verdict is true when the last discrete norm is at or below ``tol`` and
    the sequence either started below ``tol`` (exact invariance) or
    decreased by at least a factor 10 from first to last level.
    """

    lam: complex
    tol: float
    rows: list = field(default_factory=list)
    t_norm: float = 0.0
    t_inv_norm: float = np.inf
    stability_ref: float = np.inf
    verdict: bool = False

    CSV_HEADER = "n,dim,disc_norm,tn_norm,tn_inv_norm,stability"

    def decide_verdict(self):
        if not self.rows:
            self.verdict = False
            return self.verdict
        first = self.rows[0].disc_norm
        last = self.rows[-1].disc_norm
        self.verdict = bool(last <= self.tol and (first <= self.tol or first >= 10.0 * last))
        return self.verdict

    def norm_bounds_ok(self, tail_fraction=0.5):
        """Empirical check of the two-sided norm estimates on late levels."""
        tail = self.rows[len(self.rows) // 2 :] if tail_fraction == 0.5 else self.rows
        for r in tail:
            if not (self.t_norm / 3.0 <= r.tn_norm <= self.t_norm + r.disc_norm + 1e-12):
                return False
            if r.tn_inv_norm > 2.0 * self.t_inv_norm:
                return False
        return True

    def stability_bounded_ok(self):
        tail = self.rows[len(self.rows) // 2 :]
        return all(r.stability <= 2.0 * self.stability_ref for r in tail)

    def to_csv(self):
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.n},{r.dim},{r.disc_norm!r},{r.tn_norm!r},"
                f"{r.tn_inv_norm!r},{r.stability!r}"
            )
        return "\n".join(lines) + "\n"


def _inv_norm(mn, mx):
    if mn <= SINGULAR_CUTOFF * max(mx, 1.0):
        return float(np.inf)
    return 1.0 / mn


def compatibility_report(
    hier: GalerkinHierarchy,
    F: HolomorphicOpFunction,
    witness: TCWitness,
    lam,
    tol=1e-2,
) -> CompatibilityReport:
    """Per-level compatibility data for F at lam under the given witness.

    Level operators T_n are finite square matrices, hence automatically
    Fredholm of index zero; what is recorded is the quantitative content:
    discrete norms, norms of T_n and its inverse, and the norm of the
    inverse of the compactly shifted compression (infinity when singular,
    never an exception).
    """
    space = hier.reference
    witness.validate(space)
    A_ref = F(lam)
    shift = witness.shift_matrix(space)
    shifted = A_ref + shift

    mn, mx = space.gsv_extremes(witness.T)
    report = CompatibilityReport(lam=complex(lam), tol=float(tol))
    report.t_norm = mx
    report.t_inv_norm = _inv_norm(mn, mx)
    smn, smx = space.gsv_extremes(shifted)
    report.stability_ref = _inv_norm(smn, smx)

    for n in range(hier.n_levels):
        T_n = witness.build_tn(hier, n)
        disc = discrete_norm(hier, n, witness.T, T_n)
        lmn, lmx = hier.level_space(n).gsv_extremes(T_n)
        B_n = hier.compress_matrix(n, shifted)
        bmn, bmx = hier.level_space(n).gsv_extremes(B_n)
        report.rows.append(
            LevelRecord(
                n=n,
                dim=hier.dims[n],
                disc_norm=float(disc),
                tn_norm=float(lmx),
                tn_inv_norm=_inv_norm(lmn, lmx),
                stability=_inv_norm(bmn, bmx),
            )
        )
    report.decide_verdict()
    return report
