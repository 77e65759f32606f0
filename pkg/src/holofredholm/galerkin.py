"""Nested Galerkin subspaces of a reference space.

The finest ("reference") space stands in for the continuous problem; coarse
levels are given by embedding matrices whose columns are coefficient
vectors of the coarse basis in the reference basis.  Levels must be nested
so that projection errors and approximation defects are monotone.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError
from .linalg import GramSpace, rect_gsv_max
from .opfun import HolomorphicOpFunction

NESTED_RTOL = 1e-10
ORTHO_RTOL = 1e-10


class GalerkinHierarchy:
    """Reference space plus an increasing list of embedded subspaces."""

    def __init__(self, reference: GramSpace, embeddings, probes=None):
        self.reference = reference
        embeddings = [np.asarray(E) for E in embeddings]
        dims = []
        for E in embeddings:
            if E.ndim != 2 or E.shape[0] != reference.dim:
                raise UsageError(
                    f"embedding must have {reference.dim} rows, got {E.shape}"
                )
            dims.append(E.shape[1])
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise UsageError(f"level dimensions must increase strictly: {dims}")
        self.embeddings = embeddings
        self.dims = dims

        # per-level caches: coarse Gram space and the map E^H G
        self._spaces = []
        self._ehg = []
        G = reference.gram
        for E in embeddings:
            W = E.conj().T @ G
            Gn = W @ E
            self._ehg.append(W)
            try:
                self._spaces.append(GramSpace(Gn))
            except UsageError as exc:
                raise UsageError(f"embedding is rank deficient: {exc}") from exc
            s = np.linalg.svd(reference._chol.conj().T @ E, compute_uv=False)
            if s[-1] < 1e-10 * s[0]:
                raise UsageError("embedding does not have full column rank")

        self._check_nested()
        if probes is not None:
            self._check_probes(probes)

    def _check_nested(self):
        for n in range(len(self.embeddings) - 1):
            E = self.embeddings[n]
            R = E - self.project_block(n + 1, E)
            for j in range(E.shape[1]):
                res = self.reference.norm(R[:, j])
                ref = self.reference.norm(E[:, j])
                if res > NESTED_RTOL * max(ref, 1.0):
                    raise UsageError(
                        f"levels {n} and {n + 1} are not nested "
                        f"(column {j} residual {res:.3e})"
                    )

    def _check_probes(self, probes):
        for u in probes:
            errs = [
                self.reference.norm(np.asarray(u) - self.project(n, u))
                for n in range(self.n_levels)
            ]
            for a, b in zip(errs, errs[1:]):
                if b > a + 1e-12:
                    raise UsageError(
                        f"projection error not decreasing on probe: {errs}"
                    )

    @property
    def n_levels(self):
        return len(self.embeddings)

    def level_space(self, n) -> GramSpace:
        return self._spaces[n]

    def embedding(self, n):
        return self.embeddings[n]

    # -- projections -----------------------------------------------------

    def coarse_coords(self, n, u):
        """Coefficients of the orthogonal projection in the level-n basis."""
        return self._spaces[n].solve_gram(self._ehg[n] @ np.asarray(u))

    def project(self, n, u):
        """Orthogonal projection of a reference vector onto level n."""
        return self.embeddings[n] @ self.coarse_coords(n, u)

    def project_block(self, n, U):
        return self.embeddings[n] @ self._spaces[n].solve_gram(self._ehg[n] @ U)

    def embed(self, n, c):
        """Reference-space vector of level-n coefficients."""
        return self.embeddings[n] @ np.asarray(c)

    # -- compression -------------------------------------------------------

    def compress_matrix(self, n, A):
        """Galerkin compression: the level-n operator of P_n A restricted."""
        E = self.embeddings[n]
        return self._spaces[n].solve_gram(self._ehg[n] @ np.asarray(A) @ E)

    def compress(self, n, F: HolomorphicOpFunction) -> HolomorphicOpFunction:
        if F.space is not self.reference and F.space.dim != self.reference.dim:
            raise UsageError("operator function lives on a different space")
        terms = [(s, self.compress_matrix(n, A)) for s, A in F.terms]
        return HolomorphicOpFunction(self._spaces[n], terms, F.domain)

    # -- approximation defects ----------------------------------------------

    def best_approx_defect(self, n, Q):
        """Worst best-approximation error of span(Q) by level n.

        Q must be orthonormal in the reference inner product; the result is
        max over unit u in span(Q) of ||u - P_n u||.
        """
        Q = np.asarray(Q)
        if Q.ndim == 1:
            Q = Q[:, None]
        gap = np.linalg.norm(Q.conj().T @ (self.reference.gram @ Q) - np.eye(Q.shape[1]))
        if gap > ORTHO_RTOL * max(1.0, Q.shape[1]):
            raise UsageError(f"columns are not orthonormal (deviation {gap:.3e})")
        R = Q - self.project_block(n, Q)
        W = self.reference._chol.conj().T @ R
        if min(W.shape) == 0:
            return 0.0
        return float(np.linalg.svd(W, compute_uv=False)[0])

    # -- discrete norms -------------------------------------------------------

    def discrete_norm_of(self, n, R):
        """sup over unit coarse u of ||R c||_X / ||c||_{X_n} for R: level->ref."""
        return rect_gsv_max(self.reference, self._spaces[n]._chol, R)
