"""Holomorphic operator functions in split form.

An operator function is stored as a finite sum  A(lam) = sum_i f_i(lam) * A_i
of scalar holomorphic functions times constant matrices.  Polynomial and
rational scalars differentiate in closed form to any order; opaque scalars
fall back to Cauchy-integral quadrature.  The split form survives Galerkin
compression and adjoints, which is what the rest of the package relies on.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, UsageError
from .linalg import GramSpace

POLE_EXCLUSION = 1e-12


class ScalarHolo:
    """Base class for the scalar factors; subclasses implement value()."""

    poles: tuple = ()

    def value(self, lam, order=0):
        raise NotImplementedError

    def conj_reflect(self):
        """The scalar lam -> conj(f(conj(lam))), holomorphic again."""
        raise NotImplementedError

    def __call__(self, lam):
        return self.value(lam)


class PolynomialScalar(ScalarHolo):
    def __init__(self, coeffs):
        self._p = Polynomial(np.atleast_1d(np.asarray(coeffs, dtype=complex)))
        self.poles = ()

    @property
    def coeffs(self):
        return self._p.coef.copy()

    def value(self, lam, order=0):
        if order == 0:
            return complex(self._p(lam))
        return complex(self._p.deriv(order)(lam))

    def conj_reflect(self):
        return PolynomialScalar(np.conj(self._p.coef))

    def __repr__(self):
        return f"poly({list(self._p.coef)})"


class RationalScalar(ScalarHolo):
    """p(lam)/q(lam) with exact derivatives via the quotient rule."""

    def __init__(self, num, den):
        num = Polynomial(np.atleast_1d(np.asarray(num, dtype=complex)))
        den = Polynomial(np.atleast_1d(np.asarray(den, dtype=complex)))
        if den.degree() == 0 and den.coef[0] == 0:
            raise UsageError("rational scalar with zero denominator")
        self._derivs = [(num, den)]
        self.poles = tuple(np.roots(den.coef[::-1])) if den.degree() > 0 else ()

    def _pair(self, order):
        while len(self._derivs) <= order:
            p, q = self._derivs[-1]
            self._derivs.append((p.deriv() * q - p * q.deriv(), q * q))
        return self._derivs[order]

    def value(self, lam, order=0):
        p, q = self._pair(order)
        return complex(p(lam) / q(lam))

    def conj_reflect(self):
        p, q = self._derivs[0]
        return RationalScalar(np.conj(p.coef), np.conj(q.coef))

    def __repr__(self):
        p, q = self._derivs[0]
        return f"rational({list(p.coef)}, {list(q.coef)})"


class OpaqueScalar(ScalarHolo):
    """A scalar given only by an evaluation rule.

    Derivatives use trapezoid quadrature of the Cauchy integral on a circle
    of radius min(0.1, half the distance to the nearest pole); the rule is
    geometrically convergent for analytic integrands.
    """

    def __init__(self, func, max_order=8, poles=(), quad_nodes=64, quad_radius=None):
        self._func = func
        self.max_order = int(max_order)
        self.poles = tuple(poles)
        self.quad_nodes = int(quad_nodes)
        self.quad_radius = quad_radius

    def _radius(self, lam):
        if self.quad_radius is not None:
            r = float(self.quad_radius)
        else:
            r = 0.1
            if self.poles:
                r = min(r, 0.5 * min(abs(lam - p) for p in self.poles))
        if self.poles and r >= min(abs(lam - p) for p in self.poles):
            raise DomainError(
                f"quadrature circle of radius {r} around {lam} encloses a pole"
            )
        return r

    def value(self, lam, order=0):
        if order == 0:
            return complex(self._func(lam))
        if order > self.max_order:
            raise UsageError(
                f"derivative order {order} exceeds declared limit {self.max_order}"
            )
        r = self._radius(lam)
        n = self.quad_nodes
        theta = 2.0 * np.pi * np.arange(n) / n
        zs = lam + r * np.exp(1j * theta)
        fs = np.array([self._func(z) for z in zs], dtype=complex)
        total = fs @ np.exp(-1j * order * theta)
        return complex(math.factorial(order) * total / (n * r**order))

    def conj_reflect(self):
        f = self._func
        return OpaqueScalar(
            lambda lam: np.conj(f(np.conj(lam))),
            max_order=self.max_order,
            poles=tuple(np.conj(p) for p in self.poles),
            quad_nodes=self.quad_nodes,
            quad_radius=self.quad_radius,
        )


def poly(*coeffs):
    """Polynomial scalar from ascending coefficients: poly(c0, c1, ...)."""
    if len(coeffs) == 1 and np.ndim(coeffs[0]) == 1:
        coeffs = coeffs[0]
    return PolynomialScalar(coeffs)


def const(c):
    return PolynomialScalar([c])


def rational(num, den):
    return RationalScalar(num, den)


class Domain:
    """Bounding disk plus excluded poles."""

    def __init__(self, center=0.0, radius=np.inf, poles=()):
        self.center = complex(center)
        self.radius = float(radius)
        self.poles = tuple(complex(p) for p in poles)

    def contains(self, z):
        return abs(z - self.center) <= self.radius

    def pole_distance(self, z):
        if not self.poles:
            return np.inf
        return min(abs(z - p) for p in self.poles)

    def conj_reflect(self):
        return Domain(
            np.conj(self.center), self.radius, tuple(np.conj(p) for p in self.poles)
        )


class HolomorphicOpFunction:
    """lam -> sum_i f_i(lam) A_i on a GramSpace, with exact derivatives."""

    def __init__(self, space: GramSpace, terms, domain: Domain | None = None):
        self.space = space
        checked = []
        for scalar, mat in terms:
            mat = np.asarray(mat)
            if mat.shape != (space.dim, space.dim):
                raise UsageError(
                    f"term matrix must be {space.dim}x{space.dim}, got {mat.shape}"
                )
            if not isinstance(scalar, ScalarHolo):
                scalar = const(scalar)
            checked.append((scalar, mat))
        self.terms = tuple(checked)
        pole_list = []
        for scalar, _ in self.terms:
            pole_list.extend(scalar.poles)
        if domain is None:
            domain = Domain(poles=pole_list)
        else:
            merged = list(domain.poles)
            merged.extend(p for p in pole_list if all(abs(p - q) > 0 for q in merged))
            domain = Domain(domain.center, domain.radius, merged)
        self.domain = domain

    @property
    def dim(self):
        return self.space.dim

    def _check_pole(self, lam):
        for p in self.domain.poles:
            if abs(lam - p) < POLE_EXCLUSION:
                raise DomainError(f"evaluation point {lam} is at/near the pole {p}")

    def _combine(self, vals):
        real_ok = all(abs(v.imag) == 0.0 for v in vals) and all(
            np.isrealobj(m) for _, m in self.terms
        )
        out = np.zeros((self.dim, self.dim), dtype=float if real_ok else complex)
        for v, (_, mat) in zip(vals, self.terms):
            if v != 0.0:
                out += (v.real if real_ok else v) * mat
        return out

    def evaluate(self, lam):
        self._check_pole(lam)
        return self._combine([s.value(lam) for s, _ in self.terms])

    __call__ = evaluate

    def derivative(self, lam, order=1):
        if order < 0:
            raise UsageError("derivative order must be nonnegative")
        if order == 0:
            return self.evaluate(lam)
        self._check_pole(lam)
        return self._combine([s.value(lam, order) for s, _ in self.terms])

    def adjoint(self):
        """The function lam -> A(conj(lam))* in the weighted inner product."""
        terms = [
            (s.conj_reflect(), self.space.adjoint(m)) for s, m in self.terms
        ]
        return HolomorphicOpFunction(self.space, terms, self.domain.conj_reflect())

    def pole_distance(self, z):
        return self.domain.pole_distance(z)


def linear_pencil(space, K, M, domain=None):
    """The pencil lam -> K - lam*M."""
    return HolomorphicOpFunction(space, [(const(1.0), K), (poly(0.0, -1.0), M)], domain)
