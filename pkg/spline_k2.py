#!/usr/bin/env python3
"""
Second-Order Spline Module

k=2 interpolation in two equivalent representations:

    tanh form:  t(x) = p(x) + q(x) tanh(ax)        (p, q linear per interval)
    exp form:   s(x) = (A + Bu)e^{-au} + (C + Du)e^{au},  u = x - x_{j-1}

Both are stored and evaluated in a local node form. On interval j with
u = x - x_{j-1} and g = s'' - a^2 s,

    s(u) = y0 sig(h-u) + y1 sig(u) + g0 phi(h-u) + g1 phi(u)

where sig(v) = sinh(av)/sinh(ah) and phi solves (D^2 - a^2) phi = sig with
phi(0) = phi(h) = 0. The node form depends on u only, so its conditioning
does not degrade away from the origin, and it tends to the cubic as a*h -> 0.

The polyhyperbolic fit solves a tridiagonal system for g_0..g_N directly.
The tanh fit solves for t''_0..t''_N through four slope coefficients per
interval:

    t'(x_{j-1}) - D_j = L00 t''_{j-1} + L01 t''_j
    t'(x_j)     - D_j = L10 t''_{j-1} + L11 t''_j

with D_j the divided difference. A tanh piece times cosh(a x)/cosh(a x_{j-1})
is a polyhyperbolic piece in node form, which is how t is evaluated.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from spline_core import (
    COSH_GUARD, SERIES_RADIUS, DataSet, EndCondition, EndType, NotDominant,
    Overflow, Partition, SingularLocalSystem, TensionParam, TensionTooLarge,
    LengthMismatch, as_dataset, as_tension, cosh_ratio, divided_difference,
    kernel_b, kernel_c, kernel_e, log_cosh, make_dataset, sech_squared, sinhc,
    stable_cosh_sinh_ratio, stable_sinh_ratio,
)


logger = logging.getLogger(__name__)

# Relative cancellation in the interval denominator above which a warning is logged
CANCELLATION_WARNING = 1e6

# |beta^2 * den| below this (relative to the data) makes the tanh 2x2 singular
LOCAL_DETERMINANT_FLOOR = 1e-14

# alpha*h below this: the piece is reported as a cubic
CUBIC_LIMIT_THRESHOLD = 1e-4

# alpha*(x_N - x_0) below this: skip the tanh determinant check
SMALL_TENSION = 1e-4


# =============================================================================
# Types
# =============================================================================

@dataclass(frozen=True)
class TridiagonalSystem:
    """
    Rows a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i, i = 0..N

    sub holds a_1..a_N, sup holds c_0..c_{N-1}.
    """
    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    @property
    def size(self) -> int:
        return len(self.diag)

    @property
    def dominance_margin(self) -> float:
        off = np.zeros(self.size)
        off[1:] += np.abs(self.sub)
        off[:-1] += np.abs(self.sup)
        return float(np.min(np.abs(self.diag) - off))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(v)) for v in (self.sub, self.diag, self.sup, self.rhs))

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1))

    def residual(self, solution: np.ndarray) -> float:
        """Sup-norm of A x - d"""
        product = self.diag * solution
        product[1:] += self.sub * solution[:-1]
        product[:-1] += self.sup * solution[1:]
        return float(np.max(np.abs(product - self.rhs)))


@dataclass(frozen=True)
class SlopeCoefficients:
    """Per-interval slope coefficients plus the shared denominator"""
    l00: np.ndarray
    l01: np.ndarray
    l10: np.ndarray
    l11: np.ndarray
    den: np.ndarray
    cancellation: np.ndarray


@dataclass(frozen=True)
class IntervalWeights:
    """
    End slopes of the node form on intervals of width h

        s'(x_{j-1}) = w D - tau y_{j-1} - mu g_{j-1} - nu g_j
        s'(x_j)     = w D + tau y_j + nu g_{j-1} + mu g_j

    As alpha -> 0: w -> 1, tau -> 0, mu -> h/3, nu -> h/6.
    mu > nu > 0 for every alpha*h.
    """
    w: np.ndarray
    tau: np.ndarray
    mu: np.ndarray
    nu: np.ndarray


@dataclass(frozen=True)
class ExpSpline2:
    """
    Polyhyperbolic spline in local coordinates u = x - x_{j-1}

    ends[j-1] = (s(x_{j-1}), s(x_j), g(x_{j-1}), g(x_j)) with g = s'' - a^2 s.
    pieces gives the same pieces as (A, B, C, D); intervals in limit_mask
    are written out as cubics.
    """
    alpha: float
    partition: Partition
    ends: np.ndarray
    smoothness: str = 'C2'

    @classmethod
    def from_pieces(cls, alpha: float, partition: Partition, pieces,
                    smoothness: str = 'C2') -> 'ExpSpline2':
        """Node form of pieces given as (A, B, C, D)"""
        A, B, C, D = np.asarray(pieces, dtype=float).T
        h = partition.widths
        down = np.exp(-alpha * h)
        up = np.exp(alpha * h)
        ends = np.column_stack([
            A + C,
            (A + B * h) * down + (C + D * h) * up,
            2.0 * alpha * (D - B),
            2.0 * alpha * (D * up - B * down),
        ])
        return cls(alpha=alpha, partition=partition, ends=ends, smoothness=smoothness)

    @property
    def order(self) -> int:
        return 2

    @property
    def max_derivative(self) -> int:
        return 3

    @property
    def pieces(self) -> np.ndarray:
        return exp_coefficients(self.alpha, self.partition.widths, self.ends)

    @property
    def limit_mask(self) -> np.ndarray:
        return self.alpha * self.partition.widths < CUBIC_LIMIT_THRESHOLD

    @property
    def all_limit(self) -> bool:
        return bool(np.all(self.limit_mask))

    def evaluate(self, x, deriv: int = 0):
        return eval2(self, x, deriv)

    def to_records(self) -> list:
        nodes = self.partition.nodes
        y0, y1, g0, g1 = self.ends.T
        a2 = self.alpha * self.alpha
        cubics = _cubic_from_ends(y0, y1, g0 + a2 * y0, g1 + a2 * y1, self.partition.widths)
        pieces = self.pieces
        limit = self.limit_mask
        records = []
        for j in range(1, len(nodes)):
            record = {'interval': j, 'x0': float(nodes[j - 1]), 'x1': float(nodes[j])}
            if limit[j - 1]:
                record.update(_cubic_record(cubics[j - 1]))
            else:
                A, B, C, D = pieces[j - 1]
                record.update({'representation': 'exp_local',
                               'A': float(A), 'B': float(B),
                               'C': float(C), 'D': float(D)})
            records.append(record)
        return records


@dataclass(frozen=True)
class TanhSpline2:
    """
    C2 tanh-form spline

    pieces[j-1] = (p0, p1, q0, q1) in global x on interval j; rows of
    intervals written out as cubics may be NaN. node_form[j-1] holds
    (t_{j-1}, rho t_j, G_{j-1}, rho G_j) with G = t'' + 2a tanh(ax) t' and
    rho = cosh(a x_j)/cosh(a x_{j-1}); it is derived from pieces when omitted.
    """
    alpha: float
    partition: Partition
    pieces: np.ndarray
    node_second_derivs: np.ndarray
    node_form: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.node_form is None:
            object.__setattr__(self, 'node_form', _node_form_from_pieces(self))

    @property
    def order(self) -> int:
        return 2

    @property
    def max_derivative(self) -> int:
        return 3

    @property
    def limit_mask(self) -> np.ndarray:
        return self.alpha * self.partition.widths < CUBIC_LIMIT_THRESHOLD

    def node_values(self) -> np.ndarray:
        x = self.partition.nodes
        rho = np.asarray(cosh_ratio(self.alpha * x[-1], self.alpha * x[-2]))
        return np.append(self.node_form[:, 0], self.node_form[-1, 1] / rho)

    def evaluate(self, x, deriv: int = 0):
        return eval2(self, x, deriv)

    def to_records(self) -> list:
        nodes = self.partition.nodes
        y = self.node_values()
        tpp = self.node_second_derivs
        cubics = _cubic_from_ends(y[:-1], y[1:], tpp[:-1], tpp[1:], self.partition.widths)
        limit = self.limit_mask
        records = []
        for j, (p0, p1, q0, q1) in enumerate(self.pieces, start=1):
            record = {'interval': j, 'x0': float(nodes[j - 1]), 'x1': float(nodes[j])}
            if limit[j - 1]:
                record.update(_cubic_record(cubics[j - 1]))
            else:
                record.update({'representation': 'tanh',
                               'p0': float(p0), 'p1': float(p1),
                               'q0': float(q0), 'q1': float(q1)})
            records.append(record)
        return records


def _cubic_from_ends(y0, y1, s0, s1, h) -> np.ndarray:
    """Local cubic coefficients from end values and end second derivatives"""
    return np.column_stack([
        y0,
        (y1 - y0) / h - h * (2.0 * s0 + s1) / 6.0,
        0.5 * s0,
        (s1 - s0) / (6.0 * h),
    ])


def _cubic_record(coefficients) -> dict:
    c0, c1, c2, c3 = coefficients
    return {'representation': 'cubic_local',
            'c0': float(c0), 'c1': float(c1), 'c2': float(c2), 'c3': float(c3)}


# =============================================================================
# Node form
# =============================================================================

def _regime(alpha: float, h):
    """Series mask and a safe denominator argument for the closed forms"""
    beta = alpha * h
    small = beta < SERIES_RADIUS
    return beta, small, np.where(small, 1.0, beta)


def _sigma(alpha: float, h, v, deriv: int):
    """Derivative `deriv` of sinh(a v)/sinh(a h) with respect to v"""
    beta, small, b = _regime(alpha, h)
    x = alpha * v
    z = np.where(small, 0.0, x)
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        S = np.asarray(sinhc(beta))
        if deriv % 2 == 0:
            near = v * np.asarray(sinhc(x)) / (h * S)
            far = np.asarray(stable_sinh_ratio(z, b))
        else:
            near = np.cosh(x) / (h * S)
            far = alpha * np.asarray(stable_cosh_sinh_ratio(z, b))
    return alpha ** (deriv - deriv % 2) * np.where(small, near, far)


def _phi(alpha: float, h, u, deriv: int):
    """
    Derivative `deriv` of phi, where (D^2 - a^2) phi = sinh(a u)/sinh(a h)
    and phi(0) = phi(h) = 0

    As alpha -> 0, phi -> u (u^2 - h^2) / (6h).
    """
    if deriv >= 2:
        return _sigma(alpha, h, u, deriv - 2) + alpha * alpha * _phi(alpha, h, u, deriv - 2)
    beta, small, b = _regime(alpha, h)
    x = alpha * u
    z = np.where(small, 0.0, x)
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        S = np.asarray(sinhc(beta))
        Ke = np.asarray(kernel_e(beta))
        ratio_c = np.asarray(stable_cosh_sinh_ratio(z, b))
        ratio_s = np.asarray(stable_sinh_ratio(z, b))
        b_coth = b / np.tanh(b)
        if deriv == 0:
            near = (u / h) * (u * u * np.asarray(kernel_e(x)) * S
                              - h * h * Ke * np.asarray(sinhc(x))) / (2.0 * S * S)
            far = (z * ratio_c - b_coth * ratio_s) / (2.0 * alpha * alpha)
        else:
            near = ((u * u / h) * np.asarray(sinhc(x)) * S - h * Ke * np.cosh(x)) / (2.0 * S * S)
            far = (ratio_c * (1.0 - b_coth) + z * ratio_s) / (2.0 * alpha)
    return np.where(small, near, far)


def node_form_value(alpha: float, h, ends, u, deriv: int = 0):
    """Derivative `deriv` at local u of the pieces fixed by ends rows (y0, y1, g0, g1)"""
    h = np.asarray(h, dtype=float)
    u = np.asarray(u, dtype=float)
    y0, y1, g0, g1 = np.asarray(ends, dtype=float).T
    mirror = h - u
    sign = -1.0 if deriv % 2 else 1.0
    return (sign * (y0 * _sigma(alpha, h, mirror, deriv) + g0 * _phi(alpha, h, mirror, deriv))
            + y1 * _sigma(alpha, h, u, deriv) + g1 * _phi(alpha, h, u, deriv))


def interval_weights(h, alpha: float) -> IntervalWeights:
    """End-slope weights of the node form, stable for every alpha*h"""
    h = np.asarray(h, dtype=float)
    beta, small, b = _regime(alpha, h)
    e = np.exp(-b)
    e2 = e * e
    om = -np.expm1(-2.0 * b)
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        S = np.asarray(sinhc(beta))
        ke = np.where(small, np.asarray(kernel_e(beta)) / (S * S),
                      2.0 * e * (b * (1.0 + e2) - om) / (b * om * om))
        kb = np.where(small, np.asarray(kernel_b(beta)) / (S * S),
                      (om * (1.0 + e2) - 4.0 * b * e2) / (b * om * om))
        w = np.where(small, 1.0 / S, 2.0 * b * e / om)
    return IntervalWeights(w=w, tau=alpha * np.tanh(0.5 * beta),
                           mu=0.5 * h * kb, nu=0.5 * h * ke)


def exp_coefficients(alpha: float, h, ends) -> np.ndarray:
    """(A, B, C, D) of each piece in the basis e^{-au}, u e^{-au}, e^{au}, u e^{au}"""
    h = np.asarray(h, dtype=float)
    y0, y1, g0, g1 = np.asarray(ends, dtype=float).T
    e = np.exp(-alpha * h)
    om = -np.expm1(-2.0 * alpha * h)
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        csch = 2.0 * e / om
        up = 2.0 / om
        down = 2.0 * e * e / om
        cross = h * (g1 * 2.0 * e * (1.0 + e * e) / (om * om) - g0 * csch * csch) / (4.0 * alpha)
        return np.column_stack([
            0.5 * (y0 * up - y1 * csch) + cross,
            (g1 * csch - g0 * up) / (4.0 * alpha),
            0.5 * (y1 * csch - y0 * down) - cross,
            (g1 * csch - g0 * down) / (4.0 * alpha),
        ])


# =============================================================================
# Assembly
# =============================================================================

def interval_slope_coefficients(h, alpha: float, u0, u1) -> SlopeCoefficients:
    """
    Slope coefficients of the tanh family on intervals [u0, u1]

    With beta = alpha h, T_i = tanh(alpha u_i), rho = cosh(alpha u0)/cosh(alpha u1)
    and den = sinhc(beta) sech(alpha u0) sech(alpha u1) + T_0 T_1:

        L10 =  h K rho / (2 den)          L11 =  h (K2 + beta T_0 K3) / (2 den)
        L00 = -h (K2 - beta T_1 K3) / (2 den)    L01 = -h K / (2 rho den)

    K, K2, K3 are kernel_e, kernel_b, kernel_c at beta. As alpha -> 0 these
    tend to h/6, h/3, -h/3, -h/6.
    """
    h = np.asarray(h, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    beta = alpha * h
    t0 = np.tanh(alpha * u0)
    t1 = np.tanh(alpha * u1)
    lc0 = np.asarray(log_cosh(alpha * u0))
    lc1 = np.asarray(log_cosh(alpha * u1))
    rho = np.asarray(cosh_ratio(alpha * u0, alpha * u1))

    with np.errstate(over='ignore', invalid='ignore'):
        spread = np.asarray(sinhc(beta)) * np.exp(-(lc0 + lc1))
        product = t0 * t1
        den = spread + product
        cancellation = (np.abs(spread) + np.abs(product)) / np.abs(den)

        K = np.asarray(kernel_e(beta))
        K2 = np.asarray(kernel_b(beta))
        K3 = np.asarray(kernel_c(beta))
        half = h / (2.0 * den)
        l10 = half * K * rho
        l11 = half * (K2 + beta * t0 * K3)
        l00 = -half * (K2 - beta * t1 * K3)
        l01 = -half * K / rho

    return SlopeCoefficients(l00=l00, l01=l01, l10=l10, l11=l11,
                             den=den, cancellation=cancellation)


def _sech(z):
    return np.exp(-np.asarray(log_cosh(z)))


def _node_slopes(partition: Partition, y: np.ndarray) -> np.ndarray:
    x = partition.nodes
    return np.asarray(divided_difference(x[:-1], x[1:], y[:-1], y[1:]), dtype=float).reshape(-1)


def assemble_t2_system(partition: Partition,
                       values: Union[DataSet, np.ndarray],
                       alpha: Union[float, TensionParam],
                       end: EndCondition) -> TridiagonalSystem:
    """
    Assemble the tridiagonal system for t''_0..t''_N

    Interior rows j = 1..N-1:
        a_j = L10^(j),  b_j = L11^(j) - L00^(j+1),  c_j = -L01^(j+1),
        d_j = D_{j+1} - D_j
    Type I rows:  -L00 t''_0 - L01 t''_1 = D_1 - y'_0,  L10 t''_{N-1} + L11 t''_N = y'_N - D_N
    Type II/III rows: t''_0 = y''_0, t''_N = y''_N (zeros for Type II).
    Hyperbolic rows constrain (cosh t)'' instead, through t' at the ends.

    A single interval gives a 2x2 that is solved directly, so the
    dominance check applies to N >= 2 only.

    Raises:
        TensionTooLarge: coefficients non-finite or dominance margin <= 0
    """
    tension = as_tension(alpha).check(partition)
    data = as_dataset(partition, values)
    end = end.resolve(data)
    a = tension.alpha
    x = partition.nodes
    h = partition.widths
    y = data.values
    n_int = partition.n_intervals

    slopes = _node_slopes(partition, y)
    coeff = interval_slope_coefficients(h, a, x[:-1], x[1:])

    if not np.all(np.isfinite(coeff.den)) or np.any(coeff.den == 0.0):
        raise TensionTooLarge("interval denominator vanished; local tanh system singular")
    worst = float(np.max(coeff.cancellation))
    if worst > CANCELLATION_WARNING:
        logger.warning("Cancellation %.3g in interval denominator (interval straddles 0?)", worst)

    sub = np.zeros(n_int)
    diag = np.zeros(n_int + 1)
    sup = np.zeros(n_int)
    rhs = np.zeros(n_int + 1)

    sub[:-1] = coeff.l10[:-1]
    diag[1:-1] = coeff.l11[:-1] - coeff.l00[1:]
    sup[1:] = -coeff.l01[1:]
    rhs[1:-1] = slopes[1:] - slopes[:-1]

    left, right = end.payload()
    if end.kind is EndType.TYPE_I:
        diag[0] = -coeff.l00[0]
        sup[0] = -coeff.l01[0]
        rhs[0] = slopes[0] - left
        sub[-1] = coeff.l10[-1]
        diag[-1] = coeff.l11[-1]
        rhs[-1] = right - slopes[-1]
    elif end.hyperbolic:
        ta, tb = np.tanh(a * x[0]), np.tanh(a * x[-1])
        diag[0] = 1.0 + 2.0 * a * ta * coeff.l00[0]
        sup[0] = 2.0 * a * ta * coeff.l01[0]
        rhs[0] = left * _sech(a * x[0]) - a * a * y[0] - 2.0 * a * ta * slopes[0]
        sub[-1] = 2.0 * a * tb * coeff.l10[-1]
        diag[-1] = 1.0 + 2.0 * a * tb * coeff.l11[-1]
        rhs[-1] = right * _sech(a * x[-1]) - a * a * y[-1] - 2.0 * a * tb * slopes[-1]
    else:
        diag[0] = 1.0
        rhs[0] = left
        diag[-1] = 1.0
        rhs[-1] = right

    system = TridiagonalSystem(sub=sub, diag=diag, sup=sup, rhs=rhs)
    if not system.is_finite():
        raise TensionTooLarge("non-finite tridiagonal coefficients")
    if system.size == 2:
        logger.debug("Assembled single-interval 2x2 system")
        return system
    margin = system.dominance_margin
    if margin <= 0.0:
        raise TensionTooLarge(
            f"diagonal dominance lost at alpha={a:g}",
            dominance_margin=margin)
    logger.debug("Assembled %d-row system, dominance margin %.6g", system.size, margin)
    return system


def assemble_s2_system(partition: Partition,
                       values: Union[DataSet, np.ndarray],
                       alpha: Union[float, TensionParam],
                       end: EndCondition) -> TridiagonalSystem:
    """
    Assemble the tridiagonal system for g_j = s''(x_j) - a^2 y_j

    Interior rows j = 1..N-1:
        nu_j g_{j-1} + (mu_j + mu_{j+1}) g_j + nu_{j+1} g_{j+1}
            = w_{j+1} D_{j+1} - w_j D_j - (tau_j + tau_{j+1}) y_j
    Type I rows:  mu_1 g_0 + nu_1 g_1 = w_1 D_1 - tau_1 y_0 - y'_0
                  nu_N g_{N-1} + mu_N g_N = y'_N - w_N D_N - tau_N y_N
    Type II/III rows: g_0 = y''_0 - a^2 y_0, g_N = y''_N - a^2 y_N.

    Raises:
        TensionTooLarge: coefficients non-finite or dominance margin <= 0
    """
    tension = as_tension(alpha).check(partition)
    data = as_dataset(partition, values)
    end = end.resolve(data)
    a = tension.alpha
    y = data.values
    n_int = partition.n_intervals

    weights = interval_weights(partition.widths, a)
    wd = weights.w * _node_slopes(partition, y)
    tau, mu, nu = weights.tau, weights.mu, weights.nu

    sub = np.zeros(n_int)
    diag = np.zeros(n_int + 1)
    sup = np.zeros(n_int)
    rhs = np.zeros(n_int + 1)

    sub[:-1] = nu[:-1]
    diag[1:-1] = mu[:-1] + mu[1:]
    sup[1:] = nu[1:]
    rhs[1:-1] = wd[1:] - wd[:-1] - (tau[:-1] + tau[1:]) * y[1:-1]

    left, right = end.payload()
    if end.kind is EndType.TYPE_I:
        diag[0] = mu[0]
        sup[0] = nu[0]
        rhs[0] = wd[0] - tau[0] * y[0] - left
        sub[-1] = nu[-1]
        diag[-1] = mu[-1]
        rhs[-1] = right - wd[-1] - tau[-1] * y[-1]
    else:
        diag[0] = 1.0
        rhs[0] = left - a * a * y[0]
        diag[-1] = 1.0
        rhs[-1] = right - a * a * y[-1]

    system = TridiagonalSystem(sub=sub, diag=diag, sup=sup, rhs=rhs)
    if not system.is_finite():
        raise TensionTooLarge("non-finite tridiagonal coefficients")
    margin = system.dominance_margin
    if margin <= 0.0:
        raise TensionTooLarge(
            f"diagonal dominance lost at alpha={a:g}",
            dominance_margin=margin)
    logger.debug("Assembled %d-row s2 system, dominance margin %.6g", system.size, margin)
    return system


def thomas_solve(system: TridiagonalSystem) -> np.ndarray:
    """
    Pivot-free forward elimination and back substitution

    Raises:
        NotDominant: dominance margin <= 0
    """
    margin = system.dominance_margin
    if margin <= 0.0:
        raise NotDominant("refusing pivot-free elimination on a system without diagonal dominance",
                          dominance_margin=margin)
    n = system.size
    a = np.concatenate([[0.0], system.sub])
    b = system.diag
    c = np.concatenate([system.sup, [0.0]])
    d = system.rhs

    cp = np.zeros(n)
    dp = np.zeros(n)
    cp[0] = c[0] / b[0]
    dp[0] = d[0] / b[0]
    for i in range(1, n):
        pivot = b[i] - a[i] * cp[i - 1]
        cp[i] = c[i] / pivot
        dp[i] = (d[i] - a[i] * dp[i - 1]) / pivot

    solution = np.zeros(n)
    solution[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        solution[i] = dp[i] - cp[i] * solution[i + 1]
    return solution


def solve_pair(system: TridiagonalSystem) -> np.ndarray:
    """
    Cramer's rule for a two-row system

    Raises:
        TensionTooLarge: the 2x2 is singular
    """
    (b0, b1), c0, a1 = system.diag, system.sup[0], system.sub[0]
    d0, d1 = system.rhs
    det = b0 * b1 - c0 * a1
    if not np.isfinite(det) or abs(det) <= LOCAL_DETERMINANT_FLOOR * (abs(b0 * b1) + abs(c0 * a1)):
        raise TensionTooLarge("single-interval end rows are singular")
    return np.array([(d0 * b1 - c0 * d1) / det, (b0 * d1 - a1 * d0) / det])


# =============================================================================
# Reconstruction
# =============================================================================

def reconstruct_t2(partition: Partition,
                   values: Union[DataSet, np.ndarray],
                   alpha: Union[float, TensionParam],
                   tpp) -> TanhSpline2:
    """
    Build the tanh spline from node second derivatives

    The end slopes follow from the slope coefficients, which fixes the node
    form of each piece. The global p, q coefficients come from the 2x2
    matching D^2[q tanh(a.)] to t'' at both ends; they are kept for
    reporting only and are NaN on intervals written out as cubics.

    Raises:
        LengthMismatch: tpp not of length N+1
        SingularLocalSystem: the 2x2 for q degenerates
        Overflow: a piece is not representable
    """
    tension = as_tension(alpha).check(partition)
    data = as_dataset(partition, values)
    tpp = np.asarray(tpp, dtype=float).ravel()
    if len(tpp) != len(partition.nodes):
        raise LengthMismatch(f"expected {len(partition.nodes)} second derivatives, got {len(tpp)}")

    a = tension.alpha
    u0 = partition.nodes[:-1]
    u1 = partition.nodes[1:]
    h = partition.widths
    beta = a * h
    y = data.values
    coeff = interval_slope_coefficients(h, a, u0, u1)

    determinant = beta * beta * coeff.den
    scale = 1.0 + data.sup_norm + float(np.max(np.abs(tpp)))
    small_tension = a * (partition.b - partition.a) < SMALL_TENSION
    if not small_tension and np.any(np.abs(determinant) < LOCAL_DETERMINANT_FLOOR * scale):
        j = int(np.argmin(np.abs(determinant))) + 1
        raise SingularLocalSystem(f"local 2x2 singular on interval {j} (alpha*h = {beta[j - 1]:.3g})")

    limit = beta < CUBIC_LIMIT_THRESHOLD
    pieces = _global_tanh_pieces(a, partition, y, tpp, determinant)
    broken = ~np.all(np.isfinite(pieces), axis=1)
    if np.any(broken & ~limit):
        raise Overflow("cosh^2 at a node overflows")
    pieces[broken] = np.nan

    slopes = _node_slopes(partition, y)
    left = slopes + coeff.l00 * tpp[:-1] + coeff.l01 * tpp[1:]
    right = slopes + coeff.l10 * tpp[:-1] + coeff.l11 * tpp[1:]
    rho = np.asarray(cosh_ratio(a * u1, a * u0))
    with np.errstate(over='ignore', invalid='ignore'):
        node_form = np.column_stack([
            y[:-1],
            rho * y[1:],
            tpp[:-1] + 2.0 * a * np.tanh(a * u0) * left,
            rho * (tpp[1:] + 2.0 * a * np.tanh(a * u1) * right),
        ])
    if not np.all(np.isfinite(node_form)):
        raise Overflow(f"cosh ratio across an interval overflows (max alpha*h = {float(np.max(beta)):.6g})")

    return TanhSpline2(alpha=a, partition=partition, pieces=pieces,
                       node_second_derivs=tpp.copy(), node_form=node_form)


def _global_tanh_pieces(a: float, partition: Partition, y, tpp, determinant) -> np.ndarray:
    u0 = partition.nodes[:-1]
    u1 = partition.nodes[1:]
    h = partition.widths
    beta = a * h
    t0 = np.tanh(a * u0)
    t1 = np.tanh(a * u1)
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        w0 = h * tpp[:-1] / np.asarray(sech_squared(a * u0))
        w1 = h * tpp[1:] / np.asarray(sech_squared(a * u1))
        scale = 2.0 * a * determinant
        Q0 = (w0 * (1.0 - beta * t1) - w1) / scale
        Q1 = (w0 - (1.0 + beta * t0) * w1) / scale
        q1 = (Q1 - Q0) / h
        q0 = Q0 - q1 * u0
        P0 = y[:-1] - Q0 * t0
        P1 = y[1:] - Q1 * t1
        p1 = (P1 - P0) / h
        p0 = P0 - p1 * u0
    return np.column_stack([p0, p1, q0, q1])


def _node_form_from_pieces(spline: TanhSpline2) -> np.ndarray:
    """Node form of tanh pieces given in global coordinates"""
    a = spline.alpha
    x0 = spline.partition.nodes[:-1]
    x1 = spline.partition.nodes[1:]
    pieces = spline.pieces

    def at(x, deriv):
        return _global_tanh(a, pieces, x, deriv)

    rho = np.asarray(cosh_ratio(a * x1, a * x0))
    return np.column_stack([
        at(x0, 0),
        rho * at(x1, 0),
        at(x0, 2) + 2.0 * a * np.tanh(a * x0) * at(x0, 1),
        rho * (at(x1, 2) + 2.0 * a * np.tanh(a * x1) * at(x1, 1)),
    ])


def to_exp_representation(t: TanhSpline2) -> ExpSpline2:
    """
    Rewrite cosh(a x) t(x) as a polyhyperbolic spline

    Raises:
        Overflow: alpha * max|x| exceeds the cosh guard
    """
    partition = t.partition
    a = t.alpha
    reach = a * max(abs(partition.a), abs(partition.b))
    if reach > COSH_GUARD:
        raise Overflow(f"alpha*max|x| = {reach:.6g} exceeds {COSH_GUARD:g}")

    with np.errstate(over='ignore', invalid='ignore'):
        ends = t.node_form * np.cosh(a * partition.nodes[:-1])[:, None]
    if not np.all(np.isfinite(ends)):
        raise Overflow("cosh-scaled node values not representable")
    return ExpSpline2(alpha=a, partition=partition, ends=ends)


# =============================================================================
# Fitting
# =============================================================================

def fit_t2(partition: Partition,
           values: Union[DataSet, np.ndarray],
           alpha: Union[float, TensionParam],
           end: EndCondition) -> TanhSpline2:
    """Assemble, solve and reconstruct the C2 tanh spline"""
    data = as_dataset(partition, values)
    system = assemble_t2_system(partition, data, alpha, end)
    tpp = solve_pair(system) if system.size == 2 else thomas_solve(system)
    logger.debug("t2 solve residual %.3g", system.residual(tpp))
    return reconstruct_t2(partition, data, alpha, tpp)


def bridge_data(partition: Partition,
                values: Union[DataSet, np.ndarray],
                alpha: Union[float, TensionParam],
                end: EndCondition) -> Tuple[DataSet, EndCondition]:
    """
    Data and end condition of the tanh problem equivalent to a polyhyperbolic fit

    y~_j = sech(a x_j) y_j. Type I slopes become t' = sech(a x)(y' - a tanh(a x) y);
    Types II and III keep their second-derivative payloads as hyperbolic rows.
    """
    tension = as_tension(alpha).check(partition)
    data = as_dataset(partition, values)
    end = end.resolve(data)
    a = tension.alpha
    x = partition.nodes
    sech = _sech(a * x)
    scaled = sech * data.values

    if end.kind is EndType.TYPE_I:
        left, right = end.payload()
        t_end = EndCondition.type_i(
            sech[0] * (left - a * np.tanh(a * x[0]) * data.values[0]),
            sech[-1] * (right - a * np.tanh(a * x[-1]) * data.values[-1]))
    else:
        t_end = EndCondition(end.kind, end.left, end.right, hyperbolic=True)

    bridged = make_dataset(partition, scaled, left_end=t_end.left, right_end=t_end.right)
    return bridged, t_end


def fit_s2(partition: Partition,
           values: Union[DataSet, np.ndarray],
           alpha: Union[float, TensionParam],
           end: EndCondition) -> ExpSpline2:
    """C2 polyhyperbolic spline from the tridiagonal system for s'' - a^2 s at the nodes"""
    data = as_dataset(partition, values)
    system = assemble_s2_system(partition, data, alpha, end)
    g = thomas_solve(system)
    logger.debug("s2 solve residual %.3g", system.residual(g))
    a = as_tension(alpha).alpha
    y = data.values
    ends = np.column_stack([y[:-1], y[1:], g[:-1], g[1:]])
    return ExpSpline2(alpha=a, partition=partition, ends=ends)


# =============================================================================
# Evaluation
# =============================================================================

def _global_tanh(a: float, pieces: np.ndarray, x: np.ndarray, deriv: int) -> np.ndarray:
    """Tanh pieces in global coordinates, row i of pieces paired with x[i]"""
    p0, p1, q0, q1 = pieces.T
    T = np.tanh(a * x)
    S2 = np.asarray(sech_squared(a * x))
    q = q0 + q1 * x
    if deriv == 0:
        return p0 + p1 * x + q * T
    if deriv == 1:
        return p1 + q1 * T + a * q * S2
    if deriv == 2:
        return 2.0 * a * q1 * S2 - 2.0 * a * a * S2 * T * q
    return -6.0 * a * a * q1 * S2 * T - 2.0 * a ** 3 * S2 * (S2 - 2.0 * T * T) * q


# Binomial rows for the Leibniz rule up to the third derivative
_LEIBNIZ = ((1,), (1, 1), (1, 2, 1), (1, 3, 3, 1))


def _eval_tanh(spline: TanhSpline2, x: np.ndarray, j: np.ndarray, deriv: int) -> np.ndarray:
    a = spline.alpha
    x0 = spline.partition.nodes[j - 1]
    h = spline.partition.widths[j - 1]
    ends = spline.node_form[j - 1]
    u = x - x0
    T = np.tanh(a * x)
    r = np.asarray(cosh_ratio(a * x0, a * x))
    # k-th derivative of cosh(a x_{j-1})/cosh(a x), divided by itself
    factors = (1.0, -a * T, a * a * (2.0 * T * T - 1.0), a ** 3 * T * (5.0 - 6.0 * T * T))
    total = np.zeros_like(x)
    for k, weight in enumerate(_LEIBNIZ[deriv]):
        total = total + weight * factors[k] * node_form_value(a, h, ends, u, deriv - k)
    return r * total


def _eval_exp(spline: ExpSpline2, x: np.ndarray, j: np.ndarray, deriv: int) -> np.ndarray:
    u = x - spline.partition.nodes[j - 1]
    return node_form_value(spline.alpha, spline.partition.widths[j - 1], spline.ends[j - 1], u, deriv)


def eval2(spline: Union[TanhSpline2, ExpSpline2], x, deriv: int = 0):
    """
    Evaluate a k=2 spline or one of its first three derivatives

    Interior nodes take the right piece.

    Raises:
        OutOfDomain: x outside [x_0, x_N]
        ValueError: deriv not in 0..3
    """
    if deriv not in (0, 1, 2, 3):
        raise ValueError(f"k=2 splines support deriv 0..3, got {deriv}")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    j = spline.partition.locate(x, side='right')
    if isinstance(spline, TanhSpline2):
        result = _eval_tanh(spline, x, j, deriv)
    else:
        result = _eval_exp(spline, x, j, deriv)
    if scalar:
        return float(result[0])
    return result
