"""Adaptive one-dimensional quadrature with algebraic endpoint singularities.

Every Abel-type transform in the package reduces to integrals of the form

    integral_a^b (t - a)^sl (b - t)^sr g(t) dt

with a smooth (or piecewise smooth) ``g``.  Singular endpoints are removed with
the power substitution ``t = a + v**q`` (``q = 2`` for half-integer exponents),
after which a vectorised, deterministic Gauss-Kronrod (7, 15) bisection scheme
integrates the transformed panels.  Semi-infinite ranges are handled by
doubling windows with a geometric tail estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import AccuracyError, ArgumentError

__all__ = [
    "SingularIntegrand",
    "adaptive_integrate",
    "integrate_singular",
    "integrate_semi_infinite",
    "integrate_panels",
    "DEFAULT_REL_TOL",
    "ABS_TOL_FLOOR",
]

DEFAULT_REL_TOL = 1e-9
ABS_TOL_FLOOR = 1e-12

_EPS = np.finfo(float).eps

# Kronrod 15-point abscissae (positive half, descending) and weights, with the
# embedded 7-point Gauss weights (QUADPACK constants).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes sit at odd positions of _XGK (indices 1, 3, 5, 7).
_GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_GWEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, lo, hi, owner=None):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * _NODES[None, :]
    if owner is None:
        fx = f(x.ravel())
    else:
        fx = f(x.ravel(), np.repeat(owner, _NODES.size))
    fx = np.asarray(fx, dtype=float).reshape(x.shape)
    kron = half * (fx @ _KWEIGHTS)
    gauss = half * (fx[:, _GAUSS_IDX] @ _GWEIGHTS)
    absk = np.abs(half) * (np.abs(fx) @ _KWEIGHTS)
    return kron, np.abs(kron - gauss), absk


def adaptive_integrate(f, lo, hi, owner=None, n_out=None, rel_tol=DEFAULT_REL_TOL,
                       abs_tol=ABS_TOL_FLOOR, max_panels=1 << 18, max_rounds=64,
                       with_owner=False):
    """Integrate a vectorised ``f`` over many panels at once.

    Panels ``[lo[i], hi[i]]`` contribute to output ``owner[i]``.  Each round
    evaluates every pending panel with G7-K15 and bisects those whose error
    exceeds their width-proportional share of the output's tolerance, so the
    refinement order never depends on anything but the data.  With
    ``with_owner=True``, ``f`` is called as ``f(x, owner_of_each_x)``.

    Returns
    -------
    (values, errors) : pair of arrays of length ``n_out``
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if owner is None:
        owner = np.zeros(lo.shape, dtype=np.intp)
    owner = np.atleast_1d(np.asarray(owner, dtype=np.intp))
    if n_out is None:
        n_out = int(owner.max()) + 1 if owner.size else 1
    keep = hi > lo
    lo, hi, owner = lo[keep], hi[keep], owner[keep]
    width = np.bincount(owner, weights=hi - lo, minlength=n_out)
    value = np.zeros(n_out)
    error = np.zeros(n_out)
    for _ in range(max_rounds):
        if lo.size == 0:
            return value, error
        kron, err, absk = _gk15(f, lo, hi, owner if with_owner else None)
        estimate = value + np.bincount(owner, weights=np.where(np.isfinite(kron), kron, 0.0),
                                       minlength=n_out)
        tol = np.maximum(rel_tol * np.abs(estimate), abs_tol)
        share = tol[owner] * (hi - lo) / width[owner]
        finite = np.isfinite(kron) & np.isfinite(err)
        ok = finite & ((err <= share) | (err <= 50.0 * _EPS * absk)
                       | (hi - lo <= 64.0 * _EPS * np.maximum(np.abs(lo), np.abs(hi))))
        if ok.any():
            value += np.bincount(owner[ok], weights=kron[ok], minlength=n_out)
            error += np.bincount(owner[ok], weights=err[ok], minlength=n_out)
        bad = ~ok
        if not bad.any():
            return value, error
        lo, hi, owner = lo[bad], hi[bad], owner[bad]
        if 2 * lo.size > max_panels:
            break
        mid = 0.5 * (lo + hi)
        lo, hi, owner = np.concatenate([lo, mid]), np.concatenate([mid, hi]), np.concatenate([owner, owner])
    kron, err, _ = _gk15(f, lo, hi, owner if with_owner else None) if lo.size else (np.zeros(0), np.zeros(0), None)
    best = value + np.bincount(owner, weights=np.nan_to_num(kron), minlength=n_out)
    raise AccuracyError("adaptive quadrature did not converge within budget",
                        estimate=best if n_out > 1 else float(best[0]),
                        error=float(np.sum(error) + np.nansum(err)))


def integrate_panels(f, edges, rel_tol=DEFAULT_REL_TOL, abs_tol=ABS_TOL_FLOOR):
    """Integrate ``f`` over consecutive panels ``edges[0] < edges[1] < ...``."""
    edges = np.asarray(edges, dtype=float)
    values, errors = adaptive_integrate(f, edges[:-1], edges[1:], rel_tol=rel_tol, abs_tol=abs_tol)
    return float(values[0]), float(errors[0])


@dataclass(frozen=True)
class SingularIntegrand:
    """An integrand on ``(a, b)`` with algebraic endpoint behaviour.

    By default ``core`` is the full integrand and the exponents only declare
    the ``(t - a)**left_exponent`` and ``(b - t)**right_exponent`` factors
    already present in it.  With ``factored=True`` the core is the smooth part
    and the power factors are applied here, from exact endpoint distances.
    """

    core: Callable
    left_exponent: float = 0.0
    right_exponent: float = 0.0
    factored: bool = False

    def __post_init__(self):
        for name in ("left_exponent", "right_exponent"):
            value = getattr(self, name)
            if not value > -1.0:
                raise ArgumentError(f"{name} must exceed -1 for integrability, got {value}")


def _needs_substitution(sigma):
    return sigma != 0.0 and not (sigma > 0.0 and float(sigma).is_integer())


def _substitution_power(sigma):
    # t = a + v^q turns (t-a)^sigma dt into q v^{q(1+sigma)-1} dv: smooth when
    # q(1+sigma) is an integer, otherwise at least C^1 once q(1+sigma) >= 2
    for q in range(2, 9):
        scaled = q * (1.0 + sigma)
        if abs(scaled - round(scaled)) < 1e-12:
            return q
    return max(2, int(math.ceil(2.0 / (1.0 + sigma))))


def _check_tol(rel_tol):
    if not 1e-14 < rel_tol < 1e-2:
        raise ArgumentError(f"rel_tol must lie in (1e-14, 1e-2), got {rel_tol}")


def _inner_breaks(breakpoints, lo, hi):
    if breakpoints is None:
        return np.zeros(0)
    bp = np.unique(np.asarray(breakpoints, dtype=float))
    return bp[(bp > lo) & (bp < hi)]


def _power(base, exponent):
    if exponent == 0.0:
        return 1.0
    return np.power(base, exponent)


def integrate_singular(integrand, a, b, rel_tol=DEFAULT_REL_TOL, breakpoints=None,
                       abs_tol=ABS_TOL_FLOOR):
    """Integrate over ``[a, b]`` removing algebraic endpoint singularities.

    Parameters
    ----------
    integrand : SingularIntegrand or callable
        A plain callable is treated as having no endpoint singularities.
    a, b : float
        Finite limits, ``a < b``.
    rel_tol : float
        Relative tolerance in ``(1e-14, 1e-2)``; ``abs_tol`` is the floor.
    breakpoints : sequence of float, optional
        Interior points where the integrand is not smooth (profile
        breakpoints).  They are mapped through the substitution so every panel
        is smooth in the transformed variable.

    Returns
    -------
    (value, err_est) : tuple of float
    """
    if not isinstance(integrand, SingularIntegrand):
        integrand = SingularIntegrand(integrand)
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ArgumentError(f"need finite a < b, got [{a}, {b}]")
    _check_tol(rel_tol)
    sl, sr = integrand.left_exponent, integrand.right_exponent
    core, factored = integrand.core, integrand.factored
    sub_left, sub_right = _needs_substitution(sl), _needs_substitution(sr)
    inner = _inner_breaks(breakpoints, a, b)

    def plain(t):
        val = core(t)
        if factored:
            val = val * _power(t - a, sl) * _power(b - t, sr)
        return val

    if not sub_left and not sub_right:
        edges = np.concatenate([[a], inner, [b]])
        return integrate_panels(plain, edges, rel_tol, abs_tol)

    if sub_left and sub_right:
        mid = 0.5 * (a + b)
        left_range, right_range = (a, mid), (mid, b)
    elif sub_left:
        left_range, right_range = (a, b), None
    else:
        left_range, right_range = None, (a, b)

    total, total_err = 0.0, 0.0
    if left_range is not None:
        q = _substitution_power(sl)
        lo, hi = left_range

        def g_left(v, q=q):
            t = a + v ** q
            jac = q * v ** (q - 1)
            if factored:
                return jac * _power(v, q * sl) * _power(b - t, sr) * core(t)
            return jac * core(t)

        bps = (_inner_breaks(inner, lo, hi) - a) ** (1.0 / q)
        edges = np.concatenate([[0.0], bps, [(hi - a) ** (1.0 / q)]])
        val, err = integrate_panels(g_left, edges, rel_tol, abs_tol if right_range is None else 0.5 * abs_tol)
        total += val
        total_err += err
    if right_range is not None:
        q = _substitution_power(sr)
        lo, hi = right_range

        def g_right(v, q=q):
            t = b - v ** q
            jac = q * v ** (q - 1)
            if factored:
                return jac * _power(t - a, sl) * _power(v, q * sr) * core(t)
            return jac * core(t)

        bps = np.sort((b - _inner_breaks(inner, lo, hi)) ** (1.0 / q))
        edges = np.concatenate([[0.0], bps, [(b - lo) ** (1.0 / q)]])
        val, err = integrate_panels(g_right, edges, rel_tol, abs_tol if left_range is None else 0.5 * abs_tol)
        total += val
        total_err += err
    return total, total_err


def integrate_semi_infinite(integrand, a, decay_hint=None, rel_tol=DEFAULT_REL_TOL,
                            breakpoints=None, abs_tol=ABS_TOL_FLOOR, max_windows=64):
    """Integrate over ``[a, inf)`` with a doubling-window tail estimate.

    Windows ``[a + w0 (2^k - 1), a + w0 (2^(k+1) - 1)]`` are integrated in
    turn.  The run stops once the window contributions decay geometrically and
    the extrapolated tail (or, with ``decay_hint = lam``, the exponential bound
    ``|g(T)| / lam``) falls below the tolerance.  A non-decaying sequence of
    windows raises :class:`AccuracyError`, which is how divergent integrals
    surface.

    ``integrand`` may be a :class:`SingularIntegrand` with a left exponent
    only; the first window then goes through :func:`integrate_singular`.
    """
    _check_tol(rel_tol)
    a = float(a)
    if decay_hint is not None and not decay_hint > 0:
        raise ArgumentError(f"decay_hint must be a positive rate, got {decay_hint}")
    singular = None
    if isinstance(integrand, SingularIntegrand):
        if integrand.right_exponent != 0.0:
            raise ArgumentError("a semi-infinite integrand cannot carry a right exponent")
        singular = integrand
        sl = integrand.left_exponent
        core = integrand.core
        if integrand.factored:
            def func(t):
                return core(t) * _power(t - a, sl)
        else:
            func = core
    else:
        func = integrand
    bps = None if breakpoints is None else np.asarray(breakpoints, dtype=float)
    width = 1.0 / decay_hint if decay_hint is not None else 1.0
    lo = a
    total, total_err = 0.0, 0.0
    history = []
    for k in range(max_windows):
        hi = lo + width
        if k == 0 and singular is not None:
            piece = SingularIntegrand(singular.core, singular.left_exponent, 0.0, singular.factored)
            val, err = integrate_singular(piece, lo, hi, rel_tol, bps, 0.5 * abs_tol)
        else:
            edges = np.concatenate([[lo], _inner_breaks(bps, lo, hi), [hi]])
            val, err = integrate_panels(func, edges, rel_tol, 0.5 * abs_tol)
        total += val
        total_err += err
        history.append(abs(val))
        if len(history) >= 3:
            prev = history[-2]
            if prev == 0.0 and history[-1] == 0.0:
                return total, total_err
            ratio = history[-1] / prev if prev > 0 else math.inf
            if ratio < 0.9:
                tail = history[-1] * ratio / (1.0 - ratio)
                if decay_hint is not None:
                    probe = np.abs(np.asarray(func(np.array([hi])), dtype=float))
                    tail = max(tail, float(probe[0]) / decay_hint)
                if tail <= max(rel_tol * abs(total), abs_tol):
                    return total, total_err + tail
        lo = hi
        width *= 2.0
    raise AccuracyError("no certified tail bound for the semi-infinite integral "
                        "(integrand does not decay fast enough)",
                        estimate=total, error=math.inf)


def gauss_legendre_panels(f, lo, hi, order=24, max_width=0.5):
    """Fixed-order Gauss-Legendre integrals of an entire function over many ranges.

    Each ``[lo[i], hi[i]]`` is cut into equal sub-panels no wider than
    ``max_width``; used where the integrand is analytic and an adaptive loop
    would only add overhead.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    span = hi - lo
    pieces = np.maximum(1, np.ceil(np.abs(span) / max_width)).astype(int)
    out = np.zeros(lo.shape)
    for count in np.unique(pieces):
        sel = pieces == count
        a_sel, h_sel = lo[sel], span[sel] / count
        acc = np.zeros(a_sel.shape)
        for j in range(count):
            left = a_sel + j * h_sel
            x = left[:, None] + 0.5 * h_sel[:, None] * (nodes[None, :] + 1.0)
            acc += 0.5 * h_sel * (np.asarray(f(x), dtype=float) @ weights)
        out[sel] = acc
    return out


def clip_breakpoints(values: Sequence[float], lo: float, hi: float) -> np.ndarray:
    """Sorted unique breakpoints strictly inside ``(lo, hi)``."""
    return _inner_breaks(values, lo, hi)
