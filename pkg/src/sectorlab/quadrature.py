"""Adaptive one- and two-dimensional quadrature on top of ``scipy.integrate.quad``.

Failures to reach tolerance never raise: the achieved error estimate is
returned with ``converged=False`` and a warning is logged.
"""

import logging
import math
import warnings
from collections.abc import Callable, Sequence
from typing import NamedTuple

from scipy.integrate import IntegrationWarning, quad

logger = logging.getLogger(__name__)

DEFAULT_EPSREL = 1e-8
DEFAULT_EPSABS = 1e-13
# Hard cap on the number of subintervals per adaptive pass.
DEFAULT_LIMIT = 200


class QuadResult(NamedTuple):
    """Outcome of an adaptive integration."""

    value: float
    abserr: float
    converged: bool


def integrate_1d(
    func: Callable[[float], float],
    a: float,
    b: float,
    *,
    points: Sequence[float] | None = None,
    epsrel: float = DEFAULT_EPSREL,
    epsabs: float = DEFAULT_EPSABS,
    limit: int = DEFAULT_LIMIT,
    quiet: bool = False,
) -> QuadResult:
    """Integrate ``func`` over ``[a, b]`` (infinite bounds allowed).

    Args:
        func: Scalar integrand.
        a: Lower bound.
        b: Upper bound.
        points: Optional interior breakpoints (finite bounds only).
        epsrel: Relative tolerance.
        epsabs: Absolute tolerance.
        limit: Maximum number of subintervals.
        quiet: Suppress the non-convergence warning (inner passes).

    Returns:
        QuadResult with the value, error estimate and convergence flag.
    """
    if a == b:
        return QuadResult(0.0, 0.0, True)
    kwargs: dict = {"epsrel": epsrel, "epsabs": epsabs, "limit": limit}
    if points and math.isfinite(a) and math.isfinite(b):
        lo, hi = min(a, b), max(a, b)
        inner = sorted({p for p in points if lo < p < hi})
        if inner:
            kwargs["points"] = inner
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IntegrationWarning)
        value, abserr = quad(func, a, b, **kwargs)
    converged = not any(issubclass(w.category, IntegrationWarning) for w in caught)
    if not converged and not quiet:
        logger.warning(
            f"Quadrature on [{a}, {b}] stopped at abserr={abserr:.3g} "
            f"(requested epsrel={epsrel:g})"
        )
    return QuadResult(float(value), float(abserr), converged)


def integrate_2d(
    func: Callable[[float, float], float],
    x0: float,
    x1: float,
    y0: float | Callable[[float], float],
    y1: float | Callable[[float], float],
    *,
    epsrel: float = DEFAULT_EPSREL,
    epsabs: float = DEFAULT_EPSABS,
    limit: int = DEFAULT_LIMIT,
) -> QuadResult:
    """Iterated adaptive integration of ``func(x, y)``.

    The inner bounds may depend on ``x``. Errors of the inner passes are
    accumulated into the reported estimate.
    """
    inner_err = 0.0
    inner_ok = True

    def _ybound(bound: float | Callable[[float], float], x: float) -> float:
        return bound(x) if callable(bound) else bound

    def _inner(x: float) -> float:
        nonlocal inner_err, inner_ok
        res = integrate_1d(
            lambda y: func(x, y),
            _ybound(y0, x),
            _ybound(y1, x),
            epsrel=epsrel,
            epsabs=epsabs,
            limit=limit,
            quiet=True,
        )
        inner_err = max(inner_err, res.abserr)
        inner_ok = inner_ok and res.converged
        return res.value

    outer = integrate_1d(_inner, x0, x1, epsrel=epsrel, epsabs=epsabs, limit=limit)
    if not inner_ok:
        logger.warning(f"Inner quadrature did not converge (max abserr={inner_err:.3g})")
    width = abs(x1 - x0) if math.isfinite(x1 - x0) else 1.0
    return QuadResult(
        outer.value, outer.abserr + inner_err * width, outer.converged and inner_ok
    )
