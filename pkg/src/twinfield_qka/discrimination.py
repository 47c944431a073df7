"""Minimum-error discrimination of the correlated vs anti-correlated mixtures.

Two independent routes to the node-level error probability are exposed side
by side and deliberately not merged:

* ``helstrom_error`` evaluates 1/2 (1 - |1/2 (rho1 - rho0)|_1) numerically
  on explicit density operators.  Applied to the trace-1 mixtures from
  :func:`twinfield_qka.coherent.correlated_mixture` it yields exp(-4 mu)/2.
* ``qmin_pair_closed`` evaluates the analytic shortcut (3 + exp(-4 mu))/8
  published for this protocol family.

The two do not coincide for the mixtures as constructed here; consumers get
both values in :class:`DiscriminationResult` so the gap stays visible
instead of being silently adjudicated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .coherent import correlated_mixture
from .errors import ValidationError
from .linalg import check_density, trace_norm

COMPOSE_MODES = ("node", "xor")


@dataclass(frozen=True)
class DiscriminationResult:
    """Error probabilities for one intensity: numeric bound and closed forms."""

    mu: float
    q_helstrom: float
    q_closed_pair: float
    q_closed_triple: float


def helstrom_error(rho0, rho1) -> float:
    """Minimum error probability to distinguish two equiprobable states.

    Returns 1/2 (1 - |1/2 (rho1 - rho0)|_1), computed from the eigenvalues
    of the difference.  Both inputs must be trace-1 density operators.
    """
    r0 = check_density(rho0)
    r1 = check_density(rho1)
    q = 0.5 * (1.0 - trace_norm(0.5 * (r1 - r0)))
    return float(min(max(q, 0.0), 0.5))


def qmin_pair_closed(mu: float) -> float:
    """Closed-form single-node error (3 + exp(-4 mu))/8."""
    if mu < 0:
        raise ValidationError(f"mean photon number must be >= 0, got {mu!r}")
    return (math.exp(-4.0 * mu) + 3.0) / 8.0


def qmin_pair_closed_hyperbolic(mu: float) -> float:
    """Equivalent hyperbolic form 1/2 (1 - exp(-2 mu) cosh(mu) sinh(mu))."""
    if mu < 0:
        raise ValidationError(f"mean photon number must be >= 0, got {mu!r}")
    return 0.5 * (1.0 - math.exp(-2.0 * mu) * math.cosh(mu) * math.sinh(mu))


def qmin_triple_closed(mu: float) -> float:
    """Two-node (three-party) error 1 - (1 - q_pair)^2."""
    q = qmin_pair_closed(mu)
    return 1.0 - (1.0 - q) ** 2


def qmin_triple_closed_expanded(mu: float) -> float:
    """Equivalent expanded form (39 + 10 exp(-4 mu) - exp(-8 mu))/64."""
    if mu < 0:
        raise ValidationError(f"mean photon number must be >= 0, got {mu!r}")
    return (-math.exp(-8.0 * mu) + 10.0 * math.exp(-4.0 * mu) + 39.0) / 64.0


def compose_error(q1: float, q2: float, mode: str) -> float:
    """Combine two error probabilities.

    mode 'node': probability that at least one of two independent nodes
    errs, 1 - (1-q1)(1-q2).  mode 'xor': probability that a parity built
    from two noisy bits is wrong, q1(1-q2) + q2(1-q1).  The caller must
    pick the mode explicitly; there is no default.
    """
    for q in (q1, q2):
        if not 0.0 <= q <= 1.0:
            raise ValidationError(f"error probability must lie in [0, 1], got {q!r}")
    if mode == "node":
        return 1.0 - (1.0 - q1) * (1.0 - q2)
    if mode == "xor":
        return q1 * (1.0 - q2) + q2 * (1.0 - q1)
    raise ValidationError(f"compose mode must be one of {COMPOSE_MODES}, got {mode!r}")


def discriminate(mu: float) -> DiscriminationResult:
    """Evaluate the numeric bound and both closed forms at one intensity."""
    q_num = helstrom_error(correlated_mixture(+1, mu), correlated_mixture(-1, mu))
    return DiscriminationResult(
        mu=mu,
        q_helstrom=q_num,
        q_closed_pair=qmin_pair_closed(mu),
        q_closed_triple=qmin_triple_closed(mu),
    )
