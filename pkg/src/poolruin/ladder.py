"""Ladder recursions for the running-maximum transform.

The running maximum up to an exponentially killed horizon decomposes into at
most ``m`` ladder steps, each the positive part of a claim-plus-carryover
minus an independent exponential.  Its transform therefore satisfies a
two-point recursion: level ``k`` references the previous level both at the
evaluation argument and at the fixed ladder rate ``nu_k``,

    F_k(x) = p_k + w_k * nu_k/(nu_k - x)
             * ( C_k(x) F_{k-1}(x) - (x/nu_k) C_k(nu_k) F_{k-1}(nu_k) ),

with a removable singularity at ``x = nu_k``.  The evaluator below runs the
recursion bottom-up over the argument set {alpha} + {nu_k}, memoizing per
level, in O(n^2) transform evaluations.  All values are carried as truncated
Taylor expansions so the singular branches and the moment jets fall out of
the same code path.

Three specializations are provided: the generic recursion over explicit
(nu, C, p0) data, the drift model (positive pure drifts, where the ladder
rate is lambda_n / r_n), and the general Levy model where each level is
additionally multiplied by the killed-maximum factor of its regime and
subordinator states switch to a division step without a fixed argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import KillingRequired, RegimeMismatch
from .model import (
    KilledRates,
    ModelSpec,
    exponent_series,
    inverse_exponent,
    killed_max_series,
)
from .seriesops import (
    ROOT_DIV_WINDOW,
    SeriesFn,
    Taylor,
    TransformJet,
    _root_div_order,
    div_by_linear_root,
    margin_for_shift,
    series_from_callable,
)

__all__ = [
    "GenericLadderSpec",
    "TransformJet",
    "pi_generic",
    "atom_at_zero",
    "pi_drift",
    "pi_levy",
    "pi_max",
    "ruin_transform",
    "pi_jet",
    "generic_spec_from_drift",
]

# Levels whose ladder rates sit within the root-division window of each
# other share one expansion anchor, and evaluation points inside the window
# of an anchor are computed there and re-centered once.  High-order
# expansions of these functions are only well conditioned at (or tightly
# around) their own removable singularities, so anchors must never chain
# across distinct nearby rates.
_SING_WINDOW = ROOT_DIV_WINDOW


@dataclass(frozen=True)
class _Prop1Level:
    nu: float
    clst: SeriesFn
    p0: float
    w: float
    post: Optional[SeriesFn] = None


@dataclass(frozen=True)
class _SubLevel:
    """Division step for an a.s. nondecreasing regime:
    F_k(x) = (beta + lam_circ * C(x) F_{k-1}(x)) / (lam - phi(x))."""

    beta: float
    lam_circ: float
    lam: float
    clst: SeriesFn
    phi: SeriesFn


class _Recursion:
    """Memoized bottom-up evaluator of the two-point recursion."""

    def __init__(self, base: SeriesFn, levels: Sequence):
        self.base = base
        self.levels = list(levels)
        self._cache: dict = {}
        self._anchor = self._cluster_anchors()

    def _cluster_anchors(self) -> dict:
        """One shared expansion anchor per group of nearby ladder rates."""
        rated = [
            (lv.nu, idx)
            for idx, lv in enumerate(self.levels)
            if isinstance(lv, _Prop1Level)
        ]
        rated.sort()
        anchors = {}
        group = []

        def flush():
            if group:
                rep = group[len(group) // 2][0]
                for _, i in group:
                    anchors[i] = rep

        for nu, idx in rated:
            if group and nu - group[-1][0] > _SING_WINDOW * nu:
                flush()
                group = []
            group.append((nu, idx))
        flush()
        return anchors

    def series(self, level: int, point: float, order: int) -> Taylor:
        key = (level, point)
        hit = self._cache.get(key)
        if hit is not None and hit.order >= order:
            return hit.truncate(order)
        out = self._compute(level, point, order)
        self._cache[key] = out
        return out

    def value(self, point: float) -> float:
        return self.series(len(self.levels), point, 0).c[0]

    def jet(self, point: float) -> TransformJet:
        return self.series(len(self.levels), point, 2).jet()

    def _compute(self, level: int, point: float, order: int) -> Taylor:
        if level == 0:
            return self.base(point, order)
        lv = self.levels[level - 1]
        if isinstance(lv, _SubLevel):
            prev = self.series(level - 1, point, order)
            num = lv.beta + lv.lam_circ * (lv.clst(point, order) * prev)
            den = lv.lam - lv.phi(point, order)
            return num / den
        anchor = self._anchor[level - 1]
        if abs(point - anchor) <= _SING_WINDOW * abs(anchor):
            # expand at the cluster anchor, clear the root, re-center once;
            # the conservative convergence radius at the anchor is the
            # anchor itself (transform singularities sit left of zero)
            shift = point - anchor
            o2 = order + margin_for_shift(abs(shift) / abs(anchor))
            out = self._bracket_at(level, anchor, o2)
            if lv.post is not None:
                out = out * lv.post(anchor, o2)
            return out.shift(shift).truncate(order)
        out = self._bracket_at(level, point, order)
        if lv.post is not None:
            out = out * lv.post(point, order)
        return out

    def _bracket_at(self, level: int, point: float, order: int) -> Taylor:
        """p0 + w * nu/(nu - x) * (C(x) F(x) - (x/nu) C(nu) F(nu)) as a
        series at ``point``, the removable singularity divided out against
        the numerator's analytic root at ``x = nu``."""
        lv = self.levels[level - 1]
        nu = lv.nu
        margin_scale = min(abs(point), abs(nu)) or abs(nu)
        o_num = _root_div_order(order, nu - point, abs(nu), margin_scale)
        C = lv.clst(point, o_num)
        P = self.series(level - 1, point, o_num)
        cp_nu = lv.clst(nu, 0).c[0] * self.series(level - 1, nu, 0).c[0]
        x = Taylor.identity(point, o_num)
        N = C * P - (cp_nu / nu) * x
        quotient = div_by_linear_root(N, nu - point, abs(nu))
        return (lv.p0 + lv.w * (-nu) * quotient).truncate(order)


def _as_series_fn(obj) -> SeriesFn:
    if hasattr(obj, "lst_series"):
        return obj.lst_series
    if callable(obj):
        return series_from_callable(obj)
    raise TypeError(f"cannot use {obj!r} as a transform handle")


@dataclass(frozen=True)
class GenericLadderSpec:
    """Data of the generic recursion: per level ``k`` (1-based) an
    exponential rate ``nu[k-1]``, a composite transform ``c_lsts[k-1]`` and
    an atom probability ``p0[k-1]``."""

    n: int
    nu: tuple
    c_lsts: tuple
    p0: tuple

    def __post_init__(self):
        object.__setattr__(self, "nu", tuple(self.nu))
        object.__setattr__(self, "c_lsts", tuple(self.c_lsts))
        object.__setattr__(self, "p0", tuple(self.p0))
        if not (len(self.nu) == len(self.c_lsts) == len(self.p0) == self.n):
            raise ValueError("nu, c_lsts and p0 must all have length n")
        if any(v <= 0 for v in self.nu):
            raise ValueError("ladder rates must be positive")
        if any(not 0.0 <= p <= 1.0 for p in self.p0):
            raise ValueError("atom probabilities must lie in [0, 1]")


def _generic_engine(spec: GenericLadderSpec) -> _Recursion:
    levels = [
        _Prop1Level(
            nu=spec.nu[k],
            clst=_as_series_fn(spec.c_lsts[k]),
            p0=spec.p0[k],
            w=1.0 - spec.p0[k],
        )
        for k in range(spec.n)
    ]
    return _Recursion(lambda point, order: Taylor.constant(1.0, order), levels)


def pi_generic(spec: GenericLadderSpec, alpha: float) -> float:
    """Transform of the generic ladder maximum at ``alpha``."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return _generic_engine(spec).value(alpha)


def atom_at_zero(spec: GenericLadderSpec, k: int) -> float:
    """Probability that the level-``k`` ladder maximum is exactly zero."""
    if not 0 <= k <= spec.n:
        raise ValueError("k must lie in 0..n")
    if k == 0:
        return 1.0
    engine = _generic_engine(spec)
    nu = spec.nu[k - 1]
    cval = _as_series_fn(spec.c_lsts[k - 1])(nu, 0).c[0]
    prev = engine.series(k - 1, nu, 0).c[0]
    return spec.p0[k - 1] + (1.0 - spec.p0[k - 1]) * cval * prev


def _check_drift_path(model: ModelSpec, n: int) -> None:
    reg0 = model.regimes[0]
    if reg0.kind != "drift" or reg0.r < 0:
        raise RegimeMismatch("state 0 must be a pure drift with r >= 0")
    for k in range(1, n + 1):
        reg = model.regimes[k]
        if reg.kind != "drift" or reg.r <= 0:
            raise RegimeMismatch(
                f"state {k} must be a positive pure drift for the drift recursion"
            )


def _drift_engine(model: ModelSpec, beta: float, n: int) -> _Recursion:
    _check_drift_path(model, n)
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    levels = []
    for k in range(1, n + 1):
        lam_circ = model.rate_for_state(k)
        lam = lam_circ + beta
        nu = lam / model.regimes[k].r
        levels.append(
            _Prop1Level(
                nu=nu,
                clst=model.claim_for_state(k).lst_series,
                p0=beta / lam,
                w=lam_circ / lam,
            )
        )
    return _Recursion(lambda point, order: Taylor.constant(1.0, order), levels)


def generic_spec_from_drift(
    model: ModelSpec, beta: float, n: int
) -> GenericLadderSpec:
    """Generic ladder data realizing the drift model: C_k is the claim
    transform of the next arrival, nu_k = lam_k / r_k, p0_k = beta / lam_k."""
    _check_drift_path(model, n)
    nu, cls_, p0 = [], [], []
    for k in range(1, n + 1):
        lam = model.rate_for_state(k) + beta
        nu.append(lam / model.regimes[k].r)
        cls_.append(model.claim_for_state(k))
        p0.append(beta / lam)
    return GenericLadderSpec(n=n, nu=tuple(nu), c_lsts=tuple(cls_), p0=tuple(p0))


def pi_drift(model: ModelSpec, beta: float, n: int, alpha: float) -> float:
    """Running-maximum transform in the drift model, started with ``n``
    clients and killed at rate ``beta`` (beta = 0 gives the infinite
    horizon)."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if not 0 <= n <= model.m:
        raise ValueError("n must lie in 0..m")
    return _drift_engine(model, beta, n).value(alpha)


def _levy_engine(model: ModelSpec, beta: float, n: int) -> _Recursion:
    if beta <= 0:
        raise KillingRequired("the general recursion needs beta > 0")
    kr = KilledRates.from_model(model, beta)

    def lam_of(k: int) -> float:
        return kr.lam0 if k == 0 else kr.lam[k - 1]

    def post_factory(reg, lam):
        return lambda point, order: killed_max_series(reg, point, lam, order)

    levels = []
    for k in range(1, n + 1):
        reg = model.regimes[k]
        lam_circ = model.rate_for_state(k)
        lam = lam_of(k)
        claim = model.claim_for_state(k)
        if reg.is_subordinator or (reg.kind == "drift" and reg.r == 0.0):
            # flat or nondecreasing path: the segment maximum sits at the
            # segment end, giving a plain division step
            levels.append(
                _SubLevel(
                    beta=beta,
                    lam_circ=lam_circ,
                    lam=lam,
                    clst=claim.lst_series,
                    phi=lambda point, order, reg=reg: exponent_series(
                        reg, point, order
                    ),
                )
            )
        else:
            nu = inverse_exponent(reg, lam)
            levels.append(
                _Prop1Level(
                    nu=nu,
                    clst=claim.lst_series,
                    p0=beta / lam,
                    w=lam_circ / lam,
                    post=post_factory(reg, lam),
                )
            )
    base_reg = model.regimes[0]
    base = post_factory(base_reg, lam_of(0))
    return _Recursion(base, levels)


def pi_levy(model: ModelSpec, beta: float, n: int, alpha: float) -> float:
    """Running-maximum transform for general spectrally-positive regimes.

    Each level multiplies the ladder recursion by the killed-maximum factor
    of its regime; on the drift model this factor is identically one and the
    result collapses to :func:`pi_drift` exactly.
    """
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    if not 0 <= n <= model.m:
        raise ValueError("n must lie in 0..m")
    return _levy_engine(model, beta, n).value(alpha)


def _route_engine(model: ModelSpec, beta: float, n: int) -> _Recursion:
    try:
        return _drift_engine(model, beta, n)
    except RegimeMismatch:
        return _levy_engine(model, beta, n)


def pi_max(model: ModelSpec, beta: float, n: int, alpha: float) -> float:
    """Running-maximum transform, choosing the drift or the general route."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    return _route_engine(model, beta, n).value(alpha)


def ruin_transform(model: ModelSpec, beta: float, n: int, alpha: float) -> float:
    """Laplace transform in the reserve level of the ruin probability,
    (1 - pi_n(alpha, beta)) / alpha."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return (1.0 - pi_max(model, beta, n, alpha)) / alpha


def pi_jet(model: ModelSpec, beta: float, n: int) -> TransformJet:
    """Order-2 jet of the transform at alpha = 0.

    The jet is (1, -E max, E max^2): the whole recursion runs in truncated
    Taylor arithmetic, the fixed-argument branch contributing constants only.
    """
    if not 0 <= n <= model.m:
        raise ValueError("n must lie in 0..m")
    return _route_engine(model, beta, n).jet(0.0)
