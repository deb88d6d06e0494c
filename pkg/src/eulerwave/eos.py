"""Equation-of-state models in (log-density, entropy) state space.

State-space conventions: ``rho`` is the logarithmic density ln(density /
background_density) and ``s`` the entropy per unit mass.  The squared sound
speed is c^2 = exp(-rho) * dp/drho / background_density, so the built-in
models are

    polytropic:  p = background_density * exp(gamma*rho) * exp(k*s) / gamma
                 (k = entropy_scale, default 1), giving c(0, 0) = 1
    chaplygin:   p = c0 - c1 * exp(-rho) / background_density, barotropic,
                 totally linearly degenerate (c_rho = -c, all s-derivatives 0)

Every derivative returned by :func:`evaluate` is an exact closed form for the
built-in models; ``custom`` models differentiate a user closure numerically
(nested central differences, with the corresponding accuracy loss).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DomainError

_CUSTOM_STEP = 1e-5


@dataclass(frozen=True)
class EosModel:
    kind: str
    params: dict = field(default_factory=dict)
    background_density: float = 1.0
    p_func: Callable | None = None

    def __post_init__(self):
        if self.background_density <= 0.0:
            raise ConfigurationError("background_density must be > 0")
        if self.kind == "polytropic":
            gamma = self.params.get("gamma")
            if gamma is None or gamma <= 1.0:
                raise ConfigurationError("polytropic model needs gamma > 1")
        elif self.kind == "chaplygin":
            c1 = self.params.get("c1")
            if c1 is None or c1 <= 0.0:
                raise ConfigurationError("chaplygin model needs c1 > 0")
        elif self.kind == "custom":
            if self.p_func is None:
                raise ConfigurationError("custom model needs a pressure closure")
        else:
            raise ConfigurationError(f"unknown eos kind {self.kind!r}")


@dataclass
class EosPoint:
    """Pressure, sound speed and the state-space derivatives used downstream.

    ``p_s`` etc. follow the semicolon-derivative convention: ``p_s`` is
    dp/ds at fixed rho, ``p_s_rho`` the mixed second derivative (equal to
    ``p_rho_s`` by symmetry of mixed partials), ``c_rho``/``c_s`` the sound
    speed derivatives.
    """

    p: float
    c: float
    p_s: float
    p_s_rho: float
    p_s_s: float
    p_rho_s: float
    c_rho: float
    c_s: float


def polytropic(gamma: float, entropy_scale: float = 1.0,
               background_density: float = 1.0) -> EosModel:
    return EosModel(kind="polytropic",
                    params={"gamma": float(gamma),
                            "entropy_scale": float(entropy_scale)},
                    background_density=float(background_density))


def chaplygin(c0: float = 0.0, c1: float = 1.0,
              background_density: float = 1.0) -> EosModel:
    return EosModel(kind="chaplygin",
                    params={"c0": float(c0), "c1": float(c1)},
                    background_density=float(background_density))


def custom(p_func: Callable, background_density: float = 1.0) -> EosModel:
    return EosModel(kind="custom", params={}, p_func=p_func,
                    background_density=float(background_density))


def _check_finite(rho_log, s):
    if not (np.all(np.isfinite(rho_log)) and np.all(np.isfinite(s))):
        raise DomainError("eos evaluation requires finite (rho, s)")


def evaluate(model: EosModel, rho_log, s) -> EosPoint:
    """Evaluate pressure, sound speed and all state-space derivatives.

    Accepts scalars or numpy arrays elementwise.
    """
    _check_finite(rho_log, s)
    rho = np.asarray(rho_log, dtype=float)
    ent = np.asarray(s, dtype=float)
    bg = model.background_density

    if model.kind == "polytropic":
        gamma = model.params["gamma"]
        k = model.params.get("entropy_scale", 1.0)
        p = bg * np.exp(gamma * rho) * np.exp(k * ent) / gamma
        c = np.exp(0.5 * ((gamma - 1.0) * rho + k * ent))
        point = EosPoint(
            p=p, c=c,
            p_s=k * p,
            p_s_rho=k * gamma * p,
            p_s_s=k * k * p,
            p_rho_s=k * gamma * p,
            c_rho=0.5 * (gamma - 1.0) * c,
            c_s=0.5 * k * c,
        )
    elif model.kind == "chaplygin":
        c0 = model.params.get("c0", 0.0)
        c1 = model.params["c1"]
        p = c0 - c1 * np.exp(-rho) / bg
        c = (np.sqrt(c1) / bg) * np.exp(-rho)
        zero = np.zeros_like(p)
        point = EosPoint(p=p, c=c, p_s=zero, p_s_rho=zero, p_s_s=zero,
                         p_rho_s=zero, c_rho=-c, c_s=zero)
    else:
        point = _evaluate_custom(model, rho, ent)

    if np.any(np.asarray(point.c) <= 0.0) or not np.all(np.isfinite(point.c)):
        raise DomainError("sound speed must be positive and finite")
    if np.isscalar(rho_log) and np.isscalar(s):
        point = EosPoint(**{k: float(v) for k, v in vars(point).items()})
    return point


def _evaluate_custom(model: EosModel, rho: np.ndarray, ent: np.ndarray) -> EosPoint:
    # All derivatives by central differences of the closure; second
    # derivatives are nested, so accuracy degrades to ~sqrt(eps).
    pf = model.p_func
    bg = model.background_density
    h = _CUSTOM_STEP

    def p_rho(r, e):
        return (pf(r + h, e) - pf(r - h, e)) / (2.0 * h)

    def sound(r, e):
        val = np.exp(-r) * p_rho(r, e) / bg
        if np.any(np.asarray(val) <= 0.0):
            raise DomainError("custom eos has non-positive c^2")
        return np.sqrt(val)

    p = pf(rho, ent)
    c = sound(rho, ent)
    return EosPoint(
        p=p, c=c,
        p_s=(pf(rho, ent + h) - pf(rho, ent - h)) / (2.0 * h),
        p_s_rho=(pf(rho + h, ent + h) - pf(rho + h, ent - h)
                 - pf(rho - h, ent + h) + pf(rho - h, ent - h)) / (4.0 * h * h),
        p_s_s=(pf(rho, ent + h) - 2.0 * p + pf(rho, ent - h)) / (h * h),
        p_rho_s=(pf(rho + h, ent + h) - pf(rho - h, ent + h)
                 - pf(rho + h, ent - h) + pf(rho - h, ent - h)) / (4.0 * h * h),
        c_rho=(sound(rho + h, ent) - sound(rho - h, ent)) / (2.0 * h),
        c_s=(sound(rho, ent + h) - sound(rho, ent - h)) / (2.0 * h),
    )


def _rel_err(approx: float, exact: float) -> float:
    denom = max(abs(exact), abs(approx))
    if denom == 0.0:
        return 0.0
    return abs(approx - exact) / denom


def verify_derivatives(model: EosModel, rho_log: float, s: float,
                       h: float) -> dict:
    """Check every EosPoint derivative against central differences of p and c.

    Returns per-field relative errors and their maximum.  This is a test
    oracle, not the implementation path: the built-in models are analytic.
    """
    if not 0.0 < h <= 0.1:
        raise ConfigurationError("verification step h must lie in (0, 0.1]")
    point = evaluate(model, rho_log, s)

    def p(r, e):
        return evaluate(model, r, e).p

    def c(r, e):
        return evaluate(model, r, e).c

    fd = {
        "p_s": (p(rho_log, s + h) - p(rho_log, s - h)) / (2.0 * h),
        "p_s_rho": (p(rho_log + h, s + h) - p(rho_log + h, s - h)
                    - p(rho_log - h, s + h) + p(rho_log - h, s - h)) / (4 * h * h),
        "p_s_s": (p(rho_log, s + h) - 2.0 * point.p + p(rho_log, s - h)) / (h * h),
        "p_rho_s": (p(rho_log + h, s + h) - p(rho_log - h, s + h)
                    - p(rho_log + h, s - h) + p(rho_log - h, s - h)) / (4 * h * h),
        "c_rho": (c(rho_log + h, s) - c(rho_log - h, s)) / (2.0 * h),
        "c_s": (c(rho_log, s + h) - c(rho_log, s - h)) / (2.0 * h),
    }
    errors = {name: _rel_err(fd[name], getattr(point, name)) for name in fd}
    return {"errors": errors, "max_rel_error": max(errors.values())}


def from_config(cfg: dict) -> EosModel:
    """Build a model from the ``{"eos": {...}}`` JSON block (the inner dict)."""
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise ConfigurationError("eos config must be a dict with a 'kind' key")
    kind = cfg["kind"]
    bg = cfg.get("background_density", 1.0)
    if kind == "polytropic":
        if "gamma" not in cfg:
            raise ConfigurationError("polytropic eos config needs 'gamma'")
        return polytropic(cfg["gamma"], cfg.get("entropy_scale", 1.0), bg)
    if kind == "chaplygin":
        return chaplygin(cfg.get("c0", 0.0), cfg.get("c1", 1.0), bg)
    raise ConfigurationError(f"config cannot express eos kind {kind!r}")
