"""scikit-learn style wrapper around the single-material optimizers.

Each input row is one wall material, ``[k_w, t]`` with ``k_w`` in W/mK and
``t`` in metres (the thickness column is ignored by ``gamma_linked``).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .catalog import builtin_paper_scenario
from .optimize import GammaLinkedProblem, Infeasible, ThicknessConstrainedProblem, maximize
from .thermal import FlowConstants, FluidProperties, MaterialSpec, NondimDesign, ReferenceScales, evaluate

__all__ = ["PowerDensityOptimizer", "DesignEvaluator"]

OUTPUT_COLUMNS = ("L_star", "D_star", "t_star", "m_axial", "q_nondim")

_SUPPORTED = ("gamma_linked", "uniform_thickness", "uniform_thickness_fouling", "material_specific_fouling")


def _default_fluid() -> FluidProperties:
    return builtin_paper_scenario("table2").fluid


def _positive(name: str, value) -> float:
    value = float(value)
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")
    return value


class _ScaledMixin:
    def _fit_scales(self):
        self.fluid_ = _default_fluid() if self.fluid is None else self.fluid
        if not isinstance(self.fluid_, FluidProperties):
            raise TypeError("fluid must be a FluidProperties instance or None")
        t_ref = _positive("t_ref", self.t_ref)
        dp = _positive("dp", self.dp)
        dp_ref = dp if self.dp_ref is None else _positive("dp_ref", self.dp_ref)
        self.scales_ = ReferenceScales.from_fluid(self.fluid_, t_ref, dp_ref, dp)
        self.consts_ = FlowConstants(fRe=self.fRe, Nu=self.Nu)


class PowerDensityOptimizer(_ScaledMixin, TransformerMixin, BaseEstimator):
    """Maximum power-density design for each wall material in ``X``.

    Parameters
    ----------
    strategy : str
        One of ``gamma_linked``, ``uniform_thickness``,
        ``uniform_thickness_fouling`` or ``material_specific_fouling``.
    eps_d : float
        Design effectiveness, in (0.5, 1).
    gamma : float
        Thickness-to-spacing ratio for ``gamma_linked``.
    D_min : float
        Minimum plate spacing [m] for the fouling strategies.
    t_ref, dp, dp_ref : float
        Reference thickness [m], operating and reference pressure drop [Pa].
    fluid : FluidProperties or None
        Defaults to the builtin air properties.
    fRe, Nu : float
        Laminar friction and Nusselt constants.

    Attributes
    ----------
    scales_ : ReferenceScales
    results_ : list of OptimizationResult or None
        Per-row results of the last ``transform``; ``None`` where infeasible.
    """

    def __init__(
        self,
        strategy="gamma_linked",
        eps_d=0.791,
        gamma=0.16,
        D_min=0.8e-3,
        t_ref=0.16e-3,
        dp=170.0,
        dp_ref=None,
        fluid=None,
        fRe=24.0,
        Nu=8.235,
    ):
        self.strategy = strategy
        self.eps_d = eps_d
        self.gamma = gamma
        self.D_min = D_min
        self.t_ref = t_ref
        self.dp = dp
        self.dp_ref = dp_ref
        self.fluid = fluid
        self.fRe = fRe
        self.Nu = Nu

    def fit(self, X=None, y=None):
        if self.strategy not in _SUPPORTED:
            raise ValueError(f"strategy must be one of {_SUPPORTED}, got {self.strategy!r}")
        if not (0.5 < float(self.eps_d) < 1.0):
            raise ValueError(f"eps_d must lie in (0.5, 1), got {self.eps_d!r}")
        if self.strategy == "gamma_linked":
            _positive("gamma", self.gamma)
        if self.strategy.endswith("_fouling"):
            _positive("D_min", self.D_min)
        self._fit_scales()
        if X is not None:
            self._check_X(X)
        return self

    def _check_X(self, X):
        X = check_array(X, dtype=np.float64, ensure_min_features=1)
        if self.strategy != "gamma_linked" and X.shape[1] < 2:
            raise ValueError(f"{self.strategy} needs X columns [k_w, t]")
        if np.any(X[:, 0] <= 0) or (X.shape[1] > 1 and self.strategy != "gamma_linked" and np.any(X[:, 1] <= 0)):
            raise ValueError("conductivity and thickness must be positive")
        return X

    def _problem(self, k_w: float, t: float | None):
        material = MaterialSpec("row", k_w)
        args = dict(material=material, fluid=self.fluid_, scales=self.scales_, consts=self.consts_)
        if self.strategy == "gamma_linked":
            return GammaLinkedProblem(float(self.eps_d), float(self.gamma), **args)
        d_min = float(self.D_min) / self.t_ref if self.strategy.endswith("_fouling") else 0.0
        return ThicknessConstrainedProblem(float(self.eps_d), t / self.t_ref, D_min_star=d_min, **args)

    def transform(self, X):
        """Return ``[L*, D*, t*, M, Q]`` per row, NaN where ``eps_d`` is out of reach."""
        check_is_fitted(self, "scales_")
        X = self._check_X(X)
        out = np.full((X.shape[0], len(OUTPUT_COLUMNS)), np.nan)
        self.results_ = []
        for i, row in enumerate(X):
            t = row[1] if X.shape[1] > 1 else None
            try:
                res = maximize(self._problem(row[0], t))
            except Infeasible:
                self.results_.append(None)
                continue
            self.results_.append(res)
            d, p = res.design, res.performance
            out[i] = (d.L_star, d.D_star, d.t_star, p.m_axial, p.q_nondim)
        return out

    def predict(self, X):
        """Optimal nondimensional power density per row."""
        return self.transform(X)[:, -1]


class DesignEvaluator(_ScaledMixin, TransformerMixin, BaseEstimator):
    """Forward model: rows ``[L*, D*, t*, k_w]`` to ``[NTU, M, eps, Q]``."""

    def __init__(self, t_ref=0.16e-3, dp=170.0, dp_ref=None, fluid=None, fRe=24.0, Nu=8.235):
        self.t_ref = t_ref
        self.dp = dp
        self.dp_ref = dp_ref
        self.fluid = fluid
        self.fRe = fRe
        self.Nu = Nu

    def fit(self, X=None, y=None):
        self._fit_scales()
        return self

    def transform(self, X):
        check_is_fitted(self, "scales_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 4:
            raise ValueError(f"expected 4 columns [L*, D*, t*, k_w], got {X.shape[1]}")
        out = np.empty((X.shape[0], 4))
        for i, (L, D, t, k_w) in enumerate(X):
            p = evaluate(NondimDesign(L, D, t), self.fluid_, MaterialSpec("row", k_w), self.scales_, self.consts_)
            out[i] = (p.ntu, p.m_axial, p.effectiveness, p.q_nondim)
        return out

    def predict(self, X):
        return self.transform(X)[:, -1]
