"""Selective inference for Lasso, LARS and forward stepwise selection."""

from ._selinf import (
    SelinfError,
    fs_path,
    lars_path,
    lasso_fit,
    lasso_inference,
    selective_ci,
    selective_pvalue,
    significance_test,
    spacing_test,
    standardize,
    tn_cdf,
)

__all__ = [
    "SelinfError",
    "fs_path",
    "lars_path",
    "lasso_fit",
    "lasso_inference",
    "selective_ci",
    "selective_pvalue",
    "significance_test",
    "spacing_test",
    "standardize",
    "tn_cdf",
]
__version__ = "0.1.0"
