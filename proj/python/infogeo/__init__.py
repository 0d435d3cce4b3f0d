"""Numerical information geometry on finite classical and quantum state spaces."""

from ._infogeo import (
    DomainError,
    audit_sweep,
    bkm_metric,
    canonical_point,
    cramer_rao,
    expand_log_z,
    fisher_metric,
    fit_classical,
    fit_quantum,
    geodesic,
    gns_metric,
    log_derivatives,
    mixture_entropy_bound,
    quantum_fisher_info,
    roll,
)

__all__ = [
    "DomainError",
    "audit_sweep",
    "bkm_metric",
    "canonical_point",
    "cramer_rao",
    "expand_log_z",
    "fisher_metric",
    "fit_classical",
    "fit_quantum",
    "geodesic",
    "gns_metric",
    "log_derivatives",
    "mixture_entropy_bound",
    "quantum_fisher_info",
    "roll",
]
