"""Cepstral random fields on two-dimensional lattices."""

from ._core import (
    CepfieldError,
    CepstralGrid,
    acf_exact,
    acf_mesh,
    cepstral_to_ma,
    extract_signal,
    fit,
    gaussian_loglik,
    info_criteria,
    mcmc,
    missing_loglik,
    morans_i,
    simulate,
    spectrum_on_mesh,
    whittle_exact,
)

__all__ = [
    "CepfieldError",
    "CepstralGrid",
    "acf_exact",
    "acf_mesh",
    "cepstral_to_ma",
    "extract_signal",
    "fit",
    "gaussian_loglik",
    "info_criteria",
    "mcmc",
    "missing_loglik",
    "morans_i",
    "simulate",
    "spectrum_on_mesh",
    "whittle_exact",
]
