"""The surgery complex: lattice utilities, system models, assembly."""

from .lattice import Framing, LatticeError, d_of_u, nu, lambda_sum, \
    spinc_representative
from .model import (SystemModel, SublinkComplex, Arrow, DEntry, ModelError,
                    HyperboxDestab, unknot_model, hopf_model, model_to_json,
                    model_from_json)
from .complex import (SurgeryComplex, SurgeryError, assemble, spinc_classes,
                      window_rank, homology_profile, default_b,
                      default_mtilde, check_truncation_witnesses, MODES)

__all__ = [
    "Framing", "LatticeError", "d_of_u", "nu", "lambda_sum",
    "spinc_representative",
    "SystemModel", "SublinkComplex", "Arrow", "DEntry", "ModelError",
    "HyperboxDestab", "unknot_model", "hopf_model", "model_to_json",
    "model_from_json",
    "SurgeryComplex", "SurgeryError", "assemble", "spinc_classes",
    "window_rank", "homology_profile", "default_b", "default_mtilde",
    "check_truncation_witnesses", "MODES",
]
