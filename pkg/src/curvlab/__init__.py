"""Jet-based curvature engine for Kähler frames and holomorphic pseudosymmetry."""

from .example_family import FamilyParams, PowerH, SqrtH, build_family, case_presets, oracle_eval
from .identity_audit import run_audit
from .jet import Jet, jet_const, jet_coordinate
from .kaehler_model import ComplexStructure, FrameSpec, build_package, kaehler_certificates
from .pseudosymmetry import derivation_action, solve_structure_function

__all__ = [
    "ComplexStructure",
    "FamilyParams",
    "FrameSpec",
    "Jet",
    "PowerH",
    "SqrtH",
    "build_family",
    "build_package",
    "case_presets",
    "derivation_action",
    "jet_const",
    "jet_coordinate",
    "kaehler_certificates",
    "oracle_eval",
    "run_audit",
    "solve_structure_function",
]
