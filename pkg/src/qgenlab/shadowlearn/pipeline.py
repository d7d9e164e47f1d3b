"""End-to-end learning of shallow circuits from randomized-measurement data."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from ..qcore.circuit import Circuit
from ..qcore.pauli import backward_lightcone
from .dataset import BASES
from .estimation import fit_alpha_least_squares, learn_observables, PauliCoefficients
from .inversion import InversionConfig, LocalInversion, train_local_inversion
from .sewing import (
    SewedCircuit, direct_heisenberg_sew, sew_local_inversions, true_heisenberg_error,
    true_inversion_error, DENSE_SEW_LIMIT,
)


def architecture_lightcones(arch: Circuit) -> dict:
    return {i: tuple(sorted(backward_lightcone(arch, {i}))) for i in range(arch.num_qubits)}


@dataclass
class LearningReport:
    construction: str
    eps: list  # per-qubit error against the learned observables
    true_eps: list = field(default_factory=list)
    spectral_error: float | None = None
    diamond_surrogate: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"construction": self.construction, "eps": self.eps, "true_eps": self.true_eps,
                "spectral_error": self.spectral_error, "diamond_surrogate": self.diamond_surrogate,
                **self.extra}


def learn_shallow_circuit(data, rng, mode: str = "known_arch", lightcones=None, k=None,
                          eps: float = 0.1, delta: float = 0.1, construction: str = "inversion",
                          config: InversionConfig | None = None, target_unitary=None):
    """Observables (least squares or thresholded shadows), then inversion or direct sewing.

    Returns (SewedCircuit, LearningReport, observables).  With
    ``target_unitary`` (n <= 6) the report carries the spectral distance of
    the sewed unitary to its ideal and the diamond surrogate 2 ||dU||_inf.
    """
    extra = {}
    if mode == "known_arch":
        if lightcones is None:
            raise ValueError("known_arch mode needs lightcones")
        coeffs, trace = fit_alpha_least_squares(data, lightcones)
        obs = coeffs.observables()
        n = coeffs.n
        extra["loss_trace_tail"] = trace[-1]
    elif mode == "unknown":
        if k is None:
            raise ValueError("unknown mode needs k")
        obs, rep = learn_observables(data, k, eps, delta)
        n = len({i for i, _ in obs})
        extra["near_threshold"] = len(rep.near_threshold)
        extra["required_N"] = rep.required_N
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if construction == "inversion":
        invs = [train_local_inversion({P: obs[(i, P)] for P in BASES}, i, rng, config=config)
                for i in range(n)]
        sew = sew_local_inversions(invs, n)
        report = LearningReport("LocalInversion", [iv.eps for iv in invs], extra=extra)
        if target_unitary is not None:
            report.true_eps = [true_inversion_error(iv.unitary, iv.window, target_unitary, iv.qubit)
                               for iv in invs]
    elif construction == "heisenberg":
        sew = direct_heisenberg_sew(obs, n)
        report = LearningReport("DirectHeisenberg", [], extra=extra)
        if target_unitary is not None:
            report.true_eps = [true_heisenberg_error(obs, target_unitary, i) for i in range(n)]
            report.eps = list(report.true_eps)
        sew.eps = report.eps
    else:
        raise ValueError(f"unknown construction {construction!r}")
    if target_unitary is not None and n <= DENSE_SEW_LIMIT:
        report.spectral_error = sew.error(target_unitary)
        report.diamond_surrogate = 2.0 * report.spectral_error
    return sew, report, obs


def save_bundle(path, sew: SewedCircuit, report: LearningReport, coeffs: PauliCoefficients | None = None,
                inversions: list | None = None):
    bundle = {
        "construction": sew.kind,
        "convention": sew.convention,
        "eps": report.eps,
        "report": report.to_dict(),
        "sewed": sew.to_dict(),
        "coefficients": coeffs.to_dict() if coeffs is not None else None,
        "inversions": [iv.to_dict() for iv in inversions] if inversions else [],
    }
    with open(path, "w") as fh:
        json.dump(bundle, fh)


def load_bundle(path) -> dict:
    with open(path) as fh:
        d = json.load(fh)
    d["sewed"] = SewedCircuit.from_dict(d["sewed"])
    if d.get("coefficients"):
        d["coefficients"] = PauliCoefficients.from_dict(d["coefficients"])
    d["inversions"] = [LocalInversion.from_dict(v) for v in d.get("inversions", [])]
    return d
