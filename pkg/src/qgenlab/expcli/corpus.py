"""The fixed instance corpus and its hash manifest."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from ..qcore import Circuit, Gate, make_rng, random_brickwork
from ..qcore.linalg import random_unitary

MANIFEST = "manifest.json"
GOLDEN_MANIFEST = Path(__file__).parent / "corpus_manifest.json"
GOLDEN_SEED = 0

# instance families the acceptance experiments draw from
FAMILIES = (
    "idqnn_lattice", "idqnn_learn_model", "idqnn_xeb_model", "idqnn_clifford_deep",
    "shadow_brickwork", "sew_target", "depth1_target", "swap_target", "theta_x", "scrambler", "hamiltonian",
)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def corpus_instances(seed: int) -> dict:
    """Relative path -> JSON-serializable object."""
    from ..ffward import HiddenHamiltonian, build_scrambler
    from ..idqnn import IdqnnModel
    from ..landscape import SwapTargetSpec, build_swap_target, enumerate_theta_x

    out = {}
    lattices = [[2, 2], [2, 3], [3, 2], [3, 3], [2, 4], [4, 2], [3, 4], [4, 3], [4, 4], [2, 2, 3]]
    for li, dims in enumerate(lattices):
        rng = make_rng(seed, "corpus", "idqnn_lattice", li)
        m = IdqnnModel.random(tuple(dims), rng, density=0.5, seed=seed)
        out[f"idqnn_lattice/{li:02d}_{'x'.join(map(str, dims))}.json"] = m.to_dict()
    out["idqnn_learn_model/4x4.json"] = IdqnnModel.random(
        (4, 4), make_rng(seed, "corpus", "idqnn_learn_model"), seed=seed).to_dict()
    for k in range(5):
        m = IdqnnModel.random((2, 4), make_rng(seed, "corpus", "idqnn_xeb_model", k), density=0.5, seed=seed)
        out[f"idqnn_xeb_model/{k:02d}.json"] = m.to_dict()
    out["idqnn_clifford_deep/12x68.json"] = IdqnnModel.random(
        (12, 68), make_rng(seed, "corpus", "idqnn_clifford_deep"), density=0.5, seed=seed).to_dict()
    for t in range(20):
        c = random_brickwork(6, 2, make_rng(seed, "corpus", "shadow_brickwork", t))
        out[f"shadow_brickwork/{t:02d}.json"] = c.to_dict()
    for t in range(20):
        rng = make_rng(seed, "corpus", "sew_target", t)
        n, depth = int(rng.integers(2, 4)), int(rng.integers(1, 3))
        out[f"sew_target/{t:02d}.json"] = random_brickwork(n, depth, rng).to_dict()
    for t in range(4):
        rng = make_rng(seed, "corpus", "depth1_target", t)
        c = Circuit.from_gates(4, [Gate("Dense", (a, a + 1), matrix=random_unitary(4, rng)) for a in (0, 2)])
        out[f"depth1_target/{t:02d}.json"] = c.to_dict()
    for n in (4, 8, 12, 16):
        out[f"swap_target/n{n:02d}.json"] = build_swap_target(SwapTargetSpec.all_blocks(n)).to_dict()
    spec = SwapTargetSpec(8, (0, 1))
    for x in range(4):
        out[f"theta_x/n08_x{x}.json"] = {"n": 8, "S": [0, 1], "x": x,
                                         "theta": [float(v) for v in enumerate_theta_x(spec, x)]}
    for n in (2, 4, 8):
        out[f"scrambler/n{n:02d}.json"] = build_scrambler(n, seed).to_dict()
    out["hamiltonian/n08.json"] = HiddenHamiltonian.random(8, seed).to_dict()
    return out


def corpus_generate(seed: int, directory) -> dict:
    """Write every corpus file plus ``manifest.json`` (path -> sha256); returns the manifest."""
    root = Path(directory)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"corpus directory {root} is not writable: {exc}") from exc
    manifest = {}
    for rel, obj in sorted(corpus_instances(seed).items()):
        text = _dump(obj)
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        manifest[rel] = hashlib.sha256(text.encode()).hexdigest()
    (root / MANIFEST).write_text(json.dumps({"seed": seed, "files": manifest}, sort_keys=True, indent=1) + "\n")
    return manifest


def golden_manifest() -> dict:
    return json.loads(GOLDEN_MANIFEST.read_text())


def verify_corpus(directory) -> list[str]:
    """Paths whose hash differs from the corpus's own manifest (missing files included)."""
    root = Path(directory)
    data = json.loads((root / MANIFEST).read_text())
    bad = []
    for rel, digest in data["files"].items():
        p = root / rel
        if not p.exists() or hashlib.sha256(p.read_bytes()).hexdigest() != digest:
            bad.append(rel)
    return bad


def load_instance(directory, rel: str):
    """Rebuild a corpus object from its family prefix."""
    from ..ffward import HiddenHamiltonian
    from ..idqnn import IdqnnModel

    d = json.loads((Path(directory) / rel).read_text())
    family = rel.split("/")[0]
    if family.startswith("idqnn"):
        return IdqnnModel.from_dict(d)
    if family == "hamiltonian":
        return HiddenHamiltonian.from_dict(d)
    if family == "theta_x":
        return d
    return Circuit.from_dict(d)


def families_present(manifest: dict) -> set:
    return {rel.split("/")[0] for rel in manifest}

