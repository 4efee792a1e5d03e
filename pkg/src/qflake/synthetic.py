"""Bundled synthetic corpus generator.

Emits a deterministic stand-in corpus of pseudo test files when the real
one is not on disk: flaky files lean on retry/seed/nondeterminism idioms
while non-flaky files stay plain, with enough shared vocabulary that the
classes overlap rather than separate trivially. File counts default to
the real corpus ratio (45 flaky : 243 non-flaky).
"""

from __future__ import annotations

from pathlib import Path

from .corpus import scan_tree, write_manifest
from .seeding import STREAM_SYNTH, rng_for

_REPOS = ("qsim", "qcircuits", "entangler", "pulselab", "qruntime", "statevec")

_COMMON = (
    "import", "def", "test", "self", "assert", "return", "class", "setup",
    "result", "value", "state", "check", "expected", "actual", "config",
    "run", "build", "data", "list", "dict", "none", "true", "false",
    "range", "len", "append", "with", "for", "while", "try", "except",
    "raise", "print", "float", "int", "str", "object", "from", "numpy",
    "np", "array", "zeros", "ones", "shape", "pytest", "fixture", "param",
)

_QUANTUM = (
    "circuit", "qubit", "qubits", "gate", "hadamard", "cnot", "measure",
    "backend", "simulator", "transpile", "statevector", "ansatz",
    "entanglement", "superposition", "amplitude", "unitary", "register",
    "pauli", "rotation", "phase", "fidelity", "observable", "hamiltonian",
)

_FLAKY_MARKERS = (
    "flaky", "retry", "rerun", "seed", "shots", "nondeterministic",
    "intermittent", "sleep", "timeout", "random", "randomness", "sample",
    "variance", "tolerance", "approx", "delta", "probabilistic", "unstable",
)

_NONFLAKY_MARKERS = (
    "exact", "static", "deterministic", "constant", "fixed", "snapshot",
    "serialize", "parse", "format", "validate", "schema", "metadata",
    "version", "docstring", "lint", "registry", "catalog", "manifest",
)


def _make_file_text(rng, flaky: bool, index: int) -> str:
    """A pseudo Python test file whose token mix depends on the class."""
    markers = _FLAKY_MARKERS if flaky else _NONFLAKY_MARKERS
    cross = _NONFLAKY_MARKERS if flaky else _FLAKY_MARKERS
    n_lines = int(rng.integers(20, 60))
    lines = [
        f"# auto test module {index}",
        "import numpy as np",
        "",
        f"def test_case_{index}():",
    ]
    for _ in range(n_lines):
        words = []
        for _ in range(int(rng.integers(3, 9))):
            roll = rng.random()
            if roll < 0.30:
                words.append(_COMMON[rng.integers(0, len(_COMMON))])
            elif roll < 0.55:
                words.append(_QUANTUM[rng.integers(0, len(_QUANTUM))])
            elif roll < 0.80:
                words.append(markers[rng.integers(0, len(markers))])
            elif roll < 0.88:
                # cross-class noise keeps the problem from being trivial
                words.append(cross[rng.integers(0, len(cross))])
            else:
                words.append(f"helper_{int(rng.integers(0, 400)):03d}")
        lines.append("    " + " ".join(words))
    lines.append(f"    assert result_{index} is not None")
    return "\n".join(lines) + "\n"


def generate_corpus(
    root, n_flaky: int = 45, n_nonflaky: int = 243, seed: int = 0
) -> Path:
    """Write a labeled corpus tree plus manifest under root; returns the
    manifest path. Same arguments produce byte-identical trees.
    """
    root = Path(root)
    for class_idx, (label, count) in enumerate(
        (("flaky", n_flaky), ("nonflaky", n_nonflaky))
    ):
        for i in range(count):
            rng = rng_for(seed, STREAM_SYNTH, class_idx, i)
            repo = _REPOS[i % len(_REPOS)]
            path = root / label / repo / f"test_{label}_{i:03d}.py"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(
                _make_file_text(rng, flaky=(label == "flaky"), index=i),
                encoding="utf-8",
            )
    manifest = root / "manifest.jsonl"
    write_manifest(scan_tree(root), manifest)
    return manifest
