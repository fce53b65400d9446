"""JSON certificate envelope: schema version, inputs digest, replayable claims."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence

from . import __version__
from .claims import Claim

SCHEMA_VERSION = 1


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def digest(inputs) -> str:
    return hashlib.sha256(canonical(inputs).encode()).hexdigest()


def _no_floats(obj, path="$"):
    if isinstance(obj, float):
        raise TypeError(f"float in artifact at {path}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _no_floats(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _no_floats(v, f"{path}[{i}]")


def build_certificate(kind: str, inputs: dict, result, claims: Sequence[Claim]) -> dict:
    cert = {"schema_version": SCHEMA_VERSION, "kind": kind, "toolkit_version": __version__,
            "inputs": inputs, "inputs_digest": digest(inputs), "result": result,
            "claims": [c.to_json() for c in claims]}
    _no_floats(cert)
    return cert


def dumps(cert: dict) -> str:
    return json.dumps(cert, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


class DigestMismatch(ValueError):
    pass


@dataclass
class VerifyReport:
    results: list[tuple[str, bool]]
    warnings: list[str]

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.results)

    def to_json(self) -> dict:
        return {"ok": self.ok, "claims": [{"id": i, "pass": ok} for i, ok in self.results],
                "warnings": self.warnings}


def verify_certificate(cert: dict) -> VerifyReport:
    """Replay every stored claim; raises DigestMismatch if inputs were altered."""
    if cert.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {cert.get('schema_version')!r}")
    if digest(cert.get("inputs")) != cert.get("inputs_digest"):
        raise DigestMismatch("inputs_digest does not match the stored inputs")
    results, warnings = [], []
    claims = cert.get("claims", [])
    if not claims:
        warnings.append("certificate has no claims")
    for rec in claims:
        c = Claim.from_json(rec)
        results.append((c.id, c.replay() and c.verdict))
    return VerifyReport(results, warnings)
