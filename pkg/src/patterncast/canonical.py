"""Canonical document serialization for byte-reproducible outputs.

Every machine-facing output (CLI machine format, HTTP bodies, stored
traces) goes through this renderer: UTF-8, sorted object keys, no
insignificant whitespace, and reals rendered at a fixed 17 significant
digits so identical computations serialize to identical bytes on any
platform.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any


def _render(value: Any, out: list[str]) -> None:
    if value is None or isinstance(value, bool):
        out.append(json.dumps(value))
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot canonically serialize non-finite float: {value!r}")
        if value == int(value) and abs(value) < 1e16:
            out.append(f"{value:.1f}")
        else:
            out.append(format(value, ".17g"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if not isinstance(key, str):
                raise ValueError(f"canonical objects need string keys, got {key!r}")
            if i:
                out.append(",")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _render(value[key], out)
        out.append("}")
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _render(item, out)
        out.append("]")
    else:
        raise ValueError(f"cannot canonically serialize {type(value).__name__}")


def dumps(document: Any) -> str:
    """Render a document as canonical JSON text."""
    out: list[str] = []
    _render(document, out)
    return "".join(out)


def dump_bytes(document: Any) -> bytes:
    return dumps(document).encode("utf-8")


def content_hash(document: Any) -> str:
    """SHA-256 hex digest of the canonical serialization."""
    return hashlib.sha256(dump_bytes(document)).hexdigest()


def trace_id(request_echo: Any, result: Any) -> str:
    """Composite trace id: request hash half + result hash half.

    The last 16 hex characters are the result component, so a re-run can be
    checked against a stored id without re-reading the stored result.
    """
    return content_hash(request_echo)[:16] + content_hash(result)[:16]
