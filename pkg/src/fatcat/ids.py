"""Canonical identifiers.

Objects, morphisms and cells are identified by nested tuples of ints and
strings.  JSON stores tuples as arrays; dictionary keys use a compact JSON
encoding.  ``sort_key`` gives one total order over mixed identifiers so
every enumeration in the package is deterministic.
"""

import json

from .errors import StructureError


def freeze(value):
    """Normalize JSON-decoded or user-supplied identifiers to hashable form."""
    if isinstance(value, (list, tuple)):
        return tuple(freeze(v) for v in value)
    if isinstance(value, bool) or value is None:
        raise StructureError(f"unsupported identifier component: {value!r}")
    if isinstance(value, (int, str)):
        return value
    raise StructureError(f"unsupported identifier component: {value!r}")


def encode_id(value):
    """Identifier to a JSON-ready value (tuples become arrays)."""
    if isinstance(value, tuple):
        return [encode_id(v) for v in value]
    return value


def decode_id(value):
    """Inverse of :func:`encode_id` (arrays become tuples)."""
    return freeze(value)


def id_key(value) -> str:
    """Canonical string form, used for JSON object keys."""
    return json.dumps(encode_id(value), separators=(",", ":"), sort_keys=True)


def sort_key(value):
    """Total order on identifiers: ints, then strings, then tuples."""
    if isinstance(value, tuple):
        return (2, tuple(sort_key(v) for v in value))
    if isinstance(value, str):
        return (1, value)
    return (0, value)
