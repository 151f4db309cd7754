"""Residue-class distribution of digit-restricted integer sets.

Shift specs are JSON documents or plain dicts; reports come back as dicts.
"""

import json as _json

from . import _core
from ._core import DomainError, NotTransitiveError, PreconditionError, SpecError

__all__ = [
    "DomainError",
    "NotTransitiveError",
    "PreconditionError",
    "SpecError",
    "analyze",
    "census",
    "cover",
    "dimension",
    "entropy",
    "enumerate_set",
    "verify",
]


def _spec(spec):
    return spec if isinstance(spec, str) else _json.dumps(spec)


def cover(spec):
    return _core.cover(_spec(spec))


def analyze(spec, mod=0, summod=0, functions=(), msb=False):
    fns = [_spec(f) for f in functions]
    return _json.loads(_core.analyze(_spec(spec), mod, summod, fns, msb))


def census(spec, mod, summod=0, *, m, threads=0):
    return _json.loads(_core.census(_spec(spec), mod, summod, m, threads))


def verify(spec, mod, summod=0, *, m, tol=0.02, threads=0):
    return _json.loads(_core.verify(_spec(spec), mod, summod, m, tol, threads))


def entropy(spec):
    return _core.entropy(_spec(spec))


def dimension(spec, progression=None, m_max=0):
    return _json.loads(_core.dimension(_spec(spec), progression, m_max))


def enumerate_set(spec, limit):
    return _core.enumerate(_spec(spec), limit)
