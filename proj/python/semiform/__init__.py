"""Orthogonal decomposition and tensor products of forms over semirings.

Indices are 0-based. Forms use the same JSON documents as the command-line
tool; ``Form.from_dict`` and ``Form.to_dict`` convert to and from plain
Python data.
"""

import json

from ._semiform import (
    Form,
    ParseError,
    PreconditionError,
    SemiformError,
    decompose,
    is_indecomposable,
    isometry,
    predict_bilinear,
    predict_quadratic,
    run,
    tensor,
    tensor_quadratic,
)


def _from_dict(doc):
    return Form.parse(json.dumps(doc))


def _to_dict(form):
    return json.loads(form.to_json())


Form.from_dict = staticmethod(_from_dict)
Form.to_dict = _to_dict

__all__ = [
    "Form",
    "ParseError",
    "PreconditionError",
    "SemiformError",
    "decompose",
    "is_indecomposable",
    "isometry",
    "predict_bilinear",
    "predict_quadratic",
    "run",
    "tensor",
    "tensor_quadratic",
]
