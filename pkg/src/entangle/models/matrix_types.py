"""
Annotated numpy types for pydantic models

Complex numbers serialize as [re, im]; matrices as row-major nested lists.
"""

from typing import Annotated, Any, List

import numpy as np
from pydantic import PlainSerializer, PlainValidator


def _complex_from_json(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError("complex numbers must be [re, im] pairs")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float, complex, np.number)):
        return complex(value)
    raise ValueError(f"cannot read a complex number from {value!r}")


def parse_complex_matrix(value: Any) -> np.ndarray:
    """Read a complex matrix from nested [re, im] lists or an ndarray"""
    if isinstance(value, np.ndarray):
        matrix = value.astype(complex)
    else:
        rows = [[_complex_from_json(entry) for entry in row] for row in value]
        if rows and len({len(row) for row in rows}) != 1:
            raise ValueError("matrix rows must have equal length")
        matrix = np.array(rows, dtype=complex)
    if matrix.ndim != 2:
        raise ValueError("expected a two-dimensional matrix")
    return matrix


def parse_complex_vector(value: Any) -> np.ndarray:
    if isinstance(value, np.ndarray):
        vector = value.astype(complex)
    else:
        vector = np.array([_complex_from_json(entry) for entry in value], dtype=complex)
    if vector.ndim != 1:
        raise ValueError("expected a one-dimensional vector")
    return vector


def parse_real_vector(value: Any) -> np.ndarray:
    vector = np.asarray(value, dtype=float)
    if vector.ndim != 1:
        raise ValueError("expected a one-dimensional vector")
    return vector


def complex_to_json(value: complex) -> List[float]:
    return [float(np.real(value)), float(np.imag(value))]


def matrix_to_json(matrix: np.ndarray) -> List[List[List[float]]]:
    return [[complex_to_json(entry) for entry in row] for row in np.asarray(matrix)]


def vector_to_json(vector: np.ndarray) -> List[List[float]]:
    return [complex_to_json(entry) for entry in np.asarray(vector)]


ComplexMatrix = Annotated[
    np.ndarray,
    PlainValidator(parse_complex_matrix),
    PlainSerializer(matrix_to_json, return_type=list),
]

ComplexVector = Annotated[
    np.ndarray,
    PlainValidator(parse_complex_vector),
    PlainSerializer(vector_to_json, return_type=list),
]

RealVector = Annotated[
    np.ndarray,
    PlainValidator(parse_real_vector),
    PlainSerializer(lambda v: [float(x) for x in np.asarray(v)], return_type=list),
]
