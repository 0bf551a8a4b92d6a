"""Dense vector/matrix helpers and the cosine similarity kernel.

Everything downstream (fusion, bank similarities, the contrastive loss)
goes through these few functions. Values are 64-bit floats internally;
interchange files store 32-bit and are promoted on load.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, NonFiniteValue, ZeroVector


def as_vec(x, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float64 array."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimMismatch(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue(f"{name} contains non-finite entries")
    return v


def as_mat(x, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array."""
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise DimMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteValue(f"{name} contains non-finite entries")
    return m


def l2_normalize(v) -> np.ndarray:
    v = as_vec(v)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return v / norm


def cosine_sim(u, v) -> float:
    """Cosine similarity in [-1, 1]; raises on zero vectors or dim mismatch."""
    u = as_vec(u, "u")
    v = as_vec(v, "v")
    if u.shape[0] != v.shape[0]:
        raise DimMismatch(f"dims differ: {u.shape[0]} vs {v.shape[0]}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine similarity undefined for zero vectors")
    return float(np.dot(u, v) / (nu * nv))


def matvec(m, v) -> np.ndarray:
    m = as_mat(m)
    v = as_vec(v)
    if m.shape[1] != v.shape[0]:
        raise DimMismatch(f"matrix cols {m.shape[1]} != vector dim {v.shape[0]}")
    return m @ v
