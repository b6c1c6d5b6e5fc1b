from __future__ import annotations

import numpy as np


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """``a == c b`` for a unit-modulus ``c`` (matrices or vectors)."""
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    k = int(np.argmax(np.abs(b)))
    if abs(b[k]) < 1e-14:
        return bool(np.allclose(a, 0, atol=tol))
    c = a[k] / b[k]
    if abs(abs(c) - 1) > tol:
        return False
    return bool(np.max(np.abs(a - c * b)) < tol)
