import numpy as np


def fd_step(x):
    return np.maximum(1e-6, 1e-7 * (1.0 + np.abs(x)))


def central_jacobian(F, x):
    """n x k Jacobian of ``F`` at ``x`` by central differences."""
    x = np.asarray(x, dtype=float)
    h = fd_step(x)
    k = x.size
    # all 2k perturbed points in one batched call
    pts = np.repeat(x[None, :], 2 * k, axis=0)
    idx = np.arange(k)
    pts[idx, idx] += h
    pts[k + idx, idx] -= h
    vals = np.asarray(F(pts), dtype=float)
    return ((vals[:k] - vals[k:]) / (2.0 * h[:, None])).T


def relative_jacobian_error(J_a, J_fd):
    scale = max(1.0, float(np.linalg.norm(J_fd)))
    return float(np.linalg.norm(np.asarray(J_a) - J_fd)) / scale
