"""Pure-numpy implementations of the polar-grid hot kernels.

Both kernels evaluate unit-amplitude spherical responses
a_n(r, theta) = exp(-j*k*d_n)/sqrt(N) on an (angle, distance) grid, where
d_n is the exact distance from element n to the grid point
(r*sin(theta), r*cos(theta), 0).
"""

from __future__ import annotations

import numpy as np


def pattern_gain_grid(positions, weights, angles, distances, wavenumber):
    """|sum_n a_n(r, theta) * w_n|^2 on the grid; shape (n_dist, n_angle).

    This is the physical transmit pattern: weights multiply the response,
    so conjugate-phase weights are coherent at their design point.
    """
    positions = np.ascontiguousarray(positions, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    angles = np.asarray(angles, dtype=np.float64)
    distances = np.asarray(distances, dtype=np.float64)
    n = positions.shape[0]
    out = np.empty((distances.size, angles.size))
    for j, theta in enumerate(angles):
        u = np.array([np.sin(theta), np.cos(theta), 0.0])
        pts = distances[:, None] * u[None, :]
        d = np.sqrt(np.sum((pts[:, None, :] - positions[None, :, :]) ** 2, axis=-1))
        acc = np.exp(-1j * wavenumber * d) @ weights
        out[:, j] = (acc.real**2 + acc.imag**2) / n
    return out


def projection_gain_grid(positions, basis, angles, distances, wavenumber):
    """||B^H a(r, theta)||^2 on the grid; returns shape (n_dist, n_angle).

    B holds orthonormal columns (e.g. a signal subspace); the responses a
    are unit-norm, so the result lies in [0, 1] up to roundoff.
    """
    positions = np.ascontiguousarray(positions, dtype=np.float64)
    basis = np.ascontiguousarray(basis, dtype=np.complex128)
    angles = np.asarray(angles, dtype=np.float64)
    distances = np.asarray(distances, dtype=np.float64)
    n = positions.shape[0]
    basis_conj = basis.conj()
    out = np.empty((distances.size, angles.size))
    for j, theta in enumerate(angles):
        u = np.array([np.sin(theta), np.cos(theta), 0.0])
        pts = distances[:, None] * u[None, :]
        d = np.sqrt(np.sum((pts[:, None, :] - positions[None, :, :]) ** 2, axis=-1))
        proj = np.exp(-1j * wavenumber * d) @ basis_conj
        out[:, j] = np.sum(proj.real**2 + proj.imag**2, axis=1) / n
    return out
