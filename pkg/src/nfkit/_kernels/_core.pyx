# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled polar-grid kernels; mirrors fallback.py exactly."""

from libc.math cimport cos, sin, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def pattern_gain_grid(positions, weights, angles, distances, double wavenumber):
    """|sum_n a_n(r, theta) * w_n|^2 on the grid; shape (n_dist, n_angle)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pos = np.ascontiguousarray(positions, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] w = np.ascontiguousarray(weights, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ang = np.ascontiguousarray(angles, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.ascontiguousarray(distances, dtype=np.float64)
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t n_ang = ang.shape[0]
    cdef Py_ssize_t n_dist = dist.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_dist, n_ang))
    cdef Py_ssize_t i, j, m
    cdef double ux, uy, px, py, dx, dy, dz, d, phase
    cdef double acc_re, acc_im, c, s, wre, wim
    for j in range(n_ang):
        ux = sin(ang[j])
        uy = cos(ang[j])
        for i in range(n_dist):
            px = dist[i] * ux
            py = dist[i] * uy
            acc_re = 0.0
            acc_im = 0.0
            for m in range(n):
                dx = px - pos[m, 0]
                dy = py - pos[m, 1]
                dz = pos[m, 2]
                d = sqrt(dx * dx + dy * dy + dz * dz)
                phase = -wavenumber * d
                c = cos(phase)
                s = sin(phase)
                wre = w[m].real
                wim = w[m].imag
                acc_re += c * wre - s * wim
                acc_im += c * wim + s * wre
            out[i, j] = (acc_re * acc_re + acc_im * acc_im) / n
    return out


def projection_gain_grid(positions, basis, angles, distances, double wavenumber):
    """||B^H a(r, theta)||^2 on the grid; returns shape (n_dist, n_angle)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] pos = np.ascontiguousarray(positions, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] b = np.ascontiguousarray(basis, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ang = np.ascontiguousarray(angles, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.ascontiguousarray(distances, dtype=np.float64)
    cdef Py_ssize_t n = pos.shape[0]
    cdef Py_ssize_t k = b.shape[1]
    cdef Py_ssize_t n_ang = ang.shape[0]
    cdef Py_ssize_t n_dist = dist.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n_dist, n_ang))
    # phase factors exp(-j*k*d) cached per cell, then projected on each column
    cdef cnp.ndarray[cnp.float64_t, ndim=1] pc = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ps = np.empty(n)
    cdef Py_ssize_t i, j, m, col
    cdef double ux, uy, px, py, dx, dy, dz, d, phase
    cdef double acc_re, acc_im, total, bre, bim
    for j in range(n_ang):
        ux = sin(ang[j])
        uy = cos(ang[j])
        for i in range(n_dist):
            px = dist[i] * ux
            py = dist[i] * uy
            for m in range(n):
                dx = px - pos[m, 0]
                dy = py - pos[m, 1]
                dz = pos[m, 2]
                d = sqrt(dx * dx + dy * dy + dz * dz)
                phase = -wavenumber * d
                pc[m] = cos(phase)
                ps[m] = sin(phase)
            total = 0.0
            for col in range(k):
                acc_re = 0.0
                acc_im = 0.0
                for m in range(n):
                    bre = b[m, col].real
                    bim = b[m, col].imag
                    # conj(B[m, col]) * exp(-j*k*d_m)
                    acc_re += bre * pc[m] + bim * ps[m]
                    acc_im += bre * ps[m] - bim * pc[m]
                total += acc_re * acc_re + acc_im * acc_im
            out[i, j] = total / n
    return out
