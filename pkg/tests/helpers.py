"""Shared test oracles, independent of the library's evaluation paths."""

from __future__ import annotations

import math

import numpy as np

TWO_PI_I = 2j * math.pi


def phi_series_oracle(theta, terms: int = 60) -> np.ndarray:
    """phi via a scaled Taylor series with argument doubling.

    Scales Theta so that ||2*pi*i*Theta|| <= 1/2, sums ``terms`` Taylor
    terms of both exp(2*pi*i*z) and phi(z), then undoes the scaling with
    the doubling identities E(2T) = E(T)^2 and
    phi(2T) = phi(T) (E(T) + I) / 2.
    """
    t = np.asarray(theta, dtype=complex)
    n = t.shape[0]
    if n == 0:
        return t.copy()
    norm = np.linalg.norm(t, 2) if t.size else 0.0
    doublings = 0
    scaled = t.copy()
    while abs(TWO_PI_I) * np.linalg.norm(scaled, 2) > 0.5:
        scaled = scaled / 2.0
        doublings += 1
    a = TWO_PI_I * scaled
    eye = np.eye(n, dtype=complex)
    term = eye.copy()
    exp_sum = eye.copy()
    phi_sum = eye / 1.0  # k = 0 term of phi1 is I / 1!
    for k in range(1, terms):
        term = term @ a / k
        exp_sum = exp_sum + term
        phi_sum = phi_sum + term / (k + 1)
    phi = TWO_PI_I * phi_sum
    e = exp_sum
    for _ in range(doublings):
        phi = phi @ (e + eye) / 2.0
        e = e @ e
    return phi


def random_complex(rng, *shape, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_theta(rng, n: int, max_norm: float) -> np.ndarray:
    g = random_complex(rng, n, n)
    norm = np.linalg.norm(g, 2)
    target = max_norm * rng.uniform(0.05, 1.0)
    return g * (target / norm)
