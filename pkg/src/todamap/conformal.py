"""Harmonic moments of a contour and the exterior conformal map they determine.

The exterior map is w(z) = exp(phi(z)) z with

    phi(z) = -1/2 d0^2 F - sum_k z^-k / k * d0 dk F,

so its Laurent coefficients follow from first and second derivatives of the
truncated F at the moment point.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .series import MomentVector, TruncatedF

__all__ = [
    "Contour",
    "LaurentMap",
    "MomentVector",
    "moments_from_contour",
    "phi_coefficients",
    "exterior_map",
    "boundary_image",
    "exp_series",
]


@dataclass(frozen=True)
class Contour:
    """Closed, positively oriented curve z(theta), theta in [0, 2 pi).

    Stored as a trigonometric polynomial ``z(theta) = sum_j c_j exp(i j theta)``.
    Sampled curves are converted on construction by FFT, which makes them
    band-limited interpolants of the samples.
    """

    coeffs: dict = field(default_factory=dict)
    kind: str = "trig"
    samples: tuple = ()

    @classmethod
    def trig(cls, coeffs: dict) -> "Contour":
        return cls({int(j): complex(c) for j, c in coeffs.items()}, "trig")

    @classmethod
    def from_samples(cls, points) -> "Contour":
        pts = np.asarray(points, dtype=complex)
        N = len(pts)
        if N < 3:
            raise ValueError("need at least 3 contour samples")
        spectrum = np.fft.fft(pts) / N
        freqs = np.fft.fftfreq(N, d=1.0 / N).astype(int)
        coeffs = {}
        for j, c in zip(freqs, spectrum):
            if N % 2 == 0 and j == -N // 2:
                # split the Nyquist mode symmetrically so the interpolant stays smooth
                coeffs[N // 2] = c / 2
                coeffs[-N // 2] = c / 2
            elif c != 0:
                coeffs[int(j)] = complex(c)
        return cls(coeffs, "samples", tuple(complex(p) for p in pts))

    @classmethod
    def circle(cls, radius: float, center: complex = 0j) -> "Contour":
        return cls.trig({0: center, 1: radius})

    @classmethod
    def ellipse(cls, a: float, b: float) -> "Contour":
        """a cos(theta) + i b sin(theta)."""
        return cls.trig({1: (a + b) / 2, -1: (a - b) / 2})

    def points(self, N: int) -> tuple[np.ndarray, np.ndarray]:
        """Values z(theta_j) and derivatives z'(theta_j) on N uniform angles."""
        theta = 2 * np.pi * np.arange(N) / N
        z = np.zeros(N, dtype=complex)
        dz = np.zeros(N, dtype=complex)
        for j, c in self.coeffs.items():
            e = c * np.exp(1j * j * theta)
            z += e
            dz += 1j * j * e
        return z, dz

    def to_json(self) -> dict:
        if self.kind == "samples":
            return {"kind": "samples", "points": [[p.real, p.imag] for p in self.samples]}
        return {"kind": "trig", "coeffs": {str(j): [c.real, c.imag] for j, c in sorted(self.coeffs.items())}}

    @classmethod
    def from_json(cls, obj: dict) -> "Contour":
        kind = obj.get("kind")
        if kind == "samples":
            return cls.from_samples([complex(re, im) for re, im in obj["points"]])
        if kind == "trig":
            return cls.trig({int(j): complex(re, im) for j, (re, im) in obj["coeffs"].items()})
        raise ValueError(f"unknown contour kind {kind!r}")


@dataclass(frozen=True)
class LaurentMap:
    """w(z) = lead * z + sum_j tail[j] * z**-j."""

    lead: float
    tail: tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        if not self.lead > 0:
            raise ValueError(f"leading coefficient must be positive, got {self.lead}")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.lead * z
        zinv = 1 / z
        power = np.ones_like(z)
        for p in self.tail:
            out = out + p * power
            power = power * zinv
        return out

    @property
    def conformal_radius(self) -> float:
        return 1 / self.lead

    def to_json(self) -> dict:
        return {"lead": self.lead, "tail": [[p.real, p.imag] for p in self.tail]}

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentMap":
        return cls(float(obj["lead"]), tuple(complex(re, im) for re, im in obj.get("tail", [])))


def moments_from_contour(c: Contour, n: int, quad_points: int) -> MomentVector:
    """Exterior harmonic moments t0, t_1..t_n of the domain bounded by ``c``.

    Uses the contour forms t0 = (1/2 pi i) oint conj(z) dz and
    t_k = (1/2 pi i k) oint conj(z) z^-k dz with the trapezoid rule, which is
    spectrally accurate for analytic curves.
    """
    if quad_points % 2 or quad_points < 4 * n or quad_points < 4:
        raise ValueError(f"quad_points must be even and >= 4n (n={n}), got {quad_points}")
    z, dz = c.points(quad_points)
    w = np.conj(z) * dz
    t0 = (np.mean(w) / 1j).real
    if t0 <= 0:
        raise ValueError("contour encloses nonpositive area; check orientation")
    ts = tuple(complex(np.mean(w * z ** (-k)) / (1j * k)) for k in range(1, n + 1))
    return MomentVector(float(t0), ts)


def _derivative_support(f: TruncatedF) -> int:
    return f.halo_index if f.halo_degree >= 1 else f.n


def phi_coefficients(f: TruncatedF, t: MomentVector, J: int) -> list[complex]:
    """[a_0, a_1, ..., a_J] with phi(z) = a_0 + sum_k a_k z^-k."""
    if t.t0 <= 0:
        raise ValueError("t0 must be positive")
    if t.n > f.n:
        raise ValueError(f"moment index {t.n} exceeds series index bound {f.n}")
    if J < 0 or J > _derivative_support(f):
        raise ValueError(
            f"J={J} needs d0 dk F for k <= J; series only resolves k <= {_derivative_support(f)}"
        )
    F0 = f.series().diff("t0")
    a = [-0.5 * F0.diff("t0").evaluate(t)]
    for k in range(1, J + 1):
        a.append(-F0.diff(("t", k)).evaluate(t) / k)
    return a


def exp_series(a: list[complex], order: int) -> list[complex]:
    """Coefficients e_0..e_order of exp(sum_{k>=1} a[k] u^k)."""
    e = [1 + 0j]
    for j in range(1, order + 1):
        acc = 0j
        for k in range(1, min(j, len(a) - 1) + 1):
            acc += k * a[k] * e[j - k]
        e.append(acc / j)
    return e


def exterior_map(f: TruncatedF, t: MomentVector, J: int) -> LaurentMap:
    """Laurent coefficients of w(z) = exp(phi) z: lead = exp(a_0), p_0..p_{J-1}."""
    a = phi_coefficients(f, t, J)
    lead = cmath.exp(a[0])
    e = exp_series(a, J)
    return LaurentMap(lead.real, tuple(lead * e[j + 1] for j in range(J)))


def boundary_image(w: LaurentMap, c: Contour, samples: int) -> np.ndarray:
    """Images w(z) of ``samples`` uniformly spaced boundary points.

    For the exact map every image has modulus 1.
    """
    if samples <= 0:
        return np.zeros(0, dtype=complex)
    z, _ = c.points(samples)
    return w(z)
