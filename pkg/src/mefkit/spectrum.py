"""2D Fourier core and frequency-domain fusion experiments.

All transforms use the unitary convention: both the forward and the inverse
transform carry a 1/sqrt(H*W) prefactor. Under this convention Parseval's
identity is exact and the DC amplitude equals sqrt(H*W) times the image mean,
which the amplitude-swap and amplitude-fusion experiments rely on.

The 1D kernel is a radix-2 Cooley-Tukey FFT for power-of-two lengths and a
direct matrix transform otherwise; the direct path doubles as the correctness
oracle for the FFT path.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Spectrum",
    "dft2",
    "idft2",
    "unitary_dft2",
    "unitary_idft2",
    "swap_amplitude",
    "fuse_amplitude_weighted",
    "clamp_plane",
    "swap_experiment",
    "weighted_fusion_experiment",
    "ExperimentImage",
    "SwapExperimentResult",
]

# Per-length caches for bit-reversal permutations, butterfly twiddles and
# direct transform matrices, keyed so forward/inverse kernels stay separate.
_BITREV_CACHE: dict[int, np.ndarray] = {}
_TWIDDLE_CACHE: dict[tuple[int, int], list[np.ndarray]] = {}
_MATRIX_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def _bitrev_indices(n):
    idx = _BITREV_CACHE.get(n)
    if idx is None:
        bits = n.bit_length() - 1
        idx = np.zeros(n, dtype=np.intp)
        for i in range(n):
            r = 0
            v = i
            for _ in range(bits):
                r = (r << 1) | (v & 1)
                v >>= 1
            idx[i] = r
        _BITREV_CACHE[n] = idx
    return idx


def _stage_twiddles(n, sign):
    key = (n, sign)
    tw = _TWIDDLE_CACHE.get(key)
    if tw is None:
        tw = []
        m = 2
        while m <= n:
            half = m // 2
            tw.append(np.exp(sign * 2j * np.pi * np.arange(half) / m))
            m *= 2
        _TWIDDLE_CACHE[key] = tw
    return tw


def _fft_pow2_last(x, sign):
    """Iterative radix-2 FFT along the last axis (length must be 2**k)."""
    n = x.shape[-1]
    if n == 1:
        return x.copy()
    a = x[..., _bitrev_indices(n)]
    for w in _stage_twiddles(n, sign):
        m = 2 * w.shape[0]
        blocks = a.reshape(a.shape[:-1] + (n // m, m))
        even = blocks[..., : m // 2]
        odd = blocks[..., m // 2 :] * w
        a = np.concatenate([even + odd, even - odd], axis=-1).reshape(a.shape)
    return a


def _dft_matrix(n, sign):
    key = (n, sign)
    mat = _MATRIX_CACHE.get(key)
    if mat is None:
        k = np.arange(n)
        mat = np.exp(sign * 2j * np.pi * np.outer(k, k) / n)
        _MATRIX_CACHE[key] = mat
    return mat


def _transform_last(x, sign):
    n = x.shape[-1]
    if _is_pow2(n):
        return _fft_pow2_last(x, sign)
    # Direct O(n^2) fallback: y[k] = sum_j x[j] exp(sign*2i*pi*j*k/n).
    return x @ _dft_matrix(n, sign)


def _transform2d(x, sign):
    out = _transform_last(x, sign)
    out = np.swapaxes(_transform_last(np.swapaxes(out, -1, -2), sign), -1, -2)
    return out


def unitary_dft2(plane):
    """Unitary 2D DFT over the last two axes of a real or complex array."""
    x = np.asarray(plane, dtype=np.complex128)
    h, w = x.shape[-2], x.shape[-1]
    return _transform2d(x, -1) / np.sqrt(h * w)


def unitary_idft2(spec):
    """Unitary inverse 2D DFT over the last two axes (complex output)."""
    x = np.asarray(spec, dtype=np.complex128)
    h, w = x.shape[-2], x.shape[-1]
    return _transform2d(x, +1) / np.sqrt(h * w)


@dataclass(frozen=True)
class Spectrum:
    """Polar form of a unitary 2D DFT: nonnegative amplitude, phase in (-pi, pi]."""

    amplitude: np.ndarray
    phase: np.ndarray
    normalization: str = "unitary"

    def __post_init__(self):
        amp = np.asarray(self.amplitude, dtype=np.float64)
        pha = np.asarray(self.phase, dtype=np.float64)
        if amp.shape != pha.shape or amp.ndim != 2:
            raise ValueError(
                f"amplitude/phase must be matching 2D arrays, got {amp.shape} vs {pha.shape}"
            )
        if np.any(amp < 0):
            raise ValueError("amplitude must be nonnegative everywhere")
        object.__setattr__(self, "amplitude", amp)
        object.__setattr__(self, "phase", pha)

    @property
    def height(self):
        return self.amplitude.shape[0]

    @property
    def width(self):
        return self.amplitude.shape[1]

    def to_complex(self):
        return self.amplitude * np.exp(1j * self.phase)


def dft2(plane):
    """Transform a single-channel plane into its amplitude/phase spectrum."""
    x = np.asarray(plane, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2D plane, got shape {x.shape}")
    f = unitary_dft2(x)
    return Spectrum(amplitude=np.abs(f), phase=np.arctan2(f.imag, f.real))


def idft2(spec, residue_tol=1e-8):
    """Reconstruct the real plane from a spectrum.

    The imaginary residue of the inverse transform is asserted below
    ``residue_tol`` (holds for any spectrum with conjugate symmetry, i.e.
    anything produced from real images, including amplitude swaps and
    weighted amplitude sums) and then discarded.
    """
    rec = unitary_idft2(spec.to_complex())
    residue = float(np.max(np.abs(rec.imag))) if rec.size else 0.0
    if residue >= residue_tol:
        raise ValueError(
            f"imaginary residue {residue:.3e} exceeds {residue_tol:.1e}; "
            "spectrum does not have conjugate symmetry"
        )
    return rec.real


def clamp_plane(plane, value_range):
    """Clamp a plane into [lo, hi]; returns (clamped, number of clamped pixels)."""
    lo, hi = value_range
    clamped = np.clip(plane, lo, hi)
    return clamped, int(np.count_nonzero(clamped != plane))


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"plane dimensions differ: {a.shape} vs {b.shape}")


def swap_amplitude(a, b, value_range=(0.0, 255.0)):
    """Exchange the amplitude spectra of two planes while keeping each phase.

    Returns (pseudo_a, pseudo_b): pseudo_a carries the amplitude of ``b`` with
    the phase of ``a``, and vice versa. Outputs are clamped to ``value_range``
    (pass None to get the raw reconstructions).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    sa, sb = dft2(a), dft2(b)
    pseudo_a = idft2(Spectrum(sb.amplitude, sa.phase))
    pseudo_b = idft2(Spectrum(sa.amplitude, sb.phase))
    if value_range is not None:
        pseudo_a, _ = clamp_plane(pseudo_a, value_range)
        pseudo_b, _ = clamp_plane(pseudo_b, value_range)
    return pseudo_a, pseudo_b


def fuse_amplitude_weighted(a, b, wa, wb, phase_from="a", value_range=(0.0, 255.0)):
    """Blend the amplitude spectra of two planes and keep one input's phase.

    The fused amplitude is (wa*A(a) + wb*A(b)) / (wa + wb); ``phase_from``
    selects whose phase survives ("a" or "b"). The reconstruction is clamped
    to ``value_range`` unless it is None.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    if wa < 0 or wb < 0 or wa + wb <= 0:
        raise ValueError(f"weights must be nonnegative with a positive sum, got ({wa}, {wb})")
    if phase_from not in ("a", "b"):
        raise ValueError(f"phase_from must be 'a' or 'b', got {phase_from!r}")
    sa, sb = dft2(a), dft2(b)
    amp = (wa * sa.amplitude + wb * sb.amplitude) / (wa + wb)
    phase = sa.phase if phase_from == "a" else sb.phase
    fused = idft2(Spectrum(amp, phase))
    if value_range is not None:
        fused, _ = clamp_plane(fused, value_range)
    return fused


@dataclass(frozen=True)
class ExperimentImage:
    """A reconstructed plane plus the clamp bookkeeping the reports need."""

    plane: np.ndarray
    preclamp_mean: float
    clamped_pixels: int

    @property
    def mean(self):
        return float(np.mean(self.plane))


@dataclass(frozen=True)
class SwapExperimentResult:
    pseudo_a: ExperimentImage
    pseudo_b: ExperimentImage


def _finish(raw, value_range):
    clamped, count = clamp_plane(raw, value_range)
    return ExperimentImage(plane=clamped, preclamp_mean=float(np.mean(raw)), clamped_pixels=count)


def swap_experiment(a, b, value_range=(0.0, 255.0)):
    """Amplitude-swap experiment with pre-clamp means and clamp counts."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_shape(a, b)
    raw_a, raw_b = swap_amplitude(a, b, value_range=None)
    return SwapExperimentResult(_finish(raw_a, value_range), _finish(raw_b, value_range))


def weighted_fusion_experiment(a, b, wa, wb, phase_from="a", value_range=(0.0, 255.0)):
    """Weighted amplitude-fusion experiment with pre-clamp mean and clamp count."""
    raw = fuse_amplitude_weighted(a, b, wa, wb, phase_from, value_range=None)
    return _finish(raw, value_range)
