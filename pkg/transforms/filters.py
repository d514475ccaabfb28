from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FilterPair:
    """
    Biorthogonal lowpass pair, both odd-length and whole-sample symmetric.

    analysis sums to 1 and synthesis sums to 2, so analysis followed by
    zero-insertion upsampling and synthesis passes constants unchanged.
    """
    analysis: np.ndarray
    synthesis: np.ndarray

    def biorthogonality_error(self) -> float:
        """max_n |sum_k h[k] g[k - 2n] - delta[n]| with both filters centred at 0."""
        h, g = self.analysis, self.synthesis
        ch, cg = len(h) // 2, len(g) // 2
        worst = 0.0
        span = (len(h) + len(g)) // 4 + 1
        for n in range(-span, span + 1):
            total = 0.0
            for k in range(-ch, ch + 1):
                j = k - 2 * n
                if -cg <= j <= cg:
                    total += h[k + ch] * g[j + cg]
            worst = max(worst, abs(total - (1.0 if n == 0 else 0.0)))
        return worst

    def distortion_error(self) -> float:
        """
        max_w |H0(w)G0(w) + H0(w+pi)G0(w+pi) - 2|, the no-distortion condition of
        the two-channel bank whose highpass filters are the modulated lowpass filters.
        """
        h, g = self.analysis, self.synthesis
        omega = np.linspace(-np.pi, np.pi, 257)
        H0 = _response(h, omega)
        G0 = _response(g, omega)
        H0_shift = _response(h, omega + np.pi)
        G0_shift = _response(g, omega + np.pi)
        distortion = H0 * G0 + H0_shift * G0_shift
        return float(np.max(np.abs(distortion - 2.0)))


def _response(taps: np.ndarray, omega: np.ndarray) -> np.ndarray:
    centre = len(taps) // 2
    n = np.arange(len(taps)) - centre
    return np.real(np.exp(-1j * np.outer(omega, n)) @ taps)


CDF_9_7 = FilterPair(
    analysis=np.array([
        0.02674875741080976, -0.01686411844287495, -0.07822326652898785, 0.2668641184428723,
        0.6029490182363579,
        0.2668641184428723, -0.07822326652898785, -0.01686411844287495, 0.02674875741080976,
    ]),
    synthesis=np.array([
        -0.09127176311424948, -0.05754352622849957, 0.5912717631142470,
        1.115087052456994,
        0.5912717631142470, -0.05754352622849957, -0.09127176311424948,
    ]),
)


@dataclass(frozen=True)
class LiftingSteps:
    """Predict/update factorisation of the same 9-7 pair: d += a*(...), s += b*(...), ..., then scale."""
    predict1: float = -1.586134342059924
    update1: float = -0.052980118572961
    predict2: float = 0.882911075530934
    update2: float = 0.443506852043971
    scale: float = 1.149604398860241


CDF_9_7_LIFTING = LiftingSteps()
