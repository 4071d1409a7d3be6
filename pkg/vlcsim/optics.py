"""Lambertian emission, channel gain, noise, SNR and BER formulas.

Every function accepts either plain floats or numpy arrays for its numeric
arguments and returns the same kind. Angles are in radians unless a name
says otherwise.
"""
from __future__ import annotations

import math
import operator
from typing import Tuple, TypeVar

import attr
import numpy as np
from scipy.special import erfc, erfcinv

from .const import (
    DEFAULT_BACKGROUND_CURRENT,
    DEFAULT_BANDWIDTH,
    DEFAULT_EXTRA_NOISE_VARIANCE,
    DEFAULT_I2_FACTOR,
    DEFAULT_MODULATION_INDEX,
    DEFAULT_PAM_ORDER,
    DEFAULT_RECEIVER_AREA,
    DEFAULT_RECEIVER_FOV,
    DEFAULT_RECEIVER_GAIN,
    DEFAULT_RESPONSIVITY,
    ELECTRON_CHARGE,
)
from .utils import is_power_of_two

NumberOrArray = TypeVar("NumberOrArray", np.ndarray, float)

HALF_PI = math.pi / 2
# Slack for angles produced by arccos of clipped cosines.
_ANGLE_SLACK = 1e-12


class OpticsError(Exception):
    """Base class for optics kernel errors."""


class DomainError(OpticsError, ValueError):
    """Raised when an argument lies outside a formula's domain."""


def _check_semi_angle(instance, attribute, value) -> None:
    lambertian_order(value)


def _check_order(instance: EmitterProfile, attribute, value) -> None:
    expected = lambertian_order(instance.semi_angle)
    if not math.isclose(value, expected, rel_tol=1e-9):
        raise DomainError(
            f"lambertian_order {value} does not match semi-angle "
            f"{instance.semi_angle} (expected {expected})"
        )


def _check_power(instance, attribute, value) -> None:
    if not value > 0:
        raise DomainError(f"power_per_led must be positive, got {value}")


@attr.s(frozen=True)
class EmitterProfile:
    """Lambertian emission law of a single LED.

    Build it with from_semi_angle; the order must match the semi-angle.
    """

    semi_angle: float = attr.ib(validator=_check_semi_angle)
    lambertian_order: float = attr.ib(validator=_check_order)
    power_per_led: float = attr.ib(validator=_check_power)

    @classmethod
    def from_semi_angle(cls, semi_angle: float, power_per_led: float) -> EmitterProfile:
        """Create a profile, deriving the Lambertian order from the semi-angle."""
        return cls(semi_angle, lambertian_order(semi_angle), power_per_led)


@attr.s(frozen=True)
class ReceiverSpec:
    """Non-imaging photodetector facing straight up."""

    area: float = attr.ib(default=DEFAULT_RECEIVER_AREA)
    fov: float = attr.ib(default=DEFAULT_RECEIVER_FOV)
    gain: float = attr.ib(default=DEFAULT_RECEIVER_GAIN)
    responsivity: float = attr.ib(default=DEFAULT_RESPONSIVITY)

    @property
    def fov_rad(self) -> float:
        """Return the field-of-view semi-angle in radians."""
        return math.radians(self.fov)


@attr.s(frozen=True)
class SignalParams:
    """Modulation and noise parameters of the link."""

    pam_order: int = attr.ib(default=DEFAULT_PAM_ORDER)
    modulation_index: float = attr.ib(default=DEFAULT_MODULATION_INDEX)
    bandwidth: float = attr.ib(default=DEFAULT_BANDWIDTH)
    background_current: float = attr.ib(default=DEFAULT_BACKGROUND_CURRENT)
    i2_factor: float = attr.ib(default=DEFAULT_I2_FACTOR)
    extra_noise_variance: float = attr.ib(default=DEFAULT_EXTRA_NOISE_VARIANCE)
    electron_charge: float = attr.ib(default=ELECTRON_CHARGE)

    @property
    def noise_floor(self) -> float:
        """Return the noise variance present with no received light."""
        return (
            2
            * self.electron_charge
            * self.background_current
            * self.i2_factor
            * self.bandwidth
            + self.extra_noise_variance
        )


def _as_result(value: np.ndarray):
    """Return a float for 0-d results, the array otherwise."""
    if np.ndim(value) == 0:
        return float(value)
    return value


def _check_angle(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all((arr >= 0) & (arr <= HALF_PI + _ANGLE_SLACK)):
        raise DomainError(f"{name} must lie in [0, pi/2]")
    return arr


def _check_positive(name: str, value) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"{name} must be positive")
    return arr


def _cos(angle: np.ndarray) -> np.ndarray:
    """Cosine that is exactly zero at grazing incidence."""
    return np.where(angle >= HALF_PI, 0.0, np.cos(angle))


def lambertian_order(semi_angle: float) -> float:
    """Return the Lambertian order m for a half-power semi-angle in degrees."""
    if not 0 < semi_angle < 90:
        raise DomainError(f"semi_angle must lie in (0, 90) degrees, got {semi_angle}")
    return -math.log(2) / math.log(math.cos(math.radians(semi_angle)))


def radiant_intensity(profile: EmitterProfile, theta: NumberOrArray) -> NumberOrArray:
    """Return the radiant intensity in W/sr at irradiance angle theta."""
    theta = _check_angle("theta", theta)
    order = profile.lambertian_order
    return _as_result(
        profile.power_per_led * (order + 1) / (2 * math.pi) * _cos(theta) ** order
    )


def los_gain(
    theta: NumberOrArray,
    psi: NumberOrArray,
    distance: NumberOrArray,
    profile: EmitterProfile,
    receiver: ReceiverSpec,
) -> NumberOrArray:
    """Return the direct channel gain from an LED to the receiver."""
    theta = _check_angle("theta", theta)
    psi = _check_angle("psi", psi)
    distance = _check_positive("distance", distance)
    order = profile.lambertian_order

    gain = (
        (order + 1)
        * receiver.area
        * _cos(theta) ** order
        * _cos(psi)
        * receiver.gain
        / (2 * math.pi * distance**2)
    )
    return _as_result(np.where(psi <= receiver.fov_rad, gain, 0.0))


def reflection_source_factor(
    theta: NumberOrArray,
    alpha: NumberOrArray,
    d1: NumberOrArray,
    profile: EmitterProfile,
) -> NumberOrArray:
    """Return the irradiance per watt of LED power falling on a wall patch."""
    theta = _check_angle("theta", theta)
    alpha = _check_angle("alpha", alpha)
    d1 = _check_positive("d1", d1)
    order = profile.lambertian_order
    return _as_result(
        (order + 1) * _cos(theta) ** order * _cos(alpha) / (2 * math.pi * d1**2)
    )


def reflection_receiver_factor(
    beta: NumberOrArray,
    psi: NumberOrArray,
    d2: NumberOrArray,
    patch_area: NumberOrArray,
    reflectivity: float,
    receiver: ReceiverSpec,
) -> NumberOrArray:
    """Return the gain from a diffusely re-emitting wall patch to the receiver."""
    beta = _check_angle("beta", beta)
    psi = _check_angle("psi", psi)
    d2 = _check_positive("d2", d2)
    if not 0 <= reflectivity <= 1:
        raise DomainError(f"reflectivity must lie in [0, 1], got {reflectivity}")

    factor = (
        reflectivity
        * np.asarray(patch_area, dtype=float)
        * _cos(beta)
        * _cos(psi)
        * receiver.area
        * receiver.gain
        / (math.pi * d2**2)
    )
    return _as_result(np.where(psi <= receiver.fov_rad, factor, 0.0))


def q_function(x: NumberOrArray) -> NumberOrArray:
    """Return the Gaussian tail probability Q(x)."""
    return _as_result(0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2)))


def _check_pam_order(pam_order) -> int:
    try:
        order = operator.index(pam_order)
    except TypeError as err:
        raise DomainError(f"PAM order must be an integer, got {pam_order!r}") from err
    if order < 2 or not is_power_of_two(order):
        raise DomainError(f"PAM order must be a power of two >= 2, got {order}")
    return order


def ber_pam(pam_order: int, snr: NumberOrArray) -> NumberOrArray:
    """Return the Gray-coded M-PAM bit error rate at a linear SNR."""
    order = _check_pam_order(pam_order)
    snr = np.asarray(snr, dtype=float)
    if not np.all(snr >= 0):
        raise DomainError("snr must be non-negative")

    prefactor = (order - 1) / (order * math.log2(order))
    return _as_result(prefactor * q_function(np.sqrt(snr / (2 * (order - 1)))))


def ber_threshold_snr(pam_order: int, ber: float) -> float:
    """Return the SNR at which ber_pam reaches the given BER.

    Returns 0 when the BER is at or above the zero-SNR error rate.
    """
    order = _check_pam_order(pam_order)
    if not 0 < ber < 1:
        raise DomainError(f"ber must lie in (0, 1), got {ber}")

    prefactor = (order - 1) / (order * math.log2(order))
    tail = ber / prefactor
    if tail >= 0.5:
        return 0.0
    q_inverse = math.sqrt(2) * float(erfcinv(2 * tail))
    return 2 * (order - 1) * q_inverse**2


def photocurrent(
    optical_power: NumberOrArray, params: SignalParams, receiver: ReceiverSpec
) -> NumberOrArray:
    """Return the RMS signal photocurrent for a received optical power.

    The modulating waveform is taken to have unit mean-square power.
    """
    return _as_result(
        receiver.responsivity
        * params.modulation_index
        * np.asarray(optical_power, dtype=float)
    )


def shot_noise_variance(
    received_power: NumberOrArray, params: SignalParams, receiver: ReceiverSpec
) -> NumberOrArray:
    """Return the total noise variance in A^2 for a received optical power."""
    received_power = np.asarray(received_power, dtype=float)
    charge = params.electron_charge
    return _as_result(
        2 * charge * receiver.responsivity * received_power * params.bandwidth
        + params.noise_floor
    )


def snr_pair(
    signal_data: NumberOrArray,
    signal_rogue: NumberOrArray,
    noise_variance: NumberOrArray,
) -> Tuple[NumberOrArray, NumberOrArray]:
    """Return (SNR of the legitimate link, SNR of the rogue link).

    Each link treats the other link's signal as interference.
    """
    noise_variance = np.asarray(noise_variance, dtype=float)
    if not np.all(noise_variance > 0):
        raise DomainError("noise variance must be positive")

    data_power = np.asarray(signal_data, dtype=float) ** 2
    rogue_power = np.asarray(signal_rogue, dtype=float) ** 2
    return (
        _as_result(data_power / (noise_variance + rogue_power)),
        _as_result(rogue_power / (noise_variance + data_power)),
    )
