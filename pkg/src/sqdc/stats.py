"""Estimators and the one-sided rate test for probe mismatches.

The mismatch rate of reflected probes estimates half the corruption rate
of the channel: a probe that was attacked or disturbed comes up
inconsistent with probability 1/2, an untouched probe never does.  The
session-level decision compares the corruption rate seen during the
message phase against the disturbance-only rate (known a priori, or
estimated from an attack-free calibration phase) with a one-sided
two-proportion z-test: only an excess is evidence of an attacker, since
disturbance is part of the baseline either way.

Also here: the closed-form detection probability of the strict
abort-on-first-mismatch check, a normal-quantile routine good to 1e-7, a
sample-size advisory for the normal approximation, and Wilson score
intervals used for Monte Carlo error bars.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional


def estimate_kappa(mismatches: int, probes: int) -> float:
    """Corruption-rate estimate from message-phase probes: 2*C/r.

    Twice the observed mismatch rate, because a corrupted probe only
    shows up half the time.  Can exceed 1.0 in unlucky samples; callers
    cap it for display but use it raw in the test statistic.
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    if not 0 <= mismatches <= probes:
        raise ValueError(f"mismatch count {mismatches} outside [0, {probes}]")
    return 2.0 * mismatches / probes


def estimate_omega(mismatches: int, probes: int) -> float:
    """Disturbance-rate estimate from calibration-phase probes: 2*C'/s."""
    if probes < 1:
        raise ValueError("probes must be >= 1")
    if not 0 <= mismatches <= probes:
        raise ValueError(f"mismatch count {mismatches} outside [0, {probes}]")
    return 2.0 * mismatches / probes


def z_statistic(
    kappa_hat: float,
    omega_hat: float,
    mismatches: int,
    baseline_mismatches: int,
    probes: int,
    baseline_probes: int,
) -> float:
    """Two-proportion z statistic for corruption rate vs. disturbance rate.

    Uses the pooled rate nu = 2(C + C')/(r + s) in the variance, the
    standard construction when the null hypothesis is equality.  With no
    mismatches anywhere the variance degenerates to zero; that sample is
    the strongest possible support for the null, so the statistic is
    defined as 0 there.
    """
    if probes < 1 or baseline_probes < 1:
        raise ValueError("probe counts must be >= 1")
    nu = 2.0 * (mismatches + baseline_mismatches) / (probes + baseline_probes)
    var = 2.0 * nu * (1.0 - nu / 2.0) * (1.0 / probes + 1.0 / baseline_probes)
    if var <= 0.0:
        return 0.0
    return (kappa_hat - omega_hat) / math.sqrt(var)


def z_statistic_known(kappa_hat: float, omega: float, probes: int) -> float:
    """One-sample z statistic against a known disturbance rate.

    The textbook variance here uses the true corruption rate, which is
    exactly what is unknown at test time, so the estimate is plugged
    in; when the sample shows no mismatches at all the known rate is
    plugged in instead to avoid 0/0.  If the variance is still zero the
    sign of the numerator decides: a non-positive excess can never
    reject, a positive excess with zero nominal variance always does.
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    var = 2.0 * kappa_hat * (1.0 - kappa_hat / 2.0) / probes
    if var <= 0.0 and kappa_hat == 0.0:
        var = 2.0 * omega * (1.0 - omega / 2.0) / probes
    if var <= 0.0:
        return 0.0 if kappa_hat - omega <= 0.0 else math.inf
    return (kappa_hat - omega) / math.sqrt(var)


def corruption_rate(p: float, omega: float) -> float:
    """Probability a travelling qubit is touched at all: 1-(1-p)(1-omega)."""
    return 1.0 - (1.0 - p) * (1.0 - omega)


def detection_probability(p: float, r: int, omega: float = 0.0) -> float:
    """Chance that r probes contain at least one mismatch: 1-(1-kappa/2)^r.

    Each probe is corrupted with probability kappa = 1-(1-p)(1-omega) and
    a corrupted probe mismatches with probability 1/2.  With omega=0 this
    is the strict protocol's detection rate against attack rate p.
    """
    if r < 0:
        raise ValueError("r must be >= 0")
    return 1.0 - (1.0 - corruption_rate(p, omega) / 2.0) ** r


# Rational approximation of the standard normal quantile (Acklam's
# coefficients), then one Halley step against the erfc-based CDF, which
# brings the absolute error below 1e-13 everywhere we evaluate it.
_QA = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
       1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_QB = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
       6.680131188771972e+01, -1.328068155288572e+01)
_QC = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
       -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_QD = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
       3.754408661907416e+00)


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@lru_cache(maxsize=None)
def normal_quantile(alpha: float) -> float:
    """Upper-tail quantile z such that Pr[Z > z] = alpha for Z ~ N(0,1)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")
    p = 1.0 - alpha  # lower-tail probability
    if p == 0.5:
        return 0.0
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_QC[0] * q + _QC[1]) * q + _QC[2]) * q + _QC[3]) * q + _QC[4]) * q + _QC[5])
             / ((((_QD[0] * q + _QD[1]) * q + _QD[2]) * q + _QD[3]) * q + 1.0))
    elif p <= 1.0 - p_low:
        q = p - 0.5
        t = q * q
        x = ((((((_QA[0] * t + _QA[1]) * t + _QA[2]) * t + _QA[3]) * t + _QA[4]) * t + _QA[5]) * q
             / (((((_QB[0] * t + _QB[1]) * t + _QB[2]) * t + _QB[3]) * t + _QB[4]) * t + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((_QC[0] * q + _QC[1]) * q + _QC[2]) * q + _QC[3]) * q + _QC[4]) * q + _QC[5])
              / ((((_QD[0] * q + _QD[1]) * q + _QD[2]) * q + _QD[3]) * q + 1.0))
    # Halley refinement against the high-precision CDF.
    err = normal_cdf(x) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def normal_approx_threshold(kappa: float) -> float:
    """Smallest probe count at which the normal approximation is advised.

    Standard binomial rule-of-thumb evaluated at the per-probe mismatch
    probability kappa/2; grows without bound as kappa -> 0.
    """
    if not 0.0 < kappa <= 1.0:
        raise ValueError(f"kappa must be in (0,1], got {kappa}")
    denom = kappa * (2.0 - kappa)
    first = 180.0 * (1.0 - kappa) ** 2 / denom
    second = 56.0 * abs(1.0 - 3.0 * kappa * (1.0 - kappa / 2.0)) / denom
    return max(first, second)


def normal_approx_valid(kappa: float, r: int) -> bool:
    """Whether r probes are enough to trust the z-test's normal tails.

    Advisory only: callers warn, they never block, because the test stays
    usefully conservative below the threshold.
    """
    return r >= normal_approx_threshold(kappa)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Preferred over the Wald interval because it behaves at the 0 and 1
    boundaries and at the small counts our sweep grids produce.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes {successes} outside [0, {trials}]")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must be in (0,1), got {confidence}")
    z = normal_quantile((1.0 - confidence) / 2.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials))
    # At the boundaries center-half is exactly 0 (resp. center+half exactly
    # 1) on paper; don't let rounding push the interval off its endpoint.
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


class ErrorKind(enum.Enum):
    """Classification of a session decision against ground truth."""

    MISSED_ATTACK = "missed_attack"  # attack happened, test accepted
    FALSE_ALARM = "false_alarm"      # no attack, test rejected
    CORRECT = "correct"


def classify_error(attacked: bool, rejected: bool) -> ErrorKind:
    if attacked and not rejected:
        return ErrorKind.MISSED_ATTACK
    if rejected and not attacked:
        return ErrorKind.FALSE_ALARM
    return ErrorKind.CORRECT


@dataclass(frozen=True)
class DetectionStats:
    """Everything the rate test computed for one session.

    ``omega_hat`` is the known disturbance rate when ``omega_known`` is
    set, otherwise the calibration-phase estimate; ``nu_hat`` (the pooled
    rate) only exists in the two-sample case.  ``kappa_hat`` is reported
    capped at 1.0; the statistic used the raw value.
    """

    mismatches: int
    probes: int
    baseline_mismatches: Optional[int]
    baseline_probes: Optional[int]
    kappa_hat: float
    omega_hat: float
    nu_hat: Optional[float]
    z: float
    threshold: float
    rejected: bool
    omega_known: bool
    approx_ok: bool

    def to_dict(self) -> dict:
        return {
            "mismatches": self.mismatches,
            "probes": self.probes,
            "baseline_mismatches": self.baseline_mismatches,
            "baseline_probes": self.baseline_probes,
            "kappa_hat": self.kappa_hat,
            "omega_hat": self.omega_hat,
            "nu_hat": self.nu_hat,
            "z": self.z,
            "threshold": self.threshold,
            "rejected": self.rejected,
            "omega_known": self.omega_known,
            "approx_ok": self.approx_ok,
        }


def rate_test(
    mismatches: int,
    probes: int,
    alpha: float,
    *,
    omega: Optional[float] = None,
    baseline_mismatches: Optional[int] = None,
    baseline_probes: Optional[int] = None,
) -> DetectionStats:
    """Run the one-sided excess-corruption test and package the result.

    Pass ``omega`` for the known-disturbance variant, or the calibration
    counts for the estimated variant (exactly one of the two).
    """
    kappa_raw = estimate_kappa(mismatches, probes)
    threshold = normal_quantile(alpha)
    if omega is not None:
        if baseline_mismatches is not None or baseline_probes is not None:
            raise ValueError("pass either omega or baseline counts, not both")
        z = z_statistic_known(kappa_raw, omega, probes)
        omega_hat = omega
        nu_hat = None
        base_m = base_p = None
    else:
        if baseline_mismatches is None or baseline_probes is None:
            raise ValueError("estimated variant needs baseline mismatches and probes")
        omega_hat = estimate_omega(baseline_mismatches, baseline_probes)
        nu_hat = 2.0 * (mismatches + baseline_mismatches) / (probes + baseline_probes)
        z = z_statistic(kappa_raw, omega_hat, mismatches, baseline_mismatches,
                        probes, baseline_probes)
        base_m, base_p = baseline_mismatches, baseline_probes
    return DetectionStats(
        mismatches=mismatches,
        probes=probes,
        baseline_mismatches=base_m,
        baseline_probes=base_p,
        kappa_hat=min(kappa_raw, 1.0),
        omega_hat=omega_hat,
        nu_hat=nu_hat,
        z=z,
        threshold=threshold,
        rejected=z > threshold,
        omega_known=omega is not None,
        approx_ok=(kappa_raw > 0.0 and normal_approx_valid(min(kappa_raw, 1.0), probes)),
    )
