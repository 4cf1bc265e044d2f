"""Radar and communication figures of merit for a designed set of beamformers."""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .array_model import AngularRegion, as_covariances, check_hermitian, lobe_matrix, steering_vector
from .chance_constraint import monte_carlo_outage
from .channel_model import achievable_rate, db_to_linear, linear_to_db, realized_sinr

MARCUM_TOL = 1e-13
DEFAULT_MAINLOBE = math.radians(20.0)


@dataclass(frozen=True)
class RadarSettings:
    mainlobe_width: float = DEFAULT_MAINLOBE  # radians
    snr_r_db: float = 1.0
    p_fa: float = 1e-4
    quad_points: int = 256

    def __post_init__(self):
        if not 0 < self.mainlobe_width < math.pi:
            raise ValueError("mainlobe width must lie in (0, pi)")
        if not 0 < self.p_fa <= 1:
            raise ValueError("p_fa must lie in (0, 1]")


def _total_covariance(w_set):
    mats = as_covariances(w_set)
    check_hermitian(mats)
    return mats.sum(axis=0)


def lobe_power(cfg, w_set, region, quad_points=256):
    """Integral of the Bartlett power a^T R a* over ``region``.

    Since a^T R a* = Tr(R a* a^T), this is Tr(R conj(A)) = sum_ij R_ij A_ij
    for the lobe matrix A = int a a^H.
    """
    R = _total_covariance(w_set)
    A = lobe_matrix(cfg, region, quad_points)
    return float(np.sum(R * A).real)


def ismr(w_set, cfg, theta0, mainlobe_width=DEFAULT_MAINLOBE, quad_points=256):
    """Integrated sidelobe-to-mainlobe ratio of the total transmit covariance."""
    main = AngularRegion.mainlobe(theta0, mainlobe_width)
    side = main.complement()
    p_main = lobe_power(cfg, w_set, main, quad_points)
    if not p_main > 0:
        raise ValueError("beam radiates no power into the mainlobe")
    if not side.intervals:
        return 0.0
    return lobe_power(cfg, w_set, side, quad_points) / p_main


def marcum_q1(a, b):
    """First-order Marcum Q function Q_1(a, b) = Pr(chi'^2_2(a^2) > b^2).

    Evaluated as a Poisson mixture of central chi-square tails,

        Q_1 = sum_j Pois(j; a^2/2) * Pr(chi^2_{2j+2} > b^2),
        Pr(chi^2_{2j+2} > t) = e^{-t/2} sum_{i<=j} (t/2)^i / i!,

    truncated once the remaining Poisson mass is below ``MARCUM_TOL``.
    """
    if a < 0 or b < 0:
        raise ValueError("Marcum Q arguments must be nonnegative")
    x = a * a / 2
    y = b * b / 2
    if y == 0:
        return 1.0
    if x == 0:
        return math.exp(-y)
    log_x, log_y = math.log(x), math.log(y)
    total = 0.0
    central = 0.0  # Pr(chi^2_{2j+2} > t)
    j = 0
    while True:
        central += math.exp(-y + j * log_y - math.lgamma(j + 1))
        weight = math.exp(-x + j * log_x - math.lgamma(j + 1))
        total += weight * min(central, 1.0)
        # for j + 1 > x the Poisson tail beyond j is at most weight * r / (1 - r)
        r = x / (j + 2)
        if j + 1 > x and r < 1 and weight * r / (1 - r) < MARCUM_TOL:
            break
        j += 1
    return min(total, 1.0)


def detection_probability_from_nc(noncentrality, p_fa):
    """P_D of the chi-square detector with 2 degrees of freedom."""
    if not 0 < p_fa <= 1:
        raise ValueError("p_fa must lie in (0, 1]")
    if noncentrality < 0:
        raise ValueError("noncentrality must be nonnegative")
    if p_fa == 1:
        return 1.0
    if noncentrality == 0:
        return float(p_fa)
    threshold = -2.0 * math.log(p_fa)  # inverse central chi^2_2 CDF at 1 - p_fa
    return marcum_q1(math.sqrt(noncentrality), math.sqrt(threshold))


def detection_noncentrality(w_set, cfg, theta0, snr_r_linear):
    """snr_r * |look-direction power|^2, with the power a^T R a* used by the design."""
    R = _total_covariance(w_set)
    a = steering_vector(cfg, theta0)
    power = abs(a @ R @ a.conj())
    return snr_r_linear * power**2


def detection_probability(w_set, cfg, theta0, snr_r_linear, p_fa):
    if not snr_r_linear > 0:
        raise ValueError("radar SNR must be positive")
    lam = detection_noncentrality(w_set, cfg, theta0, snr_r_linear)
    return detection_probability_from_nc(lam, p_fa)


def feasibility_rate(outcomes):
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("no outcomes to average")
    return sum(bool(o) for o in outcomes) / len(outcomes)


@dataclass
class MetricReport:
    per_user_rate: list
    sum_rate: float
    avg_rate_per_user: float
    empirical_outage: list
    ismr: float
    ismr_inv_db: float
    p_detect: float
    feasible: bool
    extra: dict = field(default_factory=dict)

    @classmethod
    def infeasible(cls, n_users, **extra):
        nan = float("nan")
        return cls([nan] * n_users, nan, nan, [nan] * n_users, nan, nan, nan, False, dict(extra))

    def to_text(self):
        return json.dumps(asdict(self), indent=2, allow_nan=True)


def report(channels, array, theta0, w_set, rng, mc_trials, radar=None, feasible=True):
    """Evaluate beamformers ``w_set`` on a scenario.

    Rates use the nominal channels; outage is estimated from ``mc_trials``
    channel-error draws per user.  Passing ``feasible=False`` (or no
    beamformers) yields a report whose metrics are NaN.
    """
    radar = radar or RadarSettings()
    K = channels.n_users
    if not feasible or w_set is None:
        return MetricReport.infeasible(K)
    rates = []
    outage = []
    for k, (h, user) in enumerate(zip(channels.nominal, channels.users)):
        sinr = realized_sinr(w_set, h, k, channels.noise_var)
        rates.append(float(achievable_rate(sinr)))
        outage.append(monte_carlo_outage(w_set, k, h, user, channels.noise_var, mc_trials, rng))
    ratio = ismr(w_set, array, theta0, radar.mainlobe_width, radar.quad_points)
    pd = detection_probability(w_set, array, theta0, db_to_linear(radar.snr_r_db), radar.p_fa)
    total = float(sum(rates))
    return MetricReport(
        per_user_rate=rates, sum_rate=total, avg_rate_per_user=total / K,
        empirical_outage=outage, ismr=ratio,
        ismr_inv_db=float(linear_to_db(1.0 / ratio)) if ratio > 0 else float("inf"),
        p_detect=pd, feasible=True,
    )
