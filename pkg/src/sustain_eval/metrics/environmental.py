"""Environmental metrics: footprint of recommended items, green share, energy."""

from ..errors import RangeError, UndefinedMetric
from ..model import Dataset, EnergyLedger, MetricReport, PairedObservation
from ._kernels import double_average, slot_rate


def avg_carbon_footprint(ds: Dataset) -> MetricReport:
    """Average over users of the mean carbon footprint in each user's list.

    Items without a footprint are skipped; users with no footprint-bearing
    item are excluded from the outer average and counted in ``coverage``.
    """
    report = double_average(ds, "avgcarfi", lambda it: it.carbon_footprint)
    report.details["unit"] = ds.config.carbon_unit
    return report


def green_item_rate(ds: Dataset) -> MetricReport:
    value, known, total = slot_rate(ds, lambda u, it: it.is_green)
    if value is None:
        return MetricReport.undefined("girec", "no green flags known")
    return MetricReport(name="girec", value=value, coverage=known / total)


def _ratio(num, den, what):
    if den == 0:
        raise UndefinedMetric(f"{what} is zero")
    return num / den


def energy_per_recommendation(ledger: EnergyLedger) -> float:
    return _ratio(ledger.e_inference_kwh, ledger.n_rec, "n_rec")


def energy_per_epoch(ledger: EnergyLedger) -> float:
    return _ratio(ledger.ec_build_kwh, ledger.n_epoch, "n_epoch")


def energy_per_data_unit(ledger: EnergyLedger) -> float:
    return _ratio(ledger.ec_build_kwh, ledger.n_data_processed, "n_data_processed")


def energy_savings(obs: PairedObservation) -> float:
    """Relative reduction ``(baseline - treatment) / baseline``.

    Not clamped: a negative value means consumption went up.
    """
    if obs.baseline == 0:
        raise UndefinedMetric("baseline energy is zero")
    return (obs.baseline - obs.treatment) / obs.baseline


def reuse_gain(obs: PairedObservation) -> float:
    for side in (obs.baseline, obs.treatment):
        if not 0.0 <= side <= 1.0:
            raise RangeError(f"reuse rate {side} outside [0, 1]")
    return obs.treatment - obs.baseline
