from .crosscut import avg_interpretability, avg_life_cycle_impact, sustainable_behavior_score
from .economic import (
    avg_loyalty,
    exposure_histogram,
    local_business_rate,
    pef_from_counts,
    producer_exposure_fairness,
    user_loyalty,
)
from .environmental import (
    avg_carbon_footprint,
    energy_per_data_unit,
    energy_per_epoch,
    energy_per_recommendation,
    energy_savings,
    green_item_rate,
    reuse_gain,
)
from .registry import METRIC_NAMES, compute_metric, evaluate
from .social import (
    accessibility_score,
    demographic_parity,
    exposure_probability,
    harmful_exposure_rate,
    health_improvement,
    inclusivity_gap,
    intra_list_diversity,
    serendipity,
)
