from .experiment import (ALGORITHMS, RunRecord, ScenarioConfig, check_budget_safety,
                         energy_identity, make_instance, run_experiment)
from .report import CSV_HEADER, csv_text, emit_report, write_csv
from .scenarios import (DELAY_RANGE, MULTICAST_BUDGET, POI_AREA, POI_BUDGET, POI_COUNT,
                        POI_TRAVEL_RATE, gen_instance, gen_multicast_instance, gen_poi_instance,
                        load_instance, poi_points, write_instance)

__all__ = [
    "ALGORITHMS", "CSV_HEADER", "DELAY_RANGE", "MULTICAST_BUDGET", "POI_AREA", "POI_BUDGET",
    "POI_COUNT", "POI_TRAVEL_RATE", "RunRecord", "ScenarioConfig", "check_budget_safety",
    "csv_text", "emit_report", "energy_identity", "gen_instance", "gen_multicast_instance",
    "gen_poi_instance", "load_instance", "make_instance", "poi_points", "run_experiment",
    "write_csv", "write_instance",
]
