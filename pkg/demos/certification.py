# Ratio certification across all variants, as run by the acceptance suite.
from irpfl.harness import ExperimentConfig, certify, summarize

configs = {
    "uncapacitated star": ExperimentConfig(variant="UNCAP", seeds="0-29", n_range=(2, 5), T_range=(1, 4)),
    "capacitated access": ExperimentConfig(problem="iap", variant="CAP_SPLIT", capacity=6, seeds="0-49",
                                           T_range=(1, 6)),
    "whole-item access": ExperimentConfig(problem="iap", variant="CAP_UNSPLIT", capacity=6, seeds="0-49",
                                          T_range=(1, 6), items_per_day=2),
    "capacitated star": ExperimentConfig(variant="CAP_SPLIT", capacity=5, seeds="0-29", n_range=(2, 4),
                                         T_range=(1, 3)),
    "whole-item star": ExperimentConfig(variant="CAP_UNSPLIT", capacity=5, seeds="0-29", n_range=(2, 4),
                                        T_range=(1, 3)),
}

for name, cfg in configs.items():
    report = certify(cfg, workers=1)
    print(f"== {name}")
    print(summarize(report))
    # the worst instance by ratio against the exact optimum
    worst = max(report.rows, key=lambda r: r.ratio_vs_opt or 0)
    print(f"worst seed {worst.seed}: rounded {worst.rounded_total} vs optimum {worst.oracle_opt}")

print(configs["uncapacitated star"].to_dict())
