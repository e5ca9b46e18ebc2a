"""Split-learning label-leakage laboratory.

A numpy implementation of adversarial split training (GAFM) with its
baselines, label-stealing attacks, leakage metrics, and a seeded
experiment harness.
"""

from .attacks import (DirectionReport, GradientAudit, LeakReport, auc,
                      auc_bound, audit_records, direction_report, leak_auc,
                      mean_attack, median_attack, norm_attack, sym_kl_hist,
                      tvd_hist)
from .baselines import (MethodKind, max_norm_perturb, run_baseline,
                        vanilla_cut_gradient)
from .data import (Dataset, FeaturePartition, SplitSpec, load_credit,
                   load_imdb, load_spambase, normalize_features,
                   partition_features, synthetic_gaussian, train_test_split)
from .gafm import (ActiveState, CutRecords, GafmConfig, TrainResult,
                   cut_gradient, draw_randomized_response, gan_loss,
                   penalty_loss, predict, train)
from .nn import MLP, Adam, DenseLayer, clip_weights, l2_normalize
from .protocol import (Aggregator, AggregatorKind, CutMessageDown,
                       CutMessageUp, PassiveParty, RoundTrace, aggregate,
                       distribute_grad)
from .experiments import (DeltaSelection, RunRow, aggregate_rows,
                          emit_reports, emit_run_artifacts, run_multiclient,
                          run_single, run_table, select_delta, sigma_sweep)

__version__ = "0.1.0"
