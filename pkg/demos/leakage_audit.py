"""Audit one run's cut-layer gradients with every label-stealing attack.

Shows the per-attack leak AUCs, the histogram distances between the two
class-conditional gradient distributions, the leak-AUC ceiling implied by
the symmetric KL, and whether the two gradient components pull the classes
in opposite directions (the cancellation that hides the labels).
"""

from gafm import (GafmConfig, MethodKind, audit_records, direction_report,
                  run_single, synthetic_gaussian)

cfg = GafmConfig(delta=0.05, epochs=100, batch=256,
                 lr_d=1e-3, lr_g=1e-3, lr_l=1e-3)
dataset = synthetic_gaussian(n=1500, d=12, class_separation=4.0,
                             positive_fraction=0.4, seed=0)

for method in (MethodKind.VANILLA, MethodKind.GAFM):
    _, result = run_single(dataset, method, seed=0, cfg=cfg)
    rep = audit_records(result.records)
    print(f"\n{method.value}")
    print(f"  leak AUC  norm={rep.leak_norm:.3f}  mean={rep.leak_mean:.3f}  "
          f"median={rep.leak_median:.3f}")
    print(f"  TVD={rep.tvd:.3f}  sym-KL={rep.sym_kl:.3f}  "
          f"leak ceiling={'n/a' if rep.bound is None else f'{rep.bound:.3f}'}")
    direction = direction_report(result.records)
    if direction is not None:
        print(f"  component class-mean gaps: adversarial={direction.gan_diff:+.4f}  "
              f"penalty={direction.penalty_diff:+.4f}  "
              f"opposite={direction.opposite}")
