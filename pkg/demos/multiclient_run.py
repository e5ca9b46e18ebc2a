"""Three passive parties, each holding a disjoint block of feature columns.

The cut values are averaged across parties before the active party sees
them, and the returned gradient is shared back evenly.
"""

from gafm import GafmConfig, MethodKind, run_multiclient, synthetic_gaussian

cfg = GafmConfig(delta=0.05, epochs=100, batch=256,
                 lr_d=1e-3, lr_g=1e-3, lr_l=1e-3)
dataset = synthetic_gaussian(n=1500, d=12, class_separation=4.0,
                             positive_fraction=0.4, seed=0)

rows, agg = run_multiclient(dataset, counts=[4, 4, 4],
                            methods=[MethodKind.VANILLA, MethodKind.GAFM],
                            cfg=cfg, seeds=[0, 1, 2])

print(f"{'method':<10} {'test AUC':>12} {'leak(mean)':>12}")
for method, stats in agg.items():
    te, leak = stats["test_auc"], stats["leak_mean"]
    print(f"{method:<10} {te[0]:>7.2f}±{te[1]:.2f} {leak[0]:>7.2f}±{leak[1]:.2f}")
