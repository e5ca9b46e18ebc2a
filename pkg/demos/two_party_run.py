"""Two-party split training: a defended run next to the undefended baseline.

One passive party holds all features, the active party holds the labels.
We train both methods over a few seeds and print the utility/leakage table.
"""

from gafm import GafmConfig, MethodKind, aggregate_rows, run_table, synthetic_gaussian

cfg = GafmConfig(delta=0.05, epochs=100, batch=256,
                 lr_d=1e-3, lr_g=1e-3, lr_l=1e-3)
dataset = synthetic_gaussian(n=1500, d=12, class_separation=4.0,
                             positive_fraction=0.4, seed=0)

rows, _ = run_table(dataset, [MethodKind.VANILLA, MethodKind.GAFM],
                    cfg, seeds=[0, 1, 2])

print(f"{'method':<10} {'seed':>4} {'test AUC':>9} {'leak(mean)':>11} {'TVD':>6}")
for r in rows:
    print(f"{r.method:<10} {r.seed:>4} {r.test_auc:>9.3f} "
          f"{r.leak_mean:>11.3f} {r.tvd:>6.3f}")

print("\naggregates (mean ± sample std):")
for method, stats in aggregate_rows(rows).items():
    te, leak = stats["test_auc"], stats["leak_mean"]
    print(f"  {method:<10} test {te[0]:.2f}±{te[1]:.2f}   "
          f"leak {leak[0]:.2f}±{leak[1]:.2f}")
