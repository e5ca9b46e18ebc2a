"""Choose the pseudo-label noise width on a small subsample.

For each candidate width we train a few short runs and score the average
leak-AUC / train-AUC ratio; the winner is the smallest ratio among widths
that still reach the train-AUC floor.
"""

from gafm import GafmConfig, select_delta, synthetic_gaussian

cfg = GafmConfig(delta=0.05, epochs=60, batch=256,
                 lr_d=1e-3, lr_g=1e-3, lr_l=1e-3)
dataset = synthetic_gaussian(n=2000, d=12, class_separation=4.0,
                             positive_fraction=0.4, seed=0)

sel = select_delta(dataset, cfg, grid=[0.05, 0.1, 0.2, 0.3, 0.5],
                   subsample_fraction=0.1, reps=3, tau=0.6)

print(f"{'delta':>6} {'ratio':>7} {'train AUC':>10}")
for delta in sel.grid:
    mark = " <- chosen" if delta == sel.chosen else ""
    print(f"{delta:>6} {sel.ratios[delta]:>7.3f} "
          f"{sel.train_aucs[delta]:>10.3f}{mark}")
