"""
Which features predict the simplified score?
=============================================

Four encodings of the same words feed a small MLP. Indicator features,
and especially their repetition series, carry most of the signal.
"""

import numpy as np

from doess import indicators, sequences, simulator, surrogate

sim = simulator.SimulatorParams(n_spins=3, K=16, cycle_grid=(1, 2, 4, 8, 16, 32))
codes = sequences.random_codes(np.random.default_rng(0), size=600)
y = simulator.simplified_scores(codes, sim)

spec = surrogate.RegressorSpec(hidden=(32, 16), dropout=0.0, max_epochs=60, patience=10)
for kind in surrogate.FEATURE_KINDS:
    X = surrogate.featurize_batch(codes, kind)
    report, model = surrogate.cross_validate(X, y, spec, seed=0, k=5, kind=kind)
    print(f"{kind:18s} dim {X.shape[1]:4d}   held-out R^2 {report.r_squared:6.3f}   MAE {report.mae:.4f}")

# the filter network: pulse matrix -> indicators 1-3
words = surrogate.indicator_training_words(np.random.default_rng(1), 1500)
predictor = surrogate.train_indicator_predictor(words, surrogate.RegressorSpec(hidden=(64,), max_epochs=60,
                                                                               patience=10))
test = surrogate.indicator_training_words(np.random.default_rng(2), 5)
print("predicted i1..i3 (rough, small training set):", np.round(predictor.predict_indicators(test), 2).tolist())
print("exact     i1..i3:", np.round(indicators.indicator_matrix(test)[:, :3], 2).tolist())
