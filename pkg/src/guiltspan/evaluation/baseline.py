"""Constant-prediction baseline: train-set mean as the predictor."""

import numpy as np


def mean_baseline(train_targets, test_targets) -> float:
    train = np.asarray(train_targets, dtype=float)
    test = np.asarray(test_targets, dtype=float)
    if train.size == 0 or test.size == 0:
        raise ValueError("empty split")
    return float(np.mean((test - train.mean()) ** 2))
