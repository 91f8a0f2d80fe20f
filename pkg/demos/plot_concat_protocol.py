"""
Concatenated classification instances
=====================================

Twenty instances of one class are concatenated with one instance of
another class at a random position; a detector is scored by how much of
its reported target falls inside that instance. Point the script at a
classification file in UCR text form (label first on every line) to use
real data::

    python plot_concat_protocol.py ECG200_TRAIN.txt 1

Without arguments a synthetic two-class beat pool is used.
"""

import sys

import numpy as np

from semdiscord import InstancePool, run_concat_protocol

if len(sys.argv) > 1:
    pool = InstancePool.from_file(sys.argv[1])
    label = type(pool.labels[0])(sys.argv[2]) if len(sys.argv) > 2 else pool.labels[0]
else:
    rng = np.random.default_rng(0)
    t = np.linspace(0, 1, 60)
    beat = np.exp(-((t - 0.3) / 0.03) ** 2) - 0.2 * np.exp(-((t - 0.6) / 0.08) ** 2)
    odd = np.exp(-((t - 0.3) / 0.03) ** 2) + 0.35 * np.exp(-((t - 0.7) / 0.05) ** 2)
    inst = [beat + 0.02 * rng.standard_normal(60) for _ in range(15)]
    inst += [odd + 0.02 * rng.standard_normal(60) for _ in range(5)]
    pool = InstancePool(tuple(inst), tuple([1] * 15 + [2] * 5), "synthetic")
    label = 1

normal, anomaly = pool.with_label(label), pool.without_label(label)
print(f"{len(normal)} normal instances (label {label}), {len(anomaly)} anomalous")

res = run_concat_protocol(normal, anomaly, count=20, seed=0)
print(f"context length {res.context_len}, target length {res.target_len}")
for name, value in res.means().items():
    print(f"  mean overlapping rate, {name:16s} {value:.3f}")
