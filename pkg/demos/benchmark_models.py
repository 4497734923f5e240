"""Benchmark two toy generated sets against a reference and a training set."""

import numpy as np

from molforge.benchmark import benchmark_report, to_csv
from molforge.generators import lm_train
from molforge.molgraph.elements import data_path
from molforge.molgraph.io import read_smi

corpus = read_smi(data_path("corpus.smi"))
train, reference = corpus[:600], corpus[600:1200]
rng = np.random.default_rng(0)
batches = {
    "ngram6": lm_train(train, order=6).sample(300, rng),
    "copy_training": list(rng.choice(train, 300)),
}
print(to_csv(benchmark_report(batches, reference, train, k=300)), end="")
