"""Tokenize source code and build the document-term matrix.

Run:  python demos/02_bag_of_words.py
"""

import numpy as np

from qflake import fit_vocabulary, tokenize, transform
from qflake.text import get_tokenizer_profile

snippet = """
def test_measure_counts(self):
    backend = AerSimulator(seed_simulator=42)
    result = backend.run(circuit, shots=1024).result()
    assert result.get_counts()  # flaky when shots are too few
"""

tokens = tokenize(snippet)
print("default profile (lowercased, runs of length >= 2):")
print(" ", tokens[:12], "...")

strict = tokenize(snippet, get_tokenizer_profile("strict_code"))
print("strict_code profile keeps case and single characters:")
print(" ", strict[:12], "...")

docs = [
    tokenize("if qubit.measure() else retry()"),
    tokenize("parse config and validate schema"),
    tokenize("retry retry retry until measure settles"),
]
vocab = fit_vocabulary(docs)
matrix = transform(docs, vocab)
print(f"\nvocabulary ({len(vocab)} tokens): {vocab.ordered_tokens}")
print("document-term matrix (rows = docs, cells = raw counts):")
print(matrix.counts)

row_sums = matrix.counts.sum(axis=1)
print("row sums equal each document's in-vocabulary token count:",
      row_sums.tolist(), "==", [len(d) for d in docs])

unseen = transform([tokenize("completely novel words only")], vocab)
print("out-of-vocabulary documents become zero rows:", unseen.counts.tolist())
assert np.all(matrix.counts >= 0)
