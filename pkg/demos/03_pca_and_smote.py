"""Dimensionality reduction and minority oversampling, the two optional
pipeline stages. SMOTE always runs before PCA when both are active.

Run:  python demos/03_pca_and_smote.py
"""

import numpy as np

from qflake import pca_fit, pca_inverse_transform, pca_transform, smote_resample

rng = np.random.default_rng(1)

# --- PCA: project correlated counts onto their principal axes ----------
X = rng.poisson(3.0, size=(60, 10)).astype(float)
X[:, 1] = 2 * X[:, 0] + rng.normal(0, 0.1, 60)  # plant a redundant column

model = pca_fit(X, k=4)
Z = pca_transform(model, X)
print("explained variance by component:", np.round(model.explained_variance, 2))
print("component rows are orthonormal:",
      np.allclose(model.components @ model.components.T, np.eye(4), atol=1e-8))

for k in (1, 2, 4, 8):
    m = pca_fit(X, k)
    recon = pca_inverse_transform(m, pca_transform(m, X))
    print(f"  k={k}: reconstruction error {np.linalg.norm(X - recon):8.3f}")
print("reconstruction error shrinks as k grows")

# --- SMOTE: oversample the minority class to parity --------------------
minority = rng.normal(0.0, 1.0, size=(9, 2))
majority = rng.normal(4.0, 1.0, size=(41, 2))
Xs = np.vstack([minority, majority])
ys = np.array([1] * 9 + [0] * 41)

resampled = smote_resample(Xs, ys, k_neighbors=5, seed=3)
print(f"\nbefore: 9 flaky / 41 nonflaky; after: "
      f"{(resampled.y == 1).sum()} / {(resampled.y == 0).sum()} "
      f"({resampled.n_synthetic} synthetic rows)")
synth = resampled.X[resampled.synthetic_mask]
print("synthetic rows stay inside the minority cloud:")
print("  minority x-range", np.round([minority[:, 0].min(), minority[:, 0].max()], 2),
      " synthetic x-range", np.round([synth[:, 0].min(), synth[:, 0].max()], 2))
