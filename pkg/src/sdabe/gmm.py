"""Gaussian mixture baseline: EM on the joint feature space and
conditional-expectation regression from the narrowband block."""

from __future__ import annotations

import numpy as np

COV_REG = 1e-6


def _kmeans(X: np.ndarray, k: int, rng: np.random.Generator, iters: int = 25):
    N = X.shape[0]
    centers = X[rng.choice(N, size=k, replace=False)].copy()
    labels = np.zeros(N, dtype=int)
    for _ in range(iters):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(d2, axis=1)
        for j in range(k):
            mask = labels == j
            if np.any(mask):
                centers[j] = X[mask].mean(axis=0)
    return centers, labels


def _log_gauss(X: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    d = X.shape[1]
    L = np.linalg.cholesky(cov)
    diff = X - mean
    sol = np.linalg.solve(L, diff.T)
    maha = np.sum(sol**2, axis=0)
    logdet = 2.0 * np.sum(np.log(np.diag(L)))
    return -0.5 * (d * np.log(2 * np.pi) + logdet + maha)


class Gmm:
    """Full-covariance mixture fitted with EM (ridge-regularized)."""

    def __init__(self, components: int, seed: int = 0):
        self.k = components
        self.seed = seed
        self.weights = None
        self.means = None
        self.covs = None
        self.loglik_history: list[float] = []

    def fit(self, X: np.ndarray, iters: int = 50, tol: float = 1e-7):
        X = np.asarray(X, dtype=float)
        N, d = X.shape
        if N < self.k:
            raise ValueError("fewer samples than components")
        rng = np.random.default_rng(self.seed)
        centers, labels = _kmeans(X, self.k, rng)
        self.means = centers
        self.weights = np.full(self.k, 1.0 / self.k)
        self.covs = np.empty((self.k, d, d))
        base = np.cov(X.T) if N > 1 else np.eye(d)
        base = np.atleast_2d(base) + COV_REG * np.eye(d)
        for j in range(self.k):
            mask = labels == j
            if np.sum(mask) > d:
                c = np.cov(X[mask].T)
            else:
                c = base
            self.covs[j] = self._regularize(np.atleast_2d(c))
        prev = -np.inf
        for _ in range(iters):
            logp = np.column_stack(
                [
                    np.log(self.weights[j] + 1e-300)
                    + _log_gauss(X, self.means[j], self.covs[j])
                    for j in range(self.k)
                ]
            )
            mx = logp.max(axis=1, keepdims=True)
            lse = mx[:, 0] + np.log(np.sum(np.exp(logp - mx), axis=1))
            ll = float(np.sum(lse))
            self.loglik_history.append(ll)
            resp = np.exp(logp - lse[:, None])
            nk = resp.sum(axis=0) + 1e-12
            self.weights = nk / N
            self.means = (resp.T @ X) / nk[:, None]
            for j in range(self.k):
                diff = X - self.means[j]
                c = (resp[:, j, None] * diff).T @ diff / nk[j]
                self.covs[j] = self._regularize(c)
            if ll - prev < tol * abs(ll):
                break
            prev = ll
        return self

    @staticmethod
    def _regularize(c: np.ndarray) -> np.ndarray:
        d = c.shape[0]
        reg = COV_REG * max(np.trace(c) / d, 1.0e-12)
        return 0.5 * (c + c.T) + reg * np.eye(d)

    def conditional_expectation(self, x_in: np.ndarray, in_dim: int) -> np.ndarray:
        """E[out-block | in-block = x_in] under the joint mixture."""
        x_in = np.asarray(x_in, dtype=float).reshape(-1)
        k, d = self.k, self.means.shape[1]
        Xi = x_in[None, :]
        logw = np.empty(k)
        cond = np.empty((k, d - in_dim))
        for j in range(k):
            mu_i = self.means[j][:in_dim]
            mu_o = self.means[j][in_dim:]
            Sii = self.covs[j][:in_dim, :in_dim]
            Soi = self.covs[j][in_dim:, :in_dim]
            logw[j] = np.log(self.weights[j] + 1e-300) + _log_gauss(Xi, mu_i, Sii)[0]
            cond[j] = mu_o + Soi @ np.linalg.solve(Sii, x_in - mu_i)
        mx = logw.max()
        post = np.exp(logw - mx)
        post /= post.sum()
        return post @ cond
