"""Jitted inner loops for SGNS training and Gibbs sampling.

All randomness is pre-drawn outside and passed in as arrays, so the kernels
are pure functions of their inputs: single-threaded runs are bit-reproducible
and numba is an accelerator, never a semantics change. Without numba the same
code runs as plain Python (slowly, but identically).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True, nogil=True)
def sgns_epoch(
    ids,  # int32[n] token ids, OOV/subsampled removed
    sent_bounds,  # int32[s+1] sentence start offsets into ids
    windows,  # int32[n] reduced window size per position, in [1, window]
    neg_ids,  # int32[n_pairs, negatives] pre-drawn noise token ids
    w_in,  # float32[V, k] center vectors (the model), updated in place
    w_out,  # float32[V, k] context vectors, updated in place
    lr_start,
    lr_min,
    tokens_done,  # tokens processed before this call (for lr decay)
    tokens_total,  # total tokens over all epochs (for lr decay)
):
    """One SGNS epoch of sequential SGD. Returns (loss_sum, n_pairs_used,
    tokens_processed)."""
    k = w_in.shape[1]
    pair = 0
    loss = 0.0
    processed = 0
    for s in range(len(sent_bounds) - 1):
        lo = sent_bounds[s]
        hi = sent_bounds[s + 1]
        for i in range(lo, hi):
            frac = (tokens_done + processed) / tokens_total
            lr = lr_start + (lr_min - lr_start) * frac
            if lr < lr_min:
                lr = lr_min
            c = ids[i]
            b = windows[i]
            j0 = i - b
            if j0 < lo:
                j0 = lo
            j1 = i + b + 1
            if j1 > hi:
                j1 = hi
            for j in range(j0, j1):
                if j == i:
                    continue
                o = ids[j]
                vc = w_in[c]
                # positive sample
                dot = 0.0
                for t in range(k):
                    dot += vc[t] * w_out[o, t]
                sig = 1.0 / (1.0 + np.exp(-dot))
                loss -= np.log(sig + 1e-12)
                g = (sig - 1.0) * lr
                for t in range(k):
                    tmp = w_out[o, t]
                    w_out[o, t] = tmp - g * vc[t]
                    vc[t] = vc[t] - g * tmp
                # negative samples
                for m in range(neg_ids.shape[1]):
                    nid = neg_ids[pair, m]
                    if nid == o:
                        continue
                    dot = 0.0
                    for t in range(k):
                        dot += vc[t] * w_out[nid, t]
                    sig = 1.0 / (1.0 + np.exp(-dot))
                    loss -= np.log(1.0 - sig + 1e-12)
                    g = sig * lr
                    for t in range(k):
                        tmp = w_out[nid, t]
                        w_out[nid, t] = tmp - g * vc[t]
                        vc[t] = vc[t] - g * tmp
                pair += 1
            processed += 1
    return loss, pair, processed


@njit(cache=True, nogil=True)
def gibbs_sweep(
    words,  # int32[n] token ids
    docs,  # int32[n] document ids
    z,  # int32[n] topic assignments, updated in place
    ndk,  # int64[D, K] doc-topic counts
    nkw,  # int64[K, V] topic-word counts
    nk,  # int64[K] topic totals
    alpha_vec,  # float64[K] doc-level Dirichlet pseudo-counts
    beta,
    uniforms,  # float64[n] pre-drawn uniforms for this sweep
):
    """One collapsed Gibbs sweep over all tokens (LDA when alpha_vec is
    constant; truncated HDP direct assignment when alpha_vec = alpha0 * b)."""
    n = len(words)
    K = nk.shape[0]
    V = nkw.shape[1]
    vbeta = V * beta
    p = np.empty(K, dtype=np.float64)
    for i in range(n):
        w = words[i]
        d = docs[i]
        old = z[i]
        ndk[d, old] -= 1
        nkw[old, w] -= 1
        nk[old] -= 1
        total = 0.0
        for kk in range(K):
            val = (ndk[d, kk] + alpha_vec[kk]) * (nkw[kk, w] + beta) / (nk[kk] + vbeta)
            total += val
            p[kk] = total
        u = uniforms[i] * total
        new = 0
        while new < K - 1 and p[new] < u:
            new += 1
        z[i] = new
        ndk[d, new] += 1
        nkw[new, w] += 1
        nk[new] += 1


@njit(cache=True, nogil=True)
def fold_in_sweep(
    words,  # int32[m] token ids of one document
    z,  # int32[m] assignments, updated in place
    dk,  # int64[K] doc-topic counts for this document
    phi,  # float64[K, V] fixed topic-word distributions
    alpha,
    uniforms,  # float64[m]
):
    """One Gibbs sweep for a held-out document against fixed topics."""
    K = dk.shape[0]
    p = np.empty(K, dtype=np.float64)
    for i in range(len(words)):
        w = words[i]
        old = z[i]
        dk[old] -= 1
        total = 0.0
        for kk in range(K):
            val = (dk[kk] + alpha) * phi[kk, w]
            total += val
            p[kk] = total
        u = uniforms[i] * total
        new = 0
        while new < K - 1 and p[new] < u:
            new += 1
        z[i] = new
        dk[new] += 1
