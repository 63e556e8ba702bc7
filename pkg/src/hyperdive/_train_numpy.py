"""Pure-numpy training backend (fallback when the compiled kernel is absent).

Implements the same epoch contract as the compiled extension: one pass over a
shuffled occurrence list in mini-batches; gradients for each batch are
evaluated at the pre-step parameters, every touched row receives one ADAM
step, and (for the non-negative trainer) is clipped at zero.  Results are
deterministic for a fixed seed but not bit-identical to the compiled backend,
whose floating-point summation order differs.
"""

import numpy as np
from scipy.special import expit

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


def _adam_step(params, m, v, rows, grads, lr, step, project):
    """One ascent step on unique ``rows`` with bias-corrected moments."""
    m_new = ADAM_BETA1 * m[rows] + (1.0 - ADAM_BETA1) * grads
    v_new = ADAM_BETA2 * v[rows] + (1.0 - ADAM_BETA2) * grads * grads
    m[rows] = m_new
    v[rows] = v_new
    m_hat = m_new / (1.0 - ADAM_BETA1**step)
    v_hat = v_new / (1.0 - ADAM_BETA2**step)
    params[rows] += lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
    if project:
        params[rows] = np.maximum(params[rows], 0.0)


def run_epoch(
    word_vecs,
    ctx_vecs,
    m_w,
    v_w,
    m_c,
    v_c,
    occ_w,
    occ_c,
    order,
    neg_rate,
    cum_probs,
    lr,
    batch_size,
    step,
    rng,
    project,
    debug,
):
    """Process one epoch; returns (step, sum of positive log-sigmoids, err).

    ``err`` is 0 on success, 1 if debug checks found non-finite parameters,
    2 if (with ``project``) a negative entry survived clipping.
    """
    n = order.shape[0]
    logsig_sum = 0.0
    for start in range(0, n, batch_size):
        idx = order[start : start + batch_size]
        w = occ_w[idx]
        c = occ_c[idx]
        b = w.shape[0]
        rate = neg_rate[w]
        base = np.floor(rate)
        n_neg = base.astype(np.int64) + (rng.random(b) < rate - base)
        negs = np.searchsorted(
            cum_probs, rng.random(int(n_neg.sum())), side="right"
        ).astype(np.int64)
        w_rep = np.repeat(w, n_neg)

        pos_x = np.einsum("ij,ij->i", word_vecs[w], ctx_vecs[c])
        logsig_sum += float(-np.logaddexp(0.0, -pos_x).sum())
        g_pos = expit(-pos_x)
        neg_x = np.einsum("ij,ij->i", word_vecs[w_rep], ctx_vecs[negs])
        g_neg = -expit(neg_x)

        touched_w, inv_w = np.unique(np.concatenate([w, w_rep]), return_inverse=True)
        grads_w = np.zeros((touched_w.shape[0], word_vecs.shape[1]))
        np.add.at(grads_w, inv_w[:b], g_pos[:, None] * ctx_vecs[c])
        np.add.at(grads_w, inv_w[b:], g_neg[:, None] * ctx_vecs[negs])

        touched_c, inv_c = np.unique(np.concatenate([c, negs]), return_inverse=True)
        grads_c = np.zeros((touched_c.shape[0], word_vecs.shape[1]))
        np.add.at(grads_c, inv_c[:b], g_pos[:, None] * word_vecs[w])
        np.add.at(grads_c, inv_c[b:], g_neg[:, None] * word_vecs[w_rep])

        step += 1
        _adam_step(word_vecs, m_w, v_w, touched_w, grads_w, lr, step, project)
        _adam_step(ctx_vecs, m_c, v_c, touched_c, grads_c, lr, step, project)

        if debug:
            if not (
                np.isfinite(word_vecs[touched_w]).all()
                and np.isfinite(ctx_vecs[touched_c]).all()
            ):
                return step, logsig_sum, 1
            if project and (
                (word_vecs[touched_w] < 0).any() or (ctx_vecs[touched_c] < 0).any()
            ):
                return step, logsig_sum, 2
    return step, logsig_sum, 0
