"""Scalar-loop kernels for training and scoring.

The kernels are written once, as plain Python over indexable arrays, and
instantiated twice by :func:`make_kernels`:

* ``FAST`` compiles them with numba for the production path;
* ``PLAIN`` leaves them as Python so they can run on object arrays of
  :class:`csqi.opcount.CountingFloat`, which tallies every multiply and add
  the algorithm really performs.

Only ``+ - * /`` may touch sample values inside a kernel. Index arithmetic
uses Python ints and is not counted.

Running correlation storage: the value for lag index ``q`` (lag ``q - M``)
lives at ``corr[(q + off) % L]``. Advancing the window by one sample turns
into ``off -= 1`` plus a rank-one update, with no data movement.
"""

from __future__ import annotations

from types import SimpleNamespace

import numba


def make_kernels(jit):
    @jit
    def circ_xcorr(w, t, out):
        # out[q] = sum_j w[j] * t[(j + q - M) % L]
        L = w.shape[0]
        M = (L - 1) // 2
        for q in range(L):
            k = q - M
            if k < 0:
                k += L
            acc = w[0] * t[k]
            for j in range(1, L):
                k += 1
                if k == L:
                    k = 0
                acc = acc + w[j] * t[k]
            out[q] = acc

    @jit
    def lin_xcorr(a, b, out):
        # out[i] = sum_j a[j] * b[j - lag], lag = i - (L - 1); zero-padding skipped
        L = a.shape[0]
        for i in range(2 * L - 1):
            lag = i - (L - 1)
            j0 = lag if lag > 0 else 0
            j1 = L + lag if lag < 0 else L
            acc = a[j0] * b[j0 - lag]
            for j in range(j0 + 1, j1):
                acc = acc + a[j] * b[j - lag]
            out[i] = acc

    @jit
    def dot(a, b):
        acc = a[0] * b[0]
        for j in range(1, a.shape[0]):
            acc = acc + a[j] * b[j]
        return acc

    @jit
    def accumulate_rotated(acc, x, shift):
        # acc += circular_shift(x, shift)
        L = x.shape[0]
        k = shift % L
        for j in range(L):
            acc[j] = acc[j] + x[k]
            k += 1
            if k == L:
                k = 0

    @jit
    def best_lag_index(corr, off):
        # preference order 0, -1, 1, -2, 2, ...; strict > keeps the earlier one
        L = corr.shape[0]
        M = (L - 1) // 2
        best_q = M
        p = M + off
        if p >= L:
            p -= L
        best = corr[p]
        for r in range(1, L):
            if r % 2 == 1:
                q = M - (r + 1) // 2
            else:
                q = M + r // 2
            p = q + off
            if p >= L:
                p -= L
            v = corr[p]
            if v > best:
                best = v
                best_q = q
        return best_q

    @jit
    def score(buf, head, t, lag, d, eps):
        # 1 / max(var(window - circular_shift(t, lag)), eps), mean removed
        L = buf.shape[0]
        i = head
        k = lag
        if k < 0:
            k += L
        for j in range(L):
            d[j] = buf[i] - t[k]
            i += 1
            if i == L:
                i = 0
            k += 1
            if k == L:
                k = 0
        s = d[0]
        for j in range(1, L):
            s = s + d[j]
        mean = s / L
        for j in range(L):
            d[j] = d[j] - mean
        ss = d[0] * d[0]
        for j in range(1, L):
            ss = ss + d[j] * d[j]
        var = ss / L
        if var > eps:
            return 1.0 / var
        return 1.0 / eps

    @jit
    def ordered_window(buf, head, w):
        L = buf.shape[0]
        i = head
        for j in range(L):
            w[j] = buf[i]
            i += 1
            if i == L:
                i = 0

    @jit
    def step(buf, head, corr, off, t, arriving, refresh, d, w, eps):
        """Consume one sample; return (c, head, off)."""
        L = buf.shape[0]
        M = (L - 1) // 2
        departing = buf[head]
        buf[head] = arriving
        head += 1
        if head == L:
            head = 0
        if refresh:
            ordered_window(buf, head, w)
            circ_xcorr(w, t, corr)
            off = 0
        else:
            off -= 1
            if off < 0:
                off += L
            for q in range(L):
                p = q + off
                if p >= L:
                    p -= L
                k = q - M - 1
                if k < 0:
                    k += L
                # new[lag] = old[lag - 1] - FR + NR, both rows are t[(lag - 1) % L]
                corr[p] = corr[p] - departing * t[k] + arriving * t[k]
        q = best_lag_index(corr, off)
        c = score(buf, head, t, q - M, d, eps)
        return c, head, off

    @jit
    def run(stream, buf, head, corr, off, t, d, w, eps, refresh_interval, since, out):
        for i in range(stream.shape[0]):
            since += 1
            refresh = since >= refresh_interval
            c, head, off = step(buf, head, corr, off, t, stream[i], refresh, d, w, eps)
            if refresh:
                since = 0
            out[i] = c
        return head, off, since

    return SimpleNamespace(
        circ_xcorr=circ_xcorr,
        lin_xcorr=lin_xcorr,
        dot=dot,
        accumulate_rotated=accumulate_rotated,
        best_lag_index=best_lag_index,
        score=score,
        ordered_window=ordered_window,
        step=step,
        run=run,
    )


def _identity(f):
    return f


FAST = make_kernels(numba.njit(cache=True))
PLAIN = make_kernels(_identity)
