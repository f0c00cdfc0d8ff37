"""Hot numeric kernels: linear slaving, bounded Nelder-Mead, log-periodogram.

Every kernel here is written so that it compiles under ``numba.njit`` and
also runs unchanged as plain Python. The two loops that dominate runtime
(building the normal equations and the periodogram sums) additionally have
a vectorised numpy variant, which the numpy backend uses instead of the
scalar loop.

Kernels never raise. Domain violations (``t >= t_c``) and degenerate
regressor geometry are reported as ``inf`` objectives so the optimiser can
treat them as infeasible points.
"""
import numpy as np

from ._accel import USE_NUMBA, jit

# Upper limit on the condition estimate of the equilibrated 4x4 normal matrix.
COND_LIMIT = 1e12

MODE_PROFILE = 0  # x = (t_c, alpha, omega), linear parameters slaved
MODE_FULL = 1  # x = (t_c, alpha, omega, A, B, C1, C2)


def _normal_equations_loop(t, y, tc, alpha, omega, feat):
    n = t.shape[0]
    G = np.zeros((4, 4))
    r = np.zeros(4)
    for i in range(n):
        dt = tc - t[i]
        if not dt > 0.0:
            return G, r, False
        L = np.log(dt)
        f = np.exp(alpha * L)
        ph = omega * L
        c = f * np.cos(ph)
        s = f * np.sin(ph)
        feat[0, i] = f
        feat[1, i] = c
        feat[2, i] = s
        yi = y[i]
        G[0, 1] += f
        G[0, 2] += c
        G[0, 3] += s
        G[1, 1] += f * f
        G[1, 2] += f * c
        G[1, 3] += f * s
        G[2, 2] += c * c
        G[2, 3] += c * s
        G[3, 3] += s * s
        r[0] += yi
        r[1] += yi * f
        r[2] += yi * c
        r[3] += yi * s
    G[0, 0] = n
    for j in range(4):
        for k in range(j):
            G[j, k] = G[k, j]
    return G, r, True


def _normal_equations_numpy(t, y, tc, alpha, omega, feat):
    dt = tc - t
    if dt.size and not dt.min() > 0.0:
        return np.zeros((4, 4)), np.zeros(4), False
    L = np.log(dt)
    f = np.exp(alpha * L)
    ph = omega * L
    feat[0] = f
    feat[1] = f * np.cos(ph)
    feat[2] = f * np.sin(ph)
    X = np.empty((4, t.shape[0]))
    X[0] = 1.0
    X[1:] = feat
    return X @ X.T, X @ y, True


@jit
def solve_normal(G, r, coef):
    """Solve ``G coef = r`` after diagonal equilibration.

    Returns the condition estimate of the equilibrated matrix (ratio of its
    extreme eigenvalues), or ``inf`` when it is not positive definite. ``coef``
    is written only when the estimate is finite.
    """
    d = np.empty(4)
    for j in range(4):
        if not G[j, j] > 0.0:
            return np.inf
        d[j] = np.sqrt(G[j, j])
    Gs = np.empty((4, 4))
    rs = np.empty(4)
    for j in range(4):
        rs[j] = r[j] / d[j]
        for k in range(4):
            Gs[j, k] = G[j, k] / (d[j] * d[k])
    ev = np.linalg.eigvalsh(Gs)
    if not ev[0] > 0.0:
        return np.inf
    sol = np.linalg.solve(Gs, rs)
    for j in range(4):
        coef[j] = sol[j] / d[j]
    return ev[3] / ev[0]


if USE_NUMBA:
    normal_equations = jit(_normal_equations_loop)
else:
    normal_equations = _normal_equations_numpy


def _residual_mse_loop(y, coef, feat):
    n = y.shape[0]
    sse = 0.0
    for i in range(n):
        e = y[i] - coef[0] - coef[1] * feat[0, i] - coef[2] * feat[1, i] - coef[3] * feat[2, i]
        sse += e * e
    return sse / n


def _residual_mse_numpy(y, coef, feat):
    e = y - coef[0] - coef[1] * feat[0] - coef[2] * feat[1] - coef[3] * feat[2]
    return float(e @ e) / y.shape[0]


if USE_NUMBA:
    residual_mse = jit(_residual_mse_loop)
else:
    residual_mse = _residual_mse_numpy


@jit
def profile_mse(t, y, tc, alpha, omega, coef, feat):
    """Mean squared residual with (A, B, C1, C2) slaved by least squares."""
    G, r, ok = normal_equations(t, y, tc, alpha, omega, feat)
    if not ok:
        return np.inf
    cond = solve_normal(G, r, coef)
    if not cond <= COND_LIMIT:
        return np.inf
    return residual_mse(y, coef, feat)


def _full_mse_loop(t, y, p, feat):
    n = t.shape[0]
    tc, alpha, omega = p[0], p[1], p[2]
    sse = 0.0
    for i in range(n):
        dt = tc - t[i]
        if not dt > 0.0:
            return np.inf
        L = np.log(dt)
        f = np.exp(alpha * L)
        ph = omega * L
        e = y[i] - p[3] - f * (p[4] + p[5] * np.cos(ph) + p[6] * np.sin(ph))
        sse += e * e
    return sse / n


def _full_mse_numpy(t, y, p, feat):
    dt = p[0] - t
    if dt.size and not dt.min() > 0.0:
        return np.inf
    L = np.log(dt)
    ph = p[2] * L
    e = y - p[3] - np.exp(p[1] * L) * (p[4] + p[5] * np.cos(ph) + p[6] * np.sin(ph))
    return float(e @ e) / y.shape[0]


if USE_NUMBA:
    full_mse = jit(_full_mse_loop)
else:
    full_mse = _full_mse_numpy


@jit
def _evaluate(mode, x, t, y, coef, feat):
    if mode == MODE_PROFILE:
        return profile_mse(t, y, x[0], x[1], x[2], coef, feat)
    return full_mse(t, y, x, feat)


@jit
def _clip(x, lo, hi):
    out = np.empty_like(x)
    for j in range(x.shape[0]):
        out[j] = min(max(x[j], lo[j]), hi[j])
    return out


@jit
def nelder_mead(mode, x0, step, lo, hi, t, y, maxiter, ftol, xtol):
    """Bounded Nelder-Mead descent on the coordinates with non-zero ``step``.

    Trial points are clipped onto the box ``[lo, hi]``. Iteration stops when
    the objective spread across the simplex falls below ``ftol`` relative to
    the best value, or when every vertex lies within ``xtol * (1 + |x|)`` of
    the best vertex.

    Returns:
        (x_best, f_best, iterations, evaluations, converged)
    """
    d = x0.shape[0]
    n = t.shape[0]
    feat = np.empty((3, n))
    coef = np.zeros(4)
    free = np.empty(d, np.int64)
    k = 0
    for j in range(d):
        if step[j] != 0.0:
            free[k] = j
            k += 1
    x0c = _clip(x0, lo, hi)
    if k == 0:
        return x0c, _evaluate(mode, x0c, t, y, coef, feat), 0, 1, True

    sim = np.empty((k + 1, d))
    fs = np.empty(k + 1)
    sim[0] = x0c
    for i in range(1, k + 1):
        j = free[i - 1]
        sim[i] = x0c
        v = x0c[j] + step[j]
        if v > hi[j]:
            v = x0c[j] - step[j]
        sim[i, j] = min(max(v, lo[j]), hi[j])
    for i in range(k + 1):
        fs[i] = _evaluate(mode, sim[i], t, y, coef, feat)
    nev = k + 1

    it = 0
    converged = False
    cen = np.empty(d)
    while True:
        order = np.argsort(fs, kind="mergesort")
        sim = sim[order]
        fs = fs[order]
        if not np.isfinite(fs[0]):
            break
        spread_ok = True
        for i in range(1, k + 1):
            for j in range(d):
                if abs(sim[i, j] - sim[0, j]) > xtol * (1.0 + abs(sim[0, j])):
                    spread_ok = False
        if spread_ok or fs[k] - fs[0] <= ftol * abs(fs[0]):
            converged = True
            break
        if it >= maxiter:
            break
        it += 1

        # fixed coordinates are copied, so every move below leaves them exact
        for j in range(d):
            cen[j] = sim[0, j]
        for q in range(k):
            j = free[q]
            acc = 0.0
            for i in range(k):
                acc += sim[i, j]
            cen[j] = acc / k
        xr = _clip(cen + (cen - sim[k]), lo, hi)
        fr = _evaluate(mode, xr, t, y, coef, feat)
        nev += 1
        if fr < fs[0]:
            xe = _clip(cen + 2.0 * (cen - sim[k]), lo, hi)
            fe = _evaluate(mode, xe, t, y, coef, feat)
            nev += 1
            if fe < fr:
                sim[k] = xe
                fs[k] = fe
            else:
                sim[k] = xr
                fs[k] = fr
        elif fr < fs[k - 1]:
            sim[k] = xr
            fs[k] = fr
        else:
            if fr < fs[k]:
                xc = cen + 0.5 * (xr - cen)
            else:
                xc = cen + 0.5 * (sim[k] - cen)
            fc = _evaluate(mode, xc, t, y, coef, feat)
            nev += 1
            if fc < min(fr, fs[k]):
                sim[k] = xc
                fs[k] = fc
            else:
                for i in range(1, k + 1):
                    sim[i] = sim[0] + 0.5 * (sim[i] - sim[0])
                    fs[i] = _evaluate(mode, sim[i], t, y, coef, feat)
                    nev += 1
    return sim[0].copy(), fs[0], it, nev, converged


@jit
def evaluate_starts(t, y, starts):
    """Slaved objective at each row of ``starts`` (shape ``(k, 3)``)."""
    out = np.empty(starts.shape[0])
    feat = np.empty((3, t.shape[0]))
    coef = np.zeros(4)
    for i in range(starts.shape[0]):
        out[i] = profile_mse(t, y, starts[i, 0], starts[i, 1], starts[i, 2], coef, feat)
    return out


def _periodogram_loop(u, v, freqs):
    n = u.shape[0]
    power = np.empty(freqs.shape[0])
    vsum = 0.0
    for i in range(n):
        vsum += v[i]
    for q in range(freqs.shape[0]):
        w = freqs[q]
        cc = 0.0
        ss = 0.0
        cs = 0.0
        vc = 0.0
        vs = 0.0
        csum = 0.0
        ssum = 0.0
        for i in range(n):
            c = np.cos(w * u[i])
            s = np.sin(w * u[i])
            csum += c
            ssum += s
            cc += c * c
            ss += s * s
            cs += c * s
            vc += v[i] * c
            vs += v[i] * s
        power[q] = _ls_power(cc, ss, cs, vc, vs, csum, ssum, vsum, n)
    return power


def _periodogram_numpy(u, v, freqs):
    ph = np.outer(freqs, u)
    c = np.cos(ph)
    s = np.sin(ph)
    cc = np.einsum("ij,ij->i", c, c)
    ss = np.einsum("ij,ij->i", s, s)
    cs = np.einsum("ij,ij->i", c, s)
    vc = c @ v
    vs = s @ v
    csum = c.sum(axis=1)
    ssum = s.sum(axis=1)
    vsum = v.sum()
    n = u.shape[0]
    return np.array(
        [_ls_power(cc[q], ss[q], cs[q], vc[q], vs[q], csum[q], ssum[q], vsum, n) for q in range(freqs.shape[0])]
    )


@jit
def _ls_power(cc, ss, cs, vc, vs, csum, ssum, vsum, n):
    # floating-mean fit: centre the sums, then the explained sum of squares
    # of the cos/sin pair, per sample
    cc -= csum * csum / n
    ss -= ssum * ssum / n
    cs -= csum * ssum / n
    vc -= vsum * csum / n
    vs -= vsum * ssum / n
    det = cc * ss - cs * cs
    if det > 1e-12 * cc * ss:
        return max((ss * vc * vc - 2.0 * cs * vc * vs + cc * vs * vs) / det, 0.0) / n
    if cc >= ss and cc > 0.0:
        return vc * vc / cc / n
    if ss > 0.0:
        return vs * vs / ss / n
    return 0.0


if USE_NUMBA:
    periodogram = jit(_periodogram_loop)
else:
    periodogram = _periodogram_numpy
