"""Numba kernels for the raster-scan Gibbs sweeps.

The site loop is inherently sequential (each update reads neighbors that may
already have been updated in the same sweep), so it is compiled with numba
instead of vectorized.  All randomness is pre-generated by the caller from a
seeded numpy generator and passed in as a block of standard-normal draws;
the kernels themselves are pure deterministic arithmetic.
"""

import numba
import numpy as np

# status codes returned by the sweep kernels
SWEEP_OK = 0          # all requested sweeps completed
SWEEP_THRESHOLD = 1   # |x - mu| exceeded threshold * sigma (divergence)
SWEEP_NONFINITE = 2   # a NaN or infinity appeared
SWEEP_CAPPED = 3      # |x - mu| exceeded cap * sigma (soft stop, field kept)


@numba.njit(cache=True)
def _scan_amplitude(x, mu):
    """Largest |x - mu| over the lattice; NaN poisons the result."""
    amax = 0.0
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            a = abs(x[i, j] - mu)
            if a != a:
                return np.nan
            if a > amax:
                amax = a
    return amax


@numba.njit(cache=True)
def raster_gibbs8(x, z, mu, sigma2, beta, interior_only, threshold, cap):
    """Sequential Gibbs sweeps for the 8-neighbor system, raster order.

    Each site is redrawn from a normal with mean
    mu + beta * sum_{j in neighborhood}(x_j - mu) and variance sigma2,
    using the pre-drawn noise z[sweep, i, j].  Toroidal wrap by default;
    with interior_only the one-site border is left untouched.

    Returns (status, sweeps_done).
    """
    H, W = x.shape
    sd = np.sqrt(sigma2)
    if interior_only:
        i0, i1, j0, j1 = 1, H - 1, 1, W - 1
    else:
        i0, i1, j0, j1 = 0, H, 0, W
    for s in range(z.shape[0]):
        for i in range(i0, i1):
            im = i - 1 if i > 0 else H - 1
            ip = i + 1 if i < H - 1 else 0
            for j in range(j0, j1):
                jm = j - 1 if j > 0 else W - 1
                jp = j + 1 if j < W - 1 else 0
                nsum = (x[im, jm] + x[im, j] + x[im, jp]
                        + x[i, jm] + x[i, jp]
                        + x[ip, jm] + x[ip, j] + x[ip, jp]) - 8.0 * mu
                x[i, j] = mu + beta * nsum + sd * z[s, i, j]
        amax = _scan_amplitude(x, mu)
        if not np.isfinite(amax):
            return SWEEP_NONFINITE, s + 1
        if amax > threshold * sd:
            return SWEEP_THRESHOLD, s + 1
        if amax > cap * sd:
            return SWEEP_CAPPED, s + 1
    return SWEEP_OK, z.shape[0]


@numba.njit(cache=True)
def raster_gibbs_offsets(x, z, mu, sigma2, beta, offsets, interior_only,
                         threshold, cap):
    """Like raster_gibbs8 but for an arbitrary neighbor offset list."""
    H, W = x.shape
    sd = np.sqrt(sigma2)
    delta = offsets.shape[0]
    margin = 0
    for k in range(delta):
        m = max(abs(offsets[k, 0]), abs(offsets[k, 1]))
        if m > margin:
            margin = m
    if interior_only:
        i0, i1, j0, j1 = margin, H - margin, margin, W - margin
    else:
        i0, i1, j0, j1 = 0, H, 0, W
    for s in range(z.shape[0]):
        for i in range(i0, i1):
            for j in range(j0, j1):
                nsum = -delta * mu
                for k in range(delta):
                    ii = i + offsets[k, 0]
                    if ii < 0:
                        ii += H
                    elif ii >= H:
                        ii -= H
                    jj = j + offsets[k, 1]
                    if jj < 0:
                        jj += W
                    elif jj >= W:
                        jj -= W
                    nsum += x[ii, jj]
                x[i, j] = mu + beta * nsum + sd * z[s, i, j]
        amax = _scan_amplitude(x, mu)
        if not np.isfinite(amax):
            return SWEEP_NONFINITE, s + 1
        if amax > threshold * sd:
            return SWEEP_THRESHOLD, s + 1
        if amax > cap * sd:
            return SWEEP_CAPPED, s + 1
    return SWEEP_OK, z.shape[0]
