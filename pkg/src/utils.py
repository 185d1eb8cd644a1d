from typing import Callable, Tuple

import numpy as np

ArrayFunc = Callable[[np.ndarray], np.ndarray]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_minimize(func: ArrayFunc, lo, hi, tol: float = 1e-12,
                            max_iter: int = 200) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vectorized golden-section search of a unimodal function on [lo, hi].

    lo and hi broadcast together, func is called with arrays of that shape.
    Returns (argmin, min value). scipy.optimize minimizes one scalar bracket per call; this
    runs every x of a grid in the same numpy pass.
    """

    a, b = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    a = a.copy()
    b = b.copy()
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = func(c)
    fd = func(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = fc <= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        width = b - a
        trial = np.where(left, b - _GOLDEN * width, a + _GOLDEN * width)
        f_trial = func(trial)
        c, d, fc, fd = (np.where(left, trial, d), np.where(left, c, trial),
                        np.where(left, f_trial, fd), np.where(left, fc, f_trial))
    best = np.where(fc <= fd, c, d)
    return best, np.minimum(fc, fd)


def bisect_boundary(func: ArrayFunc, inside, outside, tol: float = 1e-11,
                    max_iter: int = 200) -> np.ndarray:
    """
    Vectorized bisection for the boundary between func <= 0 (inside) and func > 0 (outside).

    brentq handles a single root; here each grid point carries its own bracket and all of
    them are halved together.
    """

    lo, hi = np.broadcast_arrays(np.asarray(inside, dtype=float), np.asarray(outside, dtype=float))
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(max_iter):
        if np.all(np.abs(hi - lo) <= tol):
            break
        mid = 0.5 * (lo + hi)
        ok = func(mid) <= 0.0
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return 0.5 * (lo + hi)


def simpson_refined(func: ArrayFunc, left: np.ndarray, right: np.ndarray, refine: int = 64) -> np.ndarray:
    """
    Composite Simpson on each [left_i, right_i] with `refine` sub-panels, all panels in one call
    """

    left = np.asarray(left, dtype=float)
    width = np.asarray(right, dtype=float) - left
    steps = np.linspace(0.0, 1.0, refine + 1)
    sub = left[:, None] + width[:, None] * steps[None, :]
    sub_mid = 0.5 * (sub[:, :-1] + sub[:, 1:])
    f_sub = func(sub.ravel()).reshape(sub.shape)
    f_sub_mid = func(sub_mid.ravel()).reshape(sub_mid.shape)
    sub_width = (width / refine)[:, None]
    return np.sum(sub_width / 6.0 * (f_sub[:, :-1] + 4.0 * f_sub_mid + f_sub[:, 1:]), axis=1)


def aligned_edges(lo: float, hi: float, per_unit: int) -> np.ndarray:
    """
    Edges of [lo, hi] whose interior points sit on the lattice k / per_unit, endpoints included.
    """

    first = int(np.ceil(lo * per_unit - 1e-9))
    last = int(np.floor(hi * per_unit + 1e-9))
    inner = np.arange(first, last + 1, dtype=float) / per_unit
    inner = inner[(inner > lo + 1e-12) & (inner < hi - 1e-12)]
    return np.concatenate(([lo], inner, [hi]))
