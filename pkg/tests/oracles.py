"""Independent brute-force oracles kept deliberately separate from the
library's code paths."""

import numpy as np


def gaussian_direct(pixels, sigma):
    """2-D Gaussian blur by direct summation over the truncated kernel,
    with edge replication."""
    radius = int(np.ceil(3.0 * sigma))
    coords = np.arange(-radius, radius + 1)
    k1 = np.exp(-0.5 * (coords / sigma) ** 2)
    k1 = k1 / k1.sum()
    kernel = np.outer(k1, k1)
    h, w = pixels.shape
    out = np.zeros_like(pixels)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    yy = min(max(y + dy, 0), h - 1)
                    xx = min(max(x + dx, 0), w - 1)
                    acc += kernel[dy + radius, dx + radius] * pixels[yy, xx]
            out[y, x] = acc
    return out


def equalize_global(pixels):
    """Global histogram equalization: each quantized value maps to its CDF."""
    bins = np.rint(pixels * 255).astype(int)
    counts = np.bincount(bins.ravel(), minlength=256)
    cdf = np.cumsum(counts) / bins.size
    return cdf[bins]


def otsu_brute_force(pixels):
    """Lowest threshold bin maximizing between-class variance, by explicit
    per-threshold class statistics."""
    bins = np.rint(pixels * 255).astype(int).ravel()
    n = bins.size
    best_t, best_var = None, -1.0
    for t in range(255):
        lower = bins[bins <= t]
        upper = bins[bins > t]
        if lower.size == 0 or upper.size == 0:
            continue
        w0 = lower.size / n
        w1 = upper.size / n
        var = w0 * w1 * (lower.mean() - upper.mean()) ** 2
        if var > best_var:
            best_var, best_t = var, t
    return best_t


def multi_otsu_brute_force(pixels, classes=3):
    """Exhaustive cut-point search with per-class statistics read off
    histogram prefix sums (explicit scalar loop over every cut pair)."""
    bins = np.rint(pixels * 255).astype(int).ravel()
    n = bins.size
    mu_total = bins.mean()
    counts = np.bincount(bins, minlength=256)
    # cum_n[t] / cum_s[t]: pixel count and bin-value sum over bins <= t
    cum_n = np.concatenate(([0], np.cumsum(counts)))
    cum_s = np.concatenate(([0], np.cumsum(counts * np.arange(256))))

    def score(edges):
        s = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            cnt = cum_n[hi] - cum_n[lo]
            if cnt == 0:
                return -np.inf
            mean = (cum_s[hi] - cum_s[lo]) / cnt
            s += (cnt / n) * (mean - mu_total) ** 2
        return s

    best = (-np.inf, None)
    if classes == 3:
        for t1 in range(255):
            for t2 in range(t1 + 1, 255):
                s = score((0, t1 + 1, t2 + 1, 256))
                if s > best[0]:
                    best = (s, (t1, t2))
    else:
        raise NotImplementedError
    return best[1]


def dilate_minkowski(bits, footprint):
    """Set-based Minkowski dilation; out-of-bounds is background."""
    h, w = bits.shape
    r = footprint.shape[0] // 2
    out = np.zeros_like(bits)
    offsets = [(dy - r, dx - r) for dy in range(footprint.shape[0])
               for dx in range(footprint.shape[1]) if footprint[dy, dx]]
    for y in range(h):
        for x in range(w):
            if not bits[y, x]:
                continue
            for dy, dx in offsets:
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w:
                    out[yy, xx] = True
    return out


def erode_minkowski(bits, footprint):
    """Erosion as complement of dilating the complement; pixels whose
    neighborhood leaves the image erode away (background border)."""
    h, w = bits.shape
    r = footprint.shape[0] // 2
    offsets = [(dy - r, dx - r) for dy in range(footprint.shape[0])
               for dx in range(footprint.shape[1]) if footprint[dy, dx]]
    out = np.zeros_like(bits)
    for y in range(h):
        for x in range(w):
            keep = True
            for dy, dx in offsets:
                yy, xx = y + dy, x + dx
                if not (0 <= yy < h and 0 <= xx < w) or not bits[yy, xx]:
                    keep = False
                    break
            out[y, x] = keep
    return out


def confusion_loops(pred_bits, gt_bits):
    tp = fp = fn = tn = 0
    for p, g in zip(pred_bits.ravel(), gt_bits.ravel()):
        if p and g:
            tp += 1
        elif p and not g:
            fp += 1
        elif not p and g:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


def metrics_from_counts(tp, fp, fn, tn):
    total = tp + fp + fn + tn
    both_empty = (tp + fp + fn) == 0
    convention = 1.0 if both_empty else 0.0
    dice = 2 * tp / (2 * tp + fp + fn) if (2 * tp + fp + fn) else convention
    jaccard_b = tp / (tp + fp + fn) if (tp + fp + fn) else convention
    sens = tp / (tp + fn) if (tp + fn) else convention
    acc = (tp + tn) / total
    jaccard_micro = (tp + tn) / (tp + tn + 2 * (fp + fn))
    return {
        "jaccard_micro": jaccard_micro,
        "jaccard_binary": jaccard_b,
        "accuracy_binary": acc,
        "sensitivity": sens,
        "f1_micro": acc,
        "f1_binary": dice,
        "recall_micro": acc,
        "recall_binary": sens,
        "dice": dice,
    }


def kmeans_restart_best_sse(values, k, n_restarts, seed):
    """Best within-cluster SSE over random-center Lloyd restarts."""
    rng = np.random.default_rng(seed)
    best = np.inf
    n = values.size
    for _ in range(n_restarts):
        centers = values[rng.choice(n, size=k, replace=False)]
        for _ in range(100):
            assign = np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)
            new_centers = centers.copy()
            for c in range(k):
                members = values[assign == c]
                if members.size:
                    new_centers[c] = members.mean()
            if np.max(np.abs(new_centers - centers)) < 1e-12:
                centers = new_centers
                break
            centers = new_centers
        assign = np.argmin(np.abs(values[:, None] - centers[None, :]), axis=1)
        sse = float(np.sum((values - centers[assign]) ** 2))
        best = min(best, sse)
    return best
