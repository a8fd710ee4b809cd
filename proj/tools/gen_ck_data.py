#!/usr/bin/env python3
"""Regenerates the frozen synthetic CK-metric corpus in data/ck/.

Each project draws a latent per-class "badness" z and a correlated size
latent s, maps them through monotone noisy transforms onto the 20 CK
metrics, and assigns defect counts from a logistic in z. Per-project knobs
(size, defect rate, sharpness, shift) give the four projects different
characters while keeping the metric->defect relation transferable.

Deterministic: fixed seeds, fixed rounding. Rerunning overwrites the CSVs
with identical bytes.
"""

import os

import numpy as np

METRICS = [
    "wmc", "dit", "noc", "cbo", "rfc", "lcom", "ca", "ce", "npm", "lcom3",
    "loc", "dam", "moa", "mfa", "cam", "ic", "cbm", "amc", "max_cc", "avg_cc",
]

# name: (rows, seed, bad-cluster weight, defect rate, logistic sharpness, z shift)
PROJECTS = {
    "ant":   dict(n=745, seed=101, version="1.7", bad=0.30, rate=0.22, sharp=2.6, shift=0.00,
                  wl=1.05),
    "ivy":   dict(n=352, seed=102, version="2.0", bad=0.20, rate=0.11, sharp=2.0, shift=-0.25,
                  wl=1.6),
    "jedit": dict(n=492, seed=104, version="4.1", bad=0.34, rate=0.26, sharp=3.0, shift=0.10,
                  wl=1.1),
    "poi":   dict(n=442, seed=103, version="3.0", bad=0.42, rate=0.45, sharp=4.5, shift=0.15,
                  wl=0.6),
}


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def pick_cut(z, sharp, rate):
    """Bisect the logistic midpoint so the expected defect rate hits `rate`."""
    lo, hi = z.min() - 5.0, z.max() + 5.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if sigmoid(sharp * (z - mid)).mean() > rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ints(x, lo, hi):
    return np.clip(np.rint(x), lo, hi).astype(int)


def gen_project(name, cfg):
    rng = np.random.default_rng(cfg["seed"])
    n = cfg["n"]

    bad = rng.random(n) < cfg["bad"]
    z = np.where(bad, rng.normal(1.2, 0.7, n), rng.normal(-1.0, 0.6, n)) + cfg["shift"]
    s = rng.normal(0.0, 1.0, n)  # size latent, independent of badness
    wl = cfg["wl"]               # weak-witness loading multiplier

    def noise(scale=1.0):
        return rng.normal(0.0, scale, n)

    # rfc is the dominant defect witness; a band of weak witnesses (cbo,
    # max_cc, lcom3, dam, cam, avg_cc) carries diluted signal, and the rest
    # track size or are plain noise.
    cols = {}
    cols["wmc"] = ints(np.exp(1.8 + 0.55 * s + 0.10 * z + 0.25 * noise()), 1, 200)
    cols["dit"] = ints(2.0 + 0.8 * noise(), 1, 8)
    cols["noc"] = ints(np.exp(0.3 + 0.6 * noise()) - 1.0, 0, 30)
    cols["cbo"] = ints(np.exp(1.5 + wl * 0.45 * z + 0.20 * s + 0.45 * noise()), 0, 120)
    cols["rfc"] = ints(np.exp(2.2 + 0.90 * z + 0.15 * s + 0.15 * noise()), 1, 400)
    cols["lcom"] = ints(np.exp(1.2 + 0.80 * s + 0.15 * z + 0.60 * noise()) - 1.0, 0, 2000)
    cols["ca"] = ints(np.exp(0.8 + 0.5 * noise()), 0, 150)
    cols["ce"] = ints(np.exp(1.2 + 0.30 * s + 0.35 * noise()), 0, 100)
    cols["npm"] = ints(0.6 * cols["wmc"] + 1.5 * noise(), 0, 150)
    cols["lcom3"] = np.clip(1.1 + wl * 0.25 * z + 0.25 * noise(), 0.0, 2.0)
    cols["loc"] = ints(np.exp(3.6 + 0.75 * s + 0.12 * z + 0.30 * noise()), 5, 10000)
    cols["dam"] = np.clip(0.75 - wl * 0.20 * z + 0.25 * noise(), 0.0, 1.0)
    cols["moa"] = ints(np.exp(0.5 + 0.5 * noise()) - 1.0, 0, 25)
    cols["mfa"] = np.clip(0.45 + 0.30 * noise(), 0.0, 1.0)
    cols["cam"] = np.clip(0.50 - wl * 0.20 * z - 0.10 * s + 0.18 * noise(), 0.05, 1.0)
    cols["ic"] = ints(0.6 + 0.7 * noise(), 0, 5)
    cols["cbm"] = ints(np.exp(0.2 + 0.6 * noise()) - 0.8, 0, 20)
    cols["amc"] = np.clip(np.exp(2.2 + 0.40 * s + 0.20 * noise()), 1.0, 300.0)
    cols["max_cc"] = ints(np.exp(0.8 + wl * 0.35 * z + 0.25 * s + 0.45 * noise()), 1, 80)
    cols["avg_cc"] = np.clip(1.0 + wl * 0.30 * z + 0.25 * s + 0.25 * noise(), 0.5, 10.0)

    cut = pick_cut(z, cfg["sharp"], cfg["rate"])
    p = sigmoid(cfg["sharp"] * (z - cut) + 0.3 * noise())
    defective = rng.random(n) < p
    bugs = np.where(defective, 1 + rng.poisson(0.7, n), 0)

    return cols, bugs


def fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    s = f"{float(v):.4f}".rstrip("0").rstrip(".")
    return s if s else "0"


def write_csv(path, name, version, cols, bugs):
    n = len(bugs)
    packages = ["core", "util", "io", "xml", "tools", "net", "model", "ui"]
    with open(path, "w", newline="\n") as out:
        out.write("name,classname," + ",".join(METRICS) + ",bug\n")
        for i in range(n):
            pkg = packages[i % len(packages)]
            cls = f"org.apache.{name}.{pkg}.C{i:04d}"
            row = [f"{name}-{version}", cls]
            row += [fmt(cols[m][i]) for m in METRICS]
            row.append(str(int(bugs[i])))
            out.write(",".join(row) + "\n")


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    out_dir = os.path.join(here, "..", "data", "ck")
    os.makedirs(out_dir, exist_ok=True)
    for name, cfg in PROJECTS.items():
        cols, bugs = gen_project(name, cfg)
        write_csv(os.path.join(out_dir, name + ".csv"), name, cfg["version"], cols, bugs)
        print(f"{name}: {len(bugs)} rows, {int((bugs > 0).sum())} defective "
              f"({(bugs > 0).mean():.1%})")


if __name__ == "__main__":
    main()
