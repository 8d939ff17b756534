"""Render experiment CSVs into the standard figure families.

The renderer is a read-only consumer of the sampler CLI's CSV outputs; all
numerics live upstream, only per-seed aggregation (means) happens here.  A
figure spec is a JSON object

    {"kind": "<family>", "inputs": ["run/mixing.csv"],
     "output": "fig.png", "options": {...}}

or an array of such objects.  Figure families:

mixing_time     : mean empirical mixing time vs dimension, one line per
                  (algorithm, C_h); dashed/dotted line styles distinguish
                  the two smallest C_h values.
distance_series : mean distance-to-reference vs iteration, per algorithm.
acceptance      : mean acceptance rate vs dimension, per (algorithm, gamma).
blr_measures    : error or NLL vs iteration; faint per-seed lines plus the
                  seed mean, per algorithm.
diff_iqr        : inter-quartile band of the signed parameter error vs
                  iteration, per algorithm.

Output PNGs are deterministic for identical CSV input: fixed figure
geometry, no timestamps, and stripped writer metadata.
"""

import argparse
import csv
import json
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

FIGSIZE = (6.4, 4.8)
DPI = 100
ALG_COLORS = {"mapla": "tab:blue", "dikin": "tab:orange"}
LINESTYLES = ["--", ":", "-", "-."]


class RenderError(Exception):
    pass


def read_rows(path, required):
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in required if c not in header]
            if missing:
                raise RenderError(f"{path}: missing column {missing[0]!r}")
            return list(reader)
    except OSError as exc:
        raise RenderError(f"cannot read {path}: {exc}") from exc


def read_many(paths, required):
    rows = []
    for path in paths:
        rows.extend(read_rows(path, required))
    return rows


def _mean(values):
    return sum(values) / len(values)


def _style(index):
    return LINESTYLES[index % len(LINESTYLES)]


def _color(alg):
    return ALG_COLORS.get(alg)


def _new_axes(title, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.3)
    return fig, ax


def render_mixing_time(rows, ax, options):
    measure = options.get("measure")
    if measure is None and rows:
        measure = rows[0]["measure"]
    data = defaultdict(lambda: defaultdict(list))
    ch_values = set()
    for row in rows:
        if row["measure"] != measure:
            continue
        ch = float(row["C_h"])
        ch_values.add(ch)
        data[(row["alg"], ch)][int(row["d"])].append(float(row["tau_hat"]))
    ch_order = {ch: i for i, ch in enumerate(sorted(ch_values))}
    for (alg, ch) in sorted(data, key=lambda k: (k[0], k[1])):
        by_d = data[(alg, ch)]
        ds = sorted(by_d)
        means = [_mean(by_d[d]) for d in ds]
        ax.plot(ds, means, marker="o", linestyle=_style(ch_order[ch]),
                color=_color(alg), label=f"{alg}, C_h={ch:g}")
    ax.set_xlabel("dimension d")
    ax.set_ylabel(f"mean empirical mixing time ({measure})" if measure else "")
    if data:
        ax.legend()


def render_distance_series(rows, ax, options):
    measure = options.get("measure")
    if measure is None and rows:
        measure = rows[0]["measure"]
    data = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if row["measure"] != measure:
            continue
        data[row["alg"]][int(row["iter"])].append(float(row["value"]))
    for alg in sorted(data):
        iters = sorted(data[alg])
        means = [_mean(data[alg][k]) for k in iters]
        ax.plot(iters, means, color=_color(alg), label=alg)
    ax.set_xlabel("iteration")
    ax.set_ylabel(measure or "")
    if options.get("logy", True) and data:
        ax.set_yscale("log")
    if data:
        ax.legend()


def render_acceptance(rows, ax, options):
    data = defaultdict(lambda: defaultdict(list))
    gammas = set()
    for row in rows:
        gamma = float(row["gamma"])
        gammas.add(gamma)
        data[(row["alg"], gamma)][int(row["d"])].append(float(row["rate"]))
    gamma_order = {g: i for i, g in enumerate(sorted(gammas))}
    for (alg, gamma) in sorted(data, key=lambda k: (k[0], k[1])):
        by_d = data[(alg, gamma)]
        ds = sorted(by_d)
        means = [_mean(by_d[d]) for d in ds]
        ax.plot(ds, means, marker="s", linestyle=_style(gamma_order[gamma]),
                color=_color(alg), label=f"{alg}, gamma={gamma:g}")
    ax.set_xlabel("dimension d")
    ax.set_ylabel("mean acceptance rate")
    ax.set_ylim(0.0, 1.0)
    if data:
        ax.legend()


def render_blr_measures(rows, ax, options):
    measure = options.get("measure", "err")
    per_seed = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if row["measure"] != measure:
            continue
        per_seed[(row["alg"], row["seed"])][int(row["iter"])].append(float(row["value"]))
    mean_acc = defaultdict(lambda: defaultdict(list))
    for (alg, seed), series in sorted(per_seed.items()):
        iters = sorted(series)
        vals = [_mean(series[k]) for k in iters]
        ax.plot(iters, vals, color=_color(alg), alpha=0.25, linewidth=0.8)
        for k in iters:
            mean_acc[alg][k].extend(series[k])
    for alg in sorted(mean_acc):
        iters = sorted(mean_acc[alg])
        means = [_mean(mean_acc[alg][k]) for k in iters]
        ax.plot(iters, means, color=_color(alg), linewidth=2.0, label=alg)
    ax.set_xlabel("iteration")
    ax.set_ylabel(measure)
    if mean_acc:
        ax.legend()


def render_diff_iqr(rows, ax, options):
    data = defaultdict(lambda: defaultdict(lambda: ([], [])))
    for row in rows:
        lo, hi = data[row["alg"]][int(row["iter"])]
        lo.append(float(row["q25"]))
        hi.append(float(row["q75"]))
    for alg in sorted(data):
        iters = sorted(data[alg])
        lo = [_mean(data[alg][k][0]) for k in iters]
        hi = [_mean(data[alg][k][1]) for k in iters]
        ax.fill_between(iters, lo, hi, alpha=0.3, color=_color(alg))
        ax.plot(iters, lo, color=_color(alg), linewidth=0.8)
        ax.plot(iters, hi, color=_color(alg), linewidth=0.8, label=alg)
    ax.set_xlabel("iteration")
    ax.set_ylabel("IQR of mean signed error")
    if data:
        ax.legend()


FIGURE_KINDS = {
    "mixing_time": (render_mixing_time,
                    ["alg", "C_h", "d", "seed", "measure", "tau_hat"]),
    "distance_series": (render_distance_series,
                        ["alg", "seed", "iter", "measure", "value"]),
    "acceptance": (render_acceptance, ["alg", "gamma", "d", "seed", "rate"]),
    "blr_measures": (render_blr_measures,
                     ["alg", "seed", "iter", "measure", "value"]),
    "diff_iqr": (render_diff_iqr, ["alg", "seed", "iter", "q25", "q75"]),
}


def render_spec(spec):
    """Render one figure spec; returns the output path."""
    kind = spec.get("kind")
    if kind not in FIGURE_KINDS:
        raise RenderError(f"unknown figure kind {kind!r}; "
                          f"expected one of {sorted(FIGURE_KINDS)}")
    inputs = spec.get("inputs")
    if not inputs:
        raise RenderError("figure spec needs a nonempty 'inputs' list")
    output = spec.get("output")
    if not output:
        raise RenderError("figure spec needs an 'output' path")
    renderer, required = FIGURE_KINDS[kind]
    rows = read_many(inputs, required)
    options = spec.get("options", {})
    fig, ax = _new_axes(options.get("title", kind), "", "")
    try:
        renderer(rows, ax, options)
        fig.savefig(output, format="png", metadata={"Software": None})
    finally:
        plt.close(fig)
    return output


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="mapla-figures",
        description="Render experiment CSVs into PNG figures")
    parser.add_argument("spec", help="figure spec JSON (object or array of objects)")
    args = parser.parse_args(argv)
    try:
        with open(args.spec) as fh:
            data = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read spec {args.spec}: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: {args.spec}: invalid JSON at line {exc.lineno}: {exc.msg}",
              file=sys.stderr)
        return 2
    specs = data if isinstance(data, list) else [data]
    try:
        for spec in specs:
            path = render_spec(spec)
            print(path)
    except RenderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
