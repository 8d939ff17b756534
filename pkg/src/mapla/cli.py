"""Experiment harness: sampling runs, Dirichlet and logistic-regression
benchmarks, metric property sweeps, and step-size recommendations.

Subcommands
-----------
sample    : run one sampler configuration, write samples.csv + tallies.csv
dirichlet : mixing-time and acceptance-rate studies on the simplex
blr       : Bayesian logistic regression posterior benchmark on a rotated box
check     : metric property report at random interior probes
stepsize  : print the theory-backed step-size bound

Every subcommand reads a JSON config (``--config``), with CLI flags taking
precedence over config fields, writes CSVs with a fixed schema plus a JSON
run manifest, and is byte-reproducible: outputs depend only on the
configuration and master seed, never on worker count or scheduling.

Exit codes: 0 success, 1 property-check failures, 2 config/IO errors.
"""

import argparse
import csv
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, diagnostics, linalg, samplers
from .errors import MaplaError
from .metrics import (
    box_logbarrier,
    bodies,
    check_average_self_concordance,
    check_curvature_bounds,
    check_gradient_bound,
    check_lower_trace,
    check_self_concordance,
    check_strong_self_concordance,
    corrupt_metric,
    ellipsoid_barrier,
    entropic_ball_extended,
    lp_ball_extended,
    polytope_logbarrier,
    probe_points,
    simplex_logbarrier,
    symmetry_probe,
    vaidya,
)
from .potentials import (
    dirichlet_potential,
    linear_potential,
    load_blr_csv,
    quadratic_potential,
    uniform_potential,
)

# Reserved RNG stream indices (chains use 0..n_chains-1).
REF_STREAM = 2 ** 48
REF_STREAM_B = 2 ** 48 + 1
DATA_STREAM = 2 ** 48 + 2


class ConfigError(MaplaError):
    """Invalid configuration or input file; maps to exit code 2."""


# ---------------------------------------------------------------------------
# config plumbing


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}") from exc
    if isinstance(data, dict) and "config" in data and "subcommand" in data:
        # a run manifest; re-use its embedded config
        return data["config"]
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top-level JSON value must be an object")
    return data


def _require(cfg, key, kind=None):
    if key not in cfg:
        raise ConfigError(f"missing config field {key!r}")
    val = cfg[key]
    if kind is not None and not isinstance(val, kind):
        raise ConfigError(f"config field {key!r} has wrong type")
    return val


def build_body(spec):
    kind = _require(spec, "kind", str)
    if kind == "box":
        return bodies.Box(np.asarray(_require(spec, "lo", list), dtype=float),
                          np.asarray(_require(spec, "hi", list), dtype=float))
    if kind == "simplex":
        return bodies.Simplex(int(_require(spec, "dim")))
    if kind == "ellipsoid":
        return bodies.Ellipsoid(np.asarray(_require(spec, "c", list), dtype=float),
                                np.asarray(_require(spec, "D", list), dtype=float))
    if kind == "polytope":
        if "file" in spec:
            try:
                body = bodies.load_polytope(spec["file"])
            except OSError as exc:
                raise ConfigError(f"cannot read polytope file {spec['file']}: {exc}") from exc
            except (KeyError, json.JSONDecodeError) as exc:
                raise ConfigError(f"bad polytope file {spec['file']}: {exc}") from exc
        else:
            body = bodies.Polytope(np.asarray(_require(spec, "A", list), dtype=float),
                                   np.asarray(_require(spec, "b", list), dtype=float))
        if "center" in spec:
            body.center = np.asarray(spec["center"], dtype=float)
        return body
    if kind == "lp_ball":
        return bodies.LpBallExtended(float(_require(spec, "p")), int(_require(spec, "dim")))
    if kind == "entropic_ball":
        return bodies.EntropicBallExtended(int(_require(spec, "dim")))
    raise ConfigError(f"unknown body kind {kind!r}")


def build_metric(body_spec, metric_kind="logbarrier"):
    kind = body_spec.get("kind")
    body = build_body(body_spec)
    if metric_kind == "logbarrier":
        if kind == "box":
            return box_logbarrier(body.lo, body.hi)
        if kind == "simplex":
            return simplex_logbarrier(body.dim)
        if kind == "ellipsoid":
            return ellipsoid_barrier(body.c, body.D)
        if kind == "polytope":
            metric = polytope_logbarrier(body.A, body.b)
            metric.body.center = body.center
            return metric
        if kind == "lp_ball":
            return lp_ball_extended(body.p, body.base_dim)
        if kind == "entropic_ball":
            return entropic_ball_extended(body.base_dim)
        raise ConfigError(f"no log-barrier metric for body kind {kind!r}")
    if metric_kind == "vaidya":
        if kind == "polytope":
            metric = vaidya(body.A, body.b)
            metric.body.center = body.center
            return metric
        if kind == "simplex":
            poly = body.as_polytope()
            metric = vaidya(poly.A, poly.b)
            metric.body.center = poly.center
            return metric
        if kind == "box":
            poly = body.as_polytope()
            metric = vaidya(poly.A, poly.b)
            metric.body.center = poly.center
            return metric
        raise ConfigError(f"vaidya metric needs a polytope-like body, got {kind!r}")
    raise ConfigError(f"unknown metric kind {metric_kind!r}")


def build_potential(spec):
    kind = _require(spec, "kind", str)
    if kind == "uniform":
        return uniform_potential(int(_require(spec, "dim")))
    if kind == "dirichlet":
        return dirichlet_potential(np.asarray(_require(spec, "a", list), dtype=float))
    if kind == "linear":
        return linear_potential(np.asarray(_require(spec, "sigma", list), dtype=float))
    if kind == "quadratic":
        return quadratic_potential(np.asarray(_require(spec, "c", list), dtype=float),
                                   np.asarray(_require(spec, "D", list), dtype=float),
                                   float(_require(spec, "scale")))
    if kind == "blr":
        try:
            data = load_blr_csv(_require(spec, "file", str))
        except OSError as exc:
            raise ConfigError(f"cannot read BLR dataset {spec['file']}: {exc}") from exc
        from .potentials import blr_potential
        return blr_potential(data)
    raise ConfigError(f"unknown potential kind {kind!r}")


def build_init(spec, metric):
    if spec is None:
        return samplers.DikinUniform(metric.body.interior_point(), 0.5)
    kind = _require(spec, "kind", str)
    if kind == "point":
        return samplers.PointMass(np.asarray(_require(spec, "x", list), dtype=float))
    if kind == "dikin":
        center = (np.asarray(spec["center"], dtype=float) if "center" in spec
                  else metric.body.interior_point())
        return samplers.DikinUniform(center, float(spec.get("radius", 0.5)))
    raise ConfigError(f"unknown init kind {kind!r}")


# ---------------------------------------------------------------------------
# output plumbing


def _fmt_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])
    return str(path)


def write_manifest(path, subcommand, config, outputs, wall_clock, extras=None):
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "master_seed": config.get("seed", 0),
        "version": __version__,
        "wall_clock_s": wall_clock,
        "outputs": sorted(outputs),
        "extras": extras or {},
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return str(path)


def _fan(worker, jobs, n_workers):
    """Run jobs (plain-data tuples) preserving order; results are identical
    for any worker count because each job is independently seeded."""
    if n_workers <= 1 or len(jobs) <= 1:
        return [worker(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(worker, jobs))


def _csv_int_list(text):
    return [int(v) for v in str(text).split(",") if v != ""]


def _csv_float_list(text):
    return [float(v) for v in str(text).split(",") if v != ""]


def _csv_str_list(text):
    return [v for v in str(text).split(",") if v != ""]


# ---------------------------------------------------------------------------
# sample


def _sample_worker(args):
    cfg, lo, hi = args
    metric = build_metric(cfg["body"], cfg.get("metric", "logbarrier"))
    potential = build_potential(cfg["potential"])
    sampler_cfg = samplers.SamplerConfig(
        metric, potential, float(cfg["h"]),
        algorithm=cfg.get("algorithm", samplers.MAPLA),
        master_seed=int(cfg.get("seed", 0)),
        lazy=bool(cfg.get("lazy", False)))
    init = build_init(cfg.get("init"), metric)
    grid = samplers.record_grid(int(cfg["n_iters"]), cfg.get("record_every"))
    out_points = {k: [] for k in grid}
    out_tallies = {k: samplers.Tallies() for k in grid}
    for i in range(lo, hi):
        rng = linalg.chain_rng(sampler_cfg.master_seed, i)
        state = samplers.make_state(init.draw(metric, rng), sampler_cfg, rng)
        grid_set = set(grid)
        if 0 in grid_set:
            out_points[0].append((i, state.x.copy()))
        for k in range(1, int(cfg["n_iters"]) + 1):
            state, _ = samplers.step(state, sampler_cfg)
            if k in grid_set:
                out_points[k].append((i, state.x.copy()))
                out_tallies[k] = out_tallies[k].add(state.tallies)
    return grid, out_points, out_tallies


def cmd_sample(args):
    cfg = load_config(args.config)
    for key in ("body", "potential", "h", "n_chains", "n_iters"):
        _require(cfg, key)
    if args.seed is not None:
        cfg["seed"] = args.seed
    n_chains = int(cfg["n_chains"])
    if n_chains < 1:
        raise ConfigError("n_chains must be >= 1")
    if int(cfg["n_iters"]) < 0:
        raise ConfigError("n_iters must be >= 0")
    t0 = time.perf_counter()
    # chunk chains across workers; chain i is seeded independently
    n_workers = max(1, args.workers)
    chunk = max(1, math.ceil(n_chains / n_workers))
    jobs = [(cfg, lo, min(lo + chunk, n_chains)) for lo in range(0, n_chains, chunk)]
    results = _fan(_sample_worker, jobs, n_workers)
    grid = results[0][0]
    dim = len(results[0][1][grid[0]][0][1])
    sample_rows = []
    tally_rows = []
    for k in grid:
        per_k = []
        tall = samplers.Tallies()
        for _, points, tallies in results:
            per_k.extend(points[k])
            tall = tall.add(tallies[k])
        per_k.sort(key=lambda item: item[0])
        for chain, x in per_k:
            sample_rows.append([chain, k] + [float(v) for v in x])
        tally_rows.append([k, tall.accepted, tall.rejected_mh, tall.rejected_outside,
                           tall.rejected_numerical, tall.lazy_stays])
    outdir = args.out
    outputs = [
        write_csv(outdir / "samples.csv",
                  ["chain", "iter"] + [f"x_{j + 1}" for j in range(dim)], sample_rows),
        write_csv(outdir / "tallies.csv",
                  ["iter", "accepted", "rejected_mh", "rejected_outside",
                   "rejected_numerical", "lazy_stays"], tally_rows),
    ]
    write_manifest(outdir / "sample_manifest.json", "sample", cfg, outputs,
                   time.perf_counter() - t0)
    return 0


# ---------------------------------------------------------------------------
# dirichlet benchmarks


def dirichlet_ramp(d, a_min, a_max):
    return a_min + (np.arange(d + 1) / d) * (a_max - a_min)


def _parse_a_spec(a_spec, d):
    parts = str(a_spec).split(":")
    if parts[0] == "ramp" and len(parts) == 3:
        return dirichlet_ramp(d, float(parts[1]), float(parts[2]))
    if parts[0] == "const" and len(parts) == 2:
        return np.full(d + 1, float(parts[1]))
    raise ConfigError(f"bad a_spec {a_spec!r}; expected 'ramp:MIN:MAX' or 'const:C'")


def _run_simplex_chains(alg, d, a, h, n_chains, n_iters, record_every, master_seed):
    metric = simplex_logbarrier(d)
    potential = dirichlet_potential(a)
    cfg = samplers.SamplerConfig(metric, potential, h, algorithm=alg,
                                 master_seed=master_seed)
    init = samplers.DikinUniform(metric.body.interior_point(), 0.5)
    return samplers.run_chains(cfg, n_chains, n_iters, init, record_every)


def _dirichlet_mix_worker(args):
    (alg, c_h, d, seed, base_seed, a_spec, n_chains, n_iters,
     record_every, measures, w2_iters) = args
    a = _parse_a_spec(a_spec, d)
    h = c_h / (a.max() * d)
    master = base_seed + seed
    batches = _run_simplex_chains(alg, d, a, h, n_chains, n_iters, record_every, master)
    ref = diagnostics.dirichlet_reference(a, n_chains, linalg.chain_rng(master, REF_STREAM))
    ref_b = diagnostics.dirichlet_reference(a, n_chains, linalg.chain_rng(master, REF_STREAM_B))
    dist_rows = []
    mix_rows = []
    for measure in measures:
        if measure == "ed":
            dist = lambda X: diagnostics.energy_distance(X, ref)
            floor = diagnostics.energy_distance(ref_b, ref)
        elif measure == "w2sq":
            dist = lambda X: diagnostics.sinkhorn_w2sq(X, ref, max_iter=w2_iters).value
            floor = diagnostics.sinkhorn_w2sq(ref_b, ref, max_iter=w2_iters).value
        else:
            raise ConfigError(f"unknown measure {measure!r}")
        iters = []
        values = []
        for batch in batches:
            if batch.iteration == 0:
                continue
            iters.append(batch.iteration)
            values.append(float(dist(batch.points)))
            dist_rows.append([alg, seed, batch.iteration, measure, values[-1]])
        tau = diagnostics.empirical_mixing_time(
            diagnostics.DistanceSeries(iters, values, measure), 2.0 * floor)
        mix_rows.append([alg, c_h, d, seed, measure, float(tau)])
    return dist_rows, mix_rows


def _dirichlet_accept_worker(args):
    (alg, gamma, d, seed, base_seed, a_spec, n_chains, n_iters,
     record_every, burn_in) = args
    a = _parse_a_spec(a_spec, d)
    h = 1.0 / (10.0 * d ** gamma)
    master = base_seed + seed
    batches = _run_simplex_chains(alg, d, a, h, n_chains, n_iters,
                                  record_every, master)
    rate = diagnostics.acceptance_rate(batches, burn_in)
    return [alg, gamma, d, seed, float(rate)]


def cmd_dirichlet(args):
    cfg = load_config(args.config) if args.config else {}
    def get(flag, key, default):
        if flag is not None:
            return flag
        val = cfg.get(key)
        return default if val is None else val

    dims = get(args.dims and _csv_int_list(args.dims), "dims", [10])
    algs = get(args.algs and _csv_str_list(args.algs), "algs",
               [samplers.MAPLA, samplers.DIKIN_WALK])
    seeds = get(args.seeds and _csv_int_list(args.seeds), "seeds", [0, 1, 2, 3, 4])
    n_chains = int(get(args.n_chains, "n_chains", 500))
    n_iters = int(get(args.n_iters, "n_iters", 1500))
    record_every = int(get(args.record_every, "record_every", 25))
    base_seed = int(get(args.seed, "seed", 0))
    burn_in = int(get(args.burn_in, "burn_in", 500))
    measures = get(args.measures and _csv_str_list(args.measures), "measures", ["ed"])
    w2_iters = int(cfg.get("w2_iters", 200))
    ch_list = get(args.ch and _csv_float_list(args.ch), "ch", None)
    gammas = get(args.gammas and _csv_float_list(args.gammas), "gammas", None)
    if n_chains < 1:
        raise ConfigError("n_chains must be >= 1")
    if not ch_list and not gammas:
        raise ConfigError("nothing to do: provide --ch for the mixing study "
                          "and/or --gammas for the acceptance sweep")
    for alg in algs:
        if alg not in (samplers.MAPLA, samplers.DIKIN_WALK):
            raise ConfigError(f"unknown algorithm {alg!r}")
    t0 = time.perf_counter()
    outputs = []
    extras = {}
    if ch_list:
        a_spec = get(args.a_spec, "a_spec", "ramp:1:3")
        mix_rows_all = []
        for d in dims:
            for c_h in ch_list:
                jobs = [(alg, c_h, d, seed, base_seed, a_spec, n_chains, n_iters,
                         record_every, measures, w2_iters)
                        for alg in algs for seed in seeds]
                results = _fan(_dirichlet_mix_worker, jobs, args.workers)
                dist_rows = [row for dist, _ in results for row in dist]
                mix_rows_all.extend(row for _, mix in results for row in mix)
                outputs.append(write_csv(
                    args.out / f"distance_d{d}_ch{c_h:g}.csv",
                    ["alg", "seed", "iter", "measure", "value"], dist_rows))
        outputs.append(write_csv(args.out / "mixing.csv",
                                 ["alg", "C_h", "d", "seed", "measure", "tau_hat"],
                                 mix_rows_all))
        extras["mixing"] = {"a_spec": a_spec, "delta_rule": "2x reference self-distance",
                            "init": "dikin-uniform radius 0.5 at barycenter"}
    if gammas:
        a_spec = get(args.a_spec, "a_spec", "const:2")
        jobs = [(alg, gamma, d, seed, base_seed, a_spec, n_chains, n_iters,
                 record_every, burn_in)
                for alg in algs for gamma in gammas for d in dims for seed in seeds]
        rows = _fan(_dirichlet_accept_worker, jobs, args.workers)
        outputs.append(write_csv(args.out / "acceptance.csv",
                                 ["alg", "gamma", "d", "seed", "rate"], rows))
        extras["acceptance"] = {"a_spec": a_spec, "burn_in": burn_in,
                                "h_rule": "1/(10 d^gamma)"}
    config_echo = {
        "dims": dims, "algs": algs, "seeds": seeds, "n_chains": n_chains,
        "n_iters": n_iters, "record_every": record_every, "seed": base_seed,
        "burn_in": burn_in, "measures": measures, "ch": ch_list, "gammas": gammas,
        "a_spec": get(args.a_spec, "a_spec", None), "w2_iters": w2_iters,
    }
    write_manifest(args.out / "dirichlet_manifest.json", "dirichlet", config_echo,
                   outputs, time.perf_counter() - t0, extras)
    return 0


# ---------------------------------------------------------------------------
# Bayesian logistic regression benchmark


def givens_rotation_matrix(d, angles):
    """Product of Givens rotations in the planes (0,1), (2,3), ... (disjoint,
    so the factors commute)."""
    R = np.eye(d)
    for i, theta in enumerate(angles):
        c, s = math.cos(theta), math.sin(theta)
        j = 2 * i
        R[j, j] = c
        R[j, j + 1] = -s
        R[j + 1, j] = s
        R[j + 1, j + 1] = c
    return R


def power_iteration(M, iters=200):
    v = np.full(M.shape[0], 1.0 / math.sqrt(M.shape[0]))
    for _ in range(iters):
        w = M @ v
        v = w / np.linalg.norm(w)
    return float(v @ (M @ v))


def make_blr_instance(d, n_factor, master_seed):
    """Dataset and rotated-box parameter polytope for one seed.

    Covariates have independent +-1/sqrt(d) entries, labels follow the
    logistic model at theta* = 1; the parameter space is [-2,2]^d rotated by
    floor(d/2) Givens rotations with seeded angles and translated by 0.5.
    """
    rng = linalg.chain_rng(master_seed, DATA_STREAM)
    n = n_factor * d
    X = rng.choice(np.array([-1.0, 1.0]), size=(n, d)) / math.sqrt(d)
    theta_star = np.ones(d)
    y = (rng.random(n) < 1.0 / (1.0 + np.exp(-X @ theta_star))).astype(float)
    angles = rng.random(d // 2) * 2.0 * math.pi
    R = givens_rotation_matrix(d, angles)
    translation = np.full(d, 0.5)
    A = np.vstack([R, -R])
    b = np.concatenate([2.0 + R @ translation, 2.0 - R @ translation])
    lam_max = power_iteration(X.T @ X)
    return X, y, theta_star, A, b, translation, angles, lam_max


def _blr_worker(args):
    (alg, c_h, seed, base_seed, d, n_factor, n_chains, n_iters, record_every) = args
    master = base_seed + seed
    X, y, theta_star, A, b, translation, angles, lam_max = \
        make_blr_instance(d, n_factor, master)
    from .potentials import BlrData, blr_potential
    data = BlrData(X=X, y=y)
    metric = polytope_logbarrier(A, b)
    potential = blr_potential(data)
    h = c_h / (lam_max * d)
    cfg = samplers.SamplerConfig(metric, potential, h, algorithm=alg, master_seed=master)
    # Chains start away from the posterior mode (box coordinate u = -1, vs
    # the mode near theta* = 1) so the recorded series shows the approach to
    # the posterior rather than plateau noise.
    R = givens_rotation_matrix(d, angles)
    init_center = translation + R.T @ np.full(d, -1.0)
    init = samplers.DikinUniform(init_center, 0.5)
    batches = samplers.run_chains(cfg, n_chains, n_iters, init, record_every)
    meas_rows = []
    diff_rows = []
    for batch in batches:
        err, nll = diagnostics.blr_measures(batch, theta_star, data)
        meas_rows.append([alg, seed, batch.iteration, "err", err])
        meas_rows.append([alg, seed, batch.iteration, "nll", nll])
        q25, q75 = diagnostics.diff_quantiles(batch, theta_star)
        diff_rows.append([alg, seed, batch.iteration, q25, q75])
    return meas_rows, diff_rows, {"seed": seed, "lambda_max": lam_max,
                                  "angles": list(angles),
                                  "translation": translation.tolist()}


def cmd_blr(args):
    cfg = load_config(args.config) if args.config else {}
    def get(flag, key, default):
        if flag is not None:
            return flag
        val = cfg.get(key)
        return default if val is None else val

    d = int(get(args.d, "d", 32))
    if d < 2:
        raise ConfigError("blr requires d >= 2")
    n_factor = int(get(args.n_factor, "n_factor", 20))
    ch_list = get(args.ch and _csv_float_list(args.ch), "ch", [0.1, 0.2])
    seeds = get(args.seeds and _csv_int_list(args.seeds), "seeds", [0, 1, 2])
    algs = get(args.algs and _csv_str_list(args.algs), "algs",
               [samplers.MAPLA, samplers.DIKIN_WALK])
    n_chains = int(get(args.n_chains, "n_chains", 100))
    n_iters = int(get(args.n_iters, "n_iters", 1500))
    record_every = int(get(args.record_every, "record_every", 50))
    base_seed = int(get(args.seed, "seed", 0))
    t0 = time.perf_counter()
    outputs = []
    extras = {"instances": []}
    for c_h in ch_list:
        jobs = [(alg, c_h, seed, base_seed, d, n_factor, n_chains, n_iters, record_every)
                for alg in algs for seed in seeds]
        results = _fan(_blr_worker, jobs, args.workers)
        meas_rows = [row for meas, _, _ in results for row in meas]
        diff_rows = [row for _, diff, _ in results for row in diff]
        outputs.append(write_csv(args.out / f"blr_measures_ch{c_h:g}.csv",
                                 ["alg", "seed", "iter", "measure", "value"], meas_rows))
        outputs.append(write_csv(args.out / f"blr_diff_ch{c_h:g}.csv",
                                 ["alg", "seed", "iter", "q25", "q75"], diff_rows))
        extras["instances"] = [info for _, _, info in results[: len(seeds)]]
    config_echo = {
        "d": d, "n_factor": n_factor, "ch": ch_list, "seeds": seeds, "algs": algs,
        "n_chains": n_chains, "n_iters": n_iters, "record_every": record_every,
        "seed": base_seed,
    }
    extras["init"] = "dikin-uniform radius 0.5 at box coordinate u = -1"
    write_manifest(args.out / "blr_manifest.json", "blr", config_echo, outputs,
                   time.perf_counter() - t0, extras)
    return 0


# ---------------------------------------------------------------------------
# property checks


def cmd_check(args):
    cfg = load_config(args.config)
    body_spec = _require(cfg, "body", dict)
    metric = build_metric(body_spec, cfg.get("metric", "logbarrier"))
    if args.corrupt:
        metric = corrupt_metric(metric)
    n_probes = int(args.n_probes if args.n_probes is not None
                   else cfg.get("n_probes", 200))
    seed = int(args.seed if args.seed is not None else cfg.get("seed", 0))
    alpha = float(cfg.get("alpha", 4.0))
    potential = build_potential(cfg["potential"]) if "potential" in cfg else None
    x0 = np.asarray(cfg["x0"], dtype=float) if "x0" in cfg else None
    t0 = time.perf_counter()
    rows = []
    if n_probes > 0:
        probes = probe_points(metric, n_probes, linalg.chain_rng(seed, 0), x0=x0)
        dir_rng = linalg.chain_rng(seed, 1)
        for idx, x in enumerate(probes):
            v = dir_rng.standard_normal(metric.dim)
            for rep in (check_self_concordance(metric, x, v),
                        check_strong_self_concordance(metric, x, v),
                        check_lower_trace(metric, x, v, alpha=alpha)):
                rows.append([rep.name, idx, rep.lhs, rep.rhs, rep.passed])
            if potential is not None and potential.metadata is not None:
                meta = potential.metadata
                rep = check_curvature_bounds(potential, metric, x, meta.mu, meta.lam)
                rows.append([rep.name, idx, rep.lhs, rep.rhs, rep.passed])
                rep = check_gradient_bound(potential, metric, x, meta.beta)
                rows.append([rep.name, idx, rep.lhs, rep.rhs, rep.passed])
        mc_rng = linalg.chain_rng(seed, 2)
        for idx, x in enumerate(probes[: min(5, n_probes)]):
            rep = check_average_self_concordance(
                metric, x, h=float(cfg.get("avg_sc_h", 1e-4)),
                eps=0.1, n_mc=int(cfg.get("avg_sc_mc", 2000)), rng=mc_rng)
            rows.append([rep.name, idx, rep.lhs, rep.rhs, rep.passed])
        sym = symmetry_probe(metric, probes[0], int(cfg.get("sym_dirs", 100)),
                             linalg.chain_rng(seed, 3))
        rows.append(["dikin-containment", 0, sym.min_exit_gnorm, 1.0,
                     sym.min_exit_gnorm >= 1.0 - 1e-6])
        rows.append(["symmetry-nu-hat", 0, sym.nu_hat, float("nan"), True])
    outputs = [write_csv(args.out / "check_report.csv",
                         ["check", "probe", "lhs", "rhs", "passed"], rows)]
    failures = sum(1 for row in rows if row[4] is False)
    write_manifest(args.out / "check_manifest.json", "check", dict(cfg), outputs,
                   time.perf_counter() - t0, {"failures": failures})
    if failures:
        print(f"{failures} property-check failures; see check_report.csv",
              file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# step size


def cmd_stepsize(args):
    h = samplers.recommend_step_size(
        args.regime, d=args.d, lam=args.lam, beta=args.beta, alpha=args.alpha,
        M=args.M, delta=args.delta, c1=args.c1)
    print(format(h, ".17g"))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser, needs_out=True):
    parser.add_argument("--config", type=str, default=None,
                        help="JSON config file (or a previous run manifest)")
    if needs_out:
        parser.add_argument("--out", type=str, default=".",
                            help="output directory (must exist)")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes for independent jobs")
    parser.add_argument("--seed", type=int, default=None, help="master seed")


def make_parser():
    parser = argparse.ArgumentParser(
        prog="mapla",
        description="Constrained sampling experiments with MAPLA and DikinWalk")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run one sampler configuration")
    _add_common(p)

    p = sub.add_parser("dirichlet", help="Dirichlet benchmarks on the simplex")
    _add_common(p)
    p.add_argument("--dims", type=str, default=None, help="comma-separated dimensions")
    p.add_argument("--algs", type=str, default=None, help="comma-separated algorithms")
    p.add_argument("--seeds", type=str, default=None, help="comma-separated seed labels")
    p.add_argument("--ch", type=str, default=None,
                   help="step-size constants C_h for the mixing study")
    p.add_argument("--gammas", type=str, default=None,
                   help="gamma exponents for the acceptance sweep")
    p.add_argument("--a-spec", dest="a_spec", type=str, default=None,
                   help="'ramp:MIN:MAX' or 'const:C'")
    p.add_argument("--n-chains", dest="n_chains", type=int, default=None)
    p.add_argument("--n-iters", dest="n_iters", type=int, default=None)
    p.add_argument("--record-every", dest="record_every", type=int, default=None)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=None)
    p.add_argument("--measures", type=str, default=None, help="ed,w2sq")

    p = sub.add_parser("blr", help="Bayesian logistic regression benchmark")
    _add_common(p)
    p.add_argument("-d", type=int, default=None, help="parameter dimension")
    p.add_argument("--n-factor", dest="n_factor", type=int, default=None,
                   help="dataset size multiplier (n = factor * d)")
    p.add_argument("--ch", type=str, default=None)
    p.add_argument("--algs", type=str, default=None)
    p.add_argument("--seeds", type=str, default=None)
    p.add_argument("--n-chains", dest="n_chains", type=int, default=None)
    p.add_argument("--n-iters", dest="n_iters", type=int, default=None)
    p.add_argument("--record-every", dest="record_every", type=int, default=None)

    p = sub.add_parser("check", help="metric property report")
    _add_common(p)
    p.add_argument("--n-probes", dest="n_probes", type=int, default=None)
    p.add_argument("--corrupt", action="store_true",
                   help="negative control: corrupt the metric before checking")

    p = sub.add_parser("stepsize", help="print the theory-backed step-size bound")
    p.add_argument("regime", choices=["sc", "scpp", "exp"])
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--lam", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=4.0)
    p.add_argument("--M", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--c1", type=float, default=1.0)
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "out"):
        from pathlib import Path
        args.out = Path(args.out)
        if not args.out.is_dir():
            print(f"output directory {args.out} does not exist", file=sys.stderr)
            return 2
    handlers = {
        "sample": cmd_sample,
        "dirichlet": cmd_dirichlet,
        "blr": cmd_blr,
        "check": cmd_check,
        "stepsize": cmd_stepsize,
    }
    try:
        if args.command == "sample" and args.config is None:
            raise ConfigError("sample requires --config")
        if args.command == "check" and args.config is None:
            raise ConfigError("check requires --config")
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, MaplaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
