"""Experiment driver: Monte-Carlo orchestration, CDFs, and result persistence.

A run sweeps random network setups; within each setup it averages per-user
spectral efficiency over coherence blocks for every requested combiner and
power policy, then appends sum-capacity and cost-model records. Results are
deterministic functions of the master seed: per-setup and per-block RNG
streams are derived from (master_seed, setup[, block]), and reductions sum
over preallocated block axes so evaluation order cannot matter.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import json
import logging
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import costmodel
from .channel import estimation_model, realize_block
from .combining import (
    ALL_KINDS,
    CENTRALIZED_KINDS,
    LOCAL_KINDS,
    build_combiner,
)
from .errors import ConfigurationError, DegenerateCombinerError, MomentInconsistencyError
from .performance import (
    DISTRIBUTED_SINR_FORMS,
    PRELOG_FORMS,
    DistributedMoments,
    block_local_moments,
    centralized_sinr,
    distributed_linearization,
    distributed_sinr,
    linearize_sinr,
    prelog_factor,
)
from .powercontrol import maxmin_bisection, sinr_upper_bound
from .scenario import NetworkConfig, PathlossParams, build_scenario

log = logging.getLogger("cfmimo")

POWER_POLICIES = ("full", "maxmin")

_SCENARIO_TAG = 101
_BLOCK_TAG = 202


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run needs, mirrored by the config file."""

    network: NetworkConfig = field(default_factory=NetworkConfig)
    n_setups: int = 50
    n_blocks: int = 100
    combiners: tuple = ALL_KINDS
    power_policies: tuple = POWER_POLICIES
    epsilon: float = 1e-3
    prelog_form: str = "data"
    distributed_sinr_form: str = "per-ap"
    rzf_alpha: float = None          # None: use the noise power
    output_dir: str = "out"
    master_seed: int = 1

    def validate(self):
        self.network.validate()
        for name in ("n_setups", "n_blocks"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ConfigurationError(name, f"must be a positive integer, got {v!r}")
        if not self.combiners:
            raise ConfigurationError("combiners", "at least one combiner is required")
        for c in self.combiners:
            if c not in ALL_KINDS:
                raise ConfigurationError("combiners", f"unknown combiner {c!r}")
        if not self.power_policies:
            raise ConfigurationError("power_policies", "at least one policy is required")
        for p in self.power_policies:
            if p not in POWER_POLICIES:
                raise ConfigurationError("power_policies", f"unknown policy {p!r}")
        if not self.epsilon > 0:
            raise ConfigurationError("epsilon", f"must be positive, got {self.epsilon}")
        if self.prelog_form not in PRELOG_FORMS:
            raise ConfigurationError("prelog_form", f"must be one of {PRELOG_FORMS}")
        if self.distributed_sinr_form not in DISTRIBUTED_SINR_FORMS:
            raise ConfigurationError(
                "distributed_sinr_form", f"must be one of {DISTRIBUTED_SINR_FORMS}"
            )
        if self.rzf_alpha is not None and not self.rzf_alpha > 0:
            raise ConfigurationError("rzf_alpha", f"must be positive, got {self.rzf_alpha}")


@dataclass(frozen=True)
class ResultRecord:
    """Block-averaged outcome for one (setup, user, combiner, policy) cell."""

    setup: int
    user: int
    combiner: str
    policy: str
    se: float           # bits per channel use
    sinr: float         # mean SINR (linear)
    eta: float          # mean power coefficient used


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: ExperimentConfig
    records: list
    capacity_rows: list      # dicts: setup, combiner, policy, capacity_mbps
    cost_rows: list
    skips: list              # dicts: setup, combiner, reason


def scenario_seed(master_seed, setup):
    """Deterministic per-setup scenario seed derived from the master seed."""
    ss = np.random.SeedSequence([master_seed, _SCENARIO_TAG, setup])
    return int(ss.generate_state(1, np.uint64)[0])


def block_seed(master_seed, setup, block):
    """Deterministic per-block seed sequence for channel realizations."""
    return np.random.SeedSequence([master_seed, _BLOCK_TAG, setup, block])


def _moment_arrays(n_blocks, K, L):
    return (
        np.zeros((n_blocks, K, L), dtype=complex),
        np.zeros((n_blocks, K, K, L)),
        np.zeros((n_blocks, K, K, L)),
        np.zeros((n_blocks, K, L)),
        np.zeros((n_blocks, K, K)),
    )


def run_experiment(cfg):
    """Execute the full pipeline for one configuration; pure given master_seed."""
    cfg.validate()
    net = cfg.network
    prelog = prelog_factor(net.tau_p, net.tau_u, cfg.prelog_form)
    do_full = "full" in cfg.power_policies
    do_maxmin = "maxmin" in cfg.power_policies
    cent_kinds = [c for c in cfg.combiners if c in CENTRALIZED_KINDS]
    local_kinds = [c for c in cfg.combiners if c in LOCAL_KINDS]

    records = []
    skips = []
    full_eta = np.ones(net.K)

    for s in range(cfg.n_setups):
        scn = build_scenario(replace(net, seed=scenario_seed(cfg.master_seed, s)))
        model = estimation_model(scn)
        dead = {}

        gam = {}
        eta_acc = {}
        for c in cent_kinds:
            for p in cfg.power_policies:
                gam[(c, p)] = np.zeros((cfg.n_blocks, net.K))
            eta_acc[c] = np.ones((cfg.n_blocks, net.K))
        moments = {c: _moment_arrays(cfg.n_blocks, net.K, net.L) for c in local_kinds}

        for b in range(cfg.n_blocks):
            state = realize_block(scn, block_seed(cfg.master_seed, s, b), model)
            gmax = None
            for c in cent_kinds:
                if c in dead:
                    continue
                try:
                    comb = build_combiner(
                        c, state, net.p_u, scn.sigma_z2, eta=full_eta, rzf_alpha=cfg.rzf_alpha
                    )
                except DegenerateCombinerError as err:
                    dead[c] = f"skipped: rank-deficient ({err})"
                    continue
                lin = linearize_sinr(comb, state, net.p_u, scn.sigma_z2)
                if do_full:
                    gam[(c, "full")][b] = centralized_sinr(lin, full_eta)
                if do_maxmin:
                    if gmax is None:
                        gmax = sinr_upper_bound(state, net.p_u, scn.sigma_z2)
                    eta_star, trace = maxmin_bisection(lin, cfg.epsilon, gamma_max=gmax)
                    if log.isEnabledFor(logging.DEBUG):
                        for lo, hi, gt, ok in trace.steps:
                            log.debug(
                                "maxmin setup=%d block=%d comb=%s lo=%.6g hi=%.6g "
                                "target=%.6g feasible=%s", s, b, c, lo, hi, gt, ok,
                            )
                    gam[(c, "maxmin")][b] = centralized_sinr(lin, eta_star)
                    eta_acc[c][b] = eta_star
            for c in local_kinds:
                if c in dead:
                    continue
                try:
                    comb = build_combiner(c, state, net.p_u, scn.sigma_z2, eta=full_eta)
                except DegenerateCombinerError as err:
                    dead[c] = f"skipped: rank-deficient ({err})"
                    continue
                for slot, term in zip(moments[c], block_local_moments(state, comb.vectors)):
                    slot[b] = term

        for c in cent_kinds:
            if c in dead:
                continue
            for p in cfg.power_policies:
                g = gam[(c, p)]
                se = prelog * np.log2(1.0 + g).mean(axis=0)
                sinr = g.mean(axis=0)
                eta = eta_acc[c].mean(axis=0) if p == "maxmin" else full_eta
                for k in range(net.K):
                    records.append(ResultRecord(s, k, c, p, float(se[k]), float(sinr[k]), float(eta[k])))

        for c in local_kinds:
            if c in dead:
                continue
            arrs = moments[c]
            mom = DistributedMoments(
                mean_gain=arrs[0].mean(axis=0),
                second_cross=arrs[1].mean(axis=0),
                err_quad=arrs[2].mean(axis=0),
                norm2=arrs[3].mean(axis=0),
                second_cross_sum=arrs[4].mean(axis=0),
                n_samples=cfg.n_blocks,
            )
            try:
                if do_full:
                    g_full = distributed_sinr(
                        mom, full_eta, net.p_u, scn.sigma_z2, cfg.distributed_sinr_form
                    )
                    se = prelog * np.log2(1.0 + g_full)
                    for k in range(net.K):
                        records.append(
                            ResultRecord(s, k, c, "full", float(se[k]), float(g_full[k]), 1.0)
                        )
                if do_maxmin:
                    lin_d = distributed_linearization(
                        mom, net.p_u, scn.sigma_z2, cfg.distributed_sinr_form
                    )
                    eta_star, _ = maxmin_bisection(lin_d, cfg.epsilon)
                    g_mm = distributed_sinr(
                        mom, eta_star, net.p_u, scn.sigma_z2, cfg.distributed_sinr_form
                    )
                    se = prelog * np.log2(1.0 + g_mm)
                    for k in range(net.K):
                        records.append(
                            ResultRecord(
                                s, k, c, "maxmin", float(se[k]), float(g_mm[k]), float(eta_star[k])
                            )
                        )
            except MomentInconsistencyError as err:
                dead[c] = f"skipped: moment-inconsistent ({err})"

        for c, reason in sorted(dead.items()):
            skips.append({"setup": s, "combiner": c, "reason": reason})
        log.info("setup %d/%d done (%d skips)", s + 1, cfg.n_setups, len(dead))

    capacity_rows = sum_capacity(records, net.bandwidth_hz)
    cost_rows = costmodel.table_rows(
        net.M, net.K, net.L, net.N_a, net.tau_p, net.tau_u, methods=cfg.combiners
    )
    return ExperimentResult(
        config=cfg,
        records=records,
        capacity_rows=capacity_rows,
        cost_rows=cost_rows,
        skips=skips,
    )


def compute_cdf(values):
    """Empirical CDF: sorted values paired with cumulative probability i/n."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot compute the CDF of an empty list")
    v = np.sort(values)
    p = np.arange(1, v.size + 1) / v.size
    return list(zip(v.tolist(), p.tolist()))


def percentile(values, q):
    """q-th percentile with linear interpolation between order statistics.

    Convention: index (n-1)*q/100 into the sorted sample, interpolated, so the
    5th percentile of 1..100 is 5.95.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot take a percentile of an empty list")
    return float(np.percentile(values, q))


def sum_capacity(records, bandwidth_hz):
    """Per-(setup, combiner, policy) sum throughput in Mbit/s.

    Requires every present (combiner, policy) group to cover the same user
    set within its setup.
    """
    by_setup_users = {}
    groups = {}
    for r in records:
        by_setup_users.setdefault(r.setup, set()).add(r.user)
        groups.setdefault((r.setup, r.combiner, r.policy), {})[r.user] = r.se
    rows = []
    for (s, c, p), users in sorted(groups.items()):
        expected = by_setup_users[s]
        if set(users) != expected:
            missing = sorted(expected - set(users))
            raise ValueError(
                f"records for setup {s}, combiner {c!r}, policy {p!r} miss users {missing}"
            )
        total = sum(users.values())
        rows.append(
            {
                "setup": s,
                "combiner": c,
                "policy": p,
                "capacity_mbps": bandwidth_hz * total / 1e6,
            }
        )
    return rows


def se_values(records, combiner, policy):
    """All per-(setup, user) SE samples of one (combiner, policy) series."""
    return np.array([r.se for r in records if r.combiner == combiner and r.policy == policy])


def capacity_values(capacity_rows, combiner, policy):
    return np.array(
        [
            r["capacity_mbps"]
            for r in capacity_rows
            if r["combiner"] == combiner and r["policy"] == policy
        ]
    )


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def _fmt(x):
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
    except OSError as err:
        raise OSError(f"failed to write {path}: {err}") from err


def write_outputs(result, out_dir):
    """Persist results.csv, capacity.csv, costs.csv and manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "results.csv",
        ["setup", "user", "combiner", "policy", "se", "sinr"],
        [[r.setup, r.user, r.combiner, r.policy, r.se, r.sinr] for r in result.records],
    )
    _write_csv(
        out / "capacity.csv",
        ["setup", "combiner", "policy", "capacity_mbps"],
        [[r["setup"], r["combiner"], r["policy"], r["capacity_mbps"]] for r in result.capacity_rows],
    )
    write_costs_csv(result.cost_rows, out / "costs.csv")
    manifest = {
        "config": dataclasses.asdict(result.config),
        "master_seed": result.config.master_seed,
        "skipped": result.skips,
        "records": len(result.records),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def write_costs_csv(cost_rows, path):
    _write_csv(
        path,
        ["combiner", "processing", "complexity", "complexity_exact", "fronthaul"],
        [
            [r["combiner"], r["processing"], r["complexity"], r["complexity_exact"], r["fronthaul"]]
            for r in cost_rows
        ],
    )


def write_cdf_outputs(out_dir):
    """Post-process results.csv and capacity.csv into per-series CDF files."""
    out = Path(out_dir)
    produced = []
    specs = [
        ("results.csv", "se", "cdf_se.csv"),
        ("capacity.csv", "capacity_mbps", "cdf_capacity.csv"),
    ]
    for src, column, dst in specs:
        path = out / src
        if not path.exists():
            raise OSError(f"missing input file {path}")
        series = {}
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if column not in (reader.fieldnames or []):
                raise ValueError(f"{path} has no column {column!r}")
            for row in reader:
                series.setdefault((row["combiner"], row["policy"]), []).append(float(row[column]))
        rows = []
        for (comb, policy), values in sorted(series.items()):
            for value, prob in compute_cdf(values):
                rows.append([comb, policy, value, prob])
        _write_csv(out / dst, ["combiner", "policy", "value", "prob"], rows)
        produced.append(out / dst)
    return produced


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

_SECTION_TYPES = {
    "network": NetworkConfig,
    "pathloss": PathlossParams,
    "experiment": ExperimentConfig,
}
_TUPLE_KEYS = ("combiners", "power_policies")


def _coerce(value, target_type, key):
    try:
        if target_type is int:
            return int(value)
        if target_type is float:
            return float(value)
        return value
    except ValueError as err:
        raise ConfigurationError(key, f"cannot parse {value!r}: {err}") from err


def load_config(path):
    """Parse a config file into an ExperimentConfig; unknown keys are errors."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str          # keys are case-sensitive (L vs l, N_a)
    read = cp.read(path)
    if not read:
        raise OSError(f"cannot read config file {path}")
    for section in cp.sections():
        if section not in _SECTION_TYPES:
            raise ConfigurationError(section, "unknown config section")

    parsed = {}
    for section, cls in _SECTION_TYPES.items():
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        if cp.has_section(section):
            for key, raw in cp.items(section):
                if key not in fields or key in ("network", "pathloss"):
                    raise ConfigurationError(f"{section}.{key}", "unknown config key")
                if key in _TUPLE_KEYS:
                    kwargs[key] = tuple(tok.strip() for tok in raw.split(",") if tok.strip())
                elif key == "rzf_alpha":
                    kwargs[key] = None if raw.strip().lower() == "none" else float(raw)
                else:
                    kwargs[key] = _coerce(raw, _field_type(cls, key), f"{section}.{key}")
        parsed[section] = kwargs

    pathloss = PathlossParams(**parsed["pathloss"])
    network = NetworkConfig(pathloss=pathloss, **parsed["network"])
    cfg = ExperimentConfig(network=network, **parsed["experiment"])
    cfg.validate()
    return cfg


def _field_type(cls, key):
    defaults = cls()
    current = getattr(defaults, key)
    if isinstance(current, bool):
        return str
    if isinstance(current, int):
        return int
    if isinstance(current, float):
        return float
    return str


def load_profile(name):
    """Load one of the shipped profiles ("paper" or "desk")."""
    if name not in ("paper", "desk"):
        raise ConfigurationError("profile", f"must be 'paper' or 'desk', got {name!r}")
    ref = resources.files("cfmimo") / "profiles" / f"{name}.cfg"
    with resources.as_file(ref) as path:
        return load_config(path)
