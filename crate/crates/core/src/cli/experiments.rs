//! The six batch experiments. Each returns raw tables sorted by replica,
//! the acceptance checks and a JSON block of supporting estimates.
//!
//! Replicas run on the current rayon pool; results are collected in replica
//! order so every table is independent of the worker count.

use rayon::prelude::*;
use serde_json::json;

use super::config::{Command, ExperimentConfig};
use super::output::{fmt_f64, Check, ExperimentOutput, Table};
use super::plot::{Chart, Series};
use crate::limit::{holder_epsilon, holder_modulus, sup_tail_check, GammaPath, LimitConfig};
use crate::rng::{child_seed, open_unit, stream_rng, Stream};
use crate::schema::{feasible_pair, FeasibleBranch, SchemaSampler};
use crate::stable::WalkIncrementLaw;
use crate::stats::{
    hill_default_k, hill_estimator, ks_two_sample, loglog_slope, median, quantile_sorted, empirical_cf,
    NeumaierSum,
};
use crate::walk::{generate_walk, OccupationStats};
use crate::{Error, Result};

/// Half-width of the band around each scaling exponent.
pub const SLOPE_TOLERANCE: f64 = 0.05;
/// Allowed distance between empirical and oracle CFs, in combined standard errors.
pub const CF_Z_MAX: f64 = 3.0;
pub const KS_LEVEL: f64 = 0.01;
/// Multiplier on the KS critical value absorbing the finite-`m` bias of the limit process.
pub const KS_SLACK: f64 = 2.0;
pub const HILL_TOLERANCE: f64 = 0.15;
pub const RATIO_TOLERANCE: f64 = 0.1;
pub const PLATEAU_BAND: (f64, f64) = (0.5, 2.0);
pub const HOLDER_MAX_CHANGE: f64 = 0.25;
/// Time step used by limit-selfsim and holder-check when `h_t` is `auto`.
pub const FINE_STEP: f64 = 1.0 / 16384.0;
/// Horizon of the Hölder statistic.
pub const HOLDER_HORIZON: f64 = 0.5;

pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match command {
        Command::WalkScaling => walk_scaling(cfg),
        Command::SchemaCf => schema_cf(cfg),
        Command::LimitSelfsim => limit_selfsim(cfg),
        Command::TailCheck => tail_check(cfg),
        Command::HolderCheck => holder_check(cfg),
        Command::FeasibleSweep => feasible_sweep(cfg),
    }
}

fn mean_of(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = NeumaierSum::new();
    let mut n = 0usize;
    for v in values {
        acc.add(v);
        n += 1;
    }
    acc.value() / n as f64
}

fn walk_scaling(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let law = WalkIncrementLaw::for_index(cfg.alpha)?;
    let ns = &cfg.ns;
    let n_max = *ns.last().expect("validated");
    let stats: Vec<Vec<OccupationStats>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(cfg.seed, Stream::Walk, r, 0);
            generate_walk(n_max, &law, &mut rng)?.occupation_stats(ns)
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(
        "walk-scaling",
        vec!["replica", "n", "V", "R", "max_abs", "max_local_time"],
    );
    for (r, row) in stats.iter().enumerate() {
        for s in row {
            table.push(vec![
                r.to_string(),
                s.step.to_string(),
                s.self_intersections.to_string(),
                s.range.to_string(),
                s.max_abs.to_string(),
                s.max_local_time.to_string(),
            ]);
        }
    }

    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let means = |f: fn(&OccupationStats) -> u64| -> Vec<f64> {
        (0..ns.len())
            .map(|j| mean_of(stats.iter().map(|row| f(&row[j]) as f64)))
            .collect()
    };
    let v = means(|s| s.self_intersections);
    let r = means(|s| s.range);
    let m = means(|s| s.max_abs);
    let l = means(|s| s.max_local_time);
    let a = cfg.alpha;
    let (sv, sr, sm, sl) = (
        loglog_slope(&xs, &v)?,
        loglog_slope(&xs, &r)?,
        loglog_slope(&xs, &m)?,
        loglog_slope(&xs, &l)?,
    );
    let target_v = 2.0 - 1.0 / a;
    let target_r = 1.0 / a;
    let checks = vec![
        Check::within("slope_V", sv.slope, target_v - SLOPE_TOLERANCE, target_v + SLOPE_TOLERANCE),
        Check::within("slope_R", sr.slope, target_r - SLOPE_TOLERANCE, target_r + SLOPE_TOLERANCE),
    ];
    let details = json!({
        "walk_law": law.name(),
        "alpha": a,
        "ns": ns,
        "mean_V": v,
        "mean_R": r,
        "mean_max_abs": m,
        "mean_max_local_time": l,
        "slope_V": sv,
        "slope_R": sr,
        "slope_max_abs": { "estimate": sm, "target": 1.0 / a },
        "slope_max_local_time": { "estimate": sl, "target": 1.0 - 1.0 / a },
    });
    let chart = Chart {
        title: format!("Occupation scaling, alpha = {a}"),
        x_label: "n".into(),
        y_label: "mean".into(),
        log_x: true,
        log_y: true,
        series: vec![
            Series::line("E[V_n]", xs.iter().copied().zip(v.iter().copied()).collect()),
            Series::line("E[R_n]", xs.iter().copied().zip(r.iter().copied()).collect()),
            Series::line("E[max N_n]", xs.iter().copied().zip(l.iter().copied()).collect()),
        ],
    };
    Ok(ExperimentOutput {
        command: Command::WalkScaling,
        tables: vec![table],
        checks,
        details,
        plots: vec![("walk-scaling".into(), chart.to_svg())],
    })
}

/// Directions `theta` at which the CFs are compared: `th e_j` for every time,
/// plus `th (1, ..., 1)` when several times are configured.
fn cf_directions(thetas: &[f64], k: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for j in 0..k {
        for &th in thetas {
            let mut d = vec![0.0; k];
            d[j] = th;
            dirs.push(d);
        }
    }
    if k > 1 {
        dirs.extend(thetas.iter().map(|&th| vec![th; k]));
    }
    dirs
}

fn schema_cf(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let sc = cfg.schema();
    let sampler = SchemaSampler::new(&sc)?;
    let mut oracle = LimitConfig::from_schema(&sc)?;
    oracle.step = cfg.h_t;
    oracle.bin_width = cfg.h_x;
    let horizon = sc.times.iter().copied().fold(0.0, f64::max);
    let grid = oracle.grid(horizon)?;

    let samples: Vec<Vec<f64>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| sampler.sample(r))
        .collect::<Result<_>>()?;
    let mut table = Table::new("schema-cf", vec!["replica", "t", "value"]);
    for (r, row) in samples.iter().enumerate() {
        for (t, g) in sc.times.iter().zip(row) {
            table.push(vec![r.to_string(), fmt_f64(*t), fmt_f64(*g)]);
        }
    }

    let dirs = cf_directions(&cfg.thetas, sc.times.len());
    let predicted = oracle.gamma_cf_batch(&dirs, &sc.times, cfg.mc_reps)?;
    let mut compare = Table::new(
        "schema-cf-directions",
        vec![
            "direction", "theta", "emp_re", "emp_im", "emp_se", "oracle_re", "oracle_im", "oracle_se", "z",
        ],
    );
    let mut checks = Vec::new();
    let mut records = Vec::new();
    let mut emp_points = Vec::new();
    let mut oracle_points = Vec::new();
    for (i, (d, o)) in dirs.iter().zip(&predicted).enumerate() {
        let proj: Vec<f64> = samples
            .iter()
            .map(|row| row.iter().zip(d).map(|(g, th)| g * th).sum())
            .collect();
        let e = empirical_cf(&proj, 1.0)?;
        let se = e.std_error().hypot(o.std_error());
        let z = (e.value() - o.value()).norm() / se;
        let label: Vec<String> = d.iter().map(|x| x.to_string()).collect();
        let label = label.join(" ");
        compare.push(vec![
            i.to_string(),
            label.clone(),
            fmt_f64(e.re),
            fmt_f64(e.im),
            fmt_f64(e.std_error()),
            fmt_f64(o.re),
            fmt_f64(o.im),
            fmt_f64(o.std_error()),
            fmt_f64(z),
        ]);
        checks.push(Check::at_most(format!("cf_z[{label}]"), z, CF_Z_MAX));
        records.push(json!({ "theta": d, "empirical": e, "oracle": o, "z": z }));
        emp_points.push((i as f64, e.re));
        oracle_points.push((i as f64, o.re));
    }
    let details = json!({
        "delta": sampler.delta(),
        "copies": sc.copies,
        "n": sc.n,
        "times": sc.times,
        "oracle_grid": grid,
        "mc_reps": cfg.mc_reps,
        "directions": records,
    });
    let chart = Chart {
        title: format!("CF of G_n vs limit, alpha = {}, beta = {}", cfg.alpha, cfg.beta),
        x_label: "direction".into(),
        y_label: "Re CF".into(),
        series: vec![
            Series::line("limit (Monte Carlo)", oracle_points),
            Series::points("schema", emp_points),
        ],
        ..Chart::default()
    };
    Ok(ExperimentOutput {
        command: Command::SchemaCf,
        tables: vec![table, compare],
        checks,
        details,
        plots: vec![("schema-cf".into(), chart.to_svg())],
    })
}

fn limit_config(cfg: &ExperimentConfig, step: Option<f64>) -> Result<LimitConfig> {
    let (walk, scenery) = cfg.limit_laws()?;
    let mut c = LimitConfig::new(walk, scenery);
    c.step = step;
    c.bin_width = cfg.h_x;
    c.copies = cfg.m;
    c.master_seed = cfg.seed;
    Ok(c)
}

/// Fails early if any of `times` is off the grid of `step` on `[0, horizon]`.
fn check_times(config: &LimitConfig, horizon: f64, times: &[f64]) -> Result<()> {
    let grid = config.grid(horizon)?;
    let probe = GammaPath::new(grid.step, vec![0.0; grid.steps + 1])?;
    for &t in times {
        probe.at(t)?;
    }
    Ok(())
}

fn qq_points(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    (1..100)
        .map(|i| {
            let p = i as f64 / 100.0;
            (quantile_sorted(&a, p), quantile_sorted(&b, p))
        })
        .collect()
}

fn limit_selfsim(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let base = limit_config(cfg, Some(cfg.h_t.unwrap_or(FINE_STEP)))?;
    let delta = base.delta()?;
    let (s, t) = (cfg.s, cfg.t);
    let mut set_a = base.clone();
    set_a.master_seed = child_seed(cfg.seed, 1);
    let mut set_b = base;
    set_b.master_seed = child_seed(cfg.seed, 2);
    check_times(&set_a, s + t, &[s, t, s + t])?;
    check_times(&set_b, 2.0 * t, &[t, 2.0 * t])?;

    let a: Vec<[f64; 3]> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let p = set_a.sample_gamma(s + t, r)?;
            Ok([p.at(s)?, p.at(t)?, p.at(s + t)?])
        })
        .collect::<Result<_>>()?;
    let b: Vec<[f64; 2]> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let p = set_b.sample_gamma(2.0 * t, r)?;
            Ok([p.at(t)?, p.at(2.0 * t)?])
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new("limit-selfsim", vec!["set", "replica", "t", "gamma"]);
    let mut rows_a: Vec<(f64, usize)> = vec![(s, 0), (t, 1), (s + t, 2)];
    rows_a.sort_by(|x, y| x.0.total_cmp(&y.0));
    rows_a.dedup_by(|x, y| x.0 == y.0);
    for (r, v) in a.iter().enumerate() {
        for &(time, j) in &rows_a {
            table.push(vec!["A".into(), r.to_string(), fmt_f64(time), fmt_f64(v[j])]);
        }
    }
    for (r, v) in b.iter().enumerate() {
        table.push(vec!["B".into(), r.to_string(), fmt_f64(t), fmt_f64(v[0])]);
        table.push(vec!["B".into(), r.to_string(), fmt_f64(2.0 * t), fmt_f64(v[1])]);
    }

    let g_t: Vec<f64> = a.iter().map(|v| v[1]).collect();
    let scaled: Vec<f64> = b.iter().map(|v| 2f64.powf(-delta) * v[1]).collect();
    let increments: Vec<f64> = a.iter().map(|v| v[2] - v[0]).collect();
    let g_t_b: Vec<f64> = b.iter().map(|v| v[0]).collect();
    let selfsim = ks_two_sample(&g_t, &scaled)?;
    let stationary = ks_two_sample(&increments, &g_t_b)?;
    let checks = vec![
        Check::at_most(
            "ks_self_similarity",
            selfsim.statistic,
            KS_SLACK * ks_critical(&selfsim),
        ),
        Check::at_most(
            "ks_stationary_increments",
            stationary.statistic,
            KS_SLACK * ks_critical(&stationary),
        ),
    ];
    let details = json!({
        "delta": delta,
        "s": s,
        "t": t,
        "copies": cfg.m,
        "grid_a": set_a.grid(s + t)?,
        "grid_b": set_b.grid(2.0 * t)?,
        "ks_self_similarity": selfsim,
        "ks_stationary_increments": stationary,
        "ks_level": KS_LEVEL,
        "ks_slack": KS_SLACK,
    });
    let qq1 = qq_points(&g_t, &scaled);
    let qq2 = qq_points(&increments, &g_t_b);
    let lo = qq1.iter().chain(&qq2).map(|p| p.0.min(p.1)).fold(f64::INFINITY, f64::min);
    let hi = qq1.iter().chain(&qq2).map(|p| p.0.max(p.1)).fold(f64::NEG_INFINITY, f64::max);
    let chart = Chart {
        title: "Quantile-quantile checks of the limit process".into(),
        x_label: "quantile, set A".into(),
        y_label: "quantile, set B".into(),
        series: vec![
            Series::line("identity", vec![(lo, lo), (hi, hi)]),
            Series::points("G(t) vs 2^-H G(2t)", qq1),
            Series::points("G(s+t)-G(s) vs G(t)", qq2),
        ],
        ..Chart::default()
    };
    Ok(ExperimentOutput {
        command: Command::LimitSelfsim,
        tables: vec![table],
        checks,
        details,
        plots: vec![("limit-selfsim".into(), chart.to_svg())],
    })
}

fn ks_critical(r: &crate::stats::KsResult) -> f64 {
    crate::stats::ks_critical_value(r.n, r.m, KS_LEVEL)
}

/// Log-spaced levels from the 0.9 quantile of `sup_abs` up to the level
/// exceeded by `min_count` samples.
fn tail_levels(sup_abs: &[f64], points: usize, min_count: usize) -> Vec<f64> {
    let mut sorted = sup_abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let p_hi = (1.0 - min_count as f64 / n).clamp(0.0, 1.0);
    let p_lo = p_hi.min(0.9);
    let (lo, hi) = (quantile_sorted(&sorted, p_lo), quantile_sorted(&sorted, p_hi));
    if points == 1 || !(lo > 0.0) || hi <= lo {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .map(|u| u.min(hi))
        .collect()
}

fn tail_check(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let config = limit_config(cfg, cfg.h_t)?;
    let report = sup_tail_check(&config, cfg.horizon, &[], cfg.replicas, cfg.moment_reps)?;
    let levels = tail_levels(&report.sup_abs, cfg.u_points, cfg.min_exceedances);
    let report = report.with_rows(&levels);
    let n = cfg.replicas;
    let k = cfg.hill_k.unwrap_or_else(|| hill_default_k(n));
    let hill = hill_estimator(&report.sup_abs, k)?;
    let sweep: Vec<serde_json::Value> = [0.4, 0.5, 0.6, 0.7]
        .iter()
        .map(|&p| ((n as f64).powf(p).ceil() as usize).clamp(2, n - 1))
        .map(|k| json!({ "k": k, "estimate": hill_estimator(&report.sup_abs, k).ok() }))
        .collect();

    let nu = report.nu;
    let target_ratio = (1.0 + nu) / 2.0;
    let top = report.largest_resolvable(cfg.min_exceedances);
    let (ratio, plateau) = match top {
        Some(row) => (
            row.exceed_one_sided as f64 / row.exceed_two_sided as f64,
            row.scaled_two_sided / report.constant_two_sided,
        ),
        None => (f64::NAN, f64::NAN),
    };
    let checks = vec![
        Check::within("hill_sup_abs", hill, cfg.beta - HILL_TOLERANCE, cfg.beta + HILL_TOLERANCE),
        Check::within(
            "one_to_two_sided_ratio",
            ratio,
            target_ratio - RATIO_TOLERANCE,
            target_ratio + RATIO_TOLERANCE,
        ),
        Check::within("plateau_to_constant", plateau, PLATEAU_BAND.0, PLATEAU_BAND.1),
    ];

    let mut raw = Table::new("tail-check", vec!["replica", "sup", "sup_abs"]);
    for (r, (s, a)) in report.sup.iter().zip(&report.sup_abs).enumerate() {
        raw.push(vec![r.to_string(), fmt_f64(*s), fmt_f64(*a)]);
    }
    let mut rows = Table::new(
        "tail-check-levels",
        vec![
            "u",
            "exceed_one_sided",
            "exceed_two_sided",
            "scaled_one_sided",
            "scaled_one_sided_se",
            "scaled_two_sided",
            "scaled_two_sided_se",
        ],
    );
    for row in &report.rows {
        rows.push(vec![
            fmt_f64(row.u),
            row.exceed_one_sided.to_string(),
            row.exceed_two_sided.to_string(),
            fmt_f64(row.scaled_one_sided),
            fmt_f64(row.scaled_one_sided_se),
            fmt_f64(row.scaled_two_sided),
            fmt_f64(row.scaled_two_sided_se),
        ]);
    }
    let details = json!({
        "hill_k": k,
        "hill_estimate": hill,
        "hill_sweep": sweep,
        "largest_resolvable": top,
        "report": report,
    });
    let us: Vec<f64> = report.rows.iter().map(|r| r.u).collect();
    let chart = Chart {
        title: format!("Supremum tails, beta = {}", cfg.beta),
        x_label: "u".into(),
        y_label: "u^beta P(sup >= u)".into(),
        log_x: true,
        series: vec![
            Series::points(
                "two-sided",
                report.rows.iter().map(|r| (r.u, r.scaled_two_sided)).collect(),
            ),
            Series::points(
                "one-sided",
                report.rows.iter().map(|r| (r.u, r.scaled_one_sided)).collect(),
            ),
            Series::line(
                "constant",
                us.iter().map(|&u| (u, report.constant_two_sided)).collect(),
            ),
        ],
        ..Chart::default()
    };
    Ok(ExperimentOutput {
        command: Command::TailCheck,
        tables: vec![raw, rows],
        checks,
        details,
        plots: vec![("tail-check".into(), chart.to_svg())],
    })
}

/// Strides of the fine grid that land on `2^-level`.
fn holder_strides(step: f64, levels: &[u32]) -> Result<Vec<usize>> {
    levels
        .iter()
        .map(|&l| {
            let h = 2f64.powi(-(l as i32));
            let stride = (h / step).round();
            if stride < 1.0 || (stride * step - h).abs() > 1e-9 * h {
                Err(Error::Grid(format!("grid 2^-{l} is not a multiple of h_t = {step}")))
            } else {
                Ok(stride as usize)
            }
        })
        .collect()
}

fn holder_check(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let config = limit_config(cfg, Some(cfg.h_t.unwrap_or(FINE_STEP)))?;
    let eps = holder_epsilon(cfg.beta)?;
    let grid = config.grid(HOLDER_HORIZON)?;
    let strides = holder_strides(grid.step, &cfg.levels)?;
    let moduli: Vec<Vec<f64>> = (0..cfg.replicas as u64)
        .into_par_iter()
        .map(|r| {
            let path = config.sample_gamma(HOLDER_HORIZON, r)?;
            strides
                .iter()
                .map(|&s| holder_modulus(&path.coarsen(s, HOLDER_HORIZON)?, cfg.alpha, eps))
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new("holder-check", vec!["replica", "level", "modulus"]);
    for (r, row) in moduli.iter().enumerate() {
        for (l, v) in cfg.levels.iter().zip(row) {
            table.push(vec![r.to_string(), l.to_string(), fmt_f64(*v)]);
        }
    }
    let medians: Vec<f64> = (0..cfg.levels.len())
        .map(|j| median(&moduli.iter().map(|row| row[j]).collect::<Vec<_>>()))
        .collect();
    let checks = cfg
        .levels
        .windows(2)
        .zip(medians.windows(2))
        .map(|(l, m)| {
            Check::at_most(
                format!("median_change_2^-{}_to_2^-{}", l[0], l[1]),
                (m[1] - m[0]).abs() / m[0],
                HOLDER_MAX_CHANGE,
            )
        })
        .collect();
    let details = json!({
        "epsilon": eps,
        "horizon": HOLDER_HORIZON,
        "grid": grid,
        "copies": cfg.m,
        "levels": cfg.levels,
        "medians": medians,
    });
    let chart = Chart {
        title: format!("Hölder statistic, alpha = {}, beta = {}", cfg.alpha, cfg.beta),
        x_label: "grid size".into(),
        y_label: "median modulus".into(),
        log_x: true,
        series: vec![Series::line(
            "median",
            cfg.levels
                .iter()
                .zip(&medians)
                .map(|(&l, &m)| (2f64.powi(-(l as i32)), m))
                .collect(),
        )],
        ..Chart::default()
    };
    Ok(ExperimentOutput {
        command: Command::HolderCheck,
        tables: vec![table],
        checks,
        details,
        plots: vec![("holder-check".into(), chart.to_svg())],
    })
}

/// Boundary pairs checked in addition to the random ones.
pub const EDGE_PAIRS: [(f64, f64); 8] = [
    (2.0, 2.0),
    (2.0, 1.0),
    (1.5, 1.0),
    (2.0, 0.5),
    (1.5, 2.0),
    (1.000001, 1e-6),
    (1.000001, 2.0),
    (2.0, 1e-6),
];

/// Whether `h` lies in the self-similarity range for `beta`. Closed
/// endpoints get a relative slack of `1e-12`; open ones are strict.
fn in_range(beta: f64, h: f64) -> bool {
    let slack = 1e-12 * h.abs().max(1.0);
    let (mid, rec) = ((beta + 1.0) / (2.0 * beta), 1.0 / beta);
    if beta < 1.0 {
        h >= mid - slack && h < rec
    } else if beta == 1.0 {
        (h - 1.0).abs() <= slack
    } else {
        h > rec && h <= mid + slack
    }
}

fn feasible_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut rng = stream_rng(cfg.seed, Stream::Sweep, 0, 0);
    let mut pairs: Vec<(f64, f64)> = EDGE_PAIRS.to_vec();
    for _ in 0..cfg.sweep {
        let alpha = 2.0 - open_unit(&mut rng);
        let beta = 2.0 * open_unit(&mut rng);
        pairs.push((alpha, beta));
    }
    let mut table = Table::new("feasible-sweep", vec!["index", "alpha", "beta", "delta", "branch", "ok"]);
    let mut violations = 0usize;
    let mut counts = [0usize; 3];
    let mut series: [Vec<(f64, f64)>; 3] = Default::default();
    for (i, &(a, b)) in pairs.iter().enumerate() {
        let (h, branch, ok) = match feasible_pair(a, b) {
            Ok(f) => (f.h, f.branch.label(), in_range(b, f.h)),
            Err(_) => (crate::schema::delta_exponent(a, b).unwrap_or(f64::NAN), "none", false),
        };
        if !ok {
            violations += 1;
        }
        let slot = match branch {
            l if l == FeasibleBranch::BelowOne.label() => 0,
            l if l == FeasibleBranch::One.label() => 1,
            _ => 2,
        };
        counts[slot] += 1;
        series[slot].push((b, h));
        table.push(vec![
            i.to_string(),
            fmt_f64(a),
            fmt_f64(b),
            fmt_f64(h),
            branch.to_string(),
            ok.to_string(),
        ]);
    }
    let checks = vec![Check::at_most("violations", violations as f64, 0.0)];
    let details = json!({
        "pairs": pairs.len(),
        "edge_pairs": EDGE_PAIRS.len(),
        "violations": violations,
        "branch_counts": {
            FeasibleBranch::BelowOne.label(): counts[0],
            FeasibleBranch::One.label(): counts[1],
            FeasibleBranch::AboveOne.label(): counts[2],
        },
    });
    let [below, one, above] = series;
    let chart = Chart {
        title: "Self-similarity index over random pairs".into(),
        x_label: "beta".into(),
        y_label: "H".into(),
        series: vec![
            Series::points("beta < 1", below),
            Series::points("beta = 1", one),
            Series::points("beta > 1", above),
            Series::line("1/beta", (1..=40).map(|i| i as f64 / 20.0).map(|b| (b, 1.0 / b)).collect()),
        ],
        ..Chart::default()
    };
    Ok(ExperimentOutput {
        command: Command::FeasibleSweep,
        tables: vec![table],
        checks,
        details,
        plots: vec![("feasible-sweep".into(), chart.to_svg())],
    })
}
