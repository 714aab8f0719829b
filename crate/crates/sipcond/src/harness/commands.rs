//! The subcommands behind the command-line tool. Each takes an
//! [`ExperimentConfig`] and returns a [`ResultTable`]; the body depends only
//! on the configuration, so equal configs give byte-identical bodies.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use crate::difference_chain::{
    scaled_column, simulate_path, transition_prob, DiffChainParams, ScaledDiffParams, TruncationWindow,
};
use crate::dirichlet_forms::{default_window, dual_form_rw, dual_limit_of_derivative, mosco2_sequence, phi_n, psi_n};
use crate::error::{Error, Result};
use crate::fluctuation_field::{
    field_mc, finite_variance, limit_variance_alt_with, limit_variance_with, FieldMc, SigmaMode, VarianceInputs,
};
use crate::harness::acceptance::{self, Fixture};
use crate::harness::config::ExperimentConfig;
use crate::harness::table::{Cell, ResultTable};
use crate::rng::{par_replicas, rng};
use crate::sip_lattice::{
    duality_check, sample_poisson_product, sample_stationary_product, simulate_in_place, Configuration,
    DualConfiguration, SipParams,
};
use crate::stats::MeanVar;
use crate::sticky_bm::{time_change_path_theta, Convention, StickyKernel};
use crate::test_function::TestFunction;

/// Names of all subcommands.
pub const SUBCOMMANDS: [&str; 10] = [
    "kernel-info",
    "simulate-sip",
    "diff-prob",
    "diff-sim",
    "sticky-kernel",
    "sticky-path",
    "variance",
    "mosco",
    "duality-check",
    "acceptance",
];

const PHI_KEYS: [&str; 3] = ["phi", "phi_center", "phi_halfwidth"];

/// Keys accepted by each subcommand besides seed, out, threads, tolerance.
pub fn allowed_keys(subcommand: &str) -> Option<Vec<&'static str>> {
    let keys: Vec<&'static str> = match subcommand {
        "kernel-info" => vec!["kernel", "weights", "range", "n"],
        "simulate-sip" => vec!["kernel", "weights", "range", "k", "l", "rho", "init", "times", "replicas", "output"],
        "diff-prob" => vec!["kernel", "weights", "range", "k", "t", "w0", "targets", "window", "n", "gamma", "vs", "convention"],
        "diff-sim" => vec!["kernel", "weights", "range", "k", "t", "w0", "targets", "replicas"],
        "sticky-kernel" => vec!["gamma", "convention", "times", "vs"],
        "sticky-path" => vec!["gamma", "convention", "t_end", "dt"],
        "variance" => {
            let mut v = vec![
                "kernel", "weights", "range", "gamma", "rho", "sigma_mode", "ns", "times", "convention", "mc_replicas", "length_factor",
            ];
            v.extend(PHI_KEYS);
            v
        }
        "mosco" => {
            let mut v = vec!["kernel", "weights", "range", "gamma", "ns"];
            v.extend(PHI_KEYS);
            v
        }
        "duality-check" => vec!["kernel", "weights", "range", "k", "l", "t", "eta", "xi", "replicas"],
        "acceptance" => vec!["criteria", "gamma", "reference_gamma"],
        _ => return None,
    };
    Some(keys)
}

/// Runs the configured subcommand and stamps the metadata header.
pub fn run(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let keys = allowed_keys(&cfg.subcommand)
        .ok_or_else(|| Error::Config(format!("unknown subcommand `{}`", cfg.subcommand)))?;
    cfg.check_keys(&keys)?;
    let start = Instant::now();
    let mut table = match cfg.subcommand.as_str() {
        "kernel-info" => kernel_info(cfg),
        "simulate-sip" => simulate_sip(cfg),
        "diff-prob" => diff_prob(cfg),
        "diff-sim" => diff_sim(cfg),
        "sticky-kernel" => sticky_kernel(cfg),
        "sticky-path" => sticky_path(cfg),
        "variance" => variance(cfg),
        "mosco" => mosco(cfg),
        "duality-check" => duality(cfg),
        "acceptance" => acceptance_suite(cfg),
        _ => unreachable!("checked by allowed_keys"),
    }?;
    table.meta("subcommand", &cfg.subcommand);
    table.meta("config_hash", format!("{:016x}", cfg.hash()));
    table.meta("code_version", env!("CARGO_PKG_VERSION"));
    table.meta("seed", cfg.seed);
    table.meta("tolerance", format!("{:e}", cfg.tolerance));
    table.meta("wall_time_s", format!("{:.3}", start.elapsed().as_secs_f64()));
    Ok(table)
}

/// For `acceptance`, a [`Error::Tolerance`] naming the failed criteria;
/// `Ok` for every other table.
pub fn verdict(table: &ResultTable) -> Result<()> {
    if table.name != "acceptance" {
        return Ok(());
    }
    let (Some(id), Some(v)) = (table.column("criterion"), table.column("verdict")) else {
        return Ok(());
    };
    let failed: Vec<String> = table
        .rows
        .iter()
        .filter(|r| matches!(&r[v], Cell::Text(s) if s == "fail"))
        .map(|r| match &r[id] {
            Cell::Int(i) => i.to_string(),
            c => format!("{c:?}"),
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Tolerance(format!("acceptance criteria failed: {}", failed.join(", "))))
    }
}

fn convention(cfg: &ExperimentConfig) -> Result<Convention> {
    cfg.raw("convention").unwrap_or("printed").parse().map_err(|e: Error| Error::Config(e.to_string()))
}

fn kernel_info(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let kernel = cfg.kernel()?;
    let n: u32 = cfg.get("n", 10)?;
    let mut t = ResultTable::new("kernel-info", &["key", "value"]);
    t.push(vec!["range".into(), kernel.range().into()]);
    t.push(vec!["total_weight".into(), kernel.total_weight().into()]);
    t.push(vec!["chi".into(), kernel.chi().into()]);
    t.push(vec!["support_gcd".into(), kernel.support_gcd().into()]);
    for r in 1..=kernel.range() as i64 {
        t.push(vec![format!("p({r})").into(), kernel.p(r).into()]);
    }
    let sp = ScaledDiffParams::new(n, 1.0, kernel)?;
    t.push(vec![format!("k_N at N={n}, gamma=1").into(), sp.k_n().into()]);
    t.push(vec![format!("alpha(t=1) at N={n}, gamma=1").into(), sp.alpha(1.0).into()]);
    Ok(t)
}

fn simulate_sip(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let kernel = cfg.kernel()?;
    let k: f64 = cfg.get("k", 1.0)?;
    let l: usize = cfg.get("l", 64)?;
    let rho: f64 = cfg.get("rho", 1.0)?;
    let init = cfg.raw("init").unwrap_or("poisson").to_string();
    let mut times: Vec<f64> = cfg.list("times", &[0.0, 1.0, 10.0])?;
    let replicas: u64 = cfg.get("replicas", 100)?;
    if init != "poisson" && init != "stationary" {
        return Err(Error::Config(format!("init must be poisson or stationary, got `{init}`")));
    }
    let initial = |r: &mut crate::rng::Rng| {
        if init == "poisson" {
            sample_poisson_product(rho, l, r)
        } else {
            sample_stationary_product(rho, k, l, r)
        }
    };
    if times.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Config("times must be nonnegative".into()));
    }
    times.sort_by(f64::total_cmp);
    let output = cfg.raw("output").unwrap_or("summary");
    if output != "summary" && output != "occupancies" {
        return Err(Error::Config(format!("output must be summary or occupancies, got `{output}`")));
    }
    let params = SipParams::new(k, kernel, l)?;
    if output == "occupancies" {
        let snapshots = par_replicas(replicas, cfg.seed, |_, r| {
            let mut c = initial(r);
            let mut now = 0.0;
            times
                .iter()
                .map(|&t| {
                    simulate_in_place(&mut c, &params, t - now, r);
                    now = t;
                    c.occupancies().to_vec()
                })
                .collect::<Vec<_>>()
        });
        let mut t = ResultTable::new("simulate-sip-occupancies", &["replica", "t", "site", "occupancy"]);
        for (j, snaps) in snapshots.iter().enumerate() {
            for (&time, occ) in times.iter().zip(snaps) {
                for (x, &n) in occ.iter().enumerate() {
                    t.push(vec![j.into(), time.into(), x.into(), n.into()]);
                }
            }
        }
        return Ok(t);
    }
    // per replica and time: (density, site variance, max occupancy, jumps so far)
    let samples = par_replicas(replicas, cfg.seed, |_, r| {
        let mut c = initial(r);
        let (mut now, mut jumps) = (0.0, 0u64);
        times
            .iter()
            .map(|&t| {
                jumps += simulate_in_place(&mut c, &params, t - now, r);
                now = t;
                let occ = c.occupancies();
                let mean = c.total() as f64 / l as f64;
                let var = occ.iter().map(|&n| (n as f64 - mean).powi(2)).sum::<f64>() / l as f64;
                let max = occ.iter().copied().max().unwrap_or(0) as f64;
                [mean, var, max, jumps as f64]
            })
            .collect::<Vec<_>>()
    });
    let mut t = ResultTable::new(
        "simulate-sip",
        &["t", "density", "site_variance", "site_variance_se", "max_occupancy", "max_occupancy_se", "jumps"],
    );
    for (j, &time) in times.iter().enumerate() {
        let stat = |q: usize| samples.iter().map(|s| s[j][q]).collect::<MeanVar>();
        let (var, max) = (stat(1), stat(2));
        t.push(vec![
            time.into(),
            stat(0).mean().into(),
            var.mean().into(),
            var.se().into(),
            max.mean().into(),
            max.se().into(),
            stat(3).mean().into(),
        ]);
    }
    Ok(t)
}

fn diff_prob(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let kernel = cfg.kernel()?;
    let times: Vec<f64> = cfg.list("t", &[1.0])?;
    if cfg.raw("n").is_some() {
        // scaled chain: p_{α(N,t)}(⌊vN⌋, 0) against the sticky closed form
        let n: u32 = cfg.require("n")?;
        let gamma: f64 = cfg.get("gamma", 1.0)?;
        let vs: Vec<f64> = cfg.list("vs", &[0.0, 0.25, 0.5])?;
        let sk = StickyKernel::new(gamma, convention(cfg)?);
        let sp = ScaledDiffParams::new(n, gamma, kernel)?;
        let mut t = ResultTable::new("diff-prob-scaled", &["t", "v", "w", "p", "error_bound", "sticky_limit"]);
        for &time in &times {
            let col = scaled_column(time, &sp, cfg.tolerance)?;
            for &v in &vs {
                let w = (v * n as f64).floor() as i64;
                let limit = if w == 0 { sk.mass(time) } else { sk.hit_zero_prob(v, time) };
                t.push(vec![time.into(), v.into(), w.into(), col.get(w).into(), col.error_bound.into(), limit.into()]);
            }
        }
        return Ok(t);
    }
    let k: f64 = cfg.get("k", 1.0)?;
    let w0s: Vec<i64> = cfg.list("w0", &[0])?;
    let targets: Vec<i64> = cfg.list("targets", &[0])?;
    let params = DiffChainParams::new(k, kernel)?;
    let mut t = ResultTable::new("diff-prob", &["t", "w0", "target", "window", "p", "error_bound"]);
    for &time in &times {
        let mut window = TruncationWindow::auto(&params, time);
        if let Some(m) = cfg.raw("window") {
            window = TruncationWindow::new(m.parse().map_err(|_| Error::Config(format!("bad window `{m}`")))?);
        }
        let reach = w0s.iter().chain(&targets).map(|w| w.unsigned_abs() as usize).max().unwrap_or(0);
        if reach >= window.m {
            window = TruncationWindow::new(reach + 2 * params.kernel.range() + 1);
        }
        for &w0 in &w0s {
            for &target in &targets {
                let p = transition_prob(w0, target, &params, time, window, cfg.tolerance)?;
                t.push(vec![time.into(), w0.into(), target.into(), window.m.into(), p.p.into(), p.error_bound.into()]);
            }
        }
    }
    Ok(t)
}

fn diff_sim(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let kernel = cfg.kernel()?;
    let k: f64 = cfg.get("k", 1.0)?;
    let time: f64 = cfg.get("t", 1.0)?;
    let w0: i64 = cfg.get("w0", 0)?;
    let targets: Vec<i64> = cfg.list("targets", &[-1, 0, 1])?;
    let replicas: u64 = cfg.get("replicas", 10_000)?;
    let params = DiffChainParams::new(k, kernel)?;
    let ends = par_replicas(replicas, cfg.seed, |_, r| simulate_path(w0, &params, time, r));
    let mut window = TruncationWindow::auto(&params, time);
    let reach = targets.iter().map(|w| w.unsigned_abs() as usize).max().unwrap_or(0).max(w0.unsigned_abs() as usize);
    if reach >= window.m {
        window = TruncationWindow::new(reach + 2 * params.kernel.range() + 1);
    }
    let mut t = ResultTable::new("diff-sim", &["t", "w0", "target", "exact", "mc", "mc_se", "z"]);
    for &target in &targets {
        let exact = transition_prob(w0, target, &params, time, window, cfg.tolerance)?.p;
        let mv: MeanVar = ends.iter().map(|&w| if w == target { 1.0 } else { 0.0 }).collect();
        let z = if mv.se() > 0.0 { (mv.mean() - exact) / mv.se() } else { f64::NAN };
        t.push(vec![time.into(), w0.into(), target.into(), exact.into(), mv.mean().into(), mv.se().into(), z.into()]);
    }
    Ok(t)
}

fn sticky_kernel(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let gamma: f64 = cfg.get("gamma", 1.0)?;
    let sk = StickyKernel::new(gamma, convention(cfg)?);
    let times: Vec<f64> = cfg.list("times", &[0.1, 1.0, 10.0])?;
    let vs: Vec<f64> = cfg.list("vs", &[0.0, 0.25, 0.5, 1.0, 2.0])?;
    let mut t = ResultTable::new("sticky-kernel", &["t", "v", "density", "atom", "hit_zero_prob", "normalization_error"]);
    for &time in &times {
        let norm = sk.normalization_error(time)?;
        for &v in &vs {
            t.push(vec![
                time.into(),
                v.into(),
                sk.density(v, time).into(),
                sk.mass(time).into(),
                sk.hit_zero_prob(v, time).into(),
                norm.into(),
            ]);
        }
    }
    t.meta("theta", sk.theta());
    Ok(t)
}

fn sticky_path(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let gamma: f64 = cfg.get("gamma", 1.0)?;
    let theta = StickyKernel::new(gamma, convention(cfg)?).theta();
    let t_end: f64 = cfg.get("t_end", 1.0)?;
    let dt: f64 = cfg.get("dt", 1e-4)?;
    let path = time_change_path_theta(t_end, theta, dt, &mut rng(cfg.seed))?;
    let mut t = ResultTable::new("sticky-path", &["t", "x"]);
    for (s, x) in path.t.iter().zip(&path.x) {
        t.push(vec![(*s).into(), (*x).into()]);
    }
    t.meta("theta", theta);
    t.meta("band", path.band);
    Ok(t)
}

fn variance(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let kernel = cfg.kernel()?;
    let gamma: f64 = cfg.get("gamma", 1.0)?;
    let rho: f64 = cfg.get("rho", 1.0)?;
    let mode: SigmaMode =
        cfg.raw("sigma_mode").unwrap_or("poisson").parse().map_err(|e: Error| Error::Config(e.to_string()))?;
    let ns: Vec<u32> = cfg.list("ns", &[10, 20, 40])?;
    let times: Vec<f64> = cfg.list("times", &[0.1])?;
    let mc_replicas: u64 = cfg.get("mc_replicas", 0)?;
    let length_factor: usize = cfg.get("length_factor", 32)?;
    let phi = cfg.test_function()?;
    // with_chi is the identity for χ = 1/2
    let sk = StickyKernel::new(gamma, convention(cfg)?).with_chi(kernel.chi());
    let mut t = ResultTable::new("variance", &["n", "t", "method", "value", "error_estimate"]);
    for &time in &times {
        for &n in &ns {
            let sp = ScaledDiffParams::new(n, gamma, kernel.clone())?;
            let inputs = VarianceInputs::new(rho, mode.sigma(rho, sp.k_n()))?;
            let est = finite_variance(n, time, &phi, inputs, gamma, &kernel, cfg.tolerance)?;
            t.push(vec![n.into(), time.into(), "finite".into(), est.value.into(), est.error.into()]);
            if mc_replicas > 0 {
                let mc = field_mc(
                    &FieldMc {
                        n,
                        t: time,
                        rho,
                        gamma,
                        kernel: kernel.clone(),
                        sigma_mode: mode,
                        length_factor,
                        replicas: mc_replicas,
                        seed: cfg.seed ^ n as u64,
                    },
                    &phi,
                )?;
                t.push(vec![n.into(), time.into(), "monte-carlo".into(), mc.mean().into(), mc.se().into()]);
            }
        }
        let lim = limit_variance_with(time, &phi, rho, &sk)?;
        let alt = limit_variance_alt_with(time, &phi, rho, &sk)?;
        t.push(vec!["limit".into(), time.into(), "formula".into(), lim.value.into(), lim.error.into()]);
        t.push(vec!["limit".into(), time.into(), "alternate".into(), alt.value.into(), alt.error.into()]);
    }
    t.meta("sigma_mode", cfg.raw("sigma_mode").unwrap_or("poisson"));
    t.meta("theta", sk.theta());
    Ok(t)
}

fn mosco(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let kernel = cfg.kernel()?;
    let gamma: f64 = cfg.get("gamma", 1.0)?;
    let ns: Vec<u32> = cfg.list("ns", &[32, 64, 128, 256])?;
    let f = match cfg.raw("phi_center") {
        Some(_) => cfg.test_function()?,
        // off-centre by default so that f'(0) ≠ 0 and the gap term is visible
        None => TestFunction::from_name(cfg.raw("phi").unwrap_or("raised-cosine"), 0.25, cfg.get("phi_halfwidth", 1.0)?)?,
    };
    let table = mosco2_sequence(&f, &ns, gamma, &kernel)?;
    let df = TestFunction::derivative_of(f.clone());
    let mut t = ResultTable::new(
        "mosco",
        &[
            "n",
            "E_N_psi",
            "R_N_phi",
            "dual_rw_legendre",
            "dual_rw_fourier",
            "norm_rw_sq",
            "norm_sip_sq",
            "extrapolated",
            "limit_derived",
            "limit_paper",
            "fitted_order",
            "observed_order",
            "dual_limit",
        ],
    );
    let fitted = table.fitted_order(table.derived_limit);
    let dual_limit = dual_limit_of_derivative(&f, &kernel);
    for row in &table.rows {
        let n = row.n;
        let m = default_window(&f, &kernel, n);
        let psi = psi_n(&f, n, &kernel, m);
        // ℛ_N* of the walk-embedded derivative, whose limit is ∫f²/(4χ)
        let dual = dual_form_rw(&phi_n(&df, n, m), &kernel)?;
        t.push(vec![
            n.into(),
            row.e_psi.into(),
            row.r_phi.into(),
            dual.legendre.into(),
            dual.fourier.into(),
            psi.norm_rw_sq().into(),
            psi.norm_sip_sq(gamma).into(),
            table.extrapolated.into(),
            table.derived_limit.into(),
            table.paper_limit.into(),
            fitted.into(),
            table.observed_order.into(),
            dual_limit.into(),
        ]);
    }
    t.meta("sticky_weight", SQRT_2 * gamma);
    Ok(t)
}

fn duality(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let kernel = cfg.kernel()?;
    let k: f64 = cfg.get("k", 1.0)?;
    let time: f64 = cfg.get("t", 0.5)?;
    let replicas: u64 = cfg.get("replicas", 10_000)?;
    let eta: Vec<u64> = cfg.list("eta", &[2, 0, 1, 3, 0, 0, 1, 2, 0, 1, 0, 0])?;
    let l: usize = cfg.get("l", eta.len())?;
    if eta.len() != l {
        return Err(Error::Config(format!("eta has {} sites but l = {l}", eta.len())));
    }
    let xi: Vec<usize> = cfg.list("xi", &[2, 3])?;
    if xi.iter().any(|&x| x >= l) {
        return Err(Error::Config("dual positions must lie in 0..l".into()));
    }
    let params = SipParams::new(k, kernel, l)?;
    let d = duality_check(&DualConfiguration::new(xi), &Configuration::from_occupancies(eta), &params, time, replicas, cfg.seed)?;
    let mut t = ResultTable::new("duality-check", &["t", "lhs", "lhs_se", "rhs", "rhs_se", "z"]);
    t.push(vec![time.into(), d.lhs.mean().into(), d.lhs.se().into(), d.rhs.mean().into(), d.rhs.se().into(), d.z_score().into()]);
    Ok(t)
}

fn acceptance_suite(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let ids: Vec<u32> = cfg.list("criteria", &[])?;
    if let Some(bad) = ids.iter().find(|&&i| !(1..=13).contains(&i)) {
        return Err(Error::Config(format!("no criterion {bad}; valid ids are 1-13")));
    }
    let gamma: f64 = cfg.get("gamma", 1.0)?;
    let fx = Fixture { seed: cfg.seed, gamma, reference_gamma: cfg.get("reference_gamma", gamma)? };
    let outcomes: Vec<_> = acceptance::run_suite(&fx, &ids, false).into_iter().inspect(|o| eprintln!("{o}")).collect();
    Ok(acceptance::summary_table(&outcomes))
}
