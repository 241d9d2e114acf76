//! Suite runners: each one turns a resolved [`ExperimentConfig`] into a
//! report document (JSON), optional CSV rows, an optional SVG, and a
//! theorem-check verdict.

use crate::config::{parse_grid, ExperimentConfig, Suite, FORMAT_VERSION};
use crate::svg;
use lcpoly::check::{self, CheckReport, EnsembleSpec};
use lcpoly::pushforward::{self, push};
use lcpoly::{parse, Direction, LogConcaveMeasure, Polynomial};
use serde_json::json;

pub enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl From<lcpoly::Error> for CliError {
    fn from(e: lcpoly::Error) -> Self {
        match e {
            lcpoly::Error::Io(io) => CliError::Io(io),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub struct SuiteOutput {
    pub doc: serde_json::Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub summary: Vec<String>,
    pub theorem_failure: bool,
}

const DEFAULT_N: usize = 100_000;
const DEFAULT_SEED: u64 = 42;
const DEFAULT_ALL_N: usize = 10_000;

fn n_of(cfg: &ExperimentConfig, default: usize) -> usize {
    cfg.n.unwrap_or(default)
}

fn seed_of(cfg: &ExperimentConfig) -> u64 {
    cfg.seed.unwrap_or(DEFAULT_SEED)
}

fn measure_of(cfg: &ExperimentConfig) -> Result<LogConcaveMeasure, CliError> {
    let m = cfg
        .measure
        .clone()
        .ok_or_else(|| CliError::Usage("a measure is required (--measure/--family plus parameters)".into()))?;
    m.validate()?;
    Ok(m)
}

fn poly_of(cfg_field: &Option<String>, name: &str, dim: usize) -> Result<Polynomial, CliError> {
    let text = cfg_field
        .as_ref()
        .ok_or_else(|| CliError::Usage(format!("--{name} EXPR is required for this suite")))?;
    Ok(parse(text, dim)?)
}

fn doc_skeleton(suite: Suite, cfg: &ExperimentConfig) -> serde_json::Value {
    json!({
        "format_version": FORMAT_VERSION,
        "suite": suite.name(),
        "config": cfg,
    })
}

fn csv_preamble(cfg: &ExperimentConfig) -> String {
    let echo = serde_json::to_string(cfg).expect("config serializes");
    format!("# format_version,{FORMAT_VERSION}\n# config,{echo}\n")
}

fn report_csv(cfg: &ExperimentConfig, reports: &[&CheckReport]) -> String {
    let mut out = csv_preamble(cfg);
    out.push_str("name,lhs,rhs_core,ratio,stderr\n");
    for r in reports {
        out.push_str(&format!("{},{},{},{},{}\n", r.name, r.lhs, r.rhs_core, r.ratio, r.stderr));
    }
    out
}

fn summary_line(r: &CheckReport) -> String {
    format!(
        "{:<24} lhs={:<12.6e} rhs_core={:<12.6e} ratio={:.6}",
        r.name, r.lhs, r.rhs_core, r.ratio
    )
}

pub fn run(suite: Suite, cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    match suite {
        Suite::MainBound => run_main_bound(cfg),
        Suite::Sweep => run_sweep(cfg),
        Suite::CarberyWright => run_carbery_wright(cfg),
        Suite::Moments => run_moments(cfg),
        Suite::ReversePoincare => run_reverse_poincare(cfg),
        Suite::Poincare => run_poincare(cfg),
        Suite::DensityVariance => run_density_variance(cfg),
        Suite::EstimateConstant => run_estimate_constant(cfg),
        Suite::All => run_all(cfg),
    }
}

fn run_main_bound(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let m = measure_of(cfg)?;
    let f = poly_of(&cfg.f, "f", m.dim())?;
    let g = poly_of(&cfg.g, "g", m.dim())?;
    let (n, seed) = (n_of(cfg, DEFAULT_N), seed_of(cfg));
    let report = check::check_main_bound(&m, &f, &g, n, seed)?;

    let mut doc = doc_skeleton(Suite::MainBound, cfg);
    doc["reports"] = json!([&report]);

    let svg = if cfg.svg.is_some() {
        let s = m.sample(n, seed)?;
        let pf_f = push(&s, &f)?;
        let pf_g = push(&s, &g)?;
        let series = vec![
            (format!("f = {}", cfg.f.as_deref().unwrap_or("")), pf_f.values().to_vec()),
            (format!("g = {}", cfg.g.as_deref().unwrap_or("")), pf_g.values().to_vec()),
        ];
        Some(svg::histogram_svg("pushforward histograms", &series).map_err(CliError::Usage)?)
    } else {
        None
    };

    Ok(SuiteOutput {
        csv: Some(report_csv(cfg, &[&report])),
        summary: vec![summary_line(&report)],
        svg,
        doc,
        theorem_failure: false,
    })
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let m = measure_of(cfg)?;
    let g = poly_of(&cfg.g, "g", m.dim())?;
    let h = poly_of(&cfg.h, "h", m.dim())?;
    let deltas = parse_grid(cfg.deltas.as_deref().unwrap_or("1e-3:1e-1:10log")).map_err(CliError::Usage)?;
    let (n, seed) = (n_of(cfg, DEFAULT_N), seed_of(cfg));
    let estimates = pushforward::shift_family_tv_with_bins(&m, &g, &h, &deltas, n, seed, cfg.bins)?;

    let tvs: Vec<f64> = estimates.iter().map(|e| e.tv).collect();
    let slope = lcpoly::numeric::loglog_slope(&deltas, &tvs);

    let mut csv = csv_preamble(cfg);
    csv.push_str("delta,tv,stderr,bins\n");
    for (d, e) in deltas.iter().zip(&estimates) {
        csv.push_str(&format!("{},{},{},{}\n", d, e.tv, e.stderr, e.bins));
    }

    let mut doc = doc_skeleton(Suite::Sweep, cfg);
    doc["rows"] = json!(deltas
        .iter()
        .zip(&estimates)
        .map(|(d, e)| json!({"delta": d, "tv": e.tv, "stderr": e.stderr, "bins": e.bins}))
        .collect::<Vec<_>>());
    doc["fitted_slope"] = json!(slope);

    let svg = if cfg.svg.is_some() {
        let pts: Vec<(f64, f64)> = deltas.iter().zip(&tvs).map(|(&d, &t)| (d, t)).collect();
        Some(svg::loglog_svg("tv against delta", &pts, "delta", "tv").map_err(CliError::Usage)?)
    } else {
        None
    };

    let summary = vec![format!(
        "sweep: {} deltas in [{:.3e}, {:.3e}], fitted log-log slope {}",
        deltas.len(),
        deltas[0],
        deltas[deltas.len() - 1],
        slope.map_or("n/a".to_string(), |s| format!("{s:.4}"))
    )];

    Ok(SuiteOutput { doc, csv: Some(csv), svg, summary, theorem_failure: false })
}

fn run_carbery_wright(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let (n, seed) = (n_of(cfg, DEFAULT_N), seed_of(cfg));
    if cfg.f.is_none() && cfg.measure.is_none() {
        // Default ensemble mode.
        let reports = check::run_carbery_wright_ensemble(n, seed)?;
        let mut csv = csv_preamble(cfg);
        csv.push_str("cell,measure,exponent,window_lo,window_hi\n");
        let mut cells = Vec::new();
        let mut min_exp = f64::INFINITY;
        for (i, r) in reports.iter().enumerate() {
            let measure = r.reports[0]
                .config
                .measure
                .as_ref()
                .map(|m| serde_json::to_string(m).expect("measure serializes"))
                .unwrap_or_default();
            csv.push_str(&format!(
                "{},{:?},{},{},{}\n",
                i, measure, r.smallball_exponent, r.exponent_window.0, r.exponent_window.1
            ));
            min_exp = min_exp.min(r.smallball_exponent);
            cells.push(json!({
                "cell": i,
                "measure": r.reports[0].config.measure,
                "f": r.reports[0].config.polynomials.get("f"),
                "exponent": r.smallball_exponent,
                "window": [r.exponent_window.0, r.exponent_window.1],
            }));
        }
        let mut doc = doc_skeleton(Suite::CarberyWright, cfg);
        doc["cells"] = json!(cells);
        doc["min_exponent"] = json!(min_exp);
        let summary = vec![format!(
            "carbery-wright ensemble: {} cells, min fitted small-ball exponent {min_exp:.4}",
            reports.len()
        )];
        return Ok(SuiteOutput { doc, csv: Some(csv), svg: None, summary, theorem_failure: false });
    }

    let m = measure_of(cfg)?;
    let f = poly_of(&cfg.f, "f", m.dim())?;
    let grid = match &cfg.t_grid {
        Some(spec) => Some(parse_grid(spec).map_err(CliError::Usage)?),
        None => None,
    };
    let r = check::check_carbery_wright(&m, &f, grid.as_deref(), n, seed)?;

    let mut csv = csv_preamble(cfg);
    csv.push_str("t,lhs,rhs_core,ratio,stderr\n");
    for rep in &r.reports {
        let t = rep.config.params["t"].as_f64().unwrap_or(f64::NAN);
        csv.push_str(&format!("{},{},{},{},{}\n", t, rep.lhs, rep.rhs_core, rep.ratio, rep.stderr));
    }
    let mut doc = doc_skeleton(Suite::CarberyWright, cfg);
    doc["reports"] = json!(&r.reports);
    doc["smallball_exponent"] = json!(r.smallball_exponent);
    doc["exponent_window"] = json!([r.exponent_window.0, r.exponent_window.1]);
    let summary = vec![format!(
        "carbery-wright: {} thresholds, fitted small-ball exponent {:.4} on [{:.3e}, {:.3e}]",
        r.reports.len(),
        r.smallball_exponent,
        r.exponent_window.0,
        r.exponent_window.1
    )];
    Ok(SuiteOutput { doc, csv: Some(csv), svg: None, summary, theorem_failure: false })
}

fn run_moments(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let m = measure_of(cfg)?;
    let f = poly_of(&cfg.f, "f", m.dim())?;
    let q = cfg.q.unwrap_or(2.0);
    let (n, seed) = (n_of(cfg, DEFAULT_N), seed_of(cfg));
    let r = check::check_moment_equivalence(&m, &f, q, n, seed)?;

    // Theorem-true side condition: the norm chain on the same sample.
    let s = m.sample(n, seed)?;
    let pf = push(&s, &f)?;
    let chain_ok = check::norm_chain_holds(&pf)?;

    let mut doc = doc_skeleton(Suite::Moments, cfg);
    doc["reports"] = json!([&r.vs_zero, &r.vs_one]);
    doc["norm_chain_ok"] = json!(chain_ok);
    let summary = vec![
        summary_line(&r.vs_zero),
        summary_line(&r.vs_one),
        format!("norm chain |f|_0 <= |f|_1 <= |f|_2: {}", if chain_ok { "ok" } else { "VIOLATED" }),
    ];
    Ok(SuiteOutput {
        csv: Some(report_csv(cfg, &[&r.vs_zero, &r.vs_one])),
        svg: None,
        doc,
        summary,
        theorem_failure: !chain_ok,
    })
}

fn run_reverse_poincare(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let m = measure_of(cfg)?;
    let f = poly_of(&cfg.f, "f", m.dim())?;
    let e = match &cfg.e {
        Some(v) => Direction::new(v.clone())?,
        None => Direction::axis(m.dim(), 0),
    };
    let (n, seed) = (n_of(cfg, DEFAULT_N), seed_of(cfg));
    let report = check::check_reverse_poincare(&m, &f, &e, n, seed)?;
    let mut doc = doc_skeleton(Suite::ReversePoincare, cfg);
    doc["reports"] = json!([&report]);
    Ok(SuiteOutput {
        csv: Some(report_csv(cfg, &[&report])),
        svg: None,
        summary: vec![summary_line(&report)],
        doc,
        theorem_failure: false,
    })
}

fn run_poincare(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let m = measure_of(cfg)?;
    let f = poly_of(&cfg.f, "f", m.dim())?;
    let (n, seed) = (n_of(cfg, DEFAULT_N), seed_of(cfg));
    let report = check::check_poincare(&m, &f, n, seed)?;
    let mut doc = doc_skeleton(Suite::Poincare, cfg);
    doc["reports"] = json!([&report]);
    Ok(SuiteOutput {
        csv: Some(report_csv(cfg, &[&report])),
        svg: None,
        summary: vec![summary_line(&report)],
        doc,
        theorem_failure: false,
    })
}

fn run_density_variance(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let m = measure_of(cfg)?;
    let report = check::check_density_variance(&m)?;
    let pass = check::density_variance_pass(&report);
    let mut doc = doc_skeleton(Suite::DensityVariance, cfg);
    doc["reports"] = json!([&report]);
    doc["pass"] = json!(pass);
    let summary = vec![format!(
        "{} ({})",
        summary_line(&report),
        if pass { "pass" } else { "FAIL: below 1/12" }
    )];
    Ok(SuiteOutput {
        csv: Some(report_csv(cfg, &[&report])),
        svg: None,
        doc,
        summary,
        theorem_failure: !pass,
    })
}

fn run_estimate_constant(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let n = n_of(cfg, DEFAULT_N);
    let d = cfg.d.unwrap_or(2);
    let mut spec = EnsembleSpec::default_for_degree(d, n);
    if let Some(m) = &cfg.measure {
        m.validate()?;
        spec.measures = vec![m.clone()];
    }
    if let Some(t) = cfg.trials {
        spec.trials = t;
    }
    if let Some(s) = cfg.coefficient_scale {
        spec.coefficient_scale = s;
    }
    if let Some(ds) = &cfg.deltas {
        spec.deltas = parse_grid(ds).map_err(CliError::Usage)?;
    }
    let estimate = check::estimate_constant(&spec, seed_of(cfg))?;

    let mut csv = csv_preamble(cfg);
    csv.push_str("index,measure,trial,delta,ratio,tv,tv_stderr,sigma_g,l2_diff\n");
    for r in &estimate.records {
        csv.push_str(&format!(
            "{},{:?},{},{},{},{},{},{},{}\n",
            r.index, r.measure, r.trial, r.delta, r.ratio, r.tv, r.tv_stderr, r.sigma_g, r.l2_diff
        ));
    }

    let mut doc = doc_skeleton(Suite::EstimateConstant, cfg);
    doc["d"] = json!(estimate.d);
    doc["cells"] = json!(estimate.cells);
    doc["c_hat"] = json!(estimate.c_hat);
    doc["trajectory"] = json!(estimate.trajectory);
    doc["ensemble"] = json!(spec);

    let svg = if cfg.svg.is_some() {
        let series = vec![("cell ratios".to_string(), estimate.ratios.clone())];
        Some(svg::histogram_svg("main-bound ratio distribution", &series).map_err(CliError::Usage)?)
    } else {
        None
    };

    let summary = vec![format!(
        "estimate-constant: d={}, {} cells, c_hat = {:.6}",
        estimate.d, estimate.cells, estimate.c_hat
    )];
    Ok(SuiteOutput { doc, csv: Some(csv), svg, summary, theorem_failure: false })
}

fn run_all(cfg: &ExperimentConfig) -> Result<SuiteOutput, CliError> {
    let n = n_of(cfg, DEFAULT_ALL_N);
    let seed = seed_of(cfg);
    let mut reports: Vec<CheckReport> = Vec::new();
    let mut summary = Vec::new();
    let mut theorem_failure = false;

    // Theorem-true rows first: density-variance across the 1-D families.
    let one_d = [
        LogConcaveMeasure::uniform_box(vec![0.0], vec![1.0])?,
        LogConcaveMeasure::standard_gaussian(1),
        LogConcaveMeasure::product_exponential(vec![1.0])?,
    ];
    for m in &one_d {
        let r = check::check_density_variance(m)?;
        let pass = check::density_variance_pass(&r);
        theorem_failure |= !pass;
        summary.push(format!("{} ({})", summary_line(&r), if pass { "pass" } else { "FAIL" }));
        reports.push(r);
    }

    let gaussian1 = LogConcaveMeasure::standard_gaussian(1);
    let gaussian2 = LogConcaveMeasure::standard_gaussian(2);
    let box2 = LogConcaveMeasure::uniform_box(vec![-1.0, -1.0], vec![1.0, 1.0])?;

    // Moment equivalence plus the norm-chain gate on each pushforward.
    for (i, (m, f_text, q)) in [
        (&gaussian1, "x1", 2.0),
        (&gaussian1, "x1^2", 2.0),
        (&box2, "x1*x2 + x2", 3.0),
    ]
    .iter()
    .enumerate()
    {
        let f = parse(f_text, m.dim())?;
        let row_seed = check::derive_seed(seed, &[10, i as u64]);
        let r = check::check_moment_equivalence(m, &f, *q, n, row_seed)?;
        let s = m.sample(n, row_seed)?;
        let chain_ok = check::norm_chain_holds(&push(&s, &f)?)?;
        theorem_failure |= !chain_ok;
        summary.push(summary_line(&r.vs_zero));
        summary.push(summary_line(&r.vs_one));
        summary.push(format!(
            "norm chain on {f_text}: {}",
            if chain_ok { "ok" } else { "VIOLATED" }
        ));
        reports.push(r.vs_zero);
        reports.push(r.vs_one);
    }

    // Main bound spot rows.
    for (i, (m, f_text, g_text)) in [
        (&gaussian1, "x1^2 + 0.05", "x1^2"),
        (&gaussian2, "x1^2 + x1*x2 + 0.02", "x1^2 + x1*x2"),
        (&box2, "x1^2 + 0.3*x2 + 0.05", "x1^2 + 0.3*x2"),
    ]
    .iter()
    .enumerate()
    {
        let f = parse(f_text, m.dim())?;
        let g = parse(g_text, m.dim())?;
        let r = check::check_main_bound(m, &f, &g, n, check::derive_seed(seed, &[11, i as u64]))?;
        summary.push(summary_line(&r));
        reports.push(r);
    }

    // Small-ball row with its exponent.
    let cw = check::check_carbery_wright(
        &gaussian1,
        &parse("x1^2", 1)?,
        None,
        n,
        check::derive_seed(seed, &[12]),
    )?;
    summary.push(format!(
        "carbery-wright: fitted small-ball exponent {:.4}",
        cw.smallball_exponent
    ));
    let cw_exponent = cw.smallball_exponent;
    reports.extend(cw.reports);

    // Reverse Poincare and Poincare spot rows.
    let rp = check::check_reverse_poincare(
        &gaussian2,
        &parse("x1", 2)?,
        &Direction::axis(2, 0),
        n,
        check::derive_seed(seed, &[13]),
    )?;
    summary.push(summary_line(&rp));
    reports.push(rp);
    let pc = check::check_poincare(&gaussian2, &parse("x1", 2)?, n, check::derive_seed(seed, &[14]))?;
    summary.push(summary_line(&pc));
    reports.push(pc);

    let mut doc = doc_skeleton(Suite::All, cfg);
    doc["reports"] = json!(&reports);
    doc["smallball_exponent"] = json!(cw_exponent);
    doc["theorem_failure"] = json!(theorem_failure);

    let refs: Vec<&CheckReport> = reports.iter().collect();
    let csv = report_csv(cfg, &refs);
    summary.push(format!(
        "all: {} reports, theorem checks {}",
        reports.len(),
        if theorem_failure { "FAILED" } else { "ok" }
    ));
    Ok(SuiteOutput { doc, csv: Some(csv), svg: None, summary, theorem_failure })
}
