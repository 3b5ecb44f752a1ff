use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Experiment, ExperimentConfig, ProcessSpec};
use super::report::{cell, ExperimentOutput, ExperimentReport, Statistic, Status, Table, Verdict};
use super::sampling::{sample_marked_poisson, sample_perturbed_lattice, sample_poisson_box, uniform_in_ball};
use super::{stream_rng, WindowSpec};
use crate::diagram::{bin_measure, matching_distance, measure_discrepancy, total_mass, BinnedMeasure, Region};
use crate::error::{Error, Result};
use crate::filtration::{
    build_filtered_complex, build_skeleton, parse_kappa, FiltrationFunction, DEFAULT_SIMPLEX_BUDGET,
};
use crate::geometry::{hausdorff_distance, min_separation, MarkedPoint, MarkedPointCloud};
use crate::homology::{
    diagram_cardinality, epbn_diagram, verbose_diagram_over, verbose_diagrams, ExtendedPbnQuery, VerboseDiagram,
};

/// Draws per replication before the stability experiment gives up on finding
/// a cloud whose separation admits the perturbation.
const MAX_STABILITY_DRAWS: usize = 1000;
/// Absolute slack on the Lipschitz bound, covering float round-off only.
const BOUND_SLACK: f64 = 1e-9;

/// Validates `config` for `experiment` and runs it on the current rayon pool.
pub fn run_experiment(experiment: Experiment, config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate(experiment)?;
    match experiment {
        Experiment::Slln => run_slln(config),
        Experiment::Mass => run_total_mass(config),
        Experiment::Clt => run_clt(config),
        Experiment::Support => run_support_check(config),
        Experiment::Stability => run_stability(config),
    }
}

/// Draws one cloud from the configured process.
pub fn sample_process(process: &ProcessSpec, w: &WindowSpec, rng: &mut ChaCha8Rng) -> Result<MarkedPointCloud> {
    match *process {
        ProcessSpec::Poisson { lambda } => sample_poisson_box(lambda, w, rng),
        ProcessSpec::MarkedPoisson { lambda, r0 } => sample_marked_poisson(lambda, r0, w, rng),
        ProcessSpec::PerturbedLattice { jitter } => sample_perturbed_lattice(jitter, w, rng),
    }
}

/// Runs `task` for every (window, replication) pair in parallel. Replication
/// `r` of window `i` draws from substream `(i << 32) | r`, and results come
/// back grouped by window in replication order, so the output does not depend
/// on scheduling.
fn replicate<T, F>(config: &ExperimentConfig, task: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(&WindowSpec, usize, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    let seed = config
        .seed
        .ok_or_else(|| Error::Config(vec!["seed: no seed given".into()]))?;
    let windows: Vec<WindowSpec> = config
        .windows
        .iter()
        .map(|&n| WindowSpec::new(config.dim, n))
        .collect::<Result<_>>()?;
    let reps = config.replications;
    let jobs: Vec<(usize, usize)> = (0..windows.len())
        .flat_map(|w| (0..reps).map(move |r| (w, r)))
        .collect();
    let mut flat: Vec<T> = jobs
        .par_iter()
        .map(|&(w, r)| {
            let mut rng = stream_rng(seed, ((w as u64) << 32) | r as u64);
            task(&windows[w], r, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut grouped = Vec::with_capacity(windows.len());
    for _ in 0..windows.len() {
        let rest = flat.split_off(reps);
        grouped.push(flat);
        flat = rest;
    }
    Ok(grouped)
}

fn base_report(experiment: Experiment, config: &ExperimentConfig) -> ExperimentReport {
    let mut warnings = Vec::new();
    if let ProcessSpec::PerturbedLattice { .. } = config.process {
        warnings.push("auxiliary process: ergodicity of the perturbed lattice is by construction, not proved".into());
    }
    ExperimentReport {
        experiment: experiment.name().into(),
        seed: config.seed.unwrap_or_default(),
        status: Status::Pass,
        verdicts: Vec::new(),
        warnings,
        notes: Vec::new(),
        statistics: Vec::new(),
        config: config.clone(),
    }
}

fn finish(mut report: ExperimentReport, tables: Vec<Table>) -> ExperimentOutput {
    report.status = ExperimentReport::overall(&report.verdicts);
    ExperimentOutput {
        report,
        tables,
        measures: Vec::new(),
        diagrams: Vec::new(),
    }
}

fn stat(report: &mut ExperimentReport, name: &str, window: Option<f64>, value: f64) {
    report.statistics.push(Statistic {
        name: name.into(),
        window,
        value,
    });
}

/// Index of the smallest and largest window side.
fn extreme_windows(config: &ExperimentConfig) -> (usize, usize) {
    let by_side = |a: &(usize, &f64), b: &(usize, &f64)| a.1.total_cmp(b.1);
    let it = || config.windows.iter().enumerate();
    (it().min_by(by_side).unwrap().0, it().max_by(by_side).unwrap().0)
}

fn window_label(n: f64) -> String {
    format!("n{}", cell(n))
}

fn kappa_of(config: &ExperimentConfig) -> Result<Box<dyn FiltrationFunction>> {
    parse_kappa(&config.kappa)
}

// ---- SLLN -------------------------------------------------------------------

struct SllnSample {
    points: usize,
    measure: BinnedMeasure,
    diagram: Option<VerboseDiagram>,
}

/// Empirical measures of the degree-`q` diagram normalized by window volume:
/// per-window means, discrepancies between independent replication pairs, and
/// between the means of consecutive windows. All comparisons are restricted to
/// the trusted square `[0, min(L, t_max)]²`.
pub fn run_slln(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let kappa = kappa_of(config)?;
    let field = config.field()?;
    let grid = config
        .grid
        .ok_or_else(|| Error::Config(vec!["grid: required".into()]))?;
    let q = config.q;
    let samples = replicate(config, |w, rep, rng| {
        let x = sample_process(&config.process, w, rng)?;
        let fc = build_filtered_complex(&x, kappa.as_ref(), q, config.t_max)?;
        let vd = verbose_diagram_over(&fc, q, field)?;
        let measure = bin_measure(&vd, grid.l, grid.h, w.volume())?;
        Ok(SllnSample {
            points: x.len(),
            measure,
            diagram: (rep == 0).then_some(vd),
        })
    })?;

    let mut report = base_report(Experiment::Slln, config);
    report.notes.push(
        "No convergence rate is known for the limit measure; the concentration verdict compares \
         replicate-pair discrepancies between the smallest and largest window and is a heuristic."
            .into(),
    );
    let region = Region::square(0.0, grid.l.min(config.t_max));
    let mut pairs = Table::new("slln_pairs", &["n", "pair", "discrepancy"]);
    let mut per_window = Table::new(
        "slln_windows",
        &["n", "mean_points", "mean_total_mass", "median_pair_discrepancy"],
    );
    let mut consecutive = Table::new("slln_consecutive", &["n_from", "n_to", "discrepancy"]);
    let mut measures = Vec::new();
    let mut diagrams = Vec::new();
    let mut medians = Vec::new();
    let mut means: Vec<BinnedMeasure> = Vec::new();

    for (wi, window) in samples.iter().enumerate() {
        let n = config.windows[wi];
        let mut disc = Vec::new();
        for (k, pair) in window.chunks_exact(2).enumerate() {
            let d = measure_discrepancy(&pair[0].measure, &pair[1].measure, region)?;
            pairs.push(vec![cell(n), k.to_string(), cell(d)]);
            disc.push(d);
        }
        let med = median(&disc);
        let ms: Vec<BinnedMeasure> = window.iter().map(|s| s.measure.clone()).collect();
        let mean_measure = BinnedMeasure::mean(&ms)?;
        let mean_points = mean(&window.iter().map(|s| s.points as f64).collect::<Vec<_>>());
        let mean_mass = mean(&ms.iter().map(total_mass).collect::<Vec<_>>());
        per_window.push(vec![cell(n), cell(mean_points), cell(mean_mass), cell(med)]);
        stat(&mut report, "median_pair_discrepancy", Some(n), med);
        stat(&mut report, "mean_total_mass", Some(n), mean_mass);
        if let Some(prev) = means.last() {
            let d = measure_discrepancy(prev, &mean_measure, region)?;
            consecutive.push(vec![cell(config.windows[wi - 1]), cell(n), cell(d)]);
            stat(&mut report, "consecutive_mean_discrepancy", Some(n), d);
        }
        measures.push((format!("mean_{}", window_label(n)), mean_measure.clone()));
        if let Some(vd) = &window[0].diagram {
            diagrams.push((format!("{}_rep0", window_label(n)), vec![vd.clone()]));
        }
        means.push(mean_measure);
        medians.push(med);
    }

    let (small, large) = extreme_windows(config);
    let (lo, hi) = (medians[small], medians[large]);
    report.verdicts.push(Verdict::check(
        "concentration",
        hi < lo,
        hi,
        lo,
        format!(
            "median replicate-pair discrepancy at n = {} must be strictly below that at n = {}",
            config.windows[large], config.windows[small]
        ),
    ));
    let mut out = finish(report, vec![per_window, pairs, consecutive]);
    out.measures = measures;
    out.diagrams = diagrams;
    Ok(out)
}

// ---- total mass -------------------------------------------------------------

/// `|D_q|` for a cloud of `n` points with the full complex: `n` for `q = 0`,
/// `C(n − 1, q + 1)` for `1 ≤ q ≤ n − 2`, and `0` otherwise.
pub fn closed_form_cardinality(n: usize, q: usize) -> u128 {
    match q {
        0 => n as u128,
        _ if n >= 2 && q <= n - 2 => binomial((n - 1) as u128, (q + 1) as u128),
        _ => 0,
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Total mass `|D_q| / n^N` of the untruncated diagram per replication. The
/// cardinality is read from the `q`-skeleton: it equals the number of
/// positive `q`-simplices, which does not depend on higher simplices.
pub fn run_total_mass(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let kappa = kappa_of(config)?;
    let field = config.field()?;
    let q = config.q;
    let samples = replicate(config, |w, _, rng| {
        let x = sample_process(&config.process, w, rng)?;
        let fc = build_skeleton(&x, kappa.as_ref(), q, f64::INFINITY, DEFAULT_SIMPLEX_BUDGET)?;
        let card = diagram_cardinality(&fc, q, field)?;
        Ok((x.len(), card, card as f64 / w.volume()))
    })?;

    let mut report = base_report(Experiment::Mass, config);
    let lambda = config.process.intensity();
    let mut reps = Table::new("mass_replications", &["n", "rep", "points", "cardinality", "statistic"]);
    let mut per_window = Table::new("mass_windows", &["n", "mean_statistic", "sd_statistic"]);
    let mut closed_form_violations = 0usize;
    let mut window_means = Vec::new();
    for (wi, window) in samples.iter().enumerate() {
        let n = config.windows[wi];
        for (r, &(points, card, s)) in window.iter().enumerate() {
            reps.push(vec![
                cell(n),
                r.to_string(),
                points.to_string(),
                card.to_string(),
                cell(s),
            ]);
            if card as u128 != closed_form_cardinality(points, q) {
                closed_form_violations += 1;
            }
        }
        let stats: Vec<f64> = window.iter().map(|t| t.2).collect();
        let (m, sd) = (mean(&stats), variance(&stats).sqrt());
        per_window.push(vec![cell(n), cell(m), cell(sd)]);
        stat(&mut report, "mean_statistic", Some(n), m);
        window_means.push(m);
    }
    report.verdicts.push(Verdict::check(
        "closed_form_cardinality",
        closed_form_violations == 0,
        closed_form_violations as f64,
        0.0,
        "diagram cardinality equals the closed form in the number of points for every replication",
    ));

    let (small, large) = extreme_windows(config);
    if q == 0 {
        let rel = (window_means[large] / lambda - 1.0).abs();
        report.verdicts.push(Verdict::check(
            "intensity",
            rel <= 0.05,
            rel,
            0.05,
            format!(
                "relative error of the mean statistic at n = {} against intensity {lambda}",
                config.windows[large]
            ),
        ));
    } else if small == large {
        report.verdicts.push(Verdict::new(
            "divergence",
            Status::Inconclusive,
            f64::NAN,
            0.9,
            "needs at least two window sizes",
        ));
    } else {
        let grew = samples[small]
            .iter()
            .zip(&samples[large])
            .filter(|(a, b)| b.2 > a.2)
            .count();
        let frac = grew as f64 / config.replications as f64;
        report.verdicts.push(Verdict::check(
            "divergence",
            frac >= 0.9,
            frac,
            0.9,
            format!(
                "fraction of paired replications whose statistic at n = {} exceeds that at n = {}",
                config.windows[large], config.windows[small]
            ),
        ));
    }
    Ok(finish(report, vec![per_window, reps]))
}

// ---- CLT --------------------------------------------------------------------

/// Extended persistent Betti number `β_q^{r,s}` per replication: its variance
/// growth across windows and the shape of its standardized sample.
pub fn run_clt(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let kappa = kappa_of(config)?;
    let field = config.field()?;
    let qs = config
        .query
        .ok_or_else(|| Error::Config(vec!["query: required".into()]))?;
    let query = ExtendedPbnQuery::new(config.q, qs.r, qs.s)?;
    let samples = replicate(config, |w, _, rng| {
        let x = sample_process(&config.process, w, rng)?;
        let fc = build_filtered_complex(&x, kappa.as_ref(), config.q, config.t_max)?;
        let vd = verbose_diagram_over(&fc, config.q, field)?;
        Ok((x.len(), epbn_diagram(&vd, query)? as f64))
    })?;

    let mut report = base_report(Experiment::Clt, config);
    if config.process != (ProcessSpec::Poisson { lambda: 1.0 }) {
        report.warnings.push(
            "the central limit theorem is stated for a unit-intensity Poisson process; this run is outside it".into(),
        );
    }
    report.notes.push(
        "The limiting variance has no closed form; only the normal shape of the standardized sample \
         and variance growth proportional to volume are tested."
            .into(),
    );
    let mut reps = Table::new("clt_replications", &["n", "rep", "points", "beta"]);
    let mut per_window = Table::new("clt_windows", &["n", "mean", "variance", "variance_per_volume"]);
    let mut scaled = Vec::new();
    for (wi, window) in samples.iter().enumerate() {
        let n = config.windows[wi];
        for (r, &(points, beta)) in window.iter().enumerate() {
            reps.push(vec![cell(n), r.to_string(), points.to_string(), cell(beta)]);
        }
        let betas: Vec<f64> = window.iter().map(|t| t.1).collect();
        let (m, v) = (mean(&betas), variance(&betas));
        let vpv = v / WindowSpec::new(config.dim, n)?.volume();
        per_window.push(vec![cell(n), cell(m), cell(v), cell(vpv)]);
        stat(&mut report, "mean_beta", Some(n), m);
        stat(&mut report, "variance_per_volume", Some(n), vpv);
        scaled.push(vpv);
    }

    let (small, large) = extreme_windows(config);
    let nw = config.normality_window.unwrap_or(config.windows[large]);
    let wi = config.windows.iter().position(|&w| w == nw).expect("validated window");
    let betas: Vec<f64> = samples[wi].iter().map(|t| t.1).collect();
    let (m, sd) = (mean(&betas), variance(&betas).sqrt());
    let mut standardized = Table::new("clt_standardized", &["rep", "beta", "z"]);
    if sd > 0.0 {
        let z: Vec<f64> = betas.iter().map(|b| (b - m) / sd).collect();
        for (r, (b, zi)) in betas.iter().zip(&z).enumerate() {
            standardized.push(vec![r.to_string(), cell(*b), cell(*zi)]);
        }
        let (g1, g2) = (skewness(&betas), excess_kurtosis(&betas));
        stat(&mut report, "skewness", Some(nw), g1);
        stat(&mut report, "excess_kurtosis", Some(nw), g2);
        report.verdicts.push(Verdict::check(
            "skewness",
            g1.abs() < 0.5,
            g1,
            0.5,
            format!("|skewness| of the standardized sample at n = {nw}"),
        ));
        report.verdicts.push(Verdict::check(
            "excess_kurtosis",
            g2.abs() < 1.0,
            g2,
            1.0,
            format!("|excess kurtosis| of the standardized sample at n = {nw}"),
        ));
    } else {
        for (name, tol) in [("skewness", 0.5), ("excess_kurtosis", 1.0)] {
            report.verdicts.push(Verdict::new(
                name,
                Status::Inconclusive,
                f64::NAN,
                tol,
                format!("zero sample variance at n = {nw}"),
            ));
        }
    }

    let ratio = scaled[small] / scaled[large];
    let scaling = if small == large || !(ratio.is_finite() && ratio > 0.0) {
        Verdict::new(
            "variance_scaling",
            Status::Inconclusive,
            ratio,
            2.0,
            "needs two windows with nonzero variance",
        )
    } else {
        Verdict::check(
            "variance_scaling",
            (0.5..=2.0).contains(&ratio),
            ratio,
            2.0,
            format!(
                "variance / n^N at n = {} over that at n = {} must lie within a factor of 2",
                config.windows[small], config.windows[large]
            ),
        )
    };
    report.verdicts.push(scaling);
    Ok(finish(report, vec![per_window, reps, standardized]))
}

// ---- support ----------------------------------------------------------------

/// Structural checks on sampled Čech diagrams in the plane: degree-0 births
/// are 0, degree-2 points are diagonal, degree 1 has both kinds.
pub fn run_support_check(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let kappa = kappa_of(config)?;
    let field = config.field()?;
    let top = config.dim;
    let samples = replicate(config, |w, _, rng| {
        let x = sample_process(&config.process, w, rng)?;
        let fc = build_filtered_complex(&x, kappa.as_ref(), top, config.t_max)?;
        verbose_diagrams(&fc, field)
    })?;

    let mut report = base_report(Experiment::Support, config);
    let mut counts = Table::new(
        "support_counts",
        &["n", "rep", "q", "points", "diagonal", "off_diagonal_finite", "infinite"],
    );
    let mut diagrams = Vec::new();
    let (mut h0_nonzero, mut top_off, mut h1_diag, mut h1_off) = (0usize, 0usize, 0usize, 0usize);
    for (wi, window) in samples.iter().enumerate() {
        let n = config.windows[wi];
        for (r, ds) in window.iter().enumerate() {
            for vd in ds {
                let pts = vd.points();
                let diag = pts.iter().filter(|p| p.is_diagonal()).count();
                let inf = pts.iter().filter(|p| p.death.is_infinite()).count();
                let off = pts.len() - diag - inf;
                counts.push(vec![
                    cell(n),
                    r.to_string(),
                    vd.q().to_string(),
                    pts.len().to_string(),
                    diag.to_string(),
                    off.to_string(),
                    inf.to_string(),
                ]);
                match vd.q() {
                    0 => h0_nonzero += pts.iter().filter(|p| p.birth != 0.0).count(),
                    1 => {
                        h1_diag += diag;
                        h1_off += off;
                    }
                    _ => {}
                }
                if vd.q() >= top {
                    top_off += pts.len() - diag;
                }
            }
            if r == 0 {
                diagrams.push((format!("{}_rep0", window_label(n)), ds.clone()));
            }
        }
    }
    report.verdicts.push(Verdict::check(
        "degree0_births_zero",
        h0_nonzero == 0,
        h0_nonzero as f64,
        0.0,
        "degree-0 points with nonzero birth",
    ));
    report.verdicts.push(Verdict::check(
        "top_degree_diagonal",
        top_off == 0,
        top_off as f64,
        0.0,
        format!("degree-{top} points with birth != death"),
    ));
    report.verdicts.push(Verdict::check(
        "degree1_diagonal_present",
        h1_diag > 0,
        h1_diag as f64,
        1.0,
        "diagonal degree-1 points observed",
    ));
    report.verdicts.push(Verdict::check(
        "degree1_off_diagonal_present",
        h1_off > 0,
        h1_off as f64,
        1.0,
        "finite off-diagonal degree-1 points observed",
    ));
    let mut out = finish(report, vec![counts]);
    out.diagrams = diagrams;
    Ok(out)
}

// ---- stability --------------------------------------------------------------

struct StabilityTrial {
    points: usize,
    skipped: usize,
    hausdorff: f64,
    /// Matching distance per degree `0..=q`.
    distances: Vec<f64>,
}

/// Moves every point uniformly within `epsilon` and compares untruncated
/// diagrams against `c · d_H`. Clouds whose separation is too small for the
/// perturbation are redrawn from the same substream and counted as skipped.
pub fn run_stability(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let kappa = kappa_of(config)?;
    let field = config.field()?;
    let c = kappa
        .lipschitz()
        .ok_or_else(|| Error::Config(vec![format!("kappa: `{}` has no Lipschitz constant", config.kappa)]))?;
    let eps = config
        .epsilon
        .ok_or_else(|| Error::Config(vec!["epsilon: required".into()]))?;
    let q = config.q;
    let samples = replicate(config, |w, _, rng| {
        let mut skipped = 0;
        while skipped < MAX_STABILITY_DRAWS {
            let x = sample_process(&config.process, w, rng)?;
            if x.len() >= 2 && eps >= min_separation(&x)? / 2.0 {
                skipped += 1;
                continue;
            }
            let y = perturb(&x, eps, rng)?;
            let hausdorff = if x.is_empty() { 0.0 } else { hausdorff_distance(&x, &y)? };
            let dx = verbose_diagrams(&build_filtered_complex(&x, kappa.as_ref(), q, f64::INFINITY)?, field)?;
            let dy = verbose_diagrams(&build_filtered_complex(&y, kappa.as_ref(), q, f64::INFINITY)?, field)?;
            let distances = dx
                .iter()
                .zip(&dy)
                .map(|(a, b)| matching_distance(a, b).map(|r| r.value))
                .collect::<Result<_>>()?;
            return Ok(Some(StabilityTrial {
                points: x.len(),
                skipped,
                hausdorff,
                distances,
            }));
        }
        Ok(None)
    })?;

    let mut report = base_report(Experiment::Stability, config);
    let mut trials = Table::new(
        "stability_trials",
        &["n", "rep", "q", "points", "skipped", "hausdorff", "matching", "ratio"],
    );
    let (mut violations, mut infinite, mut exhausted, mut skipped, mut count) =
        (0usize, 0usize, 0usize, 0usize, 0usize);
    let mut max_ratio = 0.0f64;
    for (wi, window) in samples.iter().enumerate() {
        let n = config.windows[wi];
        for (r, trial) in window.iter().enumerate() {
            let Some(t) = trial else {
                exhausted += 1;
                skipped += MAX_STABILITY_DRAWS;
                continue;
            };
            count += 1;
            skipped += t.skipped;
            for (deg, &d) in t.distances.iter().enumerate() {
                let ratio = if d == 0.0 { 0.0 } else { d / t.hausdorff };
                max_ratio = max_ratio.max(ratio);
                if d.is_infinite() {
                    infinite += 1;
                }
                if !(d <= c * t.hausdorff + BOUND_SLACK) {
                    violations += 1;
                }
                trials.push(vec![
                    cell(n),
                    r.to_string(),
                    deg.to_string(),
                    t.points.to_string(),
                    t.skipped.to_string(),
                    cell(t.hausdorff),
                    cell(d),
                    cell(ratio),
                ]);
            }
        }
    }
    stat(&mut report, "max_ratio", None, max_ratio);
    stat(&mut report, "trials", None, count as f64);
    stat(&mut report, "skipped_draws", None, skipped as f64);
    if exhausted > 0 {
        report.warnings.push(format!(
            "{exhausted} replications found no admissible cloud in {MAX_STABILITY_DRAWS} draws"
        ));
    }
    if count == 0 {
        report.verdicts.push(Verdict::new(
            "lipschitz_bound",
            Status::Inconclusive,
            f64::NAN,
            c,
            "no admissible trials",
        ));
    } else {
        report.verdicts.push(Verdict::check(
            "lipschitz_bound",
            violations == 0,
            max_ratio,
            c,
            format!("{violations} of {count} trials violate matching distance <= {c} * Hausdorff distance"),
        ));
        report.verdicts.push(Verdict::check(
            "finite_distance",
            infinite == 0,
            infinite as f64,
            0.0,
            "perturbation preserves cardinalities, so every matching distance is finite",
        ));
    }
    Ok(finish(report, vec![trials]))
}

fn perturb(x: &MarkedPointCloud, eps: f64, rng: &mut ChaCha8Rng) -> Result<MarkedPointCloud> {
    let points = x
        .points()
        .iter()
        .map(|p| {
            let d = uniform_in_ball(eps, x.dim(), rng);
            MarkedPoint::new(p.coords.iter().zip(d).map(|(a, b)| a + b).collect(), p.mark)
        })
        .collect();
    MarkedPointCloud::new(points, x.dim(), x.r0())
}

// ---- sample statistics ------------------------------------------------------

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance; 0 for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    }
}

fn central_moment(xs: &[f64], k: i32) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(k)).sum::<f64>() / xs.len() as f64
}

/// Moment coefficient of skewness `m3 / m2^{3/2}`.
pub fn skewness(xs: &[f64]) -> f64 {
    central_moment(xs, 3) / central_moment(xs, 2).powf(1.5)
}

/// `m4 / m2² − 3`.
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    central_moment(xs, 4) / central_moment(xs, 2).powi(2) - 3.0
}
