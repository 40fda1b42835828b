use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{Command, ExperimentConfig};
use super::report::{Metrics, Report, TrialRecord};
use crate::determinant::{
    compare_determinants, continuity_probe, write_comparison_rows, ProbeNorm, COMPARISON_HEADER,
};
use crate::error::Result;
use crate::factorization::{ab_ba_spectrum_check, build_diagonal_factorization, build_s, diagram_defect};
use crate::lorentz::{lorentz_quasinorm, Exponent, LorentzParams};
use crate::matrix::DenseMatrix;
use crate::nuclear::{
    assemble, nuclear_trace, quasinorm_estimate, random_rep, Decay, EstimatorSettings, NuclearRep, QuasinormKind,
};
use crate::sampling::{complex_gaussian_matrix, derive_seed, rng_from_seed};
use crate::spectral::{eigenvalues, spectral_trace, spectrum_lorentz_norm};

/// Sizes visited by `weyl-scan`.
pub const WEYL_LADDER: [usize; 7] = [16, 32, 64, 128, 256, 512, 1024];
/// Radii `j / (Z_GRID_RADII - 1)` of the `det-compare` grid.
pub const Z_GRID_RADII: usize = 8;
/// Equally spaced angles of the `det-compare` grid.
pub const Z_GRID_ANGLES: usize = 8;

const SERIES_TAIL: f64 = 1e-14;
const DIAGRAM_TOL: f64 = 1e-12;

/// A finished run: the JSON report and, for `det-compare`, the CSV table.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub csv: Option<String>,
}

impl RunOutput {
    /// Writes the outputs under `out`. For `det-compare`, the CSV goes to `out`
    /// and the report next to it with the extension `summary.json`.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        match &self.csv {
            Some(csv) => {
                let summary = out.with_extension("summary.json");
                fs::write(out, csv)?;
                fs::write(&summary, self.report.to_json())?;
                Ok(vec![out.to_path_buf(), summary])
            }
            None => {
                fs::write(out, self.report.to_json())?;
                Ok(vec![out.to_path_buf()])
            }
        }
    }
}

/// Validates `cfg` and runs its command.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    Ok(match cfg.command {
        Command::TraceCheck => RunOutput { report: trace_check(cfg)?, csv: None },
        Command::DetCompare => {
            let (report, csv) = det_compare(cfg)?;
            RunOutput { report, csv: Some(csv) }
        }
        Command::WeylScan => RunOutput { report: weyl_scan(cfg)?, csv: None },
        Command::Continuity => RunOutput { report: continuity(cfg)?, csv: None },
        Command::FactorCheck => RunOutput { report: factor_check(cfg)?, csv: None },
    })
}

fn trial_seeds(cfg: &ExperimentConfig) -> Vec<(usize, u64)> {
    (0..cfg.trials).map(|i| (i, derive_seed(cfg.seed, i as u64))).collect()
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn max_metric(results: &[TrialRecord], key: &str) -> f64 {
    results.iter().filter_map(|r| r.get_f64(key)).fold(0.0, f64::max)
}

fn decay(cfg: &ExperimentConfig) -> Decay {
    Decay::Lorentz { r: cfg.r, s: cfg.s }
}

/// Nuclear trace against the eigenvalue sum on random representations.
/// A trial passes when `|difference| <= tol (1 + |nuclear trace|)`.
pub fn trace_check(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let results: Vec<TrialRecord> = trial_seeds(cfg)
        .into_par_iter()
        .map(|(i, seed)| trace_trial(cfg, i, seed).unwrap_or_else(|e| TrialRecord::failed(i, seed, e)))
        .collect();
    let mut summary = Metrics::new();
    summary.insert("max_abs_diff".into(), max_metric(&results, "abs_diff").into());
    summary.insert("max_scaled_diff".into(), max_metric(&results, "scaled_diff").into());
    Ok(Report::new(cfg, results, summary, true))
}

fn trace_trial(cfg: &ExperimentConfig, i: usize, seed: u64) -> Result<TrialRecord> {
    let rep = random_rep(cfg.dim, cfg.rank, decay(cfg), seed)?;
    let nt = nuclear_trace(&rep);
    let spectrum = eigenvalues(&assemble(&rep))?;
    let st = spectral_trace(&spectrum);
    let diff = (nt - st).norm();
    let scale = 1.0 + nt.norm();
    let coefficient_norm = lorentz_quasinorm(rep.lambda(), LorentzParams { p: cfg.r, q: Exponent::Finite(cfg.s) })?;
    Ok(TrialRecord::new(i, seed)
        .metric("nuclear_trace", complex_json(nt))
        .metric("spectral_trace", complex_json(st))
        .metric("abs_diff", diff)
        .metric("scaled_diff", diff / scale)
        .metric("coefficient_norm", coefficient_norm)
        .passed(diff <= cfg.tol * scale))
}

/// The evaluation points `r e^{i theta}` of `det-compare`, radii in `[0, 1]`.
pub fn z_grid() -> Vec<Complex64> {
    let mut zs = Vec::with_capacity(Z_GRID_RADII * Z_GRID_ANGLES);
    for j in 0..Z_GRID_RADII {
        let radius = j as f64 / (Z_GRID_RADII - 1) as f64;
        for k in 0..Z_GRID_ANGLES {
            zs.push(Complex64::from_polar(radius, TAU * k as f64 / Z_GRID_ANGLES as f64));
        }
    }
    zs
}

/// Three-way determinant comparison on random matrices of operator norm 1/2.
/// Returns the report and the CSV table of every evaluation.
pub fn det_compare(cfg: &ExperimentConfig) -> Result<(Report, String)> {
    cfg.validate()?;
    let zs = z_grid();
    let trials: Vec<(TrialRecord, String)> = trial_seeds(cfg)
        .into_par_iter()
        .map(|(i, seed)| {
            det_trial(cfg, &zs, i, seed).unwrap_or_else(|e| (TrialRecord::failed(i, seed, e), String::new()))
        })
        .collect();
    let mut csv = format!("{COMPARISON_HEADER}\n");
    let mut results = Vec::with_capacity(trials.len());
    for (record, rows) in trials {
        csv.push_str(&rows);
        results.push(record);
    }
    let mut summary = Metrics::new();
    summary.insert("max_pairwise_diff".into(), max_metric(&results, "max_pairwise_diff").into());
    summary.insert("points_per_trial".into(), zs.len().into());
    let skipped: u64 = results.iter().filter_map(|r| r.metrics.get("series_skipped")?.as_u64()).sum();
    summary.insert("series_skipped".into(), skipped.into());
    Ok((Report::new(cfg, results, summary, true), csv))
}

fn det_trial(cfg: &ExperimentConfig, zs: &[Complex64], i: usize, seed: u64) -> Result<(TrialRecord, String)> {
    let mut rng = rng_from_seed(seed);
    let m = DenseMatrix::new(complex_gaussian_matrix(&mut rng, cfg.dim, cfg.dim))?.with_operator_norm(0.5);
    let spectrum = eigenvalues(&m)?;
    let rows = compare_determinants(&m, &spectrum, zs, SERIES_TAIL)?;
    let worst = rows.iter().map(|r| r.max_pairwise_diff).fold(0.0, f64::max);
    let skipped = rows.iter().filter(|r| r.series.is_none()).count();
    let mut csv = String::new();
    write_comparison_rows(&mut csv, i, &rows);
    let record = TrialRecord::new(i, seed)
        .metric("max_pairwise_diff", worst)
        .metric("series_skipped", skipped)
        .metric("spectral_radius", spectrum.spectral_radius())
        .passed(worst <= cfg.tol);
    Ok((record, csv))
}

/// Spectral quasinorm over representation quasinorm along [`WEYL_LADDER`].
///
/// Each rung has one diagonal operator with coefficients of `(r, s)` decay
/// and `cfg.trials` random representations in dimension `min(n, cfg.dim)`.
/// The run passes when the largest ratio stays within `cfg.tol` times the
/// largest ratio at the first rung.
pub fn weyl_scan(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let per_rung = cfg.trials + 1;
    let jobs: Vec<(usize, usize, usize)> = WEYL_LADDER
        .iter()
        .enumerate()
        .flat_map(|(rung, &n)| (0..per_rung).map(move |j| (rung * per_rung + j, n, j)))
        .collect();
    let mut results: Vec<TrialRecord> = jobs
        .into_par_iter()
        .map(|(i, n, j)| {
            let seed = derive_seed(cfg.seed, i as u64);
            weyl_trial(cfg, i, seed, n, j == 0)
                .unwrap_or_else(|e| TrialRecord::failed(i, seed, e).metric("n", n))
        })
        .collect();

    let rung_max = |n: usize| {
        results
            .iter()
            .filter(|r| r.metrics.get("n").and_then(Value::as_u64) == Some(n as u64))
            .filter_map(|r| r.get_f64("ratio"))
            .fold(0.0, f64::max)
    };
    let base = rung_max(WEYL_LADDER[0]);
    let ceiling = cfg.tol * base;
    let by_n: Vec<Value> = WEYL_LADDER.iter().map(|&n| json!([n, rung_max(n)])).collect();
    let overall = max_metric(&results, "ratio");
    for r in &mut results {
        if r.error.is_none() {
            r.pass = r.get_f64("ratio").is_some_and(|x| x <= ceiling);
        }
    }
    let mut summary = Metrics::new();
    summary.insert("max_ratio_by_n".into(), Value::Array(by_n));
    summary.insert("base_ratio".into(), base.into());
    summary.insert("ceiling".into(), ceiling.into());
    summary.insert("max_ratio".into(), overall.into());
    Ok(Report::new(cfg, results, summary, overall <= ceiling))
}

fn weyl_trial(cfg: &ExperimentConfig, i: usize, seed: u64, n: usize, diagonal: bool) -> Result<TrialRecord> {
    let (rep, t) = if diagonal {
        let lambda: Vec<Complex64> = decay(cfg).coefficients(n).into_iter().map(Complex64::from).collect();
        (NuclearRep::diagonal(&lambda)?, DenseMatrix::diagonal(&lambda))
    } else {
        let rep = random_rep(n.min(cfg.dim), n, decay(cfg), seed)?;
        let t = assemble(&rep);
        (rep, t)
    };
    let spectrum = eigenvalues(&t)?;
    let spectral = spectrum_lorentz_norm(&spectrum, LorentzParams { p: 1.0, q: Exponent::Finite(cfg.s) })?;
    let kind = QuasinormKind::LorentzLapreste { r: cfg.r, s: cfg.s, p: cfg.p };
    let settings = EstimatorSettings { trials: 16, seed: derive_seed(seed, 2) };
    let est = quasinorm_estimate(&rep, kind, settings)?;
    let ratio = if est.value > 0.0 { spectral / est.value } else { 0.0 };
    Ok(TrialRecord::new(i, seed)
        .metric("n", n)
        .metric("family", if diagonal { "diagonal" } else { "random" })
        .metric("dim", t.order())
        .metric("spectral_norm", spectral)
        .metric("quasinorm", est.value)
        .metric("certified", est.certified)
        .metric("ratio", ratio))
}

/// Lipschitz quotient of `u -> det(1 - u)` on pairs in the trace-norm ball of radius `r0`.
///
/// Trial 0 is the pair `u = v`, trial 1 a rank-one matrix against zero, and
/// the rest random pairs, half of them small perturbations of each other.
pub fn continuity(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let results: Vec<TrialRecord> = trial_seeds(cfg)
        .into_par_iter()
        .map(|(i, seed)| continuity_trial(cfg, i, seed).unwrap_or_else(|e| TrialRecord::failed(i, seed, e)))
        .collect();
    let (c1, c0) = crate::determinant::continuity_ceiling(cfg.r0);
    let mut summary = Metrics::new();
    summary.insert("max_ratio".into(), max_metric(&results, "ratio").into());
    summary.insert("c0".into(), c0.into());
    summary.insert("c1".into(), c1.into());
    summary.insert("norm".into(), "trace".into());
    Ok(Report::new(cfg, results, summary, true))
}

fn with_trace_norm(m: DenseMatrix, target: f64) -> DenseMatrix {
    let n = m.trace_norm();
    if n == 0.0 {
        m
    } else {
        m.scaled(Complex64::from(target / n))
    }
}

fn continuity_pair(cfg: &ExperimentConfig, i: usize, seed: u64) -> Result<(DenseMatrix, DenseMatrix)> {
    let d = cfg.dim;
    let r0 = cfg.r0;
    let mut rng = rng_from_seed(seed);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng, radius: f64| -> Result<DenseMatrix> {
        Ok(with_trace_norm(DenseMatrix::new(complex_gaussian_matrix(rng, d, d))?, radius))
    };
    Ok(match i {
        0 => {
            let u = draw(&mut rng, r0 * 0.5)?;
            (u.clone(), u)
        }
        1 => {
            let mut e = vec![Complex64::ZERO; d];
            e[0] = Complex64::from(r0 * 1e-3);
            (DenseMatrix::diagonal(&e), DenseMatrix::zeros(d))
        }
        _ => {
            let radius = r0 * rng.random_range(0.05..=1.0);
            let u = draw(&mut rng, radius)?;
            let v = if rng.random_bool(0.5) {
                let radius = r0 * rng.random_range(0.05..=1.0);
                draw(&mut rng, radius)?
            } else {
                let delta = 10f64.powf(-rng.random_range(1.0..6.0)) * r0;
                let v = u.add(&draw(&mut rng, delta)?);
                if v.trace_norm() > r0 {
                    with_trace_norm(v, r0)
                } else {
                    v
                }
            };
            (u, v)
        }
    })
}

fn continuity_trial(cfg: &ExperimentConfig, i: usize, seed: u64) -> Result<TrialRecord> {
    let (u, v) = continuity_pair(cfg, i, seed)?;
    let rep = continuity_probe(&u, &v, cfg.r0, ProbeNorm::Trace)?;
    Ok(TrialRecord::new(i, seed)
        .metric("ratio", rep.ratio)
        .metric("ceiling", rep.ceiling)
        .metric("distance", rep.distance)
        .passed(rep.ratio <= rep.ceiling))
}

/// Diagonal factorization through `l_p` on random representations: the diagram
/// commutes, `trace S` matches the nuclear trace within `cfg.tol` (relative),
/// and `Delta A` / `V` have matching nonzero spectra in both orders.
pub fn factor_check(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let results: Vec<TrialRecord> = trial_seeds(cfg)
        .into_par_iter()
        .map(|(i, seed)| factor_trial(cfg, i, seed).unwrap_or_else(|e| TrialRecord::failed(i, seed, e)))
        .collect();
    let mut summary = Metrics::new();
    summary.insert("max_diagram_defect".into(), max_metric(&results, "diagram_defect").into());
    summary.insert("max_trace_diff".into(), max_metric(&results, "trace_diff").into());
    summary.insert("max_ab_ba_diff".into(), max_metric(&results, "ab_ba_diff").into());
    Ok(Report::new(cfg, results, summary, true))
}

fn factor_trial(cfg: &ExperimentConfig, i: usize, seed: u64) -> Result<TrialRecord> {
    let rep = random_rep(cfg.dim, cfg.rank, decay(cfg), seed)?;
    let t = assemble(&rep);
    let f = build_diagonal_factorization(&rep, cfg.p)?;
    let defect = diagram_defect(&f, &t);
    let nt = nuclear_trace(&rep);
    let trace_diff = (build_s(&f).trace() - nt).norm();
    let ab_ba = ab_ba_spectrum_check(&f.delta_a(), &f.v)?;
    let trace_ok = trace_diff <= cfg.tol * nt.norm().max(1.0);
    Ok(TrialRecord::new(i, seed)
        .metric("diagram_defect", defect)
        .metric("trace_diff", trace_diff)
        .metric("ab_ba_diff", ab_ba.max_diff)
        .metric("ab_ba_matched", ab_ba.matched_count)
        .metric("gamma_upper", f.gamma_upper)
        .metric("certified", f.certified)
        .passed(defect <= DIAGRAM_TOL && trace_ok && ab_ba.pass))
}
