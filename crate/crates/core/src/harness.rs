//! Seeded Monte Carlo sweeps over `(n, p)` and their CSV/JSON output.
//!
//! Each trial draws from its own ChaCha8 stream seeded by
//! [`child_seed`]`(master_seed, n, trial_index)`, so records do not depend
//! on scheduling and parallel runs reproduce serial ones byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::all_triangle_fills;
use crate::complex::Complex2;
use crate::embed::{inequality_report_with, random_gaussian_embedding, triangle_distortion_with_fills, Certificate, Embedding};
use crate::error::{Error, Result};
use crate::numfmt::sig12;
use crate::spectra::{lambda_k, SpectralReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sample,
    Spectra,
    Fill,
    Embed,
    Certificate,
    Sweep,
}

impl Mode {
    fn spectra(self) -> bool {
        matches!(self, Mode::Spectra | Mode::Certificate | Mode::Sweep)
    }

    fn fills(self) -> bool {
        matches!(self, Mode::Fill | Mode::Embed | Mode::Certificate | Mode::Sweep)
    }

    fn embedding(self) -> bool {
        matches!(self, Mode::Embed | Mode::Sweep)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Face probability: explicit, or `p = n^(eps − 1)` clamped to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PSpec {
    P(f64),
    Eps(f64),
}

impl PSpec {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            PSpec::P(p) => p,
            PSpec::Eps(eps) => (n as f64).powf(eps - 1.0).clamp(0.0, 1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n_values: Vec<usize>,
    pub p_spec: PSpec,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Embedding dimension; defaults to `n`.
    #[serde(default)]
    pub ambient_dim: Option<usize>,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(mode: Mode, n_values: Vec<usize>, p_spec: PSpec) -> Self {
        Self {
            mode,
            n_values,
            p_spec,
            trials: 1,
            master_seed: 0,
            ambient_dim: None,
            output_path: None,
            format: OutputFormat::Csv,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() {
            return bad("no vertex counts given".into());
        }
        if let Some(&n) = self.n_values.iter().find(|&&n| n < 3) {
            return bad(format!("n = {n} < 3"));
        }
        match self.p_spec {
            PSpec::P(p) if !(0.0..=1.0).contains(&p) => return bad(format!("p = {p} not in [0, 1]")),
            PSpec::Eps(e) if !(e < 1.0) => return bad(format!("eps = {e} must be < 1")),
            _ => {}
        }
        if matches!(self.ambient_dim, Some(d) if d < 2) {
            return bad("ambient dimension must be at least 2".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One trial. Quantities the mode does not compute, or that are undefined
/// for the sampled complex, are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub seed: u64,
    pub trial_index: usize,
    pub n: usize,
    pub p: Option<f64>,
    pub face_count: usize,
    pub min_edge_degree: usize,
    pub lambda1: Option<f64>,
    pub normalized_lambda1: Option<f64>,
    pub betti1: Option<usize>,
    pub min_fill: Option<usize>,
    pub sum_fill_sq: Option<u64>,
    pub infeasible_count: Option<usize>,
    pub certificate: Option<f64>,
    pub triangle_distortion: Option<f64>,
    pub inequality_holds: Option<bool>,
}

pub const CSV_HEADER: &str = "seed,trial_index,n,p,face_count,min_edge_degree,lambda1,\
normalized_lambda1,betti1,min_fill,sum_fill_sq,infeasible_count,certificate,\
triangle_distortion,inequality_holds";

fn splitmix64(z: u64) -> u64 {
    let z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// SplitMix64 chained over `master_seed`, `n`, `trial_index`.
pub fn child_seed(master_seed: u64, n: usize, trial_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ n as u64) ^ trial_index as u64)
}

/// Computes the quantities of `mode` on one complex. `rng` is only used to
/// draw an embedding when the mode needs one and none is supplied.
pub fn evaluate(
    mode: Mode,
    x: &Complex2,
    ambient_dim: Option<usize>,
    embedding: Option<&Embedding>,
    rng: &mut ChaCha8Rng,
) -> Result<ExperimentRecord> {
    let n = x.n();
    let mut rec = ExperimentRecord {
        seed: 0,
        trial_index: 0,
        n,
        p: None,
        face_count: x.face_count(),
        min_edge_degree: x.min_edge_degree(),
        lambda1: None,
        normalized_lambda1: None,
        betti1: None,
        min_fill: None,
        sum_fill_sq: None,
        infeasible_count: None,
        certificate: None,
        triangle_distortion: None,
        inequality_holds: None,
    };

    if mode.spectra() {
        let s = SpectralReport::compute(x)?;
        rec.lambda1 = Some(s.lambda1);
        rec.normalized_lambda1 = s.normalized_lambda1;
        rec.betti1 = Some(s.betti1_real);
    } else if mode.embedding() {
        rec.lambda1 = Some(lambda_k(x, 1)?);
    }

    if !mode.fills() {
        return Ok(rec);
    }
    let fills = all_triangle_fills(x);
    rec.min_fill = fills.min;
    rec.sum_fill_sq = fills.sum_sq;
    rec.infeasible_count = Some(fills.infeasible);

    let lambda1 = rec.lambda1;
    if mode.spectra() {
        rec.certificate = Certificate::from_parts(x, lambda1.unwrap_or(0.0), &fills)
            .ok()
            .map(|c| c.value);
    }
    if mode.embedding() {
        let drawn;
        let emb = match embedding {
            Some(e) => e,
            None => {
                drawn = random_gaussian_embedding(n, ambient_dim.unwrap_or(n), rng)?;
                &drawn
            }
        };
        rec.triangle_distortion = triangle_distortion_with_fills(emb, &fills).ok();
        rec.inequality_holds = inequality_report_with(x, emb, &fills, lambda1.unwrap_or(0.0))
            .ok()
            .map(|r| r.holds);
    }
    Ok(rec)
}

fn run_trial(config: &ExperimentConfig, n: usize, trial_index: usize) -> Result<ExperimentRecord> {
    let seed = child_seed(config.master_seed, n, trial_index);
    let p = config.p_spec.resolve(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Complex2::sample_lm(n, p, &mut rng)?;
    let mut rec = evaluate(config.mode, &x, config.ambient_dim, None, &mut rng)?;
    rec.seed = seed;
    rec.trial_index = trial_index;
    rec.p = Some(p);
    Ok(rec)
}

/// Runs every `(n, trial)` of the configuration. Records come back ordered
/// by `n` (ascending, duplicates removed) and then trial index, whatever the
/// thread count.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let mut ns = config.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let tasks: Vec<(usize, usize)> =
        ns.iter().flat_map(|&n| (0..config.trials).map(move |t| (n, t))).collect();
    let work = || -> Result<Vec<_>> {
        tasks.par_iter().map(|&(n, t)| run_trial(config, n, t)).collect()
    };
    match config.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(work),
        None => work(),
    }
}

/// A single record for a given complex (and optionally a given embedding),
/// using `master_seed` for any random draws.
pub fn run_on_complex(
    config: &ExperimentConfig,
    x: &Complex2,
    embedding: Option<&Embedding>,
) -> Result<ExperimentRecord> {
    if let Some(e) = embedding {
        if e.n() != x.n() {
            return Err(Error::InvalidParameter(format!(
                "embedding has {} vertices, complex has {}",
                e.n(),
                x.n()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    let mut rec = evaluate(config.mode, x, config.ambient_dim, embedding, &mut rng)?;
    rec.seed = config.master_seed;
    Ok(rec)
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn float_cell(v: Option<f64>) -> String {
    v.map(sig12).unwrap_or_default()
}

pub fn records_to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let cells = [
            r.seed.to_string(),
            r.trial_index.to_string(),
            r.n.to_string(),
            float_cell(r.p),
            r.face_count.to_string(),
            r.min_edge_degree.to_string(),
            float_cell(r.lambda1),
            float_cell(r.normalized_lambda1),
            cell(r.betti1),
            cell(r.min_fill),
            cell(r.sum_fill_sq),
            cell(r.infeasible_count),
            float_cell(r.certificate),
            float_cell(r.triangle_distortion),
            cell(r.inequality_holds),
        ];
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn records_to_json(records: &[ExperimentRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)?)
}

pub fn render_records(records: &[ExperimentRecord], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(records_to_csv(records)),
        OutputFormat::Json => records_to_json(records),
    }
}

pub fn write_records(records: &[ExperimentRecord], path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    fs::write(path, render_records(records, format)?)?;
    Ok(())
}

pub fn read_records_json(path: impl AsRef<Path>) -> Result<Vec<ExperimentRecord>> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(mode: Mode, ns: &[usize], p: PSpec, trials: usize) -> ExperimentConfig {
        ExperimentConfig { trials, master_seed: 7, ..ExperimentConfig::new(mode, ns.to_vec(), p) }
    }

    #[test]
    fn validation() {
        assert!(config(Mode::Sample, &[5], PSpec::P(0.5), 0).validate().is_err());
        assert!(config(Mode::Sample, &[2], PSpec::P(0.5), 1).validate().is_err());
        assert!(config(Mode::Sample, &[5], PSpec::P(1.5), 1).validate().is_err());
        assert!(config(Mode::Sample, &[5], PSpec::Eps(1.0), 1).validate().is_err());
        assert!(config(Mode::Sample, &[], PSpec::P(0.5), 1).validate().is_err());
        assert!(config(Mode::Sample, &[5], PSpec::Eps(0.3), 1).validate().is_ok());
    }

    #[test]
    fn eps_resolution() {
        assert!((PSpec::Eps(0.3).resolve(10) - 10f64.powf(-0.7)).abs() < 1e-15);
        assert_eq!(PSpec::Eps(-5.0).resolve(3), 3f64.powf(-6.0));
        assert_eq!(PSpec::P(0.25).resolve(99), 0.25);
    }

    #[test]
    fn seeds_differ_across_trials_and_sizes() {
        let a = child_seed(1, 10, 0);
        assert_ne!(a, child_seed(1, 10, 1));
        assert_ne!(a, child_seed(1, 11, 0));
        assert_ne!(a, child_seed(2, 10, 0));
        assert_eq!(a, child_seed(1, 10, 0));
    }

    #[test]
    fn sample_mode_leaves_other_fields_null() {
        let recs = run_sweep(&config(Mode::Sample, &[6, 5], PSpec::P(0.5), 2)).unwrap();
        assert_eq!(recs.iter().map(|r| (r.n, r.trial_index)).collect::<Vec<_>>(), [(5, 0), (5, 1), (6, 0), (6, 1)]);
        for r in &recs {
            assert!(r.lambda1.is_none() && r.min_fill.is_none() && r.certificate.is_none());
            assert!(r.inequality_holds.is_none());
        }
    }

    #[test]
    fn sweep_mode_fills_everything_on_dense_complexes() {
        let recs = run_sweep(&config(Mode::Sweep, &[6], PSpec::P(1.0), 2)).unwrap();
        for r in &recs {
            assert_eq!(r.face_count, 20);
            assert!((r.lambda1.unwrap() - 6.0).abs() < 1e-8);
            assert_eq!(r.betti1, Some(0));
            assert_eq!(r.min_fill, Some(1));
            assert_eq!(r.sum_fill_sq, Some(20));
            assert!((r.certificate.unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
            assert!(r.triangle_distortion.unwrap() >= 1.0);
            assert_eq!(r.inequality_holds, Some(true));
        }
    }

    #[test]
    fn obstructions_become_nulls() {
        let recs = run_sweep(&config(Mode::Certificate, &[6], PSpec::P(0.0), 3)).unwrap();
        assert_eq!(recs.len(), 3);
        for r in &recs {
            assert_eq!(r.lambda1, Some(0.0));
            assert_eq!(r.infeasible_count, Some(20));
            assert_eq!(r.sum_fill_sq, None);
            assert_eq!(r.certificate, None);
        }
    }

    #[test]
    fn csv_shapes() {
        assert_eq!(records_to_csv(&[]), format!("{CSV_HEADER}\n"));
        let recs = run_sweep(&config(Mode::Spectra, &[5], PSpec::P(0.5), 1)).unwrap();
        let csv = records_to_csv(&recs);
        assert_eq!(csv.lines().count(), 2);
        let row: Vec<_> = csv.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), CSV_HEADER.split(',').count());
        assert_eq!(row[9], "");
    }

    #[test]
    fn json_round_trip() {
        let recs = run_sweep(&config(Mode::Sweep, &[5, 6], PSpec::P(0.7), 2)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_records(&recs, &path, OutputFormat::Json).unwrap();
        assert_eq!(read_records_json(&path).unwrap(), recs);
    }

    #[test]
    fn parallel_matches_serial() {
        let mut c = config(Mode::Fill, &[7, 8], PSpec::Eps(0.4), 4);
        c.threads = Some(1);
        let serial = records_to_csv(&run_sweep(&c).unwrap());
        c.threads = Some(3);
        let parallel = records_to_csv(&run_sweep(&c).unwrap());
        assert_eq!(serial, parallel);
    }

    #[test]
    fn config_json() {
        let c = ExperimentConfig::from_json(
            r#"{"mode":"fill","n_values":[8,10],"p_spec":{"eps":0.3},"trials":3,"master_seed":5}"#,
        )
        .unwrap();
        assert_eq!(c.mode, Mode::Fill);
        assert_eq!(c.p_spec, PSpec::Eps(0.3));
        assert_eq!(c.format, OutputFormat::Csv);
    }
}
