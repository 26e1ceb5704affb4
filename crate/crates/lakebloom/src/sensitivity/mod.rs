//! Variance-based global sensitivity analysis: Saltelli-sampled Sobol
//! indices (first-order and total-order) of cyanobacterial biomass over
//! the season, for physicochemical driver factors.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calendar;
use crate::io::ForcingSeries;
use crate::model::{LakeState, ModelParams, Variable};
use crate::simulate::{simulate, SimulationSettings};
use crate::{Error, Result};

pub mod lowdisc;

pub use lowdisc::{SobolSequence, MAX_DIMS};

/// Which model quantity a factor perturbs. Offsets add to forcing series;
/// the remaining transforms overwrite a background scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorTransform {
    /// Add to water temperature on every forcing sample. unit: degC
    TemperatureOffset,
    /// Add to epilimnion depth on every forcing sample. unit: m
    DepthOffset,
    /// Overwrite the water exchange rate. unit: m/day
    ExchangeRate,
    /// Overwrite the background light attenuation k_bg. unit: 1/m
    Turbidity,
    /// Overwrite the inflow phosphorus concentration. unit: mgP/L
    InflowPhosphorus,
    /// No effect; a dummy factor for estimator validation.
    Inert,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolFactor {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub transform: FactorTransform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Digitally-shifted Sobol sequence (falls back to uniform past
    /// [`MAX_DIMS`] dimensions).
    #[default]
    Sobol,
    /// Plain seeded-uniform sampling.
    Uniform,
}

/// Default factors: stratification depth and warming offsets over the
/// scenario-sweep ranges, exchange rate over its sweep range, turbidity
/// and inflow phosphorus 30% either side of the default lake.
fn default_factors() -> Vec<SobolFactor> {
    let f = |name: &str, lower: f64, upper: f64, transform: FactorTransform| SobolFactor {
        name: name.into(),
        lower,
        upper,
        transform,
    };
    vec![
        f("epilimnion_depth_offset", 0.0, 2.7, FactorTransform::DepthOffset),
        f("exchange_rate", 0.02, 0.12, FactorTransform::ExchangeRate),
        f("turbidity_k_bg", 0.35, 0.65, FactorTransform::Turbidity),
        f("p_inflow", 0.0, 0.03, FactorTransform::InflowPhosphorus),
        f("temperature_offset", 0.0, 3.5, FactorTransform::TemperatureOffset),
    ]
}

fn default_base_samples() -> usize {
    1024
}

fn default_bootstrap() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SobolDesign {
    pub factors: Vec<SobolFactor>,
    /// Base sample count N; the analysis runs N * (factors + 2) model
    /// evaluations. Must be a power of two, at least 64.
    pub base_samples: usize,
    pub seed: Option<u64>,
    /// Days at which indices are computed.
    pub output_days: Vec<f64>,
    pub generator: Generator,
    pub bootstrap_replicates: usize,
}

impl Default for SobolDesign {
    fn default() -> Self {
        SobolDesign {
            factors: default_factors(),
            base_samples: default_base_samples(),
            seed: None,
            output_days: calendar::monthly_output_days(),
            generator: Generator::default(),
            bootstrap_replicates: default_bootstrap(),
        }
    }
}

impl SobolDesign {
    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::InvalidSettings("sobol design needs at least one factor".into()));
        }
        for (i, f) in self.factors.iter().enumerate() {
            if !(f.lower.is_finite() && f.upper.is_finite() && f.lower <= f.upper) {
                return Err(Error::InvalidSettings(format!(
                    "factor {}: need finite lower <= upper, got [{}, {}]",
                    f.name, f.lower, f.upper
                )));
            }
            if self.factors[..i].iter().any(|prev| prev.name == f.name) {
                return Err(Error::InvalidSettings(format!("duplicate factor name {}", f.name)));
            }
        }
        if self.base_samples < 64 || !self.base_samples.is_power_of_two() {
            return Err(Error::InvalidSettings(format!(
                "base_samples must be a power of two >= 64, got {}",
                self.base_samples
            )));
        }
        if self.output_days.is_empty() || self.output_days.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidSettings("output_days must be non-empty and finite".into()));
        }
        if self.bootstrap_replicates < 2 {
            return Err(Error::InvalidSettings("bootstrap_replicates must be at least 2".into()));
        }
        Ok(())
    }

    pub fn effective_seed(&self, override_seed: Option<u64>) -> u64 {
        override_seed.or(self.seed).unwrap_or(42)
    }
}

/// The Saltelli evaluation plan: base matrices A and B plus the radial
/// matrices AB_i (A with column i replaced from B).
#[derive(Debug, Clone)]
pub struct SaltelliMatrices {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    /// ab[i][j] is row j of AB_i.
    pub ab: Vec<Vec<Vec<f64>>>,
    pub generator_used: Generator,
}

impl SaltelliMatrices {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn k(&self) -> usize {
        self.ab.len()
    }

    pub fn total_rows(&self) -> usize {
        self.n() * (self.k() + 2)
    }

    /// Row `j` of matrix `m` in the fixed evaluation order A, B, AB_0...
    pub fn row(&self, m: usize, j: usize) -> &[f64] {
        match m {
            0 => &self.a[j],
            1 => &self.b[j],
            i => &self.ab[i - 2][j],
        }
    }
}

/// Draw the Saltelli design: N points in 2k dimensions split into A and B,
/// plus the k radial matrices, all scaled into the factor boxes.
pub fn saltelli_sample(design: &SobolDesign, seed: u64) -> Result<SaltelliMatrices> {
    design.validate()?;
    let k = design.factors.len();
    let n = design.base_samples;
    let dims = 2 * k;

    let use_sobol = design.generator == Generator::Sobol && dims <= MAX_DIMS;
    let unit_points: Vec<Vec<f64>> = if use_sobol {
        SobolSequence::new(dims, seed).take(n)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..dims).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect()
    };

    let scale = |f: &SobolFactor, u: f64| f.lower + u * (f.upper - f.lower);
    let a: Vec<Vec<f64>> = unit_points
        .iter()
        .map(|p| design.factors.iter().zip(&p[..k]).map(|(f, &u)| scale(f, u)).collect())
        .collect();
    let b: Vec<Vec<f64>> = unit_points
        .iter()
        .map(|p| design.factors.iter().zip(&p[k..]).map(|(f, &u)| scale(f, u)).collect())
        .collect();
    let ab: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut row = a[j].clone();
                    row[i] = b[j][i];
                    row
                })
                .collect()
        })
        .collect();
    Ok(SaltelliMatrices {
        a,
        b,
        ab,
        generator_used: if use_sobol { Generator::Sobol } else { Generator::Uniform },
    })
}

/// First-order (Saltelli 2010) and total-order (Jansen) index estimates
/// from the three output blocks, normalized by the pooled A and B output
/// variance.
pub fn sobol_indices(f_a: &[f64], f_b: &[f64], f_ab: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = f_a.len();
    if n == 0 || f_b.len() != n || f_ab.iter().any(|col| col.len() != n) {
        return Err(Error::InvalidSettings("sobol outputs must be non-empty and equal-length".into()));
    }
    for v in f_a.iter().chain(f_b.iter()).chain(f_ab.iter().flatten()) {
        if !v.is_finite() {
            return Err(Error::Domain("non-finite model output in sensitivity analysis".into()));
        }
    }
    let nf = n as f64;
    let mean = (f_a.iter().sum::<f64>() + f_b.iter().sum::<f64>()) / (2.0 * nf);
    let variance = (f_a.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        + f_b.iter().map(|v| (v - mean).powi(2)).sum::<f64>())
        / (2.0 * nf);
    if variance <= 1e-14 * (1.0 + mean * mean) {
        return Err(Error::DegenerateOutputs);
    }
    let mut s1 = Vec::with_capacity(f_ab.len());
    let mut st = Vec::with_capacity(f_ab.len());
    for col in f_ab {
        let mut v_i = 0.0;
        let mut e_i = 0.0;
        for j in 0..n {
            v_i += f_b[j] * (col[j] - f_a[j]);
            e_i += (f_a[j] - col[j]).powi(2);
        }
        s1.push(v_i / nf / variance);
        st.push(e_i / (2.0 * nf) / variance);
    }
    Ok((s1, st))
}

/// Apply one factor row to the base configuration.
fn apply_row(
    factors: &[SobolFactor],
    row: &[f64],
    params: &ModelParams,
    forcing: &ForcingSeries,
) -> Result<(ModelParams, ForcingSeries)> {
    let mut params = params.clone();
    let mut dt = 0.0;
    let mut dz = 0.0;
    for (f, &value) in factors.iter().zip(row.iter()) {
        match f.transform {
            FactorTransform::TemperatureOffset => dt += value,
            FactorTransform::DepthOffset => dz += value,
            FactorTransform::ExchangeRate => params.background.exchange_rate = value,
            FactorTransform::Turbidity => params.background.k_bg = value,
            FactorTransform::InflowPhosphorus => params.background.p_in = value,
            FactorTransform::Inert => {}
        }
    }
    let forcing = if dt != 0.0 || dz != 0.0 {
        forcing.map_samples(|mut s| {
            s.temperature += dt;
            s.depth += dz;
            s
        })?
    } else {
        forcing.clone()
    };
    Ok((params, forcing))
}

/// Per-time-point, per-factor index estimates with bootstrap confidence
/// half-widths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SobolResult {
    pub design: SobolDesign,
    pub seed: u64,
    pub generator_used: Generator,
    pub times: Vec<f64>,
    pub factor_names: Vec<String>,
    /// Indexed [time][factor]; NaN where the output variance degenerated.
    pub s1: Vec<Vec<f64>>,
    pub st: Vec<Vec<f64>>,
    pub s1_ci: Vec<Vec<f64>>,
    pub st_ci: Vec<Vec<f64>>,
    /// Per-time flag: output variance too small to normalize.
    pub degenerate: Vec<bool>,
    /// Model evaluations attempted (N * (k + 2)).
    pub evaluations: usize,
    /// Base-sample indices dropped because some row of theirs failed.
    pub excluded_samples: Vec<usize>,
    /// Base samples actually used after exclusions.
    pub effective_n: usize,
}

/// Decide which base-sample indices survive row failures. Errors when
/// failures exceed the 1% row budget.
fn apply_failure_budget(failed_rows: &[usize], n: usize, k: usize) -> Result<Vec<usize>> {
    let total = n * (k + 2);
    let budget = total / 100;
    if failed_rows.len() > budget {
        let mut sample: Vec<usize> = failed_rows.iter().copied().take(8).collect();
        sample.sort_unstable();
        return Err(Error::SensitivityRowFailures {
            failed: failed_rows.len(),
            total,
            budget,
            sample,
        });
    }
    let mut excluded: Vec<usize> = failed_rows.iter().map(|r| r % n).collect();
    excluded.sort_unstable();
    excluded.dedup();
    Ok(excluded)
}

/// Run the full time-dependent analysis: evaluate every design row with
/// one simulation, extract cyanobacterial biomass at the output days, and
/// estimate S1/ST per day with bootstrap half-widths.
///
/// Deterministic for a given seed regardless of worker count.
pub fn time_dependent_sobol(
    params: &ModelParams,
    forcing: &ForcingSeries,
    initial: &LakeState,
    settings: &SimulationSettings,
    design: &SobolDesign,
    override_seed: Option<u64>,
) -> Result<SobolResult> {
    design.validate()?;
    params.validate()?;
    let seed = design.effective_seed(override_seed);
    let matrices = saltelli_sample(design, seed)?;
    let n = matrices.n();
    let k = matrices.k();
    let times = design.output_days.clone();

    let rows: Vec<(usize, usize)> = (0..k + 2)
        .flat_map(|m| (0..n).map(move |j| (m, j)))
        .collect();
    let outputs: Vec<Result<Vec<f64>>> = rows
        .par_iter()
        .map(|&(m, j)| {
            let row = matrices.row(m, j);
            let (p, f) = apply_row(&design.factors, row, params, forcing)?;
            let traj = simulate(&p, &f, initial, settings)?;
            times
                .iter()
                .map(|&t| {
                    traj.value_at(Variable::Cyano, t).ok_or(Error::ObservationOutsideSpan {
                        time: t,
                        start: settings.t0,
                        end: settings.t1,
                    })
                })
                .collect()
        })
        .collect();

    let failed_rows: Vec<usize> = outputs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.is_err())
        .map(|(i, _)| i)
        .collect();
    let excluded_samples = apply_failure_budget(&failed_rows, n, k)?;
    let keep: Vec<usize> = (0..n).filter(|j| !excluded_samples.contains(j)).collect();
    if keep.len() < 8 {
        return Err(Error::Domain(format!(
            "only {} usable base samples remain after exclusions",
            keep.len()
        )));
    }
    let effective_n = keep.len();

    // Output block for (matrix, time): values over surviving samples.
    let value = |m: usize, j: usize, t_idx: usize| -> f64 {
        match &outputs[m * n + j] {
            Ok(v) => v[t_idx],
            Err(_) => unreachable!("excluded above"),
        }
    };
    let block = |m: usize, t_idx: usize| -> Vec<f64> {
        keep.iter().map(|&j| value(m, j, t_idx)).collect()
    };

    // Bootstrap replicate index sets are drawn once, sequentially, so the
    // estimates do not depend on evaluation parallelism.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x626f_6f74);
    let replicates: Vec<Vec<usize>> = (0..design.bootstrap_replicates)
        .map(|_| (0..effective_n).map(|_| rng.gen_range(0..effective_n)).collect())
        .collect();

    let mut s1_all = Vec::with_capacity(times.len());
    let mut st_all = Vec::with_capacity(times.len());
    let mut s1_ci_all = Vec::with_capacity(times.len());
    let mut st_ci_all = Vec::with_capacity(times.len());
    let mut degenerate = Vec::with_capacity(times.len());

    for t_idx in 0..times.len() {
        let f_a = block(0, t_idx);
        let f_b = block(1, t_idx);
        let f_ab: Vec<Vec<f64>> = (0..k).map(|i| block(i + 2, t_idx)).collect();
        match sobol_indices(&f_a, &f_b, &f_ab) {
            Ok((s1, st)) => {
                let resample = |src: &[f64], idx: &[usize]| -> Vec<f64> {
                    idx.iter().map(|&j| src[j]).collect()
                };
                let mut s1_reps: Vec<Vec<f64>> = Vec::with_capacity(replicates.len());
                let mut st_reps: Vec<Vec<f64>> = Vec::with_capacity(replicates.len());
                for idx in &replicates {
                    let ra = resample(&f_a, idx);
                    let rb = resample(&f_b, idx);
                    let rab: Vec<Vec<f64>> = f_ab.iter().map(|col| resample(col, idx)).collect();
                    if let Ok((rs1, rst)) = sobol_indices(&ra, &rb, &rab) {
                        s1_reps.push(rs1);
                        st_reps.push(rst);
                    }
                }
                let half_width = |reps: &[Vec<f64>], i: usize| -> f64 {
                    if reps.len() < 2 {
                        return f64::NAN;
                    }
                    let vals: Vec<f64> = reps.iter().map(|r| r[i]).collect();
                    let m = vals.iter().sum::<f64>() / vals.len() as f64;
                    let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
                    1.96 * var.sqrt()
                };
                s1_ci_all.push((0..k).map(|i| half_width(&s1_reps, i)).collect());
                st_ci_all.push((0..k).map(|i| half_width(&st_reps, i)).collect());
                s1_all.push(s1);
                st_all.push(st);
                degenerate.push(false);
            }
            Err(Error::DegenerateOutputs) => {
                s1_all.push(vec![f64::NAN; k]);
                st_all.push(vec![f64::NAN; k]);
                s1_ci_all.push(vec![f64::NAN; k]);
                st_ci_all.push(vec![f64::NAN; k]);
                degenerate.push(true);
            }
            Err(e) => return Err(e),
        }
    }

    Ok(SobolResult {
        design: design.clone(),
        seed,
        generator_used: matrices.generator_used,
        times,
        factor_names: design.factors.iter().map(|f| f.name.clone()).collect(),
        s1: s1_all,
        st: st_all,
        s1_ci: s1_ci_all,
        st_ci: st_ci_all,
        degenerate,
        evaluations: n * (k + 2),
        excluded_samples,
        effective_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain_design(k: usize, n: usize, transforms: &[FactorTransform]) -> SobolDesign {
        SobolDesign {
            factors: (0..k)
                .map(|i| SobolFactor {
                    name: format!("x{i}"),
                    lower: 0.0,
                    upper: 1.0,
                    transform: transforms.get(i).copied().unwrap_or(FactorTransform::Inert),
                })
                .collect(),
            base_samples: n,
            seed: Some(1),
            output_days: vec![1.0],
            generator: Generator::Sobol,
            bootstrap_replicates: 50,
        }
    }

    fn evaluate_all<F: Fn(&[f64]) -> f64>(
        m: &SaltelliMatrices,
        f: F,
    ) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
        let f_a: Vec<f64> = m.a.iter().map(|r| f(r)).collect();
        let f_b: Vec<f64> = m.b.iter().map(|r| f(r)).collect();
        let f_ab: Vec<Vec<f64>> = m.ab.iter().map(|c| c.iter().map(|r| f(r)).collect()).collect();
        (f_a, f_b, f_ab)
    }

    #[test]
    fn row_count_is_n_times_k_plus_2() {
        let design = plain_design(1, 64, &[]);
        let m = saltelli_sample(&design, 1).unwrap();
        assert_eq!(m.total_rows(), 192);
        assert_eq!(m.generator_used, Generator::Sobol);
    }

    #[test]
    fn degenerate_bounds_collapse_all_rows() {
        let mut design = plain_design(2, 64, &[]);
        design.factors[0].lower = 0.7;
        design.factors[0].upper = 0.7;
        design.factors[1].lower = 0.3;
        design.factors[1].upper = 0.3;
        let m = saltelli_sample(&design, 1).unwrap();
        for mat in [0usize, 1] {
            for j in 0..m.n() {
                assert_eq!(m.row(mat, j), &[0.7, 0.3]);
            }
        }
    }

    #[test]
    fn marginal_means_are_stratified() {
        let design = SobolDesign {
            factors: vec![
                SobolFactor {
                    name: "wide".into(),
                    lower: -3.0,
                    upper: 7.0,
                    transform: FactorTransform::Inert,
                },
                SobolFactor {
                    name: "narrow".into(),
                    lower: 0.4,
                    upper: 0.6,
                    transform: FactorTransform::Inert,
                },
            ],
            base_samples: 256,
            ..Default::default()
        };
        let m = saltelli_sample(&design, 11).unwrap();
        let tol = |lo: f64, hi: f64| 3.0 * (hi - lo) / (design.base_samples as f64).sqrt();
        for (col, (lo, hi, mid)) in [(0usize, (-3.0, 7.0, 2.0)), (1, (0.4, 0.6, 0.5))] {
            for mat in [&m.a, &m.b] {
                let mean = mat.iter().map(|r| r[col]).sum::<f64>() / mat.len() as f64;
                assert!((mean - mid).abs() < tol(lo, hi), "col {col}: mean {mean}");
            }
        }
    }

    #[test]
    fn additive_symmetric_model_splits_evenly() {
        let design = plain_design(2, 2048, &[]);
        let m = saltelli_sample(&design, 3).unwrap();
        let (f_a, f_b, f_ab) = evaluate_all(&m, |x| x[0] + x[1]);
        let (s1, st) = sobol_indices(&f_a, &f_b, &f_ab).unwrap();
        for v in s1.iter().chain(st.iter()) {
            assert!((v - 0.5).abs() < 0.05, "{s1:?} {st:?}");
        }
    }

    #[test]
    fn ishigami_matches_the_analytic_decomposition() {
        let design = plain_design(3, 1 << 14, &[]);
        let m = saltelli_sample(&design, 0).unwrap();
        let pi = std::f64::consts::PI;
        let (a, b) = (7.0, 0.1);
        let ishigami = |x: &[f64]| {
            let map = |u: f64| -pi + 2.0 * pi * u;
            let (x1, x2, x3) = (map(x[0]), map(x[1]), map(x[2]));
            x1.sin() + a * x2.sin().powi(2) + b * x3.powi(4) * x1.sin()
        };
        let (f_a, f_b, f_ab) = evaluate_all(&m, ishigami);
        let (s1, st) = sobol_indices(&f_a, &f_b, &f_ab).unwrap();
        let s1_expected = [0.3139, 0.4424, 0.0];
        let st_expected = [0.5576, 0.4424, 0.2437];
        for i in 0..3 {
            assert!((s1[i] - s1_expected[i]).abs() < 0.05, "S1[{i}] = {}", s1[i]);
            assert!((st[i] - st_expected[i]).abs() < 0.05, "ST[{i}] = {}", st[i]);
        }
        assert!(s1.iter().sum::<f64>() <= 1.05, "sum S1 = {}", s1.iter().sum::<f64>());
        for i in 0..3 {
            assert!(st[i] >= s1[i] - 0.02, "ST >= S1 violated at {i}");
        }
    }

    #[test]
    fn dummy_factor_scores_exactly_zero() {
        let design = plain_design(3, 256, &[]);
        let m = saltelli_sample(&design, 9).unwrap();
        let (f_a, f_b, f_ab) = evaluate_all(&m, |x| 3.0 * x[0] + x[1] * x[1]);
        let (s1, st) = sobol_indices(&f_a, &f_b, &f_ab).unwrap();
        assert_eq!(s1[2], 0.0);
        assert_eq!(st[2], 0.0);
        assert!(st[0] > 0.5);
    }

    #[test]
    fn constant_model_is_degenerate() {
        let design = plain_design(2, 64, &[]);
        let m = saltelli_sample(&design, 2).unwrap();
        let (f_a, f_b, f_ab) = evaluate_all(&m, |_| 4.25);
        assert!(matches!(
            sobol_indices(&f_a, &f_b, &f_ab).unwrap_err(),
            Error::DegenerateOutputs
        ));
    }

    #[test]
    fn failure_budget_excludes_within_and_aborts_beyond() {
        // N=100, k=2: 400 rows, budget 4.
        let excluded = apply_failure_budget(&[5, 105, 205], 100, 2).unwrap();
        assert_eq!(excluded, vec![5]);
        let excluded = apply_failure_budget(&[3, 7, 103, 210], 100, 2).unwrap();
        assert_eq!(excluded, vec![3, 7, 10]);
        let err = apply_failure_budget(&[1, 2, 3, 4, 5], 100, 2).unwrap_err();
        assert!(matches!(err, Error::SensitivityRowFailures { failed: 5, budget: 4, .. }), "{err}");
    }

    #[test]
    fn design_validation_rejects_bad_inputs() {
        let mut d = SobolDesign::default();
        d.base_samples = 100;
        assert!(d.validate().is_err());
        d.base_samples = 32;
        assert!(d.validate().is_err());
        d = SobolDesign::default();
        d.factors[1].name = d.factors[0].name.clone();
        assert!(d.validate().is_err());
        d = SobolDesign::default();
        d.factors[0].lower = 5.0;
        d.factors[0].upper = 1.0;
        assert!(d.validate().is_err());
        assert!(SobolDesign::default().validate().is_ok());
    }

    #[test]
    fn high_dimension_falls_back_to_uniform() {
        let design = plain_design(8, 64, &[]); // 16 dims > table size
        let m = saltelli_sample(&design, 1).unwrap();
        assert_eq!(m.generator_used, Generator::Uniform);
        assert_eq!(m.total_rows(), 64 * 10);
    }
}
