//! Sparse Gaussian regression instances.
//!
//! A design `H` has iid standard normal entries; its columns are normalized
//! to unit length to give `X`. The ground truth is drawn in unscaled
//! coordinates and mapped to scaled ones with `beta_scaled[i] =
//! ||H_i|| / sqrt(n) * beta_unscaled[i]`, so that `X beta_scaled = H beta_unscaled / sqrt(n)`.
//!
//! Columns are filled column-major from one keystream. A design of width
//! `p` is therefore a prefix of any wider design drawn from the same seed,
//! which is what the nested sweeps rely on.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, col};
use crate::rng::{stream_rng, Stream};

#[derive(Clone, Debug, PartialEq)]
pub struct RawDesign {
    pub entries: DMatrix<f64>,
}

impl RawDesign {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn p(&self) -> usize {
        self.entries.ncols()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedDesign {
    pub columns: DMatrix<f64>,
    pub column_norms: Vec<f64>,
}

impl NormalizedDesign {
    pub fn n(&self) -> usize {
        self.columns.nrows()
    }

    pub fn p(&self) -> usize {
        self.columns.ncols()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        col(&self.columns, j)
    }

    /// First `p` columns.
    pub fn prefix(&self, p: usize) -> NormalizedDesign {
        assert!(p <= self.p());
        NormalizedDesign {
            columns: self.columns.columns(0, p).into_owned(),
            column_norms: self.column_norms[..p].to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub s: usize,
    pub beta_unscaled: Vec<f64>,
    pub beta_scaled: Vec<f64>,
    pub beta_norm: f64,
}

impl GroundTruth {
    /// The all-zero truth (`s = 0`).
    pub fn zero(p: usize) -> Self {
        GroundTruth {
            s: 0,
            beta_unscaled: vec![0.0; p],
            beta_scaled: vec![0.0; p],
            beta_norm: 0.0,
        }
    }

    fn prefix(&self, p: usize) -> Self {
        GroundTruth {
            s: self.s,
            beta_unscaled: self.beta_unscaled[..p].to_vec(),
            beta_scaled: self.beta_scaled[..p].to_vec(),
            beta_norm: self.beta_norm,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseMode {
    /// Entries iid `N(0, sigma^2 / n)`; `level` is sigma.
    GaussianSigma,
    /// Gaussian direction rescaled so that `||eps||_2 = level`.
    ExactNorm,
}

impl NoiseMode {
    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::GaussianSigma => "gaussian-sigma",
            NoiseMode::ExactNorm => "exact-norm",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseVector {
    pub values: Vec<f64>,
    pub mode: NoiseMode,
    pub level: f64,
}

impl NoiseVector {
    pub fn zero(n: usize) -> Self {
        NoiseVector {
            values: vec![0.0; n],
            mode: NoiseMode::ExactNorm,
            level: 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        linalg::norm2(&self.values)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    pub design: NormalizedDesign,
    pub truth: GroundTruth,
    pub noise: NoiseVector,
    pub observations: Vec<f64>,
    pub n: usize,
    pub p: usize,
    pub s: usize,
}

impl TrainingSet {
    /// The instance restricted to the first `p` features. The truth support
    /// must fit inside the prefix.
    pub fn prefix(&self, p: usize) -> Result<TrainingSet> {
        if p > self.p || p < self.s.max(1) {
            return Err(Error::InvalidParameter(format!(
                "prefix width {p} outside {}..={}",
                self.s.max(1),
                self.p
            )));
        }
        assemble_training(self.design.prefix(p), self.truth.prefix(p), self.noise.clone())
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.design.columns
    }
}

pub fn sample_design(n: usize, p: usize, seed: u64) -> RawDesign {
    let mut rng = stream_rng(seed, Stream::Design);
    let entries = DMatrix::from_iterator(n, p, (0..n * p).map(|_| rng.sample::<f64, _>(StandardNormal)));
    RawDesign { entries }
}

pub fn normalize(raw: RawDesign) -> Result<NormalizedDesign> {
    let mut columns = raw.entries;
    let n = columns.nrows();
    let mut column_norms = Vec::with_capacity(columns.ncols());
    for (j, c) in columns.as_mut_slice().chunks_exact_mut(n.max(1)).enumerate() {
        let norm = linalg::norm2(c);
        if !(norm >= 1e-300) {
            return Err(Error::ZeroColumn { column: j });
        }
        for v in c.iter_mut() {
            *v /= norm;
        }
        column_norms.push(norm);
    }
    Ok(NormalizedDesign { columns, column_norms })
}

/// Draws `beta_unscaled` uniformly on the radius-`beta_norm` sphere of the
/// first `s` coordinates and maps it to scaled coordinates.
pub fn make_ground_truth(n: usize, s: usize, beta_norm: f64, column_norms: &[f64], seed: u64) -> Result<GroundTruth> {
    let p = column_norms.len();
    if s < 1 || s > p {
        return Err(Error::BadSparsity { s, p });
    }
    if !(beta_norm > 0.0 && beta_norm.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "beta_norm must be positive, got {beta_norm}"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Truth);
    let mut dir = gaussian_direction(&mut rng, s);
    for v in &mut dir {
        *v *= beta_norm;
    }
    let mut beta_unscaled = vec![0.0; p];
    beta_unscaled[..s].copy_from_slice(&dir);
    let sqrt_n = (n as f64).sqrt();
    let beta_scaled = beta_unscaled
        .iter()
        .zip(column_norms)
        .map(|(b, c)| c / sqrt_n * b)
        .collect();
    Ok(GroundTruth {
        s,
        beta_unscaled,
        beta_scaled,
        beta_norm,
    })
}

pub fn make_noise(n: usize, mode: NoiseMode, level: f64, seed: u64) -> Result<NoiseVector> {
    if !(level > 0.0 && level.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be positive, got {level}"
        )));
    }
    let mut rng = stream_rng(seed, Stream::Noise);
    let values = match mode {
        NoiseMode::GaussianSigma => {
            let sd = level / (n as f64).sqrt();
            (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
        }
        NoiseMode::ExactNorm => {
            let mut v = gaussian_direction(&mut rng, n);
            for x in &mut v {
                *x *= level;
            }
            v
        }
    };
    Ok(NoiseVector { values, mode, level })
}

fn gaussian_direction<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = linalg::norm2(&v);
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn assemble_training(design: NormalizedDesign, truth: GroundTruth, noise: NoiseVector) -> Result<TrainingSet> {
    let (n, p) = (design.n(), design.p());
    if truth.beta_scaled.len() != p || truth.beta_unscaled.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "truth has length {}, design has {p} columns",
            truth.beta_scaled.len()
        )));
    }
    if noise.values.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "noise has length {}, design has {n} rows",
            noise.values.len()
        )));
    }
    let mut observations = linalg::mat_vec(&design.columns, &truth.beta_scaled);
    for (y, e) in observations.iter_mut().zip(&noise.values) {
        *y += e;
    }
    let s = truth.s;
    Ok(TrainingSet {
        design,
        truth,
        noise,
        observations,
        n,
        p,
        s,
    })
}

/// Parameters of one generated instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceSpec {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub beta_norm: f64,
    pub noise_mode: NoiseMode,
    pub noise_level: f64,
}

impl InstanceSpec {
    /// Design, truth and noise from the three streams of `seed`. `s = 0`
    /// or a zero noise level give exact zeros.
    pub fn generate(&self, seed: u64) -> Result<TrainingSet> {
        let design = normalize(sample_design(self.n, self.p, seed))?;
        let truth = if self.s == 0 || self.beta_norm == 0.0 {
            GroundTruth::zero(self.p)
        } else {
            make_ground_truth(self.n, self.s, self.beta_norm, &design.column_norms, seed)?
        };
        let noise = if self.noise_level == 0.0 {
            NoiseVector::zero(self.n)
        } else {
            make_noise(self.n, self.noise_mode, self.noise_level, seed)?
        };
        assemble_training(design, truth, noise)
    }
}

/// Maps scaled coordinates to unscaled ones: `out[i] = sqrt(n) w[i] / norms[i]`.
pub fn rescale_model(w: &[f64], column_norms: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(w.len(), column_norms.len());
    let sqrt_n = (n as f64).sqrt();
    w.iter().zip(column_norms).map(|(x, c)| sqrt_n * x / c).collect()
}
