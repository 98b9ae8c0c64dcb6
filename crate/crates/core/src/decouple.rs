//! Monte-Carlo decoupling: scramble C with a Haar unitary, split it as
//! `C1 ⊗ C2`, send `C1`, and measure how far the kept `C2` still is from
//! being maximally mixed and independent of the reference R.

use std::fmt::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::mutual_information;
use crate::error::{Error, Result};
use crate::linalg::{
    derive_seed, random_pure_state_with, random_unitary_with, rng_from_seed, tensor_product, total_dim,
    trace_distance, CMatrix, DensityMatrix, StateVector,
};

pub const CSV_HEADER: &str = "d1,log2_d1,mean_distance,std_distance,half_ICR_bits";

#[derive(Debug, Clone, PartialEq)]
pub struct DecoupleConfig {
    pub d_c: usize,
    pub d_r: usize,
    /// Dimensions of the sent factor `C1`, each dividing `d_c`, ascending.
    pub d1_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
}

impl DecoupleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d_c == 0 || self.d_r == 0 {
            return Err(Error::InvalidState("dimensions must be positive".into()));
        }
        total_dim(&[self.d_c, self.d_r])?;
        if self.trials == 0 {
            return Err(Error::InvalidState("trials must be at least 1".into()));
        }
        if self.d1_values.is_empty() {
            return Err(Error::InvalidSplit("no split dimensions given".into()));
        }
        for &d1 in &self.d1_values {
            if d1 == 0 || !self.d_c.is_multiple_of(d1) {
                return Err(Error::InvalidSplit(format!("{d1} does not divide dim(C) = {}", self.d_c)));
            }
        }
        if self.d1_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSplit("split dimensions must be strictly ascending".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoupleRow {
    pub d1: usize,
    pub mean_distance: f64,
    pub std_distance: f64,
    /// `½ I(C;R)` of the input, averaged over trials when the input is sampled.
    pub threshold: f64,
}

impl DecoupleRow {
    pub fn log2_d1(&self) -> f64 {
        (self.d1 as f64).log2()
    }
}

/// `(|00⟩ + … + |m−1,m−1⟩)/√m` on `C ⊗ R` with `m = min(d_c, d_r)`.
pub fn maximally_entangled(d_c: usize, d_r: usize) -> Result<StateVector> {
    let total = total_dim(&[d_c, d_r])?;
    let m = d_c.min(d_r);
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    for i in 0..m {
        amps[i * d_r + i] = Complex64::new(1.0, 0.0);
    }
    StateVector::from_unnormalized(amps, vec![d_c, d_r])
}

fn check_bipartite(psi: &StateVector, d1: usize) -> Result<(usize, usize)> {
    let &[d_c, d_r] = psi.dims() else {
        return Err(Error::InvalidState(format!(
            "decoupling input must live on C ⊗ R, got dims {:?}",
            psi.dims()
        )));
    };
    if d1 == 0 || d_c % d1 != 0 {
        return Err(Error::InvalidSplit(format!("{d1} does not divide dim(C) = {d_c}")));
    }
    Ok((d_c, d_r))
}

fn trial_with<R: Rng + ?Sized>(psi: &StateVector, d1: usize, rng: &mut R) -> Result<f64> {
    let (d_c, d_r) = check_bipartite(psi, d1)?;
    let d2 = d_c / d1;
    let u = random_unitary_with(d_c, rng)?;
    let m = CMatrix::from_row_slice(d_c, d_r, psi.amps());
    let scrambled = &u * m;
    // row-major flattening of (c, r) with c = c1·d2 + c2 puts C1 most significant
    let amps: Vec<Complex64> = (0..d_c)
        .flat_map(|c| (0..d_r).map(move |r| (c, r)))
        .map(|(c, r)| scrambled[(c, r)])
        .collect();
    let split = StateVector::new(amps, vec![d1, d2, d_r])?;
    let kept = split.reduce(&[1, 2])?;
    let reference = psi.reduce(&[1])?;
    let target = tensor_product(&DensityMatrix::maximally_mixed(d2)?, &reference)?;
    trace_distance(&kept, &target)
}

/// One sample of `‖ρ^{C2 R} − π^{C2} ⊗ ρ^R‖₁ / 2` after a Haar unitary on C.
pub fn decouple_trial(psi: &StateVector, d1: usize, seed: u64) -> Result<f64> {
    trial_with(psi, d1, &mut rng_from_seed(seed))
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// One row per split dimension. Without a fixed `psi`, every trial draws a
/// fresh Haar-random input on `C ⊗ R`. Trials run in parallel; each uses a
/// seed derived from `(master_seed, d1, trial)`, so results do not depend on
/// scheduling.
pub fn decouple_sweep(config: &DecoupleConfig, psi: Option<&StateVector>) -> Result<Vec<DecoupleRow>> {
    config.validate()?;
    if let Some(psi) = psi {
        if psi.dims() != [config.d_c, config.d_r] {
            return Err(Error::InvalidState(format!(
                "input dims {:?} do not match ({}, {})",
                psi.dims(),
                config.d_c,
                config.d_r
            )));
        }
    }
    let fixed_threshold = match psi {
        Some(psi) => Some(0.5 * mutual_information(psi, &[0], &[1])?),
        None => None,
    };
    config
        .d1_values
        .iter()
        .map(|&d1| {
            let samples: Vec<(f64, f64)> = (0..config.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = rng_from_seed(derive_seed(config.master_seed, &[d1 as u64, t as u64]));
                    match psi {
                        Some(psi) => Ok((trial_with(psi, d1, &mut rng)?, fixed_threshold.unwrap_or(0.0))),
                        None => {
                            let sampled = random_pure_state_with(&[config.d_c, config.d_r], &mut rng)?;
                            let half_icr = 0.5 * mutual_information(&sampled, &[0], &[1])?;
                            Ok((trial_with(&sampled, d1, &mut rng)?, half_icr))
                        }
                    }
                })
                .collect::<Result<_>>()?;
            let distances: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let thresholds: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let (mean_distance, std_distance) = mean_std(&distances);
            Ok(DecoupleRow {
                d1,
                mean_distance,
                std_distance,
                threshold: mean_std(&thresholds).0,
            })
        })
        .collect()
}

pub fn rows_to_csv(rows: &[DecoupleRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{CSV_HEADER}");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{:?}",
            row.d1,
            row.log2_d1(),
            row.mean_distance,
            row.std_distance,
            row.threshold
        );
    }
    out
}
