//! Dense complex linear algebra over small tensor-product spaces.
//!
//! Basis ordering follows the Kronecker convention: subsystem 0 is the most
//! significant digit of a flat basis index.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const DEFAULT_DIM_CAP: usize = 4096;

/// Accepted deviation of an input amplitude vector from unit norm.
pub const INPUT_NORM_TOL: f64 = 1e-6;
/// Hermiticity, trace and positivity slack for density matrices.
pub const OPERATOR_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are treated as exact zeros.
pub const CLIP_THRESHOLD: f64 = 1e-12;

static DIM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIM_CAP);

/// Current cap on the total Hilbert-space dimension of any state or operator.
pub fn dim_cap() -> usize {
    DIM_CAP.load(Ordering::Relaxed)
}

pub fn set_dim_cap(cap: usize) {
    DIM_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Product of `dims`, rejecting anything above the global cap.
pub fn total_dim(dims: &[usize]) -> Result<usize> {
    let cap = dim_cap();
    let mut total: usize = 1;
    for &d in dims {
        total = match total.checked_mul(d) {
            Some(t) if t <= cap => t,
            Some(t) => return Err(Error::DimensionOverflow { dim: t, cap }),
            None => return Err(Error::DimensionOverflow { dim: usize::MAX, cap }),
        };
    }
    Ok(total)
}

/// Sorts and deduplicates a subsystem selection, checking every index.
pub fn normalize_subset(subset: &[usize], count: usize) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = subset.iter().copied().collect();
    if let Some(&index) = set.iter().find(|&&i| i >= count) {
        return Err(Error::UnknownSubsystem { index, count });
    }
    Ok(set.into_iter().collect())
}

/// Flat-index bookkeeping for a bipartition of a composite space into a kept
/// part and its complement: `full = keep[k] + rest[t]`.
#[derive(Debug, Clone)]
pub(crate) struct Split {
    pub keep: Vec<usize>,
    pub rest: Vec<usize>,
}

impl Split {
    pub fn new(dims: &[usize], keep: &[usize]) -> Self {
        let n = dims.len();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let offsets = |subset: &mut dyn Iterator<Item = usize>| {
            let mut acc = vec![0usize];
            for i in subset {
                acc = acc
                    .iter()
                    .flat_map(|&o| {
                        let s = strides[i];
                        (0..dims[i]).map(move |x| o + x * s)
                    })
                    .collect();
            }
            acc
        };
        let kept: BTreeSet<usize> = keep.iter().copied().collect();
        let keep = offsets(&mut kept.iter().copied());
        let rest = offsets(&mut (0..n).filter(|i| !kept.contains(i)));
        Split { keep, rest }
    }
}

/// Normalized pure state on a tensor-product space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    dims: Vec<usize>,
}

impl StateVector {
    /// Validates shape and norm (within [`INPUT_NORM_TOL`]) and renormalizes.
    pub fn new(amps: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidState("subsystem dimension 0".into()));
        }
        let total = total_dim(&dims)?;
        if total != amps.len() {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for total dimension {}",
                amps.len(),
                total
            )));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !norm.is_finite() || (norm - 1.0).abs() > INPUT_NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(Self::normalized(amps, dims))
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn from_unnormalized(amps: Vec<Complex64>, dims: Vec<usize>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        let scale = norm.sqrt().recip();
        Self::new(amps.into_iter().map(|a| a * scale).collect(), dims)
    }

    fn normalized(mut amps: Vec<Complex64>, dims: Vec<usize>) -> Self {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector { amps, dims }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(index: &[usize], dims: Vec<usize>) -> Result<Self> {
        if index.len() != dims.len() || index.iter().zip(&dims).any(|(i, d)| i >= d) {
            return Err(Error::InvalidState("basis index out of range".into()));
        }
        let total = total_dim(&dims)?;
        let flat = index.iter().zip(&dims).fold(0, |acc, (i, d)| acc * d + i);
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        amps[flat] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps, dims })
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        total_dim(&dims)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| other.amps.iter().map(move |&b| a * b))
            .collect();
        Ok(StateVector { amps, dims })
    }

    /// Reorders subsystems so that new subsystem `i` is old subsystem `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<StateVector> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::InvalidState(format!("{order:?} is not a permutation of 0..{n}")));
        }
        let dims: Vec<usize> = order.iter().map(|&i| self.dims[i]).collect();
        let mut old_strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            old_strides[i] = old_strides[i + 1] * self.dims[i + 1];
        }
        let mut amps = Vec::with_capacity(self.amps.len());
        let mut digits = vec![0usize; n];
        for _ in 0..self.amps.len() {
            let old: usize = digits.iter().zip(order).map(|(&x, &o)| x * old_strides[o]).sum();
            amps.push(self.amps[old]);
            for pos in (0..n).rev() {
                digits[pos] += 1;
                if digits[pos] < dims[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
        Ok(StateVector { amps, dims })
    }

    /// Amplitudes as a `dim(keep) × dim(rest)` matrix.
    pub(crate) fn bipartite_matrix(&self, keep: &[usize]) -> CMatrix {
        let split = Split::new(&self.dims, keep);
        CMatrix::from_fn(split.keep.len(), split.rest.len(), |k, t| {
            self.amps[split.keep[k] + split.rest[t]]
        })
    }

    /// Reduced density matrix on `keep`.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_subset(keep, self.dims.len())?;
        let m = self.bipartite_matrix(&keep);
        let entries = &m * m.adjoint();
        let dims = keep.iter().map(|&i| self.dims[i]).collect();
        Ok(DensityMatrix { entries, dims })
    }

    pub fn projector(&self) -> DensityMatrix {
        let v = CMatrix::from_column_slice(self.amps.len(), 1, &self.amps);
        DensityMatrix {
            entries: &v * v.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Positive semidefinite unit-trace Hermitian operator on a composite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let side = total_dim(&dims)?;
        if entries.nrows() != side || entries.ncols() != side {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix for total dimension {}",
                entries.nrows(),
                entries.ncols(),
                side
            )));
        }
        let asym = max_abs_diff(&entries, &entries.adjoint());
        if asym > OPERATOR_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {asym:e})")));
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > OPERATOR_TOL || trace.im.abs() > OPERATOR_TOL {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let rho = DensityMatrix { entries, dims };
        eig_spectrum(&rho)?;
        Ok(rho)
    }

    /// Diagonal density matrix from probabilities.
    pub fn diagonal(probs: &[f64], dims: Vec<usize>) -> Result<Self> {
        let diag: Vec<Complex64> = probs.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        Self::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)), dims)
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0 / dim as f64; dim], vec![dim])
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }
}

fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Descending eigenvalues of a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rank(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }
}

pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let dims: Vec<usize> = a.dims.iter().chain(&b.dims).copied().collect();
    total_dim(&dims)?;
    Ok(DensityMatrix {
        entries: a.entries.kronecker(&b.entries),
        dims,
    })
}

/// Traces out every subsystem not in `keep`. An empty `keep` gives the 1×1 trace.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = normalize_subset(keep, rho.dims.len())?;
    let split = Split::new(&rho.dims, &keep);
    let entries = CMatrix::from_fn(split.keep.len(), split.keep.len(), |i, j| {
        let (ri, rj) = (split.keep[i], split.keep[j]);
        split
            .rest
            .iter()
            .map(|&t| rho.entries[(ri + t, rj + t)])
            .sum()
    });
    let dims = keep.iter().map(|&i| rho.dims[i]).collect();
    Ok(DensityMatrix { entries, dims })
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Real eigenvalues of the Hermitian part of `m`, unsorted.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    SymmetricEigen::new(hermitian_part(m)).eigenvalues.iter().copied().collect()
}

pub fn eig_spectrum(rho: &DensityMatrix) -> Result<Spectrum> {
    let mut values = hermitian_eigenvalues(&rho.entries);
    values.sort_by(|a, b| b.total_cmp(a));
    if let Some(&min) = values.last() {
        if min < -OPERATOR_TOL {
            return Err(Error::NotPositiveSemidefinite(min));
        }
    }
    for v in values.iter_mut() {
        if *v <= CLIP_THRESHOLD {
            *v = 0.0;
        }
    }
    Ok(Spectrum { values })
}

/// Canonical purification `Σ_i √λ_i |e_i⟩|i⟩`, with eigenpairs in descending
/// order and the reference dimension equal to the numerical rank.
pub fn purify(rho: &DensityMatrix) -> Result<StateVector> {
    let eig = SymmetricEigen::new(hermitian_part(&rho.entries));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    if let Some(&last) = order.last() {
        if eig.eigenvalues[last] < -OPERATOR_TOL {
            return Err(Error::NotPositiveSemidefinite(eig.eigenvalues[last]));
        }
    }
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| eig.eigenvalues[i] > CLIP_THRESHOLD)
        .collect();
    let rank = kept.len().max(1);
    let side = rho.side();
    let mut amps = vec![Complex64::new(0.0, 0.0); side * rank];
    for (col, &i) in kept.iter().enumerate() {
        let weight = eig.eigenvalues[i].sqrt();
        for s in 0..side {
            amps[s * rank + col] = eig.eigenvectors[(s, i)] * weight;
        }
    }
    let mut dims = rho.dims.clone();
    dims.push(rank);
    StateVector::from_unnormalized(amps, dims)
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::IncompatibleOperators(format!(
            "dims {:?} vs {:?}",
            a.dims, b.dims
        )));
    }
    let diff = &a.entries - &b.entries;
    let sum: f64 = hermitian_eigenvalues(&diff).iter().map(|v| v.abs()).sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a master seed with structured coordinates (sweep point, trial index)
/// into an independent per-trial seed.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    parts
        .iter()
        .fold(splitmix(master), |acc, &p| splitmix(acc ^ splitmix(p)))
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_pure_state_with<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<StateVector> {
    let total = total_dim(dims)?;
    let amps = (0..total).map(|_| complex_gaussian(rng)).collect();
    StateVector::from_unnormalized(amps, dims.to_vec())
}

/// Haar-random pure state: i.i.d. complex Gaussian amplitudes, normalized.
pub fn random_pure_state(dims: &[usize], seed: u64) -> Result<StateVector> {
    random_pure_state_with(dims, &mut rng_from_seed(seed))
}

pub fn random_unitary_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<CMatrix> {
    total_dim(&[dim])?;
    let ginibre = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let qr = ginibre.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Haar-random unitary from the phase-corrected QR factorization of a complex
/// Ginibre matrix.
pub fn random_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    random_unitary_with(dim, &mut rng_from_seed(seed))
}
