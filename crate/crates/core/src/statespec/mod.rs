//! Canonical states and the `.qsv` state-description format.

mod text;

pub use text::{format_state, parse_state, ParseError, ParseErrorKind};

use num_complex::Complex64;
use rand::Rng;

use crate::entropy::{entropy, Role, RolePartition};
use crate::error::{Error, Result};
use crate::linalg::{self, total_dim, StateVector};

/// Terms with a smaller modulus are dropped when a state is serialized.
pub const ZERO_AMPLITUDE: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub index: Vec<usize>,
    pub amp: Complex64,
}

/// Sparse ket-list description of a pure state with per-subsystem roles.
/// Terms are kept in lexicographic order of their basis tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDocument {
    pub dims: Vec<usize>,
    pub roles: Vec<Role>,
    pub terms: Vec<Term>,
}

impl StateDocument {
    pub fn from_state(state: &StateVector, roles: Vec<Role>) -> Result<Self> {
        let dims = state.dims().to_vec();
        if roles.len() != dims.len() {
            return Err(Error::InvalidPartition(format!(
                "{} roles for {} subsystems",
                roles.len(),
                dims.len()
            )));
        }
        let mut terms = Vec::new();
        for (flat, &amp) in state.amps().iter().enumerate() {
            if amp.norm() < ZERO_AMPLITUDE {
                continue;
            }
            let mut index = vec![0; dims.len()];
            let mut rest = flat;
            for (slot, &d) in index.iter_mut().zip(&dims).rev() {
                *slot = rest % d;
                rest /= d;
            }
            terms.push(Term { index, amp });
        }
        Ok(StateDocument { dims, roles, terms })
    }

    pub fn to_state(&self) -> Result<StateVector> {
        let total = total_dim(&self.dims)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        for term in &self.terms {
            let flat = term.index.iter().zip(&self.dims).fold(0, |acc, (i, d)| acc * d + i);
            amps[flat] = term.amp;
        }
        StateVector::new(amps, self.dims.clone())
    }

    pub fn partition(&self) -> RolePartition {
        RolePartition::from_labels(&self.roles)
    }
}

/// Default role labels for an n-party state: the last four parties are
/// A, B, C, R (dropping A then B for fewer parties); a fifth becomes D and any
/// further parties join R.
pub fn singleton_roles(n: usize) -> Vec<Role> {
    use Role::*;
    match n {
        0 => vec![],
        1 => vec![C],
        2 => vec![C, R],
        3 => vec![B, C, R],
        4 => vec![A, B, C, R],
        _ => {
            let mut roles = vec![A, B, C, D];
            roles.resize(n, R);
            roles
        }
    }
}

fn qubit_register(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidState(format!("need at least 2 parties, got {n}")));
    }
    if n >= usize::BITS as usize {
        return Err(Error::DimensionOverflow { dim: usize::MAX, cap: linalg::dim_cap() });
    }
    total_dim(&vec![2; n])
}

/// `(|0…0⟩ + |1…1⟩)/√2` on n qubits.
pub fn make_cat(n: usize) -> Result<StateVector> {
    let total = qubit_register(n)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[total - 1] = amps[0];
    StateVector::new(amps, vec![2; n])
}

/// Uniform superposition of the n single-excitation basis states.
pub fn make_w(n: usize) -> Result<StateVector> {
    let total = qubit_register(n)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    let a = Complex64::new((n as f64).sqrt().recip(), 0.0);
    for k in 0..n {
        amps[1 << k] = a;
    }
    StateVector::new(amps, vec![2; n])
}

#[derive(Debug, Clone)]
pub struct HjpwBlock {
    pub p: f64,
    /// State on `A_C ⊗ B_C ⊗ C`.
    pub phi: StateVector,
    /// State on `A_R ⊗ B_R ⊗ R`.
    pub varphi: StateVector,
}

/// Blocks of a state saturating strong subadditivity,
/// `Σ_x √p_x |x⟩^{A'} |x⟩^{B'} |φ_x⟩^{A_C B_C C} |ϕ_x⟩^{A_R B_R R}`.
#[derive(Debug, Clone)]
pub struct HjpwSpec {
    pub blocks: Vec<HjpwBlock>,
}

/// Subsystem order of [`make_hjpw`] output.
pub const HJPW_LAYOUT: [(&str, Role); 8] = [
    ("A'", Role::A),
    ("B'", Role::B),
    ("A_C", Role::A),
    ("B_C", Role::B),
    ("C", Role::C),
    ("A_R", Role::A),
    ("B_R", Role::B),
    ("R", Role::R),
];

impl HjpwSpec {
    fn validate(&self) -> Result<()> {
        let first = self
            .blocks
            .first()
            .ok_or_else(|| Error::InconsistentBlocks("no blocks".into()))?;
        for (x, block) in self.blocks.iter().enumerate() {
            if block.phi.dims().len() != 3 || block.varphi.dims().len() != 3 {
                return Err(Error::InconsistentBlocks(format!(
                    "block {x}: each block state needs exactly three factors"
                )));
            }
            if block.phi.dims() != first.phi.dims() || block.varphi.dims() != first.varphi.dims() {
                return Err(Error::InconsistentBlocks(format!(
                    "block {x} has dims {:?}/{:?}, block 0 has {:?}/{:?}",
                    block.phi.dims(),
                    block.varphi.dims(),
                    first.phi.dims(),
                    first.varphi.dims()
                )));
            }
            if block.p.is_nan() || block.p < 0.0 {
                return Err(Error::InvalidState(format!("block {x}: invalid weight {}", block.p)));
            }
        }
        let total: f64 = self.blocks.iter().map(|b| b.p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("block weights sum to {total}")));
        }
        Ok(())
    }

    /// `Σ_x p_x (H(A_C) − H(B_C))` evaluated on the block states `φ_x`.
    pub fn block_entropy_gap(&self) -> Result<f64> {
        self.blocks.iter().try_fold(0.0, |acc, b| {
            Ok(acc + b.p * (entropy(&b.phi, &[0])? - entropy(&b.phi, &[1])?))
        })
    }

    /// Random spec with 1..=`max_blocks` blocks and every factor of dimension
    /// 1..=`max_dim`; block states are Haar-random.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_blocks: usize, max_dim: usize) -> Result<Self> {
        let count = rng.gen_range(1..=max_blocks.max(1));
        let mut factor = || -> Vec<usize> { (0..3).map(|_| rng.gen_range(1..=max_dim.max(1))).collect() };
        let (phi_dims, varphi_dims) = (factor(), factor());
        let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = weights.iter().sum();
        let blocks = weights
            .into_iter()
            .map(|w| {
                Ok(HjpwBlock {
                    p: w / sum,
                    phi: linalg::random_pure_state_with(&phi_dims, rng)?,
                    varphi: linalg::random_pure_state_with(&varphi_dims, rng)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(HjpwSpec { blocks })
    }
}

/// Assembles the canonical HJPW state with subsystems in [`HJPW_LAYOUT`] order.
pub fn make_hjpw(spec: &HjpwSpec) -> Result<(StateVector, RolePartition)> {
    spec.validate()?;
    let k = spec.blocks.len();
    let pd = spec.blocks[0].phi.dims();
    let vd = spec.blocks[0].varphi.dims();
    let dims = vec![k, k, pd[0], pd[1], pd[2], vd[0], vd[1], vd[2]];
    let total = total_dim(&dims)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    let (phi_len, varphi_len) = (spec.blocks[0].phi.amps().len(), spec.blocks[0].varphi.amps().len());
    for (x, block) in spec.blocks.iter().enumerate() {
        let weight = block.p.sqrt();
        let base = (x * k + x) * phi_len * varphi_len;
        for (i, &f) in block.phi.amps().iter().enumerate() {
            for (j, &g) in block.varphi.amps().iter().enumerate() {
                amps[base + i * varphi_len + j] = f * g * weight;
            }
        }
    }
    let state = StateVector::new(amps, dims)?;
    let roles: Vec<Role> = HJPW_LAYOUT.iter().map(|&(_, r)| r).collect();
    Ok((state, RolePartition::from_labels(&roles)))
}

/// Two equiprobable blocks: a Bell pair on `A_C C`, then on `C B_C`; the
/// reference parts are product states.
pub fn hjpw_demo_spec() -> HjpwSpec {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = |first: usize, second: usize| {
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0] = Complex64::new(h, 0.0);
        amps[(1 << (2 - first)) | (1 << (2 - second))] = Complex64::new(h, 0.0);
        StateVector::new(amps, vec![2, 2, 2]).expect("valid Bell block")
    };
    let zero = StateVector::basis(&[0, 0, 0], vec![2, 2, 2]).expect("valid basis state");
    HjpwSpec {
        blocks: vec![
            HjpwBlock { p: 0.5, phi: bell(0, 2), varphi: zero.clone() },
            HjpwBlock { p: 0.5, phi: bell(2, 1), varphi: zero },
        ],
    }
}
