//! Resource accounting for state redistribution.
//!
//! Alice holds `AC`, Bob holds `B`, and `R` purifies the rest. Moving `C` to
//! Bob costs `Q` qubits and `E` ebits per copy (negative `E` means
//! entanglement is generated). The achievable region is
//!
//! ```text
//! Q     >= ½ I(C;R|B)
//! Q + E >= H(C|B)
//! ```
//!
//! with corner `Q = ½ I(C;R|B)`, `E = ½ I(C;A) − ½ I(C;B)`. When the partition
//! carries a D role, the transferred system is `CD` taken jointly.

use serde::Serialize;

use crate::entropy::{QuantumState, Role, RolePartition, SubsetEntropies};
use crate::error::{Error, Result};

/// Largest global entropy, in bits, still accepted as a pure input.
pub const PURITY_TOL: f64 = 1e-6;
/// Slack allowed when testing membership of a cost region.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostPair {
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

impl CostPair {
    pub fn new(q: f64, e: f64) -> Self {
        CostPair { q, e }
    }

    pub fn max_deviation(&self, other: &CostPair) -> f64 {
        (self.q - other.q).abs().max((self.e - other.e).abs())
    }
}

/// `q_coeff·Q + e_coeff·E >= bound`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfPlane {
    pub q_coeff: f64,
    pub e_coeff: f64,
    pub bound: f64,
}

impl HalfPlane {
    pub fn slack(&self, q: f64, e: f64) -> f64 {
        self.q_coeff * q + self.e_coeff * e - self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct CostRegion {
    pub constraints: Vec<HalfPlane>,
}

impl CostRegion {
    /// The qubit bound `Q >= q_min` followed by the sum bound `Q + E >= sum_min`.
    pub fn two_sided(q_min: f64, sum_min: f64) -> Self {
        CostRegion {
            constraints: vec![
                HalfPlane { q_coeff: 1.0, e_coeff: 0.0, bound: q_min },
                HalfPlane { q_coeff: 1.0, e_coeff: 1.0, bound: sum_min },
            ],
        }
    }

    pub fn q_bound(&self) -> f64 {
        self.constraints[0].bound
    }

    pub fn sum_bound(&self) -> f64 {
        self.constraints[1].bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergingCosts {
    pub ebits: f64,
    pub cbits: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComposabilityRecord {
    pub joint: CostPair,
    pub sequential: CostPair,
    pub max_deviation: f64,
}

/// Role masks plus cached entropies of a validated pure instance.
struct Instance<'a, S: QuantumState + ?Sized> {
    table: SubsetEntropies<'a, S>,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
    r: u64,
}

impl<'a, S: QuantumState + ?Sized> Instance<'a, S> {
    fn new(state: &'a S, partition: &RolePartition) -> Result<Self> {
        let count = state.dims().len();
        partition.validate(count)?;
        let mut table = SubsetEntropies::new(state)?;
        let all = if count == 64 { u64::MAX } else { (1u64 << count) - 1 };
        let h = table.h(all)?;
        if h > PURITY_TOL {
            return Err(Error::NotPure(h));
        }
        Ok(Instance {
            table,
            a: partition.mask(&[Role::A]),
            b: partition.mask(&[Role::B]),
            c: partition.mask(&[Role::C]),
            d: partition.mask(&[Role::D]),
            r: partition.mask(&[Role::R]),
        })
    }

    fn sent(&self) -> u64 {
        self.c | self.d
    }

    fn region(&mut self) -> Result<CostRegion> {
        let (b, c, r) = (self.b, self.sent(), self.r);
        Ok(CostRegion::two_sided(
            0.5 * self.table.cmi(c, r, b)?,
            self.table.cond(c, b)?,
        ))
    }

    fn corner(&mut self) -> Result<CostPair> {
        let (a, b, c, r) = (self.a, self.b, self.sent(), self.r);
        Ok(CostPair::new(
            0.5 * self.table.cmi(c, r, b)?,
            0.5 * self.table.mi(c, a)? - 0.5 * self.table.mi(c, b)?,
        ))
    }
}

pub fn redistribution_region<S: QuantumState + ?Sized>(state: &S, partition: &RolePartition) -> Result<CostRegion> {
    Instance::new(state, partition)?.region()
}

/// Optimal cost pair: `Q = ½I(C;R|B)`, `E = ½I(C;A) − ½I(C;B)`.
pub fn redistribution_corner<S: QuantumState + ?Sized>(state: &S, partition: &RolePartition) -> Result<CostPair> {
    Instance::new(state, partition)?.corner()
}

pub fn is_achievable(region: &CostRegion, q: f64, e: f64) -> bool {
    region.constraints.iter().all(|c| c.slack(q, e) >= -MEMBERSHIP_TOL)
}

/// Fully quantum Slepian-Wolf: no side information at the sender.
pub fn fqsw_corner<S: QuantumState + ?Sized>(state: &S, partition: &RolePartition) -> Result<CostPair> {
    if !partition.get(Role::A).is_empty() {
        return Err(Error::NotFqsw);
    }
    let mut inst = Instance::new(state, partition)?;
    let (b, c, r) = (inst.b, inst.sent(), inst.r);
    Ok(CostPair::new(0.5 * inst.table.mi(c, r)?, -0.5 * inst.table.mi(c, b)?))
}

/// Fully quantum reverse Shannon: no side information at the receiver.
pub fn fqrs_corner<S: QuantumState + ?Sized>(state: &S, partition: &RolePartition) -> Result<CostPair> {
    if !partition.get(Role::B).is_empty() {
        return Err(Error::NotFqrs);
    }
    let mut inst = Instance::new(state, partition)?;
    let (a, c, r) = (inst.a, inst.sent(), inst.r);
    Ok(CostPair::new(0.5 * inst.table.mi(c, r)?, 0.5 * inst.table.mi(c, a)?))
}

/// Merging with free classical communication: `H(C|B)` ebits and `I(R;C|A)` bits.
pub fn merging_costs<S: QuantumState + ?Sized>(state: &S, partition: &RolePartition) -> Result<MergingCosts> {
    let mut inst = Instance::new(state, partition)?;
    let (a, b, c, r) = (inst.a, inst.b, inst.sent(), inst.r);
    Ok(MergingCosts {
        ebits: inst.table.cond(c, b)?,
        cbits: inst.table.cmi(r, c, a)?,
    })
}

/// Corner of the reverse task, with A and B exchanged.
pub fn time_reversal_dual<S: QuantumState + ?Sized>(state: &S, partition: &RolePartition) -> Result<CostPair> {
    redistribution_corner(state, &partition.swap_ab())
}

/// Compares sending `CD` at once with sending D first and then C.
pub fn composability_check<S: QuantumState + ?Sized>(
    state: &S,
    partition: &RolePartition,
) -> Result<ComposabilityRecord> {
    if !partition.has_d() {
        return Err(Error::MissingRoleD);
    }
    let mut inst = Instance::new(state, partition)?;
    let (a, b, c, d, r) = (inst.a, inst.b, inst.c, inst.d, inst.r);
    let t = &mut inst.table;
    let joint = CostPair::new(
        0.5 * t.cmi(c | d, r, b)?,
        0.5 * t.mi(c | d, a)? - 0.5 * t.mi(c | d, b)?,
    );
    let step_d = CostPair::new(
        0.5 * t.cmi(d, r, b)?,
        0.5 * t.mi(d, a | c)? - 0.5 * t.mi(d, b)?,
    );
    let step_c = CostPair::new(
        0.5 * t.cmi(c, r, d | b)?,
        0.5 * t.mi(c, a)? - 0.5 * t.mi(c, d | b)?,
    );
    let sequential = CostPair::new(step_c.q + step_d.q, step_c.e + step_d.e);
    Ok(ComposabilityRecord {
        joint,
        sequential,
        max_deviation: joint.max_deviation(&sequential),
    })
}
