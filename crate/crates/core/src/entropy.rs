//! Von Neumann entropy and the information quantities built from it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, eig_spectrum, normalize_subset, DensityMatrix, Spectrum, StateVector};

/// A state on a tensor-product space whose subsystem marginals can be taken.
pub trait QuantumState {
    fn dims(&self) -> &[usize];

    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix>;

    /// Von Neumann entropy of the marginal on `subset`, in bits.
    fn subset_entropy(&self, subset: &[usize]) -> Result<f64> {
        let subset = normalize_subset(subset, self.dims().len())?;
        let rho = self.reduce(&subset)?;
        Ok(spectrum_entropy(&eig_spectrum(&rho)?, rho.side()))
    }
}

impl QuantumState for StateVector {
    fn dims(&self) -> &[usize] {
        StateVector::dims(self)
    }

    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        StateVector::reduce(self, keep)
    }

    // H(S) = H(S̄) for a pure state, so diagonalize whichever side is smaller.
    fn subset_entropy(&self, subset: &[usize]) -> Result<f64> {
        let dims = StateVector::dims(self);
        let subset = normalize_subset(subset, dims.len())?;
        let complement: Vec<usize> = (0..dims.len()).filter(|i| !subset.contains(i)).collect();
        let side = |s: &[usize]| s.iter().map(|&i| dims[i]).product::<usize>();
        let smaller = if side(&subset) <= side(&complement) { subset } else { complement };
        let rho = StateVector::reduce(self, &smaller)?;
        Ok(spectrum_entropy(&eig_spectrum(&rho)?, rho.side()))
    }
}

impl QuantumState for DensityMatrix {
    fn dims(&self) -> &[usize] {
        DensityMatrix::dims(self)
    }

    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        linalg::partial_trace(self, keep)
    }
}

/// Shannon entropy of a spectrum in bits, confined to `[0, log₂ dim]`.
pub fn spectrum_entropy(spectrum: &Spectrum, dim: usize) -> f64 {
    let h: f64 = spectrum
        .values()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.clamp(0.0, (dim.max(1) as f64).log2())
}

fn check_disjoint(count: usize, sets: &[&[usize]]) -> Result<()> {
    let mut owner = vec![false; count];
    for set in sets {
        for &i in normalize_subset(set, count)?.iter() {
            if std::mem::replace(&mut owner[i], true) {
                return Err(Error::RolesOverlap(i));
            }
        }
    }
    Ok(())
}

fn union(sets: &[&[usize]]) -> Vec<usize> {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

pub fn entropy<S: QuantumState + ?Sized>(state: &S, subset: &[usize]) -> Result<f64> {
    state.subset_entropy(subset)
}

/// `H(X|Y) = H(XY) − H(Y)`; negative values signal distillable entanglement.
pub fn conditional_entropy<S: QuantumState + ?Sized>(state: &S, x: &[usize], y: &[usize]) -> Result<f64> {
    check_disjoint(state.dims().len(), &[x, y])?;
    Ok(state.subset_entropy(&union(&[x, y]))? - state.subset_entropy(y)?)
}

pub fn mutual_information<S: QuantumState + ?Sized>(state: &S, x: &[usize], y: &[usize]) -> Result<f64> {
    check_disjoint(state.dims().len(), &[x, y])?;
    Ok(state.subset_entropy(x)? + state.subset_entropy(y)? - state.subset_entropy(&union(&[x, y]))?)
}

/// `I(X;Y|Z) = H(XZ) + H(YZ) − H(Z) − H(XYZ)`.
pub fn conditional_mutual_information<S: QuantumState + ?Sized>(
    state: &S,
    x: &[usize],
    y: &[usize],
    z: &[usize],
) -> Result<f64> {
    check_disjoint(state.dims().len(), &[x, y, z])?;
    let h_z = if z.is_empty() { 0.0 } else { state.subset_entropy(z)? };
    Ok(state.subset_entropy(&union(&[x, z]))? + state.subset_entropy(&union(&[y, z]))?
        - h_z
        - state.subset_entropy(&union(&[x, y, z]))?)
}

/// Memoized subset entropies of one state, keyed by subsystem bitmask.
pub struct SubsetEntropies<'a, S: QuantumState + ?Sized> {
    state: &'a S,
    cache: HashMap<u64, f64>,
}

impl<'a, S: QuantumState + ?Sized> SubsetEntropies<'a, S> {
    pub fn new(state: &'a S) -> Result<Self> {
        if state.dims().len() > 64 {
            return Err(Error::InvalidState("more than 64 subsystems".into()));
        }
        Ok(SubsetEntropies { state, cache: HashMap::new() })
    }

    pub fn num_subsystems(&self) -> usize {
        self.state.dims().len()
    }

    pub fn h(&mut self, mask: u64) -> Result<f64> {
        if mask == 0 {
            return Ok(0.0);
        }
        if let Some(&h) = self.cache.get(&mask) {
            return Ok(h);
        }
        let subset: Vec<usize> = (0..64).filter(|i| mask >> i & 1 == 1).collect();
        let h = self.state.subset_entropy(&subset)?;
        self.cache.insert(mask, h);
        Ok(h)
    }

    pub fn cond(&mut self, x: u64, y: u64) -> Result<f64> {
        Ok(self.h(x | y)? - self.h(y)?)
    }

    pub fn mi(&mut self, x: u64, y: u64) -> Result<f64> {
        Ok(self.h(x)? + self.h(y)? - self.h(x | y)?)
    }

    pub fn cmi(&mut self, x: u64, y: u64, z: u64) -> Result<f64> {
        Ok(self.h(x | z)? + self.h(y | z)? - self.h(z)? - self.h(x | y | z)?)
    }
}

pub fn mask_of(indices: &[usize]) -> u64 {
    indices.iter().fold(0, |m, &i| m | 1 << i)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Role {
    A,
    B,
    C,
    D,
    R,
}

impl Role {
    pub const ALL: [Role; 5] = [Role::A, Role::B, Role::C, Role::D, Role::R];

    pub fn letter(self) -> char {
        match self {
            Role::A => 'A',
            Role::B => 'B',
            Role::C => 'C',
            Role::D => 'D',
            Role::R => 'R',
        }
    }

    pub fn from_letter(s: &str) -> Option<Role> {
        match s {
            "A" => Some(Role::A),
            "B" => Some(Role::B),
            "C" => Some(Role::C),
            "D" => Some(Role::D),
            "R" => Some(Role::R),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Assignment of subsystem indices to the parties of a redistribution task.
///
/// A (sender's side information) and B (receiver's side information) may be
/// empty; D exists only for successive transfers of C and D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RolePartition {
    a: Vec<usize>,
    b: Vec<usize>,
    c: Vec<usize>,
    d: Option<Vec<usize>>,
    r: Vec<usize>,
}

impl RolePartition {
    pub fn new(a: Vec<usize>, b: Vec<usize>, c: Vec<usize>, r: Vec<usize>) -> Self {
        RolePartition { a, b, c, d: None, r }
    }

    pub fn with_d(mut self, d: Vec<usize>) -> Self {
        self.d = Some(d);
        self
    }

    /// One label per subsystem; D is present iff some subsystem carries it.
    pub fn from_labels(labels: &[Role]) -> Self {
        let pick = |role| labels.iter().enumerate().filter(|(_, &r)| r == role).map(|(i, _)| i).collect();
        let d: Vec<usize> = pick(Role::D);
        RolePartition {
            a: pick(Role::A),
            b: pick(Role::B),
            c: pick(Role::C),
            d: if d.is_empty() { None } else { Some(d) },
            r: pick(Role::R),
        }
    }

    pub fn get(&self, role: Role) -> &[usize] {
        match role {
            Role::A => &self.a,
            Role::B => &self.b,
            Role::C => &self.c,
            Role::D => self.d.as_deref().unwrap_or(&[]),
            Role::R => &self.r,
        }
    }

    pub fn has_d(&self) -> bool {
        self.d.is_some()
    }

    /// Roles carried by this partition, in canonical order.
    pub fn roles(&self) -> Vec<Role> {
        Role::ALL.into_iter().filter(|&r| r != Role::D || self.has_d()).collect()
    }

    pub fn mask(&self, roles: &[Role]) -> u64 {
        roles.iter().fold(0, |m, &r| m | mask_of(self.get(r)))
    }

    /// Exchanges the sender's and receiver's side information.
    pub fn swap_ab(&self) -> Self {
        RolePartition {
            a: self.b.clone(),
            b: self.a.clone(),
            ..self.clone()
        }
    }

    /// Checks that the roles are disjoint and cover `0..count` exactly once.
    pub fn validate(&self, count: usize) -> Result<()> {
        if self.c.is_empty() {
            return Err(Error::InvalidPartition("role C must be assigned".into()));
        }
        let mut owner: Vec<Option<Role>> = vec![None; count];
        for role in self.roles() {
            for &i in self.get(role) {
                if i >= count {
                    return Err(Error::UnknownSubsystem { index: i, count });
                }
                if owner[i].replace(role).is_some() {
                    return Err(Error::RolesOverlap(i));
                }
            }
        }
        if let Some(i) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidPartition(format!("subsystem {i} has no role")));
        }
        Ok(())
    }

    pub fn labels(&self, count: usize) -> Result<Vec<Role>> {
        self.validate(count)?;
        let mut labels = vec![Role::R; count];
        for role in self.roles() {
            for &i in self.get(role) {
                labels[i] = role;
            }
        }
        Ok(labels)
    }
}

/// Subset entropies and named derived quantities, all in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub entropies: BTreeMap<String, f64>,
    pub derived: BTreeMap<String, f64>,
}

impl EntropyReport {
    pub fn entropy(&self, roles: &str) -> Option<f64> {
        self.entropies.get(roles).copied()
    }

    pub fn derived(&self, name: &str) -> Option<f64> {
        self.derived.get(name).copied()
    }
}

fn role_key(roles: &[Role]) -> String {
    roles.iter().map(|r| r.letter()).collect()
}

/// Entropies of every non-empty set of roles plus the quantities consumed by
/// the redistribution cost formulas.
pub fn full_report<S: QuantumState + ?Sized>(state: &S, partition: &RolePartition) -> Result<EntropyReport> {
    partition.validate(state.dims().len())?;
    let mut table = SubsetEntropies::new(state)?;
    let roles = partition.roles();
    let mut entropies = BTreeMap::new();
    for bits in 1u32..(1 << roles.len()) {
        let subset: Vec<Role> = roles
            .iter()
            .enumerate()
            .filter(|(k, _)| bits >> k & 1 == 1)
            .map(|(_, &r)| r)
            .collect();
        entropies.insert(role_key(&subset), table.h(partition.mask(&subset))?);
    }

    use Role::*;
    let m = |rs: &[Role]| partition.mask(rs);
    let (a, b, c, d, r) = (m(&[A]), m(&[B]), m(&[C]), m(&[D]), m(&[R]));
    let mut derived = BTreeMap::new();
    derived.insert("H(C)".to_string(), table.h(c)?);
    derived.insert("H(C|B)".to_string(), table.cond(c, b)?);
    derived.insert("I(C;A)".to_string(), table.mi(c, a)?);
    derived.insert("I(C;B)".to_string(), table.mi(c, b)?);
    derived.insert("I(C;R)".to_string(), table.mi(c, r)?);
    derived.insert("I(C;R|A)".to_string(), table.cmi(c, r, a)?);
    derived.insert("I(C;R|B)".to_string(), table.cmi(c, r, b)?);
    derived.insert("I(R;C|A)".to_string(), table.cmi(r, c, a)?);
    derived.insert("I(RA;C)".to_string(), table.mi(r | a, c)?);
    if partition.has_d() {
        derived.insert("I(CD;R|B)".to_string(), table.cmi(c | d, r, b)?);
        derived.insert("I(CD;A)".to_string(), table.mi(c | d, a)?);
        derived.insert("I(CD;B)".to_string(), table.mi(c | d, b)?);
        derived.insert("I(D;R|B)".to_string(), table.cmi(d, r, b)?);
        derived.insert("I(D;AC)".to_string(), table.mi(d, a | c)?);
        derived.insert("I(D;B)".to_string(), table.mi(d, b)?);
        derived.insert("I(C;R|DB)".to_string(), table.cmi(c, r, d | b)?);
        derived.insert("I(C;DB)".to_string(), table.mi(c, d | b)?);
    }
    Ok(EntropyReport { entropies, derived })
}
