//! Randomized checks of the entropy inequalities and cost-pair identities on
//! Haar-random pure states.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{conditional_entropy, mutual_information, Role, RolePartition, SubsetEntropies};
use crate::error::{Error, Result};
use crate::linalg::{derive_seed, random_pure_state_with, rng_from_seed, SeededRng, StateVector};
use crate::tasks::{
    composability_check, fqrs_corner, fqsw_corner, is_achievable, merging_costs, redistribution_corner,
    redistribution_region, time_reversal_dual,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Ssa,
    Duality,
    Composability,
    SpecialCases,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Ssa, Suite::Duality, Suite::Composability, Suite::SpecialCases];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ssa => "ssa",
            Suite::Duality => "duality",
            Suite::Composability => "composability",
            Suite::SpecialCases => "special-cases",
        }
    }

    fn id(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected ssa, duality, composability or special-cases)"))
    }
}

/// Pass/fail thresholds, overridable by name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    /// Slack for inequalities (strong subadditivity, subadditivity, nonnegative Q).
    pub inequality: f64,
    /// |I(C;R|A) − I(C;R|B)| on pure states.
    pub identity: f64,
    /// Cost-pair identities: duality, composability, special cases, merging.
    pub cost: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { inequality: 1e-7, identity: 1e-7, cost: 1e-9 }
    }
}

impl Tolerances {
    pub fn set(&mut self, name: &str, value: f64) -> std::result::Result<(), String> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(format!("tolerance `{name}` must be positive, got {value}"));
        }
        match name {
            "inequality" => self.inequality = value,
            "identity" => self.identity = value,
            "cost" => self.cost = value,
            _ => return Err(format!("unknown tolerance `{name}` (expected inequality, identity or cost)")),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub trials: usize,
    /// Fixed subsystem dimensions; `None` picks each trial's dimensions at
    /// random from 2..=4 (ssa) or uses the suite default.
    pub dims: Option<Vec<usize>>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// The observed minimum must be at least `limit`.
    Min,
    /// The observed maximum must be at most `limit`.
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub kind: Bound,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub metrics: BTreeMap<String, Metric>,
    pub pass: bool,
}

/// Per-trial observations; merged with min/max, so the order of trials never
/// matters.
#[derive(Debug, Clone, Default)]
struct Observed(BTreeMap<&'static str, (Bound, f64)>);

impl Observed {
    fn min(&mut self, name: &'static str, v: f64) {
        self.push(name, Bound::Min, v);
    }

    fn max(&mut self, name: &'static str, v: f64) {
        self.push(name, Bound::Max, v);
    }

    fn push(&mut self, name: &'static str, kind: Bound, v: f64) {
        let slot = self.0.entry(name).or_insert((kind, v));
        slot.1 = match kind {
            Bound::Min => slot.1.min(v),
            Bound::Max => slot.1.max(v),
        };
    }

    fn merge(mut self, other: Observed) -> Observed {
        for (name, (kind, v)) in other.0 {
            self.push(name, kind, v);
        }
        self
    }
}

fn sample(rng: &mut SeededRng, dims: &[usize]) -> Result<StateVector> {
    random_pure_state_with(dims, rng)
}

fn fixed_dims(options: &VerifyOptions, default: &[usize], parties: usize) -> Result<Vec<usize>> {
    let dims = options.dims.clone().unwrap_or_else(|| default.to_vec());
    if dims.len() != parties {
        return Err(Error::InvalidState(format!(
            "this suite needs {parties} subsystem dimensions, got {dims:?}"
        )));
    }
    Ok(dims)
}

fn ssa_trial(options: &VerifyOptions, rng: &mut SeededRng) -> Result<Observed> {
    let dims = match &options.dims {
        Some(d) => d.clone(),
        None => (0..4).map(|_| rng.gen_range(2..=4)).collect(),
    };
    if dims.len() < 3 || dims.len() > 12 {
        return Err(Error::InvalidState(format!("ssa needs 3 to 12 subsystems, got {dims:?}")));
    }
    let psi = sample(rng, &dims)?;
    let mut table = SubsetEntropies::new(&psi)?;
    let n = dims.len();
    let mut obs = Observed::default();
    // every assignment of distinct subsystems to (C, R, B)
    for c in 0..n {
        for r in (0..n).filter(|&r| r != c) {
            obs.min("min I(X;Y)", table.mi(1 << c, 1 << r)?);
            for b in (0..n).filter(|&b| b != c && b != r) {
                obs.min("min I(C;R|B)", table.cmi(1 << c, 1 << r, 1 << b)?);
            }
        }
    }
    Ok(obs)
}

fn duality_trial(dims: &[usize], rng: &mut SeededRng) -> Result<Observed> {
    let psi = sample(rng, dims)?;
    let p = RolePartition::from_labels(&[Role::A, Role::B, Role::C, Role::R]);
    let mut table = SubsetEntropies::new(&psi)?;
    let m = |r| p.mask(&[r]);
    let (a, b, c, r) = (m(Role::A), m(Role::B), m(Role::C), m(Role::R));
    let mut obs = Observed::default();
    obs.max("max |I(C;R|A) - I(C;R|B)|", (table.cmi(c, r, a)? - table.cmi(c, r, b)?).abs());
    let fwd = redistribution_corner(&psi, &p)?;
    let back = time_reversal_dual(&psi, &p)?;
    obs.max("max |Q - Q_swap|", (fwd.q - back.q).abs());
    obs.max("max |E + E_swap|", (fwd.e + back.e).abs());
    obs.min("min Q", fwd.q);
    let region = redistribution_region(&psi, &p)?;
    let misplaced = !is_achievable(&region, fwd.q, fwd.e) || is_achievable(&region, fwd.q - 1e-3, fwd.e);
    obs.max("corner membership failures", if misplaced { 1.0 } else { 0.0 });
    Ok(obs)
}

fn composability_trial(dims: &[usize], rng: &mut SeededRng) -> Result<Observed> {
    let psi = sample(rng, dims)?;
    let p = RolePartition::from_labels(&[Role::A, Role::B, Role::C, Role::D, Role::R]);
    let rec = composability_check(&psi, &p)?;
    let mut obs = Observed::default();
    obs.max("max deviation", rec.max_deviation);
    obs.min("min Q", rec.joint.q.min(rec.sequential.q));
    Ok(obs)
}

fn special_trial(dims: &[usize], rng: &mut SeededRng) -> Result<Observed> {
    let mut obs = Observed::default();
    let psi = sample(rng, dims)?;

    let no_a = RolePartition::new(vec![], vec![0], vec![1], vec![2]);
    let general = redistribution_corner(&psi, &no_a)?;
    obs.max("max |FQSW - general|", fqsw_corner(&psi, &no_a)?.max_deviation(&general));
    let no_b = RolePartition::new(vec![0], vec![], vec![1], vec![2]);
    let general = redistribution_corner(&psi, &no_b)?;
    obs.max("max |FQRS - general|", fqrs_corner(&psi, &no_b)?.max_deviation(&general));
    obs.min("min Q", general.q);

    // merging on a four-party extension with nontrivial side information at A
    let mut wide = vec![2];
    wide.extend_from_slice(dims);
    let phi = sample(rng, &wide)?;
    let abcr = RolePartition::new(vec![0], vec![1], vec![2], vec![3]);
    for (state, partition) in [(&psi, &no_a), (&psi, &no_b), (&phi, &abcr)] {
        let costs = merging_costs(state, partition)?;
        let (a, b, c, r) = (
            partition.get(Role::A),
            partition.get(Role::B),
            partition.get(Role::C),
            partition.get(Role::R),
        );
        let ra: Vec<usize> = r.iter().chain(a).copied().collect();
        obs.max("max |ebits - H(C|B)|", (costs.ebits - conditional_entropy(state, c, b)?).abs());
        obs.max("max cbits - I(RA;C)", costs.cbits - mutual_information(state, &ra, c)?);
        obs.min("min cbits", costs.cbits);
    }
    Ok(obs)
}

fn limit_for(name: &str, tol: &Tolerances) -> f64 {
    match name {
        "min I(C;R|B)" | "min I(X;Y)" | "min Q" | "min cbits" => -tol.inequality,
        "max |I(C;R|A) - I(C;R|B)|" => tol.identity,
        "corner membership failures" => 0.0,
        _ => tol.cost,
    }
}

pub fn run_suite(suite: Suite, options: &VerifyOptions) -> Result<VerifySummary> {
    if options.trials == 0 {
        return Err(Error::InvalidState("trials must be at least 1".into()));
    }
    let dims = match suite {
        Suite::Ssa => Vec::new(),
        Suite::Duality => fixed_dims(options, &[2, 2, 2, 2], 4)?,
        Suite::Composability => fixed_dims(options, &[2, 2, 2, 2, 2], 5)?,
        Suite::SpecialCases => fixed_dims(options, &[2, 2, 2], 3)?,
    };
    let observed = (0..options.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_from_seed(derive_seed(options.seed, &[suite.id(), t as u64]));
            match suite {
                Suite::Ssa => ssa_trial(options, &mut rng),
                Suite::Duality => duality_trial(&dims, &mut rng),
                Suite::Composability => composability_trial(&dims, &mut rng),
                Suite::SpecialCases => special_trial(&dims, &mut rng),
            }
        })
        .try_reduce(Observed::default, |a, b| Ok(a.merge(b)))?;

    let metrics: BTreeMap<String, Metric> = observed
        .0
        .into_iter()
        .map(|(name, (kind, value))| {
            let limit = limit_for(name, &options.tolerances);
            let pass = match kind {
                Bound::Min => value >= limit,
                Bound::Max => value <= limit,
            };
            (name.to_string(), Metric { kind, value, limit, pass })
        })
        .collect();
    let pass = metrics.values().all(|m| m.pass);
    Ok(VerifySummary { suite, trials: options.trials, seed: options.seed, metrics, pass })
}
