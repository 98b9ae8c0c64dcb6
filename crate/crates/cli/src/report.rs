//! Evaluation of a parsed document and rendering of every command's output.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use qredist::decouple::{DecoupleRow, CSV_HEADER};
use qredist::entropy::full_report;
use qredist::statespec::StateDocument;
use qredist::tasks::{
    composability_check, merging_costs, redistribution_corner, redistribution_region, time_reversal_dual,
    ComposabilityRecord,
};
use qredist::verify::{Bound, VerifySummary};
use qredist::{CostPair, CostRegion, MergingCosts, Result};

#[derive(Debug, Serialize)]
pub struct Evaluation {
    pub dims: Vec<usize>,
    pub roles: Vec<String>,
    pub entropies: BTreeMap<String, f64>,
    pub derived: BTreeMap<String, f64>,
    pub region: CostRegion,
    pub corner: CostPair,
    pub dual: CostPair,
    pub merging: MergingCosts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composability: Option<ComposabilityRecord>,
}

pub fn evaluate(doc: &StateDocument) -> Result<Evaluation> {
    let state = doc.to_state()?;
    let partition = doc.partition();
    let report = full_report(&state, &partition)?;
    let composability = if partition.has_d() { Some(composability_check(&state, &partition)?) } else { None };
    Ok(Evaluation {
        dims: doc.dims.clone(),
        roles: doc.roles.iter().map(|r| r.to_string()).collect(),
        entropies: report.entropies,
        derived: report.derived,
        region: redistribution_region(&state, &partition)?,
        corner: redistribution_corner(&state, &partition)?,
        dual: time_reversal_dual(&state, &partition)?,
        merging: merging_costs(&state, &partition)?,
        composability,
    })
}

pub fn pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

pub fn to_json(eval: &Evaluation) -> String {
    pretty_json(eval)
}

/// `x` rounded to five significant digits.
pub fn sig5(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..5).contains(&magnitude) {
        return format!("{x:.4e}");
    }
    let decimals = (4 - magnitude) as usize;
    format!("{x:.decimals$}")
}

pub fn to_text(eval: &Evaluation) -> String {
    let mut out = String::new();
    let dims: Vec<String> = eval.dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "dims:  {}", dims.join(" "));
    let _ = writeln!(out, "roles: {}", eval.roles.join(" "));
    let _ = writeln!(out, "\nentropies (bits)");
    for (k, v) in &eval.entropies {
        let _ = writeln!(out, "  H({k}) = {}", sig5(*v));
    }
    let _ = writeln!(out, "\nderived (bits)");
    for (k, v) in &eval.derived {
        let _ = writeln!(out, "  {k} = {}", sig5(*v));
    }
    let _ = writeln!(out, "\nachievable region");
    let _ = writeln!(out, "  Q     >= {}", sig5(eval.region.q_bound()));
    let _ = writeln!(out, "  Q + E >= {}", sig5(eval.region.sum_bound()));
    let _ = writeln!(out, "\noptimal corner   Q = {}  E = {}", sig5(eval.corner.q), sig5(eval.corner.e));
    if let Some(full) = eval.derived.get("I(C;R|B)") {
        let _ = writeln!(out, "  (Q is half of I(C;R|B) = {})", sig5(*full));
    }
    let _ = writeln!(out, "time-reversed    Q = {}  E = {}", sig5(eval.dual.q), sig5(eval.dual.e));
    let _ = writeln!(out, "merging          ebits = {}  cbits = {}", sig5(eval.merging.ebits), sig5(eval.merging.cbits));
    if let Some(c) = &eval.composability {
        let _ = writeln!(out, "\ncomposability");
        let _ = writeln!(out, "  joint       Q = {}  E = {}", sig5(c.joint.q), sig5(c.joint.e));
        let _ = writeln!(out, "  sequential  Q = {}  E = {}", sig5(c.sequential.q), sig5(c.sequential.e));
        let _ = writeln!(out, "  max deviation = {}", sig5(c.max_deviation));
    }
    out
}

pub fn to_csv(eval: &Evaluation) -> String {
    let mut out = String::from("section,key,value\n");
    let mut row = |section: &str, key: &str, value: f64| {
        let _ = writeln!(out, "{section},\"{key}\",{value:?}");
    };
    for (k, v) in &eval.entropies {
        row("entropy", k, *v);
    }
    for (k, v) in &eval.derived {
        row("derived", k, *v);
    }
    row("region", "Q", eval.region.q_bound());
    row("region", "Q+E", eval.region.sum_bound());
    row("corner", "Q", eval.corner.q);
    row("corner", "E", eval.corner.e);
    row("dual", "Q", eval.dual.q);
    row("dual", "E", eval.dual.e);
    row("merging", "ebits", eval.merging.ebits);
    row("merging", "cbits", eval.merging.cbits);
    if let Some(c) = &eval.composability {
        row("composability", "joint Q", c.joint.q);
        row("composability", "joint E", c.joint.e);
        row("composability", "sequential Q", c.sequential.q);
        row("composability", "sequential E", c.sequential.e);
        row("composability", "max deviation", c.max_deviation);
    }
    out
}

fn bound_symbol(kind: Bound) -> &'static str {
    match kind {
        Bound::Min => ">=",
        Bound::Max => "<=",
    }
}

pub fn verify_text(summary: &VerifySummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "suite {}  trials {}  seed {}", summary.suite, summary.trials, summary.seed);
    for (name, m) in &summary.metrics {
        let status = if m.pass { "ok  " } else { "FAIL" };
        let _ = writeln!(out, "  {status} {name} = {:e}  (need {} {:e})", m.value, bound_symbol(m.kind), m.limit);
    }
    let _ = writeln!(out, "{}", if summary.pass { "PASS" } else { "FAIL" });
    out
}

pub fn verify_csv(summary: &VerifySummary) -> String {
    let mut out = String::from("metric,bound,value,limit,pass\n");
    for (name, m) in &summary.metrics {
        let bound = match m.kind {
            Bound::Min => "min",
            Bound::Max => "max",
        };
        let _ = writeln!(out, "{name},{bound},{:?},{:?},{}", m.value, m.limit, m.pass);
    }
    out
}

#[derive(Serialize)]
struct DecoupleJsonRow<'a> {
    #[serde(flatten)]
    row: &'a DecoupleRow,
    log2_d1: f64,
}

pub fn decouple_json(rows: &[DecoupleRow]) -> String {
    let rows: Vec<_> = rows.iter().map(|row| DecoupleJsonRow { row, log2_d1: row.log2_d1() }).collect();
    pretty_json(&rows)
}

pub fn decouple_text(rows: &[DecoupleRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", CSV_HEADER.replace(',', "  "));
    for row in rows {
        let _ = writeln!(
            out,
            "{}  {}  {}  {}  {}",
            row.d1,
            sig5(row.log2_d1()),
            sig5(row.mean_distance),
            sig5(row.std_distance),
            sig5(row.threshold)
        );
    }
    out
}
