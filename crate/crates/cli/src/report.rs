//! The per-space analysis summary shared by `rank` and the HTTP service.

use std::fmt::Write;

use serde::Serialize;

use scottrank::isometry::{autoisometries, is_ultrahomogeneous};
use scottrank::{refine, Error, MetricSpace, Rank, RefinementTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankedMap {
    pub map: String,
    pub rank: Rank,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub n: usize,
    pub scott_rank: u32,
    pub sr_literal: u32,
    /// A map realizing the Scott rank, if it is positive.
    pub witness: Option<String>,
    pub alpha_star: u32,
    pub level_sizes: Vec<usize>,
    pub group_order: usize,
    pub ultrahomogeneous: bool,
    /// Maps of the highest finite rank.
    pub worst_pairs: Vec<RankedMap>,
}

impl AnalysisReport {
    pub fn build(space: &MetricSpace, table: &RefinementTable) -> Result<AnalysisReport, Error> {
        let sr = table.scott_rank();
        Ok(AnalysisReport {
            n: space.n(),
            scott_rank: sr.value,
            sr_literal: sr.literal,
            witness: sr.witness.map(|m| m.to_string()),
            alpha_star: table.alpha_star(),
            level_sizes: table.level_sizes().to_vec(),
            group_order: autoisometries(space)?.len(),
            ultrahomogeneous: is_ultrahomogeneous(space)?,
            worst_pairs: table
                .worst_pairs()
                .into_iter()
                .map(|(m, rank)| RankedMap { map: m.to_string(), rank })
                .collect(),
        })
    }

    pub fn analyze(space: &MetricSpace) -> Result<(RefinementTable, AnalysisReport), Error> {
        let table = refine(space)?;
        let report = AnalysisReport::build(space, &table)?;
        Ok((table, report))
    }

    /// `sr = 2, alpha* = 1, |Iso| = 2, ultrahomogeneous: no`
    pub fn headline(&self) -> String {
        format!(
            "sr = {}, alpha* = {}, |Iso| = {}, ultrahomogeneous: {}",
            self.scott_rank,
            self.alpha_star,
            self.group_order,
            if self.ultrahomogeneous { "yes" } else { "no" }
        )
    }

    pub fn render(&self, literal_sup: bool) -> String {
        let mut out = self.headline();
        out.push('\n');
        if literal_sup {
            writeln!(out, "sr_literal = {}", self.sr_literal).unwrap();
        }
        if let Some(w) = &self.witness {
            writeln!(out, "witness: {w}").unwrap();
        }
        writeln!(out, "level sizes: {:?}", self.level_sizes).unwrap();
        out
    }
}

/// Every map of finite rank, one per line.
pub fn render_pairs(table: &RefinementTable) -> String {
    let mut out = String::new();
    for (m, r) in table.entries().filter(|(_, r)| !r.is_top()) {
        writeln!(out, "  {m}  rank {r}").unwrap();
    }
    if out.is_empty() {
        out.push_str("  every distance-preserving map has rank top\n");
    }
    out
}
