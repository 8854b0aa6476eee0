//! Exhaustive error analysis of multiplier models against the exact product:
//! ER, MED, NMED, MRED, max ED, and the full error-distance histogram.
//!
//! Counts and error-distance sums are accumulated as integers and divided
//! only at presentation, so ER and MED are exact. MRED needs a sum of
//! rationals with varying denominators and is accumulated in `f64` in a
//! fixed order, making every sweep deterministic and independent of the
//! worker count.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::build_plan;
use crate::error::{Error, Result};
use crate::mulcore::{enumerate_table, ExprMul331, Mul3x3_1, Multiplier};

/// Exhaustive sweeps are limited to 12 bits per operand side.
pub const SWEEP_CAP_BITS: u32 = 12;

/// Absolute difference between an approximate and an exact product.
pub fn error_distance(approx: u64, exact: u64) -> u64 {
    approx.abs_diff(exact)
}

/// Error metrics of one model over its full input space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub model: String,
    /// Operand bit width per side.
    pub n: u32,
    /// Number of input pairs, `2^(2n)`.
    pub pair_count: u64,
    pub mismatch_count: u64,
    /// Integer sum of error distances over all pairs.
    pub ed_sum: u64,
    pub max_ed: u64,
    /// `mismatch_count / pair_count`.
    pub er: f64,
    /// `ed_sum / pair_count`.
    pub med: f64,
    /// `med / (2^n - 1)^2`.
    pub nmed: f64,
    /// Mean of `ED / exact` over pairs with a nonzero exact product.
    pub mred: f64,
    /// Alternate reading with the approximate value in the denominator:
    /// mean of `ED / approx` over pairs with a nonzero approximate value.
    pub mred_alt: f64,
    pub ed_histogram: BTreeMap<u64, u64>,
}

#[derive(Default)]
struct SweepChunk {
    mismatches: u64,
    ed_sum: u64,
    max_ed: u64,
    mred_num: f64,
    mred_pairs: u64,
    mred_alt_num: f64,
    mred_alt_pairs: u64,
    hist: BTreeMap<u64, u64>,
}

/// Enumerate every input pair of `model` against the exact product.
///
/// Requires square operand widths of at most [`SWEEP_CAP_BITS`] per side.
/// The sweep is partitioned by the `a` operand and merged in fixed order.
pub fn sweep(model: &dyn Multiplier) -> Result<ErrorReport> {
    let n = model.width_a();
    if model.width_b() != n {
        return Err(Error::Format(format!(
            "sweep requires square operand widths, got {}x{}",
            n,
            model.width_b()
        )));
    }
    if n > SWEEP_CAP_BITS {
        return Err(Error::WidthCap { bits: 2 * n, cap: 2 * SWEEP_CAP_BITS });
    }

    let side = 1u32 << n;
    let chunks: Vec<SweepChunk> = (0..side)
        .into_par_iter()
        .map(|a| {
            let mut c = SweepChunk::default();
            for b in 0..side {
                let exact = (a as u64) * (b as u64);
                let approx = model.eval(a, b) as u64;
                let ed = error_distance(approx, exact);
                if ed != 0 {
                    c.mismatches += 1;
                }
                c.ed_sum += ed;
                c.max_ed = c.max_ed.max(ed);
                *c.hist.entry(ed).or_insert(0) += 1;
                if exact != 0 {
                    c.mred_num += ed as f64 / exact as f64;
                    c.mred_pairs += 1;
                }
                if approx != 0 {
                    c.mred_alt_num += ed as f64 / approx as f64;
                    c.mred_alt_pairs += 1;
                }
            }
            c
        })
        .collect();

    let mut total = SweepChunk::default();
    for c in chunks {
        total.mismatches += c.mismatches;
        total.ed_sum += c.ed_sum;
        total.max_ed = total.max_ed.max(c.max_ed);
        total.mred_num += c.mred_num;
        total.mred_pairs += c.mred_pairs;
        total.mred_alt_num += c.mred_alt_num;
        total.mred_alt_pairs += c.mred_alt_pairs;
        for (ed, count) in c.hist {
            *total.hist.entry(ed).or_insert(0) += count;
        }
    }

    let pair_count = 1u64 << (2 * n);
    let max_product = ((1u64 << n) - 1).pow(2);
    let med = total.ed_sum as f64 / pair_count as f64;
    Ok(ErrorReport {
        model: model.name().to_string(),
        n,
        pair_count,
        mismatch_count: total.mismatches,
        ed_sum: total.ed_sum,
        max_ed: total.max_ed,
        er: total.mismatches as f64 / pair_count as f64,
        med,
        nmed: med / max_product as f64,
        mred: if total.mred_pairs == 0 { 0.0 } else { total.mred_num / total.mred_pairs as f64 },
        mred_alt: if total.mred_alt_pairs == 0 {
            0.0
        } else {
            total.mred_alt_num / total.mred_alt_pairs as f64
        },
        ed_histogram: total.hist,
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
}

/// Check that a report's derived fields agree with its integer counts to
/// within 1e-12 relative.
pub fn internal_consistency(report: &ErrorReport) -> bool {
    let max_product = ((1u64 << report.n) - 1).pow(2) as f64;
    let hist_ed_sum: u128 =
        report.ed_histogram.iter().map(|(&ed, &c)| ed as u128 * c as u128).sum();
    let hist_mismatches: u64 =
        report.ed_histogram.iter().filter(|(&ed, _)| ed > 0).map(|(_, &c)| c).sum();
    let hist_pairs: u64 = report.ed_histogram.values().sum();

    close(report.er, report.mismatch_count as f64 / report.pair_count as f64)
        && close(report.med, report.ed_sum as f64 / report.pair_count as f64)
        && close(report.nmed, report.med / max_product)
        && hist_ed_sum == report.ed_sum as u128
        && hist_mismatches == report.mismatch_count
        && hist_pairs == report.pair_count
}

/// Fraction of codes falling in each inclusive `[lo, hi]` range.
pub fn range_histogram(codes: &[u8], ranges: &[(u8, u8)]) -> Result<Vec<f64>> {
    if codes.is_empty() {
        return Err(Error::EmptyInput("range_histogram needs at least one code"));
    }
    Ok(ranges
        .iter()
        .map(|&(lo, hi)| {
            let hits = codes.iter().filter(|&&c| c >= lo && c <= hi).count();
            hits as f64 / codes.len() as f64
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Reference values and reconstruction hypotheses
// ---------------------------------------------------------------------------

/// Published reference error metrics for the three aggregated 8x8 designs.
/// Reconstructed plans are compared against these; they are targets, not
/// ground truth, because the original block wiring is not fully specified.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReferenceMetrics {
    pub name: &'static str,
    pub er_pct: f64,
    pub med: f64,
    pub nmed_pct: f64,
    pub mred_pct: f64,
}

pub const REFERENCE_8X8: [ReferenceMetrics; 3] = [
    ReferenceMetrics { name: "mul8x8_1", er_pct: 22.8, med: 137.04, nmed_pct: 0.21, mred_pct: 1.50 },
    ReferenceMetrics { name: "mul8x8_2", er_pct: 20.49, med: 114.83, nmed_pct: 0.18, mred_pct: 1.42 },
    ReferenceMetrics { name: "mul8x8_3", er_pct: 31.41, med: 648.20, nmed_pct: 1.00, mred_pct: 2.53 },
];

pub fn reference_for(name: &str) -> Option<&'static ReferenceMetrics> {
    REFERENCE_8X8.iter().find(|r| r.name == name)
}

/// Relative-delta distance between a measured report and a reference row:
/// L2 norm over the four relative metric deviations.
pub fn reference_distance(report: &ErrorReport, reference: &ReferenceMetrics) -> f64 {
    let rel = |measured: f64, reference: f64| (measured - reference) / reference;
    let d = [
        rel(report.er * 100.0, reference.er_pct),
        rel(report.med, reference.med),
        rel(report.nmed * 100.0, reference.nmed_pct),
        rel(report.mred * 100.0, reference.mred_pct),
    ];
    d.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Measured-versus-reference deltas for one model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceComparison {
    pub model: String,
    pub reference_er_pct: f64,
    pub measured_er_pct: f64,
    pub er_delta_pp: f64,
    pub reference_med: f64,
    pub measured_med: f64,
    pub med_rel_dev: f64,
    pub distance: f64,
}

pub fn compare_reference(report: &ErrorReport, reference: &ReferenceMetrics) -> ReferenceComparison {
    ReferenceComparison {
        model: report.model.clone(),
        reference_er_pct: reference.er_pct,
        measured_er_pct: report.er * 100.0,
        er_delta_pp: (report.er * 100.0 - reference.er_pct).abs(),
        reference_med: reference.med,
        measured_med: report.med,
        med_rel_dev: (report.med - reference.med).abs() / reference.med,
        distance: reference_distance(report, reference),
    }
}

/// One single-prune reconstruction hypothesis for the pruned design: the
/// second-design plan with one sub-multiplier removed, swept exhaustively
/// and measured against the pruned design's reference row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PruneHypothesis {
    pub pruned_id: u8,
    pub segments: String,
    pub er_pct: f64,
    pub med: f64,
    pub nmed_pct: f64,
    pub mred_pct: f64,
    pub distance_to_reference: f64,
}

/// Sweep every legal single-prune hypothesis (all sub-multipliers except the
/// low-by-low product, whose removal is refused). Because sub-multiplier ids
/// only name segment pairs, this also covers every alternative id-map
/// hypothesis for which product the published "M2" denotes.
pub fn pruning_hypotheses() -> Result<Vec<PruneHypothesis>> {
    let base = build_plan(2)?;
    let reference = &REFERENCE_8X8[2];
    let mut out = Vec::new();
    for id in 0..9u8 {
        let plan = match base.prune(id) {
            Ok(p) => p,
            Err(Error::PruneLowLow) => continue,
            Err(e) => return Err(e),
        };
        let product = plan.products.iter().find(|p| p.id == id).expect("id exists");
        let segments = format!(
            "{}x{}",
            plan.split.segments_a[product.seg_a].label_a(),
            plan.split.segments_b[product.seg_b].label_b()
        );
        let report = sweep(&plan)?;
        out.push(PruneHypothesis {
            pruned_id: id,
            segments,
            er_pct: report.er * 100.0,
            med: report.med,
            nmed_pct: report.nmed * 100.0,
            mred_pct: report.mred * 100.0,
            distance_to_reference: reference_distance(&report, reference),
        });
    }
    Ok(out)
}

/// The hypotheses closest to the reference row. Symmetric prunes produce
/// numerically tied distances, so everything within 1e-9 relative of the
/// minimum is returned, ordered by id.
pub fn closest_hypotheses(hypotheses: &[PruneHypothesis]) -> Vec<&PruneHypothesis> {
    let min = hypotheses
        .iter()
        .map(|h| h.distance_to_reference)
        .fold(f64::INFINITY, f64::min);
    hypotheses
        .iter()
        .filter(|h| h.distance_to_reference <= min * (1.0 + 1e-9))
        .collect()
}

// ---------------------------------------------------------------------------
// Report document
// ---------------------------------------------------------------------------

/// Provenance block carried by every emitted report, so comparison caveats
/// travel with the numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    /// The assumed sub-multiplier index map.
    pub index_map: String,
    /// How each metric is computed.
    pub metric_definitions: Vec<String>,
    /// Known disagreements between published materials and this model set.
    pub flagged_discrepancies: Vec<String>,
}

impl Provenance {
    pub fn current() -> Self {
        Self {
            tool: "approxmul".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            index_map: "row-major: M0=(a_low,b_low) M1=(a_low,b_mid) M2=(a_low,b_high) \
                        M3=(a_mid,b_low) M4=(a_mid,b_mid) M5=(a_mid,b_high) M6=(a_high,b_low) \
                        M7=(a_high,b_mid) M8=(a_high,b_high) with low=bits 2:0, mid=bits 5:3, \
                        high=bits 7:6"
                .into(),
            metric_definitions: vec![
                "ER = mismatching pairs / 2^(2n); MED = sum of ED / 2^(2n) over all input pairs"
                    .into(),
                "NMED = MED / (2^n - 1)^2".into(),
                "MRED = mean of ED/exact over pairs with exact != 0 (primary); mred_alt = mean \
                 of ED/approx over pairs with approx != 0 (alternate reading)"
                    .into(),
            ],
            flagged_discrepancies: standard_discrepancy_flags(),
        }
    }
}

/// Known disagreements, recomputed rather than assumed where possible.
pub fn standard_discrepancy_flags() -> Vec<String> {
    let mut flags = vec![
        "mul3x3_2 row (a=7,b=6): the published row prints value 38, but its output bit \
         columns read 101110 = 46 and the stated construction rule (set O5=1, O4=0 on the \
         first design's bits) also gives 46; both give the printed ED of 4. The bit columns \
         are taken as authoritative, so mul3x3_2(7,6) = 46."
            .to_string(),
    ];

    let table = enumerate_table(&Mul3x3_1).expect("3x3 enumerates");
    let exprs = enumerate_table(&ExprMul331).expect("3x3 enumerates");
    let diffs: Vec<String> = (0..8u32)
        .flat_map(|a| (0..8u32).map(move |b| (a, b)))
        .filter(|&(a, b)| table.get(a, b) != exprs.get(a, b))
        .map(|(a, b)| format!("(a={a},b={b}): expressions {} vs table {}", exprs.get(a, b), table.get(a, b)))
        .collect();
    if !diffs.is_empty() {
        flags.push(format!(
            "the published sum-of-products expressions for mul3x3_1 disagree with its truth \
             table on {} of 64 inputs: {}. A single-literal repair of the second O1 product \
             term (b1 -> b0) restores exact equivalence; the expressions are kept as printed \
             and the table remains the specification.",
            diffs.len(),
            diffs.join("; ")
        ));
    }
    flags
}

/// A complete metrics report file: provenance, per-model reports, and the
/// optional reference comparison and reconstruction-hypothesis sections.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsDocument {
    pub provenance: Provenance,
    pub reports: Vec<ErrorReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_comparison: Option<Vec<ReferenceComparison>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pruning_hypotheses: Option<Vec<PruneHypothesis>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closest_hypothesis: Option<String>,
}

impl MetricsDocument {
    pub fn new(reports: Vec<ErrorReport>) -> Self {
        let comparisons: Vec<ReferenceComparison> = reports
            .iter()
            .filter_map(|r| reference_for(&r.model).map(|rf| compare_reference(r, rf)))
            .collect();
        Self {
            provenance: Provenance::current(),
            reports,
            reference_comparison: if comparisons.is_empty() { None } else { Some(comparisons) },
            pruning_hypotheses: None,
            closest_hypothesis: None,
        }
    }

    /// Attach the single-prune hypothesis sweep and its closest match.
    pub fn with_hypotheses(mut self) -> Result<Self> {
        let hyps = pruning_hypotheses()?;
        let best = closest_hypotheses(&hyps);
        if !best.is_empty() {
            let names: Vec<String> =
                best.iter().map(|h| format!("M{} ({})", h.pruned_id, h.segments)).collect();
            self.closest_hypothesis = Some(format!(
                "prune {}, distance {:.4}",
                names.join(" or "),
                best[0].distance_to_reference
            ));
        }
        self.pruning_hypotheses = Some(hyps);
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("bad report JSON: {e}")))
    }

    /// CSV form: provenance as `#` comment lines, one header row, then one
    /// row per model. Histograms stay in the JSON form.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# tool: {} {}\n", self.provenance.tool, self.provenance.version));
        s.push_str(&format!("# index_map: {}\n", self.provenance.index_map));
        for f in &self.provenance.flagged_discrepancies {
            s.push_str(&format!("# flagged: {f}\n"));
        }
        s.push_str("model,n,pair_count,mismatch_count,er,med,nmed,mred,mred_alt,max_ed,ed_sum\n");
        for r in &self.reports {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.model,
                r.n,
                r.pair_count,
                r.mismatch_count,
                r.er,
                r.med,
                r.nmed,
                r.mred,
                r.mred_alt,
                r.max_ed,
                r.ed_sum
            ));
        }
        s
    }

    pub fn write_file(&self, path: &Path, csv: bool) -> Result<()> {
        let text = if csv { self.to_csv() } else { self.to_json() };
        fs::write(path, text)?;
        Ok(())
    }
}

impl crate::aggregate::Segment {
    fn label_a(&self) -> String {
        match self.offset {
            0 => "a_low".into(),
            3 => "a_mid".into(),
            _ => "a_high".into(),
        }
    }
    fn label_b(&self) -> String {
        match self.offset {
            0 => "b_low".into(),
            3 => "b_mid".into(),
            _ => "b_high".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::exact_plan;
    use crate::mulcore::{ExactModel, Mul3x3_2};

    #[test]
    fn error_distance_examples() {
        assert_eq!(error_distance(29, 49), 20);
        assert_eq!(error_distance(40, 36), 4);
        assert_eq!(error_distance(123, 123), 0);
    }

    #[test]
    fn sweep_3x3_designs_exactly() {
        let r1 = sweep(&Mul3x3_1).unwrap();
        assert_eq!(r1.mismatch_count, 6);
        assert_eq!(r1.ed_sum, 72);
        assert_eq!(r1.er, 6.0 / 64.0); // 9.375%
        assert_eq!(r1.med, 1.125);
        assert_eq!(r1.max_ed, 20);
        let expected: BTreeMap<u64, u64> = [(0, 58), (8, 2), (12, 3), (20, 1)].into();
        assert_eq!(r1.ed_histogram, expected);

        let r2 = sweep(&Mul3x3_2).unwrap();
        assert_eq!(r2.er, 6.0 / 64.0);
        assert_eq!(r2.med, 0.5);
    }

    #[test]
    fn sweep_exact_model_is_zero() {
        let r = sweep(&ExactModel::new(3)).unwrap();
        assert_eq!(r.mismatch_count, 0);
        assert_eq!(r.er, 0.0);
        assert_eq!(r.med, 0.0);
        assert_eq!(r.mred, 0.0);
        assert_eq!(r.nmed, 0.0);
        assert!(internal_consistency(&r));
    }

    #[test]
    fn sweep_rejects_wide_models() {
        assert!(matches!(sweep(&ExactModel::new(13)), Err(Error::WidthCap { .. })));
    }

    #[test]
    fn sweep_8x8_regression() {
        // Cross-checked against an independent enumeration of the same plans.
        let r1 = sweep(&build_plan(1).unwrap()).unwrap();
        assert_eq!(r1.mismatch_count, 17824);
        assert_eq!(r1.ed_sum, 5_971_968); // MED 91.125
        let r2 = sweep(&build_plan(2).unwrap()).unwrap();
        assert_eq!(r2.mismatch_count, 17824);
        assert_eq!(r2.ed_sum, 2_557_696); // MED 39.02734375
        let r3 = sweep(&build_plan(3).unwrap()).unwrap();
        assert_eq!(r3.mismatch_count, 48304);
        assert_eq!(r3.ed_sum, 23_434_944);
        for r in [&r1, &r2, &r3] {
            assert!(internal_consistency(r));
        }
        let exact = sweep(&exact_plan()).unwrap();
        assert_eq!(exact.mismatch_count, 0);
    }

    #[test]
    fn reference_rows_are_self_consistent() {
        // NMED = MED / 65025 holds for the published rows themselves.
        assert!((REFERENCE_8X8[0].med / 65025.0 * 100.0 - 0.21).abs() < 0.005);
        assert!((REFERENCE_8X8[2].med / 65025.0 * 100.0 - 1.00).abs() < 0.005);
    }

    #[test]
    fn internal_consistency_catches_corruption() {
        let mut r = sweep(&Mul3x3_1).unwrap();
        assert!(internal_consistency(&r));
        r.er += 1e-6;
        assert!(!internal_consistency(&r));
    }

    #[test]
    fn range_histogram_examples() {
        let zeros = vec![0u8; 100];
        assert_eq!(range_histogram(&zeros, &[(0, 31)]).unwrap(), vec![1.0]);

        let uniform: Vec<u8> = (0..=255).collect();
        assert_eq!(range_histogram(&uniform, &[(96, 159)]).unwrap(), vec![0.25]);

        // disjoint covering ranges sum to 1
        let fr = range_histogram(&uniform, &[(0, 31), (32, 95), (96, 159), (160, 255)]).unwrap();
        assert!((fr.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        assert!(matches!(range_histogram(&[], &[(0, 1)]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn hypotheses_cover_every_legal_prune() {
        let hyps = pruning_hypotheses().unwrap();
        let ids: Vec<u8> = hyps.iter().map(|h| h.pruned_id).collect();
        assert_eq!(ids, vec![1, 2, 3, 4, 5, 6, 7, 8]);
        // The closest hypotheses are the symmetric low-by-high pair, the
        // same pair the pruned design names.
        let best: Vec<u8> = closest_hypotheses(&hyps).iter().map(|h| h.pruned_id).collect();
        assert_eq!(best, vec![2, 6]);
    }

    #[test]
    fn json_report_round_trip() {
        let doc = MetricsDocument::new(vec![sweep(&Mul3x3_1).unwrap()]);
        let json = doc.to_json();
        let back = MetricsDocument::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert_eq!(back.reports[0], doc.reports[0]);
    }

    #[test]
    fn csv_has_header_and_one_row_per_model() {
        let doc = MetricsDocument::new(vec![
            sweep(&Mul3x3_1).unwrap(),
            sweep(&Mul3x3_2).unwrap(),
        ]);
        let csv = doc.to_csv();
        let data_lines: Vec<&str> =
            csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data_lines.len(), 3); // header + 2 models
        assert!(data_lines[0].starts_with("model,n,"));
    }

    #[test]
    fn discrepancy_flags_include_known_findings() {
        let flags = standard_discrepancy_flags();
        assert!(flags.iter().any(|f| f.contains("(a=7,b=6)") && f.contains("46")));
        assert!(flags.iter().any(|f| f.contains("expressions") && f.contains("4 of 64")));
    }
}
