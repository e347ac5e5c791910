//! MR test campaigns over the two model variants.
//!
//! A relation passes on an implementation when the morphed input
//! reproduces the source energy series within tolerance on every sample.
//! A relation is defect-revealing when it passes on the cyclic variant
//! and fails on the non-cyclic one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::layout::{flatten, unflatten};
use crate::model::{energy_pipeline, BoundaryVariant, GridSpec, ModelInput};
use crate::mr::AffineMr;

/// Relative-deviation floor so exact zeros do not divide by zero.
pub const DEVIATION_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of one (MR, variant) pair over the input samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrTestResult {
    pub mr: String,
    pub variant: BoundaryVariant,
    /// Per input sample: max over t of |e_morphed - e_source| /
    /// (|e_source| + floor).
    pub deviations: Vec<f64>,
    pub verdict: Verdict,
}

impl MrTestResult {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Time series of one (MR, variant) pair on the first input, for the
/// stacked-panel plots.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRecord {
    pub mr: String,
    pub variant: BoundaryVariant,
    pub t: Vec<f64>,
    pub e_source: Vec<f64>,
    pub e_morphed: Vec<f64>,
}

impl SeriesRecord {
    /// CSV with header `t,e_source,e_morphed`, full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,e_source,e_morphed\n");
        for i in 0..self.t.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.t[i], self.e_source[i], self.e_morphed[i]
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub grid: GridSpec,
    pub seeds: Vec<u64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub mr: String,
    pub defect_revealing: bool,
}

/// Per-MR, per-variant results plus the defect-detection summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub manifest: CampaignManifest,
    pub results: Vec<MrTestResult>,
    pub detection: Vec<DetectionRecord>,
}

/// Everything a campaign produces: the report and the plot series.
#[derive(Debug, Clone)]
pub struct CampaignOutput {
    pub report: CampaignReport,
    pub series: Vec<SeriesRecord>,
}

fn evaluate_pair(
    mr: &AffineMr,
    variant: BoundaryVariant,
    inputs: &[ModelInput],
    tolerance: f64,
) -> Result<(MrTestResult, SeriesRecord)> {
    let layout = mr.layout;
    let out_layout = mr.output_layout();
    let mut deviations = Vec::with_capacity(inputs.len());
    let mut series: Option<SeriesRecord> = None;
    for input in inputs {
        let source = energy_pipeline(input, variant)?;
        let flat = flatten(input, &layout)?;
        let morphed_vec = mr.apply(&flat)?;
        let morphed = unflatten(&morphed_vec, &out_layout)?;
        let follow_up = energy_pipeline(&morphed, variant)?;
        if follow_up.e.len() != source.e.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}", source.e.len()),
                got: format!("{}", follow_up.e.len()),
            });
        }
        let dev = source
            .e
            .iter()
            .zip(follow_up.e.iter())
            .map(|(s, m)| (m - s).abs() / (s.abs() + DEVIATION_FLOOR))
            .fold(0.0, f64::max);
        deviations.push(dev);
        if series.is_none() {
            series = Some(SeriesRecord {
                mr: mr.label.clone(),
                variant,
                t: input.ts.to_vec(),
                e_source: source.e.clone(),
                e_morphed: follow_up.e.clone(),
            });
        }
    }
    let verdict = if deviations.iter().all(|d| *d < tolerance) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok((
        MrTestResult {
            mr: mr.label.clone(),
            variant,
            deviations,
            verdict,
        },
        series.expect("inputs checked non-empty"),
    ))
}

/// Applies one MR to every input under one variant and judges it.
pub fn run_mr_test(
    mr: &AffineMr,
    variant: BoundaryVariant,
    inputs: &[ModelInput],
    tolerance: f64,
) -> Result<MrTestResult> {
    if inputs.is_empty() {
        return Err(Error::validation("run_mr_test needs at least one input"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    Ok(evaluate_pair(mr, variant, inputs, tolerance)?.0)
}

/// Runs the cross product of MRs and variants. Results are ordered by
/// (mr label, variant); evaluation may run in parallel, assembly is
/// deterministic.
pub fn run_campaign(
    mrs: &[AffineMr],
    variants: &[BoundaryVariant],
    inputs: &[ModelInput],
    tolerance: f64,
    manifest: CampaignManifest,
) -> Result<CampaignOutput> {
    if mrs.is_empty() {
        return Err(Error::validation("campaign needs at least one MR"));
    }
    if inputs.is_empty() {
        return Err(Error::validation("campaign needs at least one input"));
    }
    if !(tolerance > 0.0) {
        return Err(Error::validation("tolerance must be positive"));
    }
    let mut pairs: Vec<(&AffineMr, BoundaryVariant)> = Vec::new();
    for mr in mrs {
        for &variant in variants {
            pairs.push((mr, variant));
        }
    }
    let evaluated: Vec<(MrTestResult, SeriesRecord)> = pairs
        .par_iter()
        .map(|(mr, variant)| evaluate_pair(mr, *variant, inputs, tolerance))
        .collect::<Result<Vec<_>>>()?;

    let mut indexed: Vec<(MrTestResult, SeriesRecord)> = evaluated;
    indexed.sort_by(|a, b| {
        (a.0.mr.as_str(), a.0.variant.label()).cmp(&(b.0.mr.as_str(), b.0.variant.label()))
    });
    let (results, series): (Vec<_>, Vec<_>) = indexed.into_iter().unzip();

    let mut detection = Vec::new();
    if variants.contains(&BoundaryVariant::Cyclic) && variants.contains(&BoundaryVariant::NonCyclic)
    {
        for mr in mrs {
            let verdict_of = |variant: BoundaryVariant| {
                results
                    .iter()
                    .find(|r| r.mr == mr.label && r.variant == variant)
                    .map(|r| r.verdict)
            };
            if let (Some(on_cyclic), Some(on_noncyclic)) =
                (verdict_of(BoundaryVariant::Cyclic), verdict_of(BoundaryVariant::NonCyclic))
            {
                detection.push(DetectionRecord {
                    mr: mr.label.clone(),
                    defect_revealing: on_cyclic == Verdict::Pass && on_noncyclic == Verdict::Fail,
                });
            }
        }
        detection.sort_by(|a, b| a.mr.cmp(&b.mr));
    }

    Ok(CampaignOutput {
        report: CampaignReport {
            manifest,
            results,
            detection,
        },
        series,
    })
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '_' })
        .collect()
}

/// Writes `report.json` plus one `series/NNN_<mr>_<variant>.csv` per
/// (MR, variant) pair into `dir`. Re-exporting the same output writes
/// identical bytes.
pub fn export_report(output: &CampaignOutput, dir: &Path) -> Result<()> {
    let series_dir = dir.join("series");
    std::fs::create_dir_all(&series_dir)
        .map_err(|e| Error::io(series_dir.display().to_string(), e))?;
    let report_path = dir.join("report.json");
    let json = serde_json::to_string_pretty(&output.report)?;
    std::fs::write(&report_path, json.as_bytes())
        .map_err(|e| Error::io(report_path.display().to_string(), e))?;
    for (n, s) in output.series.iter().enumerate() {
        let name = format!("{:03}_{}_{}.csv", n, sanitize(&s.mr), s.variant.label());
        let path = series_dir.join(name);
        std::fs::write(&path, s.to_csv().as_bytes())
            .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    Ok(())
}

/// Reads back a report written by [`export_report`].
pub fn load_report(path: &Path) -> Result<CampaignReport> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::FlatLayout;
    use crate::model::random_sea_level;
    use crate::mr::{catalogue_mr, fig1_catalogue, identity_mr, CatalogueKind};

    const BOTH: [BoundaryVariant; 2] = [BoundaryVariant::Cyclic, BoundaryVariant::NonCyclic];

    fn campaign_inputs(n: usize) -> (GridSpec, Vec<u64>, Vec<ModelInput>) {
        let spec = GridSpec::new(6, 8, 4, 1000.0, 1000.0, 3600.0);
        let seeds: Vec<u64> = (100..100 + n as u64).collect();
        let inputs = seeds
            .iter()
            .map(|&s| random_sea_level(&spec, s, 1.0).unwrap())
            .collect();
        (spec, seeds, inputs)
    }

    #[test]
    fn identity_mr_passes_exactly() {
        let (spec, _, inputs) = campaign_inputs(3);
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let id = identity_mr(layout);
        for variant in BOTH {
            let result = run_mr_test(&id, variant, &inputs, 1e-9).unwrap();
            assert_eq!(result.verdict, Verdict::Pass);
            assert!(result.deviations.iter().all(|d| *d == 0.0));
        }
    }

    #[test]
    fn cyclic_shift_passes_on_cyclic_fails_on_noncyclic() {
        let (spec, _, inputs) = campaign_inputs(4);
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let shift = catalogue_mr(CatalogueKind::CyclicShiftX { shift: 3 }, layout).unwrap();
        let on_cyclic = run_mr_test(&shift, BoundaryVariant::Cyclic, &inputs, 1e-9).unwrap();
        assert_eq!(on_cyclic.verdict, Verdict::Pass);
        assert!(on_cyclic.max_deviation() < 1e-12);
        let on_noncyclic = run_mr_test(&shift, BoundaryVariant::NonCyclic, &inputs, 1e-9).unwrap();
        assert_eq!(on_noncyclic.verdict, Verdict::Fail);
        assert!(on_noncyclic.max_deviation() > 1e-3);
    }

    #[test]
    fn campaign_flags_exactly_the_cyclic_shifts() {
        let (spec, seeds, inputs) = campaign_inputs(4);
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let catalogue = fig1_catalogue(layout).unwrap();
        let manifest = CampaignManifest {
            grid: spec,
            seeds,
            tolerance: 1e-9,
        };
        let output = run_campaign(&catalogue, &BOTH, &inputs, 1e-9, manifest).unwrap();
        assert_eq!(output.report.results.len(), 2 * catalogue.len());
        let revealing: Vec<&str> = output
            .report
            .detection
            .iter()
            .filter(|d| d.defect_revealing)
            .map(|d| d.mr.as_str())
            .collect();
        assert_eq!(revealing, vec!["cyclic_shift_x(3)", "cyclic_shift_y(3)"]);
    }

    #[test]
    fn every_pair_appears_exactly_once_and_sorted() {
        let (spec, seeds, inputs) = campaign_inputs(2);
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let catalogue = fig1_catalogue(layout).unwrap();
        let manifest = CampaignManifest {
            grid: spec,
            seeds,
            tolerance: 1e-9,
        };
        let output = run_campaign(&catalogue, &BOTH, &inputs, 1e-9, manifest).unwrap();
        let mut keys: Vec<(String, String)> = output
            .report
            .results
            .iter()
            .map(|r| (r.mr.clone(), r.variant.label().to_string()))
            .collect();
        let sorted = {
            let mut s = keys.clone();
            s.sort();
            s
        };
        assert_eq!(keys, sorted);
        keys.dedup();
        assert_eq!(keys.len(), 2 * catalogue.len());
    }

    #[test]
    fn verdict_matches_the_serialized_deviations() {
        let (spec, seeds, inputs) = campaign_inputs(3);
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let catalogue = fig1_catalogue(layout).unwrap();
        let manifest = CampaignManifest {
            grid: spec,
            seeds,
            tolerance: 1e-9,
        };
        let output = run_campaign(&catalogue, &BOTH, &inputs, 1e-9, manifest).unwrap();
        for r in &output.report.results {
            let recheck = r.deviations.iter().all(|d| *d < 1e-9);
            assert_eq!(recheck, r.verdict == Verdict::Pass, "{} on {:?}", r.mr, r.variant);
        }
    }

    #[test]
    fn raising_tolerance_never_flips_pass_to_fail() {
        let (spec, _, inputs) = campaign_inputs(3);
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let shift = catalogue_mr(CatalogueKind::CyclicShiftY { shift: 1 }, layout).unwrap();
        for variant in BOTH {
            let tight = run_mr_test(&shift, variant, &inputs, 1e-12).unwrap();
            let loose = run_mr_test(&shift, variant, &inputs, 1e-3).unwrap();
            if tight.verdict == Verdict::Pass {
                assert_eq!(loose.verdict, Verdict::Pass);
            }
        }
    }

    #[test]
    fn export_is_deterministic_and_round_trips() {
        let (spec, seeds, inputs) = campaign_inputs(2);
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let catalogue = vec![
            catalogue_mr(CatalogueKind::ReverseX, layout).unwrap(),
            catalogue_mr(CatalogueKind::CyclicShiftX { shift: 1 }, layout).unwrap(),
        ];
        let manifest = CampaignManifest {
            grid: spec,
            seeds,
            tolerance: 1e-9,
        };
        let output = run_campaign(&catalogue, &BOTH, &inputs, 1e-9, manifest).unwrap();

        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        export_report(&output, dir1.path()).unwrap();
        export_report(&output, dir2.path()).unwrap();

        let report1 = load_report(&dir1.path().join("report.json")).unwrap();
        assert_eq!(report1, output.report);

        let bytes1 = std::fs::read(dir1.path().join("report.json")).unwrap();
        let bytes2 = std::fs::read(dir2.path().join("report.json")).unwrap();
        assert_eq!(bytes1, bytes2);

        let mut csvs: Vec<_> = std::fs::read_dir(dir1.path().join("series"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        csvs.sort();
        assert_eq!(csvs.len(), 2 * catalogue.len());
        let first = std::fs::read_to_string(&csvs[0]).unwrap();
        assert!(first.starts_with("t,e_source,e_morphed\n"));
        assert_eq!(first.trim_end().lines().count(), 1 + spec.nt);
    }

    #[test]
    fn empty_mr_list_is_a_precondition_failure() {
        let (spec, seeds, inputs) = campaign_inputs(1);
        let manifest = CampaignManifest {
            grid: spec,
            seeds,
            tolerance: 1e-9,
        };
        assert!(run_campaign(&[], &BOTH, &inputs, 1e-9, manifest).is_err());
    }

    #[test]
    fn transpose_works_across_companion_layouts() {
        let (spec, _, inputs) = campaign_inputs(2);
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let transpose = catalogue_mr(CatalogueKind::TransposeXy, layout).unwrap();
        for variant in BOTH {
            let result = run_mr_test(&transpose, variant, &inputs, 1e-9).unwrap();
            assert_eq!(result.verdict, Verdict::Pass, "transpose on {variant:?}");
        }
    }
}
