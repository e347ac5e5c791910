//! Post-processing of discovered MRs.
//!
//! Discovered relations are stacked as flat parameter rows; the top
//! principal components of the column covariance point at the input
//! attributes that vary most across relations. Those attributes feed the
//! targeted search ([`crate::search::targeted_discover`]), and candidate
//! relations can be matched against the catalogue and its pairwise
//! compositions.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{Block, FlatLayout};
use crate::mr::{compose, mr_distance, AffineMr, MrSet};

/// What one parameter-matrix column is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamLabel {
    Gamma { row: usize, col: usize },
    Beta { slot: usize },
}

impl ParamLabel {
    /// The input attribute this parameter writes to: the Γ row or the β
    /// slot.
    pub fn attribute(&self, layout: &FlatLayout) -> Result<(Block, usize)> {
        match *self {
            ParamLabel::Gamma { row, .. } => layout.locate(row),
            ParamLabel::Beta { slot } => layout.locate(slot),
        }
    }
}

/// One flattened parameter row per discovered MR.
#[derive(Debug, Clone)]
pub struct ParameterMatrix {
    pub layout: FlatLayout,
    /// rows × (d² + d)
    pub rows: Array2<f64>,
    pub column_labels: Vec<ParamLabel>,
}

/// Flat column labels for a layout: Γ row-major, then β.
fn column_labels(layout: &FlatLayout) -> Vec<ParamLabel> {
    let d = layout.total_dim();
    let mut labels = Vec::with_capacity(d * d + d);
    for row in 0..d {
        for col in 0..d {
            labels.push(ParamLabel::Gamma { row, col });
        }
    }
    for slot in 0..d {
        labels.push(ParamLabel::Beta { slot });
    }
    labels
}

/// Stacks the discovered members of a set into a parameter matrix.
/// Identity and catalogue members contribute no rows.
pub fn parameter_matrix(set: &MrSet) -> Result<ParameterMatrix> {
    let discovered: Vec<&AffineMr> = set.discovered().collect();
    if discovered.is_empty() {
        return Err(Error::validation(
            "parameter matrix needs at least one discovered member",
        ));
    }
    let layout = discovered[0].layout;
    let d = layout.total_dim();
    let width = d * d + d;
    let mut rows = Array2::zeros((discovered.len(), width));
    for (r, mr) in discovered.iter().enumerate() {
        if mr.layout != layout {
            return Err(Error::ShapeMismatch {
                expected: format!("{layout:?}"),
                got: format!("{:?}", mr.layout),
            });
        }
        let (gamma, beta) = mr.to_dense()?;
        for i in 0..d {
            for j in 0..d {
                rows[(r, i * d + j)] = gamma[(i, j)];
            }
        }
        for i in 0..d {
            rows[(r, d * d + i)] = beta[i];
        }
    }
    Ok(ParameterMatrix {
        layout,
        rows,
        column_labels: column_labels(&layout),
    })
}

/// Eigenvalues, components and per-block loading mass of the parameter
/// covariance.
#[derive(Debug, Clone)]
pub struct VarianceReport {
    /// Descending, non-negative.
    pub eigenvalues: Vec<f64>,
    /// Unit vectors matching `eigenvalues`, each of column length.
    pub components: Vec<Array1<f64>>,
    /// Per column, summed squared loading across the retained components.
    pub column_scores: Vec<f64>,
    /// Loading mass per input block, G and F merged as "constants";
    /// sums to one.
    pub attribute_scores: BTreeMap<String, f64>,
}

impl VarianceReport {
    /// The pinned export schema: eigenvalues plus block scores.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "eigenvalues": self.eigenvalues,
            "attribute_scores": self.attribute_scores,
        })
    }

    /// Column rank table: rank, column, kind, score.
    pub fn to_rank_csv(&self, labels: &[ParamLabel]) -> String {
        let mut order: Vec<usize> = (0..self.column_scores.len()).collect();
        order.sort_by(|&a, &b| {
            self.column_scores[b]
                .partial_cmp(&self.column_scores[a])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut out = String::from("rank,column,label,score\n");
        for (rank, &c) in order.iter().enumerate() {
            let label = match labels[c] {
                ParamLabel::Gamma { row, col } => format!("gamma[{row}][{col}]"),
                ParamLabel::Beta { slot } => format!("beta[{slot}]"),
            };
            out.push_str(&format!("{},{},{},{}\n", rank, c, label, self.column_scores[c]));
        }
        out
    }
}

fn block_score_key(block: Block) -> &'static str {
    match block {
        Block::Eta => "eta",
        Block::Xs => "xs",
        Block::Ys => "ys",
        Block::Ts => "ts",
        Block::G | Block::F => "constants",
    }
}

/// Applies the column covariance of the centered rows to v without
/// materializing the covariance matrix.
fn covariance_apply(centered: &Array2<f64>, v: &Array1<f64>) -> Array1<f64> {
    let w = centered.dot(v);
    centered.t().dot(&w) / (centered.nrows() as f64 - 1.0)
}

const POWER_ITERATION_CAP: usize = 10_000;

/// Top-k eigenpairs of the column covariance via power iteration with
/// deflation and re-orthogonalization.
pub fn covariance_eigenanalysis(m: &ParameterMatrix, k: usize) -> Result<VarianceReport> {
    let rows = m.rows.nrows();
    let cols = m.rows.ncols();
    if rows < 2 {
        return Err(Error::validation("eigenanalysis needs at least two rows"));
    }
    if k == 0 || k > rows.saturating_sub(1).min(cols) {
        return Err(Error::validation(format!(
            "k must be in 1..=min(rows-1, columns) = {}, got {k}",
            rows.saturating_sub(1).min(cols)
        )));
    }

    // Center the columns.
    let mut centered = m.rows.clone();
    for mut col in centered.columns_mut() {
        let mean = col.sum() / rows as f64;
        col.mapv_inplace(|v| v - mean);
    }

    let mut eigenvalues = Vec::with_capacity(k);
    let mut components: Vec<Array1<f64>> = Vec::with_capacity(k);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0000);
    let mut scale = 0.0f64;

    for _ in 0..k {
        let mut v = Array1::from_shape_simple_fn(cols, || rng.random_range(-1.0..1.0));
        let mut lambda = 0.0;
        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..POWER_ITERATION_CAP {
            // Stay orthogonal to the components found so far.
            for c in &components {
                let proj = c.dot(&v);
                v = v - &(c * proj);
            }
            let norm = v.dot(&v).sqrt();
            if norm == 0.0 {
                // Fully deflated direction: a zero eigenvalue.
                v = Array1::from_shape_simple_fn(cols, || rng.random_range(-1.0..1.0));
                for c in &components {
                    let proj = c.dot(&v);
                    v = v - &(c * proj);
                }
                let n2 = v.dot(&v).sqrt();
                v /= n2;
                lambda = 0.0;
                converged = true;
                break;
            }
            v /= norm;

            let mut w = covariance_apply(&centered, &v);
            for c in &components {
                let proj = c.dot(&w);
                w = w - &(c * proj);
            }
            lambda = v.dot(&w);
            let wnorm = w.dot(&w).sqrt();
            if wnorm <= f64::EPSILON * scale.max(1e-300) {
                lambda = 0.0;
                converged = true;
                break;
            }
            let r = &w - &(&v * lambda);
            residual = r.dot(&r).sqrt();
            v = w / wnorm;
            let tol_scale = scale.max(lambda.abs()).max(1e-300);
            if residual <= 1e-12 * tol_scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Convergence {
                residual,
                iterations: POWER_ITERATION_CAP,
            });
        }
        // One final clean-up pass so the stored component is unit and
        // orthogonal regardless of the exit path.
        for c in &components {
            let proj = c.dot(&v);
            v = v - &(c * proj);
        }
        let norm = v.dot(&v).sqrt();
        if norm > 0.0 {
            v /= norm;
        }
        scale = scale.max(lambda.abs());
        eigenvalues.push(lambda.max(0.0));
        components.push(v);
    }

    let mut column_scores = vec![0.0; cols];
    for comp in &components {
        for (c, val) in comp.iter().enumerate() {
            column_scores[c] += val * val;
        }
    }

    let mut attribute_scores: BTreeMap<String, f64> = BTreeMap::new();
    for key in ["constants", "eta", "ts", "xs", "ys"] {
        attribute_scores.insert(key.into(), 0.0);
    }
    let mut total = 0.0;
    for (c, score) in column_scores.iter().enumerate() {
        let (block, _) = m.column_labels[c].attribute(&m.layout)?;
        *attribute_scores.get_mut(block_score_key(block)).unwrap() += score;
        total += score;
    }
    if total > 0.0 {
        for v in attribute_scores.values_mut() {
            *v /= total;
        }
    }

    Ok(VarianceReport {
        eigenvalues,
        components,
        column_scores,
        attribute_scores,
    })
}

/// The `top_n` highest-scoring columns mapped to their input attributes,
/// deduplicated in rank order. Ties break toward the lower column index.
/// The boolean is true when `top_n` had to be clipped to the column
/// count.
pub fn high_variance_attributes(
    report: &VarianceReport,
    labels: &[ParamLabel],
    layout: &FlatLayout,
    top_n: usize,
) -> Result<(Vec<(Block, usize)>, bool)> {
    let cols = report.column_scores.len();
    if labels.len() != cols {
        return Err(Error::ShapeMismatch {
            expected: format!("{cols}"),
            got: format!("{}", labels.len()),
        });
    }
    let clipped = top_n > cols;
    let take = top_n.min(cols);
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| {
        report.column_scores[b]
            .partial_cmp(&report.column_scores[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut attrs = Vec::new();
    for &c in order.iter().take(take) {
        let attr = labels[c].attribute(layout)?;
        if !attrs.contains(&attr) {
            attrs.push(attr);
        }
    }
    Ok((attrs, clipped))
}

/// Ranks catalogue members and their pairwise compositions by distance
/// to g, ascending; ties break lexicographically by label.
pub fn nearest_catalogue_match(
    g: &AffineMr,
    catalogue: &[AffineMr],
    samples: &[ndarray::Array1<f64>],
) -> Result<Vec<(String, f64)>> {
    if catalogue.is_empty() {
        return Err(Error::validation("catalogue must not be empty"));
    }
    let mut candidates: Vec<AffineMr> = catalogue.to_vec();
    for a in catalogue {
        for b in catalogue {
            if let Ok(c) = compose(a, b) {
                candidates.push(c);
            }
        }
    }
    let mut ranked = Vec::new();
    for c in &candidates {
        if c.layout != g.layout || c.output_layout().total_dim() != g.output_layout().total_dim() {
            continue;
        }
        let d = mr_distance(g, c, samples)?;
        ranked.push((c.label.clone(), d));
    }
    ranked.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(ranked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mr::{catalogue_mr, CatalogueKind, Provenance};

    fn tiny_layout() -> FlatLayout {
        FlatLayout::new(1, 2, 2) // dim 11, params 132
    }

    fn gf_scaling_set(factors: &[f64]) -> MrSet {
        let layout = tiny_layout();
        let d = layout.total_dim();
        let mut set = MrSet::new(layout, "energy/cyclic");
        for (n, &t) in factors.iter().enumerate() {
            let mut gamma = Array2::eye(d);
            gamma[(layout.g_slot(), layout.g_slot())] = 1.0 + t;
            gamma[(layout.f_slot(), layout.f_slot())] = 1.0 + t;
            let mr = AffineMr::dense(
                layout,
                gamma,
                Array1::zeros(d),
                format!("gf_{n}"),
                Provenance::Discovered,
            )
            .unwrap();
            set.push_unchecked(mr);
        }
        set
    }

    /// Brute-force symmetric eigen oracle (Jacobi rotations), independent
    /// of the power-iteration path.
    fn jacobi_eigen(mut a: Array2<f64>) -> (Vec<f64>, Array2<f64>) {
        let n = a.nrows();
        let mut v = Array2::eye(n);
        for _ in 0..200 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off.sqrt() < 1e-14 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut vals: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| vals[y].partial_cmp(&vals[x]).unwrap());
        let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
        let mut sorted_vecs = Array2::zeros((n, n));
        for (col, &i) in order.iter().enumerate() {
            for r in 0..n {
                sorted_vecs[(r, col)] = v[(r, i)];
            }
        }
        vals = sorted_vals;
        (vals, sorted_vecs)
    }

    #[test]
    fn parameter_matrix_shape_and_exclusions() {
        let set = gf_scaling_set(&[0.1, 0.2, 0.3]);
        let m = parameter_matrix(&set).unwrap();
        let d = tiny_layout().total_dim();
        assert_eq!(m.rows.nrows(), 3); // identity contributes no row
        assert_eq!(m.rows.ncols(), d * d + d);

        let empty = MrSet::new(tiny_layout(), "energy/cyclic");
        assert!(parameter_matrix(&empty).is_err());

        let mut with_catalogue = gf_scaling_set(&[0.1]);
        with_catalogue
            .push_unchecked(catalogue_mr(CatalogueKind::ReverseX, tiny_layout()).unwrap());
        assert_eq!(parameter_matrix(&with_catalogue).unwrap().rows.nrows(), 1);
    }

    #[test]
    fn column_labels_round_trip() {
        let layout = tiny_layout();
        let labels = column_labels(&layout);
        let d = layout.total_dim();
        assert_eq!(labels.len(), d * d + d);
        assert_eq!(labels[0], ParamLabel::Gamma { row: 0, col: 0 });
        assert_eq!(labels[d * d], ParamLabel::Beta { slot: 0 });
        // every column maps to a legal (block, index)
        for label in &labels {
            let (block, idx) = label.attribute(&layout).unwrap();
            assert!(layout.resolve(block, idx).is_ok());
        }
    }

    #[test]
    fn identical_rows_have_zero_eigenvalues() {
        let set = gf_scaling_set(&[0.2, 0.2, 0.2]);
        let m = parameter_matrix(&set).unwrap();
        let report = covariance_eigenanalysis(&m, 2).unwrap();
        assert!(report.eigenvalues.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn gf_scaling_rows_put_mass_on_the_constants_block() {
        let set = gf_scaling_set(&[0.05, 0.1, 0.2, 0.4, 0.8]);
        let m = parameter_matrix(&set).unwrap();
        let report = covariance_eigenanalysis(&m, 2).unwrap();
        assert!(
            report.attribute_scores["constants"] >= 0.99,
            "scores: {:?}",
            report.attribute_scores
        );
        let (attrs, clipped) =
            high_variance_attributes(&report, &m.column_labels, &m.layout, 2).unwrap();
        assert!(!clipped);
        assert_eq!(attrs[0].0, Block::G);
        // eigenvalues are descending and non-negative
        for w in report.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(report.eigenvalues.iter().all(|&l| l >= 0.0));
        // components are unit vectors
        for c in &report.components {
            assert!((c.dot(c).sqrt() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenpairs_match_the_jacobi_oracle() {
        // small synthetic matrix: 6 rows varying in a rank-3 pattern
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let cols = 30;
        let rows = 6;
        let basis: Vec<Array1<f64>> = (0..3)
            .map(|_| Array1::from_shape_simple_fn(cols, || rng.random_range(-1.0..1.0)))
            .collect();
        let mut data = Array2::zeros((rows, cols));
        for r in 0..rows {
            for (bi, b) in basis.iter().enumerate() {
                let w: f64 = rng.random_range(-1.0..1.0) * (3.0 - bi as f64);
                for c in 0..cols {
                    data[(r, c)] += w * b[c];
                }
            }
        }
        let layout = FlatLayout::new(1, 2, 2);
        let m = ParameterMatrix {
            layout,
            rows: data.clone(),
            column_labels: (0..cols).map(|slot| ParamLabel::Beta { slot: slot % 11 }).collect(),
        };
        let k = 3;
        let report = covariance_eigenanalysis(&m, k).unwrap();

        // dense covariance for the oracle
        let mut centered = data;
        for mut col in centered.columns_mut() {
            let mean = col.sum() / rows as f64;
            col.mapv_inplace(|v| v - mean);
        }
        let cov = centered.t().dot(&centered) / (rows as f64 - 1.0);
        let (oracle_vals, oracle_vecs) = jacobi_eigen(cov.clone());

        let total_variance: f64 = (0..cols).map(|i| cov[(i, i)]).sum();
        let eigensum: f64 = report.eigenvalues.iter().sum();
        assert!(eigensum <= total_variance * (1.0 + 1e-10));

        for i in 0..k {
            let rel = (report.eigenvalues[i] - oracle_vals[i]).abs() / oracle_vals[i].abs();
            assert!(rel < 1e-8, "eigenvalue {i}: {rel:e}");
            // component match up to sign, 1e-6 angular tolerance
            let dot: f64 = (0..cols)
                .map(|c| report.components[i][c] * oracle_vecs[(c, i)])
                .sum();
            assert!(dot.abs() > 1.0 - 1e-6, "component {i} misaligned: |dot| = {}", dot.abs());
        }
    }

    #[test]
    fn eigensum_reaches_total_variance_at_full_rank() {
        let set = gf_scaling_set(&[0.1, 0.25, 0.6]);
        let m = parameter_matrix(&set).unwrap();
        // rank of 3 centered rows is at most 2 = rows-1
        let report = covariance_eigenanalysis(&m, 2).unwrap();
        let mut centered = m.rows.clone();
        for mut col in centered.columns_mut() {
            let mean = col.sum() / centered.nrows() as f64;
            col.mapv_inplace(|v| v - mean);
        }
        let total: f64 = centered.iter().map(|v| v * v).sum::<f64>() / 2.0;
        let eigensum: f64 = report.eigenvalues.iter().sum();
        assert!((eigensum - total).abs() <= 1e-10 * total.max(1e-300));
    }

    #[test]
    fn scale_equivariance_of_eigenvalues() {
        let set = gf_scaling_set(&[0.1, 0.3, 0.7, 1.1]);
        let m = parameter_matrix(&set).unwrap();
        let base = covariance_eigenanalysis(&m, 2).unwrap();
        let c = 3.5;
        let scaled = ParameterMatrix {
            layout: m.layout,
            rows: &m.rows * c,
            column_labels: m.column_labels.clone(),
        };
        let scaled_report = covariance_eigenanalysis(&scaled, 2).unwrap();
        for (a, b) in base.eigenvalues.iter().zip(scaled_report.eigenvalues.iter()) {
            if *a > 0.0 {
                assert!((b / (a * c * c) - 1.0).abs() < 1e-10);
            }
        }
        let (attrs_a, _) =
            high_variance_attributes(&base, &m.column_labels, &m.layout, 3).unwrap();
        let (attrs_b, _) =
            high_variance_attributes(&scaled_report, &m.column_labels, &m.layout, 3).unwrap();
        assert_eq!(attrs_a, attrs_b);
    }

    #[test]
    fn k_out_of_range_is_rejected() {
        let set = gf_scaling_set(&[0.1, 0.2]);
        let m = parameter_matrix(&set).unwrap();
        assert!(covariance_eigenanalysis(&m, 0).is_err());
        assert!(covariance_eigenanalysis(&m, 2).is_err()); // rows-1 = 1
        assert!(covariance_eigenanalysis(&m, 1).is_ok());
    }

    #[test]
    fn top_n_clipping_and_empty_request() {
        let set = gf_scaling_set(&[0.1, 0.2, 0.4]);
        let m = parameter_matrix(&set).unwrap();
        let report = covariance_eigenanalysis(&m, 1).unwrap();
        let (attrs, clipped) =
            high_variance_attributes(&report, &m.column_labels, &m.layout, 0).unwrap();
        assert!(attrs.is_empty() && !clipped);
        let cols = m.column_labels.len();
        let (_, clipped) =
            high_variance_attributes(&report, &m.column_labels, &m.layout, cols + 1).unwrap();
        assert!(clipped);
    }

    #[test]
    fn nearest_match_recovers_exact_members_and_compositions() {
        let layout = FlatLayout::new(1, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let samples: Vec<Array1<f64>> = (0..4)
            .map(|_| Array1::from_shape_simple_fn(layout.total_dim(), || rng.random_range(-1.0..1.0)))
            .collect();
        let catalogue = vec![
            catalogue_mr(CatalogueKind::ReverseX, layout).unwrap(),
            catalogue_mr(CatalogueKind::CyclicShiftX { shift: 1 }, layout).unwrap(),
            catalogue_mr(CatalogueKind::ScaleGF { factor: 2.0 }, layout).unwrap(),
        ];

        let ranked =
            nearest_catalogue_match(&catalogue[0], &catalogue, &samples).unwrap();
        assert_eq!(ranked[0].1, 0.0);
        assert!(ranked.iter().take(1).any(|(l, _)| l == "reverse_x"));
        for w in ranked.windows(2) {
            assert!(w[0].1 <= w[1].1);
            assert!(w[0].1 >= 0.0);
        }

        let target = compose(&catalogue[0], &catalogue[1]).unwrap();
        let ranked = nearest_catalogue_match(&target, &catalogue, &samples).unwrap();
        assert_eq!(ranked[0].1, 0.0);
        assert_eq!(ranked[0].0, "reverse_x∘cyclic_shift_x(1)");

        assert!(nearest_catalogue_match(&catalogue[0], &[], &samples).is_err());
    }

    #[test]
    fn variance_report_export_schemas() {
        let set = gf_scaling_set(&[0.1, 0.2, 0.4]);
        let m = parameter_matrix(&set).unwrap();
        let report = covariance_eigenanalysis(&m, 1).unwrap();
        let json = report.to_json_value();
        assert!(json.get("eigenvalues").is_some());
        assert!(json["attribute_scores"].get("constants").is_some());
        let csv = report.to_rank_csv(&m.column_labels);
        assert!(csv.starts_with("rank,column,label,score\n"));
        assert_eq!(csv.trim_end().lines().count(), 1 + m.column_labels.len());
    }

    #[test]
    fn eta_only_variation_scores_eta_block() {
        let layout = tiny_layout();
        let d = layout.total_dim();
        let mut set = MrSet::new(layout, "energy/cyclic");
        for n in 0..4 {
            let mut beta = Array1::zeros(d);
            beta[layout.eta_index(0, 0, 0)] = 0.1 * (n as f64 + 1.0);
            let mr = AffineMr::dense(
                layout,
                Array2::eye(d),
                beta,
                format!("eta_{n}"),
                Provenance::Discovered,
            )
            .unwrap();
            set.push_unchecked(mr);
        }
        let m = parameter_matrix(&set).unwrap();
        let report = covariance_eigenanalysis(&m, 1).unwrap();
        assert!(report.attribute_scores["eta"] >= 0.99);
        let (attrs, _) = high_variance_attributes(&report, &m.column_labels, &m.layout, 1).unwrap();
        assert_eq!(attrs[0], (Block::Eta, 0));
    }
}
