//! Affine metamorphic input mappings g(x) = Γ·x + β.
//!
//! Catalogue transformations are kept in structured form so their
//! application stays an exact permutation/scaling; the search works on
//! dense (Γ, β) over the flattened input vector. Both expand to the same
//! dense matrix on demand.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::FlatLayout;

/// Where an MR came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Identity,
    Catalogue,
    Discovered,
}

/// Search metadata attached to discovered members.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryMeta {
    /// Cost of the candidate when it was admitted.
    pub cost: f64,
    /// Seed of the minimize run that produced it.
    pub seed: u64,
    /// Restart index within its discovery slot.
    pub restart: usize,
    /// First step at which the best candidate satisfied the admission
    /// thresholds, if it did before the run ended.
    pub qualify_step: Option<usize>,
}

/// The structured catalogue transformations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogueKind {
    /// Multiply both G and F by the same nonzero constant.
    ScaleGF { factor: f64 },
    /// Multiply η, xs and ys by the same nonzero constant.
    ScaleEtaXy { factor: f64 },
    /// Swap the x and y roles: η (t, y, x) -> (t, x, y), xs <-> ys.
    TransposeXy,
    /// Reverse the x direction of η and the xs block.
    ReverseX,
    /// Reverse the y direction of η and the ys block.
    ReverseY,
    /// Rotate η along x by `shift` cells; coordinates unchanged.
    CyclicShiftX { shift: usize },
    /// Rotate η along y by `shift` cells; coordinates unchanged.
    CyclicShiftY { shift: usize },
}

impl CatalogueKind {
    fn default_label(&self) -> String {
        match self {
            CatalogueKind::ScaleGF { factor } => format!("scale_GF({factor})"),
            CatalogueKind::ScaleEtaXy { factor } => format!("scale_eta_xy({factor})"),
            CatalogueKind::TransposeXy => "transpose_xy".into(),
            CatalogueKind::ReverseX => "reverse_x".into(),
            CatalogueKind::ReverseY => "reverse_y".into(),
            CatalogueKind::CyclicShiftX { shift } => format!("cyclic_shift_x({shift})"),
            CatalogueKind::CyclicShiftY { shift } => format!("cyclic_shift_y({shift})"),
        }
    }
}

/// How the transformation is stored.
#[derive(Debug, Clone, PartialEq)]
pub enum MrForm {
    /// Exact identity.
    Identity,
    /// Dense Γ and β over the flat vector.
    Dense { gamma: Array2<f64>, beta: Array1<f64> },
    /// One catalogue kind, applied by exact index mapping.
    Structured(CatalogueKind),
    /// Chain of MRs, applied first-to-last.
    Composed(Vec<AffineMr>),
}

/// An affine metamorphic input mapping together with its layout and
/// provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMr {
    pub form: MrForm,
    pub layout: FlatLayout,
    pub label: String,
    pub provenance: Provenance,
    pub discovery: Option<DiscoveryMeta>,
}

/// Output index -> (source index, coefficient) for a structured kind.
/// Every structured transformation maps each output slot from exactly
/// one input slot, so this table is the whole story: application reads
/// through it and dense expansion writes one Γ entry per row.
fn structured_mapping(kind: &CatalogueKind, layout: &FlatLayout) -> (FlatLayout, Vec<(usize, f64)>) {
    let mut out_layout = *layout;
    let mut map: Vec<(usize, f64)> = (0..layout.total_dim()).map(|i| (i, 1.0)).collect();
    match *kind {
        CatalogueKind::ScaleGF { factor } => {
            map[layout.g_slot()] = (layout.g_slot(), factor);
            map[layout.f_slot()] = (layout.f_slot(), factor);
        }
        CatalogueKind::ScaleEtaXy { factor } => {
            for i in 0..layout.eta_len() {
                map[i] = (i, factor);
            }
            for i in layout.xs_offset()..layout.xs_offset() + layout.nx {
                map[i] = (i, factor);
            }
            for i in layout.ys_offset()..layout.ys_offset() + layout.ny {
                map[i] = (i, factor);
            }
        }
        CatalogueKind::TransposeXy => {
            out_layout = layout.transposed();
            for k in 0..out_layout.nt {
                for j in 0..out_layout.ny {
                    for i in 0..out_layout.nx {
                        // output (t, x_old, y_old) reads η(t, y_old, x_old)
                        map[out_layout.eta_index(k, j, i)] = (layout.eta_index(k, i, j), 1.0);
                    }
                }
            }
            for i in 0..out_layout.nx {
                map[out_layout.xs_offset() + i] = (layout.ys_offset() + i, 1.0);
            }
            for j in 0..out_layout.ny {
                map[out_layout.ys_offset() + j] = (layout.xs_offset() + j, 1.0);
            }
            for k in 0..out_layout.nt {
                map[out_layout.ts_offset() + k] = (layout.ts_offset() + k, 1.0);
            }
            map[out_layout.g_slot()] = (layout.g_slot(), 1.0);
            map[out_layout.f_slot()] = (layout.f_slot(), 1.0);
        }
        CatalogueKind::ReverseX => {
            for k in 0..layout.nt {
                for j in 0..layout.ny {
                    for i in 0..layout.nx {
                        map[layout.eta_index(k, j, i)] =
                            (layout.eta_index(k, j, layout.nx - 1 - i), 1.0);
                    }
                }
            }
            for i in 0..layout.nx {
                map[layout.xs_offset() + i] = (layout.xs_offset() + layout.nx - 1 - i, 1.0);
            }
        }
        CatalogueKind::ReverseY => {
            for k in 0..layout.nt {
                for j in 0..layout.ny {
                    for i in 0..layout.nx {
                        map[layout.eta_index(k, j, i)] =
                            (layout.eta_index(k, layout.ny - 1 - j, i), 1.0);
                    }
                }
            }
            for j in 0..layout.ny {
                map[layout.ys_offset() + j] = (layout.ys_offset() + layout.ny - 1 - j, 1.0);
            }
        }
        CatalogueKind::CyclicShiftX { shift } => {
            for k in 0..layout.nt {
                for j in 0..layout.ny {
                    for i in 0..layout.nx {
                        map[layout.eta_index(k, j, i)] =
                            (layout.eta_index(k, j, (i + shift) % layout.nx), 1.0);
                    }
                }
            }
        }
        CatalogueKind::CyclicShiftY { shift } => {
            for k in 0..layout.nt {
                for j in 0..layout.ny {
                    for i in 0..layout.nx {
                        map[layout.eta_index(k, j, i)] =
                            (layout.eta_index(k, (j + shift) % layout.ny, i), 1.0);
                    }
                }
            }
        }
    }
    (out_layout, map)
}

impl AffineMr {
    pub fn dense(
        layout: FlatLayout,
        gamma: Array2<f64>,
        beta: Array1<f64>,
        label: impl Into<String>,
        provenance: Provenance,
    ) -> Result<Self> {
        let d = layout.total_dim();
        if gamma.shape() != [d, d] || beta.len() != d {
            return Err(Error::ShapeMismatch {
                expected: format!("gamma {d}x{d}, beta {d}"),
                got: format!("gamma {:?}, beta {}", gamma.shape(), beta.len()),
            });
        }
        Ok(AffineMr {
            form: MrForm::Dense { gamma, beta },
            layout,
            label: label.into(),
            provenance,
            discovery: None,
        })
    }

    /// Layout of the vectors this MR produces; differs from the input
    /// layout only for the transpose on non-square grids.
    pub fn output_layout(&self) -> FlatLayout {
        match &self.form {
            MrForm::Identity | MrForm::Dense { .. } => self.layout,
            MrForm::Structured(kind) => structured_mapping(kind, &self.layout).0,
            MrForm::Composed(parts) => parts
                .last()
                .map(|p| p.output_layout())
                .unwrap_or(self.layout),
        }
    }

    /// Applies the mapping to a flat vector.
    pub fn apply(&self, x: &Array1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.layout.total_dim() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}", self.layout.total_dim()),
                got: format!("{}", x.len()),
            });
        }
        match &self.form {
            MrForm::Identity => Ok(x.clone()),
            MrForm::Dense { gamma, beta } => Ok(gamma.dot(x) + beta),
            MrForm::Structured(kind) => {
                let (_, map) = structured_mapping(kind, &self.layout);
                Ok(Array1::from_iter(map.iter().map(|&(src, c)| c * x[src])))
            }
            MrForm::Composed(parts) => {
                let mut v = x.clone();
                for part in parts {
                    v = part.apply(&v)?;
                }
                Ok(v)
            }
        }
    }

    /// Exact dense expansion (Γ, β). Quadratic in the flat dimension,
    /// intended for search-scale layouts and tests.
    pub fn to_dense(&self) -> Result<(Array2<f64>, Array1<f64>)> {
        let d = self.layout.total_dim();
        match &self.form {
            MrForm::Identity => Ok((Array2::eye(d), Array1::zeros(d))),
            MrForm::Dense { gamma, beta } => Ok((gamma.clone(), beta.clone())),
            MrForm::Structured(kind) => {
                let (_, map) = structured_mapping(kind, &self.layout);
                let mut gamma = Array2::zeros((d, d));
                for (row, &(src, c)) in map.iter().enumerate() {
                    gamma[(row, src)] = c;
                }
                Ok((gamma, Array1::zeros(d)))
            }
            MrForm::Composed(parts) => {
                let mut gamma = Array2::eye(d);
                let mut beta = Array1::zeros(d);
                for part in parts {
                    let (pg, pb) = part.to_dense()?;
                    gamma = pg.dot(&gamma);
                    beta = pg.dot(&beta) + pb;
                }
                Ok((gamma, beta))
            }
        }
    }

    pub fn is_identity_form(&self) -> bool {
        matches!(self.form, MrForm::Identity)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// The trivial MR g(x) = x, seed member of every MR set.
pub fn identity_mr(layout: FlatLayout) -> AffineMr {
    AffineMr {
        form: MrForm::Identity,
        layout,
        label: "identity".into(),
        provenance: Provenance::Identity,
        discovery: None,
    }
}

/// Builds a catalogue MR, validating its parameters. Shifts are reduced
/// modulo the axis length.
pub fn catalogue_mr(kind: CatalogueKind, layout: FlatLayout) -> Result<AffineMr> {
    let kind = match kind {
        CatalogueKind::ScaleGF { factor } | CatalogueKind::ScaleEtaXy { factor }
            if factor == 0.0 || !factor.is_finite() =>
        {
            return Err(Error::validation(format!(
                "scaling factor must be finite and nonzero, got {factor}"
            )));
        }
        CatalogueKind::CyclicShiftX { shift } => CatalogueKind::CyclicShiftX {
            shift: shift % layout.nx,
        },
        CatalogueKind::CyclicShiftY { shift } => CatalogueKind::CyclicShiftY {
            shift: shift % layout.ny,
        },
        other => other,
    };
    let label = kind.default_label();
    Ok(AffineMr {
        form: MrForm::Structured(kind),
        layout,
        label,
        provenance: Provenance::Catalogue,
        discovery: None,
    })
}

/// The eight manually identified MRs of the example application.
///
/// The first two both scale G and F jointly: the source catalogue lists
/// "multiplying by the same constant" and "keeping G/F constant" as
/// separate entries, and both phrasings reduce to the same joint
/// scaling, so they appear here as two instances with distinct factors
/// and labels recording the two readings.
pub fn fig1_catalogue(layout: FlatLayout) -> Result<Vec<AffineMr>> {
    Ok(vec![
        catalogue_mr(CatalogueKind::ScaleGF { factor: 2.0 }, layout)?
            .with_label("scale_GF_same_constant(2)"),
        catalogue_mr(CatalogueKind::ScaleGF { factor: 0.5 }, layout)?
            .with_label("scale_GF_keep_ratio(0.5)"),
        catalogue_mr(CatalogueKind::ScaleEtaXy { factor: 2.0 }, layout)?,
        catalogue_mr(CatalogueKind::TransposeXy, layout)?,
        catalogue_mr(CatalogueKind::ReverseX, layout)?,
        catalogue_mr(CatalogueKind::ReverseY, layout)?,
        catalogue_mr(CatalogueKind::CyclicShiftX { shift: 3 }, layout)?,
        catalogue_mr(CatalogueKind::CyclicShiftY { shift: 3 }, layout)?,
    ])
}

/// Mean over the samples of |a(x) - b(x)|² (squared Euclidean norm).
pub fn mr_distance(a: &AffineMr, b: &AffineMr, samples: &[Array1<f64>]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::validation("mr_distance needs at least one sample"));
    }
    if a.layout != b.layout {
        return Err(Error::ShapeMismatch {
            expected: format!("{:?}", a.layout),
            got: format!("{:?}", b.layout),
        });
    }
    let mut total = 0.0;
    for x in samples {
        let ya = a.apply(x)?;
        let yb = b.apply(x)?;
        if ya.len() != yb.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}", ya.len()),
                got: format!("{}", yb.len()),
            });
        }
        total += ya
            .iter()
            .zip(yb.iter())
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>();
    }
    Ok(total / samples.len() as f64)
}

/// g with g(x) = a(b(x)).
pub fn compose(a: &AffineMr, b: &AffineMr) -> Result<AffineMr> {
    if b.output_layout() != a.layout {
        return Err(Error::ShapeMismatch {
            expected: format!("{:?}", a.layout),
            got: format!("{:?}", b.output_layout()),
        });
    }
    let mut parts = Vec::new();
    let mut push = |mr: &AffineMr| match &mr.form {
        MrForm::Composed(inner) => parts.extend(inner.iter().cloned()),
        _ => parts.push(mr.clone()),
    };
    push(b);
    push(a);
    let provenance = if a.provenance == Provenance::Discovered || b.provenance == Provenance::Discovered
    {
        Provenance::Discovered
    } else {
        Provenance::Catalogue
    };
    Ok(AffineMr {
        form: MrForm::Composed(parts),
        layout: b.layout,
        label: format!("{}∘{}", a.label, b.label),
        provenance,
        discovery: None,
    })
}

/// The growing set of identified MRs for one function. The identity map
/// is always the first member.
#[derive(Debug, Clone, PartialEq)]
pub struct MrSet {
    pub function_id: String,
    members: Vec<AffineMr>,
}

impl MrSet {
    pub fn new(layout: FlatLayout, function_id: impl Into<String>) -> Self {
        MrSet {
            function_id: function_id.into(),
            members: vec![identity_mr(layout)],
        }
    }

    pub fn members(&self) -> &[AffineMr] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn discovered(&self) -> impl Iterator<Item = &AffineMr> {
        self.members
            .iter()
            .filter(|m| m.provenance == Provenance::Discovered)
    }

    /// Adds a member after checking it keeps the minimum distance to
    /// every existing member.
    pub fn push_checked(
        &mut self,
        mr: AffineMr,
        samples: &[Array1<f64>],
        d_min: f64,
    ) -> Result<()> {
        for member in &self.members {
            let d = mr_distance(&mr, member, samples)?;
            if d < d_min {
                return Err(Error::validation(format!(
                    "candidate '{}' is within {d:.3e} of member '{}' (d_min {d_min:.3e})",
                    mr.label, member.label
                )));
            }
        }
        self.members.push(mr);
        Ok(())
    }

    /// Adds a member without the distance check (deserialization,
    /// synthetic sets in tests).
    pub fn push_unchecked(&mut self, mr: AffineMr) {
        self.members.push(mr);
    }
}

// ---------------------------------------------------------------------
// Serialization. The on-disk schema keeps dense matrices as nested
// arrays and structured kinds as (kind, params).
// ---------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MrDocument {
    form: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parts: Option<Vec<MrDocument>>,
    label: String,
    provenance: Provenance,
    layout: FlatLayout,
    #[serde(skip_serializing_if = "Option::is_none")]
    discovery: Option<DiscoveryMeta>,
}

fn kind_to_schema(kind: &CatalogueKind) -> (String, serde_json::Value) {
    use serde_json::json;
    match *kind {
        CatalogueKind::ScaleGF { factor } => ("scale_gf".into(), json!({ "factor": factor })),
        CatalogueKind::ScaleEtaXy { factor } => ("scale_eta_xy".into(), json!({ "factor": factor })),
        CatalogueKind::TransposeXy => ("transpose_xy".into(), json!({})),
        CatalogueKind::ReverseX => ("reverse_x".into(), json!({})),
        CatalogueKind::ReverseY => ("reverse_y".into(), json!({})),
        CatalogueKind::CyclicShiftX { shift } => ("cyclic_shift_x".into(), json!({ "shift": shift })),
        CatalogueKind::CyclicShiftY { shift } => ("cyclic_shift_y".into(), json!({ "shift": shift })),
    }
}

fn kind_from_schema(kind: &str, params: &serde_json::Value) -> Result<CatalogueKind> {
    let factor = || {
        params
            .get("factor")
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::validation(format!("kind {kind} needs a numeric 'factor'")))
    };
    let shift = || {
        params
            .get("shift")
            .and_then(|v| v.as_u64())
            .map(|v| v as usize)
            .ok_or_else(|| Error::validation(format!("kind {kind} needs an integer 'shift'")))
    };
    Ok(match kind {
        "scale_gf" => CatalogueKind::ScaleGF { factor: factor()? },
        "scale_eta_xy" => CatalogueKind::ScaleEtaXy { factor: factor()? },
        "transpose_xy" => CatalogueKind::TransposeXy,
        "reverse_x" => CatalogueKind::ReverseX,
        "reverse_y" => CatalogueKind::ReverseY,
        "cyclic_shift_x" => CatalogueKind::CyclicShiftX { shift: shift()? },
        "cyclic_shift_y" => CatalogueKind::CyclicShiftY { shift: shift()? },
        other => return Err(Error::validation(format!("unknown MR kind '{other}'"))),
    })
}

impl AffineMr {
    fn to_document(&self) -> MrDocument {
        let mut doc = MrDocument {
            form: String::new(),
            kind: None,
            params: None,
            gamma: None,
            beta: None,
            parts: None,
            label: self.label.clone(),
            provenance: self.provenance,
            layout: self.layout,
            discovery: self.discovery.clone(),
        };
        match &self.form {
            MrForm::Identity => doc.form = "identity".into(),
            MrForm::Dense { gamma, beta } => {
                doc.form = "dense".into();
                doc.gamma = Some(gamma.rows().into_iter().map(|r| r.to_vec()).collect());
                doc.beta = Some(beta.to_vec());
            }
            MrForm::Structured(kind) => {
                doc.form = "structured".into();
                let (k, p) = kind_to_schema(kind);
                doc.kind = Some(k);
                doc.params = Some(p);
            }
            MrForm::Composed(parts) => {
                doc.form = "composed".into();
                doc.parts = Some(parts.iter().map(|p| p.to_document()).collect());
            }
        }
        doc
    }

    fn from_document(doc: MrDocument) -> Result<Self> {
        let form = match doc.form.as_str() {
            "identity" => MrForm::Identity,
            "dense" => {
                let rows = doc
                    .gamma
                    .ok_or_else(|| Error::validation("dense MR without gamma"))?;
                let beta = doc
                    .beta
                    .ok_or_else(|| Error::validation("dense MR without beta"))?;
                let d = doc.layout.total_dim();
                if rows.len() != d || rows.iter().any(|r| r.len() != d) || beta.len() != d {
                    return Err(Error::validation("dense MR dimensions do not match layout"));
                }
                let flat: Vec<f64> = rows.into_iter().flatten().collect();
                MrForm::Dense {
                    gamma: Array2::from_shape_vec((d, d), flat).expect("checked above"),
                    beta: Array1::from_vec(beta),
                }
            }
            "structured" => {
                let kind = doc
                    .kind
                    .as_deref()
                    .ok_or_else(|| Error::validation("structured MR without kind"))?;
                let params = doc.params.unwrap_or(serde_json::Value::Null);
                MrForm::Structured(kind_from_schema(kind, &params)?)
            }
            "composed" => {
                let parts = doc
                    .parts
                    .ok_or_else(|| Error::validation("composed MR without parts"))?
                    .into_iter()
                    .map(AffineMr::from_document)
                    .collect::<Result<Vec<_>>>()?;
                MrForm::Composed(parts)
            }
            other => return Err(Error::validation(format!("unknown MR form '{other}'"))),
        };
        Ok(AffineMr {
            form,
            layout: doc.layout,
            label: doc.label,
            provenance: doc.provenance,
            discovery: doc.discovery,
        })
    }
}

impl Serialize for AffineMr {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_document().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AffineMr {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = MrDocument::deserialize(deserializer)?;
        AffineMr::from_document(doc).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct MrSetDocument {
    function_id: String,
    members: Vec<AffineMr>,
}

impl Serialize for MrSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MrSetDocument {
            function_id: self.function_id.clone(),
            members: self.members.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MrSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = MrSetDocument::deserialize(deserializer)?;
        if doc.members.is_empty() || !doc.members[0].is_identity_form() {
            return Err(serde::de::Error::custom(
                "MR set must start with the identity member",
            ));
        }
        Ok(MrSet {
            function_id: doc.function_id,
            members: doc.members,
        })
    }
}
