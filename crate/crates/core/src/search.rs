//! Monte-Carlo discovery of affine MRs.
//!
//! A candidate g is scored by the sample-mean cost
//!
//!   J(g) = mean over x of |f(g(x)) - f(x)| / (ε + Π over known gᵢ of |g(x) - gᵢ(x)|²)
//!
//! which rewards candidates whose follow-up output matches the source
//! output and explodes as g approaches an already known relation. The
//! search mutates a dense (Γ, β) candidate, always accepts improvements,
//! accepts degradations with probability p, and grows the relation set
//! outward from the identity map.
//!
//! With `normalize` set, the numerator is taken relative to |f(x)|; the
//! admission threshold `cost_accept_tol` is calibrated for that scale-free
//! form, which is what discovery uses by default.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::{Block, FlatLayout};
use crate::model::{energy_pipeline, random_sea_level, BoundaryVariant, GridSpec};
use crate::mr::{AffineMr, DiscoveryMeta, MrSet, Provenance};
use crate::layout::{flatten, unflatten};

/// Absolute floor added to |f(x)| when normalizing the cost numerator.
const NORM_FLOOR: f64 = 1e-30;

/// How the initial dense candidate is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitMode {
    /// Identity plus normal noise on the searchable entries.
    IdentityNoise,
    /// Searchable entries replaced by normal noise.
    PureRandom,
}

/// Sampled stand-in for the integral over the input space.
#[derive(Debug, Clone)]
pub struct CostConfig {
    /// Guard against division by zero when a candidate coincides with a
    /// known member.
    pub epsilon: f64,
    pub layout: FlatLayout,
    /// Which implementation of f the cost evaluates.
    pub variant: BoundaryVariant,
    /// Flattened input vectors; fixed for the whole search so costs are
    /// comparable across steps.
    pub samples: Vec<Array1<f64>>,
    /// Divide the numerator by |f(x)|. Discovery admission assumes this.
    pub normalize: bool,
}

impl CostConfig {
    pub fn new(layout: FlatLayout, variant: BoundaryVariant, samples: Vec<Array1<f64>>) -> Self {
        CostConfig {
            epsilon: 1e-12,
            layout,
            variant,
            samples,
            normalize: true,
        }
    }

    /// Samples drawn from the model's own input generator.
    pub fn from_grid(
        spec: &GridSpec,
        variant: BoundaryVariant,
        n_samples: usize,
        base_seed: u64,
        amplitude: f64,
    ) -> Result<Self> {
        let layout = FlatLayout::new(spec.nt, spec.ny, spec.nx);
        let samples = (0..n_samples)
            .map(|i| {
                let input = random_sea_level(spec, base_seed.wrapping_add(i as u64), amplitude)?;
                flatten(&input, &layout)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CostConfig::new(layout, variant, samples))
    }

    pub fn function_id(&self) -> String {
        format!("energy/{}", self.variant.label())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::validation("epsilon must be positive"));
        }
        if self.samples.is_empty() {
            return Err(Error::validation("cost needs at least one sample"));
        }
        let d = self.layout.total_dim();
        for (i, s) in self.samples.iter().enumerate() {
            if s.len() != d {
                return Err(Error::ShapeMismatch {
                    expected: format!("{d}"),
                    got: format!("{} (sample {i})", s.len()),
                });
            }
            if s.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(format!("sample {i} is not finite")));
            }
        }
        Ok(())
    }
}

/// Knobs of the mutation/acceptance loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Probability of keeping a cost-increasing mutation.
    pub acceptance_threshold: f64,
    /// Standard deviation of one mutation entry.
    pub mutation_scale: f64,
    pub max_steps: usize,
    /// Declare convergence when the best cost improves by less than
    /// `convergence_tol` over this many steps.
    pub convergence_window: usize,
    pub convergence_tol: f64,
    /// Admission threshold on the (normalized) cost.
    pub cost_accept_tol: f64,
    /// Minimal mean squared distance from every known member.
    pub distance_min: f64,
    /// Attempts per discovery slot.
    pub restarts: usize,
    pub seed: u64,
    /// Standard deviation of the initial candidate noise.
    pub init_scale: f64,
    pub init_mode: InitMode,
    /// Fraction of searchable entries one mutation touches (at least one).
    pub mutation_fraction: f64,
    /// Dense search is refused above this flattened dimension.
    pub dimension_cap: usize,
    /// Optional geometric cooling of the acceptance threshold per step.
    pub cooling_factor: Option<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            acceptance_threshold: 0.1,
            mutation_scale: 0.05,
            max_steps: 50_000,
            convergence_window: 2_000,
            convergence_tol: 1e-10,
            cost_accept_tol: 1e-6,
            distance_min: 1e-3,
            restarts: 3,
            seed: 0,
            init_scale: 0.5,
            init_mode: InitMode::IdentityNoise,
            mutation_fraction: 0.01,
            dimension_cap: 200,
            cooling_factor: None,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.acceptance_threshold) {
            return Err(Error::validation("acceptance_threshold must be in [0, 1]"));
        }
        if !(self.mutation_scale > 0.0) || !(self.init_scale > 0.0) {
            return Err(Error::validation("mutation_scale and init_scale must be positive"));
        }
        if self.max_steps == 0 || self.convergence_window == 0 || self.restarts == 0 {
            return Err(Error::validation("counts must be at least 1"));
        }
        if !(self.mutation_fraction > 0.0) || self.mutation_fraction > 1.0 {
            return Err(Error::validation("mutation_fraction must be in (0, 1]"));
        }
        if let Some(c) = self.cooling_factor {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::validation("cooling_factor must be in (0, 1]"));
            }
        }
        Ok(())
    }
}

/// One proposal record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    /// NaN when the proposal evaluated to a non-finite cost.
    pub proposed_cost: f64,
    pub accepted: bool,
    pub best_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalStatus {
    Converged,
    StepLimit,
    RejectedCandidate,
}

/// Full history of one minimize run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchTrace {
    pub seed: u64,
    pub records: Vec<TraceRecord>,
    pub status: TerminalStatus,
    /// First step at which the best candidate was below the admission
    /// cost and far enough from every known member.
    pub qualify_step: Option<usize>,
    pub final_best_cost: f64,
}

impl SearchTrace {
    /// CSV with header `step,proposed_cost,accepted,best_cost`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,proposed_cost,accepted,best_cost\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.step, r.proposed_cost, r.accepted, r.best_cost
            ));
        }
        out
    }
}

/// Entry indices into the dense parameter vector [Γ row-major | β].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamMask {
    dim: usize,
    indices: Vec<usize>,
}

impl ParamMask {
    /// All Γ and β entries of a layout.
    pub fn full(layout: &FlatLayout) -> Self {
        let d = layout.total_dim();
        ParamMask {
            dim: d,
            indices: (0..d * d + d).collect(),
        }
    }

    /// Entries whose Γ row, Γ column or β slot touches one of the given
    /// attributes.
    pub fn from_attrs(layout: &FlatLayout, attrs: &[(Block, usize)]) -> Result<Self> {
        if attrs.is_empty() {
            return Err(Error::validation("attribute list must not be empty"));
        }
        let d = layout.total_dim();
        let flat: Vec<usize> = attrs
            .iter()
            .map(|&(block, index)| layout.resolve(block, index))
            .collect::<Result<Vec<_>>>()?;
        let mut member = vec![false; d * d + d];
        for &a in &flat {
            for j in 0..d {
                member[a * d + j] = true; // row a
                member[j * d + a] = true; // column a
            }
            member[d * d + a] = true; // β slot
        }
        let indices = member
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.then_some(i))
            .collect();
        Ok(ParamMask { dim: d, indices })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.indices.binary_search(&idx).is_ok()
    }
}

/// Dense candidate parameters with flat-entry access.
#[derive(Debug, Clone, PartialEq)]
struct DenseParams {
    d: usize,
    gamma: Array2<f64>,
    beta: Array1<f64>,
}

impl DenseParams {
    fn identity(d: usize) -> Self {
        DenseParams {
            d,
            gamma: Array2::eye(d),
            beta: Array1::zeros(d),
        }
    }

    fn get(&self, idx: usize) -> f64 {
        if idx < self.d * self.d {
            self.gamma[(idx / self.d, idx % self.d)]
        } else {
            self.beta[idx - self.d * self.d]
        }
    }

    fn set(&mut self, idx: usize, v: f64) {
        if idx < self.d * self.d {
            self.gamma[(idx / self.d, idx % self.d)] = v;
        } else {
            self.beta[idx - self.d * self.d] = v;
        }
    }

    fn into_mr(self, layout: FlatLayout, label: String) -> AffineMr {
        AffineMr::dense(layout, self.gamma, self.beta, label, Provenance::Discovered)
            .expect("dimensions match by construction")
    }
}

/// Precomputed source outputs and known-member images for fast cost
/// evaluation.
pub struct CostEvaluator {
    cfg: CostConfig,
    source_energy: Vec<Vec<f64>>,
    source_norm: Vec<f64>,
    member_images: Vec<Vec<Array1<f64>>>,
}

impl CostEvaluator {
    pub fn new(cfg: CostConfig, known: &MrSet) -> Result<Self> {
        cfg.validate()?;
        if known.is_empty() {
            return Err(Error::validation("known set must contain the identity"));
        }
        let mut source_energy = Vec::with_capacity(cfg.samples.len());
        let mut source_norm = Vec::with_capacity(cfg.samples.len());
        for (i, x) in cfg.samples.iter().enumerate() {
            let input = unflatten(x, &cfg.layout)?;
            let e = energy_pipeline(&input, cfg.variant).map_err(|err| Error::NonFiniteCost {
                sample_index: i,
                detail: err.to_string(),
            })?;
            let norm = e.e.iter().map(|v| v * v).sum::<f64>().sqrt();
            source_energy.push(e.e);
            source_norm.push(norm);
        }
        let mut eval = CostEvaluator {
            cfg,
            source_energy,
            source_norm,
            member_images: Vec::new(),
        };
        for member in known.members() {
            eval.push_member(member)?;
        }
        Ok(eval)
    }

    /// Registers one more known member (after an admission).
    pub fn push_member(&mut self, member: &AffineMr) -> Result<()> {
        let images = self
            .cfg
            .samples
            .iter()
            .map(|x| member.apply(x))
            .collect::<Result<Vec<_>>>()?;
        self.member_images.push(images);
        Ok(())
    }

    pub fn config(&self) -> &CostConfig {
        &self.cfg
    }

    /// Cost of an arbitrary MR.
    pub fn cost_mr(&self, candidate: &AffineMr) -> Result<f64> {
        let images = self
            .cfg
            .samples
            .iter()
            .map(|x| candidate.apply(x))
            .collect::<Result<Vec<_>>>()?;
        self.cost_of_images(&images)
    }

    /// Cost of a dense candidate given directly as (Γ, β).
    fn cost_dense(&self, params: &DenseParams) -> Result<f64> {
        let images: Vec<Array1<f64>> = self
            .cfg
            .samples
            .iter()
            .map(|x| params.gamma.dot(x) + &params.beta)
            .collect();
        self.cost_of_images(&images)
    }

    fn cost_of_images(&self, images: &[Array1<f64>]) -> Result<f64> {
        let mut total = 0.0;
        for (i, morphed) in images.iter().enumerate() {
            // The transpose maps to the companion layout; every other
            // candidate keeps the input layout. Output length decides.
            let layout = if morphed.len() == self.cfg.layout.total_dim() {
                self.cfg.layout
            } else {
                return Err(Error::ShapeMismatch {
                    expected: format!("{}", self.cfg.layout.total_dim()),
                    got: format!("{}", morphed.len()),
                });
            };
            let input = unflatten(morphed, &layout)?;
            let energy = energy_pipeline(&input, self.cfg.variant).map_err(|err| {
                Error::NonFiniteCost {
                    sample_index: i,
                    detail: err.to_string(),
                }
            })?;
            let mut numerator = energy
                .e
                .iter()
                .zip(self.source_energy[i].iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if self.cfg.normalize {
                numerator /= self.source_norm[i] + NORM_FLOOR;
            }
            let mut denominator = self.cfg.epsilon;
            let mut product = 1.0;
            for member in &self.member_images {
                let dist2: f64 = morphed
                    .iter()
                    .zip(member[i].iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                product *= dist2;
            }
            denominator += product;
            let term = numerator / denominator;
            if !term.is_finite() {
                return Err(Error::NonFiniteCost {
                    sample_index: i,
                    detail: format!("numerator {numerator:e}, denominator {denominator:e}"),
                });
            }
            total += term;
        }
        Ok(total / self.cfg.samples.len() as f64)
    }

    /// Mean squared distance between a dense candidate and a known
    /// member, over the samples.
    fn distance_to_member(&self, params: &DenseParams, member: usize) -> f64 {
        let mut total = 0.0;
        for (x, img) in self.cfg.samples.iter().zip(self.member_images[member].iter()) {
            let y = params.gamma.dot(x) + &params.beta;
            total += y
                .iter()
                .zip(img.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        }
        total / self.cfg.samples.len() as f64
    }

    fn min_distance(&self, params: &DenseParams) -> f64 {
        (0..self.member_images.len())
            .map(|m| self.distance_to_member(params, m))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Sample-mean cost of a candidate against the known set.
pub fn cost(candidate: &AffineMr, known: &MrSet, cfg: &CostConfig) -> Result<f64> {
    CostEvaluator::new(cfg.clone(), known)?.cost_mr(candidate)
}

fn sample_kicks(
    mask: &ParamMask,
    subset: usize,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, f64)> {
    let normal = Normal::new(0.0, scale).expect("scale validated positive");
    let count = subset.min(mask.len());
    let picks = rand::seq::index::sample(rng, mask.len(), count);
    picks
        .iter()
        .map(|i| (mask.indices()[i], normal.sample(rng)))
        .collect()
}

fn subset_size(mask: &ParamMask, fraction: f64) -> usize {
    (((mask.len() as f64) * fraction).floor() as usize).max(1)
}

/// Adds a sparse normal mutation {δΓ, δβ} to a dense candidate.
pub fn propose_mutation(
    current: &AffineMr,
    scale: f64,
    subset: usize,
    mask: &ParamMask,
    rng: &mut ChaCha8Rng,
) -> Result<AffineMr> {
    let (gamma, beta) = current.to_dense()?;
    let mut params = DenseParams {
        d: current.layout.total_dim(),
        gamma,
        beta,
    };
    for (idx, delta) in sample_kicks(mask, subset, scale, rng) {
        params.set(idx, params.get(idx) + delta);
    }
    Ok(params.into_mr(current.layout, current.label.clone()))
}

/// One accept/reject decision: improvements always pass, degradations
/// pass with probability p.
pub fn accept_step(delta_cost: f64, p: f64, rng: &mut ChaCha8Rng) -> bool {
    if delta_cost < 0.0 {
        true
    } else {
        rng.random::<f64>() < p
    }
}

fn initial_params(
    mask: &ParamMask,
    d: usize,
    cfg: &SearchConfig,
    rng: &mut ChaCha8Rng,
) -> DenseParams {
    let normal = Normal::new(0.0, cfg.init_scale).expect("init_scale validated positive");
    let mut params = DenseParams::identity(d);
    for &idx in mask.indices() {
        let noise = normal.sample(rng);
        match cfg.init_mode {
            InitMode::IdentityNoise => params.set(idx, params.get(idx) + noise),
            InitMode::PureRandom => params.set(idx, noise),
        }
    }
    params
}

/// Runs one mutation/acceptance minimization against the known set and
/// returns the best candidate found plus its trace.
pub fn minimize(
    evaluator: &CostEvaluator,
    search_cfg: &SearchConfig,
    mask: &ParamMask,
    seed: u64,
) -> Result<(AffineMr, SearchTrace)> {
    search_cfg.validate()?;
    let layout = evaluator.config().layout;
    let d = layout.total_dim();
    if d > search_cfg.dimension_cap {
        return Err(Error::DimensionCap {
            dim: d,
            cap: search_cfg.dimension_cap,
        });
    }
    if mask.is_empty() {
        return Err(Error::validation("parameter mask is empty"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subset = subset_size(mask, search_cfg.mutation_fraction);

    // Draw initial candidates until one evaluates to a finite cost.
    const INIT_ATTEMPTS: usize = 32;
    let mut current = initial_params(mask, d, search_cfg, &mut rng);
    let mut current_cost = evaluator.cost_dense(&current);
    let mut attempts = 1;
    while current_cost.is_err() && attempts < INIT_ATTEMPTS {
        current = initial_params(mask, d, search_cfg, &mut rng);
        current_cost = evaluator.cost_dense(&current);
        attempts += 1;
    }
    let mut current_cost = current_cost.map_err(|e| {
        Error::SearchFailure(format!(
            "no finite-cost initial candidate in {INIT_ATTEMPTS} draws (last: {e})"
        ))
    })?;

    let mut best = current.clone();
    let mut best_cost = current_cost;
    let mut qualify_step = None;
    let mut p = search_cfg.acceptance_threshold;
    let mut records = Vec::with_capacity(search_cfg.max_steps.min(65_536));
    let mut best_history = Vec::with_capacity(search_cfg.max_steps.min(65_536));
    let mut status = TerminalStatus::StepLimit;

    let mut scratch: Vec<(usize, f64)> = Vec::new();
    for step in 0..search_cfg.max_steps {
        let kicks = sample_kicks(mask, subset, search_cfg.mutation_scale, &mut rng);
        scratch.clear();
        for &(idx, delta) in &kicks {
            scratch.push((idx, current.get(idx)));
            current.set(idx, current.get(idx) + delta);
        }

        let (proposed_cost, accepted) = match evaluator.cost_dense(&current) {
            Ok(pcost) => {
                let accepted = accept_step(pcost - current_cost, p, &mut rng);
                (pcost, accepted)
            }
            // Proposals that break the model (non-monotone coordinates,
            // zero Coriolis, overflow) are never accepted.
            Err(_) => (f64::NAN, false),
        };

        if accepted {
            current_cost = proposed_cost;
            if current_cost < best_cost {
                best_cost = current_cost;
                best = current.clone();
                if qualify_step.is_none()
                    && best_cost < search_cfg.cost_accept_tol
                    && evaluator.min_distance(&best) >= search_cfg.distance_min
                {
                    qualify_step = Some(step);
                }
            }
        } else {
            for &(idx, old) in scratch.iter().rev() {
                current.set(idx, old);
            }
        }

        records.push(TraceRecord {
            step,
            proposed_cost,
            accepted,
            best_cost,
        });
        best_history.push(best_cost);

        if let Some(factor) = search_cfg.cooling_factor {
            p *= factor;
        }

        if step + 1 > search_cfg.convergence_window {
            let before = best_history[step - search_cfg.convergence_window];
            if before - best_cost < search_cfg.convergence_tol {
                status = TerminalStatus::Converged;
                break;
            }
        }
    }

    let trace = SearchTrace {
        seed,
        records,
        status,
        qualify_step,
        final_best_cost: best_cost,
    };
    Ok((best.into_mr(layout, "candidate".into()), trace))
}

/// One admitted member with its bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissionRecord {
    pub label: String,
    pub slot: usize,
    pub restart: usize,
    pub seed: u64,
    pub cost: f64,
    /// Proposals consumed by earlier runs of this discovery.
    pub steps_before: usize,
    /// Step within the admitting run at which the candidate first met
    /// the thresholds.
    pub qualify_step: Option<usize>,
}

impl AdmissionRecord {
    /// Cumulative proposal count at which the admitted candidate first
    /// met the thresholds (budget-wide).
    pub fn admission_step(&self, run_len: usize) -> usize {
        self.steps_before + self.qualify_step.unwrap_or(run_len)
    }
}

/// Result of a discovery campaign. Zero admissions is a legitimate
/// outcome, reported with its traces rather than as an error.
#[derive(Debug)]
pub struct DiscoveryOutcome {
    pub set: MrSet,
    pub traces: Vec<SearchTrace>,
    pub admissions: Vec<AdmissionRecord>,
}

fn derive_seed(base: u64, slot: usize, attempt: usize) -> u64 {
    base ^ (slot as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (attempt as u64 + 1).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

fn discover_masked(
    cost_cfg: &CostConfig,
    search_cfg: &SearchConfig,
    mask: &ParamMask,
    n_target: usize,
) -> Result<DiscoveryOutcome> {
    if n_target == 0 {
        return Err(Error::validation("n_target must be at least 1"));
    }
    search_cfg.validate()?;
    let set = MrSet::new(cost_cfg.layout, cost_cfg.function_id());
    let mut evaluator = CostEvaluator::new(cost_cfg.clone(), &set)?;
    let mut set = set;
    let mut traces = Vec::new();
    let mut admissions = Vec::new();
    let mut steps_total = 0usize;

    'slots: for slot in 0..n_target {
        for attempt in 0..search_cfg.restarts {
            let seed = derive_seed(search_cfg.seed, slot, attempt);
            let (candidate, mut trace) = minimize(&evaluator, search_cfg, mask, seed)?;
            let run_len = trace.records.len();
            let admissible = trace.final_best_cost < search_cfg.cost_accept_tol
                && set
                    .members()
                    .iter()
                    .map(|m| crate::mr::mr_distance(&candidate, m, &cost_cfg.samples))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .all(|dist| dist >= search_cfg.distance_min);
            if admissible {
                let label = format!("discovered_{}", set.discovered().count());
                let mut member = candidate.with_label(label.clone());
                member.discovery = Some(DiscoveryMeta {
                    cost: trace.final_best_cost,
                    seed,
                    restart: attempt,
                    qualify_step: trace.qualify_step,
                });
                evaluator.push_member(&member)?;
                set.push_checked(member, &cost_cfg.samples, search_cfg.distance_min)?;
                admissions.push(AdmissionRecord {
                    label,
                    slot,
                    restart: attempt,
                    seed,
                    cost: trace.final_best_cost,
                    steps_before: steps_total,
                    qualify_step: trace.qualify_step,
                });
                traces.push(trace);
                steps_total += run_len;
                continue 'slots;
            }
            trace.status = TerminalStatus::RejectedCandidate;
            traces.push(trace);
            steps_total += run_len;
        }
        // Restart budget for this slot exhausted; no point trying the
        // next slot against the same set.
        break;
    }

    Ok(DiscoveryOutcome {
        set,
        traces,
        admissions,
    })
}

/// Grows an MR set from the identity by repeated minimization, admitting
/// candidates that are cheap and far from every known member.
pub fn discover(
    cost_cfg: &CostConfig,
    search_cfg: &SearchConfig,
    n_target: usize,
) -> Result<DiscoveryOutcome> {
    let mask = ParamMask::full(&cost_cfg.layout);
    discover_masked(cost_cfg, search_cfg, &mask, n_target)
}

/// [`discover`] with mutation restricted to the rows, columns and β
/// slots of the given input attributes.
pub fn targeted_discover(
    cost_cfg: &CostConfig,
    search_cfg: &SearchConfig,
    attrs: &[(Block, usize)],
    n_target: usize,
) -> Result<DiscoveryOutcome> {
    let mask = ParamMask::from_attrs(&cost_cfg.layout, attrs)?;
    discover_masked(cost_cfg, search_cfg, &mask, n_target)
}
