//! Surface-ocean kinetic energy model used as the function under test.
//!
//! The input is a discretized sea level η(t, y, x) together with its
//! coordinate arrays and the physical constants G (gravitational
//! acceleration) and F (Coriolis parameter). Geostrophic surface
//! velocities are
//!
//!   u = -(G/F) ∂η/∂y,   v = +(G/F) ∂η/∂x
//!
//! discretized with centered finite differences, and the output is the
//! kinetic energy series e(t) = ½ · mean over (y, x) of (u² + v²).
//!
//! Two variants of the derivative stencil exist: `Cyclic` wraps the
//! first/last index periodically, `NonCyclic` falls back to one-sided
//! differences there. The non-cyclic variant is the seeded defect:
//! the two variants agree at every point whose stencil stays in the
//! interior and disagree once data is moved across the boundary.

use ndarray::{Array1, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default gravitational acceleration (m/s²).
pub const DEFAULT_G: f64 = 9.81;
/// Default Coriolis parameter at 30° North (1/s): 2·Ω·sin(30°) with
/// Ω = 7.2921e-5 rad/s.
pub const DEFAULT_F: f64 = 7.2921e-5;

/// Discretization of the (t, y, x) box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub x0: f64,
    pub y0: f64,
    pub t0: f64,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
}

impl GridSpec {
    /// Grid with origin zero and the given spacings.
    pub fn new(ny: usize, nx: usize, nt: usize, dy: f64, dx: f64, dt: f64) -> Self {
        GridSpec {
            nx,
            ny,
            nt,
            x0: 0.0,
            y0: 0.0,
            t0: 0.0,
            dx,
            dy,
            dt,
        }
    }

    /// The 10 × 20 grid with 30 time steps and kilometer/hour spacings.
    pub fn default_campaign() -> Self {
        GridSpec::new(10, 20, 30, 1000.0, 1000.0, 3600.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::validation(format!(
                "grid needs nx >= 2 and ny >= 2, got nx={}, ny={}",
                self.nx, self.ny
            )));
        }
        if self.nt < 1 {
            return Err(Error::validation("grid needs nt >= 1"));
        }
        for (name, v) in [("dx", self.dx), ("dy", self.dy), ("dt", self.dt)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("x0", self.x0), ("y0", self.y0), ("t0", self.t0)] {
            if !v.is_finite() {
                return Err(Error::validation(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Sea level plus everything Eq-style evaluation needs: the vector x of
/// the metamorphic-relation definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInput {
    /// Sea level (m), shape (nt, ny, nx).
    pub eta: Array3<f64>,
    /// x coordinates (m), length nx.
    pub xs: Array1<f64>,
    /// y coordinates (m), length ny.
    pub ys: Array1<f64>,
    /// time values (s), length nt.
    pub ts: Array1<f64>,
    /// Gravitational acceleration (m/s²).
    pub g: f64,
    /// Coriolis parameter (1/s).
    pub f: f64,
}

fn strictly_monotone(v: &Array1<f64>) -> bool {
    if v.len() < 2 {
        return true;
    }
    let increasing = v[1] > v[0];
    v.windows(2)
        .into_iter()
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

impl ModelInput {
    /// Builds and validates an input.
    pub fn new(
        eta: Array3<f64>,
        xs: Array1<f64>,
        ys: Array1<f64>,
        ts: Array1<f64>,
        g: f64,
        f: f64,
    ) -> Result<Self> {
        let input = ModelInput::from_parts_unchecked(eta, xs, ys, ts, g, f);
        input.validate()?;
        Ok(input)
    }

    /// Builds an input without validating invariants. Used by unflatten,
    /// where morphed vectors may legitimately violate them; evaluation
    /// re-validates.
    pub fn from_parts_unchecked(
        eta: Array3<f64>,
        xs: Array1<f64>,
        ys: Array1<f64>,
        ts: Array1<f64>,
        g: f64,
        f: f64,
    ) -> Self {
        ModelInput { eta, xs, ys, ts, g, f }
    }

    pub fn nt(&self) -> usize {
        self.eta.shape()[0]
    }
    pub fn ny(&self) -> usize {
        self.eta.shape()[1]
    }
    pub fn nx(&self) -> usize {
        self.eta.shape()[2]
    }

    pub fn validate(&self) -> Result<()> {
        let (nt, ny, nx) = (self.nt(), self.ny(), self.nx());
        if self.xs.len() != nx || self.ys.len() != ny || self.ts.len() != nt {
            return Err(Error::ShapeMismatch {
                expected: format!("xs: {nx}, ys: {ny}, ts: {nt}"),
                got: format!(
                    "xs: {}, ys: {}, ts: {}",
                    self.xs.len(),
                    self.ys.len(),
                    self.ts.len()
                ),
            });
        }
        for (name, arr) in [("xs", &self.xs), ("ys", &self.ys), ("ts", &self.ts)] {
            if !strictly_monotone(arr) {
                return Err(Error::validation(format!("{name} is not strictly monotone")));
            }
            if arr.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation(format!("{name} contains non-finite values")));
            }
        }
        if self.f == 0.0 {
            return Err(Error::SingularParameter(
                "Coriolis parameter F is zero".into(),
            ));
        }
        if !self.f.is_finite() || !self.g.is_finite() {
            return Err(Error::validation("G and F must be finite"));
        }
        if self.eta.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("eta contains non-finite values"));
        }
        Ok(())
    }
}

/// Horizontal surface velocities, same shape as the η they derive from.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityFields {
    pub u: Array3<f64>,
    pub v: Array3<f64>,
}

/// Kinetic energy per time step (m²/s²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySeries {
    pub e: Vec<f64>,
}

impl EnergySeries {
    /// CSV with header `t,e`, one row per time step, full precision.
    pub fn to_csv(&self, ts: &Array1<f64>) -> String {
        let mut out = String::from("t,e\n");
        for (t, e) in ts.iter().zip(self.e.iter()) {
            out.push_str(&format!("{t},{e}\n"));
        }
        out
    }
}

/// Which boundary stencil the derivative uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryVariant {
    /// Periodic wrap at the first/last index (the correct implementation).
    Cyclic,
    /// One-sided differences at the first/last index (the defect).
    NonCyclic,
}

impl BoundaryVariant {
    pub fn label(&self) -> &'static str {
        match self {
            BoundaryVariant::Cyclic => "cyclic",
            BoundaryVariant::NonCyclic => "noncyclic",
        }
    }
}

impl std::str::FromStr for BoundaryVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(BoundaryVariant::Cyclic),
            "noncyclic" => Ok(BoundaryVariant::NonCyclic),
            other => Err(Error::validation(format!(
                "unknown variant '{other}', expected cyclic or noncyclic"
            ))),
        }
    }
}

/// Coordinate arrays for a grid: xs[i] = x0 + i·dx and so on.
pub fn make_coordinates(spec: &GridSpec) -> Result<(Array1<f64>, Array1<f64>, Array1<f64>)> {
    spec.validate()?;
    let xs = Array1::from_iter((0..spec.nx).map(|i| spec.x0 + i as f64 * spec.dx));
    let ys = Array1::from_iter((0..spec.ny).map(|j| spec.y0 + j as f64 * spec.dy));
    let ts = Array1::from_iter((0..spec.nt).map(|k| spec.t0 + k as f64 * spec.dt));
    Ok((xs, ys, ts))
}

/// Random sea level, uniform per grid point on [-amplitude, +amplitude].
/// Deterministic for a fixed (spec, seed, amplitude).
pub fn random_sea_level(spec: &GridSpec, seed: u64, amplitude: f64) -> Result<ModelInput> {
    spec.validate()?;
    if !(amplitude > 0.0) {
        return Err(Error::validation(format!(
            "amplitude must be positive, got {amplitude}"
        )));
    }
    let (xs, ys, ts) = make_coordinates(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = Array3::from_shape_simple_fn((spec.nt, spec.ny, spec.nx), || {
        rng.random_range(-amplitude..=amplitude)
    });
    ModelInput::new(eta, xs, ys, ts, DEFAULT_G, DEFAULT_F)
}

/// Centered derivative along one axis of a coordinate array, with the
/// requested boundary closure. `values[i]` are the samples, `coords[i]`
/// their positions. Writes d/dcoord into `out`.
fn derivative_1d(values: &[f64], coords: &Array1<f64>, variant: BoundaryVariant, out: &mut [f64]) {
    let n = values.len();
    debug_assert_eq!(coords.len(), n);
    debug_assert_eq!(out.len(), n);
    if n == 1 {
        out[0] = 0.0;
        return;
    }
    // Uniform spacing for the periodic wrap distance.
    let h = (coords[n - 1] - coords[0]) / (n - 1) as f64;
    for i in 0..n {
        out[i] = if i > 0 && i < n - 1 {
            (values[i + 1] - values[i - 1]) / (coords[i + 1] - coords[i - 1])
        } else {
            match variant {
                BoundaryVariant::Cyclic => {
                    let up = values[(i + 1) % n];
                    let dn = values[(i + n - 1) % n];
                    (up - dn) / (2.0 * h)
                }
                BoundaryVariant::NonCyclic => {
                    if i == 0 {
                        (values[1] - values[0]) / (coords[1] - coords[0])
                    } else {
                        (values[n - 1] - values[n - 2]) / (coords[n - 1] - coords[n - 2])
                    }
                }
            }
        };
    }
}

/// Geostrophic velocities u = -(G/F) ∂η/∂y, v = +(G/F) ∂η/∂x with the
/// finite-difference spacing taken from the coordinate arrays.
pub fn velocities(input: &ModelInput, variant: BoundaryVariant) -> Result<VelocityFields> {
    input.validate()?;
    let (nt, ny, nx) = (input.nt(), input.ny(), input.nx());
    let gf = input.g / input.f;
    let mut u = Array3::zeros((nt, ny, nx));
    let mut v = Array3::zeros((nt, ny, nx));

    let mut col = vec![0.0; ny];
    let mut dcol = vec![0.0; ny];
    let mut row = vec![0.0; nx];
    let mut drow = vec![0.0; nx];
    for k in 0..nt {
        // u from the y-derivative, one column at a time.
        for i in 0..nx {
            for j in 0..ny {
                col[j] = input.eta[(k, j, i)];
            }
            derivative_1d(&col, &input.ys, variant, &mut dcol);
            for j in 0..ny {
                u[(k, j, i)] = -gf * dcol[j];
            }
        }
        // v from the x-derivative, one row at a time.
        for j in 0..ny {
            for i in 0..nx {
                row[i] = input.eta[(k, j, i)];
            }
            derivative_1d(&row, &input.xs, variant, &mut drow);
            for i in 0..nx {
                v[(k, j, i)] = gf * drow[i];
            }
        }
    }
    Ok(VelocityFields { u, v })
}

/// e[k] = ½ · mean over (y, x) of (u² + v²). The area integrals cancel
/// to an unweighted mean on a uniform grid. Summation is row-major so
/// results are bit-stable.
pub fn kinetic_energy(vel: &VelocityFields) -> EnergySeries {
    let (nt, ny, nx) = {
        let s = vel.u.shape();
        (s[0], s[1], s[2])
    };
    let cells = (ny * nx) as f64;
    let mut e = Vec::with_capacity(nt);
    for k in 0..nt {
        let mut sum = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                let uu = vel.u[(k, j, i)];
                let vv = vel.v[(k, j, i)];
                sum += uu * uu + vv * vv;
            }
        }
        e.push(0.5 * sum / cells);
    }
    EnergySeries { e }
}

/// The function under test: sea level in, kinetic energy series out.
pub fn energy_pipeline(input: &ModelInput, variant: BoundaryVariant) -> Result<EnergySeries> {
    let vel = velocities(input, variant)?;
    Ok(kinetic_energy(&vel))
}

/// On-disk JSON document for a model input: nested arrays plus the grid
/// it was generated from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDocument {
    pub grid: GridSpec,
    pub eta: Vec<Vec<Vec<f64>>>,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub ts: Vec<f64>,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "F")]
    pub f: f64,
}

impl InputDocument {
    pub fn from_input(grid: GridSpec, input: &ModelInput) -> Self {
        let (nt, ny, nx) = (input.nt(), input.ny(), input.nx());
        let eta = (0..nt)
            .map(|k| {
                (0..ny)
                    .map(|j| (0..nx).map(|i| input.eta[(k, j, i)]).collect())
                    .collect()
            })
            .collect();
        InputDocument {
            grid,
            eta,
            xs: input.xs.to_vec(),
            ys: input.ys.to_vec(),
            ts: input.ts.to_vec(),
            g: input.g,
            f: input.f,
        }
    }

    pub fn into_input(self) -> Result<ModelInput> {
        let nt = self.eta.len();
        let ny = self.eta.first().map_or(0, |p| p.len());
        let nx = self.eta.first().and_then(|p| p.first()).map_or(0, |r| r.len());
        let mut eta = Array3::zeros((nt, ny, nx));
        for (k, plane) in self.eta.iter().enumerate() {
            if plane.len() != ny {
                return Err(Error::validation("ragged eta array"));
            }
            for (j, row) in plane.iter().enumerate() {
                if row.len() != nx {
                    return Err(Error::validation("ragged eta array"));
                }
                for (i, v) in row.iter().enumerate() {
                    eta[(k, j, i)] = *v;
                }
            }
        }
        ModelInput::new(
            eta,
            Array1::from_vec(self.xs),
            Array1::from_vec(self.ys),
            Array1::from_vec(self.ts),
            self.g,
            self.f,
        )
    }
}
