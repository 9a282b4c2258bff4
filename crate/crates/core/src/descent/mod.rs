//! Descent directions in `S^N` from a projected shape gradient.

pub mod formula;
pub mod h1;
pub mod sinkhorn;

use serde::{Deserialize, Serialize};

use crate::circle;
use crate::error::{Error, Result};
use crate::gradient::ShapeGradient;
use crate::radial::RadialShape;

pub use formula::{formula_direction, FormulaRule};
pub use h1::h1_direction;
pub use sinkhorn::{sinkhorn_direction, SinkhornAssignment, SinkhornReport, SinkhornSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Sinkhorn,
    H1,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Formula => "formula",
            Method::Sinkhorn => "sinkhorn",
            Method::H1 => "h1",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionFlags {
    /// The gradient data admits no descent; `g ≡ 0`.
    pub critical_point: bool,
    /// Sinkhorn hit its iteration cap before meeting the marginal tolerance.
    pub not_converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    pub g: Vec<f64>,
    pub method: Method,
    /// `⟨I_h(f̄), ḡ⟩`.
    pub predicted_decrease: f64,
    pub flags: DirectionFlags,
}

impl Direction {
    pub fn zero(n: usize, method: Method) -> Self {
        Self {
            g: vec![0.0; n],
            method,
            predicted_decrease: 0.0,
            flags: DirectionFlags {
                critical_point: true,
                not_converged: false,
            },
        }
    }

    pub fn is_zero(&self) -> bool {
        self.flags.critical_point || self.g.iter().all(|&v| v == 0.0)
    }

    /// Largest segment slope `max |ḡ′|`.
    pub fn max_slope(&self) -> f64 {
        max_slope(&self.g)
    }
}

/// Engine selection and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DirectionSettings {
    pub formula_rule: FormulaRule,
    pub sinkhorn: SinkhornSettings,
}

pub fn compute_direction(
    method: Method,
    gradient: &ShapeGradient,
    shape: &RadialShape,
    settings: &DirectionSettings,
) -> Result<Direction> {
    match method {
        Method::Formula => formula_direction(gradient, shape, settings.formula_rule),
        Method::Sinkhorn => sinkhorn_direction(gradient, shape, &settings.sinkhorn).map(|(d, _)| d),
        Method::H1 => h1_direction(gradient, shape),
    }
}

pub fn max_slope(g: &[f64]) -> f64 {
    circle::slopes(g).iter().fold(0.0, |m, s| m.max(s.abs()))
}

pub fn sup_norm(g: &[f64]) -> f64 {
    g.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Adds the constant that makes `∫ g f̄ dφ = 0`.
pub(crate) fn remove_weighted_mean(g: &mut [f64], shape: &RadialShape) {
    let mf = circle::mass_apply(shape.values());
    let total: f64 = mf.iter().sum();
    let alpha = -mf.iter().zip(g.iter()).map(|(a, b)| a * b).sum::<f64>() / total;
    for v in g.iter_mut() {
        *v += alpha;
    }
}

pub(crate) fn check_len(gradient: &ShapeGradient, shape: &RadialShape) -> Result<()> {
    if gradient.n_nodes() != shape.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: shape.n_nodes(),
            found: gradient.n_nodes(),
        });
    }
    Ok(())
}

pub(crate) fn finish(g: Vec<f64>, method: Method, gradient: &ShapeGradient) -> Result<Direction> {
    let predicted_decrease = gradient.pairing(&g)?;
    Ok(Direction {
        g,
        method,
        predicted_decrease,
        flags: DirectionFlags::default(),
    })
}
