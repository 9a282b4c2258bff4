//! Star-shaped domains described by a periodic piecewise linear radial function.
//!
//! The domain is `Ω_f = {0} ∪ {x ≠ 0 : |x| < f(ω_x)}` with `ω_x = x/|x|`, and the
//! unit disk is mapped onto it by `Φ_f(x) = f(ω_x) x`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};

use crate::circle::{self, TWO_PI};
use crate::error::{Error, Result};

/// Below this radius the direction `ω_x` is taken to be `(1, 0)`.
pub const ORIGIN_RADIUS: f64 = 1e-14;

/// Radial function `f̄ ∈ S^N`: node `i` sits at angle `2πi/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialShape {
    values: Vec<f64>,
}

/// Pointwise data of the transformation `Φ_f` at a point of the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformData {
    pub point_image: Vector2<f64>,
    pub jacobian: Matrix2<f64>,
    pub det: f64,
    /// `A_f = f² DΦ⁻¹ DΦ⁻ᵀ`, the pulled-back diffusion coefficient.
    pub coeff_matrix: Matrix2<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarShapeDiagnostics {
    /// Minimum radius `f₀`.
    pub min_radius: f64,
    /// Lipschitz seminorm `L = max |f'|`.
    pub lipschitz: f64,
    /// The domain is star-shaped with respect to the ball of this radius.
    pub star_margin: f64,
    /// Radius of a hold-all disk containing every domain with the same `L` and `∫f²`.
    pub hold_all_radius: f64,
}

/// Angle, direction and radial function data at a point of the disk.
#[derive(Debug, Clone, Copy)]
pub struct PolarSample {
    pub radius: f64,
    pub angle: f64,
    pub omega: Vector2<f64>,
    pub f: f64,
    pub slope: f64,
    /// Segment containing the angle and the local coordinate on it.
    pub segment: usize,
    pub t: f64,
}

impl PolarSample {
    /// Tangential gradient `∇_T f(ω) = f'(φ) ω^⊥`.
    #[inline]
    pub fn tangential_gradient(&self) -> Vector2<f64> {
        self.slope * perp(&self.omega)
    }
}

/// `(a₁, a₂)^⊥ = (-a₂, a₁)`.
#[inline]
pub fn perp(v: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(-v.y, v.x)
}

impl RadialShape {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidConfig("radial function needs at least one node".into()));
        }
        if let Some((node, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveRadius { node, value });
        }
        Ok(Self { values })
    }

    pub fn constant(n_nodes: usize, radius: f64) -> Result<Self> {
        Self::new(vec![radius; n_nodes])
    }

    /// Samples `profile` at the node angles.
    pub fn from_fn(n_nodes: usize, profile: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(circle::node_angles(n_nodes).into_iter().map(profile).collect())
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        circle::spacing(self.n_nodes())
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let (j, t) = circle::locate(self.n_nodes(), phi);
        self.interpolate(j, t)
    }

    /// Derivative on the segment containing `phi`; right-segment value at nodes.
    pub fn eval_slope(&self, phi: f64) -> f64 {
        let (j, _) = circle::locate(self.n_nodes(), phi);
        self.segment_slope(j)
    }

    #[inline]
    fn interpolate(&self, j: usize, t: f64) -> f64 {
        let n = self.n_nodes();
        let a = self.values[j];
        let b = self.values[(j + 1) % n];
        if t == 0.0 {
            a
        } else {
            a + t * (b - a)
        }
    }

    #[inline]
    fn segment_slope(&self, j: usize) -> f64 {
        let n = self.n_nodes();
        (self.values[(j + 1) % n] - self.values[j]) / self.spacing()
    }

    /// Polar data of `x`, with the origin convention `ω = (1, 0)`.
    pub fn polar(&self, x: &Vector2<f64>) -> PolarSample {
        let radius = x.norm();
        let (omega, angle) = if radius < ORIGIN_RADIUS {
            (Vector2::new(1.0, 0.0), 0.0)
        } else {
            (x / radius, circle::angle_of(x.x, x.y))
        };
        let (segment, t) = circle::locate(self.n_nodes(), angle);
        PolarSample {
            radius,
            angle,
            omega,
            f: self.interpolate(segment, t),
            slope: self.segment_slope(segment),
            segment,
            t,
        }
    }

    /// `Φ_f(x) = f(ω_x) x`, and `0` at the origin.
    pub fn map_point(&self, x: &Vector2<f64>) -> Vector2<f64> {
        if x.norm() == 0.0 {
            return Vector2::zeros();
        }
        self.polar(x).f * x
    }

    pub fn transform_at(&self, x: &Vector2<f64>) -> TransformData {
        let p = self.polar(x);
        let grad_t = p.tangential_gradient();
        let jacobian = Matrix2::identity() * p.f + p.omega * grad_t.transpose();
        TransformData {
            point_image: p.f * x,
            jacobian,
            det: p.f * p.f,
            coeff_matrix: coeff_matrix(&p),
        }
    }

    /// `∫₀^{2π} f² dφ`, exact for the piecewise quadratic integrand.
    pub fn square_integral(&self) -> f64 {
        circle::inner(&self.values, &self.values)
    }

    /// Area `|Ω_f| = ½ ∫ f² dφ`.
    pub fn volume(&self) -> f64 {
        0.5 * self.square_integral()
    }

    /// Scales `f` so that `∫ f² dφ = target`.
    pub fn rescale_to_square_integral(&self, target: f64) -> Self {
        let factor = (target / self.square_integral()).sqrt();
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn star_shape_diagnostics(&self) -> StarShapeDiagnostics {
        let min_radius = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let lipschitz = circle::slopes(&self.values)
            .into_iter()
            .fold(0.0, |m: f64, s| m.max(s.abs()));
        let star_margin = min_radius * min_radius / (lipschitz * PI + min_radius);
        let hold_all_radius = (self.square_integral() / TWO_PI).sqrt() + PI * lipschitz;
        StarShapeDiagnostics {
            min_radius,
            lipschitz,
            star_margin,
            hold_all_radius,
        }
    }
}

/// `A_f(ω) = I − ω⊗τ − τ⊗ω + |τ|² ω⊗ω` with `τ = ∇_T f / f` (two dimensions).
pub fn coeff_matrix(p: &PolarSample) -> Matrix2<f64> {
    let tau = p.tangential_gradient() / p.f;
    let w = p.omega;
    let wt = w * tau.transpose();
    Matrix2::identity() - wt - wt.transpose() + (w * w.transpose()) * tau.norm_squared()
}
