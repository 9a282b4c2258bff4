//! Discrete shape derivative: densities on the disk, their projections onto the
//! circle grid, and the reduced nodal weights used by the direction engines.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::circle;
use crate::error::{Error, Result};
use crate::fem::{Discretization, FemField, ProblemData};
use crate::radial::{perp, RadialShape};

/// Which representation of the shape derivative is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Volume,
    Boundary,
}

impl Form {
    pub fn name(self) -> &'static str {
        match self {
            Form::Volume => "volume",
            Form::Boundary => "boundary",
        }
    }
}

/// `h_{f,h}` and `H_{f,h}` at every quadrature point of the disk mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeDensities {
    pub h: Vec<f64>,
    pub big_h: Vec<Vector2<f64>>,
}

/// `ξ_{f,h}` at one point of a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub edge: usize,
    pub angle: f64,
    /// Quadrature weight including the arc-length factor.
    pub weight: f64,
    pub xi: f64,
}

pub fn volume_form_densities(
    disc: &Discretization<'_>,
    state: &FemField,
    adjoint: &FemField,
    data: &ProblemData,
) -> VolumeDensities {
    let space = disc.space();
    let n = space.points().len();
    let mut h = Vec::with_capacity(n);
    let mut big_h = Vec::with_capacity(n);
    let mut current = usize::MAX;
    let (mut gu, mut gp) = (Vector2::zeros(), Vector2::zeros());
    for (qp, s) in space.points().iter().zip(disc.samples()) {
        if qp.triangle != current {
            current = qp.triangle;
            gu = state.gradient_on(space, current);
            gp = adjoint.gradient_on(space, current);
        }
        let p = &s.polar;
        let f = p.f;
        let w = p.omega;
        let tf = p.tangential_gradient();
        let (uw, pw) = (gu.dot(&w), gp.dot(&w));
        let residual = state.value_at(space, qp) - (data.target)(&s.image);
        // ∇ẑ_f·ω = f ∇z(Φ_f x)·ω because ∇_T f ⊥ ω
        let dz = f * (data.target_gradient)(&s.image).dot(&w);
        let source = (data.source)(&s.image);
        let r = p.radius;
        h.push(
            2.0 * tf.norm_squared() / (f * f * f) * uw * pw
                - (tf.dot(&gu) * pw + tf.dot(&gp) * uw) / (f * f)
                + f * (residual * residual - r * residual * dz - r * source * pw),
        );
        big_h.push((pw * gu + uw * gp) / f - 2.0 / (f * f) * uw * pw * tf);
    }
    VolumeDensities { h, big_h }
}

const GAUSS4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
    (-0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_26, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
];

/// `ξ_{f,h}` sampled along every boundary chord. Each chord is parametrised by
/// angle, split at the circle-grid nodes, and sampled with 4-point Gauss rules;
/// gradients come from the owning triangle and the chord normal is used for `ω_h`.
pub fn boundary_form_density(
    disc: &Discretization<'_>,
    state: &FemField,
    adjoint: &FemField,
    data: &ProblemData,
) -> Vec<BoundarySample> {
    let space = disc.space();
    let mesh = space.mesh();
    let shape = disc.shape();
    let n = shape.n_nodes();
    let spacing = circle::spacing(n);
    let mut out = Vec::new();
    for (edge, (a, b, t)) in mesh.boundary_edges().enumerate() {
        let (xa, xb) = (mesh.vertices()[a], mesh.vertices()[b]);
        let tangent = xb - xa;
        let normal = Vector2::new(tangent.y, -tangent.x).normalize();
        let dist = xa.dot(&normal);
        let phi_n = circle::angle_of(normal.x, normal.y);
        let phi_a = circle::angle_of(xa.x, xa.y);
        let span = circle::wrap_angle(circle::angle_of(xb.x, xb.y) - phi_a);
        let phi_b = phi_a + span;

        let gu = state.gradient_on(space, t);
        let gp = adjoint.gradient_on(space, t);
        let flux = gu.dot(&normal) * gp.dot(&normal);
        let u_edge = |x: &Vector2<f64>| {
            let s = (x - xa).dot(&tangent) / tangent.norm_squared();
            (1.0 - s) * state.values()[a] + s * state.values()[b]
        };

        let mut cuts = vec![phi_a];
        let mut m = (phi_a / spacing).floor() as i64 + 1;
        while (m as f64) * spacing < phi_b {
            cuts.push(m as f64 * spacing);
            m += 1;
        }
        cuts.push(phi_b);
        for piece in cuts.windows(2) {
            let (lo, hi) = (piece[0], piece[1]);
            if hi <= lo {
                continue;
            }
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            for (xi_ref, w) in GAUSS4 {
                let phi = mid + half * xi_ref;
                let c = (phi - phi_n).cos();
                let omega = Vector2::new(phi.cos(), phi.sin());
                let x = dist / c * omega;
                let ds = dist / (c * c);
                let p = shape.polar(&x);
                let f = p.f;
                let residual = u_edge(&x) - (data.target)(&(f * x));
                let xi = 0.5 * residual * residual * f
                    + (1.0 + p.slope * p.slope / (f * f)) * flux / f;
                out.push(BoundarySample {
                    edge,
                    angle: circle::wrap_angle(phi),
                    weight: w * half * ds,
                    xi,
                });
            }
        }
    }
    out
}

fn scatter(n: usize, rhs: &mut [f64], angle: f64, value: f64) {
    let (j, t) = circle::locate(n, angle);
    rhs[j] += (1.0 - t) * value;
    rhs[(j + 1) % n] += t * value;
}

/// Load vectors `∫ h φ_i(ω_x)` and `∫ H·ω_x^⊥ φ_i(ω_x)` over the disk.
pub fn volume_loads(disc: &Discretization<'_>, densities: &VolumeDensities) -> (Vec<f64>, Vec<f64>) {
    let n = disc.shape().n_nodes();
    let mut rh = vec![0.0; n];
    let mut r_big = vec![0.0; n];
    for (k, (qp, s)) in disc.space().points().iter().zip(disc.samples()).enumerate() {
        let angle = s.polar.angle;
        scatter(n, &mut rh, angle, qp.weight * densities.h[k]);
        scatter(n, &mut r_big, angle, qp.weight * densities.big_h[k].dot(&perp(&s.polar.omega)));
    }
    (rh, r_big)
}

pub fn project_volume(disc: &Discretization<'_>, densities: &VolumeDensities) -> ShapeGradient {
    let (rh, r_big) = volume_loads(disc, densities);
    ShapeGradient {
        form: Form::Volume,
        density: circle::mass_solve(&rh),
        flux: circle::mass_solve(&r_big),
    }
}

pub fn project_boundary(n: usize, samples: &[BoundarySample]) -> ShapeGradient {
    let mut r = vec![0.0; n];
    for s in samples {
        scatter(n, &mut r, s.angle, s.weight * s.xi);
    }
    ShapeGradient {
        form: Form::Boundary,
        density: circle::mass_solve(&r),
        flux: vec![0.0; n],
    }
}

/// Full pipeline from solved state and adjoint to the projected gradient.
pub fn shape_gradient(
    disc: &Discretization<'_>,
    state: &FemField,
    adjoint: &FemField,
    data: &ProblemData,
    form: Form,
) -> ShapeGradient {
    match form {
        Form::Volume => project_volume(disc, &volume_form_densities(disc, state, adjoint, data)),
        Form::Boundary => project_boundary(
            disc.shape().n_nodes(),
            &boundary_form_density(disc, state, adjoint, data),
        ),
    }
}

/// Projected shape derivative on the circle grid: `h̄, H̄` for the volume form,
/// `ξ̄` (with zero flux) for the boundary form.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeGradient {
    form: Form,
    density: Vec<f64>,
    flux: Vec<f64>,
}

impl ShapeGradient {
    pub fn volume(h_bar: Vec<f64>, big_h_bar: Vec<f64>) -> Result<Self> {
        if h_bar.len() != big_h_bar.len() {
            return Err(Error::DimensionMismatch {
                expected: h_bar.len(),
                found: big_h_bar.len(),
            });
        }
        Ok(Self {
            form: Form::Volume,
            density: h_bar,
            flux: big_h_bar,
        })
    }

    pub fn boundary(xi_bar: Vec<f64>) -> Self {
        let n = xi_bar.len();
        Self {
            form: Form::Boundary,
            density: xi_bar,
            flux: vec![0.0; n],
        }
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn n_nodes(&self) -> usize {
        self.density.len()
    }

    /// `h̄` or `ξ̄`.
    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// `H̄`; identically zero for the boundary form.
    pub fn flux(&self) -> &[f64] {
        &self.flux
    }

    pub fn is_finite(&self) -> bool {
        self.density.iter().chain(&self.flux).all(|v| v.is_finite())
    }

    /// `∫ (h̄ v̄ + H̄ v̄′) dφ`, exact for piecewise linear data.
    pub fn pairing(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.n_nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_nodes(),
                found: v.len(),
            });
        }
        let flux_term: f64 = circle::derivative_load(&self.flux)
            .iter()
            .zip(v)
            .map(|(a, b)| a * b)
            .sum();
        Ok(circle::inner(&self.density, v) + flux_term)
    }

    pub fn reduce(&self, shape: &RadialShape) -> Result<ReducedDensity> {
        let f = shape.values();
        if f.len() != self.n_nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_nodes(),
                found: f.len(),
            });
        }
        let c = circle::integral(&self.density) / circle::integral(f);
        let q: Vec<f64> = self.density.iter().zip(f).map(|(h, f)| h - c * f).collect();
        let mq = circle::mass_apply(&q);
        let a = mq
            .iter()
            .zip(circle::derivative_load(&self.flux))
            .map(|(m, d)| m + d)
            .collect();
        Ok(ReducedDensity { c, a })
    }
}

/// `c` and the nodal weights `a_i` such that the pairing equals `Σ a_i v̄(φ_i)`
/// on directions with `∫ v̄ f̄ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensity {
    pub c: f64,
    pub a: Vec<f64>,
}

impl ReducedDensity {
    pub fn n_nodes(&self) -> usize {
        self.a.len()
    }

    pub fn positive(&self) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| self.a[i] > 0.0).collect()
    }

    pub fn negative(&self) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| self.a[i] < 0.0).collect()
    }

    pub fn zero(&self) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| self.a[i] == 0.0).collect()
    }

    /// `Σ a_i v_i`.
    pub fn apply(&self, v: &[f64]) -> f64 {
        self.a.iter().zip(v).map(|(a, v)| a * v).sum()
    }
}

/// Total arc length `∫_{∂B_h} do` seen by the boundary sampling.
pub fn boundary_length(samples: &[BoundarySample]) -> f64 {
    samples.iter().map(|s| s.weight).sum()
}
