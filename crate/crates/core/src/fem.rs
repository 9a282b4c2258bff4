//! P1 finite elements for the state and adjoint problems pulled back to the disk.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::mesh::DiskMesh;
use crate::quadrature::{quadrature_rule, QuadratureRule};
use crate::radial::{coeff_matrix, PolarSample, RadialShape};
use crate::sparse::{solve_cg, CgSettings, CsrMatrix, TripletBuilder};

pub type ScalarFn = Arc<dyn Fn(&Vector2<f64>) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(&Vector2<f64>) -> Vector2<f64> + Send + Sync>;

/// Source `F`, target `z` and its gradient, all in physical coordinates.
#[derive(Clone)]
pub struct ProblemData {
    pub source: ScalarFn,
    pub target: ScalarFn,
    pub target_gradient: VectorFn,
}

impl fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ProblemData { .. }")
    }
}

impl ProblemData {
    pub fn new(
        source: impl Fn(&Vector2<f64>) -> f64 + Send + Sync + 'static,
        target: impl Fn(&Vector2<f64>) -> f64 + Send + Sync + 'static,
        target_gradient: impl Fn(&Vector2<f64>) -> Vector2<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            source: Arc::new(source),
            target: Arc::new(target),
            target_gradient: Arc::new(target_gradient),
        }
    }

    /// Largest discrepancy between `target_gradient` and central differences of
    /// `target` over the given points.
    pub fn gradient_mismatch(&self, points: &[Vector2<f64>], step: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for p in points {
            let g = (self.target_gradient)(p);
            let ex = Vector2::new(step, 0.0);
            let ey = Vector2::new(0.0, step);
            let fd = Vector2::new(
                ((self.target)(&(p + ex)) - (self.target)(&(p - ex))) / (2.0 * step),
                ((self.target)(&(p + ey)) - (self.target)(&(p - ey))) / (2.0 * step),
            );
            worst = worst.max((g - fd).norm());
        }
        worst
    }
}

/// Quadrature point on the reference disk mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub triangle: usize,
    pub x: Vector2<f64>,
    pub bary: [f64; 3],
    /// Rule weight times triangle area.
    pub weight: f64,
}

/// Mesh, quadrature points and element gradients, independent of the shape.
#[derive(Debug, Clone)]
pub struct FemSpace {
    mesh: DiskMesh,
    rule: QuadratureRule,
    points: Vec<QuadPoint>,
    grads: Vec<[Vector2<f64>; 3]>,
    solver: CgSettings,
}

impl FemSpace {
    pub fn new(mesh: DiskMesh) -> Self {
        let rule = quadrature_rule();
        let mut points = Vec::with_capacity(mesh.n_triangles() * rule.len());
        let mut grads = Vec::with_capacity(mesh.n_triangles());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let [a, b, c] = tri.map(|v| mesh.vertices()[v]);
            let area = mesh.triangle_area(t);
            // ∇λ_k = perp(opposite edge) / (2 area), rotated inward
            let g = |p: Vector2<f64>, q: Vector2<f64>| Vector2::new(p.y - q.y, q.x - p.x) / (2.0 * area);
            grads.push([g(b, c), g(c, a), g(a, b)]);
            for (bc, w) in rule.points.iter().zip(&rule.weights) {
                points.push(QuadPoint {
                    triangle: t,
                    x: a * bc[0] + b * bc[1] + c * bc[2],
                    bary: *bc,
                    weight: w * area,
                });
            }
        }
        Self {
            mesh,
            rule,
            points,
            grads,
            solver: CgSettings::default(),
        }
    }

    pub fn with_solver(mut self, settings: CgSettings) -> Self {
        self.solver = settings;
        self
    }

    pub fn solver(&self) -> CgSettings {
        self.solver
    }

    pub fn mesh(&self) -> &DiskMesh {
        &self.mesh
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn points(&self) -> &[QuadPoint] {
        &self.points
    }

    pub fn points_of(&self, triangle: usize) -> &[QuadPoint] {
        let q = self.rule.len();
        &self.points[triangle * q..(triangle + 1) * q]
    }

    /// Gradients of the three barycentric coordinates on a triangle.
    pub fn basis_gradients(&self, triangle: usize) -> &[Vector2<f64>; 3] {
        &self.grads[triangle]
    }

    /// Evaluates the shape-dependent coefficients at every quadrature point.
    pub fn at_shape<'a>(&'a self, shape: &'a RadialShape) -> Discretization<'a> {
        let samples = self
            .points
            .iter()
            .map(|qp| {
                let polar = shape.polar(&qp.x);
                ShapeSample {
                    coeff: coeff_matrix(&polar),
                    image: polar.f * qp.x,
                    polar,
                }
            })
            .collect();
        Discretization {
            space: self,
            shape,
            samples,
        }
    }

    /// `(∫_{B_h} (u_h − exact)² dx)^{1/2}` on the reference disk.
    pub fn l2_error(&self, field: &FemField, exact: impl Fn(&Vector2<f64>) -> f64) -> f64 {
        self.points
            .iter()
            .map(|qp| {
                let d = field.value_at(self, qp) - exact(&qp.x);
                qp.weight * d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Nodal interpolant of `g`, forced to zero on the boundary.
    pub fn interpolate(&self, g: impl Fn(&Vector2<f64>) -> f64) -> FemField {
        let values = self
            .mesh
            .vertices()
            .iter()
            .enumerate()
            .map(|(v, x)| match self.mesh.interior_index(v) {
                Some(_) => g(x),
                None => 0.0,
            })
            .collect();
        FemField { values }
    }
}

/// Shape-dependent data at one quadrature point.
#[derive(Debug, Clone, Copy)]
pub struct ShapeSample {
    pub polar: PolarSample,
    pub coeff: Matrix2<f64>,
    /// `Φ_f(x)`.
    pub image: Vector2<f64>,
}

/// A `FemSpace` together with a fixed radial function.
#[derive(Debug, Clone)]
pub struct Discretization<'a> {
    space: &'a FemSpace,
    shape: &'a RadialShape,
    samples: Vec<ShapeSample>,
}

/// Piecewise linear field on the mesh with zero boundary values.
#[derive(Debug, Clone, PartialEq)]
pub struct FemField {
    values: Vec<f64>,
}

impl FemField {
    pub fn zeros(space: &FemSpace) -> Self {
        Self {
            values: vec![0.0; space.mesh.n_vertices()],
        }
    }

    /// Wraps per-vertex values; boundary entries must be zero.
    pub fn from_values(space: &FemSpace, values: Vec<f64>) -> Result<Self> {
        let mesh = space.mesh();
        if values.len() != mesh.n_vertices() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_vertices(),
                found: values.len(),
            });
        }
        if let Some(&v) = mesh.boundary_loop().iter().find(|&&v| values[v] != 0.0) {
            return Err(Error::InvalidConfig(format!(
                "field is nonzero at boundary vertex {v}"
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, space: &FemSpace, qp: &QuadPoint) -> f64 {
        let tri = space.mesh.triangles()[qp.triangle];
        (0..3).map(|k| qp.bary[k] * self.values[tri[k]]).sum()
    }

    pub fn gradient_on(&self, space: &FemSpace, triangle: usize) -> Vector2<f64> {
        let tri = space.mesh.triangles()[triangle];
        let g = space.basis_gradients(triangle);
        (0..3).map(|k| g[k] * self.values[tri[k]]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl<'a> Discretization<'a> {
    pub fn space(&self) -> &'a FemSpace {
        self.space
    }

    pub fn shape(&self) -> &'a RadialShape {
        self.shape
    }

    pub fn samples(&self) -> &[ShapeSample] {
        &self.samples
    }

    /// `∫ A_f ∇φ_a·∇φ_b` over interior unknowns.
    pub fn stiffness(&self) -> CsrMatrix {
        let mesh = self.space.mesh();
        let q = self.space.rule.len();
        let mut builder = TripletBuilder::new(mesh.n_interior());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let mut a = Matrix2::zeros();
            for (qp, s) in self.space.points_of(t).iter().zip(&self.samples[t * q..(t + 1) * q]) {
                a += s.coeff * qp.weight;
            }
            let g = self.space.basis_gradients(t);
            for i in 0..3 {
                let Some(row) = mesh.interior_index(tri[i]) else { continue };
                for j in 0..3 {
                    let Some(col) = mesh.interior_index(tri[j]) else { continue };
                    builder.add(row, col, g[j].dot(&(a * g[i])));
                }
            }
        }
        builder.build()
    }

    /// `∫ w(x) φ_a f(ω_x)²` for a weight evaluated per quadrature point.
    pub fn load(&self, weight: impl Fn(usize, &QuadPoint, &ShapeSample) -> f64) -> Vec<f64> {
        let mesh = self.space.mesh();
        let mut rhs = vec![0.0; mesh.n_interior()];
        for (k, (qp, s)) in self.space.points.iter().zip(&self.samples).enumerate() {
            let value = weight(k, qp, s) * s.polar.f * s.polar.f * qp.weight;
            let tri = mesh.triangles()[qp.triangle];
            for i in 0..3 {
                if let Some(row) = mesh.interior_index(tri[i]) {
                    rhs[row] += value * qp.bary[i];
                }
            }
        }
        rhs
    }

    pub fn state_load(&self, data: &ProblemData) -> Vec<f64> {
        self.load(|_, _, s| (data.source)(&s.image))
    }

    pub fn adjoint_load(&self, state: &FemField, data: &ProblemData) -> Vec<f64> {
        self.load(|_, qp, s| state.value_at(self.space, qp) - (data.target)(&s.image))
    }

    fn solve(&self, rhs: &[f64]) -> Result<FemField> {
        let k = self.stiffness();
        let sol = solve_cg(&k, rhs, self.space.solver)?;
        let mesh = self.space.mesh();
        let mut values = vec![0.0; mesh.n_vertices()];
        for (v, value) in values.iter_mut().enumerate() {
            if let Some(i) = mesh.interior_index(v) {
                *value = sol.x[i];
            }
        }
        Ok(FemField { values })
    }

    /// `û_h` with `∫ A_f ∇û_h·∇η = ∫ F̂_f η f²`.
    pub fn solve_state(&self, data: &ProblemData) -> Result<FemField> {
        self.solve(&self.state_load(data))
    }

    /// `p̂_h` with `∫ A_f ∇p̂_h·∇η = ∫ (û_h − ẑ_f) η f²`.
    pub fn solve_adjoint(&self, state: &FemField, data: &ProblemData) -> Result<FemField> {
        self.solve(&self.adjoint_load(state, data))
    }

    /// `½ ∫ (û_h − ẑ_f)² f²`.
    pub fn energy(&self, state: &FemField, data: &ProblemData) -> f64 {
        0.5 * self
            .space
            .points
            .iter()
            .zip(&self.samples)
            .map(|(qp, s)| {
                let d = state.value_at(self.space, qp) - (data.target)(&s.image);
                qp.weight * d * d * s.polar.f * s.polar.f
            })
            .sum::<f64>()
    }
}

pub fn solve_state(space: &FemSpace, shape: &RadialShape, data: &ProblemData) -> Result<FemField> {
    space.at_shape(shape).solve_state(data)
}

pub fn solve_adjoint(
    space: &FemSpace,
    shape: &RadialShape,
    state: &FemField,
    data: &ProblemData,
) -> Result<FemField> {
    space.at_shape(shape).solve_adjoint(state, data)
}

pub fn energy(space: &FemSpace, shape: &RadialShape, state: &FemField, data: &ProblemData) -> f64 {
    space.at_shape(shape).energy(state, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_disk_mesh;
    use std::f64::consts::PI;

    fn unit_load() -> ProblemData {
        ProblemData::new(|_| 1.0, |_| 0.0, |_| Vector2::zeros())
    }

    fn nodal_max_error(space: &FemSpace, u: &FemField, exact: impl Fn(&Vector2<f64>) -> f64) -> f64 {
        space
            .mesh()
            .vertices()
            .iter()
            .zip(u.values())
            .map(|(x, v)| (v - exact(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_source_gives_zero_state() {
        let space = FemSpace::new(generate_disk_mesh(4));
        let f = RadialShape::constant(16, 1.3).unwrap();
        let data = ProblemData::new(|_| 0.0, |_| 0.0, |_| Vector2::zeros());
        let u = solve_state(&space, &f, &data).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn unit_disk_poisson() {
        let exact = |x: &Vector2<f64>| (1.0 - x.norm_squared()) / 4.0;
        let mut errors = vec![];
        for level in [4, 8, 16] {
            let space = FemSpace::new(generate_disk_mesh(level));
            let f = RadialShape::constant(32, 1.0).unwrap();
            let u = solve_state(&space, &f, &unit_load()).unwrap();
            errors.push(nodal_max_error(&space, &u, exact));
        }
        let h2 = |l: f64| 1.0 / (l * l);
        for (e, l) in errors.iter().zip([4.0, 8.0, 16.0]) {
            assert!(*e < 0.2 * h2(l), "level {l}: {e}");
        }
        assert!(errors[2] < errors[1] && errors[1] < errors[0]);
    }

    #[test]
    fn radius_two_pullback() {
        // u(y) = (4 − |y|²)/4 on the radius-2 disk, pulled back: 1 − |x|²
        let space = FemSpace::new(generate_disk_mesh(12));
        let f = RadialShape::constant(32, 2.0).unwrap();
        let u = solve_state(&space, &f, &unit_load()).unwrap();
        let err = nodal_max_error(&space, &u, |x| 1.0 - x.norm_squared());
        assert!(err < 4.0 * 0.2 / 144.0, "{err}");
    }

    #[test]
    fn adjoint_with_unit_residual() {
        // z = u − 1 makes û − ẑ ≈ 1, so p̂ ≈ (1 − |x|²)/4
        let space = FemSpace::new(generate_disk_mesh(12));
        let f = RadialShape::constant(32, 1.0).unwrap();
        let data = ProblemData::new(
            |_| 1.0,
            |y| (1.0 - y.norm_squared()) / 4.0 - 1.0,
            |y| -0.5 * y,
        );
        let disc = space.at_shape(&f);
        let u = disc.solve_state(&data).unwrap();
        let p = disc.solve_adjoint(&u, &data).unwrap();
        let err = nodal_max_error(&space, &p, |x| (1.0 - x.norm_squared()) / 4.0);
        assert!(err < 0.01, "{err}");
    }

    #[test]
    fn adjoint_vanishes_when_target_matches_state() {
        let space = FemSpace::new(generate_disk_mesh(4));
        let f = RadialShape::constant(16, 1.0).unwrap();
        let data = ProblemData::new(|_| 0.0, |_| 0.0, |_| Vector2::zeros());
        let disc = space.at_shape(&f);
        let u = disc.solve_state(&data).unwrap();
        assert_eq!(disc.solve_adjoint(&u, &data).unwrap().max_abs(), 0.0);
        assert_eq!(disc.energy(&u, &data), 0.0);
    }

    #[test]
    fn adjoint_has_sixfold_symmetry() {
        let level = 6;
        let mesh = generate_disk_mesh(level);
        // ring k occupies indices start_k .. start_k + 6k; rotation by 60° shifts by k
        let rotate = |v: usize| -> usize {
            if v == 0 {
                return 0;
            }
            let mut k = 1;
            let mut start = 1;
            while v >= start + 6 * k {
                start += 6 * k;
                k += 1;
            }
            start + (v - start + k) % (6 * k)
        };
        let space = FemSpace::new(mesh);
        let f = RadialShape::constant(12, 1.2).unwrap();
        let data = ProblemData::new(
            |y| 1.0 + y.norm_squared(),
            |y| 0.3 - y.norm_squared(),
            |y| -2.0 * y,
        );
        let disc = space.at_shape(&f);
        let u = disc.solve_state(&data).unwrap();
        let p = disc.solve_adjoint(&u, &data).unwrap();
        let scale = p.max_abs();
        assert!(scale > 0.0);
        for v in 0..space.mesh().n_vertices() {
            let w = rotate(v);
            let (a, b) = (space.mesh().vertices()[v], space.mesh().vertices()[w]);
            assert!((a.norm() - b.norm()).abs() < 1e-12);
            assert!((p.values()[v] - p.values()[w]).abs() < 1e-8 * scale);
        }
    }

    #[test]
    fn energy_of_constant_mismatch_is_half_area() {
        let space = FemSpace::new(generate_disk_mesh(8));
        let f = RadialShape::constant(16, 1.0).unwrap();
        let data = ProblemData::new(|_| 0.0, |_| 1.0, |_| Vector2::zeros());
        let u = FemField::zeros(&space);
        let e = energy(&space, &f, &u, &data);
        assert!((e - 0.5 * space.mesh().total_area()).abs() < 1e-12);
        assert!((e - PI / 2.0).abs() < 0.02);
    }

    #[test]
    fn stiffness_is_symmetric_positive_definite() {
        let space = FemSpace::new(generate_disk_mesh(5));
        let f = RadialShape::from_fn(24, |p| 1.0 + 0.3 * (3.0 * p).sin()).unwrap();
        let k = space.at_shape(&f).stiffness();
        assert!(k.asymmetry() < 1e-13 * k.norm_inf());
        assert!(k.diagonal().iter().all(|&d| d > 0.0));
        let x: Vec<f64> = (0..k.dim()).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let kx = k.mul_vec(&x);
        assert!(x.iter().zip(&kx).map(|(a, b)| a * b).sum::<f64>() > 0.0);
    }

    #[test]
    fn galerkin_residual_is_small() {
        let space = FemSpace::new(generate_disk_mesh(8));
        let f = RadialShape::from_fn(32, |p| 1.0 + 0.2 * p.cos()).unwrap();
        let data = ProblemData::new(|y| 1.0 + y.x, |_| 0.0, |_| Vector2::zeros());
        let disc = space.at_shape(&f);
        let u = disc.solve_state(&data).unwrap();
        let k = disc.stiffness();
        let b = disc.state_load(&data);
        let mut x = vec![0.0; k.dim()];
        for (v, val) in u.values().iter().enumerate() {
            if let Some(i) = space.mesh().interior_index(v) {
                x[i] = *val;
            }
        }
        let r: f64 = k.mul_vec(&x).iter().zip(&b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(r <= 1e-10 * bn);
    }

    #[test]
    fn gradient_mismatch_detects_wrong_gradient() {
        let good = ProblemData::new(|_| 0.0, |y| y.x * y.y, |y| Vector2::new(y.y, y.x));
        let bad = ProblemData::new(|_| 0.0, |y| y.x * y.y, |y| Vector2::new(y.x, y.y));
        let pts = [Vector2::new(0.3, -0.2), Vector2::new(0.7, 0.1)];
        assert!(good.gradient_mismatch(&pts, 1e-5) < 1e-8);
        assert!(bad.gradient_mismatch(&pts, 1e-5) > 0.1);
    }

    #[test]
    fn from_values_rejects_boundary_data() {
        let space = FemSpace::new(generate_disk_mesh(2));
        let mut v = vec![0.0; space.mesh().n_vertices()];
        v[space.mesh().boundary_loop()[0]] = 1.0;
        assert!(FemField::from_values(&space, v).is_err());
        assert!(FemField::from_values(&space, vec![0.0; 3]).is_err());
    }
}
