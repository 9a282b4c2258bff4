//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use lipshape::circle;
use lipshape::descent::sinkhorn::circle_distance;
use lipshape::gradient::ShapeGradient;
use lipshape::radial::RadialShape;
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;

/// Minimum of the pairing over `{|v'| ≤ 1, ∫ v f̄ = 0}` by linear programming.
pub fn direction_lp(gradient: &ShapeGradient, shape: &RadialShape) -> f64 {
    let n = shape.n_nodes();
    let h = circle::spacing(n);
    let costs: Vec<f64> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            gradient.pairing(&e).unwrap()
        })
        .collect();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = costs.iter().map(|&c| lp.add_var(c, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    for i in 0..n {
        let j = (i + 1) % n;
        lp.add_constraint(&[(vars[j], 1.0), (vars[i], -1.0)], ComparisonOp::Le, h);
        lp.add_constraint(&[(vars[j], 1.0), (vars[i], -1.0)], ComparisonOp::Ge, -h);
    }
    let m = circle::mass_apply(shape.values());
    let mean: Vec<_> = vars.iter().zip(&m).map(|(&v, &w)| (v, w)).collect();
    lp.add_constraint(&mean[..], ComparisonOp::Eq, 0.0);
    lp.solve().unwrap().into_solution().unwrap().objective()
}

/// Unregularised transport cost between the positive and negative parts of `a`
/// with the intrinsic circle distance.
pub fn transport_lp(a: &[f64]) -> f64 {
    let angles = circle::node_angles(a.len());
    let pos: Vec<usize> = (0..a.len()).filter(|&i| a[i] > 0.0).collect();
    let neg: Vec<usize> = (0..a.len()).filter(|&i| a[i] < 0.0).collect();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let mut plan = vec![vec![]; pos.len()];
    for (r, &i) in pos.iter().enumerate() {
        for &j in &neg {
            plan[r].push(lp.add_var(circle_distance(angles[i], angles[j]), (0.0, f64::INFINITY)));
        }
    }
    for (r, &i) in pos.iter().enumerate() {
        let row: Vec<_> = plan[r].iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint(&row[..], ComparisonOp::Eq, a[i]);
    }
    for (k, &j) in neg.iter().enumerate() {
        let col: Vec<_> = plan.iter().map(|row| (row[k], 1.0)).collect();
        lp.add_constraint(&col[..], ComparisonOp::Eq, -a[j]);
    }
    lp.solve().unwrap().into_solution().unwrap().objective()
}

/// Smooth positive radial function with a few random Fourier modes.
pub fn random_shape(rng: &mut impl Rng, n: usize) -> RadialShape {
    let modes: Vec<(f64, f64, f64)> = (1..=3)
        .map(|k| (k as f64, rng.gen_range(-0.1..0.1), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    RadialShape::from_fn(n, |phi| 1.0 + modes.iter().map(|(k, a, s)| a * (k * phi + s).cos()).sum::<f64>()).unwrap()
}

/// Volume-form gradient with independent random nodal densities.
pub fn random_gradient(rng: &mut impl Rng, n: usize) -> ShapeGradient {
    let h = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let big_h = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    ShapeGradient::volume(h, big_h).unwrap()
}

/// `max |f − mean f| / mean f` over the nodes.
pub fn radial_deviation(shape: &RadialShape) -> f64 {
    let v = shape.values();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().fold(0.0f64, |m, x| m.max((x - mean).abs())) / mean
}
