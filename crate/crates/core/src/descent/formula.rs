//! Closed-form steepest descent for the Lipschitz seminorm.
//!
//! On directions with `∫ v̄ f̄ = 0` the pairing is `Σ_j (v_{j+1} − v_j) Γ_j`, where
//! `Γ_j = −Σ_{i≤j} a_i` is, up to a constant, the mean of the antiderivative `G`
//! over segment `j`. Minimising over slopes in `[−1, 1]` with zero sum picks slope
//! `−1` above a median level of `Γ`, `+1` below it and a balancing slope on ties.

use serde::{Deserialize, Serialize};

use super::{check_len, finish, remove_weighted_mean, Direction, Method};
use crate::circle;
use crate::error::Result;
use crate::gradient::ShapeGradient;
use crate::radial::RadialShape;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaRule {
    /// Segment-wise median rule; attains the discrete optimum exactly.
    #[default]
    Exact,
    /// Nodal level sets with the band `ε = 3/(2N)(max G − min G)` and trapezoidal slopes.
    Nodal,
}

pub fn formula_direction(
    gradient: &ShapeGradient,
    shape: &RadialShape,
    rule: FormulaRule,
) -> Result<Direction> {
    check_len(gradient, shape)?;
    let reduced = gradient.reduce(shape)?;
    if reduced.a.iter().all(|&a| a == 0.0) {
        return Ok(Direction::zero(shape.n_nodes(), Method::Formula));
    }
    let slopes = match rule {
        FormulaRule::Exact => exact_slopes(&segment_levels(&reduced.a)),
        FormulaRule::Nodal => nodal_slopes(&antiderivative(gradient, reduced.c, shape)),
    };
    let mut g = accumulate(&slopes, circle::spacing(shape.n_nodes()));
    remove_weighted_mean(&mut g, shape);
    finish(g, Method::Formula, gradient)
}

/// `Γ_j = −Σ_{i≤j} a_i`, the coefficient of `v_{j+1} − v_j` in the pairing.
pub fn segment_levels(a: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    a.iter()
        .map(|ai| {
            acc += ai;
            -acc
        })
        .collect()
}

/// Nodal values `G(φ_i) = H̄(φ_i) − H̄(0) − ∫_0^{φ_i} (h̄ − c f̄)`.
pub fn antiderivative(gradient: &ShapeGradient, c: f64, shape: &RadialShape) -> Vec<f64> {
    let n = shape.n_nodes();
    let h = circle::spacing(n);
    let big = gradient.flux();
    let q: Vec<f64> = gradient
        .density()
        .iter()
        .zip(shape.values())
        .map(|(d, f)| d - c * f)
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut integral = 0.0;
    for i in 0..n {
        if i > 0 {
            integral += 0.5 * h * (q[i - 1] + q[i]);
        }
        out.push(big[i] - big[0] - integral);
    }
    out
}

fn exact_slopes(levels: &[f64]) -> Vec<f64> {
    let n = levels.len();
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let beta = sorted[n / 2];
    let scale = levels.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let tie = 1e-14 * scale;
    let class: Vec<i8> = levels
        .iter()
        .map(|&l| {
            if l > beta + tie {
                1
            } else if l < beta - tie {
                -1
            } else {
                0
            }
        })
        .collect();
    let plus = class.iter().filter(|&&c| c == 1).count() as f64;
    let minus = class.iter().filter(|&&c| c == -1).count() as f64;
    let zero = n as f64 - plus - minus;
    let k = (plus - minus) / zero;
    class
        .iter()
        .map(|&c| match c {
            1 => -1.0,
            -1 => 1.0,
            _ => k,
        })
        .collect()
}

fn nodal_slopes(g_nodes: &[f64]) -> Vec<f64> {
    let n = g_nodes.len();
    let h = circle::spacing(n);
    let measure = |i: usize| h * g_nodes.iter().filter(|&&g| g <= g_nodes[i]).count() as f64;
    let beta = (0..n)
        .filter(|&i| measure(i) < std::f64::consts::PI)
        .map(|i| g_nodes[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = g_nodes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    let beta = if beta.is_finite() { beta } else { lo };
    let eps = 1.5 / n as f64 * (hi - lo);
    let class: Vec<i8> = g_nodes
        .iter()
        .map(|&g| {
            if g > beta + eps {
                1
            } else if g < beta - eps {
                -1
            } else {
                0
            }
        })
        .collect();
    let plus = class.iter().filter(|&&c| c == 1).count() as f64;
    let minus = class.iter().filter(|&&c| c == -1).count() as f64;
    let zero = n as f64 - plus - minus;
    let k = if zero > 0.0 { (plus - minus) / zero } else { 0.0 };
    let s: Vec<f64> = class
        .iter()
        .map(|&c| match c {
            1 => -1.0,
            -1 => 1.0,
            _ => k,
        })
        .collect();
    // segment j joins nodes j and j+1; its slope averages the two nodal values
    (0..n).map(|j| 0.5 * (s[j] + s[(j + 1) % n])).collect()
}

fn accumulate(slopes: &[f64], h: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(slopes.len());
    let mut acc = 0.0;
    for s in slopes {
        g.push(acc);
        acc += h * s;
    }
    g
}
