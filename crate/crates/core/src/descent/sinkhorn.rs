//! Entropic optimal transport between the positive and negative parts of the
//! reduced density, solved by log-domain Sinkhorn scaling. The dual potentials
//! give a 1-Lipschitz ascent profile whose negation is the descent direction.

use super::{check_len, finish, remove_weighted_mean, Direction, Method};
use crate::circle;
use crate::error::{Error, Result};
use crate::gradient::{ReducedDensity, ShapeGradient};
use crate::radial::RadialShape;

/// How nodal values are read off the dual potentials.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SinkhornAssignment {
    /// c-transform of the negative-side potential on every node.
    #[default]
    CTransform,
    /// Potentials used directly on their supports; c-transform only on zero nodes.
    DirectDual,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinkhornSettings {
    pub delta: f64,
    pub max_iter: usize,
    /// Bound on both mean absolute marginal residuals.
    pub tol: f64,
    pub assignment: SinkhornAssignment,
}

impl Default for SinkhornSettings {
    fn default() -> Self {
        Self {
            delta: 0.05,
            max_iter: 2000,
            tol: 1e-6,
            assignment: SinkhornAssignment::CTransform,
        }
    }
}

/// Diagnostics of one Sinkhorn solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SinkhornReport {
    pub iterations: usize,
    pub converged: bool,
    /// Mean `|a_i − Σ_j P_ij|` over `N⁺`.
    pub row_residual: f64,
    /// Mean `|−a_j − Σ_i P_ij|` over `N⁻`.
    pub col_residual: f64,
    /// `Σ C_ij P_ij`.
    pub transport_cost: f64,
    /// Ascent-oriented nodal potential before the sign flip and mean shift.
    pub potential: Vec<f64>,
}

/// Intrinsic distance on the circle, `arccos(cos(φ − ψ))`, computed without arccos.
pub fn circle_distance(phi: f64, psi: f64) -> f64 {
    let d = circle::wrap_angle(phi - psi);
    d.min(circle::TWO_PI - d)
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// Runs Sinkhorn on nodal masses `a` (summing to zero) and returns the
/// ascent-oriented potential together with diagnostics.
pub fn solve_transport(a: &[f64], settings: &SinkhornSettings) -> Result<Option<SinkhornReport>> {
    let n = a.len();
    if settings.delta <= 0.0 || !settings.delta.is_finite() {
        return Err(Error::InvalidConfig(format!("Sinkhorn delta must be positive, got {}", settings.delta)));
    }
    let plus: Vec<usize> = (0..n).filter(|&i| a[i] > 0.0).collect();
    let minus: Vec<usize> = (0..n).filter(|&j| a[j] < 0.0).collect();
    if plus.is_empty() || minus.is_empty() {
        return Ok(None);
    }
    let angles = circle::node_angles(n);
    let cost: Vec<Vec<f64>> = plus
        .iter()
        .map(|&i| minus.iter().map(|&j| circle_distance(angles[i], angles[j])).collect())
        .collect();
    let delta = settings.delta;
    let log_a: Vec<f64> = plus.iter().map(|&i| a[i].ln()).collect();
    let log_b: Vec<f64> = minus.iter().map(|&j| (-a[j]).ln()).collect();
    // potentials f = δ log u on N⁺, g = δ log v on N⁻
    let mut fp = vec![0.0; plus.len()];
    let mut gm = vec![0.0; minus.len()];

    let mut iterations = 0;
    let mut converged = false;
    let (mut row_res, mut col_res) = (f64::INFINITY, f64::INFINITY);
    while iterations < settings.max_iter {
        iterations += 1;
        for (r, f) in fp.iter_mut().enumerate() {
            let lse = log_sum_exp(gm.iter().zip(&cost[r]).map(|(g, c)| (g - c) / delta));
            *f = delta * (log_a[r] - lse);
        }
        for (s, g) in gm.iter_mut().enumerate() {
            let lse = log_sum_exp(fp.iter().zip(&cost).map(|(f, row)| (f - row[s]) / delta));
            *g = delta * (log_b[s] - lse);
        }
        if fp.iter().chain(&gm).any(|v| !v.is_finite()) {
            return Err(Error::SinkhornOverflow { iteration: iterations, delta });
        }
        (row_res, col_res) = residuals(a, &plus, &minus, &cost, &fp, &gm, delta);
        if row_res <= settings.tol && col_res <= settings.tol {
            converged = true;
            break;
        }
    }

    let mut transport_cost = 0.0;
    for (r, row) in cost.iter().enumerate() {
        for (s, c) in row.iter().enumerate() {
            transport_cost += c * ((fp[r] + gm[s] - c) / delta).exp();
        }
    }

    // negative-side dual values ξ_j = −g_j
    let xi_minus: Vec<f64> = gm.iter().map(|g| -g).collect();
    let c_transform = |k: usize| -> f64 {
        minus
            .iter()
            .zip(&xi_minus)
            .map(|(&j, x)| x + circle_distance(angles[k], angles[j]))
            .fold(f64::INFINITY, f64::min)
    };
    let mut potential = vec![0.0; n];
    match settings.assignment {
        SinkhornAssignment::CTransform => {
            for &i in &plus {
                potential[i] = c_transform(i);
            }
            for &j in &minus {
                potential[j] = plus
                    .iter()
                    .map(|&i| potential[i] - circle_distance(angles[i], angles[j]))
                    .fold(f64::NEG_INFINITY, f64::max);
            }
        }
        SinkhornAssignment::DirectDual => {
            for (&i, f) in plus.iter().zip(&fp) {
                potential[i] = *f;
            }
            for (&j, x) in minus.iter().zip(&xi_minus) {
                potential[j] = *x;
            }
        }
    }
    for k in (0..n).filter(|&k| a[k] == 0.0) {
        potential[k] = c_transform(k);
    }

    Ok(Some(SinkhornReport {
        iterations,
        converged,
        row_residual: row_res,
        col_residual: col_res,
        transport_cost,
        potential,
    }))
}

fn residuals(
    a: &[f64],
    plus: &[usize],
    minus: &[usize],
    cost: &[Vec<f64>],
    fp: &[f64],
    gm: &[f64],
    delta: f64,
) -> (f64, f64) {
    let mut col = vec![0.0; minus.len()];
    let mut row_res = 0.0;
    for (r, &i) in plus.iter().enumerate() {
        let mut row = 0.0;
        for (s, c) in cost[r].iter().enumerate() {
            let p = ((fp[r] + gm[s] - c) / delta).exp();
            row += p;
            col[s] += p;
        }
        row_res += (a[i] - row).abs();
    }
    let col_res: f64 = minus.iter().zip(&col).map(|(&j, c)| (-a[j] - c).abs()).sum();
    (row_res / plus.len() as f64, col_res / minus.len() as f64)
}

pub fn sinkhorn_direction(
    gradient: &ShapeGradient,
    shape: &RadialShape,
    settings: &SinkhornSettings,
) -> Result<(Direction, Option<SinkhornReport>)> {
    check_len(gradient, shape)?;
    let reduced: ReducedDensity = gradient.reduce(shape)?;
    let Some(report) = solve_transport(&reduced.a, settings)? else {
        return Ok((Direction::zero(shape.n_nodes(), Method::Sinkhorn), None));
    };
    let mut g: Vec<f64> = report.potential.iter().map(|p| -p).collect();
    remove_weighted_mean(&mut g, shape);
    let mut dir = finish(g, Method::Sinkhorn, gradient)?;
    dir.flags.not_converged = !report.converged;
    Ok((dir, Some(report)))
}
