//! Continuous, piecewise linear, 2π-periodic functions on a uniform grid.
//!
//! A function is stored by its values at the `N` nodes `φ_i = 2πi/N`; node `N`
//! is identified with node `0`. Segment `j` is `[φ_j, φ_{j+1}]`.

use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Grid spacing `2π/N`.
#[inline]
pub fn spacing(n: usize) -> f64 {
    TWO_PI / n as f64
}

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn wrap_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(TWO_PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Angle of a point in `[0, 2π)`.
#[inline]
pub fn angle_of(x: f64, y: f64) -> f64 {
    wrap_angle(y.atan2(x))
}

/// Segment index containing `phi` and the local coordinate `t ∈ [0, 1)` along it.
#[inline]
pub fn locate(n: usize, phi: f64) -> (usize, f64) {
    let mut s = wrap_angle(phi) / spacing(n);
    // node angles computed as i·h can divide back to just below i
    let nearest = s.round();
    if (s - nearest).abs() <= 4.0 * f64::EPSILON * nearest.max(1.0) {
        s = if nearest >= n as f64 { 0.0 } else { nearest };
    }
    let j = (s.floor() as usize).min(n - 1);
    let t = (s - j as f64).clamp(0.0, 1.0);
    (j, t)
}

/// Constant derivative on each segment.
pub fn slopes(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let h = spacing(n);
    (0..n).map(|j| (values[(j + 1) % n] - values[j]) / h).collect()
}

/// Exact integral over one period.
pub fn integral(values: &[f64]) -> f64 {
    spacing(values.len()) * values.iter().sum::<f64>()
}

/// Exact `∫ u v dφ` for two piecewise linear functions on the same grid.
pub fn inner(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    mass_apply(u).iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Exact `∫ u' v' dφ`.
pub fn derivative_inner(u: &[f64], v: &[f64]) -> f64 {
    let h = spacing(u.len());
    slopes(u)
        .iter()
        .zip(slopes(v))
        .map(|(a, b)| a * b * h)
        .sum()
}

/// Product with the mass matrix `M_ij = ∫ φ_i φ_j dφ`.
pub fn mass_apply(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let h = spacing(n);
    (0..n)
        .map(|i| {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            h * (4.0 * v[i] + prev + next) / 6.0
        })
        .collect()
}

/// Solves `M x = rhs` for the periodic mass matrix.
pub fn mass_solve(rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let h = spacing(n);
    solve_cyclic_constant(2.0 * h / 3.0, h / 6.0, rhs)
}

/// `∫ v φ_i' dφ` for every hat function `φ_i`.
pub fn derivative_load(v: &[f64]) -> Vec<f64> {
    // On segment j, φ_j' = -1/h and φ_{j+1}' = +1/h; ∫_seg v = h (v_j + v_{j+1}) / 2.
    let n = v.len();
    let mut out = vec![0.0; n];
    for j in 0..n {
        let k = (j + 1) % n;
        let mean = 0.5 * (v[j] + v[k]);
        out[j] -= mean;
        out[k] += mean;
    }
    out
}

/// Solves a cyclic tridiagonal system with constant diagonal `d` and constant
/// off-diagonals `e` (including the two corner entries) by Sherman-Morrison.
pub fn solve_cyclic_constant(d: f64, e: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    match n {
        0 => return Vec::new(),
        1 => return vec![rhs[0] / (d + 2.0 * e)],
        2 => {
            // [[d, 2e], [2e, d]]
            let det = d * d - 4.0 * e * e;
            return vec![
                (d * rhs[0] - 2.0 * e * rhs[1]) / det,
                (d * rhs[1] - 2.0 * e * rhs[0]) / det,
            ];
        }
        _ => {}
    }
    let gamma = -d;
    let mut diag = vec![d; n];
    diag[0] = d - gamma;
    diag[n - 1] = d - e * e / gamma;
    let x = thomas(&diag, e, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = e;
    let z = thomas(&diag, e, &u);
    let factor = (x[0] + e * x[n - 1] / gamma) / (1.0 + z[0] + e * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect()
}

/// Tridiagonal solve with variable diagonal and constant off-diagonal.
pub(crate) fn thomas(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    c[0] = off / diag[0];
    x[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - off * c[i - 1];
        c[i] = off / m;
        x[i] = (rhs[i] - off * x[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

/// Node angles `2πi/N`.
pub fn node_angles(n: usize) -> Vec<f64> {
    let h = spacing(n);
    (0..n).map(|i| i as f64 * h).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mass_row_sums_equal_spacing() {
        let n = 17;
        let ones = vec![1.0; n];
        for r in mass_apply(&ones) {
            assert_relative_eq!(r, spacing(n), max_relative = 1e-14);
        }
    }

    #[test]
    fn mass_solve_inverts_apply() {
        for n in [3, 4, 8, 33, 512] {
            let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + 0.1 * i as f64).collect();
            let back = mass_solve(&mass_apply(&v));
            for (a, b) in v.iter().zip(&back) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn derivative_load_sums_to_zero() {
        let v: Vec<f64> = (0..20).map(|i| (i as f64).cos()).collect();
        let s: f64 = derivative_load(&v).iter().sum();
        assert!(s.abs() < 1e-14);
    }

    #[test]
    fn locate_wraps_negative_angles() {
        let (j, t) = locate(4, -0.1);
        assert_eq!(j, 3);
        assert!(t > 0.9);
        let (j, t) = locate(4, 0.0);
        assert_eq!((j, t), (0, 0.0));
    }
}
