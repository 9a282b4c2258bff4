//! Built-in test problems.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::Vector2;

use crate::error::{Error, Result};
use crate::fem::ProblemData;
use crate::radial::RadialShape;

pub const EXPERIMENT_NAMES: [&str; 4] = ["level-set-square", "disk", "square-zero", "double-ball"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialShape {
    /// `f ≡ 1`.
    UnitDisk,
    /// Square of side `√π`, centred at the origin.
    Square,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: &'static str,
    pub data: ProblemData,
    pub initial: InitialShape,
    pub expected: &'static str,
}

impl ExperimentSpec {
    pub fn initial_shape(&self, n_nodes: usize) -> Result<RadialShape> {
        match self.initial {
            InitialShape::UnitDisk => RadialShape::constant(n_nodes, 1.0),
            InitialShape::Square => RadialShape::from_fn(n_nodes, square_radius),
        }
    }
}

/// Radial function of the square `(−√π/2, √π/2)²`.
pub fn square_radius(phi: f64) -> f64 {
    (PI.sqrt() / 2.0) / phi.cos().abs().max(phi.sin().abs())
}

fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

pub fn builtin(name: &str) -> Result<ExperimentSpec> {
    let spec = match name {
        "level-set-square" => ExperimentSpec {
            name: "level-set-square",
            data: ProblemData::new(
                |_| 0.0,
                |y| (y.x + y.y).abs() + (y.x - y.y).abs(),
                |y| sign(y.x + y.y) * Vector2::new(1.0, 1.0) + sign(y.x - y.y) * Vector2::new(1.0, -1.0),
            ),
            initial: InitialShape::UnitDisk,
            expected: "boundary moves towards a level set of z, a square",
        },
        "disk" => ExperimentSpec {
            name: "disk",
            data: ProblemData::new(|_| 1.0, |y| 1.0 - y.norm_squared(), |y| -2.0 * y),
            initial: InitialShape::Square,
            expected: "square relaxes towards a circle; z vanishes on the unit circle",
        },
        "square-zero" => ExperimentSpec {
            name: "square-zero",
            data: ProblemData::new(
                |y| 16.0 * PI - 32.0 * y.x * y.x - 32.0 * y.y * y.y,
                |y| (PI - 4.0 * y.x * y.x) * (PI - 4.0 * y.y * y.y),
                |y| {
                    Vector2::new(
                        -8.0 * y.x * (PI - 4.0 * y.y * y.y),
                        -8.0 * y.y * (PI - 4.0 * y.x * y.x),
                    )
                },
            ),
            initial: InitialShape::UnitDisk,
            expected: "disk deforms towards the square of side √π, which has zero energy",
        },
        "double-ball" => ExperimentSpec {
            name: "double-ball",
            data: ProblemData::new(
                |_| 1.0,
                |y| {
                    let s = FRAC_1_SQRT_2;
                    0.125 - 0.25 * (y.x - s).powi(2).min((y.x + s).powi(2)) - 0.25 * y.y * y.y
                },
                |y| {
                    let c = if y.x >= 0.0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
                    Vector2::new(-0.5 * (y.x - c), -0.5 * y.y)
                },
            ),
            initial: InitialShape::UnitDisk,
            expected: "shape pinches towards two touching balls, a non-Lipschitz limit",
        },
        other => return Err(Error::UnknownExperiment(other.to_string())),
    };
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pointwise_values() {
        let disk = builtin("disk").unwrap();
        assert_eq!((disk.data.target)(&Vector2::zeros()), 1.0);
        let sq = builtin("square-zero").unwrap();
        let e = PI.sqrt() / 2.0;
        for x2 in [-0.7, 0.0, 0.3, 1.1] {
            assert!((sq.data.target)(&Vector2::new(e, x2)).abs() < 1e-14);
            assert!((sq.data.target)(&Vector2::new(-e, x2)).abs() < 1e-14);
            assert!((sq.data.target)(&Vector2::new(x2, e)).abs() < 1e-14);
        }
        let lvl = builtin("level-set-square").unwrap();
        assert_eq!((lvl.data.source)(&Vector2::new(0.3, -2.0)), 0.0);
        assert!(((lvl.data.target)(&Vector2::new(0.3, -0.5)) - 1.0).abs() < 1e-15);
        let db = builtin("double-ball").unwrap();
        assert!(((db.data.target)(&Vector2::new(FRAC_1_SQRT_2, 0.0)) - 0.125).abs() < 1e-15);
        assert!((db.data.target)(&Vector2::new(0.0, 0.0)).abs() < 1e-15);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        // stay away from the kinks of the piecewise targets
        let pts: Vec<Vector2<f64>> = (0..200)
            .map(|_| Vector2::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            .filter(|p: &Vector2<f64>| (p.x.abs() - p.y.abs()).abs() > 1e-3 && p.x.abs() > 1e-3)
            .collect();
        for name in EXPERIMENT_NAMES {
            let spec = builtin(name).unwrap();
            assert!(spec.data.gradient_mismatch(&pts, 1e-6) < 1e-6, "{name}");
        }
    }

    #[test]
    fn square_start_has_area_pi() {
        let spec = builtin("disk").unwrap();
        let f = spec.initial_shape(4096).unwrap();
        assert!((f.volume() - PI).abs() < 1e-5);
        for name in ["level-set-square", "square-zero", "double-ball"] {
            let f = builtin(name).unwrap().initial_shape(64).unwrap();
            assert!(f.values().iter().all(|&v| v == 1.0));
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin("triangle"), Err(Error::UnknownExperiment(n)) if n == "triangle"));
    }
}
