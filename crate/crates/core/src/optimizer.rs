//! Armijo steepest descent over radial functions with fixed square integral.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::descent::{compute_direction, DirectionSettings, Method};
use crate::error::{Error, Result};
use crate::fem::{FemField, FemSpace, ProblemData};
use crate::gradient::{shape_gradient, Form};
use crate::mesh::generate_disk_mesh;
use crate::radial::RadialShape;
use crate::sparse::CgSettings;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub data: ProblemData,
    pub initial: RadialShape,
    pub method: Method,
    pub form: Form,
    pub mesh_level: usize,
    pub max_it: usize,
    pub armijo: f64,
    pub sigma_start: f64,
    pub sigma_factor: f64,
    pub sigma_floor: f64,
    pub directions: DirectionSettings,
    pub solver: CgSettings,
    /// Fill `seconds` with wall time; off by default so logs are reproducible.
    pub record_time: bool,
}

impl RunConfig {
    pub fn new(data: ProblemData, initial: RadialShape, method: Method, form: Form) -> Self {
        Self {
            data,
            initial,
            method,
            form,
            mesh_level: 24,
            max_it: 250,
            armijo: 1e-5,
            sigma_start: 1.0 / 16.0,
            sigma_factor: 0.5,
            sigma_floor: 1e-8,
            directions: DirectionSettings::default(),
            solver: CgSettings::default(),
            record_time: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.max_it < 1 {
            return bad("max_it must be at least 1".into());
        }
        if self.initial.n_nodes() < 8 {
            return bad(format!("need at least 8 circle nodes, got {}", self.initial.n_nodes()));
        }
        if !(self.sigma_floor > 0.0 && self.sigma_floor < self.sigma_start) {
            return bad(format!(
                "step floor {} must lie in (0, {})",
                self.sigma_floor, self.sigma_start
            ));
        }
        if !(self.sigma_factor > 0.0 && self.sigma_factor < 1.0) {
            return bad(format!("step factor {} must lie in (0, 1)", self.sigma_factor));
        }
        if self.mesh_level < 1 {
            return bad("mesh level must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Energy at the start of the iteration.
    pub energy: f64,
    /// `⟨I_h(f̄), ḡ⟩` at the start of the iteration.
    pub deriv: f64,
    /// Accepted step, `None` if every trial step was rejected or no step was tried.
    pub sigma: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxIterations,
    LineSearchFloor,
    ZeroDirection,
}

impl Termination {
    pub fn name(self) -> &'static str {
        match self {
            Termination::MaxIterations => "max_iterations",
            Termination::LineSearchFloor => "line_search_floor",
            Termination::ZeroDirection => "zero_direction",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub records: Vec<IterationRecord>,
    pub initial_shape: RadialShape,
    pub final_shape: RadialShape,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub termination: Termination,
    /// `∫ f̄² dφ` held fixed along the run.
    pub square_integral: f64,
}

impl RunResult {
    pub fn accepted_steps(&self) -> usize {
        self.records.iter().filter(|r| r.sigma.is_some()).count()
    }
}

pub fn run(config: &RunConfig) -> Result<RunResult> {
    run_with(config, |_, _| Ok(()))
}

/// Like [`run`], calling `observer` after every iteration with its record and the
/// current shape.
pub fn run_with(
    config: &RunConfig,
    mut observer: impl FnMut(&IterationRecord, &RadialShape) -> Result<()>,
) -> Result<RunResult> {
    config.validate()?;
    let space = FemSpace::new(generate_disk_mesh(config.mesh_level)).with_solver(config.solver);
    let gamma = config.initial.square_integral();
    let mut shape = config.initial.rescale_to_square_integral(gamma);
    let initial_shape = shape.clone();
    let mut state = space.at_shape(&shape).solve_state(&config.data)?;
    let mut energy = space.at_shape(&shape).energy(&state, &config.data);
    let initial_energy = energy;
    let clock = Instant::now();
    let mut records = Vec::new();
    let mut termination = Termination::MaxIterations;

    for iter in 1..=config.max_it {
        let disc = space.at_shape(&shape);
        let adjoint = disc.solve_adjoint(&state, &config.data)?;
        let gradient = shape_gradient(&disc, &state, &adjoint, &config.data, config.form);
        let direction = compute_direction(config.method, &gradient, &shape, &config.directions)?;
        drop(disc);
        let seconds = || if config.record_time { clock.elapsed().as_secs_f64() } else { 0.0 };

        if direction.is_zero() {
            let record = IterationRecord { iter, energy, deriv: 0.0, sigma: None, seconds: seconds() };
            records.push(record);
            observer(&record, &shape)?;
            termination = Termination::ZeroDirection;
            break;
        }
        let deriv = direction.predicted_decrease;
        let mut accepted: Option<(f64, RadialShape, FemField, f64)> = None;
        let mut sigma = config.sigma_start;
        while sigma >= config.sigma_floor {
            if let Some(trial) = step(&shape, &direction.g, sigma, gamma) {
                let disc = space.at_shape(&trial);
                let trial_state = disc.solve_state(&config.data)?;
                let trial_energy = disc.energy(&trial_state, &config.data);
                if trial_energy < energy + config.armijo * sigma * deriv {
                    drop(disc);
                    accepted = Some((sigma, trial, trial_state, trial_energy));
                    break;
                }
            }
            sigma *= config.sigma_factor;
        }

        let record = IterationRecord {
            iter,
            energy,
            deriv,
            sigma: accepted.as_ref().map(|a| a.0),
            seconds: seconds(),
        };
        records.push(record);
        match accepted {
            Some((_, trial, trial_state, trial_energy)) => {
                shape = trial;
                state = trial_state;
                energy = trial_energy;
                observer(&record, &shape)?;
            }
            None => {
                observer(&record, &shape)?;
                termination = Termination::LineSearchFloor;
                break;
            }
        }
    }

    Ok(RunResult {
        records,
        initial_shape,
        final_shape: shape,
        initial_energy,
        final_energy: energy,
        termination,
        square_integral: gamma,
    })
}

/// `f̄ + σḡ` rescaled to square integral `gamma`; `None` if a radius is not positive.
fn step(shape: &RadialShape, g: &[f64], sigma: f64, gamma: f64) -> Option<RadialShape> {
    let values: Vec<f64> = shape.values().iter().zip(g).map(|(f, g)| f + sigma * g).collect();
    RadialShape::new(values).ok().map(|s| s.rescale_to_square_integral(gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeSample {
    pub t: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    pub pairing: f64,
    pub samples: Vec<DerivativeSample>,
    /// Convergence order of the finite differences estimated from the first three steps.
    pub observed_order: Option<f64>,
}

/// Discrete energy `J(f̄)` without renormalisation.
pub fn discrete_energy(space: &FemSpace, data: &ProblemData, shape: &RadialShape) -> Result<f64> {
    let disc = space.at_shape(shape);
    let state = disc.solve_state(data)?;
    Ok(disc.energy(&state, data))
}

/// Compares `⟨I_h(f̄), v̄⟩` with central differences `(J(f̄+tv̄) − J(f̄−tv̄))/(2t)`.
pub fn check_derivative(
    space: &FemSpace,
    data: &ProblemData,
    form: Form,
    shape: &RadialShape,
    v: &[f64],
    steps: &[f64],
) -> Result<DerivativeReport> {
    if v.len() != shape.n_nodes() {
        return Err(Error::DimensionMismatch { expected: shape.n_nodes(), found: v.len() });
    }
    let disc = space.at_shape(shape);
    let state = disc.solve_state(data)?;
    let adjoint = disc.solve_adjoint(&state, data)?;
    let pairing = shape_gradient(&disc, &state, &adjoint, data, form).pairing(v)?;
    let perturbed = |t: f64| -> Result<RadialShape> {
        RadialShape::new(shape.values().iter().zip(v).map(|(f, v)| f + t * v).collect())
    };
    let mut samples = Vec::with_capacity(steps.len());
    for &t in steps {
        let fd = (discrete_energy(space, data, &perturbed(t)?)?
            - discrete_energy(space, data, &perturbed(-t)?)?)
            / (2.0 * t);
        let relative_error = if fd == pairing { 0.0 } else { (pairing - fd).abs() / fd.abs() };
        samples.push(DerivativeSample { t, finite_difference: fd, relative_error });
    }
    let observed_order = match samples.as_slice() {
        [a, b, c, ..] => {
            let d1 = (a.finite_difference - b.finite_difference).abs();
            let d2 = (b.finite_difference - c.finite_difference).abs();
            (d1 > 0.0 && d2 > 0.0).then(|| (d1 / d2).ln() / (a.t / b.t).ln())
        }
        _ => None,
    };
    Ok(DerivativeReport { pairing, samples, observed_order })
}
