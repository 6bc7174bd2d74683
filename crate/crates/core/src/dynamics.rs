//! Master-equation right-hand side and fixed-step RK4 time evolution.
//!
//! `dρ/dt = −i[H(t), ρ] + Σ_c γ_c D[L_c]ρ` with
//! `H(t) = H_static + A sin(ω_d t)(a† + a)`.
//!
//! For integration the generator is rewritten with the effective
//! non-Hermitian Hamiltonian `K = H − (i/2) Σ_c γ_c L_c†L_c`:
//! `dρ/dt = −iKρ + iρK† + Σ_c γ_c L_c ρ L_c†`, and every operator is applied
//! through its nonzero entries only.

use num_complex::Complex64 as C64;

use crate::bath::{dissipator_apply, BathSpec};
use crate::energetics::BatteryEnergetics;
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, partial_trace, ComplexMatrix, HilbertFactorization, OperatorEntries, Subsystem};
use crate::model::{battery_reference, drive_amplitude, ModelOperators, SystemSpec};
use crate::par;

/// Minimum eigenvalue below which a state counts as nonpositive.
pub const POSITIVITY_TOL: f64 = 1e-6;
/// Trace drift that triggers renormalization after a step.
pub const RENORMALIZE_TOL: f64 = 1e-10;
/// Maximum `|ΔE(dt) − ΔE(dt/2)|` accepted by the step-halving check.
pub const STEP_HALVING_TOL: f64 = 1e-5;

const ONE: C64 = C64::new(1.0, 0.0);
const MINUS_I: C64 = C64::new(0.0, -1.0);

/// A density matrix on the spin-chain ⊗ cavity space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    fact: HilbertFactorization,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, fact: HilbertFactorization) -> Result<Self> {
        if matrix.dim() != fact.total_dim() {
            return Err(Error::DimensionMismatch {
                context: "DensityMatrix::new",
                expected: fact.total_dim(),
                found: matrix.dim(),
            });
        }
        Ok(Self { matrix, fact })
    }

    pub fn initial(spec: &SystemSpec) -> Result<Self> {
        Self::new(crate::model::initial_state(spec)?, spec.factorization()?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn factorization(&self) -> &HilbertFactorization {
        &self.fact
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Reduced battery state.
    pub fn battery_state(&self) -> ComplexMatrix {
        partial_trace(&self.matrix, &self.fact, Subsystem::Spins).expect("dimension checked at construction")
    }
}

/// Validity diagnostics of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    /// `|Tr ρ − 1|`.
    pub trace_dev: f64,
    /// Largest entry of `|ρ − ρ†|`.
    pub herm_dev: f64,
    /// Smallest eigenvalue of the Hermitian part; NaN if it could not be
    /// computed.
    pub min_eig: f64,
}

pub fn validate_state(rho: &DensityMatrix) -> Diagnostics {
    diagnose(rho.matrix())
}

fn diagnose(m: &ComplexMatrix) -> Diagnostics {
    let mut herm = m.clone();
    herm.symmetrize();
    let min_eig = eigvalsh(&herm).ok().and_then(|v| v.first().copied()).unwrap_or(f64::NAN);
    Diagnostics { trace_dev: (m.trace() - C64::new(1.0, 0.0)).norm(), herm_dev: m.hermiticity_deviation(), min_eig }
}

/// Master-equation generator, direct dense evaluation.
pub fn rhs(rho: &DensityMatrix, t: f64, ops: &ModelOperators, spec: &SystemSpec) -> Result<ComplexMatrix> {
    if rho.fact != ops.fact {
        return Err(Error::DimensionMismatch {
            context: "rhs",
            expected: ops.fact.total_dim(),
            found: rho.fact.total_dim(),
        });
    }
    let h = ops.hamiltonian_at(spec, t);
    let mut out = dissipator_apply(rho.matrix(), ops, &BathSpec::from_system(spec))?;
    out.add_scaled(&h.commutator(rho.matrix()), C64::new(0.0, -1.0));
    Ok(out)
}

/// Precomputed generator used by the integrator.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    dim: usize,
    effective: OperatorEntries,
    drive: OperatorEntries,
    jumps: Vec<(OperatorEntries, f64)>,
    spec: SystemSpec,
}

impl MasterEquation {
    pub fn new(ops: &ModelOperators, spec: &SystemSpec) -> Result<Self> {
        let (up, down) = BathSpec::from_system(spec).channel_rates()?;
        let mut effective = ops.h_static();
        let mut jumps = Vec::new();
        for (jump, rate) in [(&ops.jump_up, up), (&ops.jump_down, down)] {
            if rate == 0.0 {
                continue;
            }
            let l_dag_l = &jump.adjoint() * jump;
            effective.add_scaled(&l_dag_l, C64::new(0.0, -0.5 * rate));
            jumps.push((OperatorEntries::from_dense(jump), rate));
        }
        Ok(Self {
            dim: ops.fact.total_dim(),
            effective: OperatorEntries::from_dense(&effective),
            drive: OperatorEntries::from_dense(&ops.drive_quadrature),
            jumps,
            spec: spec.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out = dρ/dt` at time `t`; `rho` must be Hermitian.
    pub fn rhs_into(&self, rho: &ComplexMatrix, t: f64, out: &mut ComplexMatrix, scratch: &mut ComplexMatrix) {
        debug_assert_eq!(rho.dim(), self.dim);
        // ρK† = (Kρ)† and ρQ = (Qρ)† for Hermitian ρ.
        out.fill_zero();
        self.effective.left_mul_into(rho, ONE, out);
        let f = drive_amplitude(&self.spec, t);
        if f != 0.0 {
            self.drive.left_mul_into(rho, C64::new(f, 0.0), out);
        }
        out.sub_adjoint_in_place();
        *out = out.scale(MINUS_I);
        // LρL† = L(Lρ)† for Hermitian ρ.
        for (jump, rate) in &self.jumps {
            scratch.fill_zero();
            jump.left_mul_into(rho, ONE, scratch);
            let l_rho_dag = scratch.adjoint();
            jump.left_mul_into(&l_rho_dag, C64::new(*rate, 0.0), out);
        }
    }

    pub fn rhs(&self, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        let mut scratch = ComplexMatrix::zeros(self.dim);
        self.rhs_into(rho, t, &mut out, &mut scratch);
        out
    }
}

/// What one RK4 step had to correct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    /// `|Tr ρ − 1|` before renormalization.
    pub trace_dev: f64,
    /// Hermiticity deviation before symmetrization.
    pub herm_dev: f64,
    pub renormalized: bool,
}

/// Fixed-step classical RK4 on the density matrix.
#[derive(Debug, Clone)]
pub struct Integrator {
    eq: MasterEquation,
    rho: ComplexMatrix,
    steps_taken: usize,
    dt: f64,
    k: [ComplexMatrix; 4],
    stage: ComplexMatrix,
    scratch: ComplexMatrix,
}

impl Integrator {
    pub fn new(eq: MasterEquation, rho0: ComplexMatrix, dt: f64) -> Result<Self> {
        if rho0.dim() != eq.dim() {
            return Err(Error::DimensionMismatch { context: "Integrator::new", expected: eq.dim(), found: rho0.dim() });
        }
        let n = eq.dim();
        Ok(Self {
            eq,
            rho: rho0,
            steps_taken: 0,
            dt,
            k: std::array::from_fn(|_| ComplexMatrix::zeros(n)),
            stage: ComplexMatrix::zeros(n),
            scratch: ComplexMatrix::zeros(n),
        })
    }

    pub fn for_spec(spec: &SystemSpec) -> Result<Self> {
        let ops = ModelOperators::build(spec)?;
        let eq = MasterEquation::new(&ops, spec)?;
        Self::new(eq, crate::model::initial_state(spec)?, spec.dt)
    }

    /// Time `k·dt` after `k` steps.
    pub fn time(&self) -> f64 {
        self.steps_taken as f64 * self.dt
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    pub fn state(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn step(&mut self) -> StepReport {
        let t = self.time();
        let dt = self.dt;
        let half = C64::new(0.5 * dt, 0.0);

        let [k1, k2, k3, k4] = &mut self.k;
        self.eq.rhs_into(&self.rho, t, k1, &mut self.scratch);

        self.stage.clone_from(&self.rho);
        self.stage.add_scaled(k1, half);
        self.eq.rhs_into(&self.stage, t + 0.5 * dt, k2, &mut self.scratch);

        self.stage.clone_from(&self.rho);
        self.stage.add_scaled(k2, half);
        self.eq.rhs_into(&self.stage, t + 0.5 * dt, k3, &mut self.scratch);

        self.stage.clone_from(&self.rho);
        self.stage.add_scaled(k3, C64::new(dt, 0.0));
        self.eq.rhs_into(&self.stage, t + dt, k4, &mut self.scratch);

        let sixth = C64::new(dt / 6.0, 0.0);
        let third = C64::new(dt / 3.0, 0.0);
        self.rho.add_scaled(k1, sixth);
        self.rho.add_scaled(k2, third);
        self.rho.add_scaled(k3, third);
        self.rho.add_scaled(k4, sixth);
        self.steps_taken += 1;

        let herm_dev = self.rho.hermiticity_deviation();
        self.rho.symmetrize();
        let tr = self.rho.trace().re;
        let trace_dev = (tr - 1.0).abs();
        let renormalized = trace_dev > RENORMALIZE_TOL && tr != 0.0;
        if renormalized {
            self.rho = self.rho.scale(C64::new(1.0 / tr, 0.0));
        }
        StepReport { trace_dev, herm_dev, renormalized }
    }
}

/// Recorded observables of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub e_b: Vec<f64>,
    pub delta_e: Vec<f64>,
    pub ergotropy: Vec<f64>,
    pub trace_dev: Vec<f64>,
    pub herm_dev: Vec<f64>,
    pub min_eig: Vec<f64>,
    /// Battery ground energy `E_g` used for `delta_e`.
    pub ground_energy: f64,
    /// Steps whose trace had to be renormalized.
    pub renormalized_steps: usize,
    /// Largest pre-symmetrization Hermiticity deviation over all steps.
    pub max_herm_correction: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvolveOptions {
    /// Downgrade a positivity breach from an error to a warning.
    pub allow_nonpositive: bool,
    /// Re-run at `dt/2` and refuse the result if `delta_e` moves by more
    /// than [`STEP_HALVING_TOL`].
    pub verify_step: bool,
}

struct Sample {
    time: f64,
    state: ComplexMatrix,
    step: StepReport,
}

pub fn evolve(spec: &SystemSpec) -> Result<Trajectory> {
    evolve_with(spec, &EvolveOptions::default())
}

pub fn evolve_with(spec: &SystemSpec, opts: &EvolveOptions) -> Result<Trajectory> {
    let traj = integrate(spec, opts)?;
    if opts.verify_step {
        check_step_halving(spec, &traj, opts)?;
    }
    Ok(traj)
}

fn integrate(spec: &SystemSpec, opts: &EvolveOptions) -> Result<Trajectory> {
    spec.validate()?;
    let ops = ModelOperators::build(spec)?;
    let ground = battery_reference(spec, &ops.h_battery_reduced)?;
    let energetics = BatteryEnergetics::new(ops.h_battery_reduced.clone(), ground.energy)?;
    let fact = ops.fact;
    let eq = MasterEquation::new(&ops, spec)?;
    let rho0 = crate::model::initial_state(spec)?;
    let d0 = diagnose(&rho0);
    let mut integrator = Integrator::new(eq, rho0.clone(), spec.dt)?;

    let total = spec.step_count();
    let mut samples = vec![Sample {
        time: 0.0,
        state: rho0,
        step: StepReport { trace_dev: d0.trace_dev, herm_dev: d0.herm_dev, renormalized: false },
    }];
    let mut renormalized_steps = 0;
    let mut max_herm_correction: f64 = 0.0;
    for k in 1..=total {
        let report = integrator.step();
        renormalized_steps += usize::from(report.renormalized);
        max_herm_correction = max_herm_correction.max(report.herm_dev);
        if k % spec.record_every == 0 || k == total {
            if !integrator.state().is_finite() {
                return Err(Error::Domain(format!("state became non-finite at t = {}", integrator.time())));
            }
            samples.push(Sample { time: integrator.time(), state: integrator.state().clone(), step: report });
        }
    }
    if renormalized_steps > 0 {
        log::debug!("trace renormalized on {renormalized_steps} of {total} steps");
    }
    log::debug!("largest Hermiticity correction {max_herm_correction:e}");

    let processed: Vec<Result<(f64, crate::energetics::EnergyReport)>> = par::map(&samples, |s| {
        let herm = {
            let mut h = s.state.clone();
            h.symmetrize();
            h
        };
        let min_eig = eigvalsh(&herm)?[0];
        let rho_b = partial_trace(&s.state, &fact, Subsystem::Spins)?;
        let report = if min_eig < -POSITIVITY_TOL {
            // Positivity already lost; energies are reported without clipping.
            let e_b = crate::energetics::battery_energy(&rho_b, &ops.h_battery_reduced)?;
            crate::energetics::EnergyReport {
                e_b,
                delta_e: e_b - ground.energy,
                ergotropy: f64::NAN,
                passive_energy: f64::NAN,
            }
        } else {
            energetics.report(&rho_b)?
        };
        Ok((min_eig, report))
    });

    let mut traj = Trajectory {
        times: Vec::with_capacity(samples.len()),
        e_b: Vec::with_capacity(samples.len()),
        delta_e: Vec::with_capacity(samples.len()),
        ergotropy: Vec::with_capacity(samples.len()),
        trace_dev: Vec::with_capacity(samples.len()),
        herm_dev: Vec::with_capacity(samples.len()),
        min_eig: Vec::with_capacity(samples.len()),
        ground_energy: ground.energy,
        renormalized_steps,
        max_herm_correction,
    };
    for (sample, result) in samples.iter().zip(processed) {
        let (min_eig, report) = result?;
        if min_eig < -POSITIVITY_TOL {
            let snapshot = Diagnostics { trace_dev: sample.step.trace_dev, herm_dev: sample.step.herm_dev, min_eig };
            if !opts.allow_nonpositive {
                return Err(Error::PositivityBreach { time: sample.time, snapshot });
            }
            log::warn!("state nonpositive at t = {} (min eigenvalue {min_eig:e})", sample.time);
        }
        traj.times.push(sample.time);
        traj.e_b.push(report.e_b);
        traj.delta_e.push(report.delta_e);
        traj.ergotropy.push(report.ergotropy);
        traj.trace_dev.push(sample.step.trace_dev);
        traj.herm_dev.push(sample.step.herm_dev);
        traj.min_eig.push(min_eig);
    }
    Ok(traj)
}

/// `spec` with half the step and twice the stride, so recorded times line up.
pub fn halved_step(spec: &SystemSpec) -> SystemSpec {
    SystemSpec { dt: spec.dt / 2.0, record_every: spec.record_every * 2, ..spec.clone() }
}

/// Largest `|ΔE(dt) − ΔE(dt/2)|` over the recorded times of `coarse`.
pub fn step_halving_deviation(spec: &SystemSpec, coarse: &Trajectory, opts: &EvolveOptions) -> Result<f64> {
    let fine = integrate(&halved_step(spec), opts)?;
    if fine.len() != coarse.len() {
        return Err(Error::DimensionMismatch {
            context: "step-halving sample count",
            expected: coarse.len(),
            found: fine.len(),
        });
    }
    Ok(coarse.delta_e.iter().zip(&fine.delta_e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

fn check_step_halving(spec: &SystemSpec, coarse: &Trajectory, opts: &EvolveOptions) -> Result<()> {
    let max_diff = step_halving_deviation(spec, coarse, opts)?;
    if max_diff >= STEP_HALVING_TOL {
        // RK4 global error scales as dt⁴.
        let suggested_dt = spec.dt * 0.9 * (STEP_HALVING_TOL / max_diff).powf(0.25);
        return Err(Error::StepHalving { max_diff, suggested_dt });
    }
    Ok(())
}
