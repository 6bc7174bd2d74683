//! Battery, cavity, coupling and drive operators, plus the initial state.
//!
//! Units are dimensionless with ħ = k_B = 1. The cavity is one bosonic mode
//! truncated at `photon_cutoff` photons, so its Fock dimension is
//! `photon_cutoff + 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, kron, kron_all, ops, ComplexMatrix, HilbertFactorization};

/// Which jump operators the cavity bath contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Channels {
    /// Thermal absorption, `L = a†` with rate `J(ω_c)·n̄(ω_c)`.
    #[default]
    Heating,
    /// Emission, `L = a` with rate `J(ω_c)·(n̄(ω_c) + 1)`.
    Cooling,
    Both,
}

impl Channels {
    pub fn as_str(self) -> &'static str {
        match self {
            Channels::Heating => "heating",
            Channels::Cooling => "cooling",
            Channels::Both => "both",
        }
    }
}

impl fmt::Display for Channels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channels {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "heating" => Ok(Channels::Heating),
            "cooling" => Ok(Channels::Cooling),
            "both" => Ok(Channels::Both),
            other => Err(Error::Usage(format!("unknown channels value '{other}' (expected heating, cooling or both)"))),
        }
    }
}

/// How the battery is prepared at `t = 0`. The cavity always starts empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialBattery {
    /// Lowest eigenspace of the battery Hamiltonian; energies are measured
    /// from its energy.
    #[default]
    Ground,
    /// Every spin in `|g⟩`; energies are measured from 0.
    AllDown,
}

impl InitialBattery {
    pub fn as_str(self) -> &'static str {
        match self {
            InitialBattery::Ground => "ground",
            InitialBattery::AllDown => "all_down",
        }
    }
}

impl fmt::Display for InitialBattery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InitialBattery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ground" => Ok(InitialBattery::Ground),
            "all_down" => Ok(InitialBattery::AllDown),
            other => {
                Err(Error::Usage(format!("unknown initial_battery value '{other}' (expected ground or all_down)")))
            }
        }
    }
}

/// Physical and numerical parameters of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    /// Spin flip frequency ω_a; also the Debye reference frequency.
    pub omega_a: f64,
    /// Cavity frequency ω_c.
    pub omega_c: f64,
    /// Drive frequency ω_d.
    pub omega_d: f64,
    /// Spin-photon coupling g.
    pub coupling: f64,
    /// Nearest-neighbour hopping J.
    pub hopping: f64,
    /// Cavity loss rate κ.
    pub kappa: f64,
    /// Drive amplitude A.
    pub amplitude: f64,
    /// Number of spins N.
    pub spins: usize,
    /// Photon-number cutoff n.
    pub photon_cutoff: usize,
    /// Bath temperature T.
    pub temperature: f64,
    pub channels: Channels,
    pub initial_battery: InitialBattery,
    pub t_max: f64,
    pub dt: f64,
    /// Record observables every this many integrator steps.
    pub record_every: usize,
}

impl Default for SystemSpec {
    /// Base point of the `fig2a` preset with g = 0.8.
    fn default() -> Self {
        Self {
            omega_a: 1.0,
            omega_c: 0.5,
            omega_d: std::f64::consts::PI,
            coupling: 0.8,
            hopping: 0.95,
            kappa: 0.8,
            amplitude: 3.0,
            spins: 2,
            photon_cutoff: 2,
            temperature: 1.0,
            channels: Channels::Heating,
            initial_battery: InitialBattery::Ground,
            t_max: 50.0,
            dt: 1e-3,
            record_every: 100,
        }
    }
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        let named = [
            ("omega_a", self.omega_a),
            ("omega_c", self.omega_c),
            ("omega_d", self.omega_d),
            ("g", self.coupling),
            ("J", self.hopping),
            ("kappa", self.kappa),
            ("A", self.amplitude),
            ("T", self.temperature),
            ("t_max", self.t_max),
            ("dt", self.dt),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return bad(format!("{name} must be finite (got {v})"));
            }
            if v < 0.0 {
                return bad(format!("{name} must be nonnegative (got {v})"));
            }
        }
        if self.spins == 0 {
            return bad("N must be at least 1".into());
        }
        if self.spins > 8 {
            return bad(format!("N = {} exceeds the dense-storage limit of 8", self.spins));
        }
        if self.photon_cutoff == 0 {
            return bad("n must be at least 1".into());
        }
        if self.dt <= 0.0 {
            return bad("dt must be positive".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if self.kappa > 0.0 {
            if self.temperature <= 0.0 {
                return bad("T must be positive when kappa > 0".into());
            }
            if self.omega_a <= 0.0 {
                return bad("omega_a must be positive when kappa > 0 (Debye reference)".into());
            }
            if self.omega_c <= 0.0 {
                return bad("omega_c must be positive when kappa > 0 (thermal rate)".into());
            }
        }
        Ok(())
    }

    pub fn cavity_dim(&self) -> usize {
        self.photon_cutoff + 1
    }

    pub fn factorization(&self) -> Result<HilbertFactorization> {
        HilbertFactorization::new(self.spins, self.cavity_dim())
    }

    /// Number of integrator steps needed to reach `t_max`.
    pub fn step_count(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

/// All operators of one model instance.
#[derive(Debug, Clone)]
pub struct ModelOperators {
    pub fact: HilbertFactorization,
    /// Battery Hamiltonian embedded in the full space.
    pub h_battery: ComplexMatrix,
    /// `ω_c a†a`, full space.
    pub h_cavity: ComplexMatrix,
    /// `g Σ_i (a† σ⁻_i + a σ⁺_i)`, full space.
    pub h_coupling: ComplexMatrix,
    /// `a† + a`, full space.
    pub drive_quadrature: ComplexMatrix,
    /// Battery Hamiltonian on the 2^N spin register.
    pub h_battery_reduced: ComplexMatrix,
    /// `a†`, full space.
    pub jump_up: ComplexMatrix,
    /// `a`, full space.
    pub jump_down: ComplexMatrix,
}

impl ModelOperators {
    pub fn build(spec: &SystemSpec) -> Result<Self> {
        spec.validate()?;
        let fact = spec.factorization()?;
        let spin_id = ComplexMatrix::identity(fact.spin_dim());
        let cav_id = ComplexMatrix::identity(fact.cavity_dim());
        let a = ops::annihilation(fact.cavity_dim());
        let a_dag = ops::creation(fact.cavity_dim());

        let h_battery_reduced = build_battery_hamiltonian(spec)?;
        let h_battery = kron(&h_battery_reduced, &cav_id);
        let h_cavity = kron(&spin_id, &(&a_dag * &a)).scale(C64::new(spec.omega_c, 0.0));

        let mut h_coupling = ComplexMatrix::zeros(fact.total_dim());
        for site in 0..fact.spin_count() {
            let lower = embed_site(&ops::sigma_minus(), site, fact.spin_count());
            let raise = embed_site(&ops::sigma_plus(), site, fact.spin_count());
            h_coupling += &kron(&lower, &a_dag);
            h_coupling += &kron(&raise, &a);
        }
        let h_coupling = h_coupling.scale(C64::new(spec.coupling, 0.0));

        let jump_up = kron(&spin_id, &a_dag);
        let jump_down = kron(&spin_id, &a);
        let drive_quadrature = &jump_up + &jump_down;

        Ok(Self { fact, h_battery, h_cavity, h_coupling, drive_quadrature, h_battery_reduced, jump_up, jump_down })
    }

    /// Time-independent part of the total Hamiltonian.
    pub fn h_static(&self) -> ComplexMatrix {
        &(&self.h_battery + &self.h_cavity) + &self.h_coupling
    }

    /// `H(t) = H_static + A sin(ω_d t) (a† + a)`.
    pub fn hamiltonian_at(&self, spec: &SystemSpec, t: f64) -> ComplexMatrix {
        let mut h = self.h_static();
        h.add_scaled(&self.drive_quadrature, C64::new(drive_amplitude(spec, t), 0.0));
        h
    }

    /// `Σ_i σ⁺_iσ⁻_i + a†a` on the full space.
    pub fn excitation_number(&self) -> ComplexMatrix {
        let n = self.fact.spin_count();
        let mut spin_number = ComplexMatrix::zeros(self.fact.spin_dim());
        for site in 0..n {
            spin_number += &embed_site(&(&ops::sigma_plus() * &ops::sigma_minus()), site, n);
        }
        let cav = self.fact.cavity_dim();
        &kron(&spin_number, &ComplexMatrix::identity(cav))
            + &kron(&ComplexMatrix::identity(self.fact.spin_dim()), &(&ops::creation(cav) * &ops::annihilation(cav)))
    }
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` on the spin register, `op` at `site`.
fn embed_site(op: &ComplexMatrix, site: usize, spins: usize) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    kron_all((0..spins).map(|k| if k == site { op } else { &id }))
}

/// Open-chain battery Hamiltonian on the 2^N spin register.
pub fn build_battery_hamiltonian(spec: &SystemSpec) -> Result<ComplexMatrix> {
    let n = spec.spins;
    if n == 0 {
        return Err(Error::InvalidSpec("N must be at least 1".into()));
    }
    let number = &ops::sigma_plus() * &ops::sigma_minus();
    let mut h = ComplexMatrix::zeros(1 << n);
    for site in 0..n {
        h.add_scaled(&embed_site(&number, site, n), C64::new(spec.omega_a, 0.0));
    }
    let id = ComplexMatrix::identity(2);
    let plus = ops::sigma_plus();
    let minus = ops::sigma_minus();
    for site in 0..n.saturating_sub(1) {
        let hop = kron_all((0..n).map(|k| {
            if k == site {
                &plus
            } else if k == site + 1 {
                &minus
            } else {
                &id
            }
        }));
        h.add_scaled(&hop, C64::new(spec.hopping, 0.0));
        h.add_scaled(&hop.adjoint(), C64::new(spec.hopping, 0.0));
    }
    Ok(h)
}

/// Full-space static Hamiltonian: battery + cavity + spin-photon coupling.
pub fn build_static_hamiltonian(spec: &SystemSpec) -> Result<ComplexMatrix> {
    Ok(ModelOperators::build(spec)?.h_static())
}

/// `A sin(ω_d t)`.
pub fn drive_amplitude(spec: &SystemSpec, t: f64) -> f64 {
    if spec.amplitude == 0.0 {
        return 0.0;
    }
    spec.amplitude * (spec.omega_d * t).sin()
}

/// Ground manifold of the battery Hamiltonian.
#[derive(Debug, Clone)]
pub struct BatteryGround {
    pub energy: f64,
    /// Normalized projector onto the ground manifold (pure unless the
    /// lowest level is degenerate and excludes the all-down state).
    pub state: ComplexMatrix,
}

const GROUND_TOL: f64 = 1e-9;

/// Ground energy and state of `h_b`.
///
/// The all-down vector is always an eigenvector with energy 0. When it is a
/// lowest eigenvector it is used as is; otherwise hopping has pushed a
/// one-or-more-excitation level below zero (`√2·J > ω_a` for N = 3, or
/// `J > ω_a` for N = 2) and the lowest eigenspace is used instead.
pub fn battery_ground(h_b: &ComplexMatrix) -> Result<BatteryGround> {
    let eig = linalg::eigh(h_b)?;
    let lowest = eig.values[0];
    let all_down_energy = h_b[(0, 0)].re;
    if all_down_energy <= lowest + GROUND_TOL {
        return Ok(BatteryGround { energy: all_down_energy, state: ComplexMatrix::basis_projector(h_b.dim(), 0) });
    }
    let manifold: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] <= lowest + GROUND_TOL).collect();
    let weight = C64::new(1.0 / manifold.len() as f64, 0.0);
    let mut state = ComplexMatrix::zeros(h_b.dim());
    for &k in &manifold {
        let v = eig.vectors.column(k);
        state.add_scaled(&ComplexMatrix::outer(&v, &v), weight);
    }
    state.symmetrize();
    Ok(BatteryGround { energy: lowest, state })
}

/// Initial battery state and the reference energy `E_g` it implies.
pub fn battery_reference(spec: &SystemSpec, h_b: &ComplexMatrix) -> Result<BatteryGround> {
    match spec.initial_battery {
        InitialBattery::Ground => battery_ground(h_b),
        InitialBattery::AllDown => {
            Ok(BatteryGround { energy: h_b[(0, 0)].re, state: ComplexMatrix::basis_projector(h_b.dim(), 0) })
        }
    }
}

/// Initial battery state ⊗ cavity vacuum on the full space.
pub fn initial_state(spec: &SystemSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let reference = battery_reference(spec, &build_battery_hamiltonian(spec)?)?;
    Ok(kron(&reference.state, &ComplexMatrix::basis_projector(spec.cavity_dim(), 0)))
}
