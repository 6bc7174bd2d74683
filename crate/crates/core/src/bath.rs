//! Debye spectral density, Bose-Einstein thermal rates and the cavity
//! dissipator `γ (L ρ L† − ½{L†L, ρ})`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{Channels, ModelOperators, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub kappa: f64,
    /// Debye reference frequency (the spin frequency ω_a).
    pub omega_a: f64,
    /// Frequency at which rates are evaluated (the cavity frequency ω_c).
    pub omega_c: f64,
    pub temperature: f64,
    pub channels: Channels,
}

impl BathSpec {
    pub fn from_system(spec: &SystemSpec) -> Self {
        Self {
            kappa: spec.kappa,
            omega_a: spec.omega_a,
            omega_c: spec.omega_c,
            temperature: spec.temperature,
            channels: spec.channels,
        }
    }

    /// `(rate for L = a†, rate for L = a)` at ω_c, honouring `channels`.
    pub fn channel_rates(&self) -> Result<(f64, f64)> {
        if self.kappa == 0.0 {
            return Ok((0.0, 0.0));
        }
        let density = spectral_density(self.omega_c, self.kappa, self.omega_a);
        let occupation = bose_occupation(self.omega_c, self.temperature)?;
        let up = density * occupation;
        let down = density * (occupation + 1.0);
        Ok(match self.channels {
            Channels::Heating => (up, 0.0),
            Channels::Cooling => (0.0, down),
            Channels::Both => (up, down),
        })
    }
}

/// Debye spectral density `κ|ω| / (ω_a² + ω²)`.
pub fn spectral_density(omega: f64, kappa: f64, omega_a: f64) -> f64 {
    kappa * omega.abs() / (omega_a * omega_a + omega * omega)
}

/// Mean thermal occupation `1 / (e^{ω/T} − 1)`.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain(format!("Bose occupation needs a positive frequency (got {omega})")));
    }
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::Domain(format!("Bose occupation needs a positive temperature (got {temperature})")));
    }
    // exp_m1 overflows to +inf for ω/T ≳ 709, giving the empty-bath limit 0.
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// `γ(ω) = J(ω)·n̄(ω)`.
pub fn thermal_rate(omega: f64, bath: &BathSpec) -> Result<f64> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain(format!("thermal rate is defined for positive frequencies only (got {omega})")));
    }
    if bath.kappa == 0.0 {
        return Ok(0.0);
    }
    Ok(spectral_density(omega, bath.kappa, bath.omega_a) * bose_occupation(omega, bath.temperature)?)
}

/// `D[L]ρ = LρL† − ½{L†L, ρ}`.
pub fn lindblad_term(rho: &ComplexMatrix, jump: &ComplexMatrix) -> ComplexMatrix {
    let l_dag = jump.adjoint();
    let sandwich = &(jump * rho) * &l_dag;
    let anti = (&l_dag * jump).anticommutator(rho);
    let mut out = sandwich;
    out.add_scaled(&anti, C64::new(-0.5, 0.0));
    out
}

/// Bath contribution to `dρ/dt` on the full space.
pub fn dissipator_apply(rho: &ComplexMatrix, ops: &ModelOperators, bath: &BathSpec) -> Result<ComplexMatrix> {
    let dim = ops.fact.total_dim();
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch { context: "dissipator_apply", expected: dim, found: rho.dim() });
    }
    let (up, down) = bath.channel_rates()?;
    let mut out = ComplexMatrix::zeros(dim);
    if up != 0.0 {
        out.add_scaled(&lindblad_term(rho, &ops.jump_up), C64::new(up, 0.0));
    }
    if down != 0.0 {
        out.add_scaled(&lindblad_term(rho, &ops.jump_down), C64::new(down, 0.0));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, ops as lops, partial_trace, Subsystem};
    use crate::model::{battery_ground, build_battery_hamiltonian, initial_state};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fig2a_bath() -> BathSpec {
        BathSpec::from_system(&SystemSpec::default())
    }

    fn random_density(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let rho = &g * &g.adjoint();
        let tr = rho.trace();
        let mut rho = rho.scale(tr.inv());
        rho.symmetrize();
        rho
    }

    #[test]
    fn spectral_density_values() {
        assert_eq!(spectral_density(0.0, 0.8, 1.0), 0.0);
        assert!((spectral_density(0.5, 0.8, 1.0) - 0.32).abs() < 1e-15);
        assert!((spectral_density(1.0, 0.8, 1.0) - 0.4).abs() < 1e-15);
        assert!(spectral_density(1e9, 0.8, 1.0) < 1e-9);
    }

    #[test]
    fn thermal_rate_values() {
        let bath = fig2a_bath();
        // 0.32 / (e^{0.5} − 1)
        let want = 0.32 / (0.5f64.exp() - 1.0);
        let got = thermal_rate(0.5, &bath).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.493279).abs() < 1e-6);

        let cold = BathSpec { temperature: 1e-3, ..bath };
        assert!(thermal_rate(0.5, &cold).unwrap() < 1e-200);
        let closed = BathSpec { kappa: 0.0, ..bath };
        assert_eq!(thermal_rate(0.5, &closed).unwrap(), 0.0);
    }

    #[test]
    fn thermal_rate_domain_error() {
        let bath = fig2a_bath();
        assert!(matches!(thermal_rate(0.0, &bath), Err(Error::Domain(_))));
        assert!(matches!(thermal_rate(-0.5, &bath), Err(Error::Domain(_))));
    }

    #[test]
    fn thermal_rate_decreases_above_reference() {
        let bath = fig2a_bath();
        let mut prev = f64::INFINITY;
        for k in 0..50 {
            let w = 1.0 + 0.2 * k as f64;
            let r = thermal_rate(w, &bath).unwrap();
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn closed_system_dissipator_is_zero() {
        let spec = SystemSpec { kappa: 0.0, ..Default::default() };
        let ops = ModelOperators::build(&spec).unwrap();
        let rho = initial_state(&spec).unwrap();
        let out = dissipator_apply(&rho, &ops, &BathSpec::from_system(&spec)).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn heating_on_vacuum_populates_cavity_at_thermal_rate() {
        let spec = SystemSpec::default();
        let ops = ModelOperators::build(&spec).unwrap();
        let rho = initial_state(&spec).unwrap();
        let d_rho = dissipator_apply(&rho, &ops, &BathSpec::from_system(&spec)).unwrap();
        let number = &ops.jump_up * &ops.jump_down;
        let rate = (&number * &d_rho).trace().re;
        assert!((rate - 0.32 / (0.5f64.exp() - 1.0)).abs() < 1e-14);
        assert!((rate - 0.493279).abs() < 1e-6);
    }

    #[test]
    fn dissipator_is_traceless_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for channels in [Channels::Heating, Channels::Cooling, Channels::Both] {
            let spec = SystemSpec { channels, ..Default::default() };
            let ops = ModelOperators::build(&spec).unwrap();
            let bath = BathSpec::from_system(&spec);
            for _ in 0..100 {
                let rho = random_density(&mut rng, 12);
                let out = dissipator_apply(&rho, &ops, &bath).unwrap();
                assert!(out.trace().norm() < 1e-12);
                assert!(out.hermiticity_deviation() < 1e-12);
            }
        }
    }

    #[test]
    fn dissipator_rejects_wrong_dimension() {
        let spec = SystemSpec::default();
        let ops = ModelOperators::build(&spec).unwrap();
        let err = dissipator_apply(&ComplexMatrix::identity(4), &ops, &BathSpec::from_system(&spec)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn thermal_cavity_state_is_stationary() {
        // g = 0, A = 0, both channels: ground battery ⊗ truncated thermal cavity.
        for cutoff in [1, 2, 4, 8] {
            let spec = SystemSpec {
                coupling: 0.0,
                amplitude: 0.0,
                channels: Channels::Both,
                photon_cutoff: cutoff,
                ..Default::default()
            };
            let ops = ModelOperators::build(&spec).unwrap();
            let bath = BathSpec::from_system(&spec);
            let nbar = bose_occupation(spec.omega_c, spec.temperature).unwrap();
            let x = nbar / (nbar + 1.0);
            let pops: Vec<f64> = (0..spec.cavity_dim()).map(|k| x.powi(k as i32)).collect();
            let z: f64 = pops.iter().sum();
            let thermal = ComplexMatrix::from_real_diagonal(&pops.iter().map(|p| p / z).collect::<Vec<_>>());
            let hb = build_battery_hamiltonian(&spec).unwrap();
            let rho = kron(&battery_ground(&hb).unwrap().state, &thermal);

            let h = ops.h_static();
            let mut residual = dissipator_apply(&rho, &ops, &bath).unwrap();
            residual.add_scaled(&h.commutator(&rho), C64::new(0.0, -1.0));
            assert!(residual.frobenius_norm() < 1e-14, "cutoff {cutoff}: {}", residual.frobenius_norm());

            // Mean occupation approaches n̄ as the cutoff grows.
            let cav = partial_trace(&rho, &ops.fact, Subsystem::Cavity).unwrap();
            let occ =
                (&(&lops::creation(spec.cavity_dim()) * &lops::annihilation(spec.cavity_dim())) * &cav).trace().re;
            assert!(occ <= nbar + 1e-12);
        }
    }

    proptest! {
        #[test]
        fn spectral_density_is_even_and_bounded(w in -50.0f64..50.0, kappa in 0.0f64..5.0, wa in 0.01f64..5.0) {
            let j = spectral_density(w, kappa, wa);
            prop_assert_eq!(j, spectral_density(-w, kappa, wa));
            prop_assert!(j >= 0.0);
            prop_assert!(j <= kappa / (2.0 * wa) * (1.0 + 1e-12));
        }

        #[test]
        fn thermal_rate_increases_with_temperature(w in 0.05f64..5.0, t1 in 0.05f64..5.0, dt in 0.01f64..5.0) {
            let bath = BathSpec { temperature: t1, ..fig2a_bath() };
            let hotter = BathSpec { temperature: t1 + dt, ..bath };
            prop_assert!(thermal_rate(w, &hotter).unwrap() >= thermal_rate(w, &bath).unwrap());
        }

        #[test]
        fn dissipator_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spec = SystemSpec { channels: Channels::Both, ..Default::default() };
            let ops = ModelOperators::build(&spec).unwrap();
            let bath = BathSpec::from_system(&spec);
            let r1 = random_density(&mut rng, 12);
            let r2 = random_density(&mut rng, 12);
            let mut mix = r1.scale(C64::new(a, 0.0));
            mix.add_scaled(&r2, C64::new(b, 0.0));
            let lhs = dissipator_apply(&mix, &ops, &bath).unwrap();
            let mut rhs = dissipator_apply(&r1, &ops, &bath).unwrap().scale(C64::new(a, 0.0));
            rhs.add_scaled(&dissipator_apply(&r2, &ops, &bath).unwrap(), C64::new(b, 0.0));
            prop_assert!((&lhs - &rhs).max_abs() < 1e-12);
        }
    }
}
