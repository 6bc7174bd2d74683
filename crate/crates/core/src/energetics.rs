//! Stored energy, net charging energy, passive state and ergotropy of the
//! reduced battery state.
//!
//! The minimum of `Tr[H U ρ U†]` over unitaries is attained by the passive
//! state: the eigenvalues of `ρ` sorted in descending order placed on the
//! eigenlevels of `H` sorted in ascending order.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, ComplexMatrix, Eigh};

/// Imaginary trace residue that signals a non-Hermitian input.
const IMAGINARY_TOL: f64 = 1e-8;
/// Negative state eigenvalues down to this are treated as integration noise.
pub const NEGATIVE_CLIP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub e_b: f64,
    pub delta_e: f64,
    pub ergotropy: f64,
    pub passive_energy: f64,
}

/// `Tr[H_b ρ_b]`.
pub fn battery_energy(rho_b: &ComplexMatrix, h_b: &ComplexMatrix) -> Result<f64> {
    if rho_b.dim() != h_b.dim() {
        return Err(Error::DimensionMismatch { context: "battery_energy", expected: h_b.dim(), found: rho_b.dim() });
    }
    let n = h_b.dim();
    let mut tr = C64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            tr += h_b[(r, c)] * rho_b[(c, r)];
        }
    }
    if tr.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryEnergy { residue: tr.im.abs() });
    }
    Ok(tr.re)
}

pub fn net_charging_energy(e_b: f64, e_g: f64) -> f64 {
    e_b - e_g
}

/// Eigenvalues of `ρ` in descending order, with benign negative noise
/// clipped and the remainder renormalized to the original trace.
fn populations_descending(rho_b: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut herm = rho_b.clone();
    herm.symmetrize();
    let mut pops = eigvalsh(&herm)?;
    pops.reverse();
    let min = pops.last().copied().unwrap_or(0.0);
    if min < -NEGATIVE_CLIP {
        return Err(Error::Domain(format!(
            "state has eigenvalue {min:e}, below the clipping threshold -{NEGATIVE_CLIP:e}"
        )));
    }
    if min < 0.0 {
        let total: f64 = pops.iter().sum();
        pops.iter_mut().for_each(|p| *p = p.max(0.0));
        let clipped: f64 = pops.iter().sum();
        if clipped > 0.0 {
            pops.iter_mut().for_each(|p| *p *= total / clipped);
        }
    }
    Ok(pops)
}

/// `Σ_k r_k |ε_k⟩⟨ε_k|`, populations descending on levels ascending.
pub fn passive_state(rho_b: &ComplexMatrix, h_b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho_b.dim() != h_b.dim() {
        return Err(Error::DimensionMismatch { context: "passive_state", expected: h_b.dim(), found: rho_b.dim() });
    }
    let pops = populations_descending(rho_b)?;
    let Eigh { vectors, .. } = eigh(h_b)?;
    let mut sigma = ComplexMatrix::zeros(h_b.dim());
    for (k, &p) in pops.iter().enumerate() {
        let v = vectors.column(k);
        sigma.add_scaled(&ComplexMatrix::outer(&v, &v), C64::new(p, 0.0));
    }
    sigma.symmetrize();
    Ok(sigma)
}

/// Maximum unitarily extractable work from `ρ_b`.
pub fn ergotropy(rho_b: &ComplexMatrix, h_b: &ComplexMatrix) -> Result<f64> {
    let levels = eigvalsh(h_b)?;
    BatteryEnergetics::from_levels(h_b.clone(), levels, 0.0).ergotropy(rho_b)
}

/// Energetics bound to one battery Hamiltonian, with its spectrum cached.
#[derive(Debug, Clone)]
pub struct BatteryEnergetics {
    h_b: ComplexMatrix,
    levels: Vec<f64>,
    ground_energy: f64,
}

impl BatteryEnergetics {
    pub fn new(h_b: ComplexMatrix, ground_energy: f64) -> Result<Self> {
        let levels = eigvalsh(&h_b)?;
        Ok(Self::from_levels(h_b, levels, ground_energy))
    }

    fn from_levels(h_b: ComplexMatrix, levels: Vec<f64>, ground_energy: f64) -> Self {
        Self { h_b, levels, ground_energy }
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// Energy of the passive state with the same spectrum as `rho_b`.
    pub fn passive_energy(&self, rho_b: &ComplexMatrix) -> Result<f64> {
        if rho_b.dim() != self.h_b.dim() {
            return Err(Error::DimensionMismatch {
                context: "passive_energy",
                expected: self.h_b.dim(),
                found: rho_b.dim(),
            });
        }
        let pops = populations_descending(rho_b)?;
        Ok(pops.iter().zip(&self.levels).map(|(p, e)| p * e).sum())
    }

    pub fn ergotropy(&self, rho_b: &ComplexMatrix) -> Result<f64> {
        Ok(battery_energy(rho_b, &self.h_b)? - self.passive_energy(rho_b)?)
    }

    pub fn report(&self, rho_b: &ComplexMatrix) -> Result<EnergyReport> {
        let e_b = battery_energy(rho_b, &self.h_b)?;
        let passive_energy = self.passive_energy(rho_b)?;
        Ok(EnergyReport {
            e_b,
            delta_e: net_charging_energy(e_b, self.ground_energy),
            ergotropy: e_b - passive_energy,
            passive_energy,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_battery_hamiltonian, SystemSpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(v)
    }

    fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut h = &g + &g.adjoint();
        h.symmetrize();
        let e = eigh(&h).unwrap();
        let phases: Vec<f64> = e.values.iter().map(|x| x * 3.0).collect();
        let mut vp = e.vectors.clone();
        for r in 0..dim {
            for c in 0..dim {
                vp[(r, c)] *= C64::from_polar(1.0, phases[c]);
            }
        }
        &vp * &e.vectors.adjoint()
    }

    fn random_density(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let rho = &g * &g.adjoint();
        let tr = rho.trace();
        let mut rho = rho.scale(tr.inv());
        rho.symmetrize();
        rho
    }

    fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let mut h = &g + &g.adjoint();
        h.symmetrize();
        h
    }

    #[test]
    fn battery_energy_examples() {
        let spec = SystemSpec::default();
        let hb = build_battery_hamiltonian(&spec).unwrap();
        assert_eq!(battery_energy(&ComplexMatrix::basis_projector(4, 0), &hb).unwrap(), 0.0);
        assert!((battery_energy(&ComplexMatrix::basis_projector(4, 3), &hb).unwrap() - 2.0).abs() < 1e-15);

        let one = SystemSpec { spins: 1, ..spec };
        let hb1 = build_battery_hamiltonian(&one).unwrap();
        assert!((battery_energy(&diag(&[0.5, 0.5]), &hb1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn battery_energy_rejects_imaginary_trace() {
        let h = diag(&[0.0, 1.0]);
        let mut rho = diag(&[0.5, 0.5]);
        rho[(1, 1)] = C64::new(0.5, 1e-3);
        assert!(matches!(battery_energy(&rho, &h), Err(Error::ImaginaryEnergy { .. })));
    }

    #[test]
    fn net_charging_energy_examples() {
        assert_eq!(net_charging_energy(0.0, 0.0), 0.0);
        assert_eq!(net_charging_energy(2.0, 0.0), 2.0);
        assert_eq!(net_charging_energy(0.5, 0.0), 0.5);
    }

    #[test]
    fn passive_state_examples() {
        let h = diag(&[0.0, 1.0]);
        let sigma = passive_state(&diag(&[0.2, 0.8]), &h).unwrap();
        assert!((&sigma - &diag(&[0.8, 0.2])).max_abs() < 1e-12);

        let gibbs = diag(&[0.5, 0.3, 0.15, 0.05]);
        let h4 = diag(&[0.0, 0.4, 1.1, 2.0]);
        assert!((&passive_state(&gibbs, &h4).unwrap() - &gibbs).max_abs() < 1e-10);

        let ground = ComplexMatrix::basis_projector(4, 0);
        assert!((&passive_state(&ground, &h4).unwrap() - &ground).max_abs() < 1e-12);
    }

    #[test]
    fn ergotropy_examples() {
        let h = diag(&[0.0, 1.0]);
        assert!((ergotropy(&diag(&[0.2, 0.8]), &h).unwrap() - 0.6).abs() < 1e-12);
        let gibbs = diag(&[0.5, 0.3, 0.15, 0.05]);
        let h4 = diag(&[0.0, 0.4, 1.1, 2.0]);
        assert!(ergotropy(&gibbs, &h4).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ergotropy_matches_permutation_minimum() {
        use itertools::Itertools;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let rho = random_density(&mut rng, 4);
            let h = random_hermitian(&mut rng, 4);
            let r = eigvalsh(&rho).unwrap();
            let e = eigvalsh(&h).unwrap();
            let best = (0..4)
                .permutations(4)
                .map(|p| p.iter().enumerate().map(|(k, &j)| r[k] * e[j]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            let oracle = battery_energy(&rho, &h).unwrap() - best;
            assert!((ergotropy(&rho, &h).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn clips_small_negative_eigenvalues() {
        let h = diag(&[0.0, 1.0]);
        let rho = diag(&[1.0 + 5e-7, -5e-7]);
        let w = ergotropy(&rho, &h).unwrap();
        assert!(w.abs() < 1e-6);
        let bad = diag(&[1.1, -0.1]);
        assert!(matches!(ergotropy(&bad, &h), Err(Error::Domain(_))));
    }

    #[test]
    fn passive_state_resists_random_unitaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_density(&mut rng, 4);
        let h = random_hermitian(&mut rng, 4);
        let sigma = passive_state(&rho, &h).unwrap();
        assert!(h.commutator(&sigma).frobenius_norm() < 1e-10);
        assert!((sigma.trace().re - 1.0).abs() < 1e-12);
        let base = battery_energy(&sigma, &h).unwrap();
        for _ in 0..100 {
            let u = random_unitary(&mut rng, 4);
            let rotated = &(&u * &sigma) * &u.adjoint();
            assert!(battery_energy(&rotated, &h).unwrap() >= base - 1e-9);
        }
    }

    #[test]
    fn degenerate_levels_do_not_change_ergotropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // Levels {0, 1, 1, 2}; rotate the degenerate block.
        let h = diag(&[0.0, 1.0, 1.0, 2.0]);
        let block = random_unitary(&mut rng, 2);
        let mut u = ComplexMatrix::identity(4);
        for r in 0..2 {
            for c in 0..2 {
                u[(r + 1, c + 1)] = block[(r, c)];
            }
        }
        let h_rot = &(&u * &h) * &u.adjoint();
        for _ in 0..20 {
            let rho = random_density(&mut rng, 4);
            let a = ergotropy(&rho, &h).unwrap();
            let b = ergotropy(&rho, &h_rot).unwrap();
            // h_rot == h up to rounding; the eigenbasis returned differs.
            assert!((a - b).abs() < 1e-10);
            let pa = battery_energy(&passive_state(&rho, &h).unwrap(), &h).unwrap();
            let pb = battery_energy(&passive_state(&rho, &h_rot).unwrap(), &h).unwrap();
            assert!((pa - pb).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn passive_energy_is_unitarily_invariant(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density(&mut rng, 4);
            let h = random_hermitian(&mut rng, 4);
            let u = random_unitary(&mut rng, 4);
            let rotated = &(&u * &rho) * &u.adjoint();
            let energetics = BatteryEnergetics::new(h.clone(), eigvalsh(&h).unwrap()[0]).unwrap();
            let a = energetics.report(&rho).unwrap();
            let b = energetics.report(&rotated).unwrap();
            prop_assert!((a.passive_energy - b.passive_energy).abs() < 1e-9);
            prop_assert!(a.ergotropy >= -1e-10);
            prop_assert!(a.ergotropy <= a.delta_e + 1e-10);
            prop_assert!(a.passive_energy >= energetics.ground_energy() - 1e-10);
        }

        #[test]
        fn ergotropy_is_invariant_under_energy_preserving_unitaries(seed in any::<u64>(), phases in prop::array::uniform4(-3.2f64..3.2)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rho = random_density(&mut rng, 4);
            let h = random_hermitian(&mut rng, 4);
            // Phases in the eigenbasis of h commute with h.
            let e = eigh(&h).unwrap();
            let mut vp = e.vectors.clone();
            for r in 0..4 {
                for c in 0..4 {
                    vp[(r, c)] *= C64::from_polar(1.0, phases[c]);
                }
            }
            let u = &vp * &e.vectors.adjoint();
            let rotated = &(&u * &rho) * &u.adjoint();
            let a = ergotropy(&rho, &h).unwrap();
            let b = ergotropy(&rotated, &h).unwrap();
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }
}
