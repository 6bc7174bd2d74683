//! Sweep plans and the built-in figure presets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::SystemSpec;

/// A numeric [`SystemSpec`] field that a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    OmegaC,
    OmegaA,
    OmegaD,
    Coupling,
    Hopping,
    Kappa,
    Spins,
    PhotonCutoff,
    Amplitude,
    Temperature,
}

impl SweepParam {
    pub const ALL: [SweepParam; 10] = [
        SweepParam::OmegaC,
        SweepParam::OmegaA,
        SweepParam::OmegaD,
        SweepParam::Coupling,
        SweepParam::Hopping,
        SweepParam::Kappa,
        SweepParam::Spins,
        SweepParam::PhotonCutoff,
        SweepParam::Amplitude,
        SweepParam::Temperature,
    ];

    /// Config-file key.
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::OmegaC => "omega_c",
            SweepParam::OmegaA => "omega_a",
            SweepParam::OmegaD => "omega_d",
            SweepParam::Coupling => "g",
            SweepParam::Hopping => "J",
            SweepParam::Kappa => "kappa",
            SweepParam::Spins => "N",
            SweepParam::PhotonCutoff => "n",
            SweepParam::Amplitude => "A",
            SweepParam::Temperature => "T",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, SweepParam::Spins | SweepParam::PhotonCutoff)
    }

    pub fn get(self, spec: &SystemSpec) -> f64 {
        match self {
            SweepParam::OmegaC => spec.omega_c,
            SweepParam::OmegaA => spec.omega_a,
            SweepParam::OmegaD => spec.omega_d,
            SweepParam::Coupling => spec.coupling,
            SweepParam::Hopping => spec.hopping,
            SweepParam::Kappa => spec.kappa,
            SweepParam::Spins => spec.spins as f64,
            SweepParam::PhotonCutoff => spec.photon_cutoff as f64,
            SweepParam::Amplitude => spec.amplitude,
            SweepParam::Temperature => spec.temperature,
        }
    }

    /// Copy of `base` with this field set to `value`.
    pub fn apply(self, base: &SystemSpec, value: f64) -> Result<SystemSpec> {
        if !value.is_finite() {
            return Err(Error::Usage(format!("{} value {value} is not finite", self.key())));
        }
        let mut spec = base.clone();
        let count = || {
            if value >= 0.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(Error::Usage(format!("{} takes integer values (got {value})", self.key())))
            }
        };
        match self {
            SweepParam::OmegaC => spec.omega_c = value,
            SweepParam::OmegaA => spec.omega_a = value,
            SweepParam::OmegaD => spec.omega_d = value,
            SweepParam::Coupling => spec.coupling = value,
            SweepParam::Hopping => spec.hopping = value,
            SweepParam::Kappa => spec.kappa = value,
            SweepParam::Spins => spec.spins = count()?,
            SweepParam::PhotonCutoff => spec.photon_cutoff = count()?,
            SweepParam::Amplitude => spec.amplitude = value,
            SweepParam::Temperature => spec.temperature = value,
        }
        Ok(spec)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        SweepParam::ALL.into_iter().find(|p| p.key() == s).ok_or_else(|| {
            let keys: Vec<&str> = SweepParam::ALL.iter().map(|p| p.key()).collect();
            Error::Usage(format!("cannot sweep '{s}' (expected one of {})", keys.join(", ")))
        })
    }
}

/// One base spec, one varied field and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub base: SystemSpec,
    pub varied: SweepParam,
    pub values: Vec<f64>,
    /// Preset id or `"custom"`.
    pub label: String,
    /// True when `values` is a built-in default list rather than user input.
    pub default_values: bool,
}

impl SweepPlan {
    pub fn new(base: SystemSpec, varied: SweepParam, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        let plan = Self { base, varied, values, label: label.into(), default_values: false };
        plan.check()?;
        Ok(plan)
    }

    fn check(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Usage(format!("no values given for {}", self.varied)));
        }
        for (i, a) in self.values.iter().enumerate() {
            if self.values[..i].contains(a) {
                return Err(Error::Usage(format!("{} value {a} is listed twice", self.varied)));
            }
        }
        Ok(())
    }

    /// Fully resolved and validated spec for every value, in order.
    pub fn specs(&self) -> Result<Vec<SystemSpec>> {
        self.check()?;
        self.values
            .iter()
            .map(|&v| {
                let spec = self.varied.apply(&self.base, v)?;
                spec.validate()?;
                Ok(spec)
            })
            .collect()
    }
}

pub const PRESET_IDS: [&str; 9] = ["fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d"];

/// Built-in plan for a figure panel.
///
/// Each panel fixes every parameter but one. The value lists
/// are defaults of this tool; the varied field of `base` keeps its
/// [`SystemSpec::default`] value.
pub fn preset(id: &str) -> Result<SweepPlan> {
    let base = SystemSpec::default();
    let (base, varied, values) = match id {
        "fig2a" => (base, SweepParam::Coupling, vec![0.4, 0.8, 1.2, 1.6]),
        "fig2b" => (
            SystemSpec { omega_a: 0.25, omega_d: 1.25 * PI, coupling: 1.2, ..base },
            SweepParam::OmegaC,
            vec![0.25, 0.35, 0.5, 0.75],
        ),
        "fig2c" => (
            SystemSpec { omega_c: 0.35, omega_d: 1.25 * PI, coupling: 1.2, ..base },
            SweepParam::OmegaA,
            vec![0.25, 0.5, 1.0, 1.5],
        ),
        "fig3a" => (SystemSpec { omega_d: 0.75 * PI, ..base }, SweepParam::Spins, vec![1.0, 2.0, 3.0]),
        "fig3b" => (SystemSpec { omega_d: 1.05 * PI, ..base }, SweepParam::PhotonCutoff, vec![1.0, 2.0, 3.0, 4.0]),
        "fig4a" => {
            (SystemSpec { spins: 3, photon_cutoff: 4, ..base }, SweepParam::OmegaD, vec![0.7 * PI, PI, 1.3 * PI])
        }
        "fig4b" => (
            SystemSpec { omega_d: 3.0 * PI, spins: 3, photon_cutoff: 4, ..base },
            SweepParam::Amplitude,
            vec![1.0, 3.0, 7.0, 14.5],
        ),
        "fig4c" => (
            SystemSpec { omega_d: 0.75 * PI, coupling: 0.5, kappa: 0.6, spins: 3, photon_cutoff: 3, ..base },
            SweepParam::Hopping,
            vec![0.5, 0.95, 1.5],
        ),
        "fig4d" => (base, SweepParam::Kappa, vec![0.2, 0.4, 0.8, 1.6]),
        other => return Err(Error::Usage(format!("unknown preset '{other}' (valid: {})", PRESET_IDS.join(", ")))),
    };
    let mut plan = SweepPlan::new(base, varied, values, id)?;
    plan.default_values = true;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Columns: omega_c, omega_a, omega_d / pi, g, J, kappa, N, n, A.
    // NaN marks the varied cell.
    const NAN: f64 = f64::NAN;
    const TABLE: [(&str, [f64; 9]); 9] = [
        ("fig2a", [0.5, 1.0, 1.0, NAN, 0.95, 0.8, 2.0, 2.0, 3.0]),
        ("fig2b", [NAN, 0.25, 1.25, 1.2, 0.95, 0.8, 2.0, 2.0, 3.0]),
        ("fig2c", [0.35, NAN, 1.25, 1.2, 0.95, 0.8, 2.0, 2.0, 3.0]),
        ("fig3a", [0.5, 1.0, 0.75, 0.8, 0.95, 0.8, NAN, 2.0, 3.0]),
        ("fig3b", [0.5, 1.0, 1.05, 0.8, 0.95, 0.8, 2.0, NAN, 3.0]),
        ("fig4a", [0.5, 1.0, NAN, 0.8, 0.95, 0.8, 3.0, 4.0, 3.0]),
        ("fig4b", [0.5, 1.0, 3.0, 0.8, 0.95, 0.8, 3.0, 4.0, NAN]),
        ("fig4c", [0.5, 1.0, 0.75, 0.5, NAN, 0.6, 3.0, 3.0, 3.0]),
        ("fig4d", [0.5, 1.0, 1.0, 0.8, 0.95, NAN, 2.0, 2.0, 3.0]),
    ];
    const COLUMNS: [SweepParam; 9] = [
        SweepParam::OmegaC,
        SweepParam::OmegaA,
        SweepParam::OmegaD,
        SweepParam::Coupling,
        SweepParam::Hopping,
        SweepParam::Kappa,
        SweepParam::Spins,
        SweepParam::PhotonCutoff,
        SweepParam::Amplitude,
    ];

    #[test]
    fn presets_match_parameter_table() {
        for (id, row) in TABLE {
            let plan = preset(id).unwrap();
            assert_eq!(plan.label, id);
            assert!(plan.default_values);
            for (param, want) in COLUMNS.iter().zip(row) {
                if want.is_nan() {
                    assert_eq!(plan.varied, *param, "{id}");
                    continue;
                }
                let got = param.get(&plan.base);
                let got = if *param == SweepParam::OmegaD { got / PI } else { got };
                assert!((got - want).abs() < 1e-12, "{id} {param}: {got} vs {want}");
            }
            assert_eq!(plan.specs().unwrap().len(), plan.values.len());
        }
    }

    #[test]
    fn preset_value_lists_include_named_points() {
        let fig4a = preset("fig4a").unwrap().values;
        assert!(fig4a.contains(&(0.7 * PI)) && fig4a.contains(&(1.3 * PI)));
        assert!(preset("fig4b").unwrap().values.contains(&14.5));
        assert_eq!(preset("fig3a").unwrap().values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn unknown_preset_lists_ids() {
        match preset("fig5") {
            Err(Error::Usage(msg)) => {
                for id in PRESET_IDS {
                    assert!(msg.contains(id));
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn plan_rejects_empty_and_repeated_values() {
        let base = SystemSpec::default();
        assert!(SweepPlan::new(base.clone(), SweepParam::Coupling, vec![], "custom").is_err());
        assert!(SweepPlan::new(base.clone(), SweepParam::Coupling, vec![0.1, 0.1], "custom").is_err());
        let plan = SweepPlan::new(base, SweepParam::Spins, vec![1.5], "custom").unwrap();
        assert!(matches!(plan.specs(), Err(Error::Usage(_))));
    }

    #[test]
    fn param_keys_round_trip() {
        for p in SweepParam::ALL {
            assert_eq!(p.key().parse::<SweepParam>().unwrap(), p);
        }
        assert!("dt".parse::<SweepParam>().is_err());
    }
}
