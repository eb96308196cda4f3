//! Physical constants.
//!
//! Everything internal runs in natural units (`c = ε₀ = μ₀ = ħ = 1`) unless a
//! caller passes SI values explicitly.

/// The c-number constants entering the field equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    /// Speed of light.
    pub c: f64,
    /// Vacuum permittivity.
    pub eps0: f64,
    /// Vacuum permeability.
    pub mu0: f64,
    /// Reduced Planck constant.
    pub hbar: f64,
}

impl Constants {
    pub const NATURAL: Constants = Constants {
        c: 1.0,
        eps0: 1.0,
        mu0: 1.0,
        hbar: 1.0,
    };

    /// CODATA 2018 values. `mu0` is derived so that `eps0 * mu0 * c^2 == 1`.
    pub fn si() -> Constants {
        let c = 299_792_458.0;
        let eps0 = 8.854_187_812_8e-12;
        Constants {
            c,
            eps0,
            mu0: 1.0 / (eps0 * c * c),
            hbar: 1.054_571_817e-34,
        }
    }

    /// Relative violation of `eps0 * mu0 * c^2 = 1`.
    pub fn consistency_defect(&self) -> f64 {
        (self.eps0 * self.mu0 * self.c * self.c - 1.0).abs()
    }

    /// Conductance of an outgoing plane wave, `1 / (mu0 c) = eps0 c`.
    pub fn radiation_conductance(&self) -> f64 {
        1.0 / (self.mu0 * self.c)
    }
}

impl Default for Constants {
    fn default() -> Self {
        Constants::NATURAL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn si_is_self_consistent() {
        assert!(Constants::si().consistency_defect() < 1e-15);
        assert_eq!(Constants::NATURAL.consistency_defect(), 0.0);
    }

    #[test]
    fn radiation_conductance_matches_eps0_c() {
        let si = Constants::si();
        let rel = (si.radiation_conductance() - si.eps0 * si.c).abs() / (si.eps0 * si.c);
        assert!(rel < 1e-15);
    }
}
