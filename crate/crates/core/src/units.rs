//! Natural units and conversions to reporting units.
//!
//! Internally ħ = m = c = e = 1. Lengths come out in Compton radii ħ/mc,
//! energies in mc², angular momenta in ħ and magnetic moments in eħ/mc.
//! Reported observables are ratios against the Bohr magneton eħ/2mc and
//! the spin angular momentum ħ/2.

/// The scale constants of the internal unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub m: f64,
    pub c: f64,
    pub e: f64,
}

impl UnitSystem {
    pub const NATURAL: UnitSystem = UnitSystem {
        hbar: 1.0,
        m: 1.0,
        c: 1.0,
        e: 1.0,
    };

    pub fn compton_radius(&self) -> f64 {
        self.hbar / (self.m * self.c)
    }

    pub fn bohr_magneton(&self) -> f64 {
        self.e * self.hbar / (2.0 * self.m * self.c)
    }

    pub fn rest_energy(&self) -> f64 {
        self.m * self.c * self.c
    }

    pub fn half_hbar(&self) -> f64 {
        0.5 * self.hbar
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::NATURAL
    }
}

pub const COMPTON_RADIUS: f64 = 1.0;
pub const BOHR_MAGNETON: f64 = 0.5;
pub const HALF_HBAR: f64 = 0.5;
pub const REST_ENERGY: f64 = 1.0;

/// Magnetic moment in internal units to a multiple of the Bohr magneton.
pub fn to_bohr_magnetons(mu: f64) -> f64 {
    mu / BOHR_MAGNETON
}

pub fn from_bohr_magnetons(ratio: f64) -> f64 {
    ratio * BOHR_MAGNETON
}

/// Angular momentum in internal units to a multiple of ħ/2.
pub fn to_hbar_halves(l: f64) -> f64 {
    l / HALF_HBAR
}

pub fn from_hbar_halves(ratio: f64) -> f64 {
    ratio * HALF_HBAR
}

pub fn to_compton_radii(length: f64) -> f64 {
    length / COMPTON_RADIUS
}

pub fn to_rest_energies(energy: f64) -> f64 {
    energy / REST_ENERGY
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bohr_magneton_ratios() {
        assert_eq!(to_bohr_magnetons(0.5), 1.0);
        assert_eq!(to_bohr_magnetons(0.0), 0.0);
        assert!((to_bohr_magnetons(1.0 / 3.0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn hbar_half_ratios() {
        assert_eq!(to_hbar_halves(0.5), 1.0);
        assert!((to_hbar_halves(1.0 / 6.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(to_hbar_halves(0.0), 0.0);
    }

    #[test]
    fn derived_scales_match_constants() {
        let u = UnitSystem::NATURAL;
        assert_eq!(u.compton_radius(), COMPTON_RADIUS);
        assert_eq!(u.bohr_magneton(), BOHR_MAGNETON);
        assert_eq!(u.half_hbar(), HALF_HBAR);
        assert_eq!(u.rest_energy(), REST_ENERGY);
    }

    proptest! {
        #[test]
        fn round_trips(x in -1e6f64..1e6) {
            prop_assert!((from_bohr_magnetons(to_bohr_magnetons(x)) - x).abs() <= 1e-15 * x.abs());
            prop_assert!((from_hbar_halves(to_hbar_halves(x)) - x).abs() <= 1e-15 * x.abs());
        }

        #[test]
        fn linear_and_sign_preserving(x in -1e6f64..1e6, y in -1e6f64..1e6) {
            prop_assert_eq!(to_bohr_magnetons(x).signum(), x.signum());
            prop_assert_eq!(to_hbar_halves(x).signum(), x.signum());
            let lhs = to_bohr_magnetons(x + y);
            let rhs = to_bohr_magnetons(x) + to_bohr_magnetons(y);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
        }
    }
}
