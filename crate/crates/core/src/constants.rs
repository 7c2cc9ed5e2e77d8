//! Physical constants in CGS-Gaussian units.
//!
//! Every other module reads constants from here. The primary values are
//! CODATA 2018 (exact SI definitions converted to CGS); the classical
//! electron radius and the reduced Compton wavelength are derived from them
//! so the set is self-consistent to rounding.

/// A complete, self-consistent constant set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, erg·s.
    pub hbar: f64,
    /// Electron mass, g.
    pub m_e: f64,
    /// Elementary charge, statC.
    pub e_charge: f64,
    /// Speed of light, cm/s.
    pub c_light: f64,
    /// Classical electron radius e²/(m c²), cm.
    pub r_e: f64,
    /// Reduced Compton wavelength ħ/(m c), cm.
    pub lambdabar_c: f64,
    /// erg per eV.
    pub erg_per_ev: f64,
}

const HBAR: f64 = 1.054_571_817e-27;
const M_E: f64 = 9.109_383_701_5e-28;
const C_LIGHT: f64 = 2.997_924_58e10;
const ERG_PER_EV: f64 = 1.602_176_634e-12;
// e [statC] = e [C] · c [cm/s] / 10
const E_CHARGE: f64 = 1.602_176_634e-19 * C_LIGHT / 10.0;

static CGS: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    m_e: M_E,
    e_charge: E_CHARGE,
    c_light: C_LIGHT,
    r_e: E_CHARGE * E_CHARGE / (M_E * C_LIGHT * C_LIGHT),
    lambdabar_c: HBAR / (M_E * C_LIGHT),
    erg_per_ev: ERG_PER_EV,
};

/// The fixed CGS constant set.
pub fn constants() -> &'static PhysicalConstants {
    &CGS
}

impl PhysicalConstants {
    /// Fine-structure constant e²/(ħc).
    pub fn alpha(&self) -> f64 {
        self.e_charge * self.e_charge / (self.hbar * self.c_light)
    }

    /// Electron rest energy m c², erg.
    pub fn rest_energy(&self) -> f64 {
        self.m_e * self.c_light * self.c_light
    }

    /// ħ/m, cm²/s.
    pub fn hbar_over_m(&self) -> f64 {
        self.hbar / self.m_e
    }

    pub fn erg_to_ev(&self, erg: f64) -> f64 {
        erg / self.erg_per_ev
    }

    pub fn ev_to_erg(&self, ev: f64) -> f64 {
        ev * self.erg_per_ev
    }

    /// Copy of this set with ħ multiplied by `factor`, keeping the derived
    /// fields consistent. Only used to probe the ħ-scaling of results.
    #[doc(hidden)]
    pub fn with_scaled_hbar(&self, factor: f64) -> Self {
        let hbar = self.hbar * factor;
        Self {
            hbar,
            lambdabar_c: hbar / (self.m_e * self.c_light),
            ..*self
        }
    }
}

/// Centimetres per ångström.
pub const CM_PER_ANGSTROM: f64 = 1e-8;
