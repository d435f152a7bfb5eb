//! Atomic species data, dipole Clebsch-Gordan coefficients and the special
//! functions used by the interaction kernel.

pub(crate) mod bessel;
mod clebsch;
mod species;

pub use bessel::{
    spherical_bessel_derivative, spherical_bessel_orders, spherical_bessel_pair, BesselOrders,
};
pub use clebsch::{clebsch_gordan, clebsch_gordan_exact, dipole_coefficient, SignedSqrt};
pub use species::{cesium_d2, AngularMomentumKet, AtomSpecies, HalfInt};

use crate::error::{invalid, Result};

/// Second Legendre polynomial, `(3μ² - 1) / 2`.
pub fn legendre_p2(mu: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&mu) {
        return Err(invalid(format!(
            "legendre_p2 argument {mu} outside [-1, 1]"
        )));
    }
    Ok(p2_unchecked(mu))
}

#[inline]
pub(crate) fn p2_unchecked(mu: f64) -> f64 {
    0.5 * (3.0 * mu * mu - 1.0)
}
