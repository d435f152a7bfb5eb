//! Spherical Bessel functions `j_n`, `y_n` for the orders the dipole kernel
//! needs (0, 1, 2).
//!
//! `j_1` and `j_2` use their power series below [`SERIES_CUTOFF`]; the
//! trigonometric closed forms cancel catastrophically there. All `y_n` and
//! `j_0` use the closed forms everywhere.

use crate::error::{invalid, Result};

const SERIES_CUTOFF: f64 = 1.0;

/// `j_n(x)` and `y_n(x)` for n = 0, 1, 2 at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrders {
    pub j: [f64; 3],
    pub y: [f64; 3],
}

/// Power series for `j_n`, valid for any x but only used below the cutoff.
fn j_series(n: usize, x: f64) -> f64 {
    // x^n / (2n+1)!!
    let mut lead = 1.0;
    for k in 0..n {
        lead *= x / (2 * k + 3) as f64;
    }
    let half_x2 = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= half_x2 / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Evaluates all three orders. Requires `x > 0`.
pub fn spherical_bessel_orders(x: f64) -> Result<BesselOrders> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!(
            "spherical Bessel argument must be positive and finite, got {x}"
        )));
    }
    Ok(orders_unchecked(x))
}

#[inline]
pub(crate) fn orders_unchecked(x: f64) -> BesselOrders {
    let (s, c) = x.sin_cos();
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let j0 = s * inv;
    let (j1, j2) = if x < SERIES_CUTOFF {
        (j_series(1, x), j_series(2, x))
    } else {
        (
            s * inv2 - c * inv,
            (3.0 * inv2 * inv - inv) * s - 3.0 * c * inv2,
        )
    };
    let y0 = -c * inv;
    let y1 = -c * inv2 - s * inv;
    let y2 = (-3.0 * inv2 * inv + inv) * c - 3.0 * s * inv2;
    BesselOrders {
        j: [j0, j1, j2],
        y: [y0, y1, y2],
    }
}

/// `(j_n(x), y_n(x))` for `n ∈ {0, 1, 2}`.
pub fn spherical_bessel_pair(n: usize, x: f64) -> Result<(f64, f64)> {
    if n > 2 {
        return Err(invalid(format!("order {n} not supported (0..=2)")));
    }
    let o = spherical_bessel_orders(x)?;
    Ok((o.j[n], o.y[n]))
}

/// `(j_n'(x), y_n'(x))` from the recurrences `f_0' = -f_1` and
/// `f_n' = f_{n-1} - (n+1) f_n / x`.
pub fn spherical_bessel_derivative(n: usize, x: f64) -> Result<(f64, f64)> {
    if n > 2 {
        return Err(invalid(format!("order {n} not supported (0..=2)")));
    }
    let o = spherical_bessel_orders(x)?;
    Ok(match n {
        0 => (-o.j[1], -o.y[1]),
        _ => {
            let k = (n + 1) as f64 / x;
            (o.j[n - 1] - k * o.j[n], o.y[n - 1] - k * o.y[n])
        }
    })
}
