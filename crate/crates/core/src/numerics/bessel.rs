//! Bessel function of the first kind, order zero.
//!
//! Three regimes, all accurate to well under 1e-10 absolute:
//!
//! * `|x| <= 8`: ascending power series. The largest term is ~1e2 at the
//!   upper end, so cancellation costs about 1e-14.
//! * `8 < |x| <= 200`: Miller's backward recurrence normalised with
//!   `J0 + 2 * sum_k J_2k = 1`.
//! * `|x| > 200`: Hankel asymptotic expansion, truncated at its smallest term.

use crate::error::{Error, Result};

const SERIES_LIMIT: f64 = 8.0;
const RECURRENCE_LIMIT: f64 = 200.0;

/// `J0(x)`. Errors on non-finite input.
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("bessel_j0 requires a finite argument, got {x}")));
    }
    let ax = x.abs();
    Ok(if ax <= SERIES_LIMIT {
        series(ax)
    } else if ax <= RECURRENCE_LIMIT {
        backward_recurrence(ax)
    } else {
        asymptotic(ax)
    })
}

fn series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= -q / (k * k);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > q.sqrt() {
            break;
        }
        k += 1.0;
    }
    sum
}

fn backward_recurrence(x: f64) -> f64 {
    // Start well above x so that J_m(x) is negligible.
    let start = (x + 30.0 + 10.0 * x.sqrt()).ceil() as usize;
    let m = start + (start % 2);

    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{n+1}
    let mut cur = 1e-30; // J_n, unnormalised
    let mut even_sum = 0.0;
    for n in (1..=m).rev() {
        let prev = n as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            even_sum *= 1e-250;
        }
        let order = n - 1;
        if order > 0 && order % 2 == 0 {
            even_sum += 2.0 * cur;
        }
    }
    cur / (cur + even_sum)
}

fn asymptotic(x: f64) -> f64 {
    // a_k = prod_{j=1..k} (2j-1)^2 / (k! (8x)^k).
    // P = 1 - a_2 + a_4 - ..., Q = -a_1 + a_3 - ...
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        a *= (2.0 * kf - 1.0).powi(2) / (8.0 * kf * x);
        if a >= last || a < 1e-17 {
            break;
        }
        last = a;
        match k % 4 {
            0 => p += a,
            1 => q -= a,
            2 => p -= a,
            _ => q += a,
        }
    }
    let chi = x - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
