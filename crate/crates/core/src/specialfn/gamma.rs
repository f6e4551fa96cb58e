use crate::error::{Error, Result};
use crate::real::Real;

// B_{2k} / (2k (2k-1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `ln Γ(x)` for `x > 0`.
///
/// Stirling series at `x ≥ 8`; smaller arguments are raised with
/// `Γ(x) = Γ(x + k) / (x (x+1) … (x+k-1))`.
pub fn log_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x = {x:e} must be positive and finite")));
    }
    let eight = T::lit(8.0);
    let mut shift = T::zero();
    let mut z = x;
    if z < eight {
        let mut prod = T::one();
        while z < eight {
            prod = prod * z;
            z = z + T::one();
            // keep the running product in range
            if prod > T::lit(1e100) {
                shift = shift + prod.ln();
                prod = T::one();
            }
        }
        shift = shift + prod.ln();
    }
    let zi = z.recip();
    let zi2 = zi * zi;
    let mut series = T::zero();
    for c in STIRLING.iter().rev() {
        series = series * zi2 + T::lit(*c);
    }
    series = series * zi;
    let half_ln_2pi = T::lit(0.918938533204672741780329736406);
    Ok((z - T::lit(0.5)) * z.ln() - z + half_ln_2pi + series - shift)
}
