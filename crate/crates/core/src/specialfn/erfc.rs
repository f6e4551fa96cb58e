//! Complementary error function (Cody's rational Chebyshev approximations).

use crate::real::Real;

const A: [f64; 5] = [
    3.1611237438705656,
    113.864154151050156,
    377.485237685302021,
    3209.37758913846947,
    0.185777706184603153,
];
const B: [f64; 4] = [23.6012909523441209, 244.024637934444173, 1282.61652607737228, 2844.23683343917062];
const C: [f64; 9] = [
    0.564188496988670089,
    8.88314979438837594,
    66.1191906371416295,
    298.635138197400131,
    881.95222124176909,
    1712.04761263407058,
    2051.07837782607147,
    1230.33935479799725,
    2.15311535474403846e-8,
];
const D: [f64; 8] = [
    15.7449261107098347,
    117.693950891312499,
    537.181101862009858,
    1621.38957456669019,
    3290.79923573345963,
    4362.61909014324716,
    3439.36767414372164,
    1230.33935480374942,
];
const P: [f64; 6] = [
    0.305326634961232344,
    0.360344899949804439,
    0.125781726111229246,
    0.0160837851487422766,
    6.58749161529837803e-4,
    0.0163153871373020978,
];
const Q: [f64; 5] = [
    2.56852019228982242,
    1.87295284992346047,
    0.527905102951428412,
    0.0605183413124413191,
    0.00233520497626869185,
];

const THRESHOLD: f64 = 0.46875;

fn l<T: Real>(x: f64) -> T {
    T::lit(x)
}

fn small_ratio<T: Real>(z: T) -> T {
    ((((l::<T>(A[4]) * z + l(A[0])) * z + l(A[1])) * z + l(A[2])) * z + l(A[3]))
        / ((((z + l(B[0])) * z + l(B[1])) * z + l(B[2])) * z + l(B[3]))
}

/// `exp(y^2) erfc(y)` for `y > THRESHOLD`.
fn erfcx_tail<T: Real>(y: T) -> T {
    if y <= l(4.0) {
        let mut num = l::<T>(C[8]) * y;
        for c in &C[0..7] {
            num = (num + l(*c)) * y;
        }
        num = num + l(C[7]);
        let mut den = y;
        for d in &D[0..7] {
            den = (den + l(*d)) * y;
        }
        den = den + l(D[7]);
        num / den
    } else {
        let z = (y * y).recip();
        let mut num = l::<T>(P[5]) * z;
        for p in &P[0..4] {
            num = (num + l(*p)) * z;
        }
        num = (num + l(P[4])) * z;
        let mut den = z;
        for q in &Q[0..4] {
            den = (den + l(*q)) * z;
        }
        den = den + l(Q[4]);
        (T::FRAC_2_SQRT_PI() * l(0.5) - num / den) / y
    }
}

/// `exp(-y^2)` split so the rounding error of `y^2` does not get amplified.
fn exp_neg_sq<T: Real>(y: T) -> T {
    let y16 = (y * l(16.0)).trunc() / l(16.0);
    (-y16 * y16).exp() * (-(y - y16) * (y + y16)).exp()
}

/// `erfc(t) = (2/√π) ∫_t^∞ e^{-x²} dx`.
///
/// Underflows to zero for `t ≳ 26.5`; use [`ln_erfc`] when the logarithm is
/// wanted further out.
pub fn erfc<T: Real>(t: T) -> T {
    if t.is_nan() {
        return t;
    }
    let y = t.abs();
    if y <= l(THRESHOLD) {
        return T::one() - t * small_ratio(y * y);
    }
    let tail = if y >= l(26.6) { T::zero() } else { erfcx_tail(y) * exp_neg_sq(y) };
    if t < T::zero() {
        l::<T>(2.0) - tail
    } else {
        tail
    }
}

/// `exp(t²) erfc(t)`, finite for `t ≥ -26`.
pub fn erfcx<T: Real>(t: T) -> T {
    let y = t.abs();
    if y <= l(THRESHOLD) {
        return (y * y).exp() * (T::one() - t * small_ratio(y * y));
    }
    let tail = erfcx_tail(y);
    if t < T::zero() {
        l::<T>(2.0) * (y * y).exp() - tail
    } else {
        tail
    }
}

/// `ln erfc(t)` for every finite `t` without underflow.
pub fn ln_erfc<T: Real>(t: T) -> T {
    if t > l(THRESHOLD) {
        erfcx_tail(t).ln() - t * t
    } else {
        erfc(t).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_values() {
        // mpmath, 30 digits
        let cases = [
            (0.0, 1.0),
            (0.3, 0.671373240540872584),
            (1.0, 0.157299207050285131),
            (-1.0, 1.842700792949714869),
            (2.5, 4.0695201744495894e-4),
            (5.0, 1.53745979442803485e-12),
            (10.0, 2.08848758376254476e-45),
            (25.0, 8.30017257119652275e-274),
        ];
        for (t, v) in cases {
            let got: f64 = erfc(t);
            assert!(((got - v) / v).abs() < 1e-14, "erfc({t}) = {got}, want {v}");
        }
    }

    #[test]
    fn far_tail_is_representable_in_log_form() {
        assert!(erfc(30.0_f64) < 1e-300);
        // ln erfc(30) = -900 - ln(30 √π) - 1/(2·900) + ...
        let lt = ln_erfc(30.0_f64);
        let approx = -900.0 - (30.0 * std::f64::consts::PI.sqrt()).ln() - 1.0 / 1800.0;
        assert!((lt - approx).abs() < 1e-6, "{lt}");
    }

    #[test]
    fn f32_variant_tracks_f64() {
        for k in -20..=20 {
            let t = k as f64 * 0.2;
            let a = erfc(t as f32) as f64;
            assert!((a - erfc(t)).abs() < 1e-6 * erfc(t).max(1e-3));
        }
    }

    proptest! {
        #[test]
        fn reflection(t in -8.0f64..8.0) {
            prop_assert!((erfc(t) + erfc(-t) - 2.0).abs() < 4e-16 * 2.0);
        }

        #[test]
        fn monotone_decreasing(t in -5.0f64..6.0, dt in 1e-3f64..1.0) {
            prop_assert!(erfc(t + dt) < erfc(t));
        }

        #[test]
        fn erfcx_consistent(t in -5.0f64..20.0) {
            let lhs = erfcx(t);
            let rhs = (t * t).exp() * erfc(t);
            prop_assert!(((lhs - rhs) / rhs).abs() < 1e-13);
        }
    }
}
