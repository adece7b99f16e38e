//! Spherical Bessel functions of the first kind for orders 0, 1, 2.
//!
//! The closed forms `sin x / x`, `sin x / x² − cos x / x`, ... lose digits to
//! cancellation near the origin, so small arguments go through the power
//! series `j_l(x) = x^l Σ_k (−x²/2)^k / (k! (2l+2k+1)!!)`.

const J0_SERIES_BELOW: f64 = 1e-2;
const J1_SERIES_BELOW: f64 = 0.5;
const J2_SERIES_BELOW: f64 = 1.0;

/// `j_l(x) / x^l` by its power series. Valid (and used) for |x| ≲ 1.
fn reduced_series(l: u32, x: f64) -> f64 {
    let x2 = x * x;
    let mut double_fact = 1.0;
    for k in 1..=l {
        double_fact *= (2 * k + 1) as f64;
    }
    let mut term = 1.0 / double_fact;
    let mut sum = term;
    for k in 1..40 {
        let k = k as f64;
        term *= -x2 / (2.0 * k * (2.0 * (l as f64) + 2.0 * k + 1.0));
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn j0(x: f64) -> f64 {
    if x.abs() < J0_SERIES_BELOW {
        reduced_series(0, x)
    } else {
        x.sin() / x
    }
}

pub fn j1(x: f64) -> f64 {
    if x.abs() < J1_SERIES_BELOW {
        x * reduced_series(1, x)
    } else {
        let (s, c) = x.sin_cos();
        (s / x - c) / x
    }
}

pub fn j2(x: f64) -> f64 {
    if x.abs() < J2_SERIES_BELOW {
        x * x * reduced_series(2, x)
    } else {
        let (s, c) = x.sin_cos();
        let inv = 1.0 / x;
        (3.0 * inv * inv - 1.0) * s * inv - 3.0 * c * inv * inv
    }
}

/// `j1(x) / x`, finite at the origin (→ 1/3).
pub fn j1_over_x(x: f64) -> f64 {
    if x.abs() < J1_SERIES_BELOW {
        reduced_series(1, x)
    } else {
        j1(x) / x
    }
}

/// `j2(x) / x`, vanishing linearly at the origin.
pub fn j2_over_x(x: f64) -> f64 {
    if x.abs() < J2_SERIES_BELOW {
        x * reduced_series(2, x)
    } else {
        j2(x) / x
    }
}

/// j0, j1/x, j1 and j2/x at one argument, sharing a single `sin_cos`.
#[derive(Debug, Clone, Copy)]
pub struct BesselSet {
    pub j0: f64,
    pub j1: f64,
    pub j1_over_x: f64,
    pub j2_over_x: f64,
}

impl BesselSet {
    pub fn at(x: f64) -> Self {
        if x.abs() < J2_SERIES_BELOW {
            return BesselSet {
                j0: j0(x),
                j1: j1(x),
                j1_over_x: j1_over_x(x),
                j2_over_x: j2_over_x(x),
            };
        }
        let (s, c) = x.sin_cos();
        let inv = 1.0 / x;
        let j0 = s * inv;
        let j1 = (j0 - c) * inv;
        let j2 = 3.0 * j1 * inv - j0;
        BesselSet {
            j0,
            j1,
            j1_over_x: j1 * inv,
            j2_over_x: j2 * inv,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from the closed forms evaluated in extended precision.
    #[test]
    fn known_values() {
        assert!((j0(1.0) - 0.841_470_984_807_896_5).abs() < 1e-15);
        assert!((j1(1.0) - 0.301_168_678_939_756_8).abs() < 1e-15);
        assert!((j2(1.0) - 0.062_035_052_011_373_86).abs() < 1e-15);
        assert!((j1(10.0) - 0.078_466_941_798_751_24).abs() < 1e-15);
        assert!((j2(10.0) - 0.077_942_193_628_562_45).abs() < 1e-15);
    }

    #[test]
    fn origin_limits() {
        assert_eq!(j0(0.0), 1.0);
        assert_eq!(j1(0.0), 0.0);
        assert_eq!(j2(0.0), 0.0);
        assert!((j1_over_x(0.0) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(j2_over_x(0.0), 0.0);
    }

    #[test]
    fn series_matches_leading_terms_at_tiny_argument() {
        let x = 1e-6;
        assert!((j1(x) / (x / 3.0) - 1.0).abs() < 1e-12);
        assert!((j2(x) / (x * x / 15.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn series_and_closed_forms_agree_at_switch_points() {
        for &x in &[J0_SERIES_BELOW, J1_SERIES_BELOW, J2_SERIES_BELOW] {
            let (s, c) = x.sin_cos();
            let closed = [s / x, (s / x - c) / x, (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x)];
            for l in 0..3u32 {
                let series = x.powi(l as i32) * reduced_series(l, x);
                let tol = if l == 2 && x < 0.1 { 1e-10 } else { 1e-14 };
                assert!((series - closed[l as usize]).abs() < tol, "l = {l}, x = {x}");
            }
        }
    }

    #[test]
    fn recurrence_and_derivative_identities() {
        // j0 + j2 = 3 j1 / x and d/dx (j1/x) = -j2/x
        for i in 1..200 {
            let x = 0.05 * i as f64;
            assert!((j0(x) + j2(x) - 3.0 * j1(x) / x).abs() < 1e-13);
            let h = 1e-5;
            let fd = (j1_over_x(x + h) - j1_over_x(x - h)) / (2.0 * h);
            assert!((fd + j2_over_x(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn bessel_set_matches_scalar_functions() {
        for i in 0..500 {
            let x = 0.037 * i as f64;
            let s = BesselSet::at(x);
            assert!((s.j0 - j0(x)).abs() < 1e-14);
            assert!((s.j1 - j1(x)).abs() < 1e-14);
            assert!((s.j1_over_x - j1_over_x(x)).abs() < 1e-14);
            assert!((s.j2_over_x - j2_over_x(x)).abs() < 1e-14);
        }
    }
}
