//! Dirac matrices in the Dirac (Bjorken–Drell) representation, the
//! positive-frequency spin-up spinor u₁(p) and the spin bilinears used by
//! the momentum-space observables.

use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Momentum3 {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl Momentum3 {
    pub const ZERO: Momentum3 = Momentum3 {
        px: 0.0,
        py: 0.0,
        pz: 0.0,
    };

    pub fn new(px: f64, py: f64, pz: f64) -> Self {
        Momentum3 { px, py, pz }
    }

    pub fn from_array(p: [f64; 3]) -> Self {
        Momentum3::new(p[0], p[1], p[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.px, self.py, self.pz]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.px * self.px + self.py * self.py + self.pz * self.pz
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// A four-component complex spinor.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor4(pub [Complex64; 4]);

impl Spinor4 {
    pub const ZERO: Spinor4 = Spinor4([ZERO; 4]);

    pub fn new(c: [Complex64; 4]) -> Self {
        Spinor4(c)
    }

    /// ψ†χ
    pub fn inner(&self, other: &Spinor4) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, s: Complex64) -> Spinor4 {
        Spinor4(self.0.map(|c| c * s))
    }

    /// ψ† M ψ, real part (all bilinears used here are Hermitian forms).
    pub fn bilinear(&self, m: &Mat4) -> f64 {
        self.inner(&(m * self)).re
    }

    pub fn max_abs_diff(&self, other: &Spinor4) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Spinor4 {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for Spinor4 {
    type Output = Spinor4;
    fn add(self, rhs: Spinor4) -> Spinor4 {
        Spinor4(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Spinor4 {
    type Output = Spinor4;
    fn sub(self, rhs: Spinor4) -> Spinor4 {
        Spinor4(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

/// A 4×4 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat4 {
    pub const ZERO: Mat4 = Mat4([[ZERO; 4]; 4]);

    pub fn identity() -> Mat4 {
        Mat4::diagonal([ONE; 4])
    }

    pub fn diagonal(d: [Complex64; 4]) -> Mat4 {
        let mut m = Mat4::ZERO;
        for i in 0..4 {
            m.0[i][i] = d[i];
        }
        m
    }

    /// Block matrix [[a, b], [c, d]] from 2×2 blocks.
    pub fn from_blocks(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2], c: [[Complex64; 2]; 2], d: [[Complex64; 2]; 2]) -> Mat4 {
        let mut m = Mat4::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a[i][j];
                m.0[i][j + 2] = b[i][j];
                m.0[i + 2][j] = c[i][j];
                m.0[i + 2][j + 2] = d[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Mat4 {
        Mat4(self.0.map(|row| row.map(|c| c * s)))
    }

    pub fn adjoint(&self) -> Mat4 {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i].conj())))
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }
}

impl Mul for &Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: &Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..4).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
        }))
    }
}

impl Mul<&Spinor4> for &Mat4 {
    type Output = Spinor4;
    fn mul(self, rhs: &Spinor4) -> Spinor4 {
        Spinor4(std::array::from_fn(|i| (0..4).map(|k| self.0[i][k] * rhs.0[k]).sum()))
    }
}

impl Add for &Mat4 {
    type Output = Mat4;
    fn add(self, rhs: &Mat4) -> Mat4 {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + rhs.0[i][j])))
    }
}

type Block = [[Complex64; 2]; 2];

pub fn pauli() -> [Block; 3] {
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

fn neg(b: Block) -> Block {
    b.map(|row| row.map(|c| -c))
}

const ZERO_BLOCK: Block = [[ZERO; 2]; 2];

/// γ⁰, γⁱ, αⁱ = γ⁰γⁱ and the block-diagonal spin matrices Σⁱ.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracMatrices {
    pub gamma0: Mat4,
    pub gamma: [Mat4; 3],
    pub alpha: [Mat4; 3],
    pub sigma: [Mat4; 3],
}

impl DiracMatrices {
    pub fn dirac() -> Self {
        let s = pauli();
        let gamma0 = Mat4::diagonal([ONE, ONE, -ONE, -ONE]);
        let gamma = s.map(|si| Mat4::from_blocks(ZERO_BLOCK, si, neg(si), ZERO_BLOCK));
        let alpha = s.map(|si| Mat4::from_blocks(ZERO_BLOCK, si, si, ZERO_BLOCK));
        let sigma = s.map(|si| Mat4::from_blocks(si, ZERO_BLOCK, ZERO_BLOCK, si));
        DiracMatrices {
            gamma0,
            gamma,
            alpha,
            sigma,
        }
    }

    /// The free Dirac Hamiltonian α·p + β at momentum p.
    pub fn hamiltonian(&self, p: &Momentum3) -> Mat4 {
        let pa = p.as_array();
        let mut h = self.gamma0;
        for (i, a) in self.alpha.iter().enumerate() {
            h = &h + &a.scale(Complex64::new(pa[i], 0.0));
        }
        h
    }
}

impl Default for DiracMatrices {
    fn default() -> Self {
        Self::dirac()
    }
}

/// E(p) = sqrt(|p|² + 1) in units of mc².
pub fn energy(p: &Momentum3) -> f64 {
    energy_of_magnitude(p.norm())
}

pub fn energy_of_magnitude(p: f64) -> f64 {
    (p * p + 1.0).sqrt()
}

/// The normalized positive-frequency spinor with spin up along z.
pub fn u1(p: &Momentum3) -> Spinor4 {
    let e = energy(p);
    let norm = 1.0 / (2.0 * e * (e + 1.0)).sqrt();
    Spinor4([
        Complex64::new((e + 1.0) * norm, 0.0),
        ZERO,
        Complex64::new(p.pz * norm, 0.0),
        Complex64::new(p.px * norm, p.py * norm),
    ])
}

/// u₁†(p) Σ_z u₁(p) in closed form.
pub fn bilinear_sigma_z(p: &Momentum3) -> f64 {
    let e = energy(p);
    let aniso = p.pz * p.pz - p.px * p.px - p.py * p.py;
    ((e + 1.0) * (e + 1.0) + aniso) / (2.0 * e * (e + 1.0))
}

/// u₁†(p) γ⁰Σ_z u₁(p) in closed form.
pub fn bilinear_gamma0_sigma_z(p: &Momentum3) -> f64 {
    let e = energy(p);
    let aniso = p.pz * p.pz - p.px * p.px - p.py * p.py;
    ((e + 1.0) * (e + 1.0) - aniso) / (2.0 * e * (e + 1.0))
}

/// Average of [`bilinear_sigma_z`] over directions at fixed |p|.
///
/// The angular mean of p_z² − p_x² − p_y² is −|p|²/3 and |p|² = (E−1)(E+1),
/// which collapses the ratio to (E + 2)/(3E).
pub fn sigma_z_direction_average(p: f64) -> f64 {
    let e = energy_of_magnitude(p);
    (e + 2.0) / (3.0 * e)
}

/// Average of [`bilinear_gamma0_sigma_z`] over directions: (2E + 1)/(3E).
pub fn gamma0_sigma_z_direction_average(p: f64) -> f64 {
    let e = energy_of_magnitude(p);
    (2.0 * e + 1.0) / (3.0 * e)
}

/// Matrix-product evaluation of u₁† M u₁, the ground truth for the closed forms.
pub fn bilinear_matrix(p: &Momentum3, m: &Mat4) -> f64 {
    u1(p).bilinear(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    fn arb_momentum(max: f64) -> impl Strategy<Value = Momentum3> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, 0.0..max).prop_filter_map("nonzero direction", |(x, y, z, r)| {
            let n = (x * x + y * y + z * z).sqrt();
            (n > 1e-3).then(|| Momentum3::new(r * x / n, r * y / n, r * z / n))
        })
    }

    #[test]
    fn energy_values() {
        assert_eq!(energy(&Momentum3::ZERO), 1.0);
        assert!((energy(&Momentum3::new(0.0, 0.0, 1.0)) - SQRT_2).abs() < 1e-15);
        // sqrt(10001) = 100.004999875...
        assert!((energy(&Momentum3::new(100.0, 0.0, 0.0)) - 100.004_999_875_006_25).abs() < 1e-12);
    }

    #[test]
    fn rest_frame_spinor() {
        let u = u1(&Momentum3::ZERO);
        assert_eq!(u, Spinor4([ONE, ZERO, ZERO, ZERO]));
    }

    #[test]
    fn spinor_along_z_at_unit_momentum() {
        let u = u1(&Momentum3::new(0.0, 0.0, 1.0));
        let c0 = ((SQRT_2 + 1.0) / (2.0 * SQRT_2)).sqrt();
        let c2 = 1.0 / (2.0 * SQRT_2 * (SQRT_2 + 1.0)).sqrt();
        assert!((u[0].re - c0).abs() < 1e-15);
        assert_eq!(u[1], ZERO);
        assert!((u[2].re - c2).abs() < 1e-15);
        assert_eq!(u[3], ZERO);
        assert!((u.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_structure() {
        let d = DiracMatrices::dirac();
        assert_eq!(d.gamma0, Mat4::diagonal([ONE, ONE, -ONE, -ONE]));
        let two_i = Mat4::identity().scale(Complex64::new(2.0, 0.0));
        for i in 0..3 {
            assert!(d.alpha[i].max_abs_diff(&(&d.gamma0 * &d.gamma[i])) < 1e-15);
            for j in 0..3 {
                let anti = &(&d.alpha[i] * &d.alpha[j]) + &(&d.alpha[j] * &d.alpha[i]);
                let want = if i == j { two_i } else { Mat4::ZERO };
                assert!(anti.max_abs_diff(&want) < 1e-15, "alpha {i},{j}");
            }
            let beta_alpha = &(&d.gamma0 * &d.alpha[i]) + &(&d.alpha[i] * &d.gamma0);
            assert!(beta_alpha.max_abs_diff(&Mat4::ZERO) < 1e-15);
            assert!(d.sigma[i].max_abs_diff(&d.sigma[i].adjoint()) < 1e-15);
        }
    }

    #[test]
    fn u1_is_positive_frequency_eigenvector() {
        let d = DiracMatrices::dirac();
        let p = Momentum3::new(0.3, -1.2, 2.5);
        let u = u1(&p);
        let hu = &d.hamiltonian(&p) * &u;
        assert!(hu.max_abs_diff(&u.scale(Complex64::new(energy(&p), 0.0))) < 1e-14);
    }

    #[test]
    fn bilinears_at_rest() {
        assert_eq!(bilinear_sigma_z(&Momentum3::ZERO), 1.0);
        assert_eq!(bilinear_gamma0_sigma_z(&Momentum3::ZERO), 1.0);
        assert_eq!(sigma_z_direction_average(0.0), 1.0);
        assert_eq!(gamma0_sigma_z_direction_average(0.0), 1.0);
    }

    #[test]
    fn direction_averages_match_matrix_quadrature() {
        // Oracle: matrix-product bilinear averaged with a Gauss-Legendre x
        // trapezoid rule on the sphere.
        let d = DiracMatrices::dirac();
        let g0s = &d.gamma0 * &d.sigma[2];
        let rule = crate::quadrature::GaussLegendre::new(16);
        let nphi = 16;
        for &pm in &[0.5, 1.0, 3.0, 40.0] {
            let (mut s, mut gs) = (0.0, 0.0);
            for (ct, w) in rule.mapped(-1.0, 1.0) {
                let st = (1.0 - ct * ct).sqrt();
                for k in 0..nphi {
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / nphi as f64;
                    let p = Momentum3::new(pm * st * phi.cos(), pm * st * phi.sin(), pm * ct);
                    s += w * bilinear_matrix(&p, &d.sigma[2]) / (2.0 * nphi as f64);
                    gs += w * bilinear_matrix(&p, &g0s) / (2.0 * nphi as f64);
                }
            }
            assert!((s - sigma_z_direction_average(pm)).abs() < 1e-13, "p={pm}");
            assert!((gs - gamma0_sigma_z_direction_average(pm)).abs() < 1e-13, "p={pm}");
        }
        let e = SQRT_2;
        let want = ((e + 1.0).powi(2) - 1.0 / 3.0) / (2.0 * e * (e + 1.0));
        assert!((sigma_z_direction_average(1.0) - want).abs() < 1e-15);
    }

    #[test]
    fn ultrarelativistic_direction_averages() {
        assert!((sigma_z_direction_average(1e8) - 1.0 / 3.0).abs() < 1e-7);
        assert!((gamma0_sigma_z_direction_average(1e8) - 2.0 / 3.0).abs() < 1e-7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn u1_has_unit_norm(p in arb_momentum(50.0)) {
            prop_assert!((u1(&p).norm_sqr() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn closed_forms_match_matrix_products(p in arb_momentum(50.0)) {
            let d = DiracMatrices::dirac();
            let g0s = &d.gamma0 * &d.sigma[2];
            prop_assert!((bilinear_sigma_z(&p) - bilinear_matrix(&p, &d.sigma[2])).abs() < 1e-12);
            prop_assert!((bilinear_gamma0_sigma_z(&p) - bilinear_matrix(&p, &g0s)).abs() < 1e-12);
        }

        #[test]
        fn z_axis_bilinears_in_unit_interval(pz in -1e3f64..1e3) {
            let p = Momentum3::new(0.0, 0.0, pz);
            let s = bilinear_sigma_z(&p);
            let g = bilinear_gamma0_sigma_z(&p);
            prop_assert!(s > 0.0 && s <= 1.0 + 1e-15);
            prop_assert!(g > 0.0 && g <= 1.0 + 1e-15);
        }
    }
}
