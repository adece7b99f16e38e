//! Pointwise densities of charge, current, energy and momentum, the charge and
//! energy velocities, and the three pieces of the Gordon expansion of the
//! current.
//!
//! Everything is evaluated from a [`PsiJet`] (ψ, ∇ψ, ∂ψ/∂t at one point), so
//! the formulas below are representation-level bilinears with no knowledge of
//! the radial structure. The exception is [`current_density`], which uses the
//! closed azimuthal form J = −2 a b sinθ φ̂.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::packet::{PsiJet, RadialProfiles};
use crate::spinor::{DiracMatrices, Mat4, Spinor4};

pub type Vec3 = [f64; 3];

/// All densities at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub x: Vec3,
    pub rho_q: f64,
    pub current: Vec3,
    pub rho_e: f64,
    pub momentum: Vec3,
    /// J/ρ^q; absent where the charge density vanishes.
    pub v_q: Option<Vec3>,
    /// G/ρ^E; absent where the energy density vanishes.
    pub v_e: Option<Vec3>,
}

/// The convection, spin-curl and time-derivative terms of the current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GordonTerms {
    pub convection: Vec3,
    pub spin_curl: Vec3,
    pub time_derivative: Vec3,
}

impl GordonTerms {
    pub fn sum(&self) -> Vec3 {
        std::array::from_fn(|i| self.convection[i] + self.spin_curl[i] + self.time_derivative[i])
    }
}

/// Precomputed matrix products used by the bilinears.
#[derive(Debug, Clone)]
pub struct Bilinears {
    pub dirac: DiracMatrices,
    /// γ⁰Σ_k
    pub gamma0_sigma: [Mat4; 3],
}

impl Bilinears {
    pub fn new() -> Self {
        let dirac = DiracMatrices::dirac();
        let gamma0_sigma = dirac.sigma.map(|s| &dirac.gamma0 * &s);
        Bilinears { dirac, gamma0_sigma }
    }
}

impl Default for Bilinears {
    fn default() -> Self {
        Self::new()
    }
}

fn sandwich(left: &Spinor4, m: &Mat4, right: &Spinor4) -> Complex64 {
    left.inner(&(m * right))
}

/// ∇ × V where ∂_j V_k = 2 Re(ψ† M_k ∂_jψ) for Hermitian M_k.
fn curl_of_bilinear(jet: &PsiJet, m: &[Mat4; 3]) -> Vec3 {
    let d = |j: usize, k: usize| 2.0 * sandwich(&jet.psi, &m[k], &jet.grad[j]).re;
    [d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)]
}

pub fn charge_density_at(jet: &PsiJet) -> f64 {
    -jet.psi.norm_sqr()
}

/// J = −ψ†αψ by explicit matrix products.
pub fn current_density_at(jet: &PsiJet, b: &Bilinears) -> Vec3 {
    b.dirac.alpha.each_ref().map(|a| -jet.psi.bilinear(a))
}

/// ρ^E = (i/2)(ψ†ψ̇ − ψ̇†ψ) = −Im(ψ†ψ̇)
pub fn energy_density_at(jet: &PsiJet) -> f64 {
    -jet.psi.inner(&jet.psi_dot).im
}

/// ρ^E = ψ†γ⁰ψ + (1/2i)[ψ†α·∇ψ − (∇ψ†)·αψ], the form that uses the Dirac
/// equation to trade ∂ψ/∂t for spatial derivatives.
pub fn energy_density_spatial_at(jet: &PsiJet, b: &Bilinears) -> f64 {
    let mass = jet.psi.bilinear(&b.dirac.gamma0);
    let kinetic: f64 = (0..3).map(|j| sandwich(&jet.psi, &b.dirac.alpha[j], &jet.grad[j]).im).sum();
    mass + kinetic
}

/// G = (1/2i)[ψ†∇ψ − (∇ψ†)ψ] + (1/4)∇×(ψ†Σψ)
pub fn momentum_density_at(jet: &PsiJet, b: &Bilinears) -> Vec3 {
    let curl = curl_of_bilinear(jet, &b.dirac.sigma);
    std::array::from_fn(|j| jet.psi.inner(&jet.grad[j]).im + 0.25 * curl[j])
}

/// The spin part (1/4)∇×(ψ†Σψ) of the momentum density alone.
pub fn spin_momentum_density_at(jet: &PsiJet, b: &Bilinears) -> Vec3 {
    curl_of_bilinear(jet, &b.dirac.sigma).map(|c| 0.25 * c)
}

/// The Gordon expansion of J = −ψ†αψ:
///
/// ```text
/// J = (i/2){ψ†γ⁰∇ψ − (∇ψ†)γ⁰ψ} − (1/2)∇×(ψ†γ⁰Σψ) + (i/2)∂_t(ψ†γψ)
/// ```
pub fn gordon_terms_at(jet: &PsiJet, b: &Bilinears) -> GordonTerms {
    let convection = std::array::from_fn(|j| -sandwich(&jet.psi, &b.dirac.gamma0, &jet.grad[j]).im);
    let spin_curl = curl_of_bilinear(jet, &b.gamma0_sigma).map(|c| -0.5 * c);
    let time_derivative = std::array::from_fn(|j| -sandwich(&jet.psi, &b.dirac.gamma[j], &jet.psi_dot).im);
    GordonTerms {
        convection,
        spin_curl,
        time_derivative,
    }
}

fn divide(v: Vec3, s: f64) -> Option<Vec3> {
    (s != 0.0 && s.is_finite()).then(|| v.map(|c| c / s))
}

pub fn sample_at(jet: &PsiJet, b: &Bilinears) -> DensitySample {
    let rho_q = charge_density_at(jet);
    let current = current_density_at(jet, b);
    let rho_e = energy_density_at(jet);
    let momentum = momentum_density_at(jet, b);
    DensitySample {
        x: jet.x,
        rho_q,
        current,
        rho_e,
        momentum,
        v_q: divide(current, rho_q),
        v_e: divide(momentum, rho_e),
    }
}

/// ρ^q = −(a² + b²)
pub fn charge_density(profiles: &RadialProfiles, x: Vec3) -> Result<f64> {
    let r = crate::packet::norm3(x);
    let v = profiles.values(r)?;
    let b = v.b(r);
    Ok(-(v.a * v.a + b * b))
}

/// Closed form J = −2 a b sinθ φ̂ = 2aβ (y, −x, 0) with β = b/r.
pub fn current_density(profiles: &RadialProfiles, x: Vec3) -> Result<Vec3> {
    let v = profiles.values(crate::packet::norm3(x))?;
    let s = 2.0 * v.a * v.beta;
    Ok([s * x[1], -s * x[0], 0.0])
}

/// −ψ†αψ by matrix products, the check on the closed form.
pub fn current_density_matrix(profiles: &RadialProfiles, x: Vec3) -> Result<Vec3> {
    Ok(current_density_at(&profiles.jet(x)?, &Bilinears::new()))
}

/// v^q = J/ρ^q, bounded by c.
pub fn charge_velocity(profiles: &RadialProfiles, x: Vec3) -> Result<Vec3> {
    let rho = charge_density(profiles, x)?;
    let j = current_density(profiles, x)?;
    let floor = profiles.noise_floor().powi(2);
    let rho = if rho.abs() <= floor { 0.0 } else { rho };
    divide(j, rho).ok_or(Error::UndefinedVelocity {
        x: x[0],
        y: x[1],
        z: x[2],
    })
}

pub fn energy_density(profiles: &RadialProfiles, x: Vec3) -> Result<f64> {
    Ok(energy_density_at(&profiles.jet(x)?))
}

pub fn energy_density_spatial(profiles: &RadialProfiles, x: Vec3) -> Result<f64> {
    Ok(energy_density_spatial_at(&profiles.jet(x)?, &Bilinears::new()))
}

pub fn momentum_density(profiles: &RadialProfiles, x: Vec3) -> Result<Vec3> {
    Ok(momentum_density_at(&profiles.jet(x)?, &Bilinears::new()))
}

pub fn gordon_terms(profiles: &RadialProfiles, x: Vec3) -> Result<GordonTerms> {
    Ok(gordon_terms_at(&profiles.jet(x)?, &Bilinears::new()))
}

pub fn sample(profiles: &RadialProfiles, x: Vec3) -> Result<DensitySample> {
    Ok(sample_at(&profiles.jet(x)?, &Bilinears::new()))
}

pub fn norm(v: Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packet::{PacketSpec, QuadratureConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn profiles(n: f64) -> RadialProfiles {
        RadialProfiles::build(&PacketSpec::new(n).unwrap(), &QuadratureConfig::default()).unwrap()
    }

    fn random_points(count: usize, radius: f64, seed: u64) -> Vec<Vec3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let r = radius * rng.random::<f64>().cbrt();
                let ct: f64 = rng.random_range(-1.0..1.0);
                let phi = rng.random_range(0.0..2.0 * PI);
                let st = (1.0 - ct * ct).sqrt();
                [r * st * phi.cos(), r * st * phi.sin(), r * ct]
            })
            .collect()
    }

    fn rel_diff(a: Vec3, b: Vec3) -> f64 {
        norm(std::array::from_fn(|i| a[i] - b[i])) / norm(b).max(1e-300)
    }

    #[test]
    fn charge_density_is_spherical_and_matches_psi() {
        let p = profiles(1.0);
        let r = 0.8;
        let base = charge_density(&p, [0.0, 0.0, r]).unwrap();
        assert!(base < 0.0);
        for x in random_points(20, 1.0, 3) {
            let scale = r / norm(x);
            let y = x.map(|c| c * scale);
            assert!((charge_density(&p, y).unwrap() - base).abs() < 1e-10 * base.abs());
            let psi = p.evaluate_psi(x).unwrap();
            assert!((charge_density(&p, x).unwrap() + psi.norm_sqr()).abs() < 1e-12 * psi.norm_sqr());
        }
    }

    #[test]
    fn large_n_charge_is_concentrated_inside_compton_radius() {
        let p = profiles(100.0);
        let centre = charge_density(&p, [0.0; 3]).unwrap();
        let at_compton = charge_density(&p, [1.0, 0.0, 0.0]).unwrap();
        assert!(at_compton.abs() < 1e-3 * centre.abs());
    }

    #[test]
    fn current_is_azimuthal_and_matches_matrix_form() {
        let p = profiles(1.0);
        for x in random_points(100, 3.0, 5) {
            let j = current_density(&p, x).unwrap();
            let jm = current_density_matrix(&p, x).unwrap();
            assert!(norm(std::array::from_fn(|i| j[i] - jm[i])) <= 1e-10 * norm(jm).max(1e-12));
            assert_eq!(j[2], 0.0);
            assert!((j[0] * x[0] + j[1] * x[1] + j[2] * x[2]).abs() < 1e-14);
        }
        assert_eq!(current_density(&p, [0.0, 0.0, 0.9]).unwrap(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn charge_velocity_is_subluminal_and_saturates_where_a_equals_b() {
        let p = profiles(100.0);
        for x in random_points(500, 1.0, 9) {
            let v = charge_velocity(&p, x).unwrap();
            assert!(norm(v) <= 1.0 + 1e-12);
        }
        assert_eq!(charge_velocity(&p, [0.0, 0.0, 0.01]).unwrap(), [0.0, 0.0, 0.0]);

        // locate a(r) = b(r) by bisection
        let f = |r: f64| p.a(r).unwrap() - p.b(r).unwrap();
        let (mut lo, mut hi) = (1e-4, 0.05);
        assert!(f(lo) > 0.0 && f(hi) < 0.0, "expected a crossing: {} {}", f(lo), f(hi));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let v = charge_velocity(&p, [lo, 0.0, 0.0]).unwrap();
        assert!((norm(v) - 1.0).abs() < 1e-12, "{}", norm(v));
    }

    #[test]
    fn gordon_terms_sum_to_current() {
        let p = profiles(1.0);
        let b = Bilinears::new();
        for x in random_points(50, 2.5, 11) {
            let jet = p.jet(x).unwrap();
            let g = gordon_terms_at(&jet, &b);
            let j = current_density(&p, x).unwrap();
            assert!(rel_diff(g.sum(), j) < 1e-5, "at {x:?}: {:?} vs {j:?}", g.sum());
        }
        let on_axis = gordon_terms(&p, [0.0, 0.0, 0.4]).unwrap();
        for v in [on_axis.convection, on_axis.spin_curl, on_axis.time_derivative] {
            assert!(v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
        }
    }

    #[test]
    fn energy_density_forms_agree() {
        let b = Bilinears::new();
        for &n in &[0.5, 3.0] {
            let p = profiles(n);
            for x in random_points(20, 1.5 / n, 13) {
                let jet = p.jet(x).unwrap();
                let first = energy_density_at(&jet);
                let second = energy_density_spatial_at(&jet, &b);
                assert!((first - second).abs() < 1e-4 * first.abs(), "n={n} {first} vs {second}");
            }
        }
    }

    #[test]
    fn energy_density_second_form_with_finite_differences() {
        // Oracle: gradients by centred differences of ψ instead of the
        // differentiated interpolant.
        let p = profiles(2.0);
        let b = Bilinears::new();
        for x in random_points(20, 0.8, 17) {
            let mut jet = p.jet(x).unwrap();
            let h = 1e-5;
            for j in 0..3 {
                let (mut xp, mut xm) = (x, x);
                xp[j] += h;
                xm[j] -= h;
                jet.grad[j] = (p.evaluate_psi(xp).unwrap() - p.evaluate_psi(xm).unwrap()).scale(Complex64::new(0.5 / h, 0.0));
            }
            let second = energy_density_spatial_at(&jet, &b);
            let first = energy_density(&p, x).unwrap();
            assert!((first - second).abs() < 1e-4 * first.abs());
        }
    }

    #[test]
    fn momentum_density_matches_finite_difference_gradients() {
        let p = profiles(1.7);
        let b = Bilinears::new();
        for x in random_points(30, 1.5, 19) {
            let g = momentum_density(&p, x).unwrap();
            let mut jet = p.jet(x).unwrap();
            let h = 1e-6;
            for j in 0..3 {
                let (mut xp, mut xm) = (x, x);
                xp[j] += h;
                xm[j] -= h;
                jet.grad[j] = (p.evaluate_psi(xp).unwrap() - p.evaluate_psi(xm).unwrap()).scale(Complex64::new(0.5 / h, 0.0));
            }
            let gfd = momentum_density_at(&jet, &b);
            let scale = norm(gfd).max(1e-3 * p.a(0.0).unwrap().powi(2));
            assert!(norm(std::array::from_fn(|i| g[i] - gfd[i])) < 1e-5 * scale);
        }
        let on_axis = momentum_density(&p, [0.0, 0.0, 0.3]).unwrap();
        assert!(on_axis[0].abs() < 1e-14 && on_axis[1].abs() < 1e-14);
    }

    #[test]
    fn current_is_divergence_free() {
        let p = profiles(1.0);
        let h = 1e-5;
        for x in random_points(20, 2.0, 23) {
            let mut div = 0.0;
            for j in 0..3 {
                let (mut xp, mut xm) = (x, x);
                xp[j] += h;
                xm[j] -= h;
                div += (current_density(&p, xp).unwrap()[j] - current_density(&p, xm).unwrap()[j]) / (2.0 * h);
            }
            assert!(div.abs() < 1e-5, "{div}");
        }
    }

    #[test]
    fn vanishing_density_is_an_error() {
        let spec = PacketSpec::new(1.0).unwrap();
        let cfg = QuadratureConfig {
            r_max: Some(400.0),
            radial_nodes: 400,
            ..Default::default()
        };
        let p = RadialProfiles::build(&spec, &cfg).unwrap();
        match charge_velocity(&p, [399.0, 0.0, 0.0]) {
            Err(Error::UndefinedVelocity { .. }) => {}
            Ok(v) => panic!("expected undefined velocity, got {v:?}"),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn sample_collects_consistent_fields() {
        let p = profiles(1.0);
        let s = sample(&p, [0.3, 0.2, -0.1]).unwrap();
        assert!(s.rho_q < 0.0);
        assert!(s.rho_e > 0.0);
        let v = s.v_q.unwrap();
        assert!((v[0] * s.rho_q - s.current[0]).abs() < 1e-14);
        assert!(norm(s.v_e.unwrap()) <= 1.0 + 1e-9);
    }
}
