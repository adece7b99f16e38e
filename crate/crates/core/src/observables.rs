//! Scalar observables of ψ_n in reporting units.
//!
//! Most quantities have two routes: a momentum-space integral over |f_n|²
//! with closed-form spinor bilinears, and a position-space integral over the
//! radial profiles. The position-space integrals over (r, θ) use the axial
//! symmetry of every density here; the azimuth contributes a factor 2π.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::densities::{self, Bilinears};
use crate::error::{Error, Result};
use crate::packet::{momentum_breaks, PacketSpec, PsiJet, QuadratureConfig, RadialProfiles};
use crate::quadrature::{integrate_scalar, GaussLegendre, Tolerance};
use crate::spinor::{energy_of_magnitude, gamma0_sigma_z_direction_average, sigma_z_direction_average};
use crate::units::{to_bohr_magnetons, to_hbar_halves};

/// A value with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn scaled(self, s: f64) -> Self {
        Estimate::new(self.value * s, self.error * s.abs())
    }

    pub fn relative_error(&self) -> f64 {
        self.error / self.value.abs().max(f64::MIN_POSITIVE)
    }
}

/// The reported scalars, in the order they appear in tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Observable {
    TotalCharge,
    MeanSquareRadius,
    MuTotal,
    MuSpin,
    LTotal,
    LSpin,
    EnergyTotal,
    XQx,
    XPx,
}

impl Observable {
    pub const ALL: [Observable; 9] = [
        Observable::TotalCharge,
        Observable::MeanSquareRadius,
        Observable::MuTotal,
        Observable::MuSpin,
        Observable::LTotal,
        Observable::LSpin,
        Observable::EnergyTotal,
        Observable::XQx,
        Observable::XPx,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Observable::TotalCharge => "total_charge",
            Observable::MeanSquareRadius => "mean_square_radius",
            Observable::MuTotal => "mu_total",
            Observable::MuSpin => "mu_spin",
            Observable::LTotal => "L_total",
            Observable::LSpin => "L_spin",
            Observable::EnergyTotal => "energy_total",
            Observable::XQx => "xQx",
            Observable::XPx => "xPx",
        }
    }

    pub fn needs_profiles(&self) -> bool {
        !matches!(self, Observable::MuSpin | Observable::LSpin | Observable::EnergyTotal | Observable::XQx)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Observable::ALL
            .iter()
            .copied()
            .find(|o| o.key().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let known: Vec<_> = Observable::ALL.iter().map(|o| o.key()).collect();
                Error::invalid("observables", format!("unknown observable `{s}` (expected one of {})", known.join(", ")))
            })
    }
}

/// All scalar results for one n, in reporting units: charge in e, lengths in
/// Compton radii, moments in Bohr magnetons, angular momenta in ħ/2 and
/// energy in mc². Entries not requested are `None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObservableSet {
    pub n: f64,
    pub total_charge: Option<Estimate>,
    pub mean_square_radius: Option<Estimate>,
    pub mu_total: Option<Estimate>,
    pub mu_spin: Option<Estimate>,
    pub l_total: Option<Estimate>,
    pub l_spin: Option<Estimate>,
    pub energy_total: Option<Estimate>,
    pub x_qx: Option<Estimate>,
    pub x_px: Option<Estimate>,
}

impl ObservableSet {
    pub fn get(&self, o: Observable) -> Option<Estimate> {
        match o {
            Observable::TotalCharge => self.total_charge,
            Observable::MeanSquareRadius => self.mean_square_radius,
            Observable::MuTotal => self.mu_total,
            Observable::MuSpin => self.mu_spin,
            Observable::LTotal => self.l_total,
            Observable::LSpin => self.l_spin,
            Observable::EnergyTotal => self.energy_total,
            Observable::XQx => self.x_qx,
            Observable::XPx => self.x_px,
        }
    }

    fn slot(&mut self, o: Observable) -> &mut Option<Estimate> {
        match o {
            Observable::TotalCharge => &mut self.total_charge,
            Observable::MeanSquareRadius => &mut self.mean_square_radius,
            Observable::MuTotal => &mut self.mu_total,
            Observable::MuSpin => &mut self.mu_spin,
            Observable::LTotal => &mut self.l_total,
            Observable::LSpin => &mut self.l_spin,
            Observable::EnergyTotal => &mut self.energy_total,
            Observable::XQx => &mut self.x_qx,
            Observable::XPx => &mut self.x_px,
        }
    }

    /// Compute every observable for one n.
    pub fn compute_all(spec: &PacketSpec, cfg: &QuadratureConfig) -> Result<Self> {
        Self::compute(spec, cfg, &Observable::ALL)
    }

    /// Compute only the requested observables; the radial profiles are built
    /// only when one of them needs position space.
    pub fn compute(spec: &PacketSpec, cfg: &QuadratureConfig, which: &[Observable]) -> Result<Self> {
        cfg.validate()?;
        let profiles = if which.iter().any(Observable::needs_profiles) {
            Some(RadialProfiles::build(spec, cfg)?)
        } else {
            None
        };
        Self::compute_with(spec, profiles.as_ref(), cfg, which)
    }

    pub fn compute_with(spec: &PacketSpec, profiles: Option<&RadialProfiles>, cfg: &QuadratureConfig, which: &[Observable]) -> Result<Self> {
        let mut out = ObservableSet {
            n: spec.n(),
            ..Default::default()
        };
        let need = |o: Observable| which.contains(&o);
        let prof = || {
            profiles.ok_or_else(|| Error::invalid("profiles", "radial profiles are required for position-space observables"))
        };
        let mut msr = None;
        let mut xqx = None;
        for &o in Observable::ALL.iter().filter(|o| need(**o)) {
            let est = match o {
                Observable::TotalCharge => total_charge(prof()?, cfg)?,
                Observable::MeanSquareRadius => *msr.insert(mean_square_radius(prof()?, cfg)?),
                Observable::MuTotal => magnetic_moment_total(prof()?, cfg)?,
                Observable::MuSpin => magnetic_moment_spin(spec, cfg)?,
                Observable::LTotal => angular_momentum_total(prof()?, cfg)?,
                Observable::LSpin => angular_momentum_spin(spec, cfg)?,
                Observable::EnergyTotal => energy_total(spec, cfg)?,
                Observable::XQx => *xqx.insert(x_qx(spec, cfg)?),
                Observable::XPx => {
                    let m = match msr {
                        Some(m) => m,
                        None => mean_square_radius(prof()?, cfg)?,
                    };
                    let q = match xqx {
                        Some(q) => q,
                        None => x_qx(spec, cfg)?,
                    };
                    x_px(m, q)
                }
            };
            *out.slot(o) = Some(est);
        }
        Ok(out)
    }

    /// Keys present in this set, in table order.
    pub fn present(&self) -> Vec<Observable> {
        Observable::ALL.iter().copied().filter(|o| self.get(*o).is_some()).collect()
    }

    /// CSV header for the given observables: n, then value/error pairs.
    pub fn csv_header(which: &[Observable]) -> String {
        let mut cols = vec!["n".to_string()];
        for o in which {
            cols.push(o.key().to_string());
            cols.push(format!("{}_err", o.key()));
        }
        cols.join(",")
    }

    /// One CSV row matching [`ObservableSet::csv_header`]; missing entries are empty.
    pub fn csv_row(&self, which: &[Observable]) -> String {
        let mut cols = vec![self.n.to_string()];
        for o in which {
            match self.get(*o) {
                Some(e) => {
                    cols.push(e.value.to_string());
                    cols.push(e.error.to_string());
                }
                None => {
                    cols.push(String::new());
                    cols.push(String::new());
                }
            }
        }
        cols.join(",")
    }
}

/// Flat JSON object: `n`, then `<key>` and `<key>_err` for each present entry.
impl Serialize for ObservableSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let present = self.present();
        let mut map = serializer.serialize_map(Some(1 + 2 * present.len()))?;
        map.serialize_entry("n", &self.n)?;
        for o in present {
            let e = self.get(o).expect("present");
            map.serialize_entry(o.key(), &e.value)?;
            map.serialize_entry(&format!("{}_err", o.key()), &e.error)?;
        }
        map.end()
    }
}

/// 4π ∫₀^{p_max} p² |f_n(p)|² g(p) dp
pub fn momentum_average<G: Fn(f64) -> f64>(spec: &PacketSpec, cfg: &QuadratureConfig, label: &str, g: G) -> Result<Estimate> {
    let p_max = cfg.momentum_cutoff(spec);
    let mut breaks = momentum_breaks(spec, p_max, 0.0);
    // |f|² is twice as narrow as f
    let extra: Vec<f64> = breaks.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    breaks.extend(extra);
    breaks.sort_by(|a, b| a.total_cmp(b));
    let tol = Tolerance::scalar(cfg.rel_tol, cfg.abs_tol, cfg.max_panels);
    let (v, e) = integrate_scalar(label, |p| 4.0 * PI * p * p * spec.density(p) * g(p), &breaks, &tol)?;
    Ok(Estimate::new(v, e))
}

fn check_2d(label: &str, est: Estimate, cfg: &QuadratureConfig) -> Result<Estimate> {
    let allowed = cfg.rel_tol_2d * est.value.abs() + cfg.abs_tol;
    if est.error > allowed || !est.value.is_finite() {
        return Err(Error::NotConverged {
            what: label.to_string(),
            error: est.error,
            tolerance: allowed,
            worst_lo: 0.0,
            worst_hi: f64::INFINITY,
            worst_error: est.error,
        });
    }
    Ok(est)
}

fn radial(profiles: &RadialProfiles, cfg: &QuadratureConfig, label: &str, f: impl FnMut(f64, &crate::packet::RadialValues) -> f64) -> Result<Estimate> {
    let (v, e) = profiles.integrate_radial(cfg.nodes_1d, f)?;
    if !v.is_finite() || e > cfg.rel_tol_2d * v.abs() + cfg.abs_tol {
        return check_2d(label, Estimate::new(v, e), cfg);
    }
    Ok(Estimate::new(v, e))
}

/// ∫ F(x) d³x for an axially symmetric F, as 2π ∫∫ F r² sinθ dr dθ on the
/// x–z half plane. Grid intervals are summed in fixed order, so the result is
/// identical with or without the worker pool.
pub fn integrate_axisymmetric<F>(profiles: &RadialProfiles, cfg: &QuadratureConfig, label: &str, f: F) -> Result<Estimate>
where
    F: Fn(&PsiJet) -> f64 + Sync,
{
    let rules = [
        (GaussLegendre::new(cfg.nodes_1d), GaussLegendre::new(cfg.theta_nodes)),
        (GaussLegendre::new(cfg.nodes_1d - 2), GaussLegendre::new(cfg.theta_nodes - 6)),
    ];
    let grid = *profiles.grid();
    let interval = |k: usize| -> Result<[f64; 2]> {
        let (r0, r1) = (grid.node(k), grid.node(k + 1));
        let mut sums = [0.0; 2];
        for (slot, (radial_rule, polar_rule)) in rules.iter().enumerate() {
            for (r, wr) in radial_rule.mapped(r0, r1) {
                for (theta, wt) in polar_rule.mapped(0.0, PI) {
                    let (st, ct) = theta.sin_cos();
                    let jet = profiles.jet([r * st, 0.0, r * ct])?;
                    sums[slot] += wr * wt * r * r * st * f(&jet);
                }
            }
        }
        Ok(sums)
    };
    let count = grid.count - 1;
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<[f64; 2]>> = {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(interval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<[f64; 2]>> = (0..count).map(interval).collect();

    let mut totals = [0.0; 2];
    for p in parts {
        let p = p?;
        totals[0] += p[0];
        totals[1] += p[1];
    }
    let est = Estimate::new(2.0 * PI * totals[0], 2.0 * PI * (totals[0] - totals[1]).abs());
    check_2d(label, est, cfg)
}

/// ∫ρ^q d³x in units of e (−1 for a normalized state).
pub fn total_charge(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<Estimate> {
    let est = radial(profiles, cfg, "total charge", |r, v| {
        let b = v.b(r);
        (v.a * v.a + b * b) * r * r
    })?;
    Ok(est.scaled(-4.0 * PI))
}

/// ⟨|x|²⟩ = 4π ∫ (a² + b²) r⁴ dr, in Compton radii squared.
pub fn mean_square_radius(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<Estimate> {
    let est = radial(profiles, cfg, "mean square radius", |r, v| {
        let b = v.b(r);
        (v.a * v.a + b * b) * r.powi(4)
    })?;
    Ok(est.scaled(4.0 * PI))
}

/// z component of (1/2)∫x × J d³x in internal units.
///
/// With J = −2ab sinθ φ̂ the angular integral is elementary and
/// m_z = −(8π/3) ∫ a b r³ dr.
pub fn magnetic_moment_z(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<Estimate> {
    let est = radial(profiles, cfg, "magnetic moment", |r, v| v.a * v.beta * r.powi(4))?;
    Ok(est.scaled(-8.0 * PI / 3.0))
}

/// Total magnetic moment in Bohr magnetons, counted along −z (the direction
/// it points for a spin-up electron), so the familiar value is +1.
pub fn magnetic_moment_total(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<Estimate> {
    Ok(magnetic_moment_z(profiles, cfg)?.scaled(-to_bohr_magnetons(1.0)))
}

/// Spin magnetic moment −(1/2)∫ψ†γ⁰Σ_zψ, evaluated in momentum space and
/// reported like [`magnetic_moment_total`].
pub fn magnetic_moment_spin(spec: &PacketSpec, cfg: &QuadratureConfig) -> Result<Estimate> {
    let est = momentum_average(spec, cfg, "spin magnetic moment", gamma0_sigma_z_direction_average)?;
    Ok(est.scaled(0.5 * to_bohr_magnetons(1.0)))
}

/// The spin magnetic moment from the position-space density
/// −(1/2)ψ†γ⁰Σ_zψ, in the same reporting convention.
pub fn magnetic_moment_spin_position(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<Estimate> {
    let b = Bilinears::new();
    let est = integrate_axisymmetric(profiles, cfg, "spin magnetic moment (position space)", |jet| {
        jet.psi.bilinear(&b.gamma0_sigma[2])
    })?;
    Ok(est.scaled(0.5 * to_bohr_magnetons(1.0)))
}

/// (x × G)_z at a point of the x–z half plane, where y = 0.
fn angular_momentum_density_z(jet: &PsiJet, b: &Bilinears) -> f64 {
    let g = densities::momentum_density_at(jet, b);
    jet.x[0] * g[1] - jet.x[1] * g[0]
}

/// L_z = ∫(x × G)_z d³x in units of ħ/2, by quadrature of the momentum density.
pub fn angular_momentum_total(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<Estimate> {
    let b = Bilinears::new();
    let est = integrate_axisymmetric(profiles, cfg, "total angular momentum", |jet| angular_momentum_density_z(jet, &b))?;
    Ok(est.scaled(to_hbar_halves(1.0)))
}

/// All three components of ∫x × G d³x (ħ/2 units), with the azimuth sampled
/// by a trapezoid rule instead of being assumed symmetric.
pub fn angular_momentum_vector(profiles: &RadialProfiles, cfg: &QuadratureConfig, phi_nodes: usize) -> Result<[f64; 3]> {
    let b = Bilinears::new();
    let radial_rule = GaussLegendre::new(cfg.nodes_1d);
    let polar_rule = GaussLegendre::new(cfg.theta_nodes);
    let grid = profiles.grid();
    let mut total = [0.0; 3];
    for k in 0..grid.count - 1 {
        for (r, wr) in radial_rule.mapped(grid.node(k), grid.node(k + 1)) {
            for (theta, wt) in polar_rule.mapped(0.0, PI) {
                let (st, ct) = theta.sin_cos();
                for m in 0..phi_nodes {
                    let phi = 2.0 * PI * m as f64 / phi_nodes as f64;
                    let x = [r * st * phi.cos(), r * st * phi.sin(), r * ct];
                    let g = densities::momentum_density_at(&profiles.jet(x)?, &b);
                    let l = [x[1] * g[2] - x[2] * g[1], x[2] * g[0] - x[0] * g[2], x[0] * g[1] - x[1] * g[0]];
                    let w = wr * wt * r * r * st * 2.0 * PI / phi_nodes as f64;
                    for i in 0..3 {
                        total[i] += w * l[i];
                    }
                }
            }
        }
    }
    Ok(total.map(to_hbar_halves))
}

/// Spin angular momentum (1/2)∫ψ†Σ_zψ in units of ħ/2, from momentum space.
pub fn angular_momentum_spin(spec: &PacketSpec, cfg: &QuadratureConfig) -> Result<Estimate> {
    let est = momentum_average(spec, cfg, "spin angular momentum", sigma_z_direction_average)?;
    Ok(est.scaled(to_hbar_halves(0.5)))
}

/// The same quantity by position-space quadrature of (1/2)ψ†Σ_zψ.
pub fn angular_momentum_spin_position(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<Estimate> {
    let b = Bilinears::new();
    let est = integrate_axisymmetric(profiles, cfg, "spin angular momentum (position space)", |jet| {
        jet.psi.bilinear(&b.dirac.sigma[2])
    })?;
    Ok(est.scaled(to_hbar_halves(0.5)))
}

/// ∫|f_n|² E(p) d³p in units of mc².
pub fn energy_total(spec: &PacketSpec, cfg: &QuadratureConfig) -> Result<Estimate> {
    momentum_average(spec, cfg, "total energy", energy_of_magnitude)
}

/// ∫(i/2)(ψ†ψ̇ − ψ̇†ψ) d³x by position-space quadrature.
pub fn energy_total_position(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<Estimate> {
    integrate_axisymmetric(profiles, cfg, "total energy (position space)", densities::energy_density_at)
}

/// ⟨x·Q̂x⟩, the negative-frequency part of the mean square radius:
///
/// ```text
/// ∫ d³p |f_n|² (1/2E)² [3 − 2p²/(E(E+1)) + p⁴/(E(E+1))²]
/// ```
pub fn x_qx(spec: &PacketSpec, cfg: &QuadratureConfig) -> Result<Estimate> {
    momentum_average(spec, cfg, "x.Qx", x_qx_integrand)
}

pub fn x_qx_integrand(p: f64) -> f64 {
    let e = energy_of_magnitude(p);
    let k = p * p / (e * (e + 1.0));
    (3.0 - 2.0 * k + k * k) / (4.0 * e * e)
}

/// ⟨x·P̂x⟩ = ⟨|x|²⟩ − ⟨x·Q̂x⟩.
pub fn x_px(mean_square_radius: Estimate, x_qx: Estimate) -> Estimate {
    Estimate::new(mean_square_radius.value - x_qx.value, mean_square_radius.error + x_qx.error)
}

/// ⟨z⟩ = ∫ z ψ†ψ d³x; zero for these parity-symmetric densities.
pub fn center_of_charge_z(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<f64> {
    let b = Bilinears::new();
    let rule = GaussLegendre::new(cfg.nodes_1d);
    let polar = GaussLegendre::new(cfg.theta_nodes);
    let grid = profiles.grid();
    let mut total = 0.0;
    for k in 0..grid.count - 1 {
        for (r, wr) in rule.mapped(grid.node(k), grid.node(k + 1)) {
            for (theta, wt) in polar.mapped(0.0, PI) {
                let (st, ct) = theta.sin_cos();
                let jet = profiles.jet([r * st, 0.0, r * ct])?;
                total += wr * wt * r * r * st * jet.x[2] * -densities::charge_density_at(&jet);
            }
        }
    }
    let _ = &b;
    Ok(2.0 * PI * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: f64) -> PacketSpec {
        PacketSpec::new(n).unwrap()
    }

    fn profiles(n: f64) -> RadialProfiles {
        RadialProfiles::build(&spec(n), &QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn observable_keys_round_trip() {
        for o in Observable::ALL {
            assert_eq!(o.key().parse::<Observable>().unwrap(), o);
        }
        assert!("mu_bogus".parse::<Observable>().is_err());
    }

    #[test]
    fn x_qx_integrand_small_momentum_limit() {
        assert!((x_qx_integrand(0.0) - 0.75).abs() < 1e-15);
        assert!(x_qx_integrand(1e3) < 1e-6);
        for i in 0..200 {
            assert!(x_qx_integrand(0.1 * i as f64) >= 0.0);
        }
    }

    #[test]
    fn total_charge_is_minus_one() {
        let cfg = QuadratureConfig::default();
        let q = total_charge(&profiles(1.0), &cfg).unwrap();
        assert!((q.value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn energy_small_and_large_n() {
        let cfg = QuadratureConfig::default();
        let e = energy_total(&spec(0.01), &cfg).unwrap();
        assert!((e.value - 1.0).abs() < 1e-3);
        // 2n/√π plus the O(1/n) correction from E ≈ p + 1/2p
        let e = energy_total(&spec(100.0), &cfg).unwrap();
        assert!((e.value - 200.0 / PI.sqrt()).abs() < 1.0, "{}", e.value);
    }

    #[test]
    fn spin_asymptotes() {
        let cfg = QuadratureConfig::default();
        assert!((magnetic_moment_spin(&spec(0.01), &cfg).unwrap().value - 1.0).abs() < 1e-2);
        assert!((magnetic_moment_spin(&spec(100.0), &cfg).unwrap().value - 2.0 / 3.0).abs() < 2e-2);
        assert!((angular_momentum_spin(&spec(0.01), &cfg).unwrap().value - 1.0).abs() < 1e-2);
        assert!((angular_momentum_spin(&spec(100.0), &cfg).unwrap().value - 1.0 / 3.0).abs() < 2e-2);
    }

    #[test]
    fn spin_moment_decreases_with_n() {
        let cfg = QuadratureConfig::default();
        let mut last = f64::INFINITY;
        for k in 0..25 {
            let n = 10f64.powf(-2.0 + 4.0 * k as f64 / 24.0);
            let v = magnetic_moment_spin(&spec(n), &cfg).unwrap().value;
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn angular_momentum_is_half_hbar_and_transverse_parts_vanish() {
        let cfg = QuadratureConfig {
            radial_nodes: 600,
            ..Default::default()
        };
        let p = RadialProfiles::build(&spec(1.0), &cfg).unwrap();
        let l = angular_momentum_total(&p, &cfg).unwrap();
        assert!((l.value - 1.0).abs() < 1e-4, "{l:?}");
        let v = angular_momentum_vector(&p, &cfg, 8).unwrap();
        assert!(v[0].abs() < 1e-10 && v[1].abs() < 1e-10);
        assert!((v[2] - l.value).abs() < 1e-8);
    }

    #[test]
    fn spin_parseval_pairs_agree() {
        let cfg = QuadratureConfig::default();
        let p = profiles(2.0);
        let mom = angular_momentum_spin(&spec(2.0), &cfg).unwrap().value;
        let pos = angular_momentum_spin_position(&p, &cfg).unwrap().value;
        assert!((mom - pos).abs() < 1e-6 * mom);
        let mom = magnetic_moment_spin(&spec(2.0), &cfg).unwrap().value;
        let pos = magnetic_moment_spin_position(&p, &cfg).unwrap().value;
        assert!((mom - pos).abs() < 1e-6 * mom);
        let mom = energy_total(&spec(2.0), &cfg).unwrap().value;
        let pos = energy_total_position(&p, &cfg).unwrap().value;
        assert!((mom - pos).abs() < 1e-6 * mom);
    }

    #[test]
    fn center_of_charge_vanishes() {
        let cfg = QuadratureConfig::default();
        assert!(center_of_charge_z(&profiles(1.0), &cfg).unwrap().abs() < 1e-12);
    }

    #[test]
    fn subset_computation_skips_profiles() {
        let cfg = QuadratureConfig::default();
        let set = ObservableSet::compute(&spec(1.0), &cfg, &[Observable::MuSpin, Observable::EnergyTotal]).unwrap();
        assert!(set.mu_spin.is_some() && set.energy_total.is_some());
        assert!(set.mu_total.is_none() && set.mean_square_radius.is_none());
        assert_eq!(set.present(), vec![Observable::MuSpin, Observable::EnergyTotal]);
        let json = serde_json::to_value(&set).unwrap();
        assert_eq!(json.as_object().unwrap().len(), 5);
        assert!(json.get("mu_spin_err").is_some());
    }

    #[test]
    fn csv_row_matches_header() {
        let cfg = QuadratureConfig::default();
        let which = [Observable::EnergyTotal, Observable::XQx];
        let set = ObservableSet::compute(&spec(1.0), &cfg, &which).unwrap();
        let header = ObservableSet::csv_header(&which);
        let row = set.csv_row(&which);
        assert_eq!(header, "n,energy_total,energy_total_err,xQx,xQx_err");
        assert_eq!(row.split(',').count(), 5);
    }
}
