//! The Gaussian positive-frequency packet ψ_n and its position-space form.
//!
//! ψ_n(x) = (2π)^{-3/2} ∫ d³p f_n(p) u₁(p) e^{ip·x} with a spherically
//! symmetric f_n. Expanding the plane wave in spherical harmonics leaves only
//! the ℓ = 0 term in the upper component and the ℓ = 1 terms in the two
//! lower ones, so
//!
//! ```text
//! ψ = (a(r), 0, i b(r) cosθ, i b(r) sinθ e^{iφ})
//! a(r) = √(2/π) ∫ p² f_n(p) √((E+1)/2E) j₀(pr) dp
//! b(r) = √(2/π) ∫ p² f_n(p) p/√(2E(E+1)) j₁(pr) dp
//! ```
//!
//! b is stored as β(r) = b(r)/r so that ψ₃ = iβz and ψ₄ = iβ(x+iy) carry no
//! angular singularities. The energy-weighted transforms (extra factor E(p))
//! give ∂ψ/∂t = −i(a_E, 0, i b_E cosθ, i b_E sinθ e^{iφ}).

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, GaussLegendre, Tolerance};
use crate::special::BesselSet;
use crate::spinor::{energy_of_magnitude, Spinor4};

/// One member of the state family, identified by its momentum width n (in mc).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    n: f64,
}

impl PacketSpec {
    pub fn new(n: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::invalid("n", format!("must be a positive finite number, got {n}")));
        }
        Ok(PacketSpec { n })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    /// f_n(|p|) = n^{-3/2} π^{-3/4} exp(−p²/2n²)
    pub fn amplitude(&self, p: f64) -> f64 {
        let n = self.n;
        (-p * p / (2.0 * n * n)).exp() / (n.powf(1.5) * PI.powf(0.75))
    }

    /// |f_n(p)|², the momentum-space probability density.
    pub fn density(&self, p: f64) -> f64 {
        let a = self.amplitude(p);
        a * a
    }
}

/// Tolerances, cutoffs and node counts for every integral in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Relative tolerance of adaptive 1D integrals.
    pub rel_tol: f64,
    /// Absolute tolerance, relative to the natural scale of each integrand.
    pub abs_tol: f64,
    /// Momentum cutoff; derived from `abs_tol` and n when absent.
    pub p_max: Option<f64>,
    /// Radial cutoff in Compton radii; 20·max(1, 1/n) when absent.
    pub r_max: Option<f64>,
    /// Gauss–Legendre order per panel for position-space integrals.
    pub nodes_1d: usize,
    /// Gauss–Legendre order in the polar angle for axisymmetric integrals.
    pub theta_nodes: usize,
    /// Relative error above which a position-space (2D) integral fails.
    pub rel_tol_2d: f64,
    /// Number of nodes in the tabulated radial grid.
    pub radial_nodes: usize,
    /// Panel budget for each adaptive integral.
    pub max_panels: usize,
    /// Sample count of the Monte-Carlo oracle.
    pub mc_samples: usize,
    /// Seed of the Monte-Carlo oracle.
    pub seed: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            p_max: None,
            r_max: None,
            nodes_1d: 6,
            theta_nodes: 24,
            rel_tol_2d: 1e-4,
            radial_nodes: 2400,
            max_panels: 20_000,
            mc_samples: 200_000,
            seed: 42,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::invalid("rel_tol", format!("must lie in (0, 1), got {}", self.rel_tol)));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol < 1.0) {
            return Err(Error::invalid("abs_tol", format!("must lie in (0, 1), got {}", self.abs_tol)));
        }
        if let Some(p) = self.p_max {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::invalid("p_max", format!("must be positive, got {p}")));
            }
        }
        if let Some(r) = self.r_max {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::invalid("r_max", format!("must be positive, got {r}")));
            }
        }
        if self.nodes_1d < 4 {
            return Err(Error::invalid("nodes_1d", "need at least 4 nodes per panel"));
        }
        if self.theta_nodes < 8 {
            return Err(Error::invalid("theta_nodes", "need at least 8 polar nodes"));
        }
        if !(self.rel_tol_2d > 0.0 && self.rel_tol_2d < 1.0) {
            return Err(Error::invalid("rel_tol_2d", format!("must lie in (0, 1), got {}", self.rel_tol_2d)));
        }
        if self.radial_nodes < 16 {
            return Err(Error::invalid("radial_nodes", "need at least 16 radial nodes"));
        }
        if self.max_panels < 2 {
            return Err(Error::invalid("max_panels", "need at least 2 panels"));
        }
        if self.mc_samples < 2 {
            return Err(Error::invalid("mc_samples", "need at least 2 samples"));
        }
        Ok(())
    }

    /// The momentum cutoff: exp(−p_max²/2n²) < abs_tol, so the truncated
    /// amplitude (and a fortiori |f_n|²) is below tolerance.
    pub fn momentum_cutoff(&self, spec: &PacketSpec) -> f64 {
        self.p_max
            .unwrap_or_else(|| spec.n() * (2.0 * (1.0 / self.abs_tol).ln()).sqrt() + 0.0)
    }

    pub fn radial_cutoff(&self, spec: &PacketSpec) -> f64 {
        self.r_max.unwrap_or_else(|| 20.0 * (1.0f64).max(1.0 / spec.n()))
    }
}

// Columns of the radial table.
const A: usize = 0;
const DA: usize = 1;
const BETA: usize = 2;
const DBETA: usize = 3;
const A_E: usize = 4;
const DA_E: usize = 5;
const BETA_E: usize = 6;
const DBETA_E: usize = 7;
const COLUMNS: usize = 8;

/// √(2/π) = 4π / (2π)^{3/2}
const SYNTHESIS_PREFACTOR: f64 = 0.797_884_560_802_865_4;

/// The eight radial transforms at a single radius:
/// a, a′, β, β′ and their energy-weighted counterparts.
pub fn radial_transforms(spec: &PacketSpec, cfg: &QuadratureConfig, r: f64) -> Result<([f64; 8], [f64; 8])> {
    let scales = transform_scales(spec, cfg)?;
    transforms_at(spec, cfg, r, &scales)
}

fn weights(p: f64) -> (f64, f64, f64) {
    let e = energy_of_magnitude(p);
    let wa = ((e + 1.0) / (2.0 * e)).sqrt();
    let wb = p / (2.0 * e * (e + 1.0)).sqrt();
    (e, wa, wb)
}

pub(crate) fn momentum_breaks(spec: &PacketSpec, p_max: f64, r: f64) -> Vec<f64> {
    // Panels no wider than half an oscillation of j_l(pr) nor the Gaussian
    // width, plus dyadic points resolving the curvature of E(p) near p ~ mc.
    let width = if r > 0.0 { (PI / r).min(spec.n()) } else { spec.n() };
    let count = ((p_max / width).ceil() as usize).max(1);
    let mut breaks: Vec<f64> = (0..=count).map(|i| p_max * i as f64 / count as f64).collect();
    let mut dyadic = 1.0 / 16.0;
    while dyadic < 4.0 {
        if dyadic < p_max {
            breaks.push(dyadic);
        }
        dyadic *= 2.0;
    }
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * p_max);
    breaks
}

fn transform_scales(spec: &PacketSpec, cfg: &QuadratureConfig) -> Result<[f64; 8]> {
    // L1 norms of each integrand with the Bessel factor bounded by one.
    let p_max = cfg.momentum_cutoff(spec);
    let tol = Tolerance::new(1e-6, vec![1e-300; COLUMNS], cfg.max_panels);
    let out = integrate_adaptive(
        "radial transform scales",
        |p, o: &mut [f64]| {
            let (e, wa, wb) = weights(p);
            let g = SYNTHESIS_PREFACTOR * p * p * spec.amplitude(p);
            o[A] = g * wa;
            o[DA] = g * wa * p;
            o[BETA] = g * wb * p;
            o[DBETA] = g * wb * p * p;
            for k in 0..4 {
                o[k + 4] = o[k] * e;
            }
        },
        COLUMNS,
        &momentum_breaks(spec, p_max, 0.0),
        &tol,
    )?;
    let mut scales = [0.0; 8];
    scales.copy_from_slice(&out.values);
    Ok(scales)
}

fn transforms_at(spec: &PacketSpec, cfg: &QuadratureConfig, r: f64, scales: &[f64; 8]) -> Result<([f64; 8], [f64; 8])> {
    let p_max = cfg.momentum_cutoff(spec);
    let tol = Tolerance::new(cfg.rel_tol, scales.iter().map(|s| s * cfg.abs_tol).collect(), cfg.max_panels);
    let label = format!("radial transforms of n = {} at r = {r}", spec.n());
    let out = integrate_adaptive(
        &label,
        |p, o: &mut [f64]| {
            let (e, wa, wb) = weights(p);
            let j = BesselSet::at(p * r);
            let g = SYNTHESIS_PREFACTOR * p * p * spec.amplitude(p);
            o[A] = g * wa * j.j0;
            o[DA] = -g * wa * p * j.j1;
            o[BETA] = g * wb * p * j.j1_over_x;
            o[DBETA] = -g * wb * p * p * j.j2_over_x;
            o[A_E] = o[A] * e;
            o[DA_E] = o[DA] * e;
            o[BETA_E] = o[BETA] * e;
            o[DBETA_E] = o[DBETA] * e;
        },
        COLUMNS,
        &momentum_breaks(spec, p_max, r),
        &tol,
    )?;
    let mut values = [0.0; 8];
    let mut errors = [0.0; 8];
    values.copy_from_slice(&out.values);
    errors.copy_from_slice(&out.errors);
    Ok((values, errors))
}

/// Radial grid r_k = s·(e^{k·h} − 1): fine near the origin, geometric far out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub scale: f64,
    pub step: f64,
    pub count: usize,
    pub r_max: f64,
}

impl RadialGrid {
    pub fn new(spec: &PacketSpec, r_max: f64, count: usize) -> Self {
        let scale = 0.02 * (1.0f64).min(1.0 / spec.n());
        let step = (r_max / scale).ln_1p() / (count - 1) as f64;
        RadialGrid {
            scale,
            step,
            count,
            r_max,
        }
    }

    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.count {
            self.r_max
        } else {
            self.scale * (k as f64 * self.step).exp_m1()
        }
    }

    /// Index of the interval containing r.
    fn interval(&self, r: f64) -> usize {
        let t = (r / self.scale).ln_1p() / self.step;
        let mut k = (t.floor() as usize).min(self.count - 2);
        // guard against rounding at node boundaries
        while k > 0 && self.node(k) > r {
            k -= 1;
        }
        while k + 2 < self.count && self.node(k + 1) < r {
            k += 1;
        }
        k
    }
}

/// Radial functions and their r-derivatives at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RadialValues {
    pub a: f64,
    pub da: f64,
    /// b(r)/r
    pub beta: f64,
    pub dbeta: f64,
    pub a_e: f64,
    /// b_E(r)/r
    pub beta_e: f64,
}

impl RadialValues {
    pub fn b(&self, r: f64) -> f64 {
        self.beta * r
    }

    pub fn db(&self, r: f64) -> f64 {
        self.beta + r * self.dbeta
    }
}

/// ψ, its spatial gradient and its time derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiJet {
    pub x: [f64; 3],
    pub psi: Spinor4,
    /// ∂ψ/∂x_j for j = x, y, z
    pub grad: [Spinor4; 3],
    pub psi_dot: Spinor4,
}

/// The tabulated radial profiles that fully determine ψ_n.
///
/// Built once per n and immutable afterwards; interpolation between grid
/// nodes is piecewise cubic Hermite using the tabulated derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfiles {
    spec: PacketSpec,
    grid: RadialGrid,
    p_max: f64,
    table: Vec<[f64; 8]>,
    max_transform_error: f64,
    noise_floor: f64,
}

/// Build the radial profiles for one member of the family.
pub fn radial_profiles(spec: &PacketSpec, cfg: &QuadratureConfig) -> Result<RadialProfiles> {
    RadialProfiles::build(spec, cfg)
}

impl RadialProfiles {
    pub fn build(spec: &PacketSpec, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let r_max = cfg.radial_cutoff(spec);
        let grid = RadialGrid::new(spec, r_max, cfg.radial_nodes);
        let scales = transform_scales(spec, cfg)?;
        let node_values = |k: usize| -> Result<([f64; 8], f64)> {
            let (v, e) = transforms_at(spec, cfg, grid.node(k), &scales)?;
            let worst = (0..COLUMNS).map(|c| e[c] / scales[c]).fold(0.0, f64::max);
            Ok((v, worst))
        };

        #[cfg(feature = "parallel")]
        let rows: Vec<Result<([f64; 8], f64)>> = {
            use rayon::prelude::*;
            (0..grid.count).into_par_iter().map(node_values).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let rows: Vec<Result<([f64; 8], f64)>> = (0..grid.count).map(node_values).collect();

        let mut table = Vec::with_capacity(grid.count);
        let mut max_transform_error: f64 = 0.0;
        for row in rows {
            let (v, e) = row?;
            table.push(v);
            max_transform_error = max_transform_error.max(e);
        }
        Ok(RadialProfiles {
            spec: *spec,
            grid,
            p_max: cfg.momentum_cutoff(spec),
            table,
            max_transform_error,
            noise_floor: 10.0 * cfg.abs_tol * scales[A].max(scales[BETA]),
        })
    }

    pub fn spec(&self) -> &PacketSpec {
        &self.spec
    }

    pub fn n(&self) -> f64 {
        self.spec.n()
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn r_max(&self) -> f64 {
        self.grid.r_max
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    /// Worst transform error estimate over the grid, relative to each
    /// integrand's L1 scale.
    pub fn max_transform_error(&self) -> f64 {
        self.max_transform_error
    }

    /// Amplitude below which tabulated values are indistinguishable from
    /// quadrature noise.
    pub fn noise_floor(&self) -> f64 {
        self.noise_floor
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.grid.count).map(|k| self.grid.node(k))
    }

    /// Tabulated values at grid node k.
    pub fn node_values(&self, k: usize) -> RadialValues {
        let row = &self.table[k];
        RadialValues {
            a: row[A],
            da: row[DA],
            beta: row[BETA],
            dbeta: row[DBETA],
            a_e: row[A_E],
            beta_e: row[BETA_E],
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r <= self.grid.r_max * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange {
                radius: r,
                r_max: self.grid.r_max,
            });
        }
        Ok(())
    }

    /// Interpolated radial values at r ∈ [0, r_max].
    pub fn values(&self, r: f64) -> Result<RadialValues> {
        self.check_radius(r)?;
        let r = r.min(self.grid.r_max);
        let k = self.grid.interval(r);
        let (r0, r1) = (self.grid.node(k), self.grid.node(k + 1));
        let h = r1 - r0;
        let s = ((r - r0) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let (h00, h10, h01, h11) = (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2);
        let (d00, d10, d01, d11) = (6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s);
        let lo = &self.table[k];
        let hi = &self.table[k + 1];
        let value = |v: usize, d: usize| h00 * lo[v] + h10 * h * lo[d] + h01 * hi[v] + h11 * h * hi[d];
        let slope = |v: usize, d: usize| (d00 * lo[v] + d10 * h * lo[d] + d01 * hi[v] + d11 * h * hi[d]) / h;
        Ok(RadialValues {
            a: value(A, DA),
            da: slope(A, DA),
            beta: value(BETA, DBETA),
            dbeta: slope(BETA, DBETA),
            a_e: value(A_E, DA_E),
            beta_e: value(BETA_E, DBETA_E),
        })
    }

    pub fn a(&self, r: f64) -> Result<f64> {
        Ok(self.values(r)?.a)
    }

    pub fn b(&self, r: f64) -> Result<f64> {
        Ok(self.values(r)?.b(r))
    }

    /// ψ(x) at t = 0.
    pub fn evaluate_psi(&self, x: [f64; 3]) -> Result<Spinor4> {
        let r = norm3(x);
        let v = self.values(r)?;
        Ok(assemble(v.a, v.beta, x))
    }

    /// ∂ψ/∂t at t = 0; each momentum mode rotates with frequency E(p).
    pub fn evaluate_psi_dot(&self, x: [f64; 3]) -> Result<Spinor4> {
        let r = norm3(x);
        let v = self.values(r)?;
        Ok(assemble(v.a_e, v.beta_e, x).scale(Complex64::new(0.0, -1.0)))
    }

    /// ψ, ∇ψ and ∂ψ/∂t from one interpolation.
    ///
    /// With ψ = (a, 0, iβz, iβ(x+iy)), the gradient follows from a′, β′ and
    /// the exact Cartesian derivatives of z and x + iy.
    pub fn jet(&self, x: [f64; 3]) -> Result<PsiJet> {
        let r = norm3(x);
        let v = self.values(r)?;
        let unit = if r > 0.0 { [x[0] / r, x[1] / r, x[2] / r] } else { [0.0; 3] };
        let i = Complex64::new(0.0, 1.0);
        let transverse = Complex64::new(x[0], x[1]);
        let grad = std::array::from_fn(|j| {
            let radial = v.dbeta * unit[j];
            let dz = if j == 2 { 1.0 } else { 0.0 };
            let dtrans = match j {
                0 => Complex64::new(1.0, 0.0),
                1 => i,
                _ => Complex64::new(0.0, 0.0),
            };
            Spinor4([
                Complex64::new(v.da * unit[j], 0.0),
                Complex64::new(0.0, 0.0),
                i * (radial * x[2] + v.beta * dz),
                i * (transverse * radial + dtrans * v.beta),
            ])
        });
        Ok(PsiJet {
            x,
            psi: assemble(v.a, v.beta, x),
            grad,
            psi_dot: assemble(v.a_e, v.beta_e, x).scale(Complex64::new(0.0, -1.0)),
        })
    }

    /// ∫ F(r) dr over [0, r_max] with a composite Gauss–Legendre rule on the
    /// grid intervals. The error estimate is the difference from the rule
    /// two orders lower.
    pub fn integrate_radial<F>(&self, order: usize, mut f: F) -> Result<(f64, f64)>
    where
        F: FnMut(f64, &RadialValues) -> f64,
    {
        let high = GaussLegendre::new(order.max(4));
        let low = GaussLegendre::new(order.max(4) - 2);
        let (mut hi_sum, mut lo_sum) = (0.0, 0.0);
        for k in 0..self.grid.count - 1 {
            let (r0, r1) = (self.grid.node(k), self.grid.node(k + 1));
            for (r, w) in high.mapped(r0, r1) {
                hi_sum += w * f(r, &self.values(r)?);
            }
            for (r, w) in low.mapped(r0, r1) {
                lo_sum += w * f(r, &self.values(r)?);
            }
        }
        Ok((hi_sum, (hi_sum - lo_sum).abs()))
    }

    /// 4π ∫ (a² + b²) r² dr, which equals ∫ψ†ψ d³x.
    pub fn norm(&self) -> Result<(f64, f64)> {
        let (v, e) = self.integrate_radial(6, |r, v| {
            let b = v.b(r);
            (v.a * v.a + b * b) * r * r
        })?;
        Ok((4.0 * PI * v, 4.0 * PI * e))
    }

    /// Export the profiles as CSV with columns r, a, b, a_E, b_E.
    pub fn write_csv<W: Write>(&self, mut w: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(w, "# {line}")?;
        }
        writeln!(
            w,
            "# n = {}, r_max = {}, nodes = {}, grid_scale = {}, grid_step = {}, p_max = {}",
            self.n(),
            self.grid.r_max,
            self.grid.count,
            self.grid.scale,
            self.grid.step,
            self.p_max
        )?;
        writeln!(w, "r,a,b,a_E,b_E")?;
        for k in 0..self.grid.count {
            let r = self.grid.node(k);
            let row = &self.table[k];
            writeln!(w, "{},{},{},{},{}", r, row[A], row[BETA] * r, row[A_E], row[BETA_E] * r)?;
        }
        Ok(())
    }
}

fn assemble(a: f64, beta: f64, x: [f64; 3]) -> Spinor4 {
    let i = Complex64::new(0.0, 1.0);
    Spinor4([
        Complex64::new(a, 0.0),
        Complex64::new(0.0, 0.0),
        i * (beta * x[2]),
        i * Complex64::new(beta * x[0], beta * x[1]),
    ])
}

pub(crate) fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profiles(n: f64) -> RadialProfiles {
        RadialProfiles::build(&PacketSpec::new(n).unwrap(), &QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn spec_rejects_non_positive_width() {
        assert!(PacketSpec::new(0.0).is_err());
        assert!(PacketSpec::new(-1.0).is_err());
        assert!(PacketSpec::new(f64::NAN).is_err());
        assert!(PacketSpec::new(f64::INFINITY).is_err());
        assert!(PacketSpec::new(1e-3).is_ok());
    }

    #[test]
    fn momentum_profile_is_normalized() {
        for &n in &[0.01, 1.0, 100.0] {
            let spec = PacketSpec::new(n).unwrap();
            let rule = GaussLegendre::new(80);
            let total = rule.integrate(0.0, 12.0 * n, |p| 4.0 * PI * p * p * spec.density(p));
            assert!((total - 1.0).abs() < 1e-12, "n = {n}: {total}");
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = QuadratureConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.rel_tol = 0.0;
        assert!(cfg.validate().is_err());
        let cfg = QuadratureConfig {
            radial_nodes: 3,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn cutoffs_follow_width() {
        let cfg = QuadratureConfig::default();
        for &n in &[0.01, 1.0, 100.0] {
            let spec = PacketSpec::new(n).unwrap();
            let p = cfg.momentum_cutoff(&spec);
            assert!((-p * p / (n * n)).exp() < cfg.abs_tol);
            assert!(cfg.radial_cutoff(&spec) >= 20.0 * (1.0f64).max(1.0 / n));
        }
    }

    #[test]
    fn grid_is_increasing_and_ends_at_r_max() {
        let spec = PacketSpec::new(3.0).unwrap();
        let g = RadialGrid::new(&spec, 20.0, 500);
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(499), 20.0);
        for k in 0..499 {
            assert!(g.node(k + 1) > g.node(k));
        }
        for &r in &[0.0, 1e-9, 0.3, 7.7, 19.999, 20.0] {
            let k = g.interval(r);
            assert!(g.node(k) <= r && r <= g.node(k + 1), "r = {r}");
        }
    }

    #[test]
    fn b_vanishes_at_origin_and_psi_at_origin_is_upper_only() {
        let p = profiles(1.5);
        assert_eq!(p.b(0.0).unwrap(), 0.0);
        let psi = p.evaluate_psi([0.0; 3]).unwrap();
        assert!(psi[0].re > 0.0);
        assert_eq!(psi[1], Complex64::new(0.0, 0.0));
        assert_eq!(psi[2], Complex64::new(0.0, 0.0));
        assert_eq!(psi[3], Complex64::new(0.0, 0.0));
        let dot = p.evaluate_psi_dot([0.0; 3]).unwrap();
        let v = p.node_values(0);
        assert!((dot[0] - Complex64::new(0.0, -v.a_e)).norm() < 1e-15);
    }

    #[test]
    fn z_axis_structure() {
        let p = profiles(1.0);
        let r = 0.7;
        let psi = p.evaluate_psi([0.0, 0.0, r]).unwrap();
        assert!((psi[0].re - p.a(r).unwrap()).abs() < 1e-15);
        assert!((psi[2] - Complex64::new(0.0, p.b(r).unwrap())).norm() < 1e-15);
        assert_eq!(psi[3], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn out_of_range_radius_is_rejected() {
        let p = profiles(2.0);
        match p.evaluate_psi([p.r_max() * 1.01, 0.0, 0.0]) {
            Err(Error::OutOfRange { r_max, .. }) => assert_eq!(r_max, p.r_max()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn interpolation_matches_direct_transforms_between_nodes() {
        let spec = PacketSpec::new(2.0).unwrap();
        let cfg = QuadratureConfig::default();
        let p = RadialProfiles::build(&spec, &cfg).unwrap();
        let a0 = p.a(0.0).unwrap();
        for &r in &[0.013, 0.21, 0.77, 1.9, 4.4] {
            let (direct, _) = radial_transforms(&spec, &cfg, r).unwrap();
            let v = p.values(r).unwrap();
            assert!((v.a - direct[A]).abs() < 1e-9 * a0, "a at {r}");
            assert!((v.beta - direct[BETA]).abs() < 1e-9 * a0, "beta at {r}");
            assert!((v.da - direct[DA]).abs() < 1e-7 * a0, "a' at {r}");
            assert!((v.dbeta - direct[DBETA]).abs() < 1e-7 * a0, "beta' at {r}");
            assert!((v.a_e - direct[A_E]).abs() < 1e-9 * a0 * 3.0, "a_E at {r}");
        }
    }

    #[test]
    fn tabulated_derivatives_match_finite_differences() {
        let p = profiles(1.0);
        for &r in &[0.3, 1.1, 2.5] {
            let h = 1e-5;
            let v = p.values(r).unwrap();
            let fd_a = (p.a(r + h).unwrap() - p.a(r - h).unwrap()) / (2.0 * h);
            let fd_beta = (p.values(r + h).unwrap().beta - p.values(r - h).unwrap().beta) / (2.0 * h);
            assert!((v.da - fd_a).abs() < 1e-7, "{} vs {}", v.da, fd_a);
            assert!((v.dbeta - fd_beta).abs() < 1e-7);
        }
    }

    #[test]
    fn jet_gradient_matches_finite_differences() {
        let p = profiles(1.3);
        let x = [0.31, -0.42, 0.57];
        let jet = p.jet(x).unwrap();
        let h = 1e-6;
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fd = (p.evaluate_psi(xp).unwrap() - p.evaluate_psi(xm).unwrap()).scale(Complex64::new(0.5 / h, 0.0));
            assert!(jet.grad[j].max_abs_diff(&fd) < 1e-6, "direction {j}");
        }
    }

    #[test]
    fn profile_csv_has_header_and_rows() {
        let spec = PacketSpec::new(1.0).unwrap();
        let cfg = QuadratureConfig {
            radial_nodes: 64,
            ..Default::default()
        };
        let p = RadialProfiles::build(&spec, &cfg).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf, &["command = profile".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# command"));
        assert!(lines[1].contains("n = 1"));
        assert_eq!(lines[2], "r,a,b,a_E,b_E");
        assert_eq!(lines.len(), 3 + 64);
    }
}
