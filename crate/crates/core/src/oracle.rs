//! Slow, independent reference computations.
//!
//! Nothing here goes through the radial spherical-Bessel reduction. The
//! synthesis of ψ sums plane waves on a Cartesian momentum lattice, spinor
//! bilinears are evaluated with explicit 4×4 matrices, and the magnetic
//! moment is also obtained from a partial Fourier transform along one axis
//! (five nested integrals) and by Monte-Carlo sampling of the charge cloud.
//! All of it runs on a single thread with fixed-order rules.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::observables;
use crate::packet::{PacketSpec, QuadratureConfig, RadialProfiles};
use crate::quadrature::GaussLegendre;
use crate::spinor::{u1, DiracMatrices, Mat4, Momentum3, Spinor4};
use crate::units::{to_bohr_magnetons, to_hbar_halves};

/// Composite Gauss–Legendre lattice on [−P, P] used for each Cartesian
/// momentum axis.
///
/// A tensor Gauss–Hermite rule with the Gaussian absorbed into the weights
/// converges slowly once n ≳ 1, because u₁(p) has branch points at |p| = ±i
/// that sit close to the real axis in the Hermite variable p/n. Fixed panels
/// no wider than the branch-point distance avoid that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LatticeRule {
    pub half_width: f64,
    pub panel_width: f64,
    pub nodes_per_panel: usize,
}

impl LatticeRule {
    /// Rule adequate for |x| ≲ 4. exp(−P²/2n²) = e^{−32.2} ≈ 1e−14 at the
    /// edge of the box.
    pub fn for_spec(spec: &PacketSpec) -> Self {
        Self::for_radius(spec, 4.0)
    }

    /// Rule whose panels also resolve e^{ip·x} for |x| up to `radius`;
    /// wider panels alias distant points back onto the packet.
    pub fn for_radius(spec: &PacketSpec, radius: f64) -> Self {
        let n = spec.n();
        LatticeRule {
            half_width: 8.03 * n,
            panel_width: (2.0f64).min(2.0 * n).min(8.0 / radius.max(1e-300)),
            nodes_per_panel: 12,
        }
    }

    pub fn axis(&self) -> Vec<(f64, f64)> {
        axis_nodes(-self.half_width, self.half_width, self.panel_width, self.nodes_per_panel)
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.axis().len()
    }
}

fn axis_nodes(lo: f64, hi: f64, width: f64, order: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(order);
    let panels = (((hi - lo) / width).ceil() as usize).max(1);
    let h = (hi - lo) / panels as f64;
    (0..panels)
        .flat_map(|k| {
            let a = lo + k as f64 * h;
            rule.mapped(a, a + h).collect::<Vec<_>>()
        })
        .collect()
}

/// ψ and ∂ψ/∂t at a batch of points by brute-force plane-wave summation of
/// (2π)^{-3/2} ∫ d³p f_n(p) u₁(p) e^{ip·x} e^{−iE(p)t}.
pub fn synthesize(spec: &PacketSpec, points: &[[f64; 3]], rule: &LatticeRule) -> Vec<(Spinor4, Spinor4)> {
    let n = spec.n();
    let axis: Vec<(f64, f64)> = rule
        .axis()
        .into_iter()
        .map(|(p, w)| (p, w * (-p * p / (2.0 * n * n)).exp()))
        .collect();
    let norm = 1.0 / (n.powf(1.5) * PI.powf(0.75) * (2.0 * PI).powf(1.5));
    // phase[d][i][k] = e^{i p_i x_k[d]}
    let phase: Vec<Vec<Vec<Complex64>>> = (0..3)
        .map(|d| {
            axis.iter()
                .map(|&(p, _)| points.iter().map(|x| Complex64::from_polar(1.0, p * x[d])).collect())
                .collect()
        })
        .collect();
    let m = points.len();
    let mut psi = vec![[Complex64::new(0.0, 0.0); 4]; m];
    let mut psi_e = vec![[Complex64::new(0.0, 0.0); 4]; m];
    let mut yz = vec![Complex64::new(0.0, 0.0); m];
    for (iz, &(pz, wz)) in axis.iter().enumerate() {
        for (iy, &(py, wy)) in axis.iter().enumerate() {
            for k in 0..m {
                yz[k] = phase[2][iz][k] * phase[1][iy][k] * (wz * wy);
            }
            for (ix, &(px, wx)) in axis.iter().enumerate() {
                let u = u1(&Momentum3::new(px, py, pz));
                let e = (px * px + py * py + pz * pz + 1.0).sqrt();
                for k in 0..m {
                    let ph = phase[0][ix][k] * yz[k] * wx;
                    for c in [0, 2, 3] {
                        let t = u.0[c] * ph;
                        psi[k][c] += t;
                        psi_e[k][c] += t * e;
                    }
                }
            }
        }
    }
    let minus_i = Complex64::new(0.0, -1.0);
    psi.into_iter()
        .zip(psi_e)
        .map(|(a, b)| (Spinor4(a.map(|c| c * norm)), Spinor4(b.map(|c| c * norm * minus_i))))
        .collect()
}

/// ψ(x) by direct 3D momentum quadrature.
pub fn psi_direct(spec: &PacketSpec, x: [f64; 3], rule: &LatticeRule) -> Spinor4 {
    synthesize(spec, &[x], rule)[0].0
}

/// ∂ψ/∂t (x) by direct 3D momentum quadrature.
pub fn psi_dot_direct(spec: &PacketSpec, x: [f64; 3], rule: &LatticeRule) -> Spinor4 {
    synthesize(spec, &[x], rule)[0].1
}

/// Node layout of the five-integral magnetic-moment scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveDimRule {
    /// Rule for the two momenta transverse to the transformed axis.
    pub transverse: LatticeRule,
    /// Rule for the transformed momentum; its panels must resolve e^{ip·x}
    /// out to x_max.
    pub longitudinal: LatticeRule,
    /// The position integral is truncated to [−x_max, x_max].
    pub x_max: f64,
    pub x_panel_width: f64,
    pub x_nodes_per_panel: usize,
}

impl FiveDimRule {
    pub fn for_spec(spec: &PacketSpec) -> Self {
        let n = spec.n();
        let transverse = LatticeRule::for_spec(spec);
        // |g|² falls off like exp(−n²x²) and, from the branch points of u₁,
        // like exp(−2|x|); both are below 1e−11 at x_max
        let x_max = (14.0f64).max(8.03 / n);
        let longitudinal = LatticeRule::for_radius(spec, x_max);
        FiveDimRule {
            transverse,
            longitudinal,
            x_max,
            x_panel_width: (2.0 * PI / transverse.half_width).min(2.0 / n.min(1.0)),
            x_nodes_per_panel: 12,
        }
    }

    /// Total number of innermost integrand evaluations.
    pub fn cost(&self) -> f64 {
        let q = self.transverse.nodes_per_axis() as f64;
        let p = self.longitudinal.nodes_per_axis() as f64;
        let x = (2.0 * self.x_max / self.x_panel_width).ceil() * self.x_nodes_per_panel as f64;
        q * q * p * x
    }
}

/// ∫ s ψ†α_t ψ d³x where s is the coordinate along `axis` and t the index
/// of `alpha`, with ψ Fourier transformed back along `axis` only:
///
/// ```text
/// g(s; q₁, q₂) = (2π)^{-1/2} ∫ dp_s f_n(p) u₁(p) e^{i p_s s}
/// ∫ s ψ†α ψ d³x = ∫ dq₁ dq₂ ∫ ds s g†α g
/// ```
///
/// The two transverse position integrals became delta functions that
/// removed the primed transverse momenta (Parseval), leaving five integrals.
fn first_moment_partial_fourier(spec: &PacketSpec, rule: &FiveDimRule, axis: usize, alpha: &Mat4) -> f64 {
    let n = spec.n();
    let qnodes = rule.transverse.axis();
    let pnodes = rule.longitudinal.axis();
    let xnodes = axis_nodes(-rule.x_max, rule.x_max, rule.x_panel_width, rule.x_nodes_per_panel);
    let gauss: Vec<f64> = pnodes.iter().map(|&(p, w)| w * (-p * p / (2.0 * n * n)).exp()).collect();
    let phase: Vec<Vec<Complex64>> = xnodes
        .iter()
        .map(|&(s, _)| pnodes.iter().map(|&(p, _)| Complex64::from_polar(1.0, p * s)).collect())
        .collect();
    let norm = 1.0 / (n.powf(1.5) * PI.powf(0.75) * (2.0 * PI).sqrt());
    let mut weighted = vec![[Complex64::new(0.0, 0.0); 4]; pnodes.len()];
    let mut total = 0.0;
    for &(q1, w1) in &qnodes {
        for &(q2, w2) in &qnodes {
            // g carries exp(−q²/2n²) once; g†αg needs it squared
            let wt = w1 * w2 * (-(q1 * q1 + q2 * q2) / (n * n)).exp();
            for (k, &(ps, _)) in pnodes.iter().enumerate() {
                let mut p = [0.0; 3];
                p[axis] = ps;
                p[(axis + 1) % 3] = q1;
                p[(axis + 2) % 3] = q2;
                let u = u1(&Momentum3::from_array(p));
                weighted[k] = u.0.map(|c| c * gauss[k] * norm);
            }
            let mut inner = 0.0;
            for (ix, &(s, ws)) in xnodes.iter().enumerate() {
                let mut g = [Complex64::new(0.0, 0.0); 4];
                for (k, ph) in phase[ix].iter().enumerate() {
                    for c in 0..4 {
                        g[c] += weighted[k][c] * ph;
                    }
                }
                inner += ws * s * Spinor4(g).bilinear(alpha);
            }
            total += wt * inner;
        }
    }
    total
}

/// The magnetic moment from five nested integrals, reported like
/// [`observables::magnetic_moment_total`] (Bohr magnetons along −z).
///
/// m_z = (1/2)∫(x J_y − y J_x) with J = −ψ†αψ; both halves are computed,
/// neither is inferred from the other by symmetry.
pub fn magnetic_moment_5d(spec: &PacketSpec, rule: &FiveDimRule) -> f64 {
    let d = DiracMatrices::dirac();
    let x_alpha_y = first_moment_partial_fourier(spec, rule, 0, &d.alpha[1]);
    let y_alpha_x = first_moment_partial_fourier(spec, rule, 1, &d.alpha[0]);
    let m_z = 0.5 * (-x_alpha_y + y_alpha_x);
    -to_bohr_magnetons(m_z)
}

/// A Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Importance-sampled (1/2)∫(x × J)_z d³x in the reporting convention of
/// [`observables::magnetic_moment_total`].
///
/// Radii are drawn from a piecewise-constant approximation of the radial
/// charge distribution on the profile grid and directions uniformly, and J is
/// formed from ψ with the α matrices.
pub fn monte_carlo_moment(profiles: &RadialProfiles, cfg: &QuadratureConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let grid = *profiles.grid();
    let rule = GaussLegendre::new(6);
    let mut cdf = Vec::with_capacity(grid.count);
    let mut masses = Vec::with_capacity(grid.count - 1);
    let mut acc = 0.0;
    cdf.push(0.0);
    for k in 0..grid.count - 1 {
        let (r0, r1) = (grid.node(k), grid.node(k + 1));
        let mut m = 0.0;
        for (r, w) in rule.mapped(r0, r1) {
            let v = profiles.values(r)?;
            let b = v.b(r);
            m += w * 4.0 * PI * r * r * (v.a * v.a + b * b);
        }
        // keep every interval reachable so the estimator stays unbiased
        let m = m.max(1e-300);
        masses.push(m);
        acc += m;
        cdf.push(acc);
    }
    let total = acc;
    let dirac = DiracMatrices::dirac();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..cfg.mc_samples {
        let u: f64 = rng.random::<f64>() * total;
        let k = (cdf.partition_point(|&c| c <= u).max(1) - 1).min(masses.len() - 1);
        let (r0, r1) = (grid.node(k), grid.node(k + 1));
        let r = r0 + rng.random::<f64>() * (r1 - r0);
        let cos_t = 2.0 * rng.random::<f64>() - 1.0;
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let x = [r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t];
        let psi = profiles.evaluate_psi(x)?;
        let j = [-psi.bilinear(&dirac.alpha[0]), -psi.bilinear(&dirac.alpha[1])];
        let f = 0.5 * (x[0] * j[1] - x[1] * j[0]);
        let q = masses[k] / (total * (r1 - r0) * 4.0 * PI * r * r);
        let sample = f / q;
        sum += sample;
        sum_sq += sample * sample;
    }
    let count = cfg.mc_samples as f64;
    let mean = sum / count;
    let variance = ((sum_sq / count - mean * mean) * count / (count - 1.0)).max(0.0);
    Ok(McEstimate {
        value: -to_bohr_magnetons(mean),
        standard_error: to_bohr_magnetons((variance / count).sqrt()),
        samples: cfg.mc_samples,
        seed: cfg.seed,
    })
}

/// Spherical (p, θ, φ) product rule for momentum-space averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalRule {
    pub p_max: f64,
    pub p_panel_width: f64,
    pub p_nodes_per_panel: usize,
    pub theta_nodes: usize,
    pub phi_nodes: usize,
}

impl SphericalRule {
    pub fn for_spec(spec: &PacketSpec) -> Self {
        let n = spec.n();
        SphericalRule {
            p_max: 8.03 * n,
            p_panel_width: n.min(1.0),
            p_nodes_per_panel: 12,
            theta_nodes: 20,
            phi_nodes: 4,
        }
    }
}

/// ∫ d³p |f_n(p)|² g(p) with g evaluated at every node of the product rule
/// (the azimuth by the trapezoid rule).
pub fn momentum_average_direct<G: FnMut(&Momentum3) -> f64>(spec: &PacketSpec, rule: &SphericalRule, mut g: G) -> f64 {
    let radial = axis_nodes(0.0, rule.p_max, rule.p_panel_width, rule.p_nodes_per_panel);
    let polar = GaussLegendre::new(rule.theta_nodes);
    let n = spec.n();
    let norm = 1.0 / (n.powi(3) * PI.powf(1.5));
    let mut total = 0.0;
    for &(p, wp) in &radial {
        let density = norm * (-p * p / (n * n)).exp();
        let mut shell = 0.0;
        for (theta, wt) in polar.mapped(0.0, PI) {
            let (st, ct) = theta.sin_cos();
            for m in 0..rule.phi_nodes {
                let phi = 2.0 * PI * m as f64 / rule.phi_nodes as f64;
                let mom = Momentum3::new(p * st * phi.cos(), p * st * phi.sin(), p * ct);
                shell += wt * st * g(&mom);
            }
        }
        total += wp * p * p * density * shell * 2.0 * PI / rule.phi_nodes as f64;
    }
    total
}

/// Expectation value of a constant matrix in the positive-frequency
/// momentum-space wave function f_n u₁.
pub fn bilinear_expectation(spec: &PacketSpec, rule: &SphericalRule, m: &Mat4) -> f64 {
    momentum_average_direct(spec, rule, |p| u1(p).bilinear(m))
}

/// ⟨H⟩ with H = α·p + β as an explicit matrix at each node, in mc².
pub fn energy_direct(spec: &PacketSpec, rule: &SphericalRule) -> f64 {
    let d = DiracMatrices::dirac();
    momentum_average_direct(spec, rule, |p| u1(p).bilinear(&d.hamiltonian(p)))
}

/// ∂u₁/∂p_i by a fourth-order central difference.
fn du1(p: &Momentum3, i: usize) -> Spinor4 {
    let h = 2e-3 * p.norm().max(1.0);
    let at = |s: f64| {
        let mut q = p.as_array();
        q[i] += s;
        u1(&Momentum3::from_array(q))
    };
    let c = Complex64::new(1.0 / (12.0 * h), 0.0);
    (at(-2.0 * h) - at(2.0 * h) + (at(h) - at(-h)).scale(Complex64::new(8.0, 0.0))).scale(c)
}

/// ⟨|x|²⟩ and its split into positive- and negative-frequency parts,
/// evaluated in momentum space where x = i∇_p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectorSplit {
    pub mean_square_radius: f64,
    pub x_px: f64,
    pub x_qx: f64,
}

/// With φ = f_n u₁ and Λ± = (E ± H)/2E, ⟨x·Λx⟩ = Σ_i ‖Λ ∂_iφ‖². Since Λ₊u₁ = u₁
/// and ∂_i(u₁†u₁) = 0, the Gaussian derivative contributes the scalar value
/// 3/(2n²) to ⟨|x|²⟩ and ⟨x·P̂x⟩ and nothing to ⟨x·Q̂x⟩; the rest is
/// ∫|f_n|² Σ_i |Λ ∂_iu₁|² with the projectors built as matrices.
pub fn projector_split(spec: &PacketSpec, rule: &SphericalRule) -> ProjectorSplit {
    let d = DiracMatrices::dirac();
    let scalar = 1.5 / (spec.n() * spec.n());
    let parts = |p: &Momentum3| {
        let e = (p.norm_sqr() + 1.0).sqrt();
        let h = d.hamiltonian(p);
        let plus = (&Mat4::identity().scale(Complex64::new(e, 0.0)) + &h).scale(Complex64::new(0.5 / e, 0.0));
        let minus = (&Mat4::identity().scale(Complex64::new(e, 0.0)) + &h.scale(Complex64::new(-1.0, 0.0))).scale(Complex64::new(0.5 / e, 0.0));
        let mut out = [0.0; 3];
        for i in 0..3 {
            let g = du1(p, i);
            out[0] += g.norm_sqr();
            out[1] += (&plus * &g).norm_sqr();
            out[2] += (&minus * &g).norm_sqr();
        }
        out
    };
    let full = momentum_average_direct(spec, rule, |p| parts(p)[0]);
    let pos = momentum_average_direct(spec, rule, |p| parts(p)[1]);
    let neg = momentum_average_direct(spec, rule, |p| parts(p)[2]);
    ProjectorSplit {
        mean_square_radius: scalar + full,
        x_px: scalar + pos,
        x_qx: neg,
    }
}

/// How an oracle comparison is judged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "metric", content = "tolerance", rename_all = "snake_case")]
pub enum Check {
    /// |primary − oracle| / |oracle| ≤ tol
    Relative(f64),
    /// |primary − oracle| ≤ tol
    Absolute(f64),
    /// |primary − oracle| ≤ k · standard error
    Sigma(f64),
}

/// One primary-versus-oracle comparison. Values are flattened to real
/// vectors (a spinor becomes eight numbers); deviations are the Euclidean
/// norm of the difference, derived from the stored values on construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub quantity: String,
    pub n: f64,
    pub primary: Vec<f64>,
    pub oracle: Vec<f64>,
    pub abs_dev: f64,
    pub rel_dev: f64,
    #[serde(flatten)]
    pub check: Check,
    pub standard_error: Option<f64>,
    pub passed: bool,
    pub samples: usize,
    pub seed: Option<u64>,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, n: f64, primary: Vec<f64>, oracle: Vec<f64>, check: Check, samples: usize) -> Self {
        let abs_dev = primary.iter().zip(&oracle).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let scale = oracle.iter().map(|b| b * b).sum::<f64>().sqrt();
        let rel_dev = abs_dev / scale.max(f64::MIN_POSITIVE);
        let mut report = OracleReport {
            quantity: quantity.into(),
            n,
            primary,
            oracle,
            abs_dev,
            rel_dev,
            check,
            standard_error: None,
            passed: false,
            samples,
            seed: None,
        };
        report.passed = report.evaluate();
        report
    }

    pub fn scalar(quantity: impl Into<String>, n: f64, primary: f64, oracle: f64, check: Check, samples: usize) -> Self {
        Self::new(quantity, n, vec![primary], vec![oracle], check, samples)
    }

    pub fn spinor(quantity: impl Into<String>, n: f64, primary: &Spinor4, oracle: &Spinor4, check: Check, samples: usize) -> Self {
        let flat = |s: &Spinor4| s.0.iter().flat_map(|c| [c.re, c.im]).collect();
        Self::new(quantity, n, flat(primary), flat(oracle), check, samples)
    }

    pub fn with_statistics(mut self, standard_error: f64, seed: u64) -> Self {
        self.standard_error = Some(standard_error);
        self.seed = Some(seed);
        self.passed = self.evaluate();
        self
    }

    fn evaluate(&self) -> bool {
        if !(self.abs_dev.is_finite()) {
            return false;
        }
        match self.check {
            Check::Relative(tol) => self.rel_dev <= tol,
            Check::Absolute(tol) => self.abs_dev <= tol,
            Check::Sigma(k) => self.standard_error.is_some_and(|s| self.abs_dev <= k * s),
        }
    }
}

/// Comparison groups run by [`run_validation`], by name.
pub const GROUPS: [&str; 9] = [
    "psi",
    "psi_dot",
    "magnetic_moment",
    "monte_carlo",
    "mean_square_radius",
    "projector_split",
    "spin",
    "energy",
    "parseval",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    /// Run only the groups whose name starts with this prefix.
    pub only: Option<String>,
    pub seed: u64,
    pub psi_points: usize,
    /// n values for the pointwise ψ comparison.
    pub psi_widths: Vec<f64>,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            only: None,
            seed: 42,
            psi_points: 50,
            psi_widths: vec![0.5, 2.0],
        }
    }
}

impl ValidationOptions {
    pub fn validate(&self) -> Result<()> {
        if let Some(only) = &self.only {
            if !GROUPS.iter().any(|g| g.starts_with(only.as_str())) {
                return Err(crate::Error::invalid("only", format!("no comparison named `{only}` (expected one of {})", GROUPS.join(", "))));
            }
        }
        if self.psi_points == 0 {
            return Err(crate::Error::invalid("psi_points", "need at least one point"));
        }
        Ok(())
    }

    fn wants(&self, group: &str) -> bool {
        self.only.as_deref().is_none_or(|o| group.starts_with(o))
    }
}

/// Points uniform in a ball, deterministic in the seed.
pub fn random_points(seed: u64, count: usize, radius: f64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let x: [f64; 3] = std::array::from_fn(|_| radius * (2.0 * rng.random::<f64>() - 1.0));
            if x.iter().map(|c| c * c).sum::<f64>() <= radius * radius {
                break x;
            }
        })
        .collect()
}

/// Pointwise comparison of the radial-reduction ψ (and ψ̇) against direct
/// plane-wave synthesis. Points fill a ball of radius 3·min(1, 1/n).
pub fn compare_psi(spec: &PacketSpec, cfg: &QuadratureConfig, count: usize, seed: u64, with_psi: bool, with_dot: bool) -> Result<Vec<OracleReport>> {
    let profiles = RadialProfiles::build(spec, cfg)?;
    let radius = 3.0 * (1.0f64).min(1.0 / spec.n());
    let points = random_points(seed, count, radius);
    let rule = LatticeRule::for_radius(spec, radius);
    let samples = rule.nodes_per_axis().pow(3);
    let direct = synthesize(spec, &points, &rule);
    let mut out = Vec::new();
    for (x, (psi, psi_dot)) in points.iter().zip(direct) {
        let label = |what: &str| format!("{what} at ({:.4}, {:.4}, {:.4})", x[0], x[1], x[2]);
        if with_psi {
            out.push(OracleReport::spinor(label("psi"), spec.n(), &profiles.evaluate_psi(*x)?, &psi, Check::Relative(1e-6), samples));
        }
        if with_dot {
            out.push(OracleReport::spinor(label("psi_dot"), spec.n(), &profiles.evaluate_psi_dot(*x)?, &psi_dot, Check::Relative(1e-6), samples));
        }
    }
    Ok(out)
}

/// Run the oracle comparisons. Reports are returned in a fixed order; a
/// failed comparison is a report with `passed == false`, not an error.
pub fn run_validation(cfg: &QuadratureConfig, opts: &ValidationOptions) -> Result<Vec<OracleReport>> {
    cfg.validate()?;
    opts.validate()?;
    let mut reports = Vec::new();

    let (want_psi, want_dot) = (opts.wants("psi"), opts.wants("psi_dot"));
    if want_psi || want_dot {
        for &n in &opts.psi_widths {
            let count = if want_psi { opts.psi_points } else { opts.psi_points.min(10) };
            reports.extend(compare_psi(&PacketSpec::new(n)?, cfg, count, opts.seed, want_psi, want_dot)?);
        }
    }

    let one = PacketSpec::new(1.0)?;
    let need_one = opts.wants("magnetic_moment") || opts.wants("monte_carlo") || opts.wants("parseval");
    let profiles_one = if need_one { Some(RadialProfiles::build(&one, cfg)?) } else { None };
    if let Some(p) = &profiles_one {
        let mu = observables::magnetic_moment_total(p, cfg)?;
        if opts.wants("magnetic_moment") {
            let rule = FiveDimRule::for_spec(&one);
            let five = magnetic_moment_5d(&one, &rule);
            reports.push(OracleReport::scalar("mu_total vs five-integral scheme", 1.0, mu.value, five, Check::Absolute(1e-3), rule.cost() as usize));
        }
        if opts.wants("monte_carlo") {
            let mc_cfg = QuadratureConfig {
                seed: opts.seed,
                ..cfg.clone()
            };
            let mc = monte_carlo_moment(p, &mc_cfg)?;
            reports.push(
                OracleReport::scalar("mu_total vs Monte-Carlo", 1.0, mu.value, mc.value, Check::Sigma(3.0), mc.samples)
                    .with_statistics(mc.standard_error, mc.seed),
            );
        }
        if opts.wants("parseval") {
            let l_mom = observables::angular_momentum_spin(&one, cfg)?;
            let l_pos = observables::angular_momentum_spin_position(p, cfg)?;
            reports.push(OracleReport::scalar("L_spin momentum vs position space", 1.0, l_mom.value, l_pos.value, Check::Relative(1e-4), 0));
            let e_mom = observables::energy_total(&one, cfg)?;
            let e_pos = observables::energy_total_position(p, cfg)?;
            reports.push(OracleReport::scalar("energy_total momentum vs position space", 1.0, e_mom.value, e_pos.value, Check::Relative(1e-4), 0));
        }
    }

    for &n in &[0.1, 1.0, 10.0] {
        let want_msr = opts.wants("mean_square_radius");
        let want_split = opts.wants("projector_split");
        if !(want_msr || want_split) {
            break;
        }
        let spec = PacketSpec::new(n)?;
        let rule = SphericalRule::for_spec(&spec);
        let split = projector_split(&spec, &rule);
        let profiles = RadialProfiles::build(&spec, cfg)?;
        let msr = observables::mean_square_radius(&profiles, cfg)?;
        if want_msr {
            reports.push(OracleReport::scalar("mean_square_radius position vs momentum space", n, msr.value, split.mean_square_radius, Check::Relative(1e-6), 0));
        }
        if want_split {
            let xqx = observables::x_qx(&spec, cfg)?;
            reports.push(OracleReport::scalar("xQx closed form vs projector matrices", n, xqx.value, split.x_qx, Check::Relative(1e-6), 0));
            reports.push(OracleReport::scalar("mean_square_radius vs xPx + xQx", n, msr.value, split.x_px + xqx.value, Check::Relative(1e-4), 0));
        }
    }

    if opts.wants("spin") {
        let d = DiracMatrices::dirac();
        let gamma0_sigma_z = &d.gamma0 * &d.sigma[2];
        for &n in &[0.01, 1.0, 100.0] {
            let spec = PacketSpec::new(n)?;
            let rule = SphericalRule::for_spec(&spec);
            let mu = observables::magnetic_moment_spin(&spec, cfg)?;
            let mu_direct = to_bohr_magnetons(0.5 * bilinear_expectation(&spec, &rule, &gamma0_sigma_z));
            reports.push(OracleReport::scalar("mu_spin closed form vs matrix bilinear", n, mu.value, mu_direct, Check::Relative(1e-8), 0));
            let l = observables::angular_momentum_spin(&spec, cfg)?;
            let l_direct = to_hbar_halves(0.5 * bilinear_expectation(&spec, &rule, &d.sigma[2]));
            reports.push(OracleReport::scalar("L_spin closed form vs matrix bilinear", n, l.value, l_direct, Check::Relative(1e-8), 0));
        }
    }

    if opts.wants("energy") {
        for &n in &[0.01, 1.0, 100.0] {
            let spec = PacketSpec::new(n)?;
            let e = observables::energy_total(&spec, cfg)?;
            let direct = energy_direct(&spec, &SphericalRule::for_spec(&spec));
            reports.push(OracleReport::scalar("energy_total vs matrix Hamiltonian", n, e.value, direct, Check::Relative(1e-8), 0));
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: f64) -> PacketSpec {
        PacketSpec::new(n).unwrap()
    }

    #[test]
    fn direct_psi_structure_at_origin() {
        let s = spec(0.5);
        let psi = psi_direct(&s, [0.0; 3], &LatticeRule::for_spec(&s));
        assert!(psi[0].norm() > 0.1);
        assert!(psi[1].norm() < 1e-14);
        assert!(psi[2].norm() < 1e-14);
        assert!(psi[3].norm() < 1e-14);
    }

    #[test]
    fn direct_psi_decays_far_away() {
        let s = spec(0.5);
        let far_point = [20.0, 20.0, 20.0];
        let rule = LatticeRule::for_radius(&s, 35.0);
        let near = psi_direct(&s, [0.1, 0.0, 0.0], &rule).norm_sqr().sqrt();
        let far = psi_direct(&s, far_point, &rule).norm_sqr().sqrt();
        assert!(far < QuadratureConfig::default().abs_tol * near, "{far} vs {near}");
    }

    #[test]
    fn direct_psi_matches_profiles() {
        let s = spec(0.5);
        let cfg = QuadratureConfig::default();
        let reports = compare_psi(&s, &cfg, 5, 3, true, true).unwrap();
        assert_eq!(reports.len(), 10);
        assert!(reports.iter().all(|r| r.passed), "{reports:?}");
    }

    #[test]
    fn report_deviations_follow_values() {
        let r = OracleReport::scalar("x", 1.0, 1.001, 1.0, Check::Relative(1e-2), 0);
        assert!((r.abs_dev - 1e-3).abs() < 1e-12 && (r.rel_dev - 1e-3).abs() < 1e-12);
        assert!(r.passed);
        assert!(!OracleReport::scalar("x", 1.0, 1.1, 1.0, Check::Absolute(1e-2), 0).passed);
        assert!(!OracleReport::scalar("x", 1.0, f64::NAN, 1.0, Check::Absolute(1.0), 0).passed);
        // sigma checks need a standard error
        let r = OracleReport::scalar("x", 1.0, 1.0, 1.1, Check::Sigma(3.0), 10);
        assert!(!r.passed);
        assert!(r.with_statistics(0.05, 7).passed);
        let json = serde_json::to_value(OracleReport::scalar("x", 1.0, 1.0, 1.0, Check::Relative(1e-6), 0)).unwrap();
        assert_eq!(json["metric"], "relative");
        assert_eq!(json["tolerance"], 1e-6);
    }

    #[test]
    fn monte_carlo_is_reproducible_and_scales() {
        let s = spec(1.0);
        let base = QuadratureConfig {
            radial_nodes: 400,
            mc_samples: 4000,
            seed: 9,
            ..Default::default()
        };
        let p = RadialProfiles::build(&s, &base).unwrap();
        let a = monte_carlo_moment(&p, &base).unwrap();
        let b = monte_carlo_moment(&p, &base).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let big = monte_carlo_moment(&p, &QuadratureConfig { mc_samples: 64_000, ..base.clone() }).unwrap();
        let ratio = a.standard_error / big.standard_error;
        assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
        let other = monte_carlo_moment(&p, &QuadratureConfig { seed: 10, ..base }).unwrap();
        assert_ne!(a.value, other.value);
    }

    #[test]
    fn projector_parts_are_consistent() {
        let s = spec(1.0);
        let split = projector_split(&s, &SphericalRule::for_spec(&s));
        // P and Q are orthogonal, so the norms add up
        assert!((split.x_px + split.x_qx - split.mean_square_radius).abs() < 1e-10);
        assert!(split.x_px > 0.0 && split.x_qx > 0.0);
    }

    #[test]
    fn small_width_five_dim_moment_is_one_bohr_magneton() {
        let s = spec(0.01);
        let mut rule = FiveDimRule::for_spec(&s);
        rule.transverse.nodes_per_panel = 6;
        rule.longitudinal.nodes_per_panel = 6;
        assert!((magnetic_moment_5d(&s, &rule) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn validation_options_reject_unknown_groups() {
        let opts = ValidationOptions {
            only: Some("nope".into()),
            ..Default::default()
        };
        assert!(opts.validate().is_err());
        let opts = ValidationOptions {
            only: Some("spin".into()),
            ..Default::default()
        };
        let reports = run_validation(&QuadratureConfig::default(), &opts).unwrap();
        assert_eq!(reports.len(), 6);
        assert!(reports.iter().all(|r| r.passed), "{reports:#?}");
    }
}
