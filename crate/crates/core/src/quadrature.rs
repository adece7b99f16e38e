//! Quadrature rules shared by the profile transforms and the observable
//! integrals: Gauss–Legendre nodes of any order and a vector-valued adaptive
//! Gauss–Kronrod (7/15) integrator over a list of initial panels.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the three-term recurrence, starting from the
    /// Tricomi approximation of each root.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights affinely mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss–Legendre rule over consecutive breakpoints.
pub fn composite_nodes(rule: &GaussLegendre, breaks: &[f64]) -> Vec<(f64, f64)> {
    breaks
        .windows(2)
        .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect()
}

/// Evenly spaced breakpoints on [a, b] with at most `width` between them.
pub fn uniform_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let count = (((b - a) / width).ceil() as usize).max(1);
    (0..=count)
        .map(|i| a + (b - a) * i as f64 / count as f64)
        .collect()
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule for [`integrate_adaptive`]: each component k converges
/// once its error estimate is below `max(abs[k], rel * |I_k|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: Vec<f64>,
    pub max_panels: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: Vec<f64>, max_panels: usize) -> Self {
        Tolerance {
            rel,
            abs,
            max_panels,
        }
    }

    pub fn scalar(rel: f64, abs: f64, max_panels: usize) -> Self {
        Self::new(rel, vec![abs], max_panels)
    }
}

/// Result of an adaptive integration of a vector-valued integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct Integral {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub panels: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone)]
struct Panel {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
}

fn kronrod_panel<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, scratch: &mut [Vec<f64>; 15]) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    for (j, &x) in XGK.iter().enumerate().take(7) {
        f(center - half * x, &mut scratch[2 * j]);
        f(center + half * x, &mut scratch[2 * j + 1]);
    }
    f(center, &mut scratch[14]);

    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    for k in 0..dim {
        let fc = scratch[14][k];
        let mut resk = fc * WGK[7];
        let mut resg = fc * WG[3];
        let mut resabs = (fc * WGK[7]).abs();
        for j in 0..7 {
            let s = scratch[2 * j][k] + scratch[2 * j + 1][k];
            resk += WGK[j] * s;
            resabs += WGK[j] * (scratch[2 * j][k].abs() + scratch[2 * j + 1][k].abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * s;
            }
        }
        let mean = 0.5 * resk;
        let mut resasc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((scratch[2 * j][k] - mean).abs() + (scratch[2 * j + 1][k] - mean).abs());
        }
        let resasc = resasc * half.abs();
        let resabs = resabs * half.abs();
        let mut err = ((resk - resg) * half).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(50.0 * f64::EPSILON * resabs);
        }
        values[k] = resk * half;
        errors[k] = err;
    }
    Panel { a, b, values, errors }
}

/// Adaptive Gauss–Kronrod integration of a `dim`-component integrand.
///
/// `breaks` gives the initial panels (at least two increasing points). The
/// panel whose error is largest relative to its component tolerances is
/// bisected until every component meets the [`Tolerance`] or the panel
/// budget runs out. Panels are summed in left-to-right order, so the result
/// does not depend on the refinement history beyond the final partition.
pub fn integrate_adaptive<F>(label: &str, mut f: F, dim: usize, breaks: &[f64], tol: &Tolerance) -> Result<Integral>
where
    F: FnMut(f64, &mut [f64]),
{
    assert!(breaks.len() >= 2, "need at least one initial panel");
    assert_eq!(tol.abs.len(), dim, "one absolute tolerance per component");
    let mut scratch: [Vec<f64>; 15] = std::array::from_fn(|_| vec![0.0; dim]);
    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod_panel(&mut f, w[0], w[1], dim, &mut scratch))
        .collect();
    let mut evaluations = 15 * panels.len();

    loop {
        let mut totals = vec![0.0; dim];
        let mut errors = vec![0.0; dim];
        for p in &panels {
            for k in 0..dim {
                totals[k] += p.values[k];
                errors[k] += p.errors[k];
            }
        }
        let allowed: Vec<f64> = (0..dim)
            .map(|k| tol.abs[k].max(tol.rel * totals[k].abs()).max(f64::MIN_POSITIVE))
            .collect();
        if (0..dim).all(|k| errors[k] <= allowed[k]) {
            return Ok(Integral {
                values: totals,
                errors,
                panels: panels.len(),
                evaluations,
            });
        }

        let badness = |p: &Panel| -> f64 { (0..dim).map(|k| p.errors[k] / allowed[k]).sum() };
        let (worst_idx, _) = panels
            .iter()
            .enumerate()
            .map(|(i, p)| (i, badness(p)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let worst = &panels[worst_idx];
        let mid = 0.5 * (worst.a + worst.b);

        if panels.len() >= tol.max_panels || mid <= worst.a || mid >= worst.b {
            let (k_bad, _) = (0..dim)
                .map(|k| (k, errors[k] / allowed[k]))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            return Err(Error::NotConverged {
                what: label.to_string(),
                error: errors[k_bad],
                tolerance: allowed[k_bad],
                worst_lo: worst.a,
                worst_hi: worst.b,
                worst_error: worst.errors[k_bad],
            });
        }

        let (a, b) = (worst.a, worst.b);
        let left = kronrod_panel(&mut f, a, mid, dim, &mut scratch);
        let right = kronrod_panel(&mut f, mid, b, dim, &mut scratch);
        evaluations += 30;
        panels[worst_idx] = left;
        panels.insert(worst_idx + 1, right);
    }
}

/// Scalar convenience wrapper around [`integrate_adaptive`]; returns the
/// value and its error estimate.
pub fn integrate_scalar<F>(label: &str, mut f: F, breaks: &[f64], tol: &Tolerance) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let out = integrate_adaptive(label, |x, out: &mut [f64]| out[0] = f(x), 1, breaks, tol)?;
    Ok((out.values[0], out.errors[0]))
}
