//! Sweeps over the packet width n and field slices through the z = 0 plane.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::densities;
use crate::error::{Error, Result};
use crate::observables::{Observable, ObservableSet};
use crate::packet::{PacketSpec, QuadratureConfig, RadialProfiles};
use crate::units::COMPTON_RADIUS;

/// Panel widths used for the current-density figure when none are given.
pub const DEFAULT_PANELS: [f64; 3] = [0.5, 2.0, 8.0];
pub const DEFAULT_HALF_EXTENT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

impl fmt::Display for Spacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spacing::Log => "log",
            Spacing::Linear => "linear",
        })
    }
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "log" => Ok(Spacing::Log),
            "linear" | "lin" => Ok(Spacing::Linear),
            other => Err(Error::invalid("spacing", format!("expected `log` or `linear`, got `{other}`"))),
        }
    }
}

/// A grid of n values and the observables to evaluate at each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_min: f64,
    pub n_max: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub observables: Vec<Observable>,
    pub quadrature: QuadratureConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            n_min: 0.01,
            n_max: 100.0,
            points: 25,
            spacing: Spacing::Log,
            observables: Observable::ALL.to_vec(),
            quadrature: QuadratureConfig::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n_min", self.n_min), ("n_max", self.n_max)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be a positive finite number, got {v}")));
            }
        }
        if self.points == 0 {
            return Err(Error::invalid("points", "need at least one point"));
        }
        if self.points == 1 {
            if self.n_min != self.n_max {
                return Err(Error::invalid("points", "a single-point sweep needs n_min = n_max"));
            }
        } else if self.n_min >= self.n_max {
            return Err(Error::invalid("n_max", format!("must exceed n_min = {} (got {})", self.n_min, self.n_max)));
        }
        if self.observables.is_empty() {
            return Err(Error::invalid("observables", "request at least one observable"));
        }
        self.quadrature.validate()
    }

    /// The n values, ascending, with both endpoints exact.
    pub fn grid(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.n_min];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k == 0 {
                    self.n_min
                } else if k == self.points - 1 {
                    self.n_max
                } else {
                    let t = k as f64 / last;
                    match self.spacing {
                        Spacing::Log => self.n_min * (self.n_max / self.n_min).powf(t),
                        Spacing::Linear => self.n_min + (self.n_max - self.n_min) * t,
                    }
                }
            })
            .collect()
    }
}

/// Why a sweep row has no values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowFailure {
    pub validation: bool,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: f64,
    pub outcome: std::result::Result<ObservableSet, RowFailure>,
}

impl Serialize for SweepRow {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match &self.outcome {
            Ok(set) => set.serialize(serializer),
            Err(e) => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("n", &self.n)?;
                map.serialize_entry("error", &e.message)?;
                map.end()
            }
        }
    }
}

/// Rows in ascending n, one per grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Evaluate every grid point independently. Points run in parallel and are
/// collected in grid order; a failing point is recorded in its row and the
/// rest of the sweep continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let eval = |n: f64| -> SweepRow {
        let outcome = PacketSpec::new(n)
            .and_then(|p| ObservableSet::compute(&p, &spec.quadrature, &spec.observables))
            .map_err(|e| RowFailure {
                validation: e.is_validation(),
                message: e.to_string(),
            });
        SweepRow { n, outcome }
    };
    let grid = spec.grid();
    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        grid.into_par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = grid.into_iter().map(eval).collect();
    Ok(SweepTable { spec: spec.clone(), rows })
}

/// Smallest and largest value of one observable over the successful rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnRange {
    pub observable: Observable,
    pub min: f64,
    pub max: f64,
}

impl SweepTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.outcome.is_err()).count()
    }

    /// The successful values of one observable as (n, estimate) pairs.
    pub fn column(&self, o: Observable) -> Vec<(f64, crate::observables::Estimate)> {
        self.rows
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().and_then(|s| s.get(o)).map(|e| (r.n, e)))
            .collect()
    }

    pub fn ranges(&self) -> Vec<ColumnRange> {
        self.spec
            .observables
            .iter()
            .filter_map(|&o| {
                let col = self.column(o);
                if col.is_empty() {
                    return None;
                }
                let min = col.iter().map(|(_, e)| e.value).fold(f64::INFINITY, f64::min);
                let max = col.iter().map(|(_, e)| e.value).fold(f64::NEG_INFINITY, f64::max);
                Some(ColumnRange { observable: o, min, max })
            })
            .collect()
    }

    /// One-line summary with the range of each column.
    pub fn summary(&self) -> String {
        let mut parts = vec![format!("{} rows, {} failed", self.rows.len(), self.failures())];
        for r in self.ranges() {
            parts.push(format!("{}: [{:.6e}, {:.6e}]", r.observable, r.min, r.max));
        }
        parts.join("; ")
    }

    /// CSV with `#` metadata lines, a header row, and a trailing `error`
    /// column that is empty for successful rows.
    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[String]) -> io::Result<()> {
        for line in metadata {
            writeln!(w, "# {line}")?;
        }
        let which = &self.spec.observables;
        writeln!(w, "{},error", ObservableSet::csv_header(which))?;
        for row in &self.rows {
            match &row.outcome {
                Ok(set) => writeln!(w, "{},", set.csv_row(which))?,
                Err(e) => {
                    let empty = ObservableSet {
                        n: row.n,
                        ..Default::default()
                    };
                    writeln!(w, "{},\"{}\"", empty.csv_row(which), e.message.replace('"', "'"))?
                }
            }
        }
        Ok(())
    }
}

/// One sample of the z = 0 plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlicePoint {
    pub x: f64,
    pub y: f64,
    pub j_x: f64,
    pub j_y: f64,
    pub j_abs: f64,
    pub rho_q: f64,
}

/// Current and charge density on a square grid in the z = 0 plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSlice {
    pub n: f64,
    pub half_extent: f64,
    pub resolution: usize,
    /// Row-major, y outer, x inner; cell centres, so the grid is symmetric
    /// under (x, y) → (−x, −y) and never hits the origin.
    pub points: Vec<SlicePoint>,
    pub peak_current: f64,
    /// Radius of the overlay circle, one Compton radius.
    pub compton_radius: f64,
}

impl FieldSlice {
    pub fn at(&self, ix: usize, iy: usize) -> &SlicePoint {
        &self.points[iy * self.resolution + ix]
    }

    pub fn coordinate(half_extent: f64, resolution: usize, i: usize) -> f64 {
        -half_extent + (2 * i + 1) as f64 * half_extent / resolution as f64
    }

    /// |J|-weighted mean distance from the axis: the size of the region
    /// where the current circulates.
    pub fn circulation_radius(&self) -> f64 {
        let (num, den) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(n, d), p| (n + p.j_abs * p.x.hypot(p.y), d + p.j_abs));
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[String]) -> io::Result<()> {
        for line in metadata {
            writeln!(w, "# {line}")?;
        }
        writeln!(
            w,
            "# n = {}, half_extent = {}, resolution = {}, peak_current = {}, compton_radius = {}",
            self.n, self.half_extent, self.resolution, self.peak_current, self.compton_radius
        )?;
        writeln!(w, "x,y,J_x,J_y,|J|,rho_q")?;
        for p in &self.points {
            writeln!(w, "{},{},{},{},{},{}", p.x, p.y, p.j_x, p.j_y, p.j_abs, p.rho_q)?;
        }
        Ok(())
    }
}

pub fn validate_slice(half_extent: f64, resolution: usize) -> Result<()> {
    if !(half_extent.is_finite() && half_extent > 0.0) {
        return Err(Error::invalid("half_extent", format!("must be positive, got {half_extent}")));
    }
    if resolution < 8 {
        return Err(Error::invalid("resolution", format!("must be at least 8, got {resolution}")));
    }
    Ok(())
}

/// Sample J and ρ^q on a resolution × resolution grid covering
/// [−half_extent, half_extent]² at z = 0.
pub fn current_slice(profiles: &RadialProfiles, half_extent: f64, resolution: usize) -> Result<FieldSlice> {
    validate_slice(half_extent, resolution)?;
    let corner = half_extent * std::f64::consts::SQRT_2;
    if corner > profiles.r_max() {
        return Err(Error::OutOfRange {
            radius: corner,
            r_max: profiles.r_max(),
        });
    }
    let mut points = Vec::with_capacity(resolution * resolution);
    let mut peak: f64 = 0.0;
    for iy in 0..resolution {
        let y = FieldSlice::coordinate(half_extent, resolution, iy);
        for ix in 0..resolution {
            let x = FieldSlice::coordinate(half_extent, resolution, ix);
            let j = densities::current_density(profiles, [x, y, 0.0])?;
            let rho_q = densities::charge_density(profiles, [x, y, 0.0])?;
            let j_abs = j[0].hypot(j[1]);
            peak = peak.max(j_abs);
            points.push(SlicePoint {
                x,
                y,
                j_x: j[0],
                j_y: j[1],
                j_abs,
                rho_q,
            });
        }
    }
    Ok(FieldSlice {
        n: profiles.n(),
        half_extent,
        resolution,
        points,
        peak_current: peak,
        compton_radius: COMPTON_RADIUS,
    })
}

/// Build profiles for each width and slice them on a common grid.
pub fn current_panels(widths: &[f64], cfg: &QuadratureConfig, half_extent: f64, resolution: usize) -> Result<Vec<FieldSlice>> {
    validate_slice(half_extent, resolution)?;
    cfg.validate()?;
    widths
        .iter()
        .map(|&n| {
            let spec = PacketSpec::new(n)?;
            let profiles = RadialProfiles::build(&spec, cfg)?;
            current_slice(&profiles, half_extent, resolution)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_spec_validation() {
        assert!(SweepSpec::default().validate().is_ok());
        let bad = |f: fn(&mut SweepSpec)| {
            let mut s = SweepSpec::default();
            f(&mut s);
            s.validate().is_err()
        };
        assert!(bad(|s| s.n_min = 0.0));
        assert!(bad(|s| s.n_max = f64::NAN));
        assert!(bad(|s| s.n_min = 200.0));
        assert!(bad(|s| s.points = 0));
        assert!(bad(|s| s.points = 1));
        assert!(bad(|s| s.observables.clear()));
        let single = SweepSpec {
            n_min: 1.0,
            n_max: 1.0,
            points: 1,
            ..Default::default()
        };
        assert!(single.validate().is_ok());
    }

    #[test]
    fn grids_hit_endpoints() {
        let g = SweepSpec::default().grid();
        assert_eq!(g.len(), 25);
        assert_eq!(g[0], 0.01);
        assert_eq!(g[24], 100.0);
        assert!((g[12] - 1.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let lin = SweepSpec {
            spacing: Spacing::Linear,
            n_min: 1.0,
            n_max: 3.0,
            points: 5,
            ..Default::default()
        };
        assert_eq!(lin.grid(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!("LOG".parse::<Spacing>().unwrap(), Spacing::Log);
        assert!("cubic".parse::<Spacing>().is_err());
    }

    #[test]
    fn slice_is_antisymmetric_and_rejects_bad_grids() {
        let spec = PacketSpec::new(2.0).unwrap();
        let cfg = QuadratureConfig {
            radial_nodes: 400,
            ..Default::default()
        };
        let p = RadialProfiles::build(&spec, &cfg).unwrap();
        let s = current_slice(&p, 1.5, 8).unwrap();
        assert_eq!(s.points.len(), 64);
        for iy in 0..8 {
            for ix in 0..8 {
                let a = s.at(ix, iy);
                let b = s.at(7 - ix, 7 - iy);
                assert_eq!(a.x, -b.x);
                assert!((a.j_x + b.j_x).abs() <= 1e-14 * s.peak_current);
                assert!((a.j_y + b.j_y).abs() <= 1e-14 * s.peak_current);
            }
        }
        assert!(current_slice(&p, 1.5, 7).is_err());
        assert!(current_slice(&p, -1.0, 8).is_err());
        assert!(matches!(current_slice(&p, 100.0, 8), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn slice_csv_has_one_row_per_point() {
        let spec = PacketSpec::new(8.0).unwrap();
        let cfg = QuadratureConfig {
            radial_nodes: 400,
            ..Default::default()
        };
        let p = RadialProfiles::build(&spec, &cfg).unwrap();
        let s = current_slice(&p, 1.5, 8).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, &["command = slice".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let data: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "x,y,J_x,J_y,|J|,rho_q");
        assert_eq!(data.len(), 65);
    }

    #[test]
    fn failing_rows_do_not_abort_the_sweep() {
        let spec = SweepSpec {
            n_min: 0.5,
            n_max: 2.0,
            points: 3,
            observables: vec![Observable::LTotal],
            quadrature: QuadratureConfig {
                radial_nodes: 100,
                rel_tol_2d: 1e-15,
                ..Default::default()
            },
            ..Default::default()
        };
        let table = run_sweep(&spec).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert_eq!(table.failures(), 3);
        let mut buf = Vec::new();
        table.write_csv(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row = text.lines().nth(1).unwrap();
        assert!(row.starts_with("0.5,,,\""), "{row}");
    }
}
