//! Reality domains of the spectrum in `(gamma, delta, z)` space.
//!
//! [`scan`] classifies a rectangular grid, [`reality_boundary`] bisects the
//! `all_real` predicate along one axis to locate a critical coupling.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{assemble_amended, AmendedCouplingSet};
use crate::lattice::GraphFamilySpec;
use crate::polyring::rational::{from_f64, parse_rational, rat, serde_rational, to_f64};
use crate::polyring::{Rational, Var};
use crate::spectra::{spectrum_uncertified, RealityClass, DEFAULT_TOL};

pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-8;
const MAX_BISECTIONS: u32 = 200;

/// The three coupling axes, in scan order.
pub const AXES: [Var; 3] = [Var::Gamma, Var::Delta, Var::Z];

pub fn parse_axis_name(s: &str) -> Result<Var> {
    match s.trim() {
        "gamma" | "γ" => Ok(Var::Gamma),
        "delta" | "δ" => Ok(Var::Delta),
        "z" => Ok(Var::Z),
        other => Err(Error::parse(other, "axis must be gamma, delta or z")),
    }
}

fn axis_rank(v: Var) -> usize {
    AXES.iter().position(|&a| a == v).unwrap_or(usize::MAX)
}

fn get(c: &AmendedCouplingSet, v: Var) -> &Rational {
    match v {
        Var::Gamma => &c.gamma,
        Var::Delta => &c.delta,
        _ => &c.z,
    }
}

fn set(c: &mut AmendedCouplingSet, v: Var, x: Rational) {
    match v {
        Var::Gamma => c.gamma = x,
        Var::Delta => c.delta = x,
        _ => c.z = x,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanAxis {
    pub var: Var,
    #[serde(with = "serde_rational")]
    pub min: Rational,
    #[serde(with = "serde_rational")]
    pub max: Rational,
    pub count: usize,
}

impl ScanAxis {
    pub fn new(var: Var, min: Rational, max: Rational, count: usize) -> Result<Self> {
        if !AXES.contains(&var) {
            return Err(Error::domain(format!(
                "{} is not a coupling axis",
                var.name()
            )));
        }
        match count {
            0 => return Err(Error::domain("axis needs at least one point")),
            1 if min != max => {
                return Err(Error::domain("a single-point axis needs min = max"));
            }
            _ if min > max => return Err(Error::domain("axis min exceeds max")),
            _ => {}
        }
        Ok(Self {
            var,
            min,
            max,
            count,
        })
    }

    /// Parses `name=min:max:count`.
    pub fn parse(s: &str) -> Result<Self> {
        let (name, range) = s
            .split_once('=')
            .ok_or_else(|| Error::parse(s, "expected name=min:max:count"))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [min, max, count] = parts[..] else {
            return Err(Error::parse(s, "expected name=min:max:count"));
        };
        let count = count
            .trim()
            .parse()
            .map_err(|_| Error::parse(s, "count must be a non-negative integer"))?;
        Self::new(
            parse_axis_name(name)?,
            parse_rational(min)?,
            parse_rational(max)?,
            count,
        )
    }

    /// Parses `;`-separated axis specs, returned in scan order.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        let axes = s
            .split(';')
            .filter(|p| !p.trim().is_empty())
            .map(Self::parse)
            .collect::<Result<Vec<_>>>()?;
        normalize_axes(axes)
    }

    /// Exact value of the `i`-th grid point.
    pub fn value(&self, i: usize) -> Rational {
        if self.count == 1 {
            return self.min.clone();
        }
        let step = (&self.max - &self.min) / rat(self.count as i64 - 1, 1);
        &self.min + step * rat(i as i64, 1)
    }
}

fn normalize_axes(mut axes: Vec<ScanAxis>) -> Result<Vec<ScanAxis>> {
    axes.sort_by_key(|a| axis_rank(a.var));
    if axes.windows(2).any(|w| w[0].var == w[1].var) {
        return Err(Error::domain("an axis is listed twice"));
    }
    Ok(axes)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub gamma: f64,
    pub delta: f64,
    pub z: f64,
    pub all_real: bool,
    pub max_imag: f64,
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub axes: Vec<ScanAxis>,
    pub fixed: AmendedCouplingSet,
    pub records: Vec<ScanRecord>,
}

/// Classifies one coupling point. Numerical trouble is reported as a
/// marginal, non-real point instead of an error.
pub fn classify_point(spec: &GraphFamilySpec, c: &AmendedCouplingSet, tol: f64) -> RealityClass {
    let m = assemble_amended(spec, c).to_f64();
    match spectrum_uncertified(&m, tol) {
        Ok(s) => RealityClass {
            all_real: s.all_real,
            max_imag: s.max_imag,
            marginal: s.marginal || s.worst_residual().is_nan() || s.worst_residual() > tol,
        },
        Err(_) => RealityClass {
            all_real: false,
            max_imag: f64::NAN,
            marginal: true,
        },
    }
}

/// Grid classification, row-major over the axes in the order gamma, delta, z.
pub fn scan(
    spec: &GraphFamilySpec,
    axes: &[ScanAxis],
    fixed: &AmendedCouplingSet,
    tol: f64,
) -> Result<ScanGrid> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let axes = normalize_axes(axes.to_vec())?;
    let total: usize = axes.iter().map(|a| a.count).product();
    let values: Vec<Vec<Rational>> = axes
        .iter()
        .map(|a| (0..a.count).map(|i| a.value(i)).collect())
        .collect();
    let records = (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut c = fixed.clone();
            let mut rest = flat;
            for (axis, vals) in axes.iter().zip(&values).rev() {
                set(&mut c, axis.var, vals[rest % axis.count].clone());
                rest /= axis.count;
            }
            let class = classify_point(spec, &c, tol);
            ScanRecord {
                gamma: to_f64(&c.gamma),
                delta: to_f64(&c.delta),
                z: to_f64(&c.z),
                all_real: class.all_real,
                max_imag: class.max_imag,
                marginal: class.marginal,
            }
        })
        .collect();
    Ok(ScanGrid {
        axes,
        fixed: fixed.clone(),
        records,
    })
}

/// `%.9g`-style formatting.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl ScanGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,delta,z,all_real,max_imag,marginal\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                format_sig9(r.gamma),
                format_sig9(r.delta),
                format_sig9(r.z),
                r.all_real,
                format_sig9(r.max_imag),
                r.marginal
            );
        }
        out
    }

    pub fn n_real(&self) -> usize {
        self.records.iter().filter(|r| r.all_real).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryResult {
    pub axis: Var,
    pub fixed: AmendedCouplingSet,
    pub critical: f64,
    pub bracket_width: f64,
    pub iterations: u32,
    /// Final bracket; `lo` is on the real side.
    pub lo: f64,
    pub hi: f64,
}

impl BoundaryResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Bisects `all_real` along `axis` between `lo` (real side) and `hi`
/// (complex side); `lo > hi` is allowed for boundaries on the negative side.
/// A marginal midpoint is resolved by probing a quarter width to each side.
pub fn reality_boundary(
    spec: &GraphFamilySpec,
    axis: Var,
    fixed: &AmendedCouplingSet,
    bracket: (f64, f64),
    tol: f64,
) -> Result<BoundaryResult> {
    if !AXES.contains(&axis) {
        return Err(Error::domain(format!(
            "{} is not a coupling axis",
            axis.name()
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (mut lo, mut hi) = bracket;
    let at = |x: f64| -> Result<RealityClass> {
        let mut c = fixed.clone();
        set(&mut c, axis, from_f64(x)?);
        Ok(classify_point(spec, &c, DEFAULT_TOL))
    };
    let (c_lo, c_hi) = rayon::join(|| at(lo), || at(hi));
    let (real_lo, real_hi) = (c_lo?.all_real, c_hi?.all_real);
    if !real_lo || real_hi {
        return Err(Error::Bracket {
            lo,
            hi,
            real_lo,
            real_hi,
        });
    }
    let mut iterations = 0;
    while (hi - lo).abs() > tol && iterations < MAX_BISECTIONS {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let c = at(mid)?;
        if !c.marginal {
            if c.all_real {
                lo = mid;
            } else {
                hi = mid;
            }
            continue;
        }
        let quarter = 0.25 * (hi - lo);
        let (below, above) = rayon::join(|| at(mid - quarter), || at(mid + quarter));
        let (below, above) = (below?, above?);
        let mut moved = false;
        if !below.marginal && below.all_real {
            lo = mid - quarter;
            moved = true;
        }
        if !above.marginal && !above.all_real {
            hi = mid + quarter;
            moved = true;
        }
        if !moved {
            if c.all_real {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    if (hi - lo).abs() > tol {
        return Err(Error::NoConvergence);
    }
    let mut fixed = fixed.clone();
    set(&mut fixed, axis, Rational::from_integer(0.into()));
    Ok(BoundaryResult {
        axis,
        fixed,
        critical: 0.5 * (lo + hi),
        bracket_width: (hi - lo).abs(),
        iterations,
        lo,
        hi,
    })
}

/// Fixed couplings with one axis value replaced, for reporting.
pub fn with_axis(fixed: &AmendedCouplingSet, axis: Var, x: Rational) -> AmendedCouplingSet {
    let mut c = fixed.clone();
    set(&mut c, axis, x);
    c
}

pub fn axis_value(c: &AmendedCouplingSet, axis: Var) -> &Rational {
    get(c, axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_graph;
    use crate::polyring::rational::int;

    fn zero() -> AmendedCouplingSet {
        AmendedCouplingSet::new(int(0), int(0), int(0))
    }

    fn boundary(k: usize, axis: Var, fixed: AmendedCouplingSet, bracket: (f64, f64)) -> f64 {
        let spec = build_graph(k, 1).unwrap();
        reality_boundary(&spec, axis, &fixed, bracket, DEFAULT_BOUNDARY_TOL)
            .unwrap()
            .critical
    }

    #[test]
    fn axis_parsing() {
        let axes = ScanAxis::parse_list("delta=-0.5:0.5:101; gamma=-3/2:1.5:11").unwrap();
        assert_eq!(axes[0].var, Var::Gamma);
        assert_eq!(axes[0].min, rat(-3, 2));
        assert_eq!(axes[1].count, 101);
        assert_eq!(axes[1].value(75), rat(1, 4));
        assert_eq!(axes[0].value(10), rat(3, 2));
        for bad in [
            "gamma=0:1",
            "eta=0:1:3",
            "gamma=1:0:3",
            "gamma=0:1:1",
            "gamma=0:1:0",
            "gamma=0:1:x",
        ] {
            assert!(ScanAxis::parse(bad).is_err(), "{bad}");
        }
        assert!(ScanAxis::parse_list("z=0:1:2;z=0:1:3").is_err());
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.25), "0.25");
        assert_eq!(format_sig9(-1.5), "-1.5");
        assert_eq!(format_sig9(1.0307764064044151), "1.03077641");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(1e-12), "1e-12");
        assert_eq!(format_sig9(123456789012.0), "1.23456789e11");
        assert_eq!(format_sig9(0.000123456789), "0.000123456789");
        assert_eq!(format_sig9(f64::NAN), "nan");
    }

    #[test]
    fn k1_grid_is_a_rectangle() {
        let spec = build_graph(1, 1).unwrap();
        let axes = ScanAxis::parse_list("gamma=-1.5:1.5:31;delta=-0.5:0.5:21").unwrap();
        let grid = scan(&spec, &axes, &zero(), DEFAULT_TOL).unwrap();
        assert_eq!(grid.records.len(), 31 * 21);
        assert_eq!((grid.records[0].gamma, grid.records[0].delta), (-1.5, -0.5));
        assert_eq!(
            (grid.records[1].gamma, grid.records[1].delta),
            (-1.5, -0.45)
        );
        let gmax = 17f64.sqrt() / 4.0;
        for r in &grid.records {
            if r.delta.abs() == 0.25 {
                continue;
            }
            let inside = r.gamma.abs() < gmax && r.delta.abs() < 0.25;
            assert_eq!(r.all_real, inside, "{r:?}");
        }
    }

    #[test]
    fn k3_small_z_is_real() {
        let spec = build_graph(3, 1).unwrap();
        let axes = ScanAxis::parse_list("z=-3:3:61").unwrap();
        let grid = scan(&spec, &axes, &zero(), DEFAULT_TOL).unwrap();
        assert_eq!(grid.records.len(), 61);
        for r in grid.records.iter().filter(|r| r.z.abs() <= 0.5) {
            assert!(r.all_real && !r.marginal, "{r:?}");
        }
    }

    #[test]
    fn single_point_axes() {
        let spec = build_graph(2, 1).unwrap();
        let axes = ScanAxis::parse_list("gamma=1/2:1/2:1;delta=0:0:1").unwrap();
        let grid = scan(&spec, &axes, &zero(), DEFAULT_TOL).unwrap();
        assert_eq!(grid.records.len(), 1);
        assert!(grid.records[0].all_real);
        let csv = grid.to_csv();
        assert_eq!(
            csv,
            "gamma,delta,z,all_real,max_imag,marginal\n0.5,0,0,true,0,false\n"
        );
    }

    #[test]
    fn refinement_keeps_shared_classifications() {
        let spec = build_graph(1, 1).unwrap();
        let coarse = scan(
            &spec,
            &ScanAxis::parse_list("gamma=-2:2:9;delta=-1:1:9").unwrap(),
            &zero(),
            DEFAULT_TOL,
        )
        .unwrap();
        let fine = scan(
            &spec,
            &ScanAxis::parse_list("gamma=-2:2:17;delta=-1:1:17").unwrap(),
            &zero(),
            DEFAULT_TOL,
        )
        .unwrap();
        for (i, r) in coarse.records.iter().enumerate() {
            let f = &fine.records[(i / 9) * 2 * 17 + (i % 9) * 2];
            assert_eq!((r.gamma, r.delta), (f.gamma, f.delta));
            if !r.marginal && !f.marginal {
                assert_eq!(r.all_real, f.all_real);
            }
        }
    }

    #[test]
    fn closed_form_boundaries() {
        let cases = [
            (1, Var::Gamma, 17f64.sqrt() / 4.0),
            (1, Var::Delta, 0.25),
            (2, Var::Gamma, 21f64.sqrt() / 4.0),
            (2, Var::Delta, 5f64.sqrt() / 4.0),
        ];
        for (k, axis, want) in cases {
            let got = boundary(k, axis, zero(), (0.0, 2.0));
            assert!((got - want).abs() < 1e-6, "K={k} {axis:?}: {got} vs {want}");
        }
        let b = boundary(1, Var::Delta, zero(), (0.0, 1.0));
        assert!((b - 0.25).abs() < 1e-9, "{b:.12}");
    }

    #[test]
    fn boundaries_are_symmetric() {
        for (k, axis) in [(1, Var::Gamma), (2, Var::Delta)] {
            let plus = boundary(k, axis, zero(), (0.0, 2.0));
            let minus = boundary(k, axis, zero(), (0.0, -2.0));
            assert!((plus + minus).abs() < 2e-8, "{plus} {minus}");
        }
    }

    #[test]
    fn boundary_ignores_the_other_coupling() {
        let base = boundary(2, Var::Gamma, zero(), (0.0, 2.0));
        let shifted = boundary(
            2,
            Var::Gamma,
            AmendedCouplingSet::new(int(0), rat(1, 5), int(0)),
            (0.0, 2.0),
        );
        assert!((base - shifted).abs() < 2e-8);
        let base = boundary(1, Var::Delta, zero(), (0.0, 2.0));
        let shifted = boundary(
            1,
            Var::Delta,
            AmendedCouplingSet::new(rat(1, 2), int(0), int(0)),
            (0.0, 2.0),
        );
        assert!((base - shifted).abs() < 2e-8);
    }

    #[test]
    fn boundary_brackets_the_transition() {
        let spec = build_graph(1, 1).unwrap();
        let r = reality_boundary(&spec, Var::Gamma, &zero(), (0.0, 2.0), 1e-8).unwrap();
        assert!(r.bracket_width <= 1e-8);
        let at = |x: f64| {
            classify_point(
                &spec,
                &with_axis(&zero(), Var::Gamma, from_f64(x).unwrap()),
                DEFAULT_TOL,
            )
        };
        assert!(at(r.critical - r.bracket_width).all_real);
        assert!(!at(r.critical + r.bracket_width).all_real);
        let js: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(js["axis"], "gamma");
    }

    #[test]
    fn bad_brackets() {
        let spec = build_graph(1, 1).unwrap();
        let err = reality_boundary(&spec, Var::Gamma, &zero(), (0.0, 0.5), 1e-8).unwrap_err();
        assert!(matches!(
            err,
            Error::Bracket {
                real_lo: true,
                real_hi: true,
                ..
            }
        ));
        let err = reality_boundary(&spec, Var::Gamma, &zero(), (2.0, 0.0), 1e-8).unwrap_err();
        assert!(matches!(
            err,
            Error::Bracket {
                real_lo: false,
                real_hi: true,
                ..
            }
        ));
        assert!(reality_boundary(&spec, Var::E, &zero(), (0.0, 2.0), 1e-8).is_err());
    }
}
