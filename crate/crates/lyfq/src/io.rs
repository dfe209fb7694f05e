//! File formats: the JSON polynomial interchange format and the CSV
//! emitters/readers for zeros, histograms, atoms, and CDF overlays. Floats
//! are written with 17 significant digits so binary64 values round-trip
//! bit-exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gapdist::GapDistribution;
use crate::polycore::MultiPoly;
use crate::zeroline::ZeroSet;

/// Guards against absurd allocations when parsing untrusted input.
pub const MAX_VARS: usize = 32;
pub const MAX_DEGREE_ENTRY: u32 = 10_000;
pub const MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Serialize, Deserialize)]
struct CoeffJson {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct PolyJson {
    n: usize,
    degree: Vec<u32>,
    coeffs: Vec<CoeffJson>,
}

/// Parse the JSON polynomial format:
/// `{"n":2,"degree":[2,2],"coeffs":[{"alpha":[0,0],"re":16.0,"im":0.0},...]}`.
pub fn poly_from_json_str(s: &str) -> Result<MultiPoly> {
    let pj: PolyJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if pj.n == 0 || pj.n > MAX_VARS {
        return Err(Error::Parse(format!(
            "variable count {} out of range 1..={MAX_VARS}",
            pj.n
        )));
    }
    if pj.degree.len() != pj.n {
        return Err(Error::Parse("degree vector length must equal n".into()));
    }
    if pj.degree.iter().any(|&d| d > MAX_DEGREE_ENTRY) {
        return Err(Error::Parse("degree entry too large".into()));
    }
    if pj.coeffs.len() > MAX_TERMS {
        return Err(Error::Parse("too many terms".into()));
    }
    let mut terms = Vec::with_capacity(pj.coeffs.len());
    for c in &pj.coeffs {
        if c.alpha.len() != pj.n {
            return Err(Error::Parse("alpha length must equal n".into()));
        }
        if c.alpha.iter().zip(&pj.degree).any(|(&a, &d)| a > d) {
            return Err(Error::Parse("alpha exceeds declared degree".into()));
        }
        if !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::Parse("coefficients must be finite".into()));
        }
        terms.push((c.alpha.clone(), Complex64::new(c.re, c.im)));
    }
    let p = MultiPoly::new(pj.n, terms)?;
    if p.degree() != pj.degree.as_slice() {
        return Err(Error::Parse(format!(
            "declared degree {:?} is not attained (actual {:?})",
            pj.degree,
            p.degree()
        )));
    }
    Ok(p)
}

pub fn poly_to_json_string(p: &MultiPoly) -> String {
    let pj = PolyJson {
        n: p.n(),
        degree: p.degree().to_vec(),
        coeffs: p
            .terms()
            .map(|(alpha, a)| CoeffJson {
                alpha: alpha.to_vec(),
                re: a.re,
                im: a.im,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&pj).expect("serialization cannot fail")
}

/// 17 significant digits: lossless decimal for binary64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn zeros_to_csv(zs: &ZeroSet) -> String {
    let mut out = String::from("x,mult\n");
    for &(x, m) in zs.zeros() {
        out.push_str(&fmt_f64(x));
        out.push(',');
        out.push_str(&m.to_string());
        out.push('\n');
    }
    out
}

/// Histogram CSV `bin_left,bin_right,mass` with `bins` equal-width bins over
/// `[0, max_gap]`.
pub fn histogram_csv(g: &GapDistribution, bins: usize) -> String {
    let hi = g.max_gap().max(f64::MIN_POSITIVE);
    let width = hi / bins.max(1) as f64;
    let mut mass = vec![0.0f64; bins.max(1)];
    for &(gap, w) in g.samples() {
        let mut idx = (gap / width) as usize;
        if idx >= mass.len() {
            idx = mass.len() - 1;
        }
        mass[idx] += w;
    }
    let mut out = String::from("bin_left,bin_right,mass\n");
    for (i, m) in mass.iter().enumerate() {
        out.push_str(&fmt_f64(i as f64 * width));
        out.push(',');
        out.push_str(&fmt_f64((i + 1) as f64 * width));
        out.push(',');
        out.push_str(&fmt_f64(*m));
        out.push('\n');
    }
    out
}

pub fn atoms_csv(atoms: &[(f64, f64)]) -> String {
    let mut out = String::from("location,mass\n");
    for &(loc, m) in atoms {
        out.push_str(&fmt_f64(loc));
        out.push(',');
        out.push_str(&fmt_f64(m));
        out.push('\n');
    }
    out
}

/// CDF CSV `x,cdf` at every distinct sample point (plus the origin).
pub fn cdf_csv(g: &GapDistribution) -> String {
    let mut out = String::from("x,cdf\n");
    out.push_str(&fmt_f64(0.0));
    out.push(',');
    out.push_str(&fmt_f64(g.cdf(0.0)));
    out.push('\n');
    let mut acc = 0.0f64;
    let mut prev: Option<f64> = None;
    for &(x, w) in g.samples() {
        if let Some(px) = prev {
            if px != x {
                out.push_str(&fmt_f64(px));
                out.push(',');
                out.push_str(&fmt_f64(acc));
                out.push('\n');
            }
        }
        acc += w;
        prev = Some(x);
    }
    if let Some(px) = prev {
        out.push_str(&fmt_f64(px));
        out.push(',');
        out.push_str(&fmt_f64(acc));
        out.push('\n');
    }
    out
}

/// A piecewise-constant CDF read back from a `x,cdf` CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfCurve {
    pub points: Vec<(f64, f64)>,
}

impl CdfCurve {
    pub fn value(&self, x: f64) -> f64 {
        // right-continuous step interpolation
        match self
            .points
            .binary_search_by(|&(px, _)| px.partial_cmp(&x).unwrap())
        {
            Ok(i) => self.points[i].1,
            Err(0) => 0.0,
            Err(i) => self.points[i - 1].1,
        }
    }

    /// Sup distance between two curves over the union of breakpoints.
    pub fn ks(&self, other: &CdfCurve) -> f64 {
        let mut worst = 0.0f64;
        for &(x, _) in self.points.iter().chain(&other.points) {
            worst = worst.max((self.value(x) - other.value(x)).abs());
        }
        worst
    }

    /// L1 distance between the two step curves.
    pub fn wasserstein1(&self, other: &CdfCurve) -> f64 {
        let mut xs: Vec<f64> = self
            .points
            .iter()
            .chain(&other.points)
            .map(|&(x, _)| x)
            .collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let mut acc = 0.0f64;
        for w in xs.windows(2) {
            acc += (self.value(w[0]) - other.value(w[0])).abs() * (w[1] - w[0]);
        }
        acc
    }
}

/// Parse a `x,cdf` CSV (header required) into a step curve. Tolerant of
/// trailing whitespace; rejects non-finite values, unsorted x, or cdf
/// outside [0, 1 + eps].
pub fn parse_cdf_csv(s: &str) -> Result<CdfCurve> {
    let mut lines = s.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    let header = header.trim().to_ascii_lowercase();
    if header != "x,cdf" {
        return Err(Error::Parse(format!("expected header 'x,cdf', got '{header}'")));
    }
    let mut points = Vec::new();
    for (no, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let x: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("line {}: missing x", no + 2)))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", no + 2)))?;
        let c: f64 = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("line {}: missing cdf", no + 2)))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: {e}", no + 2)))?;
        if parts.next().is_some() {
            return Err(Error::Parse(format!("line {}: too many fields", no + 2)));
        }
        if !x.is_finite() || !c.is_finite() || !(-1e-9..=1.0 + 1e-9).contains(&c) {
            return Err(Error::Parse(format!("line {}: values out of range", no + 2)));
        }
        if let Some(&(px, pc)) = points.last() {
            if x < px || c < pc - 1e-12 {
                return Err(Error::Parse(format!("line {}: not monotone", no + 2)));
            }
        }
        if points.len() >= MAX_TERMS {
            return Err(Error::Parse("too many rows".into()));
        }
        points.push((x, c));
    }
    if points.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(CdfCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gapdist;
    use crate::randutil::SeededStream;

    #[test]
    fn poly_json_round_trip_is_bit_exact() {
        let p = MultiPoly::running_example();
        let s = poly_to_json_string(&p);
        let q = poly_from_json_str(&s).unwrap();
        assert_eq!(p, q);

        // awkward binary64 values survive
        let p = MultiPoly::new(
            1,
            vec![
                (vec![0], Complex64::new(0.1 + 0.2, -1e-300)),
                (vec![3], Complex64::new(f64::MIN_POSITIVE, 1.0 / 3.0)),
            ],
        )
        .unwrap();
        let q = poly_from_json_str(&poly_to_json_string(&p)).unwrap();
        for (alpha, a) in p.terms() {
            let b = q.coeff(alpha);
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn poly_json_rejects_malformed() {
        assert!(poly_from_json_str("").is_err());
        assert!(poly_from_json_str("{}").is_err());
        assert!(poly_from_json_str(r#"{"n":0,"degree":[],"coeffs":[]}"#).is_err());
        assert!(
            poly_from_json_str(r#"{"n":1,"degree":[2],"coeffs":[{"alpha":[3],"re":1,"im":0}]}"#)
                .is_err()
        );
        // declared degree not attained
        assert!(
            poly_from_json_str(r#"{"n":1,"degree":[2],"coeffs":[{"alpha":[0],"re":1,"im":0}]}"#)
                .is_err()
        );
        // non-finite coefficient
        assert!(poly_from_json_str(
            r#"{"n":1,"degree":[1],"coeffs":[{"alpha":[1],"re":1e999,"im":0}]}"#
        )
        .is_err());
    }

    #[test]
    fn cdf_csv_round_trip_and_metrics() {
        let mut rng = SeededStream::new(30, 0).rng();
        let g = gapdist::poisson_reference(3, 500, &mut rng).unwrap();
        let csv = cdf_csv(&g);
        let curve = parse_cdf_csv(&csv).unwrap();
        assert!(curve.ks(&curve) == 0.0);
        assert!(curve.wasserstein1(&curve) == 0.0);
        // terminal value reaches 1
        assert!((curve.points.last().unwrap().1 - 1.0).abs() < 1e-9);

        let g2 = gapdist::poisson_reference(3, 500, &mut rng).unwrap();
        let c2 = parse_cdf_csv(&cdf_csv(&g2)).unwrap();
        let ks_curves = curve.ks(&c2);
        let ks_direct = gapdist::ks_distance(&g, &g2);
        assert!((ks_curves - ks_direct).abs() < 0.02);
    }

    #[test]
    fn cdf_parser_rejects_garbage() {
        assert!(parse_cdf_csv("").is_err());
        assert!(parse_cdf_csv("nope\n1,2\n").is_err());
        assert!(parse_cdf_csv("x,cdf\n1,0.5\n0.5,0.7\n").is_err()); // x not sorted
        assert!(parse_cdf_csv("x,cdf\n1,0.9\n2,0.1\n").is_err()); // cdf dropped
        assert!(parse_cdf_csv("x,cdf\n1,nan\n").is_err());
        assert!(parse_cdf_csv("x,cdf\n1,0.5,9\n").is_err());
    }

    #[test]
    fn histogram_masses_sum_to_one() {
        let mut rng = SeededStream::new(31, 0).rng();
        let g = gapdist::poisson_reference(4, 400, &mut rng).unwrap();
        let csv = histogram_csv(&g, 32);
        let total: f64 = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}
