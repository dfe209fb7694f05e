//! The regularizing perturbation: change of basis to the real-stable side
//! through a Mobius anchor, one derivative step there, reconstruction, and
//! diagnostics for the resulting zero sets.
//!
//! A self-inversive polynomial can be written, for any anchor `x` with
//! `p(exp(ix)) != 0`, as
//!
//! `p = scalar * sum_alpha a_alpha (-i)^{|alpha|} (z + e^{ix})^alpha (z - e^{ix})^{d - alpha}`
//!
//! with real `a_alpha` and unimodular `scalar`. On that side the perturbation
//! is `a'_beta = a_beta + lambda * sum_j (beta_j + 1) a_{beta + e_j}` (the
//! derivative operator on the bihomogeneous representative), after which the
//! polynomial is reconstructed with the same scalar and anchor. Iterating
//! total-degree many times removes all singular torus zeros.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::polycore::{MultiPoly, PROPORTIONALITY_REL_TOL};
use crate::zeroline::ZeroSet;

type C64 = Complex64;

/// Relative floor for `|p(exp(ix))|` at an admissible anchor.
pub const ANCHOR_REL_TOL: f64 = 1e-6;
/// Allowed relative imaginary residue when truncating basis coefficients.
pub const BASIS_IMAG_REL_TOL: f64 = 1e-9;
/// Default scale-relative gradient floor for flagging singular zeros.
pub const GRAD_REL_TOL: f64 = 1e-6;
/// Anchor probes drawn when selecting an anchor at random.
pub const ANCHOR_PROBES: usize = 64;

/// Dense tensor indexed by exponents `0 <= alpha <= d` (row-major in the
/// variable order).
#[derive(Clone, Debug)]
struct Tensor {
    dims: Vec<usize>, // d_j + 1
    data: Vec<C64>,
}

impl Tensor {
    fn zeros(dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        Tensor {
            dims,
            data: vec![C64::new(0.0, 0.0); len],
        }
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut s = vec![1usize; n];
        for j in (0..n.saturating_sub(1)).rev() {
            s[j] = s[j + 1] * self.dims[j + 1];
        }
        s
    }

    fn offset(&self, idx: &[u32], strides: &[usize]) -> usize {
        idx.iter()
            .zip(strides)
            .map(|(&i, &s)| i as usize * s)
            .sum()
    }

    /// Replace the tensor by its image under a per-axis linear map
    /// `new[m, rest] = sum_a M[m][a] old[a, rest]`.
    fn apply_axis(&mut self, axis: usize, m: &[Vec<C64>]) {
        let dim = self.dims[axis];
        assert_eq!(m.len(), dim);
        let stride = self.strides()[axis];
        let total = self.data.len();
        let mut scratch = vec![C64::new(0.0, 0.0); dim];
        for base in 0..total {
            if !(base / stride).is_multiple_of(dim) {
                continue;
            }
            for (a, s) in scratch.iter_mut().enumerate() {
                *s = self.data[base + a * stride];
            }
            for (row_i, row) in m.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (a, &s) in scratch.iter().enumerate() {
                    acc += row[a] * s;
                }
                self.data[base + row_i * stride] = acc;
            }
        }
    }
}

/// Coefficients of `p` in the anchored basis: `p = scalar * sum a_alpha
/// (-i)^{|alpha|} (z + e^{ix})^alpha (z - e^{ix})^{d-alpha}` with real `a`.
#[derive(Clone, Debug)]
pub struct MobiusCoeffs {
    pub x: Vec<f64>,
    pub scalar: C64,
    pub degree: Vec<u32>,
    dims: Vec<usize>,
    a: Vec<f64>,
}

impl MobiusCoeffs {
    pub fn coeff(&self, alpha: &[u32]) -> f64 {
        let mut stride = 1usize;
        let mut off = 0usize;
        for j in (0..self.dims.len()).rev() {
            off += alpha[j] as usize * stride;
            stride *= self.dims[j];
        }
        self.a[off]
    }
}

/// Coefficient of `w^m` in `(w + u)^a (w + v)^{b}`, tabulated for all
/// `m <= a + b` as a dense column.
fn pair_power_column(a: usize, b: usize, u: C64, v: C64) -> Vec<C64> {
    let mut col = vec![C64::new(0.0, 0.0); a + b + 1];
    col[0] = C64::new(1.0, 0.0);
    let mut deg = 0usize;
    for _ in 0..a {
        conv_linear(&mut col, deg, u);
        deg += 1;
    }
    for _ in 0..b {
        conv_linear(&mut col, deg, v);
        deg += 1;
    }
    col
}

// multiply the length-(deg+1) prefix by (w + r) in place
fn conv_linear(col: &mut [C64], deg: usize, r: C64) {
    for m in (0..=deg + 1).rev() {
        let lower = if m >= 1 { col[m - 1] } else { C64::new(0.0, 0.0) };
        let own = if m <= deg { col[m] } else { C64::new(0.0, 0.0) };
        col[m] = lower + own * r;
    }
}

fn dense_from_poly(p: &MultiPoly) -> Tensor {
    let dims: Vec<usize> = p.degree().iter().map(|&d| d as usize + 1).collect();
    let mut t = Tensor::zeros(dims);
    let strides = t.strides();
    for (alpha, a) in p.terms() {
        let off = t.offset(alpha, &strides);
        t.data[off] = a;
    }
    t
}

/// Change of basis from monomial coefficients to the anchored real-stable
/// basis. Requires `p` self-inversive up to a unimodular factor and an anchor
/// off the zero set.
pub fn mobius_basis_coeffs(p: &MultiPoly, x: &[f64]) -> Result<MobiusCoeffs> {
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: x.len(),
        });
    }
    if p.self_inversive_factor(PROPORTIONALITY_REL_TOL).is_none() {
        return Err(Error::NotSelfInversive);
    }
    let at_anchor = p.eval_torus(x)?.norm();
    let floor = ANCHOR_REL_TOL * p.coeff_scale();
    if at_anchor <= floor {
        return Err(Error::AnchorOnZeroSet { value: at_anchor });
    }

    // forward Mobius transform: q(w) = prod_j (w_j + i)^{d_j} p(phi(w)) has
    // coefficient tensor  Q = sum_alpha p_alpha e^{i<x,alpha>}
    // prod_j (w-i)^{alpha_j} (w+i)^{d_j-alpha_j}
    let mut t = dense_from_poly(p);
    let degree = p.degree().to_vec();
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    for (axis, &dj) in degree.iter().enumerate() {
        let dim = dj as usize + 1;
        let mut m = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for a in 0..dim {
            let col = pair_power_column(a, dim - 1 - a, minus_i, plus_i);
            let phase = C64::cis(x[axis] * a as f64);
            for (row, rows) in m.iter_mut().enumerate() {
                rows[a] = col[row] * phase;
            }
        }
        t.apply_axis(axis, &m);
    }

    // rotate to real: largest coefficient fixes the phase, magnitude 2^{|d|}
    // is split off so the scalar stays unimodular
    let total: u32 = degree.iter().sum();
    let max = t.data.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let lead = t
        .data
        .iter()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
        .copied()
        .unwrap();
    let psi = lead.arg();
    let rot = C64::cis(-psi);
    let two_pow = 2f64.powi(total as i32);
    let mut a = Vec::with_capacity(t.data.len());
    let mut worst_im = 0.0f64;
    for z in &t.data {
        let w = z * rot;
        worst_im = worst_im.max(w.im.abs());
        a.push(w.re / two_pow);
    }
    if worst_im > BASIS_IMAG_REL_TOL * max {
        return Err(Error::NotSelfInversive);
    }
    // scalar = e^{i psi} e^{-i<x,d>} i^{|d|}
    let xd: f64 = x.iter().zip(&degree).map(|(xi, &d)| xi * d as f64).sum();
    let scalar = C64::cis(psi - xd + std::f64::consts::FRAC_PI_2 * total as f64);
    Ok(MobiusCoeffs {
        x: x.to_vec(),
        scalar,
        dims: degree.iter().map(|&d| d as usize + 1).collect(),
        degree,
        a,
    })
}

/// Reassemble the polynomial from anchored-basis coefficients.
pub fn reconstruct(mc: &MobiusCoeffs) -> Result<MultiPoly> {
    let mut t = Tensor {
        dims: mc.dims.clone(),
        data: mc.a.iter().map(|&v| C64::new(v, 0.0)).collect(),
    };
    let minus_i = C64::new(0.0, -1.0);
    for (axis, &dj) in mc.degree.iter().enumerate() {
        let dim = dj as usize + 1;
        let anchor = C64::cis(mc.x[axis]);
        let mut m = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for a in 0..dim {
            let col = pair_power_column(a, dim - 1 - a, anchor, -anchor);
            // fold in the (-i)^{alpha_j} factor per axis
            let factor = powc(minus_i, a as u32);
            for (row, rows) in m.iter_mut().enumerate() {
                rows[a] = col[row] * factor;
            }
        }
        t.apply_axis(axis, &m);
    }
    let dims = t.dims.clone();
    let n = dims.len();
    let mut terms = Vec::with_capacity(t.data.len());
    for (off, &z) in t.data.iter().enumerate() {
        let mut idx = vec![0u32; n];
        let mut rem = off;
        for j in (0..n).rev() {
            idx[j] = (rem % dims[j]) as u32;
            rem /= dims[j];
        }
        terms.push((idx, z * mc.scalar));
    }
    MultiPoly::new(n, terms)
}

fn powc(z: C64, e: u32) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..e {
        acc *= z;
    }
    acc
}

/// One application of the regularizing operator at anchor `x` and size
/// `lambda > 0`.
pub fn perturb_once(p: &MultiPoly, x: &[f64], lambda: f64) -> Result<MultiPoly> {
    let mc = mobius_basis_coeffs(p, x)?;
    let mc = perturb_coeffs(&mc, lambda);
    reconstruct(&mc)
}

fn perturb_coeffs(mc: &MobiusCoeffs, lambda: f64) -> MobiusCoeffs {
    let n = mc.dims.len();
    let mut strides = vec![1usize; n];
    for j in (0..n.saturating_sub(1)).rev() {
        strides[j] = strides[j + 1] * mc.dims[j + 1];
    }
    let mut out = mc.a.clone();
    for (off, slot) in out.iter_mut().enumerate() {
        let mut rem = off;
        let mut idx = vec![0usize; n];
        for j in (0..n).rev() {
            idx[j] = rem % mc.dims[j];
            rem /= mc.dims[j];
        }
        let mut bump = 0.0;
        for j in 0..n {
            if idx[j] + 1 < mc.dims[j] {
                bump += (idx[j] as f64 + 1.0) * mc.a[off + strides[j]];
            }
        }
        *slot += lambda * bump;
    }
    MobiusCoeffs {
        x: mc.x.clone(),
        scalar: mc.scalar,
        degree: mc.degree.clone(),
        dims: mc.dims.clone(),
        a: out,
    }
}

/// Applies [`perturb_once`] total-degree many times with the same anchor and
/// lambda; for `lambda > 0` the result has no common torus zero with its
/// gradient.
pub fn regularize(p: &MultiPoly, x: &[f64], lambda: f64) -> Result<MultiPoly> {
    let steps = p.total_degree();
    let mut q = p.clone();
    for _ in 0..steps {
        q = perturb_once(&q, x, lambda)?;
    }
    Ok(q)
}

/// Probe uniformly random anchors and keep the one maximizing
/// `|p(exp(ix))|`.
pub fn select_anchor(p: &MultiPoly, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let tau = 2.0 * std::f64::consts::PI;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..ANCHOR_PROBES {
        let x: Vec<f64> = (0..p.n()).map(|_| rng.random_range(0.0..tau)).collect();
        let v = p.eval_torus(&x)?.norm();
        if best.as_ref().map(|(b, _)| v > *b).unwrap_or(true) {
            best = Some((v, x));
        }
    }
    let (v, x) = best.unwrap();
    if v <= ANCHOR_REL_TOL * p.coeff_scale() {
        return Err(Error::AnchorOnZeroSet { value: v });
    }
    Ok(x)
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    /// Zeros flagged singular: (line position, multiplicity, gradient norm).
    pub flagged: Vec<(f64, u32, f64)>,
    pub min_grad_norm: f64,
    pub min_positive_gap: f64,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.flagged.is_empty()
    }
}

/// For each zero evaluate the gradient at the torus point and flag
/// multiplicity > 1 or gradient norm below `grad_tol` (relative to the
/// coefficient scale).
pub fn regularity_report(p: &MultiPoly, zeros: &ZeroSet, grad_tol: f64) -> Result<RegularityReport> {
    let scale = p.coeff_scale();
    let mut flagged = Vec::new();
    let mut min_grad = f64::INFINITY;
    for &(x, mult) in zeros.zeros() {
        let point: Vec<C64> = zeros
            .torus_point(x)
            .into_iter()
            .map(C64::cis)
            .collect();
        let grad = p.grad_eval(&point)?;
        let norm = grad.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        min_grad = min_grad.min(norm);
        if mult > 1 || norm < grad_tol * scale {
            flagged.push((x, mult, norm));
        }
    }
    let mut min_gap = f64::INFINITY;
    let zs = zeros.zeros();
    for w in zs.windows(2) {
        let gap = w[1].0 - w[0].0;
        if gap > 0.0 {
            min_gap = min_gap.min(gap);
        }
    }
    Ok(RegularityReport {
        flagged,
        min_grad_norm: min_grad,
        min_positive_gap: min_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randutil::SeededStream;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn one_minus_z() -> MultiPoly {
        MultiPoly::new(1, vec![(vec![0], c(1.0, 0.0)), (vec![1], c(-1.0, 0.0))]).unwrap()
    }

    fn one_minus_z1z2() -> MultiPoly {
        MultiPoly::new(
            2,
            vec![(vec![0, 0], c(1.0, 0.0)), (vec![1, 1], c(-1.0, 0.0))],
        )
        .unwrap()
    }

    #[test]
    fn basis_solve_degree_one_cases() {
        // p = 1 - z at anchor pi: a = +-{0, 1} with matching scalar
        let mc = mobius_basis_coeffs(&one_minus_z(), &[PI]).unwrap();
        assert!(mc.coeff(&[0]).abs() < 1e-12);
        assert!((mc.coeff(&[1]).abs() - 1.0).abs() < 1e-12);
        assert!((mc.scalar.norm() - 1.0).abs() < 1e-12);
        let back = reconstruct(&mc).unwrap();
        assert!((back.coeff(&[0]) - c(1.0, 0.0)).norm() < 1e-12);
        assert!((back.coeff(&[1]) - c(-1.0, 0.0)).norm() < 1e-12);

        // p = -i + i z, same anchor
        let q = MultiPoly::new(1, vec![(vec![0], c(0.0, -1.0)), (vec![1], c(0.0, 1.0))]).unwrap();
        let mc = mobius_basis_coeffs(&q, &[PI]).unwrap();
        assert!(mc.coeff(&[0]).abs() < 1e-12);
        assert!((mc.coeff(&[1]).abs() - 1.0).abs() < 1e-12);
        let back = reconstruct(&mc).unwrap();
        for (alpha, v) in q.terms() {
            assert!((back.coeff(alpha) - v).norm() < 1e-12);
        }

        // p = z + 1 at anchor 0 lands entirely on the (-i)(z + 1) basis
        // element: a_0 = 0, |a_1| = 1
        let r = MultiPoly::new(1, vec![(vec![0], c(1.0, 0.0)), (vec![1], c(1.0, 0.0))]).unwrap();
        let mc = mobius_basis_coeffs(&r, &[0.0]).unwrap();
        assert!(mc.coeff(&[0]).abs() < 1e-12);
        assert!((mc.coeff(&[1]).abs() - 1.0).abs() < 1e-12);
        let back = reconstruct(&mc).unwrap();
        for (alpha, v) in r.terms() {
            assert!((back.coeff(alpha) - v).norm() < 1e-12);
        }
    }

    #[test]
    fn anchor_on_zero_set_is_rejected() {
        // p = 1 - z vanishes at exp(i*0)
        assert!(matches!(
            mobius_basis_coeffs(&one_minus_z(), &[0.0]),
            Err(Error::AnchorOnZeroSet { .. })
        ));
    }

    #[test]
    fn non_self_inversive_is_rejected() {
        let bad = MultiPoly::new(1, vec![(vec![0], c(1.0, 0.0)), (vec![1], c(-2.0, 0.0))]).unwrap();
        assert!(matches!(
            mobius_basis_coeffs(&bad, &[PI]),
            Err(Error::NotSelfInversive)
        ));
    }

    #[test]
    fn reconstruction_round_trip() {
        let polys = vec![
            MultiPoly::running_example(),
            one_minus_z1z2(),
            MultiPoly::product_binomial(&[1, 2]),
        ];
        let mut rng = SeededStream::new(11, 0).rng();
        for p in polys {
            let x = select_anchor(&p, &mut rng).unwrap();
            let mc = mobius_basis_coeffs(&p, &x).unwrap();
            let back = reconstruct(&mc).unwrap();
            let scale = p.coeff_scale();
            for (alpha, v) in p.terms() {
                assert!(
                    (back.coeff(alpha) - v).norm() <= 1e-9 * scale,
                    "coefficient {alpha:?} drifted"
                );
            }
        }
    }

    #[test]
    fn degree_one_perturbation_closed_form() {
        // root of the perturbed polynomial is (i + lambda) / (i - lambda)
        let p = one_minus_z();
        for lambda in [0.1, 0.5, 1.0, 2.0] {
            let q = perturb_once(&p, &[PI], lambda).unwrap();
            assert_eq!(q.degree(), &[1]);
            let root = -q.coeff(&[0]) / q.coeff(&[1]);
            let expect = (c(0.0, 1.0) + c(lambda, 0.0)) / (c(0.0, 1.0) - c(lambda, 0.0));
            assert!((root - expect).norm() < 1e-10, "lambda = {lambda}");
            assert!((root.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn lambda_one_example_is_proportional_to_hand_value() {
        let q = perturb_once(&one_minus_z(), &[PI], 1.0).unwrap();
        // proportional to (i - 1) z - (i + 1), root -i
        let lead = q.coeff(&[1]);
        let konst = q.coeff(&[0]);
        let ratio = konst / lead;
        let expect = -(c(0.0, 1.0) + c(1.0, 0.0)) / (c(0.0, 1.0) - c(1.0, 0.0));
        assert!((ratio - expect).norm() < 1e-12);
        let root = -konst / lead;
        assert!((root - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn lambda_zero_is_identity() {
        let p = MultiPoly::running_example();
        let q = perturb_once(&p, &[1.0, 2.0], 0.0).unwrap();
        let scale = p.coeff_scale();
        for (alpha, v) in p.terms() {
            assert!((q.coeff(alpha) - v).norm() < 1e-9 * scale);
        }
    }

    #[test]
    fn perturbed_binomial_stays_lee_yang() {
        use crate::lycheck;
        let p = one_minus_z1z2();
        // note (pi, pi) itself lies on the zero set; anchor off it
        let anchor = [PI / 2.0, PI];
        let q = perturb_once(&p, &anchor, 0.3).unwrap();
        let mut rng = SeededStream::new(5, 0).rng();
        let rep = lycheck::verify(&q, 100, 200, 1e-8, &mut rng).unwrap();
        assert!(rep.verdict, "worst = {}", rep.worst_circle_deviation);

        let q = regularize(&p, &anchor, 0.5).unwrap();
        let rep = lycheck::verify(&q, 100, 200, 1e-8, &mut rng).unwrap();
        assert!(rep.verdict);
    }

    #[test]
    fn perturbation_keeps_battery_pass_on_shipped_examples() {
        use crate::lycheck;
        let mut rng = SeededStream::new(6, 0).rng();
        for p in [MultiPoly::running_example(), MultiPoly::product_binomial(&[1, 1])] {
            let x = select_anchor(&p, &mut rng).unwrap();
            for lambda in [0.1, 0.5, 1.0] {
                let q = perturb_once(&p, &x, lambda).unwrap();
                let rep = lycheck::verify(&q, 60, 200, 1e-8, &mut rng).unwrap();
                assert!(rep.verdict, "lambda = {lambda}");
            }
        }
    }

    #[test]
    fn regularity_report_flags_singular_zero_only() {
        use crate::zeroline::{self, TrackOpts};
        let p = MultiPoly::running_example();
        let ell = [5.0 * PI / 22.0, 1.0];
        let opts = TrackOpts::default();
        let zs = zeroline::find_zeros(&p, &ell, -0.5, 6.0 * PI, &opts).unwrap();
        let rep = regularity_report(&p, &zs, GRAD_REL_TOL).unwrap();
        assert!(!rep.is_regular());
        assert!(rep.flagged.iter().any(|&(x, m, _)| x.abs() < 1e-8 && m == 2));

        let mut rng = SeededStream::new(9, 0).rng();
        let anchor = select_anchor(&p, &mut rng).unwrap();
        let q = regularize(&p, &anchor, 0.2).unwrap();
        let zs = zeroline::find_zeros(&q, &ell, -0.5, 6.0 * PI, &opts).unwrap();
        let rep = regularity_report(&q, &zs, GRAD_REL_TOL).unwrap();
        assert!(rep.is_regular(), "flags: {:?}", rep.flagged);

        // (1 - z1)(1 - z2) is singular exactly at the torus point (0, 0);
        // away from the t = 0 orbit point every zero is regular
        let pb = MultiPoly::product_binomial(&[1, 1]);
        let ell2 = [1.0, std::f64::consts::SQRT_2];
        let zs = zeroline::find_zeros(&pb, &ell2, 0.5, 30.0, &opts).unwrap();
        let rep = regularity_report(&pb, &zs, GRAD_REL_TOL).unwrap();
        assert!(rep.is_regular(), "flags: {:?}", rep.flagged);
        let zs = zeroline::find_zeros(&pb, &ell2, -0.5, 30.0, &opts).unwrap();
        let rep = regularity_report(&pb, &zs, GRAD_REL_TOL).unwrap();
        assert!(rep.flagged.iter().any(|&(x, m, _)| x.abs() < 1e-8 && m == 2));
    }

    #[test]
    fn degree_one_root_stays_unimodular_for_many_anchors() {
        let mut rng = SeededStream::new(7, 0).rng();
        for _ in 0..40 {
            let theta: f64 = rng.random_range(0.0..2.0 * PI);
            // p = 1 - e^{-i theta} z, root at e^{i theta}
            let p = MultiPoly::new(
                1,
                vec![(vec![0], c(1.0, 0.0)), (vec![1], -C64::cis(-theta))],
            )
            .unwrap();
            let anchor = [theta + PI]; // far from the root
            let lambda = rng.random_range(0.01..2.0);
            let q = perturb_once(&p, &anchor, lambda).unwrap();
            let root = -q.coeff(&[0]) / q.coeff(&[1]);
            assert!((root.norm() - 1.0).abs() < 1e-10);
        }
    }
}
