//! Sparse multivariate complex polynomials with declared multidegree, the
//! coefficient involution, diagonal restriction to a univariate polynomial,
//! and constructors for the example families (determinantal, binomial
//! products, the degree-(2,2) running example).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;

pub type C64 = Complex64;

/// Relative magnitude below which coefficients are dropped at construction,
/// keeping sparse maps canonical for equality tests.
pub const COEFF_PRUNE_REL: f64 = 1e-14;

/// Default relative tolerance for coefficient proportionality tests.
pub const PROPORTIONALITY_REL_TOL: f64 = 1e-10;

/// Guard on the principal-minor expansion in [`MultiPoly::determinantal`].
pub const DETERMINANTAL_MAX_N: usize = 20;

/// Sparse polynomial `p = sum a_alpha z^alpha` with multidegree attained in
/// every variable. Immutable after construction; all operations are pure.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    n: usize,
    degree: Vec<u32>,
    coeffs: BTreeMap<Vec<u32>, C64>,
}

impl MultiPoly {
    /// Build from terms, summing duplicates and pruning relatively tiny
    /// coefficients. The multidegree is recomputed from the surviving
    /// support, so it is attained in each variable by construction.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, C64)>) -> Result<Self> {
        let mut acc: BTreeMap<Vec<u32>, C64> = BTreeMap::new();
        for (alpha, a) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: alpha.len(),
                });
            }
            *acc.entry(alpha).or_insert(C64::new(0.0, 0.0)) += a;
        }
        let max = acc.values().map(|a| a.norm()).fold(0.0f64, f64::max);
        if max == 0.0 {
            return Err(Error::ZeroPolynomial);
        }
        acc.retain(|_, a| a.norm() >= COEFF_PRUNE_REL * max);
        let mut degree = vec![0u32; n];
        for alpha in acc.keys() {
            for (d, &e) in degree.iter_mut().zip(alpha.iter()) {
                *d = (*d).max(e);
            }
        }
        Ok(MultiPoly {
            n,
            degree,
            coeffs: acc,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> &[u32] {
        &self.degree
    }

    /// Total degree `|d| = d_1 + ... + d_n`.
    pub fn total_degree(&self) -> usize {
        self.degree.iter().map(|&d| d as usize).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], C64)> {
        self.coeffs.iter().map(|(a, &c)| (a.as_slice(), c))
    }

    pub fn coeff(&self, alpha: &[u32]) -> C64 {
        self.coeffs
            .get(alpha)
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest coefficient magnitude.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.values().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes; a pointwise bound for |p| on the torus.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs.values().map(|a| a.norm()).sum()
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        self.check_dim(z.len())?;
        let mut acc = C64::new(0.0, 0.0);
        for (alpha, a) in self.terms() {
            let mut term = a;
            for (zi, &e) in z.iter().zip(alpha) {
                term *= powu(*zi, e);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Evaluate at the torus point `exp(i x)`.
    pub fn eval_torus(&self, x: &[f64]) -> Result<C64> {
        self.check_dim(x.len())?;
        let mut acc = C64::new(0.0, 0.0);
        for (alpha, a) in self.terms() {
            let mut phase = 0.0;
            for (xi, &e) in x.iter().zip(alpha) {
                phase += xi * e as f64;
            }
            acc += a * C64::cis(phase);
        }
        Ok(acc)
    }

    /// Gradient `(dp/dz_1, ..., dp/dz_n)` at `z`.
    pub fn grad_eval(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.check_dim(z.len())?;
        let mut grad = vec![C64::new(0.0, 0.0); self.n];
        for (alpha, a) in self.terms() {
            for j in 0..self.n {
                if alpha[j] == 0 {
                    continue;
                }
                let mut term = a * alpha[j] as f64;
                for (i, (zi, &e)) in z.iter().zip(alpha).enumerate() {
                    let pow = if i == j { e - 1 } else { e };
                    term *= powu(*zi, pow);
                }
                grad[j] += term;
            }
        }
        Ok(grad)
    }

    /// The univariate restriction `p_x(s) = p(s e^{i x_1}, ..., s e^{i x_n})`
    /// of degree `|d|`; coefficient of `s^j` is `sum_{|alpha|=j} a_alpha
    /// e^{i<x,alpha>}`.
    pub fn diag_restrict(&self, x: &[f64]) -> Result<UnivariatePoly> {
        self.check_dim(x.len())?;
        let dd = self.total_degree();
        let mut coeffs = vec![C64::new(0.0, 0.0); dd + 1];
        for (alpha, a) in self.terms() {
            let mut phase = 0.0;
            let mut total = 0usize;
            for (xi, &e) in x.iter().zip(alpha) {
                phase += xi * e as f64;
                total += e as usize;
            }
            coeffs[total] += a * C64::cis(phase);
        }
        Ok(UnivariatePoly::new_untrimmed(coeffs))
    }

    /// The involution `p -> p^dagger` with coefficients `conj(a_{d-alpha})`.
    pub fn involution(&self) -> MultiPoly {
        let refl = self.reflected_coeffs();
        MultiPoly::new(self.n, refl).expect("involution of a nonzero polynomial is nonzero")
    }

    fn reflected_coeffs(&self) -> Vec<(Vec<u32>, C64)> {
        self.terms()
            .map(|(alpha, a)| {
                let beta: Vec<u32> = self
                    .degree
                    .iter()
                    .zip(alpha)
                    .map(|(&d, &e)| d - e)
                    .collect();
                (beta, a.conj())
            })
            .collect()
    }

    /// If `p^dagger = c p` for a unimodular `c` (within the relative
    /// tolerance, coefficientwise), return `c`.
    pub fn self_inversive_factor(&self, rel_tol: f64) -> Option<C64> {
        let refl: BTreeMap<Vec<u32>, C64> = self.reflected_coeffs().into_iter().collect();
        if refl.len() != self.coeffs.len() {
            return None;
        }
        // candidate from the largest-magnitude coefficient pair
        let (alpha0, &a0) = self
            .coeffs
            .iter()
            .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())?;
        let r0 = *refl.get(alpha0)?;
        let c = r0 / a0;
        if (c.norm() - 1.0).abs() > rel_tol {
            return None;
        }
        let scale = self.coeff_scale();
        for (alpha, &a) in &self.coeffs {
            let r = match refl.get(alpha) {
                Some(&r) => r,
                None => return None,
            };
            if (r - c * a).norm() > rel_tol * scale {
                return None;
            }
        }
        Some(c / c.norm())
    }

    /// Exponent substitution `alpha -> (k_1 alpha_1, ..., k_n alpha_n)`,
    /// realizing `p(z_1^{k_1}, ..., z_n^{k_n})`.
    pub fn power_substitute(&self, k: &[u32]) -> Result<MultiPoly> {
        self.check_dim(k.len())?;
        if k.contains(&0) {
            return Err(Error::Invalid("power_substitute needs k >= 1".into()));
        }
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (alpha, a) in self.terms() {
            let mut beta = Vec::with_capacity(self.n);
            for (&e, &ki) in alpha.iter().zip(k) {
                beta.push(e.checked_mul(ki).ok_or(Error::ExponentOverflow)?);
            }
            terms.push((beta, a));
        }
        MultiPoly::new(self.n, terms)
    }

    /// Torus action `q(z) = p(e^{i x_1} z_1, ..., e^{i x_n} z_n)`, i.e.
    /// `a_alpha -> a_alpha e^{i<x,alpha>}`. Preserves the Lee-Yang property.
    pub fn scale_action(&self, x: &[f64]) -> Result<MultiPoly> {
        self.check_dim(x.len())?;
        let terms: Vec<_> = self
            .terms()
            .map(|(alpha, a)| {
                let phase: f64 = x.iter().zip(alpha).map(|(xi, &e)| xi * e as f64).sum();
                (alpha.to_vec(), a * C64::cis(phase))
            })
            .collect();
        MultiPoly::new(self.n, terms)
    }

    /// Detect `p` proportional to `1 - e^{-i phi} z^alpha`: support exactly
    /// `{0, alpha}` with `|a_alpha / a_0| = 1` within `rel_tol`. Returns
    /// `(alpha, phi)`.
    pub fn is_binomial(&self, rel_tol: f64) -> Option<(Vec<u32>, f64)> {
        if self.coeffs.len() != 2 {
            return None;
        }
        let zero = vec![0u32; self.n];
        let a0 = *self.coeffs.get(&zero)?;
        let (alpha, &aa) = self.coeffs.iter().find(|(k, _)| **k != zero)?;
        let ratio = aa / a0;
        if (ratio.norm() - 1.0).abs() > rel_tol {
            return None;
        }
        // p ~ 1 + ratio z^alpha = 1 - e^{-i phi} z^alpha with e^{-i phi} = -ratio
        let phi = -(-ratio).arg();
        let phi = if phi < 0.0 {
            phi + 2.0 * std::f64::consts::PI
        } else {
            phi
        };
        Some((alpha.clone(), phi))
    }

    /// Product of two polynomials (sparse convolution).
    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_dim(other.n)?;
        let mut terms = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (a_exp, a) in self.terms() {
            for (b_exp, b) in other.terms() {
                let exp: Vec<u32> = a_exp.iter().zip(b_exp).map(|(&x, &y)| x + y).collect();
                terms.push((exp, a * b));
            }
        }
        MultiPoly::new(self.n, terms)
    }

    /// `det(I - diag(z) U)` for a unitary `U`, by exact principal-minor
    /// expansion: the coefficient of `z^S` is `(-1)^{|S|} det(U[S,S])`.
    pub fn determinantal(u: &CMat, tol: f64) -> Result<MultiPoly> {
        let n = u.n();
        if n > DETERMINANTAL_MAX_N {
            return Err(Error::MinorExpansionTooLarge {
                n,
                max: DETERMINANTAL_MAX_N,
            });
        }
        let defect = u.unitary_defect();
        if defect > tol {
            return Err(Error::NotUnitary {
                deviation: defect,
                tol,
            });
        }
        let mut terms = Vec::with_capacity(1 << n);
        for mask in 0u32..(1u32 << n) {
            let idx: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
            let sign = if idx.len().is_multiple_of(2) { 1.0 } else { -1.0 };
            let det = u.principal_minor(&idx);
            let mut alpha = vec![0u32; n];
            for &j in &idx {
                alpha[j] = 1;
            }
            terms.push((alpha, det * sign));
        }
        MultiPoly::new(n, terms)
    }

    /// `prod_j (1 - z_j)^{d_j}`, expanded.
    pub fn product_binomial(d: &[u32]) -> MultiPoly {
        assert!(!d.is_empty() && d.iter().all(|&dj| dj >= 1));
        let n = d.len();
        let mut poly: Option<MultiPoly> = None;
        for (j, &dj) in d.iter().enumerate() {
            let mut e = vec![0u32; n];
            e[j] = 1;
            let factor = MultiPoly::new(
                n,
                vec![
                    (vec![0u32; n], C64::new(1.0, 0.0)),
                    (e, C64::new(-1.0, 0.0)),
                ],
            )
            .unwrap();
            for _ in 0..dj {
                poly = Some(match poly {
                    None => factor.clone(),
                    Some(p) => p.mul(&factor).unwrap(),
                });
            }
        }
        poly.unwrap()
    }

    /// The degree-(2,2) Lee-Yang polynomial
    /// `16(1 + z1^2 z2^2) - 8(z1 + z2 + z1^2 z2 + z1 z2^2) + (z1 - z2)^2`
    /// with a singular torus zero at `(1, 1)`.
    pub fn running_example() -> MultiPoly {
        let c = |re: f64| C64::new(re, 0.0);
        MultiPoly::new(
            2,
            vec![
                (vec![0, 0], c(16.0)),
                (vec![2, 2], c(16.0)),
                (vec![1, 0], c(-8.0)),
                (vec![0, 1], c(-8.0)),
                (vec![2, 1], c(-8.0)),
                (vec![1, 2], c(-8.0)),
                (vec![2, 0], c(1.0)),
                (vec![0, 2], c(1.0)),
                (vec![1, 1], c(-2.0)),
            ],
        )
        .unwrap()
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got,
            });
        }
        Ok(())
    }
}

fn powu(z: C64, mut e: u32) -> C64 {
    let mut base = z;
    let mut acc = C64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Dense univariate polynomial, `coeffs[j]` multiplying `s^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<C64>,
}

impl UnivariatePoly {
    /// Construct, trimming a relatively tiny leading tail so that the leading
    /// coefficient is nonzero.
    pub fn new(coeffs: Vec<C64>) -> Self {
        let max = coeffs.iter().map(|a| a.norm()).fold(0.0f64, f64::max);
        let mut c = coeffs;
        while let Some(last) = c.last() {
            if c.len() > 1 && last.norm() < COEFF_PRUNE_REL * max {
                c.pop();
            } else {
                break;
            }
        }
        UnivariatePoly { coeffs: c }
    }

    /// Keep declared length (used by diag_restrict, whose leading coefficient
    /// `a_d e^{i<x,d>}` is nonzero whenever the polynomial's degree is
    /// attained).
    pub(crate) fn new_untrimmed(coeffs: Vec<C64>) -> Self {
        UnivariatePoly { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().unwrap_or(&C64::new(0.0, 0.0))
    }

    pub fn eval(&self, s: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * s + c;
        }
        acc
    }

    pub fn derivative(&self) -> UnivariatePoly {
        if self.coeffs.len() <= 1 {
            return UnivariatePoly {
                coeffs: vec![C64::new(0.0, 0.0)],
            };
        }
        UnivariatePoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        }
    }

    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Multiply by `(s - r)`.
    pub fn mul_linear(&self, r: C64) -> UnivariatePoly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + 1];
        for (j, &c) in self.coeffs.iter().enumerate() {
            out[j + 1] += c;
            out[j] -= c * r;
        }
        UnivariatePoly { coeffs: out }
    }
}
