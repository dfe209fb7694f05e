//! Minimal dense complex linear algebra: just enough for companion-matrix
//! eigenvalues and Haar unitary sampling (Householder QR, Hessenberg
//! reduction, shifted QR iteration, Parlett-Reinsch balancing).

use crate::error::{Error, Result};
use num_complex::Complex64;

type C64 = Complex64;

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    a: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            a: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Frobenius norm of U*U - I; the unitarity defect.
    pub fn unitary_defect(&self) -> f64 {
        let m = self.adjoint().matmul(self);
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                s += (m[(i, j)] - target).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Principal submatrix determinant over the index set `rows` (used for
    /// minor expansions). Complex LU with partial pivoting.
    pub fn principal_minor(&self, idx: &[usize]) -> C64 {
        let k = idx.len();
        if k == 0 {
            return C64::new(1.0, 0.0);
        }
        let mut m = vec![C64::new(0.0, 0.0); k * k];
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                m[r * k + c] = self[(i, j)];
            }
        }
        lu_det(&mut m, k)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.a[i * self.n + j]
    }
}

fn lu_det(m: &mut [C64], k: usize) -> C64 {
    let mut det = C64::new(1.0, 0.0);
    for col in 0..k {
        let mut piv = col;
        let mut best = m[col * k + col].norm();
        for r in col + 1..k {
            let v = m[r * k + col].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != col {
            for c in 0..k {
                m.swap(col * k + c, piv * k + c);
            }
            det = -det;
        }
        let d = m[col * k + col];
        det *= d;
        for r in col + 1..k {
            let factor = m[r * k + col] / d;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for c in col..k {
                let sub = factor * m[col * k + c];
                m[r * k + c] -= sub;
            }
        }
    }
    det
}

/// Householder QR of a square matrix; returns (Q, diag(R)).
pub fn householder_qr(a: &CMat) -> (CMat, Vec<C64>) {
    let n = a.n();
    let mut r = a.clone();
    let mut q = CMat::identity(n);
    for k in 0..n {
        // Householder vector for column k below the diagonal.
        let mut norm2 = 0.0;
        for i in k..n {
            norm2 += r[(i, k)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let akk = r[(k, k)];
        let phase = if akk.norm() > 0.0 {
            akk / akk.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v = vec![C64::new(0.0, 0.0); n];
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // r <- (I - 2 v v* / |v|^2) r ; q <- q (I - 2 v v* / |v|^2)
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in k..n {
                dot += v[i].conj() * r[(i, j)];
            }
            let scale = dot * 2.0 / vnorm2;
            for i in k..n {
                let sub = scale * v[i];
                r[(i, j)] -= sub;
            }
        }
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in k..n {
                dot += q[(i, j)] * v[j];
            }
            let scale = dot * 2.0 / vnorm2;
            for j in k..n {
                let sub = scale * v[j].conj();
                q[(i, j)] -= sub;
            }
        }
    }
    let diag = (0..n).map(|i| r[(i, i)]).collect();
    (q, diag)
}

/// Reduce to upper Hessenberg form by Householder similarity (in place).
pub fn hessenberg(a: &mut CMat) {
    let n = a.n();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut norm2 = 0.0;
        for i in k + 1..n {
            norm2 += a[(i, k)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let pivot = a[(k + 1, k)];
        let phase = if pivot.norm() > 0.0 {
            pivot / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v = vec![C64::new(0.0, 0.0); n];
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- P A P with P = I - 2 v v*/|v|^2
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in k + 1..n {
                dot += v[i].conj() * a[(i, j)];
            }
            let scale = dot * 2.0 / vnorm2;
            for i in k + 1..n {
                let sub = scale * v[i];
                a[(i, j)] -= sub;
            }
        }
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in k + 1..n {
                dot += a[(i, j)] * v[j];
            }
            let scale = dot * 2.0 / vnorm2;
            for j in k + 1..n {
                let sub = scale * v[j].conj();
                a[(i, j)] -= sub;
            }
        }
    }
    // clean below the subdiagonal
    for i in 2..n {
        for j in 0..i - 1 {
            a[(i, j)] = C64::new(0.0, 0.0);
        }
    }
}

/// Parlett-Reinsch balancing with radix-2 scaling. Diagonal similarity, so
/// eigenvalues are unchanged and Hessenberg structure is preserved.
pub fn balance(a: &mut CMat) {
    let n = a.n();
    let radix: f64 = 2.0;
    let mut done = false;
    let mut sweeps = 0;
    while !done && sweeps < 100 {
        done = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let g_lo = r / radix;
            while cc < g_lo {
                f *= radix;
                cc *= radix * radix;
            }
            let g_hi = r * radix;
            while cc > g_hi {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r) / f < 0.95 * s && f != 1.0 {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn givens(a: C64, b: C64) -> Option<(C64, C64, f64)> {
    let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return None;
    }
    Some((a, b, r))
}

/// Eigenvalues of a general complex matrix: Hessenberg reduction followed by
/// shifted QR with Givens rotations.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    let mut h = a.clone();
    hessenberg(&mut h);
    balance(&mut h);
    hessenberg_eigenvalues(h)
}

fn trailing_2x2_eigs(h: &CMat, m: usize) -> (C64, C64) {
    let a = h[(m - 1, m - 1)];
    let b = h[(m - 1, m)];
    let c = h[(m, m - 1)];
    let d = h[(m, m)];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + b * c * 4.0).sqrt();
    ((tr + disc) * 0.5, (tr - disc) * 0.5)
}

/// Eigenvalues of an upper Hessenberg matrix by explicit single-shift QR.
pub fn hessenberg_eigenvalues(mut h: CMat) -> Result<Vec<C64>> {
    let n = h.n();
    let mut eigs = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let mut hi = n - 1;
    let mut iters_total = 0usize;
    let mut iters_here = 0usize;
    let max_total = 60 * n + 200;
    loop {
        // deflate trailing 1x1 / 2x2 blocks
        loop {
            if hi == 0 {
                eigs.push(h[(0, 0)]);
                return Ok(eigs);
            }
            let sub = h[(hi, hi - 1)].norm();
            let scale = h[(hi, hi)].norm() + h[(hi - 1, hi - 1)].norm();
            if sub <= f64::EPSILON * scale.max(1e-300) {
                eigs.push(h[(hi, hi)]);
                hi -= 1;
                iters_here = 0;
                continue;
            }
            if hi == 1 {
                let (e1, e2) = trailing_2x2_eigs(&h, 1);
                eigs.push(e1);
                eigs.push(e2);
                return Ok(eigs);
            }
            break;
        }
        // find the start of the active unreduced window [lo..=hi]
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * scale.max(1e-300) {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            continue;
        }
        iters_total += 1;
        iters_here += 1;
        if iters_total > max_total {
            return Err(Error::EigNonConvergence);
        }
        // shift: eigenvalue of trailing 2x2 nearest h[hi][hi]; exceptional
        // shift every 12 stalled sweeps
        let sigma = if iters_here.is_multiple_of(12) {
            h[(hi, hi)] + C64::new(1.5 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (e1, e2) = trailing_2x2_eigs(&h, hi);
            let d = h[(hi, hi)];
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        // implicit single-shift bulge chase over [lo..=hi]
        let mut x = h[(lo, lo)] - sigma;
        let mut z = h[(lo + 1, lo)];
        for k in lo..hi {
            let rot = match givens(x, z) {
                Some(r) => r,
                None => {
                    x = h[(k + 1, k)];
                    if k + 2 <= hi {
                        z = h[(k + 2, k)];
                    }
                    continue;
                }
            };
            let (ga, gb, gr) = rot;
            let (ca, cb) = (ga / gr, gb / gr);
            // rows k, k+1
            let jlo = k.saturating_sub(1).max(lo);
            for j in jlo..n {
                let u = h[(k, j)];
                let v = h[(k + 1, j)];
                h[(k, j)] = ca.conj() * u + cb.conj() * v;
                h[(k + 1, j)] = -cb * u + ca * v;
            }
            // cols k, k+1
            let ihi = (k + 2).min(hi);
            for i in 0..=ihi {
                let u = h[(i, k)];
                let v = h[(i, k + 1)];
                h[(i, k)] = u * ca + v * cb;
                h[(i, k + 1)] = -u * cb.conj() + v * ca.conj();
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                z = h[(k + 2, k)];
            }
        }
    }
}
