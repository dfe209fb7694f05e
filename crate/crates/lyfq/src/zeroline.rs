//! Zero sets of `f(x) = p(exp(i x ell))` on an interval, computed by
//! monotone phase tracking: the lifted root angles of the diagonal
//! restriction decrease strictly along positive directions, every integer
//! multiple of `2pi` crossed by a lifted phase is a zero of `f`, and the
//! crossing count per phase is a direct integer-interval count. A real
//! secular function provides an independent cross-check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polycore::{MultiPoly, UnivariatePoly, PROPORTIONALITY_REL_TOL};
use crate::uniroots::{self, AngleSpectrum};

type C64 = Complex64;

const TAU: f64 = 2.0 * std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct TrackOpts {
    /// Allowed distance of restriction roots from the unit circle.
    pub circle_tol: f64,
    /// Angle clustering radius (multiplicity detection in the spectrum).
    pub cluster_radius: f64,
    /// Zeros closer than this along the line are merged into one zero of
    /// higher multiplicity.
    pub cluster_tol_x: f64,
    /// Initial/maximal step; defaults to `min(pi/(2 ell_max), 0.25)`.
    pub dt_init: Option<f64>,
    /// Hard floor for step halving; reaching it aborts the scan.
    pub dt_min: f64,
    /// Slack on the per-phase drop window and on lift equivalence.
    pub lift_slack: f64,
    /// Tolerance on the exact total-drop identity per step.
    pub total_drop_tol: f64,
    /// Residual contract: every reported zero has `|f| <= rel * sum|a|`.
    pub residual_rel_tol: f64,
    /// Bisection iteration cap per crossing.
    pub max_bisect: u32,
}

impl Default for TrackOpts {
    fn default() -> Self {
        TrackOpts {
            circle_tol: 1e-8,
            cluster_radius: 1e-7,
            cluster_tol_x: 1e-7,
            dt_init: None,
            dt_min: 1e-6,
            lift_slack: 2e-7,
            total_drop_tol: 1e-8,
            residual_rel_tol: 1e-6,
            max_bisect: 80,
        }
    }
}

/// Precomputed form of `t -> p(exp(i(x0 + t ell)))`. Phases are always
/// formed from the reduced torus point `x(t) = x0 + t ell mod 2pi`: reducing
/// before the inner products keeps the accumulated phase error a consistent
/// reparametrization of the line instead of an incoherent per-coefficient
/// perturbation (which would push root pairs off the unit circle at large t).
#[derive(Clone, Debug)]
struct LineEval {
    // (power of s, exponent vector, coefficient)
    terms: Vec<(usize, Vec<u32>, C64)>,
    x0: Vec<f64>,
    ell: Vec<f64>,
    total_degree: usize,
    drift: f64, // <d, ell>
}

impl LineEval {
    fn new(p: &MultiPoly, x0: &[f64], ell: &[f64]) -> Result<LineEval> {
        if x0.len() != p.n() || ell.len() != p.n() {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                got: x0.len().min(ell.len()),
            });
        }
        if ell.iter().any(|&l| l <= 0.0) {
            return Err(Error::Invalid("direction must be strictly positive".into()));
        }
        let terms = p
            .terms()
            .map(|(alpha, a)| {
                let pow = alpha.iter().map(|&e| e as usize).sum();
                (pow, alpha.to_vec(), a)
            })
            .collect();
        let drift = p
            .degree()
            .iter()
            .zip(ell)
            .map(|(&d, &l)| d as f64 * l)
            .sum();
        Ok(LineEval {
            terms,
            x0: x0.to_vec(),
            ell: ell.to_vec(),
            total_degree: p.total_degree(),
            drift,
        })
    }

    fn point(&self, t: f64) -> Vec<f64> {
        self.x0
            .iter()
            .zip(&self.ell)
            .map(|(&x, &l)| (x + t * l).rem_euclid(TAU))
            .collect()
    }

    fn f(&self, t: f64) -> C64 {
        let x = self.point(t);
        let mut acc = C64::new(0.0, 0.0);
        for (_, alpha, a) in &self.terms {
            let phase: f64 = alpha.iter().zip(&x).map(|(&e, &xi)| e as f64 * xi).sum();
            acc += a * C64::cis(phase);
        }
        acc
    }

    fn restriction(&self, t: f64) -> UnivariatePoly {
        let x = self.point(t);
        let mut coeffs = vec![C64::new(0.0, 0.0); self.total_degree + 1];
        for (pow, alpha, a) in &self.terms {
            let phase: f64 = alpha.iter().zip(&x).map(|(&e, &xi)| e as f64 * xi).sum();
            coeffs[*pow] += a * C64::cis(phase);
        }
        UnivariatePoly::new_untrimmed(coeffs)
    }

    fn spectrum(&self, t: f64, opts: &TrackOpts) -> Result<Vec<f64>> {
        let sp = uniroots::angle_spectrum(&self.restriction(t), opts.circle_tol, opts.cluster_radius)?;
        Ok(sp.expanded())
    }

    fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|(_, _, a)| a.norm()).sum()
    }
}

/// Lifted ordered phase tuple along a line; the engine state for zero
/// finding. The lifts decrease strictly in `t` and their sum decreases at
/// the exact rate `<d, ell>`.
#[derive(Clone, Debug)]
pub struct PhaseTrack {
    t: f64,
    lifted: Vec<f64>,
    x0: Vec<f64>,
    ell: Vec<f64>,
    ell_min: f64,
    ell_max: f64,
    line: LineEval,
}

impl PhaseTrack {
    /// Initialize at parameter `t` from the angle spectrum of the diagonal
    /// restriction at `x0 + t ell`.
    pub fn start(p: &MultiPoly, x0: &[f64], ell: &[f64], t: f64, opts: &TrackOpts) -> Result<Self> {
        let line = LineEval::new(p, x0, ell)?;
        let lifted = line.spectrum(t, opts)?;
        let ell_min = ell.iter().cloned().fold(f64::INFINITY, f64::min);
        let ell_max = ell.iter().cloned().fold(0.0f64, f64::max);
        Ok(PhaseTrack {
            t,
            lifted,
            x0: x0.to_vec(),
            ell: ell.to_vec(),
            ell_min,
            ell_max,
            line,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn lifted(&self) -> &[f64] {
        &self.lifted
    }

    pub fn x0(&self) -> &[f64] {
        &self.x0
    }

    pub fn ell(&self) -> &[f64] {
        &self.ell
    }

    /// Candidate order-preserving lifts of the spectrum at `t + dt`, filtered
    /// by the monotone per-phase drop window and the exact total-drop law.
    fn feasible_lifts(&self, dt: f64, opts: &TrackOpts) -> Result<Vec<Vec<f64>>> {
        let d = self.lifted.len();
        let raw = self.line.spectrum(self.t + dt, opts)?;
        debug_assert_eq!(raw.len(), d);
        let slack = opts.lift_slack;
        let drop_lo = dt * self.ell_min - slack;
        let drop_hi = dt * self.ell_max + slack;
        let lo = self.lifted[0] - drop_hi;
        let hi = self.lifted[0] - drop_lo;
        // extended angle lattice: a_ext(m) = raw[m mod d] + 2pi floor(m/d)
        let a_ext = |m: i64| -> f64 {
            let i = m.rem_euclid(d as i64) as usize;
            let k = m.div_euclid(d as i64) as f64;
            raw[i] + TAU * k
        };
        // first m with a_ext(m) >= lo
        let mut m = {
            let k = (lo / TAU).floor();
            let base = k as i64 * d as i64;
            let mut i = 0i64;
            while i < d as i64 && raw[i as usize] + TAU * k < lo {
                i += 1;
            }
            base + i
        };
        let target_total: f64 = dt * self.line.drift;
        let total_tol = opts
            .total_drop_tol
            .max(1e-12 * d as f64 * (1.0 + self.lifted.iter().map(|v| v.abs()).fold(0.0, f64::max)));
        let mut feasible: Vec<Vec<f64>> = Vec::new();
        while a_ext(m) <= hi {
            let tuple: Vec<f64> = (0..d as i64).map(|j| a_ext(m + j)).collect();
            let ok_drops = self
                .lifted
                .iter()
                .zip(&tuple)
                .all(|(&old, &new)| {
                    let drop = old - new;
                    drop >= drop_lo && drop <= drop_hi
                });
            if ok_drops {
                let total_drop: f64 = self
                    .lifted
                    .iter()
                    .zip(&tuple)
                    .map(|(&old, &new)| old - new)
                    .sum();
                if (total_drop - target_total).abs() <= total_tol {
                    feasible.push(tuple);
                }
            }
            m += 1;
        }
        Ok(feasible)
    }

    /// Advance by `dt`, selecting the unique feasible lift. Candidates that
    /// agree within the lift slack are treated as one. Errors with
    /// [`Error::AmbiguousLift`] when zero or several genuinely distinct lifts
    /// remain; the caller halves `dt` and retries. Requires
    /// `dt * ell_max <= pi/2` so no phase can wrap within one step.
    pub fn step(&self, dt: f64, opts: &TrackOpts) -> Result<PhaseTrack> {
        if !(dt > 0.0) || dt * self.ell_max > std::f64::consts::FRAC_PI_2 {
            return Err(Error::Invalid(format!(
                "step {dt} must satisfy 0 < dt <= pi/(2 ell_max)"
            )));
        }
        let feasible = self.feasible_lifts(dt, opts)?;
        let chosen = select_lift(feasible, opts.lift_slack).ok_or(Error::AmbiguousLift {
            t: self.t,
            dt,
        })?;
        let mut next = self.clone();
        next.t += dt;
        next.lifted = chosen;
        Ok(next)
    }
}

fn select_lift(mut feasible: Vec<Vec<f64>>, slack: f64) -> Option<Vec<f64>> {
    match feasible.len() {
        0 => None,
        1 => feasible.pop(),
        _ => {
            let first = &feasible[0];
            let equivalent = feasible.iter().skip(1).all(|tup| {
                tup.iter()
                    .zip(first)
                    .all(|(a, b)| (a - b).abs() <= slack)
            });
            if equivalent {
                Some(feasible.swap_remove(0))
            } else {
                None
            }
        }
    }
}

/// Ordered zeros of `f(x) = p(exp(i(x0 + x ell)))` with multiplicities on an
/// interval.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    interval: (f64, f64),
    x0: Vec<f64>,
    ell: Vec<f64>,
    zeros: Vec<(f64, u32)>,
    pub diagnostics: TrackDiagnostics,
}

#[derive(Clone, Debug, Default)]
pub struct TrackDiagnostics {
    pub steps: u64,
    pub rejections: u64,
    pub spectrum_evals: u64,
    pub ambiguous_probes: u64,
    pub max_bisect_depth: u32,
    pub worst_residual: f64,
}

impl ZeroSet {
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn ell(&self) -> &[f64] {
        &self.ell
    }

    pub fn anchor(&self) -> &[f64] {
        &self.x0
    }

    /// Zeros as `(position, multiplicity)`, strictly increasing.
    pub fn zeros(&self) -> &[(f64, u32)] {
        &self.zeros
    }

    /// Count with multiplicity in the closed window `[lo, hi]`.
    pub fn count_in(&self, lo: f64, hi: f64) -> u64 {
        self.zeros
            .iter()
            .filter(|&&(x, _)| x >= lo && x <= hi)
            .map(|&(_, m)| m as u64)
            .sum()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.zeros.iter().map(|&(_, m)| m as u64).sum()
    }

    /// The zero list with each zero repeated by its multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_multiplicity() as usize);
        for &(x, m) in &self.zeros {
            for _ in 0..m {
                out.push(x);
            }
        }
        out
    }

    /// Torus point `x0 + x ell mod 2pi`.
    pub fn torus_point(&self, x: f64) -> Vec<f64> {
        self.x0
            .iter()
            .zip(&self.ell)
            .map(|(&x0, &l)| (x0 + x * l).rem_euclid(TAU))
            .collect()
    }
}

/// Angle spectrum of the diagonal restriction at a torus point, with default
/// tolerances.
pub fn phase_spectrum(p: &MultiPoly, point: &[f64]) -> Result<AngleSpectrum> {
    let opts = TrackOpts::default();
    uniroots::angle_spectrum(&p.diag_restrict(point)?, opts.circle_tol, opts.cluster_radius)
}

/// Zeros of `p(exp(i x ell))` for `x` in `[a, b]`.
pub fn find_zeros(p: &MultiPoly, ell: &[f64], a: f64, b: f64, opts: &TrackOpts) -> Result<ZeroSet> {
    let x0 = vec![0.0; p.n()];
    find_zeros_anchored(p, &x0, ell, a, b, opts)
}

/// Zeros of `p(exp(i(x0 + x ell)))` for `x` in `[a, b]`.
pub fn find_zeros_anchored(
    p: &MultiPoly,
    x0: &[f64],
    ell: &[f64],
    a: f64,
    b: f64,
    opts: &TrackOpts,
) -> Result<ZeroSet> {
    if !(b > a) {
        return Err(Error::Invalid("empty scan interval".into()));
    }
    if p.total_degree() == 0 {
        return Ok(ZeroSet {
            interval: (a, b),
            x0: x0.to_vec(),
            ell: ell.to_vec(),
            zeros: Vec::new(),
            diagnostics: TrackDiagnostics::default(),
        });
    }
    let mut diag = TrackDiagnostics::default();
    let ell_min = ell.iter().cloned().fold(f64::INFINITY, f64::min);
    let ell_max = ell.iter().cloned().fold(0.0f64, f64::max);
    // start slightly below `a` so a zero exactly at the endpoint is crossed,
    // not sat on
    let margin = 1e-5 / ell_min.max(1e-9);
    let t_start = a - margin;
    let mut state = PhaseTrack::start(p, x0, ell, t_start, opts)?;
    diag.spectrum_evals += 1;
    let dt_max = opts.dt_init.unwrap_or_else(|| {
        (std::f64::consts::FRAC_PI_2 / ell_max).min(0.25)
    });
    let mut dt = dt_max;
    let mut crossings: Vec<f64> = Vec::new();
    while state.t < b {
        let step_dt = dt.min(b - state.t);
        {
            let feasible = state.feasible_lifts(step_dt, opts).map_err(|e| match e {
            Error::OffCircleRoot { .. } | Error::RootsNonConvergence { .. } => {
                Error::TrackingFailed {
                    t: state.t + step_dt,
                    reason: e.to_string(),
                }
            }
            other => other,
        })?;
            diag.spectrum_evals += 1;
            match select_lift(feasible, opts.lift_slack) {
                Some(lifted) => {
                    // count and refine the 2pi-level crossings per phase
                    for j in 0..state.lifted.len() {
                        let old = state.lifted[j];
                        let new = lifted[j];
                        let k_min = (new / TAU).floor() as i64 + 1;
                        let k_max = (old / TAU).floor() as i64;
                        for k in k_min..=k_max {
                            let level = TAU * k as f64;
                            let x = refine_crossing(
                                &state, j, level, step_dt, opts, &mut diag,
                            )?;
                            crossings.push(x);
                        }
                    }
                    state.t += step_dt;
                    state.lifted = lifted;
                    diag.steps += 1;
                    dt = (dt * 1.25).min(dt_max);
                }
                None => {
                    diag.rejections += 1;
                    dt *= 0.5;
                    if dt < opts.dt_min {
                        return Err(Error::TrackingFailed {
                            t: state.t,
                            reason: format!(
                                "lift stayed ambiguous down to dt = {dt:.3e} \
                                 ({} rejections)",
                                diag.rejections
                            ),
                        });
                    }
                }
            }
        }
    }
    // merge crossings into zeros with multiplicities
    crossings.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let mut zeros: Vec<(f64, u32)> = Vec::new();
    let mut group: Vec<f64> = Vec::new();
    let flush = |group: &mut Vec<f64>, zeros: &mut Vec<(f64, u32)>| {
        if !group.is_empty() {
            let mean = group.iter().sum::<f64>() / group.len() as f64;
            zeros.push((mean, group.len() as u32));
            group.clear();
        }
    };
    for &x in &crossings {
        if let Some(&first) = group.first() {
            if x - first > opts.cluster_tol_x {
                flush(&mut group, &mut zeros);
            }
        }
        group.push(x);
    }
    flush(&mut group, &mut zeros);
    zeros.retain(|&(x, _)| x >= a - opts.cluster_tol_x && x <= b + opts.cluster_tol_x);
    // residual contract
    let line = LineEval::new(p, x0, ell)?;
    let scale = line.coeff_l1();
    for &(x, _) in &zeros {
        let res = line.f(x).norm();
        diag.worst_residual = diag.worst_residual.max(res / scale);
        if res > opts.residual_rel_tol * scale {
            return Err(Error::ResidualCheck {
                x,
                residual: res,
                tol: opts.residual_rel_tol * scale,
            });
        }
    }
    Ok(ZeroSet {
        interval: (a, b),
        x0: x0.to_vec(),
        ell: ell.to_vec(),
        zeros,
        diagnostics: diag,
    })
}

/// Bisection on the tracked lifted phase `j` against `level` inside the
/// accepted step `[t, t + dt]`. The lift is monotone, so bisection is
/// unconditionally convergent.
fn refine_crossing(
    state: &PhaseTrack,
    j: usize,
    level: f64,
    dt: f64,
    opts: &TrackOpts,
    diag: &mut TrackDiagnostics,
) -> Result<f64> {
    let mut lo = 0.0f64; // phase still above the level here
    let mut hi = dt; // and at or below it here
    let tol_t = 1e-12 * state.t.abs().max(1.0);
    let mut depth = 0u32;
    while hi - lo > tol_t && depth < opts.max_bisect {
        depth += 1;
        let mut placed = false;
        for frac in [0.5f64, 0.45, 0.55] {
            let s = lo + (hi - lo) * frac;
            let feasible = state.feasible_lifts(s, opts)?;
            diag.spectrum_evals += 1;
            if feasible.is_empty() {
                continue;
            }
            let above = feasible[0][j] >= level;
            let agree = feasible
                .iter()
                .all(|tup| (tup[j] >= level) == above);
            if agree {
                if above {
                    lo = s;
                } else {
                    hi = s;
                }
                placed = true;
                break;
            }
        }
        if !placed {
            // genuinely ambiguous probe: the colliding phases cross the
            // level together, so the midpoint is within the collision width
            diag.ambiguous_probes += 1;
            break;
        }
    }
    diag.max_bisect_depth = diag.max_bisect_depth.max(depth);
    Ok(state.t + 0.5 * (lo + hi))
}

/// `2pi |d| / <d, ell>`, the maximal-gap bound.
pub fn gap_bound(degree: &[u32], ell: &[f64]) -> f64 {
    let total: f64 = degree.iter().map(|&d| d as f64).sum();
    let drift: f64 = degree.iter().zip(ell).map(|(&d, &l)| d as f64 * l).sum();
    TAU * total / drift
}

/// Max over sliding windows of `|count([x, x+T]) - <d,ell> T / 2pi|`; the
/// density law bounds this by `|d|`.
pub fn density_check(zs: &ZeroSet, degree: &[u32], window_lengths: &[f64]) -> f64 {
    let (a, b) = zs.interval();
    let drift: f64 = degree
        .iter()
        .zip(zs.ell())
        .map(|(&d, &l)| d as f64 * l)
        .sum();
    let mut worst = 0.0f64;
    for &t_len in window_lengths {
        if t_len > b - a {
            continue;
        }
        let placements = 32;
        for i in 0..placements {
            let x = a + (b - a - t_len) * i as f64 / (placements - 1) as f64;
            let count = zs.count_in(x, x + t_len) as f64;
            let expect = drift * t_len / TAU;
            worst = worst.max((count - expect).abs());
        }
    }
    worst
}

/// Largest gap between consecutive distinct zeros.
pub fn max_gap_check(zs: &ZeroSet) -> f64 {
    zs.zeros()
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .fold(0.0, f64::max)
}

/// Real-analytic de-phasing of `f` sharing its zero set. Usable only for
/// polynomials that are self-inversive up to a unimodular factor.
pub struct SecularFn {
    line: LineEval,
    half_rate: f64,
    half_arg: f64,
    scale: f64,
}

impl SecularFn {
    pub fn new(p: &MultiPoly, ell: &[f64]) -> Result<SecularFn> {
        let c = p
            .self_inversive_factor(PROPORTIONALITY_REL_TOL)
            .ok_or(Error::NotSelfInversive)?;
        let x0 = vec![0.0; p.n()];
        let line = LineEval::new(p, &x0, ell)?;
        Ok(SecularFn {
            half_rate: line.drift / 2.0,
            half_arg: c.arg() / 2.0,
            scale: line.coeff_l1(),
            line,
        })
    }

    /// `g(x) = Re[e^{i(arg(c) - <d,ell> x)/2} f(x)]`; the imaginary part
    /// vanishes identically for self-inversive input.
    pub fn value(&self, x: f64) -> f64 {
        self.rotated(x).re
    }

    fn rotated(&self, x: f64) -> C64 {
        self.line.f(x) * C64::cis(self.half_arg - self.half_rate * x)
    }

    pub fn imag_residual(&self, x: f64) -> f64 {
        self.rotated(x).im.abs() / self.scale
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

/// `g(x)` at one point; see [`SecularFn`].
pub fn secular_value(p: &MultiPoly, ell: &[f64], x: f64) -> Result<f64> {
    Ok(SecularFn::new(p, ell)?.value(x))
}

#[derive(Clone, Debug)]
pub struct CrossValidation {
    pub tracked: usize,
    pub secular_roots: usize,
    pub max_match_distance: f64,
    pub unmatched_secular: Vec<f64>,
    pub unmatched_tracked: Vec<f64>,
    pub worst_secular_at_zero: f64,
}

impl CrossValidation {
    pub fn ok(&self, tol: f64) -> bool {
        self.unmatched_secular.is_empty()
            && self.unmatched_tracked.is_empty()
            && self.max_match_distance <= tol
    }
}

/// Compare phase-tracking zeros with sign changes of the secular function on
/// a dense grid (step `0.1 * 2pi / <d,ell>`, then bisection refinement).
pub fn cross_validate(
    p: &MultiPoly,
    ell: &[f64],
    a: f64,
    b: f64,
    opts: &TrackOpts,
) -> Result<CrossValidation> {
    let zs = find_zeros(p, ell, a, b, opts)?;
    let sec = SecularFn::new(p, ell)?;
    let drift: f64 = p
        .degree()
        .iter()
        .zip(ell)
        .map(|(&d, &l)| d as f64 * l)
        .sum();
    let h = 0.1 * TAU / drift;
    let steps = ((b - a) / h).ceil() as usize + 1;
    let mut sign_roots: Vec<f64> = Vec::new();
    let mut prev_x = a;
    let mut prev_g = sec.value(a);
    for i in 1..=steps {
        let x = a + (b - a) * i as f64 / steps as f64;
        let g = sec.value(x);
        if prev_g == 0.0 {
            sign_roots.push(prev_x);
        } else if prev_g * g < 0.0 {
            let mut lo = prev_x;
            let mut hi = x;
            let mut glo = prev_g;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let gm = sec.value(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if glo * gm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            sign_roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_g = g;
    }
    // match them up
    let mut max_dist = 0.0f64;
    let mut unmatched_secular = Vec::new();
    for &r in &sign_roots {
        let best = zs
            .zeros()
            .iter()
            .map(|&(x, _)| (x - r).abs())
            .fold(f64::INFINITY, f64::min);
        if best > 1e-8 {
            unmatched_secular.push(r);
        } else {
            max_dist = max_dist.max(best);
        }
    }
    let mut unmatched_tracked = Vec::new();
    let mut worst_sec = 0.0f64;
    for &(x, m) in zs.zeros() {
        worst_sec = worst_sec.max(sec.value(x).abs() / sec.scale());
        if m % 2 == 1 {
            let best = sign_roots
                .iter()
                .map(|&r| (x - r).abs())
                .fold(f64::INFINITY, f64::min);
            if best > 1e-8 {
                unmatched_tracked.push(x);
            } else {
                max_dist = max_dist.max(best);
            }
        }
    }
    Ok(CrossValidation {
        tracked: zs.zeros().len(),
        secular_roots: sign_roots.len(),
        max_match_distance: max_dist,
        unmatched_secular,
        unmatched_tracked,
        worst_secular_at_zero: worst_sec,
    })
}

/// First `n` returns of the direction-`ell` flow from a point on the torus
/// zero set: points `x0 + k_j ell mod 2pi` and return times `k_j - k_{j-1}`.
pub fn first_return_orbit(
    p: &MultiPoly,
    ell: &[f64],
    x0: &[f64],
    n: usize,
    opts: &TrackOpts,
) -> Result<Vec<(Vec<f64>, f64)>> {
    let line = LineEval::new(p, x0, ell)?;
    let at = line.f(0.0).norm();
    let scale = line.coeff_l1();
    if at > 1e-8 * scale {
        return Err(Error::NotOnZeroSet { value: at });
    }
    let bound = gap_bound(p.degree(), ell);
    let horizon = bound * (n as f64 + 2.0);
    let zs = find_zeros_anchored(p, x0, ell, 0.0, horizon, opts)?;
    let mut out = Vec::with_capacity(n);
    let mut prev_k = 0.0f64;
    for &(k, _) in zs.zeros() {
        if k <= opts.cluster_tol_x {
            continue; // the starting point itself
        }
        out.push((zs.torus_point(k), k - prev_k));
        prev_k = k;
        if out.len() == n {
            break;
        }
    }
    if out.len() < n {
        return Err(Error::TrackingFailed {
            t: horizon,
            reason: format!("expected {n} returns, found {}", out.len()),
        });
    }
    Ok(out)
}
