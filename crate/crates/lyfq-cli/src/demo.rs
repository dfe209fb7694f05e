//! Regenerates the bundled demonstration datasets at desk scale: zero sets
//! and layer curves for the degree-(2,2) example, its regularization, the
//! direction-ladder CDF overlays, the first-return dynamics, and the
//! unit-direction distributions for the Poisson and random-unitary families.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use lyfq::gapdist;
use lyfq::io;
use lyfq::nuij;
use lyfq::polycore::MultiPoly;
use lyfq::randutil::{haar_unitary, SeededStream};
use lyfq::torusdyn;
use lyfq::zeroline::{self, TrackOpts};
use lyfq::Error;

const TAU: f64 = 2.0 * PI;

pub fn run(figure: u32, seed: u64, out_dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::Invalid(format!("cannot create {out_dir:?}: {e}")))?;
    match figure {
        1 => figure1(out_dir),
        2 => figure2(out_dir, seed),
        3 => figure3(out_dir, seed),
        4 => figure4(out_dir),
        5 => figure5(out_dir, seed),
        other => Err(Error::Invalid(format!("unknown figure {other} (1-5)"))),
    }
}

fn write(out_dir: &Path, name: &str, content: &str) -> Result<(), Error> {
    std::fs::write(out_dir.join(name), content)
        .map_err(|e| Error::Invalid(format!("cannot write {name}: {e}")))
}

fn running_ell() -> Vec<f64> {
    vec![5.0 * PI / 22.0, 1.0]
}

/// Torus curves of all layers: one CSV with columns layer,y,x1,x2.
fn layer_curves(p: &MultiPoly, samples: usize) -> Result<String, Error> {
    let mut out = String::from("layer,y,x1,x2\n");
    for j in 1..=p.total_degree() {
        for i in 0..samples {
            let y = TAU * (i as f64 + 0.5) / samples as f64;
            let pt = torusdyn::layer_point(p, j, &[y])?;
            out.push_str(&format!(
                "{j},{},{},{}\n",
                io::fmt_f64(y),
                io::fmt_f64(pt[0]),
                io::fmt_f64(pt[1])
            ));
        }
    }
    Ok(out)
}

fn line_points(ell: &[f64], a: f64, b: f64, steps: usize) -> String {
    let mut out = String::from("t,x1,x2\n");
    for i in 0..=steps {
        let t = a + (b - a) * i as f64 / steps as f64;
        let x1 = (t * ell[0]).rem_euclid(TAU);
        let x2 = (t * ell[1]).rem_euclid(TAU);
        out.push_str(&format!(
            "{},{},{}\n",
            io::fmt_f64(t),
            io::fmt_f64(x1),
            io::fmt_f64(x2)
        ));
    }
    out
}

/// Zero set of the singular example on [0, 6 pi], its layer curves, and the
/// torus line.
fn figure1(out_dir: &Path) -> Result<(), Error> {
    let p = MultiPoly::running_example();
    let ell = running_ell();
    let opts = TrackOpts::default();
    let zs = zeroline::find_zeros(&p, &ell, 0.0, 6.0 * PI, &opts)?;
    write(out_dir, "fig1_zeros.csv", &io::zeros_to_csv(&zs))?;
    write(out_dir, "fig1_layers.csv", &layer_curves(&p, 720)?)?;
    write(out_dir, "fig1_line.csv", &line_points(&ell, 0.0, 6.0 * PI, 2000))
}

/// Same data after one full regularization pass at lambda = 0.2.
fn figure2(out_dir: &Path, seed: u64) -> Result<(), Error> {
    let p = MultiPoly::running_example();
    let ell = running_ell();
    let mut rng = SeededStream::new(seed, 0).rng();
    let anchor = nuij::select_anchor(&p, &mut rng)?;
    let q = nuij::regularize(&p, &anchor, 0.2)?;
    let opts = TrackOpts::default();
    let zs = zeroline::find_zeros(&q, &ell, 0.0, 6.0 * PI, &opts)?;
    write(out_dir, "fig2_zeros.csv", &io::zeros_to_csv(&zs))?;
    write(out_dir, "fig2_layers.csv", &layer_curves(&q, 720)?)?;
    write(out_dir, "fig2_poly.json", &io::poly_to_json_string(&q))
}

/// CDF overlays for the direction ladder ell = (1 + sqrt(2) 10^-m, 1)
/// against the unit-direction limit.
fn figure3(out_dir: &Path, seed: u64) -> Result<(), Error> {
    let p = MultiPoly::running_example();
    let mut rng = SeededStream::new(seed, 0).rng();
    let nu = gapdist::nu_one(&p, 10_000, &mut rng)?;
    write(out_dir, "fig3_nu1.cdf.csv", &io::cdf_csv(&nu))?;
    let opts = TrackOpts::default();
    for m in 1..=3u32 {
        let ell = [1.0 + SQRT_2 * 10f64.powi(-(m as i32)), 1.0];
        let drift = 2.0 * ell[0] + 2.0;
        let span = 10_000.0 * TAU / drift / 1.55; // about 10^4 gaps
        let zs = zeroline::find_zeros(&p, &ell, 0.0, span, &opts)?;
        let g = gapdist::empirical_gaps(&zs)?;
        write(out_dir, &format!("fig3_ell{m}.cdf.csv"), &io::cdf_csv(&g))?;
    }
    Ok(())
}

/// First-return dynamics on the zero set for ell = (pi, 1).
fn figure4(out_dir: &Path) -> Result<(), Error> {
    let p = MultiPoly::running_example();
    let ell = [PI, 1.0];
    let opts = TrackOpts::default();
    // anchor on the zero set: the singular point (0, 0) lies on it
    let orbit = zeroline::first_return_orbit(&p, &ell, &[0.0, 0.0], 60, &opts)?;
    let mut out = String::from("x1,x2,tau\n");
    for (point, tau) in &orbit {
        out.push_str(&format!(
            "{},{},{}\n",
            io::fmt_f64(point[0]),
            io::fmt_f64(point[1]),
            io::fmt_f64(*tau)
        ));
    }
    write(out_dir, "fig4_orbit.csv", &out)
}

/// Unit-direction gap distributions for the Poisson family (product of n=5
/// binomials) and a fixed Haar 5x5 determinantal polynomial.
fn figure5(out_dir: &Path, seed: u64) -> Result<(), Error> {
    let poisson_poly = MultiPoly::product_binomial(&[1, 1, 1, 1, 1]);
    let mut rng = SeededStream::new(seed, 0).rng();
    let g = gapdist::nu_one(&poisson_poly, 10_000, &mut rng)?;
    write(out_dir, "fig5_poisson.hist.csv", &io::histogram_csv(&g, 60))?;
    write(out_dir, "fig5_poisson.cdf.csv", &io::cdf_csv(&g))?;

    let u = haar_unitary(5, &mut rng);
    let det = MultiPoly::determinantal(&u, 1e-10)?;
    let g = gapdist::nu_one(&det, 10_000, &mut rng)?;
    write(out_dir, "fig5_cue.hist.csv", &io::histogram_csv(&g, 60))?;
    write(out_dir, "fig5_cue.cdf.csv", &io::cdf_csv(&g))
}
