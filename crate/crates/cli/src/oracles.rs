//! Numeric oracles: independent checks that never trust the symbolic path.

use anyhow::{bail, Result};
use rand::Rng;

use varseq::expr::EvalPoint;
use varseq::forms::Lagrangian;
use varseq::varcalc;
use varseq::{JetExpr, MultiIndex, Signature};

/// A polynomial sample path `u(t)` with exact derivatives of every order.
#[derive(Debug, Clone)]
pub struct SamplePath {
    coeffs: Vec<f64>,
}

impl SamplePath {
    pub fn random(rng: &mut impl Rng, degree: usize) -> Self {
        SamplePath {
            coeffs: (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    pub fn derivative(&self) -> SamplePath {
        SamplePath {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn scale(&self, s: f64) -> SamplePath {
        SamplePath {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &SamplePath) -> SamplePath {
        let n = self.coeffs.len().max(other.coeffs.len());
        SamplePath {
            coeffs: (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(0.0)
                        + other.coeffs.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        }
    }

    /// Multiply by `(t (1-t))^3`, which vanishes to third order at both ends.
    pub fn bumped(&self) -> SamplePath {
        let mut out = self.clone();
        for _ in 0..3 {
            // multiply by t - t^2
            let mut c = vec![0.0; out.coeffs.len() + 2];
            for (k, v) in out.coeffs.iter().enumerate() {
                c[k + 1] += v;
                c[k + 2] -= v;
            }
            out = SamplePath { coeffs: c };
        }
        out
    }
}

fn point_on_path(path: &SamplePath, t: f64, max_order: usize) -> EvalPoint {
    let mut point = EvalPoint::new();
    point.set_base(0, t);
    let mut d = path.clone();
    for k in 0..=max_order {
        point.set_jet(0, MultiIndex::new(vec![0; k]), d.eval(t));
        d = d.derivative();
    }
    point
}

/// Composite Simpson quadrature of a jet expression along a path.
fn integrate_on_path(
    sig: &Signature,
    expr: &JetExpr,
    path: &SamplePath,
    max_order: usize,
    n: usize,
) -> Result<f64> {
    let n = n + n % 2;
    let h = 1.0 / n as f64;
    let mut acc = 0.0;
    for k in 0..=n {
        let t = k as f64 * h;
        let v = expr.eval(sig, &point_on_path(path, t, max_order))?;
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * v;
    }
    Ok(acc * h / 3.0)
}

/// Result of one first-variation comparison.
#[derive(Debug, Clone)]
pub struct FirstVariationCheck {
    pub finite_difference: f64,
    pub pairing: f64,
    pub relative_error: f64,
}

/// Finite-difference first variation: for a random path and a compactly
/// supported bump, `dS/dtau` at zero must match the pairing of the
/// Euler-Lagrange form with the bump. Single fiber coordinate.
pub fn first_variation_check(
    lagrangian: &Lagrangian,
    rng: &mut impl Rng,
) -> Result<FirstVariationCheck> {
    let sig = lagrangian.sig();
    if sig.base_count() != 1 || sig.fiber_count() != 1 {
        bail!("the first-variation oracle runs on single-path mechanics bundles");
    }
    let eta = varcalc::euler_lagrange(lagrangian)?;
    let max_order = eta.order().max(lagrangian.order());
    let path = SamplePath::random(rng, 4);
    let bump = SamplePath::random(rng, 2).bumped();

    let quad_n = 400;
    let tau = 1e-4;
    let s_plus = integrate_on_path(
        sig,
        lagrangian.density(),
        &path.add(&bump.scale(tau)),
        max_order,
        quad_n,
    )?;
    let s_minus = integrate_on_path(
        sig,
        lagrangian.density(),
        &path.add(&bump.scale(-tau)),
        max_order,
        quad_n,
    )?;
    let finite_difference = (s_plus - s_minus) / (2.0 * tau);

    // <E(lambda), bump> along the unperturbed path.
    let n = quad_n;
    let h = 1.0 / n as f64;
    let mut pairing = 0.0;
    for k in 0..=n {
        let t = k as f64 * h;
        let point = point_on_path(&path, t, max_order);
        let eps = eta.component(0).eval(sig, &point)?;
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        pairing += w * eps * bump.eval(t);
    }
    pairing *= h / 3.0;

    let scale = finite_difference.abs().max(pairing.abs()).max(1e-6);
    Ok(FirstVariationCheck {
        finite_difference,
        pairing,
        relative_error: (finite_difference - pairing).abs() / scale,
    })
}

/// Numeric surface integral of a closed fiber 2-form over the unit sphere,
/// via a subdivided octahedron projected onto the sphere; degree-2 edge
/// midpoint rule per flat triangle, outward orientation.
pub fn sphere_flux(
    sig: &Signature,
    components: &std::collections::BTreeMap<(usize, usize), JetExpr>,
    subdivisions: usize,
) -> Result<f64> {
    let mut triangles: Vec<[[f64; 3]; 3]> = Vec::new();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0f64] {
                let a = [sx, 0.0, 0.0];
                let b = [0.0, sy, 0.0];
                let c = [0.0, 0.0, sz];
                // Outward orientation: flip for octants with negative
                // orientation product.
                if sx * sy * sz > 0.0 {
                    triangles.push([a, b, c]);
                } else {
                    triangles.push([a, c, b]);
                }
            }
        }
    }
    fn norm(p: [f64; 3]) -> [f64; 3] {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / n, p[1] / n, p[2] / n]
    }
    fn mid(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        norm([
            (a[0] + b[0]) / 2.0,
            (a[1] + b[1]) / 2.0,
            (a[2] + b[2]) / 2.0,
        ])
    }
    for _ in 0..subdivisions {
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for [a, b, c] in triangles {
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            next.push([a, ab, ca]);
            next.push([ab, b, bc]);
            next.push([ca, bc, c]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }

    let eval_form = |p: [f64; 3], e1: [f64; 3], e2: [f64; 3]| -> Result<f64> {
        let mut point = EvalPoint::new();
        point.set_base(0, 0.0);
        for a in 0..3 {
            point.set_fiber(a, p[a]);
        }
        let mut acc = 0.0;
        for (&(a, b), f) in components {
            let v = f.eval(sig, &point)?;
            acc += v * (e1[a] * e2[b] - e1[b] * e2[a]);
        }
        Ok(acc)
    };

    fn flat_mid(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        [
            (a[0] + b[0]) / 2.0,
            (a[1] + b[1]) / 2.0,
            (a[2] + b[2]) / 2.0,
        ]
    }
    let mut flux = 0.0;
    for [a, b, c] in &triangles {
        let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let m1 = flat_mid(*a, *b);
        let m2 = flat_mid(*b, *c);
        let m3 = flat_mid(*c, *a);
        let mut v = 0.0;
        for m in [m1, m2, m3] {
            v += eval_form(m, e1, e2)?;
        }
        flux += v / 3.0 / 2.0;
    }
    Ok(flux)
}

/// Trapezoid quadrature of a closed fiber 1-form around a circle of the given
/// radius in the plane of two fiber coordinates.
pub fn loop_period(
    sig: &Signature,
    components: &[JetExpr],
    fibers: (usize, usize),
    radius: f64,
    samples: usize,
) -> Result<f64> {
    let n = samples.max(16);
    let mut acc = 0.0;
    for k in 0..n {
        let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
        let mut point = EvalPoint::new();
        point.set_base(0, 0.0);
        point.set_fiber(fibers.0, radius * theta.cos());
        point.set_fiber(fibers.1, radius * theta.sin());
        let d0 = -radius * theta.sin();
        let d1 = radius * theta.cos();
        let a0 = components[fibers.0].eval(sig, &point)?;
        let a1 = components[fibers.1].eval(sig, &point)?;
        acc += a0 * d0 + a1 * d1;
    }
    Ok(acc * 2.0 * std::f64::consts::PI / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn bump_vanishes_at_ends() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let b = SamplePath::random(&mut rng, 2).bumped();
        assert!(b.eval(0.0).abs() < 1e-12);
        assert!(b.eval(1.0).abs() < 1e-12);
        let db = b.derivative();
        assert!(db.eval(0.0).abs() < 1e-12);
        assert!(db.eval(1.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_area_two_form() {
        // F = (x dy^dz + y dz^dx + z dx^dy)/r^3 integrates to 4 pi.
        use std::sync::Arc;
        let sig = Arc::new(
            Signature::new(
                vec!["t".into()],
                vec!["u1".into(), "u2".into(), "u3".into()],
                4,
            )
            .unwrap(),
        );
        let r3 = "sqrt(u1^2+u2^2+u3^2)^3";
        let mut comps = std::collections::BTreeMap::new();
        comps.insert(
            (0usize, 1usize),
            varseq::parse(&format!("u3/{r3}"), &sig).unwrap(),
        );
        comps.insert((0, 2), varseq::parse(&format!("-u2/{r3}"), &sig).unwrap());
        comps.insert((1, 2), varseq::parse(&format!("u1/{r3}"), &sig).unwrap());
        let flux = sphere_flux(&sig, &comps, 4).unwrap();
        let expected = 4.0 * std::f64::consts::PI;
        assert!(
            (flux - expected).abs() / expected < 1e-4,
            "flux {flux} vs {expected}"
        );
    }

    #[test]
    fn circle_period_of_angle_form() {
        use std::sync::Arc;
        let sig = Arc::new(
            Signature::new(vec!["t".into()], vec!["u1".into(), "u2".into()], 4).unwrap(),
        );
        let comps = vec![
            varseq::parse("-u2/(u1^2+u2^2)", &sig).unwrap(),
            varseq::parse("u1/(u1^2+u2^2)", &sig).unwrap(),
        ];
        let p = loop_period(&sig, &comps, (0, 1), 1.0, 128).unwrap();
        let expected = 2.0 * std::f64::consts::PI;
        assert!((p - expected).abs() < 1e-9, "period {p}");
    }
}
