//! Multivariate polynomial gcd by the primitive remainder sequence.
//!
//! Inputs must be free of rewritable sqrt atoms (the fraction normalizer
//! guarantees this: denominators are conjugated sqrt-free first, and the
//! numerator is decomposed by its sqrt-monomial parts). On such polynomials
//! the ring operations of `Poly` coincide with the free polynomial ring, so
//! the classical algorithm applies: pick a main atom, view the polynomial as
//! univariate with polynomial coefficients, and recurse through contents and
//! pseudo-remainders.

use num::{BigInt, BigRational, One, Zero};

use crate::expr::atom::Atom;
use crate::expr::poly::{is_radical, Monomial, Poly};

/// Gcd of two polynomials, primitive with positive leading coefficient.
/// Returns `1` whenever either input is constant.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    debug_assert!(!a.contains_atom_where(&is_radical));
    debug_assert!(!b.contains_atom_where(&is_radical));
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    if coprime_by_evaluation(a, b) {
        return Poly::one();
    }
    gcd_primitive(&a.primitive(), &b.primitive()).primitive()
}

/// Probabilistic coprimality witness: evaluate both polynomials at a random
/// integer point; if the integer gcd of the values is 1 the polynomials are
/// coprime (any common factor divides both values). A gcd > 1 or a zero value
/// is inconclusive.
fn coprime_by_evaluation(a: &Poly, b: &Poly) -> bool {
    use num::Integer;
    let mut atoms = a.atoms();
    for at in b.atoms() {
        if !atoms.contains(&at) {
            atoms.push(at);
        }
    }
    let mut seed = 0x9e37_79b9_7f4a_7c15u64;
    for trial in 0..2u64 {
        let assignment: Vec<(Atom, BigInt)> = atoms
            .iter()
            .enumerate()
            .map(|(i, at)| {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407 + trial + i as u64);
                (at.clone(), BigInt::from((seed >> 33) % 1000 + 2))
            })
            .collect();
        let va = eval_int(a, &assignment);
        let vb = eval_int(b, &assignment);
        if let (Some(va), Some(vb)) = (va, vb) {
            if !va.is_zero() && !vb.is_zero() && va.gcd(&vb).is_one() {
                return true;
            }
        }
    }
    false
}

/// Integer evaluation of the primitive part (whose coefficients are coprime
/// integers by construction).
fn eval_int(p: &Poly, assignment: &[(Atom, BigInt)]) -> Option<BigInt> {
    let prim = p.primitive();
    let mut acc = BigInt::zero();
    for (m, c) in prim.terms() {
        let mut term = c.numer().clone();
        for (a, e) in m.pairs() {
            let v = &assignment.iter().find(|(at, _)| at == a)?.1;
            term *= v.pow(*e);
        }
        acc += term;
    }
    Some(acc)
}

fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    // Base case: univariate in zero atoms means constants.
    let main = match pick_main_atom(a, b) {
        Some(at) => at,
        None => return Poly::one(),
    };
    let ua = UniView::of(a, &main);
    let ub = UniView::of(b, &main);
    // The main atom is the maximum over both polynomials, so it occurs in at
    // least one of them.
    debug_assert!(ua.degree() > 0 || ub.degree() > 0);

    // gcd = gcd(contents) * gcd of primitive parts.
    let ca = ua.content();
    let cb = ub.content();
    let content_gcd = poly_gcd(&ca, &cb);

    if ua.degree() == 0 || ub.degree() == 0 {
        // One side is "constant" in the main atom: only the content survives.
        return content_gcd;
    }

    let mut f = ua.div_content(&ca);
    let mut g = ub.div_content(&cb);
    if f.degree() < g.degree() {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = f.pseudo_rem(&g);
        if r.is_zero() {
            let gp = g.primitive_in_main();
            return content_gcd.mul(&gp.assemble(&main));
        }
        if r.degree() == 0 {
            return content_gcd;
        }
        f = g;
        g = r.primitive_in_main();
    }
}

fn pick_main_atom(a: &Poly, b: &Poly) -> Option<Atom> {
    let mut atoms = a.atoms();
    for at in b.atoms() {
        if !atoms.contains(&at) {
            atoms.push(at);
        }
    }
    atoms.into_iter().max()
}

/// Univariate view: coefficients (polynomials in the remaining atoms) indexed
/// by the exponent of the main atom.
struct UniView {
    coeffs: Vec<Poly>, // index = exponent; highest is nonzero
}

impl UniView {
    fn of(p: &Poly, main: &Atom) -> UniView {
        let mut coeffs: Vec<Poly> = Vec::new();
        for (m, c) in p.terms() {
            let (rest, e) = m.without(main);
            if coeffs.len() <= e as usize {
                coeffs.resize(e as usize + 1, Poly::zero());
            }
            coeffs[e as usize] = coeffs[e as usize].add(&Poly::term(c.clone(), rest));
        }
        let mut v = UniView { coeffs };
        v.trim();
        v
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn leading(&self) -> &Poly {
        self.coeffs.last().unwrap()
    }

    /// Content: gcd of the coefficients.
    fn content(&self) -> Poly {
        let mut acc = Poly::zero();
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            acc = poly_gcd(&acc, c);
            if acc.is_one() {
                break;
            }
        }
        if acc.is_zero() {
            Poly::one()
        } else {
            acc
        }
    }

    fn div_content(&self, content: &Poly) -> UniView {
        UniView {
            coeffs: self
                .coeffs
                .iter()
                .map(|c| poly_div_exact(c, content).expect("content divides"))
                .collect(),
        }
    }

    fn primitive_in_main(&self) -> UniView {
        let c = self.content();
        self.div_content(&c)
    }

    fn scale(&self, p: &Poly) -> UniView {
        UniView {
            coeffs: self.coeffs.iter().map(|c| c.mul(p)).collect(),
        }
    }

    fn assemble(&self, main: &Atom) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in self.coeffs.iter().enumerate() {
            let factor = Poly::term(
                BigRational::one(),
                Monomial::from_pairs(vec![(main.clone(), e as u32)]),
            );
            out = out.add(&c.mul(&factor));
        }
        out
    }

    /// Pseudo-remainder up to main-free factors of `lc(g)`; those factors are
    /// content in the main atom and vanish under the primitive part taken by
    /// the caller.
    fn pseudo_rem(&self, g: &UniView) -> UniView {
        let mut f = UniView {
            coeffs: self.coeffs.clone(),
        };
        let dg = g.degree();
        let lg = g.leading().clone();
        while !f.is_zero() && f.degree() >= dg {
            let df = f.degree();
            let lf = f.leading().clone();
            // f := lg * f - lf * x^(df-dg) * g
            let mut next = f.scale(&lg);
            for (e, c) in g.coeffs.iter().enumerate() {
                let shift = e + df - dg;
                let sub = c.mul(&lf);
                next.coeffs[shift] = next.coeffs[shift].sub(&sub);
            }
            next.trim();
            f = next;
        }
        f
    }
}

/// Exact multivariate division: `a / b` when `b` divides `a` in the free
/// polynomial ring, `None` otherwise.
pub fn poly_div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    if b.is_zero() {
        return None;
    }
    if a.is_zero() {
        return Some(Poly::zero());
    }
    if let Some(c) = b.as_constant() {
        return Some(a.div_scalar(&c));
    }
    let (lm, lc) = b.leading().map(|(m, c)| (m.clone(), c.clone()))?;
    let mut rem = a.clone();
    let mut quot = Poly::zero();
    while !rem.is_zero() {
        let (rm, rc) = rem.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let qm = rm.div_free(&lm)?;
        let qc = rc / &lc;
        let qterm = Poly::term(qc, qm);
        quot = quot.add(&qterm);
        rem = rem.sub(&qterm.mul(b));
    }
    Some(quot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    fn x() -> Poly {
        Poly::atom(Atom::Base(0))
    }

    fn y() -> Poly {
        Poly::atom(Atom::Base(1))
    }

    fn z() -> Poly {
        Poly::atom(Atom::Base(2))
    }

    #[test]
    fn exact_division() {
        let a = x().add(&y()).mul(&x().sub(&y()));
        let d = poly_div_exact(&a, &x().add(&y())).unwrap();
        assert_eq!(d, x().sub(&y()));
        assert!(poly_div_exact(&a, &x().add(&Poly::one())).is_none());
    }

    #[test]
    fn univariate_gcd() {
        // (x+1)^2 (x-3) vs (x+1)(x+2)
        let a = x().add(&Poly::one()).pow(2).mul(&x().sub(&Poly::constant(q(3))));
        let b = x().add(&Poly::one()).mul(&x().add(&Poly::constant(q(2))));
        let g = poly_gcd(&a, &b);
        assert_eq!(g, x().add(&Poly::one()));
    }

    #[test]
    fn multivariate_gcd() {
        // g = x + y*z, a = g*(x^2 + y), b = g*(z + 2)
        let g0 = x().add(&y().mul(&z()));
        let a = g0.mul(&x().pow(2).add(&y()));
        let b = g0.mul(&z().add(&Poly::constant(q(2))));
        let g = poly_gcd(&a, &b);
        assert_eq!(g, g0);
    }

    #[test]
    fn coprime_fast_path() {
        let a = x().add(&Poly::one());
        let b = y().add(&Poly::constant(q(2)));
        assert_eq!(poly_gcd(&a, &b), Poly::one());
    }

    #[test]
    fn gcd_handles_contents() {
        // a = 6x^2 y, b = 4xy^2 -> primitive gcd = x y (constants dropped).
        let a = x().pow(2).mul(&y()).scale(&q(6));
        let b = x().mul(&y().pow(2)).scale(&q(4));
        let g = poly_gcd(&a, &b);
        assert_eq!(g, x().mul(&y()));
    }
}
