//! Exact symbolic scalars in base, fiber and jet coordinates.
//!
//! An expression is a reduced fraction of two polynomials over the atoms.
//! Normal form invariants:
//!
//! * the denominator is nonzero, has leading coefficient one, and contains no
//!   rewritable sqrt atoms (they are cleared by conjugation);
//! * numerator and denominator have no common polynomial factor (multivariate
//!   gcd over the sqrt-free decomposition);
//! * `sqrt(p)^2` never survives for polynomial `p` (rewritten on the fly);
//! * a zero numerator forces denominator one.
//!
//! Normalization is idempotent and `e - e` is syntactically zero, so equality
//! of normal forms decides equality on the rational fragment.

pub mod atom;
mod deriv;
mod eval;
pub mod gcd;
mod integrate;
mod parse;
mod print;
pub mod poly;
mod subst;
pub mod zero;

use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

pub use atom::{Atom, Func};
pub use eval::EvalPoint;
pub use integrate::antiderivative_in;
pub use parse::parse;
pub use zero::{Verdict, ZeroCfg};

use crate::error::ExprError;
use poly::{is_radical, Monomial, Poly};

/// A normalized expression: an exact rational function of the atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetExpr {
    num: Poly,
    den: Poly,
}

impl JetExpr {
    pub fn zero() -> Self {
        JetExpr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        JetExpr::from_poly(Poly::one())
    }

    pub fn rational(q: BigRational) -> Self {
        JetExpr::from_poly(Poly::constant(q))
    }

    pub fn integer(n: i64) -> Self {
        JetExpr::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0);
        JetExpr::rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn base(mu: usize) -> Self {
        JetExpr::from_poly(Poly::atom(Atom::Base(mu as u8)))
    }

    pub fn jet(fiber: usize, index: crate::sig::MultiIndex) -> Self {
        JetExpr::from_poly(Poly::atom(Atom::jet(fiber, index)))
    }

    pub fn fiber(a: usize) -> Self {
        JetExpr::jet(a, crate::sig::MultiIndex::empty())
    }

    pub fn named_const(k: usize) -> Self {
        JetExpr::from_poly(Poly::atom(Atom::Const(k)))
    }

    pub fn param() -> Self {
        JetExpr::from_poly(Poly::atom(Atom::Param))
    }

    pub fn from_poly(num: Poly) -> Self {
        JetExpr {
            num,
            den: Poly::one(),
        }
    }

    /// Apply an opaque function, folding a few exact constant values.
    pub fn apply(func: Func, arg: JetExpr) -> Self {
        if let Some(q) = arg.as_rational() {
            match func {
                Func::Sin | Func::Arctan if q.is_zero() => return JetExpr::zero(),
                Func::Cos | Func::Exp if q.is_zero() => return JetExpr::one(),
                Func::Log if q.is_one() => return JetExpr::zero(),
                Func::Sqrt => {
                    if q.is_zero() {
                        return JetExpr::zero();
                    }
                    if !q.is_negative() {
                        if let (Some(n), Some(d)) = (sqrt_exact(q.numer()), sqrt_exact(q.denom())) {
                            return JetExpr::rational(BigRational::new(n, d));
                        }
                    }
                }
                _ => {}
            }
        }
        JetExpr::from_poly(Poly::atom(Atom::Apply(func, Arc::new(arg))))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Syntactic zero test: the normal form is literally `0`.
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.den.is_one() {
            return None;
        }
        self.num.as_constant()
    }

    pub fn jet_order(&self) -> usize {
        self.num.jet_order().max(self.den.jet_order())
    }

    pub fn add(&self, other: &JetExpr) -> JetExpr {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return JetExpr::normalized(self.num.add(&other.num), self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        JetExpr::normalized(num, den)
    }

    pub fn neg(&self) -> JetExpr {
        JetExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &JetExpr) -> JetExpr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &JetExpr) -> JetExpr {
        if self.is_zero() || other.is_zero() {
            return JetExpr::zero();
        }
        JetExpr::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, q: &BigRational) -> JetExpr {
        if q.is_zero() {
            return JetExpr::zero();
        }
        JetExpr {
            num: self.num.scale(q),
            den: self.den.clone(),
        }
    }

    pub fn div(&self, other: &JetExpr) -> Result<JetExpr, ExprError> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(JetExpr::normalized(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn recip(&self) -> Result<JetExpr, ExprError> {
        JetExpr::one().div(self)
    }

    pub fn pow(&self, e: i64) -> Result<JetExpr, ExprError> {
        if e < 0 {
            return self.recip()?.pow(-e);
        }
        let mut acc = JetExpr::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Ok(acc)
    }

    /// Sum helper.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a JetExpr>) -> JetExpr {
        items
            .into_iter()
            .fold(JetExpr::zero(), |acc, e| acc.add(e))
    }

    /// Construct the normal form of `num / den`.
    fn normalized(num: Poly, den: Poly) -> JetExpr {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return JetExpr::zero();
        }
        let (mut num, mut den) = (num, den);

        // Clear rewritable sqrt atoms from the denominator by conjugation.
        loop {
            let radical = den
                .atoms()
                .into_iter()
                .filter(is_radical_ref)
                .max();
            let Some(s) = radical else { break };
            // den = d0 + s*d1 with s-exponent <= 1 after normalization.
            let mut d0 = Poly::zero();
            let mut d1 = Poly::zero();
            for (m, c) in den.terms() {
                let (rest, e) = m.without(&s);
                match e {
                    0 => d0.add_term(c.clone(), rest),
                    1 => d1.add_term(c.clone(), rest),
                    _ => unreachable!("radical exponent above one in normal form"),
                }
            }
            let conj = d0.sub(&Poly::atom(s.clone()).mul(&d1));
            if conj.is_zero() {
                // den was exactly s*d1: divide both sides by s via
                // num * s / (s^2 * d1) = num * s / (arg * d1).
                let arg = match &s {
                    Atom::Apply(Func::Sqrt, arg) => arg.num().clone(),
                    _ => unreachable!(),
                };
                num = num.mul(&Poly::atom(s.clone()));
                den = d1.mul(&arg);
            } else {
                num = num.mul(&conj);
                den = den.mul(&conj);
            }
        }

        // Reduce by the gcd of the sqrt-free decomposition: group numerator
        // terms by their radical-monomial part; the sqrt-free cofactors and
        // the (already conjugated) denominator live in a free polynomial ring.
        let mut parts: std::collections::BTreeMap<Monomial, Poly> = Default::default();
        for (m, c) in num.terms() {
            let mut rad = Vec::new();
            let mut free = Vec::new();
            for (a, e) in m.pairs() {
                if is_radical(a) {
                    rad.push((a.clone(), *e));
                } else {
                    free.push((a.clone(), *e));
                }
            }
            parts
                .entry(Monomial::from_pairs(rad))
                .or_insert_with(Poly::zero)
                .add_term(c.clone(), Monomial::from_pairs(free));
        }
        let mut g = den.clone();
        for cofactor in parts.values() {
            if g.is_one() {
                break;
            }
            g = gcd::poly_gcd(&g, cofactor);
        }
        if g.as_constant().is_none() {
            let mut reduced = Poly::zero();
            for (rad, cofactor) in &parts {
                let c = gcd::poly_div_exact(cofactor, &g).expect("gcd divides");
                reduced = reduced.add(&c.mul(&Poly::term(BigRational::one(), rad.clone())));
            }
            num = reduced;
            den = gcd::poly_div_exact(&den, &g).expect("gcd divides");
        }

        // Monic denominator.
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
        if !lc.is_one() {
            num = num.div_scalar(&lc);
            den = den.div_scalar(&lc);
        }
        JetExpr { num, den }
    }

    /// All atoms of the expression, including those nested inside opaque
    /// function arguments.
    pub fn collect_atoms(&self) -> Vec<Atom> {
        let mut out = Vec::new();
        self.collect_atoms_into(&mut out);
        out
    }

    fn collect_atoms_into(&self, out: &mut Vec<Atom>) {
        for p in [&self.num, &self.den] {
            for a in p.atoms() {
                if let Atom::Apply(_, arg) = &a {
                    arg.collect_atoms_into(out);
                }
                if !out.contains(&a) {
                    out.push(a);
                }
            }
        }
    }

    /// All jet atoms `(fiber, index)` occurring anywhere in the expression.
    pub fn jet_atoms(&self) -> Vec<(usize, crate::sig::MultiIndex)> {
        let mut out: Vec<(usize, crate::sig::MultiIndex)> = Vec::new();
        for a in self.collect_atoms() {
            if let Atom::Jet { fiber, index } = a {
                if !out.contains(&(fiber, index.clone())) {
                    out.push((fiber, index));
                }
            }
        }
        out.sort();
        out
    }

    pub fn contains_param(&self) -> bool {
        self.collect_atoms().iter().any(|a| matches!(a, Atom::Param))
    }

    /// Rebuild the expression, replacing atoms for which `f` returns a value.
    /// The map is applied recursively inside opaque function arguments.
    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Option<JetExpr>) -> JetExpr {
        let num = map_poly(&self.num, f);
        let den = map_poly(&self.den, f);
        num.div(&den).expect("denominator stays nonzero")
    }
}

fn is_radical_ref(a: &Atom) -> bool {
    is_radical(a)
}

/// Exact integer square root, if the input is a perfect square.
fn sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

fn map_poly(p: &Poly, f: &impl Fn(&Atom) -> Option<JetExpr>) -> JetExpr {
    let mut acc = JetExpr::zero();
    for (m, c) in p.terms() {
        let mut term = JetExpr::rational(c.clone());
        for (a, e) in m.pairs() {
            let image = match f(a) {
                Some(img) => img,
                None => match a {
                    Atom::Apply(func, arg) => JetExpr::apply(*func, arg.map_atoms(f)),
                    _ => JetExpr::from_poly(Poly::atom(a.clone())),
                },
            };
            term = term.mul(&image.pow(*e as i64).expect("nonnegative power"));
        }
        acc = acc.add(&term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::MultiIndex;

    fn x() -> JetExpr {
        JetExpr::base(0)
    }

    fn y() -> JetExpr {
        JetExpr::base(1)
    }

    fn u() -> JetExpr {
        JetExpr::fiber(0)
    }

    #[test]
    fn ring_identities() {
        let e = x().mul(&u()).add(&JetExpr::ratio(1, 2));
        assert!(e.sub(&e).is_zero());
        assert_eq!(e.add(&JetExpr::zero()), e);
        assert_eq!(e.mul(&JetExpr::one()), e);
    }

    #[test]
    fn fraction_reduction() {
        // (x^2 - y^2) / (x - y) = x + y
        let num = x().mul(&x()).sub(&y().mul(&y()));
        let den = x().sub(&y());
        let q = num.div(&den).unwrap();
        assert_eq!(q, x().add(&y()));
    }

    #[test]
    fn monic_denominator() {
        // 1 / (2x) -> (1/2) / x
        let e = JetExpr::one().div(&x().scale(&num::BigRational::from_integer(2.into()))).unwrap();
        assert!(e.den().leading().unwrap().1.is_one());
        let back = e.mul(&x());
        assert_eq!(back, JetExpr::ratio(1, 2));
    }

    #[test]
    fn division_by_zero_detected() {
        assert_eq!(x().div(&JetExpr::zero()), Err(ExprError::DivisionByZero));
    }

    #[test]
    fn sqrt_conjugation() {
        // 1/(r(r+z)) + 1/(r(r-z)) = 2 / (x^2+y^2) with r = sqrt(x^2+y^2+z^2).
        let z = JetExpr::base(2);
        let rho = x().mul(&x()).add(&y().mul(&y()));
        let r2 = rho.add(&z.mul(&z));
        let r = JetExpr::apply(Func::Sqrt, r2);
        let a = JetExpr::one().div(&r.mul(&r.add(&z))).unwrap();
        let b = JetExpr::one().div(&r.mul(&r.sub(&z))).unwrap();
        let s = a.add(&b);
        let expected = JetExpr::integer(2).div(&rho).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn sqrt_of_square_constant_folds() {
        assert_eq!(
            JetExpr::apply(Func::Sqrt, JetExpr::ratio(9, 4)),
            JetExpr::ratio(3, 2)
        );
        // Non-squares stay formal.
        let s3 = JetExpr::apply(Func::Sqrt, JetExpr::integer(3));
        assert!(s3.as_rational().is_none());
        assert_eq!(s3.mul(&s3), JetExpr::integer(3));
    }

    #[test]
    fn normalization_idempotent() {
        let r = JetExpr::apply(Func::Sqrt, x().mul(&x()).add(&y().mul(&y())));
        let e = x().add(&r).div(&y().add(&r)).unwrap();
        let renorm = JetExpr::normalized(e.num().clone(), e.den().clone());
        assert_eq!(e, renorm);
    }

    #[test]
    fn map_atoms_rebuilds() {
        let e = u().mul(&u()).add(&x());
        let doubled = e.map_atoms(&|a| match a {
            Atom::Jet { .. } => Some(JetExpr::jet(0, MultiIndex::empty()).scale(&num::BigRational::from_integer(2.into()))),
            _ => None,
        });
        // (2u)^2 + x = 4u^2 + x
        let expected = u().mul(&u()).scale(&num::BigRational::from_integer(4.into())).add(&x());
        assert_eq!(doubled, expected);
    }
}
