//! Sparse multivariate polynomials over the atoms, with exact rational
//! coefficients.
//!
//! Monomials are sorted atom-power lists; polynomials map monomials to
//! coefficients in a fixed (lexicographic-on-atoms) order. One rewrite is
//! applied during construction: for a square-root atom whose argument is a
//! polynomial, `sqrt(p)^2 -> p`. Every monomial therefore carries such atoms
//! with exponent at most one, which is what makes relations like
//! `r^2 = x^2 + y^2 + z^2` hold by plain arithmetic.

use std::collections::BTreeMap;

use num::{BigRational, One, Signed, Zero};

use crate::expr::atom::{Atom, Func};

/// Product of atom powers, sorted by atom; exponents are positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, u32)>);

/// Lexicographic monomial order with the largest atom most significant.
/// Unlike the derived list order this is compatible with multiplication,
/// which the exact-division and gcd routines rely on.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let mut i = self.0.len();
        let mut j = other.0.len();
        loop {
            match (i, j) {
                (0, 0) => return Ordering::Equal,
                (0, _) => return Ordering::Less,
                (_, 0) => return Ordering::Greater,
                _ => {}
            }
            let (a, ae) = &self.0[i - 1];
            let (b, be) = &other.0[j - 1];
            match a.cmp(b) {
                Ordering::Equal => match ae.cmp(be) {
                    Ordering::Equal => {
                        i -= 1;
                        j -= 1;
                    }
                    ord => return ord,
                },
                ord => return ord,
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Self {
        Monomial(vec![(a, 1)])
    }

    /// Construct from unsorted pairs; merges duplicates, drops zero exponents.
    /// Does not apply the sqrt rewrite; use `Poly::term` for that.
    pub fn from_pairs(mut pairs: Vec<(Atom, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Atom, u32)> = Vec::with_capacity(pairs.len());
        for (a, e) in pairs {
            match out.last_mut() {
                Some((prev, pe)) if *prev == a => *pe += e,
                _ => out.push((a, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub fn exponent(&self, atom: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(a, _)| a == atom)
            .map_or(0, |&(_, e)| e)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Product of two monomials in the free ring (no rewrite).
    pub fn mul_free(&self, other: &Monomial) -> Monomial {
        let mut pairs = self.0.clone();
        pairs.extend_from_slice(&other.0);
        Monomial::from_pairs(pairs)
    }

    /// Quotient in the free ring if `other` divides `self`.
    pub fn div_free(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut it = self.0.iter();
        'outer: for (a, e) in &other.0 {
            for (b, f) in it.by_ref() {
                if b == a {
                    if f < e {
                        return None;
                    }
                    if f > e {
                        out.push((b.clone(), f - e));
                    }
                    continue 'outer;
                }
                out.push((b.clone(), *f));
            }
            return None;
        }
        out.extend(it.cloned());
        Some(Monomial::from_pairs(out))
    }

    /// Remove one atom entirely, returning its exponent.
    pub fn without(&self, atom: &Atom) -> (Monomial, u32) {
        let e = self.exponent(atom);
        if e == 0 {
            return (self.clone(), 0);
        }
        let pairs = self
            .0
            .iter()
            .filter(|(a, _)| a != atom)
            .cloned()
            .collect();
        (Monomial(pairs), e)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter().map(|(a, _)| a)
    }
}

/// Sparse polynomial: monomial -> nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(), c);
        }
        p
    }

    pub fn atom(a: Atom) -> Self {
        let mut p = Poly::zero();
        p.add_term(BigRational::one(), Monomial::atom(a));
        p
    }

    /// One normalized term. Applies the sqrt rewrite.
    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.add_term(c, m);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::unit())
                .is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Constant value if the polynomial has no atoms.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::unit()) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Leading (maximal) monomial and coefficient in the fixed order.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Add `c * m` after normalizing the monomial: any rewritable sqrt atom
    /// (polynomial argument) with exponent >= 2 is replaced by its argument.
    pub fn add_term(&mut self, c: BigRational, m: Monomial) {
        if c.is_zero() {
            return;
        }
        // Fast path: nothing to rewrite.
        let needs_rewrite = m.0.iter().any(|(a, e)| is_radical(a) && *e >= 2);
        if !needs_rewrite {
            self.insert_raw(c, m);
            return;
        }
        // Pull out one rewritable square and recurse via multiplication.
        let (atom, _) = m
            .0
            .iter()
            .find(|(a, e)| is_radical(a) && *e >= 2)
            .cloned()
            .unwrap();
        let (rest, e) = m.without(&atom);
        let arg = match &atom {
            Atom::Apply(Func::Sqrt, arg) => arg.num().clone(),
            _ => unreachable!(),
        };
        // sqrt(p)^e = p^(e/2) * sqrt(p)^(e%2)
        let mut base = Poly::term(c, rest);
        if e % 2 == 1 {
            base = base.mul(&Poly::atom(atom));
        }
        let reduced = base.mul(&arg.pow(e / 2));
        for (m2, c2) in reduced.terms {
            self.insert_raw(c2, m2);
        }
    }

    fn insert_raw(&mut self, c: BigRational, m: Monomial) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_raw(c.clone(), m.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(c1 * c2, m1.mul_free(m2));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// All atoms occurring in the polynomial (top level only).
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::new();
        for m in self.terms.keys() {
            for a in m.atoms() {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
        }
        out
    }

    pub fn contains_atom_where(&self, pred: &dyn Fn(&Atom) -> bool) -> bool {
        self.terms.keys().any(|m| m.atoms().any(|a| pred(a)))
    }

    /// Highest jet order, recursing into opaque arguments.
    pub fn jet_order(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.atoms())
            .map(|a| a.jet_order())
            .max()
            .unwrap_or(0)
    }

    /// Divide every coefficient by `c`.
    pub fn div_scalar(&self, c: &BigRational) -> Poly {
        assert!(!c.is_zero());
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k / c))
                .collect(),
        }
    }

    /// Content: positive gcd of the (rational) coefficients, such that
    /// `self / content` has coprime integer coefficients with positive leading
    /// coefficient... the sign is carried so the primitive part has positive
    /// leading coefficient.
    pub fn content(&self) -> BigRational {
        use num::BigInt;
        use num::Integer;
        if self.terms.is_empty() {
            return BigRational::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self
            .leading()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false)
        {
            content = -content;
        }
        content
    }

    /// Primitive part: `self / self.content()`.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.div_scalar(&self.content())
    }
}

/// A "radical" atom is a square root of a polynomial; these are the atoms the
/// `sqrt^2` rewrite applies to.
pub fn is_radical(atom: &Atom) -> bool {
    match atom {
        Atom::Apply(Func::Sqrt, arg) => arg.den().is_one(),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::JetExpr;
    use num::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    fn x() -> Atom {
        Atom::Base(0)
    }

    fn y() -> Atom {
        Atom::Base(1)
    }

    #[test]
    fn monomial_merge_and_divide() {
        let m = Monomial::from_pairs(vec![(y(), 1), (x(), 2), (x(), 1)]);
        assert_eq!(m.exponent(&x()), 3);
        assert_eq!(m.total_degree(), 4);
        let d = Monomial::from_pairs(vec![(x(), 1), (y(), 1)]);
        let r = m.div_free(&d).unwrap();
        assert_eq!(r.exponent(&x()), 2);
        assert_eq!(r.exponent(&y()), 0);
        assert!(d.div_free(&m).is_none());
    }

    #[test]
    fn arithmetic_cancels() {
        let p = Poly::atom(x()).add(&Poly::atom(y()));
        let q2 = p.mul(&p);
        // (x+y)^2 = x^2 + 2xy + y^2
        assert_eq!(q2.term_count(), 3);
        let diff = q2.sub(&q2);
        assert!(diff.is_zero());
    }

    #[test]
    fn sqrt_square_rewrites() {
        // r = sqrt(x^2 + y^2); r^2 must collapse to the argument.
        let arg = JetExpr::from_poly(Poly::atom(x()).pow(2).add(&Poly::atom(y()).pow(2)));
        let r = Atom::Apply(Func::Sqrt, std::sync::Arc::new(arg));
        let rp = Poly::atom(r.clone());
        let r2 = rp.mul(&rp);
        assert_eq!(r2, Poly::atom(x()).pow(2).add(&Poly::atom(y()).pow(2)));
        // r^3 = (x^2+y^2) * r
        let r3 = rp.mul(&rp).mul(&rp);
        assert!(r3.terms().all(|(m, _)| m.exponent(&r) == 1));
    }

    #[test]
    fn content_and_primitive() {
        let p = Poly::atom(x()).scale(&q(4)).add(&Poly::constant(q(6)));
        let c = p.content();
        assert_eq!(c, q(2));
        let prim = p.primitive();
        assert_eq!(prim, Poly::atom(x()).scale(&q(2)).add(&Poly::constant(q(3))));
        // Negative leading coefficient flips the content sign.
        let pneg = p.neg();
        assert_eq!(pneg.content(), q(-2));
        assert_eq!(pneg.primitive(), prim);
    }
}
