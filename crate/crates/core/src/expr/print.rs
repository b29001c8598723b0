//! Deterministic printing in the input grammar.
//!
//! Terms are emitted in descending monomial order, so printing a normal form
//! and reparsing it reproduces the normal form exactly.

use num::{BigRational, One, Signed};

use crate::expr::atom::Atom;
use crate::expr::poly::{Monomial, Poly};
use crate::expr::JetExpr;
use crate::sig::Signature;

impl JetExpr {
    /// Render in the expression grammar using the signature's names.
    pub fn text(&self, sig: &Signature) -> String {
        self.render(&Namer::Sig(sig))
    }

    /// Render with synthetic names; used in error messages where no
    /// signature is at hand.
    pub fn debug_text(&self) -> String {
        self.render(&Namer::Synthetic)
    }

    fn render(&self, namer: &Namer) -> String {
        if self.den().is_one() {
            return poly_text(self.num(), namer);
        }
        let num = self.num();
        let num_text = if num.term_count() == 1 && !leading_negative(num) {
            poly_text(num, namer)
        } else {
            format!("({})", poly_text(num, namer))
        };
        let den = self.den();
        let den_text = if single_plain_atom(den) {
            poly_text(den, namer)
        } else {
            format!("({})", poly_text(den, namer))
        };
        format!("{num_text}/{den_text}")
    }
}

enum Namer<'a> {
    Sig(&'a Signature),
    Synthetic,
}

impl Namer<'_> {
    fn base(&self, mu: usize) -> String {
        match self {
            Namer::Sig(sig) => sig.base_name(mu).to_string(),
            Namer::Synthetic => format!("x{mu}"),
        }
    }

    fn jet(&self, fiber: usize, index: &crate::sig::MultiIndex) -> String {
        match self {
            Namer::Sig(sig) => {
                let name = sig.fiber_name(fiber);
                if index.is_empty() {
                    name.to_string()
                } else {
                    format!("{name}_{}", sig.index_suffix(index))
                }
            }
            Namer::Synthetic => {
                if index.is_empty() {
                    format!("u{fiber}")
                } else {
                    format!("u{fiber}_{:?}", index.entries())
                }
            }
        }
    }

    fn named_const(&self, k: usize) -> String {
        match self {
            Namer::Sig(sig) => sig.const_name(k).to_string(),
            Namer::Synthetic => format!("c{k}"),
        }
    }
}

fn leading_negative(p: &Poly) -> bool {
    p.leading().map(|(_, c)| c.is_negative()).unwrap_or(false)
}

fn single_plain_atom(p: &Poly) -> bool {
    p.term_count() == 1
        && p.leading().is_some_and(|(m, c)| {
            c.is_one() && m.pairs().len() == 1 && m.pairs()[0].1 == 1
        })
}

fn poly_text(p: &Poly, namer: &Namer) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().collect::<Vec<_>>().into_iter().rev().enumerate() {
        let neg = c.is_negative();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&term_text(m, &c.abs(), namer));
    }
    out
}

fn term_text(m: &Monomial, c: &BigRational, namer: &Namer) -> String {
    let mut factors: Vec<String> = Vec::new();
    if !c.is_one() || m.is_unit() {
        factors.push(rational_text(c));
    }
    for (a, e) in m.pairs() {
        let base = atom_text(a, namer);
        if *e == 1 {
            factors.push(base);
        } else {
            factors.push(format!("{base}^{e}"));
        }
    }
    factors.join("*")
}

fn rational_text(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn atom_text(a: &Atom, namer: &Namer) -> String {
    match a {
        Atom::Base(mu) => namer.base(*mu as usize),
        Atom::Jet { fiber, index } => namer.jet(*fiber, index),
        Atom::Const(k) => namer.named_const(*k),
        Atom::Param => "$t".to_string(),
        Atom::Apply(f, arg) => format!("{}({})", f.name(), arg.render(namer)),
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{Func, JetExpr};
    use crate::sig::{MultiIndex, Signature};

    fn sig() -> Signature {
        Signature::new(vec!["x".into()], vec!["u".into()], 4).unwrap()
    }

    #[test]
    fn plain_forms() {
        let s = sig();
        assert_eq!(JetExpr::zero().text(&s), "0");
        assert_eq!(JetExpr::ratio(-3, 2).text(&s), "-3/2");
        let uxx = JetExpr::jet(0, MultiIndex::new(vec![0, 0]));
        let e = uxx.mul(&uxx).scale(&num::BigRational::new(1.into(), 2.into()));
        assert_eq!(e.text(&s), "1/2*u_xx^2");
    }

    #[test]
    fn sums_order_deterministically() {
        let s = sig();
        let x = JetExpr::base(0);
        let u = JetExpr::fiber(0);
        let e = x.add(&u).sub(&JetExpr::one());
        let e2 = JetExpr::zero().sub(&JetExpr::one()).add(&u).add(&x);
        assert_eq!(e.text(&s), e2.text(&s));
    }

    #[test]
    fn quotients_parenthesize() {
        let s = sig();
        let x = JetExpr::base(0);
        let u = JetExpr::fiber(0);
        let e = u.add(&JetExpr::one()).div(&x.mul(&x).add(&JetExpr::one())).unwrap();
        assert_eq!(e.text(&s), "(u + 1)/(x^2 + 1)");
        let simple = u.div(&x).unwrap();
        assert_eq!(simple.text(&s), "u/x");
    }

    #[test]
    fn functions_render() {
        let s = sig();
        let e = JetExpr::apply(Func::Sin, JetExpr::base(0).mul(&JetExpr::fiber(0)));
        assert_eq!(e.text(&s), "sin(x*u)");
    }
}
