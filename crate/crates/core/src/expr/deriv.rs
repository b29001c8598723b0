//! Exact partial and total derivatives.

use num::BigRational;

use crate::error::ExprError;
use crate::expr::atom::{Atom, Func};
use crate::expr::poly::{Monomial, Poly};
use crate::expr::JetExpr;
use crate::sig::{MultiIndex, Signature};

impl JetExpr {
    /// Partial derivative with respect to a single atom. Jet coordinates are
    /// mutually independent symbols; opaque functions differentiate through
    /// the chain rule.
    pub fn partial(&self, target: &Atom) -> JetExpr {
        let dn = poly_partial(&self.num, target);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_partial(&self.den, target);
        // (n/d)' = (n' d - n d') / d^2
        let num = JetExpr::from_poly(self.num.clone());
        let den = JetExpr::from_poly(self.den.clone());
        dn.mul(&den)
            .sub(&num.mul(&dd))
            .div(&den.mul(&den))
            .expect("nonzero denominator")
    }

    pub fn partial_base(&self, mu: usize) -> JetExpr {
        self.partial(&Atom::Base(mu as u8))
    }

    pub fn partial_jet(&self, fiber: usize, index: &MultiIndex) -> JetExpr {
        self.partial(&Atom::Jet {
            fiber,
            index: index.clone(),
        })
    }

    /// Total derivative `D_mu = d/dx^mu + sum u^a_{I mu} d/du^a_I`.
    ///
    /// Fails when the expression already contains a jet coordinate at the
    /// order cap: raising the order would silently truncate otherwise.
    pub fn total_derivative(&self, mu: usize, sig: &Signature) -> Result<JetExpr, ExprError> {
        let jets = self.jet_atoms();
        for (_, index) in &jets {
            if index.order() >= sig.order_cap() {
                return Err(ExprError::OrderCap {
                    order: index.order() + 1,
                    cap: sig.order_cap(),
                });
            }
        }
        let mut out = self.partial_base(mu);
        for (fiber, index) in jets {
            let d = self.partial_jet(fiber, &index);
            if d.is_zero() {
                continue;
            }
            let raised = JetExpr::jet(fiber, index.raised(mu as u8));
            out = out.add(&raised.mul(&d));
        }
        Ok(out)
    }

    /// Iterated total derivative `D_I`.
    pub fn total_derivative_multi(
        &self,
        index: &MultiIndex,
        sig: &Signature,
    ) -> Result<JetExpr, ExprError> {
        let mut acc = self.clone();
        for &mu in index.entries() {
            acc = acc.total_derivative(mu as usize, sig)?;
        }
        Ok(acc)
    }
}

fn poly_partial(p: &Poly, target: &Atom) -> JetExpr {
    let mut acc = JetExpr::zero();
    for (m, c) in p.terms() {
        for (i, (a, e)) in m.pairs().iter().enumerate() {
            let da = atom_partial(a, target);
            if da.is_zero() {
                continue;
            }
            // c * e * a^(e-1) * da * (other factors)
            let mut rest: Vec<(Atom, u32)> = Vec::with_capacity(m.pairs().len());
            for (j, (b, f)) in m.pairs().iter().enumerate() {
                if i == j {
                    if *f > 1 {
                        rest.push((b.clone(), f - 1));
                    }
                } else {
                    rest.push((b.clone(), *f));
                }
            }
            let coeff = c * BigRational::from_integer((*e).into());
            let term = JetExpr::from_poly(Poly::term(coeff, Monomial::from_pairs(rest)));
            acc = acc.add(&term.mul(&da));
        }
    }
    acc
}

fn atom_partial(atom: &Atom, target: &Atom) -> JetExpr {
    if atom == target {
        return JetExpr::one();
    }
    match atom {
        Atom::Apply(func, arg) => {
            let inner = arg.partial(target);
            if inner.is_zero() {
                return JetExpr::zero();
            }
            func_derivative(*func, arg).mul(&inner)
        }
        _ => JetExpr::zero(),
    }
}

/// `f'(arg)` for each opaque function; the table is closed under
/// differentiation in the rational-function sense.
fn func_derivative(func: Func, arg: &JetExpr) -> JetExpr {
    match func {
        Func::Sin => JetExpr::apply(Func::Cos, arg.clone()),
        Func::Cos => JetExpr::apply(Func::Sin, arg.clone()).neg(),
        Func::Exp => JetExpr::apply(Func::Exp, arg.clone()),
        Func::Log => arg.recip().expect("log argument nonzero"),
        Func::Arctan => JetExpr::one()
            .div(&JetExpr::one().add(&arg.mul(arg)))
            .expect("1 + arg^2 nonzero"),
        Func::Sqrt => {
            let two_sqrt = JetExpr::apply(Func::Sqrt, arg.clone()).scale(&BigRational::from_integer(2.into()));
            JetExpr::one().div(&two_sqrt).expect("sqrt argument nonzero")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig1() -> Signature {
        Signature::new(vec!["x".into()], vec!["u".into()], 4).unwrap()
    }

    fn u_jet(suffix: usize) -> JetExpr {
        JetExpr::jet(0, MultiIndex::new(vec![0; suffix]))
    }

    #[test]
    fn power_rule() {
        // d(u_x^2)/du_x = 2 u_x
        let ux = u_jet(1);
        let e = ux.mul(&ux);
        let d = e.partial(&Atom::Jet {
            fiber: 0,
            index: MultiIndex::new(vec![0]),
        });
        assert_eq!(d, ux.scale(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn jets_are_independent() {
        // d(u * u_xx)/du_xx = u
        let e = u_jet(0).mul(&u_jet(2));
        let d = e.partial(&Atom::Jet {
            fiber: 0,
            index: MultiIndex::new(vec![0, 0]),
        });
        assert_eq!(d, u_jet(0));
    }

    #[test]
    fn chain_rule_through_opaque() {
        // d(sin(u_x * x))/dx = u_x cos(u_x x)
        let x = JetExpr::base(0);
        let ux = u_jet(1);
        let e = JetExpr::apply(Func::Sin, ux.mul(&x));
        let d = e.partial_base(0);
        let expected = ux.mul(&JetExpr::apply(Func::Cos, ux.mul(&x)));
        assert_eq!(d, expected);
    }

    #[test]
    fn total_derivative_definition() {
        let sig = sig1();
        // D_x u = u_x
        let d = u_jet(0).total_derivative(0, &sig).unwrap();
        assert_eq!(d, u_jet(1));
        // D_x (x u_x) = u_x + x u_xx
        let e = JetExpr::base(0).mul(&u_jet(1));
        let d = e.total_derivative(0, &sig).unwrap();
        let expected = u_jet(1).add(&JetExpr::base(0).mul(&u_jet(2)));
        assert_eq!(d, expected);
    }

    #[test]
    fn total_derivatives_commute() {
        let sig = Signature::new(vec!["x".into(), "y".into()], vec!["u".into()], 4).unwrap();
        // D_x D_y u = D_y D_x u = u_xy
        let u = JetExpr::fiber(0);
        let dxy = u
            .total_derivative(0, &sig)
            .unwrap()
            .total_derivative(1, &sig)
            .unwrap();
        let dyx = u
            .total_derivative(1, &sig)
            .unwrap()
            .total_derivative(0, &sig)
            .unwrap();
        assert_eq!(dxy, dyx);
        assert_eq!(dxy, JetExpr::jet(0, MultiIndex::new(vec![0, 1])));
    }

    #[test]
    fn order_cap_is_loud() {
        let sig = Signature::new(vec!["x".into()], vec!["u".into()], 2).unwrap();
        let top = u_jet(2);
        assert!(matches!(
            top.total_derivative(0, &sig),
            Err(ExprError::OrderCap { .. })
        ));
    }

    #[test]
    fn sqrt_derivative() {
        // d sqrt(x^2+1)/dx = x / sqrt(x^2+1); engine stores it conjugated as
        // x sqrt(x^2+1) / (x^2+1).
        let x = JetExpr::base(0);
        let arg = x.mul(&x).add(&JetExpr::one());
        let r = JetExpr::apply(Func::Sqrt, arg.clone());
        let d = r.partial_base(0);
        let expected = x.mul(&r).div(&arg).unwrap();
        assert_eq!(d, expected);
        // And r * dr/dx = x exactly.
        assert_eq!(r.mul(&d), x);
    }
}
