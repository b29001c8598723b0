//! IEEE double evaluation at a coordinate assignment.

use std::collections::BTreeMap;

use crate::error::ExprError;
use crate::expr::atom::{Atom, Func};
use crate::expr::poly::Poly;
use crate::expr::JetExpr;
use crate::sig::{MultiIndex, Signature};

/// Values for the coordinates; declared constants come from the signature.
#[derive(Debug, Clone, Default)]
pub struct EvalPoint {
    base: BTreeMap<usize, f64>,
    jets: BTreeMap<(usize, MultiIndex), f64>,
}

impl EvalPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_base(&mut self, mu: usize, v: f64) -> &mut Self {
        self.base.insert(mu, v);
        self
    }

    pub fn set_jet(&mut self, fiber: usize, index: MultiIndex, v: f64) -> &mut Self {
        self.jets.insert((fiber, index), v);
        self
    }

    pub fn set_fiber(&mut self, fiber: usize, v: f64) -> &mut Self {
        self.set_jet(fiber, MultiIndex::empty(), v)
    }

    pub fn base(&self, mu: usize) -> Option<f64> {
        self.base.get(&mu).copied()
    }

    pub fn jet(&self, fiber: usize, index: &MultiIndex) -> Option<f64> {
        self.jets.get(&(fiber, index.clone())).copied()
    }
}

impl JetExpr {
    /// Evaluate at a point. Deterministic for a fixed assignment; singular
    /// points (division by zero, log of a non-positive value, sqrt of a
    /// negative value) are reported, as are unassigned coordinates.
    pub fn eval(&self, sig: &Signature, point: &EvalPoint) -> Result<f64, ExprError> {
        let num = eval_poly(&self.num, sig, point)?;
        if self.den.is_one() {
            return Ok(num);
        }
        let den = eval_poly(&self.den, sig, point)?;
        if den.abs() < 1e-300 {
            return Err(ExprError::SingularPoint("division by zero".into()));
        }
        Ok(num / den)
    }
}

fn eval_poly(p: &Poly, sig: &Signature, point: &EvalPoint) -> Result<f64, ExprError> {
    let mut acc = 0.0;
    for (m, c) in p.terms() {
        let mut term = rational_to_f64(c);
        for (a, e) in m.pairs() {
            term *= eval_atom(a, sig, point)?.powi(*e as i32);
        }
        acc += term;
    }
    Ok(acc)
}

fn eval_atom(a: &Atom, sig: &Signature, point: &EvalPoint) -> Result<f64, ExprError> {
    match a {
        Atom::Base(mu) => point
            .base(*mu as usize)
            .ok_or_else(|| ExprError::UnassignedCoordinate(sig.base_name(*mu as usize).into())),
        Atom::Jet { fiber, index } => point.jet(*fiber, index).ok_or_else(|| {
            ExprError::UnassignedCoordinate(format!(
                "{}{}{}",
                sig.fiber_name(*fiber),
                if index.is_empty() { "" } else { "_" },
                sig.index_suffix(index)
            ))
        }),
        Atom::Const(k) => Ok(sig.const_value(*k)),
        Atom::Param => Err(ExprError::UnassignedCoordinate(
            "reserved scaling parameter".into(),
        )),
        Atom::Apply(func, arg) => {
            let x = arg.eval(sig, point)?;
            match func {
                Func::Log if x <= 0.0 => Err(ExprError::SingularPoint(format!(
                    "log of non-positive value {x}"
                ))),
                Func::Sqrt if x < 0.0 => Err(ExprError::SingularPoint(format!(
                    "sqrt of negative value {x}"
                ))),
                _ => Ok(func.eval(x)),
            }
        }
    }
}

pub(crate) fn rational_to_f64(q: &num::BigRational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig2() -> Signature {
        Signature::new(vec!["x".into(), "y".into()], vec!["u".into()], 4).unwrap()
    }

    #[test]
    fn square_of_jet() {
        let sig = Signature::new(vec!["x".into()], vec!["u".into()], 4).unwrap();
        let ux = JetExpr::jet(0, MultiIndex::new(vec![0]));
        let mut p = EvalPoint::new();
        p.set_jet(0, MultiIndex::new(vec![0]), 3.0);
        assert_eq!(ux.mul(&ux).eval(&sig, &p).unwrap(), 9.0);
    }

    #[test]
    fn singular_point_reported() {
        let sig = sig2();
        let x = JetExpr::base(0);
        let y = JetExpr::base(1);
        let e = JetExpr::one().div(&x.mul(&x).add(&y.mul(&y))).unwrap();
        let mut origin = EvalPoint::new();
        origin.set_base(0, 0.0).set_base(1, 0.0);
        assert!(matches!(
            e.eval(&sig, &origin),
            Err(ExprError::SingularPoint(_))
        ));
    }

    #[test]
    fn unassigned_coordinate_reported() {
        let sig = sig2();
        let e = JetExpr::base(1);
        let p = EvalPoint::new();
        assert_eq!(
            e.eval(&sig, &p),
            Err(ExprError::UnassignedCoordinate("y".into()))
        );
    }

    #[test]
    fn opaque_functions_evaluate() {
        let sig = sig2();
        let e = JetExpr::apply(Func::Sin, JetExpr::base(0));
        let mut p = EvalPoint::new();
        p.set_base(0, 0.5).set_base(1, 0.0);
        let v = e.eval(&sig, &p).unwrap();
        assert!((v - 0.5f64.sin()).abs() < 1e-15);
    }
}
