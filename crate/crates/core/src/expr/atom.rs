//! Multiplicative indeterminates of the expression kernel.
//!
//! An atom is a base coordinate, a jet coordinate, a declared named constant,
//! the reserved scaling parameter, or an opaque unary function applied to a
//! normalized expression. Atoms are totally ordered; the order fixes the
//! monomial order of the polynomial layer.

use std::sync::Arc;

use crate::expr::JetExpr;
use crate::sig::MultiIndex;

/// The fixed table of opaque unary functions, closed under differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Arctan,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Arctan => "arctan",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "arctan" => Func::Arctan,
            "sqrt" => Func::Sqrt,
            _ => None?,
        })
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Arctan => x.atan(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

/// A single multiplicative indeterminate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// Base coordinate `x^mu`.
    Base(u8),
    /// Jet coordinate `u^a_I`; `index` empty means the fiber coordinate itself.
    Jet { fiber: usize, index: MultiIndex },
    /// Declared named constant (opaque to all derivatives).
    Const(usize),
    /// The reserved scaling parameter of the fiber homotopy.
    Param,
    /// Opaque function application; the argument is a normalized expression.
    Apply(Func, Arc<JetExpr>),
}

impl Atom {
    pub fn jet(fiber: usize, index: MultiIndex) -> Atom {
        Atom::Jet { fiber, index }
    }

    /// Highest jet order appearing in this atom (recursing into arguments).
    pub fn jet_order(&self) -> usize {
        match self {
            Atom::Jet { index, .. } => index.order(),
            Atom::Apply(_, arg) => arg.jet_order(),
            _ => 0,
        }
    }

    pub fn is_coordinate(&self) -> bool {
        matches!(self, Atom::Base(_) | Atom::Jet { .. })
    }
}
