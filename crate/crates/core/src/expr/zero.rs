//! Three-valued zero decision.
//!
//! Zero is certified by normalization (plus the Pythagorean elimination of
//! even sine powers). Purely rational expressions that are not syntactically
//! zero are certified nonzero, since distinct coordinates are independent.
//! Expressions mixing opaque functions fall back to evaluation at random
//! points: a clearly nonzero sample certifies NonZero, while vanishing at
//! every sample leaves the verdict undetermined with the trial count.

use num::{BigRational, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::expr::atom::{Atom, Func};
use crate::expr::eval::EvalPoint;
use crate::expr::poly::Poly;
use crate::expr::JetExpr;
use crate::sig::Signature;

/// Outcome of an identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Zero,
    NonZero,
    /// Vanished at every random sample but normalization could not certify.
    Undetermined {
        trials: u32,
    },
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Zero)
    }

    /// Combine componentwise verdicts: any NonZero wins, else any
    /// Undetermined, else Zero.
    pub fn combine(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::NonZero, _) | (_, Verdict::NonZero) => Verdict::NonZero,
            (Verdict::Undetermined { trials }, _) => Verdict::Undetermined { trials },
            (_, v) => v,
        }
    }

    pub fn combine_all(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts
            .into_iter()
            .fold(Verdict::Zero, |acc, v| acc.combine(v))
    }
}

/// Configuration for the sampling fallback.
#[derive(Debug, Clone)]
pub struct ZeroCfg {
    pub trials: u32,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for ZeroCfg {
    fn default() -> Self {
        ZeroCfg {
            trials: 20,
            seed: 0x5eed,
            tolerance: 1e-9,
        }
    }
}

impl JetExpr {
    pub fn zero_verdict(&self, sig: &Signature) -> Verdict {
        self.zero_verdict_with(sig, &ZeroCfg::default())
    }

    pub fn zero_verdict_with(&self, sig: &Signature, cfg: &ZeroCfg) -> Verdict {
        if self.is_zero() {
            return Verdict::Zero;
        }
        // The expression vanishes iff its numerator does.
        let reduced = eliminate_sin_squares(self.num());
        if reduced.is_zero() {
            return Verdict::Zero;
        }
        let atoms = self.collect_atoms();
        if !atoms.iter().any(|a| matches!(a, Atom::Apply(_, _))) {
            return Verdict::NonZero;
        }
        // Sampling fallback.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut completed = 0u32;
        let mut attempts = 0u32;
        while completed < cfg.trials && attempts < cfg.trials * 20 {
            attempts += 1;
            let point = random_point(&atoms, &mut rng);
            match self.eval(sig, &point) {
                Ok(v) if v.abs() > cfg.tolerance => return Verdict::NonZero,
                Ok(_) => completed += 1,
                Err(_) => continue, // singular sample: draw another
            }
        }
        Verdict::Undetermined { trials: completed }
    }
}

fn random_point(atoms: &[Atom], rng: &mut impl Rng) -> EvalPoint {
    let mut point = EvalPoint::new();
    for a in atoms {
        // Random dyadic rationals in [-2, -1/4] or [1/4, 2]: bounded away
        // from zero to dodge the common singular loci.
        let mag = (rng.gen_range(4..=32) as f64) / 16.0;
        let v = if rng.gen_bool(0.5) { mag } else { -mag };
        match a {
            Atom::Base(mu) => {
                point.set_base(*mu as usize, v);
            }
            Atom::Jet { fiber, index } => {
                point.set_jet(*fiber, index.clone(), v);
            }
            _ => {}
        }
    }
    point
}

/// Rewrite `sin(a)^(2k+r)` into `(1 - cos(a)^2)^k sin(a)^r`. The result has
/// every sine atom with exponent at most one; the rewrite strictly decreases
/// the total sine degree, so iterating terminates.
pub(crate) fn eliminate_sin_squares(p: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let target = m
            .pairs()
            .iter()
            .find(|(a, e)| *e >= 2 && matches!(a, Atom::Apply(Func::Sin, _)))
            .cloned();
        match target {
            None => out.add_term(c.clone(), m.clone()),
            Some((sin_atom, e)) => {
                let arg = match &sin_atom {
                    Atom::Apply(Func::Sin, arg) => arg.as_ref().clone(),
                    _ => unreachable!(),
                };
                let (rest, _) = m.without(&sin_atom);
                let cos = Poly::atom(Atom::Apply(Func::Cos, std::sync::Arc::new(arg)));
                let one_minus_cos2 = Poly::one().sub(&cos.mul(&cos));
                let mut term = Poly::term(c.clone(), rest).mul(&one_minus_cos2.pow(e / 2));
                if e % 2 == 1 {
                    term = term.mul(&Poly::atom(sin_atom));
                }
                out = out.add(&eliminate_sin_squares(&term));
            }
        }
    }
    out
}

/// Convenience: verdict that an expression is constant, i.e. every coordinate
/// partial vanishes symbolically.
pub fn constancy_verdict(e: &JetExpr, sig: &Signature) -> Result<Verdict, (String, Verdict)> {
    let mut verdict = Verdict::Zero;
    for atom in e.collect_atoms() {
        let name = match &atom {
            Atom::Base(mu) => sig.base_name(*mu as usize).to_string(),
            Atom::Jet { fiber, index } => format!(
                "{}{}{}",
                sig.fiber_name(*fiber),
                if index.is_empty() { "" } else { "_" },
                sig.index_suffix(index)
            ),
            _ => continue,
        };
        let v = e.partial(&atom).zero_verdict(sig);
        if !v.is_zero() {
            return Err((name, v));
        }
        verdict = verdict.combine(v);
    }
    Ok(verdict)
}

/// One-based in spirit: a rational constant multiple extractor used by tests.
pub fn as_rational_multiple(e: &JetExpr, unit: &JetExpr) -> Option<BigRational> {
    if unit.is_zero() {
        return None;
    }
    let q = e.div(unit).ok()?;
    q.as_rational().or_else(|| {
        if e.is_zero() {
            Some(BigRational::from_integer(0.into()))
        } else if e == unit {
            Some(BigRational::one())
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::MultiIndex;

    fn sig1() -> Signature {
        Signature::new(vec!["x".into()], vec!["u".into()], 4).unwrap()
    }

    #[test]
    fn ring_identity_is_zero() {
        let sig = sig1();
        let ux = JetExpr::jet(0, MultiIndex::new(vec![0]));
        let uxx = JetExpr::jet(0, MultiIndex::new(vec![0, 0]));
        let e = ux.mul(&uxx).sub(&uxx.mul(&ux));
        assert_eq!(e.zero_verdict(&sig), Verdict::Zero);
    }

    #[test]
    fn plain_jet_is_nonzero() {
        let sig = sig1();
        let ux = JetExpr::jet(0, MultiIndex::new(vec![0]));
        assert_eq!(ux.zero_verdict(&sig), Verdict::NonZero);
    }

    #[test]
    fn pythagorean_rule_certifies() {
        let sig = sig1();
        let x = JetExpr::base(0);
        let s = JetExpr::apply(Func::Sin, x.clone());
        let c = JetExpr::apply(Func::Cos, x.clone());
        let e = s.mul(&s).add(&c.mul(&c)).sub(&JetExpr::one());
        assert_eq!(e.zero_verdict(&sig), Verdict::Zero);
    }

    #[test]
    fn opaque_nonzero_detected_by_sampling() {
        let sig = sig1();
        let e = JetExpr::apply(Func::Sin, JetExpr::base(0)).add(&JetExpr::one());
        assert_eq!(e.zero_verdict(&sig), Verdict::NonZero);
    }

    #[test]
    fn undetermined_when_normalization_cannot_certify() {
        let sig = sig1();
        // exp(log(x)) - x is identically x > 0 but opaque to the normalizer.
        let x = JetExpr::base(0);
        let e = JetExpr::apply(Func::Exp, JetExpr::apply(Func::Log, x.clone())).sub(&x);
        match e.zero_verdict(&sig) {
            Verdict::Undetermined { trials } => assert!(trials > 0),
            v => panic!("expected undetermined, got {v:?}"),
        }
    }
}
