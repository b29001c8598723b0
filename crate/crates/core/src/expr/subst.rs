//! Substitutions: the Tonti scaling and parameter replacement.

use num::BigRational;

use crate::error::ExprError;
use crate::expr::atom::Atom;
use crate::expr::JetExpr;

impl JetExpr {
    /// Replace every jet coordinate `u^a_I` by `t * u^a_I`, where `t` is the
    /// reserved scaling parameter. Base coordinates and constants are fixed.
    pub fn substitute_scaling(&self) -> Result<JetExpr, ExprError> {
        self.substitute_scaling_about(&[])
    }

    /// Scaling with a shifted center: order-zero fiber coordinates move along
    /// `u^a -> c^a + t (u^a - c^a)` while all higher jets scale as `t u^a_I`.
    /// An empty center means the origin.
    pub fn substitute_scaling_about(&self, center: &[BigRational]) -> Result<JetExpr, ExprError> {
        if self.contains_param() {
            return Err(ExprError::ReservedParameter);
        }
        let t = JetExpr::param();
        Ok(self.map_atoms(&|atom| match atom {
            Atom::Jet { fiber, index } => {
                let jet = JetExpr::jet(*fiber, index.clone());
                if index.is_empty() {
                    let c = center
                        .get(*fiber)
                        .cloned()
                        .unwrap_or_else(|| BigRational::from_integer(0.into()));
                    if c == BigRational::from_integer(0.into()) {
                        Some(t.mul(&jet))
                    } else {
                        // c + t (u - c)
                        let c = JetExpr::rational(c);
                        Some(c.add(&t.mul(&jet.sub(&c))))
                    }
                } else {
                    Some(t.mul(&jet))
                }
            }
            _ => None,
        }))
    }

    /// Replace the scaling parameter by a fixed expression.
    pub fn substitute_param(&self, value: &JetExpr) -> JetExpr {
        self.map_atoms(&|atom| match atom {
            Atom::Param => Some(value.clone()),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::MultiIndex;

    fn u() -> JetExpr {
        JetExpr::fiber(0)
    }

    fn uxx() -> JetExpr {
        JetExpr::jet(0, MultiIndex::new(vec![0, 0]))
    }

    #[test]
    fn scaling_definition() {
        // u_xx -> t u_xx
        let e = uxx().substitute_scaling().unwrap();
        assert_eq!(e, JetExpr::param().mul(&uxx()));
        // u u_x -> t^2 u u_x
        let ux = JetExpr::jet(0, MultiIndex::new(vec![0]));
        let e = u().mul(&ux).substitute_scaling().unwrap();
        let t2 = JetExpr::param().mul(&JetExpr::param());
        assert_eq!(e, t2.mul(&u().mul(&ux)));
        // x^2 fixed
        let x2 = JetExpr::base(0).mul(&JetExpr::base(0));
        assert_eq!(x2.substitute_scaling().unwrap(), x2);
    }

    #[test]
    fn scaling_at_one_is_identity_at_zero_kills() {
        let e = u().mul(&uxx()).add(&JetExpr::base(0));
        let scaled = e.substitute_scaling().unwrap();
        assert_eq!(scaled.substitute_param(&JetExpr::one()), e);
        assert_eq!(
            scaled.substitute_param(&JetExpr::zero()),
            JetExpr::base(0)
        );
    }

    #[test]
    fn scaling_rejects_reserved_parameter() {
        let e = JetExpr::param();
        assert_eq!(e.substitute_scaling(), Err(ExprError::ReservedParameter));
    }

    #[test]
    fn shifted_center() {
        // u -> 1 + t(u - 1) at center 1.
        let c = vec![BigRational::from_integer(1.into())];
        let e = u().substitute_scaling_about(&c).unwrap();
        let t = JetExpr::param();
        let expected = JetExpr::one().add(&t.mul(&u().sub(&JetExpr::one())));
        assert_eq!(e, expected);
        // Scaling inside opaque arguments too.
        let s = JetExpr::apply(crate::expr::Func::Sin, u());
        let ss = s.substitute_scaling().unwrap();
        assert_eq!(
            ss,
            JetExpr::apply(crate::expr::Func::Sin, JetExpr::param().mul(&u()))
        );
    }
}
