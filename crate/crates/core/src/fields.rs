//! Projectable vector fields and their jet prolongations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{CalcError, ExprError};
use crate::expr::{Atom, JetExpr};
use crate::sig::{MultiIndex, Signature};

/// A pair `(Xi, xi)`: fiber components over base-and-fiber coordinates and
/// base components over base coordinates only.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectableField {
    sig: Arc<Signature>,
    xi: Vec<JetExpr>,
    fiber: Vec<JetExpr>,
}

impl ProjectableField {
    pub fn new(
        sig: Arc<Signature>,
        xi: Vec<JetExpr>,
        fiber: Vec<JetExpr>,
    ) -> Result<Self, CalcError> {
        if xi.len() != sig.base_count() {
            return Err(CalcError::NotProjectable(format!(
                "expected {} base components, got {}",
                sig.base_count(),
                xi.len()
            )));
        }
        if fiber.len() != sig.fiber_count() {
            return Err(CalcError::NotProjectable(format!(
                "expected {} fiber components, got {}",
                sig.fiber_count(),
                fiber.len()
            )));
        }
        for (mu, comp) in xi.iter().enumerate() {
            if !comp.jet_atoms().is_empty() {
                return Err(CalcError::NotProjectable(format!(
                    "base component for {} depends on a fiber coordinate",
                    sig.base_name(mu)
                )));
            }
        }
        for (a, comp) in fiber.iter().enumerate() {
            if comp.jet_atoms().iter().any(|(_, index)| !index.is_empty()) {
                return Err(CalcError::NotProjectable(format!(
                    "fiber component for {} depends on a jet coordinate of positive order",
                    sig.fiber_name(a)
                )));
            }
        }
        Ok(ProjectableField { sig, xi, fiber })
    }

    pub fn zero(sig: Arc<Signature>) -> Self {
        let xi = vec![JetExpr::zero(); sig.base_count()];
        let fiber = vec![JetExpr::zero(); sig.fiber_count()];
        ProjectableField { sig, xi, fiber }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn xi(&self, mu: usize) -> &JetExpr {
        &self.xi[mu]
    }

    pub fn fiber_component(&self, a: usize) -> &JetExpr {
        &self.fiber[a]
    }

    pub fn is_zero(&self) -> bool {
        self.xi.iter().all(|e| e.is_zero()) && self.fiber.iter().all(|e| e.is_zero())
    }

    /// Vertical base components `Q^a = Xi^a - u^a_nu xi^nu`.
    pub fn vertical_components(&self) -> Vec<JetExpr> {
        (0..self.sig.fiber_count())
            .map(|a| {
                let mut q = self.fiber[a].clone();
                for mu in 0..self.sig.base_count() {
                    let u_mu = JetExpr::jet(a, MultiIndex::new(vec![mu as u8]));
                    q = q.sub(&u_mu.mul(&self.xi[mu]));
                }
                q
            })
            .collect()
    }

    /// Jet prolongation to order `r` via the closed form
    /// `Xi^a_I = D_I(Xi^a - u^a_nu xi^nu) + u^a_{I nu} xi^nu`.
    pub fn prolong(&self, r: usize) -> Result<ProlongedField, CalcError> {
        if r + 1 > self.sig.order_cap() {
            return Err(CalcError::Expr(ExprError::OrderCap {
                order: r + 1,
                cap: self.sig.order_cap(),
            }));
        }
        let q = self.vertical_components();
        let mut vertical = BTreeMap::new();
        let mut total = BTreeMap::new();
        for a in 0..self.sig.fiber_count() {
            for index in MultiIndex::all_up_to(self.sig.base_count(), r) {
                let v = q[a].total_derivative_multi(&index, &self.sig)?;
                let mut t = v.clone();
                for nu in 0..self.sig.base_count() {
                    let u_inu = JetExpr::jet(a, index.raised(nu as u8));
                    t = t.add(&u_inu.mul(&self.xi[nu]));
                }
                vertical.insert((a, index.clone()), v);
                total.insert((a, index), t);
            }
        }
        Ok(ProlongedField {
            field: self.clone(),
            order: r,
            vertical,
            total,
        })
    }

    /// The vertical part `(Xi^a - u^a_nu xi^nu) d_a`, prolonged to order `r`,
    /// with zero base components.
    pub fn vertical_part(&self, r: usize) -> Result<ProlongedField, CalcError> {
        if r + 1 > self.sig.order_cap() {
            return Err(CalcError::Expr(ExprError::OrderCap {
                order: r + 1,
                cap: self.sig.order_cap(),
            }));
        }
        let q = self.vertical_components();
        let mut vertical = BTreeMap::new();
        for a in 0..self.sig.fiber_count() {
            for index in MultiIndex::all_up_to(self.sig.base_count(), r) {
                let v = q[a].total_derivative_multi(&index, &self.sig)?;
                vertical.insert((a, index), v);
            }
        }
        Ok(ProlongedField {
            field: ProjectableField {
                sig: self.sig.clone(),
                xi: vec![JetExpr::zero(); self.sig.base_count()],
                fiber: q,
            },
            order: r,
            vertical: vertical.clone(),
            total: vertical,
        })
    }

    /// Apply the prolonged field to a scalar, prolonging to the order of `f`.
    pub fn apply_to_scalar(&self, f: &JetExpr) -> Result<JetExpr, CalcError> {
        let order = f.jet_order();
        let pr = self.prolong(order)?;
        pr.apply_to_scalar(f)
    }
}

/// A prolonged field: base components plus total and vertical coefficients
/// for every jet index up to the prolongation order.
#[derive(Debug, Clone)]
pub struct ProlongedField {
    field: ProjectableField,
    order: usize,
    vertical: BTreeMap<(usize, MultiIndex), JetExpr>,
    total: BTreeMap<(usize, MultiIndex), JetExpr>,
}

impl ProlongedField {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn sig(&self) -> &Arc<Signature> {
        self.field.sig()
    }

    pub fn field(&self) -> &ProjectableField {
        &self.field
    }

    pub fn xi(&self, mu: usize) -> &JetExpr {
        self.field.xi(mu)
    }

    /// Total prolongation coefficient `Xi^a_I`.
    pub fn coefficient(&self, a: usize, index: &MultiIndex) -> Option<&JetExpr> {
        self.total.get(&(a, index.clone()))
    }

    /// Vertical coefficient `Xi^a_I - u^a_{I mu} xi^mu = D_I(Q^a)`.
    pub fn vertical(&self, a: usize, index: &MultiIndex) -> Option<&JetExpr> {
        self.vertical.get(&(a, index.clone()))
    }

    /// `xi^mu d_mu f + sum Xi^a_I df/du^a_I` over the jets occurring in `f`.
    pub fn apply_to_scalar(&self, f: &JetExpr) -> Result<JetExpr, CalcError> {
        let mut out = JetExpr::zero();
        for mu in 0..self.field.sig().base_count() {
            if !self.field.xi(mu).is_zero() {
                out = out.add(&self.field.xi(mu).mul(&f.partial(&Atom::Base(mu as u8))));
            }
        }
        for (a, index) in f.jet_atoms() {
            let coeff = self.coefficient(a, &index).ok_or(
                crate::error::FormError::InsufficientProlongation {
                    have: self.order,
                    need: index.order(),
                },
            )?;
            if coeff.is_zero() {
                continue;
            }
            out = out.add(&coeff.mul(&f.partial_jet(a, &index)));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig1() -> Arc<Signature> {
        Arc::new(Signature::new(vec!["x".into()], vec!["u".into()], 4).unwrap())
    }

    fn mi(entries: &[u8]) -> MultiIndex {
        MultiIndex::new(entries.to_vec())
    }

    #[test]
    fn projectability_enforced() {
        let sig = sig1();
        let err = ProjectableField::new(
            sig.clone(),
            vec![JetExpr::fiber(0)],
            vec![JetExpr::zero()],
        );
        assert!(err.is_err());
        let err = ProjectableField::new(
            sig.clone(),
            vec![JetExpr::zero()],
            vec![JetExpr::jet(0, mi(&[0]))],
        );
        assert!(err.is_err());
    }

    #[test]
    fn translation_prolongs_trivially() {
        let sig = sig1();
        let x_field =
            ProjectableField::new(sig.clone(), vec![JetExpr::one()], vec![JetExpr::zero()])
                .unwrap();
        let pr = x_field.prolong(2).unwrap();
        for index in MultiIndex::all_up_to(1, 2) {
            assert!(pr.coefficient(0, &index).unwrap().is_zero());
        }
        assert_eq!(
            x_field.vertical_components()[0],
            JetExpr::jet(0, mi(&[0])).neg()
        );
    }

    #[test]
    fn scaling_field_prolongation() {
        let sig = sig1();
        // X = u d_u: Xi^u_x = u_x, Xi^u_xx = u_xx.
        let field =
            ProjectableField::new(sig.clone(), vec![JetExpr::zero()], vec![JetExpr::fiber(0)])
                .unwrap();
        let pr = field.prolong(2).unwrap();
        assert_eq!(
            pr.coefficient(0, &mi(&[0])).unwrap(),
            &JetExpr::jet(0, mi(&[0]))
        );
        assert_eq!(
            pr.coefficient(0, &mi(&[0, 0])).unwrap(),
            &JetExpr::jet(0, mi(&[0, 0]))
        );
    }

    #[test]
    fn base_dependent_fiber_components() {
        let sig = sig1();
        // X = x d_u: Xi^u_x = 1, Xi^u_xx = 0.
        let field =
            ProjectableField::new(sig.clone(), vec![JetExpr::zero()], vec![JetExpr::base(0)])
                .unwrap();
        let pr = field.prolong(2).unwrap();
        assert_eq!(pr.coefficient(0, &mi(&[0])).unwrap(), &JetExpr::one());
        assert!(pr.coefficient(0, &mi(&[0, 0])).unwrap().is_zero());
    }

    #[test]
    fn recursion_matches_closed_form() {
        // Xi^a_{I mu} = D_mu Xi^a_I - u^a_{I nu} D_mu xi^nu for |I| <= 3.
        let sig = Arc::new(Signature::new(vec!["x".into()], vec!["u".into()], 5).unwrap());
        let x = JetExpr::base(0);
        let u = JetExpr::fiber(0);
        let field =
            ProjectableField::new(sig.clone(), vec![x.mul(&x)], vec![x.mul(&u).mul(&u)]).unwrap();
        let pr = field.prolong(3).unwrap();
        for index in MultiIndex::all_up_to(1, 2) {
            let cur = pr.coefficient(0, &index).unwrap();
            let raised = index.raised(0);
            let lhs = pr.coefficient(0, &raised).unwrap().clone();
            let mut rhs = cur.total_derivative(0, &sig).unwrap();
            let u_inu = JetExpr::jet(0, index.raised(0));
            rhs = rhs.sub(&u_inu.mul(&field.xi(0).total_derivative(0, &sig).unwrap()));
            assert!(lhs.sub(&rhs).is_zero(), "recursion fails at {index:?}");
        }
    }

    #[test]
    fn vertical_part_examples() {
        // Mechanics: X = d_t has vertical component -u_t.
        let sig = Arc::new(Signature::new(vec!["t".into()], vec!["u".into()], 4).unwrap());
        let time =
            ProjectableField::new(sig.clone(), vec![JetExpr::one()], vec![JetExpr::zero()])
                .unwrap();
        let vp = time.vertical_part(1).unwrap();
        assert_eq!(
            vp.vertical(0, &MultiIndex::empty()).unwrap(),
            &JetExpr::jet(0, mi(&[0])).neg()
        );
        // X = d_t + u d_u: vertical component u - u_t.
        let mixed =
            ProjectableField::new(sig.clone(), vec![JetExpr::one()], vec![JetExpr::fiber(0)])
                .unwrap();
        assert_eq!(
            mixed.vertical_components()[0],
            JetExpr::fiber(0).sub(&JetExpr::jet(0, mi(&[0])))
        );
        // Total = vertical + horizontal lift, componentwise.
        let pr = mixed.prolong(2).unwrap();
        for index in MultiIndex::all_up_to(1, 2) {
            let total = pr.coefficient(0, &index).unwrap();
            let vert = pr.vertical(0, &index).unwrap();
            let lift = JetExpr::jet(0, index.raised(0));
            assert!(total.sub(&vert.add(&lift)).is_zero());
        }
    }
}
