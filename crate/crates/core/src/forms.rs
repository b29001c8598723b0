//! Contact-graded exterior calculus on representatives.
//!
//! Forms are stored in the theta/dx basis: each term is a coefficient times a
//! wedge of contact factors `theta^a_I` and horizontal factors `dx^mu`. The
//! single ordering convention everything follows: contact factors before
//! horizontal factors, contact factors by `(a, I)` lexicographically,
//! horizontal factors by base index. All signs derive from this order.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::BigRational;

use crate::error::{ExprError, FormError};
use crate::expr::{JetExpr, Verdict, ZeroCfg};
use crate::fields::ProlongedField;
use crate::sig::{MultiIndex, Signature};

/// A single wedge factor in the unified factor order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Factor {
    Theta(usize, MultiIndex),
    Dx(u8),
}

/// Canonical basis element: strictly increasing contact and horizontal parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct FormBasis {
    contact: Vec<(usize, MultiIndex)>,
    horizontal: Vec<u8>,
}

impl FormBasis {
    pub fn scalar() -> Self {
        FormBasis::default()
    }

    pub fn contact_degree(&self) -> usize {
        self.contact.len()
    }

    pub fn horizontal_degree(&self) -> usize {
        self.horizontal.len()
    }

    pub fn contact_factors(&self) -> &[(usize, MultiIndex)] {
        &self.contact
    }

    pub fn horizontal_factors(&self) -> &[u8] {
        &self.horizontal
    }

    fn factors(&self) -> Vec<Factor> {
        self.contact
            .iter()
            .map(|(a, i)| Factor::Theta(*a, i.clone()))
            .chain(self.horizontal.iter().map(|&mu| Factor::Dx(mu)))
            .collect()
    }
}

/// Sort an arbitrary factor sequence into the canonical order, counting the
/// permutation sign; `None` on a repeated factor.
fn canonicalize(mut seq: Vec<Factor>) -> Option<(FormBasis, i64)> {
    let mut sign = 1i64;
    // Insertion sort with transposition counting: factors are odd elements.
    for i in 1..seq.len() {
        let mut j = i;
        while j > 0 && seq[j - 1] > seq[j] {
            seq.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in seq.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    let mut basis = FormBasis::default();
    for f in seq {
        match f {
            Factor::Theta(a, i) => basis.contact.push((a, i)),
            Factor::Dx(mu) => basis.horizontal.push(mu),
        }
    }
    Some((basis, sign))
}

/// A contact-graded differential form: a normalized sum of terms. Terms of
/// different bidegree may coexist (graded sums).
#[derive(Debug, Clone, PartialEq)]
pub struct VarForm {
    sig: Arc<Signature>,
    terms: BTreeMap<FormBasis, JetExpr>,
}

impl VarForm {
    pub fn zero(sig: Arc<Signature>) -> Self {
        VarForm {
            sig,
            terms: BTreeMap::new(),
        }
    }

    /// A contact-degree-0, horizontal-degree-0 form (a function).
    pub fn function(sig: Arc<Signature>, f: JetExpr) -> Self {
        let mut form = VarForm::zero(sig);
        form.add_term(f, FormBasis::scalar());
        form
    }

    /// Basis contact form `theta^a_I`.
    pub fn theta(sig: Arc<Signature>, fiber: usize, index: MultiIndex) -> Self {
        let mut form = VarForm::zero(sig);
        form.add_term(
            JetExpr::one(),
            FormBasis {
                contact: vec![(fiber, index)],
                horizontal: vec![],
            },
        );
        form
    }

    /// Basis horizontal form `dx^mu`.
    pub fn dx(sig: Arc<Signature>, mu: usize) -> Self {
        let mut form = VarForm::zero(sig);
        form.add_term(
            JetExpr::one(),
            FormBasis {
                contact: vec![],
                horizontal: vec![mu as u8],
            },
        );
        form
    }

    /// The base volume element `omega = dx^1 ^ ... ^ dx^n`.
    pub fn volume(sig: Arc<Signature>) -> Self {
        let n = sig.base_count();
        let mut form = VarForm::zero(sig);
        form.add_term(
            JetExpr::one(),
            FormBasis {
                contact: vec![],
                horizontal: (0..n as u8).collect(),
            },
        );
        form
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormBasis, &JetExpr)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, coeff: JetExpr, basis: FormBasis) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(basis) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &VarForm) -> VarForm {
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(c.clone(), b.clone());
        }
        out
    }

    pub fn neg(&self) -> VarForm {
        VarForm {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .map(|(b, c)| (b.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &VarForm) -> VarForm {
        self.add(&other.neg())
    }

    /// Multiply every coefficient by a scalar function.
    pub fn scale_fn(&self, f: &JetExpr) -> VarForm {
        let mut out = VarForm::zero(self.sig.clone());
        for (b, c) in &self.terms {
            out.add_term(c.mul(f), b.clone());
        }
        out
    }

    /// Graded-antisymmetric product.
    pub fn wedge(&self, other: &VarForm) -> VarForm {
        let mut out = VarForm::zero(self.sig.clone());
        for (b1, c1) in &self.terms {
            for (b2, c2) in &other.terms {
                let mut seq = b1.factors();
                seq.extend(b2.factors());
                if let Some((basis, sign)) = canonicalize(seq) {
                    out.add_term(c1.mul(c2).scale(&BigRational::from_integer(sign.into())), basis);
                }
            }
        }
        out
    }

    /// The homogeneous contact-degree-k part.
    pub fn contact_part(&self, k: usize) -> VarForm {
        VarForm {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.contact_degree() == k)
                .map(|(b, c)| (b.clone(), c.clone()))
                .collect(),
        }
    }

    /// Horizontalization: the contact-degree-0 part in the theta/dx basis.
    pub fn horizontalize(&self) -> VarForm {
        self.contact_part(0)
    }

    /// Horizontal differential.
    pub fn d_h(&self) -> Result<VarForm, FormError> {
        self.d_split(true)
    }

    /// Vertical (contact-raising) differential.
    pub fn d_v(&self) -> Result<VarForm, FormError> {
        self.d_split(false)
    }

    /// Exterior differential expressed back in the theta/dx basis; equals
    /// `d_h + d_v` term by term.
    pub fn exterior_d(&self) -> Result<VarForm, FormError> {
        Ok(self.d_h()?.add(&self.d_v()?))
    }

    fn d_split(&self, horizontal: bool) -> Result<VarForm, FormError> {
        let sig = &self.sig;
        let n = sig.base_count();
        let mut out = VarForm::zero(sig.clone());
        for (basis, coeff) in &self.terms {
            let seq = basis.factors();
            // Differential of the coefficient.
            if horizontal {
                for mu in 0..n {
                    let dmu = coeff.total_derivative(mu, sig)?;
                    if dmu.is_zero() {
                        continue;
                    }
                    let mut s = vec![Factor::Dx(mu as u8)];
                    s.extend(seq.iter().cloned());
                    if let Some((b, sign)) = canonicalize(s) {
                        out.add_term(dmu.scale(&BigRational::from_integer(sign.into())), b);
                    }
                }
            } else {
                for (a, index) in coeff.jet_atoms() {
                    let d = coeff.partial_jet(a, &index);
                    if d.is_zero() {
                        continue;
                    }
                    let mut s = vec![Factor::Theta(a, index)];
                    s.extend(seq.iter().cloned());
                    if let Some((b, sign)) = canonicalize(s) {
                        out.add_term(d.scale(&BigRational::from_integer(sign.into())), b);
                    }
                }
            }
            // Differential of the basis factors: d_H theta^a_I =
            // -theta^a_{I mu} ^ dx^mu, everything else closed.
            if horizontal {
                for (pos, f) in seq.iter().enumerate() {
                    let Factor::Theta(a, index) = f else { continue };
                    if index.order() + 1 > sig.order_cap() {
                        return Err(FormError::Expr(ExprError::OrderCap {
                            order: index.order() + 1,
                            cap: sig.order_cap(),
                        }));
                    }
                    // (-1)^pos from passing d over the first factors, and the
                    // minus sign of d_H theta.
                    let outer = if pos % 2 == 0 { -1i64 } else { 1 };
                    for mu in 0..n {
                        let mut s = seq.clone();
                        s.splice(
                            pos..=pos,
                            [
                                Factor::Theta(*a, index.raised(mu as u8)),
                                Factor::Dx(mu as u8),
                            ],
                        );
                        if let Some((b, sign)) = canonicalize(s) {
                            out.add_term(
                                coeff.scale(&BigRational::from_integer((outer * sign).into())),
                                b,
                            );
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Graded interior product with a prolonged field.
    pub fn contract(&self, x: &ProlongedField) -> Result<VarForm, FormError> {
        let mut out = VarForm::zero(self.sig.clone());
        for (basis, coeff) in &self.terms {
            let seq = basis.factors();
            for (pos, f) in seq.iter().enumerate() {
                let pairing = match f {
                    Factor::Theta(a, index) => x
                        .vertical(*a, index)
                        .ok_or(FormError::InsufficientProlongation {
                            have: x.order(),
                            need: index.order(),
                        })?
                        .clone(),
                    Factor::Dx(mu) => x.xi(*mu as usize).clone(),
                };
                if pairing.is_zero() {
                    continue;
                }
                let sign = if pos % 2 == 0 { 1i64 } else { -1 };
                let mut s = seq.clone();
                s.remove(pos);
                let (b, extra) = canonicalize(s).expect("subsequence has no duplicates");
                debug_assert_eq!(extra, 1);
                out.add_term(
                    coeff
                        .mul(&pairing)
                        .scale(&BigRational::from_integer(sign.into())),
                    b,
                );
            }
        }
        Ok(out)
    }

    /// Lie derivative along a prolonged field by the Cartan formula
    /// `L_X = d (X . ) + X . d`.
    pub fn lie_derive(&self, x: &ProlongedField) -> Result<VarForm, FormError> {
        let a = self.contract(x)?.exterior_d()?;
        let b = self.exterior_d()?.contract(x)?;
        Ok(a.add(&b))
    }

    /// The interior Euler operator on 1-contact (n+1)-forms:
    /// `I(theta^a_I ^ P ω)` has source components
    /// `eps_a = sum_I (-1)^|I| D_I P_a^I`.
    pub fn interior_euler(&self) -> Result<SourceForm, FormError> {
        let sig = &self.sig;
        let n = sig.base_count();
        let full: Vec<u8> = (0..n as u8).collect();
        let mut components = vec![JetExpr::zero(); sig.fiber_count()];
        for (basis, coeff) in &self.terms {
            if basis.contact_degree() != 1 || basis.horizontal != full {
                return Err(FormError::NotHomogeneous {
                    expected_contact: 1,
                    expected_horizontal: n,
                });
            }
            let (a, index) = &basis.contact[0];
            let mut term = coeff.total_derivative_multi(index, sig)?;
            if index.order() % 2 == 1 {
                term = term.neg();
            }
            components[*a] = components[*a].add(&term);
        }
        Ok(SourceForm {
            sig: sig.clone(),
            components,
        })
    }

    /// Verdict that every coefficient vanishes.
    pub fn zero_verdict_with(&self, cfg: &ZeroCfg) -> Verdict {
        Verdict::combine_all(
            self.terms
                .values()
                .map(|c| c.zero_verdict_with(&self.sig, cfg)),
        )
    }

    pub fn zero_verdict(&self) -> Verdict {
        self.zero_verdict_with(&ZeroCfg::default())
    }

    /// Expand into the raw `du/dx` basis (used by cross-checks):
    /// `theta^a_I = du^a_I - u^a_{I mu} dx^mu`.
    pub fn to_raw(&self) -> RawForm {
        let mut out = RawForm {
            terms: BTreeMap::new(),
        };
        for (basis, coeff) in &self.terms {
            // Expand every contact factor; horizontal factors map directly.
            let mut expansion: Vec<(JetExpr, Vec<RawFactor>)> =
                vec![(coeff.clone(), Vec::new())];
            for (a, index) in &basis.contact {
                let mut next = Vec::new();
                for (c, factors) in &expansion {
                    let mut with_du = factors.clone();
                    with_du.push(RawFactor::Du(*a, index.clone()));
                    next.push((c.clone(), with_du));
                    for mu in 0..self.sig.base_count() {
                        let u = JetExpr::jet(*a, index.raised(mu as u8));
                        let mut with_dx = factors.clone();
                        with_dx.push(RawFactor::Dx(mu as u8));
                        next.push((c.mul(&u).neg(), with_dx));
                    }
                }
                expansion = next;
            }
            for (c, mut factors) in expansion {
                factors.extend(basis.horizontal.iter().map(|&mu| RawFactor::Dx(mu)));
                out.add_term(c, factors);
            }
        }
        out
    }

    /// Build a form from raw-basis terms, rewriting
    /// `du^a_I = theta^a_I + u^a_{I mu} dx^mu`.
    pub fn from_raw(
        sig: Arc<Signature>,
        terms: Vec<(JetExpr, Vec<RawFactor>)>,
    ) -> VarForm {
        let mut out = VarForm::zero(sig.clone());
        for (coeff, factors) in terms {
            let mut expansion: Vec<(JetExpr, Vec<Factor>)> = vec![(coeff, Vec::new())];
            for f in factors {
                let mut next = Vec::new();
                for (c, fs) in &expansion {
                    match &f {
                        RawFactor::Dx(mu) => {
                            let mut v = fs.clone();
                            v.push(Factor::Dx(*mu));
                            next.push((c.clone(), v));
                        }
                        RawFactor::Du(a, index) => {
                            let mut v = fs.clone();
                            v.push(Factor::Theta(*a, index.clone()));
                            next.push((c.clone(), v));
                            for mu in 0..sig.base_count() {
                                let u = JetExpr::jet(*a, index.raised(mu as u8));
                                let mut v = fs.clone();
                                v.push(Factor::Dx(mu as u8));
                                next.push((c.mul(&u), v));
                            }
                        }
                    }
                }
                expansion = next;
            }
            for (c, seq) in expansion {
                if let Some((basis, sign)) = canonicalize(seq) {
                    out.add_term(c.scale(&BigRational::from_integer(sign.into())), basis);
                }
            }
        }
        out
    }
}

/// Raw-basis factor for the `du/dx` presentation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RawFactor {
    Du(usize, MultiIndex),
    Dx(u8),
}

/// A form expanded over the raw `du/dx` basis; only used to cross-check the
/// contact-basis computations.
#[derive(Debug, Clone, PartialEq)]
pub struct RawForm {
    terms: BTreeMap<Vec<RawFactor>, JetExpr>,
}

impl RawForm {
    fn add_term(&mut self, coeff: JetExpr, factors: Vec<RawFactor>) {
        if coeff.is_zero() {
            return;
        }
        let mut seq = factors;
        let mut sign = 1i64;
        for i in 1..seq.len() {
            let mut j = i;
            while j > 0 && seq[j - 1] > seq[j] {
                seq.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if seq.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let coeff = coeff.scale(&BigRational::from_integer(sign.into()));
        use std::collections::btree_map::Entry;
        match self.terms.entry(seq) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A Lagrangian `lambda = L omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian {
    sig: Arc<Signature>,
    density: JetExpr,
}

impl Lagrangian {
    pub fn new(sig: Arc<Signature>, density: JetExpr) -> Self {
        Lagrangian { sig, density }
    }

    pub fn zero(sig: Arc<Signature>) -> Self {
        Lagrangian::new(sig, JetExpr::zero())
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn density(&self) -> &JetExpr {
        &self.density
    }

    pub fn order(&self) -> usize {
        self.density.jet_order()
    }

    pub fn to_form(&self) -> VarForm {
        VarForm::volume(self.sig.clone()).scale_fn(&self.density)
    }

    pub fn add(&self, other: &Lagrangian) -> Lagrangian {
        Lagrangian::new(self.sig.clone(), self.density.add(&other.density))
    }

    pub fn sub(&self, other: &Lagrangian) -> Lagrangian {
        Lagrangian::new(self.sig.clone(), self.density.sub(&other.density))
    }
}

/// A dynamical (source) form `eta = eps_a theta^a ^ omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceForm {
    sig: Arc<Signature>,
    components: Vec<JetExpr>,
}

impl SourceForm {
    pub fn new(sig: Arc<Signature>, components: Vec<JetExpr>) -> Result<Self, FormError> {
        if components.len() != sig.fiber_count() {
            return Err(FormError::ComponentCount {
                got: components.len(),
                want: sig.fiber_count(),
            });
        }
        Ok(SourceForm { sig, components })
    }

    pub fn zero(sig: Arc<Signature>) -> Self {
        let m = sig.fiber_count();
        SourceForm {
            sig,
            components: vec![JetExpr::zero(); m],
        }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn components(&self) -> &[JetExpr] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &JetExpr {
        &self.components[a]
    }

    pub fn order(&self) -> usize {
        self.components.iter().map(|c| c.jet_order()).max().unwrap_or(0)
    }

    pub fn to_form(&self) -> VarForm {
        let mut out = VarForm::zero(self.sig.clone());
        for (a, eps) in self.components.iter().enumerate() {
            let theta = VarForm::theta(self.sig.clone(), a, MultiIndex::empty());
            out = out.add(&theta.wedge(&VarForm::volume(self.sig.clone())).scale_fn(eps));
        }
        out
    }

    pub fn sub(&self, other: &SourceForm) -> SourceForm {
        SourceForm {
            sig: self.sig.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// The n-form density `W^a eps_a` for vertical components `W`.
    pub fn pair_with(&self, vertical: &[JetExpr]) -> JetExpr {
        self.components
            .iter()
            .zip(vertical)
            .fold(JetExpr::zero(), |acc, (eps, w)| acc.add(&w.mul(eps)))
    }

    pub fn zero_verdict_with(&self, cfg: &ZeroCfg) -> Verdict {
        Verdict::combine_all(
            self.components
                .iter()
                .map(|c| c.zero_verdict_with(&self.sig, cfg)),
        )
    }

    pub fn zero_verdict(&self) -> Verdict {
        self.zero_verdict_with(&ZeroCfg::default())
    }
}

/// A current: components `nu^mu` against the basis `(d_mu . omega)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Current {
    sig: Arc<Signature>,
    components: Vec<JetExpr>,
}

impl Current {
    pub fn new(sig: Arc<Signature>, components: Vec<JetExpr>) -> Result<Self, FormError> {
        if components.len() != sig.base_count() {
            return Err(FormError::ComponentCount {
                got: components.len(),
                want: sig.base_count(),
            });
        }
        Ok(Current { sig, components })
    }

    pub fn zero(sig: Arc<Signature>) -> Self {
        let n = sig.base_count();
        Current {
            sig,
            components: vec![JetExpr::zero(); n],
        }
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn components(&self) -> &[JetExpr] {
        &self.components
    }

    pub fn component(&self, mu: usize) -> &JetExpr {
        &self.components[mu]
    }

    pub fn add(&self, other: &Current) -> Current {
        Current {
            sig: self.sig.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Current) -> Current {
        Current {
            sig: self.sig.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    /// `nu = nu^mu (d_mu . omega)` as a horizontal (n-1)-form.
    pub fn to_form(&self) -> VarForm {
        let n = self.sig.base_count();
        let mut out = VarForm::zero(self.sig.clone());
        for (mu, comp) in self.components.iter().enumerate() {
            if comp.is_zero() {
                continue;
            }
            let horizontal: Vec<u8> = (0..n as u8).filter(|&k| k as usize != mu).collect();
            let sign = if mu % 2 == 0 { 1i64 } else { -1 };
            out.add_term(
                comp.scale(&BigRational::from_integer(sign.into())),
                FormBasis {
                    contact: vec![],
                    horizontal,
                },
            );
        }
        out
    }

    /// Read a horizontal (n-1)-form back into components.
    pub fn from_form(form: &VarForm) -> Result<Current, FormError> {
        let sig = form.sig().clone();
        let n = sig.base_count();
        let mut components = vec![JetExpr::zero(); n];
        for (basis, coeff) in form.terms() {
            if basis.contact_degree() != 0 || basis.horizontal_degree() != n - 1 {
                return Err(FormError::NotHomogeneous {
                    expected_contact: 0,
                    expected_horizontal: n - 1,
                });
            }
            let missing = (0..n as u8)
                .find(|mu| !basis.horizontal_factors().contains(mu))
                .expect("one factor missing");
            let sign = if missing % 2 == 0 { 1i64 } else { -1 };
            components[missing as usize] = components[missing as usize]
                .add(&coeff.scale(&BigRational::from_integer(sign.into())));
        }
        Current::new(sig, components)
    }

    /// The divergence density: `d_H nu = (D_mu nu^mu) omega`.
    pub fn divergence(&self) -> Result<JetExpr, ExprError> {
        let mut acc = JetExpr::zero();
        for (mu, comp) in self.components.iter().enumerate() {
            acc = acc.add(&comp.total_derivative(mu, &self.sig)?);
        }
        Ok(acc)
    }

    pub fn zero_verdict_with(&self, cfg: &ZeroCfg) -> Verdict {
        Verdict::combine_all(
            self.components
                .iter()
                .map(|c| c.zero_verdict_with(&self.sig, cfg)),
        )
    }

    pub fn zero_verdict(&self) -> Verdict {
        self.zero_verdict_with(&ZeroCfg::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ProjectableField;

    fn sig1() -> Arc<Signature> {
        Arc::new(Signature::new(vec!["x".into()], vec!["u".into()], 4).unwrap())
    }

    fn mi(entries: &[u8]) -> MultiIndex {
        MultiIndex::new(entries.to_vec())
    }

    #[test]
    fn wedge_antisymmetry() {
        let sig = sig1();
        let dx = VarForm::dx(sig.clone(), 0);
        assert!(dx.wedge(&dx).is_empty());
        let theta = VarForm::theta(sig.clone(), 0, mi(&[]));
        let a = theta.wedge(&dx);
        let b = dx.wedge(&theta).neg();
        assert_eq!(a, b);
    }

    #[test]
    fn wedge_bilinearity() {
        let sig = sig1();
        let u = JetExpr::fiber(0);
        let ux = JetExpr::jet(0, mi(&[0]));
        let theta = VarForm::theta(sig.clone(), 0, mi(&[])).scale_fn(&u);
        let dx = VarForm::dx(sig.clone(), 0).scale_fn(&ux);
        let w = theta.wedge(&dx);
        assert_eq!(w.term_count(), 1);
        let (basis, coeff) = w.terms().next().unwrap();
        assert_eq!(basis.contact_degree(), 1);
        assert_eq!(basis.horizontal_degree(), 1);
        assert_eq!(coeff, &u.mul(&ux));
    }

    #[test]
    fn exterior_d_of_fiber_coordinate() {
        // d(u) = theta^u + u_x dx, and the raw-basis expansion is just du.
        let sig = sig1();
        let f = VarForm::function(sig.clone(), JetExpr::fiber(0));
        let d = f.exterior_d().unwrap();
        let expected = VarForm::theta(sig.clone(), 0, mi(&[])).add(
            &VarForm::dx(sig.clone(), 0).scale_fn(&JetExpr::jet(0, mi(&[0]))),
        );
        assert_eq!(d, expected);
        let raw = d.to_raw();
        let direct = VarForm::from_raw(
            sig.clone(),
            vec![(JetExpr::one(), vec![RawFactor::Du(0, mi(&[]))])],
        );
        assert_eq!(raw, direct.to_raw());
    }

    #[test]
    fn d_squared_vanishes() {
        let sig = sig1();
        let x = JetExpr::base(0);
        let u = JetExpr::fiber(0);
        let ux = JetExpr::jet(0, mi(&[0]));
        for f in [
            x.mul(&u),
            u.mul(&ux).add(&x),
            ux.mul(&ux).mul(&u),
        ] {
            let form = VarForm::function(sig.clone(), f);
            let dd = form.exterior_d().unwrap().exterior_d().unwrap();
            assert!(dd.zero_verdict().is_zero());
        }
        // Top horizontal degree in base is closed: d(x dx) = 0 for n=1...
        // note d_V still acts, so only the horizontal part must die.
        let xdx = VarForm::dx(sig.clone(), 0).scale_fn(&x);
        assert!(xdx.exterior_d().unwrap().is_empty());
    }

    #[test]
    fn dh_dv_split() {
        let sig = sig1();
        // d_H(u^2) = 2 u u_x dx.
        let u = JetExpr::fiber(0);
        let nu = VarForm::function(sig.clone(), u.mul(&u));
        let dh = nu.d_h().unwrap();
        let expected = VarForm::dx(sig.clone(), 0)
            .scale_fn(&u.mul(&JetExpr::jet(0, mi(&[0]))).scale(&BigRational::from_integer(2.into())));
        assert_eq!(dh, expected);
        // d_V(L omega) for L = u_x^2/2 is u_x theta^u_x ^ omega.
        let ux = JetExpr::jet(0, mi(&[0]));
        let lag = Lagrangian::new(sig.clone(), ux.mul(&ux).scale(&BigRational::new(1.into(), 2.into())));
        let dv = lag.to_form().d_v().unwrap();
        let expected = VarForm::theta(sig.clone(), 0, mi(&[0]))
            .wedge(&VarForm::volume(sig.clone()))
            .scale_fn(&ux);
        assert_eq!(dv, expected);
        // d_H d_H = 0 and d_H d_V + d_V d_H = 0 on a sample.
        let f = VarForm::function(sig.clone(), u.mul(&ux).mul(&JetExpr::base(0)));
        assert!(f.d_h().unwrap().d_h().unwrap().zero_verdict().is_zero());
        let mixed = f
            .d_h()
            .unwrap()
            .d_v()
            .unwrap()
            .add(&f.d_v().unwrap().d_h().unwrap());
        assert!(mixed.zero_verdict().is_zero());
    }

    #[test]
    fn horizontalization() {
        let sig = sig1();
        // h(du) = u_x dx.
        let du = VarForm::from_raw(
            sig.clone(),
            vec![(JetExpr::one(), vec![RawFactor::Du(0, mi(&[]))])],
        );
        let h = du.horizontalize();
        let expected = VarForm::dx(sig.clone(), 0).scale_fn(&JetExpr::jet(0, mi(&[0])));
        assert_eq!(h, expected);
        // h(theta ^ dx) = 0.
        let theta_dx = VarForm::theta(sig.clone(), 0, mi(&[])).wedge(&VarForm::dx(sig.clone(), 0));
        assert!(theta_dx.horizontalize().is_empty());
        // h(f dx) = f dx.
        let f_dx = VarForm::dx(sig.clone(), 0).scale_fn(&JetExpr::fiber(0));
        assert_eq!(f_dx.horizontalize(), f_dx);
    }

    #[test]
    fn contact_projections_reassemble() {
        let sig = sig1();
        let du_wedge_dx = VarForm::from_raw(
            sig.clone(),
            vec![(
                JetExpr::one(),
                vec![RawFactor::Du(0, mi(&[])), RawFactor::Dx(0)],
            )],
        );
        // p_1(du ^ dx) = theta ^ dx.
        let p1 = du_wedge_dx.contact_part(1);
        let expected = VarForm::theta(sig.clone(), 0, mi(&[])).wedge(&VarForm::dx(sig.clone(), 0));
        assert_eq!(p1, expected);
        // The projections reassemble the form.
        let mut sum = VarForm::zero(sig.clone());
        for k in 0..=2 {
            sum = sum.add(&du_wedge_dx.contact_part(k));
        }
        assert_eq!(sum, du_wedge_dx);
        // p_2 of a 1-contact form is zero.
        assert!(expected.contact_part(2).is_empty());
    }

    #[test]
    fn contraction() {
        let sig = Arc::new(Signature::new(vec!["t".into()], vec!["u".into()], 4).unwrap());
        // (d_u) . (eps theta^u ^ dt) = eps dt.
        let eps = JetExpr::fiber(0).mul(&JetExpr::base(0));
        let alpha = VarForm::theta(sig.clone(), 0, mi(&[]))
            .wedge(&VarForm::dx(sig.clone(), 0))
            .scale_fn(&eps);
        let du = ProjectableField::new(sig.clone(), vec![JetExpr::zero()], vec![JetExpr::one()])
            .unwrap()
            .prolong(1)
            .unwrap();
        let c = alpha.contract(&du).unwrap();
        assert_eq!(c, VarForm::dx(sig.clone(), 0).scale_fn(&eps));
        // X . (X . alpha) = 0.
        let x = ProjectableField::new(
            sig.clone(),
            vec![JetExpr::one()],
            vec![JetExpr::fiber(0)],
        )
        .unwrap()
        .prolong(2)
        .unwrap();
        let beta = VarForm::theta(sig.clone(), 0, mi(&[0]))
            .wedge(&VarForm::dx(sig.clone(), 0))
            .scale_fn(&JetExpr::jet(0, mi(&[0])));
        let twice = beta.contract(&x).unwrap().contract(&x).unwrap();
        assert!(twice.zero_verdict().is_zero());
        // Free-particle contraction: vertical part of d_t against
        // -u_tt theta^u ^ dt gives u_t u_tt dt.
        let time = ProjectableField::new(sig.clone(), vec![JetExpr::one()], vec![JetExpr::zero()])
            .unwrap();
        let eta = VarForm::theta(sig.clone(), 0, mi(&[]))
            .wedge(&VarForm::dx(sig.clone(), 0))
            .scale_fn(&JetExpr::jet(0, mi(&[0, 0])).neg());
        let vert = time.vertical_part(1).unwrap();
        let c = eta.contract(&vert).unwrap();
        let ut = JetExpr::jet(0, mi(&[0]));
        let utt = JetExpr::jet(0, mi(&[0, 0]));
        assert_eq!(c, VarForm::dx(sig.clone(), 0).scale_fn(&ut.mul(&utt)));
    }

    #[test]
    fn interior_euler_examples() {
        let sig = sig1();
        // I(theta^u_x ^ (u_x omega)) has eps = -u_xx.
        let ux = JetExpr::jet(0, mi(&[0]));
        let alpha = VarForm::theta(sig.clone(), 0, mi(&[0]))
            .wedge(&VarForm::volume(sig.clone()))
            .scale_fn(&ux);
        let eps = alpha.interior_euler().unwrap();
        assert_eq!(eps.component(0), &JetExpr::jet(0, mi(&[0, 0])).neg());
        // Fixed point: I(theta^u ^ (f omega)) = f.
        let f = JetExpr::fiber(0).mul(&JetExpr::base(0));
        let alpha = VarForm::theta(sig.clone(), 0, mi(&[]))
            .wedge(&VarForm::volume(sig.clone()))
            .scale_fn(&f);
        assert_eq!(alpha.interior_euler().unwrap().component(0), &f);
    }

    #[test]
    fn interior_euler_kills_dh_exact() {
        let sig = sig1();
        // alpha = theta^u ^ (g dx)... take the 1-contact 0-horizontal form
        // beta = f theta^u, then I(d_H beta) = 0.
        for f in [
            JetExpr::fiber(0).mul(&JetExpr::jet(0, mi(&[0]))),
            JetExpr::base(0).mul(&JetExpr::fiber(0)),
            JetExpr::jet(0, mi(&[0])).mul(&JetExpr::jet(0, mi(&[0]))),
        ] {
            let beta = VarForm::theta(sig.clone(), 0, mi(&[])).scale_fn(&f);
            let dh = beta.d_h().unwrap();
            let eps = dh.interior_euler().unwrap();
            assert!(eps.zero_verdict().is_zero(), "failed for {}", f.debug_text());
        }
    }

    #[test]
    fn current_divergence_and_forms() {
        let sig2 = Arc::new(
            Signature::new(vec!["x".into(), "y".into()], vec!["u".into()], 4).unwrap(),
        );
        let u = JetExpr::fiber(0);
        let nu = Current::new(sig2.clone(), vec![u.clone(), u.mul(&u)]).unwrap();
        // d_H nu = (D_x u + D_y u^2) omega.
        let div = nu.divergence().unwrap();
        let expected = JetExpr::jet(0, mi(&[0])).add(
            &u.mul(&JetExpr::jet(0, mi(&[1]))).scale(&BigRational::from_integer(2.into())),
        );
        assert_eq!(div, expected);
        // Round trip through the form representation.
        let back = Current::from_form(&nu.to_form()).unwrap();
        assert_eq!(back, nu);
        // And d_H of the form representation matches the divergence density.
        let dh = nu.to_form().d_h().unwrap();
        let expected_form = VarForm::volume(sig2.clone()).scale_fn(&div);
        assert_eq!(dh, expected_form);
    }
}
