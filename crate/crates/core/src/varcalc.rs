//! The variational operators: Euler–Lagrange, Helmholtz residuals, Tonti
//! local Lagrangians, Noether currents, variational Lie derivatives,
//! horizontal-potential recovery, and the second variational derivative.
//!
//! Sign convention: the Euler–Lagrange operator is
//! `eps_a = sum_I (-1)^|I| D_I (dL/du^a_I)`, so `L = u_t^2/2` gives
//! `eps = -u_tt`.

use num::BigRational;

use crate::error::CalcError;
use crate::expr::{Atom, JetExpr, Verdict, ZeroCfg};
use crate::fields::ProjectableField;
use crate::forms::{Current, Lagrangian, SourceForm};
use crate::sig::MultiIndex;

/// `E_n`: the Euler–Lagrange source form of a Lagrangian.
pub fn euler_lagrange(lagrangian: &Lagrangian) -> Result<SourceForm, CalcError> {
    let sig = lagrangian.sig();
    let density = lagrangian.density();
    let order = lagrangian.order();
    let mut components = vec![JetExpr::zero(); sig.fiber_count()];
    for a in 0..sig.fiber_count() {
        for index in MultiIndex::all_up_to(sig.base_count(), order) {
            let p = density.partial_jet(a, &index);
            if p.is_zero() {
                continue;
            }
            let mut term = p.total_derivative_multi(&index, sig)?;
            if index.order() % 2 == 1 {
                term = term.neg();
            }
            components[a] = components[a].add(&term);
        }
    }
    Ok(SourceForm::new(sig.clone(), components).map_err(CalcError::Form)?)
}

/// `E_n` through the forms layer: `interior_euler(p_1(d_V lambda))`. Kept as
/// the independent route for cross-checks.
pub fn euler_lagrange_via_forms(lagrangian: &Lagrangian) -> Result<SourceForm, CalcError> {
    let dv = lagrangian.to_form().d_v()?;
    Ok(dv.contact_part(1).interior_euler()?)
}

/// One Helmholtz residual: indexed by the fiber pair `(a, b)` and the
/// multi-index `J` of the condition.
#[derive(Debug, Clone)]
pub struct HelmholtzResidual {
    pub a: usize,
    pub b: usize,
    pub index: MultiIndex,
    pub expr: JetExpr,
    pub verdict: Verdict,
}

/// Residual family plus the combined verdict.
#[derive(Debug, Clone)]
pub struct HelmholtzReport {
    pub residuals: Vec<HelmholtzResidual>,
    pub verdict: Verdict,
}

impl HelmholtzReport {
    pub fn is_locally_variational(&self) -> bool {
        self.verdict.is_zero()
    }

    pub fn first_failure(&self) -> Option<&HelmholtzResidual> {
        self.residuals.iter().find(|r| !r.verdict.is_zero())
    }
}

/// Helmholtz conditions of local variationality. The linearization of the
/// source form must be formally self-adjoint; equating the coefficients of
/// `D_J` gives, for every pair `(a, b)` and multi-index `J`,
///
/// `H_ab^J = d eps_a / du^b_J
///           - sum_{I >= J} (-1)^|I| C(I,J) D_{I\J} (d eps_b / du^a_I)`
///
/// with `C(I,J)` the multiset embedding count. The correctness contract for
/// this formula is the Tonti round trip, which the test suite enforces.
pub fn helmholtz(eta: &SourceForm) -> Result<HelmholtzReport, CalcError> {
    helmholtz_with(eta, &ZeroCfg::default())
}

pub fn helmholtz_with(eta: &SourceForm, cfg: &ZeroCfg) -> Result<HelmholtzReport, CalcError> {
    let sig = eta.sig();
    let order = eta.order();
    let mut residuals = Vec::new();
    let all_indices = MultiIndex::all_up_to(sig.base_count(), order);
    for a in 0..sig.fiber_count() {
        for b in 0..sig.fiber_count() {
            for j in &all_indices {
                let mut h = eta.component(a).partial_jet(b, j);
                for i in &all_indices {
                    if !i.contains(j) {
                        continue;
                    }
                    let p = eta.component(b).partial_jet(a, i);
                    if p.is_zero() {
                        continue;
                    }
                    let emb = i.embeddings(j);
                    let mut term = p
                        .total_derivative_multi(&i.minus(j), sig)?
                        .scale(&BigRational::from_integer(emb.into()));
                    if i.order() % 2 == 1 {
                        term = term.neg();
                    }
                    h = h.sub(&term);
                }
                if h.is_zero() {
                    continue;
                }
                let verdict = h.zero_verdict_with(sig, cfg);
                residuals.push(HelmholtzResidual {
                    a,
                    b,
                    index: j.clone(),
                    expr: h,
                    verdict,
                });
            }
        }
    }
    let verdict = Verdict::combine_all(residuals.iter().map(|r| r.verdict));
    Ok(HelmholtzReport { residuals, verdict })
}

/// The Tonti Lagrangian `L = u^a \int_0^1 eps_a(x, t u) dt` of a
/// Helmholtz-passing source form, about the fiber origin.
pub fn tonti(eta: &SourceForm) -> Result<Lagrangian, CalcError> {
    let report = helmholtz(eta)?;
    if !report.is_locally_variational() {
        let detail = report
            .first_failure()
            .map(|r| {
                format!(
                    "residual ({}, {}, J=|{}|) = {}",
                    r.a,
                    r.b,
                    r.index.order(),
                    r.expr.debug_text()
                )
            })
            .unwrap_or_else(|| "verdict undetermined".into());
        return Err(CalcError::NotLocallyVariational(detail));
    }
    tonti_unchecked(eta, &[])
}

/// Tonti construction without the Helmholtz gate (negative testing, shifted
/// centers). `center` gives the star-shapedness base point per fiber
/// coordinate; empty means the origin.
pub fn tonti_unchecked(
    eta: &SourceForm,
    center: &[BigRational],
) -> Result<Lagrangian, CalcError> {
    let sig = eta.sig();
    let mut density = JetExpr::zero();
    for a in 0..sig.fiber_count() {
        let scaled = eta.component(a).substitute_scaling_about(center)?;
        let integral = scaled.integrate_param()?;
        let mut factor = JetExpr::fiber(a);
        if let Some(c) = center.get(a) {
            factor = factor.sub(&JetExpr::rational(c.clone()));
        }
        density = density.add(&factor.mul(&integral));
    }
    Ok(Lagrangian::new(sig.clone(), density))
}

/// Symmetrized second-derivative coefficients `S^{mu nu}` of the density:
/// `S^{mu mu} = dL/du_{mu mu}`, `S^{mu nu} = dL/du_{sorted(mu nu)} / 2`.
fn momentum_tensor(density: &JetExpr, a: usize, n: usize) -> Vec<Vec<JetExpr>> {
    let half = BigRational::new(1.into(), 2.into());
    (0..n)
        .map(|mu| {
            (0..n)
                .map(|nu| {
                    let idx = MultiIndex::new(vec![mu as u8, nu as u8]);
                    let c = density.partial_jet(a, &idx);
                    if mu == nu {
                        c
                    } else {
                        c.scale(&half)
                    }
                })
                .collect()
        })
        .collect()
}

/// The canonical Noether current `eps(lambda, X)` for Lagrangians of order
/// at most two:
///
/// `eps^mu = sum_a [ dL/du^a_mu Q^a + S_a^{mu nu} D_nu Q^a
///                   - (D_nu S_a^{nu mu}) Q^a ] + L xi^mu`.
pub fn noether_current(
    lagrangian: &Lagrangian,
    field: &ProjectableField,
) -> Result<Current, CalcError> {
    let sig = lagrangian.sig();
    let order = lagrangian.order();
    if order > 2 {
        return Err(CalcError::UnsupportedOrder(order));
    }
    let n = sig.base_count();
    let density = lagrangian.density();
    let pr = field.vertical_part(1)?;
    let mut components = vec![JetExpr::zero(); n];
    for mu in 0..n {
        let mut flux = density.mul(field.xi(mu));
        for a in 0..sig.fiber_count() {
            let q = pr.vertical(a, &MultiIndex::empty()).unwrap().clone();
            let b_mu = density.partial_jet(a, &MultiIndex::new(vec![mu as u8]));
            flux = flux.add(&b_mu.mul(&q));
            if order >= 2 {
                let s = momentum_tensor(density, a, n);
                for nu in 0..n {
                    if s[mu][nu].is_zero() && s[nu][mu].is_zero() {
                        continue;
                    }
                    let dq = pr.vertical(a, &MultiIndex::new(vec![nu as u8])).unwrap();
                    flux = flux.add(&s[mu][nu].mul(dq));
                    let ds = s[nu][mu].total_derivative(nu, sig)?;
                    flux = flux.sub(&ds.mul(&q));
                }
            }
        }
        components[mu] = flux;
    }
    Ok(Current::new(sig.clone(), components).map_err(CalcError::Form)?)
}

/// The variational Lie derivative of a Lagrangian: the horizontalized Lie
/// derivative of the representative along the prolonged field. Valid for any
/// order within the cap.
pub fn var_lie_density(
    lagrangian: &Lagrangian,
    field: &ProjectableField,
) -> Result<Lagrangian, CalcError> {
    let sig = lagrangian.sig();
    let form = lagrangian.to_form();
    let pr = field.prolong(lagrangian.order())?;
    let lie = form.lie_derive(&pr)?;
    let h = lie.horizontalize();
    // The horizontal part of an n-form is a multiple of the volume element.
    let mut density = JetExpr::zero();
    let n = sig.base_count();
    for (basis, coeff) in h.terms() {
        debug_assert_eq!(basis.horizontal_degree(), n);
        density = density.add(coeff);
    }
    Ok(Lagrangian::new(sig.clone(), density))
}

/// Certificate of the first Noether theorem decomposition
/// `L_Xi lambda = Xi_V . E_n(lambda) + d_H eps(lambda, Xi)`.
#[derive(Debug, Clone)]
pub struct NoetherCertificate {
    /// The contraction density `Xi_V . E_n(lambda)`.
    pub contraction: Lagrangian,
    /// The canonical Noether current.
    pub current: Current,
    /// `L_Xi lambda - contraction - d_H current`; must be zero.
    pub residual: JetExpr,
    pub verdict: Verdict,
}

/// Variational Lie derivative together with the Noether certificate. The
/// certificate needs the canonical current, so the Lagrangian order must be
/// at most two.
pub fn var_lie_lagrangian(
    lagrangian: &Lagrangian,
    field: &ProjectableField,
) -> Result<(Lagrangian, NoetherCertificate), CalcError> {
    let sig = lagrangian.sig();
    let lie = var_lie_density(lagrangian, field)?;
    let eta = euler_lagrange(lagrangian)?;
    let vert = field.vertical_part(0)?;
    let w: Vec<JetExpr> = (0..sig.fiber_count())
        .map(|a| vert.vertical(a, &MultiIndex::empty()).unwrap().clone())
        .collect();
    let contraction = Lagrangian::new(sig.clone(), eta.pair_with(&w));
    let current = noether_current(lagrangian, field)?;
    let residual = lie
        .density()
        .sub(contraction.density())
        .sub(&current.divergence()?);
    let verdict = residual.zero_verdict(sig);
    Ok((
        lie,
        NoetherCertificate {
            contraction,
            current,
            residual,
            verdict,
        },
    ))
}

/// The contraction `Xi_V . eta` as an n-form density.
pub fn contract_source(
    eta: &SourceForm,
    field: &ProjectableField,
) -> Result<Lagrangian, CalcError> {
    let sig = eta.sig();
    let vert = field.vertical_part(0)?;
    let w: Vec<JetExpr> = (0..sig.fiber_count())
        .map(|a| vert.vertical(a, &MultiIndex::empty()).unwrap().clone())
        .collect();
    Ok(Lagrangian::new(sig.clone(), eta.pair_with(&w)))
}

/// Variational Lie derivative of a locally variational source form:
/// `L_Xi eta = E_n(Xi_V . eta)`. The identity is only asserted for
/// Helmholtz-passing forms, so anything else is refused.
pub fn var_lie_source(
    eta: &SourceForm,
    field: &ProjectableField,
) -> Result<SourceForm, CalcError> {
    let report = helmholtz(eta)?;
    if !report.is_locally_variational() {
        let detail = match report.first_failure() {
            Some(r) => format!(
                "Helmholtz residual at (a={}, b={}, |J|={}) is {}",
                r.a,
                r.b,
                r.index.order(),
                r.expr.debug_text()
            ),
            None => "Helmholtz verdict undetermined".into(),
        };
        return Err(CalcError::NotLocallyVariational(detail));
    }
    let contraction = contract_source(eta, field)?;
    euler_lagrange(&contraction)
}

/// Zero-verdict of `L_Xi eta`; requires a Helmholtz-passing source form.
pub fn is_symmetry(eta: &SourceForm, field: &ProjectableField) -> Result<Verdict, CalcError> {
    Ok(var_lie_source(eta, field)?.zero_verdict())
}

/// Variational Lie derivative of a current: horizontalized Cartan formula,
/// read back into components.
pub fn var_lie_current(
    current: &Current,
    field: &ProjectableField,
) -> Result<Current, CalcError> {
    let form = current.to_form();
    let order = current
        .components()
        .iter()
        .map(|c| c.jet_order())
        .max()
        .unwrap_or(0);
    let pr = field.prolong(order)?;
    let lie = form.lie_derive(&pr)?.horizontalize();
    Ok(Current::from_form(&lie)?)
}

/// Constructive horizontal-potential recovery for a single base coordinate:
/// given a variationally trivial density `L`, find `nu` with `D_t nu = L` by
/// peeling the highest derivative.
pub fn dh_potential(mu: &Lagrangian) -> Result<Current, CalcError> {
    let sig = mu.sig();
    if sig.base_count() != 1 {
        return Err(CalcError::NeedCandidate);
    }
    let el = euler_lagrange(mu)?;
    let el_verdict = el.zero_verdict();
    if !el_verdict.is_zero() {
        let witness = el
            .components()
            .iter()
            .find(|c| !c.is_zero())
            .map(|c| c.debug_text())
            .unwrap_or_else(|| "undetermined".into());
        return Err(CalcError::NotTrivial(witness));
    }
    let mut density = mu.density().clone();
    let mut potential = JetExpr::zero();
    loop {
        let order = density.jet_order();
        if density.is_zero() {
            break;
        }
        if order == 0 {
            if !density.jet_atoms().is_empty() {
                return Err(CalcError::NotTrivial(density.debug_text()));
            }
            // Pure base dependence: integrate in the base coordinate.
            let anti = crate::expr::antiderivative_in(&density, &Atom::Base(0))
                .map_err(CalcError::Expr)?;
            potential = potential.add(&anti);
            break;
        }
        // The density must be affine in the top-order jets; the coefficients
        // form a closed family whose potential is found by iterated
        // single-variable antiderivatives.
        let top: Vec<(usize, MultiIndex)> = density
            .jet_atoms()
            .into_iter()
            .filter(|(_, i)| i.order() == order)
            .collect();
        let coeffs: Vec<JetExpr> = top
            .iter()
            .map(|(a, i)| density.partial_jet(*a, i))
            .collect();
        for c in &coeffs {
            if c.jet_atoms().iter().any(|(_, i)| i.order() >= order) {
                return Err(CalcError::NotTrivial(format!(
                    "density is not affine in its top-order jets: {}",
                    density.debug_text()
                )));
            }
        }
        // Antigradient over the order-(k-1) variables.
        let mut chi = JetExpr::zero();
        for ((a, _), coeff) in top.iter().zip(&coeffs) {
            let var = Atom::Jet {
                fiber: *a,
                index: MultiIndex::new(vec![0; order - 1]),
            };
            let residual_coeff = coeff.sub(&chi.partial(&var));
            if residual_coeff.is_zero() {
                continue;
            }
            let anti =
                crate::expr::antiderivative_in(&residual_coeff, &var).map_err(CalcError::Expr)?;
            chi = chi.add(&anti);
        }
        // Contract check: the antigradient must reproduce every coefficient.
        for ((a, i), coeff) in top.iter().zip(&coeffs) {
            let var = Atom::Jet {
                fiber: *a,
                index: MultiIndex::new(vec![0; order - 1]),
            };
            let back = chi.partial(&var);
            if !back.sub(coeff).zero_verdict(sig).is_zero() {
                return Err(CalcError::NotTrivial(format!(
                    "closedness fails for the coefficient of the top jet ({a}, |I|={})",
                    i.order()
                )));
            }
        }
        potential = potential.add(&chi);
        density = density.sub(&chi.total_derivative(0, sig)?);
        if density.jet_order() >= order && !density.is_zero() {
            return Err(CalcError::NotTrivial(format!(
                "peeling failed to reduce the order of {}",
                density.debug_text()
            )));
        }
    }
    Ok(Current::new(sig.clone(), vec![potential]).map_err(CalcError::Form)?)
}

/// Verification mode: does `d_H candidate = mu` hold?
pub fn dh_verify(mu: &Lagrangian, candidate: &Current) -> Result<Verdict, CalcError> {
    let div = candidate.divergence()?;
    Ok(mu.density().sub(&div).zero_verdict(mu.sig()))
}

/// The second variational derivative `L_Xi L_Xi lambda` with its verdict.
pub fn second_variation(
    lagrangian: &Lagrangian,
    field: &ProjectableField,
) -> Result<(Lagrangian, Verdict), CalcError> {
    let first = var_lie_density(lagrangian, field)?;
    let second = var_lie_density(&first, field)?;
    let verdict = second.density().zero_verdict(lagrangian.sig());
    Ok((second, verdict))
}

/// One named step of a verification pipeline.
#[derive(Debug, Clone)]
pub struct CheckStep {
    pub name: String,
    pub verdict: Verdict,
    pub residual: Option<JetExpr>,
}

impl CheckStep {
    fn new(name: &str, verdict: Verdict, residual: Option<JetExpr>) -> Self {
        CheckStep {
            name: name.to_string(),
            verdict,
            residual,
        }
    }
}

/// Report of the conservation-law pipeline built on the second variational
/// derivative: when `Xi` is a symmetry of `E_n(lambda)`,
/// `Xi_V . eta = d_H nu`, `eps` is the canonical current and
/// `L_Xi L_Xi lambda = 0`, then `d_H L_Xi (nu + eps) = 0` and the Lie-derived
/// current glues globally.
#[derive(Debug, Clone)]
pub struct ConservationReport {
    pub steps: Vec<CheckStep>,
    pub conserved: Current,
    pub verdict: Verdict,
}

pub fn conservation_law_prop2(
    lagrangian: &Lagrangian,
    field: &ProjectableField,
    nu: &Current,
    eps: &Current,
) -> Result<ConservationReport, CalcError> {
    let sig = lagrangian.sig();
    let mut steps = Vec::new();

    let eta = euler_lagrange(lagrangian)?;
    let sym = is_symmetry(&eta, field)?;
    steps.push(CheckStep::new("symmetry of E_n(lambda)", sym, None));
    if !sym.is_zero() {
        return Err(CalcError::Precondition {
            name: "symmetry".into(),
            detail: "the field is not a symmetry of the Euler-Lagrange form".into(),
        });
    }

    let mu_nu = contract_source(&eta, field)?;
    let potential_residual = mu_nu.density().sub(&nu.divergence()?);
    let potential = potential_residual.zero_verdict(sig);
    steps.push(CheckStep::new(
        "Xi_V . eta = d_H nu",
        potential,
        Some(potential_residual),
    ));
    if !potential.is_zero() {
        return Err(CalcError::Precondition {
            name: "potential".into(),
            detail: "the supplied current is not a horizontal potential of the contraction".into(),
        });
    }

    let canonical = noether_current(lagrangian, field)?;
    let eps_residual = eps.sub(&canonical);
    let eps_ok = eps_residual.zero_verdict();
    steps.push(CheckStep::new(
        "eps is the canonical Noether current",
        eps_ok,
        None,
    ));
    if !eps_ok.is_zero() {
        return Err(CalcError::Precondition {
            name: "noether current".into(),
            detail: "the supplied current differs from the canonical one".into(),
        });
    }

    let (second, second_verdict) = second_variation(lagrangian, field)?;
    steps.push(CheckStep::new(
        "second variational derivative vanishes",
        second_verdict,
        Some(second.density().clone()),
    ));
    if !second_verdict.is_zero() {
        return Err(CalcError::Precondition {
            name: "second variation".into(),
            detail: format!(
                "L_Xi L_Xi lambda = {} is not zero",
                second.density().debug_text()
            ),
        });
    }

    // Noether identity restated: L_Xi lambda = d_H (nu + eps).
    let lie = var_lie_density(lagrangian, field)?;
    let total = nu.add(eps);
    let identity_residual = lie.density().sub(&total.divergence()?);
    let identity = identity_residual.zero_verdict(sig);
    steps.push(CheckStep::new(
        "L_Xi lambda = d_H (nu + eps)",
        identity,
        Some(identity_residual),
    ));

    // The conserved current and the commutation of L_Xi with d_H.
    let lie_total = var_lie_current(&total, field)?;
    let dh_lie = lie_total.divergence()?;
    let lie_dh = var_lie_density(
        &Lagrangian::new(sig.clone(), total.divergence()?),
        field,
    )?;
    let commute_residual = lie_dh.density().sub(&dh_lie);
    steps.push(CheckStep::new(
        "L_Xi d_H (nu + eps) = d_H L_Xi (nu + eps)",
        commute_residual.zero_verdict(sig),
        Some(commute_residual),
    ));

    let conservation = dh_lie.zero_verdict(sig);
    steps.push(CheckStep::new(
        "d_H L_Xi (nu + eps) = 0",
        conservation,
        Some(dh_lie),
    ));

    let verdict = Verdict::combine_all(steps.iter().map(|s| s.verdict));
    Ok(ConservationReport {
        steps,
        conserved: lie_total,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::Signature;
    use std::sync::Arc;

    fn mech_sig() -> Arc<Signature> {
        Arc::new(Signature::new(vec!["t".into()], vec!["u".into()], 4).unwrap())
    }

    fn mi(entries: &[u8]) -> MultiIndex {
        MultiIndex::new(entries.to_vec())
    }

    fn ut() -> JetExpr {
        JetExpr::jet(0, mi(&[0]))
    }

    fn utt() -> JetExpr {
        JetExpr::jet(0, mi(&[0, 0]))
    }

    fn free_particle(sig: &Arc<Signature>) -> Lagrangian {
        Lagrangian::new(
            sig.clone(),
            ut().mul(&ut()).scale(&BigRational::new(1.into(), 2.into())),
        )
    }

    fn time_translation(sig: &Arc<Signature>) -> ProjectableField {
        ProjectableField::new(sig.clone(), vec![JetExpr::one()], vec![JetExpr::zero()]).unwrap()
    }

    fn space_translation(sig: &Arc<Signature>) -> ProjectableField {
        ProjectableField::new(sig.clone(), vec![JetExpr::zero()], vec![JetExpr::one()]).unwrap()
    }

    #[test]
    fn euler_lagrange_free_particle() {
        let sig = mech_sig();
        let lambda = free_particle(&sig);
        let eta = euler_lagrange(&lambda).unwrap();
        assert_eq!(eta.component(0), &utt().neg());
        // Dual route through the forms layer.
        let eta2 = euler_lagrange_via_forms(&lambda).unwrap();
        assert_eq!(eta2.component(0), &utt().neg());
        // E(0) = 0.
        assert!(euler_lagrange(&Lagrangian::zero(sig.clone()))
            .unwrap()
            .zero_verdict()
            .is_zero());
    }

    #[test]
    fn horizontal_exact_densities_are_trivial() {
        // L = 2 u u_x = D_x(u^2) has zero Euler-Lagrange form.
        let sig = Arc::new(Signature::new(vec!["x".into()], vec!["u".into()], 4).unwrap());
        let u = JetExpr::fiber(0);
        let l = u.mul(&ut()).scale(&BigRational::from_integer(2.into()));
        let eta = euler_lagrange(&Lagrangian::new(sig.clone(), l)).unwrap();
        assert!(eta.zero_verdict().is_zero());
    }

    #[test]
    fn helmholtz_classifies() {
        let sig = mech_sig();
        // eta = u_tt passes.
        let pass = SourceForm::new(sig.clone(), vec![utt()]).unwrap();
        assert!(helmholtz(&pass).unwrap().is_locally_variational());
        // eta = u_t fails at |J| = 1.
        let fail = SourceForm::new(sig.clone(), vec![ut()]).unwrap();
        let report = helmholtz(&fail).unwrap();
        assert!(!report.is_locally_variational());
        let witness = report.first_failure().unwrap();
        assert_eq!(witness.index.order(), 1);
        // eta = 0 passes.
        let zero = SourceForm::zero(sig.clone());
        assert!(helmholtz(&zero).unwrap().is_locally_variational());
        // eta = u u_tt is not locally variational.
        let uutt = SourceForm::new(sig.clone(), vec![JetExpr::fiber(0).mul(&utt())]).unwrap();
        assert!(!helmholtz(&uutt).unwrap().is_locally_variational());
    }

    #[test]
    fn tonti_round_trips() {
        let sig = mech_sig();
        // eta = u_tt: L = u u_tt / 2, E(L) = u_tt.
        let eta = SourceForm::new(sig.clone(), vec![utt()]).unwrap();
        let lambda = tonti(&eta).unwrap();
        let expected = JetExpr::fiber(0)
            .mul(&utt())
            .scale(&BigRational::new(1.into(), 2.into()));
        assert_eq!(lambda.density(), &expected);
        let back = euler_lagrange(&lambda).unwrap();
        assert!(back.sub(&eta).zero_verdict().is_zero());
        // eta = u: L = u^2/2.
        let eta = SourceForm::new(sig.clone(), vec![JetExpr::fiber(0)]).unwrap();
        let lambda = tonti(&eta).unwrap();
        assert_eq!(
            lambda.density(),
            &JetExpr::fiber(0)
                .mul(&JetExpr::fiber(0))
                .scale(&BigRational::new(1.into(), 2.into()))
        );
        // eta = 0 -> 0.
        assert!(tonti(&SourceForm::zero(sig.clone())).unwrap().density().is_zero());
        // Gate: eta = u_t is refused.
        let bad = SourceForm::new(sig.clone(), vec![ut()]).unwrap();
        assert!(matches!(
            tonti(&bad),
            Err(CalcError::NotLocallyVariational(_))
        ));
    }

    #[test]
    fn noether_currents_of_free_particle() {
        let sig = mech_sig();
        let lambda = free_particle(&sig);
        // Energy for time translation, with the module's sign convention.
        let energy = noether_current(&lambda, &time_translation(&sig)).unwrap();
        let expected = ut()
            .mul(&ut())
            .scale(&BigRational::new((-1).into(), 2.into()));
        assert_eq!(energy.component(0), &expected);
        // Momentum for space translation.
        let momentum = noether_current(&lambda, &space_translation(&sig)).unwrap();
        assert_eq!(momentum.component(0), &ut());
        // Zero Lagrangian gives the zero current.
        let zero = noether_current(&Lagrangian::zero(sig.clone()), &time_translation(&sig))
            .unwrap();
        assert!(zero.zero_verdict().is_zero());
        // Order > 2 is rejected.
        let high = Lagrangian::new(sig.clone(), JetExpr::jet(0, mi(&[0, 0, 0])).pow(2).unwrap());
        assert!(matches!(
            noether_current(&high, &time_translation(&sig)),
            Err(CalcError::UnsupportedOrder(3))
        ));
    }

    #[test]
    fn noether_identity_certificates() {
        let sig = mech_sig();
        let lambda = free_particle(&sig);
        for field in [
            time_translation(&sig),
            space_translation(&sig),
            ProjectableField::new(sig.clone(), vec![JetExpr::zero()], vec![JetExpr::base(0)])
                .unwrap(),
        ] {
            let (lie, cert) = var_lie_lagrangian(&lambda, &field).unwrap();
            assert!(cert.verdict.is_zero(), "residual {}", cert.residual.debug_text());
            let _ = lie;
        }
        // Time translation: L_Xi lambda = 0 with certificate
        // u_t u_tt + D_t(-u_t^2/2) = 0.
        let (lie, cert) = var_lie_lagrangian(&lambda, &time_translation(&sig)).unwrap();
        assert!(lie.density().is_zero());
        assert_eq!(cert.contraction.density(), &ut().mul(&utt()));
        // Zero field: everything zero.
        let (lie, cert) =
            var_lie_lagrangian(&lambda, &ProjectableField::zero(sig.clone())).unwrap();
        assert!(lie.density().is_zero());
        assert!(cert.verdict.is_zero());
    }

    #[test]
    fn var_lie_density_matches_coordinate_formula() {
        // L_Xi lambda = sum_I Xi_V^a_I dL/du^a_I + D_mu(L xi^mu) for a mixed
        // field on a second-order Lagrangian.
        let sig = mech_sig();
        let u = JetExpr::fiber(0);
        let lambda = Lagrangian::new(
            sig.clone(),
            ut().mul(&ut()).add(&u.mul(&utt())).add(&JetExpr::base(0)),
        );
        let field = ProjectableField::new(
            sig.clone(),
            vec![JetExpr::base(0)],
            vec![u.mul(&u)],
        )
        .unwrap();
        let lie = var_lie_density(&lambda, &field).unwrap();
        // Coordinate route.
        let pr = field.vertical_part(lambda.order()).unwrap();
        let mut expected = JetExpr::zero();
        for index in MultiIndex::all_up_to(1, lambda.order()) {
            let p = lambda.density().partial_jet(0, &index);
            expected = expected.add(&pr.vertical(0, &index).unwrap().mul(&p));
        }
        expected = expected.add(
            &lambda
                .density()
                .mul(field.xi(0))
                .total_derivative(0, &sig)
                .unwrap(),
        );
        assert!(lie.density().sub(&expected).zero_verdict(&sig).is_zero());
    }

    #[test]
    fn var_lie_source_examples() {
        let sig = mech_sig();
        // Time translation is a symmetry of the free particle.
        let eta = SourceForm::new(sig.clone(), vec![utt().neg()]).unwrap();
        let lie = var_lie_source(&eta, &time_translation(&sig)).unwrap();
        assert!(lie.zero_verdict().is_zero());
        assert!(is_symmetry(&eta, &time_translation(&sig)).unwrap().is_zero());
        // Space translation too.
        assert!(is_symmetry(&eta, &space_translation(&sig)).unwrap().is_zero());
        // Dual path: E_n(L_Xi lambda) = L_Xi E_n(lambda) on a scaling field.
        let lambda = free_particle(&sig);
        let scaling =
            ProjectableField::new(sig.clone(), vec![JetExpr::zero()], vec![JetExpr::fiber(0)])
                .unwrap();
        let lhs = euler_lagrange(&var_lie_density(&lambda, &scaling).unwrap()).unwrap();
        let rhs = var_lie_source(&eta, &scaling).unwrap();
        assert!(lhs.sub(&rhs).zero_verdict().is_zero());
        // eta = -u_tt - u with X = u d_u is not a symmetry.
        let bad_eta =
            SourceForm::new(sig.clone(), vec![utt().neg().sub(&JetExpr::fiber(0))]).unwrap();
        assert!(!is_symmetry(&bad_eta, &scaling).unwrap().is_zero());
        // The gate refuses non-variational forms.
        let nonvar = SourceForm::new(sig.clone(), vec![ut()]).unwrap();
        assert!(matches!(
            var_lie_source(&nonvar, &scaling),
            Err(CalcError::NotLocallyVariational(_))
        ));
    }

    #[test]
    fn dh_potential_examples() {
        let sig = mech_sig();
        let u = JetExpr::fiber(0);
        // mu = 2 u u_t -> nu = u^2.
        let mu = Lagrangian::new(
            sig.clone(),
            u.mul(&ut()).scale(&BigRational::from_integer(2.into())),
        );
        let nu = dh_potential(&mu).unwrap();
        assert_eq!(nu.component(0), &u.mul(&u));
        // mu = 0 -> 0.
        assert!(dh_potential(&Lagrangian::zero(sig.clone()))
            .unwrap()
            .zero_verdict()
            .is_zero());
        // mu = u_t f(u) -> F(u): take f = sin.
        let mu = Lagrangian::new(sig.clone(), ut().mul(&JetExpr::apply(crate::expr::Func::Sin, u.clone())));
        let nu = dh_potential(&mu).unwrap();
        assert_eq!(
            nu.component(0),
            &JetExpr::apply(crate::expr::Func::Cos, u.clone()).neg()
        );
        // Verification mode.
        assert!(dh_verify(&mu, &nu).unwrap().is_zero());
        // Non-trivial input is refused with the residual named.
        let bad = free_particle(&sig);
        assert!(matches!(dh_potential(&bad), Err(CalcError::NotTrivial(_))));
        // Second-order peel: mu = u_t u_tt + u u_t (oscillator contraction).
        let mu = Lagrangian::new(sig.clone(), ut().mul(&utt()).add(&u.mul(&ut())));
        let nu = dh_potential(&mu).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let expected = ut().mul(&ut()).scale(&half).add(&u.mul(&u).scale(&half));
        assert_eq!(nu.component(0), &expected);
    }

    #[test]
    fn second_variation_cases() {
        let sig = mech_sig();
        let lambda = free_particle(&sig);
        // Symmetries of the Lagrangian: already the first derivative dies.
        for field in [time_translation(&sig), space_translation(&sig)] {
            let (second, verdict) = second_variation(&lambda, &field).unwrap();
            assert!(verdict.is_zero());
            assert!(second.density().is_zero());
        }
        // Boost X = t d_u: L_Xi lambda = u_t dt, and the second application
        // yields the constant density 1 (not zero). Both routes agree.
        let boost =
            ProjectableField::new(sig.clone(), vec![JetExpr::zero()], vec![JetExpr::base(0)])
                .unwrap();
        let first = var_lie_density(&lambda, &boost).unwrap();
        assert_eq!(first.density(), &ut());
        let (second, verdict) = second_variation(&lambda, &boost).unwrap();
        assert_eq!(second.density(), &JetExpr::one());
        assert!(!verdict.is_zero());
    }

    #[test]
    fn conservation_law_free_particle() {
        let sig = mech_sig();
        let lambda = free_particle(&sig);
        // X = d_u: Xi_V . eta = -u_tt = D_t(-u_t), eps = u_t; nu + eps = 0.
        let field = space_translation(&sig);
        let nu = Current::new(sig.clone(), vec![ut().neg()]).unwrap();
        let eps = Current::new(sig.clone(), vec![ut()]).unwrap();
        let report = conservation_law_prop2(&lambda, &field, &nu, &eps).unwrap();
        assert!(report.verdict.is_zero());
        assert!(report.conserved.zero_verdict().is_zero());
        // X = d_t: nu = u_t^2/2, eps = -u_t^2/2; again the glued current is 0.
        let field = time_translation(&sig);
        let half = BigRational::new(1.into(), 2.into());
        let nu = Current::new(sig.clone(), vec![ut().mul(&ut()).scale(&half)]).unwrap();
        let eps = Current::new(sig.clone(), vec![ut().mul(&ut()).scale(&half).neg()]).unwrap();
        let report = conservation_law_prop2(&lambda, &field, &nu, &eps).unwrap();
        assert!(report.verdict.is_zero());
        assert!(report.conserved.zero_verdict().is_zero());
    }

    #[test]
    fn conservation_law_oscillator() {
        // lambda = u_t^2/2 - u^2/2, X = d_t: nu from dh_potential, verdict
        // zero required.
        let sig = mech_sig();
        let u = JetExpr::fiber(0);
        let half = BigRational::new(1.into(), 2.into());
        let lambda = Lagrangian::new(
            sig.clone(),
            ut().mul(&ut()).scale(&half).sub(&u.mul(&u).scale(&half)),
        );
        let field = time_translation(&sig);
        let eta = euler_lagrange(&lambda).unwrap();
        let mu_nu = contract_source(&eta, &field).unwrap();
        let nu = dh_potential(&mu_nu).unwrap();
        let expected = ut().mul(&ut()).scale(&half).add(&u.mul(&u).scale(&half));
        assert_eq!(nu.component(0), &expected);
        let eps = noether_current(&lambda, &field).unwrap();
        let report = conservation_law_prop2(&lambda, &field, &nu, &eps).unwrap();
        assert!(report.verdict.is_zero());
    }

    #[test]
    fn prop2_precondition_failures_are_named() {
        let sig = mech_sig();
        let lambda = free_particle(&sig);
        // The boost fails the second-variation hypothesis.
        let boost =
            ProjectableField::new(sig.clone(), vec![JetExpr::zero()], vec![JetExpr::base(0)])
                .unwrap();
        let u = JetExpr::fiber(0);
        let nu = Current::new(sig.clone(), vec![u.sub(&JetExpr::base(0).mul(&ut()))]).unwrap();
        let eps = Current::new(sig.clone(), vec![JetExpr::base(0).mul(&ut())]).unwrap();
        match conservation_law_prop2(&lambda, &boost, &nu, &eps) {
            Err(CalcError::Precondition { name, .. }) => {
                assert_eq!(name, "second variation");
            }
            other => panic!("expected a named precondition failure, got {other:?}"),
        }
    }
}
