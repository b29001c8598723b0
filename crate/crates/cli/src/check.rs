//! The `check` pipeline: validation, symmetry, trivialization, obstruction
//! classes, current obstructions and the second-variation conservation law,
//! as applicable to what the bundle declares.
//!
//! Reserved cochain names the pipeline picks up when present: `beta`
//! (boundary currents with `d_H beta_i = L_Xi lambda_i`), `nu_prop2`
//! (potentials of the contraction for the conservation law), and
//! `angle_branches` together with the Lagrangian `mu_angle` (a variationally
//! trivial pair for the divergence-equation check).

use anyhow::Result;
use serde_json::json;

use crate::bundle::{simplex_label, Bundle, LoadedPresentation};
use crate::oracles;
use crate::report::{verdict_word, Report};
use varseq::cech::{
    self, current_obstruction, fundamental_cycle, obstruction_class, trivialization_check,
    validate_presentation_with, NuSupply, TrivialPair,
};
use varseq::expr::EvalPoint;
use varseq::varcalc;
use varseq::{Verdict, ZeroCfg};

pub fn run_check(
    bundle: &Bundle,
    presentation: Option<&str>,
    field: Option<&str>,
    cfg: &ZeroCfg,
    tolerance: Option<f64>,
) -> Result<Report> {
    let mut report = Report::new();
    let presentations: Vec<(&String, &LoadedPresentation)> = match presentation {
        Some(name) => vec![(
            bundle
                .presentations
                .get_key_value(name)
                .map(|(k, _)| k)
                .ok_or_else(|| anyhow::anyhow!("no presentation named `{name}`"))?,
            bundle.presentation(name)?,
        )],
        None => bundle.presentations.iter().collect(),
    };
    for (name, loaded) in presentations {
        check_presentation(bundle, name, loaded, field, cfg, tolerance, &mut report)?;
    }
    Ok(report)
}

fn check_presentation(
    bundle: &Bundle,
    name: &str,
    loaded: &LoadedPresentation,
    field: Option<&str>,
    cfg: &ZeroCfg,
    tolerance: Option<f64>,
    report: &mut Report,
) -> Result<()> {
    let p = &loaded.presentation;
    let cover = p.cover();
    let sig = cover.sig();
    let validation = validate_presentation_with(p, cfg);
    for (s, v) in &validation.defining {
        if !v.is_zero() {
            report.check_detail(
                &format!("{name}: E_n(lambda_i - lambda_j) on ({})", simplex_label(s)),
                *v,
                "the defining property of a local variational problem fails here",
            );
        }
    }
    report.check(&format!("{name}: valid presentation"), validation.valid);
    report.note(
        format!(
            "{name}: globally defined Lagrangian: {}",
            match validation.global {
                Verdict::Zero => "yes",
                _ => "no",
            }
        ),
        json!({ "name": format!("{name}: global"), "global": validation.global.is_zero() }),
    );
    if !validation.valid.is_zero() {
        return Ok(());
    }

    // Lagrangian obstruction class, when the nerve carries degree-two data.
    let reducer = bundle.reducer(&loaded.cover_name);
    let has_triangles = !cover.simplices_of_degree(2).is_empty();
    let mut class_constants: Option<Vec<(Vec<usize>, varseq::JetExpr)>> = None;
    if has_triangles {
        let supply = match &loaded.nu {
            Some(nu) => Some(NuSupply::Supplied(nu)),
            None if sig.base_count() == 1 => Some(NuSupply::Construct),
            None => None,
        };
        if let Some(supply) = supply {
            match obstruction_class(p, supply, &reducer) {
                Ok(ob) => {
                    let coords: Vec<String> = ob
                        .class
                        .coordinates
                        .iter()
                        .map(|c| c.text(sig))
                        .collect();
                    report.note(
                        format!(
                            "{name}: obstruction class in H^2 (dim {}): [{}] — {}",
                            ob.class.dim,
                            coords.join(", "),
                            if ob.class.trivial {
                                "trivial"
                            } else {
                                "nontrivial"
                            }
                        ),
                        json!({
                            "name": format!("{name}: obstruction class"),
                            "dim": ob.class.dim,
                            "coordinates": coords,
                            "trivial": ob.class.trivial,
                        }),
                    );
                    class_constants = Some(
                        ob.constants
                            .entries()
                            .map(|(s, e)| (s.clone(), e.clone()))
                            .collect(),
                    );
                }
                Err(err) => {
                    report.check_detail(
                        &format!("{name}: obstruction class"),
                        Verdict::NonZero,
                        &format!("{err}"),
                    );
                }
            }
        }
    }

    // Flux oracle: pair the nerve constants with the fundamental 2-cycle and
    // compare against the declared curvature integral.
    if let (Some(constants), Some(two_form), Some(tri)) = (
        &class_constants,
        &bundle.fixtures.closed_2form,
        &bundle.fixtures.triangulation,
    ) {
        let tol = tolerance.unwrap_or(1e-4);
        let flux = oracles::sphere_flux(sig, two_form, tri.subdivisions)?;
        if let Some(weights) = fundamental_cycle(cover, 2) {
            let simplices = cover.simplices_of_degree(2);
            let mut pairing = 0.0;
            for (s, w) in simplices.iter().zip(&weights) {
                let e = constants
                    .iter()
                    .find(|(t, _)| t == s)
                    .map(|(_, e)| e.clone())
                    .expect("constants are total");
                let v = e.eval(sig, &EvalPoint::new())?;
                pairing += v * crate::check::rational_to_f64(w);
            }
            let rel = (pairing.abs() - flux.abs()).abs() / flux.abs().max(1e-12);
            let verdict = if rel <= tol {
                Verdict::Zero
            } else {
                Verdict::NonZero
            };
            report.check_detail(
                &format!("{name}: flux oracle"),
                verdict,
                &format!(
                    "cycle pairing {pairing:.8} vs numeric surface integral {flux:.8} (rel {rel:.2e})"
                ),
            );
        }
    }

    // Field-dependent checks.
    let fields: Vec<(&String, &varseq::fields::ProjectableField)> = match field {
        Some(fname) => vec![(
            bundle
                .fields
                .get_key_value(fname)
                .map(|(k, _)| k)
                .ok_or_else(|| anyhow::anyhow!("no field named `{fname}`"))?,
            bundle.field(fname)?,
        )],
        None => bundle.fields.iter().collect(),
    };

    for (fname, x) in fields {
        let sym = varcalc::is_symmetry(p.eta(0), x)?;
        report.check(&format!("{name}/{fname}: symmetry of eta"), sym);

        // Trivialization checks (Proposition 1 and the corollaries).
        let pair_data = match (
            bundle.lagrangians.get("mu_angle"),
            bundle.cochains.get("angle_branches"),
        ) {
            (Some(mu), Some((cover_name, potentials))) if cover_name == &loaded.cover_name => {
                Some(TrivialPair { mu, potentials })
            }
            _ => None,
        };
        match trivialization_check(p, x, loaded.nu.as_ref(), pair_data, &reducer) {
            Ok(tr) => {
                for (i, v) in &tr.euler_lagrange_match {
                    if !v.is_zero() {
                        report.check_detail(
                            &format!(
                                "{name}/{fname}: E_n(L_Xi lambda_i) = E_n(Xi_V . eta) on `{}`",
                                cover.sets()[*i].name
                            ),
                            *v,
                            "Euler-Lagrange forms differ",
                        );
                    }
                }
                report.check(
                    &format!("{name}/{fname}: E_n(L_Xi lambda_i) = E_n(Xi_V . eta) per set"),
                    Verdict::combine_all(tr.euler_lagrange_match.iter().map(|(_, v)| *v)),
                );
                if let Some(class) = &tr.derived_class {
                    report.check_detail(
                        &format!("{name}/{fname}: Lie-derived presentation class trivial"),
                        if class.trivial {
                            Verdict::Zero
                        } else {
                            Verdict::NonZero
                        },
                        &format!("dim H^2 = {}", class.dim),
                    );
                }
                if let Some(matches) = &tr.divergence_match {
                    report.check(
                        &format!("{name}/{fname}: d_H(L_Xi nu_i) = L_Xi mu per set"),
                        Verdict::combine_all(matches.iter().map(|(_, v)| *v)),
                    );
                }
            }
            Err(err) => {
                report.check_detail(
                    &format!("{name}/{fname}: trivialization"),
                    Verdict::NonZero,
                    &format!("{err}"),
                );
            }
        }

        if !sym.is_zero() {
            continue;
        }

        // Current obstruction, when the boundary contract is satisfiable.
        let beta = bundle
            .cochains
            .get("beta")
            .filter(|(cname, _)| cname == &loaded.cover_name)
            .map(|(_, c)| c);
        let contract_ok = beta.is_some() || {
            (0..cover.set_count()).all(|i| {
                varcalc::var_lie_density(p.lagrangian(i), x)
                    .map(|l| l.density().zero_verdict_with(sig, cfg).is_zero())
                    .unwrap_or(false)
            })
        };
        if sig.base_count() == 1 && contract_ok {
            match current_obstruction(p, x, beta, &reducer) {
                Ok(ob) => {
                    let coords: Vec<String> = ob
                        .class
                        .coordinates
                        .iter()
                        .map(|c| c.text(sig))
                        .collect();
                    report.note(
                        format!(
                            "{name}/{fname}: conserved-current class in H^1 (dim {}): [{}] — {}",
                            ob.class.dim,
                            coords.join(", "),
                            if ob.class.trivial {
                                "trivial; a global conserved current exists"
                            } else {
                                "nontrivial; the local currents do not glue"
                            }
                        ),
                        json!({
                            "name": format!("{name}/{fname}: current class"),
                            "dim": ob.class.dim,
                            "coordinates": coords,
                            "trivial": ob.class.trivial,
                        }),
                    );
                    // Loop-period oracle against the nerve constants.
                    if let (Some(one_form), Some(loop_def)) =
                        (&bundle.fixtures.closed_1form, &bundle.fixtures.loop_def)
                    {
                        let tol = tolerance.unwrap_or(1e-6);
                        let period = oracles::loop_period(
                            sig,
                            one_form,
                            (loop_def.fibers[0], loop_def.fibers[1]),
                            loop_def.radius,
                            loop_def.samples,
                        )?;
                        if let Some(weights) = fundamental_cycle(cover, 1) {
                            let simplices = cover.simplices_of_degree(1);
                            let mut pairing = 0.0;
                            for (s, w) in simplices.iter().zip(&weights) {
                                let e = ob.constants.value(s).expect("total");
                                pairing += e.eval(sig, &EvalPoint::new())?
                                    * rational_to_f64(w);
                            }
                            let rel =
                                (pairing.abs() - period.abs()).abs() / period.abs().max(1e-12);
                            let verdict = if rel <= tol {
                                Verdict::Zero
                            } else {
                                Verdict::NonZero
                            };
                            report.check_detail(
                                &format!("{name}/{fname}: loop-period oracle"),
                                verdict,
                                &format!(
                                    "cycle pairing {pairing:.9} vs quadrature {period:.9} (rel {rel:.2e})"
                                ),
                            );
                        }
                    }
                }
                Err(err) => {
                    report.check_detail(
                        &format!("{name}/{fname}: current obstruction"),
                        Verdict::NonZero,
                        &format!("{err}"),
                    );
                }
            }
        } else if sig.base_count() == 1 {
            report.note(
                format!(
                    "{name}/{fname}: current obstruction skipped — no boundary cochain declared and L_Xi lambda_i != 0"
                ),
                json!({ "name": format!("{name}/{fname}: current obstruction"), "skipped": true }),
            );
        }

        // Conservation law of the second variational derivative.
        let nu_prop2 = bundle
            .cochains
            .get("nu_prop2")
            .filter(|(cname, _)| cname == &loaded.cover_name)
            .map(|(_, c)| c);
        let mut prop2_sources: Vec<(usize, varseq::forms::Current)> = Vec::new();
        if let Some(c) = nu_prop2 {
            for i in 0..cover.set_count() {
                if let Some(v) = c.value(&vec![i]) {
                    prop2_sources.push((i, v.clone()));
                }
            }
        } else if sig.base_count() == 1 {
            // Constructive recovery of the potential on each set.
            let mut ok = Vec::new();
            for i in 0..cover.set_count() {
                let mu_nu = varcalc::contract_source(p.eta(0), x)?;
                match varcalc::dh_potential(&mu_nu) {
                    Ok(nu) => ok.push((i, nu)),
                    Err(_) => {
                        ok.clear();
                        break;
                    }
                }
            }
            prop2_sources = ok;
        }
        if !prop2_sources.is_empty() {
            let mut combined = Verdict::Zero;
            let mut conserved = Vec::new();
            let mut failure: Option<String> = None;
            for (i, nu_i) in &prop2_sources {
                let eps = varcalc::noether_current(p.lagrangian(*i), x)?;
                match varcalc::conservation_law_prop2(p.lagrangian(*i), x, nu_i, &eps) {
                    Ok(rep) => {
                        combined = combined.combine(rep.verdict);
                        conserved.push(rep.conserved);
                    }
                    Err(err) => {
                        failure = Some(format!("set `{}`: {err}", cover.sets()[*i].name));
                        combined = Verdict::NonZero;
                        break;
                    }
                }
            }
            match failure {
                Some(detail) => {
                    report.check_detail(
                        &format!("{name}/{fname}: conservation law (second variation)"),
                        combined,
                        &detail,
                    );
                }
                None => {
                    report.check(
                        &format!("{name}/{fname}: conservation law d_H L_Xi(nu + eps) = 0"),
                        combined,
                    );
                    // Global gluing: per-overlap differences of the
                    // Lie-derived currents.
                    if conserved.len() == cover.set_count() {
                        let cochain =
                            cech::Cochain::from_vertex_values(cover, conserved.clone())?;
                        let diffs = cochain.coboundary(cover);
                        let glue = Verdict::combine_all(
                            diffs
                                .entries()
                                .map(|(_, c)| c.zero_verdict_with(cfg)),
                        );
                        report.check(
                            &format!("{name}/{fname}: Lie-derived current is global"),
                            glue,
                        );
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn rational_to_f64(q: &num::BigRational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}
