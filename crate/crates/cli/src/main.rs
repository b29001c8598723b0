//! Command-line surface for the variational-calculus engine.

mod acceptance;
mod bundle;
mod check;
mod oracles;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use bundle::Bundle;
use report::{verdict_exit, verdict_json, verdict_word, Report};
use varseq::cech;
use varseq::varcalc;
use varseq::{Verdict, ZeroCfg};

#[derive(Parser)]
#[command(
    name = "varseq",
    about = "Finite-order variational calculus on jet coordinates, with a Cech layer over declared covers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Emit machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Re-run the operation's internal certificate.
    #[arg(long)]
    verify: bool,
    /// Override the signature's jet order cap.
    #[arg(long)]
    order_cap: Option<usize>,
    /// Seed for randomized zero-testing fallbacks.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for numeric oracles and sampling.
    #[arg(long)]
    tolerance: Option<f64>,
}

impl Common {
    fn zero_cfg(&self) -> ZeroCfg {
        let mut cfg = ZeroCfg::default();
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = self.tolerance {
            cfg.tolerance = tol;
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Command {
    /// Euler-Lagrange source form of a named Lagrangian.
    El {
        bundle: PathBuf,
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Helmholtz conditions of a named source form.
    Helmholtz {
        bundle: PathBuf,
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Tonti local Lagrangian of a named source form.
    Tonti {
        bundle: PathBuf,
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Canonical Noether current of a Lagrangian along a field.
    Noether {
        bundle: PathBuf,
        #[arg(long)]
        lagrangian: String,
        #[arg(long)]
        field: String,
        #[command(flatten)]
        common: Common,
    },
    /// Variational Lie derivative of a Lagrangian, source form, or current.
    Lie {
        bundle: PathBuf,
        #[arg(long)]
        lagrangian: Option<String>,
        #[arg(long)]
        source: Option<String>,
        #[arg(long)]
        current: Option<String>,
        #[arg(long)]
        field: String,
        #[command(flatten)]
        common: Common,
    },
    /// Nerve cohomology of a declared cover by exact rank computation.
    Cohomology {
        bundle: PathBuf,
        #[arg(long)]
        cover: String,
        /// Single degree; all degrees up to the nerve dimension otherwise.
        #[arg(long)]
        degree: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Full verification pipeline for a presentation.
    Check {
        bundle: PathBuf,
        #[arg(long)]
        presentation: Option<String>,
        #[arg(long)]
        field: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the acceptance suite over the fixture bundles.
    Acceptance {
        /// Directory holding the problem bundles.
        #[arg(long, default_value = "fixtures")]
        fixtures: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::El {
            bundle,
            name,
            common,
        } => {
            let b = Bundle::load_with_cap(&bundle, common.order_cap)?;
            let lagrangian = b.lagrangian(&name)?;
            let eta = varcalc::euler_lagrange(lagrangian)?;
            let mut verdict = Verdict::Zero;
            let mut verified = None;
            if common.verify {
                let dual = varcalc::euler_lagrange_via_forms(lagrangian)?;
                let v = eta.sub(&dual).zero_verdict_with(&common.zero_cfg());
                verified = Some(v);
                verdict = v;
            }
            let comps: Vec<String> = eta.components().iter().map(|c| c.text(&b.sig)).collect();
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "lagrangian": name,
                        "components": comps,
                        "verified": verified.map(verdict_json),
                    }))?
                );
            } else {
                for (a, c) in comps.iter().enumerate() {
                    println!("eps[{}] = {}", b.sig.fiber_name(a), c);
                }
                if let Some(v) = verified {
                    println!("verify (forms route): {}", verdict_word(v));
                }
            }
            Ok(verdict_exit(verdict))
        }
        Command::Helmholtz {
            bundle,
            name,
            common,
        } => {
            let b = Bundle::load_with_cap(&bundle, common.order_cap)?;
            let eta = b.source(&name)?;
            let report = varcalc::helmholtz_with(eta, &common.zero_cfg())?;
            let verdict = report.verdict;
            if common.json {
                let residuals: Vec<_> = report
                    .residuals
                    .iter()
                    .map(|r| {
                        json!({
                            "a": b.sig.fiber_name(r.a),
                            "b": b.sig.fiber_name(r.b),
                            "index": b.sig.index_suffix(&r.index),
                            "residual": r.expr.text(&b.sig),
                            "verdict": verdict_json(r.verdict),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "source": name,
                        "locally_variational": report.is_locally_variational(),
                        "residuals": residuals,
                        "verdict": verdict_json(verdict),
                    }))?
                );
            } else {
                if report.residuals.is_empty() {
                    println!("all Helmholtz residuals vanish syntactically");
                }
                for r in &report.residuals {
                    println!(
                        "H[{},{}][{}] = {}  [{}]",
                        b.sig.fiber_name(r.a),
                        b.sig.fiber_name(r.b),
                        b.sig.index_suffix(&r.index),
                        r.expr.text(&b.sig),
                        verdict_word(r.verdict)
                    );
                }
                println!(
                    "locally variational: {}",
                    if report.is_locally_variational() {
                        "yes"
                    } else {
                        "no"
                    }
                );
            }
            Ok(verdict_exit(verdict))
        }
        Command::Tonti {
            bundle,
            name,
            common,
        } => {
            let b = Bundle::load_with_cap(&bundle, common.order_cap)?;
            let eta = b.source(&name)?;
            let lagrangian = varcalc::tonti(eta)?;
            let mut verdict = Verdict::Zero;
            let mut verified = None;
            if common.verify {
                let back = varcalc::euler_lagrange(&lagrangian)?;
                let v = back.sub(eta).zero_verdict_with(&common.zero_cfg());
                verified = Some(v);
                verdict = v;
            }
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "source": name,
                        "density": lagrangian.density().text(&b.sig),
                        "verified": verified.map(verdict_json),
                    }))?
                );
            } else {
                println!("L = {}", lagrangian.density().text(&b.sig));
                if let Some(v) = verified {
                    println!("verify (Euler-Lagrange round trip): {}", verdict_word(v));
                }
            }
            Ok(verdict_exit(verdict))
        }
        Command::Noether {
            bundle,
            lagrangian,
            field,
            common,
        } => {
            let b = Bundle::load_with_cap(&bundle, common.order_cap)?;
            let l = b.lagrangian(&lagrangian)?;
            let x = b.field(&field)?;
            let current = varcalc::noether_current(l, x)?;
            let mut verdict = Verdict::Zero;
            let mut verified = None;
            if common.verify {
                let (_, cert) = varcalc::var_lie_lagrangian(l, x)?;
                verified = Some(cert.verdict);
                verdict = cert.verdict;
            }
            let comps: Vec<String> = current
                .components()
                .iter()
                .map(|c| c.text(&b.sig))
                .collect();
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "lagrangian": lagrangian,
                        "field": field,
                        "components": comps,
                        "verified": verified.map(verdict_json),
                    }))?
                );
            } else {
                for (mu, c) in comps.iter().enumerate() {
                    println!("eps^{} = {}", b.sig.base_name(mu), c);
                }
                if let Some(v) = verified {
                    println!("verify (Noether identity): {}", verdict_word(v));
                }
            }
            Ok(verdict_exit(verdict))
        }
        Command::Lie {
            bundle,
            lagrangian,
            source,
            current,
            field,
            common,
        } => {
            let b = Bundle::load_with_cap(&bundle, common.order_cap)?;
            let x = b.field(&field)?;
            let chosen = [
                lagrangian.as_ref().map(|_| "lagrangian"),
                source.as_ref().map(|_| "source"),
                current.as_ref().map(|_| "current"),
            ]
            .iter()
            .flatten()
            .count();
            if chosen != 1 {
                bail!("pass exactly one of --lagrangian, --source, --current");
            }
            if let Some(name) = lagrangian {
                let l = b.lagrangian(&name)?;
                let (lie, cert) = varcalc::var_lie_lagrangian(l, x)?;
                let verdict = if common.verify {
                    cert.verdict
                } else {
                    Verdict::Zero
                };
                if common.json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "lagrangian": name,
                            "field": field,
                            "density": lie.density().text(&b.sig),
                            "certificate": {
                                "contraction": cert.contraction.density().text(&b.sig),
                                "noether_current": cert.current.components().iter().map(|c| c.text(&b.sig)).collect::<Vec<_>>(),
                                "residual": cert.residual.text(&b.sig),
                                "verdict": verdict_json(cert.verdict),
                            },
                        }))?
                    );
                } else {
                    println!("L_Xi lambda = {}", lie.density().text(&b.sig));
                    println!(
                        "certificate: Xi_V . E(lambda) = {}, residual {}",
                        cert.contraction.density().text(&b.sig),
                        verdict_word(cert.verdict)
                    );
                }
                return Ok(verdict_exit(verdict));
            }
            if let Some(name) = source {
                let eta = b.source(&name)?;
                let lie = varcalc::var_lie_source(eta, x)?;
                let comps: Vec<String> =
                    lie.components().iter().map(|c| c.text(&b.sig)).collect();
                let verdict = lie.zero_verdict_with(&common.zero_cfg());
                if common.json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "source": name,
                            "field": field,
                            "components": comps,
                            "verdict": verdict_json(verdict),
                        }))?
                    );
                } else {
                    for (a, c) in comps.iter().enumerate() {
                        println!("(L_Xi eta)[{}] = {}", b.sig.fiber_name(a), c);
                    }
                    println!("symmetry: {}", verdict_word(verdict));
                }
                return Ok(verdict_exit(verdict));
            }
            let name = current.expect("one option chosen");
            let c = b.current(&name)?;
            let lie = varcalc::var_lie_current(c, x)?;
            let comps: Vec<String> = lie.components().iter().map(|e| e.text(&b.sig)).collect();
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "current": name,
                        "field": field,
                        "components": comps,
                    }))?
                );
            } else {
                for (mu, e) in comps.iter().enumerate() {
                    println!("(L_Xi nu)^{} = {}", b.sig.base_name(mu), e);
                }
            }
            Ok(0)
        }
        Command::Cohomology {
            bundle,
            cover,
            degree,
            common,
        } => {
            let b = Bundle::load_with_cap(&bundle, common.order_cap)?;
            let c = b
                .covers
                .get(&cover)
                .ok_or_else(|| anyhow::anyhow!("no cover named `{cover}`"))?;
            let degrees: Vec<usize> = match degree {
                Some(q) => vec![q],
                None => (0..=c.max_degree()).collect(),
            };
            let mut dims = Vec::new();
            for q in &degrees {
                let h = cech::nerve_cohomology(c, *q);
                dims.push((*q, h.dim));
            }
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "cover": cover,
                        "betti": dims.iter().map(|(q, d)| json!({"degree": q, "dim": d})).collect::<Vec<_>>(),
                    }))?
                );
            } else {
                for (q, d) in dims {
                    println!("dim H^{q} = {d}");
                }
            }
            Ok(0)
        }
        Command::Check {
            bundle,
            presentation,
            field,
            common,
        } => {
            let b = Bundle::load_with_cap(&bundle, common.order_cap)?;
            let report = check::run_check(
                &b,
                presentation.as_deref(),
                field.as_deref(),
                &common.zero_cfg(),
                common.tolerance,
            )?;
            if common.json {
                println!("{}", serde_json::to_string_pretty(&report.render_json())?);
            } else {
                print!("{}", report.render_text());
            }
            Ok(verdict_exit(report.verdict))
        }
        Command::Acceptance {
            fixtures,
            seed,
            tolerance,
            json,
        } => {
            let outcomes = acceptance::run_all(&fixtures, seed.unwrap_or(42), tolerance)?;
            let mut all_pass = true;
            if json {
                let arr: Vec<_> = outcomes
                    .iter()
                    .map(|o| {
                        json!({
                            "criterion": o.id,
                            "name": o.name,
                            "passed": o.passed,
                            "detail": o.detail,
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&arr)?);
                all_pass = outcomes.iter().all(|o| o.passed);
            } else {
                for o in &outcomes {
                    println!(
                        "criterion {}: {} — {}{}",
                        o.id,
                        if o.passed { "PASS" } else { "FAIL" },
                        o.name,
                        if o.detail.is_empty() {
                            String::new()
                        } else {
                            format!(" ({})", o.detail)
                        }
                    );
                    all_pass &= o.passed;
                }
            }
            Ok(if all_pass { 0 } else { 1 })
        }
    }
}

