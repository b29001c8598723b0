//! Problem bundles: JSON files holding a signature, named definitions,
//! covers with nerves and sample points, presentations, and the fixture
//! annotations the numeric oracles need. Expressions are strings in the
//! engine grammar; loading parses and normalizes everything, so a
//! load-save-load round trip is stable.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use varseq::cech::{Cochain, ConstantReducer, Cover, CoverSet, Presentation, Simplex};
use varseq::expr::EvalPoint;
use varseq::fields::ProjectableField;
use varseq::forms::{Current, Lagrangian, SourceForm};
use varseq::{parse, ConstDef, JetExpr, Signature};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignatureDef {
    pub base: Vec<String>,
    pub fiber: Vec<String>,
    pub order_cap: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstEntry {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldDef {
    pub xi: Vec<String>,
    pub fiber: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetDef {
    pub name: String,
    #[serde(default)]
    pub star_shaped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverDef {
    pub name: String,
    pub sets: Vec<SetDef>,
    pub simplices: Vec<Vec<usize>>,
    #[serde(default)]
    pub samples: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationDef {
    pub name: String,
    pub cover: String,
    pub lagrangians: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub nu: BTreeMap<String, String>,
}

/// A cochain entry is either the name of a declared current or inline
/// component expressions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CochainEntry {
    Name(String),
    Components(Vec<String>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainDef {
    pub name: String,
    pub cover: String,
    pub degree: usize,
    pub values: BTreeMap<String, CochainEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct TriangulationDef {
    pub kind: String,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct LoopDef {
    pub kind: String,
    pub fibers: Vec<usize>,
    pub radius: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct FixturesDef {
    #[serde(default)]
    pub period_monomials: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_2form: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_1form: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangulation: Option<TriangulationDef>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "loop")]
    pub loop_def: Option<LoopDef>,
}

/// The on-disk schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub signature: SignatureDef,
    #[serde(default)]
    pub constants: Vec<ConstEntry>,
    #[serde(default)]
    pub lagrangians: BTreeMap<String, String>,
    #[serde(default)]
    pub source_forms: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub fields: BTreeMap<String, FieldDef>,
    #[serde(default)]
    pub currents: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub covers: Vec<CoverDef>,
    #[serde(default)]
    pub presentations: Vec<PresentationDef>,
    #[serde(default)]
    pub cochains: Vec<CochainDef>,
    #[serde(default)]
    pub fixtures: FixturesDef,
}

/// A loaded presentation with its optional potential cochain.
#[derive(Clone)]
pub struct LoadedPresentation {
    pub presentation: Presentation,
    pub cover_name: String,
    pub nu: Option<Cochain<Current>>,
}

/// Numeric fixtures after parsing.
#[derive(Clone, Default)]
pub struct Fixtures {
    pub period_monomials: Vec<JetExpr>,
    /// Components of a closed fiber 2-form, keyed by fiber index pairs a < b.
    pub closed_2form: Option<BTreeMap<(usize, usize), JetExpr>>,
    pub closed_1form: Option<Vec<JetExpr>>,
    pub triangulation: Option<TriangulationDef>,
    pub loop_def: Option<LoopDef>,
}

/// A fully parsed problem bundle.
pub struct Bundle {
    pub name: String,
    pub sig: Arc<Signature>,
    pub lagrangians: BTreeMap<String, Lagrangian>,
    pub sources: BTreeMap<String, SourceForm>,
    pub fields: BTreeMap<String, ProjectableField>,
    pub currents: BTreeMap<String, Current>,
    pub covers: BTreeMap<String, Arc<Cover>>,
    /// Sample points per cover, keyed by simplex.
    pub samples: BTreeMap<String, BTreeMap<Simplex, EvalPoint>>,
    pub presentations: BTreeMap<String, LoadedPresentation>,
    pub cochains: BTreeMap<String, (String, Cochain<Current>)>,
    pub fixtures: Fixtures,
    file: BundleFile,
}

fn parse_simplex_key(key: &str) -> Result<Simplex> {
    let parts: Result<Vec<usize>, _> = key.split(',').map(|p| p.trim().parse()).collect();
    let simplex = parts.with_context(|| format!("bad simplex key `{key}`"))?;
    if !simplex.windows(2).all(|w| w[0] < w[1]) {
        bail!("simplex key `{key}` is not strictly increasing");
    }
    Ok(simplex)
}

fn simplex_key(s: &Simplex) -> String {
    s.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl Bundle {
    pub fn load(path: &Path) -> Result<Bundle> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let file: BundleFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Bundle::from_file(file, None)
    }

    pub fn load_with_cap(path: &Path, order_cap: Option<usize>) -> Result<Bundle> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let file: BundleFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Bundle::from_file(file, order_cap)
    }

    pub fn from_file(file: BundleFile, order_cap: Option<usize>) -> Result<Bundle> {
        let consts = file
            .constants
            .iter()
            .map(|c| ConstDef {
                name: c.name.clone(),
                value: c.value,
            })
            .collect();
        let sig = Arc::new(Signature::with_consts(
            file.signature.base.clone(),
            file.signature.fiber.clone(),
            order_cap.unwrap_or(file.signature.order_cap),
            consts,
        )?);
        let parse_one = |text: &str, what: &str| -> Result<JetExpr> {
            parse(text, &sig).map_err(|e| anyhow!("{what}: {e} (in `{text}`)"))
        };

        let mut lagrangians = BTreeMap::new();
        for (name, text) in &file.lagrangians {
            lagrangians.insert(
                name.clone(),
                Lagrangian::new(sig.clone(), parse_one(text, &format!("lagrangian `{name}`"))?),
            );
        }
        let mut sources = BTreeMap::new();
        for (name, comps) in &file.source_forms {
            let parsed = comps
                .iter()
                .map(|t| parse_one(t, &format!("source form `{name}`")))
                .collect::<Result<Vec<_>>>()?;
            sources.insert(name.clone(), SourceForm::new(sig.clone(), parsed)?);
        }
        let mut fields = BTreeMap::new();
        for (name, def) in &file.fields {
            let xi = def
                .xi
                .iter()
                .map(|t| parse_one(t, &format!("field `{name}` base component")))
                .collect::<Result<Vec<_>>>()?;
            let fiber = def
                .fiber
                .iter()
                .map(|t| parse_one(t, &format!("field `{name}` fiber component")))
                .collect::<Result<Vec<_>>>()?;
            fields.insert(name.clone(), ProjectableField::new(sig.clone(), xi, fiber)?);
        }
        let mut currents = BTreeMap::new();
        for (name, comps) in &file.currents {
            let parsed = comps
                .iter()
                .map(|t| parse_one(t, &format!("current `{name}`")))
                .collect::<Result<Vec<_>>>()?;
            currents.insert(name.clone(), Current::new(sig.clone(), parsed)?);
        }

        let mut covers = BTreeMap::new();
        let mut samples: BTreeMap<String, BTreeMap<Simplex, EvalPoint>> = BTreeMap::new();
        for def in &file.covers {
            let sets = def
                .sets
                .iter()
                .map(|s| CoverSet {
                    name: s.name.clone(),
                    annotation: s.annotation.clone(),
                    star_shaped: s.star_shaped,
                })
                .collect();
            let cover = Arc::new(Cover::new(sig.clone(), sets, def.simplices.clone())?);
            let mut cover_samples = BTreeMap::new();
            for (key, coords) in &def.samples {
                let simplex = parse_simplex_key(key)?;
                let mut point = EvalPoint::new();
                for (coord, value) in coords {
                    if let Some(mu) = sig.base_index(coord) {
                        point.set_base(mu, *value);
                    } else if let Some(a) = sig.fiber_index(coord) {
                        point.set_fiber(a, *value);
                    } else {
                        bail!("sample for {key} assigns unknown coordinate `{coord}`");
                    }
                }
                cover_samples.insert(simplex, point);
            }
            samples.insert(def.name.clone(), cover_samples);
            covers.insert(def.name.clone(), cover);
        }

        let resolve_entry = |entry: &CochainEntry,
                             what: &str,
                             currents: &BTreeMap<String, Current>|
         -> Result<Current> {
            match entry {
                CochainEntry::Name(name) => currents
                    .get(name)
                    .cloned()
                    .ok_or_else(|| anyhow!("{what}: undefined current `{name}`")),
                CochainEntry::Components(comps) => {
                    let parsed = comps
                        .iter()
                        .map(|t| parse_one(t, what))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Current::new(sig.clone(), parsed)?)
                }
            }
        };

        let mut cochains = BTreeMap::new();
        for def in &file.cochains {
            let cover = covers
                .get(&def.cover)
                .ok_or_else(|| anyhow!("cochain `{}`: undefined cover `{}`", def.name, def.cover))?;
            let mut values = BTreeMap::new();
            for (key, entry) in &def.values {
                let simplex = parse_simplex_key(key)?;
                values.insert(
                    simplex,
                    resolve_entry(entry, &format!("cochain `{}`", def.name), &currents)?,
                );
            }
            let cochain = Cochain::new(cover, def.degree, values)?;
            cochains.insert(def.name.clone(), (def.cover.clone(), cochain));
        }

        let mut presentations = BTreeMap::new();
        for def in &file.presentations {
            let cover = covers
                .get(&def.cover)
                .ok_or_else(|| {
                    anyhow!("presentation `{}`: undefined cover `{}`", def.name, def.cover)
                })?
                .clone();
            let locals = def
                .lagrangians
                .iter()
                .map(|n| {
                    lagrangians
                        .get(n)
                        .cloned()
                        .ok_or_else(|| anyhow!("presentation `{}`: undefined lagrangian `{n}`", def.name))
                })
                .collect::<Result<Vec<_>>>()?;
            let presentation = Presentation::new(cover.clone(), locals)?;
            let nu = if def.nu.is_empty() {
                None
            } else {
                let mut values = BTreeMap::new();
                for (key, entry) in &def.nu {
                    let simplex = parse_simplex_key(key)?;
                    values.insert(
                        simplex,
                        resolve_entry(
                            &CochainEntry::Name(entry.clone()),
                            &format!("presentation `{}` nu", def.name),
                            &currents,
                        )?,
                    );
                }
                Some(Cochain::new(&cover, 1, values)?)
            };
            presentations.insert(
                def.name.clone(),
                LoadedPresentation {
                    presentation,
                    cover_name: def.cover.clone(),
                    nu,
                },
            );
        }

        let mut fixtures = Fixtures {
            period_monomials: file
                .fixtures
                .period_monomials
                .iter()
                .map(|t| parse_one(t, "period monomial"))
                .collect::<Result<Vec<_>>>()?,
            closed_2form: None,
            closed_1form: None,
            triangulation: file.fixtures.triangulation.clone(),
            loop_def: file.fixtures.loop_def.clone(),
        };
        if let Some(form) = &file.fixtures.closed_2form {
            let mut parsed = BTreeMap::new();
            for (key, text) in form {
                let pair = parse_simplex_key(key)?;
                if pair.len() != 2 {
                    bail!("closed_2form key `{key}` must name two fiber indices");
                }
                parsed.insert((pair[0], pair[1]), parse_one(text, "closed 2-form")?);
            }
            fixtures.closed_2form = Some(parsed);
        }
        if let Some(form) = &file.fixtures.closed_1form {
            fixtures.closed_1form = Some(
                form.iter()
                    .map(|t| parse_one(t, "closed 1-form"))
                    .collect::<Result<Vec<_>>>()?,
            );
        }

        Ok(Bundle {
            name: file.name.clone(),
            sig,
            lagrangians,
            sources,
            fields,
            currents,
            covers,
            samples,
            presentations,
            cochains,
            fixtures,
            file,
        })
    }

    /// Canonical re-rendering: every expression printed in normal form.
    pub fn to_file(&self) -> BundleFile {
        let mut out = self.file.clone();
        for (name, l) in &self.lagrangians {
            out.lagrangians
                .insert(name.clone(), l.density().text(&self.sig));
        }
        for (name, s) in &self.sources {
            out.source_forms.insert(
                name.clone(),
                s.components().iter().map(|c| c.text(&self.sig)).collect(),
            );
        }
        for (name, f) in &self.fields {
            let def = FieldDef {
                xi: (0..self.sig.base_count())
                    .map(|mu| f.xi(mu).text(&self.sig))
                    .collect(),
                fiber: (0..self.sig.fiber_count())
                    .map(|a| f.fiber_component(a).text(&self.sig))
                    .collect(),
            };
            out.fields.insert(name.clone(), def);
        }
        for (name, c) in &self.currents {
            out.currents.insert(
                name.clone(),
                c.components().iter().map(|e| e.text(&self.sig)).collect(),
            );
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_file())?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    /// The constant reducer for a cover: declared periods plus its samples.
    pub fn reducer(&self, cover_name: &str) -> ConstantReducer {
        let samples = self.samples.get(cover_name).cloned().unwrap_or_default();
        ConstantReducer::new(self.fixtures.period_monomials.clone(), samples)
    }

    pub fn lagrangian(&self, name: &str) -> Result<&Lagrangian> {
        self.lagrangians
            .get(name)
            .ok_or_else(|| anyhow!("no lagrangian named `{name}` in bundle `{}`", self.name))
    }

    pub fn source(&self, name: &str) -> Result<&SourceForm> {
        self.sources
            .get(name)
            .ok_or_else(|| anyhow!("no source form named `{name}` in bundle `{}`", self.name))
    }

    pub fn field(&self, name: &str) -> Result<&ProjectableField> {
        self.fields
            .get(name)
            .ok_or_else(|| anyhow!("no field named `{name}` in bundle `{}`", self.name))
    }

    pub fn current(&self, name: &str) -> Result<&Current> {
        self.currents
            .get(name)
            .ok_or_else(|| anyhow!("no current named `{name}` in bundle `{}`", self.name))
    }

    pub fn presentation(&self, name: &str) -> Result<&LoadedPresentation> {
        self.presentations
            .get(name)
            .ok_or_else(|| anyhow!("no presentation named `{name}` in bundle `{}`", self.name))
    }

    pub fn cochain(&self, name: &str) -> Result<&(String, Cochain<Current>)> {
        self.cochains
            .get(name)
            .ok_or_else(|| anyhow!("no cochain named `{name}` in bundle `{}`", self.name))
    }
}

pub fn simplex_label(s: &Simplex) -> String {
    simplex_key(s)
}
