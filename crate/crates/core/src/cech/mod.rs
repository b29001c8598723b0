//! Covers, nerves, cochains, the coboundary operator, presentations of local
//! variational problems, nerve cohomology by exact linear algebra, and
//! obstruction classes.
//!
//! Restriction maps are the identity: every expression lives in one global
//! coordinate system and the topology is carried entirely by the declared
//! cover and its nerve. Real-coefficient classes are computed only after the
//! cochain entries are certified constant; the certification is symbolic
//! (every coordinate partial must vanish), while the value of a constant that
//! still displays coordinates (angle branches) is identified numerically
//! against the declared period monomials at a declared sample point, with a
//! bounded-denominator rational reconstruction.

pub mod linalg;

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigRational, Zero};

use crate::error::CechError;
use crate::expr::{zero::constancy_verdict, EvalPoint, JetExpr, Verdict, ZeroCfg};
use crate::fields::ProjectableField;
use crate::forms::{Current, Lagrangian, SourceForm};
use crate::sig::Signature;
use crate::varcalc;
use linalg::QMatrix;

/// A simplex of the nerve: strictly increasing set indices.
pub type Simplex = Vec<usize>;

/// One open set of a declared cover.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSet {
    pub name: String,
    /// Free-form description of the domain (excluded loci and the like).
    pub annotation: Option<String>,
    /// Whether the fiber domain is star-shaped about the Tonti base point.
    pub star_shaped: bool,
}

/// A named cover with an explicit nerve.
#[derive(Debug, Clone, PartialEq)]
pub struct Cover {
    sig: Arc<Signature>,
    sets: Vec<CoverSet>,
    simplices: Vec<Simplex>,
}

impl Cover {
    pub fn new(
        sig: Arc<Signature>,
        sets: Vec<CoverSet>,
        mut simplices: Vec<Simplex>,
    ) -> Result<Self, CechError> {
        simplices.sort();
        simplices.dedup();
        for s in &simplices {
            if s.is_empty() {
                return Err(CechError::BadNerve("empty simplex".into()));
            }
            if !s.windows(2).all(|w| w[0] < w[1]) {
                return Err(CechError::BadNerve(format!(
                    "indices of {s:?} are not strictly increasing"
                )));
            }
            if s.iter().any(|&i| i >= sets.len()) {
                return Err(CechError::BadNerve(format!(
                    "simplex {s:?} references an undeclared set"
                )));
            }
            // Face closure.
            if s.len() > 1 {
                for k in 0..s.len() {
                    let mut face = s.clone();
                    face.remove(k);
                    if !simplices.contains(&face) {
                        return Err(CechError::BadNerve(format!(
                            "face {face:?} of {s:?} is not listed"
                        )));
                    }
                }
            }
        }
        Ok(Cover {
            sig,
            sets,
            simplices,
        })
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn sets(&self) -> &[CoverSet] {
        &self.sets
    }

    pub fn set_count(&self) -> usize {
        self.sets.len()
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Simplices of degree `q` (i.e. with `q + 1` vertices), in order.
    pub fn simplices_of_degree(&self, q: usize) -> Vec<Simplex> {
        self.simplices
            .iter()
            .filter(|s| s.len() == q + 1)
            .cloned()
            .collect()
    }

    pub fn max_degree(&self) -> usize {
        self.simplices
            .iter()
            .map(|s| s.len() - 1)
            .max()
            .unwrap_or(0)
    }

    /// The coboundary matrix from `q`-cochains to `(q+1)`-cochains.
    pub fn coboundary_matrix(&self, q: usize) -> QMatrix {
        let rows = self.simplices_of_degree(q + 1);
        let cols = self.simplices_of_degree(q);
        let mut m = QMatrix::zeros(rows.len(), cols.len());
        for (i, sigma) in rows.iter().enumerate() {
            for k in 0..sigma.len() {
                let mut face = sigma.clone();
                face.remove(k);
                let j = cols.iter().position(|c| *c == face).expect("face closure");
                let sign = if k % 2 == 0 { 1i64 } else { -1 };
                m.set(i, j, BigRational::from_integer(sign.into()));
            }
        }
        m
    }
}

/// Values a cochain can carry.
pub trait CochainValue: Clone {
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn zero_verdict_in(&self, sig: &Signature, cfg: &ZeroCfg) -> Verdict;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl CochainValue for JetExpr {
    fn add(&self, other: &Self) -> Self {
        JetExpr::add(self, other)
    }
    fn neg(&self) -> Self {
        JetExpr::neg(self)
    }
    fn zero_verdict_in(&self, sig: &Signature, cfg: &ZeroCfg) -> Verdict {
        self.zero_verdict_with(sig, cfg)
    }
}

impl CochainValue for Lagrangian {
    fn add(&self, other: &Self) -> Self {
        Lagrangian::add(self, other)
    }
    fn neg(&self) -> Self {
        Lagrangian::new(self.sig().clone(), self.density().neg())
    }
    fn zero_verdict_in(&self, sig: &Signature, cfg: &ZeroCfg) -> Verdict {
        self.density().zero_verdict_with(sig, cfg)
    }
}

impl CochainValue for Current {
    fn add(&self, other: &Self) -> Self {
        Current::add(self, other)
    }
    fn neg(&self) -> Self {
        Current::zero(self.sig().clone()).sub(self)
    }
    fn zero_verdict_in(&self, _sig: &Signature, cfg: &ZeroCfg) -> Verdict {
        self.zero_verdict_with(cfg)
    }
}

impl CochainValue for SourceForm {
    fn add(&self, other: &Self) -> Self {
        let components = self
            .components()
            .iter()
            .zip(other.components())
            .map(|(a, b)| a.add(b))
            .collect();
        SourceForm::new(self.sig().clone(), components).expect("same signature")
    }
    fn neg(&self) -> Self {
        SourceForm::zero(self.sig().clone()).sub(self)
    }
    fn zero_verdict_in(&self, _sig: &Signature, cfg: &ZeroCfg) -> Verdict {
        self.zero_verdict_with(cfg)
    }
}

/// A `q`-cochain: one value per `q`-simplex of the nerve.
#[derive(Debug, Clone)]
pub struct Cochain<T> {
    degree: usize,
    values: BTreeMap<Simplex, T>,
}

impl<T: CochainValue> Cochain<T> {
    pub fn new(
        cover: &Cover,
        degree: usize,
        values: BTreeMap<Simplex, T>,
    ) -> Result<Self, CechError> {
        for s in cover.simplices_of_degree(degree) {
            if !values.contains_key(&s) {
                return Err(CechError::NotTotal(degree));
            }
        }
        for s in values.keys() {
            if s.len() != degree + 1 {
                return Err(CechError::BadNerve(format!(
                    "value assigned to {s:?} which is not a {degree}-simplex"
                )));
            }
        }
        Ok(Cochain { degree, values })
    }

    pub fn from_vertex_values(cover: &Cover, values: Vec<T>) -> Result<Self, CechError> {
        let map = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (vec![i], v))
            .collect();
        Cochain::new(cover, 0, map)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn value(&self, s: &Simplex) -> Option<&T> {
        self.values.get(s)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Simplex, &T)> {
        self.values.iter()
    }

    /// The coboundary `(d f)(sigma) = sum_i (-1)^i f(sigma_i)`, with the
    /// identity restriction. Returns the empty cochain when the nerve has no
    /// simplices of the next degree.
    pub fn coboundary(&self, cover: &Cover) -> Cochain<T> {
        let mut values: BTreeMap<Simplex, T> = BTreeMap::new();
        for sigma in cover.simplices_of_degree(self.degree + 1) {
            let mut acc: Option<T> = None;
            for k in 0..sigma.len() {
                let mut face = sigma.clone();
                face.remove(k);
                let v = self.values.get(&face).expect("total cochain").clone();
                let signed = if k % 2 == 0 { v } else { v.neg() };
                acc = Some(match acc {
                    None => signed,
                    Some(a) => a.add(&signed),
                });
            }
            values.insert(sigma, acc.expect("simplex has vertices"));
        }
        Cochain {
            degree: self.degree + 1,
            values,
        }
    }

    pub fn map<U: CochainValue>(&self, f: impl Fn(&T) -> U) -> Cochain<U> {
        Cochain {
            degree: self.degree,
            values: self.values.iter().map(|(s, v)| (s.clone(), f(v))).collect(),
        }
    }

    pub fn try_map<U: CochainValue, E>(
        &self,
        mut f: impl FnMut(&Simplex, &T) -> Result<U, E>,
    ) -> Result<Cochain<U>, E> {
        let mut values = BTreeMap::new();
        for (s, v) in &self.values {
            values.insert(s.clone(), f(s, v)?);
        }
        Ok(Cochain {
            degree: self.degree,
            values,
        })
    }

    /// Per-simplex zero verdicts.
    pub fn zero_verdicts(&self, sig: &Signature, cfg: &ZeroCfg) -> Vec<(Simplex, Verdict)> {
        self.values
            .iter()
            .map(|(s, v)| (s.clone(), v.zero_verdict_in(sig, cfg)))
            .collect()
    }
}

/// A cover together with a 0-cochain of local Lagrangians; the cached
/// Euler-Lagrange forms are computed on construction.
#[derive(Debug, Clone)]
pub struct Presentation {
    cover: Arc<Cover>,
    lagrangians: Vec<Lagrangian>,
    eta: Vec<SourceForm>,
}

impl Presentation {
    pub fn new(cover: Arc<Cover>, lagrangians: Vec<Lagrangian>) -> Result<Self, CechError> {
        if lagrangians.len() != cover.set_count() {
            return Err(CechError::InvalidPresentation(format!(
                "{} Lagrangians for {} sets",
                lagrangians.len(),
                cover.set_count()
            )));
        }
        let eta = lagrangians
            .iter()
            .map(varcalc::euler_lagrange)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Presentation {
            cover,
            lagrangians,
            eta,
        })
    }

    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    pub fn lagrangian(&self, i: usize) -> &Lagrangian {
        &self.lagrangians[i]
    }

    pub fn lagrangians(&self) -> &[Lagrangian] {
        &self.lagrangians
    }

    pub fn eta(&self, i: usize) -> &SourceForm {
        &self.eta[i]
    }

    pub fn lagrangian_cochain(&self) -> Cochain<Lagrangian> {
        Cochain::from_vertex_values(&self.cover, self.lagrangians.clone())
            .expect("lengths checked at construction")
    }
}

/// Validation report for a presentation.
#[derive(Debug, Clone)]
pub struct PresentationReport {
    /// `E_n(lambda_i - lambda_j)` per 1-simplex, computed directly.
    pub defining: Vec<(Simplex, Verdict)>,
    /// `(d eta)_{ij}` per 1-simplex, from the cached Euler-Lagrange forms.
    pub eta_cocycle: Vec<(Simplex, Verdict)>,
    /// `(d lambda)_{ij}` per 1-simplex; all zero means a global Lagrangian.
    pub lagrangian_cocycle: Vec<(Simplex, Verdict)>,
    pub valid: Verdict,
    pub global: Verdict,
}

pub fn validate_presentation(p: &Presentation) -> PresentationReport {
    validate_presentation_with(p, &ZeroCfg::default())
}

pub fn validate_presentation_with(p: &Presentation, cfg: &ZeroCfg) -> PresentationReport {
    let sig = p.cover.sig();
    let mut defining = Vec::new();
    let mut eta_cocycle = Vec::new();
    let mut lagrangian_cocycle = Vec::new();
    for s in p.cover.simplices_of_degree(1) {
        let (i, j) = (s[0], s[1]);
        let diff = p.lagrangians[i].sub(&p.lagrangians[j]);
        let el = varcalc::euler_lagrange(&diff)
            .map(|e| e.zero_verdict_with(cfg))
            .unwrap_or(Verdict::NonZero);
        defining.push((s.clone(), el));
        let eta_diff = p.eta[i].sub(&p.eta[j]);
        eta_cocycle.push((s.clone(), eta_diff.zero_verdict_with(cfg)));
        lagrangian_cocycle.push((
            s.clone(),
            diff.density().zero_verdict_with(sig, cfg),
        ));
    }
    let valid = Verdict::combine_all(
        defining
            .iter()
            .chain(eta_cocycle.iter())
            .map(|(_, v)| *v),
    );
    let global = Verdict::combine_all(lagrangian_cocycle.iter().map(|(_, v)| *v));
    PresentationReport {
        defining,
        eta_cocycle,
        lagrangian_cocycle,
        valid,
        global,
    }
}

/// Do two presentations on the same cover give rise to the same
/// Euler-Lagrange form?
pub fn equivalent(p: &Presentation, q: &Presentation) -> Result<Verdict, CechError> {
    if p.cover.as_ref() != q.cover.as_ref() {
        return Err(CechError::CoverMismatch);
    }
    let cfg = ZeroCfg::default();
    let mut verdict = Verdict::Zero;
    for i in 0..p.cover.set_count() {
        verdict = verdict.combine(p.eta[i].sub(&q.eta[i]).zero_verdict_with(&cfg));
    }
    Ok(verdict)
}

/// Nerve cohomology in one degree: dimension, representative cocycles and the
/// solver for coordinates of arbitrary cocycles.
#[derive(Debug, Clone)]
pub struct NerveCohomology {
    pub degree: usize,
    pub simplices: Vec<Simplex>,
    pub dim: usize,
    /// Representative cocycles, as vectors over `simplices`.
    pub representatives: Vec<Vec<BigRational>>,
    image_cols: Vec<Vec<BigRational>>,
    up: QMatrix,
}

pub fn nerve_cohomology(cover: &Cover, q: usize) -> NerveCohomology {
    let simplices = cover.simplices_of_degree(q);
    let up = cover.coboundary_matrix(q);
    let kernel = up.kernel_basis();
    let image_cols: Vec<Vec<BigRational>> = if q == 0 {
        Vec::new()
    } else {
        let down = cover.coboundary_matrix(q - 1);
        (0..down.cols()).map(|j| down.column(j)).collect()
    };
    // Extend an independent spanning set of the image by kernel vectors.
    let mut span: Vec<Vec<BigRational>> = Vec::new();
    let mut rank = 0;
    for col in &image_cols {
        let mut candidate = span.clone();
        candidate.push(col.clone());
        let r = QMatrix::from_columns(&candidate).rank();
        if r > rank {
            span = candidate;
            rank = r;
        }
    }
    let mut representatives = Vec::new();
    for v in kernel {
        let mut candidate = span.clone();
        candidate.push(v.clone());
        let r = QMatrix::from_columns(&candidate).rank();
        if r > rank {
            span = candidate;
            rank = r;
            representatives.push(v);
        }
    }
    NerveCohomology {
        degree: q,
        simplices,
        dim: representatives.len(),
        representatives,
        image_cols,
        up,
    }
}

/// Weights of a generating `q`-cycle of the nerve (kernel of the boundary
/// map, i.e. the transpose of the degree `q-1` coboundary), normalized to
/// coprime integers with the first nonzero entry positive. `None` unless the
/// cycle space is one-dimensional.
pub fn fundamental_cycle(cover: &Cover, q: usize) -> Option<Vec<BigRational>> {
    if q == 0 {
        return None;
    }
    let boundary = cover.coboundary_matrix(q - 1).transpose();
    let kernel = boundary.kernel_basis();
    if kernel.len() != 1 {
        return None;
    }
    let mut v = kernel.into_iter().next().unwrap();
    // Scale to integer entries with positive leading sign.
    let mut denom_lcm = num::BigInt::from(1);
    for e in &v {
        denom_lcm = num::Integer::lcm(&denom_lcm, e.denom());
    }
    let scale = BigRational::from_integer(denom_lcm);
    for e in v.iter_mut() {
        *e = &*e * &scale;
    }
    if let Some(first) = v.iter().find(|e| !e.is_zero()) {
        if first < &BigRational::zero() {
            for e in v.iter_mut() {
                *e = -e.clone();
            }
        }
    }
    Some(v)
}

impl NerveCohomology {
    /// Coordinates of a cocycle in the computed basis; `None` when the vector
    /// is not a cocycle.
    pub fn class_coordinates(&self, cocycle: &[BigRational]) -> Option<Vec<BigRational>> {
        if cocycle.len() != self.simplices.len() {
            return None;
        }
        let image = self.up.mul_vec(cocycle);
        if image.iter().any(|v| !v.is_zero()) {
            return None;
        }
        if self.dim == 0 {
            return Some(Vec::new());
        }
        let mut cols = self.image_cols.clone();
        cols.extend(self.representatives.iter().cloned());
        let m = QMatrix::from_columns(&cols);
        let x = m.solve(cocycle)?;
        Some(x[self.image_cols.len()..].to_vec())
    }

    /// Is the cocycle a coboundary?
    pub fn is_trivial(&self, cocycle: &[BigRational]) -> Option<bool> {
        self.class_coordinates(cocycle)
            .map(|c| c.iter().all(|v| v.is_zero()))
    }
}

/// Constant-identification machinery for `reduce_to_constants`: declared
/// period monomials with sample points per simplex.
#[derive(Debug, Clone, Default)]
pub struct ConstantReducer {
    /// Candidate period units (constant expressions such as `pi*g`).
    pub periods: Vec<JetExpr>,
    /// Sample points in the (connected) overlap of each simplex.
    pub samples: BTreeMap<Simplex, EvalPoint>,
    pub max_denominator: u64,
    pub tolerance: f64,
}

impl ConstantReducer {
    pub fn new(periods: Vec<JetExpr>, samples: BTreeMap<Simplex, EvalPoint>) -> Self {
        ConstantReducer {
            periods,
            samples,
            max_denominator: 48,
            tolerance: 1e-6,
        }
    }

    /// Reduce one certified-constant entry to an exact constant expression.
    fn identify(
        &self,
        sig: &Signature,
        simplex: &Simplex,
        e: &JetExpr,
    ) -> Result<JetExpr, CechError> {
        // Syntactic extraction: no coordinate atoms at all.
        if !e
            .collect_atoms()
            .iter()
            .any(|a| a.is_coordinate())
        {
            return Ok(e.clone());
        }
        let point = self
            .samples
            .get(simplex)
            .ok_or_else(|| CechError::MissingSample(simplex.clone()))?;
        let value = e
            .eval(sig, point)
            .map_err(CechError::Expr)?;
        // Pure rational?
        if let Some(q) = reconstruct_rational(value, self.max_denominator, self.tolerance) {
            return Ok(JetExpr::rational(q));
        }
        // A rational multiple of a declared period unit.
        for period in &self.periods {
            let unit = period
                .eval(sig, &EvalPoint::new())
                .map_err(CechError::Expr)?;
            if unit.abs() < 1e-12 {
                continue;
            }
            if let Some(q) = reconstruct_rational(value / unit, self.max_denominator, self.tolerance)
            {
                return Ok(period.scale(&q));
            }
        }
        Err(CechError::UnidentifiedConstant {
            simplex: simplex.clone(),
        })
    }
}

/// Continued-fraction rational reconstruction with a denominator bound;
/// `None` when no candidate matches within the tolerance.
pub fn reconstruct_rational(value: f64, max_den: u64, tol: f64) -> Option<BigRational> {
    if !value.is_finite() {
        return None;
    }
    let neg = value < 0.0;
    let x0 = value.abs();
    let (mut p_prev, mut q_prev) = (1i64, 0i64);
    let (mut p, mut q) = (x0.floor() as i64, 1i64);
    let mut frac = x0 - x0.floor();
    for _ in 0..40 {
        if (p as f64 / q as f64 - x0).abs() <= tol || frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor() as i64;
        frac = inv - inv.floor();
        let p_new = a.checked_mul(p).and_then(|v| v.checked_add(p_prev))?;
        let q_new = a.checked_mul(q).and_then(|v| v.checked_add(q_prev))?;
        if q_new as u64 > max_den {
            break;
        }
        p_prev = p;
        q_prev = q;
        p = p_new;
        q = q_new;
    }
    if q > 0 && (q as u64) <= max_den && (p as f64 / q as f64 - x0).abs() <= tol {
        let mut r = BigRational::new(p.into(), q.into());
        if neg {
            r = -r;
        }
        Some(r)
    } else {
        None
    }
}

/// Reduce an expression cochain to constants: each entry must have all
/// coordinate partials symbolically zero; the constant value is extracted
/// syntactically when possible, else identified against the declared periods.
pub fn reduce_to_constants(
    cochain: &Cochain<JetExpr>,
    sig: &Signature,
    reducer: &ConstantReducer,
) -> Result<Cochain<JetExpr>, CechError> {
    cochain.try_map(|simplex, e| {
        match constancy_verdict(e, sig) {
            Ok(_) => {}
            Err((coord, _verdict)) => {
                return Err(CechError::NotConstant {
                    simplex: simplex.clone(),
                    coord,
                })
            }
        }
        reducer.identify(sig, simplex, e)
    })
}

/// A class in `H^q(nerve, R)`: exact coordinates in the computed basis. The
/// coordinates are constant expressions (rational combinations of declared
/// period constants).
#[derive(Debug, Clone)]
pub struct CechClass {
    pub degree: usize,
    pub dim: usize,
    pub coordinates: Vec<JetExpr>,
    pub trivial: bool,
}

/// Decompose a constant expression over its monomials in the declared
/// constants: returns the distinct monomials and the rational coefficient of
/// each.
fn constant_components(e: &JetExpr) -> Result<Vec<(JetExpr, BigRational)>, CechError> {
    if !e.den().is_one() {
        return Err(CechError::InvalidPresentation(format!(
            "constant `{}` is not polynomial in the declared constants",
            e.debug_text()
        )));
    }
    let mut out = Vec::new();
    for (m, c) in e.num().terms() {
        let unit = JetExpr::from_poly(crate::expr::poly::Poly::term(
            num::One::one(),
            m.clone(),
        ));
        out.push((unit, c.clone()));
    }
    Ok(out)
}

/// Extract the class of a constant cochain in `H^q`, componentwise over the
/// constant monomials appearing in the entries.
pub fn constant_cochain_class(
    cochain: &Cochain<JetExpr>,
    cover: &Cover,
    cohomology: &NerveCohomology,
) -> Result<CechClass, CechError> {
    let q = cochain.degree();
    let simplices = cover.simplices_of_degree(q);
    // Collect the constant monomials across all entries.
    let mut units: Vec<JetExpr> = Vec::new();
    for (_, e) in cochain.entries() {
        for (unit, _) in constant_components(e)? {
            if !units.contains(&unit) {
                units.push(unit);
            }
        }
    }
    let mut coordinates = vec![JetExpr::zero(); cohomology.dim];
    for unit in &units {
        let vector: Vec<BigRational> = simplices
            .iter()
            .map(|s| {
                let e = cochain.value(s).expect("total");
                constant_components(e)
                    .expect("checked above")
                    .into_iter()
                    .find(|(u, _)| u == unit)
                    .map(|(_, c)| c)
                    .unwrap_or_else(BigRational::zero)
            })
            .collect();
        let coords = cohomology.class_coordinates(&vector).ok_or_else(|| {
            CechError::InvalidPresentation(
                "constant cochain is not a cocycle on the nerve".into(),
            )
        })?;
        for (k, c) in coords.into_iter().enumerate() {
            coordinates[k] = coordinates[k].add(&unit.scale(&c));
        }
    }
    let trivial = coordinates.iter().all(|c| c.is_zero());
    Ok(CechClass {
        degree: q,
        dim: cohomology.dim,
        coordinates,
        trivial,
    })
}

/// How the currents `nu_ij` with `d_H nu_ij = lambda_i - lambda_j` are
/// obtained.
pub enum NuSupply<'a> {
    /// Constructive recovery; single base coordinate only.
    Construct,
    /// User-supplied cochain, verified entry by entry.
    Supplied(&'a Cochain<Current>),
}

/// Report of the Lagrangian obstruction-class extraction.
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    /// Verification verdicts for `d_H nu_ij = lambda_ij` per edge.
    pub nu_verified: Vec<(Simplex, Verdict)>,
    /// The constant 2-cochain after reduction.
    pub constants: Cochain<JetExpr>,
    pub class: CechClass,
}

/// The obstruction class of a presentation: currents on double overlaps,
/// constants on triple overlaps, then the class of `(d nu)_{ijk}` in `H^2`.
/// Trivial iff a global Lagrangian exists for the presentation at nerve
/// level.
pub fn obstruction_class(
    p: &Presentation,
    nu: NuSupply,
    reducer: &ConstantReducer,
) -> Result<ObstructionReport, CechError> {
    let cover = p.cover();
    let sig = cover.sig();
    let report = validate_presentation(p);
    if !report.valid.is_zero() {
        return Err(CechError::InvalidPresentation(
            "the defining property fails on some overlap".into(),
        ));
    }
    let lambda_diff = p.lagrangian_cochain().coboundary(cover);
    let nu_cochain: Cochain<Current> = match nu {
        NuSupply::Supplied(c) => {
            if c.degree() != 1 {
                return Err(CechError::Precondition {
                    name: "nu cochain".into(),
                    detail: format!("expected degree 1, got {}", c.degree()),
                });
            }
            c.clone()
        }
        NuSupply::Construct => {
            if sig.base_count() != 1 {
                return Err(CechError::UnsupportedBase(sig.base_count()));
            }
            lambda_diff.try_map(|_, l| varcalc::dh_potential(l).map_err(CechError::Calc))?
        }
    };
    let mut nu_verified = Vec::new();
    for (s, l) in lambda_diff.entries() {
        let candidate = nu_cochain
            .value(s)
            .ok_or_else(|| CechError::NotTotal(1))?;
        let verdict = varcalc::dh_verify(l, candidate)?;
        nu_verified.push((s.clone(), verdict));
        if !verdict.is_zero() {
            return Err(CechError::Precondition {
                name: "horizontal potential".into(),
                detail: format!("d_H nu != lambda_i - lambda_j on {s:?}"),
            });
        }
    }
    if sig.base_count() != 1 {
        return Err(CechError::UnsupportedBase(sig.base_count()));
    }
    let two = nu_cochain.coboundary(cover);
    let scalars = two.map(|c: &Current| c.component(0).clone());
    let constants = reduce_to_constants(&scalars, sig, reducer)?;
    let cohomology = nerve_cohomology(cover, 2);
    let class = constant_cochain_class(&constants, cover, &cohomology)?;
    Ok(ObstructionReport {
        nu_verified,
        constants,
        class,
    })
}

/// Report of the conserved-current obstruction.
#[derive(Debug, Clone)]
pub struct CurrentObstructionReport {
    /// Per-set verdicts for the boundary contract `L_Xi lambda_i = d_H beta_i`.
    pub boundary_contract: Vec<(usize, Verdict)>,
    /// Closedness `D (diff) = 0` per edge (sanity, implied by the theory).
    pub closed: Vec<(Simplex, Verdict)>,
    pub constants: Cochain<JetExpr>,
    pub class: CechClass,
    /// When trivial: the glued conserved current per set.
    pub glued: Option<Vec<Current>>,
}

/// The class deciding whether the local conserved currents
/// `eps(lambda_i, Xi) - beta_i` are restrictions of a global one; for a
/// single base coordinate the differences reduce to constants on overlaps and
/// the class lives in `H^1(nerve)`.
pub fn current_obstruction(
    p: &Presentation,
    field: &ProjectableField,
    beta: Option<&Cochain<Current>>,
    reducer: &ConstantReducer,
) -> Result<CurrentObstructionReport, CechError> {
    let cover = p.cover();
    let sig = cover.sig();
    if sig.base_count() != 1 {
        return Err(CechError::UnsupportedBase(sig.base_count()));
    }
    let cfg = ZeroCfg::default();
    // The presentation must be valid and the field a symmetry of its
    // (global) Euler-Lagrange form.
    let report = validate_presentation(p);
    if !report.valid.is_zero() {
        return Err(CechError::InvalidPresentation(
            "the defining property fails on some overlap".into(),
        ));
    }
    let sym = varcalc::is_symmetry(p.eta(0), field)?;
    if !sym.is_zero() {
        return Err(CechError::Precondition {
            name: "symmetry".into(),
            detail: "the field is not a symmetry of the Euler-Lagrange form".into(),
        });
    }
    // Conserved local currents: eps_i - beta_i with d_H beta_i = L_Xi lambda_i.
    let mut boundary_contract = Vec::new();
    let mut conserved = Vec::new();
    for i in 0..cover.set_count() {
        let eps = varcalc::noether_current(p.lagrangian(i), field)?;
        let lie = varcalc::var_lie_density(p.lagrangian(i), field)?;
        let beta_i = match beta {
            Some(c) => c
                .value(&vec![i])
                .cloned()
                .ok_or(CechError::NotTotal(0))?,
            None => Current::zero(sig.clone()),
        };
        let residual = lie.density().sub(&beta_i.divergence().map_err(CechError::Expr)?);
        let verdict = residual.zero_verdict_with(sig, &cfg);
        boundary_contract.push((i, verdict));
        if !verdict.is_zero() {
            return Err(CechError::Precondition {
                name: "boundary current".into(),
                detail: format!(
                    "L_Xi lambda_{i} = d_H beta_{i} is unsatisfied on set `{}`",
                    cover.sets()[i].name
                ),
            });
        }
        conserved.push(eps.sub(&beta_i));
    }
    let conserved_cochain = Cochain::from_vertex_values(cover, conserved.clone())?;
    let diffs = conserved_cochain.coboundary(cover);
    let scalars = diffs.map(|c: &Current| c.component(0).clone());
    // Sanity: each difference is horizontally closed.
    let mut closed = Vec::new();
    for (s, e) in scalars.entries() {
        let d = e
            .total_derivative(0, sig)
            .map_err(CechError::Expr)?;
        closed.push((s.clone(), d.zero_verdict_with(sig, &cfg)));
    }
    let constants = reduce_to_constants(&scalars, sig, reducer)?;
    let cohomology = nerve_cohomology(cover, 1);
    let class = constant_cochain_class(&constants, cover, &cohomology)?;
    // When trivial, solve d k = diff for a constant 0-cochain and glue.
    let glued = if class.trivial {
        let simplices1 = cover.simplices_of_degree(1);
        let d0 = cover.coboundary_matrix(0);
        // Componentwise over constant monomials.
        let mut units: Vec<JetExpr> = Vec::new();
        for (_, e) in constants.entries() {
            for (u, _) in constant_components(e)? {
                if !units.contains(&u) {
                    units.push(u);
                }
            }
        }
        let mut shifts = vec![JetExpr::zero(); cover.set_count()];
        let mut ok = true;
        for unit in &units {
            let vector: Vec<BigRational> = simplices1
                .iter()
                .map(|s| {
                    constant_components(constants.value(s).expect("total"))
                        .expect("constant")
                        .into_iter()
                        .find(|(u, _)| u == unit)
                        .map(|(_, c)| c)
                        .unwrap_or_else(BigRational::zero)
                })
                .collect();
            match d0.solve(&vector) {
                Some(k) => {
                    for (i, c) in k.into_iter().enumerate() {
                        shifts[i] = shifts[i].add(&unit.scale(&c));
                    }
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            Some(
                (0..cover.set_count())
                    .map(|i| {
                        let shift =
                            Current::new(sig.clone(), vec![shifts[i].clone()]).expect("n = 1");
                        conserved[i].sub(&shift)
                    })
                    .collect(),
            )
        } else {
            None
        }
    } else {
        None
    };
    Ok(CurrentObstructionReport {
        boundary_contract,
        closed,
        constants,
        class,
        glued,
    })
}

/// Report of the trivialization checks: the variational Lie derivative turns
/// the obstruction classes of a presentation into trivial ones.
#[derive(Debug, Clone)]
pub struct TrivializationReport {
    /// (a) per set: `E_n(L_Xi lambda_i) = E_n(Xi_V . eta)` and `= L_Xi eta`.
    pub euler_lagrange_match: Vec<(usize, Verdict)>,
    /// (b) the obstruction class of the Lie-derived presentation.
    pub derived_class: Option<CechClass>,
    /// (c) per set: `d_H(L_Xi nu_i) = L_Xi mu` for a supplied variationally
    /// trivial pair.
    pub divergence_match: Option<Vec<(usize, Verdict)>>,
    pub verdict: Verdict,
}

/// Inputs for the Corollary-2 path: a global variationally trivial
/// Lagrangian and its 0-cochain of potentials.
pub struct TrivialPair<'a> {
    pub mu: &'a Lagrangian,
    pub potentials: &'a Cochain<Current>,
}

pub fn trivialization_check(
    p: &Presentation,
    field: &ProjectableField,
    nu: Option<&Cochain<Current>>,
    pair: Option<TrivialPair<'_>>,
    reducer: &ConstantReducer,
) -> Result<TrivializationReport, CechError> {
    let cover = p.cover();
    let sig = cover.sig();
    let cfg = ZeroCfg::default();

    // (a) The Euler-Lagrange form of every Lie-derived local Lagrangian
    // equals the Euler-Lagrange form of the global contraction.
    let contraction = varcalc::contract_source(p.eta(0), field)?;
    let global_el = varcalc::euler_lagrange(&contraction)?;
    let mut euler_lagrange_match = Vec::new();
    let mut lie_lagrangians = Vec::new();
    for i in 0..cover.set_count() {
        let lie = varcalc::var_lie_density(p.lagrangian(i), field)?;
        let el = varcalc::euler_lagrange(&lie)?;
        let verdict = el.sub(&global_el).zero_verdict_with(&cfg);
        euler_lagrange_match.push((i, verdict));
        lie_lagrangians.push(lie);
    }

    // (b) The Lie-derived presentation has trivial obstruction class. The
    // potentials are the Lie derivatives of the supplied ones.
    let derived_class = match nu {
        None => None,
        Some(nu) => {
            let derived = Presentation::new(cover.clone(), lie_lagrangians.clone())?;
            let lie_nu =
                nu.try_map(|_, c| varcalc::var_lie_current(c, field).map_err(CechError::Calc))?;
            let report = obstruction_class(&derived, NuSupply::Supplied(&lie_nu), reducer)?;
            Some(report.class)
        }
    };

    // (c) Corollary 2: divergence equations of the Lie-derived potentials
    // agree with the Lie derivative of the trivial Lagrangian.
    let divergence_match = match pair {
        None => None,
        Some(TrivialPair { mu, potentials }) => {
            let lie_mu = varcalc::var_lie_density(mu, field)?;
            let mut out = Vec::new();
            for i in 0..cover.set_count() {
                let nu_i = potentials
                    .value(&vec![i])
                    .ok_or(CechError::NotTotal(0))?;
                let lie_nu = varcalc::var_lie_current(nu_i, field)?;
                let residual = lie_nu
                    .divergence()
                    .map_err(CechError::Expr)?
                    .sub(lie_mu.density());
                out.push((i, residual.zero_verdict_with(sig, &cfg)));
            }
            Some(out)
        }
    };

    let mut verdict = Verdict::combine_all(euler_lagrange_match.iter().map(|(_, v)| *v));
    if let Some(class) = &derived_class {
        if !class.trivial {
            verdict = verdict.combine(Verdict::NonZero);
        }
    }
    if let Some(checks) = &divergence_match {
        verdict = verdict.combine(Verdict::combine_all(checks.iter().map(|(_, v)| *v)));
    }
    Ok(TrivializationReport {
        euler_lagrange_match,
        derived_class,
        divergence_match,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    fn mech_sig() -> Arc<Signature> {
        Arc::new(Signature::new(vec!["t".into()], vec!["u".into()], 4).unwrap())
    }

    fn set(name: &str) -> CoverSet {
        CoverSet {
            name: name.into(),
            annotation: None,
            star_shaped: true,
        }
    }

    /// Triangle rim: three sets, three edges, no triple overlap.
    fn circle_cover(sig: Arc<Signature>) -> Arc<Cover> {
        Arc::new(
            Cover::new(
                sig,
                vec![set("S0"), set("S1"), set("S2")],
                vec![
                    vec![0],
                    vec![1],
                    vec![2],
                    vec![0, 1],
                    vec![0, 2],
                    vec![1, 2],
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn nerve_validation() {
        let sig = mech_sig();
        // Missing face is rejected.
        let err = Cover::new(
            sig.clone(),
            vec![set("A"), set("B")],
            vec![vec![0], vec![0, 1]],
        );
        assert!(err.is_err());
        // Non-increasing indices are rejected.
        let err = Cover::new(sig.clone(), vec![set("A"), set("B")], vec![vec![1, 0]]);
        assert!(err.is_err());
    }

    #[test]
    fn coboundary_of_vertex_cochain() {
        let sig = mech_sig();
        let cover = circle_cover(sig.clone());
        let c = Cochain::from_vertex_values(
            &cover,
            vec![JetExpr::integer(1), JetExpr::integer(5), JetExpr::integer(9)],
        )
        .unwrap();
        let d = c.coboundary(&cover);
        // (d a)_{ij} = a_j - a_i.
        assert_eq!(d.value(&vec![0, 1]).unwrap(), &JetExpr::integer(4));
        assert_eq!(d.value(&vec![0, 2]).unwrap(), &JetExpr::integer(8));
        assert_eq!(d.value(&vec![1, 2]).unwrap(), &JetExpr::integer(4));
        // d of a constant-across-sets cochain is zero.
        let c = Cochain::from_vertex_values(&cover, vec![JetExpr::integer(7); 3]).unwrap();
        assert!(c
            .coboundary(&cover)
            .entries()
            .all(|(_, v)| v.is_zero()));
    }

    #[test]
    fn coboundary_squares_to_zero() {
        // Full 2-simplex nerve so that d d lands somewhere.
        let sig = mech_sig();
        let cover = Arc::new(
            Cover::new(
                sig.clone(),
                vec![set("A"), set("B"), set("C")],
                vec![
                    vec![0],
                    vec![1],
                    vec![2],
                    vec![0, 1],
                    vec![0, 2],
                    vec![1, 2],
                    vec![0, 1, 2],
                ],
            )
            .unwrap(),
        );
        for values in [vec![q(1), q(2), q(3)], vec![q(-5), q(0), q(7)]] {
            let c = Cochain::from_vertex_values(
                &cover,
                values.into_iter().map(JetExpr::rational).collect(),
            )
            .unwrap();
            let dd = c.coboundary(&cover).coboundary(&cover);
            assert!(dd.entries().all(|(_, v)| v.is_zero()));
        }
    }

    #[test]
    fn betti_numbers() {
        let sig = mech_sig();
        // Triangle rim: b0 = 1, b1 = 1.
        let rim = circle_cover(sig.clone());
        assert_eq!(nerve_cohomology(&rim, 0).dim, 1);
        assert_eq!(nerve_cohomology(&rim, 1).dim, 1);
        // Filled triangle: b1 = 0.
        let filled = Arc::new(
            Cover::new(
                sig.clone(),
                vec![set("A"), set("B"), set("C")],
                vec![
                    vec![0],
                    vec![1],
                    vec![2],
                    vec![0, 1],
                    vec![0, 2],
                    vec![1, 2],
                    vec![0, 1, 2],
                ],
            )
            .unwrap(),
        );
        assert_eq!(nerve_cohomology(&filled, 1).dim, 0);
        // Two disjoint sets: b0 = 2.
        let disjoint = Arc::new(
            Cover::new(sig.clone(), vec![set("A"), set("B")], vec![vec![0], vec![1]]).unwrap(),
        );
        assert_eq!(nerve_cohomology(&disjoint, 0).dim, 2);
    }

    #[test]
    fn octahedron_betti_numbers() {
        // Six half-space sets, twelve edges, eight octant triangles.
        let sig = mech_sig();
        let mut simplices: Vec<Simplex> = (0..6).map(|i| vec![i]).collect();
        // Vertices: 0:+x 1:-x 2:+y 3:-y 4:+z 5:-z; antipodal pairs never meet.
        let antipodal = |a: usize, b: usize| (a / 2 == b / 2) && a != b;
        for a in 0..6 {
            for b in (a + 1)..6 {
                if !antipodal(a, b) {
                    simplices.push(vec![a, b]);
                }
            }
        }
        for a in [0, 1] {
            for b in [2, 3] {
                for c in [4, 5] {
                    let mut s = vec![a, b, c];
                    s.sort();
                    simplices.push(s);
                }
            }
        }
        let cover = Arc::new(
            Cover::new(sig.clone(), (0..6).map(|i| set(&format!("U{i}"))).collect(), simplices)
                .unwrap(),
        );
        assert_eq!(nerve_cohomology(&cover, 0).dim, 1);
        assert_eq!(nerve_cohomology(&cover, 1).dim, 0);
        assert_eq!(nerve_cohomology(&cover, 2).dim, 1);
    }

    #[test]
    fn triangle_triviality_matches_cycle_sum() {
        let sig = mech_sig();
        let rim = circle_cover(sig.clone());
        let h1 = nerve_cohomology(&rim, 1);
        // Entries ordered [01, 02, 12]; trivial iff a01 - a02 + a12 = 0.
        for (entries, expect_trivial) in [
            ([q(1), q(1), q(0)], true),
            ([q(1), q(3), q(2)], true),
            ([q(1), q(0), q(0)], false),
            ([q(2), q(-1), q(5)], false),
        ] {
            let cycle_sum = &entries[0] - &entries[1] + &entries[2];
            assert_eq!(cycle_sum.is_zero(), expect_trivial);
            assert_eq!(h1.is_trivial(&entries).unwrap(), expect_trivial);
        }
    }

    #[test]
    fn presentation_validation_and_equivalence() {
        let sig = mech_sig();
        let cover = circle_cover(sig.clone());
        let ut = JetExpr::jet(0, crate::sig::MultiIndex::new(vec![0]));
        let half = BigRational::new(1.into(), 2.into());
        let kinetic = Lagrangian::new(sig.clone(), ut.mul(&ut).scale(&half));
        // Same Lagrangian on every set: valid and global.
        let p = Presentation::new(cover.clone(), vec![kinetic.clone(); 3]).unwrap();
        let report = validate_presentation(&p);
        assert!(report.valid.is_zero());
        assert!(report.global.is_zero());
        // Shifted by d_H nu: still valid, no longer global, and equivalent.
        let u = JetExpr::fiber(0);
        let exact = u.mul(&ut).scale(&BigRational::from_integer(2.into()));
        let shifted = Lagrangian::new(sig.clone(), kinetic.density().add(&exact));
        let p2 = Presentation::new(
            cover.clone(),
            vec![shifted, kinetic.clone(), kinetic.clone()],
        )
        .unwrap();
        let report2 = validate_presentation(&p2);
        assert!(report2.valid.is_zero());
        assert!(!report2.global.is_zero());
        assert!(equivalent(&p, &p2).unwrap().is_zero());
        // Corrupted: lambda_1 += u breaks the defining property.
        let corrupted = Lagrangian::new(sig.clone(), kinetic.density().add(&u));
        let p3 = Presentation::new(
            cover.clone(),
            vec![kinetic.clone(), corrupted, kinetic.clone()],
        )
        .unwrap();
        let report3 = validate_presentation(&p3);
        assert!(!report3.valid.is_zero());
        assert!(!equivalent(&p, &p3).unwrap().is_zero());
    }

    #[test]
    fn rational_reconstruction() {
        assert_eq!(
            reconstruct_rational(0.5, 48, 1e-9).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
        assert_eq!(
            reconstruct_rational(-2.0, 48, 1e-9).unwrap(),
            BigRational::from_integer((-2).into())
        );
        assert_eq!(
            reconstruct_rational(1.0 / 12.0, 48, 1e-9).unwrap(),
            BigRational::new(1.into(), 12.into())
        );
        // Pi is not a small rational.
        assert!(reconstruct_rational(std::f64::consts::PI, 48, 1e-9).is_none());
    }

    #[test]
    fn reduce_to_constants_rejects_jets() {
        let sig = mech_sig();
        let cover = circle_cover(sig.clone());
        let ut = JetExpr::jet(0, crate::sig::MultiIndex::new(vec![0]));
        let mut values = BTreeMap::new();
        values.insert(vec![0, 1], JetExpr::integer(3));
        values.insert(vec![0, 2], ut);
        values.insert(vec![1, 2], JetExpr::integer(0));
        let c = Cochain::new(&cover, 1, values).unwrap();
        let reducer = ConstantReducer::default();
        match reduce_to_constants(&c, &sig, &reducer) {
            Err(CechError::NotConstant { simplex, .. }) => assert_eq!(simplex, vec![0, 2]),
            other => panic!("expected NotConstant, got {other:?}"),
        }
    }

    #[test]
    fn constant_class_extraction() {
        // pi-multiples on the triangle rim against H^1.
        let sig = Arc::new(
            Signature::with_consts(
                vec!["t".into()],
                vec!["u".into()],
                4,
                vec![crate::sig::ConstDef {
                    name: "pi".into(),
                    value: std::f64::consts::PI,
                }],
            )
            .unwrap(),
        );
        let cover = circle_cover(sig.clone());
        let pi = JetExpr::named_const(0);
        let mut values = BTreeMap::new();
        values.insert(vec![0, 1], JetExpr::zero());
        values.insert(vec![0, 2], pi.scale(&q(2)).neg());
        values.insert(vec![1, 2], JetExpr::zero());
        let c = Cochain::new(&cover, 1, values).unwrap();
        let h1 = nerve_cohomology(&cover, 1);
        let class = constant_cochain_class(&c, &cover, &h1).unwrap();
        assert!(!class.trivial);
        // The cycle sum is 0 - (-2 pi) + 0 = 2 pi; the coordinate must be a
        // nonzero rational multiple of pi.
        assert_eq!(class.coordinates.len(), 1);
        assert!(!class.coordinates[0].is_zero());
    }
}
