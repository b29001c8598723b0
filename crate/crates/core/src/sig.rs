//! Coordinate signatures and symmetrized multi-indices.
//!
//! A signature fixes the number of base coordinates `x^mu`, fiber coordinates
//! `u^a`, the jet order cap, printable names and the table of declared named
//! constants. Jet coordinates `u^a_I` are indexed by sorted multi-indices, so
//! equality of mixed partials is built into the data rather than rewritten.

use crate::error::ExprError;

/// A symmetrized derivative multi-index: a sorted, non-decreasing tuple of
/// base-coordinate labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut indices: Vec<u8>) -> Self {
        indices.sort_unstable();
        MultiIndex(indices)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// The index `I mu`, i.e. this multi-index with one more derivative in
    /// direction `mu`, kept sorted.
    pub fn raised(&self, mu: u8) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&e| e <= mu);
        v.insert(pos, mu);
        MultiIndex(v)
    }

    /// Multiplicity of the direction `mu` in this index.
    pub fn multiplicity(&self, mu: u8) -> u32 {
        self.0.iter().filter(|&&e| e == mu).count() as u32
    }

    /// Multiset inclusion `J <= I`.
    pub fn contains(&self, sub: &MultiIndex) -> bool {
        let mut it = self.0.iter().peekable();
        for &j in &sub.0 {
            loop {
                match it.next() {
                    Some(&i) if i == j => break,
                    Some(&i) if i < j => continue,
                    _ => return false,
                }
            }
        }
        true
    }

    /// Multiset difference `I \ J`. Caller must ensure `self.contains(sub)`.
    pub fn minus(&self, sub: &MultiIndex) -> MultiIndex {
        let mut out = Vec::with_capacity(self.0.len() - sub.0.len());
        let mut jt = sub.0.iter().peekable();
        for &i in &self.0 {
            if jt.peek() == Some(&&i) {
                jt.next();
            } else {
                out.push(i);
            }
        }
        MultiIndex(out)
    }

    /// Number of ways `sub` embeds into `self` as a sub-multiset:
    /// the product over directions of `binom(mult_I(mu), mult_J(mu))`.
    pub fn embeddings(&self, sub: &MultiIndex) -> u64 {
        let mut count = 1u64;
        let mut mu_seen = Vec::new();
        for &mu in sub.0.iter() {
            if mu_seen.contains(&mu) {
                continue;
            }
            mu_seen.push(mu);
            count *= binom(self.multiplicity(mu) as u64, sub.multiplicity(mu) as u64);
        }
        count
    }

    /// All sorted multi-indices over `n` directions with order exactly `k`.
    pub fn all_of_order(n: usize, k: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(n: usize, k: usize, start: u8, cur: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
            if cur.len() == k {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for mu in start..n as u8 {
                cur.push(mu);
                rec(n, k, mu, cur, out);
                cur.pop();
            }
        }
        rec(n, k, 0, &mut cur, &mut out);
        out
    }

    /// All sorted multi-indices over `n` directions with order `0..=r`.
    pub fn all_up_to(n: usize, r: usize) -> Vec<MultiIndex> {
        (0..=r).flat_map(|k| Self::all_of_order(n, k)).collect()
    }
}

fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A declared named constant, opaque to differentiation. Numeric value is
/// used by evaluation and the numeric oracles only.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstDef {
    pub name: String,
    pub value: f64,
}

/// Base/fiber coordinate counts, names, order cap and named constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    base: Vec<String>,
    fiber: Vec<String>,
    consts: Vec<ConstDef>,
    order_cap: usize,
}

impl Signature {
    pub fn new(
        base: Vec<String>,
        fiber: Vec<String>,
        order_cap: usize,
    ) -> Result<Self, ExprError> {
        Self::with_consts(base, fiber, order_cap, Vec::new())
    }

    pub fn with_consts(
        base: Vec<String>,
        fiber: Vec<String>,
        order_cap: usize,
        consts: Vec<ConstDef>,
    ) -> Result<Self, ExprError> {
        if base.is_empty() || fiber.is_empty() {
            return Err(ExprError::BadSignature(
                "need at least one base and one fiber coordinate".into(),
            ));
        }
        if base.len() > u8::MAX as usize {
            return Err(ExprError::BadSignature("too many base coordinates".into()));
        }
        let mut all: Vec<&str> = base
            .iter()
            .chain(fiber.iter())
            .map(|s| s.as_str())
            .chain(consts.iter().map(|c| c.name.as_str()))
            .collect();
        all.sort_unstable();
        for w in all.windows(2) {
            if w[0] == w[1] {
                return Err(ExprError::BadSignature(format!(
                    "duplicate coordinate name `{}`",
                    w[0]
                )));
            }
        }
        for name in &all {
            if !is_valid_name(name) {
                return Err(ExprError::BadSignature(format!(
                    "invalid coordinate name `{name}`"
                )));
            }
        }
        Ok(Signature {
            base,
            fiber,
            consts,
            order_cap,
        })
    }

    pub fn base_count(&self) -> usize {
        self.base.len()
    }

    pub fn fiber_count(&self) -> usize {
        self.fiber.len()
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    /// Same signature with a different order cap.
    pub fn with_order_cap(&self, order_cap: usize) -> Signature {
        Signature {
            order_cap,
            ..self.clone()
        }
    }

    pub fn base_name(&self, mu: usize) -> &str {
        &self.base[mu]
    }

    pub fn fiber_name(&self, a: usize) -> &str {
        &self.fiber[a]
    }

    pub fn consts(&self) -> &[ConstDef] {
        &self.consts
    }

    pub fn const_name(&self, k: usize) -> &str {
        &self.consts[k].name
    }

    pub fn const_value(&self, k: usize) -> f64 {
        self.consts[k].value
    }

    pub fn base_index(&self, name: &str) -> Option<usize> {
        self.base.iter().position(|b| b == name)
    }

    pub fn fiber_index(&self, name: &str) -> Option<usize> {
        self.fiber.iter().position(|f| f == name)
    }

    pub fn const_index(&self, name: &str) -> Option<usize> {
        self.consts.iter().position(|c| c.name == name)
    }

    /// Parse a jet-index suffix such as `xx` or `ty` by greedy longest match
    /// against the declared base-coordinate names.
    pub fn parse_index_suffix(&self, suffix: &str) -> Option<MultiIndex> {
        let mut rest = suffix;
        let mut entries = Vec::new();
        'outer: while !rest.is_empty() {
            let mut candidates: Vec<usize> = (0..self.base.len()).collect();
            candidates.sort_by_key(|&i| std::cmp::Reverse(self.base[i].len()));
            for i in candidates {
                if let Some(r) = rest.strip_prefix(self.base[i].as_str()) {
                    entries.push(i as u8);
                    rest = r;
                    continue 'outer;
                }
            }
            return None;
        }
        Some(MultiIndex::new(entries))
    }

    pub fn index_suffix(&self, index: &MultiIndex) -> String {
        index
            .entries()
            .iter()
            .map(|&mu| self.base[mu as usize].as_str())
            .collect()
    }
}

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiindex_sorted_and_raised() {
        let i = MultiIndex::new(vec![1, 0, 0]);
        assert_eq!(i.entries(), &[0, 0, 1]);
        assert_eq!(i.raised(0).entries(), &[0, 0, 0, 1]);
        assert_eq!(i.order(), 3);
    }

    #[test]
    fn multiset_inclusion_difference() {
        let i = MultiIndex::new(vec![0, 0, 1]);
        let j = MultiIndex::new(vec![0, 1]);
        assert!(i.contains(&j));
        assert_eq!(i.minus(&j).entries(), &[0]);
        assert!(!j.contains(&i));
    }

    #[test]
    fn embedding_counts() {
        // I = xx, J = x: binom(2,1) = 2 ways.
        let i = MultiIndex::new(vec![0, 0]);
        let j = MultiIndex::new(vec![0]);
        assert_eq!(i.embeddings(&j), 2);
        // I = xxy, J = xy: binom(2,1)*binom(1,1) = 2.
        let i = MultiIndex::new(vec![0, 0, 1]);
        let j = MultiIndex::new(vec![0, 1]);
        assert_eq!(i.embeddings(&j), 2);
        assert_eq!(i.embeddings(&MultiIndex::empty()), 1);
    }

    #[test]
    fn enumeration() {
        // Two directions, order two: xx, xy, yy.
        assert_eq!(MultiIndex::all_of_order(2, 2).len(), 3);
        assert_eq!(MultiIndex::all_up_to(2, 2).len(), 1 + 2 + 3);
    }

    #[test]
    fn signature_validation() {
        assert!(Signature::new(vec!["x".into()], vec!["x".into()], 4).is_err());
        assert!(Signature::new(vec![], vec!["u".into()], 4).is_err());
        let sig = Signature::new(vec!["t".into()], vec!["u".into(), "v".into()], 4).unwrap();
        assert_eq!(sig.fiber_index("v"), Some(1));
        assert_eq!(sig.base_index("t"), Some(0));
    }

    #[test]
    fn index_suffix_roundtrip() {
        let sig = Signature::new(vec!["x".into(), "y".into()], vec!["u".into()], 4).unwrap();
        let i = sig.parse_index_suffix("yxx").unwrap();
        assert_eq!(i.entries(), &[0, 0, 1]);
        assert_eq!(sig.index_suffix(&i), "xxy");
        assert!(sig.parse_index_suffix("xz").is_none());
    }
}
