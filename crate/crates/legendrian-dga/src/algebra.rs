//! The free unital associative Z/2 algebra on the generating power series.
//!
//! Elements are stored at series level: a letter is a generating series
//! (`a_i`, `b_i`, `c_j`, `d_j`), a monomial is a word of letters together with
//! an explicit power of the formal variable `T`, and an element is a Z/2 set
//! of monomials. Every identity between elements is meant per coefficient of
//! `T^0..=T^K`; a monomial whose minimal `T`-degree exceeds the truncation
//! bound `K` is dropped. Minimal degrees are additive, so two elements are
//! equal per coefficient up to `T^K` iff they are equal as truncated monomial
//! sets.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// The four kinds of generating series.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum GenKind {
    A,
    B,
    C,
    D,
}

impl GenKind {
    pub fn letter(self) -> char {
        match self {
            GenKind::A => 'a',
            GenKind::B => 'b',
            GenKind::C => 'c',
            GenKind::D => 'd',
        }
    }

    /// Minimal fiber winding of a generator of this kind: `a`, `b` series
    /// start at winding 0, `c`, `d` series at winding 1.
    pub fn min_winding(self) -> u32 {
        match self {
            GenKind::A | GenKind::B => 0,
            GenKind::C | GenKind::D => 1,
        }
    }
}

/// A generating series, identified by kind and site. For `a`/`b` the site is
/// the crossing id; for `c`/`d` it is the edge-point index. Both are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Letter {
    pub kind: GenKind,
    pub site: u32,
}

impl Letter {
    pub fn new(kind: GenKind, site: u32) -> Self {
        Letter { kind, site }
    }

    pub fn min_winding(self) -> u32 {
        self.kind.min_winding()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.site)
    }
}

/// A word of generating series with an explicit `T`-power.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Monomial {
    pub word: Vec<Letter>,
    pub t_power: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial {
            word: Vec::new(),
            t_power: 0,
        }
    }

    pub fn letter(l: Letter) -> Self {
        Monomial {
            word: vec![l],
            t_power: 0,
        }
    }

    /// Minimal `T`-degree of any coefficient expansion of this monomial:
    /// the explicit `T`-power plus the minimal winding of each letter.
    pub fn weight(&self) -> u32 {
        self.t_power + self.word.iter().map(|l| l.min_winding()).sum::<u32>()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Monomial {
            word,
            t_power: self.t_power + other.t_power,
        }
    }
}

// Length-lex over (kind, site), then T-power: a deterministic order for
// canonical serialization and rendering.
impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.t_power.cmp(&other.t_power))
    }
}

/// A Z/2 linear combination of monomials, truncated at `T`-degree `trunc`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Element {
    pub monomials: BTreeSet<Monomial>,
    pub trunc: u32,
}

impl Element {
    pub fn zero(trunc: u32) -> Self {
        Element {
            monomials: BTreeSet::new(),
            trunc,
        }
    }

    pub fn one(trunc: u32) -> Self {
        let mut e = Element::zero(trunc);
        e.insert(Monomial::one());
        e
    }

    pub fn from_letter(l: Letter, trunc: u32) -> Self {
        let mut e = Element::zero(trunc);
        e.insert(Monomial::letter(l));
        e
    }

    pub fn t_power(power: u32, trunc: u32) -> Self {
        let mut e = Element::zero(trunc);
        e.insert(Monomial {
            word: Vec::new(),
            t_power: power,
        });
        e
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Z/2 insertion: adding a monomial twice cancels it.
    pub fn insert(&mut self, m: Monomial) {
        if m.weight() > self.trunc {
            return;
        }
        if !self.monomials.remove(&m) {
            self.monomials.insert(m);
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for m in &other.monomials {
            out.insert(m.clone());
        }
        out
    }

    pub fn mul(&self, other: &Element) -> Element {
        let mut out = Element::zero(self.trunc);
        for x in &self.monomials {
            for y in &other.monomials {
                out.insert(x.concat(y));
            }
        }
        out
    }

    pub fn mul_t(&self, power: u32) -> Element {
        let mut out = Element::zero(self.trunc);
        for m in &self.monomials {
            out.insert(Monomial {
                word: m.word.clone(),
                t_power: m.t_power + power,
            });
        }
        out
    }

    /// `1 + c` for the series of the given `c` point.
    pub fn one_plus(l: Letter, trunc: u32) -> Element {
        let mut e = Element::one(trunc);
        e.insert(Monomial::letter(l));
        e
    }

    /// Truncated inverse `(1 + s)^{-1} = 1 + s + s^2 + ...` of `1 + s`, where
    /// `s` must have no weight-0 part.
    pub fn one_plus_inverse(s: &Element, trunc: u32) -> Result<Element, AlgebraError> {
        if s.monomials.iter().any(|m| m.weight() == 0) {
            return Err(AlgebraError::ConstantTerm);
        }
        let mut out = Element::one(trunc);
        let mut power = Element::one(trunc);
        // s has weight >= 1, so s^j vanishes past j = trunc.
        for _ in 0..trunc {
            power = power.mul(s);
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out)
    }

    /// `(1 + c)^{±1}` for a single `c` letter.
    pub fn one_plus_c(l: Letter, inverse: bool, trunc: u32) -> Element {
        let c = Element::from_letter(l, trunc);
        if inverse {
            Element::one_plus_inverse(&c, trunc).expect("c series has no constant term")
        } else {
            Element::one_plus(l, trunc)
        }
    }

    /// Restrict to monomials with `weight <= bound` (a coarser truncation).
    pub fn truncated(&self, bound: u32) -> Element {
        let mut out = Element::zero(bound.min(self.trunc));
        for m in &self.monomials {
            out.insert(m.clone());
        }
        out
    }

    /// The words of the `T^0` coefficient: monomials with `t_power` 0 whose
    /// letters all have minimal winding 0. These are the filtration-0 words.
    pub fn low_energy_words(&self) -> Vec<Vec<Letter>> {
        self.monomials
            .iter()
            .filter(|m| m.weight() == 0)
            .map(|m| m.word.clone())
            .collect()
    }

    /// Substitute `replacement` for every occurrence of `target` in every
    /// word, re-truncating.
    pub fn substitute(&self, target: Letter, replacement: &Element) -> Element {
        let mut out = Element::zero(self.trunc);
        'mono: for m in &self.monomials {
            let mut acc = Element::t_power(m.t_power, self.trunc);
            for &l in &m.word {
                if l == target {
                    acc = acc.mul(replacement);
                } else {
                    let single = Element::from_letter(l, self.trunc);
                    acc = acc.mul(&single);
                }
                if acc.is_zero() {
                    continue 'mono;
                }
            }
            out = out.add(&acc);
        }
        out
    }

    pub fn contains_letter(&self, l: Letter) -> bool {
        self.monomials.iter().any(|m| m.word.contains(&l))
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("series has a constant term; (1 + s)^-1 requires s to start at T^1")]
    ConstantTerm,
    #[error("tame isomorphism step substitutes a generator into itself at equal winding")]
    SelfReference,
    #[error("unknown generator {0} in substitution")]
    UnknownGenerator(Letter),
}

/// One elementary substitution: the generating series `target` is replaced by
/// `replacement`; every other series is fixed. For this to be a tame
/// isomorphism per filtration level, the coefficient of `T^k` in
/// `replacement - target` must not involve the winding-`k` generator of
/// `target`; `check_step` verifies that on the truncated representation.
#[derive(Clone, Debug)]
pub struct TameStep {
    pub target: Letter,
    pub replacement: Element,
    /// Explicit inverse replacement when known. For steps of the form
    /// `y -> y + u` with `u` free of `y`, the step is its own inverse over
    /// Z/2 and this may be `None`.
    pub inverse: Option<Element>,
}

impl TameStep {
    /// `target -> target + u` with `u` not containing `target`: self-inverse.
    pub fn add(target: Letter, u: Element) -> Result<Self, AlgebraError> {
        if u.contains_letter(target) {
            return Err(AlgebraError::SelfReference);
        }
        let mut replacement = u;
        replacement.insert(Monomial::letter(target));
        Ok(TameStep {
            target,
            replacement,
            inverse: None,
        })
    }

    /// General step with an explicitly supplied inverse.
    pub fn with_inverse(target: Letter, replacement: Element, inverse: Element) -> Self {
        TameStep {
            target,
            replacement,
            inverse: Some(inverse),
        }
    }

    /// Per-coefficient tameness: the winding-`k` part of `replacement + target`
    /// must not involve a `target` generator at winding >= k. On the series
    /// representation this means every monomial of `u = replacement - target`
    /// containing `target` must have weight strictly larger than the winding
    /// the contained occurrence can realize; a sufficient check is that in
    /// every monomial of `u`, the slack `weight - min over target occurrences`
    /// is positive.
    pub fn check_step(&self) -> Result<(), AlgebraError> {
        let mut u = self.replacement.clone();
        u.insert(Monomial::letter(self.target));
        for m in &u.monomials {
            if m.word.contains(&self.target) {
                // The occurrence of `target` inside this monomial can carry
                // winding up to weight - (rest of the monomial's minimal
                // weight); it collides with the substituted coefficient iff
                // the rest contributes nothing.
                let rest: u32 = m.t_power
                    + m.word
                        .iter()
                        .map(|l| l.min_winding())
                        .sum::<u32>()
                    - self.target.min_winding();
                if rest == 0 && m.word.len() == 1 {
                    return Err(AlgebraError::SelfReference);
                }
            }
        }
        Ok(())
    }
}

/// An ordered composition of elementary substitutions.
#[derive(Clone, Debug, Default)]
pub struct TameIso {
    pub steps: Vec<TameStep>,
}

impl TameIso {
    pub fn identity() -> Self {
        TameIso { steps: Vec::new() }
    }

    pub fn push(&mut self, step: TameStep) {
        self.steps.push(step);
    }

    /// Apply the substitutions in order.
    pub fn apply(&self, x: &Element) -> Element {
        let mut out = x.clone();
        for step in &self.steps {
            out = out.substitute(step.target, &step.replacement);
        }
        out
    }

    /// The inverse isomorphism: steps reversed, each inverted.
    pub fn inverse(&self) -> TameIso {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| match &s.inverse {
                Some(inv) => TameStep {
                    target: s.target,
                    replacement: inv.clone(),
                    inverse: Some(s.replacement.clone()),
                },
                None => s.clone(),
            })
            .collect();
        TameIso { steps }
    }
}

/// A factor of a differential term as produced by disk enumeration: either a
/// generating series or `(1 + c)^{±1}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Factor {
    Gen(Letter),
    OnePlusC { site: u32, inverse: bool },
}

/// A differential term in factored form, as the paper prints them:
/// a product of factors times `T^{t}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct FactoredTerm {
    pub factors: Vec<Factor>,
    pub t_power: u32,
}

impl FactoredTerm {
    pub fn expand(&self, trunc: u32) -> Element {
        let mut acc = Element::t_power(self.t_power, trunc);
        for f in &self.factors {
            let e = match f {
                Factor::Gen(l) => Element::from_letter(*l, trunc),
                Factor::OnePlusC { site, inverse } => {
                    Element::one_plus_c(Letter::new(GenKind::C, *site), *inverse, trunc)
                }
            };
            acc = acc.mul(&e);
        }
        acc
    }
}

/// Paper-style rendering. When `short_names` is set (single-crossing
/// diagrams), site indices are suppressed: `b(1+c)^-1 T^2`.
pub struct Renderer {
    pub short_names: bool,
}

impl Renderer {
    pub fn letter(&self, l: Letter) -> String {
        if self.short_names {
            l.kind.letter().to_string()
        } else {
            format!("{}{}", l.kind.letter(), l.site)
        }
    }

    pub fn factor(&self, f: &Factor) -> String {
        match f {
            Factor::Gen(l) => self.letter(*l),
            Factor::OnePlusC { site, inverse } => {
                let c = self.letter(Letter::new(GenKind::C, *site));
                if *inverse {
                    format!("(1+{c})^-1")
                } else {
                    format!("(1+{c})")
                }
            }
        }
    }

    pub fn factored_term(&self, t: &FactoredTerm) -> String {
        let mut s = String::new();
        for f in &t.factors {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(&self.factor(f));
        }
        match (s.is_empty(), t.t_power) {
            (true, 0) => "1".to_string(),
            (true, 1) => "T".to_string(),
            (true, p) => format!("T^{p}"),
            (false, 0) => s,
            (false, 1) => format!("{s} T"),
            (false, p) => format!("{s} T^{p}"),
        }
    }

    pub fn factored_sum(&self, terms: &[FactoredTerm]) -> String {
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut sorted = terms.to_vec();
        sorted.sort();
        sorted
            .iter()
            .map(|t| self.factored_term(t))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn monomial(&self, m: &Monomial) -> String {
        let mut s = String::new();
        for l in &m.word {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(&self.letter(*l));
        }
        match (s.is_empty(), m.t_power) {
            (true, 0) => "1".to_string(),
            (true, 1) => "T".to_string(),
            (true, p) => format!("T^{p}"),
            (false, 0) => s,
            (false, 1) => format!("{s} T"),
            (false, p) => format!("{s} T^{p}"),
        }
    }

    pub fn element(&self, e: &Element) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        e.monomials
            .iter()
            .map(|m| self.monomial(m))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(site: u32) -> Letter {
        Letter::new(GenKind::A, site)
    }
    fn b(site: u32) -> Letter {
        Letter::new(GenKind::B, site)
    }
    fn c(site: u32) -> Letter {
        Letter::new(GenKind::C, site)
    }

    #[test]
    fn unit_laws() {
        let k = 4;
        let x = Element::from_letter(a(1), k);
        assert_eq!(x.mul(&Element::one(k)), x);
        assert_eq!(Element::one(k).mul(&x), x);
    }

    #[test]
    fn z2_cancellation() {
        let k = 4;
        let x = Element::from_letter(a(1), k);
        assert!(x.add(&x).is_zero());
    }

    #[test]
    fn product_tracks_t_power() {
        let k = 4;
        let x = Element::from_letter(b(1), k);
        let y = Element::from_letter(a(1), k).mul_t(1);
        let p = x.mul(&y);
        let mono = p.monomials.iter().next().unwrap();
        assert_eq!(mono.word, vec![b(1), a(1)]);
        assert_eq!(mono.t_power, 1);
    }

    #[test]
    fn one_plus_c_inverse_degree_two() {
        // K = 2: (1+c)^{-1} = 1 + c + cc, and c^2 has weight 2.
        let k = 2;
        let inv = Element::one_plus_c(c(1), true, k);
        let mut expected = Element::one(k);
        expected.insert(Monomial::letter(c(1)));
        expected.insert(Monomial {
            word: vec![c(1), c(1)],
            t_power: 0,
        });
        assert_eq!(inv, expected);
    }

    #[test]
    fn one_plus_c_inverse_degree_zero_and_one() {
        assert_eq!(Element::one_plus_c(c(1), true, 0), Element::one(0));
        let k = 1;
        let mut expected = Element::one(k);
        expected.insert(Monomial::letter(c(1)));
        assert_eq!(Element::one_plus_c(c(1), true, k), expected);
    }

    #[test]
    fn inverse_is_two_sided_up_to_truncation() {
        for k in 0..=6 {
            let inv = Element::one_plus_c(c(2), true, k);
            let fwd = Element::one_plus_c(c(2), false, k);
            assert_eq!(inv.mul(&fwd), Element::one(k), "right inverse at K={k}");
            assert_eq!(fwd.mul(&inv), Element::one(k), "left inverse at K={k}");
        }
    }

    #[test]
    fn constant_term_rejected() {
        let k = 3;
        let s = Element::one(k);
        assert_eq!(
            Element::one_plus_inverse(&s, k),
            Err(AlgebraError::ConstantTerm)
        );
    }

    #[test]
    fn tame_step_applies_substitution() {
        // a1 -> a1 + b3 b2 T^n with n = 2.
        let k = 4;
        let u = Element::from_letter(b(3), k).mul(&Element::from_letter(b(2), k)).mul_t(2);
        let step = TameStep::add(a(1), u.clone()).unwrap();
        let mut iso = TameIso::identity();
        iso.push(step);
        let image = iso.apply(&Element::from_letter(a(1), k));
        let mut expected = u;
        expected.insert(Monomial::letter(a(1)));
        assert_eq!(image, expected);
        // Identity elsewhere.
        let other = Element::from_letter(b(1), k);
        assert_eq!(iso.apply(&other), other);
    }

    #[test]
    fn series_step_roundtrip() {
        // a -> a (1+c)^{-1}, inverse a -> a (1+c).
        let k = 4;
        let fwd = Element::from_letter(a(1), k).mul(&Element::one_plus_c(c(1), true, k));
        let bwd = Element::from_letter(a(1), k).mul(&Element::one_plus_c(c(1), false, k));
        let mut iso = TameIso::identity();
        iso.push(TameStep::with_inverse(a(1), fwd, bwd));
        let x = Element::from_letter(a(1), k)
            .mul(&Element::from_letter(b(1), k))
            .add(&Element::from_letter(a(1), k).mul_t(1));
        let roundtrip = iso.inverse().apply(&iso.apply(&x));
        assert_eq!(roundtrip, x);
    }

    #[test]
    fn render_paper_style() {
        let r = Renderer { short_names: true };
        let t = FactoredTerm {
            factors: vec![
                Factor::Gen(b(1)),
                Factor::OnePlusC {
                    site: 1,
                    inverse: true,
                },
            ],
            t_power: 2,
        };
        assert_eq!(r.factored_term(&t), "b (1+c)^-1 T^2");
    }

    fn arb_letter() -> impl Strategy<Value = Letter> {
        (0..4u8, 1..4u32).prop_map(|(k, s)| {
            let kind = match k {
                0 => GenKind::A,
                1 => GenKind::B,
                2 => GenKind::C,
                _ => GenKind::D,
            };
            Letter::new(kind, s)
        })
    }

    fn arb_element(k: u32) -> impl Strategy<Value = Element> {
        proptest::collection::vec(
            (proptest::collection::vec(arb_letter(), 0..4), 0..3u32),
            0..6,
        )
        .prop_map(move |monos| {
            let mut e = Element::zero(k);
            for (word, t_power) in monos {
                e.insert(Monomial { word, t_power });
            }
            e
        })
    }

    proptest! {
        #[test]
        fn prop_associative(x in arb_element(5), y in arb_element(5), z in arb_element(5)) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }

        #[test]
        fn prop_distributive(x in arb_element(5), y in arb_element(5), z in arb_element(5)) {
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        }

        #[test]
        fn prop_char_two(x in arb_element(5)) {
            prop_assert!(x.add(&x).is_zero());
        }

        #[test]
        fn prop_one_plus_inverse(k in 0..=6u32, site in 1..4u32) {
            let inv = Element::one_plus_c(Letter::new(GenKind::C, site), true, k);
            let fwd = Element::one_plus_c(Letter::new(GenKind::C, site), false, k);
            prop_assert_eq!(inv.mul(&fwd), Element::one(k));
            prop_assert_eq!(fwd.mul(&inv), Element::one(k));
        }

        #[test]
        fn prop_tame_add_step_roundtrip(x in arb_element(5), u in arb_element(5)) {
            // Restrict u to words not containing the target.
            let target = Letter::new(GenKind::A, 1);
            let mut clean = Element::zero(5);
            for m in &u.monomials {
                if !m.word.contains(&target) {
                    clean.insert(m.clone());
                }
            }
            let mut iso = TameIso::identity();
            iso.push(TameStep::add(target, clean).unwrap());
            prop_assert_eq!(iso.inverse().apply(&iso.apply(&x)), x);
        }

        #[test]
        fn prop_weight_multiplicative(x in arb_element(8), y in arb_element(8)) {
            // Filtration multiplicativity: minimal weights add.
            let p = x.mul(&y);
            for m in &p.monomials {
                let min_possible = x.monomials.iter().map(|a| a.weight()).min().unwrap_or(0)
                    + y.monomials.iter().map(|b| b.weight()).min().unwrap_or(0);
                prop_assert!(m.weight() >= min_possible);
            }
        }
    }
}
