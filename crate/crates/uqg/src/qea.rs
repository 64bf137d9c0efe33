//! The interpolated quantized enveloping algebra: words, straightening,
//! star, the torus projection, and Serre-ideal weight components.
//!
//! Provides:
//! - `AlgebraCtx`: root datum plus the two sign characters entering the
//!   interpolated commutator relation.
//! - `AlgElem`: finite sums of triangular monomials `F-word * E-word * K_mu`
//!   with Laurent-fraction coefficients, in canonical form.
//! - `straighten`: deterministic rewriting of free generator words to
//!   triangular shape using the torus-commutation and interpolated
//!   commutator relations.
//! - `mul`, `star`, `tau` (projection onto the torus subalgebra along
//!   triangular monomials with letters), and `chi_lambda` (evaluation of a
//!   torus element under a weight character).
//! - `serre_component`: row-reduced bases of the weight components of the
//!   one-sided Serre ideals, plus `SerreReducer` for deciding equality
//!   modulo the two-sided Serre ideal weight-block-wise.
//! - `RescaleMap`: the diagonal generator rescaling onto the all-plus
//!   algebra in the positive-parameter case, when the required roots are
//!   rational.
//!
//! Terms are keyed by the tuple (E-word, K-point, F-word); the key order is
//! the canonical sort order for text output, while the monomial it names is
//! the product with the F letters leftmost, then the E letters, then `K`.
//! With this shape the torus projection is term-wise and the product of a
//! starred lowering word with a lowering word straightens into the torus
//! terms that drive the Hermitian form.

use crate::linalg::SparseRowSpace;
use crate::root_data::{EpsChar, LambdaChar, RootDatum, RootVec, Weight};
use crate::scalars::{rat_i, rational_nth_root, LaurentFrac, Rat};
use num::{One, Signed, Zero};
use rand::Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

/// Errors from algebra-level operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QeaError {
    ContextMismatch,
    /// An operation requiring a torus-only element met letters.
    NonTorus,
    /// Rescaling requires strictly positive parameters on both sides.
    MixedSigns(String),
    /// A required 4th/2nd root is not rational.
    NonRepresentableRoot(String),
    /// A weight or degree exceeded the requested bound.
    BoundExceeded { bound: i64 },
}

impl fmt::Display for QeaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QeaError::ContextMismatch => write!(f, "mismatched algebra contexts"),
            QeaError::NonTorus => write!(f, "element has E or F letters"),
            QeaError::MixedSigns(s) => write!(f, "sign obstruction: {s}"),
            QeaError::NonRepresentableRoot(s) => write!(f, "non-representable root: {s}"),
            QeaError::BoundExceeded { bound } => write!(f, "weight exceeds bound {bound}"),
        }
    }
}

impl std::error::Error for QeaError {}

/// Generator symbol of the free word algebra.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Gen {
    /// Raising generator for a simple root.
    E(usize),
    /// Lowering generator for a simple root.
    F(usize),
    /// Torus generator for a weight-lattice point.
    K(Weight),
}

/// Root datum together with the two interpolation characters.
#[derive(Clone, Debug)]
pub struct AlgebraCtx {
    pub datum: Rc<RootDatum>,
    pub eps: EpsChar,
    pub eta: EpsChar,
}

impl PartialEq for AlgebraCtx {
    fn eq(&self, other: &Self) -> bool {
        self.datum.series == other.datum.series
            && self.datum.rank == other.datum.rank
            && self.datum.exp_denom == other.datum.exp_denom
            && self.eps == other.eps
            && self.eta == other.eta
    }
}

impl AlgebraCtx {
    pub fn new(datum: Rc<RootDatum>, eps: EpsChar, eta: EpsChar) -> Rc<Self> {
        assert_eq!(eps.values.len(), datum.rank, "one left sign per node");
        assert_eq!(eta.values.len(), datum.rank, "one right sign per node");
        Rc::new(AlgebraCtx { datum, eps, eta })
    }

    /// Context with both characters all-plus over the same datum.
    pub fn standard(datum: Rc<RootDatum>) -> Rc<Self> {
        let rank = datum.rank;
        AlgebraCtx::new(datum, EpsChar::plus(rank), EpsChar::plus(rank))
    }

    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    pub fn eps_r(&self, r: usize) -> &Rat {
        &self.eps.values[r]
    }

    pub fn eta_r(&self, r: usize) -> &Rat {
        &self.eta.values[r]
    }
}

/// Key of a triangular monomial: the tuple (E-word, K-point, F-word), which
/// is also the canonical sort order. The named monomial is the product
/// `F_{f_1} ... F_{f_m} E_{e_1} ... E_{e_n} K_mu`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TermKey {
    pub e: Vec<usize>,
    pub k: Weight,
    pub f: Vec<usize>,
}

impl TermKey {
    pub fn torus(mu: Weight) -> Self {
        TermKey { e: vec![], k: mu, f: vec![] }
    }

    pub fn is_torus(&self) -> bool {
        self.e.is_empty() && self.f.is_empty()
    }
}

/// Root-lattice content of an index word (one count per node).
pub fn word_content(rank: usize, word: &[usize]) -> RootVec {
    let mut n = vec![0i64; rank];
    for &r in word {
        n[r] += 1;
    }
    RootVec(n)
}

/// Weight of a monomial: raising letters add the simple root, lowering
/// letters subtract it.
pub fn term_weight(rank: usize, key: &TermKey) -> RootVec {
    word_content(rank, &key.e).sub(&word_content(rank, &key.f))
}

/// Element of the algebra in canonical triangular form.
#[derive(Clone, Debug)]
pub struct AlgElem {
    pub ctx: Rc<AlgebraCtx>,
    pub terms: BTreeMap<TermKey, LaurentFrac>,
}

impl PartialEq for AlgElem {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.terms == other.terms
    }
}

impl AlgElem {
    pub fn zero(ctx: &Rc<AlgebraCtx>) -> Self {
        AlgElem { ctx: ctx.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ctx: &Rc<AlgebraCtx>) -> Self {
        Self::k_point(ctx, Weight::zero(ctx.rank()))
    }

    pub fn k_point(ctx: &Rc<AlgebraCtx>, mu: Weight) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(TermKey::torus(mu), LaurentFrac::one());
        AlgElem { ctx: ctx.clone(), terms }
    }

    pub fn gen_e(ctx: &Rc<AlgebraCtx>, r: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            TermKey { e: vec![r], k: Weight::zero(ctx.rank()), f: vec![] },
            LaurentFrac::one(),
        );
        AlgElem { ctx: ctx.clone(), terms }
    }

    pub fn gen_f(ctx: &Rc<AlgebraCtx>, r: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            TermKey { e: vec![], k: Weight::zero(ctx.rank()), f: vec![r] },
            LaurentFrac::one(),
        );
        AlgElem { ctx: ctx.clone(), terms }
    }

    /// Monomial from explicit index words and torus point.
    pub fn monomial(ctx: &Rc<AlgebraCtx>, key: TermKey, coeff: LaurentFrac) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(key, coeff);
        }
        AlgElem { ctx: ctx.clone(), terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &AlgElem) -> AlgElem {
        assert!(*self.ctx == *other.ctx, "mismatched algebra contexts");
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            merge_term(&mut terms, k.clone(), c.clone());
        }
        AlgElem { ctx: self.ctx.clone(), terms }
    }

    pub fn sub(&self, other: &AlgElem) -> AlgElem {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> AlgElem {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect();
        AlgElem { ctx: self.ctx.clone(), terms }
    }

    pub fn scale(&self, c: &LaurentFrac) -> AlgElem {
        if c.is_zero() {
            return AlgElem::zero(&self.ctx);
        }
        let terms = self.terms.iter().map(|(k, x)| (k.clone(), x.mul(c))).collect();
        AlgElem { ctx: self.ctx.clone(), terms }
    }

    /// Product, straightened to canonical form.
    pub fn mul(&self, other: &AlgElem) -> Result<AlgElem, QeaError> {
        if *self.ctx != *other.ctx {
            return Err(QeaError::ContextMismatch);
        }
        let mut out: BTreeMap<TermKey, LaurentFrac> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            let wa = key_to_word(ka);
            for (kb, cb) in &other.terms {
                let mut word = wa.clone();
                word.extend(key_to_word(kb));
                straighten_into(&self.ctx, word, ca.mul(cb), &mut out);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(AlgElem { ctx: self.ctx.clone(), terms: out })
    }

    /// The star structure: antilinear antihomomorphism exchanging raising
    /// and lowering generators and fixing the torus (coefficients are real).
    pub fn star(&self) -> AlgElem {
        let mut out: BTreeMap<TermKey, LaurentFrac> = BTreeMap::new();
        for (key, c) in &self.terms {
            // (F_f E_e K_mu)^* = K_mu F_{rev e} E_{rev f}; straightening
            // only moves K through with scalar factors.
            let mut word = vec![Gen::K(key.k.clone())];
            word.extend(key.e.iter().rev().map(|&r| Gen::F(r)));
            word.extend(key.f.iter().rev().map(|&r| Gen::E(r)));
            straighten_into(&self.ctx, word, c.conj(), &mut out);
        }
        out.retain(|_, c| !c.is_zero());
        AlgElem { ctx: self.ctx.clone(), terms: out }
    }

    /// Projection onto the torus subalgebra along monomials with letters.
    pub fn tau(&self) -> AlgElem {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.is_torus())
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        AlgElem { ctx: self.ctx.clone(), terms }
    }

    /// Evaluate a torus-only element under a weight character.
    pub fn chi_lambda(&self, lambda: &LambdaChar) -> Result<LaurentFrac, QeaError> {
        let mut acc = LaurentFrac::zero();
        for (key, c) in &self.terms {
            if !key.is_torus() {
                return Err(QeaError::NonTorus);
            }
            acc = acc.add(&c.mul(&lambda.value_symbolic(&self.ctx.datum, &key.k)));
        }
        Ok(acc)
    }

    /// Terms grouped by monomial weight.
    pub fn weight_components(&self) -> BTreeMap<RootVec, AlgElem> {
        let mut out: BTreeMap<RootVec, AlgElem> = BTreeMap::new();
        for (k, c) in &self.terms {
            let w = term_weight(self.ctx.rank(), k);
            out.entry(w)
                .or_insert_with(|| AlgElem::zero(&self.ctx))
                .terms
                .insert(k.clone(), c.clone());
        }
        out
    }
}

impl fmt::Display for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (key, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for &r in &key.f {
                write!(f, "*F{}", r + 1)?;
            }
            for &r in &key.e {
                write!(f, "*E{}", r + 1)?;
            }
            write!(f, "*K[")?;
            for (i, m) in key.k.0.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{m}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

fn merge_term(terms: &mut BTreeMap<TermKey, LaurentFrac>, key: TermKey, c: LaurentFrac) {
    if c.is_zero() {
        return;
    }
    match terms.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add(&c);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Expand a term key into its monomial as a free word (product order).
pub fn key_to_word(key: &TermKey) -> Vec<Gen> {
    let mut w: Vec<Gen> = key.f.iter().map(|&r| Gen::F(r)).collect();
    w.extend(key.e.iter().map(|&r| Gen::E(r)));
    if !key.k.is_zero() {
        w.push(Gen::K(key.k.clone()));
    }
    w
}

/// `v`-exponent of `q^{sign * (mu, alpha_r) / 2}`.
fn half_pairing_exp(datum: &RootDatum, mu: &Weight, r: usize, sign: i64) -> i64 {
    // exp_denom is a multiple of 4, so the division by 2 is exact.
    sign * datum.exp_denom * mu.0[r] * datum.sym[r] / 2
}

/// `q^{sign * (mu, alpha_r) / 2}` as a `v`-monomial.
fn half_pairing_pow(datum: &RootDatum, mu: &Weight, r: usize, sign: i64) -> LaurentFrac {
    LaurentFrac::monomial(half_pairing_exp(datum, mu, r, sign), Rat::one())
}

/// Leftmost reducible position in a word, if any.
fn first_redex(word: &[Gen]) -> Option<usize> {
    word.windows(2).position(|pair| {
        matches!(
            (&pair[0], &pair[1]),
            (Gen::K(_), Gen::K(_))
                | (Gen::K(_), Gen::E(_))
                | (Gen::K(_), Gen::F(_))
                | (Gen::E(_), Gen::F(_))
        )
    })
}

/// Merge a coefficient-weighted word into a straightening worklist.
fn push_branch(work: &mut BTreeMap<Vec<Gen>, LaurentFrac>, w: Vec<Gen>, c: LaurentFrac) {
    if c.is_zero() {
        return;
    }
    match work.entry(w) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let s = e.get().add(&c);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

/// Apply the one-position rewrite at `i`, pushing the results onto the
/// worklist.  This is the reference engine: `straighten_randomized` drives
/// it at arbitrary redex positions to cross-check the accelerated one.
fn rewrite_at(
    ctx: &AlgebraCtx,
    word: &[Gen],
    coeff: &LaurentFrac,
    i: usize,
    work: &mut BTreeMap<Vec<Gen>, LaurentFrac>,
) {
    let push = push_branch;
    match (&word[i], &word[i + 1]) {
        (Gen::K(mu), Gen::K(nu)) => {
            let mut w = word.to_vec();
            w[i] = Gen::K(mu.add(nu));
            w.remove(i + 1);
            push(work, w, coeff.clone());
        }
        (Gen::K(mu), Gen::E(r)) => {
            let c = coeff.mul(&half_pairing_pow(&ctx.datum, mu, *r, 1));
            let mut w = word.to_vec();
            w.swap(i, i + 1);
            push(work, w, c);
        }
        (Gen::K(mu), Gen::F(s)) => {
            let c = coeff.mul(&half_pairing_pow(&ctx.datum, mu, *s, -1));
            let mut w = word.to_vec();
            w.swap(i, i + 1);
            push(work, w, c);
        }
        (Gen::E(r), Gen::F(s)) => {
            let (r, s) = (*r, *s);
            let mut w = word.to_vec();
            w.swap(i, i + 1);
            push(work, w, coeff.clone());
            if r == s {
                let denom = ctx.datum.q_r_minus_inv(r);
                let alpha2 = ctx.datum.simple_root_weight(r).scale(2);
                if !ctx.eps_r(r).is_zero() {
                    let c = coeff
                        .scale(ctx.eps_r(r))
                        .div(&denom)
                        .expect("q_r - q_r^{-1} is nonzero");
                    let mut w = word.to_vec();
                    w[i] = Gen::K(alpha2.clone());
                    w.remove(i + 1);
                    push(work, w, c);
                }
                if !ctx.eta_r(r).is_zero() {
                    let c = coeff
                        .scale(&-ctx.eta_r(r))
                        .div(&denom)
                        .expect("q_r - q_r^{-1} is nonzero");
                    let mut w = word.to_vec();
                    w[i] = Gen::K(alpha2.scale(-1));
                    w.remove(i + 1);
                    push(work, w, c);
                }
            }
        }
        _ => unreachable!("rewrite_at called on an ordered pair"),
    }
}

/// Apply an accelerated rewrite at redex position `i`: a `K` slides past
/// every `E` and `F` up to the next `K` (or the end) in one step, and an
/// `E_r` crosses a maximal run of `F` letters at once, the two contraction
/// terms carrying the geometric sum of the per-crossing powers.  Agrees
/// with iterated `rewrite_at` but visits far fewer intermediate words.
fn rewrite_run_at(
    ctx: &AlgebraCtx,
    word: &[Gen],
    coeff: &LaurentFrac,
    i: usize,
    work: &mut BTreeMap<Vec<Gen>, LaurentFrac>,
) {
    match (&word[i], &word[i + 1]) {
        (Gen::K(mu), Gen::K(nu)) => {
            let mut w = word.to_vec();
            w[i] = Gen::K(mu.add(nu));
            w.remove(i + 1);
            push_branch(work, w, coeff.clone());
        }
        (Gen::K(mu), _) => {
            let mut exp = 0i64;
            let mut j = i + 1;
            while j < word.len() {
                match &word[j] {
                    Gen::E(r) => exp += half_pairing_exp(&ctx.datum, mu, *r, 1),
                    Gen::F(s) => exp += half_pairing_exp(&ctx.datum, mu, *s, -1),
                    Gen::K(_) => break,
                }
                j += 1;
            }
            let mut w = Vec::with_capacity(word.len());
            w.extend_from_slice(&word[..i]);
            w.extend_from_slice(&word[i + 1..j]);
            if let Some(Gen::K(nu)) = word.get(j) {
                w.push(Gen::K(mu.add(nu)));
                w.extend_from_slice(&word[j + 1..]);
            } else {
                w.push(Gen::K(mu.clone()));
            }
            push_branch(work, w, coeff.mul(&LaurentFrac::monomial(exp, Rat::one())));
        }
        (Gen::E(r), Gen::F(s)) => {
            let r = *r;
            if *s != r {
                // F letters with a different node index commute with E_r.
                let mut j = i + 1;
                while matches!(word.get(j), Some(Gen::F(t)) if *t != r) {
                    j += 1;
                }
                let mut w = Vec::with_capacity(word.len());
                w.extend_from_slice(&word[..i]);
                w.extend_from_slice(&word[i + 1..j]);
                w.push(Gen::E(r));
                w.extend_from_slice(&word[j..]);
                push_branch(work, w, coeff.clone());
                return;
            }
            let mut j = i + 1;
            while matches!(word.get(j), Some(Gen::F(t)) if *t == r) {
                j += 1;
            }
            let m = (j - i - 1) as i64;
            let mut w = Vec::with_capacity(word.len());
            w.extend_from_slice(&word[..i]);
            w.extend_from_slice(&word[i + 1..j]);
            w.push(Gen::E(r));
            w.extend_from_slice(&word[j..]);
            push_branch(work, w, coeff.clone());
            let denom = ctx.datum.q_r_minus_inv(r);
            let alpha2 = ctx.datum.simple_root_weight(r).scale(2);
            for (kw, scalar) in
                [(alpha2.clone(), ctx.eps_r(r).clone()), (alpha2.scale(-1), -ctx.eta_r(r))]
            {
                if scalar.is_zero() {
                    continue;
                }
                // Crossing the t trailing F's scales K_{kw} by a power whose
                // geometric sum over t = 0..m is the contraction coefficient.
                let step = half_pairing_exp(&ctx.datum, &kw, r, -1);
                let mut gsum = LaurentFrac::zero();
                for t in 0..m {
                    gsum = gsum.add(&LaurentFrac::monomial(step * t, Rat::one()));
                }
                let c = coeff
                    .scale(&scalar)
                    .mul(&gsum)
                    .div(&denom)
                    .expect("q_r - q_r^{-1} is nonzero");
                let mut w = Vec::with_capacity(word.len());
                w.extend_from_slice(&word[..i]);
                w.extend_from_slice(&word[i + 1..j - 1]);
                w.push(Gen::K(kw));
                w.extend_from_slice(&word[j..]);
                push_branch(work, w, c);
            }
        }
        _ => unreachable!("rewrite_run_at called on an ordered pair"),
    }
}

/// Straighten one coefficient-weighted word into the accumulator, rewriting
/// the leftmost reducible pair first. Intermediate words are deduplicated
/// so coefficients of coinciding branches merge early.
pub fn straighten_into(
    ctx: &AlgebraCtx,
    word: Vec<Gen>,
    coeff: LaurentFrac,
    out: &mut BTreeMap<TermKey, LaurentFrac>,
) {
    if coeff.is_zero() {
        return;
    }
    let mut work: BTreeMap<Vec<Gen>, LaurentFrac> = BTreeMap::new();
    work.insert(word, coeff);
    while let Some((w, c)) = work.pop_first() {
        if c.is_zero() {
            continue;
        }
        match first_redex(&w) {
            Some(i) => rewrite_run_at(ctx, &w, &c, i, &mut work),
            None => merge_term(out, normal_word_to_key(ctx.rank(), &w), c),
        }
    }
}

/// Straighten a free word to a canonical element.
pub fn straighten(ctx: &Rc<AlgebraCtx>, word: Vec<Gen>) -> AlgElem {
    let mut terms = BTreeMap::new();
    straighten_into(ctx, word, LaurentFrac::one(), &mut terms);
    terms.retain(|_, c| !c.is_zero());
    AlgElem { ctx: ctx.clone(), terms }
}

/// Straighten picking a random reducible position at every step; must agree
/// with the deterministic order (used as a confluence check).
pub fn straighten_randomized<R: Rng>(ctx: &Rc<AlgebraCtx>, word: Vec<Gen>, rng: &mut R) -> AlgElem {
    let mut out: BTreeMap<TermKey, LaurentFrac> = BTreeMap::new();
    let mut work: Vec<(Vec<Gen>, LaurentFrac)> = vec![(word, LaurentFrac::one())];
    while let Some((w, c)) = work.pop() {
        if c.is_zero() {
            continue;
        }
        let redexes: Vec<usize> = (0..w.len().saturating_sub(1))
            .filter(|&i| first_redex(&w[i..=i + 1]).is_some())
            .collect();
        if redexes.is_empty() {
            merge_term(&mut out, normal_word_to_key(ctx.rank(), &w), c);
            continue;
        }
        let i = redexes[rng.gen_range(0..redexes.len())];
        let mut branched: BTreeMap<Vec<Gen>, LaurentFrac> = BTreeMap::new();
        rewrite_at(ctx, &w, &c, i, &mut branched);
        work.extend(branched);
    }
    out.retain(|_, c| !c.is_zero());
    AlgElem { ctx: ctx.clone(), terms: out }
}

/// Parse an irreducible word (F letters, then E letters, then at most one K).
fn normal_word_to_key(rank: usize, word: &[Gen]) -> TermKey {
    let mut f = Vec::new();
    let mut e = Vec::new();
    let mut k = Weight::zero(rank);
    let mut iter = word.iter().peekable();
    while let Some(Gen::F(r)) = iter.peek() {
        f.push(*r);
        iter.next();
    }
    while let Some(Gen::E(r)) = iter.peek() {
        e.push(*r);
        iter.next();
    }
    if let Some(Gen::K(mu)) = iter.peek() {
        k = mu.clone();
        iter.next();
    }
    assert!(iter.next().is_none(), "word not in normal shape: {word:?}");
    TermKey { e, k, f }
}

/// Random word over the generators (letters only; torus points from the
/// fundamental weights and their negatives), for randomized checks.
pub fn random_word<R: Rng>(ctx: &AlgebraCtx, len: usize, rng: &mut R) -> Vec<Gen> {
    let rank = ctx.rank();
    (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 => Gen::E(rng.gen_range(0..rank)),
            1 => Gen::F(rng.gen_range(0..rank)),
            2 => {
                let r = rng.gen_range(0..rank);
                Gen::K(Weight::fundamental(rank, r))
            }
            _ => {
                let r = rng.gen_range(0..rank);
                Gen::K(Weight::fundamental(rank, r).scale(-1))
            }
        })
        .collect()
}

/// All words with the given root-lattice content, in lexicographic order.
pub fn words_of_content(beta: &RootVec) -> Vec<Vec<usize>> {
    let rank = beta.0.len();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(rank: usize, left: &mut Vec<i64>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.iter().all(|&x| x == 0) {
            out.push(cur.clone());
            return;
        }
        for r in 0..rank {
            if left[r] > 0 {
                left[r] -= 1;
                cur.push(r);
                rec(rank, left, cur, out);
                cur.pop();
                left[r] += 1;
            }
        }
    }
    assert!(beta.is_nonnegative());
    rec(rank, &mut beta.0.clone(), &mut cur, &mut out);
    out
}

/// One-sided Serre element for an ordered pair of distinct nodes, as a
/// sparse vector over index words.
pub fn serre_element(datum: &RootDatum, r: usize, s: usize) -> Vec<(Vec<usize>, LaurentFrac)> {
    assert_ne!(r, s);
    let n = 1 - datum.cartan[r][s];
    let mut out = Vec::new();
    for k in 0..=n {
        let mut word = vec![r; k as usize];
        word.push(s);
        word.extend(vec![r; (n - k) as usize]);
        let mut c = crate::root_data::q_binomial(datum, n, k, r);
        if k % 2 == 1 {
            c = c.neg();
        }
        out.push((word, c));
    }
    out
}

/// Which side of the algebra a Serre component lives on.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Plus,
    Minus,
}

/// Row-reduced span of the weight-`beta` component of the one-sided Serre
/// ideal, over the lexicographic word basis. The coefficients do not depend
/// on the side; the side names the letter alphabet.
pub fn serre_row_space(datum: &RootDatum, beta: &RootVec) -> SparseRowSpace<Vec<usize>, LaurentFrac> {
    let mut space = SparseRowSpace::new();
    let rank = datum.rank;
    for r in 0..rank {
        for s in 0..rank {
            if r == s {
                continue;
            }
            let rel = serre_element(datum, r, s);
            let mut core = vec![0i64; rank];
            core[r] += 1 - datum.cartan[r][s];
            core[s] += 1;
            let core = RootVec(core);
            let rest = beta.sub(&core);
            if !rest.is_nonnegative() {
                continue;
            }
            // All splits rest = left + right, with words on both sides.
            for left in sub_contents(&rest) {
                let right = rest.sub(&left);
                for u in words_of_content(&left) {
                    for w in words_of_content(&right) {
                        let mut vec: BTreeMap<Vec<usize>, LaurentFrac> = BTreeMap::new();
                        for (mid, c) in &rel {
                            let mut word = u.clone();
                            word.extend(mid);
                            word.extend(&w);
                            let e = vec.entry(word).or_insert_with(LaurentFrac::zero);
                            *e = e.add(c);
                        }
                        vec.retain(|_, c| !c.is_zero());
                        space.insert(vec);
                    }
                }
            }
        }
    }
    space
}

/// All componentwise-dominated elements of `Q^+` below `beta`.
fn sub_contents(beta: &RootVec) -> Vec<RootVec> {
    let mut out = vec![vec![]];
    for &b in &beta.0 {
        let mut next = Vec::new();
        for prefix in out {
            for k in 0..=b {
                let mut p: Vec<i64> = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out.into_iter().map(RootVec).collect()
}

/// Row-reduced basis of the weight component of the one-sided Serre ideal,
/// bounded by word height.
pub fn serre_component(
    datum: &RootDatum,
    _side: Side,
    beta: &RootVec,
    height_bound: i64,
) -> Result<Vec<BTreeMap<Vec<usize>, LaurentFrac>>, QeaError> {
    if beta.height() > height_bound {
        return Err(QeaError::BoundExceeded { bound: height_bound });
    }
    Ok(serre_row_space(datum, beta).rows().to_vec())
}

/// Decides equality modulo the two-sided Serre ideal, weight block by
/// weight block, caching the reduced ideal subspaces.
pub struct SerreReducer {
    ctx: Rc<AlgebraCtx>,
    one_sided: BTreeMap<RootVec, Rc<SparseRowSpace<Vec<usize>, LaurentFrac>>>,
    blocks: BTreeMap<(RootVec, RootVec), Rc<SparseRowSpace<(Vec<usize>, Vec<usize>), LaurentFrac>>>,
}

impl SerreReducer {
    pub fn new(ctx: &Rc<AlgebraCtx>) -> Self {
        SerreReducer { ctx: ctx.clone(), one_sided: BTreeMap::new(), blocks: BTreeMap::new() }
    }

    fn one_sided_space(&mut self, beta: &RootVec) -> Rc<SparseRowSpace<Vec<usize>, LaurentFrac>> {
        if let Some(s) = self.one_sided.get(beta) {
            return s.clone();
        }
        let s = Rc::new(serre_row_space(&self.ctx.datum, beta));
        self.one_sided.insert(beta.clone(), s.clone());
        s
    }

    fn block_space(
        &mut self,
        beta: &RootVec,
        gamma: &RootVec,
    ) -> Rc<SparseRowSpace<(Vec<usize>, Vec<usize>), LaurentFrac>> {
        let key = (beta.clone(), gamma.clone());
        if let Some(s) = self.blocks.get(&key) {
            return s.clone();
        }
        let e_serre = self.one_sided_space(beta);
        let f_serre = self.one_sided_space(gamma);
        let mut space = SparseRowSpace::new();
        // (Serre in E) tensor (any F word), keyed (e-word, f-word).
        for row in e_serre.rows() {
            for w in words_of_content(gamma) {
                let vec: BTreeMap<(Vec<usize>, Vec<usize>), LaurentFrac> =
                    row.iter().map(|(u, c)| ((u.clone(), w.clone()), c.clone())).collect();
                space.insert(vec);
            }
        }
        // (any E word) tensor (Serre in F).
        for row in f_serre.rows() {
            for u in words_of_content(beta) {
                let vec: BTreeMap<(Vec<usize>, Vec<usize>), LaurentFrac> =
                    row.iter().map(|(w, c)| ((u.clone(), w.clone()), c.clone())).collect();
                space.insert(vec);
            }
        }
        let s = Rc::new(space);
        self.blocks.insert(key, s.clone());
        s
    }

    /// Canonical residue of an element modulo the two-sided Serre ideal,
    /// reduced weight block by weight block.
    pub fn reduce_elem(&mut self, x: &AlgElem) -> AlgElem {
        assert!(*x.ctx == *self.ctx, "mismatched algebra contexts");
        let rank = self.ctx.rank();
        let mut groups: BTreeMap<
            (RootVec, Weight, RootVec),
            BTreeMap<(Vec<usize>, Vec<usize>), LaurentFrac>,
        > = BTreeMap::new();
        for (key, c) in &x.terms {
            let beta = word_content(rank, &key.e);
            let gamma = word_content(rank, &key.f);
            groups
                .entry((beta, key.k.clone(), gamma))
                .or_default()
                .insert((key.e.clone(), key.f.clone()), c.clone());
        }
        let mut out = AlgElem::zero(&self.ctx);
        for ((beta, mu, gamma), vec) in groups {
            let space = self.block_space(&beta, &gamma);
            for ((e, f), c) in space.reduce(vec) {
                merge_term(&mut out.terms, TermKey { e, k: mu.clone(), f }, c);
            }
        }
        out
    }

    /// Whether the element lies in the two-sided Serre ideal.
    pub fn is_zero_mod_serre(&mut self, x: &AlgElem) -> bool {
        assert!(*x.ctx == *self.ctx, "mismatched algebra contexts");
        let rank = self.ctx.rank();
        // Group terms by (E content, K point, F content).
        let mut groups: BTreeMap<
            (RootVec, Weight, RootVec),
            BTreeMap<(Vec<usize>, Vec<usize>), LaurentFrac>,
        > = BTreeMap::new();
        for (key, c) in &x.terms {
            let beta = word_content(rank, &key.e);
            let gamma = word_content(rank, &key.f);
            groups
                .entry((beta, key.k.clone(), gamma))
                .or_default()
                .insert((key.e.clone(), key.f.clone()), c.clone());
        }
        for ((beta, _mu, gamma), vec) in groups {
            let space = self.block_space(&beta, &gamma);
            if !space.reduce(vec).is_empty() {
                return false;
            }
        }
        true
    }
}

/// Diagonal rescaling data onto the all-plus algebra: letter factors `a_r`
/// and torus factors `b` given on the fundamental weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RescaleMap {
    pub a: Vec<Rat>,
    pub b_omega: Vec<Rat>,
}

impl RescaleMap {
    /// Solve for the rescaling onto the all-plus algebra. Requires strictly
    /// positive parameters and rational values for all required roots.
    pub fn to_standard(ctx: &AlgebraCtx) -> Result<Self, QeaError> {
        let rank = ctx.rank();
        for r in 0..rank {
            if !(ctx.eps_r(r) * ctx.eta_r(r)).is_positive() {
                return Err(QeaError::MixedSigns(format!(
                    "node {}: parameter product is not positive",
                    r + 1
                )));
            }
            if !ctx.eps_r(r).is_positive() {
                return Err(QeaError::NonRepresentableRoot(format!(
                    "node {}: negative parameters need non-real letter factors",
                    r + 1
                )));
            }
        }
        // rho_r = (eta_r / eps_r)^{1/4}.
        let mut rho = Vec::with_capacity(rank);
        for r in 0..rank {
            let ratio = ctx.eta_r(r) / ctx.eps_r(r);
            let root = rational_nth_root(&ratio, 4).ok_or_else(|| {
                QeaError::NonRepresentableRoot(format!("4th root of {ratio} is not rational"))
            })?;
            rho.push(root);
        }
        // Torus factors on fundamental weights: b_omega_i = prod_r rho_r^{C_ri},
        // where C is the inverse Cartan matrix.
        let a_mat: Vec<Vec<Rat>> = ctx
            .datum
            .cartan
            .iter()
            .map(|row| row.iter().map(|&x| rat_i(x)).collect())
            .collect();
        let c_mat = crate::linalg::invert(&a_mat).expect("Cartan matrix invertible");
        let mut b_omega = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut acc = Rat::one();
            for (r, rho_r) in rho.iter().enumerate() {
                let exp = &c_mat[r][i];
                let p = exp.numer();
                let q = exp.denom();
                // rho_r^{p/q}, exact or bust.
                let base = rat_pow_signed(rho_r, p);
                let q_u32 = u32::try_from(q.clone()).map_err(|_| {
                    QeaError::NonRepresentableRoot("root order overflow".to_string())
                })?;
                let rooted = rational_nth_root(&base, q_u32).ok_or_else(|| {
                    QeaError::NonRepresentableRoot(format!(
                        "{q_u32}th root of {base} is not rational"
                    ))
                })?;
                acc *= rooted;
            }
            b_omega.push(acc);
        }
        // Letter factors: a_r^2 = b_{alpha_r}^2 * eps_r = rho_r^2 * eps_r.
        let mut a = Vec::with_capacity(rank);
        for r in 0..rank {
            let sq = &rho[r] * &rho[r] * ctx.eps_r(r);
            let root = rational_nth_root(&sq, 2).ok_or_else(|| {
                QeaError::NonRepresentableRoot(format!("square root of {sq} is not rational"))
            })?;
            a.push(root);
        }
        // Consistency: recomputed b_{alpha_r}^4 must equal eta_r / eps_r.
        let map = RescaleMap { a, b_omega };
        for r in 0..rank {
            let b_alpha = map.b_value(&ctx.datum.simple_root_weight(r));
            let fourth = &b_alpha * &b_alpha * &b_alpha * &b_alpha;
            assert_eq!(fourth, ctx.eta_r(r) / ctx.eps_r(r), "torus factor consistency");
        }
        Ok(map)
    }

    /// Value of the torus character on a weight.
    pub fn b_value(&self, mu: &Weight) -> Rat {
        let mut acc = Rat::one();
        for (b, &m) in self.b_omega.iter().zip(&mu.0) {
            acc *= rat_pow_signed_i64(b, m);
        }
        acc
    }

    /// Push an element through the rescaling into the all-plus context.
    pub fn apply(&self, x: &AlgElem, target: &Rc<AlgebraCtx>) -> AlgElem {
        let mut out = AlgElem::zero(target);
        for (key, c) in &x.terms {
            let mut factor = self.b_value(&key.k);
            for &r in key.e.iter().chain(&key.f) {
                factor *= &self.a[r];
            }
            merge_term(&mut out.terms, key.clone(), c.scale(&factor));
        }
        out
    }
}

fn rat_pow_signed(base: &Rat, p: &num::BigInt) -> Rat {
    use num::ToPrimitive;
    rat_pow_signed_i64(base, p.to_i64().expect("exponent fits i64"))
}

fn rat_pow_signed_i64(base: &Rat, p: i64) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..p.unsigned_abs() {
        acc *= base;
    }
    if p < 0 {
        acc = Rat::one() / acc;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_data::{q_number, Series};
    use crate::scalars::rat_pq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx_a1(eps: i64, eta: i64) -> Rc<AlgebraCtx> {
        let d = RootDatum::build(Series::A, 1).unwrap();
        AlgebraCtx::new(d, EpsChar::from_values(vec![rat_i(eps)]), EpsChar::from_values(vec![rat_i(eta)]))
    }

    fn ctx_a2(eps: (i64, i64), eta: (i64, i64)) -> Rc<AlgebraCtx> {
        let d = RootDatum::build(Series::A, 2).unwrap();
        AlgebraCtx::new(
            d,
            EpsChar::from_values(vec![rat_i(eps.0), rat_i(eps.1)]),
            EpsChar::from_values(vec![rat_i(eta.0), rat_i(eta.1)]),
        )
    }

    #[test]
    fn commutator_relation_straightens() {
        let ctx = ctx_a1(1, 1);
        let e = AlgElem::gen_e(&ctx, 0);
        let f = AlgElem::gen_f(&ctx, 0);
        let ef = e.mul(&f).unwrap();
        // E F = F E + (K_{2a} - K_{-2a})/(q - q^{-1}); alpha = 2 omega.
        let inv_den = LaurentFrac::one().div(&ctx.datum.q_r_minus_inv(0)).unwrap();
        let mut expected = AlgElem::zero(&ctx);
        expected.terms.insert(
            TermKey { e: vec![0], k: Weight(vec![0]), f: vec![0] },
            LaurentFrac::one(),
        );
        expected.terms.insert(TermKey::torus(Weight(vec![4])), inv_den.clone());
        expected.terms.insert(TermKey::torus(Weight(vec![-4])), inv_den.neg());
        assert_eq!(ef, expected);
        // F E is already triangular.
        let fe = f.mul(&e).unwrap();
        assert_eq!(fe.terms.len(), 1);
        assert!(fe.terms.contains_key(&TermKey {
            e: vec![0],
            k: Weight(vec![0]),
            f: vec![0]
        }));
    }

    #[test]
    fn degenerate_sign_kills_branch() {
        let ctx = ctx_a1(0, 1);
        let e = AlgElem::gen_e(&ctx, 0);
        let f = AlgElem::gen_f(&ctx, 0);
        let ef = e.mul(&f).unwrap();
        // Only the eta branch survives.
        assert_eq!(ef.terms.len(), 2);
        assert!(ef.terms.contains_key(&TermKey::torus(Weight(vec![-4]))));
        assert!(!ef.terms.contains_key(&TermKey::torus(Weight(vec![4]))));
        let ctx0 = ctx_a1(0, 0);
        let ef0 = AlgElem::gen_e(&ctx0, 0).mul(&AlgElem::gen_f(&ctx0, 0)).unwrap();
        assert_eq!(ef0.terms.len(), 1, "letters commute when both signs vanish");
    }

    #[test]
    fn torus_commutation_scalars() {
        let ctx = ctx_a2((1, 1), (1, 1));
        let mu = Weight(vec![1, 0]);
        let k = AlgElem::k_point(&ctx, mu.clone());
        let e = AlgElem::gen_e(&ctx, 0);
        let ke = k.mul(&e).unwrap();
        let ek = e.mul(&k).unwrap();
        // K_mu E_1 = q^{(mu, alpha_1)/2} E_1 K_mu = q^{1/2} E_1 K_mu.
        let scalar = ctx.datum.q_pow(&rat_pq(1, 2));
        assert_eq!(ke, ek.scale(&scalar));
        // Cross-node commutator vanishes.
        let f2 = AlgElem::gen_f(&ctx, 1);
        let lhs = e.mul(&f2).unwrap();
        let rhs = f2.mul(&e).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn star_is_involutive_and_antimultiplicative() {
        let ctx = ctx_a2((1, -1), (0, 1));
        assert_eq!(AlgElem::gen_e(&ctx, 0).star(), AlgElem::gen_f(&ctx, 0));
        let k = AlgElem::k_point(&ctx, Weight(vec![2, -1]));
        assert_eq!(k.star(), k);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let x = straighten(&ctx, random_word(&ctx, rng.gen_range(0..=4), &mut rng));
            let y = straighten(&ctx, random_word(&ctx, rng.gen_range(0..=4), &mut rng));
            assert_eq!(x.star().star(), x);
            let lhs = x.mul(&y).unwrap().star();
            let rhs = y.star().mul(&x.star()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn multiplication_is_associative_on_samples() {
        let ctx = ctx_a2((1, 0), (-1, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..15 {
            let x = straighten(&ctx, random_word(&ctx, 3, &mut rng));
            let y = straighten(&ctx, random_word(&ctx, 3, &mut rng));
            let z = straighten(&ctx, random_word(&ctx, 2, &mut rng));
            let lhs = x.mul(&y).unwrap().mul(&z).unwrap();
            let rhs = x.mul(&y.mul(&z).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn straightening_is_confluent_under_random_orders() {
        let ctx = ctx_a2((1, -1), (2, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let w = random_word(&ctx, rng.gen_range(0..=6), &mut rng);
            let det = straighten(&ctx, w.clone());
            let rand_order = straighten_randomized(&ctx, w, &mut rng);
            assert_eq!(det, rand_order);
        }
    }

    #[test]
    fn tau_keeps_only_torus_terms() {
        let ctx = ctx_a1(1, 1);
        let k = AlgElem::k_point(&ctx, Weight(vec![3]));
        assert_eq!(k.tau(), k);
        let f = AlgElem::gen_f(&ctx, 0);
        assert!(f.tau().is_zero());
        let fe = AlgElem::gen_f(&ctx, 0).mul(&AlgElem::gen_e(&ctx, 0)).unwrap();
        assert!(fe.tau().is_zero(), "both words nonempty is killed");
        let ef = AlgElem::gen_e(&ctx, 0).mul(&AlgElem::gen_f(&ctx, 0)).unwrap();
        let t = ef.tau();
        assert_eq!(t.terms.len(), 2, "commutator torus part survives");
    }

    #[test]
    fn chi_evaluates_torus_elements() {
        let ctx = ctx_a1(1, 1);
        let lam = LambdaChar::from_exponents(&ctx.datum, vec![rat_pq(1, 2)]).unwrap();
        let one = AlgElem::one(&ctx);
        assert!(one.chi_lambda(&lam).unwrap().is_one());
        let k4 = AlgElem::k_point(&ctx, Weight(vec![4]));
        assert_eq!(k4.chi_lambda(&lam).unwrap(), ctx.datum.q_int(2));
        // chi(tau(E F)) = (lambda_a^2 - lambda_a^{-2})/(q - q^{-1}) = [2]_q here.
        let ef = AlgElem::gen_e(&ctx, 0).mul(&AlgElem::gen_f(&ctx, 0)).unwrap();
        let val = ef.tau().chi_lambda(&lam).unwrap();
        assert_eq!(val, q_number(&ctx.datum, 2, 0));
        // Letters are rejected.
        assert_eq!(ef.chi_lambda(&lam), Err(QeaError::NonTorus));
    }

    #[test]
    fn serre_components_match_expected_dimensions() {
        // Rank 1: no Serre relations at all.
        let a1 = RootDatum::build(Series::A, 1).unwrap();
        assert!(serre_component(&a1, Side::Minus, &RootVec(vec![3]), 10).unwrap().is_empty());
        let a2 = RootDatum::build(Series::A, 2).unwrap();
        // Weight alpha_1 + alpha_2: too small for a Serre element.
        assert!(serre_component(&a2, Side::Minus, &RootVec(vec![1, 1]), 10).unwrap().is_empty());
        // Weight 2 alpha_1 + alpha_2: exactly the defining relation.
        let rows = serre_component(&a2, Side::Minus, &RootVec(vec![2, 1]), 10).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        // Normalized leading coefficient on word (1,1,2); check the shape
        // c * (F1F1F2 - (q+q^{-1}) F1F2F1 + F2F1F1).
        let c112 = row.get(&vec![0, 0, 1]).unwrap();
        let c121 = row.get(&vec![0, 1, 0]).unwrap();
        let c211 = row.get(&vec![1, 0, 0]).unwrap();
        let two = q_number(&a2, 2, 0);
        assert_eq!(c121.div(c112).unwrap(), two.neg());
        assert_eq!(c211.div(c112).unwrap(), LaurentFrac::one());
        assert!(matches!(
            serre_component(&a2, Side::Minus, &RootVec(vec![4, 4]), 3),
            Err(QeaError::BoundExceeded { bound: 3 })
        ));
    }

    #[test]
    fn serre_components_have_kostant_codimension() {
        for (series, rank, depth) in [(Series::A, 2, 5), (Series::B, 2, 5), (Series::G, 2, 5)] {
            let d = RootDatum::build(series, rank).unwrap();
            for beta in d.nonneg_root_combos_up_to(depth) {
                let words = words_of_content(&beta).len();
                let serre_dim = serre_row_space(&d, &beta).dim();
                let kostant = d.kostant_partition_count(&beta) as usize;
                assert_eq!(
                    words - serre_dim,
                    kostant,
                    "{series}{rank} at {:?}: words {words}, serre {serre_dim}",
                    beta.0
                );
            }
        }
    }

    #[test]
    fn serre_elements_commute_with_opposite_letters() {
        // The linchpin for block-wise ideal reduction: one-sided Serre
        // elements commute exactly with every opposite-side letter, for all
        // sign characters.
        let cases: Vec<Rc<AlgebraCtx>> = vec![
            ctx_a2((1, 1), (1, 1)),
            ctx_a2((-1, 2), (0, 3)),
            {
                let d = RootDatum::build(Series::B, 2).unwrap();
                AlgebraCtx::new(
                    d,
                    EpsChar::from_values(vec![rat_i(1), rat_i(-2)]),
                    EpsChar::from_values(vec![rat_pq(1, 2), rat_i(3)]),
                )
            },
            {
                let d = RootDatum::build(Series::G, 2).unwrap();
                AlgebraCtx::new(
                    d,
                    EpsChar::from_values(vec![rat_i(2), rat_i(1)]),
                    EpsChar::from_values(vec![rat_i(0), rat_i(-1)]),
                )
            },
        ];
        for ctx in cases {
            let rank = ctx.rank();
            for r in 0..rank {
                for s in 0..rank {
                    if r == s {
                        continue;
                    }
                    let mut rel = AlgElem::zero(&ctx);
                    for (word, c) in serre_element(&ctx.datum, r, s) {
                        rel = rel.add(&AlgElem::monomial(
                            &ctx,
                            TermKey { e: word, k: Weight::zero(rank), f: vec![] },
                            c,
                        ));
                    }
                    for t in 0..rank {
                        let ft = AlgElem::gen_f(&ctx, t);
                        let lhs = rel.mul(&ft).unwrap();
                        let rhs = ft.mul(&rel).unwrap();
                        assert_eq!(
                            lhs, rhs,
                            "Serre({r},{s}) must commute with opposite letter {t}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn serre_reducer_detects_ideal_membership() {
        let ctx = ctx_a2((1, 1), (1, 1));
        let mut red = SerreReducer::new(&ctx);
        // The Serre element itself.
        let mut rel = AlgElem::zero(&ctx);
        for (word, c) in serre_element(&ctx.datum, 0, 1) {
            rel = rel.add(&AlgElem::monomial(
                &ctx,
                TermKey { e: word, k: Weight::zero(2), f: vec![] },
                c,
            ));
        }
        assert!(red.is_zero_mod_serre(&rel));
        // Products by letters on either side stay inside.
        let x = AlgElem::gen_f(&ctx, 1).mul(&rel).unwrap().mul(&AlgElem::gen_e(&ctx, 0)).unwrap();
        assert!(red.is_zero_mod_serre(&x));
        // A plain word is not inside.
        let w = AlgElem::gen_e(&ctx, 0).mul(&AlgElem::gen_e(&ctx, 1)).unwrap();
        assert!(!red.is_zero_mod_serre(&w));
        assert!(!red.is_zero_mod_serre(&AlgElem::one(&ctx)));
    }

    #[test]
    fn serre_basis_is_star_stable() {
        let ctx = ctx_a2((1, 1), (1, 1));
        let beta = RootVec(vec![2, 1]);
        let minus_rows = serre_component(&ctx.datum, Side::Minus, &beta, 10).unwrap();
        let plus_space = serre_row_space(&ctx.datum, &beta);
        for row in minus_rows {
            // Star of sum c_w F_w is sum c_w E_{reversed w}; same content.
            let starred: BTreeMap<Vec<usize>, LaurentFrac> = row
                .iter()
                .map(|(w, c)| {
                    let mut rw = w.clone();
                    rw.reverse();
                    (rw, c.clone())
                })
                .collect();
            assert!(plus_space.reduce(starred).is_empty());
        }
    }

    #[test]
    fn rescaling_identity_and_exact_case() {
        let std_ctx = ctx_a1(1, 1);
        let id = RescaleMap::to_standard(&std_ctx).unwrap();
        assert_eq!(id.a, vec![rat_i(1)]);
        assert_eq!(id.b_omega, vec![rat_i(1)]);

        // eta/eps = 256: rho = 4, b_omega = 2, a^2 = rho^2 = 16, a = 4.
        let ctx = ctx_a1(1, 256);
        let map = RescaleMap::to_standard(&ctx).unwrap();
        assert_eq!(map.a, vec![rat_i(4)]);
        assert_eq!(map.b_omega, vec![rat_i(2)]);

        // Homomorphism on samples, and the commutator lands on the standard
        // relation scaled by a^2.
        let target = AlgElem::gen_e(&std_ctx, 0)
            .mul(&AlgElem::gen_f(&std_ctx, 0))
            .unwrap()
            .sub(&AlgElem::gen_f(&std_ctx, 0).mul(&AlgElem::gen_e(&std_ctx, 0)).unwrap());
        let src = AlgElem::gen_e(&ctx, 0)
            .mul(&AlgElem::gen_f(&ctx, 0))
            .unwrap()
            .sub(&AlgElem::gen_f(&ctx, 0).mul(&AlgElem::gen_e(&ctx, 0)).unwrap());
        let image = map.apply(&src, &std_ctx);
        assert_eq!(image, target.scale(&LaurentFrac::from_rat(rat_i(16))));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x = straighten(&ctx, random_word(&ctx, 3, &mut rng));
            let y = straighten(&ctx, random_word(&ctx, 3, &mut rng));
            let lhs = map.apply(&x.mul(&y).unwrap(), &std_ctx);
            let rhs = map.apply(&x, &std_ctx).mul(&map.apply(&y, &std_ctx)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rescaling_rejections() {
        // Mixed signs.
        let ctx = ctx_a1(1, -1);
        assert!(matches!(RescaleMap::to_standard(&ctx), Err(QeaError::MixedSigns(_))));
        // Both negative: product positive but letter factors are not real.
        let ctx = ctx_a1(-1, -1);
        assert!(matches!(RescaleMap::to_standard(&ctx), Err(QeaError::NonRepresentableRoot(_))));
        // Irrational torus root: eta/eps = 1/16, rho = 1/2, b_omega = sqrt(1/2).
        let ctx = ctx_a1(16, 1);
        assert!(matches!(RescaleMap::to_standard(&ctx), Err(QeaError::NonRepresentableRoot(_))));
    }

    #[test]
    fn canonical_text_form_is_stable() {
        let ctx = ctx_a2((1, 1), (1, 1));
        let x = AlgElem::gen_e(&ctx, 0)
            .mul(&AlgElem::gen_f(&ctx, 0))
            .unwrap()
            .add(&AlgElem::gen_f(&ctx, 1).scale(&ctx.datum.q_int(1)));
        assert_eq!(
            format!("{x}"),
            "((-1*v^12)/(1*v^24 + -1*v^0))*K[-4,2] + (1*v^12)*F2*K[0,0] + \
             ((1*v^12)/(1*v^24 + -1*v^0))*K[4,-2] + (1*v^0)*F1*E1*K[0,0]"
        );
    }

    #[test]
    fn context_mismatch_is_reported() {
        let a = AlgElem::gen_e(&ctx_a1(1, 1), 0);
        let b = AlgElem::gen_f(&ctx_a1(0, 1), 0);
        assert_eq!(a.mul(&b), Err(QeaError::ContextMismatch));
    }
}
