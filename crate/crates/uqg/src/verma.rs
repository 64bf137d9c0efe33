//! Highest-weight modules over the interpolated algebras: the invariant
//! Hermitian form, exact per-weight Gram matrices, irreducible-quotient
//! dimensions, and unitarizability verdicts.
//!
//! Provides:
//! - `GramBlock`: one weight space of the module induced from a character,
//!   with its lowering-word basis and exact symmetric Gram matrix
//!   `G[i][j] = chi_lambda(tau(star(F_i) * F_j))`.
//! - `shapovalov_gram`, `form_value`: the form on word bases and on
//!   arbitrary algebra elements.
//! - `irreducible_dims`: per-weight ranks of the form at a rational
//!   evaluation point — the dimensions of the simple quotient's weight
//!   spaces.
//! - `is_unitarizable_up_to`: positive-semidefiniteness by exact congruence
//!   reduction per weight block, with a certified negative witness on
//!   failure.
//! - `sl2_shapovalov_oracle`: the rank-one closed-form product, used only
//!   to cross-check the straightening pipeline.
//!
//! Order decisions (ranks, signs) are made only after evaluating `v` at a
//! rational point; the matrices themselves stay symbolic.

use crate::linalg::{self, symmetric_inertia};
use crate::qea::{words_of_content, AlgebraCtx, AlgElem, QeaError, TermKey};
use crate::root_data::{LambdaChar, RootDatum, RootVec, Weight};
use crate::scalars::{LaurentFrac, Rat, ScalarError};
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

/// Errors from module-level computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VermaError {
    /// The requested weight lies beyond the configured depth bound.
    DepthExceeded { height: i64, bound: i64 },
    Algebra(QeaError),
    Scalar(ScalarError),
}

impl fmt::Display for VermaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VermaError::DepthExceeded { height, bound } => {
                write!(f, "weight height {height} exceeds depth bound {bound}")
            }
            VermaError::Algebra(e) => write!(f, "algebra error: {e}"),
            VermaError::Scalar(e) => write!(f, "scalar error: {e}"),
        }
    }
}

impl std::error::Error for VermaError {}

impl From<QeaError> for VermaError {
    fn from(e: QeaError) -> Self {
        VermaError::Algebra(e)
    }
}

impl From<ScalarError> for VermaError {
    fn from(e: ScalarError) -> Self {
        VermaError::Scalar(e)
    }
}

/// One weight space of the induced module: its word basis and Gram matrix.
#[derive(Clone, Debug)]
pub struct GramBlock {
    pub ctx: Rc<AlgebraCtx>,
    pub lambda: LambdaChar,
    /// Weight below the highest weight, as an element of `Q^+`.
    pub weight: RootVec,
    /// Lowering words, lexicographic; entry `[r1, r2, ...]` is the vector
    /// `F_{r1} F_{r2} ... v`.
    pub words: Vec<Vec<usize>>,
    pub gram: Vec<Vec<LaurentFrac>>,
}

impl GramBlock {
    /// Entrywise evaluation at `v = v0`.
    pub fn eval_at(&self, v0: &Rat) -> Result<Vec<Vec<Rat>>, ScalarError> {
        self.gram
            .iter()
            .map(|row| row.iter().map(|x| x.eval_at(v0)).collect())
            .collect()
    }

    /// Rank of the evaluated Gram matrix: the dimension of this weight
    /// space in the simple quotient.
    pub fn rank_at(&self, v0: &Rat) -> Result<usize, ScalarError> {
        Ok(linalg::rank(&self.eval_at(v0)?))
    }
}

/// The module vector `F_{w1} ... F_{wk} v` as an algebra element.
pub fn f_word(ctx: &Rc<AlgebraCtx>, word: &[usize]) -> AlgElem {
    let key = TermKey { e: vec![], k: Weight::zero(ctx.rank()), f: word.to_vec() };
    AlgElem::monomial(ctx, key, LaurentFrac::one())
}

/// The invariant form on module vectors `a v, b v`, namely
/// `chi_lambda(tau(star(a) * b))`.
pub fn form_value(
    a: &AlgElem,
    b: &AlgElem,
    lambda: &LambdaChar,
) -> Result<LaurentFrac, QeaError> {
    a.star().mul(b)?.tau().chi_lambda(lambda)
}

/// Exact Gram matrix of the invariant form on all lowering words of the
/// given weight.
pub fn shapovalov_gram(
    ctx: &Rc<AlgebraCtx>,
    lambda: &LambdaChar,
    alpha: &RootVec,
    depth_bound: i64,
) -> Result<GramBlock, VermaError> {
    if alpha.height() > depth_bound {
        return Err(VermaError::DepthExceeded { height: alpha.height(), bound: depth_bound });
    }
    let words = words_of_content(alpha);
    let elems: Vec<AlgElem> = words.iter().map(|w| f_word(ctx, w)).collect();
    let stars: Vec<AlgElem> = elems.iter().map(AlgElem::star).collect();
    let n = words.len();
    let mut gram = vec![vec![LaurentFrac::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            gram[i][j] = stars[i].mul(&elems[j])?.tau().chi_lambda(lambda)?;
        }
    }
    for i in 0..n {
        for j in 0..i {
            assert_eq!(gram[i][j], gram[j][i], "Gram matrix must be symmetric");
        }
    }
    Ok(GramBlock { ctx: ctx.clone(), lambda: lambda.clone(), weight: alpha.clone(), words, gram })
}

/// Per-weight dimensions of the simple quotient, as ranks of the Gram
/// blocks evaluated at `v0`, for all weights of height at most `depth`.
pub fn irreducible_dims(
    ctx: &Rc<AlgebraCtx>,
    lambda: &LambdaChar,
    depth: i64,
    v0: &Rat,
) -> Result<BTreeMap<RootVec, usize>, VermaError> {
    let mut out = BTreeMap::new();
    for alpha in ctx.datum.nonneg_root_combos_up_to(depth) {
        let block = shapovalov_gram(ctx, lambda, &alpha, depth)?;
        out.insert(alpha, block.rank_at(v0)?);
    }
    Ok(out)
}

/// A weight space vector with strictly negative squared length.
#[derive(Clone, Debug)]
pub struct NegativeWitness {
    pub weight: RootVec,
    /// Coordinates over the lexicographic word basis of the weight space.
    pub vector: Vec<Rat>,
    /// The exact value `w^T G w < 0` at the evaluation point.
    pub value: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictStatus {
    PsdUpToDepth,
    NegativeWitness,
}

/// Outcome of a depth-bounded positivity scan.
#[derive(Clone, Debug)]
pub struct UnitarizabilityVerdict {
    pub status: VerdictStatus,
    pub witness: Option<NegativeWitness>,
    /// Ranks of the blocks processed before the scan stopped.
    pub ranks: BTreeMap<RootVec, usize>,
}

/// Scan all weights of height at most `depth` for a negative direction of
/// the form, evaluating at `v = v0`. The second index of the algebra is
/// fixed to the all-ones character.
pub fn is_unitarizable_up_to(
    datum: &Rc<RootDatum>,
    lambda: &LambdaChar,
    eps: &crate::root_data::EpsChar,
    depth: i64,
    v0: &Rat,
) -> Result<UnitarizabilityVerdict, VermaError> {
    let eta = crate::root_data::EpsChar::plus(datum.rank);
    let ctx = AlgebraCtx::new(datum.clone(), eps.clone(), eta);
    let mut ranks = BTreeMap::new();
    for alpha in datum.nonneg_root_combos_up_to(depth) {
        let block = shapovalov_gram(&ctx, lambda, &alpha, depth)?;
        let m = block.eval_at(v0)?;
        let inertia = symmetric_inertia(&m);
        ranks.insert(alpha.clone(), inertia.positive + inertia.negative);
        if inertia.negative > 0 {
            let (vector, value) = inertia
                .negative_witness
                .expect("negative index implies a certified witness");
            // Re-certify independently of the elimination bookkeeping.
            let mut check = Rat::from_integer(0.into());
            for (i, wi) in vector.iter().enumerate() {
                for (j, wj) in vector.iter().enumerate() {
                    check += wi * &m[i][j] * wj;
                }
            }
            assert_eq!(check, value, "witness value must re-evaluate exactly");
            assert!(value < Rat::from_integer(0.into()), "witness must be negative");
            return Ok(UnitarizabilityVerdict {
                status: VerdictStatus::NegativeWitness,
                witness: Some(NegativeWitness { weight: alpha, vector, value }),
                ranks,
            });
        }
    }
    Ok(UnitarizabilityVerdict { status: VerdictStatus::PsdUpToDepth, witness: None, ranks })
}

/// Rank-one closed form for the squared length of `F^k v`:
/// `prod_{l=1}^{k} (q^l - q^{-l})(q^{-l+1} a^2 - q^{l-1} a^{-2}) / (q - q^{-1})^2`
/// where `a = q^e` is the character value on the simple root. Used only as
/// an independent cross-check of the straightening pipeline.
pub fn sl2_shapovalov_oracle(datum: &RootDatum, alpha_exponent: &Rat, k: u32) -> LaurentFrac {
    assert_eq!(datum.rank, 1, "closed form is for the rank-one datum");
    let two = Rat::from_integer(2.into());
    let mut acc = LaurentFrac::one();
    for l in 1..=i64::from(k) {
        let first = datum.q_int(l).sub(&datum.q_int(-l));
        let e_plus = &two * alpha_exponent + Rat::from_integer((1 - l).into());
        let e_minus = -&two * alpha_exponent + Rat::from_integer((l - 1).into());
        let second = datum.q_pow(&e_plus).sub(&datum.q_pow(&e_minus));
        let denom = datum.q_int(1).sub(&datum.q_int(-1));
        let denom2 = denom.mul(&denom);
        acc = acc.mul(&first).mul(&second).mul(&denom2.inv().expect("q - q^{-1} is nonzero"));
    }
    acc
}
