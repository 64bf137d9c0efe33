//! Truncated highest-weight representations and the quantum homogeneous
//! space operators that live inside them.
//!
//! Provides:
//! - `TruncatedModule`: the depth-truncated irreducible highest-weight
//!   module at a rational evaluation point, with per-weight bases chosen
//!   as the lexicographically first maximal-rank word subsets modulo the
//!   radical of the invariant form.
//! - `represent`: exact matrices for algebra elements, acting through
//!   straightening; every operator carries an up-reach so identities are
//!   compared only where the truncation is faithful.
//! - `build_generators`: the distinguished operators `Z_r`, `X_r`, `Y_r`,
//!   `T_r`, `W_r` and the product `Z_rho`, with the two defining
//!   expressions for `T_r` and the form-adjointness of `X_r`, `Y_r`
//!   checked on construction.
//! - `verify_subalg_relations`: the node-local commutation relations and
//!   the adjoint-action formulas on these operators, reported rather than
//!   asserted.
//! - `podles_parameters`: the scalars of `W_r` and `T_r` on the node
//!   string through the highest weight vector, with the sign regime.
//! - `invariant_state`: the trace state `x -> Tr(x Z_rho)/Tr(Z_rho)` on a
//!   complete module, together with its modular identity.
//! - `invariant_scalars_check`: inside a represented span, the adjoint
//!   invariants are exactly the scalars.

use crate::cogroupoid::{adjoint_action, CogroupoidError};
use crate::linalg::{kernel_basis, mat_mul, rref};
use crate::qea::{AlgebraCtx, AlgElem, QeaError, TermKey, words_of_content};
use crate::root_data::{weyl_group, LambdaChar, RootDataError, RootVec, Weight};
use crate::scalars::{rat_i, LaurentFrac, Rat, ScalarError};
use crate::verma::{f_word, shapovalov_gram, VermaError};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;

/// Errors from building truncated modules or operators on them.
#[derive(Debug)]
pub enum QhsError {
    Scalar(ScalarError),
    Algebra(QeaError),
    Verma(VermaError),
    RootData(RootDataError),
    Cogroupoid(CogroupoidError),
    /// No column of the truncation is faithful at the requested reach.
    TruncationTooSmall { depth: i64, needed: i64 },
    /// The module is not known to be finite-dimensional and complete.
    InfiniteModule,
    /// `W_r` or `T_r` failed to act as a scalar on the node string.
    NonScalarComponent { node: usize },
}

impl fmt::Display for QhsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QhsError::Scalar(e) => write!(f, "scalar error: {e}"),
            QhsError::Algebra(e) => write!(f, "algebra error: {e}"),
            QhsError::Verma(e) => write!(f, "module error: {e}"),
            QhsError::RootData(e) => write!(f, "root data error: {e}"),
            QhsError::Cogroupoid(e) => write!(f, "coalgebra error: {e}"),
            QhsError::TruncationTooSmall { depth, needed } => {
                write!(f, "truncation depth {depth} too small for reach {needed}")
            }
            QhsError::InfiniteModule => write!(f, "module is not finite-dimensional"),
            QhsError::NonScalarComponent { node } => {
                write!(f, "non-scalar action on the node-{node} string")
            }
        }
    }
}

impl std::error::Error for QhsError {}

impl From<ScalarError> for QhsError {
    fn from(e: ScalarError) -> Self {
        QhsError::Scalar(e)
    }
}

impl From<QeaError> for QhsError {
    fn from(e: QeaError) -> Self {
        QhsError::Algebra(e)
    }
}

impl From<VermaError> for QhsError {
    fn from(e: VermaError) -> Self {
        QhsError::Verma(e)
    }
}

impl From<RootDataError> for QhsError {
    fn from(e: RootDataError) -> Self {
        QhsError::RootData(e)
    }
}

impl From<CogroupoidError> for QhsError {
    fn from(e: CogroupoidError) -> Self {
        QhsError::Cogroupoid(e)
    }
}

/// One weight block of the truncated module: all lowering words of the
/// given content, the evaluated invariant form on them, the chosen
/// quotient basis, and the expansion of every word in that basis.
#[derive(Debug, Clone)]
pub struct WeightBlock {
    /// All lowering words of this content, in lexicographic order.
    pub words: Vec<Vec<usize>>,
    /// Full evaluated form on `words x words`.
    pub gram_full: Vec<Vec<Rat>>,
    /// Indices into `words` of the lexicographically first maximal-rank
    /// subset; these span the radical quotient.
    pub basis: Vec<usize>,
    /// Invertible form matrix on `basis x basis`.
    pub gram_basis: Vec<Vec<Rat>>,
    /// `expand[j]` writes word `j` in the quotient basis; radical vectors
    /// expand to zero.
    pub expand: Vec<Vec<Rat>>,
}

impl WeightBlock {
    /// Kernel vectors of the full form, in word coordinates.
    pub fn radical_vectors(&self) -> Vec<Vec<Rat>> {
        kernel_basis(&self.gram_full, self.words.len())
    }
}

/// The depth-truncated irreducible highest-weight module at a rational
/// evaluation point, as exact per-weight matrices over the radical
/// quotient.
#[derive(Debug, Clone)]
pub struct TruncatedModule {
    pub ctx: Rc<AlgebraCtx>,
    pub lambda: LambdaChar,
    pub v0: Rat,
    pub depth: i64,
    pub blocks: BTreeMap<RootVec, WeightBlock>,
    /// Global index -> (weight content, local basis position).
    pub flat: Vec<(RootVec, usize)>,
    /// First global index of each weight block.
    pub offsets: BTreeMap<RootVec, usize>,
    /// Whether the truncation provably contains the whole module.
    pub complete: bool,
}

impl TruncatedModule {
    /// Build the truncation of the irreducible quotient down to the given
    /// depth.  Bases are the lexicographically first maximal-rank word
    /// subsets of each weight, so outputs are deterministic.
    pub fn build(
        ctx: &Rc<AlgebraCtx>,
        lambda: &LambdaChar,
        v0: &Rat,
        depth: i64,
    ) -> Result<Self, QhsError> {
        let mut blocks = BTreeMap::new();
        for beta in ctx.datum.nonneg_root_combos_up_to(depth) {
            let gb = shapovalov_gram(ctx, lambda, &beta, depth)?;
            let gram_full = gb.eval_at(v0)?;
            let n = gb.words.len();
            let mut basis: Vec<usize> = Vec::new();
            let mut cur_rank = 0usize;
            for j in 0..n {
                let mut cand = basis.clone();
                cand.push(j);
                let sub: Vec<Vec<Rat>> = cand
                    .iter()
                    .map(|&a| cand.iter().map(|&b| gram_full[a][b].clone()).collect())
                    .collect();
                if crate::linalg::rank(&sub) > cur_rank {
                    basis.push(j);
                    cur_rank += 1;
                }
            }
            let gram_basis: Vec<Vec<Rat>> = basis
                .iter()
                .map(|&a| basis.iter().map(|&b| gram_full[a][b].clone()).collect())
                .collect();
            // Solve the form system once to expand every word in the
            // basis; the radical lands on zero.
            let nb = basis.len();
            let mut expand = vec![vec![Rat::zero(); nb]; n];
            if nb > 0 {
                let mut aug: Vec<Vec<Rat>> = Vec::with_capacity(nb);
                for (i, &a) in basis.iter().enumerate() {
                    let mut row = gram_basis[i].clone();
                    for j in 0..n {
                        row.push(gram_full[a][j].clone());
                    }
                    aug.push(row);
                }
                let pivots = rref(&mut aug);
                assert_eq!(pivots, (0..nb).collect::<Vec<_>>(), "basis form must be invertible");
                for (j, exp_j) in expand.iter_mut().enumerate() {
                    for (k, exp_jk) in exp_j.iter_mut().enumerate() {
                        *exp_jk = aug[k][nb + j].clone();
                    }
                }
            }
            blocks.insert(beta, WeightBlock { words: gb.words, gram_full, basis, gram_basis, expand });
        }
        let mut flat = Vec::new();
        let mut offsets = BTreeMap::new();
        for (beta, block) in &blocks {
            offsets.insert(beta.clone(), flat.len());
            for local in 0..block.basis.len() {
                flat.push((beta.clone(), local));
            }
        }
        let complete = Self::completeness(ctx, lambda, depth);
        Ok(TruncatedModule {
            ctx: ctx.clone(),
            lambda: lambda.clone(),
            v0: v0.clone(),
            depth,
            blocks,
            flat,
            offsets,
            complete,
        })
    }

    /// Whether the truncation provably holds the entire module: plus
    /// signs, integral dominant lowering exponents, and depth at least
    /// the height of the lowest weight.
    fn completeness(ctx: &Rc<AlgebraCtx>, lambda: &LambdaChar, depth: i64) -> bool {
        if !ctx.eps.is_all_one() || !ctx.eta.is_all_one() {
            return false;
        }
        match lowering_exponents(ctx, lambda) {
            Some(n) => depth >= lowest_weight_height(ctx, &n),
            None => false,
        }
    }

    pub fn dim(&self) -> usize {
        self.flat.len()
    }

    /// Quotient dimension at one weight content.
    pub fn weight_dim(&self, beta: &RootVec) -> usize {
        self.blocks.get(beta).map_or(0, |b| b.basis.len())
    }

    /// Height of the weight carried by a global index.
    fn height_of(&self, idx: usize) -> i64 {
        self.flat[idx].0.height()
    }

    /// Block-diagonal form matrix on the chosen global basis.
    pub fn gram_global(&self) -> Vec<Vec<Rat>> {
        let n = self.dim();
        let mut g = vec![vec![Rat::zero(); n]; n];
        for (beta, block) in &self.blocks {
            let off = self.offsets[beta];
            for i in 0..block.basis.len() {
                for j in 0..block.basis.len() {
                    g[off + i][off + j] = block.gram_basis[i][j].clone();
                }
            }
        }
        g
    }

    /// Apply an algebra element to the highest weight vector and return
    /// the result in word coordinates per weight content, exactly.
    fn word_vector(
        &self,
        elem: &AlgElem,
    ) -> Result<BTreeMap<RootVec, BTreeMap<Vec<usize>, Rat>>, QhsError> {
        let rank = self.ctx.rank();
        let mut out: BTreeMap<RootVec, BTreeMap<Vec<usize>, Rat>> = BTreeMap::new();
        for (key, coeff) in &elem.terms {
            if !key.e.is_empty() {
                continue;
            }
            let torus = self.lambda.value_symbolic(&self.ctx.datum, &key.k);
            let value = coeff.mul(&torus).eval_at(&self.v0)?;
            if value.is_zero() {
                continue;
            }
            let mut content = vec![0i64; rank];
            for &letter in &key.f {
                content[letter] += 1;
            }
            let slot = out.entry(RootVec(content)).or_default();
            let entry = slot.entry(key.f.clone()).or_insert_with(Rat::zero);
            *entry += value;
        }
        Ok(out)
    }

    /// Exact matrix of an algebra element on the truncated quotient.
    /// Entries above the truncation depth are dropped; the operator's
    /// reach records how far it can raise, so interior comparisons know
    /// which columns are faithful.
    pub fn represent(&self, x: &AlgElem) -> Result<ModuleOperator, QhsError> {
        assert!(Rc::ptr_eq(&x.ctx, &self.ctx) || (x.ctx.eps == self.ctx.eps && x.ctx.eta == self.ctx.eta));
        let n = self.dim();
        let mut reach = 0i64;
        for key in x.terms.keys() {
            let up = key.f.len() as i64 - key.e.len() as i64;
            reach = reach.max(up);
        }
        let mut mat = vec![vec![Rat::zero(); n]; n];
        for (src, (beta, local)) in self.flat.iter().enumerate() {
            let block = &self.blocks[beta];
            let word = &block.words[block.basis[*local]];
            let image = x.mul(&f_word(&self.ctx, word))?;
            for (gamma, coords) in self.word_vector(&image)? {
                if gamma.height() > self.depth {
                    continue;
                }
                let tgt_block = &self.blocks[&gamma];
                let off = self.offsets[&gamma];
                for (w, value) in coords {
                    let j = tgt_block
                        .words
                        .iter()
                        .position(|u| *u == w)
                        .expect("word of matching content");
                    for (t, c) in tgt_block.expand[j].iter().enumerate() {
                        if !c.is_zero() {
                            mat[off + t][src] += c.clone() * &value;
                        }
                    }
                }
            }
        }
        Ok(ModuleOperator { reach, mat })
    }

    /// Global column indices faithful for operators of the given reach.
    fn interior_cols(&self, reach: i64) -> Vec<usize> {
        if self.complete {
            return (0..self.dim()).collect();
        }
        (0..self.dim()).filter(|&i| self.height_of(i) + reach <= self.depth).collect()
    }
}

/// The integral dominant lowering exponents of the character, when they
/// exist: `n_r` with the node character value being the `2 n_r`-th power
/// of the node parameter.
fn lowering_exponents(ctx: &Rc<AlgebraCtx>, lambda: &LambdaChar) -> Option<Vec<i64>> {
    let datum = &ctx.datum;
    let mut n = Vec::with_capacity(datum.rank);
    for r in 0..datum.rank {
        let unit = RootVec({
            let mut v = vec![0i64; datum.rank];
            v[r] = 1;
            v
        });
        let alpha = datum.root_to_weight(&unit);
        let e = lambda.exponent_of(&alpha)?;
        let nr = e * rat_i(2) / rat_i(datum.sym[r]);
        if !nr.is_integer() || nr.is_negative() {
            return None;
        }
        n.push(nr.to_integer().try_into().ok()?);
    }
    Some(n)
}

/// Height of the drop from highest to lowest weight for the finite
/// module with the given lowering exponents.
fn lowest_weight_height(ctx: &Rc<AlgebraCtx>, n: &[i64]) -> i64 {
    let datum = &ctx.datum;
    let hw = Weight(n.to_vec());
    let all: Vec<usize> = (0..datum.rank).collect();
    let group = weyl_group(datum, &all, 16384).expect("finite reflection group");
    group
        .iter()
        .map(|w| {
            datum
                .weight_to_root(&hw.sub(&w.apply(&hw)))
                .expect("orbit drop lies in the root lattice")
                .height()
        })
        .max()
        .unwrap_or(0)
}

/// Build the complete module of a finite-type character: plus signs and
/// integral dominant lowering exponents, with depth chosen to reach the
/// lowest weight.
pub fn finite_module(
    ctx: &Rc<AlgebraCtx>,
    lambda: &LambdaChar,
    v0: &Rat,
) -> Result<TruncatedModule, QhsError> {
    if !ctx.eps.is_all_one() || !ctx.eta.is_all_one() {
        return Err(QhsError::InfiniteModule);
    }
    let n = lowering_exponents(ctx, lambda).ok_or(QhsError::InfiniteModule)?;
    let depth = lowest_weight_height(ctx, &n);
    let module = TruncatedModule::build(ctx, lambda, v0, depth)?;
    assert!(module.complete);
    assert_eq!(
        module.dim() as u64,
        ctx.datum.weyl_dim(&Weight(n.clone())),
        "complete module dimension must match the character dimension"
    );
    Ok(module)
}

/// An exact matrix on the truncated quotient, together with the largest
/// height raise it can perform.  Entries that would land above the
/// truncation are dropped, so columns within `depth - reach` are the
/// faithful interior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleOperator {
    pub reach: i64,
    pub mat: Vec<Vec<Rat>>,
}

impl ModuleOperator {
    pub fn dim(&self) -> usize {
        self.mat.len()
    }

    pub fn identity(n: usize) -> Self {
        let mut mat = vec![vec![Rat::zero(); n]; n];
        for (i, row) in mat.iter_mut().enumerate() {
            row[i] = Rat::one();
        }
        ModuleOperator { reach: 0, mat }
    }

    pub fn zero(n: usize) -> Self {
        ModuleOperator { reach: 0, mat: vec![vec![Rat::zero(); n]; n] }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mat = self
            .mat
            .iter()
            .zip(&other.mat)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.clone() + y).collect())
            .collect();
        ModuleOperator { reach: self.reach.max(other.reach), mat }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-rat_i(1)))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mat = self.mat.iter().map(|row| row.iter().map(|x| x.clone() * c).collect()).collect();
        ModuleOperator { reach: self.reach, mat }
    }

    /// Operator composition; reaches add, since the intermediate image
    /// may climb before the outer factor acts.
    pub fn mul(&self, other: &Self) -> Self {
        ModuleOperator { reach: self.reach + other.reach, mat: mat_mul(&self.mat, &other.mat) }
    }

    pub fn trace(&self) -> Rat {
        let mut acc = Rat::zero();
        for (i, row) in self.mat.iter().enumerate() {
            acc += row[i].clone();
        }
        acc
    }

    /// Equality on the faithful interior: columns whose height stays
    /// within the truncation for the larger of the two reaches.
    pub fn eq_on_interior(&self, other: &Self, module: &TruncatedModule) -> Result<bool, QhsError> {
        let reach = self.reach.max(other.reach);
        let cols = module.interior_cols(reach);
        if cols.is_empty() {
            return Err(QhsError::TruncationTooSmall { depth: module.depth, needed: reach });
        }
        for row in 0..self.dim() {
            for &c in &cols {
                if self.mat[row][c] != other.mat[row][c] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn is_zero_on_interior(&self, module: &TruncatedModule) -> Result<bool, QhsError> {
        self.eq_on_interior(&Self::zero(self.dim()), module)
    }

    /// Sparse `(row, col, value)` triples of the nonzero entries.
    pub fn sparse_triples(&self) -> Vec<(usize, usize, Rat)> {
        let mut out = Vec::new();
        for (i, row) in self.mat.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    out.push((i, j, x.clone()));
                }
            }
        }
        out
    }
}

/// The distinguished operators per node, plus the product of all the
/// torus generators.
#[derive(Debug, Clone)]
pub struct Generators {
    pub z: Vec<ModuleOperator>,
    pub x: Vec<ModuleOperator>,
    pub y: Vec<ModuleOperator>,
    pub t: Vec<ModuleOperator>,
    pub w: Vec<ModuleOperator>,
    pub z_rho: ModuleOperator,
    /// The defining algebra elements behind the matrices, for adjoint
    /// action computations.
    pub elems: GeneratorElems,
}

/// Algebra-side defining elements of the distinguished operators.
#[derive(Debug, Clone)]
pub struct GeneratorElems {
    pub z: Vec<AlgElem>,
    pub x: Vec<AlgElem>,
    pub y: Vec<AlgElem>,
    pub t: Vec<AlgElem>,
    pub w: Vec<AlgElem>,
}

/// Weight of the simple root at a node.
fn alpha_weight(ctx: &Rc<AlgebraCtx>, r: usize) -> Weight {
    let mut unit = vec![0i64; ctx.rank()];
    unit[r] = 1;
    ctx.datum.root_to_weight(&RootVec(unit))
}

/// Build all distinguished operators.  The two defining expressions for
/// each `T_r` are asserted equal both as straightened algebra elements
/// and as matrices, and each `Y_r` is asserted to be the form-adjoint of
/// `X_r` on the quotient.
pub fn build_generators(module: &TruncatedModule) -> Result<Generators, QhsError> {
    let ctx = &module.ctx;
    let datum = &ctx.datum;
    let mut z = Vec::new();
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut t = Vec::new();
    let mut w = Vec::new();
    let mut ze = Vec::new();
    let mut xe = Vec::new();
    let mut ye = Vec::new();
    let mut te = Vec::new();
    let mut we = Vec::new();
    let gram = module.gram_global();
    for r in 0..ctx.rank() {
        let omega = Weight::fundamental(ctx.rank(), r);
        let alpha = alpha_weight(ctx, r);
        let z_elem = AlgElem::k_point(ctx, omega.scale(-4));
        let x_coeff = datum
            .q_r_half_pow(r, 1)
            .mul(&datum.q_r_pow(r, -1).sub(&datum.q_r_pow(r, 1)));
        let x_elem = AlgElem::k_point(ctx, alpha.add(&omega.scale(-4)))
            .mul(&AlgElem::gen_e(ctx, r))?
            .scale(&x_coeff);
        let y_elem = x_elem.star();
        let w_elem = AlgElem::k_point(ctx, alpha.scale(4).add(&omega.scale(-8)));
        let eps_r = ctx.eps_r(r);
        let square = datum.q_r_pow(r, 1).sub(&datum.q_r_pow(r, -1));
        let square = square.mul(&square);
        let k_mid = AlgElem::k_point(ctx, alpha.scale(2).add(&omega.scale(-4)));
        let k4 = AlgElem::k_point(ctx, alpha.scale(4).add(&omega.scale(-4)));
        let t_elem = k_mid
            .mul(&AlgElem::gen_f(ctx, r))?
            .mul(&AlgElem::gen_e(ctx, r))?
            .scale(&square)
            .add(&k4.scale(&datum.q_r_pow(r, 1).scale(&eps_r)))
            .add(&z_elem.scale(&datum.q_r_pow(r, -1)));
        let t_alt = k_mid
            .mul(&AlgElem::gen_e(ctx, r))?
            .mul(&AlgElem::gen_f(ctx, r))?
            .scale(&square)
            .add(&k4.scale(&datum.q_r_pow(r, -1).scale(&eps_r)))
            .add(&z_elem.scale(&datum.q_r_pow(r, 1)));
        assert_eq!(t_elem, t_alt, "the two defining expressions must straighten identically");
        let z_mat = module.represent(&z_elem)?;
        let x_mat = module.represent(&x_elem)?;
        let y_mat = module.represent(&y_elem)?;
        let t_mat = module.represent(&t_elem)?;
        let t_alt_mat = module.represent(&t_alt)?;
        assert_eq!(t_mat.mat, t_alt_mat.mat);
        let w_mat = module.represent(&w_elem)?;
        // Form-adjointness of the raising/lowering pair on the quotient.
        let xt: Vec<Vec<Rat>> = {
            let n = x_mat.dim();
            let mut m = vec![vec![Rat::zero(); n]; n];
            for i in 0..n {
                for j in 0..n {
                    m[i][j] = x_mat.mat[j][i].clone();
                }
            }
            m
        };
        assert_eq!(
            mat_mul(&xt, &gram),
            mat_mul(&gram, &y_mat.mat),
            "the conjugate operator must be the form adjoint"
        );
        z.push(z_mat);
        x.push(x_mat);
        y.push(y_mat);
        t.push(t_mat);
        w.push(w_mat);
        ze.push(z_elem);
        xe.push(x_elem);
        ye.push(y_elem);
        te.push(t_elem);
        we.push(w_elem);
    }
    let mut z_rho = ModuleOperator::identity(module.dim());
    for zr in &z {
        z_rho = z_rho.mul(zr);
    }
    Ok(Generators {
        z,
        x,
        y,
        t,
        w,
        z_rho,
        elems: GeneratorElems { z: ze, x: xe, y: ye, t: te, w: we },
    })
}

/// Outcome of checking the operator relations on a module.
#[derive(Debug, Clone)]
pub struct RelationReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn record(&mut self, name: &str, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(name.to_string());
        }
    }
}

/// Verify the node-local commutation relations among the distinguished
/// operators and the adjoint-action formulas on them, on the faithful
/// interior of the truncation.
pub fn verify_subalg_relations(module: &TruncatedModule) -> Result<RelationReport, QhsError> {
    let gens = build_generators(module)?;
    let ctx = &module.ctx;
    let datum = &ctx.datum;
    let hctx = AlgebraCtx::standard(datum.clone());
    let v0 = &module.v0;
    let mut report = RelationReport { checked: 0, failures: Vec::new() };
    for r in 0..ctx.rank() {
        let (zm, xm, ym, tm, wm) =
            (&gens.z[r], &gens.x[r], &gens.y[r], &gens.t[r], &gens.w[r]);
        let eps_r = ctx.eps_r(r);
        let qr = datum.q_r_pow(r, 1).eval_at(v0)?;
        let qr_inv = datum.q_r_pow(r, -1).eval_at(v0)?;
        let qr2 = datum.q_r_pow(r, 2).eval_at(v0)?;
        let qr2_inv = datum.q_r_pow(r, -2).eval_at(v0)?;
        let qh = datum.q_r_half_pow(r, 1).eval_at(v0)?;
        let qh_inv = datum.q_r_half_pow(r, -1).eval_at(v0)?;
        // Centrality of the two invariant operators within the family.
        for (cn, cm) in [("t", tm), ("w", wm)] {
            for (on, om) in [("x", xm), ("y", ym), ("z", zm), ("t", tm), ("w", wm)] {
                report.record(
                    &format!("{cn}{r} commutes with {on}{r}"),
                    cm.mul(om).eq_on_interior(&om.mul(cm), module)?,
                );
            }
        }
        report.record(
            &format!("x{r} z{r} = qr^2 z{r} x{r}"),
            xm.mul(zm).eq_on_interior(&zm.mul(xm).scale(&qr2), module)?,
        );
        report.record(
            &format!("y{r} z{r} = qr^-2 z{r} y{r}"),
            ym.mul(zm).eq_on_interior(&zm.mul(ym).scale(&qr2_inv), module)?,
        );
        let z2 = zm.mul(zm);
        let tz = tm.mul(zm);
        let rhs_xy = wm.scale(&-eps_r.clone()).add(&tz.scale(&qr)).sub(&z2.scale(&qr2));
        report.record(
            &format!("x{r} y{r} product identity"),
            xm.mul(ym).eq_on_interior(&rhs_xy, module)?,
        );
        let rhs_yx = wm.scale(&-eps_r.clone()).add(&tz.scale(&qr_inv)).sub(&z2.scale(&qr2_inv));
        report.record(
            &format!("y{r} x{r} product identity"),
            ym.mul(xm).eq_on_interior(&rhs_yx, module)?,
        );
        let comm_rhs = tz.scale(&(qr.clone() - &qr_inv)).sub(&z2.scale(&(qr2.clone() - &qr2_inv)));
        report.record(
            &format!("x{r} y{r} commutator identity"),
            xm.mul(ym).sub(&ym.mul(xm)).eq_on_interior(&comm_rhs, module)?,
        );
        // Adjoint-action formulas, computed in the algebra and then
        // represented.
        let e_h = AlgElem::gen_e(&hctx, r);
        let f_h = AlgElem::gen_f(&hctx, r);
        let ad = |elem: &AlgElem, h: &AlgElem| -> Result<ModuleOperator, QhsError> {
            module.represent(&adjoint_action(elem, h)?)
        };
        report.record(
            &format!("z{r} under raising"),
            ad(&gens.elems.z[r], &e_h)?.eq_on_interior(&xm.scale(&qh), module)?,
        );
        report.record(
            &format!("z{r} under lowering"),
            ad(&gens.elems.z[r], &f_h)?.eq_on_interior(&ym.scale(&-qh_inv.clone()), module)?,
        );
        report.record(
            &format!("x{r} under raising"),
            ad(&gens.elems.x[r], &e_h)?.is_zero_on_interior(module)?,
        );
        let qq = qr_inv.clone() + &qr;
        let x_low = zm.scale(&(qh_inv.clone() * &qq)).sub(&tm.scale(&qh_inv));
        report.record(
            &format!("x{r} under lowering"),
            ad(&gens.elems.x[r], &f_h)?.eq_on_interior(&x_low, module)?,
        );
        let y_raise = zm.scale(&(-qh.clone() * &qq)).add(&tm.scale(&qh));
        report.record(
            &format!("y{r} under raising"),
            ad(&gens.elems.y[r], &e_h)?.eq_on_interior(&y_raise, module)?,
        );
        report.record(
            &format!("y{r} under lowering"),
            ad(&gens.elems.y[r], &f_h)?.is_zero_on_interior(module)?,
        );
        report.record(
            &format!("t{r} under raising"),
            ad(&gens.elems.t[r], &e_h)?.is_zero_on_interior(module)?,
        );
        report.record(
            &format!("t{r} under lowering"),
            ad(&gens.elems.t[r], &f_h)?.is_zero_on_interior(module)?,
        );
        report.record(
            &format!("w{r} under raising"),
            ad(&gens.elems.w[r], &e_h)?.is_zero_on_interior(module)?,
        );
        report.record(
            &format!("w{r} under lowering"),
            ad(&gens.elems.w[r], &f_h)?.is_zero_on_interior(module)?,
        );
        for s in 0..ctx.rank() {
            let omega = Weight::fundamental(ctx.rank(), s);
            let k_h = AlgElem::k_point(&hctx, omega.clone());
            let pw = datum.pairing_ww(&omega, &alpha_weight(ctx, r));
            let half = pw / rat_i(2);
            let minus = datum.q_pow(&-half.clone()).eval_at(v0)?;
            let plus = datum.q_pow(&half).eval_at(v0)?;
            report.record(
                &format!("z{r} under torus {s}"),
                ad(&gens.elems.z[r], &k_h)?.eq_on_interior(zm, module)?,
            );
            report.record(
                &format!("x{r} under torus {s}"),
                ad(&gens.elems.x[r], &k_h)?.eq_on_interior(&xm.scale(&minus), module)?,
            );
            report.record(
                &format!("y{r} under torus {s}"),
                ad(&gens.elems.y[r], &k_h)?.eq_on_interior(&ym.scale(&plus), module)?,
            );
            report.record(
                &format!("t{r} under torus {s}"),
                ad(&gens.elems.t[r], &k_h)?.eq_on_interior(tm, module)?,
            );
            report.record(
                &format!("w{r} under torus {s}"),
                ad(&gens.elems.w[r], &k_h)?.eq_on_interior(wm, module)?,
            );
        }
    }
    Ok(report)
}

/// Scalars of the invariant pair on the node string through the highest
/// weight vector, with the sign regime of `eps_r * w_r`.
#[derive(Debug, Clone)]
pub struct PodlesParameters {
    pub node: usize,
    pub w: Rat,
    pub t: Rat,
    /// Sign of `eps_r * w_r`: `1`, `0`, or `-1`.
    pub regime: i8,
    /// Representation-theoretic reading of the regime.
    pub interpretation: &'static str,
}

/// Compute the scalars of `W_r` and `T_r` on the node-`r` string through
/// the highest weight vector, verifying that both act as scalars there.
pub fn podles_parameters(
    module: &TruncatedModule,
    gens: &Generators,
    r: usize,
) -> Result<PodlesParameters, QhsError> {
    // Global indices of the string: contents supported on node r alone.
    let string: Vec<usize> = (0..module.dim())
        .filter(|&i| {
            let beta = &module.flat[i].0;
            beta.0.iter().enumerate().all(|(s, &c)| s == r || c == 0)
        })
        .collect();
    assert!(!string.is_empty());
    let top = string[0];
    assert_eq!(module.flat[top].0.height(), 0, "string starts at the highest weight");
    let w_val = gens.w[r].mat[top][top].clone();
    let t_val = gens.t[r].mat[top][top].clone();
    for (name, op) in [("w", &gens.w[r]), ("t", &gens.t[r])] {
        let scalar = if name == "w" { &w_val } else { &t_val };
        for &i in &string {
            for &j in &string {
                let expected = if i == j { scalar.clone() } else { Rat::zero() };
                if op.mat[i][j] != expected {
                    return Err(QhsError::NonScalarComponent { node: r });
                }
            }
            // The string must not leak into other weight spaces.
            for row in 0..module.dim() {
                if !string.contains(&row) && !op.mat[row][i].is_zero() {
                    return Err(QhsError::NonScalarComponent { node: r });
                }
            }
        }
    }
    let signed = module.ctx.eps_r(r) * &w_val;
    let regime = if signed.is_zero() {
        0
    } else if signed.is_positive() {
        1
    } else {
        -1
    };
    let interpretation = match regime {
        1 => "matrix block",
        0 => "single type-I",
        _ => "two blocks",
    };
    Ok(PodlesParameters { node: r, w: w_val, t: t_val, regime, interpretation })
}

/// The trace state `x -> Tr(x Z_rho) / Tr(Z_rho)` on a complete module.
pub fn invariant_state(
    module: &TruncatedModule,
    gens: &Generators,
    x: &ModuleOperator,
) -> Result<Rat, QhsError> {
    if !module.complete {
        return Err(QhsError::InfiniteModule);
    }
    let denom = gens.z_rho.trace();
    assert!(denom.is_positive(), "the density operator has positive trace");
    Ok(x.mul(&gens.z_rho).trace() / denom)
}

/// Adjoint action by a raising generator, pushed onto matrices through
/// the module's own represented generators.
pub fn matrix_adjoint_e(reps: &RepresentedGens, m: &ModuleOperator, r: usize) -> ModuleOperator {
    let qr = reps.qr[r].clone();
    reps.e[r].mul(m).mul(&reps.k_alpha[r]).scale(&-qr).add(&reps.k_alpha[r].mul(m).mul(&reps.e[r]))
}

/// Adjoint action by a lowering generator on represented operators.
pub fn matrix_adjoint_f(reps: &RepresentedGens, m: &ModuleOperator, r: usize) -> ModuleOperator {
    let qr_inv = reps.qr_inv[r].clone();
    reps.f[r]
        .mul(m)
        .mul(&reps.k_alpha[r])
        .scale(&-qr_inv)
        .add(&reps.k_alpha[r].mul(m).mul(&reps.f[r]))
}

/// Adjoint action by a torus generator on represented operators.
pub fn matrix_adjoint_k(reps: &RepresentedGens, m: &ModuleOperator, s: usize) -> ModuleOperator {
    reps.k_omega_inv[s].mul(m).mul(&reps.k_omega[s])
}

/// Represented generators used to push the adjoint action onto matrices.
#[derive(Debug, Clone)]
pub struct RepresentedGens {
    pub e: Vec<ModuleOperator>,
    pub f: Vec<ModuleOperator>,
    pub k_alpha: Vec<ModuleOperator>,
    pub k_omega: Vec<ModuleOperator>,
    pub k_omega_inv: Vec<ModuleOperator>,
    pub qr: Vec<Rat>,
    pub qr_inv: Vec<Rat>,
}

impl RepresentedGens {
    pub fn build(module: &TruncatedModule) -> Result<Self, QhsError> {
        let ctx = &module.ctx;
        let datum = &ctx.datum;
        let mut e = Vec::new();
        let mut f = Vec::new();
        let mut k_alpha = Vec::new();
        let mut k_omega = Vec::new();
        let mut k_omega_inv = Vec::new();
        let mut qr = Vec::new();
        let mut qr_inv = Vec::new();
        for r in 0..ctx.rank() {
            e.push(module.represent(&AlgElem::gen_e(ctx, r))?);
            f.push(module.represent(&AlgElem::gen_f(ctx, r))?);
            k_alpha.push(module.represent(&AlgElem::k_point(ctx, alpha_weight(ctx, r)))?);
            let omega = Weight::fundamental(ctx.rank(), r);
            k_omega.push(module.represent(&AlgElem::k_point(ctx, omega.clone()))?);
            k_omega_inv.push(module.represent(&AlgElem::k_point(ctx, omega.scale(-1)))?);
            qr.push(datum.q_r_pow(r, 1).eval_at(&module.v0)?);
            qr_inv.push(datum.q_r_pow(r, -1).eval_at(&module.v0)?);
        }
        Ok(RepresentedGens { e, f, k_alpha, k_omega, k_omega_inv, qr, qr_inv })
    }
}

/// Outcome of the invariant-scalar computation on a represented span.
#[derive(Debug, Clone)]
pub struct InvariantScalarsReport {
    /// Dimension of the represented span that was searched.
    pub span_dim: usize,
    /// Dimension of its adjoint-invariant subspace.
    pub invariant_dim: usize,
}

/// Within the span of represented monomials of bounded letter degree,
/// compute the subspace killed by the adjoint action of the raising and
/// lowering generators and fixed by the torus.  On a complete module
/// over an irreducible quotient this is exactly the scalar line.
pub fn invariant_scalars_check(
    module: &TruncatedModule,
    degree: i64,
) -> Result<InvariantScalarsReport, QhsError> {
    if !module.complete {
        return Err(QhsError::InfiniteModule);
    }
    let ctx = &module.ctx;
    let reps = RepresentedGens::build(module)?;
    // Spanning monomials: lowering word, raising word, and a torus point
    // drawn from the non-positive fundamental lattice directions.
    let mut mats: Vec<ModuleOperator> = Vec::new();
    let mut torus_points = vec![Weight::zero(ctx.rank())];
    for r in 0..ctx.rank() {
        torus_points.push(Weight::fundamental(ctx.rank(), r).scale(-4));
    }
    for fc in ctx.datum.nonneg_root_combos_up_to(degree) {
        for ec in ctx.datum.nonneg_root_combos_up_to(degree) {
            for fwd in words_of_content(&fc) {
                for ewd in words_of_content(&ec) {
                    for mu in &torus_points {
                        let key = TermKey { e: ewd.clone(), k: mu.clone(), f: fwd.clone() };
                        let elem = AlgElem::monomial(ctx, key, LaurentFrac::one());
                        mats.push(module.represent(&elem)?);
                    }
                }
            }
        }
    }
    // Independent subset of the span.
    let n = module.dim();
    let flatten = |m: &ModuleOperator| -> Vec<Rat> {
        m.mat.iter().flat_map(|row| row.iter().cloned()).collect()
    };
    let mut picked: Vec<ModuleOperator> = Vec::new();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for m in &mats {
        let mut cand = rows.clone();
        cand.push(flatten(m));
        if crate::linalg::rank(&cand) > rows.len() {
            rows = cand;
            picked.push(m.clone());
        }
    }
    let span_dim = picked.len();
    // Constraint system: the adjoint images of a combination must vanish
    // for raising and lowering, and fix the combination for the torus.
    let mut constraints: Vec<Vec<Rat>> = Vec::new();
    let mut images: Vec<Vec<Vec<Rat>>> = Vec::new();
    for m in &picked {
        let mut per = Vec::new();
        for r in 0..ctx.rank() {
            per.push(flatten(&matrix_adjoint_e(&reps, m, r)));
            per.push(flatten(&matrix_adjoint_f(&reps, m, r)));
            per.push(flatten(&matrix_adjoint_k(&reps, m, r).sub(m)));
        }
        images.push(per);
    }
    let n_constraints = 3 * ctx.rank() * n * n;
    for coord in 0..n_constraints {
        let block = coord / (n * n);
        let entry = coord % (n * n);
        let row: Vec<Rat> = images.iter().map(|per| per[block][entry].clone()).collect();
        if row.iter().any(|x| !x.is_zero()) {
            constraints.push(row);
        }
    }
    let invariant_dim = kernel_basis(&constraints, span_dim).len();
    Ok(InvariantScalarsReport { span_dim, invariant_dim })
}
