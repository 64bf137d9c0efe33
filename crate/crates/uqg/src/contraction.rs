//! Sign-contracted classical Lie algebras: the crystal-limit degenerations
//! `g_eps` realized inside a doubled special linear algebra, their
//! antihermitian real forms, Killing signatures, and the Chevalley-style
//! presentation with sign-modified pairing relations.
//!
//! Provides:
//! - `build_g_eps`: the subalgebra of `sl(l+1) + sl(l+1)` spanned by
//!   `(eps_alpha X_alpha^+, X_alpha^+)`, `(X_alpha^-, eps_alpha X_alpha^-)`,
//!   and the doubled coroots, with exact structure constants and the swap
//!   star operation; bracket closure, antisymmetry, the Jacobi identity, and
//!   star anti-multiplicativity are all verified during construction.
//! - `real_form_basis`: the fixed-point real form spanned by
//!   `X_alpha^+ - eps_alpha X_alpha^-`, `i (X_alpha^+ + eps_alpha X_alpha^-)`,
//!   and `i h_r`, with real rational structure constants.
//! - `killing_signature`: exact inertia of the Killing form, and
//!   `su_signature_oracle`: the closed-form `su(p, q)` signature
//!   `(2pq, p^2 + q^2 - 1, 0)` predicted by the sign pattern.
//! - `verify_presentation`: the sign-twisted Serre presentation checked on
//!   the doubled realization, generation of the full algebra, and graded
//!   dimension bounds for the free Lie algebra on the raising generators
//!   modulo the Serre elements.
//! - `rescale_equivalence`: the explicit diagonal isomorphism between sign
//!   patterns that differ by positive rational squares.
//! - `type_a_table`: the classification table matching each `{+1,-1}` sign
//!   pattern with its special unitary real form.
//!
//! Complex scalars here are exact pairs `(re, im)` of rationals, confined to
//! this module; every published structure constant is a real rational.

use crate::linalg::{rank, symmetric_inertia};
use crate::root_data::Series;
use crate::scalars::{rat_i, Rat};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Errors from the contracted-algebra constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContractionError {
    /// Only the series-A doubled construction is implemented.
    UnsupportedSeries(Series),
    /// Mismatched sign-data length, zero rank, or invalid scale data.
    BadInput(String),
    /// A bracket or star image left the declared span, or an axiom failed.
    Closure(String),
}

impl fmt::Display for ContractionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContractionError::UnsupportedSeries(s) => {
                write!(f, "series {s} is not supported by the doubled construction")
            }
            ContractionError::BadInput(msg) => write!(f, "bad input: {msg}"),
            ContractionError::Closure(msg) => write!(f, "closure failure: {msg}"),
        }
    }
}

impl std::error::Error for ContractionError {}

/// Complex rational scalar; the imaginary unit only ever appears internally.
#[derive(Clone, Debug, PartialEq, Eq)]
struct CRat {
    re: Rat,
    im: Rat,
}

impl CRat {
    fn zero() -> Self {
        CRat { re: Rat::zero(), im: Rat::zero() }
    }

    fn from_rat(r: Rat) -> Self {
        CRat { re: r, im: Rat::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &CRat) -> CRat {
        CRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &CRat) -> CRat {
        CRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul(&self, o: &CRat) -> CRat {
        CRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn conj(&self) -> CRat {
        CRat { re: self.re.clone(), im: -self.im.clone() }
    }
}

/// Dense square complex matrix.
type CMat = Vec<Vec<CRat>>;

fn cmat_zero(n: usize) -> CMat {
    vec![vec![CRat::zero(); n]; n]
}

/// Elementary matrix with a single `1` in row `i`, column `j`.
fn cmat_unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = cmat_zero(n);
    m[i][j] = CRat::from_rat(Rat::one());
    m
}

fn cmat_add(a: &CMat, b: &CMat) -> CMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

fn cmat_sub(a: &CMat, b: &CMat) -> CMat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

fn cmat_scale(a: &CMat, c: &CRat) -> CMat {
    a.iter().map(|r| r.iter().map(|x| x.mul(c)).collect()).collect()
}

fn cmat_mul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let mut out = cmat_zero(n);
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for (j, bkj) in b[k].iter().enumerate() {
                if bkj.is_zero() {
                    continue;
                }
                out[i][j] = out[i][j].add(&aik.mul(bkj));
            }
        }
    }
    out
}

fn cmat_comm(a: &CMat, b: &CMat) -> CMat {
    cmat_sub(&cmat_mul(a, b), &cmat_mul(b, a))
}

/// Conjugate transpose.
fn cmat_dagger(a: &CMat) -> CMat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

fn cmat_is_zero(a: &CMat) -> bool {
    a.iter().all(|r| r.iter().all(CRat::is_zero))
}

/// Real coordinates of a complex matrix: all `re` entries, then all `im`.
fn cmat_flatten(a: &CMat) -> Vec<Rat> {
    let mut out = Vec::with_capacity(2 * a.len() * a.len());
    for row in a {
        for x in row {
            out.push(x.re.clone());
        }
    }
    for row in a {
        for x in row {
            out.push(x.im.clone());
        }
    }
    out
}

/// Element of the doubled algebra: a pair of matrices bracketed leg by leg.
type Pair = (CMat, CMat);

fn pair_comm(a: &Pair, b: &Pair) -> Pair {
    (cmat_comm(&a.0, &b.0), cmat_comm(&a.1, &b.1))
}

fn pair_scale(a: &Pair, r: &Rat) -> Pair {
    let c = CRat::from_rat(r.clone());
    (cmat_scale(&a.0, &c), cmat_scale(&a.1, &c))
}

fn pair_sub(a: &Pair, b: &Pair) -> Pair {
    (cmat_sub(&a.0, &b.0), cmat_sub(&a.1, &b.1))
}

fn pair_is_zero(a: &Pair) -> bool {
    cmat_is_zero(&a.0) && cmat_is_zero(&a.1)
}

/// Star of the doubled algebra: swap the legs and take conjugate transposes.
fn pair_star(a: &Pair) -> Pair {
    (cmat_dagger(&a.1), cmat_dagger(&a.0))
}

fn pair_flatten(a: &Pair) -> Vec<Rat> {
    let mut out = cmat_flatten(&a.0);
    out.extend(cmat_flatten(&a.1));
    out
}

/// Row-reduced basis of a fixed independent vector list, able to express
/// arbitrary vectors as exact coordinate tuples over the original list.
struct SpanBasis {
    /// Rows `(reduced vector, combination over the original list)`, ordered
    /// by strictly increasing pivot column, each normalized to pivot `1`.
    rows: Vec<(Vec<Rat>, Vec<Rat>)>,
    nbasis: usize,
}

impl SpanBasis {
    fn from_vectors(vectors: &[Vec<Rat>]) -> Option<SpanBasis> {
        let n = vectors.len();
        let mut basis = SpanBasis { rows: Vec::with_capacity(n), nbasis: n };
        for (i, v) in vectors.iter().enumerate() {
            let (mut r, mut combo) = basis.reduce(v);
            let pivot = r.iter().position(|x| !x.is_zero())?;
            let inv = Rat::one() / r[pivot].clone();
            for x in r.iter_mut() {
                *x *= &inv;
            }
            for x in combo.iter_mut() {
                *x = -(x.clone() * &inv);
            }
            combo[i] += &inv;
            let pos = basis.rows.partition_point(|(row, _)| {
                row.iter().position(|x| !x.is_zero()).unwrap() < pivot
            });
            basis.rows.insert(pos, (r, combo));
        }
        Some(basis)
    }

    /// Remainder of `v` after elimination, with the combination used, so that
    /// `v = remainder + combination . original_list`.
    fn reduce(&self, v: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
        let mut r = v.to_vec();
        let mut combo = vec![Rat::zero(); self.nbasis];
        for (row, rc) in &self.rows {
            let p = row.iter().position(|x| !x.is_zero()).unwrap();
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                *x -= &c * y;
            }
            for (x, y) in combo.iter_mut().zip(rc) {
                *x += &c * y;
            }
        }
        (r, combo)
    }

    /// Exact coordinates of `v` over the original list, or `None` if `v` is
    /// outside the span.
    fn express(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        let (r, combo) = self.reduce(v);
        if r.iter().all(Rat::is_zero) {
            Some(combo)
        } else {
            None
        }
    }
}

/// Growing row space used for rank bookkeeping while closing a span.
struct SpanGrow {
    rows: Vec<Vec<Rat>>,
}

impl SpanGrow {
    fn new() -> Self {
        SpanGrow { rows: Vec::new() }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v` if independent of the current rows; reports whether the
    /// span grew.
    fn insert(&mut self, v: &[Rat]) -> bool {
        let mut r = v.to_vec();
        for row in &self.rows {
            let p = row.iter().position(|x| !x.is_zero()).unwrap();
            if r[p].is_zero() {
                continue;
            }
            let c = r[p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                *x -= &c * y;
            }
        }
        let Some(pivot) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Rat::one() / r[pivot].clone();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        let pos = self.rows.partition_point(|row| {
            row.iter().position(|x| !x.is_zero()).unwrap() < pivot
        });
        self.rows.insert(pos, r);
        true
    }
}

/// A finite-dimensional Lie algebra with exact rational structure constants
/// in a fixed labeled basis, together with the basis matrix of its star map.
#[derive(Clone, Debug)]
pub struct LieAlgebraSC {
    pub labels: Vec<String>,
    /// `sc[i][j]` holds the coordinates of the bracket of basis elements
    /// `i` and `j`.
    pub sc: Vec<Vec<Vec<Rat>>>,
    /// Row `i` holds the coordinates of the star of basis element `i`; the
    /// map extends antilinearly, which is invisible on rational coordinates.
    pub star: Vec<Vec<Rat>>,
}

impl LieAlgebraSC {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Bracket of coordinate vectors.
    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out = vec![Rat::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (o, s) in out.iter_mut().zip(&self.sc[i][j]) {
                    *o += &c * s;
                }
            }
        }
        out
    }

    /// Star of a coordinate vector.
    pub fn star_apply(&self, x: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out = vec![Rat::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (o, s) in out.iter_mut().zip(&self.star[i]) {
                *o += xi * s;
            }
        }
        out
    }

    /// Killing form `B(x_i, x_j)` as the trace of composed adjoint maps.
    pub fn killing(&self) -> Vec<Vec<Rat>> {
        let n = self.dim();
        let mut b = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut t = Rat::zero();
                for m in 0..n {
                    for (k, c) in self.sc[j][m].iter().enumerate() {
                        if !c.is_zero() {
                            t += c * &self.sc[i][k][m];
                        }
                    }
                }
                b[i][j] = t.clone();
                b[j][i] = t;
            }
        }
        b
    }

    /// Antisymmetry, the Jacobi identity on all basis triples, involutivity
    /// of the star map, and star anti-multiplicativity.
    pub fn validate(&self) -> Result<(), ContractionError> {
        let n = self.dim();
        for i in 0..n {
            if self.sc[i][i].iter().any(|c| !c.is_zero()) {
                return Err(ContractionError::Closure(format!(
                    "bracket of {} with itself is nonzero",
                    self.labels[i]
                )));
            }
            for j in 0..n {
                for (c, d) in self.sc[i][j].iter().zip(&self.sc[j][i]) {
                    if !(c.clone() + d).is_zero() {
                        return Err(ContractionError::Closure(format!(
                            "bracket of {} and {} is not antisymmetric",
                            self.labels[i], self.labels[j]
                        )));
                    }
                }
            }
        }
        let unit = |i: usize| {
            let mut v = vec![Rat::zero(); n];
            v[i] = Rat::one();
            v
        };
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let mut acc = self.bracket(&self.sc[i][j], &unit(k));
                    for (a, b) in acc.iter_mut().zip(self.bracket(&self.sc[j][k], &unit(i))) {
                        *a += b;
                    }
                    for (a, b) in acc.iter_mut().zip(self.bracket(&self.sc[k][i], &unit(j))) {
                        *a += b;
                    }
                    if acc.iter().any(|c| !c.is_zero()) {
                        return Err(ContractionError::Closure(format!(
                            "Jacobi identity fails on {}, {}, {}",
                            self.labels[i], self.labels[j], self.labels[k]
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            let twice = self.star_apply(&self.star[i]);
            if twice != unit(i) {
                return Err(ContractionError::Closure(format!(
                    "star map is not involutive on {}",
                    self.labels[i]
                )));
            }
            for j in 0..n {
                let lhs = self.star_apply(&self.sc[i][j]);
                let rhs = self.bracket(&self.star[j], &self.star[i]);
                if lhs != rhs {
                    return Err(ContractionError::Closure(format!(
                        "star is not anti-multiplicative on {}, {}",
                        self.labels[i], self.labels[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Builds a structure-constant algebra from concrete elements, verifying
/// closure of brackets and the star map and then all Lie axioms.
fn algebra_from_elements<T>(
    labels: Vec<String>,
    elems: &[T],
    flatten: impl Fn(&T) -> Vec<Rat>,
    comm: impl Fn(&T, &T) -> T,
    star: impl Fn(&T) -> T,
) -> Result<LieAlgebraSC, ContractionError> {
    let flat: Vec<Vec<Rat>> = elems.iter().map(&flatten).collect();
    let basis = SpanBasis::from_vectors(&flat).ok_or_else(|| {
        ContractionError::Closure("declared spanning elements are dependent".into())
    })?;
    let n = elems.len();
    let mut sc = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let b = comm(&elems[i], &elems[j]);
            sc[i][j] = basis.express(&flatten(&b)).ok_or_else(|| {
                ContractionError::Closure(format!(
                    "bracket of {} and {} leaves the span",
                    labels[i], labels[j]
                ))
            })?;
        }
    }
    let mut star_rows = Vec::with_capacity(n);
    for i in 0..n {
        let s = star(&elems[i]);
        star_rows.push(basis.express(&flatten(&s)).ok_or_else(|| {
            ContractionError::Closure(format!("star of {} leaves the span", labels[i]))
        })?);
    }
    let alg = LieAlgebraSC { labels, sc, star: star_rows };
    alg.validate()?;
    Ok(alg)
}

/// Positive roots of series A rank `l` as index pairs `(i, j)` with
/// `i < j <= l`, standing for the sum of the simple roots `i..j`; ordered by
/// height, then by starting index.
fn type_a_roots(rank: usize) -> Vec<(usize, usize)> {
    let mut roots = Vec::new();
    for h in 1..=rank {
        for i in 0..=(rank - h) {
            roots.push((i, i + h));
        }
    }
    roots
}

fn root_label(i: usize, j: usize) -> String {
    (i..j).map(|t| t.to_string()).collect::<Vec<_>>().join("")
}

/// Product of the node signs over the simple-root content of a root.
fn eps_of_root(eps: &[Rat], i: usize, j: usize) -> Rat {
    (i..j).fold(Rat::one(), |acc, t| acc * &eps[t])
}

/// Cartan integer of series A.
fn cartan_a(r: usize, s: usize) -> i64 {
    if r == s {
        2
    } else if r + 1 == s || s + 1 == r {
        -1
    } else {
        0
    }
}

fn check_series_a(series: Series, rank: usize, eps: &[Rat]) -> Result<(), ContractionError> {
    if series != Series::A {
        return Err(ContractionError::UnsupportedSeries(series));
    }
    if rank == 0 {
        return Err(ContractionError::BadInput("rank must be positive".into()));
    }
    if eps.len() != rank {
        return Err(ContractionError::BadInput(format!(
            "expected {} node signs, got {}",
            rank,
            eps.len()
        )));
    }
    Ok(())
}

/// Raising matrix of a root: the elementary matrix `E_{i j}`. Together with
/// its transpose as the lowering vector this fixes the normalization freedom
/// for non-simple roots: conjugate transposition exchanges the two and the
/// simple commutators equal the coroots on the nose.
fn raising_matrix(n: usize, i: usize, j: usize) -> CMat {
    cmat_unit(n, i, j)
}

/// Coroot matrix of node `r`.
fn coroot_matrix(n: usize, r: usize) -> CMat {
    cmat_sub(&cmat_unit(n, r, r), &cmat_unit(n, r + 1, r + 1))
}

/// Labeled doubled basis: raising pairs, lowering pairs, coroot pairs.
fn doubled_basis(rank: usize, eps: &[Rat]) -> (Vec<String>, Vec<Pair>) {
    let n = rank + 1;
    let mut labels = Vec::new();
    let mut elems = Vec::new();
    for &(i, j) in &type_a_roots(rank) {
        let e = eps_of_root(eps, i, j);
        let xp = raising_matrix(n, i, j);
        labels.push(format!("a[{}]", root_label(i, j)));
        elems.push((cmat_scale(&xp, &CRat::from_rat(e)), xp));
    }
    for &(i, j) in &type_a_roots(rank) {
        let e = eps_of_root(eps, i, j);
        let xm = raising_matrix(n, j, i);
        labels.push(format!("b[{}]", root_label(i, j)));
        elems.push((xm.clone(), cmat_scale(&xm, &CRat::from_rat(e))));
    }
    for r in 0..rank {
        let h = coroot_matrix(n, r);
        labels.push(format!("h[{r}]"));
        elems.push((h.clone(), h));
    }
    (labels, elems)
}

/// The contracted algebra inside the doubled special linear algebra, with
/// its leg-swapping star. Dimension `l (l + 2)` for rank `l`.
pub fn build_g_eps(
    series: Series,
    rank: usize,
    eps: &[Rat],
) -> Result<LieAlgebraSC, ContractionError> {
    check_series_a(series, rank, eps)?;
    let (labels, elems) = doubled_basis(rank, eps);
    algebra_from_elements(labels, &elems, pair_flatten, pair_comm, pair_star)
}

/// The antihermitian real form: for each positive root the two combinations
/// `X^+ - eps X^-` and `i (X^+ + eps X^-)`, plus the imaginary coroots; all
/// structure constants come out real rational, and the star map is negation.
pub fn real_form_basis(
    series: Series,
    rank: usize,
    eps: &[Rat],
) -> Result<LieAlgebraSC, ContractionError> {
    check_series_a(series, rank, eps)?;
    let n = rank + 1;
    let iunit = CRat { re: Rat::zero(), im: Rat::one() };
    let mut labels = Vec::new();
    let mut elems: Vec<CMat> = Vec::new();
    for &(i, j) in &type_a_roots(rank) {
        let e = CRat::from_rat(eps_of_root(eps, i, j));
        let xp = raising_matrix(n, i, j);
        let xm = raising_matrix(n, j, i);
        labels.push(format!("x[{}]", root_label(i, j)));
        elems.push(cmat_sub(&xp, &cmat_scale(&xm, &e)));
        labels.push(format!("y[{}]", root_label(i, j)));
        elems.push(cmat_scale(&cmat_add(&xp, &cmat_scale(&xm, &e)), &iunit));
    }
    for r in 0..rank {
        labels.push(format!("ih[{r}]"));
        elems.push(cmat_scale(&coroot_matrix(n, r), &iunit));
    }
    let neg = CRat::from_rat(-Rat::one());
    algebra_from_elements(labels, &elems, cmat_flatten, cmat_comm, |m| cmat_scale(m, &neg))
}

/// Exact inertia `(positive, negative, zero)` of the Killing form.
pub fn killing_signature(alg: &LieAlgebraSC) -> (usize, usize, usize) {
    let inertia = symmetric_inertia(&alg.killing());
    (inertia.positive, inertia.negative, inertia.zero)
}

/// Closed-form Killing signature of `su(p, q)`: the sign pattern determines
/// boundary signs multiplying to the node signs, `p` counts the negative
/// ones, and the signature is `(2 p q, p^2 + q^2 - 1, 0)`.
pub fn su_signature_oracle(
    rank: usize,
    eps: &[Rat],
) -> Result<(usize, usize, usize), ContractionError> {
    let (p, q) = su_split(rank, eps)?;
    Ok((2 * p * q, p * p + q * q - 1, 0))
}

/// The `(p, q)` split of the real form for a `{+1,-1}` sign pattern, fixing
/// the first boundary sign to `+1`.
fn su_split(rank: usize, eps: &[Rat]) -> Result<(usize, usize), ContractionError> {
    if eps.len() != rank {
        return Err(ContractionError::BadInput(format!(
            "expected {} node signs, got {}",
            rank,
            eps.len()
        )));
    }
    let one = Rat::one();
    let mut sigma = true;
    let mut p = 0usize;
    for e in eps {
        if e != &one && e != &(-one.clone()) {
            return Err(ContractionError::BadInput(
                "signature oracle needs node signs in {+1, -1}".into(),
            ));
        }
        if e.is_negative() {
            sigma = !sigma;
        }
        if !sigma {
            p += 1;
        }
    }
    Ok((p, rank + 1 - p))
}

/// Outcome of checking the sign-twisted Chevalley presentation against the
/// doubled realization.
#[derive(Clone, Debug)]
pub struct PresentationReport {
    /// Individual relation instances checked.
    pub checked: usize,
    pub failures: Vec<String>,
    /// Dimension of the subalgebra generated by the simple raising, simple
    /// lowering, and coroot images.
    pub generated_dim: usize,
    pub expected_dim: usize,
    /// Graded dimensions of the free Lie algebra on the raising generators
    /// modulo the Serre elements, through one degree past the top height.
    pub nilpotent_dims: Vec<usize>,
    pub expected_nilpotent_dims: Vec<usize>,
}

impl PresentationReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the defining relations of the sign-twisted presentation on the
/// doubled realization: commuting coroots, Cartan-integer weights, Serre
/// relations, and the sign-modified raising-lowering pairing. Also verifies
/// that the images generate the whole algebra, and bounds the presented
/// dimension by the graded dimensions of the free Lie algebra on the raising
/// generators modulo the Serre elements, which vanish one degree past the
/// top root height; with the triangular spanning of the doubled algebra this
/// pins the presented algebra to dimension `l (l + 2)`.
pub fn verify_presentation(
    series: Series,
    rank: usize,
    eps: &[Rat],
) -> Result<PresentationReport, ContractionError> {
    check_series_a(series, rank, eps)?;
    let n = rank + 1;
    let mut raise = Vec::new();
    let mut lower = Vec::new();
    let mut torus = Vec::new();
    for r in 0..rank {
        let xp = raising_matrix(n, r, r + 1);
        let xm = raising_matrix(n, r + 1, r);
        raise.push((cmat_scale(&xp, &CRat::from_rat(eps[r].clone())), xp));
        lower.push((xm.clone(), cmat_scale(&xm, &CRat::from_rat(eps[r].clone()))));
        let h = coroot_matrix(n, r);
        torus.push((h.clone(), h));
    }

    let mut checked = 0usize;
    let mut failures = Vec::new();
    let mut demand = |name: String, ok: bool| {
        checked += 1;
        if !ok {
            failures.push(name);
        }
    };

    for r in 0..rank {
        for s in 0..rank {
            demand(
                format!("[h[{r}], h[{s}]] = 0"),
                pair_is_zero(&pair_comm(&torus[r], &torus[s])),
            );
            let a = rat_i(cartan_a(r, s));
            demand(
                format!("[h[{r}], e[{s}]] = a({r},{s}) e[{s}]"),
                pair_is_zero(&pair_sub(&pair_comm(&torus[r], &raise[s]), &pair_scale(&raise[s], &a))),
            );
            demand(
                format!("[h[{r}], f[{s}]] = -a({r},{s}) f[{s}]"),
                pair_is_zero(&pair_sub(&pair_comm(&torus[r], &lower[s]), &pair_scale(&lower[s], &-a))),
            );
            let pairing = pair_comm(&raise[r], &lower[s]);
            let expected = if r == s {
                pair_scale(&torus[r], &eps[r])
            } else {
                pair_scale(&torus[0], &Rat::zero())
            };
            demand(
                format!("[e[{r}], f[{s}]] = delta eps[{r}] h[{r}]"),
                pair_is_zero(&pair_sub(&pairing, &expected)),
            );
            if r != s {
                let steps = (1 - cartan_a(r, s)) as usize;
                let mut u = raise[s].clone();
                for _ in 0..steps {
                    u = pair_comm(&raise[r], &u);
                }
                demand(format!("ad(e[{r}])^{steps}(e[{s}]) = 0"), pair_is_zero(&u));
                let mut v = lower[s].clone();
                for _ in 0..steps {
                    v = pair_comm(&lower[r], &v);
                }
                demand(format!("ad(f[{r}])^{steps}(f[{s}]) = 0"), pair_is_zero(&v));
            }
        }
    }

    // Bracket-closure of the generator images: the generated span must be the
    // whole doubled algebra.
    let mut span = SpanGrow::new();
    let mut reps: Vec<Pair> = Vec::new();
    for g in raise.iter().chain(&lower).chain(&torus) {
        if span.insert(&pair_flatten(g)) {
            reps.push(g.clone());
        }
    }
    let mut grew = true;
    while grew {
        grew = false;
        let cur = reps.clone();
        for x in &cur {
            for y in &cur {
                let b = pair_comm(x, y);
                if !pair_is_zero(&b) && span.insert(&pair_flatten(&b)) {
                    reps.push(b);
                    grew = true;
                }
            }
        }
    }
    let expected_dim = rank * (rank + 2);
    demand(
        format!("generated subalgebra has dimension {expected_dim}"),
        span.dim() == expected_dim,
    );

    let nilpotent_dims = serre_quotient_dims(rank);
    let mut expected_nilpotent_dims: Vec<usize> = vec![0; rank + 1];
    for &(i, j) in &type_a_roots(rank) {
        expected_nilpotent_dims[j - i - 1] += 1;
    }
    demand(
        "free Lie algebra modulo Serre elements matches the root grading".into(),
        nilpotent_dims == expected_nilpotent_dims,
    );

    Ok(PresentationReport {
        checked,
        failures,
        generated_dim: span.dim(),
        expected_dim,
        nilpotent_dims,
        expected_nilpotent_dims,
    })
}

/// Free associative word with rational coefficients, holding Lie elements
/// through their tensor expansion.
type Tensor = BTreeMap<Vec<usize>, Rat>;

fn tensor_gen(r: usize) -> Tensor {
    BTreeMap::from([(vec![r], Rat::one())])
}

fn tensor_bracket(x: &Tensor, y: &Tensor) -> Tensor {
    let mut out: Tensor = BTreeMap::new();
    let mut accum = |w: Vec<usize>, c: Rat| {
        *out.entry(w).or_insert_with(Rat::zero) += c;
    };
    for (wx, cx) in x {
        for (wy, cy) in y {
            let c = cx * cy;
            let mut xy = wx.clone();
            xy.extend_from_slice(wy);
            accum(xy, c.clone());
            let mut yx = wy.clone();
            yx.extend_from_slice(wx);
            accum(yx, -c);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn tensor_rank(elems: &[Tensor]) -> usize {
    let mut cols: BTreeMap<&[usize], usize> = BTreeMap::new();
    for t in elems {
        for w in t.keys() {
            let next = cols.len();
            cols.entry(w).or_insert(next);
        }
    }
    let rows: Vec<Vec<Rat>> = elems
        .iter()
        .map(|t| {
            let mut row = vec![Rat::zero(); cols.len()];
            for (w, c) in t {
                row[cols[w.as_slice()]] = c.clone();
            }
            row
        })
        .collect();
    rank(&rows)
}

/// Graded dimensions, in degrees `1 ..= rank + 1`, of the free Lie algebra
/// on the raising generators modulo the Lie ideal of the Serre elements.
/// Left-normed brackets span each graded piece of the free Lie algebra, and
/// left-normed brackets into the Serre elements span the ideal, so each
/// dimension is an exact difference of tensor-expansion ranks.
fn serre_quotient_dims(rank: usize) -> Vec<usize> {
    let gens: Vec<Tensor> = (0..rank).map(tensor_gen).collect();
    let mut serre: Vec<(usize, Tensor)> = Vec::new();
    for r in 0..rank {
        for s in 0..rank {
            if r == s {
                continue;
            }
            let steps = (1 - cartan_a(r, s)) as usize;
            let mut u = tensor_gen(s);
            for _ in 0..steps {
                u = tensor_bracket(&gens[r], &u);
            }
            serre.push((steps + 1, u));
        }
    }
    let mut dims = Vec::new();
    let mut lie_layer = gens.clone();
    let mut ideal_layer: Vec<Tensor> = Vec::new();
    for d in 1..=(rank + 1) {
        if d > 1 {
            lie_layer = gens
                .iter()
                .flat_map(|g| lie_layer.iter().map(|v| tensor_bracket(g, v)))
                .collect();
            ideal_layer = gens
                .iter()
                .flat_map(|g| ideal_layer.iter().map(|v| tensor_bracket(g, v)))
                .collect();
        }
        for (deg, s) in &serre {
            if *deg == d {
                ideal_layer.push(s.clone());
            }
        }
        dims.push(tensor_rank(&lie_layer) - tensor_rank(&ideal_layer));
    }
    dims
}

/// Rescales the raising and lowering generators by positive rationals,
/// dividing each node sign by the square of its scale; returns the target
/// sign pattern after verifying that the diagonal map matches every bracket
/// of the two structure-constant algebras.
pub fn rescale_equivalence(
    series: Series,
    rank: usize,
    eps: &[Rat],
    scale: &[Rat],
) -> Result<Vec<Rat>, ContractionError> {
    check_series_a(series, rank, eps)?;
    if scale.len() != rank {
        return Err(ContractionError::BadInput(format!(
            "expected {} scale factors, got {}",
            rank,
            scale.len()
        )));
    }
    if scale.iter().any(|s| !s.is_positive()) {
        return Err(ContractionError::BadInput(
            "scale factors must be positive".into(),
        ));
    }
    let target: Vec<Rat> = eps
        .iter()
        .zip(scale)
        .map(|(e, s)| e / (s * s))
        .collect();
    let source_alg = build_g_eps(series, rank, eps)?;
    let target_alg = build_g_eps(series, rank, &target)?;
    let roots = type_a_roots(rank);
    let mut diag = Vec::with_capacity(source_alg.dim());
    for &(i, j) in &roots {
        diag.push((i..j).fold(Rat::one(), |acc, t| acc * &scale[t]));
    }
    for &(i, j) in &roots {
        diag.push((i..j).fold(Rat::one(), |acc, t| acc * &scale[t]));
    }
    for _ in 0..rank {
        diag.push(Rat::one());
    }
    let n = source_alg.dim();
    for i in 0..n {
        for j in 0..n {
            let lhs: Vec<Rat> = source_alg.sc[i][j]
                .iter()
                .zip(&diag)
                .map(|(c, d)| c * d)
                .collect();
            let rhs: Vec<Rat> = target_alg.sc[i][j]
                .iter()
                .map(|c| c * &diag[i] * &diag[j])
                .collect();
            if lhs != rhs {
                return Err(ContractionError::Closure(format!(
                    "rescaling map fails on {} and {}",
                    source_alg.labels[i], source_alg.labels[j]
                )));
            }
        }
    }
    Ok(target)
}

/// One line of the classification table for `{+1,-1}` sign patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationRow {
    pub eps: Vec<i64>,
    pub signature: (usize, usize, usize),
    pub form: String,
}

/// Classification of the real forms over all `{+1,-1}` sign patterns of the
/// given rank: each computed Killing signature is checked against the
/// special unitary oracle before the row is emitted.
pub fn type_a_table(rank: usize) -> Result<Vec<ClassificationRow>, ContractionError> {
    if rank == 0 {
        return Err(ContractionError::BadInput("rank must be positive".into()));
    }
    let mut rows = Vec::new();
    for mask in 0u32..(1u32 << rank) {
        let signs: Vec<i64> = (0..rank)
            .map(|r| if mask >> r & 1 == 0 { 1 } else { -1 })
            .collect();
        let eps: Vec<Rat> = signs.iter().map(|&s| rat_i(s)).collect();
        let alg = real_form_basis(Series::A, rank, &eps)?;
        let signature = killing_signature(&alg);
        let oracle = su_signature_oracle(rank, &eps)?;
        if signature != oracle {
            return Err(ContractionError::Closure(format!(
                "Killing signature {signature:?} disagrees with the split-form value {oracle:?}"
            )));
        }
        let (p, q) = su_split(rank, &eps)?;
        let form = if p == 0 {
            format!("su({})", rank + 1)
        } else {
            format!("su({p},{q})")
        };
        rows.push(ClassificationRow { eps: signs, signature, form });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat_pq;

    fn signs(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&s| rat_i(s)).collect()
    }

    #[test]
    fn rank_one_brackets_follow_the_sign() {
        for s in [1i64, 0, -1] {
            let alg = build_g_eps(Series::A, 1, &signs(&[s])).unwrap();
            assert_eq!(alg.dim(), 3);
            assert_eq!(alg.labels, vec!["a[0]", "b[0]", "h[0]"]);
            // The raising-lowering pairing carries the sign.
            assert_eq!(alg.sc[0][1], vec![Rat::zero(), Rat::zero(), rat_i(s)]);
            // Coroot weights are untouched by the sign.
            assert_eq!(alg.sc[2][0], vec![rat_i(2), Rat::zero(), Rat::zero()]);
            assert_eq!(alg.sc[2][1], vec![Rat::zero(), rat_i(-2), Rat::zero()]);
            // Star swaps the raising and lowering images.
            assert_eq!(alg.star[0], vec![Rat::zero(), Rat::one(), Rat::zero()]);
            assert_eq!(alg.star[1], vec![Rat::one(), Rat::zero(), Rat::zero()]);
            assert_eq!(alg.star[2], vec![Rat::zero(), Rat::zero(), Rat::one()]);
        }
    }

    #[test]
    fn axioms_hold_across_sign_grids() {
        for rank in 1usize..=3 {
            let count = 3usize.pow(rank as u32);
            for idx in 0..count {
                let mut k = idx;
                let mut pattern = Vec::new();
                for _ in 0..rank {
                    pattern.push([1i64, 0, -1][k % 3]);
                    k /= 3;
                }
                let eps = signs(&pattern);
                let alg = build_g_eps(Series::A, rank, &eps).unwrap();
                assert_eq!(alg.dim(), rank * (rank + 2), "doubled {pattern:?}");
                let real = real_form_basis(Series::A, rank, &eps).unwrap();
                assert_eq!(real.dim(), rank * (rank + 2), "real form {pattern:?}");
            }
        }
    }

    #[test]
    fn rank_one_killing_signatures() {
        let compact = real_form_basis(Series::A, 1, &signs(&[1])).unwrap();
        assert_eq!(killing_signature(&compact), (0, 3, 0));
        let split = real_form_basis(Series::A, 1, &signs(&[-1])).unwrap();
        assert_eq!(killing_signature(&split), (2, 1, 0));
        let degenerate = real_form_basis(Series::A, 1, &signs(&[0])).unwrap();
        assert_eq!(killing_signature(&degenerate), (0, 1, 2));
    }

    #[test]
    fn degenerate_patterns_have_killing_radical() {
        let alg = real_form_basis(Series::A, 2, &signs(&[0, 0])).unwrap();
        let (pos, neg, zero) = killing_signature(&alg);
        assert!(zero > 0);
        assert_eq!(pos + neg + zero, 8);
    }

    #[test]
    fn classification_table_matches_the_unitary_forms() {
        let rows = type_a_table(1).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].form, "su(2)");
        assert_eq!(rows[0].signature, (0, 3, 0));
        assert_eq!(rows[1].form, "su(1,1)");
        assert_eq!(rows[1].signature, (2, 1, 0));

        let rows = type_a_table(2).unwrap();
        assert_eq!(rows.len(), 4);
        let find = |eps: &[i64]| rows.iter().find(|r| r.eps == eps).unwrap();
        assert_eq!(find(&[1, 1]).form, "su(3)");
        assert_eq!(find(&[1, 1]).signature, (0, 8, 0));
        assert_eq!(find(&[-1, 1]).form, "su(2,1)");
        assert_eq!(find(&[-1, 1]).signature, (4, 4, 0));
        assert_eq!(find(&[1, -1]).form, "su(1,2)");
        assert_eq!(find(&[1, -1]).signature, (4, 4, 0));
        assert_eq!(find(&[-1, -1]).form, "su(1,2)");
        assert_eq!(find(&[-1, -1]).signature, (4, 4, 0));

        for row in type_a_table(3).unwrap() {
            assert_eq!(row.signature.2, 0, "{:?} is semisimple", row.eps);
        }
    }

    #[test]
    fn presentation_holds_with_sharp_dimension_bounds() {
        let rep = verify_presentation(Series::A, 1, &signs(&[-1])).unwrap();
        assert!(rep.all_pass(), "failures: {:?}", rep.failures);
        assert_eq!(rep.generated_dim, 3);
        assert_eq!(rep.nilpotent_dims, vec![1, 0]);

        let rep = verify_presentation(Series::A, 2, &signs(&[1, 0])).unwrap();
        assert!(rep.all_pass(), "failures: {:?}", rep.failures);
        assert_eq!(rep.generated_dim, 8);
        assert_eq!(rep.nilpotent_dims, vec![2, 1, 0]);

        let rep = verify_presentation(Series::A, 3, &signs(&[-1, 0, 1])).unwrap();
        assert!(rep.all_pass(), "failures: {:?}", rep.failures);
        assert_eq!(rep.generated_dim, 15);
        assert_eq!(rep.nilpotent_dims, vec![3, 2, 1, 0]);
    }

    #[test]
    fn rescaling_by_positive_squares_is_an_isomorphism() {
        let target = rescale_equivalence(Series::A, 2, &signs(&[4, 1]), &[rat_i(2), rat_i(1)])
            .unwrap();
        assert_eq!(target, signs(&[1, 1]));
        let target = rescale_equivalence(Series::A, 1, &signs(&[-9]), &[rat_i(3)]).unwrap();
        assert_eq!(target, signs(&[-1]));
        let target =
            rescale_equivalence(Series::A, 2, &signs(&[0, 1]), &[rat_pq(1, 2), rat_i(1)]).unwrap();
        assert_eq!(target, vec![Rat::zero(), Rat::one()]);
    }

    #[test]
    fn unsupported_inputs_are_rejected() {
        assert!(matches!(
            build_g_eps(Series::G, 2, &signs(&[1, 1])),
            Err(ContractionError::UnsupportedSeries(Series::G))
        ));
        assert!(build_g_eps(Series::A, 2, &signs(&[1])).is_err());
        assert!(su_signature_oracle(1, &signs(&[0])).is_err());
        assert!(rescale_equivalence(Series::A, 1, &signs(&[1]), &[rat_i(-2)]).is_err());
    }
}
