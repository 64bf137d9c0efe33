//! Sign-modified central characters, candidate highest weights sharing a
//! central character, and central elements built from torus generators.
//!
//! Provides:
//! - `central_character`: the Weyl-sum value
//!   `sum_w eps_{omega - w omega} q^{-2(w omega, rho)} lambda_{-4 w omega}`
//!   of a highest-weight character on the spanning central element attached
//!   to a dominant weight.
//! - `same_central_character`: exact agreement on a finite separating test
//!   set of dominant weights.
//! - `orbit_candidates`: for a parabolic subgroup choice, the finitely many
//!   exponent characters whose central characters can coincide with the
//!   given one, computed by exact linear algebra on exponents.
//! - `central_element_from`: inside the finite adjoint closure of
//!   `K_omega^{-4}`, the one-dimensional invariant line; returns the
//!   central element normalized at its `K_{-4 omega}` coefficient, after
//!   verifying centrality modulo the Serre ideal and matching its torus
//!   part against the weight-multiplicity character sum up to one scalar.

use crate::cogroupoid::{adjoint_action, locally_finite_closure, CogroupoidError};
use crate::linalg::kernel_basis;
use crate::qea::{AlgebraCtx, AlgElem, QeaError, SerreReducer, TermKey};
use crate::root_data::{
    weyl_group, EpsChar, LambdaChar, RootDataError, RootDatum, Weight,
};
use crate::scalars::{rat_i, LaurentFrac, Rat};
use num::Zero;
use std::collections::BTreeSet;
use std::fmt;
use std::rc::Rc;

/// Errors from central-character computations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HcError {
    RootData(RootDataError),
    Algebra(QeaError),
    Closure(CogroupoidError),
    /// The invariant subspace of the closure did not have dimension one.
    InvariantSpaceDim { dim: usize },
    /// Exponent-level candidate enumeration needs a `q`-power character.
    NumericCharacter,
}

impl fmt::Display for HcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HcError::RootData(e) => write!(f, "root datum error: {e}"),
            HcError::Algebra(e) => write!(f, "algebra error: {e}"),
            HcError::Closure(e) => write!(f, "closure error: {e}"),
            HcError::InvariantSpaceDim { dim } => {
                write!(f, "invariant subspace has dimension {dim}, expected 1")
            }
            HcError::NumericCharacter => {
                write!(f, "candidate enumeration requires a q-power character")
            }
        }
    }
}

impl std::error::Error for HcError {}

impl From<RootDataError> for HcError {
    fn from(e: RootDataError) -> Self {
        HcError::RootData(e)
    }
}

impl From<QeaError> for HcError {
    fn from(e: QeaError) -> Self {
        HcError::Algebra(e)
    }
}

impl From<CogroupoidError> for HcError {
    fn from(e: CogroupoidError) -> Self {
        HcError::Closure(e)
    }
}

/// The value of a highest-weight character on the spanning central element
/// attached to a dominant weight.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralCharacterValue {
    pub omega: Weight,
    pub value: LaurentFrac,
}

impl CentralCharacterValue {
    pub fn compute(
        datum: &Rc<RootDatum>,
        lambda: &LambdaChar,
        eps: &EpsChar,
        omega: &Weight,
        weyl_cap: usize,
    ) -> Result<Self, HcError> {
        assert!(omega.is_dominant(), "central characters are indexed by dominant weights");
        let all: Vec<usize> = (0..datum.rank).collect();
        let group = weyl_group(datum, &all, weyl_cap)?;
        let rho = datum.rho();
        let mut acc = LaurentFrac::zero();
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        for w in &group {
            let womega = w.apply(omega);
            if !seen.insert(womega.0.clone()) {
                continue;
            }
            let diff = datum
                .weight_to_root(&omega.sub(&womega))
                .expect("omega - w omega lies in the root lattice");
            let e = eps.eps_value(&diff);
            if e.is_zero() {
                continue;
            }
            let pw = datum.pairing_ww(&womega, &rho);
            let q_part = datum.q_pow(&(-rat_i(2) * pw));
            let lam = lambda.value_symbolic(datum, &womega.scale(-4));
            acc = acc.add(&q_part.mul(&lam).scale(&e));
        }
        Ok(CentralCharacterValue { omega: omega.clone(), value: acc })
    }
}

/// Exact central-character value; see `CentralCharacterValue`.
pub fn central_character(
    datum: &Rc<RootDatum>,
    lambda: &LambdaChar,
    eps: &EpsChar,
    omega: &Weight,
    weyl_cap: usize,
) -> Result<LaurentFrac, HcError> {
    Ok(CentralCharacterValue::compute(datum, lambda, eps, omega, weyl_cap)?.value)
}

/// The default separating test set: fundamental weights, `rho`, and
/// `rho + omega_r`.
pub fn default_test_set(datum: &RootDatum) -> Vec<Weight> {
    let mut out: Vec<Weight> = (0..datum.rank).map(|r| Weight::fundamental(datum.rank, r)).collect();
    let rho = datum.rho();
    for r in 0..datum.rank {
        out.push(rho.add(&Weight::fundamental(datum.rank, r)));
    }
    out.push(rho);
    out
}

/// Whether two characters agree on all central characters from the test
/// set (defaulting to `default_test_set` when empty).
pub fn same_central_character(
    datum: &Rc<RootDatum>,
    lambda: &LambdaChar,
    lambda2: &LambdaChar,
    eps: &EpsChar,
    test_set: &[Weight],
    weyl_cap: usize,
) -> Result<bool, HcError> {
    let default;
    let set = if test_set.is_empty() {
        default = default_test_set(datum);
        &default
    } else {
        test_set
    };
    for omega in set {
        let a = central_character(datum, lambda, eps, omega, weyl_cap)?;
        let b = central_character(datum, lambda2, eps, omega, weyl_cap)?;
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For each element of the parabolic subgroup generated by the reflections
/// at `s_nodes`, the unique exponent character matching the twisted
/// character data: `e'(omega_i) = e(w omega_i) + ((w omega_i, rho) -
/// (omega_i, rho)) / 2`. Duplicates removed.
pub fn orbit_candidates(
    datum: &Rc<RootDatum>,
    lambda: &LambdaChar,
    s_nodes: &[usize],
    weyl_cap: usize,
) -> Result<Vec<LambdaChar>, HcError> {
    if lambda.is_numeric() {
        return Err(HcError::NumericCharacter);
    }
    let group = weyl_group(datum, s_nodes, weyl_cap)?;
    let rho = datum.rho();
    let mut out: Vec<LambdaChar> = Vec::new();
    for w in &group {
        let exps: Vec<Rat> = (0..datum.rank)
            .map(|i| {
                let omega_i = Weight::fundamental(datum.rank, i);
                let womega = w.apply(&omega_i);
                let shift =
                    (datum.pairing_ww(&womega, &rho) - datum.pairing_ww(&omega_i, &rho)) / rat_i(2);
                lambda.exponent_of(&womega).expect("q-power mode checked above") + shift
            })
            .collect();
        let cand = LambdaChar::from_exponents(datum, exps)?;
        if !out.contains(&cand) {
            out.push(cand);
        }
    }
    Ok(out)
}

/// The torus sum `sum_nu dim (V_omega)_nu sum_w eps_{omega - w nu}
/// q^{-2(w nu, rho)} K_{-4 w nu}` over dominant weights `nu` of the
/// finite-dimensional module with highest weight `omega`.
pub fn modified_character_torus_form(
    ctx: &Rc<AlgebraCtx>,
    omega: &Weight,
    weyl_cap: usize,
) -> Result<AlgElem, HcError> {
    let datum = &ctx.datum;
    assert!(omega.is_dominant());
    let all: Vec<usize> = (0..datum.rank).collect();
    let group = weyl_group(datum, &all, weyl_cap)?;
    let rho = datum.rho();
    // Bound the support: omega - nu is dominated by omega - w0 omega.
    let mut height_bound = 0i64;
    for w in &group {
        let diff = datum
            .weight_to_root(&omega.sub(&w.apply(omega)))
            .expect("orbit differences lie in the root lattice");
        height_bound = height_bound.max(diff.height());
    }
    let mut out = AlgElem::zero(ctx);
    for beta in datum.nonneg_root_combos_up_to(height_bound) {
        let nu = omega.sub(&datum.root_to_weight(&beta));
        if !nu.is_dominant() {
            continue;
        }
        let mult = datum.weight_multiplicity(omega, &nu);
        if mult == 0 {
            continue;
        }
        for w in &group {
            let wnu = w.apply(&nu);
            let diff = datum
                .weight_to_root(&omega.sub(&wnu))
                .expect("omega - w nu lies in the root lattice");
            let e = ctx.eps.eps_value(&diff);
            if e.is_zero() {
                continue;
            }
            let pw = datum.pairing_ww(&wnu, &rho);
            let coeff = datum
                .q_pow(&(-rat_i(2) * pw))
                .scale(&(e * rat_i(mult as i64)));
            let term = AlgElem::k_point(ctx, wnu.scale(-4)).scale(&coeff);
            out = out.add(&term);
        }
    }
    Ok(out)
}

/// The central element spanning the invariant line of the adjoint closure
/// of `K_omega^{-4}` inside the algebra with first index `eps` and second
/// index all-ones, normalized so its `K_{-4 omega}` coefficient is one.
///
/// Verifies, before returning: the invariant line is one-dimensional; the
/// element commutes with every generator modulo the Serre ideal; and its
/// torus part is proportional to `modified_character_torus_form`.
pub fn central_element_from(
    datum: &Rc<RootDatum>,
    eps: &EpsChar,
    omega: &Weight,
    closure_cap: usize,
    weyl_cap: usize,
) -> Result<AlgElem, HcError> {
    assert!(omega.is_dominant(), "central elements are indexed by dominant weights");
    let rank = datum.rank;
    let ctx = AlgebraCtx::new(datum.clone(), eps.clone(), EpsChar::plus(rank));
    let seed = AlgElem::k_point(&ctx, omega.scale(-4));
    let closure = locally_finite_closure(&seed, closure_cap)?;
    let basis = closure.basis;
    let n = basis.len();

    // Invariance constraints: annihilated by the raising and lowering
    // generators, fixed by the torus generators of the acting algebra.
    let hctx = AlgebraCtx::new(datum.clone(), EpsChar::plus(rank), EpsChar::plus(rank));
    let mut reducer = SerreReducer::new(&ctx);
    let mut rows: Vec<Vec<LaurentFrac>> = Vec::new();
    let push_constraint = |images: Vec<AlgElem>, rows: &mut Vec<Vec<LaurentFrac>>| {
        let mut keys: BTreeSet<TermKey> = BTreeSet::new();
        for img in &images {
            keys.extend(img.terms.keys().cloned());
        }
        for key in keys {
            rows.push(
                images
                    .iter()
                    .map(|img| img.terms.get(&key).cloned().unwrap_or_else(LaurentFrac::zero))
                    .collect(),
            );
        }
    };
    for r in 0..rank {
        for h in [AlgElem::gen_e(&hctx, r), AlgElem::gen_f(&hctx, r)] {
            let images: Vec<AlgElem> = basis
                .iter()
                .map(|b| {
                    let moved = adjoint_action(b, &h).expect("contexts match");
                    reducer.reduce_elem(&moved)
                })
                .collect();
            push_constraint(images, &mut rows);
        }
        let k = AlgElem::k_point(&hctx, Weight::fundamental(rank, r));
        let images: Vec<AlgElem> = basis
            .iter()
            .map(|b| {
                let moved = adjoint_action(b, &k).expect("contexts match");
                reducer.reduce_elem(&moved.sub(b))
            })
            .collect();
        push_constraint(images, &mut rows);
    }
    let kernel = kernel_basis(&rows, n);
    if kernel.len() != 1 {
        return Err(HcError::InvariantSpaceDim { dim: kernel.len() });
    }
    let mut z = AlgElem::zero(&ctx);
    for (b, c) in basis.iter().zip(&kernel[0]) {
        z = z.add(&b.scale(c));
    }
    let anchor = TermKey::torus(omega.scale(-4));
    let lead = z.terms.get(&anchor).cloned().expect("K_{-4 omega} coefficient present");
    z = z.scale(&lead.inv().expect("leading coefficient nonzero"));

    // Centrality, modulo the Serre ideal.
    let mut gens: Vec<AlgElem> = Vec::new();
    for r in 0..rank {
        gens.push(AlgElem::gen_e(&ctx, r));
        gens.push(AlgElem::gen_f(&ctx, r));
        gens.push(AlgElem::k_point(&ctx, Weight::fundamental(rank, r)));
    }
    for g in &gens {
        let comm = z.mul(g)?.sub(&g.mul(&z)?);
        assert!(
            reducer.is_zero_mod_serre(&comm),
            "constructed element must be central modulo the Serre ideal"
        );
    }

    // Torus part matches the weight-multiplicity character sum up to one
    // global scalar.
    let expected = modified_character_torus_form(&ctx, omega, weyl_cap)?;
    let tz = z.tau();
    let (first_key, first_val) =
        expected.terms.iter().next().expect("character sum is nonzero");
    let got = tz.terms.get(first_key).cloned().unwrap_or_else(LaurentFrac::zero);
    let scalar = got.mul(&first_val.inv().expect("leading character coefficient nonzero"));
    assert_eq!(
        tz,
        expected.scale(&scalar),
        "torus part must be proportional to the character sum"
    );
    Ok(z)
}
