//! Affine Hecke algebras with exact Laurent coefficients.
//!
//! Two presentations of the same algebra are implemented:
//!   - Bernstein: basis theta_x N_w omega, cross-commutation by the
//!     Bernstein-Lusztig-Zelevinsky relation (exact division, never numeric);
//!   - Iwahori-Matsumoto: basis T_z omega over the extended affine Weyl group
//!     z = t_x w, with per-node quadratic parameters.
//! Conversion uses theta_x = N_{t_{x+}} N_{t_{x-}}^{-1} and, for length-zero
//! z = t_x w, N_z = theta_x N_{w^{-1}}^{-1}.

use crate::intlin::{int, Int, IntMat};
use crate::laurent::Laurent;
use crate::rootdata::{pairing, reflection_matrix, BasedRootDatum, DatumError};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap, VecDeque};

#[derive(Debug, thiserror::Error)]
pub enum HeckeError {
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error("label table invalid: {0}")]
    BadLabels(String),
    #[error("omega data invalid: {0}")]
    BadOmega(String),
    #[error("correction term division not exact at simple root {root}, exponent {witness}")]
    NonExactDivision { root: usize, witness: String },
    #[error("orbit sum failed the center test against {0}")]
    CentralCorrection(String),
    #[error("{0}")]
    Unsupported(String),
}

/// Finite abelian group acting on the lattice by datum automorphisms.
/// Elements are coordinate vectors modulo `invariants`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaExt {
    pub rank: usize,
    pub invariants: Vec<Int>,
    pub actions: Vec<IntMat>,
}

impl OmegaExt {
    pub fn trivial(rank: usize) -> Self {
        OmegaExt { rank, invariants: vec![], actions: vec![] }
    }

    pub fn zero(&self) -> Vec<Int> {
        vec![Int::zero(); self.invariants.len()]
    }

    pub fn order(&self) -> Int {
        self.invariants.iter().fold(Int::one(), |a, b| a * b)
    }

    pub fn reduce(&self, c: &[Int]) -> Vec<Int> {
        c.iter()
            .zip(&self.invariants)
            .map(|(x, m)| ((x % m) + m) % m)
            .collect()
    }

    pub fn add(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        self.reduce(&a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<_>>())
    }

    pub fn neg(&self, a: &[Int]) -> Vec<Int> {
        self.reduce(&a.iter().map(|x| -x).collect::<Vec<_>>())
    }

    pub fn matrix(&self, c: &[Int]) -> IntMat {
        let mut m = IntMat::identity(self.rank);
        for (i, k) in self.reduce(c).iter().enumerate() {
            let e: usize = k.to_string().parse().unwrap();
            m = m.mul(&self.actions[i].pow(e));
        }
        m
    }

    pub fn elements(&self) -> Vec<Vec<Int>> {
        let mut out = vec![vec![]];
        for m in &self.invariants {
            let bound: i64 = m.to_string().parse().unwrap();
            let mut next = Vec::new();
            for e in out {
                for k in 0..bound {
                    let mut e2 = e.clone();
                    e2.push(int(k));
                    next.push(e2);
                }
            }
            out = next;
        }
        out
    }
}

/// A reduced root system in a lattice with labels and an extension group.
#[derive(Clone, Debug)]
pub struct AffineHeckeDatum {
    pub datum: BasedRootDatum,
    pub nparams: usize,
    /// simple position -> parameter index
    pub component_of: Vec<usize>,
    pub lambda: Vec<i64>,
    pub lambda_star: Vec<i64>,
    pub omega: OmegaExt,
    pub cocycle_trivial: bool,
    weyl_matrices: Vec<IntMat>,
    weyl_words: Vec<Vec<usize>>,
    windex: HashMap<IntMat, usize>,
    /// generators of the affine presentation: finite simples then one
    /// per irreducible component
    gens: Vec<AffGen>,
    n_finite_gens: usize,
}

#[derive(Clone, Debug)]
pub struct AffGen {
    pub trans: Vec<Int>,
    pub w: usize,
    pub exponent: i64,
    pub param: usize,
}

impl AffineHeckeDatum {
    pub fn new(
        datum: BasedRootDatum,
        nparams: usize,
        component_of: Vec<usize>,
        lambda: Vec<i64>,
        lambda_star: Vec<i64>,
        omega: OmegaExt,
    ) -> Result<Self, HeckeError> {
        let report = datum.validate()?;
        let k = datum.n_simple();
        if component_of.len() != k || lambda.len() != k || lambda_star.len() != k {
            return Err(HeckeError::BadLabels("label arrays must match the simple system".into()));
        }
        if component_of.iter().any(|&j| j >= nparams) {
            return Err(HeckeError::BadLabels("parameter index out of range".into()));
        }
        if lambda.iter().chain(&lambda_star).any(|&l| l < 0) {
            return Err(HeckeError::BadLabels("labels must be nonnegative".into()));
        }
        for i in 0..k {
            let co = datum.simple_coroot(i);
            let halvable = co.iter().all(|c| (c % int(2)).is_zero());
            if !halvable && lambda[i] != lambda_star[i] {
                return Err(HeckeError::BadLabels(format!(
                    "lambda* must equal lambda at simple root {} (coroot not divisible by 2)",
                    i
                )));
            }
        }

        let elems = datum.weyl_group_elements(200_000)?;
        let weyl_matrices: Vec<IntMat> = elems.iter().map(|e| e.matrix.clone()).collect();
        let weyl_words: Vec<Vec<usize>> = elems.iter().map(|e| e.word.clone()).collect();
        let windex: HashMap<IntMat, usize> =
            weyl_matrices.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();

        // W-orbits of roots, for label constancy and affine-node labels
        let orbit = root_orbits(&datum);
        for i in 0..k {
            for j in (i + 1)..k {
                if orbit[datum.simple[i]] == orbit[datum.simple[j]]
                    && (lambda[i] != lambda[j]
                        || lambda_star[i] != lambda_star[j]
                        || component_of[i] != component_of[j])
                {
                    return Err(HeckeError::BadLabels(format!(
                        "simple roots {} and {} are conjugate but labelled differently",
                        i, j
                    )));
                }
            }
        }

        // omega_ext: each generator must be a based datum automorphism of
        // finite order dividing its invariant, commuting with the others.
        if omega.rank != datum.rank
            || omega.actions.len() != omega.invariants.len()
        {
            return Err(HeckeError::BadOmega("shape mismatch".into()));
        }
        let rindex = datum.root_index();
        for (gi, a) in omega.actions.iter().enumerate() {
            let ad = a
                .dual_action()
                .map_err(|e| HeckeError::BadOmega(format!("generator {} not invertible: {}", gi, e)))?;
            for (ri, r) in datum.roots.iter().enumerate() {
                let img = a.mul_vec(r);
                let Some(&ti) = rindex.get(&img) else {
                    return Err(HeckeError::BadOmega(format!(
                        "generator {} does not permute the roots",
                        gi
                    )));
                };
                if ad.mul_vec(&datum.coroots[ri]) != datum.coroots[ti] {
                    return Err(HeckeError::BadOmega(format!(
                        "generator {} breaks the coroot pairing",
                        gi
                    )));
                }
            }
            for i in 0..k {
                let img = a.mul_vec(datum.simple_root(i));
                let pos = (0..k).find(|&j| datum.simple_root(j) == &img);
                let Some(j) = pos else {
                    return Err(HeckeError::BadOmega(format!(
                        "generator {} does not preserve the simple system",
                        gi
                    )));
                };
                if lambda[i] != lambda[j] || lambda_star[i] != lambda_star[j]
                    || component_of[i] != component_of[j]
                {
                    return Err(HeckeError::BadOmega(format!(
                        "generator {} moves simple root {} to {} across labels",
                        gi, i, j
                    )));
                }
            }
            let ord_bound: usize = omega.invariants[gi].to_string().parse().map_err(|_| {
                HeckeError::BadOmega("invariant out of range".into())
            })?;
            if ord_bound == 0 || !a.pow(ord_bound).is_identity() {
                return Err(HeckeError::BadOmega(format!(
                    "generator {} order does not divide its invariant",
                    gi
                )));
            }
            for b in &omega.actions {
                if a.mul(b) != b.mul(a) {
                    return Err(HeckeError::BadOmega("generators do not commute".into()));
                }
            }
        }

        // affine generator list: finite simples, then the lowest-root node of
        // each irreducible component (translation by the highest root)
        let mut gens: Vec<AffGen> = (0..k)
            .map(|i| AffGen {
                trans: vec![Int::zero(); datum.rank],
                w: windex[&datum.simple_reflection(i)],
                exponent: lambda[i],
                param: component_of[i],
            })
            .collect();
        let n_finite_gens = gens.len();
        for (_, comp) in &report.components {
            let hi = affine_node_root(&datum, comp)?;
            let theta = datum.roots[hi].clone();
            let s_theta = reflection_matrix(&theta, &datum.coroots[hi]);
            let rep = (0..k)
                .find(|&j| orbit[datum.simple[j]] == orbit[hi])
                .expect("affine node root conjugate to a simple root");
            gens.push(AffGen {
                trans: theta,
                w: windex[&s_theta],
                exponent: lambda_star[rep],
                param: component_of[rep],
            });
        }

        Ok(AffineHeckeDatum {
            datum,
            nparams,
            component_of,
            lambda,
            lambda_star,
            omega,
            cocycle_trivial: true,
            weyl_matrices,
            weyl_words,
            windex,
            gens,
            n_finite_gens,
        })
    }

    pub fn equal_parameter(datum: BasedRootDatum) -> Result<Self, HeckeError> {
        let k = datum.n_simple();
        let rank = datum.rank;
        AffineHeckeDatum::new(datum, 1, vec![0; k], vec![1; k], vec![1; k], OmegaExt::trivial(rank))
    }

    pub fn rank(&self) -> usize {
        self.datum.rank
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl_matrices.len()
    }

    pub fn w_matrix(&self, i: usize) -> &IntMat {
        &self.weyl_matrices[i]
    }

    pub fn w_word(&self, i: usize) -> &[usize] {
        &self.weyl_words[i]
    }

    pub fn w_index(&self, m: &IntMat) -> usize {
        self.windex[m]
    }

    pub fn w_len(&self, i: usize) -> usize {
        self.weyl_words[i].len()
    }

    pub fn simple_w(&self, i: usize) -> usize {
        self.windex[&self.datum.simple_reflection(i)]
    }

    pub fn gens(&self) -> &[AffGen] {
        &self.gens
    }

    pub fn n_finite_gens(&self) -> usize {
        self.n_finite_gens
    }

    /// v_j^{e} - v_j^{-e} for the quadratic relation of a generator.
    fn quad_scalar(&self, param: usize, exponent: i64) -> Laurent {
        Laurent::v_pow(self.nparams, param, exponent)
            .sub(&Laurent::v_pow(self.nparams, param, -exponent))
    }

    fn quad_scalar_simple(&self, i: usize) -> Laurent {
        self.quad_scalar(self.component_of[i], self.lambda[i])
    }

    /// <x, alpha_i^vee>
    fn pair_simple(&self, x: &[Int], i: usize) -> Int {
        pairing(x, self.datum.simple_coroot(i))
    }

    /// Sum of the positive roots; pairs to 2 with every simple coroot.
    pub fn dominance_vector(&self) -> Vec<Int> {
        let mut y = vec![Int::zero(); self.datum.rank];
        for p in self.datum.positive_roots() {
            for (a, b) in y.iter_mut().zip(&self.datum.roots[p]) {
                *a += b;
            }
        }
        y
    }
}

fn root_orbits(datum: &BasedRootDatum) -> Vec<usize> {
    // orbit id per root index under the Weyl group
    let rindex = datum.root_index();
    let mut orbit: Vec<usize> = (0..datum.roots.len()).collect();
    let gens: Vec<IntMat> = (0..datum.n_simple()).map(|i| datum.simple_reflection(i)).collect();
    loop {
        let mut changed = false;
        for ri in 0..datum.roots.len() {
            for g in &gens {
                let ti = rindex[&g.mul_vec(&datum.roots[ri])];
                let m = orbit[ri].min(orbit[ti]);
                if orbit[ri] != m || orbit[ti] != m {
                    orbit[ri] = m;
                    orbit[ti] = m;
                    changed = true;
                }
            }
        }
        if !changed {
            return orbit;
        }
    }
}

/// The root gamma of the component whose affine reflection t_gamma s_gamma
/// has Iwahori-Matsumoto length one; this is the translation part of the
/// affine simple generator completing the component's Coxeter diagram.
fn affine_node_root(datum: &BasedRootDatum, comp: &[usize]) -> Result<usize, HeckeError> {
    let mut found: Option<usize> = None;
    for (ri, r) in datum.roots.iter().enumerate() {
        let Some(c) = datum.simple_coordinates(r) else { continue };
        let supported = (0..datum.n_simple())
            .all(|j| comp.contains(&j) || c[j].is_zero());
        if !supported || !datum.is_positive_root(r) {
            continue;
        }
        let s = reflection_matrix(r, &datum.coroots[ri]);
        let mut len = Int::zero();
        for p in datum.positive_roots() {
            let pair = pairing(r, &datum.coroots[p]);
            // s is an involution, so s itself sends the root back
            let back = s.mul_vec(&datum.roots[p]);
            if datum.is_positive_root(&back) {
                len += pair.abs();
            } else {
                len += (pair - int(1)).abs();
            }
        }
        if len == Int::one() {
            if found.is_some() {
                return Err(HeckeError::BadLabels(
                    "ambiguous affine node for a component".into(),
                ));
            }
            found = Some(ri);
        }
    }
    found.ok_or_else(|| HeckeError::BadLabels("component has no length-one affine node".into()))
}

// ---------------------------------------------------------------------------
// commutative subalgebra: polynomials in theta_x with Laurent coefficients

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaPoly {
    pub nparams: usize,
    pub terms: BTreeMap<Vec<Int>, Laurent>,
}

impl ThetaPoly {
    pub fn zero(nparams: usize) -> Self {
        ThetaPoly { nparams, terms: BTreeMap::new() }
    }

    pub fn monomial(x: Vec<Int>, c: Laurent) -> Self {
        let mut t = ThetaPoly::zero(c.nparams);
        t.add_term(x, &c);
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, x: Vec<Int>, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(x.clone())
            .or_insert_with(|| Laurent::zero(self.nparams));
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn add(&self, other: &ThetaPoly) -> ThetaPoly {
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add_term(x.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &ThetaPoly) -> ThetaPoly {
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add_term(x.clone(), &c.neg());
        }
        out
    }

    pub fn mul(&self, other: &ThetaPoly) -> ThetaPoly {
        let mut out = ThetaPoly::zero(self.nparams);
        for (x1, c1) in &self.terms {
            for (x2, c2) in &other.terms {
                let x: Vec<Int> = x1.iter().zip(x2).map(|(a, b)| a + b).collect();
                out.add_term(x, &c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Laurent) -> ThetaPoly {
        let mut out = ThetaPoly::zero(self.nparams);
        for (x, k) in &self.terms {
            out.add_term(x.clone(), &k.mul(c));
        }
        out
    }

    /// theta_x -> theta_{Mx}
    pub fn map_lattice(&self, m: &IntMat) -> ThetaPoly {
        let mut out = ThetaPoly::zero(self.nparams);
        for (x, c) in &self.terms {
            out.add_term(m.mul_vec(x), c);
        }
        out
    }

    /// Exact quotient by (1 - theta_u), u != 0.  None when not exact.
    pub fn div_one_minus(&self, u: &[Int]) -> Option<ThetaPoly> {
        let pivot = u.iter().position(|c| !c.is_zero())?;
        let descending = u[pivot].is_negative();
        let mut r = self.clone();
        let mut q = ThetaPoly::zero(self.nparams);
        let cap = 1000 + 100 * self.terms.len();
        for _ in 0..cap {
            if r.is_zero() {
                return Some(q);
            }
            // leading term: extreme value of the pivot coordinate, so that
            // subtracting c * theta_m (1 - theta_u) strictly moves mass
            let m = if descending {
                r.terms.keys().max_by(|a, b| a[pivot].cmp(&b[pivot]).then(a.cmp(b))).unwrap().clone()
            } else {
                r.terms.keys().min_by(|a, b| a[pivot].cmp(&b[pivot]).then(a.cmp(b))).unwrap().clone()
            };
            let c = r.terms[&m].clone();
            q.add_term(m.clone(), &c);
            r.add_term(m.clone(), &c.neg());
            let shifted: Vec<Int> = m.iter().zip(u).map(|(a, b)| a + b).collect();
            r.add_term(shifted, &c);
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Bernstein presentation

pub type HKey = (Vec<Int>, usize, Vec<Int>);

/// Sum of c * theta_x N_w omega over finitely many basis triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeElement {
    pub terms: BTreeMap<HKey, Laurent>,
}

impl HeckeElement {
    pub fn zero() -> Self {
        HeckeElement { terms: BTreeMap::new() }
    }

    pub fn basis(d: &AffineHeckeDatum, x: Vec<Int>, w: usize, om: Vec<Int>) -> Self {
        let mut e = HeckeElement::zero();
        e.add_term((x, w, d.omega.reduce(&om)), &Laurent::one(d.nparams));
        e
    }

    pub fn one(d: &AffineHeckeDatum) -> Self {
        HeckeElement::basis(d, vec![Int::zero(); d.rank()], 0, d.omega.zero())
    }

    pub fn theta(d: &AffineHeckeDatum, x: Vec<Int>) -> Self {
        HeckeElement::basis(d, x, 0, d.omega.zero())
    }

    pub fn n_w(d: &AffineHeckeDatum, w: usize) -> Self {
        HeckeElement::basis(d, vec![Int::zero(); d.rank()], w, d.omega.zero())
    }

    pub fn n_simple(d: &AffineHeckeDatum, i: usize) -> Self {
        HeckeElement::n_w(d, d.simple_w(i))
    }

    pub fn omega_symbol(d: &AffineHeckeDatum, om: Vec<Int>) -> Self {
        HeckeElement::basis(d, vec![Int::zero(); d.rank()], 0, om)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: HKey, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        let nparams = c.nparams;
        let entry = self.terms.entry(k.clone()).or_insert_with(|| Laurent::zero(nparams));
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, other: &HeckeElement) -> HeckeElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &HeckeElement) -> HeckeElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), &c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Laurent) -> HeckeElement {
        let mut out = HeckeElement::zero();
        for (k, l) in &self.terms {
            out.add_term(k.clone(), &l.mul(c));
        }
        out
    }

    /// All coefficients at v_j = 1; the group-algebra shadow.
    pub fn specialize_one(&self) -> BTreeMap<HKey, Int> {
        self.terms
            .iter()
            .map(|(k, c)| (k.clone(), c.specialize_one()))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }
}

/// intermediate form: theta-polynomial coefficients on the left of N_w omega
type CanElt = BTreeMap<(usize, Vec<Int>), ThetaPoly>;

fn to_can(d: &AffineHeckeDatum, e: &HeckeElement) -> CanElt {
    let mut out: CanElt = BTreeMap::new();
    for ((x, w, om), c) in &e.terms {
        let entry = out
            .entry((*w, om.clone()))
            .or_insert_with(|| ThetaPoly::zero(d.nparams));
        entry.add_term(x.clone(), c);
    }
    out
}

fn from_can(e: &CanElt) -> HeckeElement {
    let mut out = HeckeElement::zero();
    for ((w, om), f) in e {
        for (x, c) in &f.terms {
            out.add_term((x.clone(), *w, om.clone()), c);
        }
    }
    out
}

fn can_add(acc: &mut CanElt, key: (usize, Vec<Int>), f: ThetaPoly) {
    if f.is_zero() {
        return;
    }
    let nparams = f.nparams;
    let entry = acc
        .entry(key.clone())
        .or_insert_with(|| ThetaPoly::zero(nparams));
    *entry = entry.add(&f);
    if entry.is_zero() {
        acc.remove(&key);
    }
}

/// N_s * (f N_u omega) for a simple position s.
fn left_mul_simple(
    d: &AffineHeckeDatum,
    s: usize,
    t: &CanElt,
) -> Result<CanElt, HeckeError> {
    let s_mat = d.datum.simple_reflection(s);
    let alpha = d.datum.simple_root(s).clone();
    let neg_alpha: Vec<Int> = alpha.iter().map(|c| -c).collect();
    let neg_2alpha: Vec<Int> = alpha.iter().map(|c| -(c + c)).collect();
    let lam = d.quad_scalar(d.component_of[s], d.lambda[s]);
    let lam_star = d.quad_scalar(d.component_of[s], d.lambda_star[s]);
    let mut num = ThetaPoly::monomial(vec![Int::zero(); d.rank()], lam.clone());
    num.add_term(neg_alpha, &lam_star);

    let mut out: CanElt = BTreeMap::new();
    for ((u, om), f) in t {
        let sf = f.map_lattice(&s_mat);
        let diff = f.sub(&sf);
        if !diff.is_zero() {
            let prod = num.mul(&diff);
            let corr = prod.div_one_minus(&neg_2alpha).ok_or_else(|| {
                HeckeError::NonExactDivision {
                    root: s,
                    witness: format!("{:?}", diff.terms.keys().next()),
                }
            })?;
            can_add(&mut out, (*u, om.clone()), corr);
        }
        // (s.f) N_s N_u
        let su = d.w_index(&s_mat.mul(d.w_matrix(*u)));
        if d.w_len(su) > d.w_len(*u) {
            can_add(&mut out, (su, om.clone()), sf);
        } else {
            can_add(&mut out, (su, om.clone()), sf.clone());
            can_add(&mut out, (*u, om.clone()), sf.scale(&lam));
        }
    }
    Ok(out)
}

/// omega * (f N_u omega') with the generator action moved to the right.
fn left_mul_omega(d: &AffineHeckeDatum, om: &[Int], t: &CanElt) -> CanElt {
    if d.omega.reduce(om).iter().all(|c| c.is_zero()) {
        return t.clone();
    }
    let a = d.omega.matrix(om);
    let a_inv = a.inverse().expect("omega action invertible");
    let mut out: CanElt = BTreeMap::new();
    for ((u, om2), f) in t {
        let conj = d.w_index(&a.mul(d.w_matrix(*u)).mul(&a_inv));
        can_add(&mut out, (conj, d.omega.add(om, om2)), f.map_lattice(&a));
    }
    out
}

pub fn multiply(
    d: &AffineHeckeDatum,
    a: &HeckeElement,
    b: &HeckeElement,
) -> Result<HeckeElement, HeckeError> {
    let b_can = to_can(d, b);
    let mut acc: CanElt = BTreeMap::new();
    for ((x, w, om), c) in &a.terms {
        let mut t = left_mul_omega(d, om, &b_can);
        for &s in d.w_word(*w).iter().rev() {
            t = left_mul_simple(d, s, &t)?;
        }
        let front = ThetaPoly::monomial(x.clone(), c.clone());
        for (key, f) in t {
            can_add(&mut acc, key, front.mul(&f));
        }
    }
    Ok(from_can(&acc))
}

/// Inverse of the basis element N_w for finite w (product of
/// N_s^{-1} = N_s - (v^l - v^{-l}) along the reversed word).
pub fn n_w_inverse(d: &AffineHeckeDatum, w: usize) -> Result<HeckeElement, HeckeError> {
    let mut out = HeckeElement::one(d);
    for &s in d.w_word(w).iter().rev() {
        let inv = HeckeElement::n_simple(d, s)
            .sub(&HeckeElement::one(d).scale(&d.quad_scalar_simple(s)));
        out = multiply(d, &out, &inv)?;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Iwahori-Matsumoto presentation over the extended affine Weyl group

pub type ZKey = (Vec<Int>, usize, Vec<Int>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImElement {
    pub terms: BTreeMap<ZKey, Laurent>,
}

impl ImElement {
    pub fn zero() -> Self {
        ImElement { terms: BTreeMap::new() }
    }

    pub fn basis(d: &AffineHeckeDatum, x: Vec<Int>, w: usize, om: Vec<Int>) -> Self {
        let mut e = ImElement::zero();
        e.add_term((x, w, d.omega.reduce(&om)), &Laurent::one(d.nparams));
        e
    }

    pub fn one(d: &AffineHeckeDatum) -> Self {
        ImElement::basis(d, vec![Int::zero(); d.rank()], 0, d.omega.zero())
    }

    pub fn add_term(&mut self, k: ZKey, c: &Laurent) {
        if c.is_zero() {
            return;
        }
        let nparams = c.nparams;
        let entry = self.terms.entry(k.clone()).or_insert_with(|| Laurent::zero(nparams));
        *entry = entry.add(c);
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add(&self, other: &ImElement) -> ImElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &ImElement) -> ImElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), &c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Laurent) -> ImElement {
        let mut out = ImElement::zero();
        for (k, l) in &self.terms {
            out.add_term(k.clone(), &l.mul(c));
        }
        out
    }
}

/// (x1, w1) * (x2, w2) in X rtimes W.
pub fn we_mul(d: &AffineHeckeDatum, z1: &(Vec<Int>, usize), z2: &(Vec<Int>, usize)) -> (Vec<Int>, usize) {
    let moved = d.w_matrix(z1.1).mul_vec(&z2.0);
    let x: Vec<Int> = z1.0.iter().zip(&moved).map(|(a, b)| a + b).collect();
    let w = d.w_index(&d.w_matrix(z1.1).mul(d.w_matrix(z2.1)));
    (x, w)
}

pub fn we_gen(d: &AffineHeckeDatum, a: usize) -> (Vec<Int>, usize) {
    (d.gens[a].trans.clone(), d.gens[a].w)
}

/// Iwahori-Matsumoto length of t_x w.
pub fn we_length(d: &AffineHeckeDatum, z: &(Vec<Int>, usize)) -> Int {
    let w_inv = d
        .w_matrix(z.1)
        .inverse()
        .expect("Weyl matrices invertible");
    let mut len = Int::zero();
    for p in d.datum.positive_roots() {
        let pair = pairing(&z.0, &d.datum.coroots[p]);
        let back = w_inv.mul_vec(&d.datum.roots[p]);
        if d.datum.is_positive_root(&back) {
            len += pair.abs();
        } else {
            len += (pair - int(1)).abs();
        }
    }
    len
}

/// Peel right descents down to a length-zero element.
/// Returns (pi, word) with z = pi * s_{a_k} * ... * s_{a_1}
/// (word in push order a_1, ..., a_k) and lengths additive along the chain.
fn we_descend(d: &AffineHeckeDatum, z: &(Vec<Int>, usize)) -> ((Vec<Int>, usize), Vec<usize>) {
    let mut cur = z.clone();
    let mut len = we_length(d, &cur);
    let mut word = Vec::new();
    'outer: while len > Int::zero() {
        for a in 0..d.gens.len() {
            let next = we_mul(d, &cur, &we_gen(d, a));
            let nl = we_length(d, &next);
            if nl < len {
                word.push(a);
                cur = next;
                len = nl;
                continue 'outer;
            }
        }
        panic!("positive-length element with no right descent");
    }
    (cur, word)
}

/// Right multiplication by the generator T_{s_a}.
fn im_right_gen(d: &AffineHeckeDatum, acc: &BTreeMap<(Vec<Int>, usize), Laurent>, a: usize)
    -> BTreeMap<(Vec<Int>, usize), Laurent>
{
    let g = we_gen(d, a);
    let c = d.quad_scalar(d.gens[a].param, d.gens[a].exponent);
    let mut out: BTreeMap<(Vec<Int>, usize), Laurent> = BTreeMap::new();
    let put = |k: (Vec<Int>, usize), v: Laurent, out: &mut BTreeMap<(Vec<Int>, usize), Laurent>| {
        if v.is_zero() {
            return;
        }
        let e = out.entry(k.clone()).or_insert_with(|| Laurent::zero(v.nparams));
        *e = e.add(&v);
        if e.is_zero() {
            out.remove(&k);
        }
    };
    for (z, coef) in acc {
        let zs = we_mul(d, z, &g);
        if we_length(d, &zs) > we_length(d, z) {
            put(zs, coef.clone(), &mut out);
        } else {
            put(zs, coef.clone(), &mut out);
            put(z.clone(), coef.mul(&c), &mut out);
        }
    }
    out
}

pub fn im_multiply(
    d: &AffineHeckeDatum,
    a: &ImElement,
    b: &ImElement,
) -> Result<ImElement, HeckeError> {
    let mut result = ImElement::zero();
    for ((x2, w2, om2), c2) in &b.terms {
        let (pi, word) = we_descend(d, &(x2.clone(), *w2));
        for ((x1, w1, om1), c1) in &a.terms {
            // move omega_1 across z2
            let amat = d.omega.matrix(om1);
            let a_inv = amat.inverse().expect("omega action invertible");
            let pi_c = (
                amat.mul_vec(&pi.0),
                d.w_index(&amat.mul(d.w_matrix(pi.1)).mul(&a_inv)),
            );
            let mut acc: BTreeMap<(Vec<Int>, usize), Laurent> = BTreeMap::new();
            acc.insert(we_mul(d, &(x1.clone(), *w1), &pi_c), c1.mul(c2));
            for &aidx in word.iter().rev() {
                // conjugated generator: omega preserves node data, so the
                // transformed generator is again a generator with equal label
                let g = we_gen(d, aidx);
                let gc = (
                    amat.mul_vec(&g.0),
                    d.w_index(&amat.mul(d.w_matrix(g.1)).mul(&a_inv)),
                );
                let ai = d
                    .gens
                    .iter()
                    .position(|h| h.trans == gc.0 && h.w == gc.1)
                    .ok_or_else(|| {
                        HeckeError::BadOmega(
                            "omega action does not permute the affine generators".into(),
                        )
                    })?;
                acc = im_right_gen(d, &acc, ai);
            }
            let om = d.omega.add(om1, om2);
            for (z, coef) in acc {
                result.add_term((z.0, z.1, om.clone()), &coef);
            }
        }
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// conversion between the presentations

/// Image of the IM basis element T_z omega in the Bernstein presentation.
fn bernstein_of_we(
    d: &AffineHeckeDatum,
    z: &(Vec<Int>, usize),
) -> Result<HeckeElement, HeckeError> {
    let (pi, word) = we_descend(d, z);
    // length-zero part: N_{t_x w} = theta_x N_{w^{-1}}^{-1}
    let w_inv = d.w_index(
        &d.w_matrix(pi.1)
            .inverse()
            .expect("Weyl matrices invertible"),
    );
    let mut out = multiply(
        d,
        &HeckeElement::theta(d, pi.0.clone()),
        &n_w_inverse(d, w_inv)?,
    )?;
    for &a in word.iter().rev() {
        let gen_img = if a < d.n_finite_gens {
            HeckeElement::n_simple(d, a)
        } else {
            // t_theta s_theta = theta_theta N_{s_theta}^{-1}
            multiply(
                d,
                &HeckeElement::theta(d, d.gens[a].trans.clone()),
                &n_w_inverse(d, d.gens[a].w)?,
            )?
        };
        out = multiply(d, &out, &gen_img)?;
    }
    Ok(out)
}

pub fn im_to_bernstein(d: &AffineHeckeDatum, e: &ImElement) -> Result<HeckeElement, HeckeError> {
    let mut out = HeckeElement::zero();
    for ((x, w, om), c) in &e.terms {
        let b = bernstein_of_we(d, &(x.clone(), *w))?;
        let b = multiply(d, &b, &HeckeElement::omega_symbol(d, om.clone()))?;
        out = out.add(&b.scale(c));
    }
    Ok(out)
}

/// Dominant decomposition x = x_plus - x_minus with both parts dominant.
/// Among complements x_minus whose simple pairings exceed the deficits of x
/// by at most two, the one whose translation has the smallest length is
/// chosen; the sum-of-positive-roots multiple serves as a fallback.
pub fn dominant_decomposition(d: &AffineHeckeDatum, x: &[Int]) -> (Vec<Int>, Vec<Int>) {
    let n = d.datum.n_simple();
    let needed: Vec<Int> = (0..n)
        .map(|i| {
            let p = d.pair_simple(x, i);
            if p.is_negative() {
                -p
            } else {
                Int::zero()
            }
        })
        .collect();
    if needed.iter().all(|c| c.is_zero()) {
        return (x.to_vec(), vec![Int::zero(); d.rank()]);
    }
    // rows: the simple coroots, so a*z lists the simple pairings of z
    let a = crate::intlin::IntMat::from_rows(
        (0..n).map(|i| d.datum.simple_coroot(i).to_vec()).collect(),
    );
    // the translation length of a dominant z is the sum over positive
    // coroots of <z, alpha^vee>
    let coroot_sum: Vec<Int> = d.datum.positive_roots().iter().fold(
        vec![Int::zero(); d.rank()],
        |mut acc, &p| {
            for (s, c) in acc.iter_mut().zip(&d.datum.coroots[p]) {
                *s += c;
            }
            acc
        },
    );
    let mut best: Option<(Int, Vec<Int>)> = None;
    fn consider(best: &mut Option<(Int, Vec<Int>)>, coroot_sum: &[Int], z: Vec<Int>) {
        let len = pairing(&z, coroot_sum);
        if best.as_ref().map_or(true, |(bl, _)| len < *bl) {
            *best = Some((len, z));
        }
    }
    for mask in 0..3_u64.pow(n as u32) {
        let mut t = needed.clone();
        let mut m = mask;
        for ti in t.iter_mut() {
            *ti += int((m % 3) as i64);
            m /= 3;
        }
        if let Some(z) = crate::intlin::solve_integer(&a, &t) {
            consider(&mut best, &coroot_sum, z);
        }
    }
    if best.is_none() {
        // k copies of the sum of positive roots, which pairs to 2 with
        // every simple coroot
        let y0 = d.dominance_vector();
        let k = needed.iter().map(|c| (c + int(1)) / int(2)).max().unwrap();
        consider(&mut best, &coroot_sum, y0.iter().map(|c| c * &k).collect());
    }
    let x_minus = best.unwrap().1;
    let x_plus: Vec<Int> = x.iter().zip(&x_minus).map(|(a, b)| a + b).collect();
    (x_plus, x_minus)
}

/// Image of a dominant translation as an IM element (a single basis symbol).
fn im_translation_basis(d: &AffineHeckeDatum, y: &[Int]) -> ImElement {
    ImElement::basis(d, y.to_vec(), 0, d.omega.zero())
}

fn im_basis_inverse(d: &AffineHeckeDatum, z: &(Vec<Int>, usize)) -> Result<ImElement, HeckeError> {
    let (pi, word) = we_descend(d, z);
    // T_z = T_pi T_{a_k} ... T_{a_1}; invert factor by factor
    let pi_inv_w = d.w_index(&d.w_matrix(pi.1).inverse().expect("invertible"));
    let pi_inv_x: Vec<Int> = d
        .w_matrix(pi_inv_w)
        .mul_vec(&pi.0)
        .iter()
        .map(|c| -c)
        .collect();
    let mut out = ImElement::basis(d, pi_inv_x, pi_inv_w, d.omega.zero());
    let mut pre = ImElement::zero();
    for &a in word.iter() {
        // T_{s_a}^{-1} = T_{s_a} - (v^m - v^{-m})
        let g = we_gen(d, a);
        let c = d.quad_scalar(d.gens[a].param, d.gens[a].exponent);
        let inv = ImElement::basis(d, g.0.clone(), g.1, d.omega.zero())
            .sub(&ImElement::one(d).scale(&c));
        pre = if pre.terms.is_empty() {
            inv
        } else {
            im_multiply(d, &pre, &inv)?
        };
    }
    if !pre.terms.is_empty() {
        out = im_multiply(d, &pre, &out)?;
    }
    Ok(out)
}

pub fn bernstein_to_im(d: &AffineHeckeDatum, e: &HeckeElement) -> Result<ImElement, HeckeError> {
    let mut out = ImElement::zero();
    for ((x, w, om), c) in &e.terms {
        let (x_plus, x_minus) = dominant_decomposition(d, x);
        let mut t = im_translation_basis(d, &x_plus);
        if x_minus.iter().any(|c| !c.is_zero()) {
            let inv = im_basis_inverse(d, &(x_minus.clone(), 0))?;
            t = im_multiply(d, &t, &inv)?;
        }
        for &s in d.w_word(*w) {
            let g = we_gen(d, s);
            t = im_multiply(d, &t, &ImElement::basis(d, g.0.clone(), g.1, d.omega.zero()))?;
        }
        let omega_part = ImElement::basis(d, vec![Int::zero(); d.rank()], 0, om.clone());
        t = im_multiply(d, &t, &omega_part)?;
        out = out.add(&t.scale(c));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// center

#[derive(Clone, Debug)]
pub struct CentralReport {
    pub central: bool,
    /// generator label and the nonzero commutator
    pub witness: Option<(String, HeckeElement)>,
}

pub fn central_test(d: &AffineHeckeDatum, e: &HeckeElement) -> Result<CentralReport, HeckeError> {
    let mut gens: Vec<(String, HeckeElement)> = Vec::new();
    for i in 0..d.datum.n_simple() {
        gens.push((format!("N_s{}", i), HeckeElement::n_simple(d, i)));
    }
    for j in 0..d.rank() {
        let mut x = vec![Int::zero(); d.rank()];
        x[j] = Int::one();
        gens.push((format!("theta_e{}", j), HeckeElement::theta(d, x)));
    }
    for (gi, _) in d.omega.actions.iter().enumerate() {
        let mut om = d.omega.zero();
        om[gi] = Int::one();
        gens.push((format!("omega_{}", gi), HeckeElement::omega_symbol(d, om)));
    }
    for (label, g) in gens {
        let lhs = multiply(d, e, &g)?;
        let rhs = multiply(d, &g, e)?;
        let comm = lhs.sub(&rhs);
        if !comm.is_zero() {
            return Ok(CentralReport { central: false, witness: Some((label, comm)) });
        }
    }
    Ok(CentralReport { central: true, witness: None })
}

/// Sum of theta over the orbit of x under W and the omega action.
pub fn orbit_symmetrize(d: &AffineHeckeDatum, x: &[Int]) -> Result<HeckeElement, HeckeError> {
    let mut gens: Vec<IntMat> = (0..d.datum.n_simple()).map(|i| d.datum.simple_reflection(i)).collect();
    gens.extend(d.omega.actions.iter().cloned());
    let mut orbit: Vec<Vec<Int>> = vec![x.to_vec()];
    let mut seen: std::collections::HashSet<Vec<Int>> = orbit.iter().cloned().collect();
    let mut queue: VecDeque<Vec<Int>> = orbit.iter().cloned().collect();
    while let Some(y) = queue.pop_front() {
        for g in &gens {
            let z = g.mul_vec(&y);
            if seen.insert(z.clone()) {
                orbit.push(z.clone());
                queue.push_back(z);
            }
        }
    }
    let mut e = HeckeElement::zero();
    for y in orbit {
        e = e.add(&HeckeElement::theta(d, y));
    }
    let report = central_test(d, &e)?;
    if !report.central {
        return Err(HeckeError::CentralCorrection(
            report.witness.map(|(l, _)| l).unwrap_or_default(),
        ));
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// weakly unramified twists

/// x -> zeta_n^{<coeffs, x>} for a primitive n-th root of unity zeta_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistCharacter {
    pub modulus: Int,
    pub coeffs: Vec<Int>,
}

impl TwistCharacter {
    pub fn trivial(rank: usize) -> Self {
        TwistCharacter { modulus: Int::one(), coeffs: vec![Int::zero(); rank] }
    }

    pub fn exponent(&self, x: &[Int]) -> Int {
        let e = pairing(x, &self.coeffs);
        ((&e % &self.modulus) + &self.modulus) % &self.modulus
    }

    pub fn is_trivial_on(&self, x: &[Int]) -> bool {
        self.exponent(x).is_zero()
    }

    pub fn compose(&self, other: &TwistCharacter) -> TwistCharacter {
        let n = num_integer::lcm(self.modulus.clone(), other.modulus.clone());
        let a = &n / &self.modulus;
        let b = &n / &other.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x * &a + y * &b)
            .collect();
        TwistCharacter { modulus: n, coeffs }
    }
}

/// Apply the diagonal twist theta_x N_w omega -> z(x) theta_x N_w omega.
/// Exact only when the character takes values in {1, -1}.
pub fn twist_apply(
    _d: &AffineHeckeDatum,
    z: &TwistCharacter,
    e: &HeckeElement,
) -> Result<HeckeElement, HeckeError> {
    if z.modulus > int(2) {
        return Err(HeckeError::Unsupported(
            "twist application needs values in {1,-1}; use twist_verify for higher order".into(),
        ));
    }
    let mut out = HeckeElement::zero();
    for ((x, w, om), c) in &e.terms {
        let sign = if z.exponent(x).is_zero() { c.clone() } else { c.neg() };
        out.add_term((x.clone(), *w, om.clone()), &sign);
    }
    Ok(out)
}

/// Structural multiplicativity of the twist: for each sampled basis pair,
/// every product term theta_{x3}... must satisfy z(x3) = z(x1) z(x2).
pub fn twist_verify(
    d: &AffineHeckeDatum,
    z: &TwistCharacter,
    samples: &[(HKey, HKey)],
) -> Result<bool, HeckeError> {
    for (k1, k2) in samples {
        let a = HeckeElement::basis(d, k1.0.clone(), k1.1, k1.2.clone());
        let b = HeckeElement::basis(d, k2.0.clone(), k2.1, k2.2.clone());
        let p = multiply(d, &a, &b)?;
        let want = (z.exponent(&k1.0) + z.exponent(&k2.0)) % &z.modulus;
        for ((x3, _, _), _) in &p.terms {
            if z.exponent(x3) != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Hecke datum of a facet: lattice and root system from the facet analysis,
/// labels from the per-node exponent table (all 1 for the Iwahori case),
/// extension group = the facet stabilizer modulo its pointwise part.
pub fn build_from_facet(
    iw: &crate::affine::IwahoriWeylDatum,
    f: &crate::affine::FacetData,
    lat: &crate::affine::FacetLattices,
    exponents: &[i64],
) -> Result<AffineHeckeDatum, HeckeError> {
    use crate::intlin::{
        cokernel, int_mat_apply_rat, kernel_basis, rat_solve_cols, solve_integer,
    };
    if exponents.len() != f.s_f_af.len() {
        return Err(HeckeError::BadLabels(format!(
            "expected {} exponents, got {}",
            f.s_f_af.len(),
            exponents.len()
        )));
    }
    if exponents.iter().any(|&e| e < 0) {
        return Err(HeckeError::BadLabels("exponents must be nonnegative".into()));
    }
    let datum = lat.rf.clone();
    let report = datum.validate()?;
    let k = datum.n_simple();
    let d = datum.rank;

    let lambda: Vec<i64> = (0..k).map(|i| exponents[lat.rf_sfa[i]]).collect();
    let mut lambda_star = lambda.clone();
    let mut component_of = vec![0usize; k];
    let orbit = root_orbits(&datum);
    for (ci, (_, comp)) in report.components.iter().enumerate() {
        for &j in comp {
            component_of[j] = ci;
        }
        // the affine exponent of this component comes from the generator
        // dropped when the finite reflection choice was made
        let gc = f
            .graph_comps
            .iter()
            .position(|gcm| gcm.contains(&lat.rf_sfa[comp[0]]))
            .ok_or_else(|| HeckeError::BadLabels("component without a generator".into()))?;
        let aff_exp = exponents[lat.dropped[gc]];
        let hi = affine_node_root(&datum, comp)?;
        for &j in comp {
            if orbit[datum.simple[j]] == orbit[hi] {
                lambda_star[j] = aff_exp;
            }
        }
    }
    let nparams = report.components.len().max(1);

    // extension group: stabilizer classes modulo the pointwise classes
    let mc = iw.omega.coord_len();
    let gens = &f.omega_f_gens;
    let t = gens.len();
    let omega = if t == 0 {
        OmegaExt::trivial(d)
    } else {
        let mut acols: Vec<Vec<Int>> = gens.clone();
        for (i, inv) in iw.omega.group.torsion.iter().enumerate() {
            let mut col = vec![Int::zero(); mc];
            col[i] = inv.clone();
            acols.push(col);
        }
        let amat = IntMat::from_cols(acols);
        let kmat = kernel_basis(&amat);
        let mut rel_cols: Vec<Vec<Int>> = (0..kmat.cols)
            .map(|j| kmat.col(j).into_iter().take(t).collect())
            .collect();
        for tv in &f.omega_f_tor {
            let sol = solve_integer(&amat, tv).ok_or_else(|| {
                HeckeError::BadOmega("pointwise class outside the stabilizer".into())
            })?;
            rel_cols.push(sol.into_iter().take(t).collect());
        }
        let relmat = if rel_cols.is_empty() {
            IntMat::zeros(t, 0)
        } else {
            IntMat::from_cols(rel_cols)
        };
        let q = cokernel(&relmat);
        let mut invariants = Vec::new();
        let mut actions = Vec::new();
        let weyl = datum.weyl_group_elements(200_000)?;
        let simple_set: Vec<Vec<Int>> =
            (0..k).map(|i| datum.simple_root(i).clone()).collect();
        for (i, inv) in q.group.torsion.iter().enumerate() {
            let mut e = vec![Int::zero(); q.coord_len()];
            e[i] = Int::one();
            let coeffs = q.lift(&e);
            let mut class = vec![Int::zero(); mc];
            for (c, g) in coeffs.iter().zip(gens) {
                for (x, y) in class.iter_mut().zip(g) {
                    *x += c * y;
                }
            }
            let rep = iw
                .omega_rep(&class)
                .map_err(|e| HeckeError::BadOmega(format!("no representative: {e}")))?;
            // its linear action in lattice coordinates
            let mut mcols = Vec::new();
            for bv in &lat.xf_basis {
                let img = int_mat_apply_rat(&iw.w0.elements[rep.w], bv);
                let sol = rat_solve_cols(&lat.xf_basis, &img).ok_or_else(|| {
                    HeckeError::BadOmega("stabilizer does not preserve the lattice".into())
                })?;
                if !sol.iter().all(|x| x.denom().is_one() || x.is_zero()) {
                    return Err(HeckeError::BadOmega("non-integral stabilizer action".into()));
                }
                mcols.push(sol.iter().map(|x| x.to_integer()).collect::<Vec<Int>>());
            }
            let m0 = if d == 0 { IntMat::identity(0) } else { IntMat::from_cols(mcols) };
            // the based correction: the unique Weyl multiple preserving the basis
            let mut based = None;
            for w in &weyl {
                let cand = w.matrix.mul(&m0);
                let ok = simple_set.iter().all(|a| simple_set.contains(&cand.mul_vec(a)));
                if ok {
                    based = Some(cand);
                    break;
                }
            }
            let based = based.ok_or_else(|| {
                HeckeError::BadOmega("no based representative of a stabilizer class".into())
            })?;
            invariants.push(inv.clone());
            actions.push(based);
        }
        OmegaExt { rank: d, invariants, actions }
    };

    AffineHeckeDatum::new(datum, nparams, component_of, lambda, lambda_star, omega)
}
