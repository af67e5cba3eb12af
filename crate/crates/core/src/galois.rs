//! Finite lattice-automorphism actions on a based root datum, anisotropic
//! markings, restricted (relative) root systems, and the relative Weyl group
//! computed along two independent routes.

use crate::intlin::{int, kernel_basis, solve_integer, Int, IntMat};
use crate::rootdata::{pairing, BasedRootDatum};
use num_traits::{One, Signed, Zero};
use std::collections::{HashMap, HashSet, VecDeque};

pub const GROUP_CLOSURE_CAP: usize = 10000;
pub const ORDER_BOUND: usize = 24;

#[derive(Debug, thiserror::Error)]
pub enum GaloisError {
    #[error("generator is not a datum automorphism: {0}")]
    BadGenerator(String),
    #[error("group closure exceeds cap {0}")]
    ClosureCap(usize),
    #[error("delta0 is not stable under the action")]
    UnstableMarking,
    #[error("relative Weyl computation failed: {0}")]
    Relative(String),
    #[error(transparent)]
    Datum(#[from] crate::rootdata::DatumError),
    #[error(transparent)]
    Lin(#[from] crate::intlin::LinError),
}

/// Closure of a set of square n x n matrices under multiplication.
pub fn matrix_closure(gens: &[IntMat], n: usize, cap: usize) -> Result<Vec<IntMat>, GaloisError> {
    let mut elems = vec![IntMat::identity(n)];
    let mut seen: HashSet<IntMat> = elems.iter().cloned().collect();
    let mut queue: VecDeque<IntMat> = elems.iter().cloned().collect();
    while let Some(m) = queue.pop_front() {
        for g in gens {
            let p = m.mul(g);
            if seen.insert(p.clone()) {
                if elems.len() + 1 > cap {
                    return Err(GaloisError::ClosureCap(cap));
                }
                elems.push(p.clone());
                queue.push_back(p);
            }
        }
    }
    Ok(elems)
}

#[derive(Clone, Debug)]
pub struct GaloisDatum {
    pub base: BasedRootDatum,
    /// automorphisms of the character lattice stabilizing the simple system
    pub generators: Vec<IntMat>,
    /// finite closure of the generators
    pub elements: Vec<IntMat>,
}

impl GaloisDatum {
    pub fn new(base: BasedRootDatum, generators: Vec<IntMat>) -> Result<Self, GaloisError> {
        base.validate()?;
        let index = base.root_index();
        for g in &generators {
            if g.rows != base.rank || g.cols != base.rank {
                return Err(GaloisError::BadGenerator("dimension mismatch".into()));
            }
            g.order(ORDER_BOUND)
                .map_err(|_| GaloisError::BadGenerator("infinite order".into()))?;
            let gdual = g.dual_action()?;
            for (i, r) in base.roots.iter().enumerate() {
                let img = g.mul_vec(r);
                let Some(&k) = index.get(&img) else {
                    return Err(GaloisError::BadGenerator(format!(
                        "image of root #{} is not a root",
                        i
                    )));
                };
                if gdual.mul_vec(&base.coroots[i]) != base.coroots[k] {
                    return Err(GaloisError::BadGenerator(format!(
                        "coroot of root #{} not matched",
                        i
                    )));
                }
            }
            // simple system stable setwise
            for i in 0..base.n_simple() {
                let img = g.mul_vec(base.simple_root(i));
                if !base.simple.iter().any(|&s| base.roots[s] == img) {
                    return Err(GaloisError::BadGenerator(format!(
                        "simple root {} leaves the simple system",
                        i
                    )));
                }
            }
        }
        let elements = matrix_closure(&generators, base.rank, GROUP_CLOSURE_CAP)?;
        Ok(GaloisDatum { base, generators, elements })
    }

    pub fn trivial(base: BasedRootDatum) -> Result<Self, GaloisError> {
        Self::new(base, vec![])
    }

    /// The permutation a generator induces on simple positions.
    pub fn simple_permutation(&self, g: &IntMat) -> Vec<usize> {
        (0..self.base.n_simple())
            .map(|i| {
                let img = g.mul_vec(self.base.simple_root(i));
                (0..self.base.n_simple())
                    .position(|j| self.base.simple_root(j) == &img)
                    .expect("simple system stable")
            })
            .collect()
    }

    /// Orbits of simple positions under the whole group.
    pub fn simple_orbits(&self) -> Vec<Vec<usize>> {
        let perms: Vec<Vec<usize>> =
            self.elements.iter().map(|g| self.simple_permutation(g)).collect();
        let k = self.base.n_simple();
        let mut seen = vec![false; k];
        let mut orbits = Vec::new();
        for i in 0..k {
            if seen[i] {
                continue;
            }
            let mut orbit: Vec<usize> = perms.iter().map(|p| p[i]).collect();
            orbit.sort();
            orbit.dedup();
            for &j in &orbit {
                seen[j] = true;
            }
            orbits.push(orbit);
        }
        orbits
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnisotropicMarking {
    /// positions into the simple system
    pub delta0: Vec<usize>,
}

impl AnisotropicMarking {
    pub fn new(g: &GaloisDatum, mut delta0: Vec<usize>) -> Result<Self, GaloisError> {
        delta0.sort();
        delta0.dedup();
        if delta0.iter().any(|&i| i >= g.base.n_simple()) {
            return Err(GaloisError::UnstableMarking);
        }
        for gen in &g.generators {
            let p = g.simple_permutation(gen);
            let image: HashSet<usize> = delta0.iter().map(|&i| p[i]).collect();
            if image != delta0.iter().cloned().collect() {
                return Err(GaloisError::UnstableMarking);
            }
        }
        Ok(AnisotropicMarking { delta0 })
    }
}

#[derive(Clone, Debug)]
pub struct RelativeRootSystem {
    /// n x r saturated basis of the fixed coweight sublattice (columns)
    pub cochar_basis: IntMat,
    /// r x n restriction map on characters (transpose-pairing with the basis)
    pub restriction: IntMat,
    /// distinct nonzero restricted roots with multiplicities
    pub restricted_roots: Vec<(Vec<Int>, usize)>,
    /// orbits of simple positions outside delta0, with their common image
    pub relative_simple: Vec<(Vec<usize>, Vec<Int>)>,
}

impl RelativeRootSystem {
    pub fn rank(&self) -> usize {
        self.cochar_basis.cols
    }

    pub fn is_reduced(&self) -> bool {
        let set: HashSet<&Vec<Int>> = self.restricted_roots.iter().map(|(v, _)| v).collect();
        self.restricted_roots.iter().all(|(v, _)| {
            let dbl: Vec<Int> = v.iter().map(|x| x * int(2)).collect();
            !set.contains(&dbl)
        })
    }
}

pub fn restricted_root_system(
    g: &GaloisDatum,
    m: &AnisotropicMarking,
) -> Result<RelativeRootSystem, GaloisError> {
    let n = g.base.rank;
    // rows: (dual_action(gamma) - 1) for each generator, then <alpha_i, .> for delta0
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for gen in &g.generators {
        let d = gen.dual_action()?.sub(&IntMat::identity(n));
        for i in 0..n {
            rows.push(d.row(i));
        }
    }
    for &i in &m.delta0 {
        rows.push(g.base.simple_root(i).clone());
    }
    let stacked = if rows.is_empty() {
        IntMat::zeros(0, n)
    } else {
        IntMat::from_rows(rows)
    };
    let cochar_basis = kernel_basis(&stacked);
    let restriction = cochar_basis.transpose();
    let mut counts: HashMap<Vec<Int>, usize> = HashMap::new();
    let mut order: Vec<Vec<Int>> = Vec::new();
    for r in &g.base.roots {
        let img = restriction.mul_vec(r);
        if img.iter().all(|x| x.is_zero()) {
            continue;
        }
        if !counts.contains_key(&img) {
            order.push(img.clone());
        }
        *counts.entry(img).or_insert(0) += 1;
    }
    let restricted_roots: Vec<(Vec<Int>, usize)> =
        order.into_iter().map(|v| { let c = counts[&v]; (v, c) }).collect();
    let mut relative_simple = Vec::new();
    for orbit in g.simple_orbits() {
        if orbit.iter().any(|i| m.delta0.contains(i)) {
            continue;
        }
        let imgs: HashSet<Vec<Int>> = orbit
            .iter()
            .map(|&i| restriction.mul_vec(g.base.simple_root(i)))
            .collect();
        if imgs.len() != 1 {
            return Err(GaloisError::Relative(
                "conjugate simple roots restrict differently".into(),
            ));
        }
        let img = imgs.into_iter().next().unwrap();
        if img.iter().all(|x| x.is_zero()) {
            return Err(GaloisError::Relative("simple root outside delta0 restricts to 0".into()));
        }
        relative_simple.push((orbit, img));
    }
    Ok(RelativeRootSystem { cochar_basis, restriction, restricted_roots, relative_simple })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativePath {
    Direct,
    Dual,
}

#[derive(Clone, Debug)]
pub struct RelativeWeylGroup {
    /// r x r matrices on the fixed coweight model
    pub elements: Vec<IntMat>,
    /// an absolute Weyl representative (matrix on X*) per element
    pub reps: Vec<IntMat>,
    pub order: usize,
    pub provenance: RelativePath,
}

impl RelativeWeylGroup {
    pub fn contains(&self, m: &IntMat) -> bool {
        self.elements.iter().any(|e| e == m)
    }

    pub fn same_group(&self, other: &RelativeWeylGroup) -> bool {
        let a: HashSet<&IntMat> = self.elements.iter().collect();
        let b: HashSet<&IntMat> = other.elements.iter().collect();
        a == b
    }
}

/// Action of a coweight-lattice matrix on the fixed-sublattice model; None
/// when the matrix does not stabilize the sublattice.
fn model_action(basis: &IntMat, c: &IntMat) -> Option<IntMat> {
    let r = basis.cols;
    if r == 0 {
        return Some(IntMat::zeros(0, 0));
    }
    let mut cols = Vec::with_capacity(r);
    for j in 0..r {
        let img = c.mul_vec(&basis.col(j));
        cols.push(solve_integer(basis, &img)?);
    }
    let m = IntMat::from_cols(cols);
    if m.det().abs().is_one() {
        Some(m)
    } else {
        None
    }
}

pub fn relative_weyl_group(
    g: &GaloisDatum,
    m: &AnisotropicMarking,
    path: RelativePath,
    cap: usize,
) -> Result<RelativeWeylGroup, GaloisError> {
    let rel = restricted_root_system(g, m)?;
    let basis = &rel.cochar_basis;
    let weyl = g.base.weyl_group_elements(cap)?;
    // the absolute Weyl group of the delta0-Levi
    let levi_gens: Vec<IntMat> =
        m.delta0.iter().map(|&i| g.base.simple_reflection(i)).collect();
    let levi: HashSet<IntMat> = matrix_closure(&levi_gens, g.base.rank, cap)?.into_iter().collect();

    let mut stab: Vec<(IntMat, IntMat)> = Vec::new(); // (absolute, model action)
    match path {
        RelativePath::Direct => {
            for w in &weyl {
                let c = w.matrix.dual_action()?;
                if let Some(act) = model_action(basis, &c) {
                    stab.push((w.matrix.clone(), act));
                }
            }
            // the kernel of the model action must be exactly the Levi Weyl group
            let kernel: HashSet<IntMat> = stab
                .iter()
                .filter(|(_, a)| a.is_identity())
                .map(|(w, _)| w.clone())
                .collect();
            if kernel != levi {
                return Err(GaloisError::Relative(
                    "direct path: stabilizer kernel differs from the delta0 Weyl group".into(),
                ));
            }
        }
        RelativePath::Dual => {
            let d0cols: Vec<Vec<Int>> =
                m.delta0.iter().map(|&i| g.base.simple_coroot(i).clone()).collect();
            let d0 = if d0cols.is_empty() {
                IntMat::zeros(g.base.rank, 0)
            } else {
                IntMat::from_cols(d0cols)
            };
            for w in &weyl {
                // Galois-fixed elements
                if !g
                    .generators
                    .iter()
                    .all(|gen| gen.mul(&w.matrix) == w.matrix.mul(gen))
                {
                    continue;
                }
                let c = w.matrix.dual_action()?;
                let cinv = c.inverse()?;
                let stabilizes = (0..d0.cols).all(|j| {
                    solve_integer(&d0, &c.mul_vec(&d0.col(j))).is_some()
                        && solve_integer(&d0, &cinv.mul_vec(&d0.col(j))).is_some()
                });
                if !stabilizes {
                    continue;
                }
                let Some(act) = model_action(basis, &c) else {
                    return Err(GaloisError::Relative(
                        "dual path: stabilizer does not preserve the fixed sublattice".into(),
                    ));
                };
                stab.push((w.matrix.clone(), act));
            }
            let kernel: HashSet<IntMat> = stab
                .iter()
                .filter(|(_, a)| a.is_identity())
                .map(|(w, _)| w.clone())
                .collect();
            let levi_fixed: HashSet<IntMat> = levi
                .iter()
                .filter(|w| g.generators.iter().all(|gen| gen.mul(w) == w.mul(gen)))
                .cloned()
                .collect();
            if kernel != levi_fixed {
                return Err(GaloisError::Relative(
                    "dual path: stabilizer kernel differs from the fixed delta0 Weyl group".into(),
                ));
            }
        }
    }

    let mut elements: Vec<IntMat> = Vec::new();
    let mut reps: Vec<IntMat> = Vec::new();
    let mut seen: HashSet<IntMat> = HashSet::new();
    for (w, a) in stab {
        if seen.insert(a.clone()) {
            elements.push(a);
            reps.push(w);
        }
    }
    // closure sanity: the deduplicated actions must form a group
    for a in &elements {
        for b in &elements {
            let p = a.mul(b);
            if !seen.contains(&p) {
                return Err(GaloisError::Relative("model actions not closed".into()));
            }
        }
    }
    let order = elements.len();
    Ok(RelativeWeylGroup { elements, reps, order, provenance: path })
}

/// Check that the group is generated by reflections whose moving line is a
/// relative simple root direction.
pub fn generated_by_simple_reflections(
    rel: &RelativeRootSystem,
    grp: &RelativeWeylGroup,
) -> bool {
    let r = rel.rank();
    if r == 0 {
        return grp.order == 1;
    }
    let mut gens: Vec<IntMat> = Vec::new();
    for (_, a) in &rel.relative_simple {
        for m in &grp.elements {
            if m.is_identity() || !m.mul(m).is_identity() {
                continue;
            }
            // m - 1 must have rank one with row space spanned by `a`
            let d = m.sub(&IntMat::identity(r));
            let mut ok = true;
            'rows: for i in 0..r {
                // each row of d must be a rational multiple of a
                let row = d.row(i);
                // find pivot of a
                let Some(p) = a.iter().position(|x| !x.is_zero()) else {
                    ok = false;
                    break;
                };
                if a[p].is_zero() {
                    ok = false;
                    break;
                }
                // row * a[p] == row[p] * a ?
                for j in 0..r {
                    if &row[j] * &a[p] != &row[p] * &a[j] {
                        ok = false;
                        break 'rows;
                    }
                }
            }
            if ok && !d.is_zero() {
                gens.push(m.clone());
            }
        }
    }
    let Ok(closure) = matrix_closure(&gens, r, GROUP_CLOSURE_CAP) else {
        return false;
    };
    closure.len() == grp.order
}

// delta0 helper: pairing kept for callers building markings from root values
pub fn root_value(root: &[Int], coweight: &[Int]) -> Int {
    pairing(root, coweight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::int;

    fn sl3() -> BasedRootDatum {
        BasedRootDatum::generate(
            2,
            vec![
                (vec![int(2), int(-1)], vec![int(1), int(0)]),
                (vec![int(-1), int(2)], vec![int(0), int(1)]),
            ],
            Some("SL3".into()),
        )
    }

    fn su3() -> GaloisDatum {
        let swap = IntMat::from_i64(2, 2, &[0, 1, 1, 0]);
        GaloisDatum::new(sl3(), vec![swap]).unwrap()
    }

    fn a1a1_swap() -> GaloisDatum {
        let base = BasedRootDatum::generate(
            2,
            vec![
                (vec![int(2), int(0)], vec![int(1), int(0)]),
                (vec![int(0), int(2)], vec![int(0), int(1)]),
            ],
            Some("SL2xSL2".into()),
        );
        let swap = IntMat::from_i64(2, 2, &[0, 1, 1, 0]);
        GaloisDatum::new(base, vec![swap]).unwrap()
    }

    #[test]
    fn split_sl3_restricted_is_absolute() {
        let g = GaloisDatum::trivial(sl3()).unwrap();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let rel = restricted_root_system(&g, &m).unwrap();
        assert_eq!(rel.rank(), 2);
        assert_eq!(rel.restricted_roots.len(), 6);
        assert!(rel.restricted_roots.iter().all(|(_, c)| *c == 1));
        assert!(rel.is_reduced());
    }

    #[test]
    fn su3_restricted_is_bc1() {
        let g = su3();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let rel = restricted_root_system(&g, &m).unwrap();
        assert_eq!(rel.rank(), 1);
        // {±a (mult 2), ±2a (mult 1)}
        assert_eq!(rel.restricted_roots.len(), 4);
        assert!(!rel.is_reduced());
        let mult: HashMap<Vec<Int>, usize> =
            rel.restricted_roots.iter().cloned().collect();
        let a = rel.relative_simple[0].1.clone();
        let two_a: Vec<Int> = a.iter().map(|x| x * int(2)).collect();
        assert_eq!(mult[&a], 2);
        assert_eq!(mult[&two_a], 1);
        assert_eq!(rel.relative_simple.len(), 1);
    }

    #[test]
    fn a1a1_swap_restricts_to_a1() {
        let g = a1a1_swap();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let rel = restricted_root_system(&g, &m).unwrap();
        assert_eq!(rel.rank(), 1);
        assert_eq!(rel.restricted_roots.len(), 2);
        // both positive roots restrict to the same image
        assert_eq!(rel.restricted_roots[0].1, 2);
    }

    #[test]
    fn relative_weyl_split_sl3() {
        let g = GaloisDatum::trivial(sl3()).unwrap();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let a = relative_weyl_group(&g, &m, RelativePath::Direct, 50000).unwrap();
        let b = relative_weyl_group(&g, &m, RelativePath::Dual, 50000).unwrap();
        assert_eq!(a.order, 6);
        assert_eq!(b.order, 6);
        assert!(a.same_group(&b));
        let rel = restricted_root_system(&g, &m).unwrap();
        assert!(generated_by_simple_reflections(&rel, &a));
    }

    #[test]
    fn relative_weyl_su3() {
        let g = su3();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let a = relative_weyl_group(&g, &m, RelativePath::Direct, 50000).unwrap();
        let b = relative_weyl_group(&g, &m, RelativePath::Dual, 50000).unwrap();
        assert_eq!(a.order, 2);
        assert!(a.same_group(&b));
        let rel = restricted_root_system(&g, &m).unwrap();
        assert!(generated_by_simple_reflections(&rel, &a));
    }

    #[test]
    fn anisotropic_full_marking_gives_trivial_group() {
        let g = GaloisDatum::trivial(sl3()).unwrap();
        let m = AnisotropicMarking::new(&g, vec![0, 1]).unwrap();
        let rel = restricted_root_system(&g, &m).unwrap();
        assert_eq!(rel.rank(), 0);
        let a = relative_weyl_group(&g, &m, RelativePath::Direct, 50000).unwrap();
        let b = relative_weyl_group(&g, &m, RelativePath::Dual, 50000).unwrap();
        assert_eq!(a.order, 1);
        assert_eq!(b.order, 1);
    }

    #[test]
    fn marking_must_be_stable() {
        let g = su3();
        assert!(AnisotropicMarking::new(&g, vec![0]).is_err());
        assert!(AnisotropicMarking::new(&g, vec![0, 1]).is_ok());
    }

    #[test]
    fn bad_generator_rejected() {
        let not_auto = IntMat::from_i64(2, 2, &[1, 1, 0, 1]);
        assert!(GaloisDatum::new(sl3(), vec![not_auto]).is_err());
    }
}
