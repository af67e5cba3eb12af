//! Comparison harness: based-root-datum isomorphism search between two
//! affine Hecke data with label and extension-group compatibility, the forced
//! v-exponent, and the isogeny-invariance check of facet data.

use std::collections::HashSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::affine::{
    analyze_facet, build_iwahori_weyl, facet_root_datum, AffineError, FacetData, FacetLattices,
    IwahoriWeylDatum,
};
use crate::galois::{AnisotropicMarking, GaloisDatum, GaloisError};
use crate::hecke::AffineHeckeDatum;
use crate::intlin::{
    int, kernel_basis, rat_of, rat_solve, Int, IntMat, LinError, Rat,
};
use crate::rootdata::DatumError;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Affine(#[from] AffineError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error("comparison setup failed: {0}")]
    Setup(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Isomorphic,
    Mismatch(String),
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub verdict: Verdict,
    /// lattice isomorphism from the first datum to the second
    pub lattice_map: Option<IntMat>,
    pub simple_perm: Option<Vec<usize>>,
    /// per simple position: (first lambda, second lambda) under the map
    pub parameter_check: Vec<(usize, i64, i64)>,
    /// the exponent e with v = q^e forced by the parameter law
    pub v_exponent: Option<Rat>,
}

impl ComparisonReport {
    pub fn is_isomorphic(&self) -> bool {
        self.verdict == Verdict::Isomorphic
    }

    fn mismatch(msg: impl Into<String>) -> Self {
        ComparisonReport {
            verdict: Verdict::Mismatch(msg.into()),
            lattice_map: None,
            simple_perm: None,
            parameter_check: vec![],
            v_exponent: None,
        }
    }
}

fn omega_matrices(d: &AffineHeckeDatum) -> HashSet<IntMat> {
    d.omega.elements().iter().map(|e| d.omega.matrix(e)).collect()
}

/// Search for a lattice isomorphism carrying the first simple system onto the
/// second compatibly with the coroot pairings and the extension groups.
pub fn compare_hecke_algebras(
    a: &AffineHeckeDatum,
    b: &AffineHeckeDatum,
) -> ComparisonReport {
    let d = a.rank();
    if d != b.rank() {
        return ComparisonReport::mismatch(format!("lattice ranks {} vs {}", d, b.rank()));
    }
    let k = a.datum.n_simple();
    if k != b.datum.n_simple() {
        return ComparisonReport::mismatch(format!(
            "simple systems of sizes {} vs {}",
            k,
            b.datum.n_simple()
        ));
    }
    if a.omega.invariants != b.omega.invariants {
        return ComparisonReport::mismatch(format!(
            "extension groups {:?} vs {:?}",
            a.omega.invariants, b.omega.invariants
        ));
    }
    let oma = omega_matrices(a);
    let omb = omega_matrices(b);

    let mut last_reason = String::from("no simple bijection admits a lattice isomorphism");
    for perm in (0..k).permutations(k) {
        // labels must agree under the bijection before searching for a map
        let mut label_ok = true;
        for i in 0..k {
            if a.lambda[i] != b.lambda[perm[i]] || a.lambda_star[i] != b.lambda_star[perm[i]] {
                label_ok = false;
                last_reason = format!(
                    "labels ({},{}) vs ({},{}) at simple {}",
                    a.lambda[i], a.lambda_star[i], b.lambda[perm[i]], b.lambda_star[perm[i]], i
                );
                break;
            }
        }
        if !label_ok {
            continue;
        }
        // linear constraints on P: P a_i = b_{perm i}, (b-coroot)^T P = (a-coroot)^T
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        let mut rhs: Vec<Rat> = Vec::new();
        let idx = |i: usize, j: usize| i * d + j;
        for i in 0..k {
            let ar = a.datum.simple_root(i);
            let br = b.datum.simple_root(perm[i]);
            for row in 0..d {
                let mut r = vec![Rat::zero(); d * d];
                for col in 0..d {
                    r[idx(row, col)] = rat_of(&ar[col]);
                }
                rows.push(r);
                rhs.push(rat_of(&br[row]));
            }
            let ac = a.datum.simple_coroot(i);
            let bc = b.datum.simple_coroot(perm[i]);
            for col in 0..d {
                let mut r = vec![Rat::zero(); d * d];
                for row in 0..d {
                    r[idx(row, col)] = rat_of(&bc[row]);
                }
                rows.push(r);
                rhs.push(rat_of(&ac[col]));
            }
        }
        let particular = if rows.is_empty() {
            Some(vec![Rat::zero(); d * d])
        } else {
            rat_solve(&rows, &rhs)
        };
        let Some(p0) = particular else {
            last_reason = "pairing constraints are inconsistent".into();
            continue;
        };
        // integer kernel of the homogeneous system, after clearing denominators
        let kmat = if rows.is_empty() {
            IntMat::identity(d * d)
        } else {
            let mut irows = Vec::new();
            for r in &rows {
                let mut den = Int::one();
                for x in r {
                    den = num_integer::lcm(den.clone(), x.denom().clone());
                }
                irows.push(
                    r.iter()
                        .map(|x| (x * rat_of(&den)).to_integer())
                        .collect::<Vec<Int>>(),
                );
            }
            kernel_basis(&IntMat::from_rows(irows))
        };
        let nk = kmat.cols;
        if nk > 6 {
            last_reason = format!("isomorphism search space too large ({nk} parameters)");
            continue;
        }
        let range = 3i64;
        let mut combo = vec![-range; nk];
        'search: loop {
            let mut entries = p0.clone();
            for (jk, c) in combo.iter().enumerate() {
                if *c != 0 {
                    for e in 0..d * d {
                        entries[e] += rat_of(&(kmat.at(e, jk) * int(*c)));
                    }
                }
            }
            let integral = entries.iter().all(|x| x.denom().is_one() || x.is_zero());
            if integral {
                let mut p = IntMat::zeros(d, d);
                for row in 0..d {
                    for col in 0..d {
                        let v = &entries[idx(row, col)];
                        *p.at_mut(row, col) = if v.is_zero() {
                            Int::zero()
                        } else {
                            v.to_integer()
                        };
                    }
                }
                if p.det().abs().is_one() {
                    let pinv = p.inverse().expect("unimodular");
                    let conj: HashSet<IntMat> =
                        oma.iter().map(|m| p.mul(m).mul(&pinv)).collect();
                    if conj == omb {
                        let mut parameter_check = Vec::new();
                        let mut v_exp: Option<Rat> = None;
                        let mut consistent = true;
                        for i in 0..k {
                            parameter_check.push((i, a.lambda[i], b.lambda[perm[i]]));
                            // parameter law: q^{N(i)} = v^{2 lambda}, N from the
                            // first datum, lambda from the second
                            let e = Rat::new(int(a.lambda[i]), int(2 * b.lambda[perm[i]]));
                            match &v_exp {
                                None => v_exp = Some(e),
                                Some(prev) if *prev != e => consistent = false,
                                _ => {}
                            }
                        }
                        if !consistent {
                            last_reason = "no single v-exponent fits all roots".into();
                        } else {
                            return ComparisonReport {
                                verdict: Verdict::Isomorphic,
                                lattice_map: Some(p),
                                simple_perm: Some(perm),
                                parameter_check,
                                v_exponent: v_exp,
                            };
                        }
                    } else {
                        last_reason = "extension-group actions are not conjugate".into();
                    }
                }
            }
            // advance the box
            let mut kk = 0;
            loop {
                if kk == nk {
                    break 'search;
                }
                combo[kk] += 1;
                if combo[kk] <= range {
                    break;
                }
                combo[kk] = -range;
                kk += 1;
            }
        }
        if k == 0 {
            break;
        }
    }
    ComparisonReport::mismatch(last_reason)
}

#[derive(Clone, Debug)]
pub struct AdjointReport {
    pub coxeter_ok: bool,
    pub weyl_ok: bool,
    pub type_ok: bool,
    pub labels_ok: bool,
    pub lattice_index: Option<Int>,
    pub witness: Option<String>,
}

impl AdjointReport {
    pub fn passed(&self) -> bool {
        self.coxeter_ok && self.weyl_ok && self.type_ok && self.labels_ok
            && self.lattice_index.is_some()
    }
}

/// The Galois datum of the adjoint quotient: root-lattice coordinates, with
/// the automorphisms acting by their simple-root permutations.
pub fn adjoint_galois(g: &GaloisDatum) -> Result<GaloisDatum, CompareError> {
    let (ad, _) = g.base.adjoint()?;
    let k = g.base.n_simple();
    let mut gens = Vec::new();
    for gen in &g.generators {
        let perm = g.simple_permutation(gen);
        let mut m = IntMat::zeros(k, k);
        // characters in the simple-root basis: alpha_i -> alpha_{perm(i)}
        for (i, &pi) in perm.iter().enumerate() {
            *m.at_mut(pi, i) = Int::one();
        }
        gens.push(m);
    }
    Ok(GaloisDatum::new(ad, gens)?)
}

fn coxeter_matrix(
    iw: &IwahoriWeylDatum,
    f: &FacetData,
    cap: usize,
) -> Result<Vec<Vec<usize>>, CompareError> {
    let k = f.s_f_af.len();
    let mut m = vec![vec![0usize; k]; k];
    for i in 0..k {
        for j in 0..k {
            let prod = iw.mul(&f.s_f_af[i], &f.s_f_af[j]);
            let mut cur = prod.clone();
            let mut ord = 0;
            for step in 1..=cap {
                if cur == iw.identity() {
                    ord = step;
                    break;
                }
                cur = iw.mul(&cur, &prod);
            }
            m[i][j] = ord; // 0 = infinite within the cap
        }
    }
    Ok(m)
}

fn facet_value_det(iw: &IwahoriWeylDatum, lat: &FacetLattices) -> Option<Rat> {
    // volume of the lattice measured by the relative simple root functionals
    let k = iw.aff_simple.iter().filter(|n| n.root.level.is_zero()).count();
    let d = lat.xf_basis.len();
    if k != d {
        return None;
    }
    let mut rows = Vec::new();
    for node in &iw.aff_simple {
        if !node.root.level.is_zero() {
            continue;
        }
        rows.push(
            lat.xf_basis
                .iter()
                .map(|b| {
                    b.iter()
                        .zip(&node.root.grad)
                        .map(|(x, g)| x * g)
                        .sum::<Rat>()
                })
                .collect::<Vec<Rat>>(),
        );
    }
    // absolute determinant by fraction-free expansion on small sizes
    fn det(rows: &[Vec<Rat>]) -> Rat {
        let n = rows.len();
        if n == 0 {
            return Rat::one();
        }
        if n == 1 {
            return rows[0][0].clone();
        }
        let mut acc = Rat::zero();
        let mut sign = Rat::one();
        for j in 0..n {
            let minor: Vec<Vec<Rat>> = rows[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            acc += &sign * &rows[0][j] * det(&minor);
            sign = -sign;
        }
        acc
    }
    Some(det(&rows).abs())
}

/// Facet data must agree between a group and its adjoint quotient, up to a
/// finite-index lattice change; returns the index.
pub fn check_adjoint_invariance(
    g: &GaloisDatum,
    m: &AnisotropicMarking,
    j: &[usize],
    radius: usize,
) -> Result<AdjointReport, CompareError> {
    let gad = adjoint_galois(g)?;
    let mad = AnisotropicMarking::new(&gad, m.delta0.clone())?;
    let iw = build_iwahori_weyl(g.clone(), m.clone())?;
    let iwa = build_iwahori_weyl(gad, mad)?;
    let f = analyze_facet(&iw, j)?;
    let fa = analyze_facet(&iwa, j)?;

    let mut witness = None;
    let coxeter_ok = {
        let ca = coxeter_matrix(&iw, &f, 24)?;
        let cb = coxeter_matrix(&iwa, &fa, 24)?;
        if ca != cb {
            witness = Some(format!("Coxeter matrices differ: {ca:?} vs {cb:?}"));
        }
        ca == cb
    };

    let lat = facet_root_datum(&iw, &f, radius)?;
    let lata = facet_root_datum(&iwa, &fa, radius)?;
    let weyl_ok = lat.w_circ.len() == lata.w_circ.len();
    if !weyl_ok && witness.is_none() {
        witness = Some(format!(
            "fixed-point groups of orders {} vs {}",
            lat.w_circ.len(),
            lata.w_circ.len()
        ));
    }
    let ta: Vec<String> = lat
        .rf
        .validate()?
        .components
        .iter()
        .map(|(t, _)| t.clone())
        .collect();
    let tb: Vec<String> = lata
        .rf
        .validate()?
        .components
        .iter()
        .map(|(t, _)| t.clone())
        .collect();
    let type_ok = ta == tb;
    if !type_ok && witness.is_none() {
        witness = Some(format!("facet root systems {ta:?} vs {tb:?}"));
    }
    // Iwahori labels on both sides: equality is per-construction (all 1)
    let labels_ok = lat.rf.n_simple() == lata.rf.n_simple();

    let lattice_index = match (facet_value_det(&iw, &lat), facet_value_det(&iwa, &lata)) {
        (Some(da), Some(db)) if !db.is_zero() => {
            let q = da / db;
            if q.denom().is_one() {
                Some(q.to_integer())
            } else {
                if witness.is_none() {
                    witness = Some("lattice index is not an integer".into());
                }
                None
            }
        }
        _ => {
            if witness.is_none() {
                witness = Some("lattice volume undefined (central directions)".into());
            }
            None
        }
    };

    Ok(AdjointReport { coxeter_ok, weyl_ok, type_ok, labels_ok, lattice_index, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::build_from_facet;
    use crate::rootdata::BasedRootDatum;

    fn sl2() -> BasedRootDatum {
        BasedRootDatum {
            rank: 1,
            roots: vec![vec![int(2)], vec![int(-2)]],
            coroots: vec![vec![int(1)], vec![int(-1)]],
            simple: vec![0],
            name: Some("SL2".into()),
        }
    }

    fn split(base: BasedRootDatum) -> (GaloisDatum, AnisotropicMarking) {
        let g = GaloisDatum::trivial(base).unwrap();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        (g, m)
    }

    fn iwahori_datum(base: BasedRootDatum) -> AffineHeckeDatum {
        let (g, m) = split(base);
        let iw = build_iwahori_weyl(g, m).unwrap();
        let f = analyze_facet(&iw, &[]).unwrap();
        let lat = facet_root_datum(&iw, &f, 8).unwrap();
        build_from_facet(&iw, &f, &lat, &vec![1; f.s_f_af.len()]).unwrap()
    }

    #[test]
    fn sl2_iwahori_comparison() {
        let padic = iwahori_datum(sl2());
        let (g, m) = split(sl2());
        let dual = crate::components::build_dual_component(&g, &m, &[], "iwahori", None).unwrap();
        let report = compare_hecke_algebras(&padic, &dual.datum);
        assert!(report.is_isomorphic(), "{:?}", report.verdict);
        assert_eq!(report.v_exponent, Some(Rat::new(int(1), int(2))));
    }

    #[test]
    fn corrupted_labels_mismatch() {
        let padic = iwahori_datum(sl2());
        let (g, m) = split(sl2());
        let table = crate::components::DualLabelTable { labels: vec![(2, 2)] };
        let dual =
            crate::components::build_dual_component(&g, &m, &[], "iwahori", Some(&table)).unwrap();
        let report = compare_hecke_algebras(&padic, &dual.datum);
        assert!(!report.is_isomorphic());
        match report.verdict {
            Verdict::Mismatch(msg) => assert!(msg.contains("label"), "{msg}"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn adjoint_invariance_sl2_index_two() {
        let (g, m) = split(sl2());
        let rep = check_adjoint_invariance(&g, &m, &[], 8).unwrap();
        assert!(rep.passed(), "{:?}", rep.witness);
        assert_eq!(rep.lattice_index, Some(int(2)));
    }
}
