//! Bernstein components at the combinatorial level: weakly unramified
//! character groups, dual-side component packages, and the matching between
//! the two sides of the correspondence.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::galois::{
    relative_weyl_group, restricted_root_system, AnisotropicMarking, GaloisDatum, GaloisError,
    RelativePath,
};
use crate::hecke::{AffineHeckeDatum, HeckeError, OmegaExt};
use crate::intlin::{cokernel, int, Cokernel, Int, IntMat, LinError};
use crate::levi::dual_galois;
use crate::rootdata::{BasedRootDatum, DatumError};

#[derive(Debug, Error)]
pub enum ComponentError {
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error("component construction failed: {0}")]
    Structure(String),
    #[error("matching failed: {0}")]
    Match(String),
}

/// Characters trivial on the Kottwitz kernel, realized as Frobenius
/// coinvariants of the center-character lattice of the dual group.
#[derive(Clone, Debug)]
pub struct WeaklyUnramifiedGroup {
    pub coker: Cokernel,
    /// coinvariant presentation of the center quotient X_* / ZZ(coroots)
    pub center: Cokernel,
}

impl WeaklyUnramifiedGroup {
    pub fn order(&self) -> Option<Int> {
        self.coker.group.order()
    }
}

pub fn weakly_unramified_group(
    g: &GaloisDatum,
) -> Result<WeaklyUnramifiedGroup, ComponentError> {
    let n = g.base.rank;
    let fr = g
        .generators
        .first()
        .cloned()
        .unwrap_or_else(|| IntMat::identity(n));
    let fr_co = fr.dual_action()?;
    let cmat = if g.base.coroots.is_empty() {
        IntMat::zeros(n, 0)
    } else {
        IntMat::from_cols(g.base.coroots.clone())
    };
    let center = cokernel(&cmat);
    let q = center.coord_len();
    // the induced Frobenius on the quotient, then its coinvariants
    let mut cols = Vec::with_capacity(q);
    for j in 0..q {
        let mut e = vec![Int::zero(); q];
        e[j] = Int::one();
        let mut img = center.project(&fr_co.mul_vec(&center.lift(&e)));
        for (x, y) in img.iter_mut().zip(&e) {
            *x -= y;
        }
        cols.push(img);
    }
    for (i, d) in center.group.torsion.iter().enumerate() {
        let mut col = vec![Int::zero(); q];
        col[i] = d.clone();
        cols.push(col);
    }
    let m = if cols.is_empty() {
        IntMat::zeros(q, 0)
    } else {
        IntMat::from_cols(cols)
    };
    Ok(WeaklyUnramifiedGroup { coker: cokernel(&m), center })
}

#[derive(Clone, Debug)]
pub struct DualBernsteinComponent {
    /// representative simple subset of the dual Levi class
    pub levi: Vec<usize>,
    pub cuspidal_id: String,
    pub datum: AffineHeckeDatum,
}

/// Label table for non-Iwahori components: exponent pairs per simple
/// position of the component's root system.
#[derive(Clone, Debug, Default)]
pub struct DualLabelTable {
    pub labels: Vec<(i64, i64)>,
}

/// The component package of a dual Levi class. Supported cases: the minimal
/// class with the Iwahori identifier (full relative root system, labels from
/// the table or all 1), and the full group (cuspidal: empty root system on
/// the unramified-twist lattice).
pub fn build_dual_component(
    g: &GaloisDatum,
    m: &AnisotropicMarking,
    levi: &[usize],
    cuspidal_id: &str,
    table: Option<&DualLabelTable>,
) -> Result<DualBernsteinComponent, ComponentError> {
    let gd = dual_galois(g)?;
    let md = AnisotropicMarking::new(&gd, m.delta0.clone())?;
    let rel = restricted_root_system(&gd, &md)?;
    let r = rel.rank();

    let all: Vec<usize> = (0..g.base.n_simple()).collect();
    if levi == all.as_slice() {
        // cuspidal on the full group: torus of unramified twists, no roots
        let datum = AffineHeckeDatum::new(
            BasedRootDatum::torus(r, Some("cuspidal component".into())),
            1,
            vec![],
            vec![],
            vec![],
            OmegaExt::trivial(r),
        )?;
        return Ok(DualBernsteinComponent {
            levi: levi.to_vec(),
            cuspidal_id: cuspidal_id.into(),
            datum,
        });
    }
    if levi != m.delta0.as_slice() {
        return Err(ComponentError::Structure(
            "only the minimal and the full dual Levi class are built in".into(),
        ));
    }

    // full component of the minimal class: the restricted system of the dual
    let w = relative_weyl_group(&gd, &md, RelativePath::Dual, 200_000)?;
    let roots: std::collections::HashSet<Vec<Int>> =
        rel.restricted_roots.iter().map(|(v, _)| v.clone()).collect();
    let indivisible = |a: &Vec<Int>| -> Vec<Int> {
        let half: Option<Vec<Int>> = a
            .iter()
            .map(|x| if (x % int(2)).is_zero() { Some(x / int(2)) } else { None })
            .collect();
        match half {
            Some(h) if roots.contains(&h) => h,
            _ => a.clone(),
        }
    };
    let mut simples: Vec<(Vec<Int>, Vec<Int>)> = Vec::new();
    for (_, a0) in &rel.relative_simple {
        let a = indivisible(a0);
        // locate the reflection fixing the kernel of a
        let mut refl = None;
        for mmat in &w.elements {
            if mmat.is_identity() || !mmat.mul(mmat).is_identity() {
                continue;
            }
            let d = mmat.sub(&IntMat::identity(r));
            if d.is_zero() {
                continue;
            }
            let p = a.iter().position(|x| !x.is_zero()).unwrap();
            let mut proportional = true;
            'rows: for i in 0..r {
                let row = d.row(i);
                for jj in 0..r {
                    if &row[jj] * &a[p] != &row[p] * &a[jj] {
                        proportional = false;
                        break 'rows;
                    }
                }
            }
            if proportional {
                refl = Some(mmat.clone());
                break;
            }
        }
        let mmat = refl.ok_or_else(|| {
            ComponentError::Structure("no reflection for a restricted root".into())
        })?;
        // character-side action and the coroot it determines
        let ct = mmat.transpose();
        let kpos = a.iter().position(|x| !x.is_zero()).unwrap();
        let mut coroot = Vec::with_capacity(r);
        for jj in 0..r {
            let diff = if kpos == jj {
                &Int::one() - ct.at(kpos, jj)
            } else {
                -ct.at(kpos, jj).clone()
            };
            let (q, rem) = num_integer::Integer::div_rem(&diff, &a[kpos]);
            if !rem.is_zero() {
                return Err(ComponentError::Structure("non-integral coroot".into()));
            }
            coroot.push(q);
        }
        for i in 0..r {
            for jj in 0..r {
                let expect = if i == jj { Int::one() } else { Int::zero() };
                if ct.at(i, jj) + &a[i] * &coroot[jj] != expect {
                    return Err(ComponentError::Structure(
                        "reflection formula inconsistent".into(),
                    ));
                }
            }
        }
        simples.push((a, coroot));
    }
    let datum = BasedRootDatum::generate(r, simples, Some("dual component".into()));
    let k = datum.n_simple();
    let (lambda, lambda_star) = match table {
        Some(t) => {
            if t.labels.len() != k {
                return Err(ComponentError::Structure(format!(
                    "label table has {} entries, expected {}",
                    t.labels.len(),
                    k
                )));
            }
            (
                t.labels.iter().map(|&(l, _)| l).collect(),
                t.labels.iter().map(|&(_, l)| l).collect(),
            )
        }
        None => (vec![1i64; k], vec![1i64; k]),
    };
    // the unramified-twist group acts by translations, so its torsion part
    // enters the datum as an extension acting trivially on the lattice
    let xwr = weakly_unramified_group(g)?;
    let tors = xwr.coker.group.torsion.clone();
    let omega = OmegaExt {
        rank: r,
        actions: vec![IntMat::identity(r); tors.len()],
        invariants: tors,
    };
    let hd = AffineHeckeDatum::new(datum, 1, vec![0; k], lambda, lambda_star, omega)?;
    Ok(DualBernsteinComponent {
        levi: levi.to_vec(),
        cuspidal_id: cuspidal_id.into(),
        datum: hd,
    })
}

#[derive(Clone, Debug)]
pub struct PadicComponent {
    pub j: Vec<usize>,
    pub cuspidal_id: String,
    pub datum: AffineHeckeDatum,
}

#[derive(Clone, Debug)]
pub struct ComponentMatch {
    pub padic: usize,
    pub galois: usize,
    pub report: crate::compare::ComparisonReport,
}

/// Match the two component lists by shared cuspidal identifier and certify
/// each matched pair with the comparison harness.
pub fn match_components(
    padic: &[PadicComponent],
    galois: &[DualBernsteinComponent],
) -> Result<Vec<ComponentMatch>, ComponentError> {
    let mut by_id: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, c) in galois.iter().enumerate() {
        by_id.entry(c.cuspidal_id.as_str()).or_default().push(i);
    }
    let mut used = vec![false; galois.len()];
    let mut out = Vec::new();
    for (pi, p) in padic.iter().enumerate() {
        let slots = by_id.get(p.cuspidal_id.as_str()).ok_or_else(|| {
            ComponentError::Match(format!("no dual component with id {}", p.cuspidal_id))
        })?;
        let gi = slots
            .iter()
            .find(|&&i| !used[i])
            .copied()
            .ok_or_else(|| {
                ComponentError::Match(format!(
                    "dual components with id {} exhausted",
                    p.cuspidal_id
                ))
            })?;
        used[gi] = true;
        let report = crate::compare::compare_hecke_algebras(&p.datum, &galois[gi].datum);
        out.push(ComponentMatch { padic: pi, galois: gi, report });
    }
    if let Some(gi) = used.iter().position(|u| !u) {
        return Err(ComponentError::Match(format!(
            "dual component {} ({}) unmatched",
            gi, galois[gi].cuspidal_id
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(base: BasedRootDatum) -> (GaloisDatum, AnisotropicMarking) {
        let g = GaloisDatum::trivial(base).unwrap();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        (g, m)
    }

    fn pgl2() -> BasedRootDatum {
        BasedRootDatum {
            rank: 1,
            roots: vec![vec![int(1)], vec![int(-1)]],
            coroots: vec![vec![int(2)], vec![int(-2)]],
            simple: vec![0],
            name: Some("PGL2".into()),
        }
    }

    fn sl2() -> BasedRootDatum {
        BasedRootDatum {
            rank: 1,
            roots: vec![vec![int(2)], vec![int(-2)]],
            coroots: vec![vec![int(1)], vec![int(-1)]],
            simple: vec![0],
            name: Some("SL2".into()),
        }
    }

    #[test]
    fn xwr_split_cases() {
        let (g, _) = split(pgl2());
        let x = weakly_unramified_group(&g).unwrap();
        assert_eq!(x.coker.group.describe(), "Z/2");

        let (g, _) = split(sl2());
        let x = weakly_unramified_group(&g).unwrap();
        assert!(x.coker.group.is_trivial());

        let gl1 = BasedRootDatum::torus(1, Some("GL1".into()));
        let (g, _) = split(gl1);
        let x = weakly_unramified_group(&g).unwrap();
        assert_eq!(x.coker.group.free_rank, 1);
    }

    #[test]
    fn dual_component_split_sl2() {
        let (g, m) = split(sl2());
        let c = build_dual_component(&g, &m, &[], "iwahori", None).unwrap();
        assert_eq!(c.datum.weyl_order(), 2);
        assert_eq!(c.datum.rank(), 1);
        // the PGL2-side lattice: root (1), coroot (2)
        assert_eq!(c.datum.datum.simple_root(0), &vec![int(1)]);
        assert_eq!(c.datum.datum.simple_coroot(0), &vec![int(2)]);
    }

    #[test]
    fn dual_component_cuspidal_full_group() {
        let (g, m) = split(sl2());
        let c = build_dual_component(&g, &m, &[0], "cusp-x", None).unwrap();
        assert_eq!(c.datum.weyl_order(), 1);
        assert_eq!(c.datum.datum.roots.len(), 0);
        assert_eq!(c.datum.rank(), 1);
    }
}
