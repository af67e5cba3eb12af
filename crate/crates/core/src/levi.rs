//! Levi classes: Galois-stable subsets between delta0 and the simple system,
//! grouped under relative-Weyl association, plus the dual-side classification
//! and the pairing between the two.

use crate::galois::{
    relative_weyl_group, restricted_root_system, AnisotropicMarking, GaloisDatum, GaloisError,
    RelativePath, RelativeWeylGroup,
};
use crate::intlin::Int;
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeviClass {
    /// lexicographically smallest member (sorted simple positions)
    pub representative: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    /// association orbit of restricted-image sets of (I \ delta0)/Gamma
    pub relative_orbit: Vec<BTreeSet<Vec<Int>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualLeviClass {
    pub representative: Vec<usize>,
    pub members: Vec<Vec<usize>>,
    pub relevant: bool,
}

/// The Langlands-dual Galois datum: swapped lattices, generators acting on
/// the original cocharacter lattice.
pub fn dual_galois(g: &GaloisDatum) -> Result<GaloisDatum, GaloisError> {
    let base = g.base.dual();
    let gens = g
        .generators
        .iter()
        .map(|m| m.dual_action())
        .collect::<Result<Vec<_>, _>>()?;
    GaloisDatum::new(base, gens)
}

/// All Gamma-stable subsets of simple positions, as sorted index lists.
fn stable_subsets(g: &GaloisDatum) -> Vec<Vec<usize>> {
    let orbits = g.simple_orbits();
    let k = orbits.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << k) {
        let mut s: Vec<usize> = Vec::new();
        for (i, orbit) in orbits.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s.extend(orbit.iter().cloned());
            }
        }
        s.sort();
        out.push(s);
    }
    out.sort();
    out
}

/// Image-set signature of (I \ delta0)/Gamma in the restricted model.
fn image_signature(
    g: &GaloisDatum,
    m: &AnisotropicMarking,
    restriction: &crate::intlin::IntMat,
    subset: &[usize],
) -> BTreeSet<Vec<Int>> {
    let mut sig = BTreeSet::new();
    for &i in subset {
        if m.delta0.contains(&i) {
            continue;
        }
        sig.insert(restriction.mul_vec(g.base.simple_root(i)));
    }
    sig
}

fn classify_with_group(
    g: &GaloisDatum,
    m: &AnisotropicMarking,
    grp: &RelativeWeylGroup,
    subsets: &[Vec<usize>],
) -> Result<Vec<(Vec<Vec<usize>>, Vec<BTreeSet<Vec<Int>>>)>, GaloisError> {
    let rel = restricted_root_system(g, m)?;
    let sigs: Vec<BTreeSet<Vec<Int>>> = subsets
        .iter()
        .map(|s| image_signature(g, m, &rel.restriction, s))
        .collect();
    // character-side action of each group element on image vectors
    let char_actions: Vec<crate::intlin::IntMat> = grp
        .elements
        .iter()
        .map(|e| e.dual_action())
        .collect::<Result<Vec<_>, _>>()?;
    let act = |a: &crate::intlin::IntMat, sig: &BTreeSet<Vec<Int>>| -> BTreeSet<Vec<Int>> {
        sig.iter().map(|v| a.mul_vec(v)).collect()
    };
    let mut assigned = vec![usize::MAX; subsets.len()];
    let mut classes: Vec<(Vec<Vec<usize>>, Vec<BTreeSet<Vec<Int>>>)> = Vec::new();
    for i in 0..subsets.len() {
        if assigned[i] != usize::MAX {
            continue;
        }
        let cls = classes.len();
        assigned[i] = cls;
        let mut members = vec![subsets[i].clone()];
        let mut orbit: BTreeSet<BTreeSet<Vec<Int>>> =
            char_actions.iter().map(|a| act(a, &sigs[i])).collect();
        for j in i + 1..subsets.len() {
            if assigned[j] == usize::MAX && orbit.contains(&sigs[j]) {
                assigned[j] = cls;
                members.push(subsets[j].clone());
                for a in &char_actions {
                    orbit.insert(act(a, &sigs[j]));
                }
            }
        }
        classes.push((members, orbit.into_iter().collect()));
    }
    Ok(classes)
}

pub fn classify_levis(
    g: &GaloisDatum,
    m: &AnisotropicMarking,
    cap: usize,
) -> Result<Vec<LeviClass>, GaloisError> {
    let grp = relative_weyl_group(g, m, RelativePath::Direct, cap)?;
    let subsets: Vec<Vec<usize>> = stable_subsets(g)
        .into_iter()
        .filter(|s| m.delta0.iter().all(|d| s.contains(d)))
        .collect();
    let classes = classify_with_group(g, m, &grp, &subsets)?;
    let mut out: Vec<LeviClass> = classes
        .into_iter()
        .map(|(members, relative_orbit)| LeviClass {
            representative: members.iter().min().unwrap().clone(),
            members,
            relative_orbit,
        })
        .collect();
    out.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DualBijection {
    pub pairs: Vec<(LeviClass, DualLeviClass)>,
    /// Gamma-stable dual subsets that do not contain delta0 (not relevant)
    pub irrelevant: Vec<DualLeviClass>,
}

pub fn dual_levi_bijection(
    g: &GaloisDatum,
    m: &AnisotropicMarking,
    cap: usize,
) -> Result<DualBijection, GaloisError> {
    let primal = classify_levis(g, m, cap)?;
    let gd = dual_galois(g)?;
    let md = AnisotropicMarking::new(&gd, m.delta0.clone())?;
    let grp = relative_weyl_group(&gd, &md, RelativePath::Dual, cap)?;
    let all = stable_subsets(&gd);
    let (relevant, irrelevant): (Vec<Vec<usize>>, Vec<Vec<usize>>) = all
        .into_iter()
        .partition(|s| md.delta0.iter().all(|d| s.contains(d)));
    let dual_classes = classify_with_group(&gd, &md, &grp, &relevant)?;
    let mut duals: Vec<DualLeviClass> = dual_classes
        .into_iter()
        .map(|(members, _)| DualLeviClass {
            representative: members.iter().min().unwrap().clone(),
            members,
            relevant: true,
        })
        .collect();
    duals.sort_by(|a, b| a.representative.cmp(&b.representative));
    if duals.len() != primal.len() {
        return Err(GaloisError::Relative(format!(
            "dual classification count {} differs from primal {}",
            duals.len(),
            primal.len()
        )));
    }
    let mut pairs = Vec::new();
    for p in primal {
        let pos = duals
            .iter()
            .position(|d| d.representative == p.representative)
            .ok_or_else(|| {
                GaloisError::Relative(format!(
                    "no dual class with representative {:?}",
                    p.representative
                ))
            })?;
        // classes must carry the same member sets index-wise
        let d = duals[pos].clone();
        let mut pm = p.members.clone();
        let mut dm = d.members.clone();
        pm.sort();
        dm.sort();
        if pm != dm {
            return Err(GaloisError::Relative(format!(
                "class membership mismatch at representative {:?}",
                p.representative
            )));
        }
        pairs.push((p, d));
    }
    let irrelevant = irrelevant
        .into_iter()
        .map(|s| DualLeviClass { representative: s.clone(), members: vec![s], relevant: false })
        .collect();
    Ok(DualBijection { pairs, irrelevant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::{int, IntMat};
    use crate::rootdata::BasedRootDatum;

    fn sl3() -> GaloisDatum {
        GaloisDatum::trivial(BasedRootDatum::generate(
            2,
            vec![
                (vec![int(2), int(-1)], vec![int(1), int(0)]),
                (vec![int(-1), int(2)], vec![int(0), int(1)]),
            ],
            Some("SL3".into()),
        ))
        .unwrap()
    }

    fn sp4() -> GaloisDatum {
        GaloisDatum::trivial(BasedRootDatum::generate(
            2,
            vec![
                (vec![int(1), int(-1)], vec![int(1), int(-1)]),
                (vec![int(0), int(2)], vec![int(0), int(1)]),
            ],
            Some("Sp4".into()),
        ))
        .unwrap()
    }

    fn su3() -> GaloisDatum {
        let base = BasedRootDatum::generate(
            2,
            vec![
                (vec![int(2), int(-1)], vec![int(1), int(0)]),
                (vec![int(-1), int(2)], vec![int(0), int(1)]),
            ],
            Some("SU3".into()),
        );
        GaloisDatum::new(base, vec![IntMat::from_i64(2, 2, &[0, 1, 1, 0])]).unwrap()
    }

    fn su4() -> GaloisDatum {
        // A3 in the weight basis with the diagram flip 1<->3
        let base = BasedRootDatum::generate(
            3,
            vec![
                (vec![int(2), int(-1), int(0)], vec![int(1), int(0), int(0)]),
                (vec![int(-1), int(2), int(-1)], vec![int(0), int(1), int(0)]),
                (vec![int(0), int(-1), int(2)], vec![int(0), int(0), int(1)]),
            ],
            Some("SU4".into()),
        );
        // swap omega1 <-> omega3 on the weight basis
        let flip = IntMat::from_i64(3, 3, &[0, 0, 1, 0, 1, 0, 1, 0, 0]);
        GaloisDatum::new(base, vec![flip]).unwrap()
    }

    #[test]
    fn split_sl3_three_classes() {
        let g = sl3();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let classes = classify_levis(&g, &m, 50000).unwrap();
        assert_eq!(classes.len(), 3);
        assert_eq!(classes[0].representative, Vec::<usize>::new());
        assert_eq!(classes[1].representative, vec![0]);
        assert_eq!(classes[1].members.len(), 2); // {0} ~ {1}
        assert_eq!(classes[2].representative, vec![0, 1]);
    }

    #[test]
    fn split_sp4_four_classes() {
        let g = sp4();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let classes = classify_levis(&g, &m, 50000).unwrap();
        assert_eq!(classes.len(), 4, "no association across root lengths");
    }

    #[test]
    fn su3_two_classes() {
        let g = su3();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let classes = classify_levis(&g, &m, 50000).unwrap();
        assert_eq!(classes.len(), 2); // only emptyset and Delta are stable
    }

    #[test]
    fn anisotropic_single_class() {
        let g = sl3();
        let m = AnisotropicMarking::new(&g, vec![0, 1]).unwrap();
        let classes = classify_levis(&g, &m, 50000).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn bijection_sl3() {
        let g = sl3();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let b = dual_levi_bijection(&g, &m, 50000).unwrap();
        assert_eq!(b.pairs.len(), 3);
        assert!(b.pairs.iter().all(|(_, d)| d.relevant));
        assert!(b.irrelevant.is_empty());
    }

    #[test]
    fn bijection_su3() {
        let g = su3();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let b = dual_levi_bijection(&g, &m, 50000).unwrap();
        assert_eq!(b.pairs.len(), 2);
    }

    #[test]
    fn partition_property_su4() {
        let g = su4();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let classes = classify_levis(&g, &m, 50000).unwrap();
        let total: usize = classes.iter().map(|c| c.members.len()).sum();
        // stable subsets: orbits are {0,2},{1}: 4 subsets
        assert_eq!(total, 4);
        let mut all: Vec<Vec<usize>> =
            classes.iter().flat_map(|c| c.members.clone()).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), total, "classes partition the subsets");
    }

    #[test]
    fn relabeling_invariance_a3_flip() {
        // classify A3 split, then relabel by its diagram flip: class sizes agree
        let base = BasedRootDatum::generate(
            3,
            vec![
                (vec![int(2), int(-1), int(0)], vec![int(1), int(0), int(0)]),
                (vec![int(-1), int(2), int(-1)], vec![int(0), int(1), int(0)]),
                (vec![int(0), int(-1), int(2)], vec![int(0), int(0), int(1)]),
            ],
            Some("SL4".into()),
        );
        let g = GaloisDatum::trivial(base).unwrap();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let classes = classify_levis(&g, &m, 50000).unwrap();
        // flip sends subset positions i -> 2-i; each class must be flip-stable as a set of subsets
        for c in &classes {
            for member in &c.members {
                let flipped: Vec<usize> = {
                    let mut v: Vec<usize> = member.iter().map(|&i| 2 - i).collect();
                    v.sort();
                    v
                };
                assert!(
                    classes
                        .iter()
                        .find(|d| d.members.contains(&flipped))
                        .map(|d| d.representative.clone())
                        == Some(c.representative.clone()),
                    "flip moved {:?} out of its class",
                    member
                );
            }
        }
    }

    #[test]
    fn bijection_sp4() {
        let g = sp4();
        let m = AnisotropicMarking::new(&g, vec![]).unwrap();
        let b = dual_levi_bijection(&g, &m, 50000).unwrap();
        assert_eq!(b.pairs.len(), 4);
    }
}
