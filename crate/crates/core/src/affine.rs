//! Extended affine Weyl groups attached to a Frobenius-twisted datum: the
//! coinvariant translation group, the fundamental alcove and its wall
//! structure, the alcove-stabilizer Omega, and facet combinatorics down to the
//! reconstructed root datum of a facet.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::galois::{
    relative_weyl_group, restricted_root_system, AnisotropicMarking, GaloisDatum, GaloisError,
    RelativePath, RelativeRootSystem, RelativeWeylGroup,
};
use crate::intlin::{
    cokernel, int, int_mat_apply_rat, kernel_basis, rat_of, rat_solve, rat_solve_cols, rvec,
    rvec_add, rvec_is_zero, rvec_scale, rvec_sub, smith_normal_form, solve_integer, Cokernel, Int,
    IntMat, LinError, Rat,
};
use crate::rootdata::{BasedRootDatum, DatumError};

const CLOSURE_CAP: usize = 20000;
const DESCENT_CAP: usize = 20000;
const BOX_CAP: usize = 20000;

#[derive(Debug, Error)]
pub enum AffineError {
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error("non-cyclic automorphism group: {0}")]
    NonCyclic(String),
    #[error("structural failure: {0}")]
    Structure(String),
    #[error("bad facet subset: {0}")]
    BadFacet(String),
    #[error("generator validation failed: {0}")]
    BadGenerator(String),
    #[error("enumeration cap exceeded: {0}")]
    Cap(String),
}

fn serr(msg: impl Into<String>) -> AffineError {
    AffineError::Structure(msg.into())
}

/// Affine functional p -> grad . p + level on the apartment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineRoot {
    pub grad: Vec<Rat>,
    pub level: Rat,
}

impl AffineRoot {
    pub fn value(&self, p: &[Rat]) -> Rat {
        let mut v = self.level.clone();
        for (g, x) in self.grad.iter().zip(p) {
            v += g * x;
        }
        v
    }
}

/// Element (translation, linear part) of the extended affine Weyl group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WElt {
    /// coordinates in the translation group
    pub lambda: Vec<Int>,
    /// index into the finite Weyl group elements
    pub w: usize,
}

#[derive(Clone, Debug)]
pub struct WallFamily {
    /// indivisible positive restricted root, as a covector on the apartment
    pub root: Vec<Int>,
    /// index of the linear reflection in the finite Weyl group
    pub refl: usize,
    /// translation coordinates of the minimal wall-to-wall step
    pub step: Vec<Int>,
    /// wall spacing: the walls of this family sit at root(p) in gap * ZZ
    pub gap: Rat,
}

#[derive(Clone, Debug)]
pub struct AffineNode {
    /// normalized to be positive on the fundamental alcove
    pub root: AffineRoot,
    pub elt: WElt,
    pub family: usize,
    pub comp: usize,
}

#[derive(Clone, Debug)]
pub struct IwahoriWeylDatum {
    pub galois: GaloisDatum,
    pub marking: AnisotropicMarking,
    pub frobenius: IntMat,
    /// coinvariants of Frobenius on the cocharacter lattice
    pub lambda: Cokernel,
    pub rel: RelativeRootSystem,
    pub w0: RelativeWeylGroup,
    w0_index: HashMap<IntMat, usize>,
    /// action of each finite Weyl element on translation coordinates
    pub w0_lambda: Vec<IntMat>,
    /// apartment translation vector per translation coordinate
    pub trans_cols: Vec<Vec<Rat>>,
    pub walls: Vec<WallFamily>,
    pub aff_simple: Vec<AffineNode>,
    /// indices into aff_simple, grouped by irreducible relative component
    pub components: Vec<Vec<usize>>,
    /// alcove stabilizer as a quotient of the translation group
    pub omega: Cokernel,
    /// one alcove-preserving representative per omega coordinate
    pub omega_reps: Vec<WElt>,
    /// how each representative permutes aff_simple
    pub omega_perms: Vec<Vec<usize>>,
    pub base_point: Vec<Rat>,
    pub central_basis: IntMat,
    /// per component: alcove vertex obtained by dropping each node
    comp_vertices: Vec<Vec<(usize, Vec<Rat>)>>,
    pub id_w: usize,
}

#[derive(Clone, Debug)]
pub struct FacetData {
    pub j: Vec<usize>,
    pub wj: Vec<WElt>,
    pub s_f_af: Vec<WElt>,
    /// node index in aff_simple giving rise to each generator
    pub sfa_indices: Vec<usize>,
    /// Coxeter-graph components of s_f_af, as positions into s_f_af
    pub graph_comps: Vec<Vec<usize>>,
    /// generators of the J-stabilizer in omega, as omega coordinates
    pub omega_f_gens: Vec<Vec<Int>>,
    /// all torsion classes fixing the facet pointwise
    pub omega_f_tor: Vec<Vec<Int>>,
    pub lattices: Option<FacetLattices>,
}

#[derive(Clone, Debug)]
pub struct FacetLattices {
    /// translation lattice of the facet affine Weyl group (translation coords)
    pub xj_basis: IntMat,
    pub x_f_point: Vec<Rat>,
    /// positions into s_f_af of the finite reflection choice
    pub s_f: Vec<usize>,
    pub w_circ: Vec<WElt>,
    /// apartment vectors spanning the extended lattice
    pub xf_basis: Vec<Vec<Rat>>,
    pub rf: BasedRootDatum,
    /// minimal translation vector per simple of rf
    pub rf_translations: Vec<Vec<Rat>>,
    /// position into s_f_af per simple of rf
    pub rf_sfa: Vec<usize>,
    /// dropped s_f_af position per graph component
    pub dropped: Vec<usize>,
}

fn egcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    if b.is_zero() {
        return (a.clone(), Int::one(), Int::zero());
    }
    let (g, x, y) = egcd(b, &(a % b));
    let q = a / b;
    (g, y.clone(), x - q * y)
}

/// Basis of the integer column span of m.
fn image_basis(m: &IntMat) -> IntMat {
    let snf = smith_normal_form(m);
    let uinv = snf.u.inverse().expect("unimodular");
    let mut cols = Vec::new();
    for i in 0..snf.rank() {
        let d = snf.s.at(i, i).clone();
        cols.push(uinv.col(i).iter().map(|x| x * &d).collect::<Vec<Int>>());
    }
    if cols.is_empty() {
        IntMat::zeros(m.rows, 0)
    } else {
        IntMat::from_cols(cols)
    }
}

fn row_apply(m: &IntMat, row: &[Rat]) -> Vec<Rat> {
    assert_eq!(m.rows, row.len());
    (0..m.cols)
        .map(|j| (0..m.rows).map(|i| rat_of(m.at(i, j)) * &row[i]).sum())
        .collect()
}

fn rat_is_int(r: &Rat) -> bool {
    r.denom().is_one() || r.is_zero()
}

pub fn build_iwahori_weyl(
    galois: GaloisDatum,
    marking: AnisotropicMarking,
) -> Result<IwahoriWeylDatum, AffineError> {
    let n = galois.base.rank;
    // single topological generator required
    let frobenius = match galois.generators.len() {
        0 => IntMat::identity(n),
        _ => {
            let fr = galois.generators[0].clone();
            let ord = fr.order(10000)?;
            let powers: HashSet<IntMat> = (0..ord).map(|k| fr.pow(k)).collect();
            for g in &galois.generators {
                if !powers.contains(g) {
                    return Err(AffineError::NonCyclic(
                        "an automorphism is not a power of the first generator".into(),
                    ));
                }
            }
            fr
        }
    };
    let fr_co = frobenius.dual_action()?;
    let fr_ord = fr_co.order(10000)?;
    let lambda = cokernel(&fr_co.sub(&IntMat::identity(n)));
    let m = lambda.coord_len();
    let ntor = lambda.group.torsion.len();

    let rel = restricted_root_system(&galois, &marking)?;
    let r = rel.rank();
    let w0 = relative_weyl_group(&galois, &marking, RelativePath::Dual, CLOSURE_CAP)?;
    let mut w0_index = HashMap::new();
    for (i, e) in w0.elements.iter().enumerate() {
        w0_index.insert(e.clone(), i);
    }
    let id_w = *w0_index
        .get(&IntMat::identity(r))
        .ok_or_else(|| serr("identity missing in finite Weyl group"))?;

    // apartment translation per coordinate: Frobenius-average the lift, then
    // split along the fixed cocharacter basis and the anisotropic directions
    let avg = |y: &[Int]| -> Vec<Rat> {
        let mut acc = vec![Rat::zero(); n];
        let mut cur: Vec<Int> = y.to_vec();
        for _ in 0..fr_ord {
            for i in 0..n {
                acc[i] += rat_of(&cur[i]);
            }
            cur = fr_co.mul_vec(&cur);
        }
        let scale = Rat::new(Int::one(), int(fr_ord as i64));
        rvec_scale(&acc, &scale)
    };
    let mut split_cols: Vec<Vec<Rat>> = (0..rel.cochar_basis.cols)
        .map(|j| rvec(&rel.cochar_basis.col(j)))
        .collect();
    for &i in &marking.delta0 {
        split_cols.push(avg(galois.base.simple_coroot(i)));
    }
    let mut trans_cols: Vec<Vec<Rat>> = Vec::with_capacity(m);
    for j in 0..m {
        let mut e = vec![Int::zero(); m];
        e[j] = Int::one();
        let y = lambda.lift(&e);
        let bar = avg(&y);
        let sol = rat_solve_cols(&split_cols, &bar)
            .ok_or_else(|| serr("Frobenius average outside the apartment splitting"))?;
        let col: Vec<Rat> = sol.into_iter().take(r).collect();
        if j < ntor && !rvec_is_zero(&col) {
            return Err(serr("torsion coordinate with nonzero apartment translation"));
        }
        trans_cols.push(col);
    }

    // action of the finite Weyl group on translation coordinates
    let mut w0_lambda = Vec::with_capacity(w0.elements.len());
    for repm in &w0.reps {
        let b = repm.dual_action()?;
        let mut cols = Vec::with_capacity(m);
        for j in 0..m {
            let mut e = vec![Int::zero(); m];
            e[j] = Int::one();
            cols.push(lambda.project(&b.mul_vec(&lambda.lift(&e))));
        }
        w0_lambda.push(IntMat::from_cols(cols));
    }

    // indivisible positive restricted roots with their reflections
    let root_set: HashSet<Vec<Int>> = rel.restricted_roots.iter().map(|(v, _)| v.clone()).collect();
    let simples: Vec<Vec<Int>> = rel
        .relative_simple
        .iter()
        .map(|(_, a)| {
            let half: Option<Vec<Int>> = a
                .iter()
                .map(|x| if (x % int(2)).is_zero() { Some(x / int(2)) } else { None })
                .collect();
            match half {
                Some(h) if root_set.contains(&h) => h,
                _ => a.clone(),
            }
        })
        .collect();
    let dominant: Vec<Rat> = if simples.is_empty() {
        vec![Rat::zero(); r]
    } else {
        let a: Vec<Vec<Rat>> = simples.iter().map(|s| rvec(s)).collect();
        let b = vec![Rat::one(); simples.len()];
        rat_solve(&a, &b).ok_or_else(|| serr("no regular dominant direction"))?
    };
    let dot = |a: &[Int], p: &[Rat]| -> Rat {
        a.iter().zip(p).map(|(x, y)| rat_of(x) * y).sum()
    };
    let mut positive: Vec<Vec<Int>> = Vec::new();
    for (v, _) in &rel.restricted_roots {
        let dbl: Vec<Int> = v.iter().map(|x| x * int(2)).collect();
        let half: Option<Vec<Int>> = v
            .iter()
            .map(|x| if (x % int(2)).is_zero() { Some(x / int(2)) } else { None })
            .collect();
        let indivisible = !matches!(half, Some(h) if root_set.contains(&h));
        let _ = dbl;
        if indivisible && dot(v, &dominant) > Rat::zero() {
            positive.push(v.clone());
        }
    }

    // wall families: for each positive direction, the minimal translation of
    // the image of the absolute coroot lattice along the reflection line
    let proj_coroots: Vec<Vec<Int>> = (0..galois.base.n_simple())
        .map(|i| lambda.project(galois.base.simple_coroot(i)))
        .collect();
    let pmat = if proj_coroots.is_empty() {
        IntMat::zeros(m, 0)
    } else {
        IntMat::from_cols(proj_coroots.clone())
    };
    let trans_of = |coords: &[Int]| -> Vec<Rat> {
        let mut acc = vec![Rat::zero(); r];
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                acc = rvec_add(&acc, &rvec_scale(&trans_cols[i], &rat_of(c)));
            }
        }
        acc
    };
    let mut walls: Vec<WallFamily> = Vec::new();
    for a in &positive {
        // locate the reflection with moving line transverse to ker(a)
        let mut refl = None;
        for (idx, mmat) in w0.elements.iter().enumerate() {
            if idx == id_w || !mmat.mul(mmat).is_identity() {
                continue;
            }
            let d = mmat.sub(&IntMat::identity(r));
            let mut proportional = true;
            let p = a.iter().position(|x| !x.is_zero()).unwrap();
            'rows: for i in 0..r {
                let row = d.row(i);
                for jj in 0..r {
                    if &row[jj] * &a[p] != &row[p] * &a[jj] {
                        proportional = false;
                        break 'rows;
                    }
                }
            }
            if proportional && !d.is_zero() {
                refl = Some(idx);
                break;
            }
        }
        let refl = refl.ok_or_else(|| serr("reflection missing for a restricted root"))?;
        // translations of the coroot-lattice image collinear with the moving line
        let mmat = &w0.elements[refl];
        let tp_cols: Vec<Vec<Rat>> = (0..pmat.cols).map(|j| trans_of(&pmat.col(j))).collect();
        let u = {
            // moving direction of the reflection
            let d = mmat.sub(&IntMat::identity(r));
            let ib = image_basis(&d);
            if ib.cols != 1 {
                return Err(serr("reflection moving space is not a line"));
            }
            rvec(&ib.col(0))
        };
        // kernel of "component orthogonal to u" on coroot-lattice coefficients
        let mut rows: Vec<Vec<Int>> = Vec::new();
        for i in 0..r {
            for k in (i + 1)..r {
                let mut row = Vec::with_capacity(pmat.cols);
                let mut denlcm = Int::one();
                let raw: Vec<Rat> = (0..pmat.cols)
                    .map(|j| &u[k] * &tp_cols[j][i] - &u[i] * &tp_cols[j][k])
                    .collect();
                for x in &raw {
                    denlcm = num_integer::lcm(denlcm.clone(), x.denom().clone());
                }
                for x in &raw {
                    row.push((x * rat_of(&denlcm)).to_integer());
                }
                rows.push(row);
            }
        }
        let kmat = if rows.is_empty() {
            IntMat::identity(pmat.cols)
        } else {
            kernel_basis(&IntMat::from_rows(rows))
        };
        // value of the root functional on each kernel generator
        let mut acc: Option<(Int, Vec<Int>)> = None; // scaled gcd with witness
        let mut denlcm = Int::one();
        let mut vals = Vec::new();
        for j in 0..kmat.cols {
            let tv = trans_of(&pmat.mul_vec(&kmat.col(j)));
            let v = dot(a, &tv);
            denlcm = num_integer::lcm(denlcm.clone(), v.denom().clone());
            vals.push((v, kmat.col(j)));
        }
        for (v, x) in &vals {
            let scaled = (v * rat_of(&denlcm)).to_integer();
            if scaled.is_zero() {
                continue;
            }
            acc = Some(match acc {
                None => (scaled.abs(), {
                    let sign = if scaled.is_negative() { int(-1) } else { int(1) };
                    x.iter().map(|c| c * &sign).collect()
                }),
                Some((g, wit)) => {
                    let (g2, s, t) = egcd(&g, &scaled);
                    let combo: Vec<Int> = wit
                        .iter()
                        .zip(x)
                        .map(|(wv, xv)| wv * &s + xv * &t)
                        .collect();
                    (g2, combo)
                }
            });
        }
        let (gnum, wit) = acc.ok_or_else(|| serr("no wall translation along a root line"))?;
        let gval = Rat::new(gnum, denlcm);
        let step_coords = {
            let mut v = pmat.mul_vec(&wit);
            lambda.reduce(&mut v);
            // orient positively
            let tv = trans_of(&v);
            if dot(a, &tv) < Rat::zero() {
                v = v.iter().map(|x| -x.clone()).collect();
            }
            v
        };
        let tv = trans_of(&step_coords);
        if dot(a, &tv) != gval {
            return Err(serr("wall step witness does not realize the minimal value"));
        }
        let (gap, step) = (gval.clone() / Rat::from_integer(int(2)), step_coords);
        walls.push(WallFamily { root: a.clone(), refl, step, gap });
    }

    // irreducible components of the relative simple system
    let nsim = simples.len();
    let simple_fam: Vec<usize> = simples
        .iter()
        .map(|a| walls.iter().position(|w| &w.root == a).expect("simple wall"))
        .collect();
    let mut comp_of = vec![usize::MAX; nsim];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for i in 0..nsim {
        if comp_of[i] != usize::MAX {
            continue;
        }
        let mut queue = VecDeque::from([i]);
        let cidx = comps.len();
        comp_of[i] = cidx;
        let mut members = vec![i];
        while let Some(x) = queue.pop_front() {
            let mx = &w0.elements[walls[simple_fam[x]].refl];
            for y in 0..nsim {
                if comp_of[y] != usize::MAX {
                    continue;
                }
                let moved = row_apply(mx, &rvec(&simples[y])) != rvec(&simples[y]);
                let moved2 = {
                    let my = &w0.elements[walls[simple_fam[y]].refl];
                    row_apply(my, &rvec(&simples[x])) != rvec(&simples[x])
                };
                if moved || moved2 {
                    comp_of[y] = cidx;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        members.sort();
        comps.push(members);
    }

    // simple coordinates of each wall root, for dominance comparisons
    let simple_cols: Vec<Vec<Rat>> = simples.iter().map(|s| rvec(s)).collect();
    let coords_of = |a: &[Int]| -> Option<Vec<Rat>> {
        if nsim == 0 {
            return None;
        }
        rat_solve_cols(&simple_cols, &rvec(a))
    };

    // per component: choose the affine node as the dominance-maximal rescaled family
    let mut aff_simple: Vec<AffineNode> = Vec::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    for (ci, members) in comps.iter().enumerate() {
        let mut node_ids = Vec::new();
        for &i in members {
            aff_simple.push(AffineNode {
                root: AffineRoot { grad: rvec(&simples[i]), level: Rat::zero() },
                elt: WElt { lambda: vec![Int::zero(); m], w: walls[simple_fam[i]].refl },
                family: simple_fam[i],
                comp: ci,
            });
            node_ids.push(aff_simple.len() - 1);
        }
        // candidates: wall families supported on this component
        let mut cand: Vec<(usize, Vec<Rat>)> = Vec::new();
        for (fi, wall) in walls.iter().enumerate() {
            let Some(coords) = coords_of(&wall.root) else { continue };
            let support: Vec<usize> =
                (0..nsim).filter(|&k| !coords[k].is_zero()).collect();
            if support.is_empty() || !support.iter().all(|k| members.contains(k)) {
                continue;
            }
            let inv = Rat::one() / wall.gap.clone();
            cand.push((fi, coords.iter().map(|c| c * &inv).collect()));
        }
        let mut maximal = Vec::new();
        for (fi, h) in &cand {
            let dominates_all = cand.iter().all(|(_, h2)| {
                h.iter().zip(h2).all(|(x, y)| x >= y)
            });
            if dominates_all {
                maximal.push(*fi);
            }
        }
        if maximal.len() != 1 {
            return Err(serr(format!(
                "affine node selection not unique in component {ci}: {maximal:?}"
            )));
        }
        let fi = maximal[0];
        let wall = &walls[fi];
        aff_simple.push(AffineNode {
            root: AffineRoot {
                grad: rvec(&wall.root).iter().map(|x| -x.clone()).collect(),
                level: wall.gap.clone(),
            },
            elt: WElt { lambda: wall.step.clone(), w: wall.refl },
            family: fi,
            comp: ci,
        });
        node_ids.push(aff_simple.len() - 1);
        components.push(node_ids);
    }

    // alcove vertices per component, and an interior base point
    let mut comp_vertices: Vec<Vec<(usize, Vec<Rat>)>> = Vec::new();
    let mut base_point = vec![Rat::zero(); r];
    for (ci, node_ids) in components.iter().enumerate() {
        let member_simples = &comps[ci];
        let ucols: Vec<Vec<Rat>> = member_simples
            .iter()
            .map(|&i| trans_of(&walls[simple_fam[i]].step))
            .collect();
        let mut verts = Vec::new();
        let mut bary = vec![Rat::zero(); r];
        for &drop in node_ids {
            let mut arows: Vec<Vec<Rat>> = Vec::new();
            let mut b = Vec::new();
            for &nid in node_ids {
                if nid == drop {
                    continue;
                }
                let nd = &aff_simple[nid];
                arows.push(
                    ucols
                        .iter()
                        .map(|u| u.iter().zip(&nd.root.grad).map(|(x, g)| x * g).sum())
                        .collect(),
                );
                b.push(-nd.root.level.clone());
            }
            let y = rat_solve(&arows, &b)
                .ok_or_else(|| serr("alcove vertex system inconsistent"))?;
            let mut v = vec![Rat::zero(); r];
            for (u, c) in ucols.iter().zip(&y) {
                v = rvec_add(&v, &rvec_scale(u, c));
            }
            verts.push((drop, v.clone()));
            bary = rvec_add(&bary, &v);
        }
        let scale = Rat::new(Int::one(), int(node_ids.len() as i64));
        base_point = rvec_add(&base_point, &rvec_scale(&bary, &scale));
        comp_vertices.push(verts);
    }
    for wall in &walls {
        let v = dot(&wall.root, &base_point);
        if v <= Rat::zero() || v >= wall.gap {
            return Err(serr("base point not interior to the alcove"));
        }
    }

    // translation lattice of the wall reflections, and the quotient omega
    let mut laf_cols: Vec<Vec<Int>> = Vec::new();
    for wall in &walls {
        for act in &w0_lambda {
            let mut v = act.mul_vec(&wall.step);
            lambda.reduce(&mut v);
            laf_cols.push(v);
        }
    }
    let mut rel_cols: Vec<Vec<Int>> = Vec::new();
    for (i, d) in lambda.group.torsion.iter().enumerate() {
        let mut col = vec![Int::zero(); m];
        col[i] = d.clone();
        rel_cols.push(col);
    }
    let mut omega_cols = rel_cols.clone();
    omega_cols.extend(laf_cols.iter().cloned());
    let omega_mat = if omega_cols.is_empty() {
        IntMat::zeros(m, 0)
    } else {
        IntMat::from_cols(omega_cols)
    };
    let omega = cokernel(&omega_mat);

    // torsion classes of the translation group must not hide inside the wall lattice
    if !lambda.group.torsion.is_empty() && !laf_cols.is_empty() {
        let memb = {
            let mut cols = laf_cols.clone();
            cols.extend(rel_cols.iter().cloned());
            IntMat::from_cols(cols)
        };
        let torsion_total: Int = lambda.group.torsion.iter().product();
        if torsion_total <= int(BOX_CAP as i64) {
            let mut combo = vec![Int::zero(); lambda.group.torsion.len()];
            loop {
                if combo.iter().any(|x| !x.is_zero()) {
                    let mut v = vec![Int::zero(); m];
                    for (i, c) in combo.iter().enumerate() {
                        v[i] = c.clone();
                    }
                    if solve_integer(&memb, &v).is_some() {
                        return Err(serr("torsion translation inside the wall lattice"));
                    }
                }
                let mut k = 0;
                loop {
                    if k == combo.len() {
                        break;
                    }
                    combo[k] += 1;
                    if combo[k] < lambda.group.torsion[k] {
                        break;
                    }
                    combo[k] = Int::zero();
                    k += 1;
                }
                if k == combo.len() {
                    break;
                }
            }
        }
    }

    let central_basis = if positive.is_empty() {
        IntMat::identity(r)
    } else {
        kernel_basis(&IntMat::from_rows(positive.clone()))
    };

    let mut datum = IwahoriWeylDatum {
        galois,
        marking,
        frobenius,
        lambda,
        rel,
        w0,
        w0_index,
        w0_lambda,
        trans_cols,
        walls,
        aff_simple,
        components,
        omega,
        omega_reps: Vec::new(),
        omega_perms: Vec::new(),
        base_point,
        central_basis,
        comp_vertices,
        id_w,
    };

    // omega must be fixed by the finite Weyl action for classes to make sense
    for act in &datum.w0_lambda {
        for j in 0..m {
            let mut e = vec![Int::zero(); m];
            e[j] = Int::one();
            if datum.omega.project(&act.mul_vec(&e)) != datum.omega.project(&e) {
                return Err(serr("alcove quotient is not Weyl-stable"));
            }
        }
    }

    let mut reps = Vec::new();
    let mut perms = Vec::new();
    for j in 0..datum.omega.coord_len() {
        let mut e = vec![Int::zero(); datum.omega.coord_len()];
        e[j] = Int::one();
        let lam = datum.lambda_reduce(datum.omega.lift(&e));
        let rep = datum.descend(WElt { lambda: lam, w: datum.id_w })?;
        if datum.class_of(&rep) != e {
            return Err(serr("alcove representative changed its class"));
        }
        perms.push(datum.node_permutation(&rep)?);
        reps.push(rep);
    }
    datum.omega_reps = reps;
    datum.omega_perms = perms;
    Ok(datum)
}

impl IwahoriWeylDatum {
    pub fn coord_len(&self) -> usize {
        self.lambda.coord_len()
    }

    pub fn identity(&self) -> WElt {
        WElt { lambda: vec![Int::zero(); self.coord_len()], w: self.id_w }
    }

    fn lambda_reduce(&self, mut v: Vec<Int>) -> Vec<Int> {
        self.lambda.reduce(&mut v);
        v
    }

    pub fn mul(&self, a: &WElt, b: &WElt) -> WElt {
        let shifted = self.w0_lambda[a.w].mul_vec(&b.lambda);
        let lam: Vec<Int> = a.lambda.iter().zip(&shifted).map(|(x, y)| x + y).collect();
        let mat = self.w0.elements[a.w].mul(&self.w0.elements[b.w]);
        let w = *self.w0_index.get(&mat).expect("finite Weyl closure");
        WElt { lambda: self.lambda_reduce(lam), w }
    }

    pub fn inv(&self, a: &WElt) -> WElt {
        let mat = self.w0.elements[a.w].inverse().expect("Weyl invertible");
        let w = *self.w0_index.get(&mat).expect("finite Weyl closure");
        let lam: Vec<Int> =
            self.w0_lambda[w].mul_vec(&a.lambda).iter().map(|x| -x.clone()).collect();
        WElt { lambda: self.lambda_reduce(lam), w }
    }

    pub fn trans_vec(&self, coords: &[Int]) -> Vec<Rat> {
        let r = self.rel.rank();
        let mut acc = vec![Rat::zero(); r];
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                acc = rvec_add(&acc, &rvec_scale(&self.trans_cols[i], &rat_of(c)));
            }
        }
        acc
    }

    pub fn apply(&self, g: &WElt, p: &[Rat]) -> Vec<Rat> {
        let lin = int_mat_apply_rat(&self.w0.elements[g.w], p);
        rvec_add(&self.trans_vec(&g.lambda), &lin)
    }

    pub fn class_of(&self, g: &WElt) -> Vec<Int> {
        self.omega.project(&g.lambda)
    }

    /// Left-multiply by wall reflections until the image of the base point
    /// returns to the fundamental alcove.
    pub fn descend(&self, g: WElt) -> Result<WElt, AffineError> {
        let mut cur = g;
        for _ in 0..DESCENT_CAP {
            let q = self.apply(&cur, &self.base_point);
            let mut moved = false;
            for node in &self.aff_simple {
                let v = node.root.value(&q);
                if v < Rat::zero() {
                    cur = self.mul(&node.elt, &cur);
                    moved = true;
                    break;
                } else if v.is_zero() {
                    return Err(serr("descent hit a wall"));
                }
            }
            if !moved {
                return Ok(cur);
            }
        }
        Err(AffineError::Cap("alcove descent".into()))
    }

    fn transform_root(&self, g: &WElt, root: &AffineRoot) -> AffineRoot {
        let gi = self.inv(g);
        let grad = row_apply(&self.w0.elements[gi.w], &root.grad);
        let shift: Rat = root
            .grad
            .iter()
            .zip(self.trans_vec(&gi.lambda))
            .map(|(a, t)| a * &t)
            .sum();
        AffineRoot { grad, level: root.level.clone() + shift }
    }

    /// How an alcove-preserving element permutes the simple affine roots.
    pub fn node_permutation(&self, g: &WElt) -> Result<Vec<usize>, AffineError> {
        let mut perm = Vec::with_capacity(self.aff_simple.len());
        for node in &self.aff_simple {
            let img = self.transform_root(g, &node.root);
            let pos = self
                .aff_simple
                .iter()
                .position(|n| n.root == img)
                .ok_or_else(|| serr("node image is not a simple affine root"))?;
            perm.push(pos);
        }
        Ok(perm)
    }

    pub fn omega_rep(&self, class: &[Int]) -> Result<WElt, AffineError> {
        let lam = self.lambda_reduce(self.omega.lift(class));
        let rep = self.descend(WElt { lambda: lam, w: self.id_w })?;
        let mut want = class.to_vec();
        self.omega.reduce(&mut want);
        if self.class_of(&rep) != want {
            return Err(serr("representative class mismatch"));
        }
        Ok(rep)
    }

    fn perm_of_class(&self, class: &[Int]) -> Result<Vec<usize>, AffineError> {
        let nn = self.aff_simple.len();
        let mut perm: Vec<usize> = (0..nn).collect();
        for (j, c) in class.iter().enumerate() {
            let base = &self.omega_perms[j];
            let ord = perm_order(base)?;
            let e = c.mod_floor_usize(ord);
            for _ in 0..e {
                perm = compose(base, &perm);
            }
        }
        Ok(perm)
    }

    fn ball(&self, gens: &[WElt], radius: usize) -> Vec<WElt> {
        let mut seen: HashSet<WElt> = HashSet::new();
        let mut out = vec![self.identity()];
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        for _ in 0..radius {
            let mut next = Vec::new();
            for g in &frontier {
                for s in gens {
                    let h = self.mul(g, s);
                    if seen.insert(h.clone()) {
                        out.push(h.clone());
                        next.push(h);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out
    }

    fn closure(&self, gens: &[WElt]) -> Result<Vec<WElt>, AffineError> {
        let mut seen: HashSet<WElt> = HashSet::new();
        let mut out = vec![self.identity()];
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for g in &frontier {
                for s in gens {
                    let h = self.mul(g, s);
                    if seen.insert(h.clone()) {
                        if seen.len() > CLOSURE_CAP {
                            return Err(AffineError::Cap("subgroup closure".into()));
                        }
                        out.push(h.clone());
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }
}

trait ModFloorUsize {
    fn mod_floor_usize(&self, m: usize) -> usize;
}

impl ModFloorUsize for Int {
    fn mod_floor_usize(&self, m: usize) -> usize {
        use num_integer::Integer;
        let mm = int(m as i64);
        let r = self.mod_floor(&mm);
        let digits = r.to_u64_digits().1;
        if digits.is_empty() {
            0
        } else {
            digits[0] as usize
        }
    }
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

fn perm_order(p: &[usize]) -> Result<usize, AffineError> {
    let idp: Vec<usize> = (0..p.len()).collect();
    let mut cur = p.to_vec();
    for k in 1..=1000 {
        if cur == idp {
            return Ok(k);
        }
        cur = compose(p, &cur);
    }
    Err(AffineError::Cap("permutation order".into()))
}

pub fn analyze_facet(iw: &IwahoriWeylDatum, j: &[usize]) -> Result<FacetData, AffineError> {
    let nn = iw.aff_simple.len();
    let mut jset: Vec<usize> = j.to_vec();
    jset.sort();
    jset.dedup();
    if jset.iter().any(|&x| x >= nn) {
        return Err(AffineError::BadFacet("node index out of range".into()));
    }
    for (ci, comp) in iw.components.iter().enumerate() {
        if !comp.is_empty() && comp.iter().all(|x| jset.contains(x)) {
            return Err(AffineError::BadFacet(format!(
                "component {ci} entirely inside J: not a facet"
            )));
        }
    }

    let jgens: Vec<WElt> = jset.iter().map(|&x| iw.aff_simple[x].elt.clone()).collect();
    let wj = iw.closure(&jgens)?;
    let wjset: HashSet<WElt> = wj.iter().cloned().collect();

    let longest = |k: &[usize]| -> Result<WElt, AffineError> {
        let gens: Vec<WElt> = k.iter().map(|&x| iw.aff_simple[x].elt.clone()).collect();
        let grp = iw.closure(&gens)?;
        let mut found = Vec::new();
        for g in &grp {
            let q = iw.apply(g, &iw.base_point);
            if k.iter().all(|&x| iw.aff_simple[x].root.value(&q) < Rat::zero()) {
                found.push(g.clone());
            }
        }
        if found.len() != 1 {
            return Err(serr(format!("longest element not unique for K = {k:?}")));
        }
        Ok(found.pop().unwrap())
    };
    let w_j_long = if jset.is_empty() { iw.identity() } else { longest(&jset)? };

    let mut s_f_af = Vec::new();
    let mut sfa_indices = Vec::new();
    for comp in &iw.components {
        let remaining: Vec<usize> =
            comp.iter().cloned().filter(|x| !jset.contains(x)).collect();
        if remaining.len() < 2 {
            continue;
        }
        for &i in &remaining {
            let mut k = jset.clone();
            k.push(i);
            k.sort();
            let w_k = longest(&k)?;
            let s = iw.mul(&w_k, &w_j_long);
            // validate: order two, and conjugation preserves the J-parabolic
            let sq = iw.mul(&s, &s);
            if sq != iw.identity() {
                return Err(AffineError::BadGenerator(format!(
                    "w_K w_J for i = {i} is not an involution: square = {sq:?}"
                )));
            }
            let sinv = iw.inv(&s);
            for &jj in &jset {
                let conj = iw.mul(&iw.mul(&s, &iw.aff_simple[jj].elt), &sinv);
                if !wjset.contains(&conj) {
                    return Err(AffineError::BadGenerator(format!(
                        "generator for i = {i} does not normalize the J-parabolic"
                    )));
                }
            }
            s_f_af.push(s);
            sfa_indices.push(i);
        }
    }

    // Coxeter-graph components of the generators
    let k = s_f_af.len();
    let mut gcomp_of = vec![usize::MAX; k];
    let mut graph_comps: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        if gcomp_of[i] != usize::MAX {
            continue;
        }
        let cidx = graph_comps.len();
        let mut queue = VecDeque::from([i]);
        gcomp_of[i] = cidx;
        let mut members = vec![i];
        while let Some(x) = queue.pop_front() {
            for y in 0..k {
                if gcomp_of[y] != usize::MAX {
                    continue;
                }
                let ab = iw.mul(&s_f_af[x], &s_f_af[y]);
                let ba = iw.mul(&s_f_af[y], &s_f_af[x]);
                if ab != ba {
                    gcomp_of[y] = cidx;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        members.sort();
        graph_comps.push(members);
    }

    // J-stabilizer inside omega, by the permutation action
    let mcoords = iw.omega.coord_len();
    let mut omega_f_gens: Vec<Vec<Int>> = Vec::new();
    let mut orders = Vec::new();
    for p in &iw.omega_perms {
        orders.push(perm_order(p)?);
    }
    let box_size: usize = orders.iter().product::<usize>().max(1);
    if box_size > BOX_CAP {
        return Err(AffineError::Cap("omega stabilizer enumeration".into()));
    }
    for (i, &o) in orders.iter().enumerate() {
        let mut g = vec![Int::zero(); mcoords];
        g[i] = int(o as i64);
        omega_f_gens.push(g);
    }
    let jmask: HashSet<usize> = jset.iter().cloned().collect();
    let fixes_j = |perm: &[usize]| -> bool {
        jset.iter().all(|&x| jmask.contains(&perm[x]))
    };
    if mcoords > 0 {
        let mut combo = vec![0usize; mcoords];
        loop {
            if combo.iter().any(|&x| x != 0) {
                let class: Vec<Int> = combo.iter().map(|&x| int(x as i64)).collect();
                let perm = iw.perm_of_class(&class)?;
                if fixes_j(&perm) {
                    omega_f_gens.push(class);
                }
            }
            let mut kk = 0;
            loop {
                if kk == mcoords {
                    break;
                }
                combo[kk] += 1;
                if combo[kk] < orders[kk] {
                    break;
                }
                combo[kk] = 0;
                kk += 1;
            }
            if kk == mcoords {
                break;
            }
        }
    }

    // torsion classes fixing the facet pointwise
    let mut omega_f_tor: Vec<Vec<Int>> = Vec::new();
    let ntor = iw.omega.group.torsion.len();
    if ntor > 0 {
        let torsion_total: Int = iw.omega.group.torsion.iter().product();
        if torsion_total > int(BOX_CAP as i64) {
            return Err(AffineError::Cap("omega torsion enumeration".into()));
        }
        let mut combo = vec![Int::zero(); ntor];
        loop {
            if combo.iter().any(|x| !x.is_zero()) {
                let mut class = vec![Int::zero(); mcoords];
                for (i, c) in combo.iter().enumerate() {
                    class[i] = c.clone();
                }
                let perm = iw.perm_of_class(&class)?;
                if fixes_j(&perm) {
                    let rep = iw.omega_rep(&class)?;
                    if fixes_facet_pointwise(iw, &jset, &rep) {
                        omega_f_tor.push(class);
                    }
                }
            }
            let mut kk = 0;
            loop {
                if kk == ntor {
                    break;
                }
                combo[kk] += 1;
                if combo[kk] < iw.omega.group.torsion[kk] {
                    break;
                }
                combo[kk] = Int::zero();
                kk += 1;
            }
            if kk == ntor {
                break;
            }
        }
    }

    Ok(FacetData {
        j: jset,
        wj,
        s_f_af,
        sfa_indices,
        graph_comps,
        omega_f_gens,
        omega_f_tor,
        lattices: None,
    })
}

fn fixes_facet_pointwise(iw: &IwahoriWeylDatum, jset: &[usize], rep: &WElt) -> bool {
    // fixed on every vertex of the facet face, identity on the central space
    for verts in &iw.comp_vertices {
        for (node, v) in verts {
            if jset.contains(node) {
                continue;
            }
            if iw.apply(rep, v) != *v {
                return false;
            }
        }
    }
    let mmat = &iw.w0.elements[rep.w];
    for jcol in 0..iw.central_basis.cols {
        let z = iw.central_basis.col(jcol);
        if mmat.mul_vec(&z) != z {
            return false;
        }
    }
    true
}

pub fn facet_root_datum(
    iw: &IwahoriWeylDatum,
    f: &FacetData,
    radius: usize,
) -> Result<FacetLattices, AffineError> {
    let r = iw.rel.rank();
    let m = iw.coord_len();

    // finite reflection choice: drop the largest-index generator per graph component
    let mut dropped = Vec::new();
    let mut s_f: Vec<usize> = Vec::new();
    for comp in &f.graph_comps {
        let &drop = comp
            .iter()
            .max_by_key(|&&p| f.sfa_indices[p])
            .expect("nonempty graph component");
        dropped.push(drop);
        for &p in comp {
            if p != drop {
                s_f.push(p);
            }
        }
    }
    s_f.sort();

    let sf_gens: Vec<WElt> = s_f.iter().map(|&p| f.s_f_af[p].clone()).collect();
    let w_circ = iw.closure(&sf_gens)?;
    let w_circ_set: HashSet<WElt> = w_circ.iter().cloned().collect();

    // the distinguished vertex: common fixed point of S_f and the J-reflections
    let mut arows: Vec<Vec<Rat>> = Vec::new();
    let mut b: Vec<Rat> = Vec::new();
    let mut fixers: Vec<WElt> = sf_gens.clone();
    fixers.extend(f.j.iter().map(|&x| iw.aff_simple[x].elt.clone()));
    for g in &fixers {
        let mmat = &iw.w0.elements[g.w];
        let t = iw.trans_vec(&g.lambda);
        for i in 0..r {
            let mut row: Vec<Rat> = (0..r).map(|jj| rat_of(mmat.at(i, jj))).collect();
            row[i] -= Rat::one();
            arows.push(row);
            b.push(-t[i].clone());
        }
    }
    let x_f_point = if arows.is_empty() {
        vec![Rat::zero(); r]
    } else {
        rat_solve(&arows, &b).ok_or_else(|| serr("no common fixed point for S_f"))?
    };

    // enumerate the facet affine Weyl group and certify its standard form
    let all_gens: Vec<WElt> = f.s_f_af.clone();
    let ball = iw.ball(&all_gens, radius);
    let mut xj_cols: Vec<Vec<Int>> = Vec::new();
    for g in &ball {
        let fixes = iw.apply(g, &x_f_point) == x_f_point;
        if fixes != w_circ_set.contains(g) {
            return Err(serr("point stabilizer differs from the finite reflection group"));
        }
        let h = w_circ
            .iter()
            .find(|h| h.w == g.w)
            .ok_or_else(|| serr("linear part outside the finite reflection group (radius?)"))?;
        let x = iw.mul(g, &iw.inv(h));
        if x.w != iw.id_w {
            return Err(serr("translation factor has a linear part"));
        }
        for (i, c) in x.lambda.iter().enumerate() {
            if i < iw.lambda.group.torsion.len() && !c.is_zero() {
                return Err(serr("facet translation with torsion component"));
            }
            let _ = c;
        }
        if x.lambda.iter().any(|c| !c.is_zero()) {
            xj_cols.push(x.lambda.clone());
        }
    }
    let xj_basis = if xj_cols.is_empty() {
        IntMat::zeros(m, 0)
    } else {
        image_basis(&IntMat::from_cols(xj_cols))
    };
    // certify every enumerated translation factor lies in the lattice
    for g in &ball {
        let h = w_circ.iter().find(|h| h.w == g.w).unwrap();
        let x = iw.mul(g, &iw.inv(h));
        if x.lambda.iter().any(|c| !c.is_zero())
            && solve_integer(&xj_basis, &x.lambda).is_none()
        {
            return Err(serr("translation outside the enumerated lattice (radius?)"));
        }
    }
    if s_f.len() != xj_basis.cols {
        return Err(serr(format!(
            "rank chain violated: |S_f| = {} but rk X(J) = {}",
            s_f.len(),
            xj_basis.cols
        )));
    }

    // apartment split: components contributing generators + central directions
    let contributing: HashSet<usize> = f
        .sfa_indices
        .iter()
        .map(|&i| iw.aff_simple[i].comp)
        .collect();
    let mut f_cols: Vec<Vec<Rat>> = Vec::new();
    let mut m_cols: Vec<Vec<Rat>> = Vec::new();
    for (ci, comp) in iw.components.iter().enumerate() {
        let cols: Vec<Vec<Rat>> = comp
            .iter()
            .filter(|&&nid| iw.aff_simple[nid].root.level.is_zero())
            .map(|&nid| {
                let fam = iw.aff_simple[nid].family;
                iw.trans_vec(&iw.walls[fam].step)
            })
            .collect();
        if contributing.contains(&ci) {
            f_cols.extend(cols);
        } else {
            m_cols.extend(cols);
        }
    }
    for jcol in 0..iw.central_basis.cols {
        f_cols.push(rvec(&iw.central_basis.col(jcol)));
    }
    let nf = f_cols.len();
    let project_f = |v: &[Rat]| -> Result<Vec<Rat>, AffineError> {
        if rvec_is_zero(v) {
            return Ok(v.to_vec());
        }
        let mut allcols = f_cols.clone();
        allcols.extend(m_cols.iter().cloned());
        let sol = rat_solve_cols(&allcols, v)
            .ok_or_else(|| serr("vector outside the apartment split"))?;
        let mut out = vec![Rat::zero(); r];
        for (c, col) in sol.iter().take(nf).zip(&f_cols) {
            out = rvec_add(&out, &rvec_scale(col, c));
        }
        Ok(out)
    };

    // translation parts of the omega stabilizer
    let mut xf_gen_vecs: Vec<Vec<Rat>> = Vec::new();
    for jcol in 0..xj_basis.cols {
        xf_gen_vecs.push(iw.trans_vec(&xj_basis.col(jcol)));
    }
    let mut lin_mats: Vec<IntMat> = sf_gens.iter().map(|g| iw.w0.elements[g.w].clone()).collect();
    for class in &f.omega_f_gens {
        let rep = iw.omega_rep(class)?;
        // match the linear part on the relevant directions
        let hit = w_circ
            .iter()
            .find(|h| {
                f_cols.iter().all(|col| {
                    int_mat_apply_rat(&iw.w0.elements[h.w], col)
                        == int_mat_apply_rat(&iw.w0.elements[rep.w], col)
                })
            })
            .ok_or_else(|| serr("omega linear part not represented in W-circle"))?;
        let tau = rvec_sub(&iw.trans_vec(&rep.lambda), &iw.trans_vec(&hit.lambda));
        let tau_f = project_f(&tau)?;
        if !rvec_is_zero(&tau_f) {
            xf_gen_vecs.push(tau_f);
        }
        lin_mats.push(iw.w0.elements[rep.w].clone());
    }

    // close the lattice under the linear actions, with a fixed denominator
    let mut den = Int::one();
    for v in &xf_gen_vecs {
        for x in v {
            den = num_integer::lcm(den.clone(), x.denom().clone());
        }
    }
    let scale_up = |v: &[Rat]| -> Vec<Int> {
        v.iter().map(|x| (x * rat_of(&den)).to_integer()).collect()
    };
    let mut cur: Vec<Vec<Int>> = xf_gen_vecs.iter().map(|v| scale_up(v)).collect();
    loop {
        let basis = if cur.is_empty() {
            IntMat::zeros(r, 0)
        } else {
            image_basis(&IntMat::from_cols(cur.clone()))
        };
        let mut grew = false;
        let mut next = cur.clone();
        for mat in &lin_mats {
            for jcol in 0..basis.cols {
                let img = mat.mul_vec(&basis.col(jcol));
                if solve_integer(&basis, &img).is_none() {
                    next.push(img);
                    grew = true;
                }
            }
        }
        cur = next;
        if !grew {
            break;
        }
    }
    let xf_int = if cur.is_empty() {
        IntMat::zeros(r, 0)
    } else {
        image_basis(&IntMat::from_cols(cur))
    };
    let inv_den = Rat::new(Int::one(), den.clone());
    let xf_basis: Vec<Vec<Rat>> = (0..xf_int.cols)
        .map(|jcol| rvec_scale(&rvec(&xf_int.col(jcol)), &inv_den))
        .collect();
    let d = xf_basis.len();

    let xf_coords = |v: &[Rat]| -> Result<Vec<Int>, AffineError> {
        if d == 0 {
            return if rvec_is_zero(v) {
                Ok(vec![])
            } else {
                Err(serr("nonzero vector in a rank-0 lattice"))
            };
        }
        let sol = rat_solve_cols(&xf_basis, v).ok_or_else(|| serr("vector outside X_f span"))?;
        if !sol.iter().all(rat_is_int) {
            return Err(serr("vector not integral in the X_f basis"));
        }
        Ok(sol.iter().map(|x| x.to_integer()).collect())
    };

    // reconstruct the root datum: minimal parallel translations per finite reflection
    let mut rf_simples: Vec<(Vec<Int>, Vec<Int>)> = Vec::new();
    let mut rf_translations = Vec::new();
    let mut rf_sfa = Vec::new();
    for &p in &s_f {
        let s = &f.s_f_af[p];
        let mut candidates: Vec<Vec<Rat>> = Vec::new();
        for g in &ball {
            if g.w == s.w && g != s && iw.mul(g, g) == iw.identity() {
                let t = iw.mul(g, &iw.inv(s));
                if t.w == iw.id_w && t.lambda.iter().any(|c| !c.is_zero()) {
                    candidates.push(iw.trans_vec(&t.lambda));
                }
            }
        }
        if candidates.is_empty() {
            return Err(serr("no parallel reflection found (radius?)"));
        }
        // all candidates must be collinear; pick the shortest
        let pivot = candidates[0].clone();
        let pidx = pivot.iter().position(|x| !x.is_zero()).ok_or_else(|| serr("zero step"))?;
        let mut best: Option<(Rat, Vec<Rat>)> = None;
        for c in &candidates {
            for i in 0..r {
                if &c[i] * &pivot[pidx] != &c[pidx] * &pivot[i] {
                    return Err(serr("parallel translations not collinear"));
                }
            }
            let mag = c[pidx].clone().abs();
            if best.as_ref().map(|(bm, _)| &mag < bm).unwrap_or(true) {
                best = Some((mag, c.clone()));
            }
        }
        let (_, mut mu) = best.unwrap();
        // orient toward the alcove side of the fixed wall
        let moved = rvec_sub(&iw.base_point, &iw.apply(s, &iw.base_point));
        let ell = &moved[pidx] / &mu[pidx];
        if ell < Rat::zero() {
            mu = mu.iter().map(|x| -x.clone()).collect();
        }
        let root = xf_coords(&mu)?;
        // coroot from the reflection action on the lattice
        let mmat = &iw.w0.elements[s.w];
        let mut cmat_cols = Vec::new();
        for bv in &xf_basis {
            cmat_cols.push(xf_coords(&int_mat_apply_rat_rows(mmat, bv))?);
        }
        let cmat = IntMat::from_cols(cmat_cols);
        let kpos = root.iter().position(|x| !x.is_zero()).ok_or_else(|| serr("zero root"))?;
        let mut coroot = Vec::with_capacity(d);
        for jj in 0..d {
            let diff = if kpos == jj {
                &Int::one() - cmat.at(kpos, jj)
            } else {
                -cmat.at(kpos, jj).clone()
            };
            let (q, rem) = num_integer::Integer::div_rem(&diff, &root[kpos]);
            if !rem.is_zero() {
                return Err(serr("non-integral coroot"));
            }
            coroot.push(q);
        }
        // consistency of the reflection formula on every row
        for i in 0..d {
            for jj in 0..d {
                let expect = if i == jj { Int::one() } else { Int::zero() };
                let got = cmat.at(i, jj) + &root[i] * &coroot[jj];
                if got != expect {
                    return Err(serr("reflection formula inconsistent"));
                }
            }
        }
        rf_translations.push(mu);
        rf_sfa.push(p);
        rf_simples.push((root, coroot));
    }
    let rf = if rf_simples.is_empty() {
        BasedRootDatum::torus(d, Some("facet datum".into()))
    } else {
        BasedRootDatum::generate(d, rf_simples, Some("facet datum".into()))
    };
    rf.validate()?;

    // the reconstructed Weyl group must match the finite reflection group
    let rf_weyl: HashSet<IntMat> = rf
        .weyl_group_elements(CLOSURE_CAP)?
        .into_iter()
        .map(|w| w.matrix)
        .collect();
    let mut circ_mats: HashSet<IntMat> = HashSet::new();
    for h in &w_circ {
        let mmat = &iw.w0.elements[h.w];
        let mut cols = Vec::new();
        for bv in &xf_basis {
            cols.push(xf_coords(&int_mat_apply_rat_rows(mmat, bv))?);
        }
        circ_mats.insert(if d == 0 {
            IntMat::identity(0)
        } else {
            IntMat::from_cols(cols)
        });
    }
    if rf_weyl != circ_mats {
        return Err(serr("reconstructed Weyl group differs from the fixed-point group"));
    }

    Ok(FacetLattices {
        xj_basis,
        x_f_point,
        s_f,
        w_circ,
        xf_basis,
        rf,
        rf_translations,
        rf_sfa,
        dropped,
    })
}

fn int_mat_apply_rat_rows(m: &IntMat, v: &[Rat]) -> Vec<Rat> {
    int_mat_apply_rat(m, v)
}

/// The torsion part of the center of the facet group must be the pointwise
/// facet stabilizer.
pub fn center_torsion_check(iw: &IwahoriWeylDatum, f: &FacetData) -> Result<(), AffineError> {
    let ntor = iw.omega.group.torsion.len();
    let mcoords = iw.omega.coord_len();
    let mut central: Vec<Vec<Int>> = Vec::new();
    if ntor > 0 {
        let mut combo = vec![Int::zero(); ntor];
        loop {
            if combo.iter().any(|x| !x.is_zero()) {
                let mut class = vec![Int::zero(); mcoords];
                for (i, c) in combo.iter().enumerate() {
                    class[i] = c.clone();
                }
                let perm = iw.perm_of_class(&class)?;
                let fixes_j = f.j.iter().all(|&x| f.j.contains(&perm[x]));
                if fixes_j {
                    let rep = iw.omega_rep(&class)?;
                    let commutes = f.s_f_af.iter().all(|s| iw.mul(&rep, s) == iw.mul(s, &rep));
                    if commutes {
                        central.push(class);
                    }
                }
            }
            let mut kk = 0;
            loop {
                if kk == ntor {
                    break;
                }
                combo[kk] += 1;
                if combo[kk] < iw.omega.group.torsion[kk] {
                    break;
                }
                combo[kk] = Int::zero();
                kk += 1;
            }
            if kk == ntor {
                break;
            }
        }
    }
    let a: HashSet<Vec<Int>> = central.into_iter().collect();
    let b: HashSet<Vec<Int>> = f.omega_f_tor.iter().cloned().collect();
    if a != b {
        return Err(serr(format!(
            "central torsion {a:?} differs from pointwise stabilizer {b:?}"
        )));
    }
    Ok(())
}
