//! Based root data (X*, roots, X_*, coroots, simple basis): validation,
//! Dynkin classification, duality, Weyl group enumeration, standard Levi
//! sub-data and the adjoint quotient.

use crate::intlin::{int, rat_solve, rvec, Int, IntMat, Rat};
use num_traits::{One, Signed, Zero};
use std::collections::{HashMap, VecDeque};

#[derive(Debug, thiserror::Error)]
pub enum DatumError {
    #[error("root datum axiom violated ({axiom}): {witness}")]
    Axiom { axiom: String, witness: String },
    #[error("Weyl group order {order} exceeds cap {cap}")]
    WeylCap { order: String, cap: usize },
    #[error("unknown Dynkin component: {0}")]
    UnknownType(String),
    #[error("index set not contained in the simple system")]
    BadSubset,
}

fn axiom(a: &str, w: String) -> DatumError {
    DatumError::Axiom { axiom: a.into(), witness: w }
}

pub fn pairing(x: &[Int], co: &[Int]) -> Int {
    assert_eq!(x.len(), co.len());
    x.iter().zip(co).map(|(a, b)| a * b).sum()
}

fn fmt_vec(v: &[Int]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasedRootDatum {
    pub rank: usize,
    pub roots: Vec<Vec<Int>>,
    pub coroots: Vec<Vec<Int>>,
    /// positions into `roots` giving the simple system, in order
    pub simple: Vec<usize>,
    pub name: Option<String>,
}

#[derive(Clone, Debug)]
pub struct WeylElt {
    /// action on the character lattice
    pub matrix: IntMat,
    /// reduced word in simple positions (0-based into `simple`)
    pub word: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct RootDatumMorphism {
    /// map of character lattices (columns = images of the source basis)
    pub lattice_map: IntMat,
    /// source root index -> target root index where defined
    pub root_index_map: Vec<Option<usize>>,
}

#[derive(Clone, Debug)]
pub struct DatumReport {
    pub cartan: IntMat,
    /// (type label, positions into `simple`) per irreducible component
    pub components: Vec<(String, Vec<usize>)>,
    pub weyl_order: Int,
}

impl BasedRootDatum {
    pub fn torus(rank: usize, name: Option<String>) -> Self {
        BasedRootDatum { rank, roots: vec![], coroots: vec![], simple: vec![], name }
    }

    pub fn n_simple(&self) -> usize {
        self.simple.len()
    }

    pub fn simple_root(&self, i: usize) -> &Vec<Int> {
        &self.roots[self.simple[i]]
    }

    pub fn simple_coroot(&self, i: usize) -> &Vec<Int> {
        &self.coroots[self.simple[i]]
    }

    /// Cartan matrix A[i][j] = <alpha_j, alpha_i^vee> over the simple system.
    pub fn cartan(&self) -> IntMat {
        let k = self.n_simple();
        let mut a = IntMat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                *a.at_mut(i, j) = pairing(self.simple_root(j), self.simple_coroot(i));
            }
        }
        a
    }

    /// Matrix of s_i on X*: x -> x - <x, alpha_i^vee> alpha_i.
    pub fn simple_reflection(&self, i: usize) -> IntMat {
        reflection_matrix(self.simple_root(i), self.simple_coroot(i))
    }

    /// Matrix of s_i on X_*: y -> y - <alpha_i, y> alpha_i^vee.
    pub fn simple_coreflection(&self, i: usize) -> IntMat {
        reflection_matrix(self.simple_coroot(i), self.simple_root(i))
    }

    pub fn root_index(&self) -> HashMap<Vec<Int>, usize> {
        self.roots.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect()
    }

    /// Coordinates of a root over the simple system, when they exist.
    pub fn simple_coordinates(&self, root: &[Int]) -> Option<Vec<Rat>> {
        let k = self.n_simple();
        let a: Vec<Vec<Rat>> = (0..self.rank)
            .map(|r| (0..k).map(|i| Rat::from_integer(self.simple_root(i)[r].clone())).collect())
            .collect();
        rat_solve(&a, &rvec(root))
    }

    pub fn is_positive_root(&self, root: &[Int]) -> bool {
        match self.simple_coordinates(root) {
            Some(c) => c.iter().all(|x| !x.is_negative()) && c.iter().any(|x| x.is_positive()),
            None => false,
        }
    }

    pub fn positive_roots(&self) -> Vec<usize> {
        (0..self.roots.len()).filter(|&i| self.is_positive_root(&self.roots[i])).collect()
    }

    pub fn validate(&self) -> Result<DatumReport, DatumError> {
        if self.roots.len() != self.coroots.len() {
            return Err(axiom("pairing axiom", "roots and coroots differ in length".into()));
        }
        for r in self.roots.iter().chain(self.coroots.iter()) {
            if r.len() != self.rank {
                return Err(axiom("lattice rank", fmt_vec(r)));
            }
        }
        for &i in &self.simple {
            if i >= self.roots.len() {
                return Err(axiom("simple system", format!("index {} out of range", i)));
            }
        }
        let index = self.root_index();
        if index.len() != self.roots.len() {
            return Err(axiom("multiplicity", "duplicate root vector".into()));
        }
        for (i, r) in self.roots.iter().enumerate() {
            if r.iter().all(|x| x.is_zero()) {
                return Err(axiom("nonzero roots", format!("root #{}", i)));
            }
            if pairing(r, &self.coroots[i]) != int(2) {
                return Err(axiom(
                    "pairing axiom",
                    format!("<{}, {}> != 2", fmt_vec(r), fmt_vec(&self.coroots[i])),
                ));
            }
            let neg: Vec<Int> = r.iter().map(|x| -x.clone()).collect();
            if !index.contains_key(&neg) {
                return Err(axiom("negation closure", fmt_vec(r)));
            }
            let dbl: Vec<Int> = r.iter().map(|x| x * int(2)).collect();
            if index.contains_key(&dbl) {
                return Err(axiom("reduced system", fmt_vec(r)));
            }
        }
        // simple reflections permute roots, compatibly with coroots
        for i in 0..self.n_simple() {
            let s = self.simple_reflection(i);
            let sv = self.simple_coreflection(i);
            for (j, r) in self.roots.iter().enumerate() {
                let img = s.mul_vec(r);
                let Some(&k) = index.get(&img) else {
                    return Err(axiom(
                        "reflection closure",
                        format!("s_{} sends {} outside the root list", i, fmt_vec(r)),
                    ));
                };
                if sv.mul_vec(&self.coroots[j]) != self.coroots[k] {
                    return Err(axiom(
                        "coroot compatibility",
                        format!("s_{} on coroot of {}", i, fmt_vec(r)),
                    ));
                }
            }
        }
        // integral simple coordinates with uniform sign
        for r in &self.roots {
            let Some(c) = self.simple_coordinates(r) else {
                return Err(axiom("simple span", fmt_vec(r)));
            };
            if !c.iter().all(|x| x.denom().is_one()) {
                return Err(axiom("integral simple coordinates", fmt_vec(r)));
            }
            let pos = c.iter().any(|x| x.is_positive());
            let neg = c.iter().any(|x| x.is_negative());
            if pos && neg {
                return Err(axiom("sign coherence", fmt_vec(r)));
            }
        }
        let cartan = self.cartan();
        let components = self.classify()?;
        let weyl_order = components.iter().map(|(t, _)| type_weyl_order(t)).product();
        Ok(DatumReport { cartan, components, weyl_order })
    }

    /// Irreducible components of the Dynkin diagram with type labels.
    pub fn classify(&self) -> Result<Vec<(String, Vec<usize>)>, DatumError> {
        let k = self.n_simple();
        let cartan = self.cartan();
        // connected components of the diagram
        let mut seen = vec![false; k];
        let mut comps = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = vec![start];
            while let Some(i) = queue.pop() {
                for j in 0..k {
                    if !seen[j] && !cartan.at(i, j).is_zero() && i != j {
                        seen[j] = true;
                        comp.push(j);
                        queue.push(j);
                    }
                }
            }
            comp.sort();
            comps.push(comp);
        }
        let mut out = Vec::new();
        for comp in comps {
            let m = comp.len();
            let sub = |i: usize, j: usize| cartan.at(comp[i], comp[j]).clone();
            let submat: Vec<Vec<Int>> =
                (0..m).map(|i| (0..m).map(|j| sub(i, j)).collect()).collect();
            let label = classify_component(&submat)
                .ok_or_else(|| DatumError::UnknownType(format!("component {:?}", comp)))?;
            out.push((label, comp));
        }
        out.sort_by(|a, b| a.1.cmp(&b.1));
        Ok(out)
    }

    pub fn weyl_order(&self) -> Result<Int, DatumError> {
        Ok(self.classify()?.iter().map(|(t, _)| type_weyl_order(t)).product())
    }

    /// Full Weyl group with lexicographically smallest reduced words.
    pub fn weyl_group_elements(&self, cap: usize) -> Result<Vec<WeylElt>, DatumError> {
        let order = self.weyl_order()?;
        if order > int(cap as i64) {
            return Err(DatumError::WeylCap { order: order.to_string(), cap });
        }
        let gens: Vec<IntMat> = (0..self.n_simple()).map(|i| self.simple_reflection(i)).collect();
        let mut elems = vec![WeylElt { matrix: IntMat::identity(self.rank), word: vec![] }];
        let mut seen: HashMap<IntMat, ()> = HashMap::new();
        seen.insert(elems[0].matrix.clone(), ());
        let mut queue: VecDeque<usize> = VecDeque::new();
        queue.push_back(0);
        while let Some(idx) = queue.pop_front() {
            let cur = elems[idx].clone();
            for (i, g) in gens.iter().enumerate() {
                let m = cur.matrix.mul(g);
                if !seen.contains_key(&m) {
                    seen.insert(m.clone(), ());
                    let mut word = cur.word.clone();
                    word.push(i);
                    elems.push(WeylElt { matrix: m, word });
                    queue.push_back(elems.len() - 1);
                }
            }
        }
        Ok(elems)
    }

    /// Number of positive roots sent negative by the matrix.
    pub fn length_of(&self, m: &IntMat) -> usize {
        self.positive_roots()
            .into_iter()
            .filter(|&i| !self.is_positive_root(&m.mul_vec(&self.roots[i])))
            .count()
    }

    pub fn dual(&self) -> BasedRootDatum {
        BasedRootDatum {
            rank: self.rank,
            roots: self.coroots.clone(),
            coroots: self.roots.clone(),
            simple: self.simple.clone(),
            name: self.name.as_ref().map(|n| format!("{}^", n)),
        }
    }

    /// Sub-datum on the roots lying in the span of the simple subset
    /// (positions into `simple`).
    pub fn standard_levi(&self, subset: &[usize]) -> Result<BasedRootDatum, DatumError> {
        if subset.iter().any(|&i| i >= self.n_simple()) {
            return Err(DatumError::BadSubset);
        }
        let mut keep = Vec::new();
        for (i, r) in self.roots.iter().enumerate() {
            let Some(c) = self.simple_coordinates(r) else { continue };
            let supported = (0..self.n_simple()).all(|j| subset.contains(&j) || c[j].is_zero());
            if supported {
                keep.push(i);
            }
        }
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        for &old in &keep {
            roots.push(self.roots[old].clone());
            coroots.push(self.coroots[old].clone());
        }
        // simple order aligned with `subset` order
        let mut ordered_simple = Vec::new();
        for &j in subset {
            let v = self.simple_root(j);
            let pos = roots.iter().position(|r| r == v).expect("simple root kept");
            ordered_simple.push(pos);
        }
        Ok(BasedRootDatum {
            rank: self.rank,
            roots,
            coroots,
            simple: ordered_simple,
            name: None,
        })
    }

    /// Adjoint quotient: character lattice becomes the root lattice with the
    /// simple roots as basis; returns the lattice comparison.
    pub fn adjoint(&self) -> Result<(BasedRootDatum, RootDatumMorphism), DatumError> {
        let k = self.n_simple();
        let mut roots = Vec::new();
        let mut coroots = Vec::new();
        for (i, r) in self.roots.iter().enumerate() {
            let c = self
                .simple_coordinates(r)
                .ok_or_else(|| axiom("simple span", fmt_vec(r)))?;
            if !c.iter().all(|x| x.denom().is_one()) {
                return Err(axiom("integral simple coordinates", fmt_vec(r)));
            }
            roots.push(c.iter().map(|x| x.numer().clone()).collect::<Vec<Int>>());
            // coroot as a functional in the new basis: <alpha_j, beta^vee>
            coroots.push(
                (0..k)
                    .map(|j| pairing(self.simple_root(j), &self.coroots[i]))
                    .collect::<Vec<Int>>(),
            );
        }
        let datum = BasedRootDatum {
            rank: k,
            roots,
            coroots,
            simple: self.simple.iter().enumerate().map(|(pos, _)| self.simple[pos]).collect(),
            name: self.name.as_ref().map(|n| format!("{}_ad", n)),
        };
        // embedding of the adjoint character lattice: basis vector j -> alpha_j
        let lattice_map = if k == 0 {
            IntMat::zeros(self.rank, 0)
        } else {
            IntMat::from_cols((0..k).map(|j| self.simple_root(j).clone()).collect())
        };
        let morphism = RootDatumMorphism {
            lattice_map,
            root_index_map: (0..self.roots.len()).map(Some).collect(),
        };
        Ok((datum, morphism))
    }

    /// Close a simple system under its reflections into a full based datum.
    pub fn generate(
        rank: usize,
        simples: Vec<(Vec<Int>, Vec<Int>)>,
        name: Option<String>,
    ) -> BasedRootDatum {
        let refl: Vec<IntMat> = simples.iter().map(|(r, c)| reflection_matrix(r, c)).collect();
        let corefl: Vec<IntMat> = simples.iter().map(|(r, c)| reflection_matrix(c, r)).collect();
        let mut roots: Vec<Vec<Int>> = Vec::new();
        let mut coroots: Vec<Vec<Int>> = Vec::new();
        let mut seen: HashMap<Vec<Int>, ()> = HashMap::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (r, c) in &simples {
            if !seen.contains_key(r) {
                seen.insert(r.clone(), ());
                roots.push(r.clone());
                coroots.push(c.clone());
                queue.push_back(roots.len() - 1);
            }
        }
        while let Some(idx) = queue.pop_front() {
            let (r, c) = (roots[idx].clone(), coroots[idx].clone());
            for i in 0..simples.len() {
                let nr = refl[i].mul_vec(&r);
                if !seen.contains_key(&nr) {
                    seen.insert(nr.clone(), ());
                    roots.push(nr);
                    coroots.push(corefl[i].mul_vec(&c));
                    queue.push_back(roots.len() - 1);
                }
            }
            let neg: Vec<Int> = r.iter().map(|x| -x.clone()).collect();
            if !seen.contains_key(&neg) {
                seen.insert(neg.clone(), ());
                roots.push(neg);
                coroots.push(c.iter().map(|x| -x.clone()).collect());
                queue.push_back(roots.len() - 1);
            }
        }
        let simple = (0..simples.len())
            .map(|i| roots.iter().position(|r| *r == simples[i].0).unwrap())
            .collect();
        BasedRootDatum { rank, roots, coroots, simple, name }
    }
}

/// x -> x - <x, co> r as a matrix (r, co in mutually dual lattices).
pub fn reflection_matrix(r: &[Int], co: &[Int]) -> IntMat {
    let n = r.len();
    let mut m = IntMat::identity(n);
    for j in 0..n {
        for i in 0..n {
            let t = &co[j] * &r[i];
            *m.at_mut(i, j) -= t;
        }
    }
    m
}

fn type_weyl_order(label: &str) -> Int {
    let (fam, n) = (label.chars().next().unwrap(), label[1..].parse::<usize>().unwrap());
    let fact = |k: usize| -> Int { (1..=k).map(|x| int(x as i64)).product() };
    match fam {
        'A' => fact(n + 1),
        'B' | 'C' => int(1 << n) * fact(n),
        'D' => int(1 << (n - 1)) * fact(n),
        'G' => int(12),
        'F' => int(1152),
        'E' => match n {
            6 => int(51840),
            7 => int(2903040),
            8 => int(696729600),
            _ => unreachable!(),
        },
        _ => unreachable!(),
    }
}

fn standard_cartan(fam: char, n: usize) -> Option<Vec<Vec<i64>>> {
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        c[i][i] = 2;
    }
    let chain = |c: &mut Vec<Vec<i64>>, edges: &[(usize, usize, i64, i64)]| {
        for &(i, j, a, b) in edges {
            c[i][j] = a;
            c[j][i] = b;
        }
    };
    match (fam, n) {
        ('A', _) if n >= 1 => {
            for i in 0..n - 1 {
                chain(&mut c, &[(i, i + 1, -1, -1)]);
            }
        }
        ('B', _) if n >= 2 => {
            for i in 0..n - 2 {
                chain(&mut c, &[(i, i + 1, -1, -1)]);
            }
            chain(&mut c, &[(n - 2, n - 1, -2, -1)]);
        }
        ('C', _) if n >= 2 => {
            for i in 0..n - 2 {
                chain(&mut c, &[(i, i + 1, -1, -1)]);
            }
            chain(&mut c, &[(n - 2, n - 1, -1, -2)]);
        }
        ('D', _) if n >= 4 => {
            for i in 0..n - 2 {
                chain(&mut c, &[(i, i + 1, -1, -1)]);
            }
            chain(&mut c, &[(n - 3, n - 1, -1, -1)]);
        }
        ('G', 2) => {
            chain(&mut c, &[(0, 1, -1, -3)]);
        }
        ('F', 4) => {
            chain(&mut c, &[(0, 1, -1, -1), (1, 2, -2, -1), (2, 3, -1, -1)]);
        }
        ('E', 6..=8) => {
            // chain 0-1-2-...-(n-2), branch node 2 to n-1
            for i in 0..n - 2 {
                chain(&mut c, &[(i, i + 1, -1, -1)]);
            }
            chain(&mut c, &[(2, n - 1, -1, -1)]);
        }
        _ => return None,
    }
    Some(c)
}

fn classify_component(sub: &Vec<Vec<Int>>) -> Option<String> {
    let n = sub.len();
    let candidates: Vec<(char, usize)> = match n {
        1 => vec![('A', 1)],
        2 => vec![('A', 2), ('C', 2), ('G', 2)],
        _ => {
            let mut v = vec![('A', n), ('B', n), ('C', n)];
            if n >= 4 {
                v.push(('D', n));
                if n == 4 {
                    v.push(('F', 4));
                }
            }
            if (6..=8).contains(&n) {
                v.push(('E', n));
            }
            v
        }
    };
    let sub_i64: Option<Vec<Vec<i64>>> = sub
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| i64::try_from(x.clone()).ok())
                .collect::<Option<Vec<i64>>>()
        })
        .collect();
    let sub_i64 = sub_i64?;
    for (fam, m) in candidates {
        let Some(std) = standard_cartan(fam, m) else { continue };
        if cartan_isomorphic(&sub_i64, &std) {
            return Some(format!("{}{}", fam, m));
        }
    }
    None
}

fn cartan_isomorphic(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let n = a.len();
    if b.len() != n {
        return false;
    }
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(a: &[Vec<i64>], b: &[Vec<i64>], perm: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let n = a.len();
        let i = perm.len();
        if i == n {
            return true;
        }
        for p in 0..n {
            if used[p] {
                continue;
            }
            // a[i][j] must equal b[p][perm[j]] for all assigned j
            let ok = (0..i).all(|j| a[i][j] == b[p][perm[j]] && a[j][i] == b[perm[j]][p]);
            if ok {
                perm.push(p);
                used[p] = true;
                if rec(a, b, perm, used) {
                    return true;
                }
                perm.pop();
                used[p] = false;
            }
        }
        false
    }
    rec(a, b, &mut perm, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlin::int;

    fn sl2() -> BasedRootDatum {
        BasedRootDatum {
            rank: 1,
            roots: vec![vec![int(2)], vec![int(-2)]],
            coroots: vec![vec![int(1)], vec![int(-1)]],
            simple: vec![0],
            name: Some("SL2".into()),
        }
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

    fn sl3() -> BasedRootDatum {
        // weight-basis coordinates
        BasedRootDatum::generate(
            2,
            vec![
                (vec![int(2), int(-1)], vec![int(1), int(0)]),
                (vec![int(-1), int(2)], vec![int(0), int(1)]),
            ],
            Some("SL3".into()),
        )
    }

    fn sp4() -> BasedRootDatum {
        BasedRootDatum::generate(
            2,
            vec![
                (vec![int(1), int(-1)], vec![int(1), int(-1)]),
                (vec![int(0), int(2)], vec![int(0), int(1)]),
            ],
            Some("Sp4".into()),
        )
    }

    #[test]
    fn validate_sl2_pgl2() {
        let r = sl2().validate().unwrap();
        assert_eq!(r.components, vec![("A1".to_string(), vec![0])]);
        let r = pgl2().validate().unwrap();
        assert_eq!(r.components, vec![("A1".to_string(), vec![0])]);
    }

    #[test]
    fn pairing_axiom_violation_detected() {
        let bad = BasedRootDatum {
            rank: 1,
            roots: vec![vec![int(1)], vec![int(-1)]],
            coroots: vec![vec![int(1)], vec![int(-1)]],
            simple: vec![0],
            name: None,
        };
        match bad.validate() {
            Err(DatumError::Axiom { axiom, .. }) => assert_eq!(axiom, "pairing axiom"),
            other => panic!("expected pairing axiom error, got {:?}", other),
        }
    }

    #[test]
    fn sl3_structure() {
        let d = sl3();
        assert_eq!(d.roots.len(), 6);
        let r = d.validate().unwrap();
        assert_eq!(r.components[0].0, "A2");
        assert_eq!(r.weyl_order, int(6));
        let w = d.weyl_group_elements(100).unwrap();
        assert_eq!(w.len(), 6);
    }

    #[test]
    fn sp4_structure() {
        let d = sp4();
        assert_eq!(d.roots.len(), 8);
        let r = d.validate().unwrap();
        assert_eq!(r.components[0].0, "C2");
        let w = d.weyl_group_elements(100).unwrap();
        assert_eq!(w.len(), 8);
        // longest word has length = number of positive roots
        let maxlen = w.iter().map(|e| e.word.len()).max().unwrap();
        assert_eq!(maxlen, 4);
    }

    #[test]
    fn dual_involution() {
        for d in [sl2(), pgl2(), sl3(), sp4()] {
            let dd = d.dual().dual();
            assert_eq!(dd.roots, d.roots);
            assert_eq!(dd.coroots, d.coroots);
            assert_eq!(dd.simple, d.simple);
        }
    }

    #[test]
    fn dual_sl2_is_pgl2() {
        let d = sl2().dual();
        assert_eq!(d.roots, pgl2().roots);
        assert_eq!(d.coroots, pgl2().coroots);
    }

    #[test]
    fn dual_sp4_swaps_lengths() {
        let d = sp4();
        let dd = d.dual();
        dd.validate().unwrap();
        // Cartan of the dual is the transpose
        assert_eq!(dd.cartan(), d.cartan().transpose());
    }

    #[test]
    fn reduced_words_are_reduced_and_lex_smallest() {
        let d = sl3();
        let w = d.weyl_group_elements(100).unwrap();
        for e in &w {
            // matrix from word equals stored matrix
            let mut m = IntMat::identity(d.rank);
            for &i in &e.word {
                m = m.mul(&d.simple_reflection(i));
            }
            assert_eq!(m, e.matrix);
            assert_eq!(d.length_of(&e.matrix), e.word.len());
        }
        // the longest element of A2 gets word [0,1,0] not [1,0,1]
        let longest = w.iter().find(|e| e.word.len() == 3).unwrap();
        assert_eq!(longest.word, vec![0, 1, 0]);
    }

    #[test]
    fn standard_levi_sl3() {
        let d = sl3();
        let t = d.standard_levi(&[]).unwrap();
        assert_eq!(t.roots.len(), 0);
        assert_eq!(t.rank, 2);
        let l = d.standard_levi(&[0]).unwrap();
        assert_eq!(l.roots.len(), 2);
        l.validate().unwrap();
    }

    #[test]
    fn standard_levi_sp4_long_root() {
        let d = sp4();
        // position 1 is the long root (0,2)
        let l = d.standard_levi(&[1]).unwrap();
        assert_eq!(l.roots.len(), 2);
        l.validate().unwrap();
        // its coroot (0,1) is the full coweight direction; the root is divisible by 2
        assert_eq!(l.simple_root(0), &vec![int(0), int(2)]);
    }

    #[test]
    fn adjoint_sl2_is_pgl2() {
        let (ad, mor) = sl2().adjoint().unwrap();
        ad.validate().unwrap();
        assert_eq!(ad.roots, pgl2().roots);
        assert_eq!(ad.coroots, pgl2().coroots);
        // index of the root lattice in the character lattice is 2
        assert_eq!(mor.lattice_map.at(0, 0), &int(2));
    }

    #[test]
    fn adjoint_idempotent() {
        for d in [sl2(), pgl2(), sl3(), sp4()] {
            let (ad, _) = d.adjoint().unwrap();
            let (ad2, mor2) = ad.adjoint().unwrap();
            assert_eq!(ad.roots, ad2.roots);
            assert_eq!(ad.coroots, ad2.coroots);
            assert!(mor2.lattice_map.is_identity());
        }
    }

    #[test]
    fn g2_classification() {
        let g2 = BasedRootDatum::generate(
            2,
            vec![
                (vec![int(1), int(0)], vec![int(2), int(-3)]),
                (vec![int(0), int(1)], vec![int(-1), int(2)]),
            ],
            Some("G2".into()),
        );
        assert_eq!(g2.roots.len(), 12);
        let r = g2.validate().unwrap();
        assert_eq!(r.components[0].0, "G2");
        assert_eq!(g2.weyl_group_elements(100).unwrap().len(), 12);
    }

    #[test]
    fn torus_classifies_empty() {
        let t = BasedRootDatum::torus(3, None);
        let r = t.validate().unwrap();
        assert!(r.components.is_empty());
        assert_eq!(r.weyl_order, int(1));
    }
}
