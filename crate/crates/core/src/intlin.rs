//! Exact integer linear algebra: matrices over BigInt, Smith normal form,
//! kernels/cokernels, saturation, and fixed sublattices of finite-order
//! automorphisms. Everything downstream routes its lattice arithmetic here.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = Ratio<BigInt>;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat_of(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

#[derive(Debug, thiserror::Error)]
pub enum LinError {
    #[error("matrix dimension mismatch: {0}")]
    Dim(String),
    #[error("matrix is singular")]
    Singular,
    #[error("automorphism order exceeds bound {0}")]
    OrderBound(usize),
    #[error("no integral solution")]
    NoIntegralSolution,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Int>,
}

impl std::fmt::Debug for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.at(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        IntMat { rows, cols, data: entries.iter().map(|&x| int(x)).collect() }
    }

    pub fn from_cols(cols: Vec<Vec<Int>>) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        assert!(cols.iter().all(|v| v.len() == r), "ragged cols");
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                *m.at_mut(i, j) = x.clone();
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> Vec<Int> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "mul dimension mismatch");
        let mut m = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * other.at(k, j);
                    *m.at_mut(i, j) += t;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        m
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (a, b) in m.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        m
    }

    pub fn neg(&self) -> IntMat {
        let mut m = self.clone();
        for a in m.data.iter_mut() {
            *a = -a.clone();
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == IntMat::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Horizontal stack [self | other].
    pub fn hstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows);
        let mut m = IntMat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(i, j) = self.at(i, j).clone();
            }
            for j in 0..other.cols {
                *m.at_mut(i, self.cols + j) = other.at(i, j).clone();
            }
        }
        m
    }

    /// Vertical stack [self; other].
    pub fn vstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.cols);
        let mut rows: Vec<Vec<Int>> = (0..self.rows).map(|i| self.row(i)).collect();
        rows.extend((0..other.rows).map(|i| other.row(i)));
        IntMat::from_rows(rows)
    }

    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        // Fraction-free Bareiss elimination.
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a: Vec<Vec<Int>> = (0..n).map(|i| self.row(i)).collect();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = &t / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    /// Exact inverse of a unimodular (or at least invertible-over-ZZ) matrix.
    pub fn inverse(&self) -> Result<IntMat, LinError> {
        let aug = rational_solve_matrix(self, &IntMat::identity(self.rows))?;
        let mut m = IntMat::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                let r = &aug[i][j];
                if !r.denom().is_one() {
                    return Err(LinError::NoIntegralSolution);
                }
                *m.at_mut(i, j) = r.numer().clone();
            }
        }
        Ok(m)
    }

    /// Inverse-transpose: the action of a lattice automorphism on the dual lattice.
    pub fn dual_action(&self) -> Result<IntMat, LinError> {
        Ok(self.inverse()?.transpose())
    }

    pub fn pow(&self, e: usize) -> IntMat {
        assert_eq!(self.rows, self.cols);
        let mut acc = IntMat::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative order, or an error past the bound.
    pub fn order(&self, bound: usize) -> Result<usize, LinError> {
        assert_eq!(self.rows, self.cols);
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_identity() {
                return Ok(k);
            }
            acc = acc.mul(self);
        }
        Err(LinError::OrderBound(bound))
    }
}

/// Solve self * X = B over the rationals; errors if the system is inconsistent
/// or underdetermined in a way that blocks a unique solution for some column.
fn rational_solve_matrix(a: &IntMat, b: &IntMat) -> Result<Vec<Vec<Rat>>, LinError> {
    assert_eq!(a.rows, b.rows);
    let n = a.rows;
    let m = a.cols;
    if n != m {
        return Err(LinError::Dim("square matrix required".into()));
    }
    let mut aug: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = a.row(i).iter().map(rat_of).collect();
            row.extend(b.row(i).iter().map(rat_of));
            row
        })
        .collect();
    let total = m + b.cols;
    for col in 0..m {
        let piv = (col..n)
            .find(|&i| !aug[i][col].is_zero())
            .ok_or(LinError::Singular)?;
        aug.swap(col, piv);
        let p = aug[col][col].clone();
        for j in col..total {
            aug[col][j] = &aug[col][j] / &p;
        }
        for i in 0..n {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in col..total {
                    let t = &aug[col][j] * &f;
                    aug[i][j] = &aug[i][j] - &t;
                }
            }
        }
    }
    Ok((0..n)
        .map(|i| (0..b.cols).map(|j| aug[i][m + j].clone()).collect())
        .collect())
}

/// Result of Smith normal form: s = u * m * v with u, v unimodular and s
/// diagonal with a divisibility chain.
#[derive(Clone, Debug)]
pub struct Snf {
    pub s: IntMat,
    pub u: IntMat,
    pub v: IntMat,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.s.rows.min(self.s.cols))
            .map(|i| self.s.at(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMat) -> Snf {
    let rows = m.rows;
    let cols = m.cols;
    let mut s = m.clone();
    let mut u = IntMat::identity(rows);
    let mut v = IntMat::identity(cols);

    let swap_rows = |s: &mut IntMat, u: &mut IntMat, a: usize, b: usize| {
        if a != b {
            for j in 0..s.cols {
                let t = s.at(a, j).clone();
                *s.at_mut(a, j) = s.at(b, j).clone();
                *s.at_mut(b, j) = t;
            }
            for j in 0..u.cols {
                let t = u.at(a, j).clone();
                *u.at_mut(a, j) = u.at(b, j).clone();
                *u.at_mut(b, j) = t;
            }
        }
    };
    let swap_cols = |s: &mut IntMat, v: &mut IntMat, a: usize, b: usize| {
        if a != b {
            for i in 0..s.rows {
                let t = s.at(i, a).clone();
                *s.at_mut(i, a) = s.at(i, b).clone();
                *s.at_mut(i, b) = t;
            }
            for i in 0..v.rows {
                let t = v.at(i, a).clone();
                *v.at_mut(i, a) = v.at(i, b).clone();
                *v.at_mut(i, b) = t;
            }
        }
    };
    // row_op: row a -= q * row b (on s and u)
    let row_op = |s: &mut IntMat, u: &mut IntMat, a: usize, b: usize, q: &Int| {
        for j in 0..s.cols {
            let t = q * s.at(b, j);
            *s.at_mut(a, j) -= t;
        }
        for j in 0..u.cols {
            let t = q * u.at(b, j);
            *u.at_mut(a, j) -= t;
        }
    };
    let col_op = |s: &mut IntMat, v: &mut IntMat, a: usize, b: usize, q: &Int| {
        for i in 0..s.rows {
            let t = q * s.at(i, b);
            *s.at_mut(i, a) -= t;
        }
        for i in 0..v.rows {
            let t = q * v.at(i, b);
            *v.at_mut(i, a) -= t;
        }
    };

    let n = rows.min(cols);
    for t in 0..n {
        // Find a pivot: nonzero entry of minimal absolute value in the trailing block.
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s.at(i, j).is_zero()
                        && best.map_or(true, |(bi, bj)| s.at(i, j).abs() < s.at(bi, bj).abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            swap_rows(&mut s, &mut u, t, pi);
            swap_cols(&mut s, &mut v, t, pj);
            // Clear column t below the pivot and row t right of the pivot.
            let mut dirty = false;
            for i in t + 1..rows {
                if !s.at(i, t).is_zero() {
                    let q = s.at(i, t).div_floor(s.at(t, t));
                    row_op(&mut s, &mut u, i, t, &q);
                    if !s.at(i, t).is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !s.at(t, j).is_zero() {
                    let q = s.at(t, j).div_floor(s.at(t, t));
                    col_op(&mut s, &mut v, j, t, &q);
                    if !s.at(t, j).is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            // Pivot must divide the rest of the block; if not, merge a bad row in.
            let mut bad: Option<usize> = None;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(s.at(i, j) % s.at(t, t)).is_zero() {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let q = -Int::one();
                    row_op(&mut s, &mut u, t, i, &q); // row t += row i
                    continue;
                }
                None => break,
            }
        }
        if s.at(t, t).is_negative() {
            for j in 0..cols {
                let x = -s.at(t, j).clone();
                *s.at_mut(t, j) = x;
            }
            for j in 0..rows {
                let x = -u.at(t, j).clone();
                *u.at_mut(t, j) = x;
            }
        }
    }
    Snf { s, u, v }
}

/// Saturated basis (as columns) of the kernel of m : ZZ^cols -> ZZ^rows.
pub fn kernel_basis(m: &IntMat) -> IntMat {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let cols: Vec<Vec<Int>> = (r..m.cols).map(|j| snf.v.col(j)).collect();
    if cols.is_empty() {
        IntMat::zeros(m.cols, 0)
    } else {
        IntMat::from_cols(cols)
    }
}

/// Basis (as columns) of the saturation of the column span of b in ZZ^rows.
pub fn saturate_span(b: &IntMat) -> IntMat {
    let snf = smith_normal_form(b);
    let r = snf.rank();
    let uinv = snf.u.inverse().expect("U unimodular");
    let cols: Vec<Vec<Int>> = (0..r).map(|j| uinv.col(j)).collect();
    if cols.is_empty() {
        IntMat::zeros(b.rows, 0)
    } else {
        IntMat::from_cols(cols)
    }
}

/// Finitely generated abelian group in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct FinGenAb {
    pub free_rank: usize,
    /// d_1 | d_2 | ... each >= 2
    pub torsion: Vec<Int>,
}

impl FinGenAb {
    pub fn order(&self) -> Option<Int> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.torsion.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{}", d)).collect();
        for _ in 0..self.free_rank {
            parts.push("Z".into());
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" x ")
        }
    }
}

/// Cokernel ZZ^rows / image(m), with a projection onto coordinates:
/// first the torsion coordinates (each mod its invariant), then free ones.
#[derive(Clone, Debug)]
pub struct Cokernel {
    pub group: FinGenAb,
    /// (torsion + free) x rows matrix computing coordinates of a class.
    pub proj: IntMat,
    /// rows x (torsion + free) section: coordinates -> representative.
    pub section: IntMat,
}

impl Cokernel {
    /// Coordinates of the class of v, torsion entries reduced.
    pub fn project(&self, v: &[Int]) -> Vec<Int> {
        let mut c = self.proj.mul_vec(v);
        self.reduce(&mut c);
        c
    }

    pub fn reduce(&self, c: &mut [Int]) {
        for (i, d) in self.group.torsion.iter().enumerate() {
            c[i] = c[i].mod_floor(d);
        }
    }

    pub fn lift(&self, c: &[Int]) -> Vec<Int> {
        self.section.mul_vec(c)
    }

    pub fn coord_len(&self) -> usize {
        self.group.torsion.len() + self.group.free_rank
    }
}

pub fn cokernel(m: &IntMat) -> Cokernel {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    let diag = snf.diagonal();
    let mut tor_idx = Vec::new();
    for (i, d) in diag.iter().enumerate().take(r) {
        if *d >= int(2) {
            tor_idx.push(i);
        }
    }
    let free_idx: Vec<usize> = (r..m.rows).collect();
    let torsion: Vec<Int> = tor_idx.iter().map(|&i| diag[i].clone()).collect();
    let group = FinGenAb { free_rank: free_idx.len(), torsion };
    let uinv = snf.u.inverse().expect("U unimodular");
    let mut proj_rows = Vec::new();
    let mut sec_cols = Vec::new();
    for &i in tor_idx.iter().chain(free_idx.iter()) {
        proj_rows.push(snf.u.row(i));
        sec_cols.push(uinv.col(i));
    }
    let proj = if proj_rows.is_empty() {
        IntMat::zeros(0, m.rows)
    } else {
        IntMat::from_rows(proj_rows)
    };
    let section = if sec_cols.is_empty() {
        IntMat::zeros(m.rows, 0)
    } else {
        IntMat::from_cols(sec_cols)
    };
    Cokernel { group, proj, section }
}

/// Saturated basis of the fixed sublattice ker(a - 1) of a finite-order a.
pub fn fixed_sublattice(a: &IntMat, order_bound: usize) -> Result<IntMat, LinError> {
    a.order(order_bound)?;
    Ok(kernel_basis(&a.sub(&IntMat::identity(a.rows))))
}

/// Solve b * x = w over ZZ (b need not be square); None when no integral solution.
pub fn solve_integer(b: &IntMat, w: &[Int]) -> Option<Vec<Int>> {
    let snf = smith_normal_form(b);
    // b = u^-1 s v^-1, so b x = w  <=>  s (v^-1 x) = u w.
    let uw = snf.u.mul_vec(w);
    let r = snf.rank();
    let diag = snf.diagonal();
    let mut y = vec![Int::zero(); b.cols];
    for i in 0..b.rows {
        if i < r {
            let (q, rem) = uw[i].div_rem(&diag[i]);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else if !uw[i].is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// Membership of w in the column span of b over ZZ.
pub fn in_span(b: &IntMat, w: &[Int]) -> bool {
    solve_integer(b, w).is_some()
}

// ---- rational vectors/matrices (apartment arithmetic) ----

pub fn rvec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_of).collect()
}

pub fn rvec_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn rvec_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn rvec_neg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x.clone()).collect()
}

pub fn rvec_scale(a: &[Rat], c: &Rat) -> Vec<Rat> {
    a.iter().map(|x| x * c).collect()
}

pub fn rvec_is_zero(a: &[Rat]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn rdot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn int_mat_apply_rat(m: &IntMat, v: &[Rat]) -> Vec<Rat> {
    assert_eq!(m.cols, v.len());
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| rat_of(m.at(i, j)) * &v[j]).sum())
        .collect()
}

/// Solve (rational) a x = b for square invertible a.
pub fn rat_solve(a: &Vec<Vec<Rat>>, b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    if n == 0 {
        return Some(vec![]);
    }
    let m = a[0].len();
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prow = 0;
    for col in 0..m {
        let Some(p) = (prow..n).find(|&i| !aug[i][col].is_zero()) else { continue };
        aug.swap(prow, p);
        let pv = aug[prow][col].clone();
        for j in col..=m {
            aug[prow][j] = &aug[prow][j] / &pv;
        }
        for i in 0..n {
            if i != prow && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for j in col..=m {
                    let t = &aug[prow][j] * &f;
                    aug[i][j] = &aug[i][j] - &t;
                }
            }
        }
        pivots.push(col);
        prow += 1;
        if prow == n {
            break;
        }
    }
    // Consistency: zero rows must have zero rhs.
    for i in prow..n {
        if !aug[i][m].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); m];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = aug[i][m].clone();
    }
    Some(x)
}

/// Express w as an integer combination of the columns of b, where entries are rational.
pub fn rat_solve_cols(bcols: &[Vec<Rat>], w: &[Rat]) -> Option<Vec<Rat>> {
    if bcols.is_empty() {
        return if rvec_is_zero(w) { Some(vec![]) } else { None };
    }
    let n = bcols[0].len();
    let a: Vec<Vec<Rat>> = (0..n)
        .map(|i| bcols.iter().map(|c| c[i].clone()).collect())
        .collect();
    rat_solve(&a, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntMat) -> Snf {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.s, "U*M*V != S");
        let du = snf.u.det();
        let dv = snf.v.det();
        assert!(du.abs().is_one() && dv.abs().is_one(), "U or V not unimodular");
        let d = snf.diagonal();
        for i in 1..d.len() {
            if !d[i - 1].is_zero() {
                assert!((&d[i] % &d[i - 1]).is_zero(), "divisibility chain broken");
            } else {
                assert!(d[i].is_zero());
            }
        }
        // off-diagonal must vanish
        for i in 0..snf.s.rows {
            for j in 0..snf.s.cols {
                if i != j {
                    assert!(snf.s.at(i, j).is_zero());
                }
            }
        }
        snf
    }

    #[test]
    fn snf_diag_2_3() {
        let m = IntMat::from_i64(2, 2, &[2, 0, 0, 3]);
        let snf = check_snf(&m);
        assert_eq!(snf.diagonal(), vec![int(1), int(6)]);
    }

    #[test]
    fn snf_2468() {
        let m = IntMat::from_i64(2, 2, &[2, 4, 6, 8]);
        let snf = check_snf(&m);
        assert_eq!(snf.diagonal(), vec![int(2), int(4)]);
    }

    #[test]
    fn snf_identity() {
        let m = IntMat::identity(3);
        let snf = check_snf(&m);
        assert_eq!(snf.diagonal(), vec![int(1), int(1), int(1)]);
    }

    #[test]
    fn snf_rectangular_and_zero() {
        check_snf(&IntMat::from_i64(2, 3, &[1, 2, 3, 4, 5, 6]));
        check_snf(&IntMat::zeros(3, 2));
        check_snf(&IntMat::from_i64(1, 1, &[0]));
    }

    #[test]
    fn cokernel_zero_map() {
        let c = cokernel(&IntMat::from_i64(1, 1, &[0]));
        assert_eq!(c.group, FinGenAb { free_rank: 1, torsion: vec![] });
    }

    #[test]
    fn cokernel_times_two() {
        let c = cokernel(&IntMat::from_i64(1, 1, &[2]));
        assert_eq!(c.group, FinGenAb { free_rank: 0, torsion: vec![int(2)] });
        assert_eq!(c.project(&[int(3)]), vec![int(1)]);
        assert_eq!(c.project(&[int(4)]), vec![int(0)]);
    }

    #[test]
    fn cokernel_projection_section_consistent() {
        let m = IntMat::from_i64(2, 2, &[2, 0, 0, 3]);
        let c = cokernel(&m);
        assert_eq!(c.group.order(), Some(int(6)));
        for v in [[1i64, 0], [0, 1], [5, 7]] {
            let vv = vec![int(v[0]), int(v[1])];
            let coords = c.project(&vv);
            let lifted = c.lift(&coords);
            // lifted - v must lie in the image of m
            let diff: Vec<Int> = lifted.iter().zip(&vv).map(|(a, b)| a - b).collect();
            assert!(in_span(&m, &diff));
        }
    }

    #[test]
    fn fixed_lattice_identity() {
        let b = fixed_sublattice(&IntMat::identity(2), 24).unwrap();
        assert_eq!(b.cols, 2);
        assert!(b.det().abs().is_one());
    }

    #[test]
    fn fixed_lattice_swap() {
        let b = fixed_sublattice(&IntMat::from_i64(2, 2, &[0, 1, 1, 0]), 24).unwrap();
        assert_eq!(b.cols, 1);
        let v = b.col(0);
        assert_eq!(v[0], v[1]);
        assert!(v[0].abs().is_one(), "saturation: generator must be primitive");
    }

    #[test]
    fn fixed_lattice_a2_flip() {
        // alpha1 <-> alpha2 on the A2 root lattice in the basis of simple roots.
        let flip = IntMat::from_i64(2, 2, &[0, 1, 1, 0]);
        let b = fixed_sublattice(&flip, 24).unwrap();
        assert_eq!(b.cols, 1);
    }

    #[test]
    fn fixed_lattice_rejects_infinite_order() {
        let shear = IntMat::from_i64(2, 2, &[1, 1, 0, 1]);
        assert!(fixed_sublattice(&shear, 24).is_err());
    }

    #[test]
    fn solve_integer_works() {
        let b = IntMat::from_i64(2, 2, &[2, 0, 0, 3]);
        assert_eq!(solve_integer(&b, &[int(4), int(9)]), Some(vec![int(2), int(3)]));
        assert_eq!(solve_integer(&b, &[int(1), int(0)]), None);
    }

    #[test]
    fn saturate_span_basic() {
        // span{(2,0),(0,2)} saturates to the full lattice
        let b = IntMat::from_i64(2, 2, &[2, 0, 0, 2]);
        let s = saturate_span(&b);
        assert_eq!(s.cols, 2);
        assert!(s.det().abs().is_one());
    }
}
