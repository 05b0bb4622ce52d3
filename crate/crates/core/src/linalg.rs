//! Exact dense linear algebra over a scalar tower, plus the super vector
//! space layer: graded subspaces and even bilinear forms.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tower};

/// Parity of a homogeneous object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity addition (Z/2).
    pub fn plus(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    /// Koszul sign `(-1)^{|a||b|}` as an integer.
    pub fn koszul(self, other: Parity) -> i32 {
        if self.is_odd() && other.is_odd() {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Super dimension `(dim V_0, dim V_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuperDim {
    pub even: usize,
    pub odd: usize,
}

impl SuperDim {
    pub fn new(even: usize, odd: usize) -> Self {
        SuperDim { even, odd }
    }

    pub fn total(&self) -> usize {
        self.even + self.odd
    }

    pub fn plus(&self, other: &SuperDim) -> SuperDim {
        SuperDim::new(self.even + other.even, self.odd + other.odd)
    }
}

impl fmt::Display for SuperDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}|{})", self.even, self.odd)
    }
}

/// Dense matrix of tower scalars. Rows are the primary axis; subspaces are
/// stored as row spans in reduced echelon form.
#[derive(Debug, Clone)]
pub struct Matrix {
    tower: Tower,
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Matrix {
    pub fn zero(tower: &Tower, rows: usize, cols: usize) -> Self {
        Matrix {
            tower: tower.clone(),
            rows,
            cols,
            data: vec![tower.zero(); rows * cols],
        }
    }

    pub fn identity(tower: &Tower, n: usize) -> Self {
        let mut m = Matrix::zero(tower, n, n);
        for i in 0..n {
            m.set(i, i, tower.one());
        }
        m
    }

    pub fn from_rows(tower: &Tower, rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix {
            tower: tower.clone(),
            rows: r,
            cols: c,
            data,
        }
    }

    /// Like [`Matrix::from_rows`] but keeps the column count when the row
    /// list is empty.
    pub fn from_rows_dim(tower: &Tower, rows: Vec<Vec<Scalar>>, cols: usize) -> Self {
        if rows.is_empty() {
            return Matrix::zero(tower, 0, cols);
        }
        let m = Matrix::from_rows(tower, rows);
        assert_eq!(m.cols, cols, "row length disagrees with the declared width");
        m
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<Scalar> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn rows_vec(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zero(&self.tower, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.at(r, c).clone());
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = self.tower.zero();
                for c in 0..self.cols {
                    acc = acc.add(&self.at(r, c).mul(&v[c]));
                }
                acc
            })
            .collect()
    }

    pub fn mul_mat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut m = Matrix::zero(&self.tower, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = self.tower.zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(r, k).mul(other.at(k, c)));
                }
                m.set(r, c, acc);
            }
        }
        m
    }

    /// Reduced row echelon form; leftmost pivots, first nonzero row wins
    /// ties. Returns the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let mut pivot_row = None;
            for r in row..m.rows {
                if !m.at(r, col).is_zero() {
                    pivot_row = Some(r);
                    break;
                }
            }
            let Some(pr) = pivot_row else { continue };
            if pr != row {
                for c in 0..m.cols {
                    let a = m.at(row, c).clone();
                    let b = m.at(pr, c).clone();
                    m.set(row, c, b);
                    m.set(pr, c, a);
                }
            }
            let inv = m.at(row, col).inv().expect("pivot is nonzero");
            for c in 0..m.cols {
                let v = m.at(row, c).mul(&inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let f = m.at(r, col).clone();
                    for c in 0..m.cols {
                        let v = m.at(r, c).sub(&f.mul(m.at(row, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        m.rows = row;
        m.data.truncate(row * m.cols);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{ x : M x = 0 }`, one row per basis vector.
    pub fn nullspace(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::new();
        for &f in &free {
            let mut v = vec![self.tower.zero(); self.cols];
            v[f] = self.tower.one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = r.at(ri, f).neg();
            }
            rows.push(v);
        }
        Matrix::from_rows_dim(&self.tower, rows, self.cols)
    }

    /// One solution of `M x = b`, if any.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zero(&self.tower, self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![self.tower.zero(); self.cols];
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = r.at(ri, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zero(&self.tower, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, n + r, self.tower.one());
        }
        let (red, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::Singular);
        }
        let mut out = Matrix::zero(&self.tower, n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, red.at(r, n + c).clone());
            }
        }
        Ok(out)
    }

    /// Whether `v` lies in the row span.
    pub fn row_space_contains(&self, v: &[Scalar]) -> bool {
        if self.rows == 0 {
            return v.iter().all(|x| x.is_zero());
        }
        assert_eq!(v.len(), self.cols);
        let (r, pivots) = self.rref();
        let mut w = v.to_vec();
        for (ri, &pc) in pivots.iter().enumerate() {
            if !w[pc].is_zero() {
                let f = w[pc].clone();
                for c in 0..self.cols {
                    w[c] = w[c].sub(&f.mul(r.at(ri, c)));
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    /// Row span of `self` intersected with the row span of `other`.
    pub fn intersect_rows(&self, other: &Matrix) -> Matrix {
        let k = self.rows;
        let l = other.rows;
        if k == 0 || l == 0 {
            return Matrix::zero(&self.tower, 0, self.cols.max(other.cols));
        }
        assert_eq!(self.cols, other.cols);
        // x^T A = y^T B: nullspace over (x, y).
        let mut m = Matrix::zero(&self.tower, self.cols, k + l);
        for c in 0..self.cols {
            for i in 0..k {
                m.set(c, i, self.at(i, c).clone());
            }
            for j in 0..l {
                m.set(c, k + j, other.at(j, c).neg());
            }
        }
        let null = m.nullspace();
        let mut rows = Vec::new();
        for r in 0..null.rows {
            let mut v = vec![self.tower.zero(); self.cols];
            for i in 0..k {
                let xi = null.at(r, i);
                if !xi.is_zero() {
                    for c in 0..self.cols {
                        v[c] = v[c].add(&xi.mul(self.at(i, c)));
                    }
                }
            }
            rows.push(v);
        }
        Matrix::from_rows_dim(&self.tower, rows, self.cols).rref().0
    }

    pub fn stack(&self, other: &Matrix) -> Matrix {
        if self.rows == 0 {
            return other.clone();
        }
        if other.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, other.cols);
        let mut rows = self.rows_vec();
        rows.extend(other.rows_vec());
        Matrix::from_rows(&self.tower, rows)
    }

    /// Equality of row spans.
    pub fn same_row_space(&self, other: &Matrix) -> bool {
        let a = self.rref().0;
        let b = other.rref().0;
        if a.rows == 0 && b.rows == 0 {
            return true;
        }
        a == b
    }
}

/// A graded subspace of a super vector space whose coordinates carry fixed
/// parities. Stored as one echelon basis per parity, in full coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSubspace {
    pub parities: Vec<Parity>,
    pub even: Matrix,
    pub odd: Matrix,
}

impl GradedSubspace {
    pub fn zero(tower: &Tower, parities: &[Parity]) -> Self {
        GradedSubspace {
            parities: parities.to_vec(),
            even: Matrix::zero(tower, 0, parities.len()),
            odd: Matrix::zero(tower, 0, parities.len()),
        }
    }

    pub fn full(tower: &Tower, parities: &[Parity]) -> Self {
        let n = parities.len();
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for i in 0..n {
            let mut v = vec![tower.zero(); n];
            v[i] = tower.one();
            match parities[i] {
                Parity::Even => even.push(v),
                Parity::Odd => odd.push(v),
            }
        }
        GradedSubspace {
            parities: parities.to_vec(),
            even: Matrix::from_rows_dim(tower, even, n),
            odd: Matrix::from_rows_dim(tower, odd, n),
        }
    }

    /// Build from homogeneous spanning vectors; every vector must be
    /// supported on coordinates of a single parity.
    pub fn from_vectors(
        tower: &Tower,
        parities: &[Parity],
        vectors: &[Vec<Scalar>],
    ) -> Result<Self> {
        let n = parities.len();
        let mut even = Vec::new();
        let mut odd = Vec::new();
        for v in vectors {
            if v.len() != n {
                return Err(Error::DimensionMismatch(
                    "spanning vector has wrong length".into(),
                ));
            }
            let mut par: Option<Parity> = None;
            for (i, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    match par {
                        None => par = Some(parities[i]),
                        Some(p) if p == parities[i] => {}
                        _ => {
                            return Err(Error::DimensionMismatch(
                                "spanning vector is not parity homogeneous".into(),
                            ))
                        }
                    }
                }
            }
            match par {
                Some(Parity::Even) => even.push(v.clone()),
                Some(Parity::Odd) => odd.push(v.clone()),
                None => {}
            }
        }
        let n = parities.len();
        Ok(GradedSubspace {
            parities: parities.to_vec(),
            even: Matrix::from_rows_dim(tower, even, n).rref().0,
            odd: Matrix::from_rows_dim(tower, odd, n).rref().0,
        })
    }

    pub fn tower(&self) -> &Tower {
        self.even.tower()
    }

    pub fn ambient_dim(&self) -> usize {
        self.parities.len()
    }

    pub fn sdim(&self) -> SuperDim {
        SuperDim::new(self.even.rows, self.odd.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.even.rows == 0 && self.odd.rows == 0
    }

    pub fn part(&self, p: Parity) -> &Matrix {
        match p {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    /// All basis vectors with their parities, even first.
    pub fn basis(&self) -> Vec<(Vec<Scalar>, Parity)> {
        let mut out = Vec::new();
        for r in 0..self.even.rows {
            out.push((self.even.row(r), Parity::Even));
        }
        for r in 0..self.odd.rows {
            out.push((self.odd.row(r), Parity::Odd));
        }
        out
    }

    pub fn contains_vector(&self, v: &[Scalar], parity: Parity) -> bool {
        self.part(parity).row_space_contains(v)
    }

    /// Containment test for a general vector: split by parity first.
    pub fn contains_general(&self, v: &[Scalar]) -> bool {
        let tower = self.tower().clone();
        let mut ev = vec![tower.zero(); v.len()];
        let mut od = vec![tower.zero(); v.len()];
        for (i, x) in v.iter().enumerate() {
            match self.parities[i] {
                Parity::Even => ev[i] = x.clone(),
                Parity::Odd => od[i] = x.clone(),
            }
        }
        self.even.row_space_contains(&ev) && self.odd.row_space_contains(&od)
    }

    pub fn contains(&self, other: &GradedSubspace) -> bool {
        (0..other.even.rows).all(|r| self.even.row_space_contains(&other.even.row(r)))
            && (0..other.odd.rows).all(|r| self.odd.row_space_contains(&other.odd.row(r)))
    }

    pub fn sum(&self, other: &GradedSubspace) -> GradedSubspace {
        GradedSubspace {
            parities: self.parities.clone(),
            even: self.even.stack(&other.even).rref().0,
            odd: self.odd.stack(&other.odd).rref().0,
        }
    }

    pub fn intersect(&self, other: &GradedSubspace) -> GradedSubspace {
        GradedSubspace {
            parities: self.parities.clone(),
            even: self.even.intersect_rows(&other.even),
            odd: self.odd.intersect_rows(&other.odd),
        }
    }
}

/// Symmetry type of an even bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormSymmetry {
    /// Antisymmetric on the even part, symmetric on the odd part.
    Superantisymmetric,
    /// Symmetric on the even part, antisymmetric on the odd part.
    Supersymmetric,
}

/// An even bilinear form on a super vector space: one block per parity,
/// cross-parity values vanish identically.
#[derive(Debug, Clone)]
pub struct EvenBilinearForm {
    pub parities: Vec<Parity>,
    /// Indices of the even coordinates inside the full coordinate list.
    pub even_index: Vec<usize>,
    pub odd_index: Vec<usize>,
    pub even_block: Matrix,
    pub odd_block: Matrix,
    pub symmetry: FormSymmetry,
}

impl EvenBilinearForm {
    pub fn new(
        tower: &Tower,
        parities: &[Parity],
        even_block: Matrix,
        odd_block: Matrix,
        symmetry: FormSymmetry,
    ) -> Result<Self> {
        let even_index: Vec<usize> = (0..parities.len())
            .filter(|&i| parities[i] == Parity::Even)
            .collect();
        let odd_index: Vec<usize> = (0..parities.len())
            .filter(|&i| parities[i] == Parity::Odd)
            .collect();
        if even_block.rows != even_index.len() || even_block.cols != even_index.len() {
            return Err(Error::DimensionMismatch("even block size".into()));
        }
        if odd_block.rows != odd_index.len() || odd_block.cols != odd_index.len() {
            return Err(Error::DimensionMismatch("odd block size".into()));
        }
        let (want_even_anti, want_odd_anti) = match symmetry {
            FormSymmetry::Superantisymmetric => (true, false),
            FormSymmetry::Supersymmetric => (false, true),
        };
        check_symmetry(&even_block, want_even_anti, "even block")?;
        check_symmetry(&odd_block, want_odd_anti, "odd block")?;
        let _ = tower;
        Ok(EvenBilinearForm {
            parities: parities.to_vec(),
            even_index,
            odd_index,
            even_block,
            odd_block,
            symmetry,
        })
    }

    pub fn tower(&self) -> &Tower {
        self.even_block.tower()
    }

    fn compress(&self, v: &[Scalar], p: Parity) -> Vec<Scalar> {
        let idx = match p {
            Parity::Even => &self.even_index,
            Parity::Odd => &self.odd_index,
        };
        idx.iter().map(|&i| v[i].clone()).collect()
    }

    /// Evaluate on two full-coordinate vectors; vectors of different parity
    /// pair to zero by construction.
    pub fn eval(&self, v: &[Scalar], pv: Parity, w: &[Scalar], pw: Parity) -> Scalar {
        let tower = self.tower().clone();
        if pv != pw {
            return tower.zero();
        }
        let block = match pv {
            Parity::Even => &self.even_block,
            Parity::Odd => &self.odd_block,
        };
        let a = self.compress(v, pv);
        let b = self.compress(w, pw);
        let mut acc = tower.zero();
        for i in 0..a.len() {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..b.len() {
                acc = acc.add(&a[i].mul(block.at(i, j)).mul(&b[j]));
            }
        }
        acc
    }

    /// Perpendicular of `w` inside the full space.
    pub fn perp(&self, w: &GradedSubspace) -> Result<GradedSubspace> {
        if w.ambient_dim() != self.parities.len() {
            return Err(Error::DimensionMismatch(
                "subspace does not live in the form's space".into(),
            ));
        }
        let tower = self.tower().clone();
        let even = self.perp_block(&w.even, Parity::Even, &tower);
        let odd = self.perp_block(&w.odd, Parity::Odd, &tower);
        Ok(GradedSubspace {
            parities: self.parities.clone(),
            even,
            odd,
        })
    }

    fn perp_block(&self, wpart: &Matrix, p: Parity, tower: &Tower) -> Matrix {
        let (block, idx) = match p {
            Parity::Even => (&self.even_block, &self.even_index),
            Parity::Odd => (&self.odd_block, &self.odd_index),
        };
        let k = idx.len();
        // conditions on the compressed coordinates: B(v, w_i) = 0
        let mut cond = Matrix::zero(tower, wpart.rows, k);
        for r in 0..wpart.rows {
            let wc = self.compress(&wpart.row(r), p);
            for c in 0..k {
                let mut acc = tower.zero();
                for j in 0..k {
                    acc = acc.add(&block.at(c, j).mul(&wc[j]));
                }
                cond.set(r, c, acc);
            }
        }
        let null = cond.nullspace();
        let mut rows = Vec::new();
        for r in 0..null.rows {
            let mut v = vec![tower.zero(); self.parities.len()];
            for (ci, &full) in idx.iter().enumerate() {
                v[full] = null.at(r, ci).clone();
            }
            rows.push(v);
        }
        Matrix::from_rows(tower, rows).rref().0
    }

    /// The kernel of the form.
    pub fn kernel(&self) -> GradedSubspace {
        let tower = self.tower().clone();
        let full = GradedSubspace::full(&tower, &self.parities);
        self.perp(&full).expect("full space fits")
    }

    pub fn is_totally_isotropic(&self, w: &GradedSubspace) -> Result<bool> {
        if w.ambient_dim() != self.parities.len() {
            return Err(Error::DimensionMismatch(
                "subspace does not live in the form's space".into(),
            ));
        }
        for (v, pv) in w.basis() {
            for (u, pu) in w.basis() {
                if !self.eval(&v, pv, &u, pu).is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Gram matrix of the induced form on `w_perp / w` for the given parity,
    /// together with representative vectors of the quotient basis.
    pub fn induced_on_perp_quotient(
        &self,
        w: &GradedSubspace,
        p: Parity,
    ) -> Result<(Matrix, Vec<Vec<Scalar>>)> {
        let tower = self.tower().clone();
        let perp = self.perp(w)?;
        let wp = w.part(p);
        let pp = perp.part(p);
        // choose representatives: rows of perp not in w
        let mut reps: Vec<Vec<Scalar>> = Vec::new();
        let mut span = wp.clone();
        for r in 0..pp.rows {
            let cand = pp.row(r);
            if !span.row_space_contains(&cand) {
                reps.push(cand.clone());
                span = span.stack(&Matrix::from_rows(&tower, vec![cand])).rref().0;
            }
        }
        let k = reps.len();
        let mut gram = Matrix::zero(&tower, k, k);
        for i in 0..k {
            for j in 0..k {
                gram.set(i, j, self.eval(&reps[i], p, &reps[j], p));
            }
        }
        Ok((gram, reps))
    }

    /// Maximality test per parity: antisymmetric part by the dimension
    /// formula, symmetric part by absence of isotropic vectors in
    /// `W^perp/W` even after adjoining one square root.
    pub fn is_maximal_isotropic(&self, w: &GradedSubspace) -> Result<bool> {
        if !self.is_totally_isotropic(w)? {
            return Ok(false);
        }
        let kernel = self.kernel();
        for p in [Parity::Even, Parity::Odd] {
            let anti = match (self.symmetry, p) {
                (FormSymmetry::Superantisymmetric, Parity::Even) => true,
                (FormSymmetry::Superantisymmetric, Parity::Odd) => false,
                (FormSymmetry::Supersymmetric, Parity::Even) => false,
                (FormSymmetry::Supersymmetric, Parity::Odd) => true,
            };
            let dim_v = match p {
                Parity::Even => self.even_index.len(),
                Parity::Odd => self.odd_index.len(),
            };
            let dim_w = w.part(p).rows;
            let dim_ker = kernel.part(p).rows;
            if anti {
                if 2 * dim_w != dim_v + dim_ker {
                    return Ok(false);
                }
            } else {
                let (gram, _) = self.induced_on_perp_quotient(w, p)?;
                if isotropic_vector(&gram, self.tower(), true)?.is_some() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn check_symmetry(block: &Matrix, antisymmetric: bool, what: &str) -> Result<()> {
    for i in 0..block.rows {
        for j in 0..block.cols {
            let a = block.at(i, j);
            let b = block.at(j, i);
            let ok = if antisymmetric {
                a.add(b).is_zero()
            } else {
                a == b
            };
            if !ok {
                return Err(Error::DimensionMismatch(format!(
                    "{what} has the wrong symmetry at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

/// Search for a nonzero isotropic vector of a symmetric Gram matrix.
///
/// Search order keeps the tower small: kernel vectors and zero diagonal
/// entries first, then pairs whose discriminant is already a square in the
/// tower, and only then a diagonalization step that adjoins one root.
/// Returns the (possibly extended) tower with the vector in the original
/// coordinates, or `None` when the form is anisotropic even with one
/// adjunction (which over this tower family means `dim <= 1`).
pub fn isotropic_vector(
    gram: &Matrix,
    tower: &Tower,
    allow_adjoin: bool,
) -> Result<Option<(Tower, Vec<Scalar>)>> {
    let n = gram.rows;
    if n == 0 {
        return Ok(None);
    }
    let unit = |i: usize| {
        let mut v = vec![tower.zero(); n];
        v[i] = tower.one();
        v
    };
    // kernel vector
    let null = gram.nullspace();
    if null.rows > 0 {
        return Ok(Some((tower.clone(), null.row(0))));
    }
    // zero diagonal
    for i in 0..n {
        if gram.at(i, i).is_zero() {
            return Ok(Some((tower.clone(), unit(i))));
        }
    }
    // pairs with square discriminant: Q(e_i + t e_j) = 0
    for i in 0..n {
        for j in (i + 1)..n {
            let gii = gram.at(i, i);
            let gij = gram.at(i, j);
            let gjj = gram.at(j, j);
            let disc = gij.mul(gij).sub(&gii.mul(gjj));
            if let Some(d) = tower.sqrt_in_tower(&disc) {
                let t = gij.neg().add(&d).div(gjj)?;
                let mut v = unit(i);
                v[j] = t;
                return Ok(Some((tower.clone(), v)));
            }
        }
    }
    if !allow_adjoin || n < 2 {
        return Ok(None);
    }
    // diagonalize congruently and adjoin sqrt(-d1/d2)
    let (diag, basis) = diagonalize_symmetric(gram, tower);
    let mut nz: Vec<usize> = (0..n).filter(|&i| !diag[i].is_zero()).collect();
    if nz.len() < 2 {
        // nonzero kernel was already handled; defensive
        return Ok(None);
    }
    nz.truncate(2);
    let (i, j) = (nz[0], nz[1]);
    let radicand = diag[i].neg().div(&diag[j])?;
    let (ext, root) = tower.adjoin_sqrt(&radicand)?;
    let mut v = vec![ext.zero(); n];
    for c in 0..n {
        v[c] = basis.at(i, c).add(&root.mul(basis.at(j, c)));
    }
    Ok(Some((ext, v)))
}

/// Congruent diagonalization of a symmetric matrix: returns the diagonal
/// values and the basis matrix (rows are the new basis in old coordinates).
pub fn diagonalize_symmetric(gram: &Matrix, tower: &Tower) -> (Vec<Scalar>, Matrix) {
    let n = gram.rows;
    let mut g = gram.clone();
    let mut basis = Matrix::identity(tower, n);
    let mut done = 0usize;
    while done < n {
        // find a pivot with nonzero diagonal, fixing one by a char-0 trick
        let mut pivot = None;
        for i in done..n {
            if !g.at(i, i).is_zero() {
                pivot = Some(i);
                break;
            }
        }
        if pivot.is_none() {
            'outer: for i in done..n {
                for j in (i + 1)..n {
                    if !g.at(i, j).is_zero() {
                        // e_i += e_j makes the diagonal nonzero
                        for c in 0..n {
                            let v = basis.at(i, c).add(basis.at(j, c));
                            basis.set(i, c, v);
                        }
                        for c in 0..n {
                            let v = g.at(i, c).add(g.at(j, c));
                            g.set(i, c, v);
                        }
                        for r in 0..n {
                            let v = g.at(r, i).add(g.at(r, j));
                            g.set(r, i, v);
                        }
                        pivot = Some(i);
                        break 'outer;
                    }
                }
            }
        }
        let Some(p) = pivot else { break };
        if p != done {
            for c in 0..n {
                let a = basis.at(done, c).clone();
                let b = basis.at(p, c).clone();
                basis.set(done, c, b);
                basis.set(p, c, a);
            }
            for c in 0..n {
                let a = g.at(done, c).clone();
                let b = g.at(p, c).clone();
                g.set(done, c, b);
                g.set(p, c, a);
            }
            for r in 0..n {
                let a = g.at(r, done).clone();
                let b = g.at(r, p).clone();
                g.set(r, done, b);
                g.set(r, p, a);
            }
        }
        let d = g.at(done, done).clone();
        for j in (done + 1)..n {
            if !g.at(done, j).is_zero() {
                let f = g.at(done, j).div(&d).expect("nonzero pivot");
                for c in 0..n {
                    let v = basis.at(j, c).sub(&f.mul(basis.at(done, c)));
                    basis.set(j, c, v);
                }
                for c in 0..n {
                    let v = g.at(j, c).sub(&f.mul(g.at(done, c)));
                    g.set(j, c, v);
                }
                for r in 0..n {
                    let v = g.at(r, j).sub(&f.mul(g.at(r, done)));
                    g.set(r, j, v);
                }
            }
        }
        done += 1;
    }
    let diag = (0..n).map(|i| g.at(i, i).clone()).collect();
    (diag, basis)
}
