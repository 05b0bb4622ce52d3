//! Lie superalgebras presented by structure constants over a scalar tower:
//! validation of the axioms, centers and centralizers, derived and lower
//! central series, nilpotency and solvability tests, quotients, basis
//! changes, and the reduction triple `(z, y, x)` that drives the
//! Clifford--Weyl factorization.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{GradedSubspace, Matrix, Parity, SuperDim};
use crate::scalar::{Scalar, Tower};

/// Monomial exponent vector used by the PBW layer; kept here so the
/// per-algebra straightening memo can live next to the table.
pub type Exponents = Vec<u32>;
/// Sparse coefficient map of a PBW element.
pub type TermMap = BTreeMap<Exponents, Scalar>;

/// A finite-dimensional Lie superalgebra given by an ordered homogeneous
/// basis and its structure-constant table.
#[derive(Debug)]
pub struct SuperLieAlgebra {
    tower: Tower,
    labels: Vec<String>,
    parities: Vec<Parity>,
    /// `table[i][j]` is the coordinate vector of `[b_i, b_j]`.
    table: Vec<Vec<Vec<Scalar>>>,
    center_cache: OnceLock<GradedSubspace>,
    lcs_cache: OnceLock<Vec<GradedSubspace>>,
    nilpotent_cache: OnceLock<bool>,
    validation_cache: OnceLock<ValidationReport>,
    pub(crate) straighten_memo: Mutex<HashMap<(Exponents, usize), TermMap>>,
}

/// Outcome of checking the three defining axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Incremental construction of an algebra; absent skew partners are filled
/// in automatically on build.
pub struct AlgebraBuilder {
    tower: Tower,
    gens: Vec<(String, Parity)>,
    brackets: BTreeMap<(usize, usize), Vec<(usize, Scalar)>>,
}

impl AlgebraBuilder {
    pub fn new(tower: &Tower) -> Self {
        AlgebraBuilder {
            tower: tower.clone(),
            gens: Vec::new(),
            brackets: BTreeMap::new(),
        }
    }

    pub fn gen(mut self, label: &str, parity: Parity) -> Self {
        self.gens.push((label.to_string(), parity));
        self
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.gens.iter().position(|(l, _)| l == label)
    }

    /// Set `[left, right] = sum of value` by label; panics on unknown labels.
    pub fn bracket(mut self, left: &str, right: &str, value: &[(&str, Scalar)]) -> Self {
        let i = self.index_of(left).expect("unknown left generator");
        let j = self.index_of(right).expect("unknown right generator");
        let v = value
            .iter()
            .map(|(l, s)| (self.index_of(l).expect("unknown target"), s.clone()))
            .collect();
        self.brackets.insert((i, j), v);
        self
    }

    pub fn bracket_by_index(
        mut self,
        left: usize,
        right: usize,
        value: Vec<(usize, Scalar)>,
    ) -> Self {
        self.brackets.insert((left, right), value);
        self
    }

    /// Assemble the table, completing missing skew partners. The result is
    /// not validated; call [`SuperLieAlgebra::validate`] for the report.
    pub fn build(self) -> Arc<SuperLieAlgebra> {
        let n = self.gens.len();
        let zero_row = vec![self.tower.zero(); n];
        let mut table = vec![vec![zero_row.clone(); n]; n];
        let mut given = vec![vec![false; n]; n];
        for ((i, j), terms) in &self.brackets {
            let mut v = zero_row.clone();
            for (k, c) in terms {
                v[*k] = v[*k].add(c);
            }
            table[*i][*j] = v;
            given[*i][*j] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if given[i][j] && !given[j][i] && i != j {
                    let sign = self.gens[i].1.koszul(self.gens[j].1);
                    table[j][i] = table[i][j]
                        .iter()
                        .map(|c| if sign < 0 { c.clone() } else { c.neg() })
                        .collect();
                    given[j][i] = true;
                }
            }
        }
        let (labels, parities): (Vec<_>, Vec<_>) = self.gens.into_iter().unzip();
        Arc::new(SuperLieAlgebra {
            tower: self.tower,
            labels,
            parities,
            table,
            center_cache: OnceLock::new(),
            lcs_cache: OnceLock::new(),
            nilpotent_cache: OnceLock::new(),
            validation_cache: OnceLock::new(),
            straighten_memo: Mutex::new(HashMap::new()),
        })
    }
}

impl SuperLieAlgebra {
    pub fn from_parts(
        tower: Tower,
        labels: Vec<String>,
        parities: Vec<Parity>,
        table: Vec<Vec<Vec<Scalar>>>,
    ) -> Arc<Self> {
        Arc::new(SuperLieAlgebra {
            tower,
            labels,
            parities,
            table,
            center_cache: OnceLock::new(),
            lcs_cache: OnceLock::new(),
            nilpotent_cache: OnceLock::new(),
            validation_cache: OnceLock::new(),
            straighten_memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    pub fn sdim(&self) -> SuperDim {
        let even = self.parities.iter().filter(|p| **p == Parity::Even).count();
        SuperDim::new(even, self.dim() - even)
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    pub fn parity_of(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.tower.zero(); self.dim()];
        v[i] = self.tower.one();
        v
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &[Scalar] {
        &self.table[i][j]
    }

    /// `[u, v]` for arbitrary coordinate vectors.
    pub fn bracket(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![self.tower.zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let f = u[i].mul(&v[j]);
                for k in 0..n {
                    let c = &self.table[i][j][k];
                    if !c.is_zero() {
                        out[k] = out[k].add(&f.mul(c));
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad(x)` acting on coordinate columns.
    pub fn ad_matrix(&self, x: &[Scalar]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zero(&self.tower, n, n);
        for j in 0..n {
            let img = self.bracket(x, &self.basis_vector(j));
            for i in 0..n {
                m.set(i, j, img[i].clone());
            }
        }
        m
    }

    /// Parity of a coordinate vector when it is homogeneous.
    pub fn parity_of_vector(&self, v: &[Scalar]) -> Option<Parity> {
        let mut par = None;
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                match par {
                    None => par = Some(self.parities[i]),
                    Some(p) if p == self.parities[i] => {}
                    _ => return None,
                }
            }
        }
        par
    }

    /// Check parity homogeneity, superskewsymmetry and the super Jacobi
    /// identity; the report names the first offending tuple of each kind.
    pub fn validate(&self) -> &ValidationReport {
        self.validation_cache.get_or_init(|| {
            let n = self.dim();
            let mut violations = Vec::new();
            'parity: for i in 0..n {
                for j in 0..n {
                    let want = self.parities[i].plus(self.parities[j]);
                    for k in 0..n {
                        if !self.table[i][j][k].is_zero() && self.parities[k] != want {
                            violations.push(format!(
                                "parity homogeneity fails on [{}, {}]: component {} has parity {}",
                                self.labels[i], self.labels[j], self.labels[k], self.parities[k]
                            ));
                            break 'parity;
                        }
                    }
                }
            }
            'skew: for i in 0..n {
                for j in i..n {
                    let sign = self.parities[i].koszul(self.parities[j]);
                    for k in 0..n {
                        let lhs = &self.table[j][i][k];
                        let rhs = if sign < 0 {
                            self.table[i][j][k].clone()
                        } else {
                            self.table[i][j][k].neg()
                        };
                        if *lhs != rhs {
                            violations.push(format!(
                                "superskewsymmetry fails on the pair ({}, {})",
                                self.labels[i], self.labels[j]
                            ));
                            break 'skew;
                        }
                    }
                }
            }
            'jacobi: for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let lhs = self.bracket(&self.basis_vector(i), &self.table[j][k]);
                        let t1 = self.bracket(&self.table[i][j], &self.basis_vector(k));
                        let t2 = self.bracket(&self.basis_vector(j), &self.table[i][k]);
                        let sign = self.parities[i].koszul(self.parities[j]);
                        for c in 0..n {
                            let rhs = if sign < 0 {
                                t1[c].sub(&t2[c])
                            } else {
                                t1[c].add(&t2[c])
                            };
                            if lhs[c] != rhs {
                                violations.push(format!(
                                    "super Jacobi identity fails on ({}, {}, {})",
                                    self.labels[i], self.labels[j], self.labels[k]
                                ));
                                break 'jacobi;
                            }
                        }
                    }
                }
            }
            ValidationReport { violations }
        })
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidAlgebra(report.violations.join("; ")))
        }
    }

    /// Span of `[A, B]` for two graded subspaces.
    pub fn bracket_span(&self, a: &GradedSubspace, b: &GradedSubspace) -> GradedSubspace {
        let mut vectors = Vec::new();
        for (va, _) in a.basis() {
            for (vb, _) in b.basis() {
                vectors.push(self.bracket(&va, &vb));
            }
        }
        GradedSubspace::from_vectors(&self.tower, &self.parities, &vectors)
            .expect("brackets of homogeneous vectors are homogeneous")
    }

    pub fn full_space(&self) -> GradedSubspace {
        GradedSubspace::full(&self.tower, &self.parities)
    }

    /// Super center as a graded subspace.
    pub fn center(&self) -> &GradedSubspace {
        self.center_cache
            .get_or_init(|| self.centralizer(&(0..self.dim()).map(|i| self.basis_vector(i)).collect::<Vec<_>>()))
    }

    /// Super centralizer of a set of elements.
    pub fn centralizer(&self, gens: &[Vec<Scalar>]) -> GradedSubspace {
        let n = self.dim();
        let mut even_rows = Vec::new();
        let mut odd_rows = Vec::new();
        for p in [Parity::Even, Parity::Odd] {
            let idx: Vec<usize> = (0..n).filter(|&i| self.parities[i] == p).collect();
            if idx.is_empty() {
                continue;
            }
            // conditions: [v, s] = 0 for each generator s, v supported on idx
            let mut cond_rows = Vec::new();
            for s in gens {
                for k in 0..n {
                    let mut row = Vec::with_capacity(idx.len());
                    for &i in &idx {
                        let mut acc = self.tower.zero();
                        for (j, sj) in s.iter().enumerate() {
                            if !sj.is_zero() {
                                acc = acc.add(&self.table[i][j][k].mul(sj));
                            }
                        }
                        row.push(acc);
                    }
                    cond_rows.push(row);
                }
            }
            let cond = Matrix::from_rows_dim(&self.tower, cond_rows, idx.len());
            let null = cond.nullspace();
            for r in 0..null.rows {
                let mut v = vec![self.tower.zero(); n];
                for (ci, &i) in idx.iter().enumerate() {
                    v[i] = null.at(r, ci).clone();
                }
                match p {
                    Parity::Even => even_rows.push(v),
                    Parity::Odd => odd_rows.push(v),
                }
            }
        }
        let n = self.dim();
        GradedSubspace {
            parities: self.parities.clone(),
            even: Matrix::from_rows_dim(&self.tower, even_rows, n).rref().0,
            odd: Matrix::from_rows_dim(&self.tower, odd_rows, n).rref().0,
        }
    }

    /// Lower central series `g = C^1 ⊇ C^2 ⊇ ...` down to its stable tail.
    pub fn lower_central_series(&self) -> &Vec<GradedSubspace> {
        self.lcs_cache.get_or_init(|| {
            let mut series = vec![self.full_space()];
            loop {
                let prev = series.last().unwrap();
                let next = self.bracket_span(&self.full_space(), prev);
                if next.sdim() == prev.sdim() {
                    break;
                }
                let stop = next.is_zero();
                series.push(next);
                if stop {
                    break;
                }
            }
            series
        })
    }

    /// Derived series `g = D^0 ⊇ D^1 ⊇ ...` down to its stable tail.
    pub fn derived_series(&self) -> Vec<GradedSubspace> {
        let mut series = vec![self.full_space()];
        loop {
            let prev = series.last().unwrap();
            let next = self.bracket_span(prev, prev);
            if next.sdim() == prev.sdim() {
                break;
            }
            let stop = next.is_zero();
            series.push(next);
            if stop {
                break;
            }
        }
        series
    }

    pub fn is_nilpotent(&self) -> bool {
        *self
            .nilpotent_cache
            .get_or_init(|| self.lower_central_series().last().unwrap().is_zero())
    }

    /// Solvability is governed by the even part.
    pub fn is_solvable(&self) -> bool {
        let even = self.even_subalgebra();
        even.0.derived_series().last().unwrap().is_zero()
    }

    /// The even part as an algebra of its own, with the index map back
    /// into the full basis.
    pub fn even_subalgebra(&self) -> (Arc<SuperLieAlgebra>, Vec<usize>) {
        let idx: Vec<usize> = (0..self.dim())
            .filter(|&i| self.parities[i] == Parity::Even)
            .collect();
        let sub = self.subalgebra_on_indices(&idx);
        (sub, idx)
    }

    /// Presentation on a subset of basis indices; the subset must be closed
    /// under the bracket (callers pick centralizers, ideals, even parts).
    pub fn subalgebra_on_indices(&self, idx: &[usize]) -> Arc<SuperLieAlgebra> {
        let m = idx.len();
        let pos: BTreeMap<usize, usize> = idx.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let mut table = vec![vec![vec![self.tower.zero(); m]; m]; m];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                for (k, c) in self.table[i][j].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let Some(&kk) = pos.get(&k) else {
                        panic!("index set is not bracket-closed");
                    };
                    table[a][b][kk] = c.clone();
                }
            }
        }
        SuperLieAlgebra::from_parts(
            self.tower.clone(),
            idx.iter().map(|&i| self.labels[i].clone()).collect(),
            idx.iter().map(|&i| self.parities[i]).collect(),
            table,
        )
    }

    /// Whether a graded subspace is a super Lie ideal.
    pub fn is_ideal(&self, sub: &GradedSubspace) -> bool {
        for i in 0..self.dim() {
            for (v, _) in sub.basis() {
                let w = self.bracket(&self.basis_vector(i), &v);
                if !sub.contains_general(&w) {
                    return false;
                }
            }
        }
        true
    }

    /// Quotient by a graded ideal; returns the quotient algebra and the
    /// projection data. The surviving generators keep their labels.
    pub fn quotient(self: &Arc<Self>, ideal: &GradedSubspace) -> Result<QuotientData> {
        if ideal.ambient_dim() != self.dim() {
            return Err(Error::DimensionMismatch("ideal lives elsewhere".into()));
        }
        if !self.is_ideal(ideal) {
            return Err(Error::NotAnIdeal(
                "subspace is not stable under the bracket".into(),
            ));
        }
        let stacked = ideal.even.stack(&ideal.odd);
        let (red, pivots) = stacked.rref();
        let n = self.dim();
        let complement: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let m = complement.len();
        // projection: reduce modulo the ideal rows, then read complement coords
        let project = |v: &[Scalar]| -> Vec<Scalar> {
            let mut w = v.to_vec();
            for (ri, &pc) in pivots.iter().enumerate() {
                if !w[pc].is_zero() {
                    let f = w[pc].clone();
                    for c in 0..n {
                        w[c] = w[c].sub(&f.mul(red.at(ri, c)));
                    }
                }
            }
            complement.iter().map(|&c| w[c].clone()).collect()
        };
        let mut table = vec![vec![vec![self.tower.zero(); m]; m]; m];
        for (a, &i) in complement.iter().enumerate() {
            for (b, &j) in complement.iter().enumerate() {
                table[a][b] = project(&self.table[i][j]);
            }
        }
        let quotient = SuperLieAlgebra::from_parts(
            self.tower.clone(),
            complement.iter().map(|&i| self.labels[i].clone()).collect(),
            complement.iter().map(|&i| self.parities[i]).collect(),
            table,
        );
        quotient.ensure_valid()?;
        let mut projection = Matrix::zero(&self.tower, m, n);
        for j in 0..n {
            let col = project(&self.basis_vector(j));
            for r in 0..m {
                projection.set(r, j, col[r].clone());
            }
        }
        Ok(QuotientData {
            algebra: quotient,
            projection,
            complement_cols: complement,
        })
    }

    /// Re-present the algebra on a new ordered homogeneous basis. Returns
    /// the new algebra and the coordinate change (new coords = fwd * old).
    pub fn rebase(self: &Arc<Self>, new_basis: &[(Vec<Scalar>, Parity)]) -> Result<RebasedData> {
        let n = self.dim();
        if new_basis.len() != n {
            return Err(Error::DimensionMismatch("basis has wrong size".into()));
        }
        let tower = join_towers(self.tower(), new_basis.iter().map(|(v, _)| v));
        // rows of `change` are the new basis vectors in old coordinates
        let change = Matrix::from_rows(
            &tower,
            new_basis.iter().map(|(v, _)| v.clone()).collect(),
        );
        let inv = change
            .inverse()
            .map_err(|_| Error::DimensionMismatch("new basis is not a basis".into()))?;
        // old -> new coordinate map: v_new = (change^T)^{-1} v_old = inv^T v_old
        let fwd = inv.transpose();
        let mut table = vec![vec![vec![tower.zero(); n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let br = self.bracket(&new_basis[i].0, &new_basis[j].0);
                let coords = fwd.mul_vec(&br);
                table[i][j] = coords;
            }
        }
        let labels: Vec<String> = new_basis
            .iter()
            .enumerate()
            .map(|(i, (v, _))| {
                // keep a human label when the vector is an original basis vector
                let mut found = None;
                for (c, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        if found.is_some() || !x.is_one() {
                            found = None;
                            break;
                        }
                        found = Some(c);
                    }
                }
                match found {
                    Some(c) => self.labels[c].clone(),
                    None => format!("v{}", i),
                }
            })
            .collect();
        let algebra = SuperLieAlgebra::from_parts(
            tower,
            labels,
            new_basis.iter().map(|(_, p)| *p).collect(),
            table,
        );
        algebra.ensure_valid()?;
        Ok(RebasedData { algebra, fwd })
    }
}

fn join_towers<'a>(base: &Tower, vecs: impl Iterator<Item = &'a Vec<Scalar>>) -> Tower {
    let mut best = base.clone();
    for v in vecs {
        for s in v {
            if best.is_prefix_of(s.tower()) {
                best = s.tower().clone();
            }
        }
    }
    best
}

/// Result of a quotient construction.
#[derive(Debug)]
pub struct QuotientData {
    pub algebra: Arc<SuperLieAlgebra>,
    /// quotient coords = projection * old coords
    pub projection: Matrix,
    /// original columns providing the complement section
    pub complement_cols: Vec<usize>,
}

impl QuotientData {
    /// Lift a quotient coordinate vector back along the complement section.
    pub fn section(&self, v: &[Scalar], old_dim: usize) -> Vec<Scalar> {
        let tower = self.algebra.tower().clone();
        let mut out = vec![tower.zero(); old_dim];
        for (r, &c) in self.complement_cols.iter().enumerate() {
            out[c] = v[r].clone();
        }
        out
    }
}

/// Result of a change of basis.
#[derive(Debug)]
pub struct RebasedData {
    pub algebra: Arc<SuperLieAlgebra>,
    /// new coords = fwd * old coords
    pub fwd: Matrix,
}

/// The reduction triple of a nilpotent algebra with one-dimensional even
/// center: `[y, x] = z`, `k` the super centralizer of `y`, `g = k ⊕ kx`.
#[derive(Debug, Clone)]
pub struct BmTriple {
    pub z: Vec<Scalar>,
    pub y: Vec<Scalar>,
    pub x: Vec<Scalar>,
    pub parity: Parity,
    pub k: GradedSubspace,
    pub y_square_zero: bool,
    /// Tower after any root adjunction performed by the search.
    pub tower: Tower,
}

/// Evaluate a functional coordinate vector on an element.
pub fn lambda_eval(lambda: &[Scalar], v: &[Scalar]) -> Scalar {
    let mut acc = lambda
        .first()
        .map(|s| s.tower().zero())
        .or_else(|| v.first().map(|s| s.tower().zero()))
        .expect("nonempty vectors");
    for (a, b) in lambda.iter().zip(v.iter()) {
        acc = acc.add(&a.mul(b));
    }
    acc
}

/// Find a reduction triple for `(g, λ)`.
///
/// Preference order is deterministic: even lifts of the center of `g/kz`
/// first (normalized so `λ(y) = 0`), then the isotropic-vector search on
/// the odd lift space, adjoining at most one square root; `x` is the first
/// basis solution of `[y, x] = z`.
pub fn find_bm_triple(alg: &Arc<SuperLieAlgebra>, lambda: &[Scalar]) -> Result<BmTriple> {
    let tower = alg.tower().clone();
    find_bm_triple_from(alg, lambda, &tower)
}

/// Same as [`find_bm_triple`], but adjunctions extend the given tower so
/// that several searches can share one linear chain of extensions.
pub fn find_bm_triple_from(
    alg: &Arc<SuperLieAlgebra>,
    lambda: &[Scalar],
    base: &Tower,
) -> Result<BmTriple> {
    alg.ensure_valid()?;
    if !alg.is_nilpotent() {
        return Err(Error::NotNilpotent("reduction triple needs nilpotency".into()));
    }
    let tower = base.clone();
    let center = alg.center();
    if center.sdim() != SuperDim::new(1, 0) {
        return Err(Error::Hypothesis(format!(
            "super center must be one-dimensional and even, found sdim {}",
            center.sdim()
        )));
    }
    let z_raw = center.even.row(0);
    let lz = lambda_eval(lambda, &z_raw);
    if lz.is_zero() {
        return Err(Error::Hypothesis(
            "the functional vanishes on the super center".into(),
        ));
    }
    let z: Vec<Scalar> = z_raw.iter().map(|c| c.div(&lz).unwrap()).collect();
    if alg.dim() <= 2 {
        return Err(Error::Hypothesis(
            "dimension two is the terminal Clifford case".into(),
        ));
    }
    let quot = alg.quotient(center)?;
    let qcenter = quot.algebra.center().clone();
    // even lift first
    if qcenter.even.rows > 0 {
        let lift = quot.section(&qcenter.even.row(0), alg.dim());
        let ly = lambda_eval(lambda, &lift);
        let y: Vec<Scalar> = lift
            .iter()
            .zip(z.iter())
            .map(|(a, b)| a.sub(&ly.mul(b)))
            .collect();
        return finish_triple(alg, lambda, tower, z, y, Parity::Even);
    }
    // odd lifts: quadratic form Q(v) = z-coefficient of [v, v]
    let m = qcenter.odd.rows;
    if m == 0 {
        return Err(Error::Hypothesis(
            "center of the quotient is trivial; no reduction direction".into(),
        ));
    }
    let lifts: Vec<Vec<Scalar>> = (0..m)
        .map(|r| quot.section(&qcenter.odd.row(r), alg.dim()))
        .collect();
    let mut gram = Matrix::zero(&tower, m, m);
    for i in 0..m {
        for j in 0..m {
            let br = alg.bracket(&lifts[i], &lifts[j]);
            gram.set(i, j, lambda_eval(lambda, &br));
        }
    }
    let found = crate::linalg::isotropic_vector(&gram, &tower, true)?;
    let Some((ext, coeffs)) = found else {
        return Err(Error::Hypothesis(
            "no isotropic direction in the odd lift space; the algebra is the terminal case"
                .into(),
        ));
    };
    let mut y = vec![ext.zero(); alg.dim()];
    for (i, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            for (k, l) in lifts[i].iter().enumerate() {
                y[k] = y[k].add(&c.mul(l));
            }
        }
    }
    finish_triple(alg, lambda, ext, z, y, Parity::Odd)
}

fn finish_triple(
    alg: &Arc<SuperLieAlgebra>,
    lambda: &[Scalar],
    tower: Tower,
    z: Vec<Scalar>,
    y: Vec<Scalar>,
    parity: Parity,
) -> Result<BmTriple> {
    // [y, b_j] lies in kz for every j because y is central modulo kz
    let n = alg.dim();
    let mut x = None;
    for j in 0..n {
        let br = alg.bracket(&y, &alg.basis_vector(j));
        let c = lambda_eval(lambda, &br);
        let back: Vec<Scalar> = z.iter().map(|zc| zc.mul(&c)).collect();
        if br != back {
            return Err(Error::Hypothesis(
                "chosen y is not central modulo the center".into(),
            ));
        }
        if x.is_none() && !c.is_zero() {
            let inv = c.inv()?;
            let mut xv = vec![tower.zero(); n];
            xv[j] = inv;
            x = Some(xv);
        }
    }
    let Some(x) = x else {
        return Err(Error::Hypothesis("y turned out to be central".into()));
    };
    // invariants
    let yy = alg.bracket(&y, &y);
    if yy.iter().any(|c| !c.is_zero()) {
        return Err(Error::Hypothesis("[y, y] must vanish".into()));
    }
    let k = alg.centralizer(std::slice::from_ref(&y));
    if k.sdim().total() + 1 != n {
        return Err(Error::Hypothesis(
            "centralizer of y is not of codimension one".into(),
        ));
    }
    Ok(BmTriple {
        z,
        y,
        x,
        parity,
        k,
        y_square_zero: true,
        tower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn abelian_is_valid_and_nilpotent() {
        let t = Tower::rationals();
        let alg = AlgebraBuilder::new(&t)
            .gen("a", Parity::Even)
            .gen("b", Parity::Even)
            .build();
        assert!(alg.validate().is_valid());
        assert!(alg.is_nilpotent());
        assert!(alg.is_solvable());
        let ds = alg.derived_series();
        assert_eq!(ds.len(), 2);
        assert!(ds[1].is_zero());
    }

    #[test]
    fn heisenberg_series_and_center() {
        let alg = catalog::heisenberg3();
        assert!(alg.validate().is_valid());
        assert!(alg.is_nilpotent());
        let lcs = alg.lower_central_series();
        assert_eq!(lcs.len(), 3);
        assert_eq!(lcs[1].sdim(), SuperDim::new(1, 0));
        assert!(lcs[2].is_zero());
        let center = alg.center();
        assert_eq!(center.sdim(), SuperDim::new(1, 0));
        let t = alg.tower().clone();
        let z = alg.basis_vector(0);
        assert!(center.contains_vector(&z, Parity::Even));
        let _ = t;
    }

    #[test]
    fn broken_skewsymmetry_is_reported() {
        let t = Tower::rationals();
        let alg = AlgebraBuilder::new(&t)
            .gen("a", Parity::Even)
            .gen("b", Parity::Even)
            .gen("c", Parity::Even)
            .bracket("a", "b", &[("c", t.one())])
            .bracket("b", "a", &[("c", t.one())])
            .build();
        let report = alg.validate();
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.contains("superskew")));
    }

    #[test]
    fn non_nilpotent_diagonal_action() {
        // gl(1|1): [d, e] = 2e is a diagonal action, so ad(d) has a
        // nonzero eigenvalue and the algebra is solvable but not nilpotent
        let t = Tower::rationals();
        let alg = AlgebraBuilder::new(&t)
            .gen("u", Parity::Even)
            .gen("d", Parity::Even)
            .gen("e", Parity::Odd)
            .gen("f", Parity::Odd)
            .bracket("e", "f", &[("u", t.one())])
            .bracket("d", "e", &[("e", t.int(2))])
            .bracket("d", "f", &[("f", t.int(-2))])
            .build();
        assert!(alg.validate().is_valid(), "{:?}", alg.validate());
        assert!(!alg.is_nilpotent());
        assert!(alg.is_solvable());
    }

    #[test]
    fn quotient_of_heisenberg_by_center() {
        let alg = catalog::heisenberg3();
        let quot = alg.quotient(alg.center()).unwrap();
        assert_eq!(quot.algebra.sdim(), SuperDim::new(2, 0));
        assert!(quot.algebra.is_nilpotent());
        // quotient is abelian
        let lcs = quot.algebra.lower_central_series();
        assert!(lcs[1].is_zero());
        // projection respects brackets on basis pairs
        for i in 0..3 {
            for j in 0..3 {
                let br = alg.bracket(&alg.basis_vector(i), &alg.basis_vector(j));
                let lhs = quot.projection.mul_vec(&br);
                let pi = quot.projection.mul_vec(&alg.basis_vector(i));
                let pj = quot.projection.mul_vec(&alg.basis_vector(j));
                let rhs = quot.algebra.bracket(&pi, &pj);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn bm_triple_heisenberg() {
        let alg = catalog::heisenberg3();
        let lam = catalog::dual_functional(&alg, "z");
        let triple = find_bm_triple(&alg, &lam).unwrap();
        assert_eq!(triple.parity, Parity::Even);
        // [y, x] = z and hypotheses
        let t = alg.tower().clone();
        assert_eq!(alg.bracket(&triple.y, &triple.x), triple.z);
        assert!(lambda_eval(&lam, &triple.y).is_zero());
        assert_eq!(triple.k.sdim().total(), 2);
        assert!(triple.k.contains_general(&triple.z));
        assert!(triple.k.contains_general(&triple.y));
        assert!(alg.is_ideal(&triple.k));
        // k is the centralizer of y: q is the first even lift, so k = span(z, q)
        let q = alg.basis_vector(1);
        assert!(triple.k.contains_vector(&q, Parity::Even));
        let _ = t;
    }

    #[test]
    fn bm_triple_super_heisenberg_hyperbolic() {
        let alg = catalog::super_heisenberg_hyperbolic();
        let lam = catalog::dual_functional(&alg, "z");
        let triple = find_bm_triple(&alg, &lam).unwrap();
        assert_eq!(triple.parity, Parity::Odd);
        assert_eq!(triple.tower.depth(), 0, "hyperbolic case stays rational");
        assert_eq!(alg.bracket(&triple.y, &triple.x), triple.z);
        assert!(alg.bracket(&triple.y, &triple.y).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn bm_triple_super_heisenberg_diagonal_adjoins_a_root() {
        let alg = catalog::super_heisenberg_diagonal();
        let lam = catalog::dual_functional(&alg, "z");
        let triple = find_bm_triple(&alg, &lam).unwrap();
        assert_eq!(triple.parity, Parity::Odd);
        assert_eq!(triple.tower.depth(), 1, "diag(1,1) needs sqrt(-1)");
        assert_eq!(alg.bracket(&triple.y, &triple.x), triple.z);
        assert!(alg.bracket(&triple.y, &triple.y).iter().all(|c| c.is_zero()));
        let k = &triple.k;
        assert_eq!(k.sdim(), SuperDim::new(1, 1));
    }

    #[test]
    fn bm_triple_hypothesis_errors() {
        // center not one-dimensional: abelian algebra
        let t = Tower::rationals();
        let alg = AlgebraBuilder::new(&t)
            .gen("a", Parity::Even)
            .gen("b", Parity::Even)
            .gen("c", Parity::Even)
            .build();
        let lam = vec![t.one(), t.zero(), t.zero()];
        assert!(matches!(
            find_bm_triple(&alg, &lam),
            Err(Error::Hypothesis(_))
        ));
        // lambda vanishing on the center
        let alg = catalog::heisenberg3();
        let t = alg.tower().clone();
        let lam = vec![t.zero(), t.one(), t.zero()];
        assert!(matches!(
            find_bm_triple(&alg, &lam),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn rebase_preserves_brackets() {
        let alg = catalog::heisenberg3();
        let t = alg.tower().clone();
        // new basis: (q, z, p + q)
        let new_basis = vec![
            (alg.basis_vector(1), Parity::Even),
            (alg.basis_vector(0), Parity::Even),
            (
                vec![t.zero(), t.one(), t.one()],
                Parity::Even,
            ),
        ];
        let rb = alg.rebase(&new_basis).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let br_old = alg.bracket(&new_basis[i].0, &new_basis[j].0);
                let lhs = rb.fwd.mul_vec(&br_old);
                let rhs = rb
                    .algebra
                    .bracket(&rb.algebra.basis_vector(i), &rb.algebra.basis_vector(j));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
