//! The reduction morphism from `U(g)` onto a factored Clifford--Weyl
//! algebra whose kernel is the primitive ideal attached to a functional,
//! with a membership oracle, the `(p, q)` invariants, a canonical Clifford
//! presentation, and the maximal-ideal split of the underlying algebra.
//!
//! Each recursion level either evaluates (when the functional kills all
//! brackets), quotients out central directions inside the kernel, splits
//! off a Weyl factor (even reduction direction), splits off a 2x2 matrix
//! factor (odd direction), or terminates in a rank-one Clifford factor.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::linalg::{GradedSubspace, Matrix, Parity};
use crate::pbw::{apply_derivation, monomials_up_to, PBWElement};
use crate::polarization::{lambda_form, polarize};
use crate::scalar::{Scalar, Tower};
use crate::superlie::{lambda_eval, Exponents, SuperLieAlgebra};

/// One tensor factor of the target algebra.
#[derive(Debug, Clone)]
pub enum Factor {
    /// Generators `q, p` with `q p - p q = 1`; purely even.
    Weyl,
    /// 2x2 matrix units; diagonal even, antidiagonal odd.
    Matrix2,
    /// One odd generator `gamma` with `gamma^2 = square`.
    Clifford { square: Scalar },
}

/// Basis monomial inside a single factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FactorMono {
    /// `q^a p^b`
    Weyl(u32, u32),
    /// matrix unit `e_{rc}` encoded as `r * 2 + c` with r, c in {0, 1}
    Mat(u8),
    /// `gamma^0` or `gamma^1`
    Cliff(bool),
}

impl FactorMono {
    fn parity(&self) -> Parity {
        match self {
            FactorMono::Weyl(_, _) => Parity::Even,
            FactorMono::Mat(u) => {
                let (r, c) = (u / 2, u % 2);
                if r == c {
                    Parity::Even
                } else {
                    Parity::Odd
                }
            }
            FactorMono::Cliff(g) => {
                if *g {
                    Parity::Odd
                } else {
                    Parity::Even
                }
            }
        }
    }

    fn degree(&self) -> usize {
        match self {
            FactorMono::Weyl(a, b) => (*a + *b) as usize,
            FactorMono::Mat(u) => {
                let (r, c) = (u / 2, u % 2);
                if r == c {
                    0
                } else {
                    1
                }
            }
            FactorMono::Cliff(g) => *g as usize,
        }
    }
}

/// The factored target: an ordered list of factors. Monomials are one
/// basis element per factor; the Koszul convention places earlier factors
/// to the tensor right, and the multiplication sign for `a * b` is
/// `prod_{i < j} (-1)^{|a_i||b_j|}` over factor slots.
#[derive(Debug, Clone)]
pub struct FactoredTarget {
    pub factors: Vec<Factor>,
    pub tower: Tower,
}

type TargetMono = Vec<FactorMono>;

/// An element of the factored target.
#[derive(Debug, Clone)]
pub struct TargetElement {
    target: Arc<FactoredTarget>,
    terms: BTreeMap<TargetMono, Scalar>,
}

impl PartialEq for TargetElement {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

fn factorial(n: u32) -> BigRational {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    BigRational::from_integer(acc)
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl FactoredTarget {
    fn identity_options(&self, slot: usize) -> Vec<FactorMono> {
        match self.factors[slot] {
            Factor::Weyl => vec![FactorMono::Weyl(0, 0)],
            Factor::Matrix2 => vec![FactorMono::Mat(0), FactorMono::Mat(3)],
            Factor::Clifford { .. } => vec![FactorMono::Cliff(false)],
        }
    }

    /// Names of the factor generators, per slot.
    pub fn factor_names(&self) -> Vec<String> {
        let mut weyl = 0usize;
        let mut mat = 0usize;
        self.factors
            .iter()
            .map(|f| match f {
                Factor::Weyl => {
                    weyl += 1;
                    format!("A{}", weyl)
                }
                Factor::Matrix2 => {
                    mat += 1;
                    format!("M{}", mat)
                }
                Factor::Clifford { .. } => "C".to_string(),
            })
            .collect()
    }
}

impl TargetElement {
    pub fn zero(target: &Arc<FactoredTarget>) -> Self {
        TargetElement {
            target: target.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(target: &Arc<FactoredTarget>) -> Self {
        let mut out = TargetElement::zero(target);
        let mut monos: Vec<TargetMono> = vec![Vec::new()];
        for slot in 0..target.factors.len() {
            let opts = target.identity_options(slot);
            let mut next = Vec::new();
            for m in &monos {
                for o in &opts {
                    let mut mm = m.clone();
                    mm.push(*o);
                    next.push(mm);
                }
            }
            monos = next;
        }
        for m in monos {
            out.terms.insert(m, target.tower.one());
        }
        out
    }

    pub fn scalar(target: &Arc<FactoredTarget>, c: &Scalar) -> Self {
        TargetElement::one(target).scale(c)
    }

    /// The generator `gen` of factor `slot`, as an element.
    pub fn factor_generator(target: &Arc<FactoredTarget>, slot: usize, gen: FactorMono) -> Self {
        let mut out = TargetElement::zero(target);
        let mut monos: Vec<TargetMono> = vec![Vec::new()];
        for s in 0..target.factors.len() {
            let opts = if s == slot {
                vec![gen]
            } else {
                target.identity_options(s)
            };
            let mut next = Vec::new();
            for m in &monos {
                for o in &opts {
                    let mut mm = m.clone();
                    mm.push(*o);
                    next.push(mm);
                }
            }
            monos = next;
        }
        for m in monos {
            out.terms.insert(m, target.tower.one());
        }
        out
    }

    pub fn target(&self) -> &Arc<FactoredTarget> {
        &self.target
    }

    pub fn terms(&self) -> &BTreeMap<TargetMono, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: TargetMono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = slot.add(&c);
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &TargetElement) -> TargetElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TargetElement) -> TargetElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TargetElement {
        TargetElement {
            target: self.target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> TargetElement {
        if c.is_zero() {
            return TargetElement::zero(&self.target);
        }
        TargetElement {
            target: self.target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn mono_parity(m: &TargetMono) -> Parity {
        let mut p = Parity::Even;
        for f in m {
            p = p.plus(f.parity());
        }
        p
    }

    pub fn parity(&self) -> Option<Parity> {
        let mut par = None;
        for m in self.terms.keys() {
            let p = TargetElement::mono_parity(m);
            match par {
                None => par = Some(p),
                Some(q) if q == p => {}
                _ => return None,
            }
        }
        par
    }

    /// Parity automorphism.
    pub fn sigma(&self) -> TargetElement {
        TargetElement {
            target: self.target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let c = match TargetElement::mono_parity(m) {
                        Parity::Even => c.clone(),
                        Parity::Odd => c.neg(),
                    };
                    (m.clone(), c)
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &TargetElement) -> TargetElement {
        let target = self.target.clone();
        let mut out = TargetElement::zero(&target);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                // Koszul sign over slot pairs i < j
                let mut sign = 1i32;
                for i in 0..ma.len() {
                    for j in (i + 1)..mb.len() {
                        sign *= ma[i].parity().koszul(mb[j].parity());
                    }
                }
                // slotwise products, each a small term list
                let mut partial: Vec<(TargetMono, Scalar)> = vec![(
                    Vec::with_capacity(ma.len()),
                    if sign < 0 {
                        ca.mul(cb).neg()
                    } else {
                        ca.mul(cb)
                    },
                )];
                for slot in 0..ma.len() {
                    let pieces = slot_product(&target.factors[slot], &ma[slot], &mb[slot], &target.tower);
                    let mut next = Vec::new();
                    for (m, c) in &partial {
                        for (fm, fc) in &pieces {
                            let mut mm = m.clone();
                            mm.push(*fm);
                            next.push((mm, c.mul(fc)));
                        }
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                for (m, c) in partial {
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// Super commutator in the target.
    pub fn super_commutator(&self, other: &TargetElement) -> TargetElement {
        let pa = self.parity().expect("homogeneous element");
        let pb = other.parity().expect("homogeneous element");
        let mut second = other.mul(self);
        if pa.koszul(pb) < 0 {
            second = second.neg();
        }
        self.mul(other).sub(&second)
    }

    /// Total degree of the largest monomial.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|f| f.degree()).sum())
            .max()
            .unwrap_or(0)
    }

    /// Substitute the terminal Clifford generator by a scalar value; the
    /// result lives in the same target with the Clifford slot forced to
    /// the identity.
    pub fn eval_clifford(&self, slot: usize, value: &Scalar) -> TargetElement {
        let mut out = TargetElement::zero(&self.target);
        for (m, c) in &self.terms {
            let mut mm = m.clone();
            let coeff = match mm[slot] {
                FactorMono::Cliff(true) => {
                    mm[slot] = FactorMono::Cliff(false);
                    c.mul(value)
                }
                _ => c.clone(),
            };
            out.add_term(mm, coeff);
        }
        out
    }

    /// Render as a string over the factor generator names.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = self.target.factor_names();
        let mut parts: Vec<(String, Scalar)> = Vec::new();
        for (m, c) in &self.terms {
            let mut atoms = Vec::new();
            for (slot, f) in m.iter().enumerate() {
                match f {
                    FactorMono::Weyl(a, b) => {
                        if *a == 1 {
                            atoms.push(format!("{}.q", names[slot]));
                        } else if *a > 1 {
                            atoms.push(format!("{}.q^{}", names[slot], a));
                        }
                        if *b == 1 {
                            atoms.push(format!("{}.p", names[slot]));
                        } else if *b > 1 {
                            atoms.push(format!("{}.p^{}", names[slot], b));
                        }
                    }
                    FactorMono::Mat(u) => {
                        let (r, cc) = (u / 2, u % 2);
                        atoms.push(format!("{}.e{}{}", names[slot], r + 1, cc + 1));
                    }
                    FactorMono::Cliff(g) => {
                        if *g {
                            atoms.push(format!("{}.g", names[slot]));
                        }
                    }
                }
            }
            let mono = if atoms.is_empty() {
                "1".to_string()
            } else {
                atoms.join("*")
            };
            parts.push((mono, c.clone()));
        }
        let tower = &self.target.tower;
        let mut out = String::new();
        for (idx, (mono, c)) in parts.iter().enumerate() {
            let cs = tower.format(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !cs.contains(" + ") && !cs.contains(" - ") => {
                    (true, rest.to_string())
                }
                _ => (false, cs),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coeff_part = if mag == "1" {
                None
            } else if mag.contains(" + ") || mag.contains(" - ") {
                Some(format!("({})", mag))
            } else {
                Some(mag)
            };
            match (coeff_part, mono.as_str()) {
                (None, m) => out.push_str(m),
                (Some(cp), "1") => out.push_str(&cp),
                (Some(cp), m) => {
                    out.push_str(&cp);
                    out.push('*');
                    out.push_str(m);
                }
            }
        }
        out
    }
}

/// Product of two basis monomials inside one factor.
fn slot_product(
    factor: &Factor,
    a: &FactorMono,
    b: &FactorMono,
    tower: &Tower,
) -> Vec<(FactorMono, Scalar)> {
    match (factor, a, b) {
        (Factor::Weyl, FactorMono::Weyl(a1, b1), FactorMono::Weyl(a2, b2)) => {
            // q^{a1} p^{b1} q^{a2} p^{b2} with [q, p] = 1:
            // p^b q^c = sum_j C(b,j) C(c,j) j! (-1)^j q^{c-j} p^{b-j}
            let mut out = Vec::new();
            for j in 0..=(*b1).min(*a2) {
                let mut coeff = BigRational::from_integer(binom(*b1, j) * binom(*a2, j))
                    * factorial(j);
                if j % 2 == 1 {
                    coeff = -coeff;
                }
                out.push((
                    FactorMono::Weyl(a1 + a2 - j, b1 + b2 - j),
                    tower.rational(coeff),
                ));
            }
            out
        }
        (Factor::Matrix2, FactorMono::Mat(u), FactorMono::Mat(v)) => {
            let (r1, c1) = (u / 2, u % 2);
            let (r2, c2) = (v / 2, v % 2);
            if c1 == r2 {
                vec![(FactorMono::Mat(r1 * 2 + c2), tower.one())]
            } else {
                Vec::new()
            }
        }
        (Factor::Clifford { square }, FactorMono::Cliff(g1), FactorMono::Cliff(g2)) => {
            match (g1, g2) {
                (false, x) => vec![(FactorMono::Cliff(*x), tower.one())],
                (true, false) => vec![(FactorMono::Cliff(true), tower.one())],
                (true, true) => vec![(FactorMono::Cliff(false), square.clone())],
            }
        }
        _ => panic!("monomial does not match its factor"),
    }
}

/// One recursion step of the morphism.
#[derive(Debug)]
pub enum Step {
    /// Terminal: evaluate every generator through the functional.
    Evaluation {
        algebra: Arc<SuperLieAlgebra>,
        lambda: Vec<Scalar>,
    },
    /// Quotient by the central subspace inside the kernel of the functional.
    Quotient {
        algebra: Arc<SuperLieAlgebra>,
        quotient: Arc<SuperLieAlgebra>,
        gen_images: Vec<PBWElement>,
        killed_sdim: (usize, usize),
    },
    /// Even reduction direction: emits a Weyl factor.
    EvenReduction(ReductionStep),
    /// Odd reduction direction: emits a matrix factor.
    OddReduction(ReductionStep),
    /// Terminal rank-one Clifford quotient.
    TerminalClifford {
        algebra: Arc<SuperLieAlgebra>,
        adapted: Arc<SuperLieAlgebra>,
        gen_images: Vec<PBWElement>,
        square: Scalar,
    },
}

/// Data shared by the two reduction step kinds.
#[derive(Debug)]
pub struct ReductionStep {
    pub algebra: Arc<SuperLieAlgebra>,
    /// presentation on the basis (z, y, w.., x)
    adapted: Arc<SuperLieAlgebra>,
    gen_images: Vec<PBWElement>,
    /// the ideal presentation: first n-1 adapted indices
    k_alg: Arc<SuperLieAlgebra>,
    /// images of the reduction derivation on the ideal generators
    deriv_images: Vec<PBWElement>,
    deriv_parity: Parity,
    /// `[x, x]` as an element of the ideal presentation (odd steps)
    x_square: Option<PBWElement>,
    /// projection of the ideal onto its quotient by `k y`
    kbar: Arc<SuperLieAlgebra>,
    kbar_images: Vec<PBWElement>,
    /// reduction data for reporting
    pub y_in_level: Vec<Scalar>,
    pub x_in_level: Vec<Scalar>,
}

/// The assembled morphism.
#[derive(Debug)]
pub struct DixmierMorphism {
    pub source: Arc<SuperLieAlgebra>,
    pub lambda: Vec<Scalar>,
    pub steps: Vec<Step>,
    pub target: Arc<FactoredTarget>,
    /// tower after all adjunctions
    pub tower: Tower,
    pub p: usize,
    pub q: usize,
    pub generator_images: Vec<TargetElement>,
}

/// `(p, q)` read off the kernel of the lambda form.
pub fn pq_expected(alg: &Arc<SuperLieAlgebra>, lambda: &[Scalar]) -> Result<(usize, usize)> {
    let lf = lambda_form(alg, lambda)?;
    let sd = alg.sdim();
    let k = lf.kernel.sdim();
    Ok(((sd.even - k.even) / 2, sd.odd - k.odd))
}

/// Build the reduction morphism for a nilpotent algebra and an even
/// functional. Deterministic; may extend the scalar tower.
pub fn build_dixmier(alg: &Arc<SuperLieAlgebra>, lambda: &[Scalar]) -> Result<DixmierMorphism> {
    let base = alg.tower().clone();
    build_dixmier_from(alg, lambda, &base)
}

/// Same as [`build_dixmier`], threading an explicit base tower so that
/// several morphisms stay scalar-compatible (one linear chain of
/// extensions).
pub fn build_dixmier_from(
    alg: &Arc<SuperLieAlgebra>,
    lambda: &[Scalar],
    base: &Tower,
) -> Result<DixmierMorphism> {
    alg.ensure_valid()?;
    if !alg.is_nilpotent() {
        return Err(Error::NotNilpotent(
            "the reduction is defined for nilpotent algebras".into(),
        ));
    }
    for i in 0..alg.dim() {
        if alg.parity_of(i) == Parity::Odd && !lambda[i].is_zero() {
            return Err(Error::InvalidFunctional(
                "functionals vanish on odd generators".into(),
            ));
        }
    }
    let (q_expected_parity, _) = {
        let (p, q) = pq_expected(alg, lambda)?;
        (q % 2, p)
    };
    let mut steps = Vec::new();
    let mut factors = Vec::new();
    let mut cur_alg = alg.clone();
    let mut cur_lambda = lambda.to_vec();
    let mut tower = base.clone();
    loop {
        // q-parity is invariant along the recursion
        let (_, q_here) = pq_expected(&cur_alg, &cur_lambda)?;
        debug_assert_eq!(q_here % 2, q_expected_parity);
        // case 1: the functional kills all brackets
        let mut kills = true;
        'outer: for i in 0..cur_alg.dim() {
            for j in 0..cur_alg.dim() {
                if !lambda_eval(&cur_lambda, cur_alg.bracket_basis(i, j)).is_zero() {
                    kills = false;
                    break 'outer;
                }
            }
        }
        if kills {
            steps.push(Step::Evaluation {
                algebra: cur_alg.clone(),
                lambda: cur_lambda.clone(),
            });
            break;
        }
        // case 2: central directions inside the kernel
        let center = cur_alg.center().clone();
        let central_kernel = center_cap_kernel(&cur_alg, &center, &cur_lambda, &tower);
        if !central_kernel.is_zero() {
            let quot = cur_alg.quotient(&central_kernel)?;
            let next_lambda: Vec<Scalar> = quot
                .complement_cols
                .iter()
                .map(|&c| cur_lambda[c].clone())
                .collect();
            let gen_images: Vec<PBWElement> = (0..cur_alg.dim())
                .map(|j| {
                    PBWElement::from_vector(
                        &quot.algebra,
                        &quot.projection.mul_vec(&cur_alg.basis_vector(j)),
                    )
                })
                .collect();
            let killed = central_kernel.sdim();
            steps.push(Step::Quotient {
                algebra: cur_alg.clone(),
                quotient: quot.algebra.clone(),
                gen_images,
                killed_sdim: (killed.even, killed.odd),
            });
            cur_lambda = next_lambda;
            cur_alg = quot.algebra;
            continue;
        }
        // now the center is one line with nonzero value
        let sd = cur_alg.sdim();
        if sd.even == 1 && sd.odd == 1 {
            // terminal Clifford case
            let z_raw = center.even.row(0);
            let lz = lambda_eval(&cur_lambda, &z_raw);
            let z: Vec<Scalar> = z_raw.iter().map(|c| c.div(&lz).unwrap()).collect();
            let odd_vec = cur_alg.basis_vector(
                (0..cur_alg.dim())
                    .find(|&i| cur_alg.parity_of(i) == Parity::Odd)
                    .expect("one odd direction"),
            );
            let rb = cur_alg.rebase(&[(z.clone(), Parity::Even), (odd_vec.clone(), Parity::Odd)])?;
            let yy = cur_alg.bracket(&odd_vec, &odd_vec);
            let square = lambda_eval(&cur_lambda, &yy)
                .mul(&tower.rat(1, 2))
                .div(&lz)
                .unwrap();
            let gen_images: Vec<PBWElement> = (0..cur_alg.dim())
                .map(|j| {
                    PBWElement::from_vector(
                        &rb.algebra,
                        &rb.fwd.mul_vec(&cur_alg.basis_vector(j)),
                    )
                })
                .collect();
            factors.push(Factor::Clifford {
                square: square.clone(),
            });
            steps.push(Step::TerminalClifford {
                algebra: cur_alg.clone(),
                adapted: rb.algebra,
                gen_images,
                square,
            });
            break;
        }
        // case 3: a reduction direction
        let triple = crate::superlie::find_bm_triple_from(&cur_alg, &cur_lambda, &tower)?;
        tower = triple.tower.clone();
        let n = cur_alg.dim();
        // adapted basis (z, y, w.., x): complete span(z, y) inside k
        let mut adapted_basis: Vec<(Vec<Scalar>, Parity)> = vec![
            (triple.z.clone(), Parity::Even),
            (triple.y.clone(), triple.parity),
        ];
        let mut span = Matrix::from_rows(&tower, vec![triple.z.clone(), triple.y.clone()])
            .rref()
            .0;
        for (v, p) in triple.k.basis() {
            if !span.row_space_contains(&v) {
                span = span.stack(&Matrix::from_rows(&tower, vec![v.clone()])).rref().0;
                adapted_basis.push((v, p));
            }
        }
        adapted_basis.push((triple.x.clone(), triple.parity));
        if adapted_basis.len() != n {
            return Err(Error::Hypothesis(
                "adapted basis assembly failed".into(),
            ));
        }
        let rb = cur_alg.rebase(&adapted_basis)?;
        let adapted = rb.algebra.clone();
        let gen_images: Vec<PBWElement> = (0..n)
            .map(|j| {
                PBWElement::from_vector(&adapted, &rb.fwd.mul_vec(&cur_alg.basis_vector(j)))
            })
            .collect();
        // ideal presentation on the first n-1 adapted indices
        let k_idx: Vec<usize> = (0..n - 1).collect();
        // brackets with x must stay inside k
        for j in 0..n - 1 {
            if !adapted.bracket_basis(n - 1, j)[n - 1].is_zero() {
                return Err(Error::Hypothesis(
                    "ideal is not closed against the reduction direction".into(),
                ));
            }
        }
        let k_alg = adapted.subalgebra_on_indices(&k_idx);
        // derivation images on the ideal generators
        let deriv_parity = triple.parity;
        let deriv_images: Vec<PBWElement> = (0..n - 1)
            .map(|j| {
                let br = adapted.bracket_basis(n - 1, j);
                let mut v: Vec<Scalar> = br[..n - 1].to_vec();
                if triple.parity == Parity::Even {
                    // D = -ad(x) drives the Weyl variable
                    v = v.iter().map(|c| c.neg()).collect();
                }
                PBWElement::from_vector(&k_alg, &v)
            })
            .collect();
        let x_square = if triple.parity == Parity::Odd {
            let br = adapted.bracket_basis(n - 1, n - 1);
            Some(
                PBWElement::from_vector(&k_alg, &br[..n - 1]).scale_rat(&BigRational::new(
                    BigInt::from(1),
                    BigInt::from(2),
                )),
            )
        } else {
            None
        };
        // quotient of the ideal by k y (adapted index 1)
        let y_line = GradedSubspace::from_vectors(
            &tower,
            k_alg.parities(),
            &[k_alg.basis_vector(1)],
        )?;
        let kq = k_alg.quotient(&y_line)?;
        let kbar = kq.algebra.clone();
        let kbar_images: Vec<PBWElement> = (0..n - 1)
            .map(|j| {
                PBWElement::from_vector(&kbar, &kq.projection.mul_vec(&k_alg.basis_vector(j)))
            })
            .collect();
        let next_lambda: Vec<Scalar> = kq
            .complement_cols
            .iter()
            .map(|&c| {
                // adapted index c corresponds to the chosen basis vector
                lambda_eval(&cur_lambda, &adapted_basis[c].0)
            })
            .collect();
        let step = ReductionStep {
            algebra: cur_alg.clone(),
            adapted,
            gen_images,
            k_alg,
            deriv_images,
            deriv_parity,
            x_square,
            kbar: kbar.clone(),
            kbar_images,
            y_in_level: triple.y.clone(),
            x_in_level: triple.x.clone(),
        };
        match triple.parity {
            Parity::Even => {
                factors.push(Factor::Weyl);
                steps.push(Step::EvenReduction(step));
            }
            Parity::Odd => {
                factors.push(Factor::Matrix2);
                steps.push(Step::OddReduction(step));
            }
        }
        cur_alg = kbar;
        cur_lambda = next_lambda;
    }
    let target = Arc::new(FactoredTarget {
        factors,
        tower: tower.clone(),
    });
    let p = target
        .factors
        .iter()
        .filter(|f| matches!(f, Factor::Weyl))
        .count();
    let q = target
        .factors
        .iter()
        .map(|f| match f {
            Factor::Matrix2 => 2,
            Factor::Clifford { .. } => 1,
            Factor::Weyl => 0,
        })
        .sum();
    let mut morphism = DixmierMorphism {
        source: alg.clone(),
        lambda: lambda.to_vec(),
        steps,
        target,
        tower,
        p,
        q,
        generator_images: Vec::new(),
    };
    morphism.generator_images = (0..alg.dim())
        .map(|i| morphism.evaluate(&PBWElement::generator(alg, i)))
        .collect();
    // structural invariants: the reported indices match the form, and the
    // generator images satisfy every bracket relation
    let (pe, qe) = pq_expected(alg, lambda)?;
    if (morphism.p, morphism.q) != (pe, qe) {
        return Err(Error::Hypothesis(format!(
            "index mismatch: recursion gives ({}, {}), the form gives ({}, {})",
            morphism.p, morphism.q, pe, qe
        )));
    }
    let failures = morphism.validate_step_images();
    if !failures.is_empty() {
        return Err(Error::Hypothesis(format!(
            "generator images break relations: {}",
            failures.join("; ")
        )));
    }
    Ok(morphism)
}

fn center_cap_kernel(
    alg: &SuperLieAlgebra,
    center: &GradedSubspace,
    lambda: &[Scalar],
    tower: &Tower,
) -> GradedSubspace {
    // odd central directions always lie in the kernel of an even functional
    let mut even_rows = Vec::new();
    let m = center.even.rows;
    if m > 0 {
        let mut cond = Matrix::zero(tower, 1, m);
        for c in 0..m {
            cond.set(0, c, lambda_eval(lambda, &center.even.row(c)));
        }
        let null = cond.nullspace();
        for r in 0..null.rows {
            let mut v = vec![tower.zero(); alg.dim()];
            for c in 0..m {
                let k = null.at(r, c);
                if !k.is_zero() {
                    for i in 0..alg.dim() {
                        v[i] = v[i].add(&k.mul(center.even.at(c, i)));
                    }
                }
            }
            even_rows.push(v);
        }
    }
    GradedSubspace {
        parities: alg.parities().to_vec(),
        even: Matrix::from_rows_dim(tower, even_rows, alg.dim()).rref().0,
        odd: center.odd.clone(),
    }
}

impl DixmierMorphism {
    /// Evaluate the morphism on an element of `U(g)`.
    pub fn evaluate(&self, u: &PBWElement) -> TargetElement {
        assert!(
            Arc::ptr_eq(u.algebra(), &self.source),
            "element of a different algebra"
        );
        let suffix = self.eval_suffix(0, u.clone());
        let mut out = TargetElement::zero(&self.target);
        for (m, c) in suffix {
            out.add_term(m, c);
        }
        out
    }

    /// Membership in the kernel ideal.
    pub fn member(&self, u: &PBWElement) -> bool {
        self.evaluate(u).is_zero()
    }

    fn eval_suffix(&self, level: usize, u: PBWElement) -> BTreeMap<TargetMono, Scalar> {
        let mut out: BTreeMap<TargetMono, Scalar> = BTreeMap::new();
        let push = |m: TargetMono, c: Scalar, out: &mut BTreeMap<TargetMono, Scalar>| {
            if c.is_zero() {
                return;
            }
            match out.get_mut(&m) {
                Some(slot) => {
                    *slot = slot.add(&c);
                    if slot.is_zero() {
                        out.remove(&m);
                    }
                }
                None => {
                    out.insert(m, c);
                }
            }
        };
        match &self.steps[level] {
            Step::Evaluation { lambda, .. } => {
                let mut acc = u.algebra().tower().zero();
                for (m, c) in u.terms() {
                    let mut v = c.clone();
                    for (g, &e) in m.iter().enumerate() {
                        for _ in 0..e {
                            v = v.mul(&lambda[g]);
                        }
                    }
                    acc = acc.add(&v);
                }
                if !acc.is_zero() {
                    out.insert(Vec::new(), acc);
                }
                out
            }
            Step::Quotient {
                quotient,
                gen_images,
                ..
            } => {
                let img = u.map_generators(quotient, gen_images);
                self.eval_suffix(level + 1, img)
            }
            Step::TerminalClifford {
                adapted,
                gen_images,
                ..
            } => {
                let img = u.map_generators(adapted, gen_images);
                for (m, c) in img.terms() {
                    // z^a gamma^b with z evaluated at 1
                    let mono = vec![FactorMono::Cliff(m[1] == 1)];
                    push(mono, c.clone(), &mut out);
                }
                out
            }
            Step::EvenReduction(step) => {
                let img = u.map_generators(&step.adapted, step.gen_images.as_slice());
                let n = step.adapted.dim();
                // group by the exponent of x
                let mut by_x: BTreeMap<u32, PBWElement> = BTreeMap::new();
                for (m, c) in img.terms() {
                    let i = m[n - 1];
                    let kmono: Exponents = m[..n - 1].to_vec();
                    let elem = by_x
                        .entry(i)
                        .or_insert_with(|| PBWElement::zero(&step.k_alg));
                    *elem = elem.add(&PBWElement::from_terms(&step.k_alg, {
                        let mut t = crate::superlie::TermMap::new();
                        t.insert(kmono, c.clone());
                        t
                    }));
                }
                for (i, u_i) in by_x {
                    let mut d = u_i;
                    let mut nn = 0u32;
                    loop {
                        if d.is_zero() {
                            break;
                        }
                        let vbar = d
                            .map_generators(&step.kbar, &step.kbar_images)
                            .scale_rat(&factorial(nn).recip());
                        if !vbar.is_zero() {
                            let deeper = self.eval_suffix(level + 1, vbar);
                            for (m, c) in deeper {
                                let mut mono = Vec::with_capacity(m.len() + 1);
                                mono.push(FactorMono::Weyl(nn, i));
                                mono.extend(m);
                                push(mono, c, &mut out);
                            }
                        }
                        d = apply_derivation(&d, step.deriv_parity, &step.deriv_images);
                        nn += 1;
                    }
                }
                out
            }
            Step::OddReduction(step) => {
                let img = u.map_generators(&step.adapted, step.gen_images.as_slice());
                let n = step.adapted.dim();
                let x_square = step.x_square.as_ref().expect("odd step has [x,x]/2");
                for (m, c) in img.terms() {
                    let eps = m[n - 1];
                    let kmono: Exponents = m[..n - 1].to_vec();
                    let v = PBWElement::from_terms(&step.k_alg, {
                        let mut t = crate::superlie::TermMap::new();
                        t.insert(kmono.clone(), c.clone());
                        t
                    });
                    let v_par = crate::pbw::monomial_parity(&step.k_alg, &kmono);
                    let dv = apply_derivation(&v, Parity::Odd, &step.deriv_images);
                    // pieces (k-element, matrix unit) of the image
                    let mut pieces: Vec<(PBWElement, u8)> = Vec::new();
                    if eps == 0 {
                        pieces.push((v.clone(), 0)); // e11
                        pieces.push((v.clone(), 3)); // e22
                        let mut w = dv;
                        if v_par == Parity::Even {
                            w = w.neg();
                        }
                        pieces.push((w, 1)); // e12
                    } else {
                        pieces.push((v.mul(x_square), 1)); // e12, already halved
                        pieces.push((v.clone(), 2)); // e21
                        let mut w = dv;
                        if v_par == Parity::Even {
                            w = w.neg();
                        }
                        pieces.push((w, 0)); // e11
                    }
                    for (elem, unit) in pieces {
                        if elem.is_zero() {
                            continue;
                        }
                        let vbar = elem.map_generators(&step.kbar, &step.kbar_images);
                        if vbar.is_zero() {
                            continue;
                        }
                        let deeper = self.eval_suffix(level + 1, vbar);
                        for (m2, c2) in deeper {
                            let mut mono = Vec::with_capacity(m2.len() + 1);
                            mono.push(FactorMono::Mat(unit));
                            mono.extend(m2);
                            push(mono, c2, &mut out);
                        }
                    }
                }
                out
            }
        }
    }

    /// Check every source bracket relation on the generator images;
    /// returns the offending pairs (empty means the morphism is sound).
    pub fn validate_step_images(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let n = self.source.dim();
        for i in 0..n {
            for j in 0..n {
                let lhs = self
                    .evaluate(&PBWElement::from_vector(
                        &self.source,
                        self.source.bracket_basis(i, j),
                    ));
                let a = &self.generator_images[i];
                let b = &self.generator_images[j];
                let sign = self.source.parity_of(i).koszul(self.source.parity_of(j));
                let mut second = b.mul(a);
                if sign < 0 {
                    second = second.neg();
                }
                let rhs = a.mul(b).sub(&second);
                if lhs != rhs {
                    failures.push(format!(
                        "[{}, {}]",
                        self.source.labels()[i],
                        self.source.labels()[j]
                    ));
                }
            }
        }
        failures
    }

    /// Basis of `ker(pi) ∩ F^degree` as elements.
    pub fn kernel_slice(&self, degree: usize) -> (Vec<Exponents>, Matrix) {
        let monos = monomials_up_to(&self.source, degree);
        kernel_of_map(&monos, &self.tower, |m| {
            self.evaluate(&PBWElement::from_terms(&self.source, {
                let mut t = crate::superlie::TermMap::new();
                t.insert(m.clone(), self.tower.one());
                t
            }))
        })
    }

    /// Adjoined radicands beyond the source tower, rendered.
    pub fn adjoined_radicands(&self) -> Vec<String> {
        let base = self.source.tower().depth();
        self.tower
            .radicands()
            .iter()
            .skip(base)
            .map(|r| self.tower.format(r))
            .collect()
    }

    /// Human-readable step list for reports.
    pub fn step_summaries(&self) -> Vec<BTreeMap<String, String>> {
        let mut out = Vec::new();
        for step in &self.steps {
            let mut m = BTreeMap::new();
            match step {
                Step::Evaluation { algebra, .. } => {
                    m.insert("kind".into(), "evaluation".into());
                    m.insert("level_dim".into(), algebra.dim().to_string());
                }
                Step::Quotient {
                    algebra,
                    killed_sdim,
                    ..
                } => {
                    m.insert("kind".into(), "quotient".into());
                    m.insert("level_dim".into(), algebra.dim().to_string());
                    m.insert(
                        "killed_sdim".into(),
                        format!("({}|{})", killed_sdim.0, killed_sdim.1),
                    );
                }
                Step::EvenReduction(r) => {
                    m.insert("kind".into(), "even".into());
                    m.insert("level_dim".into(), r.algebra.dim().to_string());
                    m.insert(
                        "y".into(),
                        PBWElement::from_vector(&r.algebra, &r.y_in_level).render(),
                    );
                    m.insert(
                        "x".into(),
                        PBWElement::from_vector(&r.algebra, &r.x_in_level).render(),
                    );
                }
                Step::OddReduction(r) => {
                    m.insert("kind".into(), "odd".into());
                    m.insert("level_dim".into(), r.algebra.dim().to_string());
                    m.insert(
                        "y".into(),
                        PBWElement::from_vector(&r.algebra, &r.y_in_level).render(),
                    );
                    m.insert(
                        "x".into(),
                        PBWElement::from_vector(&r.algebra, &r.x_in_level).render(),
                    );
                }
                Step::TerminalClifford {
                    algebra, square, ..
                } => {
                    m.insert("kind".into(), "clifford".into());
                    m.insert("level_dim".into(), algebra.dim().to_string());
                    m.insert("square".into(), self.tower.format(square));
                }
            }
            out.push(m);
        }
        out
    }
}

/// Kernel of a linear map from monomial space into the target, returned
/// as rows of coefficients over `monos`.
pub fn kernel_of_map<F>(monos: &[Exponents], tower: &Tower, eval: F) -> (Vec<Exponents>, Matrix)
where
    F: Fn(&Exponents) -> TargetElement,
{
    let images: Vec<TargetElement> = monos.iter().map(&eval).collect();
    let mut universe: Vec<TargetMono> = Vec::new();
    for img in &images {
        for m in img.terms().keys() {
            if !universe.contains(m) {
                universe.push(m.clone());
            }
        }
    }
    universe.sort();
    let mut cond = Matrix::zero(tower, universe.len(), monos.len());
    for (col, img) in images.iter().enumerate() {
        for (m, c) in img.terms() {
            let row = universe.binary_search(m).unwrap();
            cond.set(row, col, c.clone());
        }
    }
    (monos.to_vec(), cond.nullspace())
}

/// Supercenter triviality of the target on a degree-bounded slice: the
/// only elements supercommuting with every factor generator are scalars.
pub fn supercenter_is_scalars(target: &Arc<FactoredTarget>, max_degree: usize) -> bool {
    let monos = target_monomials(target, max_degree);
    let tower = target.tower.clone();
    let mut gens: Vec<TargetElement> = Vec::new();
    for (slot, f) in target.factors.iter().enumerate() {
        match f {
            Factor::Weyl => {
                gens.push(TargetElement::factor_generator(
                    target,
                    slot,
                    FactorMono::Weyl(1, 0),
                ));
                gens.push(TargetElement::factor_generator(
                    target,
                    slot,
                    FactorMono::Weyl(0, 1),
                ));
            }
            Factor::Matrix2 => {
                gens.push(TargetElement::factor_generator(target, slot, FactorMono::Mat(1)));
                gens.push(TargetElement::factor_generator(target, slot, FactorMono::Mat(2)));
            }
            Factor::Clifford { .. } => {
                gens.push(TargetElement::factor_generator(
                    target,
                    slot,
                    FactorMono::Cliff(true),
                ));
            }
        }
    }
    // unknowns: coefficients over monos; conditions: super commutators vanish
    let mut cond_rows: Vec<Vec<Scalar>> = Vec::new();
    let mut universe: Vec<TargetMono> = Vec::new();
    let mut commutators: Vec<Vec<TargetElement>> = Vec::new();
    for g in &gens {
        let mut per_gen = Vec::new();
        for m in &monos {
            let elem = element_of_mono(target, m);
            let mp = TargetElement::mono_parity(m);
            let gp = g.parity().unwrap();
            let mut second = g.mul(&elem);
            if mp.koszul(gp) < 0 {
                second = second.neg();
            }
            let br = elem.mul(g).sub(&second);
            for mm in br.terms().keys() {
                if !universe.contains(mm) {
                    universe.push(mm.clone());
                }
            }
            per_gen.push(br);
        }
        commutators.push(per_gen);
    }
    universe.sort();
    for per_gen in &commutators {
        for row_m in &universe {
            let mut row = Vec::with_capacity(monos.len());
            for br in per_gen {
                row.push(
                    br.terms()
                        .get(row_m)
                        .cloned()
                        .unwrap_or_else(|| tower.zero()),
                );
            }
            cond_rows.push(row);
        }
    }
    let null = Matrix::from_rows_dim(&tower, cond_rows, monos.len()).nullspace();
    // the solution space must be exactly the scalar line
    if null.rows != 1 {
        return false;
    }
    let sol = null.row(0);
    let one = TargetElement::one(target);
    // the solution must be proportional to the identity's coefficients
    let mut ratio: Option<Scalar> = None;
    for (i, m) in monos.iter().enumerate() {
        let idc = one
            .terms()
            .get(m)
            .cloned()
            .unwrap_or_else(|| tower.zero());
        if idc.is_zero() {
            if !sol[i].is_zero() {
                return false;
            }
        } else {
            let r = sol[i].div(&idc).unwrap();
            match &ratio {
                None => ratio = Some(r),
                Some(r0) => {
                    if *r0 != r {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The center of the underlying (ungraded) matrix part: scalars exactly
/// when the Clifford content has even rank.
pub fn matrix_part_center_is_scalars(target: &Arc<FactoredTarget>) -> bool {
    let slots: Vec<usize> = target
        .factors
        .iter()
        .enumerate()
        .filter(|(_, f)| matches!(f, Factor::Matrix2))
        .map(|(i, _)| i)
        .collect();
    if slots.is_empty() {
        return true;
    }
    let tower = target.tower.clone();
    // monomials varying only over the matrix slots
    let mut monos: Vec<TargetMono> = vec![Vec::new()];
    for slot in 0..target.factors.len() {
        let opts: Vec<FactorMono> = if slots.contains(&slot) {
            (0..4).map(FactorMono::Mat).collect()
        } else {
            target.identity_options(slot)
        };
        let mut next = Vec::new();
        for m in &monos {
            for o in &opts {
                let mut mm = m.clone();
                mm.push(*o);
                next.push(mm);
            }
        }
        monos = next;
    }
    let mut gens = Vec::new();
    for &slot in &slots {
        for u in 0..4u8 {
            gens.push(TargetElement::factor_generator(target, slot, FactorMono::Mat(u)));
        }
    }
    let mut universe: Vec<TargetMono> = Vec::new();
    let mut commutators: Vec<Vec<TargetElement>> = Vec::new();
    for g in &gens {
        let mut per_gen = Vec::new();
        for m in &monos {
            let elem = element_of_mono(target, m);
            // plain commutator of the underlying algebra
            let br = elem.mul(g).sub(&g.mul(&elem));
            for mm in br.terms().keys() {
                if !universe.contains(mm) {
                    universe.push(mm.clone());
                }
            }
            per_gen.push(br);
        }
        commutators.push(per_gen);
    }
    universe.sort();
    let mut cond_rows = Vec::new();
    for per_gen in &commutators {
        for row_m in &universe {
            let mut row = Vec::with_capacity(monos.len());
            for br in per_gen {
                row.push(
                    br.terms()
                        .get(row_m)
                        .cloned()
                        .unwrap_or_else(|| tower.zero()),
                );
            }
            cond_rows.push(row);
        }
    }
    let null = Matrix::from_rows_dim(&tower, cond_rows, monos.len()).nullspace();
    null.rows == 1
}

fn element_of_mono(target: &Arc<FactoredTarget>, m: &TargetMono) -> TargetElement {
    let mut out = TargetElement::zero(target);
    out.add_term(m.clone(), target.tower.one());
    out
}

/// All target monomials of bounded total degree.
pub fn target_monomials(target: &Arc<FactoredTarget>, max_degree: usize) -> Vec<TargetMono> {
    let mut monos: Vec<(TargetMono, usize)> = vec![(Vec::new(), 0)];
    for f in &target.factors {
        let mut next = Vec::new();
        for (m, d) in &monos {
            let opts: Vec<FactorMono> = match f {
                Factor::Weyl => {
                    let mut v = Vec::new();
                    for a in 0..=(max_degree - d) as u32 {
                        for b in 0..=((max_degree - d) as u32 - a) {
                            v.push(FactorMono::Weyl(a, b));
                        }
                    }
                    v
                }
                Factor::Matrix2 => (0..4).map(FactorMono::Mat).collect(),
                Factor::Clifford { .. } => vec![FactorMono::Cliff(false), FactorMono::Cliff(true)],
            };
            for o in opts {
                let dd = d + o.degree();
                if dd <= max_degree {
                    let mut mm = m.clone();
                    mm.push(o);
                    next.push((mm, dd));
                }
            }
        }
        monos = next;
    }
    monos.into_iter().map(|(m, _)| m).collect()
}

/// Outcome of the maximal-ideal analysis of the underlying algebra.
#[derive(Debug)]
pub enum SplitOutcome {
    /// Even Clifford rank: the kernel ideal is already maximal in the
    /// underlying algebra.
    AlreadyMaximal,
    /// Odd rank: two maximal ideals above the kernel, swapped by the
    /// parity automorphism.
    Split(MaximalSplit),
}

/// The two evaluation oracles `gamma -> +sqrt(a)` and `gamma -> -sqrt(a)`.
#[derive(Debug)]
pub struct MaximalSplit {
    pub tower: Tower,
    pub sqrt_square: Scalar,
    clifford_slot: usize,
}

impl MaximalSplit {
    pub fn member_plus(&self, m: &DixmierMorphism, u: &PBWElement) -> bool {
        m.evaluate(u)
            .eval_clifford(self.clifford_slot, &self.sqrt_square)
            .is_zero()
    }

    pub fn member_minus(&self, m: &DixmierMorphism, u: &PBWElement) -> bool {
        m.evaluate(u)
            .eval_clifford(self.clifford_slot, &self.sqrt_square.neg())
            .is_zero()
    }
}

/// Split the kernel into the two maximal ideals of the underlying algebra
/// when the Clifford rank is odd; report maximality otherwise. The
/// returned oracles are checked on the degree-3 slice: the parity
/// automorphism swaps them, both contain the kernel, and their
/// intersection equals the kernel slice.
pub fn split_maximal(m: &DixmierMorphism) -> Result<SplitOutcome> {
    if m.q.is_multiple_of(2) {
        if !supercenter_is_scalars(&m.target, 2) {
            return Err(Error::Hypothesis("supercenter check failed".into()));
        }
        if !matrix_part_center_is_scalars(&m.target) {
            return Err(Error::Hypothesis(
                "matrix part has a nontrivial center".into(),
            ));
        }
        return Ok(SplitOutcome::AlreadyMaximal);
    }
    let slot = m
        .target
        .factors
        .iter()
        .position(|f| matches!(f, Factor::Clifford { .. }))
        .expect("odd rank has a terminal Clifford factor");
    let Factor::Clifford { square } = &m.target.factors[slot] else {
        unreachable!()
    };
    let (tower, root) = m.tower.adjoin_sqrt(square)?;
    let split = MaximalSplit {
        tower: tower.clone(),
        sqrt_square: root,
        clifford_slot: slot,
    };
    // slice checks at degree 3
    let (monos, kernel) = m.kernel_slice(3);
    let eval_side = |sign: i32, mono: &Exponents| -> TargetElement {
        let img = m.evaluate(&PBWElement::from_terms(&m.source, {
            let mut t = crate::superlie::TermMap::new();
            t.insert(mono.clone(), tower.one());
            t
        }));
        let v = if sign > 0 {
            split.sqrt_square.clone()
        } else {
            split.sqrt_square.neg()
        };
        img.eval_clifford(slot, &v)
    };
    let (_, ker_plus) = kernel_of_map(&monos, &tower, |mm| eval_side(1, mm));
    let (_, ker_minus) = kernel_of_map(&monos, &tower, |mm| eval_side(-1, mm));
    // both contain the kernel slice
    for r in 0..kernel.rows {
        if !ker_plus.row_space_contains(&kernel.row(r))
            || !ker_minus.row_space_contains(&kernel.row(r))
        {
            return Err(Error::Hypothesis(
                "a kernel element escaped one of the split oracles".into(),
            ));
        }
    }
    // the parity automorphism swaps the two oracles: apply sigma on
    // monomial coefficients
    let sigma_rows: Vec<Vec<Scalar>> = (0..ker_minus.rows)
        .map(|r| {
            monos
                .iter()
                .enumerate()
                .map(|(i, mono)| {
                    let c = ker_minus.at(r, i);
                    match crate::pbw::monomial_parity(&m.source, mono) {
                        Parity::Even => c.clone(),
                        Parity::Odd => c.neg(),
                    }
                })
                .collect()
        })
        .collect();
    let sigma_minus = Matrix::from_rows(&tower, sigma_rows);
    if !sigma_minus.same_row_space(&ker_plus) {
        return Err(Error::Hypothesis(
            "parity automorphism does not swap the split oracles".into(),
        ));
    }
    // intersection equals the kernel slice
    let inter = ker_plus.intersect_rows(&ker_minus);
    if !inter.same_row_space(&kernel) {
        return Err(Error::Hypothesis(
            "intersection of the split oracles differs from the kernel".into(),
        ));
    }
    Ok(SplitOutcome::Split(split))
}

/// Independent construction of the split through an enlarged subordinate
/// subalgebra: find `c` odd with `λ([c, c]) = 2` and `λ([c, h]) = 0`, and
/// check on the degree-3 slice that the two character left ideals of
/// `U(g)` intersect exactly in the one attached to the polarization.
pub fn split_cross_check(alg: &Arc<SuperLieAlgebra>, lambda: &[Scalar]) -> Result<()> {
    let pol = polarize(alg, lambda)?;
    let tower0 = pol.tower.clone();
    let lf = lambda_form(alg, lambda)?;
    let perp = lf.form.perp(&pol.subspace)?;
    // an odd direction orthogonal to the polarization with nonzero square
    let mut candidate = None;
    for r in 0..perp.odd.rows {
        let v = perp.odd.row(r);
        let sq = lambda_eval(lambda, &alg.bracket(&v, &v));
        if !sq.is_zero() {
            candidate = Some((v, sq));
            break;
        }
    }
    let Some((v, sq)) = candidate else {
        return Err(Error::Hypothesis(
            "no odd direction with nonzero square; the Clifford rank is even".into(),
        ));
    };
    let (tower, scale) = tower0.adjoin_sqrt(&tower0.int(2).div(&sq)?)?;
    let c: Vec<Scalar> = v.iter().map(|x| x.mul(&scale)).collect();
    // [c, c] must land inside the polarization
    let cc = alg.bracket(&c, &c);
    if !pol.subspace.contains_general(&cc) {
        return Err(Error::Hypothesis(
            "the square of the split direction escapes the polarization".into(),
        ));
    }
    // h-hat = h + k c, with characters c -> +1 and c -> -1
    let mut hh_vectors: Vec<Vec<Scalar>> = pol.subspace.basis().iter().map(|(v, _)| v.clone()).collect();
    hh_vectors.push(c.clone());
    let hhat = GradedSubspace::from_vectors(&tower, alg.parities(), &hh_vectors)?;
    // subalgebra check
    for (a, _) in hhat.basis() {
        for (b, _) in hhat.basis() {
            if !hhat.contains_general(&alg.bracket(&a, &b)) {
                return Err(Error::Hypothesis(
                    "enlarged subalgebra is not closed".into(),
                ));
            }
        }
    }
    // adapted presentations of U(g) with the tails last
    let mut tail: Vec<(Vec<Scalar>, Parity)> = pol.subspace.basis();
    let mut values: Vec<Scalar> = tail
        .iter()
        .map(|(v, _)| lambda_eval(lambda, v))
        .collect();
    let span_j = character_left_ideal_slice(alg, &tail, &values, &tower)?;
    tail.push((c.clone(), Parity::Odd));
    values.push(tower.one());
    let span_plus = character_left_ideal_slice(alg, &tail, &values, &tower)?;
    *values.last_mut().unwrap() = tower.int(-1);
    let span_minus = character_left_ideal_slice(alg, &tail, &values, &tower)?;
    let inter = span_plus.intersect_rows(&span_minus);
    if !inter.same_row_space(&span_j) {
        return Err(Error::Hypothesis(
            "character left ideals do not intersect in the subordinate one".into(),
        ));
    }
    Ok(())
}

/// Degree-3 slice of `U(g) J` where `J` is the kernel of the character of
/// the tail subalgebra with the given values on its basis. Rows are
/// coefficient vectors over the degree-3 monomials of the original
/// presentation.
fn character_left_ideal_slice(
    alg: &Arc<SuperLieAlgebra>,
    tail: &[(Vec<Scalar>, Parity)],
    values: &[Scalar],
    tower: &Tower,
) -> Result<Matrix> {
    const DEG: usize = 3;
    let n = alg.dim();
    // adapted basis: complement first, then the tail basis
    let stacked = Matrix::from_rows_dim(
        tower,
        tail.iter().map(|(v, _)| v.clone()).collect(),
        n,
    );
    let (_, pivots) = stacked.rref();
    let mut new_basis: Vec<(Vec<Scalar>, Parity)> = Vec::new();
    for i in 0..n {
        if !pivots.contains(&i) {
            new_basis.push((alg.basis_vector(i), alg.parity_of(i)));
        }
    }
    let complement_len = new_basis.len();
    for (v, p) in tail {
        new_basis.push((v.clone(), *p));
    }
    if new_basis.len() != n {
        return Err(Error::DimensionMismatch(
            "subalgebra does not complete to a basis".into(),
        ));
    }
    let rb = alg.rebase(&new_basis)?;
    let adapted = rb.algebra.clone();
    // J-slice basis: tail monomials minus their character values
    let tail_alg_monos: Vec<Exponents> = monomials_up_to(&adapted, DEG)
        .into_iter()
        .filter(|m| m[..complement_len].iter().all(|&e| e == 0))
        .collect();
    // span of m_alpha * (tail - value): assembled directly in adapted
    // coordinates since complement-first concatenation is already normal
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    let monos = monomials_up_to(&adapted, DEG);
    let index: BTreeMap<Exponents, usize> = monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let comp_monos: Vec<Exponents> = monos
        .iter()
        .filter(|m| m[complement_len..].iter().all(|&e| e == 0))
        .cloned()
        .collect();
    for tail in &tail_alg_monos {
        let tail_deg: u32 = tail.iter().sum();
        if tail_deg == 0 {
            continue;
        }
        let mut value = tower.one();
        for (i, &e) in tail[complement_len..].iter().enumerate() {
            for _ in 0..e {
                value = value.mul(&values[i]);
            }
        }
        for comp in &comp_monos {
            let comp_deg: u32 = comp.iter().sum();
            if comp_deg + tail_deg > DEG as u32 {
                continue;
            }
            let mut row = vec![tower.zero(); monos.len()];
            let mut concat = comp.clone();
            for i in complement_len..n {
                concat[i] = tail[i];
            }
            row[index[&concat]] = tower.one();
            row[index[comp]] = row[index[comp]].sub(&value);
            rows.push(row);
        }
    }
    // convert adapted monomials into original-presentation coordinates
    let back_images: Vec<PBWElement> = (0..n)
        .map(|j| PBWElement::from_vector(alg, &new_basis[j].0))
        .collect();
    let orig_monos = monomials_up_to(alg, DEG);
    let orig_index: BTreeMap<Exponents, usize> = orig_monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let mut out_rows = Vec::new();
    for row in rows {
        let mut elem = PBWElement::zero(alg);
        for (i, c) in row.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let adapted_elem = PBWElement::from_terms(&adapted, {
                let mut t = crate::superlie::TermMap::new();
                t.insert(monos[i].clone(), c.clone());
                t
            });
            elem = elem.add(&adapted_elem.map_generators(alg, &back_images));
        }
        let mut v = vec![tower.zero(); orig_monos.len()];
        for (m, c) in elem.terms() {
            v[orig_index[m]] = c.clone();
        }
        out_rows.push(v);
    }
    Ok(Matrix::from_rows_dim(tower, out_rows, orig_monos.len()).rref().0)
}

/// Report of the even-part compatibility check: the kernel restricted to
/// the even enveloping algebra sits inside the even kernel.
pub fn even_part_ideal_check(m: &DixmierMorphism, m0: &DixmierMorphism) -> Result<()> {
    let (even_alg, even_idx) = m.source.even_subalgebra();
    if m0.source.labels() != even_alg.labels() || m0.source.parities() != even_alg.parities() {
        return Err(Error::AlgebraMismatch);
    }
    let even_alg = m0.source.clone();
    let monos: Vec<Exponents> = monomials_up_to(&m.source, 3)
        .into_iter()
        .filter(|mm| {
            mm.iter()
                .enumerate()
                .all(|(i, &e)| e == 0 || m.source.parity_of(i) == Parity::Even)
        })
        .collect();
    let (monos, kernel) = {
        let tower = m.tower.clone();
        kernel_of_map(&monos, &tower, |mm| {
            m.evaluate(&PBWElement::from_terms(&m.source, {
                let mut t = crate::superlie::TermMap::new();
                t.insert(mm.clone(), tower.one());
                t
            }))
        })
    };
    for r in 0..kernel.rows {
        // re-express over the even presentation
        let mut t = crate::superlie::TermMap::new();
        for (i, mono) in monos.iter().enumerate() {
            let c = kernel.at(r, i);
            if c.is_zero() {
                continue;
            }
            let small: Exponents = even_idx.iter().map(|&g| mono[g]).collect();
            t.insert(small, c.clone());
        }
        let elem = PBWElement::from_terms(&even_alg, t);
        if !m0.member(&elem) {
            return Err(Error::Hypothesis(format!(
                "even slice element escapes the even kernel: {}",
                elem.render()
            )));
        }
    }
    Ok(())
}

/// The canonical Clifford--Weyl presentation: `q` pairwise anticommuting
/// odd generators squaring to one, tensored with the Weyl factors.
pub mod canonical {
    use super::*;

    /// Element of `Cliff_q ⊗ A_p`: Weyl exponents per pair and a subset
    /// mask of Clifford generators.
    #[derive(Debug, Clone, PartialEq)]
    pub struct CanonElement {
        pub p: usize,
        pub q: usize,
        pub terms: BTreeMap<(Vec<(u32, u32)>, u64), Scalar>,
    }

    impl CanonElement {
        pub fn zero(p: usize, q: usize) -> Self {
            CanonElement {
                p,
                q,
                terms: BTreeMap::new(),
            }
        }

        pub fn one(p: usize, q: usize, tower: &Tower) -> Self {
            let mut out = Self::zero(p, q);
            out.terms.insert((vec![(0, 0); p], 0), tower.one());
            out
        }

        pub fn generator_e(p: usize, q: usize, i: usize, tower: &Tower) -> Self {
            let mut out = Self::zero(p, q);
            out.terms.insert((vec![(0, 0); p], 1u64 << i), tower.one());
            out
        }

        pub fn generator_weyl(p: usize, q: usize, pair: usize, is_p: bool, tower: &Tower) -> Self {
            let mut out = Self::zero(p, q);
            let mut w = vec![(0, 0); p];
            if is_p {
                w[pair] = (0, 1);
            } else {
                w[pair] = (1, 0);
            }
            out.terms.insert((w, 0), tower.one());
            out
        }

        pub fn is_zero(&self) -> bool {
            self.terms.is_empty()
        }

        fn add_term(&mut self, m: (Vec<(u32, u32)>, u64), c: Scalar) {
            if c.is_zero() {
                return;
            }
            match self.terms.get_mut(&m) {
                Some(slot) => {
                    *slot = slot.add(&c);
                    if slot.is_zero() {
                        self.terms.remove(&m);
                    }
                }
                None => {
                    self.terms.insert(m, c);
                }
            }
        }

        pub fn add(&self, other: &CanonElement) -> CanonElement {
            let mut out = self.clone();
            for (m, c) in &other.terms {
                out.add_term(m.clone(), c.clone());
            }
            out
        }

        pub fn neg(&self) -> CanonElement {
            CanonElement {
                p: self.p,
                q: self.q,
                terms: self
                    .terms
                    .iter()
                    .map(|(m, c)| (m.clone(), c.neg()))
                    .collect(),
            }
        }

        pub fn sub(&self, other: &CanonElement) -> CanonElement {
            self.add(&other.neg())
        }

        pub fn scale(&self, c: &Scalar) -> CanonElement {
            if c.is_zero() {
                return CanonElement::zero(self.p, self.q);
            }
            CanonElement {
                p: self.p,
                q: self.q,
                terms: self
                    .terms
                    .iter()
                    .map(|(m, k)| (m.clone(), k.mul(c)))
                    .collect(),
            }
        }

        pub fn mul(&self, other: &CanonElement, tower: &Tower) -> CanonElement {
            let mut out = CanonElement::zero(self.p, self.q);
            for ((wa, sa), ca) in &self.terms {
                for ((wb, sb), cb) in &other.terms {
                    // Clifford sign: move each generator of sb left past the
                    // generators of sa with larger index
                    let mut swaps = 0u32;
                    for j in 0..64u32 {
                        if sb & (1u64 << j) != 0 {
                            let higher = sa >> (j + 1);
                            swaps += higher.count_ones();
                        }
                    }
                    let mask = sa ^ sb;
                    let mut coeff = ca.mul(cb);
                    if swaps % 2 == 1 {
                        coeff = coeff.neg();
                    }
                    // Weyl factors, [q, p] = 1
                    let mut partial: Vec<(Vec<(u32, u32)>, Scalar)> =
                        vec![(Vec::with_capacity(self.p), coeff)];
                    for i in 0..self.p {
                        let (a1, b1) = wa[i];
                        let (a2, b2) = wb[i];
                        let mut next = Vec::new();
                        for j in 0..=b1.min(a2) {
                            let mut c2 = BigRational::from_integer(
                                binom(b1, j) * binom(a2, j),
                            ) * factorial(j);
                            if j % 2 == 1 {
                                c2 = -c2;
                            }
                            for (w, cc) in &partial {
                                let mut ww = w.clone();
                                ww.push((a1 + a2 - j, b1 + b2 - j));
                                next.push((ww, cc.mul(&tower.rational(c2.clone()))));
                            }
                        }
                        partial = next;
                    }
                    for (w, c) in partial {
                        out.add_term((w, mask), c);
                    }
                }
            }
            out
        }
    }

    /// A canonicalization certificate: images of the target generators in
    /// the canonical presentation and back, verified on the relations.
    #[derive(Debug)]
    pub struct Canonicalization {
        pub p: usize,
        pub q: usize,
        pub tower: Tower,
        /// canonical Clifford generators expressed in the target
        pub e_images: Vec<TargetElement>,
        /// target generator names mapped into the canonical presentation
        pub forward: BTreeMap<String, CanonElement>,
    }

    /// Rewrite the factored target as the canonical presentation,
    /// adjoining the imaginary unit for each matrix factor and the root
    /// of the terminal Clifford square. Verified on relations both ways.
    pub fn canonicalize_clifford(target: &Arc<FactoredTarget>) -> Result<Canonicalization> {
        let p = target
            .factors
            .iter()
            .filter(|f| matches!(f, Factor::Weyl))
            .count();
        let q: usize = target
            .factors
            .iter()
            .map(|f| match f {
                Factor::Matrix2 => 2,
                Factor::Clifford { .. } => 1,
                Factor::Weyl => 0,
            })
            .sum();
        let mut tower = target.tower.clone();
        let mut e_images: Vec<TargetElement> = Vec::new();
        let mut forward: BTreeMap<String, CanonElement> = BTreeMap::new();
        let names = target.factor_names();
        let mut e_count = 0usize;
        let mut weyl_count = 0usize;
        for (slot, f) in target.factors.iter().enumerate() {
            match f {
                Factor::Weyl => {
                    forward.insert(
                        format!("{}.q", names[slot]),
                        CanonElement::generator_weyl(p, q, weyl_count, false, &tower),
                    );
                    forward.insert(
                        format!("{}.p", names[slot]),
                        CanonElement::generator_weyl(p, q, weyl_count, true, &tower),
                    );
                    weyl_count += 1;
                }
                Factor::Matrix2 => {
                    let (t2, i_unit) = tower.adjoin_sqrt(&tower.int(-1))?;
                    tower = t2;
                    let e12 = TargetElement::factor_generator(target, slot, FactorMono::Mat(1));
                    let e21 = TargetElement::factor_generator(target, slot, FactorMono::Mat(2));
                    // e1 = e12 + e21, e2 = -i e12 + i e21
                    let e1 = e12.add(&e21);
                    let e2 = e12.scale(&i_unit.neg()).add(&e21.scale(&i_unit));
                    e_images.push(e1);
                    e_images.push(e2);
                    // E12 = (e1 + i e2)/2, E21 = (e1 - i e2)/2
                    let ea = CanonElement::generator_e(p, q, e_count, &tower);
                    let eb = CanonElement::generator_e(p, q, e_count + 1, &tower);
                    let half = tower.rat(1, 2);
                    let f12 = ea.add(&eb.scale(&i_unit)).scale(&half);
                    let f21 = ea.sub(&eb.scale(&i_unit)).scale(&half);
                    let f11 = f12.mul(&f21, &tower);
                    let f22 = CanonElement::one(p, q, &tower).sub(&f11);
                    forward.insert(format!("{}.e12", names[slot]), f12);
                    forward.insert(format!("{}.e21", names[slot]), f21);
                    forward.insert(format!("{}.e11", names[slot]), f11);
                    forward.insert(format!("{}.e22", names[slot]), f22);
                    e_count += 2;
                }
                Factor::Clifford { square } => {
                    let (t2, root) = tower.adjoin_sqrt(square)?;
                    tower = t2;
                    // e = gamma / sqrt(a), gamma = sqrt(a) e
                    let gamma =
                        TargetElement::factor_generator(target, slot, FactorMono::Cliff(true));
                    e_images.push(gamma.scale(&root.inv()?));
                    forward.insert(
                        format!("{}.g", names[slot]),
                        CanonElement::generator_e(p, q, e_count, &tower).scale(&root),
                    );
                    e_count += 1;
                }
            }
        }
        // verify canonical relations on the images inside the target
        let one = TargetElement::one(target);
        for i in 0..e_images.len() {
            let sq = e_images[i].mul(&e_images[i]);
            if sq != one {
                return Err(Error::Hypothesis(format!(
                    "canonical generator {} does not square to one",
                    i
                )));
            }
            for j in 0..i {
                let anti = e_images[i]
                    .mul(&e_images[j])
                    .add(&e_images[j].mul(&e_images[i]));
                if !anti.is_zero() {
                    return Err(Error::Hypothesis(format!(
                        "canonical generators {} and {} do not anticommute",
                        i, j
                    )));
                }
            }
        }
        // verify the target relations on the forward images
        let mut mat_ord = 0usize;
        for (slot, f) in target.factors.iter().enumerate() {
            match f {
                Factor::Matrix2 => {
                    mat_ord += 1;
                    let g = |unit: &str| forward[&format!("M{}.{}", mat_ord, unit)].clone();
                    let id = CanonElement::one(p, q, &tower);
                    if g("e11").add(&g("e22")) != id {
                        return Err(Error::Hypothesis("unit sum failed".into()));
                    }
                    if !g("e12").mul(&g("e12"), &tower).is_zero()
                        || !g("e21").mul(&g("e21"), &tower).is_zero()
                    {
                        return Err(Error::Hypothesis("nilpotence of off-diagonals failed".into()));
                    }
                    if g("e12").mul(&g("e21"), &tower) != g("e11") {
                        return Err(Error::Hypothesis("unit product failed".into()));
                    }
                    let _ = slot;
                }
                Factor::Clifford { square } => {
                    let g = forward["C.g"].clone();
                    let sq = g.mul(&g, &tower);
                    let expect = CanonElement::one(p, q, &tower).scale(square);
                    if sq != expect {
                        return Err(Error::Hypothesis("clifford square failed".into()));
                    }
                }
                Factor::Weyl => {}
            }
        }
        Ok(Canonicalization {
            p,
            q,
            tower,
            e_images,
            forward,
        })
    }
}
