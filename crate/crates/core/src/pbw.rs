//! The enveloping algebra: PBW normal forms, graded multiplication with
//! Koszul signs, the principal antiautomorphism, the parity automorphism,
//! the adjoint action and reduction modulo the left ideal attached to a
//! subordinate subalgebra.
//!
//! Monomials are exponent vectors over the algebra's declared basis order;
//! odd exponents never exceed one. Straightening rewrites an out-of-order
//! adjacent pair `x_j x_i` (j > i) to `(-1)^{|i||j|} x_i x_j + [x_j, x_i]`
//! and an odd square `x x` to `[x, x]/2`, both filtration decreasing, so
//! the rewriting terminates.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::{GradedSubspace, Matrix, Parity};
use crate::scalar::Scalar;
use crate::superlie::{lambda_eval, Exponents, SuperLieAlgebra, TermMap};

/// An element of `U(g)` in PBW normal form.
#[derive(Debug, Clone)]
pub struct PBWElement {
    algebra: Arc<SuperLieAlgebra>,
    terms: TermMap,
}

impl PartialEq for PBWElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) && self.terms == other.terms
    }
}

fn half() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(2))
}

impl PBWElement {
    pub fn zero(alg: &Arc<SuperLieAlgebra>) -> Self {
        PBWElement {
            algebra: alg.clone(),
            terms: TermMap::new(),
        }
    }

    pub fn one(alg: &Arc<SuperLieAlgebra>) -> Self {
        Self::scalar(alg, alg.tower().one())
    }

    pub fn scalar(alg: &Arc<SuperLieAlgebra>, c: Scalar) -> Self {
        let mut terms = TermMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; alg.dim()], c);
        }
        PBWElement {
            algebra: alg.clone(),
            terms,
        }
    }

    pub fn generator(alg: &Arc<SuperLieAlgebra>, i: usize) -> Self {
        let mut m = vec![0u32; alg.dim()];
        m[i] = 1;
        let mut terms = TermMap::new();
        terms.insert(m, alg.tower().one());
        PBWElement {
            algebra: alg.clone(),
            terms,
        }
    }

    /// Degree-one element from a coordinate vector.
    pub fn from_vector(alg: &Arc<SuperLieAlgebra>, v: &[Scalar]) -> Self {
        let mut terms = TermMap::new();
        for (i, c) in v.iter().enumerate() {
            if !c.is_zero() {
                let mut m = vec![0u32; alg.dim()];
                m[i] = 1;
                terms.insert(m, c.clone());
            }
        }
        PBWElement {
            algebra: alg.clone(),
            terms,
        }
    }

    pub fn from_terms(alg: &Arc<SuperLieAlgebra>, terms: TermMap) -> Self {
        let mut t = terms;
        t.retain(|_, c| !c.is_zero());
        PBWElement {
            algebra: alg.clone(),
            terms: t,
        }
    }

    pub fn algebra(&self) -> &Arc<SuperLieAlgebra> {
        &self.algebra
    }

    pub fn terms(&self) -> &TermMap {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Exponents) -> Scalar {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| self.algebra.tower().zero())
    }

    /// Filtration degree: the largest total exponent in the support.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Parity when the element is homogeneous.
    pub fn parity(&self) -> Option<Parity> {
        let mut par = None;
        for m in self.terms.keys() {
            let p = monomial_parity(&self.algebra, m);
            match par {
                None => par = Some(p),
                Some(q) if q == p => {}
                _ => return None,
            }
        }
        par
    }

    /// Homogeneous components `(even part, odd part)`.
    pub fn parity_split(&self) -> (PBWElement, PBWElement) {
        let mut even = TermMap::new();
        let mut odd = TermMap::new();
        for (m, c) in &self.terms {
            match monomial_parity(&self.algebra, m) {
                Parity::Even => even.insert(m.clone(), c.clone()),
                Parity::Odd => odd.insert(m.clone(), c.clone()),
            };
        }
        (
            PBWElement::from_terms(&self.algebra, even),
            PBWElement::from_terms(&self.algebra, odd),
        )
    }

    pub fn add(&self, other: &PBWElement) -> PBWElement {
        assert!(
            Arc::ptr_eq(&self.algebra, &other.algebra),
            "elements of different algebras"
        );
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        PBWElement {
            algebra: self.algebra.clone(),
            terms,
        }
    }

    pub fn sub(&self, other: &PBWElement) -> PBWElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PBWElement {
        PBWElement {
            algebra: self.algebra.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> PBWElement {
        if c.is_zero() {
            return PBWElement::zero(&self.algebra);
        }
        PBWElement {
            algebra: self.algebra.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k.mul(c)))
                .collect(),
        }
    }

    pub fn scale_rat(&self, q: &BigRational) -> PBWElement {
        self.scale(&self.algebra.tower().rational(q.clone()))
    }

    /// Straightened product.
    pub fn mul(&self, other: &PBWElement) -> PBWElement {
        if !Arc::ptr_eq(&self.algebra, &other.algebra) {
            panic!("elements of different algebras");
        }
        let mut acc = TermMap::new();
        for (mv, cv) in &other.terms {
            // self * monomial: fold the generators of mv into each term
            let mut partial: TermMap = self.terms.clone();
            for (g, &e) in mv.iter().enumerate() {
                for _ in 0..e {
                    partial = terms_mul_gen(&self.algebra, &partial, g);
                }
            }
            for (m, c) in partial {
                add_term(&mut acc, m, c.mul(cv));
            }
        }
        PBWElement::from_terms(&self.algebra, acc)
    }

    /// Principal antiautomorphism: `x -> -x` on generators, reversal with
    /// the sign `(-1)^{n + sum_{i<j} |x_i||x_j|}` on monomials.
    pub fn alpha(&self) -> PBWElement {
        let alg = &self.algebra;
        let mut acc = PBWElement::zero(alg);
        for (m, c) in &self.terms {
            let word = monomial_word(m);
            let n = word.len();
            let odd_count = word
                .iter()
                .filter(|&&g| alg.parity_of(g) == Parity::Odd)
                .count();
            // pairs i < j with both letters odd
            let sign_exp = n + odd_count * (odd_count.saturating_sub(1)) / 2;
            let mut prod = TermMap::new();
            prod.insert(vec![0; alg.dim()], alg.tower().one());
            for &g in word.iter().rev() {
                prod = terms_mul_gen(alg, &prod, g);
            }
            let mut piece = PBWElement::from_terms(alg, prod).scale(c);
            if sign_exp % 2 == 1 {
                piece = piece.neg();
            }
            acc = acc.add(&piece);
        }
        acc
    }

    /// Parity automorphism `Σ`: negate odd components.
    pub fn sigma(&self) -> PBWElement {
        let mut terms = TermMap::new();
        for (m, c) in &self.terms {
            let c = match monomial_parity(&self.algebra, m) {
                Parity::Even => c.clone(),
                Parity::Odd => c.neg(),
            };
            terms.insert(m.clone(), c);
        }
        PBWElement::from_terms(&self.algebra, terms)
    }

    /// Apply an algebra morphism determined by generator images. The
    /// target may be a different algebra (quotients, basis changes).
    pub fn map_generators(
        &self,
        target: &Arc<SuperLieAlgebra>,
        images: &[PBWElement],
    ) -> PBWElement {
        assert_eq!(images.len(), self.algebra.dim());
        let mut acc = PBWElement::zero(target);
        for (m, c) in &self.terms {
            let mut prod = PBWElement::scalar(target, c.clone());
            for &g in &monomial_word(m) {
                prod = prod.mul(&images[g]);
            }
            acc = acc.add(&prod);
        }
        acc
    }

    /// Render using the element grammar: terms sorted degree-descending.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&Exponents> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then(a.cmp(b))
        });
        let mut out = String::new();
        for (idx, m) in keys.iter().enumerate() {
            let c = &self.terms[*m];
            let cs = self.algebra.tower().format(c);
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !cs.contains(" - ") && !cs.contains(" + ") => {
                    (true, rest.to_string())
                }
                _ => (false, cs.clone()),
            };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut parts = Vec::new();
            let needs_coeff = mag != "1" || m.iter().all(|&e| e == 0);
            if needs_coeff {
                if mag.contains(" + ") || mag.contains(" - ") {
                    parts.push(format!("({})", mag));
                } else {
                    parts.push(mag);
                }
            }
            for (g, &e) in m.iter().enumerate() {
                if e == 1 {
                    parts.push(self.algebra.labels()[g].clone());
                } else if e > 1 {
                    parts.push(format!("{}^{}", self.algebra.labels()[g], e));
                }
            }
            out.push_str(&parts.join("*"));
        }
        out
    }
}

fn add_term(acc: &mut TermMap, m: Exponents, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&m) {
        Some(slot) => {
            *slot = slot.add(&c);
            if slot.is_zero() {
                acc.remove(&m);
            }
        }
        None => {
            acc.insert(m, c);
        }
    }
}

pub(crate) fn monomial_parity(alg: &SuperLieAlgebra, m: &Exponents) -> Parity {
    let mut odd = 0u32;
    for (g, &e) in m.iter().enumerate() {
        if alg.parity_of(g) == Parity::Odd {
            odd += e;
        }
    }
    if odd.is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

/// Generator word of a monomial, in basis order with multiplicity.
pub fn monomial_word(m: &Exponents) -> Vec<usize> {
    let mut w = Vec::new();
    for (g, &e) in m.iter().enumerate() {
        for _ in 0..e {
            w.push(g);
        }
    }
    w
}

/// Multiply a term map by a single generator on the right, straightening.
fn terms_mul_gen(alg: &Arc<SuperLieAlgebra>, terms: &TermMap, g: usize) -> TermMap {
    let mut acc = TermMap::new();
    for (m, c) in terms {
        let prod = monomial_mul_gen(alg, m, g);
        for (mm, cc) in prod {
            add_term(&mut acc, mm, cc.mul(c));
        }
    }
    acc
}

/// `monomial * b_g` in normal form; memoized per algebra.
fn monomial_mul_gen(alg: &Arc<SuperLieAlgebra>, m: &Exponents, g: usize) -> TermMap {
    if let Some(hit) = alg
        .straighten_memo
        .lock()
        .unwrap()
        .get(&(m.clone(), g))
        .cloned()
    {
        return hit;
    }
    let result = monomial_mul_gen_uncached(alg, m, g);
    alg.straighten_memo
        .lock()
        .unwrap()
        .insert((m.clone(), g), result.clone());
    result
}

fn monomial_mul_gen_uncached(alg: &Arc<SuperLieAlgebra>, m: &Exponents, g: usize) -> TermMap {
    let tower = alg.tower().clone();
    let mut out = TermMap::new();
    let last = m
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &e)| e > 0)
        .map(|(i, _)| i);
    match last {
        None => {
            let mut mm = m.clone();
            mm[g] = 1;
            out.insert(mm, tower.one());
            out
        }
        Some(a) if a < g => {
            let mut mm = m.clone();
            mm[g] += 1;
            out.insert(mm, tower.one());
            out
        }
        Some(a) if a == g => {
            if alg.parity_of(g) == Parity::Even {
                let mut mm = m.clone();
                mm[g] += 1;
                out.insert(mm, tower.one());
                out
            } else {
                // odd square: prefix * [g, g]/2
                let mut prefix = m.clone();
                prefix[g] = 0;
                let bracket = alg.bracket_basis(g, g).to_vec();
                let half_bracket =
                    PBWElement::from_vector(alg, &bracket).scale_rat(&half());
                let prefix_elem = PBWElement::from_terms(alg, {
                    let mut t = TermMap::new();
                    t.insert(prefix, tower.one());
                    t
                });
                prefix_elem.mul(&half_bracket).terms
            }
        }
        Some(a) => {
            // a > g: swap past the last letter
            let mut prefix = m.clone();
            prefix[a] -= 1;
            let sign = alg.parity_of(a).koszul(alg.parity_of(g));
            // (prefix * b_g) * b_a with the Koszul sign
            let pg = monomial_mul_gen(alg, &prefix, g);
            let mut swapped = TermMap::new();
            for (mm, cc) in &pg {
                for (mmm, ccc) in monomial_mul_gen(alg, mm, a) {
                    let mut val = ccc.mul(cc);
                    if sign < 0 {
                        val = val.neg();
                    }
                    add_term(&mut swapped, mmm, val);
                }
            }
            // + prefix * [b_a, b_g]
            let bracket = alg.bracket_basis(a, g).to_vec();
            let prefix_elem = PBWElement::from_terms(alg, {
                let mut t = TermMap::new();
                t.insert(prefix, tower.one());
                t
            });
            let corr = prefix_elem.mul(&PBWElement::from_vector(alg, &bracket));
            for (mm, cc) in corr.terms {
                add_term(&mut swapped, mm, cc);
            }
            swapped
        }
    }
}

/// Apply the super-derivation with the given degree and generator images:
/// `d(uv) = d(u) v + (-1)^{|d||u|} u d(v)`.
pub fn apply_derivation(
    u: &PBWElement,
    degree: Parity,
    images: &[PBWElement],
) -> PBWElement {
    let alg = u.algebra().clone();
    assert_eq!(images.len(), alg.dim());
    let mut acc = PBWElement::zero(&alg);
    for (m, c) in u.terms() {
        let word = monomial_word(m);
        let mut prefix_parity = Parity::Even;
        for (pos, &g) in word.iter().enumerate() {
            // prefix * d(b_g) * suffix, with the sign for moving d past the prefix
            let mut piece = PBWElement::scalar(&alg, c.clone());
            for &h in &word[..pos] {
                piece = piece.mul(&PBWElement::generator(&alg, h));
            }
            piece = piece.mul(&images[g]);
            for &h in &word[pos + 1..] {
                piece = piece.mul(&PBWElement::generator(&alg, h));
            }
            if degree == Parity::Odd && prefix_parity == Parity::Odd {
                piece = piece.neg();
            }
            acc = acc.add(&piece);
            prefix_parity = prefix_parity.plus(alg.parity_of(g));
        }
    }
    acc
}

/// Adjoint action `ad(x)(u)` for `x` given by a coordinate vector.
pub fn ad_action(x: &[Scalar], u: &PBWElement) -> PBWElement {
    let alg = u.algebra().clone();
    let n = alg.dim();
    assert_eq!(x.len(), n);
    let tower = alg.tower().clone();
    let mut acc = PBWElement::zero(&alg);
    for p in [Parity::Even, Parity::Odd] {
        let mut xp = vec![tower.zero(); n];
        let mut nonzero = false;
        for i in 0..n {
            if alg.parity_of(i) == p && !x[i].is_zero() {
                xp[i] = x[i].clone();
                nonzero = true;
            }
        }
        if !nonzero {
            continue;
        }
        let images: Vec<PBWElement> = (0..n)
            .map(|j| PBWElement::from_vector(&alg, &alg.bracket(&xp, &alg.basis_vector(j))))
            .collect();
        acc = acc.add(&apply_derivation(u, p, &images));
    }
    acc
}

/// Structure morphism of the adjoint representation on elements:
/// `ad(u)(v)` for `u` in `U(g)`, acting monomial by monomial through
/// composition of generator actions.
pub fn ad_action_element(u: &PBWElement, v: &PBWElement) -> PBWElement {
    let alg = u.algebra().clone();
    assert!(Arc::ptr_eq(&alg, v.algebra()));
    let mut acc = PBWElement::zero(&alg);
    for (m, c) in u.terms() {
        let word = monomial_word(m);
        let mut val = v.clone();
        for &g in word.iter().rev() {
            val = ad_action(&alg.basis_vector(g), &val);
        }
        acc = acc.add(&val.scale(c));
    }
    acc
}

/// Adjoint action confined to the enveloping algebra of an ideal: checks
/// `[x, k] ⊆ k` before acting.
pub fn ad_action_confined(x: &[Scalar], u: &PBWElement, k: &GradedSubspace) -> Result<PBWElement> {
    let alg = u.algebra();
    for (v, _) in k.basis() {
        let w = alg.bracket(x, &v);
        if !k.contains_general(&w) {
            return Err(Error::NotAnIdeal(
                "the acting element does not preserve the subspace".into(),
            ));
        }
    }
    Ok(ad_action(x, u))
}

/// All PBW exponent vectors of total degree `<= max_degree`, graded
/// lexicographic, odd caps respected.
pub fn monomials_up_to(alg: &SuperLieAlgebra, max_degree: usize) -> Vec<Exponents> {
    let n = alg.dim();
    let mut out: Vec<Exponents> = Vec::new();
    let mut stack: Vec<(Exponents, usize, usize)> = vec![(vec![0; n], 0, 0)];
    while let Some((m, pos, used)) = stack.pop() {
        if pos == n {
            out.push(m);
            continue;
        }
        let cap = if alg.parity_of(pos) == Parity::Odd {
            1
        } else {
            max_degree - used
        };
        for e in 0..=(cap.min(max_degree - used)) {
            let mut mm = m.clone();
            mm[pos] = e as u32;
            stack.push((mm, pos + 1, used + e));
        }
    }
    out.sort_by(|a, b| {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        da.cmp(&db).then(a.cmp(b))
    });
    out
}

/// Reduction context for the left ideal `U(g) J`, where `J` is the kernel
/// of the character of `U(h)` attached to a subordinate subalgebra `h`.
///
/// The basis is reordered complement-first, then the `h` variables; a
/// monomial reduces by evaluating its `h` tail through the character.
#[derive(Debug)]
pub struct SubordinateContext {
    pub original: Arc<SuperLieAlgebra>,
    pub adapted: Arc<SuperLieAlgebra>,
    /// adapted coords = fwd * original coords
    pub fwd: Matrix,
    pub complement_len: usize,
    /// original basis columns serving as the complement section
    pub complement_cols: Vec<usize>,
    /// character values on the h-part of the adapted basis
    pub h_values: Vec<Scalar>,
    gen_images: Vec<PBWElement>,
}

impl SubordinateContext {
    pub fn new(
        alg: &Arc<SuperLieAlgebra>,
        h: &GradedSubspace,
        lambda: &[Scalar],
    ) -> Result<Self> {
        let n = alg.dim();
        let tower = alg.tower().clone();
        for i in 0..n {
            if alg.parity_of(i) == Parity::Odd && !lambda[i].is_zero() {
                return Err(Error::InvalidFunctional(
                    "functionals vanish on odd generators".into(),
                ));
            }
        }
        // subordination: lambda([h, h]) = 0
        let hbasis = h.basis();
        for (v, _) in &hbasis {
            for (w, _) in &hbasis {
                if !lambda_eval(lambda, &alg.bracket(v, w)).is_zero() {
                    return Err(Error::NotSubordinate(
                        "lambda does not vanish on [h, h]".into(),
                    ));
                }
            }
        }
        // complement: standard basis vectors away from the pivots of h
        let stacked = h.even.stack(&h.odd);
        let (_, pivots) = stacked.rref();
        let mut new_basis: Vec<(Vec<Scalar>, Parity)> = Vec::new();
        let mut complement_cols = Vec::new();
        for i in 0..n {
            if !pivots.contains(&i) {
                new_basis.push((alg.basis_vector(i), alg.parity_of(i)));
                complement_cols.push(i);
            }
        }
        let complement_len = new_basis.len();
        for (v, p) in &hbasis {
            new_basis.push((v.clone(), *p));
        }
        if new_basis.len() != n {
            return Err(Error::DimensionMismatch(
                "subalgebra basis does not complete to a basis".into(),
            ));
        }
        let rebased = alg.rebase(&new_basis)?;
        let h_values: Vec<Scalar> = hbasis
            .iter()
            .map(|(v, _)| lambda_eval(lambda, v))
            .collect();
        let gen_images: Vec<PBWElement> = (0..n)
            .map(|j| {
                PBWElement::from_vector(
                    &rebased.algebra,
                    &rebased.fwd.mul_vec(&alg.basis_vector(j)),
                )
            })
            .collect();
        let _ = tower;
        Ok(SubordinateContext {
            original: alg.clone(),
            adapted: rebased.algebra,
            fwd: rebased.fwd,
            complement_len,
            complement_cols,
            h_values,
            gen_images,
        })
    }

    /// Express an element of the original presentation in the adapted one.
    pub fn to_adapted(&self, u: &PBWElement) -> PBWElement {
        assert!(Arc::ptr_eq(u.algebra(), &self.original));
        u.map_generators(&self.adapted, &self.gen_images)
    }

    /// Normal form modulo the left ideal: supported on complement
    /// monomials of the adapted presentation.
    pub fn reduce(&self, u: &PBWElement) -> PBWElement {
        self.reduce_adapted(&self.to_adapted(u))
    }

    pub fn reduce_adapted(&self, u: &PBWElement) -> PBWElement {
        assert!(Arc::ptr_eq(u.algebra(), &self.adapted));
        let n = self.adapted.dim();
        let mut out = TermMap::new();
        for (m, c) in u.terms() {
            let mut value = c.clone();
            let mut mm = m.clone();
            for i in self.complement_len..n {
                for _ in 0..m[i] {
                    value = value.mul(&self.h_values[i - self.complement_len]);
                }
                mm[i] = 0;
            }
            if !value.is_zero() {
                match out.get_mut(&mm) {
                    Some(slot) => {
                        *slot = slot.add(&value);
                        if slot.is_zero() {
                            out.remove(&mm);
                        }
                    }
                    None => {
                        out.insert(mm, value);
                    }
                }
            }
        }
        PBWElement::from_terms(&self.adapted, out)
    }

    /// Membership in the left ideal `U(g) J`.
    pub fn in_left_ideal(&self, u: &PBWElement) -> bool {
        self.reduce(u).is_zero()
    }
}

/// One-shot reduction, building the context on the fly.
pub fn reduce_mod_left_ideal(
    u: &PBWElement,
    h: &GradedSubspace,
    lambda: &[Scalar],
) -> Result<PBWElement> {
    let ctx = SubordinateContext::new(u.algebra(), h, lambda)?;
    Ok(ctx.reduce(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::GradedSubspace;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn straighten_heisenberg() {
        // order z < q < p, [q, p] = z: p * q = q p - z
        let alg = catalog::heisenberg3();
        let p = PBWElement::generator(&alg, 2);
        let q = PBWElement::generator(&alg, 1);
        let prod = p.mul(&q);
        let qp = q.mul(&p); // already normal
        let z = PBWElement::generator(&alg, 0);
        assert_eq!(prod, qp.sub(&z));
    }

    #[test]
    fn odd_squares() {
        // [c, c] = 0: c*c = 0
        let alg = catalog::odd11_null();
        let c = PBWElement::generator(&alg, 1);
        assert!(c.mul(&c).is_zero());
        // [c, c] = z: c*c = z/2
        let alg = catalog::odd11_clifford();
        let c = PBWElement::generator(&alg, 1);
        let z = PBWElement::generator(&alg, 0);
        assert_eq!(c.mul(&c), z.scale_rat(&half()));
    }

    #[test]
    fn alpha_is_an_antiautomorphism() {
        let alg = catalog::heisenberg3();
        let q = PBWElement::generator(&alg, 1);
        let p = PBWElement::generator(&alg, 2);
        // alpha(x) = -x on generators
        assert_eq!(q.alpha(), q.neg());
        // alpha(q p) = p q = q p - z
        let z = PBWElement::generator(&alg, 0);
        assert_eq!(q.mul(&p).alpha(), q.mul(&p).sub(&z));
        // odd pair: alpha(y1 y2) = -y2 y1
        let alg = catalog::super_heisenberg_hyperbolic();
        let c1 = PBWElement::generator(&alg, 1);
        let c2 = PBWElement::generator(&alg, 2);
        assert_eq!(c1.mul(&c2).alpha(), c2.mul(&c1).neg());
    }

    fn random_homogeneous(
        alg: &Arc<SuperLieAlgebra>,
        rng: &mut ChaCha8Rng,
        max_deg: usize,
    ) -> PBWElement {
        let monos = monomials_up_to(alg, max_deg);
        let target = if rng.gen_bool(0.5) {
            Parity::Even
        } else {
            Parity::Odd
        };
        let mut terms = TermMap::new();
        let mut tries = 0;
        while terms.len() < 3 && tries < 40 {
            tries += 1;
            let m = monos[rng.gen_range(0..monos.len())].clone();
            if monomial_parity(alg, &m) != target {
                continue;
            }
            let c = alg.tower().rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=3));
            if !c.is_zero() {
                terms.insert(m, c);
            }
        }
        PBWElement::from_terms(alg, terms)
    }

    #[test]
    fn associativity_randomized() {
        let algebras = [
            catalog::heisenberg3(),
            catalog::super_heisenberg_hyperbolic(),
            catalog::mixed31(),
            catalog::quot22(),
            catalog::odd13(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for round in 0..50 {
            let alg = &algebras[round % algebras.len()];
            let u = random_homogeneous(alg, &mut rng, 3);
            let v = random_homogeneous(alg, &mut rng, 3);
            let w = random_homogeneous(alg, &mut rng, 3);
            assert_eq!(u.mul(&v).mul(&w), u.mul(&v.mul(&w)));
        }
    }

    #[test]
    fn alpha_antiautomorphism_law_randomized() {
        let algebras = [catalog::mixed31(), catalog::super_heisenberg_hyperbolic()];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..40 {
            let alg = &algebras[round % algebras.len()];
            let u = random_homogeneous(alg, &mut rng, 2);
            let v = random_homogeneous(alg, &mut rng, 2);
            let (Some(pu), Some(pv)) = (u.parity(), v.parity()) else {
                continue;
            };
            let lhs = u.mul(&v).alpha();
            let mut rhs = v.alpha().mul(&u.alpha());
            if pu.koszul(pv) < 0 {
                rhs = rhs.neg();
            }
            assert_eq!(lhs, rhs);
            // involution
            assert_eq!(u.alpha().alpha(), u);
            // sigma commutes with alpha
            assert_eq!(u.alpha().sigma(), u.sigma().alpha());
        }
    }

    #[test]
    fn sigma_examples() {
        let alg = catalog::mixed31();
        let q = PBWElement::generator(&alg, 1);
        let c = PBWElement::generator(&alg, 3);
        let qc = q.mul(&c);
        assert_eq!(qc.sigma(), qc.neg());
        assert_eq!(q.sigma(), q);
        assert_eq!(qc.sigma().sigma(), qc);
    }

    #[test]
    fn ad_action_examples() {
        let alg = catalog::heisenberg3();
        let one = PBWElement::one(&alg);
        let p = alg.basis_vector(2);
        assert!(ad_action(&p, &one).is_zero());
        // ad(p)(q) = [p, q] = -z
        let q = PBWElement::generator(&alg, 1);
        let z = PBWElement::generator(&alg, 0);
        assert_eq!(ad_action(&p, &q), z.neg());
        // derivation law on a product
        let u = q.mul(&q);
        let expect = ad_action(&p, &q).mul(&q).add(&q.mul(&ad_action(&p, &q)));
        assert_eq!(ad_action(&p, &u), expect);
    }

    #[test]
    fn leading_terms_supercommute() {
        // degree(uv) <= degree(u) + degree(v), with the top part given by
        // the supercommutative product when no odd square collides
        let alg = catalog::mixed31();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let u = random_homogeneous(&alg, &mut rng, 2);
            let v = random_homogeneous(&alg, &mut rng, 2);
            let prod = u.mul(&v);
            assert!(prod.degree() <= u.degree() + v.degree());
            let d = u.degree() + v.degree();
            // compute the expected top slice in the associated graded
            let mut expected = TermMap::new();
            for (mu, cu) in u.terms() {
                if mu.iter().map(|&e| e as usize).sum::<usize>() != u.degree() {
                    continue;
                }
                for (mv, cv) in v.terms() {
                    if mv.iter().map(|&e| e as usize).sum::<usize>() != v.degree() {
                        continue;
                    }
                    // odd collision kills the top term
                    let collide = (0..alg.dim()).any(|i| {
                        alg.parity_of(i) == Parity::Odd && mu[i] + mv[i] > 1
                    });
                    if collide {
                        continue;
                    }
                    let mut m = mu.clone();
                    for i in 0..alg.dim() {
                        m[i] += mv[i];
                    }
                    // Koszul sign: odd letters of v jumping over odd letters
                    // of u with larger index
                    let mut swaps = 0;
                    for i in 0..alg.dim() {
                        for j in 0..i {
                            if alg.parity_of(i) == Parity::Odd
                                && alg.parity_of(j) == Parity::Odd
                            {
                                swaps += (mu[i] * mv[j]) as usize;
                            }
                        }
                    }
                    let mut c = cu.mul(cv);
                    if swaps % 2 == 1 {
                        c = c.neg();
                    }
                    super::add_term(&mut expected, m, c);
                }
            }
            for (m, c) in &expected {
                assert_eq!(&prod.coeff(m), c);
            }
            for (m, c) in prod.terms() {
                if m.iter().map(|&e| e as usize).sum::<usize>() == d {
                    assert_eq!(expected.get(m), Some(c));
                }
            }
        }
    }

    #[test]
    fn reduce_mod_left_ideal_heisenberg() {
        let alg = catalog::heisenberg3();
        let t = alg.tower().clone();
        let lam = catalog::dual_functional(&alg, "z");
        // h = span(z, q)
        let h = GradedSubspace::from_vectors(
            &t,
            alg.parities(),
            &[alg.basis_vector(0), alg.basis_vector(1)],
        )
        .unwrap();
        let ctx = SubordinateContext::new(&alg, &h, &lam).unwrap();
        // z - 1 reduces to zero
        let z = PBWElement::generator(&alg, 0);
        let zm1 = z.sub(&PBWElement::one(&alg));
        assert!(ctx.in_left_ideal(&zm1));
        // p * q = q p - z reduces to the scalar coming from the z term;
        // the q p part evaluates q to 0, so only -(-z) ... the straightened
        // value is checked against an independent route below.
        let p = PBWElement::generator(&alg, 2);
        let q = PBWElement::generator(&alg, 1);
        let red = ctx.reduce(&p.mul(&q));
        // independent oracle: q p - z with q p rewritten complement-first:
        // q p = p q + [q, p]; tails q -> 0, z -> 1 give 0 + 1 - 1 = 0
        assert!(red.is_zero());
        // and q * p reduces to +1: q p -> p q + z -> 0 + 1
        let red2 = ctx.reduce(&q.mul(&p));
        assert_eq!(red2, PBWElement::one(&ctx.adapted));
        // pure complement monomials are untouched
        let red3 = ctx.reduce(&p.mul(&p));
        assert_eq!(red3.degree(), 2);
        assert_eq!(red3.terms().len(), 1);
    }

    #[test]
    fn reduce_rejects_non_subordinate() {
        let alg = catalog::heisenberg3();
        let t = alg.tower().clone();
        let lam = catalog::dual_functional(&alg, "z");
        // h = span(q, p) is not subordinate: lambda([q, p]) = 1
        let h = GradedSubspace::from_vectors(
            &t,
            alg.parities(),
            &[alg.basis_vector(1), alg.basis_vector(2)],
        )
        .unwrap();
        assert!(matches!(
            SubordinateContext::new(&alg, &h, &lam),
            Err(Error::NotSubordinate(_))
        ));
    }

    /// The binomial expansion of `z y1^{n1} ... yp^{np}` through the
    /// twisted adjoint action `delta = ad . alpha`, with sign exponent
    /// `|z| sum n_i |y_i| + sum_{i<j} (n_i - m_i)|y_i| m_j |y_j|`.
    fn auto_identity_holds(
        alg: &Arc<SuperLieAlgebra>,
        z: &PBWElement,
        ys: &[usize],
        ns: &[u32],
    ) -> bool {
        let p = ys.len();
        let z_par = z.parity().expect("homogeneous z");
        let mut lhs = z.clone();
        for (yi, &y) in ys.iter().enumerate() {
            for _ in 0..ns[yi] {
                lhs = lhs.mul(&PBWElement::generator(alg, y));
            }
        }
        let mut rhs = PBWElement::zero(alg);
        let mut m = vec![0u32; p];
        loop {
            // front factor y1^{m1} ... yp^{mp}
            let mut front = PBWElement::one(alg);
            for (yi, &y) in ys.iter().enumerate() {
                for _ in 0..m[yi] {
                    front = front.mul(&PBWElement::generator(alg, y));
                }
            }
            // delta(y1^{n1-m1} ... yp^{np-mp})(z)
            let mut arg = PBWElement::one(alg);
            for (yi, &y) in ys.iter().enumerate() {
                for _ in 0..(ns[yi] - m[yi]) {
                    arg = arg.mul(&PBWElement::generator(alg, y));
                }
            }
            let delta_val = ad_action_element(&arg.alpha(), z);
            let mut coeff = 1i64;
            for (yi, &n) in ns.iter().enumerate() {
                coeff *= binomial(n, m[yi]);
            }
            let mut sign = 0u32;
            if z_par == Parity::Odd {
                for (yi, &y) in ys.iter().enumerate() {
                    if alg.parity_of(y) == Parity::Odd {
                        sign += ns[yi];
                    }
                }
            }
            for i in 0..p {
                for j in (i + 1)..p {
                    if alg.parity_of(ys[i]) == Parity::Odd && alg.parity_of(ys[j]) == Parity::Odd
                    {
                        sign += (ns[i] - m[i]) * m[j];
                    }
                }
            }
            if sign % 2 == 1 {
                coeff = -coeff;
            }
            rhs = rhs.add(&front.mul(&delta_val).scale(&alg.tower().int(coeff)));
            // next multi-index
            let mut k = 0;
            loop {
                if k == p {
                    break;
                }
                m[k] += 1;
                if m[k] <= ns[k] {
                    break;
                }
                m[k] = 0;
                k += 1;
            }
            if k == p {
                break;
            }
        }
        lhs == rhs
    }

    #[test]
    fn lemma_auto_identity_randomized() {
        let alg = catalog::mixed31();
        let k_idx = [0usize, 1, 3]; // span(z, q, c): the centralizer of q
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 25 {
            let p = rng.gen_range(1usize..=2);
            let ys: Vec<usize> = (0..p).map(|_| rng.gen_range(0..alg.dim())).collect();
            let ns: Vec<u32> = ys
                .iter()
                .map(|&y| {
                    if alg.parity_of(y) == Parity::Odd {
                        1
                    } else {
                        rng.gen_range(1..=3)
                    }
                })
                .collect();
            // z: a random monomial in the ideal variables
            let mut zm = vec![0u32; alg.dim()];
            for &i in &k_idx {
                let cap = if alg.parity_of(i) == Parity::Odd { 1 } else { 2 };
                zm[i] = rng.gen_range(0..=cap);
            }
            let mut zt = TermMap::new();
            zt.insert(zm, alg.tower().one());
            let z = PBWElement::from_terms(&alg, zt);
            if z.parity().is_none() {
                continue;
            }
            checked += 1;
            assert!(
                auto_identity_holds(&alg, &z, &ys, &ns),
                "auto identity instance failed"
            );
        }
        // explicit small instance: z * y^n against the expansion, n <= 3
        let h3 = catalog::heisenberg3();
        let zq = PBWElement::generator(&h3, 1); // z := q in U(k), k = span(z, q)
        for n in 1..=3u32 {
            assert!(auto_identity_holds(&h3, &zq, &[2], &[n]));
        }
    }

    fn binomial(n: u32, k: u32) -> i64 {
        let mut acc = 1i64;
        for i in 0..k {
            acc = acc * (n - i) as i64 / (i + 1) as i64;
        }
        acc
    }

    #[test]
    fn render_examples() {
        let alg = catalog::heisenberg3();
        let z = PBWElement::generator(&alg, 0);
        let u = z.sub(&PBWElement::one(&alg));
        assert_eq!(u.render(), "z - 1");
    }
}
