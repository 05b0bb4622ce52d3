//! Functionals, the bilinear form `<x, y> = λ([x, y])`, its kernel, and
//! polarization constructions: a flag-based construction on the even part,
//! an equivariant maximal-isotropic algorithm on the odd part, their
//! combination, and a best-effort invariant variant for ideals.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{
    isotropic_vector, EvenBilinearForm, FormSymmetry, GradedSubspace, Matrix, Parity,
};
use crate::scalar::{Scalar, Tower};
use crate::superlie::{lambda_eval, SuperLieAlgebra};

/// An even functional: a coefficient vector over the basis of `g` that
/// vanishes on the odd part.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    coeffs: Vec<Scalar>,
}

impl Functional {
    pub fn new(alg: &SuperLieAlgebra, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() != alg.dim() {
            return Err(Error::InvalidFunctional("wrong coefficient count".into()));
        }
        for (i, c) in coeffs.iter().enumerate() {
            if alg.parity_of(i) == Parity::Odd && !c.is_zero() {
                return Err(Error::InvalidFunctional(format!(
                    "nonzero value on the odd generator {}",
                    alg.labels()[i]
                )));
            }
        }
        Ok(Functional { coeffs })
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn eval(&self, v: &[Scalar]) -> Scalar {
        lambda_eval(&self.coeffs, v)
    }

    /// Whether `λ([g_0, g_0]) = 0` (the restricted class of functionals).
    pub fn vanishes_on_even_commutators(&self, alg: &SuperLieAlgebra) -> bool {
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                if alg.parity_of(i) == Parity::Even && alg.parity_of(j) == Parity::Even {
                    let br = alg.bracket_basis(i, j);
                    if !lambda_eval(&self.coeffs, br).is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The superantisymmetric form attached to a functional, with its kernel.
#[derive(Debug, Clone)]
pub struct LambdaForm {
    pub form: EvenBilinearForm,
    pub kernel: GradedSubspace,
}

/// Build `<x, y> = λ([x, y])` together with its kernel; the kernel is
/// verified to be a subalgebra.
pub fn lambda_form(alg: &Arc<SuperLieAlgebra>, lambda: &[Scalar]) -> Result<LambdaForm> {
    let tower = alg.tower().clone();
    let n = alg.dim();
    let even_idx: Vec<usize> = (0..n).filter(|&i| alg.parity_of(i) == Parity::Even).collect();
    let odd_idx: Vec<usize> = (0..n).filter(|&i| alg.parity_of(i) == Parity::Odd).collect();
    let mut even_block = Matrix::zero(&tower, even_idx.len(), even_idx.len());
    for (a, &i) in even_idx.iter().enumerate() {
        for (b, &j) in even_idx.iter().enumerate() {
            even_block.set(a, b, lambda_eval(lambda, alg.bracket_basis(i, j)));
        }
    }
    let mut odd_block = Matrix::zero(&tower, odd_idx.len(), odd_idx.len());
    for (a, &i) in odd_idx.iter().enumerate() {
        for (b, &j) in odd_idx.iter().enumerate() {
            odd_block.set(a, b, lambda_eval(lambda, alg.bracket_basis(i, j)));
        }
    }
    let form = EvenBilinearForm::new(
        &tower,
        alg.parities(),
        even_block,
        odd_block,
        FormSymmetry::Superantisymmetric,
    )?;
    let kernel = form.kernel();
    // the kernel is a subalgebra
    for (v, _) in kernel.basis() {
        for (w, _) in kernel.basis() {
            let br = alg.bracket(&v, &w);
            if !kernel.contains_general(&br) {
                return Err(Error::Hypothesis(
                    "kernel of the lambda form failed the subalgebra check".into(),
                ));
            }
        }
    }
    Ok(LambdaForm { form, kernel })
}

/// A polarization: the subspace, the functional it polarizes, and the
/// tower reached by any root adjunctions along the way.
#[derive(Debug, Clone)]
pub struct Polarization {
    pub subspace: GradedSubspace,
    pub lambda: Vec<Scalar>,
    pub tower: Tower,
}

/// Check all four defining conditions of a polarization.
pub fn validate_polarization(
    alg: &Arc<SuperLieAlgebra>,
    lambda: &[Scalar],
    h: &GradedSubspace,
) -> Result<()> {
    // subalgebra
    for (v, _) in h.basis() {
        for (w, _) in h.basis() {
            if !h.contains_general(&alg.bracket(&v, &w)) {
                return Err(Error::Hypothesis("polarization is not a subalgebra".into()));
            }
        }
    }
    // subordinate
    for (v, _) in h.basis() {
        for (w, _) in h.basis() {
            if !lambda_eval(lambda, &alg.bracket(&v, &w)).is_zero() {
                return Err(Error::Hypothesis("polarization is not subordinate".into()));
            }
        }
    }
    let lf = lambda_form(alg, lambda)?;
    if !h.contains(&lf.kernel) {
        return Err(Error::Hypothesis(
            "polarization does not contain the kernel of the form".into(),
        ));
    }
    if !lf.form.is_maximal_isotropic(h)? {
        return Err(Error::Hypothesis(
            "polarization is not maximal totally isotropic".into(),
        ));
    }
    Ok(())
}

/// Action matrices of the even part on the odd coordinates.
fn odd_action_matrices(alg: &SuperLieAlgebra) -> Vec<Matrix> {
    let tower = alg.tower().clone();
    let n = alg.dim();
    let odd_idx: Vec<usize> = (0..n).filter(|&i| alg.parity_of(i) == Parity::Odd).collect();
    let mut out = Vec::new();
    for i in 0..n {
        if alg.parity_of(i) != Parity::Even {
            continue;
        }
        let mut m = Matrix::zero(&tower, odd_idx.len(), odd_idx.len());
        for (b, &j) in odd_idx.iter().enumerate() {
            let img = alg.bracket_basis(i, j);
            for (a, &k) in odd_idx.iter().enumerate() {
                m.set(a, b, img[k].clone());
            }
        }
        out.push(m);
    }
    out
}

/// Equivariant maximal totally isotropic subspace for a symmetric form.
///
/// `gram` is the form on an `n`-dimensional space, `acting` a family of
/// nilpotent operators, `seed` an isotropic invariant row span. The loop
/// enlarges the seed inside `{ v in W^perp : acting v ⊆ W }`, lifting an
/// isotropic vector of the induced form whenever one exists (adjoining at
/// most one square root per lift). Returns the stable subspace and the
/// tower reached; errors if the candidate is invariant-terminal but not
/// maximal as a subspace, which cannot happen for invariant forms.
pub fn max_isotropic_submodule(
    gram: &Matrix,
    acting: &[Matrix],
    seed: &Matrix,
    tower: &Tower,
) -> Result<(Tower, Matrix)> {
    let n = gram.rows;
    for a in acting {
        // Engel hypothesis: every operator nilpotent
        let mut power = a.clone();
        for _ in 0..n {
            power = power.mul_mat(a);
        }
        if (0..n).any(|r| (0..n).any(|c| !power.at(r, c).is_zero())) {
            return Err(Error::Hypothesis(
                "action operator is not nilpotent".into(),
            ));
        }
    }
    let mut tower = tower.clone();
    let mut w = seed.rref().0;
    loop {
        // W^perp
        let mut cond = Matrix::zero(&tower, w.rows, n);
        for r in 0..w.rows {
            for c in 0..n {
                let mut acc = tower.zero();
                for j in 0..n {
                    acc = acc.add(&gram.at(c, j).mul(w.at(r, j)));
                }
                cond.set(r, c, acc);
            }
        }
        let wperp = cond.nullspace();
        if wperp.rows == w.rows {
            break; // W = W^perp
        }
        // N = { v in W^perp : A_j v in W for all j }
        let basis = wperp.rows_vec();
        let mut cond_rows: Vec<Vec<Scalar>> = Vec::new();
        let (wr, wpivots) = w.rref();
        let reduce_mod_w = |v: &[Scalar]| -> Vec<Scalar> {
            let mut x = v.to_vec();
            for (ri, &pc) in wpivots.iter().enumerate() {
                if !x[pc].is_zero() {
                    let f = x[pc].clone();
                    for c in 0..n {
                        x[c] = x[c].sub(&f.mul(wr.at(ri, c)));
                    }
                }
            }
            x
        };
        for a in acting {
            for c in 0..n {
                let mut row = Vec::with_capacity(basis.len());
                for b in &basis {
                    let img = reduce_mod_w(&a.mul_vec(b));
                    row.push(img[c].clone());
                }
                cond_rows.push(row);
            }
        }
        let coeff_null = Matrix::from_rows_dim(&tower, cond_rows, basis.len()).nullspace();
        // representatives of N modulo W
        let mut reps: Vec<Vec<Scalar>> = Vec::new();
        let mut span = w.clone();
        for r in 0..coeff_null.rows {
            let mut v = vec![tower.zero(); n];
            for (bi, b) in basis.iter().enumerate() {
                let c = coeff_null.at(r, bi);
                if !c.is_zero() {
                    for k in 0..n {
                        v[k] = v[k].add(&c.mul(&b[k]));
                    }
                }
            }
            if !span.row_space_contains(&v) {
                span = span.stack(&Matrix::from_rows(&tower, vec![v.clone()])).rref().0;
                reps.push(v);
            }
        }
        if reps.is_empty() {
            break;
        }
        let k = reps.len();
        let mut induced = Matrix::zero(&tower, k, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = tower.zero();
                for a in 0..n {
                    for b in 0..n {
                        acc = acc.add(&reps[i][a].mul(gram.at(a, b)).mul(&reps[j][b]));
                    }
                }
                induced.set(i, j, acc);
            }
        }
        match isotropic_vector(&induced, &tower, true)? {
            Some((ext, coeffs)) => {
                let mut v = vec![ext.zero(); n];
                for (i, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        for a in 0..n {
                            v[a] = v[a].add(&c.mul(&reps[i][a]));
                        }
                    }
                }
                tower = ext;
                w = w.stack(&Matrix::from_rows(&tower, vec![v])).rref().0;
            }
            None => break,
        }
    }
    // maximality as a plain subspace: the induced form on W^perp / W must
    // be anisotropic (possible failure only for non-invariant forms)
    let mut cond = Matrix::zero(&tower, w.rows, n);
    for r in 0..w.rows {
        for c in 0..n {
            let mut acc = tower.zero();
            for j in 0..n {
                acc = acc.add(&gram.at(c, j).mul(w.at(r, j)));
            }
            cond.set(r, c, acc);
        }
    }
    let wperp = cond.nullspace();
    let mut reps: Vec<Vec<Scalar>> = Vec::new();
    let mut span = w.clone();
    for r in 0..wperp.rows {
        let v = wperp.row(r);
        if !span.row_space_contains(&v) {
            span = span.stack(&Matrix::from_rows(&tower, vec![v.clone()])).rref().0;
            reps.push(v);
        }
    }
    if !reps.is_empty() {
        let k = reps.len();
        let mut induced = Matrix::zero(&tower, k, k);
        for i in 0..k {
            for j in 0..k {
                let mut acc = tower.zero();
                for a in 0..n {
                    for b in 0..n {
                        acc = acc.add(&reps[i][a].mul(gram.at(a, b)).mul(&reps[j][b]));
                    }
                }
                induced.set(i, j, acc);
            }
        }
        if isotropic_vector(&induced, &tower, true)?.is_some() {
            return Err(Error::Hypothesis(
                "stable subspace is not maximal; the form is not invariant under the action"
                    .into(),
            ));
        }
    }
    Ok((tower, w))
}

/// A flag-based polarization of a nilpotent Lie algebra (even part only):
/// a complete flag of ideals refining the lower central series, summing
/// the kernels of the restricted form.
pub fn polarize_even(alg: &Arc<SuperLieAlgebra>, lambda: &[Scalar]) -> Result<GradedSubspace> {
    if alg.sdim().odd != 0 {
        return Err(Error::Hypothesis("even-part construction on a super input".into()));
    }
    alg.ensure_valid()?;
    if !alg.is_nilpotent() {
        return Err(Error::NotNilpotent("flag construction needs nilpotency".into()));
    }
    let tower = alg.tower().clone();
    let n = alg.dim();
    // complete flag of ideals refining the lower central series, built
    // bottom-up in basis order
    let mut series = alg.lower_central_series().clone();
    if !series.last().unwrap().is_zero() {
        return Err(Error::NotNilpotent("series does not vanish".into()));
    }
    series.reverse(); // 0 = C^k ⊂ ... ⊂ C^1 = g
    let mut flag: Vec<Matrix> = vec![Matrix::zero(&tower, 0, n)];
    for member in &series {
        let target = member.even.rref().0;
        loop {
            let current = flag.last().unwrap();
            if current.rows == target.rows {
                break;
            }
            let mut next = None;
            for r in 0..target.rows {
                let v = target.row(r);
                if !current.row_space_contains(&v) {
                    next = Some(v);
                    break;
                }
            }
            let v = next.expect("flag refinement finds a vector");
            flag.push(current.stack(&Matrix::from_rows(&tower, vec![v])).rref().0);
        }
    }
    // h = sum over flag members of the kernel of the restricted form
    let mut h = Matrix::zero(&tower, 0, n);
    for member in &flag {
        let m = member.rows;
        if m == 0 {
            continue;
        }
        let mut gram = Matrix::zero(&tower, m, m);
        for i in 0..m {
            for j in 0..m {
                let br = alg.bracket(&member.row(i), &member.row(j));
                gram.set(i, j, lambda_eval(lambda, &br));
            }
        }
        let null = gram.nullspace();
        for r in 0..null.rows {
            let mut v = vec![tower.zero(); n];
            for (bi, b) in (0..m).enumerate() {
                let c = null.at(r, bi);
                if !c.is_zero() {
                    for k in 0..n {
                        v[k] = v[k].add(&c.mul(member.at(b, k)));
                    }
                }
            }
            h = h.stack(&Matrix::from_rows(&tower, vec![v])).rref().0;
        }
    }
    let sub = GradedSubspace {
        parities: alg.parities().to_vec(),
        even: h,
        odd: Matrix::zero(&tower, 0, n),
    };
    // the construction yields a polarization of the even algebra; verify
    validate_polarization(alg, lambda, &sub)?;
    Ok(sub)
}

/// Polarization of a nilpotent Lie superalgebra at an even functional.
pub fn polarize(alg: &Arc<SuperLieAlgebra>, lambda: &[Scalar]) -> Result<Polarization> {
    alg.ensure_valid()?;
    if !alg.is_nilpotent() {
        return Err(Error::NotNilpotent("polarizations need nilpotency".into()));
    }
    let tower = alg.tower().clone();
    let n = alg.dim();
    let odd_idx: Vec<usize> = (0..n).filter(|&i| alg.parity_of(i) == Parity::Odd).collect();
    // odd part: stable maximal isotropic submodule of g_1
    let lf = lambda_form(alg, lambda)?;
    let acting = odd_action_matrices(alg);
    let seed = Matrix::zero(&tower, 0, odd_idx.len());
    let (ext, v_small) = max_isotropic_submodule(&lf.form.odd_block, &acting, &seed, &tower)?;
    let mut odd_rows = Vec::new();
    for r in 0..v_small.rows {
        let mut v = vec![ext.zero(); n];
        for (ci, &full) in odd_idx.iter().enumerate() {
            v[full] = v_small.at(r, ci).clone();
        }
        odd_rows.push(v);
    }
    // even part: flag construction on the even subalgebra
    let (even_alg, even_idx) = alg.even_subalgebra();
    let lambda_even: Vec<Scalar> = even_idx.iter().map(|&i| lambda[i].clone()).collect();
    let h0 = polarize_even(&even_alg, &lambda_even)?;
    let mut even_rows = Vec::new();
    for r in 0..h0.even.rows {
        let mut v = vec![ext.zero(); n];
        for (ci, &full) in even_idx.iter().enumerate() {
            v[full] = h0.even.at(r, ci).clone();
        }
        even_rows.push(v);
    }
    even_rows.extend(odd_rows);
    let sub = GradedSubspace::from_vectors(&ext, alg.parities(), &even_rows)?;
    validate_polarization(alg, lambda, &sub)?;
    Ok(Polarization {
        subspace: sub,
        lambda: lambda.to_vec(),
        tower: ext,
    })
}

/// Best-effort invariant polarization of an ideal `k` at `λ|_k`, under the
/// action of the whole algebra. The odd part is always action-stable by
/// construction; the even part uses a flag of action-stable ideals of
/// `k_0` and is verified afterwards. A failed verification is reported
/// through the `invariant` flag, not an error.
#[derive(Debug, Clone)]
pub struct InvariantPolarization {
    pub polarization: Polarization,
    pub invariant: bool,
}

pub fn invariant_polarize(
    alg: &Arc<SuperLieAlgebra>,
    k: &GradedSubspace,
    lambda: &[Scalar],
) -> Result<InvariantPolarization> {
    alg.ensure_valid()?;
    if !alg.is_nilpotent() {
        return Err(Error::NotNilpotent("invariant polarizations need nilpotency".into()));
    }
    if !alg.is_ideal(k) {
        return Err(Error::NotAnIdeal("invariant polarization needs an ideal".into()));
    }
    let tower = alg.tower().clone();
    let n = alg.dim();
    let kbasis = k.basis();
    let kdim = kbasis.len();
    // coordinates of a vector of k in the k-basis
    let kmat = Matrix::from_rows(
        &tower,
        kbasis.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>(),
    );
    let coords_in_k = |v: &[Scalar]| -> Vec<Scalar> {
        kmat.transpose()
            .solve(v)
            .expect("vector lies in the ideal")
    };
    // gram of the lambda form on the odd part of k
    let odd_rows_k: Vec<Vec<Scalar>> = (0..k.odd.rows).map(|r| k.odd.row(r)).collect();
    let m1 = odd_rows_k.len();
    let mut gram = Matrix::zero(&tower, m1, m1);
    for i in 0..m1 {
        for j in 0..m1 {
            gram.set(
                i,
                j,
                lambda_eval(lambda, &alg.bracket(&odd_rows_k[i], &odd_rows_k[j])),
            );
        }
    }
    // even generators of g acting on the odd part of k
    let mut acting = Vec::new();
    for i in 0..n {
        if alg.parity_of(i) != Parity::Even {
            continue;
        }
        let mut m = Matrix::zero(&tower, m1, m1);
        for (b, w) in odd_rows_k.iter().enumerate() {
            let img = alg.bracket(&alg.basis_vector(i), w);
            let coords = coords_in_k(&img);
            // odd coordinates of the image inside the k-basis
            for (a, kc) in (0..kdim).enumerate() {
                if kbasis[kc].1 == Parity::Odd {
                    let pos = kbasis[..kc]
                        .iter()
                        .filter(|(_, p)| *p == Parity::Odd)
                        .count();
                    m.set(pos, b, coords[a].clone());
                }
            }
        }
        acting.push(m);
    }
    let seed = Matrix::zero(&tower, 0, m1);
    let (ext, v_small) = max_isotropic_submodule(&gram, &acting, &seed, &tower)?;
    let mut odd_rows = Vec::new();
    for r in 0..v_small.rows {
        let mut v = vec![ext.zero(); n];
        for (ci, w) in odd_rows_k.iter().enumerate() {
            let c = v_small.at(r, ci);
            if !c.is_zero() {
                for a in 0..n {
                    v[a] = v[a].add(&c.mul(&w[a]));
                }
            }
        }
        odd_rows.push(v);
    }
    // even part: complete flag of action-stable subspaces of k_0 through
    // iterated joint kernels of the even action
    let even_rows_k: Vec<Vec<Scalar>> = (0..k.even.rows).map(|r| k.even.row(r)).collect();
    let flag = stable_flag(alg, &even_rows_k, &ext)?;
    let mut h0 = Matrix::zero(&ext, 0, n);
    for member in &flag {
        let m = member.rows;
        if m == 0 {
            continue;
        }
        let mut g2 = Matrix::zero(&ext, m, m);
        for i in 0..m {
            for j in 0..m {
                g2.set(
                    i,
                    j,
                    lambda_eval(lambda, &alg.bracket(&member.row(i), &member.row(j))),
                );
            }
        }
        let null = g2.nullspace();
        for r in 0..null.rows {
            let mut v = vec![ext.zero(); n];
            for b in 0..m {
                let c = null.at(r, b);
                if !c.is_zero() {
                    for a in 0..n {
                        v[a] = v[a].add(&c.mul(member.at(b, a)));
                    }
                }
            }
            h0 = h0.stack(&Matrix::from_rows(&ext, vec![v])).rref().0;
        }
    }
    let mut vectors: Vec<Vec<Scalar>> = (0..h0.rows).map(|r| h0.row(r)).collect();
    vectors.extend(odd_rows);
    let sub = GradedSubspace::from_vectors(&ext, alg.parities(), &vectors)?;
    // validate as a polarization of the ideal: restrict to k's presentation
    let kalg_data = present_ideal(alg, k)?;
    let sub_in_k_vectors: Vec<Vec<Scalar>> = sub
        .basis()
        .iter()
        .map(|(v, _)| coords_in_k_presentation(&kalg_data, v))
        .collect();
    let sub_in_k = GradedSubspace::from_vectors(
        &ext,
        kalg_data.algebra.parities(),
        &sub_in_k_vectors,
    )?;
    let lambda_in_k: Vec<Scalar> = kalg_data
        .basis_vectors
        .iter()
        .map(|v| lambda_eval(lambda, v))
        .collect();
    validate_polarization(&kalg_data.algebra, &lambda_in_k, &sub_in_k)?;
    // invariance under the whole algebra
    let mut invariant = true;
    'outer: for i in 0..n {
        for (v, _) in sub.basis() {
            let img = alg.bracket(&alg.basis_vector(i), &v);
            if !sub.contains_general(&img) {
                invariant = false;
                break 'outer;
            }
        }
    }
    Ok(InvariantPolarization {
        polarization: Polarization {
            subspace: sub,
            lambda: lambda.to_vec(),
            tower: ext,
        },
        invariant,
    })
}

/// A complete flag of subspaces of the given even space, each stable under
/// the even part of the algebra, built through iterated joint kernels.
fn stable_flag(
    alg: &Arc<SuperLieAlgebra>,
    even_rows: &[Vec<Scalar>],
    tower: &Tower,
) -> Result<Vec<Matrix>> {
    let n = alg.dim();
    let space = Matrix::from_rows(tower, even_rows.to_vec()).rref().0;
    let mut flag = vec![Matrix::zero(tower, 0, n)];
    while flag.last().unwrap().rows < space.rows {
        let current = flag.last().unwrap().clone();
        let (cr, cpivots) = current.rref();
        let reduce = |v: &[Scalar]| -> Vec<Scalar> {
            let mut x = v.to_vec();
            for (ri, &pc) in cpivots.iter().enumerate() {
                if !x[pc].is_zero() {
                    let f = x[pc].clone();
                    for c in 0..n {
                        x[c] = x[c].sub(&f.mul(cr.at(ri, c)));
                    }
                }
            }
            x
        };
        // representatives of space/current
        let mut reps = Vec::new();
        let mut span = current.clone();
        for r in 0..space.rows {
            let v = space.row(r);
            if !span.row_space_contains(&v) {
                span = span.stack(&Matrix::from_rows(tower, vec![v.clone()])).rref().0;
                reps.push(v);
            }
        }
        // joint kernel of the even action on the quotient
        let mut cond_rows = Vec::new();
        for i in 0..n {
            if alg.parity_of(i) != Parity::Even {
                continue;
            }
            for c in 0..n {
                let mut row = Vec::with_capacity(reps.len());
                for rep in &reps {
                    let img = reduce(&alg.bracket(&alg.basis_vector(i), rep));
                    row.push(img[c].clone());
                }
                cond_rows.push(row);
            }
        }
        let null = Matrix::from_rows_dim(tower, cond_rows, reps.len()).nullspace();
        if null.rows == 0 {
            return Err(Error::Hypothesis(
                "no joint kernel vector; the action is not nilpotent".into(),
            ));
        }
        // first kernel vector extends the flag by one dimension
        let mut v = vec![tower.zero(); n];
        for (bi, rep) in reps.iter().enumerate() {
            let c = null.at(0, bi);
            if !c.is_zero() {
                for a in 0..n {
                    v[a] = v[a].add(&c.mul(&rep[a]));
                }
            }
        }
        flag.push(current.stack(&Matrix::from_rows(tower, vec![v])).rref().0);
    }
    Ok(flag)
}

/// Presentation of an ideal as an algebra of its own.
pub struct IdealPresentation {
    pub algebra: Arc<SuperLieAlgebra>,
    /// full-coordinate vectors of the presentation basis
    pub basis_vectors: Vec<Vec<Scalar>>,
}

pub fn present_ideal(
    alg: &Arc<SuperLieAlgebra>,
    k: &GradedSubspace,
) -> Result<IdealPresentation> {
    let tower = alg.tower().clone();
    let basis = k.basis();
    let m = basis.len();
    let kmat = Matrix::from_rows(
        &tower,
        basis.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>(),
    );
    let kt = kmat.transpose();
    let mut table = vec![vec![vec![tower.zero(); m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            let br = alg.bracket(&basis[i].0, &basis[j].0);
            let coords = kt
                .solve(&br)
                .ok_or_else(|| Error::NotAnIdeal("bracket leaves the subspace".into()))?;
            table[i][j] = coords;
        }
    }
    let labels = (0..m).map(|i| format!("k{}", i)).collect();
    let parities = basis.iter().map(|(_, p)| *p).collect();
    let algebra = SuperLieAlgebra::from_parts(tower, labels, parities, table);
    algebra.ensure_valid()?;
    Ok(IdealPresentation {
        algebra,
        basis_vectors: basis.into_iter().map(|(v, _)| v).collect(),
    })
}

fn coords_in_k_presentation(data: &IdealPresentation, v: &[Scalar]) -> Vec<Scalar> {
    let tower = data.algebra.tower().clone();
    let kmat = Matrix::from_rows(&tower, data.basis_vectors.clone());
    kmat.transpose().solve(v).expect("vector lies in the ideal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::SuperDim;

    #[test]
    fn lambda_form_examples() {
        // zero functional: kernel is everything
        let alg = catalog::heisenberg3();
        let lam0 = catalog::zero_functional(&alg);
        let lf = lambda_form(&alg, &lam0).unwrap();
        assert_eq!(lf.kernel.sdim(), SuperDim::new(3, 0));
        // z*: even kernel is the center, rank 2
        let lam = catalog::dual_functional(&alg, "z");
        let lf = lambda_form(&alg, &lam).unwrap();
        assert_eq!(lf.kernel.sdim(), SuperDim::new(1, 0));
        assert_eq!(lf.form.even_block.rank(), 2);
        // (1|1) Clifford case: kernel is the even part
        let alg = catalog::odd11_clifford();
        let lam = catalog::dual_functional(&alg, "z");
        let lf = lambda_form(&alg, &lam).unwrap();
        assert_eq!(lf.kernel.sdim(), SuperDim::new(1, 0));
        assert_eq!(lf.form.odd_block.rank(), 1);
    }

    #[test]
    fn polarize_even_heisenberg() {
        let alg = catalog::heisenberg3();
        let lam = catalog::dual_functional(&alg, "z");
        let h0 = polarize_even(&alg, &lam).unwrap();
        assert_eq!(h0.sdim(), SuperDim::new(2, 0));
        // contains z and q (the flag refines z ⊂ (z, q) ⊂ g)
        assert!(h0.contains_vector(&alg.basis_vector(0), Parity::Even));
        assert!(h0.contains_vector(&alg.basis_vector(1), Parity::Even));
    }

    #[test]
    fn polarize_even_heisenberg5_dimension() {
        let alg = catalog::heisenberg5();
        let lam = catalog::dual_functional(&alg, "z");
        let h0 = polarize_even(&alg, &lam).unwrap();
        assert_eq!(h0.sdim().even, 3, "(5 + 1)/2");
    }

    #[test]
    fn polarize_abelian_is_everything() {
        let alg = catalog::abelian2();
        let t = alg.tower().clone();
        let mut lam = catalog::zero_functional(&alg);
        lam[0] = t.one();
        let pol = polarize(&alg, &lam).unwrap();
        assert_eq!(pol.subspace.sdim(), SuperDim::new(2, 0));
    }

    #[test]
    fn polarize_odd11_clifford() {
        let alg = catalog::odd11_clifford();
        let lam = catalog::dual_functional(&alg, "z");
        let pol = polarize(&alg, &lam).unwrap();
        // unique polarization: the even part
        assert_eq!(pol.subspace.sdim(), SuperDim::new(1, 0));
    }

    #[test]
    fn polarize_super_heisenberg_variants() {
        let alg = catalog::super_heisenberg_hyperbolic();
        let lam = catalog::dual_functional(&alg, "z");
        let pol = polarize(&alg, &lam).unwrap();
        assert_eq!(pol.subspace.sdim(), SuperDim::new(1, 1));
        assert_eq!(pol.tower.depth(), 0);
        assert!(pol
            .subspace
            .contains_vector(&alg.basis_vector(1), Parity::Odd));
        // diagonal form: needs sqrt(-1)
        let alg = catalog::super_heisenberg_diagonal();
        let lam = catalog::dual_functional(&alg, "z");
        let pol = polarize(&alg, &lam).unwrap();
        assert_eq!(pol.subspace.sdim(), SuperDim::new(1, 1));
        assert_eq!(pol.tower.depth(), 1);
    }

    #[test]
    fn polarize_lambda_zero_gives_everything() {
        let alg = catalog::super_heisenberg_hyperbolic();
        let lam = catalog::zero_functional(&alg);
        let pol = polarize(&alg, &lam).unwrap();
        assert_eq!(pol.subspace.sdim(), alg.sdim());
    }

    #[test]
    fn polarization_sdim_is_construction_independent() {
        // second flag/lift route via a rebased copy of the algebra
        let alg = catalog::heisenberg3();
        let lam = catalog::dual_functional(&alg, "z");
        let pol = polarize(&alg, &lam).unwrap();
        // rebase with p before q
        let t = alg.tower().clone();
        let new_basis = vec![
            (alg.basis_vector(0), Parity::Even),
            (alg.basis_vector(2), Parity::Even),
            (alg.basis_vector(1), Parity::Even),
        ];
        let rb = alg.rebase(&new_basis).unwrap();
        let lam2 = vec![t.one(), t.zero(), t.zero()];
        let pol2 = polarize(&rb.algebra, &lam2).unwrap();
        assert_eq!(pol.subspace.sdim(), pol2.subspace.sdim());
    }

    #[test]
    fn invariant_polarize_examples() {
        // abelian ideal: the ideal itself, trivially invariant
        let alg = catalog::super_heisenberg_hyperbolic();
        let t = alg.tower().clone();
        let lam = catalog::dual_functional(&alg, "z");
        // a = span(z, c1) is a supercommutative ideal; lambda(y) = 0 there
        let a = GradedSubspace::from_vectors(
            &t,
            alg.parities(),
            &[alg.basis_vector(0), alg.basis_vector(1)],
        )
        .unwrap();
        let inv = invariant_polarize(&alg, &a, &lam).unwrap();
        assert!(inv.invariant);
        // abelian ideal polarizes to itself
        assert_eq!(inv.polarization.subspace.sdim(), SuperDim::new(1, 1));
        assert!(inv.polarization.subspace.contains(&a));
        // whole algebra as its own ideal reduces to polarize
        let alg = catalog::heisenberg3();
        let lam = catalog::dual_functional(&alg, "z");
        let full = alg.full_space();
        let inv = invariant_polarize(&alg, &full, &lam).unwrap();
        let pol = polarize(&alg, &lam).unwrap();
        assert_eq!(inv.polarization.subspace.sdim(), pol.subspace.sdim());
    }

    #[test]
    fn ideal_with_vanishing_bracket_lands_inside_polarizations() {
        // Remark-style containment: an ideal with lambda([g, k]) = 0 lies in
        // the returned polarization
        let alg = catalog::super_heisenberg_hyperbolic();
        let t = alg.tower().clone();
        let lam = catalog::dual_functional(&alg, "z");
        let pol = polarize(&alg, &lam).unwrap();
        // k = span(z, c1): [g, k] = span(z) cap ker(lambda)? [c2, c1] = z has
        // lambda = 1, so k does not qualify; use k = span(z) instead
        let k = GradedSubspace::from_vectors(&t, alg.parities(), &[alg.basis_vector(0)]).unwrap();
        for (v, _) in k.basis() {
            for i in 0..alg.dim() {
                assert!(lambda_eval(&lam, &alg.bracket(&alg.basis_vector(i), &v))
                    .is_zero());
            }
        }
        assert!(pol.subspace.contains(&k));
        // and the c1-line of the polarization is stable under the action
        let lfz = lambda_form(&alg, &lam).unwrap();
        let _ = lfz;
        for i in 0..alg.dim() {
            if alg.parity_of(i) == Parity::Even {
                for (v, _) in pol.subspace.basis() {
                    let img = alg.bracket(&alg.basis_vector(i), &v);
                    if alg.parity_of_vector(&img) == Some(Parity::Odd) {
                        assert!(pol.subspace.contains_general(&img));
                    }
                }
            }
        }
    }

    #[test]
    fn max_isotropic_examples() {
        let t = Tower::rationals();
        // zero form returns everything
        let gram = Matrix::zero(&t, 2, 2);
        let (_, w) = max_isotropic_submodule(&gram, &[], &Matrix::zero(&t, 0, 2), &t).unwrap();
        assert_eq!(w.rows, 2);
        // hyperbolic plane with trivial action: a line
        let gram = Matrix::from_rows(
            &t,
            vec![vec![t.int(0), t.int(1)], vec![t.int(1), t.int(0)]],
        );
        let (ext, w) = max_isotropic_submodule(&gram, &[], &Matrix::zero(&t, 0, 2), &t).unwrap();
        assert_eq!(w.rows, 1);
        assert_eq!(ext.depth(), 0);
        // diag(1,1): needs the imaginary unit
        let gram = Matrix::identity(&t, 2);
        let (ext, w) = max_isotropic_submodule(&gram, &[], &Matrix::zero(&t, 0, 2), &t).unwrap();
        assert_eq!(w.rows, 1);
        assert_eq!(ext.depth(), 1);
    }

    #[test]
    fn max_isotropic_rejects_non_nilpotent_action() {
        let t = Tower::rationals();
        let gram = Matrix::zero(&t, 2, 2);
        let acting = vec![Matrix::identity(&t, 2)];
        assert!(matches!(
            max_isotropic_submodule(&gram, &acting, &Matrix::zero(&t, 0, 2), &t),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn functional_rejects_odd_support() {
        let alg = catalog::odd11_clifford();
        let t = alg.tower().clone();
        let bad = vec![t.zero(), t.one()];
        assert!(Functional::new(&alg, bad).is_err());
    }
}
