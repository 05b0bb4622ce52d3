//! Shared oracles for the integration suites: random homogeneous
//! elements, and the binomial expansion identity computed independently
//! of the straightening path it checks.

use std::sync::Arc;

use dixmap::linalg::Parity;
use dixmap::pbw::{ad_action_element, monomials_up_to, PBWElement};
use dixmap::superlie::{SuperLieAlgebra, TermMap};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_homogeneous(
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
    while terms.len() < 3 && tries < 60 {
        tries += 1;
        let m = monos[rng.gen_range(0..monos.len())].clone();
        let parity = m
            .iter()
            .enumerate()
            .fold(Parity::Even, |acc, (i, &e)| {
                if e % 2 == 1 && alg.parity_of(i) == Parity::Odd {
                    acc.flip()
                } else {
                    acc
                }
            });
        if parity != target {
            continue;
        }
        let c = alg
            .tower()
            .rat(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=3));
        if !c.is_zero() {
            terms.insert(m, c);
        }
    }
    PBWElement::from_terms(alg, terms)
}

pub fn binomial(n: u32, k: u32) -> i64 {
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// The expansion of `z y1^{n1} ... yp^{np}` through the twisted adjoint
/// action `delta = ad . alpha`, with the sign exponent
/// `|z| sum_i n_i |y_i| + sum_{i<j} (n_i - m_i)|y_i| m_j |y_j|`,
/// compared against the plain straightened product.
pub fn auto_identity_holds(
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
        let mut front = PBWElement::one(alg);
        for (yi, &y) in ys.iter().enumerate() {
            for _ in 0..m[yi] {
                front = front.mul(&PBWElement::generator(alg, y));
            }
        }
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
                if alg.parity_of(ys[i]) == Parity::Odd && alg.parity_of(ys[j]) == Parity::Odd {
                    sign += (ns[i] - m[i]) * m[j];
                }
            }
        }
        if sign % 2 == 1 {
            coeff = -coeff;
        }
        rhs = rhs.add(&front.mul(&delta_val).scale(&alg.tower().int(coeff)));
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
