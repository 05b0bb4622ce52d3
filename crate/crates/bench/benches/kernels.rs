//! Microbenchmarks of the hot kernels: straightening products, the
//! reduction morphism, and truncated annihilator slices.

use criterion::{criterion_group, criterion_main, Criterion};

use dixmap::catalog;
use dixmap::dixmier::build_dixmier;
use dixmap::induced::InducedTruncation;
use dixmap::linalg::Parity;
use dixmap::pbw::{monomials_up_to, PBWElement};
use dixmap::polarization::polarize;
use dixmap::superlie::TermMap;

fn straighten(c: &mut Criterion) {
    let alg = catalog::heisenberg5();
    let monos = monomials_up_to(&alg, 3);
    let t = alg.tower().clone();
    let mut terms_u = TermMap::new();
    let mut terms_v = TermMap::new();
    for (i, m) in monos.iter().enumerate() {
        if i % 7 == 3 {
            terms_u.insert(m.clone(), t.int((i % 5) as i64 + 1));
        }
        if i % 9 == 4 {
            terms_v.insert(m.clone(), t.int((i % 4) as i64 + 1));
        }
    }
    let u = PBWElement::from_terms(&alg, terms_u);
    let v = PBWElement::from_terms(&alg, terms_v);
    c.bench_function("straighten_h5_deg3_product", |b| {
        b.iter(|| std::hint::black_box(u.mul(&v)))
    });
}

fn reduction(c: &mut Criterion) {
    c.bench_function("reduction_morphism_mixed31", |b| {
        b.iter(|| {
            let alg = catalog::mixed31();
            let lam = catalog::dual_functional(&alg, "z");
            std::hint::black_box(build_dixmier(&alg, &lam).unwrap())
        })
    });
}

fn annihilator(c: &mut Criterion) {
    let alg = catalog::heisenberg3();
    let lam = catalog::dual_functional(&alg, "z");
    let pol = polarize(&alg, &lam).unwrap();
    let trunc = InducedTruncation::new(&alg, &pol.subspace, &lam, 6, Parity::Even).unwrap();
    c.bench_function("annihilator_slice_h3", |b| {
        b.iter(|| std::hint::black_box(trunc.annihilator_truncated(2, 6).unwrap()))
    });
}

criterion_group!(benches, straighten, reduction, annihilator);
criterion_main!(benches);
