//! Built-in example algebras with their standard functionals. These are
//! the fixtures exercised by the test suite, the self test and the golden
//! outputs of the command line tool.

use std::sync::Arc;

use crate::linalg::Parity;
use crate::scalar::{Scalar, Tower};
use crate::superlie::{AlgebraBuilder, SuperLieAlgebra};

/// Abelian algebra of super dimension (2|0).
pub fn abelian2() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("a", Parity::Even)
        .gen("b", Parity::Even)
        .build()
}

/// Heisenberg algebra: `[q, p] = z`.
pub fn heisenberg3() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("z", Parity::Even)
        .gen("q", Parity::Even)
        .gen("p", Parity::Even)
        .bracket("q", "p", &[("z", t.one())])
        .build()
}

/// Heisenberg algebra on two symplectic pairs: `[q_i, p_i] = z`.
pub fn heisenberg5() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("z", Parity::Even)
        .gen("q1", Parity::Even)
        .gen("p1", Parity::Even)
        .gen("q2", Parity::Even)
        .gen("p2", Parity::Even)
        .bracket("q1", "p1", &[("z", t.one())])
        .bracket("q2", "p2", &[("z", t.one())])
        .build()
}

/// Supercommutative (1|1) algebra.
pub fn odd11_null() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("z", Parity::Even)
        .gen("c", Parity::Odd)
        .build()
}

/// The (1|1) algebra with `[c, c] = z`.
pub fn odd11_clifford() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("z", Parity::Even)
        .gen("c", Parity::Odd)
        .bracket("c", "c", &[("z", t.one())])
        .build()
}

/// Super Heisenberg with a hyperbolic odd plane: `[c1, c2] = z`.
pub fn super_heisenberg_hyperbolic() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("z", Parity::Even)
        .gen("c1", Parity::Odd)
        .gen("c2", Parity::Odd)
        .bracket("c1", "c2", &[("z", t.one())])
        .build()
}

/// Super Heisenberg with a diagonal odd form: `[c_i, c_i] = z`.
pub fn super_heisenberg_diagonal() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("z", Parity::Even)
        .gen("c1", Parity::Odd)
        .gen("c2", Parity::Odd)
        .bracket("c1", "c1", &[("z", t.one())])
        .bracket("c2", "c2", &[("z", t.one())])
        .build()
}

/// Super dimension (1|3): a hyperbolic odd pair plus one diagonal
/// direction, all pairing into the center.
pub fn odd13() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("z", Parity::Even)
        .gen("c1", Parity::Odd)
        .gen("c2", Parity::Odd)
        .gen("c3", Parity::Odd)
        .bracket("c1", "c2", &[("z", t.one())])
        .bracket("c3", "c3", &[("z", t.one())])
        .build()
}

/// Heisenberg with an extra Clifford direction, super dimension (3|1).
pub fn mixed31() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("z", Parity::Even)
        .gen("q", Parity::Even)
        .gen("p", Parity::Even)
        .gen("c", Parity::Odd)
        .bracket("q", "p", &[("z", t.one())])
        .bracket("c", "c", &[("z", t.one())])
        .build()
}

/// Super dimension (2|2) with odd central directions, exercising the
/// quotient step of the reduction: `[u, c1] = c2`, `[c1, c1] = z`.
pub fn quot22() -> Arc<SuperLieAlgebra> {
    let t = Tower::rationals();
    AlgebraBuilder::new(&t)
        .gen("u", Parity::Even)
        .gen("z", Parity::Even)
        .gen("c1", Parity::Odd)
        .gen("c2", Parity::Odd)
        .bracket("u", "c1", &[("c2", t.one())])
        .bracket("c1", "c1", &[("z", t.one())])
        .build()
}

/// Dual-basis functional `label*` (1 on the named generator, 0 elsewhere).
pub fn dual_functional(alg: &SuperLieAlgebra, label: &str) -> Vec<Scalar> {
    let t = alg.tower().clone();
    let i = alg.index_of(label).expect("unknown generator label");
    assert_eq!(
        alg.parity_of(i),
        Parity::Even,
        "functionals vanish on odd generators"
    );
    let mut v = vec![t.zero(); alg.dim()];
    v[i] = t.one();
    v
}

pub fn zero_functional(alg: &SuperLieAlgebra) -> Vec<Scalar> {
    vec![alg.tower().zero(); alg.dim()]
}

/// One catalogue row: an algebra with its named functionals.
pub struct CatalogEntry {
    pub name: &'static str,
    pub algebra: Arc<SuperLieAlgebra>,
    pub functionals: Vec<(String, Vec<Scalar>)>,
}

/// The whole catalogue, used by the acceptance suite and the self test.
pub fn catalogue() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    {
        let algebra = abelian2();
        let t = algebra.tower().clone();
        let mut lam = vec![t.zero(); 2];
        lam[0] = t.one();
        out.push(CatalogEntry {
            name: "abelian2",
            functionals: vec![("a*".into(), lam), ("0".into(), zero_functional(&algebra))],
            algebra,
        });
    }
    {
        let algebra = heisenberg3();
        let lam = dual_functional(&algebra, "z");
        out.push(CatalogEntry {
            name: "heisenberg3",
            functionals: vec![("z*".into(), lam), ("0".into(), zero_functional(&algebra))],
            algebra,
        });
    }
    {
        let algebra = heisenberg5();
        let lam = dual_functional(&algebra, "z");
        out.push(CatalogEntry {
            name: "heisenberg5",
            functionals: vec![("z*".into(), lam)],
            algebra,
        });
    }
    {
        let algebra = odd11_null();
        let lam = dual_functional(&algebra, "z");
        out.push(CatalogEntry {
            name: "odd11_null",
            functionals: vec![("z*".into(), lam)],
            algebra,
        });
    }
    {
        let algebra = odd11_clifford();
        let lam = dual_functional(&algebra, "z");
        out.push(CatalogEntry {
            name: "odd11_clifford",
            functionals: vec![("z*".into(), lam), ("0".into(), zero_functional(&algebra))],
            algebra,
        });
    }
    {
        let algebra = super_heisenberg_hyperbolic();
        let lam = dual_functional(&algebra, "z");
        out.push(CatalogEntry {
            name: "super_heisenberg_hyperbolic",
            functionals: vec![("z*".into(), lam)],
            algebra,
        });
    }
    {
        let algebra = super_heisenberg_diagonal();
        let lam = dual_functional(&algebra, "z");
        out.push(CatalogEntry {
            name: "super_heisenberg_diagonal",
            functionals: vec![("z*".into(), lam)],
            algebra,
        });
    }
    {
        let algebra = odd13();
        let lam = dual_functional(&algebra, "z");
        out.push(CatalogEntry {
            name: "odd13",
            functionals: vec![("z*".into(), lam)],
            algebra,
        });
    }
    {
        let algebra = mixed31();
        let lam = dual_functional(&algebra, "z");
        out.push(CatalogEntry {
            name: "mixed31",
            functionals: vec![("z*".into(), lam)],
            algebra,
        });
    }
    {
        let algebra = quot22();
        let t = algebra.tower().clone();
        let lam_z = dual_functional(&algebra, "z");
        let mut lam_uz = dual_functional(&algebra, "z");
        lam_uz[algebra.index_of("u").unwrap()] = t.one();
        out.push(CatalogEntry {
            name: "quot22",
            functionals: vec![("z*".into(), lam_z), ("u*+z*".into(), lam_uz)],
            algebra,
        });
    }
    out
}
