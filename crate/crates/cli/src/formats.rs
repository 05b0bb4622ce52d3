//! On-disk formats: structure-constant files and functionals. Scalars are
//! strings in the surface grammar so that every value round-trips exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use dixmap::linalg::Parity;
use dixmap::scalar::{Scalar, Tower};
use dixmap::superlie::{AlgebraBuilder, SuperLieAlgebra};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub id: String,
    pub parity: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BracketSpec {
    pub left: String,
    pub right: String,
    pub value: BTreeMap<String, String>,
}

/// A structure-constant file. Omitted brackets are zero; missing skew
/// partners are filled in on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub generators: Vec<GeneratorSpec>,
    pub brackets: Vec<BracketSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalFile {
    pub name: String,
    /// generator id -> scalar string; omitted values are zero
    pub values: BTreeMap<String, String>,
}

#[derive(Debug)]
pub enum LoadError {
    Syntax(String),
    Semantic(String),
}

impl std::fmt::Display for LoadError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LoadError::Syntax(s) => write!(f, "syntax error: {}", s),
            LoadError::Semantic(s) => write!(f, "semantic error: {}", s),
        }
    }
}

pub fn parse_algebra_file(text: &str) -> Result<AlgebraFile, LoadError> {
    serde_json::from_str(text).map_err(|e| {
        LoadError::Syntax(format!(
            "line {}, column {}: {}",
            e.line(),
            e.column(),
            e
        ))
    })
}

/// Build the algebra from a parsed file. The returned tower collects the
/// radicands appearing in the structure constants.
pub fn algebra_from_file(file: &AlgebraFile) -> Result<(Arc<SuperLieAlgebra>, Tower), LoadError> {
    let mut tower = Tower::rationals();
    let mut seen = BTreeMap::new();
    for (i, g) in file.generators.iter().enumerate() {
        if seen.insert(g.id.clone(), i).is_some() {
            return Err(LoadError::Semantic(format!(
                "generator '{}' is declared twice",
                g.id
            )));
        }
        if g.parity != "even" && g.parity != "odd" {
            return Err(LoadError::Semantic(format!(
                "generator '{}' has parity '{}'; expected 'even' or 'odd'",
                g.id, g.parity
            )));
        }
    }
    let mut builder = AlgebraBuilder::new(&tower);
    for g in &file.generators {
        let parity = if g.parity == "even" {
            Parity::Even
        } else {
            Parity::Odd
        };
        builder = builder.gen(&g.id, parity);
    }
    let index = |id: &str| -> Result<usize, LoadError> {
        seen.get(id)
            .copied()
            .ok_or_else(|| LoadError::Semantic(format!("unknown generator '{}'", id)))
    };
    for b in &file.brackets {
        let li = index(&b.left)?;
        let ri = index(&b.right)?;
        let mut terms: Vec<(usize, Scalar)> = Vec::new();
        for (target, scalar_text) in &b.value {
            let ti = index(target)?;
            let (t2, v) = tower
                .parse(scalar_text)
                .map_err(|e| LoadError::Syntax(format!("scalar '{}': {}", scalar_text, e)))?;
            tower = t2;
            terms.push((ti, v));
        }
        builder = builder.bracket_by_index(li, ri, terms);
    }
    let alg = builder.build();
    Ok((alg, tower))
}

/// Load and validate; the diagnostic cites the first violated axiom.
pub fn load_algebra(text: &str) -> Result<(Arc<SuperLieAlgebra>, Tower), LoadError> {
    let file = parse_algebra_file(text)?;
    let (alg, tower) = algebra_from_file(&file)?;
    let report = alg.validate();
    if !report.is_valid() {
        return Err(LoadError::Semantic(report.violations.join("; ")));
    }
    Ok((alg, tower))
}

/// Canonical serialization: skew-derivable partners dropped, brackets
/// sorted by generator order, scalars reprinted through the tower.
pub fn serialize_algebra(alg: &SuperLieAlgebra, name: &str) -> AlgebraFile {
    let tower = alg.tower().clone();
    let n = alg.dim();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j && alg.parity_of(i) == Parity::Even {
                continue;
            }
            let v = alg.bracket_basis(i, j);
            let mut value = BTreeMap::new();
            for (k, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    value.insert(alg.labels()[k].clone(), tower.format(c));
                }
            }
            if !value.is_empty() {
                brackets.push(BracketSpec {
                    left: alg.labels()[i].clone(),
                    right: alg.labels()[j].clone(),
                    value,
                });
            }
        }
    }
    AlgebraFile {
        name: name.to_string(),
        generators: alg
            .labels()
            .iter()
            .zip(alg.parities())
            .map(|(l, p)| GeneratorSpec {
                id: l.clone(),
                parity: match p {
                    Parity::Even => "even".into(),
                    Parity::Odd => "odd".into(),
                },
            })
            .collect(),
        brackets,
    }
}

/// Load a functional against an algebra; odd support is rejected.
pub fn load_functional(
    text: &str,
    alg: &Arc<SuperLieAlgebra>,
    tower: &Tower,
) -> Result<(Vec<Scalar>, Tower, String), LoadError> {
    let file: FunctionalFile = serde_json::from_str(text).map_err(|e| {
        LoadError::Syntax(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })?;
    let mut tower = tower.clone();
    let mut values = vec![tower.zero(); alg.dim()];
    for (id, scalar_text) in &file.values {
        let Some(i) = alg.index_of(id) else {
            return Err(LoadError::Semantic(format!("unknown generator '{}'", id)));
        };
        let (t2, v) = tower
            .parse(scalar_text)
            .map_err(|e| LoadError::Syntax(format!("scalar '{}': {}", scalar_text, e)))?;
        tower = t2;
        values[i] = v;
    }
    for i in 0..alg.dim() {
        if alg.parity_of(i) == Parity::Odd && !values[i].is_zero() {
            return Err(LoadError::Semantic(format!(
                "functional takes the nonzero value '{}' on the odd generator '{}'",
                tower.format(&values[i]),
                alg.labels()[i]
            )));
        }
    }
    Ok((values, tower, file.name))
}

#[cfg(test)]
mod tests {
    use super::*;

    const H3: &str = r#"{
  "name": "heisenberg3",
  "generators": [
    {"id": "z", "parity": "even"},
    {"id": "q", "parity": "even"},
    {"id": "p", "parity": "even"}
  ],
  "brackets": [
    {"left": "q", "right": "p", "value": {"z": "1"}}
  ]
}"#;

    #[test]
    fn load_and_roundtrip() {
        let (alg, _) = load_algebra(H3).unwrap();
        assert_eq!(alg.dim(), 3);
        assert!(alg.is_nilpotent());
        // one normalization pass, then serialization is a fixpoint
        let file = serialize_algebra(&alg, "heisenberg3");
        let text = serde_json::to_string_pretty(&file).unwrap();
        let (alg2, _) = load_algebra(&text).unwrap();
        let file2 = serialize_algebra(&alg2, "heisenberg3");
        let text2 = serde_json::to_string_pretty(&file2).unwrap();
        assert_eq!(text, text2);
    }

    #[test]
    fn odd_square_bracket_and_completion() {
        let text = r#"{
  "name": "odd11",
  "generators": [
    {"id": "z", "parity": "even"},
    {"id": "c", "parity": "odd"}
  ],
  "brackets": [
    {"left": "c", "right": "c", "value": {"z": "1"}}
  ]
}"#;
        let (alg, _) = load_algebra(text).unwrap();
        assert_eq!(alg.sdim().odd, 1);
        // omitted skew partner is completed: [q, p] given, [p, q] derived
        let (alg, _) = load_algebra(H3).unwrap();
        let v = alg.bracket_basis(2, 1); // [p, q] = -z
        assert_eq!(v[0], alg.tower().int(-1));
    }

    #[test]
    fn diagnostics() {
        // syntax
        assert!(matches!(
            load_algebra("{ not json"),
            Err(LoadError::Syntax(_))
        ));
        // unknown id
        let text = r#"{"name":"x","generators":[{"id":"a","parity":"even"}],
            "brackets":[{"left":"a","right":"b","value":{}}]}"#;
        assert!(matches!(load_algebra(text), Err(LoadError::Semantic(_))));
        // violated axiom is cited
        let text = r#"{"name":"x","generators":[
            {"id":"a","parity":"even"},{"id":"b","parity":"even"},{"id":"c","parity":"even"}],
            "brackets":[
              {"left":"a","right":"b","value":{"c":"1"}},
              {"left":"b","right":"a","value":{"c":"1"}}
            ]}"#;
        match load_algebra(text) {
            Err(LoadError::Semantic(msg)) => assert!(msg.contains("superskew")),
            other => panic!("expected a semantic error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn functional_loading() {
        let (alg, tower) = load_algebra(H3).unwrap();
        let (lam, _, name) =
            load_functional(r#"{"name":"z*","values":{"z":"1"}}"#, &alg, &tower).unwrap();
        assert_eq!(name, "z*");
        assert!(lam[0].is_one());
        assert!(lam[1].is_zero());
    }
}
