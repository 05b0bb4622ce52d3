//! Subcommand implementations. Every command returns its exit code with
//! the report text; the binary prints the text and exits with the code.
//!
//! Exit contract: 0 success/true, 1 false/distinct, 2 inconclusive,
//! 3 input error.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde_json::json;

use dixmap::catalog;
use dixmap::dixmier::{build_dixmier, split_maximal, SplitOutcome};
use dixmap::induced::InducedTruncation;
use dixmap::linalg::{GradedSubspace, Parity};
use dixmap::orbits::{orbit_equal, OrbitVerdict};
use dixmap::pbw::PBWElement;
use dixmap::polarization::polarize;
use dixmap::scalar::{Scalar, Tower};
use dixmap::superlie::SuperLieAlgebra;

use crate::expr::parse_element;
use crate::formats::{load_algebra, load_functional, serialize_algebra, LoadError};

pub struct Outcome {
    pub code: i32,
    pub text: String,
}

fn ok(text: String) -> Outcome {
    Outcome { code: 0, text }
}

fn input_error(msg: impl std::fmt::Display) -> Outcome {
    Outcome {
        code: 3,
        text: format!("error: {}", msg),
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {}", path.display(), e)))
}

fn load_alg(path: &Path) -> Result<(Arc<SuperLieAlgebra>, Tower), Outcome> {
    let text = read(path)?;
    load_algebra(&text).map_err(input_error)
}

fn load_lam(
    path: &Path,
    alg: &Arc<SuperLieAlgebra>,
    tower: &Tower,
) -> Result<(Vec<Scalar>, Tower, String), Outcome> {
    let text = read(path)?;
    load_functional(&text, alg, tower).map_err(input_error)
}

fn subspace_json(tower: &Tower, s: &GradedSubspace) -> serde_json::Value {
    let rows = |m: &dixmap::linalg::Matrix| -> Vec<Vec<String>> {
        (0..m.rows)
            .map(|r| m.row(r).iter().map(|c| tower.format(c)).collect())
            .collect()
    };
    json!({
        "even": rows(&s.even),
        "odd": rows(&s.odd),
    })
}

pub fn validate_cmd(path: &Path, as_json: bool) -> Outcome {
    let text = match read(path) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let parsed = match crate::formats::parse_algebra_file(&text) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let built = match crate::formats::algebra_from_file(&parsed) {
        Ok(b) => b,
        Err(e @ LoadError::Syntax(_)) => return input_error(e),
        Err(e @ LoadError::Semantic(_)) => return input_error(e),
    };
    let report = built.0.validate();
    if as_json {
        let body = json!({
            "name": parsed.name,
            "sdim": format!("{}", built.0.sdim()),
            "valid": report.is_valid(),
            "violations": report.violations,
            "nilpotent": if report.is_valid() { Some(built.0.is_nilpotent()) } else { None },
        });
        Outcome {
            code: if report.is_valid() { 0 } else { 1 },
            text: serde_json::to_string_pretty(&body).unwrap(),
        }
    } else if report.is_valid() {
        ok(format!(
            "{}: valid, sdim {}, {}",
            parsed.name,
            built.0.sdim(),
            if built.0.is_nilpotent() {
                "nilpotent"
            } else {
                "not nilpotent"
            }
        ))
    } else {
        Outcome {
            code: 1,
            text: format!("{}: invalid\n  {}", parsed.name, report.violations.join("\n  ")),
        }
    }
}

pub fn polarize_cmd(alg_path: &Path, lam_path: &Path, as_json: bool) -> Outcome {
    let (alg, tower) = match load_alg(alg_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (lam, _tower, lam_name) = match load_lam(lam_path, &alg, &tower) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let pol = match polarize(&alg, &lam) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let radicands: Vec<String> = pol
        .tower
        .radicands()
        .iter()
        .map(|r| pol.tower.format(r))
        .collect();
    if as_json {
        let body = json!({
            "functional": lam_name,
            "sdim": format!("{}", pol.subspace.sdim()),
            "subspace": subspace_json(&pol.tower, &pol.subspace),
            "adjoined_radicands": radicands,
        });
        ok(serde_json::to_string_pretty(&body).unwrap())
    } else {
        let mut text = format!(
            "polarization at {}: sdim {}\n",
            lam_name,
            pol.subspace.sdim()
        );
        for (v, p) in pol.subspace.basis() {
            text.push_str(&format!(
                "  {}: {}\n",
                p,
                PBWElement::from_vector(&alg, &v).render()
            ));
        }
        if !radicands.is_empty() {
            text.push_str(&format!("adjoined radicands: {}\n", radicands.join(", ")));
        }
        ok(text.trim_end().to_string())
    }
}

pub fn dixmier_cmd(alg_path: &Path, lam_path: &Path, as_json: bool) -> Outcome {
    let (alg, tower) = match load_alg(alg_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (lam, _tower, lam_name) = match load_lam(lam_path, &alg, &tower) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let m = match build_dixmier(&alg, &lam) {
        Ok(m) => m,
        Err(e) => return input_error(e),
    };
    let images: BTreeMap<String, String> = alg
        .labels()
        .iter()
        .zip(m.generator_images.iter())
        .map(|(l, img)| (l.clone(), img.render()))
        .collect();
    if as_json {
        let body = json!({
            "functional": lam_name,
            "p": m.p,
            "q": m.q,
            "steps": m.step_summaries(),
            "adjoined_radicands": m.adjoined_radicands(),
            "generator_images": images,
        });
        ok(serde_json::to_string_pretty(&body).unwrap())
    } else {
        let mut text = format!("(p, q) = ({}, {}) at {}\n", m.p, m.q, lam_name);
        for s in m.step_summaries() {
            let kind = s.get("kind").cloned().unwrap_or_default();
            let detail: Vec<String> = s
                .iter()
                .filter(|(k, _)| k.as_str() != "kind")
                .map(|(k, v)| format!("{}={}", k, v))
                .collect();
            text.push_str(&format!("  step {}: {}\n", kind, detail.join(", ")));
        }
        text.push_str("generator images:\n");
        for (l, img) in &images {
            text.push_str(&format!("  {} -> {}\n", l, img));
        }
        let rad = m.adjoined_radicands();
        if !rad.is_empty() {
            text.push_str(&format!("adjoined radicands: {}\n", rad.join(", ")));
        }
        ok(text.trim_end().to_string())
    }
}

pub fn member_cmd(alg_path: &Path, lam_path: &Path, element: &str, as_json: bool) -> Outcome {
    let (alg, tower) = match load_alg(alg_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (lam, tower, lam_name) = match load_lam(lam_path, &alg, &tower) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (u, _tower) = match parse_element(&alg, &tower, element) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let m = match build_dixmier(&alg, &lam) {
        Ok(m) => m,
        Err(e) => return input_error(e),
    };
    let image = m.evaluate(&u);
    let member = image.is_zero();
    let text = if as_json {
        serde_json::to_string_pretty(&json!({
            "functional": lam_name,
            "element": u.render(),
            "member": member,
            "image": image.render(),
        }))
        .unwrap()
    } else if member {
        format!("member: {} lies in the kernel ideal", u.render())
    } else {
        format!(
            "not a member: {} maps to {}",
            u.render(),
            image.render()
        )
    };
    Outcome {
        code: if member { 0 } else { 1 },
        text,
    }
}

#[allow(clippy::too_many_arguments)]
pub fn orbit_eq_cmd(
    alg_path: &Path,
    a_path: &Path,
    b_path: &Path,
    degree: usize,
    tries: usize,
    seed: u64,
    as_json: bool,
) -> Outcome {
    let (alg, tower) = match load_alg(alg_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (lam_a, tower, _) = match load_lam(a_path, &alg, &tower) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (lam_b, tower, _) = match load_lam(b_path, &alg, &tower) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let verdict = match orbit_equal(&alg, &lam_a, &lam_b, degree, tries, seed) {
        Ok(v) => v,
        Err(e) => return input_error(e),
    };
    let (code, kind, detail) = match &verdict {
        OrbitVerdict::EqualWithWitness(w) => {
            let gens: Vec<Vec<String>> = w
                .generators
                .iter()
                .map(|x| x.iter().map(|c| tower.format(c)).collect())
                .collect();
            (0, "equal_with_witness", json!({ "witness": gens }))
        }
        OrbitVerdict::EqualByIdealSlice { degree } => (
            2,
            "equal_by_ideal_slice",
            json!({ "degree": degree }),
        ),
        OrbitVerdict::DistinctWithSeparator(sep) => (
            1,
            "distinct_with_separator",
            json!({ "separator": sep.render() }),
        ),
        OrbitVerdict::Inconclusive => (2, "inconclusive", json!({})),
    };
    let text = if as_json {
        serde_json::to_string_pretty(&json!({
            "verdict": kind,
            "detail": detail,
        }))
        .unwrap()
    } else {
        format!("{}: {}", kind, detail)
    };
    Outcome { code, text }
}

pub fn split_max_cmd(alg_path: &Path, lam_path: &Path, as_json: bool) -> Outcome {
    let (alg, tower) = match load_alg(alg_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (lam, _tower, lam_name) = match load_lam(lam_path, &alg, &tower) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let m = match build_dixmier(&alg, &lam) {
        Ok(m) => m,
        Err(e) => return input_error(e),
    };
    match split_maximal(&m) {
        Ok(SplitOutcome::AlreadyMaximal) => {
            let text = if as_json {
                serde_json::to_string_pretty(&json!({
                    "functional": lam_name,
                    "q": m.q,
                    "outcome": "already_maximal",
                }))
                .unwrap()
            } else {
                format!(
                    "q = {} is even: the kernel ideal is already maximal in the underlying algebra",
                    m.q
                )
            };
            ok(text)
        }
        Ok(SplitOutcome::Split(split)) => {
            let sq = split.tower.format(&split.sqrt_square);
            let text = if as_json {
                serde_json::to_string_pretty(&json!({
                    "functional": lam_name,
                    "q": m.q,
                    "outcome": "split",
                    "clifford_value": sq,
                    "checks": ["sigma_swaps", "contains_kernel", "intersection_is_kernel"],
                }))
                .unwrap()
            } else {
                format!(
                    "q = {} is odd: two maximal ideals above the kernel, evaluations g -> +-{}\nchecked: the parity automorphism swaps them, both contain the kernel,\nand their intersection equals the kernel on the degree-3 slice",
                    m.q, sq
                )
            };
            ok(text)
        }
        Err(e) => input_error(e),
    }
}

pub fn induce_cmd(alg_path: &Path, lam_path: &Path, degree: usize, as_json: bool) -> Outcome {
    let (alg, tower) = match load_alg(alg_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let (lam, _tower, lam_name) = match load_lam(lam_path, &alg, &tower) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let pol = match polarize(&alg, &lam) {
        Ok(p) => p,
        Err(e) => return input_error(e),
    };
    let trunc = match InducedTruncation::new(&alg, &pol.subspace, &lam, degree, Parity::Even) {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    let ann1 = match trunc.annihilator_truncated(1, degree) {
        Ok(a) => a,
        Err(e) => return input_error(e),
    };
    let slice: Vec<String> = ann1.iter().map(|u| u.render()).collect();
    let mut dims = Vec::new();
    for d in 0..=degree {
        dims.push(
            trunc
                .basis
                .iter()
                .filter(|m| m.iter().map(|&e| e as usize).sum::<usize>() <= d)
                .count(),
        );
    }
    if as_json {
        ok(serde_json::to_string_pretty(&json!({
            "functional": lam_name,
            "polarization_sdim": format!("{}", pol.subspace.sdim()),
            "degree_bound": degree,
            "slice_dims": dims,
            "annihilator_degree_1": slice,
        }))
        .unwrap())
    } else {
        ok(format!(
            "induced module at {} over a polarization of sdim {}\nslice dimensions by degree: {:?}\ndegree-1 annihilator slice: {}",
            lam_name,
            pol.subspace.sdim(),
            dims,
            if slice.is_empty() {
                "(empty)".to_string()
            } else {
                slice.join(", ")
            }
        ))
    }
}

pub fn selftest_cmd(seed: u64, as_json: bool) -> Outcome {
    let mut lines = Vec::new();
    let mut all_ok = true;
    let mut check = |name: &str, result: Result<(), String>| match result {
        Ok(()) => lines.push((name.to_string(), true, String::new())),
        Err(e) => {
            all_ok = false;
            lines.push((name.to_string(), false, e));
        }
    };
    for entry in catalog::catalogue() {
        let alg = &entry.algebra;
        check(&format!("validate {}", entry.name), {
            let r = alg.validate();
            if r.is_valid() {
                Ok(())
            } else {
                Err(r.violations.join("; "))
            }
        });
        for (name, lam) in &entry.functionals {
            let label = format!("{} at {}", entry.name, name);
            let m = match build_dixmier(alg, lam) {
                Ok(m) => m,
                Err(e) => {
                    check(&format!("reduction {}", label), Err(e.to_string()));
                    continue;
                }
            };
            check(&format!("reduction {}", label), Ok(()));
            check(&format!("indices {}", label), {
                match dixmap::dixmier::pq_expected(alg, lam) {
                    Ok(pq) if pq == (m.p, m.q) => Ok(()),
                    Ok(pq) => Err(format!("recursion ({}, {}) vs form {:?}", m.p, m.q, pq)),
                    Err(e) => Err(e.to_string()),
                }
            });
            check(&format!("relations {}", label), {
                let f = m.validate_step_images();
                if f.is_empty() {
                    Ok(())
                } else {
                    Err(f.join("; "))
                }
            });
            check(&format!("split {}", label), {
                split_maximal(&m).map(|_| ()).map_err(|e| e.to_string())
            });
        }
    }
    // one orbit witness driven by the seed
    {
        let alg = catalog::heisenberg3();
        let t = alg.tower().clone();
        let lam = catalog::dual_functional(&alg, "z");
        let mut lam2 = lam.clone();
        lam2[2] = t.int(-1);
        check(
            "orbit witness heisenberg3",
            match orbit_equal(&alg, &lam, &lam2, 3, 4, seed) {
                Ok(OrbitVerdict::EqualWithWitness(_)) => Ok(()),
                Ok(other) => Err(format!("unexpected verdict {:?}", other)),
                Err(e) => Err(e.to_string()),
            },
        );
    }
    let mut text = String::new();
    for (name, okflag, err) in &lines {
        if *okflag {
            text.push_str(&format!("ok   {}\n", name));
        } else {
            text.push_str(&format!("FAIL {}: {}\n", name, err));
        }
    }
    if as_json {
        let body = json!({
            "checks": lines
                .iter()
                .map(|(n, f, e)| json!({"name": n, "ok": f, "error": e}))
                .collect::<Vec<_>>(),
            "all_ok": all_ok,
        });
        Outcome {
            code: if all_ok { 0 } else { 1 },
            text: serde_json::to_string_pretty(&body).unwrap(),
        }
    } else {
        Outcome {
            code: if all_ok { 0 } else { 1 },
            text: text.trim_end().to_string(),
        }
    }
}

pub fn serialize_cmd(alg_path: &Path) -> Outcome {
    let (alg, _) = match load_alg(alg_path) {
        Ok(v) => v,
        Err(o) => return o,
    };
    let name = alg_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "algebra".to_string());
    let file = serialize_algebra(&alg, &name);
    ok(serde_json::to_string_pretty(&file).unwrap())
}
