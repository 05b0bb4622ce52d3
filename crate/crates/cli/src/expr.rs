//! Parser for element expressions: signed sums of terms, each a product
//! of an optional coefficient and generator powers, for example
//! `3/2*q*p^2 - z` or `c^2 - 1/2`. Odd powers above one are accepted by
//! the grammar and straightened away by the multiplication.

use std::sync::Arc;

use dixmap::pbw::PBWElement;
use dixmap::scalar::Tower;
use dixmap::superlie::SuperLieAlgebra;

use crate::formats::LoadError;

pub fn parse_element(
    alg: &Arc<SuperLieAlgebra>,
    tower: &Tower,
    text: &str,
) -> Result<(PBWElement, Tower), LoadError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        alg: alg.clone(),
        tower: tower.clone(),
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(LoadError::Syntax(format!(
            "unexpected input at offset {} of '{}'",
            p.pos, text
        )));
    }
    Ok((v, p.tower))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    alg: Arc<SuperLieAlgebra>,
    tower: Tower,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<PBWElement, LoadError> {
        let mut sign = 1i64;
        if let Some(c) = self.peek() {
            if c == '+' || c == '-' {
                self.pos += 1;
                if c == '-' {
                    sign = -1;
                }
            }
        }
        let mut acc = self.term()?;
        if sign < 0 {
            acc = acc.neg();
        }
        while let Some(c) = self.peek() {
            if c == '+' || c == '-' {
                self.pos += 1;
                let t = self.term()?;
                acc = if c == '+' { acc.add(&t) } else { acc.sub(&t) };
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PBWElement, LoadError> {
        let mut acc = self.factor()?;
        while let Some(c) = self.peek() {
            if c == '*' {
                self.pos += 1;
                let f = self.factor()?;
                acc = acc.mul(&f);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<PBWElement, LoadError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(LoadError::Syntax("expected ')'".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => self.scalar_factor(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                let ident: String = self.chars[start..self.pos].iter().collect();
                if ident == "sqrt" {
                    self.pos = start;
                    return self.scalar_factor();
                }
                let Some(g) = self.alg.index_of(&ident) else {
                    return Err(LoadError::Semantic(format!(
                        "unknown identifier '{}'",
                        ident
                    )));
                };
                let mut power = 1u32;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    self.skip_ws();
                    let dstart = self.pos;
                    while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    let digits: String = self.chars[dstart..self.pos].iter().collect();
                    power = digits
                        .parse()
                        .map_err(|_| LoadError::Syntax("bad exponent".into()))?;
                }
                let gen = PBWElement::generator(&self.alg, g);
                let mut acc = PBWElement::one(&self.alg);
                for _ in 0..power {
                    acc = acc.mul(&gen);
                }
                Ok(acc)
            }
            _ => Err(LoadError::Syntax("expected a factor".into())),
        }
    }

    /// A scalar atom: a rational literal or a `sqrt(...)` composite; the
    /// inside of a root is handed to the scalar grammar verbatim.
    fn scalar_factor(&mut self) -> Result<PBWElement, LoadError> {
        self.skip_ws();
        match self.chars.get(self.pos).copied() {
            Some(d) if d.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.chars.get(self.pos) == Some(&'/') {
                    self.pos += 1;
                    while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                }
                let run: String = self.chars[start..self.pos].iter().collect();
                let (tower, v) = self
                    .tower
                    .parse(&run)
                    .map_err(|e| LoadError::Syntax(format!("scalar '{}': {}", run, e)))?;
                self.tower = tower;
                Ok(PBWElement::scalar(&self.alg, v))
            }
            Some('s') => {
                let rest: String = self.chars[self.pos..].iter().collect();
                if !rest.starts_with("sqrt") {
                    return Err(LoadError::Syntax("expected 'sqrt'".into()));
                }
                self.pos += 4;
                self.skip_ws();
                if self.chars.get(self.pos) != Some(&'(') {
                    return Err(LoadError::Syntax("expected '(' after sqrt".into()));
                }
                let start = self.pos + 1;
                let mut depth = 1usize;
                let mut i = start;
                while i < self.chars.len() {
                    match self.chars[i] {
                        '(' => depth += 1,
                        ')' => {
                            depth -= 1;
                            if depth == 0 {
                                break;
                            }
                        }
                        _ => {}
                    }
                    i += 1;
                }
                if depth != 0 {
                    return Err(LoadError::Syntax("unbalanced sqrt(...)".into()));
                }
                let inner: String = self.chars[start..i].iter().collect();
                self.pos = i + 1;
                let text = format!("sqrt({})", inner);
                let (tower, v) = self
                    .tower
                    .parse(&text)
                    .map_err(|e| LoadError::Syntax(format!("scalar '{}': {}", text, e)))?;
                self.tower = tower;
                Ok(PBWElement::scalar(&self.alg, v))
            }
            _ => Err(LoadError::Syntax("expected a scalar".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dixmap::catalog;

    #[test]
    fn parse_examples() {
        let alg = catalog::heisenberg3();
        let t = alg.tower().clone();
        let (u, _) = parse_element(&alg, &t, "z - 1").unwrap();
        assert_eq!(u.render(), "z - 1");
        // reversed product straightens
        let (u, _) = parse_element(&alg, &t, "3/2*p*q - z").unwrap();
        let (v, _) = parse_element(&alg, &t, "3/2*q*p - 3/2*z - z").unwrap();
        assert_eq!(u, v);
        // whitespace insensitivity
        let (w, _) = parse_element(&alg, &t, "  3/2 * p * q-z ").unwrap();
        assert_eq!(u, w);
    }

    #[test]
    fn odd_square_straightens() {
        let alg = catalog::odd11_clifford();
        let t = alg.tower().clone();
        let (u, _) = parse_element(&alg, &t, "c^2").unwrap();
        assert_eq!(u.render(), "1/2*z");
    }

    #[test]
    fn sqrt_coefficients_extend_the_tower() {
        let alg = catalog::heisenberg3();
        let t = alg.tower().clone();
        let (u, tower) = parse_element(&alg, &t, "sqrt(2)*p - q").unwrap();
        assert_eq!(tower.depth(), 1);
        assert!(!u.is_zero());
    }

    #[test]
    fn unknown_identifier_is_semantic() {
        let alg = catalog::heisenberg3();
        let t = alg.tower().clone();
        assert!(matches!(
            parse_element(&alg, &t, "z + w"),
            Err(LoadError::Semantic(_))
        ));
    }

    #[test]
    fn print_parse_fixpoint() {
        let alg = catalog::mixed31();
        let t = alg.tower().clone();
        for text in ["q*p^2 - 2*c", "1/3*z^3 + q*c", "p - q + 5"] {
            let (u, tw) = parse_element(&alg, &t, text).unwrap();
            let printed = u.render();
            let (v, _) = parse_element(&alg, &tw, &printed).unwrap();
            assert_eq!(u, v, "fixpoint for '{}'", text);
            assert_eq!(printed, v.render());
        }
    }
}
