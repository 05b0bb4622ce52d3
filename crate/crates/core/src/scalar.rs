//! Exact scalars in a lazily grown multi-quadratic extension of the
//! rationals.
//!
//! A [`Tower`] is an ordered list of radicands `r_1, ..., r_m`, each a
//! nonzero non-square expressed in the levels below it. Elements are
//! rational coefficient vectors over the `2^m` products of the adjoined
//! square roots, indexed by bit masks. Every operation is exact; an
//! element is zero exactly when all stored coefficients are zero.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficient map over square-root product masks.
type Coeffs = BTreeMap<u64, BigRational>;

#[derive(Debug, PartialEq, Eq)]
struct TowerInner {
    /// Radicand of each level, expressed over the levels below it.
    levels: Vec<Coeffs>,
}

/// An extension field `Q(sqrt(r_1), ..., sqrt(r_m))`, immutable once built.
///
/// Extending a tower creates a new value; scalars built under a prefix
/// stay valid in every extension, so arithmetic lifts silently.
#[derive(Debug, Clone)]
pub struct Tower {
    inner: Arc<TowerInner>,
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}
impl Eq for Tower {}

/// An exact element of a [`Tower`]. Carries its tower so that mixed
/// arithmetic between a tower and one of its extensions lifts on the fly.
#[derive(Debug, Clone)]
pub struct Scalar {
    tower: Tower,
    coeffs: Coeffs,
}

fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let num = x.numer();
    let den = x.denom();
    let sn = num.sqrt();
    let sd = den.sqrt();
    if &(&sn * &sn) == num && &(&sd * &sd) == den {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Strip square factors out of a nonzero integer by trial division,
/// returning `(outer, core)` with `n = outer^2 * core`.
fn strip_square_factors(n: &BigInt) -> (BigInt, BigInt) {
    let mut core = n.clone();
    let mut outer = BigInt::one();
    let mut d = BigInt::from(2);
    let limit = BigInt::from(1_000_000);
    while (&d * &d) <= core.abs() && d <= limit {
        let dd = &d * &d;
        while (&core % &dd).is_zero() {
            core /= &dd;
            outer *= &d;
        }
        d += 1;
    }
    (outer, core)
}

impl Tower {
    /// The base field `Q`.
    pub fn rationals() -> Self {
        Tower {
            inner: Arc::new(TowerInner { levels: Vec::new() }),
        }
    }

    pub fn depth(&self) -> usize {
        self.inner.levels.len()
    }

    /// The radicands adjoined so far, as scalars of this tower.
    pub fn radicands(&self) -> Vec<Scalar> {
        self.inner
            .levels
            .iter()
            .map(|c| Scalar {
                tower: self.clone(),
                coeffs: c.clone(),
            })
            .collect()
    }

    /// True when `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Tower) -> bool {
        if Arc::ptr_eq(&self.inner, &other.inner) {
            return true;
        }
        let a = &self.inner.levels;
        let b = &other.inner.levels;
        a.len() <= b.len() && a[..] == b[..a.len()]
    }

    pub fn zero(&self) -> Scalar {
        Scalar {
            tower: self.clone(),
            coeffs: Coeffs::new(),
        }
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        self.rational(rat_int(n))
    }

    pub fn rat(&self, num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        self.rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn rational(&self, q: BigRational) -> Scalar {
        let mut coeffs = Coeffs::new();
        if !q.is_zero() {
            coeffs.insert(0, q);
        }
        Scalar {
            tower: self.clone(),
            coeffs,
        }
    }

    /// The adjoined root of level `i`, as an element.
    pub fn root(&self, i: usize) -> Scalar {
        assert!(i < self.depth(), "no such tower level");
        let mut coeffs = Coeffs::new();
        coeffs.insert(1u64 << i, BigRational::one());
        Scalar {
            tower: self.clone(),
            coeffs,
        }
    }

    fn mul_coeffs(&self, a: &Coeffs, b: &Coeffs) -> Coeffs {
        let mut acc = Coeffs::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                let c = ca * cb;
                let common = ma & mb;
                let rest = ma ^ mb;
                if common == 0 {
                    add_term(&mut acc, rest, c);
                } else {
                    // basis_u * basis_v = (prod of common radicands) * basis_{u xor v}
                    let mut factor = Coeffs::new();
                    factor.insert(rest, c);
                    let mut bits = common;
                    while bits != 0 {
                        let i = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        factor = self.mul_coeffs(&factor, &self.inner.levels[i]);
                    }
                    for (m, c) in factor {
                        add_term(&mut acc, m, c);
                    }
                }
            }
        }
        acc
    }

    fn inv_coeffs(&self, x: &Coeffs) -> Result<Coeffs> {
        if x.is_empty() {
            return Err(Error::DivisionByZero);
        }
        if x.keys().all(|m| *m == 0) {
            let c = &x[&0];
            let mut out = Coeffs::new();
            out.insert(0, c.recip());
            return Ok(out);
        }
        let top = x
            .keys()
            .filter(|m| **m != 0)
            .map(|m| 63 - m.leading_zeros())
            .max()
            .unwrap();
        let bit = 1u64 << top;
        let mut a = Coeffs::new();
        let mut b = Coeffs::new();
        for (m, c) in x {
            if m & bit == 0 {
                a.insert(*m, c.clone());
            } else {
                b.insert(m ^ bit, c.clone());
            }
        }
        // 1/(a + b*sqrt(r)) = (a - b*sqrt(r)) / (a^2 - b^2 r)
        let r = &self.inner.levels[top as usize];
        let a2 = self.mul_coeffs(&a, &a);
        let b2r = self.mul_coeffs(&self.mul_coeffs(&b, &b), r);
        let mut denom = a2;
        for (m, c) in b2r {
            add_term(&mut denom, m, -c);
        }
        // denom vanishes only if sqrt(r) lay in the lower levels, which the
        // adjunction procedure rules out.
        let denom_inv = self.inv_coeffs(&denom)?;
        let mut conj = a;
        for (m, c) in b {
            add_term(&mut conj, m | bit, -c);
        }
        Ok(self.mul_coeffs(&conj, &denom_inv))
    }

    /// Decide whether `x` is a square in this tower; returns a canonical root.
    fn sqrt_coeffs(&self, x: &Coeffs, levels: usize) -> Option<Coeffs> {
        if x.is_empty() {
            return Some(Coeffs::new());
        }
        if levels == 0 {
            let c = x.get(&0)?;
            if x.len() != 1 {
                return None;
            }
            let s = rational_sqrt(c)?;
            let mut out = Coeffs::new();
            if !s.is_zero() {
                out.insert(0, s);
            }
            return Some(out);
        }
        let top = levels - 1;
        let bit = 1u64 << top;
        let mut a = Coeffs::new();
        let mut b = Coeffs::new();
        for (m, c) in x {
            if m & bit == 0 {
                a.insert(*m, c.clone());
            } else {
                b.insert(m ^ bit, c.clone());
            }
        }
        let r = &self.inner.levels[top];
        if b.is_empty() {
            // s in the prefix, or s = b*sqrt(r) with b^2 = x/r.
            if let Some(s) = self.sqrt_coeffs(&a, top) {
                return Some(s);
            }
            let r_inv = self.inv_coeffs(r).ok()?;
            let quo = self.mul_coeffs(&a, &r_inv);
            if let Some(broot) = self.sqrt_coeffs(&quo, top) {
                let mut out = Coeffs::new();
                for (m, c) in broot {
                    out.insert(m | bit, c);
                }
                return Some(normalize_sign(out));
            }
            return None;
        }
        // x = A + B sqrt(r), B != 0; s = a + b sqrt(r) needs
        // a^2 = t with 4t^2 - 4At + B^2 r = 0, b = B / (2a).
        let b2 = self.mul_coeffs(&b, &b);
        let b2r = self.mul_coeffs(&b2, r);
        let a2 = self.mul_coeffs(&a, &a);
        let mut disc = a2;
        for (m, c) in b2r {
            add_term(&mut disc, m, -c);
        }
        let d = self.sqrt_coeffs(&disc, top)?;
        for sign in [1i64, -1] {
            let mut t = a.clone();
            for (m, c) in &d {
                add_term(&mut t, *m, c * rat_int(sign));
            }
            scale(&mut t, &BigRational::new(BigInt::one(), BigInt::from(2)));
            let aa = match self.sqrt_coeffs(&t, top) {
                Some(v) if !v.is_empty() => v,
                _ => continue,
            };
            let two_a_inv = match self.inv_coeffs(&aa) {
                Ok(mut v) => {
                    scale(&mut v, &BigRational::new(BigInt::one(), BigInt::from(2)));
                    v
                }
                Err(_) => continue,
            };
            let bb = self.mul_coeffs(&b, &two_a_inv);
            let mut cand = aa;
            for (m, c) in bb {
                add_term(&mut cand, m | bit, c);
            }
            let sq = self.mul_coeffs(&cand, &cand);
            if &sq == x {
                return Some(normalize_sign(cand));
            }
        }
        None
    }

    /// Test whether `x` already has a square root in this tower.
    pub fn sqrt_in_tower(&self, x: &Scalar) -> Option<Scalar> {
        let x = x.lifted_to(self);
        let c = self.sqrt_coeffs(&x.coeffs, self.depth())?;
        Some(Scalar {
            tower: self.clone(),
            coeffs: c,
        })
    }

    /// Adjoin a square root of `radicand`, returning the (possibly
    /// extended) tower and the root. Idempotent when the root already
    /// exists. Rational radicands are reduced to a square-free core.
    pub fn adjoin_sqrt(&self, radicand: &Scalar) -> Result<(Tower, Scalar)> {
        let radicand = radicand.lifted_to(self);
        if radicand.is_zero() {
            return Err(Error::ZeroRadicand);
        }
        if let Some(root) = self.sqrt_in_tower(&radicand) {
            return Ok((self.clone(), root));
        }
        // sqrt(p/q) = sqrt(pq)/q; pull square factors out of pq.
        let (stored, prefactor) = if radicand.coeffs.len() == 1 && radicand.coeffs.contains_key(&0)
        {
            let q = &radicand.coeffs[&0];
            let n = q.numer() * q.denom();
            let (outer, core) = strip_square_factors(&n);
            let mut c = Coeffs::new();
            c.insert(0, BigRational::from_integer(core));
            (c, BigRational::new(outer, q.denom().clone()))
        } else {
            (radicand.coeffs.clone(), BigRational::one())
        };
        let mut levels = self.inner.levels.clone();
        levels.push(stored);
        let bit = 1u64 << (levels.len() - 1);
        let tower = Tower {
            inner: Arc::new(TowerInner { levels }),
        };
        let mut coeffs = Coeffs::new();
        coeffs.insert(bit, prefactor);
        let root = Scalar {
            tower: tower.clone(),
            coeffs,
        };
        Ok((tower, root))
    }

    /// Render a scalar using the surface grammar (`1/2 + 3*sqrt(2)`).
    /// Falls back to the scalar's own tower when it is deeper.
    pub fn format(&self, x: &Scalar) -> String {
        if self.depth() < x.tower().depth() {
            debug_assert!(self.is_prefix_of(x.tower()));
            return x.tower().clone().format(x);
        }
        let x = x.lifted_to(self);
        if x.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (mask, c)) in x.coeffs.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || *mask == 0 {
                parts.push(format_rational(&mag));
            }
            let mut bits = *mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let inner = Scalar {
                    tower: self.clone(),
                    coeffs: self.inner.levels[i].clone(),
                };
                parts.push(format!("sqrt({})", self.format(&inner)));
            }
            out.push_str(&parts.join("*"));
        }
        out
    }

    /// Parse a scalar, adjoining square roots as required. Returns the
    /// possibly extended tower together with the value.
    pub fn parse(&self, text: &str) -> Result<(Tower, Scalar)> {
        let mut p = ScalarParser {
            chars: text.chars().collect(),
            pos: 0,
            tower: self.clone(),
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::ScalarParse(format!(
                "unexpected input at offset {}",
                p.pos
            )));
        }
        Ok((p.tower, v))
    }
}

fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn add_term(acc: &mut Coeffs, mask: u64, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&mask) {
        Some(slot) => {
            *slot += c;
            if slot.is_zero() {
                acc.remove(&mask);
            }
        }
        None => {
            acc.insert(mask, c);
        }
    }
}

fn scale(x: &mut Coeffs, by: &BigRational) {
    if by.is_zero() {
        x.clear();
        return;
    }
    for c in x.values_mut() {
        *c *= by;
    }
}

fn normalize_sign(x: Coeffs) -> Coeffs {
    let neg = x
        .iter()
        .next()
        .map(|(_, c)| c.is_negative())
        .unwrap_or(false);
    if neg {
        x.into_iter().map(|(m, c)| (m, -c)).collect()
    } else {
        x
    }
}

impl Scalar {
    fn lifted_to(&self, tower: &Tower) -> Scalar {
        debug_assert!(
            self.tower.is_prefix_of(tower),
            "scalar tower is not a prefix of the target tower"
        );
        Scalar {
            tower: tower.clone(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// The common tower of two scalars (the deeper one).
    fn join_tower(&self, other: &Scalar) -> Tower {
        if self.tower.depth() >= other.tower.depth() {
            assert!(
                other.tower.is_prefix_of(&self.tower),
                "incompatible scalar towers"
            );
            self.tower.clone()
        } else {
            assert!(
                self.tower.is_prefix_of(&other.tower),
                "incompatible scalar towers"
            );
            other.tower.clone()
        }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).map(|c| c.is_one()).unwrap_or(false)
    }

    /// The rational part (mask-0 coefficient).
    pub fn rational_part(&self) -> BigRational {
        self.coeffs.get(&0).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Some(q) when the scalar lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs.is_empty() {
            return Some(BigRational::zero());
        }
        if self.coeffs.len() == 1 {
            self.coeffs.get(&0).cloned()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        let tower = self.join_tower(other);
        let mut coeffs = self.coeffs.clone();
        for (m, c) in &other.coeffs {
            add_term(&mut coeffs, *m, c.clone());
        }
        Scalar { tower, coeffs }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            tower: self.tower.clone(),
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        let tower = self.join_tower(other);
        let coeffs = tower.mul_coeffs(&self.coeffs, &other.coeffs);
        Scalar { tower, coeffs }
    }

    pub fn mul_rat(&self, q: &BigRational) -> Scalar {
        let mut coeffs = self.coeffs.clone();
        scale(&mut coeffs, q);
        Scalar {
            tower: self.tower.clone(),
            coeffs,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        let coeffs = self.tower.inv_coeffs(&self.coeffs)?;
        Ok(Scalar {
            tower: self.tower.clone(),
            coeffs,
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&other.inv()?))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}
impl Eq for Scalar {}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tower.format(self))
    }
}

struct ScalarParser {
    chars: Vec<char>,
    pos: usize,
    tower: Tower,
}

impl ScalarParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Scalar> {
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

    fn term(&mut self) -> Result<Scalar> {
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

    fn factor(&mut self) -> Result<Scalar> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::ScalarParse("expected ')'".into()));
                }
                self.pos += 1;
                Ok(v)
            }
            Some('s') => {
                let rest: String = self.chars[self.pos..].iter().collect();
                if !rest.starts_with("sqrt") {
                    return Err(Error::ScalarParse("expected 'sqrt'".into()));
                }
                self.pos += 4;
                if self.peek() != Some('(') {
                    return Err(Error::ScalarParse("expected '(' after sqrt".into()));
                }
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::ScalarParse("expected ')'".into()));
                }
                self.pos += 1;
                let (tower, root) = self.tower.adjoin_sqrt(&inner)?;
                self.tower = tower;
                Ok(root)
            }
            Some(c) if c.is_ascii_digit() => self.rational(),
            _ => Err(Error::ScalarParse("expected factor".into())),
        }
    }

    fn rational(&mut self) -> Result<Scalar> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let num: BigInt = digits
            .parse()
            .map_err(|_| Error::ScalarParse("bad integer".into()))?;
        let mut den = BigInt::one();
        if self.peek() == Some('/') {
            self.pos += 1;
            self.skip_ws();
            let dstart = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let ddigits: String = self.chars[dstart..self.pos].iter().collect();
            den = ddigits
                .parse()
                .map_err(|_| Error::ScalarParse("bad denominator".into()))?;
            if den.is_zero() {
                return Err(Error::ScalarParse("zero denominator".into()));
            }
        }
        Ok(self.tower.rational(BigRational::new(num, den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn adjoin_and_square() {
        let q = Tower::rationals();
        let (t, r2) = q.adjoin_sqrt(&q.int(2)).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(r2.mul(&r2), t.int(2));
        // perfect square detected, tower unchanged
        let (t2, v) = t.adjoin_sqrt(&t.rat(9, 4)).unwrap();
        assert_eq!(t2.depth(), 1);
        assert_eq!(v, t.rat(3, 2));
        // sqrt(-1) on top of Q(sqrt 2)
        let (t3, i) = t2.adjoin_sqrt(&t2.int(-1)).unwrap();
        assert_eq!(t3.depth(), 2);
        assert_eq!(i.mul(&i), t3.int(-1));
    }

    #[test]
    fn adjoin_idempotent_and_derived_squares() {
        let q = Tower::rationals();
        let (t, r2) = q.adjoin_sqrt(&q.int(2)).unwrap();
        // 8 = (2 sqrt 2)^2
        let (t2, r8) = t.adjoin_sqrt(&t.int(8)).unwrap();
        assert_eq!(t2.depth(), 1);
        assert_eq!(r8, r2.mul(&t.int(2)));
        // 1/2 has root sqrt(2)/2 already
        let (t3, rhalf) = t.adjoin_sqrt(&t.rat(1, 2)).unwrap();
        assert_eq!(t3.depth(), 1);
        assert_eq!(rhalf.mul(&rhalf), t.rat(1, 2));
        // nested radicand
        let one_plus = t.int(1).add(&r2);
        let (t4, nested) = t.adjoin_sqrt(&one_plus).unwrap();
        assert_eq!(t4.depth(), 2);
        assert_eq!(nested.mul(&nested), one_plus.lifted_to(&t4));
    }

    #[test]
    fn zero_radicand_rejected() {
        let q = Tower::rationals();
        assert!(matches!(
            q.adjoin_sqrt(&q.zero()),
            Err(Error::ZeroRadicand)
        ));
    }

    fn random_element(t: &Tower, rng: &mut ChaCha8Rng) -> Scalar {
        let masks = 1u64 << t.depth();
        let mut acc = t.zero();
        for m in 0..masks {
            if rng.gen_bool(0.7) {
                let n = rng.gen_range(-6i64..=6);
                let d = rng.gen_range(1i64..=4);
                let mut part = t.rat(n, d);
                let mut bits = m;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    part = part.mul(&t.root(i));
                }
                acc = acc.add(&part);
            }
        }
        acc
    }

    #[test]
    fn field_axioms_randomized() {
        // degree <= 8 tower: Q(sqrt 2, sqrt 3, sqrt -1)
        let q = Tower::rationals();
        let (t, _) = q.adjoin_sqrt(&q.int(2)).unwrap();
        let (t, _) = t.adjoin_sqrt(&t.int(3)).unwrap();
        let (t, _) = t.adjoin_sqrt(&t.int(-1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0xD1C5);
        for _ in 0..500 {
            let a = random_element(&t, &mut rng);
            let b = random_element(&t, &mut rng);
            let c = random_element(&t, &mut rng);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            if !a.is_zero() {
                assert!(a.mul(&a.inv().unwrap()).is_one());
            }
        }
    }

    #[test]
    fn parse_format_roundtrip() {
        let q = Tower::rationals();
        let (t, s) = q.parse("1/2 + 3*sqrt(2) - sqrt(2)*sqrt(-1)").unwrap();
        assert_eq!(t.depth(), 2);
        let printed = t.format(&s);
        let (t2, s2) = t.parse(&printed).unwrap();
        assert_eq!(t2.depth(), 2);
        assert_eq!(s, s2);
        // nested radicand survives the round trip
        let (t3, v) = t2.parse("sqrt(1 + sqrt(2))").unwrap();
        let printed = t3.format(&v);
        let (_, v2) = t3.parse(&printed).unwrap();
        assert_eq!(v, v2);
    }

    #[test]
    fn mixed_tower_lifting() {
        let q = Tower::rationals();
        let (t, r2) = q.adjoin_sqrt(&q.int(2)).unwrap();
        let half = q.rat(1, 2); // lives in the base tower
        let sum = half.add(&r2);
        assert_eq!(sum.tower().depth(), 1);
        assert_eq!(sum.sub(&r2), half.lifted_to(&t));
    }
}
