//! Dense polynomials over a small finite field.
//!
//! Used in two roles: the low-degree root-structure decisions inside Tate's
//! algorithm (roots of quadratics/cubics/quartics over the residue field) and
//! plain `F_q[t]` arithmetic for the global side (discriminant factoring,
//! irreducible sieves, place arithmetic).
//!
//! Root finding is exhaustive evaluation over the field; at these sizes that
//! is the reference answer.

use crate::field::{FieldElem, FieldError, FieldSpec};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum PolyError {
    #[error("ZeroPolynomial: operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("NotMonic: leading coefficient must be 1")]
    NotMonic,
    #[error("WrongDegree: expected degree {expected}, got {got:?}")]
    WrongDegree { expected: usize, got: Option<usize> },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Coefficients low-to-high; the leading stored coefficient is nonzero and
/// the zero polynomial stores nothing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    coeffs: Vec<FieldElem>,
}

/// Root multiplicities of a monic cubic over the algebraic closure. Repeated
/// roots of a cubic over a finite field always lie in the field itself
/// (Frobenius permutes the root multiset preserving multiplicity), so both
/// reported roots are plain field elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicStructure {
    Distinct3,
    DoubleSimple { double: FieldElem, simple: FieldElem },
    Triple(FieldElem),
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElem>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(f: &FieldSpec, ints: &[i64]) -> Poly {
        Poly::from_coeffs(ints.iter().map(|&v| f.from_int(v)).collect())
    }

    pub fn constant(c: FieldElem) -> Poly {
        Poly::from_coeffs(vec![c])
    }

    pub fn monomial(f: &FieldSpec, c: FieldElem, k: usize) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![f.zero(); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of `t^k` (zero beyond the degree).
    pub fn coeff(&self, f: &FieldSpec, k: usize) -> FieldElem {
        self.coeffs.get(k).copied().unwrap_or_else(|| f.zero())
    }

    pub fn leading(&self) -> Option<FieldElem> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self, f: &FieldSpec) -> bool {
        self.leading() == Some(f.one())
    }

    pub fn add(&self, other: &Poly, f: &FieldSpec) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(f.add(self.coeff(f, k), other.coeff(f, k)));
        }
        Poly::from_coeffs(out)
    }

    pub fn neg(&self, f: &FieldSpec) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn sub(&self, other: &Poly, f: &FieldSpec) -> Poly {
        self.add(&other.neg(f), f)
    }

    pub fn mul(&self, other: &Poly, f: &FieldSpec) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, c: FieldElem, f: &FieldSpec) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Quotient and remainder; the divisor must be nonzero.
    pub fn divrem(&self, div: &Poly, f: &FieldSpec) -> Result<(Poly, Poly), PolyError> {
        let dd = div.degree().ok_or(PolyError::ZeroPolynomial)?;
        let lead_inv = f.inv(div.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![f.zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1;
            let factor = f.mul(rem[k], lead_inv);
            if !factor.is_zero() {
                quo[k - dd] = factor;
                for (i, &c) in div.coeffs.iter().enumerate() {
                    let pos = k - dd + i;
                    rem[pos] = f.sub(rem[pos], f.mul(factor, c));
                }
            }
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            if rem.is_empty() {
                break;
            }
        }
        Ok((Poly::from_coeffs(quo), Poly { coeffs: rem }))
    }

    pub fn eval(&self, x: FieldElem, f: &FieldSpec) -> FieldElem {
        let mut acc = f.zero();
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    /// All roots in `F_Q` with multiplicities, by exhaustive evaluation and
    /// repeated division by `t - r`.
    pub fn roots(&self, f: &FieldSpec) -> Result<Vec<(FieldElem, usize)>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut out = Vec::new();
        let mut cur = self.clone();
        for r in f.elements() {
            if cur.is_zero() || cur.degree() == Some(0) {
                break;
            }
            if self.eval(r, f).is_zero() {
                let linear = Poly::from_coeffs(vec![f.neg(r), f.one()]);
                let mut mult = 0;
                loop {
                    let (q, rem) = cur.divrem(&linear, f)?;
                    if rem.is_zero() {
                        mult += 1;
                        cur = q;
                    } else {
                        break;
                    }
                }
                debug_assert!(mult > 0);
                out.push((r, mult));
            }
        }
        Ok(out)
    }

    /// Number of distinct roots in `F_Q`.
    pub fn count_roots(&self, f: &FieldSpec) -> usize {
        f.elements().filter(|&r| self.eval(r, f).is_zero()).count()
    }

    /// Classify the root multiplicities of a monic cubic over the closure.
    /// The universal discriminant `18abc - 4a^3c + a^2b^2 - 4b^3 - 27c^2`
    /// detects repeated roots in every characteristic.
    pub fn cubic_structure(&self, f: &FieldSpec) -> Result<CubicStructure, PolyError> {
        if self.degree() != Some(3) {
            return Err(PolyError::WrongDegree { expected: 3, got: self.degree() });
        }
        if !self.is_monic(f) {
            return Err(PolyError::NotMonic);
        }
        let c0 = self.coeff(f, 0);
        let c1 = self.coeff(f, 1);
        let c2 = self.coeff(f, 2);
        let i = |v: i64| f.from_int(v);
        let disc = {
            let t1 = f.mul(f.mul(i(18), c2), f.mul(c1, c0));
            let t2 = f.mul(f.mul(i(4), f.mul(c2, f.mul(c2, c2))), c0);
            let t3 = f.mul(f.mul(c2, c2), f.mul(c1, c1));
            let t4 = f.mul(i(4), f.mul(c1, f.mul(c1, c1)));
            let t5 = f.mul(i(27), f.mul(c0, c0));
            f.sub(f.add(f.sub(t1, t2), t3), f.add(t4, t5))
        };
        if !disc.is_zero() {
            return Ok(CubicStructure::Distinct3);
        }
        // triple root r: (T - r)^3; in characteristic 3 that is T^3 - r^3
        let triple = if f.p() == 3 {
            (c2.is_zero() && c1.is_zero()).then(|| f.cbrt_char3(f.neg(c0)))
        } else {
            let r = f.mul(f.neg(c2), f.inv(i(3)).expect("3 is a unit"));
            let cube_matches = f.mul(i(3), f.mul(r, r)) == c1 && f.neg(f.mul(r, f.mul(r, r))) == c0;
            cube_matches.then_some(r)
        };
        if let Some(r) = triple {
            return Ok(CubicStructure::Triple(r));
        }
        // double root: lies in F_Q, found by scan; the simple root is then
        // -(c2) - 2r, also in F_Q
        for r in f.elements() {
            if self.eval(r, f).is_zero() {
                let linear = Poly::from_coeffs(vec![f.neg(r), f.one()]);
                let (q1, _) = self.divrem(&linear, f)?;
                if q1.eval(r, f).is_zero() {
                    let simple = f.sub(f.neg(c2), f.mul(i(2), r));
                    return Ok(CubicStructure::DoubleSimple { double: r, simple });
                }
            }
        }
        unreachable!("cubic with vanishing discriminant must have a repeated root in F_Q")
    }

    pub fn derivative(&self, f: &FieldSpec) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            out.push(f.mul(f.from_int(k as i64), c));
        }
        Poly::from_coeffs(out)
    }

    /// Render in the given variable symbol, descending powers. Coefficients
    /// that are themselves polynomial expressions get parenthesized.
    pub fn format(&self, f: &FieldSpec, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !s.is_empty() {
                s.push('+');
            }
            let cs = f.format_elem(c);
            let atom = if cs.contains('+') { format!("({cs})") } else { cs };
            match k {
                0 => s.push_str(&atom),
                _ => {
                    if atom != "1" {
                        let _ = write!(s, "{atom}*");
                    }
                    s.push_str(var);
                    if k > 1 {
                        let _ = write!(s, "^{k}");
                    }
                }
            }
        }
        s
    }

    /// Parse the grammar produced by [`Poly::format`].
    pub fn parse(f: &FieldSpec, var: &str, text: &str) -> Result<Poly, PolyError> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let mut acc = Poly::zero();
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err(FieldError::Parse { pos, msg: "expected a term".into() }.into());
            }
            // coefficient atom: '(' elem ')' | elem atom | nothing (before var)
            let mut coeff = f.one();
            let mut saw_coeff = false;
            if bytes[pos] == b'(' {
                let close = find_close(bytes, pos).map_err(PolyError::Field)?;
                let inner = std::str::from_utf8(&bytes[pos + 1..close]).unwrap();
                coeff = f.parse_elem(inner).map_err(|e| shift_parse_err(e, pos + 1))?;
                pos = close + 1;
                saw_coeff = true;
            } else if !bytes[pos..].starts_with(var.as_bytes()) {
                let (c, next) = f.parse_term_prefix(text, pos)?;
                coeff = c;
                pos = next;
                saw_coeff = true;
            }
            skip_ws(&mut pos);
            let mut power = 0usize;
            if saw_coeff && pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1;
                skip_ws(&mut pos);
                if !bytes[pos..].starts_with(var.as_bytes()) {
                    return Err(FieldError::Parse { pos, msg: format!("expected '{var}'") }.into());
                }
            }
            if bytes[pos..].starts_with(var.as_bytes()) {
                pos += var.len();
                power = 1;
                skip_ws(&mut pos);
                if pos < bytes.len() && bytes[pos] == b'^' {
                    pos += 1;
                    skip_ws(&mut pos);
                    let start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if pos == start {
                        return Err(FieldError::Parse { pos, msg: "expected exponent".into() }.into());
                    }
                    power = std::str::from_utf8(&bytes[start..pos]).unwrap().parse().map_err(
                        |_| FieldError::Parse { pos: start, msg: "exponent overflow".into() },
                    )?;
                }
            } else if !saw_coeff {
                return Err(FieldError::Parse { pos, msg: "expected a term".into() }.into());
            }
            acc = acc.add(&Poly::monomial(f, coeff, power), f);
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Ok(acc);
            }
            if bytes[pos] == b'+' {
                pos += 1;
            } else {
                return Err(FieldError::Parse { pos, msg: "expected '+' or end".into() }.into());
            }
        }
    }
}

fn find_close(bytes: &[u8], open: usize) -> Result<usize, FieldError> {
    let mut depth = 0;
    for (i, &b) in bytes.iter().enumerate().skip(open) {
        match b {
            b'(' => depth += 1,
            b')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
            _ => {}
        }
    }
    Err(FieldError::Parse { pos: open, msg: "unclosed parenthesis".into() })
}

fn shift_parse_err(e: FieldError, offset: usize) -> FieldError {
    match e {
        FieldError::Parse { pos, msg } => FieldError::Parse { pos: pos + offset, msg },
        other => other,
    }
}
