//! Arithmetic in `R_P = F_Q[[pi]]` with explicit absolute-precision tracking.
//!
//! A [`PadicElem`] is either *exact* (a polynomial in `pi`, the tail beyond
//! the stored digits is identically zero) or a *residue class*: a digit
//! prefix of length `M` standing for the set `prefix + pi^M * R_P`, i.e. the
//! element is known modulo `pi^M` and nothing more. Classes are exactly the
//! Haar-measure-`Q^(-M)` cosets the density enumerator refines.
//!
//! Precision bookkeeping is deliberately conservative: the claimed output
//! precision of every operation is sound (appending arbitrary tail digits to
//! the inputs can never change an output digit below the claimed precision),
//! which is what makes `Decided` verdicts on classes trustworthy. For
//! products the rule is `min(M_a + vlb(b), M_b + vlb(a))` where `vlb` is the
//! proven valuation lower bound. Exact inputs stay exact through add, sub,
//! mul and shifts.

use crate::field::{FieldElem, FieldError, FieldId, FieldSpec};
use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum LocalError {
    #[error("MixedFields: operands belong to different field specs")]
    MixedFields,
    #[error("DivisionByZero: unit divisor is 0")]
    DivisionByZero,
    #[error("InsufficientValuation: cannot divide by pi^{need} when only pi^{have} is proven")]
    InsufficientValuation { need: usize, have: usize },
    #[error("NotUnit: inversion requires a unit (valuation 0)")]
    NotUnit,
    #[error("ParseError at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Valuation information extractable from the known digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    /// A nonzero digit is visible at this index (and all below are zero).
    Exact(usize),
    /// All known digits are zero but the element is a class; the true
    /// valuation is at least the precision.
    AtLeast(usize),
    /// The exact zero.
    Infinite,
}

impl Valuation {
    /// Proven lower bound (`usize::MAX` for the exact zero).
    pub fn lower_bound(&self) -> usize {
        match *self {
            Valuation::Exact(v) => v,
            Valuation::AtLeast(m) => m,
            Valuation::Infinite => usize::MAX,
        }
    }

    pub fn exact(&self) -> Option<usize> {
        match *self {
            Valuation::Exact(v) => Some(v),
            _ => None,
        }
    }
}

const INLINE_DIGITS: usize = 14;

/// Element or residue class of `F_Q[[pi]]`. Digit `i` is the coefficient of
/// `pi^i`; `digits.len()` is the absolute precision for classes. Exact
/// elements with trailing zero digits compare equal after trimming.
#[derive(Debug, Clone)]
pub struct PadicElem {
    field: FieldId,
    exact: bool,
    digits: SmallVec<[u32; INLINE_DIGITS]>,
}

impl PartialEq for PadicElem {
    fn eq(&self, other: &Self) -> bool {
        if self.field != other.field || self.exact != other.exact {
            return false;
        }
        if self.exact {
            let a = trimmed(&self.digits);
            let b = trimmed(&other.digits);
            return a == b;
        }
        self.digits == other.digits
    }
}

impl Eq for PadicElem {}

fn trimmed(d: &[u32]) -> &[u32] {
    let mut n = d.len();
    while n > 0 && d[n - 1] == 0 {
        n -= 1;
    }
    &d[..n]
}

impl PadicElem {
    /// The exact zero (infinite precision).
    pub fn zero(f: &FieldSpec) -> PadicElem {
        PadicElem { field: f.id(), exact: true, digits: SmallVec::new() }
    }

    pub fn one(f: &FieldSpec) -> PadicElem {
        PadicElem::constant(f, f.one())
    }

    /// Exact element with the given digits and zero tail.
    pub fn exact_digits(f: &FieldSpec, digits: &[FieldElem]) -> PadicElem {
        let mut e = PadicElem {
            field: f.id(),
            exact: true,
            digits: digits.iter().map(|d| d.index()).collect(),
        };
        e.trim();
        e
    }

    /// Residue class known modulo `pi^digits.len()`.
    pub fn class_digits(f: &FieldSpec, digits: &[FieldElem]) -> PadicElem {
        PadicElem { field: f.id(), exact: false, digits: digits.iter().map(|d| d.index()).collect() }
    }

    pub(crate) fn class_from_indices(f: &FieldSpec, digits: SmallVec<[u32; INLINE_DIGITS]>) -> PadicElem {
        PadicElem { field: f.id(), exact: false, digits }
    }

    /// The exact constant `c`.
    pub fn constant(f: &FieldSpec, c: FieldElem) -> PadicElem {
        PadicElem::exact_digits(f, &[c])
    }

    /// Exact `c * pi^k`.
    pub fn monomial(f: &FieldSpec, c: FieldElem, k: usize) -> PadicElem {
        if c.is_zero() {
            return PadicElem::zero(f);
        }
        let mut digits: SmallVec<[u32; INLINE_DIGITS]> = SmallVec::new();
        digits.resize(k, 0);
        digits.push(c.index());
        PadicElem { field: f.id(), exact: true, digits }
    }

    pub fn from_int(f: &FieldSpec, v: i64) -> PadicElem {
        PadicElem::constant(f, f.from_int(v))
    }

    fn trim(&mut self) {
        if self.exact {
            while self.digits.last() == Some(&0) {
                self.digits.pop();
            }
        }
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.digits.iter().all(|&d| d == 0)
    }

    /// Absolute precision: `None` means exact (infinite).
    pub fn precision(&self) -> Option<usize> {
        if self.exact {
            None
        } else {
            Some(self.digits.len())
        }
    }

    fn eff_precision(&self) -> usize {
        if self.exact {
            usize::MAX
        } else {
            self.digits.len()
        }
    }

    /// An exact residue-field constant, if that is what this element is.
    pub fn as_constant(&self, f: &FieldSpec) -> Option<FieldElem> {
        if !self.exact || trimmed(&self.digits).len() > 1 {
            return None;
        }
        Some(self.digit(f, 0).unwrap())
    }

    /// Digit `i` if it is determined: stored digits, and zeros beyond the
    /// stored prefix for exact elements. `None` means genuinely unknown.
    pub fn digit(&self, f: &FieldSpec, i: usize) -> Option<FieldElem> {
        debug_assert_eq!(f.id(), self.field);
        if i < self.digits.len() {
            Some(f.from_index(self.digits[i]))
        } else if self.exact {
            Some(f.zero())
        } else {
            None
        }
    }

    pub fn val(&self) -> Valuation {
        match self.digits.iter().position(|&d| d != 0) {
            Some(v) => Valuation::Exact(v),
            None => {
                if self.exact {
                    Valuation::Infinite
                } else {
                    Valuation::AtLeast(self.digits.len())
                }
            }
        }
    }

    /// Is `pi^j | self`? `None` when the known digits cannot tell.
    pub fn divisible_by_pi_pow(&self, j: usize) -> Option<bool> {
        match self.val() {
            Valuation::Exact(v) => Some(v >= j),
            Valuation::Infinite => Some(true),
            Valuation::AtLeast(m) => {
                if m >= j {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }

    fn check_same(&self, other: &PadicElem) {
        assert!(self.field == other.field, "PadicElem from a different FieldSpec");
    }

    pub fn add(&self, other: &PadicElem, f: &FieldSpec) -> PadicElem {
        self.check_same(other);
        debug_assert_eq!(self.field, f.id());
        let prec = self.eff_precision().min(other.eff_precision());
        let exact = prec == usize::MAX;
        let len = if exact {
            self.digits.len().max(other.digits.len())
        } else {
            prec
        };
        let mut digits: SmallVec<[u32; INLINE_DIGITS]> = SmallVec::with_capacity(len);
        for i in 0..len {
            let a = self.digits.get(i).copied().unwrap_or(0);
            let b = other.digits.get(i).copied().unwrap_or(0);
            digits.push(f.add_idx(a, b));
        }
        let mut out = PadicElem { field: self.field, exact, digits };
        out.trim();
        out
    }

    pub fn neg(&self, f: &FieldSpec) -> PadicElem {
        debug_assert_eq!(self.field, f.id());
        let digits = self.digits.iter().map(|&d| f.neg_idx(d)).collect();
        PadicElem { field: self.field, exact: self.exact, digits }
    }

    pub fn sub(&self, other: &PadicElem, f: &FieldSpec) -> PadicElem {
        self.add(&other.neg(f), f)
    }

    /// Product with the sound precision rule
    /// `min(M_a + vlb(b), M_b + vlb(a))`; the digits below that bound only
    /// involve known digits of both inputs. A proven-zero factor gives the
    /// exact zero.
    pub fn mul(&self, other: &PadicElem, f: &FieldSpec) -> PadicElem {
        self.check_same(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return PadicElem::zero(f);
        }
        let va = self.val().lower_bound();
        let vb = other.val().lower_bound();
        let exact = self.exact && other.exact;
        let len = if exact {
            self.trim_len() + other.trim_len() - 1
        } else {
            let pa = self.eff_precision().saturating_add(vb);
            let pb = other.eff_precision().saturating_add(va);
            pa.min(pb)
        };
        let mut digits: SmallVec<[u32; INLINE_DIGITS]> = SmallVec::new();
        digits.resize(len, 0);
        for (i, &da) in self.digits.iter().enumerate() {
            if da == 0 || i >= len {
                continue;
            }
            let top = (len - i).min(other.digits.len());
            for j in 0..top {
                let db = other.digits[j];
                if db == 0 {
                    continue;
                }
                digits[i + j] = f.add_idx(digits[i + j], f.mul_idx(da, db));
            }
        }
        let mut out = PadicElem { field: self.field, exact, digits };
        out.trim();
        out
    }

    fn trim_len(&self) -> usize {
        trimmed(&self.digits).len().max(1)
    }

    /// Multiply by `pi^k` (`k` may be negative: division, which requires the
    /// valuation lower bound to cover it).
    pub fn shift(&self, k: i64, _f: &FieldSpec) -> Result<PadicElem, LocalError> {
        if k >= 0 {
            let k = k as usize;
            if self.is_exact_zero() {
                return Ok(self.clone());
            }
            let mut digits: SmallVec<[u32; INLINE_DIGITS]> = SmallVec::new();
            digits.resize(k, 0);
            digits.extend_from_slice(&self.digits);
            return Ok(PadicElem { field: self.field, exact: self.exact, digits });
        }
        let k = (-k) as usize;
        if self.is_exact_zero() {
            return Ok(self.clone());
        }
        let have = self.val().lower_bound();
        if have < k {
            return Err(LocalError::InsufficientValuation { need: k, have });
        }
        let digits: SmallVec<[u32; INLINE_DIGITS]> =
            self.digits.iter().skip(k).copied().collect();
        Ok(PadicElem { field: self.field, exact: self.exact, digits })
    }

    /// Digitwise division by a nonzero residue-field constant.
    pub fn unit_div(&self, c: FieldElem, f: &FieldSpec) -> Result<PadicElem, LocalError> {
        if c.is_zero() {
            return Err(LocalError::DivisionByZero);
        }
        let inv = f.inv(c).expect("nonzero constant");
        Ok(self.scale(inv, f))
    }

    /// Digitwise multiplication by a residue-field constant.
    pub fn scale(&self, c: FieldElem, f: &FieldSpec) -> PadicElem {
        if c.is_zero() {
            return if self.exact {
                PadicElem::zero(f)
            } else {
                let mut digits: SmallVec<[u32; INLINE_DIGITS]> = SmallVec::new();
                digits.resize(self.digits.len(), 0);
                PadicElem { field: self.field, exact: false, digits }
            };
        }
        let ci = c.index();
        let digits = self.digits.iter().map(|&d| f.mul_idx(d, ci)).collect();
        let mut out = PadicElem { field: self.field, exact: self.exact, digits };
        out.trim();
        out
    }

    /// Inverse of a unit, computed digit-by-digit to absolute precision
    /// `prec` (capped by the input's own precision).
    pub fn invert_to(&self, prec: usize, f: &FieldSpec) -> Result<PadicElem, LocalError> {
        let d0 = self.digit(f, 0).ok_or(LocalError::NotUnit)?;
        if d0.is_zero() {
            return Err(LocalError::NotUnit);
        }
        let prec = prec.min(self.eff_precision());
        let inv0 = f.inv(d0).expect("unit digit");
        let mut out: SmallVec<[u32; INLINE_DIGITS]> = SmallVec::with_capacity(prec);
        out.push(inv0.index());
        for i in 1..prec {
            // b_i = -inv0 * sum_{j=1..=i} a_j b_{i-j}
            let mut s = f.zero();
            for j in 1..=i {
                let aj = self.digit(f, j).unwrap_or_else(|| f.zero());
                if aj.is_zero() {
                    continue;
                }
                s = f.add(s, f.mul(aj, f.from_index(out[i - j])));
            }
            out.push(f.neg(f.mul(inv0, s)).index());
        }
        Ok(PadicElem { field: self.field, exact: false, digits: out })
    }

    /// Truncate to a class known modulo `pi^prec` (no-op when the element is
    /// already weaker).
    pub fn truncate(&self, prec: usize, f: &FieldSpec) -> PadicElem {
        let _ = f;
        if self.eff_precision() <= prec {
            return self.clone();
        }
        let mut digits: SmallVec<[u32; INLINE_DIGITS]> = SmallVec::with_capacity(prec);
        for i in 0..prec {
            digits.push(self.digits.get(i).copied().unwrap_or(0));
        }
        PadicElem { field: self.field, exact: false, digits }
    }

    /// Checked arithmetic entry point mirroring the field one.
    pub fn arith(
        op: crate::field::FieldOp,
        a: &PadicElem,
        b: &PadicElem,
        f: &FieldSpec,
    ) -> Result<PadicElem, LocalError> {
        if a.field != f.id() || b.field != f.id() {
            return Err(LocalError::MixedFields);
        }
        Ok(match op {
            crate::field::FieldOp::Add => a.add(b, f),
            crate::field::FieldOp::Sub => a.sub(b, f),
            crate::field::FieldOp::Mul => a.mul(b, f),
        })
    }

    /// Render in the `C*p^K` grammar, ascending powers, with an `O(p^M)`
    /// marker for classes: `(g+1)*p^2 + p^3 + O(p^5)`.
    pub fn format(&self, f: &FieldSpec) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (k, &d) in self.digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let c = f.from_index(d);
            let cs = f.format_elem(c);
            let atom = if cs.contains('+') { format!("({cs})") } else { cs };
            let s = match k {
                0 => atom,
                1 if atom == "1" => "p".to_string(),
                1 => format!("{atom}*p"),
                _ if atom == "1" => format!("p^{k}"),
                _ => format!("{atom}*p^{k}"),
            };
            parts.push(s);
        }
        if !self.exact {
            parts.push(format!("O(p^{})", self.digits.len()));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Parse the grammar produced by [`format`](Self::format).
    pub fn parse(f: &FieldSpec, text: &str) -> Result<PadicElem, LocalError> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let mut acc = PadicElem::zero(f);
        let mut class_prec: Option<usize> = None;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        let parse_int = |pos: &mut usize| -> Result<usize, LocalError> {
            skip_ws(pos);
            let start = *pos;
            while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
                *pos += 1;
            }
            if *pos == start {
                return Err(LocalError::Parse { pos: start, msg: "expected integer".into() });
            }
            std::str::from_utf8(&bytes[start..*pos])
                .unwrap()
                .parse()
                .map_err(|_| LocalError::Parse { pos: start, msg: "integer overflow".into() })
        };
        loop {
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                return Err(LocalError::Parse { pos, msg: "expected a term".into() });
            }
            if bytes[pos..].starts_with(b"O(") {
                pos += 2;
                skip_ws(&mut pos);
                if !bytes[pos..].starts_with(b"p^") {
                    return Err(LocalError::Parse { pos, msg: "expected p^M inside O(...)".into() });
                }
                pos += 2;
                let m = parse_int(&mut pos)?;
                skip_ws(&mut pos);
                if bytes.get(pos) != Some(&b')') {
                    return Err(LocalError::Parse { pos, msg: "expected ')'".into() });
                }
                pos += 1;
                if class_prec.is_some() {
                    return Err(LocalError::Parse { pos, msg: "duplicate O(p^M) marker".into() });
                }
                class_prec = Some(m);
            } else {
                // coefficient atom
                let mut coeff = f.one();
                let mut saw_coeff = false;
                if bytes[pos] == b'(' {
                    let close = find_close(bytes, pos)?;
                    let inner = std::str::from_utf8(&bytes[pos + 1..close]).unwrap();
                    coeff = f
                        .parse_elem(inner)
                        .map_err(|e| shift_err(e, pos + 1))?;
                    pos = close + 1;
                    saw_coeff = true;
                } else if bytes[pos] != b'p' || is_symbol_start(f, bytes, pos) {
                    let (c, next) = f.parse_term_prefix(text, pos).map_err(LocalError::Field)?;
                    coeff = c;
                    pos = next;
                    saw_coeff = true;
                }
                skip_ws(&mut pos);
                let mut power = 0usize;
                if saw_coeff && pos < bytes.len() && bytes[pos] == b'*' {
                    pos += 1;
                    skip_ws(&mut pos);
                    if bytes.get(pos) != Some(&b'p') {
                        return Err(LocalError::Parse { pos, msg: "expected 'p'".into() });
                    }
                }
                if bytes.get(pos) == Some(&b'p') && !is_symbol_start(f, bytes, pos) {
                    pos += 1;
                    power = 1;
                    skip_ws(&mut pos);
                    if bytes.get(pos) == Some(&b'^') {
                        pos += 1;
                        power = parse_int(&mut pos)?;
                    }
                } else if !saw_coeff {
                    return Err(LocalError::Parse { pos, msg: "expected a term".into() });
                }
                acc = acc.add(&PadicElem::monomial(f, coeff, power), f);
            }
            skip_ws(&mut pos);
            if pos >= bytes.len() {
                break;
            }
            if bytes[pos] == b'+' {
                pos += 1;
            } else {
                return Err(LocalError::Parse { pos, msg: "expected '+' or end".into() });
            }
        }
        if let Some(m) = class_prec {
            if acc.digits.len() > m {
                return Err(LocalError::Parse {
                    pos: 0,
                    msg: format!("digits reach p^{} but class is O(p^{m})", acc.digits.len() - 1),
                });
            }
            Ok(acc.truncate(m, f))
        } else {
            Ok(acc)
        }
    }
}

fn is_symbol_start(f: &FieldSpec, bytes: &[u8], pos: usize) -> bool {
    // disambiguate the uniformizer 'p' from a generator symbol that begins
    // with 'p' (the default symbol is 'g', so this is a corner case)
    f.degree() > 1 && f.symbol().as_bytes().first() == Some(&b'p') && {
        bytes[pos..].starts_with(f.symbol().as_bytes())
    }
}

fn find_close(bytes: &[u8], open: usize) -> Result<usize, LocalError> {
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
    Err(LocalError::Parse { pos: open, msg: "unclosed parenthesis".into() })
}

fn shift_err(e: FieldError, offset: usize) -> LocalError {
    match e {
        FieldError::Parse { pos, msg } => LocalError::Parse { pos: pos + offset, msg },
        other => LocalError::Field(other),
    }
}
