//! Exact arithmetic in small finite fields `F_Q`, `Q = p^n`.
//!
//! A [`FieldSpec`] fixes the prime `p`, the extension degree `n` and a monic
//! irreducible modulus for `F_p[g]/(m(g))`. Elements are canonical reduced
//! coefficient vectors encoded as a single base-`p` index, so equality is
//! structural and elements are valid map keys. For desk-scale fields
//! (`Q <= 1024`) full operation tables are precomputed; larger fields fall
//! back to on-the-fly polynomial arithmetic.
//!
//! Root finding (square roots, roots of low-degree polynomials) is exhaustive
//! by design: at these sizes the brute-force search *is* the reference
//! answer, and the Frobenius formulas are cross-checks, not the
//! implementation.

use smallvec::SmallVec;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Fields with `Q` at most this get full add/mul/inv/sqrt tables.
const TABLE_LIMIT: u64 = 1024;
/// Hard cap on the field size; everything here is exhaustive-search scale.
const SIZE_LIMIT: u64 = 1 << 21;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum FieldError {
    #[error("MixedFields: operands belong to different field specs")]
    MixedFields,
    #[error("DivisionByZero: attempted to invert 0")]
    DivisionByZero,
    #[error("InvalidField: {0}")]
    InvalidField(String),
    #[error("ParseError at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Fingerprint of `(p, n, modulus)`. Two specs built from the same data get
/// the same id, so their elements interoperate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldId(u32);

fn fingerprint(p: u64, n: usize, modulus: &[u64]) -> FieldId {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |v: u64| {
        h ^= v;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    eat(p);
    eat(n as u64);
    for &c in modulus {
        eat(c);
    }
    FieldId((h ^ (h >> 32)) as u32)
}

/// Element of `F_Q`, stored as the base-`p` encoding of its reduced
/// coefficient vector (coefficient of `g^i` at digit `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem {
    field: FieldId,
    idx: u32,
}

impl FieldElem {
    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.idx == 0
    }

    pub(crate) fn index(&self) -> u32 {
        self.idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    sqrt: Vec<SmallVec<[u32; 2]>>,
}

/// A concrete small finite field. Immutable after construction; share it as
/// `Arc<FieldSpec>` across workers.
pub struct FieldSpec {
    p: u64,
    n: usize,
    q: u64,
    modulus: Vec<u64>,
    symbol: String,
    id: FieldId,
    /// Reduced coefficient vectors for every element, in index order.
    coeffs: Vec<u64>,
    tables: Option<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(F_{} = F_{}^{})", self.q, self.p, self.n)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for FieldSpec {}

/// Default moduli for the stock fields. Coefficients low-to-high; for prime
/// fields the modulus is just `g`.
pub fn default_field_table(q: u64) -> Option<(u64, usize, Vec<u64>)> {
    match q {
        2 | 3 | 5 | 7 | 11 | 13 => Some((q, 1, vec![0, 1])),
        4 => Some((2, 2, vec![1, 1, 1])),   // g^2 + g + 1
        8 => Some((2, 3, vec![1, 1, 0, 1])), // g^3 + g + 1
        16 => Some((2, 4, vec![1, 1, 0, 0, 1])), // g^4 + g + 1
        9 => Some((3, 2, vec![1, 0, 1])),   // g^2 + 1
        27 => Some((3, 3, vec![1, 2, 0, 1])), // g^3 + 2g + 1
        25 => Some((5, 2, vec![1, 1, 1])),  // g^2 + g + 1
        _ => None,
    }
}

// Bare polynomial helpers over F_p used during construction, before any
// tables exist. Coefficients low-to-high, not necessarily trimmed.

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(&mut out);
    out
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    // m monic
    let mut r: Vec<u64> = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let pos = shift + i;
                let sub = (lead * c) % p;
                r[pos] = (r[pos] + p * p - sub) % p; // p*p > sub, keeps it nonneg
            }
        }
        r.pop();
        fp_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x: Vec<u64> = a.to_vec();
    let mut y: Vec<u64> = b.to_vec();
    fp_trim(&mut x);
    fp_trim(&mut y);
    while !y.is_empty() {
        // make y monic for fp_rem
        let lead = *y.last().unwrap();
        if lead != 1 {
            let inv = mod_inv(lead, p);
            for c in y.iter_mut() {
                *c = (*c * inv) % p;
            }
        }
        let r = fp_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `x^(p^d) mod m` by repeated p-th powering.
fn fp_frob_pow(x: &[u64], d: usize, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = x.to_vec();
    for _ in 0..d {
        // acc^p mod m by square-and-multiply on the exponent p
        let mut result = vec![1u64];
        let mut base = acc.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                result = fp_rem(&fp_mul(&result, &base, p), m, p);
            }
            base = fp_rem(&fp_mul(&base, &base, p), m, p);
            e >>= 1;
        }
        acc = result;
    }
    acc
}

fn check_irreducible(modulus: &[u64], p: u64, n: usize) -> Result<(), FieldError> {
    if n == 1 {
        return Ok(());
    }
    if n <= 3 {
        // degree 2 or 3: irreducible over F_p iff no roots
        for r in 0..p {
            let mut acc = 0u64;
            for &c in modulus.iter().rev() {
                acc = (acc * r + c) % p;
            }
            if acc == 0 {
                return Err(FieldError::InvalidField(format!(
                    "modulus has root {r} mod {p}, not irreducible"
                )));
            }
        }
        return Ok(());
    }
    // No irreducible factor of degree d < n iff gcd(T^(p^d) - T, m) is trivial.
    let t = vec![0u64, 1];
    for d in 1..n {
        let mut frob = fp_frob_pow(&t, d, modulus, p);
        // frob - T
        if frob.len() < 2 {
            frob.resize(2, 0);
        }
        frob[1] = (frob[1] + p - 1) % p;
        fp_trim(&mut frob);
        let g = fp_gcd(&frob, modulus, p);
        if g.len() > 1 {
            return Err(FieldError::InvalidField(format!(
                "modulus shares a factor with T^(p^{d}) - T, not irreducible"
            )));
        }
    }
    Ok(())
}

impl FieldSpec {
    /// Build `F_p[g]/(modulus)`. The modulus must be monic of degree `n` and
    /// irreducible; `p` must be prime (trial division). Coefficients
    /// low-to-high.
    pub fn new(p: u64, n: usize, modulus: &[u64], symbol: &str) -> Result<Arc<FieldSpec>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::InvalidField(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(FieldError::InvalidField("extension degree must be >= 1".into()));
        }
        if modulus.len() != n + 1 {
            return Err(FieldError::InvalidField(format!(
                "modulus must have degree {n} (got {} coefficients)",
                modulus.len()
            )));
        }
        let modulus: Vec<u64> = modulus.iter().map(|&c| c % p).collect();
        if *modulus.last().unwrap() != 1 {
            return Err(FieldError::InvalidField("modulus must be monic".into()));
        }
        let q = (0..n).try_fold(1u64, |acc, _| {
            acc.checked_mul(p).filter(|&v| v <= SIZE_LIMIT)
        });
        let q = q.ok_or_else(|| {
            FieldError::InvalidField(format!("field size p^n exceeds the cap {SIZE_LIMIT}"))
        })?;
        check_irreducible(&modulus, p, n)?;

        let id = fingerprint(p, n, &modulus);
        let mut coeffs = vec![0u64; q as usize * n];
        for idx in 0..q as usize {
            let mut v = idx as u64;
            for j in 0..n {
                coeffs[idx * n + j] = v % p;
                v /= p;
            }
        }
        let mut spec = FieldSpec {
            p,
            n,
            q,
            modulus,
            symbol: symbol.to_string(),
            id,
            coeffs,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            spec.build_tables();
        }
        Ok(Arc::new(spec))
    }

    /// The stock field of size `q`, when `q` is in the default modulus table.
    pub fn with_default_modulus(q: u64) -> Result<Arc<FieldSpec>, FieldError> {
        let (p, n, modulus) = default_field_table(q).ok_or_else(|| {
            FieldError::InvalidField(format!(
                "no default modulus for Q = {q}; supply an explicit irreducible modulus"
            ))
        })?;
        FieldSpec::new(p, n, &modulus, "g")
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        let mut neg = vec![0u32; q];
        for a in 0..q {
            neg[a] = self.neg_raw(a as u32);
            for b in a..q {
                let s = self.add_raw(a as u32, b as u32);
                add[a * q + b] = s;
                add[b * q + a] = s;
                let m = self.mul_raw(a as u32, b as u32);
                mul[a * q + b] = m;
                mul[b * q + a] = m;
            }
        }
        let mut inv = vec![0u32; q];
        let mut sqrt: Vec<SmallVec<[u32; 2]>> = vec![SmallVec::new(); q];
        for a in 0..q {
            let sq = mul[a * q + a] as usize;
            sqrt[sq].push(a as u32);
            if a != 0 {
                for b in 0..q {
                    if mul[a * q + b] == 1 {
                        inv[a] = b as u32;
                        break;
                    }
                }
            }
        }
        self.tables = Some(Tables { add, mul, neg, inv, sqrt });
    }

    // raw coefficient-vector arithmetic on indices

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        let n = self.n;
        let (ca, cb) = (&self.coeffs[a as usize * n..][..n], &self.coeffs[b as usize * n..][..n]);
        let mut idx = 0u64;
        let mut base = 1u64;
        for (&x, &y) in ca.iter().zip(cb) {
            idx += ((x + y) % self.p) * base;
            base *= self.p;
        }
        idx as u32
    }

    fn neg_raw(&self, a: u32) -> u32 {
        let n = self.n;
        let ca = &self.coeffs[a as usize * n..][..n];
        let mut idx = 0u64;
        let mut base = 1u64;
        for &x in ca {
            idx += ((self.p - x) % self.p) * base;
            base *= self.p;
        }
        idx as u32
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let n = self.n;
        let ca = &self.coeffs[a as usize * n..][..n];
        let cb = &self.coeffs[b as usize * n..][..n];
        let prod = fp_mul(ca, cb, self.p);
        let red = fp_rem(&prod, &self.modulus, self.p);
        let mut idx = 0u64;
        let mut base = 1u64;
        for (j, &c) in red.iter().enumerate() {
            debug_assert!(j < n);
            idx += c * base;
            base *= self.p;
        }
        idx as u32
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn id(&self) -> FieldId {
        self.id
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { field: self.id, idx: 0 }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem { field: self.id, idx: 1 }
    }

    /// The class of `g`; only meaningful for proper extensions.
    pub fn generator(&self) -> FieldElem {
        assert!(self.n >= 2, "prime field has no extension generator");
        FieldElem { field: self.id, idx: self.p as u32 }
    }

    pub fn from_int(&self, v: i64) -> FieldElem {
        let p = self.p as i64;
        let r = ((v % p) + p) % p;
        FieldElem { field: self.id, idx: r as u32 }
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElem {
        assert!(coeffs.len() <= self.n, "too many coefficients for F_{}", self.q);
        let mut idx = 0u64;
        let mut base = 1u64;
        for &c in coeffs {
            idx += (c % self.p) * base;
            base *= self.p;
        }
        FieldElem { field: self.id, idx: idx as u32 }
    }

    /// Element with the given canonical index (the base-`p` encoding of its
    /// coefficient vector); indices run over `0..q`.
    pub fn from_index(&self, idx: u32) -> FieldElem {
        assert!((idx as u64) < self.q, "element index out of range");
        FieldElem { field: self.id, idx }
    }

    /// Reduced coefficient vector of `a`, low-to-high, length `n`.
    pub fn coeffs_of(&self, a: FieldElem) -> &[u64] {
        self.check(a);
        &self.coeffs[a.idx as usize * self.n..][..self.n]
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q as u32).map(move |idx| FieldElem { field: self.id, idx })
    }

    #[inline]
    fn check(&self, a: FieldElem) {
        assert!(a.field == self.id, "FieldElem from a different FieldSpec");
    }

    // Raw index-level arithmetic for the digit loops in `local`; one array
    // lookup per operation when tables exist.

    #[inline]
    pub(crate) fn add_idx(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.add[a as usize * self.q as usize + b as usize],
            None => self.add_raw(a, b),
        }
    }

    #[inline]
    pub(crate) fn mul_idx(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => t.mul[a as usize * self.q as usize + b as usize],
            None => self.mul_raw(a, b),
        }
    }

    #[inline]
    pub(crate) fn neg_idx(&self, a: u32) -> u32 {
        match &self.tables {
            Some(t) => t.neg[a as usize],
            None => self.neg_raw(a),
        }
    }

    /// Checked arithmetic; this is the error-reporting entry point, the
    /// inherent `add`/`sub`/`mul` below assert instead.
    pub fn arith(&self, op: FieldOp, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        if a.field != self.id || b.field != self.id {
            return Err(FieldError::MixedFields);
        }
        Ok(match op {
            FieldOp::Add => self.add(a, b),
            FieldOp::Sub => self.sub(a, b),
            FieldOp::Mul => self.mul(a, b),
        })
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.check(a);
        self.check(b);
        let idx = match &self.tables {
            Some(t) => t.add[a.idx as usize * self.q as usize + b.idx as usize],
            None => self.add_raw(a.idx, b.idx),
        };
        FieldElem { field: self.id, idx }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        self.check(a);
        let idx = match &self.tables {
            Some(t) => t.neg[a.idx as usize],
            None => self.neg_raw(a.idx),
        };
        FieldElem { field: self.id, idx }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.check(a);
        self.check(b);
        let idx = match &self.tables {
            Some(t) => t.mul[a.idx as usize * self.q as usize + b.idx as usize],
            None => self.mul_raw(a.idx, b.idx),
        };
        FieldElem { field: self.id, idx }
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        self.check(a);
        if a.idx == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let idx = match &self.tables {
            Some(t) => t.inv[a.idx as usize],
            None => self.pow(a, self.q - 2).idx,
        };
        Ok(FieldElem { field: self.id, idx })
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut acc = self.one();
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// All square roots of `a`, sorted. Exhaustive-search baseline; in
    /// characteristic 2 the unique root equals `a^(2^(n-1))`.
    pub fn sqrt(&self, a: FieldElem) -> SmallVec<[FieldElem; 2]> {
        self.check(a);
        if let Some(t) = &self.tables {
            return t.sqrt[a.idx as usize]
                .iter()
                .map(|&idx| FieldElem { field: self.id, idx })
                .collect();
        }
        let mut out: SmallVec<[FieldElem; 2]> = SmallVec::new();
        for x in self.elements() {
            if self.mul(x, x) == a {
                out.push(x);
            }
        }
        out
    }

    /// The unique square root in characteristic 2 (Frobenius inverse).
    pub fn sqrt_char2(&self, a: FieldElem) -> FieldElem {
        debug_assert_eq!(self.p, 2);
        self.pow(a, self.q / 2)
    }

    /// Cube roots; in characteristic 3 cubing is a bijection and the unique
    /// root is `a^(3^(n-1)) = a^(q/3)`.
    pub fn cbrt_char3(&self, a: FieldElem) -> FieldElem {
        debug_assert_eq!(self.p, 3);
        self.pow(a, self.q / 3)
    }

    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p)
    }

    /// Render as a polynomial in the generator symbol, descending powers,
    /// e.g. `g+1`, `2*g^2+1`; prime fields print plain integers.
    pub fn format_elem(&self, a: FieldElem) -> String {
        self.check(a);
        let cs = self.coeffs_of(a);
        let mut parts: Vec<String> = Vec::new();
        for (k, &c) in cs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let s = match k {
                0 => format!("{c}"),
                1 if c == 1 => self.symbol.clone(),
                1 => format!("{c}*{}", self.symbol),
                _ if c == 1 => format!("{}^{k}", self.symbol),
                _ => format!("{c}*{}^{k}", self.symbol),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join("+")
        }
    }

    /// Parse the grammar produced by [`format_elem`]: sums of
    /// `INT`, `SYM`, `INT*SYM`, `SYM^K`, `INT*SYM^K`.
    pub fn parse_elem(&self, text: &str) -> Result<FieldElem, FieldError> {
        let mut parser = ElemParser { spec: self, bytes: text.as_bytes(), pos: 0 };
        let v = parser.parse_sum()?;
        parser.skip_ws();
        if parser.pos != parser.bytes.len() {
            return Err(FieldError::Parse {
                pos: parser.pos,
                msg: "trailing input after field element".into(),
            });
        }
        Ok(v)
    }

    /// Parse a single unparenthesized term (no `+` chaining); sums must be
    /// parenthesized when embedded in larger grammars.
    pub(crate) fn parse_term_prefix(&self, text: &str, start: usize) -> Result<(FieldElem, usize), FieldError> {
        let mut parser = ElemParser { spec: self, bytes: text.as_bytes(), pos: start };
        let v = parser.parse_term()?;
        Ok((v, parser.pos))
    }
}

struct ElemParser<'a> {
    spec: &'a FieldSpec,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ElemParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T, FieldError> {
        Err(FieldError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn parse_int(&mut self) -> Result<u64, FieldError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected integer");
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| FieldError::Parse { pos: start, msg: "integer overflow".into() })
    }

    fn at_symbol(&mut self) -> bool {
        if self.spec.degree() == 1 {
            return false;
        }
        self.skip_ws();
        let sym = self.spec.symbol.as_bytes();
        self.bytes[self.pos..].starts_with(sym)
    }

    fn parse_term(&mut self) -> Result<FieldElem, FieldError> {
        self.skip_ws();
        let mut coeff = 1u64;
        let mut saw_coeff = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            coeff = self.parse_int()?;
            saw_coeff = true;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                // bare integer term
                return Ok(self.spec.from_int(coeff as i64));
            }
        }
        if !self.at_symbol() {
            if saw_coeff {
                return self.err("expected generator symbol after '*'");
            }
            return self.err("expected integer or generator symbol");
        }
        self.pos += self.spec.symbol.len();
        let mut power = 1usize;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            power = self.parse_int()? as usize;
        }
        if power >= self.spec.degree() {
            // reduce g^power via repeated multiplication; powers of the
            // generator beyond n-1 are accepted and reduced
            let g = self.spec.generator();
            let mut acc = self.spec.from_int(coeff as i64);
            for _ in 0..power {
                acc = self.spec.mul(acc, g);
            }
            return Ok(acc);
        }
        let mut coeffs = vec![0u64; power + 1];
        coeffs[power] = coeff;
        Ok(self.spec.from_coeffs(&coeffs))
    }

    fn parse_sum(&mut self) -> Result<FieldElem, FieldError> {
        let mut acc = self.parse_term()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'+') {
                self.pos += 1;
                let t = self.parse_term()?;
                acc = self.spec.add(acc, t);
            } else {
                return Ok(acc);
            }
        }
    }
}
