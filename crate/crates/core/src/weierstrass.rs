//! Long Weierstrass curves `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`
//! with coefficients in `R_P`, their `b`-invariants and discriminant, and the
//! `(u, l, m, n)` coordinate changes: `x -> u^2 x + n`,
//! `y -> u^3 y + l u^2 x + m`, then divide by `u^6`.
//!
//! The `(l, m, n)` naming maps onto the standard `(r, s, t)` convention as
//! `n = r`, `l = s`, `m = t`.

use crate::field::{FieldElem, FieldSpec};
use crate::local::{LocalError, PadicElem, Valuation};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum TransformError {
    #[error("NotIntegral: transformed coefficient a{index} leaves the valuation ring")]
    NotIntegral { index: usize },
    #[error("InsufficientPrecision: cannot decide integrality of a{index} at the available precision")]
    InsufficientPrecision { index: usize },
    #[error("ZeroScale: transform requires u != 0")]
    ZeroScale,
    #[error(transparent)]
    Local(#[from] LocalError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCurve {
    field: Arc<FieldSpec>,
    pub a1: PadicElem,
    pub a2: PadicElem,
    pub a3: PadicElem,
    pub a4: PadicElem,
    pub a6: PadicElem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInvariants {
    pub b2: PadicElem,
    pub b4: PadicElem,
    pub b6: PadicElem,
    pub b8: PadicElem,
    pub delta: PadicElem,
}

/// Coordinate change `x -> u^2 x + n`, `y -> u^3 y + l u^2 x + m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transform {
    pub u: PadicElem,
    pub l: PadicElem,
    pub m: PadicElem,
    pub n: PadicElem,
}

/// Work precision when a unit `u` with infinitely many inverse digits meets
/// all-exact inputs; the result is then a class at this precision.
const UNIT_INV_PRECISION: usize = 48;

impl WeierstrassCurve {
    pub fn new(
        field: Arc<FieldSpec>,
        a1: PadicElem,
        a2: PadicElem,
        a3: PadicElem,
        a4: PadicElem,
        a6: PadicElem,
    ) -> WeierstrassCurve {
        let id = field.id();
        for a in [&a1, &a2, &a3, &a4, &a6] {
            assert!(a.field() == id, "curve coefficients from a different field");
        }
        WeierstrassCurve { field, a1, a2, a3, a4, a6 }
    }

    /// `y^2 = x^3 + a4 x + a6` from integer digit lists, for tests and the CLI.
    pub fn short_from_ints(field: &Arc<FieldSpec>, a4: &[i64], a6: &[i64]) -> WeierstrassCurve {
        let f = field;
        let conv = |ds: &[i64]| {
            PadicElem::exact_digits(f, &ds.iter().map(|&v| f.from_int(v)).collect::<Vec<_>>())
        };
        WeierstrassCurve::new(
            field.clone(),
            PadicElem::zero(f),
            PadicElem::zero(f),
            PadicElem::zero(f),
            conv(a4),
            conv(a6),
        )
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coefficients(&self) -> [&PadicElem; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn is_exact(&self) -> bool {
        self.coefficients().iter().all(|a| a.is_exact())
    }

    /// Minimum coefficient precision; `None` when every coefficient is exact.
    pub fn min_precision(&self) -> Option<usize> {
        self.coefficients().iter().filter_map(|a| a.precision()).min()
    }

    pub fn invariants(&self) -> CurveInvariants {
        let f = self.field.as_ref();
        let i = |v: i64| f.from_int(v);
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let b2 = a1.mul(a1, f).add(&a2.scale(i(4), f), f);
        let b4 = a1.mul(a3, f).add(&a4.scale(i(2), f), f);
        let b6 = a3.mul(a3, f).add(&a6.scale(i(4), f), f);
        let b8 = {
            let t1 = a1.mul(a1, f).mul(a6, f);
            let t2 = a2.mul(a6, f).scale(i(4), f);
            let t3 = a1.mul(a3, f).mul(a4, f);
            let t4 = a2.mul(&a3.mul(a3, f), f);
            let t5 = a4.mul(a4, f);
            t1.add(&t2, f).sub(&t3, f).add(&t4, f).sub(&t5, f)
        };
        let delta = {
            let t1 = b2.mul(&b2, f).mul(&b8, f);
            let t2 = b4.mul(&b4, f).mul(&b4, f).scale(i(8), f);
            let t3 = b6.mul(&b6, f).scale(i(27), f);
            let t4 = b2.mul(&b4, f).mul(&b6, f).scale(i(9), f);
            t4.sub(&t1, f).sub(&t2, f).sub(&t3, f)
        };
        CurveInvariants { b2, b4, b6, b8, delta }
    }

    pub fn discriminant(&self) -> PadicElem {
        self.invariants().delta
    }

    /// Translation `x -> x + n`, `y -> y + l x + m` (the `u = 1` transform);
    /// always integral, never loses the discriminant.
    pub fn translate_xy(&self, l: &PadicElem, m: &PadicElem, n: &PadicElem) -> WeierstrassCurve {
        let f = self.field.as_ref();
        let i = |v: i64| f.from_int(v);
        let (r, s, t) = (n, l, m);
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let na1 = a1.add(&s.scale(i(2), f), f);
        let na2 = a2
            .sub(&s.mul(a1, f), f)
            .add(&r.scale(i(3), f), f)
            .sub(&s.mul(s, f), f);
        let na3 = a3.add(&r.mul(a1, f), f).add(&t.scale(i(2), f), f);
        let na4 = a4
            .sub(&s.mul(a3, f), f)
            .add(&r.mul(a2, f).scale(i(2), f), f)
            .sub(&t.add(&r.mul(s, f), f).mul(a1, f), f)
            .add(&r.mul(r, f).scale(i(3), f), f)
            .sub(&s.mul(t, f).scale(i(2), f), f);
        let na6 = a6
            .add(&r.mul(a4, f), f)
            .add(&r.mul(r, f).mul(a2, f), f)
            .add(&r.mul(r, f).mul(r, f), f)
            .sub(&t.mul(a3, f), f)
            .sub(&t.mul(t, f), f)
            .sub(&r.mul(t, f).mul(a1, f), f);
        WeierstrassCurve::new(self.field.clone(), na1, na2, na3, na4, na6)
    }

    /// Full `(u, l, m, n)` change of coordinates. Unit `u` keeps integrality
    /// automatic; `v(u) > 0` divides and can fail.
    pub fn apply_transform(&self, t: &Transform) -> Result<WeierstrassCurve, TransformError> {
        let f = self.field.as_ref();
        if t.u.is_exact_zero() {
            return Err(TransformError::ZeroScale);
        }
        let translated = self.translate_xy(&t.l, &t.m, &t.n);
        let k = match t.u.val() {
            Valuation::Exact(k) => k,
            Valuation::Infinite => return Err(TransformError::ZeroScale),
            Valuation::AtLeast(_) => {
                return Err(TransformError::InsufficientPrecision { index: 1 })
            }
        };
        // u = pi^k * w with w a unit; divide a_i by w^i then by pi^(k*i).
        // A constant w divides exactly; a longer unit series costs precision,
        // bounded below by UNIT_INV_PRECISION when everything was exact.
        let w = t.u.shift(-(k as i64), f).expect("valuation checked");
        let w_inv_const: Option<FieldElem> =
            w.as_constant(f).map(|c| f.inv(c).expect("unit digit"));

        let divide = |num: &PadicElem, power: usize, index: usize| -> Result<PadicElem, TransformError> {
            let reduced = match w_inv_const {
                Some(ci) => num.scale(f.pow(ci, power as u64), f),
                None => {
                    let prec = num.precision().unwrap_or(UNIT_INV_PRECISION + k * power).max(1);
                    let w_inv = w.invert_to(prec, f).expect("unit series");
                    let mut acc = num.clone();
                    for _ in 0..power {
                        acc = acc.mul(&w_inv, f);
                    }
                    acc
                }
            };
            let need = k * power;
            if need == 0 {
                return Ok(reduced);
            }
            match reduced.val() {
                Valuation::Infinite => Ok(reduced),
                Valuation::Exact(v) if v >= need => {
                    Ok(reduced.shift(-(need as i64), f).expect("valuation checked"))
                }
                Valuation::Exact(_) => Err(TransformError::NotIntegral { index }),
                Valuation::AtLeast(m) if m >= need => {
                    Ok(reduced.shift(-(need as i64), f).expect("valuation checked"))
                }
                Valuation::AtLeast(_) => Err(TransformError::InsufficientPrecision { index }),
            }
        };

        Ok(WeierstrassCurve::new(
            self.field.clone(),
            divide(&translated.a1, 1, 1)?,
            divide(&translated.a2, 2, 2)?,
            divide(&translated.a3, 3, 3)?,
            divide(&translated.a4, 4, 4)?,
            divide(&translated.a6, 6, 6)?,
        ))
    }

    /// The minimality rescaling `a_i -> a_i / pi^i`.
    pub fn scale_down_by_pi(&self) -> Result<WeierstrassCurve, LocalError> {
        let f = self.field.as_ref();
        Ok(WeierstrassCurve::new(
            self.field.clone(),
            self.a1.shift(-1, f)?,
            self.a2.shift(-2, f)?,
            self.a3.shift(-3, f)?,
            self.a4.shift(-4, f)?,
            self.a6.shift(-6, f)?,
        ))
    }

    /// Bracketed text form `[a1, a2, a3, a4, a6]` in the local-ring grammar.
    pub fn format(&self) -> String {
        let f = self.field.as_ref();
        format!(
            "[{}, {}, {}, {}, {}]",
            self.a1.format(f),
            self.a2.format(f),
            self.a3.format(f),
            self.a4.format(f),
            self.a6.format(f)
        )
    }

    pub fn parse(field: &Arc<FieldSpec>, text: &str) -> Result<WeierstrassCurve, LocalError> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| LocalError::Parse { pos: 0, msg: "expected [a1, a2, a3, a4, a6]".into() })?;
        let parts = split_top_level(inner);
        if parts.len() != 5 {
            return Err(LocalError::Parse {
                pos: 0,
                msg: format!("expected 5 coefficients, got {}", parts.len()),
            });
        }
        let f = field.as_ref();
        let mut elems = Vec::with_capacity(5);
        for part in parts {
            elems.push(PadicElem::parse(f, part.trim())?);
        }
        let a6 = elems.pop().unwrap();
        let a4 = elems.pop().unwrap();
        let a3 = elems.pop().unwrap();
        let a2 = elems.pop().unwrap();
        let a1 = elems.pop().unwrap();
        Ok(WeierstrassCurve::new(field.clone(), a1, a2, a3, a4, a6))
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}
