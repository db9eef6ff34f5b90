//! The global side over `K = F_q(t)`: places are monic irreducibles of
//! `F_q[t]` plus the degree-1 place at infinity, curves are quintuples of
//! polynomials, and localization at a finite place is plain `P`-adic digit
//! expansion of each coefficient.
//!
//! The density of curves that are everywhere at most `k` times non-minimal
//! has the closed form `1/zeta_K(10(k+1)) * prod_{P in S}
//! Q_P^(10(k+1))/(Q_P^(10(k+1)) - 1)`; over the rational function field the
//! zeta function is `1/((1 - q^-s)(1 - q^(1-s)))`, so with `S` the infinite
//! place the density is `1 - q^(-(10k+9))`. [`empirical_global`] measures the
//! same quantity by exhausting all curves with coefficients of degree at most
//! `d` (the Riemann-Roch space of `d * infinity`).

use crate::field::{FieldElem, FieldSpec};
use crate::local::PadicElem;
use crate::par;
use crate::poly::{Poly, PolyError};
use crate::rational::{rat_str, ratio};
use crate::tate::{run_tate_with, TateConfig, TateOutcome};
use crate::weierstrass::WeierstrassCurve;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum GlobalError {
    #[error("BudgetExceeded: {what} needs {need} but the budget is {budget}")]
    BudgetExceeded { what: &'static str, need: u64, budget: u64 },
    #[error("SingularCurve: the discriminant polynomial is zero")]
    SingularCurve,
    #[error("InfinitePlace: localization is defined at finite places only")]
    InfinitePlace,
    #[error("NotIrreducible: the place polynomial factors")]
    NotIrreducible,
    #[error("NotMonic: a place is a monic polynomial")]
    NotMonic,
    #[error("EmptyS: the place set S must be nonempty")]
    EmptyS,
    #[error("UnsupportedField: {0}")]
    UnsupportedField(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A place of `F_q(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl Place {
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(p) => p.degree().expect("place polynomial is nonzero"),
            Place::Infinity => 1,
        }
    }

    /// Residue field size `q^deg`.
    pub fn q_p(&self, q: u64) -> u64 {
        q.pow(self.degree() as u32)
    }
}

/// Long Weierstrass curve with coefficients in `F_q[t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalCurve {
    field: Arc<FieldSpec>,
    pub a1: Poly,
    pub a2: Poly,
    pub a3: Poly,
    pub a4: Poly,
    pub a6: Poly,
}

impl GlobalCurve {
    pub fn new(field: Arc<FieldSpec>, a: [Poly; 5]) -> GlobalCurve {
        let [a1, a2, a3, a4, a6] = a;
        GlobalCurve { field, a1, a2, a3, a4, a6 }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn discriminant(&self) -> Poly {
        let f = self.field.as_ref();
        let s = |p: &Poly, v: i64| p.scale(f.from_int(v), f);
        let b2 = self.a1.mul(&self.a1, f).add(&s(&self.a2, 4), f);
        let b4 = self.a1.mul(&self.a3, f).add(&s(&self.a4, 2), f);
        let b6 = self.a3.mul(&self.a3, f).add(&s(&self.a6, 4), f);
        let b8 = self
            .a1
            .mul(&self.a1, f)
            .mul(&self.a6, f)
            .add(&s(&self.a2.mul(&self.a6, f), 4), f)
            .sub(&self.a1.mul(&self.a3, f).mul(&self.a4, f), f)
            .add(&self.a2.mul(&self.a3, f).mul(&self.a3, f), f)
            .sub(&self.a4.mul(&self.a4, f), f);
        s(&b2.mul(&b4, f).mul(&b6, f), 9)
            .sub(&b2.mul(&b2, f).mul(&b8, f), f)
            .sub(&s(&b4.mul(&b4, f).mul(&b4, f), 8), f)
            .sub(&s(&b6.mul(&b6, f), 27), f)
    }

    /// Five comma-separated polynomials in `t`.
    pub fn format(&self) -> String {
        let f = self.field.as_ref();
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
            .iter()
            .map(|p| p.format(f, "t"))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn parse(field: &Arc<FieldSpec>, text: &str) -> Result<GlobalCurve, GlobalError> {
        let parts = split_top_level(text);
        if parts.len() != 5 {
            return Err(GlobalError::UnsupportedField(format!(
                "expected 5 comma-separated polynomials, got {}",
                parts.len()
            )));
        }
        let f = field.as_ref();
        let mut polys = Vec::with_capacity(5);
        for part in parts {
            polys.push(Poly::parse(f, "t", part.trim())?);
        }
        Ok(GlobalCurve::new(
            field.clone(),
            [
                polys[0].clone(),
                polys[1].clone(),
                polys[2].clone(),
                polys[3].clone(),
                polys[4].clone(),
            ],
        ))
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

/// All monic irreducibles of degree `d` over `F_q`, by the exhaustive sieve:
/// every monic polynomial of degree `d` minus those with a factor of lower
/// degree.
pub fn monic_irreducibles(
    field: &Arc<FieldSpec>,
    d: usize,
    budget: u64,
) -> Result<Vec<Poly>, GlobalError> {
    let q = field.q();
    let need = q.checked_pow(d as u32).ok_or(GlobalError::BudgetExceeded {
        what: "irreducible sieve",
        need: u64::MAX,
        budget,
    })?;
    if need > budget {
        return Err(GlobalError::BudgetExceeded { what: "irreducible sieve", need, budget });
    }
    let f = field.as_ref();
    let mut by_degree: Vec<Vec<Poly>> = vec![Vec::new()];
    for deg in 1..=d {
        let mut level = Vec::new();
        let total = q.pow(deg as u32);
        'cand: for mut idx in 0..total {
            let mut coeffs = Vec::with_capacity(deg + 1);
            for _ in 0..deg {
                coeffs.push(f.from_index((idx % q) as u32));
                idx /= q;
            }
            coeffs.push(f.one());
            let cand = Poly::from_coeffs(coeffs);
            // a factor of degree <= deg/2 exists iff the candidate factors
            for lower in by_degree.iter().take(deg / 2 + 1).skip(1) {
                for p in lower {
                    let (_, rem) = cand.divrem(p, f).expect("nonzero divisor");
                    if rem.is_zero() {
                        continue 'cand;
                    }
                }
            }
            level.push(cand);
        }
        by_degree.push(level);
    }
    Ok(by_degree.pop().unwrap())
}

/// Number of monic irreducibles of degree `d` by the necklace formula
/// `(1/d) sum_{e | d} mu(e) q^(d/e)`; the independent cross-check for the
/// sieve.
pub fn necklace_count(q: u64, d: usize) -> u64 {
    let mobius = |mut n: u64| -> i64 {
        let mut mu = 1i64;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                mu = -mu;
            }
            p += 1;
        }
        if n > 1 {
            mu = -mu;
        }
        mu
    };
    let mut total = 0i64;
    for e in 1..=d as u64 {
        if (d as u64).is_multiple_of(e) {
            total += mobius(e) * q.pow((d as u64 / e) as u32) as i64;
        }
    }
    (total / d as i64) as u64
}

/// `zeta_K(s)` for `K = F_q(t)`: `1/((1 - q^-s)(1 - q^(1-s)))`, i.e.
/// `q^(2s-1)/((q^s - 1)(q^(s-1) - 1))`, exactly.
pub fn zeta_value(q: u64, s: usize) -> Result<BigRational, GlobalError> {
    if s < 2 {
        return Err(GlobalError::UnsupportedField(
            "zeta of the rational function field converges for s >= 2 only".into(),
        ));
    }
    if !is_prime_power(q) {
        return Err(GlobalError::UnsupportedField(format!("{q} is not a prime power")));
    }
    let qb = BigInt::from(q);
    let num = qb.pow(2 * s as u32 - 1);
    let den = (qb.pow(s as u32) - 1) * (qb.pow(s as u32 - 1) - 1);
    Ok(ratio(num, den))
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut v = q;
            while v.is_multiple_of(p) {
                v /= p;
            }
            return v == 1;
        }
        p += 1;
    }
    true // q itself prime
}

/// Cumulative truncated Euler products `prod_{deg <= D} (1 - q^(-deg s))^(-T_deg)`
/// for `D = 1..=max_deg`, where `T_1` counts the `q` linear places plus
/// infinity. Returned unreduced (`new_raw`): reducing 100k-bit integers buys
/// nothing and costs a gcd.
pub fn zeta_truncated(
    field: &Arc<FieldSpec>,
    s: usize,
    max_deg: usize,
    budget: u64,
) -> Result<Vec<(usize, BigRational)>, GlobalError> {
    let q = field.q();
    let mut out = Vec::with_capacity(max_deg);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for d in 1..=max_deg {
        let t_d = monic_irreducibles(field, d, budget)?.len() as u32 + u32::from(d == 1);
        // factor (q^(ds)/(q^(ds) - 1))^(T_d)
        let qds = BigInt::from(q).pow((d * s) as u32);
        num *= qds.clone().pow(t_d);
        let qds_m1: BigInt = qds - 1;
        den *= qds_m1.pow(t_d);
        out.push((d, BigRational::new_raw(num.clone(), den.clone())));
    }
    Ok(out)
}

/// `|t - z| <= z * num/den` by cross multiplication; both sides positive.
pub fn rel_close(t: &BigRational, z: &BigRational, num: u64, den: u64) -> bool {
    let lhs = (t.numer() * z.denom() - z.numer() * t.denom()).abs() * BigInt::from(den);
    let rhs = z.numer() * t.denom() * BigInt::from(num);
    lhs <= rhs
}

/// The closed-form global density of curves with at most `k` completed
/// iterations at every place outside `S`; `S` enters only through the place
/// degrees.
pub fn global_density_formula(
    q: u64,
    s_degrees: &[u32],
    k: usize,
) -> Result<BigRational, GlobalError> {
    if s_degrees.is_empty() {
        return Err(GlobalError::EmptyS);
    }
    let e = 10 * (k + 1);
    let mut density = zeta_value(q, e)?.recip();
    for &deg in s_degrees {
        let qp = BigInt::from(q).pow(deg * e as u32);
        density *= ratio(qp.clone(), qp - 1);
    }
    Ok(density)
}

/// Check that a place polynomial is monic and irreducible.
fn validate_place(field: &Arc<FieldSpec>, place: &Poly) -> Result<usize, GlobalError> {
    let f = field.as_ref();
    let d = place.degree().ok_or(GlobalError::NotIrreducible)?;
    if d == 0 {
        return Err(GlobalError::NotIrreducible);
    }
    if !place.is_monic(f) {
        return Err(GlobalError::NotMonic);
    }
    for lower_deg in 1..=d / 2 {
        for p in monic_irreducibles(field, lower_deg, u64::MAX)? {
            let (_, rem) = place.divrem(&p, f).expect("nonzero");
            if rem.is_zero() {
                return Err(GlobalError::NotIrreducible);
            }
        }
    }
    Ok(d)
}

/// Localize a curve at a finite place.
///
/// For a degree-1 place the digits of `a = sum r_i P^i` are constants, the
/// expansion is finite, and the output is exact — this is the census path.
///
/// For `deg P >= 2` the remainders `r_i(t)` cannot simply be read as residue
/// elements: their polynomial products carry into higher `P`-digits, which
/// power-series convolution would drop, so that map fails to be a ring
/// homomorphism. The genuine coefficient field inside the completion is the
/// set of Teichmueller lifts (`x` with `x^(Q) = x`), so here digits are
/// extracted by `a_0 = a mod P`, `a := (a - teich(a_0)) / P`, working modulo
/// `P^M`; the result is a class curve known modulo `pi^M` with `M` large
/// enough to cover every decision at this place (`v_P(Delta) + 10`).
/// Residue extensions over a non-prime base field are out of scope.
pub fn localize_at(e: &GlobalCurve, at: &Place) -> Result<WeierstrassCurve, GlobalError> {
    let place = match at {
        Place::Finite(p) => p,
        Place::Infinity => return Err(GlobalError::InfinitePlace),
    };
    let field = e.field();
    let f = field.as_ref();
    let d = validate_place(field, place)?;

    if d == 1 {
        let expand = |a: &Poly| -> PadicElem {
            let mut digits: Vec<FieldElem> = Vec::new();
            let mut cur = a.clone();
            while !cur.is_zero() {
                let (quo, rem) = cur.divrem(place, f).expect("place is nonzero");
                digits.push(rem.coeff(f, 0));
                cur = quo;
            }
            PadicElem::exact_digits(field, &digits)
        };
        return Ok(WeierstrassCurve::new(
            field.clone(),
            expand(&e.a1),
            expand(&e.a2),
            expand(&e.a3),
            expand(&e.a4),
            expand(&e.a6),
        ));
    }
    if f.degree() != 1 {
        return Err(GlobalError::UnsupportedField(
            "residue extensions over a non-prime base field are not supported".into(),
        ));
    }
    let modulus: Vec<u64> = (0..=d).map(|j| f.coeffs_of(place.coeff(f, j))[0]).collect();
    let residue = FieldSpec::new(f.p(), d, &modulus, "t")
        .map_err(|err| GlobalError::UnsupportedField(err.to_string()))?;

    // precision: enough digits to decide everything at this place
    let delta = e.discriminant();
    if delta.is_zero() {
        return Err(GlobalError::SingularCurve);
    }
    let mut v = 0usize;
    let mut cur = delta;
    loop {
        let (quo, rem) = cur.divrem(place, f).expect("nonzero");
        if rem.is_zero() {
            v += 1;
            cur = quo;
        } else {
            break;
        }
    }
    let prec = v + 10;

    let pmod = {
        let mut acc = Poly::constant(f.one());
        for _ in 0..prec {
            acc = acc.mul(place, f);
        }
        acc
    };
    let reduce = |a: &Poly| a.divrem(&pmod, f).expect("nonzero modulus").1;
    // Teichmueller lift of a residue class: iterate x -> x^Q until stable
    // modulo P^prec (each step gains one digit of agreement)
    let teich = |r: &Poly| -> Poly {
        let qd = f.q().pow(d as u32);
        let mut x = r.clone();
        for _ in 0..prec {
            let mut acc = Poly::constant(f.one());
            let mut base = x.clone();
            let mut exp = qd;
            while exp > 0 {
                if exp & 1 == 1 {
                    acc = reduce(&acc.mul(&base, f));
                }
                base = reduce(&base.mul(&base, f));
                exp >>= 1;
            }
            if acc == x {
                break;
            }
            x = acc;
        }
        x
    };

    let expand = |a: &Poly| -> PadicElem {
        let mut digits: Vec<FieldElem> = Vec::with_capacity(prec);
        let mut cur = reduce(a);
        for _ in 0..prec {
            let (_, rem) = cur.divrem(place, f).expect("place nonzero");
            let coeffs: Vec<u64> = (0..d).map(|j| f.coeffs_of(rem.coeff(f, j))[0]).collect();
            digits.push(residue.from_coeffs(&coeffs));
            let lifted = teich(&rem);
            let diff = cur.sub(&lifted, f);
            let (quo, check) = diff.divrem(place, f).expect("place nonzero");
            debug_assert!(check.is_zero(), "Teichmueller digit must cancel mod P");
            cur = quo;
        }
        PadicElem::class_digits(&residue, &digits)
    };

    Ok(WeierstrassCurve::new(
        residue.clone(),
        expand(&e.a1),
        expand(&e.a2),
        expand(&e.a3),
        expand(&e.a4),
        expand(&e.a6),
    ))
}

/// Factor the discriminant by trial division; returns `(place, v_P(Delta))`
/// pairs in increasing degree/lexicographic order.
pub fn bad_places(e: &GlobalCurve) -> Result<Vec<(Poly, usize)>, GlobalError> {
    let f = e.field().as_ref();
    let mut delta = e.discriminant();
    if delta.is_zero() {
        return Err(GlobalError::SingularCurve);
    }
    let mut out = Vec::new();
    let deg = delta.degree().unwrap();
    for d in 1..=deg.max(1) {
        if delta.degree() == Some(0) {
            break;
        }
        if d > delta.degree().unwrap_or(0) / 2 {
            break;
        }
        for p in monic_irreducibles(e.field(), d, u64::MAX)? {
            let mut mult = 0usize;
            loop {
                let (quo, rem) = delta.divrem(&p, f).expect("nonzero");
                if rem.is_zero() {
                    mult += 1;
                    delta = quo;
                } else {
                    break;
                }
            }
            if mult > 0 {
                out.push((p, mult));
            }
        }
    }
    // monic cofactor of positive degree is itself irreducible
    if delta.degree().unwrap_or(0) >= 1 {
        let lead_inv = f.inv(delta.leading().unwrap()).expect("nonzero");
        out.push((delta.scale(lead_inv, f), 1));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusMode {
    Exhaustive,
    Sampled { n: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub d: usize,
    pub total: u64,
    pub singular: u64,
    pub pass: u64,
    pub fraction: BigRational,
    pub formula: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalDensityResult {
    pub q: u64,
    pub k: usize,
    pub rows: Vec<CensusRow>,
}

impl GlobalDensityResult {
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "d": r.d,
                    "total": r.total,
                    "singular": r.singular,
                    "pass": r.pass,
                    "fraction": rat_str(&r.fraction),
                    "formula": rat_str(&r.formula),
                })
            })
            .collect();
        serde_json::json!({ "q": self.q, "k": self.k, "rows": rows })
    }
}

struct CensusCounters {
    singular: u64,
    pass: u64,
}

/// Census of curves with all five coefficients of degree at most `d`, for
/// each `d` up to `d_max`: the fraction of elliptic curves that complete at
/// most `k` iterations at every finite place. Only places `P` with
/// `v_P(Delta) >= 12(k+1)` can possibly fail (a witness for `k+1` iterations
/// forces that divisibility), so candidate places have degree at most
/// `deg(Delta)/(12(k+1))` and the expensive local runs are rare.
pub fn empirical_global(
    field: &Arc<FieldSpec>,
    k: usize,
    d_max: usize,
    mode: CensusMode,
    budget: u64,
) -> Result<GlobalDensityResult, GlobalError> {
    let q = field.q();
    let f = field.as_ref();
    let mut rows = Vec::new();
    for d in 1..=d_max {
        let coeffs_per = (d + 1) as u32;
        let total = q
            .checked_pow(5 * coeffs_per)
            .ok_or(GlobalError::BudgetExceeded {
                what: "census",
                need: u64::MAX,
                budget,
            })?;
        let census_n = match mode {
            CensusMode::Exhaustive => {
                if total > budget {
                    return Err(GlobalError::BudgetExceeded { what: "census", need: total, budget });
                }
                total
            }
            CensusMode::Sampled { n, .. } => n,
        };
        // the threshold valuation below which a place cannot break the bound
        let vmin = 12 * (k + 1);
        // deg Delta <= 12(d+1)-ish; candidates capped accordingly
        let max_candidate_deg = (12 * (d + 1)) / vmin;
        let mut candidates: Vec<Poly> = Vec::new();
        for deg in 1..=max_candidate_deg.max(1) {
            candidates.extend(monic_irreducibles(field, deg, budget)?);
        }

        let decode_curve = |mut idx: u64| -> GlobalCurve {
            let mut polys = Vec::with_capacity(5);
            for _ in 0..5 {
                let coeffs: Vec<FieldElem> = (0..coeffs_per)
                    .map(|_| {
                        let c = f.from_index((idx % q) as u32);
                        idx /= q;
                        c
                    })
                    .collect();
                polys.push(Poly::from_coeffs(coeffs));
            }
            GlobalCurve::new(
                field.clone(),
                [
                    polys[0].clone(),
                    polys[1].clone(),
                    polys[2].clone(),
                    polys[3].clone(),
                    polys[4].clone(),
                ],
            )
        };

        let sample_curve = |seed: u64, i: u64| -> GlobalCurve {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let limit = u32::MAX - (u32::MAX % q as u32);
            let mut digit = || loop {
                let r = rng.next_u32();
                if r < limit {
                    return f.from_index(r % q as u32);
                }
            };
            let mut polys = Vec::with_capacity(5);
            for _ in 0..5 {
                let coeffs: Vec<FieldElem> = (0..coeffs_per).map(|_| digit()).collect();
                polys.push(Poly::from_coeffs(coeffs));
            }
            GlobalCurve::new(
                field.clone(),
                [
                    polys[0].clone(),
                    polys[1].clone(),
                    polys[2].clone(),
                    polys[3].clone(),
                    polys[4].clone(),
                ],
            )
        };

        let check_curve = |e: &GlobalCurve| -> Option<bool> {
            // None = singular, Some(pass?)
            let delta = e.discriminant();
            if delta.is_zero() {
                return None;
            }
            for p in &candidates {
                let mut v = 0usize;
                let mut cur = delta.clone();
                while v < vmin {
                    let (quo, rem) = cur.divrem(p, f).expect("nonzero");
                    if rem.is_zero() {
                        v += 1;
                        cur = quo;
                    } else {
                        break;
                    }
                }
                if v >= vmin {
                    let local =
                        localize_at(e, &Place::Finite(p.clone())).expect("validated place");
                    let cfg = TateConfig { iteration_cap: 8 + k as u32 };
                    match run_tate_with(&local, &cfg).expect("exact nonsingular curve") {
                        TateOutcome::Decided { iterations, .. } => {
                            if iterations as usize > k {
                                return Some(false);
                            }
                        }
                        TateOutcome::Undecided { .. } => {
                            unreachable!("exact localization cannot be undecided")
                        }
                    }
                }
            }
            Some(true)
        };

        let counters = par::map_reduce_ranges(
            0,
            census_n,
            4096,
            |lo, hi| {
                let mut acc = CensusCounters { singular: 0, pass: 0 };
                for i in lo..hi {
                    let curve = match mode {
                        CensusMode::Exhaustive => decode_curve(i),
                        CensusMode::Sampled { seed, .. } => sample_curve(seed, i),
                    };
                    match check_curve(&curve) {
                        None => acc.singular += 1,
                        Some(true) => acc.pass += 1,
                        Some(false) => {}
                    }
                }
                acc
            },
            || CensusCounters { singular: 0, pass: 0 },
            |mut a, b| {
                a.singular += b.singular;
                a.pass += b.pass;
                a
            },
        );

        let elliptic = census_n - counters.singular;
        let fraction = if elliptic == 0 {
            BigRational::zero()
        } else {
            ratio(BigInt::from(counters.pass), BigInt::from(elliptic))
        };
        rows.push(CensusRow {
            d,
            total: census_n,
            singular: counters.singular,
            pass: counters.pass,
            fraction,
            formula: global_density_formula(q, &[1], k)?,
        });
    }
    Ok(GlobalDensityResult { q, k, rows })
}
