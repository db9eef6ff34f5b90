//! Haar-measure densities of (Kodaira type, Tamagawa number, iteration
//! count) triples over `R_P`-coefficient curves.
//!
//! Three independent routes to the same numbers:
//!
//! * [`closed_form`]: the exact table. All values at `k` iterations are the
//!   `k = 0` values scaled by `Q^(-10k)`.
//! * [`enumerate_exact`]: breadth-first refinement of coefficient residue
//!   classes modulo `pi^d`. A class decided by the algorithm contributes its
//!   exact mass `Q^(-c d)`; an undecided class splits into `Q^c` children one
//!   digit deeper. Reports are exact: decided masses plus the undecided mass
//!   always sum to 1, and the closed form must sit inside
//!   `[decided, decided + undecided]` for every key.
//! * [`estimate_mc`]: seeded Monte Carlo with counter-based per-sample
//!   streams, unbiased for the decided events and deterministic for a given
//!   `(seed, samples)` regardless of worker count.
//!
//! [`pushforward_uniformity`] checks digit-exactly that the reduction maps
//! push the uniform measure on long curves to the uniform measure on the
//! reduced coefficient tuples.

use crate::field::FieldSpec;
use crate::local::PadicElem;
use crate::par;
use crate::rational::{q_pow_inv, rat_str, rat_zero, ratio};
use crate::tate::{char_class, reduce_form, run_tate_with, CharClass, FormTag, KodairaType, TateConfig, TateError, TateOutcome};
use crate::weierstrass::WeierstrassCurve;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use smallvec::SmallVec;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum DensityError {
    #[error("InadmissibleKey: ({kodaira}, c={tamagawa}, k={iterations}) is not in the table")]
    InadmissibleKey { kodaira: KodairaType, tamagawa: u32, iterations: u32 },
    #[error("MismatchedCharacteristic: form {form} requires p {requirement}, field has p = {p}")]
    MismatchedCharacteristic { form: FormTag, requirement: &'static str, p: u64 },
    #[error("BudgetExceeded: {what} needs {need} but the budget is {budget}")]
    BudgetExceeded { what: &'static str, need: u64, budget: u64 },
}

/// A table key: type, Tamagawa number, completed iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DensityKey {
    pub kodaira: KodairaType,
    pub tamagawa: u32,
    pub iterations: u32,
}

impl DensityKey {
    pub fn new(kodaira: KodairaType, tamagawa: u32, iterations: u32) -> DensityKey {
        DensityKey { kodaira, tamagawa, iterations }
    }
}

fn qr(num: BigInt, den: BigInt) -> BigRational {
    ratio(num, den)
}

fn qi(v: u64) -> BigInt {
    BigInt::from(v)
}

/// Exact density of one key. The `k = 0` masses follow the table; `k`
/// iterations scale by `Q^(-10k)`.
pub fn closed_form(q: u64, key: &DensityKey) -> Result<BigRational, DensityError> {
    let bad = || DensityError::InadmissibleKey {
        kodaira: key.kodaira,
        tamagawa: key.tamagawa,
        iterations: key.iterations,
    };
    let qm1 = qi(q) - 1;
    let qb = qi(q);
    let c = key.tamagawa;
    let base = match key.kodaira {
        KodairaType::I0 => {
            if c != 1 {
                return Err(bad());
            }
            qr(qm1, qb)
        }
        KodairaType::In(n) => {
            let sq = qm1.clone() * qm1.clone();
            match n {
                0 => return Err(bad()),
                1 => {
                    if c != 1 {
                        return Err(bad());
                    }
                    qr(sq, qb.pow(3))
                }
                2 => {
                    if c != 2 {
                        return Err(bad());
                    }
                    qr(sq, qb.pow(4))
                }
                n => {
                    let nonsplit_c = if n % 2 == 0 { 2 } else { 1 };
                    if c != n && c != nonsplit_c {
                        return Err(bad());
                    }
                    qr(sq, qi(2) * qb.pow(n + 2))
                }
            }
        }
        KodairaType::II => {
            if c != 1 {
                return Err(bad());
            }
            qr(qm1, qb.pow(3))
        }
        KodairaType::III => {
            if c != 2 {
                return Err(bad());
            }
            qr(qm1, qb.pow(4))
        }
        KodairaType::IV => {
            if c != 1 && c != 3 {
                return Err(bad());
            }
            qr(qm1, qi(2) * qb.pow(5))
        }
        KodairaType::I0Star => match c {
            1 => qr(qi(q) * qi(q) - 1, qi(3) * qb.pow(7)),
            2 => qr(qm1, qi(2) * qb.pow(6)),
            4 => qr(qi(q) * qi(q) - qi(3) * qi(q) + 2, qi(6) * qb.pow(7)),
            _ => return Err(bad()),
        },
        KodairaType::InStar(n) => {
            if n == 0 || (c != 2 && c != 4) {
                return Err(bad());
            }
            qr(qm1.clone() * qm1, qi(2) * qb.pow(n + 7))
        }
        KodairaType::IVStar => {
            if c != 1 && c != 3 {
                return Err(bad());
            }
            qr(qm1, qi(2) * qb.pow(8))
        }
        KodairaType::IIIStar => {
            if c != 2 {
                return Err(bad());
            }
            qr(qm1, qb.pow(9))
        }
        KodairaType::IIStar => {
            if c != 1 {
                return Err(bad());
            }
            qr(qm1, qb.pow(10))
        }
    };
    Ok(base * q_pow_inv(q, 10 * key.iterations as usize))
}

/// Per-type totals over all Tamagawa numbers and `I_n` indices at `k = 0`,
/// the grand total `1 - Q^(-10)`, and the total 1 over all `k`.
#[derive(Debug, Clone, Serialize)]
pub struct DensityTotals {
    pub q: u64,
    /// `(label, exact mass at k = 0)` in algorithm order.
    #[serde(serialize_with = "ser_labeled")]
    pub per_type: Vec<(String, BigRational)>,
    #[serde(serialize_with = "ser_rat")]
    pub grand_k0: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub grand_all_k: BigRational,
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_str(r))
}

fn ser_labeled<S: serde::Serializer>(
    v: &[(String, BigRational)],
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(v.len()))?;
    for (k, r) in v {
        m.serialize_entry(k, &rat_str(r))?;
    }
    m.end()
}

pub fn closed_form_totals(q: u64) -> DensityTotals {
    let qm1: BigInt = qi(q) - 1;
    let geom = |j: u32| qr(qm1.clone(), qi(q).pow(j));
    // I_n summed over n >= 1 (both Tamagawa values): (Q-1)/Q^2, a geometric
    // series over the per-n masses; same shape one level down for I_n*.
    let per_type: Vec<(String, BigRational)> = vec![
        ("I0".into(), geom(1)),
        ("In".into(), geom(2)),
        ("II".into(), geom(3)),
        ("III".into(), geom(4)),
        ("IV".into(), geom(5)),
        ("I0*".into(), geom(6)),
        ("In*".into(), geom(7)),
        ("IV*".into(), geom(8)),
        ("III*".into(), geom(9)),
        ("II*".into(), geom(10)),
    ];
    let grand_k0: BigRational = per_type.iter().map(|(_, r)| r.clone()).sum();
    let all_k_factor = qr(qi(q).pow(10), qi(q).pow(10) - 1);
    let grand_all_k = grand_k0.clone() * all_k_factor;
    DensityTotals { q, per_type, grand_k0, grand_all_k }
}

/// Haar mass of "more than `k` completed iterations": `Q^(-10(k+1))`.
pub fn non_minimal_tail(q: u64, k: usize) -> BigRational {
    q_pow_inv(q, 10 * (k + 1))
}

/// Exact density report from residue-class refinement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub form: FormTag,
    pub q: u64,
    pub depth: usize,
    pub decided: BTreeMap<DensityKey, BigRational>,
    pub undecided: BigRational,
    pub classes_visited: u64,
}

impl DensityReport {
    pub fn decided_mass(&self, key: &DensityKey) -> BigRational {
        self.decided.get(key).cloned().unwrap_or_else(rat_zero)
    }

    /// `sum(decided) + undecided`, which must be exactly 1.
    pub fn total_mass(&self) -> BigRational {
        self.decided.values().cloned().sum::<BigRational>() + self.undecided.clone()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .decided
            .iter()
            .map(|(k, m)| {
                serde_json::json!({
                    "kodaira": k.kodaira.to_string(),
                    "tamagawa": k.tamagawa,
                    "iterations": k.iterations,
                    "mass": rat_str(m),
                })
            })
            .collect();
        serde_json::json!({
            "form": self.form.to_string(),
            "Q": self.q,
            "depth": self.depth,
            "entries": entries,
            "undecided": rat_str(&self.undecided),
            "classes_visited": self.classes_visited,
        })
    }
}

fn check_char(form: FormTag, field: &FieldSpec) -> Result<(), DensityError> {
    let ok = match form.required_char() {
        None => true,
        Some(CharClass::Two) => field.p() == 2,
        Some(CharClass::Three) => field.p() == 3,
        Some(CharClass::AtLeast5) => field.p() >= 5,
    };
    if ok {
        Ok(())
    } else {
        Err(DensityError::MismatchedCharacteristic {
            form,
            requirement: match form {
                FormTag::G1 => ">= 5",
                FormTag::G2 => "= 3",
                FormTag::G3 => "= 2",
                FormTag::Long => "any",
            },
            p: field.p(),
        })
    }
}

/// Packed class: `c` coefficients x `depth` digits, level-major, each digit
/// in `ceil(log2 q)` bits of a `u64`.
struct ClassCodec {
    c: usize,
    bits: u32,
    q: u64,
}

impl ClassCodec {
    fn new(form: FormTag, q: u64) -> ClassCodec {
        let bits = 64 - (q - 1).leading_zeros();
        ClassCodec { c: form.free_coefficients(), bits: bits.max(1), q }
    }

    fn max_depth(&self) -> usize {
        64 / (self.c * self.bits as usize)
    }

    fn decode(&self, cls: u64, depth: usize, f: &FieldSpec) -> Vec<PadicElem> {
        let mask = (1u64 << self.bits) - 1;
        let mut out = Vec::with_capacity(self.c);
        for i in 0..self.c {
            let mut digits: SmallVec<[u32; 14]> = SmallVec::with_capacity(depth);
            for t in 0..depth {
                let off = ((t * self.c + i) as u32) * self.bits;
                digits.push(((cls >> off) & mask) as u32);
            }
            out.push(PadicElem::class_from_indices(f, digits));
        }
        out
    }

    /// The `q^c` one-level suffixes to append at `depth`.
    fn suffixes(&self, depth: usize) -> Vec<u64> {
        let total = self.q.pow(self.c as u32);
        (0..total)
            .map(|mut j| {
                let mut s = 0u64;
                for i in 0..self.c {
                    let d = j % self.q;
                    j /= self.q;
                    let off = ((depth * self.c + i) as u32) * self.bits;
                    s |= d << off;
                }
                s
            })
            .collect()
    }
}

fn build_curve(form: FormTag, field: &Arc<FieldSpec>, coeffs: Vec<PadicElem>) -> WeierstrassCurve {
    let z = || PadicElem::zero(field);
    let mut it = coeffs.into_iter();
    match form {
        FormTag::G1 => {
            let a4 = it.next().unwrap();
            let a6 = it.next().unwrap();
            WeierstrassCurve::new(field.clone(), z(), z(), z(), a4, a6)
        }
        FormTag::G2 => {
            let a2 = it.next().unwrap();
            let a4 = it.next().unwrap();
            let a6 = it.next().unwrap();
            WeierstrassCurve::new(field.clone(), z(), a2, z(), a4, a6)
        }
        FormTag::G3 => {
            let a1 = it.next().unwrap();
            let a3 = it.next().unwrap();
            let a4 = it.next().unwrap();
            let a6 = it.next().unwrap();
            WeierstrassCurve::new(field.clone(), a1, z(), a3, a4, a6)
        }
        FormTag::Long => {
            let a1 = it.next().unwrap();
            let a2 = it.next().unwrap();
            let a3 = it.next().unwrap();
            let a4 = it.next().unwrap();
            let a6 = it.next().unwrap();
            WeierstrassCurve::new(field.clone(), a1, a2, a3, a4, a6)
        }
    }
}

/// Breadth-first exact enumeration. Refinement is level-atomic: a level is
/// refined only if the whole frontier fits in the remaining class budget,
/// which keeps the report independent of scheduling and worker count.
pub fn enumerate_exact(
    form: FormTag,
    field: &Arc<FieldSpec>,
    max_depth: usize,
    class_budget: u64,
) -> Result<DensityReport, DensityError> {
    check_char(form, field)?;
    let codec = ClassCodec::new(form, field.q());
    let q = field.q();
    let cfg = TateConfig::default();
    let depth_cap = codec.max_depth().min(max_depth);

    let mut decided_counts: BTreeMap<DensityKey, Vec<u64>> = BTreeMap::new();
    let mut undecided_counts: Vec<(usize, u64)> = Vec::new();
    let mut visited = 0u64;

    // per-level work runs in fixed-size blocks to bound the outcome buffer;
    // block boundaries do not affect the result
    const BLOCK: usize = 1 << 21;
    let base_suffixes = codec.suffixes(0);

    let mut frontier: Vec<u64> = base_suffixes.clone();
    let mut d = 1usize;
    loop {
        if frontier.is_empty() {
            break;
        }
        if visited + frontier.len() as u64 > class_budget {
            // the whole level stays unvisited
            undecided_counts.push((d, frontier.len() as u64));
            frontier.clear();
            break;
        }
        visited += frontier.len() as u64;
        let at_cap = d >= depth_cap;
        let shift = (d * codec.c) as u32 * codec.bits;
        let mut next: Vec<u64> = Vec::new();
        let mut undecided_here = 0u64;
        for block in frontier.chunks(BLOCK) {
            let outcomes: Vec<Option<DensityKey>> = par::map_slice(block, |&cls| {
                let coeffs = codec.decode(cls, d, field);
                let curve = build_curve(form, field, coeffs);
                match run_tate_with(&curve, &cfg) {
                    Ok(TateOutcome::Decided { kodaira, tamagawa, iterations, .. }) => {
                        Some(DensityKey::new(kodaira, tamagawa, iterations))
                    }
                    Ok(TateOutcome::Undecided { .. }) => None,
                    Err(TateError::IterationBudget { .. }) => None,
                    Err(e) => unreachable!("class curves cannot fail with {e}"),
                }
            });
            for (cls, out) in block.iter().zip(&outcomes) {
                match out {
                    Some(key) => {
                        let slot =
                            decided_counts.entry(*key).or_insert_with(|| vec![0; depth_cap + 1]);
                        slot[d] += 1;
                    }
                    None if at_cap => undecided_here += 1,
                    None => {
                        for &s in &base_suffixes {
                            next.push(cls | (s << shift));
                        }
                    }
                }
            }
        }
        if undecided_here > 0 {
            undecided_counts.push((d, undecided_here));
        }
        frontier = next;
        d += 1;
    }

    let c = codec.c;
    let decided: BTreeMap<DensityKey, BigRational> = decided_counts
        .into_iter()
        .map(|(key, per_depth)| {
            let mass: BigRational = per_depth
                .iter()
                .enumerate()
                .filter(|&(_, &n)| n > 0)
                .map(|(depth, &n)| BigRational::from(BigInt::from(n)) * q_pow_inv(q, c * depth))
                .sum();
            (key, mass)
        })
        .collect();
    let undecided: BigRational = undecided_counts
        .iter()
        .map(|&(depth, n)| BigRational::from(BigInt::from(n)) * q_pow_inv(q, c * depth))
        .sum();

    let report = DensityReport {
        form,
        q,
        depth: max_depth,
        decided,
        undecided,
        classes_visited: visited,
    };
    debug_assert!(report.total_mass().is_one(), "mass leak in the refinement tree");
    Ok(report)
}

/// Monte Carlo estimates for the same keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McReport {
    pub form: FormTag,
    pub q: u64,
    pub samples: u64,
    pub tail_depth: usize,
    pub seed: u64,
    pub hits: BTreeMap<DensityKey, u64>,
    pub unresolved: u64,
}

impl McReport {
    pub fn estimate(&self, key: &DensityKey) -> f64 {
        let h = self.hits.get(key).copied().unwrap_or(0);
        h as f64 / self.samples.max(1) as f64
    }

    pub fn std_error(&self, key: &DensityKey) -> f64 {
        let p = self.estimate(key);
        (p * (1.0 - p) / self.samples.max(1) as f64).sqrt()
    }

    /// Frequency of at least `k` completed iterations among decided samples.
    pub fn iterations_at_least(&self, k: u32) -> (u64, f64) {
        let h: u64 = self
            .hits
            .iter()
            .filter(|(key, _)| key.iterations >= k)
            .map(|(_, &n)| n)
            .sum();
        (h, h as f64 / self.samples.max(1) as f64)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .hits
            .iter()
            .map(|(k, &h)| {
                serde_json::json!({
                    "kodaira": k.kodaira.to_string(),
                    "tamagawa": k.tamagawa,
                    "iterations": k.iterations,
                    "hits": h,
                    "estimate": self.estimate(k),
                    "std_error": self.std_error(k),
                })
            })
            .collect();
        serde_json::json!({
            "form": self.form.to_string(),
            "Q": self.q,
            "samples": self.samples,
            "tail_depth": self.tail_depth,
            "seed": self.seed,
            "entries": entries,
            "unresolved": self.unresolved,
        })
    }
}

/// Unbiased digit from the counter-based stream: rejection on `next_u32`.
fn sample_digit(rng: &mut ChaCha8Rng, q: u64) -> u32 {
    let q32 = q as u32;
    let limit = u32::MAX - (u32::MAX % q32);
    loop {
        let r = rng.next_u32();
        if r < limit {
            return r % q32;
        }
    }
}

/// Draw `samples` curves with independent uniform digits to `tail_depth` and
/// run the algorithm on each class. Sample `i` uses the stream keyed by
/// `(seed, i)`, so the report is a pure function of `(seed, samples)`.
pub fn estimate_mc(
    form: FormTag,
    field: &Arc<FieldSpec>,
    samples: u64,
    tail_depth: usize,
    seed: u64,
) -> Result<McReport, DensityError> {
    check_char(form, field)?;
    let q = field.q();
    let c = form.free_coefficients();
    let cfg = TateConfig::default();

    type Acc = (BTreeMap<DensityKey, u64>, u64);
    let (hits, unresolved) = par::map_reduce_ranges(
        0,
        samples,
        8192,
        |lo, hi| {
            let mut acc: Acc = (BTreeMap::new(), 0);
            for i in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i);
                let mut coeffs = Vec::with_capacity(c);
                for _ in 0..c {
                    let digits: SmallVec<[u32; 14]> =
                        (0..tail_depth).map(|_| sample_digit(&mut rng, q)).collect();
                    coeffs.push(PadicElem::class_from_indices(field, digits));
                }
                let curve = build_curve(form, field, coeffs);
                match run_tate_with(&curve, &cfg) {
                    Ok(TateOutcome::Decided { kodaira, tamagawa, iterations, .. }) => {
                        *acc.0.entry(DensityKey::new(kodaira, tamagawa, iterations)).or_insert(0) +=
                            1;
                    }
                    Ok(TateOutcome::Undecided { .. }) | Err(TateError::IterationBudget { .. }) => {
                        acc.1 += 1;
                    }
                    Err(e) => unreachable!("class curves cannot fail with {e}"),
                }
            }
            acc
        },
        || (BTreeMap::new(), 0),
        |mut a, b| {
            for (k, v) in b.0 {
                *a.0.entry(k).or_insert(0) += v;
            }
            a.1 += b.1;
            a
        },
    );

    Ok(McReport { form, q, samples, tail_depth, seed, hits, unresolved })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TableVerdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone)]
pub struct TableCheck {
    pub key: DensityKey,
    pub closed: BigRational,
    pub decided: BigRational,
    pub verdict: TableVerdict,
}

impl TableCheck {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kodaira": self.key.kodaira.to_string(),
            "tamagawa": self.key.tamagawa,
            "iterations": self.key.iterations,
            "closed": rat_str(&self.closed),
            "decided": rat_str(&self.decided),
            "verdict": match self.verdict {
                TableVerdict::Pass => "pass",
                TableVerdict::Fail => "fail",
                TableVerdict::Skip => "skip",
            },
        })
    }
}

/// Every admissible key up to the `I_n`/`I_n*` index bound, with all its
/// Tamagawa values.
pub fn admissible_keys(max_n: u32, max_k: u32) -> Vec<DensityKey> {
    let mut keys = Vec::new();
    for k in 0..=max_k {
        keys.push(DensityKey::new(KodairaType::I0, 1, k));
        for n in 1..=max_n {
            match n {
                1 => keys.push(DensityKey::new(KodairaType::In(1), 1, k)),
                2 => keys.push(DensityKey::new(KodairaType::In(2), 2, k)),
                n => {
                    keys.push(DensityKey::new(KodairaType::In(n), n, k));
                    keys.push(DensityKey::new(KodairaType::In(n), if n % 2 == 0 { 2 } else { 1 }, k));
                }
            }
        }
        keys.push(DensityKey::new(KodairaType::II, 1, k));
        keys.push(DensityKey::new(KodairaType::III, 2, k));
        for c in [1, 3] {
            keys.push(DensityKey::new(KodairaType::IV, c, k));
        }
        for c in [1, 2, 4] {
            keys.push(DensityKey::new(KodairaType::I0Star, c, k));
        }
        for n in 1..=max_n {
            for c in [2, 4] {
                keys.push(DensityKey::new(KodairaType::InStar(n), c, k));
            }
        }
        for c in [1, 3] {
            keys.push(DensityKey::new(KodairaType::IVStar, c, k));
        }
        keys.push(DensityKey::new(KodairaType::IIIStar, 2, k));
        keys.push(DensityKey::new(KodairaType::IIStar, 1, k));
    }
    keys
}

/// Bracket every admissible key against the closed form:
/// `decided <= closed <= decided + undecided` passes; a key with no decided
/// mass whose closed form fits inside the undecided remainder is a skip.
pub fn compare_table(report: &DensityReport) -> Vec<TableCheck> {
    let max_n = report.depth as u32;
    let max_k = (report.depth / 6) as u32;
    let mut checks = Vec::new();
    for key in admissible_keys(max_n, max_k) {
        let closed = closed_form(report.q, &key).expect("admissible by construction");
        match report.decided.get(&key) {
            Some(dec) => {
                let upper = dec.clone() + report.undecided.clone();
                let verdict = if *dec <= closed && closed <= upper {
                    TableVerdict::Pass
                } else {
                    TableVerdict::Fail
                };
                checks.push(TableCheck { key, closed, decided: dec.clone(), verdict });
            }
            None => {
                let verdict = if closed <= report.undecided {
                    TableVerdict::Skip
                } else {
                    TableVerdict::Fail
                };
                checks.push(TableCheck { key, closed, decided: rat_zero(), verdict });
            }
        }
    }
    checks
}

/// Enumerate all `Q^(5 depth)` long-form residue classes, apply the
/// characteristic's reduction map, and tally the reduced tuples mod
/// `pi^depth`. Returns the maximum deviation from uniform as an exact
/// rational; the measure-preservation statement is that it is exactly 0.
pub fn pushforward_uniformity(
    field: &Arc<FieldSpec>,
    depth: usize,
    budget: u64,
) -> Result<BigRational, DensityError> {
    let q = field.q();
    let five = 5 * depth as u32;
    let total = q
        .checked_pow(five)
        .filter(|&t| t <= budget)
        .ok_or(DensityError::BudgetExceeded {
            what: "pushforward enumeration",
            need: q.checked_pow(five).unwrap_or(u64::MAX),
            budget,
        })?;
    let out_form = match char_class(field) {
        CharClass::Two => FormTag::G3,
        CharClass::Three => FormTag::G2,
        CharClass::AtLeast5 => FormTag::G1,
    };
    let c = out_form.free_coefficients();
    let buckets = q.pow((c * depth) as u32) as usize;

    let counts = par::map_reduce_ranges(
        0,
        total,
        16384,
        |lo, hi| {
            let mut counts = vec![0u64; buckets];
            for idx in lo..hi {
                // decode the long tuple: coefficient i, digit t
                let mut rem = idx;
                let mut coeffs = Vec::with_capacity(5);
                for _ in 0..5 {
                    let digits: SmallVec<[u32; 14]> = (0..depth)
                        .map(|_| {
                            let d = (rem % q) as u32;
                            rem /= q;
                            d
                        })
                        .collect();
                    coeffs.push(PadicElem::class_from_indices(field, digits));
                }
                let curve = build_curve(FormTag::Long, field, coeffs);
                let reduced = reduce_form(&curve);
                debug_assert_eq!(reduced.tag, out_form);
                let free: Vec<&PadicElem> = match out_form {
                    FormTag::G1 => vec![&reduced.curve.a4, &reduced.curve.a6],
                    FormTag::G2 => vec![&reduced.curve.a2, &reduced.curve.a4, &reduced.curve.a6],
                    FormTag::G3 => vec![
                        &reduced.curve.a1,
                        &reduced.curve.a3,
                        &reduced.curve.a4,
                        &reduced.curve.a6,
                    ],
                    FormTag::Long => unreachable!(),
                };
                let mut bucket = 0u64;
                let mut base = 1u64;
                for e in free {
                    for t in 0..depth {
                        let digit = e.digit(field, t).expect("reduction is digit-local");
                        bucket += digit.index() as u64 * base;
                        base *= q;
                    }
                }
                counts[bucket as usize] += 1;
            }
            counts
        },
        || vec![0u64; buckets],
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    );

    debug_assert_eq!(counts.iter().sum::<u64>(), total);
    let expect = BigRational::new(BigInt::one(), BigInt::from(buckets as u64));
    let total_r = BigRational::from(BigInt::from(total));
    let mut max_dev = rat_zero();
    for &n in &counts {
        let frac = BigRational::from(BigInt::from(n)) / total_r.clone();
        let dev = if frac >= expect { frac - expect.clone() } else { expect.clone() - frac };
        if dev > max_dev {
            max_dev = dev;
        }
    }
    Ok(max_dev)
}
