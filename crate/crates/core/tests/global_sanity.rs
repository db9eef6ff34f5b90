//! Sanity check (not acceptance-gated): the measured frequency of
//! non-minimality at a fixed degree-1 place over the bounded-degree census
//! box is consistent with the local mass `Q_P^(-10)`.

use kodaira_core::*;
use std::sync::Arc;

#[test]
fn per_place_non_minimality_frequency() {
    let f2: Arc<FieldSpec> = FieldSpec::with_default_modulus(2).unwrap();
    let f = f2.as_ref();
    let d = 3usize;
    let coeffs_per = d + 1;
    let total = 2u64.pow(5 * coeffs_per as u32);
    let places = [Poly::from_ints(&f2, &[0, 1]), Poly::from_ints(&f2, &[1, 1])];

    let mut elliptic = 0u64;
    let mut failures = [0u64; 2];
    for mut idx in 0..total {
        let mut polys = Vec::with_capacity(5);
        for _ in 0..5 {
            let cs: Vec<FieldElem> = (0..coeffs_per)
                .map(|_| {
                    let c = f2.from_index((idx % 2) as u32);
                    idx /= 2;
                    c
                })
                .collect();
            polys.push(Poly::from_coeffs(cs));
        }
        let e = GlobalCurve::new(
            f2.clone(),
            [polys[0].clone(), polys[1].clone(), polys[2].clone(), polys[3].clone(), polys[4].clone()],
        );
        let delta = e.discriminant();
        if delta.is_zero() {
            continue;
        }
        elliptic += 1;
        for (slot, place) in places.iter().enumerate() {
            // N_P >= 1 needs v_P(Delta) >= 12
            let mut v = 0usize;
            let mut cur = delta.clone();
            while v < 12 {
                let (quo, rem) = cur.divrem(place, f).unwrap();
                if rem.is_zero() {
                    v += 1;
                    cur = quo;
                } else {
                    break;
                }
            }
            if v < 12 {
                continue;
            }
            let local = localize_at(&e, &Place::Finite(place.clone())).unwrap();
            if let TateOutcome::Decided { iterations, .. } = run_tate(&local).unwrap() {
                if iterations >= 1 {
                    failures[slot] += 1;
                }
            }
        }
    }

    // expected frequency per degree-1 place: 2^-10 with Poisson noise around
    // ~1000 events; a 25% band is a sanity check, not a sharp test
    let expect = elliptic as f64 / 1024.0;
    for (slot, &fails) in failures.iter().enumerate() {
        let ratio = fails as f64 / expect;
        assert!(
            (0.75..=1.25).contains(&ratio),
            "place {slot}: {fails} failures vs expected ~{expect:.0}"
        );
    }
}
