use std::collections::BTreeSet;

use metgroup::coverage::{is_rt_big, normal_gen_number, uniformity_scan, ConjBall, CoverOptions, Verdict};
use metgroup::iet::{discretize, embed_perm};
use metgroup::linear::{block_embed, jordan_length};
use metgroup::perm::{find_conjugator_min_support, nearby_nonexceptional, sigma_infinity, Perm, PermNorm};
use metgroup::ultraseq::{tail_norm_profile, SeqRule};
use metgroup::{Enumerated, Error, GroupAdapter, Iet, SlGroup, SymGroup, Q};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn perm_of(n: usize) -> impl Strategy<Value = Perm> {
    Just((1..=n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Perm::from_one_line(&v).unwrap())
}

fn perms(lo: usize, hi: usize, k: usize) -> impl Strategy<Value = Vec<Perm>> {
    (lo..=hi).prop_flat_map(move |n| proptest::collection::vec(perm_of(n), k))
}

fn small_q() -> impl Strategy<Value = Q> {
    (1i64..=12, 1i64..=12).prop_map(|(a, b)| Q::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamming_is_subadditive_and_conjugation_invariant(ps in perms(1, 14, 3)) {
        let (a, b, h) = (&ps[0], &ps[1], &ps[2]);
        prop_assert!(a.then(b).hamming() <= a.hamming() + b.hamming());
        prop_assert_eq!(a.conj(h).hamming(), a.hamming());
        prop_assert_eq!(a.inverse().hamming(), a.hamming());
    }

    #[test]
    fn conjugators_stay_inside_the_supports(ps in perms(1, 14, 2)) {
        let (a, h) = (&ps[0], &ps[1]);
        let b = a.conj(h);
        let found = find_conjugator_min_support(a, &b).unwrap().expect("conjugate pair");
        prop_assert_eq!(a.conj(&found), b.clone());
        let allowed: BTreeSet<usize> = a.support().union(&b.support()).copied().collect();
        prop_assert!(found.support().is_subset(&allowed));
    }

    #[test]
    fn non_conjugate_pairs_have_no_conjugator(ps in perms(2, 10, 2)) {
        let (a, b) = (&ps[0], &ps[1]);
        let found = find_conjugator_min_support(a, b).unwrap();
        prop_assert_eq!(found.is_some(), a.cycle_type() == b.cycle_type());
    }

    #[test]
    fn repair_meets_its_postconditions(ps in perms(5, 14, 1)) {
        let tau = &ps[0];
        prop_assume!(tau.hamming() >= 5);
        match nearby_nonexceptional(tau) {
            Ok(sigma) => {
                prop_assert_eq!(sigma.support(), tau.support());
                prop_assert!(sigma.is_even() && !sigma.is_exceptional());
                prop_assert!(tau.then(&sigma.inverse()).hamming() <= 5);
            }
            // Five moved points leave only 5-cycles as even candidates.
            Err(Error::NoWitness(_)) => prop_assert_eq!(tau.hamming(), 5),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn sigma_infinity_certificates_replay(ps in perms(5, 8, 1), extra in 0usize..10, seed in any::<u64>()) {
        let sigma = &ps[0];
        prop_assume!(!sigma.is_identity() && !sigma.is_exceptional());
        let n = sigma.degree() + extra;
        match sigma_infinity(sigma, n, seed, 64) {
            Ok((s, cert)) => {
                prop_assert_eq!(s.hamming(), n);
                prop_assert!(cert.replay(&SymGroup::symmetric(n)));
                prop_assert_eq!(&cert.claimed_product, &s);
                prop_assert!(cert.len() <= 4 + n / sigma.hamming());
            }
            Err(Error::ConstructionIncomplete { .. }) => {}
            Err(Error::Precondition(_)) => prop_assert!(sigma.hamming() < 5),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn iet_discretization_of_embedded_perms_is_exact(ps in perms(1, 7, 1), k in 2usize..5) {
        let delta = &ps[0];
        let n = delta.degree();
        let h: Iet = embed_perm(delta);
        prop_assert_eq!(h.support_norm(), Q::new(delta.hamming() as i64, n as i64));
        let d = discretize(&h, k * n).unwrap();
        prop_assert_eq!(d.distance, Q::from_integer(0));
        prop_assert_eq!(d.h_prime, h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conjugate_ball_levels_are_closed(alt in any::<bool>(), pick in any::<prop::sample::Index>()) {
        let g = if alt { SymGroup::alternating(6) } else { SymGroup::symmetric(5) };
        let en = Enumerated::new(&g).unwrap();
        let base = pick.index(en.len());
        let mut cb = ConjBall::new(&en, base);
        let depth = cb.generation_number(16).finite().unwrap_or(8);
        cb.grow_to(depth + 1);
        let mut prev = en.set_of([en.identity()]);
        for k in 0..=depth + 1 {
            let level = cb.level(k).clone();
            prop_assert!(prev.is_subset(&level));
            for x in level.ones() {
                prop_assert!(level.contains(en.inv(x)));
                for &h in en.generators() {
                    prop_assert!(level.contains(en.conj(x, h)));
                }
                if k <= depth {
                    let cert = cb.certificate(x).expect("member has a certificate");
                    prop_assert!(cert.replay(&g));
                    prop_assert!(cert.len() <= k);
                }
            }
            prev = level;
        }
    }

    #[test]
    fn generation_number_is_a_class_function(a in any::<prop::sample::Index>(), h in any::<prop::sample::Index>()) {
        let g = SymGroup::symmetric(5);
        let en = Enumerated::new(&g).unwrap();
        let (x, y) = (a.index(en.len()), h.index(en.len()));
        prop_assert_eq!(normal_gen_number(&en, x), normal_gen_number(&en, en.conj(x, y)));
    }

    #[test]
    fn bigness_survives_extension_and_wider_thickenings(
        r in small_q(), dt in small_q(), eps in proptest::collection::vec(small_q(), 1..5), strict in any::<bool>()
    ) {
        let g = SymGroup::new(4, false, PermNorm::HammingNormalized);
        let en = Enumerated::new(&g).unwrap();
        let t = r + dt;
        let opts = CoverOptions { strict, start: 0 };
        let base = is_rt_big(&en, &eps, &r, &t, &opts).unwrap().verdict;
        if base == Verdict::True {
            let mut longer = eps.clone();
            longer.push(Q::new(1, 100));
            prop_assert_eq!(is_rt_big(&en, &longer, &r, &t, &opts).unwrap().verdict, Verdict::True);
            let wider: Vec<Q> = eps.iter().map(|e| e + Q::new(1, 7)).collect();
            prop_assert_eq!(is_rt_big(&en, &wider, &r, &t, &opts).unwrap().verdict, Verdict::True);
        }
        let smaller_r = r / Q::from_integer(2);
        if is_rt_big(&en, &eps, &smaller_r, &t, &opts).unwrap().verdict == Verdict::True {
            prop_assert_eq!(base, Verdict::True);
        }
    }

    #[test]
    fn uniformity_constant_stays_below_the_explicit_bound(r in small_q(), dt in small_q(), eps in 0i64..4) {
        prop_assume!(r < Q::from_integer(1));
        let t = r + dt;
        let groups: Vec<SymGroup> = (4..=5).map(|n| SymGroup::new(n, false, PermNorm::HammingNormalized)).collect();
        let family: Vec<_> = groups.iter().map(|g| Enumerated::new(g).unwrap()).collect();
        let rep = uniformity_scan(&family, &r, &t, &Q::new(eps, 4), 40, true).unwrap();
        if let Some(n) = rep.n {
            let bound = (Q::from_integer(16) + Q::from_integer(4) * t / r).ceil().to_integer();
            prop_assert!(n as i64 <= bound, "N = {n}, bound {bound}");
        }
    }

    #[test]
    fn block_embedding_is_an_isometric_monomorphism(p in prop::sample::select(vec![2u32, 3, 5]), factor in 2usize..4, seed in any::<u64>()) {
        let g = SlGroup::new(2, p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = g.random_word(&mut rng, 20);
        let b = g.random_word(&mut rng, 20);
        let m = 2 * factor;
        let (fa, fb) = (block_embed(&a, m).unwrap(), block_embed(&b, m).unwrap());
        prop_assert_eq!(jordan_length::<i64>(&fa), jordan_length::<i64>(&a));
        prop_assert_eq!(block_embed(&a.mul(&b), m).unwrap(), fa.mul(&fb));
        prop_assert_eq!(fa == fb, a == b);
        let mut power = a.clone();
        for _ in 1..=120 {
            prop_assert!(jordan_length::<i64>(&power) <= jordan_length::<i64>(&a));
            power = power.mul(&a);
        }
    }

    #[test]
    fn profiles_are_pure(m in 1u64..7, lo in 1usize..20, len in 0usize..20) {
        let rule = SeqRule::LeeThird;
        let hi = (lo + len).min(62);
        prop_assert_eq!(tail_norm_profile(&rule, m, lo, hi).unwrap(), tail_norm_profile(&rule, m, lo, hi).unwrap());
    }
}
