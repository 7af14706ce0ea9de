use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;

use modsym::analytic::slash_value;
use modsym::brjuno::{brjuno_big_b, brjuno_big_b_rational, dyadic_parts};
use modsym::classical::{delta_coefficients, period_polynomial, ClassicalSymbols, Polynomial};
use modsym::hurwitz::hurwitz_zeta;
use modsym::levy::{convergent_denominators, levy_interval};
use modsym::measure::PseudoMeasure;
use modsym::period::{eisenstein_family, polynomial_period, three_term_residual_scaled};
use modsym::rational::{primitive_chain_to, Cusp, IntegerMatrix2};
use modsym::Complex64 as C;

fn left_cusp() -> impl Strategy<Value = Cusp> {
    prop_oneof![
        1 => Just(Cusp::infinity()),
        12 => (-300i64..=0, 1i64..=80).prop_map(|(p, q)| Cusp::new(p, q).unwrap()),
    ]
}

/// Words in T and T′ generate the monoid S.
fn s_matrix() -> impl Strategy<Value = IntegerMatrix2> {
    prop::collection::vec(any::<bool>(), 1..8).prop_map(|word| {
        word.iter().fold(IntegerMatrix2::identity(), |acc, &t| {
            let g = if t {
                IntegerMatrix2::t()
            } else {
                IntegerMatrix2::t_prime()
            };
            &acc * &g
        })
    })
}

fn right_half_plane() -> impl Strategy<Value = C> {
    (0.1f64..3.0, -2.0f64..2.0).prop_map(|(x, y)| C::new(x, y))
}

fn eisenstein_s() -> impl Strategy<Value = C> {
    prop_oneof![
        Just(C::new(1.0, 0.0)),
        Just(C::new(0.8, 2.0)),
        (0.2f64..1.5, -3.0f64..3.0).prop_map(|(a, b)| C::new(a, b))
    ]
}

fn close(a: C, b: C, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chains_tile_and_refinement_keeps_the_value(
        beta in left_cusp(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..=5),
        s in eisenstein_s(),
        z in right_half_plane(),
    ) {
        let m = PseudoMeasure::new(eisenstein_family(s));
        let mut chain = primitive_chain_to(&beta).unwrap();
        prop_assert!(chain.tiles_exactly());
        let want = m.mu_along_chain(&chain, z).unwrap();
        for pick in picks {
            if chain.is_empty() {
                break;
            }
            chain = chain.refine(pick.index(chain.len()));
            prop_assert!(chain.tiles_exactly());
        }
        let got = m.mu_along_chain(&chain, z).unwrap();
        prop_assert!(close(want, got, 1e-10), "{want} vs {got}");
    }

    #[test]
    fn additivity_across_chain_kinds(
        mut pts in prop::collection::vec(left_cusp(), 3),
        s in eisenstein_s(),
        z in right_half_plane(),
    ) {
        pts.sort_by(|a, b| a.cmp_left(b));
        let m = PseudoMeasure::new(eisenstein_family(s));
        let (a, b, c) = (&pts[0], &pts[1], &pts[2]);
        let lhs = m.mu_monotone(a, b, z).unwrap() + m.mu(b, c, z).unwrap();
        let rhs = m.mu(a, c, z).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn modularity_under_s(
        alpha in left_cusp(),
        beta in left_cusp(),
        h in s_matrix(),
        s in eisenstein_s(),
        z in right_half_plane(),
    ) {
        // μ(h⁻¹α, h⁻¹β) = μ(α, β)|ₛh; h⁻¹ keeps (−∞, 0] in place.
        let m = PseudoMeasure::new(eisenstein_family(s));
        let inv = h.adjugate();
        let lhs = m.mu(&inv.apply(&alpha), &inv.apply(&beta), z).unwrap();
        let rhs = slash_value(|w| m.mu(&alpha, &beta, w), h.to_f64(), 1.0, s, z).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn orientation_is_exact(alpha in left_cusp(), beta in left_cusp(), z in right_half_plane()) {
        let m = PseudoMeasure::new(eisenstein_family(C::new(0.8, 2.0)));
        prop_assert_eq!(m.mu(&beta, &alpha, z).unwrap(), -m.mu(&alpha, &beta, z).unwrap());
        prop_assert_eq!(m.mu(&alpha, &alpha, z).unwrap(), C::new(0.0, 0.0));
    }

    #[test]
    fn three_term_equation(s in eisenstein_s(), z in right_half_plane(), k in prop::sample::select(vec![2u32, 4, 6])) {
        prop_assert!(three_term_residual_scaled(&eisenstein_family(s), &[z]).unwrap() < 1e-12);
        prop_assert!(three_term_residual_scaled(&polynomial_period(k).unwrap(), &[z]).unwrap() < 1e-10);
    }

    #[test]
    fn hurwitz_shift_recurrence(re in 1.2f64..8.0, im in -40.0f64..40.0, a in 0.05f64..5.0) {
        let w = C::new(re, im);
        let lhs = hurwitz_zeta(w, a).unwrap() - hurwitz_zeta(w, a + 1.0).unwrap();
        let rhs = (-w * a.ln()).exp();
        prop_assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn levy_membership_matches_denominators(num in 1u64..100_000, den in 2u64..200_000) {
        prop_assume!(2 * num <= den);
        let x = BigRational::new(BigInt::from(num), BigInt::from(den));
        // Endpoints of the intervals below have denominators ≤ 81, and there
        // the two expansions of a rational disagree.
        prop_assume!(*x.denom() > BigInt::from(81));
        let (qs, _) = convergent_denominators(x.numer(), x.denom(), 64);
        let consecutive: Vec<(u64, u64)> = qs.windows(2).map(|w| (w[0] as u64, w[1] as u64)).collect();
        for q in 2..=40u64 {
            for p in (1..q).filter(|p| p.gcd(&q) == 1) {
                let inside = levy_interval(p, q).unwrap().contains(&x);
                prop_assert_eq!(inside, consecutive.contains(&(p, q)), "{} and ({}, {})", x, p, q);
            }
        }
    }

    #[test]
    fn brjuno_functional_equation(xi in 1e-3f64..0.999) {
        // B(ξ) = −log ξ + ξ B({1/ξ}), with 1/ξ taken exactly.
        let (n, d) = dyadic_parts(xi).unwrap();
        let lhs = brjuno_big_b(xi, 2000).unwrap().value;
        let inv = brjuno_big_b_rational(&BigRational::new(d, n), 2000).unwrap().value;
        prop_assert!((lhs - (-xi.ln() + xi * inv)).abs() < 1e-10);
        if (xi + 7.0) - 7.0 == xi {
            prop_assert_eq!(lhs, brjuno_big_b(xi + 7.0, 2000).unwrap().value);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_symbol_relations(
        a in left_cusp(), b in left_cusp(), c in left_cusp(),
        h in s_matrix(),
        z in right_half_plane(),
    ) {
        let period = period_polynomial(&delta_coefficients(40).unwrap(), 1e-15).unwrap();
        let sym = ClassicalSymbols::new(&period);
        // Size of the terms that cancel: Σ |cⱼ| |z|ʲ.
        let size = |p: &Polynomial| p.coeffs.iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.norm());
        let parts = [sym.symbol(&a, &b).unwrap(), sym.symbol(&b, &c).unwrap(), sym.symbol(&c, &a).unwrap()];
        let cycle: C = parts.iter().map(|p| p.eval(z)).sum();
        let scale = parts.iter().map(size).fold(1.0, f64::max);
        prop_assert!(cycle.norm() < 1e-8 * scale, "{} vs {scale}", cycle.norm());
        let inv = h.adjugate();
        let lhs = sym.symbol(&inv.apply(&a), &inv.apply(&b)).unwrap();
        let rhs = sym.symbol(&a, &b).unwrap().slash(&h, 10).unwrap();
        let scale = size(&lhs).max(size(&rhs)).max(1.0);
        prop_assert!((lhs.eval(z) - rhs.eval(z)).norm() < 1e-8 * scale);
    }
}
