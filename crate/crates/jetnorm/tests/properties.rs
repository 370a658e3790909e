//! Invariants of the normal form, checked on random inputs.

use jetnorm::{
    check_pde, decompose, jet_equivalence, normal_form, parse_poly_matrix, print_poly_matrix, v_space,
    verify_certificate, Field, GroupKind, Limits, MatrixJet, NormalFormOptions, NormalFormResult, ParseOptions,
    Sampler,
};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nf(a: &MatrixJet, kind: GroupKind) -> NormalFormResult {
    normal_form(a, kind, &NormalFormOptions::default()).unwrap()
}

/// A random problem small enough to keep each case fast.
fn problem(seed: u64, kind: GroupKind, field: Field) -> (ChaCha8Rng, MatrixJet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=2);
    let n = if kind.is_coupled() { m } else { rng.gen_range(1..=2) };
    let p = rng.gen_range(1..=2);
    let order = rng.gen_range(1..=3);
    let sampler = Sampler { field, ..Default::default() };
    let a = sampler.matrix(&mut rng, m, n, p, order, 0, order);
    (rng, a)
}

fn kinds() -> impl Strategy<Value = GroupKind> {
    prop::sample::select(GroupKind::ALL.to_vec())
}

fn fields() -> impl Strategy<Value = Field> {
    prop::sample::select(vec![Field::Rational, Field::Gaussian])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn normal_form_is_idempotent(seed in any::<u64>(), kind in kinds(), field in fields()) {
        let (_, a) = problem(seed, kind, field);
        let b = nf(&a, kind).normal_form;
        let again = nf(&b, kind);
        prop_assert_eq!(&again.normal_form, &b);
        prop_assert!(again.log.iter().all(|d| d.removed_norm2.is_zero()));
    }

    #[test]
    fn certificates_verify(seed in any::<u64>(), kind in kinds(), field in fields()) {
        let (_, a) = problem(seed, kind, field);
        let r = nf(&a, kind);
        prop_assert!(verify_certificate(&r).ok);
        prop_assert!(r.certificate.is_unipotent());
        prop_assert_eq!(r.certificate.act(&a).unwrap(), r.normal_form.clone());
        prop_assert_eq!(r.normal_form.project(0).unwrap(), a.project(0).unwrap());
    }

    #[test]
    fn orbit_members_share_the_normal_form(seed in any::<u64>(), kind in kinds(), field in fields()) {
        let (mut rng, a) = problem(seed, kind, field);
        let sampler = Sampler { field, ..Default::default() };
        let g = sampler.unipotent(&mut rng, kind, a.rows(), a.cols(), a.nvars(), a.truncation()).unwrap();
        let moved = g.act(&a).unwrap();
        prop_assert_eq!(nf(&moved, kind).normal_form, nf(&a, kind).normal_form);
    }

    #[test]
    fn each_degree_is_orthogonal_to_what_the_group_reaches(seed in any::<u64>(), kind in kinds()) {
        let (_, a) = problem(seed, kind, Field::Rational);
        let b = nf(&a, kind).normal_form;
        for j in 1..=b.truncation() {
            let vs = v_space(&b, kind, j, &Limits::default()).unwrap();
            let (v, w) = decompose(&b.homogeneous(j).unwrap(), &vs.space).unwrap();
            prop_assert!(v.is_zero(), "{kind} degree {j}");
            prop_assert_eq!(w, b.homogeneous(j).unwrap());
        }
    }

    #[test]
    fn two_sided_forms_satisfy_the_relations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, n) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let k = rng.gen_range(0..=1u32);
        let order = k + 2;
        let sampler = Sampler::default();
        let lead = sampler.matrix(&mut rng, m, n, 2, order, k, k);
        let a = lead.add(&sampler.matrix(&mut rng, m, n, 2, order, k + 1, order)).unwrap();
        let b = nf(&a, GroupKind::TwoSided).normal_form;
        prop_assert!(check_pde(&b, k, GroupKind::TwoSided).unwrap().passed);
    }

    #[test]
    fn equivalence_finds_orbit_witnesses(seed in any::<u64>(), kind in kinds()) {
        prop_assume!(kind != GroupKind::Congruence);
        let (_, a) = problem(seed, kind, Field::Rational);
        let b = nf(&a, kind).normal_form;
        let j = a.truncation();
        let g = jet_equivalence(&a, &b, kind, j).unwrap();
        prop_assert!(g.is_some());
        prop_assert_eq!(g.unwrap().act(&a).unwrap().truncate(j), b.truncate(j));
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>(), field in fields()) {
        let (_, a) = problem(seed, GroupKind::TwoSided, field);
        let vars: Vec<String> = ["u", "v"][..a.nvars()].iter().map(|s| s.to_string()).collect();
        let opts = ParseOptions::new(vars.clone(), a.truncation(), field).unwrap();
        let text = print_poly_matrix(&a, &vars);
        let parsed = parse_poly_matrix(&text, &opts).unwrap();
        prop_assert!(parsed.warnings.is_empty());
        prop_assert_eq!(parsed.matrix, a);
    }

    #[test]
    fn inner_product_is_hermitian(seed in any::<u64>()) {
        let (mut rng, a) = problem(seed, GroupKind::TwoSided, Field::Gaussian);
        let sampler = Sampler { field: Field::Gaussian, ..Default::default() };
        let b = sampler.matrix(&mut rng, a.rows(), a.cols(), a.nvars(), a.truncation(), 0, a.truncation());
        let ab = a.inner_product(&b).unwrap();
        prop_assert_eq!(ab.conj(), b.inner_product(&a).unwrap());
        let aa = a.inner_product(&a).unwrap();
        prop_assert!(aa.im().is_zero());
        prop_assert_eq!(aa.is_zero(), a.is_zero());
    }
}
