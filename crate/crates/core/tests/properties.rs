use proptest::prelude::*;

use orthinv::fixedpoints::{a_group_from_norms, conjugation_action, star_map, AGroupElement};
use orthinv::linalg::Mat;
use orthinv::orthogroup::is_isometry;
use orthinv::quadspace::{is_isometric, witt_decompose};
use orthinv::{FieldElement, FieldSpec, QuadForm};

fn finite() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just(FieldSpec::gf2()), Just(FieldSpec::gf4()), Just(FieldSpec::gf8()), Just(FieldSpec::gf16())]
}

fn elem(spec: FieldSpec, code: u64, den: u64) -> FieldElement {
    match spec.order() {
        Some(o) => spec.from_code(code % o),
        None => spec.ratio(code as u128, den as u128).unwrap(),
    }
}

fn any_field() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![finite(), Just(FieldSpec::ratfunc())]
}

fn matrix(spec: FieldSpec, n: usize, codes: &[u64]) -> Mat {
    let mut m = Mat::zeros(spec, n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = elem(spec, codes[i * n + j], 1);
        }
    }
    m
}

proptest! {
    #[test]
    fn field_laws(spec in any_field(), c in prop::array::uniform6(0u64..512), d in prop::array::uniform3(1u64..64)) {
        let a = elem(spec, c[0], d[0]);
        let b = elem(spec, c[1], d[1]);
        let e = elem(spec, c[2], d[2]);
        prop_assert_eq!((a + b) + e, a + (b + e));
        prop_assert_eq!((a * b) * e, a * (b * e));
        prop_assert_eq!(a * (b + e), a * b + a * e);
        prop_assert_eq!(a + a, spec.zero());
        prop_assert_eq!((a + b).square(), a.square() + b.square());
        prop_assert_eq!(a.square().sqrt().unwrap(), a);
        if !a.is_zero() {
            prop_assert_eq!(a * a.inv(), spec.one());
            prop_assert_eq!((b / a) * a, b);
        }
        let (h0, h1) = a.square_class_coordinates();
        prop_assert_eq!(h0.square() + spec.t() * h1.square(), a);
    }

    #[test]
    fn star_map_is_dual(spec in finite(), l in 1usize..=3, codes in prop::collection::vec(0u64..16, 18)) {
        let p = matrix(spec, l, &codes[..9]);
        let r = matrix(spec, l, &codes[9..]);
        prop_assume!(p.rank() == l && r.rank() == l);
        let ps = star_map(&p).unwrap();
        // B(phi u_i, phi^* v_j) = delta_ij in dual bases
        prop_assert!(p.transpose().mul(&ps).is_identity());
        prop_assert_eq!(star_map(&p.mul(&r)).unwrap(), ps.mul(&star_map(&r).unwrap()));
        prop_assert_eq!(star_map(&ps).unwrap(), p);
    }

    #[test]
    fn a_group_closed_and_action_additive(
        c in 0u64..4,
        l in 1usize..=3,
        picks in prop::array::uniform2(0usize..10_000),
        codes in prop::collection::vec(0u64..4, 9),
    ) {
        let k = FieldSpec::gf4();
        let norms = vec![k.from_code(c); l];
        let ag = a_group_from_norms(k, &norms);
        let members = ag.elements().unwrap();
        let a = &members[picks[0] % members.len()];
        let b = &members[picks[1] % members.len()];
        let sum = a.a.add(&b.a);
        prop_assert!(ag.contains(&sum));
        // column sums 1 keep every norm when all norms agree
        let mut p = matrix(k, l, &codes);
        if c != 0 {
            for j in 0..l {
                let rest = (0..l - 1).fold(k.zero(), |s, i| s + p[(i, j)]);
                p[(l - 1, j)] = rest + k.one();
            }
        }
        prop_assume!(p.rank() == l);
        prop_assert!(is_isometry(&ag.form(), &p));
        let fa = conjugation_action(&ag, &p, a).unwrap();
        let fb = conjugation_action(&ag, &p, b).unwrap();
        let fs = conjugation_action(&ag, &p, &AGroupElement { a: sum }).unwrap();
        prop_assert!(ag.contains(&fa.a));
        prop_assert_eq!(fs.a, fa.a.add(&fb.a));
    }

    #[test]
    fn witt_invariants_survive_basis_change(
        spec in prop_oneof![Just(FieldSpec::gf2()), Just(FieldSpec::gf4())],
        pairs in prop::collection::vec((0u64..4, 0u64..4), 0..=2),
        diag in prop::collection::vec(0u64..4, 0..=2),
        codes in prop::collection::vec(0u64..4, 36),
    ) {
        let p: Vec<_> = pairs.iter().map(|&(a, b)| (elem(spec, a, 1), elem(spec, b, 1))).collect();
        let d: Vec<_> = diag.iter().map(|&x| elem(spec, x, 1)).collect();
        let q = QuadForm::from_signature(spec, &p, &d);
        let n = q.dim();
        prop_assume!(n > 0);
        let t = matrix(spec, n, &codes);
        prop_assume!(t.rank() == n);
        let q2 = q.transport(&t);
        let (w, w2) = (witt_decompose(&q).unwrap(), witt_decompose(&q2).unwrap());
        prop_assert_eq!((w.m, w.d), (w2.m, w2.d));
        prop_assert!(is_isometric(&w.kernel_form(spec), &w2.kernel_form(spec)).unwrap());
        prop_assert!(is_isometric(&q, &q2).unwrap());
        prop_assert_eq!(q2.transport(&w2.change_of_basis), w2.normal_form(spec));
    }
}
