use orthinv::involutions::sweep::sweep_against_oracle;
use orthinv::{FieldSpec, QuadForm};

fn form(spec: FieldSpec, pairs: &[(u64, u64)], diag: &[u64]) -> QuadForm {
    let p: Vec<_> = pairs.iter().map(|&(a, b)| (spec.from_code(a), spec.from_code(b))).collect();
    let d: Vec<_> = diag.iter().map(|&c| spec.from_code(c)).collect();
    QuadForm::from_signature(spec, &p, &d)
}

fn sweep(q: &QuadForm) {
    let r = sweep_against_oracle(q, 4_000_000).unwrap();
    assert!(r.passed(), "{q}: {r:?}");
}

#[test]
fn small_forms_agree_with_oracle() {
    let k = FieldSpec::gf2();
    for q in [
        form(k, &[(0, 0)], &[]),
        form(k, &[(1, 1)], &[]),
        form(k, &[(0, 0), (0, 0)], &[]),
        form(k, &[(0, 0), (1, 1)], &[]),
        form(k, &[], &[0, 0, 1, 1]),
        form(k, &[], &[0, 0, 0]),
        form(k, &[(1, 1)], &[0]),
        form(k, &[(0, 0)], &[0, 0]),
        form(k, &[(0, 0)], &[1, 0]),
    ] {
        sweep(&q);
    }
}

fn signature_types(spec: FieldSpec, max_dim: usize) -> Vec<QuadForm> {
    let b = if spec == FieldSpec::gf2() { 1 } else { 2 };
    let mut out = Vec::new();
    for m in 0..=max_dim / 2 {
        for aniso in [false, true] {
            if aniso && m == 0 {
                continue;
            }
            let mut pairs = vec![(0, 0); m];
            if aniso {
                pairs[m - 1] = (1, b);
            }
            for s in 0..=max_dim - 2 * m {
                for rad_norm in [false, true] {
                    if rad_norm && s == 0 || m + s == 0 {
                        continue;
                    }
                    let mut diag = vec![0; s];
                    if rad_norm {
                        diag[0] = 1;
                    }
                    out.push(form(spec, &pairs, &diag));
                }
            }
        }
    }
    out
}

#[test]
#[ignore]
fn all_signature_types() {
    for (spec, d) in [(FieldSpec::gf2(), 5), (FieldSpec::gf4(), 4)] {
        for q in signature_types(spec, d) {
            let t = std::time::Instant::now();
            let r = sweep_against_oracle(&q, 4_000_000).unwrap();
            eprintln!("{spec} {q}: {} involutions, {:?}, {:?}", r.involutions, r.method, t.elapsed());
            assert!(r.passed(), "{q}: {r:?}");
        }
    }
}
