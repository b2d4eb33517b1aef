//! Predicate-versus-oracle agreement over all involutions of one form.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::orthogroup::Isometry;
use crate::quadspace::QuadForm;

use super::oracle::InvolutionClasses;
use super::{conjugate_test, predicate_key, Classified, GeneralTester, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweepMethod {
    /// conjugate_test on every unordered pair
    AllPairs,
    /// key partition compared with the class partition, plus conjugate_test
    /// of every involution against every class representative
    Keyed,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub form: String,
    pub field: String,
    pub group_order: u64,
    pub involutions: usize,
    pub classes: usize,
    pub method: SweepMethod,
    pub pairs_checked: u64,
    pub disagreements: u64,
    pub unknown: u64,
    /// first few disagreeing index pairs
    pub examples: Vec<(usize, usize)>,
    pub class_equation: bool,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.disagreements == 0 && self.unknown == 0 && self.class_equation
    }
}

/// Compare conjugate_test with the oracle. Above `pair_limit` unordered pairs
/// the keyed method is used when every involution has a predicate key.
pub fn sweep_against_oracle(q: &QuadForm, pair_limit: u64) -> Result<SweepReport> {
    let oc = InvolutionClasses::for_form(q)?;
    let n = oc.len();
    let cl: Vec<Classified> =
        (0..n).map(|i| Classified::new(&Isometry::new(q, oc.matrix(i))?)).collect::<Result<_>>()?;
    let pairs = (n as u64) * (n as u64 + 1) / 2;
    let keys: Option<Vec<Vec<String>>> = cl.iter().map(predicate_key).collect();
    let mut tester = GeneralTester::default();
    let mut report = SweepReport {
        form: q.to_string(),
        field: q.spec().to_string(),
        group_order: oc.group_order,
        involutions: n,
        classes: oc.classes.len(),
        method: SweepMethod::AllPairs,
        pairs_checked: 0,
        disagreements: 0,
        unknown: 0,
        examples: vec![],
        class_equation: oc.class_equation_holds(),
    };
    let record = |r: &mut SweepReport, i: usize, j: usize, v: Verdict| {
        r.pairs_checked += 1;
        if v == Verdict::Unknown {
            r.unknown += 1;
        } else if v != Verdict::from(oc.conjugate(i, j)) {
            r.disagreements += 1;
            if r.examples.len() < 8 {
                r.examples.push((i, j));
            }
        }
    };
    match keys {
        Some(keys) if pairs > pair_limit => {
            report.method = SweepMethod::Keyed;
            let mut key_class: BTreeMap<&Vec<String>, usize> = BTreeMap::new();
            let mut class_key: BTreeMap<usize, &Vec<String>> = BTreeMap::new();
            let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
            for (i, k) in keys.iter().enumerate() {
                let c = oc.class_of[i];
                reps.entry(c).or_insert(i);
                let consistent = *key_class.entry(k).or_insert(c) == c && *class_key.entry(c).or_insert(k) == k;
                if !consistent {
                    report.disagreements += 1;
                    if report.examples.len() < 8 {
                        report.examples.push((i, reps[&c]));
                    }
                }
            }
            for i in 0..n {
                for &r in reps.values() {
                    let v = conjugate_test(&cl[i], &cl[r], &mut tester)?;
                    if (v == Verdict::Conjugate) != (keys[i] == keys[r]) {
                        report.disagreements += 1;
                    }
                    record(&mut report, i, r, v);
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in i..n {
                    let v = conjugate_test(&cl[i], &cl[j], &mut tester)?;
                    record(&mut report, i, j, v);
                }
            }
        }
    }
    Ok(report)
}
