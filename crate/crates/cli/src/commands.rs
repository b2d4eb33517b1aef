//! The six subcommands. Each returns a JSON value with a top-level "schema"
//! key and a pass flag; rendering and exit codes live in the caller.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use orthinv::fixedpoints::{centralizer, diagonal_fixed_structure, general_fixed_check, radical_fixed_structure};
use orthinv::involutions::oracle::InvolutionClasses;
use orthinv::involutions::sweep::sweep_against_oracle;
use orthinv::involutions::{
    classify, conjugate_test, is_mixed, normalize_triple, Classified, GeneralTester, InvolutionKind,
    Triple, Verdict,
};
use orthinv::linalg::unit;
use orthinv::orthogroup::{enumerate_group_with, is_isometry, residue, Budget, GroupTable, Isometry};
use orthinv::quadspace::witt_decompose;
use orthinv::{Error, Mat, QuadForm};

/// Pair limit above which the oracle sweep switches to the keyed method.
const SWEEP_PAIR_LIMIT: u64 = 4_000_000;
/// Involution count up to which the costly structure checks run on every
/// involution rather than on class representatives.
const FULL_SCOPE: usize = 512;

pub struct Report {
    pub json: Value,
    pub passed: bool,
}

fn strs<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Row-major literal accepted back by the map parser.
pub fn mat_literal(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.rows()).map(|i| strs(&m.row(i)).join(",")).collect();
    format!("[{}]", rows.join(";"))
}

fn header(schema: &str, q: &QuadForm) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(format!("orthinv.{schema}/1")));
    m.insert("field".into(), json!(q.spec().to_string()));
    m.insert("form".into(), json!(q.to_string()));
    m.insert("dim".into(), json!(q.dim()));
    m
}

fn is_zero_form(q: &QuadForm) -> bool {
    q.coeffs().is_zero()
}

fn classes(q: &QuadForm, budget: &Budget) -> Result<InvolutionClasses, Error> {
    if q.dim() > 0 && is_zero_form(q) {
        return InvolutionClasses::general_linear(q);
    }
    InvolutionClasses::from_table(&enumerate_group_with(q, budget)?)
}

pub fn normalize(q: &QuadForm) -> Result<Report, Error> {
    let w = witt_decompose(q)?;
    let r = w.report(q.spec());
    let mut out = header("normalize", q);
    out.insert("m".into(), json!(r.m));
    out.insert("d".into(), json!(r.d));
    out.insert("aniso_kernel".into(), json!(r.aniso_kernel));
    out.insert("normal_form".into(), json!(r.normal_form));
    out.insert("change_of_basis".into(), json!(mat_literal(&w.change_of_basis)));
    Ok(Report { json: Value::Object(out), passed: true })
}

pub fn classify_cmd(q: &QuadForm, m: Mat) -> Result<Report, Error> {
    let phi = Isometry::new(q, m)?;
    let d = classify(&phi)?;
    let mut out = header("classify", q);
    out.insert("map".into(), json!(mat_literal(phi.matrix())));
    out.insert("descriptor".into(), serde_json::to_value(d.report()).expect("plain data"));
    out.insert("residual_basis".into(), json!(d.residual.basis().iter().map(|v| strs(v).join(",")).collect::<Vec<_>>()));
    Ok(Report { json: Value::Object(out), passed: true })
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Conjugate => "conjugate",
        Verdict::NotConjugate => "not_conjugate",
        Verdict::Unknown => "unknown",
    }
}

pub fn conjugate(q: &QuadForm, a: Mat, b: Mat, budget: &Budget) -> Result<Report, Error> {
    let ca = Classified::new(&Isometry::new(q, a)?)?;
    let cb = Classified::new(&Isometry::new(q, b)?)?;
    let v = conjugate_test(&ca, &cb, &mut GeneralTester::default())?;
    let mut out = header("conjugate", q);
    out.insert("left".into(), serde_json::to_value(ca.desc.report()).expect("plain data"));
    out.insert("right".into(), serde_json::to_value(cb.desc.report()).expect("plain data"));
    out.insert("verdict".into(), json!(verdict_name(v)));
    let mut passed = v != Verdict::Unknown;
    let oracle = match classes(q, budget) {
        Ok(oc) => {
            let ia = ca.phi.to_compact().and_then(|g| oc.index_of(&g));
            let ib = cb.phi.to_compact().and_then(|g| oc.index_of(&g));
            match (ia, ib) {
                (Some(i), Some(j)) => {
                    let o = Verdict::from(oc.conjugate(i, j));
                    passed &= o == v;
                    json!({ "verdict": verdict_name(o), "agrees": o == v })
                }
                _ => json!({ "skipped": "identity is not in the involution list" }),
            }
        }
        Err(Error::BudgetExceeded(msg)) => json!({ "skipped": format!("budget exceeded: {msg}") }),
        Err(Error::Precondition(msg)) => json!({ "skipped": msg }),
        Err(e) => return Err(e),
    };
    out.insert("oracle".into(), oracle);
    Ok(Report { json: Value::Object(out), passed })
}

fn diagonal_json(q: &QuadForm, table: &GroupTable, phi: &Isometry, order: u64) -> Result<(Value, bool), Error> {
    let ds = diagonal_fixed_structure(q, phi)?;
    let gf = table.gf();
    let stab = table.iter().filter(|g| ds.maps_u_onto_u(&g.to_mat(&gf))).count() as u64;
    let r = ds.report();
    let ok = r.corrected_order == order;
    let v = json!({
        "type": "diagonal",
        "report": serde_json::to_value(&r).expect("plain data"),
        "u_stabilizer_order": stab,
        "stated_order_holds": r.predicted_order == order,
        "corrected_order_holds": ok,
        "stated_u_stabilizer_holds": stab == order,
    });
    Ok((v, ok))
}

pub fn fixgroup(q: &QuadForm, m: Mat, budget: &Budget) -> Result<Report, Error> {
    let phi = Isometry::new(q, m)?;
    let d = classify(&phi)?;
    let table = enumerate_group_with(q, budget)?;
    let fg = centralizer(&table, &phi)?;
    let order = fg.order();
    let closed = fg.is_closed_subgroup();
    let mut out = header("fixgroup", q);
    out.insert("map".into(), json!(mat_literal(phi.matrix())));
    out.insert("descriptor".into(), serde_json::to_value(d.report()).expect("plain data"));
    out.insert("group_order".into(), json!(table.len()));
    out.insert("centralizer_order".into(), json!(order));
    out.insert("closed_subgroup".into(), json!(closed));
    let mut passed = closed;
    let structure = match &d.kind {
        InvolutionKind::Diagonal { .. } | InvolutionKind::Hyperbolic { .. } if q.is_nonsingular() => {
            let (v, ok) = diagonal_json(q, &table, &phi, order)?;
            passed &= ok;
            v
        }
        InvolutionKind::Radical { .. } if q.is_totally_singular() => {
            let rs = radical_fixed_structure(q, &phi)?;
            let ok = rs.predicted_order == order;
            passed &= ok;
            json!({
                "type": "radical",
                "report": serde_json::to_value(rs.report()).expect("plain data"),
                "order_holds": ok,
            })
        }
        _ => Value::Null,
    };
    out.insert("structure".into(), structure);
    Ok(Report { json: Value::Object(out), passed })
}

pub fn census(q: &QuadForm, budget: &Budget) -> Result<Report, Error> {
    let oc = classes(q, budget)?;
    let mut reps = Vec::new();
    let mut rows = Vec::new();
    for c in &oc.classes {
        let phi = Isometry::new(q, c.rep.to_mat(&oc.gf))?;
        let cl = Classified::new(&phi)?;
        rows.push(json!({
            "size": c.size,
            "centralizer_order": c.centralizer_order,
            "descriptor": serde_json::to_value(cl.desc.report()).expect("plain data"),
            "representative": mat_literal(phi.matrix()),
        }));
        reps.push(cl);
    }
    let mut tester = GeneralTester::default();
    let mut inconsistent = Vec::new();
    for i in 0..reps.len() {
        for j in i..reps.len() {
            let v = conjugate_test(&reps[i], &reps[j], &mut tester)?;
            if v != Verdict::from(i == j) {
                inconsistent.push(json!([i, j, verdict_name(v)]));
            }
        }
    }
    let class_eq = oc.class_equation_holds();
    let mut out = header("census", q);
    out.insert("group_order".into(), json!(oc.group_order));
    out.insert("involutions".into(), json!(oc.len()));
    out.insert("class_count".into(), json!(oc.classes.len()));
    out.insert("class_equation".into(), json!(class_eq));
    out.insert("predicates_consistent".into(), json!(inconsistent.is_empty()));
    out.insert("inconsistent_pairs".into(), Value::Array(inconsistent.clone()));
    out.insert("classes".into(), Value::Array(rows));
    Ok(Report { json: Value::Object(out), passed: class_eq && inconsistent.is_empty() })
}

/// First basis position where `m` fails to preserve the form.
fn isometry_residual(q: &QuadForm, m: &Mat) -> Option<Value> {
    let n = q.dim();
    let spec = q.spec();
    let cols = m.columns();
    for i in 0..n {
        let got = q.q(&cols[i]);
        if got != q.norm(i) {
            return Some(json!({ "kind": "norm", "at": [i], "expected": q.norm(i).to_string(), "got": got.to_string() }));
        }
        for j in i + 1..n {
            let b0 = q.b(&unit(spec, n, i), &unit(spec, n, j));
            let b1 = q.b(&cols[i], &cols[j]);
            if b0 != b1 {
                return Some(json!({ "kind": "polar", "at": [i, j], "expected": b0.to_string(), "got": b1.to_string() }));
            }
        }
    }
    (m.rank() < n).then(|| json!({ "kind": "rank", "at": [], "expected": n.to_string(), "got": m.rank().to_string() }))
}

/// Add one to a single entry so that the result is no longer an isometry.
fn tamper(q: &QuadForm, m: &Mat) -> Option<(Mat, (usize, usize))> {
    let spec = q.spec();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let mut t = m.clone();
            t[(i, j)] = t[(i, j)] + spec.one();
            if !is_isometry(q, &t) {
                return Some((t, (i, j)));
            }
        }
    }
    None
}

#[derive(Default)]
struct Tally {
    counts: BTreeMap<&'static str, (u64, u64)>,
    failures: Vec<Value>,
}

impl Tally {
    fn record(&mut self, name: &'static str, involution: usize, ok: bool, detail: impl FnOnce() -> Value) {
        let e = self.counts.entry(name).or_default();
        if ok {
            e.0 += 1;
        } else {
            e.1 += 1;
            if self.failures.len() < 50 {
                self.failures.push(json!({ "check": name, "involution": involution, "detail": detail() }));
            }
        }
    }

    fn passed(&self) -> bool {
        self.counts.values().all(|&(_, f)| f == 0)
    }
}

fn summary(t: &Tally) -> Value {
    let checks: Vec<Value> =
        t.counts.iter().map(|(k, (p, f))| json!({ "check": k, "passed": p, "failed": f })).collect();
    Value::Array(checks)
}

pub fn verify(q: &QuadForm, budget: &Budget, inject_fault: bool) -> Result<Report, Error> {
    let mut out = header("verify", q);
    if q.dim() == 0 {
        out.insert("involutions".into(), json!(0));
        out.insert("checks".into(), json!([]));
        out.insert("failures".into(), json!([]));
        out.insert("passed".into(), json!(true));
        return Ok(Report { json: Value::Object(out), passed: true });
    }
    let table = enumerate_group_with(q, budget)?;
    let oc = InvolutionClasses::from_table(&table)?;
    let gf = table.gf();
    let n = oc.len();
    let full = n <= FULL_SCOPE;
    let mut is_rep = vec![false; n];
    for c in &oc.classes {
        if let Some(i) = oc.index_of(&c.rep) {
            is_rep[i] = true;
        }
    }
    let mut tally = Tally::default();
    let mut injected = Value::Null;
    let elems: Vec<Mat> = table.iter().map(|g| g.to_mat(&gf)).collect();
    let mixed = is_mixed(q);
    let triples: Vec<Triple> = if mixed && full {
        elems.iter().map(|g| Triple::of(&Isometry::new(q, g.clone())?)).collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    for i in 0..n {
        let mut m = oc.matrix(i);
        if inject_fault && i == 0 {
            if let Some((t, at)) = tamper(q, &m) {
                injected = json!({ "involution": 0, "entry": [at.0, at.1] });
                m = t;
            }
        }
        let residual = isometry_residual(q, &m);
        let iso_ok = residual.is_none();
        tally.record("isometry", i, iso_ok, || residual.clone().unwrap_or(Value::Null));
        if !iso_ok {
            continue;
        }
        let phi = Isometry::new(q, m.clone())?;
        let desc = match classify(&phi) {
            Ok(d) => d,
            Err(e) => {
                tally.record("classify", i, false, || json!(e.to_string()));
                continue;
            }
        };
        let ok = desc.residue == residue(&phi);
        tally.record("classify", i, ok, || json!(format!("residue {} vs {}", desc.residue, residue(&phi))));
        let deep = full || is_rep[i];
        if mixed {
            let t = Triple::of(&phi)?;
            let laws = t.laws();
            tally.record("triple_laws", i, laws.all(), || serde_json::to_value(laws).expect("plain data"));
            match normalize_triple(&t) {
                Ok(nt) => {
                    let c = nt.checks();
                    tally.record("normalize_triple", i, c.all(), || serde_json::to_value(c).expect("plain data"));
                }
                Err(e) => tally.record("normalize_triple", i, false, || json!(e.to_string())),
            }
            if full {
                let mut bad = None;
                for (g, tg) in elems.iter().zip(&triples) {
                    if general_fixed_check(&t, tg)? != (g.mul(&m) == m.mul(g)) {
                        bad = Some(mat_literal(g));
                        break;
                    }
                }
                tally.record("general_fixed_check", i, bad.is_none(), || json!(bad));
            }
        }
        let fg = centralizer(&table, &phi)?;
        let order = fg.order();
        let c_ok = fg.is_closed_subgroup() && order == oc.classes[oc.class_of[i]].centralizer_order;
        tally.record("centralizer", i, c_ok, || json!(order));
        if !deep {
            continue;
        }
        match &desc.kind {
            InvolutionKind::Diagonal { .. } | InvolutionKind::Hyperbolic { .. } if q.is_nonsingular() => {
                let ds = diagonal_fixed_structure(q, &phi)?;
                let (pred, corr) = (ds.predicted_order(), ds.corrected_order());
                tally.record("diagonal_stated_order", i, pred == order, || json!({ "stated": pred, "centralizer": order }));
                tally.record("diagonal_corrected_order", i, corr == order, || json!({ "corrected": corr, "centralizer": order }));
                let cent = fg.matrices();
                let mut bad = None;
                for g in &cent {
                    let f = ds.pxc_factorize(&Isometry::new(q, g.clone())?)?;
                    let back = f.p_part.matrix().mul(f.x_part.matrix()).mul(f.c_part.matrix());
                    if &back != g || !ds.group_c_checks(&f).all() || !ds.is_x_shape(f.x_part.matrix()) {
                        bad = Some(mat_literal(g));
                        break;
                    }
                }
                tally.record("pxc_factorization", i, bad.is_none(), || json!(bad));
                let stab = elems.iter().filter(|g| ds.maps_u_onto_u(g)).count() as u64;
                tally.record("u_stabilizer_stated", i, stab == order, || json!({ "u_stabilizer": stab, "centralizer": order }));
                let fixing: Vec<&Mat> = elems
                    .iter()
                    .filter(|g| ds.maps_u_onto_u(g) && ds.phi_u_of(g).is_ok_and(|pu| ds.fixes_n(&pu)))
                    .collect();
                let count = fixing.len() as u64;
                let same = count == order && fixing.iter().all(|g| ds.commutes_with_tau(g));
                tally.record("u_stabilizer_fixing_n", i, same, || json!({ "count": count, "centralizer": order }));
            }
            InvolutionKind::Radical { .. } if q.is_totally_singular() => {
                let rs = radical_fixed_structure(q, &phi)?;
                tally.record("radical_order", i, rs.predicted_order == order, || {
                    json!({ "predicted": rs.predicted_order, "centralizer": order })
                });
                let cent = fg.matrices();
                let split_ok = cent.iter().all(|g| {
                    rs.block_form_holds(g)
                        && rs.split(g).is_ok_and(|(a, b)| rs.is_m(&a) && rs.is_m_prime(&b) && &a.mul(&b) == g)
                });
                tally.record("radical_split", i, split_ok, || Value::Null);
                let normal = rs.m_prime_normal(&cent)?;
                tally.record("m_prime_normal", i, normal, || Value::Null);
            }
            _ => {}
        }
    }
    let sweep = sweep_against_oracle(q, SWEEP_PAIR_LIMIT)?;
    tally.record("oracle_sweep", 0, sweep.passed(), || serde_json::to_value(&sweep).expect("plain data"));
    let passed = tally.passed();
    out.insert("group_order".into(), json!(table.len()));
    out.insert("involutions".into(), json!(n));
    out.insert("classes".into(), json!(oc.classes.len()));
    out.insert("structure_scope".into(), json!(if full { "all" } else { "representatives" }));
    out.insert("sweep_method".into(), serde_json::to_value(sweep.method).expect("plain data"));
    out.insert("checks".into(), summary(&tally));
    out.insert("failures".into(), Value::Array(tally.failures));
    if inject_fault {
        out.insert("injected".into(), injected);
    }
    out.insert("passed".into(), json!(passed));
    Ok(Report { json: Value::Object(out), passed })
}
