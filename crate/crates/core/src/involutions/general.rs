//! Exact conjugacy test for involutions on W1 _|_ rad(W) with both parts
//! nonzero. A conjugating element has block form [[mu, 0], [Zh, psi]] with
//! mu in Sp(W1) commuting tau_1 into tau_2 and psi in O(q_rad) commuting rho_1
//! into rho_2. For fixed (mu, psi) the conditions on Zh are linear: the
//! intertwining equation plus the norm rows, which compare square-class
//! coordinates of q_rad(Zh e_i) and q_W1(e_i) + q_W1(mu e_i).

use std::collections::HashMap;

use crate::compact::Gf;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::linalg::{Mat, Solver, Vector};
use crate::orthogroup::{enumerate_group, enumerate_symplectic, is_isometry};
use crate::quadspace::QuadForm;

use super::{Triple, Verdict};

pub struct GeneralTester {
    /// upper bound on (mu, psi) pairs tried per test
    pub max_pairs: u64,
    sp: HashMap<QuadForm, Vec<Mat>>,
    orad: HashMap<QuadForm, Vec<Mat>>,
    mu_lists: HashMap<(Mat, Mat), Vec<usize>>,
    psi_lists: HashMap<(Mat, Mat), Vec<usize>>,
    solvers: HashMap<(Mat, Mat), Solver>,
    /// witness from the last Conjugate verdict, in original coordinates
    pub last_witness: Option<Mat>,
}

impl Default for GeneralTester {
    fn default() -> Self {
        GeneralTester::new(5_000_000)
    }
}

fn table_mats(t: &crate::orthogroup::GroupTable) -> Vec<Mat> {
    let gf: Gf = t.gf();
    t.iter().map(|g| g.to_mat(&gf)).collect()
}

impl GeneralTester {
    pub fn new(max_pairs: u64) -> GeneralTester {
        GeneralTester {
            max_pairs,
            sp: HashMap::new(),
            orad: HashMap::new(),
            mu_lists: HashMap::new(),
            psi_lists: HashMap::new(),
            solvers: HashMap::new(),
            last_witness: None,
        }
    }

    fn groups(&mut self, t: &Triple) -> Result<()> {
        let qw = t.q_w1();
        if !self.sp.contains_key(&qw) {
            let g = enumerate_symplectic(&qw)?;
            self.sp.insert(qw.clone(), table_mats(&g));
        }
        let qr = t.q_rad();
        if !self.orad.contains_key(&qr) {
            let g = enumerate_group(&qr)?;
            self.orad.insert(qr.clone(), table_mats(&g));
        }
        Ok(())
    }

    fn intertwiners(list: &[Mat], a: &Mat, b: &Mat) -> Vec<usize> {
        (0..list.len()).filter(|&i| list[i].mul(a) == b.mul(&list[i])).collect()
    }

    fn solver(&mut self, t1: &Triple, t2: &Triple) -> &Solver {
        let key = (t1.tau.clone(), t2.rho.clone());
        let (w1, s) = (t1.w1_dim, t1.rad_dim);
        let spec = t1.form.spec();
        let qr = t1.q_rad();
        self.solvers.entry(key).or_insert_with(|| {
            let neq = s * w1 + 2 * w1;
            let mut a = Mat::zeros(spec, neq, s * w1);
            let var = |j: usize, i: usize| j * w1 + i;
            for r in 0..s {
                for b in 0..w1 {
                    let eq = r * w1 + b;
                    for i in 0..w1 {
                        a[(eq, var(r, i))] = a[(eq, var(r, i))] + t1.tau[(i, b)];
                    }
                    for j in 0..s {
                        a[(eq, var(j, b))] = a[(eq, var(j, b))] + t2.rho[(r, j)];
                    }
                }
            }
            let h: Vec<(FieldElement, FieldElement)> =
                (0..s).map(|j| qr.norm(j).square_class_coordinates()).collect();
            for i in 0..w1 {
                for (j, (h0, h1)) in h.iter().enumerate() {
                    a[(s * w1 + 2 * i, var(j, i))] = *h0;
                    a[(s * w1 + 2 * i + 1, var(j, i))] = *h1;
                }
            }
            Solver::new(&a)
        })
    }

    /// Decide whether the two block forms are conjugate in O(q). Unknown when
    /// the field is infinite or the pair budget runs out.
    pub fn test(&mut self, t1: &Triple, t2: &Triple) -> Result<Verdict> {
        self.last_witness = None;
        if t1.form != t2.form {
            return Err(Error::TypeMismatch("involutions on different spaces".into()));
        }
        if !t1.form.spec().is_finite() {
            return Ok(Verdict::Unknown);
        }
        let one = |m: &Mat| m.add(&Mat::identity(m.spec(), m.rows())).rank();
        if one(&t1.tau) != one(&t2.tau) || one(&t1.rho) != one(&t2.rho) {
            return Ok(Verdict::NotConjugate);
        }
        if one(&t1.block_matrix()) != one(&t2.block_matrix()) {
            return Ok(Verdict::NotConjugate);
        }
        self.groups(t1)?;
        let (w1, s) = (t1.w1_dim, t1.rad_dim);
        let spec = t1.form.spec();
        let qw = t1.q_w1();
        let qr = t1.q_rad();
        let mkey = (t1.tau.clone(), t2.tau.clone());
        if !self.mu_lists.contains_key(&mkey) {
            let l = Self::intertwiners(&self.sp[&qw], &t1.tau, &t2.tau);
            self.mu_lists.insert(mkey.clone(), l);
        }
        let pkey = (t1.rho.clone(), t2.rho.clone());
        if !self.psi_lists.contains_key(&pkey) {
            let l = Self::intertwiners(&self.orad[&qr], &t1.rho, &t2.rho);
            self.psi_lists.insert(pkey.clone(), l);
        }
        let mus = self.mu_lists[&mkey].clone();
        let psis = self.psi_lists[&pkey].clone();
        if mus.is_empty() || psis.is_empty() {
            return Ok(Verdict::NotConjugate);
        }
        if mus.len() as u64 * psis.len() as u64 > self.max_pairs {
            return Ok(Verdict::Unknown);
        }
        let y1 = t1.rad_component();
        let y2 = t2.rad_component();
        let sp = self.sp[&qw].clone();
        let orad = self.orad[&qr].clone();
        self.solver(t1, t2);
        let solver = &self.solvers[&(t1.tau.clone(), t2.rho.clone())];
        for &mi in &mus {
            let mu = &sp[mi];
            let y2mu = y2.mul(mu);
            let mut norm_rhs = Vec::with_capacity(2 * w1);
            for i in 0..w1 {
                let e = crate::linalg::unit(spec, w1, i);
                let c = qw.q(&e) + qw.q(&mu.col(i));
                let (c0, c1) = c.square_class_coordinates();
                norm_rhs.push(c0);
                norm_rhs.push(c1);
            }
            for &pi in &psis {
                let psi = &orad[pi];
                let rhs_m = y2mu.add(&psi.mul(&y1));
                let mut rhs: Vector = Vec::with_capacity(s * w1 + 2 * w1);
                for r in 0..s {
                    for b in 0..w1 {
                        rhs.push(rhs_m[(r, b)]);
                    }
                }
                rhs.extend(norm_rhs.iter().copied());
                if let Some(z) = solver.solve(&rhs) {
                    let n = w1 + s;
                    let mut g = Mat::zeros(spec, n, n);
                    for i in 0..w1 {
                        for j in 0..w1 {
                            g[(i, j)] = mu[(i, j)];
                        }
                    }
                    for r in 0..s {
                        for i in 0..w1 {
                            g[(w1 + r, i)] = z[r * w1 + i];
                        }
                        for j in 0..s {
                            g[(w1 + r, w1 + j)] = psi[(r, j)];
                        }
                    }
                    let gamma = t1.basis.mul(&g).mul(&t1.basis.inverse().expect("basis"));
                    let p1 = t1.reassemble();
                    let p2 = t2.reassemble();
                    if !is_isometry(&t1.form, &gamma) || gamma.mul(&p1) != p2.mul(&gamma) {
                        return Err(Error::Precondition("conjugating element failed verification".into()));
                    }
                    self.last_witness = Some(gamma);
                    return Ok(Verdict::Conjugate);
                }
            }
        }
        Ok(Verdict::NotConjugate)
    }
}

/// One-shot form of [`GeneralTester::test`].
pub fn conjugate_test_general(t1: &Triple, t2: &Triple) -> Result<Verdict> {
    GeneralTester::default().test(t1, t2)
}
