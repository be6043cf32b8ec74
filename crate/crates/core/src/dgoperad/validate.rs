use num_traits::{One, Zero};

use crate::exactla::{add_scaled, unit_vector, Scalar, Vector};
use crate::perm::Perm;
use crate::report::Report;
use crate::symmod::validate_sigma_module;

use super::FiniteDgOperad;

fn koszul(a: i32, b: i32) -> Scalar {
    if (a * b).rem_euclid(2) == 1 {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

impl FiniteDgOperad {
    fn e(&self, n: usize, x: usize) -> Vector {
        unit_vector(self.dim(n), x)
    }

    fn label(&self, n: usize, x: usize) -> &str {
        self.basis(n).flat_labels()[x]
    }

    fn compose_ok(&self, a: &[Scalar], m: usize, i: usize, b: &[Scalar], n: usize) -> Vector {
        self.partial_compose(a, m, i, b, n).expect("shapes checked by the caller")
    }

    /// Checks every axiom exhaustively on basis elements. With `unitary`, also
    /// requires the unit point and a strict unitary multiplication.
    pub fn validate_operad_axioms(&self, unitary: bool) -> Report {
        let mut r = Report::new();
        let max = self.max_arity();
        for n in 0..=max {
            let module = self.module(n);
            let sub = validate_sigma_module(module);
            for c in &sub.checks {
                for f in &c.failures {
                    r.fail("sigma_module", format!("arity {n}: {}: {f}", c.name));
                }
            }
            r.pass("sigma_module");
            for k in self.degrees(n) {
                let dd = self.differential_block(n, k + 1).mul(&self.differential_block(n, k)).expect("shapes");
                r.check("d_squared", dd.is_zero(), || format!("arity {n}, degree {k}: d² ≠ 0"));
            }
            for x in 0..self.dim(n) {
                let v = self.e(n, x);
                let dv = self.differential(n, &v).expect("shape");
                for p in 0..n.saturating_sub(1) {
                    let s = Perm::adjacent(n, p);
                    let lhs = self.differential(n, &self.act(&s, n, &v).expect("shape")).expect("shape");
                    let rhs = self.act(&s, n, &dv).expect("shape");
                    r.check("differential_equivariance", lhs == rhs, || {
                        format!("arity {n}: d(s_{}·{}) ≠ s_{}·d({})", p + 1, self.label(n, x), p + 1, self.label(n, x))
                    });
                }
            }
        }

        let id = self.identity();
        r.check("unit", self.differential(1, &id).expect("shape").iter().all(Zero::is_zero), || "d(id) ≠ 0".into());
        for n in 0..=max {
            for x in 0..self.dim(n) {
                let a = self.e(n, x);
                let l = self.label(n, x);
                r.check("unit", self.compose_ok(&id, 1, 1, &a, n) == a, || format!("id ∘₁ {l} ≠ {l} in arity {n}"));
                for i in 1..=n {
                    r.check("unit", self.compose_ok(&a, n, i, &id, 1) == a, || format!("{l} ∘_{i} id ≠ {l}"));
                }
            }
        }

        self.check_leibniz_and_equivariance(&mut r);
        self.check_associativity(&mut r);

        if unitary {
            match self.point() {
                Ok(p) => {
                    let dp = self.differential(0, &p).expect("shape");
                    r.check("unit_point", dp.iter().all(Zero::is_zero), || "d(1) ≠ 0 in arity 0".into());
                }
                Err(_) => r.fail("unit_point", "no unit point in arity 0"),
            }
            if self.m2_label().is_none() {
                r.fail("unitary_multiplication", "unitary multiplication missing");
            }
        }
        if let (Ok(m2), Ok(p)) = (self.m2(), self.point()) {
            r.pass("unitary_multiplication");
            let dm = self.differential(2, &m2).expect("shape");
            r.check("unitary_multiplication", dm.iter().all(Zero::is_zero), || "d(m₂) ≠ 0".into());
            for i in 1..=2 {
                let v = self.compose_ok(&m2, 2, i, &p, 0);
                r.check("m2_unit_law", v == id, || format!("m₂ ∘_{i} 1 ≠ id"));
            }
        }
        r
    }

    fn check_leibniz_and_equivariance(&self, r: &mut Report) {
        let max = self.max_arity();
        r.pass("leibniz");
        r.pass("equivariance");
        for m in 1..=max {
            for n in 0..=max {
                if m + n - 1 > max || self.dim(m) == 0 || self.dim(n) == 0 {
                    continue;
                }
                let q = m + n - 1;
                for x in 0..self.dim(m) {
                    let a = self.e(m, x);
                    let da = self.differential(m, &a).expect("shape");
                    let sa = koszul(self.degree_of_index(m, x), 1);
                    for y in 0..self.dim(n) {
                        let b = self.e(n, y);
                        let db = self.differential(n, &b).expect("shape");
                        for i in 1..=m {
                            let ab = self.compose_ok(&a, m, i, &b, n);
                            let lhs = self.differential(q, &ab).expect("shape");
                            let mut rhs = self.compose_ok(&da, m, i, &b, n);
                            add_scaled(&mut rhs, &sa, &self.compose_ok(&a, m, i, &db, n));
                            r.check("leibniz", lhs == rhs, || {
                                format!(
                                    "d({} ∘_{i} {}) ≠ d{0} ∘_{i} {1} ± {0} ∘_{i} d{1}",
                                    self.label(m, x),
                                    self.label(n, y)
                                )
                            });
                            for p in 0..m - 1 {
                                let s = Perm::adjacent(m, p);
                                let lhs = self.compose_ok(&self.act(&s, m, &a).expect("shape"), m, s.apply(i - 1) + 1, &b, n);
                                let rhs = self.act(&s.block(i - 1, &Perm::identity(n)), q, &ab).expect("shape");
                                r.check("equivariance", lhs == rhs, || {
                                    format!("(s_{}·{}) ∘ {} at slot {i}", p + 1, self.label(m, x), self.label(n, y))
                                });
                            }
                            for p in 0..n.saturating_sub(1) {
                                let t = Perm::adjacent(n, p);
                                let lhs = self.compose_ok(&a, m, i, &self.act(&t, n, &b).expect("shape"), n);
                                let rhs = self.act(&Perm::identity(m).block(i - 1, &t), q, &ab).expect("shape");
                                r.check("equivariance", lhs == rhs, || {
                                    format!("{} ∘_{i} (s_{}·{})", self.label(m, x), p + 1, self.label(n, y))
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    fn check_associativity(&self, r: &mut Report) {
        let max = self.max_arity();
        r.pass("associativity");
        let present: Vec<usize> = (0..=max).filter(|&n| self.dim(n) > 0).collect();
        for &m in present.iter().filter(|&&m| m >= 1) {
            for &n in &present {
                if m + n - 1 > max {
                    continue;
                }
                for &p in &present {
                    if m + n + p < 2 || m + n + p - 2 > max {
                        continue;
                    }
                    self.associativity_triple(r, m, n, p);
                }
            }
        }
    }

    fn associativity_triple(&self, r: &mut Report, m: usize, n: usize, p: usize) {
        let mn = m + n - 1;
        for x in 0..self.dim(m) {
            let a = self.e(m, x);
            for y in 0..self.dim(n) {
                let b = self.e(n, y);
                let yb = self.degree_of_index(n, y);
                for z in 0..self.dim(p) {
                    let c = self.e(p, z);
                    let zc = self.degree_of_index(p, z);
                    for i in 1..=m {
                        let ab = self.compose_ok(&a, m, i, &b, n);
                        // sequential: c lands inside b
                        if n + p >= 1 && n + p - 1 <= self.max_arity() {
                            for j in 1..=n {
                                let lhs = self.compose_ok(&ab, mn, i + j - 1, &c, p);
                                let bc = self.compose_ok(&b, n, j, &c, p);
                                let rhs = self.compose_ok(&a, m, i, &bc, n + p - 1);
                                r.check("associativity", lhs == rhs, || {
                                    format!(
                                        "({} ∘_{i} {}) ∘_{} {} ≠ {0} ∘_{i} ({1} ∘_{j} {3})",
                                        self.label(m, x),
                                        self.label(n, y),
                                        i + j - 1,
                                        self.label(p, z)
                                    )
                                });
                            }
                        }
                        // parallel: c lands in a later input of a
                        let mp = m + p - 1;
                        if mp <= self.max_arity() {
                            for k in i + 1..=m {
                                let lhs = self.compose_ok(&ab, mn, k + n - 1, &c, p);
                                let ac = self.compose_ok(&a, m, k, &c, p);
                                let mut rhs = self.compose_ok(&ac, mp, i, &b, n);
                                let s = koszul(yb, zc);
                                rhs.iter_mut().for_each(|v| *v *= &s);
                                r.check("associativity", lhs == rhs, || {
                                    format!(
                                        "({} ∘_{i} {}) ∘_{} {} ≠ ±({0} ∘_{k} {3}) ∘_{i} {1}",
                                        self.label(m, x),
                                        self.label(n, y),
                                        k + n - 1,
                                        self.label(p, z)
                                    )
                                });
                            }
                        }
                    }
                }
            }
        }
    }
}
