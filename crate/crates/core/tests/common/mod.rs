//! Oracles shared by the integration tests.

use std::collections::BTreeMap;

use opminimal_core::exactla::{scalar, Scalar};

pub type Dims = BTreeMap<usize, BTreeMap<i32, usize>>;

/// Counts trees of a free operad per arity and degree from `T = x + Σ_k (e_k(t)/k!) T^k`.
pub fn egf_counts(gens: &Dims, max: usize) -> Dims {
    // series[n][d]: coefficient of x^n t^d in the exponential generating function
    type Series = Vec<BTreeMap<i32, Scalar>>;
    let mul = |a: &Series, b: &Series| -> Series {
        let mut out: Series = vec![BTreeMap::new(); max + 1];
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate().take(max + 1 - i) {
                for (da, ca) in ai {
                    for (db, cb) in bj {
                        *out[i + j].entry(da + db).or_insert_with(|| scalar(0)) += ca * cb;
                    }
                }
            }
        }
        out
    };
    let mut t: Series = vec![BTreeMap::new(); max + 1];
    t[1].insert(0, scalar(1));
    for _ in 0..max {
        let mut next: Series = vec![BTreeMap::new(); max + 1];
        next[1].insert(0, scalar(1));
        for (&k, by_deg) in gens {
            let mut power = t.clone();
            for _ in 1..k {
                power = mul(&power, &t);
            }
            let fact: i64 = (1..=k as i64).product();
            for (&d, &count) in by_deg {
                for (n, coeffs) in power.iter().enumerate() {
                    for (dd, c) in coeffs {
                        *next[n].entry(d + dd).or_insert_with(|| scalar(0)) +=
                            c * Scalar::new((count as i64).into(), fact.into());
                    }
                }
            }
        }
        t = next;
    }
    let mut out = Dims::new();
    for (n, coeffs) in t.iter().enumerate().skip(1) {
        let fact: i64 = (1..=n as i64).product();
        for (d, c) in coeffs {
            let v = c * scalar(fact);
            assert!(v.is_integer());
            let v = v.to_integer().try_into().unwrap_or(0usize);
            if v > 0 {
                out.entry(n).or_default().insert(*d, v);
            }
        }
    }
    out
}

