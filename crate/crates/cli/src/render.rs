//! Text summaries.

use std::collections::BTreeMap;
use std::fmt::Write;

use opminimal_core::exactla::format_scalar;
use opminimal_core::{FiniteDgOperad, MinimalModel, Report, Scalar};

pub fn degree_dims(d: &BTreeMap<i32, usize>) -> String {
    if d.is_empty() {
        return "0".into();
    }
    d.iter().map(|(k, n)| format!("{n} in degree {k}")).collect::<Vec<_>>().join(", ")
}

/// `Σ c·label` over the flattened basis of one arity.
fn target_vector(p: &FiniteDgOperad, n: usize, v: &[Scalar]) -> String {
    let labels = p.basis(n).flat_labels();
    let terms: Vec<String> = v
        .iter()
        .zip(labels)
        .filter(|(c, _)| **c != Scalar::default())
        .map(|(c, l)| if format_scalar(c) == "1" { l.to_string() } else { format!("{}·{l}", format_scalar(c)) })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn report_lines(r: &Report) -> String {
    let mut s = String::new();
    for c in &r.checks {
        if c.passed {
            let _ = writeln!(s, "PASS {}", c.name);
        } else {
            let _ = writeln!(s, "FAIL {}", c.name);
            for f in &c.failures {
                let _ = writeln!(s, "  {f}");
            }
            if c.suppressed > 0 {
                let _ = writeln!(s, "  ... and {} more", c.suppressed);
            }
        }
    }
    s
}

pub fn failed_checks(r: &Report) -> String {
    let names: Vec<&str> = r.failed().map(|c| c.name.as_str()).collect();
    format!("failed checks: {}", names.join(", "))
}

pub fn model_summary(m: &MinimalModel, target: &str, report: &Report) -> String {
    let stage = m.stage();
    let rho = m.rho();
    let p = rho.target();
    let mut s = String::new();
    let _ = writeln!(s, "minimal model of {target} ({}) up to arity {}", m.mode(), m.max_arity());
    for (n, dims) in m.model.dimensions() {
        let _ = writeln!(s, "arity {n}: {}", degree_dims(&dims));
        for id in stage.ids_of_arity(n) {
            let g = stage.generator(id);
            let _ = writeln!(s, "  {} (degree {})", g.label, g.degree);
            let _ = writeln!(s, "    d = {}", stage.format_vector(&g.differential));
            if stage.is_unitary() {
                let rs: Vec<String> = g.restrictions.iter().map(|x| stage.format_vector(x)).collect();
                let _ = writeln!(s, "    δ = [{}]", rs.join("; "));
            }
            let _ = writeln!(s, "    ρ = {}", target_vector(p, n, rho.value(id)));
        }
    }
    s.push_str(&report_lines(report));
    s
}
