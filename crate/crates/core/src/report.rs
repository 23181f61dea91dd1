//! Report types and their renderers.
//!
//! Text reports are line-oriented `key: value` documents; every enclosure
//! endpoint is printed with 17 significant digits so the output is stable and
//! diff-able. JSON renderings use the same field names.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::grunsky::{GrunskyWindow, SampleReport};
use crate::optimizer::Status;

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
    format!("({})", parts.join(", "))
}

fn fmt_box(b: &[[f64; 2]]) -> String {
    let parts: Vec<String> = b
        .iter()
        .map(|[lo, hi]| format!("[{}, {}]", fmt_f64(*lo), fmt_f64(*hi)))
        .collect();
    parts.join(" x ")
}

fn fmt_complex(z: Complex64) -> String {
    format!("({}, {})", fmt_f64(z.re), fmt_f64(z.im))
}

pub fn fmt_window(w: &GrunskyWindow) -> String {
    let names = ["w11", "w13", "w15", "w17", "w33", "w35"];
    names
        .iter()
        .zip(w.as_array())
        .map(|(n, z)| format!("{n}={}", fmt_complex(z)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub bound_id: String,
    pub claim: String,
    pub status: Status,
    pub max_lo: f64,
    pub max_hi: f64,
    /// Midpoint of `argmax_box`.
    pub argmax: Vec<f64>,
    pub argmax_box: Vec<[f64; 2]>,
    pub witness: Vec<f64>,
    pub expected_value: f64,
    pub expected_argmax: Vec<f64>,
    pub closed_form: Option<f64>,
    pub value_pass: bool,
    pub argmax_pass: bool,
    pub convergence_pass: bool,
    pub closed_form_pass: Option<bool>,
    pub boxes_processed: u64,
    /// Seconds; omitted from batch reports, which must be reproducible byte
    /// for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.value_pass
            && self.argmax_pass
            && self.convergence_pass
            && self.closed_form_pass.unwrap_or(true)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "bound_id: {}", self.bound_id);
        let _ = writeln!(s, "claim: {}", self.claim);
        let _ = writeln!(s, "status: {}", self.status.as_str());
        let _ = writeln!(s, "max_lo: {}", fmt_f64(self.max_lo));
        let _ = writeln!(s, "max_hi: {}", fmt_f64(self.max_hi));
        let _ = writeln!(s, "enclosure_width: {}", fmt_f64(self.max_hi - self.max_lo));
        let _ = writeln!(s, "argmax: {}", fmt_vec(&self.argmax));
        let _ = writeln!(s, "argmax_box: {}", fmt_box(&self.argmax_box));
        let _ = writeln!(s, "witness: {}", fmt_vec(&self.witness));
        let _ = writeln!(s, "expected_value: {}", fmt_f64(self.expected_value));
        let _ = writeln!(s, "expected_argmax: {}", fmt_vec(&self.expected_argmax));
        if let Some(c) = self.closed_form {
            let _ = writeln!(s, "closed_form: {}", fmt_f64(c));
        }
        let _ = writeln!(s, "value_pass: {}", self.value_pass);
        let _ = writeln!(s, "argmax_pass: {}", self.argmax_pass);
        let _ = writeln!(s, "convergence_pass: {}", self.convergence_pass);
        if let Some(p) = self.closed_form_pass {
            let _ = writeln!(s, "closed_form_pass: {p}");
        }
        let _ = writeln!(s, "boxes_processed: {}", self.boxes_processed);
        if let Some(t) = self.wall_time {
            let _ = writeln!(s, "wall_time: {t:.6}");
        }
        let _ = writeln!(s, "pass: {}", self.passed());
        s
    }
}

/// A named yes/no check derived from several verifications.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyAllReport {
    pub tolerance: f64,
    pub bounds: Vec<VerificationReport>,
    pub cross_checks: Vec<CrossCheck>,
}

impl VerifyAllReport {
    pub fn passed(&self) -> bool {
        self.bounds.iter().all(VerificationReport::passed)
            && self.cross_checks.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tolerance: {}", fmt_f64(self.tolerance));
        let _ = writeln!(
            s,
            "{:<16} {:<24} {:<24} {:<24} {:<17} pass",
            "bound_id", "max_lo", "max_hi", "expected_value", "status"
        );
        for r in &self.bounds {
            let _ = writeln!(
                s,
                "{:<16} {:<24} {:<24} {:<24} {:<17} {}",
                r.bound_id,
                fmt_f64(r.max_lo),
                fmt_f64(r.max_hi),
                fmt_f64(r.expected_value),
                r.status.as_str(),
                r.passed()
            );
        }
        for c in &self.cross_checks {
            let _ = writeln!(s, "check {}: {} pass={}", c.name, c.detail, c.pass);
        }
        let _ = writeln!(s, "all_pass: {}", self.passed());
        s
    }
}

impl SampleReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.scenario);
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "attempts: {}", self.attempts);
        let _ = writeln!(s, "acceptance_rate: {}", fmt_f64(self.acceptance_rate));
        for c in &self.checks {
            let _ = writeln!(
                s,
                "check {} <= {} ({}): observed_max={} violations={} sample_index={}",
                c.functional.name(),
                fmt_f64(c.certified_bound),
                c.bound_id,
                fmt_f64(c.observed_max),
                c.violations,
                c.sample_index
            );
            let _ = writeln!(s, "  argmax_window: {}", fmt_window(&c.argmax_window));
        }
        let m = &self.maxima;
        let _ = writeln!(
            s,
            "observed_maxima: |a2|={} |a3|={} |a4|={} |a5|={} |H2(2)|={} |H3(1)|={} |a4|-|a3|={} |a5|-|a3|={}",
            fmt_f64(m.a2_abs),
            fmt_f64(m.a3_abs),
            fmt_f64(m.a4_abs),
            fmt_f64(m.a5_abs),
            fmt_f64(m.h2),
            fmt_f64(m.h3),
            fmt_f64(m.a4_minus_a3),
            fmt_f64(m.a5_minus_a3)
        );
        let _ = writeln!(s, "violations: {}", self.violations());
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub name: String,
    pub samples: u64,
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub n: u64,
    pub seed: u64,
    pub rows: Vec<IdentityRow>,
    pub koebe_coefficients: [f64; 4],
    pub koebe_margins: [f64; 4],
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n: {}", self.n);
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(
            s,
            "{:<44} {:>8} {:<24} {:<24} pass",
            "identity", "samples", "max_residual", "threshold"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<44} {:>8} {:<24} {:<24} {}",
                r.name,
                r.samples,
                fmt_f64(r.max_residual),
                fmt_f64(r.threshold),
                r.pass
            );
        }
        let k = self.koebe_coefficients;
        let _ = writeln!(
            s,
            "koebe_coefficients: ({}, {}, {}, {})",
            k[0], k[1], k[2], k[3]
        );
        let m = self.koebe_margins;
        let _ = writeln!(s, "koebe_margins: ({}, {}, {}, {})", m[0], m[1], m[2], m[3]);
        let _ = writeln!(s, "all_pass: {}", self.passed());
        s
    }
}

/// CSV grid: header `x[,y],<bound_id>` followed by one row per node.
pub fn grid_csv(bound_id: &str, arity: usize, rows: &[(Vec<f64>, f64)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}{bound_id}", if arity == 2 { "x,y," } else { "x," });
    for (p, v) in rows {
        for c in p {
            let _ = write!(s, "{c},");
        }
        let _ = writeln!(s, "{v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        let s = fmt_f64(1.674_896_577_247_062_6);
        assert!(s.starts_with("1.674896577"));
        assert_eq!(s.split('e').next().unwrap().len(), 18);
    }

    #[test]
    fn csv_header_names_bound() {
        let s = grid_csv("f1", 1, &[(vec![0.0], 0.8)]);
        assert_eq!(s, "x,f1\n0,0.8\n");
        let s = grid_csv("f6", 2, &[(vec![0.0, 0.0], 1.0)]);
        assert!(s.starts_with("x,y,f6\n"));
    }
}
