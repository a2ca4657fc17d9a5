//! Solver-log formatting: fixed-width columns with C-style `%.1e` numbers.

use proxtr::{IterationRecord, SolveResult};

/// Formats like C's `%.1e`: one mantissa digit after the point, a signed
/// two-digit exponent.
pub fn sci1(x: f64) -> String {
    if x == 0.0 {
        return "0.0e+00".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.1e}");
    let (mantissa, exp) = s.split_once('e').expect("LowerExp always emits an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => sci1(x),
        None => String::new(),
    }
}

pub fn log_header() -> String {
    format!(
        "{:>5} {:>8} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "outer", "inner", "f(x)", "h(x)", "√ξcp/√ν", "√ξ", "ρ", "Δ", "‖x‖", "‖s‖", "‖Bₖ‖"
    )
}

/// One log row; `outer` is 1-based as in solver logs, while the record keeps
/// the 0-based iteration index.
pub fn format_record(r: &IterationRecord) -> String {
    format!(
        "{:>5} {:>8} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        r.k + 1,
        r.inner,
        sci1(r.f_val),
        sci1(r.h_val),
        sci1(r.criticality),
        cell(r.sqrt_xi),
        cell(r.rho),
        sci1(r.delta),
        sci1(r.x_norm),
        sci1(r.s_norm),
        sci1(r.b_norm),
    )
}

pub fn write_log(out: &mut dyn std::io::Write, result: &SolveResult) -> std::io::Result<()> {
    writeln!(out, "{}", log_header())?;
    for rec in &result.history {
        writeln!(out, "{}", format_record(rec))?;
    }
    Ok(())
}
