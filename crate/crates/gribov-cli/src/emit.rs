//! Report serialization. Schemas are frozen: CSV headers below are the
//! compatibility contract, JSON mirrors the same field names row by row.
//! Floats are written as {:.16e} (17 significant digits), which round-trips
//! f64 exactly; identical reports serialize to identical bytes.

use crate::config::Format;
use crate::run::Report;
use gribov_core::FormulaRow64;
use std::io::Write;

pub const SPECTRUM_HEADER: &str = "k,sigma_re,sigma_im,modulus,residual,valid";
pub const TRACE_FORMULA_HEADER: &str = "n,radius,nodes,lhs_re,lhs_im,rhs_re,rhs_im,gap,\
j1_re,j1_im,j2_re,j2_im,j3_re,j3_im,j4_re,j4_im,inside_count,valid";
pub const SEMIGROUP_HEADER: &str = "t,full_gap,i1_trace_norm,i1_trace,first_order,\
i2_trace_norm,i2_bound,weight,delta,valid";
pub const TROTTER_HEADER: &str = "n,deviation,fit_c,fit_residual,valid";
pub const DIAGNOSTICS_HEADER: &str = "check,detail,value,target,deviation,valid";

pub fn emit(
    report: &Report,
    format: Format,
    command: &str,
    seed: u64,
    out: &std::path::Path,
) -> Result<(), String> {
    let body = match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report, command, seed),
    };
    let mut file =
        std::fs::File::create(out).map_err(|e| format!("cannot create {}: {e}", out.display()))?;
    file.write_all(body.as_bytes())
        .and_then(|()| file.flush())
        .map_err(|e| format!("cannot write {}: {e}", out.display()))
}

/// 17-significant-digit float field, the same bytes in CSV and JSON.
/// Non-finite values only occur in diagnostic slope fields; they serialize
/// as inf/-inf/nan in CSV and as strings in JSON (which has no literal).
fn f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("\"{x}\"")
    }
}

fn to_csv(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Spectrum(rows) => {
            out.push_str(SPECTRUM_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.k,
                    f(r.sigma.re),
                    f(r.sigma.im),
                    f(r.modulus),
                    f(r.residual),
                    r.valid
                ));
            }
        }
        Report::TraceFormula(rows) => {
            out.push_str(TRACE_FORMULA_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&trace_formula_line(r));
            }
        }
        Report::Semigroup(rows) => {
            out.push_str(SEMIGROUP_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    f(r.t),
                    f(r.full_gap),
                    f(r.i1_trace_norm),
                    f(r.i1_trace),
                    f(r.first_order),
                    f(r.i2_trace_norm),
                    f(r.i2_bound),
                    f(r.weight),
                    f(r.delta),
                    r.valid
                ));
            }
        }
        Report::Trotter(rows) => {
            out.push_str(TROTTER_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    f(r.deviation),
                    f(r.fit_c),
                    f(r.fit_residual),
                    r.valid
                ));
            }
        }
        Report::Diagnostics(rows) => {
            out.push_str(DIAGNOSTICS_HEADER);
            out.push('\n');
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.check,
                    r.detail,
                    f(r.value),
                    f(r.target),
                    f(r.deviation),
                    r.valid
                ));
            }
        }
    }
    out
}

fn trace_formula_line(r: &FormulaRow64) -> String {
    let mut line = format!(
        "{},{},{},{},{},{},{},{}",
        r.index,
        f(r.radius),
        r.nodes,
        f(r.lhs.re),
        f(r.lhs.im),
        f(r.rhs.re),
        f(r.rhs.im),
        f(r.gap)
    );
    for j in &r.per_j {
        line.push_str(&format!(",{},{}", f(j.re), f(j.im)));
    }
    line.push_str(&format!(",{},{}\n", r.inside_count, r.valid));
    line
}

fn to_json(report: &Report, command: &str, seed: u64) -> String {
    let mut rows = Vec::new();
    match report {
        Report::Spectrum(rs) => {
            for r in rs {
                rows.push(format!(
                    "{{\"k\":{},\"sigma_re\":{},\"sigma_im\":{},\"modulus\":{},\
                     \"residual\":{},\"valid\":{}}}",
                    r.k,
                    json_num(r.sigma.re),
                    json_num(r.sigma.im),
                    json_num(r.modulus),
                    json_num(r.residual),
                    r.valid
                ));
            }
        }
        Report::TraceFormula(rs) => {
            for r in rs {
                let mut obj = format!(
                    "{{\"n\":{},\"radius\":{},\"nodes\":{},\"lhs_re\":{},\"lhs_im\":{},\
                     \"rhs_re\":{},\"rhs_im\":{},\"gap\":{}",
                    r.index,
                    json_num(r.radius),
                    r.nodes,
                    json_num(r.lhs.re),
                    json_num(r.lhs.im),
                    json_num(r.rhs.re),
                    json_num(r.rhs.im),
                    json_num(r.gap)
                );
                for (j, v) in r.per_j.iter().enumerate() {
                    obj.push_str(&format!(
                        ",\"j{}_re\":{},\"j{}_im\":{}",
                        j + 1,
                        json_num(v.re),
                        j + 1,
                        json_num(v.im)
                    ));
                }
                obj.push_str(&format!(
                    ",\"inside_count\":{},\"valid\":{}}}",
                    r.inside_count, r.valid
                ));
                rows.push(obj);
            }
        }
        Report::Semigroup(rs) => {
            for r in rs {
                rows.push(format!(
                    "{{\"t\":{},\"full_gap\":{},\"i1_trace_norm\":{},\"i1_trace\":{},\
                     \"first_order\":{},\"i2_trace_norm\":{},\"i2_bound\":{},\
                     \"weight\":{},\"delta\":{},\"valid\":{}}}",
                    json_num(r.t),
                    json_num(r.full_gap),
                    json_num(r.i1_trace_norm),
                    json_num(r.i1_trace),
                    json_num(r.first_order),
                    json_num(r.i2_trace_norm),
                    json_num(r.i2_bound),
                    json_num(r.weight),
                    json_num(r.delta),
                    r.valid
                ));
            }
        }
        Report::Trotter(rs) => {
            for r in rs {
                rows.push(format!(
                    "{{\"n\":{},\"deviation\":{},\"fit_c\":{},\"fit_residual\":{},\
                     \"valid\":{}}}",
                    r.n,
                    json_num(r.deviation),
                    json_num(r.fit_c),
                    json_num(r.fit_residual),
                    r.valid
                ));
            }
        }
        Report::Diagnostics(rs) => {
            for r in rs {
                rows.push(format!(
                    "{{\"check\":\"{}\",\"detail\":\"{}\",\"value\":{},\"target\":{},\
                     \"deviation\":{},\"valid\":{}}}",
                    r.check,
                    r.detail,
                    json_num(r.value),
                    json_num(r.target),
                    json_num(r.deviation),
                    r.valid
                ));
            }
        }
    }
    format!(
        "{{\"command\":\"{command}\",\"seed\":{seed},\"rows\":[{}]}}\n",
        rows.join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_field_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1.2345678901234567e-200, 6.022e23] {
            let s = f(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn header_column_counts() {
        assert_eq!(SPECTRUM_HEADER.split(',').count(), 6);
        assert_eq!(TRACE_FORMULA_HEADER.split(',').count(), 18);
        assert_eq!(SEMIGROUP_HEADER.split(',').count(), 10);
        assert_eq!(TROTTER_HEADER.split(',').count(), 5);
        assert_eq!(DIAGNOSTICS_HEADER.split(',').count(), 6);
    }

    #[test]
    fn nonfinite_goes_quoted_in_json() {
        assert_eq!(json_num(f64::NEG_INFINITY), "\"-inf\"");
        assert_eq!(json_num(1.0), "1.0000000000000000e0");
    }
}
