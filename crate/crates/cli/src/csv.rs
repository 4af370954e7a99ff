//! Fixed-header CSV emission. Numbers carry 17 significant digits; missing
//! values are written as `undef`.

use std::io::Write;

use qbattery::analytic::ClosedFormRecord;
use qbattery::scenario::{BoundColumns, StatisticsRecord};
use qbattery::Flagged;

pub const HEADER: [&str; 19] = [
    "t",
    "mean_work",
    "var_work",
    "nsr_work",
    "nsr_work_flag",
    "mean_power",
    "var_power",
    "nsr_power",
    "nsr_power_flag",
    "fisher_work",
    "angle_work",
    "bound_work",
    "fisher_power",
    "angle_power",
    "bound_power",
    "tradeoff_lhs",
    "tradeoff_rhs",
    "tradeoff_flag",
    "fidelity",
];

pub const UNDEF: &str = "undef";
/// Flag written for quantities that were not requested.
pub const DISABLED: &str = "disabled";

pub const ANALYTIC_COLUMNS: [&str; 9] = [
    "exact_mean_work",
    "exact_var_work",
    "exact_nsr_work",
    "exact_mean_power",
    "exact_var_power",
    "exact_nsr_power",
    "exact_nsr_product",
    "nsr_product",
    "nsr_product_flag",
];

pub const PRODUCT_COLUMNS: [&str; 2] = ["nsr_product", "nsr_product_flag"];

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        UNDEF.to_owned()
    }
}

pub fn flagged(x: Flagged) -> String {
    match x.get() {
        Some(v) => num(v),
        None => UNDEF.to_owned(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| UNDEF.to_owned(), num)
}

/// The 19 standard fields of one record.
pub fn record_fields(r: &StatisticsRecord) -> Vec<String> {
    let mut f = vec![
        num(r.t),
        num(r.mean_work),
        num(r.var_work),
        flagged(r.nsr_work),
        r.nsr_work.flag.to_string(),
        num(r.mean_power),
        num(r.var_power),
        flagged(r.nsr_power),
        r.nsr_power.flag.to_string(),
    ];
    for b in [&r.work_bound, &r.power_bound] {
        match b {
            Some(BoundColumns { fisher, angle, bound, .. }) => {
                f.extend([flagged(*fisher), num(*angle), flagged(*bound)]);
            }
            None => f.extend([UNDEF.to_owned(), UNDEF.to_owned(), UNDEF.to_owned()]),
        }
    }
    match &r.tradeoff {
        Some(tr) if tr.is_defined() => f.extend([num(tr.lhs), num(tr.rhs), tr.flag.to_string()]),
        Some(tr) => f.extend([UNDEF.to_owned(), UNDEF.to_owned(), tr.flag.to_string()]),
        None => f.extend([UNDEF.to_owned(), UNDEF.to_owned(), DISABLED.to_owned()]),
    }
    f.push(opt(r.fidelity));
    f
}

/// `NSR_W * NSR_P` and its flag.
pub fn product_fields(r: &StatisticsRecord) -> [String; 2] {
    match (r.nsr_work.get(), r.nsr_power.get()) {
        (Some(w), Some(p)) => [num(w * p), "ok".to_owned()],
        _ => [UNDEF.to_owned(), r.nsr_work.flag.or(r.nsr_power.flag).to_string()],
    }
}

pub fn analytic_fields(r: &StatisticsRecord, exact: &ClosedFormRecord) -> Vec<String> {
    let mut f = vec![
        num(exact.mean_work),
        num(exact.var_work),
        flagged(exact.nsr_work),
        num(exact.mean_power),
        num(exact.var_power),
        flagged(exact.nsr_power),
        flagged(exact.nsr_product),
    ];
    f.extend(product_fields(r));
    f
}

pub fn write_row<W: Write>(w: &mut W, fields: &[String]) -> std::io::Result<()> {
    writeln!(w, "{}", fields.join(","))
}

pub fn header_with(extra: &[&str]) -> Vec<String> {
    HEADER.iter().chain(extra).map(|s| (*s).to_owned()).collect()
}
