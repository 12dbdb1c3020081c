use padic_frobenius::analysis::ValuationProfile;
use padic_frobenius::ExtRational;
use std::path::Path;

/// File-name friendly form of a connection name: `twistor-simple(2)` → `twistor-simple_2`.
pub fn file_stem(name: &str) -> String {
    let mapped: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    let trimmed = mapped.trim_matches('_');
    let mut out = String::with_capacity(trimmed.len());
    for c in trimmed.chars() {
        if !(c == '_' && out.ends_with('_')) {
            out.push(c);
        }
    }
    out
}

fn neg_fields(v: &ExtRational) -> [String; 3] {
    match v.finite() {
        Some(x) => {
            let y = -x;
            let f = num_traits::ToPrimitive::to_f64(&y).unwrap_or(f64::NAN);
            [y.numer().to_string(), y.denom().to_string(), format!("{f:.6}")]
        }
        None => [String::new(), String::new(), "-inf".to_string()],
    }
}

/// `m, −val` per coefficient; indeterminate rows carry `−(lower bound)` and `certified = false`.
pub fn write_profile(path: &Path, profile: &ValuationProfile) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["m", "neg_val_num", "neg_val_den", "neg_val_float", "certified"])?;
    for (m, v) in &profile.entries {
        let [num, den, float] = neg_fields(v.lower_bound());
        w.write_record([m.to_string(), num, den, float, v.is_certified().to_string()])?;
    }
    w.flush()
}

/// The line `m/(p−1)`.
pub fn write_reference(path: &Path, p: u64, order: usize) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["m", "reference"])?;
    for m in 0..=order {
        w.write_record([m.to_string(), format!("{:.6}", m as f64 / (p - 1) as f64)])?;
    }
    w.flush()
}
