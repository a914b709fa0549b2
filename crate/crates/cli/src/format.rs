use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

/// `x` rounded to 12 significant digits, printed in shortest form
/// (exponent notation outside `[1e-5, 1e15)`).
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    if (1e-5..1e15).contains(&rounded.abs()) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(2.0f64.sqrt()), "1.41421356237");
        assert_eq!(sig12(32.0), "32");
        assert_eq!(sig12(-1.0e-20), "-1e-20");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(123456789012345.0), "123456789012000");
    }
}
