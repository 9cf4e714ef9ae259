use std::fs::{self, File};
use std::path::Path;

use anyhow::{Context, Result};

/// Fixed 12-significant-digit scientific notation; negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn numeric_rows<const N: usize>(rows: impl IntoIterator<Item = [f64; N]>) -> Vec<Vec<String>> {
    rows.into_iter()
        .map(|row| row.iter().map(|&x| fmt_num(x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(fmt_num(-0.0), "0.00000000000e0");
        assert_eq!(fmt_num(2f64.sqrt()), "1.41421356237e0");
        assert_eq!(fmt_num(-1.5e-9), "-1.50000000000e-9");
    }
}
