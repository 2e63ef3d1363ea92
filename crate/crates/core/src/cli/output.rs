use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Creates `path` and writes a `# {json}` provenance line holding the resolved parameters.
pub fn create_with_header<P: Serialize>(path: &Path, parameters: &P) -> Result<BufWriter<File>> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# {}", serde_json::to_string(parameters)?)?;
    Ok(out)
}

/// Writes a CSV table under a provenance line.
pub fn write_csv<P, R>(path: &Path, parameters: &P, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<()>
where
    P: Serialize,
    R: Serialize,
{
    let out = create_with_header(path, parameters)?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Pretty JSON document followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_then_table() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&path, &serde_json::json!({"a": 1}), &["x_MHz", "y"], [(1.0, 2.5), (3.0, -1.0)]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# {\"a\":1}\nx_MHz,y\n1.0,2.5\n3.0,-1.0\n");
    }
}
