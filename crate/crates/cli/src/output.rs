//! Output plumbing: every file is written to a temporary sibling and
//! atomically renamed into place, so failed commands never leave partial
//! files. Floats are formatted with Rust's shortest round-trip `Display`,
//! so re-ingesting an emitted CSV reproduces values bit-exactly.

use anyhow::{Context, Result};
use std::io::Write;
use std::path::Path;

/// Render a CSV cell.
pub fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

/// Write `content` to `path` atomically, or to stdout when no path is given.
pub fn write_atomic(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = match dir {
                Some(d) => tempfile::NamedTempFile::new_in(d),
                None => tempfile::NamedTempFile::new_in("."),
            }
            .context("creating temporary output file")?;
            tmp.write_all(content.as_bytes())
                .context("writing output")?;
            tmp.flush()?;
            tmp.persist(path)
                .with_context(|| format!("renaming output into {}", path.display()))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_round_trip() {
        for &v in &[0.1, 1.0 / 3.0, 2.0f64.powi(-40), 13.053946033696405] {
            let s = cell(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(v.to_bits(), back.to_bits());
        }
        assert_eq!(cell(f64::NAN), "");
    }
}
